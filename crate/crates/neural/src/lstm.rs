//! LSTM cell with cached activations for backpropagation through time.

use crate::error::NeuralError;
use crate::params::LstmParams;
use crate::real::Real;

#[derive(Debug, Clone, PartialEq)]
pub struct LstmState<R> {
    pub h: Vec<R>,
    pub c: Vec<R>,
}

impl<R: Real> LstmState<R> {
    pub fn zeros(hidden: usize) -> Self {
        Self {
            h: vec![R::zero(); hidden],
            c: vec![R::zero(); hidden],
        }
    }
}

/// Everything one step needs for its backward pass.
#[derive(Debug, Clone)]
pub struct StepCache<R> {
    pub x: Vec<R>,
    pub h_prev: Vec<R>,
    pub c_prev: Vec<R>,
    /// Activated gates i, f, g, o.
    pub gates: Vec<R>,
    pub c: Vec<R>,
    pub tanh_c: Vec<R>,
    pub h: Vec<R>,
}

pub fn rnn_cell_step<R: Real>(
    p: &LstmParams<R>,
    x: &[R],
    state: &LstmState<R>,
) -> Result<LstmState<R>, NeuralError> {
    if x.len() != p.input() || state.h.len() != p.hidden() || state.c.len() != p.hidden() {
        return Err(NeuralError::DimensionMismatch(format!(
            "cell expects input {} and state {}, got {} and {}/{}",
            p.input(),
            p.hidden(),
            x.len(),
            state.h.len(),
            state.c.len()
        )));
    }
    let cache = step(p, x, &state.h, &state.c);
    Ok(LstmState {
        h: cache.h,
        c: cache.c,
    })
}

/// One step from raw slices, keeping what the backward pass needs.
pub fn step<R: Real>(p: &LstmParams<R>, x: &[R], h_prev: &[R], c_prev: &[R]) -> StepCache<R> {
    let n = p.hidden();
    let mut z = p.b.data.clone();
    p.wx.matvec_acc(x, &mut z);
    p.wh.matvec_acc(h_prev, &mut z);
    for k in 0..n {
        z[k] = z[k].sigmoid();
        z[n + k] = z[n + k].sigmoid();
        z[2 * n + k] = z[2 * n + k].tanh();
        z[3 * n + k] = z[3 * n + k].sigmoid();
    }
    let mut c = vec![R::zero(); n];
    let mut tanh_c = vec![R::zero(); n];
    let mut h = vec![R::zero(); n];
    for k in 0..n {
        c[k] = z[n + k] * c_prev[k] + z[k] * z[2 * n + k];
        tanh_c[k] = c[k].tanh();
        h[k] = z[3 * n + k] * tanh_c[k];
    }
    StepCache {
        x: x.to_vec(),
        h_prev: h_prev.to_vec(),
        c_prev: c_prev.to_vec(),
        gates: z,
        c,
        tanh_c,
        h,
    }
}

/// Backward through one step. `dh` and `dc` are gradients with respect to
/// the step's outputs; gradients for the previous state are written to
/// `dh_prev` and `dc_prev`, the input gradient is added to `dx`.
#[allow(clippy::too_many_arguments)]
pub fn step_backward<R: Real>(
    p: &LstmParams<R>,
    cache: &StepCache<R>,
    dh: &[R],
    dc: &[R],
    grads: &mut LstmParams<R>,
    dx: &mut [R],
    dh_prev: &mut [R],
    dc_prev: &mut [R],
) {
    let n = p.hidden();
    let one = R::one();
    let g = &cache.gates;
    let mut dz = vec![R::zero(); 4 * n];
    for k in 0..n {
        let (i, f, gg, o) = (g[k], g[n + k], g[2 * n + k], g[3 * n + k]);
        let tc = cache.tanh_c[k];
        let d_o = dh[k] * tc;
        let d_c = dc[k] + dh[k] * o * (one - tc * tc);
        dz[k] = d_c * gg * i * (one - i);
        dz[n + k] = d_c * cache.c_prev[k] * f * (one - f);
        dz[2 * n + k] = d_c * i * (one - gg * gg);
        dz[3 * n + k] = d_o * o * (one - o);
        dc_prev[k] = d_c * f;
    }
    grads.wx.outer_acc(&dz, &cache.x);
    grads.wh.outer_acc(&dz, &cache.h_prev);
    for (b, d) in grads.b.data.iter_mut().zip(&dz) {
        *b += *d;
    }
    p.wx.matvec_t_acc(&dz, dx);
    dh_prev.iter_mut().for_each(|x| *x = R::zero());
    p.wh.matvec_t_acc(&dz, dh_prev);
}

/// Runs the cell over `inputs` from a zero state.
pub fn encode<R: Real>(p: &LstmParams<R>, inputs: &[Vec<R>]) -> Result<Vec<LstmState<R>>, NeuralError> {
    let mut state = LstmState::zeros(p.hidden());
    let mut out = Vec::with_capacity(inputs.len());
    for x in inputs {
        state = rnn_cell_step(p, x, &state)?;
        out.push(state.clone());
    }
    Ok(out)
}
