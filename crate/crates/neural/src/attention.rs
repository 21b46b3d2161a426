//! Pointer attention: u_j = vᵀ tanh(W1 e_j + W2 d) and its softmax.

use crate::real::Real;
use crate::tensor::{dot, softmax, Mat};

/// W1 e_j for every encoder state, flattened row-major (n × H).
pub fn project_keys<R: Real>(w1: &Mat<R>, states: &[Vec<R>]) -> Vec<R> {
    let h = w1.rows;
    let mut keys = vec![R::zero(); states.len() * h];
    for (j, e) in states.iter().enumerate() {
        w1.matvec_acc(e, &mut keys[j * h..(j + 1) * h]);
    }
    keys
}

/// Scores for one decoder state. Returns u and the activations
/// tanh(W1 e_j + W2 d), flattened n × H.
pub fn scores_from_keys<R: Real>(keys: &[R], d: &[R], w2: &Mat<R>, v: &[R]) -> (Vec<R>, Vec<R>) {
    let h = w2.rows;
    let n = keys.len() / h.max(1);
    let mut q = vec![R::zero(); h];
    w2.matvec_acc(d, &mut q);
    let mut act = vec![R::zero(); n * h];
    let mut u = vec![R::zero(); n];
    for j in 0..n {
        let a = &mut act[j * h..(j + 1) * h];
        let k = &keys[j * h..(j + 1) * h];
        for t in 0..h {
            a[t] = (k[t] + q[t]).tanh_fast();
        }
        u[j] = dot(v, a);
    }
    (u, act)
}

/// Reference form of the score equation over raw encoder states.
pub fn pointer_scores<R: Real>(
    states: &[Vec<R>],
    d: &[R],
    w1: &Mat<R>,
    w2: &Mat<R>,
    v: &[R],
) -> Vec<R> {
    scores_from_keys(&project_keys(w1, states), d, w2, v).0
}

pub fn pointer_distribution<R: Real>(u: &[R]) -> Vec<R> {
    softmax(u)
}

/// Backward of [`scores_from_keys`]. Accumulates into `dkeys`, `dv` and
/// returns the gradient with respect to q = W2 d.
pub fn scores_backward<R: Real>(du: &[R], act: &[R], v: &[R], dkeys: &mut [R], dv: &mut [R]) -> Vec<R> {
    let h = v.len();
    let mut dq = vec![R::zero(); h];
    for (j, &g) in du.iter().enumerate() {
        let a = &act[j * h..(j + 1) * h];
        let dk = &mut dkeys[j * h..(j + 1) * h];
        for t in 0..h {
            let pre = g * v[t] * (R::one() - a[t] * a[t]);
            dk[t] += pre;
            dq[t] += pre;
            dv[t] += g * a[t];
        }
    }
    dq
}
