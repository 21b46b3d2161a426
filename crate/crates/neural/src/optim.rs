//! Global-norm clipping and parameter updates.

use crate::config::OptimizerKind;
use crate::error::NeuralError;
use crate::params::Params;
use crate::real::Real;

/// Rescales `grads` so their global L2 norm is at most `max_norm`.
/// Returns the norm before clipping.
pub fn clip_l2<R: Real>(grads: &mut Params<R>, max_norm: R) -> R {
    let norm = grads.global_norm();
    if norm > max_norm {
        grads.scale(max_norm / norm);
    }
    norm
}

/// Names the first tensor holding a non-finite value.
pub fn check_finite<R: Real>(grads: &Params<R>) -> Result<(), NeuralError> {
    match grads
        .named()
        .find(|(_, t)| t.data.iter().any(|x| !x.is_finite()))
    {
        Some((tensor, _)) => Err(NeuralError::NonFiniteGradient { tensor }),
        None => Ok(()),
    }
}

#[derive(Debug, Clone)]
pub struct Adam<R> {
    pub lr: R,
    pub beta1: R,
    pub beta2: R,
    pub eps: R,
    t: i32,
    m: Params<R>,
    v: Params<R>,
}

impl<R: Real> Adam<R> {
    pub fn new(params: &Params<R>, lr: R) -> Self {
        Self {
            lr,
            beta1: R::of(0.9),
            beta2: R::of(0.999),
            eps: R::of(1e-8),
            t: 0,
            m: params.zeros_like(),
            v: params.zeros_like(),
        }
    }

    pub fn steps(&self) -> i32 {
        self.t
    }

    pub fn step(&mut self, params: &mut Params<R>, grads: &Params<R>) {
        self.t += 1;
        let one = R::one();
        let c1 = one - self.beta1.powi(self.t);
        let c2 = one - self.beta2.powi(self.t);
        let tensors = params
            .tensors_mut()
            .into_iter()
            .zip(grads.tensors())
            .zip(self.m.tensors_mut())
            .zip(self.v.tensors_mut());
        for (((p, g), m), v) in tensors {
            for k in 0..p.data.len() {
                let gk = g.data[k];
                m.data[k] = self.beta1 * m.data[k] + (one - self.beta1) * gk;
                v.data[k] = self.beta2 * v.data[k] + (one - self.beta2) * gk * gk;
                let mh = m.data[k] / c1;
                let vh = v.data[k] / c2;
                p.data[k] -= self.lr * mh / (vh.sqrt() + self.eps);
            }
        }
    }
}

#[derive(Debug, Clone)]
pub enum Optimizer<R> {
    Adam(Box<Adam<R>>),
    Sgd { lr: R },
}

impl<R: Real> Optimizer<R> {
    pub fn new(kind: OptimizerKind, params: &Params<R>, lr: f64) -> Self {
        match kind {
            OptimizerKind::Adam => Self::Adam(Box::new(Adam::new(params, R::of(lr)))),
            OptimizerKind::Sgd => Self::Sgd { lr: R::of(lr) },
        }
    }

    /// Applies one update; refuses non-finite gradients without touching
    /// the parameters.
    pub fn step(&mut self, params: &mut Params<R>, grads: &Params<R>) -> Result<(), NeuralError> {
        check_finite(grads)?;
        match self {
            Self::Adam(a) => a.step(params, grads),
            Self::Sgd { lr } => {
                for (p, g) in params.tensors_mut().into_iter().zip(grads.tensors()) {
                    for (x, d) in p.data.iter_mut().zip(&g.data) {
                        *x -= *lr * *d;
                    }
                }
            }
        }
        Ok(())
    }
}
