//! Analytic gradients against central finite differences at 64-bit precision.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use ptrlogic_core::preprocess::EncodedPair;
use ptrlogic_neural::attention::{project_keys, scores_backward, scores_from_keys};
use ptrlogic_neural::lstm::{step, step_backward};
use ptrlogic_neural::params::LstmParams;
use ptrlogic_neural::tensor::{dot, Mat};
use ptrlogic_neural::{DecoderKind, Model, ModelConfig};

const EPS: f64 = 1e-4;

/// Five-point central difference; its O(h^4) truncation lets a larger step
/// keep roundoff well below the smallest gradients checked.
fn five_point<F: FnMut(f64) -> f64>(x: f64, mut f: F) -> f64 {
    (-f(x + 2.0 * EPS) + 8.0 * f(x + EPS) - 8.0 * f(x - EPS) + f(x - 2.0 * EPS)) / (12.0 * EPS)
}

/// Relative error with a small floor so exact zeros compare cleanly.
fn rel_err(a: f64, n: f64) -> f64 {
    (a - n).abs() / a.abs().max(n.abs()).max(1e-7)
}

fn rand_vec(rng: &mut ChaCha8Rng, n: usize, r: f64) -> Vec<f64> {
    (0..n).map(|_| rng.gen_range(-r..r)).collect()
}

/// Worst relative error between `analytic` and the numerical derivative of
/// `f` with respect to every entry of `x`.
fn check<F: FnMut(&[f64]) -> f64>(x: &[f64], analytic: &[f64], mut f: F) -> f64 {
    let mut worst = 0.0f64;
    let mut y = x.to_vec();
    for k in 0..x.len() {
        let numeric = five_point(x[k], |v| {
            y[k] = v;
            f(&y)
        });
        y[k] = x[k];
        worst = worst.max(rel_err(analytic[k], numeric));
    }
    worst
}

struct CellCase {
    p: LstmParams<f64>,
    x: Vec<f64>,
    h: Vec<f64>,
    c: Vec<f64>,
    wh_out: Vec<f64>,
    wc_out: Vec<f64>,
}

impl CellCase {
    fn new(seed: u64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        Self {
            p: LstmParams::uniform(5, 8, 0.5, &mut rng),
            x: rand_vec(&mut rng, 5, 1.0),
            h: rand_vec(&mut rng, 8, 1.0),
            c: rand_vec(&mut rng, 8, 1.0),
            wh_out: rand_vec(&mut rng, 8, 1.0),
            wc_out: rand_vec(&mut rng, 8, 1.0),
        }
    }

    fn loss(&self, p: &LstmParams<f64>, x: &[f64], h: &[f64], c: &[f64]) -> f64 {
        let s = step(p, x, h, c);
        dot(&self.wh_out, &s.h) + dot(&self.wc_out, &s.c)
    }
}

#[test]
fn cell_jacobian_matches_finite_differences() {
    for seed in 0..3 {
        let case = CellCase::new(seed);
        let cache = step(&case.p, &case.x, &case.h, &case.c);
        let mut g = case.p.clone();
        for m in [&mut g.wx, &mut g.wh, &mut g.b] {
            m.fill_zero();
        }
        let mut dx = vec![0.0; 5];
        let mut dh = vec![0.0; 8];
        let mut dc = vec![0.0; 8];
        step_backward(&case.p, &cache, &case.wh_out, &case.wc_out, &mut g, &mut dx, &mut dh, &mut dc);

        let mut worst = 0.0f64;
        worst = worst.max(check(&case.x, &dx, |x| case.loss(&case.p, x, &case.h, &case.c)));
        worst = worst.max(check(&case.h, &dh, |h| case.loss(&case.p, &case.x, h, &case.c)));
        worst = worst.max(check(&case.c, &dc, |c| case.loss(&case.p, &case.x, &case.h, c)));
        for which in 0..3 {
            let base = [&case.p.wx, &case.p.wh, &case.p.b][which].data.clone();
            let analytic = [&g.wx, &g.wh, &g.b][which].data.clone();
            worst = worst.max(check(&base, &analytic, |w| {
                let mut p = case.p.clone();
                [&mut p.wx, &mut p.wh, &mut p.b][which].data.copy_from_slice(w);
                case.loss(&p, &case.x, &case.h, &case.c)
            }));
        }
        assert!(worst <= 1e-4, "seed {seed}: worst relative error {worst:e}");
    }
}

/// Loss Σ_t w_t·h_t over a 3-step encoder run from the zero state.
fn encoder_loss(p: &LstmParams<f64>, xs: &[Vec<f64>], ws: &[Vec<f64>]) -> f64 {
    let mut h = vec![0.0; p.hidden()];
    let mut c = vec![0.0; p.hidden()];
    let mut total = 0.0;
    for (x, w) in xs.iter().zip(ws) {
        let s = step(p, x, &h, &c);
        total += dot(w, &s.h);
        h = s.h;
        c = s.c;
    }
    total
}

#[test]
fn encoder_gradient_through_three_steps() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let p = LstmParams::<f64>::uniform(4, 6, 0.5, &mut rng);
    let xs: Vec<Vec<f64>> = (0..3).map(|_| rand_vec(&mut rng, 4, 1.0)).collect();
    let ws: Vec<Vec<f64>> = (0..3).map(|_| rand_vec(&mut rng, 6, 1.0)).collect();

    let mut caches = Vec::new();
    let (mut h, mut c) = (vec![0.0; 6], vec![0.0; 6]);
    for x in &xs {
        let s = step(&p, x, &h, &c);
        h = s.h.clone();
        c = s.c.clone();
        caches.push(s);
    }
    let mut g = p.clone();
    for m in [&mut g.wx, &mut g.wh, &mut g.b] {
        m.fill_zero();
    }
    let mut dxs = vec![vec![0.0; 4]; 3];
    let (mut dh_next, mut dc_next) = (vec![0.0; 6], vec![0.0; 6]);
    let (mut dh_prev, mut dc_prev) = (vec![0.0; 6], vec![0.0; 6]);
    for t in (0..3).rev() {
        let dh: Vec<f64> = dh_next.iter().zip(&ws[t]).map(|(a, b)| a + b).collect();
        step_backward(&p, &caches[t], &dh, &dc_next, &mut g, &mut dxs[t], &mut dh_prev, &mut dc_prev);
        std::mem::swap(&mut dh_next, &mut dh_prev);
        std::mem::swap(&mut dc_next, &mut dc_prev);
    }

    let mut worst = 0.0f64;
    for t in 0..3 {
        worst = worst.max(check(&xs[t], &dxs[t], |x| {
            let mut v = xs.clone();
            v[t] = x.to_vec();
            encoder_loss(&p, &v, &ws)
        }));
    }
    worst = worst.max(check(&p.wh.data, &g.wh.data, |w| {
        let mut q = p.clone();
        q.wh.data.copy_from_slice(w);
        encoder_loss(&q, &xs, &ws)
    }));
    worst = worst.max(check(&p.wx.data, &g.wx.data, |w| {
        let mut q = p.clone();
        q.wx.data.copy_from_slice(w);
        encoder_loss(&q, &xs, &ws)
    }));
    assert!(worst <= 1e-4, "worst relative error {worst:e}");
}

#[test]
fn pointer_score_gradients() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let (n, h) = (5, 6);
    let e: Vec<Vec<f64>> = (0..n).map(|_| rand_vec(&mut rng, h, 1.0)).collect();
    let d = rand_vec(&mut rng, h, 1.0);
    let w1 = Mat::<f64>::uniform(h, h, 0.5, &mut rng);
    let w2 = Mat::<f64>::uniform(h, h, 0.5, &mut rng);
    let v = rand_vec(&mut rng, h, 1.0);
    let c = rand_vec(&mut rng, n, 1.0);

    let loss = |e: &[Vec<f64>], d: &[f64], w1: &Mat<f64>, w2: &Mat<f64>, v: &[f64]| {
        let (u, _) = scores_from_keys(&project_keys(w1, e), d, w2, v);
        dot(&c, &u)
    };

    let keys = project_keys(&w1, &e);
    let (_, act) = scores_from_keys(&keys, &d, &w2, &v);
    let mut dkeys = vec![0.0; n * h];
    let mut dv = vec![0.0; h];
    let dq = scores_backward(&c, &act, &v, &mut dkeys, &mut dv);
    let mut dw2 = Mat::<f64>::zeros(h, h);
    dw2.outer_acc(&dq, &d);
    let mut dd = vec![0.0; h];
    w2.matvec_t_acc(&dq, &mut dd);
    let mut dw1 = Mat::<f64>::zeros(h, h);
    let mut de = vec![vec![0.0; h]; n];
    for j in 0..n {
        dw1.outer_acc(&dkeys[j * h..(j + 1) * h], &e[j]);
        w1.matvec_t_acc(&dkeys[j * h..(j + 1) * h], &mut de[j]);
    }

    let mut worst = 0.0f64;
    worst = worst.max(check(&v, &dv, |x| loss(&e, &d, &w1, &w2, x)));
    worst = worst.max(check(&d, &dd, |x| loss(&e, x, &w1, &w2, &v)));
    worst = worst.max(check(&w1.data, &dw1.data, |x| {
        let m = Mat { rows: h, cols: h, data: x.to_vec() };
        loss(&e, &d, &m, &w2, &v)
    }));
    worst = worst.max(check(&w2.data, &dw2.data, |x| {
        let m = Mat { rows: h, cols: h, data: x.to_vec() };
        loss(&e, &d, &w1, &m, &v)
    }));
    for j in 0..n {
        worst = worst.max(check(&e[j], &de[j], |x| {
            let mut f = e.clone();
            f[j] = x.to_vec();
            loss(&f, &d, &w1, &w2, &v)
        }));
    }
    assert!(worst <= 1e-4, "worst relative error {worst:e}");
}

fn toy_pair() -> EncodedPair {
    let input_tokens: Vec<String> = "[EOS] ; A <= B C"
        .split_whitespace()
        .map(String::from)
        .collect();
    EncodedPair {
        id: "toy".into(),
        input_tokens,
        target_indices: vec![2, 3, 4, 1, 5, 3, 5, 0],
    }
}

fn whole_model_check(decoder: DecoderKind) {
    let cfg = ModelConfig {
        hidden_size: 8,
        embed_size: 5,
        hash_buckets: 3,
        decoder,
        ..ModelConfig::default()
    };
    let pair = toy_pair();
    assert_eq!(pair.input_tokens.len(), 6);
    let model: Model<f64> =
        Model::build(cfg, std::slice::from_ref(&pair), 0.3, &mut ChaCha8Rng::seed_from_u64(2)).unwrap();
    let ex = model.example(&pair).unwrap();
    let (loss, grads) = model.loss_and_grad(std::slice::from_ref(&ex), 1).unwrap();
    let (fwd, _) = model.forward_loss(std::slice::from_ref(&ex), true).unwrap();
    assert!((loss - fwd).abs() < 1e-12);

    let mut worst = 0.0f64;
    let mut probe = model.clone();
    for (t, (name, g)) in grads.named().enumerate() {
        for k in 0..g.data.len() {
            let orig = model.params.tensors()[t].data[k];
            let numeric = five_point(orig, |v| {
                probe.params.tensors_mut()[t].data[k] = v;
                probe.forward_loss(std::slice::from_ref(&ex), true).unwrap().0
            });
            probe.params.tensors_mut()[t].data[k] = orig;
            let err = rel_err(g.data[k], numeric);
            assert!(err <= 1e-3, "{name}[{k}]: relative error {err:e}");
            worst = worst.max(err);
        }
    }
    assert!(worst <= 1e-3);
}

#[test]
fn whole_pointer_model_gradient() {
    whole_model_check(DecoderKind::Pointer);
}

#[test]
fn whole_vanilla_model_gradient() {
    whole_model_check(DecoderKind::Vanilla);
}

#[test]
fn batched_gradient_matches_across_thread_counts() {
    let cfg = ModelConfig {
        hidden_size: 6,
        embed_size: 4,
        hash_buckets: 3,
        ..ModelConfig::default()
    };
    let pair = toy_pair();
    let mut other = toy_pair();
    other.target_indices = vec![4, 3, 2, 0];
    let model: Model<f64> =
        Model::build(cfg, std::slice::from_ref(&pair), 0.3, &mut ChaCha8Rng::seed_from_u64(4)).unwrap();
    let batch = vec![model.example(&pair).unwrap(), model.example(&other).unwrap()];
    let (l1, g1) = model.loss_and_grad(&batch, 1).unwrap();
    let (l2, g2) = model.loss_and_grad(&batch, 2).unwrap();
    assert!((l1 - l2).abs() < 1e-12);
    for (a, b) in g1.flat().iter().zip(g2.flat()) {
        assert!((a - b).abs() < 1e-12);
    }
}
