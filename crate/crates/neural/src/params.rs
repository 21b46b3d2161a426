//! All learnable arrays. Gradients use the same layout.

use rand::Rng;

use crate::config::{DecoderKind, ModelConfig};
use crate::real::Real;
use crate::tensor::Mat;

/// Gate blocks are stacked as input, forget, cell, output.
#[derive(Debug, Clone, PartialEq)]
pub struct LstmParams<R> {
    pub wx: Mat<R>,
    pub wh: Mat<R>,
    pub b: Mat<R>,
}

impl<R: Real> LstmParams<R> {
    pub fn uniform(input: usize, hidden: usize, range: f64, rng: &mut impl Rng) -> Self {
        Self {
            wx: Mat::uniform(4 * hidden, input, range, rng),
            wh: Mat::uniform(4 * hidden, hidden, range, rng),
            b: Mat::uniform(4 * hidden, 1, range, rng),
        }
    }

    pub fn hidden(&self) -> usize {
        self.wh.cols
    }

    pub fn input(&self) -> usize {
        self.wx.cols
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Params<R> {
    pub embedding: Mat<R>,
    pub enc: LstmParams<R>,
    pub dec: LstmParams<R>,
    /// Decoder input at the first step.
    pub go: Mat<R>,
    pub w1: Mat<R>,
    pub w2: Mat<R>,
    pub v: Mat<R>,
    pub out_w: Mat<R>,
    pub out_b: Mat<R>,
}

pub const PARAM_NAMES: [&str; 13] = [
    "embedding", "enc.wx", "enc.wh", "enc.b", "dec.wx", "dec.wh", "dec.b", "go", "attn.w1",
    "attn.w2", "attn.v", "out.w", "out.b",
];

impl<R: Real> Params<R> {
    /// Uniform initialization in ±`range`. Pointer models get empty output
    /// layers and vanilla models empty attention.
    pub fn init(
        cfg: &ModelConfig,
        input_rows: usize,
        output_vocab: usize,
        range: f64,
        rng: &mut impl Rng,
    ) -> Self {
        let (h, d) = (cfg.hidden_size, cfg.embed_size);
        let pointer = cfg.decoder == DecoderKind::Pointer;
        let attn = if pointer { h } else { 0 };
        let out = if pointer { 0 } else { output_vocab };
        Self {
            embedding: Mat::uniform(input_rows, d, range, rng),
            enc: LstmParams::uniform(d, h, range, rng),
            dec: LstmParams::uniform(d, h, range, rng),
            go: Mat::uniform(d, 1, range, rng),
            w1: Mat::uniform(attn, h, range, rng),
            w2: Mat::uniform(attn, h, range, rng),
            v: Mat::uniform(attn, 1, range, rng),
            out_w: Mat::uniform(out, h, range, rng),
            out_b: Mat::uniform(out, 1, range, rng),
        }
    }

    /// Shapes `init` produces, in tensor order.
    pub fn shapes(cfg: &ModelConfig, input_rows: usize, output_vocab: usize) -> [[usize; 2]; 13] {
        let (h, d) = (cfg.hidden_size, cfg.embed_size);
        let pointer = cfg.decoder == DecoderKind::Pointer;
        let a = if pointer { h } else { 0 };
        let o = if pointer { 0 } else { output_vocab };
        [
            [input_rows, d],
            [4 * h, d],
            [4 * h, h],
            [4 * h, 1],
            [4 * h, d],
            [4 * h, h],
            [4 * h, 1],
            [d, 1],
            [a, h],
            [a, h],
            [a, 1],
            [o, h],
            [o, 1],
        ]
    }

    pub fn tensors(&self) -> [&Mat<R>; 13] {
        [
            &self.embedding,
            &self.enc.wx,
            &self.enc.wh,
            &self.enc.b,
            &self.dec.wx,
            &self.dec.wh,
            &self.dec.b,
            &self.go,
            &self.w1,
            &self.w2,
            &self.v,
            &self.out_w,
            &self.out_b,
        ]
    }

    pub fn tensors_mut(&mut self) -> [&mut Mat<R>; 13] {
        [
            &mut self.embedding,
            &mut self.enc.wx,
            &mut self.enc.wh,
            &mut self.enc.b,
            &mut self.dec.wx,
            &mut self.dec.wh,
            &mut self.dec.b,
            &mut self.go,
            &mut self.w1,
            &mut self.w2,
            &mut self.v,
            &mut self.out_w,
            &mut self.out_b,
        ]
    }

    pub fn named(&self) -> impl Iterator<Item = (&'static str, &Mat<R>)> {
        PARAM_NAMES.into_iter().zip(self.tensors())
    }

    pub fn zeros_like(&self) -> Self {
        let mut z = self.clone();
        z.fill_zero();
        z
    }

    pub fn fill_zero(&mut self) {
        for t in self.tensors_mut() {
            t.fill_zero();
        }
    }

    pub fn num_values(&self) -> usize {
        self.tensors().iter().map(|t| t.len()).sum()
    }

    pub fn global_norm(&self) -> R {
        self.tensors()
            .iter()
            .map(|t| t.sum_squares())
            .fold(R::zero(), |a, b| a + b)
            .sqrt()
    }

    pub fn scale(&mut self, c: R) {
        for t in self.tensors_mut() {
            t.data.iter_mut().for_each(|x| *x *= c);
        }
    }

    pub fn is_finite(&self) -> bool {
        self.tensors()
            .iter()
            .all(|t| t.data.iter().all(|x| x.is_finite()))
    }

    /// Every value in tensor order, for checksums and comparisons.
    pub fn flat(&self) -> Vec<R> {
        self.tensors()
            .iter()
            .flat_map(|t| t.data.iter().copied())
            .collect()
    }

    pub fn cast<S: Real>(&self) -> Params<S> {
        let c = |m: &Mat<R>| Mat {
            rows: m.rows,
            cols: m.cols,
            data: m.data.iter().map(|x| S::of(x.as_f64())).collect(),
        };
        let l = |p: &LstmParams<R>| LstmParams {
            wx: c(&p.wx),
            wh: c(&p.wh),
            b: c(&p.b),
        };
        Params {
            embedding: c(&self.embedding),
            enc: l(&self.enc),
            dec: l(&self.dec),
            go: c(&self.go),
            w1: c(&self.w1),
            w2: c(&self.w2),
            v: c(&self.v),
            out_w: c(&self.out_w),
            out_b: c(&self.out_b),
        }
    }
}
