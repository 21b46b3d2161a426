//! Encoder-decoder forward pass, loss, backward pass and greedy decoding.

use rand::Rng;

use ptrlogic_core::logic::END_MARKER;
use ptrlogic_core::preprocess::{decode_pointers, EncodedPair};

use crate::attention::{project_keys, scores_backward, scores_from_keys};
use crate::config::{DecoderKind, ModelConfig};
use crate::error::NeuralError;
use crate::lstm::{step, step_backward, StepCache};
use crate::params::Params;
use crate::real::Real;
use crate::tensor::{argmax, axpy, softmax_in_place};
use crate::vocab::{OutputVocab, Vocab};

/// A training pair resolved to embedding rows and output ids. For the
/// pointer decoder targets are input positions; for the vanilla decoder
/// they are output-vocabulary ids ending in [`OutputVocab::END`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Example {
    pub input_rows: Vec<usize>,
    pub targets: Vec<usize>,
    pub end: usize,
}

/// Per example, per decoder step, the output distribution.
pub type StepDistributions<R> = Vec<Vec<Vec<R>>>;

#[derive(Debug, Clone, PartialEq)]
pub struct Model<R> {
    pub config: ModelConfig,
    pub vocab: Vocab,
    pub out_vocab: Option<OutputVocab>,
    pub params: Params<R>,
    /// Embedding row of each output-vocabulary token (vanilla only).
    out_rows: Vec<usize>,
}

enum Feed<'a> {
    Teacher(&'a [usize]),
    Greedy { steps: Option<usize>, max: usize },
}

struct Trace<R> {
    enc: Vec<StepCache<R>>,
    keys: Vec<R>,
    dec: Vec<StepCache<R>>,
    acts: Vec<Vec<R>>,
    probs: Vec<Vec<R>>,
    fed: Vec<Option<usize>>,
    outputs: Vec<usize>,
}

impl<R: Real> Model<R> {
    /// Builds vocabularies from the training pairs and initializes weights.
    pub fn build(
        config: ModelConfig,
        pairs: &[EncodedPair],
        init_range: f64,
        rng: &mut impl Rng,
    ) -> Result<Self, NeuralError> {
        config.validate().map_err(NeuralError::Config)?;
        let vocab = Vocab::build(
            pairs.iter().map(|p| p.input_tokens.as_slice()),
            config.hash_buckets,
            config.hash_symbols,
        )
        .map_err(|e| NeuralError::Config(e.to_string()))?;
        let out_vocab = match config.decoder {
            DecoderKind::Pointer => None,
            DecoderKind::Vanilla => {
                let targets = pairs
                    .iter()
                    .map(|p| decode_pointers(&p.input_tokens, &p.target_indices))
                    .collect::<Result<Vec<_>, _>>()
                    .map_err(|e| NeuralError::Config(e.to_string()))?;
                Some(OutputVocab::build(targets.iter().map(Vec::as_slice)))
            }
        };
        let out_len = out_vocab.as_ref().map_or(0, OutputVocab::len);
        let params = Params::init(&config, vocab.rows(), out_len, init_range, rng);
        Self::from_parts(config, vocab, out_vocab, params)
    }

    /// Assembles a model, checking that parameter shapes match the config.
    pub fn from_parts(
        config: ModelConfig,
        vocab: Vocab,
        out_vocab: Option<OutputVocab>,
        params: Params<R>,
    ) -> Result<Self, NeuralError> {
        config.validate().map_err(NeuralError::Config)?;
        if (config.decoder == DecoderKind::Vanilla) != out_vocab.is_some() {
            return Err(NeuralError::Config(
                "an output vocabulary is required exactly for the vanilla decoder".into(),
            ));
        }
        let out_len = out_vocab.as_ref().map_or(0, OutputVocab::len);
        let expected = Params::<R>::shapes(&config, vocab.rows(), out_len);
        for ((name, a), b) in params.named().zip(expected) {
            if a.shape() != b {
                return Err(NeuralError::DimensionMismatch(format!(
                    "{name} has shape {:?}, config expects {b:?}",
                    a.shape()
                )));
            }
        }
        let out_rows = out_vocab.as_ref().map_or_else(Vec::new, |o| {
            (0..o.len()).map(|i| vocab.row(o.token(i))).collect()
        });
        Ok(Self {
            config,
            vocab,
            out_vocab,
            params,
            out_rows,
        })
    }

    fn pointer(&self) -> bool {
        self.config.decoder == DecoderKind::Pointer
    }

    pub fn input_rows(&self, tokens: &[String]) -> Result<Vec<usize>, NeuralError> {
        if tokens.len() > self.config.max_input_len {
            return Err(NeuralError::LengthOverflow {
                len: tokens.len(),
                max: self.config.max_input_len,
            });
        }
        Ok(tokens.iter().map(|t| self.vocab.row(t)).collect())
    }

    /// Embedding vectors for `tokens`; unseen tokens get their hashed row.
    pub fn embed(&self, tokens: &[String]) -> Result<Vec<Vec<R>>, NeuralError> {
        Ok(self
            .input_rows(tokens)?
            .into_iter()
            .map(|r| self.params.embedding.row(r).to_vec())
            .collect())
    }

    fn end_of(&self, tokens: &[String]) -> usize {
        if self.pointer() {
            tokens
                .iter()
                .position(|t| t == END_MARKER)
                .unwrap_or(usize::MAX)
        } else {
            OutputVocab::END
        }
    }

    pub fn example(&self, pair: &EncodedPair) -> Result<Example, NeuralError> {
        let input_rows = self.input_rows(&pair.input_tokens)?;
        let n = input_rows.len();
        if n == 0 {
            return Err(NeuralError::EmptyInput);
        }
        if let Some(&index) = pair.target_indices.iter().find(|&&i| i >= n) {
            return Err(NeuralError::IndexOutOfRange { index, len: n });
        }
        let targets = match &self.out_vocab {
            None => pair.target_indices.clone(),
            Some(o) => {
                let tokens = decode_pointers(&pair.input_tokens, &pair.target_indices)
                    .map_err(|e| NeuralError::Config(e.to_string()))?;
                let mut ids: Vec<usize> = tokens.iter().map(|t| o.id(t)).collect();
                ids.push(OutputVocab::END);
                ids
            }
        };
        if targets.len() > self.config.max_output_len {
            return Err(NeuralError::LengthOverflow {
                len: targets.len(),
                max: self.config.max_output_len,
            });
        }
        Ok(Example {
            input_rows,
            targets,
            end: self.end_of(&pair.input_tokens),
        })
    }

    fn feed_row(&self, input_rows: &[usize], out: usize) -> usize {
        if self.pointer() {
            input_rows[out]
        } else {
            self.out_rows[out]
        }
    }

    fn forward(&self, input_rows: &[usize], end: usize, feed: Feed, keep: bool) -> Trace<R> {
        let p = &self.params;
        let h = self.config.hidden_size;
        let zeros = vec![R::zero(); h];
        let mut enc: Vec<StepCache<R>> = Vec::with_capacity(input_rows.len());
        for &r in input_rows {
            let (hp, cp) = enc.last().map_or((&zeros, &zeros), |c| (&c.h, &c.c));
            let cache = step(&p.enc, p.embedding.row(r), hp, cp);
            enc.push(cache);
        }
        let keys = if self.pointer() {
            let states: Vec<Vec<R>> = enc.iter().map(|c| c.h.clone()).collect();
            project_keys(&p.w1, &states)
        } else {
            Vec::new()
        };
        let mut trace = Trace {
            keys,
            dec: Vec::new(),
            acts: Vec::new(),
            probs: Vec::new(),
            fed: Vec::new(),
            outputs: Vec::new(),
            enc: Vec::new(),
        };
        let (mut hs, mut cs) = enc
            .last()
            .map_or((zeros.clone(), zeros.clone()), |c| (c.h.clone(), c.c.clone()));
        let mut i = 0;
        loop {
            match feed {
                Feed::Teacher(t) if i == t.len() => break,
                Feed::Greedy { steps: Some(s), .. } if i == s => break,
                Feed::Greedy { steps: None, max } if i == max => break,
                _ => {}
            }
            let fed = match (i, &feed) {
                (0, _) => None,
                (_, Feed::Teacher(t)) => Some(self.feed_row(input_rows, t[i - 1])),
                _ => Some(self.feed_row(input_rows, trace.outputs[i - 1])),
            };
            let x = fed.map_or(p.go.data.as_slice(), |r| p.embedding.row(r));
            let cache = step(&p.dec, x, &hs, &cs);
            let (probs, act) = if self.pointer() {
                let (mut u, act) = scores_from_keys(&trace.keys, &cache.h, &p.w2, &p.v.data);
                softmax_in_place(&mut u);
                (u, act)
            } else {
                let mut z = p.out_b.data.clone();
                p.out_w.matvec_acc(&cache.h, &mut z);
                softmax_in_place(&mut z);
                (z, Vec::new())
            };
            let out = argmax(&probs);
            hs.clone_from(&cache.h);
            cs.clone_from(&cache.c);
            trace.outputs.push(out);
            trace.fed.push(fed);
            if keep {
                trace.dec.push(cache);
                trace.acts.push(act);
            }
            trace.probs.push(probs);
            i += 1;
            if matches!(feed, Feed::Greedy { steps: None, .. }) && out == end {
                break;
            }
        }
        if keep {
            trace.enc = enc;
        }
        trace
    }

    fn nll(trace: &Trace<R>, targets: &[usize]) -> R {
        targets
            .iter()
            .zip(&trace.probs)
            .map(|(&t, p)| -p[t].ln())
            .fold(R::zero(), |a, b| a + b)
    }

    fn backward(&self, trace: &Trace<R>, ex: &Example, scale: R, g: &mut Params<R>) {
        let p = &self.params;
        let h = self.config.hidden_size;
        let n = ex.input_rows.len();
        let mut dkeys = vec![R::zero(); if self.pointer() { n * h } else { 0 }];
        let mut dh_next = vec![R::zero(); h];
        let mut dc_next = vec![R::zero(); h];
        let mut dh_prev = vec![R::zero(); h];
        let mut dc_prev = vec![R::zero(); h];
        let mut dx = vec![R::zero(); self.config.embed_size];
        for i in (0..trace.probs.len()).rev() {
            let cache = &trace.dec[i];
            let mut du = trace.probs[i].clone();
            du[ex.targets[i]] -= R::one();
            du.iter_mut().for_each(|x| *x *= scale);
            let mut dd = dh_next.clone();
            if self.pointer() {
                let dq = scores_backward(&du, &trace.acts[i], &p.v.data, &mut dkeys, &mut g.v.data);
                g.w2.outer_acc(&dq, &cache.h);
                p.w2.matvec_t_acc(&dq, &mut dd);
            } else {
                g.out_w.outer_acc(&du, &cache.h);
                axpy(R::one(), &du, &mut g.out_b.data);
                p.out_w.matvec_t_acc(&du, &mut dd);
            }
            dx.iter_mut().for_each(|x| *x = R::zero());
            step_backward(&p.dec, cache, &dd, &dc_next, &mut g.dec, &mut dx, &mut dh_prev, &mut dc_prev);
            match trace.fed[i] {
                None => axpy(R::one(), &dx, &mut g.go.data),
                Some(r) => axpy(R::one(), &dx, g.embedding.row_mut(r)),
            }
            std::mem::swap(&mut dh_next, &mut dh_prev);
            std::mem::swap(&mut dc_next, &mut dc_prev);
        }
        for j in (0..n).rev() {
            let cache = &trace.enc[j];
            let mut dh = dh_next.clone();
            if self.pointer() {
                let dk = &dkeys[j * h..(j + 1) * h];
                g.w1.outer_acc(dk, &cache.h);
                p.w1.matvec_t_acc(dk, &mut dh);
            }
            dx.iter_mut().for_each(|x| *x = R::zero());
            step_backward(&p.enc, cache, &dh, &dc_next, &mut g.enc, &mut dx, &mut dh_prev, &mut dc_prev);
            axpy(R::one(), &dx, g.embedding.row_mut(ex.input_rows[j]));
            std::mem::swap(&mut dh_next, &mut dh_prev);
            std::mem::swap(&mut dc_next, &mut dc_prev);
        }
    }

    /// Mean negative log-likelihood over all decoder steps of the batch, and
    /// the distribution emitted at every step. Without teacher forcing the
    /// decoder consumes its own previous prediction.
    pub fn forward_loss(
        &self,
        batch: &[Example],
        teacher_forced: bool,
    ) -> Result<(R, StepDistributions<R>), NeuralError> {
        if batch.is_empty() {
            return Err(NeuralError::EmptyBatch);
        }
        let mut total = R::zero();
        let mut steps = 0usize;
        let mut dists = Vec::with_capacity(batch.len());
        for ex in batch {
            self.check(ex)?;
            let feed = if teacher_forced {
                Feed::Teacher(&ex.targets)
            } else {
                Feed::Greedy {
                    steps: Some(ex.targets.len()),
                    max: ex.targets.len(),
                }
            };
            let trace = self.forward(&ex.input_rows, ex.end, feed, false);
            total += Self::nll(&trace, &ex.targets);
            steps += ex.targets.len();
            dists.push(trace.probs);
        }
        Ok((total / R::of(steps.max(1) as f64), dists))
    }

    fn check(&self, ex: &Example) -> Result<(), NeuralError> {
        let n = ex.input_rows.len();
        if n == 0 {
            return Err(NeuralError::EmptyInput);
        }
        let bound = if self.pointer() {
            n
        } else {
            self.out_rows.len()
        };
        match ex.targets.iter().find(|&&t| t >= bound) {
            Some(&index) => Err(NeuralError::IndexOutOfRange { index, len: bound }),
            None => Ok(()),
        }
    }

    fn chunk_grad(&self, chunk: &[Example], scale: R) -> (R, Params<R>) {
        let mut g = self.params.zeros_like();
        let mut nll = R::zero();
        for ex in chunk {
            let trace = self.forward(&ex.input_rows, ex.end, Feed::Teacher(&ex.targets), true);
            nll += Self::nll(&trace, &ex.targets);
            self.backward(&trace, ex, scale, &mut g);
        }
        (nll, g)
    }

    /// Teacher-forced loss and its gradient. The batch is split into
    /// `threads` contiguous chunks whose gradients are summed in order, so
    /// the result depends only on the batch and the thread count.
    pub fn loss_and_grad(&self, batch: &[Example], threads: usize) -> Result<(R, Params<R>), NeuralError>
    where
        R: Send + Sync,
    {
        if batch.is_empty() {
            return Err(NeuralError::EmptyBatch);
        }
        for ex in batch {
            self.check(ex)?;
        }
        let steps: usize = batch.iter().map(|e| e.targets.len()).sum();
        let scale = R::one() / R::of(steps.max(1) as f64);
        let threads = threads.clamp(1, batch.len());
        let size = batch.len().div_ceil(threads);
        let parts: Vec<(R, Params<R>)> = if threads == 1 {
            vec![self.chunk_grad(batch, scale)]
        } else {
            std::thread::scope(|s| {
                let handles: Vec<_> = batch
                    .chunks(size)
                    .map(|c| s.spawn(move || self.chunk_grad(c, scale)))
                    .collect();
                handles.into_iter().map(|h| h.join().expect("gradient worker panicked")).collect()
            })
        };
        let mut parts = parts.into_iter();
        let (mut nll, mut grads) = parts.next().expect("at least one chunk");
        for (l, g) in parts {
            nll += l;
            for (a, b) in grads.tensors_mut().into_iter().zip(g.tensors()) {
                axpy(R::one(), &b.data, &mut a.data);
            }
        }
        Ok((nll * scale, grads))
    }

    /// Greedy decoding: argmax per step, lowest index on ties, stopping after
    /// the end marker or `max_output_len` steps. The end marker is included.
    pub fn decode_greedy(&self, input_tokens: &[String], max_output_len: usize) -> Result<Vec<usize>, NeuralError> {
        let rows = self.input_rows(input_tokens)?;
        if rows.is_empty() {
            return Err(NeuralError::EmptyInput);
        }
        let feed = Feed::Greedy {
            steps: None,
            max: max_output_len,
        };
        Ok(self.forward(&rows, self.end_of(input_tokens), feed, false).outputs)
    }

    /// Greedy decoding mapped back to completion tokens.
    pub fn predict_tokens(&self, input_tokens: &[String]) -> Result<Vec<String>, NeuralError> {
        let ids = self.decode_greedy(input_tokens, self.config.max_output_len)?;
        Ok(match &self.out_vocab {
            None => decode_pointers(input_tokens, &ids).expect("pointer outputs index the input"),
            Some(o) => ids
                .iter()
                .take_while(|&&i| i != OutputVocab::END)
                .map(|&i| o.token(i).to_string())
                .collect(),
        })
    }
}
