//! Mini-batch training with best-validation checkpoint selection.

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use ptrlogic_core::preprocess::{EncodedPair, Tokenizer};
use ptrlogic_neural::optim::{clip_l2, Optimizer};
use ptrlogic_neural::{Example, Model, ModelConfig, Params, Real, TrainConfig};

use crate::error::HarnessError;
use crate::eval::{evaluate_pairs, summarize, EpochRecord, RunMetrics};

/// Keeps the shuffling stream apart from the initialization stream.
const SHUFFLE_STREAM: u64 = 0x5348_5546;

#[derive(Debug, Clone, PartialEq)]
pub struct TrainOptions {
    pub threads: usize,
    /// Validate every this many epochs (and always after the last one).
    pub eval_every: usize,
    /// Stop once a validation exact match reaches this value.
    pub target_exact_match: Option<f64>,
}

impl Default for TrainOptions {
    fn default() -> Self {
        Self {
            threads: 1,
            eval_every: 1,
            target_exact_match: None,
        }
    }
}

#[derive(Debug, Clone)]
pub struct TrainOutcome<R> {
    /// Model holding the selected parameters.
    pub model: Model<R>,
    pub curve: Vec<EpochRecord>,
    pub best_epoch: usize,
    /// Set when training stopped early on a non-finite loss or gradient.
    pub aborted: Option<String>,
    pub wall_clock_secs: f64,
}

impl<R> TrainOutcome<R> {
    /// Training summary; rates are those of the selected epoch.
    pub fn metrics(&self, label: &str) -> RunMetrics {
        let best = self
            .curve
            .iter()
            .find(|r| r.epoch == self.best_epoch)
            .expect("selected epoch is recorded");
        RunMetrics {
            label: label.to_string(),
            pairs: 0,
            exact_match: best.valid_exact_match,
            token_accuracy: 0.0,
            precision: 0.0,
            recall: 0.0,
            f1: 0.0,
            loss_curve: self.curve.clone(),
            wall_clock_secs: self.wall_clock_secs,
        }
    }
}

/// Builds vocabularies from `train` and initializes weights from the
/// training seed.
pub fn init_model<R: Real>(
    config: ModelConfig,
    train: &[EncodedPair],
    tcfg: &TrainConfig,
) -> Result<Model<R>, HarnessError> {
    let mut rng = ChaCha8Rng::seed_from_u64(tcfg.rng_seed);
    Ok(Model::build(config, train, tcfg.init_range, &mut rng)?)
}

struct Score {
    exact: f64,
    loss: f64,
}

fn score<R: Real + Send + Sync>(
    model: &Model<R>,
    pairs: &[EncodedPair],
    examples: &[Example],
    tokenizer: &Tokenizer,
    threads: usize,
) -> Result<Score, HarnessError> {
    let outcomes = evaluate_pairs(model, pairs, tokenizer, threads)?;
    let exact = summarize("", &outcomes).exact_match;
    let loss = model.forward_loss(examples, true)?.0.as_f64();
    Ok(Score { exact, loss })
}

/// Trains on `train` with teacher forcing. After every `eval_every` epochs
/// the model is scored on `valid` (or on `train` when `valid` is empty);
/// the parameters with the best exact match, ties broken by lower loss, are
/// returned. Epoch 0 scores the initial parameters. Training ends early when
/// `opts.target_exact_match` is reached.
pub fn train<R: Real + Send + Sync>(
    mut model: Model<R>,
    train: &[EncodedPair],
    valid: &[EncodedPair],
    tokenizer: &Tokenizer,
    tcfg: &TrainConfig,
    opts: &TrainOptions,
) -> Result<TrainOutcome<R>, HarnessError> {
    tcfg.validate().map_err(HarnessError::Invalid)?;
    if train.is_empty() {
        return Err(HarnessError::Invalid("empty training set".into()));
    }
    let start = std::time::Instant::now();
    let examples: Vec<Example> = train.iter().map(|p| model.example(p)).collect::<Result<_, _>>()?;
    let (check_pairs, check_examples) = if valid.is_empty() {
        (train, examples.clone())
    } else {
        let ex = valid.iter().map(|p| model.example(p)).collect::<Result<Vec<_>, _>>()?;
        (valid, ex)
    };
    let threads = opts.threads.max(1);
    let eval_every = opts.eval_every.max(1);

    let s = score(&model, check_pairs, &check_examples, tokenizer, threads)?;
    let mut curve = vec![EpochRecord {
        epoch: 0,
        train_loss: None,
        valid_loss: s.loss,
        valid_exact_match: s.exact,
    }];
    let mut best: (f64, f64, usize, Params<R>) = (s.exact, s.loss, 0, model.params.clone());
    let mut opt = Optimizer::new(tcfg.optimizer, &model.params, tcfg.learning_rate);
    let mut rng = ChaCha8Rng::seed_from_u64(tcfg.rng_seed ^ SHUFFLE_STREAM);
    let mut order: Vec<usize> = (0..examples.len()).collect();
    let clip = R::of(tcfg.clip_norm);
    let mut aborted = None;

    'epochs: for epoch in 1..=tcfg.epochs {
        order.shuffle(&mut rng);
        let mut loss_sum = 0.0;
        let mut steps = 0usize;
        for chunk in order.chunks(tcfg.batch_size) {
            let batch: Vec<Example> = chunk.iter().map(|&i| examples[i].clone()).collect();
            let (loss, mut grads) = model.loss_and_grad(&batch, threads)?;
            if !loss.is_finite() {
                aborted = Some(format!("non-finite loss in epoch {epoch}"));
                break 'epochs;
            }
            clip_l2(&mut grads, clip);
            if let Err(e) = opt.step(&mut model.params, &grads) {
                aborted = Some(format!("epoch {epoch}: {e}"));
                break 'epochs;
            }
            let n: usize = batch.iter().map(|e| e.targets.len()).sum();
            loss_sum += loss.as_f64() * n as f64;
            steps += n;
        }
        if epoch % eval_every == 0 || epoch == tcfg.epochs {
            let s = score(&model, check_pairs, &check_examples, tokenizer, threads)?;
            curve.push(EpochRecord {
                epoch,
                train_loss: Some(loss_sum / steps as f64),
                valid_loss: s.loss,
                valid_exact_match: s.exact,
            });
            if s.exact > best.0 || (s.exact == best.0 && s.loss < best.1) {
                best = (s.exact, s.loss, epoch, model.params.clone());
            }
            if opts.target_exact_match.is_some_and(|t| s.exact >= t) {
                break;
            }
        }
    }
    model.params = best.3;
    Ok(TrainOutcome {
        model,
        curve,
        best_epoch: best.2,
        aborted,
        wall_clock_secs: start.elapsed().as_secs_f64(),
    })
}
