//! Flat `key = value` run configuration.
//!
//! Keys mirror the generator, model and training fields. `rng_seed` sets
//! every seed at once; `gen_seed`, `split_seed`, `train_seed` and
//! `norm_seed` set them one by one. Blank lines and `#` comments are
//! ignored. `embed_size` follows `hidden_size` unless given explicitly.

use std::fmt::Write;

use ptrlogic_core::generator::GenConfig;
use ptrlogic_neural::{DecoderKind, ModelConfig, OptimizerKind, TrainConfig};

use crate::data::{NormalizeSetting, PrepConfig, TokenizerKind};
use crate::error::HarnessError;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Precision {
    F32,
    F64,
}

impl Precision {
    pub fn name(self) -> &'static str {
        match self {
            Precision::F32 => "f32",
            Precision::F64 => "f64",
        }
    }

    pub fn from_name(s: &str) -> Option<Self> {
        match s {
            "f32" => Some(Self::F32),
            "f64" => Some(Self::F64),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub gen: GenConfig,
    /// Number of KBs in a generated corpus.
    pub count: usize,
    pub split_seed: u64,
    pub prep: PrepConfig,
    pub model: ModelConfig,
    pub train: TrainConfig,
    pub threads: usize,
    pub eval_every: usize,
    pub precision: Precision,
    /// Early-stopping threshold on validation exact match; `none` disables.
    pub target_exact_match: Option<f64>,
    embed_explicit: bool,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            gen: GenConfig::default(),
            count: 1000,
            split_seed: 0,
            prep: PrepConfig::default(),
            model: ModelConfig::default(),
            train: TrainConfig::default(),
            threads: 1,
            eval_every: 1,
            precision: Precision::F32,
            target_exact_match: None,
            embed_explicit: false,
        }
    }
}

fn num<T: std::str::FromStr>(key: &str, v: &str) -> Result<T, String> {
    v.parse().map_err(|_| format!("invalid value {v:?} for {key}"))
}

fn flag(key: &str, v: &str) -> Result<bool, String> {
    match v {
        "true" | "1" => Ok(true),
        "false" | "0" => Ok(false),
        _ => Err(format!("invalid value {v:?} for {key}")),
    }
}

fn named<T>(key: &str, v: &str, f: impl Fn(&str) -> Option<T>) -> Result<T, String> {
    f(v).ok_or_else(|| format!("invalid value {v:?} for {key}"))
}

impl RunConfig {
    pub fn set(&mut self, key: &str, v: &str) -> Result<(), String> {
        match key {
            "kb_size" => self.gen.kb_size = num(key, v)?,
            "difficulty" => self.gen.difficulty = num(key, v)?,
            "concept_pool" => self.gen.concept_pool = num(key, v)?,
            "role_pool" => self.gen.role_pool = num(key, v)?,
            "count" => self.count = num(key, v)?,
            "rng_seed" => {
                let s: u64 = num(key, v)?;
                self.gen.rng_seed = s;
                self.split_seed = s;
                self.train.rng_seed = s;
                self.prep.norm_seed = s;
            }
            "gen_seed" => self.gen.rng_seed = num(key, v)?,
            "split_seed" => self.split_seed = num(key, v)?,
            "train_seed" => self.train.rng_seed = num(key, v)?,
            "norm_seed" => self.prep.norm_seed = num(key, v)?,
            "tokenizer" => self.prep.tokenizer = named(key, v, TokenizerKind::from_name)?,
            "bpe_budget" => self.prep.bpe_budget = num(key, v)?,
            "normalize" => self.prep.normalize = named(key, v, NormalizeSetting::from_name)?,
            "pool_size" => self.prep.pool_size = num(key, v)?,
            "hidden_size" => {
                self.model.hidden_size = num(key, v)?;
                if !self.embed_explicit {
                    self.model.embed_size = self.model.hidden_size;
                }
            }
            "embed_size" => {
                self.model.embed_size = num(key, v)?;
                self.embed_explicit = true;
            }
            "hash_buckets" => self.model.hash_buckets = num(key, v)?,
            "hash_symbols" => self.model.hash_symbols = flag(key, v)?,
            "max_input_len" => self.model.max_input_len = num(key, v)?,
            "max_output_len" => self.model.max_output_len = num(key, v)?,
            "decoder" => self.model.decoder = named(key, v, DecoderKind::from_name)?,
            "batch_size" => self.train.batch_size = num(key, v)?,
            "init_range" => self.train.init_range = num(key, v)?,
            "clip_norm" => self.train.clip_norm = num(key, v)?,
            "optimizer" => self.train.optimizer = named(key, v, OptimizerKind::from_name)?,
            "learning_rate" => self.train.learning_rate = num(key, v)?,
            "epochs" => self.train.epochs = num(key, v)?,
            "threads" => self.threads = num(key, v)?,
            "eval_every" => self.eval_every = num(key, v)?,
            "precision" => self.precision = named(key, v, Precision::from_name)?,
            "target_exact_match" => {
                self.target_exact_match = if v == "none" { None } else { Some(num(key, v)?) }
            }
            _ => return Err(format!("unknown key {key:?}")),
        }
        Ok(())
    }

    /// Applies every assignment of `text` on top of `self`.
    pub fn apply_text(&mut self, text: &str) -> Result<(), HarnessError> {
        for (i, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let err = |msg: String| HarnessError::Config { line: i + 1, msg };
            let (k, v) = line
                .split_once('=')
                .ok_or_else(|| err(format!("expected key = value, got {line:?}")))?;
            self.set(k.trim(), v.trim()).map_err(err)?;
        }
        Ok(())
    }

    pub fn parse(text: &str) -> Result<Self, HarnessError> {
        let mut c = Self::default();
        c.apply_text(text)?;
        Ok(c)
    }

    /// Every key, in a form [`RunConfig::parse`] reads back.
    pub fn to_text(&self) -> String {
        let mut s = String::new();
        let mut kv = |k: &str, v: String| {
            let _ = writeln!(s, "{k} = {v}");
        };
        kv("kb_size", self.gen.kb_size.to_string());
        kv("difficulty", self.gen.difficulty.to_string());
        kv("concept_pool", self.gen.concept_pool.to_string());
        kv("role_pool", self.gen.role_pool.to_string());
        kv("count", self.count.to_string());
        kv("gen_seed", self.gen.rng_seed.to_string());
        kv("split_seed", self.split_seed.to_string());
        kv("train_seed", self.train.rng_seed.to_string());
        kv("norm_seed", self.prep.norm_seed.to_string());
        kv("tokenizer", self.prep.tokenizer.name().into());
        kv("bpe_budget", self.prep.bpe_budget.to_string());
        kv("normalize", self.prep.normalize.name().into());
        kv("pool_size", self.prep.pool_size.to_string());
        kv("hidden_size", self.model.hidden_size.to_string());
        kv("embed_size", self.model.embed_size.to_string());
        kv("hash_buckets", self.model.hash_buckets.to_string());
        kv("hash_symbols", self.model.hash_symbols.to_string());
        kv("max_input_len", self.model.max_input_len.to_string());
        kv("max_output_len", self.model.max_output_len.to_string());
        kv("decoder", self.model.decoder.name().into());
        kv("batch_size", self.train.batch_size.to_string());
        kv("init_range", self.train.init_range.to_string());
        kv("clip_norm", self.train.clip_norm.to_string());
        kv("optimizer", self.train.optimizer.name().into());
        kv("learning_rate", self.train.learning_rate.to_string());
        kv("epochs", self.train.epochs.to_string());
        kv("threads", self.threads.to_string());
        kv("eval_every", self.eval_every.to_string());
        kv("precision", self.precision.name().into());
        kv(
            "target_exact_match",
            self.target_exact_match.map_or("none".into(), |t| t.to_string()),
        );
        s
    }
}
