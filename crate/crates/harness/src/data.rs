//! Corpus generation, normalization, tokenization and encoding.

use ptrlogic_core::corpus::{build_corpus_with_meta, CorpusPair, CorpusSplit, PairMeta};
use ptrlogic_core::el_reasoner::complete_el;
use ptrlogic_core::generator::{gen_el_kb, GenConfig};
use ptrlogic_core::logic::el::ElKb;
use ptrlogic_core::logic::{Statement, Theory};
use ptrlogic_core::preprocess::normalize::DEFAULT_POOL_SIZE;
use ptrlogic_core::preprocess::{
    bpe_train, encode_corpus_pair, input_text, normalize, statements_text, EncodedPair, NormalizeMode,
    Tokenizer,
};

use crate::error::HarnessError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum NormalizeSetting {
    Off,
    Random,
    Canonical,
}

impl NormalizeSetting {
    pub fn name(self) -> &'static str {
        match self {
            NormalizeSetting::Off => "off",
            NormalizeSetting::Random => "random",
            NormalizeSetting::Canonical => "canonical",
        }
    }

    pub fn from_name(s: &str) -> Option<Self> {
        match s {
            "off" => Some(Self::Off),
            _ => NormalizeMode::from_name(s).map(|m| match m {
                NormalizeMode::Random => Self::Random,
                NormalizeMode::Canonical => Self::Canonical,
            }),
        }
    }

    fn mode(self) -> Option<NormalizeMode> {
        match self {
            NormalizeSetting::Off => None,
            NormalizeSetting::Random => Some(NormalizeMode::Random),
            NormalizeSetting::Canonical => Some(NormalizeMode::Canonical),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum TokenizerKind {
    Whitespace,
    Bpe,
}

impl TokenizerKind {
    pub fn name(self) -> &'static str {
        match self {
            TokenizerKind::Whitespace => "ws",
            TokenizerKind::Bpe => "bpe",
        }
    }

    pub fn from_name(s: &str) -> Option<Self> {
        match s {
            "ws" => Some(Self::Whitespace),
            "bpe" => Some(Self::Bpe),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PrepConfig {
    pub tokenizer: TokenizerKind,
    pub bpe_budget: usize,
    pub normalize: NormalizeSetting,
    pub pool_size: usize,
    /// Seed for random normalization; pair `id` is added per pair.
    pub norm_seed: u64,
}

impl Default for PrepConfig {
    fn default() -> Self {
        Self {
            tokenizer: TokenizerKind::Whitespace,
            bpe_budget: 500,
            normalize: NormalizeSetting::Off,
            pool_size: DEFAULT_POOL_SIZE,
            norm_seed: 0,
        }
    }
}

/// `count` KBs from `gen`, the i-th drawn with seed `gen.rng_seed + i`.
pub fn generate_el_kbs(gen: &GenConfig, count: usize) -> Result<Vec<(ElKb, PairMeta)>, HarnessError> {
    let hash = gen.config_hash();
    (0..count as u64)
        .map(|i| {
            let cfg = GenConfig {
                rng_seed: gen.rng_seed.wrapping_add(i),
                ..gen.clone()
            };
            let meta = PairMeta {
                split_seed: 0,
                gen_seed: Some(cfg.rng_seed),
                config_hash: Some(hash.clone()),
            };
            Ok((gen_el_kb(&cfg)?, meta))
        })
        .collect()
}

/// Generated KBs labelled by the EL reasoner and split 80/10/10.
pub fn generate_el_corpus(
    gen: &GenConfig,
    count: usize,
    split_seed: u64,
) -> Result<CorpusSplit<ElKb>, HarnessError> {
    build_corpus_with_meta(generate_el_kbs(gen, count)?, complete_el, split_seed)
        .map_err(|e| HarnessError::Reasoner(e.to_string()))
}

/// Applies the configured normalization to a pair's KB and completion.
pub fn normalize_pair<T: Theory>(pair: &CorpusPair<T>, cfg: &PrepConfig) -> Result<CorpusPair<T>, HarnessError> {
    let Some(mode) = cfg.normalize.mode() else {
        return Ok(pair.clone());
    };
    let seed = cfg.norm_seed.wrapping_add(pair.id as u64);
    let (kb, renaming) = normalize(&pair.kb, mode, seed, cfg.pool_size)?;
    Ok(CorpusPair {
        id: pair.id,
        kb,
        completion: renaming.apply_completion(&pair.completion),
        meta: pair.meta.clone(),
    })
}

/// Renames every non-fixed symbol `s` to `prefix + s`, giving a theory whose
/// symbols are disjoint from any corpus without that prefix.
pub fn rename_with_prefix<T: Theory>(pair: &CorpusPair<T>, prefix: &str) -> CorpusPair<T> {
    let mut f = |s: &str| {
        if T::Stmt::is_fixed_symbol(s) {
            s.to_string()
        } else {
            format!("{prefix}{s}")
        }
    };
    CorpusPair {
        id: pair.id,
        kb: pair.kb.rename_symbols(&mut f),
        completion: ptrlogic_core::logic::Completion::from_ordered(
            pair.completion
                .derived()
                .iter()
                .map(|s| s.rename_symbols(&mut f))
                .collect(),
        ),
        meta: pair.meta.clone(),
    }
}

/// Whitespace, or BPE learned from the (normalized) training inputs and
/// completions.
pub fn fit_tokenizer<T: Theory>(cfg: &PrepConfig, train: &[CorpusPair<T>]) -> Result<Tokenizer, HarnessError> {
    match cfg.tokenizer {
        TokenizerKind::Whitespace => Ok(Tokenizer::Whitespace),
        TokenizerKind::Bpe => {
            let mut texts = Vec::with_capacity(2 * train.len());
            for p in train {
                let p = normalize_pair(p, cfg)?;
                texts.push(input_text(&p.kb));
                texts.push(statements_text(p.completion.derived()));
            }
            Ok(Tokenizer::Bpe(bpe_train(&texts, cfg.bpe_budget)?))
        }
    }
}

pub fn encode_pairs<T: Theory>(
    pairs: &[CorpusPair<T>],
    tokenizer: &Tokenizer,
    cfg: &PrepConfig,
) -> Result<Vec<EncodedPair>, HarnessError> {
    pairs
        .iter()
        .map(|p| Ok(encode_corpus_pair(&normalize_pair(p, cfg)?, tokenizer)?))
        .collect()
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PreparedSplit {
    pub tokenizer: Tokenizer,
    pub train: Vec<EncodedPair>,
    pub valid: Vec<EncodedPair>,
    pub test: Vec<EncodedPair>,
}

pub fn prepare_split<T: Theory>(split: &CorpusSplit<T>, cfg: &PrepConfig) -> Result<PreparedSplit, HarnessError> {
    let tokenizer = fit_tokenizer(cfg, &split.train)?;
    Ok(PreparedSplit {
        train: encode_pairs(&split.train, &tokenizer, cfg)?,
        valid: encode_pairs(&split.valid, &tokenizer, cfg)?,
        test: encode_pairs(&split.test, &tokenizer, cfg)?,
        tokenizer,
    })
}

/// Longest input and target over `pairs`.
pub fn max_lengths(pairs: &[EncodedPair]) -> (usize, usize) {
    pairs.iter().fold((0, 0), |(i, t), p| {
        (i.max(p.input_tokens.len()), t.max(p.target_indices.len()))
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn corpus_is_reproducible() {
        let gen = GenConfig {
            kb_size: 18,
            difficulty: 1,
            ..GenConfig::default()
        };
        let a = generate_el_corpus(&gen, 20, 3).unwrap();
        let b = generate_el_corpus(&gen, 20, 3).unwrap();
        assert_eq!(a, b);
        assert_eq!((a.train.len(), a.valid.len(), a.test.len()), (16, 2, 2));
        assert!(a.all().all(|p| p.kb.len() == 18 && p.meta.gen_seed.is_some()));
    }

    #[test]
    fn prefix_renaming_is_disjoint() {
        let gen = GenConfig {
            kb_size: 16,
            difficulty: 1,
            ..GenConfig::default()
        };
        let split = generate_el_corpus(&gen, 10, 0).unwrap();
        let p = &split.train[0];
        let r = rename_with_prefix(p, "Z");
        assert_eq!(r.completion, complete_el(&r.kb).unwrap());
        let before: std::collections::HashSet<String> = ptrlogic_core::logic::kb_symbol_table(&p.kb).into_iter().collect();
        assert!(ptrlogic_core::logic::kb_symbol_table(&r.kb).iter().all(|s| !before.contains(s)));
    }

    #[test]
    fn canonical_inputs_ignore_spelling() {
        let gen = GenConfig {
            kb_size: 16,
            difficulty: 1,
            ..GenConfig::default()
        };
        let split = generate_el_corpus(&gen, 10, 0).unwrap();
        let cfg = PrepConfig {
            normalize: NormalizeSetting::Canonical,
            ..PrepConfig::default()
        };
        let p = &split.train[0];
        let a = encode_pairs(std::slice::from_ref(p), &Tokenizer::Whitespace, &cfg).unwrap();
        let b = encode_pairs(&[rename_with_prefix(p, "Q")], &Tokenizer::Whitespace, &cfg).unwrap();
        assert_eq!(a, b);
    }
}
