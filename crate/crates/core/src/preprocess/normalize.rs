//! Injective renaming of symbols onto a fixed pool `a1..an`.

use std::collections::HashMap;

use rand::seq::index::sample;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::logic::{kb_symbol_table, Completion, Statement, Theory};

pub const DEFAULT_POOL_SIZE: usize = 256;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum NormalizeMode {
    /// Uniformly random injective assignment, for training-time augmentation.
    Random,
    /// The i-th symbol in first-occurrence order becomes `a<i>`.
    Canonical,
}

impl NormalizeMode {
    pub fn from_name(s: &str) -> Option<Self> {
        match s {
            "random" => Some(Self::Random),
            "canonical" => Some(Self::Canonical),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum NormalizeError {
    #[error("{symbols} distinct symbols exceed the pool of {pool} names")]
    PoolExhausted { symbols: usize, pool: usize },
}

pub fn pool_name(i: usize) -> String {
    format!("a{i}")
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Renaming {
    mapping: Vec<(String, String)>,
    index: HashMap<String, usize>,
    pool_size: usize,
}

impl Renaming {
    fn new(mapping: Vec<(String, String)>, pool_size: usize) -> Self {
        let index = mapping
            .iter()
            .enumerate()
            .map(|(i, (from, _))| (from.clone(), i))
            .collect();
        Self {
            mapping,
            index,
            pool_size,
        }
    }

    /// Pairs (original, renamed) in first-occurrence order.
    pub fn mapping(&self) -> &[(String, String)] {
        &self.mapping
    }

    pub fn pool_size(&self) -> usize {
        self.pool_size
    }

    /// Image of `symbol`; symbols outside the domain map to themselves.
    pub fn apply(&self, symbol: &str) -> String {
        match self.index.get(symbol) {
            Some(&i) => self.mapping[i].1.clone(),
            None => symbol.to_string(),
        }
    }

    pub fn apply_statement<S: Statement>(&self, s: &S) -> S {
        s.rename_symbols(&mut |x| self.apply(x))
    }

    pub fn apply_theory<T: Theory>(&self, kb: &T) -> T {
        kb.rename_symbols(&mut |x| self.apply(x))
    }

    /// Renaming preserves completion order, since ranks only depend on
    /// where symbols first occur.
    pub fn apply_completion<S: Statement>(&self, c: &Completion<S>) -> Completion<S> {
        Completion::from_ordered(c.derived().iter().map(|s| self.apply_statement(s)).collect())
    }

    pub fn inverse(&self) -> Renaming {
        Renaming::new(
            self.mapping.iter().map(|(a, b)| (b.clone(), a.clone())).collect(),
            self.pool_size,
        )
    }
}

/// Renames every non-fixed symbol of `kb` into the pool `a1..a<pool_size>`.
pub fn normalize<T: Theory>(
    kb: &T,
    mode: NormalizeMode,
    rng_seed: u64,
    pool_size: usize,
) -> Result<(T, Renaming), NormalizeError> {
    let symbols: Vec<String> = kb_symbol_table(kb)
        .into_iter()
        .filter(|s| !T::Stmt::is_fixed_symbol(s))
        .collect();
    if symbols.len() > pool_size {
        return Err(NormalizeError::PoolExhausted {
            symbols: symbols.len(),
            pool: pool_size,
        });
    }
    let targets: Vec<usize> = match mode {
        NormalizeMode::Canonical => (1..=symbols.len()).collect(),
        NormalizeMode::Random => {
            let mut rng = ChaCha8Rng::seed_from_u64(rng_seed);
            sample(&mut rng, pool_size, symbols.len())
                .into_iter()
                .map(|i| i + 1)
                .collect()
        }
    };
    let mapping = symbols
        .into_iter()
        .zip(targets)
        .map(|(s, i)| (s, pool_name(i)))
        .collect();
    let renaming = Renaming::new(mapping, pool_size);
    Ok((renaming.apply_theory(kb), renaming))
}
