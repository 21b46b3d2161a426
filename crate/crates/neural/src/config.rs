//! Model and training hyperparameters.

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum DecoderKind {
    /// Outputs are positions of the input sequence.
    Pointer,
    /// Outputs come from a closed vocabulary built from training targets.
    Vanilla,
}

impl DecoderKind {
    pub fn name(self) -> &'static str {
        match self {
            DecoderKind::Pointer => "pointer",
            DecoderKind::Vanilla => "vanilla",
        }
    }

    pub fn from_name(s: &str) -> Option<Self> {
        match s {
            "pointer" => Some(Self::Pointer),
            "vanilla" => Some(Self::Vanilla),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ModelConfig {
    pub hidden_size: usize,
    pub embed_size: usize,
    pub hash_buckets: usize,
    /// Give every non-operator symbol a hashed row instead of a learned one.
    pub hash_symbols: bool,
    pub max_input_len: usize,
    pub max_output_len: usize,
    pub decoder: DecoderKind,
}

impl Default for ModelConfig {
    fn default() -> Self {
        Self {
            hidden_size: 128,
            embed_size: 128,
            hash_buckets: 1024,
            hash_symbols: false,
            max_input_len: 1024,
            max_output_len: 1024,
            decoder: DecoderKind::Pointer,
        }
    }
}

impl ModelConfig {
    pub fn validate(&self) -> Result<(), String> {
        if self.hidden_size == 0 || self.embed_size == 0 {
            return Err("hidden_size and embed_size must be positive".into());
        }
        if self.hash_buckets == 0 {
            return Err("hash_buckets must be positive".into());
        }
        if self.max_input_len == 0 || self.max_output_len == 0 {
            return Err("maximum lengths must be positive".into());
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum OptimizerKind {
    Adam,
    Sgd,
}

impl OptimizerKind {
    pub fn name(self) -> &'static str {
        match self {
            OptimizerKind::Adam => "adam",
            OptimizerKind::Sgd => "sgd",
        }
    }

    pub fn from_name(s: &str) -> Option<Self> {
        match s {
            "adam" => Some(Self::Adam),
            "sgd" => Some(Self::Sgd),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct TrainConfig {
    pub batch_size: usize,
    pub init_range: f64,
    pub clip_norm: f64,
    pub optimizer: OptimizerKind,
    pub learning_rate: f64,
    pub epochs: usize,
    pub rng_seed: u64,
}

impl Default for TrainConfig {
    fn default() -> Self {
        Self {
            batch_size: 100,
            init_range: 0.08,
            clip_norm: 2.0,
            optimizer: OptimizerKind::Adam,
            learning_rate: 0.1,
            epochs: 10,
            rng_seed: 0,
        }
    }
}

impl TrainConfig {
    pub fn validate(&self) -> Result<(), String> {
        if self.batch_size == 0 {
            return Err("batch_size must be positive".into());
        }
        if self.clip_norm.is_nan() || self.clip_norm <= 0.0 {
            return Err("clip_norm must be positive".into());
        }
        if [self.learning_rate, self.init_range].iter().any(|v| v.is_nan() || *v <= 0.0) {
            return Err("learning_rate and init_range must be positive".into());
        }
        Ok(())
    }
}
