//! Model directories: run configuration, vocabularies, tokenizer and
//! parameter checkpoint.

use std::fs;
use std::path::Path;

use ptrlogic_core::preprocess::{BpeModel, Tokenizer};
use ptrlogic_neural::checkpoint;
use ptrlogic_neural::vocab::{OutputVocab, Vocab};
use ptrlogic_neural::{Model, Params, Real};

use crate::config::RunConfig;
use crate::error::HarnessError;

pub const CONFIG_FILE: &str = "run.conf";
pub const VOCAB_FILE: &str = "vocab.txt";
pub const OUT_VOCAB_FILE: &str = "out_vocab.txt";
pub const TOKENIZER_FILE: &str = "tokenizer.txt";
pub const PARAMS_FILE: &str = "params.ckpt";

fn write(path: &Path, bytes: &[u8]) -> Result<(), HarnessError> {
    fs::write(path, bytes).map_err(|e| HarnessError::io(path, e))
}

fn read(path: &Path) -> Result<Vec<u8>, HarnessError> {
    fs::read(path).map_err(|e| HarnessError::io(path, e))
}

fn read_text(path: &Path) -> Result<String, HarnessError> {
    String::from_utf8(read(path)?).map_err(|e| HarnessError::Parse(format!("{}: {e}", path.display())))
}

pub fn tokenizer_to_text(t: &Tokenizer) -> String {
    match t {
        Tokenizer::Whitespace => "ws\n".into(),
        Tokenizer::Bpe(m) => format!("bpe\n{}", m.to_text()),
    }
}

pub fn tokenizer_from_text(text: &str) -> Result<Tokenizer, HarnessError> {
    let (kind, rest) = text.split_once('\n').unwrap_or((text, ""));
    match kind.trim() {
        "ws" => Ok(Tokenizer::Whitespace),
        "bpe" => Ok(Tokenizer::Bpe(BpeModel::from_text(rest)?)),
        other => Err(HarnessError::Parse(format!("unknown tokenizer {other:?}"))),
    }
}

pub fn save_model<R: Real>(
    dir: &Path,
    model: &Model<R>,
    tokenizer: &Tokenizer,
    run: &RunConfig,
) -> Result<(), HarnessError> {
    fs::create_dir_all(dir).map_err(|e| HarnessError::io(dir, e))?;
    let mut run = run.clone();
    run.model = model.config.clone();
    write(&dir.join(CONFIG_FILE), run.to_text().as_bytes())?;
    write(&dir.join(VOCAB_FILE), model.vocab.to_text().as_bytes())?;
    if let Some(o) = &model.out_vocab {
        write(&dir.join(OUT_VOCAB_FILE), o.to_text().as_bytes())?;
    }
    write(&dir.join(TOKENIZER_FILE), tokenizer_to_text(tokenizer).as_bytes())?;
    write(&dir.join(PARAMS_FILE), &checkpoint::to_bytes(&model.params))
}

/// The run configuration stored in a model directory.
pub fn stored_config(dir: &Path) -> Result<RunConfig, HarnessError> {
    RunConfig::parse(&read_text(&dir.join(CONFIG_FILE))?)
}

/// Loads a model directory; the checkpoint must match the stored config.
pub fn load_model<R: Real>(dir: &Path) -> Result<(Model<R>, Tokenizer, RunConfig), HarnessError> {
    let run = stored_config(dir)?;
    let vocab = Vocab::from_text(&read_text(&dir.join(VOCAB_FILE))?)
        .map_err(|e| HarnessError::Parse(e.to_string()))?;
    let out_path = dir.join(OUT_VOCAB_FILE);
    let out_vocab = match run.model.decoder {
        ptrlogic_neural::DecoderKind::Pointer => None,
        ptrlogic_neural::DecoderKind::Vanilla => Some(OutputVocab::from_text(&read_text(&out_path)?)),
    };
    let tokenizer = tokenizer_from_text(&read_text(&dir.join(TOKENIZER_FILE))?)?;
    let out_len = out_vocab.as_ref().map_or(0, OutputVocab::len);
    let shapes = Params::<R>::shapes(&run.model, vocab.rows(), out_len);
    let params = checkpoint::from_bytes(&read(&dir.join(PARAMS_FILE))?, shapes)?;
    let model = Model::from_parts(run.model.clone(), vocab, out_vocab, params)?;
    Ok((model, tokenizer, run))
}
