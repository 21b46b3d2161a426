//! Binary parameter files: a magic line and format version, then named
//! arrays with explicit shapes and little-endian 64-bit values.

use crate::error::NeuralError;
use crate::params::{Params, PARAM_NAMES};
use crate::real::Real;
use crate::tensor::Mat;

pub const MAGIC: &[u8; 8] = b"PTRCKPT\n";
pub const VERSION: u32 = 1;

pub fn to_bytes<R: Real>(params: &Params<R>) -> Vec<u8> {
    let mut out = Vec::with_capacity(64 + params.num_values() * 8);
    out.extend_from_slice(MAGIC);
    out.extend_from_slice(&VERSION.to_le_bytes());
    out.extend_from_slice(&(PARAM_NAMES.len() as u32).to_le_bytes());
    for (name, t) in params.named() {
        out.extend_from_slice(&(name.len() as u32).to_le_bytes());
        out.extend_from_slice(name.as_bytes());
        out.extend_from_slice(&(t.rows as u64).to_le_bytes());
        out.extend_from_slice(&(t.cols as u64).to_le_bytes());
        for x in &t.data {
            out.extend_from_slice(&x.as_f64().to_le_bytes());
        }
    }
    out
}

struct Reader<'a> {
    buf: &'a [u8],
    pos: usize,
}

impl<'a> Reader<'a> {
    fn take(&mut self, n: usize) -> Result<&'a [u8], NeuralError> {
        let end = self.pos.checked_add(n).filter(|&e| e <= self.buf.len());
        let end = end.ok_or_else(|| NeuralError::Checkpoint("truncated file".into()))?;
        let s = &self.buf[self.pos..end];
        self.pos = end;
        Ok(s)
    }

    fn u32(&mut self) -> Result<u32, NeuralError> {
        Ok(u32::from_le_bytes(self.take(4)?.try_into().expect("4 bytes")))
    }

    fn u64(&mut self) -> Result<u64, NeuralError> {
        Ok(u64::from_le_bytes(self.take(8)?.try_into().expect("8 bytes")))
    }
}

/// Parses a checkpoint whose arrays must have exactly the `expected` shapes.
pub fn from_bytes<R: Real>(bytes: &[u8], expected: [[usize; 2]; 13]) -> Result<Params<R>, NeuralError> {
    let err = |m: String| NeuralError::Checkpoint(m);
    let mut r = Reader { buf: bytes, pos: 0 };
    if r.take(MAGIC.len())? != MAGIC {
        return Err(err("not a checkpoint file".into()));
    }
    let version = r.u32()?;
    if version != VERSION {
        return Err(err(format!("unsupported format version {version}")));
    }
    let count = r.u32()? as usize;
    if count != PARAM_NAMES.len() {
        return Err(err(format!("expected {} arrays, found {count}", PARAM_NAMES.len())));
    }
    let mut mats = Vec::with_capacity(count);
    for (name, shape) in PARAM_NAMES.iter().zip(expected) {
        let len = r.u32()? as usize;
        let found = std::str::from_utf8(r.take(len)?).unwrap_or("?");
        if found != *name {
            return Err(err(format!("expected array {name}, found {found}")));
        }
        let rows = r.u64()? as usize;
        let cols = r.u64()? as usize;
        if [rows, cols] != shape {
            return Err(NeuralError::DimensionMismatch(format!(
                "{name} has shape {:?} in checkpoint, config expects {shape:?}",
                [rows, cols]
            )));
        }
        let raw = r.take(rows * cols * 8)?;
        let data = raw
            .chunks_exact(8)
            .map(|c| R::of(f64::from_le_bytes(c.try_into().expect("8 bytes"))))
            .collect();
        mats.push(Mat { rows, cols, data });
    }
    if r.pos != bytes.len() {
        return Err(err("trailing bytes".into()));
    }
    let mut it = mats.into_iter();
    let mut next = || it.next().expect("thirteen arrays");
    let embedding = next();
    let enc = crate::params::LstmParams { wx: next(), wh: next(), b: next() };
    let dec = crate::params::LstmParams { wx: next(), wh: next(), b: next() };
    Ok(Params {
        embedding,
        enc,
        dec,
        go: next(),
        w1: next(),
        w2: next(),
        v: next(),
        out_w: next(),
        out_b: next(),
    })
}
