//! Binary checkpoint: magic bytes, format version, a JSON header with the
//! model config, the vocabulary, then every tensor as little-endian `f32`.

use std::fs::File;
use std::io::{BufReader, BufWriter, Read, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::encoder::ScorerModel;
use super::params::Params;
use super::ModelConfig;
use crate::corpus::Vocab;
use crate::error::{Error, Result};
use crate::num::Scalar;

pub const MAGIC: &[u8; 4] = b"UNMF";
pub const FORMAT_VERSION: u32 = 1;

/// Provenance stored alongside the weights.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CheckpointHeader {
    pub config: ModelConfig,
    pub config_hash: String,
    pub seed: u64,
}

fn corrupt(e: std::io::Error) -> Error {
    if e.kind() == std::io::ErrorKind::UnexpectedEof {
        Error::Checkpoint("file is truncated".into())
    } else {
        Error::Checkpoint(e.to_string())
    }
}

fn put_u32(w: &mut impl Write, v: usize) -> std::io::Result<()> {
    let v = u32::try_from(v).map_err(|_| std::io::Error::other("length exceeds u32"))?;
    w.write_all(&v.to_le_bytes())
}

fn get_u32(r: &mut impl Read) -> Result<usize> {
    let mut b = [0u8; 4];
    r.read_exact(&mut b).map_err(corrupt)?;
    Ok(u32::from_le_bytes(b) as usize)
}

fn get_bytes(r: &mut impl Read, n: usize) -> Result<Vec<u8>> {
    let mut buf = Vec::new();
    r.take(n as u64).read_to_end(&mut buf).map_err(corrupt)?;
    if buf.len() != n {
        return Err(Error::Checkpoint("file is truncated".into()));
    }
    Ok(buf)
}

fn get_string(r: &mut impl Read) -> Result<String> {
    let n = get_u32(r)?;
    String::from_utf8(get_bytes(r, n)?).map_err(|_| Error::Checkpoint("invalid utf-8".into()))
}

pub fn write_checkpoint<T: Scalar>(
    mut w: impl Write,
    model: &ScorerModel<T>,
    vocab: &Vocab,
    header: &CheckpointHeader,
) -> std::io::Result<()> {
    w.write_all(MAGIC)?;
    w.write_all(&FORMAT_VERSION.to_le_bytes())?;
    let json = serde_json::to_vec(header)?;
    put_u32(&mut w, json.len())?;
    w.write_all(&json)?;
    put_u32(&mut w, vocab.len())?;
    for t in vocab.tokens() {
        put_u32(&mut w, t.len())?;
        w.write_all(t.as_bytes())?;
    }
    let names = model.params.names();
    let tensors = model.params.tensors();
    put_u32(&mut w, tensors.len())?;
    for (name, data) in names.iter().zip(tensors) {
        put_u32(&mut w, name.len())?;
        w.write_all(name.as_bytes())?;
        put_u32(&mut w, data.len())?;
        for &x in data {
            w.write_all(&(x.to_f64_lossy() as f32).to_le_bytes())?;
        }
    }
    w.flush()
}

pub fn read_checkpoint<T: Scalar>(mut r: impl Read) -> Result<(ScorerModel<T>, Vocab, CheckpointHeader)> {
    let magic = get_bytes(&mut r, 4)?;
    if magic != MAGIC {
        return Err(Error::Checkpoint("not a scorer checkpoint (bad magic bytes)".into()));
    }
    let version = get_u32(&mut r)?;
    if version != FORMAT_VERSION as usize {
        return Err(Error::Checkpoint(format!("unsupported format version {version}")));
    }
    let n = get_u32(&mut r)?;
    let header: CheckpointHeader = serde_json::from_slice(&get_bytes(&mut r, n)?)
        .map_err(|e| Error::Checkpoint(format!("bad header: {e}")))?;
    header.config.validate()?;
    let count = get_u32(&mut r)?;
    let tokens = (0..count).map(|_| get_string(&mut r)).collect::<Result<Vec<_>>>()?;
    let vocab = Vocab::from_tokens(tokens.into_iter().skip(4));
    if vocab.len() != count || vocab.len() != header.config.vocab_size {
        return Err(Error::Checkpoint("vocabulary does not match the stored config".into()));
    }
    let mut params = Params::<T>::zeros(&header.config);
    let names = params.names();
    let stored = get_u32(&mut r)?;
    if stored != names.len() {
        return Err(Error::Checkpoint(format!("expected {} tensors, found {stored}", names.len())));
    }
    for (name, dst) in names.iter().zip(params.tensors_mut()) {
        let got = get_string(&mut r)?;
        let len = get_u32(&mut r)?;
        if got != *name || len != dst.len() {
            return Err(Error::Checkpoint(format!("tensor {got} does not match expected {name}")));
        }
        let bytes = get_bytes(&mut r, len * 4)?;
        for (d, chunk) in dst.iter_mut().zip(bytes.chunks_exact(4)) {
            *d = T::of(f64::from(f32::from_le_bytes(chunk.try_into().expect("4-byte chunk"))));
        }
    }
    let mut rest = [0u8; 1];
    if r.read(&mut rest).map_err(corrupt)? != 0 {
        return Err(Error::Checkpoint("trailing bytes after the last tensor".into()));
    }
    let model = ScorerModel::from_params(header.config, params)?;
    Ok((model, vocab, header))
}

pub fn save<T: Scalar>(path: &Path, model: &ScorerModel<T>, vocab: &Vocab, header: &CheckpointHeader) -> Result<()> {
    let file = File::create(path).map_err(|e| Error::io(path, e))?;
    write_checkpoint(BufWriter::new(file), model, vocab, header).map_err(|e| Error::io(path, e))
}

pub fn load<T: Scalar>(path: &Path) -> Result<(ScorerModel<T>, Vocab, CheckpointHeader)> {
    let file = File::open(path).map_err(|e| Error::io(path, e))?;
    read_checkpoint(BufReader::new(file))
}

/// Loads a checkpoint and refuses it unless its architecture matches
/// `expected`. A zero `vocab_size` in `expected` accepts any vocabulary.
pub fn load_compatible<T: Scalar>(path: &Path, expected: &ModelConfig) -> Result<(ScorerModel<T>, Vocab, CheckpointHeader)> {
    let loaded = load::<T>(path)?;
    let mut want = *expected;
    if want.vocab_size == 0 {
        want.vocab_size = loaded.0.config.vocab_size;
    }
    if !want.same_architecture(&loaded.0.config) {
        return Err(Error::Checkpoint(format!(
            "checkpoint architecture {:?} does not match the configured {:?}",
            loaded.0.config, want
        )));
    }
    Ok(loaded)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus::{BOS_ID, EOS_ID};

    fn fixture() -> (ScorerModel<f32>, Vocab, CheckpointHeader) {
        let vocab = Vocab::from_tokens((0..16).map(|i| format!("w{i}")));
        let cfg = ModelConfig { d_model: 8, layers: 1, heads: 2, d_ff: 16, max_len: 10, vocab_size: vocab.len(), ..Default::default() };
        let model = ScorerModel::new(cfg, 1).unwrap();
        let header = CheckpointHeader { config: cfg, config_hash: "abc".into(), seed: 1 };
        (model, vocab, header)
    }

    fn bytes() -> Vec<u8> {
        let (m, v, h) = fixture();
        let mut buf = Vec::new();
        write_checkpoint(&mut buf, &m, &v, &h).unwrap();
        buf
    }

    #[test]
    fn round_trip_is_bit_identical() {
        let (m, v, h) = fixture();
        let (back, vocab, header) = read_checkpoint::<f32>(&bytes()[..]).unwrap();
        assert_eq!(back, m);
        assert_eq!(vocab, v);
        assert_eq!(header, h);
        let ids = [BOS_ID, 5, 6, EOS_ID];
        assert_eq!(back.score(&ids, &[true; 4]).unwrap().to_bits(), m.score(&ids, &[true; 4]).unwrap().to_bits());
    }

    #[test]
    fn corrupt_files_are_refused() {
        let buf = bytes();
        for cut in [2, 10, buf.len() / 2, buf.len() - 1] {
            let err = read_checkpoint::<f32>(&buf[..cut]).unwrap_err();
            assert!(matches!(err, Error::Checkpoint(_)), "{err}");
        }
        let mut bad = buf.clone();
        bad[0] = b'X';
        assert!(read_checkpoint::<f32>(&bad[..]).unwrap_err().to_string().contains("magic"));
        let mut bad = buf.clone();
        bad[4] = 9;
        assert!(read_checkpoint::<f32>(&bad[..]).unwrap_err().to_string().contains("version"));
        let mut long = buf;
        long.push(0);
        assert!(read_checkpoint::<f32>(&long[..]).is_err());
    }

    #[test]
    fn other_architectures_are_refused() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("m.bin");
        let (m, v, h) = fixture();
        save(&path, &m, &v, &h).unwrap();
        load_compatible::<f32>(&path, &ModelConfig { vocab_size: 0, ..h.config }).unwrap();
        let other = ModelConfig { d_model: 16, ..h.config };
        assert!(matches!(load_compatible::<f32>(&path, &other), Err(Error::Checkpoint(_))));
    }
}
