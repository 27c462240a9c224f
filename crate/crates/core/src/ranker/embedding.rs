use std::collections::HashMap;
use std::fs;
use std::path::Path;

use serde::Deserialize;

use crate::error::{Error, Result};

/// Cosine similarity `u·v / (‖u‖‖v‖)`.
pub fn cosine(u: &[f64], v: &[f64]) -> Result<f64> {
    if u.len() != v.len() {
        return Err(Error::DimensionMismatch {
            expected: u.len(),
            actual: v.len(),
        });
    }
    let (mut dot, mut nu, mut nv) = (0.0, 0.0, 0.0);
    for (a, b) in u.iter().zip(v) {
        dot += a * b;
        nu += a * a;
        nv += b * b;
    }
    if nu == 0.0 || nv == 0.0 {
        return Err(Error::ZeroVector);
    }
    Ok((dot / (nu.sqrt() * nv.sqrt())).clamp(-1.0, 1.0))
}

/// Vectors keyed by id, all of one dimension.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct EmbeddingStore {
    dim: usize,
    vectors: HashMap<String, Vec<f64>>,
}

#[derive(Deserialize)]
struct DimHeader {
    dim: usize,
}

#[derive(Deserialize)]
struct VectorLine {
    id: String,
    vector: Vec<f64>,
}

impl EmbeddingStore {
    pub fn new(dim: usize) -> Result<Self> {
        if dim == 0 {
            return Err(Error::InvalidArgument("embedding dimension must be positive".into()));
        }
        Ok(EmbeddingStore {
            dim,
            vectors: HashMap::new(),
        })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.vectors.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vectors.is_empty()
    }

    pub fn insert(&mut self, id: impl Into<String>, vector: Vec<f64>) -> Result<()> {
        let id = id.into();
        if vector.len() != self.dim {
            return Err(Error::DimensionMismatch {
                expected: self.dim,
                actual: vector.len(),
            });
        }
        if vector.iter().any(|x| !x.is_finite()) {
            return Err(Error::InvalidRecord {
                id,
                message: "non-finite vector component".into(),
            });
        }
        if self.vectors.contains_key(&id) {
            return Err(Error::DuplicateId(id));
        }
        self.vectors.insert(id, vector);
        Ok(())
    }

    pub fn get(&self, id: &str) -> Option<&[f64]> {
        self.vectors.get(id).map(Vec::as_slice)
    }

    pub fn contains(&self, id: &str) -> bool {
        self.vectors.contains_key(id)
    }

    pub fn ids(&self) -> impl Iterator<Item = &str> {
        self.vectors.keys().map(String::as_str)
    }

    /// Parses the JSONL embedding format: a `{"dim": N}` first line, then
    /// one `{"id", "vector"}` object per line.
    pub fn parse(raw: &str, context: &str) -> Result<Self> {
        let mut lines = raw
            .lines()
            .enumerate()
            .filter(|(_, l)| !l.trim().is_empty());
        let (i, first) = lines
            .next()
            .ok_or_else(|| Error::parse(context, 1, "missing {\"dim\": N} header"))?;
        let header: DimHeader = serde_json::from_str(first).map_err(|e| Error::parse(context, i + 1, e))?;
        let mut store = EmbeddingStore::new(header.dim)?;
        for (i, line) in lines {
            let rec: VectorLine = serde_json::from_str(line).map_err(|e| Error::parse(context, i + 1, e))?;
            store.insert(rec.id, rec.vector).map_err(|e| Error::parse(context, i + 1, e))?;
        }
        Ok(store)
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let raw = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::parse(&raw, &path.display().to_string())
    }
}
