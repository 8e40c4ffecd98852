//! Word vectors for clustering object nouns.

use std::collections::HashMap;

use thiserror::Error;

const BUILTIN_TABLE: &str = include_str!("../../data/household_vectors.tsv");

pub trait EmbeddingProvider: Send + Sync {
    fn vector(&self, word: &str) -> Option<&[f32]>;
}

#[derive(Debug, Error)]
#[error("word-vector table line {line}: {message}")]
pub struct VectorTableError {
    pub line: usize,
    pub message: String,
}

/// In-memory table of unit-normalized word vectors.
#[derive(Debug, Clone, Default)]
pub struct WordVectors {
    dim: usize,
    table: HashMap<String, Vec<f32>>,
}

impl WordVectors {
    /// ~190 household nouns, 16 dimensions.
    pub fn builtin() -> Self {
        Self::from_tsv(BUILTIN_TABLE).expect("builtin vector table is well-formed")
    }

    /// `word<TAB>v1 v2 ...` per line; `#` starts a comment line.
    pub fn from_tsv(text: &str) -> Result<Self, VectorTableError> {
        let mut out = WordVectors::default();
        for (i, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let err = |message: String| VectorTableError { line: i + 1, message };
            let (word, rest) = line
                .split_once(char::is_whitespace)
                .ok_or_else(|| err("expected word followed by components".into()))?;
            let v: Vec<f32> = rest
                .split_whitespace()
                .map(|t| t.parse::<f32>().map_err(|e| err(format!("bad component `{t}`: {e}"))))
                .collect::<Result<_, _>>()?;
            if v.is_empty() {
                return Err(err("no components".into()));
            }
            if out.dim == 0 {
                out.dim = v.len();
            } else if v.len() != out.dim {
                return Err(err(format!("expected {} components, found {}", out.dim, v.len())));
            }
            out.insert(word, v);
        }
        Ok(out)
    }

    pub fn insert(&mut self, word: &str, mut v: Vec<f32>) {
        let n = v.iter().map(|x| x * x).sum::<f32>().sqrt();
        if n > 0.0 {
            v.iter_mut().for_each(|x| *x /= n);
        }
        self.table.insert(word.to_lowercase(), v);
    }

    pub fn len(&self) -> usize {
        self.table.len()
    }

    pub fn is_empty(&self) -> bool {
        self.table.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.dim
    }
}

impl EmbeddingProvider for WordVectors {
    fn vector(&self, word: &str) -> Option<&[f32]> {
        self.table.get(word).map(Vec::as_slice)
    }
}

pub fn cosine(a: &[f32], b: &[f32]) -> f64 {
    let dot: f64 = a.iter().zip(b).map(|(x, y)| *x as f64 * *y as f64).sum();
    let na: f64 = a.iter().map(|x| (*x as f64).powi(2)).sum::<f64>().sqrt();
    let nb: f64 = b.iter().map(|x| (*x as f64).powi(2)).sum::<f64>().sqrt();
    if na == 0.0 || nb == 0.0 {
        0.0
    } else {
        dot / (na * nb)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn builtin_table_loads() {
        let wv = WordVectors::builtin();
        assert!(wv.len() >= 180, "{}", wv.len());
        assert_eq!(wv.dim(), 16);
        assert!(wv.vector("marker").is_some());
        assert!(wv.vector("unicorn").is_none());
    }

    #[test]
    fn categories_are_closer_than_strangers() {
        let wv = WordVectors::builtin();
        let v = |w| wv.vector(w).unwrap();
        assert!(cosine(v("mug"), v("cup")) > cosine(v("mug"), v("marker")));
        assert!(cosine(v("pen"), v("pencil")) > cosine(v("pen"), v("carrot")));
    }

    #[test]
    fn ragged_rows_rejected() {
        assert!(WordVectors::from_tsv("a 1 2\nb 1").is_err());
        assert!(WordVectors::from_tsv("a x").is_err());
    }
}
