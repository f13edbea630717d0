use std::collections::HashMap;
use std::io::BufRead;
use std::path::Path;

use crate::error::{Error, Result};

/// Pretrained word vectors read from a text table: one `word v1 … vd` line
/// per word, optionally preceded by a `count dim` header.
#[derive(Debug, Clone, PartialEq)]
pub struct EmbeddingTable {
    dim: usize,
    vectors: HashMap<String, Vec<f64>>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Embedded {
    pub vector: Vec<f64>,
    /// Tokens found in the table.
    pub known: usize,
    /// No token was found; `vector` is all zeros.
    pub oov: bool,
}

impl EmbeddingTable {
    pub fn new(dim: usize, vectors: HashMap<String, Vec<f64>>) -> Result<Self> {
        if dim == 0 {
            return Err(Error::Embedding("dimension must be positive".into()));
        }
        if let Some((w, v)) = vectors.iter().find(|(_, v)| v.len() != dim) {
            return Err(Error::Embedding(format!("`{w}` has {} components, expected {dim}", v.len())));
        }
        Ok(EmbeddingTable { dim, vectors })
    }

    pub fn parse(reader: impl BufRead) -> Result<Self> {
        let mut dim = None;
        let mut vectors = HashMap::new();
        for (n, line) in reader.lines().enumerate() {
            let line = line.map_err(|e| Error::Embedding(format!("line {}: {e}", n + 1)))?;
            let mut fields = line.split_whitespace();
            let Some(word) = fields.next() else { continue };
            let rest: Vec<&str> = fields.collect();
            if n == 0 && rest.len() == 1 && word.parse::<usize>().is_ok() {
                if let Ok(d) = rest[0].parse::<usize>() {
                    dim = Some(d);
                    continue;
                }
            }
            let v: Vec<f64> = rest
                .iter()
                .map(|x| x.parse::<f64>())
                .collect::<std::result::Result<_, _>>()
                .map_err(|e| Error::Embedding(format!("line {}: {e}", n + 1)))?;
            match dim {
                None => dim = Some(v.len()),
                Some(d) if d != v.len() => {
                    return Err(Error::Embedding(format!(
                        "line {}: `{word}` has {} components, expected {d}",
                        n + 1,
                        v.len()
                    )))
                }
                _ => {}
            }
            // first occurrence wins
            vectors.entry(word.to_string()).or_insert(v);
        }
        let dim = dim.ok_or_else(|| Error::Embedding("empty table".into()))?;
        EmbeddingTable::new(dim, vectors)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let f = std::fs::File::open(path).map_err(|e| Error::io(path, e))?;
        EmbeddingTable::parse(std::io::BufReader::new(f))
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

    /// Exact match first, then the lowercased form.
    pub fn get(&self, word: &str) -> Option<&[f64]> {
        self.vectors
            .get(word)
            .or_else(|| self.vectors.get(&word.to_lowercase()))
            .map(Vec::as_slice)
    }

    /// Componentwise mean of the vectors of known tokens.
    pub fn embed_average(&self, tokens: &[String]) -> Embedded {
        let mut sum = vec![0.0; self.dim];
        let mut known = 0;
        for t in tokens {
            if let Some(v) = self.get(t) {
                known += 1;
                for (s, x) in sum.iter_mut().zip(v) {
                    *s += x;
                }
            }
        }
        if known > 0 {
            for s in &mut sum {
                *s /= known as f64;
            }
        }
        Embedded {
            vector: sum,
            known,
            oov: known == 0,
        }
    }

    /// Every vector multiplied by `c`.
    pub fn scaled(&self, c: f64) -> EmbeddingTable {
        EmbeddingTable {
            dim: self.dim,
            vectors: self
                .vectors
                .iter()
                .map(|(w, v)| (w.clone(), v.iter().map(|x| x * c).collect()))
                .collect(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn table() -> EmbeddingTable {
        EmbeddingTable::parse("3 2\ngood 1 2\nidea 3 -4\n!!! 0.5 0.5\n".as_bytes()).unwrap()
    }

    fn toks(s: &str) -> Vec<String> {
        s.split_whitespace().map(str::to_string).collect()
    }

    #[test]
    fn averages() {
        let t = table();
        assert_eq!(t.dim(), 2);
        assert_eq!(t.embed_average(&toks("Good")).vector, [1.0, 2.0]);
        assert_eq!(t.embed_average(&toks("good zzz idea")).vector, [2.0, -1.0]);
        let none = t.embed_average(&toks("zzz"));
        assert!(none.oov);
        assert_eq!(none.vector, [0.0, 0.0]);
    }

    #[test]
    fn headerless_and_mismatch() {
        let t = EmbeddingTable::parse("a 1 2 3\nb 4 5 6\n".as_bytes()).unwrap();
        assert_eq!((t.dim(), t.len()), (3, 2));
        assert!(EmbeddingTable::parse("a 1 2 3\nb 4 5\n".as_bytes()).is_err());
        assert!(EmbeddingTable::parse("".as_bytes()).is_err());
        assert!(EmbeddingTable::parse("a 1 x\n".as_bytes()).is_err());
    }

    mod props {
        use super::*;
        use proptest::prelude::*;
        use rand::seq::SliceRandom;
        use rand::SeedableRng;

        proptest! {
            #[test]
            fn permutation_invariant_and_scale_equivariant(
                idx in proptest::collection::vec(0..5usize, 0..12),
                c in -3.0f64..3.0,
                seed: u64,
            ) {
                let words = ["good", "idea", "!!!", "nope", "IDEA"];
                let t = table();
                let toks: Vec<String> = idx.iter().map(|&i| words[i].to_string()).collect();
                let mut shuffled = toks.clone();
                shuffled.shuffle(&mut rand_chacha::ChaCha8Rng::seed_from_u64(seed));
                let a = t.embed_average(&toks);
                let b = t.embed_average(&shuffled);
                for (x, y) in a.vector.iter().zip(&b.vector) {
                    prop_assert!((x - y).abs() < 1e-12);
                }
                let s = t.scaled(c).embed_average(&toks);
                for (x, y) in a.vector.iter().zip(&s.vector) {
                    prop_assert!((x * c - y).abs() < 1e-9);
                }
            }
        }
    }
}
