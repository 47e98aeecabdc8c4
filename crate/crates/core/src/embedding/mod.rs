//! Term vectors in the analyzed (stemmed) term space.
//!
//! Vectors come either from the in-repo skip-gram trainer ([`train_embeddings`])
//! or from any external model exported to the text interchange format:
//!
//! ```text
//! <vocab_size> <dimension>
//! <term> <v1> ... <vD>
//! ```
//!
//! Imported terms are taken verbatim. Files produced outside this crate must
//! already be keyed by analyzed terms (lowercased, Porter-stemmed) or they will
//! never match index and query terms.

mod sgns;

use std::collections::HashMap;
use std::fs::File;
use std::io::{BufRead, BufReader, Write};
use std::path::Path;

use crate::error::{Error, Result};
use crate::fsutil::{atomic_write, io_err};
use crate::index::InvertedIndex;
use crate::text::Term;

pub use sgns::{train_embeddings, TrainConfig};

#[derive(Debug, Clone, PartialEq)]
pub struct EmbeddingTable {
    dimension: usize,
    terms: Vec<Term>,
    lookup: HashMap<Term, usize>,
    /// Row-major, `terms.len() * dimension`.
    data: Vec<f64>,
}

impl EmbeddingTable {
    pub fn new(dimension: usize) -> Self {
        EmbeddingTable {
            dimension,
            terms: Vec::new(),
            lookup: HashMap::new(),
            data: Vec::new(),
        }
    }

    /// Appends a vector. Rejects wrong lengths, non-finite components and
    /// repeated terms.
    pub fn insert(&mut self, term: Term, vector: &[f64]) -> Result<()> {
        if vector.len() != self.dimension {
            return Err(Error::DimensionMismatch {
                left: self.dimension,
                right: vector.len(),
            });
        }
        if vector.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidConfig(format!(
                "non-finite component in vector for {term}"
            )));
        }
        if self.lookup.contains_key(&term) {
            return Err(Error::InvalidConfig(format!("duplicate term {term}")));
        }
        self.lookup.insert(term.clone(), self.terms.len());
        self.terms.push(term);
        self.data.extend_from_slice(vector);
        Ok(())
    }

    pub fn dimension(&self) -> usize {
        self.dimension
    }

    pub fn vocab_size(&self) -> usize {
        self.terms.len()
    }

    pub fn terms(&self) -> &[Term] {
        &self.terms
    }

    pub fn contains(&self, term: &str) -> bool {
        self.lookup.contains_key(term)
    }

    pub fn get(&self, term: &str) -> Option<&[f64]> {
        let row = *self.lookup.get(term)?;
        Some(&self.data[row * self.dimension..(row + 1) * self.dimension])
    }

    pub fn iter(&self) -> impl Iterator<Item = (&Term, &[f64])> {
        self.terms.iter().zip(self.data.chunks_exact(self.dimension.max(1)))
    }

    /// Cosine of the two stored vectors; `None` if either term is unknown.
    pub fn term_similarity(&self, a: &str, b: &str) -> Option<f64> {
        let (u, v) = (self.get(a)?, self.get(b)?);
        Some(cosine_unchecked(u, v))
    }

    /// Unweighted mean of the vectors of the known terms among `terms`.
    pub fn centroid<'a>(&self, terms: impl IntoIterator<Item = &'a Term>) -> Option<Vec<f64>> {
        self.weighted_centroid(terms.into_iter().map(|t| (t.as_str(), 1.0)))
    }

    /// `sum(w * v) / sum(w)` over known terms. `None` when no term is known or
    /// the total weight is not positive.
    pub fn weighted_centroid<'a>(&self, terms: impl IntoIterator<Item = (&'a str, f64)>) -> Option<Vec<f64>> {
        let mut acc = vec![0.0; self.dimension];
        let mut total = 0.0;
        for (term, w) in terms {
            if let Some(v) = self.get(term) {
                for (a, x) in acc.iter_mut().zip(v) {
                    *a += w * x;
                }
                total += w;
            }
        }
        if total > 0.0 {
            for a in &mut acc {
                *a /= total;
            }
            Some(acc)
        } else {
            None
        }
    }

    /// Writes the interchange format. Values are printed with Rust's shortest
    /// round-trip representation, so re-import is exact.
    pub fn export(&self, path: &Path) -> Result<()> {
        atomic_write(path, |w| self.write_to(w).map_err(io_err(path)))
    }

    pub fn write_to(&self, w: &mut dyn Write) -> std::io::Result<()> {
        writeln!(w, "{} {}", self.vocab_size(), self.dimension)?;
        for (term, v) in self.iter() {
            write!(w, "{term}")?;
            for x in v {
                write!(w, " {x}")?;
            }
            writeln!(w)?;
        }
        Ok(())
    }

    pub fn import(path: &Path) -> Result<Self> {
        let file = File::open(path).map_err(io_err(path))?;
        Self::read_from(BufReader::new(file), path)
    }

    pub fn read_from<R: BufRead>(reader: R, origin: &Path) -> Result<Self> {
        let mut lines = reader.lines();
        let header = match lines.next() {
            Some(l) => l.map_err(io_err(origin))?,
            None => return Err(Error::parse(origin, 1, "missing header")),
        };
        let mut fields = header.split_whitespace();
        let (vocab, dim) = match (fields.next(), fields.next(), fields.next()) {
            (Some(v), Some(d), None) => match (v.parse::<usize>(), d.parse::<usize>()) {
                (Ok(v), Ok(d)) if d >= 1 => (v, d),
                _ => return Err(Error::parse(origin, 1, format!("bad header {header:?}"))),
            },
            _ => {
                return Err(Error::parse(
                    origin,
                    1,
                    format!("header must be \"<vocab_size> <dimension>\", got {header:?}"),
                ))
            }
        };

        let mut table = EmbeddingTable::new(dim);
        let mut row = Vec::with_capacity(dim);
        let mut line_no = 1;
        for line in lines {
            line_no += 1;
            let line = line.map_err(io_err(origin))?;
            if line.trim().is_empty() {
                continue;
            }
            if table.vocab_size() == vocab {
                return Err(Error::parse(
                    origin,
                    line_no,
                    format!("more rows than the {vocab} declared in the header"),
                ));
            }
            let mut parts = line.split_whitespace();
            let term = parts.next().unwrap_or_default();
            row.clear();
            for tok in parts {
                match tok.parse::<f64>() {
                    Ok(x) if x.is_finite() => row.push(x),
                    _ => return Err(Error::parse(origin, line_no, format!("bad component {tok:?}"))),
                }
            }
            if row.len() != dim {
                return Err(Error::parse(
                    origin,
                    line_no,
                    format!("expected {dim} components, found {}", row.len()),
                ));
            }
            table
                .insert(Term::new(term), &row)
                .map_err(|e| Error::parse(origin, line_no, e.to_string()))?;
        }
        if table.vocab_size() != vocab {
            return Err(Error::parse(
                origin,
                line_no,
                format!("header declares {vocab} rows, found {}", table.vocab_size()),
            ));
        }
        Ok(table)
    }
}

pub fn export_table(table: &EmbeddingTable, path: &Path) -> Result<()> {
    table.export(path)
}

pub fn import_table(path: &Path) -> Result<EmbeddingTable> {
    EmbeddingTable::import(path)
}

/// Cosine similarity clamped to `[-1, 1]`; a zero vector yields 0.
pub fn cosine(u: &[f64], v: &[f64]) -> Result<f64> {
    if u.len() != v.len() {
        return Err(Error::DimensionMismatch {
            left: u.len(),
            right: v.len(),
        });
    }
    Ok(cosine_unchecked(u, v))
}

fn cosine_unchecked(u: &[f64], v: &[f64]) -> f64 {
    let mut dot = 0.0;
    let mut nu = 0.0;
    let mut nv = 0.0;
    for (a, b) in u.iter().zip(v) {
        dot += a * b;
        nu += a * a;
        nv += b * b;
    }
    if nu == 0.0 || nv == 0.0 {
        return 0.0;
    }
    (dot / (nu * nv).sqrt()).clamp(-1.0, 1.0)
}

/// idf-weighted mean of the vectors of `terms` (each occurrence counts once).
/// `None` when no term has a vector.
pub fn doc_embedding(table: &EmbeddingTable, index: &InvertedIndex, terms: &[Term]) -> Option<Vec<f64>> {
    table.weighted_centroid(terms.iter().map(|t| (t.as_str(), index.idf(t.as_str()))))
}

/// Same as [`doc_embedding`] for an indexed document, reading its terms and
/// frequencies from the index.
pub fn indexed_doc_embedding(table: &EmbeddingTable, index: &InvertedIndex, ordinal: u32) -> Option<Vec<f64>> {
    table.weighted_centroid(
        index
            .doc_terms(ordinal)
            .map(|(t, tf)| (t.as_str(), f64::from(tf) * index.idf(t.as_str()))),
    )
}
