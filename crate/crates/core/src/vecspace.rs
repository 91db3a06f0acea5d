//! Embedding spaces, IDF weighting and n-gram decomposition.
//!
//! An [`EmbeddingSpace`] is an immutable token → vector table with an attached
//! [`IdfTable`]. Sentences are turned into weighted point clouds with
//! [`ngramize`] (for transport-based scoring) or pooled into a single vector
//! with [`pool_sentence`] (for cosine scoring).

use std::collections::{HashMap, HashSet};
use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::Path;

use crate::error::{Error, Result};

/// Whitespace tokenizer with optional lowercasing.
pub fn tokenize(text: &str, lowercase: bool) -> Vec<String> {
    text.split_whitespace()
        .map(|t| if lowercase { t.to_lowercase() } else { t.to_string() })
        .collect()
}

/// Smoothed inverse document frequencies, `ln((N + 1) / (df + 1))`.
///
/// Tokens never seen in the corpus resolve to `ln(N + 1)`. The default table
/// has `N = 0`, so every token weighs zero and callers fall back to uniform
/// weights.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct IdfTable {
    weights: HashMap<String, f64>,
    doc_count: usize,
}

impl IdfTable {
    /// Builds a table from explicit weights. Negative or non-finite weights are rejected.
    pub fn from_weights(weights: HashMap<String, f64>, doc_count: usize) -> Result<Self> {
        if let Some((tok, w)) = weights.iter().find(|(_, w)| !w.is_finite() || **w < 0.0) {
            return Err(Error::InvalidArgument(format!(
                "idf weight for {tok:?} must be finite and nonnegative, got {w}"
            )));
        }
        Ok(IdfTable { weights, doc_count })
    }

    pub fn get(&self, token: &str) -> f64 {
        self.weights.get(token).copied().unwrap_or_else(|| self.oov())
    }

    pub fn oov(&self) -> f64 {
        ((self.doc_count + 1) as f64).ln()
    }

    pub fn doc_count(&self) -> usize {
        self.doc_count
    }

    pub fn len(&self) -> usize {
        self.weights.len()
    }

    pub fn is_empty(&self) -> bool {
        self.weights.is_empty()
    }
}

/// Document frequencies over `corpus`, turned into an [`IdfTable`].
pub fn compute_idf<S: AsRef<str>>(corpus: &[Vec<S>]) -> Result<IdfTable> {
    if corpus.is_empty() {
        return Err(Error::EmptyCorpus);
    }
    let mut df: HashMap<&str, usize> = HashMap::new();
    for doc in corpus {
        let seen: HashSet<&str> = doc.iter().map(AsRef::as_ref).collect();
        for tok in seen {
            *df.entry(tok).or_insert(0) += 1;
        }
    }
    let n = corpus.len() as f64;
    let weights = df
        .into_iter()
        .map(|(tok, c)| (tok.to_string(), ((n + 1.0) / (c as f64 + 1.0)).ln()))
        .collect();
    Ok(IdfTable {
        weights,
        doc_count: corpus.len(),
    })
}

/// Immutable token → vector map of fixed dimension.
#[derive(Debug, Clone, PartialEq)]
pub struct EmbeddingSpace {
    dim: usize,
    tokens: Vec<String>,
    index: HashMap<String, usize>,
    data: Vec<f64>,
    idf: IdfTable,
}

impl EmbeddingSpace {
    /// Builds a space from `(token, vector)` rows. A repeated token keeps its
    /// first position and takes the last vector.
    pub fn from_rows<I>(dim: usize, rows: I) -> Result<Self>
    where
        I: IntoIterator<Item = (String, Vec<f64>)>,
    {
        if dim == 0 {
            return Err(Error::InvalidArgument("embedding dimension must be positive".into()));
        }
        let mut space = EmbeddingSpace {
            dim,
            tokens: Vec::new(),
            index: HashMap::new(),
            data: Vec::new(),
            idf: IdfTable::default(),
        };
        for (tok, v) in rows {
            if v.len() != dim {
                return Err(Error::DimensionMismatch {
                    expected: dim,
                    got: v.len(),
                });
            }
            if let Some(x) = v.iter().find(|x| !x.is_finite()) {
                return Err(Error::InvalidArgument(format!(
                    "non-finite component {x} for token {tok:?}"
                )));
            }
            space.insert(tok, &v);
        }
        Ok(space)
    }

    fn insert(&mut self, tok: String, v: &[f64]) -> bool {
        match self.index.get(&tok) {
            Some(&i) => {
                self.data[i * self.dim..(i + 1) * self.dim].copy_from_slice(v);
                true
            }
            None => {
                self.index.insert(tok.clone(), self.tokens.len());
                self.tokens.push(tok);
                self.data.extend_from_slice(v);
                false
            }
        }
    }

    /// Replaces the IDF table.
    pub fn with_idf(mut self, idf: IdfTable) -> Self {
        self.idf = idf;
        self
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.tokens.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tokens.is_empty()
    }

    pub fn idf(&self) -> &IdfTable {
        &self.idf
    }

    /// `None` for tokens outside the vocabulary.
    pub fn get(&self, token: &str) -> Option<&[f64]> {
        self.index
            .get(token)
            .map(|&i| &self.data[i * self.dim..(i + 1) * self.dim])
    }

    pub fn contains(&self, token: &str) -> bool {
        self.index.contains_key(token)
    }

    /// Rows in insertion order.
    pub fn iter(&self) -> impl Iterator<Item = (&str, &[f64])> {
        self.tokens
            .iter()
            .zip(self.data.chunks_exact(self.dim))
            .map(|(t, v)| (t.as_str(), v))
    }

    /// Writes the word-vector text format with shortest round-trip float printing.
    pub fn write_text(&self, path: impl AsRef<Path>) -> Result<()> {
        let path = path.as_ref();
        let file = File::create(path).map_err(|e| Error::io(path, e))?;
        let mut w = BufWriter::new(file);
        let io = |e| Error::io(path, e);
        writeln!(w, "{} {}", self.len(), self.dim).map_err(io)?;
        for (tok, v) in self.iter() {
            write!(w, "{tok}").map_err(io)?;
            for x in v {
                write!(w, " {x}").map_err(io)?;
            }
            writeln!(w).map_err(io)?;
        }
        w.flush().map_err(io)
    }
}

/// Reads a word-vector text file: a `<count> <dim>` header followed by one
/// `<token> <f1> ... <fd>` row per line.
pub fn load_embedding_space(
    path: impl AsRef<Path>,
    expected_dim: Option<usize>,
) -> Result<EmbeddingSpace> {
    let path = path.as_ref();
    let file = File::open(path).map_err(|e| Error::io(path, e))?;
    let mut lines = BufReader::new(file).lines();

    let header = match lines.next() {
        Some(line) => line.map_err(|e| Error::io(path, e))?,
        None => return Err(Error::parse(path, 1, "missing header")),
    };
    let fields: Vec<&str> = header.split_whitespace().collect();
    let (count, dim) = match fields.as_slice() {
        [c, d] => match (c.parse::<usize>(), d.parse::<usize>()) {
            (Ok(c), Ok(d)) if d > 0 => (c, d),
            _ => return Err(Error::parse(path, 1, format!("malformed header {header:?}"))),
        },
        _ => return Err(Error::parse(path, 1, format!("malformed header {header:?}"))),
    };
    if let Some(expected) = expected_dim {
        if expected != dim {
            return Err(Error::DimensionMismatch { expected, got: dim });
        }
    }

    let mut space = EmbeddingSpace::from_rows(dim, std::iter::empty())?;
    let mut rows = 0usize;
    let mut v = Vec::with_capacity(dim);
    for (i, line) in lines.enumerate() {
        let lineno = i + 2;
        let line = line.map_err(|e| Error::io(path, e))?;
        if line.trim().is_empty() {
            continue;
        }
        let mut parts = line.split_whitespace();
        let tok = parts.next().expect("non-empty line has a first field");
        v.clear();
        for field in parts {
            let x: f64 = field
                .parse()
                .map_err(|_| Error::parse(path, lineno, format!("bad float {field:?}")))?;
            if !x.is_finite() {
                return Err(Error::parse(path, lineno, format!("non-finite value {field:?}")));
            }
            v.push(x);
        }
        if v.len() != dim {
            return Err(Error::parse(
                path,
                lineno,
                format!("expected {dim} components for {tok:?}, found {}", v.len()),
            ));
        }
        if space.insert(tok.to_string(), &v) {
            log::warn!("{}:{lineno}: duplicate token {tok:?}, keeping last vector", path.display());
        }
        rows += 1;
    }
    if rows != count {
        return Err(Error::parse(
            path,
            1,
            format!("header announces {count} rows, file has {rows}"),
        ));
    }
    Ok(space)
}

/// One n-gram: its surface text, pooled embedding and unnormalized weight.
#[derive(Debug, Clone, PartialEq)]
pub struct Gram {
    pub text: String,
    pub embedding: Vec<f64>,
    pub raw_weight: f64,
}

/// A sentence as a weighted sequence of embedded n-grams.
#[derive(Debug, Clone, PartialEq)]
pub struct NgramSequence {
    order: usize,
    dim: usize,
    grams: Vec<Gram>,
    weights: Vec<f64>,
}

/// An in-vocabulary token with its vector and IDF weight.
#[derive(Debug, Clone, PartialEq)]
pub struct EmbeddedToken {
    pub token: String,
    pub vector: Vec<f64>,
    pub idf: f64,
}

impl NgramSequence {
    /// Forms contiguous n-grams over already-embedded tokens. Gram embedding
    /// is the mean of its token vectors, gram weight the sum of their IDFs.
    ///
    /// A non-empty input shorter than `order` yields one gram spanning all
    /// tokens.
    pub fn from_embedded(tokens: &[EmbeddedToken], order: usize) -> Result<Self> {
        if !(1..=2).contains(&order) {
            return Err(Error::InvalidArgument(format!(
                "n-gram order must be 1 or 2, got {order}"
            )));
        }
        let Some(first) = tokens.first() else {
            return Err(Error::EmptySequence);
        };
        let dim = first.vector.len();
        if let Some(bad) = tokens.iter().find(|t| t.vector.len() != dim) {
            return Err(Error::DimensionMismatch {
                expected: dim,
                got: bad.vector.len(),
            });
        }
        let span = order.min(tokens.len());
        let grams: Vec<Gram> = tokens
            .windows(span)
            .map(|w| {
                let mut embedding = vec![0.0; dim];
                for t in w {
                    for (e, x) in embedding.iter_mut().zip(&t.vector) {
                        *e += x;
                    }
                }
                let k = w.len() as f64;
                embedding.iter_mut().for_each(|e| *e /= k);
                Gram {
                    text: w.iter().map(|t| t.token.as_str()).collect::<Vec<_>>().join(" "),
                    embedding,
                    raw_weight: w.iter().map(|t| t.idf).sum(),
                }
            })
            .collect();
        let weights = normalize_weights(grams.iter().map(|g| g.raw_weight));
        Ok(NgramSequence {
            order,
            dim,
            grams,
            weights,
        })
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn grams(&self) -> &[Gram] {
        &self.grams
    }

    /// Weights summing to one.
    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn len(&self) -> usize {
        self.grams.len()
    }

    pub fn is_empty(&self) -> bool {
        self.grams.is_empty()
    }

    /// Applies `f` to every gram embedding, keeping weights.
    pub fn map_embeddings(mut self, mut f: impl FnMut(&[f64]) -> Vec<f64>) -> Result<Self> {
        for g in &mut self.grams {
            let mapped = f(&g.embedding);
            if mapped.len() != self.dim {
                return Err(Error::DimensionMismatch {
                    expected: self.dim,
                    got: mapped.len(),
                });
            }
            g.embedding = mapped;
        }
        Ok(self)
    }
}

fn normalize_weights(raw: impl Iterator<Item = f64>) -> Vec<f64> {
    let raw: Vec<f64> = raw.collect();
    let total: f64 = raw.iter().sum();
    if total > 0.0 {
        raw.iter().map(|w| w / total).collect()
    } else {
        let k = raw.len() as f64;
        raw.iter().map(|_| 1.0 / k).collect()
    }
}

/// Looks up every token, dropping out-of-vocabulary ones.
pub fn embed_tokens<S: AsRef<str>>(tokens: &[S], space: &EmbeddingSpace) -> Vec<EmbeddedToken> {
    tokens
        .iter()
        .filter_map(|t| {
            let t = t.as_ref();
            space.get(t).map(|v| EmbeddedToken {
                token: t.to_string(),
                vector: v.to_vec(),
                idf: space.idf().get(t),
            })
        })
        .collect()
}

/// Drops OOV tokens, then decomposes the rest into weighted n-grams.
/// Returns [`Error::EmptySequence`] when no token is in vocabulary.
pub fn ngramize<S: AsRef<str>>(
    tokens: &[S],
    space: &EmbeddingSpace,
    order: usize,
) -> Result<NgramSequence> {
    NgramSequence::from_embedded(&embed_tokens(tokens, space), order)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Provenance {
    Pooled,
    ExternalFile,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SentenceEmbedding {
    pub vector: Vec<f64>,
    pub provenance: Provenance,
    /// Set when no token was in vocabulary or the pooled vector is zero.
    pub degenerate: bool,
}

impl SentenceEmbedding {
    pub fn external(vector: Vec<f64>) -> Self {
        let degenerate = vector.iter().all(|x| *x == 0.0);
        SentenceEmbedding {
            vector,
            provenance: Provenance::ExternalFile,
            degenerate,
        }
    }
}

/// IDF-weighted mean of the in-vocabulary token vectors.
pub fn pool_sentence<S: AsRef<str>>(tokens: &[S], space: &EmbeddingSpace) -> SentenceEmbedding {
    let embedded = embed_tokens(tokens, space);
    let mut vector = vec![0.0; space.dim()];
    if embedded.is_empty() {
        return SentenceEmbedding {
            vector,
            provenance: Provenance::Pooled,
            degenerate: true,
        };
    }
    let weights = normalize_weights(embedded.iter().map(|t| t.idf));
    for (t, w) in embedded.iter().zip(&weights) {
        for (acc, x) in vector.iter_mut().zip(&t.vector) {
            *acc += w * x;
        }
    }
    let degenerate = vector.iter().all(|x| *x == 0.0);
    SentenceEmbedding {
        vector,
        provenance: Provenance::Pooled,
        degenerate,
    }
}
