//! Interpolated absolute-discounting n-gram language model.
//!
//! ```text
//! p(w | h) = max(c(h,w) − D, 0) / c(h)  +  D · N1+(h·) / c(h) · p(w | h′)
//! ```
//!
//! where `h′` drops the oldest token of `h`. The recursion bottoms out in a
//! uniform distribution over the training vocabulary, the end-of-sentence
//! marker and one unknown-token slot. Histories never seen in training fall
//! straight through to the next lower order.

use std::collections::{BTreeMap, HashMap};
use std::fs::File;
use std::io::{BufRead, BufReader};
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub const BOS: &str = "<s>";
pub const EOS: &str = "</s>";
pub const UNK: &str = "<unk>";

const UNK_ID: u32 = 0;
const EOS_ID: u32 = 1;
const BOS_ID: u32 = 2;
const FIRST_WORD_ID: u32 = 3;

pub const DEFAULT_ORDER: usize = 3;
pub const DEFAULT_DISCOUNT: f64 = 0.75;

#[derive(Debug, Clone, Default, PartialEq)]
struct HistoryCounts {
    next: BTreeMap<u32, u64>,
    total: u64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct NgramLm {
    order: usize,
    discount: f64,
    /// Index = token id; slots 0..3 hold UNK, EOS, BOS.
    tokens: Vec<String>,
    ids: HashMap<String, u32>,
    /// `levels[k]` is keyed by histories of length `k`.
    levels: Vec<BTreeMap<Vec<u32>, HistoryCounts>>,
}

/// Per-token average natural-log probability, end-of-sentence included.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FluencyScore {
    pub avg_log_prob: f64,
    /// Number of predictions averaged over: tokens plus one for EOS.
    pub token_count: usize,
}

impl NgramLm {
    fn empty(order: usize, discount: f64) -> Self {
        let tokens: Vec<String> = [UNK, EOS, BOS].iter().map(|s| s.to_string()).collect();
        let ids = tokens.iter().enumerate().map(|(i, t)| (t.clone(), i as u32)).collect();
        NgramLm {
            order,
            discount,
            tokens,
            ids,
            levels: vec![BTreeMap::new(); order],
        }
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn discount(&self) -> f64 {
        self.discount
    }

    /// Training word types plus EOS.
    pub fn vocab_size(&self) -> usize {
        self.tokens.len() - FIRST_WORD_ID as usize + 1
    }

    /// Every token the model can predict: words, EOS and UNK.
    pub fn outcomes(&self) -> impl Iterator<Item = &str> {
        std::iter::once(UNK)
            .chain(std::iter::once(EOS))
            .chain(self.tokens[FIRST_WORD_ID as usize..].iter().map(String::as_str))
    }

    /// Observed histories of length `len`, as token strings.
    pub fn histories(&self, len: usize) -> Vec<Vec<&str>> {
        self.levels
            .get(len)
            .map(|lvl| {
                lvl.keys()
                    .map(|h| h.iter().map(|&id| self.tokens[id as usize].as_str()).collect())
                    .collect()
            })
            .unwrap_or_default()
    }

    fn word_id(&self, token: &str) -> u32 {
        match self.ids.get(token) {
            Some(&id) if id >= FIRST_WORD_ID => id,
            _ => UNK_ID,
        }
    }

    fn history_id(&self, token: &str) -> u32 {
        if token == BOS {
            BOS_ID
        } else {
            self.word_id(token)
        }
    }

    fn prob_ids(&self, history: &[u32], w: u32) -> f64 {
        let mut p = 1.0 / (self.vocab_size() + 1) as f64;
        for (k, level) in self.levels.iter().enumerate() {
            if k > history.len() {
                break;
            }
            let h = &history[history.len() - k..];
            if let Some(counts) = level.get(h) {
                let c = counts.next.get(&w).copied().unwrap_or(0) as f64;
                let total = counts.total as f64;
                let types = counts.next.len() as f64;
                p = ((c - self.discount).max(0.0) + self.discount * types * p) / total;
            }
        }
        p
    }

    /// `p(next | history)`. Histories longer than `order − 1` are truncated
    /// to their most recent tokens; `<s>` may appear in the history.
    pub fn prob(&self, history: &[&str], next: &str) -> f64 {
        let keep = history.len().min(self.order - 1);
        let h: Vec<u32> = history[history.len() - keep..]
            .iter()
            .map(|t| self.history_id(t))
            .collect();
        let w = if next == EOS { EOS_ID } else { self.word_id(next) };
        self.prob_ids(&h, w)
    }

    fn padded(&self, tokens: &[impl AsRef<str>]) -> Vec<u32> {
        let mut ids = vec![BOS_ID; self.order - 1];
        ids.extend(tokens.iter().map(|t| self.word_id(t.as_ref())));
        ids.push(EOS_ID);
        ids
    }

    /// Sum of `ln p` over the tokens and EOS, and the number of predictions.
    pub fn log_prob<S: AsRef<str>>(&self, tokens: &[S]) -> (f64, usize) {
        let ids = self.padded(tokens);
        let start = self.order - 1;
        let total = (start..ids.len())
            .map(|t| self.prob_ids(&ids[t - start..t], ids[t]).ln())
            .sum();
        (total, ids.len() - start)
    }
}

/// Trains on tokenized sentences.
pub fn train_lm<S: AsRef<str>>(corpus: &[Vec<S>], order: usize, discount: f64) -> Result<NgramLm> {
    if corpus.is_empty() {
        return Err(Error::EmptyCorpus);
    }
    if order == 0 {
        return Err(Error::InvalidArgument("language model order must be at least 1".into()));
    }
    if !(discount > 0.0 && discount < 1.0) {
        return Err(Error::InvalidDiscount(discount));
    }
    let mut lm = NgramLm::empty(order, discount);
    for sentence in corpus {
        for tok in sentence {
            let tok = tok.as_ref();
            if [UNK, EOS, BOS].contains(&tok) || lm.ids.contains_key(tok) {
                continue;
            }
            lm.ids.insert(tok.to_string(), lm.tokens.len() as u32);
            lm.tokens.push(tok.to_string());
        }
    }
    let start = order - 1;
    for sentence in corpus {
        let ids = lm.padded(sentence);
        for t in start..ids.len() {
            for k in 0..order {
                let entry = lm.levels[k].entry(ids[t - k..t].to_vec()).or_default();
                *entry.next.entry(ids[t]).or_insert(0) += 1;
                entry.total += 1;
            }
        }
    }
    Ok(lm)
}

pub fn score_sentence<S: AsRef<str>>(lm: &NgramLm, tokens: &[S]) -> FluencyScore {
    let (total, count) = lm.log_prob(tokens);
    FluencyScore {
        avg_log_prob: total / count as f64,
        token_count: count,
    }
}

/// `exp(−Σ ln p / Σ predictions)` over all sentences.
pub fn perplexity<S: AsRef<str>>(lm: &NgramLm, sentences: &[Vec<S>]) -> f64 {
    let (mut total, mut count) = (0.0, 0usize);
    for s in sentences {
        let (lp, c) = lm.log_prob(s);
        total += lp;
        count += c;
    }
    (-total / count as f64).exp()
}

#[derive(Serialize, Deserialize)]
struct LevelEntry {
    history: Vec<String>,
    next: Vec<(String, u64)>,
}

#[derive(Serialize, Deserialize)]
struct LmDocument {
    format: String,
    version: u32,
    order: usize,
    discount: f64,
    vocabulary: Vec<String>,
    levels: Vec<Vec<LevelEntry>>,
}

pub(crate) const LM_FORMAT: &str = "reffree-lm";

impl NgramLm {
    pub(crate) fn to_json(&self) -> String {
        let name = |id: &u32| self.tokens[*id as usize].clone();
        let doc = LmDocument {
            format: LM_FORMAT.to_string(),
            version: 1,
            order: self.order,
            discount: self.discount,
            vocabulary: self.tokens[FIRST_WORD_ID as usize..].to_vec(),
            levels: self
                .levels
                .iter()
                .map(|lvl| {
                    lvl.iter()
                        .map(|(h, c)| LevelEntry {
                            history: h.iter().map(name).collect(),
                            next: c.next.iter().map(|(w, n)| (name(w), *n)).collect(),
                        })
                        .collect()
                })
                .collect(),
        };
        serde_json::to_string_pretty(&doc).expect("model serializes")
    }

    pub(crate) fn from_json(text: &str) -> std::result::Result<Self, String> {
        let doc: LmDocument = serde_json::from_str(text).map_err(|e| e.to_string())?;
        if doc.format != LM_FORMAT || doc.version != 1 {
            return Err(format!("unsupported model format {} v{}", doc.format, doc.version));
        }
        if doc.order == 0 || doc.levels.len() != doc.order {
            return Err("level count does not match order".into());
        }
        if !(doc.discount > 0.0 && doc.discount < 1.0) {
            return Err(format!("invalid discount {}", doc.discount));
        }
        let mut lm = NgramLm::empty(doc.order, doc.discount);
        for tok in doc.vocabulary {
            if lm.ids.contains_key(&tok) {
                return Err(format!("duplicate vocabulary entry {tok:?}"));
            }
            lm.ids.insert(tok.clone(), lm.tokens.len() as u32);
            lm.tokens.push(tok);
        }
        let lookup = |t: &str| lm.ids.get(t).copied().ok_or_else(|| format!("unknown token {t:?}"));
        let mut levels = vec![BTreeMap::new(); doc.order];
        for (k, entries) in doc.levels.into_iter().enumerate() {
            for e in entries {
                if e.history.len() != k {
                    return Err(format!("history of length {} at level {k}", e.history.len()));
                }
                let h = e.history.iter().map(|t| lookup(t)).collect::<std::result::Result<Vec<_>, _>>()?;
                let mut counts = HistoryCounts::default();
                for (w, n) in e.next {
                    if n == 0 {
                        return Err("zero count in model".into());
                    }
                    counts.next.insert(lookup(&w)?, n);
                    counts.total += n;
                }
                levels[k].insert(h, counts);
            }
        }
        lm.levels = levels;
        Ok(lm)
    }
}

/// Reads `<segment_id>\t<float>` lines. Blank and `#` lines are skipped.
pub fn load_external_lm_scores(path: impl AsRef<Path>) -> Result<HashMap<String, f64>> {
    let path = path.as_ref();
    let file = File::open(path).map_err(|e| Error::io(path, e))?;
    let mut scores = HashMap::new();
    for (i, line) in BufReader::new(file).lines().enumerate() {
        let line = line.map_err(|e| Error::io(path, e))?;
        if line.trim().is_empty() || line.starts_with('#') {
            continue;
        }
        let fields: Vec<&str> = line.split('\t').collect();
        let [id, value] = fields.as_slice() else {
            return Err(Error::parse(path, i + 1, "expected <segment_id>\\t<score>"));
        };
        let value: f64 = value
            .trim()
            .parse()
            .ok()
            .filter(|v: &f64| v.is_finite())
            .ok_or_else(|| Error::parse(path, i + 1, format!("bad score {value:?}")))?;
        if id.is_empty() {
            return Err(Error::parse(path, i + 1, "empty segment id"));
        }
        if scores.insert(id.to_string(), value).is_some() {
            return Err(Error::DuplicateKey(id.to_string()));
        }
    }
    Ok(scores)
}
