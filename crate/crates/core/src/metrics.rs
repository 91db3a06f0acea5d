//! Reference-free segment scores.
//!
//! Every score is oriented so that higher means a better translation:
//! transport scores are `−WMD`, sentence scores are the raw cosine. With a
//! language model attached the final similarity is
//! `base + λ · lm_score`.

use std::collections::HashMap;
use std::sync::Arc;

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::eval::EvaluationRecord;
use crate::lm::{score_sentence, NgramLm};
use crate::remap::linalg::{dot, norm};
use crate::remap::{Side, TransformPipeline};
use crate::transport::wmd;
use crate::vecspace::{embed_tokens, pool_sentence, EmbeddingSpace, NgramSequence, SentenceEmbedding};

pub const DEFAULT_LM_WEIGHT: f64 = 0.1;

/// Where cosine scoring gets its sentence vectors.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum SentenceSource {
    #[default]
    Pooled,
    ExternalFile,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MetricFamily {
    Mover { ngram: usize },
    Cosine { source: SentenceSource },
}

/// Whether transport scoring re-maps token vectors before n-gram pooling
/// or the pooled n-gram vectors afterwards.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum RemapStage {
    #[default]
    Tokens,
    Grams,
}

#[derive(Debug, Clone)]
pub enum LmSource {
    Internal(Arc<NgramLm>),
    /// Precomputed scores keyed by `<system_id>:<segment_id>` or bare `<segment_id>`.
    External(Arc<HashMap<String, f64>>),
}

#[derive(Debug, Clone)]
pub struct MetricConfig {
    pub family: MetricFamily,
    pub pipeline: Option<TransformPipeline>,
    pub remap_stage: RemapStage,
    pub lm: Option<LmSource>,
    pub lm_weight: f64,
}

impl MetricConfig {
    pub fn mover(ngram: usize) -> Self {
        MetricConfig {
            family: MetricFamily::Mover { ngram },
            pipeline: None,
            remap_stage: RemapStage::Tokens,
            lm: None,
            lm_weight: DEFAULT_LM_WEIGHT,
        }
    }

    pub fn cosine(source: SentenceSource) -> Self {
        MetricConfig {
            family: MetricFamily::Cosine { source },
            ..MetricConfig::mover(1)
        }
    }

    pub fn with_pipeline(mut self, pipeline: TransformPipeline) -> Self {
        self.pipeline = Some(pipeline);
        self
    }

    pub fn with_lm(mut self, lm: LmSource) -> Self {
        self.lm = Some(lm);
        self
    }

    pub fn with_lm_weight(mut self, weight: f64) -> Self {
        self.lm_weight = weight;
        self
    }

    pub fn with_remap_stage(mut self, stage: RemapStage) -> Self {
        self.remap_stage = stage;
        self
    }

    /// Display name such as `Mover-2 + CLP ⊕ LM`.
    pub fn name(&self) -> String {
        let mut name = match self.family {
            MetricFamily::Mover { ngram } => format!("Mover-{ngram}"),
            MetricFamily::Cosine { .. } => "Cosine".to_string(),
        };
        if let Some(p) = &self.pipeline {
            name.push_str(" + ");
            name.push_str(&p.name());
        }
        if self.lm.is_some() {
            name.push_str(" ⊕ LM");
        }
        name
    }

    fn validate(&self) -> Result<()> {
        if !(self.lm_weight >= 0.0 && self.lm_weight.is_finite()) {
            return Err(Error::InvalidArgument(format!(
                "LM weight must be finite and nonnegative, got {}",
                self.lm_weight
            )));
        }
        if let MetricFamily::Mover { ngram } = self.family {
            if !(1..=2).contains(&ngram) {
                return Err(Error::InvalidArgument(format!("n-gram order must be 1 or 2, got {ngram}")));
            }
        }
        Ok(())
    }
}

/// Externally computed sentence vectors: sources keyed by segment id,
/// hypotheses by `<system_id>:<segment_id>`.
#[derive(Debug, Clone, Default)]
pub struct ExternalSentenceVectors {
    pub source: HashMap<String, Vec<f64>>,
    pub hypothesis: HashMap<String, Vec<f64>>,
}

pub fn record_key(system_id: &str, segment_id: &str) -> String {
    format!("{system_id}:{segment_id}")
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScoreComponents {
    pub similarity: f64,
    pub base_similarity: f64,
    pub lm_score: Option<f64>,
    pub lm_weight: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub enum SegmentStatus {
    Scored(ScoreComponents),
    Unscorable(String),
}

#[derive(Debug, Clone, PartialEq)]
pub struct SegmentScore {
    pub system_id: String,
    pub segment_id: String,
    pub status: SegmentStatus,
}

impl SegmentScore {
    pub fn similarity(&self) -> Option<f64> {
        match &self.status {
            SegmentStatus::Scored(c) => Some(c.similarity),
            SegmentStatus::Unscorable(_) => None,
        }
    }

    pub fn components(&self) -> Option<&ScoreComponents> {
        match &self.status {
            SegmentStatus::Scored(c) => Some(c),
            SegmentStatus::Unscorable(_) => None,
        }
    }
}

/// Anything that maps a (source, hypothesis) pair to a higher-is-better score.
pub trait Metric {
    fn score(&self, source: &[String], hypothesis: &[String]) -> Result<f64>;
}

impl<F> Metric for F
where
    F: Fn(&[String], &[String]) -> Result<f64>,
{
    fn score(&self, source: &[String], hypothesis: &[String]) -> Result<f64> {
        self(source, hypothesis)
    }
}

/// Segment identity used to look up externally supplied vectors and LM scores.
#[derive(Debug, Clone, Copy)]
pub struct SegmentKey<'k> {
    pub system_id: &'k str,
    pub segment_id: &'k str,
}

/// A configured metric bound to its embedding spaces.
#[derive(Debug, Clone, Copy)]
pub struct Scorer<'a> {
    src: &'a EmbeddingSpace,
    tgt: &'a EmbeddingSpace,
    config: &'a MetricConfig,
    external: Option<&'a ExternalSentenceVectors>,
}

impl<'a> Scorer<'a> {
    pub fn new(src: &'a EmbeddingSpace, tgt: &'a EmbeddingSpace, config: &'a MetricConfig) -> Result<Self> {
        config.validate()?;
        if src.dim() != tgt.dim() {
            return Err(Error::DimensionMismatch {
                expected: src.dim(),
                got: tgt.dim(),
            });
        }
        if let Some(p) = &config.pipeline {
            if p.dim() != src.dim() {
                return Err(Error::DimensionMismatch {
                    expected: src.dim(),
                    got: p.dim(),
                });
            }
        }
        Ok(Scorer {
            src,
            tgt,
            config,
            external: None,
        })
    }

    pub fn with_external_vectors(mut self, vectors: &'a ExternalSentenceVectors) -> Self {
        self.external = Some(vectors);
        self
    }

    pub fn config(&self) -> &MetricConfig {
        self.config
    }

    fn remap(&self, v: &[f64], side: Side) -> Result<Vec<f64>> {
        match &self.config.pipeline {
            Some(p) => p.apply(v, side),
            None => Ok(v.to_vec()),
        }
    }

    fn grams<S: AsRef<str>>(&self, tokens: &[S], side: Side, ngram: usize) -> Result<NgramSequence> {
        let space = match side {
            Side::Source => self.src,
            Side::Target => self.tgt,
        };
        let mut embedded = embed_tokens(tokens, space);
        let remap_tokens = self.config.remap_stage == RemapStage::Tokens;
        if remap_tokens {
            for t in &mut embedded {
                t.vector = self.remap(&t.vector, side)?;
            }
        }
        let seq = NgramSequence::from_embedded(&embedded, ngram).map_err(|e| match e {
            Error::EmptySequence => Error::Unscorable(format!(
                "{} has no in-vocabulary tokens",
                if side == Side::Source { "source" } else { "hypothesis" }
            )),
            other => other,
        })?;
        if remap_tokens || self.config.pipeline.is_none() {
            Ok(seq)
        } else {
            let mut err = None;
            let mapped = seq.map_embeddings(|v| {
                self.remap(v, side).unwrap_or_else(|e| {
                    err = Some(e);
                    v.to_vec()
                })
            })?;
            match err {
                Some(e) => Err(e),
                None => Ok(mapped),
            }
        }
    }

    /// `−WMD` between the re-mapped n-gram clouds.
    pub fn mover_base<S: AsRef<str>>(&self, x: &[S], y: &[S], ngram: usize) -> Result<f64> {
        let a = self.grams(x, Side::Source, ngram)?;
        let b = self.grams(y, Side::Target, ngram)?;
        Ok(-wmd(&a, &b)?)
    }

    fn sentence_vector<S: AsRef<str>>(
        &self,
        tokens: &[S],
        side: Side,
        key: Option<SegmentKey<'_>>,
    ) -> Result<Vec<f64>> {
        let emb = match self.config.family {
            MetricFamily::Cosine {
                source: SentenceSource::ExternalFile,
            } => {
                let ext = self
                    .external
                    .ok_or_else(|| Error::InvalidArgument("no external sentence vectors loaded".into()))?;
                let key = key.ok_or_else(|| {
                    Error::Unscorable("external sentence vectors need a segment key".into())
                })?;
                let (map, id) = match side {
                    Side::Source => (&ext.source, key.segment_id.to_string()),
                    Side::Target => (&ext.hypothesis, record_key(key.system_id, key.segment_id)),
                };
                let v = map
                    .get(&id)
                    .ok_or_else(|| Error::Unscorable(format!("no external sentence vector for {id:?}")))?;
                if v.len() != self.src.dim() {
                    return Err(Error::DimensionMismatch {
                        expected: self.src.dim(),
                        got: v.len(),
                    });
                }
                SentenceEmbedding::external(v.clone())
            }
            _ => pool_sentence(tokens, if side == Side::Source { self.src } else { self.tgt }),
        };
        if emb.degenerate {
            return Err(Error::Unscorable(format!(
                "degenerate {} sentence embedding",
                if side == Side::Source { "source" } else { "hypothesis" }
            )));
        }
        let v = self.remap(&emb.vector, side)?;
        if norm(&v) == 0.0 {
            return Err(Error::Unscorable("sentence embedding vanished after re-mapping".into()));
        }
        Ok(v)
    }

    /// Cosine of the two sentence embeddings.
    pub fn cosine_base<S: AsRef<str>>(&self, x: &[S], y: &[S], key: Option<SegmentKey<'_>>) -> Result<f64> {
        let a = self.sentence_vector(x, Side::Source, key)?;
        let b = self.sentence_vector(y, Side::Target, key)?;
        Ok((dot(&a, &b) / (norm(&a) * norm(&b))).clamp(-1.0, 1.0))
    }

    fn lm_score<S: AsRef<str>>(&self, y: &[S], key: Option<SegmentKey<'_>>) -> Result<Option<f64>> {
        match &self.config.lm {
            None => Ok(None),
            Some(LmSource::Internal(lm)) => Ok(Some(score_sentence(lm, y).avg_log_prob)),
            Some(LmSource::External(scores)) => {
                let key = key.ok_or_else(|| Error::Unscorable("external LM scores need a segment key".into()))?;
                scores
                    .get(&record_key(key.system_id, key.segment_id))
                    .or_else(|| scores.get(key.segment_id))
                    .copied()
                    .map(Some)
                    .ok_or_else(|| Error::Unscorable(format!("no external LM score for {:?}", key.segment_id)))
            }
        }
    }

    /// Full score with components. Unscorable inputs yield [`Error::Unscorable`].
    pub fn score_components<S: AsRef<str>>(
        &self,
        x: &[S],
        y: &[S],
        key: Option<SegmentKey<'_>>,
    ) -> Result<ScoreComponents> {
        let base = match self.config.family {
            MetricFamily::Mover { ngram } => self.mover_base(x, y, ngram)?,
            MetricFamily::Cosine { .. } => self.cosine_base(x, y, key)?,
        };
        let lm = self.lm_score(y, key)?;
        let weight = self.config.lm_weight;
        let similarity = match lm {
            Some(l) => base + weight * l,
            None => base,
        };
        Ok(ScoreComponents {
            similarity,
            base_similarity: base,
            lm_score: lm,
            lm_weight: weight,
        })
    }

    pub fn score_record(&self, record: &EvaluationRecord) -> SegmentScore {
        let key = SegmentKey {
            system_id: &record.system_id,
            segment_id: &record.segment_id,
        };
        let status = match self.score_components(&record.source, &record.hypothesis, Some(key)) {
            Ok(c) => SegmentStatus::Scored(c),
            Err(Error::Unscorable(reason)) => SegmentStatus::Unscorable(reason),
            Err(e) => SegmentStatus::Unscorable(e.to_string()),
        };
        SegmentScore {
            system_id: record.system_id.clone(),
            segment_id: record.segment_id.clone(),
            status,
        }
    }
}

impl Metric for Scorer<'_> {
    fn score(&self, source: &[String], hypothesis: &[String]) -> Result<f64> {
        Ok(self.score_components(source, hypothesis, None)?.similarity)
    }
}

/// Scores every record, preserving input order. `workers == 0` uses the
/// default thread count.
pub fn score_batch(records: &[EvaluationRecord], scorer: &Scorer<'_>, workers: usize) -> Vec<SegmentScore> {
    if workers == 1 {
        return records.iter().map(|r| scorer.score_record(r)).collect();
    }
    let pool = rayon::ThreadPoolBuilder::new().num_threads(workers).build();
    match pool {
        Ok(pool) => pool.install(|| records.par_iter().map(|r| scorer.score_record(r)).collect()),
        Err(e) => {
            log::warn!("could not start {workers} workers ({e}); scoring sequentially");
            records.iter().map(|r| scorer.score_record(r)).collect()
        }
    }
}
