//! Correlation with human judgments and preference diagnostics.

use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::str::FromStr;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::metrics::{score_batch, ExternalSentenceVectors, Metric, MetricConfig, Scorer, SegmentScore};
use crate::remap::{fit_pipeline, BilingualLexicon, FitOptions, PipelineSpec};
use crate::vecspace::EmbeddingSpace;

/// One system output for one source segment.
#[derive(Debug, Clone, PartialEq)]
pub struct EvaluationRecord {
    pub system_id: String,
    pub segment_id: String,
    pub source: Vec<String>,
    pub hypothesis: Vec<String>,
    pub reference: Option<Vec<String>>,
    /// Literal word-by-word translation of the source.
    pub w2w: Option<Vec<String>>,
    /// Direct-assessment score; higher is better.
    pub human_score: Option<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Statistic {
    Pearson,
    Kendall,
}

impl Statistic {
    pub fn compute(self, a: &[f64], b: &[f64]) -> Result<f64> {
        match self {
            Statistic::Pearson => pearson(a, b),
            Statistic::Kendall => kendall(a, b),
        }
    }
}

impl fmt::Display for Statistic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Statistic::Pearson => "pearson",
            Statistic::Kendall => "kendall",
        })
    }
}

impl FromStr for Statistic {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "pearson" => Ok(Statistic::Pearson),
            "kendall" => Ok(Statistic::Kendall),
            _ => Err(Error::InvalidArgument(format!("unknown statistic {s:?}"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Level {
    Segment,
    System,
}

impl fmt::Display for Level {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Level::Segment => "segment",
            Level::System => "system",
        })
    }
}

impl FromStr for Level {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "segment" => Ok(Level::Segment),
            "system" => Ok(Level::System),
            _ => Err(Error::InvalidArgument(format!("unknown level {s:?}"))),
        }
    }
}

fn check_pair(a: &[f64], b: &[f64]) -> Result<()> {
    if a.len() != b.len() {
        return Err(Error::LengthMismatch {
            left: a.len(),
            right: b.len(),
        });
    }
    if a.len() < 2 {
        return Err(Error::InsufficientData {
            needed: 2,
            found: a.len(),
        });
    }
    if let Some(x) = a.iter().chain(b).find(|x| !x.is_finite()) {
        return Err(Error::InvalidArgument(format!("non-finite value {x} in correlation input")));
    }
    Ok(())
}

/// Sample Pearson correlation.
pub fn pearson(a: &[f64], b: &[f64]) -> Result<f64> {
    check_pair(a, b)?;
    let n = a.len() as f64;
    let ma = a.iter().sum::<f64>() / n;
    let mb = b.iter().sum::<f64>() / n;
    let (mut sab, mut saa, mut sbb) = (0.0, 0.0, 0.0);
    for (x, y) in a.iter().zip(b) {
        let (dx, dy) = (x - ma, y - mb);
        sab += dx * dy;
        saa += dx * dx;
        sbb += dy * dy;
    }
    if saa == 0.0 || sbb == 0.0 {
        return Err(Error::ZeroVariance);
    }
    Ok((sab / (saa * sbb).sqrt()).clamp(-1.0, 1.0))
}

/// Kendall tau-b in `O(n log n)` (Knight's merge-sort algorithm).
pub fn kendall(a: &[f64], b: &[f64]) -> Result<f64> {
    check_pair(a, b)?;
    let n = a.len();
    let mut idx: Vec<usize> = (0..n).collect();
    idx.sort_by(|&i, &j| a[i].total_cmp(&a[j]).then(b[i].total_cmp(&b[j])));

    let pairs = |t: u64| t * (t.saturating_sub(1)) / 2;
    let total = pairs(n as u64);

    // Ties in `a`, and joint ties in (a, b).
    let (mut tied_a, mut tied_both) = (0u64, 0u64);
    let (mut run_a, mut run_both) = (1u64, 1u64);
    for w in idx.windows(2) {
        let (i, j) = (w[0], w[1]);
        if a[i] == a[j] {
            run_a += 1;
            if b[i] == b[j] {
                run_both += 1;
            } else {
                tied_both += pairs(run_both);
                run_both = 1;
            }
        } else {
            tied_a += pairs(run_a);
            tied_both += pairs(run_both);
            run_a = 1;
            run_both = 1;
        }
    }
    tied_a += pairs(run_a);
    tied_both += pairs(run_both);

    // Sorting by b now counts the discordant pairs as swaps.
    let mut buf = idx.clone();
    let swaps = merge_count(&mut idx, &mut buf, b);

    let mut tied_b = 0u64;
    let mut run_b = 1u64;
    for w in idx.windows(2) {
        if b[w[0]] == b[w[1]] {
            run_b += 1;
        } else {
            tied_b += pairs(run_b);
            run_b = 1;
        }
    }
    tied_b += pairs(run_b);

    let denom_a = total - tied_a;
    let denom_b = total - tied_b;
    if denom_a == 0 || denom_b == 0 {
        return Err(Error::AllTied);
    }
    let numer = total as i128 - tied_a as i128 - tied_b as i128 + tied_both as i128 - 2 * swaps as i128;
    let tau = numer as f64 / ((denom_a as f64) * (denom_b as f64)).sqrt();
    Ok(tau.clamp(-1.0, 1.0))
}

/// Stable merge sort of `idx` by `key`, returning the number of inversions.
fn merge_count(idx: &mut [usize], buf: &mut [usize], key: &[f64]) -> u64 {
    let n = idx.len();
    if n < 2 {
        return 0;
    }
    let mid = n / 2;
    let mut swaps = {
        let (l, r) = idx.split_at_mut(mid);
        let (bl, br) = buf.split_at_mut(mid);
        merge_count(l, bl, key) + merge_count(r, br, key)
    };
    let (mut i, mut j, mut k) = (0, mid, 0);
    while i < mid && j < n {
        if key[idx[j]] < key[idx[i]] {
            buf[k] = idx[j];
            swaps += (mid - i) as u64;
            j += 1;
        } else {
            buf[k] = idx[i];
            i += 1;
        }
        k += 1;
    }
    buf[k..k + mid - i].copy_from_slice(&idx[i..mid]);
    k += mid - i;
    buf[k..k + n - j].copy_from_slice(&idx[j..n]);
    idx.copy_from_slice(&buf[..n]);
    swaps
}

/// One computed correlation with its sample size.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Correlation {
    pub value: f64,
    pub n: usize,
    /// Points dropped because their segment (or every segment of a system) was unscorable.
    pub excluded: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CorrelationRow {
    pub language_pair: String,
    pub correlation: Correlation,
}

/// Correlations for one (level, statistic) across language pairs.
#[derive(Debug, Clone, PartialEq)]
pub struct CorrelationReport {
    pub level: Level,
    pub statistic: Statistic,
    pub rows: Vec<CorrelationRow>,
}

impl CorrelationReport {
    pub fn new(level: Level, statistic: Statistic) -> Self {
        CorrelationReport {
            level,
            statistic,
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, language_pair: impl Into<String>, correlation: Correlation) {
        self.rows.push(CorrelationRow {
            language_pair: language_pair.into(),
            correlation,
        });
    }

    /// Unweighted mean over language pairs.
    pub fn average(&self) -> Option<f64> {
        if self.rows.is_empty() {
            return None;
        }
        Some(self.rows.iter().map(|r| r.correlation.value).sum::<f64>() / self.rows.len() as f64)
    }
}

fn score_index(scores: &[SegmentScore]) -> HashMap<(&str, &str), &SegmentScore> {
    scores
        .iter()
        .map(|s| ((s.system_id.as_str(), s.segment_id.as_str()), s))
        .collect()
}

/// Aligned (metric, human) vectors over records that carry a human score.
/// Returns the vectors and the number of records excluded as unscorable.
pub fn segment_vectors(scores: &[SegmentScore], records: &[EvaluationRecord]) -> (Vec<f64>, Vec<f64>, usize) {
    let index = score_index(scores);
    let (mut metric, mut human, mut excluded) = (Vec::new(), Vec::new(), 0);
    for r in records {
        let Some(h) = r.human_score else { continue };
        match index
            .get(&(r.system_id.as_str(), r.segment_id.as_str()))
            .and_then(|s| s.similarity())
        {
            Some(m) => {
                metric.push(m);
                human.push(h);
            }
            None => excluded += 1,
        }
    }
    (metric, human, excluded)
}

/// Pools every system's segments into one vector pair and correlates.
pub fn segment_correlation(
    scores: &[SegmentScore],
    records: &[EvaluationRecord],
    statistic: Statistic,
) -> Result<Correlation> {
    let (metric, human, excluded) = segment_vectors(scores, records);
    if excluded > 0 {
        log::info!("{excluded} segments excluded from segment-level correlation as unscorable");
    }
    if metric.len() < 2 {
        return Err(Error::InsufficientData {
            needed: 2,
            found: metric.len(),
        });
    }
    Ok(Correlation {
        value: statistic.compute(&metric, &human)?,
        n: metric.len(),
        excluded,
    })
}

/// Per-system (metric mean, human mean) pairs, in system-id order.
/// Systems whose segments are all unscorable are counted in the second value.
pub fn system_means(scores: &[SegmentScore], records: &[EvaluationRecord]) -> (Vec<(String, f64, f64)>, usize) {
    let index = score_index(scores);
    #[derive(Default)]
    struct Acc {
        metric: f64,
        metric_n: usize,
        human: f64,
        human_n: usize,
    }
    let mut acc: BTreeMap<&str, Acc> = BTreeMap::new();
    for r in records {
        let a = acc.entry(r.system_id.as_str()).or_default();
        if let Some(h) = r.human_score {
            a.human += h;
            a.human_n += 1;
        }
        if let Some(m) = index
            .get(&(r.system_id.as_str(), r.segment_id.as_str()))
            .and_then(|s| s.similarity())
        {
            a.metric += m;
            a.metric_n += 1;
        }
    }
    let mut excluded = 0;
    let mut out = Vec::new();
    for (sys, a) in acc {
        if a.human_n == 0 {
            continue;
        }
        if a.metric_n == 0 {
            excluded += 1;
            continue;
        }
        out.push((sys.to_string(), a.metric / a.metric_n as f64, a.human / a.human_n as f64));
    }
    (out, excluded)
}

/// Correlates per-system mean similarity with per-system mean human score.
pub fn system_correlation(
    scores: &[SegmentScore],
    records: &[EvaluationRecord],
    statistic: Statistic,
) -> Result<Correlation> {
    let (means, excluded) = system_means(scores, records);
    if excluded > 0 {
        log::warn!("{excluded} systems excluded: every segment unscorable");
    }
    if means.len() < 2 {
        return Err(Error::InsufficientData {
            needed: 2,
            found: means.len(),
        });
    }
    if means.len() == 2 {
        log::warn!("system-level correlation over two systems is always ±1");
    }
    let metric: Vec<f64> = means.iter().map(|m| m.1).collect();
    let human: Vec<f64> = means.iter().map(|m| m.2).collect();
    Ok(Correlation {
        value: statistic.compute(&metric, &human)?,
        n: means.len(),
        excluded,
    })
}

/// `m(x, ỹ) − m(x, ŷ)`; positive when the metric prefers `ỹ`.
pub fn preference_diff<M: Metric + ?Sized>(
    metric: &M,
    source: &[String],
    preferred: &[String],
    other: &[String],
) -> Result<f64> {
    Ok(metric.score(source, preferred)? - metric.score(source, other)?)
}

/// A source sentence, its literal translation and the human reference.
#[derive(Debug, Clone, PartialEq)]
pub struct W2wTriple {
    pub source: Vec<String>,
    pub literal: Vec<String>,
    pub reference: Vec<String>,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct W2wResult {
    /// Fraction of scorable triples on which the literal translation wins.
    pub value: f64,
    pub n: usize,
    pub preferred: usize,
    pub excluded: usize,
}

/// Fraction of triples with `d(x′, y*; x) > 0`. Ties do not count;
/// unscorable triples are dropped from the denominator.
pub fn w2w_statistic<M: Metric + ?Sized>(metric: &M, triples: &[W2wTriple]) -> Result<W2wResult> {
    let (mut n, mut preferred, mut excluded) = (0, 0, 0);
    for t in triples {
        match preference_diff(metric, &t.source, &t.literal, &t.reference) {
            Ok(d) => {
                n += 1;
                if d > 0.0 {
                    preferred += 1;
                }
            }
            Err(Error::Unscorable(_)) => excluded += 1,
            Err(e) => return Err(e),
        }
    }
    if n == 0 {
        return Err(Error::InsufficientData { needed: 1, found: 0 });
    }
    Ok(W2wResult {
        value: preferred as f64 / n as f64,
        n,
        preferred,
        excluded,
    })
}

/// W2W triples from records carrying both a literal translation and a
/// reference. Each source segment contributes once.
pub fn w2w_triples(records: &[EvaluationRecord]) -> Vec<W2wTriple> {
    let mut seen = std::collections::HashSet::new();
    records
        .iter()
        .filter_map(|r| match (&r.w2w, &r.reference) {
            (Some(literal), Some(reference)) if seen.insert(r.segment_id.as_str()) => Some(W2wTriple {
                source: r.source.clone(),
                literal: literal.clone(),
                reference: reference.clone(),
            }),
            _ => None,
        })
        .collect()
}

pub const DEFAULT_SWEEP_SEED: u64 = 20_200;

#[derive(Debug, Clone, PartialEq)]
pub struct SweepPoint {
    pub size: usize,
    pub correlation: Correlation,
}

/// Inputs shared by every point of a dictionary-size sweep.
#[derive(Debug, Clone)]
pub struct SweepSetup<'a> {
    pub lexicon: &'a BilingualLexicon,
    pub src: &'a EmbeddingSpace,
    pub tgt: &'a EmbeddingSpace,
    pub records: &'a [EvaluationRecord],
    /// Metric settings; its pipeline is replaced at every point.
    pub config: &'a MetricConfig,
    pub pipeline: &'a PipelineSpec,
    pub fit: FitOptions,
    pub statistic: Statistic,
    pub seed: u64,
    pub workers: usize,
    pub external: Option<&'a ExternalSentenceVectors>,
}

/// Lexicon indices used at each size: prefixes of one seeded permutation,
/// restored to file order. Smaller samples are subsets of larger ones and
/// the full size is the lexicon itself.
pub fn sweep_samples(len: usize, sizes: &[usize], seed: u64) -> Result<Vec<Vec<usize>>> {
    let mut perm: Vec<usize> = (0..len).collect();
    perm.shuffle(&mut ChaCha8Rng::seed_from_u64(seed));
    sizes
        .iter()
        .map(|&size| {
            if size == 0 || size > len {
                return Err(Error::InvalidArgument(format!(
                    "sweep size {size} outside 1..={len} (lexicon size)"
                )));
            }
            let mut sample = perm[..size].to_vec();
            sample.sort_unstable();
            Ok(sample)
        })
        .collect()
}

/// For each size: subsample the lexicon, refit the pipeline, rescore and
/// correlate at segment level.
pub fn dictionary_size_sweep(sizes: &[usize], setup: &SweepSetup<'_>) -> Result<Vec<SweepPoint>> {
    let samples = sweep_samples(setup.lexicon.len(), sizes, setup.seed)?;
    sizes
        .iter()
        .zip(samples)
        .map(|(&size, sample)| {
            let lexicon = setup.lexicon.select(&sample);
            let pipeline = fit_pipeline(setup.pipeline, &lexicon, setup.src, setup.tgt, setup.fit)?;
            let config = setup.config.clone().with_pipeline(pipeline);
            let mut scorer = Scorer::new(setup.src, setup.tgt, &config)?;
            if let Some(ext) = setup.external {
                scorer = scorer.with_external_vectors(ext);
            }
            let scores = score_batch(setup.records, &scorer, setup.workers);
            Ok(SweepPoint {
                size,
                correlation: segment_correlation(&scores, setup.records, setup.statistic)?,
            })
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::metrics::{ScoreComponents, SegmentStatus};

    fn brute_kendall(a: &[f64], b: &[f64]) -> f64 {
        let (mut c, mut d, mut ta, mut tb) = (0i64, 0i64, 0i64, 0i64);
        for i in 0..a.len() {
            for j in i + 1..a.len() {
                let x = (a[i] - a[j]).signum() * if a[i] == a[j] { 0.0 } else { 1.0 };
                let y = (b[i] - b[j]).signum() * if b[i] == b[j] { 0.0 } else { 1.0 };
                match (x == 0.0, y == 0.0) {
                    (true, true) => {}
                    (true, false) => ta += 1,
                    (false, true) => tb += 1,
                    (false, false) if x == y => c += 1,
                    _ => d += 1,
                }
            }
        }
        (c - d) as f64 / (((c + d + ta) * (c + d + tb)) as f64).sqrt()
    }

    #[test]
    fn pearson_golden() {
        assert_eq!(pearson(&[1.0, 2.0, 3.0], &[1.0, 2.0, 3.0]).unwrap(), 1.0);
        assert_eq!(pearson(&[1.0, 2.0, 3.0], &[3.0, 2.0, 1.0]).unwrap(), -1.0);
        let r = pearson(&[1.0, 2.0, 3.0, 4.0], &[2.0, 1.0, 4.0, 3.0]).unwrap();
        assert!((r - 0.6).abs() <= 1e-12);
    }

    #[test]
    fn pearson_errors() {
        assert!(matches!(pearson(&[1.0, 2.0], &[1.0]), Err(Error::LengthMismatch { .. })));
        assert!(matches!(pearson(&[1.0, 1.0], &[1.0, 2.0]), Err(Error::ZeroVariance)));
        assert!(matches!(pearson(&[1.0], &[1.0]), Err(Error::InsufficientData { .. })));
    }

    #[test]
    fn kendall_golden() {
        assert_eq!(kendall(&[1.0, 2.0, 3.0, 4.0], &[1.0, 2.0, 3.0, 4.0]).unwrap(), 1.0);
        assert_eq!(kendall(&[1.0, 2.0, 3.0, 4.0], &[4.0, 3.0, 2.0, 1.0]).unwrap(), -1.0);
        let t = kendall(&[1.0, 2.0, 3.0, 4.0], &[1.0, 3.0, 2.0, 4.0]).unwrap();
        assert!((t - 2.0 / 3.0).abs() <= 1e-12);
        assert!(matches!(kendall(&[1.0, 1.0, 1.0], &[1.0, 2.0, 3.0]), Err(Error::AllTied)));
    }

    #[test]
    fn kendall_matches_pairwise_enumeration_with_ties() {
        let a = [1.0, 2.0, 2.0, 3.0, 1.0, 5.0, 2.0, 0.5];
        let b = [2.0, 2.0, 1.0, 3.0, 2.0, 4.0, 4.0, 0.5];
        let fast = kendall(&a, &b).unwrap();
        assert!((fast - brute_kendall(&a, &b)).abs() <= 1e-12);
    }

    fn record(sys: &str, seg: &str, human: Option<f64>) -> EvaluationRecord {
        EvaluationRecord {
            system_id: sys.into(),
            segment_id: seg.into(),
            source: vec!["x".into()],
            hypothesis: vec!["y".into()],
            reference: None,
            w2w: None,
            human_score: human,
        }
    }

    fn scored(sys: &str, seg: &str, v: Option<f64>) -> SegmentScore {
        SegmentScore {
            system_id: sys.into(),
            segment_id: seg.into(),
            status: match v {
                Some(v) => SegmentStatus::Scored(ScoreComponents {
                    similarity: v,
                    base_similarity: v,
                    lm_score: None,
                    lm_weight: 0.1,
                }),
                None => SegmentStatus::Unscorable("oov".into()),
            },
        }
    }

    #[test]
    fn segment_correlation_identity_and_negation() {
        let da = [0.1, 0.5, -0.3, 0.9];
        let records: Vec<_> = da.iter().enumerate().map(|(i, d)| record("s", &i.to_string(), Some(*d))).collect();
        let same: Vec<_> = da.iter().enumerate().map(|(i, d)| scored("s", &i.to_string(), Some(*d))).collect();
        let neg: Vec<_> = da.iter().enumerate().map(|(i, d)| scored("s", &i.to_string(), Some(-d))).collect();
        assert!((segment_correlation(&same, &records, Statistic::Pearson).unwrap().value - 1.0).abs() < 1e-12);
        assert!((segment_correlation(&neg, &records, Statistic::Pearson).unwrap().value + 1.0).abs() < 1e-12);
    }

    #[test]
    fn unscorable_segments_excluded_and_counted() {
        let records = vec![
            record("s", "1", Some(1.0)),
            record("s", "2", Some(2.0)),
            record("s", "3", Some(3.0)),
            record("s", "4", None),
        ];
        let scores = vec![
            scored("s", "1", Some(0.1)),
            scored("s", "2", None),
            scored("s", "3", Some(0.3)),
            scored("s", "4", Some(0.0)),
        ];
        let c = segment_correlation(&scores, &records, Statistic::Pearson).unwrap();
        assert_eq!((c.n, c.excluded), (2, 1));
        assert!(segment_correlation(&scores[..1], &records, Statistic::Pearson).is_err());
    }

    #[test]
    fn system_level_excludes_fully_unscorable_system() {
        let records = vec![
            record("a", "1", Some(1.0)),
            record("b", "1", Some(2.0)),
            record("c", "1", Some(3.0)),
            record("d", "1", Some(4.0)),
        ];
        let scores = vec![
            scored("a", "1", Some(0.1)),
            scored("b", "1", Some(0.2)),
            scored("c", "1", Some(0.4)),
            scored("d", "1", None),
        ];
        let c = system_correlation(&scores, &records, Statistic::Pearson).unwrap();
        assert_eq!((c.n, c.excluded), (3, 1));
        let two = system_correlation(&scores[..2], &records[..2], Statistic::Pearson).unwrap();
        assert_eq!(two.value.abs(), 1.0);
        assert!(system_correlation(&scores[..1], &records[..1], Statistic::Pearson).is_err());
    }

    #[test]
    fn preference_diff_is_antisymmetric() {
        let m = |_: &[String], y: &[String]| -> Result<f64> { Ok(y.len() as f64 * 0.3) };
        let x = vec!["a".to_string()];
        let y1 = vec!["b".to_string(), "c".to_string()];
        let y2 = vec!["d".to_string()];
        assert_eq!(preference_diff(&m, &x, &y1, &y1).unwrap(), 0.0);
        assert_eq!(
            preference_diff(&m, &x, &y1, &y2).unwrap(),
            -preference_diff(&m, &x, &y2, &y1).unwrap()
        );
    }

    #[test]
    fn w2w_counts_strict_preferences() {
        let always_literal = |_: &[String], y: &[String]| -> Result<f64> {
            Ok(if y.first().map(String::as_str) == Some("lit") { 1.0 } else { 0.0 })
        };
        let triple = W2wTriple {
            source: vec!["x".into()],
            literal: vec!["lit".into()],
            reference: vec!["ref".into()],
        };
        let r = w2w_statistic(&always_literal, &[triple.clone(), triple.clone()]).unwrap();
        assert_eq!(r.value, 1.0);
        let tie = W2wTriple {
            literal: vec!["ref".into()],
            ..triple
        };
        assert_eq!(w2w_statistic(&always_literal, &[tie]).unwrap().value, 0.0);
        assert!(w2w_statistic(&always_literal, &[]).is_err());
    }

    #[test]
    fn sweep_samples_nest_and_validate() {
        let s = sweep_samples(50, &[5, 20, 50], 3).unwrap();
        assert!(s[0].iter().all(|i| s[1].contains(i)));
        assert_eq!(s[2], (0..50).collect::<Vec<_>>());
        assert!(sweep_samples(50, &[0], 3).is_err());
        assert!(sweep_samples(50, &[51], 3).is_err());
    }
}
