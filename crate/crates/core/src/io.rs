//! Readers and writers for every on-disk format.
//!
//! Formats owned by this crate start with a `# reffree-<kind> v1` comment.
//! Further `# key: value` comment lines carry metadata. The word-vector
//! format keeps its standard `<count> <dim>` header instead.
//!
//! Tabular reports print numbers with six significant digits; datasets,
//! transforms, models and structured score files keep full precision so
//! they round-trip bit for bit.

use std::collections::{BTreeMap, HashMap, HashSet};
use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::eval::{CorrelationReport, EvaluationRecord, SweepPoint, W2wResult};
use crate::lm::NgramLm;
use crate::metrics::{ScoreComponents, SegmentScore, SegmentStatus};
use crate::remap::linalg::Matrix;
use crate::remap::{BilingualLexicon, LexiconKind, LinearTransform, TransformPipeline};
use crate::vecspace::tokenize;

pub use crate::lm::load_external_lm_scores;
pub use crate::vecspace::load_embedding_space;

const DATASET_TAG: &str = "reffree-dataset";
const SCORES_TAG: &str = "reffree-scores";
const TRANSFORM_TAG: &str = "reffree-transform";
const CORRELATION_TAG: &str = "reffree-correlation";
const W2W_TAG: &str = "reffree-w2w";
const SWEEP_TAG: &str = "reffree-sweep";
const LM_TAG: &str = "reffree-lm";
const SENTVEC_TAG: &str = "reffree-sentence-vectors";
const LMSCORES_TAG: &str = "reffree-lm-scores";

fn version_line(tag: &str) -> String {
    format!("# {tag} v1\n")
}

fn read_text(path: &Path) -> Result<String> {
    fs::read_to_string(path).map_err(|e| Error::io(path, e))
}

fn write_text(path: &Path, text: &str) -> Result<()> {
    fs::write(path, text).map_err(|e| Error::io(path, e))
}

/// Splits leading `#` lines from the body; returns `# key: value` metadata,
/// the body and the 1-based line number where the body starts.
fn split_header(text: &str) -> (BTreeMap<String, String>, &str, usize) {
    let mut meta = BTreeMap::new();
    let mut rest = text;
    let mut line_no = 1;
    while rest.starts_with('#') {
        let end = rest.find('\n').map_or(rest.len(), |i| i + 1);
        let line = rest[1..end].trim();
        if let Some((k, v)) = line.split_once(':') {
            meta.insert(k.trim().to_string(), v.trim().to_string());
        }
        rest = &rest[end..];
        line_no += 1;
    }
    (meta, rest, line_no)
}

fn check_version(path: &Path, text: &str, tag: &str) -> Result<()> {
    if let Some(first) = text.lines().next() {
        if let Some(rest) = first.strip_prefix("# reffree-") {
            let expected = format!("{} v1", &tag["reffree-".len()..]);
            if rest.trim() != expected {
                return Err(Error::parse(path, 1, format!("expected {tag} v1, found {first:?}")));
            }
        }
    }
    Ok(())
}

/// Six significant digits, trailing zeros kept: `0.4499999 → "0.450000"`.
pub fn fmt_sig6(x: f64) -> String {
    if !x.is_finite() {
        return x.to_string();
    }
    if x == 0.0 {
        return "0.00000".to_string();
    }
    let exp = x.abs().log10().floor() as i32;
    let decimals = (5 - exp).clamp(0, 20) as usize;
    let s = format!("{x:.decimals$}");
    // Rounding can carry into a new leading digit (9.999996 → 10.00000).
    let digits = s.chars().filter(char::is_ascii_digit).collect::<String>();
    let significant = digits.trim_start_matches('0').len();
    if significant > 6 && decimals > 0 {
        format!("{x:.prec$}", prec = decimals - 1)
    } else {
        s
    }
}

// ---------------------------------------------------------------- datasets

/// Records of one language pair, read from a flat TSV file.
#[derive(Debug, Clone, PartialEq)]
pub struct DatasetTable {
    pub language_pair: String,
    pub records: Vec<EvaluationRecord>,
    pub path: Option<PathBuf>,
}

pub const DATASET_COLUMNS: [&str; 7] = [
    "system_id",
    "segment_id",
    "source",
    "hypothesis",
    "reference",
    "w2w",
    "human_score",
];

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ReadOptions {
    pub lowercase: bool,
}

impl Default for ReadOptions {
    fn default() -> Self {
        ReadOptions { lowercase: true }
    }
}

pub fn read_dataset(path: impl AsRef<Path>) -> Result<DatasetTable> {
    read_dataset_with(path, ReadOptions::default())
}

/// Reads the dataset TSV. The header names the columns; `system_id`,
/// `segment_id`, `source` and `hypothesis` are mandatory. Language pair
/// comes from a `# language_pair: xx-yy` line, else from the file stem.
pub fn read_dataset_with(path: impl AsRef<Path>, options: ReadOptions) -> Result<DatasetTable> {
    let path = path.as_ref();
    let text = read_text(path)?;
    check_version(path, &text, DATASET_TAG)?;
    let (meta, body, first_line) = split_header(&text);
    let mut lines = body.lines().enumerate().map(|(i, l)| (i + first_line, l));
    let Some((header_no, header)) = lines.next() else {
        return Err(Error::parse(path, first_line, "missing header row"));
    };
    let columns: Vec<&str> = header.split('\t').map(str::trim).collect();
    let col = |name: &str| columns.iter().position(|c| *c == name);
    for required in &DATASET_COLUMNS[..4] {
        if col(required).is_none() {
            return Err(Error::parse(path, header_no, format!("missing mandatory column {required:?}")));
        }
    }
    if let Some(unknown) = columns.iter().find(|c| !DATASET_COLUMNS.contains(c)) {
        return Err(Error::parse(path, header_no, format!("unknown column {unknown:?}")));
    }
    let idx: Vec<Option<usize>> = DATASET_COLUMNS.iter().map(|c| col(c)).collect();

    let mut records = Vec::new();
    let mut keys = HashSet::new();
    for (line_no, line) in lines {
        if line.is_empty() {
            continue;
        }
        let cells: Vec<&str> = line.split('\t').collect();
        if cells.len() != columns.len() {
            return Err(Error::parse(
                path,
                line_no,
                format!("expected {} cells, found {}", columns.len(), cells.len()),
            ));
        }
        let cell = |k: usize| idx[k].map(|i| cells[i]).filter(|c| !c.is_empty());
        let mandatory = |k: usize| {
            cell(k).ok_or_else(|| Error::parse(path, line_no, format!("empty {}", DATASET_COLUMNS[k])))
        };
        let system_id = mandatory(0)?.to_string();
        let segment_id = mandatory(1)?.to_string();
        let human_score = match cell(6) {
            None => None,
            Some(s) => Some(
                s.trim()
                    .parse::<f64>()
                    .ok()
                    .filter(|v| v.is_finite())
                    .ok_or_else(|| Error::parse(path, line_no, format!("non-numeric human_score {s:?}")))?,
            ),
        };
        let key = format!("{system_id}\t{segment_id}");
        if !keys.insert(key) {
            return Err(Error::parse(
                path,
                line_no,
                format!("duplicate key (system {system_id:?}, segment {segment_id:?})"),
            ));
        }
        let toks = |s: &str| tokenize(s, options.lowercase);
        records.push(EvaluationRecord {
            system_id,
            segment_id,
            source: toks(cell(2).unwrap_or("")),
            hypothesis: toks(cell(3).unwrap_or("")),
            reference: cell(4).map(toks),
            w2w: cell(5).map(toks),
            human_score,
        });
    }
    let language_pair = meta.get("language_pair").cloned().unwrap_or_else(|| {
        path.file_stem()
            .map(|s| s.to_string_lossy().into_owned())
            .unwrap_or_default()
    });
    Ok(DatasetTable {
        language_pair,
        records,
        path: Some(path.to_path_buf()),
    })
}

pub fn write_dataset(table: &DatasetTable, path: impl AsRef<Path>) -> Result<()> {
    let mut out = version_line(DATASET_TAG);
    out.push_str(&format!("# language_pair: {}\n", table.language_pair));
    out.push_str(&DATASET_COLUMNS.join("\t"));
    out.push('\n');
    let join = |t: &Option<Vec<String>>| t.as_ref().map(|t| t.join(" ")).unwrap_or_default();
    for r in &table.records {
        let human = r.human_score.map(|h| h.to_string()).unwrap_or_default();
        let row = [
            r.system_id.clone(),
            r.segment_id.clone(),
            r.source.join(" "),
            r.hypothesis.join(" "),
            join(&r.reference),
            join(&r.w2w),
            human,
        ];
        out.push_str(&row.join("\t"));
        out.push('\n');
    }
    write_text(path.as_ref(), &out)
}

// ---------------------------------------------------------------- lexicons

#[derive(Debug, Clone, PartialEq)]
pub struct LexiconFile {
    pub path: PathBuf,
    pub lexicon: BilingualLexicon,
    /// Blank and comment lines.
    pub skipped: usize,
}

/// Reads `<src>\t<tgt>` lines in file order; `#` lines and blanks are skipped.
pub fn read_lexicon(path: impl AsRef<Path>, kind: LexiconKind) -> Result<LexiconFile> {
    let path = path.as_ref();
    let text = read_text(path)?;
    let mut pairs = Vec::new();
    let mut skipped = 0;
    for (i, line) in text.lines().enumerate() {
        if line.trim().is_empty() || line.starts_with('#') {
            skipped += 1;
            continue;
        }
        let fields: Vec<&str> = line.split('\t').collect();
        match fields.as_slice() {
            [s, t] if !s.trim().is_empty() && !t.trim().is_empty() => {
                pairs.push((s.trim().to_string(), t.trim().to_string()))
            }
            _ => {
                return Err(Error::parse(
                    path,
                    i + 1,
                    format!("expected two non-empty tab-separated fields, found {}", fields.len()),
                ))
            }
        }
    }
    Ok(LexiconFile {
        path: path.to_path_buf(),
        lexicon: BilingualLexicon::new(pairs, kind),
        skipped,
    })
}

pub fn write_lexicon(lexicon: &BilingualLexicon, path: impl AsRef<Path>) -> Result<()> {
    let mut out = String::new();
    for (s, t) in &lexicon.pairs {
        out.push_str(&format!("{s}\t{t}\n"));
    }
    write_text(path.as_ref(), &out)
}

// ------------------------------------------------------- sentence vectors

/// Reads `<sentence_id>\t<f1> ... <fd>` lines.
pub fn read_sentence_vectors(path: impl AsRef<Path>) -> Result<HashMap<String, Vec<f64>>> {
    let path = path.as_ref();
    let text = read_text(path)?;
    let mut out = HashMap::new();
    let mut dim = None;
    for (i, line) in text.lines().enumerate() {
        if line.trim().is_empty() || line.starts_with('#') {
            continue;
        }
        let Some((id, rest)) = line.split_once('\t') else {
            return Err(Error::parse(path, i + 1, "expected <sentence_id>\\t<vector>"));
        };
        let v = rest
            .split_whitespace()
            .map(|f| f.parse::<f64>().ok().filter(|x| x.is_finite()))
            .collect::<Option<Vec<f64>>>()
            .ok_or_else(|| Error::parse(path, i + 1, "bad vector component"))?;
        match dim {
            None => dim = Some(v.len()),
            Some(d) if d != v.len() => {
                return Err(Error::parse(path, i + 1, format!("expected {d} components, found {}", v.len())))
            }
            _ => {}
        }
        if out.insert(id.to_string(), v).is_some() {
            return Err(Error::DuplicateKey(id.to_string()));
        }
    }
    Ok(out)
}

/// Writes vectors sorted by id.
pub fn write_sentence_vectors(vectors: &HashMap<String, Vec<f64>>, path: impl AsRef<Path>) -> Result<()> {
    let mut out = version_line(SENTVEC_TAG);
    let sorted: BTreeMap<_, _> = vectors.iter().collect();
    for (id, v) in sorted {
        let parts: Vec<String> = v.iter().map(|x| x.to_string()).collect();
        out.push_str(&format!("{id}\t{}\n", parts.join(" ")));
    }
    write_text(path.as_ref(), &out)
}

// --------------------------------------------------------------- LM files

pub fn write_lm(lm: &NgramLm, path: impl AsRef<Path>) -> Result<()> {
    let mut out = version_line(LM_TAG);
    out.push_str(&lm.to_json());
    out.push('\n');
    write_text(path.as_ref(), &out)
}

pub fn read_lm(path: impl AsRef<Path>) -> Result<NgramLm> {
    let path = path.as_ref();
    let text = read_text(path)?;
    check_version(path, &text, LM_TAG)?;
    let (_, body, line) = split_header(&text);
    NgramLm::from_json(body).map_err(|msg| Error::parse(path, line, msg))
}

/// `<key>\t<score>` lines in the given order, full precision.
pub fn lm_scores_to_string(scores: &[(String, f64)]) -> String {
    let mut out = version_line(LMSCORES_TAG);
    for (k, v) in scores {
        out.push_str(&format!("{k}\t{v}\n"));
    }
    out
}

pub fn write_lm_scores(scores: &[(String, f64)], path: impl AsRef<Path>) -> Result<()> {
    write_text(path.as_ref(), &lm_scores_to_string(scores))
}

// ------------------------------------------------------------- transforms

#[derive(Debug, Serialize, Deserialize)]
struct TransformRecord {
    variant: String,
    dimension: usize,
    pairs: usize,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    matrix: Option<Vec<f64>>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    vector: Option<Vec<f64>>,
}

#[derive(Debug, Serialize, Deserialize)]
struct TransformDocument {
    composition: String,
    /// Steps in application order.
    steps: Vec<TransformRecord>,
}

pub fn transform_to_string(pipeline: &TransformPipeline) -> String {
    let steps = pipeline
        .steps()
        .iter()
        .map(|s| match s {
            LinearTransform::Clp { matrix, fitted_on } => TransformRecord {
                variant: "clp".into(),
                dimension: matrix.rows(),
                pairs: *fitted_on,
                matrix: Some(matrix.as_slice().to_vec()),
                vector: None,
            },
            LinearTransform::Umd { direction, fitted_on } => TransformRecord {
                variant: "umd".into(),
                dimension: direction.len(),
                pairs: *fitted_on,
                matrix: None,
                vector: Some(direction.clone()),
            },
        })
        .collect();
    let doc = TransformDocument {
        composition: pipeline.name(),
        steps,
    };
    let mut out = version_line(TRANSFORM_TAG);
    out.push_str(&serde_json::to_string_pretty(&doc).expect("transform serializes"));
    out.push('\n');
    out
}

pub fn transform_from_str(text: &str, path: &Path) -> Result<TransformPipeline> {
    check_version(path, text, TRANSFORM_TAG)?;
    let (_, body, line) = split_header(text);
    let bad = |msg: String| Error::parse(path, line, msg);
    let doc: TransformDocument = serde_json::from_str(body).map_err(|e| bad(e.to_string()))?;
    let steps = doc
        .steps
        .into_iter()
        .map(|r| match (r.variant.as_str(), r.matrix, r.vector) {
            ("clp", Some(m), None) => Ok(LinearTransform::Clp {
                matrix: Matrix::from_vec(r.dimension, r.dimension, m)
                    .map_err(|_| bad("CLP matrix size does not match dimension".into()))?,
                fitted_on: r.pairs,
            }),
            ("umd", None, Some(v)) if v.len() == r.dimension => Ok(LinearTransform::Umd {
                direction: v,
                fitted_on: r.pairs,
            }),
            (other, _, _) => Err(bad(format!("malformed {other:?} step"))),
        })
        .collect::<Result<Vec<_>>>()?;
    TransformPipeline::new(steps)
}

pub fn write_transform(pipeline: &TransformPipeline, path: impl AsRef<Path>) -> Result<()> {
    write_text(path.as_ref(), &transform_to_string(pipeline))
}

pub fn read_transform(path: impl AsRef<Path>) -> Result<TransformPipeline> {
    let path = path.as_ref();
    transform_from_str(&read_text(path)?, path)
}

// ----------------------------------------------------------------- scores

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Format {
    #[default]
    Tsv,
    Structured,
}

pub const SCORE_COLUMNS: [&str; 6] = ["system_id", "segment_id", "similarity", "base", "lm", "status"];

/// Metric name and LM weight recorded alongside scores.
#[derive(Debug, Clone, PartialEq)]
pub struct ScoreFileMeta {
    pub metric: String,
    pub lm_weight: f64,
}

#[derive(Debug, Serialize, Deserialize)]
struct ScoreRow {
    system_id: String,
    segment_id: String,
    similarity: Option<f64>,
    base: Option<f64>,
    lm: Option<f64>,
    status: String,
}

#[derive(Debug, Serialize, Deserialize)]
struct ScoreDocument {
    metric: String,
    lm_weight: f64,
    segments: Vec<ScoreRow>,
}

fn status_text(s: &SegmentScore) -> String {
    match &s.status {
        SegmentStatus::Scored(_) => "ok".to_string(),
        SegmentStatus::Unscorable(reason) => {
            format!("unscorable: {}", reason.replace(['\t', '\n'], " "))
        }
    }
}

pub fn scores_to_string(scores: &[SegmentScore], meta: &ScoreFileMeta, format: Format) -> String {
    let mut out = version_line(SCORES_TAG);
    match format {
        Format::Tsv => {
            out.push_str(&format!("# metric: {}\n", meta.metric));
            out.push_str(&format!("# lm_weight: {}\n", meta.lm_weight));
            out.push_str(&SCORE_COLUMNS.join("\t"));
            out.push('\n');
            for s in scores {
                let (sim, base, lm) = match s.components() {
                    Some(c) => (
                        fmt_sig6(c.similarity),
                        fmt_sig6(c.base_similarity),
                        c.lm_score.map(fmt_sig6).unwrap_or_else(|| "-".into()),
                    ),
                    None => ("-".into(), "-".into(), "-".into()),
                };
                out.push_str(&format!(
                    "{}\t{}\t{sim}\t{base}\t{lm}\t{}\n",
                    s.system_id,
                    s.segment_id,
                    status_text(s)
                ));
            }
        }
        Format::Structured => {
            let doc = ScoreDocument {
                metric: meta.metric.clone(),
                lm_weight: meta.lm_weight,
                segments: scores
                    .iter()
                    .map(|s| {
                        let c = s.components();
                        ScoreRow {
                            system_id: s.system_id.clone(),
                            segment_id: s.segment_id.clone(),
                            similarity: c.map(|c| c.similarity),
                            base: c.map(|c| c.base_similarity),
                            lm: c.and_then(|c| c.lm_score),
                            status: status_text(s),
                        }
                    })
                    .collect(),
            };
            out.push_str(&serde_json::to_string_pretty(&doc).expect("scores serialize"));
            out.push('\n');
        }
    }
    out
}

pub fn write_scores(
    scores: &[SegmentScore],
    meta: &ScoreFileMeta,
    path: impl AsRef<Path>,
    format: Format,
) -> Result<()> {
    write_text(path.as_ref(), &scores_to_string(scores, meta, format))
}

fn parse_status(status: &str) -> std::result::Result<Option<String>, String> {
    if status == "ok" {
        Ok(None)
    } else if let Some(reason) = status.strip_prefix("unscorable:") {
        Ok(Some(reason.trim().to_string()))
    } else {
        Err(format!("unknown status {status:?}"))
    }
}

fn build_score(
    system_id: String,
    segment_id: String,
    values: (Option<f64>, Option<f64>, Option<f64>),
    status: Option<String>,
    lm_weight: f64,
) -> std::result::Result<SegmentScore, String> {
    let status = match (status, values) {
        (Some(reason), _) => SegmentStatus::Unscorable(reason),
        (None, (Some(similarity), Some(base), lm)) => SegmentStatus::Scored(ScoreComponents {
            similarity,
            base_similarity: base,
            lm_score: lm,
            lm_weight,
        }),
        (None, _) => return Err("scored row without similarity".into()),
    };
    Ok(SegmentScore {
        system_id,
        segment_id,
        status,
    })
}

/// Reads either score format (detected from the content).
pub fn read_scores(path: impl AsRef<Path>) -> Result<(Vec<SegmentScore>, ScoreFileMeta)> {
    let path = path.as_ref();
    let text = read_text(path)?;
    check_version(path, &text, SCORES_TAG)?;
    let (meta, body, first_line) = split_header(&text);
    if body.trim_start().starts_with('{') {
        let doc: ScoreDocument =
            serde_json::from_str(body).map_err(|e| Error::parse(path, first_line, e.to_string()))?;
        let scores = doc
            .segments
            .into_iter()
            .map(|r| {
                let status = parse_status(&r.status).map_err(|m| Error::parse(path, first_line, m))?;
                build_score(r.system_id, r.segment_id, (r.similarity, r.base, r.lm), status, doc.lm_weight)
                    .map_err(|m| Error::parse(path, first_line, m))
            })
            .collect::<Result<Vec<_>>>()?;
        return Ok((
            scores,
            ScoreFileMeta {
                metric: doc.metric,
                lm_weight: doc.lm_weight,
            },
        ));
    }

    let lm_weight = match meta.get("lm_weight") {
        Some(w) => w
            .parse()
            .map_err(|_| Error::parse(path, 1, format!("bad lm_weight {w:?}")))?,
        None => 0.0,
    };
    let mut lines = body.lines().enumerate().map(|(i, l)| (i + first_line, l));
    match lines.next() {
        Some((_, h)) if h.split('\t').eq(SCORE_COLUMNS.iter().copied()) => {}
        Some((n, _)) => return Err(Error::parse(path, n, "expected score header row")),
        None => return Err(Error::parse(path, first_line, "missing header row")),
    }
    let mut scores = Vec::new();
    for (n, line) in lines {
        if line.is_empty() {
            continue;
        }
        let cells: Vec<&str> = line.split('\t').collect();
        let [sys, seg, sim, base, lm, status] = cells.as_slice() else {
            return Err(Error::parse(path, n, format!("expected 6 cells, found {}", cells.len())));
        };
        let num = |s: &str| -> Result<Option<f64>> {
            if s == "-" {
                Ok(None)
            } else {
                s.parse()
                    .map(Some)
                    .map_err(|_| Error::parse(path, n, format!("bad number {s:?}")))
            }
        };
        let status = parse_status(status).map_err(|m| Error::parse(path, n, m))?;
        let score = build_score(
            sys.to_string(),
            seg.to_string(),
            (num(sim)?, num(base)?, num(lm)?),
            status,
            lm_weight,
        )
        .map_err(|m| Error::parse(path, n, m))?;
        scores.push(score);
    }
    Ok((
        scores,
        ScoreFileMeta {
            metric: meta.get("metric").cloned().unwrap_or_default(),
            lm_weight,
        },
    ))
}

// ---------------------------------------------------------------- reports

#[derive(Debug, Serialize)]
struct CorrelationRowDoc<'a> {
    language_pair: &'a str,
    n: usize,
    excluded: usize,
    value: f64,
}

#[derive(Debug, Serialize)]
struct CorrelationDoc<'a> {
    level: String,
    statistic: String,
    rows: Vec<CorrelationRowDoc<'a>>,
    average: Option<f64>,
}

/// One row per language pair followed by an `average` row, per report.
pub fn correlation_reports_to_string(reports: &[CorrelationReport], format: Format) -> String {
    let mut out = version_line(CORRELATION_TAG);
    match format {
        Format::Tsv => {
            out.push_str("level\tstatistic\tlanguage_pair\tn\texcluded\tvalue\n");
            for r in reports {
                for row in &r.rows {
                    let c = &row.correlation;
                    out.push_str(&format!(
                        "{}\t{}\t{}\t{}\t{}\t{}\n",
                        r.level,
                        r.statistic,
                        row.language_pair,
                        c.n,
                        c.excluded,
                        fmt_sig6(c.value)
                    ));
                }
                if let Some(avg) = r.average() {
                    let n: usize = r.rows.iter().map(|x| x.correlation.n).sum();
                    let excluded: usize = r.rows.iter().map(|x| x.correlation.excluded).sum();
                    out.push_str(&format!(
                        "{}\t{}\taverage\t{n}\t{excluded}\t{}\n",
                        r.level,
                        r.statistic,
                        fmt_sig6(avg)
                    ));
                }
            }
        }
        Format::Structured => {
            let docs: Vec<CorrelationDoc<'_>> = reports
                .iter()
                .map(|r| CorrelationDoc {
                    level: r.level.to_string(),
                    statistic: r.statistic.to_string(),
                    rows: r
                        .rows
                        .iter()
                        .map(|row| CorrelationRowDoc {
                            language_pair: &row.language_pair,
                            n: row.correlation.n,
                            excluded: row.correlation.excluded,
                            value: round_sig6(row.correlation.value),
                        })
                        .collect(),
                    average: r.average().map(round_sig6),
                })
                .collect();
            out.push_str(&serde_json::to_string_pretty(&docs).expect("report serializes"));
            out.push('\n');
        }
    }
    out
}

fn round_sig6(x: f64) -> f64 {
    fmt_sig6(x).parse().unwrap_or(x)
}

pub fn write_correlation_reports(reports: &[CorrelationReport], path: impl AsRef<Path>, format: Format) -> Result<()> {
    write_text(path.as_ref(), &correlation_reports_to_string(reports, format))
}

/// Per-language-pair W2W: the fraction, and the percentage with one decimal.
pub fn w2w_to_string(rows: &[(String, W2wResult)], metric: &str, format: Format) -> String {
    let mut out = version_line(W2W_TAG);
    match format {
        Format::Tsv => {
            out.push_str(&format!("# metric: {metric}\n"));
            out.push_str("language_pair\tn\texcluded\tw2w\tpercent\n");
            for (lp, r) in rows {
                out.push_str(&format!(
                    "{lp}\t{}\t{}\t{}\t{:.1}\n",
                    r.n,
                    r.excluded,
                    fmt_sig6(r.value),
                    100.0 * r.value
                ));
            }
        }
        Format::Structured => {
            let docs: Vec<serde_json::Value> = rows
                .iter()
                .map(|(lp, r)| {
                    serde_json::json!({
                        "language_pair": lp,
                        "n": r.n,
                        "excluded": r.excluded,
                        "preferred": r.preferred,
                        "w2w": round_sig6(r.value),
                    })
                })
                .collect();
            let doc = serde_json::json!({ "metric": metric, "rows": docs });
            out.push_str(&serde_json::to_string_pretty(&doc).expect("report serializes"));
            out.push('\n');
        }
    }
    out
}

pub fn write_w2w(rows: &[(String, W2wResult)], metric: &str, path: impl AsRef<Path>, format: Format) -> Result<()> {
    write_text(path.as_ref(), &w2w_to_string(rows, metric, format))
}

pub fn sweep_to_string(points: &[SweepPoint], format: Format) -> String {
    let mut out = version_line(SWEEP_TAG);
    match format {
        Format::Tsv => {
            out.push_str("size\tn\tvalue\n");
            for p in points {
                out.push_str(&format!("{}\t{}\t{}\n", p.size, p.correlation.n, fmt_sig6(p.correlation.value)));
            }
        }
        Format::Structured => {
            let docs: Vec<serde_json::Value> = points
                .iter()
                .map(|p| {
                    serde_json::json!({
                        "size": p.size,
                        "n": p.correlation.n,
                        "value": round_sig6(p.correlation.value),
                    })
                })
                .collect();
            out.push_str(&serde_json::to_string_pretty(&docs).expect("report serializes"));
            out.push('\n');
        }
    }
    out
}

pub fn write_sweep(points: &[SweepPoint], path: impl AsRef<Path>, format: Format) -> Result<()> {
    write_text(path.as_ref(), &sweep_to_string(points, format))
}
