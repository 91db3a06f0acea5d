//! Weakly supervised linear re-mappings between two embedding spaces.
//!
//! * **CLP** fits the orthogonal matrix `W` minimizing `‖X_src W − X_tgt‖_F`
//!   over a bilingual lexicon (orthogonal Procrustes). It maps source vectors
//!   only.
//! * **UMD** finds the dominant direction `v` of the stacked difference
//!   vectors `x_src − x_tgt` and removes it from vectors on both sides with
//!   `x ↦ x − cos(x, v)·v`. The cosine form is scale sensitive: for
//!   `x = 2v` the result is `v`, not zero.
//!
//! Steps compose into a [`TransformPipeline`]. Each step is fitted on pairs
//! already mapped by the steps before it.

pub mod linalg;

use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::vecspace::EmbeddingSpace;
use linalg::{dominant_eigenvector, dot, norm, svd_square, Matrix};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum LexiconKind {
    #[default]
    Word,
    Sentence,
}

/// Matched source/target keys used to calibrate a re-mapping.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct BilingualLexicon {
    pub pairs: Vec<(String, String)>,
    pub kind: LexiconKind,
}

impl BilingualLexicon {
    pub fn new(pairs: Vec<(String, String)>, kind: LexiconKind) -> Self {
        BilingualLexicon { pairs, kind }
    }

    pub fn len(&self) -> usize {
        self.pairs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pairs.is_empty()
    }

    /// A lexicon holding the pairs at `indices`, in that order.
    pub fn select(&self, indices: &[usize]) -> BilingualLexicon {
        BilingualLexicon {
            pairs: indices.iter().map(|&i| self.pairs[i].clone()).collect(),
            kind: self.kind,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum RemapKind {
    Clp,
    Umd,
}

impl RemapKind {
    pub fn as_str(self) -> &'static str {
        match self {
            RemapKind::Clp => "clp",
            RemapKind::Umd => "umd",
        }
    }
}

impl fmt::Display for RemapKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.as_str().to_uppercase())
    }
}

impl FromStr for RemapKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "clp" => Ok(RemapKind::Clp),
            "umd" => Ok(RemapKind::Umd),
            _ => Err(Error::InvalidPipelineSpec(s.to_string())),
        }
    }
}

/// Ordered re-mapping steps, written like function composition:
/// `"clp.umd"` is `CLP∘UMD`, so UMD is fitted and applied first.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PipelineSpec {
    application_order: Vec<RemapKind>,
}

impl PipelineSpec {
    /// Builds a spec from steps listed in the order they are applied.
    pub fn from_application_order(steps: Vec<RemapKind>) -> Result<Self> {
        if steps.is_empty() {
            return Err(Error::EmptyPipeline);
        }
        Ok(PipelineSpec {
            application_order: steps,
        })
    }

    pub fn application_order(&self) -> &[RemapKind] {
        &self.application_order
    }
}

impl FromStr for PipelineSpec {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::InvalidPipelineSpec(s.to_string());
        if s.trim().is_empty() {
            return Err(bad());
        }
        let mut steps = s
            .split('.')
            .map(|p| p.trim().to_ascii_lowercase().parse::<RemapKind>().map_err(|_| bad()))
            .collect::<Result<Vec<_>>>()?;
        steps.reverse();
        PipelineSpec::from_application_order(steps)
    }
}

impl fmt::Display for PipelineSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<&str> = self.application_order.iter().rev().map(|k| k.as_str()).collect();
        f.write_str(&parts.join("."))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Side {
    Source,
    Target,
}

/// A fitted re-mapping step.
#[derive(Debug, Clone, PartialEq)]
pub enum LinearTransform {
    Clp { matrix: Matrix, fitted_on: usize },
    Umd { direction: Vec<f64>, fitted_on: usize },
}

impl LinearTransform {
    pub fn kind(&self) -> RemapKind {
        match self {
            LinearTransform::Clp { .. } => RemapKind::Clp,
            LinearTransform::Umd { .. } => RemapKind::Umd,
        }
    }

    pub fn dim(&self) -> usize {
        match self {
            LinearTransform::Clp { matrix, .. } => matrix.rows(),
            LinearTransform::Umd { direction, .. } => direction.len(),
        }
    }

    pub fn fitted_on(&self) -> usize {
        match self {
            LinearTransform::Clp { fitted_on, .. } | LinearTransform::Umd { fitted_on, .. } => {
                *fitted_on
            }
        }
    }

    /// CLP touches the source side only; UMD touches both.
    pub fn applies_to(&self, side: Side) -> bool {
        match self {
            LinearTransform::Clp { .. } => side == Side::Source,
            LinearTransform::Umd { .. } => true,
        }
    }

    pub fn apply(&self, v: &[f64], side: Side) -> Result<Vec<f64>> {
        apply_transform(v, self, side)
    }
}

/// Maps one vector. CLP uses the row-vector convention `v ↦ v·W`; UMD maps
/// `v ↦ v − (⟨v, d⟩ / ‖v‖)·d` and passes the zero vector through.
pub fn apply_transform(v: &[f64], t: &LinearTransform, side: Side) -> Result<Vec<f64>> {
    if v.len() != t.dim() {
        return Err(Error::DimensionMismatch {
            expected: t.dim(),
            got: v.len(),
        });
    }
    if !t.applies_to(side) {
        return Ok(v.to_vec());
    }
    match t {
        LinearTransform::Clp { matrix, .. } => matrix.left_apply(v),
        LinearTransform::Umd { direction, .. } => {
            let len = norm(v);
            if len == 0.0 {
                return Ok(v.to_vec());
            }
            let cos = dot(v, direction) / len;
            Ok(v.iter().zip(direction).map(|(x, d)| x - cos * d).collect())
        }
    }
}

/// Fitted steps in application order.
#[derive(Debug, Clone, PartialEq)]
pub struct TransformPipeline {
    steps: Vec<LinearTransform>,
}

impl TransformPipeline {
    pub fn new(steps: Vec<LinearTransform>) -> Result<Self> {
        let Some(first) = steps.first() else {
            return Err(Error::EmptyPipeline);
        };
        let d = first.dim();
        if let Some(bad) = steps.iter().find(|s| s.dim() != d) {
            return Err(Error::DimensionMismatch {
                expected: d,
                got: bad.dim(),
            });
        }
        Ok(TransformPipeline { steps })
    }

    pub fn steps(&self) -> &[LinearTransform] {
        &self.steps
    }

    pub fn dim(&self) -> usize {
        self.steps[0].dim()
    }

    pub fn spec(&self) -> PipelineSpec {
        PipelineSpec {
            application_order: self.steps.iter().map(LinearTransform::kind).collect(),
        }
    }

    /// Composition name, outermost first, e.g. `CLP∘UMD`.
    pub fn name(&self) -> String {
        let parts: Vec<String> = self.steps.iter().rev().map(|s| s.kind().to_string()).collect();
        parts.join("∘")
    }

    pub fn apply(&self, v: &[f64], side: Side) -> Result<Vec<f64>> {
        let mut out = v.to_vec();
        for step in &self.steps {
            out = apply_transform(&out, step, side)?;
        }
        Ok(out)
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct FitOptions {
    /// L2-normalize dictionary vectors before fitting.
    pub normalize: bool,
}

/// Lexicon pairs stacked into row matrices.
#[derive(Debug, Clone)]
pub struct AlignedPairs {
    pub source: Matrix,
    pub target: Matrix,
    /// Pairs dropped because a key was missing from its space.
    pub skipped: usize,
}

impl AlignedPairs {
    pub fn len(&self) -> usize {
        self.source.rows()
    }

    pub fn is_empty(&self) -> bool {
        self.source.rows() == 0
    }

    /// `‖X_src − X_tgt‖_F`.
    pub fn residual(&self) -> f64 {
        self.source.sub(&self.target).expect("same shape").frobenius_norm()
    }

    /// Both sides mapped through `t`.
    pub fn mapped(&self, t: &LinearTransform) -> Result<AlignedPairs> {
        Ok(AlignedPairs {
            source: map_rows(&self.source, t, Side::Source)?,
            target: map_rows(&self.target, t, Side::Target)?,
            skipped: self.skipped,
        })
    }

    /// `‖f(X_src) − g(X_tgt)‖_F` with each side mapped by `pipeline`.
    pub fn residual_after(&self, pipeline: &TransformPipeline) -> Result<f64> {
        let mut cur = self.clone();
        for step in pipeline.steps() {
            cur = cur.mapped(step)?;
        }
        Ok(cur.residual())
    }
}

fn map_rows(m: &Matrix, t: &LinearTransform, side: Side) -> Result<Matrix> {
    if !t.applies_to(side) {
        return Ok(m.clone());
    }
    let mut out = m.clone();
    for i in 0..m.rows() {
        let mapped = apply_transform(m.row(i), t, side)?;
        out.row_mut(i).copy_from_slice(&mapped);
    }
    Ok(out)
}

/// Looks up every pair; pairs with a missing key are skipped and counted.
pub fn resolve_pairs(
    lexicon: &BilingualLexicon,
    src: &EmbeddingSpace,
    tgt: &EmbeddingSpace,
    options: FitOptions,
) -> Result<AlignedPairs> {
    if src.dim() != tgt.dim() {
        return Err(Error::DimensionMismatch {
            expected: src.dim(),
            got: tgt.dim(),
        });
    }
    let d = src.dim();
    let mut xs = Vec::new();
    let mut xt = Vec::new();
    let mut skipped = 0;
    for (s, t) in &lexicon.pairs {
        match (src.get(s), tgt.get(t)) {
            (Some(a), Some(b)) => {
                xs.push(prepare(a, options));
                xt.push(prepare(b, options));
            }
            _ => skipped += 1,
        }
    }
    if skipped > 0 {
        log::info!("{skipped} of {} lexicon pairs unresolvable, skipped", lexicon.len());
    }
    if xs.is_empty() {
        return Err(Error::NoResolvablePairs);
    }
    Ok(AlignedPairs {
        source: Matrix::from_rows(&xs, d)?,
        target: Matrix::from_rows(&xt, d)?,
        skipped,
    })
}

fn prepare(v: &[f64], options: FitOptions) -> Vec<f64> {
    let len = norm(v);
    if options.normalize && len > 0.0 {
        v.iter().map(|x| x / len).collect()
    } else {
        v.to_vec()
    }
}

/// Orthogonal Procrustes on stacked pairs: `W = U Vᵀ` from the SVD of `X_srcᵀ X_tgt`.
pub fn fit_clp_pairs(pairs: &AlignedPairs) -> Result<LinearTransform> {
    let n = pairs.len();
    if n == 0 {
        return Err(Error::NoResolvablePairs);
    }
    let d = pairs.source.cols();
    if n < d {
        log::warn!("fitting CLP on {n} pairs in dimension {d}; the solution is underdetermined");
    }
    let cross = pairs.source.t_matmul(&pairs.target)?;
    let svd = svd_square(&cross)?;
    let matrix = svd.u.matmul(&svd.v.transpose())?;
    Ok(LinearTransform::Clp {
        matrix,
        fitted_on: n,
    })
}

/// Dominant right singular vector of the difference rows `X_src − X_tgt`.
pub fn fit_umd_pairs(pairs: &AlignedPairs) -> Result<LinearTransform> {
    let n = pairs.len();
    if n < 2 {
        return Err(Error::TooFewPairs { needed: 2, found: n });
    }
    let q = pairs.source.sub(&pairs.target)?;
    let scale = pairs.source.frobenius_norm().max(pairs.target.frobenius_norm()).max(1.0);
    if q.frobenius_norm() <= 1e-12 * scale {
        return Err(Error::NoMisalignment);
    }
    let gram = q.t_matmul(&q)?;
    let mut direction = dominant_eigenvector(&gram).ok_or(Error::NoMisalignment)?;
    let len = norm(&direction);
    direction.iter_mut().for_each(|x| *x /= len);
    let lead = direction
        .iter()
        .enumerate()
        .max_by(|(i, a), (j, b)| a.abs().total_cmp(&b.abs()).then(j.cmp(i)))
        .map(|(_, x)| *x)
        .unwrap_or(0.0);
    if lead < 0.0 {
        direction.iter_mut().for_each(|x| *x = -*x);
    }
    Ok(LinearTransform::Umd {
        direction,
        fitted_on: n,
    })
}

pub fn fit_clp(
    lexicon: &BilingualLexicon,
    src: &EmbeddingSpace,
    tgt: &EmbeddingSpace,
) -> Result<LinearTransform> {
    fit_clp_pairs(&resolve_pairs(lexicon, src, tgt, FitOptions::default())?)
}

pub fn fit_umd(
    lexicon: &BilingualLexicon,
    src: &EmbeddingSpace,
    tgt: &EmbeddingSpace,
) -> Result<LinearTransform> {
    fit_umd_pairs(&resolve_pairs(lexicon, src, tgt, FitOptions::default())?)
}

/// Fits `steps` (application order) one after another, each on the pairs
/// mapped by its predecessors.
pub fn fit_pipeline_pairs(steps: &[RemapKind], pairs: &AlignedPairs) -> Result<TransformPipeline> {
    if steps.is_empty() {
        return Err(Error::EmptyPipeline);
    }
    let mut fitted = Vec::with_capacity(steps.len());
    let mut cur = pairs.clone();
    for (i, kind) in steps.iter().enumerate() {
        let step = match kind {
            RemapKind::Clp => fit_clp_pairs(&cur)?,
            RemapKind::Umd => fit_umd_pairs(&cur)?,
        };
        if i + 1 < steps.len() {
            cur = cur.mapped(&step)?;
        }
        fitted.push(step);
    }
    TransformPipeline::new(fitted)
}

pub fn fit_pipeline(
    spec: &PipelineSpec,
    lexicon: &BilingualLexicon,
    src: &EmbeddingSpace,
    tgt: &EmbeddingSpace,
    options: FitOptions,
) -> Result<TransformPipeline> {
    let pairs = resolve_pairs(lexicon, src, tgt, options)?;
    fit_pipeline_pairs(spec.application_order(), &pairs)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn umd(direction: Vec<f64>) -> LinearTransform {
        LinearTransform::Umd {
            direction,
            fitted_on: 2,
        }
    }

    #[test]
    fn spec_parsing_follows_composition_order() {
        let spec: PipelineSpec = "clp.umd".parse().unwrap();
        assert_eq!(spec.application_order(), &[RemapKind::Umd, RemapKind::Clp]);
        assert_eq!(spec.to_string(), "clp.umd");
        assert!("xyz".parse::<PipelineSpec>().is_err());
        assert!("".parse::<PipelineSpec>().is_err());
        assert!("clp..umd".parse::<PipelineSpec>().is_err());
        assert!(PipelineSpec::from_application_order(vec![]).is_err());
    }

    #[test]
    fn identity_clp_is_noop() {
        let t = LinearTransform::Clp {
            matrix: Matrix::identity(3),
            fitted_on: 3,
        };
        let v = [1.5, -2.0, 0.25];
        assert_eq!(t.apply(&v, Side::Source).unwrap(), v);
        assert_eq!(t.apply(&v, Side::Target).unwrap(), v);
    }

    #[test]
    fn clp_leaves_target_untouched() {
        let t = LinearTransform::Clp {
            matrix: Matrix::from_vec(2, 2, vec![0.0, 1.0, -1.0, 0.0]).unwrap(),
            fitted_on: 2,
        };
        assert_eq!(t.apply(&[1.0, 0.0], Side::Source).unwrap(), vec![0.0, 1.0]);
        assert_eq!(t.apply(&[1.0, 0.0], Side::Target).unwrap(), vec![1.0, 0.0]);
    }

    #[test]
    fn umd_makes_unit_vectors_orthogonal() {
        let s = 1.0 / 3f64.sqrt();
        let t = umd(vec![s, s, s]);
        let v = [0.6, 0.0, 0.8];
        let out = t.apply(&v, Side::Target).unwrap();
        assert!(dot(&out, &[s, s, s]).abs() < 1e-12);
    }

    #[test]
    fn umd_is_scale_sensitive() {
        let t = umd(vec![0.0, 1.0]);
        assert_eq!(t.apply(&[0.0, 2.0], Side::Source).unwrap(), vec![0.0, 1.0]);
        assert_eq!(t.apply(&[0.0, 0.0], Side::Source).unwrap(), vec![0.0, 0.0]);
    }

    #[test]
    fn apply_checks_dimension() {
        let t = umd(vec![0.0, 1.0]);
        assert!(matches!(
            t.apply(&[1.0, 2.0, 3.0], Side::Source),
            Err(Error::DimensionMismatch { .. })
        ));
    }

    fn pairs(src: Vec<Vec<f64>>, tgt: Vec<Vec<f64>>) -> AlignedPairs {
        let d = src[0].len();
        AlignedPairs {
            source: Matrix::from_rows(&src, d).unwrap(),
            target: Matrix::from_rows(&tgt, d).unwrap(),
            skipped: 0,
        }
    }

    #[test]
    fn clp_on_identical_pairs_is_identity() {
        let rows = vec![vec![1.0, 2.0, 0.5], vec![-1.0, 0.3, 2.0], vec![0.2, -0.7, 1.1], vec![3.0, 0.0, -1.0]];
        let p = pairs(rows.clone(), rows);
        let LinearTransform::Clp { matrix, .. } = fit_clp_pairs(&p).unwrap() else {
            unreachable!()
        };
        assert!(matrix.sub(&Matrix::identity(3)).unwrap().frobenius_norm() <= 1e-8);
    }

    #[test]
    fn umd_rank_one_recovers_axis() {
        let src = vec![vec![1.0, 2.0, 3.0], vec![0.5, 0.5, 0.5], vec![4.0, 0.0, 1.0]];
        let mut tgt = src.clone();
        tgt[1][0] -= 0.7;
        let LinearTransform::Umd { direction, .. } = fit_umd_pairs(&pairs(src, tgt)).unwrap() else {
            unreachable!()
        };
        assert_abs_diff_eq!(direction[0], 1.0, epsilon = 1e-6);
        assert_abs_diff_eq!(direction[1], 0.0, epsilon = 1e-6);
    }

    #[test]
    fn umd_without_misalignment_errors() {
        let rows = vec![vec![1.0, 2.0], vec![3.0, 4.0]];
        assert!(matches!(
            fit_umd_pairs(&pairs(rows.clone(), rows)),
            Err(Error::NoMisalignment)
        ));
    }

    #[test]
    fn umd_needs_two_pairs() {
        let p = pairs(vec![vec![1.0, 0.0]], vec![vec![0.0, 1.0]]);
        assert!(matches!(fit_umd_pairs(&p), Err(Error::TooFewPairs { .. })));
    }

    #[test]
    fn unresolvable_pairs_are_skipped() {
        let src = EmbeddingSpace::from_rows(2, vec![("hund".into(), vec![1.0, 0.0])]).unwrap();
        let tgt = EmbeddingSpace::from_rows(2, vec![("dog".into(), vec![0.0, 1.0])]).unwrap();
        let lex = BilingualLexicon::new(
            vec![("hund".into(), "dog".into()), ("katze".into(), "cat".into())],
            LexiconKind::Word,
        );
        let p = resolve_pairs(&lex, &src, &tgt, FitOptions::default()).unwrap();
        assert_eq!((p.len(), p.skipped), (1, 1));
        let none = BilingualLexicon::new(vec![("katze".into(), "cat".into())], LexiconKind::Word);
        assert!(matches!(
            resolve_pairs(&none, &src, &tgt, FitOptions::default()),
            Err(Error::NoResolvablePairs)
        ));
    }

    #[test]
    fn pipeline_name_reads_outermost_first() {
        let p = TransformPipeline::new(vec![
            umd(vec![1.0, 0.0]),
            LinearTransform::Clp {
                matrix: Matrix::identity(2),
                fitted_on: 2,
            },
        ])
        .unwrap();
        assert_eq!(p.name(), "CLP∘UMD");
        assert_eq!(p.spec().to_string(), "clp.umd");
        assert!(TransformPipeline::new(vec![]).is_err());
    }
}
