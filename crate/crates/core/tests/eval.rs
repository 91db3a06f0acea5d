mod common;

use approx::assert_abs_diff_eq;
use common::{rng, toks};
use rand::Rng;
use reffree::eval::{
    dictionary_size_sweep, kendall, pearson, preference_diff, segment_correlation, segment_vectors, sweep_samples,
    system_correlation, w2w_statistic, w2w_triples, EvaluationRecord, Statistic, SweepSetup, W2wTriple,
    DEFAULT_SWEEP_SEED,
};
use reffree::metrics::{score_batch, MetricConfig, Scorer, ScoreComponents, SegmentScore, SegmentStatus};
use reffree::remap::{fit_pipeline, FitOptions, PipelineSpec};
use reffree::synth::{planted_world, WorldConfig};
use reffree::Error;

fn scored(sys: &str, seg: &str, value: f64) -> SegmentScore {
    SegmentScore {
        system_id: sys.into(),
        segment_id: seg.into(),
        status: SegmentStatus::Scored(ScoreComponents {
            similarity: value,
            base_similarity: value,
            lm_score: None,
            lm_weight: 0.0,
        }),
    }
}

fn unscorable(sys: &str, seg: &str) -> SegmentScore {
    SegmentScore {
        system_id: sys.into(),
        segment_id: seg.into(),
        status: SegmentStatus::Unscorable("test".into()),
    }
}

fn rec(sys: &str, seg: &str, human: Option<f64>) -> EvaluationRecord {
    EvaluationRecord {
        system_id: sys.into(),
        segment_id: seg.into(),
        source: toks("x"),
        hypothesis: toks("y"),
        reference: None,
        w2w: None,
        human_score: human,
    }
}

#[test]
fn pearson_examples() {
    assert_eq!(pearson(&[1.0, 2.0, 3.0], &[1.0, 2.0, 3.0]).unwrap(), 1.0);
    assert_eq!(pearson(&[1.0, 2.0, 3.0], &[3.0, 2.0, 1.0]).unwrap(), -1.0);
    assert_abs_diff_eq!(pearson(&[1.0, 2.0, 3.0, 4.0], &[2.0, 1.0, 4.0, 3.0]).unwrap(), 0.6, epsilon = 1e-12);
    assert!(matches!(pearson(&[1.0, 1.0], &[1.0, 2.0]), Err(Error::ZeroVariance)));
    assert!(matches!(pearson(&[1.0, 2.0], &[1.0]), Err(Error::LengthMismatch { .. })));
    assert!(matches!(pearson(&[1.0], &[1.0]), Err(Error::InsufficientData { .. })));
}

#[test]
fn kendall_examples() {
    assert_eq!(kendall(&[1.0, 2.0, 3.0, 4.0], &[10.0, 20.0, 30.0, 40.0]).unwrap(), 1.0);
    assert_eq!(kendall(&[1.0, 2.0, 3.0, 4.0], &[4.0, 3.0, 2.0, 1.0]).unwrap(), -1.0);
    assert_abs_diff_eq!(kendall(&[1.0, 2.0, 3.0, 4.0], &[1.0, 3.0, 2.0, 4.0]).unwrap(), 2.0 / 3.0, epsilon = 1e-12);
    assert!(matches!(kendall(&[1.0, 1.0, 1.0], &[1.0, 2.0, 3.0]), Err(Error::AllTied)));
    assert!(kendall(&[1.0, 2.0], &[1.0, 2.0, 3.0]).is_err());
}

#[test]
fn kendall_tau_b_with_ties() {
    // a: (1,1,2,3), b: (1,2,2,3). Pairs: 6. Concordant 4, discordant 0,
    // tied only in a: 1, tied only in b: 1.  tau-b = 4 / sqrt(5 * 5).
    let t = kendall(&[1.0, 1.0, 2.0, 3.0], &[1.0, 2.0, 2.0, 3.0]).unwrap();
    assert_abs_diff_eq!(t, 0.8, epsilon = 1e-12);
}

#[test]
fn segment_correlation_contract() {
    let records: Vec<_> = (0..10).map(|i| rec("A", &i.to_string(), Some(i as f64))).collect();
    let same: Vec<_> = (0..10).map(|i| scored("A", &i.to_string(), i as f64)).collect();
    let neg: Vec<_> = (0..10).map(|i| scored("A", &i.to_string(), -(i as f64))).collect();
    assert_eq!(segment_correlation(&same, &records, Statistic::Pearson).unwrap().value, 1.0);
    assert_eq!(segment_correlation(&neg, &records, Statistic::Pearson).unwrap().value, -1.0);
    assert_eq!(segment_correlation(&neg, &records, Statistic::Kendall).unwrap().value, -1.0);

    let mut partial = same.clone();
    partial[3] = unscorable("A", "3");
    let c = segment_correlation(&partial, &records, Statistic::Pearson).unwrap();
    assert_eq!((c.n, c.excluded), (9, 1));

    let few = vec![scored("A", "0", 1.0)];
    assert!(matches!(
        segment_correlation(&few, &records, Statistic::Pearson),
        Err(Error::InsufficientData { .. })
    ));
}

#[test]
fn segment_correlation_matches_recomputation() {
    let mut r = rng(1);
    let mut records = Vec::new();
    let mut scores = Vec::new();
    for sys in ["A", "B", "C"] {
        for i in 0..100 {
            let h: f64 = r.random_range(-2.0..2.0);
            records.push(rec(sys, &i.to_string(), Some(h)));
            scores.push(scored(sys, &i.to_string(), h + r.random_range(-1.0..1.0)));
        }
    }
    records.push(rec("A", "no-human", None));
    scores.push(scored("A", "no-human", 5.0));
    let (m, h, excluded) = segment_vectors(&scores, &records);
    assert_eq!((m.len(), excluded), (300, 0));
    for stat in [Statistic::Pearson, Statistic::Kendall] {
        let c = segment_correlation(&scores, &records, stat).unwrap();
        assert_eq!(c.value, stat.compute(&m, &h).unwrap());
        assert_eq!(c.n, 300);
    }
    // Aligned by key, not position.
    let mut shuffled = scores.clone();
    shuffled.reverse();
    assert_eq!(
        segment_correlation(&shuffled, &records, Statistic::Pearson).unwrap().value,
        segment_correlation(&scores, &records, Statistic::Pearson).unwrap().value
    );
}

#[test]
fn system_correlation_contract() {
    let mut r = rng(2);
    let mut records = Vec::new();
    let mut scores = Vec::new();
    for q in 0..5 {
        let sys = format!("sys{q}");
        for i in 0..40 {
            let h = q as f64 + r.random_range(-0.5..0.5);
            records.push(rec(&sys, &i.to_string(), Some(h)));
            scores.push(scored(&sys, &i.to_string(), 0.1 * q as f64 + r.random_range(-0.05..0.05)));
        }
    }
    let c = system_correlation(&scores, &records, Statistic::Pearson).unwrap();
    assert!(c.value >= 0.99, "{}", c.value);
    assert_eq!(c.n, 5);

    // A system whose segments are all unscorable is excluded and reported.
    let mut broken = scores.clone();
    for s in broken.iter_mut().filter(|s| s.system_id == "sys4") {
        *s = unscorable(&s.system_id, &s.segment_id);
    }
    let c = system_correlation(&broken, &records, Statistic::Pearson).unwrap();
    assert_eq!((c.n, c.excluded), (4, 1));

    let two: Vec<_> = records.iter().filter(|r| r.system_id < "sys2".into()).cloned().collect();
    assert_abs_diff_eq!(system_correlation(&scores, &two, Statistic::Pearson).unwrap().value.abs(), 1.0, epsilon = 1e-12);
    let one: Vec<_> = records.iter().filter(|r| r.system_id == "sys0").cloned().collect();
    assert!(system_correlation(&scores, &one, Statistic::Pearson).is_err());
}

fn stub(table: Vec<(&'static str, f64)>) -> impl Fn(&[String], &[String]) -> reffree::Result<f64> {
    move |_x: &[String], y: &[String]| {
        let key = y.join(" ");
        table
            .iter()
            .find(|(k, _)| *k == key)
            .map(|(_, v)| *v)
            .ok_or(Error::Unscorable(key))
    }
}

#[test]
fn preference_diff_examples() {
    let m = stub(vec![("good", 0.9), ("bad", 0.2)]);
    let (x, g, b) = (toks("src"), toks("good"), toks("bad"));
    assert_eq!(preference_diff(&m, &x, &g, &g).unwrap(), 0.0);
    let d = preference_diff(&m, &x, &g, &b).unwrap();
    assert_eq!(d, -preference_diff(&m, &x, &b, &g).unwrap());
    assert!(d > 0.0);
    assert!(preference_diff(&m, &x, &g, &toks("missing")).is_err());
}

fn triples(n: usize) -> Vec<W2wTriple> {
    (0..n)
        .map(|i| W2wTriple {
            source: toks(&format!("x{i}")),
            literal: toks(&format!("lit{i}")),
            reference: toks(&format!("ref{i}")),
        })
        .collect()
}

#[test]
fn w2w_examples() {
    let ts = triples(20);
    // 7 of 20 literal translations win.
    let score = |_x: &[String], y: &[String]| -> reffree::Result<f64> {
        let s = &y[0];
        let i: usize = s.trim_start_matches(|c: char| c.is_alphabetic()).parse().unwrap();
        Ok(match (s.starts_with("lit"), i < 7) {
            (true, true) => 1.0,
            (true, false) => -1.0,
            (false, _) => 0.0,
        })
    };
    let r = w2w_statistic(&score, &ts).unwrap();
    assert_eq!(r.value, 0.35);
    assert_eq!((r.n, r.preferred, r.excluded), (20, 7, 0));
    let affine = |x: &[String], y: &[String]| score(x, y).map(|s| 3.5 * s - 12.0);
    assert_eq!(w2w_statistic(&affine, &ts).unwrap().value, 0.35);

    let prefers_ref = |_x: &[String], y: &[String]| -> reffree::Result<f64> { Ok(if y[0].starts_with("ref") { 1.0 } else { 0.0 }) };
    assert_eq!(w2w_statistic(&prefers_ref, &ts).unwrap().value, 0.0);
    let prefers_lit = |_x: &[String], y: &[String]| -> reffree::Result<f64> { Ok(if y[0].starts_with("lit") { 1.0 } else { 0.0 }) };
    assert_eq!(w2w_statistic(&prefers_lit, &ts).unwrap().value, 1.0);
    let tie = |_x: &[String], _y: &[String]| -> reffree::Result<f64> { Ok(0.5) };
    assert_eq!(w2w_statistic(&tie, &ts).unwrap().value, 0.0);
}

#[test]
fn w2w_drops_unscorable_triples() {
    let ts = triples(4);
    let m = |_x: &[String], y: &[String]| -> reffree::Result<f64> {
        match y[0].as_str() {
            "lit0" => Err(Error::Unscorable("oov".into())),
            s if s.starts_with("lit") => Ok(1.0),
            _ => Ok(0.0),
        }
    };
    let r = w2w_statistic(&m, &ts).unwrap();
    assert_eq!((r.n, r.excluded, r.preferred), (3, 1, 3));
    let none = |_x: &[String], _y: &[String]| -> reffree::Result<f64> { Err(Error::Unscorable("x".into())) };
    assert!(w2w_statistic(&none, &ts).is_err());
}

#[test]
fn w2w_triples_from_records() {
    let mut a = rec("A", "1", None);
    a.w2w = Some(toks("lit"));
    a.reference = Some(toks("ref"));
    let mut b = a.clone();
    b.system_id = "B".into();
    let c = rec("A", "2", None);
    assert_eq!(w2w_triples(&[a, b, c]).len(), 1);
}

#[test]
fn sweep_samples_nest() {
    let s = sweep_samples(50, &[5, 20, 50], 9).unwrap();
    assert!(s[0].iter().all(|i| s[1].contains(i)));
    assert!(s[1].iter().all(|i| s[2].contains(i)));
    assert_eq!(s[2], (0..50).collect::<Vec<_>>());
    assert!(s.iter().all(|v| v.windows(2).all(|w| w[0] < w[1])));
    assert_eq!(sweep_samples(50, &[5, 20], 9).unwrap(), sweep_samples(50, &[5, 20], 9).unwrap());
    assert!(sweep_samples(50, &[0], 9).is_err());
    assert!(sweep_samples(50, &[51], 9).is_err());
}

#[test]
fn sweep_on_planted_world() {
    let cfg = WorldConfig {
        vocab: 1200,
        lexicon_size: 1000,
        segments: 120,
        systems: 2,
        lm_sentences: 10,
        ..WorldConfig::default()
    };
    let w = planted_world(&cfg).unwrap();
    let records = &w.dataset.records;
    let spec: PipelineSpec = "clp".parse().unwrap();
    let config = MetricConfig::mover(2);
    let setup = SweepSetup {
        lexicon: &w.lexicon,
        src: &w.source,
        tgt: &w.target,
        records,
        config: &config,
        pipeline: &spec,
        fit: FitOptions::default(),
        statistic: Statistic::Pearson,
        seed: DEFAULT_SWEEP_SEED,
        workers: 0,
        external: None,
    };
    let points = dictionary_size_sweep(&[100, 1000], &setup).unwrap();
    assert!(points[1].correlation.value >= points[0].correlation.value - 0.05);

    // Full size equals the non-sweep pipeline exactly.
    let pipe = fit_pipeline(&spec, &w.lexicon, &w.source, &w.target, FitOptions::default()).unwrap();
    let full = config.clone().with_pipeline(pipe);
    let scorer = Scorer::new(&w.source, &w.target, &full).unwrap();
    let direct = segment_correlation(&score_batch(records, &scorer, 1), records, Statistic::Pearson).unwrap();
    assert_eq!(points[1].correlation, direct);

    assert!(dictionary_size_sweep(&[0], &setup).is_err());
    assert!(dictionary_size_sweep(&[1001], &setup).is_err());
}

#[test]
fn statistic_names_parse() {
    assert_eq!("pearson".parse::<Statistic>().unwrap(), Statistic::Pearson);
    assert_eq!("kendall".parse::<Statistic>().unwrap(), Statistic::Kendall);
    assert!("spearman".parse::<Statistic>().is_err());
    assert_eq!(Statistic::Kendall.to_string(), "kendall");
}
