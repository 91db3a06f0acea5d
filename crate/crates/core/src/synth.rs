//! Planted bilingual worlds for tests, benchmarks and the guide.
//!
//! Word `i` of the source language translates to word `i` of the target
//! language. Source vectors are Gaussian; target vectors are the source
//! vectors rotated by a random orthogonal `R` plus isotropic noise. The two
//! languages share a class grammar but order it differently, so the
//! word-by-word rendering of a source sentence is fluent-looking nonsense in
//! the target language.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};

use crate::error::Result;
use crate::eval::EvaluationRecord;
use crate::io::DatasetTable;
use crate::remap::linalg::Matrix;
use crate::remap::{BilingualLexicon, LexiconKind};
use crate::vecspace::EmbeddingSpace;

#[derive(Debug, Clone, PartialEq)]
pub struct WorldConfig {
    pub dim: usize,
    pub vocab: usize,
    /// Words that occur in sentences; the rest live only in the spaces.
    pub active_vocab: usize,
    pub lexicon_size: usize,
    /// Fraction of lexicon entries whose target is a random word.
    pub lexicon_noise: f64,
    /// Standard deviation of the target-side noise, per unit of vector norm.
    pub embedding_noise: f64,
    pub segments: usize,
    pub systems: usize,
    pub max_level: usize,
    /// Probability that a corruption step is a swap rather than a substitution.
    pub scramble_rate: f64,
    pub lm_sentences: usize,
    pub seed: u64,
}

impl Default for WorldConfig {
    fn default() -> Self {
        WorldConfig {
            dim: 32,
            vocab: 2500,
            active_vocab: 400,
            lexicon_size: 2000,
            lexicon_noise: 0.4,
            embedding_noise: 0.3,
            segments: 300,
            systems: 3,
            max_level: 4,
            scramble_rate: 0.5,
            lm_sentences: 4000,
            seed: 11,
        }
    }
}

#[derive(Debug, Clone)]
pub struct PlantedWorld {
    pub source: EmbeddingSpace,
    pub target: EmbeddingSpace,
    pub rotation: Matrix,
    pub lexicon: BilingualLexicon,
    pub dataset: DatasetTable,
    pub lm_corpus: Vec<Vec<String>>,
}

/// Haar-distributed orthogonal matrix: Gram-Schmidt on a Gaussian matrix.
pub fn random_rotation(d: usize, rng: &mut impl Rng) -> Matrix {
    let normal = Normal::new(0.0, 1.0).expect("valid normal");
    loop {
        let mut rows: Vec<Vec<f64>> = Vec::with_capacity(d);
        let mut ok = true;
        for _ in 0..d {
            let mut v: Vec<f64> = (0..d).map(|_| normal.sample(rng)).collect();
            for _ in 0..2 {
                for r in &rows {
                    let p: f64 = r.iter().zip(&v).map(|(a, b)| a * b).sum();
                    v.iter_mut().zip(r).for_each(|(x, y)| *x -= p * y);
                }
            }
            let len = v.iter().map(|x| x * x).sum::<f64>().sqrt();
            if len < 1e-8 {
                ok = false;
                break;
            }
            v.iter_mut().for_each(|x| *x /= len);
            rows.push(v);
        }
        if ok {
            return Matrix::from_rows(&rows, d).expect("square");
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Class {
    Det,
    Verb,
    Adj,
    Noun,
}

struct Grammar {
    det: Vec<usize>,
    verb: Vec<usize>,
    adj: Vec<usize>,
    noun: Vec<usize>,
}

impl Grammar {
    fn new(active: usize) -> Self {
        let det_end = (active / 50).max(1);
        let verb_end = det_end + (active / 8).max(1);
        let adj_end = verb_end + (active / 5).max(1);
        Grammar {
            det: (0..det_end).collect(),
            verb: (det_end..verb_end).collect(),
            adj: (verb_end..adj_end).collect(),
            noun: (adj_end..active).collect(),
        }
    }

    fn pick(&self, class: Class, rng: &mut impl Rng) -> usize {
        let words = match class {
            Class::Det => &self.det,
            Class::Verb => &self.verb,
            Class::Adj => &self.adj,
            Class::Noun => &self.noun,
        };
        // Zipf-like: rank r drawn with weight 1 / (r + 1).
        let total: f64 = (1..=words.len()).map(|r| 1.0 / r as f64).sum();
        let mut u = rng.random::<f64>() * total;
        for (r, w) in words.iter().enumerate() {
            u -= 1.0 / (r + 1) as f64;
            if u <= 0.0 {
                return *w;
            }
        }
        *words.last().expect("non-empty class")
    }

    /// Target order `DET ADJ NOUN VERB DET [ADJ] NOUN` paired with the
    /// source order `DET NOUN ADJ DET NOUN [ADJ] VERB`.
    fn sentence(&self, rng: &mut impl Rng) -> (Vec<usize>, Vec<usize>) {
        let d1 = self.pick(Class::Det, rng);
        let a1 = self.pick(Class::Adj, rng);
        let n1 = self.pick(Class::Noun, rng);
        let v = self.pick(Class::Verb, rng);
        let d2 = self.pick(Class::Det, rng);
        let n2 = self.pick(Class::Noun, rng);
        let a2 = rng.random_bool(0.5).then(|| self.pick(Class::Adj, rng));
        let mut tgt = vec![d1, a1, n1, v, d2];
        tgt.extend(a2);
        tgt.push(n2);
        let mut src = vec![d1, n1, a1, d2, n2];
        src.extend(a2);
        src.push(v);
        (src, tgt)
    }
}

pub fn source_word(i: usize) -> String {
    format!("s{i}")
}

pub fn target_word(i: usize) -> String {
    format!("t{i}")
}

/// Applies `level` corruption steps: each swaps two tokens with probability
/// `scramble_rate` and otherwise replaces one with a random active word.
fn corrupt(sentence: &[usize], level: usize, cfg: &WorldConfig, rng: &mut impl Rng) -> Vec<usize> {
    let mut out = sentence.to_vec();
    for _ in 0..level {
        let i = rng.random_range(0..out.len());
        if rng.random_bool(cfg.scramble_rate) {
            let mut j = rng.random_range(0..out.len() - 1);
            if j >= i {
                j += 1;
            }
            out.swap(i, j);
        } else {
            let mut w = rng.random_range(0..cfg.active_vocab);
            while w == out[i] {
                w = rng.random_range(0..cfg.active_vocab);
            }
            out[i] = w;
        }
    }
    out
}

pub fn planted_world(cfg: &WorldConfig) -> Result<PlantedWorld> {
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let d = cfg.dim;
    let rotation = random_rotation(d, &mut rng);
    let unit = Normal::new(0.0, 1.0 / (d as f64).sqrt()).expect("valid normal");

    let src_rows: Vec<Vec<f64>> = (0..cfg.vocab)
        .map(|_| (0..d).map(|_| unit.sample(&mut rng)).collect())
        .collect();
    let tgt_rows: Vec<Vec<f64>> = src_rows
        .iter()
        .map(|x| {
            let mut y = rotation.left_apply(x).expect("dim matches");
            y.iter_mut()
                .for_each(|v| *v += cfg.embedding_noise * unit.sample(&mut rng));
            y
        })
        .collect();
    let source = EmbeddingSpace::from_rows(d, (0..cfg.vocab).map(source_word).zip(src_rows))?;
    let target = EmbeddingSpace::from_rows(d, (0..cfg.vocab).map(target_word).zip(tgt_rows))?;

    let mut words: Vec<usize> = (0..cfg.vocab).collect();
    words.shuffle(&mut rng);
    let pairs = words
        .iter()
        .take(cfg.lexicon_size)
        .map(|&i| {
            let t = if rng.random_bool(cfg.lexicon_noise) {
                rng.random_range(0..cfg.vocab)
            } else {
                i
            };
            (source_word(i), target_word(t))
        })
        .collect();
    let lexicon = BilingualLexicon::new(pairs, LexiconKind::Word);

    let grammar = Grammar::new(cfg.active_vocab);
    let render = |ids: &[usize], f: fn(usize) -> String| ids.iter().map(|&i| f(i)).collect::<Vec<_>>();
    let mut records = Vec::with_capacity(cfg.segments * cfg.systems);
    for seg in 0..cfg.segments {
        let (src, tgt) = grammar.sentence(&mut rng);
        for sys in 0..cfg.systems {
            let level = rng.random_range(0..=cfg.max_level);
            let hyp = corrupt(&tgt, level, cfg, &mut rng);
            records.push(EvaluationRecord {
                system_id: format!("sys{sys}"),
                segment_id: format!("seg{seg:04}"),
                source: render(&src, source_word),
                hypothesis: render(&hyp, target_word),
                reference: Some(render(&tgt, target_word)),
                w2w: Some(render(&src, target_word)),
                human_score: Some(-(level as f64)),
            });
        }
    }
    let dataset = DatasetTable {
        language_pair: "sx-tx".to_string(),
        records,
        path: None,
    };
    let lm_corpus = (0..cfg.lm_sentences)
        .map(|_| render(&grammar.sentence(&mut rng).1, target_word))
        .collect();

    Ok(PlantedWorld {
        source,
        target,
        rotation,
        lexicon,
        dataset,
        lm_corpus,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rotation_is_orthogonal() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let r = random_rotation(16, &mut rng);
        assert!(r.orthogonality_defect() < 1e-12);
    }

    #[test]
    fn world_shapes() {
        let cfg = WorldConfig {
            vocab: 300,
            active_vocab: 100,
            lexicon_size: 200,
            segments: 10,
            lm_sentences: 20,
            ..WorldConfig::default()
        };
        let w = planted_world(&cfg).unwrap();
        assert_eq!(w.source.len(), 300);
        assert_eq!(w.lexicon.len(), 200);
        assert_eq!(w.dataset.records.len(), 30);
        assert_eq!(w.lm_corpus.len(), 20);
        let r = &w.dataset.records[0];
        let mut a = r.reference.clone().unwrap();
        let mut b = r.w2w.clone().unwrap();
        a.sort();
        b.sort();
        assert_eq!(a, b);
    }

    #[test]
    fn deterministic() {
        let cfg = WorldConfig {
            vocab: 200,
            active_vocab: 100,
            lexicon_size: 100,
            segments: 5,
            lm_sentences: 5,
            ..WorldConfig::default()
        };
        let a = planted_world(&cfg).unwrap();
        let b = planted_world(&cfg).unwrap();
        assert_eq!(a.dataset, b.dataset);
        assert_eq!(a.lexicon, b.lexicon);
    }
}
