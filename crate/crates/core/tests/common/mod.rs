#![allow(dead_code)]

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use reffree::remap::linalg::Matrix;
use reffree::vecspace::EmbeddingSpace;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn space(dim: usize, rows: &[(&str, &[f64])]) -> EmbeddingSpace {
    EmbeddingSpace::from_rows(dim, rows.iter().map(|(t, v)| (t.to_string(), v.to_vec()))).unwrap()
}

pub fn random_vec(d: usize, rng: &mut impl Rng) -> Vec<f64> {
    (0..d).map(|_| rng.random_range(-1.0..1.0)).collect()
}

pub fn random_matrix(rows: usize, cols: usize, rng: &mut impl Rng) -> Matrix {
    Matrix::from_vec(rows, cols, (0..rows * cols).map(|_| rng.random_range(-1.0..1.0)).collect()).unwrap()
}

/// All permutations of `0..n` (Heap's algorithm).
pub fn permutations(n: usize) -> Vec<Vec<usize>> {
    fn heap(k: usize, a: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if k <= 1 {
            out.push(a.clone());
            return;
        }
        for i in 0..k {
            heap(k - 1, a, out);
            let j = if k.is_multiple_of(2) { i } else { 0 };
            a.swap(j, k - 1);
        }
    }
    let mut a: Vec<usize> = (0..n).collect();
    let mut out = Vec::new();
    heap(n, &mut a, &mut out);
    out
}

/// Minimum over permutation matchings of `Σ C[i][σ(i)] / n`.
pub fn brute_force_assignment(cost: &[f64], n: usize) -> f64 {
    permutations(n)
        .iter()
        .map(|p| p.iter().enumerate().map(|(i, &j)| cost[i * n + j]).sum::<f64>() / n as f64)
        .fold(f64::INFINITY, f64::min)
}

pub fn euclid(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum::<f64>().sqrt()
}

pub fn toks(s: &str) -> Vec<String> {
    s.split_whitespace().map(str::to_string).collect()
}
