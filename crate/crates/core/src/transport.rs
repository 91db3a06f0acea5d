//! Exact Word Mover's Distance.
//!
//! The balanced transportation problem is solved with the transportation
//! simplex method (northwest-corner start, MODI potentials, Dantzig pricing
//! with a Bland fallback against degenerate cycling). Rows and columns with
//! zero mass are taken out before solving and come back as zero flows.

use std::collections::VecDeque;

use crate::error::{Error, Result};
use crate::vecspace::NgramSequence;

/// Dense row-major matrix of pairwise Euclidean distances.
#[derive(Debug, Clone, PartialEq)]
pub struct CostMatrix {
    rows: usize,
    cols: usize,
    data: Vec<f64>,
}

impl CostMatrix {
    pub fn new(rows: usize, cols: usize, data: Vec<f64>) -> Result<Self> {
        if data.len() != rows * cols {
            return Err(Error::LengthMismatch {
                left: rows * cols,
                right: data.len(),
            });
        }
        if let Some(x) = data.iter().find(|x| !x.is_finite() || **x < 0.0) {
            return Err(Error::InvalidArgument(format!(
                "cost entries must be finite and nonnegative, got {x}"
            )));
        }
        Ok(CostMatrix { rows, cols, data })
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.cols + j]
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.data
    }
}

pub(crate) fn euclidean(a: &[f64], b: &[f64]) -> f64 {
    a.iter()
        .zip(b)
        .map(|(x, y)| (x - y) * (x - y))
        .sum::<f64>()
        .sqrt()
}

/// `C[i][j] = ‖a_i − b_j‖₂` over the gram embeddings of both sequences.
pub fn cost_matrix(a: &NgramSequence, b: &NgramSequence) -> Result<CostMatrix> {
    if a.is_empty() || b.is_empty() {
        return Err(Error::EmptySequence);
    }
    if a.dim() != b.dim() {
        return Err(Error::DimensionMismatch {
            expected: a.dim(),
            got: b.dim(),
        });
    }
    let mut data = Vec::with_capacity(a.len() * b.len());
    for ga in a.grams() {
        for gb in b.grams() {
            data.push(euclidean(&ga.embedding, &gb.embedding));
        }
    }
    CostMatrix::new(a.len(), b.len(), data)
}

/// An optimal flow matrix and its cost.
#[derive(Debug, Clone, PartialEq)]
pub struct TransportPlan {
    rows: usize,
    cols: usize,
    flows: Vec<f64>,
    objective: f64,
}

impl TransportPlan {
    pub fn objective(&self) -> f64 {
        self.objective
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.flows[i * self.cols + j]
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn row_sums(&self) -> Vec<f64> {
        self.flows.chunks_exact(self.cols).map(|r| r.iter().sum()).collect()
    }

    pub fn col_sums(&self) -> Vec<f64> {
        (0..self.cols)
            .map(|j| (0..self.rows).map(|i| self.get(i, j)).sum())
            .collect()
    }
}

const MARGINAL_TOLERANCE: f64 = 1e-6;
const BLAND_AFTER_DEGENERATE: usize = 50;

fn check_weights(w: &[f64]) -> Result<f64> {
    if let Some(x) = w.iter().find(|x| !x.is_finite() || **x < 0.0) {
        return Err(Error::InvalidWeight(*x));
    }
    Ok(w.iter().sum())
}

/// Solves `min Σ C_ij F_ij` subject to `F·1 = f_x`, `Fᵀ·1 = f_y`, `F ≥ 0`.
///
/// `f_y` is rescaled to the total of `f_x` before solving, so totals that
/// agree to within `1e-6` are accepted.
pub fn solve_wmd(cost: &CostMatrix, fx: &[f64], fy: &[f64]) -> Result<TransportPlan> {
    if fx.len() != cost.rows {
        return Err(Error::LengthMismatch {
            left: cost.rows,
            right: fx.len(),
        });
    }
    if fy.len() != cost.cols {
        return Err(Error::LengthMismatch {
            left: cost.cols,
            right: fy.len(),
        });
    }
    let sx = check_weights(fx)?;
    let sy = check_weights(fy)?;
    if (sx - sy).abs() > MARGINAL_TOLERANCE {
        return Err(Error::MarginalMismatch { left: sx, right: sy });
    }

    let row_idx: Vec<usize> = (0..fx.len()).filter(|&i| fx[i] > 0.0).collect();
    let col_idx: Vec<usize> = (0..fy.len()).filter(|&j| fy[j] > 0.0).collect();
    let mut flows = vec![0.0; cost.rows * cost.cols];
    if row_idx.is_empty() || col_idx.is_empty() {
        return Ok(TransportPlan {
            rows: cost.rows,
            cols: cost.cols,
            flows,
            objective: 0.0,
        });
    }

    let supply: Vec<f64> = row_idx.iter().map(|&i| fx[i]).collect();
    let scale = sx / sy;
    let demand: Vec<f64> = col_idx.iter().map(|&j| fy[j] * scale).collect();
    let sub_cost: Vec<f64> = row_idx
        .iter()
        .flat_map(|&i| col_idx.iter().map(move |&j| cost.get(i, j)))
        .collect();

    let reduced = Simplex::new(&sub_cost, &supply, &demand).solve()?;
    for (a, &i) in row_idx.iter().enumerate() {
        for (b, &j) in col_idx.iter().enumerate() {
            flows[i * cost.cols + j] = reduced[a * col_idx.len() + b];
        }
    }
    let objective = flows.iter().zip(&cost.data).map(|(f, c)| f * c).sum();
    Ok(TransportPlan {
        rows: cost.rows,
        cols: cost.cols,
        flows,
        objective,
    })
}

/// Word Mover's Distance between two weighted n-gram sequences.
pub fn wmd(a: &NgramSequence, b: &NgramSequence) -> Result<f64> {
    let c = cost_matrix(a, b)?;
    Ok(solve_wmd(&c, a.weights(), b.weights())?.objective())
}

/// Transportation simplex over a strictly positive supply/demand pair.
struct Simplex<'a> {
    m: usize,
    n: usize,
    cost: &'a [f64],
    flow: Vec<f64>,
    basic: Vec<bool>,
    cells: Vec<usize>,
}

impl<'a> Simplex<'a> {
    fn new(cost: &'a [f64], supply: &[f64], demand: &[f64]) -> Self {
        let (m, n) = (supply.len(), demand.len());
        let mut flow = vec![0.0; m * n];
        let mut basic = vec![false; m * n];
        let mut cells = Vec::with_capacity(m + n - 1);
        let mut s = supply.to_vec();
        let mut d = demand.to_vec();
        let (mut i, mut j) = (0, 0);
        // Northwest corner: every step advances exactly one index, so the
        // m + n - 1 cells form a spanning tree even under degeneracy.
        loop {
            let amount = s[i].min(d[j]);
            flow[i * n + j] = amount;
            basic[i * n + j] = true;
            cells.push(i * n + j);
            s[i] -= amount;
            d[j] -= amount;
            if i == m - 1 && j == n - 1 {
                break;
            }
            if j == n - 1 || (i < m - 1 && s[i] <= d[j]) {
                i += 1;
            } else {
                j += 1;
            }
        }
        Simplex {
            m,
            n,
            cost,
            flow,
            basic,
            cells,
        }
    }

    fn adjacency(&self) -> Vec<Vec<(usize, usize)>> {
        // Nodes 0..m are rows, m..m+n are columns; edge payload is the cell.
        let mut adj = vec![Vec::new(); self.m + self.n];
        for &cell in &self.cells {
            let (i, j) = (cell / self.n, cell % self.n);
            adj[i].push((self.m + j, cell));
            adj[self.m + j].push((i, cell));
        }
        adj
    }

    fn potentials(&self, adj: &[Vec<(usize, usize)>]) -> Vec<f64> {
        let mut pot = vec![f64::NAN; self.m + self.n];
        pot[0] = 0.0;
        let mut queue = VecDeque::from([0usize]);
        while let Some(node) = queue.pop_front() {
            for &(next, cell) in &adj[node] {
                if pot[next].is_nan() {
                    pot[next] = self.cost[cell] - pot[node];
                    queue.push_back(next);
                }
            }
        }
        pot
    }

    /// Tree path from `from` to `to` as the list of cells traversed.
    fn tree_path(&self, adj: &[Vec<(usize, usize)>], from: usize, to: usize) -> Vec<usize> {
        let mut parent: Vec<Option<(usize, usize)>> = vec![None; self.m + self.n];
        let mut seen = vec![false; self.m + self.n];
        seen[from] = true;
        let mut queue = VecDeque::from([from]);
        while let Some(node) = queue.pop_front() {
            if node == to {
                break;
            }
            for &(next, cell) in &adj[node] {
                if !seen[next] {
                    seen[next] = true;
                    parent[next] = Some((node, cell));
                    queue.push_back(next);
                }
            }
        }
        let mut path = Vec::new();
        let mut node = to;
        while node != from {
            let (prev, cell) = parent[node].expect("basis is a spanning tree");
            path.push(cell);
            node = prev;
        }
        path.reverse();
        path
    }

    fn solve(mut self) -> Result<Vec<f64>> {
        let max_cost = self.cost.iter().fold(0.0f64, |a, &c| a.max(c));
        let tol = 1e-12 * max_cost.max(1.0);
        let max_pivots = 50 * self.m * self.n + 1000;
        let mut degenerate_run = 0usize;

        for _ in 0..max_pivots {
            let adj = self.adjacency();
            let pot = self.potentials(&adj);
            let bland = degenerate_run >= BLAND_AFTER_DEGENERATE;

            let mut entering = None;
            let mut best = -tol;
            'scan: for i in 0..self.m {
                for j in 0..self.n {
                    let cell = i * self.n + j;
                    if self.basic[cell] {
                        continue;
                    }
                    let r = self.cost[cell] - pot[i] - pot[self.m + j];
                    if r < best {
                        entering = Some(cell);
                        if bland {
                            break 'scan;
                        }
                        best = r;
                    }
                }
            }
            let Some(enter) = entering else {
                return Ok(self.flow);
            };

            // Cycle: entering cell (+), then the tree path from its column
            // back to its row with alternating signs starting at (-).
            let (ei, ej) = (enter / self.n, enter % self.n);
            let path = self.tree_path(&adj, self.m + ej, ei);
            let mut leave = None;
            let mut theta = f64::INFINITY;
            for &cell in path.iter().step_by(2) {
                let f = self.flow[cell];
                if f < theta || (f == theta && leave.is_some_and(|l| cell < l)) {
                    theta = f;
                    leave = Some(cell);
                }
            }
            let leave = leave.expect("cycle has a decreasing cell");

            for (k, &cell) in path.iter().enumerate() {
                if k % 2 == 0 {
                    self.flow[cell] = (self.flow[cell] - theta).max(0.0);
                } else {
                    self.flow[cell] += theta;
                }
            }
            self.flow[enter] = theta;
            self.flow[leave] = 0.0;
            self.basic[leave] = false;
            self.basic[enter] = true;
            let pos = self.cells.iter().position(|&c| c == leave).expect("leaving cell is basic");
            self.cells[pos] = enter;

            if theta > 0.0 {
                degenerate_run = 0;
            } else {
                degenerate_run += 1;
            }
        }
        Err(Error::TransportNoConvergence(max_pivots))
    }
}
