use std::cmp::Ordering;
use std::collections::BinaryHeap;

use rayon::prelude::*;
use serde::Serialize;

use crate::{Error, Result};

/// Controls for the adaptive simplex quadrature.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct QuadratureOptions {
    /// Initial grid: `mesh^r` congruent simplices.
    pub mesh: usize,
    /// Gauss-Legendre points per collapsed coordinate.
    pub order: usize,
    pub rel_tol: f64,
    pub abs_tol: f64,
    pub max_cells: usize,
}

impl Default for QuadratureOptions {
    fn default() -> Self {
        Self {
            mesh: 4,
            order: 8,
            rel_tol: 1e-11,
            abs_tol: 0.0,
            max_cells: 200_000,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct QuadratureResult {
    pub value: f64,
    /// Sum over cells of `|coarse - refined|`.
    pub error: f64,
    pub cells: usize,
}

/// Gauss-Legendre nodes and weights on `[0, 1]`.
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    assert!(n >= 1, "at least one node");
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    let nf = n as f64;
    for i in 0..n.div_ceil(2) {
        // Newton iteration on P_n from the Chebyshev-like initial guess
        let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (nf + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (mut p0, mut p1) = (1.0, x);
            for k in 2..=n {
                let kf = k as f64;
                let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
                p0 = p1;
                p1 = p2;
            }
            let pn = if n == 1 { x } else { p1 };
            let pm = if n == 1 { 1.0 } else { p0 };
            dp = nf * (x * pn - pm) / (x * x - 1.0);
            let dx = pn / dp;
            x -= dx;
            if dx.abs() < 1e-16 {
                break;
            }
        }
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        nodes[i] = (1.0 - x) / 2.0;
        nodes[n - 1 - i] = (1.0 + x) / 2.0;
        weights[i] = w / 2.0;
        weights[n - 1 - i] = w / 2.0;
    }
    (nodes, weights)
}

/// A simplex in `R^r` by its `r + 1` vertices.
#[derive(Debug, Clone)]
struct Cell {
    vertices: Vec<Vec<f64>>,
}

/// Tensor Gauss rule on the unit cube collapsed onto the standard simplex:
/// barycentric weights `μ` and quadrature weights including the Jacobian.
struct CollapsedRule {
    points: Vec<(Vec<f64>, f64)>,
}

impl CollapsedRule {
    fn new(r: usize, order: usize) -> Self {
        let (nodes, weights) = gauss_legendre(order);
        let mut points = Vec::with_capacity(order.pow(r as u32));
        let mut idx = vec![0usize; r];
        loop {
            let mut mu = vec![0.0; r];
            let mut remaining = 1.0;
            let mut w = 1.0;
            for (i, &k) in idx.iter().enumerate() {
                let t = nodes[k];
                mu[i] = remaining * t;
                w *= weights[k];
                if i + 1 < r {
                    w *= (1.0 - t).powi((r - 1 - i) as i32);
                }
                remaining *= 1.0 - t;
            }
            points.push((mu, w));
            let mut pos = 0;
            loop {
                if pos == r {
                    return Self { points };
                }
                idx[pos] += 1;
                if idx[pos] < order {
                    break;
                }
                idx[pos] = 0;
                pos += 1;
            }
        }
    }
}

fn det(mut m: Vec<Vec<f64>>) -> f64 {
    let n = m.len();
    let mut det = 1.0;
    for k in 0..n {
        let pivot = (k..n)
            .max_by(|&a, &b| m[a][k].abs().total_cmp(&m[b][k].abs()))
            .expect("nonempty range");
        if m[pivot][k] == 0.0 {
            return 0.0;
        }
        if pivot != k {
            m.swap(pivot, k);
            det = -det;
        }
        det *= m[k][k];
        for i in k + 1..n {
            let f = m[i][k] / m[k][k];
            for j in k..n {
                m[i][j] -= f * m[k][j];
            }
        }
    }
    det
}

impl Cell {
    fn apply<F: Fn(&[f64]) -> f64>(&self, rule: &CollapsedRule, f: &F) -> f64 {
        let r = self.vertices.len() - 1;
        let p0 = &self.vertices[0];
        let edges: Vec<Vec<f64>> = (1..=r)
            .map(|i| (0..r).map(|c| self.vertices[i][c] - p0[c]).collect())
            .collect();
        let jac = det(edges.clone()).abs();
        let mut point = vec![0.0; r];
        let mut acc = 0.0;
        for (mu, w) in &rule.points {
            point.copy_from_slice(p0);
            for (e, m) in edges.iter().zip(mu) {
                for c in 0..r {
                    point[c] += m * e[c];
                }
            }
            acc += w * f(&point);
        }
        acc * jac
    }

    /// Halves the longest edge (first in lexicographic order among ties).
    fn bisect(&self) -> [Cell; 2] {
        let n = self.vertices.len();
        let mut best = (0, 1, -1.0);
        for i in 0..n {
            for j in i + 1..n {
                let len: f64 = self.vertices[i]
                    .iter()
                    .zip(&self.vertices[j])
                    .map(|(a, b)| (a - b) * (a - b))
                    .sum();
                if len > best.2 {
                    best = (i, j, len);
                }
            }
        }
        let (i, j, _) = best;
        let mid: Vec<f64> = self.vertices[i]
            .iter()
            .zip(&self.vertices[j])
            .map(|(a, b)| 0.5 * (a + b))
            .collect();
        let mut left = self.vertices.clone();
        left[j] = mid.clone();
        let mut right = self.vertices.clone();
        right[i] = mid;
        [Cell { vertices: left }, Cell { vertices: right }]
    }
}

struct Node {
    cell: Cell,
    value: f64,
    error: f64,
    id: u64,
}

impl PartialEq for Node {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}

impl Eq for Node {}

impl PartialOrd for Node {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Node {
    fn cmp(&self, other: &Self) -> Ordering {
        self.error
            .total_cmp(&other.error)
            .then_with(|| other.id.cmp(&self.id))
    }
}

fn evaluate<F: Fn(&[f64]) -> f64>(cell: Cell, rule: &CollapsedRule, f: &F, id: u64) -> Node {
    let coarse = cell.apply(rule, f);
    let [a, b] = cell.bisect();
    let fine = a.apply(rule, f) + b.apply(rule, f);
    Node {
        cell,
        value: fine,
        error: (coarse - fine).abs(),
        id,
    }
}

/// Freudenthal triangulation of the ordered simplex
/// `{1 ≥ y_1 ≥ y_2 ≥ … ≥ y_r ≥ 0}` on a grid of spacing `1/mesh`.
fn ordered_simplex_cells(r: usize, mesh: usize) -> Vec<Cell> {
    let perms = permutations(r);
    let h = 1.0 / mesh as f64;
    let mut cells = Vec::new();
    let mut corner = vec![0usize; r];
    loop {
        for perm in &perms {
            let mut v: Vec<f64> = corner.iter().map(|&c| c as f64 * h).collect();
            let mut vertices = vec![v.clone()];
            for &axis in perm {
                v[axis] += h;
                vertices.push(v.clone());
            }
            let centroid: Vec<f64> = (0..r)
                .map(|c| vertices.iter().map(|p| p[c]).sum::<f64>() / (r + 1) as f64)
                .collect();
            if centroid.windows(2).all(|w| w[0] > w[1]) {
                cells.push(Cell { vertices });
            }
        }
        let mut pos = 0;
        loop {
            if pos == r {
                return cells;
            }
            corner[pos] += 1;
            if corner[pos] < mesh {
                break;
            }
            corner[pos] = 0;
            pos += 1;
        }
    }
}

fn permutations(n: usize) -> Vec<Vec<usize>> {
    if n == 0 {
        return vec![vec![]];
    }
    let mut out = Vec::new();
    for p in permutations(n - 1) {
        for pos in 0..n {
            let mut q = p.clone();
            q.insert(pos, n - 1);
            out.push(q);
        }
    }
    out.sort();
    out
}

/// Adaptive integral of `f` over the ordered simplex in `R^r`.
///
/// Every cell carries the difference between its own rule and the sum over
/// its two halves; the cell with the largest difference is split until the
/// total falls below the tolerance. Batches of cells are refined in parallel
/// and reduced in a fixed order, so results do not depend on the thread count.
pub(crate) fn integrate_ordered_simplex<F>(r: usize, f: F, opts: QuadratureOptions) -> Result<QuadratureResult>
where
    F: Fn(&[f64]) -> f64 + Sync,
{
    if r == 0 {
        return Ok(QuadratureResult {
            value: f(&[]),
            error: 0.0,
            cells: 1,
        });
    }
    if opts.mesh < 1 || opts.order < 1 {
        return Err(Error::InvalidArgument("mesh and order must be positive".into()));
    }
    let rule = CollapsedRule::new(r, opts.order);
    let initial = ordered_simplex_cells(r, opts.mesh);
    let nodes: Vec<Node> = initial
        .into_par_iter()
        .enumerate()
        .map(|(i, cell)| evaluate(cell, &rule, &f, i as u64))
        .collect();
    let mut next_id = nodes.len() as u64;
    let mut heap: BinaryHeap<Node> = nodes.into_iter().collect();

    loop {
        let (value, error) = totals(&heap);
        let target = (opts.rel_tol * value.abs()).max(opts.abs_tol);
        if !value.is_finite() || !error.is_finite() {
            return Err(Error::NonConvergence { error, cells: heap.len() });
        }
        if error <= target {
            return Ok(QuadratureResult {
                value,
                error,
                cells: heap.len(),
            });
        }
        if heap.len() >= opts.max_cells {
            return Err(Error::NonConvergence { error, cells: heap.len() });
        }
        let batch = (heap.len() / 8).clamp(1, 256).min(opts.max_cells - heap.len());
        let work: Vec<(Cell, u64)> = (0..batch)
            .filter_map(|_| heap.pop())
            .flat_map(|node| {
                let [a, b] = node.cell.bisect();
                let id = next_id;
                next_id += 2;
                [(a, id), (b, id + 1)]
            })
            .collect();
        let refined: Vec<Node> = work
            .into_par_iter()
            .map(|(cell, id)| evaluate(cell, &rule, &f, id))
            .collect();
        heap.extend(refined);
    }
}

fn totals(heap: &BinaryHeap<Node>) -> (f64, f64) {
    let mut nodes: Vec<&Node> = heap.iter().collect();
    nodes.sort_by_key(|n| n.id);
    let value = nodes.iter().map(|n| n.value).sum();
    let error = nodes.iter().map(|n| n.error).sum();
    (value, error)
}
