use std::collections::{HashMap, VecDeque};

use num_bigint::BigInt;
use serde::Serialize;

use super::snf::{big_det, snf_exponents};
use super::{BuildingParams, ElemDivisorType};
use crate::arith::{require_prime, valuation};
use crate::{Error, Result};

/// Default guard on the number of Hermite normal forms generated.
pub const DEFAULT_CLASS_LIMIT: u128 = 10_000_000;

/// Largest modulus used in the modular HNF; keeps every product inside `i128`.
const MODULUS_CAP: i128 = 1 << 60;

/// Canonical representative of a homothety class of `Z_p`-lattices.
///
/// The lattice is the row span of `hnf`, an upper-triangular integer matrix with
/// diagonal entries powers of `p` and every entry above the diagonal reduced into
/// `[0, diagonal entry of its column)`. The representative is primitive: it lies
/// in `Z^d` but not in `pZ^d`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct LatticeClass {
    hnf: Vec<Vec<i64>>,
}

fn ext_gcd(a: i128, b: i128) -> (i128, i128, i128) {
    let (mut old_r, mut r) = (a, b);
    let (mut old_s, mut s) = (1i128, 0i128);
    let (mut old_t, mut t) = (0i128, 1i128);
    while r != 0 {
        let q = old_r.div_euclid(r);
        (old_r, r) = (r, old_r - q * r);
        (old_s, s) = (s, old_s - q * s);
        (old_t, t) = (t, old_t - q * t);
    }
    if old_r < 0 {
        (-old_r, -old_s, -old_t)
    } else {
        (old_r, old_s, old_t)
    }
}

/// Row-style Hermite normal form of the lattice spanned by `gens`, assuming the
/// lattice contains `modulus · Z^d`.
fn hnf_mod(gens: &[Vec<i128>], d: usize, modulus: i128) -> Vec<Vec<i128>> {
    let mut rows: Vec<Vec<i128>> = gens
        .iter()
        .map(|r| r.iter().map(|x| x.rem_euclid(modulus)).collect())
        .collect();
    let mut h = vec![vec![0i128; d]; d];
    for j in 0..d {
        let mut pivot = vec![0i128; d];
        pivot[j] = modulus;
        for r in rows.iter_mut() {
            if r[j] == 0 {
                continue;
            }
            let (g, a, b) = ext_gcd(pivot[j], r[j]);
            let (u, v) = (pivot[j] / g, r[j] / g);
            let mut next_pivot = vec![0i128; d];
            let mut next_r = vec![0i128; d];
            for k in j + 1..d {
                next_pivot[k] = (a * pivot[k] + b * r[k]).rem_euclid(modulus);
                next_r[k] = (u * r[k] - v * pivot[k]).rem_euclid(modulus);
            }
            next_pivot[j] = g;
            pivot = next_pivot;
            *r = next_r;
        }
        h[j] = pivot;
    }
    for j in 0..d {
        for i in 0..j {
            let q = h[i][j].div_euclid(h[j][j]);
            if q != 0 {
                for k in j..d {
                    h[i][k] -= q * h[j][k];
                }
            }
        }
    }
    h
}

fn det_i128(m: &[Vec<i128>]) -> i128 {
    let n = m.len();
    match n {
        0 => 1,
        1 => m[0][0],
        2 => m[0][0] * m[1][1] - m[0][1] * m[1][0],
        _ => (0..n)
            .map(|j| {
                let minor: Vec<Vec<i128>> = m[1..]
                    .iter()
                    .map(|row| row.iter().enumerate().filter(|&(c, _)| c != j).map(|(_, &x)| x).collect())
                    .collect();
                let sign = if j % 2 == 0 { 1 } else { -1 };
                sign * m[0][j] * det_i128(&minor)
            })
            .sum(),
    }
}

fn adjugate(m: &[Vec<i128>]) -> Vec<Vec<i128>> {
    let n = m.len();
    if n == 1 {
        return vec![vec![1]];
    }
    let mut adj = vec![vec![0i128; n]; n];
    for i in 0..n {
        for j in 0..n {
            let minor: Vec<Vec<i128>> = m
                .iter()
                .enumerate()
                .filter(|&(r, _)| r != i)
                .map(|(_, row)| row.iter().enumerate().filter(|&(c, _)| c != j).map(|(_, &x)| x).collect())
                .collect();
            let sign = if (i + j) % 2 == 0 { 1 } else { -1 };
            adj[j][i] = sign * det_i128(&minor);
        }
    }
    adj
}

/// Row span of `inner` is contained in the row span of `outer`:
/// `inner · adj(outer) ≡ 0 (mod det outer)`.
fn row_span_contains(outer: &[Vec<i128>], inner: &[Vec<i128>]) -> bool {
    let det = det_i128(outer);
    let adj = adjugate(outer);
    let n = outer.len();
    inner.iter().all(|row| {
        (0..n).all(|j| (0..n).map(|k| row[k] * adj[k][j]).sum::<i128>() % det == 0)
    })
}

impl LatticeClass {
    /// The class of the standard lattice `Z_p^d`.
    pub fn base(d: usize) -> Self {
        Self {
            hnf: (0..d)
                .map(|i| (0..d).map(|j| (i == j) as i64).collect())
                .collect(),
        }
    }

    /// Canonical class of the lattice spanned by `gens`, which must contain
    /// `p^modulus_exp · Z^d`.
    pub(crate) fn from_generators(gens: &[Vec<i128>], d: usize, p: u64, modulus_exp: u32) -> Self {
        let modulus = (p as i128).pow(modulus_exp);
        assert!(modulus <= MODULUS_CAP, "lattice modulus out of range");
        let mut h = hnf_mod(gens, d, modulus);
        let p = p as i128;
        while h.iter().flatten().all(|x| x % p == 0) {
            for x in h.iter_mut().flatten() {
                *x /= p;
            }
        }
        Self {
            hnf: h
                .into_iter()
                .map(|r| r.into_iter().map(|x| x as i64).collect())
                .collect(),
        }
    }

    /// Vertex `M · [Z_p^d]` for a nonsingular integer matrix `M`: the column span
    /// of `M` localized at `p`.
    pub fn of_matrix(m: &[Vec<i64>], p: u64) -> Result<Self> {
        require_prime(p)?;
        let d = m.len();
        if d == 0 || m.iter().any(|r| r.len() != d) {
            return Err(Error::InvalidArgument("expected a nonempty square matrix".into()));
        }
        let big: Vec<Vec<BigInt>> = m.iter().map(|r| r.iter().map(|&x| BigInt::from(x)).collect()).collect();
        let det = big_det(&big);
        if det == BigInt::from(0) {
            return Err(Error::SingularMatrix);
        }
        let v = valuation(&det, p);
        if (p as f64).powi(v as i32) > MODULUS_CAP as f64 {
            return Err(Error::Domain(format!("p-part of det exceeds {MODULUS_CAP}")));
        }
        let gens: Vec<Vec<i128>> = (0..d).map(|j| (0..d).map(|i| m[i][j] as i128).collect()).collect();
        Ok(Self::from_generators(&gens, d, p, v))
    }

    pub fn hnf(&self) -> &[Vec<i64>] {
        &self.hnf
    }

    pub fn dim(&self) -> usize {
        self.hnf.len()
    }

    /// `v_p(det)` of the canonical representative.
    pub fn det_exponent(&self, p: u64) -> u32 {
        self.hnf
            .iter()
            .enumerate()
            .map(|(i, r)| {
                let mut x = r[i];
                let mut e = 0;
                while x % p as i64 == 0 {
                    x /= p as i64;
                    e += 1;
                }
                e
            })
            .sum()
    }

    pub fn is_primitive(&self, p: u64) -> bool {
        self.hnf.iter().flatten().any(|&x| x % p as i64 != 0)
    }

    pub fn elementary_divisors(&self, p: u64) -> ElemDivisorType {
        snf_exponents(&self.hnf, p).expect("HNF representatives are nonsingular")
    }

    fn as_i128(&self) -> Vec<Vec<i128>> {
        self.hnf.iter().map(|r| r.iter().map(|&x| x as i128).collect()).collect()
    }
}

/// Adjacency in the 1-skeleton: some `t ≥ 0` has `pL ⊂ p^t M ⊂ L`.
///
/// Both inclusions are checked by exact divisibility against adjugates.
pub fn classes_adjacent(a: &LatticeClass, b: &LatticeClass, p: u64) -> bool {
    if a == b || a.dim() != b.dim() {
        return false;
    }
    let d = a.dim() as i64;
    let (ea, eb) = (a.det_exponent(p) as i64, b.det_exponent(p) as i64);
    let la = a.as_i128();
    let pla: Vec<Vec<i128>> = la.iter().map(|r| r.iter().map(|&x| x * p as i128).collect()).collect();
    (0..=((ea + d - eb).max(0) / d + 1)).any(|t| {
        let scaled = eb + t * d;
        if scaled < ea || scaled > ea + d {
            return false;
        }
        let f = (p as i128).pow(t as u32);
        let mb: Vec<Vec<i128>> = b.as_i128().iter().map(|r| r.iter().map(|&x| x * f).collect()).collect();
        row_span_contains(&la, &mb) && row_span_contains(&mb, &pla)
    })
}

/// Guard on [`enumerate_classes_with`].
#[derive(Debug, Clone, Copy)]
pub struct EnumerationOptions {
    pub limit: u128,
}

impl Default for EnumerationOptions {
    fn default() -> Self {
        Self { limit: DEFAULT_CLASS_LIMIT }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EnumeratedClass {
    pub class: LatticeClass,
    pub distance: u32,
    pub snf: ElemDivisorType,
}

#[derive(Serialize)]
struct ClassLine<'a> {
    hnf: &'a [Vec<i64>],
    distance: u32,
    snf: &'a [u32],
}

impl EnumeratedClass {
    /// `{"hnf": [[...]], "distance": k, "snf": [a_1, ...]}`
    pub fn to_json_line(&self) -> String {
        serde_json::to_string(&ClassLine {
            hnf: self.class.hnf(),
            distance: self.distance,
            snf: self.snf.exponents(),
        })
        .expect("plain integers serialize")
    }
}

fn exponent_vectors(d: usize, max_total: u32) -> Vec<Vec<u32>> {
    fn rec(d: usize, left: u32, cur: &mut Vec<u32>, out: &mut Vec<Vec<u32>>) {
        if cur.len() == d {
            out.push(cur.clone());
            return;
        }
        for e in 0..=left {
            cur.push(e);
            rec(d, left - e, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    rec(d, max_total, &mut Vec::new(), &mut out);
    out
}

/// Number of Hermite normal forms with determinant `p^e`, `e ≤ k_max (d-1)`.
pub fn estimated_class_count(params: BuildingParams, k_max: u32) -> u128 {
    let (d, p) = (params.d(), params.p());
    let max_total = k_max.saturating_mul(d as u32 - 1);
    let mut total: u128 = 0;
    for exps in exponent_vectors(d, max_total) {
        let weight: u32 = exps.iter().enumerate().map(|(j, &e)| j as u32 * e).sum();
        let term = (p as u128).checked_pow(weight).unwrap_or(u128::MAX);
        total = total.saturating_add(term);
    }
    total
}

/// All Hermite normal forms with the given diagonal exponents.
fn hnfs_with_diagonal(p: u64, exps: &[u32], out: &mut Vec<Vec<Vec<i64>>>) {
    let d = exps.len();
    let diag: Vec<i64> = exps.iter().map(|&e| (p as i64).pow(e)).collect();
    let slots: Vec<(usize, usize)> = (0..d).flat_map(|j| (0..j).map(move |i| (i, j))).collect();
    let mut h: Vec<Vec<i64>> = (0..d)
        .map(|i| (0..d).map(|j| if i == j { diag[i] } else { 0 }).collect())
        .collect();
    loop {
        out.push(h.clone());
        // odometer over the off-diagonal slots
        let mut advanced = false;
        for &(i, j) in &slots {
            h[i][j] += 1;
            if h[i][j] < diag[j] {
                advanced = true;
                break;
            }
            h[i][j] = 0;
        }
        if !advanced {
            return;
        }
    }
}

/// Bases (rows) of every nonzero proper subspace of `F_p^d`, in reduced row
/// echelon form.
fn proper_subspaces(d: usize, p: u64) -> Vec<Vec<Vec<i128>>> {
    fn pivot_sets(d: usize, r: usize, start: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == r {
            out.push(cur.clone());
            return;
        }
        for c in start..d {
            cur.push(c);
            pivot_sets(d, r, c + 1, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    for r in 1..d {
        let mut sets = Vec::new();
        pivot_sets(d, r, 0, &mut Vec::new(), &mut sets);
        for pivots in sets {
            let free: Vec<(usize, usize)> = pivots
                .iter()
                .enumerate()
                .flat_map(|(row, &pc)| {
                    let pivots = &pivots;
                    (pc + 1..d).filter(move |c| !pivots.contains(c)).map(move |c| (row, c))
                })
                .collect();
            let mut basis: Vec<Vec<i128>> = pivots
                .iter()
                .map(|&pc| (0..d).map(|c| (c == pc) as i128).collect())
                .collect();
            loop {
                out.push(basis.clone());
                let mut advanced = false;
                for &(row, c) in &free {
                    basis[row][c] += 1;
                    if basis[row][c] < p as i128 {
                        advanced = true;
                        break;
                    }
                    basis[row][c] = 0;
                }
                if !advanced {
                    break;
                }
            }
        }
    }
    out
}

/// Brute-force enumeration of the lattice classes within graph distance `k_max`
/// of the standard vertex, using the default budget.
pub fn enumerate_classes(params: BuildingParams, k_max: u32) -> Result<Vec<EnumeratedClass>> {
    enumerate_classes_with(params, k_max, EnumerationOptions::default())
}

/// Enumerates every primitive HNF with determinant `p^e`, `e ≤ k_max (d-1)`, then
/// runs breadth-first search from the standard vertex. Neighbours of a class `L`
/// are the lattices `pL ⊂ M ⊂ L` built from subspaces of `L/pL`; every edge is
/// confirmed with [`classes_adjacent`]. Output is sorted by `(distance, hnf)`.
pub fn enumerate_classes_with(
    params: BuildingParams,
    k_max: u32,
    opts: EnumerationOptions,
) -> Result<Vec<EnumeratedClass>> {
    let (d, p) = (params.d(), params.p());
    let estimated = estimated_class_count(params, k_max);
    if estimated > opts.limit {
        return Err(Error::BudgetExceeded {
            what: "lattice classes",
            estimated,
            limit: opts.limit,
        });
    }
    let max_total = k_max * (d as u32 - 1);
    if (p as f64).powi(max_total as i32 + 1) > MODULUS_CAP as f64 {
        return Err(Error::BudgetExceeded {
            what: "lattice determinant",
            estimated: (p as u128).saturating_pow(max_total + 1),
            limit: MODULUS_CAP as u128,
        });
    }

    let mut classes: Vec<LatticeClass> = Vec::new();
    let mut buf = Vec::new();
    for exps in exponent_vectors(d, max_total) {
        buf.clear();
        hnfs_with_diagonal(p, &exps, &mut buf);
        classes.extend(
            buf.drain(..)
                .map(|hnf| LatticeClass { hnf })
                .filter(|c| c.is_primitive(p)),
        );
    }
    let index: HashMap<&LatticeClass, usize> = classes.iter().enumerate().map(|(i, c)| (c, i)).collect();
    let subspaces = proper_subspaces(d, p);

    let mut dist = vec![u32::MAX; classes.len()];
    let base = index[&LatticeClass::base(d)];
    dist[base] = 0;
    let mut queue = VecDeque::from([base]);
    while let Some(u) = queue.pop_front() {
        if dist[u] == k_max {
            continue;
        }
        let cls = &classes[u];
        let rows = cls.as_i128();
        let modulus_exp = cls.det_exponent(p) + 1;
        for basis in &subspaces {
            let mut gens: Vec<Vec<i128>> = rows
                .iter()
                .map(|r| r.iter().map(|&x| x * p as i128).collect())
                .collect();
            for w in basis {
                gens.push((0..d).map(|k| (0..d).map(|i| w[i] * rows[i][k]).sum()).collect());
            }
            let nb = LatticeClass::from_generators(&gens, d, p, modulus_exp);
            let Some(&v) = index.get(&nb) else { continue };
            assert!(
                classes_adjacent(cls, &nb, p),
                "generated neighbour failed the divisibility check"
            );
            if dist[v] == u32::MAX {
                dist[v] = dist[u] + 1;
                queue.push_back(v);
            }
        }
    }

    let mut out: Vec<EnumeratedClass> = classes
        .iter()
        .zip(&dist)
        .filter(|(_, &k)| k <= k_max)
        .map(|(c, &k)| EnumeratedClass {
            snf: c.elementary_divisors(p),
            class: c.clone(),
            distance: k,
        })
        .collect();
    out.sort_by(|a, b| (a.distance, &a.class).cmp(&(b.distance, &b.class)));
    Ok(out)
}

/// Histogram of BFS distances `0..=k_max`.
pub fn sphere_counts(classes: &[EnumeratedClass], k_max: u32) -> Vec<u64> {
    let mut counts = vec![0u64; k_max as usize + 1];
    for c in classes {
        counts[c.distance as usize] += 1;
    }
    counts
}
