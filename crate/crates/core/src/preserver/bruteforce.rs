//! Classification of all `(e_x, e_y)`-preservers among invertible matrices
//! on tiny algebras.
//!
//! Matrices are built one column (basis image) at a time, each column
//! outside the span of the previous ones. A prefix is abandoned as soon as
//! a basis-image condition that every preserver satisfies fails:
//! `phi(e_x)^2 = e_y`, `phi(e_x)` annihilating the images of basis elements
//! not starting (resp. ending) at `x`, and orthogonality of the images of
//! the diagonal idempotents. The `e_x` column is placed first so these are
//! checked as early as possible.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use super::verify::{Jobs, ResidueVerifier};
use crate::basis::BasisOrder;
use crate::dense::residue;
use crate::error::{Error, Result};
use crate::incidence::Algebra;
use crate::linmaps::{LinearMap, PmVerdict};
use crate::poset::{Poset, PosetAutomorphism};
use crate::scalars::{Field, Fp};

#[derive(Debug, Clone, PartialEq)]
pub struct Budget {
    pub max_dim: usize,
    pub primes: Vec<u32>,
    /// Fraction of pruned prefixes completed at random and fully verified.
    pub audit_rate: f64,
    pub seed: u64,
}

impl Default for Budget {
    fn default() -> Self {
        Budget { max_dim: 5, primes: vec![2, 3], audit_rate: 0.01, seed: 0 }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct FoundPreserver {
    #[serde(skip)]
    pub map: LinearMap,
    pub verdict: PmVerdict,
    /// `lambda` of the (signed) automorphism, as name pairs.
    pub lambda: Option<Vec<(String, String)>>,
    #[serde(skip)]
    pub automorphism: Option<PosetAutomorphism>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Census {
    pub x: String,
    pub y: String,
    pub p: u32,
    pub dimension: usize,
    pub within_theorem_scope: bool,
    /// Invertible matrices covered, pruned or not; equals `|GL(d, p)|`.
    pub total: u128,
    pub pruned: u128,
    pub survivors: u64,
    pub preservers_found: usize,
    pub automorphisms: usize,
    pub negative_automorphisms: usize,
    /// Every preserver is `±` an automorphism whose `lambda` sends `x` to `y`.
    pub theorem_consistent: bool,
    pub audit_checked: u64,
    pub audit_violations: u64,
    pub preservers: Vec<FoundPreserver>,
}

/// `|GL(d, p)|`.
pub fn gl_order(d: usize, p: u32) -> u128 {
    completions(d, p, 0)
}

// number of ways to finish a basis once `k` independent columns are fixed
fn completions(d: usize, p: u32, k: usize) -> u128 {
    let q = (p as u128).pow(d as u32);
    (k..d).map(|i| q - (p as u128).pow(i as u32)).product()
}

struct Echelon {
    rows: Vec<(usize, Vec<u32>)>,
}

impl Echelon {
    fn reduce(&self, fp: Fp, v: &mut [u32]) {
        for (pivot, row) in &self.rows {
            let c = v[*pivot];
            if c != 0 {
                for (a, b) in v.iter_mut().zip(row) {
                    *a = fp.sub(*a, fp.mul(c, *b));
                }
            }
        }
    }

    fn independent(&self, fp: Fp, v: &[u32], scratch: &mut Vec<u32>) -> bool {
        scratch.clear();
        scratch.extend_from_slice(v);
        self.reduce(fp, scratch);
        scratch.iter().any(|&a| a != 0)
    }

    fn push(&mut self, fp: Fp, v: &[u32]) {
        let mut r = v.to_vec();
        self.reduce(fp, &mut r);
        let pivot = r.iter().position(|&a| a != 0).expect("independent vector");
        let inv = fp.inv(r[pivot]).expect("nonzero");
        r.iter_mut().for_each(|a| *a = fp.mul(*a, inv));
        self.rows.push((pivot, r));
    }

    fn pop(&mut self) {
        self.rows.pop();
    }
}

#[derive(Default)]
struct Stats {
    pruned: u128,
    survivors: u64,
    audit_checked: u64,
    audit_violations: u64,
    found: Vec<Vec<Vec<u32>>>,
}

impl Stats {
    fn merge(mut self, other: Stats) -> Stats {
        self.pruned += other.pruned;
        self.survivors += other.survivors;
        self.audit_checked += other.audit_checked;
        self.audit_violations += other.audit_violations;
        self.found.extend(other.found);
        self
    }
}

struct Search<'a> {
    alg: &'a Algebra,
    basis: &'a BasisOrder,
    fp: Fp,
    d: usize,
    x: usize,
    /// basis index placed at each level
    order: Vec<usize>,
    ey: Vec<u32>,
    eps: Vec<u32>,
    candidates: Vec<Vec<u32>>,
    audit_rate: f64,
}

impl<'a> Search<'a> {
    fn product_is_zero(&self, f: &[u32], g: &[u32], out: &mut [u32]) -> bool {
        residue::mul_into(self.fp, self.basis, f, g, out);
        out.iter().all(|&a| a == 0)
    }

    fn passes(&self, level: usize, c: &[u32], cols: &[Vec<u32>], out: &mut [u32]) -> bool {
        if level == 0 {
            residue::mul_into(self.fp, self.basis, c, c, out);
            return out == self.ey.as_slice();
        }
        let (u, v) = self.basis.pair(self.order[level]);
        let cx = &cols[0];
        if u != self.x && !self.product_is_zero(cx, c, out) {
            return false;
        }
        if v != self.x && !self.product_is_zero(c, cx, out) {
            return false;
        }
        if u == v {
            for (j, other) in cols.iter().enumerate().take(level).skip(1) {
                if self.basis.is_diagonal(self.order[j])
                    && !(self.product_is_zero(c, other, out) && self.product_is_zero(other, c, out))
                {
                    return false;
                }
            }
        }
        true
    }

    /// Row-major matrix whose column `order[level]` is `cols[level]`.
    fn matrix(&self, cols: &[Vec<u32>]) -> Vec<u32> {
        let d = self.d;
        let mut m = vec![0u32; d * d];
        for (level, col) in cols.iter().enumerate() {
            let j = self.order[level];
            for (i, &a) in col.iter().enumerate() {
                m[i * d + j] = a;
            }
        }
        m
    }

    fn preserves(&self, cols: &[Vec<u32>]) -> bool {
        ResidueVerifier::new(self.alg, self.fp, &self.matrix(cols), &self.eps, &self.ey).holds()
    }

    fn audit(&self, cols: &mut Vec<Vec<u32>>, echelon: &mut Echelon, rng: &mut ChaCha8Rng, stats: &mut Stats) {
        let placed = cols.len();
        let mut scratch = Vec::new();
        while cols.len() < self.d {
            let c = loop {
                let c: Vec<u32> = (0..self.d).map(|_| rng.gen_range(0..self.fp.p())).collect();
                if echelon.independent(self.fp, &c, &mut scratch) {
                    break c;
                }
            };
            echelon.push(self.fp, &c);
            cols.push(c);
        }
        stats.audit_checked += 1;
        if self.preserves(cols) {
            stats.audit_violations += 1;
        }
        while cols.len() > placed {
            cols.pop();
            echelon.pop();
        }
    }

    fn dfs(&self, cols: &mut Vec<Vec<u32>>, echelon: &mut Echelon, rng: &mut ChaCha8Rng, stats: &mut Stats) {
        let level = cols.len();
        if level == self.d {
            stats.survivors += 1;
            if self.preserves(cols) {
                stats.found.push(cols.clone());
            }
            return;
        }
        let subtree = completions(self.d, self.fp.p(), level + 1);
        let mut scratch = Vec::new();
        let mut out = vec![0u32; self.d];
        for c in &self.candidates {
            if !echelon.independent(self.fp, c, &mut scratch) {
                continue;
            }
            echelon.push(self.fp, c);
            cols.push(c.clone());
            if self.passes(level, c, cols, &mut out) {
                self.dfs(cols, echelon, rng, stats);
            } else {
                stats.pruned += subtree;
                if rng.gen_bool(self.audit_rate) {
                    self.audit(cols, echelon, rng, stats);
                }
            }
            cols.pop();
            echelon.pop();
        }
    }
}

/// Enumerates `GL(d, p)` on `I(P, F_p)` and collects every map with
/// `f g = e_x => phi(f) phi(g) = e_y`.
pub fn bruteforce_classify(poset: &Poset, p: u32, x: &str, y: &str, budget: &Budget, jobs: Jobs) -> Result<Census> {
    let d = poset.comparable_pair_count();
    if d > budget.max_dim {
        return Err(Error::TooLarge(format!("dimension {d} exceeds budget {}", budget.max_dim)));
    }
    if !budget.primes.contains(&p) {
        return Err(Error::TooLarge(format!("prime {p} outside budget {:?}", budget.primes)));
    }
    if !(0.0..=1.0).contains(&budget.audit_rate) {
        return Err(Error::BadOptions(format!("audit rate {} outside [0, 1]", budget.audit_rate)));
    }
    let alg = Algebra::new(poset.clone(), Field::prime(p as u64)?);
    let (xi, yi) = (poset.index_of(x)?, poset.index_of(y)?);
    let basis = alg.basis();
    let fp = Fp::new(p);
    let mut order = vec![basis.diag(xi)];
    order.extend((0..d).filter(|&k| basis.is_diagonal(k) && k != basis.diag(xi)));
    order.extend((0..d).filter(|&k| !basis.is_diagonal(k)));
    let candidates: Vec<Vec<u32>> = (1..(p as u64).pow(d as u32))
        .map(|i| {
            let mut v = vec![0u32; d];
            residue::decode(i, p, &mut v);
            v
        })
        .collect();
    let search = Search {
        alg: &alg,
        basis,
        fp,
        d,
        x: xi,
        order,
        ey: alg.e(yi, yi).residues(),
        eps: alg.e(xi, xi).residues(),
        candidates,
        audit_rate: budget.audit_rate,
    };

    // one task per choice of the e_x column
    let stats = jobs.install(|| {
        search
            .candidates
            .par_iter()
            .enumerate()
            .map(|(i, c)| {
                let mut stats = Stats::default();
                let mut rng = ChaCha8Rng::seed_from_u64(budget.seed ^ (i as u64).wrapping_mul(0x9E37_79B9_7F4A_7C15));
                let mut echelon = Echelon { rows: Vec::new() };
                let mut out = vec![0u32; d];
                let mut cols = vec![c.clone()];
                echelon.push(fp, c);
                if search.passes(0, c, &cols, &mut out) {
                    search.dfs(&mut cols, &mut echelon, &mut rng, &mut stats);
                } else {
                    stats.pruned += completions(d, p, 1);
                    if rng.gen_bool(budget.audit_rate) {
                        search.audit(&mut cols, &mut echelon, &mut rng, &mut stats);
                    }
                }
                stats
            })
            .reduce(Stats::default, Stats::merge)
    });

    let mut preservers = Vec::with_capacity(stats.found.len());
    for cols in &stats.found {
        let matrix = search.matrix(cols);
        let columns: Vec<Vec<u32>> = (0..d).map(|j| (0..d).map(|i| matrix[i * d + j]).collect()).collect();
        let map = LinearMap::from_residue_columns(&alg, &columns);
        let verdict = map.pm_automorphism();
        let automorphism = match verdict {
            PmVerdict::Automorphism => Some(map.decompose()?.lambda),
            PmVerdict::NegativeOfAutomorphism => Some(map.neg().decompose()?.lambda),
            PmVerdict::Neither => None,
        };
        preservers.push(FoundPreserver {
            lambda: automorphism.as_ref().map(|l| l.named(poset)),
            automorphism,
            verdict,
            map,
        });
    }
    let count = |v: PmVerdict| preservers.iter().filter(|f| f.verdict == v).count();
    let theorem_consistent =
        preservers.iter().all(|f| f.automorphism.as_ref().is_some_and(|l| l.apply(xi) == yi));
    Ok(Census {
        x: x.into(),
        y: y.into(),
        p,
        dimension: d,
        within_theorem_scope: poset.is_connected()?,
        total: stats.pruned + stats.survivors as u128,
        pruned: stats.pruned,
        survivors: stats.survivors,
        preservers_found: preservers.len(),
        automorphisms: count(PmVerdict::Automorphism),
        negative_automorphisms: count(PmVerdict::NegativeOfAutomorphism),
        theorem_consistent,
        audit_checked: stats.audit_checked,
        audit_violations: stats.audit_violations,
        preservers,
    })
}
