//! Checking the product-preserving property `f g = eps => phi(f) phi(g) = eta`
//! and the zero-product conditions on the standard basis.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::dense::residue::{self, BlockSolver, SolveBuf};
use crate::dense::DenseAlgebra;
use crate::error::{Error, Result};
use crate::incidence::{Algebra, ElementFile, IncidenceElement};
use crate::linalg::{affine_size, enumerate_affine, AffineSolution};
use crate::linmaps::LinearMap;
use crate::scalars::{Field, Fp, Scalar};

/// Largest enumeration (in points) any exhaustive routine will attempt.
pub const EXHAUSTIVE_LIMIT: u128 = 1 << 24;

/// Solution set of `f g = a` in the coordinates of `g`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RightFactors {
    /// `None` when the system is inconsistent.
    pub particular: Option<IncidenceElement>,
    pub kernel: Vec<IncidenceElement>,
    /// Every solution, when the field is finite and there are at most
    /// [`EXHAUSTIVE_LIMIT`] of them.
    pub points: Option<Vec<IncidenceElement>>,
}

impl RightFactors {
    pub fn is_empty(&self) -> bool {
        self.particular.is_none()
    }

    /// Number of solutions, `None` when infinite.
    pub fn count(&self) -> Option<u128> {
        match (&self.particular, self.kernel.first().map(|k| k.algebra().field().order())) {
            (None, _) => Some(0),
            (Some(_), None) => Some(1),
            (Some(_), Some(Some(p))) => Some(affine_size(p, self.kernel.len())),
            (Some(_), Some(None)) => None,
        }
    }
}

pub fn right_factors(f: &IncidenceElement, a: &IncidenceElement) -> Result<RightFactors> {
    if f.algebra() != a.algebra() {
        return Err(Error::MixedAlgebras);
    }
    let alg = f.algebra();
    let field = alg.field();
    let dense = DenseAlgebra::new(&field, alg.basis());
    let Some(sol) = dense.right_factors(&f.coords(), &a.coords()) else {
        return Ok(RightFactors { particular: None, kernel: Vec::new(), points: Some(Vec::new()) });
    };
    let particular = alg.from_coords(&sol.particular);
    let kernel: Vec<IncidenceElement> = sol.kernel.iter().map(|k| alg.from_coords(k)).collect();
    let points = match field.fp() {
        Some(fp) if affine_size(fp.p(), kernel.len()) <= EXHAUSTIVE_LIMIT => {
            let residues = AffineSolution {
                particular: particular.residues(),
                kernel: kernel.iter().map(IncidenceElement::residues).collect(),
            };
            Some(enumerate_affine(fp, &residues).iter().map(|v| alg.from_residues(v)).collect())
        }
        _ => None,
    };
    Ok(RightFactors { particular: Some(particular), kernel, points })
}

/// How to check a candidate map.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum VerifyMode {
    Exhaustive,
    Sampled { n: u64, seed: u64 },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Counterexample {
    pub f: ElementFile,
    pub g: ElementFile,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct VerificationReport {
    pub mode: VerifyMode,
    pub holds: bool,
    pub counterexample: Option<Counterexample>,
    /// Number of pairs `(f, g)` with `f g = eps` covered by the check; on
    /// failure, those covered before the counterexample was found.
    pub pairs_checked: u128,
}

/// Worker count for the parallel kernels; `None` uses the global pool.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct Jobs(pub Option<usize>);

impl Jobs {
    pub(crate) fn install<R: Send>(self, op: impl FnOnce() -> R + Send) -> R {
        match self.0 {
            Some(n) => match rayon::ThreadPoolBuilder::new().num_threads(n.max(1)).build() {
                Ok(pool) => pool.install(op),
                Err(_) => op(),
            },
            None => op(),
        }
    }
}

/// Checks `f g = eps => phi(f) phi(g) = eta`.
///
/// Exhaustive mode certifies the implication for every pair in the finite
/// algebra. Two reductions keep this at one small linear solve per `f` up to
/// scaling: `(r f, r^-1 g)` is a pair exactly when `(f, g)` is and both give
/// the same product, so only `f` whose first nonzero coordinate is `1` are
/// visited; and `g -> phi(f) phi(g)` is linear, so on the solution set
/// `g0 + span(k_i)` the implication holds iff `phi(f) phi(g0) = eta` and
/// `phi(f) phi(k_i) = 0` for every kernel vector.
pub fn verify_product_preserver(
    phi: &LinearMap,
    eps: &IncidenceElement,
    eta: &IncidenceElement,
    mode: VerifyMode,
    jobs: Jobs,
) -> Result<VerificationReport> {
    let alg = phi.algebra();
    if eps.algebra() != alg || eta.algebra() != alg {
        return Err(Error::MixedAlgebras);
    }
    match mode {
        VerifyMode::Exhaustive => {
            let fp = alg.field().fp().ok_or(Error::TooLargeForExhaustive { size: u128::MAX, limit: EXHAUSTIVE_LIMIT })?;
            let size = affine_size(fp.p(), alg.dim());
            if size > EXHAUSTIVE_LIMIT {
                return Err(Error::TooLargeForExhaustive { size, limit: EXHAUSTIVE_LIMIT });
            }
            let kernel = ResidueVerifier::new(alg, fp, &phi.residue_matrix(), &eps.residues(), &eta.residues());
            let (pairs, failure) = jobs.install(|| kernel.run_exhaustive());
            Ok(VerificationReport {
                mode,
                holds: failure.is_none(),
                counterexample: failure.map(|(f, g)| Counterexample {
                    f: alg.from_residues(&f).to_file(),
                    g: alg.from_residues(&g).to_file(),
                }),
                pairs_checked: pairs,
            })
        }
        VerifyMode::Sampled { n, seed } => verify_sampled(phi, eps, eta, n, seed),
    }
}

/// Residue-level exhaustive verifier with everything precomputed.
pub(crate) struct ResidueVerifier<'a> {
    basis: &'a crate::basis::BasisOrder,
    fp: Fp,
    matrix: Vec<u32>,
    columns: Vec<Vec<u32>>,
    eps: Vec<u32>,
    eta: Vec<u32>,
    solver: BlockSolver,
    /// A diagonal coordinate where `eps` is nonzero. Diagonals multiply
    /// pointwise, so every `f` with a right factor is nonzero there.
    required: Option<usize>,
}

/// A contiguous range of `f` with coordinate `lead` equal to `1` and the
/// free coordinates running through `start..end` in base `p`. Without a
/// required coordinate, the coordinates below `lead` are zero and those
/// above it are free; with one, every other coordinate is free.
#[derive(Clone, Copy)]
struct Unit {
    lead: usize,
    start: u64,
    end: u64,
}

const UNIT_LEN: u64 = 4096;

type Failure = (Vec<u32>, Vec<u32>);

impl<'a> ResidueVerifier<'a> {
    pub(crate) fn new(alg: &'a Algebra, fp: Fp, matrix: &[u32], eps: &[u32], eta: &[u32]) -> Self {
        let d = alg.dim();
        ResidueVerifier {
            basis: alg.basis(),
            fp,
            matrix: matrix.to_vec(),
            columns: (0..d).map(|j| (0..d).map(|i| matrix[i * d + j]).collect()).collect(),
            eps: eps.to_vec(),
            eta: eta.to_vec(),
            solver: BlockSolver::new(alg.basis()).prioritize(eps),
            required: alg.basis().pairs().iter().zip(eps).position(|(&(u, v), &e)| u == v && e != 0),
        }
    }

    fn free_coords(&self, lead: usize) -> Vec<usize> {
        let d = self.basis.dim();
        match self.required {
            Some(r) => (0..d).filter(|&k| k != r).collect(),
            None => (lead + 1..d).collect(),
        }
    }

    /// Checks one `f` given `phi(f)`; returns the number of right factors
    /// and, on failure, a violating `g`.
    fn check(&self, f: &[u32], phi_f: &[u32], scratch: &mut Scratch) -> (u128, Option<Vec<u32>>) {
        let fp = self.fp;
        let buf = &mut scratch.solve;
        if !self.solver.solve_into(fp, f, &self.eps, buf) {
            return (0, None);
        }
        let count = affine_size(fp.p(), buf.kernel_len());
        residue::combine_columns(fp, &self.columns, &buf.particular, &mut scratch.phi_g);
        residue::mul_into(fp, self.basis, phi_f, &scratch.phi_g, &mut scratch.prod);
        if scratch.prod != self.eta {
            return (count, Some(buf.particular.clone()));
        }
        for i in 0..buf.kernel_len() {
            let k = buf.kernel(i);
            residue::combine_columns(fp, &self.columns, k, &mut scratch.phi_g);
            residue::mul_into(fp, self.basis, phi_f, &scratch.phi_g, &mut scratch.prod);
            if scratch.prod.iter().any(|&v| v != 0) {
                let g: Vec<u32> = buf.particular.iter().zip(k).map(|(a, b)| fp.add(*a, *b)).collect();
                return (count, Some(g));
            }
        }
        (count, None)
    }

    fn units(&self) -> Vec<Unit> {
        let p = self.fp.p() as u64;
        let d = self.basis.dim();
        let leads: Vec<usize> = match self.required {
            Some(r) => vec![r],
            None => (0..d).collect(),
        };
        let mut units = Vec::new();
        for lead in leads {
            let tails = p.pow(self.free_coords(lead).len() as u32);
            let mut start = 0;
            while start < tails {
                units.push(Unit { lead, start, end: (start + UNIT_LEN).min(tails) });
                start += UNIT_LEN;
            }
        }
        units
    }

    /// Runs one unit; pairs are weighted by `p - 1` for the scalings of `f`.
    fn run_unit(&self, unit: Unit) -> (u128, Option<Failure>) {
        let fp = self.fp;
        let p = fp.p();
        let d = self.basis.dim();
        let weight = (p - 1) as u128;
        let mut scratch = Scratch::new(d);
        let free = self.free_coords(unit.lead);
        let mut digits = vec![0u32; free.len()];
        residue::decode(unit.start, p, &mut digits);
        let mut f = vec![0u32; d];
        f[unit.lead] = 1;
        for (&k, &digit) in free.iter().zip(&digits) {
            f[k] = digit;
        }
        let mut phi_f = vec![0u32; d];
        residue::mat_vec(fp, &self.matrix, &f, &mut phi_f);
        let mut pairs = 0u128;
        for t in unit.start..unit.end {
            if t > unit.start {
                // base-p increment of the free coordinates; every changed digit moves by +1 mod p
                for &k in &free {
                    f[k] = if f[k] + 1 == p { 0 } else { f[k] + 1 };
                    for (a, b) in phi_f.iter_mut().zip(&self.columns[k]) {
                        *a = fp.add(*a, *b);
                    }
                    if f[k] != 0 {
                        break;
                    }
                }
            }
            let (count, failure) = self.check(&f, &phi_f, &mut scratch);
            pairs += weight * count;
            if let Some(g) = failure {
                return (pairs, Some((f, g)));
            }
        }
        (pairs, None)
    }

    /// `f = 0` contributes only when `eps = 0`.
    fn run_zero(&self) -> (u128, Option<Failure>) {
        let d = self.basis.dim();
        let zero = vec![0u32; d];
        let (count, failure) = self.check(&zero, &zero, &mut Scratch::new(d));
        (count, failure.map(|g| (zero, g)))
    }

    /// Visits every `f` up to scaling. Returns the number of pairs covered
    /// and the first violation in enumeration order.
    pub(crate) fn run_exhaustive(&self) -> (u128, Option<Failure>) {
        let units = self.units();
        let results: Vec<(u128, Option<Failure>)> = units.par_iter().map(|&u| self.run_unit(u)).collect();
        let mut pairs = 0;
        for (count, failure) in std::iter::once(self.run_zero()).chain(results) {
            pairs += count;
            if failure.is_some() {
                return (pairs, failure);
            }
        }
        (pairs, None)
    }

    /// Whether the implication holds, stopping at the first failure.
    pub(crate) fn holds(&self) -> bool {
        self.run_zero().1.is_none() && self.units().into_iter().all(|u| self.run_unit(u).1.is_none())
    }
}

struct Scratch {
    phi_g: Vec<u32>,
    prod: Vec<u32>,
    solve: SolveBuf,
}

impl Scratch {
    fn new(d: usize) -> Self {
        Scratch { phi_g: vec![0; d], prod: vec![0; d], solve: SolveBuf::new(d) }
    }
}

/// Draws a coordinate vector: uniform over `F_p`, small integers over `Q`.
pub(crate) fn random_coords(field: Field, d: usize, rng: &mut impl Rng) -> Vec<Scalar> {
    match field.order() {
        Some(p) => (0..d).map(|_| field.from_residue(rng.gen_range(0..p))).collect(),
        None => (0..d).map(|_| field.from_i64(rng.gen_range(-3..=3))).collect(),
    }
}

/// One sampled pair: `f` uniform, `g` uniform among the right factors.
/// `None` when `f g = eps` has no solution.
trait Sampler {
    type V: Clone;
    fn draw(&self, rng: &mut ChaCha8Rng) -> Option<(Self::V, Self::V)>;
    fn preserved(&self, f: &Self::V, g: &Self::V) -> bool;
    fn element(&self, v: &Self::V) -> IncidenceElement;
}

struct ResidueSampler<'a> {
    alg: &'a Algebra,
    fp: Fp,
    columns: Vec<Vec<u32>>,
    eps: Vec<u32>,
    eta: Vec<u32>,
    solver: BlockSolver,
    buf: std::cell::RefCell<(SolveBuf, Vec<u32>, Vec<u32>, Vec<u32>)>,
}

impl Sampler for ResidueSampler<'_> {
    type V = Vec<u32>;

    fn draw(&self, rng: &mut ChaCha8Rng) -> Option<(Vec<u32>, Vec<u32>)> {
        let p = self.fp.p();
        let f: Vec<u32> = (0..self.alg.dim()).map(|_| rng.gen_range(0..p)).collect();
        let buf = &mut self.buf.borrow_mut().0;
        if !self.solver.solve_into(self.fp, &f, &self.eps, buf) {
            return None;
        }
        let mut g = buf.particular.clone();
        for i in 0..buf.kernel_len() {
            let c = rng.gen_range(0..p);
            for (a, b) in g.iter_mut().zip(buf.kernel(i)) {
                *a = self.fp.add(*a, self.fp.mul(c, *b));
            }
        }
        Some((f, g))
    }

    fn preserved(&self, f: &Vec<u32>, g: &Vec<u32>) -> bool {
        let (_, phi_f, phi_g, prod) = &mut *self.buf.borrow_mut();
        residue::combine_columns(self.fp, &self.columns, f, phi_f);
        residue::combine_columns(self.fp, &self.columns, g, phi_g);
        residue::mul_into(self.fp, self.alg.basis(), phi_f, phi_g, prod);
        *prod == self.eta
    }

    fn element(&self, v: &Vec<u32>) -> IncidenceElement {
        self.alg.from_residues(v)
    }
}

struct ScalarSampler<'a> {
    phi: &'a LinearMap,
    field: Field,
    eps: Vec<Scalar>,
    eta: Vec<Scalar>,
}

impl Sampler for ScalarSampler<'_> {
    type V = Vec<Scalar>;

    fn draw(&self, rng: &mut ChaCha8Rng) -> Option<(Vec<Scalar>, Vec<Scalar>)> {
        let dense = DenseAlgebra::new(&self.field, self.phi.basis());
        let f = random_coords(self.field, dense.dim(), rng);
        let sol = dense.right_factors(&f, &self.eps)?;
        let mut g = sol.particular;
        for k in &sol.kernel {
            let c = random_coords(self.field, 1, rng).remove(0);
            g = dense.add(&g, &dense.scale(&c, k));
        }
        Some((f, g))
    }

    fn preserved(&self, f: &Vec<Scalar>, g: &Vec<Scalar>) -> bool {
        let dense = DenseAlgebra::new(&self.field, self.phi.basis());
        let m = self.phi.matrix();
        dense.mul(&m.mul_vec(&self.field, f), &m.mul_vec(&self.field, g)) == self.eta
    }

    fn element(&self, v: &Vec<Scalar>) -> IncidenceElement {
        self.phi.algebra().from_coords(v)
    }
}

fn run_sampled<S: Sampler>(sampler: &S, n: u64, seed: u64) -> VerificationReport {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mode = VerifyMode::Sampled { n, seed };
    let max_attempts = n.saturating_mul(1000).max(10_000);
    let mut checked = 0u64;
    let mut attempts = 0u64;
    while checked < n && attempts < max_attempts {
        attempts += 1;
        let Some((f, g)) = sampler.draw(&mut rng) else {
            continue;
        };
        checked += 1;
        if !sampler.preserved(&f, &g) {
            return VerificationReport {
                mode,
                holds: false,
                counterexample: Some(Counterexample {
                    f: sampler.element(&f).to_file(),
                    g: sampler.element(&g).to_file(),
                }),
                pairs_checked: checked as u128,
            };
        }
    }
    VerificationReport { mode, holds: true, counterexample: None, pairs_checked: checked as u128 }
}

fn verify_sampled(
    phi: &LinearMap,
    eps: &IncidenceElement,
    eta: &IncidenceElement,
    n: u64,
    seed: u64,
) -> Result<VerificationReport> {
    let alg = phi.algebra();
    let field = alg.field();
    Ok(match field.fp() {
        Some(fp) => {
            let eps = eps.residues();
            let sampler = ResidueSampler {
                alg,
                fp,
                columns: phi.residue_columns(),
                solver: BlockSolver::new(alg.basis()).prioritize(&eps),
                buf: std::cell::RefCell::new((SolveBuf::new(alg.dim()), vec![0; alg.dim()], vec![0; alg.dim()], vec![0; alg.dim()])),
                eps,
                eta: eta.residues(),
            };
            run_sampled(&sampler, n, seed)
        }
        None => {
            let sampler = ScalarSampler { phi, field, eps: eps.coords(), eta: eta.coords() };
            run_sampled(&sampler, n, seed)
        }
    })
}

/// Zero-product conditions on the standard basis: `phi(e_xy) phi(e_uv) = 0`
/// whenever `e_xy e_uv = 0`, and
/// `phi(e_x) phi(e_xy) = phi(e_xz) phi(e_zy) = phi(e_xy) phi(e_y)` for `x < z < y`
/// (the outer equality also for `x < y`).
pub fn zero_product_basis_check(phi: &LinearMap) -> bool {
    let alg = phi.algebra();
    let field = alg.field();
    let basis = alg.basis();
    let dense = DenseAlgebra::new(&field, basis);
    let d = basis.dim();
    let images: Vec<Vec<Scalar>> = (0..d).map(|j| phi.matrix().column(j)).collect();
    let mut nonzero = vec![false; d * d];
    for &(i, j, _) in basis.products() {
        nonzero[i * d + j] = true;
    }
    let mut prod = dense.zero();
    for i in 0..d {
        for j in 0..d {
            if !nonzero[i * d + j] {
                dense.mul_into(&images[i], &images[j], &mut prod);
                if !dense.is_zero(&prod) {
                    return false;
                }
            }
        }
    }
    let poset = alg.poset();
    let n = poset.len();
    let idx = |u: usize, v: usize| basis.index(u, v).expect("comparable");
    for x in 0..n {
        for y in (0..n).filter(|&y| poset.lt(x, y)) {
            let reference = dense.mul(&images[idx(x, x)], &images[idx(x, y)]);
            if dense.mul(&images[idx(x, y)], &images[idx(y, y)]) != reference {
                return false;
            }
            for z in (0..n).filter(|&z| poset.lt(x, z) && poset.lt(z, y)) {
                if dense.mul(&images[idx(x, z)], &images[idx(z, y)]) != reference {
                    return false;
                }
            }
        }
    }
    true
}

/// Definitional check over a finite field: every pair with `f g = 0` is
/// enumerated and `phi(f) phi(g) = 0` is tested.
pub fn zero_product_exhaustive(phi: &LinearMap) -> Result<bool> {
    let alg = phi.algebra();
    let fp = alg.field().fp().ok_or(Error::TooLargeForExhaustive { size: u128::MAX, limit: EXHAUSTIVE_LIMIT })?;
    let d = alg.dim();
    let size = affine_size(fp.p(), 2 * d);
    if size > EXHAUSTIVE_LIMIT {
        return Err(Error::TooLargeForExhaustive { size, limit: EXHAUSTIVE_LIMIT });
    }
    let basis = alg.basis();
    let matrix = phi.residue_matrix();
    let total = affine_size(fp.p(), d) as u64;
    let elements: Vec<Vec<u32>> = (0..total)
        .map(|i| {
            let mut v = vec![0u32; d];
            residue::decode(i, fp.p(), &mut v);
            v
        })
        .collect();
    let images: Vec<Vec<u32>> = elements
        .iter()
        .map(|f| {
            let mut out = vec![0u32; d];
            residue::mat_vec(fp, &matrix, f, &mut out);
            out
        })
        .collect();
    let mut prod = vec![0u32; d];
    for (f, phi_f) in elements.iter().zip(&images) {
        for (g, phi_g) in elements.iter().zip(&images) {
            residue::mul_into(fp, basis, f, g, &mut prod);
            if prod.iter().any(|&v| v != 0) {
                continue;
            }
            residue::mul_into(fp, basis, phi_f, phi_g, &mut prod);
            if prod.iter().any(|&v| v != 0) {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::poset::tests::v_poset;
    use crate::poset::Poset;

    fn v_alg(p: u64) -> Algebra {
        Algebra::new(v_poset(), Field::prime(p).unwrap())
    }

    fn swap_map(alg: &Algebra) -> LinearMap {
        LinearMap::induced(alg, &alg.poset().same_orbit("a", "b").unwrap().unwrap())
    }

    /// Independent oracle: enumerate every pair `(f, g)` directly.
    fn brute_pairs(phi: &LinearMap, eps: &IncidenceElement, eta: &IncidenceElement) -> (u128, bool) {
        let alg = phi.algebra();
        let fp = alg.field().fp().unwrap();
        let d = alg.dim();
        let total = (fp.p() as u64).pow(d as u32);
        let all: Vec<IncidenceElement> = (0..total)
            .map(|i| {
                let mut v = vec![0; d];
                residue::decode(i, fp.p(), &mut v);
                alg.from_residues(&v)
            })
            .collect();
        let mut pairs = 0;
        let mut holds = true;
        for f in &all {
            for g in &all {
                if &(f * g) == eps {
                    pairs += 1;
                    let prod = &phi.apply(f).unwrap() * &phi.apply(g).unwrap();
                    holds &= &prod == eta;
                }
            }
        }
        (pairs, holds)
    }

    #[test]
    fn right_factor_examples() {
        let alg = v_alg(2);
        let ea = alg.e(0, 0);
        let r = right_factors(&alg.identity(), &ea).unwrap();
        assert_eq!(r.points.as_deref(), Some(&[ea.clone()][..]));

        let r = right_factors(&ea, &ea).unwrap();
        assert_eq!(r.count(), Some(8));
        let points = r.points.unwrap();
        assert_eq!(points.len(), 8);
        for g in &points {
            assert_eq!(&ea * g, ea);
            assert!(g.get(0, 0).is_one());
            assert!(g.get(0, 2).is_zero());
        }

        let r = right_factors(&alg.zero(), &ea).unwrap();
        assert!(r.is_empty());
        assert_eq!(r.count(), Some(0));
    }

    #[test]
    fn right_factors_over_q_have_no_enumeration() {
        let alg = Algebra::new(v_poset(), Field::Rational);
        let ea = alg.e(0, 0);
        let r = right_factors(&ea, &ea).unwrap();
        assert_eq!(r.kernel.len(), 3);
        assert_eq!(r.points, None);
        assert_eq!(r.count(), None);
    }

    #[test]
    fn exhaustive_matches_pair_oracle() {
        let alg = v_alg(2);
        let (ea, eb, ec) = (alg.e(0, 0), alg.e(1, 1), alg.e(2, 2));
        let swap = swap_map(&alg);
        let report = verify_product_preserver(&swap, &ea, &eb, VerifyMode::Exhaustive, Jobs::default()).unwrap();
        let (pairs, holds) = brute_pairs(&swap, &ea, &eb);
        assert!(holds && report.holds);
        assert_eq!(report.pairs_checked, pairs);
        assert!(report.counterexample.is_none());

        let id = LinearMap::identity(&alg);
        let report = verify_product_preserver(&id, &ea, &ec, VerifyMode::Exhaustive, Jobs::default()).unwrap();
        assert!(!report.holds);
        let cx = report.counterexample.unwrap();
        let f = alg.element_from_file(&cx.f).unwrap();
        let g = alg.element_from_file(&cx.g).unwrap();
        assert_eq!(&f * &g, ea);
        assert_ne!(&f * &g, ec);
        assert!(!brute_pairs(&id, &ea, &ec).1);
    }

    #[test]
    fn exhaustive_matches_pair_oracle_over_f3() {
        let alg = Algebra::new(Poset::chain(2), Field::prime(3).unwrap());
        let e1 = alg.e(0, 0);
        let eps = &e1 + &alg.e(0, 1);
        let maps = [
            LinearMap::identity(&alg),
            LinearMap::identity(&alg).neg(),
            LinearMap::inner(&(&alg.identity() + &alg.e(0, 1))).unwrap(),
        ];
        for phi in &maps {
            for (a, b) in [(&e1, &e1), (&eps, &e1), (&e1, &eps), (&eps, &eps)] {
                let report = verify_product_preserver(phi, a, b, VerifyMode::Exhaustive, Jobs(Some(1))).unwrap();
                let (pairs, holds) = brute_pairs(phi, a, b);
                assert_eq!(report.holds, holds, "{phi:?} {a} {b}");
                if holds {
                    assert_eq!(report.pairs_checked, pairs);
                }
            }
        }
    }

    #[test]
    fn sign_cancels() {
        let alg = v_alg(3);
        let phi = swap_map(&alg).neg();
        let report =
            verify_product_preserver(&phi, &alg.e(0, 0), &alg.e(1, 1), VerifyMode::Exhaustive, Jobs::default()).unwrap();
        assert!(report.holds);
        let sampled = verify_product_preserver(
            &phi,
            &alg.e(0, 0),
            &alg.e(1, 1),
            VerifyMode::Sampled { n: 200, seed: 7 },
            Jobs::default(),
        )
        .unwrap();
        assert!(sampled.holds);
        assert_eq!(sampled.pairs_checked, 200);
    }

    #[test]
    fn sampled_is_reproducible_and_finds_failures() {
        let alg = Algebra::new(v_poset(), Field::Rational);
        let id = LinearMap::identity(&alg);
        let mode = VerifyMode::Sampled { n: 50, seed: 11 };
        let a = verify_product_preserver(&id, &alg.e(0, 0), &alg.e(2, 2), mode, Jobs::default()).unwrap();
        let b = verify_product_preserver(&id, &alg.e(0, 0), &alg.e(2, 2), mode, Jobs::default()).unwrap();
        assert_eq!(a, b);
        assert!(!a.holds);
    }

    #[test]
    fn exhaustive_limits() {
        let big = Algebra::new(Poset::chain(5), Field::prime(5).unwrap());
        let e = big.e(0, 0);
        assert!(matches!(
            verify_product_preserver(&LinearMap::identity(&big), &e, &e, VerifyMode::Exhaustive, Jobs::default()),
            Err(Error::TooLargeForExhaustive { .. })
        ));
        let q = Algebra::new(v_poset(), Field::Rational);
        assert!(matches!(
            verify_product_preserver(&LinearMap::identity(&q), &q.e(0, 0), &q.e(0, 0), VerifyMode::Exhaustive, Jobs::default()),
            Err(Error::TooLargeForExhaustive { .. })
        ));
    }

    #[test]
    fn zero_product_examples() {
        let alg = v_alg(2);
        assert!(zero_product_basis_check(&swap_map(&alg)));
        assert!(zero_product_basis_check(&LinearMap::zero(&alg)));
        // e_a -> e_ac, everything else fixed
        let mut images: Vec<IncidenceElement> = (0..alg.dim()).map(|k| LinearMap::identity(&alg).image_of_basis(k)).collect();
        images[alg.basis().diag(0)] = alg.e(0, 2);
        let phi = LinearMap::from_images(&alg, &images).unwrap();
        assert!(!zero_product_basis_check(&phi));
        assert!(!zero_product_exhaustive(&phi).unwrap());
        assert!(zero_product_exhaustive(&swap_map(&alg)).unwrap());
    }
}
