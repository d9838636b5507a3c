//! Bijective linear maps `phi` of `I(X,F)` with `f g = eps => phi(f) phi(g) = eta`
//! for primitive idempotents `eps`, `eta`: existence, construction,
//! verification and brute-force classification.

mod bruteforce;
mod lemmas;
mod verify;

pub use bruteforce::{bruteforce_classify, gl_order, Budget, Census, FoundPreserver};
pub use lemmas::{lemma_suite, LemmaItem, LemmaReport};
pub use verify::{
    right_factors, verify_product_preserver, zero_product_basis_check, zero_product_exhaustive, Counterexample,
    Jobs, RightFactors, VerificationReport, VerifyMode, EXHAUSTIVE_LIMIT,
};

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::dense::residue;
use crate::error::{Error, Result};
use crate::incidence::{Algebra, IncidenceElement};
use crate::linalg::affine_size;
use crate::linmaps::{Cocycle, LinearMap, MapFile, PmVerdict};
use crate::poset::PosetAutomorphism;
use crate::scalars::Scalar;

/// Exhaustive verification is used by [`decide_existence`] up to this many elements.
pub const DECIDE_EXHAUSTIVE_LIMIT: u128 = 1 << 20;
pub const DECIDE_SAMPLES: u64 = 10_000;

/// A pair of primitive idempotents in the incidence algebra of a connected poset.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PreserverProblem {
    epsilon: IncidenceElement,
    eta: IncidenceElement,
    x: usize,
    y: usize,
}

impl PreserverProblem {
    pub fn new(epsilon: IncidenceElement, eta: IncidenceElement) -> Result<Self> {
        if epsilon.algebra() != eta.algebra() {
            return Err(Error::MixedAlgebras);
        }
        if !epsilon.algebra().poset().is_connected()? {
            return Err(Error::NotConnected);
        }
        let x = epsilon.primitive_base()?;
        let y = eta.primitive_base()?;
        Ok(PreserverProblem { epsilon, eta, x, y })
    }

    /// The standard pair `(e_x, e_y)`.
    pub fn standard(alg: &Algebra, x: &str, y: &str) -> Result<Self> {
        Self::new(alg.basis_element(x, x)?, alg.basis_element(y, y)?)
    }

    pub fn algebra(&self) -> &Algebra {
        self.epsilon.algebra()
    }

    pub fn epsilon(&self) -> &IncidenceElement {
        &self.epsilon
    }

    pub fn eta(&self) -> &IncidenceElement {
        &self.eta
    }

    pub fn x(&self) -> usize {
        self.x
    }

    pub fn y(&self) -> usize {
        self.y
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Obstruction {
    NoOrbitAutomorphism,
    /// `(|(X - x)^2_<=|, |(X - y)^2_<=|)` with the first strictly larger.
    PairCount(usize, usize),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PreserverVerdict {
    pub exists: bool,
    pub witness: Option<(LinearMap, PosetAutomorphism)>,
    pub obstruction: Option<Obstruction>,
    pub verification: Option<VerificationReport>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct WitnessFile {
    pub map: MapFile,
    pub lambda: Vec<(String, String)>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct VerdictFile {
    pub exists: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub witness: Option<WitnessFile>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub obstruction: Option<Obstruction>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub verification: Option<VerificationReport>,
}

impl PreserverVerdict {
    pub fn to_file(&self) -> VerdictFile {
        VerdictFile {
            exists: self.exists,
            witness: self.witness.as_ref().map(|(map, lambda)| WitnessFile {
                map: map.to_file(),
                lambda: lambda.named(map.algebra().poset()),
            }),
            obstruction: self.obstruction,
            verification: self.verification.clone(),
        }
    }
}

/// Decides whether a preserver exists; it does exactly when some poset
/// automorphism sends `x` to `y`.
pub fn decide_existence(problem: &PreserverProblem, jobs: Jobs) -> Result<PreserverVerdict> {
    let alg = problem.algebra();
    let poset = alg.poset();
    match poset.orbit_witness(problem.x, problem.y) {
        Some(lambda) => {
            let options = ConstructOptions { lambda: Some(lambda.clone()), ..Default::default() };
            let map = construct_preserver(problem, &options)?;
            let mode = match alg.field().order() {
                Some(p) if affine_size(p, alg.dim()) <= DECIDE_EXHAUSTIVE_LIMIT => VerifyMode::Exhaustive,
                _ => VerifyMode::Sampled { n: DECIDE_SAMPLES, seed: 0 },
            };
            let report = verify_product_preserver(&map, &problem.epsilon, &problem.eta, mode, jobs)?;
            if !report.holds {
                return Err(Error::NotAutomorphism("constructed witness failed verification".into()));
            }
            Ok(PreserverVerdict {
                exists: true,
                witness: Some((map, lambda)),
                obstruction: None,
                verification: Some(report),
            })
        }
        None => {
            let without_x = poset.delete_element(poset.name(problem.x))?.comparable_pair_count();
            let without_y = poset.delete_element(poset.name(problem.y))?.comparable_pair_count();
            let obstruction = if without_x > without_y {
                Obstruction::PairCount(without_x, without_y)
            } else {
                Obstruction::NoOrbitAutomorphism
            };
            Ok(PreserverVerdict { exists: false, witness: None, obstruction: Some(obstruction), verification: None })
        }
    }
}

/// Free parameters of a constructed preserver.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ConstructOptions {
    pub sign: i8,
    /// Poset automorphism with `lambda(x) = y`; the first found when absent.
    pub lambda: Option<PosetAutomorphism>,
    pub sigma: Option<Cocycle>,
    /// Applied before `lambda`; must commute with `e_x`.
    pub inner_left: Option<IncidenceElement>,
    /// Applied after `lambda`; must commute with `e_y`.
    pub inner_right: Option<IncidenceElement>,
}

impl Default for ConstructOptions {
    fn default() -> Self {
        ConstructOptions { sign: 1, lambda: None, sigma: None, inner_left: None, inner_right: None }
    }
}

/// `sign * psi2^-1 ∘ inner(beta_r) ∘ lambda^ ∘ M_sigma ∘ inner(beta_l) ∘ psi1^-1`,
/// where `psi1^-1` moves `eps` to `e_x` and `psi2^-1` moves `e_y` to `eta`.
pub fn construct_preserver(problem: &PreserverProblem, options: &ConstructOptions) -> Result<LinearMap> {
    let alg = problem.algebra();
    let poset = alg.poset();
    let (x, y) = (problem.x, problem.y);
    if options.sign != 1 && options.sign != -1 {
        return Err(Error::BadOptions(format!("sign must be 1 or -1, got {}", options.sign)));
    }
    let lambda = match &options.lambda {
        Some(l) if l.apply(x) != y => {
            return Err(Error::BadOptions(format!(
                "lambda sends {} to {}, not {}",
                poset.name(x),
                poset.name(l.apply(x)),
                poset.name(y)
            )))
        }
        Some(l) => {
            poset.automorphism_from_perm(l.perm().to_vec()).map_err(|e| Error::BadOptions(e.to_string()))?
        }
        None => poset
            .orbit_witness(x, y)
            .ok_or_else(|| Error::NoPreserver(poset.name(x).into(), poset.name(y).into()))?,
    };
    let mut core = LinearMap::induced(alg, &lambda);
    if let Some(sigma) = &options.sigma {
        core = core.compose(&LinearMap::multiplicative(alg, sigma)?)?;
    }
    if let Some(beta) = &options.inner_left {
        core = core.compose(&twist(alg, beta)?)?;
    }
    if let Some(beta) = &options.inner_right {
        core = twist(alg, beta)?.compose(&core)?;
    }
    if core.apply(&alg.e(x, x))? != alg.e(y, y) {
        return Err(Error::BadOptions("inner twists do not keep e_x -> e_y".into()));
    }
    let to_standard = LinearMap::inner(&problem.epsilon.conjugator_to_standard()?)?;
    let from_standard = LinearMap::inner(&problem.eta.conjugator_to_standard()?.invert()?)?;
    let map = from_standard.compose(&core)?.compose(&to_standard)?.with_sign(options.sign);
    if map.pm_automorphism() == PmVerdict::Neither {
        return Err(Error::NotAutomorphism("constructed map is not a signed automorphism".into()));
    }
    Ok(map)
}

fn twist(alg: &Algebra, beta: &IncidenceElement) -> Result<LinearMap> {
    if beta.algebra() != alg {
        return Err(Error::MixedAlgebras);
    }
    LinearMap::inner(beta).map_err(|_| Error::BadOptions("inner twist is not invertible".into()))
}

/// Random unit scalar: uniform over `F_p^*`, a small nonzero integer over `Q`.
pub fn random_unit(alg: &Algebra, rng: &mut impl Rng) -> Scalar {
    let field = alg.field();
    match field.order() {
        Some(p) => field.from_residue(rng.gen_range(1..p)),
        None => {
            let n = rng.gen_range(1..=3);
            field.from_i64(if rng.gen_bool(0.5) { n } else { -n })
        }
    }
}

/// Random invertible element commuting with `e_x`: no strict entries in row or column `x`.
pub fn random_twist(alg: &Algebra, x: usize, rng: &mut impl Rng) -> IncidenceElement {
    let field = alg.field();
    let entries: Vec<((usize, usize), Scalar)> = alg
        .basis()
        .pairs()
        .iter()
        .filter(|&&(u, v)| u == v || (u != x && v != x))
        .map(|&(u, v)| {
            let value = if u == v {
                random_unit(alg, rng)
            } else {
                verify::random_coords(field, 1, rng).remove(0)
            };
            ((u, v), value)
        })
        .collect();
    alg.from_entries(entries)
}

/// Coboundary `sigma(u,v) = rho(u) rho(v)^-1` for random units `rho`.
pub fn random_coboundary(alg: &Algebra, rng: &mut impl Rng) -> Cocycle {
    let rho: Vec<Scalar> = (0..alg.poset().len()).map(|_| random_unit(alg, rng)).collect();
    Cocycle::coboundary(alg, &rho).expect("units give a cocycle")
}

/// Every `f` with `f^2 = e_y`, by enumeration of the finite algebra.
pub fn square_roots_of(alg: &Algebra, y: &str) -> Result<Vec<IncidenceElement>> {
    let y = alg.poset().index_of(y)?;
    let fp = alg
        .field()
        .fp()
        .ok_or(Error::TooLargeForExhaustive { size: u128::MAX, limit: EXHAUSTIVE_LIMIT })?;
    let d = alg.dim();
    let size = affine_size(fp.p(), d);
    if size > EXHAUSTIVE_LIMIT {
        return Err(Error::TooLargeForExhaustive { size, limit: EXHAUSTIVE_LIMIT });
    }
    let target = alg.e(y, y).residues();
    let mut digits = vec![0u32; d];
    let mut square = vec![0u32; d];
    let mut roots = Vec::new();
    for index in 0..size as u64 {
        residue::decode(index, fp.p(), &mut digits);
        residue::mul_into(fp, alg.basis(), &digits, &digits, &mut square);
        if square == target {
            roots.push(alg.from_residues(&digits));
        }
    }
    Ok(roots)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::poset::tests::v_poset;
    use crate::poset::Poset;
    use crate::scalars::Field;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn v_alg(p: u64) -> Algebra {
        Algebra::new(v_poset(), Field::prime(p).unwrap())
    }

    #[test]
    fn problem_validation() {
        let alg = v_alg(2);
        let not_idempotent = &alg.e(0, 0) + &alg.e(1, 2);
        assert_eq!(PreserverProblem::new(not_idempotent, alg.e(1, 1)).unwrap_err(), Error::NotPrimitive);
        assert_eq!(PreserverProblem::new(alg.identity(), alg.e(1, 1)).unwrap_err(), Error::NotPrimitive);
        let split = Algebra::new(Poset::antichain(2), Field::prime(2).unwrap());
        assert_eq!(PreserverProblem::standard(&split, "a", "b").unwrap_err(), Error::NotConnected);
    }

    #[test]
    fn decide_examples() {
        let alg = v_alg(2);
        let verdict = decide_existence(&PreserverProblem::standard(&alg, "a", "b").unwrap(), Jobs::default()).unwrap();
        assert!(verdict.exists);
        let (map, lambda) = verdict.witness.unwrap();
        assert_eq!(lambda.perm(), &[1, 0, 2]);
        assert_eq!(map, LinearMap::induced(&alg, &lambda));
        assert!(verdict.verification.unwrap().holds);

        for p in [2, 3, 5] {
            let alg = v_alg(p);
            let verdict = decide_existence(&PreserverProblem::standard(&alg, "a", "c").unwrap(), Jobs::default()).unwrap();
            assert!(!verdict.exists && verdict.witness.is_none());
            assert_eq!(verdict.obstruction, Some(Obstruction::PairCount(3, 2)));
        }
        let q = Algebra::new(v_poset(), Field::Rational);
        let verdict = decide_existence(&PreserverProblem::standard(&q, "c", "a").unwrap(), Jobs::default()).unwrap();
        assert_eq!(verdict.obstruction, Some(Obstruction::NoOrbitAutomorphism));

        let chain = Algebra::new(Poset::chain(3), Field::prime(3).unwrap());
        let verdict = decide_existence(&PreserverProblem::standard(&chain, "1", "1").unwrap(), Jobs::default()).unwrap();
        assert!(verdict.exists);
        assert!(verdict.witness.unwrap().1.is_identity());
    }

    #[test]
    fn verdict_json_shape() {
        let alg = v_alg(2);
        let verdict = decide_existence(&PreserverProblem::standard(&alg, "a", "c").unwrap(), Jobs::default()).unwrap();
        let json = serde_json::to_string(&verdict.to_file()).unwrap();
        assert_eq!(json, r#"{"exists":false,"obstruction":{"pair_count":[3,2]}}"#);
    }

    #[test]
    fn construct_examples() {
        let alg = v_alg(2);
        let problem = PreserverProblem::standard(&alg, "a", "b").unwrap();
        let swap = alg.poset().orbit_witness(0, 1).unwrap();
        let map = construct_preserver(&problem, &ConstructOptions::default()).unwrap();
        assert_eq!(map, LinearMap::induced(&alg, &swap));

        let alg3 = v_alg(3);
        let problem3 = PreserverProblem::standard(&alg3, "a", "b").unwrap();
        let neg = construct_preserver(&problem3, &ConstructOptions { sign: -1, ..Default::default() }).unwrap();
        assert_eq!(neg, LinearMap::induced(&alg3, &swap).neg());
        assert_eq!(neg.pm_automorphism(), PmVerdict::NegativeOfAutomorphism);

        let eps = &alg.e(0, 0) + &alg.e(0, 2);
        let problem = PreserverProblem::new(eps.clone(), alg.e(1, 1)).unwrap();
        let map = construct_preserver(&problem, &ConstructOptions::default()).unwrap();
        let u = eps.conjugator_to_standard().unwrap();
        let expected = LinearMap::induced(&alg, &swap).compose(&LinearMap::inner(&u).unwrap()).unwrap();
        assert_eq!(map, expected);
        let report = verify_product_preserver(&map, &eps, &alg.e(1, 1), VerifyMode::Exhaustive, Jobs::default()).unwrap();
        assert!(report.holds);
    }

    #[test]
    fn construct_rejects_bad_options() {
        let alg = v_alg(3);
        let problem = PreserverProblem::standard(&alg, "a", "b").unwrap();
        let bad_sign = ConstructOptions { sign: 2, ..Default::default() };
        assert!(matches!(construct_preserver(&problem, &bad_sign), Err(Error::BadOptions(_))));
        let moves_ea = ConstructOptions { inner_left: Some(&alg.identity() + &alg.e(0, 2)), ..Default::default() };
        assert!(matches!(construct_preserver(&problem, &moves_ea), Err(Error::BadOptions(_))));
        let id = ConstructOptions { lambda: Some(PosetAutomorphism::identity(3)), ..Default::default() };
        assert!(matches!(construct_preserver(&problem, &id), Err(Error::BadOptions(_))));
        let none = PreserverProblem::standard(&alg, "a", "c").unwrap();
        assert!(matches!(construct_preserver(&none, &ConstructOptions::default()), Err(Error::NoPreserver(..))));
    }

    #[test]
    fn random_twists_keep_the_pair() {
        let alg = v_alg(5);
        let problem = PreserverProblem::standard(&alg, "a", "b").unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..10 {
            let options = ConstructOptions {
                sign: -1,
                lambda: None,
                sigma: Some(random_coboundary(&alg, &mut rng)),
                inner_left: Some(random_twist(&alg, 0, &mut rng)),
                inner_right: Some(random_twist(&alg, 1, &mut rng)),
            };
            let map = construct_preserver(&problem, &options).unwrap();
            let report = verify_product_preserver(&map, &alg.e(0, 0), &alg.e(1, 1), VerifyMode::Exhaustive, Jobs::default())
                .unwrap();
            assert!(report.holds);
        }
    }

    #[test]
    fn square_root_examples() {
        let alg = v_alg(3);
        assert_eq!(square_roots_of(&alg, "c").unwrap(), vec![alg.e(2, 2), alg.e(2, 2).scale(&alg.field().from_i64(2))]);
        let alg = v_alg(2);
        let mut roots = square_roots_of(&alg, "a").unwrap();
        roots.sort_by_key(|r| r.residues());
        let mut expected = vec![alg.e(0, 0), &alg.e(0, 0) + &alg.e(1, 2)];
        expected.sort_by_key(|r| r.residues());
        assert_eq!(roots, expected);
        assert!(matches!(
            square_roots_of(&Algebra::new(v_poset(), Field::Rational), "a"),
            Err(Error::TooLargeForExhaustive { .. })
        ));
    }
}
