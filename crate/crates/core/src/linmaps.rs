//! Linear endomorphisms of `I(X,F)` as matrices over the standard basis,
//! the three automorphism families and the decomposition of automorphisms.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::basis::BasisOrder;
use crate::dense::DenseAlgebra;
use crate::error::{Error, Result};
use crate::incidence::{Algebra, ElementFile, IncidenceElement};
use crate::linalg::Matrix;
use crate::poset::{Poset, PosetAutomorphism};
use crate::scalars::Scalar;

/// A linear map; column `j` holds the coordinates of the image of the
/// `j`-th basis element.
#[derive(Clone, PartialEq, Eq)]
pub struct LinearMap {
    alg: Algebra,
    matrix: Matrix<Scalar>,
}

impl std::fmt::Debug for LinearMap {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        writeln!(f, "LinearMap over {:?}", self.alg)?;
        for i in 0..self.matrix.rows() {
            let row: Vec<String> = self.matrix.row(i).iter().map(|s| s.to_string()).collect();
            writeln!(f, "  [{}]", row.join(" "))?;
        }
        Ok(())
    }
}

/// Outcome of [`LinearMap::pm_automorphism`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PmVerdict {
    Automorphism,
    NegativeOfAutomorphism,
    Neither,
}

/// On-disk map: echoed basis plus row-major matrix of scalar strings.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MapFile {
    pub basis: Vec<[String; 2]>,
    pub matrix: Vec<Vec<String>>,
}

impl MapFile {
    /// Recovers the poset from the echoed basis: diagonal pairs list the
    /// elements in order, and the pairs are the full order relation.
    pub fn poset(&self) -> Result<Poset> {
        let names: Vec<String> = self.basis.iter().filter(|[a, b]| a == b).map(|[a, _]| a.clone()).collect();
        let pos = |s: &str| names.iter().position(|n| n == s).ok_or_else(|| Error::UnknownElement(s.to_string()));
        let n = names.len();
        let mut rel = vec![vec![false; n]; n];
        for [a, b] in &self.basis {
            rel[pos(a)?][pos(b)?] = true;
        }
        Poset::from_relation(&names, &rel)
    }
}

impl LinearMap {
    pub fn from_matrix(alg: &Algebra, matrix: Matrix<Scalar>) -> Result<Self> {
        let d = alg.dim();
        if matrix.rows() != d || matrix.cols() != d {
            return Err(Error::DimensionMismatch { expected: d, found: matrix.rows().max(matrix.cols()) });
        }
        Ok(LinearMap { alg: alg.clone(), matrix })
    }

    /// Map sending the `j`-th basis element to `images[j]`.
    pub fn from_images(alg: &Algebra, images: &[IncidenceElement]) -> Result<Self> {
        if images.len() != alg.dim() {
            return Err(Error::DimensionMismatch { expected: alg.dim(), found: images.len() });
        }
        if images.iter().any(|f| f.algebra() != alg) {
            return Err(Error::MixedAlgebras);
        }
        let cols: Vec<Vec<Scalar>> = images.iter().map(IncidenceElement::coords).collect();
        Ok(LinearMap { alg: alg.clone(), matrix: Matrix::from_columns(alg.dim(), &cols) })
    }

    pub fn from_residue_columns(alg: &Algebra, columns: &[Vec<u32>]) -> Self {
        let field = alg.field();
        let cols: Vec<Vec<Scalar>> =
            columns.iter().map(|c| c.iter().map(|&v| field.from_residue(v)).collect()).collect();
        LinearMap { alg: alg.clone(), matrix: Matrix::from_columns(alg.dim(), &cols) }
    }

    pub fn identity(alg: &Algebra) -> Self {
        LinearMap { alg: alg.clone(), matrix: Matrix::identity(&alg.field(), alg.dim()) }
    }

    pub fn zero(alg: &Algebra) -> Self {
        LinearMap { alg: alg.clone(), matrix: Matrix::filled(alg.dim(), alg.dim(), alg.field().zero()) }
    }

    pub fn algebra(&self) -> &Algebra {
        &self.alg
    }

    pub fn matrix(&self) -> &Matrix<Scalar> {
        &self.matrix
    }

    pub fn basis(&self) -> &BasisOrder {
        self.alg.basis()
    }

    /// Row-major residue matrix; panics over `Q`.
    pub fn residue_matrix(&self) -> Vec<u32> {
        self.matrix.data().iter().map(|s| s.residue().expect("prime field map")).collect()
    }

    pub fn residue_columns(&self) -> Vec<Vec<u32>> {
        (0..self.alg.dim()).map(|j| self.matrix.column(j).iter().map(|s| s.residue().expect("prime field map")).collect()).collect()
    }

    pub fn image_of_basis(&self, k: usize) -> IncidenceElement {
        self.alg.from_coords(&self.matrix.column(k))
    }

    pub fn apply(&self, f: &IncidenceElement) -> Result<IncidenceElement> {
        if f.algebra() != &self.alg {
            return Err(Error::MixedAlgebras);
        }
        Ok(self.alg.from_coords(&self.matrix.mul_vec(&self.alg.field(), &f.coords())))
    }

    /// `self ∘ other`: applies `other` first.
    pub fn compose(&self, other: &LinearMap) -> Result<LinearMap> {
        if self.alg != other.alg {
            return Err(Error::DimensionMismatch { expected: self.alg.dim(), found: other.alg.dim() });
        }
        Ok(LinearMap { alg: self.alg.clone(), matrix: self.matrix.mul(&self.alg.field(), &other.matrix) })
    }

    pub fn invert(&self) -> Result<LinearMap> {
        let inv = self.matrix.inverse(&self.alg.field()).ok_or(Error::Singular)?;
        Ok(LinearMap { alg: self.alg.clone(), matrix: inv })
    }

    pub fn is_bijective(&self) -> bool {
        self.matrix.rank(&self.alg.field()) == self.alg.dim()
    }

    pub fn neg(&self) -> LinearMap {
        LinearMap { alg: self.alg.clone(), matrix: self.matrix.map(|s| -s) }
    }

    /// `-self` for `sign = -1`, `self` otherwise.
    pub fn with_sign(&self, sign: i8) -> LinearMap {
        if sign < 0 {
            self.neg()
        } else {
            self.clone()
        }
    }

    /// `e_xy -> e_{λ(x)λ(y)}`.
    pub fn induced(alg: &Algebra, lambda: &PosetAutomorphism) -> LinearMap {
        let basis = alg.basis();
        let images: Vec<IncidenceElement> = basis
            .pairs()
            .iter()
            .map(|&(x, y)| alg.e(lambda.apply(x), lambda.apply(y)))
            .collect();
        Self::from_images(alg, &images).expect("images in the same algebra")
    }

    /// `e_xy -> sigma(x,y) e_xy`.
    pub fn multiplicative(alg: &Algebra, sigma: &Cocycle) -> Result<LinearMap> {
        if &sigma.alg != alg {
            return Err(Error::MixedAlgebras);
        }
        let images: Vec<IncidenceElement> = alg
            .basis()
            .pairs()
            .iter()
            .map(|&(x, y)| alg.e(x, y).scale(sigma.value(x, y)))
            .collect();
        Self::from_images(alg, &images)
    }

    /// `f -> beta f beta^-1`.
    pub fn inner(beta: &IncidenceElement) -> Result<LinearMap> {
        let alg = beta.algebra();
        let inv = beta.invert()?;
        let images: Vec<IncidenceElement> =
            alg.basis().pairs().iter().map(|&(x, y)| &(beta * &alg.e(x, y)) * &inv).collect();
        Self::from_images(alg, &images)
    }

    /// Whether `phi(a b) = s * phi(a) phi(b)` on all basis pairs with `s = ±1`
    /// and `phi(delta) = s * delta`.
    fn is_signed_homomorphism(&self, images: &[Vec<Scalar>], sign: i8) -> bool {
        let field = self.alg.field();
        let alg = DenseAlgebra::new(&field, self.alg.basis());
        let signed = |v: &[Scalar]| if sign < 0 { alg.neg(v) } else { v.to_vec() };
        let delta_image = self.matrix.mul_vec(&field, &alg.identity());
        if delta_image != signed(&alg.identity()) {
            return false;
        }
        let d = alg.dim();
        // basis products: e_i e_j is e_k when listed, zero otherwise
        let mut table = vec![None; d * d];
        for &(i, j, k) in alg.basis.products() {
            table[i * d + j] = Some(k);
        }
        let zero = alg.zero();
        let mut prod = alg.zero();
        for i in 0..d {
            for j in 0..d {
                alg.mul_into(&images[i], &images[j], &mut prod);
                let expected = match table[i * d + j] {
                    Some(k) => signed(&images[k]),
                    None => zero.clone(),
                };
                if prod != expected {
                    return false;
                }
            }
        }
        true
    }

    /// Classifies the map as an automorphism, the negative of one, or
    /// neither. Over characteristic 2 the first two coincide and
    /// `Automorphism` is reported.
    pub fn pm_automorphism(&self) -> PmVerdict {
        if !self.is_bijective() {
            return PmVerdict::Neither;
        }
        let images: Vec<Vec<Scalar>> = (0..self.alg.dim()).map(|j| self.matrix.column(j)).collect();
        if self.is_signed_homomorphism(&images, 1) {
            PmVerdict::Automorphism
        } else if self.alg.field().characteristic() != 2 && self.is_signed_homomorphism(&images, -1) {
            PmVerdict::NegativeOfAutomorphism
        } else {
            PmVerdict::Neither
        }
    }

    /// Splits an automorphism as `inner(beta) ∘ induced(lambda) ∘ multiplicative(sigma)`.
    pub fn decompose(&self) -> Result<AutomorphismDecomposition> {
        if self.pm_automorphism() != PmVerdict::Automorphism {
            return Err(Error::NotAutomorphism("map is not an algebra automorphism".into()));
        }
        let alg = &self.alg;
        let poset = alg.poset();
        let n = poset.len();
        let idempotents: Vec<IncidenceElement> = (0..n).map(|z| self.image_of_basis(alg.basis().diag(z))).collect();
        let perm: Vec<usize> = idempotents.iter().map(|f| f.primitive_base()).collect::<Result<_>>()?;
        let lambda = poset
            .automorphism_from_perm(perm)
            .map_err(|e| Error::NotAutomorphism(format!("diagonal bases do not form an automorphism: {e}")))?;

        // standardize the images of e_z one at a time; each conjugator
        // commutes with the idempotents already standardized
        let mut beta = alg.identity();
        let mut beta_inv = alg.identity();
        for f in &idempotents {
            let current = &(&beta * f) * &beta_inv;
            let u = current.conjugator_to_standard()?;
            beta = &u * &beta;
            beta_inv = &beta_inv * &u.invert()?;
        }
        let mut diagonal_scalars = Vec::with_capacity(n);
        for (z, f) in idempotents.iter().enumerate() {
            let std = &(&beta * f) * &beta_inv;
            let target = lambda.apply(z);
            let alpha = std.get(target, target);
            if std != alg.e(target, target).scale(&alpha) {
                return Err(Error::NotAutomorphism(format!("image of e_{} not standardized", poset.name(z))));
            }
            diagonal_scalars.push(alpha);
        }

        let normalize = LinearMap::inner(&beta)?.compose(self)?;
        let mut raw = BTreeMap::new();
        for (k, &(u, v)) in alg.basis().pairs().iter().enumerate() {
            let image = normalize.image_of_basis(k);
            raw.insert((u, v), image.get(lambda.apply(u), lambda.apply(v)));
        }
        let sigma = Cocycle::validate(alg, raw)?;
        let decomposition = AutomorphismDecomposition { beta: beta_inv, lambda, sigma, diagonal_scalars };
        if &decomposition.recompose()? != self {
            return Err(Error::NotAutomorphism("recomposition differs from the map".into()));
        }
        Ok(decomposition)
    }

    pub fn to_file(&self) -> MapFile {
        let poset = self.alg.poset();
        MapFile {
            basis: self.basis().pairs().iter().map(|&(u, v)| [poset.name(u).to_string(), poset.name(v).to_string()]).collect(),
            matrix: (0..self.matrix.rows()).map(|i| self.matrix.row(i).iter().map(|s| s.to_string()).collect()).collect(),
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(&self.to_file()).expect("map serializes")
    }

    /// Loads a map, rejecting files whose echoed basis differs from the
    /// canonical order of `alg`.
    pub fn from_file(alg: &Algebra, file: &MapFile) -> Result<Self> {
        let expected = Self::zero(alg).to_file().basis;
        if file.basis != expected {
            return Err(Error::BasisMismatch);
        }
        let d = alg.dim();
        if file.matrix.len() != d || file.matrix.iter().any(|r| r.len() != d) {
            return Err(Error::DimensionMismatch { expected: d, found: file.matrix.len() });
        }
        let field = alg.field();
        let data: Vec<Scalar> = file.matrix.iter().flatten().map(|s| field.parse(s)).collect::<Result<_>>()?;
        Ok(LinearMap { alg: alg.clone(), matrix: Matrix::from_vec(d, d, data) })
    }

    pub fn from_json(alg: &Algebra, text: &str) -> Result<Self> {
        Self::from_file(alg, &serde_json::from_str(text)?)
    }
}

/// A multiplicative cocycle `sigma : X^2_<= -> F^*` with `sigma(x,x) = 1`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Cocycle {
    alg: Algebra,
    values: BTreeMap<(usize, usize), Scalar>,
}

impl Cocycle {
    pub fn trivial(alg: &Algebra) -> Self {
        let one = alg.field().one();
        Cocycle { alg: alg.clone(), values: alg.basis().pairs().iter().map(|&k| (k, one.clone())).collect() }
    }

    /// Checks `sigma(x,x) = 1` and `sigma(x,y) sigma(y,z) = sigma(x,z)`.
    /// Diagonal values may be omitted; strict pairs may not.
    pub fn validate(alg: &Algebra, mut raw: BTreeMap<(usize, usize), Scalar>) -> Result<Self> {
        let poset = alg.poset();
        let field = alg.field();
        for &(x, y) in alg.basis().pairs() {
            let name = |i: usize| poset.name(i).to_string();
            let v = raw.entry((x, y)).or_insert_with(|| if x == y { field.one() } else { field.zero() });
            if v.field() != field {
                return Err(Error::MixedFields);
            }
            if v.is_zero() {
                return Err(Error::ZeroValue(name(x), name(y)));
            }
            if x == y && !v.is_one() {
                return Err(Error::CocycleViolation(name(x), name(x), name(x)));
            }
        }
        if let Some(&(x, y)) = raw.keys().find(|&&(x, y)| !poset.leq(x, y)) {
            return Err(Error::NotComparable(poset.name(x).into(), poset.name(y).into()));
        }
        let n = poset.len();
        for x in 0..n {
            for y in (0..n).filter(|&y| poset.leq(x, y)) {
                for z in (0..n).filter(|&z| poset.leq(y, z)) {
                    if &raw[&(x, y)] * &raw[&(y, z)] != raw[&(x, z)] {
                        return Err(Error::CocycleViolation(
                            poset.name(x).into(),
                            poset.name(y).into(),
                            poset.name(z).into(),
                        ));
                    }
                }
            }
        }
        Ok(Cocycle { alg: alg.clone(), values: raw })
    }

    /// `sigma(x,y) = rho(x) rho(y)^-1`.
    pub fn coboundary(alg: &Algebra, rho: &[Scalar]) -> Result<Self> {
        let n = alg.poset().len();
        if rho.len() != n {
            return Err(Error::DimensionMismatch { expected: n, found: rho.len() });
        }
        if let Some(x) = rho.iter().position(Scalar::is_zero) {
            let name = alg.poset().name(x).to_string();
            return Err(Error::ZeroValue(name.clone(), name));
        }
        let values =
            alg.basis().pairs().iter().map(|&(x, y)| ((x, y), &rho[x] * &rho[y].inv().expect("nonzero"))).collect();
        Self::validate(alg, values)
    }

    pub fn value(&self, x: usize, y: usize) -> &Scalar {
        &self.values[&(x, y)]
    }

    pub fn values(&self) -> &BTreeMap<(usize, usize), Scalar> {
        &self.values
    }

    /// Cocycle file: the element-file layout with one entry per strict pair.
    pub fn from_file(alg: &Algebra, file: &ElementFile) -> Result<Self> {
        let field = file.field.to_field()?;
        if field != alg.field() {
            return Err(Error::MixedFields);
        }
        let poset = alg.poset();
        let mut raw = BTreeMap::new();
        for e in &file.entries {
            let key = (poset.index_of(&e.from)?, poset.index_of(&e.to)?);
            if raw.insert(key, field.parse(&e.value)?).is_some() {
                return Err(Error::Format(format!("duplicate entry ({:?}, {:?})", e.from, e.to)));
            }
        }
        Self::validate(alg, raw)
    }

    pub fn from_json(alg: &Algebra, text: &str) -> Result<Self> {
        Self::from_file(alg, &serde_json::from_str(text)?)
    }

    pub fn to_file(&self) -> ElementFile {
        let poset = self.alg.poset();
        ElementFile {
            field: self.alg.field().into(),
            entries: self
                .values
                .iter()
                .filter(|((x, y), _)| x != y)
                .map(|(&(x, y), v)| crate::incidence::EntryFile {
                    from: poset.name(x).into(),
                    to: poset.name(y).into(),
                    value: v.to_string(),
                })
                .collect(),
        }
    }
}

/// `phi = inner(beta) ∘ induced(lambda) ∘ multiplicative(sigma)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AutomorphismDecomposition {
    pub beta: IncidenceElement,
    pub lambda: PosetAutomorphism,
    pub sigma: Cocycle,
    /// Coefficients `alpha_z` of the standardized images of `e_z`.
    pub diagonal_scalars: Vec<Scalar>,
}

impl AutomorphismDecomposition {
    pub fn recompose(&self) -> Result<LinearMap> {
        let alg = self.beta.algebra();
        LinearMap::inner(&self.beta)?
            .compose(&LinearMap::induced(alg, &self.lambda))?
            .compose(&LinearMap::multiplicative(alg, &self.sigma)?)
    }
}
