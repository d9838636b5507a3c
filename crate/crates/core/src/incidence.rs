//! Exact arithmetic in the incidence algebra `I(X,F)`.

use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::basis::BasisOrder;
use crate::error::{Error, Result};
use crate::poset::Poset;
use crate::scalars::{Field, Scalar};

struct AlgebraInner {
    poset: Poset,
    field: Field,
    basis: BasisOrder,
}

/// Handle on `I(X,F)` for a fixed poset and field. Cheap to clone.
#[derive(Clone)]
pub struct Algebra(Arc<AlgebraInner>);

impl PartialEq for Algebra {
    fn eq(&self, other: &Self) -> bool {
        Arc::ptr_eq(&self.0, &other.0) || (self.0.field == other.0.field && self.0.poset == other.0.poset)
    }
}

impl Eq for Algebra {}

impl fmt::Debug for Algebra {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "I({:?}, {})", self.0.poset.names(), self.0.field)
    }
}

impl Algebra {
    pub fn new(poset: Poset, field: Field) -> Self {
        let basis = BasisOrder::new(&poset);
        Algebra(Arc::new(AlgebraInner { poset, field, basis }))
    }

    pub fn poset(&self) -> &Poset {
        &self.0.poset
    }

    pub fn field(&self) -> Field {
        self.0.field
    }

    pub fn basis(&self) -> &BasisOrder {
        &self.0.basis
    }

    pub fn dim(&self) -> usize {
        self.0.basis.dim()
    }

    pub fn zero(&self) -> IncidenceElement {
        IncidenceElement { alg: self.clone(), entries: BTreeMap::new() }
    }

    /// `delta = sum_x e_xx`.
    pub fn identity(&self) -> IncidenceElement {
        let one = self.field().one();
        self.from_entries((0..self.poset().len()).map(|x| ((x, x), one.clone())))
    }

    /// `e_xy` by element names.
    pub fn basis_element(&self, x: &str, y: &str) -> Result<IncidenceElement> {
        let (i, j) = (self.poset().index_of(x)?, self.poset().index_of(y)?);
        if !self.poset().leq(i, j) {
            return Err(Error::NotComparable(x.to_string(), y.to_string()));
        }
        Ok(self.e(i, j))
    }

    /// `e_ij` by indices; panics unless `i <= j`.
    pub fn e(&self, i: usize, j: usize) -> IncidenceElement {
        assert!(self.poset().leq(i, j), "e({i},{j}) is not a basis element");
        self.from_entries([((i, j), self.field().one())])
    }

    /// Builds an element, dropping zeros. Panics on pairs outside `X^2_<=`.
    pub fn from_entries<I: IntoIterator<Item = ((usize, usize), Scalar)>>(&self, entries: I) -> IncidenceElement {
        let mut map: BTreeMap<(usize, usize), Scalar> = BTreeMap::new();
        for ((i, j), v) in entries {
            assert!(self.poset().leq(i, j), "({i},{j}) is not a comparable pair");
            assert_eq!(v.field(), self.field(), "scalar from another field");
            let slot = map.entry((i, j)).or_insert_with(|| self.field().zero());
            *slot = &*slot + &v;
        }
        map.retain(|_, v| !v.is_zero());
        IncidenceElement { alg: self.clone(), entries: map }
    }

    /// Element with the given coordinates in [`BasisOrder`].
    pub fn from_coords(&self, coords: &[Scalar]) -> IncidenceElement {
        assert_eq!(coords.len(), self.dim());
        let basis = self.basis();
        self.from_entries(coords.iter().enumerate().map(|(k, v)| (basis.pair(k), v.clone())))
    }

    pub fn from_residues(&self, coords: &[u32]) -> IncidenceElement {
        let field = self.field();
        let basis = self.basis();
        self.from_entries(
            coords.iter().enumerate().filter(|(_, &v)| v != 0).map(|(k, &v)| (basis.pair(k), field.from_residue(v))),
        )
    }

    /// `e_A = sum_{a in A} e_aa`.
    pub fn diagonal_sum(&self, set: &[usize]) -> IncidenceElement {
        let one = self.field().one();
        self.from_entries(set.iter().map(|&a| ((a, a), one.clone())))
    }

    /// Reads the element file format.
    pub fn element_from_json(&self, text: &str) -> Result<IncidenceElement> {
        let file: ElementFile = serde_json::from_str(text)?;
        self.element_from_file(&file)
    }

    pub fn element_from_file(&self, file: &ElementFile) -> Result<IncidenceElement> {
        let field = file.field.to_field()?;
        if field != self.field() {
            return Err(Error::MixedFields);
        }
        let mut seen = std::collections::BTreeSet::new();
        let mut entries = Vec::new();
        for e in &file.entries {
            let (i, j) = (self.poset().index_of(&e.from)?, self.poset().index_of(&e.to)?);
            if !self.poset().leq(i, j) {
                return Err(Error::NotComparable(e.from.clone(), e.to.clone()));
            }
            if !seen.insert((i, j)) {
                return Err(Error::Format(format!("duplicate entry ({:?}, {:?})", e.from, e.to)));
            }
            entries.push(((i, j), field.parse(&e.value)?));
        }
        Ok(self.from_entries(entries))
    }
}

/// Serialized field descriptor.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum FieldSpec {
    Prime { p: u64 },
    Rational,
}

impl FieldSpec {
    pub fn to_field(self) -> Result<Field> {
        match self {
            FieldSpec::Prime { p } => Field::prime(p),
            FieldSpec::Rational => Ok(Field::Rational),
        }
    }
}

impl From<Field> for FieldSpec {
    fn from(f: Field) -> Self {
        match f {
            Field::Prime(p) => FieldSpec::Prime { p: p.get() as u64 },
            Field::Rational => FieldSpec::Rational,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EntryFile {
    pub from: String,
    pub to: String,
    pub value: String,
}

/// On-disk element: nonzero entries only, in basis order.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ElementFile {
    pub field: FieldSpec,
    pub entries: Vec<EntryFile>,
}

/// An element `f = sum f(u,v) e_uv` of `I(X,F)`, with zero entries never stored.
#[derive(Clone, PartialEq, Eq)]
pub struct IncidenceElement {
    alg: Algebra,
    entries: BTreeMap<(usize, usize), Scalar>,
}

impl fmt::Debug for IncidenceElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl fmt::Display for IncidenceElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.entries.is_empty() {
            return write!(f, "0");
        }
        let p = self.alg.poset();
        for (n, ((i, j), v)) in self.entries.iter().enumerate() {
            if n > 0 {
                write!(f, " + ")?;
            }
            write!(f, "{v}*e[{},{}]", p.name(*i), p.name(*j))?;
        }
        Ok(())
    }
}

/// Verdict of [`IncidenceElement::classify_idempotent`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum IdempotentClass {
    NotIdempotent,
    NonPrimitive,
    /// Primitive with `f_D = e_base`.
    Primitive { base: usize },
}

impl IncidenceElement {
    pub fn algebra(&self) -> &Algebra {
        &self.alg
    }

    pub fn get(&self, i: usize, j: usize) -> Scalar {
        self.entries.get(&(i, j)).cloned().unwrap_or_else(|| self.alg.field().zero())
    }

    pub fn entries(&self) -> impl Iterator<Item = (&(usize, usize), &Scalar)> {
        self.entries.iter()
    }

    pub fn is_zero(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn coords(&self) -> Vec<Scalar> {
        let mut out = vec![self.alg.field().zero(); self.alg.dim()];
        for (&(i, j), v) in &self.entries {
            out[self.alg.basis().index(i, j).expect("stored pairs are comparable")] = v.clone();
        }
        out
    }

    /// Residue coordinates; panics over `Q`.
    pub fn residues(&self) -> Vec<u32> {
        self.coords().iter().map(|s| s.residue().expect("prime field element")).collect()
    }

    fn check_same(&self, other: &IncidenceElement) -> Result<()> {
        if self.alg == other.alg {
            Ok(())
        } else {
            Err(Error::MixedAlgebras)
        }
    }

    pub fn try_add(&self, other: &IncidenceElement) -> Result<IncidenceElement> {
        self.check_same(other)?;
        Ok(self.alg.from_entries(self.entries.iter().chain(&other.entries).map(|(k, v)| (*k, v.clone()))))
    }

    pub fn try_sub(&self, other: &IncidenceElement) -> Result<IncidenceElement> {
        self.try_add(&other.neg())
    }

    pub fn neg(&self) -> IncidenceElement {
        self.scale(&-self.alg.field().one())
    }

    pub fn scale(&self, r: &Scalar) -> IncidenceElement {
        self.alg.from_entries(self.entries.iter().map(|(k, v)| (*k, r * v)))
    }

    /// Convolution `(fg)(x,y) = sum_{x<=z<=y} f(x,z) g(z,y)`.
    pub fn try_mul(&self, other: &IncidenceElement) -> Result<IncidenceElement> {
        self.check_same(other)?;
        let mut by_source: BTreeMap<usize, Vec<(usize, &Scalar)>> = BTreeMap::new();
        for (&(z, y), v) in &other.entries {
            by_source.entry(z).or_default().push((y, v));
        }
        let mut terms = Vec::new();
        for (&(x, z), a) in &self.entries {
            if let Some(row) = by_source.get(&z) {
                for &(y, b) in row {
                    terms.push(((x, y), a * b));
                }
            }
        }
        Ok(self.alg.from_entries(terms))
    }

    pub fn square(&self) -> IncidenceElement {
        self * self
    }

    /// `(f_D, f_U)` with `f = f_D + f_U`.
    pub fn split_diagonal(&self) -> (IncidenceElement, IncidenceElement) {
        let (d, u): (Vec<_>, Vec<_>) = self.entries.iter().map(|(k, v)| (*k, v.clone())).partition(|((i, j), _)| i == j);
        (self.alg.from_entries(d), self.alg.from_entries(u))
    }

    pub fn diagonal(&self) -> IncidenceElement {
        self.split_diagonal().0
    }

    /// Membership in the Jacobson radical `J(I(X,F))`, or in `J(I(Y,F))` seen
    /// inside `I(X,F)` when a subset is given.
    pub fn in_radical(&self, subset: Option<&[&str]>) -> Result<bool> {
        match subset {
            None => Ok(self.entries.keys().all(|(i, j)| i != j)),
            Some(names) => {
                let idx: Vec<usize> = names.iter().map(|n| self.alg.poset().index_of(n)).collect::<Result<_>>()?;
                Ok(self.in_radical_of(&idx))
            }
        }
    }

    /// Support lies on strict pairs inside `Y^2_<`.
    pub fn in_radical_of(&self, subset: &[usize]) -> bool {
        self.entries.keys().all(|(i, j)| i != j && subset.contains(i) && subset.contains(j))
    }

    /// Support lies inside `Y^2_<=`, i.e. in `I(Y,F)` viewed inside `I(X,F)`.
    pub fn in_subalgebra_of(&self, subset: &[usize]) -> bool {
        self.entries.keys().all(|(i, j)| subset.contains(i) && subset.contains(j))
    }

    /// Inverse by triangular recursion on interval length.
    pub fn invert(&self) -> Result<IncidenceElement> {
        let poset = self.alg.poset();
        let n = poset.len();
        let mut diag_inv = Vec::with_capacity(n);
        for x in 0..n {
            match self.entries.get(&(x, x)) {
                Some(v) => diag_inv.push(v.inv().expect("stored entries are nonzero")),
                None => return Err(Error::NotInvertible(poset.name(x).to_string())),
            }
        }
        let zero = self.alg.field().zero();
        let mut g: Vec<Option<Scalar>> = vec![None; n * n];
        let mut pairs = poset.comparable_pairs();
        pairs.sort_by_key(|&(x, y)| poset.length(x, y));
        for (x, y) in pairs {
            let value = if x == y {
                diag_inv[x].clone()
            } else {
                // g(x,y) = -f(x,x)^-1 sum_{x<z<=y} f(x,z) g(z,y)
                let mut acc = zero.clone();
                for z in (0..n).filter(|&z| poset.lt(x, z) && poset.leq(z, y)) {
                    if let Some(fxz) = self.entries.get(&(x, z)) {
                        let gzy = g[z * n + y].as_ref().expect("shorter interval already solved");
                        acc = &acc + &(fxz * gzy);
                    }
                }
                -(&diag_inv[x] * &acc)
            };
            g[x * n + y] = Some(value);
        }
        Ok(self.alg.from_entries(
            g.into_iter().enumerate().filter_map(|(k, v)| v.map(|v| ((k / n, k % n), v))),
        ))
    }

    pub fn is_invertible(&self) -> bool {
        (0..self.alg.poset().len()).all(|x| self.entries.contains_key(&(x, x)))
    }

    /// Idempotent with diagonal `e_x` for a single `x` is primitive.
    pub fn classify_idempotent(&self) -> IdempotentClass {
        if &self.square() != self {
            return IdempotentClass::NotIdempotent;
        }
        let diag: Vec<(usize, &Scalar)> =
            self.entries.iter().filter(|((i, j), _)| i == j).map(|((i, _), v)| (*i, v)).collect();
        match diag.as_slice() {
            [(x, v)] if v.is_one() => IdempotentClass::Primitive { base: *x },
            _ => IdempotentClass::NonPrimitive,
        }
    }

    /// Base `x` of a primitive idempotent, or `NotPrimitive`.
    pub fn primitive_base(&self) -> Result<usize> {
        match self.classify_idempotent() {
            IdempotentClass::Primitive { base } => Ok(base),
            _ => Err(Error::NotPrimitive),
        }
    }

    /// Invertible `u` with `u eps u^-1 = e_x`, where `x` is the base of this
    /// primitive idempotent: `u = e_x eps + (delta - e_x)(delta - eps)`.
    pub fn conjugator_to_standard(&self) -> Result<IncidenceElement> {
        let x = self.primitive_base()?;
        let ex = self.alg.e(x, x);
        let one = self.alg.identity();
        let u = &(&ex * self) + &(&(&one - &ex) * &(&one - self));
        let inv = u.invert()?;
        if &(&u * self) * &inv != ex {
            return Err(Error::NotPrimitive);
        }
        Ok(u)
    }

    /// Element file with entries in basis order.
    pub fn to_file(&self) -> ElementFile {
        let p = self.alg.poset();
        ElementFile {
            field: self.alg.field().into(),
            entries: self
                .entries
                .iter()
                .map(|(&(i, j), v)| EntryFile { from: p.name(i).into(), to: p.name(j).into(), value: v.to_string() })
                .collect(),
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(&self.to_file()).expect("element serializes")
    }
}

macro_rules! element_op {
    ($tr:ident, $method:ident, $checked:ident) => {
        impl std::ops::$tr<&IncidenceElement> for &IncidenceElement {
            type Output = IncidenceElement;

            fn $method(self, rhs: &IncidenceElement) -> IncidenceElement {
                self.$checked(rhs).expect("operands from the same algebra")
            }
        }
    };
}

element_op!(Add, add, try_add);
element_op!(Sub, sub, try_sub);
element_op!(Mul, mul, try_mul);
