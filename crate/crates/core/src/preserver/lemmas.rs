//! Necessary conditions on a standardized preserver, evaluated on basis images.

use serde::{Deserialize, Serialize};

use crate::dense::DenseAlgebra;
use crate::error::{Error, Result};
use crate::incidence::IncidenceElement;
use crate::linalg::Matrix;
use crate::linmaps::LinearMap;
use crate::scalars::{Field, Scalar};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LemmaItem {
    pub item: String,
    pub holds: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub violation: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LemmaReport {
    pub x: String,
    pub y: String,
    pub all_hold: bool,
    pub items: Vec<LemmaItem>,
}

impl LemmaReport {
    pub fn item(&self, name: &str) -> Option<&LemmaItem> {
        self.items.iter().find(|i| i.item == name)
    }
}

struct Suite<'a> {
    field: Field,
    dense: DenseAlgebra<'a, Field>,
    images: Vec<Vec<Scalar>>,
    names: &'a [String],
    n: usize,
    items: Vec<LemmaItem>,
}

impl<'a> Suite<'a> {
    fn img(&self, u: usize, v: usize) -> &[Scalar] {
        &self.images[self.dense.basis.index(u, v).expect("comparable")]
    }

    fn leq(&self, u: usize, v: usize) -> bool {
        self.dense.basis.index(u, v).is_some()
    }

    fn e(&self, u: usize, v: usize) -> String {
        if u == v {
            format!("e_{}", self.names[u])
        } else {
            format!("e_{}{}", self.names[u], self.names[v])
        }
    }

    fn mul(&self, a: &[Scalar], b: &[Scalar]) -> Vec<Scalar> {
        self.dense.mul(a, b)
    }

    fn record(&mut self, item: &str, violation: Option<String>) {
        self.items.push(LemmaItem { item: item.into(), holds: violation.is_none(), violation });
    }

    /// First pair `(a, b)` of basis indices for which `phi(a) phi(b) != 0`.
    fn annihilation(&self, pairs: impl Iterator<Item = ((usize, usize), (usize, usize))>) -> Option<String> {
        for ((a, b), (c, d)) in pairs {
            if !self.dense.is_zero(&self.mul(self.img(a, b), self.img(c, d))) {
                return Some(format!("phi({}) phi({}) != 0", self.e(a, b), self.e(c, d)));
            }
        }
        None
    }

    fn comparable(&self) -> Vec<(usize, usize)> {
        self.dense.basis.pairs().to_vec()
    }

    /// Support of `v` lies in the pairs of `X - {y}`, strictly when `strict`.
    fn supported_off(&self, v: &[Scalar], y: usize, strict: bool) -> bool {
        self.dense.basis.pairs().iter().zip(v).all(|(&(a, b), value)| {
            value.is_zero() || (a != y && b != y && (!strict || a != b))
        })
    }
}

/// Standardizes `phi` to `psi2 ∘ phi ∘ psi1` with `psi1(e_x) = eps` and
/// `psi2(eta) = e_y`, then checks each consequence of the preserving property
/// that the existence argument relies on.
pub fn lemma_suite(phi: &LinearMap, eps: &IncidenceElement, eta: &IncidenceElement) -> Result<LemmaReport> {
    let alg = phi.algebra();
    if eps.algebra() != alg || eta.algebra() != alg {
        return Err(Error::MixedAlgebras);
    }
    let x = eps.primitive_base()?;
    let y = eta.primitive_base()?;
    let psi1 = LinearMap::inner(&eps.conjugator_to_standard()?.invert()?)?;
    let psi2 = LinearMap::inner(&eta.conjugator_to_standard()?)?;
    let phi = psi2.compose(phi)?.compose(&psi1)?;

    let field = alg.field();
    let poset = alg.poset();
    let dense = DenseAlgebra::new(&field, alg.basis());
    let images: Vec<Vec<Scalar>> = (0..alg.dim()).map(|k| phi.matrix().column(k)).collect();
    let mut s = Suite { field, dense, images, names: poset.names(), n: poset.len(), items: Vec::new() };
    let n = s.n;
    let pairs = s.comparable();
    let ey = s.dense.unit(alg.basis().diag(y));

    // phi(e_x)^2 = e_y
    let sq = s.mul(s.img(x, x), s.img(x, x));
    let v = (sq != ey).then(|| format!("phi({})^2 != {}", s.e(x, x), s.e(y, y)));
    s.record("base_image_square", v);

    let v = s.annihilation(pairs.iter().filter(|p| p.0 != x).map(|&p| ((x, x), p)));
    s.record("base_image_left_annihilates", v);
    let v = s.annihilation(pairs.iter().filter(|p| p.1 != x).map(|&p| (p, (x, x))));
    s.record("base_image_right_annihilates", v);

    let v = s.annihilation(
        (0..n).flat_map(|z| (0..n).map(move |u| (z, u))).filter(|&(z, u)| z != u && s.leq(u, x)).map(|(z, u)| ((z, z), (u, x))),
    );
    s.record("idempotent_times_into_base", v);
    let v = s.annihilation(
        (0..n).flat_map(|v| (0..n).map(move |z| (v, z))).filter(|&(v, z)| v != z && s.leq(x, v)).map(|(v, z)| ((x, v), (z, z))),
    );
    s.record("out_of_base_times_idempotent", v);

    let v = s.annihilation((0..n).flat_map(|u| (0..n).map(move |v| (u, v))).filter(|(u, v)| u != v).map(|(u, v)| ((u, u), (v, v))));
    s.record("orthogonal_idempotent_images", v);

    // phi(e_ux) phi(e_x) - phi(e_u) phi(e_ux) = r phi(e_ux)^2, and the mirror
    let scalars: Vec<Scalar> = match field.order() {
        Some(_) => field.units()?,
        None => (1..=3).map(|r| field.from_i64(r)).collect(),
    };
    let mut incoming = None;
    let mut outgoing = None;
    for u in (0..n).filter(|&u| poset.lt(u, x)) {
        let lhs = s.dense.sub(&s.mul(s.img(u, x), s.img(x, x)), &s.mul(s.img(u, u), s.img(u, x)));
        let sq = s.mul(s.img(u, x), s.img(u, x));
        if let Some(r) = scalars.iter().find(|r| lhs != s.dense.scale(r, &sq)) {
            incoming.get_or_insert(format!("fails at u = {}, r = {r}", s.names[u]));
        }
    }
    for v in (0..n).filter(|&v| poset.lt(x, v)) {
        let lhs = s.dense.sub(&s.mul(s.img(x, x), s.img(x, v)), &s.mul(s.img(x, v), s.img(v, v)));
        let sq = s.mul(s.img(x, v), s.img(x, v));
        if let Some(r) = scalars.iter().find(|r| lhs != s.dense.scale(r, &sq)) {
            outgoing.get_or_insert(format!("fails at v = {}, r = {r}", s.names[v]));
        }
    }
    s.record("incoming_scalar_identity", incoming);
    s.record("outgoing_scalar_identity", outgoing);

    let v = s.annihilation(
        (0..n)
            .flat_map(|u| (0..n).map(move |z| (u, z)))
            .filter(|&(u, z)| s.leq(u, x) && z != u && z != x)
            .map(|(u, z)| ((u, x), (z, z))),
    );
    s.record("into_base_times_idempotent", v);
    let v = s.annihilation(
        (0..n)
            .flat_map(|v| (0..n).map(move |z| (v, z)))
            .filter(|&(v, z)| s.leq(x, v) && z != x && z != v)
            .map(|(v, z)| ((z, z), (x, v))),
    );
    s.record("idempotent_times_out_of_base", v);

    // diagonal vanishing off y
    let basis = alg.basis();
    let diag_entry = |img: &[Scalar], z: usize| img[basis.diag(z)].clone();
    let mut incoming = None;
    let mut outgoing = None;
    for z in (0..n).filter(|&z| z != y) {
        for u in (0..n).filter(|&u| poset.lt(u, x)) {
            if diag_entry(s.img(u, u), z).is_zero() && !diag_entry(s.img(u, x), z).is_zero() {
                incoming.get_or_insert(format!("phi({})({z},{z}) != 0", s.e(u, x), z = s.names[z]));
            }
        }
        for v in (0..n).filter(|&v| poset.lt(x, v)) {
            if diag_entry(s.img(v, v), z).is_zero() && !diag_entry(s.img(x, v), z).is_zero() {
                outgoing.get_or_insert(format!("phi({})({z},{z}) != 0", s.e(x, v), z = s.names[z]));
            }
        }
    }
    s.record("diagonal_vanishing_incoming", incoming);
    s.record("diagonal_vanishing_outgoing", outgoing);

    // phi(e_x) = ±e_y + g with g in J(I(X - y)) and g^2 = 0
    let base = s.img(x, x).to_vec();
    let coefficient = base[basis.diag(y)].clone();
    let g = s.dense.sub(&base, &s.dense.scale(&coefficient, &ey));
    let signed = coefficient.is_one() || (-&coefficient).is_one();
    let v = if !signed {
        Some(format!("phi({})({y},{y}) = {coefficient}", s.e(x, x), y = s.names[y]))
    } else if !s.supported_off(&g, y, true) {
        Some("remainder not in the radical away from y".into())
    } else if !s.dense.is_zero(&s.mul(&g, &g)) {
        Some("remainder does not square to zero".into())
    } else {
        None
    };
    s.record("base_image_square_root_form", v);

    let off_x: Vec<(usize, usize)> = pairs.iter().copied().filter(|&(a, b)| a != x && b != x).collect();
    let v = off_x
        .iter()
        .find(|&&(a, b)| !s.supported_off(s.img(a, b), y, false))
        .map(|&(a, b)| format!("phi({}) leaves I(X - {})", s.e(a, b), s.names[y]));
    s.record("complement_subspace", v);
    let v = off_x
        .iter()
        .filter(|(a, b)| a != b)
        .find(|&&(a, b)| !s.supported_off(s.img(a, b), y, true))
        .map(|&(a, b)| format!("phi({}) leaves J(I(X - {}))", s.e(a, b), s.names[y]));
    s.record("complement_radical", v);

    // phi(J) = J: images of strict basis elements are strict and independent
    let strict: Vec<(usize, usize)> = pairs.iter().copied().filter(|(a, b)| a != b).collect();
    let outside = strict.iter().find(|&&(a, b)| s.img(a, b).iter().zip(basis.pairs()).any(|(c, (p, q))| p == q && !c.is_zero()));
    let v = match outside {
        Some(&(a, b)) => Some(format!("phi({}) has a diagonal entry", s.e(a, b))),
        None => {
            let columns: Vec<Vec<Scalar>> = strict.iter().map(|&(a, b)| s.img(a, b).to_vec()).collect();
            let rank = if columns.is_empty() { 0 } else { Matrix::from_columns(alg.dim(), &columns).rank(&s.field) };
            (rank != strict.len()).then(|| format!("images of the radical span dimension {rank} < {}", strict.len()))
        }
    };
    s.record("radical_preserved", v);

    if poset.is_connected()? {
        let delta = s.dense.identity();
        let image = phi.matrix().mul_vec(&field, &delta);
        let v = (image != delta && image != s.dense.neg(&delta)).then(|| "phi(delta) != ±delta".to_string());
        s.record("identity_image", v);
    }

    let all_hold = s.items.iter().all(|i| i.holds);
    Ok(LemmaReport { x: poset.name(x).into(), y: poset.name(y).into(), all_hold, items: s.items })
}
