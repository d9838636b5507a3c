//! Independent oracles for the integration tests: elements as full `n x n`
//! matrices, automorphisms by trying every permutation, plain enumeration.
#![allow(dead_code)]

use incidence_core::poset::{all_posets, connected_posets};
use incidence_core::{Algebra, Field, IncidenceElement, LinearMap, Poset, Scalar};
use rand::Rng;

pub fn v_poset() -> Poset {
    Poset::build(&["a", "b", "c"], &[("a", "c"), ("b", "c")]).unwrap()
}

/// Every poset (connected or not) with at most `max_dim` comparable pairs.
pub fn posets_up_to_dim(max_dim: usize) -> Vec<Poset> {
    (1..=max_dim.min(6)).flat_map(all_posets).filter(|p| p.comparable_pair_count() <= max_dim).collect()
}

pub fn connected_up_to_dim(max_dim: usize) -> Vec<Poset> {
    connected_posets(max_dim.min(6)).into_iter().filter(|p| p.comparable_pair_count() <= max_dim).collect()
}

/// Residue matrix oracle over `F_p`, row-major `n x n`.
#[derive(Clone, PartialEq, Eq, Debug, Hash, PartialOrd, Ord)]
pub struct Mat {
    pub n: usize,
    pub a: Vec<u32>,
}

impl Mat {
    pub fn of(f: &IncidenceElement) -> Mat {
        let n = f.algebra().poset().len();
        let mut a = vec![0; n * n];
        for (&(i, j), v) in f.entries() {
            a[i * n + j] = v.residue().unwrap();
        }
        Mat { n, a }
    }

    pub fn mul(&self, other: &Mat, p: u32) -> Mat {
        let n = self.n;
        let mut a = vec![0u32; n * n];
        for i in 0..n {
            for k in 0..n {
                let x = self.a[i * n + k];
                if x == 0 {
                    continue;
                }
                for j in 0..n {
                    a[i * n + j] = (a[i * n + j] + x * other.a[k * n + j]) % p;
                }
            }
        }
        Mat { n, a }
    }

    pub fn add(&self, other: &Mat, p: u32) -> Mat {
        Mat { n: self.n, a: self.a.iter().zip(&other.a).map(|(x, y)| (x + y) % p).collect() }
    }

    pub fn is_zero(&self) -> bool {
        self.a.iter().all(|&x| x == 0)
    }

    pub fn unit(n: usize, i: usize, j: usize) -> Mat {
        let mut a = vec![0; n * n];
        a[i * n + j] = 1;
        Mat { n, a }
    }

    pub fn identity(n: usize) -> Mat {
        let mut a = vec![0; n * n];
        for i in 0..n {
            a[i * n + i] = 1;
        }
        Mat { n, a }
    }
}

/// Matrix oracle over an arbitrary field.
pub fn scalar_mat(f: &IncidenceElement) -> Vec<Vec<Scalar>> {
    let n = f.algebra().poset().len();
    (0..n).map(|i| (0..n).map(|j| f.get(i, j)).collect()).collect()
}

pub fn scalar_mat_mul(field: Field, a: &[Vec<Scalar>], b: &[Vec<Scalar>]) -> Vec<Vec<Scalar>> {
    let n = a.len();
    (0..n)
        .map(|i| (0..n).map(|j| (0..n).fold(field.zero(), |acc, k| &acc + &(&a[i][k] * &b[k][j]))).collect())
        .collect()
}

/// Every element of a finite incidence algebra, in coordinate-index order.
pub fn all_elements(alg: &Algebra) -> Vec<IncidenceElement> {
    let p = alg.field().order().unwrap();
    let d = alg.dim();
    let total = (p as u64).pow(d as u32);
    (0..total)
        .map(|mut i| {
            let coords: Vec<u32> = (0..d)
                .map(|_| {
                    let c = (i % p as u64) as u32;
                    i /= p as u64;
                    c
                })
                .collect();
            alg.from_residues(&coords)
        })
        .collect()
}

/// Permutations preserving the order, by trying all of them.
pub fn brute_automorphisms(poset: &Poset) -> Vec<Vec<usize>> {
    let n = poset.len();
    let mut out = Vec::new();
    let mut perm: Vec<usize> = (0..n).collect();
    permute(&mut perm, 0, &mut |p| {
        if (0..n).all(|i| (0..n).all(|j| poset.leq(i, j) == poset.leq(p[i], p[j]))) {
            out.push(p.to_vec());
        }
    });
    out.sort();
    out
}

fn permute(v: &mut Vec<usize>, k: usize, visit: &mut impl FnMut(&[usize])) {
    if k == v.len() {
        visit(v);
        return;
    }
    for i in k..v.len() {
        v.swap(k, i);
        permute(v, k + 1, visit);
        v.swap(k, i);
    }
}

/// `|{(u, v) : u <= v, u != z, v != z}|` straight from the order relation.
pub fn pairs_avoiding(poset: &Poset, z: usize) -> usize {
    let n = poset.len();
    (0..n).flat_map(|u| (0..n).map(move |v| (u, v))).filter(|&(u, v)| u != z && v != z && poset.leq(u, v)).count()
}

pub fn random_scalar(field: Field, rng: &mut impl Rng) -> Scalar {
    match field.order() {
        Some(p) => field.from_residue(rng.gen_range(0..p)),
        None => {
            let num = rng.gen_range(-9i64..=9);
            let den = rng.gen_range(1i64..=4);
            field.parse(&format!("{num}/{den}")).unwrap()
        }
    }
}

pub fn random_unit_scalar(field: Field, rng: &mut impl Rng) -> Scalar {
    loop {
        let s = random_scalar(field, rng);
        if !s.is_zero() {
            return s;
        }
    }
}

pub fn random_element(alg: &Algebra, rng: &mut impl Rng) -> IncidenceElement {
    let field = alg.field();
    alg.from_entries(alg.basis().pairs().iter().map(|&(u, v)| ((u, v), random_scalar(field, rng))).collect::<Vec<_>>())
}

pub fn random_invertible(alg: &Algebra, rng: &mut impl Rng) -> IncidenceElement {
    let field = alg.field();
    alg.from_entries(
        alg.basis()
            .pairs()
            .iter()
            .map(|&(u, v)| ((u, v), if u == v { random_unit_scalar(field, rng) } else { random_scalar(field, rng) }))
            .collect::<Vec<_>>(),
    )
}

pub fn random_map(alg: &Algebra, rng: &mut impl Rng) -> LinearMap {
    let images: Vec<IncidenceElement> = (0..alg.dim()).map(|_| random_element(alg, rng)).collect();
    LinearMap::from_images(alg, &images).unwrap()
}

/// `g -> a g a^-1` by direct products, without the library's inner maps.
pub fn conjugate(a: &IncidenceElement, g: &IncidenceElement) -> IncidenceElement {
    &(a * g) * &a.invert().unwrap()
}
