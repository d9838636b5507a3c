//! Coordinates on `I(X,F)`: the standard basis in canonical order and the
//! structure constants of the convolution product.

use crate::poset::Poset;

/// All comparable pairs `u <= v`, sorted lexicographically by
/// `(source index, target index)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BasisOrder {
    n: usize,
    pairs: Vec<(usize, usize)>,
    index: Vec<Option<usize>>,
    // (i, j, k): basis_i * basis_j = basis_k
    products: Vec<(usize, usize, usize)>,
    diagonal: Vec<usize>,
}

impl BasisOrder {
    pub fn new(poset: &Poset) -> Self {
        let n = poset.len();
        let pairs = poset.comparable_pairs();
        let mut index = vec![None; n * n];
        for (k, &(u, v)) in pairs.iter().enumerate() {
            index[u * n + v] = Some(k);
        }
        let mut products = Vec::new();
        for (i, &(x, z)) in pairs.iter().enumerate() {
            for (j, &(z2, y)) in pairs.iter().enumerate() {
                if z == z2 {
                    products.push((i, j, index[x * n + y].expect("transitivity")));
                }
            }
        }
        let diagonal = (0..n).map(|x| index[x * n + x].expect("reflexive")).collect();
        BasisOrder { n, pairs, index, products, diagonal }
    }

    pub fn dim(&self) -> usize {
        self.pairs.len()
    }

    pub fn pairs(&self) -> &[(usize, usize)] {
        &self.pairs
    }

    pub fn pair(&self, k: usize) -> (usize, usize) {
        self.pairs[k]
    }

    #[inline]
    pub fn index(&self, u: usize, v: usize) -> Option<usize> {
        self.index[u * self.n + v]
    }

    /// Coordinate of `e_{xx}`.
    #[inline]
    pub fn diag(&self, x: usize) -> usize {
        self.diagonal[x]
    }

    pub fn is_diagonal(&self, k: usize) -> bool {
        let (u, v) = self.pairs[k];
        u == v
    }

    pub fn products(&self) -> &[(usize, usize, usize)] {
        &self.products
    }

    pub fn poset_size(&self) -> usize {
        self.n
    }
}
