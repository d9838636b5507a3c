//! Dense exact linear algebra over any [`FieldOps`] context.

use crate::scalars::FieldOps;

/// Row-major dense matrix.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Matrix<E> {
    rows: usize,
    cols: usize,
    data: Vec<E>,
}

impl<E: Clone> Matrix<E> {
    pub fn from_vec(rows: usize, cols: usize, data: Vec<E>) -> Self {
        assert_eq!(rows * cols, data.len());
        Matrix { rows, cols, data }
    }

    pub fn filled(rows: usize, cols: usize, value: E) -> Self {
        Matrix { rows, cols, data: vec![value; rows * cols] }
    }

    pub fn identity<F: FieldOps<Elem = E>>(ctx: &F, n: usize) -> Self {
        let mut m = Self::filled(n, n, ctx.zero());
        for i in 0..n {
            m.data[i * n + i] = ctx.one();
        }
        m
    }

    /// Builds a matrix whose `j`-th column is `columns[j]`.
    pub fn from_columns(rows: usize, columns: &[Vec<E>]) -> Self {
        let cols = columns.len();
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for c in columns {
                data.push(c[i].clone());
            }
        }
        Matrix { rows, cols, data }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, i: usize, j: usize) -> &E {
        &self.data[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, value: E) {
        self.data[i * self.cols + j] = value;
    }

    pub fn row(&self, i: usize) -> &[E] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn column(&self, j: usize) -> Vec<E> {
        (0..self.rows).map(|i| self.get(i, j).clone()).collect()
    }

    pub fn data(&self) -> &[E] {
        &self.data
    }

    pub fn map<G, H: Fn(&E) -> G>(&self, f: H) -> Matrix<G> {
        Matrix { rows: self.rows, cols: self.cols, data: self.data.iter().map(f).collect() }
    }

    pub fn mul_vec<F: FieldOps<Elem = E>>(&self, ctx: &F, v: &[E]) -> Vec<E> {
        assert_eq!(v.len(), self.cols);
        (0..self.rows)
            .map(|i| {
                let mut acc = ctx.zero();
                for (a, b) in self.row(i).iter().zip(v) {
                    if !ctx.is_zero(a) && !ctx.is_zero(b) {
                        acc = ctx.add(&acc, &ctx.mul(a, b));
                    }
                }
                acc
            })
            .collect()
    }

    pub fn mul<F: FieldOps<Elem = E>>(&self, ctx: &F, other: &Matrix<E>) -> Matrix<E> {
        assert_eq!(self.cols, other.rows);
        let mut out = Matrix::filled(self.rows, other.cols, ctx.zero());
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(i, k);
                if ctx.is_zero(a) {
                    continue;
                }
                for j in 0..other.cols {
                    let b = other.get(k, j);
                    if !ctx.is_zero(b) {
                        let idx = i * out.cols + j;
                        out.data[idx] = ctx.add(&out.data[idx], &ctx.mul(a, b));
                    }
                }
            }
        }
        out
    }

    /// Reduced row echelon form in place; returns pivot columns.
    pub fn rref<F: FieldOps<Elem = E>>(&mut self, ctx: &F) -> Vec<usize> {
        let mut pivots = Vec::new();
        let mut r = 0;
        for c in 0..self.cols {
            if r == self.rows {
                break;
            }
            let Some(p) = (r..self.rows).find(|&i| !ctx.is_zero(self.get(i, c))) else {
                continue;
            };
            self.swap_rows(p, r);
            let inv = ctx.inv(self.get(r, c)).expect("nonzero pivot");
            for j in c..self.cols {
                let v = ctx.mul(self.get(r, j), &inv);
                self.set(r, j, v);
            }
            for i in 0..self.rows {
                if i == r || ctx.is_zero(self.get(i, c)) {
                    continue;
                }
                let factor = self.get(i, c).clone();
                for j in c..self.cols {
                    if ctx.is_zero(self.get(r, j)) {
                        continue;
                    }
                    let v = ctx.sub(self.get(i, j), &ctx.mul(&factor, self.get(r, j)));
                    self.set(i, j, v);
                }
            }
            pivots.push(c);
            r += 1;
        }
        pivots
    }

    fn swap_rows(&mut self, a: usize, b: usize) {
        if a != b {
            for j in 0..self.cols {
                self.data.swap(a * self.cols + j, b * self.cols + j);
            }
        }
    }

    pub fn rank<F: FieldOps<Elem = E>>(&self, ctx: &F) -> usize {
        self.clone().rref(ctx).len()
    }

    pub fn inverse<F: FieldOps<Elem = E>>(&self, ctx: &F) -> Option<Matrix<E>> {
        assert_eq!(self.rows, self.cols);
        let n = self.rows;
        let mut aug = Matrix::filled(n, 2 * n, ctx.zero());
        for i in 0..n {
            for j in 0..n {
                aug.set(i, j, self.get(i, j).clone());
            }
            aug.set(i, n + i, ctx.one());
        }
        let pivots = aug.rref(ctx);
        if pivots.len() < n || pivots[n - 1] != n - 1 {
            return None;
        }
        let mut inv = Matrix::filled(n, n, ctx.zero());
        for i in 0..n {
            for j in 0..n {
                inv.set(i, j, aug.get(i, n + j).clone());
            }
        }
        Some(inv)
    }
}

/// Affine solution set `particular + span(kernel)` of a linear system.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AffineSolution<E> {
    pub particular: Vec<E>,
    pub kernel: Vec<Vec<E>>,
}

/// Solves `a * x = b`. Returns `None` when inconsistent.
pub fn solve_affine<F: FieldOps>(
    ctx: &F,
    a: &Matrix<F::Elem>,
    b: &[F::Elem],
) -> Option<AffineSolution<F::Elem>> {
    assert_eq!(a.rows(), b.len());
    let n = a.cols();
    let mut aug = Matrix::filled(a.rows(), n + 1, ctx.zero());
    for i in 0..a.rows() {
        for j in 0..n {
            aug.set(i, j, a.get(i, j).clone());
        }
        aug.set(i, n, b[i].clone());
    }
    let pivots = aug.rref(ctx);
    if pivots.last() == Some(&n) {
        return None;
    }
    Some(read_solution(ctx, &aug, &pivots, n))
}

fn read_solution<F: FieldOps>(
    ctx: &F,
    reduced: &Matrix<F::Elem>,
    pivots: &[usize],
    n: usize,
) -> AffineSolution<F::Elem> {
    let mut particular = vec![ctx.zero(); n];
    for (r, &c) in pivots.iter().enumerate() {
        particular[c] = reduced.get(r, n).clone();
    }
    let mut is_pivot = vec![false; n];
    for &c in pivots {
        is_pivot[c] = true;
    }
    let kernel = (0..n)
        .filter(|&c| !is_pivot[c])
        .map(|free| {
            let mut v = vec![ctx.zero(); n];
            v[free] = ctx.one();
            for (r, &c) in pivots.iter().enumerate() {
                v[c] = ctx.neg(reduced.get(r, free));
            }
            v
        })
        .collect();
    AffineSolution { particular, kernel }
}

/// Number of points in `F_p^k`, saturating.
pub fn affine_size(p: u32, k: usize) -> u128 {
    (p as u128).checked_pow(k as u32).unwrap_or(u128::MAX)
}

/// Every point of a finite affine space in lexicographic order of the
/// coefficient tuple on the kernel basis.
pub fn enumerate_affine(fp: crate::scalars::Fp, sol: &AffineSolution<u32>) -> Vec<Vec<u32>> {
    let k = sol.kernel.len();
    let mut coeffs = vec![0u32; k];
    let mut out = Vec::new();
    loop {
        let mut point = sol.particular.clone();
        for (c, v) in coeffs.iter().zip(&sol.kernel) {
            if *c != 0 {
                for (x, y) in point.iter_mut().zip(v) {
                    *x = fp.add(*x, fp.mul(*c, *y));
                }
            }
        }
        out.push(point);
        if !odometer(&mut coeffs, fp.p()) {
            return out;
        }
    }
}

/// Increments a base-`p` counter; returns false after wrapping to zero.
pub fn odometer(digits: &mut [u32], p: u32) -> bool {
    for d in digits.iter_mut() {
        *d += 1;
        if *d < p {
            return true;
        }
        *d = 0;
    }
    false
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalars::{Field, Fp};

    #[test]
    fn inverse_roundtrip_f3() {
        let fp = Fp::new(3);
        let m = Matrix::from_vec(3, 3, vec![1, 2, 0, 0, 1, 1, 2, 0, 1]);
        let inv = m.inverse(&fp).expect("invertible");
        assert_eq!(m.mul(&fp, &inv), Matrix::identity(&fp, 3));
        let singular = Matrix::from_vec(2, 2, vec![1, 2, 2, 1]);
        assert!(singular.inverse(&fp).is_none());
    }

    #[test]
    fn affine_solution_over_q() {
        let q = Field::Rational;
        let s = |n| q.from_i64(n);
        // x + y = 2, 2x + 2y = 4
        let a = Matrix::from_vec(2, 2, vec![s(1), s(1), s(2), s(2)]);
        let sol = solve_affine(&q, &a, &[s(2), s(4)]).unwrap();
        assert_eq!(sol.kernel.len(), 1);
        let check = a.mul_vec(&q, &sol.particular);
        assert_eq!(check, vec![s(2), s(4)]);
        assert_eq!(a.mul_vec(&q, &sol.kernel[0]), vec![s(0), s(0)]);
        assert!(solve_affine(&q, &a, &[s(1), s(1)]).is_none());
    }

    #[test]
    fn enumerate_points() {
        let fp = Fp::new(2);
        let a = Matrix::from_vec(1, 3, vec![1, 1, 0]);
        let sol = solve_affine(&fp, &a, &[1]).unwrap();
        let pts = enumerate_affine(fp, &sol);
        assert_eq!(pts.len(), 4);
        for p in &pts {
            assert_eq!(a.mul_vec(&fp, p), vec![1]);
        }
        let set: std::collections::HashSet<_> = pts.into_iter().collect();
        assert_eq!(set.len(), 4);
    }
}
