//! Coordinate-level kernels shared by the exhaustive and sampled searches.
//!
//! Elements are plain coordinate vectors in [`BasisOrder`]; the arithmetic
//! context decides whether they hold [`crate::Scalar`]s or raw residues.

use crate::basis::BasisOrder;
use crate::linalg::{solve_affine, AffineSolution, Matrix};
use crate::scalars::FieldOps;

/// `I(X,F)` in coordinates.
pub struct DenseAlgebra<'a, F: FieldOps> {
    pub ctx: &'a F,
    pub basis: &'a BasisOrder,
}

impl<'a, F: FieldOps> Clone for DenseAlgebra<'a, F> {
    fn clone(&self) -> Self {
        *self
    }
}

impl<'a, F: FieldOps> Copy for DenseAlgebra<'a, F> {}

impl<'a, F: FieldOps> DenseAlgebra<'a, F> {
    pub fn new(ctx: &'a F, basis: &'a BasisOrder) -> Self {
        DenseAlgebra { ctx, basis }
    }

    pub fn dim(&self) -> usize {
        self.basis.dim()
    }

    pub fn zero(&self) -> Vec<F::Elem> {
        vec![self.ctx.zero(); self.dim()]
    }

    pub fn unit(&self, k: usize) -> Vec<F::Elem> {
        let mut v = self.zero();
        v[k] = self.ctx.one();
        v
    }

    pub fn identity(&self) -> Vec<F::Elem> {
        let mut v = self.zero();
        for x in 0..self.basis.poset_size() {
            v[self.basis.diag(x)] = self.ctx.one();
        }
        v
    }

    pub fn is_zero(&self, f: &[F::Elem]) -> bool {
        f.iter().all(|a| self.ctx.is_zero(a))
    }

    pub fn mul_into(&self, f: &[F::Elem], g: &[F::Elem], out: &mut [F::Elem]) {
        let ctx = self.ctx;
        for o in out.iter_mut() {
            *o = ctx.zero();
        }
        for &(i, j, k) in self.basis.products() {
            let (a, b) = (&f[i], &g[j]);
            if !ctx.is_zero(a) && !ctx.is_zero(b) {
                out[k] = ctx.add(&out[k], &ctx.mul(a, b));
            }
        }
    }

    pub fn mul(&self, f: &[F::Elem], g: &[F::Elem]) -> Vec<F::Elem> {
        let mut out = self.zero();
        self.mul_into(f, g, &mut out);
        out
    }

    pub fn add(&self, f: &[F::Elem], g: &[F::Elem]) -> Vec<F::Elem> {
        f.iter().zip(g).map(|(a, b)| self.ctx.add(a, b)).collect()
    }

    pub fn sub(&self, f: &[F::Elem], g: &[F::Elem]) -> Vec<F::Elem> {
        f.iter().zip(g).map(|(a, b)| self.ctx.sub(a, b)).collect()
    }

    pub fn neg(&self, f: &[F::Elem]) -> Vec<F::Elem> {
        f.iter().map(|a| self.ctx.neg(a)).collect()
    }

    pub fn scale(&self, r: &F::Elem, f: &[F::Elem]) -> Vec<F::Elem> {
        f.iter().map(|a| self.ctx.mul(r, a)).collect()
    }

    /// Matrix of `g -> f g` in basis coordinates.
    pub fn left_mul_matrix(&self, f: &[F::Elem]) -> Matrix<F::Elem> {
        let d = self.dim();
        let ctx = self.ctx;
        let mut m = Matrix::filled(d, d, ctx.zero());
        for &(i, j, k) in self.basis.products() {
            if !ctx.is_zero(&f[i]) {
                let v = ctx.add(m.get(k, j), &f[i]);
                m.set(k, j, v);
            }
        }
        m
    }

    /// `{g : f g = a}` as particular solution plus kernel basis.
    pub fn right_factors(&self, f: &[F::Elem], a: &[F::Elem]) -> Option<AffineSolution<F::Elem>> {
        solve_affine(self.ctx, &self.left_mul_matrix(f), a)
    }
}

/// Kernels specialised to residues modulo a small prime.
pub mod residue {
    use crate::basis::BasisOrder;
    use crate::scalars::Fp;

    /// Fast product on residue coordinates.
    #[inline]
    pub fn mul_into(fp: Fp, basis: &BasisOrder, f: &[u32], g: &[u32], out: &mut [u32]) {
        out.iter_mut().for_each(|o| *o = 0);
        for &(i, j, k) in basis.products() {
            let (a, b) = (f[i], g[j]);
            if a != 0 && b != 0 {
                out[k] = fp.add(out[k], fp.mul(a, b));
            }
        }
    }

    /// `out = m * v` for a row-major `d x d` residue matrix.
    #[inline]
    pub fn mat_vec(fp: Fp, m: &[u32], v: &[u32], out: &mut [u32]) {
        let d = v.len();
        for (i, o) in out.iter_mut().enumerate() {
            let row = &m[i * d..(i + 1) * d];
            let mut acc = 0u64;
            for (a, b) in row.iter().zip(v) {
                acc += (*a as u64) * (*b as u64);
            }
            *o = (acc % fp.p() as u64) as u32;
        }
    }

    /// Writes `index` in base `p` into `digits` (least significant first).
    pub fn decode(mut index: u64, p: u32, digits: &mut [u32]) {
        for d in digits.iter_mut() {
            *d = (index % p as u64) as u32;
            index /= p as u64;
        }
    }

    /// Solves `f g = a` restricted to one target column at a time.
    ///
    /// `(f g)(u, v)` only involves `g(z, v)` for `z <= v`, so the system splits
    /// into independent blocks, one per element `v`. Returns the particular
    /// solution and a kernel basis, or `None` when inconsistent.
    pub struct BlockSolver {
        // for each v: coordinates of (z, v) for z <= v, and rows (u, v)
        blocks: Vec<Vec<(usize, usize)>>,
        // coefficient lookup: for row (u,v) and column (z,v), coordinate of f(u,z)
        coeff: Vec<Vec<Vec<Option<usize>>>>,
        // block visiting order
        order: Vec<usize>,
        dim: usize,
    }

    impl BlockSolver {
        pub fn new(basis: &BasisOrder) -> Self {
            let n = basis.poset_size();
            let mut blocks = Vec::with_capacity(n);
            let mut coeff = Vec::with_capacity(n);
            for v in 0..n {
                let below: Vec<(usize, usize)> =
                    (0..n).filter_map(|z| basis.index(z, v).map(|k| (z, k))).collect();
                let table = below
                    .iter()
                    .map(|&(u, _)| below.iter().map(|&(z, _)| basis.index(u, z)).collect())
                    .collect();
                blocks.push(below);
                coeff.push(table);
            }
            BlockSolver { blocks, coeff, order: (0..n).collect(), dim: basis.dim() }
        }

        /// Visits first the blocks where `a` is nonzero; the others are
        /// homogeneous and always consistent, so inconsistency shows up early.
        pub fn prioritize(mut self, a: &[u32]) -> Self {
            let blocks = &self.blocks;
            self.order.sort_by_key(|&v| blocks[v].iter().all(|&(_, k)| a[k] == 0));
            self
        }

        pub fn solve(&self, fp: Fp, f: &[u32], a: &[u32]) -> Option<(Vec<u32>, Vec<Vec<u32>>)> {
            let mut buf = SolveBuf::new(self.dim);
            if !self.solve_into(fp, f, a, &mut buf) {
                return None;
            }
            let kernel = (0..buf.kernel_len()).map(|i| buf.kernel(i).to_vec()).collect();
            Some((buf.particular, kernel))
        }

        /// Allocation-free form of [`BlockSolver::solve`]; returns `false`
        /// when inconsistent.
        pub fn solve_into(&self, fp: Fp, f: &[u32], a: &[u32], buf: &mut SolveBuf) -> bool {
            let p = fp.p();
            buf.particular.iter_mut().for_each(|x| *x = 0);
            buf.kernel.clear();
            for &v in &self.order {
                let (below, table) = (&self.blocks[v], &self.coeff[v]);
                let m = below.len();
                let w = m + 1;
                let aug = &mut buf.aug;
                aug.clear();
                aug.resize(m * w, 0);
                for (r, row) in table.iter().enumerate() {
                    for (c, entry) in row.iter().enumerate() {
                        if let Some(k) = entry {
                            aug[r * w + c] = f[*k];
                        }
                    }
                    aug[r * w + m] = a[below[r].1];
                }
                buf.pivots.clear();
                let mut row = 0;
                for c in 0..m {
                    if row == m {
                        break;
                    }
                    let Some(piv) = (row..m).find(|&i| aug[i * w + c] != 0) else {
                        continue;
                    };
                    if piv != row {
                        for j in 0..w {
                            aug.swap(piv * w + j, row * w + j);
                        }
                    }
                    let lead = aug[row * w + c];
                    if lead != 1 {
                        let inv = fp.inv(lead).expect("nonzero pivot");
                        for j in c..w {
                            aug[row * w + j] = fp.mul(aug[row * w + j], inv);
                        }
                    }
                    for i in 0..m {
                        let factor = aug[i * w + c];
                        if i == row || factor == 0 {
                            continue;
                        }
                        for j in c..w {
                            let x = aug[row * w + j];
                            if x != 0 {
                                aug[i * w + j] = (aug[i * w + j] + (p - factor) * x) % p;
                            }
                        }
                    }
                    buf.pivots.push(c);
                    row += 1;
                }
                if (row..m).any(|i| aug[i * w + m] != 0) {
                    return false;
                }
                for (r, &c) in buf.pivots.iter().enumerate() {
                    buf.particular[below[c].1] = aug[r * w + m];
                }
                let mut next = 0;
                for free in 0..m {
                    if next < buf.pivots.len() && buf.pivots[next] == free {
                        next += 1;
                        continue;
                    }
                    let start = buf.kernel.len();
                    buf.kernel.resize(start + self.dim, 0);
                    let k = &mut buf.kernel[start..];
                    k[below[free].1] = 1;
                    for (r, &c) in buf.pivots.iter().enumerate() {
                        k[below[c].1] = fp.neg(aug[r * w + free]);
                    }
                }
            }
            true
        }
    }

    /// Reusable output of [`BlockSolver::solve_into`]; kernel vectors are
    /// stored back to back.
    pub struct SolveBuf {
        pub particular: Vec<u32>,
        kernel: Vec<u32>,
        aug: Vec<u32>,
        pivots: Vec<usize>,
        dim: usize,
    }

    impl SolveBuf {
        pub fn new(dim: usize) -> Self {
            SolveBuf { particular: vec![0; dim], kernel: Vec::new(), aug: Vec::new(), pivots: Vec::new(), dim }
        }

        pub fn kernel_len(&self) -> usize {
            self.kernel.len() / self.dim.max(1)
        }

        pub fn kernel(&self, i: usize) -> &[u32] {
            &self.kernel[i * self.dim..(i + 1) * self.dim]
        }
    }

    /// `out = sum_k v[k] * columns[k]`, skipping zero coordinates.
    #[inline]
    pub fn combine_columns(fp: Fp, columns: &[Vec<u32>], v: &[u32], out: &mut [u32]) {
        out.iter_mut().for_each(|o| *o = 0);
        for (k, &c) in v.iter().enumerate() {
            if c != 0 {
                for (o, &x) in out.iter_mut().zip(&columns[k]) {
                    if x != 0 {
                        *o = fp.add(*o, fp.mul(c, x));
                    }
                }
            }
        }
    }
}
