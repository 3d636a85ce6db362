//! Dense matrices over any coefficient field, plus a one-sided Jacobi SVD
//! for the high-precision complex domain (rank and kernel with an explicit
//! singular-value threshold).

use crate::scalar::{Dyadic, Field, PrecComplex};

#[derive(Clone, PartialEq)]
pub struct Mat<F: Field> {
    rows: usize,
    cols: usize,
    data: Vec<F>,
}

impl<F: Field> Mat<F> {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Mat { rows, cols, data: vec![F::zero(); rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = F::one();
        }
        m
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> F) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        Mat { rows, cols, data }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn add(&self, o: &Self) -> Self {
        assert_eq!((self.rows, self.cols), (o.rows, o.cols));
        Mat {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&o.data).map(|(a, b)| a.add(b)).collect(),
        }
    }

    pub fn sub(&self, o: &Self) -> Self {
        assert_eq!((self.rows, self.cols), (o.rows, o.cols));
        Mat {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&o.data).map(|(a, b)| a.sub(b)).collect(),
        }
    }

    pub fn neg(&self) -> Self {
        Mat { rows: self.rows, cols: self.cols, data: self.data.iter().map(|a| a.neg()).collect() }
    }

    pub fn scale(&self, c: &F) -> Self {
        Mat { rows: self.rows, cols: self.cols, data: self.data.iter().map(|a| a.mul(c)).collect() }
    }

    pub fn matmul(&self, o: &Self) -> Self {
        assert_eq!(self.cols, o.rows);
        let mut out = Self::zeros(self.rows, o.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = &self[(i, k)];
                if a.is_zero_strict() {
                    continue;
                }
                for j in 0..o.cols {
                    let b = &o[(k, j)];
                    if !b.is_zero_strict() {
                        out[(i, j)] = out[(i, j)].add(&a.mul(b));
                    }
                }
            }
        }
        out
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |i, j| self[(j, i)].clone())
    }

    pub fn map<G: Field>(&self, mut f: impl FnMut(&F) -> G) -> Mat<G> {
        Mat { rows: self.rows, cols: self.cols, data: self.data.iter().map(|x| f(x)).collect() }
    }

    pub fn is_negligible(&self) -> bool {
        self.data.iter().all(|x| x.is_negligible())
    }

    pub fn entries(&self) -> impl Iterator<Item = &F> {
        self.data.iter()
    }

    /// Row-echelon rank using each entry's own negligibility test for pivot
    /// admissibility. Exact over exact fields; tolerance rank over numerics.
    pub fn rank(&self) -> usize {
        let mut m = self.clone();
        let mut rank = 0;
        let mut col = 0;
        while rank < m.rows && col < m.cols {
            let pivot = (rank..m.rows).find(|&r| !m[(r, col)].is_negligible());
            let Some(p) = pivot else {
                col += 1;
                continue;
            };
            m.swap_rows(rank, p);
            let inv = m[(rank, col)].inv().expect("pivot certified nonzero");
            for r in rank + 1..m.rows {
                if m[(r, col)].is_zero_strict() {
                    continue;
                }
                let factor = m[(r, col)].mul(&inv);
                for c in col..m.cols {
                    let delta = factor.mul(&m[(rank, c)]);
                    m[(r, c)] = m[(r, c)].sub(&delta);
                }
            }
            rank += 1;
            col += 1;
        }
        rank
    }

    /// Basis of the right kernel, by reduced row echelon form. Same pivot
    /// policy as `rank`.
    pub fn kernel_basis(&self) -> Vec<Vec<F>> {
        let mut m = self.clone();
        let mut pivots: Vec<(usize, usize)> = Vec::new();
        let mut rank = 0;
        for col in 0..m.cols {
            if rank >= m.rows {
                break;
            }
            let Some(p) = (rank..m.rows).find(|&r| !m[(r, col)].is_negligible()) else {
                continue;
            };
            m.swap_rows(rank, p);
            let inv = m[(rank, col)].inv().expect("pivot certified nonzero");
            for c in col..m.cols {
                m[(rank, c)] = m[(rank, c)].mul(&inv);
            }
            for r in 0..m.rows {
                if r != rank && !m[(r, col)].is_zero_strict() {
                    let factor = m[(r, col)].clone();
                    for c in col..m.cols {
                        let delta = factor.mul(&m[(rank, c)]);
                        m[(r, c)] = m[(r, c)].sub(&delta);
                    }
                }
            }
            pivots.push((rank, col));
            rank += 1;
        }
        let pivot_cols: Vec<usize> = pivots.iter().map(|&(_, c)| c).collect();
        let mut basis = Vec::new();
        for free in 0..m.cols {
            if pivot_cols.contains(&free) {
                continue;
            }
            let mut v = vec![F::zero(); m.cols];
            v[free] = F::one();
            for &(r, c) in &pivots {
                v[c] = m[(r, free)].neg();
            }
            basis.push(v);
        }
        basis
    }

    /// Solve `self * x = rhs` (square, invertible). Gaussian elimination with
    /// first-admissible pivoting.
    pub fn solve(&self, rhs: &Mat<F>) -> Option<Mat<F>> {
        assert_eq!(self.rows, self.cols);
        assert_eq!(self.rows, rhs.rows);
        let n = self.rows;
        let mut a = self.clone();
        let mut b = rhs.clone();
        for col in 0..n {
            let p = (col..n).find(|&r| !a[(r, col)].is_negligible())?;
            a.swap_rows(col, p);
            b.swap_rows(col, p);
            let inv = a[(col, col)].inv()?;
            for r in 0..n {
                if r == col || a[(r, col)].is_zero_strict() {
                    continue;
                }
                let factor = a[(r, col)].mul(&inv);
                for c in col..n {
                    let delta = factor.mul(&a[(col, c)]);
                    a[(r, c)] = a[(r, c)].sub(&delta);
                }
                for c in 0..b.cols {
                    let delta = factor.mul(&b[(col, c)]);
                    b[(r, c)] = b[(r, c)].sub(&delta);
                }
            }
        }
        for r in 0..n {
            let inv = a[(r, r)].inv()?;
            for c in 0..b.cols {
                b[(r, c)] = b[(r, c)].mul(&inv);
            }
        }
        Some(b)
    }

    pub fn inverse(&self) -> Option<Mat<F>> {
        self.solve(&Mat::identity(self.rows))
    }

    fn swap_rows(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for c in 0..self.cols {
            self.data.swap(a * self.cols + c, b * self.cols + c);
        }
    }
}

impl<F: Field> std::ops::Index<(usize, usize)> for Mat<F> {
    type Output = F;
    fn index(&self, (i, j): (usize, usize)) -> &F {
        &self.data[i * self.cols + j]
    }
}

impl<F: Field> std::ops::IndexMut<(usize, usize)> for Mat<F> {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut F {
        &mut self.data[i * self.cols + j]
    }
}

impl<F: Field> std::fmt::Debug for Mat<F> {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        writeln!(f, "Mat {}x{} [", self.rows, self.cols)?;
        for i in 0..self.rows {
            write!(f, "  ")?;
            for j in 0..self.cols {
                write!(f, "{:?} ", self[(i, j)])?;
            }
            writeln!(f)?;
        }
        write!(f, "]")
    }
}

/// Singular values (descending) and right singular vectors of a complex
/// matrix, by one-sided Jacobi: phase-align a column pair, then apply the
/// classical symmetric rotation; singular values are the final column norms.
pub fn jacobi_svd(a: &Mat<PrecComplex>) -> (Vec<Dyadic>, Mat<PrecComplex>) {
    let (m, n) = (a.rows(), a.cols());
    let mut u = a.clone();
    let mut v: Mat<PrecComplex> = Mat::identity(n);
    let bits = a
        .entries()
        .map(|e| e.precision_bits())
        .max()
        .unwrap_or(64)
        .max(64);
    let eps = Dyadic::two_pow(-(bits as i64) + 8, bits);
    let col_dot = |mat: &Mat<PrecComplex>, i: usize, j: usize| {
        let mut acc = PrecComplex::from_int_bits(0, bits);
        for r in 0..mat.rows() {
            acc = acc.add(&mat[(r, i)].conj().mul(&mat[(r, j)]));
        }
        acc
    };
    for _sweep in 0..60 {
        let mut rotated = false;
        for i in 0..n {
            for j in i + 1..n {
                let g = col_dot(&u, i, j);
                let aa = col_dot(&u, i, i).re().clone();
                let bb = col_dot(&u, j, j).re().clone();
                let gn = g.abs();
                // convergence test: |g|^2 <= eps^2 * a * b
                let lhs = gn.mul(&gn);
                let rhs = eps.mul(&eps).mul(&aa).mul(&bb);
                if lhs.cmp_val(&rhs) != std::cmp::Ordering::Greater {
                    continue;
                }
                rotated = true;
                // phase p = g / |g|; multiply column j by conj(p) making the
                // inner product real positive, then rotate
                let p = g.scale(&Dyadic::from_int(1).div(&gn));
                let pc = p.conj();
                for r in 0..m {
                    u[(r, j)] = u[(r, j)].mul(&pc);
                }
                for r in 0..n {
                    v[(r, j)] = v[(r, j)].mul(&pc);
                }
                let tau = bb.sub(&aa).div(&gn.mul_i64(2));
                let t_abs = Dyadic::from_int(1)
                    .div(&tau.abs().add(&Dyadic::from_int(1).add(&tau.mul(&tau)).sqrt()));
                let t = if tau.is_negative() { t_abs.neg() } else { t_abs };
                let c = Dyadic::from_int(1).div(&Dyadic::from_int(1).add(&t.mul(&t)).sqrt());
                let s = t.mul(&c);
                for r in 0..m {
                    let ui = u[(r, i)].clone();
                    let uj = u[(r, j)].clone();
                    u[(r, i)] = ui.scale(&c).sub(&uj.scale(&s));
                    u[(r, j)] = ui.scale(&s).add(&uj.scale(&c));
                }
                for r in 0..n {
                    let vi = v[(r, i)].clone();
                    let vj = v[(r, j)].clone();
                    v[(r, i)] = vi.scale(&c).sub(&vj.scale(&s));
                    v[(r, j)] = vi.scale(&s).add(&vj.scale(&c));
                }
            }
        }
        if !rotated {
            break;
        }
    }
    let mut pairs: Vec<(Dyadic, usize)> = (0..n)
        .map(|j| {
            let mut acc = Dyadic::from_int_bits(0, bits);
            for r in 0..m {
                acc = acc.add(&u[(r, j)].norm2());
            }
            (acc.sqrt(), j)
        })
        .collect();
    pairs.sort_by(|a, b| b.0.cmp_val(&a.0));
    let values: Vec<Dyadic> = pairs.iter().map(|(s, _)| s.clone()).collect();
    let vperm = Mat::from_fn(n, n, |i, j| v[(i, pairs[j].1)].clone());
    (values, vperm)
}

/// Rank of a complex matrix with singular values below `threshold` treated
/// as zero.
pub fn svd_rank(a: &Mat<PrecComplex>, threshold: &Dyadic) -> usize {
    let (sv, _) = jacobi_svd(a);
    sv.iter()
        .filter(|s| s.cmp_val(threshold) == std::cmp::Ordering::Greater)
        .count()
}

/// Orthonormal-ish basis of the numerical kernel at `threshold`.
pub fn svd_kernel(a: &Mat<PrecComplex>, threshold: &Dyadic) -> Vec<Vec<PrecComplex>> {
    let (sv, v) = jacobi_svd(a);
    let n = a.cols();
    let mut out = Vec::new();
    for (j, s) in sv.iter().enumerate() {
        if s.cmp_val(threshold) != std::cmp::Ordering::Greater {
            out.push((0..n).map(|i| v[(i, j)].clone()).collect());
        }
    }
    out
}
