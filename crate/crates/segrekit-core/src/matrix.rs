//! Matrices over truncated series and over exact complex rationals.
//!
//! [`SeriesMatrix`] carries the series-valued linear algebra (determinants by
//! Laplace expansion, adjugates, Neumann inversion of matrices with identity
//! constant term). [`ExactMatrix`] carries the scalar linear algebra: exact
//! rank, linear solving with kernel bases, inversion, and the inertia of a
//! Hermitian matrix by congruence deflation.

use crate::multiindex::MultiIndex;
use crate::rational::GaussianRational;
use crate::series::TruncatedSeries;

/// Row-major matrix of truncated series sharing one ambient ring.
#[derive(Clone, Debug, PartialEq)]
pub struct SeriesMatrix {
    rows: usize,
    cols: usize,
    entries: Vec<TruncatedSeries>,
}

impl SeriesMatrix {
    pub fn new(rows: usize, cols: usize, entries: Vec<TruncatedSeries>) -> Self {
        assert_eq!(entries.len(), rows * cols, "entry count mismatch");
        assert!(!entries.is_empty(), "empty matrix");
        let arity = entries[0].arity();
        for e in &entries {
            assert_eq!(e.arity(), arity, "matrix entries live in different rings");
        }
        SeriesMatrix { rows, cols, entries }
    }

    pub fn identity(n: usize, arity: usize, cap: u32) -> Self {
        let mut entries = Vec::with_capacity(n * n);
        for i in 0..n {
            for j in 0..n {
                entries.push(if i == j {
                    TruncatedSeries::one(arity, cap)
                } else {
                    TruncatedSeries::zero(arity, cap)
                });
            }
        }
        SeriesMatrix::new(n, n, entries)
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn at(&self, i: usize, j: usize) -> &TruncatedSeries {
        assert!(i < self.rows && j < self.cols, "matrix index out of range");
        &self.entries[i * self.cols + j]
    }

    pub fn arity(&self) -> usize {
        self.entries[0].arity()
    }

    pub fn map<F: FnMut(&TruncatedSeries) -> TruncatedSeries>(&self, f: F) -> Self {
        SeriesMatrix {
            rows: self.rows,
            cols: self.cols,
            entries: self.entries.iter().map(f).collect(),
        }
    }

    pub fn add(&self, rhs: &SeriesMatrix) -> Self {
        assert_eq!((self.rows, self.cols), (rhs.rows, rhs.cols), "shape mismatch");
        SeriesMatrix {
            rows: self.rows,
            cols: self.cols,
            entries: self
                .entries
                .iter()
                .zip(&rhs.entries)
                .map(|(a, b)| a.add(b))
                .collect(),
        }
    }

    pub fn sub(&self, rhs: &SeriesMatrix) -> Self {
        assert_eq!((self.rows, self.cols), (rhs.rows, rhs.cols), "shape mismatch");
        SeriesMatrix {
            rows: self.rows,
            cols: self.cols,
            entries: self
                .entries
                .iter()
                .zip(&rhs.entries)
                .map(|(a, b)| a.sub(b))
                .collect(),
        }
    }

    pub fn mul(&self, rhs: &SeriesMatrix) -> Self {
        assert_eq!(self.cols, rhs.rows, "inner dimension mismatch");
        let arity = self.arity();
        let cap = self.min_cap().min(rhs.min_cap());
        let mut entries = Vec::with_capacity(self.rows * rhs.cols);
        for i in 0..self.rows {
            for j in 0..rhs.cols {
                let mut acc = TruncatedSeries::zero(arity, cap);
                for k in 0..self.cols {
                    acc = acc.add(&self.at(i, k).mul(rhs.at(k, j)));
                }
                entries.push(acc);
            }
        }
        SeriesMatrix::new(self.rows, rhs.cols, entries)
    }

    /// Applies the matrix to a column vector of series.
    pub fn apply(&self, v: &[TruncatedSeries]) -> Vec<TruncatedSeries> {
        assert_eq!(v.len(), self.cols, "vector length mismatch");
        (0..self.rows)
            .map(|i| {
                let mut acc = TruncatedSeries::zero(self.arity(), self.min_cap());
                for k in 0..self.cols {
                    acc = acc.add(&self.at(i, k).mul(&v[k]));
                }
                acc
            })
            .collect()
    }

    pub fn min_cap(&self) -> u32 {
        self.entries.iter().map(|e| e.cap()).min().unwrap()
    }

    /// Constant-term matrix.
    pub fn constant_matrix(&self) -> ExactMatrix {
        ExactMatrix::from_fn(self.rows, self.cols, |i, j| self.at(i, j).constant_term())
    }

    /// Determinant and adjugate by Laplace expansion; postcondition
    /// `self * adj = det * I`, verified in tests.
    pub fn det_adjugate(&self) -> (TruncatedSeries, SeriesMatrix) {
        assert_eq!(self.rows, self.cols, "determinant of a non-square matrix");
        let n = self.rows;
        let det = self.det_laplace(&(0..n).collect::<Vec<_>>(), &(0..n).collect::<Vec<_>>());
        let mut adj_entries = Vec::with_capacity(n * n);
        for i in 0..n {
            for j in 0..n {
                // adj[i][j] = (-1)^{i+j} * minor with row j, column i removed.
                let rows: Vec<usize> = (0..n).filter(|&r| r != j).collect();
                let cols: Vec<usize> = (0..n).filter(|&c| c != i).collect();
                let minor = self.det_laplace(&rows, &cols);
                adj_entries.push(if (i + j) % 2 == 0 { minor } else { minor.neg() });
            }
        }
        (det, SeriesMatrix::new(n, n, adj_entries))
    }

    fn det_laplace(&self, rows: &[usize], cols: &[usize]) -> TruncatedSeries {
        assert_eq!(rows.len(), cols.len());
        let arity = self.arity();
        let cap = self.min_cap();
        match rows.len() {
            0 => TruncatedSeries::one(arity, cap),
            1 => self.at(rows[0], cols[0]).clone(),
            _ => {
                let mut acc = TruncatedSeries::zero(arity, cap);
                let rest: Vec<usize> = rows[1..].to_vec();
                for (k, &c) in cols.iter().enumerate() {
                    let entry = self.at(rows[0], c);
                    if entry.is_zero() {
                        continue;
                    }
                    let sub_cols: Vec<usize> =
                        cols.iter().copied().filter(|&cc| cc != c).collect();
                    let minor = self.det_laplace(&rest, &sub_cols);
                    let term = entry.mul(&minor);
                    acc = if k % 2 == 0 { acc.add(&term) } else { acc.sub(&term) };
                }
                acc
            }
        }
    }

    /// Inverse of a matrix whose constant term is the identity, via the
    /// Neumann series `sum (I - M)^j`. Returns `None` if the constant term
    /// is not the identity.
    pub fn neumann_inverse(&self) -> Option<SeriesMatrix> {
        assert_eq!(self.rows, self.cols, "inverse of a non-square matrix");
        let n = self.rows;
        let c = self.constant_matrix();
        if !c.is_identity() {
            return None;
        }
        let arity = self.arity();
        let cap = self.min_cap();
        let id = SeriesMatrix::identity(n, arity, cap);
        let nil = id.sub(self); // valuation >= 1 in every entry
        let mut acc = id.clone();
        let mut pw = id;
        for _ in 0..cap {
            pw = pw.mul(&nil);
            if pw.entries.iter().all(|e| e.is_zero()) {
                break;
            }
            acc = acc.add(&pw);
        }
        Some(acc)
    }

    /// Inverse of a matrix whose constant term is invertible: factor out the
    /// constant part exactly, then apply the Neumann series. `None` when the
    /// constant term is singular.
    pub fn invert_unit(&self) -> Option<SeriesMatrix> {
        let c0 = self.constant_matrix();
        let c0_inv = c0.inverse()?;
        let c0_inv_series = c0_inv.to_series_matrix(self.arity(), self.min_cap());
        let normalized = c0_inv_series.mul(self);
        let inv = normalized.neumann_inverse()?;
        Some(inv.mul(&c0_inv_series))
    }

    /// [`invert_unit`](Self::invert_unit) with every Neumann iterate pruned
    /// to terms satisfying `keep`.
    ///
    /// Sound only when the discarded monomial set is closed under
    /// multiplication by further monomials (`keep` defines a downward-closed
    /// exponent region): a dropped term can then never contribute back
    /// inside the kept region. The kept region of the result is exact; all
    /// other terms are absent rather than merely truncated.
    pub fn invert_unit_filtered(
        &self,
        keep: &dyn Fn(&MultiIndex) -> bool,
    ) -> Option<SeriesMatrix> {
        let c0 = self.constant_matrix();
        let c0_inv = c0.inverse()?;
        let c0_inv_series = c0_inv.to_series_matrix(self.arity(), self.min_cap());
        let normalized = c0_inv_series.mul(self).map(|e| e.retain_terms(keep));

        let n = normalized.rows;
        let c = normalized.constant_matrix();
        if !c.is_identity() {
            return None;
        }
        let arity = normalized.arity();
        let cap = normalized.min_cap();
        let id = SeriesMatrix::identity(n, arity, cap);
        let nil = id.sub(&normalized);
        let mut acc = id.clone();
        let mut pw = id;
        for _ in 0..cap {
            pw = pw.mul(&nil).map(|e| e.retain_terms(keep));
            if pw.entries.iter().all(|e| e.is_zero()) {
                break;
            }
            acc = acc.add(&pw);
        }
        Some(acc.mul(&c0_inv_series))
    }
}

/// Dense matrix of exact complex rationals.
#[derive(Clone, Debug, PartialEq)]
pub struct ExactMatrix {
    rows: usize,
    cols: usize,
    data: Vec<GaussianRational>,
}

impl ExactMatrix {
    pub fn zero(rows: usize, cols: usize) -> Self {
        ExactMatrix {
            rows,
            cols,
            data: vec![GaussianRational::zero(); rows * cols],
        }
    }

    pub fn from_fn<F: FnMut(usize, usize) -> GaussianRational>(
        rows: usize,
        cols: usize,
        mut f: F,
    ) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        ExactMatrix { rows, cols, data }
    }

    pub fn from_rows(rows: Vec<Vec<GaussianRational>>) -> Self {
        assert!(!rows.is_empty(), "empty matrix");
        let cols = rows[0].len();
        assert!(rows.iter().all(|r| r.len() == cols), "ragged rows");
        ExactMatrix {
            rows: rows.len(),
            cols,
            data: rows.into_iter().flatten().collect(),
        }
    }

    pub fn identity(n: usize) -> Self {
        ExactMatrix::from_fn(n, n, |i, j| {
            if i == j {
                GaussianRational::one()
            } else {
                GaussianRational::zero()
            }
        })
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn at(&self, i: usize, j: usize) -> &GaussianRational {
        &self.data[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: GaussianRational) {
        self.data[i * self.cols + j] = v;
    }

    pub fn is_identity(&self) -> bool {
        self.rows == self.cols
            && (0..self.rows).all(|i| {
                (0..self.cols).all(|j| {
                    if i == j {
                        self.at(i, j).is_one()
                    } else {
                        self.at(i, j).is_zero()
                    }
                })
            })
    }

    pub fn transpose(&self) -> Self {
        ExactMatrix::from_fn(self.cols, self.rows, |i, j| self.at(j, i).clone())
    }

    pub fn conj_transpose(&self) -> Self {
        ExactMatrix::from_fn(self.cols, self.rows, |i, j| self.at(j, i).conj())
    }

    pub fn mul(&self, rhs: &ExactMatrix) -> Self {
        assert_eq!(self.cols, rhs.rows, "inner dimension mismatch");
        ExactMatrix::from_fn(self.rows, rhs.cols, |i, j| {
            let mut acc = GaussianRational::zero();
            for k in 0..self.cols {
                acc += &(self.at(i, k) * rhs.at(k, j));
            }
            acc
        })
    }

    pub fn to_series_matrix(&self, arity: usize, cap: u32) -> SeriesMatrix {
        SeriesMatrix::new(
            self.rows,
            self.cols,
            self.data
                .iter()
                .map(|c| TruncatedSeries::constant(arity, cap, c.clone()))
                .collect(),
        )
    }

    /// Exact rank by Gaussian elimination.
    pub fn rank(&self) -> usize {
        let mut m = self.clone();
        let mut rank = 0;
        for col in 0..m.cols {
            if rank == m.rows {
                break;
            }
            let pivot = (rank..m.rows).find(|&r| !m.at(r, col).is_zero());
            let Some(p) = pivot else { continue };
            m.swap_rows(rank, p);
            let inv = m.at(rank, col).inv().unwrap();
            for r in (rank + 1)..m.rows {
                if m.at(r, col).is_zero() {
                    continue;
                }
                let factor = m.at(r, col) * &inv;
                for c in col..m.cols {
                    let v = m.at(r, c) - &(&factor * m.at(rank, c));
                    m.set(r, c, v);
                }
            }
            rank += 1;
        }
        rank
    }

    pub fn det(&self) -> GaussianRational {
        assert_eq!(self.rows, self.cols, "determinant of non-square matrix");
        let mut m = self.clone();
        let n = m.rows;
        let mut det = GaussianRational::one();
        for col in 0..n {
            let pivot = (col..n).find(|&r| !m.at(r, col).is_zero());
            let Some(p) = pivot else {
                return GaussianRational::zero();
            };
            if p != col {
                m.swap_rows(col, p);
                det = -det;
            }
            det = &det * m.at(col, col);
            let inv = m.at(col, col).inv().unwrap();
            for r in (col + 1)..n {
                if m.at(r, col).is_zero() {
                    continue;
                }
                let factor = m.at(r, col) * &inv;
                for c in col..n {
                    let v = m.at(r, c) - &(&factor * m.at(col, c));
                    m.set(r, c, v);
                }
            }
        }
        det
    }

    pub fn inverse(&self) -> Option<ExactMatrix> {
        assert_eq!(self.rows, self.cols, "inverse of non-square matrix");
        let n = self.rows;
        let mut m = self.clone();
        let mut inv = ExactMatrix::identity(n);
        for col in 0..n {
            let pivot = (col..n).find(|&r| !m.at(r, col).is_zero())?;
            m.swap_rows(col, pivot);
            inv.swap_rows(col, pivot);
            let piv_inv = m.at(col, col).inv().unwrap();
            for c in 0..n {
                m.set(col, c, m.at(col, c) * &piv_inv);
                inv.set(col, c, inv.at(col, c) * &piv_inv);
            }
            for r in 0..n {
                if r == col || m.at(r, col).is_zero() {
                    continue;
                }
                let factor = m.at(r, col).clone();
                for c in 0..n {
                    let mv = m.at(r, c) - &(&factor * m.at(col, c));
                    m.set(r, c, mv);
                    let iv = inv.at(r, c) - &(&factor * inv.at(col, c));
                    inv.set(r, c, iv);
                }
            }
        }
        Some(inv)
    }

    fn swap_rows(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for c in 0..self.cols {
            self.data.swap(a * self.cols + c, b * self.cols + c);
        }
    }

    /// Solves `A x = b` exactly. Returns `None` when inconsistent, otherwise
    /// a particular solution together with a basis of the kernel of `A`.
    pub fn solve_general(
        &self,
        b: &[GaussianRational],
    ) -> Option<(Vec<GaussianRational>, Vec<Vec<GaussianRational>>)> {
        assert_eq!(b.len(), self.rows, "right-hand side length mismatch");
        let n = self.cols;
        let mut m = ExactMatrix::from_fn(self.rows, n + 1, |i, j| {
            if j < n {
                self.at(i, j).clone()
            } else {
                b[i].clone()
            }
        });
        // Reduced row echelon form of the augmented matrix.
        let mut pivot_cols: Vec<usize> = Vec::new();
        let mut row = 0;
        for col in 0..n {
            if row == m.rows {
                break;
            }
            let pivot = (row..m.rows).find(|&r| !m.at(r, col).is_zero());
            let Some(p) = pivot else { continue };
            m.swap_rows(row, p);
            let inv = m.at(row, col).inv().unwrap();
            for c in col..=n {
                m.set(row, c, m.at(row, c) * &inv);
            }
            for r in 0..m.rows {
                if r == row || m.at(r, col).is_zero() {
                    continue;
                }
                let factor = m.at(r, col).clone();
                for c in col..=n {
                    let v = m.at(r, c) - &(&factor * m.at(row, c));
                    m.set(r, c, v);
                }
            }
            pivot_cols.push(col);
            row += 1;
        }
        for r in row..m.rows {
            if !m.at(r, n).is_zero() {
                return None;
            }
        }
        let mut particular = vec![GaussianRational::zero(); n];
        for (r, &pc) in pivot_cols.iter().enumerate() {
            particular[pc] = m.at(r, n).clone();
        }
        let mut kernel = Vec::new();
        for free in 0..n {
            if pivot_cols.contains(&free) {
                continue;
            }
            let mut v = vec![GaussianRational::zero(); n];
            v[free] = GaussianRational::one();
            for (r, &pc) in pivot_cols.iter().enumerate() {
                v[pc] = -m.at(r, free);
            }
            kernel.push(v);
        }
        Some((particular, kernel))
    }

    /// Signature `(n_plus, n_minus, n_zero)` of a Hermitian matrix by exact
    /// congruence deflation. Panics if the matrix is not Hermitian.
    pub fn hermitian_inertia(&self) -> (usize, usize, usize) {
        assert_eq!(self.rows, self.cols, "inertia of non-square matrix");
        assert_eq!(*self, self.conj_transpose(), "inertia requires a Hermitian matrix");
        use num_traits::Signed;
        let n = self.rows;
        let mut b = self.clone();
        let mut plus = 0;
        let mut minus = 0;
        loop {
            let Some(v) = find_anisotropic_probe(&b) else { break };
            // lambda = v* B v, real and nonzero for the returned probe.
            let bv: Vec<GaussianRational> = (0..n)
                .map(|i| {
                    let mut acc = GaussianRational::zero();
                    for j in 0..n {
                        acc += &(b.at(i, j) * &v[j]);
                    }
                    acc
                })
                .collect();
            let mut lambda = GaussianRational::zero();
            for i in 0..n {
                lambda += &(&v[i].conj() * &bv[i]);
            }
            assert!(lambda.is_real() && !lambda.is_zero());
            if lambda.re().is_positive() {
                plus += 1;
            } else {
                minus += 1;
            }
            let lambda_inv = lambda.inv().unwrap();
            for i in 0..n {
                for j in 0..n {
                    let upd = b.at(i, j) - &(&(&bv[i] * &lambda_inv) * &bv[j].conj());
                    b.set(i, j, upd);
                }
            }
        }
        (plus, minus, n - plus - minus)
    }
}

/// Finds a vector `v` with `v* B v != 0` for a nonzero Hermitian `B`, among
/// the probes `e_j`, `e_j + e_k`, `e_j + i e_k`; returns `None` iff `B = 0`.
fn find_anisotropic_probe(b: &ExactMatrix) -> Option<Vec<GaussianRational>> {
    use num_traits::Zero;
    let n = b.rows();
    for j in 0..n {
        if !b.at(j, j).is_zero() {
            let mut v = vec![GaussianRational::zero(); n];
            v[j] = GaussianRational::one();
            return Some(v);
        }
    }
    for j in 0..n {
        for k in (j + 1)..n {
            let entry = b.at(j, k);
            if entry.is_zero() {
                continue;
            }
            let mut v = vec![GaussianRational::zero(); n];
            v[j] = GaussianRational::one();
            // Re(entry) != 0: probe e_j + e_k has value 2 Re(entry);
            // otherwise Im(entry) != 0 and e_j + i e_k has value -2 Im(entry).
            if !entry.re().is_zero() {
                v[k] = GaussianRational::one();
            } else {
                v[k] = GaussianRational::i();
            }
            return Some(v);
        }
    }
    None
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::multiindex::MultiIndex;
    use crate::rational::GaussianRational as Q;

    fn var(arity: usize, cap: u32, v: usize) -> TruncatedSeries {
        TruncatedSeries::variable(arity, cap, v)
    }

    #[test]
    fn adjugate_identity_postcondition() {
        // M = [[1, x], [y, 1 + x y]]
        let one = TruncatedSeries::one(2, 5);
        let x = var(2, 5, 0);
        let y = var(2, 5, 1);
        let m = SeriesMatrix::new(
            2,
            2,
            vec![one.clone(), x.clone(), y.clone(), one.add(&x.mul(&y))],
        );
        let (det, adj) = m.det_adjugate();
        let prod = m.mul(&adj);
        for i in 0..2 {
            for j in 0..2 {
                let expect = if i == j { det.clone() } else { TruncatedSeries::zero(2, 5) };
                assert_eq!(*prod.at(i, j), expect, "entry ({}, {})", i, j);
            }
        }
        // det = 1 + x y - x y = 1
        assert_eq!(det, TruncatedSeries::one(2, 5));
    }

    #[test]
    fn neumann_inverse_round_trip() {
        let one = TruncatedSeries::one(2, 6);
        let x = var(2, 6, 0);
        let y = var(2, 6, 1);
        let m = SeriesMatrix::new(
            2,
            2,
            vec![one.clone().add(&y), x.mul(&y), x.clone(), one.clone()],
        );
        let inv = m.neumann_inverse().expect("constant term is I");
        let prod = m.mul(&inv);
        assert_eq!(*prod.at(0, 0), TruncatedSeries::one(2, 6));
        assert_eq!(*prod.at(0, 1), TruncatedSeries::zero(2, 6));
        assert_eq!(*prod.at(1, 0), TruncatedSeries::zero(2, 6));
        assert_eq!(*prod.at(1, 1), TruncatedSeries::one(2, 6));
    }

    #[test]
    fn neumann_rejects_non_identity_constant() {
        let two = TruncatedSeries::constant(1, 3, Q::from_int(2));
        let m = SeriesMatrix::new(1, 1, vec![two]);
        assert!(m.neumann_inverse().is_none());
        assert!(m.invert_unit().is_some());
    }

    #[test]
    fn invert_unit_general_constant() {
        let one = TruncatedSeries::one(1, 4);
        let x = var(1, 4, 0);
        let m = SeriesMatrix::new(
            2,
            2,
            vec![
                one.scale(&Q::from_int(2)),
                x.clone(),
                one.scale(&Q::i()),
                one.add(&x),
            ],
        );
        let inv = m.invert_unit().expect("constant term invertible");
        let prod = m.mul(&inv);
        assert_eq!(*prod.at(0, 0), TruncatedSeries::one(1, 4));
        assert_eq!(*prod.at(1, 0), TruncatedSeries::zero(1, 4));
    }

    #[test]
    fn exact_rank_and_det() {
        let m = ExactMatrix::from_rows(vec![
            vec![Q::from_int(1), Q::from_int(0), Q::from_int(1)],
            vec![Q::from_int(1), Q::from_int(-1), Q::from_int(0)],
            vec![Q::from_int(2), Q::from_int(-1), Q::from_int(1)],
        ]);
        assert_eq!(m.rank(), 2);
        assert_eq!(m.det(), Q::zero());
        let m2 = ExactMatrix::from_rows(vec![
            vec![Q::from_int(1), Q::i()],
            vec![Q::from_int(0), Q::from_int(3)],
        ]);
        assert_eq!(m2.det(), Q::from_int(3));
        let inv = m2.inverse().unwrap();
        assert!(m2.mul(&inv).is_identity());
    }

    #[test]
    fn solve_general_with_kernel() {
        // x + y = 2 has a one-dimensional solution space.
        let a = ExactMatrix::from_rows(vec![vec![Q::one(), Q::one()]]);
        let (p, k) = a.solve_general(&[Q::from_int(2)]).unwrap();
        assert_eq!(&p[0] + &p[1], Q::from_int(2));
        assert_eq!(k.len(), 1);
        assert_eq!(&k[0][0] + &k[0][1], Q::zero());
        // Inconsistent system.
        let a2 = ExactMatrix::from_rows(vec![
            vec![Q::one(), Q::one()],
            vec![Q::one(), Q::one()],
        ]);
        assert!(a2.solve_general(&[Q::from_int(1), Q::from_int(2)]).is_none());
    }

    #[test]
    fn hermitian_inertia_cases() {
        // diag(2, -3, 0)
        let mut d = ExactMatrix::zero(3, 3);
        d.set(0, 0, Q::from_int(2));
        d.set(1, 1, Q::from_int(-3));
        assert_eq!(d.hermitian_inertia(), (1, 1, 1));
        // [[0, i], [-i, 0]] has eigenvalues +-1.
        let mut h = ExactMatrix::zero(2, 2);
        h.set(0, 1, Q::i());
        h.set(1, 0, -&Q::i());
        assert_eq!(h.hermitian_inertia(), (1, 1, 0));
        // [[0, 1], [1, 0]] likewise.
        let mut s = ExactMatrix::zero(2, 2);
        s.set(0, 1, Q::one());
        s.set(1, 0, Q::one());
        assert_eq!(s.hermitian_inertia(), (1, 1, 0));
    }

    #[test]
    fn series_coefficients_survive_matrix_ops() {
        let x = var(1, 3, 0);
        let m = SeriesMatrix::new(1, 1, vec![TruncatedSeries::one(1, 3).add(&x)]);
        let sq = m.mul(&m);
        assert_eq!(
            sq.at(0, 0).coeff(&MultiIndex::new(vec![1])),
            Q::from_int(2)
        );
    }
}
