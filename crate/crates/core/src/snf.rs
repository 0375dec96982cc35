//! Smith normal form over the integers, with unimodular transforms.
//!
//! The transforms are what make the rest of the crate work: integer kernels
//! (subgroup kernels, radicals, annihilators) and solvability of linear
//! congruence systems both come from `U·A·V = D`.

use crate::scalar::IntegerScalar;

/// Dense row-major matrix.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Matrix<T> {
    rows: usize,
    cols: usize,
    data: Vec<T>,
}

impl<T: IntegerScalar> Matrix<T> {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Matrix { rows, cols, data: vec![T::zero(); rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = T::one();
        }
        m
    }

    /// Builds a matrix from rows; `cols` is needed when `rows` is empty.
    pub fn from_rows(rows: &[Vec<T>], cols: usize) -> Self {
        let mut m = Self::zeros(rows.len(), cols);
        for (i, r) in rows.iter().enumerate() {
            assert_eq!(r.len(), cols, "ragged matrix row {i}");
            for (j, v) in r.iter().enumerate() {
                m[(i, j)] = v.clone();
            }
        }
        m
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn to_rows(&self) -> Vec<Vec<T>> {
        (0..self.rows).map(|i| self.row(i).to_vec()).collect()
    }

    pub fn row(&self, i: usize) -> &[T] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn column(&self, j: usize) -> Vec<T> {
        (0..self.rows).map(|i| self[(i, j)].clone()).collect()
    }

    pub fn transpose(&self) -> Self {
        let mut t = Self::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                t[(j, i)] = self[(i, j)].clone();
            }
        }
        t
    }

    pub fn mul(&self, other: &Self) -> Self {
        assert_eq!(self.cols, other.rows, "matrix product shape mismatch");
        let mut out = Self::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = &self[(i, k)];
                if a.is_zero() {
                    continue;
                }
                for j in 0..other.cols {
                    let prod = a.clone() * other[(k, j)].clone();
                    out[(i, j)] = out[(i, j)].clone() + prod;
                }
            }
        }
        out
    }

    pub fn mul_vec(&self, v: &[T]) -> Vec<T> {
        assert_eq!(self.cols, v.len());
        (0..self.rows)
            .map(|i| {
                self.row(i)
                    .iter()
                    .zip(v)
                    .fold(T::zero(), |acc, (a, b)| acc + a.clone() * b.clone())
            })
            .collect()
    }

    fn swap_rows(&mut self, a: usize, b: usize) {
        if a != b {
            for j in 0..self.cols {
                self.data.swap(a * self.cols + j, b * self.cols + j);
            }
        }
    }

    fn swap_cols(&mut self, a: usize, b: usize) {
        if a != b {
            for i in 0..self.rows {
                self.data.swap(i * self.cols + a, i * self.cols + b);
            }
        }
    }

    /// row[dst] += factor * row[src]
    fn add_row(&mut self, dst: usize, src: usize, factor: &T) {
        for j in 0..self.cols {
            let v = self[(dst, j)].clone() + factor.clone() * self[(src, j)].clone();
            self[(dst, j)] = v;
        }
    }

    /// col[dst] += factor * col[src]
    fn add_col(&mut self, dst: usize, src: usize, factor: &T) {
        for i in 0..self.rows {
            let v = self[(i, dst)].clone() + factor.clone() * self[(i, src)].clone();
            self[(i, dst)] = v;
        }
    }

    fn negate_row(&mut self, i: usize) {
        for j in 0..self.cols {
            self[(i, j)] = -self[(i, j)].clone();
        }
    }

    fn negate_col(&mut self, j: usize) {
        for i in 0..self.rows {
            self[(i, j)] = -self[(i, j)].clone();
        }
    }

    pub fn is_diagonal(&self) -> bool {
        (0..self.rows).all(|i| (0..self.cols).all(|j| i == j || self[(i, j)].is_zero()))
    }
}

impl<T> std::ops::Index<(usize, usize)> for Matrix<T> {
    type Output = T;
    fn index(&self, (i, j): (usize, usize)) -> &T {
        &self.data[i * self.cols + j]
    }
}

impl<T> std::ops::IndexMut<(usize, usize)> for Matrix<T> {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut T {
        &mut self.data[i * self.cols + j]
    }
}

/// Result of [`smith_normal_form`]: `left · input · right = diagonal`.
#[derive(Clone, Debug)]
pub struct SmithForm<T> {
    pub diagonal: Matrix<T>,
    pub left: Matrix<T>,
    pub left_inverse: Matrix<T>,
    pub right: Matrix<T>,
    /// Number of nonzero diagonal entries.
    pub rank: usize,
}

impl<T: IntegerScalar> SmithForm<T> {
    /// Diagonal entries `d_0 | d_1 | ...` (including trailing zeros up to `min(rows, cols)`).
    pub fn invariants(&self) -> Vec<T> {
        let k = self.diagonal.rows().min(self.diagonal.cols());
        (0..k).map(|i| self.diagonal[(i, i)].clone()).collect()
    }
}

/// Quotient with the remainder of least absolute value.
fn nearest_quotient<T: IntegerScalar>(a: &T, p: &T) -> T {
    let q = a.div_floor(p);
    let r = a.clone() - q.clone() * p.clone();
    let two = T::one() + T::one();
    // a floor remainder carries the sign of p
    if r.abs() * two > p.abs() {
        q + T::one()
    } else {
        q
    }
}

struct Reducer<T> {
    a: Matrix<T>,
    u: Matrix<T>,
    u_inv: Matrix<T>,
    v: Matrix<T>,
}

impl<T: IntegerScalar> Reducer<T> {
    fn swap_rows(&mut self, x: usize, y: usize) {
        self.a.swap_rows(x, y);
        self.u.swap_rows(x, y);
        self.u_inv.swap_cols(x, y);
    }

    fn swap_cols(&mut self, x: usize, y: usize) {
        self.a.swap_cols(x, y);
        self.v.swap_cols(x, y);
    }

    fn add_row(&mut self, dst: usize, src: usize, f: &T) {
        self.a.add_row(dst, src, f);
        self.u.add_row(dst, src, f);
        self.u_inv.add_col(src, dst, &(-f.clone()));
    }

    fn add_col(&mut self, dst: usize, src: usize, f: &T) {
        self.a.add_col(dst, src, f);
        self.v.add_col(dst, src, f);
    }

    fn negate_row(&mut self, i: usize) {
        self.a.negate_row(i);
        self.u.negate_row(i);
        self.u_inv.negate_col(i);
    }

    /// Position of the smallest nonzero |entry| in the trailing submatrix.
    fn min_entry(&self, t: usize) -> Option<(usize, usize)> {
        let mut best: Option<(usize, usize, T)> = None;
        for i in t..self.a.rows() {
            for j in t..self.a.cols() {
                let v = self.a[(i, j)].abs();
                if v.is_zero() {
                    continue;
                }
                if best.as_ref().is_none_or(|(_, _, b)| v < *b) {
                    best = Some((i, j, v));
                }
            }
        }
        best.map(|(i, j, _)| (i, j))
    }

    fn reduce_pivot(&mut self, t: usize) {
        loop {
            let p = self.a[(t, t)].clone();
            let mut clean = true;
            for i in t + 1..self.a.rows() {
                if !self.a[(i, t)].is_zero() {
                    let q = nearest_quotient(&self.a[(i, t)], &p);
                    self.add_row(i, t, &(-q));
                    if !self.a[(i, t)].is_zero() {
                        clean = false;
                    }
                }
            }
            for j in t + 1..self.a.cols() {
                if !self.a[(t, j)].is_zero() {
                    let q = nearest_quotient(&self.a[(t, j)], &p);
                    self.add_col(j, t, &(-q));
                    if !self.a[(t, j)].is_zero() {
                        clean = false;
                    }
                }
            }
            if !clean {
                // move the smallest remainder in row/column t onto the pivot
                let mut best = (t, t, self.a[(t, t)].abs());
                for i in t + 1..self.a.rows() {
                    let v = self.a[(i, t)].abs();
                    if !v.is_zero() && v < best.2 {
                        best = (i, t, v);
                    }
                }
                for j in t + 1..self.a.cols() {
                    let v = self.a[(t, j)].abs();
                    if !v.is_zero() && v < best.2 {
                        best = (t, j, v);
                    }
                }
                self.swap_rows(t, best.0);
                self.swap_cols(t, best.1);
                continue;
            }
            let mut offender = None;
            'scan: for i in t + 1..self.a.rows() {
                for j in t + 1..self.a.cols() {
                    if !self.a[(i, j)].is_multiple_of(&p) {
                        offender = Some(i);
                        break 'scan;
                    }
                }
            }
            match offender {
                Some(i) => self.add_row(t, i, &T::one()),
                None => break,
            }
        }
        if self.a[(t, t)].is_negative() {
            self.negate_row(t);
        }

    }
}

/// Computes `U·m·V = D` with `D` diagonal, `d_0 | d_1 | ...` ascending, nonnegative.
pub fn smith_normal_form<T: IntegerScalar>(m: &Matrix<T>) -> SmithForm<T> {
    let mut r = Reducer {
        a: m.clone(),
        u: Matrix::identity(m.rows()),
        u_inv: Matrix::identity(m.rows()),
        v: Matrix::identity(m.cols()),
    };
    let k = m.rows().min(m.cols());
    let mut t = 0;
    while t < k {
        let Some((i, j)) = r.min_entry(t) else { break };
        r.swap_rows(t, i);
        r.swap_cols(t, j);
        r.reduce_pivot(t);
        t += 1;
    }
    SmithForm { diagonal: r.a, left: r.u, left_inverse: r.u_inv, right: r.v, rank: t }
}

/// Generators of the integer kernel `{x ∈ Zⁿ : m·x = 0}`.
pub fn integer_kernel<T: IntegerScalar>(m: &Matrix<T>) -> Vec<Vec<T>> {
    let snf = smith_normal_form(m);
    (snf.rank..m.cols()).map(|j| snf.right.column(j)).collect()
}

/// Some integer solution of `m·x = b`, if one exists.
pub fn solve_integer_system<T: IntegerScalar>(m: &Matrix<T>, b: &[T]) -> Option<Vec<T>> {
    assert_eq!(m.rows(), b.len());
    let snf = smith_normal_form(m);
    let c = snf.left.mul_vec(b);
    let mut y = vec![T::zero(); m.cols()];
    for (i, ci) in c.iter().enumerate() {
        if i < snf.rank {
            let d = &snf.diagonal[(i, i)];
            if !ci.is_multiple_of(d) {
                return None;
            }
            y[i] = ci.clone() / d.clone();
        } else if !ci.is_zero() {
            return None;
        }
    }
    Some(snf.right.mul_vec(&y))
}
