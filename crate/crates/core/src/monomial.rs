//! Generalized permutation matrices with root-of-unity entries.

use num_integer::Integer;
use serde::{Deserialize, Serialize};

use crate::cyclotomic::{Cyclotomic, CyclotomicField, SparseVector};
use crate::scalar::ExactField;

/// Column `j` has its single nonzero entry `ζ_N^{phase[j]}` in row `perm[j]`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct MonomialMatrix {
    pub dim: usize,
    #[serde(rename = "N")]
    pub order: i64,
    pub perm: Vec<usize>,
    pub phase: Vec<i64>,
}

impl MonomialMatrix {
    pub fn new(order: i64, perm: Vec<usize>, phase: Vec<i64>) -> Self {
        assert_eq!(perm.len(), phase.len());
        let dim = perm.len();
        let mut seen = vec![false; dim];
        for &p in &perm {
            assert!(p < dim && !seen[p], "not a permutation");
            seen[p] = true;
        }
        let phase = phase.into_iter().map(|p| p.mod_floor(&order)).collect();
        MonomialMatrix { dim, order, perm, phase }
    }

    pub fn identity(dim: usize, order: i64) -> Self {
        Self::scalar(dim, order, 0)
    }

    /// `ζ^z · I`.
    pub fn scalar(dim: usize, order: i64, z: i64) -> Self {
        MonomialMatrix::new(order, (0..dim).collect(), vec![z; dim])
    }

    pub fn mul(&self, other: &MonomialMatrix) -> MonomialMatrix {
        assert_eq!(self.dim, other.dim);
        assert_eq!(self.order, other.order);
        let perm = other.perm.iter().map(|&r| self.perm[r]).collect();
        let phase = (0..self.dim).map(|j| self.phase[other.perm[j]] + other.phase[j]).collect();
        MonomialMatrix::new(self.order, perm, phase)
    }

    pub fn inverse(&self) -> MonomialMatrix {
        let mut perm = vec![0; self.dim];
        let mut phase = vec![0; self.dim];
        for j in 0..self.dim {
            perm[self.perm[j]] = j;
            phase[self.perm[j]] = -self.phase[j];
        }
        MonomialMatrix::new(self.order, perm, phase)
    }

    /// Conjugate transpose; equal to the inverse.
    pub fn adjoint(&self) -> MonomialMatrix {
        self.inverse()
    }

    /// Multiplies every entry by `ζ^z`.
    pub fn scaled(&self, z: i64) -> MonomialMatrix {
        MonomialMatrix::new(self.order, self.perm.clone(), self.phase.iter().map(|p| p + z).collect())
    }

    /// `a` with `self = ζ^a · other`, if the two are proportional.
    pub fn ratio(&self, other: &MonomialMatrix) -> Option<i64> {
        if self.perm != other.perm || self.dim == 0 {
            return (self.perm == other.perm).then_some(0);
        }
        let a = (self.phase[0] - other.phase[0]).mod_floor(&self.order);
        (0..self.dim)
            .all(|j| (self.phase[j] - other.phase[j]).mod_floor(&self.order) == a)
            .then_some(a)
    }

    pub fn commutes_with(&self, other: &MonomialMatrix) -> bool {
        self.mul(other) == other.mul(self)
    }

    /// Exponents of the diagonal entries that are nonzero.
    pub fn trace_exponents(&self) -> Vec<i64> {
        (0..self.dim).filter(|&j| self.perm[j] == j).map(|j| self.phase[j]).collect()
    }

    pub fn trace<T: ExactField>(&self, field: &CyclotomicField<T>) -> Cyclotomic<T> {
        field.sum_of_roots(self.trace_exponents())
    }

    /// Row-major flattening into `dim²` coordinates.
    pub fn to_sparse<T: ExactField>(&self, field: &CyclotomicField<T>) -> SparseVector<T> {
        (0..self.dim).map(|j| (self.perm[j] * self.dim + j, field.root_power(self.phase[j]))).collect()
    }

    /// Entry `(row, col)` as an exponent, or `None` for zero.
    pub fn entry(&self, row: usize, col: usize) -> Option<i64> {
        (self.perm[col] == row).then(|| self.phase[col])
    }
}

/// Rows of the linear system `T·a = b·T` in the `dim²` entries of `T`
/// (row-major), two terms per row.
pub fn intertwining_equations<T: ExactField>(
    field: &CyclotomicField<T>,
    a: &MonomialMatrix,
    b: &MonomialMatrix,
) -> Vec<SparseVector<T>> {
    let d = a.dim;
    let back = b.inverse();
    let mut out = Vec::with_capacity(d * d);
    for r in 0..d {
        let j = back.perm[r];
        for c in 0..d {
            // (T·a)_{rc} = ζ^{a.phase[c]} T_{r,a.perm[c]};  (b·T)_{rc} = ζ^{b.phase[j]} T_{j,c}
            let mut row = SparseVector::new();
            row.insert(r * d + a.perm[c], field.root_power(a.phase[c]));
            let other = field.neg(&field.root_power(b.phase[j]));
            let key = j * d + c;
            let merged = match row.get(&key) {
                Some(v) => field.add(v, &other),
                None => other,
            };
            row.insert(key, merged);
            row.retain(|_, v| !v.is_zero());
            if !row.is_empty() {
                out.push(row);
            }
        }
    }
    out
}
