//! Finite abelian groups in invariant-factor form.
//!
//! A group is `Z/d_1 × ... × Z/d_n` with `d_n | ... | d_1`, so `d_1` is the
//! exponent. Subgroups are stored as the row Hermite normal form of their
//! preimage lattice `L` with `D·Zⁿ ⊆ L ⊆ Zⁿ`: an upper triangular matrix with
//! positive diagonal `h_ii | d_i` and `0 ≤ h_ik < h_kk` above each pivot.
//! Equal subgroups have equal matrices.

use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::ToPrimitive;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::snf::{integer_kernel, smith_normal_form, solve_integer_system, Matrix};

/// Default cap on the group order for exhaustive enumeration.
pub const DEFAULT_ENUMERATION_LIMIT: u64 = 4096;

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(try_from = "GroupJson")]
pub struct FiniteAbelianGroup {
    factors: Vec<i64>,
}

#[derive(Deserialize)]
struct GroupJson {
    factors: Vec<i64>,
}

impl TryFrom<GroupJson> for FiniteAbelianGroup {
    type Error = Error;
    fn try_from(raw: GroupJson) -> Result<Self> {
        FiniteAbelianGroup::new(raw.factors)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct GroupElement(pub Vec<i64>);

impl GroupElement {
    pub fn coords(&self) -> &[i64] {
        &self.0
    }
}

impl fmt::Display for GroupElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (i, c) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{c}")?;
        }
        write!(f, ")")
    }
}

impl FiniteAbelianGroup {
    /// Validates `d_i ≥ 1` and the descending divisibility chain.
    pub fn new(factors: Vec<i64>) -> Result<Self> {
        if let Some(bad) = factors.iter().find(|&&d| d < 1) {
            return Err(Error::InvalidGroup(format!("factor {bad} is not positive")));
        }
        for w in factors.windows(2) {
            if w[0] % w[1] != 0 {
                return Err(Error::InvalidGroup(format!(
                    "factors must satisfy d_(i+1) | d_i, but {} does not divide {}",
                    w[1], w[0]
                )));
            }
        }
        Ok(FiniteAbelianGroup { factors })
    }

    pub fn trivial() -> Self {
        FiniteAbelianGroup { factors: Vec::new() }
    }

    pub fn cyclic(n: i64) -> Result<Self> {
        Self::new(vec![n])
    }

    pub fn factors(&self) -> &[i64] {
        &self.factors
    }

    pub fn rank(&self) -> usize {
        self.factors.len()
    }

    pub fn order(&self) -> u64 {
        self.factors.iter().map(|&d| d as u64).product()
    }

    /// Largest element order; 1 for the trivial group.
    pub fn exponent(&self) -> i64 {
        self.factors.first().copied().unwrap_or(1)
    }

    /// The Pontryagin dual has the same invariant factors.
    pub fn dual(&self) -> Self {
        self.clone()
    }

    /// `A × Â` with generators ordered `x_1, χ_1, x_2, χ_2, ...`.
    pub fn with_dual(&self) -> Self {
        let factors = self.factors.iter().flat_map(|&d| [d, d]).collect();
        FiniteAbelianGroup { factors }
    }

    pub fn identity(&self) -> GroupElement {
        GroupElement(vec![0; self.rank()])
    }

    pub fn basis_element(&self, i: usize) -> GroupElement {
        let mut v = vec![0; self.rank()];
        v[i] = 1 % self.factors[i];
        GroupElement(v)
    }

    /// Reduces an arbitrary integer vector into canonical residues.
    pub fn reduce(&self, coords: &[i64]) -> GroupElement {
        assert_eq!(coords.len(), self.rank(), "coordinate length mismatch");
        GroupElement(coords.iter().zip(&self.factors).map(|(x, d)| x.mod_floor(d)).collect())
    }

    /// Checked constructor: coordinates must already be residues.
    pub fn element(&self, coords: Vec<i64>) -> Result<GroupElement> {
        if coords.len() != self.rank() {
            return Err(Error::InvalidElement(format!(
                "expected {} coordinates, got {}",
                self.rank(),
                coords.len()
            )));
        }
        for (x, d) in coords.iter().zip(&self.factors) {
            if *x < 0 || x >= d {
                return Err(Error::InvalidElement(format!("coordinate {x} not in [0, {d})")));
            }
        }
        Ok(GroupElement(coords))
    }

    pub fn contains_element(&self, x: &GroupElement) -> bool {
        x.0.len() == self.rank() && x.0.iter().zip(&self.factors).all(|(c, d)| *c >= 0 && c < d)
    }

    pub fn add(&self, x: &GroupElement, y: &GroupElement) -> GroupElement {
        GroupElement(
            x.0.iter().zip(&y.0).zip(&self.factors).map(|((a, b), d)| (a + b).mod_floor(d)).collect(),
        )
    }

    pub fn neg(&self, x: &GroupElement) -> GroupElement {
        GroupElement(x.0.iter().zip(&self.factors).map(|(a, d)| (-a).mod_floor(d)).collect())
    }

    pub fn sub(&self, x: &GroupElement, y: &GroupElement) -> GroupElement {
        self.add(x, &self.neg(y))
    }

    pub fn scale(&self, k: i64, x: &GroupElement) -> GroupElement {
        GroupElement(x.0.iter().zip(&self.factors).map(|(a, d)| (k * a).mod_floor(d)).collect())
    }

    /// Least `k ≥ 1` with `k·x = 0`, i.e. `lcm_i(d_i / gcd(d_i, x_i))`.
    pub fn element_order(&self, x: &GroupElement) -> i64 {
        x.0.iter().zip(&self.factors).fold(1, |acc, (c, d)| acc.lcm(&(d / d.gcd(c))))
    }

    /// Index in lexicographic order (first coordinate most significant).
    pub fn index_of(&self, x: &GroupElement) -> usize {
        x.0.iter().zip(&self.factors).fold(0usize, |acc, (c, d)| acc * (*d as usize) + *c as usize)
    }

    pub fn element_at(&self, mut index: usize) -> GroupElement {
        let mut coords = vec![0; self.rank()];
        for i in (0..self.rank()).rev() {
            let d = self.factors[i] as usize;
            coords[i] = (index % d) as i64;
            index /= d;
        }
        GroupElement(coords)
    }

    /// All elements in lexicographic order.
    pub fn elements(&self) -> impl Iterator<Item = GroupElement> + '_ {
        (0..self.order() as usize).map(move |i| self.element_at(i))
    }
}

impl fmt::Display for FiniteAbelianGroup {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.factors.is_empty() {
            return write!(f, "0");
        }
        let parts: Vec<String> = self.factors.iter().map(|d| format!("Z/{d}")).collect();
        write!(f, "{}", parts.join(" x "))
    }
}

/// A character of `G`, written in the dual coordinates.
///
/// Its value on `x` is `ζ_N^{Σ (N/d_i)·c_i·x_i}` with `N` the exponent.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Character {
    pub coords: Vec<i64>,
}

impl Character {
    pub fn evaluate(&self, group: &FiniteAbelianGroup, x: &GroupElement) -> i64 {
        let n = group.exponent();
        self.coords
            .iter()
            .zip(x.coords())
            .zip(group.factors())
            .map(|((c, xi), d)| (n / d) * c * xi)
            .sum::<i64>()
            .mod_floor(&n)
    }
}

/// A homomorphism `source → target` as an integer matrix, one row per target factor.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GroupHom {
    source: FiniteAbelianGroup,
    target: FiniteAbelianGroup,
    matrix: Vec<Vec<i64>>,
}

impl GroupHom {
    /// Validates `α_ij·d_j ≡ 0 (mod t_i)` and reduces entries mod `t_i`.
    pub fn new(
        source: FiniteAbelianGroup,
        target: FiniteAbelianGroup,
        matrix: Vec<Vec<i64>>,
    ) -> Result<Self> {
        if matrix.len() != target.rank() || matrix.iter().any(|r| r.len() != source.rank()) {
            return Err(Error::InvalidHom(format!(
                "matrix must be {}x{}",
                target.rank(),
                source.rank()
            )));
        }
        let mut reduced = matrix;
        for (i, row) in reduced.iter_mut().enumerate() {
            let t = target.factors[i];
            for (j, a) in row.iter_mut().enumerate() {
                let d = source.factors[j];
                if (*a as i128 * d as i128) % t as i128 != 0 {
                    return Err(Error::InvalidHom(format!(
                        "entry ({i},{j}) = {a} is not divisible by {}",
                        t / t.gcd(&d)
                    )));
                }
                *a = a.mod_floor(&t);
            }
        }
        Ok(GroupHom { source, target, matrix: reduced })
    }

    pub fn identity(group: &FiniteAbelianGroup) -> Self {
        let n = group.rank();
        let matrix =
            (0..n).map(|i| (0..n).map(|j| i64::from(i == j) % group.factors[i]).collect()).collect();
        GroupHom { source: group.clone(), target: group.clone(), matrix }
    }

    pub fn source(&self) -> &FiniteAbelianGroup {
        &self.source
    }

    pub fn target(&self) -> &FiniteAbelianGroup {
        &self.target
    }

    pub fn matrix(&self) -> &[Vec<i64>] {
        &self.matrix
    }

    pub fn apply(&self, x: &GroupElement) -> GroupElement {
        let y = self
            .matrix
            .iter()
            .zip(self.target.factors())
            .map(|(row, &t)| {
                let s: i128 = row.iter().zip(x.coords()).map(|(a, b)| *a as i128 * *b as i128).sum();
                s.mod_floor(&(t as i128)) as i64
            })
            .collect();
        GroupElement(y)
    }

    /// `self ∘ other`.
    pub fn compose(&self, other: &GroupHom) -> Result<GroupHom> {
        if other.target != self.source {
            return Err(Error::ParentMismatch("composition of incompatible homomorphisms".into()));
        }
        let a = to_matrix(&self.matrix, self.source.rank());
        let b = to_matrix(&other.matrix, other.source.rank());
        let prod = a.mul(&b);
        let rows = prod
            .to_rows()
            .into_iter()
            .enumerate()
            .map(|(i, r)| r.into_iter().map(|v| v.mod_floor(&(self.target.factors[i] as i128)) as i64).collect())
            .collect();
        GroupHom::new(other.source.clone(), self.target.clone(), rows)
    }

    pub fn kernel(&self) -> Subgroup {
        kernel_of_map(&self.source, &self.matrix, self.target.factors())
    }

    pub fn is_injective(&self) -> bool {
        self.kernel().order() == 1
    }

    pub fn is_isomorphism(&self) -> bool {
        self.source.order() == self.target.order() && self.is_injective()
    }

    /// Preimage of a target element, if one exists.
    pub fn preimage(&self, y: &GroupElement) -> Option<GroupElement> {
        let n = self.source.rank();
        let block = map_block(&self.matrix, n, self.target.factors());
        let rhs: Vec<BigInt> = y.coords().iter().map(|&v| BigInt::from(v)).collect();
        let sol = solve_integer_system(&block, &rhs)?;
        let x: Vec<i64> = (0..n).map(|j| reduce_big(&sol[j], self.source.factors[j])).collect();
        Some(GroupElement(x))
    }

    pub fn inverse(&self) -> Result<GroupHom> {
        if !self.is_isomorphism() {
            return Err(Error::NotAutomorphism("homomorphism is not invertible".into()));
        }
        let m = self.target.rank();
        let cols: Vec<GroupElement> = (0..m)
            .map(|j| {
                self.preimage(&self.target.basis_element(j))
                    .ok_or_else(|| Error::InvariantViolation("isomorphism without preimage".into()))
            })
            .collect::<Result<_>>()?;
        let n = self.source.rank();
        let matrix = (0..n).map(|i| (0..m).map(|j| cols[j].0[i]).collect()).collect();
        GroupHom::new(self.target.clone(), self.source.clone(), matrix)
    }
}

fn to_matrix(rows: &[Vec<i64>], cols: usize) -> Matrix<i128> {
    let rows: Vec<Vec<i128>> = rows.iter().map(|r| r.iter().map(|&v| v as i128).collect()).collect();
    Matrix::from_rows(&rows, cols)
}

/// `[F | diag(moduli)]`, whose integer kernel projects onto the kernel of `F`.
fn map_block(f: &[Vec<i64>], n: usize, moduli: &[i64]) -> Matrix<BigInt> {
    let m = moduli.len();
    let mut block = Matrix::<BigInt>::zeros(m, n + m);
    for i in 0..m {
        for j in 0..n {
            block[(i, j)] = BigInt::from(f[i][j]);
        }
        block[(i, n + i)] = BigInt::from(moduli[i]);
    }
    block
}

fn reduce_big(v: &BigInt, modulus: i64) -> i64 {
    v.mod_floor(&BigInt::from(modulus)).to_i64().expect("residue fits in i64")
}

/// Kernel of `x ↦ F·x` from `source` into `Π Z/moduli_i`.
///
/// The map must be well defined (`F_ij·d_j ≡ 0 mod moduli_i`).
pub fn kernel_of_map(source: &FiniteAbelianGroup, f: &[Vec<i64>], moduli: &[i64]) -> Subgroup {
    let n = source.rank();
    let m = moduli.len();
    if m == 0 {
        return Subgroup::full(source);
    }
    let block = map_block(f, n, moduli);
    let gens: Vec<Vec<i64>> = integer_kernel(&block)
        .into_iter()
        .map(|v| (0..n).map(|j| reduce_big(&v[j], source.factors[j])).collect())
        .collect();
    Subgroup::from_generators(source, &gens)
}

/// Invariant-factor form of `Z/o_1 × ... × Z/o_k` and an explicit isomorphism.
#[derive(Clone, Debug)]
pub struct NormalizedGroup {
    pub group: FiniteAbelianGroup,
    /// Row `i` maps cyclic coordinates to invariant coordinate `i`.
    pub witness: Vec<Vec<i64>>,
    orders: Vec<i64>,
}

impl NormalizedGroup {
    /// Image of an element given in the cyclic coordinates.
    pub fn map(&self, x: &[i64]) -> GroupElement {
        assert_eq!(x.len(), self.orders.len());
        let y: Vec<i64> = self
            .witness
            .iter()
            .map(|row| row.iter().zip(x).map(|(a, b)| a * b).sum())
            .collect();
        self.group.reduce(&y)
    }
}

/// Accepts any cyclic decomposition and returns invariant factors (descending).
pub fn normalize_group(orders: &[i64]) -> Result<NormalizedGroup> {
    if let Some(bad) = orders.iter().find(|&&o| o < 1) {
        return Err(Error::InvalidGroup(format!("cyclic order {bad} is not positive")));
    }
    let k = orders.len();
    let mut diag = Matrix::<BigInt>::zeros(k, k);
    for (i, &o) in orders.iter().enumerate() {
        diag[(i, i)] = BigInt::from(o);
    }
    let snf = smith_normal_form(&diag);
    // U·diag·V = S, so x ↦ U·x carries Zᵏ/diag onto Zᵏ/S
    let invariant = |i: usize| snf.diagonal[(i, i)].to_i64().expect("invariant factor fits in i64");
    let mut keep: Vec<usize> = (0..k).filter(|&i| invariant(i) > 1).collect();
    keep.reverse();
    let factors: Vec<i64> = keep.iter().map(|&i| invariant(i)).collect();
    let witness = keep
        .iter()
        .map(|&i| snf.left.row(i).iter().map(|v| reduce_big(v, invariant(i))).collect())
        .collect();
    Ok(NormalizedGroup { group: FiniteAbelianGroup::new(factors)?, witness, orders: orders.to_vec() })
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Subgroup {
    parent: FiniteAbelianGroup,
    basis: Vec<Vec<i64>>,
}

impl Subgroup {
    pub fn trivial(parent: &FiniteAbelianGroup) -> Self {
        let n = parent.rank();
        let basis = (0..n).map(|i| (0..n).map(|j| if i == j { parent.factors[i] } else { 0 }).collect()).collect();
        Subgroup { parent: parent.clone(), basis }
    }

    pub fn full(parent: &FiniteAbelianGroup) -> Self {
        let n = parent.rank();
        let basis = (0..n).map(|i| (0..n).map(|j| i64::from(i == j)).collect()).collect();
        Subgroup { parent: parent.clone(), basis }
    }

    /// Subgroup generated by integer vectors (reduced mod the factors).
    pub fn from_generators(parent: &FiniteAbelianGroup, gens: &[Vec<i64>]) -> Self {
        let n = parent.rank();
        let d = parent.factors();
        let mut pending: Vec<Vec<i64>> = gens
            .iter()
            .map(|g| {
                assert_eq!(g.len(), n, "generator length mismatch");
                g.iter().zip(d).map(|(x, m)| x.mod_floor(m)).collect()
            })
            .collect();
        for i in 0..n {
            let mut row = vec![0; n];
            row[i] = d[i];
            pending.push(row);
        }
        let mut basis: Vec<Vec<i64>> = Vec::with_capacity(n);
        for j in 0..n {
            loop {
                let live: Vec<usize> = (0..pending.len()).filter(|&r| pending[r][j] != 0).collect();
                let Some(&p) = live.iter().min_by_key(|&&r| pending[r][j].abs()) else {
                    unreachable!("column {j} always holds d_j e_j");
                };
                if live.len() == 1 {
                    let mut row = pending.swap_remove(p);
                    if row[j] < 0 {
                        row.iter_mut().for_each(|v| *v = -*v);
                        for k in j + 1..n {
                            row[k] = row[k].mod_floor(&d[k]);
                        }
                    }
                    basis.push(row);
                    break;
                }
                let pivot = pending[p].clone();
                for &r in &live {
                    if r == p {
                        continue;
                    }
                    let q = Integer::div_floor(&pending[r][j], &pivot[j]);
                    for k in j..n {
                        pending[r][k] -= q * pivot[k];
                    }
                    for k in j + 1..n {
                        pending[r][k] = pending[r][k].mod_floor(&d[k]);
                    }
                }
            }
            pending.retain(|r| r.iter().any(|&v| v != 0));
        }
        for i in 0..n {
            for k in i + 1..n {
                let q = Integer::div_floor(&basis[i][k], &basis[k][k]);
                if q != 0 {
                    let rk = basis[k].clone();
                    for c in k..n {
                        basis[i][c] -= q * rk[c];
                    }
                }
            }
        }
        Subgroup { parent: parent.clone(), basis }
    }

    pub fn from_elements(parent: &FiniteAbelianGroup, gens: &[GroupElement]) -> Self {
        let raw: Vec<Vec<i64>> = gens.iter().map(|g| g.0.clone()).collect();
        Self::from_generators(parent, &raw)
    }

    pub fn parent(&self) -> &FiniteAbelianGroup {
        &self.parent
    }

    /// Canonical Hermite matrix, row-major.
    pub fn basis(&self) -> &[Vec<i64>] {
        &self.basis
    }

    /// Rebuilds from a canonical matrix, rejecting non-canonical input.
    pub fn from_basis(parent: &FiniteAbelianGroup, basis: Vec<Vec<i64>>) -> Result<Self> {
        let n = parent.rank();
        if basis.len() != n || basis.iter().any(|r| r.len() != n) {
            return Err(Error::InvalidElement(format!("subgroup basis must be {n}x{n}")));
        }
        let gens = basis.clone();
        let sub = Self::from_generators(parent, &gens);
        if sub.basis != basis {
            return Err(Error::InvalidElement("subgroup basis is not in canonical form".into()));
        }
        Ok(sub)
    }

    /// `d_i / h_ii`: the range of the `i`-th coefficient in the element box.
    fn multiplicities(&self) -> Vec<i64> {
        self.parent.factors.iter().enumerate().map(|(i, d)| d / self.basis[i][i]).collect()
    }

    pub fn order(&self) -> u64 {
        self.multiplicities().iter().map(|&m| m as u64).product()
    }

    pub fn index(&self) -> u64 {
        self.basis.iter().enumerate().map(|(i, r)| r[i] as u64).product()
    }

    /// Rows of the canonical matrix that contribute, reduced into residues.
    pub fn generators(&self) -> Vec<GroupElement> {
        self.multiplicities()
            .iter()
            .enumerate()
            .filter(|(_, &m)| m > 1)
            .map(|(i, _)| self.parent.reduce(&self.basis[i]))
            .collect()
    }

    /// Coefficients `c_i ∈ [0, d_i/h_ii)` with `x = Σ c_i·row_i`, if `x` is a member.
    pub fn decompose(&self, x: &GroupElement) -> Option<Vec<i64>> {
        let d = self.parent.factors();
        let n = d.len();
        let mut v: Vec<i64> = x.0.clone();
        let mut coeffs = vec![0; n];
        for i in 0..n {
            let xi = v[i].mod_floor(&d[i]);
            let h = self.basis[i][i];
            if xi % h != 0 {
                return None;
            }
            let c = xi / h;
            coeffs[i] = c;
            for k in i..n {
                v[k] = (v[k] - c * self.basis[i][k]).mod_floor(&d[k]);
            }
        }
        Some(coeffs)
    }

    pub fn contains(&self, x: &GroupElement) -> bool {
        x.0.len() == self.parent.rank() && self.decompose(x).is_some()
    }

    /// Lexicographically least element of the coset `x + self`.
    pub fn coset_representative(&self, x: &GroupElement) -> GroupElement {
        let d = self.parent.factors();
        let n = d.len();
        let mut v: Vec<i64> = x.0.iter().zip(d).map(|(c, m)| c.mod_floor(m)).collect();
        for i in 0..n {
            let h = self.basis[i][i];
            let c = Integer::div_floor(&v[i], &h);
            if c != 0 {
                for k in i..n {
                    v[k] = (v[k] - c * self.basis[i][k]).mod_floor(&d[k]);
                }
            }
        }
        GroupElement(v)
    }

    /// Element with box coefficients `coeffs`.
    pub fn combine(&self, coeffs: &[i64]) -> GroupElement {
        let n = self.parent.rank();
        let mut v = vec![0i64; n];
        for (i, c) in coeffs.iter().enumerate() {
            for k in i..n {
                v[k] += c * self.basis[i][k];
            }
        }
        self.parent.reduce(&v)
    }

    /// All elements, in box order.
    pub fn elements(&self) -> Vec<GroupElement> {
        let mult = self.multiplicities();
        let total = self.order() as usize;
        let mut out = Vec::with_capacity(total);
        let mut coeffs = vec![0i64; mult.len()];
        for _ in 0..total {
            out.push(self.combine(&coeffs));
            for i in (0..mult.len()).rev() {
                coeffs[i] += 1;
                if coeffs[i] < mult[i] {
                    break;
                }
                coeffs[i] = 0;
            }
        }
        out
    }

    pub fn is_subgroup_of(&self, other: &Subgroup) -> bool {
        self.parent == other.parent && self.generators().iter().all(|g| other.contains(g))
    }
}

impl fmt::Display for Subgroup {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let gens = self.generators();
        if gens.is_empty() {
            return write!(f, "<0>");
        }
        let parts: Vec<String> = gens.iter().map(|g| g.to_string()).collect();
        write!(f, "<{}>", parts.join(", "))
    }
}

/// Every subgroup of `g`, sorted by (order, canonical matrix).
pub fn enumerate_subgroups(g: &FiniteAbelianGroup, limit: u64) -> Result<Vec<Subgroup>> {
    if g.order() > limit {
        return Err(Error::LimitExceeded { order: g.order(), limit });
    }
    let n = g.rank();
    let mut out = Vec::new();
    let mut rows: Vec<Vec<i64>> = vec![vec![0; n]; n];
    fill_rows(g, n, &mut rows, &mut out);
    out.sort_by(|a: &Subgroup, b: &Subgroup| (a.order(), &a.basis).cmp(&(b.order(), &b.basis)));
    Ok(out)
}

/// Chooses rows bottom-up; row `i` is kept only if `d_i e_i` lies in the
/// lattice of rows `i..n`, which only involves rows already fixed.
fn fill_rows(g: &FiniteAbelianGroup, i: usize, rows: &mut Vec<Vec<i64>>, out: &mut Vec<Subgroup>) {
    if i == 0 {
        out.push(Subgroup { parent: g.clone(), basis: rows.clone() });
        return;
    }
    let i = i - 1;
    let n = g.rank();
    let d = g.factors();
    for h in divisors(d[i]) {
        // off-diagonal entries in row i range over [0, h_kk) for k > i
        let ranges: Vec<i64> = (i + 1..n).map(|k| rows[k][k]).collect();
        let mut offs = vec![0i64; ranges.len()];
        loop {
            let mut row = vec![0; n];
            row[i] = h;
            for (t, k) in (i + 1..n).enumerate() {
                row[k] = offs[t];
            }
            rows[i] = row;
            if tail_contains_multiple(g, rows, i) {
                fill_rows(g, i, rows, out);
            }
            let mut t = ranges.len();
            let mut carried = true;
            while t > 0 {
                t -= 1;
                offs[t] += 1;
                if offs[t] < ranges[t] {
                    carried = false;
                    break;
                }
                offs[t] = 0;
            }
            if carried {
                break;
            }
        }
    }
}

fn tail_contains_multiple(g: &FiniteAbelianGroup, rows: &[Vec<i64>], i: usize) -> bool {
    let d = g.factors();
    let n = d.len();
    let c = d[i] / rows[i][i];
    let mut v: Vec<i64> = (0..n).map(|k| if k == i { 0 } else { (-c * rows[i][k]).mod_floor(&d[k]) }).collect();
    for k in i + 1..n {
        let h = rows[k][k];
        if v[k] % h != 0 {
            return false;
        }
        let q = v[k] / h;
        for t in k..n {
            v[t] = (v[t] - q * rows[k][t]).mod_floor(&d[t]);
        }
    }
    true
}

fn divisors(n: i64) -> Vec<i64> {
    (1..=n).filter(|k| n % k == 0).collect()
}

/// One representative per coset of `m`, each the lexicographically least
/// member of its coset; the identity comes first.
pub fn quotient_transversal(g: &FiniteAbelianGroup, m: &Subgroup) -> Result<Vec<GroupElement>> {
    if m.parent() != g {
        return Err(Error::ParentMismatch(format!("subgroup of {} used with {}", m.parent(), g)));
    }
    let bounds: Vec<i64> = (0..g.rank()).map(|i| m.basis[i][i]).collect();
    let total: usize = bounds.iter().map(|&b| b as usize).product();
    let mut out = Vec::with_capacity(total);
    let mut cur = vec![0i64; bounds.len()];
    for _ in 0..total {
        out.push(GroupElement(cur.clone()));
        for i in (0..bounds.len()).rev() {
            cur[i] += 1;
            if cur[i] < bounds[i] {
                break;
            }
            cur[i] = 0;
        }
    }
    Ok(out)
}

/// `B⊥ = {χ ∈ Â : χ(b) = 1 for all b ∈ B}`, as a subgroup of the dual.
pub fn annihilator(a: &FiniteAbelianGroup, b: &Subgroup) -> Result<Subgroup> {
    if b.parent() != a {
        return Err(Error::ParentMismatch(format!("subgroup of {} used with {}", b.parent(), a)));
    }
    let n = a.exponent();
    let f: Vec<Vec<i64>> = b
        .generators()
        .iter()
        .map(|g| g.coords().iter().zip(a.factors()).map(|(x, d)| (n / d) * x).collect())
        .collect();
    let moduli = vec![n; f.len()];
    Ok(kernel_of_map(&a.dual(), &f, &moduli))
}

pub fn element_order(g: &FiniteAbelianGroup, x: &GroupElement) -> i64 {
    g.element_order(x)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::collections::BTreeSet;

    fn grp(f: &[i64]) -> FiniteAbelianGroup {
        FiniteAbelianGroup::new(f.to_vec()).unwrap()
    }

    fn element_set(s: &Subgroup) -> BTreeSet<GroupElement> {
        s.elements().into_iter().collect()
    }

    /// Subgroups as element sets, by closing under addition of every element.
    fn brute_force_subgroups(g: &FiniteAbelianGroup) -> BTreeSet<BTreeSet<GroupElement>> {
        let close = |gens: &[GroupElement]| {
            let mut set: BTreeSet<GroupElement> = [g.identity()].into_iter().collect();
            loop {
                let mut grew = false;
                for x in set.clone() {
                    for y in gens {
                        if set.insert(g.add(&x, y)) {
                            grew = true;
                        }
                    }
                }
                if !grew {
                    return set;
                }
            }
        };
        let mut found = BTreeSet::new();
        let mut queue = vec![close(&[])];
        found.insert(queue[0].clone());
        while let Some(h) = queue.pop() {
            for x in g.elements() {
                if !h.contains(&x) {
                    let mut gens: Vec<GroupElement> = h.iter().cloned().collect();
                    gens.push(x);
                    let bigger = close(&gens);
                    if found.insert(bigger.clone()) {
                        queue.push(bigger);
                    }
                }
            }
        }
        found
    }

    #[test]
    fn rejects_bad_chain() {
        assert!(FiniteAbelianGroup::new(vec![2, 4]).is_err());
        assert!(FiniteAbelianGroup::new(vec![0]).is_err());
        assert!(FiniteAbelianGroup::new(vec![4, 2]).is_ok());
    }

    #[test]
    fn normalize_examples() {
        assert_eq!(normalize_group(&[2, 4]).unwrap().group.factors(), &[4, 2]);
        let n = normalize_group(&[2, 3]).unwrap();
        assert_eq!(n.group.factors(), &[6]);
        // the witness is a bijection
        let images: BTreeSet<_> =
            (0..2).flat_map(|a| (0..3).map(move |b| (a, b))).map(|(a, b)| n.map(&[a, b])).collect();
        assert_eq!(images.len(), 6);
        assert_eq!(normalize_group(&[]).unwrap().group.order(), 1);
        assert!(normalize_group(&[0, 2]).is_err());
    }

    #[test]
    fn normalize_witness_is_homomorphic() {
        let n = normalize_group(&[4, 6, 9]).unwrap();
        assert_eq!(n.group.factors(), &[36, 6]);
        let x = [3, 5, 7];
        let y = [1, 4, 8];
        let sum: Vec<i64> = x.iter().zip(&y).map(|(a, b)| a + b).collect();
        assert_eq!(n.group.add(&n.map(&x), &n.map(&y)), n.map(&sum));
    }

    #[test]
    fn subgroup_counts() {
        assert_eq!(enumerate_subgroups(&grp(&[5]), 4096).unwrap().len(), 2);
        assert_eq!(enumerate_subgroups(&grp(&[2, 2]), 4096).unwrap().len(), 5);
        assert_eq!(enumerate_subgroups(&grp(&[4]), 4096).unwrap().len(), 3);
    }

    #[test]
    fn enumeration_matches_brute_force() {
        for f in [&[4, 2][..], &[2, 2, 2], &[6, 2], &[4, 4], &[8, 2], &[9, 3], &[12]] {
            let g = grp(f);
            let subs = enumerate_subgroups(&g, 4096).unwrap();
            let sets: BTreeSet<_> = subs.iter().map(element_set).collect();
            assert_eq!(sets.len(), subs.len(), "duplicates in {g}");
            assert_eq!(sets, brute_force_subgroups(&g), "mismatch in {g}");
            for s in &subs {
                assert_eq!(s.elements().len() as u64, s.order());
                assert_eq!(Subgroup::from_elements(&g, &s.generators()), *s);
            }
        }
    }

    #[test]
    fn limit_is_enforced() {
        let err = enumerate_subgroups(&grp(&[64, 64, 2]), 4096).unwrap_err();
        assert_eq!(err, Error::LimitExceeded { order: 8192, limit: 4096 });
    }

    #[test]
    fn transversal_examples() {
        let g = grp(&[2, 2]);
        let full = Subgroup::full(&g);
        assert_eq!(quotient_transversal(&g, &full).unwrap(), vec![g.identity()]);
        let triv = Subgroup::trivial(&g);
        assert_eq!(quotient_transversal(&g, &triv).unwrap(), g.elements().collect::<Vec<_>>());
        let m = Subgroup::from_generators(&g, &[vec![1, 0]]);
        assert_eq!(
            quotient_transversal(&g, &m).unwrap(),
            vec![GroupElement(vec![0, 0]), GroupElement(vec![0, 1])]
        );
        assert!(quotient_transversal(&grp(&[4]), &m).is_err());
    }

    #[test]
    fn transversal_partitions_group() {
        let g = grp(&[4, 2, 2]);
        for m in enumerate_subgroups(&g, 4096).unwrap() {
            let reps = quotient_transversal(&g, &m).unwrap();
            assert_eq!(reps.len() as u64, g.order() / m.order());
            assert_eq!(reps[0], g.identity());
            let mut covered = BTreeSet::new();
            for t in &reps {
                // lexicographically least in its coset
                let coset: Vec<_> = m.elements().iter().map(|x| g.add(t, x)).collect();
                assert_eq!(coset.iter().min().unwrap(), t);
                assert_eq!(m.coset_representative(&coset[coset.len() - 1]), *t);
                for x in coset {
                    assert!(covered.insert(x), "cosets overlap");
                }
            }
            assert_eq!(covered.len() as u64, g.order());
        }
    }

    #[test]
    fn annihilator_examples() {
        let a = grp(&[4]);
        let triv = Subgroup::trivial(&a);
        assert_eq!(annihilator(&a, &triv).unwrap(), Subgroup::full(&a));
        assert_eq!(annihilator(&a, &Subgroup::full(&a)).unwrap(), triv);
        let b = Subgroup::from_generators(&a, &[vec![2]]);
        let perp = annihilator(&a, &b).unwrap();
        assert_eq!(perp.order(), 2);
        assert_eq!(element_set(&perp), [GroupElement(vec![0]), GroupElement(vec![2])].into());
    }

    #[test]
    fn annihilator_order_and_double_annihilator() {
        for f in [&[4, 2][..], &[6, 6], &[8, 4], &[2, 2, 2, 2], &[16, 4, 2], &[6, 3]] {
            let g = grp(f);
            for b in enumerate_subgroups(&g, 4096).unwrap() {
                let perp = annihilator(&g, &b).unwrap();
                assert_eq!(b.order() * perp.order(), g.order());
                // direct check on all characters
                for c in perp.elements() {
                    let chi = Character { coords: c.0.clone() };
                    assert!(b.elements().iter().all(|x| chi.evaluate(&g, x) == 0));
                }
                assert_eq!(annihilator(&g, &perp).unwrap(), b);
            }
        }
    }

    #[test]
    fn element_order_examples() {
        let g = grp(&[4, 2]);
        assert_eq!(element_order(&g, &g.identity()), 1);
        assert_eq!(element_order(&g, &g.basis_element(0)), 4);
        assert_eq!(element_order(&g, &GroupElement(vec![2, 1])), 2);
    }

    #[test]
    fn hom_inverse_and_kernel() {
        let g = grp(&[6, 6]);
        let alpha = GroupHom::new(g.clone(), g.clone(), vec![vec![1, 5], vec![0, 1]]).unwrap();
        assert!(alpha.is_isomorphism());
        let inv = alpha.inverse().unwrap();
        assert_eq!(inv.compose(&alpha).unwrap(), GroupHom::identity(&g));
        let proj = GroupHom::new(g.clone(), grp(&[3]), vec![vec![1, 0]]).unwrap();
        assert_eq!(proj.kernel().order(), 12);
        assert!(GroupHom::new(grp(&[2]), grp(&[4]), vec![vec![1]]).is_err());
        assert!(GroupHom::new(grp(&[2]), grp(&[4]), vec![vec![2]]).is_ok());
    }
}
