//! Exact arithmetic in the cyclotomic field `Q(ζ_n)` and sparse exact
//! linear algebra over it.
//!
//! Elements are coefficient vectors in the basis `1, ζ, ..., ζ^{φ(n)-1}`
//! after reduction modulo the `n`-th cyclotomic polynomial, so equality is
//! coefficientwise and zero testing is exact.

use std::collections::{BTreeMap, HashMap};

use crate::scalar::ExactField;

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Cyclotomic<T> {
    coeffs: Vec<T>,
}

impl<T: ExactField> Cyclotomic<T> {
    pub fn coeffs(&self) -> &[T] {
        &self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|c| c.is_zero())
    }
}

/// The field `Q(ζ_n)` with its reduction data.
#[derive(Clone, Debug)]
pub struct CyclotomicField<T> {
    order: usize,
    /// Monic `Φ_n`, low degree first.
    modulus: Vec<T>,
    /// `ζ^k` reduced, for `k ∈ [0, n)`.
    powers: Vec<Cyclotomic<T>>,
}

fn trim<T: ExactField>(p: &mut Vec<T>) {
    while p.last().is_some_and(|c| c.is_zero()) {
        p.pop();
    }
}

fn poly_mul<T: ExactField>(a: &[T], b: &[T]) -> Vec<T> {
    if a.is_empty() || b.is_empty() {
        return Vec::new();
    }
    let mut out = vec![T::zero(); a.len() + b.len() - 1];
    for (i, x) in a.iter().enumerate() {
        if x.is_zero() {
            continue;
        }
        for (j, y) in b.iter().enumerate() {
            out[i + j] = out[i + j].clone() + x.clone() * y.clone();
        }
    }
    trim(&mut out);
    out
}

fn poly_sub<T: ExactField>(a: &[T], b: &[T]) -> Vec<T> {
    let n = a.len().max(b.len());
    let mut out: Vec<T> = (0..n)
        .map(|i| {
            let x = a.get(i).cloned().unwrap_or_else(T::zero);
            let y = b.get(i).cloned().unwrap_or_else(T::zero);
            x - y
        })
        .collect();
    trim(&mut out);
    out
}

/// Quotient and remainder; `b` must be nonzero after trimming.
fn poly_divrem<T: ExactField>(a: &[T], b: &[T]) -> (Vec<T>, Vec<T>) {
    let mut rem: Vec<T> = a.to_vec();
    trim(&mut rem);
    let mut b = b.to_vec();
    trim(&mut b);
    let lead = b.last().expect("division by the zero polynomial").clone();
    if rem.len() < b.len() {
        return (Vec::new(), rem);
    }
    let mut quot = vec![T::zero(); rem.len() - b.len() + 1];
    while rem.len() >= b.len() && !rem.is_empty() {
        let shift = rem.len() - b.len();
        let c = rem.last().unwrap().clone() / lead.clone();
        for (i, bi) in b.iter().enumerate() {
            rem[shift + i] = rem[shift + i].clone() - c.clone() * bi.clone();
        }
        quot[shift] = c;
        rem.pop();
        trim(&mut rem);
    }
    trim(&mut quot);
    (quot, rem)
}

/// `Φ_n` by exact division of `xⁿ - 1` by `Φ_d` for the proper divisors `d`.
pub fn cyclotomic_polynomial<T: ExactField>(n: usize) -> Vec<T> {
    assert!(n >= 1);
    let mut p = vec![T::zero(); n + 1];
    p[0] = -T::one();
    p[n] = T::one();
    for d in (1..n).filter(|d| n % d == 0) {
        let (q, r) = poly_divrem(&p, &cyclotomic_polynomial::<T>(d));
        debug_assert!(r.is_empty(), "inexact cyclotomic division");
        p = q;
    }
    p
}

impl<T: ExactField> CyclotomicField<T> {
    pub fn new(order: usize) -> Self {
        let modulus = cyclotomic_polynomial::<T>(order);
        let mut field = CyclotomicField { order, modulus, powers: Vec::new() };
        let powers = (0..order)
            .map(|k| {
                let mut mono = vec![T::zero(); k + 1];
                mono[k] = T::one();
                field.reduce(mono)
            })
            .collect();
        field.powers = powers;
        field
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn degree(&self) -> usize {
        self.modulus.len() - 1
    }

    fn reduce(&self, p: Vec<T>) -> Cyclotomic<T> {
        let (_, mut r) = poly_divrem(&p, &self.modulus);
        r.resize(self.degree(), T::zero());
        Cyclotomic { coeffs: r }
    }

    pub fn zero(&self) -> Cyclotomic<T> {
        Cyclotomic { coeffs: vec![T::zero(); self.degree()] }
    }

    pub fn one(&self) -> Cyclotomic<T> {
        self.powers[0].clone()
    }

    /// `ζ^k` for any integer `k`.
    pub fn root_power(&self, k: i64) -> Cyclotomic<T> {
        let n = self.order as i64;
        self.powers[k.rem_euclid(n) as usize].clone()
    }

    pub fn from_integer(&self, v: i64) -> Cyclotomic<T> {
        let mut c = self.zero();
        c.coeffs[0] = T::from_i64(v).expect("integer out of range for scalar");
        c
    }

    pub fn add(&self, a: &Cyclotomic<T>, b: &Cyclotomic<T>) -> Cyclotomic<T> {
        Cyclotomic { coeffs: a.coeffs.iter().zip(&b.coeffs).map(|(x, y)| x.clone() + y.clone()).collect() }
    }

    pub fn sub(&self, a: &Cyclotomic<T>, b: &Cyclotomic<T>) -> Cyclotomic<T> {
        Cyclotomic { coeffs: a.coeffs.iter().zip(&b.coeffs).map(|(x, y)| x.clone() - y.clone()).collect() }
    }

    pub fn neg(&self, a: &Cyclotomic<T>) -> Cyclotomic<T> {
        Cyclotomic { coeffs: a.coeffs.iter().map(|x| -x.clone()).collect() }
    }

    pub fn mul(&self, a: &Cyclotomic<T>, b: &Cyclotomic<T>) -> Cyclotomic<T> {
        self.reduce(poly_mul(&a.coeffs, &b.coeffs))
    }

    /// Multiplicative inverse via the extended Euclidean algorithm; `None` for zero.
    pub fn inv(&self, a: &Cyclotomic<T>) -> Option<Cyclotomic<T>> {
        let mut r0 = self.modulus.clone();
        let mut r1 = a.coeffs.clone();
        trim(&mut r1);
        if r1.is_empty() {
            return None;
        }
        let mut s0: Vec<T> = Vec::new();
        let mut s1: Vec<T> = vec![T::one()];
        while !r1.is_empty() {
            let (q, r) = poly_divrem(&r0, &r1);
            let s2 = poly_sub(&s0, &poly_mul(&q, &s1));
            r0 = std::mem::replace(&mut r1, r);
            s0 = std::mem::replace(&mut s1, s2);
        }
        // r0 is a nonzero constant since Φ_n is irreducible
        debug_assert_eq!(r0.len(), 1);
        let c = r0[0].clone();
        let scaled: Vec<T> = s0.into_iter().map(|x| x / c.clone()).collect();
        Some(self.reduce(scaled))
    }

    /// Sum of `ζ^{e}` over the given exponents.
    pub fn sum_of_roots(&self, exponents: impl IntoIterator<Item = i64>) -> Cyclotomic<T> {
        exponents.into_iter().fold(self.zero(), |acc, e| self.add(&acc, &self.root_power(e)))
    }
}

pub type SparseVector<T> = BTreeMap<usize, Cyclotomic<T>>;

/// Incremental row echelon form of a set of sparse vectors.
///
/// Pivot rows are normalized to 1 at their leading column, and a vector is
/// reduced against pivots in increasing column order.
#[derive(Clone, Debug)]
pub struct EchelonBasis<'f, T> {
    field: &'f CyclotomicField<T>,
    rows: Vec<SparseVector<T>>,
    pivots: HashMap<usize, usize>,
}

impl<'f, T: ExactField> EchelonBasis<'f, T> {
    pub fn new(field: &'f CyclotomicField<T>) -> Self {
        EchelonBasis { field, rows: Vec::new(), pivots: HashMap::new() }
    }

    pub fn rank(&self) -> usize {
        self.rows.len()
    }

    fn reduce(&self, mut v: SparseVector<T>) -> SparseVector<T> {
        v.retain(|_, c| !c.is_zero());
        let mut cursor = 0usize;
        loop {
            let next = v.range(cursor..).map(|(c, _)| *c).find(|c| self.pivots.contains_key(c));
            let Some(col) = next else { break };
            let coeff = v[&col].clone();
            let row = &self.rows[self.pivots[&col]];
            for (j, x) in row {
                let delta = self.field.mul(&coeff, x);
                let updated = match v.get(j) {
                    Some(cur) => self.field.sub(cur, &delta),
                    None => self.field.neg(&delta),
                };
                if updated.is_zero() {
                    v.remove(j);
                } else {
                    v.insert(*j, updated);
                }
            }
            cursor = col + 1;
        }
        v
    }

    /// Adds `v`; returns whether it was independent of the current span.
    pub fn insert(&mut self, v: SparseVector<T>) -> bool {
        let v = self.reduce(v);
        let Some((&lead, lead_coeff)) = v.iter().next() else { return false };
        let inv = self.field.inv(lead_coeff).expect("nonzero leading coefficient");
        let normalized: SparseVector<T> = v.iter().map(|(j, x)| (*j, self.field.mul(&inv, x))).collect();
        self.pivots.insert(lead, self.rows.len());
        self.rows.push(normalized);
        true
    }

    pub fn contains(&self, v: &SparseVector<T>) -> bool {
        self.reduce(v.clone()).is_empty()
    }
}

/// Rank of a family of sparse vectors.
pub fn rank<T: ExactField>(field: &CyclotomicField<T>, vectors: impl IntoIterator<Item = SparseVector<T>>) -> usize {
    let mut basis = EchelonBasis::new(field);
    for v in vectors {
        basis.insert(v);
    }
    basis.rank()
}
