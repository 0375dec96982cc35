//! Intertwiners between canonical representations on a common model.
//!
//! This is the one place approximate arithmetic appears: the averaged
//! operator is assembled in floating complex numbers. The dimension of the
//! intertwiner space is computed exactly.

use num_complex::Complex;
use num_rational::BigRational;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use serde::Serialize;

use crate::canonical_rep::{build_representation, CanonicalRep};
use crate::cyclotomic::{CyclotomicField, EchelonBasis};
use crate::error::{Error, Result};
use crate::heisenberg_model::Cocycle;
use crate::monomial::{intertwining_equations, MonomialMatrix};
use crate::scalar::RealScalar;

pub const DEFAULT_TOLERANCE: f64 = 1e-9;
pub const MAX_ATTEMPTS: usize = 8;
/// Terms per partial sum; fixed so the summation order does not depend on
/// the thread count.
const CHUNK: usize = 64;

pub type DenseMatrix<T> = Vec<Vec<Complex<T>>>;

#[derive(Clone, Debug)]
pub struct IntertwinerResult<T> {
    pub matrix: DenseMatrix<T>,
    /// Max-entry residual of `U·ρ₁(g) − ρ₂(g)·U` over the generators.
    pub residual: T,
    /// Exact dimension of `{T : T·ρ₁(g) = ρ₂(g)·T}`.
    pub solution_dimension: usize,
    pub attempts: usize,
}

fn check_compatible(r1: &CanonicalRep, r2: &CanonicalRep) -> Result<()> {
    if r1.model() != r2.model() {
        return Err(Error::IncompatibleReps("representations use different models".into()));
    }
    Ok(())
}

/// Exact dimension of the space of intertwiners `ρ₁ → ρ₂`.
pub fn intertwiner_space_dimension(r1: &CanonicalRep, r2: &CanonicalRep) -> Result<usize> {
    check_compatible(r1, r2)?;
    let d = r1.dim();
    let field = CyclotomicField::<BigRational>::new(r1.phase_order() as usize);
    let mut rows = EchelonBasis::new(&field);
    let k = r1.model().group();
    for i in 0..k.rank() {
        let g = k.basis_element(i);
        for row in intertwining_equations(&field, r1.rho_section(&g), r2.rho_section(&g)) {
            rows.insert(row);
        }
    }
    Ok(d * d - rows.rank())
}

fn roots<T: RealScalar>(order: i64) -> Vec<Complex<T>> {
    let tau = T::from_f64(std::f64::consts::TAU).expect("representable");
    let n = T::from_i64(order).expect("representable");
    (0..order).map(|p| Complex::from_polar(T::one(), tau * T::from_i64(p).expect("representable") / n)).collect()
}

/// `A·X` for monomial `A`.
fn left_apply<T: RealScalar>(a: &MonomialMatrix, x: &DenseMatrix<T>, zeta: &[Complex<T>]) -> DenseMatrix<T> {
    let d = a.dim;
    let mut out = vec![vec![Complex::new(T::zero(), T::zero()); d]; d];
    for j in 0..d {
        let w = zeta[a.phase[j] as usize];
        for c in 0..d {
            out[a.perm[j]][c] = w * x[j][c];
        }
    }
    out
}

/// `X·A` for monomial `A`.
fn right_apply<T: RealScalar>(x: &DenseMatrix<T>, a: &MonomialMatrix, zeta: &[Complex<T>]) -> DenseMatrix<T> {
    let d = a.dim;
    let mut out = vec![vec![Complex::new(T::zero(), T::zero()); d]; d];
    for c in 0..d {
        let w = zeta[a.phase[c] as usize];
        for r in 0..d {
            out[r][c] = x[r][a.perm[c]] * w;
        }
    }
    out
}

fn add_into<T: RealScalar>(acc: &mut DenseMatrix<T>, x: &DenseMatrix<T>) {
    for (ra, rx) in acc.iter_mut().zip(x) {
        for (a, v) in ra.iter_mut().zip(rx) {
            *a = *a + *v;
        }
    }
}

fn zeros<T: RealScalar>(d: usize) -> DenseMatrix<T> {
    vec![vec![Complex::new(T::zero(), T::zero()); d]; d]
}

/// `(1/|K|)·Σ_k ρ₂(s(k))·X·ρ₁(s(k))⁻¹`; the central factors cancel, so this
/// equals the average over all of `G_N`.
pub fn average<T: RealScalar>(r1: &CanonicalRep, r2: &CanonicalRep, x: &DenseMatrix<T>) -> DenseMatrix<T> {
    let zeta = roots::<T>(r1.phase_order());
    let d = r1.dim();
    let t1 = r1.section_table();
    let t2 = r2.section_table();
    let partials: Vec<DenseMatrix<T>> = (0..t1.len())
        .collect::<Vec<_>>()
        .par_chunks(CHUNK)
        .map(|chunk| {
            let mut acc = zeros::<T>(d);
            for &i in chunk {
                let y = left_apply(&t2[i], &right_apply(x, &t1[i].inverse(), &zeta), &zeta);
                add_into(&mut acc, &y);
            }
            acc
        })
        .collect();
    let mut total = zeros::<T>(d);
    for p in &partials {
        add_into(&mut total, p);
    }
    let scale = T::from_usize(t1.len()).expect("representable");
    for row in &mut total {
        for v in row.iter_mut() {
            *v = *v / scale;
        }
    }
    total
}

fn frobenius_sq<T: RealScalar>(x: &DenseMatrix<T>) -> T {
    x.iter().flatten().fold(T::zero(), |acc, v| acc + v.norm_sqr())
}

/// Max-entry residual of `U·ρ₁(g) − ρ₂(g)·U` over the generators of `K`.
pub fn residual<T: RealScalar>(r1: &CanonicalRep, r2: &CanonicalRep, u: &DenseMatrix<T>) -> T {
    let zeta = roots::<T>(r1.phase_order());
    let k = r1.model().group();
    let mut worst = T::zero();
    for i in 0..k.rank() {
        let g = k.basis_element(i);
        let lhs = right_apply(u, r1.rho_section(&g), &zeta);
        let rhs = left_apply(r2.rho_section(&g), u, &zeta);
        for (a, b) in lhs.iter().flatten().zip(rhs.iter().flatten()) {
            worst = worst.max((*a - *b).norm());
        }
    }
    worst
}

/// A unitary `U` with `U·ρ₁(g) = ρ₂(g)·U`, normalized so its first entry of
/// non-negligible size is positive real.
pub fn intertwiner<T: RealScalar>(r1: &CanonicalRep, r2: &CanonicalRep, tol: T, seed: u64) -> Result<IntertwinerResult<T>> {
    let solution_dimension = intertwiner_space_dimension(r1, r2)?;
    if solution_dimension != 1 {
        return Err(Error::SolutionSpaceNotOneDimensional(solution_dimension));
    }
    let d = r1.dim();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for attempt in 1..=MAX_ATTEMPTS {
        let x: DenseMatrix<T> = (0..d)
            .map(|_| {
                (0..d)
                    .map(|_| {
                        let re = T::from_f64(rng.gen_range(-1.0..1.0)).expect("representable");
                        let im = T::from_f64(rng.gen_range(-1.0..1.0)).expect("representable");
                        Complex::new(re, im)
                    })
                    .collect()
            })
            .collect();
        let p = average(r1, r2, &x);
        let norm_sq = frobenius_sq(&p);
        if norm_sq <= tol * tol {
            continue;
        }
        // Schur: P·P† is a positive multiple of I
        let scale = (norm_sq / T::from_usize(d).expect("representable")).sqrt();
        let biggest = p.iter().flatten().fold(T::zero(), |m, v| m.max(v.norm()));
        let cutoff = biggest * T::from_f64(1e-6).expect("representable");
        let lead = *p.iter().flatten().find(|v| v.norm() > cutoff).expect("nonzero matrix");
        let rotate = lead.conj() / lead.norm();
        let u: DenseMatrix<T> = p.iter().map(|row| row.iter().map(|v| *v * rotate / scale).collect()).collect();
        let residual = residual(r1, r2, &u);
        return Ok(IntertwinerResult { matrix: u, residual, solution_dimension, attempts: attempt });
    }
    Err(Error::ZeroProjection { attempts: MAX_ATTEMPTS })
}

/// `max |(U·U†)_{ij} − δ_ij|`.
pub fn unitarity_defect<T: RealScalar>(u: &DenseMatrix<T>) -> T {
    let d = u.len();
    let mut worst = T::zero();
    for i in 0..d {
        for j in 0..d {
            let s = (0..d).fold(Complex::new(T::zero(), T::zero()), |acc, k| acc + u[i][k] * u[j][k].conj());
            let target = if i == j { T::one() } else { T::zero() };
            worst = worst.max((s - Complex::new(target, T::zero())).norm());
        }
    }
    worst
}

#[derive(Clone, Debug, Serialize)]
pub struct PairCheck {
    pub from: String,
    pub to: String,
    pub twisted: bool,
    pub solution_dimension: usize,
    pub residual: f64,
    pub unitarity_defect: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct UniquenessReport {
    pub group: String,
    pub lagrangians: usize,
    pub pairs: Vec<PairCheck>,
    pub max_residual: f64,
    pub pass: bool,
}

/// Intertwiners between every pair of canonical representations on the
/// Lagrangians of `c`, plus each one against a twist of its own character.
pub fn uniqueness_report(c: &Cocycle, limit: u64, tol: f64, seed: u64) -> Result<UniquenessReport> {
    let e = c.commutator_form();
    let reps: Vec<CanonicalRep> = e
        .lagrangians(limit)?
        .iter()
        .map(|m| build_representation(c, m, &c.lift_isotropic_character(m)?))
        .collect::<Result<_>>()?;
    let check = |r1: &CanonicalRep, r2: &CanonicalRep, twisted: bool| -> Result<PairCheck> {
        let dim = intertwiner_space_dimension(r1, r2)?;
        let (residual, defect) = if dim == 1 {
            let out = intertwiner::<f64>(r1, r2, tol, seed)?;
            (out.residual, unitarity_defect(&out.matrix))
        } else {
            (f64::INFINITY, f64::INFINITY)
        };
        Ok(PairCheck {
            from: r1.subgroup().to_string(),
            to: r2.subgroup().to_string(),
            twisted,
            solution_dimension: dim,
            residual,
            unitarity_defect: defect,
        })
    };
    let mut pairs = Vec::new();
    for r1 in &reps {
        for r2 in &reps {
            pairs.push(check(r1, r2, false)?);
        }
        if let Some(k) = c.group().elements().find(|k| !r1.subgroup().contains(k)) {
            let twisted = r1.character().twisted_by(&e, &k);
            pairs.push(check(r1, &build_representation(c, r1.subgroup(), &twisted)?, true)?);
        }
    }
    let max_residual = pairs.iter().fold(0.0, |m: f64, p| m.max(p.residual));
    let pass = !pairs.is_empty() && pairs.iter().all(|p| p.solution_dimension == 1 && p.residual <= tol && p.unitarity_defect <= tol);
    Ok(UniquenessReport { group: c.group().to_string(), lagrangians: reps.len(), pairs, max_residual, pass })
}
