//! Classification of nondegenerate alternating bicharacters.
//!
//! Every nondegenerate `e` on `K` is carried to the standard form on `A × Â`
//! by an isomorphism `φ`. The reduction runs one prime at a time; on a
//! `p`-group a unit pivot always exists, which is not true for composite
//! exponents. The per-prime answers are glued back together by CRT.

use std::fmt;

use num_integer::Integer;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::abelian::{FiniteAbelianGroup, GroupElement, GroupHom};
use crate::bicharacter::Bicharacter;
use crate::error::{Error, Result};

/// Elementary automorphisms acting on the ordered generators `b_0, b_1, ...`
/// of `K` (indices are 0-based).
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum ReductionOp {
    /// `b_i ← σ·b_i` with `σ` a unit mod `d_i`.
    Beta { i: usize, sigma: i64 },
    /// `b_i ↔ b_j` with `d_i = d_j`.
    Pi { i: usize, j: usize },
    /// `b_j ← b_j + σ·b_i` with `d_i / gcd(d_i, d_j) | σ`.
    Alpha { i: usize, j: usize, sigma: i64 },
}

impl ReductionOp {
    pub fn validate(&self, group: &FiniteAbelianGroup) -> Result<()> {
        let d = group.factors();
        let check = |k: usize| {
            if k < d.len() {
                Ok(())
            } else {
                Err(Error::InvalidOp(format!("index {k} out of range for {group}")))
            }
        };
        match *self {
            ReductionOp::Beta { i, sigma } => {
                check(i)?;
                if sigma.gcd(&d[i]) != 1 {
                    return Err(Error::InvalidOp(format!("beta: gcd({sigma}, {}) != 1", d[i])));
                }
            }
            ReductionOp::Pi { i, j } => {
                check(i)?;
                check(j)?;
                if d[i] != d[j] {
                    return Err(Error::InvalidOp(format!("pi: orders {} and {} differ", d[i], d[j])));
                }
            }
            ReductionOp::Alpha { i, j, sigma } => {
                check(i)?;
                check(j)?;
                if i == j {
                    return Err(Error::InvalidOp("alpha: indices must differ".into()));
                }
                let step = d[i] / d[i].gcd(&d[j]);
                if sigma % step != 0 {
                    return Err(Error::InvalidOp(format!("alpha: {step} does not divide {sigma}")));
                }
            }
        }
        Ok(())
    }

    /// Right multiplication of the column matrix `B` by the op's matrix.
    fn apply_to_columns(&self, group: &FiniteAbelianGroup, cols: &mut [Vec<i64>]) {
        match *self {
            ReductionOp::Beta { i, sigma } => {
                cols[i] = group.scale(sigma, &GroupElement(cols[i].clone())).0;
            }
            ReductionOp::Pi { i, j } => cols.swap(i, j),
            ReductionOp::Alpha { i, j, sigma } => {
                let shifted = group.scale(sigma, &GroupElement(cols[i].clone()));
                cols[j] = group.add(&GroupElement(cols[j].clone()), &shifted).0;
            }
        }
    }

    /// The automorphism `α` with `Q(e') = αᵀ·Q(e)·α`.
    pub fn automorphism(&self, group: &FiniteAbelianGroup) -> Result<GroupHom> {
        self.validate(group)?;
        let mut cols = identity_columns(group);
        self.apply_to_columns(group, &mut cols);
        hom_from_columns(group, group, &cols)
    }
}

/// A reduction step tagged with the prime whose primary part it acts on.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct LoggedOp {
    pub prime: i64,
    #[serde(flatten)]
    pub op: ReductionOp,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct HeisenbergType {
    /// The group `A`.
    pub a: FiniteAbelianGroup,
    /// `φ: A × Â → K`, with the generators of `A × Â` ordered `x_1, χ_1, x_2, χ_2, ...`.
    pub phi: GroupHom,
    pub op_log: Vec<LoggedOp>,
}

impl HeisenbergType {
    /// `A × Â` presented as itself.
    pub fn identity(a: &FiniteAbelianGroup) -> Self {
        HeisenbergType { a: a.clone(), phi: GroupHom::identity(&a.with_dual()), op_log: Vec::new() }
    }
}

/// The standard form `e((x,χ),(x',χ')) = χ'(x)·χ(x')⁻¹` on `A × Â`.
pub fn standard_form(a: &FiniteAbelianGroup) -> Bicharacter {
    let k = a.with_dual();
    Bicharacter::new(k, standard_matrix(a)).expect("standard form is alternating")
}

fn standard_matrix(a: &FiniteAbelianGroup) -> Vec<Vec<i64>> {
    let n = a.exponent();
    let r = 2 * a.rank();
    let mut q = vec![vec![0; r]; r];
    for (i, &d) in a.factors().iter().enumerate() {
        q[2 * i][2 * i + 1] = n / d;
        q[2 * i + 1][2 * i] = (n - n / d) % n;
    }
    q
}

/// `e'(k, l) = e(α(k), α(l))`.
pub fn apply_automorphism(e: &Bicharacter, alpha: &GroupHom) -> Result<Bicharacter> {
    let g = e.group();
    if alpha.source() != g || alpha.target() != g {
        return Err(Error::NotAutomorphism(format!("map is not an endomorphism of {g}")));
    }
    if !alpha.is_isomorphism() {
        return Err(Error::NotAutomorphism("map is not invertible".into()));
    }
    let images: Vec<GroupElement> = (0..g.rank()).map(|j| alpha.apply(&g.basis_element(j))).collect();
    Ok(Bicharacter::new(g.clone(), gram(e, &images)).expect("congruent form stays alternating"))
}

fn gram(e: &Bicharacter, cols: &[GroupElement]) -> Vec<Vec<i64>> {
    cols.iter().map(|a| cols.iter().map(|b| e.evaluate(a, b)).collect()).collect()
}

fn identity_columns(group: &FiniteAbelianGroup) -> Vec<Vec<i64>> {
    (0..group.rank()).map(|j| group.basis_element(j).0).collect()
}

fn hom_from_columns(source: &FiniteAbelianGroup, target: &FiniteAbelianGroup, cols: &[Vec<i64>]) -> Result<GroupHom> {
    let matrix = (0..target.rank()).map(|i| cols.iter().map(|c| c[i]).collect()).collect();
    GroupHom::new(source.clone(), target.clone(), matrix)
}

/// Prime factors in increasing order.
pub fn prime_factors(mut n: i64) -> Vec<i64> {
    let mut out = Vec::new();
    let mut p = 2;
    while p * p <= n {
        if n % p == 0 {
            out.push(p);
            while n % p == 0 {
                n /= p;
            }
        }
        p += 1;
    }
    if n > 1 {
        out.push(n);
    }
    out
}

fn p_part(mut n: i64, p: i64) -> i64 {
    let mut out = 1;
    while n % p == 0 {
        n /= p;
        out *= p;
    }
    out
}

#[derive(Clone, Debug)]
pub struct PrimaryPart {
    pub prime: i64,
    pub form: Bicharacter,
    /// `K_p → K`, onto the `p`-primary component.
    pub embedding: GroupHom,
}

/// Splits `K` into its primary components and restricts `e` to each.
pub fn primary_decompose(e: &Bicharacter) -> Vec<PrimaryPart> {
    let g = e.group();
    let n = e.root_order();
    prime_factors(g.exponent())
        .into_iter()
        .map(|p| {
            let coords: Vec<usize> = (0..g.rank()).filter(|&i| g.factors()[i] % p == 0).collect();
            let orders: Vec<i64> = coords.iter().map(|&i| p_part(g.factors()[i], p)).collect();
            let kp = FiniteAbelianGroup::new(orders.clone()).expect("p-parts of invariant factors stay ordered");
            let cols: Vec<Vec<i64>> = coords
                .iter()
                .zip(&orders)
                .map(|(&i, &o)| {
                    let mut v = vec![0; g.rank()];
                    v[i] = g.factors()[i] / o;
                    v
                })
                .collect();
            let embedding = hom_from_columns(&kp, g, &cols).expect("scaled inclusion is well defined");
            let images: Vec<GroupElement> = cols.into_iter().map(GroupElement).collect();
            let np = kp.exponent();
            let q = gram(e, &images).into_iter().map(|row| row.into_iter().map(|v| v / (n / np)).collect()).collect();
            let form = Bicharacter::new(kp, q).expect("restriction of an alternating form");
            PrimaryPart { prime: p, form, embedding }
        })
        .collect()
}

fn require_nondegenerate(e: &Bicharacter) -> Result<()> {
    let rad = e.radical();
    if rad.order() != 1 {
        return Err(Error::Degenerate { radical_order: rad.order() });
    }
    Ok(())
}

/// Reduction to standard block form on a `p`-group.
pub fn darboux_reduce(e: &Bicharacter) -> Result<HeisenbergType> {
    let g = e.group();
    let primes = prime_factors(g.exponent());
    if primes.len() > 1 {
        return Err(Error::InvalidGroup(format!("{g} is not a p-group")));
    }
    require_nondegenerate(e)?;
    let Some(&p) = primes.first() else {
        return Ok(HeisenbergType::identity(&FiniteAbelianGroup::trivial()));
    };
    let d = g.factors();
    let n = e.root_order();
    let rank = g.rank();
    let mut cols = identity_columns(g);
    let mut ops = Vec::new();
    let mut pairs = Vec::new();
    let q = |cols: &[Vec<i64>], i: usize, j: usize| {
        e.evaluate(&GroupElement(cols[i].clone()), &GroupElement(cols[j].clone()))
    };
    let mut r = 0;
    while r < rank {
        let unit = n / d[r];
        let pivot = (r + 1..rank).find(|&j| (q(&cols, r, j) / unit) % p != 0).ok_or_else(|| {
            Error::InvariantViolation(format!("no unit pivot in row {r} over the {p}-group {g}"))
        })?;
        if d[pivot] != d[r] {
            return Err(Error::InvariantViolation(format!("pivot order {} differs from {}", d[pivot], d[r])));
        }
        let mut step = |op: ReductionOp, cols: &mut Vec<Vec<i64>>| -> Result<()> {
            op.validate(g).map_err(|err| Error::InvariantViolation(err.to_string()))?;
            op.apply_to_columns(g, cols);
            ops.push(LoggedOp { prime: p, op });
            Ok(())
        };
        if pivot != r + 1 {
            step(ReductionOp::Pi { i: r + 1, j: pivot }, &mut cols)?;
        }
        let u = q(&cols, r, r + 1) / unit;
        let inv = modular_inverse(u, d[r]).expect("pivot is a unit");
        if inv != 1 {
            step(ReductionOp::Beta { i: r + 1, sigma: inv }, &mut cols)?;
        }
        for k in r + 2..rank {
            let a = q(&cols, r, k);
            if a != 0 {
                step(ReductionOp::Alpha { i: r + 1, j: k, sigma: -(a / unit) }, &mut cols)?;
            }
            let b = q(&cols, r + 1, k);
            if b != 0 {
                step(ReductionOp::Alpha { i: r, j: k, sigma: b / unit }, &mut cols)?;
            }
        }
        pairs.push(d[r]);
        r += 2;
    }
    let a = FiniteAbelianGroup::new(pairs)?;
    let phi = hom_from_columns(&a.with_dual(), g, &cols)?;
    Ok(HeisenbergType { a, phi, op_log: ops })
}

fn modular_inverse(a: i64, m: i64) -> Option<i64> {
    let ext = a.mod_floor(&m).extended_gcd(&m);
    (ext.gcd == 1).then(|| ext.x.mod_floor(&m))
}

/// Full classification: per-prime reduction and CRT recombination.
pub fn classify(e: &Bicharacter) -> Result<HeisenbergType> {
    require_nondegenerate(e)?;
    let k = e.group();
    let parts = primary_decompose(e);
    let reduced: Vec<HeisenbergType> = parts.iter().map(|part| darboux_reduce(&part.form)).collect::<Result<_>>()?;
    let rank = reduced.iter().map(|t| t.a.rank()).max().unwrap_or(0);
    let factor = |t: &HeisenbergType, i: usize| t.a.factors().get(i).copied().unwrap_or(1);
    let a_factors: Vec<i64> = (0..rank).map(|i| reduced.iter().map(|t| factor(t, i)).product()).collect();
    let a = FiniteAbelianGroup::new(a_factors.clone())?;
    let mut cols = Vec::with_capacity(2 * rank);
    for (i, &ai) in a_factors.iter().enumerate() {
        let mut x = k.identity();
        let mut chi = k.identity();
        for (part, t) in parts.iter().zip(&reduced) {
            let api = factor(t, i);
            if api == 1 {
                continue;
            }
            let kp = t.a.with_dual();
            let image = |j: usize| part.embedding.apply(&t.phi.apply(&kp.basis_element(j)));
            let c = modular_inverse(ai / api, api).expect("coprime cofactor");
            x = k.add(&x, &image(2 * i));
            chi = k.add(&chi, &k.scale(c, &image(2 * i + 1)));
        }
        cols.push(x.0);
        cols.push(chi.0);
    }
    let phi = hom_from_columns(&a.with_dual(), k, &cols)?;
    let op_log = reduced.into_iter().flat_map(|t| t.op_log).collect();
    Ok(HeisenbergType { a, phi, op_log })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case", tag = "failure")]
pub enum Counterexample {
    WrongShape { reason: String },
    NotIsomorphism,
    Pair { i: usize, j: usize, expected: i64, found: i64 },
}

impl fmt::Display for Counterexample {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Counterexample::WrongShape { reason } => write!(f, "{reason}"),
            Counterexample::NotIsomorphism => write!(f, "phi is not an isomorphism"),
            Counterexample::Pair { i, j, expected, found } => {
                write!(f, "generators {i},{j}: expected exponent {expected}, found {found}")
            }
        }
    }
}

/// Checks that `φ` is an isomorphism carrying the standard form to `e`,
/// on all generator pairs of `A × Â`.
pub fn verify_classification(e: &Bicharacter, t: &HeisenbergType) -> std::result::Result<(), Counterexample> {
    let src = t.a.with_dual();
    if t.phi.source() != &src || t.phi.target() != e.group() {
        return Err(Counterexample::WrongShape {
            reason: format!("phi must map {} to {}", src, e.group()),
        });
    }
    if !t.phi.is_isomorphism() {
        return Err(Counterexample::NotIsomorphism);
    }
    let images: Vec<GroupElement> = (0..src.rank()).map(|j| t.phi.apply(&src.basis_element(j))).collect();
    let std = standard_matrix(&t.a);
    for i in 0..images.len() {
        for j in 0..images.len() {
            let found = e.evaluate(&images[i], &images[j]);
            if found != std[i][j] {
                return Err(Counterexample::Pair { i, j, expected: std[i][j], found });
            }
        }
    }
    Ok(())
}

/// Replays a logged reduction on the primary parts of `e`; each part must end
/// in standard block form.
pub fn replay_ops(e: &Bicharacter, ops: &[LoggedOp]) -> Result<()> {
    for part in primary_decompose(e) {
        let g = part.form.group();
        let mut cols = identity_columns(g);
        for logged in ops.iter().filter(|o| o.prime == part.prime) {
            logged.op.validate(g)?;
            logged.op.apply_to_columns(g, &mut cols);
        }
        let images: Vec<GroupElement> = cols.into_iter().map(GroupElement).collect();
        let q = gram(&part.form, &images);
        let n = part.form.root_order();
        let d = g.factors();
        for (i, row) in q.iter().enumerate() {
            for (j, &v) in row.iter().enumerate() {
                let expected = match (i / 2 == j / 2, i % 2, j % 2) {
                    (true, 0, 1) => n / d[i],
                    (true, 1, 0) => (n - n / d[i]) % n,
                    _ => 0,
                };
                if v != expected {
                    return Err(Error::InvariantViolation(format!(
                        "replayed {}-part not standard at ({i},{j})",
                        part.prime
                    )));
                }
            }
        }
    }
    Ok(())
}

/// A random automorphism built from `steps` elementary operations.
pub fn random_automorphism(group: &FiniteAbelianGroup, rng: &mut impl Rng, steps: usize) -> GroupHom {
    let d = group.factors();
    let r = group.rank();
    let mut cols = identity_columns(group);
    if r > 0 {
        for _ in 0..steps {
            let i = rng.gen_range(0..r);
            let j = rng.gen_range(0..r);
            let op = match rng.gen_range(0..3) {
                0 => {
                    let sigma = loop {
                        let s = rng.gen_range(1..=d[i]);
                        if s.gcd(&d[i]) == 1 {
                            break s;
                        }
                    };
                    ReductionOp::Beta { i, sigma }
                }
                1 if d[i] == d[j] => ReductionOp::Pi { i, j },
                _ if i != j => {
                    let step = d[i] / d[i].gcd(&d[j]);
                    ReductionOp::Alpha { i, j, sigma: step * rng.gen_range(0..d[i]) }
                }
                _ => continue,
            };
            op.apply_to_columns(group, &mut cols);
        }
    }
    hom_from_columns(group, group, &cols).expect("product of elementary automorphisms")
}

/// The standard form on `A × Â` scrambled by a seeded random automorphism.
pub fn random_nondegenerate(a: &FiniteAbelianGroup, seed: u64) -> Bicharacter {
    let e = standard_form(a);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let alpha = random_automorphism(e.group(), &mut rng, 4 * e.group().rank() + 4);
    apply_automorphism(&e, &alpha).expect("elementary products are invertible")
}

/// A uniformly random alternating form on `group` (usually degenerate when
/// the order is not a square).
pub fn random_alternating(group: &FiniteAbelianGroup, seed: u64) -> Bicharacter {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n = group.exponent();
    let d = group.factors();
    let r = group.rank();
    let mut q = vec![vec![0; r]; r];
    for i in 0..r {
        for j in i + 1..r {
            let step = n / d[i].gcd(&d[j]);
            let v = step * rng.gen_range(0..n / step);
            q[i][j] = v;
            q[j][i] = (n - v) % n;
        }
    }
    Bicharacter::new(group.clone(), q).expect("sampled within the value-order constraint")
}
