//! Finite models `G_N = μ_N × K` of Heisenberg extensions.
//!
//! The cocycle is bilinear, `c(k, l) = kᵀ·C·l mod N`, so its commutator
//! `c(k,l) − c(l,k)` is the bicharacter `e`. Characters of `π⁻¹(M)` can take
//! values of order `2N` when `N` is even, so their exponents live mod the
//! phase order `L` (`N` for odd `N`, `2N` otherwise).

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::ToPrimitive;
use serde::Serialize;

use crate::abelian::{FiniteAbelianGroup, GroupElement, Subgroup};
use crate::bicharacter::Bicharacter;
use crate::darboux::HeisenbergType;
use crate::error::{Error, Result};
use crate::snf::{integer_kernel, solve_integer_system, Matrix};

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct HeisenbergElement {
    pub z: i64,
    pub k: GroupElement,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Cocycle {
    group: FiniteAbelianGroup,
    root_order: i64,
    c: Vec<Vec<i64>>,
}

pub fn phase_order(n: i64) -> i64 {
    if n % 2 == 0 {
        2 * n
    } else {
        n
    }
}

impl Cocycle {
    /// Checks that `C` defines a bilinear map `K × K → Z/N`.
    pub fn from_matrix(group: FiniteAbelianGroup, c: Vec<Vec<i64>>) -> Result<Self> {
        let n = group.exponent();
        let r = group.rank();
        if c.len() != r || c.iter().any(|row| row.len() != r) {
            return Err(Error::InvalidBicharacter(format!("cocycle must be a {r}x{r} matrix")));
        }
        let d = group.factors();
        let mut reduced = c;
        for i in 0..r {
            for j in 0..r {
                let v = reduced[i][j].mod_floor(&n);
                let step = n / d[i].gcd(&d[j]);
                if v % step != 0 {
                    return Err(Error::InvalidBicharacter(format!(
                        "cocycle entry ({i},{j}) must be divisible by {step}"
                    )));
                }
                reduced[i][j] = v;
            }
        }
        Ok(Cocycle { group, root_order: n, c: reduced })
    }

    /// `c((x,χ),(x',χ')) = χ'(x)` on `A × Â`.
    pub fn standard(a: &FiniteAbelianGroup) -> Self {
        let k = a.with_dual();
        let n = a.exponent();
        let r = k.rank();
        let mut c = vec![vec![0; r]; r];
        for (i, &d) in a.factors().iter().enumerate() {
            c[2 * i][2 * i + 1] = n / d;
        }
        Cocycle { group: k, root_order: n, c }
    }

    /// The standard cocycle transported to `K` along `φ`.
    pub fn standard_model(t: &HeisenbergType) -> Result<Self> {
        let std = Cocycle::standard(&t.a);
        let psi = t.phi.inverse()?;
        let k = t.phi.target().clone();
        let images: Vec<GroupElement> = (0..k.rank()).map(|j| psi.apply(&k.basis_element(j))).collect();
        let c = images.iter().map(|a| images.iter().map(|b| std.evaluate(a, b)).collect()).collect();
        Cocycle::from_matrix(k, c)
    }

    pub fn group(&self) -> &FiniteAbelianGroup {
        &self.group
    }

    pub fn root_order(&self) -> i64 {
        self.root_order
    }

    pub fn phase_order(&self) -> i64 {
        phase_order(self.root_order)
    }

    pub fn matrix(&self) -> &[Vec<i64>] {
        &self.c
    }

    pub fn evaluate(&self, k: &GroupElement, l: &GroupElement) -> i64 {
        let mut acc: i128 = 0;
        for (i, &ki) in k.coords().iter().enumerate() {
            if ki != 0 {
                let row: i128 = self.c[i].iter().zip(l.coords()).map(|(a, b)| *a as i128 * *b as i128).sum();
                acc += ki as i128 * row;
            }
        }
        acc.mod_floor(&(self.root_order as i128)) as i64
    }

    /// `e(k, l) = c(k, l) − c(l, k)`.
    pub fn commutator_form(&self) -> Bicharacter {
        let r = self.group.rank();
        let n = self.root_order;
        let q = (0..r).map(|i| (0..r).map(|j| (self.c[i][j] - self.c[j][i]).mod_floor(&n)).collect()).collect();
        Bicharacter::new(self.group.clone(), q).expect("commutator of a bilinear cocycle is alternating")
    }

    pub fn identity(&self) -> HeisenbergElement {
        HeisenbergElement { z: 0, k: self.group.identity() }
    }

    /// The section `s(k) = (0, k)`.
    pub fn section(&self, k: &GroupElement) -> HeisenbergElement {
        HeisenbergElement { z: 0, k: k.clone() }
    }

    pub fn central(&self, z: i64) -> HeisenbergElement {
        HeisenbergElement { z: z.mod_floor(&self.root_order), k: self.group.identity() }
    }

    pub fn multiply(&self, g: &HeisenbergElement, h: &HeisenbergElement) -> HeisenbergElement {
        let z = (g.z + h.z + self.evaluate(&g.k, &h.k)).mod_floor(&self.root_order);
        HeisenbergElement { z, k: self.group.add(&g.k, &h.k) }
    }

    pub fn inverse(&self, g: &HeisenbergElement) -> HeisenbergElement {
        let z = (self.evaluate(&g.k, &g.k) - g.z).mod_floor(&self.root_order);
        HeisenbergElement { z, k: self.group.neg(&g.k) }
    }

    /// `g·h·g⁻¹·h⁻¹`.
    pub fn commutator(&self, g: &HeisenbergElement, h: &HeisenbergElement) -> HeisenbergElement {
        let gh = self.multiply(g, h);
        let ghg = self.multiply(&gh, &self.inverse(g));
        self.multiply(&ghg, &self.inverse(h))
    }

    /// All elements `(z, k)` with `z` outermost.
    pub fn elements(&self) -> Vec<HeisenbergElement> {
        let ks: Vec<GroupElement> = self.group.elements().collect();
        (0..self.root_order)
            .flat_map(|z| ks.iter().map(move |k| HeisenbergElement { z, k: k.clone() }))
            .collect()
    }

    pub fn center(&self) -> Center {
        Center { root_order: self.root_order, radical: self.commutator_form().radical() }
    }

    /// An extension of the identity character of the center to `π⁻¹(M)`.
    pub fn lift_isotropic_character(&self, m: &Subgroup) -> Result<ExtendedCharacter> {
        if m.parent() != &self.group {
            return Err(Error::ParentMismatch(format!("subgroup of {} used with {}", m.parent(), self.group)));
        }
        if !self.commutator_form().is_isotropic(m) {
            return Err(Error::NotIsotropic(m.to_string()));
        }
        let lambda = self.solve_extension(m)?;
        Ok(ExtendedCharacter {
            domain: m.clone(),
            root_order: self.root_order,
            phase_order: self.phase_order(),
            lambda_gens: lambda,
            gamma: self.gamma_table(m),
        })
    }

    fn gamma_table(&self, m: &Subgroup) -> Vec<Vec<i64>> {
        let gens = basis_elements(m);
        gens.iter().map(|a| gens.iter().map(|b| self.evaluate(a, b)).collect()).collect()
    }

    /// Solves `Σ a_i λ_i ≡ (L/N)·Γ(a) (mod L)` over generators `a` of the
    /// relation lattice of the basis rows of `m`.
    fn solve_extension(&self, m: &Subgroup) -> Result<Vec<i64>> {
        let n = self.root_order;
        let l = self.phase_order();
        let gamma = self.gamma_table(m);
        let r = gamma.len();
        if gamma.iter().flatten().all(|&v| v == 0) {
            return Ok(vec![0; r]);
        }
        let gens = basis_elements(m);
        let d = self.group.factors();
        let mut block = Matrix::<BigInt>::zeros(r, 2 * r);
        for row in 0..r {
            for (i, g) in gens.iter().enumerate() {
                block[(row, i)] = BigInt::from(g.coords()[row]);
            }
            block[(row, r + row)] = BigInt::from(d[row]);
        }
        let wrap = BigInt::from(2 * l);
        let relations: Vec<Vec<i64>> = integer_kernel(&block)
            .into_iter()
            .map(|v| (0..r).map(|i| v[i].mod_floor(&wrap).to_i64().expect("reduced")).collect())
            .collect();
        let rows = relations.len();
        let mut system = Matrix::<BigInt>::zeros(rows, r + rows);
        let mut rhs = Vec::with_capacity(rows);
        for (row, a) in relations.iter().enumerate() {
            for i in 0..r {
                system[(row, i)] = BigInt::from(a[i]);
            }
            system[(row, r + row)] = BigInt::from(l);
            rhs.push(BigInt::from((l / n) * gamma_of(&gamma, a, n)));
        }
        let sol = solve_integer_system(&system, &rhs)
            .ok_or_else(|| Error::InvariantViolation("character extension has no solution".into()))?;
        let big_l = BigInt::from(l);
        Ok((0..r).map(|i| sol[i].mod_floor(&big_l).to_i64().expect("reduced")).collect())
    }

    /// An isomorphism of central extensions `G_self → G_other` of the form
    /// `(z, k) ↦ ((L/N)z + f(k), k)`, valued in `μ_L × K`; requires equal
    /// commutator forms.
    pub fn model_isomorphism(&self, other: &Cocycle) -> Result<ExtendedCharacter> {
        if self.group != other.group {
            return Err(Error::ParentMismatch("cocycles on different groups".into()));
        }
        if self.commutator_form() != other.commutator_form() {
            return Err(Error::InvalidBicharacter("commutator forms differ".into()));
        }
        let r = self.group.rank();
        let diff = (0..r).map(|i| (0..r).map(|j| self.c[i][j] - other.c[i][j]).collect()).collect();
        let b = Cocycle::from_matrix(self.group.clone(), diff)?;
        b.lift_isotropic_character(&Subgroup::full(&self.group))
    }
}

/// `Γ(a)` with `t_1^{a_1}⋯t_r^{a_r} = (Γ(a), Σ a_i g_i)`.
fn gamma_of(gamma: &[Vec<i64>], a: &[i64], n: i64) -> i64 {
    let r = a.len();
    let mut acc: i128 = 0;
    for i in 0..r {
        let ai = a[i] as i128;
        acc += gamma[i][i] as i128 * (ai * (ai - 1) / 2);
        for j in i + 1..r {
            acc += ai * a[j] as i128 * gamma[i][j] as i128;
        }
        acc = acc.mod_floor(&(n as i128));
    }
    acc as i64
}

fn basis_elements(m: &Subgroup) -> Vec<GroupElement> {
    m.basis().iter().map(|row| m.parent().reduce(row)).collect()
}

/// The center of `G_N`: `μ_N × rad(e)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Center {
    pub root_order: i64,
    pub radical: Subgroup,
}

impl Center {
    pub fn order(&self) -> u64 {
        self.root_order as u64 * self.radical.order()
    }

    pub fn contains(&self, g: &HeisenbergElement) -> bool {
        self.radical.contains(&g.k)
    }
}

/// `χ(z, m) = ζ_L^{(L/N)z + λ(m)}` on `π⁻¹(M)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ExtendedCharacter {
    domain: Subgroup,
    root_order: i64,
    phase_order: i64,
    /// `λ` on the basis rows of the domain.
    lambda_gens: Vec<i64>,
    /// `c` on pairs of basis rows.
    gamma: Vec<Vec<i64>>,
}

impl ExtendedCharacter {
    pub fn domain(&self) -> &Subgroup {
        &self.domain
    }

    pub fn phase_order(&self) -> i64 {
        self.phase_order
    }

    pub fn lambda_generators(&self) -> &[i64] {
        &self.lambda_gens
    }

    /// `λ(m)` mod `L`; `None` outside the domain.
    pub fn lambda(&self, m: &GroupElement) -> Option<i64> {
        let coeffs = self.domain.decompose(m)?;
        let s: i128 = coeffs.iter().zip(&self.lambda_gens).map(|(c, v)| *c as i128 * *v as i128).sum();
        let shift = (self.phase_order / self.root_order) as i128 * gamma_of(&self.gamma, &coeffs, self.root_order) as i128;
        Some((s - shift).mod_floor(&(self.phase_order as i128)) as i64)
    }

    /// Exponent of `χ(z, m)` as a power of `ζ_L`.
    pub fn evaluate(&self, g: &HeisenbergElement) -> Option<i64> {
        let l = self.lambda(&g.k)?;
        Some(((self.phase_order / self.root_order) * g.z + l).mod_floor(&self.phase_order))
    }

    /// `λ'(m) = λ(m) + (L/N)·e(k, m)`, another extension on the same domain.
    pub fn twisted_by(&self, e: &Bicharacter, k: &GroupElement) -> Self {
        let scale = self.phase_order / self.root_order;
        let lambda_gens = basis_elements(&self.domain)
            .iter()
            .zip(&self.lambda_gens)
            .map(|(g, v)| (v + scale * e.evaluate(k, g)).mod_floor(&self.phase_order))
            .collect();
        ExtendedCharacter { lambda_gens, ..self.clone() }
    }

    /// `λ(m) + λ(m') − (L/N)c(m, m') ≡ λ(m + m')` for the given pairs, i.e.
    /// multiplicativity of `χ` on `(0,m)·(0,m') = (c(m,m'), m+m')`.
    pub fn satisfies_character_law(&self, c: &Cocycle, pairs: impl IntoIterator<Item = (GroupElement, GroupElement)>) -> bool {
        let scale = self.phase_order / self.root_order;
        pairs.into_iter().all(|(a, b)| match (self.lambda(&a), self.lambda(&b)) {
            (Some(x), Some(y)) => {
                let sum = c.group().add(&a, &b);
                self.lambda(&sum) == Some((x + y - scale * c.evaluate(&a, &b)).mod_floor(&self.phase_order))
            }
            _ => false,
        })
    }
}
