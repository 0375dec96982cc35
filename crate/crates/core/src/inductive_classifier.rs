//! The conjugation action `κ` on `End(V)` and maximal inductive algebras.
//!
//! `κ(k)T = ρ(s(k))·T·ρ(s(k))⁻¹`. Each `ρ(s(l))` is a `κ`-eigenvector with
//! character `k ↦ e(k, l)`, and these `|K|` characters are distinct, so every
//! `κ`-invariant subspace is spanned by a subset of the `ρ(s(l))`. In finite
//! dimension "weakly closed" is automatic, so inductive algebras are plain
//! abelian subalgebras normalized by `ρ`.

use std::collections::{BTreeSet, HashSet};

use num_rational::BigRational;
use rayon::prelude::*;
use serde::Serialize;

use crate::abelian::{enumerate_subgroups, GroupElement, Subgroup};
use crate::canonical_rep::CanonicalRep;
use crate::cyclotomic::{CyclotomicField, EchelonBasis};
use crate::error::{Error, Result};
use crate::heisenberg_model::HeisenbergElement;
use crate::monomial::{intertwining_equations, MonomialMatrix};

type Field = CyclotomicField<BigRational>;

fn field_for(r: &CanonicalRep) -> Field {
    CyclotomicField::new(r.phase_order() as usize)
}

pub fn kappa_apply(r: &CanonicalRep, k: &GroupElement, t: &MonomialMatrix) -> Result<MonomialMatrix> {
    if t.dim != r.dim() {
        return Err(Error::DimensionMismatch { expected: r.dim(), found: t.dim });
    }
    let g = r.rho_section(k);
    Ok(g.mul(t).mul(&g.inverse()))
}

#[derive(Clone, Debug, Serialize)]
pub struct Eigenspace {
    pub label: GroupElement,
    /// Exponents (mod `L`) of the eigenvalue on each generator of `K`.
    pub character: Vec<i64>,
}

#[derive(Clone, Debug, Serialize)]
pub struct EigenspaceDecomposition {
    pub spaces: Vec<Eigenspace>,
    pub distinct_characters: bool,
    pub end_dimension: usize,
}

impl EigenspaceDecomposition {
    pub fn is_complete(&self) -> bool {
        self.distinct_characters && self.spaces.len() == self.end_dimension
    }
}

/// Checks that every `ρ(s(l))` is a `κ`-eigenvector with character `e♭(l)`
/// and that these characters are pairwise distinct.
pub fn eigenspace_decomposition(r: &CanonicalRep) -> Result<EigenspaceDecomposition> {
    let k = r.model().group();
    let e = r.form();
    let scale = r.phase_order() / r.model().root_order();
    let gens: Vec<GroupElement> = (0..k.rank()).map(|i| k.basis_element(i)).collect();
    let mut spaces = Vec::with_capacity(k.order() as usize);
    for l in k.elements() {
        let t = r.rho_section(&l);
        let mut character = Vec::with_capacity(gens.len());
        for g in &gens {
            let moved = kappa_apply(r, g, t)?;
            let a = moved.ratio(t).ok_or_else(|| {
                Error::InvariantViolation(format!("ρ(s({l})) is not a κ({g})-eigenvector"))
            })?;
            if a != (scale * e.evaluate(g, &l)) % r.phase_order() {
                return Err(Error::InvariantViolation(format!("κ({g}) eigenvalue on ρ(s({l})) differs from e({g},{l})")));
            }
            character.push(a);
        }
        spaces.push(Eigenspace { label: l, character });
    }
    let distinct: HashSet<&Vec<i64>> = spaces.iter().map(|s| &s.character).collect();
    let distinct_characters = distinct.len() == spaces.len();
    Ok(EigenspaceDecomposition { spaces, distinct_characters, end_dimension: r.dim() * r.dim() })
}

/// `span{ρ(s(l)) : l ∈ labels}`.
#[derive(Clone, Debug)]
pub struct InductiveAlgebra {
    pub labels: Vec<GroupElement>,
    pub basis: Vec<MonomialMatrix>,
}

impl InductiveAlgebra {
    pub fn from_labels(r: &CanonicalRep, labels: Vec<GroupElement>) -> Self {
        let basis = labels.iter().map(|l| r.rho_section(l).clone()).collect();
        InductiveAlgebra { labels, basis }
    }

    pub fn label_set(&self) -> BTreeSet<GroupElement> {
        self.labels.iter().cloned().collect()
    }

    fn span<'f>(&self, field: &'f Field) -> EchelonBasis<'f, BigRational> {
        let mut span = EchelonBasis::new(field);
        for b in &self.basis {
            span.insert(b.to_sparse(field));
        }
        span
    }

    /// Exact dimension of the span.
    pub fn dimension(&self, r: &CanonicalRep) -> usize {
        self.span(&field_for(r)).rank()
    }

    pub fn is_abelian(&self) -> bool {
        self.basis.iter().enumerate().all(|(i, a)| self.basis[i + 1..].iter().all(|b| a.commutes_with(b)))
    }

    /// Closed under products, by exact span membership.
    pub fn is_closed(&self, r: &CanonicalRep) -> bool {
        let field = field_for(r);
        let span = self.span(&field);
        self.basis.iter().all(|a| self.basis.iter().all(|b| span.contains(&a.mul(b).to_sparse(&field))))
    }

    pub fn is_self_adjoint(&self, r: &CanonicalRep) -> bool {
        let field = field_for(r);
        let span = self.span(&field);
        self.basis.iter().all(|a| span.contains(&a.adjoint().to_sparse(&field)))
    }

    pub fn is_kappa_invariant(&self, r: &CanonicalRep) -> bool {
        let field = field_for(r);
        let span = self.span(&field);
        let k = r.model().group();
        (0..k.rank()).all(|i| {
            let g = k.basis_element(i);
            self.basis
                .iter()
                .all(|b| kappa_apply(r, &g, b).map(|m| span.contains(&m.to_sparse(&field))).unwrap_or(false))
        })
    }

    /// Exact dimension of `{T ∈ End(V) : T·b = b·T for every basis element b}`.
    pub fn commutant_dimension(&self, r: &CanonicalRep) -> usize {
        let field = field_for(r);
        let mut rows = EchelonBasis::new(&field);
        for b in &self.basis {
            for row in intertwining_equations(&field, b, b) {
                rows.insert(row);
            }
        }
        r.dim() * r.dim() - rows.rank()
    }

    /// Abelian and equal to its own commutant.
    pub fn is_maximal_abelian(&self, r: &CanonicalRep) -> bool {
        self.is_abelian() && self.commutant_dimension(r) == self.dimension(r)
    }

    /// The same algebra with one basis element removed.
    pub fn without(&self, index: usize) -> Self {
        let mut out = self.clone();
        out.labels.remove(index);
        out.basis.remove(index);
        out
    }
}

/// `A(M)`, the span of `ρ(s(l))` for `l ∈ M`.
pub fn build_am(r: &CanonicalRep, m: &Subgroup) -> Result<InductiveAlgebra> {
    if !r.form().is_maximal_isotropic(m)? {
        return Err(Error::NotMaximalIsotropic(m.to_string()));
    }
    Ok(InductiveAlgebra::from_labels(r, m.elements()))
}

/// `u(g) = (L/N)·e(π(g), l) + λ(l)`, the symbol with `ρ(s(l)) = m_u`.
#[derive(Clone, Debug, Serialize)]
pub struct MultiplicationSymbol {
    pub label: GroupElement,
    pub order: i64,
    /// `u(s(t))` for the transversal elements in order.
    pub values: Vec<i64>,
}

pub fn multiplication_operator_form(r: &CanonicalRep, l: &GroupElement) -> Result<MultiplicationSymbol> {
    let m = r.subgroup();
    let lam = r.character().lambda(l).ok_or_else(|| Error::LabelOutsideSubgroup(l.to_string()))?;
    let c = r.model();
    let order = r.phase_order();
    let scale = order / c.root_order();
    let e = r.form();
    let u = |g: &HeisenbergElement| (scale * e.evaluate(&g.k, l) + lam) % order;
    let values: Vec<i64> = r.transversal().iter().map(|t| u(&c.section(t))).collect();
    let expected = MonomialMatrix::new(order, (0..r.dim()).collect(), values.clone());
    if r.rho_section(l) != &expected {
        return Err(Error::InvariantViolation(format!("ρ(s({l})) is not the multiplication operator of its symbol")));
    }
    let lifts: Vec<GroupElement> = if c.group().order() <= 64 { m.elements() } else { m.generators() };
    for t in r.transversal() {
        let g = c.section(t);
        for mm in &lifts {
            for z in 0..c.root_order() {
                let h = HeisenbergElement { z, k: mm.clone() };
                if u(&c.multiply(&h, &g)) != u(&g) {
                    return Err(Error::InvariantViolation(format!("symbol of {l} is not π⁻¹(M)-invariant")));
                }
            }
        }
    }
    Ok(MultiplicationSymbol { label: l.clone(), order, values })
}

/// `A(M)` for every maximal isotropic `M`, in canonical subgroup order.
pub fn enumerate_maximal_inductive(r: &CanonicalRep, limit: u64) -> Result<Vec<InductiveAlgebra>> {
    let subgroups = enumerate_subgroups(r.model().group(), limit)?;
    let e = r.form();
    let lagrangians: Vec<&Subgroup> =
        subgroups.iter().filter(|m| e.is_isotropic(m) && e.perp(m) == **m).collect();
    lagrangians.par_iter().map(|m| build_am(r, m)).collect()
}

/// `span{ρ(s(l)) : l ∈ S}` is a subalgebra, checked by exact span membership
/// of all products.
pub fn span_is_algebra(r: &CanonicalRep, labels: &[GroupElement]) -> bool {
    InductiveAlgebra::from_labels(r, labels.to_vec()).is_closed(r)
}

/// Maximal abelian `κ`-invariant subalgebras found without reference to the
/// form: over all subgroups `S`, keep those whose span is an abelian
/// subalgebra, then the maximal ones under inclusion.
pub fn direct_search(r: &CanonicalRep, limit: u64) -> Result<Vec<Subgroup>> {
    let subgroups = enumerate_subgroups(r.model().group(), limit)?;
    let abelian: Vec<&Subgroup> = subgroups
        .par_iter()
        .filter(|s| {
            let alg = InductiveAlgebra::from_labels(r, s.elements());
            alg.is_abelian() && alg.is_closed(r) && alg.is_kappa_invariant(r)
        })
        .collect();
    Ok(abelian
        .iter()
        .filter(|s| !abelian.iter().any(|t| t.order() > s.order() && s.is_subgroup_of(t)))
        .map(|s| (*s).clone())
        .collect())
}

#[derive(Clone, Debug, Serialize)]
pub struct AlgebraCheck {
    pub subgroup: String,
    pub dimension: usize,
    pub abelian: bool,
    pub self_adjoint: bool,
    pub kappa_invariant: bool,
    pub commutant_dimension: usize,
    pub maximal_abelian: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct MainTheoremReport {
    pub group: String,
    pub order: u64,
    pub subgroups: usize,
    pub isotropic: usize,
    pub lagrangians: Vec<String>,
    pub direct_search: Vec<String>,
    pub sets_equal: bool,
    pub algebras: Vec<AlgebraCheck>,
    pub counterexamples: Vec<String>,
    pub pass: bool,
}

pub fn check_algebra(r: &CanonicalRep, name: String, alg: &InductiveAlgebra) -> AlgebraCheck {
    let dimension = alg.dimension(r);
    let abelian = alg.is_abelian();
    let commutant_dimension = alg.commutant_dimension(r);
    AlgebraCheck {
        subgroup: name,
        dimension,
        abelian,
        self_adjoint: alg.is_self_adjoint(r),
        kappa_invariant: alg.is_kappa_invariant(r),
        commutant_dimension,
        maximal_abelian: abelian && commutant_dimension == dimension,
    }
}

/// Compares the direct search with `{A(M) : M maximal isotropic}` and checks
/// each `A(M)` is maximal abelian, self-adjoint and `κ`-invariant.
pub fn verify_main_theorem(r: &CanonicalRep, limit: u64) -> Result<MainTheoremReport> {
    let k = r.model().group();
    let e = r.form();
    let subgroups = enumerate_subgroups(k, limit)?;
    let isotropic = subgroups.iter().filter(|m| e.is_isotropic(m)).count();
    let lagrangians: Vec<Subgroup> = subgroups.iter().filter(|m| e.is_isotropic(m) && e.perp(m) == **m).cloned().collect();
    let direct = direct_search(r, limit)?;
    let lag_set: BTreeSet<&Subgroup> = lagrangians.iter().collect();
    let direct_set: BTreeSet<&Subgroup> = direct.iter().collect();
    let sets_equal = lag_set == direct_set;
    let mut counterexamples = Vec::new();
    for s in direct_set.difference(&lag_set) {
        counterexamples.push(format!("direct search found {s}, which is not maximal isotropic"));
    }
    for s in lag_set.difference(&direct_set) {
        counterexamples.push(format!("A({s}) missing from the direct search"));
    }
    let algebras: Vec<AlgebraCheck> = lagrangians
        .par_iter()
        .map(|m| {
            let alg = build_am(r, m).expect("filtered to maximal isotropic");
            check_algebra(r, m.to_string(), &alg)
        })
        .collect();
    for a in &algebras {
        if !(a.maximal_abelian && a.self_adjoint && a.kappa_invariant && a.dimension as u64 * a.dimension as u64 == k.order()) {
            counterexamples.push(format!("A({}) fails a structural check", a.subgroup));
        }
    }
    Ok(MainTheoremReport {
        group: k.to_string(),
        order: k.order(),
        subgroups: subgroups.len(),
        isotropic,
        lagrangians: lagrangians.iter().map(|m| m.to_string()).collect(),
        direct_search: direct.iter().map(|m| m.to_string()).collect(),
        sets_equal,
        pass: sets_equal && counterexamples.is_empty(),
        algebras,
        counterexamples,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::abelian::FiniteAbelianGroup;
    use crate::canonical_rep::build_representation;
    use crate::darboux::{classify, random_nondegenerate};
    use crate::heisenberg_model::Cocycle;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn grp(f: &[i64]) -> FiniteAbelianGroup {
        FiniteAbelianGroup::new(f.to_vec()).unwrap()
    }

    fn rep_on(c: &Cocycle, gens: &[Vec<i64>]) -> CanonicalRep {
        let m = Subgroup::from_generators(c.group(), gens);
        let chi = c.lift_isotropic_character(&m).unwrap();
        build_representation(c, &m, &chi).unwrap()
    }

    fn momentum_rep(a: &[i64]) -> CanonicalRep {
        let c = Cocycle::standard(&grp(a));
        let gens: Vec<Vec<i64>> = (0..a.len())
            .map(|i| (0..2 * a.len()).map(|j| i64::from(j == 2 * i + 1)).collect())
            .collect();
        rep_on(&c, &gens)
    }

    #[test]
    fn kappa_is_an_action() {
        let r = momentum_rep(&[4]);
        let k = r.model().group().clone();
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let all: Vec<GroupElement> = k.elements().collect();
        for _ in 0..50 {
            let a = &all[rng.gen_range(0..all.len())];
            let b = &all[rng.gen_range(0..all.len())];
            let t = r.rho_section(&all[rng.gen_range(0..all.len())]).clone();
            let both = kappa_apply(&r, a, &kappa_apply(&r, b, &t).unwrap()).unwrap();
            assert_eq!(both, kappa_apply(&r, &k.add(a, b), &t).unwrap());
            // a central lift conjugates the same way
            let lift = r.rho(&HeisenbergElement { z: 3, k: a.clone() });
            assert_eq!(lift.mul(&t).mul(&lift.inverse()), kappa_apply(&r, a, &t).unwrap());
        }
        let id = MonomialMatrix::identity(r.dim(), r.phase_order());
        assert_eq!(kappa_apply(&r, &all[5], &id).unwrap(), id);
        assert_eq!(kappa_apply(&r, &k.identity(), &r.rho_section(&all[7]).clone()).unwrap(), *r.rho_section(&all[7]));
        let wrong = MonomialMatrix::identity(3, r.phase_order());
        assert!(matches!(kappa_apply(&r, &all[1], &wrong), Err(Error::DimensionMismatch { .. })));
    }

    #[test]
    fn eigenspaces_for_z2() {
        let r = momentum_rep(&[2]);
        let dec = eigenspace_decomposition(&r).unwrap();
        assert_eq!(dec.spaces.len(), 4);
        assert!(dec.is_complete());
        assert!(dec.spaces[0].character.iter().all(|&a| a == 0));
    }

    #[test]
    fn eigenvalue_map_is_injective_exactly_when_nondegenerate() {
        let r = momentum_rep(&[2, 2]);
        assert!(eigenspace_decomposition(&r).unwrap().distinct_characters);
        // a degenerate form: eigen-characters collide on the radical
        let k = grp(&[2, 2, 2, 2]);
        let mut c = vec![vec![0; 4]; 4];
        c[0][1] = 1;
        let flat = Cocycle::from_matrix(k, c).unwrap();
        let e = flat.commutator_form();
        assert!(!e.is_nondegenerate());
        let chars: HashSet<Vec<i64>> = flat
            .group()
            .elements()
            .map(|l| (0..4).map(|i| e.evaluate(&flat.group().basis_element(i), &l)).collect())
            .collect();
        assert!(chars.len() < 16);
    }

    #[test]
    fn diagonal_algebra_for_z2() {
        let r = momentum_rep(&[2]);
        let m = r.subgroup().clone();
        let alg = build_am(&r, &m).unwrap();
        assert_eq!(alg.basis.len(), 2);
        assert!(alg.basis.iter().all(|b| b.perm == vec![0, 1]));
        assert!(alg.is_maximal_abelian(&r));
        assert!(alg.is_self_adjoint(&r));
        let sym = multiplication_operator_form(&r, &GroupElement(vec![0, 1])).unwrap();
        assert_eq!(sym.values, vec![0, 2]);
        let one = multiplication_operator_form(&r, &GroupElement(vec![0, 0])).unwrap();
        assert_eq!(one.values, vec![0, 0]);
        assert!(matches!(
            multiplication_operator_form(&r, &GroupElement(vec![1, 0])),
            Err(Error::LabelOutsideSubgroup(_))
        ));
        let trivial = Subgroup::trivial(r.model().group());
        assert!(matches!(build_am(&r, &trivial), Err(Error::NotMaximalIsotropic(_))));
    }

    #[test]
    fn symbols_on_every_lagrangian() {
        for (seed, f) in [&[2][..], &[3], &[4], &[2, 2], &[6]].iter().enumerate() {
            let e = random_nondegenerate(&grp(f), seed as u64);
            let c = Cocycle::standard_model(&classify(&e).unwrap()).unwrap();
            for m in enumerate_subgroups(e.group(), 4096).unwrap() {
                if !e.is_maximal_isotropic(&m).unwrap() {
                    continue;
                }
                let chi = c.lift_isotropic_character(&m).unwrap();
                let r = build_representation(&c, &m, &chi).unwrap();
                for l in m.elements() {
                    let sym = multiplication_operator_form(&r, &l).unwrap();
                    assert_eq!(sym.values.len(), r.dim());
                }
            }
        }
    }

    #[test]
    fn algebra_counts() {
        for (a, count) in [(&[2][..], 3), (&[3], 4), (&[4], 7)] {
            let r = momentum_rep(a);
            assert_eq!(enumerate_maximal_inductive(&r, 4096).unwrap().len(), count);
        }
    }

    #[test]
    fn dropping_a_basis_element_is_flagged() {
        let r = momentum_rep(&[4]);
        let alg = build_am(&r, r.subgroup()).unwrap();
        assert!(alg.is_maximal_abelian(&r));
        let cut = alg.without(1);
        assert!(cut.commutant_dimension(&r) > cut.dimension(&r));
        assert!(!cut.is_maximal_abelian(&r));
    }

    #[test]
    fn main_theorem_on_small_groups() {
        for f in [&[2][..], &[3], &[2, 2]] {
            let r = momentum_rep(f);
            let report = verify_main_theorem(&r, 4096).unwrap();
            assert!(report.pass, "{:?}", report.counterexamples);
        }
        let trivial = rep_on(&Cocycle::standard(&FiniteAbelianGroup::trivial()), &[]);
        let report = verify_main_theorem(&trivial, 4096).unwrap();
        assert!(report.pass);
        assert_eq!(report.lagrangians.len(), 1);
        assert_eq!(report.algebras[0].dimension, 1);
    }

    #[test]
    fn subsets_span_algebras_exactly_when_subgroups() {
        for f in [&[2][..], &[3]] {
            let r = momentum_rep(f);
            let k = r.model().group().clone();
            let all: Vec<GroupElement> = k.elements().collect();
            for mask in 1u32..(1 << all.len()) {
                let subset: Vec<GroupElement> =
                    all.iter().enumerate().filter(|(i, _)| mask >> i & 1 == 1).map(|(_, x)| x.clone()).collect();
                let closed = subset.iter().all(|a| subset.iter().all(|b| subset.contains(&k.add(a, b))));
                assert_eq!(span_is_algebra(&r, &subset), closed);
                let is_subgroup = Subgroup::from_elements(&k, &subset).order() as usize == subset.len();
                assert_eq!(closed, is_subgroup);
            }
        }
    }

    #[test]
    fn random_subsets_of_a_larger_group() {
        let r = momentum_rep(&[2, 2]);
        let k = r.model().group().clone();
        let all: Vec<GroupElement> = k.elements().collect();
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        for _ in 0..200 {
            let subset: Vec<GroupElement> = all.iter().filter(|_| rng.gen_bool(0.25)).cloned().collect();
            if subset.is_empty() {
                continue;
            }
            let is_subgroup = Subgroup::from_elements(&k, &subset).order() as usize == subset.len();
            assert_eq!(span_is_algebra(&r, &subset), is_subgroup);
        }
    }
}
