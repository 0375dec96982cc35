//! The canonical representation `ρ = Ind χ` as monomial matrices.
//!
//! `V` has the basis `f_t`, `t` running over the lexicographic transversal of
//! `K/M`, with `f_t(h·s(t)) = χ(h)`. For `g = (z, k)`, `ρ(g)f_t = α·f_{t'}`
//! where `t'` represents `t − k`, `m = t' + k − t ∈ M` and
//! `α = ζ_L^{(L/N)(z + c(t',k) − c(m,t)) + λ(m)}`.

use std::collections::HashMap;

use num_rational::BigRational;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::abelian::{quotient_transversal, GroupElement, Subgroup};
use crate::bicharacter::Bicharacter;
use crate::cyclotomic::{CyclotomicField, EchelonBasis};
use crate::error::{Error, Result};
use crate::heisenberg_model::{Cocycle, ExtendedCharacter, HeisenbergElement};
use crate::monomial::MonomialMatrix;

/// Above this many elements of `G_N`, homomorphism checks are sampled.
pub const EXHAUSTIVE_LIMIT: u64 = 1 << 14;

#[derive(Clone, Debug)]
pub struct CanonicalRep {
    model: Cocycle,
    form: Bicharacter,
    m: Subgroup,
    chi: ExtendedCharacter,
    transversal: Vec<GroupElement>,
    table: Vec<MonomialMatrix>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct HomomorphismWitness {
    pub g: HeisenbergElement,
    pub h: HeisenbergElement,
}

pub fn build_representation(model: &Cocycle, m: &Subgroup, chi: &ExtendedCharacter) -> Result<CanonicalRep> {
    let form = model.commutator_form();
    let k = model.group();
    if m.parent() != k {
        return Err(Error::ParentMismatch(format!("subgroup of {} used with {}", m.parent(), k)));
    }
    if !form.is_maximal_isotropic(m).map_err(|_| Error::NotMaximalIsotropic(m.to_string()))? {
        return Err(Error::NotMaximalIsotropic(m.to_string()));
    }
    if chi.domain() != m {
        return Err(Error::InvalidCharacter(format!("character is defined on {}, not {m}", chi.domain())));
    }
    let gens = m.generators();
    let pairs = gens.iter().flat_map(|a| gens.iter().map(move |b| (a.clone(), b.clone())));
    if !chi.satisfies_character_law(model, pairs) {
        return Err(Error::InvalidCharacter("not multiplicative on the generators".into()));
    }
    let transversal = quotient_transversal(k, m)?;
    let index: HashMap<GroupElement, usize> = transversal.iter().cloned().enumerate().map(|(i, t)| (t, i)).collect();
    let l = model.phase_order();
    let scale = l / model.root_order();
    let table = k
        .elements()
        .collect::<Vec<_>>()
        .par_iter()
        .map(|kk| {
            let mut perm = vec![0; transversal.len()];
            let mut phase = vec![0; transversal.len()];
            for (col, t) in transversal.iter().enumerate() {
                let t2 = m.coset_representative(&k.sub(t, kk));
                let mm = k.sub(&k.add(&t2, kk), t);
                let lam = chi.lambda(&mm).expect("t' + k − t lies in M");
                perm[col] = index[&t2];
                phase[col] = scale * (model.evaluate(&t2, kk) - model.evaluate(&mm, t)) + lam;
            }
            MonomialMatrix::new(l, perm, phase)
        })
        .collect();
    Ok(CanonicalRep { model: model.clone(), form, m: m.clone(), chi: chi.clone(), transversal, table })
}

impl CanonicalRep {
    pub fn model(&self) -> &Cocycle {
        &self.model
    }

    pub fn form(&self) -> &Bicharacter {
        &self.form
    }

    pub fn subgroup(&self) -> &Subgroup {
        &self.m
    }

    pub fn character(&self) -> &ExtendedCharacter {
        &self.chi
    }

    pub fn transversal(&self) -> &[GroupElement] {
        &self.transversal
    }

    pub fn dim(&self) -> usize {
        self.transversal.len()
    }

    pub fn phase_order(&self) -> i64 {
        self.model.phase_order()
    }

    /// `ρ(s(k))`.
    pub fn rho_section(&self, k: &GroupElement) -> &MonomialMatrix {
        &self.table[self.model.group().index_of(k)]
    }

    /// `ρ(z, k) = ζ_N^z · ρ(s(k))`.
    pub fn rho(&self, g: &HeisenbergElement) -> MonomialMatrix {
        let scale = self.phase_order() / self.model.root_order();
        self.rho_section(&g.k).scaled(scale * g.z)
    }

    /// A copy with one phase of `ρ(s(k))` shifted, for mutation tests.
    pub fn with_perturbed_phase(&self, k: &GroupElement, column: usize, delta: i64) -> CanonicalRep {
        let mut out = self.clone();
        let idx = self.model.group().index_of(k);
        let mut phase = out.table[idx].phase.clone();
        phase[column] += delta;
        out.table[idx] = MonomialMatrix::new(self.phase_order(), out.table[idx].perm.clone(), phase);
        out
    }

    fn check_pair(&self, g: &HeisenbergElement, h: &HeisenbergElement) -> bool {
        self.rho(g).mul(&self.rho(h)) == self.rho(&self.model.multiply(g, h))
    }

    /// `ρ(g)ρ(h) = ρ(gh)`. Since `ρ(z,k)` is `ζ_N^z·ρ(s(k))`, the product law on
    /// `G_N` is equivalent to the law on pairs of sections together with
    /// `ρ(z, 0) = ζ_N^z·I`; that reduced set is checked exhaustively when
    /// `|G_N|` is at most [`EXHAUSTIVE_LIMIT`], otherwise `trials` random pairs.
    pub fn verify_homomorphism(&self, trials: usize, seed: u64) -> std::result::Result<(), HomomorphismWitness> {
        let c = &self.model;
        let k = c.group();
        let n = c.root_order();
        let one = c.identity();
        let scale = self.phase_order() / n;
        for z in 0..n {
            let g = c.central(z);
            if self.rho(&g) != MonomialMatrix::scalar(self.dim(), self.phase_order(), scale * z) {
                return Err(HomomorphismWitness { g, h: one });
            }
        }
        if k.order() * n as u64 <= EXHAUSTIVE_LIMIT {
            let ks: Vec<GroupElement> = k.elements().collect();
            let bad = ks.par_iter().find_map_first(|a| {
                ks.iter().find_map(|b| {
                    let (g, h) = (c.section(a), c.section(b));
                    (!self.check_pair(&g, &h)).then_some(HomomorphismWitness { g, h })
                })
            });
            return bad.map_or(Ok(()), Err);
        }
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let total = k.order() as usize;
        for _ in 0..trials {
            let g = HeisenbergElement { z: rng.gen_range(0..n), k: k.element_at(rng.gen_range(0..total)) };
            let h = HeisenbergElement { z: rng.gen_range(0..n), k: k.element_at(rng.gen_range(0..total)) };
            if !self.check_pair(&g, &h) {
                return Err(HomomorphismWitness { g, h });
            }
        }
        Ok(())
    }

    /// Exact dimension of `span{ρ(s(l)) : l ∈ K}` inside `End(V)`.
    pub fn spanning_dimension(&self) -> usize {
        let field = CyclotomicField::<BigRational>::new(self.phase_order() as usize);
        let mut basis = EchelonBasis::new(&field);
        for mat in &self.table {
            basis.insert(mat.to_sparse(&field));
        }
        basis.rank()
    }

    /// `ρ(s(l))` for every `l`, indexed like the elements of `K`.
    pub fn section_table(&self) -> &[MonomialMatrix] {
        &self.table
    }
}
