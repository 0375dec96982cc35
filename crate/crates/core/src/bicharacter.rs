//! Alternating bicharacters stored as exponent matrices.
//!
//! `e(x_i, x_j) = ζ_N^{q_ij}` with `N` the exponent of `K` and `ζ_N` a fixed
//! primitive `N`-th root of unity. All values are exponents mod `N`.

use num_integer::Integer;
use serde::Serialize;

use crate::abelian::{enumerate_subgroups, kernel_of_map, FiniteAbelianGroup, GroupElement, GroupHom, Subgroup};
use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize)]
pub struct Bicharacter {
    group: FiniteAbelianGroup,
    root_order: i64,
    q: Vec<Vec<i64>>,
}

impl Bicharacter {
    /// Validates the exponent matrix with root order equal to the exponent of `group`.
    pub fn new(group: FiniteAbelianGroup, q: Vec<Vec<i64>>) -> Result<Self> {
        let n = group.exponent();
        Self::with_root_order(group, n, q)
    }

    /// Accepts exponents of `ζ_R` for any multiple `R` of the exponent and
    /// rescales them to `ζ_N`.
    pub fn with_root_order(group: FiniteAbelianGroup, root_order: i64, q: Vec<Vec<i64>>) -> Result<Self> {
        let r = group.rank();
        let n = group.exponent();
        if root_order < 1 || root_order % n != 0 {
            return Err(Error::InvalidBicharacter(format!(
                "root order {root_order} is not a multiple of the exponent {n}"
            )));
        }
        if q.len() != r || q.iter().any(|row| row.len() != r) {
            return Err(Error::InvalidBicharacter(format!("q must be a {r}x{r} matrix")));
        }
        let scale = root_order / n;
        let mut reduced = vec![vec![0; r]; r];
        for i in 0..r {
            for j in 0..r {
                let v = q[i][j].mod_floor(&root_order);
                if v % scale != 0 {
                    return Err(Error::InvalidBicharacter(format!(
                        "q[{i}][{j}] = {} is not a power of a primitive {n}-th root of unity",
                        q[i][j]
                    )));
                }
                reduced[i][j] = v / scale;
            }
        }
        let d = group.factors();
        for i in 0..r {
            if reduced[i][i] != 0 {
                return Err(Error::InvalidBicharacter(format!(
                    "alternating: diagonal entry q[{i}][{i}] must vanish"
                )));
            }
            for j in 0..r {
                if (reduced[i][j] + reduced[j][i]) % n != 0 {
                    return Err(Error::InvalidBicharacter(format!(
                        "skew-symmetry: q[{i}][{j}] + q[{j}][{i}] must vanish mod {n}"
                    )));
                }
                let step = n / d[i].gcd(&d[j]);
                if reduced[i][j] % step != 0 {
                    return Err(Error::InvalidBicharacter(format!(
                        "value order: q[{i}][{j}] must be divisible by {step}"
                    )));
                }
            }
        }
        Ok(Bicharacter { group, root_order: n, q: reduced })
    }

    pub fn zero(group: &FiniteAbelianGroup) -> Self {
        let r = group.rank();
        Bicharacter { group: group.clone(), root_order: group.exponent(), q: vec![vec![0; r]; r] }
    }

    pub fn group(&self) -> &FiniteAbelianGroup {
        &self.group
    }

    pub fn root_order(&self) -> i64 {
        self.root_order
    }

    pub fn q(&self) -> &[Vec<i64>] {
        &self.q
    }

    /// `Σ k_i q_ij l_j mod N`.
    pub fn evaluate(&self, k: &GroupElement, l: &GroupElement) -> i64 {
        let mut acc: i128 = 0;
        for (i, ki) in k.coords().iter().enumerate() {
            if *ki == 0 {
                continue;
            }
            let row: i128 = self.q[i].iter().zip(l.coords()).map(|(a, b)| *a as i128 * *b as i128).sum();
            acc += *ki as i128 * row;
        }
        acc.mod_floor(&(self.root_order as i128)) as i64
    }

    /// `{l : e(k, l) = 1 for all k}`, the kernel of `e♭`.
    pub fn radical(&self) -> Subgroup {
        let moduli = vec![self.root_order; self.group.rank()];
        kernel_of_map(&self.group, &self.q, &moduli)
    }

    pub fn is_nondegenerate(&self) -> bool {
        self.radical().order() == 1
    }

    /// `l ↦ (k ↦ e(k, l))`, into the dual written in character coordinates.
    pub fn eflat(&self) -> GroupHom {
        let n = self.root_order;
        let d = self.group.factors();
        let matrix = self
            .q
            .iter()
            .enumerate()
            .map(|(i, row)| row.iter().map(|v| v / (n / d[i])).collect())
            .collect();
        GroupHom::new(self.group.clone(), self.group.dual(), matrix)
            .expect("value-order constraint makes e-flat well defined")
    }

    pub fn is_isotropic(&self, m: &Subgroup) -> bool {
        let gens = m.generators();
        gens.iter().all(|a| gens.iter().all(|b| self.evaluate(a, b) == 0))
    }

    /// `M⊥ = {k : e(k, m) = 1 for all m ∈ M}`; requires a nondegenerate form.
    pub fn orthogonal_complement(&self, m: &Subgroup) -> Result<Subgroup> {
        let rad = self.radical();
        if rad.order() != 1 {
            return Err(Error::Degenerate { radical_order: rad.order() });
        }
        Ok(self.perp(m))
    }

    /// Orthogonal complement without the nondegeneracy requirement.
    pub fn perp(&self, m: &Subgroup) -> Subgroup {
        let r = self.group.rank();
        let f: Vec<Vec<i64>> = m
            .generators()
            .iter()
            .map(|g| {
                (0..r)
                    .map(|i| {
                        let s: i128 = self.q[i].iter().zip(g.coords()).map(|(a, b)| *a as i128 * *b as i128).sum();
                        s.mod_floor(&(self.root_order as i128)) as i64
                    })
                    .collect()
            })
            .collect();
        let moduli = vec![self.root_order; f.len()];
        kernel_of_map(&self.group, &f, &moduli)
    }

    /// Isotropic and equal to its orthogonal complement.
    pub fn is_maximal_isotropic(&self, m: &Subgroup) -> Result<bool> {
        let perp = self.orthogonal_complement(m)?;
        Ok(self.is_isotropic(m) && perp == *m)
    }

    /// All `M` with `M = M⊥`, in enumeration order.
    pub fn lagrangians(&self, limit: u64) -> Result<Vec<Subgroup>> {
        Ok(enumerate_subgroups(&self.group, limit)?
            .into_iter()
            .filter(|m| self.is_isotropic(m) && self.perp(m) == *m)
            .collect())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn grp(f: &[i64]) -> FiniteAbelianGroup {
        FiniteAbelianGroup::new(f.to_vec()).unwrap()
    }

    fn standard_z2() -> Bicharacter {
        Bicharacter::new(grp(&[2, 2]), vec![vec![0, 1], vec![1, 0]]).unwrap()
    }

    fn standard_z4() -> Bicharacter {
        Bicharacter::new(grp(&[4, 4]), vec![vec![0, 1], vec![-1, 0]]).unwrap()
    }

    #[test]
    fn validation_names_the_constraint() {
        let err = Bicharacter::new(grp(&[2]), vec![vec![1]]).unwrap_err();
        assert!(err.to_string().contains("diagonal"));
        let err = Bicharacter::new(grp(&[4, 4]), vec![vec![0, 1], vec![1, 0]]).unwrap_err();
        assert!(err.to_string().contains("skew"));
        let err = Bicharacter::new(grp(&[4, 2]), vec![vec![0, 1], vec![3, 0]]).unwrap_err();
        assert!(err.to_string().contains("divisible by 2"));
        assert!(Bicharacter::new(grp(&[4, 2]), vec![vec![0, 2], vec![2, 0]]).is_ok());
    }

    #[test]
    fn rescales_larger_root_orders() {
        let e = Bicharacter::with_root_order(grp(&[2, 2]), 4, vec![vec![0, 2], vec![2, 0]]).unwrap();
        assert_eq!(e, standard_z2());
        assert!(Bicharacter::with_root_order(grp(&[2, 2]), 4, vec![vec![0, 1], vec![3, 0]]).is_err());
    }

    #[test]
    fn evaluate_examples() {
        let e = standard_z2();
        let g = e.group().clone();
        assert_eq!(e.evaluate(&g.basis_element(0), &g.basis_element(1)), 1);
        for k in g.elements() {
            assert_eq!(e.evaluate(&k, &k), 0);
            assert_eq!(e.evaluate(&g.identity(), &k), 0);
        }
    }

    #[test]
    fn radical_examples() {
        let g = grp(&[2, 2]);
        assert_eq!(Bicharacter::zero(&g).radical(), Subgroup::full(&g));
        assert_eq!(standard_z2().radical().order(), 1);
        let e = Bicharacter::new(grp(&[4, 4]), vec![vec![0, 2], vec![2, 0]]).unwrap();
        let rad = e.radical();
        assert_eq!(rad.order(), 4);
        let two_torsion = Subgroup::from_generators(e.group(), &[vec![2, 0], vec![0, 2]]);
        assert_eq!(rad, two_torsion);
    }

    #[test]
    fn eflat_examples() {
        let g = grp(&[2, 2]);
        let zero = Bicharacter::zero(&g).eflat();
        assert!(zero.matrix().iter().flatten().all(|&v| v == 0));
        let flat = standard_z2().eflat();
        assert_eq!(flat.matrix(), &[vec![0, 1], vec![1, 0]]);
        assert!(flat.is_isomorphism());
        assert!(standard_z4().eflat().is_isomorphism());
    }

    #[test]
    fn eflat_kernel_is_radical() {
        let e = Bicharacter::new(grp(&[8, 4]), vec![vec![0, 2], vec![6, 0]]).unwrap();
        assert_eq!(e.eflat().kernel(), e.radical());
        let g = e.group();
        for l in g.elements() {
            let chi = e.eflat().apply(&l);
            let character = crate::abelian::Character { coords: chi.0.clone() };
            for k in g.elements() {
                assert_eq!(character.evaluate(g, &k), e.evaluate(&k, &l));
            }
        }
    }

    #[test]
    fn isotropy_examples() {
        let e = standard_z2();
        let g = e.group().clone();
        assert!(e.is_isotropic(&Subgroup::trivial(&g)));
        for x in g.elements() {
            assert!(e.is_isotropic(&Subgroup::from_elements(&g, &[x])));
        }
        assert!(!e.is_isotropic(&Subgroup::full(&g)));
        let m = Subgroup::from_generators(&g, &[vec![1, 0]]);
        assert_eq!(e.orthogonal_complement(&m).unwrap(), m);
        assert!(e.is_maximal_isotropic(&m).unwrap());
        assert!(!e.is_maximal_isotropic(&Subgroup::trivial(&g)).unwrap());
        assert_eq!(e.orthogonal_complement(&Subgroup::trivial(&g)).unwrap(), Subgroup::full(&g));
    }

    #[test]
    fn two_torsion_is_lagrangian_in_z4_squared() {
        let e = standard_z4();
        let m = Subgroup::from_generators(e.group(), &[vec![2, 0], vec![0, 2]]);
        assert!(e.is_maximal_isotropic(&m).unwrap());
    }

    #[test]
    fn degenerate_complement_rejected() {
        let g = grp(&[2, 2]);
        let e = Bicharacter::zero(&g);
        assert!(matches!(e.orthogonal_complement(&Subgroup::trivial(&g)), Err(Error::Degenerate { .. })));
    }

    #[test]
    fn complement_criterion_matches_direct_maximality() {
        for e in [standard_z2(), standard_z4(), Bicharacter::new(grp(&[6, 6]), vec![vec![0, 1], vec![5, 0]]).unwrap()] {
            let subs = enumerate_subgroups(e.group(), 4096).unwrap();
            let iso: Vec<&Subgroup> = subs.iter().filter(|s| e.is_isotropic(s)).collect();
            for s in &subs {
                let direct = e.is_isotropic(s) && !iso.iter().any(|t| *t != s && s.is_subgroup_of(t));
                assert_eq!(e.is_maximal_isotropic(s).unwrap(), direct, "{s}");
                if e.is_isotropic(s) {
                    assert!(s.is_subgroup_of(&e.orthogonal_complement(s).unwrap()));
                }
                if direct {
                    assert_eq!(s.order() * s.order(), e.group().order());
                }
                assert_eq!(s.order() * e.perp(s).order(), e.group().order());
            }
        }
    }

    proptest! {
        #[test]
        fn bilinear_and_skew(a in proptest::collection::vec(0i64..64, 3), b in proptest::collection::vec(0i64..64, 3), c in proptest::collection::vec(0i64..64, 3)) {
            let g = grp(&[8, 4, 2]);
            let e = Bicharacter::new(g.clone(), vec![vec![0, 2, 4], vec![6, 0, 4], vec![4, 4, 0]]).unwrap();
            let (k, k2, l) = (g.reduce(&a), g.reduce(&b), g.reduce(&c));
            let n = e.root_order();
            prop_assert_eq!(e.evaluate(&g.add(&k, &k2), &l), (e.evaluate(&k, &l) + e.evaluate(&k2, &l)) % n);
            prop_assert_eq!((e.evaluate(&k, &l) + e.evaluate(&l, &k)) % n, 0);
        }
    }
}
