//! One line per acceptance criterion, each checked against an oracle that
//! does not go through the library's subgroup enumeration.

use std::collections::{BTreeSet, HashSet};
use std::time::Instant;

use heisenberg_lab::abelian::{FiniteAbelianGroup, GroupElement, Subgroup};
use heisenberg_lab::bicharacter::Bicharacter;
use heisenberg_lab::canonical_rep::{build_representation, CanonicalRep};
use heisenberg_lab::darboux::{classify, random_alternating, random_nondegenerate, standard_form, verify_classification};
use heisenberg_lab::heisenberg_model::Cocycle;
use heisenberg_lab::inductive_classifier::direct_search;
use heisenberg_lab::intertwiner::{intertwiner, DEFAULT_TOLERANCE};
use heisenberg_lab::monomial::MonomialMatrix;
use heisenberg_lab::selftest::{self, CLASSIFY_SUITE, NON_SQUARE_SUITE, REP_SUITE};
use heisenberg_lab::Error;
use num_complex::Complex;

fn group(f: &[i64]) -> FiniteAbelianGroup {
    FiniteAbelianGroup::new(f.to_vec()).unwrap()
}

/// Elements of `K` in index order with an addition table.
struct Table {
    elems: Vec<GroupElement>,
    add: Vec<Vec<usize>>,
}

impl Table {
    fn new(k: &FiniteAbelianGroup) -> Self {
        let elems: Vec<GroupElement> = k.elements().collect();
        let idx = |x: &GroupElement| elems.iter().position(|y| y == x).unwrap();
        let add = elems
            .iter()
            .map(|a| elems.iter().map(|b| {
                let s: Vec<i64> = a.0.iter().zip(&b.0).zip(k.factors()).map(|((x, y), d)| (x + y) % d).collect();
                idx(&GroupElement(s))
            }).collect())
            .collect();
        Table { elems, add }
    }

    fn closure(&self, mut set: u64) -> u64 {
        loop {
            let mut next = set;
            for a in bits(set) {
                for b in bits(set) {
                    next |= 1 << self.add[a][b];
                }
            }
            if next == set {
                return set;
            }
            set = next;
        }
    }

    /// All subgroups as element bitmasks, by closing under one more element at a time.
    fn subgroups(&self) -> Vec<u64> {
        let mut seen: HashSet<u64> = HashSet::from([1]);
        let mut frontier = vec![1u64];
        while let Some(s) = frontier.pop() {
            for g in 0..self.elems.len() {
                if s & (1 << g) == 0 {
                    let t = self.closure(s | (1 << g));
                    if seen.insert(t) {
                        frontier.push(t);
                    }
                }
            }
        }
        let mut out: Vec<u64> = seen.into_iter().collect();
        out.sort();
        out
    }

    fn mask(&self, m: &Subgroup) -> u64 {
        m.elements().iter().map(|x| 1u64 << self.elems.iter().position(|y| y == x).unwrap()).fold(0, |a, b| a | b)
    }
}

fn bits(m: u64) -> impl Iterator<Item = usize> {
    (0..64).filter(move |i| m & (1 << i) != 0)
}

/// `e` on `K` evaluated from the raw exponent matrix.
fn form_value(e: &Bicharacter, a: &GroupElement, b: &GroupElement) -> i64 {
    let n = e.root_order();
    let q = e.q();
    let mut s = 0i64;
    for i in 0..a.0.len() {
        for j in 0..b.0.len() {
            s = (s + q[i][j] * a.0[i] % n * b.0[j]) % n;
        }
    }
    s
}

fn isotropic(t: &Table, e: &Bicharacter, m: u64) -> bool {
    bits(m).all(|a| bits(m).all(|b| form_value(e, &t.elems[a], &t.elems[b]) == 0))
}

fn perp(t: &Table, e: &Bicharacter, m: u64) -> u64 {
    (0..t.elems.len())
        .filter(|&k| bits(m).all(|a| form_value(e, &t.elems[k], &t.elems[a]) == 0))
        .fold(0, |acc, k| acc | (1 << k))
}

/// The standard form on `A × Â` with interleaved coordinates, written out directly.
fn standard_value(a: &[i64], u: &GroupElement, v: &GroupElement) -> i64 {
    let n = a[0];
    let mut s = 0;
    for (i, &d) in a.iter().enumerate() {
        s += (n / d) * (v.0[2 * i + 1] * u.0[2 * i] - u.0[2 * i + 1] * v.0[2 * i]);
    }
    s.rem_euclid(n)
}

struct Line {
    id: u8,
    title: &'static str,
    pass: bool,
    detail: String,
    seconds: f64,
}

fn criterion(id: u8, title: &'static str, budget: f64, f: impl FnOnce() -> (bool, String)) -> Line {
    let start = Instant::now();
    let (pass, detail) = f();
    let seconds = start.elapsed().as_secs_f64();
    Line { id, title, pass: pass && seconds < budget, detail, seconds }
}

fn main_theorem() -> (bool, String) {
    let mut ok = selftest::run_criterion(1).pass;
    let mut parts = Vec::new();
    for (seed, a) in REP_SUITE.iter().enumerate() {
        let (e, c) = selftest::scrambled_model(a, seed as u64).unwrap();
        let r = selftest::first_rep(&c, 4096).unwrap();
        let t = Table::new(e.group());
        let mats: Vec<&MonomialMatrix> = t.elems.iter().map(|l| r.rho_section(l)).collect();
        let products_stay_in_span = |s: u64| {
            bits(s).all(|x| bits(s).all(|y| {
                let p = mats[x].mul(mats[y]);
                bits(s).any(|z| p.ratio(mats[z]).is_some())
            }))
        };
        let commutative = |s: u64| bits(s).all(|x| bits(s).all(|y| mats[x].commutes_with(mats[y])));
        let good: Vec<u64> = t.subgroups().into_iter().filter(|&s| commutative(s) && products_stay_in_span(s)).collect();
        let maximal: BTreeSet<u64> = good.iter().copied().filter(|&s| !good.iter().any(|&u| u != s && u & s == s)).collect();
        let lagrangian: BTreeSet<u64> = e.lagrangians(4096).unwrap().iter().map(|m| t.mask(m)).collect();
        let direct: BTreeSet<u64> = direct_search(&r, 4096).unwrap().iter().map(|m| t.mask(m)).collect();
        ok &= maximal == lagrangian && direct == lagrangian;
        parts.push(format!("{}: {}", e.group(), maximal.len()));
    }
    (ok, parts.join(", "))
}

fn lemma() -> (bool, String) {
    let mut ok = selftest::run_criterion(2).pass;
    let mut checked = 0;
    for (seed, a) in REP_SUITE.iter().enumerate() {
        let (e, c) = selftest::scrambled_model(a, seed as u64).unwrap();
        let r = selftest::first_rep(&c, 4096).unwrap();
        let k = e.group();
        let scale = r.phase_order() / e.root_order();
        let gens: Vec<GroupElement> = (0..k.rank()).map(|i| k.basis_element(i)).collect();
        let mut signatures = HashSet::new();
        for l in k.elements() {
            let t = r.rho_section(&l);
            let mut sig = Vec::new();
            for g in &gens {
                let u = r.rho_section(g);
                let conj = u.mul(t).mul(&u.inverse());
                let expected = (scale * form_value(&e, g, &l)).rem_euclid(r.phase_order());
                ok &= conj.ratio(t) == Some(expected);
                sig.push(expected);
            }
            signatures.insert(sig);
            checked += 1;
        }
        ok &= signatures.len() as u64 == k.order();
    }
    (ok, format!("{checked} eigenvectors, characters pairwise distinct"))
}

fn round_trip() -> (bool, String) {
    let mut ok = selftest::run_criterion(3).pass;
    let mut slowest = 0.0f64;
    let mut exhaustive = 0;
    for seed in 0..100u64 {
        let factors = CLASSIFY_SUITE[seed as usize % CLASSIFY_SUITE.len()];
        let e = random_nondegenerate(&group(factors), seed);
        let start = Instant::now();
        let t = classify(&e).unwrap();
        ok &= verify_classification(&e, &t).is_ok();
        slowest = slowest.max(start.elapsed().as_secs_f64());
        ok &= t.a.factors() == factors;
        let src = t.a.with_dual();
        if src.order() <= 256 {
            let all: Vec<GroupElement> = src.elements().collect();
            for u in &all {
                for v in &all {
                    ok &= form_value(&e, &t.phi.apply(u), &t.phi.apply(v)) == standard_value(factors, u, v);
                }
            }
            exhaustive += 1;
        }
    }
    let mut rejected = 0;
    for (i, f) in NON_SQUARE_SUITE.iter().enumerate() {
        for seed in 0..10u64 {
            let e = random_alternating(&group(f), 100 * i as u64 + seed);
            let k = e.group();
            let gens: Vec<GroupElement> = (0..k.rank()).map(|j| k.basis_element(j)).collect();
            let radical = k.elements().filter(|x| gens.iter().all(|g| form_value(&e, x, g) == 0)).count();
            ok &= radical > 1;
            if matches!(classify(&e), Err(Error::Degenerate { radical_order }) if radical_order as usize == radical) {
                rejected += 1;
            }
        }
    }
    ok &= rejected == 10 * NON_SQUARE_SUITE.len();
    ok &= slowest <= 0.05;
    (ok, format!("slowest {:.2} ms, {exhaustive} checked on all pairs, {rejected} degenerate rejected", slowest * 1e3))
}

fn maximal_isotropic() -> (bool, String) {
    let mut ok = selftest::run_criterion(4).pass;
    let mut scanned = 0;
    for (seed, a) in REP_SUITE.iter().enumerate() {
        let e = random_nondegenerate(&group(a), seed as u64);
        let t = Table::new(e.group());
        let subs = t.subgroups();
        let iso: Vec<u64> = subs.iter().copied().filter(|&m| isotropic(&t, &e, m)).collect();
        for &m in &subs {
            let direct = iso.contains(&m) && !iso.iter().any(|&u| u != m && u & m == m);
            let elems: Vec<GroupElement> = bits(m).map(|i| t.elems[i].clone()).collect();
            let sub = Subgroup::from_elements(e.group(), &elems);
            ok &= e.is_maximal_isotropic(&sub).unwrap() == direct;
            if direct {
                ok &= (m.count_ones() as u64).pow(2) == e.group().order();
            }
            scanned += 1;
        }
    }
    (ok, format!("{scanned} subgroups"))
}

fn dense(m: &MonomialMatrix) -> Vec<Vec<Complex<f64>>> {
    let tau = std::f64::consts::TAU;
    (0..m.dim)
        .map(|r| {
            (0..m.dim)
                .map(|c| m.entry(r, c).map_or(Complex::new(0.0, 0.0), |p| Complex::from_polar(1.0, tau * p as f64 / m.order as f64)))
                .collect()
        })
        .collect()
}

fn matmul(a: &[Vec<Complex<f64>>], b: &[Vec<Complex<f64>>]) -> Vec<Vec<Complex<f64>>> {
    let n = a.len();
    (0..n).map(|i| (0..n).map(|j| (0..n).map(|k| a[i][k] * b[k][j]).sum()).collect()).collect()
}

fn stone_von_neumann() -> (bool, String) {
    let mut ok = selftest::run_criterion(5).pass;
    let mut worst = 0.0f64;
    let mut pairs = 0;
    for a in [&[2][..], &[3], &[4]] {
        let c = Cocycle::standard(&group(a));
        let e = c.commutator_form();
        let reps: Vec<CanonicalRep> = e
            .lagrangians(4096)
            .unwrap()
            .iter()
            .map(|m| build_representation(&c, m, &c.lift_isotropic_character(m).unwrap()).unwrap())
            .collect();
        for r1 in &reps {
            let outside = c.group().elements().find(|k| !r1.subgroup().contains(k)).unwrap();
            let twisted = build_representation(&c, r1.subgroup(), &r1.character().twisted_by(&e, &outside)).unwrap();
            for r2 in reps.iter().chain(std::iter::once(&twisted)) {
                let out = intertwiner::<f64>(r1, r2, DEFAULT_TOLERANCE, 11).unwrap();
                ok &= out.solution_dimension == 1;
                for k in c.group().elements() {
                    let lhs = matmul(&out.matrix, &dense(r1.rho_section(&k)));
                    let rhs = matmul(&dense(r2.rho_section(&k)), &out.matrix);
                    for (x, y) in lhs.iter().flatten().zip(rhs.iter().flatten()) {
                        worst = worst.max((x - y).norm());
                    }
                }
                let d = out.matrix.len();
                let adjoint: Vec<Vec<Complex<f64>>> = (0..d).map(|i| (0..d).map(|j| out.matrix[j][i].conj()).collect()).collect();
                let uu = matmul(&out.matrix, &adjoint);
                for (i, row) in uu.iter().enumerate() {
                    for (j, v) in row.iter().enumerate() {
                        worst = worst.max((v - Complex::new(if i == j { 1.0 } else { 0.0 }, 0.0)).norm());
                    }
                }
                pairs += 1;
            }
        }
    }
    ok &= worst <= DEFAULT_TOLERANCE;
    (ok, format!("{pairs} pairs on all of K, max residual {worst:.1e}"))
}

fn counts() -> (bool, String) {
    let mut ok = selftest::run_criterion(6).pass;
    let cases: [(&str, &[i64], usize); 5] =
        [("(Z/2)^2", &[2], 3), ("(Z/3)^2", &[3], 4), ("(Z/5)^2", &[5], 6), ("(Z/4)^2", &[4], 7), ("(Z/2)^4", &[2, 2], 15)];
    let mut parts = Vec::new();
    for (name, a, expected) in cases {
        let e = standard_form(&group(a));
        let t = Table::new(e.group());
        for x in &t.elems {
            for y in &t.elems {
                ok &= form_value(&e, x, y) == standard_value(a, x, y);
            }
        }
        let found = t.subgroups().into_iter().filter(|&m| isotropic(&t, &e, m) && perp(&t, &e, m) == m).count();
        ok &= found == expected;
        parts.push(format!("{name}: {found}"));
    }
    (ok, parts.join(", "))
}

fn exactness() -> (bool, String) {
    let mut ok = selftest::run_criterion(7).pass;
    let dir = std::path::Path::new(env!("CARGO_MANIFEST_DIR")).join("src");
    let modules = [
        "abelian", "bicharacter", "canonical_rep", "cyclotomic", "darboux",
        "heisenberg_model", "inductive_classifier", "monomial", "snf",
    ];
    let mut hits = Vec::new();
    for m in modules {
        let src = std::fs::read_to_string(dir.join(format!("{m}.rs"))).unwrap();
        for (n, line) in src.lines().enumerate() {
            let words: Vec<&str> = line.split(|c: char| !(c.is_ascii_alphanumeric() || c == '_')).collect();
            if words.iter().any(|w| ["f32", "f64", "Float", "RealScalar", "intertwiner"].contains(w)) {
                hits.push(format!("{m}:{}", n + 1));
            }
        }
    }
    ok &= hits.is_empty();
    let detail = if hits.is_empty() { format!("{} modules clean", modules.len()) } else { hits.join(" ") };
    (ok, detail)
}

fn main() {
    let lines = [
        criterion(1, "maximal inductive algebras are exactly the A(M)", 60.0, main_theorem),
        criterion(2, "multiplicity-free kappa eigenspaces", 10.0, lemma),
        criterion(3, "classification round trip", 60.0, round_trip),
        criterion(4, "maximal isotropic iff M equals its complement", 60.0, maximal_isotropic),
        criterion(5, "intertwiners are unique and unitary", 30.0, stone_von_neumann),
        criterion(6, "maximal isotropic subgroup counts", 60.0, counts),
        criterion(7, "exact arithmetic in the algebraic modules", 60.0, exactness),
    ];
    for l in &lines {
        println!("criterion {} {}: {} ({}; {:.2} s)", l.id, if l.pass { "PASS" } else { "FAIL" }, l.title, l.detail, l.seconds);
    }
    if lines.iter().any(|l| !l.pass) {
        std::process::exit(1);
    }
}
