//! The acceptance suite, runnable from the CLI and from the test harness.

use std::time::Instant;

use serde::Serialize;

use crate::abelian::{enumerate_subgroups, FiniteAbelianGroup, Subgroup, DEFAULT_ENUMERATION_LIMIT};
use crate::bicharacter::Bicharacter;
use crate::canonical_rep::{build_representation, CanonicalRep};
use crate::darboux::{classify, random_alternating, random_nondegenerate, standard_form, verify_classification};
use crate::error::{Error, Result};
use crate::heisenberg_model::Cocycle;
use crate::inductive_classifier::{eigenspace_decomposition, verify_main_theorem};
use crate::intertwiner::{uniqueness_report, DEFAULT_TOLERANCE};

/// `A` for the representation-theoretic criteria; `K = A × Â` has order at most 64.
pub const REP_SUITE: [&[i64]; 7] = [&[2], &[3], &[4], &[2, 2], &[5], &[6], &[4, 2]];

/// `A` for the classification round trip; `|A × Â| ≤ 4096`.
pub const CLASSIFY_SUITE: [&[i64]; 14] = [
    &[2], &[3], &[4], &[2, 2], &[6], &[8], &[4, 2], &[9], &[12],
    &[8, 8], &[16, 4], &[4, 4, 4], &[30, 2], &[2, 2, 2, 2, 2, 2],
];

/// Groups of non-square order, so every alternating form on them is degenerate.
pub const NON_SQUARE_SUITE: [&[i64]; 6] = [&[2], &[4, 2], &[2, 2, 2], &[8, 4, 2], &[6, 3], &[12, 2, 2]];

#[derive(Clone, Debug, Serialize)]
pub struct CriterionResult {
    pub id: u8,
    pub title: &'static str,
    pub pass: bool,
    pub detail: String,
    #[serde(skip)]
    pub seconds: f64,
}

fn group(f: &[i64]) -> FiniteAbelianGroup {
    FiniteAbelianGroup::new(f.to_vec()).expect("suite groups are in invariant-factor order")
}

/// The standard model of a scrambled instance, with its form.
pub fn scrambled_model(a: &[i64], seed: u64) -> Result<(Bicharacter, Cocycle)> {
    let e = random_nondegenerate(&group(a), seed);
    let t = classify(&e)?;
    Ok((e, Cocycle::standard_model(&t)?))
}

pub fn first_rep(c: &Cocycle, limit: u64) -> Result<CanonicalRep> {
    let e = c.commutator_form();
    let m = e.lagrangians(limit)?.into_iter().next().expect("a nondegenerate form has a Lagrangian");
    let chi = c.lift_isotropic_character(&m)?;
    build_representation(c, &m, &chi)
}

pub fn criterion_main_theorem() -> Result<(bool, String)> {
    let mut lines = Vec::new();
    let mut ok = true;
    for (seed, a) in REP_SUITE.iter().enumerate() {
        let (_, c) = scrambled_model(a, seed as u64)?;
        let r = first_rep(&c, DEFAULT_ENUMERATION_LIMIT)?;
        let report = verify_main_theorem(&r, DEFAULT_ENUMERATION_LIMIT)?;
        ok &= report.pass;
        lines.push(format!("{}: {} algebras {}", report.group, report.algebras.len(), if report.pass { "ok" } else { "FAIL" }));
    }
    Ok((ok, lines.join("; ")))
}

pub fn criterion_lemma() -> Result<(bool, String)> {
    let mut lines = Vec::new();
    let mut ok = true;
    for (seed, a) in REP_SUITE.iter().enumerate() {
        let (e, c) = scrambled_model(a, seed as u64)?;
        let r = first_rep(&c, DEFAULT_ENUMERATION_LIMIT)?;
        let dec = eigenspace_decomposition(&r)?;
        let span = r.spanning_dimension();
        let this = dec.is_complete() && dec.spaces.len() as u64 == e.group().order() && span as u64 == e.group().order();
        ok &= this;
        lines.push(format!("{}: {} eigenspaces, span {}", e.group(), dec.spaces.len(), span));
    }
    Ok((ok, lines.join("; ")))
}

pub fn criterion_round_trip() -> Result<(bool, String)> {
    let mut ok = true;
    let mut worst = 0.0f64;
    for seed in 0..100u64 {
        let a = group(CLASSIFY_SUITE[seed as usize % CLASSIFY_SUITE.len()]);
        let e = random_nondegenerate(&a, seed);
        let start = Instant::now();
        let t = classify(&e);
        let verified = t.as_ref().map(|t| t.a == a && verify_classification(&e, t).is_ok()).unwrap_or(false);
        worst = worst.max(start.elapsed().as_secs_f64());
        ok &= verified;
    }
    let mut rejected = 0;
    for (i, f) in NON_SQUARE_SUITE.iter().enumerate() {
        for seed in 0..10u64 {
            if matches!(classify(&random_alternating(&group(f), 100 * i as u64 + seed)), Err(Error::Degenerate { .. })) {
                rejected += 1;
            }
        }
    }
    ok &= rejected == 10 * NON_SQUARE_SUITE.len();
    ok &= worst <= 0.05;
    let timing = if worst <= 0.05 { "all within 50 ms".to_string() } else { format!("slowest {:.1} ms", worst * 1e3) };
    Ok((ok, format!("100 instances, {timing}; {rejected} degenerate inputs rejected")))
}

pub fn criterion_maximal_isotropic() -> Result<(bool, String)> {
    let mut ok = true;
    let mut scanned = 0;
    for (seed, a) in REP_SUITE.iter().enumerate() {
        let e = random_nondegenerate(&group(a), seed as u64);
        let subs = enumerate_subgroups(e.group(), DEFAULT_ENUMERATION_LIMIT)?;
        let iso: Vec<&Subgroup> = subs.iter().filter(|m| e.is_isotropic(m)).collect();
        for m in &subs {
            let criterion = e.is_maximal_isotropic(m)?;
            let direct = e.is_isotropic(m) && !iso.iter().any(|t| t.order() > m.order() && m.is_subgroup_of(t));
            ok &= criterion == direct;
            if criterion {
                ok &= m.order() * m.order() == e.group().order();
            }
            scanned += 1;
        }
    }
    Ok((ok, format!("{scanned} subgroups scanned")))
}

pub fn criterion_stone_von_neumann() -> Result<(bool, String)> {
    let mut ok = true;
    let mut worst = 0.0f64;
    let mut pairs = 0;
    for a in [&[2][..], &[3], &[4]] {
        let report = uniqueness_report(&Cocycle::standard(&group(a)), DEFAULT_ENUMERATION_LIMIT, DEFAULT_TOLERANCE, 0)?;
        ok &= report.pass;
        worst = worst.max(report.max_residual);
        pairs += report.pairs.len();
    }
    Ok((ok, format!("{pairs} pairs, max residual {worst:.1e}")))
}

pub fn lagrangian_count(e: &Bicharacter) -> Result<usize> {
    Ok(e.lagrangians(DEFAULT_ENUMERATION_LIMIT)?.len())
}

pub fn criterion_counts() -> Result<(bool, String)> {
    let mut cases: Vec<(String, Bicharacter, usize)> = [2, 3, 5]
        .iter()
        .map(|&p| (format!("(Z/{p})^2"), standard_form(&group(&[p])), p as usize + 1))
        .collect();
    cases.push(("(Z/4)^2".into(), standard_form(&group(&[4])), 7));
    cases.push(("(Z/2)^4".into(), standard_form(&group(&[2, 2])), 15));
    let mut ok = true;
    let mut parts = Vec::new();
    for (name, e, expected) in &cases {
        let found = lagrangian_count(e)?;
        ok &= found == *expected;
        parts.push(format!("{name}: {found}"));
    }
    Ok((ok, parts.join(", ")))
}

/// Source of the modules that criteria 1–4 and 6 run through.
pub const EXACT_MODULES: [(&str, &str); 9] = [
    ("abelian", include_str!("abelian.rs")),
    ("bicharacter", include_str!("bicharacter.rs")),
    ("canonical_rep", include_str!("canonical_rep.rs")),
    ("cyclotomic", include_str!("cyclotomic.rs")),
    ("darboux", include_str!("darboux.rs")),
    ("heisenberg_model", include_str!("heisenberg_model.rs")),
    ("inductive_classifier", include_str!("inductive_classifier.rs")),
    ("monomial", include_str!("monomial.rs")),
    ("snf", include_str!("snf.rs")),
];

/// Names of floating types or traits appearing as whole tokens in `src`.
pub fn float_tokens(src: &str) -> Vec<String> {
    let mut out = Vec::new();
    for (n, line) in src.lines().enumerate() {
        for token in line.split(|c: char| !(c.is_alphanumeric() || c == '_')) {
            if matches!(token, "f32" | "f64" | "Float") {
                out.push(format!("line {}: {token}", n + 1));
            }
        }
    }
    out
}

pub fn criterion_exactness() -> Result<(bool, String)> {
    let hits: Vec<String> = EXACT_MODULES
        .iter()
        .flat_map(|(name, src)| float_tokens(src).into_iter().map(move |h| format!("{name} {h}")))
        .collect();
    if hits.is_empty() {
        Ok((true, format!("{} modules free of floating types", EXACT_MODULES.len())))
    } else {
        Ok((false, hits.join(", ")))
    }
}

pub const CRITERIA: [(u8, &str, f64); 7] = [
    (1, "main theorem: direct search equals {A(M)}", 60.0),
    (2, "multiplicity-free eigenspace decomposition", 10.0),
    (3, "classification round trip", f64::INFINITY),
    (4, "maximal isotropic criterion", f64::INFINITY),
    (5, "Stone-von Neumann intertwiners", 30.0),
    (6, "maximal isotropic counts", f64::INFINITY),
    (7, "exactness audit", f64::INFINITY),
];

pub fn run_criterion(id: u8) -> CriterionResult {
    let (_, title, budget) = CRITERIA[(id - 1) as usize];
    let start = Instant::now();
    let outcome = match id {
        1 => criterion_main_theorem(),
        2 => criterion_lemma(),
        3 => criterion_round_trip(),
        4 => criterion_maximal_isotropic(),
        5 => criterion_stone_von_neumann(),
        6 => criterion_counts(),
        _ => criterion_exactness(),
    };
    let seconds = start.elapsed().as_secs_f64();
    let (pass, detail) = match outcome {
        Ok((pass, detail)) => (pass && seconds < budget, detail),
        Err(err) => (false, format!("error: {err}")),
    };
    let detail = if seconds >= budget { format!("{detail}; over the {budget} s budget") } else { detail };
    CriterionResult { id, title, pass, detail, seconds }
}

pub fn run_all() -> Vec<CriterionResult> {
    (1..=7).map(run_criterion).collect()
}

