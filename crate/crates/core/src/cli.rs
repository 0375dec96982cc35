//! Command-line front end.

use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::{json, Value};

use crate::abelian::{enumerate_subgroups, FiniteAbelianGroup, Subgroup};
use crate::bicharacter::Bicharacter;
use crate::canonical_rep::{build_representation, CanonicalRep};
use crate::darboux::classify;
use crate::error::Error;
use crate::heisenberg_model::{Cocycle, HeisenbergElement};
use crate::inductive_classifier::{eigenspace_decomposition, verify_main_theorem};
use crate::intertwiner::{intertwiner, unitarity_defect, uniqueness_report, DEFAULT_TOLERANCE};
use crate::io::{dense_json, load_spec, parse_subgroup, subgroup_json, Certificate, GroupSpec};
use crate::monomial::MonomialMatrix;
use crate::selftest;

pub const THREADS_VAR: &str = "HEISENBERG_LAB_THREADS";

#[derive(Debug, Parser)]
#[command(name = "heisenberg-lab", version, about = "Exact computations with finite Heisenberg groups")]
struct Cli {
    /// Machine-readable output.
    #[arg(long, global = true)]
    json: bool,
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// Largest group order that will be enumerated.
    #[arg(long, global = true, default_value_t = 4096)]
    max_order: u64,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Bring a bicharacter to standard form and emit a certificate.
    Classify {
        spec: PathBuf,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// List isotropic subgroups.
    Isotropic {
        spec: PathBuf,
        /// Only subgroups with M = M⊥.
        #[arg(long)]
        maximal: bool,
    },
    /// Build the canonical representation on a maximal isotropic subgroup.
    Rep {
        spec: PathBuf,
        /// Index into the list printed by `isotropic --maximal`, or a JSON list of generators.
        #[arg(long, default_value = "0")]
        subgroup: String,
        /// Print every section matrix rather than the generators.
        #[arg(long)]
        all: bool,
    },
    /// Unitary intertwiner between the representations on two subgroups.
    Intertwine {
        spec: PathBuf,
        #[arg(long)]
        from: String,
        #[arg(long)]
        to: String,
    },
    /// Check a theorem on the given spec, or replay a certificate.
    Verify {
        #[arg(required_unless_present = "replay")]
        spec: Option<PathBuf>,
        #[arg(long, value_enum, required_unless_present = "replay", conflicts_with = "replay")]
        theorem: Option<Theorem>,
        #[arg(long)]
        replay: Option<PathBuf>,
        #[arg(long, default_value = "0")]
        subgroup: String,
    },
    /// Run the acceptance suite.
    Selftest,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Theorem {
    Main,
    Lemma,
    Svn,
}

/// How a run ended.
enum Failure {
    Verification(String),
    Input(String),
}

impl From<Error> for Failure {
    fn from(err: Error) -> Self {
        match err {
            Error::Degenerate { .. }
            | Error::InvariantViolation(_)
            | Error::NotAutomorphism(_)
            | Error::ZeroProjection { .. }
            | Error::SolutionSpaceNotOneDimensional(_) => Failure::Verification(err.to_string()),
            _ => Failure::Input(err.to_string()),
        }
    }
}

type Outcome = std::result::Result<(), Failure>;

struct Ctx {
    json: bool,
    seed: u64,
    limit: u64,
    out: Vec<u8>,
}

impl Ctx {
    fn emit(&mut self, v: &impl Serialize) {
        let text = serde_json::to_string_pretty(v).expect("serializable");
        let _ = writeln!(self.out, "{text}");
    }

    fn line(&mut self, s: impl AsRef<str>) {
        let _ = writeln!(self.out, "{}", s.as_ref());
    }
}

/// Parses `args` (including the program name) and runs the command. Exit
/// codes: 0 success, 1 verification failure, 2 input error.
pub fn run_command<I, S>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = S>,
    S: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let text = e.render().to_string();
            let _ = if code == 0 { write!(out, "{text}") } else { write!(err, "{text}") };
            return code;
        }
    };
    let threads = std::env::var(THREADS_VAR).ok().and_then(|v| v.parse::<usize>().ok()).unwrap_or(0);
    let pool = match rayon::ThreadPoolBuilder::new().num_threads(threads).build() {
        Ok(p) => p,
        Err(e) => {
            let _ = writeln!(err, "error: thread pool: {e}");
            return 2;
        }
    };
    let mut ctx = Ctx { json: cli.json, seed: cli.seed, limit: cli.max_order, out: Vec::new() };
    let result = pool.install(|| dispatch(&cli.command, &mut ctx));
    let _ = out.write_all(&ctx.out);
    match result {
        Ok(()) => 0,
        Err(Failure::Verification(msg)) => {
            let _ = writeln!(err, "verification failed: {msg}");
            1
        }
        Err(Failure::Input(msg)) => {
            let _ = writeln!(err, "error: {msg}");
            2
        }
    }
}

fn dispatch(cmd: &Command, ctx: &mut Ctx) -> Outcome {
    match cmd {
        Command::Classify { spec, output } => cmd_classify(ctx, spec, output.as_deref()),
        Command::Isotropic { spec, maximal } => cmd_isotropic(ctx, spec, *maximal),
        Command::Rep { spec, subgroup, all } => cmd_rep(ctx, spec, subgroup, *all),
        Command::Intertwine { spec, from, to } => cmd_intertwine(ctx, spec, from, to),
        Command::Verify { replay: Some(cert), .. } => cmd_replay(ctx, cert),
        Command::Verify { spec: Some(spec), theorem: Some(t), subgroup, .. } => cmd_verify(ctx, spec, *t, subgroup),
        Command::Verify { .. } => Err(Failure::Input("verify needs a spec and --theorem, or --replay".into())),
        Command::Selftest => cmd_selftest(ctx),
    }
}

fn matrix_rows(m: &[Vec<i64>]) -> String {
    m.iter().map(|r| format!("  {r:?}")).collect::<Vec<_>>().join("\n")
}

fn cmd_classify(ctx: &mut Ctx, spec: &Path, output: Option<&Path>) -> Outcome {
    let (_, e) = load_spec(spec)?;
    let t = classify(&e)?;
    let cert = Certificate::new(&e, &t);
    if let Some(path) = output {
        let text = serde_json::to_string_pretty(&cert).expect("serializable");
        std::fs::write(path, text + "\n").map_err(|err| Failure::Input(format!("{}: {err}", path.display())))?;
    }
    if ctx.json {
        ctx.emit(&cert);
    } else {
        ctx.line(format!("K = {}", e.group()));
        ctx.line(format!("A = {}", t.a));
        ctx.line("phi (columns x_1, chi_1, x_2, chi_2, ...):");
        ctx.line(matrix_rows(t.phi.matrix()));
        ctx.line(format!("{} reduction steps", t.op_log.len()));
        if let Some(path) = output {
            ctx.line(format!("certificate written to {}", path.display()));
        }
    }
    Ok(())
}

fn cmd_isotropic(ctx: &mut Ctx, spec: &Path, maximal: bool) -> Outcome {
    let (k, e) = load_spec(spec)?;
    let mut rows = Vec::new();
    for m in enumerate_subgroups(&k, ctx.limit)? {
        if !e.is_isotropic(&m) {
            continue;
        }
        let is_max = e.perp(&m) == m;
        if maximal && !is_max {
            continue;
        }
        rows.push((m, is_max));
    }
    if ctx.json {
        let list: Vec<Value> = rows
            .iter()
            .enumerate()
            .map(|(i, (m, is_max))| json!({ "index": i, "order": m.order(), "maximal": is_max, "basis": m.basis() }))
            .collect();
        ctx.emit(&json!({ "group": GroupSpec::canonical(&e), "order": k.order(), "count": rows.len(), "subgroups": list }));
    } else {
        ctx.line(format!("K = {}, |K| = {}", k, k.order()));
        ctx.line(format!("{:>5}  {:>6}  {:>7}  generators", "index", "order", "maximal"));
        for (i, (m, is_max)) in rows.iter().enumerate() {
            ctx.line(format!("{i:>5}  {:>6}  {:>7}  {m}", m.order(), if *is_max { "yes" } else { "no" }));
        }
        ctx.line(format!("{} subgroups", rows.len()));
    }
    Ok(())
}

/// The standard model on `K` obtained from the classification of `e`.
fn model_for(e: &Bicharacter) -> std::result::Result<Cocycle, Failure> {
    Ok(Cocycle::standard_model(&classify(e)?)?)
}

fn select_subgroup(e: &Bicharacter, selector: &str, limit: u64) -> std::result::Result<Subgroup, Failure> {
    if let Ok(index) = selector.trim().parse::<usize>() {
        let mut list = e.lagrangians(limit)?;
        if index >= list.len() {
            return Err(Failure::Input(format!("subgroup index {index} out of range ({} maximal isotropic)", list.len())));
        }
        return Ok(list.swap_remove(index));
    }
    let m = parse_subgroup(e.group(), selector)?;
    if !e.is_isotropic(&m) {
        return Err(Error::NotIsotropic(m.to_string()).into());
    }
    if e.perp(&m) != m {
        return Err(Error::NotMaximalIsotropic(m.to_string()).into());
    }
    Ok(m)
}

fn rep_for(c: &Cocycle, e: &Bicharacter, selector: &str, limit: u64) -> std::result::Result<CanonicalRep, Failure> {
    let m = select_subgroup(e, selector, limit)?;
    let chi = c.lift_isotropic_character(&m)?;
    Ok(build_representation(c, &m, &chi)?)
}

fn monomial_text(m: &MonomialMatrix) -> String {
    if m.dim > 12 {
        return format!("  perm {:?}\n  phase {:?}", m.perm, m.phase);
    }
    (0..m.dim)
        .map(|r| {
            let cells: Vec<String> = (0..m.dim)
                .map(|c| match m.entry(r, c) {
                    None => ".".to_string(),
                    Some(0) => "1".to_string(),
                    Some(p) => format!("z^{p}"),
                })
                .collect();
            format!("  {}", cells.iter().map(|s| format!("{s:>5}")).collect::<String>())
        })
        .collect::<Vec<_>>()
        .join("\n")
}

fn cmd_rep(ctx: &mut Ctx, spec: &Path, selector: &str, all: bool) -> Outcome {
    let (k, e) = load_spec(spec)?;
    let c = model_for(&e)?;
    let r = rep_for(&c, &e, selector, ctx.limit)?;
    let homomorphism = r.verify_homomorphism(256, ctx.seed);
    let labels: Vec<_> = if all { k.elements().collect() } else { (0..k.rank()).map(|i| k.basis_element(i)).collect() };
    if ctx.json {
        let mats: Vec<Value> = labels
            .iter()
            .map(|l| json!({ "element": HeisenbergElement { z: 0, k: l.clone() }, "matrix": r.rho_section(l) }))
            .collect();
        ctx.emit(&json!({
            "group": GroupSpec::canonical(&e),
            "cocycle": c.matrix(),
            "subgroup": subgroup_json(r.subgroup()),
            "lambda": r.character().lambda_generators(),
            "dim": r.dim(),
            "phase_order": r.phase_order(),
            "transversal": r.transversal(),
            "matrices": mats,
            "homomorphism": homomorphism.is_ok(),
        }));
    } else {
        ctx.line(format!("K = {}, M = {}", k, r.subgroup()));
        ctx.line(format!("dim = {}, entries are powers of z = exp(2 pi i / {})", r.dim(), r.phase_order()));
        ctx.line(format!("transversal: {}", r.transversal().iter().map(|t| t.to_string()).collect::<Vec<_>>().join(" ")));
        for l in &labels {
            ctx.line(format!("rho(0, {l}):"));
            ctx.line(monomial_text(r.rho_section(l)));
        }
        ctx.line(format!("homomorphism check: {}", if homomorphism.is_ok() { "ok" } else { "FAILED" }));
    }
    homomorphism.map_err(|w| Failure::Verification(format!("rho fails on ({}, {}) x ({}, {})", w.g.z, w.g.k, w.h.z, w.h.k)))
}

fn cmd_intertwine(ctx: &mut Ctx, spec: &Path, from: &str, to: &str) -> Outcome {
    let (_, e) = load_spec(spec)?;
    let c = model_for(&e)?;
    let r1 = rep_for(&c, &e, from, ctx.limit)?;
    let r2 = rep_for(&c, &e, to, ctx.limit)?;
    let out = intertwiner::<f64>(&r1, &r2, DEFAULT_TOLERANCE, ctx.seed)?;
    let defect = unitarity_defect(&out.matrix);
    if ctx.json {
        ctx.emit(&json!({
            "from": subgroup_json(r1.subgroup()),
            "to": subgroup_json(r2.subgroup()),
            "dim": r1.dim(),
            "solution_dimension": out.solution_dimension,
            "residual": out.residual,
            "unitarity_defect": defect,
            "attempts": out.attempts,
            "matrix": dense_json(&out.matrix),
        }));
    } else {
        ctx.line(format!("M1 = {}, M2 = {}", r1.subgroup(), r2.subgroup()));
        ctx.line(format!("solution dimension {}, residual {:.3e}, unitarity defect {:.3e}", out.solution_dimension, out.residual, defect));
        for row in &out.matrix {
            let cells: Vec<String> = row.iter().map(|z| format!("{:>9.5}{:+.5}i", tidy(z.re), tidy(z.im))).collect();
            ctx.line(format!("  {}", cells.join("  ")));
        }
    }
    if out.residual > DEFAULT_TOLERANCE || defect > DEFAULT_TOLERANCE {
        return Err(Failure::Verification(format!("residual {:.3e}", out.residual)));
    }
    Ok(())
}

/// Suppresses `-0.00000` in printed tables.
fn tidy(x: f64) -> f64 {
    if x.abs() < 5e-6 {
        0.0
    } else {
        x
    }
}

fn verdict(pass: bool, what: &str) -> Outcome {
    if pass {
        Ok(())
    } else {
        Err(Failure::Verification(what.to_string()))
    }
}

fn cmd_verify(ctx: &mut Ctx, spec: &Path, theorem: Theorem, selector: &str) -> Outcome {
    let (k, e) = load_spec(spec)?;
    let c = model_for(&e)?;
    match theorem {
        Theorem::Main => {
            let r = rep_for(&c, &e, selector, ctx.limit)?;
            let report = verify_main_theorem(&r, ctx.limit)?;
            if ctx.json {
                ctx.emit(&report);
            } else {
                ctx.line(format!("K = {}, |K| = {}", report.group, report.order));
                ctx.line(format!(
                    "{} subgroups, {} isotropic, {} maximal isotropic, direct search found {}",
                    report.subgroups,
                    report.isotropic,
                    report.lagrangians.len(),
                    report.direct_search.len()
                ));
                ctx.line(format!("{:<28} {:>4} {:>9} {:>8} {:>6} {:>8}", "M", "dim", "commutant", "abelian", "self*", "kappa"));
                for a in &report.algebras {
                    ctx.line(format!(
                        "{:<28} {:>4} {:>9} {:>8} {:>6} {:>8}",
                        a.subgroup, a.dimension, a.commutant_dimension, a.maximal_abelian, a.self_adjoint, a.kappa_invariant
                    ));
                }
                for line in &report.counterexamples {
                    ctx.line(format!("counterexample: {line}"));
                }
                ctx.line(if report.pass { "PASS" } else { "FAIL" });
            }
            verdict(report.pass, "main theorem report has counterexamples")
        }
        Theorem::Lemma => {
            let r = rep_for(&c, &e, selector, ctx.limit)?;
            let dec = eigenspace_decomposition(&r)?;
            let span = r.spanning_dimension();
            let pass = dec.is_complete() && span as u64 == k.order();
            if ctx.json {
                ctx.emit(&json!({ "decomposition": dec, "spanning_dimension": span, "pass": pass }));
            } else {
                ctx.line(format!("K = {}, dim End(V) = {}", k, dec.end_dimension));
                ctx.line(format!("{:<24} character on generators", "label"));
                for s in &dec.spaces {
                    ctx.line(format!("{:<24} {:?}", s.label.to_string(), s.character));
                }
                ctx.line(format!("distinct characters: {}, span of rho(s(l)): {}", dec.distinct_characters, span));
                ctx.line(if pass { "PASS" } else { "FAIL" });
            }
            verdict(pass, "eigenspace decomposition is not multiplicity free")
        }
        Theorem::Svn => {
            let report = uniqueness_report(&c, ctx.limit, DEFAULT_TOLERANCE, ctx.seed)?;
            if ctx.json {
                ctx.emit(&report);
            } else {
                ctx.line(format!("K = {}, {} maximal isotropic subgroups", report.group, report.lagrangians));
                ctx.line(format!("{:<24} {:<24} {:>7} {:>4} {:>10}", "from", "to", "twisted", "dim", "residual"));
                for p in &report.pairs {
                    ctx.line(format!("{:<24} {:<24} {:>7} {:>4} {:>10.2e}", p.from, p.to, p.twisted, p.solution_dimension, p.residual));
                }
                ctx.line(if report.pass { "PASS" } else { "FAIL" });
            }
            verdict(report.pass, "an intertwiner check failed")
        }
    }
}

fn cmd_replay(ctx: &mut Ctx, path: &Path) -> Outcome {
    let cert = Certificate::load(path)?;
    let outcome = cert.replay()?;
    if ctx.json {
        ctx.emit(&json!({ "certificate": path.display().to_string(), "pass": outcome.is_ok(), "reason": outcome.as_ref().err() }));
    } else {
        let a = FiniteAbelianGroup::new(cert.a.factors.clone()).map(|a| a.to_string()).unwrap_or_default();
        match &outcome {
            Ok(()) => ctx.line(format!("certificate for A = {a} verified ({} ops replayed)", cert.ops.len())),
            Err(reason) => ctx.line(format!("certificate rejected: {reason}")),
        }
    }
    outcome.map_err(Failure::Verification)
}

fn cmd_selftest(ctx: &mut Ctx) -> Outcome {
    let results = selftest::run_all();
    let pass = results.iter().all(|r| r.pass);
    if ctx.json {
        ctx.emit(&json!({ "criteria": results, "pass": pass }));
    } else {
        for r in &results {
            ctx.line(format!("criterion {} {}: {}: {}", r.id, if r.pass { "PASS" } else { "FAIL" }, r.title, r.detail));
        }
    }
    verdict(pass, "acceptance suite")
}
