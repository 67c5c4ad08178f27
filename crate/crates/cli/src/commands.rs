//! Command implementations. Each returns a [`Report`] holding both the JSON
//! object and the plain-text rendering; `main` picks one.

use std::fmt::Write as _;

use num_bigint::BigInt;
use serde_json::{json, Map, Value};

use endospec::exec::Execution;
use endospec::graph::{BasisKind, IndexResult, SubgroupGraph};
use endospec::growth::growth_sequence;
use endospec::linalg::{
    abelianization_matrix, all_roots_of_unity, max_root_modulus, restriction_endomorphism,
    restriction_matrix, spectrum_poly, IntMatrix, IntPoly, SpectrumPoly,
};
use endospec::selftest::{self, Trials};
use endospec::spectra::{
    casson_check, check_containment, check_lemma, eventual_kernel, is_injective, CassonVerdict,
};
use endospec::subgroups::{mod_n_homology_kernel, total_exponent_kernel};
use endospec::torus::{alexander_polynomial, mapping_torus, restricted_mapping_torus};
use endospec::word::{Endomorphism, Word};

use crate::dsl::{ProblemSpec, SubgroupSpec};

pub struct Report {
    pub json: Value,
    pub text: String,
    /// Set when a self-test property failed.
    pub violation: bool,
}

impl Report {
    fn new(json: Map<String, Value>, text: String) -> Self {
        Report {
            json: Value::Object(json),
            text,
            violation: false,
        }
    }
}

/// A domain error: bad input or an operation that does not apply.
#[derive(Debug)]
pub struct CommandError(pub String);

impl<E: std::error::Error> From<E> for CommandError {
    fn from(e: E) -> Self {
        CommandError(e.to_string())
    }
}

type CmdResult = Result<Report, CommandError>;

fn int(x: &BigInt) -> Value {
    Value::Number(
        x.to_string()
            .parse()
            .expect("integers are valid JSON numbers"),
    )
}

/// Ascending coefficients, constant term first.
fn poly(p: &IntPoly) -> Value {
    Value::Array(p.coeffs().iter().map(int).collect())
}

fn spectrum(s: &SpectrumPoly) -> Value {
    poly(s.poly())
}

fn matrix(m: &IntMatrix) -> Value {
    Value::Array(
        m.rows()
            .iter()
            .map(|r| Value::Array(r.iter().map(int).collect()))
            .collect(),
    )
}

fn words(ws: &[Word]) -> Value {
    Value::Array(ws.iter().map(|w| Value::String(w.to_string())).collect())
}

fn index(i: IndexResult) -> Value {
    match i {
        IndexResult::Finite(m) => json!(m),
        IndexResult::Infinite => Value::Null,
    }
}

fn float(x: f64) -> Value {
    serde_json::Number::from_f64(x).map_or(Value::Null, Value::Number)
}

fn basis_kind(k: BasisKind) -> &'static str {
    match k {
        BasisKind::Schreier => "schreier",
        BasisKind::Generators => "generators",
    }
}

fn spectral_radius(p: &IntPoly) -> f64 {
    max_root_modulus(p).unwrap_or(0.0)
}

pub fn build_subgroup(rank: usize, s: &SubgroupSpec) -> Result<SubgroupGraph, CommandError> {
    let to_usize =
        |n: u64| usize::try_from(n).map_err(|_| CommandError(format!("modulus {n} is too large")));
    Ok(match s {
        SubgroupSpec::Generators(ws) => SubgroupGraph::with_generator_basis(rank, ws)?,
        SubgroupSpec::Mod(n) => mod_n_homology_kernel(rank, to_usize(*n)?)?,
        SubgroupSpec::Total(n) => total_exponent_kernel(rank, to_usize(*n)?)?,
    })
}

fn require_subgroup(spec: &ProblemSpec, command: &str) -> Result<SubgroupGraph, CommandError> {
    match &spec.subgroup {
        Some(s) => build_subgroup(spec.rank, s),
        None => Err(CommandError(format!(
            "'{command}' needs a subgroup: add an 'H:' line"
        ))),
    }
}

fn optional_subgroup(spec: &ProblemSpec) -> Result<Option<SubgroupGraph>, CommandError> {
    spec.subgroup
        .as_ref()
        .map(|s| build_subgroup(spec.rank, s))
        .transpose()
}

// ---- the golden instance ----

fn example_phi() -> Endomorphism {
    Endomorphism::parse(2, &["b", "a b^2"]).expect("valid")
}

fn example_h() -> SubgroupGraph {
    let gens: Vec<Word> = ["a^2", "b^2", "a b"]
        .iter()
        .map(|s| Word::parse(2, s).expect("valid"))
        .collect();
    SubgroupGraph::with_generator_basis(2, &gens).expect("valid")
}

/// The checks of the worked example, recomputed from scratch. Present only
/// when the input is that example: `φ: a ↦ b, b ↦ ab²` with `H` absent or
/// equal to `⟨a², b², ab⟩`.
fn golden_check(spec: &ProblemSpec, h: Option<&SubgroupGraph>) -> Option<Value> {
    let phi = example_phi();
    let h_example = example_h();
    if spec.phi != phi || h.is_some_and(|g| *g != h_example) {
        return None;
    }
    let a = abelianization_matrix(&phi);
    let b = restriction_matrix(&phi, &h_example).ok()?;
    let report = check_containment(&phi, &h_example).ok()?;
    let verdict = casson_check(&phi, &h_example).ok()?;
    let d1 = alexander_polynomial(&mapping_torus(&phi)).ok()?;
    let d2 = alexander_polynomial(&restricted_mapping_torus(&phi, &h_example).ok()?).ok()?;
    let delta_f = IntPoly::from_i64s(&[-1, -2, 1]);
    let delta_h = IntPoly::from_i64s(&[-1, -3, -1, 1]);
    let checks = [
        ("matrixF", a == IntMatrix::from_rows(&[[0, 1], [1, 2]])),
        (
            "matrixH",
            b == IntMatrix::from_rows(&[[0, 1, 1], [1, 2, 2], [0, 0, -1]]),
        ),
        ("deltaF", report.delta_f == delta_f),
        ("deltaH", report.delta_h == delta_h),
        ("contained", report.contained),
        ("deltaDivides", report.delta_divides == Some(true)),
        ("index", report.index == IndexResult::Finite(2)),
        (
            "casson",
            verdict == CassonVerdict::HasNonUnitRoot(spectrum_poly(&delta_f).ok()?),
        ),
        ("alexander", d1 == delta_f && d2 == delta_h),
    ];
    let mut block = Map::new();
    for (k, v) in checks {
        block.insert(k.into(), Value::Bool(v));
    }
    block.insert("ok".into(), Value::Bool(checks.iter().all(|c| c.1)));
    Some(Value::Object(block))
}

fn finish(
    mut json: Map<String, Value>,
    mut text: String,
    spec: &ProblemSpec,
    h: Option<&SubgroupGraph>,
) -> Report {
    if let Some(block) = golden_check(spec, h) {
        let ok = block["ok"] == Value::Bool(true);
        json.insert("paper_check".into(), block);
        let _ = writeln!(
            text,
            "worked example check: {}",
            if ok { "ok" } else { "FAILED" }
        );
    }
    Report::new(json, text)
}

// ---- commands ----

pub fn eigen(spec: &ProblemSpec) -> CmdResult {
    let m = abelianization_matrix(&spec.phi);
    let cp = m.char_poly();
    let s = spectrum_poly(&cp)?;
    let unit = all_roots_of_unity(&s);
    let rho = spectral_radius(&cp);
    let mut json = Map::new();
    json.insert("spectrum".into(), spectrum(&s));
    json.insert("charPoly".into(), poly(&cp));
    json.insert("matrix".into(), matrix(&m));
    json.insert("allRootsOfUnity".into(), Value::Bool(unit));
    json.insert("spectralRadius".into(), float(rho));
    let mut text = String::new();
    let _ = writeln!(text, "phi: {}", spec.phi);
    let _ = writeln!(text, "abelianization: {m}");
    let _ = writeln!(text, "characteristic polynomial: {cp}");
    let _ = writeln!(text, "spectrum: roots of {s}");
    let _ = writeln!(text, "all roots of unity: {unit}");
    let _ = writeln!(text, "spectral radius: {rho:.6}");
    Ok(finish(json, text, spec, None))
}

pub fn restrict(spec: &ProblemSpec) -> CmdResult {
    let h = require_subgroup(spec, "restrict")?;
    if !h.is_invariant(&spec.phi)? {
        return Err(CommandError("H is not invariant under phi".into()));
    }
    let m = restriction_matrix(&spec.phi, &h)?;
    let psi = restriction_endomorphism(&spec.phi, &h)?;
    let cp = m.char_poly();
    let s = spectrum_poly(&cp)?;
    let finite = h.index() != IndexResult::Infinite;
    let mut json = Map::new();
    json.insert("index".into(), index(h.index()));
    json.insert("withinHypotheses".into(), Value::Bool(finite));
    json.insert("basisKind".into(), json!(basis_kind(h.basis_kind())));
    json.insert("basis".into(), words(&h.basis()));
    json.insert(
        "restriction".into(),
        json!(psi.render_with(endospec::graph::basis_name)),
    );
    json.insert("matrix".into(), matrix(&m));
    json.insert("charPoly".into(), poly(&cp));
    json.insert("spectrum".into(), spectrum(&s));
    let mut text = String::new();
    let _ = writeln!(text, "index: {}", h.index());
    if !finite {
        let _ = writeln!(
            text,
            "note: H has infinite index, outside the containment theorem's hypotheses"
        );
    }
    let basis: Vec<String> = h.basis().iter().map(Word::to_string).collect();
    let _ = writeln!(
        text,
        "basis ({}): {}",
        basis_kind(h.basis_kind()),
        basis.join(", ")
    );
    let _ = writeln!(
        text,
        "restriction: {}",
        psi.render_with(endospec::graph::basis_name)
    );
    let _ = writeln!(text, "matrix: {m}");
    let _ = writeln!(text, "characteristic polynomial: {cp}");
    let _ = writeln!(text, "spectrum: roots of {s}");
    Ok(finish(json, text, spec, Some(&h)))
}

pub fn check(spec: &ProblemSpec) -> CmdResult {
    let h = require_subgroup(spec, "check-containment")?;
    let r = check_containment(&spec.phi, &h)?;
    let mut json = Map::new();
    json.insert("contained".into(), Value::Bool(r.contained));
    json.insert("deltaF".into(), poly(&r.delta_f));
    json.insert("deltaH".into(), poly(&r.delta_h));
    json.insert(
        "deltaDivides".into(),
        r.delta_divides.map_or(Value::Null, Value::Bool),
    );
    json.insert("index".into(), index(r.index));
    json.insert("injective".into(), Value::Bool(r.injective));
    json.insert("spectrumF".into(), spectrum(&r.spectrum_f));
    json.insert("spectrumH".into(), spectrum(&r.spectrum_h));
    json.insert("matrixF".into(), matrix(&r.matrix_f));
    json.insert("matrixH".into(), matrix(&r.matrix_h));
    let mut text = String::new();
    let _ = writeln!(text, "index: {}", r.index);
    let _ = writeln!(text, "injective: {}", r.injective);
    let _ = writeln!(text, "phi^ab: {}", r.matrix_f);
    let _ = writeln!(text, "(phi|H)^ab: {}", r.matrix_h);
    let _ = writeln!(text, "delta F: {}", r.delta_f);
    let _ = writeln!(text, "delta H: {}", r.delta_h);
    let _ = writeln!(text, "spectrum contained: {}", r.contained);
    match r.delta_divides {
        Some(d) => {
            let _ = writeln!(text, "delta F divides delta H: {d}");
        }
        None => {
            let _ = writeln!(
                text,
                "delta F divides delta H: not checked (phi is not injective)"
            );
        }
    }
    Ok(finish(json, text, spec, Some(&h)))
}

pub fn casson(spec: &ProblemSpec) -> CmdResult {
    let h = require_subgroup(spec, "casson")?;
    let verdict = casson_check(&spec.phi, &h)?;
    let mut json = Map::new();
    let mut text = String::new();
    match &verdict {
        CassonVerdict::AllRootsOfUnity => {
            json.insert("verdict".into(), json!("AllRootsOfUnity"));
            json.insert("witness".into(), Value::Null);
            let _ = writeln!(
                text,
                "every eigenvalue of phi restricted to H is a root of unity"
            );
        }
        CassonVerdict::HasNonUnitRoot(w) => {
            json.insert("verdict".into(), json!("HasNonUnitRoot"));
            json.insert("witness".into(), spectrum(w));
            let _ = writeln!(
                text,
                "phi restricted to H has eigenvalues that are not roots of unity"
            );
            let _ = writeln!(text, "witness: roots of {w}");
        }
    }
    Ok(finish(json, text, spec, Some(&h)))
}

pub fn alexander(spec: &ProblemSpec) -> CmdResult {
    let h = optional_subgroup(spec)?;
    let mut json = Map::new();
    let mut text = String::new();
    let p = mapping_torus(&spec.phi);
    let delta = alexander_polynomial(&p)?;
    let cp = abelianization_matrix(&spec.phi).char_poly();
    json.insert("presentation".into(), json!(p.to_string()));
    json.insert("alexander".into(), poly(&delta));
    json.insert("charPoly".into(), poly(&cp));
    json.insert("agrees".into(), Value::Bool(delta == cp));
    let _ = writeln!(text, "mapping torus: {p}");
    let _ = writeln!(text, "alexander polynomial: {delta}");
    let _ = writeln!(text, "matches det(tI - phi^ab): {}", delta == cp);
    if let Some(g) = &h {
        let q = restricted_mapping_torus(&spec.phi, g)?;
        let dq = alexander_polynomial(&q)?;
        let cq = restriction_matrix(&spec.phi, g)?.char_poly();
        let mut r = Map::new();
        r.insert("presentation".into(), json!(q.to_string()));
        r.insert("alexander".into(), poly(&dq));
        r.insert("charPoly".into(), poly(&cq));
        r.insert("agrees".into(), Value::Bool(dq == cq));
        json.insert("restricted".into(), Value::Object(r));
        let _ = writeln!(text, "restricted mapping torus: {q}");
        let _ = writeln!(text, "alexander polynomial: {dq}");
        let _ = writeln!(text, "matches det(tI - (phi|H)^ab): {}", dq == cq);
    }
    Ok(finish(json, text, spec, h.as_ref()))
}

pub fn growth(spec: &ProblemSpec, kmax: usize) -> CmdResult {
    let h = optional_subgroup(spec)?;
    let tr = growth_sequence(&spec.phi, kmax)?;
    let rho = spectral_radius(&abelianization_matrix(&spec.phi).char_poly());
    let rows: Vec<Value> = tr
        .rows
        .iter()
        .map(|r| {
            json!({
                "k": r.k,
                "lengths": r.generator_lengths,
                "maxLength": r.max_length,
                "rootEstimate": float(r.root_estimate),
                "ratioEstimate": r.ratio_estimate.map_or(Value::Null, float),
            })
        })
        .collect();
    let mut json = Map::new();
    json.insert("rows".into(), Value::Array(rows));
    json.insert("estimate".into(), float(tr.estimate()));
    json.insert("spectralRadius".into(), float(rho));
    let mut text = String::new();
    let _ = writeln!(
        text,
        "{:>4} {:>12} {:>10} {:>10}  per generator",
        "k", "max length", "k-th root", "ratio"
    );
    for r in &tr.rows {
        let ratio = r
            .ratio_estimate
            .map_or("-".to_string(), |x| format!("{x:.6}"));
        let _ = writeln!(
            text,
            "{:>4} {:>12} {:>10.6} {:>10}  {:?}",
            r.k, r.max_length, r.root_estimate, ratio, r.generator_lengths
        );
    }
    let _ = writeln!(text, "growth rate estimate: {:.6}", tr.estimate());
    let _ = writeln!(text, "spectral radius of phi^ab: {rho:.6}");
    if let Some(g) = &h {
        let psi = restriction_endomorphism(&spec.phi, g)?;
        let est = growth_sequence(&psi, kmax)?.estimate();
        json.insert("restrictedEstimate".into(), float(est));
        let _ = writeln!(text, "estimate on H's basis: {est:.6}");
    }
    Ok(finish(json, text, spec, h.as_ref()))
}

pub fn eventual(spec: &ProblemSpec) -> CmdResult {
    let ek = eventual_kernel(&spec.phi);
    let cp = ek.induced_matrix.char_poly();
    let s = spectrum_poly(&cp)?;
    let lemma = check_lemma(&spec.phi);
    let injective = is_injective(&spec.phi);
    let mut json = Map::new();
    json.insert("k".into(), json!(ek.k));
    json.insert("ranks".into(), json!(ek.ranks));
    json.insert("imageRank".into(), json!(ek.image_rank));
    json.insert("imageBasis".into(), words(&ek.image_graph.basis()));
    json.insert("injective".into(), Value::Bool(injective));
    json.insert("inducedMatrix".into(), matrix(&ek.induced_matrix));
    json.insert("inducedCharPoly".into(), poly(&cp));
    json.insert("spectrum".into(), spectrum(&s));
    json.insert("lemma".into(), Value::Bool(lemma));
    let mut text = String::new();
    let _ = writeln!(text, "phi injective: {injective}");
    let _ = writeln!(text, "image ranks: {:?}", ek.ranks);
    let _ = writeln!(
        text,
        "stabilizes at k = {} with rank {}",
        ek.k, ek.image_rank
    );
    let basis: Vec<String> = ek.image_graph.basis().iter().map(Word::to_string).collect();
    let _ = writeln!(text, "eventual image basis: {}", basis.join(", "));
    let _ = writeln!(text, "induced matrix: {}", ek.induced_matrix);
    let _ = writeln!(text, "spectrum: roots of {s}");
    let _ = writeln!(text, "lemma holds: {lemma}");
    Ok(finish(json, text, spec, None))
}

pub fn invariant_subgroup(
    rank: usize,
    modulus: u64,
    total: bool,
    phi: Option<&Endomorphism>,
) -> CmdResult {
    let s = if total {
        SubgroupSpec::Total(modulus)
    } else {
        SubgroupSpec::Mod(modulus)
    };
    let g = build_subgroup(rank, &s)?;
    let basis = g.basis();
    let mut json = Map::new();
    json.insert("rank".into(), json!(rank));
    json.insert("kind".into(), json!(if total { "total" } else { "mod" }));
    json.insert("modulus".into(), json!(modulus));
    json.insert("index".into(), index(g.index()));
    json.insert("subgroupRank".into(), json!(g.subgroup_rank()));
    json.insert("basis".into(), words(&basis));
    let mut text = String::new();
    let kind = if total {
        "total exponent"
    } else {
        "mod-n homology"
    };
    let _ = writeln!(text, "{kind} kernel, rank {rank}, n = {modulus}");
    let _ = writeln!(
        text,
        "index {}, free of rank {}",
        g.index(),
        g.subgroup_rank()
    );
    if let Some(phi) = phi {
        let inv = g.is_invariant(phi)?;
        json.insert("invariant".into(), Value::Bool(inv));
        let _ = writeln!(text, "invariant under phi: {inv}");
    }
    for (i, w) in basis.iter().enumerate() {
        let _ = writeln!(text, "{} = {w}", endospec::graph::basis_name(i));
    }
    Ok(Report::new(json, text))
}

pub fn selftest(seed: u64, trials: Trials, mode: Execution) -> CmdResult {
    let reports = selftest::run_all(seed, trials, mode);
    let ok = reports.iter().all(|r| r.ok());
    let suites: Vec<Value> = reports
        .iter()
        .map(|r| {
            json!({
                "name": r.name,
                "seed": r.seed,
                "checks": r.checks,
                "passed": r.passed,
                "failures": r.failures,
            })
        })
        .collect();
    let mut json = Map::new();
    json.insert("seed".into(), json!(seed));
    json.insert("ok".into(), Value::Bool(ok));
    json.insert("suites".into(), Value::Array(suites));
    let mut text = String::new();
    for r in &reports {
        let _ = writeln!(text, "{r}");
        for f in &r.failures {
            let _ = writeln!(text, "    {f}");
        }
    }
    let _ = writeln!(
        text,
        "{}",
        if ok {
            "all suites passed"
        } else {
            "some suites FAILED"
        }
    );
    let mut report = Report::new(json, text);
    report.violation = !ok;
    Ok(report)
}
