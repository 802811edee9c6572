//! Command-line front end. [`run`] is the whole program minus process exit,
//! so tests can drive it in-process.
//!
//! Exit codes: 0 pass, 1 check failure or engine error, 2 usage error.

use std::ffi::OsString;
use std::path::{Path, PathBuf};
use std::sync::Arc;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use crate::error::Error;
use crate::lie::{
    canonical_witness_verify, close_under_bracket, engel_common_annihilator, sample_point_pairs, sample_points,
    triangular_form_check, witness_results, Closure, FinLieAlgebra, SeriesKind, Witness,
};
use crate::par::with_jobs;
use crate::parse::{
    infer_canonical_space, infer_weyl_pairs, parse_classical, parse_lie_element, parse_weyl, parse_word,
    render_word,
};
use crate::phasepoly::{ClassicalPoly, VariableSpace};
use crate::quantize::{
    affine_algebra, affine_quantization, basic_quantization_audit, groenewold_witness, q1_check, q1_scan,
    alternative_affine_quantization, rep_homomorphism_cases, weyl_map, AffineGroupElement, PhaseScalingState,
    QuantizationMap, Sign,
};
use crate::scalar::{HbarScalar, Rational};
use crate::weyl::{symmetrize, weyl_commutator, weyl_quantize, WeylElement, WeylSignature};

pub const SCHEMA_VERSION: u64 = 1;

#[derive(Parser, Debug)]
#[command(name = "polyquant", version, about = "Exact polynomial quantization toolkit")]
pub struct Cli {
    #[command(flatten)]
    pub common: Common,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Text,
    Json,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum SignatureKind {
    Quantum,
    Differential,
}

#[derive(Args, Debug, Clone)]
pub struct Common {
    #[arg(long, value_enum, default_value_t = Format::Text, global = true)]
    pub format: Format,
    /// Canonical variables, e.g. `q1,p1`.
    #[arg(long, global = true)]
    pub space: Option<String>,
    /// Abstract generators, e.g. `x,y`.
    #[arg(long = "abstract", global = true)]
    pub abstract_vars: Option<String>,
    /// Bracket table entry for abstract mode, e.g. `x,y=2*y`. Repeatable.
    #[arg(long, global = true)]
    pub bracket: Vec<String>,
    /// Commutation constants `[z_k, w_k]`, comma-separated (default `i*h`).
    #[arg(long, global = true, allow_hyphen_values = true)]
    pub kappa: Option<String>,
    #[arg(long, value_enum, global = true)]
    pub signature: Option<SignatureKind>,
    #[arg(long, default_value_t = 0, global = true)]
    pub seed: u64,
    /// Worker threads for scans; 0 uses every core.
    #[arg(long, default_value_t = 1, global = true)]
    pub jobs: usize,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Poisson bracket `{F, G}`.
    Bracket { f: String, g: String },
    /// Weyl product in normal order.
    Wprod { a: String, b: String },
    /// Weyl commutator `[A, B]`.
    Wcomm { a: String, b: String },
    /// Symmetrize a word such as `z1*z1*w1`.
    Symmetrize { word: String },
    /// Weyl ordering of a classical polynomial.
    QuantizeWeyl { f: String },
    /// Dirac-condition discrepancy for one pair.
    CheckQ1 {
        /// `weyl`, `affine+`, `affine-` or `affine-alt`.
        #[arg(long, default_value = "weyl")]
        map: String,
        f: String,
        g: String,
    },
    /// Dirac condition on every monomial pair up to a degree.
    ScanQ1 {
        #[arg(long, default_value = "weyl")]
        map: String,
        #[arg(long, default_value_t = 3)]
        degree: u32,
    },
    /// The cubic obstruction witness.
    Groenewold,
    #[command(subcommand)]
    Lie(LieCommand),
    #[command(subcommand)]
    Affine(AffineCommand),
}

#[derive(Args, Debug, Clone)]
pub struct Elements {
    /// Generators or basis elements.
    pub exprs: Vec<String>,
    /// File with one expression per line, `#` comments.
    #[arg(long)]
    pub fixture: Option<PathBuf>,
}

#[derive(Subcommand, Debug)]
pub enum LieCommand {
    /// Close generators under the Poisson bracket.
    Close {
        #[command(flatten)]
        elements: Elements,
        #[arg(long, default_value_t = crate::lie::DEFAULT_DIM_CAP)]
        cap: usize,
    },
    /// Structure constants, series, Engel vector, sampled transitivity.
    Analyze {
        #[command(flatten)]
        elements: Elements,
    },
    /// Nildegrees of the basis, or of one polynomial.
    Nildeg {
        #[command(flatten)]
        elements: Elements,
        #[arg(long)]
        element: Option<String>,
        #[arg(long, default_value_t = 32)]
        bound: usize,
    },
    /// Isomorphism invariants, optionally compared with a second algebra.
    Invariants {
        #[command(flatten)]
        elements: Elements,
        #[arg(long)]
        compare: Option<PathBuf>,
    },
    /// Triangular normal-form membership.
    FormCheck {
        #[command(flatten)]
        elements: Elements,
    },
    /// Verify `target=expression` witnesses written in `b1..bK`.
    Witness {
        #[command(flatten)]
        elements: Elements,
        #[arg(long = "witness")]
        witnesses: Vec<String>,
    },
}

#[derive(Subcommand, Debug)]
pub enum AffineCommand {
    /// Apply an affine quantization to a polynomial in `x, y`.
    Quantize {
        #[arg(long, default_value = "affine+")]
        map: String,
        f: String,
    },
    /// Identity, Q1, faithfulness and a Q1 span scan on `a(1)`.
    Audit {
        #[arg(long, default_value = "affine+")]
        map: String,
        #[arg(long, default_value_t = 6)]
        degree: u32,
    },
    /// Compose `nu,lambda` pairs.
    Group {
        #[arg(allow_hyphen_values = true)]
        g1: String,
        #[arg(allow_hyphen_values = true)]
        g2: String,
    },
    /// Representation homomorphism on random pairs.
    RepCheck {
        #[arg(long, default_value = "+", allow_hyphen_values = true)]
        sign: String,
        #[arg(long, default_value_t = 100)]
        cases: usize,
    },
}

#[derive(Debug)]
pub enum CliError {
    Usage(String),
    Engine(Error),
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        match e {
            Error::Parse { .. }
            | Error::UnknownIdentifier { .. }
            | Error::HbarInLie(_)
            | Error::MalformedWitness(_)
            | Error::SpaceMismatch
            | Error::SignatureMismatch
            | Error::CanonicalOnly => CliError::Usage(e.to_string()),
            other => CliError::Engine(other),
        }
    }
}

type CliResult<T> = std::result::Result<T, CliError>;

fn usage<T>(msg: impl Into<String>) -> CliResult<T> {
    Err(CliError::Usage(msg.into()))
}

/// Output of one invocation.
#[derive(Debug)]
pub struct Outcome {
    pub code: i32,
    pub stdout: String,
    pub stderr: String,
}

struct Report {
    command: String,
    args: Value,
    result: Value,
    pass: bool,
    text: Vec<String>,
}

impl Report {
    fn render(&self, format: Format) -> String {
        match format {
            Format::Json => {
                let v = json!({
                    "schema_version": SCHEMA_VERSION,
                    "command": self.command,
                    "args": self.args,
                    "pass": self.pass,
                    "result": self.result,
                });
                serde_json::to_string_pretty(&v).expect("serializable") + "\n"
            }
            Format::Text => {
                let mut s = self.text.join("\n");
                s.push('\n');
                s
            }
        }
    }
}

pub fn run<I, T>(args: I) -> Outcome
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let text = e.render().to_string();
            return if code == 0 {
                Outcome { code, stdout: text, stderr: String::new() }
            } else {
                Outcome { code, stdout: String::new(), stderr: text }
            };
        }
    };
    let format = cli.common.format;
    match dispatch(&cli) {
        Ok(r) => Outcome { code: if r.pass { 0 } else { 1 }, stdout: r.render(format), stderr: String::new() },
        Err(CliError::Usage(m)) => Outcome { code: 2, stdout: String::new(), stderr: format!("error: {m}\n") },
        Err(CliError::Engine(e)) => Outcome { code: 1, stdout: String::new(), stderr: format!("error: {e}\n") },
    }
}

fn names(list: &str) -> Vec<String> {
    list.split(',').map(|s| s.trim().to_string()).filter(|s| !s.is_empty()).collect()
}

fn scalar(text: &str) -> CliResult<HbarScalar> {
    let empty = VariableSpace::free::<&str>(&[]);
    let c = parse_classical(text, &empty)?;
    Ok(c.as_constant().expect("no variables"))
}

/// The classical space from `--abstract`/`--bracket`, `--space`, or the
/// identifiers of the inputs.
fn classical_space(common: &Common, inputs: &[&str]) -> CliResult<Arc<VariableSpace>> {
    if let Some(list) = &common.abstract_vars {
        let vars = names(list);
        if vars.iter().any(|v| v == "i" || v == "h") {
            return usage("`i` and `h` are reserved");
        }
        let mut space = VariableSpace::free(&vars);
        for spec in &common.bracket {
            let Some((lhs, rhs)) = spec.split_once('=') else {
                return usage(format!("bracket entry `{spec}` must look like `x,y=expr`"));
            };
            let pair = names(lhs);
            let [a, b] = pair.as_slice() else {
                return usage(format!("bracket entry `{spec}` needs two generators"));
            };
            let (Some(i), Some(j)) = (space.index_of(a), space.index_of(b)) else {
                return usage(format!("bracket entry `{spec}` names an undeclared generator"));
            };
            let value = parse_classical(rhs, &space)?;
            space = space.with_bracket(i, j, &value)?;
        }
        return Ok(space);
    }
    if !common.bracket.is_empty() {
        return usage("--bracket requires --abstract");
    }
    if let Some(list) = &common.space {
        let vars = names(list);
        if vars.is_empty() || vars.len() % 2 != 0 {
            return usage("--space needs q1..qn and p1..pn");
        }
        let space = VariableSpace::canonical(vars.len() / 2);
        let mut sorted = vars.clone();
        sorted.sort();
        let mut expect: Vec<String> = space.names().to_vec();
        expect.sort();
        if sorted != expect {
            return usage("--space needs exactly q1..qn and p1..pn");
        }
        return Ok(space);
    }
    infer_canonical_space(inputs.iter().copied())
        .ok_or_else(|| CliError::Usage("cannot infer a canonical space; pass --space or --abstract".into()))
}

fn weyl_signature(common: &Common, inputs: &[&str]) -> CliResult<Arc<WeylSignature>> {
    if common.signature == Some(SignatureKind::Differential) {
        if common.kappa.is_some() {
            return usage("--kappa does not apply to the differential signature");
        }
        return Ok(WeylSignature::differential());
    }
    if let Some(k) = &common.kappa {
        let ks = k.split(',').map(scalar).collect::<CliResult<Vec<_>>>()?;
        return Ok(WeylSignature::quantum_with_kappa(ks));
    }
    let pairs = inputs.iter().map(|t| infer_weyl_pairs(t)).max().unwrap_or(1);
    Ok(WeylSignature::quantum(pairs))
}

/// The Weyl target for a canonical space of `n` pairs, honoring `--kappa`.
fn weyl_target(common: &Common, n: usize) -> CliResult<Arc<WeylSignature>> {
    match &common.kappa {
        Some(k) => {
            let ks = k.split(',').map(scalar).collect::<CliResult<Vec<_>>>()?;
            if ks.len() != n {
                return usage(format!("--kappa needs {n} values"));
            }
            Ok(WeylSignature::quantum_with_kappa(ks))
        }
        None => Ok(WeylSignature::quantum(n)),
    }
}

fn named_map(common: &Common, name: &str, inputs: &[&str]) -> CliResult<QuantizationMap> {
    match name {
        "affine+" => Ok(affine_quantization(Sign::Plus)),
        "affine-" => Ok(affine_quantization(Sign::Minus)),
        "affine-alt" => Ok(alternative_affine_quantization()),
        "weyl" => {
            let space = classical_space(common, inputs)?;
            let n = space.pairs().ok_or(Error::CanonicalOnly)?;
            Ok(weyl_map(&space, &weyl_target(common, n)?)?)
        }
        other => usage(format!("unknown map `{other}` (weyl, affine+, affine-, affine-alt)")),
    }
}

fn parse_sign(s: &str) -> CliResult<Sign> {
    match s {
        "+" | "plus" | "1" | "+1" => Ok(Sign::Plus),
        "-" | "minus" | "-1" => Ok(Sign::Minus),
        _ => usage(format!("sign must be + or -, got `{s}`")),
    }
}

const SHIPPED_FIXTURES: &[(&str, &str)] = &[
    ("example5.txt", include_str!("../fixtures/example5.txt")),
    ("h2.txt", include_str!("../fixtures/h2.txt")),
    ("h4.txt", include_str!("../fixtures/h4.txt")),
    ("a1.txt", include_str!("../fixtures/a1.txt")),
];

/// Reads a fixture from disk, falling back to the shipped copies by file name.
fn read_fixture(path: &Path) -> CliResult<Vec<String>> {
    let text = match std::fs::read_to_string(path) {
        Ok(t) => t,
        Err(e) => {
            let name = path.file_name().and_then(|n| n.to_str()).unwrap_or_default();
            match SHIPPED_FIXTURES.iter().find(|(n, _)| *n == name) {
                Some((_, t)) if path.components().count() == 1 => t.to_string(),
                _ => return usage(format!("cannot read fixture {}: {e}", path.display())),
            }
        }
    };
    Ok(text
        .lines()
        .map(|l| l.split('#').next().unwrap_or("").trim().to_string())
        .filter(|l| !l.is_empty())
        .collect())
}

fn element_texts(el: &Elements) -> CliResult<Vec<String>> {
    let mut out = match &el.fixture {
        Some(p) => read_fixture(p)?,
        None => Vec::new(),
    };
    out.extend(el.exprs.iter().cloned());
    if out.is_empty() {
        return usage("no elements given (positional expressions or --fixture)");
    }
    Ok(out)
}

fn lie_inputs(common: &Common, texts: &[String]) -> CliResult<Vec<ClassicalPoly>> {
    let refs: Vec<&str> = texts.iter().map(String::as_str).collect();
    let space = classical_space(common, &refs)?;
    Ok(texts.iter().map(|t| parse_lie_element(t, &space)).collect::<Result<_, _>>()?)
}

fn closed_algebra(common: &Common, el: &Elements) -> CliResult<FinLieAlgebra> {
    let gens = lie_inputs(common, &element_texts(el)?)?;
    match close_under_bracket(&gens, crate::lie::DEFAULT_DIM_CAP)? {
        Closure::Closed(a) => Ok(a),
        Closure::CapExceeded { dim } => Err(CliError::Engine(Error::BoundExceeded(dim))),
    }
}

fn strings<T: ToString>(xs: &[T]) -> Vec<String> {
    xs.iter().map(ToString::to_string).collect()
}

fn value_report(command: &str, args: Value, value: String) -> Report {
    Report { command: command.into(), args, result: json!({ "value": value }), pass: true, text: vec![value] }
}

fn pair_entry(f: &impl ToString, g: &impl ToString, d: &WeylElement) -> Value {
    json!({ "f": f.to_string(), "g": g.to_string(), "discrepancy": d.to_string(), "pass": d.is_zero() })
}

fn bool_line(name: &str, b: bool) -> String {
    format!("{name}: {b}")
}

fn parse_group(text: &str) -> CliResult<AffineGroupElement> {
    let Some((a, b)) = text.split_once(',') else {
        return usage(format!("group element `{text}` must look like `nu,lambda`"));
    };
    let rat = |s: &str| -> CliResult<Rational> {
        s.trim().parse::<Rational>().map_err(|_| CliError::Usage(format!("`{s}` is not a rational")))
    };
    Ok(AffineGroupElement::new(rat(a)?, rat(b)?)?)
}

fn group_text(g: &AffineGroupElement) -> String {
    format!("({}, {})", g.nu(), g.lambda())
}

fn state_text(s: &PhaseScalingState) -> String {
    format!("({}, {})", s.c(), s.s())
}

fn dispatch(cli: &Cli) -> CliResult<Report> {
    let c = &cli.common;
    match &cli.command {
        Command::Bracket { f, g } => {
            let space = classical_space(c, &[f, g])?;
            let v = parse_classical(f, &space)?.bracket(&parse_classical(g, &space)?)?;
            Ok(value_report("bracket", json!({ "f": f, "g": g, "space": space.names() }), v.to_string()))
        }
        Command::Wprod { a, b } | Command::Wcomm { a, b } => {
            let sig = weyl_signature(c, &[a, b])?;
            let (x, y) = (parse_weyl(a, &sig)?, parse_weyl(b, &sig)?);
            let (name, v) = match &cli.command {
                Command::Wprod { .. } => ("wprod", &x * &y),
                _ => ("wcomm", weyl_commutator(&x, &y)?),
            };
            Ok(value_report(name, json!({ "a": a, "b": b, "pairs": sig.pairs() }), v.to_string()))
        }
        Command::Symmetrize { word } => {
            let sig = weyl_signature(c, &[word])?;
            let w = parse_word(word, &sig)?;
            let v = symmetrize(&w);
            Ok(value_report("symmetrize", json!({ "word": render_word(&w) }), v.to_string()))
        }
        Command::QuantizeWeyl { f } => {
            let space = classical_space(c, &[f])?;
            let n = space.pairs().ok_or(Error::CanonicalOnly)?;
            let v = weyl_quantize(&parse_classical(f, &space)?, &weyl_target(c, n)?)?;
            Ok(value_report("quantize-weyl", json!({ "f": f }), v.to_string()))
        }
        Command::CheckQ1 { map, f, g } => {
            let q = named_map(c, map, &[f, g])?;
            let (fp, gp) = (parse_classical(f, q.source())?, parse_classical(g, q.source())?);
            let d = q1_check(&q, &fp, &gp)?;
            let pass = d.is_zero();
            Ok(Report {
                command: "check-q1".into(),
                args: json!({ "map": map, "f": f, "g": g }),
                result: json!({ "pairs": [pair_entry(&fp, &gp, &d)] }),
                pass,
                text: vec![format!("discrepancy: {d}"), bool_line("pass", pass)],
            })
        }
        Command::ScanQ1 { map, degree } => {
            let q = named_map(c, map, &[])?;
            let rep = with_jobs(c.jobs, |exec| q1_scan(&q, *degree, exec))?;
            let pairs: Vec<Value> = rep.failures.iter().map(|x| pair_entry(&x.f, &x.g, &x.discrepancy)).collect();
            let mut text = vec![
                format!("map: {}", q.name),
                format!("degree: {degree}"),
                format!("checked: {}", rep.checked),
                format!("failures: {}", rep.failures.len()),
            ];
            text.extend(rep.failures.iter().map(|x| format!("  {{{}, {}}}: {}", x.f, x.g, x.discrepancy)));
            text.push(bool_line("pass", rep.passed()));
            Ok(Report {
                command: "scan-q1".into(),
                args: json!({ "map": map, "degree": degree }),
                result: json!({ "checked": rep.checked, "failure_count": rep.failures.len(), "pairs": pairs }),
                pass: rep.passed(),
                text,
            })
        }
        Command::Groenewold => {
            let w = groenewold_witness()?;
            let coefficient = w.coefficient.as_ref().map(ToString::to_string);
            let pass = w.classical_identity && w.coefficient.as_ref().is_some_and(|x| !num_traits::Zero::is_zero(x));
            Ok(Report {
                command: "groenewold".into(),
                args: json!({}),
                result: json!({
                    "cubic_bracket": w.cubic_bracket.to_string(),
                    "mixed_bracket": w.mixed_bracket.to_string(),
                    "classical_identity": w.classical_identity,
                    "discrepancy": w.discrepancy.to_string(),
                    "hbar2_coefficient": coefficient,
                }),
                pass,
                text: vec![
                    format!("{{q1^3, p1^3}} = {}", w.cubic_bracket),
                    format!("3*{{q1^2*p1, q1*p1^2}} = {}", w.mixed_bracket),
                    bool_line("classical identity", w.classical_identity),
                    format!("discrepancy: {}", w.discrepancy),
                    bool_line("pass", pass),
                ],
            })
        }
        Command::Lie(cmd) => lie(c, cmd),
        Command::Affine(cmd) => affine(c, cmd),
    }
}

fn structure_json(a: &FinLieAlgebra) -> Vec<Value> {
    a.structure_constants()
        .nonzero()
        .into_iter()
        .map(|(i, j, k, v)| json!({ "i": i + 1, "j": j + 1, "k": k + 1, "value": v.to_string() }))
        .collect()
}

fn basis_lines(a: &FinLieAlgebra) -> Vec<String> {
    a.basis().iter().enumerate().map(|(i, b)| format!("  b{} = {}", i + 1, b)).collect()
}

fn lie(c: &Common, cmd: &LieCommand) -> CliResult<Report> {
    match cmd {
        LieCommand::Close { elements, cap } => {
            let gens = lie_inputs(c, &element_texts(elements)?)?;
            let out = close_under_bracket(&gens, *cap)?;
            let (result, text, pass) = match &out {
                Closure::Closed(a) => {
                    let mut t = vec![format!("dimension: {}", a.dim())];
                    t.extend(basis_lines(a));
                    (json!({ "closed": true, "dimension": a.dim(), "basis": strings(a.basis()) }), t, true)
                }
                Closure::CapExceeded { dim } => (
                    json!({ "closed": false, "dimension": dim, "basis": [] }),
                    vec![format!("cap {cap} exceeded at dimension {dim}")],
                    false,
                ),
            };
            Ok(Report { command: "lie close".into(), args: json!({ "cap": cap }), result, pass, text })
        }
        LieCommand::Analyze { elements } => {
            let a = closed_algebra(c, elements)?;
            let asc = a.series(SeriesKind::AscendingCentral);
            let der = a.series(SeriesKind::Derived);
            let nilpotent = a.is_nilpotent();
            let class = a.nilpotency_class();
            let derived_dim = der.dims.get(1).copied().unwrap_or(0);
            let engel = if nilpotent {
                engel_common_annihilator(&a.adjoint_matrices(), a.dim())?.map(|v| a.element(&v).to_string())
            } else {
                None
            };
            let nildegrees: Option<Vec<usize>> =
                nilpotent.then(|| (0..a.dim()).map(|i| a.nildegree_basis(i)).collect::<Result<_, _>>()).transpose()?;
            let mut result = json!({
                "dimension": a.dim(),
                "basis": strings(a.basis()),
                "structure_constants": structure_json(&a),
                "jordan_holder": a.is_jordan_holder(),
                "nilpotent": nilpotent,
                "solvable": a.is_solvable(),
                "class": class,
                "ascending_dims": asc.dims,
                "derived_dims": der.dims,
                "derived_dim": derived_dim,
                "nildegrees": nildegrees,
                "engel_vector": engel,
            });
            let mut text = vec![format!("dimension: {}", a.dim())];
            text.extend(basis_lines(&a));
            text.push(bool_line("nilpotent", nilpotent));
            text.push(format!("class: {}", class.map_or("none".into(), |k| k.to_string())));
            text.push(format!("derived-dim: {derived_dim}"));
            text.push(format!("ascending dims: {:?}", asc.dims));
            text.push(format!("derived dims: {:?}", der.dims));
            text.push(bool_line("solvable", a.is_solvable()));
            text.push(bool_line("jordan-holder", a.is_jordan_holder()));
            if let Some(n) = a.space().pairs() {
                let pts = sample_points(n, 8, c.seed, false);
                let ranks = pts.iter().map(|m| a.transitivity_rank(m)).collect::<Result<Vec<_>, _>>()?;
                let separating = a.separating_sample_check(&sample_point_pairs(n, 16, c.seed, false))?;
                let (lo, hi) = (ranks.iter().min().copied(), ranks.iter().max().copied());
                result["transitivity"] = json!({ "samples": ranks.len(), "phase_dim": 2 * n, "min_rank": lo, "max_rank": hi });
                result["separating_sample"] = json!(separating);
                text.push(format!("transitivity rank (sampled): {}..{} of {}", lo.unwrap_or(0), hi.unwrap_or(0), 2 * n));
                text.push(bool_line("separating (sampled)", separating));
            }
            Ok(Report { command: "lie analyze".into(), args: json!({ "seed": c.seed }), result, pass: true, text })
        }
        LieCommand::Nildeg { elements, element, bound } => {
            let a = closed_algebra(c, elements)?;
            let mut entries = Vec::new();
            match element {
                Some(t) => {
                    let f = parse_lie_element(t, a.space())?;
                    let n = a.nildegree_poly(&f, *bound)?;
                    entries.push((f.to_string(), n));
                }
                None => {
                    for (i, b) in a.basis().iter().enumerate() {
                        entries.push((b.to_string(), a.nildegree_basis(i)?));
                    }
                }
            }
            Ok(Report {
                command: "lie nildeg".into(),
                args: json!({ "bound": bound, "element": element }),
                result: json!({ "entries": entries.iter().map(|(e, n)| json!({ "element": e, "nildegree": n })).collect::<Vec<_>>() }),
                pass: true,
                text: entries.iter().map(|(e, n)| format!("{e}: {n}")).collect(),
            })
        }
        LieCommand::Invariants { elements, compare } => {
            let a = closed_algebra(c, elements)?;
            let inv = a.iso_invariants();
            let mut result = json!({ "invariants": inv });
            let mut text = vec![
                format!("dimension: {}", inv.dimension),
                format!("derived dims: {:?}", inv.derived_dims),
                format!("ascending dims: {:?}", inv.ascending_dims),
                format!("derived-dim: {}", inv.derived_subalgebra_dim),
                format!("class: {}", inv.nilpotency_class.map_or("none".into(), |k| k.to_string())),
            ];
            if let Some(path) = compare {
                let other = closed_algebra(c, &Elements { exprs: vec![], fixture: Some(path.clone()) })?;
                let oi = other.iso_invariants();
                let differ = inv.certifies_non_isomorphic(&oi);
                result["compare"] = json!({ "invariants": oi, "non_isomorphic": differ });
                text.push(bool_line("non-isomorphic (invariant mismatch)", differ));
            }
            Ok(Report { command: "lie invariants".into(), args: json!({}), result, pass: true, text })
        }
        LieCommand::FormCheck { elements } => {
            let fs = lie_inputs(c, &element_texts(elements)?)?;
            let verdicts = fs.iter().map(triangular_form_check).collect::<Result<Vec<_>, _>>()?;
            let pass = verdicts.iter().all(|&b| b);
            Ok(Report {
                command: "lie form-check".into(),
                args: json!({}),
                result: json!({ "entries": fs.iter().zip(&verdicts).map(|(f, b)| json!({ "element": f.to_string(), "triangular": b })).collect::<Vec<_>>() }),
                pass,
                text: fs.iter().zip(&verdicts).map(|(f, b)| format!("{f}: {b}")).collect(),
            })
        }
        LieCommand::Witness { elements, witnesses } => {
            let a = closed_algebra(c, elements)?;
            let bs = a.basis_space();
            let mut ws = Vec::new();
            for spec in witnesses {
                let Some((t, e)) = spec.split_once('=') else {
                    return usage(format!("witness `{spec}` must look like `q1=expr`"));
                };
                ws.push(Witness { target: parse_lie_element(t, a.space())?, expression: parse_lie_element(e, &bs)? });
            }
            if ws.is_empty() {
                return usage("no --witness given");
            }
            let verdicts = witness_results(&a, &ws)?;
            let pass = canonical_witness_verify(&a, &ws)?;
            Ok(Report {
                command: "lie witness".into(),
                args: json!({ "witnesses": witnesses }),
                result: json!({
                    "basis": strings(a.basis()),
                    "entries": ws.iter().zip(&verdicts).map(|(w, b)| json!({
                        "target": w.target.to_string(), "expression": w.expression.to_string(), "pass": b
                    })).collect::<Vec<_>>(),
                }),
                pass,
                text: ws.iter().zip(&verdicts).map(|(w, b)| format!("{} = {}: {b}", w.target, w.expression)).collect(),
            })
        }
    }
}

fn affine(c: &Common, cmd: &AffineCommand) -> CliResult<Report> {
    match cmd {
        AffineCommand::Quantize { map, f } => {
            let q = affine_named(map)?;
            let v = q.apply(&parse_classical(f, q.source())?)?;
            Ok(value_report("affine quantize", json!({ "map": map, "f": f }), v.to_string()))
        }
        AffineCommand::Audit { map, degree } => {
            let q = affine_named(map)?;
            let rep = with_jobs(c.jobs, |exec| basic_quantization_audit(&q, &affine_algebra(), *degree, exec))?;
            let pairs: Vec<Value> = rep.basis_pairs.iter().map(|p| pair_entry(&p.f, &p.g, &p.discrepancy)).collect();
            let failures: Vec<Value> =
                rep.span.failures.iter().map(|x| pair_entry(&x.f, &x.g, &x.discrepancy)).collect();
            let mut text = vec![
                format!("map: {}", q.name),
                bool_line("Q(1) = I", rep.identity_ok),
                bool_line("Q1 on basis pairs", rep.basis_q1_ok()),
                format!("image rank: {} of {}", rep.image_rank, rep.dimension),
                format!("span scan: {} pairs over {} products, {} failures", rep.span.checked, rep.span_size, rep.span.failures.len()),
            ];
            text.extend(rep.span.failures.iter().map(|x| format!("  {{{}, {}}}: {}", x.f, x.g, x.discrepancy)));
            text.push(bool_line("pass", rep.passed()));
            Ok(Report {
                command: "affine audit".into(),
                args: json!({ "map": map, "degree": degree }),
                result: json!({
                    "identity": rep.identity_ok,
                    "pairs": pairs,
                    "image_rank": rep.image_rank,
                    "dimension": rep.dimension,
                    "faithful": rep.faithful(),
                    "span_checked": rep.span.checked,
                    "span_failures": failures,
                }),
                pass: rep.passed(),
                text,
            })
        }
        AffineCommand::Group { g1, g2 } => {
            let (a, b) = (parse_group(g1)?, parse_group(g2)?);
            let prod = a.compose(&b);
            let e = AffineGroupElement::identity();
            let checks = [
                ("g1*g2", group_text(&prod), group_text(&prod)),
                ("g1*e", group_text(&a), group_text(&a.compose(&e))),
                ("e*g1", group_text(&a), group_text(&e.compose(&a))),
                ("g1*g1^-1", group_text(&e), group_text(&a.compose(&a.inverse()))),
                ("g1^-1*g1", group_text(&e), group_text(&a.inverse().compose(&a))),
                ("(g1*g2)*g1", group_text(&a.compose(&b.compose(&a))), group_text(&prod.compose(&a))),
            ];
            let pass = checks.iter().all(|(_, x, y)| x == y);
            let mut text = vec![format!("product: {}", group_text(&prod))];
            text.extend(checks[1..].iter().map(|(n, x, y)| format!("{n}: {y} (expected {x})")));
            text.push(bool_line("pass", pass));
            Ok(Report {
                command: "affine group".into(),
                args: json!({ "g1": g1, "g2": g2 }),
                result: json!({
                    "product": group_text(&prod),
                    "cases": checks.iter().map(|(n, x, y)| json!({ "case": n, "expected": x, "actual": y, "pass": x == y })).collect::<Vec<_>>(),
                }),
                pass,
                text,
            })
        }
        AffineCommand::RepCheck { sign, cases } => {
            let s = parse_sign(sign)?;
            let rep = rep_homomorphism_cases(s, *cases, c.seed)?;
            let entries: Vec<Value> = rep
                .iter()
                .map(|r| {
                    json!({
                        "case": format!("{} * {}", group_text(&r.g1), group_text(&r.g2)),
                        "expected": state_text(&r.expected),
                        "actual": state_text(&r.actual),
                        "pass": r.passed(),
                    })
                })
                .collect();
            let failed = rep.iter().filter(|r| !r.passed()).count();
            Ok(Report {
                command: "affine rep-check".into(),
                args: json!({ "sign": s.symbol(), "cases": cases, "seed": c.seed }),
                result: json!({ "cases": entries, "failure_count": failed }),
                pass: failed == 0,
                text: vec![
                    format!("sign: {}", s.symbol()),
                    format!("cases: {}", rep.len()),
                    format!("failures: {failed}"),
                    bool_line("pass", failed == 0),
                ],
            })
        }
    }
}

fn affine_named(map: &str) -> CliResult<QuantizationMap> {
    match map {
        "affine+" => Ok(affine_quantization(Sign::Plus)),
        "affine-" => Ok(affine_quantization(Sign::Minus)),
        "affine-alt" => Ok(alternative_affine_quantization()),
        other => usage(format!("unknown affine map `{other}` (affine+, affine-, affine-alt)")),
    }
}
