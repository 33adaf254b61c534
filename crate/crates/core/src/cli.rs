//! Batch front end. Standard output carries a header line followed by
//! JSON Lines; a readable summary goes to standard error.

use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::{json, Value};

use crate::acceptance;
use crate::bar_diff::d_lin_bar;
use crate::criticality::{classify, find_counterterm, source_target_witnesses, verify_counterterm, Height};
use crate::error::{Error, Result};
use crate::exact_homology::{build_G_complex, homology_reports};
use crate::faces::{d_reg_mod2, enumerate_faces, solve_signs};
use crate::fixtures::anchor_differentials;
use crate::free_lie::{parse_tensor, ree_report, ush_quotient_report};
use crate::free_operad::OperadTerm;
use crate::level_trees::{enumerate_labeled, enumerate_reduced};
use crate::Barcode;

pub const SCHEMA: &str = "treecells.report/1";

#[derive(Debug, Parser)]
#[command(name = "treecells", version, about = "Level trees, their cells and free-operad differentials")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Enumerate reduced trees.
    Trees {
        #[command(subcommand)]
        action: TreesAction,
    },
    /// Differential of a generator.
    Diff {
        #[arg(long)]
        barcode: Barcode,
        #[arg(long, value_enum, default_value_t = Ring::Z)]
        ring: Ring,
        #[arg(long)]
        linear_only: bool,
    },
    /// Faces of a cell with their fiber elements.
    Faces {
        #[arg(long)]
        barcode: Barcode,
    },
    /// Regularity of `F_h(n)` with a witness when it fails.
    Classify(ArityHeight),
    /// The standard bad cell with its source-target data.
    BadCell(ArityHeight),
    /// Counterterm at the critical dimension.
    Counterterm {
        #[arg(long)]
        barcode: Barcode,
        /// File of whitespace-separated terms to check instead of solving.
        #[arg(long)]
        verify: Option<PathBuf>,
    },
    /// Integer homology of the generator complex.
    Homology {
        #[arg(long)]
        arity: usize,
        #[arg(long, default_value = "inf")]
        height: Height,
        #[arg(long)]
        dmax: Option<usize>,
    },
    /// Multilinear free Lie algebra.
    Lie {
        #[arg(value_enum)]
        action: LieAction,
        #[arg(long)]
        n: usize,
        /// File holding a sum such as `+2*(1,2,3) -(3,2,1)`.
        #[arg(long)]
        input: Option<PathBuf>,
        /// Use signed unshuffles in `quotient`.
        #[arg(long)]
        signed: bool,
    },
    /// Run the acceptance suite.
    Selftest {
        /// Skip rerunning the suite in child processes to compare outputs.
        #[arg(long)]
        no_determinism: bool,
        /// Run only these criteria.
        #[arg(long, value_delimiter = ',')]
        only: Vec<usize>,
    },
}

#[derive(Debug, Subcommand)]
enum TreesAction {
    Enum {
        #[arg(long)]
        dim: usize,
        #[arg(long)]
        arity: Option<usize>,
        /// List every labeling (requires --arity).
        #[arg(long)]
        labeled: bool,
    },
}

#[derive(Debug, Args)]
struct ArityHeight {
    #[arg(long)]
    arity: usize,
    #[arg(long)]
    height: Height,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
enum Ring {
    Z,
    F2,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum LieAction {
    Ree,
    Coords,
    Quotient,
}

/// Everything a command produces before it is written out.
struct Output {
    command: String,
    parameters: Value,
    records: Vec<Value>,
    summary: Vec<String>,
    status: i32,
}

impl Output {
    fn new(command: &str, parameters: Value) -> Self {
        Output { command: command.into(), parameters, records: Vec::new(), summary: Vec::new(), status: 0 }
    }

    fn push(&mut self, v: impl Serialize) {
        self.records.push(serde_json::to_value(v).expect("records serialize"));
    }

    fn say(&mut self, s: impl Into<String>) {
        self.summary.push(s.into());
    }
}

pub fn header() -> Value {
    json!({ "schema": SCHEMA, "tool": "treecells", "version": env!("CARGO_PKG_VERSION") })
}

fn write_line(out: &mut dyn Write, v: &Value) {
    let _ = writeln!(out, "{}", serde_json::to_string(v).expect("json"));
}

/// Parse `argv` (program name first), run, write, and return the exit status.
pub fn run<I, T>(argv: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = write!(err, "{e}");
            return code;
        }
    };
    write_line(out, &header());
    match execute(cli.command) {
        Ok(o) => {
            write_line(out, &json!({ "command": o.command, "parameters": o.parameters }));
            for r in &o.records {
                write_line(out, r);
            }
            write_line(out, &json!({ "exit_status": o.status }));
            for s in &o.summary {
                let _ = writeln!(err, "{s}");
            }
            o.status
        }
        Err(e) => {
            let code = e.exit_code();
            write_line(out, &json!({ "error": e.to_string(), "exit_status": code }));
            let _ = writeln!(err, "error: {e}");
            code
        }
    }
}

fn execute(cmd: Command) -> Result<Output> {
    match cmd {
        Command::Trees { action: TreesAction::Enum { dim, arity, labeled } } => trees(dim, arity, labeled),
        Command::Diff { barcode, ring, linear_only } => diff(&barcode, ring, linear_only),
        Command::Faces { barcode } => faces(&barcode),
        Command::Classify(a) => {
            let c = classify(a.arity, a.height)?;
            let mut o = Output::new("classify", json!({ "arity": a.arity, "height": a.height }));
            o.say(match &c.witness {
                None => format!("F_{}({}) is regular", a.height, a.arity),
                Some(w) => format!(
                    "F_{}({}) is not regular: critical dimension {}, witness {} suspended {} times",
                    a.height, a.arity, w.dim, w.barcode, w.suspensions
                ),
            });
            o.push(json!({
                "arity": c.arity,
                "height": c.height,
                "regular": c.regular,
                "d_crit": c.d_crit.map_or(json!("inf"), |d| json!(d)),
                "witness": c.witness.as_ref().map(|w| json!({
                    "barcode": w.barcode.to_string(),
                    "suspensions": w.suspensions,
                    "dim": w.dim,
                    "certificate": w.certificate.iter().map(|d| d.element.to_string()).collect::<Vec<_>>(),
                })),
            }));
            Ok(o)
        }
        Command::BadCell(a) => bad_cell(a.arity, a.height),
        Command::Counterterm { barcode, verify } => counterterm(&barcode, verify.as_deref()),
        Command::Homology { arity, height, dmax } => homology(arity, height, dmax),
        Command::Lie { action, n, input, signed } => lie(action, n, input.as_deref(), signed),
        Command::Selftest { no_determinism, only } => selftest(no_determinism, &only),
    }
}

fn trees(dim: usize, arity: Option<usize>, labeled: bool) -> Result<Output> {
    let mut o = Output::new("trees enum", json!({ "dim": dim, "arity": arity, "labeled": labeled }));
    let list: Vec<Barcode> = if labeled {
        let n = arity.ok_or_else(|| Error::Validation("--labeled needs --arity".into()))?;
        if n > 8 {
            return Err(Error::Capacity("labeled enumeration is limited to arity ≤ 8".into()));
        }
        enumerate_labeled(n, dim, usize::MAX)
    } else {
        if dim > 20 {
            return Err(Error::Capacity("unlabeled enumeration is limited to dim ≤ 20".into()));
        }
        enumerate_reduced(arity, dim).iter().map(|t| Barcode::unlabeled(&t.tip_gaps())).collect()
    };
    for b in &list {
        o.push(json!({ "barcode": b.to_string(), "arity": b.arity(), "height": b.height(), "dim": b.dim() }));
    }
    o.say(format!("{} reduced trees of dimension {dim}", list.len()));
    Ok(o)
}

fn diff(b: &Barcode, ring: Ring, linear_only: bool) -> Result<Output> {
    let mut o = Output::new(
        "diff",
        json!({ "barcode": b.to_string(), "ring": ring, "linear_only": linear_only }),
    );
    let terms: Vec<(String, i64)> = match (ring, linear_only) {
        (Ring::Z, true) => d_lin_bar::<i64>(b).map_keys(OperadTerm::generator).sorted_terms(),
        (Ring::F2, true) => d_lin_bar::<i64>(b).map_keys(OperadTerm::generator).to_f2().sorted_terms().into_iter().map(|(t, _)| (t, 1)).collect(),
        (Ring::Z, false) => {
            let table = solve_signs(5, 4, &anchor_differentials())?;
            table.d_reg_signed(b)?.sorted_terms()
        }
        (Ring::F2, false) => d_reg_mod2(b)?.sorted_terms().into_iter().map(|(t, _)| (t, 1)).collect(),
    };
    for (t, c) in &terms {
        o.push(json!({ "term": t, "coeff": c }));
    }
    o.say(format!("∂{b} has {} terms", terms.len()));
    Ok(o)
}

fn faces(b: &Barcode) -> Result<Output> {
    let mut o = Output::new("faces", json!({ "barcode": b.to_string() }));
    let faces = enumerate_faces(b)?;
    let mut rows: Vec<(String, Value)> = faces
        .iter()
        .map(|f| {
            let e = f.element.to_string();
            let v = json!({
                "element": e,
                "degree": f.degree,
                "codim": b.dim() - f.degree,
                "quasibijection": f.quasibijection,
                "top": f.top,
                "maps": f.morphism.maps,
            });
            (format!("{e}{:?}", f.morphism.maps), v)
        })
        .collect();
    rows.sort_by(|x, y| x.0.cmp(&y.0));
    let codim_one = faces.iter().filter(|f| f.degree + 1 == b.dim()).count();
    for (_, v) in rows {
        o.push(v);
    }
    o.say(format!("{b}: {} faces, {codim_one} of codimension one", faces.len()));
    Ok(o)
}

fn bad_cell(n: usize, h: Height) -> Result<Output> {
    let mut o = Output::new("bad-cell", json!({ "arity": n, "height": h }));
    let c = classify(n, h)?;
    let Some(w) = c.witness else {
        o.say(format!("F_{h}({n}) is regular; there is no bad cell"));
        return Ok(o);
    };
    for d in source_target_witnesses(&w.barcode)? {
        o.push(json!({
            "cell": w.barcode.to_string(),
            "suspensions": w.suspensions,
            "dim": w.dim,
            "level": d.level,
            "size": d.size,
            "a": d.a,
            "b": d.b,
            "amputated": Barcode::unlabeled(&d.amputated_gaps).to_string(),
            "amputated_dim": d.amputated_dim,
            "element": d.element.to_string(),
        }));
    }
    o.say(format!("bad cell {} of dimension {} with {} source-target data", w.barcode, w.dim, o.records.len()));
    Ok(o)
}

fn read_file(p: &Path) -> Result<String> {
    std::fs::read_to_string(p).map_err(|e| Error::Validation(format!("cannot read {}: {e}", p.display())))
}

fn counterterm(b: &Barcode, verify: Option<&Path>) -> Result<Output> {
    let mut o = Output::new(
        "counterterm",
        json!({ "barcode": b.to_string(), "verify": verify.map(|p| p.display().to_string()) }),
    );
    match verify {
        Some(p) => {
            let terms: Vec<OperadTerm> =
                read_file(p)?.split_whitespace().map(str::parse).collect::<Result<_>>()?;
            let ok = verify_counterterm(b, &terms)?;
            o.push(json!({ "barcode": b.to_string(), "terms": terms.len(), "verified": ok }));
            o.say(format!("{} terms {} the boundary condition", terms.len(), if ok { "satisfy" } else { "do not satisfy" }));
        }
        None => {
            let r = find_counterterm(b)?;
            o.say(match &r.counterterm {
                Some(u) => format!("counterterm with {} terms found among {} candidates", u.len(), r.pool_size),
                None => format!("no counterterm among {} candidates", r.pool_size),
            });
            o.push(&r);
        }
    }
    Ok(o)
}

fn homology(n: usize, h: Height, dmax: Option<usize>) -> Result<Output> {
    let d_max = match (dmax, h) {
        (Some(d), _) => d,
        (None, Height::Finite(hh)) => hh * n - hh - 1,
        (None, Height::Infinite) => return Err(Error::Validation("--dmax is required for height inf".into())),
    };
    let mut o = Output::new("homology", json!({ "arity": n, "height": h, "dmax": d_max }));
    let c = build_G_complex(n, h, d_max)?;
    let reports = homology_reports(&c)?;
    let nonzero: Vec<String> = reports.iter().filter(|r| r.rank > 0).map(|r| format!("H_{} = Z^{}", r.degree, r.rank)).collect();
    let torsion = reports.iter().any(|r| !r.torsion.is_empty());
    for r in &reports {
        o.push(r);
    }
    o.say(format!(
        "n = {n}, h = {h}: {}{}",
        if nonzero.is_empty() { "acyclic".to_string() } else { nonzero.join(", ") },
        if torsion { ", with torsion" } else { ", torsion free" }
    ));
    Ok(o)
}

fn lie(action: LieAction, n: usize, input: Option<&Path>, signed: bool) -> Result<Output> {
    if !(2..=6).contains(&n) {
        return Err(Error::Capacity(format!("free Lie computations are limited to 2 ≤ n ≤ 6, got {n}")));
    }
    let name = match action {
        LieAction::Ree => "lie ree",
        LieAction::Coords => "lie coords",
        LieAction::Quotient => "lie quotient",
    };
    let mut o = Output::new(
        name,
        json!({ "n": n, "input": input.map(|p| p.display().to_string()), "signed": signed }),
    );
    match action {
        LieAction::Quotient => {
            let r = ush_quotient_report(n, signed)?;
            o.say(format!(
                "n = {n}: unshuffle rank {}, quotient rank {}, pairing determinant {}",
                r.ush_rank, r.quotient_rank, r.pairing_det
            ));
            o.push(&r);
        }
        LieAction::Ree | LieAction::Coords => {
            let p = input.ok_or_else(|| Error::Validation("--input is required".into()))?;
            let f = parse_tensor(&read_file(p)?)?;
            if f.keys().any(|w| w.len() != n) {
                return Err(Error::Validation(format!("words must have length {n}")));
            }
            let r = ree_report(&f, n);
            if r.ree != r.oracle {
                return Err(Error::Internal("the unshuffle test and the span test disagree".into()));
            }
            o.say(if r.ree { "a Lie element" } else { "not a Lie element" });
            if action == LieAction::Ree {
                o.push(json!({ "n": n, "ree": r.ree, "oracle": r.oracle }));
            } else {
                o.push(&r);
            }
        }
    }
    Ok(o)
}

fn selftest(no_determinism: bool, only: &[usize]) -> Result<Output> {
    let mut o = Output::new("selftest", json!({ "only": only }));
    let ids: Vec<usize> = if only.is_empty() {
        acceptance::CRITERIA.iter().map(|c| c.0).collect()
    } else {
        only.to_vec()
    };
    let mut all = true;
    for id in ids.iter().copied().filter(|&i| i != 8) {
        let r = acceptance::run(id);
        all &= r.pass;
        o.say(format!("{} ({:.1} s)", r.line(), r.elapsed.as_secs_f64()));
        o.push(&r);
    }
    if !no_determinism && (only.is_empty() || only.contains(&8)) {
        let r = determinism(&ids)?;
        all &= r.pass;
        o.say(r.line());
        o.push(&r);
    }
    o.status = if all { 0 } else { 3 };
    Ok(o)
}

/// Criterion 8: two child runs of `selftest` write identical bytes.
pub fn determinism_check(exe: &Path, ids: &[usize]) -> Result<acceptance::CriterionReport> {
    let start = std::time::Instant::now();
    let mut args = vec!["selftest".to_string(), "--no-determinism".to_string()];
    let ids: Vec<String> = ids.iter().filter(|&&i| i != 8).map(|i| i.to_string()).collect();
    if !ids.is_empty() {
        args.push(format!("--only={}", ids.join(",")));
    }
    let mut outputs = Vec::new();
    for _ in 0..2 {
        let out = std::process::Command::new(exe)
            .args(&args)
            .output()
            .map_err(|e| Error::Internal(format!("cannot run {}: {e}", exe.display())))?;
        outputs.push(out.stdout);
    }
    let same = outputs[0] == outputs[1];
    Ok(acceptance::CriterionReport {
        criterion: 8,
        title: "determinism".into(),
        pass: same && !outputs[0].is_empty(),
        checks: vec![acceptance::Check {
            name: "two selftest runs".into(),
            pass: same,
            detail: format!("{} and {} bytes, identical: {same}", outputs[0].len(), outputs[1].len()),
        }],
        elapsed: start.elapsed(),
    })
}

fn determinism(ids: &[usize]) -> Result<acceptance::CriterionReport> {
    let exe = std::env::current_exe().map_err(|e| Error::Internal(format!("no executable path: {e}")))?;
    determinism_check(&exe, ids)
}
