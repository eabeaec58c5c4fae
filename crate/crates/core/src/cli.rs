//! Command-line front end. Exit codes: 0 success, 1 invalid config,
//! 2 action not small, 3 resource cap, 4 internal verification failure.

use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand};
use serde_json::json;

use crate::config::{Format, RunConfig};
use crate::diagmu::{self, crosscheck_constant_realization, veronese_summand_counts};
use crate::equivmod::format_degree;
use crate::error::{Error, Result};
use crate::fsig::{find_regular_summand, Pipeline};
use crate::groupscheme::GroupScheme;
use crate::invariants::{hilbert_function_compare, InvariantRing};
use crate::modrep::simples_and_projective_covers;

#[derive(Parser, Debug)]
#[command(name = "frobsig", version, about = "Frobenius summand counts and F-signatures of invariant rings")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(clap::Args, Debug)]
struct Common {
    #[arg(long)]
    config: PathBuf,
    /// Overrides `e_max` from the config.
    #[arg(long)]
    e_max: Option<u32>,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Smallness, linear reductivity and e_0 of the configured action.
    CheckSmall(Common),
    /// Invariant generators and Hilbert function up to `degree_bound`.
    Invariants(Common),
    /// Summand counts of the Frobenius pushforwards per shift.
    Frobenius(Common),
    /// Measured counts against predicted F-signatures.
    Fsig(Common),
    /// Predicted Frobenius limit coefficients and F-signatures.
    Predict(Common),
    /// Split copy of the regular representation in degrees up to `degree_bound`.
    RegularSummand(Common),
    /// Compares the weight-class oracle with the constant realization of the μ-part.
    Crosscheck(Common),
}

/// Parses `argv` (including the program name), runs, and returns the exit code.
pub fn run<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    match dispatch(cli.command) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}

fn load(common: &Common) -> Result<RunConfig> {
    let mut cfg = RunConfig::load(&common.config)?;
    if let Some(e) = common.e_max {
        cfg.e_max = e;
        cfg.validate()?;
    }
    Ok(cfg)
}

/// `FROBSIG_THREADS`, defaulting to the available parallelism.
fn threads() -> Result<usize> {
    match std::env::var("FROBSIG_THREADS") {
        Ok(v) => v
            .trim()
            .parse::<usize>()
            .ok()
            .filter(|&n| n > 0)
            .ok_or_else(|| Error::config("FROBSIG_THREADS", "must be a positive integer")),
        Err(_) => Ok(std::thread::available_parallelism().map_or(1, |n| n.get())),
    }
}

/// Writes the report to `output.path` atomically, or to stdout.
fn emit(cfg: &RunConfig, body: &str, summary: &str) -> Result<()> {
    match &cfg.output.path {
        Some(p) => {
            let path = Path::new(p);
            let dir = path.parent().filter(|d| !d.as_os_str().is_empty()).unwrap_or(Path::new("."));
            let mut tmp = tempfile::NamedTempFile::new_in(dir)?;
            tmp.write_all(body.as_bytes())?;
            tmp.persist(path).map_err(|e| Error::Io(e.error))?;
            print!("{summary}");
        }
        None => print!("{body}"),
    }
    Ok(())
}

fn json_text(v: &serde_json::Value) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("json serializes");
    s.push('\n');
    s
}

fn dispatch(cmd: Command) -> Result<i32> {
    match cmd {
        Command::CheckSmall(c) => check_small(&load(&c)?),
        Command::Invariants(c) => invariants(&load(&c)?),
        Command::Frobenius(c) => frobenius(&load(&c)?),
        Command::Fsig(c) => fsig(&load(&c)?),
        Command::Predict(c) => predict(&load(&c)?),
        Command::RegularSummand(c) => regular_summand(&load(&c)?),
        Command::Crosscheck(c) => crosscheck(&load(&c)?),
    }
}

fn check_small(cfg: &RunConfig) -> Result<i32> {
    let g = cfg.group()?;
    let report = g.is_small();
    let body = json!({
        "config_hash": cfg.config_hash(),
        "small": report.small,
        "factorwise": report.factorwise,
        "witness": report.witness,
        "linearly_reductive": g.is_linearly_reductive(),
        "group_order": g.order(),
        "e0": g.infinitesimal_e0(),
    });
    let summary = format!("small: {}\n", report.small);
    emit(cfg, &json_text(&body), &summary)?;
    if let Some(w) = &report.witness {
        eprintln!("not small: {w}");
        return Ok(2);
    }
    Ok(0)
}

fn invariants(cfg: &RunConfig) -> Result<i32> {
    let g = cfg.group()?;
    let mut ring = InvariantRing::new(&g);
    let data = ring.generators_up_to(cfg.degree_bound)?;
    for (i, p) in data.generator_polys.iter().enumerate() {
        if !ring.is_invariant(p) {
            return Err(Error::Verification(format!("generator {i} is not invariant")));
        }
        if g.is_linearly_reductive() && ring.reynolds(p)? != *p {
            return Err(Error::Verification(format!("Reynolds operator moves generator {i}")));
        }
    }
    let mut body = data.to_json();
    if g.is_constant_only() {
        let reps = simples_and_projective_covers(g.field(), g.constant())?;
        let check = hilbert_function_compare(&g, &reps, cfg.degree_bound)?;
        if !check.agree {
            return Err(Error::Verification("label Hilbert functions do not add up to dim S_n".into()));
        }
        body["hilbert_check"] = serde_json::to_value(&check).expect("serializes");
    }
    body["config_hash"] = json!(cfg.config_hash());
    let summary = format!(
        "{} generators up to degree {}; hilbert {:?}\n",
        data.generators.len(),
        cfg.degree_bound,
        data.hilbert
    );
    emit(cfg, &json_text(&body), &summary)?;
    Ok(0)
}

fn frobenius(cfg: &RunConfig) -> Result<i32> {
    let g = cfg.group()?;
    let mut out = String::new();
    if g.is_diagonal_only() && !g.is_constant_only() {
        out.push_str(diagmu::CSV_HEADER);
        out.push('\n');
        for e in 1..=cfg.e_max {
            for row in veronese_summand_counts(g.diag(), g.field().p(), g.dim(), e)?.to_csv_rows() {
                out.push_str(&row);
                out.push('\n');
            }
        }
    } else {
        out.push_str("e,label,shift,count,normalized\n");
        let source = cfg.source_module(&g)?;
        let p = Pipeline::without_smallness_gate(g, source, cfg.caps.slice_max)?;
        let denom_base = p.group().field().p() as f64;
        let d = p.group().dim();
        for e in 1..=cfg.e_max {
            let denom = denom_base.powi((e as usize * d) as i32);
            for row in p.measure_e(e)?.rows {
                for (shift, k) in &row.per_shift {
                    out.push_str(&format!(
                        "{e},{},{},{k},{:.6}\n",
                        row.label,
                        format_degree(shift),
                        *k as f64 / denom
                    ));
                }
            }
        }
    }
    emit(cfg, &out, "frobenius summand counts written\n")?;
    Ok(0)
}

fn pipeline(cfg: &RunConfig, g: GroupScheme) -> Result<Pipeline> {
    let source = cfg.source_module(&g)?;
    Pipeline::new(g, source, cfg.caps.slice_max)
}

fn fsig(cfg: &RunConfig) -> Result<i32> {
    let g = cfg.group()?;
    let p = pipeline(cfg, g)?;
    let report = p.measure(cfg.e_max, threads()?, &cfg.config_hash())?;
    let body = match cfg.output.format {
        Format::Csv => report.to_csv(),
        Format::Json => json_text(&report.to_json()),
    };
    let mut summary = String::from("e  label          count  normalized  predicted  deviation\n");
    for r in report.rows() {
        summary.push_str(&format!(
            "{:<2} {:<14} {:>5}  {:>10.6}  {:>9.6}  {:>9.6}\n",
            r.e, r.label, r.count, r.normalized, r.predicted, r.deviation
        ));
    }
    if let Some(msg) = &report.partial {
        eprintln!("partial e-range: {msg}");
    }
    emit(cfg, &body, &summary)?;
    Ok(if report.partial.is_some() { 3 } else { 0 })
}

fn predict(cfg: &RunConfig) -> Result<i32> {
    let g = cfg.group()?;
    let p = pipeline(cfg, g)?;
    let body = json!({
        "config_hash": cfg.config_hash(),
        "prediction": p.prediction(),
        "e0": p.group().infinitesimal_e0(),
    });
    let summary = format!("s(A) = {}\n", p.prediction().s_a);
    emit(cfg, &json_text(&body), &summary)?;
    Ok(0)
}

fn regular_summand(cfg: &RunConfig) -> Result<i32> {
    let g = cfg.group()?;
    let found = find_regular_summand(&g, cfg.degree_bound)?;
    let mut body = serde_json::to_value(&found).expect("serializes");
    body["config_hash"] = json!(cfg.config_hash());
    if let (Some(emb), Some(ret)) = (&found.embedding, &found.retraction) {
        let rows = |m: &crate::gf::Matrix| -> Vec<Vec<u32>> {
            (0..m.rows()).map(|r| m.row(r).iter().map(|x| x.index()).collect()).collect()
        };
        body["embedding"] = json!(rows(emb));
        body["retraction"] = json!(rows(ret));
    }
    let summary = if found.found {
        format!("found in degrees <= {}\n", found.degree.unwrap_or(0))
    } else {
        format!("not found up to {}\n", cfg.degree_bound)
    };
    emit(cfg, &json_text(&body), &summary)?;
    Ok(0)
}

fn crosscheck(cfg: &RunConfig) -> Result<i32> {
    let g = cfg.group()?;
    if g.diag().is_empty() || !g.is_diagonal_only() {
        return Err(Error::config("group", "crosscheck needs a diagonalizable-only descriptor"));
    }
    let mut reports = Vec::new();
    for e in 1..=cfg.e_max {
        reports.push(crosscheck_constant_realization(g.field(), g.diag(), e)?);
    }
    let agree = reports.iter().all(|r| r.agree);
    let body = json!({ "config_hash": cfg.config_hash(), "agree": agree, "levels": reports });
    emit(cfg, &json_text(&body), &format!("agree: {agree}\n"))?;
    if !agree {
        return Err(Error::Verification("pipelines disagree".into()));
    }
    Ok(0)
}
