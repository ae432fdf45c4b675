//! The `acstk` command-line front end.
//!
//! Exit codes: 0 success, 1 validation failure, 2 numerical failure,
//! 3 search exhausted, 64 usage error.

use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use serde::Serialize;
use serde_json::{json, Value};

use crate::acs::{catalog_acs, Acs, AcsDoc, ACS_CATALOG_NAMES};
use crate::algebra::{catalog, LieAlgebra, CATALOG_NAMES};
use crate::deform::{
    bernstein_curve, catalog_curve, perturb_to_rank, rank_profile, refine_exceptional, CurveL,
    SamplesDoc, CURVE_CATALOG_NAMES,
};
use crate::error::{Error, Result};
use crate::invariants::h1_ddc;
use crate::linalg::{self, TOL_RANK_ABS, TOL_RANK_REL};
use crate::nijenhuis::{mu_bar_matrix, RankTol};
use crate::patch::{min_rank_on_grid, PatchAcs};
use crate::report::{self, table, to_stable_json};

pub const EXIT_USAGE: i32 = 64;
const CATALOG_PREFIX: &str = "catalog:";

#[derive(Debug, Parser)]
#[command(name = "acstk", version, about = "Almost complex structure toolkit")]
struct Cli {
    #[command(flatten)]
    common: Common,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Args, Clone)]
struct Common {
    /// Relative singular-value threshold for numerical rank.
    #[arg(long, global = true, default_value_t = TOL_RANK_REL)]
    tol_rank_rel: f64,
    /// Absolute singular-value threshold for numerical rank.
    #[arg(long, global = true, default_value_t = TOL_RANK_ABS)]
    tol_rank_abs: f64,
    /// Seed for randomized commands.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// Emit stable JSON instead of a table.
    #[arg(long, global = true)]
    json: bool,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Check input files (or catalog names) for well-formedness.
    Validate(ValidateArgs),
    /// Complex rank of the Nijenhuis tensor of an invariant structure.
    Rank(RankArgs),
    /// Rank profile along a polynomial curve of structures.
    CurveScan(ScanArgs),
    /// Localize the parameters where the rank drops.
    CurveRefine(RefineArgs),
    /// Random search for a nearby structure of at least a given rank.
    Perturb(PerturbArgs),
    /// Bernstein approximation of sampled deformation data.
    Approx(ApproxArgs),
    /// h1 of d + d^c and b1 for an invariant structure.
    Invariants(PairArgs),
    /// Minimum rank of a coordinate patch over a grid.
    PatchRank(PatchRankArgs),
    /// Coordinate patch commands.
    Patch {
        #[command(subcommand)]
        command: PatchCommand,
    },
    /// List built-in algebras, structures and curves, or print one.
    Catalog { name: Option<String> },
}

#[derive(Debug, Subcommand)]
enum PatchCommand {
    /// Same as `patch-rank`.
    Rank(PatchRankArgs),
}

#[derive(Debug, Args)]
#[group(required = true, multiple = true)]
struct ValidateArgs {
    #[arg(long)]
    algebra: Option<String>,
    #[arg(long)]
    acs: Option<String>,
    #[arg(long)]
    curve: Option<String>,
    #[arg(long)]
    patch: Option<PathBuf>,
    #[arg(long)]
    samples: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct PairArgs {
    #[arg(long)]
    algebra: String,
    #[arg(long)]
    acs: String,
}

#[derive(Debug, Args)]
struct RankArgs {
    #[command(flatten)]
    pair: PairArgs,
    /// Write the matrix G as {"re": .., "im": ..} JSON.
    #[arg(long)]
    dump_g: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct ScanArgs {
    #[arg(long)]
    algebra: String,
    #[arg(long)]
    curve: String,
    #[arg(long, default_value_t = 1001)]
    grid: usize,
    /// Write the profile as CSV (`t,rank,sigma_k`).
    #[arg(long)]
    csv: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct RefineArgs {
    #[arg(long)]
    algebra: String,
    #[arg(long)]
    curve: String,
    /// Rank threshold; defaults to the generic rank of the curve.
    #[arg(long)]
    k: Option<usize>,
    /// `lo,hi`; defaults to the curve domain.
    #[arg(long, value_parser = parse_interval, allow_hyphen_values = true)]
    interval: Option<(f64, f64)>,
    #[arg(long, default_value_t = 40)]
    max_iter: usize,
    #[arg(long, default_value_t = 1001)]
    grid: usize,
}

#[derive(Debug, Args)]
struct PerturbArgs {
    #[command(flatten)]
    pair: PairArgs,
    #[arg(long)]
    target_rank: usize,
    #[arg(long, default_value_t = 1e-3)]
    eps: f64,
    #[arg(long, default_value_t = 100)]
    trials: usize,
    /// Write the structure found as JSON.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct ApproxArgs {
    #[arg(long)]
    samples: PathBuf,
    #[arg(long)]
    degree: usize,
    /// Write the fitted curve as JSON.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct PatchRankArgs {
    #[arg(long)]
    patch: PathBuf,
    #[arg(long, default_value_t = 5)]
    per_axis: usize,
}

fn parse_interval(s: &str) -> std::result::Result<(f64, f64), String> {
    let (a, b) = s.split_once(',').ok_or("expected lo,hi")?;
    let lo: f64 = a.trim().parse().map_err(|e| format!("{e}"))?;
    let hi: f64 = b.trim().parse().map_err(|e| format!("{e}"))?;
    Ok((lo, hi))
}

/// Run the CLI on an argument list (program name first) and return the exit code.
pub fn execute<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    let threads = match std::env::var("ACSTK_THREADS") {
        Ok(v) => match v.trim().parse::<usize>() {
            Ok(n) => n,
            Err(_) => {
                eprintln!("error: ACSTK_THREADS must be a non-negative integer, got '{v}'");
                return EXIT_USAGE;
            }
        },
        Err(_) => 0,
    };
    let pool = match rayon::ThreadPoolBuilder::new().num_threads(threads).build() {
        Ok(p) => p,
        Err(e) => {
            eprintln!("error: {e}");
            return 2;
        }
    };
    match pool.install(|| run(&cli)) {
        Ok(text) => {
            print!("{text}");
            0
        }
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}

fn read(path: &Path) -> Result<String> {
    std::fs::read_to_string(path)
        .map_err(|e| Error::Io(std::io::Error::new(e.kind(), format!("{}: {e}", path.display()))))
}

/// Resolve a path or catalog name: `catalog:` forces the catalog, an
/// existing file wins otherwise, and a bare name falls back to the catalog.
fn resolve<T>(
    input: &str,
    from_json: impl Fn(&str) -> Result<T>,
    from_catalog: impl Fn(&str) -> Result<T>,
) -> Result<T> {
    if let Some(name) = input.strip_prefix(CATALOG_PREFIX) {
        return from_catalog(name);
    }
    let path = Path::new(input);
    if path.exists() {
        return from_json(&read(path)?);
    }
    from_catalog(input).map_err(|_| {
        Error::validation(format!("'{input}' is neither a readable file nor a catalog name"))
    })
}

fn load_algebra(input: &str) -> Result<LieAlgebra> {
    resolve(input, LieAlgebra::from_json, catalog)
}

fn load_acs(input: &str) -> Result<Acs> {
    resolve(input, Acs::from_json, catalog_acs)
}

fn load_curve(input: &str) -> Result<CurveL> {
    resolve(input, CurveL::from_json, catalog_curve)
}

fn load_patch(path: &Path) -> Result<PatchAcs> {
    PatchAcs::from_json(&read(path)?)
}

fn write_json<T: Serialize + ?Sized>(path: &Path, value: &T) -> Result<()> {
    std::fs::write(path, to_stable_json(value)?)?;
    Ok(())
}

struct Ctx<'a> {
    common: &'a Common,
    tol: RankTol,
}

impl Ctx<'_> {
    fn config(&self, command: &str, extra: Value) -> Value {
        let mut cfg = json!({
            "command": command,
            "tol_rank_rel": self.tol.rel,
            "tol_rank_abs": self.tol.abs,
            "seed": self.common.seed,
        });
        // The thread count is left out: results do not depend on it.
        if let (Value::Object(c), Value::Object(e)) = (&mut cfg, extra) {
            c.extend(e);
        }
        cfg
    }

    fn emit(&self, command: &str, extra: Value, result: Value, human: String) -> Result<String> {
        if self.common.json {
            to_stable_json(&json!({ "config": self.config(command, extra), "result": result }))
        } else {
            Ok(human)
        }
    }
}

fn run(cli: &Cli) -> Result<String> {
    let tol = RankTol::new(cli.common.tol_rank_rel, cli.common.tol_rank_abs)?;
    let ctx = Ctx { common: &cli.common, tol };
    match &cli.command {
        Command::Validate(a) => validate(&ctx, a),
        Command::Rank(a) => rank(&ctx, a),
        Command::CurveScan(a) => curve_scan(&ctx, a),
        Command::CurveRefine(a) => curve_refine(&ctx, a),
        Command::Perturb(a) => perturb(&ctx, a),
        Command::Approx(a) => approx(&ctx, a),
        Command::Invariants(a) => invariants(&ctx, a),
        Command::PatchRank(a) | Command::Patch { command: PatchCommand::Rank(a) } => {
            patch_rank(&ctx, a)
        }
        Command::Catalog { name } => catalog_cmd(&ctx, name.as_deref()),
    }
}

fn validate(ctx: &Ctx, a: &ValidateArgs) -> Result<String> {
    let mut rows: Vec<(&str, String)> = Vec::new();
    let mut result = serde_json::Map::new();
    if let Some(s) = &a.algebra {
        let g = load_algebra(s)?;
        rows.push(("algebra", format!("ok (dim {}, {} brackets)", g.dim(), g.to_doc().brackets.len())));
        result.insert("algebra".into(), json!({"dim": g.dim(), "name": g.name()}));
    }
    if let Some(s) = &a.acs {
        let j = load_acs(s)?;
        let defect = linalg::max_abs(&(j.matrix() * j.matrix() + linalg::identity(j.dim())));
        rows.push(("acs", format!("ok (dim {}, |J^2+I| = {defect:.3e})", j.dim())));
        result.insert("acs".into(), json!({"dim": j.dim(), "j2_defect": defect}));
    }
    if let Some(s) = &a.curve {
        let c = load_curve(s)?;
        rows.push(("curve", format!("ok (dim {}, degree {})", c.dim(), c.degree())));
        result.insert("curve".into(), json!({"dim": c.dim(), "degree": c.degree()}));
    }
    if let Some(p) = &a.patch {
        let patch = load_patch(p)?;
        rows.push(("patch", format!("ok (dim {})", patch.dim())));
        result.insert("patch".into(), json!({"dim": patch.dim()}));
    }
    if let Some(p) = &a.samples {
        let doc: SamplesDoc = serde_json::from_str(&read(p)?)?;
        let (j0, samples) = doc.parse()?;
        rows.push(("samples", format!("ok (dim {}, {} samples)", j0.dim(), samples.len())));
        result.insert("samples".into(), json!({"dim": j0.dim(), "count": samples.len()}));
    }
    let extra = json!({
        "algebra": a.algebra, "acs": a.acs, "curve": a.curve,
        "patch": a.patch, "samples": a.samples,
    });
    ctx.emit("validate", extra, Value::Object(result), table(&rows))
}

fn rank(ctx: &Ctx, a: &RankArgs) -> Result<String> {
    let g = load_algebra(&a.pair.algebra)?;
    let j = load_acs(&a.pair.acs)?;
    let mu = mu_bar_matrix(&g, &j)?;
    let sv = mu.singular_values();
    let r = ctx.tol.rank(&sv);
    if let Some(path) = &a.dump_g {
        write_json(path, &mu.to_doc())?;
    }
    let extra = json!({"algebra": a.pair.algebra, "acs": a.pair.acs, "dump_g": a.dump_g});
    ctx.emit("rank", extra, json!({"rank": r, "singular_values": sv}), format!("rank = {r}\n"))
}

fn fmt_intervals(v: &[(f64, f64)]) -> String {
    if v.is_empty() {
        return "none".into();
    }
    v.iter().map(|(a, b)| format!("[{a:e}, {b:e}]")).collect::<Vec<_>>().join(" ")
}

fn curve_scan(ctx: &Ctx, a: &ScanArgs) -> Result<String> {
    let g = load_algebra(&a.algebra)?;
    let curve = load_curve(&a.curve)?;
    let profile = rank_profile(&g, &curve, a.grid, ctx.tol)?;
    if let Some(path) = &a.csv {
        report::write_profile_csv(&profile, path)?;
    }
    let rows = vec![
        ("generic_rank", profile.generic_rank.to_string()),
        ("points", profile.points.len().to_string()),
        ("skipped", profile.skipped.len().to_string()),
        ("flagged", profile.flagged.to_string()),
        ("exceptional", fmt_intervals(&profile.exceptional)),
        ("semicontinuity", if profile.semicontinuity_ok { "ok" } else { "violated" }.to_string()),
    ];
    let extra = json!({"algebra": a.algebra, "curve": a.curve, "grid": a.grid, "csv": a.csv});
    let result = json!({
        "generic_rank": profile.generic_rank,
        "exceptional": profile.exceptional,
        "flagged": profile.flagged,
        "k": profile.k,
        "points": profile.points.len(),
        "skipped": profile.skipped,
        "semicontinuity_ok": profile.semicontinuity_ok,
    });
    ctx.emit("curve-scan", extra, result, table(&rows))
}

fn curve_refine(ctx: &Ctx, a: &RefineArgs) -> Result<String> {
    let g = load_algebra(&a.algebra)?;
    let curve = load_curve(&a.curve)?;
    let interval = a.interval.unwrap_or(curve.domain());
    let k = match a.k {
        Some(k) => k,
        None => rank_profile(&g, &curve, a.grid, ctx.tol)?.generic_rank.max(1),
    };
    let r = refine_exceptional(&g, &curve, k, interval, a.max_iter, a.grid, ctx.tol)?;
    let mut rows = vec![("k", k.to_string()), ("intervals", fmt_intervals(&r.intervals))];
    if r.identically_below {
        rows.push(("note", format!("sigma_{k} is below threshold at every grid point")));
    }
    let extra = json!({
        "algebra": a.algebra, "curve": a.curve, "k": k, "interval": [interval.0, interval.1],
        "max_iter": a.max_iter, "grid": a.grid,
    });
    ctx.emit("curve-refine", extra, serde_json::to_value(&r)?, table(&rows))
}

fn perturb(ctx: &Ctx, a: &PerturbArgs) -> Result<String> {
    let g = load_algebra(&a.pair.algebra)?;
    let j0 = load_acs(&a.pair.acs)?;
    let s = perturb_to_rank(&g, &j0, a.target_rank, a.eps, a.trials, ctx.common.seed, ctx.tol)?;
    if let Some(path) = &a.out {
        write_json(path, &s.acs.to_doc())?;
    }
    let rows = vec![
        ("rank", s.rank.to_string()),
        ("distance", format!("{:e}", s.distance)),
        ("trial", s.trial.to_string()),
        ("step", format!("{:e}", s.step)),
    ];
    let extra = json!({
        "algebra": a.pair.algebra, "acs": a.pair.acs, "target_rank": a.target_rank,
        "eps": a.eps, "trials": a.trials, "out": a.out,
    });
    let mut result = serde_json::to_value(&s)?;
    result["j"] = json!(linalg::to_rows(s.acs.matrix()));
    ctx.emit("perturb", extra, result, table(&rows))
}

fn approx(ctx: &Ctx, a: &ApproxArgs) -> Result<String> {
    let doc: SamplesDoc = serde_json::from_str(&read(&a.samples)?)?;
    let (j0, samples) = doc.parse()?;
    let fit = bernstein_curve(&j0, &samples, a.degree)?;
    if let Some(path) = &a.out {
        write_json(path, &fit.curve.to_doc())?;
    }
    let rows = vec![
        ("degree", fit.degree.to_string()),
        ("sup_error", format!("{:e}", fit.sup_error)),
        ("c0_error", format!("{:e}", fit.c0_error)),
    ];
    let extra = json!({"samples": a.samples, "degree": a.degree, "out": a.out});
    let result = json!({
        "degree": fit.degree, "sup_error": fit.sup_error, "c0_error": fit.c0_error,
        "curve": fit.curve.to_doc(),
    });
    ctx.emit("approx", extra, result, table(&rows))
}

fn invariants(ctx: &Ctx, a: &PairArgs) -> Result<String> {
    let g = load_algebra(&a.algebra)?;
    let j = load_acs(&a.acs)?;
    let r = h1_ddc(&g, &j)?;
    let rows = vec![
        ("h1_ddc", r.h1_ddc.to_string()),
        ("b1", r.b1.to_string()),
        ("method_a", r.method_a.to_string()),
        ("method_b", r.method_b.to_string()),
        ("rank", r.rank.to_string()),
        ("level", "invariant forms".to_string()),
    ];
    let extra = json!({"algebra": a.algebra, "acs": a.acs});
    ctx.emit("invariants", extra, serde_json::to_value(r)?, table(&rows))
}

fn patch_rank(ctx: &Ctx, a: &PatchRankArgs) -> Result<String> {
    let p = load_patch(&a.patch)?;
    let r = min_rank_on_grid(&p, a.per_axis, ctx.tol)?;
    let rows = vec![
        ("k_min", r.k_min.to_string()),
        ("argmin", format!("{:?}", r.argmin)),
        ("points", r.points.to_string()),
    ];
    let extra = json!({"patch": a.patch, "per_axis": a.per_axis});
    ctx.emit("patch-rank", extra, serde_json::to_value(&r)?, table(&rows))
}

fn catalog_cmd(ctx: &Ctx, name: Option<&str>) -> Result<String> {
    let Some(name) = name else {
        let rows = vec![
            ("algebras", CATALOG_NAMES.join(", ")),
            ("structures", ACS_CATALOG_NAMES.join(", ")),
            ("curves", CURVE_CATALOG_NAMES.join(", ")),
        ];
        let result = json!({
            "algebras": CATALOG_NAMES, "structures": ACS_CATALOG_NAMES, "curves": CURVE_CATALOG_NAMES,
        });
        return ctx.emit("catalog", json!({}), result, table(&rows));
    };
    let name = name.strip_prefix(CATALOG_PREFIX).unwrap_or(name);
    let doc = if let Ok(g) = catalog(name) {
        serde_json::to_value(g.to_doc())?
    } else if let Ok(j) = catalog_acs(name) {
        serde_json::to_value::<AcsDoc>(j.to_doc())?
    } else if let Ok(c) = catalog_curve(name) {
        serde_json::to_value(c.to_doc())?
    } else {
        return Err(Error::validation(format!("unknown catalog entry '{name}'")));
    };
    // The entry itself is the artifact: it loads back through --algebra/--acs/--curve.
    to_stable_json(&doc)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn run_args(args: &[&str]) -> i32 {
        execute(std::iter::once("acstk").chain(args.iter().copied()))
    }

    #[test]
    fn usage_errors_exit_64() {
        assert_eq!(run_args(&[]), EXIT_USAGE);
        assert_eq!(run_args(&["frobnicate"]), EXIT_USAGE);
        assert_eq!(run_args(&["rank", "--algebra", "heis3xR3"]), EXIT_USAGE);
        assert_eq!(run_args(&["--help"]), 0);
    }

    #[test]
    fn interval_parser() {
        assert_eq!(parse_interval("-0.5,0.5"), Ok((-0.5, 0.5)));
        assert!(parse_interval("0.5").is_err());
    }
}
