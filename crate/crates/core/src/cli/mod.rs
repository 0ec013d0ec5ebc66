//! The `hydra` command line: argument parsing, dispatch and report rendering.

use std::ffi::OsString;
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use num_complex::Complex64;
use serde::Serialize;
use serde_json::{json, Value};

use crate::checks::{run_suite, Suite};
use crate::dreamcatcher::{qh_apply_basis, saul_walk, truncated_kernel, KernelConfig};
use crate::error::{HydraError, Result};
use crate::exact::RatMod1;
use crate::hydra::HydraMap;
use crate::orbit::census::{cache_dir, census_cached};
use crate::orbit::{census, density_estimates, geometric_grid, iterate_orbit, CensusParams, OrbitCensus};
use crate::series::{
    cross_section_signature, default_norm_schedule, eval_series, exact_residue, geometric_schedule, hltt_cross_check,
    semi_hardy_norm, ssl_check, virtual_residue, SeriesKind, SetSpec,
};

pub const EXIT_OK: i32 = 0;
pub const EXIT_FAILED_CHECK: i32 = 1;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_CAPABILITY: i32 = 3;
pub const EXIT_RESOURCE: i32 = 4;

#[derive(Parser, Debug)]
#[command(name = "hydra", version, about = "Hydra maps, orbit censuses, set-series residues and dreamcatchers")]
pub struct Cli {
    /// Map source: catalog name (H3, H5, Hp:<p>, T+1, T-1) or path to a JSON config.
    #[arg(short = 'm', long = "map", global = true)]
    pub map: Option<String>,
    #[arg(long, value_enum, default_value_t = Format::Json, global = true)]
    pub format: Format,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Format {
    Json,
    Csv,
}

#[derive(Subcommand, Debug, Serialize)]
#[serde(tag = "name", rename_all = "snake_case")]
pub enum Command {
    /// Well-formedness, surjectivity, primality and regulated branches of a map.
    Validate,
    /// Trajectory of one starting value.
    Orbit(OrbitArgs),
    /// Orbit classes of 0..=N.
    Census(CensusArgs),
    /// Partial densities |V(N)|/N, optionally with a cross-section signature.
    Density(DensityArgs),
    /// Evaluate a set-series at a point.
    Series(SeriesArgs),
    /// Virtual residue of a set-series at a rational point.
    Residue(ResidueArgs),
    /// Square-sum of residues against the density bound.
    Ssl(SslArgs),
    /// Semi-Hardy norm estimate of a Fourier set-series.
    Norm(NormArgs),
    /// Image of an indicator under the dreamcatcher operator.
    Image(ImageArgs),
    /// Exact fixed points supported on bounded denominators.
    Kernel(KernelArgs),
    /// Support-growth walk from a rational point.
    Walk(WalkArgs),
    /// Run seeded invariant suites.
    Check(CheckArgs),
}

#[derive(Args, Debug, Serialize)]
pub struct OrbitArgs {
    /// Starting value.
    #[arg(short = 'N')]
    pub n: u64,
    #[arg(long, default_value_t = 10_000)]
    pub max_steps: usize,
    #[arg(long, default_value_t = u64::MAX / 8)]
    pub max_value: u64,
}

#[derive(Args, Debug, Serialize)]
pub struct CensusArgs {
    #[arg(short = 'N')]
    pub n: u64,
    #[arg(long, default_value_t = 10_000)]
    pub max_steps: usize,
    /// Union-find domain bound, default 64 N.
    #[arg(long)]
    pub max_value: Option<u64>,
    #[arg(long, default_value_t = 1)]
    #[serde(skip)]
    pub threads: usize,
    /// Include full member lists.
    #[arg(long)]
    pub members: bool,
    /// Recompute even if a cached census exists, and do not write one.
    #[arg(long)]
    #[serde(skip)]
    pub no_cache: bool,
}

#[derive(Args, Debug, Serialize)]
pub struct SetArgs {
    /// Set description, e.g. "finite:1,2;ap:3,0;powers:2;class:1".
    #[arg(long)]
    pub set: String,
    /// Census size used to resolve class:<id> parts.
    #[arg(long, default_value_t = 100_000)]
    pub census_n: u64,
}

#[derive(Args, Debug, Serialize)]
pub struct DensityArgs {
    #[command(flatten)]
    pub set: SetArgs,
    #[arg(short = 'N', default_value_t = 1_000_000)]
    pub n: u64,
    /// Also report the cross-section signature at beta/alpha.
    #[arg(long)]
    pub alpha: Option<u64>,
    #[arg(long, default_value_t = 1)]
    pub beta: u64,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum KindArg {
    Ordinary,
    Fourier,
    Exponential,
}

#[derive(Args, Debug, Serialize)]
pub struct SeriesArgs {
    #[command(flatten)]
    pub set: SetArgs,
    #[arg(long, value_enum, default_value_t = KindArg::Ordinary)]
    pub kind: KindArg,
    #[arg(long, allow_hyphen_values = true)]
    pub re: f64,
    #[arg(long, allow_hyphen_values = true, default_value_t = 0.0)]
    pub im: f64,
    #[arg(long, default_value_t = 1 << 20)]
    pub n_max: u64,
    #[arg(long, default_value_t = 1e-12)]
    pub tail_tol: f64,
}

#[derive(Args, Debug, Serialize)]
pub struct ResidueArgs {
    #[command(flatten)]
    pub set: SetArgs,
    /// Rational point, e.g. 1/3.
    #[arg(long, default_value = "0")]
    pub x: String,
    #[arg(long, default_value_t = 1e-5)]
    pub y_min: f64,
    /// Also compute the cross-section sum up to N.
    #[arg(short = 'N')]
    pub n: Option<u64>,
}

#[derive(Args, Debug, Serialize)]
pub struct SslArgs {
    #[command(flatten)]
    pub set: SetArgs,
    #[arg(short = 'N', default_value_t = 100_000)]
    pub n: u64,
    #[arg(long, default_value_t = 1e-5)]
    pub y_min: f64,
}

#[derive(Args, Debug, Serialize)]
pub struct NormArgs {
    #[command(flatten)]
    pub set: SetArgs,
}

#[derive(Args, Debug, Serialize)]
pub struct ImageArgs {
    /// Source point of the indicator, e.g. 1/5.
    #[arg(long)]
    pub tau: String,
}

#[derive(Args, Debug, Serialize)]
pub struct KernelArgs {
    /// Largest denominator among the unknowns.
    #[arg(long)]
    pub denom_bound: u64,
    /// Only denominators coprime to rho.
    #[arg(long)]
    pub off_rho: bool,
    #[arg(long, default_value_t = KernelConfig::default().conductor_cap)]
    pub conductor_cap: u64,
}

#[derive(Args, Debug, Serialize)]
pub struct WalkArgs {
    #[arg(long)]
    pub tau: String,
    #[arg(long, default_value_t = 1)]
    pub steps: usize,
}

#[derive(Args, Debug, Serialize)]
pub struct CheckArgs {
    /// all, cyclo, padic, multisection, permutation, profinite, dreamcatcher or residue.
    #[arg(long, default_value = "all")]
    pub suite: String,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
}

#[derive(Serialize)]
struct Report<'a> {
    tool_version: &'static str,
    map_digest: Option<String>,
    command: &'a Command,
    results: Value,
    timing: Value,
}

/// Result of one invocation: exit code and the text for stdout and stderr.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Outcome {
    pub code: i32,
    pub stdout: String,
    pub stderr: String,
}

pub fn exit_code(err: &HydraError) -> i32 {
    match err {
        HydraError::Capability(_) => EXIT_CAPABILITY,
        HydraError::Resource(_) => EXIT_RESOURCE,
        _ => EXIT_USAGE,
    }
}

struct Output {
    results: Value,
    csv: Option<String>,
    extra_timing: Value,
    failed: bool,
}

impl Output {
    fn json(results: Value) -> Self {
        Output { results, csv: None, extra_timing: Value::Null, failed: false }
    }
}

fn to_value<T: Serialize>(v: &T) -> Result<Value> {
    Ok(serde_json::to_value(v)?)
}

fn need_map(map: &Option<HydraMap>) -> Result<&HydraMap> {
    map.as_ref().ok_or_else(|| HydraError::Parse("this command needs -m/--map".into()))
}

fn parse_x(s: &str) -> Result<RatMod1> {
    s.parse()
}

fn resolve_set(args: &SetArgs, map: &Option<HydraMap>) -> Result<SetSpec> {
    let spec: SetSpec = args.set.parse()?;
    if spec.class_refs().is_empty() {
        return Ok(spec);
    }
    let map = need_map(map)?;
    let c = census(map, CensusParams::new(args.census_n), 1)?;
    spec.resolve_classes(&c)
}

fn census_json(c: &OrbitCensus, members: bool) -> Value {
    let classes: Vec<Value> = c
        .classes
        .iter()
        .map(|k| {
            let mut v = json!({
                "id": k.id,
                "size": k.size,
                "cycle": k.cycle,
                "diverging": k.diverging,
                "truncated": k.truncated,
            });
            if members {
                v["members"] = json!(k.members);
            }
            v
        })
        .collect();
    json!({
        "n": c.n,
        "max_steps": c.max_steps,
        "max_value": c.max_value,
        "class_count": c.classes.len(),
        "classes": classes,
        "truncation_note": c.truncation_note,
    })
}

fn complex_json(z: Complex64) -> Value {
    json!([z.re, z.im])
}

fn dispatch(cli: &Cli, map: &Option<HydraMap>) -> Result<Output> {
    match &cli.command {
        Command::Validate => Ok(Output::json(to_value(&need_map(map)?.validate())?)),
        Command::Orbit(a) => {
            let t = iterate_orbit(need_map(map)?, a.n, a.max_steps, a.max_value);
            Ok(Output::json(to_value(&t)?))
        }
        Command::Census(a) => {
            let map = need_map(map)?;
            let mut params = CensusParams::new(a.n);
            params.max_steps = a.max_steps;
            if let Some(v) = a.max_value {
                params.max_value = v;
            }
            let (c, hit) = if a.no_cache {
                (census(map, params, a.threads)?, false)
            } else {
                census_cached(map, params, a.threads, &cache_dir())?
            };
            let mut out = Output::json(census_json(&c, a.members));
            out.extra_timing = json!({ "census_cache": if hit { "hit" } else { "miss" } });
            Ok(out)
        }
        Command::Density(a) => {
            let set = resolve_set(&a.set, map)?;
            if set.known_bound() < a.n {
                return Err(HydraError::Domain(format!("set membership only known up to {}", set.known_bound())));
            }
            let grid = geometric_grid(10.min(a.n), a.n, 2);
            let d = density_estimates(|n| set.contains(n), &grid)?;
            let mut csv = String::from("n,count,ratio\n");
            for p in &d.points {
                csv.push_str(&format!("{},{},{}\n", p.n, p.count, p.ratio));
            }
            let mut results = json!({ "set": set.to_string(), "density": to_value(&d)? });
            if let Some(alpha) = a.alpha {
                results["signature"] = to_value(&cross_section_signature(&set, alpha, a.beta, &grid)?)?;
            }
            Ok(Output { csv: Some(csv), ..Output::json(results) })
        }
        Command::Series(a) => {
            let set = resolve_set(&a.set, map)?;
            let kind = match a.kind {
                KindArg::Ordinary => SeriesKind::Ordinary,
                KindArg::Fourier => SeriesKind::Fourier,
                KindArg::Exponential => SeriesKind::Exponential,
            };
            let v = eval_series(&set, kind, Complex64::new(a.re, a.im), a.n_max, a.tail_tol)?;
            Ok(Output::json(json!({
                "set": set.to_string(),
                "value": complex_json(v.value),
                "tail_bound": v.tail_bound,
                "terms": v.terms,
            })))
        }
        Command::Residue(a) => {
            let set = resolve_set(&a.set, map)?;
            let x = parse_x(&a.x)?;
            let ys = geometric_schedule(1e-1, a.y_min, 17);
            let est = virtual_residue(&set, &x, &ys)?;
            let mut csv = String::from("y,re,im\n");
            for (y, s) in est.y_schedule.iter().zip(&est.samples) {
                csv.push_str(&format!("{y:e},{},{}\n", s.re, s.im));
            }
            let mut results = json!({ "set": set.to_string(), "estimate": to_value(&est)? });
            if set.is_rational() {
                let exact = exact_residue(&set, &x)?;
                results["exact_2pi"] = to_value(&exact)?;
                results["exact"] = complex_json(exact.approx() / std::f64::consts::TAU);
            }
            if let Some(n) = a.n {
                results["hltt"] = to_value(&hltt_cross_check(&set, &x, n)?)?;
            }
            Ok(Output { csv: Some(csv), ..Output::json(results) })
        }
        Command::Ssl(a) => {
            let set = resolve_set(&a.set, map)?;
            let r = ssl_check(&set, a.n, a.y_min)?;
            Ok(Output::json(json!({ "set": set.to_string(), "ssl": to_value(&r)? })))
        }
        Command::Norm(a) => {
            let set = resolve_set(&a.set, map)?;
            let r = semi_hardy_norm(&set, &default_norm_schedule())?;
            let mut csv = String::from("y,value\n");
            for (y, s) in r.y_schedule.iter().zip(&r.samples) {
                csv.push_str(&format!("{y:e},{s}\n"));
            }
            Ok(Output { csv: Some(csv), ..Output::json(json!({ "set": set.to_string(), "norm": to_value(&r)? })) })
        }
        Command::Image(a) => {
            let img = qh_apply_basis(need_map(map)?, &parse_x(&a.tau)?)?;
            Ok(Output::json(to_value(&img)?))
        }
        Command::Kernel(a) => {
            let cfg = KernelConfig { conductor_cap: a.conductor_cap, ..KernelConfig::default() };
            let k = truncated_kernel(need_map(map)?, a.denom_bound, a.off_rho, &cfg)?;
            Ok(Output::json(to_value(&k)?))
        }
        Command::Walk(a) => {
            let w = saul_walk(need_map(map)?, &parse_x(&a.tau)?, a.steps)?;
            let mut results = to_value(&w)?;
            let magnitudes: Vec<Value> = w
                .steps
                .iter()
                .map(|s| json!(s.magnitudes.iter().map(|m| crate::exact::format_rat(&m.abs)).collect::<Vec<_>>()))
                .collect();
            results["magnitudes"] = json!(magnitudes);
            Ok(Output::json(results))
        }
        Command::Check(a) => {
            let suite: Suite = a.suite.parse()?;
            let name = cli.map.as_deref();
            let maps = name.map(|n| vec![n]);
            let outcomes = run_suite(suite, a.seed, maps.as_deref())?;
            let passed = outcomes.iter().all(|o| o.passed);
            Ok(Output { failed: !passed, ..Output::json(json!({ "passed": passed, "checks": to_value(&outcomes)? })) })
        }
    }
}

fn render(cli: &Cli) -> Result<(String, bool)> {
    let start = Instant::now();
    let map = cli.map.as_deref().map(HydraMap::resolve).transpose()?;
    let out = dispatch(cli, &map)?;
    if cli.format == Format::Csv {
        return match out.csv {
            Some(csv) => Ok((csv, out.failed)),
            None => Err(HydraError::Parse("csv output is available for density, residue and norm".into())),
        };
    }
    let mut timing = json!({ "elapsed_ms": start.elapsed().as_secs_f64() * 1e3 });
    if let Value::Object(extra) = out.extra_timing {
        timing.as_object_mut().expect("object").extend(extra);
    }
    let report = Report {
        tool_version: env!("CARGO_PKG_VERSION"),
        map_digest: map.as_ref().map(HydraMap::digest),
        command: &cli.command,
        results: out.results,
        timing,
    };
    Ok((serde_json::to_string_pretty(&report)? + "\n", out.failed))
}

/// Parses `args` (including the program name) and runs the command.
pub fn run<I, T>(args: I) -> Outcome
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let text = e.render().to_string();
            return if code == EXIT_OK {
                Outcome { code, stdout: text, stderr: String::new() }
            } else {
                Outcome { code, stdout: String::new(), stderr: text }
            };
        }
    };
    match render(&cli) {
        Ok((stdout, failed)) => {
            Outcome { code: if failed { EXIT_FAILED_CHECK } else { EXIT_OK }, stdout, stderr: String::new() }
        }
        Err(e) => Outcome { code: exit_code(&e), stdout: String::new(), stderr: format!("error: {e}\n") },
    }
}
