//! Command-line front end: `resolve`, `power`, `simulate`, `tables`,
//! `scan` and `check`.
//!
//! Settings come from flags, then an optional `--config` file of
//! `key = value` lines, then built-in defaults. The seed falls back to
//! `STATRES_SEED` before its default. Records go to stdout (or `--output`),
//! logs to stderr.

pub mod config;
pub mod output;

use std::ffi::OsString;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};
use serde_json::{json, Map, Value};

use crate::analysis::{
    criterion_alpha, hardest_alternative_scan, log_grid, normality_check, parse_grid, riemann_convergence_check,
    simulation_sweep, sted_improvement, table1, Criterion, OffsetScanSpec, SweepSpec, SweepVar,
};
use crate::binning::{bin_probabilities, SourceConfig};
use crate::error::{Error, Result};
use crate::models::rng::RngState;
use crate::models::{analytic_report, mc_error_rates, ModelKind, NoiseModel, ThresholdMode};
use crate::psf::{PsfKind, PsfModel};
use crate::resolution::{acuna_power, resolve, McOptions, Method, ResolutionQuery};
use config::ConfigFile;
use output::{num, opt, Format, Report};

pub const DEFAULT_SEED: u64 = 20;
const DEFAULT_FWHM: f64 = 0.2;

#[derive(Parser, Debug)]
#[command(name = "statres", version, about = "Statistical resolution of binned photon-count imaging models")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,

    /// Output format: csv, json or text.
    #[arg(long, global = true)]
    pub format: Option<String>,
    /// Write records here instead of stdout.
    #[arg(long, global = true)]
    pub output: Option<PathBuf>,
    /// `key = value` file; flags override it.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// Seed for every random draw; falls back to STATRES_SEED.
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// Cap on worker threads. Results do not depend on it.
    #[arg(long, global = true)]
    pub threads: Option<usize>,
    /// Log progress to stderr.
    #[arg(short, long, global = true)]
    pub verbose: bool,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Resolution d for one model.
    Resolve {
        #[command(flatten)]
        model: ModelArgs,
        #[command(flatten)]
        run: RunArgs,
    },
    /// Level and power of the LRT at a given separation.
    Power {
        #[command(flatten)]
        model: ModelArgs,
        #[command(flatten)]
        run: RunArgs,
        /// Source separation; FWHM/2 by default.
        #[arg(long)]
        d: Option<f64>,
        /// Centre offset of the two-source pair.
        #[arg(long, allow_hyphen_values = true)]
        lambda: Option<f64>,
        /// Calibrate the MC threshold under H0 instead of the analytic one.
        #[arg(long)]
        calibrated: bool,
    },
    /// Resolution over a grid of FWHM, t or n, with log-log slope fits.
    Simulate {
        #[command(flatten)]
        model: ModelArgs,
        #[command(flatten)]
        run: RunArgs,
        /// Swept variable: fwhm, t or n.
        #[arg(long)]
        sweep: Option<String>,
        /// `lo:hi:step` or a comma list.
        #[arg(long)]
        grid: Option<String>,
    },
    /// Coefficient tables and the STED gain.
    Tables {
        /// 1, 2, sted or all; tables 1 and 2 by default.
        #[arg(long)]
        which: Option<String>,
        /// Single illumination for table 2.
        #[arg(long)]
        t: Option<f64>,
        /// FWHM shrink factor for the STED gain.
        #[arg(long)]
        sted_ratio: Option<f64>,
    },
    /// Power against centre offset, or resolution against source weight.
    Scan {
        #[command(flatten)]
        model: ModelArgs,
        /// offset or weight.
        #[arg(long)]
        kind: Option<String>,
        /// Separation for the offset scan; FWHM/2 by default.
        #[arg(long)]
        d: Option<f64>,
        /// Offset grid, symmetric about 0.
        #[arg(long, allow_hyphen_values = true)]
        lambdas: Option<String>,
        /// Weight grid in (0, 1).
        #[arg(long)]
        qs: Option<String>,
    },
    /// Normality of the LRT statistic or sum-to-integral convergence.
    Check {
        #[command(flatten)]
        model: ModelArgs,
        #[command(flatten)]
        run: RunArgs,
        /// KS distance of the standardized statistic from N(0,1).
        #[arg(long)]
        clt: bool,
        /// Gap between the binned curvature sum and its integral.
        #[arg(long)]
        riemann: bool,
        /// Separation for the CLT check; FWHM/2 by default.
        #[arg(long)]
        d: Option<f64>,
        /// Bin counts for the Riemann check.
        #[arg(long)]
        ns: Option<String>,
    },
}

#[derive(Args, Debug, Default, Clone)]
pub struct ModelArgs {
    /// poisson, vsg or hg (simulate also takes a comma list or `all`).
    #[arg(long)]
    pub model: Option<String>,
    /// gaussian:<sigma> or airy:<fwhm>.
    #[arg(long)]
    pub psf: Option<String>,
    /// Illumination time.
    #[arg(long)]
    pub t: Option<f64>,
    /// Number of bins.
    #[arg(long)]
    pub n: Option<usize>,
    /// Type I error, in (0, 1/2).
    #[arg(long, allow_hyphen_values = true)]
    pub alpha: Option<f64>,
    /// Type II error; equals alpha when omitted.
    #[arg(long, allow_hyphen_values = true)]
    pub beta: Option<f64>,
    /// Constant background added to the psf.
    #[arg(long, allow_hyphen_values = true)]
    pub gamma: Option<f64>,
    /// Detection probability (thinning).
    #[arg(long, allow_hyphen_values = true)]
    pub eta: Option<f64>,
    /// Weight of the first source.
    #[arg(long = "q-weight", allow_hyphen_values = true)]
    pub q_weight: Option<f64>,
    /// Centre of the one-source hypothesis.
    #[arg(long)]
    pub x0: Option<f64>,
}

#[derive(Args, Debug, Default, Clone)]
pub struct RunArgs {
    /// asymptotic, finite-n, exact or mc.
    #[arg(long)]
    pub method: Option<String>,
    /// Monte-Carlo replications.
    #[arg(long)]
    pub reps: Option<usize>,
}

/// `gaussian:<sigma>` or `airy:<fwhm>`.
pub fn parse_psf(s: &str) -> Result<PsfModel> {
    let (kind, value) = s
        .split_once(':')
        .ok_or_else(|| Error::param(format!("psf '{s}' must look like gaussian:0.085 or airy:0.2")))?;
    let v: f64 = value.trim().parse().map_err(|_| Error::param(format!("bad psf width '{value}'")))?;
    match kind.trim().to_ascii_lowercase().as_str() {
        "gaussian" | "gauss" => PsfModel::gaussian(v),
        "airy" => PsfModel::airy(v),
        other => Err(Error::param(format!("unknown psf family '{other}'"))),
    }
}

fn psf_label(psf: &PsfModel) -> String {
    match psf.kind {
        PsfKind::Gaussian { sigma } => format!("gaussian:{sigma}"),
        PsfKind::Airy { fwhm } => format!("airy:{fwhm}"),
    }
}

fn parse_models(s: &str) -> Result<Vec<ModelKind>> {
    if s.eq_ignore_ascii_case("all") {
        return Ok(ModelKind::ALL.to_vec());
    }
    s.split(',').map(|m| m.trim().parse()).collect()
}

fn parse_list(s: &str) -> Result<Vec<f64>> {
    parse_grid(s)
}

/// Settings shared by every model-based command after layering.
#[derive(Debug, Clone)]
struct Resolved {
    models: Vec<ModelKind>,
    psf: PsfModel,
    t: f64,
    n: usize,
    alpha: f64,
    beta: f64,
    eta: f64,
    q_weight: f64,
    x0: f64,
}

impl Resolved {
    fn from_args(a: &ModelArgs, cfg: &ConfigFile, default_model: &str) -> Result<Self> {
        let models = parse_models(&cfg.layer_or(a.model.clone(), "model", default_model.to_string())?)?;
        let psf = match cfg.layer(a.psf.clone(), "psf")? {
            Some(s) => parse_psf(&s)?,
            None => PsfModel::gaussian_with_fwhm(DEFAULT_FWHM)?,
        };
        let gamma = cfg.layer_or(a.gamma, "gamma", 0.0)?;
        let alpha = cfg.layer_or(a.alpha, "alpha", 0.1)?;
        Ok(Resolved {
            models,
            psf: psf.with_background(gamma)?,
            t: cfg.layer_or(a.t, "t", 20.0)?,
            n: cfg.layer_or(a.n, "n", 20)?,
            alpha,
            beta: cfg.layer_or(a.beta, "beta", alpha)?,
            eta: cfg.layer_or(a.eta, "eta", 1.0)?,
            q_weight: cfg.layer_or(a.q_weight, "q-weight", 0.5)?,
            x0: cfg.layer_or(a.x0, "x0", 0.5)?,
        })
    }

    fn single_model(&self) -> Result<ModelKind> {
        match self.models.as_slice() {
            [m] => Ok(*m),
            _ => Err(Error::param("this command takes exactly one --model")),
        }
    }

    fn query(&self, kind: ModelKind) -> Result<ResolutionQuery> {
        let mut q = ResolutionQuery::new(kind, self.psf, self.n, self.t, self.alpha);
        q.beta = self.beta;
        q.model = q.model.with_thinning(self.eta)?;
        q.weight_q = self.q_weight;
        q.x0 = self.x0;
        Ok(q)
    }

    fn noise(&self, kind: ModelKind) -> Result<NoiseModel> {
        NoiseModel::new(kind).with_thinning(self.eta)
    }

    fn echo(&self, p: &mut Map<String, Value>) {
        let models: Vec<&str> = self.models.iter().map(|m| m.name()).collect();
        p.insert("model".into(), json!(models.join(",")));
        p.insert("psf".into(), json!(psf_label(&self.psf)));
        p.insert("fwhm".into(), num(self.psf.fwhm()));
        p.insert("gamma".into(), num(self.psf.background));
        for (k, v) in [
            ("t", self.t),
            ("alpha", self.alpha),
            ("beta", self.beta),
            ("eta", self.eta),
            ("q-weight", self.q_weight),
            ("x0", self.x0),
        ] {
            p.insert(k.into(), num(v));
        }
        p.insert("n".into(), json!(self.n));
    }
}

struct Ctx {
    cfg: ConfigFile,
    seed: u64,
    format: Option<Format>,
}

impl Ctx {
    fn meta(&self, command: &str, params: Map<String, Value>) -> Map<String, Value> {
        let mut m = Map::new();
        m.insert("tool".into(), json!(format!("statres {}", env!("CARGO_PKG_VERSION"))));
        m.insert("command".into(), json!(command));
        m.insert("seed".into(), json!(self.seed));
        m.insert("params".into(), Value::Object(params));
        m
    }
}

const RECORD_COLUMNS: [&str; 10] =
    ["model", "swept_var", "swept_value", "d", "method", "power", "level", "mc_se", "reps", "seed"];

/// Parse `args` (including the program name), run, print, and return the
/// process exit code.
pub fn run_from<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 2 } else { 0 };
        }
    };
    let level = if cli.verbose { "info" } else { "warn" };
    let _ = env_logger::Builder::from_env(env_logger::Env::default().default_filter_or(level))
        .format_timestamp(None)
        .try_init();
    match run(cli) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}

pub fn run(cli: Cli) -> Result<()> {
    let cfg = match &cli.config {
        Some(p) => ConfigFile::load(p)?,
        None => ConfigFile::default(),
    };
    let env_seed = match std::env::var("STATRES_SEED") {
        Ok(s) => Some(s.trim().parse::<u64>().map_err(|_| Error::param(format!("STATRES_SEED '{s}' is not a u64")))?),
        Err(_) => None,
    };
    let seed = cfg.layer(cli.seed, "seed")?.or(env_seed).unwrap_or(DEFAULT_SEED);
    let threads = cfg.layer(cli.threads, "threads")?;
    if let Some(k) = threads {
        if k == 0 {
            return Err(Error::param("--threads must be >= 1"));
        }
        if rayon::ThreadPoolBuilder::new().num_threads(k).build_global().is_err() {
            log::warn!("thread pool already initialised; --threads ignored");
        }
    }
    let format = cfg.layer(cli.format.clone(), "format")?.map(|s| s.parse()).transpose()?;
    let ctx = Ctx { cfg, seed, format };

    let (report, default_format) = match &cli.command {
        Command::Resolve { model, run } => (cmd_resolve(&ctx, model, run)?, Format::Csv),
        Command::Power { model, run, d, lambda, calibrated } => {
            (cmd_power(&ctx, model, run, *d, *lambda, *calibrated)?, Format::Csv)
        }
        Command::Simulate { model, run, sweep, grid } => {
            (cmd_simulate(&ctx, model, run, sweep.clone(), grid.clone())?, Format::Csv)
        }
        Command::Tables { which, t, sted_ratio } => (cmd_tables(&ctx, which.clone(), *t, *sted_ratio)?, Format::Text),
        Command::Scan { model, kind, d, lambdas, qs } => {
            (cmd_scan(&ctx, model, kind.clone(), *d, lambdas.clone(), qs.clone())?, Format::Csv)
        }
        Command::Check { model, run, clt, riemann, d, ns } => {
            (cmd_check(&ctx, model, run, *clt, *riemann, *d, ns.clone())?, Format::Text)
        }
    };
    let text = report.render(ctx.format.unwrap_or(default_format));
    match &cli.output {
        Some(path) => std::fs::write(path, text).map_err(|e| Error::Io(format!("{}: {e}", path.display())))?,
        None => {
            use std::io::Write;
            let mut out = std::io::stdout().lock();
            out.write_all(text.as_bytes())?;
            out.flush()?;
        }
    }
    Ok(())
}

fn cmd_resolve(ctx: &Ctx, args: &ModelArgs, run: &RunArgs) -> Result<Report> {
    let cfg = &ctx.cfg;
    let r = Resolved::from_args(args, cfg, "poisson")?;
    let method: Method = cfg.layer_or(run.method.clone(), "method", "asymptotic".to_string())?.parse()?;
    let reps = cfg.layer_or(run.reps, "reps", 10_000)?;
    let kind = r.single_model()?;
    let query = r.query(kind)?;
    let result = resolve(&query, method, &McOptions::with_reps(reps), &RngState::new(ctx.seed))?;
    for note in &result.diagnostics.notes {
        log::warn!("{note}");
    }

    let mut params = Map::new();
    r.echo(&mut params);
    params.insert("method".into(), json!(method.name()));
    params.insert("reps".into(), json!(reps));
    let mut meta = ctx.meta("resolve", params);
    meta.insert("iterations".into(), json!(result.diagnostics.iterations));
    meta.insert("converged".into(), json!(result.diagnostics.converged));
    if !result.diagnostics.notes.is_empty() {
        meta.insert("notes".into(), json!(result.diagnostics.notes.join("; ")));
    }
    let mut report = Report::new(meta, RECORD_COLUMNS.to_vec());
    let diag = &result.diagnostics;
    report.push(vec![
        json!(kind.name()),
        Value::Null,
        Value::Null,
        num(result.d),
        json!(method.name()),
        opt(diag.power),
        num(r.alpha),
        opt(diag.mc_se),
        diag.reps.map_or(Value::Null, |n| json!(n)),
        json!(ctx.seed),
    ]);
    Ok(report)
}

fn cmd_power(
    ctx: &Ctx,
    args: &ModelArgs,
    run: &RunArgs,
    d: Option<f64>,
    lambda: Option<f64>,
    calibrated: bool,
) -> Result<Report> {
    let cfg = &ctx.cfg;
    let r = Resolved::from_args(args, cfg, "poisson")?;
    let kind = r.single_model()?;
    let method: Method = cfg.layer_or(run.method.clone(), "method", "exact".to_string())?.parse()?;
    let reps = cfg.layer_or(run.reps, "reps", 10_000)?;
    let d = cfg.layer_or(d, "d", r.psf.fwhm() / 2.0)?;
    let lambda = lambda.unwrap_or(0.0);
    if !(r.alpha > 0.0 && r.alpha < 0.5) {
        return Err(Error::param(format!("alpha must lie in (0, 1/2), got {}", r.alpha)));
    }
    let src = SourceConfig::symmetric(r.x0, d).with_weight(r.q_weight).with_offset(lambda);
    let probs = bin_probabilities(&r.psf, &src, r.n)?;
    let noise = r.noise(kind)?;

    let (power, level, se, n_reps) = match method {
        Method::Exact => {
            let rep = analytic_report(&noise, &probs, r.t, r.alpha)?;
            (rep.power, rep.level, None, None)
        }
        Method::MonteCarlo => {
            let mode = if calibrated { ThresholdMode::H0Calibrated } else { ThresholdMode::Analytic };
            let rep = mc_error_rates(&noise, &probs, r.t, mode, r.alpha, reps, &RngState::new(ctx.seed))?;
            (rep.power, rep.level, Some(rep.mc_se), Some(reps))
        }
        Method::Asymptotic => {
            if kind == ModelKind::Hg {
                return Err(Error::Unsupported("the asymptotic power function covers Poisson and VSG".into()));
            }
            let eff_t = noise.effective_t(r.t);
            (acuna_power(&r.psf, r.x0, r.n, eff_t, d, r.alpha)?, r.alpha, None, None)
        }
        Method::FiniteN => return Err(Error::Unsupported("power takes exact, mc or asymptotic".into())),
    };

    let mut params = Map::new();
    r.echo(&mut params);
    params.insert("d".into(), num(d));
    params.insert("lambda".into(), num(lambda));
    params.insert("method".into(), json!(method.name()));
    if method == Method::MonteCarlo {
        params.insert("reps".into(), json!(reps));
        params.insert("threshold".into(), json!(if calibrated { "h0-calibrated" } else { "analytic" }));
    }
    let mut report = Report::new(ctx.meta("power", params), RECORD_COLUMNS.to_vec());
    report.push(vec![
        json!(kind.name()),
        json!("d"),
        num(d),
        num(d),
        json!(method.name()),
        num(power),
        num(level),
        opt(se),
        n_reps.map_or(Value::Null, |n| json!(n)),
        json!(ctx.seed),
    ]);
    Ok(report)
}

fn cmd_simulate(
    ctx: &Ctx,
    args: &ModelArgs,
    run: &RunArgs,
    sweep: Option<String>,
    grid: Option<String>,
) -> Result<Report> {
    let cfg = &ctx.cfg;
    let r = Resolved::from_args(args, cfg, "all")?;
    let var: SweepVar = cfg.layer_or(sweep, "sweep", "fwhm".to_string())?.parse()?;
    let grid = match cfg.layer(grid, "grid")? {
        Some(g) => parse_grid(&g)?,
        None => match var {
            SweepVar::Fwhm => parse_grid("0.15:0.25:0.01")?,
            SweepVar::T => log_grid(20.0, 1.0, 9),
            SweepVar::N => log_grid(20.0, 1.0, 9).into_iter().map(f64::round).collect(),
        },
    };
    let method: Method = cfg.layer_or(run.method.clone(), "method", "mc".to_string())?.parse()?;
    let reps = cfg.layer_or(run.reps, "reps", 10_000)?;
    if r.eta != 1.0 || r.q_weight != 0.5 || r.x0 != 0.5 || r.beta != r.alpha {
        return Err(Error::Unsupported("simulate runs the centred, equal-weight, alpha = beta protocol".into()));
    }
    let spec = SweepSpec {
        var,
        grid,
        psf: r.psf,
        fwhm: r.psf.fwhm(),
        t: r.t,
        n: r.n,
        alpha: r.alpha,
        models: r.models.clone(),
        method,
        reps,
    };
    let outcomes = simulation_sweep(&spec, &RngState::new(ctx.seed))?;

    let mut params = Map::new();
    r.echo(&mut params);
    params.insert("sweep".into(), json!(var.name()));
    params.insert("grid".into(), Value::Array(spec.grid.iter().map(|&g| num(g)).collect()));
    params.insert("method".into(), json!(method.name()));
    params.insert("reps".into(), json!(reps));
    let mut meta = ctx.meta("simulate", params);
    meta.insert(
        "defaults".into(),
        json!("unset parameters use the small-sample setting t = 20, n = 20, fwhm = 0.2, reconstructed from the published fits"),
    );
    let mut report = Report::new(meta, RECORD_COLUMNS.to_vec());
    for o in &outcomes {
        for p in &o.points {
            let (d, power, se, n_reps) = match &p.result {
                Some(res) => (num(res.d), opt(res.diagnostics.power), opt(res.diagnostics.mc_se), res.diagnostics.reps),
                None => {
                    log::warn!("{} at {}={}: {}", o.model, var, p.value, p.error.as_deref().unwrap_or(""));
                    (Value::Null, Value::Null, Value::Null, None)
                }
            };
            report.push(vec![
                json!(o.model.name()),
                json!(var.name()),
                num(p.value),
                d,
                json!(method.name()),
                power,
                num(spec.alpha),
                se,
                n_reps.map_or(Value::Null, |n| json!(n)),
                json!(ctx.seed),
            ]);
        }
        let fit = match &o.fit {
            Some(f) => json!({
                "model": o.model.name(),
                "fit": format!("d = {:.4} {}^{:.4}", f.coefficient(), var.name(), f.slope),
                "slope": num(f.slope),
                "intercept": num(f.intercept),
                "residual_rms": num(f.residual_rms),
            }),
            None => json!({ "model": o.model.name(), "fit": "fewer than two resolved points" }),
        };
        report.summary.push(fit);
    }
    Ok(report)
}

/// Three significant figures; scientific below 1e-3.
fn sig3(x: f64) -> String {
    if x == 0.0 {
        return "0".into();
    }
    let e = x.abs().log10().floor() as i32;
    if e < -3 {
        let s = format!("{x:.2e}");
        s.replace("e-0", "e-")
    } else {
        format!("{:.*}", (2 - e).max(0) as usize, x)
    }
}

fn cmd_tables(ctx: &Ctx, which: Option<String>, t: Option<f64>, sted_ratio: Option<f64>) -> Result<Report> {
    let which = which.unwrap_or_else(|| "1,2".into());
    let parts: Vec<String> = which.split(',').map(|s| s.trim().to_ascii_lowercase()).collect();
    let all = parts.iter().any(|p| p == "all");
    let want = |k: &str| all || parts.iter().any(|p| p == k);
    for p in &parts {
        if !["1", "2", "sted", "all"].contains(&p.as_str()) {
            return Err(Error::param(format!("unknown table '{p}' (1, 2, sted, all)")));
        }
    }
    let ts: Vec<f64> = match t {
        Some(t) => vec![t],
        None => vec![10.0, 20.0, 30.0, 40.0, 50.0],
    };
    let ratio = sted_ratio.unwrap_or(6.0);

    let mut params = Map::new();
    params.insert("which".into(), json!(parts.join(",")));
    let mut report = Report::new(ctx.meta("tables", params), vec!["table", "key", "column", "value"]);
    let mut text = String::new();

    if want("1") {
        let rows = table1(&[0.01, 0.05, 0.1])?;
        text.push_str("Table 1: resolution coefficients, alpha = beta\n");
        text.push_str("  d_HG = c t^(-1/4) FWHM^(5/4) with n = t;  d_P/VSG = c t^(-1/4) FWHM\n");
        text.push_str(&format!("  {:>6}  {:>8}  {:>8}\n", "alpha", "HG", "P/VSG"));
        for row in &rows {
            text.push_str(&format!("  {:>6}  {:>8.3}  {:>8.3}\n", row.alpha, row.hg, row.poisson_vsg));
            report.push(vec![json!("1"), num(row.alpha), json!("hg"), num(row.hg)]);
            report.push(vec![json!("1"), num(row.alpha), json!("poisson_vsg"), num(row.poisson_vsg)]);
        }
    }
    if want("2") {
        if want("1") {
            text.push('\n');
        }
        text.push_str("Table 2: error level alpha = beta at which d_P/VSG equals the classical distance\n");
        text.push_str(&format!("  {:>4}  {:>10}  {:>10}\n", "t", "Abbe", "Rayleigh"));
        for &ti in &ts {
            let abbe = criterion_alpha(Criterion::Abbe, ti)?;
            let rayleigh = criterion_alpha(Criterion::Rayleigh, ti)?;
            text.push_str(&format!(
                "  {:>4}  {:>10}  {:>10}\n",
                ti,
                format!("{}%", sig3(100.0 * abbe)),
                format!("{}%", sig3(100.0 * rayleigh))
            ));
            report.push(vec![json!("2"), num(ti), json!("abbe"), num(abbe)]);
            report.push(vec![json!("2"), num(ti), json!("rayleigh"), num(rayleigh)]);
        }
    }
    if want("sted") {
        let gain = sted_improvement(ratio)?;
        if want("1") || want("2") {
            text.push('\n');
        }
        text.push_str(&format!("STED: FWHM shrunk {ratio}x improves d_P/VSG by {gain:.3}x\n"));
        report.push(vec![json!("sted"), num(ratio), json!("improvement"), num(gain)]);
    }
    report.text = Some(text);
    Ok(report)
}

fn cmd_scan(
    ctx: &Ctx,
    args: &ModelArgs,
    kind: Option<String>,
    d: Option<f64>,
    lambdas: Option<String>,
    qs: Option<String>,
) -> Result<Report> {
    let cfg = &ctx.cfg;
    let r = Resolved::from_args(args, cfg, "poisson")?;
    let model = r.single_model()?;
    let kind = kind.unwrap_or_else(|| "offset".into());
    let mut params = Map::new();
    r.echo(&mut params);
    params.insert("kind".into(), json!(kind));
    match kind.as_str() {
        "offset" => {
            let d = cfg.layer_or(d, "d", r.psf.fwhm() / 2.0)?;
            let lambdas = parse_list(&cfg.layer_or(lambdas, "lambdas", "-0.05:0.05:0.01".to_string())?)?;
            let spec =
                OffsetScanSpec { model: r.noise(model)?, psf: r.psf, x0: r.x0, d, t: r.t, n: r.n, alpha: r.alpha };
            let scan = hardest_alternative_scan(&spec, &lambdas)?;
            params.insert("d".into(), num(d));
            let mut meta = ctx.meta("scan", params);
            meta.insert("argmin_lambda".into(), num(scan.argmin));
            let mut report = Report::new(meta, vec!["model", "lambda", "power", "separation"]);
            for p in &scan.points {
                report.push(vec![json!(model.name()), num(p.lambda), opt(p.power), opt(p.separation)]);
            }
            Ok(report)
        }
        "weight" => {
            let qs = parse_list(&cfg.layer_or(qs, "qs", "0.1:0.9:0.1".to_string())?)?;
            let points = crate::analysis::weight_scan(&r.query(model)?, &qs)?;
            let mut report = Report::new(ctx.meta("scan", params), vec!["model", "q", "d", "ratio", "ratio_formula"]);
            for p in &points {
                let formula = 1.0 / (2.0 * (p.q * (1.0 - p.q)).sqrt());
                report.push(vec![json!(model.name()), num(p.q), num(p.d), num(p.ratio), num(formula)]);
            }
            Ok(report)
        }
        other => Err(Error::param(format!("unknown scan kind '{other}' (offset, weight)"))),
    }
}

/// KS bound reported alongside the CLT check.
pub const CLT_KS_BOUND: f64 = 0.03;

fn cmd_check(
    ctx: &Ctx,
    args: &ModelArgs,
    run: &RunArgs,
    clt: bool,
    riemann: bool,
    d: Option<f64>,
    ns: Option<String>,
) -> Result<Report> {
    let cfg = &ctx.cfg;
    let r = Resolved::from_args(args, cfg, "poisson")?;
    if clt == riemann {
        return Err(Error::param("check needs exactly one of --clt or --riemann"));
    }
    let mut params = Map::new();
    r.echo(&mut params);
    if clt {
        let model = r.single_model()?;
        let reps = cfg.layer_or(run.reps, "reps", 10_000)?;
        let d = cfg.layer_or(d, "d", r.psf.fwhm() / 2.0)?;
        let src = SourceConfig::symmetric(r.x0, d).with_weight(r.q_weight);
        let probs = bin_probabilities(&r.psf, &src, r.n)?;
        let rep = normality_check(&r.noise(model)?, &probs, r.t, reps, &RngState::new(ctx.seed))?;
        params.insert("d".into(), num(d));
        params.insert("reps".into(), json!(reps));
        let mut report = Report::new(ctx.meta("check", params), vec!["model", "hypothesis", "ks", "bound", "within"]);
        let mut text = format!(
            "KS distance of the standardized LRT statistic from N(0,1), {} model, t = {}, n = {}, d = {}, {} samples\n",
            model, r.t, r.n, d, reps
        );
        for (hyp, ks) in [("H0", rep.ks_null), ("H1", rep.ks_alternative)] {
            let ok = ks <= CLT_KS_BOUND;
            text.push_str(&format!("  {hyp}: {ks:.4} ({} {CLT_KS_BOUND})\n", if ok { "<=" } else { ">" }));
            report.push(vec![json!(model.name()), json!(hyp), num(ks), num(CLT_KS_BOUND), json!(ok)]);
        }
        report.text = Some(text);
        Ok(report)
    } else {
        let ns: Vec<usize> = parse_list(&cfg.layer_or(ns, "ns", "20,200,2000".to_string())?)?
            .into_iter()
            .map(|v| v.round() as usize)
            .collect();
        let psf = r.psf;
        let x0 = r.x0;
        let rows =
            riemann_convergence_check(|x| psf.second_derivative(x - x0), |x| psf.eval(x - x0), psf.scale(), &ns)?;
        params.insert("ns".into(), json!(ns));
        let mut report = Report::new(ctx.meta("check", params), vec!["n", "sum", "integral", "gap", "relative_gap"]);
        for row in &rows {
            report.push(vec![json!(row.n), num(row.sum), num(row.integral), num(row.gap), num(row.relative_gap)]);
        }
        Ok(report)
    }
}
