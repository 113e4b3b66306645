//! The `hypoestim` binary: simulation, Gibbs fitting, and the bias
//! experiment suite, all CSV in / CSV out.

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use hypoestim_cli::csv::{read_csv, write_csv};
use hypoestim_cli::experiments::{
    bias_sweep, lit_drift_demo, nd_bias_demo, LitDriftConfig, SweepGrid,
};
use hypoestim_cli::ingest::ingest_series;
use hypoestim_cli::Failure;
use hypoestim_core::density::invariant_density;
use hypoestim_core::gibbs::{posterior_means, run_gibbs, GibbsConfig, SigmaSampler};
use hypoestim_core::model::{DriftParams, ModelKind, ModelSpec};
use hypoestim_core::simulate::{
    euler_fine_path, exact_growth_path, exact_harmonic_path, SimConfig,
};
use hypoestim_core::stats::mean;

#[derive(Parser)]
#[command(
    name = "hypoestim",
    about = "Bayesian parameter estimation for partially observed second-order diffusions",
    version,
    args_override_self = true,
    after_help = "Every subcommand also accepts --config FILE holding `key = value` lines\n\
                  (long flag names without the leading dashes, # comments allowed).\n\
                  Command-line flags given after --config win."
)]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Simulate a model path and write it as CSV (t,q,p).
    Simulate(SimulateArgs),
    /// Fit a smooth-component series (CSV t,q) with the Gibbs sampler.
    Fit(FitArgs),
    /// Posterior-bias sweep across observation spacings.
    Sweep(SweepArgs),
    /// Finite-difference imputation bias demo (Growth model).
    NdDemo(NdDemoArgs),
    /// Itô-Taylor drift MLE bias demo (harmonic model).
    LitDriftDemo(LitDriftArgs),
    /// Invariant-density summary of a posterior chain CSV.
    Density(DensityArgs),
}

#[derive(Args)]
#[command(args_override_self = true)]
struct SimulateArgs {
    /// Model family: growth, harmonic, or trig.
    #[arg(long)]
    model: String,
    /// Drift parameters D_1,..,D_c,gamma (comma list; empty for growth).
    #[arg(long, default_value = "")]
    params: String,
    #[arg(long)]
    sigma: f64,
    /// Observation spacing.
    #[arg(long)]
    dt: f64,
    /// Observation steps; the file gets N+1 rows.
    #[arg(long = "N")]
    n: usize,
    /// Fine Euler substeps per observation step. Only the trig model uses
    /// it; growth and harmonic sample their exact transitions.
    #[arg(long = "k", default_value_t = 16)]
    k: usize,
    /// Initial q,p.
    #[arg(long, default_value = "0,0")]
    x0: String,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, value_name = "FILE")]
    out: PathBuf,
}

#[derive(Args)]
#[command(args_override_self = true)]
struct FitArgs {
    /// Input CSV with columns t,q (extra columns ignored).
    #[arg(long = "in", value_name = "FILE")]
    input: PathBuf,
    /// Model family: growth, harmonic, or trig.
    #[arg(long)]
    model: String,
    /// Trigonometric force terms (trig model only).
    #[arg(long)]
    c: Option<usize>,
    /// Use this observation spacing instead of the one in the time column.
    #[arg(long)]
    dt_override: Option<f64>,
    /// Gibbs iterations.
    #[arg(long, default_value_t = 100)]
    ngibbs: usize,
    /// Burn-in fraction discarded by the posterior summary.
    #[arg(long, default_value_t = 0.5)]
    burn: f64,
    /// Conditional sampler for sigma: langevin or direct.
    #[arg(long, default_value = "langevin")]
    sigma_sampler: String,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Per-iteration chain CSV: iter,D_1..D_c,gamma,sigma.
    #[arg(long, value_name = "FILE")]
    out_chain: Option<PathBuf>,
    /// Posterior-mean summary CSV: parameter,mean.
    #[arg(long, value_name = "FILE")]
    out_summary: Option<PathBuf>,
}

#[derive(Args)]
#[command(args_override_self = true)]
struct SweepArgs {
    /// Model family: growth, harmonic, or trig.
    #[arg(long, default_value = "trig")]
    model: String,
    /// Generating parameters D_1,..,D_c,gamma.
    #[arg(long, default_value = "1,-8,8,0.5")]
    params: String,
    #[arg(long, default_value_t = 0.7)]
    sigma: f64,
    /// Horizon T; each spacing observes round(T/dt) steps.
    #[arg(long = "T", default_value_t = 500.0)]
    t_final: f64,
    /// Observation spacings, comma list.
    #[arg(long, default_value = "0.0625,0.03125,0.015625")]
    dts: String,
    #[arg(long, default_value_t = 20)]
    reps: usize,
    #[arg(long, default_value_t = 50)]
    ngibbs: usize,
    #[arg(long, default_value_t = 0.5)]
    burn: f64,
    /// Conditional sampler for sigma: langevin or direct.
    #[arg(long, default_value = "langevin")]
    sigma_sampler: String,
    /// Initial q,p for the data generator.
    #[arg(long, default_value = "0,0")]
    x0: String,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, value_name = "FILE")]
    out: PathBuf,
}

#[derive(Args)]
#[command(args_override_self = true)]
struct NdDemoArgs {
    #[arg(long, default_value_t = 1.0)]
    sigma: f64,
    #[arg(long, default_value_t = 1000)]
    reps: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Tidy CSV of sigma estimates: observation,dt,n_steps,rep,sigma_hat
    /// (observation: 0 = finite-difference imputation, 1 = full).
    #[arg(long, value_name = "FILE")]
    out: PathBuf,
}

#[derive(Args)]
#[command(args_override_self = true)]
struct LitDriftArgs {
    /// Generating parameters D,gamma.
    #[arg(long, default_value = "4,0.5")]
    params: String,
    #[arg(long, default_value_t = 0.5)]
    sigma: f64,
    /// Observation spacings, comma list.
    #[arg(long, default_value = "0.002,0.0005")]
    dts: String,
    /// Horizons, comma list; crossed with --dts.
    #[arg(long, default_value = "100,400")]
    t_finals: String,
    #[arg(long, default_value_t = 50)]
    reps: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Tidy CSV of estimates: dt,t_final,rep,d_hat,gamma_hat.
    #[arg(long, value_name = "FILE")]
    out: PathBuf,
}

#[derive(Args)]
#[command(args_override_self = true)]
struct DensityArgs {
    /// Chain CSV from `fit --out-chain`; D columns are read as
    /// trigonometric force coefficients.
    #[arg(long = "in", value_name = "FILE")]
    input: PathBuf,
    /// Burn-in fraction of the chain to discard.
    #[arg(long, default_value_t = 0.5)]
    burn: f64,
    /// Equispaced grid points over [-pi, pi].
    #[arg(long, default_value_t = 256)]
    grid_points: usize,
    /// Optional reference density CSV (q,density) interpolated onto the
    /// output grid as an extra column.
    #[arg(long, value_name = "FILE")]
    reference: Option<PathBuf>,
    /// Output CSV: q,mean,sd[,reference].
    #[arg(long, value_name = "FILE")]
    out: PathBuf,
}

fn main() -> ExitCode {
    let argv: Vec<String> = std::env::args().collect();
    let argv = match expand_config_args(argv) {
        Ok(v) => v,
        Err(f) => {
            eprintln!("hypoestim: {f}");
            return ExitCode::from(f.exit_code() as u8);
        }
    };
    let cli = match Cli::try_parse_from(&argv) {
        Ok(c) => c,
        // Prints and exits itself: code 2 for usage errors, 0 for help.
        Err(e) => e.exit(),
    };
    let env_seed = match env_seed_override() {
        Ok(s) => s,
        Err(f) => {
            eprintln!("hypoestim: {f}");
            return ExitCode::from(f.exit_code() as u8);
        }
    };
    match run(cli, env_seed) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("hypoestim: {f}");
            ExitCode::from(f.exit_code() as u8)
        }
    }
}

/// HYPOESTIM_SEED beats --seed wherever a subcommand has one.
fn env_seed_override() -> Result<Option<u64>, Failure> {
    match std::env::var("HYPOESTIM_SEED") {
        Ok(s) => s
            .trim()
            .parse::<u64>()
            .map(Some)
            .map_err(|_| Failure::Usage(format!("HYPOESTIM_SEED is not a u64: {s:?}"))),
        Err(_) => Ok(None),
    }
}

/// Replaces every `--config FILE` (or `--config=FILE`) with the flags listed
/// in FILE, in place, so later command-line flags override the file via
/// last-one-wins parsing.
fn expand_config_args(argv: Vec<String>) -> Result<Vec<String>, Failure> {
    let mut out = Vec::with_capacity(argv.len());
    let mut it = argv.into_iter();
    while let Some(arg) = it.next() {
        let file = if arg == "--config" {
            match it.next() {
                Some(f) => PathBuf::from(f),
                None => return Err(Failure::Usage("--config needs a file".into())),
            }
        } else if let Some(f) = arg.strip_prefix("--config=") {
            PathBuf::from(f)
        } else {
            out.push(arg);
            continue;
        };
        let text = std::fs::read_to_string(&file)
            .map_err(|e| Failure::Io(format!("read {}: {e}", file.display())))?;
        for (lineno, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (key, value) = match line.split_once('=') {
                Some((k, v)) => (k.trim(), Some(v.trim())),
                None => (line, None),
            };
            if key.is_empty() || key.starts_with('-') {
                return Err(Failure::Usage(format!(
                    "{}:{}: config keys are long flag names without dashes",
                    file.display(),
                    lineno + 1
                )));
            }
            out.push(format!("--{key}"));
            if let Some(v) = value {
                out.push(v.to_string());
            }
        }
    }
    Ok(out)
}

fn run(cli: Cli, env_seed: Option<u64>) -> Result<(), Failure> {
    match cli.cmd {
        Cmd::Simulate(a) => cmd_simulate(a, env_seed),
        Cmd::Fit(a) => cmd_fit(a, env_seed),
        Cmd::Sweep(a) => cmd_sweep(a, env_seed),
        Cmd::NdDemo(a) => cmd_nd_demo(a, env_seed),
        Cmd::LitDriftDemo(a) => cmd_lit_drift_demo(a, env_seed),
        Cmd::Density(a) => cmd_density(a),
    }
}

/// Parses "a,b,c" into parameters; empty means none.
fn parse_f64_list(text: &str, what: &str) -> Result<Vec<f64>, Failure> {
    let t = text.trim();
    if t.is_empty() {
        return Ok(Vec::new());
    }
    t.split(',')
        .map(|f| {
            f.trim()
                .parse::<f64>()
                .map_err(|_| Failure::Usage(format!("{what}: not a number: {:?}", f.trim())))
        })
        .collect()
}

fn parse_x0(text: &str) -> Result<(f64, f64), Failure> {
    let v = parse_f64_list(text, "--x0")?;
    if v.len() != 2 {
        return Err(Failure::Usage(format!("--x0 needs exactly q,p, got {} values", v.len())));
    }
    Ok((v[0], v[1]))
}

/// Builds (spec, theta) from a model name and a flat D_1..D_c,gamma list.
fn parse_model_params(model: &str, params: &[f64]) -> Result<(ModelSpec, DriftParams), Failure> {
    match model {
        "growth" => {
            if !params.is_empty() {
                return Err(Failure::Usage(
                    "growth has no drift parameters; --params must be empty".into(),
                ));
            }
            Ok((ModelSpec::growth(), DriftParams::default()))
        }
        "harmonic" => {
            if params.len() != 2 {
                return Err(Failure::Usage(format!(
                    "harmonic needs --params D,gamma (2 values, got {})",
                    params.len()
                )));
            }
            let theta = DriftParams::new(vec![params[0]], params[1])?;
            Ok((ModelSpec::harmonic(), theta))
        }
        "trig" => {
            if params.len() < 2 {
                return Err(Failure::Usage(
                    "trig needs --params D_1,..,D_c,gamma (at least 2 values)".into(),
                ));
            }
            let c = params.len() - 1;
            let spec = ModelSpec::trig(c)?;
            let theta = DriftParams::new(params[..c].to_vec(), params[c])?;
            Ok((spec, theta))
        }
        other => Err(Failure::Usage(format!(
            "unknown model {other:?} (expected growth, harmonic, or trig)"
        ))),
    }
}

fn parse_sigma_sampler(name: &str) -> Result<SigmaSampler, Failure> {
    match name {
        "langevin" => Ok(SigmaSampler::Langevin),
        "direct" => Ok(SigmaSampler::Direct),
        other => Err(Failure::Usage(format!(
            "unknown sigma sampler {other:?} (expected langevin or direct)"
        ))),
    }
}

fn cmd_simulate(a: SimulateArgs, env_seed: Option<u64>) -> Result<(), Failure> {
    let params = parse_f64_list(&a.params, "--params")?;
    let (spec, theta) = parse_model_params(&a.model, &params)?;
    let cfg = SimConfig {
        spec,
        theta,
        sigma: a.sigma,
        dt: a.dt,
        n_steps: a.n,
        subsample: a.k,
        x0: parse_x0(&a.x0)?,
        seed: env_seed.unwrap_or(a.seed),
    };
    let path = match spec.kind() {
        ModelKind::Growth => exact_growth_path(&cfg)?,
        ModelKind::Harmonic => exact_harmonic_path(&cfg)?,
        ModelKind::Trig => euler_fine_path(&cfg)?,
    };
    let p = path.rough()?;
    let rows: Vec<Vec<f64>> = path
        .q
        .iter()
        .zip(p)
        .enumerate()
        .map(|(i, (q, p))| vec![i as f64 * cfg.dt, *q, *p])
        .collect();
    write_csv(&a.out, "t,q,p", &rows)
}

fn cmd_fit(a: FitArgs, env_seed: Option<u64>) -> Result<(), Failure> {
    if a.out_chain.is_none() && a.out_summary.is_none() {
        return Err(Failure::Usage("need --out-chain and/or --out-summary".into()));
    }
    let spec = match a.model.as_str() {
        "growth" => ModelSpec::growth(),
        "harmonic" => ModelSpec::harmonic(),
        "trig" => {
            let c = a.c.ok_or_else(|| Failure::Usage("trig needs --c".into()))?;
            ModelSpec::trig(c)?
        }
        other => {
            return Err(Failure::Usage(format!(
                "unknown model {other:?} (expected growth, harmonic, or trig)"
            )))
        }
    };
    if a.model != "trig" && a.c.is_some() {
        return Err(Failure::Usage("--c only applies to the trig model".into()));
    }
    let series = ingest_series(&a.input, 1.0, 1)?;
    let dt = match a.dt_override {
        Some(d) if d > 0.0 && d.is_finite() => d,
        Some(_) => return Err(Failure::Usage("--dt-override must be positive and finite".into())),
        None => series.dt,
    };
    let mut gc = GibbsConfig::new(spec, dt);
    gc.n_gibbs = a.ngibbs;
    gc.burn_frac = a.burn;
    gc.sigma_sampler = parse_sigma_sampler(&a.sigma_sampler)?;
    gc.seed = env_seed.unwrap_or(a.seed);
    let chain = run_gibbs(&series.q, &gc)?;

    if let Some(out) = &a.out_chain {
        let c = spec.force_terms();
        let mut header = String::from("iter");
        for j in 1..=c {
            header.push_str(&format!(",D_{j}"));
        }
        if spec.param_count() > 0 {
            header.push_str(",gamma");
        }
        header.push_str(",sigma");
        let rows: Vec<Vec<f64>> = chain
            .thetas
            .iter()
            .zip(&chain.sigmas)
            .enumerate()
            .map(|(k, (theta, sigma))| {
                let mut row = Vec::with_capacity(spec.param_count() + 2);
                row.push((k + 1) as f64);
                row.extend_from_slice(&theta.d);
                if spec.param_count() > 0 {
                    row.push(theta.gamma);
                }
                row.push(*sigma);
                row
            })
            .collect();
        write_csv(out, &header, &rows)?;
    }
    if let Some(out) = &a.out_summary {
        let (theta, sigma) = posterior_means(&chain)?;
        let mut lines = String::from("parameter,mean\n");
        for (j, d) in theta.d.iter().enumerate() {
            lines.push_str(&format!("D_{},{}\n", j + 1, hypoestim_cli::csv::fmt_f64(*d)));
        }
        if spec.param_count() > 0 {
            lines.push_str(&format!("gamma,{}\n", hypoestim_cli::csv::fmt_f64(theta.gamma)));
        }
        lines.push_str(&format!("sigma,{}\n", hypoestim_cli::csv::fmt_f64(sigma)));
        std::fs::write(out, lines).map_err(|e| Failure::Io(format!("write {}: {e}", out.display())))?;
    }
    Ok(())
}

fn cmd_sweep(a: SweepArgs, env_seed: Option<u64>) -> Result<(), Failure> {
    let params = parse_f64_list(&a.params, "--params")?;
    let (spec, theta) = parse_model_params(&a.model, &params)?;
    let dts = parse_f64_list(&a.dts, "--dts")?;
    let mut grid = SweepGrid::new(spec, theta, a.sigma, a.t_final, dts);
    grid.x0 = parse_x0(&a.x0)?;
    grid.n_gibbs = a.ngibbs;
    grid.burn_frac = a.burn;
    grid.sigma_sampler = parse_sigma_sampler(&a.sigma_sampler)?;
    let records = bias_sweep(&grid, a.reps, env_seed.unwrap_or(a.seed))?;

    let c = spec.force_terms();
    let mut header = String::from("dt,repetitions");
    for tag in ["mean", "sd", "dev"] {
        for j in 1..=c {
            header.push_str(&format!(",{tag}_D_{j}"));
        }
        if spec.param_count() > 0 {
            header.push_str(&format!(",{tag}_gamma"));
        }
        header.push_str(&format!(",{tag}_sigma"));
    }
    let rows: Vec<Vec<f64>> = records
        .iter()
        .map(|r| {
            let mut row = vec![r.dt, r.repetitions as f64];
            for (ds, g, s) in [
                (&r.mean_d, r.mean_gamma, r.mean_sigma),
                (&r.sd_d, r.sd_gamma, r.sd_sigma),
                (&r.dev_d, r.dev_gamma, r.dev_sigma),
            ] {
                row.extend_from_slice(ds);
                if spec.param_count() > 0 {
                    row.push(g);
                }
                row.push(s);
            }
            row
        })
        .collect();
    write_csv(&a.out, &header, &rows)
}

fn cmd_nd_demo(a: NdDemoArgs, env_seed: Option<u64>) -> Result<(), Failure> {
    let cells = nd_bias_demo(a.sigma, a.reps, env_seed.unwrap_or(a.seed))?;
    let mut rows = Vec::new();
    for cell in &cells {
        let obs = if cell.observation == "full" { 1.0 } else { 0.0 };
        for (rep, s) in cell.sigma_hats.iter().enumerate() {
            rows.push(vec![obs, cell.dt, cell.n_steps as f64, rep as f64, *s]);
        }
    }
    write_csv(&a.out, "observation,dt,n_steps,rep,sigma_hat", &rows)
}

fn cmd_lit_drift_demo(a: LitDriftArgs, env_seed: Option<u64>) -> Result<(), Failure> {
    let params = parse_f64_list(&a.params, "--params")?;
    if params.len() != 2 {
        return Err(Failure::Usage(format!(
            "--params needs D,gamma (2 values, got {})",
            params.len()
        )));
    }
    let cfg = LitDriftConfig {
        d: params[0],
        gamma: params[1],
        sigma: a.sigma,
        dts: parse_f64_list(&a.dts, "--dts")?,
        t_finals: parse_f64_list(&a.t_finals, "--t-finals")?,
        reps: a.reps,
        seed: env_seed.unwrap_or(a.seed),
    };
    let cells = lit_drift_demo(&cfg)?;
    let mut rows = Vec::new();
    for cell in &cells {
        for (rep, (d, g)) in cell.d_hats.iter().zip(&cell.gamma_hats).enumerate() {
            rows.push(vec![cell.dt, cell.t_final, rep as f64, *d, *g]);
        }
    }
    write_csv(&a.out, "dt,t_final,rep,d_hat,gamma_hat", &rows)
}

fn cmd_density(a: DensityArgs) -> Result<(), Failure> {
    let table = read_csv(&a.input)?;
    let sigma_col = table
        .column("sigma")
        .ok_or_else(|| Failure::Format(format!("{}: no sigma column", a.input.display())))?;
    let mut d_cols = Vec::new();
    for j in 1.. {
        match table.column(&format!("D_{j}")) {
            Some(idx) => d_cols.push(idx),
            None => break,
        }
    }
    let gamma_col = table
        .column("gamma")
        .ok_or_else(|| Failure::Format(format!("{}: no gamma column", a.input.display())))?;
    if d_cols.is_empty() {
        return Err(Failure::Format(format!(
            "{}: no D_1.. columns; density needs a drift chain",
            a.input.display()
        )));
    }
    if table.rows.is_empty() {
        return Err(Failure::Format(format!("{}: empty chain", a.input.display())));
    }
    if !(0.0..1.0).contains(&a.burn) {
        return Err(Failure::Usage("--burn must be in [0, 1)".into()));
    }
    let start = ((a.burn * table.rows.len() as f64) as usize).min(table.rows.len() - 1);
    let kept = &table.rows[start..];

    let thetas: Vec<DriftParams> = kept
        .iter()
        .map(|row| {
            let d: Vec<f64> = d_cols.iter().map(|&idx| row[idx]).collect();
            DriftParams::new(d, row[gamma_col]).map_err(Failure::from)
        })
        .collect::<Result<_, _>>()?;
    let sigma = mean(&kept.iter().map(|r| r[sigma_col]).collect::<Vec<f64>>());

    if a.grid_points < 16 {
        return Err(Failure::Usage("--grid-points must be at least 16".into()));
    }
    let g = a.grid_points;
    let grid: Vec<f64> = (0..g)
        .map(|i| -std::f64::consts::PI + 2.0 * std::f64::consts::PI * i as f64 / (g - 1) as f64)
        .collect();
    let (dens_mean, dens_sd) = invariant_density(&thetas, sigma, &grid)?;

    let reference = match &a.reference {
        Some(path) => Some(interp_reference(path, &grid)?),
        None => None,
    };
    let rows: Vec<Vec<f64>> = grid
        .iter()
        .enumerate()
        .map(|(i, q)| {
            let mut row = vec![*q, dens_mean[i], dens_sd[i]];
            if let Some(r) = &reference {
                row.push(r[i]);
            }
            row
        })
        .collect();
    let header = if reference.is_some() { "q,mean,sd,reference" } else { "q,mean,sd" };
    write_csv(&a.out, header, &rows)
}

/// Reads a (q, density) CSV and linearly interpolates it onto `grid`,
/// clamping outside its range. Bookkeeping only; no normalization.
fn interp_reference(path: &Path, grid: &[f64]) -> Result<Vec<f64>, Failure> {
    let table = read_csv(path)?;
    if table.columns.len() < 2 || table.rows.len() < 2 {
        return Err(Failure::Format(format!(
            "{}: reference needs two columns and at least two rows",
            path.display()
        )));
    }
    let qs: Vec<f64> = table.rows.iter().map(|r| r[0]).collect();
    let vs: Vec<f64> = table.rows.iter().map(|r| r[1]).collect();
    if qs.windows(2).any(|w| !(w[1] > w[0])) {
        return Err(Failure::Format(format!(
            "{}: reference q column must be strictly increasing",
            path.display()
        )));
    }
    Ok(grid
        .iter()
        .map(|&x| {
            if x <= qs[0] {
                vs[0]
            } else if x >= qs[qs.len() - 1] {
                vs[vs.len() - 1]
            } else {
                let j = qs.partition_point(|&q| q < x);
                let w = (x - qs[j - 1]) / (qs[j] - qs[j - 1]);
                vs[j - 1] + w * (vs[j] - vs[j - 1])
            }
        })
        .collect())
}
