//! Command-line surface for the generalized-RSK experiment harnesses.
//!
//! Exit codes: 0 success, 1 an embedded acceptance check failed, 2 a usage
//! or configuration error. Progress goes to standard error; standard output
//! (or `--out`) carries machine-readable results only.

use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use thoma_rsk::exact::{self, fmt_sig};
use thoma_rsk::rsk::{rsk, MapKind};
use thoma_rsk::sampling::{sample_word, SeededGenerator};
use thoma_rsk::stats::Harness;
use thoma_rsk::verify::{self, SuiteConfig};
use thoma_rsk::walk::{expected_positions, WalkConfig};
use thoma_rsk::{Error, LinearOrder, ThomaParams, YoungDiagram};

const SEED_ENV: &str = "THOMA_RSK_SEED";

#[derive(Parser)]
#[command(
    name = "thoma-rsk",
    version,
    about = "Generalized RSK over mixed alphabets: exact measures and Monte Carlo experiments"
)]
struct Cli {
    #[command(flatten)]
    common: Common,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Args, Clone)]
struct Common {
    /// Master seed; falls back to $THOMA_RSK_SEED, then 0.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Worker threads for trial parallelism (default: hardware parallelism).
    /// Results do not depend on this.
    #[arg(long, global = true)]
    workers: Option<usize>,
    /// Output file; standard output when absent.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    format: Format,
    /// Row-letter masses, comma separated and weakly decreasing.
    #[arg(long, global = true, value_delimiter = ',')]
    alphas: Option<Vec<f64>>,
    /// Column-letter masses, comma separated and weakly decreasing.
    #[arg(long, global = true, value_delimiter = ',')]
    betas: Option<Vec<f64>>,
    /// Continuous mass.
    #[arg(long, global = true)]
    gamma: Option<f64>,
    /// JSON parameter file {"alphas":[..],"betas":[..],"gamma":r}; explicit
    /// flags override its fields.
    #[arg(long, global = true)]
    params: Option<PathBuf>,
    /// Linear order, e.g. "x1<x2<y1<G"; default x1<x2<…<y1<y2<…<G.
    #[arg(long, global = true)]
    order: Option<String>,
}

#[derive(Copy, Clone, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Csv,
}

#[derive(Subcommand)]
enum Cmd {
    /// Exact measure table at size n plus the coherency residual.
    Exact {
        #[arg(long)]
        n: usize,
    },
    /// Sampled insertion shapes: aggregated histogram or per-trial list.
    Sample {
        #[arg(long)]
        n: usize,
        #[arg(long, default_value_t = 1000)]
        trials: u64,
        /// Emit one shape per trial instead of the histogram.
        #[arg(long)]
        per_trial: bool,
    },
    /// Fluctuation experiment versus the Gaussian limit covariance.
    Clt {
        #[arg(long)]
        n: usize,
        #[arg(long, default_value_t = 10_000)]
        trials: usize,
        #[arg(short = 'K', long, default_value_t = 1)]
        k: usize,
        #[arg(short = 'L', long, default_value_t = 0)]
        l: usize,
        /// Run the transposed map (roles of rows and columns exchange).
        #[arg(long)]
        transposed: bool,
    },
    /// Coupled drift experiment over a size grid.
    Drift {
        #[arg(long, value_delimiter = ',', default_value = "100,400,1600,6400")]
        n_grid: Vec<usize>,
        #[arg(long, default_value_t = 10_000)]
        trials: usize,
        #[arg(short = 'K', long, default_value_t = 1)]
        k: usize,
        #[arg(short = 'L', long, default_value_t = 0)]
        l: usize,
        /// Also compare the first-row drift law under a reversed order.
        #[arg(long)]
        order_check: bool,
        /// Word length for the order comparison.
        #[arg(long, default_value_t = 200)]
        order_check_n: usize,
    },
    /// Law-of-large-numbers table over a size grid.
    Lln {
        #[arg(long, value_delimiter = ',', default_value = "100,400,1600,6400")]
        n_grid: Vec<usize>,
        #[arg(long, default_value_t = 1000)]
        trials: usize,
        #[arg(short = 'K', long, default_value_t = 1)]
        k: usize,
        #[arg(short = 'L', long, default_value_t = 0)]
        l: usize,
    },
    /// Poissonized experiments: fluctuations versus the independent limit,
    /// or the drift variant over a mean grid.
    Poisson {
        #[arg(long, conflicts_with = "nu_grid")]
        nu: Option<f64>,
        #[arg(long, value_delimiter = ',')]
        nu_grid: Option<Vec<f64>>,
        #[arg(long, default_value_t = 10_000)]
        trials: usize,
        #[arg(short = 'K', long, default_value_t = 1)]
        k: usize,
        #[arg(short = 'L', long, default_value_t = 0)]
        l: usize,
    },
    /// Structural verification suites (exhaustive and sampled).
    Lemmas {
        #[arg(long, default_value_t = 8)]
        exhaustive_cap: usize,
        #[arg(long, default_value_t = 10_000)]
        trials: u64,
    },
    /// Reflecting random walk: exact expectation versus its bound.
    Walk {
        #[arg(long)]
        q1: f64,
        #[arg(long)]
        q3: f64,
        #[arg(long, default_value_t = 1000)]
        n: usize,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}

fn resolve_seed(common: &Common) -> anyhow::Result<u64> {
    if let Some(s) = common.seed {
        return Ok(s);
    }
    match std::env::var(SEED_ENV) {
        Ok(text) => text
            .parse()
            .map_err(|_| anyhow::anyhow!("{SEED_ENV}={text} is not a valid seed")),
        Err(_) => Ok(0),
    }
}

fn resolve_params(common: &Common) -> anyhow::Result<ThomaParams> {
    let mut alphas = Vec::new();
    let mut betas = Vec::new();
    let mut gamma = 0.0;
    let mut have_any = false;
    if let Some(path) = &common.params {
        let text = std::fs::read_to_string(path)?;
        let p = ThomaParams::from_json(&text)?;
        alphas = p.alphas().to_vec();
        betas = p.betas().to_vec();
        gamma = p.gamma();
        have_any = true;
    }
    if let Some(a) = &common.alphas {
        alphas = a.clone();
        have_any = true;
    }
    if let Some(b) = &common.betas {
        betas = b.clone();
        have_any = true;
    }
    if let Some(g) = common.gamma {
        gamma = g;
        have_any = true;
    }
    if !have_any {
        anyhow::bail!("no parameters given: use --alphas/--betas/--gamma or --params FILE");
    }
    Ok(ThomaParams::new(&alphas, &betas, gamma)?)
}

fn resolve_order(common: &Common, params: &ThomaParams) -> anyhow::Result<LinearOrder> {
    let order = match &common.order {
        Some(text) => LinearOrder::parse(text)?,
        None => LinearOrder::for_params(params),
    };
    order.matches_params(params)?;
    Ok(order)
}

fn harness(cli: &Cli, k: usize, l: usize, transposed: bool) -> anyhow::Result<Harness> {
    let params = resolve_params(&cli.common)?;
    let order = resolve_order(&cli.common, &params)?;
    Ok(Harness {
        params,
        order,
        k,
        l,
        map: if transposed {
            MapKind::Transposed
        } else {
            MapKind::Standard
        },
        seed: resolve_seed(&cli.common)?,
        workers: cli.common.workers,
    })
}

fn emit(common: &Common, text: &str) -> anyhow::Result<()> {
    match &common.out {
        Some(path) => std::fs::write(path, text)?,
        None => {
            std::io::stdout().write_all(text.as_bytes())?;
        }
    }
    Ok(())
}

fn emit_report<T: Serialize>(common: &Common, report: &T, csv: impl Fn() -> String) -> anyhow::Result<()> {
    let text = match common.format {
        Format::Json => format!("{}\n", serde_json::to_string_pretty(report)?),
        Format::Csv => csv(),
    };
    emit(common, &text)
}

fn run(cli: &Cli) -> anyhow::Result<bool> {
    match &cli.cmd {
        Cmd::Exact { n } => cmd_exact(cli, *n),
        Cmd::Sample {
            n,
            trials,
            per_trial,
        } => cmd_sample(cli, *n, *trials, *per_trial),
        Cmd::Clt {
            n,
            trials,
            k,
            l,
            transposed,
        } => {
            let h = harness(cli, *k, *l, *transposed)?;
            eprintln!("clt: n = {n}, trials = {trials}");
            let report = h.run_clt(*n, *trials)?;
            emit_report(&cli.common, &report, || clt_csv(&report))?;
            if !report.covariance_within_band {
                eprintln!(
                    "failed check: covariance deviation {:.2} se exceeds the band",
                    report.moments.max_covariance_deviation_se
                );
            } else if !report.ks_within_limit {
                eprintln!("failed check: a marginal ks statistic exceeds the limit");
            }
            Ok(report.pass)
        }
        Cmd::Drift {
            n_grid,
            trials,
            k,
            l,
            order_check,
            order_check_n,
        } => {
            let h = harness(cli, *k, *l, false)?;
            eprintln!("drift: grid {n_grid:?}, trials = {trials}");
            let report = h.run_drift(n_grid, *trials)?;
            let mut pass = report.pass;
            #[derive(Serialize)]
            struct DriftOutput {
                #[serde(flatten)]
                drift: thoma_rsk::stats::DriftReport,
                #[serde(skip_serializing_if = "Option::is_none")]
                order_independence: Option<thoma_rsk::stats::OrderIndependenceReport>,
            }
            let order_independence = if *order_check {
                let alt = h.order.reversed();
                eprintln!("drift: order comparison at n = {order_check_n}");
                let oi = h.drift_order_independence(&alt, *order_check_n, *trials)?;
                pass &= oi.pass;
                Some(oi)
            } else {
                None
            };
            let output = DriftOutput {
                drift: report,
                order_independence,
            };
            emit_report(&cli.common, &output, || drift_csv(&output.drift))?;
            if let Some(c) = output.drift.bounded.iter().position(|&b| !b) {
                eprintln!("failed check: {} drift grows", output.drift.labels[c]);
            } else if output.order_independence.as_ref().is_some_and(|oi| !oi.pass) {
                eprintln!("failed check: drift law differs between orders");
            }
            Ok(pass)
        }
        Cmd::Lln {
            n_grid,
            trials,
            k,
            l,
        } => {
            let h = harness(cli, *k, *l, false)?;
            eprintln!("lln: grid {n_grid:?}, trials = {trials}");
            let report = h.run_lln(n_grid, *trials)?;
            emit_report(&cli.common, &report, || lln_csv(&report))?;
            if !report.pass {
                eprintln!("failed check: a normalized mean misses its target band");
            }
            Ok(report.pass)
        }
        Cmd::Poisson {
            nu,
            nu_grid,
            trials,
            k,
            l,
        } => {
            let h = harness(cli, *k, *l, false)?;
            match (nu, nu_grid) {
                (Some(nu), None) => {
                    eprintln!("poisson clt: nu = {nu}, trials = {trials}");
                    let report = h.run_clt_poisson(*nu, *trials)?;
                    emit_report(&cli.common, &report, || poisson_csv(&report))?;
                    if !report.pass {
                        eprintln!(
                            "failed check: covariance deviation {:.2} se exceeds the band",
                            report.moments.max_covariance_deviation_se
                        );
                    }
                    Ok(report.pass)
                }
                (None, Some(grid)) => {
                    eprintln!("poisson drift: grid {grid:?}, trials = {trials}");
                    let report = h.run_drift_poisson(grid, *trials)?;
                    emit_report(&cli.common, &report, || drift_csv(&report))?;
                    if let Some(c) = report.bounded.iter().position(|&b| !b) {
                        eprintln!("failed check: {} drift grows", report.labels[c]);
                    }
                    Ok(report.pass)
                }
                _ => Err(Error::Config("give exactly one of --nu or --nu-grid".into()).into()),
            }
        }
        Cmd::Lemmas {
            exhaustive_cap,
            trials,
        } => {
            let cfg = SuiteConfig {
                exhaustive_cap: *exhaustive_cap,
                trials: *trials,
                seed: resolve_seed(&cli.common)?,
            };
            let checks = verify::run_suite(&cfg)?;
            for c in &checks {
                eprintln!("{} {}: {}", if c.pass { "PASS" } else { "FAIL" }, c.name, c.detail);
            }
            let pass = checks.iter().all(|c| c.pass);
            emit_report(&cli.common, &checks, || {
                let mut out = String::from("check;pass;detail\n");
                for c in &checks {
                    out.push_str(&format!("{};{};{}\n", c.name, c.pass, c.detail));
                }
                out
            })?;
            if let Some(first_fail) = checks.iter().find(|c| !c.pass) {
                eprintln!("first failed check: {}", first_fail.name);
            }
            Ok(pass)
        }
        Cmd::Walk { q1, q3, n } => {
            let cfg = WalkConfig::new(*q1, *q3)?;
            let exps = expected_positions(&cfg, *n)?;
            #[derive(Serialize)]
            struct WalkReport {
                q1: f64,
                q3: f64,
                n: usize,
                expectation: f64,
                bound: f64,
                monotone: bool,
                pass: bool,
            }
            let expectation = *exps.last().unwrap();
            let bound = cfg.expectation_bound();
            let monotone = exps.windows(2).all(|w| w[1] >= w[0] - 1e-13);
            let report = WalkReport {
                q1: *q1,
                q3: *q3,
                n: *n,
                expectation,
                bound,
                monotone,
                pass: expectation <= bound && monotone,
            };
            emit_report(&cli.common, &report, || {
                format!(
                    "q1;q3;n;expectation;bound;monotone;pass\n{};{};{};{};{};{};{}\n",
                    report.q1,
                    report.q3,
                    report.n,
                    fmt_sig(report.expectation, 12),
                    fmt_sig(report.bound, 12),
                    report.monotone,
                    report.pass
                )
            })?;
            Ok(report.pass)
        }
    }
}

fn cmd_exact(cli: &Cli, n: usize) -> anyhow::Result<bool> {
    let params = resolve_params(&cli.common)?;
    let measure = exact::measure(&params, n)?;
    // The coherency relation needs the next size; step down at the cap.
    let coherency_n = n.min(thoma_rsk::EXACT_SIZE_CAP - 1);
    let residual = exact::coherency_residual(&params, coherency_n)?;
    let pass = residual <= 1e-10;
    match cli.common.format {
        Format::Json => {
            #[derive(Serialize)]
            struct ExactReport {
                alphas: Vec<f64>,
                betas: Vec<f64>,
                gamma: f64,
                n: usize,
                total_mass: f64,
                coherency_n: usize,
                coherency_residual: f64,
                pass: bool,
                measure: Vec<(String, f64)>,
            }
            let report = ExactReport {
                alphas: params.alphas().to_vec(),
                betas: params.betas().to_vec(),
                gamma: params.gamma(),
                n,
                total_mass: measure.total_mass(),
                coherency_n,
                coherency_residual: residual,
                pass,
                measure: measure
                    .iter()
                    .map(|(shape, p)| (shape.label(), p))
                    .collect(),
            };
            emit(&cli.common, &format!("{}\n", serde_json::to_string_pretty(&report)?))?;
        }
        Format::Csv => {
            emit(&cli.common, &measure.to_csv())?;
            eprintln!("coherency residual at n = {coherency_n}: {residual:.3e}");
        }
    }
    Ok(pass)
}

fn cmd_sample(cli: &Cli, n: usize, trials: u64, per_trial: bool) -> anyhow::Result<bool> {
    let params = resolve_params(&cli.common)?;
    let order = resolve_order(&cli.common, &params)?;
    let seed = resolve_seed(&cli.common)?;
    let gen = SeededGenerator::new(seed);
    let mut histogram: std::collections::BTreeMap<YoungDiagram, u64> = Default::default();
    let mut lines = String::new();
    for t in 0..trials {
        let mut rng = gen.stream("sample", t);
        let w = sample_word(&params, n, &mut rng);
        let shape = rsk(&w, &order).shape();
        if per_trial {
            lines.push_str(&shape.label());
            lines.push('\n');
        } else {
            *histogram.entry(shape).or_insert(0) += 1;
        }
    }
    if per_trial {
        emit(&cli.common, &lines)?;
        return Ok(true);
    }
    match cli.common.format {
        Format::Json => {
            #[derive(Serialize)]
            struct SampleReport {
                alphas: Vec<f64>,
                betas: Vec<f64>,
                gamma: f64,
                order: String,
                seed: u64,
                n: usize,
                trials: u64,
                histogram: Vec<(String, u64, f64)>,
            }
            let report = SampleReport {
                alphas: params.alphas().to_vec(),
                betas: params.betas().to_vec(),
                gamma: params.gamma(),
                order: order.to_token_string(),
                seed,
                n,
                trials,
                histogram: histogram
                    .iter()
                    .rev()
                    .map(|(shape, &c)| (shape.label(), c, c as f64 / trials.max(1) as f64))
                    .collect(),
            };
            emit(&cli.common, &format!("{}\n", serde_json::to_string_pretty(&report)?))?;
        }
        Format::Csv => {
            let mut out = String::from("shape;count;frequency\n");
            for (shape, &c) in histogram.iter().rev() {
                out.push_str(&format!(
                    "{};{};{}\n",
                    shape.label(),
                    c,
                    fmt_sig(c as f64 / trials.max(1) as f64, 12)
                ));
            }
            emit(&cli.common, &out)?;
        }
    }
    Ok(true)
}

fn clt_csv(report: &thoma_rsk::stats::CltReport) -> String {
    let mut out = String::from("coordinate;mean;mean_se;ks_raw;ks_centered\n");
    for (c, label) in report.moments.labels.iter().enumerate() {
        out.push_str(&format!(
            "{label};{};{};{};{}\n",
            fmt_sig(report.moments.mean[c], 12),
            fmt_sig(report.moments.mean_se[c], 12),
            fmt_sig(report.ks[c].raw, 12),
            fmt_sig(report.ks[c].centered, 12),
        ));
    }
    out.push_str("i;j;covariance;se;theoretical\n");
    let dim = report.moments.labels.len();
    for i in 0..dim {
        for j in 0..dim {
            out.push_str(&format!(
                "{i};{j};{};{};{}\n",
                fmt_sig(report.moments.covariance[i][j], 12),
                fmt_sig(report.moments.covariance_se[i][j], 12),
                fmt_sig(report.moments.theoretical[i][j], 12),
            ));
        }
    }
    out.push_str(&format!(
        "max_covariance_deviation_se;{}\npass;{}\n",
        fmt_sig(report.moments.max_covariance_deviation_se, 12),
        report.pass
    ));
    out
}

fn drift_csv(report: &thoma_rsk::stats::DriftReport) -> String {
    let mut out = String::from("n;coordinate;mean_abs;se\n");
    for row in &report.rows {
        for (c, label) in report.labels.iter().enumerate() {
            out.push_str(&format!(
                "{};{label};{};{}\n",
                row.n,
                fmt_sig(row.mean_abs[c], 12),
                fmt_sig(row.se[c], 12)
            ));
        }
    }
    out.push_str(&format!("pass;{}\n", report.pass));
    out
}

fn lln_csv(report: &thoma_rsk::stats::LlnReport) -> String {
    let mut out = String::from("n;coordinate;normalized_mean;se;target\n");
    for row in &report.rows {
        for (c, label) in report.labels.iter().enumerate() {
            out.push_str(&format!(
                "{};{label};{};{};{}\n",
                row.n,
                fmt_sig(row.normalized_mean[c], 12),
                fmt_sig(row.se[c], 12),
                fmt_sig(report.targets[c], 12)
            ));
        }
    }
    out.push_str(&format!("pass;{}\n", report.pass));
    out
}

fn poisson_csv(report: &thoma_rsk::stats::PoissonCltReport) -> String {
    let mut out = String::from("coordinate;mean;mean_se\n");
    for (c, label) in report.moments.labels.iter().enumerate() {
        out.push_str(&format!(
            "{label};{};{}\n",
            fmt_sig(report.moments.mean[c], 12),
            fmt_sig(report.moments.mean_se[c], 12),
        ));
    }
    out.push_str("i;j;covariance;se;theoretical\n");
    let dim = report.moments.labels.len();
    for i in 0..dim {
        for j in 0..dim {
            out.push_str(&format!(
                "{i};{j};{};{};{}\n",
                fmt_sig(report.moments.covariance[i][j], 12),
                fmt_sig(report.moments.covariance_se[i][j], 12),
                fmt_sig(report.moments.theoretical[i][j], 12),
            ));
        }
    }
    out.push_str(&format!("pass;{}\n", report.pass));
    out
}
