use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use log::{info, warn};

use qlsflow::config::{self, Command, Config, RunManifest};
use qlsflow::flow::{run_flow, FlowConfig, Outcome};
use qlsflow::gaussian::{self, GaussianSeed, SeedRule};
use qlsflow::grid::radial_profile;
use qlsflow::io::{self, FigureData};
use qlsflow::scan;
use qlsflow::{Error, GridSpec};

/// Ground states of the quasi-linear Schrödinger energy.
#[derive(Parser, Debug)]
#[command(name = "qlsflow", version, about)]
struct Cli {
    /// JSON configuration; every key is optional.
    #[arg(long, global = true)]
    config: Option<PathBuf>,

    /// Output directory, created if absent.
    #[arg(long, global = true, default_value = "out")]
    out: PathBuf,

    /// Print the resolved configuration and exit.
    #[arg(long, global = true)]
    dry_run: bool,

    /// Worker threads (also QLSFLOW_THREADS or RAYON_NUM_THREADS).
    #[arg(long, global = true)]
    threads: Option<usize>,

    #[command(subcommand)]
    command: Sub,
}

#[derive(Args, Debug, Default)]
struct ProblemArgs {
    /// Exponent, as a number or fraction such as 7/3.
    #[arg(long, value_parser = parse_number)]
    p: Option<f64>,
    /// Mass.
    #[arg(long)]
    c: Option<f64>,
    /// 1 for the quasi-linear functional, 0 for the semilinear one.
    #[arg(long)]
    theta: Option<f64>,
}

#[derive(Args, Debug, Default)]
struct GridArgs {
    /// Points per axis.
    #[arg(long = "grid")]
    n: Option<usize>,
    /// Half width of the box.
    #[arg(long = "L")]
    half_width: Option<f64>,
}

#[derive(Subcommand, Debug)]
enum Sub {
    /// Gaussian threshold, analytic bounds and the e_min(c) curve.
    Bounds {
        #[command(flatten)]
        problem: ProblemArgs,
        /// Smallest mass of the bounds curve.
        #[arg(long)]
        c_min: Option<f64>,
        /// Largest mass of the bounds curve.
        #[arg(long)]
        c_max: Option<f64>,
        /// Number of masses on the bounds curve.
        #[arg(long)]
        steps: Option<usize>,
    },
    /// Seeding rule and Gaussian initial state for a mass.
    Seed {
        #[command(flatten)]
        problem: ProblemArgs,
        #[command(flatten)]
        grid: GridArgs,
    },
    /// One gradient-flow run.
    Flow {
        #[command(flatten)]
        problem: ProblemArgs,
        #[command(flatten)]
        grid: GridArgs,
    },
    /// Bisection of the minimizer threshold for each p.
    Scan {
        /// Comma-separated exponents, e.g. 7/3,8/3,3.
        #[arg(long, value_delimiter = ',', value_parser = parse_number)]
        p_list: Option<Vec<f64>>,
        #[command(flatten)]
        grid: GridArgs,
    },
    /// Semilinear versus quasi-linear minimizer at the same (p, c).
    Compare {
        #[arg(long, value_parser = parse_number)]
        p: Option<f64>,
        #[arg(long)]
        c: Option<f64>,
        #[command(flatten)]
        grid: GridArgs,
    },
}

fn parse_number(s: &str) -> Result<f64, String> {
    config::parse_number(s).map_err(|e| e.to_string())
}

/// 2 validation, 3 numerical, 4 IO.
fn exit_code(e: &Error) -> u8 {
    match e {
        Error::InvalidGrid(_)
        | Error::InvalidParameter(_)
        | Error::Config(_)
        | Error::Validation(_)
        | Error::GridMismatch { .. }
        | Error::LengthMismatch { .. } => 2,
        Error::Io { .. } | Error::Snapshot(_) | Error::Json(_) => 4,
        _ => 3,
    }
}

fn apply_problem(cfg: &mut Config, a: &ProblemArgs) {
    if let Some(p) = a.p {
        cfg.p = p;
    }
    if a.c.is_some() {
        cfg.c = a.c;
    }
    if let Some(t) = a.theta {
        cfg.theta = t;
    }
}

fn apply_grid(cfg: &mut Config, a: &GridArgs) -> qlsflow::Result<()> {
    if a.n.is_some() || a.half_width.is_some() {
        let n = a.n.unwrap_or(cfg.grid.points());
        let l = a.half_width.unwrap_or(cfg.grid.half_width());
        cfg.grid = GridSpec::new(l, n).map_err(|e| Error::Validation(e.to_string()))?;
    }
    Ok(())
}

fn resolve(cli: &Cli) -> qlsflow::Result<(Command, Config)> {
    let mut cfg = match &cli.config {
        Some(path) => config::parse_config(path)?,
        None => Config::default(),
    };
    let command = match &cli.command {
        Sub::Bounds { problem, c_min, c_max, steps } => {
            apply_problem(&mut cfg, problem);
            let cv = &mut cfg.curve;
            cv.c_min = c_min.unwrap_or(cv.c_min);
            cv.c_max = c_max.unwrap_or(cv.c_max);
            cv.points = steps.unwrap_or(cv.points);
            Command::Bounds
        }
        Sub::Seed { problem, grid } => {
            apply_problem(&mut cfg, problem);
            apply_grid(&mut cfg, grid)?;
            Command::Seed
        }
        Sub::Flow { problem, grid } => {
            apply_problem(&mut cfg, problem);
            apply_grid(&mut cfg, grid)?;
            Command::Flow
        }
        Sub::Scan { p_list, grid } => {
            if p_list.is_some() {
                cfg.p_list = p_list.clone();
            }
            apply_grid(&mut cfg, grid)?;
            Command::Scan
        }
        Sub::Compare { p, c, grid } => {
            if let Some(p) = p {
                cfg.compare.p = *p;
            }
            if let Some(c) = c {
                cfg.compare.c = *c;
            }
            apply_grid(&mut cfg, grid)?;
            Command::Compare
        }
    };
    cfg.validate(command)?;
    Ok((command, cfg))
}

/// Seed rule for `(p, θ)` at mass `c`: the Gaussian threshold rule when
/// `p ≥ 7/3`, else the rule anchored at `c`.
fn seed_rule(cfg: &Config, c: f64) -> qlsflow::Result<SeedRule> {
    if cfg.p >= 7.0 / 3.0 - 1e-12 && cfg.theta == 1.0 {
        let rule = SeedRule::from_threshold(cfg.p, cfg.theta, &cfg.scan.policy)?;
        if c > rule.c_g {
            warn!("c = {c} exceeds c_g = {}; the seed rule assumes c <= c_g", rule.c_g);
        }
        Ok(rule)
    } else {
        SeedRule::at_mass(c, cfg.p, cfg.theta)
    }
}

fn template(cfg: &Config) -> qlsflow::Result<FlowConfig> {
    let params = qlsflow::energy::ProblemParams::new(cfg.p, 1.0, cfg.theta, 1.0)?;
    Ok(FlowConfig::from_settings(params, 1.0, cfg.grid, &cfg.flow))
}

fn run(cli: &Cli, command: Command, cfg: Config) -> qlsflow::Result<u8> {
    let out = &cli.out;
    io::ensure_dir(out)?;
    let manifest = RunManifest::new(command, cli.config.clone(), out.clone(), cfg.clone());
    io::write_manifest(out, &manifest)?;
    match command {
        Command::Bounds => bounds(out, &cfg),
        Command::Seed => seed(out, &cfg),
        Command::Flow => flow(out, &cfg),
        Command::Scan => scan_cmd(out, &cfg),
        Command::Compare => compare(out, &cfg),
    }
}

fn bounds(out: &Path, cfg: &Config) -> qlsflow::Result<u8> {
    let c_g = gaussian::find_cg(cfg.p, cfg.theta, &cfg.scan.policy)?;
    let c = cfg.c.unwrap_or(c_g);
    let report = gaussian::bounds_report(c, cfg.p)?;
    let json = serde_json::json!({ "c_g": c_g, "bounds": report });
    io::write_json(&out.join("bounds.json"), &json)?;
    let cv = cfg.curve;
    let curve = gaussian::emin_curve(cfg.p, cfg.theta, cv.c_min, cv.c_max, cv.points);
    let reports = curve
        .iter()
        .map(|pt| gaussian::bounds_report(pt.c, cfg.p))
        .collect::<qlsflow::Result<Vec<_>>>()?;
    io::write_bounds_curve(&out.join(format!("bounds_p{}.csv", io::p_tag(cfg.p))), &reports)?;
    let data = FigureData {
        curves: vec![(cfg.p, curve)],
        ..FigureData::default()
    };
    io::emit_figure_data(out, &data)?;
    println!("{}", serde_json::to_string_pretty(&json)?);
    Ok(0)
}

fn seed(out: &Path, cfg: &Config) -> qlsflow::Result<u8> {
    let rule = match cfg.c {
        Some(c) => seed_rule(cfg, c)?,
        None => SeedRule::from_threshold(cfg.p, cfg.theta, &cfg.scan.policy)?,
    };
    let c = cfg.c.unwrap_or(rule.c_g);
    let sigma = rule.sigma_for(c);
    let g = GaussianSeed::new(c, sigma, cfg.p, cfg.theta);
    let json = serde_json::json!({
        "rule": rule,
        "c": c,
        "sigma": sigma,
        "gaussian_energy": g.energy(),
    });
    io::write_json(&out.join("seed.json"), &json)?;
    let box_grid = GridSpec::new(cfg.grid.half_width() / sigma, cfg.grid.points())?;
    io::write_snapshot(&out.join("seed_u.bin"), &g.sample(box_grid))?;
    println!("{}", serde_json::to_string_pretty(&json)?);
    Ok(0)
}

fn flow(out: &Path, cfg: &Config) -> qlsflow::Result<u8> {
    let c = cfg.c.expect("validated");
    let rule = seed_rule(cfg, c)?;
    let flow_cfg = template(cfg)?.for_mass(&rule, c)?;
    info!("running flow at p = {}, c = {c}, sigma = {}", cfg.p, flow_cfg.params.sigma);
    let report = run_flow(&flow_cfg)?;
    io::write_json(&out.join("flow_report.json"), &report)?;
    io::write_energy_trace(&out.join("energy_trace.csv"), &report)?;
    if let Some(v) = &report.snapshot {
        io::write_snapshot(&out.join("snapshot_v.bin"), v)?;
        let bins = cfg.grid.points();
        io::write_radial_profile(&out.join("radial_profile.csv"), &radial_profile(v, bins)?)?;
        let section = qlsflow::flow::axis_section(v, &flow_cfg.params);
        io::write_section(&out.join("section.csv"), &section)?;
    }
    println!(
        "{:?}: E = {:.6e}, residual = {:.3e}, steps = {}, t = {:.4e}",
        report.outcome, report.final_energy, report.final_residual, report.steps_taken, report.time_reached
    );
    Ok(if report.outcome == Outcome::Inconclusive { 3 } else { 0 })
}

fn scan_cmd(out: &Path, cfg: &Config) -> qlsflow::Result<u8> {
    let p_list = cfg.scan_p_list();
    let base = template(cfg)?;
    let records = scan::sweep_p(&p_list, &base, &cfg.scan);
    for r in &records {
        io::write_json(&out.join(format!("record_p{}.json", io::p_tag(r.p))), r)?;
    }
    io::emit_figure_data(
        out,
        &FigureData {
            records: &records,
            ..FigureData::default()
        },
    )?;
    for r in &records {
        match &r.error {
            Some(e) => println!("p = {:.4}: c_g = {:.3}, failed: {e}", r.p, r.c_g),
            None => println!(
                "p = {:.4}: c_g = {:.3}, bracket [{:.3}, {:.3}] after {} iterations",
                r.p, r.c_g, r.bracket.0, r.bracket.1, r.iterations
            ),
        }
    }
    if let Some(p) = scan::profile_peak(&records) {
        println!("largest c_g at p = {p:.4}");
    }
    Ok(if records.iter().any(|r| r.error.is_some()) { 3 } else { 0 })
}

fn compare(out: &Path, cfg: &Config) -> qlsflow::Result<u8> {
    let cmp_cfg = Config {
        p: cfg.compare.p,
        ..cfg.clone()
    };
    let base = template(&cmp_cfg)?;
    let cmp = scan::compare_theta(cfg.compare.p, cfg.compare.c, &base)?;
    io::write_json(&out.join("comparison.json"), &cmp)?;
    for (name, r) in [("theta0", &cmp.semilinear), ("theta1", &cmp.quasilinear)] {
        if let Some(v) = &r.snapshot {
            io::write_snapshot(&out.join(format!("snapshot_{name}.bin")), v)?;
        }
        io::write_energy_trace(&out.join(format!("energy_trace_{name}.csv")), r)?;
    }
    io::emit_figure_data(
        out,
        &FigureData {
            comparison: Some(&cmp),
            ..FigureData::default()
        },
    )?;
    println!(
        "peak |u|^2: theta=0 {:.6}, theta=1 {:.6}; squeezing {}",
        cmp.semilinear.peak_density, cmp.quasilinear.peak_density, cmp.squeezing
    );
    Ok(0)
}

fn configure_threads(cli: &Cli) {
    let from_env = std::env::var("QLSFLOW_THREADS").ok().and_then(|s| s.parse().ok());
    if let Some(n) = cli.threads.or(from_env) {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(n).build_global() {
            warn!("could not set thread count: {e}");
        }
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("info")).init();
    let cli = Cli::parse();
    configure_threads(&cli);
    let result = resolve(&cli).and_then(|(command, cfg)| {
        if cli.dry_run {
            println!("{}", serde_json::to_string_pretty(&cfg)?);
            return Ok(0);
        }
        run(&cli, command, cfg)
    });
    match result {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code(&e))
        }
    }
}
