use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

use saw_dilation::analytic::{AnalyticLaw, Axis};
use saw_dilation::compare::{estimate_p, quantile};
use saw_dilation::estimator::{apply_correction, load_samples, run_chains, save_samples, SampleSet};
use saw_dilation::experiment::{
    analyze, cdf_csv, cdf_svg, geometry_from_parts, read_cdf_csv, resolve_table, run_experiment, ExperimentConfig,
};
use saw_dilation::lattice_effect::{build_table, extrapolate, LatticeEffectTable, TableSpec, DEFAULT_GRID_STEP};
use saw_dilation::domains::StarDomain;
use saw_dilation::Error;

#[derive(Parser)]
#[command(name = "sawdil", version, about = "Self-avoiding walks in the dilation ensemble versus boundary laws")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum AxisArg {
    Native,
    Polar,
}

impl From<AxisArg> for Axis {
    fn from(a: AxisArg) -> Axis {
        match a {
            AxisArg::Native => Axis::Native,
            AxisArg::Polar => Axis::Polar,
        }
    }
}

#[derive(clap::Args)]
struct GeometryArgs {
    /// strip_chordal, strip_radial, triangle, circle_centered,
    /// circle_offcenter, circle_partial or circle_tangent
    #[arg(long)]
    geometry: String,
    /// Radial strip offset, as a fraction `n/d`.
    #[arg(long)]
    h: Option<String>,
    #[arg(long)]
    a: Option<String>,
    #[arg(long)]
    b: Option<String>,
}

#[derive(Subcommand)]
enum Command {
    /// Sample, compare and write every output of one experiment.
    Run {
        #[arg(long)]
        config: PathBuf,
    },
    /// Run the chains only: samples CSV and per-chain checkpoints.
    Sample {
        #[arg(long)]
        config: PathBuf,
    },
    /// Compare a samples CSV with the law: CDF CSV, report and figure.
    Analyze {
        #[arg(long)]
        config: PathBuf,
        /// Defaults to `samples.csv` in the configured output directory.
        #[arg(long)]
        samples: Option<PathBuf>,
    },
    /// Scan the dilation power and report the L² minimiser.
    EstimateP {
        #[command(flatten)]
        geometry: GeometryArgs,
        #[arg(long)]
        samples: PathBuf,
        #[arg(long, default_value_t = -2.0, allow_hyphen_values = true)]
        p_min: f64,
        #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
        p_max: f64,
        #[arg(long, default_value_t = 0.05)]
        p_step: f64,
        #[arg(long, default_value_t = 100)]
        bins: usize,
    },
    /// Tabulate a law: param, density, cdf.
    Analytic {
        #[command(flatten)]
        geometry: GeometryArgs,
        #[arg(long, value_enum, default_value = "native")]
        axis: AxisArg,
        #[arg(long, default_value_t = 201)]
        points: usize,
        /// Write here instead of standard output.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Build or inspect a lattice-effect table.
    Ltable {
        #[command(subcommand)]
        action: LtableAction,
    },
    /// Render a CDF CSV as an SVG figure.
    Plot {
        #[arg(long)]
        cdf: PathBuf,
        #[arg(long)]
        out: PathBuf,
        #[arg(long, default_value = "")]
        title: String,
        #[arg(long, default_value = "boundary parameter")]
        x_label: String,
    },
}

#[derive(Subcommand)]
enum LtableAction {
    Build {
        #[arg(long, default_value_t = 4000)]
        n_steps: usize,
        /// Attempted pivots per chain.
        #[arg(long)]
        attempts: u64,
        #[arg(long, default_value_t = 1)]
        chains: usize,
        #[arg(long, default_value_t = 1)]
        seed: u64,
        #[arg(long, default_value_t = 10)]
        interval: u64,
        #[arg(long)]
        equilibration: Option<u64>,
        #[arg(long, default_value_t = DEFAULT_GRID_STEP)]
        grid_step: f64,
        #[arg(long)]
        out: PathBuf,
    },
    Inspect {
        path: PathBuf,
    },
    /// Combine tables built at two sizes into an N → ∞ estimate.
    Extrapolate {
        #[arg(long)]
        small: PathBuf,
        #[arg(long)]
        large: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
}

fn exit_code(e: &Error) -> u8 {
    match e {
        Error::Config(_) | Error::InvalidArgument(_) | Error::Parse(_) | Error::Checkpoint(_) => 2,
        Error::InsufficientData(_) | Error::Binning(_) | Error::Bracket(_) => 3,
        Error::Io(_) => 4,
        _ => 1,
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("sawdil: {e}");
            ExitCode::from(exit_code(&e))
        }
    }
}

fn write_or_print(out: Option<&Path>, text: &str) -> saw_dilation::Result<()> {
    match out {
        Some(p) => Ok(std::fs::write(p, text)?),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn run(command: Command) -> saw_dilation::Result<()> {
    match command {
        Command::Run { config } => {
            let cfg = ExperimentConfig::load(&config)?;
            let report = run_experiment(&cfg)?;
            print!("{}", report.to_text());
        }
        Command::Sample { config } => {
            let cfg = ExperimentConfig::load(&config)?;
            cfg.validate()?;
            let spec = cfg.sampling_spec();
            if spec.attempts == 0 {
                return Err(Error::InsufficientData("zero attempted pivots".into()));
            }
            let domain = StarDomain::new(cfg.geometry)?;
            let table = cfg.correction.as_ref().map(resolve_table).transpose()?;
            let (set, chains) = run_chains(&domain, &spec, table.as_ref())?;
            std::fs::create_dir_all(&cfg.outdir)?;
            save_samples(&set.samples, &cfg.outdir.join("samples.csv"))?;
            for (id, c) in chains.iter().enumerate() {
                c.save(&cfg.outdir.join(format!("chain_{id}.ckpt")))?;
            }
            println!(
                "{} samples from {} emitted walks ({} attempted pivots)",
                set.samples.len(),
                set.stats.samples,
                set.stats.attempted
            );
        }
        Command::Analyze { config, samples } => {
            let cfg = ExperimentConfig::load(&config)?;
            cfg.validate()?;
            let path = samples.unwrap_or_else(|| cfg.outdir.join("samples.csv"));
            let mut set = SampleSet { samples: load_samples(&path)?, ..Default::default() };
            let domain = StarDomain::new(cfg.geometry)?;
            let table = cfg.correction.as_ref().map(resolve_table).transpose()?;
            apply_correction(&mut set.samples, &domain, table.as_ref())?;
            let p = cfg.p_value()?;
            let a = analyze(&set, cfg.geometry, p, table.is_some(), cfg.n_steps, cfg.bins, cfg.cdf_points)?;
            std::fs::create_dir_all(&cfg.outdir)?;
            std::fs::write(cfg.outdir.join("cdf.csv"), cdf_csv(&a.cdf))?;
            std::fs::write(cfg.outdir.join("report.txt"), a.report.to_text())?;
            if cfg.svg {
                let svg = cdf_svg(&a.cdf, &format!("{} (p = {p})", cfg.geometry), a.report.axis.name());
                std::fs::write(cfg.outdir.join("cdf.svg"), svg)?;
            }
            print!("{}", a.report.to_text());
        }
        Command::EstimateP { geometry, samples, p_min, p_max, p_step, bins } => {
            let g = geometry_from_parts(&geometry.geometry, geometry.h.as_deref(), geometry.a.as_deref(), geometry.b.as_deref())?;
            if !(p_step > 0.0 && p_max > p_min) {
                return Err(Error::Config("need p_min < p_max and p_step > 0".into()));
            }
            let n = ((p_max - p_min) / p_step).round() as usize;
            let grid: Vec<f64> = (0..=n).map(|i| p_min + p_step * i as f64).collect();
            let law = AnalyticLaw::for_geometry(g)?;
            let scan = estimate_p(&load_samples(&samples)?, &grid, &law, bins)?;
            println!("p,l2");
            for (p, v) in &scan.values {
                println!("{p},{v}");
            }
            println!("# p_star = {}", scan.p_star);
        }
        Command::Analytic { geometry, axis, points, out } => {
            let g = geometry_from_parts(&geometry.geometry, geometry.h.as_deref(), geometry.a.as_deref(), geometry.b.as_deref())?;
            let law = AnalyticLaw::for_geometry(g)?;
            let axis = Axis::from(axis);
            if points < 2 {
                return Err(Error::Config("points must be at least 2".into()));
            }
            let (mut lo, mut hi) = law.range(axis);
            if !lo.is_finite() {
                lo = quantile(&law, axis, 1e-4);
            }
            if !hi.is_finite() {
                hi = quantile(&law, axis, 1.0 - 1e-4);
            }
            // Interior points; the density is undefined at the range ends.
            let xs: Vec<f64> = (0..points).map(|i| lo + (hi - lo) * (i as f64 + 0.5) / points as f64).collect();
            let cdf = law.cdf_many(&xs, axis)?;
            let h = 1e-6 * (hi - lo);
            let mut text = String::from("param,density,cdf\n");
            for (x, c) in xs.iter().zip(cdf) {
                let density = match axis {
                    Axis::Native => law.density_value(*x)? / law.normalization(),
                    Axis::Polar => {
                        let (a, b) = ((x - h).max(lo), (x + h).min(hi));
                        let f = law.cdf_many(&[a, b], axis)?;
                        (f[1] - f[0]) / (b - a)
                    }
                };
                writeln!(text, "{x},{density},{c}").unwrap();
            }
            write_or_print(out.as_deref(), &text)?;
        }
        Command::Ltable { action } => match action {
            LtableAction::Build { n_steps, attempts, chains, seed, interval, equilibration, grid_step, out } => {
                let mut spec = TableSpec::new(n_steps, attempts, seed);
                spec.chains = chains;
                spec.sample_interval = interval;
                spec.equilibration = equilibration;
                spec.grid_step = grid_step;
                let table = build_table(&spec)?;
                table.save(&out)?;
                print!("{}", summary(&table));
            }
            LtableAction::Inspect { path } => {
                print!("{}", summary(&LatticeEffectTable::load(&path)?));
            }
            LtableAction::Extrapolate { small, large, out } => {
                let table = extrapolate(&LatticeEffectTable::load(&small)?, &LatticeEffectTable::load(&large)?)?;
                table.save(&out)?;
                print!("{}", summary(&table));
            }
        },
        Command::Plot { cdf, out, title, x_label } => {
            let rows = read_cdf_csv(std::io::BufReader::new(std::fs::File::open(&cdf)?))?;
            std::fs::write(out, cdf_svg(&rows, &title, &x_label))?;
        }
    }
    Ok(())
}

fn summary(t: &LatticeEffectTable) -> String {
    let m = t.meta();
    let mut s = String::new();
    writeln!(s, "N = {}, {} samples, {} chain(s) x {} attempts", m.n_steps, m.samples, m.chains, m.attempts).unwrap();
    writeln!(s, "full-turn integral of the generic curve: {}", t.full_turn_integral()).unwrap();
    for (sp, e) in t.specials() {
        writeln!(s, "l(atan {}/{} = {:.4} deg) = {} +- {}", sp.p, sp.q, e.theta, e.value, e.stderr).unwrap();
    }
    let l30 = t.lookup_l(30.0);
    if let Some(l0) = t.special(0, 1) {
        writeln!(s, "l(0)/l(30) = {}", l0.value / l30).unwrap();
    }
    let worst = t.symmetry_residuals().into_iter().map(|r| r.1).fold(0.0, f64::max);
    writeln!(s, "largest |l(t) - l(90 - t)| / sigma on the grid: {worst}").unwrap();
    s
}
