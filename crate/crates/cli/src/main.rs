use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand};

use hmconv::approximation::common_interior_approximation;
use hmconv::convergence::{
    beurling_check, estimate_uniform_perfectness, estimate_uniform_regularity, PerfectnessOptions, RegularityOptions,
};
use hmconv::geometry::{Domain, Obstacle, Point};
use hmconv::sampler::{sample_harmonic_measure, EmpiricalMeasure, WalkConfig};
use hmconv::scenarios::{generate, run_scenario, CalibrationConfig, Scenario};
use hmconv::transport::{subsample, w1_distance_with, ResampleMethod, W1Options};

#[derive(Parser)]
#[command(name = "hmconv", version, about = "Harmonic-measure sampling and domain-convergence checks")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Sample the harmonic measure of a domain and write it as CSV.
    Sample {
        /// Domain spec (JSON).
        domain: PathBuf,
        /// Basepoint as `x,y`.
        #[arg(long, value_parser = parse_point, allow_hyphen_values = true)]
        w: Point,
        #[command(flatten)]
        walk: WalkArgs,
        #[arg(long)]
        out: PathBuf,
    },
    /// Wasserstein-1 distance between two measure CSV files.
    W1 {
        a: PathBuf,
        b: PathBuf,
        /// Resample both sides to this many equal-weight atoms first.
        #[arg(long)]
        atoms: Option<usize>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Solver name; picked automatically when omitted.
        #[arg(long)]
        solver: Option<String>,
        /// Write the optimal plan as CSV.
        #[arg(long)]
        plan: Option<PathBuf>,
        /// Exit with status 2 unless the distance is below this value.
        #[arg(long)]
        tolerance: Option<f64>,
    },
    /// Common interior approximation of a limit and a domain sequence.
    Interior {
        /// Limit domain spec.
        #[arg(long)]
        limit: PathBuf,
        /// Sequence member specs, in order.
        #[arg(required = true)]
        members: Vec<PathBuf>,
        #[arg(long, value_parser = parse_point, allow_hyphen_values = true)]
        w: Point,
        #[arg(long)]
        epsilon: f64,
        #[arg(long, default_value_t = 0.005)]
        grid_h: f64,
        /// Write the accepted region as CSV.
        #[arg(long)]
        region: Option<PathBuf>,
    },
    /// Run every checker of a scenario file, with optional overrides.
    CheckConvergence {
        scenario: PathBuf,
        #[arg(long, value_delimiter = ',')]
        checkers: Vec<String>,
        #[arg(long, default_value = "report")]
        out_dir: PathBuf,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        samples: Option<usize>,
        #[arg(long)]
        eps_stop: Option<f64>,
        #[arg(long)]
        atoms: Option<usize>,
        #[arg(long)]
        grid_h: Option<f64>,
        #[arg(long)]
        tolerance: Option<f64>,
    },
    /// Compare the harmonic measure of a set with that of its circular projection.
    Beurling {
        /// Domain spec whose obstacles form the set; the ambient disk is ignored.
        set: PathBuf,
        #[arg(long, value_parser = parse_point, allow_hyphen_values = true)]
        z: Point,
        #[command(flatten)]
        walk: WalkArgs,
    },
    /// Ring-ratio estimate of uniform perfectness for a set.
    Perfectness {
        /// Domain spec whose obstacles form the set.
        set: PathBuf,
        #[arg(long, default_value_t = 16.0)]
        tolerance: f64,
        #[arg(long, default_value_t = 16)]
        samples: usize,
    },
    /// Uniform regularity estimate for a domain sequence.
    Regularity {
        #[arg(required = true)]
        members: Vec<PathBuf>,
        #[arg(long, default_value_t = 0.1)]
        tolerance: f64,
        #[command(flatten)]
        walk: WalkArgs,
    },
    /// Generate or run scenario files.
    #[command(subcommand)]
    Scenario(ScenarioCommand),
}

#[derive(Subcommand)]
enum ScenarioCommand {
    /// Generate a scenario from a named family, calibrating its members.
    Gen {
        name: String,
        #[arg(long)]
        n_max: Option<u32>,
        #[arg(long, default_value_t = 1)]
        seed: u64,
        #[arg(long)]
        out: PathBuf,
        /// Walks per calibration evaluation.
        #[arg(long)]
        walks: Option<usize>,
        /// Keep members whose calibration misses the target, marked uncertified.
        #[arg(long)]
        allow_uncalibrated: bool,
    },
    /// Run a scenario file and write report.csv and summary.txt.
    Run {
        file: PathBuf,
        #[arg(long, value_delimiter = ',')]
        checkers: Vec<String>,
        #[arg(long, default_value = "report")]
        out_dir: PathBuf,
    },
}

#[derive(Args)]
struct WalkArgs {
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = 100_000)]
    samples: usize,
    #[arg(long, default_value_t = 1e-6)]
    eps_stop: f64,
    #[arg(long, default_value_t = 1_000_000)]
    max_steps: u64,
}

impl WalkArgs {
    fn config(&self) -> WalkConfig {
        WalkConfig {
            eps_stop: self.eps_stop,
            max_steps: self.max_steps,
            seed: self.seed,
            n_samples: self.samples,
        }
    }
}

fn parse_point(s: &str) -> std::result::Result<Point, String> {
    let (x, y) = s.split_once(',').ok_or_else(|| format!("expected `x,y`, got `{s}`"))?;
    let x: f64 = x.trim().parse().map_err(|e| format!("bad x in `{s}`: {e}"))?;
    let y: f64 = y.trim().parse().map_err(|e| format!("bad y in `{s}`: {e}"))?;
    Ok(Point::new(x, y))
}

fn load_domain(path: &Path) -> Result<Domain> {
    Domain::load(path).with_context(|| format!("loading {}", path.display()))
}

fn load_set(path: &Path) -> Result<Vec<Obstacle>> {
    let dom = load_domain(path)?;
    if dom.obstacles().is_empty() {
        bail!("{} has no obstacles", path.display());
    }
    Ok(dom.obstacles().to_vec())
}

fn load_measure(path: &Path) -> Result<EmpiricalMeasure> {
    EmpiricalMeasure::load(path).with_context(|| format!("loading {}", path.display()))
}

/// Verdict of a command: whether everything it checked passed.
type Verdict = bool;

fn run_report(s: &Scenario, checkers: &[String], out_dir: &Path) -> Result<Verdict> {
    let report = run_scenario(s, checkers)?;
    report.save(out_dir)?;
    print!("{}", report.summary());
    Ok(report.all_passed())
}

fn run(cli: Cli) -> Result<Verdict> {
    match cli.command {
        Command::Sample { domain, w, walk, out } => {
            let dom = load_domain(&domain)?;
            let m = sample_harmonic_measure(&dom, w, &walk.config())?;
            m.save(&out)?;
            println!("atoms {} total_weight {}", m.len(), m.total_weight());
            Ok(true)
        }
        Command::W1 {
            a,
            b,
            atoms,
            seed,
            solver,
            plan,
            tolerance,
        } => {
            let (mut a, mut b) = (load_measure(&a)?, load_measure(&b)?);
            if let Some(n) = atoms {
                a = subsample(&a, n, seed, ResampleMethod::Systematic)?;
                b = subsample(&b, n, seed.wrapping_add(1), ResampleMethod::Systematic)?;
            }
            let opts = W1Options {
                solver,
                ..W1Options::default()
            };
            let (cost, p) = w1_distance_with(&a, &b, &opts)?;
            println!("{cost}");
            if let Some(path) = plan {
                p.write_csv(std::fs::File::create(&path)?)?;
            }
            Ok(tolerance.is_none_or(|t| cost < t))
        }
        Command::Interior {
            limit,
            members,
            w,
            epsilon,
            grid_h,
            region,
        } => {
            let limit = load_domain(&limit)?;
            let seq = members.iter().map(|p| load_domain(p)).collect::<Result<Vec<_>>>()?;
            let v = common_interior_approximation(&limit, &seq, w, epsilon, grid_h)?;
            println!(
                "epsilon {} ok {} tail_start {} cells {} worst_boundary_gap {}",
                v.epsilon,
                v.ok,
                v.tail_start,
                v.region.len(),
                v.worst_boundary_gap
            );
            if let Some(path) = region {
                v.region.save(&path)?;
            }
            Ok(v.ok)
        }
        Command::CheckConvergence {
            scenario,
            checkers,
            out_dir,
            seed,
            samples,
            eps_stop,
            atoms,
            grid_h,
            tolerance,
        } => {
            let mut s = Scenario::load(&scenario)?;
            if let Some(seed) = seed {
                s.seed = seed;
                s.settings.measure.walk.seed = seed;
            }
            if let Some(n) = samples {
                s.settings.measure.walk.n_samples = n;
            }
            if let Some(e) = eps_stop {
                s.settings.measure.walk.eps_stop = e;
            }
            if let Some(n) = atoms {
                s.settings.measure.n_atoms = n;
            }
            if let Some(h) = grid_h {
                s.settings.grid_h = h;
            }
            if let Some(t) = tolerance {
                s.settings.measure.tolerance = t;
            }
            run_report(&s, &checkers, &out_dir)
        }
        Command::Beurling { set, z, walk } => {
            let r = beurling_check(&load_set(&set)?, z, &walk.config())?;
            println!(
                "lhs {} +- {} rhs {} +- {} holds {}",
                r.lhs.value, r.lhs.stderr, r.rhs.value, r.rhs.stderr, r.holds
            );
            Ok(r.holds)
        }
        Command::Perfectness {
            set,
            tolerance,
            samples,
        } => {
            let opts = PerfectnessOptions {
                threshold: tolerance,
                samples_per_obstacle: samples,
                ..PerfectnessOptions::default()
            };
            let e = estimate_uniform_perfectness(&load_set(&set)?, &opts)?;
            match e.witness {
                Some(w) => println!(
                    "sup_ratio {} pass {} witness center {} inner {}",
                    e.sup_ratio, e.pass, w.center, w.inner
                ),
                None => println!("sup_ratio {} pass {}", e.sup_ratio, e.pass),
            }
            Ok(e.pass)
        }
        Command::Regularity {
            members,
            tolerance,
            walk,
        } => {
            let seq = members.iter().map(|p| load_domain(p)).collect::<Result<Vec<_>>>()?;
            let e = estimate_uniform_regularity(&seq, tolerance, &walk.config(), &RegularityOptions::default())?;
            match e.epsilon_found {
                Some(eps) => println!("delta {} epsilon {eps} min_local_mass {}", e.delta, e.min_local_mass),
                None => println!("delta {} epsilon none min_local_mass {}", e.delta, e.min_local_mass),
            }
            Ok(e.epsilon_found.is_some())
        }
        Command::Scenario(ScenarioCommand::Gen {
            name,
            n_max,
            seed,
            out,
            walks,
            allow_uncalibrated,
        }) => {
            let defaults = CalibrationConfig::default();
            let cfg = CalibrationConfig {
                walks: walks.unwrap_or(defaults.walks),
                allow_uncalibrated,
                ..defaults
            };
            let s = generate(&name, n_max, seed, &cfg)?;
            s.save(&out)?;
            for c in &s.calibration {
                println!(
                    "n {} r_n {:e} mass {} ci {} target {} certified {}",
                    c.n, c.r_n, c.achieved_mass, c.ci_halfwidth, c.target, c.certified
                );
            }
            Ok(s.fully_calibrated())
        }
        Command::Scenario(ScenarioCommand::Run { file, checkers, out_dir }) => {
            run_report(&Scenario::load(&file)?, &checkers, &out_dir)
        }
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(2),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}
