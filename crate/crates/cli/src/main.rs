//! Command line front end: scenario selection, window configuration, and
//! report emission in JSON, CSV, or plain text.
//!
//! Exit status: 0 when every claim passes, 1 when any claim fails, 2 on
//! usage or configuration errors. Rational literals (`1/8`, `0.25`) are
//! parsed exactly; window bounds never pass through floating point.

use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{anyhow, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use num_rational::BigRational;

use coarse_dyn::report::{
    scenario_report_csv, scenario_report_json, scenario_report_text, sup_grid_csv, SupGridRow,
};
use coarse_dyn::verifier::{self, scenario_catalog, QwertyPremises, ScenarioReport, SectionTarget};
use coarse_dyn::{parse_rational, sup_distance, CoarseMapSpec, Point, Window};

#[derive(Parser)]
#[command(
    name = "coarse-dyn",
    about = "Verify closeness, control, and density claims for three families of coarse dynamical systems",
    version
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run one verification scenario and emit its report.
    Verify {
        #[command(subcommand)]
        scenario: Scenario,
    },
    /// List the registered scenarios.
    List,
    /// Dump a CSV table of sup distances over a (k, n) grid.
    DumpGrid(DumpGridArgs),
}

#[derive(Args)]
struct OutputArgs {
    /// Report format.
    #[arg(long, value_enum, default_value_t = Format::Text)]
    format: Format,
    /// Write the report to this path instead of stdout.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Mantissa bits for materializing certified roots (>= 64). Also read
    /// from COARSE_DYN_PRECISION when the flag is absent.
    #[arg(long)]
    precision: Option<u32>,
    /// Zero out the runtime field so identical configurations produce
    /// byte-identical reports.
    #[arg(long)]
    stable_output: bool,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Json,
    Csv,
    Text,
}

#[derive(Subcommand)]
enum Scenario {
    /// Halfline family: closeness for n <= k, lattice images and density
    /// gaps for n > k.
    Squares {
        #[arg(long)]
        k: u32,
        #[arg(long)]
        n: u32,
        /// Sampling interval, as `lo:hi` in exact rationals.
        #[arg(long, default_value = "1:100")]
        window: String,
        #[arg(long, default_value = "1/8")]
        step: String,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Strip family: closed forms and closeness for n <= k, growth-gap
    /// premises (and witness pairs on full cycles) for n > k.
    Strips {
        #[arg(long)]
        k: u32,
        #[arg(long)]
        n: u32,
        /// Real-coordinate extent of the sampling window.
        #[arg(long, default_value = "64")]
        r_max: String,
        #[arg(long, default_value = "1/4")]
        step: String,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Geometric recurrence bound and exponential crossover.
    Qwerty {
        /// Orbit growth rate F (> G).
        #[arg(long, default_value = "4")]
        f_rate: String,
        /// Scaling rate G (> 1).
        #[arg(long, default_value = "2")]
        g_rate: String,
        /// Closeness constant D.
        #[arg(long, default_value = "1")]
        d: String,
        /// Starting value s.
        #[arg(long, default_value = "1")]
        s: String,
        /// QI multiplicative constant C.
        #[arg(long, default_value = "1")]
        c: String,
        /// QI additive constant A.
        #[arg(long, default_value = "0")]
        a: String,
        #[arg(long, default_value_t = 40)]
        n_max: u32,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Grid example checks.
    Grid {
        /// Which grid scenario to run.
        #[arg(long, default_value = "hypothesis")]
        scenario: String,
        #[arg(long, default_value_t = 32)]
        n_max: u64,
        #[arg(long, default_value = "64")]
        r_max: String,
        #[arg(long, default_value = "1/4")]
        step: String,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Decompose the grid conjugating pairs into halfline bijections and
    /// emit the monotonicity contradiction.
    Decompose {
        #[arg(long, default_value_t = 2)]
        n_lo: u64,
        #[arg(long, default_value_t = 64)]
        n_hi: u64,
        #[arg(long, default_value_t = 0)]
        b_lo: u32,
        #[arg(long, default_value_t = 8)]
        b_hi: u32,
        #[arg(long, default_value = "8")]
        r_max: String,
        #[arg(long, default_value = "1/2")]
        step: String,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Extract a section of a surjective coarse equivalence and certify
    /// the intertwining bound.
    Section {
        /// `grid` or `collapse`.
        #[arg(long, default_value = "grid")]
        target: String,
        /// Strip parameter for the collapse target (>= 2).
        #[arg(long, default_value_t = 3)]
        k: u32,
        #[arg(long, default_value_t = 8)]
        n_max: u64,
        #[arg(long, default_value = "8")]
        r_max: String,
        #[arg(long, default_value = "1/2")]
        step: String,
        #[command(flatten)]
        output: OutputArgs,
    },
}

#[derive(Args)]
struct DumpGridArgs {
    /// `squares` or `strips`.
    #[arg(long)]
    family: String,
    #[arg(long, default_value_t = 3)]
    k_max: u32,
    #[arg(long, default_value_t = 4)]
    n_max: u32,
    /// Window for the squares family, as `lo:hi`.
    #[arg(long, default_value = "1:100")]
    window: String,
    /// Real-coordinate extent for the strips family.
    #[arg(long, default_value = "64")]
    r_max: String,
    #[arg(long, default_value = "1/8")]
    step: String,
    /// Write the CSV to this path instead of stdout.
    #[arg(long)]
    out: Option<PathBuf>,
}

fn rational_arg(name: &str, value: &str) -> Result<BigRational> {
    parse_rational(value).map_err(|e| anyhow!("--{name}: {e}"))
}

fn interval_arg(name: &str, value: &str) -> Result<(BigRational, BigRational)> {
    let (lo, hi) = value
        .split_once(':')
        .ok_or_else(|| anyhow!("--{name} must look like lo:hi, e.g. 1:100"))?;
    Ok((rational_arg(name, lo)?, rational_arg(name, hi)?))
}

fn configure_precision(output: &OutputArgs) -> Result<()> {
    let bits = match output.precision {
        Some(bits) => Some(bits),
        None => match std::env::var("COARSE_DYN_PRECISION") {
            Ok(v) => Some(
                v.parse::<u32>()
                    .with_context(|| format!("COARSE_DYN_PRECISION={v} is not a bit count"))?,
            ),
            Err(_) => None,
        },
    };
    if let Some(bits) = bits {
        coarse_dyn::exact::set_precision_bits(bits)
            .map_err(|e| anyhow!("invalid precision: {e}"))?;
    }
    Ok(())
}

fn emit_report(report: &ScenarioReport, output: &OutputArgs) -> Result<bool> {
    let mut report = report.clone();
    if output.stable_output {
        report.runtime_ms = 0;
    }
    let rendered = match output.format {
        Format::Json => {
            let mut s = serde_json::to_string_pretty(&scenario_report_json(&report))?;
            s.push('\n');
            s
        }
        Format::Csv => scenario_report_csv(&report),
        Format::Text => scenario_report_text(&report),
    };
    match &output.out {
        Some(path) => {
            fs::write(path, &rendered).with_context(|| format!("writing {}", path.display()))?;
            // Keep a human-readable trace on stdout as well.
            print!("{}", scenario_report_text(&report));
        }
        None => print!("{rendered}"),
    }
    Ok(report.all_pass())
}

fn run_verify(scenario: &Scenario) -> Result<bool> {
    match scenario {
        Scenario::Squares {
            k,
            n,
            window,
            step,
            output,
        } => {
            configure_precision(output)?;
            let (lo, hi) = interval_arg("window", window)?;
            let w = Window::halfline(lo, hi, rational_arg("step", step)?)?;
            let report = verifier::scenario_squares(*k, *n, &w)?;
            emit_report(&report, output)
        }
        Scenario::Strips {
            k,
            n,
            r_max,
            step,
            output,
        } => {
            configure_precision(output)?;
            let w = Window::strip(rational_arg("r-max", r_max)?, rational_arg("step", step)?)?;
            let report = verifier::scenario_strips(*k, *n, &w)?;
            emit_report(&report, output)
        }
        Scenario::Qwerty {
            f_rate,
            g_rate,
            d,
            s,
            c,
            a,
            n_max,
            output,
        } => {
            configure_precision(output)?;
            let premises = QwertyPremises {
                orbit_rate: rational_arg("f-rate", f_rate)?,
                scaling_rate: rational_arg("g-rate", g_rate)?,
                x0: Point::strip(BigRational::from_integer(1.into()), 0),
                closeness: rational_arg("d", d)?,
                start: rational_arg("s", s)?,
                qi_c: rational_arg("c", c)?,
                qi_a: rational_arg("a", a)?,
            };
            let report = verifier::scenario_qwerty(&premises, *n_max)?;
            emit_report(&report, output)
        }
        Scenario::Grid {
            scenario,
            n_max,
            r_max,
            step,
            output,
        } => {
            configure_precision(output)?;
            if scenario != "hypothesis" {
                return Err(anyhow!(
                    "unknown grid scenario {scenario:?}; available: hypothesis"
                ));
            }
            let report = verifier::grid_hypothesis_check(
                *n_max,
                rational_arg("r-max", r_max)?,
                rational_arg("step", step)?,
            )?;
            emit_report(&report, output)
        }
        Scenario::Decompose {
            n_lo,
            n_hi,
            b_lo,
            b_hi,
            r_max,
            step,
            output,
        } => {
            configure_precision(output)?;
            let report = verifier::scenario_decompose(
                (*n_lo, *n_hi),
                (*b_lo, *b_hi),
                rational_arg("r-max", r_max)?,
                rational_arg("step", step)?,
            )?;
            emit_report(&report, output)
        }
        Scenario::Section {
            target,
            k,
            n_max,
            r_max,
            step,
            output,
        } => {
            configure_precision(output)?;
            let r_max = rational_arg("r-max", r_max)?;
            let step = rational_arg("step", step)?;
            let (target, window) = match target.as_str() {
                "grid" => (SectionTarget::Grid, Window::grid(1, *n_max, r_max, step)?),
                "collapse" => (
                    SectionTarget::Collapse { k: *k },
                    Window::strip(r_max, step)?,
                ),
                other => {
                    return Err(anyhow!(
                        "unknown section target {other:?}; available: grid, collapse"
                    ))
                }
            };
            let report = verifier::scenario_section(&target, &window)?;
            emit_report(&report, output)
        }
    }
}

fn run_list() {
    for (id, anchor) in scenario_catalog() {
        println!("{id} \u{2192} {anchor}");
    }
}

fn run_dump_grid(args: &DumpGridArgs) -> Result<()> {
    let step = rational_arg("step", &args.step)?;
    let mut rows = Vec::new();
    match args.family.as_str() {
        "squares" => {
            let (lo, hi) = interval_arg("window", &args.window)?;
            let w = Window::halfline(lo, hi, step)?;
            let g = CoarseMapSpec::parse("squares.g")?;
            for k in 1..=args.k_max {
                let f = CoarseMapSpec::parse(&format!("squares.f?k={k}"))?;
                for n in 1..=args.n_max {
                    let sup = sup_distance(&f.iterate(n)?, &g.iterate(n)?, &w)?;
                    let bound = (n <= k)
                        .then(|| coarse_dyn::exact::pow2_rational(n as i32 - k as i32));
                    let within = bound.as_ref().map(|b| sup.value.le_rational(b));
                    rows.push(SupGridRow {
                        family: "squares".into(),
                        k,
                        n,
                        sup: sup.value,
                        bound,
                        within_bound: within,
                    });
                }
            }
        }
        "strips" => {
            let r_max = rational_arg("r-max", &args.r_max)?;
            let w = Window::strip(r_max, step)?;
            for k in 1..=args.k_max {
                let f = CoarseMapSpec::parse(&format!("strip.f?k={k}"))?;
                let g = CoarseMapSpec::parse(&format!("strip.g?k={k}"))?;
                for n in 1..=args.n_max {
                    let sup = sup_distance(&f.iterate(n)?, &g.iterate(n)?, &w)?;
                    let bound = (n <= k)
                        .then(|| BigRational::from_integer(k.into()));
                    let within = bound.as_ref().map(|b| sup.value.le_rational(b));
                    rows.push(SupGridRow {
                        family: "strips".into(),
                        k,
                        n,
                        sup: sup.value,
                        bound,
                        within_bound: within,
                    });
                }
            }
        }
        other => {
            return Err(anyhow!(
                "unknown family {other:?}; available: squares, strips"
            ))
        }
    }
    let csv = sup_grid_csv(&rows);
    match &args.out {
        Some(path) => {
            fs::write(path, &csv).with_context(|| format!("writing {}", path.display()))?
        }
        None => print!("{csv}"),
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let outcome = match &cli.command {
        Command::Verify { scenario } => run_verify(scenario),
        Command::List => {
            run_list();
            Ok(true)
        }
        Command::DumpGrid(args) => run_dump_grid(args).map(|()| true),
    };
    match outcome {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e}");
            eprintln!("run with --help for the parameter schema");
            ExitCode::from(2)
        }
    }
}
