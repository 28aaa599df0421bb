// `!(x > 0.0)` is used on purpose so that NaN fails validation
#![allow(clippy::neg_cmp_op_on_partial_ord)]

use std::f64::consts::PI;
use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::Context;
use clap::{Args, Parser, Subcommand, ValueEnum};
use hypconc::experiments;
use hypconc::format::{write_matrix_csv, GridSpec, OutputFormat, Report};
use hypconc_core::stability::AuditSweep;
use hypconc_core::AlphaParam;

#[derive(Parser)]
#[command(name = "hypconc", version, about = "Concentration and stability experiments in weighted Bergman spaces")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    #[command(flatten)]
    out: OutArgs,
}

#[derive(Args)]
struct OutArgs {
    /// Report path; standard output when absent.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[arg(long, global = true, value_enum, default_value = "csv")]
    format: Format,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Csv,
    Json,
}

#[derive(Args)]
struct Space {
    /// Weight exponent, greater than -1.
    #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
    alpha: f64,
    /// Hyperbolic measure of the sets.
    #[arg(long, default_value_t = PI)]
    s: f64,
}

#[derive(Args)]
struct GridArgs {
    /// Polar grid `NRxNT`.
    #[arg(long, default_value = "48x128")]
    grid: String,
    #[arg(long, default_value_t = 0.999)]
    rmax: f64,
    /// Basis truncation of the localization matrix.
    #[arg(long = "N", default_value_t = 32)]
    n: usize,
}

#[derive(Subcommand)]
enum Command {
    /// Deficits and top eigenvalues on random grid masks.
    Faberkrahn {
        #[command(flatten)]
        space: Space,
        #[command(flatten)]
        grid: GridArgs,
        #[arg(long, default_value_t = 50)]
        sets: usize,
        #[arg(long, default_value_t = 20)]
        functions: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Localization matrix of the centered disc.
    Operator {
        #[command(flatten)]
        space: Space,
        #[arg(long = "N", default_value_t = 32)]
        n: usize,
        /// Also write the matrix as CSV here.
        #[arg(long)]
        matrix: Option<PathBuf>,
    },
    /// Distance bound for random functions on random pseudo-discs.
    StabilityFn {
        #[command(flatten)]
        space: Space,
        #[arg(long = "C", default_value_t = 1.0)]
        c: f64,
        #[arg(long, default_value_t = 100)]
        samples: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Asymmetry against deficit for random grid masks.
    StabilitySet {
        #[command(flatten)]
        space: Space,
        #[command(flatten)]
        grid: GridArgs,
        #[arg(long = "C", default_value_t = 1.0)]
        c: f64,
        #[arg(long, default_value_t = 10)]
        sets: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Two-mode family on the centered disc.
    Sharpness {
        #[command(flatten)]
        space: Space,
        #[arg(long, value_delimiter = ',', default_value = "1e-1,3e-2,1e-2,3e-3,1e-3")]
        eps: Vec<f64>,
    },
    /// Scalar inequalities over the default parameter sweep.
    Audit,
    /// Large and small weight limits.
    Limits {
        #[command(subcommand)]
        which: Limit,
    },
    /// Bergman transform isometry and half-plane to disk transfer.
    TransformCheck {
        #[arg(long, value_delimiter = ',', default_value = "0.5,1,2")]
        betas: Vec<f64>,
    },
    /// Second-variation coefficients with a quadrature recomputation.
    WTable {
        #[command(flatten)]
        space: Space,
        #[arg(long, default_value_t = 40)]
        k_max: usize,
    },
    /// Minimal empirical stability constant across weights.
    ConstantSweep {
        #[arg(long, default_value_t = PI)]
        s: f64,
        #[arg(long, value_delimiter = ',', allow_negative_numbers = true, default_value = "-0.99,-0.5,0,1,3,10,30,100")]
        alphas: Vec<f64>,
        #[arg(long, default_value_t = 40)]
        probes: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
}

#[derive(Subcommand)]
enum Limit {
    /// Embedded constant on rescaled Euclidean discs as alpha grows.
    Fock {
        #[arg(long, default_value_t = 1.0)]
        area: f64,
        #[arg(long, value_delimiter = ',', default_value = "16,64,256,1024")]
        alphas: Vec<f64>,
    },
    /// Weight constants as alpha approaches -1.
    Hardy {
        #[arg(long = "s", value_delimiter = ',', default_value = "1.5707963267948966,3.141592653589793,9.42477796076938")]
        s: Vec<f64>,
        #[arg(long, value_delimiter = ',', default_value = "1e-2,1e-4,1e-6,1e-8,1e-10")]
        plus_ones: Vec<f64>,
    },
}

/// Invalid input, reported with exit status 2.
#[derive(Debug)]
struct Usage(String);

impl std::fmt::Display for Usage {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for Usage {}

fn usage<T>(msg: impl Into<String>) -> anyhow::Result<T> {
    Err(Usage(msg.into()).into())
}

fn alpha(a: f64) -> anyhow::Result<AlphaParam> {
    AlphaParam::new(a).or_else(|_| usage(format!("--alpha must be a finite number above -1, got {a}")))
}

fn positive(name: &str, v: f64) -> anyhow::Result<f64> {
    if v.is_finite() && v > 0.0 {
        Ok(v)
    } else {
        usage(format!("{name} must be positive and finite, got {v}"))
    }
}

fn count(name: &str, v: usize) -> anyhow::Result<usize> {
    if v == 0 {
        usage(format!("{name} must be at least 1"))
    } else {
        Ok(v)
    }
}

fn space(sp: &Space) -> anyhow::Result<(AlphaParam, f64)> {
    Ok((alpha(sp.alpha)?, positive("--s", sp.s)?))
}

fn grid(g: &GridArgs) -> anyhow::Result<(GridSpec, usize)> {
    let spec = GridSpec::parse(&g.grid, g.rmax).or_else(|e| usage(e.to_string()))?;
    if spec.nr == 0 || spec.ntheta == 0 {
        return usage("grid sizes must be positive");
    }
    if !(g.rmax > 0.0 && g.rmax < 1.0) {
        return usage(format!("--rmax must lie in (0, 1), got {}", g.rmax));
    }
    let n = count("--N", g.n)?;
    if spec.ntheta < 2 * n {
        return usage(format!("--grid needs at least {} angles for --N {n}", 2 * n));
    }
    Ok((spec, n))
}

fn run(cli: &Cli) -> anyhow::Result<Report> {
    let rep = match &cli.command {
        Command::Faberkrahn { space: sp, grid: g, sets, functions, seed } => {
            let (a, s) = space(sp)?;
            let (spec, n) = grid(g)?;
            experiments::faberkrahn(a, s, count("--sets", *sets)?, count("--functions", *functions)?, spec, n, *seed)?
        }
        Command::Operator { space: sp, n, matrix } => {
            let (a, s) = space(sp)?;
            let (rep, t) = experiments::operator(a, s, count("--N", *n)?)?;
            if let Some(path) = matrix {
                let file = File::create(path).with_context(|| format!("creating {}", path.display()))?;
                write_matrix_csv(&t, BufWriter::new(file))?;
            }
            rep
        }
        Command::StabilityFn { space: sp, c, samples, seed } => {
            let (a, s) = space(sp)?;
            experiments::stability_fn(a, s, positive("--C", *c)?, count("--samples", *samples)?, *seed)?
        }
        Command::StabilitySet { space: sp, grid: g, c, sets, seed } => {
            let (a, s) = space(sp)?;
            let (spec, n) = grid(g)?;
            experiments::stability_set(a, s, positive("--C", *c)?, count("--sets", *sets)?, spec, n, *seed)?
        }
        Command::Sharpness { space: sp, eps } => {
            let (a, s) = space(sp)?;
            for e in eps {
                positive("--eps", *e)?;
            }
            experiments::sharpness(a, s, eps)?
        }
        Command::Audit => experiments::audit(&AuditSweep::default())?,
        Command::Limits { which: Limit::Fock { area, alphas } } => {
            positive("--area", *area)?;
            if alphas.is_empty() || alphas.windows(2).any(|w| !(w[1] > w[0])) || alphas.iter().any(|a| !(*a > 0.0)) {
                return usage("--alphas must be a positive increasing list");
            }
            experiments::fock(*area, alphas)?
        }
        Command::Limits { which: Limit::Hardy { s, plus_ones } } => {
            for v in s {
                positive("--s", *v)?;
            }
            for v in plus_ones {
                positive("--plus-ones", *v)?;
            }
            experiments::hardy(s, plus_ones)?
        }
        Command::TransformCheck { betas } => {
            for b in betas {
                positive("--betas", *b)?;
            }
            experiments::transform_check(betas)?
        }
        Command::WTable { space: sp, k_max } => {
            let (a, s) = space(sp)?;
            if *k_max < 2 {
                return usage("--k-max must be at least 2");
            }
            experiments::w_table(a, s, *k_max)?
        }
        Command::ConstantSweep { s, alphas, probes, seed } => {
            positive("--s", *s)?;
            for a in alphas {
                alpha(*a)?;
            }
            experiments::constant_sweep(*s, alphas, count("--probes", *probes)?, *seed)?
        }
    };
    Ok(rep)
}

fn emit(rep: &Report, out: &OutArgs) -> anyhow::Result<()> {
    let format = match out.format {
        Format::Csv => OutputFormat::Csv,
        Format::Json => OutputFormat::Json,
    };
    match &out.out {
        Some(path) => {
            let file = File::create(path).with_context(|| format!("creating {}", path.display()))?;
            let mut w = BufWriter::new(file);
            rep.write(format, &mut w)?;
            w.flush()?;
        }
        None => {
            let stdout = io::stdout();
            rep.write(format, stdout.lock())?;
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = run(&cli).and_then(|rep| {
        emit(&rep, &cli.out)?;
        Ok(rep)
    });
    match result {
        Ok(rep) if rep.violations.is_empty() => ExitCode::SUCCESS,
        Ok(rep) => {
            let v = &rep.violations[0];
            eprintln!("{} violation(s); first at row {}: {}", rep.violations.len(), v.row, v.what);
            if let Some(row) = rep.rows.get(v.row) {
                let cells: Vec<String> = rep.columns.iter().zip(row).map(|(c, x)| format!("{c}={x}")).collect();
                eprintln!("witness: {}", cells.join(" "));
            }
            ExitCode::from(1)
        }
        Err(e) if e.downcast_ref::<Usage>().is_some() => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
    }
}

