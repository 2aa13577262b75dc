use std::path::PathBuf;
use std::process::ExitCode;

use arithdyn::config::{LoadedConfig, RunConfig};
use arithdyn::Error;
use clap::{Parser, Subcommand};

mod commands;
mod output;

use output::{Format, Sink};

#[derive(Parser, Debug)]
#[command(name = "arithdyn", version, about = "Dynamical degrees, arithmetic degrees and canonical heights")]
struct Cli {
    /// JSON run configuration.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Decimal digits for logarithm enclosures and reported intervals.
    #[arg(long, global = true)]
    precision: Option<u32>,
    /// Omit the timestamp so that identical inputs give identical bytes.
    #[arg(long, global = true)]
    reproducible: bool,
    /// Write the report here instead of stdout.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[arg(long, global = true, value_enum, default_value = "json")]
    format: Format,
    /// Print the effective configuration with all defaults and exit.
    #[arg(long, global = true)]
    print_config: bool,
    #[command(subcommand)]
    command: Option<Command>,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// First dynamical degree with its characteristic polynomial.
    Lambda1,
    /// Exact orbit with heights; negative steps iterate the inverse.
    Orbit {
        #[arg(long, default_value_t = 0)]
        point: usize,
        #[arg(long, allow_hyphen_values = true)]
        steps: Option<i64>,
    },
    /// Arithmetic degree estimates along an orbit.
    Alpha {
        #[arg(long, default_value_t = 0)]
        point: usize,
        #[arg(long)]
        steps: Option<usize>,
    },
    /// Canonical heights and functional-equation residuals.
    Canh {
        #[arg(long, default_value_t = 0)]
        point: usize,
        /// Tate depth.
        #[arg(long)]
        n: Option<usize>,
        #[arg(long)]
        radius: Option<usize>,
    },
    /// Full report on the arithmetic degree of one point.
    KsVerify {
        #[arg(long, default_value_t = 0)]
        point: usize,
    },
    /// Periodic points among points of bounded house.
    SweepPeriodic {
        #[arg(long)]
        bound: Option<u64>,
        #[arg(long)]
        max_period: Option<usize>,
    },
    /// Projective bundle endomorphisms.
    Bundle {
        #[command(subcommand)]
        action: BundleCommand,
    },
    /// Lattice conditions for an automorphism.
    Lattice,
    /// Beauville–Bogomolov form checks.
    Chow,
}

#[derive(Subcommand, Debug)]
enum BundleCommand {
    Analyze {
        #[arg(long)]
        n: Option<usize>,
        #[arg(long)]
        deg_g: Option<i64>,
        #[arg(long)]
        delta: Option<String>,
        /// `[(rank,degree),...]` with strictly decreasing slopes.
        #[arg(long)]
        hn: Option<String>,
    },
}

fn exit_code(e: &Error) -> u8 {
    match e {
        Error::InvalidInput(_) => 2,
        Error::ResourceLimit(_) => 4,
        Error::Domain(_) | Error::Precondition(_) | Error::DegenerateFiber(_) | Error::InvariantViolation(_) => 3,
    }
}

fn command_name(c: &Command) -> &'static str {
    match c {
        Command::Lambda1 => "lambda1",
        Command::Orbit { .. } => "orbit",
        Command::Alpha { .. } => "alpha",
        Command::Canh { .. } => "canh",
        Command::KsVerify { .. } => "ks-verify",
        Command::SweepPeriodic { .. } => "sweep-periodic",
        Command::Bundle { .. } => "bundle analyze",
        Command::Lattice => "lattice",
        Command::Chow => "chow",
    }
}

fn run(cli: Cli) -> arithdyn::Result<u8> {
    let mut doc = match &cli.config {
        Some(p) => RunConfig::read(p)?,
        None => RunConfig::default(),
    };
    if let Some(d) = cli.precision {
        doc.options.log_digits = d;
    }
    if cli.print_config {
        let sink = Sink {
            out: cli.out.clone(),
            reproducible: true,
            command: "print-config".into(),
            config: doc.name.clone(),
        };
        sink.json(doc)?;
        return Ok(0);
    }
    let Some(command) = cli.command else {
        return Err(Error::InvalidInput("no command given; see --help".into()));
    };
    let csv_ok = matches!(command, Command::Orbit { .. } | Command::Alpha { .. });
    if cli.format == Format::Csv && !csv_ok {
        return Err(Error::InvalidInput("csv output is available for orbit and alpha".into()));
    }
    let cfg = LoadedConfig::load_doc(doc)?;
    let digits = cfg.options().log_digits;
    let sink = Sink {
        out: cli.out,
        reproducible: cli.reproducible,
        command: command_name(&command).into(),
        config: cfg.doc.name.clone(),
    };
    let opts = cfg.options().clone();
    match command {
        Command::Lambda1 => sink.json(commands::lambda1(&cfg, digits)?)?,
        Command::Orbit { point, steps } => {
            let (table, rec) = commands::orbit(&cfg, point, steps.unwrap_or(opts.orbit_n as i64))?;
            match cli.format {
                Format::Csv => {
                    let (h, rows) = commands::orbit_csv(&table.rows);
                    sink.csv(&h, &rows)?;
                }
                Format::Json => sink.json(table)?,
            }
            if let Some(e) = rec.stopped {
                eprintln!("orbit stopped: {e}");
                return Ok(exit_code(&e));
            }
        }
        Command::Alpha { point, steps } => {
            let steps = steps.unwrap_or(opts.orbit_n) as i64;
            let (report, rec) = commands::alpha(&cfg, point, steps)?;
            match cli.format {
                Format::Csv => {
                    let (h, rows) = commands::orbit_csv(&commands::orbit_rows(&rec));
                    sink.csv(&h, &rows)?;
                }
                Format::Json => sink.json(report)?,
            }
            if let Some(e) = rec.stopped {
                eprintln!("orbit stopped: {e}");
                return Ok(exit_code(&e));
            }
        }
        Command::Canh { point, n, radius } => sink.json(commands::canh(
            &cfg,
            point,
            n.unwrap_or(opts.tate_n),
            radius.unwrap_or(opts.window_radius),
        )?)?,
        Command::KsVerify { point } => sink.json(commands::ks_verify(&cfg, point)?)?,
        Command::SweepPeriodic { bound, max_period } => sink.json(commands::sweep_periodic(
            &cfg,
            bound.unwrap_or(opts.house_bound),
            max_period.unwrap_or(opts.max_period),
        )?)?,
        Command::Bundle {
            action: BundleCommand::Analyze { n, deg_g, delta, hn },
        } => {
            let args = commands::BundleArgs { n, deg_g, delta, hn };
            sink.json(commands::bundle(&cfg, &args, opts.log_bits())?)?
        }
        Command::Lattice => sink.json(commands::lattice(&cfg, digits)?)?,
        Command::Chow => sink.json(commands::chow(&cfg, digits)?)?,
    }
    Ok(0)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code(&e))
        }
    }
}
