use std::io::Write;
use std::process::ExitCode;

use cgomega::effort::{compare_effort, EffortReport};
use cgomega::halfint::{format_doubled, parse_half_integer, parse_projection};
use cgomega::omega::{
    coefficient, lambda_and_v, lambda_minus_v_pow, omega0, omega0_reciprocal, omega_n, tilde_omega, OmegaMatrix,
};
use cgomega::racah::{verify_with, VerificationReport, VerifyOptions};
use cgomega::tables::{build_table, racah_table, render, Format, Provenance};
use cgomega::{Projection, Route, SqrtRational, TwoJ};
use clap::{Parser, Subcommand, ValueEnum};
use rayon::prelude::*;

#[derive(Parser, Debug)]
#[command(name = "cgomega", version, about = "Exact Clebsch-Gordan coefficients from binomial counting matrices")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// One coefficient <(M1,M2)|J,M>
    Coeff {
        #[arg(long, value_parser = momentum, allow_hyphen_values = true)]
        j1: TwoJ,
        #[arg(long, value_parser = momentum, allow_hyphen_values = true)]
        j2: TwoJ,
        #[arg(long, value_parser = momentum, allow_hyphen_values = true)]
        j: TwoJ,
        #[arg(long, value_parser = projection, allow_hyphen_values = true)]
        m1: Projection,
        #[arg(long, value_parser = projection, allow_hyphen_values = true)]
        m2: Projection,
        /// Total projection; the coefficient is zero unless M = M1 + M2
        #[arg(long, value_parser = projection, allow_hyphen_values = true)]
        m: Option<Projection>,
        #[arg(long, default_value = "product", value_parser = route)]
        route: Route,
        /// Also print a decimal with this many significant digits
        #[arg(long)]
        digits: Option<u32>,
    },
    /// Full decomposition table for one pair
    Table {
        #[arg(long, value_parser = momentum, allow_hyphen_values = true)]
        j1: TwoJ,
        #[arg(long, value_parser = momentum, allow_hyphen_values = true)]
        j2: TwoJ,
        /// product, tilde-squared, lv-squared or racah
        #[arg(long, default_value = "product", value_parser = provenance)]
        route: Provenance,
        #[arg(long, default_value = "text", value_parser = format)]
        format: Format,
        #[arg(long)]
        digits: Option<u32>,
    },
    /// Print one of the intermediate matrices
    Omega {
        #[arg(long, value_parser = momentum, allow_hyphen_values = true)]
        j1: TwoJ,
        #[arg(long, value_parser = momentum, allow_hyphen_values = true)]
        j2: TwoJ,
        #[arg(long, default_value_t = 0)]
        n: u32,
        #[arg(long, value_enum, default_value_t = Which::Omega)]
        which: Which,
        #[arg(long, default_value = "product", value_parser = route)]
        route: Route,
        #[arg(long, value_enum, default_value_t = MatrixFormat::Text)]
        format: MatrixFormat,
    },
    /// Check every pair 2J1 <= 2J2 <= bound against the oracles
    Verify {
        #[arg(long = "max-2j", default_value_t = 12)]
        max_2j: u32,
        /// Precision of the recursion oracle
        #[arg(long, default_value_t = 50)]
        digits: u32,
        #[arg(long)]
        no_recursion: bool,
        #[arg(long, value_enum, default_value_t = MatrixFormat::Text)]
        format: MatrixFormat,
        /// One line per pair
        #[arg(long, short)]
        verbose: bool,
    },
    /// Time full tables by the matrix route and by the Racah sum
    Bench {
        #[arg(long, value_parser = momentum, requires = "j2")]
        j1: Option<TwoJ>,
        #[arg(long, value_parser = momentum, requires = "j1")]
        j2: Option<TwoJ>,
        /// Sweep 2J1 = 2J2 = step, 2*step, ..., max-2j
        #[arg(long = "max-2j", default_value_t = 60)]
        max_2j: u32,
        #[arg(long, default_value_t = 12)]
        step: u32,
        #[arg(long, default_value = "product", value_parser = route)]
        route: Route,
        #[arg(long, default_value_t = 1)]
        reps: usize,
        #[arg(long, default_value_t = 100)]
        samples: usize,
        #[arg(long, default_value_t = 1)]
        seed: u64,
        #[arg(long, value_enum, default_value_t = MatrixFormat::Text)]
        format: MatrixFormat,
    },
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum Which {
    Omega0,
    Lambda,
    V,
    #[value(alias = "lambda-minus-v")]
    LvPow,
    Tilde,
    Omega,
    Omega0Inv,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum MatrixFormat {
    Text,
    Json,
}

fn momentum(s: &str) -> Result<TwoJ, String> {
    parse_half_integer(s).map_err(|e| e.to_string())
}

fn projection(s: &str) -> Result<Projection, String> {
    parse_projection(s).map_err(|e| e.to_string())
}

fn route(s: &str) -> Result<Route, String> {
    s.parse().map_err(|e: cgomega::Error| e.to_string())
}

fn provenance(s: &str) -> Result<Provenance, String> {
    s.parse().map_err(|e: cgomega::Error| e.to_string())
}

fn format(s: &str) -> Result<Format, String> {
    s.parse().map_err(|e: cgomega::Error| e.to_string())
}

enum Failure {
    Usage(String),
    Check(String),
}

impl From<cgomega::Error> for Failure {
    fn from(e: cgomega::Error) -> Self {
        Failure::Usage(e.to_string())
    }
}

fn emit(text: &str) -> Result<(), Failure> {
    let mut out = std::io::stdout().lock();
    out.write_all(text.as_bytes())
        .and_then(|_| out.flush())
        .map_err(|e| Failure::Check(format!("writing output: {e}")))
}

fn to_json<T: serde::Serialize>(value: &T) -> Result<String, Failure> {
    serde_json::to_string_pretty(value)
        .map(|s| s + "\n")
        .map_err(|e| Failure::Check(e.to_string()))
}

fn coeff_line(v: &SqrtRational, digits: Option<u32>) -> String {
    match digits {
        Some(d) => format!("{v}  {}\n", v.to_decimal(d)),
        None => format!("{v}\n"),
    }
}

fn run(cli: Cli) -> Result<(), Failure> {
    match cli.command {
        Command::Coeff {
            j1,
            j2,
            j,
            m1,
            m2,
            m,
            route,
            digits,
        } => {
            let value = coefficient(j1, m1, j2, m2, j, route)?;
            let value = match m {
                Some(m) if m != m1 + m2 => {
                    m.validate(j)?;
                    SqrtRational::zero()
                }
                _ => value,
            };
            emit(&coeff_line(&value, digits))
        }
        Command::Table {
            j1,
            j2,
            route,
            format,
            digits,
        } => {
            let table = match route {
                Provenance::Omega(r) => build_table(j1, j2, r)?,
                Provenance::Racah => racah_table(j1, j2)?,
            };
            emit(&render(&table, format, digits)?)
        }
        Command::Omega {
            j1,
            j2,
            n,
            which,
            route,
            format,
        } => {
            let m: OmegaMatrix = match which {
                Which::Omega0 => omega0(j1, j2),
                Which::Lambda => lambda_and_v(j1, j2).0,
                Which::V => lambda_and_v(j1, j2).1,
                Which::LvPow => lambda_minus_v_pow(j1, j2, n),
                Which::Tilde => tilde_omega(j1, j2, n)?,
                Which::Omega => omega_n(j1, j2, n, route)?,
                Which::Omega0Inv => omega0_reciprocal(j1, j2),
            };
            match format {
                MatrixFormat::Text => emit(&m.dump()),
                MatrixFormat::Json => emit(&to_json(&m)?),
            }
        }
        Command::Verify {
            max_2j,
            digits,
            no_recursion,
            format,
            verbose,
        } => verify(max_2j, digits, no_recursion, format, verbose),
        Command::Bench {
            j1,
            j2,
            max_2j,
            step,
            route,
            reps,
            samples,
            seed,
            format,
        } => {
            let pairs: Vec<(TwoJ, TwoJ)> = match (j1, j2) {
                (Some(a), Some(b)) => vec![(a, b)],
                _ => {
                    if step == 0 {
                        return Err(Failure::Usage("--step must be positive".into()));
                    }
                    (1..=max_2j / step).map(|k| (TwoJ::new(k * step), TwoJ::new(k * step))).collect()
                }
            };
            bench(&pairs, route, reps, samples, seed, format)
        }
    }
}

fn verify(max_2j: u32, digits: u32, no_recursion: bool, format: MatrixFormat, verbose: bool) -> Result<(), Failure> {
    let options = VerifyOptions {
        routes: Route::ALL.to_vec(),
        precision_digits: (!no_recursion).then_some(digits),
    };
    let pairs: Vec<(u32, u32)> = (0..=max_2j).flat_map(|b| (0..=b).map(move |a| (a, b))).collect();
    let reports = pairs
        .par_iter()
        .map(|&(a, b)| verify_with(TwoJ::new(a), TwoJ::new(b), &options))
        .collect::<Result<Vec<VerificationReport>, _>>()?;
    let failed: usize = reports.iter().map(|r| r.failures.len()).sum();

    match format {
        MatrixFormat::Json => emit(&to_json(&reports)?)?,
        MatrixFormat::Text => {
            let mut out = String::new();
            for r in &reports {
                let (a, b) = (r.pair.two_j1 as i64, r.pair.two_j2 as i64);
                if verbose {
                    out += &format!(
                        "({}, {}): {} checks, {} failed\n",
                        format_doubled(a),
                        format_doubled(b),
                        r.checks_run,
                        r.failures.len()
                    );
                }
                for f in &r.failures {
                    out += &format!(
                        "FAIL ({}, {}) {} |{},{}> ({},{}): engine {} oracle {}\n",
                        format_doubled(a),
                        format_doubled(b),
                        f.check,
                        format_doubled(f.two_j as i64),
                        format_doubled(f.two_m as i64),
                        format_doubled(f.two_m1 as i64),
                        format_doubled(f.two_m2 as i64),
                        f.engine,
                        f.oracle
                    );
                }
            }
            if failed == 0 {
                out += "all checks passed\n";
            } else {
                out += &format!("{failed} checks failed\n");
            }
            emit(&out)?;
        }
    }
    if failed == 0 {
        Ok(())
    } else {
        Err(Failure::Check(format!("{failed} checks failed")))
    }
}

fn bench(
    pairs: &[(TwoJ, TwoJ)],
    route: Route,
    reps: usize,
    samples: usize,
    seed: u64,
    format: MatrixFormat,
) -> Result<(), Failure> {
    let mut reports: Vec<EffortReport> = Vec::new();
    if format == MatrixFormat::Text {
        emit(&format!(
            "{:>5} {:>5} {:>8} {:>10} {:>10} {:>10} {:>10} {:>7} {:>5}\n",
            "twoJ1", "twoJ2", "entries", "omega_s", "omega_bits", "racah_s", "racah_bits", "sampled", "agree"
        ))?;
    }
    for &(a, b) in pairs {
        let r = compare_effort(a, b, route, reps, samples, seed)?;
        if format == MatrixFormat::Text {
            emit(&format!(
                "{:>5} {:>5} {:>8} {:>10.4} {:>10} {:>10.4} {:>10} {:>7} {:>5}\n",
                r.two_j1,
                r.two_j2,
                r.entries,
                r.omega_seconds,
                r.omega_max_bits,
                r.racah_seconds,
                r.racah_max_bits,
                r.sampled,
                if r.agree() { "yes" } else { "NO" }
            ))?;
        }
        reports.push(r);
    }
    if format == MatrixFormat::Json {
        emit(&to_json(&reports)?)?;
    }
    let bad = reports.iter().filter(|r| !r.agree()).count();
    if bad == 0 {
        Ok(())
    } else {
        Err(Failure::Check(format!("{bad} pairs disagree on sampled coefficients")))
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => e.exit(),
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Check(msg)) => {
            eprintln!("cgomega: {msg}");
            ExitCode::from(1)
        }
        Err(Failure::Usage(msg)) => {
            eprintln!("cgomega: {msg}");
            ExitCode::from(2)
        }
    }
}
