use std::fmt::Write as _;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

use strategic_maxima::bench::bench_maxima;
use strategic_maxima::io::{generate_instance, parse_instance, InstanceFile};
use strategic_maxima::lab::{
    boundary_payments, replay_impossibility_dv, replay_impossibility_truthful, replay_instance,
    search_violations, DeviationReport, Deviations, Replay,
};
use strategic_maxima::mechanism::{run_mechanism, MechanismKind, MechanismOutcome, PaymentPolicy};
use strategic_maxima::pareto::{max_set_fast, wmax_set};
use strategic_maxima::refpoints::{
    reference_points_2d, reference_points_vmax_oracle_with_budget, reference_points_with_budget,
    DEFAULT_GRID_BUDGET, DEFAULT_VMAX_BUDGET,
};
use strategic_maxima::vector::{Vector, VectorSet};

type Failure = Box<dyn std::error::Error>;

#[derive(Parser)]
#[command(
    name = "smax",
    version,
    about = "Pareto maxima, reference points and vector-payment mechanisms"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Print the maximal (non-dominated) bids.
    Max { file: PathBuf },
    /// Print the weakly maximal (not strongly dominated) bids.
    Wmax { file: PathBuf },
    /// Print the reference points of the bids.
    Refpoints {
        file: PathBuf,
        #[arg(long, value_enum, default_value_t = Method::Grid)]
        method: Method,
        /// Emit `x y` rows for plotting (k = 2 only).
        #[arg(long)]
        plot: bool,
        /// Work cap for the grid and vmax-oracle methods.
        #[arg(long)]
        budget: Option<u128>,
    },
    /// Run a mechanism on the bids.
    Mech {
        file: PathBuf,
        #[arg(long, default_value = "m")]
        kind: MechanismKind,
        #[arg(long, default_value = "lex-min")]
        policy: PaymentPolicy,
        #[arg(long, value_enum, default_value_t = Format::Text)]
        format: Format,
    },
    /// Search for profitable lies while the other agents report truthfully.
    /// Exits with status 1 if one is found.
    Verify {
        file: PathBuf,
        #[arg(long, default_value = "m")]
        kind: MechanismKind,
        #[arg(long, default_value = "lex-min")]
        policy: PaymentPolicy,
        #[arg(long, value_enum, default_value_t = DeviationKind::Grid)]
        deviations: DeviationKind,
        /// Maximum number of deviations per agent.
        #[arg(long, default_value_t = strategic_maxima::lab::DEFAULT_DEVIATION_BUDGET)]
        budget: usize,
    },
    /// Replay the counterexamples against arbitrary Pareto payment rules on
    /// bids (3,1), (1,3), (2,2).
    Replay {
        #[arg(long = "case", value_enum)]
        case: ReplayKind,
        /// Payment charged to the bid (2,2), e.g. "1.5 1.5".
        #[arg(long)]
        payment: Option<String>,
    },
    /// Write a random instance whose valuations equal its bids.
    Gen {
        #[arg(short, long)]
        n: usize,
        #[arg(short, long)]
        k: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// No two agents share a value in any dimension.
        #[arg(long)]
        dv: bool,
        #[arg(long, default_value_t = 1)]
        min: u64,
        #[arg(long, default_value_t = 1000)]
        max: u64,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Time the maxima computation on random points.
    Bench {
        #[arg(short, long, default_value_t = 2)]
        k: usize,
        /// Comma-separated input sizes.
        #[arg(long, value_delimiter = ',', default_values_t = [25_000usize, 50_000, 100_000, 200_000])]
        sizes: Vec<usize>,
        #[arg(long, default_value_t = 3)]
        reps: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Largest size for which the quadratic oracle is also timed.
        #[arg(long, default_value_t = 5_000)]
        naive_limit: usize,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum Method {
    Grid,
    Staircase,
    VmaxOracle,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Text,
    Kv,
}

#[derive(Clone, Copy, ValueEnum)]
enum DeviationKind {
    Grid,
}

#[derive(Clone, Copy, ValueEnum)]
enum ReplayKind {
    Truthful,
    Dv,
}

fn rows(out: &mut String, vs: &[Vector]) {
    for v in vs {
        let cells: Vec<String> = v.coords().iter().map(ToString::to_string).collect();
        let _ = writeln!(out, "{}", cells.join(" "));
    }
}

fn csv(v: &Vector) -> String {
    v.coords()
        .iter()
        .map(ToString::to_string)
        .collect::<Vec<_>>()
        .join(",")
}

fn load_set(file: &PathBuf) -> Result<VectorSet, Failure> {
    Ok(parse_instance(file)?.bid_set()?)
}

fn outcome_text(out: &mut String, o: &MechanismOutcome, format: Format) {
    for a in &o.agents {
        if format == Format::Kv {
            let _ = write!(
                out,
                "id={} winner={} removed={} payment={} candidates={}",
                a.id,
                a.winner,
                a.removed_as_duplicate,
                csv(&a.payment),
                a.pay_candidates.len()
            );
            if let Some(u) = &a.utility {
                let _ = write!(out, " utility={}", csv(u));
            }
            out.push('\n');
            continue;
        }
        let status = if a.removed_as_duplicate {
            "removed (duplicate bid)"
        } else if a.winner {
            "wins"
        } else {
            "loses"
        };
        let _ = write!(out, "agent {} bid {} {status}", a.id, a.bid);
        if a.winner {
            let _ = write!(
                out,
                ", pays {} of {} candidates",
                a.payment,
                a.pay_candidates.len()
            );
        }
        if let Some(u) = &a.utility {
            let _ = write!(out, ", utility {u}");
        }
        out.push('\n');
    }
}

fn report_text(out: &mut String, r: &DeviationReport) {
    let _ = writeln!(
        out,
        "agent {} valuation {}: truthful utility {}, bidding {} gives {} ({:?})",
        r.agent, r.valuation, r.truthful_utility, r.deviation_bid, r.deviation_utility, r.verdict
    );
}

fn replay_text(out: &mut String, r: &Replay) {
    let _ = writeln!(
        out,
        "payment {} ({:?}): valuation {}, truthful utility {}, lie {} gives {} ({:?}); distinct values: {}",
        r.payment,
        r.case,
        r.report.valuation,
        r.report.truthful_utility,
        r.report.deviation_bid,
        r.report.deviation_utility,
        r.report.verdict,
        r.dv_holds
    );
}

fn run(cli: Cli, out: &mut String) -> Result<ExitCode, Failure> {
    match cli.command {
        Command::Max { file } => rows(out, max_set_fast(&load_set(&file)?).members()),
        Command::Wmax { file } => rows(out, wmax_set(&load_set(&file)?).members()),
        Command::Refpoints {
            file,
            method,
            plot,
            budget,
        } => {
            let s = load_set(&file)?;
            let t = match method {
                Method::Grid => {
                    reference_points_with_budget(&s, budget.unwrap_or(DEFAULT_GRID_BUDGET))?
                }
                Method::Staircase => reference_points_2d(&s)?,
                Method::VmaxOracle => reference_points_vmax_oracle_with_budget(
                    &s,
                    budget.unwrap_or(DEFAULT_VMAX_BUDGET),
                )?,
            };
            if plot {
                if t.dim() != 2 {
                    return Err(format!("--plot needs k = 2, got k = {}", t.dim()).into());
                }
                out.push_str("# x y\n");
            }
            rows(out, t.points());
        }
        Command::Mech {
            file,
            kind,
            policy,
            format,
        } => {
            let instance = parse_instance(&file)?.to_instance()?;
            let outcome = run_mechanism(&instance, kind, policy)?;
            outcome_text(out, &outcome, format);
        }
        Command::Verify {
            file,
            kind,
            policy,
            deviations: DeviationKind::Grid,
            budget,
        } => {
            let parsed = parse_instance(&file)?;
            let mut instance = parsed.to_instance()?;
            if !instance.has_valuations() {
                instance = InstanceFile::new(parsed.dim, parsed.bids.clone(), Some(parsed.bids))
                    .to_instance()?;
            }
            let dv = instance.dv_report();
            let summary = search_violations(&instance, kind, policy, &Deviations::Grid { budget })?;
            for r in &summary.violations {
                report_text(out, r);
            }
            let _ = writeln!(
                out,
                "{} deviations checked, {} incomparable, {} profitable; distinct values: {}",
                summary.evaluated,
                summary.incomparable,
                summary.violations.len(),
                dv.holds
            );
            if !summary.violations.is_empty() {
                return Ok(ExitCode::from(1));
            }
        }
        Command::Replay { case, payment } => {
            let payments = match payment {
                Some(p) => vec![parse_vector(&p)?],
                None => match case {
                    ReplayKind::Truthful => {
                        let mut v = vec![Vector::parse("1.5 1.5")];
                        v.extend(boundary_payments());
                        v
                    }
                    ReplayKind::Dv => boundary_payments().to_vec(),
                },
            };
            for p in &payments {
                let r = match case {
                    ReplayKind::Truthful => replay_impossibility_truthful(p)?,
                    ReplayKind::Dv => replay_impossibility_dv(p)?,
                };
                replay_text(out, &r);
            }
            if let ReplayKind::Dv = case {
                let control = search_violations(
                    &replay_instance(),
                    MechanismKind::Pareto,
                    PaymentPolicy::LexMin,
                    &Deviations::default(),
                )?;
                let _ = writeln!(
                    out,
                    "mechanism m on valuations (3,1) (1,3) (2,2): {} deviations checked, {} profitable",
                    control.evaluated,
                    control.violations.len()
                );
            }
        }
        Command::Gen {
            n,
            k,
            seed,
            dv,
            min,
            max,
            output,
        } => {
            let instance = generate_instance(n, k, seed, dv, min..=max)?;
            let text = InstanceFile::from_instance(&instance).serialize();
            match output {
                Some(path) => {
                    std::fs::write(&path, text).map_err(|e| format!("{}: {e}", path.display()))?
                }
                None => out.push_str(&text),
            }
        }
        Command::Bench {
            k,
            sizes,
            reps,
            seed,
            naive_limit,
        } => {
            let _ = writeln!(out, "n k maxima fast_ms naive_ms");
            for r in bench_maxima(k, &sizes, seed, reps, naive_limit)? {
                let naive = r.naive.map_or_else(
                    || "-".to_string(),
                    |d| format!("{:.3}", d.as_secs_f64() * 1e3),
                );
                let _ = writeln!(
                    out,
                    "{} {} {} {:.3} {}",
                    r.n,
                    r.k,
                    r.maxima,
                    r.fast.as_secs_f64() * 1e3,
                    naive
                );
            }
        }
    }
    Ok(ExitCode::SUCCESS)
}

fn parse_vector(text: &str) -> Result<Vector, Failure> {
    let coords = text
        .split(|c: char| c == ',' || c.is_whitespace())
        .filter(|t| !t.is_empty())
        .map(str::parse)
        .collect::<Result<Vec<_>, _>>()?;
    Ok(Vector::new(coords)?)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let mut out = String::new();
    let code = run(cli, &mut out);
    print!("{out}");
    match code {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
