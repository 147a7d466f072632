//! Command-line front end: derivative operators on map literals and the
//! axiom suites with JSON or text reports.

use clap::{Args, Parser, Subcommand, ValueEnum};

use fodlab::expr::parse_map;
use fodlab::gen::{GenParams, DEFAULT_SEED, DEFAULT_TRIALS};
use fodlab::linearity::{dt_derivative, is_linear_map, Trivialization};
use fodlab::polymap::PolyMap;
use fodlab::rdc2cdc::{rdc_to_cdc, rdc_to_cdc_closed};
use fodlab::simple::forward_section_d;
use fodlab::tangent::tau;

#[derive(Parser)]
#[command(name = "fodlab", version, about = "Exact first-order differential structure over polynomial maps", long_about = None)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Forward derivative of a map literal.
    Fwd {
        /// Map literal, e.g. "[x0^2*x1; x1] : 2 -> 2".
        #[arg(long)]
        map: String,
    },
    /// Reverse derivative of a map literal.
    Rev {
        #[arg(long)]
        map: String,
    },
    /// Run a map through the reverse-reverse pipeline and compare with
    /// the closed form and the direct forward derivative.
    Rdc2cdc {
        #[arg(long)]
        map: String,
        /// Print the equality verdict (and exit nonzero on mismatch).
        #[arg(long)]
        verify: bool,
    },
    /// Linearity of a map against trivializations (identity by default).
    Linearity {
        #[arg(long)]
        map: String,
        /// Fiber action on the source as a square linear map literal,
        /// e.g. "[2*x0] : 1 -> 1".
        #[arg(long)]
        triv_a: Option<String>,
        /// Fiber action on the target, same format.
        #[arg(long)]
        triv_b: Option<String>,
    },
    /// Run axiom suites and emit a report.
    Check(CheckArgs),
}

#[derive(Args)]
struct CheckArgs {
    /// One of cdc, rdc, gcdc, tangent, dT, rdc2cdc, oracle, all.
    #[arg(long)]
    suite: String,
    #[arg(long, default_value_t = DEFAULT_TRIALS)]
    trials: u64,
    /// Seed for the generators; FODLAB_SEED overrides when set.
    #[arg(long, default_value_t = DEFAULT_SEED)]
    seed: u64,
    #[arg(long, default_value_t = 4)]
    max_dim: usize,
    #[arg(long, default_value_t = 4)]
    max_degree: u32,
    #[arg(long, value_enum, default_value_t = Format::Text)]
    format: Format,
}

#[derive(Copy, Clone, ValueEnum)]
enum Format {
    Json,
    Text,
}

fn main() {
    let cli = Cli::parse();
    match run(cli) {
        Ok(all_passed) => {
            if !all_passed {
                std::process::exit(1);
            }
        }
        Err(e) => {
            eprintln!("error: {e}");
            std::process::exit(2);
        }
    }
}

fn trivialization_from_arg(arg: &Option<String>, dim: usize) -> fodlab::Result<Trivialization> {
    match arg {
        None => Ok(Trivialization::identity(dim)),
        Some(src) => {
            let action = parse_map(src)?;
            if action.dom() != dim || action.cod() != dim {
                return Err(fodlab::Error::Dimension(format!(
                    "trivialization action must be {dim} -> {dim}"
                )));
            }
            let dims = [dim, dim];
            let fwd = PolyMap::projection(&dims, 0)
                .pair(&action.compose(&PolyMap::projection(&dims, 1))?)?;
            Trivialization::from_map(&fwd)
        }
    }
}

fn run(cli: Cli) -> fodlab::Result<bool> {
    match cli.command {
        Command::Fwd { map } => {
            let f = parse_map(&map)?;
            println!("{}", fodlab::harness::describe_forward(&f));
            Ok(true)
        }
        Command::Rev { map } => {
            let f = parse_map(&map)?;
            println!("{}", fodlab::harness::describe_reverse(&f));
            Ok(true)
        }
        Command::Rdc2cdc { map, verify } => {
            let f = parse_map(&map)?;
            let pipeline = rdc_to_cdc(&f);
            let closed = rdc_to_cdc_closed(&f);
            let direct = forward_section_d(&f);
            println!("pipeline fib: {}", pipeline.fib());
            println!("closed fib:   {}", closed.fib());
            println!("direct fib:   {}", direct.fib());
            if verify {
                let agree = pipeline == closed && closed == direct;
                println!("verdict: {}", if agree { "equal" } else { "DIFFERENT" });
                return Ok(agree);
            }
            Ok(true)
        }
        Command::Linearity { map, triv_a, triv_b } => {
            let f = parse_map(&map)?;
            let t_a = trivialization_from_arg(&triv_a, f.dom())?;
            let t_b = trivialization_from_arg(&triv_b, f.cod())?;
            let linear = is_linear_map(&f, &t_a, &t_b)?;
            if linear {
                println!("linear");
            } else {
                println!("not linear");
                let lhs = t_b.fwd().compose(&tau(&f))?;
                let rhs = f.product(&f).compose(t_a.fwd())?;
                println!("square lhs: {lhs}");
                println!("square rhs: {rhs}");
                // Show the induced derivative too; it is what fails to
                // match f applied to the transported tangent.
                let dt = dt_derivative(&f, &t_a, &t_b)?;
                println!("induced fib: {}", dt.fib());
            }
            Ok(true)
        }
        Command::Check(args) => {
            let seed = match std::env::var("FODLAB_SEED") {
                Ok(s) => s.parse().map_err(|_| {
                    fodlab::Error::Instance(format!("FODLAB_SEED is not an integer: {s}"))
                })?,
                Err(_) => args.seed,
            };
            let params = GenParams {
                max_dim: args.max_dim,
                max_degree: args.max_degree,
                seed,
                ..GenParams::default()
            };
            let reports = fodlab::harness::run(&args.suite, &params, args.trials)?;
            let all_passed = reports.iter().all(|r| r.all_passed());
            match args.format {
                Format::Json => {
                    let bodies: Vec<String> = reports.iter().map(|r| r.to_json()).collect();
                    println!("[{}]", bodies.join(",\n"));
                }
                Format::Text => {
                    for r in &reports {
                        print!("{}", r.render_text());
                    }
                    println!("overall: {}", if all_passed { "PASS" } else { "FAIL" });
                }
            }
            Ok(all_passed)
        }
    }
}
