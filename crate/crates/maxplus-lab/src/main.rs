//! Batch experiment runner. See `maxplus-lab help` or the README for
//! the config format; the library's `examples/` directory shows each
//! capability in code.

use std::path::PathBuf;
use std::process::ExitCode;

use maxplus_lab::experiment::{
    run_check, run_convergence, run_counterexample, run_evolve, run_generator, run_quotient_demo,
    run_resolvent, ExperimentConfig,
};

const USAGE: &str = "\
maxplus-lab — property lab for max-plus operator semigroups

USAGE:
    maxplus-lab <COMMAND> [--config <path>] [--out <dir>] [--seed <int>] [--levels <int>]

COMMANDS:
    evolve         run one trajectory and dump it (trajectory.txt, mass.csv for godunov)
    check          run the configured property suite (properties.csv, summary.txt);
                   exits nonzero iff a verdict misses its declared expectation
    convergence    defect-vs-resolution study over refinement levels (convergence.csv)
    generator      finite-difference generator report (generator.csv, generator_af.txt)
    resolvent      dissipativity probe of the discrete generator (resolvent.csv)
    quotient-demo  the three documented quotient instances (quotient.csv); no config needed
    counterexample generator max-additivity counterexample (counterexample.csv); no config needed
    help           print this text

FLAGS:
    --config <path>   experiment config (required except quotient-demo/counterexample/help)
    --out <dir>       output directory (default: ./out)
    --seed <int>      override [experiment] seed
    --levels <int>    override [experiment] levels
";

struct Args {
    command: String,
    config: Option<PathBuf>,
    out: PathBuf,
    seed: Option<u64>,
    levels: Option<usize>,
}

fn parse_args() -> Result<Args, String> {
    let mut argv = std::env::args().skip(1);
    let command = argv.next().ok_or_else(|| USAGE.to_string())?;
    let mut args = Args {
        command,
        config: None,
        out: PathBuf::from("out"),
        seed: None,
        levels: None,
    };
    while let Some(flag) = argv.next() {
        let mut value = || {
            argv.next()
                .ok_or_else(|| format!("flag {flag} needs a value"))
        };
        match flag.as_str() {
            "--config" => args.config = Some(PathBuf::from(value()?)),
            "--out" => args.out = PathBuf::from(value()?),
            "--seed" => {
                args.seed = Some(
                    value()?
                        .parse()
                        .map_err(|_| "--seed needs an integer".to_string())?,
                )
            }
            "--levels" => {
                args.levels = Some(
                    value()?
                        .parse()
                        .map_err(|_| "--levels needs an integer".to_string())?,
                )
            }
            other => return Err(format!("unknown flag `{other}`\n\n{USAGE}")),
        }
    }
    Ok(args)
}

fn load_config(args: &Args) -> Result<ExperimentConfig, String> {
    let path = args
        .config
        .as_ref()
        .ok_or_else(|| format!("command `{}` needs --config <path>", args.command))?;
    ExperimentConfig::from_file(path, args.seed, args.levels).map_err(|e| e.to_string())
}

fn main() -> ExitCode {
    let args = match parse_args() {
        Ok(a) => a,
        Err(msg) => {
            eprintln!("{msg}");
            return ExitCode::from(2);
        }
    };
    let outcome: Result<i32, String> = match args.command.as_str() {
        "help" | "--help" | "-h" => {
            println!("{USAGE}");
            Ok(0)
        }
        "quotient-demo" => run_quotient_demo(&args.out)
            .map(|p| {
                println!("wrote {}", p.display());
                0
            })
            .map_err(|e| e.to_string()),
        "counterexample" => run_counterexample(&args.out, 2049, 1e-3)
            .map(|p| {
                println!("wrote {}", p.display());
                0
            })
            .map_err(|e| e.to_string()),
        "evolve" => load_config(&args).and_then(|c| {
            run_evolve(&c, &args.out)
                .map(|p| {
                    println!("wrote {}", p.display());
                    0
                })
                .map_err(|e| e.to_string())
        }),
        "check" => load_config(&args).and_then(|c| {
            run_check(&c, &args.out)
                .map(|outcome| {
                    for f in &outcome.failures {
                        eprintln!("expectation failed: {f}");
                    }
                    println!(
                        "{} reports written to {}",
                        outcome.reports.len(),
                        args.out.display()
                    );
                    outcome.exit_code()
                })
                .map_err(|e| e.to_string())
        }),
        "convergence" => load_config(&args).and_then(|c| {
            run_convergence(&c, &args.out)
                .map(|p| {
                    println!("wrote {}", p.display());
                    0
                })
                .map_err(|e| e.to_string())
        }),
        "generator" => load_config(&args).and_then(|c| {
            run_generator(&c, &args.out)
                .map(|p| {
                    println!("wrote {}", p.display());
                    0
                })
                .map_err(|e| e.to_string())
        }),
        "resolvent" => load_config(&args).and_then(|c| {
            run_resolvent(&c, &args.out)
                .map(|p| {
                    println!("wrote {}", p.display());
                    0
                })
                .map_err(|e| e.to_string())
        }),
        other => Err(format!("unknown command `{other}`\n\n{USAGE}")),
    };
    match outcome {
        Ok(0) => ExitCode::SUCCESS,
        Ok(code) => ExitCode::from(code as u8),
        Err(msg) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
    }
}
