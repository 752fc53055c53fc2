use std::io;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::Parser;
use cologic_cli::{load_program, run_file, CliConfig, Repl, EXIT_ERROR};
use cologic_core::{EngineConfig, Mode, Program};

/// Logic programs with co-facts: run queries or start an interactive session.
#[derive(Parser, Debug)]
#[command(name = "cologic", version)]
struct Args {
    /// Program file (.colp)
    file: Option<PathBuf>,
    /// Semantics: cofacts, inductive or coinductive
    #[arg(long, default_value = "cofacts")]
    mode: Mode,
    /// Print every answer instead of the first one
    #[arg(long)]
    all: bool,
    /// How many times an atom may be revisited during an inductive check
    #[arg(long, value_name = "N", default_value_t = 2, value_parser = clap::value_parser!(u32).range(1..))]
    revisit_limit: u32,
    /// Keep trying clauses for atoms that match a coinductive hypothesis
    #[arg(long)]
    no_hyp_cut: bool,
    /// Give up on a query after N resolution steps
    #[arg(long, value_name = "N")]
    budget: Option<u64>,
    /// Print the least, greatest and generated models of a Datalog program
    #[arg(long)]
    oracle: bool,
    /// Run a query and exit (repeatable); without queries a REPL starts
    #[arg(long = "query", short = 'q', value_name = "QUERY")]
    queries: Vec<String>,
}

fn main() -> ExitCode {
    let args = Args::parse();
    let cfg = CliConfig {
        engine: EngineConfig {
            lfp_revisit_limit: args.revisit_limit,
            hyp_cut: !args.no_hyp_cut,
            step_budget: args.budget,
            mode: args.mode,
        },
        all_answers: args.all,
        oracle: args.oracle,
    };
    let (stdout, stderr) = (io::stdout(), io::stderr());
    if !args.queries.is_empty() || args.oracle {
        let Some(file) = &args.file else {
            eprintln!("error: queries and --oracle need a program file");
            return ExitCode::from(EXIT_ERROR as u8);
        };
        let status = run_file(file, &args.queries, &cfg, &mut stdout.lock(), &mut stderr.lock());
        return ExitCode::from(status as u8);
    }
    let program = match &args.file {
        Some(f) => match load_program(f) {
            Ok(p) => p,
            Err(e) => {
                eprintln!("error: {e}");
                return ExitCode::from(EXIT_ERROR as u8);
            }
        },
        None => Program::default(),
    };
    let mut repl = Repl::new(program, args.file.clone(), cfg);
    eprintln!("{}", repl.banner());
    match repl.run(&mut io::stdin().lock(), &mut stdout.lock(), &mut stderr.lock()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(EXIT_ERROR as u8)
        }
    }
}
