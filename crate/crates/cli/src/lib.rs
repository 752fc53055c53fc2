//! Command-line front end: batch query runs and an interactive REPL.

use std::fmt::Write as _;
use std::io::{self, BufRead, Write};
use std::path::{Path, PathBuf};

use cologic_core::oracle::{GroundUniverse, OracleReport};
use cologic_core::{parse_program, parse_query, solve, Answer, EngineConfig, EngineError, Mode, Program, SourceProgram};

/// Exit statuses of a batch run.
pub const EXIT_ANSWERED: i32 = 0;
pub const EXIT_NO_ANSWER: i32 = 1;
pub const EXIT_ERROR: i32 = 2;

#[derive(Debug, Clone, Default)]
pub struct CliConfig {
    pub engine: EngineConfig,
    pub all_answers: bool,
    pub oracle: bool,
}

/// Renders one answer, one equation per line, without the final terminator.
pub fn format_answer(ans: &Answer) -> String {
    if ans.is_empty() {
        return "true".to_string();
    }
    let eqs = &ans.equations;
    let lines: Vec<String> = eqs.equations.iter().map(|e| eqs.equation_to_string(e)).collect();
    lines.join(",\n")
}

pub fn load_program(path: &Path) -> Result<Program, String> {
    let text = std::fs::read_to_string(path).map_err(|e| format!("{}: {e}", path.display()))?;
    parse_program(&SourceProgram::new(text, path.display().to_string())).map_err(|e| e.to_string())
}

/// Oracle report over the constants of the program and of `queries`.
pub fn oracle_report(program: &Program, queries: &[String]) -> Result<String, String> {
    let mut extra = Vec::new();
    for q in queries {
        extra.extend(parse_query(q).map_err(|e| e.to_string())?.goal.atoms);
    }
    let u = GroundUniverse::of_program(program, &extra);
    OracleReport::compute(program, &u).map(|r| r.to_string()).map_err(|e| e.to_string())
}

/// How a query run ended.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum QueryOutcome {
    Answered(usize),
    NoAnswer,
}

/// Runs one query non-interactively: the first answer, or every answer when
/// `all` is set.
pub fn run_query(program: &Program, query: &str, cfg: &CliConfig, out: &mut impl Write) -> Result<QueryOutcome, String> {
    let q = parse_query(query).map_err(|e| e.to_string())?;
    let mut answers = solve(program, &q, cfg.engine);
    let mut next = answers.next().transpose().map_err(engine_error)?;
    let mut shown = 0;
    while let Some(ans) = next {
        shown += 1;
        next = if cfg.all_answers {
            answers.next().transpose().map_err(engine_error)?
        } else {
            None
        };
        let end = if next.is_some() { " ;" } else { "." };
        writeln!(out, "{}{end}", format_answer(&ans)).map_err(|e| e.to_string())?;
    }
    if shown == 0 {
        writeln!(out, "false.").map_err(|e| e.to_string())?;
        return Ok(QueryOutcome::NoAnswer);
    }
    Ok(QueryOutcome::Answered(shown))
}

fn engine_error(e: EngineError) -> String {
    e.to_string()
}

/// Batch mode: optional oracle report, then each query in turn. Returns the
/// exit status.
pub fn run_file(path: &Path, queries: &[String], cfg: &CliConfig, out: &mut impl Write, err: &mut impl Write) -> i32 {
    let program = match load_program(path) {
        Ok(p) => p,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            return EXIT_ERROR;
        }
    };
    let mut status = EXIT_ANSWERED;
    if cfg.oracle {
        match oracle_report(&program, queries) {
            Ok(r) => {
                let _ = write!(out, "{r}");
            }
            Err(e) => {
                let _ = writeln!(err, "error: {e}");
                status = EXIT_ERROR;
            }
        }
    }
    for q in queries {
        match run_query(&program, q, cfg, out) {
            Ok(QueryOutcome::Answered(_)) => {}
            Ok(QueryOutcome::NoAnswer) => status = status.max(EXIT_NO_ANSWER),
            Err(e) => {
                let _ = writeln!(err, "error: {e}");
                status = EXIT_ERROR;
            }
        }
    }
    status
}

/// Interactive session state.
pub struct Repl {
    program: Program,
    source: Option<PathBuf>,
    cfg: CliConfig,
}

const HELP: &str = "\
Enter a query such as `member(X, [1, 2]).`
After an answer, type `;` for the next one or press return to accept it.
Commands: :mode cofacts|inductive|coinductive, :load FILE, :oracle, :help, :quit";

impl Repl {
    pub fn new(program: Program, source: Option<PathBuf>, cfg: CliConfig) -> Self {
        Repl { program, source, cfg }
    }

    pub fn mode(&self) -> Mode {
        self.cfg.engine.mode
    }

    pub fn program(&self) -> &Program {
        &self.program
    }

    /// Reads commands and queries from `input` until end of input or `:quit`.
    pub fn run(&mut self, input: &mut impl BufRead, out: &mut impl Write, err: &mut impl Write) -> io::Result<()> {
        loop {
            write!(out, "?- ")?;
            out.flush()?;
            let Some(line) = read_line(input)? else {
                writeln!(out)?;
                return Ok(());
            };
            let line = line.trim();
            if line.is_empty() {
                continue;
            }
            if let Some(cmd) = line.strip_prefix(':') {
                if !self.command(cmd, out, err)? {
                    return Ok(());
                }
                continue;
            }
            let line = line.strip_prefix("?-").unwrap_or(line);
            if let Err(e) = self.query(line, input, out) {
                writeln!(err, "error: {e}")?;
            }
        }
    }

    /// Runs a meta-command; returns false on `:quit`.
    fn command(&mut self, cmd: &str, out: &mut impl Write, err: &mut impl Write) -> io::Result<bool> {
        let (name, arg) = match cmd.split_once(char::is_whitespace) {
            Some((n, a)) => (n, a.trim()),
            None => (cmd, ""),
        };
        match name {
            "quit" | "q" => return Ok(false),
            "help" => writeln!(out, "{HELP}")?,
            "mode" if arg.is_empty() => writeln!(out, "mode: {}", self.cfg.engine.mode)?,
            "mode" => match arg.parse::<Mode>() {
                Ok(m) => self.cfg.engine.mode = m,
                Err(e) => writeln!(err, "error: {e}")?,
            },
            "load" if arg.is_empty() => writeln!(err, "error: :load needs a file name")?,
            "load" => match load_program(Path::new(arg)) {
                Ok(p) => {
                    writeln!(out, "loaded {arg}: {} clauses, {} co-facts", p.clauses.len(), p.cofacts.len())?;
                    self.program = p;
                    self.source = Some(PathBuf::from(arg));
                }
                Err(e) => writeln!(err, "error: {e}")?,
            },
            "oracle" => match oracle_report(&self.program, &[]) {
                Ok(r) => write!(out, "{r}")?,
                Err(e) => writeln!(err, "error: {e}")?,
            },
            _ => writeln!(err, "error: unknown command `:{name}` (try :help)")?,
        }
        Ok(true)
    }

    fn query(&mut self, text: &str, input: &mut impl BufRead, out: &mut impl Write) -> Result<(), String> {
        let q = parse_query(text).map_err(|e| e.to_string())?;
        let mut answers = solve(&self.program, &q, self.cfg.engine);
        let io = |e: io::Error| e.to_string();
        let Some(mut ans) = answers.next().transpose().map_err(engine_error)? else {
            writeln!(out, "false.").map_err(io)?;
            return Ok(());
        };
        loop {
            let next = answers.next().transpose();
            let text = format_answer(&ans);
            match next {
                Ok(None) => {
                    writeln!(out, "{text}.").map_err(io)?;
                    return Ok(());
                }
                Ok(Some(more)) => {
                    write!(out, "{text} ").map_err(io)?;
                    out.flush().map_err(io)?;
                    let reply = read_line(input).map_err(io)?.unwrap_or_default();
                    if reply.trim() != ";" {
                        writeln!(out, ".").map_err(io)?;
                        return Ok(());
                    }
                    writeln!(out, ";").map_err(io)?;
                    ans = more;
                }
                Err(e) => {
                    // the answer found so far stands; the search stopped after it
                    writeln!(out, "{text}.").map_err(io)?;
                    return Err(e.to_string());
                }
            }
        }
    }

    /// One-line description of the session, shown at startup.
    pub fn banner(&self) -> String {
        let mut s = String::from("cologic");
        if let Some(p) = &self.source {
            let _ = write!(s, " — {}", p.display());
        }
        let _ = write!(s, " (mode {}; :help for commands)", self.cfg.engine.mode);
        s
    }
}

fn read_line(input: &mut impl BufRead) -> io::Result<Option<String>> {
    let mut line = String::new();
    if input.read_line(&mut line)? == 0 {
        return Ok(None);
    }
    Ok(Some(line))
}
