//! A logic-programming engine for programs with co-facts.
//!
//! Terms are finite trees; rational (cyclic) terms arise only through
//! variable bindings in a [`BindStore`]. Queries are resolved by co-SLD
//! resolution where a goal that recurs on its own branch is checked by
//! ordinary SLD resolution in the program extended with its co-facts. The
//! [`oracle`] module computes the corresponding declarative semantics on
//! Datalog programs by brute force.

pub mod builtin;
pub mod engine;
pub mod oracle;
pub mod parser;
pub mod print;
pub mod term;
pub mod unify;

pub use engine::{solve, Answer, EngineConfig, EngineError, Mode, Solver};
pub use parser::{parse_program, parse_program_str, parse_query, ParseError, SourceProgram};
pub use term::{Atom, Clause, Goal, Program, Query, Term, VarId};
pub use unify::{extract_answer, AnswerSet, BindStore, Clash};
