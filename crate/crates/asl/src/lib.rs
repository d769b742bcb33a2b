//! Front end for `.asl` modules: parsing, rendering, and the batch driver
//! behind the `asl` binary.

pub mod cli;
mod json;
pub mod parser;

pub use cli::{check_source, obs_source, run, trace_source, Command, RunConfig, RunOutput};
pub use parser::{parse_atom, parse_evidence, parse_horn, parse_module, render_module, ParseError, SourceModule};
