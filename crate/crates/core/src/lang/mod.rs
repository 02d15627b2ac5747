//! Surface syntax, canonical rendering, the tagged wire format and problem files.

mod parse;
mod problem;
mod render;
mod wire;

pub use parse::{parse, parse_in, standard_functions, ParseError, Scope};
pub use problem::{
    load_problem, parse_problem, Bases, Form, GeneratorSpec, InvariantSpec, ParamSpec, Problem, ProblemError,
    ProblemFile,
};
pub use render::render;
pub use wire::{deserialize, from_json, serialize, to_json, MalformedDocument};
