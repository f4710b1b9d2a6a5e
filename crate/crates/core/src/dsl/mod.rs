//! Expression language: parser, evaluator, canonical printer, and session files.

pub mod eval;
pub mod parse;
pub mod session;

pub use eval::{Env, Kind, Value};
pub use parse::{parse, Ast, Bounds};
pub use session::{load_example, Session, SessionConfig};
