pub mod algebra;
pub mod cli;
pub mod degree_line;
pub mod error;
pub mod genfun;
pub mod maps;
pub mod patterns;
pub mod probe;
pub mod recurrence;
pub mod report;
pub mod surface;

pub use error::{Error, Result};
