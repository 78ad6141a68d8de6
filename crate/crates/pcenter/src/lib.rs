//! File formats, LP output, an external solver adapter and the command
//! line for the p-center toolkit in `pcenter-core`.

pub mod cli;
pub mod fixtures;
pub mod formats;
pub mod lp;
pub mod solver;
pub mod trace;

pub use formats::{load_instance, parse_matrix, parse_orlib, write_matrix, InstanceFormat, ParseError};
pub use lp::write_lp_file;
pub use solver::{Dialect, ExternalSolver, SolverConfig, SolverError};
