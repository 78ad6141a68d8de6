//! Published reference values for the OR-Library `pmed` instances.
//!
//! - `sizes.csv`: sizes and LP bounds of pmed1-5 with bounds `[LB0, UB0]`.
//! - `optima.csv`: `N`, `p`, optimum, the `lb`/`ub` bounds used for the
//!   exact solves, and LP bounds rounded up to the ladder, for pmed1-40.
//! - `step_one.csv`: the same instances with the bounds after the LP-rounding
//!   phase.

use std::path::Path;
use std::sync::OnceLock;

use pcenter_core::instance::Distance;
use serde::Deserialize;

#[derive(Debug, Clone, PartialEq, Deserialize)]
pub struct SizeRow {
    pub instance: u32,
    pub lb0: Distance,
    pub ub0: Distance,
    pub vars_p1: usize,
    pub vars_p2: usize,
    pub vars_cp1: usize,
    pub vars_cp2: usize,
    pub rows_p1: usize,
    pub rows_p2: usize,
    pub rows_cp1: usize,
    pub rows_cp2: usize,
    pub lp_p1: f64,
    pub lp_p2: f64,
    pub lp_cp1: f64,
    pub lp_cp2: f64,
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
pub struct OptimumRow {
    pub instance: u32,
    pub n: usize,
    pub p: usize,
    pub opt: Distance,
    pub lb: Distance,
    pub ub: Distance,
    /// `None` where the published value is missing.
    pub lp_p1: Option<Distance>,
    pub lp_p2: Option<Distance>,
    pub lp_cp1: Option<Distance>,
    pub lp_cp2: Option<Distance>,
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
pub struct StepOneRow {
    pub instance: u32,
    pub n: usize,
    pub p: usize,
    pub opt: Distance,
    pub lb: Distance,
    pub ub: Distance,
    pub lb_step1: Distance,
    pub ub_step1: Distance,
}

fn load<T: for<'de> Deserialize<'de>>(text: &str) -> Vec<T> {
    csv::Reader::from_reader(text.as_bytes())
        .deserialize()
        .collect::<Result<_, _>>()
        .expect("bundled fixture is well formed")
}

pub fn sizes() -> &'static [SizeRow] {
    static ROWS: OnceLock<Vec<SizeRow>> = OnceLock::new();
    ROWS.get_or_init(|| load(include_str!("../fixtures/sizes.csv")))
}

pub fn optima() -> &'static [OptimumRow] {
    static ROWS: OnceLock<Vec<OptimumRow>> = OnceLock::new();
    ROWS.get_or_init(|| load(include_str!("../fixtures/optima.csv")))
}

pub fn step_one() -> &'static [StepOneRow] {
    static ROWS: OnceLock<Vec<StepOneRow>> = OnceLock::new();
    ROWS.get_or_init(|| load(include_str!("../fixtures/step_one.csv")))
}

pub fn optimum(instance: u32) -> Option<&'static OptimumRow> {
    optima().iter().find(|r| r.instance == instance)
}

/// The OR-Library number of a file named like `pmed12` or `pmed12.txt`.
pub fn orlib_number(path: &Path) -> Option<u32> {
    let stem = path.file_stem()?.to_str()?;
    stem.strip_prefix("pmed")?.parse().ok()
}

/// `(lb, ub)` used for the exact solves of the instance behind `path`.
pub fn fixture_bounds(path: &Path) -> Option<(Distance, Distance)> {
    let row = optimum(orlib_number(path)?)?;
    Some((row.lb, row.ub))
}
