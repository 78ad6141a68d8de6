//! Step-1 iteration trace as CSV.

use std::io::Write;

use pcenter_core::algorithm::AlgorithmTrace;

pub const TRACE_HEADER: [&str; 6] = ["iteration", "lb", "ub", "N", "M", "lp_value"];

pub fn write_trace<W: Write>(trace: &AlgorithmTrace, out: W) -> csv::Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(TRACE_HEADER)?;
    for it in &trace.iterations {
        w.write_record([
            it.iteration.to_string(),
            it.lb.to_string(),
            it.ub.to_string(),
            it.n_clients.to_string(),
            it.n_facilities.to_string(),
            it.lp_value.to_string(),
        ])?;
    }
    w.flush()?;
    Ok(())
}
