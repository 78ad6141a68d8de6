//! LP file writer.
//!
//! Output sections, always in this order: `Minimize`, `Subject To`,
//! `Bounds`, `Generals`, `Binaries`, `End`. `Generals` and `Binaries` are
//! omitted when empty. Every variable gets an explicit bound line. Numbers are
//! printed with Rust's shortest round-trip formatting, so no precision is
//! lost. One constraint per line.
//!
//! A constant objective offset cannot be expressed portably; it is written
//! as a comment and added back by the solver adapter.

use std::fmt::Write as _;

use pcenter_core::model::{Model, RowSense, VarId, VarKind};

fn write_terms(out: &mut String, model: &Model, terms: &[(VarId, f64)]) {
    if terms.is_empty() {
        // keeps the line syntactically valid
        write!(out, " 0 {}", model.variables[0].name).unwrap();
        return;
    }
    for (idx, &(var, coef)) in terms.iter().enumerate() {
        let name = &model.var(var).name;
        let sign = if coef < 0.0 { "-" } else { "+" };
        if idx == 0 && coef >= 0.0 {
            write!(out, " {} {name}", coef).unwrap();
        } else {
            write!(out, " {sign} {} {name}", coef.abs()).unwrap();
        }
    }
}

fn write_names(out: &mut String, names: &[&str]) {
    for chunk in names.chunks(16) {
        out.push(' ');
        out.push_str(&chunk.join(" "));
        out.push('\n');
    }
}

/// Serializes `model` in LP format.
pub fn write_lp_file(model: &Model) -> String {
    let mut out = String::new();
    writeln!(out, "\\ formulation {}", model.formulation.id()).unwrap();
    if model.objective.offset != 0.0 {
        writeln!(out, "\\ objective offset {}", model.objective.offset).unwrap();
    }
    out.push_str("Minimize\n obj:");
    write_terms(&mut out, model, &model.objective.terms);
    out.push_str("\nSubject To\n");
    for row in &model.constraints {
        write!(out, " {}:", row.label).unwrap();
        write_terms(&mut out, model, &row.terms);
        let sense = match row.sense {
            RowSense::Le => "<=",
            RowSense::Ge => ">=",
            RowSense::Eq => "=",
        };
        writeln!(out, " {sense} {}", row.rhs).unwrap();
    }
    out.push_str("Bounds\n");
    for v in &model.variables {
        if v.upper.is_finite() {
            writeln!(out, " {} <= {} <= {}", v.lower, v.name, v.upper).unwrap();
        } else {
            writeln!(out, " {} >= {}", v.name, v.lower).unwrap();
        }
    }
    let of_kind = |kind: VarKind| -> Vec<&str> {
        model.variables.iter().filter(|v| v.kind == kind).map(|v| v.name.as_str()).collect()
    };
    let generals = of_kind(VarKind::Integer);
    if !generals.is_empty() {
        out.push_str("Generals\n");
        write_names(&mut out, &generals);
    }
    let binaries = of_kind(VarKind::Binary);
    if !binaries.is_empty() {
        out.push_str("Binaries\n");
        write_names(&mut out, &binaries);
    }
    out.push_str("End\n");
    out
}
