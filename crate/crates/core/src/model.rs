//! Solver-agnostic MILP models.
//!
//! Every model minimizes a linear objective plus a constant offset. Two-sided
//! ranges are stored as two separate rows, which is also how they are
//! counted in [`ModelStats`]. Variable bounds are not rows.

use alloc::collections::BTreeSet;
use alloc::string::String;
use alloc::vec::Vec;

use crate::formulations::Formulation;
use crate::instance::Distance;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct VarId(pub usize);

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum VarKind {
    Binary,
    Integer,
    Continuous,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Variable {
    pub name: String,
    pub kind: VarKind,
    pub lower: f64,
    /// `f64::INFINITY` when unbounded above.
    pub upper: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RowSense {
    Le,
    Ge,
    Eq,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Constraint {
    pub label: String,
    pub terms: Vec<(VarId, f64)>,
    pub sense: RowSense,
    pub rhs: f64,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct Objective {
    pub terms: Vec<(VarId, f64)>,
    pub offset: f64,
}

/// Dimensions and ladder range of the instance a model was built from.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ModelMeta {
    pub n_clients: usize,
    pub n_facilities: usize,
    pub p: usize,
    pub ladder_min: Distance,
    pub ladder_max: Distance,
    pub k: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ModelError {
    #[error("variable `{0}` declared twice")]
    DuplicateVariable(String),
    #[error("row `{row}` references undeclared variable #{index}")]
    UndeclaredVariable { row: String, index: usize },
    #[error("binary variable `{0}` must have bounds [0, 1]")]
    BinaryBounds(String),
    #[error("variable `{0}` has lower bound above upper bound")]
    EmptyDomain(String),
}

#[derive(Debug, Clone, PartialEq)]
pub struct Model {
    pub formulation: Formulation,
    pub variables: Vec<Variable>,
    pub constraints: Vec<Constraint>,
    pub objective: Objective,
    pub meta: ModelMeta,
}

impl Model {
    pub fn new(formulation: Formulation, meta: ModelMeta) -> Self {
        Model { formulation, variables: Vec::new(), constraints: Vec::new(), objective: Objective::default(), meta }
    }

    pub fn add_var(&mut self, name: String, kind: VarKind, lower: f64, upper: f64) -> VarId {
        self.variables.push(Variable { name, kind, lower, upper });
        VarId(self.variables.len() - 1)
    }

    pub fn add_binary(&mut self, name: String) -> VarId {
        self.add_var(name, VarKind::Binary, 0.0, 1.0)
    }

    pub fn add_row(&mut self, label: String, terms: Vec<(VarId, f64)>, sense: RowSense, rhs: f64) {
        self.constraints.push(Constraint { label, terms, sense, rhs });
    }

    pub fn var(&self, id: VarId) -> &Variable {
        &self.variables[id.0]
    }

    pub fn stats(&self) -> ModelStats {
        model_stats(self)
    }

    /// Same model with every integrality requirement dropped. Bounds stay.
    pub fn relaxed(&self) -> Model {
        let mut m = self.clone();
        for v in &mut m.variables {
            v.kind = VarKind::Continuous;
        }
        m
    }

    pub fn is_relaxation(&self) -> bool {
        self.variables.iter().all(|v| v.kind == VarKind::Continuous)
    }

    /// Checks the structural invariants: unique names, declared references,
    /// binary bounds `[0, 1]`, nonempty domains.
    pub fn validate(&self) -> Result<(), ModelError> {
        let mut seen = BTreeSet::new();
        for v in &self.variables {
            if !seen.insert(v.name.as_str()) {
                return Err(ModelError::DuplicateVariable(v.name.clone()));
            }
            if v.kind == VarKind::Binary && (v.lower != 0.0 || v.upper != 1.0) {
                return Err(ModelError::BinaryBounds(v.name.clone()));
            }
            if v.lower > v.upper {
                return Err(ModelError::EmptyDomain(v.name.clone()));
            }
        }
        let n = self.variables.len();
        let rows = self.constraints.iter().map(|c| (c.label.as_str(), &c.terms));
        for (label, terms) in rows.chain(core::iter::once(("objective", &self.objective.terms))) {
            if let Some(&(VarId(index), _)) = terms.iter().find(|(id, _)| id.0 >= n) {
                return Err(ModelError::UndeclaredVariable { row: label.into(), index });
            }
        }
        Ok(())
    }
}

/// Size of a model: variables, constraint rows, nonzero coefficients.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct ModelStats {
    pub n_variables: usize,
    pub n_constraints: usize,
    pub n_nonzeros: usize,
}

pub fn model_stats(m: &Model) -> ModelStats {
    ModelStats {
        n_variables: m.variables.len(),
        n_constraints: m.constraints.len(),
        n_nonzeros: m.constraints.iter().map(|c| c.terms.iter().filter(|(_, a)| *a != 0.0).count()).sum(),
    }
}
