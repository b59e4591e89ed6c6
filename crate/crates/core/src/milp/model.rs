//! Generic mixed-integer linear program: `minimize c x` subject to linear rows
//! and variable bounds, with a subset of the variables restricted to {0, 1}.

use std::collections::HashMap;

use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rational::{display, Rational};

pub type VarId = usize;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum VarKind {
    Continuous,
    Binary,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Variable {
    pub name: String,
    pub lower: Rational,
    pub upper: Option<Rational>,
    pub kind: VarKind,
    /// Branching priority; smaller values are branched on first.
    pub priority: u32,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Sense {
    Le,
    Ge,
    Eq,
}

impl Sense {
    pub fn symbol(self) -> &'static str {
        match self {
            Sense::Le => "<=",
            Sense::Ge => ">=",
            Sense::Eq => "=",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Constraint {
    pub name: String,
    pub terms: Vec<(VarId, Rational)>,
    pub sense: Sense,
    pub rhs: Rational,
}

impl Constraint {
    pub fn activity(&self, values: &[Rational]) -> Rational {
        self.terms.iter().fold(Rational::zero(), |acc, (v, a)| acc + a * &values[*v])
    }

    /// Amount by which `values` violates the row (zero when satisfied).
    pub fn violation(&self, values: &[Rational]) -> Rational {
        let act = self.activity(values);
        let zero = Rational::zero();
        match self.sense {
            Sense::Le => (act - &self.rhs).max(zero),
            Sense::Ge => (&self.rhs - act).max(zero),
            Sense::Eq => (act - &self.rhs).abs(),
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct MilpModel {
    pub variables: Vec<Variable>,
    pub constraints: Vec<Constraint>,
    pub objective: Vec<(VarId, Rational)>,
    /// When set, every node's best integer-feasible objective is a multiple of
    /// this step, which lets branch-and-bound prune nodes that cannot improve
    /// the incumbent by a full step.
    pub objective_step: Option<Rational>,
    names: HashMap<String, VarId>,
}

impl MilpModel {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn num_vars(&self) -> usize {
        self.variables.len()
    }

    pub fn add_var(&mut self, name: impl Into<String>, lower: Rational, upper: Option<Rational>, kind: VarKind) -> VarId {
        let name = name.into();
        let id = self.variables.len();
        let (lower, upper) = match kind {
            VarKind::Binary => (Rational::zero(), Some(Rational::one())),
            VarKind::Continuous => (lower, upper),
        };
        assert!(self.names.insert(name.clone(), id).is_none(), "duplicate variable name {name}");
        self.variables.push(Variable { name, lower, upper, kind, priority: u32::MAX });
        id
    }

    pub fn add_binary(&mut self, name: impl Into<String>, priority: u32) -> VarId {
        let id = self.add_var(name, Rational::zero(), Some(Rational::one()), VarKind::Binary);
        self.variables[id].priority = priority;
        id
    }

    pub fn add_continuous(&mut self, name: impl Into<String>, lower: Rational, upper: Option<Rational>) -> VarId {
        self.add_var(name, lower, upper, VarKind::Continuous)
    }

    /// Adds a row; repeated variables are merged and zero coefficients dropped.
    pub fn add_constraint(&mut self, name: impl Into<String>, terms: Vec<(VarId, Rational)>, sense: Sense, rhs: Rational) {
        let mut merged: Vec<(VarId, Rational)> = Vec::with_capacity(terms.len());
        for (v, a) in terms {
            assert!(v < self.variables.len(), "constraint references undeclared variable {v}");
            match merged.iter_mut().find(|(w, _)| *w == v) {
                Some((_, b)) => *b += a,
                None => merged.push((v, a)),
            }
        }
        merged.retain(|(_, a)| !a.is_zero());
        self.constraints.push(Constraint { name: name.into(), terms: merged, sense, rhs });
    }

    pub fn set_objective(&mut self, terms: Vec<(VarId, Rational)>) {
        self.objective = terms.into_iter().filter(|(_, a)| !a.is_zero()).collect();
    }

    pub fn var_id(&self, name: &str) -> Option<VarId> {
        self.names.get(name).copied()
    }

    pub fn objective_value(&self, values: &[Rational]) -> Rational {
        self.objective.iter().fold(Rational::zero(), |acc, (v, c)| acc + c * &values[*v])
    }

    pub fn binaries(&self) -> impl Iterator<Item = VarId> + '_ {
        self.variables.iter().enumerate().filter(|(_, v)| v.kind == VarKind::Binary).map(|(i, _)| i)
    }

    /// Largest bound or row violation of `values`, with the offending name.
    pub fn max_violation(&self, values: &[Rational]) -> Option<(String, Rational)> {
        let mut worst: Option<(String, Rational)> = None;
        let mut consider = |name: &str, v: Rational| {
            if v.is_positive() && worst.as_ref().map_or(true, |(_, w)| &v > w) {
                worst = Some((name.to_string(), v));
            }
        };
        for (var, x) in self.variables.iter().zip(values) {
            consider(&var.name, (&var.lower - x).max(Rational::zero()));
            if let Some(u) = &var.upper {
                consider(&var.name, (x - u).max(Rational::zero()));
            }
            if var.kind == VarKind::Binary && !x.is_zero() && !x.is_one() {
                let frac = (x - x.floor()).min(x.ceil() - x);
                consider(&var.name, frac);
            }
        }
        for c in &self.constraints {
            consider(&c.name, c.violation(values));
        }
        worst
    }

    /// Exact feasibility check.
    pub fn check(&self, values: &[Rational]) -> Result<()> {
        if values.len() != self.num_vars() {
            return Err(Error::Solution(format!("{} values for {} variables", values.len(), self.num_vars())));
        }
        match self.max_violation(values) {
            None => Ok(()),
            Some((name, v)) => Err(Error::ConstraintViolated { name, violation: display(&v) }),
        }
    }
}
