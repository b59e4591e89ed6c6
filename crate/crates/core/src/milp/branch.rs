//! Depth-first branch-and-bound over the binary variables.

use std::time::{Duration, Instant};

use num_traits::{One, Zero};
use serde::Serialize;

use super::model::{MilpModel, VarKind};
use super::propagate::{propagate, reduce, var_rows, Bounds};
use super::scalar::{Scalar, FLOAT_TOL};
use super::simplex::{solve_lp, LpStatus, PivotRule, SimplexOptions};
use crate::error::{Error, Result};
use crate::rational::{to_f64, Rational};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Arithmetic {
    /// Exact rational simplex at every node.
    Exact,
    /// Floating-point simplex; incumbents are recomputed exactly before being accepted.
    Float,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SolveOptions {
    pub arithmetic: Arithmetic,
    pub pivot_rule: PivotRule,
    pub max_nodes: Option<usize>,
    pub time_limit: Option<Duration>,
    pub max_lp_iterations: usize,
    pub propagation_rounds: usize,
}

impl Default for SolveOptions {
    fn default() -> Self {
        Self {
            arithmetic: Arithmetic::Exact,
            pivot_rule: PivotRule::Dantzig,
            max_nodes: None,
            time_limit: None,
            max_lp_iterations: 1_000_000,
            propagation_rounds: 20,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum MilpStatus {
    /// Proven optimal.
    Optimal,
    /// Exactly feasible, optimality not established (imported solutions).
    Feasible,
    Infeasible,
    /// A node, time or iteration limit stopped the search; see `values` for an incumbent.
    Limit,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize)]
pub struct SolveStats {
    pub nodes: usize,
    pub lp_iterations: usize,
    pub max_depth: usize,
    pub elapsed_ms: u128,
}

#[derive(Debug, Clone, PartialEq)]
pub struct MilpSolution {
    pub status: MilpStatus,
    pub values: Option<Vec<Rational>>,
    pub objective: Option<Rational>,
    pub stats: SolveStats,
}

struct Node {
    bounds: Bounds,
    depth: usize,
}

enum NodeOutcome {
    Pruned,
    Integral(Vec<Rational>, Rational),
    Branch(usize, Rational),
    IterationLimit,
}

pub fn solve_milp(model: &MilpModel, opts: &SolveOptions) -> Result<MilpSolution> {
    let start = Instant::now();
    let deadline = opts.time_limit.map(|t| start + t);
    let rows_of = var_rows(model);
    let mut stats = SolveStats::default();
    let mut incumbent: Option<(Vec<Rational>, Rational)> = None;
    let mut stack = vec![Node { bounds: Bounds::of(model), depth: 0 }];
    let mut hit_limit = false;

    while let Some(node) = stack.pop() {
        if opts.max_nodes.map_or(false, |cap| stats.nodes >= cap) || opts.time_limit.map_or(false, |t| start.elapsed() >= t) {
            hit_limit = true;
            break;
        }
        stats.nodes += 1;
        stats.max_depth = stats.max_depth.max(node.depth);
        let mut bounds = node.bounds;
        if !propagate(model, &rows_of, &mut bounds, opts.propagation_rounds) {
            continue;
        }
        let cutoff = incumbent.as_ref().map(|(_, obj)| match &model.objective_step {
            Some(step) => obj - step,
            None => obj.clone(),
        });
        let outcome = match opts.arithmetic {
            Arithmetic::Exact => evaluate::<Rational>(model, &bounds, cutoff.as_ref(), opts, deadline, &mut stats)?,
            Arithmetic::Float => evaluate::<f64>(model, &bounds, cutoff.as_ref(), opts, deadline, &mut stats)?,
        };
        match outcome {
            NodeOutcome::Pruned => {}
            NodeOutcome::IterationLimit => {
                hit_limit = true;
                break;
            }
            NodeOutcome::Integral(values, obj) => {
                if incumbent.as_ref().map_or(true, |(_, best)| &obj < best) {
                    incumbent = Some((values, obj));
                }
            }
            NodeOutcome::Branch(j, value) => {
                let mut down = bounds.clone();
                down.fix(j, Rational::zero());
                let mut up = bounds;
                up.fix(j, Rational::one());
                let depth = node.depth + 1;
                let half = Rational::new(1.into(), 2.into());
                // The child closer to the LP value is explored first.
                if value >= half {
                    stack.push(Node { bounds: down, depth });
                    stack.push(Node { bounds: up, depth });
                } else {
                    stack.push(Node { bounds: up, depth });
                    stack.push(Node { bounds: down, depth });
                }
            }
        }
    }

    stats.elapsed_ms = start.elapsed().as_millis();
    let status = match (&incumbent, hit_limit) {
        (_, true) => MilpStatus::Limit,
        (Some(_), false) => MilpStatus::Optimal,
        (None, false) => MilpStatus::Infeasible,
    };
    let (values, objective) = match incumbent {
        Some((v, o)) => (Some(v), Some(o)),
        None => (None, None),
    };
    Ok(MilpSolution { status, values, objective, stats })
}

fn evaluate<T: Scalar>(
    model: &MilpModel,
    bounds: &Bounds,
    cutoff: Option<&Rational>,
    opts: &SolveOptions,
    deadline: Option<Instant>,
    stats: &mut SolveStats,
) -> Result<NodeOutcome> {
    let Some(reduced) = reduce::<T>(model, bounds) else { return Ok(NodeOutcome::Pruned) };
    let simplex = SimplexOptions { pivot_rule: opts.pivot_rule, max_iterations: opts.max_lp_iterations, deadline };
    let res = solve_lp(&reduced.lp, &simplex);
    stats.lp_iterations += res.iterations;
    match res.status {
        LpStatus::Infeasible => return Ok(NodeOutcome::Pruned),
        LpStatus::IterationLimit => return Ok(NodeOutcome::IterationLimit),
        LpStatus::Unbounded => return Err(Error::Solver("LP relaxation is unbounded".into())),
        LpStatus::Optimal => {}
    }
    let bound = res.objective.to_rational() + &reduced.objective_offset;
    if let Some(cut) = cutoff {
        let prune = if T::EXACT { &bound > cut } else { to_f64(&bound) > to_f64(cut) + FLOAT_TOL };
        if prune {
            return Ok(NodeOutcome::Pruned);
        }
    }
    let values = reduced.expand(bounds, &res.x);

    let mut choice: Option<(u32, Rational, usize)> = None;
    let half = Rational::new(1.into(), 2.into());
    for (k, &j) in reduced.columns.iter().enumerate() {
        let var = &model.variables[j];
        if var.kind != VarKind::Binary {
            continue;
        }
        let x = &res.x[k];
        let integral = x.eq_zero() || x.eq_one();
        if integral {
            continue;
        }
        let v = &values[j];
        let dist = if v > &half { v - &half } else { &half - v };
        let better = match &choice {
            None => true,
            Some((p, d, _)) => var.priority < *p || (var.priority == *p && &dist < d),
        };
        if better {
            choice = Some((var.priority, dist, j));
        }
    }
    if let Some((_, _, j)) = choice {
        return Ok(NodeOutcome::Branch(j, values[j].clone()));
    }

    if T::EXACT {
        let obj = model.objective_value(&values);
        return Ok(NodeOutcome::Integral(values, obj));
    }
    // Float incumbents are rebuilt exactly with the binaries fixed.
    let binaries: Vec<(usize, Rational)> =
        model.binaries().map(|j| (j, if to_f64(&values[j]) > 0.5 { Rational::one() } else { Rational::zero() })).collect();
    match complete(model, &binaries, opts, deadline)? {
        Completion::Limit => Ok(NodeOutcome::IterationLimit),
        Completion::Infeasible => Ok(NodeOutcome::Pruned),
        Completion::Solved(exact) => {
            let obj = model.objective_value(&exact);
            if cutoff.map_or(false, |c| &obj > c) {
                return Ok(NodeOutcome::Pruned);
            }
            Ok(NodeOutcome::Integral(exact, obj))
        }
    }
}

enum Completion {
    Solved(Vec<Rational>),
    Infeasible,
    Limit,
}

/// Fixes the given variables and solves the remaining LP exactly. Returns
/// `None` if the restricted problem is infeasible.
pub fn complete_exact(model: &MilpModel, fixed: &[(usize, Rational)], opts: &SolveOptions) -> Result<Option<Vec<Rational>>> {
    match complete(model, fixed, opts, None)? {
        Completion::Solved(values) => Ok(Some(values)),
        Completion::Infeasible => Ok(None),
        Completion::Limit => Err(Error::Solver("iteration limit in exact completion".into())),
    }
}

fn complete(model: &MilpModel, fixed: &[(usize, Rational)], opts: &SolveOptions, deadline: Option<Instant>) -> Result<Completion> {
    let mut bounds = Bounds::of(model);
    for (j, v) in fixed {
        bounds.fix(*j, v.clone());
    }
    let rows_of = var_rows(model);
    if !propagate(model, &rows_of, &mut bounds, opts.propagation_rounds) {
        return Ok(Completion::Infeasible);
    }
    let Some(reduced) = reduce::<Rational>(model, &bounds) else { return Ok(Completion::Infeasible) };
    let simplex = SimplexOptions { pivot_rule: opts.pivot_rule, max_iterations: opts.max_lp_iterations, deadline };
    let res = solve_lp(&reduced.lp, &simplex);
    match res.status {
        LpStatus::Optimal => {
            let values = reduced.expand(&bounds, &res.x);
            model.check(&values)?;
            Ok(Completion::Solved(values))
        }
        LpStatus::Infeasible => Ok(Completion::Infeasible),
        LpStatus::Unbounded => Err(Error::Solver("restricted LP is unbounded".into())),
        LpStatus::IterationLimit => Ok(Completion::Limit),
    }
}
