//! Activity-based bound tightening and reduction of a node to a plain LP.

use std::collections::VecDeque;

use num_traits::{One, Signed, Zero};

use super::model::{MilpModel, Sense, VarKind};
use super::scalar::Scalar;
use super::simplex::{LinearProgram, LpRow};
use crate::rational::Rational;

#[derive(Debug, Clone, PartialEq)]
pub struct Bounds {
    pub lower: Vec<Rational>,
    pub upper: Vec<Option<Rational>>,
}

impl Bounds {
    pub fn of(model: &MilpModel) -> Self {
        Self {
            lower: model.variables.iter().map(|v| v.lower.clone()).collect(),
            upper: model.variables.iter().map(|v| v.upper.clone()).collect(),
        }
    }

    pub fn is_fixed(&self, j: usize) -> bool {
        self.upper[j].as_ref() == Some(&self.lower[j])
    }

    pub fn fix(&mut self, j: usize, value: Rational) {
        self.lower[j] = value.clone();
        self.upper[j] = Some(value);
    }
}

/// Reverse index from variables to the rows that mention them.
pub fn var_rows(model: &MilpModel) -> Vec<Vec<usize>> {
    let mut idx = vec![Vec::new(); model.num_vars()];
    for (r, c) in model.constraints.iter().enumerate() {
        for (v, _) in &c.terms {
            idx[*v].push(r);
        }
    }
    idx
}

/// Minimum of `sum a_j x_j` over the box: finite part and count of infinite terms.
fn min_activity(terms: &[(usize, Rational)], b: &Bounds, negate: bool) -> (Rational, usize) {
    let mut finite = Rational::zero();
    let mut inf = 0;
    for (j, a) in terms {
        let a = if negate { -a } else { a.clone() };
        if a.is_positive() {
            finite += &a * &b.lower[*j];
        } else {
            match &b.upper[*j] {
                Some(u) => finite += &a * u,
                None => inf += 1,
            }
        }
    }
    (finite, inf)
}

/// Continuous bounds are relaxed outward onto this grid so that repeated
/// tightening cannot grow the rationals without limit.
const GRID: i64 = 1 << 30;

fn snap_up(v: &Rational) -> Rational {
    let g = Rational::from_integer(GRID.into());
    (v * &g).ceil() / g
}

fn snap_down(v: &Rational) -> Rational {
    let g = Rational::from_integer(GRID.into());
    (v * &g).floor() / g
}

/// Continuous tightenings smaller than this fraction of the old bound are skipped.
fn significant(old: &Rational, new: &Rational) -> bool {
    let gap = (old - new).abs();
    let scale = old.abs().max(Rational::one());
    gap * Rational::from_integer(1_000_000.into()) >= scale
}

/// Tightens `bounds` until no row implies anything new or the work cap is hit.
/// Returns `false` when the node is proven infeasible.
pub fn propagate(model: &MilpModel, rows_of: &[Vec<usize>], bounds: &mut Bounds, max_rounds: usize) -> bool {
    let nrows = model.constraints.len();
    let mut queued = vec![true; nrows];
    let mut queue: VecDeque<usize> = (0..nrows).collect();
    let mut budget = max_rounds.saturating_mul(nrows.max(1));
    while let Some(r) = queue.pop_front() {
        queued[r] = false;
        if budget == 0 {
            break;
        }
        budget -= 1;
        let c = &model.constraints[r];
        // Treat each row as one or two `<=` rows.
        let sides: &[bool] = match c.sense {
            Sense::Le => &[false],
            Sense::Ge => &[true],
            Sense::Eq => &[false, true],
        };
        for &negate in sides {
            let rhs = if negate { -&c.rhs } else { c.rhs.clone() };
            let (finite, inf) = min_activity(&c.terms, bounds, negate);
            if inf == 0 && finite > rhs {
                return false;
            }
            if inf > 1 {
                continue;
            }
            for (j, a) in &c.terms {
                let j = *j;
                let a = if negate { -a } else { a.clone() };
                let own = if a.is_positive() { Some(&a * &bounds.lower[j]) } else { bounds.upper[j].as_ref().map(|u| &a * u) };
                let residual = match (inf, own) {
                    (0, Some(own)) => &finite - own,
                    (1, None) => finite.clone(),
                    _ => continue,
                };
                let limit = (&rhs - residual) / &a;
                let binary = model.variables[j].kind == VarKind::Binary;
                let changed = if a.is_positive() {
                    let limit = if binary { limit.floor() } else { snap_up(&limit) };
                    let useful = bounds.upper[j].as_ref().map_or(true, |u| &limit < u && (binary || significant(u, &limit)));
                    if useful {
                        bounds.upper[j] = Some(limit);
                        true
                    } else {
                        false
                    }
                } else {
                    let limit = if binary { limit.ceil() } else { snap_down(&limit) };
                    if limit > bounds.lower[j] && (binary || significant(&bounds.lower[j], &limit)) {
                        bounds.lower[j] = limit;
                        true
                    } else {
                        false
                    }
                };
                if changed {
                    if bounds.upper[j].as_ref().map_or(false, |u| u < &bounds.lower[j]) {
                        return false;
                    }
                    for &r2 in &rows_of[j] {
                        if r2 != r && !queued[r2] {
                            queued[r2] = true;
                            queue.push_back(r2);
                        }
                    }
                }
            }
        }
    }
    true
}

/// The LP over the unfixed variables of a node; rows that the bounds already
/// guarantee are dropped.
#[derive(Debug, Clone)]
pub struct ReducedLp<T> {
    pub lp: LinearProgram<T>,
    /// Model variable behind each LP column.
    pub columns: Vec<usize>,
    pub objective_offset: Rational,
}

impl<T: Scalar> ReducedLp<T> {
    /// Full assignment from an LP point.
    pub fn expand(&self, bounds: &Bounds, x: &[T]) -> Vec<Rational> {
        let mut values = bounds.lower.clone();
        for (k, &j) in self.columns.iter().enumerate() {
            values[j] = x[k].to_rational();
        }
        values
    }
}

/// Returns `None` if a row without free variables is violated.
pub fn reduce<T: Scalar>(model: &MilpModel, bounds: &Bounds) -> Option<ReducedLp<T>> {
    let n = model.num_vars();
    let mut col_of = vec![usize::MAX; n];
    let mut columns = Vec::new();
    for j in 0..n {
        if !bounds.is_fixed(j) {
            col_of[j] = columns.len();
            columns.push(j);
        }
    }
    let mut rows = Vec::new();
    for c in &model.constraints {
        let mut rhs = c.rhs.clone();
        let mut coeffs = Vec::new();
        for (j, a) in &c.terms {
            if col_of[*j] == usize::MAX {
                rhs -= a * &bounds.lower[*j];
            } else {
                coeffs.push((*j, a.clone()));
            }
        }
        let redundant = |negate: bool| {
            // max of the row (or of its negation) over the box is within rhs
            let (neg_min, inf) = min_activity(&coeffs, bounds, !negate);
            let r = if negate { -&rhs } else { rhs.clone() };
            inf == 0 && -neg_min <= r
        };
        let keep = match c.sense {
            Sense::Le => !redundant(false),
            Sense::Ge => !redundant(true),
            Sense::Eq => !(redundant(false) && redundant(true)),
        };
        if coeffs.is_empty() {
            let ok = match c.sense {
                Sense::Le => !rhs.is_negative(),
                Sense::Ge => !rhs.is_positive(),
                Sense::Eq => rhs.is_zero(),
            };
            if !ok {
                return None;
            }
            continue;
        }
        if keep {
            rows.push(LpRow {
                coeffs: coeffs.iter().map(|(j, a)| (col_of[*j], T::from_rational(a))).collect(),
                sense: c.sense,
                rhs: T::from_rational(&rhs),
            });
        }
    }
    let mut objective = vec![T::zero_value(); columns.len()];
    let mut offset = Rational::zero();
    for (j, cj) in &model.objective {
        if col_of[*j] == usize::MAX {
            offset += cj * &bounds.lower[*j];
        } else {
            objective[col_of[*j]] = T::from_rational(cj);
        }
    }
    let lp = LinearProgram {
        lower: columns.iter().map(|&j| T::from_rational(&bounds.lower[j])).collect(),
        upper: columns.iter().map(|&j| bounds.upper[j].as_ref().map(T::from_rational)).collect(),
        rows,
        objective,
    };
    Some(ReducedLp { lp, columns, objective_offset: offset })
}
