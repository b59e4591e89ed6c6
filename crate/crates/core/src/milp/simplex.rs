//! Bounded-variable primal simplex on a dense tableau.
//!
//! Every structural variable needs a finite lower bound; upper bounds are
//! optional. Phase I minimizes the sum of artificial variables; when it ends
//! with a positive value, a Farkas certificate is read off the reduced costs.

use std::cmp::Ordering;
use std::time::Instant;

use rayon::prelude::*;

use super::model::Sense;
use super::scalar::Scalar;

#[derive(Debug, Clone, PartialEq)]
pub struct LpRow<T> {
    pub coeffs: Vec<(usize, T)>,
    pub sense: Sense,
    pub rhs: T,
}

/// `minimize objective . x` subject to `rows` and `lower <= x <= upper`.
#[derive(Debug, Clone, PartialEq)]
pub struct LinearProgram<T> {
    pub lower: Vec<T>,
    pub upper: Vec<Option<T>>,
    pub rows: Vec<LpRow<T>>,
    pub objective: Vec<T>,
}

impl<T: Scalar> LinearProgram<T> {
    pub fn num_vars(&self) -> usize {
        self.lower.len()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PivotRule {
    /// Smallest eligible index enters and leaves; never cycles.
    Bland,
    /// Most negative reduced cost enters; falls back to Bland's rule during
    /// runs of degenerate pivots.
    Dantzig,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SimplexOptions {
    pub pivot_rule: PivotRule,
    pub max_iterations: usize,
    /// Wall-clock instant after which the solve stops with `IterationLimit`.
    pub deadline: Option<Instant>,
}

impl Default for SimplexOptions {
    fn default() -> Self {
        Self { pivot_rule: PivotRule::Bland, max_iterations: 1_000_000, deadline: None }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LpStatus {
    Optimal,
    Infeasible,
    Unbounded,
    IterationLimit,
}

#[derive(Debug, Clone, PartialEq)]
pub struct LpResult<T> {
    pub status: LpStatus,
    /// Final primal point (optimal when `status` is `Optimal`).
    pub x: Vec<T>,
    pub objective: T,
    pub iterations: usize,
    /// Row multipliers `y` proving infeasibility; see [`certifies_infeasibility`].
    pub farkas: Option<Vec<T>>,
}

const DEGENERATE_RUN: usize = 50;

/// Tableau entries touched by a pivot above which elimination runs in parallel.
const PARALLEL_WORK: usize = 1 << 16;

struct Tableau<T> {
    rows: Vec<Vec<T>>,
    basis: Vec<usize>,
    lower: Vec<T>,
    upper: Vec<Option<T>>,
    at_upper: Vec<bool>,
    basic_row: Vec<Option<usize>>,
    x: Vec<T>,
    cost: Vec<T>,
    d: Vec<T>,
}

enum Step {
    Optimal,
    Unbounded,
    Limit,
}

impl<T: Scalar> Tableau<T> {
    fn ncols(&self) -> usize {
        self.x.len()
    }

    fn reset_costs(&mut self, cost: Vec<T>) {
        let mut d = cost.clone();
        for (i, row) in self.rows.iter().enumerate() {
            let cb = &cost[self.basis[i]];
            if cb.eq_zero() {
                continue;
            }
            for (j, a) in row.iter().enumerate() {
                if !a.eq_zero() {
                    d[j].sub_mul_assign(cb, a);
                }
            }
        }
        self.cost = cost;
        self.d = d;
    }

    fn objective(&self) -> T {
        self.cost.iter().zip(&self.x).fold(T::zero_value(), |acc, (c, x)| if c.eq_zero() { acc } else { acc.add(&c.mul(x)) })
    }

    fn eligible(&self, j: usize) -> bool {
        if self.basic_row[j].is_some() {
            return false;
        }
        if let Some(u) = &self.upper[j] {
            if u.cmp_tol(&self.lower[j]) != Ordering::Greater {
                return false;
            }
        }
        if self.at_upper[j] {
            self.d[j].is_pos()
        } else {
            self.d[j].is_neg()
        }
    }

    fn entering(&self, bland: bool) -> Option<usize> {
        if bland {
            return (0..self.ncols()).find(|&j| self.eligible(j));
        }
        let mut best: Option<(usize, T)> = None;
        for j in 0..self.ncols() {
            if !self.eligible(j) {
                continue;
            }
            let mag = if self.d[j].is_neg() { self.d[j].neg() } else { self.d[j].clone() };
            if best.as_ref().map_or(true, |(_, b)| mag.cmp_tol(b) == Ordering::Greater) {
                best = Some((j, mag));
            }
        }
        best.map(|(j, _)| j)
    }

    fn run(&mut self, opts: &SimplexOptions, iterations: &mut usize) -> Step {
        let mut degenerate = 0usize;
        loop {
            if *iterations >= opts.max_iterations || opts.deadline.map_or(false, |d| Instant::now() >= d) {
                return Step::Limit;
            }
            let bland = opts.pivot_rule == PivotRule::Bland || degenerate >= DEGENERATE_RUN;
            let Some(q) = self.entering(bland) else { return Step::Optimal };
            *iterations += 1;
            let increasing = !self.at_upper[q];

            // Ratio test: (step length, leaving row, leaving goes to upper).
            let mut best: Option<(T, Option<usize>, bool)> =
                self.upper[q].as_ref().map(|u| (u.sub(&self.lower[q]), None, false));
            for (i, row) in self.rows.iter().enumerate() {
                let a = &row[q];
                if a.eq_zero() {
                    continue;
                }
                let delta = if increasing { a.clone() } else { a.neg() };
                let b = self.basis[i];
                let (mut lim, to_upper) = if delta.is_pos() {
                    (self.x[b].sub(&self.lower[b]).div(&delta), false)
                } else {
                    match &self.upper[b] {
                        Some(u) => (u.sub(&self.x[b]).div(&delta.neg()), true),
                        None => continue,
                    }
                };
                if lim.is_neg() {
                    lim = T::zero_value();
                }
                let better = match &best {
                    None => true,
                    Some((t, row, _)) => match lim.cmp_tol(t) {
                        Ordering::Less => true,
                        Ordering::Greater => false,
                        Ordering::Equal => row.map_or(false, |r| b < self.basis[r]),
                    },
                };
                if better {
                    best = Some((lim, Some(i), to_upper));
                }
            }
            let Some((t, leave, to_upper)) = best else { return Step::Unbounded };

            if t.eq_zero() {
                degenerate += 1;
            } else {
                degenerate = 0;
                let signed = if increasing { t.clone() } else { t.neg() };
                self.x[q] = self.x[q].add(&signed);
                for (i, row) in self.rows.iter().enumerate() {
                    let a = &row[q];
                    if !a.eq_zero() {
                        let b = self.basis[i];
                        self.x[b].sub_mul_assign(&signed, a);
                    }
                }
            }

            match leave {
                None => {
                    self.at_upper[q] = increasing;
                    self.x[q] = if increasing { self.upper[q].clone().expect("flip needs an upper bound") } else { self.lower[q].clone() };
                }
                Some(r) => {
                    let out = self.basis[r];
                    self.x[out] = if to_upper { self.upper[out].clone().expect("bounded") } else { self.lower[out].clone() };
                    self.at_upper[out] = to_upper;
                    self.basic_row[out] = None;
                    self.basis[r] = q;
                    self.basic_row[q] = Some(r);
                    self.at_upper[q] = false;
                    self.pivot(r, q);
                }
            }
        }
    }

    fn pivot(&mut self, r: usize, q: usize) {
        let mut prow = std::mem::take(&mut self.rows[r]);
        let piv = prow[q].clone();
        if !piv.eq_one() {
            for v in prow.iter_mut() {
                if !v.eq_zero() {
                    *v = v.div(&piv);
                }
            }
        }
        prow[q] = T::one_value();
        let nz: Vec<usize> = (0..prow.len()).filter(|&j| !prow[j].eq_zero()).collect();
        let eliminate = |target: &mut Vec<T>| {
            let f = target[q].clone();
            if f.eq_zero() {
                target[q] = T::zero_value();
                return;
            }
            for &j in &nz {
                target[j].sub_mul_assign(&f, &prow[j]);
            }
            target[q] = T::zero_value();
        };
        // Rows are independent, so the elimination is split across the current
        // rayon pool when there is enough work; results do not depend on it.
        if rayon::current_num_threads() > 1 && self.rows.len() * nz.len() >= PARALLEL_WORK {
            self.rows.par_iter_mut().enumerate().filter(|(i, _)| *i != r).for_each(|(_, row)| eliminate(row));
        } else {
            for (i, row) in self.rows.iter_mut().enumerate() {
                if i != r {
                    eliminate(row);
                }
            }
        }
        eliminate(&mut self.d);
        self.rows[r] = prow;
    }
}

pub fn solve_lp<T: Scalar>(lp: &LinearProgram<T>, opts: &SimplexOptions) -> LpResult<T> {
    let n = lp.num_vars();
    let m = lp.rows.len();
    let infeasible_bounds = (0..n).any(|j| lp.upper[j].as_ref().map_or(false, |u| u.cmp_tol(&lp.lower[j]) == Ordering::Less));
    if infeasible_bounds {
        return LpResult { status: LpStatus::Infeasible, x: lp.lower.clone(), objective: T::zero_value(), iterations: 0, farkas: None };
    }

    // Residuals with every structural variable at its lower bound.
    let residual: Vec<T> = lp
        .rows
        .iter()
        .map(|row| row.coeffs.iter().fold(row.rhs.clone(), |acc, (j, a)| acc.sub(&a.mul(&lp.lower[*j]))))
        .collect();
    let slack_sign = |s: Sense| if s == Sense::Ge { T::one_value().neg() } else { T::one_value() };

    // Each row is scaled by `row_sign` so that its initial basic column has coefficient one.
    let mut needs_artificial = vec![false; m];
    let mut row_sign = vec![T::one_value(); m];
    for (i, row) in lp.rows.iter().enumerate() {
        let r = &residual[i];
        let slack_ok = match row.sense {
            Sense::Le => !r.is_neg(),
            Sense::Ge => !r.is_pos(),
            Sense::Eq => false,
        };
        if slack_ok {
            row_sign[i] = slack_sign(row.sense);
        } else {
            needs_artificial[i] = true;
            row_sign[i] = if r.is_neg() { T::one_value().neg() } else { T::one_value() };
        }
    }
    let art_count = needs_artificial.iter().filter(|&&b| b).count();
    let ncols = n + m + art_count;

    let mut lower = lp.lower.clone();
    let mut upper = lp.upper.clone();
    for row in &lp.rows {
        lower.push(T::zero_value());
        upper.push(if row.sense == Sense::Eq { Some(T::zero_value()) } else { None });
    }
    lower.extend((0..art_count).map(|_| T::zero_value()));
    upper.extend((0..art_count).map(|_| None));

    let mut x: Vec<T> = lower.clone();
    let mut rows = Vec::with_capacity(m);
    let mut basis = Vec::with_capacity(m);
    let mut basic_row = vec![None; ncols];
    let mut next_art = n + m;
    for (i, row) in lp.rows.iter().enumerate() {
        let mut t = vec![T::zero_value(); ncols];
        for (j, a) in &row.coeffs {
            t[*j] = t[*j].add(&a.mul(&row_sign[i]));
        }
        t[n + i] = slack_sign(row.sense).mul(&row_sign[i]);
        let value = residual[i].mul(&row_sign[i]);
        let b = if needs_artificial[i] {
            t[next_art] = T::one_value();
            next_art += 1;
            next_art - 1
        } else {
            n + i
        };
        x[b] = value;
        basic_row[b] = Some(i);
        basis.push(b);
        rows.push(t);
    }
    let initial_basis = basis.clone();

    let mut tab = Tableau { rows, basis, lower, upper, at_upper: vec![false; ncols], basic_row, x, cost: Vec::new(), d: Vec::new() };
    let mut iterations = 0;
    let finish = |tab: &Tableau<T>, status, iterations, farkas| LpResult {
        status,
        x: tab.x[..n].to_vec(),
        objective: lp.objective.iter().zip(&tab.x).fold(T::zero_value(), |acc, (c, x)| acc.add(&c.mul(x))),
        iterations,
        farkas,
    };

    if art_count > 0 {
        let phase1: Vec<T> = (0..ncols).map(|j| if j >= n + m { T::one_value() } else { T::zero_value() }).collect();
        tab.reset_costs(phase1);
        match tab.run(opts, &mut iterations) {
            Step::Limit => return finish(&tab, LpStatus::IterationLimit, iterations, None),
            Step::Unbounded => unreachable!("phase one is bounded below by zero"),
            Step::Optimal => {}
        }
        if tab.objective().is_pos() {
            let y = (0..m)
                .map(|i| {
                    let k = initial_basis[i];
                    tab.cost[k].sub(&tab.d[k]).mul(&row_sign[i])
                })
                .collect();
            return finish(&tab, LpStatus::Infeasible, iterations, Some(y));
        }
        for j in n + m..ncols {
            tab.upper[j] = Some(T::zero_value());
            tab.x[j] = T::zero_value();
        }
    }

    let mut phase2 = lp.objective.clone();
    phase2.resize(ncols, T::zero_value());
    tab.reset_costs(phase2);
    let status = match tab.run(opts, &mut iterations) {
        Step::Optimal => LpStatus::Optimal,
        Step::Unbounded => LpStatus::Unbounded,
        Step::Limit => LpStatus::IterationLimit,
    };
    finish(&tab, status, iterations, None)
}

/// Checks a Farkas certificate: with `h = y^T A`, no point of the bound box can
/// satisfy the rows when `y . b > max_box h . x` and every inequality
/// multiplier has the sign that keeps the slack contributions nonpositive.
pub fn certifies_infeasibility<T: Scalar>(lp: &LinearProgram<T>, y: &[T]) -> bool {
    if y.len() != lp.rows.len() {
        return false;
    }
    let mut h = vec![T::zero_value(); lp.num_vars()];
    let mut yb = T::zero_value();
    for (row, yi) in lp.rows.iter().zip(y) {
        let sign_ok = match row.sense {
            Sense::Le => !yi.is_pos(),
            Sense::Ge => !yi.is_neg(),
            Sense::Eq => true,
        };
        if !sign_ok {
            return false;
        }
        for (j, a) in &row.coeffs {
            h[*j] = h[*j].add(&yi.mul(a));
        }
        yb = yb.add(&yi.mul(&row.rhs));
    }
    let mut max = T::zero_value();
    for (j, hj) in h.iter().enumerate() {
        if hj.is_pos() {
            match &lp.upper[j] {
                Some(u) => max = max.add(&hj.mul(u)),
                None => return false,
            }
        } else if hj.is_neg() {
            max = max.add(&hj.mul(&lp.lower[j]));
        }
    }
    yb.cmp_tol(&max) == Ordering::Greater
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{int, Rational};

    fn row(coeffs: &[(usize, i64)], sense: Sense, rhs: i64) -> LpRow<Rational> {
        LpRow { coeffs: coeffs.iter().map(|&(j, a)| (j, int(a))).collect(), sense, rhs: int(rhs) }
    }

    #[test]
    fn small_lp() {
        // min -x - y  s.t. x + 2y <= 4, 3x + y <= 6, x, y >= 0  -> (8/5, 6/5)
        let lp = LinearProgram {
            lower: vec![int(0), int(0)],
            upper: vec![None, None],
            rows: vec![row(&[(0, 1), (1, 2)], Sense::Le, 4), row(&[(0, 3), (1, 1)], Sense::Le, 6)],
            objective: vec![int(-1), int(-1)],
        };
        let r = solve_lp(&lp, &SimplexOptions::default());
        assert_eq!(r.status, LpStatus::Optimal);
        assert_eq!(r.x, vec![Rational::new(8.into(), 5.into()), Rational::new(6.into(), 5.into())]);
        assert_eq!(r.objective, Rational::new((-14).into(), 5.into()));
    }

    #[test]
    fn infeasible_with_certificate() {
        let lp = LinearProgram {
            lower: vec![int(0), int(0)],
            upper: vec![Some(int(1)), Some(int(1))],
            rows: vec![row(&[(0, 1), (1, 1)], Sense::Ge, 3)],
            objective: vec![int(0), int(0)],
        };
        let r = solve_lp(&lp, &SimplexOptions::default());
        assert_eq!(r.status, LpStatus::Infeasible);
        assert!(certifies_infeasibility(&lp, r.farkas.as_ref().unwrap()));
    }

    #[test]
    fn unbounded() {
        let lp = LinearProgram {
            lower: vec![int(0)],
            upper: vec![None],
            rows: vec![row(&[(0, 1)], Sense::Ge, 1)],
            objective: vec![int(-1)],
        };
        assert_eq!(solve_lp(&lp, &SimplexOptions::default()).status, LpStatus::Unbounded);
    }

    #[test]
    fn equality_and_negative_rhs() {
        // x - y = -2, x + y <= 10, min x - 2y
        let lp = LinearProgram {
            lower: vec![int(0), int(0)],
            upper: vec![None, Some(int(5))],
            rows: vec![row(&[(0, 1), (1, -1)], Sense::Eq, -2), row(&[(0, 1), (1, 1)], Sense::Le, 10)],
            objective: vec![int(1), int(-2)],
        };
        let r = solve_lp(&lp, &SimplexOptions { pivot_rule: PivotRule::Dantzig, ..Default::default() });
        assert_eq!(r.status, LpStatus::Optimal);
        assert_eq!(r.x, vec![int(3), int(5)]);
    }
}
