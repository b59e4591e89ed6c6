//! The random-weight rank trick in isolation: the fewest vectors, with
//! coefficients in `[eps, 1/eps]`, that reproduce a random positive
//! combination of all of them. For generic weights this count is the rank.

use num_traits::{One, Zero};

use super::model::sample_weights;
use crate::error::{Error, Result};
use crate::linalg::rank_of_rows;
use crate::milp::{solve_milp, MilpModel, MilpStatus, Sense, SolveOptions};
use crate::rational::{to_f64, Rational};

/// Support-minimization model with the same indicator bounds as the
/// stoichiometric family: `eps s'_j <= s_j <= s'_j / eps` and
/// `sum_j s_j v_j = sum_j weight_j v_j`.
pub fn support_model(vectors: &[Vec<Rational>], weights: &[Rational], eps: &Rational) -> Result<MilpModel> {
    if vectors.len() != weights.len() {
        return Err(Error::DimensionMismatch(format!("{} vectors, {} weights", vectors.len(), weights.len())));
    }
    let dim = vectors.first().map_or(0, Vec::len);
    if vectors.iter().any(|v| v.len() != dim) {
        return Err(Error::DimensionMismatch("vectors differ in length".into()));
    }
    let inv = eps.recip();
    let mut model = MilpModel::new();
    let mut pairs = Vec::with_capacity(vectors.len());
    for j in 0..vectors.len() {
        let s = model.add_continuous(format!("s_{}", j + 1), Rational::zero(), Some(inv.clone()));
        let sp = model.add_binary(format!("sp_{}", j + 1), 0);
        model.add_constraint(format!("upper_{}", j + 1), vec![(s, Rational::one()), (sp, -inv.clone())], Sense::Le, Rational::zero());
        model.add_constraint(format!("lower_{}", j + 1), vec![(s, -Rational::one()), (sp, eps.clone())], Sense::Le, Rational::zero());
        pairs.push((s, sp));
    }
    for k in 0..dim {
        let terms: Vec<_> = vectors.iter().zip(&pairs).filter(|(v, _)| !v[k].is_zero()).map(|(v, (s, _))| (*s, v[k].clone())).collect();
        let rhs: Rational = vectors.iter().zip(weights).map(|(v, w)| &v[k] * w).sum();
        model.add_constraint(format!("span_{}", k + 1), terms, Sense::Eq, rhs);
    }
    model.set_objective(pairs.iter().map(|(_, sp)| (*sp, Rational::one())).collect());
    model.objective_step = Some(Rational::one());
    Ok(model)
}

/// Minimal support count for the weights drawn from `seed`.
pub fn min_support_count(vectors: &[Vec<Rational>], eps: &Rational, seed: u64, opts: &SolveOptions) -> Result<usize> {
    let weights = sample_weights(vectors.len(), eps, seed);
    let model = support_model(vectors, &weights, eps)?;
    let sol = solve_milp(&model, opts)?;
    match (sol.status, sol.objective) {
        (MilpStatus::Optimal, Some(obj)) => Ok(to_f64(&obj).round() as usize),
        (status, _) => Err(Error::Solver(format!("support model ended with status {status:?}"))),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct RankTrickOutcome {
    pub rank: usize,
    /// Support count from the first sample.
    pub first_count: usize,
    /// Samples drawn until the count matched the rank.
    pub samples: usize,
}

/// Rank of `vectors` via the rank trick, resampling the weights (fresh seeds)
/// while the support count disagrees with the exact rank.
pub fn rank_by_support(vectors: &[Vec<Rational>], eps: &Rational, seed: u64, max_retries: usize, opts: &SolveOptions) -> Result<RankTrickOutcome> {
    let rank = rank_of_rows(vectors);
    let first_count = min_support_count(vectors, eps, seed, opts)?;
    let mut count = first_count;
    let mut samples = 1;
    while count != rank {
        if samples > max_retries {
            return Err(Error::Solver(format!("support count {count} differs from rank {rank} after {samples} samples")));
        }
        count = min_support_count(vectors, eps, seed.wrapping_add(samples as u64), opts)?;
        samples += 1;
    }
    Ok(RankTrickOutcome { rank, first_count, samples })
}
