//! The realization MILP: decision variables and constraint families that
//! search for a dynamically equivalent or linearly conjugate network meeting
//! the Deficiency One Theorem (or the Boros condition).

use num_bigint::BigInt;
use num_traits::{One, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::Matrix;
use crate::milp::{MilpModel, Sense, VarId};
use crate::rational::{int, ratio, Rational};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Mode {
    DynamicalEquivalence,
    LinearConjugacy,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Theorem {
    Dot,
    Boros,
}

/// Upper bound used for the supplemental flows `w'`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SupplementalCap {
    /// `w'[i,j] <= C'[i]`
    Unit,
    /// `w'[i,j] <= C'[i] / eps`
    Scaled,
}

/// Denominator of the sampled `delta[i,j]`.
pub const DELTA_DENOMINATOR: i64 = 1_000_000;

#[derive(Debug, Clone, PartialEq)]
pub struct ModelConfig {
    pub eps: Rational,
    pub seed: u64,
    pub mode: Mode,
    pub theorem: Theorem,
    pub supplemental_cap: SupplementalCap,
    /// Explicit `delta[i,j]` values (row-major `n x n`, diagonal unused);
    /// sampled from `seed` when absent.
    pub deltas: Option<Vec<Rational>>,
}

impl Default for ModelConfig {
    fn default() -> Self {
        Self {
            eps: ratio(1, 10),
            seed: 0,
            mode: Mode::LinearConjugacy,
            theorem: Theorem::Dot,
            supplemental_cap: SupplementalCap::Unit,
            deltas: None,
        }
    }
}

/// Integer range `[lo, hi]` of numerators `k` with `k / 10^6` in `[sqrt(eps), 1/sqrt(eps)]`.
pub fn delta_numerator_range(eps: &Rational) -> (u64, u64) {
    let p = eps.numer().clone();
    let q = eps.denom().clone();
    let scale = BigInt::from(DELTA_DENOMINATOR) * BigInt::from(DELTA_DENOMINATOR);
    // smallest k with k^2 q >= p 10^12
    let target_lo = &p * &scale;
    let mut lo = (&target_lo / &q).sqrt();
    while &lo * &lo * &q < target_lo {
        lo += 1;
    }
    while lo > BigInt::zero() && (&lo - 1) * (&lo - 1) * &q >= target_lo {
        lo -= 1;
    }
    // largest k with k^2 p <= q 10^12
    let target_hi = &q * &scale;
    let mut hi = (&target_hi / &p).sqrt();
    while (&hi + 1) * (&hi + 1) * &p <= target_hi {
        hi += 1;
    }
    while &hi * &hi * &p > target_hi {
        hi -= 1;
    }
    let to_u64 = |v: &BigInt| u64::try_from(v).expect("delta range fits in 64 bits");
    (to_u64(&lo), to_u64(&hi))
}

/// `count` pairwise distinct weights drawn uniformly from the `10^-6` grid in
/// `[sqrt(eps), 1/sqrt(eps)]`.
pub fn sample_weights(count: usize, eps: &Rational, seed: u64) -> Vec<Rational> {
    let (lo, hi) = delta_numerator_range(eps);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut used = std::collections::HashSet::new();
    (0..count)
        .map(|_| {
            let k = loop {
                let k = rng.gen_range(lo..=hi);
                if used.insert(k) {
                    break k;
                }
            };
            Rational::new(BigInt::from(k), BigInt::from(DELTA_DENOMINATOR))
        })
        .collect()
}

/// Pairwise distinct `delta[i,j]` (see [`sample_weights`]) in row-major order
/// of `(i, j)`; the diagonal is zero.
pub fn sample_deltas(n: usize, eps: &Rational, seed: u64) -> Vec<Rational> {
    let mut draws = sample_weights(n * n.saturating_sub(1), eps, seed).into_iter();
    let mut out = vec![Rational::zero(); n * n];
    for i in 0..n {
        for j in 0..n {
            if i != j {
                out[i * n + j] = draws.next().expect("one draw per pair");
            }
        }
    }
    out
}

/// Branching priorities of the binary families.
pub mod priority {
    pub const C: u32 = 0;
    pub const LAMBDA: u32 = 1;
    pub const S_PRIME: u32 = 2;
    pub const GAMMA: u32 = 3;
}

/// Variable ids of every family; indices are 0-based here and 1-based in names.
#[derive(Debug, Clone, PartialEq)]
pub struct VarMap {
    pub m: usize,
    pub n: usize,
    pub slots: usize,
    pub d: Vec<VarId>,
    b: Vec<Option<VarId>>,
    lambda: Vec<VarId>,
    gamma: Vec<Option<VarId>>,
    s: Vec<Option<VarId>>,
    s_prime: Vec<Option<VarId>>,
    pub l: Vec<VarId>,
    w: Vec<Option<VarId>>,
    w_prime: Vec<Option<VarId>>,
    c: Vec<VarId>,
    pub c_prime: Vec<VarId>,
}

impl VarMap {
    pub fn b(&self, i: usize, j: usize) -> VarId {
        self.b[i * self.n + j].expect("b[i,i] does not exist")
    }
    pub fn lambda(&self, i: usize, t: usize) -> VarId {
        self.lambda[i * self.slots + t]
    }
    fn pair_slot(&self, i: usize, j: usize, t: usize) -> usize {
        (i * self.n + j) * self.slots + t
    }
    pub fn gamma(&self, i: usize, j: usize, t: usize) -> VarId {
        self.gamma[self.pair_slot(i, j, t)].expect("diagonal")
    }
    pub fn s(&self, i: usize, j: usize, t: usize) -> VarId {
        self.s[self.pair_slot(i, j, t)].expect("diagonal")
    }
    pub fn s_prime(&self, i: usize, j: usize, t: usize) -> VarId {
        self.s_prime[self.pair_slot(i, j, t)].expect("diagonal")
    }
    pub fn w(&self, i: usize, j: usize) -> VarId {
        self.w[i * self.n + j].expect("diagonal")
    }
    pub fn w_prime(&self, i: usize, j: usize) -> VarId {
        self.w_prime[i * self.n + j].expect("diagonal")
    }
    pub fn c(&self, i: usize, t: usize) -> VarId {
        self.c[i * self.slots + t]
    }
    fn pairs(&self) -> impl Iterator<Item = (usize, usize)> {
        let n = self.n;
        (0..n).flat_map(move |i| (0..n).filter(move |&j| j != i).map(move |j| (i, j)))
    }
}

/// A realization MILP together with the data needed to decode its solutions.
#[derive(Debug, Clone, PartialEq)]
pub struct RealizationModel {
    pub model: MilpModel,
    pub vars: VarMap,
    pub config: ModelConfig,
    pub deltas: Vec<Rational>,
    /// Kinetic dimension `s` of the original system.
    pub s: usize,
}

fn declare(model: &mut MilpModel, m: usize, n: usize, slots: usize, eps: &Rational) -> VarMap {
    let inv = eps.recip();
    let none_nn = vec![None; n * n];
    let none_nnt = vec![None; n * n * slots];
    let mut v = VarMap {
        m,
        n,
        slots,
        d: Vec::new(),
        b: none_nn.clone(),
        lambda: Vec::new(),
        gamma: none_nnt.clone(),
        s: none_nnt.clone(),
        s_prime: none_nnt,
        l: Vec::new(),
        w: none_nn.clone(),
        w_prime: none_nn,
        c: Vec::new(),
        c_prime: Vec::new(),
    };
    let zero = Rational::zero;
    // Dec1
    for i in 0..m {
        v.d.push(model.add_continuous(format!("d_{}", i + 1), eps + eps * eps, Some(inv.clone())));
    }
    for i in 0..n {
        for j in 0..n {
            if i != j {
                v.b[i * n + j] = Some(model.add_continuous(format!("b_{}_{}", i + 1, j + 1), zero(), Some(inv.clone())));
            }
        }
    }
    // Dec2
    for i in 0..n {
        for t in 0..slots {
            v.lambda.push(model.add_binary(format!("Lambda_{}_{}", i + 1, t + 1), priority::LAMBDA));
        }
    }
    for i in 0..n {
        for j in 0..n {
            if i == j {
                continue;
            }
            for t in 0..slots {
                let k = (i * n + j) * slots + t;
                let tag = format!("{}_{}_{}", i + 1, j + 1, t + 1);
                v.gamma[k] = Some(model.add_binary(format!("Gamma_{tag}"), priority::GAMMA));
                v.s[k] = Some(model.add_continuous(format!("S_{tag}"), zero(), None));
                v.s_prime[k] = Some(model.add_binary(format!("Sp_{tag}"), priority::S_PRIME));
            }
        }
    }
    for t in 0..slots {
        v.l.push(model.add_continuous(format!("L_{}", t + 1), zero(), Some(Rational::one())));
    }
    // Dec3
    for i in 0..n {
        for j in 0..n {
            if i != j {
                v.w[i * n + j] = Some(model.add_continuous(format!("w_{}_{}", i + 1, j + 1), zero(), None));
                v.w_prime[i * n + j] = Some(model.add_continuous(format!("wp_{}_{}", i + 1, j + 1), zero(), None));
            }
        }
    }
    for i in 0..n {
        for t in 0..slots {
            v.c.push(model.add_binary(format!("C_{}_{}", i + 1, t + 1), priority::C));
        }
    }
    for i in 0..n {
        v.c_prime.push(model.add_continuous(format!("Cp_{}", i + 1), zero(), Some(Rational::one())));
    }
    v
}

/// `Y A(B) = T^{-1} M`; row `(k, j)` reads
/// `sum_{i != j} (Y[k,i] - Y[k,j]) b[j,i] - M[k,j] d[k] = 0`.
pub fn add_lc(model: &mut MilpModel, vars: &VarMap, y: &Matrix, m: &Matrix, mode: Mode) {
    for k in 0..vars.m {
        for j in 0..vars.n {
            let mut terms = Vec::new();
            for i in (0..vars.n).filter(|&i| i != j) {
                terms.push((vars.b(j, i), y.get(k, i) - y.get(k, j)));
            }
            terms.push((vars.d[k], -m.get(k, j)));
            model.add_constraint(format!("LC_{}_{}", k + 1, j + 1), terms, Sense::Eq, Rational::zero());
        }
    }
    if mode == Mode::DynamicalEquivalence {
        for k in 0..vars.m {
            model.add_constraint(format!("DynEq_{}", k + 1), vec![(vars.d[k], Rational::one())], Sense::Eq, Rational::one());
        }
    }
}

pub fn add_linkage(model: &mut MilpModel, vars: &VarMap, eps: &Rational) {
    let inv = eps.recip();
    let one = Rational::one;
    for (i, j) in vars.pairs() {
        for t in 0..vars.slots {
            // b <= (1/eps)(Lambda_i - Lambda_j + 1)
            model.add_constraint(
                format!("Link1_{}_{}_{}", i + 1, j + 1, t + 1),
                vec![(vars.b(i, j), one()), (vars.lambda(i, t), -inv.clone()), (vars.lambda(j, t), inv.clone())],
                Sense::Le,
                inv.clone(),
            );
        }
    }
    for i in 0..vars.n {
        let terms = (0..vars.slots).map(|t| (vars.lambda(i, t), one())).collect();
        model.add_constraint(format!("Link2_{}", i + 1), terms, Sense::Eq, one());
    }
    for t in 0..vars.slots {
        let mut terms: Vec<_> = (0..vars.n).map(|i| (vars.lambda(i, t), one())).collect();
        terms.push((vars.l[t], -eps.clone()));
        model.add_constraint(format!("Link3_{}", t + 1), terms, Sense::Ge, Rational::zero());
        let mut terms: Vec<_> = (0..vars.n).map(|i| (vars.lambda(i, t), -one())).collect();
        terms.push((vars.l[t], inv.clone()));
        model.add_constraint(format!("Link4_{}", t + 1), terms, Sense::Ge, Rational::zero());
    }
    // sum_{j <= i} Lambda[j,t] >= sum_{l > t} Lambda[i,l]  for t <= i; the
    // last slot has an empty right-hand side and is skipped
    for i in 0..vars.n {
        for t in 0..(vars.slots - 1).min(i + 1) {
            let mut terms: Vec<_> = (0..=i).map(|j| (vars.lambda(j, t), one())).collect();
            terms.extend((t + 1..vars.slots).map(|l| (vars.lambda(i, l), -one())));
            model.add_constraint(format!("Link5_{}_{}", i + 1, t + 1), terms, Sense::Ge, Rational::zero());
        }
    }
}

pub fn add_stoic(model: &mut MilpModel, vars: &VarMap, y: &Matrix, eps: &Rational, deltas: &[Rational]) {
    let inv = eps.recip();
    let one = Rational::one;
    for (i, j) in vars.pairs() {
        for t in 0..vars.slots {
            let tag = format!("{}_{}_{}", i + 1, j + 1, t + 1);
            let (g, s, sp) = (vars.gamma(i, j, t), vars.s(i, j, t), vars.s_prime(i, j, t));
            let (li, lj) = (vars.lambda(i, t), vars.lambda(j, t));
            model.add_constraint(format!("Stoic1_{tag}"), vec![(sp, one()), (g, -one())], Sense::Le, Rational::zero());
            model.add_constraint(format!("Stoic2_{tag}"), vec![(s, one()), (sp, -inv.clone())], Sense::Le, Rational::zero());
            model.add_constraint(format!("Stoic3_{tag}"), vec![(s, -one()), (sp, eps.clone())], Sense::Le, Rational::zero());
            // Gamma <= 1 + eps (Lambda_i + Lambda_j - 2)
            model.add_constraint(
                format!("Stoic4_{tag}"),
                vec![(g, one()), (li, -eps.clone()), (lj, -eps.clone())],
                Sense::Le,
                one() - eps * int(2),
            );
            // Gamma >= eps (Lambda_i + Lambda_j - 1)
            model.add_constraint(
                format!("Stoic5_{tag}"),
                vec![(g, one()), (li, -eps.clone()), (lj, -eps.clone())],
                Sense::Ge,
                -eps.clone(),
            );
        }
    }
    for t in 0..vars.slots {
        for k in 0..vars.m {
            let mut terms = Vec::new();
            for (i, j) in vars.pairs() {
                let diff = y.get(k, j) - y.get(k, i);
                if diff.is_zero() {
                    continue;
                }
                terms.push((vars.s(i, j, t), diff.clone()));
                terms.push((vars.gamma(i, j, t), -(&deltas[i * vars.n + j] * diff)));
            }
            model.add_constraint(format!("Stoic6_{}_{}", t + 1, k + 1), terms, Sense::Eq, Rational::zero());
        }
    }
}

pub fn add_theorem(model: &mut MilpModel, vars: &VarMap, s: usize, theorem: Theorem) {
    let one = Rational::one;
    if theorem == Theorem::Dot {
        // sum_i Lambda[i,t] - sum S'[.,.,t] <= 2
        for t in 0..vars.slots {
            let mut terms: Vec<_> = (0..vars.n).map(|i| (vars.lambda(i, t), one())).collect();
            terms.extend(vars.pairs().map(|(i, j)| (vars.s_prime(i, j, t), -one())));
            model.add_constraint(format!("DOT_{}", t + 1), terms, Sense::Le, int(2));
        }
    }
    let terms = (0..vars.slots).flat_map(|t| vars.pairs().map(move |(i, j)| (i, j, t))).map(|(i, j, t)| (vars.s_prime(i, j, t), one())).collect();
    model.add_constraint("SpanSum", terms, Sense::Eq, int(s as i64));
}

pub fn add_terminal(model: &mut MilpModel, vars: &VarMap, eps: &Rational, cap: SupplementalCap) {
    let inv = eps.recip();
    let one = Rational::one;
    for i in 0..vars.n {
        for t in 0..vars.slots {
            model.add_constraint(
                format!("Cp1_{}_{}", i + 1, t + 1),
                vec![(vars.c(i, t), one()), (vars.lambda(i, t), -one())],
                Sense::Le,
                Rational::zero(),
            );
        }
    }
    for i in 0..vars.n {
        let mut terms: Vec<_> = (0..vars.slots).map(|t| (vars.c(i, t), one())).collect();
        terms.push((vars.c_prime[i], -one()));
        model.add_constraint(format!("Cp2_{}", i + 1), terms, Sense::Eq, Rational::zero());
    }
    for t in 0..vars.slots {
        let terms = (0..vars.n).map(|i| (vars.c(i, t), one())).collect();
        model.add_constraint(format!("Cp3_{}", t + 1), terms, Sense::Le, one());
    }
    let cap_coeff = match cap {
        SupplementalCap::Unit => one(),
        SupplementalCap::Scaled => inv.clone(),
    };
    for (i, j) in vars.pairs() {
        let tag = format!("{}_{}", i + 1, j + 1);
        let (w, wp, b) = (vars.w(i, j), vars.w_prime(i, j), vars.b(i, j));
        model.add_constraint(format!("WR1_{tag}"), vec![(w, one()), (b, -eps.clone())], Sense::Ge, Rational::zero());
        model.add_constraint(format!("WR2_{tag}"), vec![(w, -one()), (b, inv.clone())], Sense::Ge, Rational::zero());
        model.add_constraint(format!("WR3_{tag}"), vec![(wp, one()), (vars.c_prime[i], -cap_coeff.clone())], Sense::Le, Rational::zero());
        for t in 0..vars.slots {
            model.add_constraint(
                format!("WR4_{tag}_{}", t + 1),
                vec![(wp, one()), (vars.lambda(i, t), -inv.clone()), (vars.lambda(j, t), inv.clone())],
                Sense::Le,
                inv.clone(),
            );
        }
    }
    for i in 0..vars.n {
        let mut terms = Vec::new();
        for j in (0..vars.n).filter(|&j| j != i) {
            terms.push((vars.w(i, j), one()));
            terms.push((vars.w_prime(i, j), one()));
            terms.push((vars.w(j, i), -one()));
            terms.push((vars.w_prime(j, i), -one()));
        }
        model.add_constraint(format!("WR5_{}", i + 1), terms, Sense::Eq, Rational::zero());
    }
}

/// `minimize -sum L[t]`
pub fn set_objective(model: &mut MilpModel, vars: &VarMap) {
    model.set_objective(vars.l.iter().map(|&l| (l, -Rational::one())).collect());
    // At any binary-feasible point the best L is 0/1, so optimal values are integers.
    model.objective_step = Some(Rational::one());
}

/// Builds the full model from the complex matrix `Y` (m x n), the kinetic
/// matrix `M = Y A(K)` and its rank `s`.
pub fn build_model(y: &Matrix, m_mat: &Matrix, s: usize, config: &ModelConfig) -> Result<RealizationModel> {
    let (m, n) = (y.rows(), y.cols());
    if m_mat.rows() != m || m_mat.cols() != n {
        return Err(Error::DimensionMismatch(format!("Y is {m}x{n} but M is {}x{}", m_mat.rows(), m_mat.cols())));
    }
    if n < 2 {
        return Err(Error::Model(format!("need at least two complexes, got {n}")));
    }
    if m_mat.rank() != s {
        return Err(Error::Model(format!("rank(M) = {} differs from s = {s}", m_mat.rank())));
    }
    if n <= s {
        return Err(Error::Model(format!("n - s = {} leaves no linkage slot", n as i64 - s as i64)));
    }
    let eps = &config.eps;
    if !(eps > &Rational::zero() && eps < &Rational::one()) {
        return Err(Error::Model(format!("eps must lie in (0, 1), got {eps}")));
    }
    let deltas = match &config.deltas {
        Some(d) if d.len() == n * n => d.clone(),
        Some(d) => return Err(Error::Model(format!("{} delta samples for {n} complexes", d.len()))),
        None => sample_deltas(n, eps, config.seed),
    };
    let slots = n - s;
    let mut model = MilpModel::new();
    let vars = declare(&mut model, m, n, slots, eps);
    add_lc(&mut model, &vars, y, m_mat, config.mode);
    add_linkage(&mut model, &vars, eps);
    add_stoic(&mut model, &vars, y, eps, &deltas);
    add_theorem(&mut model, &vars, s, config.theorem);
    add_terminal(&mut model, &vars, eps, config.supplemental_cap);
    set_objective(&mut model, &vars);
    Ok(RealizationModel { model, vars, config: config.clone(), deltas, s })
}
