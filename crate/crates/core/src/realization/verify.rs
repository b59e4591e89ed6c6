//! Decoding MILP solutions into target systems and independent certification
//! of linear conjugacy and of the theorem conditions.

use num_traits::{One, Signed, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use super::model::{Mode, RealizationModel, Theorem};
use crate::analysis::{deficiency_report, DeficiencyReport};
use crate::error::{Error, Result};
use crate::linalg::Matrix;
use crate::network::{laplacian, mass_action_rhs, Complex, MassActionSystem, Network, Reaction};
use crate::format::write_network;
use crate::rational::{display, ratio, to_decimal_string, to_f64, Rational};

/// Sample points used by the vector-field check.
pub const VECTOR_FIELD_POINTS: usize = 100;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConjugacyCheck {
    /// `max |Y A(K*) diag(Psi(c))^-1 - T^-1 M|` over the union of complexes.
    #[serde(with = "crate::rational::serde_exact")]
    pub lc_residual: Rational,
    /// `max |f(x) - T f*(T^-1 x)|` over the sample points; absent when some
    /// complex has non-integer stoichiometry.
    #[serde(serialize_with = "serialize_opt")]
    pub vector_field_residual: Option<Rational>,
    pub points_checked: usize,
}

impl ConjugacyCheck {
    pub fn exact(&self) -> bool {
        self.lc_residual.is_zero() && self.vector_field_residual.as_ref().map_or(true, Zero::is_zero)
    }
}

fn serialize_opt<S: serde::Serializer>(v: &Option<Rational>, s: S) -> std::result::Result<S::Ok, S::Error> {
    match v {
        Some(r) => s.serialize_str(&display(r)),
        None => s.serialize_none(),
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct VerificationReport {
    pub conjugacy: ConjugacyCheck,
    /// Target including unused complexes as isolated self-loops.
    pub deficiency: DeficiencyReport,
    /// Target with isolated complexes removed.
    pub deficiency_without_isolated: Option<DeficiencyReport>,
    pub theorem: Theorem,
    pub theorem_verdict: bool,
    /// Whether the verdict is the same with and without isolated complexes.
    pub isolated_invariant: bool,
    pub non_isolated_complexes: usize,
    pub weakly_reversible: bool,
    pub certified: bool,
    pub remarks: Vec<String>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RealizationResult {
    /// Conjugacy constants `c_i = 1 / d[i]`.
    pub c: Vec<Rational>,
    pub target: MassActionSystem,
    pub mode: Mode,
    pub theorem: Theorem,
    /// Linkage slot of each complex in the solution.
    pub slots: Vec<usize>,
    pub verification: VerificationReport,
}

#[derive(Serialize)]
struct ReactionJson {
    source: String,
    target: String,
    #[serde(with = "crate::rational::serde_exact")]
    k: Rational,
    k_decimal: f64,
}

#[derive(Serialize)]
struct ResultJson<'a> {
    c: Vec<String>,
    c_decimal: Vec<f64>,
    mode: Mode,
    theorem: Theorem,
    slots: &'a [usize],
    species: Vec<String>,
    reactions: Vec<ReactionJson>,
    network: String,
    verification: &'a VerificationReport,
}

impl Serialize for RealizationResult {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let net = self.target.network();
        let reactions = net
            .reactions()
            .iter()
            .zip(self.target.rates())
            .filter(|(r, _)| !r.is_self_loop())
            .map(|(r, k)| ReactionJson {
                source: net.render_complex(r.source),
                target: net.render_complex(r.target),
                k: k.clone(),
                k_decimal: to_f64(k),
            })
            .collect();
        ResultJson {
            c: self.c.iter().map(display).collect(),
            c_decimal: self.c.iter().map(to_f64).collect(),
            mode: self.mode,
            theorem: self.theorem,
            slots: &self.slots,
            species: net.species_names(),
            reactions,
            network: write_network(&self.target),
            verification: &self.verification,
        }
        .serialize(s)
    }
}

/// `Psi(c)`; requires integer stoichiometry.
fn monomials(net: &Network, c: &[Rational]) -> Result<Vec<Rational>> {
    net.complexes()
        .iter()
        .enumerate()
        .map(|(i, cx)| cx.monomial(c).ok_or(Error::NonIntegerExponent(i + 1)))
        .collect()
}

/// Target system of a solution: `c = 1/d`, reactions where `b > 0` with
/// `k*(i,j) = b[i,j] Psi_i(c)`, unused complexes kept as self-loops.
pub fn decode_target(values: &[Rational], rm: &RealizationModel, original: &Network) -> Result<(Vec<Rational>, MassActionSystem, Vec<usize>)> {
    let vars = &rm.vars;
    if original.num_complexes() != vars.n || original.num_species() != vars.m {
        return Err(Error::DimensionMismatch("solution does not belong to this network".into()));
    }
    let mut c = Vec::with_capacity(vars.m);
    for &d in &vars.d {
        let d = &values[d];
        if !d.is_positive() {
            return Err(Error::Solution(format!("nonpositive d value {}", display(d))));
        }
        c.push(d.recip());
    }
    let psi = monomials(original, &c)?;
    let mut reactions = Vec::new();
    let mut rates = Vec::new();
    let mut used = vec![false; vars.n];
    for i in 0..vars.n {
        for j in 0..vars.n {
            if i != j && values[vars.b(i, j)].is_positive() {
                reactions.push(Reaction::new(i, j));
                rates.push(&values[vars.b(i, j)] * &psi[i]);
                used[i] = true;
                used[j] = true;
            }
        }
    }
    for (i, u) in used.iter().enumerate() {
        if !u {
            reactions.push(Reaction::new(i, i));
            rates.push(Rational::one());
        }
    }
    let slots = (0..vars.n)
        .map(|i| (0..vars.slots).find(|&t| values[vars.lambda(i, t)].is_one()).unwrap_or(0))
        .collect();
    let net = Network::new(original.species_names(), original.complexes().to_vec(), reactions)?;
    Ok((c, MassActionSystem::new(net, rates)?, slots))
}

pub fn decode(values: &[Rational], rm: &RealizationModel, original: &MassActionSystem) -> Result<RealizationResult> {
    let (c, target, slots) = decode_target(values, rm, original.network())?;
    let verification = certify(original, &target, &c, rm.config.theorem)?;
    Ok(RealizationResult { c, target, mode: rm.config.mode, theorem: rm.config.theorem, slots, verification })
}

/// Union of the complexes of both networks, and each network's positions in it.
fn complex_union(a: &Network, b: &Network) -> (Vec<Complex>, Vec<usize>, Vec<usize>) {
    let mut all: Vec<Complex> = a.complexes().to_vec();
    let pa = (0..all.len()).collect();
    let pb = b
        .complexes()
        .iter()
        .map(|c| match all.iter().position(|x| x == c) {
            Some(p) => p,
            None => {
                all.push(c.clone());
                all.len() - 1
            }
        })
        .collect();
    (all, pa, pb)
}

fn embed(a: &Matrix, pos: &[usize], size: usize) -> Matrix {
    let mut out = Matrix::zeros(size, size);
    for r in 0..a.rows() {
        for c in 0..a.cols() {
            let v = a.get(r, c);
            if !v.is_zero() {
                out.set(pos[r], pos[c], v.clone());
            }
        }
    }
    out
}

fn random_point(rng: &mut ChaCha8Rng, m: usize) -> Vec<Rational> {
    (0..m).map(|_| ratio(rng.gen_range(1..=40), rng.gen_range(1..=12))).collect()
}

/// Checks that `x = T x*` maps trajectories of `target` onto those of `original`.
pub fn verify_conjugacy(original: &MassActionSystem, target: &MassActionSystem, c: &[Rational]) -> Result<ConjugacyCheck> {
    let m = original.num_species();
    if target.num_species() != m || c.len() != m {
        return Err(Error::DimensionMismatch(format!(
            "original has {m} species, target {}, c has {} entries",
            target.num_species(),
            c.len()
        )));
    }
    if let Some(i) = c.iter().position(|v| !v.is_positive()) {
        return Err(Error::NonPositiveState(i + 1));
    }
    let (all, pa, pb) = complex_union(original.network(), target.network());
    let size = all.len();
    let mut y = Matrix::zeros(m, size);
    for (j, cx) in all.iter().enumerate() {
        for (i, v) in cx.coefficients().iter().enumerate() {
            y.set(i, j, v.clone());
        }
    }
    let a_orig = embed(&laplacian(original), &pa, size);
    let a_tgt = embed(&laplacian(target), &pb, size);
    let lhs = y.mul(&a_tgt);
    let rhs = y.mul(&a_orig);

    let psi: Option<Vec<Rational>> = all.iter().map(|cx| cx.monomial(c)).collect();
    let lc_residual = match &psi {
        Some(psi) => {
            let mut worst = Rational::zero();
            for i in 0..m {
                for j in 0..size {
                    let diff = (lhs.get(i, j) / &psi[j] - rhs.get(i, j) / &c[i]).abs();
                    if diff > worst {
                        worst = diff;
                    }
                }
            }
            worst
        }
        None => return Err(Error::NonIntegerExponent(1)),
    };

    let mut rng = ChaCha8Rng::seed_from_u64(0);
    let mut vf: Option<Rational> = Some(Rational::zero());
    let mut points = 0;
    for _ in 0..VECTOR_FIELD_POINTS {
        let x = random_point(&mut rng, m);
        let x_star: Vec<Rational> = x.iter().zip(c).map(|(a, b)| a / b).collect();
        let (Ok(f), Ok(g)) = (mass_action_rhs(original, &x), mass_action_rhs(target, &x_star)) else {
            vf = None;
            break;
        };
        points += 1;
        for i in 0..m {
            let diff = (&f[i] - &c[i] * &g[i]).abs();
            if let Some(w) = vf.as_mut() {
                if &diff > w {
                    *w = diff;
                }
            }
        }
    }
    Ok(ConjugacyCheck { lc_residual, vector_field_residual: vf, points_checked: points })
}

fn verdict(report: &DeficiencyReport, theorem: Theorem) -> bool {
    match theorem {
        Theorem::Dot => report.deficiency_one_theorem,
        Theorem::Boros => report.boros,
    }
}

/// Exact re-analysis of `target` plus the conjugacy check against `original`.
pub fn certify(original: &MassActionSystem, target: &MassActionSystem, c: &[Rational], theorem: Theorem) -> Result<VerificationReport> {
    let conjugacy = verify_conjugacy(original, target, c)?;
    let net = target.network();
    let deficiency = deficiency_report(net);
    let without = net.without_isolated().map(|(core, _)| deficiency_report(&core));
    let theorem_verdict = verdict(&deficiency, theorem);
    let isolated_invariant = without.as_ref().map_or(true, |r| verdict(r, theorem) == theorem_verdict);
    let non_isolated = net.num_complexes() - net.isolated_complexes().len();
    let weakly_reversible = without.as_ref().map_or(deficiency.weakly_reversible, |r| r.weakly_reversible);
    let certified = conjugacy.exact() && theorem_verdict && isolated_invariant;

    let mut remarks = Vec::new();
    if !conjugacy.lc_residual.is_zero() {
        remarks.push(format!("conjugacy residual {} is not zero", to_decimal_string(&conjugacy.lc_residual, 10)));
    }
    if !theorem_verdict {
        let name = match theorem {
            Theorem::Dot => "Deficiency One Theorem",
            Theorem::Boros => "Boros condition",
        };
        remarks.push(format!("target does not satisfy the {name}"));
    }
    if certified {
        remarks.push("at most one positive steady state in each positive stoichiometric compatibility class".into());
        if weakly_reversible && theorem == Theorem::Dot {
            remarks.push("target is weakly reversible: a positive steady state exists for every choice of rate constants".into());
        }
    }
    Ok(VerificationReport {
        conjugacy,
        deficiency,
        deficiency_without_isolated: without,
        theorem,
        theorem_verdict,
        isolated_invariant,
        non_isolated_complexes: non_isolated,
        weakly_reversible,
        certified,
        remarks,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::format::parse_network;
    use crate::rational::int;

    fn sys(text: &str) -> MassActionSystem {
        parse_network(text).unwrap()
    }

    #[test]
    fn conjugate_pair_certifies_with_c_1_2() {
        let original = sys("2 X1 -> X1 + X2 ; k=1\nX2 -> X1 ; k=1\n");
        let target = sys("2 X1 -> X2 ; k=1/2\nX2 -> 2 X1 ; k=1\n");
        let check = verify_conjugacy(&original, &target, &[int(1), int(2)]).unwrap();
        assert!(check.lc_residual.is_zero());
        assert_eq!(check.vector_field_residual, Some(int(0)));
        assert_eq!(check.points_checked, VECTOR_FIELD_POINTS);
        let wrong = verify_conjugacy(&original, &target, &[int(1), int(3)]).unwrap();
        assert!(!wrong.lc_residual.is_zero());
        assert!(!wrong.vector_field_residual.unwrap().is_zero());
    }

    #[test]
    fn identical_systems_are_conjugate_with_unit_c() {
        let s = sys("2 X1 -> 2 X2 ; k=1\n2 X2 -> X1 + X2 ; k=2\n");
        let check = verify_conjugacy(&s, &s, &[int(1), int(1)]).unwrap();
        assert!(check.exact());
    }

    #[test]
    fn dimension_mismatch() {
        let a = sys("X1 -> X2\n");
        let b = sys("X1 -> X2\nX2 -> X3\n");
        assert!(matches!(verify_conjugacy(&a, &b, &[int(1), int(1)]), Err(Error::DimensionMismatch(_))));
    }
}
