//! Polynomial ODE systems and their canonical mass action realization.

use std::collections::BTreeMap;

use num_traits::{Signed, Zero};

use crate::error::{Error, Result};
use crate::network::{build_matrices, Complex, MassActionSystem, Network, Reaction};
use crate::rational::{display, Rational};

#[derive(Debug, Clone, PartialEq)]
pub struct Term {
    pub coefficient: Rational,
    pub exponents: Vec<u32>,
}

impl Term {
    pub fn new(coefficient: Rational, exponents: Vec<u32>) -> Self {
        Self { coefficient, exponents }
    }

    pub fn render(&self, variables: &[String]) -> String {
        let mut parts = vec![display(&self.coefficient)];
        for (e, v) in self.exponents.iter().zip(variables) {
            match e {
                0 => {}
                1 => parts.push(v.clone()),
                _ => parts.push(format!("{v}^{e}")),
            }
        }
        parts.join("*")
    }
}

/// `dx_i/dt = sum_t c_t x^{a_t}` for each species `i`.
#[derive(Debug, Clone, PartialEq)]
pub struct PolynomialSystem {
    species: Vec<String>,
    equations: Vec<Vec<Term>>,
}

impl PolynomialSystem {
    pub fn new(species: Vec<String>, equations: Vec<Vec<Term>>) -> Result<Self> {
        let m = species.len();
        if m == 0 || equations.len() != m {
            return Err(Error::InvalidSystem(format!("{} equations for {m} species", equations.len())));
        }
        for (i, eq) in equations.iter().enumerate() {
            if let Some(t) = eq.iter().find(|t| t.exponents.len() != m) {
                return Err(Error::InvalidSystem(format!(
                    "term with {} exponents in equation {} (expected {m})",
                    t.exponents.len(),
                    i + 1
                )));
            }
        }
        Ok(Self { species, equations })
    }

    pub fn species(&self) -> &[String] {
        &self.species
    }

    pub fn equations(&self) -> &[Vec<Term>] {
        &self.equations
    }

    pub fn num_species(&self) -> usize {
        self.species.len()
    }

    /// Like terms merged, zero terms dropped; keyed by exponent vector.
    pub fn normalized(&self) -> Vec<BTreeMap<Vec<u32>, Rational>> {
        self.equations
            .iter()
            .map(|eq| {
                let mut acc: BTreeMap<Vec<u32>, Rational> = BTreeMap::new();
                for t in eq {
                    *acc.entry(t.exponents.clone()).or_insert_with(Rational::zero) += &t.coefficient;
                }
                acc.retain(|_, c| !c.is_zero());
                acc
            })
            .collect()
    }

    /// Checks that every negative term of `dx_i/dt` contains `x_i`.
    pub fn check_admissible(&self) -> Result<()> {
        for (i, eq) in self.normalized().iter().enumerate() {
            for (exps, c) in eq {
                if c.is_negative() && exps[i] == 0 {
                    let term = Term::new(c.clone(), exps.clone()).render(&self.species);
                    return Err(Error::Inadmissible { species: self.species[i].clone(), term });
                }
            }
        }
        Ok(())
    }

    /// Polynomial generated by a mass action system with integer stoichiometry.
    pub fn from_mass_action(sys: &MassActionSystem) -> Result<Self> {
        let net = sys.network();
        let m = net.num_species();
        let mats = build_matrices(sys);
        let mut equations = vec![Vec::new(); m];
        for (j, c) in net.complexes().iter().enumerate() {
            let exps = c.integer_exponents().ok_or(Error::NonIntegerExponent(j + 1))?;
            for (i, eq) in equations.iter_mut().enumerate() {
                let coeff = mats.kinetic.matrix().get(i, j);
                if !coeff.is_zero() {
                    eq.push(Term::new(coeff.clone(), exps.clone()));
                }
            }
        }
        let names = net.species().iter().map(|s| s.name.clone()).collect();
        Self::new(names, equations)
    }
}

/// Canonical realization: a positive term `c x^y` of `dx_i/dt` becomes
/// `y -> y + e_i` with rate `c`, a negative one `y -> y - e_i` with rate `|c|`.
/// Coinciding reactions have their rates summed. Complexes are numbered in
/// order of first appearance.
/// Species are named after the variables with the first letter capitalized.
pub fn canonical_realization(p: &PolynomialSystem) -> Result<MassActionSystem> {
    p.check_admissible()?;
    let species_names: Vec<String> = p.species.iter().map(|v| species_name(v)).collect();
    let normalized = p.normalized();
    let m = p.num_species();
    let mut complexes: Vec<Complex> = Vec::new();
    let mut index: BTreeMap<Vec<u32>, usize> = BTreeMap::new();
    let mut reactions: Vec<(Reaction, Rational)> = Vec::new();
    let mut intern = |exps: Vec<u32>, complexes: &mut Vec<Complex>| -> usize {
        *index.entry(exps.clone()).or_insert_with(|| {
            complexes.push(Complex::new(exps.iter().map(|&e| crate::rational::int(e as i64)).collect()).unwrap());
            complexes.len() - 1
        })
    };
    // Walk the terms in input order so that complex numbering follows the file.
    for (i, eq) in p.equations.iter().enumerate() {
        let merged = &normalized[i];
        let mut emitted = std::collections::HashSet::new();
        for t in eq {
            if !emitted.insert(t.exponents.clone()) {
                continue;
            }
            let Some(c) = merged.get(&t.exponents) else { continue };
            let mut target = t.exponents.clone();
            if c.is_positive() {
                target[i] += 1;
            } else {
                target[i] -= 1;
            }
            let s = intern(t.exponents.clone(), &mut complexes);
            let d = intern(target, &mut complexes);
            let rate = c.abs();
            match reactions.iter_mut().find(|(r, _)| r.source == s && r.target == d) {
                Some((_, k)) => *k += rate,
                None => reactions.push((Reaction::new(s, d), rate)),
            }
        }
    }
    if reactions.is_empty() {
        return Err(Error::InvalidSystem("the vector field is identically zero".into()));
    }
    debug_assert!(complexes.iter().all(|c| c.len() == m));
    let (reactions, rates): (Vec<_>, Vec<_>) = reactions.into_iter().unzip();
    let net = Network::new(species_names, complexes, reactions)?;
    MassActionSystem::new(net, rates)
}

/// `x1` becomes `X1`.
pub fn species_name(variable: &str) -> String {
    let mut chars = variable.chars();
    match chars.next() {
        Some(first) => first.to_uppercase().chain(chars).collect(),
        None => String::new(),
    }
}
