//! Reaction networks, mass action systems and their vector fields.

use std::collections::{HashMap, HashSet};
use std::fmt;

use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};
use crate::linalg::Matrix;
use crate::rational::{display, Rational};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Species {
    pub id: usize,
    pub name: String,
}

/// Stoichiometric vector of a complex; the all-zero vector is the zero complex.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Complex(Vec<Rational>);

impl Complex {
    pub fn new(coefficients: Vec<Rational>) -> Result<Self> {
        if let Some(i) = coefficients.iter().position(Signed::is_negative) {
            return Err(Error::InvalidNetwork(format!("negative stoichiometric coefficient for species {}", i + 1)));
        }
        Ok(Self(coefficients))
    }

    pub fn from_integers(coefficients: &[i64]) -> Result<Self> {
        Self::new(coefficients.iter().map(|&c| crate::rational::int(c)).collect())
    }

    pub fn zero(species: usize) -> Self {
        Self(vec![Rational::zero(); species])
    }

    pub fn coefficients(&self) -> &[Rational] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn is_zero_complex(&self) -> bool {
        self.0.iter().all(Zero::is_zero)
    }

    /// Integer exponents for exact monomial evaluation.
    pub fn integer_exponents(&self) -> Option<Vec<u32>> {
        self.0.iter().map(|c| if c.is_integer() { c.to_integer().to_u32() } else { None }).collect()
    }

    /// Monomial `prod x_j^{y_j}` at a positive point.
    pub fn monomial(&self, x: &[Rational]) -> Option<Rational> {
        let exps = self.integer_exponents()?;
        Some(
            exps.iter()
                .zip(x)
                .filter(|(e, _)| **e > 0)
                .fold(Rational::one(), |acc, (&e, xi)| acc * num_traits::pow(xi.clone(), e as usize)),
        )
    }

    /// Renders in network-file syntax (`0`, `X1 + 3 X2`).
    pub fn render(&self, species: &[Species]) -> String {
        let terms: Vec<String> = self
            .0
            .iter()
            .zip(species)
            .filter(|(c, _)| !c.is_zero())
            .map(|(c, s)| if c.is_one() { s.name.clone() } else { format!("{} {}", display(c), s.name) })
            .collect();
        if terms.is_empty() {
            "0".to_string()
        } else {
            terms.join(" + ")
        }
    }
}

impl fmt::Debug for Complex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.0.iter().map(display).collect();
        write!(f, "({})", parts.join(","))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Reaction {
    pub source: usize,
    pub target: usize,
}

impl Reaction {
    pub fn new(source: usize, target: usize) -> Self {
        Self { source, target }
    }

    pub fn is_self_loop(&self) -> bool {
        self.source == self.target
    }
}

/// A reaction network `(S, C, R)`.
#[derive(Debug, Clone, PartialEq)]
pub struct Network {
    species: Vec<Species>,
    complexes: Vec<Complex>,
    reactions: Vec<Reaction>,
}

impl Network {
    pub fn new(species_names: Vec<String>, complexes: Vec<Complex>, reactions: Vec<Reaction>) -> Result<Self> {
        let m = species_names.len();
        if m == 0 {
            return Err(Error::InvalidNetwork("no species".into()));
        }
        let mut names = HashSet::new();
        for name in &species_names {
            if name.is_empty() || !names.insert(name.as_str()) {
                return Err(Error::InvalidNetwork(format!("species name `{name}` is empty or repeated")));
            }
        }
        if complexes.is_empty() {
            return Err(Error::InvalidNetwork("no complexes".into()));
        }
        let mut seen = HashSet::new();
        for (i, c) in complexes.iter().enumerate() {
            if c.len() != m {
                return Err(Error::InvalidNetwork(format!("complex {} has {} coefficients, expected {m}", i + 1, c.len())));
            }
            if !seen.insert(c) {
                return Err(Error::InvalidNetwork(format!("complex {} is repeated", i + 1)));
            }
        }
        let n = complexes.len();
        let mut used = vec![false; n];
        let mut pairs = HashSet::new();
        for r in &reactions {
            if r.source >= n || r.target >= n {
                return Err(Error::InvalidNetwork(format!("reaction {} -> {} references a missing complex", r.source, r.target)));
            }
            if !pairs.insert(*r) {
                return Err(Error::InvalidNetwork(format!("duplicate reaction {} -> {}", r.source + 1, r.target + 1)));
            }
            used[r.source] = true;
            used[r.target] = true;
        }
        if let Some(i) = used.iter().position(|u| !u) {
            return Err(Error::InvalidNetwork(format!("complex {} takes part in no reaction", i + 1)));
        }
        for (j, name) in species_names.iter().enumerate() {
            if complexes.iter().all(|c| c.0[j].is_zero()) {
                return Err(Error::InvalidNetwork(format!("species {name} appears in no complex")));
            }
        }
        let species = species_names.into_iter().enumerate().map(|(id, name)| Species { id, name }).collect();
        Ok(Self { species, complexes, reactions })
    }

    pub fn species(&self) -> &[Species] {
        &self.species
    }

    pub fn species_names(&self) -> Vec<String> {
        self.species.iter().map(|s| s.name.clone()).collect()
    }

    pub fn complexes(&self) -> &[Complex] {
        &self.complexes
    }

    pub fn reactions(&self) -> &[Reaction] {
        &self.reactions
    }

    /// Number of species `m`.
    pub fn num_species(&self) -> usize {
        self.species.len()
    }

    /// Number of complexes `n`.
    pub fn num_complexes(&self) -> usize {
        self.complexes.len()
    }

    pub fn complex_index(&self, c: &Complex) -> Option<usize> {
        self.complexes.iter().position(|x| x == c)
    }

    pub fn reaction_index(&self, source: usize, target: usize) -> Option<usize> {
        self.reactions.iter().position(|r| r.source == source && r.target == target)
    }

    pub fn reaction_vector(&self, r: &Reaction) -> Vec<Rational> {
        let y_i = &self.complexes[r.source].0;
        let y_j = &self.complexes[r.target].0;
        y_j.iter().zip(y_i).map(|(a, b)| a - b).collect()
    }

    /// `Y` with `Y[i, j] = y_{j i}` (species by complexes).
    pub fn complex_matrix(&self) -> Matrix {
        let mut y = Matrix::zeros(self.num_species(), self.num_complexes());
        for (j, c) in self.complexes.iter().enumerate() {
            for (i, v) in c.0.iter().enumerate() {
                y.set(i, j, v.clone());
            }
        }
        y
    }

    pub fn render_complex(&self, i: usize) -> String {
        self.complexes[i].render(&self.species)
    }

    /// Indices of complexes whose only reactions are self-loops.
    pub fn isolated_complexes(&self) -> Vec<usize> {
        let mut linked = vec![false; self.num_complexes()];
        for r in self.reactions.iter().filter(|r| !r.is_self_loop()) {
            linked[r.source] = true;
            linked[r.target] = true;
        }
        (0..self.num_complexes()).filter(|&i| !linked[i]).collect()
    }

    /// Drops complexes that only carry self-loops, together with those loops.
    /// Returns `None` when nothing would remain.
    pub fn without_isolated(&self) -> Option<(Network, Vec<usize>)> {
        let isolated: HashSet<usize> = self.isolated_complexes().into_iter().collect();
        if isolated.is_empty() {
            return Some((self.clone(), (0..self.num_complexes()).collect()));
        }
        let kept: Vec<usize> = (0..self.num_complexes()).filter(|i| !isolated.contains(i)).collect();
        if kept.is_empty() {
            return None;
        }
        let remap: HashMap<usize, usize> = kept.iter().enumerate().map(|(new, &old)| (old, new)).collect();
        let complexes = kept.iter().map(|&i| self.complexes[i].clone()).collect();
        let reactions = self
            .reactions
            .iter()
            .filter(|r| !isolated.contains(&r.source))
            .map(|r| Reaction::new(remap[&r.source], remap[&r.target]))
            .collect();
        // Species that only appeared in isolated complexes are kept so that the
        // state space is unchanged; validation is relaxed accordingly.
        let net = Network { species: self.species.clone(), complexes, reactions };
        Some((net, kept))
    }
}

/// A network together with positive rate constants, one per reaction.
#[derive(Debug, Clone, PartialEq)]
pub struct MassActionSystem {
    network: Network,
    rates: Vec<Rational>,
}

impl MassActionSystem {
    pub fn new(network: Network, rates: Vec<Rational>) -> Result<Self> {
        if rates.len() != network.reactions.len() {
            return Err(Error::InvalidSystem(format!(
                "{} rate constants for {} reactions",
                rates.len(),
                network.reactions.len()
            )));
        }
        if let Some(i) = rates.iter().position(|k| !k.is_positive()) {
            return Err(Error::InvalidSystem(format!("rate constant of reaction {} is not positive", i + 1)));
        }
        Ok(Self { network, rates })
    }

    /// All rate constants equal to one.
    pub fn unit_rates(network: Network) -> Self {
        let rates = vec![Rational::one(); network.reactions.len()];
        Self { network, rates }
    }

    pub fn network(&self) -> &Network {
        &self.network
    }

    pub fn rates(&self) -> &[Rational] {
        &self.rates
    }

    pub fn rate(&self, source: usize, target: usize) -> Option<&Rational> {
        self.network.reaction_index(source, target).map(|i| &self.rates[i])
    }

    pub fn num_species(&self) -> usize {
        self.network.num_species()
    }
}

/// `M = Y * A(K)`, the coefficient map of the monomial vector.
#[derive(Debug, Clone, PartialEq)]
pub struct KineticMatrix(Matrix);

impl KineticMatrix {
    pub fn new(matrix: Matrix) -> Self {
        Self(matrix)
    }

    pub fn matrix(&self) -> &Matrix {
        &self.0
    }

    /// Kinetic dimension `s = rank(M)`.
    pub fn rank(&self) -> usize {
        self.0.rank()
    }
}

#[derive(Debug, Clone)]
pub struct SystemMatrices {
    pub y: Matrix,
    pub laplacian: Matrix,
    pub kinetic: KineticMatrix,
}

/// Laplacian with `A[j, i] = k(i, j)` and diagonal `-sum_l k(i, l)`;
/// self-loops cancel out.
pub fn laplacian(sys: &MassActionSystem) -> Matrix {
    let n = sys.network.num_complexes();
    let mut a = Matrix::zeros(n, n);
    for (r, k) in sys.network.reactions.iter().zip(&sys.rates) {
        if r.is_self_loop() {
            continue;
        }
        a.add_to(r.target, r.source, k);
        a.add_to(r.source, r.source, &-k);
    }
    a
}

pub fn build_matrices(sys: &MassActionSystem) -> SystemMatrices {
    let y = sys.network.complex_matrix();
    let laplacian = laplacian(sys);
    let kinetic = KineticMatrix(y.mul(&laplacian));
    SystemMatrices { y, laplacian, kinetic }
}

/// `Psi(x)`, one monomial per complex.
pub fn monomial_vector(net: &Network, x: &[Rational]) -> Result<Vec<Rational>> {
    check_state(net.num_species(), x)?;
    net.complexes
        .iter()
        .enumerate()
        .map(|(i, c)| c.monomial(x).ok_or(Error::NonIntegerExponent(i + 1)))
        .collect()
}

fn check_state(m: usize, x: &[Rational]) -> Result<()> {
    if x.len() != m {
        return Err(Error::DimensionMismatch(format!("state has {} entries, expected {m}", x.len())));
    }
    if let Some(i) = x.iter().position(|v| !v.is_positive()) {
        return Err(Error::NonPositiveState(i + 1));
    }
    Ok(())
}

/// Vector field as a sum over reactions: `sum k(i,j) (y_j - y_i) x^{y_i}`.
pub fn mass_action_rhs(sys: &MassActionSystem, x: &[Rational]) -> Result<Vec<Rational>> {
    let net = &sys.network;
    check_state(net.num_species(), x)?;
    let mut out = vec![Rational::zero(); net.num_species()];
    for (r, k) in net.reactions.iter().zip(&sys.rates) {
        if r.is_self_loop() {
            continue;
        }
        let flux = k * net.complexes[r.source].monomial(x).ok_or(Error::NonIntegerExponent(r.source + 1))?;
        for (o, d) in out.iter_mut().zip(net.reaction_vector(r)) {
            if !d.is_zero() {
                *o += &flux * d;
            }
        }
    }
    Ok(out)
}

/// Vector field in matrix form `Y * A(K) * Psi(x)`.
pub fn mass_action_rhs_matrix(sys: &MassActionSystem, x: &[Rational]) -> Result<Vec<Rational>> {
    let psi = monomial_vector(&sys.network, x)?;
    let mats = build_matrices(sys);
    Ok(mats.y.mul_vec(&mats.laplacian.mul_vec(&psi)))
}
