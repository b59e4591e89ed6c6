//! Deficiency analysis of chemical reaction networks and an exact
//! mixed-integer search for linearly conjugate realizations that satisfy the
//! Deficiency One Theorem.

pub mod analysis;
pub mod error;
pub mod format;
pub mod linalg;
pub mod milp;
pub mod network;
pub mod polynomial;
pub mod rational;
pub mod realization;

pub use analysis::{decompose, deficiency_report, kinetic_dim, DeficiencyReport, LinkageDecomposition};
pub use error::{Error, Result};
pub use format::{parse_network, parse_ode, write_network, write_ode};
pub use milp::{MilpModel, MilpSolution, MilpStatus};
pub use network::{build_matrices, mass_action_rhs, Complex, MassActionSystem, Network, Reaction, Species};
pub use polynomial::{canonical_realization, PolynomialSystem};
pub use rational::Rational;
pub use realization::{find, FindOptions, FindOutcome, FindStatus, Mode, ModelConfig, RealizationResult, Theorem, VerificationReport};
