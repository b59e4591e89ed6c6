//! Searching for and certifying realizations that satisfy the Deficiency One
//! Theorem or the Boros condition.

pub mod model;
pub mod rank;
pub mod search;
pub mod verify;

pub use model::{build_model, sample_deltas, sample_weights, Mode, ModelConfig, RealizationModel, SupplementalCap, Theorem, VarMap};
pub use rank::{min_support_count, rank_by_support, support_model, RankTrickOutcome};
pub use search::{find, finish, model_for, FindOptions, FindOutcome, FindStatus};
pub use verify::{certify, decode, decode_target, verify_conjugacy, ConjugacyCheck, RealizationResult, VerificationReport};
