//! Density upper bounds, voter curves of the two-step update, residual
//! entropies and the two-level update bound.

mod composite;
mod entropy;
mod kissing;
mod voter;

pub use composite::{composite_estimate, composite_update_bound, CompositeEstimate};
pub use entropy::{
    entropy_constants, kagome_entropy, kagome_entropy_with, EntropyEstimate, EntropyKind,
    EntropyMethod, EntropyUnit,
};
pub use kissing::{bound_tightness, kissing_stats, tightness_torus, KissingStats, Tightness};
pub use voter::{
    doublet_voter_curve, restricted_voter_curve, voter_curve, VoterCurve, VoterMode,
};
