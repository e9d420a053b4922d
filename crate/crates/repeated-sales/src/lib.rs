//! Repeated posted-price sales between one seller and one buyer whose private
//! value is drawn once and persists across rounds.
//!
//! The crate solves, simulates and certifies threshold equilibria of this game
//! in three regimes:
//!
//! - [`two_round`]: the two-round game without commitment, for arbitrary
//!   atomless value distributions.
//! - [`finite`]: the n-round game: an existence checker for no-commitment
//!   threshold equilibria, and the partial-commitment revenue recursion for
//!   uniform and power-law priors (with its large-n asymptotics).
//! - [`infinite`]: the time-discounted infinite-horizon game: the
//!   zero-commitment no-discrimination equilibrium and the partial-commitment
//!   stationary equilibrium with its belief state machine.
//!
//! [`sim`] plays any (seller, buyer) strategy pair forward and computes
//! expected revenue by quadrature or reproducible parallel Monte Carlo;
//! [`verify`] certifies a profile as an ε-equilibrium by grid search over
//! deviations. [`games`] bundles the solved strategy pairs behind one enum so
//! the simulator, verifier and CLI can dispatch on a game name.
//!
//! Grid scans, quadrature panels, Monte-Carlo batches and verifier grids run
//! on rayon when the default `parallel` feature is enabled and fall back to
//! sequential iteration without it.

pub mod dist;
pub mod exec;
pub mod finite;
pub mod games;
pub mod infinite;
pub mod search;
pub mod sim;
pub mod two_round;
pub mod verify;

use serde::{Deserialize, Serialize};

/// A buyer's response to a posted price.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Action {
    Accept,
    Reject,
}

impl Action {
    pub fn is_accept(self) -> bool {
        matches!(self, Action::Accept)
    }
}

impl std::fmt::Display for Action {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Action::Accept => write!(f, "accept"),
            Action::Reject => write!(f, "reject"),
        }
    }
}

pub use dist::{DistError, DistributionConfig, ValueDistribution};
pub use finite::{FiniteRecursionRow, ThresholdExistenceReport};
pub use infinite::{BeliefState, InfiniteEquilibrium, InfiniteParams};
pub use sim::{Regime, SimulationConfig, Transcript};
pub use two_round::TwoRoundEquilibrium;
