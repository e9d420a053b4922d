//! Named games: one constructor per solved equilibrium, dispatching the
//! concrete strategy pairs behind a pair of enums so the simulator, the
//! verifier and the CLI can address a game uniformly. Also hosts the
//! documented perturbations used to demonstrate that the verifier rejects
//! broken profiles.

use std::str::FromStr;
use std::sync::Arc;

use serde::Serialize;
use thiserror::Error;

use crate::dist::{DistError, ValueDistribution};
use crate::finite::{
    self, FinitePartialBuyerStrategy, FinitePartialSellerStrategy, FiniteRecursionRow,
};
use crate::infinite::{
    self, BeliefState, InfiniteEquilibrium, InfiniteError, InfiniteParams,
    InfinitePartialBuyerStrategy, InfinitePartialSellerStrategy, InfiniteZeroBuyerStrategy,
    InfiniteZeroSellerStrategy,
};
use crate::search;
use crate::sim::{BuyerStrategy, Regime, SellerStrategy};
use crate::two_round::{
    TwoRoundBuyerStrategy, TwoRoundEquilibrium, TwoRoundError, TwoRoundSellerStrategy,
    TwoRoundTables,
};
use crate::Action;

#[derive(Debug, Error)]
pub enum GameError {
    #[error(transparent)]
    TwoRound(#[from] TwoRoundError),
    #[error(transparent)]
    Infinite(#[from] InfiniteError),
    #[error(transparent)]
    Dist(#[from] DistError),
    #[error("invalid game configuration: {0}")]
    InvalidConfig(String),
}

/// Documented profile perturbations: each one turns a certified equilibrium
/// into a profile the verifier must reject.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub enum Perturbation {
    /// Shifts every buyer acceptance threshold by this amount (negative
    /// lowers the thresholds).
    BuyerThresholdShift(f64),
    /// Shifts the first posted price.
    RootPriceShift(f64),
    /// The seller never narrows the belief top after a rejection.
    SkipBeliefUpdate,
}

impl FromStr for Perturbation {
    type Err = String;

    /// `buyer-threshold=-0.05` | `root-price=0.05` | `skip-belief-update`
    fn from_str(s: &str) -> Result<Self, String> {
        if s == "skip-belief-update" {
            return Ok(Perturbation::SkipBeliefUpdate);
        }
        let (name, value) = s
            .split_once('=')
            .ok_or_else(|| format!("unrecognized perturbation spec '{s}'"))?;
        let x: f64 = value
            .parse()
            .map_err(|e| format!("bad perturbation value: {e}"))?;
        match name {
            "buyer-threshold" => Ok(Perturbation::BuyerThresholdShift(x)),
            "root-price" => Ok(Perturbation::RootPriceShift(x)),
            _ => Err(format!("unrecognized perturbation '{name}'")),
        }
    }
}

/// A solved game: equilibrium objects plus everything needed to simulate and
/// verify it.
#[derive(Debug, Clone)]
pub enum Game {
    TwoRound {
        dist: ValueDistribution,
        tables: Arc<TwoRoundTables>,
        eq: TwoRoundEquilibrium,
    },
    FinitePartial {
        n: u32,
        k: u32,
        rows: Arc<Vec<FiniteRecursionRow>>,
        dist: ValueDistribution,
    },
    InfinitePartial {
        params: InfiniteParams,
        eq: InfiniteEquilibrium,
        dist: ValueDistribution,
    },
    InfiniteZero {
        delta: f64,
        dist: ValueDistribution,
    },
}

impl Game {
    pub fn two_round(dist: ValueDistribution) -> Result<Game, GameError> {
        Self::two_round_with_grid(dist, search::DEFAULT_GRID)
    }

    pub fn two_round_with_grid(dist: ValueDistribution, grid: usize) -> Result<Game, GameError> {
        let eq = crate::two_round::solve_two_round_with_grid(&dist, grid)?;
        let tables = Arc::new(TwoRoundTables::new(dist.clone(), grid));
        Ok(Game::TwoRound { dist, tables, eq })
    }

    /// n-round partial-commitment game on the `power_law(k)` prior.
    pub fn finite_partial(n: u32, k: u32) -> Result<Game, GameError> {
        if n == 0 {
            return Err(GameError::InvalidConfig(
                "horizon must be at least 1".into(),
            ));
        }
        let rows = Arc::new(finite::solve_partial_power_law(n, k));
        let dist = ValueDistribution::power_law(k)?;
        Ok(Game::FinitePartial { n, k, rows, dist })
    }

    pub fn infinite_partial(delta: f64) -> Result<Game, GameError> {
        let eq = infinite::equilibrium(delta)?;
        let params = InfiniteParams {
            delta: eq.delta,
            t: eq.t,
            p: eq.p,
        };
        let dist = ValueDistribution::uniform(0.0, 1.0)?;
        Ok(Game::InfinitePartial { params, eq, dist })
    }

    pub fn infinite_zero(delta: f64) -> Result<Game, GameError> {
        infinite::zero_commitment_delta(delta)?;
        let dist = ValueDistribution::uniform(0.0, 1.0)?;
        Ok(Game::InfiniteZero { delta, dist })
    }

    pub fn name(&self) -> &'static str {
        match self {
            Game::TwoRound { .. } => "two-round",
            Game::FinitePartial { .. } => "finite",
            Game::InfinitePartial { .. } => "infinite-partial",
            Game::InfiniteZero { .. } => "infinite-zero",
        }
    }

    pub fn dist(&self) -> &ValueDistribution {
        match self {
            Game::TwoRound { dist, .. }
            | Game::FinitePartial { dist, .. }
            | Game::InfinitePartial { dist, .. }
            | Game::InfiniteZero { dist, .. } => dist,
        }
    }

    pub fn delta(&self) -> Option<f64> {
        match self {
            Game::InfinitePartial { params, .. } => Some(params.delta),
            Game::InfiniteZero { delta, .. } => Some(*delta),
            _ => None,
        }
    }

    /// Whether the seller is bound never to exceed an accepted price.
    pub fn has_partial_commitment(&self) -> bool {
        matches!(
            self,
            Game::FinitePartial { .. } | Game::InfinitePartial { .. }
        )
    }

    /// Playout regime; `tol` controls the discounted truncation tail.
    pub fn regime(&self, tol: f64) -> Regime {
        match self {
            Game::TwoRound { .. } => Regime::fixed(2),
            Game::FinitePartial { n, .. } => Regime::fixed(*n),
            Game::InfinitePartial { params, .. } => {
                Regime::discounted(params.delta, tol, self.dist().high())
            }
            Game::InfiniteZero { delta, .. } => Regime::discounted(*delta, tol, self.dist().high()),
        }
    }

    /// Closed-form expected revenue of the equilibrium.
    pub fn analytic_revenue(&self) -> f64 {
        match self {
            Game::TwoRound { eq, .. } => eq.revenue,
            Game::FinitePartial { rows, .. } => rows.last().expect("n >= 1").revenue,
            Game::InfinitePartial { eq, .. } => eq.revenue,
            Game::InfiniteZero { .. } => 0.0,
        }
    }

    /// The full-commitment benchmark: monopoly revenue every round.
    pub fn benchmark(&self) -> f64 {
        let (_, monopoly_revenue) = self.dist().monopoly_price();
        let per_round_mass = match self {
            Game::TwoRound { .. } => 2.0,
            Game::FinitePartial { n, .. } => *n as f64,
            Game::InfinitePartial { params, .. } => 1.0 / params.delta,
            Game::InfiniteZero { delta, .. } => 1.0 / delta,
        };
        monopoly_revenue * per_round_mass
    }

    /// Value-axis jump points of realized equilibrium revenue, used as
    /// quadrature panel boundaries.
    pub fn quadrature_breakpoints(&self) -> Vec<f64> {
        match self {
            Game::TwoRound { eq, .. } => vec![eq.p20, eq.t1, eq.p21],
            Game::FinitePartial { rows, .. } => finite::finite_partial_breakpoints(rows),
            Game::InfinitePartial { params, .. } => {
                let mut points = Vec::new();
                let mut x = params.t;
                while x > 1e-12 && points.len() < 5000 {
                    points.push(x);
                    x *= params.t;
                }
                points
            }
            Game::InfiniteZero { .. } => Vec::new(),
        }
    }

    /// Equilibrium strategy pair, optionally perturbed.
    pub fn strategies(&self, perturb: Option<Perturbation>) -> (AnySeller, AnyBuyer) {
        let (seller, buyer) = match self {
            Game::TwoRound { tables, eq, .. } => (
                AnySeller::TwoRound(TwoRoundSellerStrategy::new(tables.clone(), eq.p1)),
                AnyBuyer::TwoRound(TwoRoundBuyerStrategy::new(tables.clone())),
            ),
            Game::FinitePartial { n, k, .. } => {
                let (s, b) = finite::finite_partial_strategies(*n, *k);
                (AnySeller::Finite(s), AnyBuyer::Finite(b))
            }
            Game::InfinitePartial { params, .. } => (
                AnySeller::InfinitePartial(InfinitePartialSellerStrategy::new(*params)),
                AnyBuyer::InfinitePartial(InfinitePartialBuyerStrategy::new(*params)),
            ),
            Game::InfiniteZero { delta, .. } => (
                AnySeller::InfiniteZero(
                    InfiniteZeroSellerStrategy::new(*delta).expect("validated at construction"),
                ),
                AnyBuyer::InfiniteZero(
                    InfiniteZeroBuyerStrategy::new(*delta).expect("validated at construction"),
                ),
            ),
        };
        match perturb {
            None => (seller, buyer),
            Some(Perturbation::RootPriceShift(shift)) => (
                AnySeller::RootShift {
                    inner: Box::new(seller),
                    shift,
                    rounds_seen: 0,
                },
                buyer,
            ),
            Some(Perturbation::BuyerThresholdShift(shift)) => (
                seller,
                // Lowering thresholds by `shift` is deciding as if the value
                // were `value - shift`.
                AnyBuyer::ThresholdShift {
                    inner: Box::new(buyer),
                    value_shift: -shift,
                },
            ),
            Some(Perturbation::SkipBeliefUpdate) => match self {
                Game::InfinitePartial { params, .. } => (
                    AnySeller::StaleBelief(StaleBeliefSeller::new(*params)),
                    buyer,
                ),
                _ => (seller, buyer),
            },
        }
    }

    /// Strategy pair answering seller price deviations. For the infinite
    /// partial game the pair reads an off-schedule price as the
    /// scale-invariant price fraction for the current belief and re-anchors
    /// the profile there; on the equilibrium path it coincides with
    /// [`Game::strategies`]. Other games respond with their stated rules.
    pub fn deviation_strategies(&self, perturb: Option<Perturbation>) -> (AnySeller, AnyBuyer) {
        match self {
            Game::InfinitePartial { params, .. } => {
                let seller =
                    AnySeller::InfinitePartial(InfinitePartialSellerStrategy::reanchored(*params));
                let buyer =
                    AnyBuyer::InfinitePartial(InfinitePartialBuyerStrategy::reanchored(*params));
                match perturb {
                    None => (seller, buyer),
                    Some(Perturbation::RootPriceShift(shift)) => (
                        AnySeller::RootShift {
                            inner: Box::new(seller),
                            shift,
                            rounds_seen: 0,
                        },
                        buyer,
                    ),
                    Some(Perturbation::BuyerThresholdShift(shift)) => (
                        seller,
                        AnyBuyer::ThresholdShift {
                            inner: Box::new(buyer),
                            value_shift: -shift,
                        },
                    ),
                    Some(Perturbation::SkipBeliefUpdate) => (
                        AnySeller::StaleBelief(StaleBeliefSeller::new(*params)),
                        buyer,
                    ),
                }
            }
            _ => self.strategies(perturb),
        }
    }

    /// Action prefixes of the on-path history classes up to `depth` rounds:
    /// these index the reachable belief states of each game.
    pub fn on_path_prefixes(&self, depth: usize) -> Vec<Vec<Action>> {
        let mut prefixes = vec![Vec::new()];
        match self {
            Game::InfiniteZero { .. } => {
                for r in 1..=depth {
                    prefixes.push(vec![Action::Accept; r]);
                }
            }
            _ => {
                for r in 1..=depth {
                    prefixes.push(vec![Action::Reject; r]);
                }
                for r in 0..depth {
                    let mut p = vec![Action::Reject; r];
                    p.push(Action::Accept);
                    prefixes.push(p);
                }
            }
        }
        prefixes
    }
}

/// Infinite-partial seller that skips the belief-top update after on-path
/// rejections; its posted prices never descend.
#[derive(Debug, Clone)]
pub struct StaleBeliefSeller {
    params: InfiniteParams,
    state: BeliefState,
    next_price: f64,
}

impl StaleBeliefSeller {
    pub fn new(params: InfiniteParams) -> Self {
        StaleBeliefSeller {
            params,
            state: BeliefState::initial(),
            next_price: params.p,
        }
    }
}

impl SellerStrategy for StaleBeliefSeller {
    fn reset(&mut self) {
        self.state = BeliefState::initial();
        self.next_price = self.params.p;
    }

    fn price(&self) -> f64 {
        self.next_price
    }

    fn observe(&mut self, price: f64, action: Action) {
        let before = self.state;
        let (mut state, mut next_price) =
            infinite::seller_step_partial(&self.params, &self.state, price, action)
                .expect("internally maintained belief state is valid");
        if matches!(action, Action::Reject)
            && !before.ever_accepted()
            && !before.is_absorbing()
            && price > 0.0
            && state.mu_end < before.mu_end
        {
            state.mu_end = before.mu_end;
            next_price = self.params.p * state.mu_end;
        }
        self.state = state;
        self.next_price = next_price;
    }

    fn belief_interval(&self) -> Option<(f64, f64)> {
        Some((self.state.mu_begin, self.state.mu_end))
    }
}

/// Seller strategy of any solved game (plus perturbation wrappers).
#[derive(Debug, Clone)]
pub enum AnySeller {
    TwoRound(TwoRoundSellerStrategy),
    Finite(FinitePartialSellerStrategy),
    InfinitePartial(InfinitePartialSellerStrategy),
    InfiniteZero(InfiniteZeroSellerStrategy),
    RootShift {
        inner: Box<AnySeller>,
        shift: f64,
        rounds_seen: u32,
    },
    StaleBelief(StaleBeliefSeller),
}

impl SellerStrategy for AnySeller {
    fn reset(&mut self) {
        match self {
            AnySeller::TwoRound(s) => s.reset(),
            AnySeller::Finite(s) => s.reset(),
            AnySeller::InfinitePartial(s) => s.reset(),
            AnySeller::InfiniteZero(s) => s.reset(),
            AnySeller::RootShift {
                inner, rounds_seen, ..
            } => {
                inner.reset();
                *rounds_seen = 0;
            }
            AnySeller::StaleBelief(s) => s.reset(),
        }
    }

    fn price(&self) -> f64 {
        match self {
            AnySeller::TwoRound(s) => s.price(),
            AnySeller::Finite(s) => s.price(),
            AnySeller::InfinitePartial(s) => s.price(),
            AnySeller::InfiniteZero(s) => s.price(),
            AnySeller::RootShift {
                inner,
                shift,
                rounds_seen,
            } => {
                if *rounds_seen == 0 {
                    (inner.price() + shift).max(0.0)
                } else {
                    inner.price()
                }
            }
            AnySeller::StaleBelief(s) => s.price(),
        }
    }

    fn observe(&mut self, price: f64, action: Action) {
        match self {
            AnySeller::TwoRound(s) => s.observe(price, action),
            AnySeller::Finite(s) => s.observe(price, action),
            AnySeller::InfinitePartial(s) => s.observe(price, action),
            AnySeller::InfiniteZero(s) => s.observe(price, action),
            AnySeller::RootShift {
                inner, rounds_seen, ..
            } => {
                inner.observe(price, action);
                *rounds_seen += 1;
            }
            AnySeller::StaleBelief(s) => s.observe(price, action),
        }
    }

    fn belief_interval(&self) -> Option<(f64, f64)> {
        match self {
            AnySeller::TwoRound(s) => s.belief_interval(),
            AnySeller::Finite(s) => s.belief_interval(),
            AnySeller::InfinitePartial(s) => s.belief_interval(),
            AnySeller::InfiniteZero(s) => s.belief_interval(),
            AnySeller::RootShift { inner, .. } => inner.belief_interval(),
            AnySeller::StaleBelief(s) => s.belief_interval(),
        }
    }
}

/// Buyer strategy of any solved game (plus perturbation wrappers).
#[derive(Debug, Clone)]
pub enum AnyBuyer {
    TwoRound(TwoRoundBuyerStrategy),
    Finite(FinitePartialBuyerStrategy),
    InfinitePartial(InfinitePartialBuyerStrategy),
    InfiniteZero(InfiniteZeroBuyerStrategy),
    ThresholdShift {
        inner: Box<AnyBuyer>,
        value_shift: f64,
    },
}

impl BuyerStrategy for AnyBuyer {
    fn reset(&mut self) {
        match self {
            AnyBuyer::TwoRound(b) => b.reset(),
            AnyBuyer::Finite(b) => b.reset(),
            AnyBuyer::InfinitePartial(b) => b.reset(),
            AnyBuyer::InfiniteZero(b) => b.reset(),
            AnyBuyer::ThresholdShift { inner, .. } => inner.reset(),
        }
    }

    fn decide(&self, value: f64, price: f64) -> Action {
        match self {
            AnyBuyer::TwoRound(b) => b.decide(value, price),
            AnyBuyer::Finite(b) => b.decide(value, price),
            AnyBuyer::InfinitePartial(b) => b.decide(value, price),
            AnyBuyer::InfiniteZero(b) => b.decide(value, price),
            AnyBuyer::ThresholdShift { inner, value_shift } => {
                inner.decide(value + value_shift, price)
            }
        }
    }

    fn observe(&mut self, price: f64, action: Action) {
        match self {
            AnyBuyer::TwoRound(b) => b.observe(price, action),
            AnyBuyer::Finite(b) => b.observe(price, action),
            AnyBuyer::InfinitePartial(b) => b.observe(price, action),
            AnyBuyer::InfiniteZero(b) => b.observe(price, action),
            AnyBuyer::ThresholdShift { inner, .. } => inner.observe(price, action),
        }
    }

    fn acceptance_cutoff(&self, price: f64) -> Option<f64> {
        match self {
            AnyBuyer::TwoRound(b) => b.acceptance_cutoff(price),
            AnyBuyer::Finite(b) => b.acceptance_cutoff(price),
            AnyBuyer::InfinitePartial(b) => b.acceptance_cutoff(price),
            AnyBuyer::InfiniteZero(b) => b.acceptance_cutoff(price),
            AnyBuyer::ThresholdShift { inner, value_shift } => {
                inner.acceptance_cutoff(price).map(|c| c - value_shift)
            }
        }
    }
}
