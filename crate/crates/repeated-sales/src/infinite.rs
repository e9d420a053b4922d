//! The time-discounted infinite-horizon game on the uniform(0,1) prior.
//!
//! Partial commitment: the stationary equilibrium posts a fixed fraction `p`
//! of the top of the seller's belief interval. The threshold fraction `t`
//! maximizes `z(1-z) / ((1-(1-δ)z)(1-(1-δ)z^2))`, the price is
//! `p = δt / (1-(1-δ)t)`, and along the all-reject path the belief interval
//! is `[0, t^k]` with posted price `p t^k`. Acceptance freezes the price at
//! the lowest accepted level; zero-probability actions jump the belief to a
//! point mass at the top of the support.
//!
//! Zero commitment (only defined for `δ <= 1/2`): the seller gives the item
//! away until punished, the buyer refuses every positive price until then,
//! and revenue is exactly zero.
//!
//! Belief states are small copyable values and every step is a pure function
//! from `(state, price, action)` to the next state, shared verbatim between
//! the seller and the buyer who mirrors the seller's updates.

use serde::Serialize;
use thiserror::Error;

use crate::search;
use crate::sim::{BuyerStrategy, SellerStrategy};
use crate::Action;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum InfiniteError {
    #[error("delta must lie in (0, 1], got {0}")]
    InvalidDelta(f64),
    #[error("zero-commitment equilibrium is only defined for delta in (0, 0.5], got {0}")]
    ZeroCommitmentDelta(f64),
    #[error("corrupt belief state: {0}")]
    CorruptBeliefState(String),
    #[error("buyer indifference identity violated: residual {0}")]
    IndifferenceViolated(f64),
}

/// Stationary parameters of the partial-commitment equilibrium.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct InfiniteParams {
    pub delta: f64,
    /// Threshold fraction of the belief top.
    pub t: f64,
    /// Price fraction of the belief top.
    pub p: f64,
}

/// Solved partial-commitment equilibrium with its revenue and benchmark
/// ratio.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct InfiniteEquilibrium {
    pub delta: f64,
    pub t: f64,
    pub p: f64,
    /// Expected revenue of the full game from the uniform(0,1) prior.
    pub revenue: f64,
    /// `revenue / (1/(4δ))`, the fraction of the full-commitment benchmark.
    pub ratio: f64,
}

fn check_delta(delta: f64) -> Result<(), InfiniteError> {
    if !(delta > 0.0 && delta <= 1.0) || !delta.is_finite() {
        return Err(InfiniteError::InvalidDelta(delta));
    }
    Ok(())
}

/// The revenue objective `z(1-z) / ((1-(1-δ)z)(1-(1-δ)z^2))`.
pub fn revenue_objective(delta: f64, z: f64) -> f64 {
    let c = 1.0 - delta;
    z * (1.0 - z) / ((1.0 - c * z) * (1.0 - c * z * z))
}

/// Maximizes the revenue objective over `[0, 1]`.
///
/// For small `δ` the maximum sits in a peak of width `O(δ)` near
/// `1 - δ/√2`, so the scan grid concentrates on `[1 - 10δ, 1]` when
/// `δ <= 1e-3`. A Newton polish on the log-derivative sharpens the
/// golden-section result to machine precision.
pub fn optimal_threshold(delta: f64) -> Result<f64, InfiniteError> {
    check_delta(delta)?;
    let lo = if delta <= 1e-3 {
        1.0 - 10.0 * delta
    } else {
        0.0
    };
    let scan = search::maximize(
        |z| revenue_objective(delta, z),
        lo,
        1.0,
        search::DEFAULT_GRID,
        search::DEFAULT_TOL,
    );
    Ok(newton_polish(delta, scan.x, lo))
}

// d/dz log objective and its derivative.
fn log_deriv(c: f64, z: f64) -> f64 {
    1.0 / z - 1.0 / (1.0 - z) + c / (1.0 - c * z) + 2.0 * c * z / (1.0 - c * z * z)
}

fn log_deriv_prime(c: f64, z: f64) -> f64 {
    let d1 = 1.0 - c * z;
    let d2 = 1.0 - c * z * z;
    -1.0 / (z * z) - 1.0 / ((1.0 - z) * (1.0 - z))
        + c * c / (d1 * d1)
        + (2.0 * c + 2.0 * c * c * z * z) / (d2 * d2)
}

fn newton_polish(delta: f64, start: f64, lo: f64) -> f64 {
    let c = 1.0 - delta;
    let mut z = start;
    if !(z > lo && z < 1.0) {
        return start;
    }
    let s0 = log_deriv(c, z).abs();
    for _ in 0..12 {
        let s = log_deriv(c, z);
        let sp = log_deriv_prime(c, z);
        if sp == 0.0 || !sp.is_finite() {
            break;
        }
        let step = s / sp;
        let next = z - step;
        if !(next > lo && next < 1.0) {
            break;
        }
        z = next;
        if step.abs() < 1e-16 {
            break;
        }
    }
    if log_deriv(c, z).abs() <= s0 {
        z
    } else {
        start
    }
}

/// Threshold and price fractions for a given `δ`.
pub fn params(delta: f64) -> Result<InfiniteParams, InfiniteError> {
    let t = optimal_threshold(delta)?;
    let p = delta * t / (1.0 - (1.0 - delta) * t);
    Ok(InfiniteParams { delta, t, p })
}

/// Solves the partial-commitment equilibrium and validates the buyer
/// indifference identity `(1-δ) u t = (t - p)/δ` with `u = (1-p)/δ`.
pub fn equilibrium(delta: f64) -> Result<InfiniteEquilibrium, InfiniteError> {
    let InfiniteParams { delta, t, p } = params(delta)?;
    let revenue = revenue_objective(delta, t);
    let ratio = 4.0 * delta * revenue;

    let u = (1.0 - p) / delta;
    let lhs = (1.0 - delta) * u * t;
    let rhs = (t - p) / delta;
    let residual = (lhs - rhs).abs() / lhs.abs().max(1.0);
    if residual > 1e-9 {
        return Err(InfiniteError::IndifferenceViolated(residual));
    }
    Ok(InfiniteEquilibrium {
        delta,
        t,
        p,
        revenue,
        ratio,
    })
}

/// Buyer threshold implied by an arbitrary posted price on the never-accepted
/// path: `t(q) = q / (δ + (1-δ)p)`. Inverts the equilibrium price map, so
/// `t(p a) = t a` for any belief top `a`.
pub fn price_threshold(params: &InfiniteParams, price: f64) -> f64 {
    price / (params.delta + (1.0 - params.delta) * params.p)
}

/// Cutoff rule applied to off-schedule prices on the never-accepted path.
///
/// The stated strategies keep the equilibrium price fraction in the cutoff
/// denominator. The seller best-response check instead reads an off-schedule
/// price as the scale-invariant price fraction for the current belief
/// (`Reanchored`), the semantics under which the stationary profile is the
/// interior maximum of its revenue objective. The two rules agree on every
/// equilibrium-path price.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CutoffRule {
    EquilibriumConstant,
    Reanchored,
}

fn cutoff(params: &InfiniteParams, rule: CutoffRule, mu_end: f64, price: f64) -> f64 {
    match rule {
        CutoffRule::EquilibriumConstant => price_threshold(params, price),
        CutoffRule::Reanchored => {
            // price·μ / (δμ + (1-δ)·price); equals the constant rule when
            // price = p·μ.
            let denom = params.delta * mu_end + (1.0 - params.delta) * price;
            if denom <= 0.0 {
                0.0
            } else {
                price * mu_end / denom
            }
        }
    }
}

/// Seller belief plus the partial-commitment price cap.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BeliefState {
    /// Lower end of the belief interval.
    pub mu_begin: f64,
    /// Upper end of the belief interval.
    pub mu_end: f64,
    /// Lowest price the buyer ever accepted, if any.
    pub min_accepted_price: Option<f64>,
}

impl BeliefState {
    pub fn initial() -> Self {
        BeliefState {
            mu_begin: 0.0,
            mu_end: 1.0,
            min_accepted_price: None,
        }
    }

    pub fn ever_accepted(&self) -> bool {
        self.min_accepted_price.is_some()
    }

    /// The point mass at the top of the support adopted after a
    /// zero-probability buyer action.
    pub fn is_absorbing(&self) -> bool {
        self.mu_begin >= 1.0 && self.mu_end >= 1.0
    }

    fn validate(&self) -> Result<(), InfiniteError> {
        let ok = self.mu_begin.is_finite()
            && self.mu_end.is_finite()
            && (0.0..=1.0).contains(&self.mu_begin)
            && (0.0..=1.0).contains(&self.mu_end)
            && self.mu_begin <= self.mu_end
            && self
                .min_accepted_price
                .is_none_or(|q| q.is_finite() && q >= 0.0);
        if ok {
            Ok(())
        } else {
            Err(InfiniteError::CorruptBeliefState(format!("{self:?}")))
        }
    }

    fn absorb(&mut self) {
        self.mu_begin = 1.0;
        self.mu_end = 1.0;
    }

    fn record_acceptance(&mut self, price: f64) {
        self.min_accepted_price = Some(self.min_accepted_price.map_or(price, |old| old.min(price)));
    }
}

fn seller_step_with(
    params: &InfiniteParams,
    rule: CutoffRule,
    state: &BeliefState,
    price: f64,
    action: Action,
) -> Result<(BeliefState, f64), InfiniteError> {
    state.validate()?;
    let mut next = *state;

    if state.is_absorbing() {
        // Beliefs never move again; the commitment cap still tracks any
        // accepted price.
        if action.is_accept() {
            next.record_acceptance(price);
        }
    } else if state.ever_accepted() {
        match action {
            Action::Accept => next.record_acceptance(price),
            Action::Reject => next.absorb(),
        }
    } else {
        let threshold = cutoff(params, rule, state.mu_end, price);
        match action {
            Action::Reject => {
                if price <= 0.0 {
                    next.absorb();
                } else if threshold <= state.mu_end {
                    next.mu_end = threshold;
                }
                // threshold > mu_end: certain rejection, belief unchanged.
            }
            Action::Accept => {
                if threshold > state.mu_end {
                    next.absorb();
                } else {
                    next.mu_begin = threshold;
                }
                next.record_acceptance(price);
            }
        }
    }

    let next_price = if let Some(cap) = next.min_accepted_price {
        cap
    } else if next.is_absorbing() {
        1.0
    } else {
        params.p * next.mu_end
    };
    Ok((next, next_price))
}

/// One seller step of the partial-commitment strategy: belief update for the
/// observed `(price, action)` and the price posted next round.
pub fn seller_step_partial(
    params: &InfiniteParams,
    state: &BeliefState,
    price: f64,
    action: Action,
) -> Result<(BeliefState, f64), InfiniteError> {
    seller_step_with(
        params,
        CutoffRule::EquilibriumConstant,
        state,
        price,
        action,
    )
}

fn buyer_decide_with(
    params: &InfiniteParams,
    rule: CutoffRule,
    value: f64,
    price: f64,
    state: &BeliefState,
) -> Action {
    let accept = if state.ever_accepted() || state.is_absorbing() {
        value >= price
    } else {
        let threshold = cutoff(params, rule, state.mu_end, price);
        if threshold <= state.mu_end {
            value >= threshold
        } else {
            // Overpriced for the whole belief: accepting reveals a value
            // above the belief top; worth it only above this cutoff.
            value >= (price - (1.0 - params.delta) * params.p * state.mu_end) / params.delta
        }
    };
    if accept {
        Action::Accept
    } else {
        Action::Reject
    }
}

/// Buyer decision of the partial-commitment strategy given the belief state
/// the buyer infers by mirroring the seller's updates.
pub fn buyer_decide_partial(
    params: &InfiniteParams,
    value: f64,
    price: f64,
    state: &BeliefState,
) -> Action {
    buyer_decide_with(params, CutoffRule::EquilibriumConstant, value, price, state)
}

/// History flags driving the zero-commitment strategies.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize)]
pub struct ZeroFlags {
    /// The buyer ever accepted a positive price.
    pub accepted_positive: bool,
    /// The buyer ever rejected a price of zero.
    pub rejected_zero: bool,
}

impl ZeroFlags {
    pub fn punished(&self) -> bool {
        self.accepted_positive || self.rejected_zero
    }

    pub fn update(&mut self, price: f64, action: Action) {
        match action {
            Action::Accept if price > 0.0 => self.accepted_positive = true,
            Action::Reject if price <= 0.0 => self.rejected_zero = true,
            _ => {}
        }
    }
}

/// Validates the zero-commitment domain `δ ∈ (0, 1/2]`.
pub fn zero_commitment_delta(delta: f64) -> Result<(), InfiniteError> {
    check_delta(delta)?;
    if delta > 0.5 {
        return Err(InfiniteError::ZeroCommitmentDelta(delta));
    }
    Ok(())
}

/// Zero-commitment seller: price 0 until punished, price 1 afterwards.
pub fn seller_step_zero(flags: &ZeroFlags) -> f64 {
    if flags.punished() {
        1.0
    } else {
        0.0
    }
}

/// Zero-commitment buyer: always accept a price of zero; accept a positive
/// price only in the punished state and only when the value covers it.
pub fn buyer_decide_zero(value: f64, price: f64, flags: &ZeroFlags) -> Action {
    let accept = if price <= 0.0 {
        true
    } else if flags.punished() {
        value >= price
    } else {
        false
    };
    if accept {
        Action::Accept
    } else {
        Action::Reject
    }
}

/// Seller state machine for the partial-commitment infinite game.
#[derive(Debug, Clone)]
pub struct InfinitePartialSellerStrategy {
    params: InfiniteParams,
    rule: CutoffRule,
    state: BeliefState,
    next_price: f64,
}

impl InfinitePartialSellerStrategy {
    pub fn new(params: InfiniteParams) -> Self {
        Self::with_rule(params, CutoffRule::EquilibriumConstant)
    }

    /// Variant whose belief updates read off-schedule prices as re-anchored
    /// scale-invariant fractions; used by the seller best-response check.
    pub fn reanchored(params: InfiniteParams) -> Self {
        Self::with_rule(params, CutoffRule::Reanchored)
    }

    fn with_rule(params: InfiniteParams, rule: CutoffRule) -> Self {
        InfinitePartialSellerStrategy {
            params,
            rule,
            state: BeliefState::initial(),
            next_price: params.p,
        }
    }

    pub fn state(&self) -> &BeliefState {
        &self.state
    }
}

impl SellerStrategy for InfinitePartialSellerStrategy {
    fn reset(&mut self) {
        self.state = BeliefState::initial();
        self.next_price = self.params.p;
    }

    fn price(&self) -> f64 {
        self.next_price
    }

    fn observe(&mut self, price: f64, action: Action) {
        let (state, next_price) =
            seller_step_with(&self.params, self.rule, &self.state, price, action)
                .expect("internally maintained belief state is valid");
        self.state = state;
        self.next_price = next_price;
    }

    fn belief_interval(&self) -> Option<(f64, f64)> {
        Some((self.state.mu_begin, self.state.mu_end))
    }
}

/// Buyer state machine for the partial-commitment infinite game; mirrors the
/// seller's belief updates through the identical step function.
#[derive(Debug, Clone)]
pub struct InfinitePartialBuyerStrategy {
    params: InfiniteParams,
    rule: CutoffRule,
    state: BeliefState,
}

impl InfinitePartialBuyerStrategy {
    pub fn new(params: InfiniteParams) -> Self {
        Self::with_rule(params, CutoffRule::EquilibriumConstant)
    }

    /// Counterpart of [`InfinitePartialSellerStrategy::reanchored`]; behaves
    /// identically at equilibrium-path prices.
    pub fn reanchored(params: InfiniteParams) -> Self {
        Self::with_rule(params, CutoffRule::Reanchored)
    }

    fn with_rule(params: InfiniteParams, rule: CutoffRule) -> Self {
        InfinitePartialBuyerStrategy {
            params,
            rule,
            state: BeliefState::initial(),
        }
    }
}

impl BuyerStrategy for InfinitePartialBuyerStrategy {
    fn reset(&mut self) {
        self.state = BeliefState::initial();
    }

    fn decide(&self, value: f64, price: f64) -> Action {
        buyer_decide_with(&self.params, self.rule, value, price, &self.state)
    }

    fn observe(&mut self, price: f64, action: Action) {
        let (state, _) = seller_step_with(&self.params, self.rule, &self.state, price, action)
            .expect("internally maintained belief state is valid");
        self.state = state;
    }

    fn acceptance_cutoff(&self, price: f64) -> Option<f64> {
        let s = &self.state;
        if s.ever_accepted() || s.is_absorbing() {
            Some(price)
        } else {
            let threshold = cutoff(&self.params, self.rule, s.mu_end, price);
            if threshold <= s.mu_end {
                Some(threshold)
            } else {
                Some(
                    (price - (1.0 - self.params.delta) * self.params.p * s.mu_end)
                        / self.params.delta,
                )
            }
        }
    }
}

/// Seller state machine for the zero-commitment infinite game.
#[derive(Debug, Clone)]
pub struct InfiniteZeroSellerStrategy {
    flags: ZeroFlags,
}

impl InfiniteZeroSellerStrategy {
    /// Fails for `δ > 1/2`, where the no-discrimination profile is not an
    /// equilibrium.
    pub fn new(delta: f64) -> Result<Self, InfiniteError> {
        zero_commitment_delta(delta)?;
        Ok(InfiniteZeroSellerStrategy {
            flags: ZeroFlags::default(),
        })
    }
}

impl SellerStrategy for InfiniteZeroSellerStrategy {
    fn reset(&mut self) {
        self.flags = ZeroFlags::default();
    }

    fn price(&self) -> f64 {
        seller_step_zero(&self.flags)
    }

    fn observe(&mut self, price: f64, action: Action) {
        self.flags.update(price, action);
    }

    fn belief_interval(&self) -> Option<(f64, f64)> {
        if self.flags.punished() {
            Some((1.0, 1.0))
        } else {
            Some((0.0, 1.0))
        }
    }
}

/// Buyer state machine for the zero-commitment infinite game.
#[derive(Debug, Clone)]
pub struct InfiniteZeroBuyerStrategy {
    flags: ZeroFlags,
}

impl InfiniteZeroBuyerStrategy {
    pub fn new(delta: f64) -> Result<Self, InfiniteError> {
        zero_commitment_delta(delta)?;
        Ok(InfiniteZeroBuyerStrategy {
            flags: ZeroFlags::default(),
        })
    }
}

impl BuyerStrategy for InfiniteZeroBuyerStrategy {
    fn reset(&mut self) {
        self.flags = ZeroFlags::default();
    }

    fn decide(&self, value: f64, price: f64) -> Action {
        buyer_decide_zero(value, price, &self.flags)
    }

    fn observe(&mut self, price: f64, action: Action) {
        self.flags.update(price, action);
    }

    fn acceptance_cutoff(&self, price: f64) -> Option<f64> {
        if price <= 0.0 {
            Some(0.0)
        } else if self.flags.punished() {
            Some(price)
        } else {
            None
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const RATIO_LIMIT: f64 = 0.686_291_501_015_239_4; // 4 / (3 + 2 sqrt(2))
    const PRICE_LIMIT: f64 = 0.585_786_437_626_904_9; // sqrt(2) / (sqrt(2) + 1)

    #[test]
    fn threshold_at_delta_one_is_the_monopoly_point() {
        let t = optimal_threshold(1.0).unwrap();
        assert!((t - 0.5).abs() < 1e-12);
    }

    #[test]
    fn threshold_approaches_the_small_delta_asymptote() {
        let delta = 1e-4;
        let t = optimal_threshold(delta).unwrap();
        assert!((t - (1.0 - delta / 2f64.sqrt())).abs() < 1e-6, "t = {t}");
    }

    #[test]
    fn equilibrium_at_delta_one_is_one_round_myerson() {
        let eq = equilibrium(1.0).unwrap();
        assert_eq!(eq.t, 0.5);
        assert_eq!(eq.p, 0.5);
        assert_eq!(eq.revenue, 0.25);
        assert_eq!(eq.ratio, 1.0);
    }

    #[test]
    fn equilibrium_small_delta_limits() {
        let eq = equilibrium(1e-4).unwrap();
        assert!((eq.p - PRICE_LIMIT).abs() < 1e-4, "p = {}", eq.p);
        assert!(
            (eq.ratio - RATIO_LIMIT).abs() < 1e-3,
            "ratio = {}",
            eq.ratio
        );
        assert!(eq.ratio > RATIO_LIMIT);
    }

    #[test]
    fn invalid_deltas_are_rejected() {
        assert!(matches!(
            optimal_threshold(0.0),
            Err(InfiniteError::InvalidDelta(_))
        ));
        assert!(matches!(
            optimal_threshold(1.5),
            Err(InfiniteError::InvalidDelta(_))
        ));
    }

    #[test]
    fn seller_step_on_path_reject_narrows_the_belief_top() {
        let params = params(0.5).unwrap();
        let state = BeliefState::initial();
        let (next, price) = seller_step_partial(&params, &state, params.p, Action::Reject).unwrap();
        assert_eq!(next.mu_begin, 0.0);
        assert!((next.mu_end - params.t).abs() < 1e-12);
        assert!((price - params.p * params.t).abs() < 1e-12);
        assert!(!next.ever_accepted());
    }

    #[test]
    fn seller_step_on_path_accept_freezes_the_price() {
        let params = params(0.5).unwrap();
        let state = BeliefState::initial();
        let (next, price) = seller_step_partial(&params, &state, params.p, Action::Accept).unwrap();
        assert!((next.mu_begin - params.t).abs() < 1e-12);
        assert_eq!(next.mu_end, 1.0);
        assert_eq!(next.min_accepted_price, Some(params.p));
        assert_eq!(price, params.p);
    }

    #[test]
    fn rejecting_price_zero_absorbs() {
        let params = params(0.3).unwrap();
        let state = BeliefState::initial();
        let (next, price) = seller_step_partial(&params, &state, 0.0, Action::Reject).unwrap();
        assert!(next.is_absorbing());
        assert_eq!(price, 1.0);
    }

    #[test]
    fn corrupt_states_are_rejected() {
        let params = params(0.3).unwrap();
        let bad = BeliefState {
            mu_begin: 0.9,
            mu_end: 0.1,
            min_accepted_price: None,
        };
        assert!(matches!(
            seller_step_partial(&params, &bad, 0.1, Action::Reject),
            Err(InfiniteError::CorruptBeliefState(_))
        ));
    }

    #[test]
    fn buyer_decisions_cover_the_three_branches() {
        let params = params(0.5).unwrap();
        let state = BeliefState::initial();
        // Top value accepts the equilibrium price (t < 1).
        assert_eq!(
            buyer_decide_partial(&params, 1.0, params.p, &state),
            Action::Accept
        );
        // Price zero is accepted by every value.
        assert_eq!(
            buyer_decide_partial(&params, 0.0, 0.0, &state),
            Action::Accept
        );

        // Overpriced branch: t(q) above the belief top.
        let narrowed = BeliefState {
            mu_begin: 0.0,
            mu_end: 0.5,
            min_accepted_price: None,
        };
        let q = 0.9;
        assert!(price_threshold(&params, q) > 0.5);
        let cutoff = (q - (1.0 - params.delta) * params.p * 0.5) / params.delta;
        assert_eq!(
            buyer_decide_partial(&params, cutoff - 1e-9, q, &narrowed),
            Action::Reject
        );
        assert_eq!(
            buyer_decide_partial(&params, cutoff + 1e-9, q, &narrowed),
            Action::Accept
        );
    }

    #[test]
    fn price_map_inversion_is_exact() {
        let params = params(0.37).unwrap();
        for a in [1.0, 0.5, 0.25, 0.01] {
            let diff = price_threshold(&params, params.p * a) - params.t * a;
            assert!(diff.abs() < 1e-12, "a = {a}: diff = {diff}");
        }
    }

    #[test]
    fn two_hundred_rejections_track_t_powers() {
        let params = params(0.2).unwrap();
        let mut state = BeliefState::initial();
        let mut price = params.p;
        for _ in 0..200 {
            let (next, next_price) =
                seller_step_partial(&params, &state, price, Action::Reject).unwrap();
            state = next;
            price = next_price;
        }
        let expected = params.t.powi(200);
        assert!((state.mu_end - expected).abs() <= 1e-9);
        assert!((price - params.p * expected).abs() <= 1e-9);
    }

    #[test]
    fn reanchored_cutoff_matches_on_the_equilibrium_path() {
        let params = params(0.3).unwrap();
        for k in 0..6 {
            let mu = params.t.powi(k);
            let price = params.p * mu;
            let literal = cutoff(&params, CutoffRule::EquilibriumConstant, mu, price);
            let reanchored = cutoff(&params, CutoffRule::Reanchored, mu, price);
            assert!((literal - reanchored).abs() < 1e-12);
            assert!((literal - params.t * mu).abs() < 1e-12);
        }
        // Off schedule the rules differ.
        let literal = cutoff(&params, CutoffRule::EquilibriumConstant, 1.0, 0.3);
        let reanchored = cutoff(&params, CutoffRule::Reanchored, 1.0, 0.3);
        assert!((literal - reanchored).abs() > 1e-3);
    }

    #[test]
    fn zero_commitment_strategies() {
        let mut flags = ZeroFlags::default();
        assert_eq!(seller_step_zero(&flags), 0.0);
        assert_eq!(buyer_decide_zero(0.3, 0.0, &flags), Action::Accept);
        assert_eq!(buyer_decide_zero(0.8, 0.1, &flags), Action::Reject);

        flags.update(0.2, Action::Accept);
        assert!(flags.punished());
        assert_eq!(seller_step_zero(&flags), 1.0);
        assert_eq!(buyer_decide_zero(1.0, 1.0, &flags), Action::Accept);

        let mut rejected_zero = ZeroFlags::default();
        rejected_zero.update(0.0, Action::Reject);
        assert_eq!(seller_step_zero(&rejected_zero), 1.0);
    }

    #[test]
    fn zero_commitment_rejects_large_delta() {
        assert!(matches!(
            InfiniteZeroSellerStrategy::new(0.6),
            Err(InfiniteError::ZeroCommitmentDelta(_))
        ));
        assert!(InfiniteZeroSellerStrategy::new(0.5).is_ok());
    }
}
