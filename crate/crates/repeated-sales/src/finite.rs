//! Finite-horizon games: the threshold-equilibrium existence test for the
//! no-commitment n-round game, and the partial-commitment revenue recursion
//! for uniform and power-law priors together with its large-n asymptotics.
//!
//! Indexing convention: the subscript counts rounds *remaining*, so row `n`
//! describes the first round of the n-round game and row 1 the last round.
//! Earlier modules number rounds forward; this one follows the recursion.
//!
//! For the uniform prior the recursion is closed-form. Restricting to `[0, t]`
//! rescales the game, so with `a = n - u_{n-1}` the first round of the
//! n-round game has
//!
//! ```text
//! t_n = a / (2 (a - R_{n-1}))          p_n = a^2 / (2 n (a - R_{n-1}))
//! R_n = a^2 / (4 (a - R_{n-1}))        u_n = n (1 - p_n)
//! ```
//!
//! and the revenue alone obeys `R_n = (1 + 2 R_{n-1})^2 / (4 (1 + R_{n-1}))`,
//! carried internally in the shifted variable `V = R + 1` where it is a clean
//! `V += 1/(4V)`. Power laws share the scale invariance; their per-round
//! objective `R_{m-1} t^{k+2} + (1 - t^{k+1}) t (m - u_{m-1})` is maximized
//! numerically each round.

use std::sync::Arc;

use serde::Serialize;

use crate::dist::ValueDistribution;
use crate::search;
use crate::sim::{BuyerStrategy, SellerStrategy};
use crate::two_round::{self, TwoRoundError};
use crate::Action;

/// One round of the partial-commitment recursion, indexed by rounds
/// remaining.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct FiniteRecursionRow {
    /// Rounds remaining.
    pub n: u32,
    /// First-round price `p_n`.
    pub price: f64,
    /// First-round acceptance threshold `t_n`.
    pub threshold: f64,
    /// Expected total revenue `R_n`.
    pub revenue: f64,
    /// Utility `u_n` of the top-value buyer.
    pub top_utility: f64,
}

/// Rows 1..n of the uniform(0,1) partial-commitment recursion (closed form).
pub fn solve_partial_uniform(n: u32) -> Vec<FiniteRecursionRow> {
    assert!(n >= 1);
    let mut rows = Vec::with_capacity(n as usize);
    let mut revenue_prev = 0.0;
    let mut utility_prev = 0.0;
    for m in 1..=n {
        let mf = m as f64;
        let a = mf - utility_prev;
        let d = a - revenue_prev;
        let threshold = a / (2.0 * d);
        let price = a * a / (2.0 * mf * d);
        let revenue = a * a / (4.0 * d);
        let top_utility = mf * (1.0 - price);
        rows.push(FiniteRecursionRow {
            n: m,
            price,
            threshold,
            revenue,
            top_utility,
        });
        revenue_prev = revenue;
        utility_prev = top_utility;
    }
    rows
}

/// Iterator over `(n, R_n)` from the scalar recursion, carried in `V = R + 1`.
///
/// Independent of [`solve_partial_uniform`]; the two must agree.
#[derive(Debug, Clone)]
pub struct ScalarRecursion {
    v: f64,
    n: u32,
}

impl ScalarRecursion {
    pub fn new() -> Self {
        ScalarRecursion { v: 1.25, n: 0 }
    }
}

impl Default for ScalarRecursion {
    fn default() -> Self {
        Self::new()
    }
}

impl Iterator for ScalarRecursion {
    type Item = (u32, f64);

    fn next(&mut self) -> Option<(u32, f64)> {
        self.n += 1;
        if self.n > 1 {
            self.v += 0.25 / self.v;
        }
        Some((self.n, self.v - 1.0))
    }
}

/// `R_n` for uniform(0,1) from the scalar recursion.
pub fn scalar_revenue(n: u32) -> f64 {
    assert!(n >= 1);
    ScalarRecursion::new()
        .nth(n as usize - 1)
        .expect("recursion is infinite")
        .1
}

/// The asymptotic residual `V_n^2 - n/2 - ln(n)/8` with `V_n = R_n + 1`.
///
/// Bounded (and converging) over the whole range of interest; the leading
/// behaviour `R_n ~ sqrt(n/2 + ln(n)/8)` follows.
pub fn asymptotic_gap(n: u32) -> f64 {
    let v = scalar_revenue(n) + 1.0;
    v * v - n as f64 / 2.0 - (n as f64).ln() / 8.0
}

/// Rows 1..n of the partial-commitment recursion for the `power_law(k)`
/// prior, maximizing each round's revenue objective numerically.
///
/// `k = 0` reproduces [`solve_partial_uniform`].
pub fn solve_partial_power_law(n: u32, k: u32) -> Vec<FiniteRecursionRow> {
    assert!(n >= 1);
    let e2 = (k + 2) as i32; // exponent of t^{k+2}
    let kf = k as f64;
    let mut rows = Vec::with_capacity(n as usize);
    let mut revenue_prev = 0.0;
    let mut utility_prev = 0.0;
    for m in 1..=n {
        let mf = m as f64;
        let a = mf - utility_prev;
        let objective = move |t: f64| {
            let r = revenue_prev;
            r * t.powi(e2) + a * (t - t.powi(e2))
        };
        let scan = search::maximize(
            objective,
            0.0,
            1.0,
            search::DEFAULT_GRID,
            search::DEFAULT_TOL,
        );
        // The objective's derivative a + (k+2) t^{k+1} (R_{m-1} - a) has a
        // unique positive root; prefer its closed form when it agrees with
        // the scan.
        let mut threshold = scan.x;
        if a > revenue_prev {
            let root = (a / ((kf + 2.0) * (a - revenue_prev))).powf(1.0 / (kf + 1.0));
            if root > 0.0 && root < 1.0 && (root - scan.x).abs() < 1e-6 {
                threshold = root;
            }
        }
        let price = threshold * a / mf;
        let revenue = objective(threshold);
        let top_utility = mf * (1.0 - price);
        rows.push(FiniteRecursionRow {
            n: m,
            price,
            threshold,
            revenue,
            top_utility,
        });
        revenue_prev = revenue;
        utility_prev = top_utility;
    }
    rows
}

/// Existence report for n-round no-commitment threshold equilibria.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ThresholdExistenceReport {
    pub exists: bool,
    /// Round prices of the equilibrium when it exists: the bottom of the
    /// support for the first `n - 1` rounds, then the monopoly price. For
    /// `n <= 2` these are the solved one- or two-round prices (reject path).
    pub equilibrium_prices: Vec<f64>,
    /// First-round price of the two-round game, the existence criterion.
    pub two_round_p1: f64,
    /// Set when the bottom price ties the two-round objective within
    /// tolerance while the deterministic selection picked a larger `p1`:
    /// existence then depends on the argmax selection.
    pub lower_price_ties_argmax: bool,
}

/// Tests whether the n-round no-commitment game admits a pure threshold
/// equilibrium: for `n > 2` it does exactly when the two-round opening price
/// collapses to the bottom of the support.
pub fn threshold_pbe_exists(
    dist: &ValueDistribution,
    n: u32,
) -> Result<ThresholdExistenceReport, TwoRoundError> {
    assert!(n >= 1);
    let eq = two_round::solve_two_round(dist)?;
    let low = dist.low();
    let (p_star, _) = dist.monopoly_price();
    match n {
        1 => Ok(ThresholdExistenceReport {
            exists: true,
            equilibrium_prices: vec![p_star],
            two_round_p1: eq.p1,
            lower_price_ties_argmax: false,
        }),
        2 => Ok(ThresholdExistenceReport {
            exists: true,
            equilibrium_prices: vec![eq.p1, eq.p20],
            two_round_p1: eq.p1,
            lower_price_ties_argmax: false,
        }),
        _ => {
            let exists = eq.p1_equals_lower_support;
            let ties = if exists {
                false
            } else {
                two_round::round_one_objective(dist, low)? >= eq.revenue - 1e-9
            };
            let equilibrium_prices = if exists {
                let mut prices = vec![low; n as usize - 1];
                prices.push(p_star);
                prices
            } else {
                Vec::new()
            };
            Ok(ThresholdExistenceReport {
                exists,
                equilibrium_prices,
                two_round_p1: eq.p1,
                lower_price_ties_argmax: ties,
            })
        }
    }
}

/// Shared state machine for the partial-commitment finite game on the
/// power-law prior: rounds remaining, current belief scale (the prior
/// restricted to `[0, scale]`), belief interval and the commitment cap.
#[derive(Debug, Clone)]
struct FiniteState {
    remaining: u32,
    scale: f64,
    belief: (f64, f64),
    min_accepted: Option<f64>,
}

#[derive(Debug, Clone)]
struct FiniteProfile {
    rows: Arc<Vec<FiniteRecursionRow>>,
    horizon: u32,
}

impl FiniteProfile {
    /// `a_m = m - u_{m-1}` for the round with `m` rounds remaining.
    fn a(&self, m: u32) -> f64 {
        let u_prev = if m >= 2 {
            self.rows[m as usize - 2].top_utility
        } else {
            0.0
        };
        m as f64 - u_prev
    }

    fn row(&self, m: u32) -> &FiniteRecursionRow {
        &self.rows[m as usize - 1]
    }

    fn initial(&self) -> FiniteState {
        FiniteState {
            remaining: self.horizon,
            scale: 1.0,
            belief: (0.0, 1.0),
            min_accepted: None,
        }
    }

    fn price(&self, s: &FiniteState) -> f64 {
        if let Some(cap) = s.min_accepted {
            return cap;
        }
        if s.remaining == 0 {
            return 1.0;
        }
        s.scale * self.row(s.remaining).price
    }

    /// Threshold the buyer applies at `price` with `m` rounds remaining on
    /// the never-accepted path: the indifference `m (t - q) = t u_{m-1}`
    /// gives `t = m q / a_m`, linear in the price.
    fn buyer_threshold(&self, s: &FiniteState, price: f64) -> f64 {
        let m = s.remaining;
        price * m as f64 / self.a(m)
    }

    fn decide(&self, s: &FiniteState, value: f64, price: f64) -> Action {
        let accept = if s.min_accepted.is_some() || s.belief.0 >= 1.0 || s.remaining == 0 {
            value >= price
        } else {
            value >= self.buyer_threshold(s, price)
        };
        if accept {
            Action::Accept
        } else {
            Action::Reject
        }
    }

    fn step(&self, s: &mut FiniteState, price: f64, action: Action) {
        if s.remaining == 0 {
            return;
        }
        let threshold = self.buyer_threshold(s, price);
        match (s.min_accepted, action) {
            (Some(cap), Action::Accept) => {
                s.min_accepted = Some(cap.min(price));
            }
            (Some(_), Action::Reject) => {
                // Zero-probability once a purchase happened: point mass at
                // the top; the commitment cap still pins the price.
                s.belief = (1.0, 1.0);
            }
            (None, Action::Accept) => {
                if threshold > s.scale {
                    s.belief = (1.0, 1.0);
                } else {
                    s.belief = (threshold, s.scale);
                }
                s.min_accepted = Some(price);
            }
            (None, Action::Reject) => {
                if threshold < s.scale {
                    s.scale = threshold.max(0.0);
                    s.belief = (0.0, s.scale);
                }
            }
        }
        s.remaining -= 1;
    }
}

/// Seller for the finite partial-commitment game on `power_law(k)`.
#[derive(Debug, Clone)]
pub struct FinitePartialSellerStrategy {
    profile: FiniteProfile,
    state: FiniteState,
}

/// Buyer for the finite partial-commitment game on `power_law(k)`.
#[derive(Debug, Clone)]
pub struct FinitePartialBuyerStrategy {
    profile: FiniteProfile,
    state: FiniteState,
}

/// Builds the equilibrium strategy pair for the n-round partial-commitment
/// game on the `power_law(k)` prior.
pub fn finite_partial_strategies(
    n: u32,
    k: u32,
) -> (FinitePartialSellerStrategy, FinitePartialBuyerStrategy) {
    let rows = Arc::new(solve_partial_power_law(n, k));
    let profile = FiniteProfile { rows, horizon: n };
    let state = profile.initial();
    (
        FinitePartialSellerStrategy {
            profile: profile.clone(),
            state: state.clone(),
        },
        FinitePartialBuyerStrategy { profile, state },
    )
}

impl SellerStrategy for FinitePartialSellerStrategy {
    fn reset(&mut self) {
        self.state = self.profile.initial();
    }

    fn price(&self) -> f64 {
        self.profile.price(&self.state)
    }

    fn observe(&mut self, price: f64, action: Action) {
        let profile = self.profile.clone();
        profile.step(&mut self.state, price, action);
    }

    fn belief_interval(&self) -> Option<(f64, f64)> {
        Some(self.state.belief)
    }
}

impl BuyerStrategy for FinitePartialBuyerStrategy {
    fn reset(&mut self) {
        self.state = self.profile.initial();
    }

    fn decide(&self, value: f64, price: f64) -> Action {
        self.profile.decide(&self.state, value, price)
    }

    fn observe(&mut self, price: f64, action: Action) {
        let profile = self.profile.clone();
        profile.step(&mut self.state, price, action);
    }

    fn acceptance_cutoff(&self, price: f64) -> Option<f64> {
        let s = &self.state;
        if s.min_accepted.is_some() || s.belief.0 >= 1.0 || s.remaining == 0 {
            Some(price)
        } else {
            Some(self.profile.buyer_threshold(s, price))
        }
    }
}

/// Acceptance thresholds along the all-reject path, in value space: the
/// cumulative products `t_n, t_n t_{n-1}, ...`. These are the jump points of
/// realized revenue as a function of the buyer value.
pub fn finite_partial_breakpoints(rows: &[FiniteRecursionRow]) -> Vec<f64> {
    let n = rows.len();
    let mut scale = 1.0;
    let mut points = Vec::with_capacity(n);
    for m in (1..=n).rev() {
        scale *= rows[m - 1].threshold;
        points.push(scale);
    }
    points
}
