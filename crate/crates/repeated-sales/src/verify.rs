//! Numerical ε-equilibrium certification.
//!
//! Three checks certify a strategy profile:
//!
//! - buyer best response: at every on-path history class and value-grid
//!   point, all accept/reject deviations over the next `L` rounds (followed
//!   by equilibrium continuation) are enumerated and the best utility gain
//!   recorded;
//! - seller best response: at every reachable belief state the next posted
//!   prices are replaced by grid values held for up to `D` rounds, play then
//!   reverts to the stated strategy and belief updates, and the conditional
//!   revenue change is measured;
//! - Bayes consistency: along every action branch, the seller's belief
//!   interval must coincide with the exact set of values whose equilibrium
//!   play produces that branch, and zero-probability branches must land on
//!   the absorbing point mass at the top of the support.
//!
//! Verdicts are `pass(ε)` only net of an explicit, printed error budget
//! (grid resolution + truncation tail + quadrature floor); failures carry a
//! witness that replays through the simulator to the reported gain.
//!
//! Histories are classified by belief state rather than enumerated raw: the
//! certified strategies are Markovian, and deeper all-reject states are
//! scaled copies of shallower ones, so a bounded prefix depth covers the
//! state space. Deviations deeper than the window are dominated by the
//! geometric structure (waiting longer only scales the one-round comparison),
//! which the window already brute-forces.

use serde::Serialize;
use thiserror::Error;

use crate::dist::ValueDistribution;
use crate::exec;
use crate::games::{Game, Perturbation};
use crate::sim::{
    playout_revenue_from, playout_seeded, BuyerStrategy, Regime, SellerStrategy, SimError,
};
use crate::Action;

#[derive(Debug, Error)]
pub enum VerifyError {
    #[error(transparent)]
    Sim(#[from] SimError),
    #[error("verification setup failed: {0}")]
    Setup(String),
}

/// Explicit error budget accompanying a verdict.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ErrorBudget {
    /// Resolution of the value or price grid times the payoff Lipschitz bound.
    pub grid_resolution: f64,
    /// Discounted mass beyond the playout truncation.
    pub truncation_tail: f64,
    /// Quadrature floor of the conditional-revenue integrals.
    pub quadrature: f64,
}

impl ErrorBudget {
    pub fn total(&self) -> f64 {
        self.grid_resolution + self.truncation_tail + self.quadrature
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Role {
    Buyer,
    Seller,
}

/// Replayable evidence for a failed check.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "role", rename_all = "snake_case")]
pub enum Witness {
    Buyer {
        value: f64,
        prefix: Vec<Action>,
        deviation: Vec<Action>,
        equilibrium_utility: f64,
        deviation_utility: f64,
    },
    Seller {
        prefix: Vec<Action>,
        deviation_prices: Vec<f64>,
        equilibrium_revenue: f64,
        deviation_revenue: f64,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "verdict", rename_all = "snake_case")]
pub enum Verdict {
    Pass { epsilon: f64 },
    Fail { witness: Witness },
}

/// Outcome of one best-response check.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DeviationReport {
    pub role: Role,
    pub game: String,
    /// Description of the history classes examined.
    pub history_class: String,
    /// Description of the deviation family searched.
    pub deviation: String,
    /// Best gain found (non-negative by construction).
    pub gain: f64,
    pub budget: ErrorBudget,
    pub verdict: Verdict,
}

impl DeviationReport {
    pub fn passed(&self) -> bool {
        matches!(self.verdict, Verdict::Pass { .. })
    }
}

/// Settings for [`check_buyer_best_response`].
#[derive(Debug, Clone, Copy)]
pub struct BuyerCheckConfig {
    /// Number of value-grid points (>= 2).
    pub value_grid: usize,
    /// Deviation window length L: all 2^L action patterns are tried.
    pub lookahead: usize,
    pub epsilon: f64,
    /// On-path history classes up to this many rounds deep.
    pub prefix_depth: usize,
    /// Truncation tolerance handed to the discounted regime.
    pub regime_tol: f64,
}

impl Default for BuyerCheckConfig {
    fn default() -> Self {
        BuyerCheckConfig {
            value_grid: 1000,
            lookahead: 3,
            epsilon: 1e-4,
            prefix_depth: 8,
            regime_tol: 1e-6,
        }
    }
}

/// Settings for [`check_seller_best_response`].
#[derive(Debug, Clone, Copy)]
pub struct SellerCheckConfig {
    /// Number of deviation prices per state (>= 2).
    pub price_grid: usize,
    /// Deviation prices are held for 1..=depth rounds.
    pub depth: usize,
    pub epsilon: f64,
    pub prefix_depth: usize,
    pub regime_tol: f64,
}

impl Default for SellerCheckConfig {
    fn default() -> Self {
        SellerCheckConfig {
            price_grid: 2000,
            depth: 3,
            epsilon: 1e-4,
            prefix_depth: 3,
            regime_tol: 1e-6,
        }
    }
}

/// Forces a scripted action window, then delegates to the wrapped buyer. The
/// wrapped buyer's belief tracking always follows the realized actions.
#[derive(Debug, Clone)]
struct ForcedBuyer<B> {
    inner: B,
    script: Vec<Action>,
    cursor: usize,
}

impl<B: BuyerStrategy> ForcedBuyer<B> {
    fn new(inner: B, script: Vec<Action>) -> Self {
        ForcedBuyer {
            inner,
            script,
            cursor: 0,
        }
    }
}

impl<B: BuyerStrategy> BuyerStrategy for ForcedBuyer<B> {
    fn reset(&mut self) {
        self.inner.reset();
        self.cursor = 0;
    }

    fn decide(&self, value: f64, price: f64) -> Action {
        match self.script.get(self.cursor) {
            Some(forced) => *forced,
            None => self.inner.decide(value, price),
        }
    }

    fn observe(&mut self, price: f64, action: Action) {
        self.inner.observe(price, action);
        self.cursor += 1;
    }

    fn acceptance_cutoff(&self, price: f64) -> Option<f64> {
        self.inner.acceptance_cutoff(price)
    }
}

/// Overrides the posted price in selected rounds, then delegates. The
/// wrapped seller observes the price actually posted, so its belief updates
/// follow the stated rules along the deviated path.
#[derive(Debug, Clone)]
struct OverrideSeller<S> {
    inner: S,
    overrides: Vec<Option<f64>>,
    cursor: usize,
}

impl<S: SellerStrategy> OverrideSeller<S> {
    fn new(inner: S, overrides: Vec<Option<f64>>) -> Self {
        OverrideSeller {
            inner,
            overrides,
            cursor: 0,
        }
    }
}

impl<S: SellerStrategy> SellerStrategy for OverrideSeller<S> {
    fn reset(&mut self) {
        self.inner.reset();
        self.cursor = 0;
    }

    fn price(&self) -> f64 {
        match self.overrides.get(self.cursor).copied().flatten() {
            Some(q) => q,
            None => self.inner.price(),
        }
    }

    fn observe(&mut self, price: f64, action: Action) {
        self.inner.observe(price, action);
        self.cursor += 1;
    }

    fn belief_interval(&self) -> Option<(f64, f64)> {
        self.inner.belief_interval()
    }
}

fn actions_from_mask(mask: u32, len: usize) -> Vec<Action> {
    (0..len)
        .map(|j| {
            if (mask >> j) & 1 == 1 {
                Action::Accept
            } else {
                Action::Reject
            }
        })
        .collect()
}

fn describe_prefix(prefix: &[Action]) -> String {
    if prefix.is_empty() {
        "root".to_string()
    } else {
        prefix
            .iter()
            .map(|a| if a.is_accept() { 'A' } else { 'R' })
            .collect()
    }
}

/// Buyer best response over a value grid with exhaustive deviation windows.
pub fn check_buyer_best_response(
    game: &Game,
    perturb: Option<Perturbation>,
    cfg: &BuyerCheckConfig,
) -> Result<DeviationReport, VerifyError> {
    let regime = game.regime(cfg.regime_tol);
    let horizon = regime
        .horizon()
        .ok_or_else(|| VerifyError::Setup("regime must be truncated".into()))?
        as usize;
    let depth = cfg.prefix_depth.min(horizon.saturating_sub(1));
    let prefixes = game.on_path_prefixes(depth);
    let (seller0, buyer0) = game.strategies(perturb);
    let dist = game.dist();
    let (lo, hi) = (dist.low(), dist.high());
    let grid = cfg.value_grid.max(2);
    let spacing = (hi - lo) / (grid - 1) as f64;

    let mut best: Option<(f64, Witness)> = None;
    for prefix in &prefixes {
        let window = cfg.lookahead.min(horizon - prefix.len());
        if window == 0 {
            continue;
        }
        let per_value = exec::map_indexed(grid, |i| -> Result<(f64, u32, f64, f64), SimError> {
            let v = lo + spacing * i as f64;
            let mut seller = seller0.clone();
            let mut buyer = ForcedBuyer::new(buyer0.clone(), prefix.clone());
            let eq_utility =
                playout_seeded(&mut seller, &mut buyer, v, &regime, 0, 0)?.buyer_utility;

            let mut best_gain = f64::NEG_INFINITY;
            let mut best_mask = 0u32;
            let mut best_utility = 0.0;
            for mask in 0..(1u32 << window) {
                let mut script = prefix.clone();
                script.extend(actions_from_mask(mask, window));
                let mut seller = seller0.clone();
                let mut buyer = ForcedBuyer::new(buyer0.clone(), script);
                let utility =
                    playout_seeded(&mut seller, &mut buyer, v, &regime, 0, 0)?.buyer_utility;
                let gain = utility - eq_utility;
                if gain > best_gain {
                    best_gain = gain;
                    best_mask = mask;
                    best_utility = utility;
                }
            }
            Ok((best_gain, best_mask, eq_utility, best_utility))
        });
        for (i, r) in per_value.into_iter().enumerate() {
            let (gain, mask, eq_utility, utility) = r?;
            if best.as_ref().is_none_or(|(g, _)| gain > *g) {
                best = Some((
                    gain,
                    Witness::Buyer {
                        value: lo + spacing * i as f64,
                        prefix: prefix.clone(),
                        deviation: actions_from_mask(mask, window),
                        equilibrium_utility: eq_utility,
                        deviation_utility: utility,
                    },
                ));
            }
        }
    }

    let (gain, witness) = best.ok_or_else(|| VerifyError::Setup("no history class".into()))?;
    let budget = ErrorBudget {
        grid_resolution: 2.0 * spacing * regime.weight_sum(),
        truncation_tail: 2.0 * regime.tail_bound(),
        quadrature: 0.0,
    };
    let verdict = if gain <= cfg.epsilon + budget.total() {
        Verdict::Pass {
            epsilon: cfg.epsilon,
        }
    } else {
        Verdict::Fail { witness }
    };
    Ok(DeviationReport {
        role: Role::Buyer,
        game: game.name().to_string(),
        history_class: format!("on-path prefixes to depth {depth}"),
        deviation: format!(
            "all 2^{} accept/reject windows on a {}-point value grid",
            cfg.lookahead.min(horizon),
            grid
        ),
        gain,
        budget,
        verdict,
    })
}

/// Integrates a monotone step function `f` against the restricted prior on
/// `[lo, hi]` by adaptive bisection of its jumps. `seeds` are known or
/// suspected jump locations used as initial panel boundaries: with exact
/// seeds every panel is flat and no splitting occurs, but correctness never
/// depends on them. Returns the integral and a bound on the mass left
/// unresolved at the width floor.
fn integrate_step<F>(
    f: &F,
    dist: &ValueDistribution,
    lo: f64,
    hi: f64,
    init_panels: usize,
    seeds: &[f64],
) -> Result<(f64, f64), SimError>
where
    F: Fn(f64) -> Result<f64, SimError> + Sync + Send,
{
    if hi - lo <= 0.0 {
        return Ok((0.0, 0.0));
    }
    let mass_total = dist.cdf(hi) - dist.cdf(lo);
    if mass_total <= 0.0 {
        return Ok((0.0, 0.0));
    }
    let probe = 1e-9 * (hi - lo).max(1e-9);
    let n = init_panels.max(1);
    let mut edges: Vec<f64> = (0..=n)
        .map(|i| lo + (hi - lo) * i as f64 / n as f64)
        .collect();
    edges.extend(
        seeds
            .iter()
            .copied()
            .filter(|s| *s > lo + 2.0 * probe && *s < hi - 2.0 * probe),
    );
    edges.sort_by(f64::total_cmp);
    edges.dedup_by(|a, b| (*a - *b).abs() < 2.0 * probe);
    let n = edges.len() - 1;

    let panels = exec::map_indexed(n, |i| -> Result<(f64, f64), SimError> {
        let (a, b) = (edges[i], edges[i + 1]);
        let fa = f((a + probe).min(hi))?;
        let fb = f((b - probe).max(lo))?;
        let mut stack = vec![(a, b, fa, fb)];
        let mut total = 0.0;
        let mut uncertainty = 0.0;
        while let Some((a, b, fa, fb)) = stack.pop() {
            let mass = dist.cdf(b) - dist.cdf(a);
            if mass <= 0.0 {
                continue;
            }
            let flat = (fa - fb).abs() <= 1e-11 * (1.0 + fa.abs().max(fb.abs()));
            if flat {
                total += 0.5 * (fa + fb) * mass;
            } else if b - a <= 4.0 * probe {
                total += 0.5 * (fa + fb) * mass;
                uncertainty += (fa - fb).abs() * mass;
            } else {
                let mid = 0.5 * (a + b);
                let f_left = f(mid - probe)?;
                let f_right = f(mid + probe)?;
                stack.push((a, mid, fa, f_left));
                stack.push((mid, b, f_right, fb));
            }
        }
        Ok((total, uncertainty))
    });

    let mut total = 0.0;
    let mut uncertainty = 0.0;
    for p in panels {
        let (t, u) = p?;
        total += t;
        uncertainty += u;
    }
    Ok((total / mass_total, uncertainty / mass_total))
}

fn round_weight(regime: &Regime, round: usize) -> f64 {
    match regime {
        Regime::FixedHorizon { .. } | Regime::GeometricStopping { .. } => 1.0,
        Regime::Discounted { delta, .. } => (1.0 - delta).powi(round as i32 - 1),
    }
}

/// Conditional revenue (normalized to `start_round` weight units) of playing
/// `overrides` after the forced `prefix`, integrated over the belief interval
/// `(mu_begin, mu_end)`. The buyer's acceptance cutoffs along the all-reject
/// continuation seed the integrator's panel boundaries.
#[allow(clippy::too_many_arguments)]
fn conditional_deviation_revenue<S, B>(
    seller0: &S,
    buyer0: &B,
    prefix: &[Action],
    overrides: &[Option<f64>],
    regime: &Regime,
    dist: &ValueDistribution,
    (mu_begin, mu_end): (f64, f64),
    horizon: usize,
) -> Result<(f64, f64), SimError>
where
    S: SellerStrategy + Clone + Send + Sync,
    B: BuyerStrategy + Clone + Send + Sync,
{
    let start_round = prefix.len() + 1;
    let norm = round_weight(regime, start_round);

    let seed_rounds = horizon.min(prefix.len() + 400);
    let mut script = prefix.to_vec();
    script.extend(std::iter::repeat_n(
        Action::Reject,
        seed_rounds.saturating_sub(prefix.len()),
    ));
    let mut seller = OverrideSeller::new(seller0.clone(), overrides.to_vec());
    let mut buyer = ForcedBuyer::new(buyer0.clone(), script);
    seller.reset();
    buyer.reset();
    let mut seeds = Vec::new();
    for round in 1..=seed_rounds {
        let price = seller.price();
        if !price.is_finite() || price < 0.0 {
            return Err(SimError::InvalidPrice {
                round: round as u32,
                price,
            });
        }
        if round >= start_round {
            if let Some(c) = buyer.acceptance_cutoff(price) {
                if c > mu_begin && c < mu_end {
                    seeds.push(c);
                } else if c <= mu_begin {
                    // Cutoffs only shrink from here on.
                    break;
                }
            }
        }
        let action = buyer.decide(0.0, price);
        seller.observe(price, action);
        buyer.observe(price, action);
    }

    let rev = |v: f64| -> Result<f64, SimError> {
        let mut seller = OverrideSeller::new(seller0.clone(), overrides.to_vec());
        let mut buyer = ForcedBuyer::new(buyer0.clone(), prefix.to_vec());
        let revenue = playout_revenue_from(&mut seller, &mut buyer, v, regime, start_round as u32)?;
        Ok(revenue / norm)
    };
    integrate_step(&rev, dist, mu_begin, mu_end, 16, &seeds)
}

/// Seller best response by grid deviations held for up to `depth` rounds at
/// each reachable belief state, compared in conditional revenue.
pub fn check_seller_best_response(
    game: &Game,
    perturb: Option<Perturbation>,
    cfg: &SellerCheckConfig,
) -> Result<DeviationReport, VerifyError> {
    let regime = game.regime(cfg.regime_tol);
    let horizon = regime
        .horizon()
        .ok_or_else(|| VerifyError::Setup("regime must be truncated".into()))?
        as usize;
    let depth = cfg.prefix_depth.min(horizon.saturating_sub(1));
    let prefixes = game.on_path_prefixes(depth);
    let (seller0, buyer0) = game.deviation_strategies(perturb);
    let dist = game.dist();
    let grid = cfg.price_grid.max(2);

    let mut best: Option<(f64, Witness)> = None;
    let mut worst_quadrature = 0.0f64;
    for prefix in &prefixes {
        if prefix.len() >= horizon {
            continue;
        }
        // Replay the prefix against the seller to learn its belief interval
        // and the partial-commitment price cap at this state.
        let mut probe_seller = seller0.clone();
        probe_seller.reset();
        let mut cap = dist.high();
        for action in prefix {
            let q = probe_seller.price();
            if action.is_accept() && game.has_partial_commitment() {
                cap = cap.min(q);
            }
            probe_seller.observe(q, *action);
        }
        let Some((mu_begin, mu_end)) = probe_seller.belief_interval() else {
            continue;
        };
        if mu_end - mu_begin <= 0.0 || dist.cdf(mu_end) - dist.cdf(mu_begin) <= 0.0 {
            continue;
        }

        let conditional_revenue = |overrides: Vec<Option<f64>>| -> Result<(f64, f64), SimError> {
            conditional_deviation_revenue(
                &seller0,
                &buyer0,
                prefix,
                &overrides,
                &regime,
                dist,
                (mu_begin, mu_end),
                horizon,
            )
        };

        let (eq_revenue, eq_unc) = conditional_revenue(vec![None; prefix.len() + 1])?;
        worst_quadrature = worst_quadrature.max(eq_unc);

        let window = cfg.depth.min(horizon - prefix.len());
        let plans: Vec<(usize, f64)> = (1..=window)
            .flat_map(|d| (0..grid).map(move |i| (d, i)))
            .map(|(d, i)| (d, cap * i as f64 / (grid - 1) as f64))
            .collect();
        let gains = exec::map_indexed(plans.len(), |pi| -> Result<(f64, f64), SimError> {
            let (d, q) = plans[pi];
            let mut overrides = vec![None; prefix.len()];
            overrides.extend(std::iter::repeat_n(Some(q), d));
            let (rev, unc) = conditional_revenue(overrides)?;
            Ok((rev, unc))
        });
        for (pi, g) in gains.into_iter().enumerate() {
            let (dev_revenue, unc) = g?;
            worst_quadrature = worst_quadrature.max(unc);
            let gain = dev_revenue - eq_revenue;
            if best.as_ref().is_none_or(|(b, _)| gain > *b) {
                let (d, q) = plans[pi];
                best = Some((
                    gain,
                    Witness::Seller {
                        prefix: prefix.clone(),
                        deviation_prices: vec![q; d],
                        equilibrium_revenue: eq_revenue,
                        deviation_revenue: dev_revenue,
                    },
                ));
            }
        }
    }

    let (gain, witness) = best.ok_or_else(|| VerifyError::Setup("no belief state".into()))?;
    let price_spacing = dist.high() / (grid - 1) as f64;
    let budget = ErrorBudget {
        grid_resolution: price_spacing * regime.weight_sum(),
        truncation_tail: 2.0 * regime.tail_bound(),
        quadrature: worst_quadrature + 1e-9,
    };
    let verdict = if gain <= cfg.epsilon + budget.total() {
        Verdict::Pass {
            epsilon: cfg.epsilon,
        }
    } else {
        Verdict::Fail { witness }
    };
    Ok(DeviationReport {
        role: Role::Seller,
        game: game.name().to_string(),
        history_class: format!("belief states after on-path prefixes to depth {depth}"),
        deviation: format!(
            "{grid}-point price grid held for 1..={} rounds, equilibrium afterwards",
            cfg.depth
        ),
        gain,
        budget,
        verdict,
    })
}

/// Settings for [`check_belief_consistency`].
#[derive(Debug, Clone, Copy)]
pub struct ConsistencyCheckConfig {
    /// Action branches are enumerated to this depth.
    pub trace_rounds: usize,
    /// Value grid resolving the exact reject/accept sets.
    pub value_grid: usize,
    pub regime_tol: f64,
}

impl Default for ConsistencyCheckConfig {
    fn default() -> Self {
        ConsistencyCheckConfig {
            trace_rounds: 6,
            value_grid: 10_000,
            regime_tol: 1e-6,
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct ConsistencyViolation {
    pub branch: String,
    pub belief: (f64, f64),
    pub detail: String,
}

/// Outcome of the Bayes-consistency check.
#[derive(Debug, Clone, Serialize)]
pub struct ConsistencyReport {
    pub game: String,
    pub branches_checked: usize,
    pub violations: Vec<ConsistencyViolation>,
    pub pass: bool,
}

/// Verifies that along every action branch the seller's belief interval is
/// exactly the set of values whose equilibrium play matches the branch, and
/// that zero-probability branches absorb at the top of the support.
pub fn check_belief_consistency(
    game: &Game,
    perturb: Option<Perturbation>,
    cfg: &ConsistencyCheckConfig,
) -> Result<ConsistencyReport, VerifyError> {
    let regime = game.regime(cfg.regime_tol);
    let horizon = regime
        .horizon()
        .ok_or_else(|| VerifyError::Setup("regime must be truncated".into()))?
        as usize;
    let max_len = cfg
        .trace_rounds
        .min(horizon.saturating_sub(1))
        .max(1)
        .min(horizon);
    let (seller0, buyer0) = game.strategies(perturb);
    let dist = game.dist();
    let (lo, hi) = (dist.low(), dist.high());
    let grid = cfg.value_grid.max(2);
    let spacing = (hi - lo) / (grid - 1) as f64;
    let boundary_tol = spacing + 1e-9;

    let mut branches_checked = 0usize;
    let mut violations = Vec::new();
    for len in 1..=max_len {
        for bits in 0..(1u32 << len) {
            let branch = actions_from_mask(bits, len);
            branches_checked += 1;

            let mut seller = seller0.clone();
            seller.reset();
            let mut prices = Vec::with_capacity(len);
            for action in &branch {
                let q = seller.price();
                prices.push(q);
                seller.observe(q, *action);
            }
            let Some((mu_begin, mu_end)) = seller.belief_interval() else {
                continue;
            };

            let matched = exec::map_indexed(grid, |i| {
                let v = lo + spacing * i as f64;
                let mut buyer = buyer0.clone();
                buyer.reset();
                for (q, action) in prices.iter().zip(&branch) {
                    if buyer.decide(v, *q) != *action {
                        return false;
                    }
                    buyer.observe(*q, *action);
                }
                true
            });

            let branch_name = describe_prefix(&branch);
            let count = matched.iter().filter(|m| **m).count();
            if count == 0 {
                // Zero-probability branch: consistency demands the absorbing
                // point mass at the top of the support.
                if (mu_begin - hi).abs() > 1e-9 || (mu_end - hi).abs() > 1e-9 {
                    violations.push(ConsistencyViolation {
                        branch: branch_name,
                        belief: (mu_begin, mu_end),
                        detail: "off-path branch does not absorb at the top of the support"
                            .to_string(),
                    });
                }
                continue;
            }
            for (i, m) in matched.iter().enumerate() {
                let v = lo + spacing * i as f64;
                let in_belief = v >= mu_begin - 1e-12 && v <= mu_end + 1e-12;
                if *m != in_belief
                    && (v - mu_begin).abs() > boundary_tol
                    && (v - mu_end).abs() > boundary_tol
                {
                    violations.push(ConsistencyViolation {
                        branch: branch_name.clone(),
                        belief: (mu_begin, mu_end),
                        detail: format!(
                            "value {v} is {} the belief interval but its play {} the branch",
                            if in_belief { "inside" } else { "outside" },
                            if *m { "matches" } else { "does not match" }
                        ),
                    });
                    break;
                }
            }
        }
    }

    let pass = violations.is_empty();
    Ok(ConsistencyReport {
        game: game.name().to_string(),
        branches_checked,
        violations,
        pass,
    })
}

/// Outcome of the full-commitment revenue bound check.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct BoundReport {
    pub revenue: f64,
    pub benchmark: f64,
    pub pass: bool,
}

/// No equilibrium extracts more than the full-commitment benchmark:
/// `n R(p*)` over a fixed horizon, `R(p*)/δ` discounted.
pub fn check_revenue_upper_bound(
    revenue: f64,
    dist: &ValueDistribution,
    regime: &Regime,
) -> BoundReport {
    let (_, monopoly_revenue) = dist.monopoly_price();
    let benchmark = monopoly_revenue * regime.weight_sum();
    BoundReport {
        revenue,
        benchmark,
        pass: revenue <= benchmark + 1e-9,
    }
}

/// Recomputes the gain of a witness through the simulator; failures must
/// reproduce their reported gain.
pub fn replay_witness(
    game: &Game,
    perturb: Option<Perturbation>,
    witness: &Witness,
    buyer_cfg: &BuyerCheckConfig,
    seller_cfg: &SellerCheckConfig,
) -> Result<f64, VerifyError> {
    match witness {
        Witness::Buyer {
            value,
            prefix,
            deviation,
            ..
        } => {
            let regime = game.regime(buyer_cfg.regime_tol);
            let (seller0, buyer0) = game.strategies(perturb);
            let mut seller = seller0.clone();
            let mut buyer = ForcedBuyer::new(buyer0.clone(), prefix.clone());
            let eq = playout_seeded(&mut seller, &mut buyer, *value, &regime, 0, 0)
                .map_err(VerifyError::Sim)?
                .buyer_utility;
            let mut script = prefix.clone();
            script.extend(deviation.iter().copied());
            let mut seller = seller0;
            let mut buyer = ForcedBuyer::new(buyer0, script);
            let dev = playout_seeded(&mut seller, &mut buyer, *value, &regime, 0, 0)
                .map_err(VerifyError::Sim)?
                .buyer_utility;
            Ok(dev - eq)
        }
        Witness::Seller {
            prefix,
            deviation_prices,
            ..
        } => {
            let regime = game.regime(seller_cfg.regime_tol);
            let (seller0, buyer0) = game.deviation_strategies(perturb);
            let mut probe = seller0.clone();
            probe.reset();
            for action in prefix {
                let q = probe.price();
                probe.observe(q, *action);
            }
            let (mu_begin, mu_end) = probe
                .belief_interval()
                .ok_or_else(|| VerifyError::Setup("seller exposes no belief".into()))?;
            let dist = game.dist();
            let horizon = regime
                .horizon()
                .ok_or_else(|| VerifyError::Setup("regime must be truncated".into()))?
                as usize;
            let run = |overrides: Vec<Option<f64>>| -> Result<f64, SimError> {
                conditional_deviation_revenue(
                    &seller0,
                    &buyer0,
                    prefix,
                    &overrides,
                    &regime,
                    dist,
                    (mu_begin, mu_end),
                    horizon,
                )
                .map(|(v, _)| v)
            };
            let eq = run(vec![None; prefix.len() + 1]).map_err(VerifyError::Sim)?;
            let mut overrides: Vec<Option<f64>> = vec![None; prefix.len()];
            overrides.extend(deviation_prices.iter().map(|q| Some(*q)));
            let dev = run(overrides).map_err(VerifyError::Sim)?;
            Ok(dev - eq)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn mask_expansion() {
        assert_eq!(
            actions_from_mask(0b101, 3),
            vec![Action::Accept, Action::Reject, Action::Accept]
        );
        assert!(actions_from_mask(0, 0).is_empty());
    }

    #[test]
    fn integrate_step_resolves_a_jump() {
        let dist = ValueDistribution::uniform(0.0, 1.0).unwrap();
        // Step from 0 to 3 at x = 1/3: integral 2.
        let f = |x: f64| -> Result<f64, SimError> { Ok(if x >= 1.0 / 3.0 { 3.0 } else { 0.0 }) };
        let (value, uncertainty) = integrate_step(&f, &dist, 0.0, 1.0, 8, &[]).unwrap();
        assert!((value - 2.0).abs() < 1e-7, "value = {value}");
        assert!(uncertainty < 1e-6);
        // A correct seed pins the jump without any adaptive splitting.
        let (seeded, _) = integrate_step(&f, &dist, 0.0, 1.0, 8, &[1.0 / 3.0]).unwrap();
        assert!((seeded - 2.0).abs() < 1e-7);
        // A wrong seed must not change the answer.
        let (misled, _) = integrate_step(&f, &dist, 0.0, 1.0, 8, &[0.9]).unwrap();
        assert!((misled - 2.0).abs() < 1e-7);
    }

    #[test]
    fn integrate_step_conditional_measure() {
        // Conditional on [0.5, 1.0] the mean of x under uniform(0,1) is 0.75;
        // a constant function integrates to itself.
        let dist = ValueDistribution::uniform(0.0, 1.0).unwrap();
        let f = |_: f64| -> Result<f64, SimError> { Ok(2.5) };
        let (value, _) = integrate_step(&f, &dist, 0.5, 1.0, 4, &[]).unwrap();
        assert!((value - 2.5).abs() < 1e-12);
    }

    #[test]
    fn buyer_check_passes_the_infinite_partial_equilibrium() {
        let game = Game::infinite_partial(0.4).unwrap();
        let cfg = BuyerCheckConfig {
            value_grid: 200,
            prefix_depth: 4,
            ..Default::default()
        };
        let report = check_buyer_best_response(&game, None, &cfg).unwrap();
        assert!(
            report.passed(),
            "gain {} budget {:?}",
            report.gain,
            report.budget
        );
        assert!(report.gain <= 1e-9 + report.budget.total());
    }

    #[test]
    fn consistency_passes_the_infinite_partial_equilibrium() {
        let game = Game::infinite_partial(0.4).unwrap();
        let cfg = ConsistencyCheckConfig {
            value_grid: 2000,
            trace_rounds: 4,
            regime_tol: 1e-6,
        };
        let report = check_belief_consistency(&game, None, &cfg).unwrap();
        assert!(report.pass, "{:?}", report.violations);
    }

    #[test]
    fn consistency_rejects_the_stale_belief_perturbation() {
        let game = Game::infinite_partial(0.4).unwrap();
        let cfg = ConsistencyCheckConfig {
            value_grid: 2000,
            trace_rounds: 3,
            regime_tol: 1e-6,
        };
        let report =
            check_belief_consistency(&game, Some(Perturbation::SkipBeliefUpdate), &cfg).unwrap();
        assert!(!report.pass);
    }

    #[test]
    fn revenue_bound_check() {
        let dist = ValueDistribution::uniform(0.0, 1.0).unwrap();
        let r = check_revenue_upper_bound(0.45, &dist, &Regime::fixed(2));
        assert!(r.pass);
        assert!((r.benchmark - 0.5).abs() < 1e-9);
        let r = check_revenue_upper_bound(0.55, &dist, &Regime::fixed(2));
        assert!(!r.pass);
    }
}
