//! Plays (seller, buyer) strategy pairs forward and computes expected revenue
//! by quadrature over buyer values or by reproducible parallel Monte Carlo.
//!
//! Three regimes are supported: a fixed n-round horizon, a discounted
//! infinite horizon truncated where the geometric tail drops below a stated
//! bound, and literal geometric stopping where the game survives each round
//! with probability `1 - delta`. The discounted and geometric games have the
//! same expected payoffs; [`geometric_equivalence_check`] tests exactly that.
//!
//! Monte Carlo uses counter-based ChaCha streams keyed by `(seed, batch)`, so
//! replicates are reproducible independently of how rayon schedules them, and
//! all reductions run in fixed order.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use thiserror::Error;

use crate::dist::ValueDistribution;
use crate::exec;
use crate::Action;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SimError {
    #[error("invalid price {price} posted in round {round}")]
    InvalidPrice { round: u32, price: f64 },
    #[error("{0}")]
    UnsupportedConfig(String),
}

/// Seller side of a game: posts a price each round, observes the response.
///
/// Implementations are small state machines reset at the start of every
/// playout; `observe` receives the price actually posted (which a deviation
/// wrapper may have overridden) so belief updates always follow the realized
/// history.
pub trait SellerStrategy {
    fn reset(&mut self);
    /// Price posted in the current round.
    fn price(&self) -> f64;
    fn observe(&mut self, price: f64, action: Action);
    /// Interval the seller currently believes the buyer's value lies in.
    fn belief_interval(&self) -> Option<(f64, f64)> {
        None
    }
}

/// Buyer side of a game: accepts or rejects each posted price.
pub trait BuyerStrategy {
    fn reset(&mut self);
    fn decide(&self, value: f64, price: f64) -> Action;
    fn observe(&mut self, price: f64, action: Action);

    /// Smallest value that accepts `price` in the current state, when the
    /// decision rule is a threshold; `None` when every value rejects.
    /// Threshold games expose this so integrators can place panel boundaries
    /// exactly at the revenue jumps.
    fn acceptance_cutoff(&self, price: f64) -> Option<f64> {
        let _ = price;
        None
    }
}

/// Horizon and discounting of a playout.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Regime {
    FixedHorizon {
        rounds: u32,
    },
    /// Discounted infinite horizon truncated at `horizon`; the payoff mass
    /// beyond the truncation is at most `tail_bound`.
    Discounted {
        delta: f64,
        horizon: u32,
        tail_bound: f64,
    },
    /// Undiscounted rounds that survive with probability `1 - delta` each.
    GeometricStopping {
        delta: f64,
    },
}

impl Regime {
    pub fn fixed(rounds: u32) -> Regime {
        assert!(rounds >= 1);
        Regime::FixedHorizon { rounds }
    }

    /// Discounted regime truncated so that the tail beyond the horizon is at
    /// most `tol / 10` (with `support_high` bounding the per-round payoff).
    pub fn discounted(delta: f64, tol: f64, support_high: f64) -> Regime {
        assert!(delta > 0.0 && delta <= 1.0, "delta must lie in (0, 1]");
        assert!(tol > 0.0 && support_high > 0.0);
        if delta >= 1.0 {
            return Regime::Discounted {
                delta,
                horizon: 1,
                tail_bound: 0.0,
            };
        }
        let q = 1.0 - delta;
        let target = tol / 10.0;
        let horizon = ((target * delta / support_high).ln() / q.ln())
            .ceil()
            .max(1.0) as u32;
        let tail_bound = q.powi(horizon as i32) * support_high / delta;
        Regime::Discounted {
            delta,
            horizon,
            tail_bound,
        }
    }

    pub fn geometric(delta: f64) -> Regime {
        assert!(delta > 0.0 && delta <= 1.0, "delta must lie in (0, 1]");
        Regime::GeometricStopping { delta }
    }

    pub fn delta(&self) -> Option<f64> {
        match self {
            Regime::FixedHorizon { .. } => None,
            Regime::Discounted { delta, .. } | Regime::GeometricStopping { delta } => Some(*delta),
        }
    }

    /// Payoff mass ignored by truncation (zero for exact regimes).
    pub fn tail_bound(&self) -> f64 {
        match self {
            Regime::Discounted { tail_bound, .. } => *tail_bound,
            _ => 0.0,
        }
    }

    /// Upper bound on the number of recorded rounds, when deterministic.
    pub fn horizon(&self) -> Option<u32> {
        match self {
            Regime::FixedHorizon { rounds } => Some(*rounds),
            Regime::Discounted { horizon, .. } => Some(*horizon),
            Regime::GeometricStopping { .. } => None,
        }
    }

    /// Sum of the round weights: `n` for a fixed horizon, `(1/δ)`-capped
    /// geometric series for the discounted regimes.
    pub fn weight_sum(&self) -> f64 {
        match self {
            Regime::FixedHorizon { rounds } => *rounds as f64,
            Regime::Discounted { delta, .. } | Regime::GeometricStopping { delta } => 1.0 / delta,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RoundRecord {
    pub round: u32,
    pub price: f64,
    pub action: Action,
    pub weight: f64,
}

/// One realized play of the game for a single buyer value.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Transcript {
    pub value: f64,
    pub rounds: Vec<RoundRecord>,
    /// Discounted revenue: sum of `weight * price` over accepted rounds.
    pub revenue: f64,
    /// Discounted buyer utility: sum of `weight * (value - price)` over
    /// accepted rounds.
    pub buyer_utility: f64,
}

impl Transcript {
    /// Revenue collected from `start_round` (1-based) onward.
    pub fn revenue_from(&self, start_round: u32) -> f64 {
        self.rounds
            .iter()
            .filter(|r| r.round >= start_round && r.action.is_accept())
            .map(|r| r.weight * r.price)
            .sum()
    }

    /// Utility collected from `start_round` (1-based) onward.
    pub fn utility_from(&self, start_round: u32) -> f64 {
        self.rounds
            .iter()
            .filter(|r| r.round >= start_round && r.action.is_accept())
            .map(|r| r.weight * (self.value - r.price))
            .sum()
    }
}

/// Simulation parameters: regime plus quadrature / Monte-Carlo resolution.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SimulationConfig {
    pub regime: Regime,
    pub quadrature_panels: usize,
    pub mc_samples: u64,
    pub seed: u64,
}

impl SimulationConfig {
    pub fn new(regime: Regime) -> Self {
        SimulationConfig {
            regime,
            quadrature_panels: 10_000,
            mc_samples: 1_000_000,
            seed: 0,
        }
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    pub fn with_samples(mut self, samples: u64) -> Self {
        self.mc_samples = samples;
        self
    }

    pub fn with_panels(mut self, panels: usize) -> Self {
        self.quadrature_panels = panels;
        self
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    Quadrature,
    MonteCarlo,
}

/// Expected value plus an error estimate: a deterministic bound for
/// quadrature, one standard error for Monte Carlo.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct Estimate {
    pub value: f64,
    pub error: f64,
    pub method: Method,
    /// Quadrature panels or Monte-Carlo paths actually used.
    pub samples: u64,
}

fn run_rounds<S, B, V>(
    seller: &mut S,
    buyer: &mut B,
    value: f64,
    regime: &Regime,
    rng: &mut ChaCha8Rng,
    mut visit: V,
) -> Result<(), SimError>
where
    S: SellerStrategy,
    B: BuyerStrategy,
    V: FnMut(RoundRecord),
{
    seller.reset();
    buyer.reset();
    let mut weight = 1.0;
    let mut round: u32 = 1;
    loop {
        let price = seller.price();
        if !price.is_finite() || price < 0.0 {
            return Err(SimError::InvalidPrice { round, price });
        }
        let action = buyer.decide(value, price);
        visit(RoundRecord {
            round,
            price,
            action,
            weight,
        });
        seller.observe(price, action);
        buyer.observe(price, action);

        match regime {
            Regime::FixedHorizon { rounds: n } => {
                if round >= *n {
                    break;
                }
            }
            Regime::Discounted { delta, horizon, .. } => {
                if round >= *horizon {
                    break;
                }
                weight *= 1.0 - delta;
            }
            Regime::GeometricStopping { delta } => {
                if rng.random::<f64>() < *delta {
                    break;
                }
            }
        }
        round += 1;
    }
    Ok(())
}

/// Plays one full game for buyer value `value`.
///
/// Deterministic given the strategies, the value and the RNG state; only the
/// geometric-stopping regime draws from `rng`.
pub fn playout<S, B>(
    seller: &mut S,
    buyer: &mut B,
    value: f64,
    regime: &Regime,
    rng: &mut ChaCha8Rng,
) -> Result<Transcript, SimError>
where
    S: SellerStrategy,
    B: BuyerStrategy,
{
    let mut rounds = Vec::new();
    let mut revenue = 0.0;
    let mut utility = 0.0;
    run_rounds(seller, buyer, value, regime, rng, |record| {
        if record.action.is_accept() {
            revenue += record.weight * record.price;
            utility += record.weight * (value - record.price);
        }
        rounds.push(record);
    })?;
    Ok(Transcript {
        value,
        rounds,
        revenue,
        buyer_utility: utility,
    })
}

/// Discounted revenue collected from `start_round` onward, without building a
/// transcript. Backbone of the verifier's conditional-revenue integrals.
pub fn playout_revenue_from<S, B>(
    seller: &mut S,
    buyer: &mut B,
    value: f64,
    regime: &Regime,
    start_round: u32,
) -> Result<f64, SimError>
where
    S: SellerStrategy,
    B: BuyerStrategy,
{
    let mut rng = ChaCha8Rng::seed_from_u64(0);
    let mut revenue = 0.0;
    run_rounds(seller, buyer, value, regime, &mut rng, |record| {
        if record.round >= start_round && record.action.is_accept() {
            revenue += record.weight * record.price;
        }
    })?;
    Ok(revenue)
}

/// [`playout`] with the RNG derived from `(seed, stream)`.
pub fn playout_seeded<S, B>(
    seller: &mut S,
    buyer: &mut B,
    value: f64,
    regime: &Regime,
    seed: u64,
    stream: u64,
) -> Result<Transcript, SimError>
where
    S: SellerStrategy,
    B: BuyerStrategy,
{
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    playout(seller, buyer, value, regime, &mut rng)
}

/// Expected seller revenue under the value prior.
///
/// Quadrature integrates playout revenue over the value axis on at least
/// `quadrature_panels` panels, with `breakpoints` (the strategy's acceptance
/// thresholds) inserted as panel boundaries; between consecutive thresholds
/// the integrand is constant, so the midpoint rule is exact there. Monte
/// Carlo draws values by inverse CDF on per-batch ChaCha streams.
pub fn expected_revenue<S, B>(
    seller: &S,
    buyer: &B,
    dist: &ValueDistribution,
    config: &SimulationConfig,
    method: Method,
    breakpoints: &[f64],
) -> Result<Estimate, SimError>
where
    S: SellerStrategy + Clone + Send + Sync,
    B: BuyerStrategy + Clone + Send + Sync,
{
    match method {
        Method::Quadrature => quadrature_revenue(seller, buyer, dist, config, breakpoints),
        Method::MonteCarlo => monte_carlo_revenue(seller, buyer, dist, config),
    }
}

fn quadrature_revenue<S, B>(
    seller: &S,
    buyer: &B,
    dist: &ValueDistribution,
    config: &SimulationConfig,
    breakpoints: &[f64],
) -> Result<Estimate, SimError>
where
    S: SellerStrategy + Clone + Send + Sync,
    B: BuyerStrategy + Clone + Send + Sync,
{
    if matches!(config.regime, Regime::GeometricStopping { .. }) {
        return Err(SimError::UnsupportedConfig(
            "quadrature needs a deterministic regime; use the discounted equivalent".into(),
        ));
    }
    let lo = dist.low();
    let hi = dist.high();
    let n = config.quadrature_panels.max(16);
    let mut edges: Vec<f64> = (0..=n)
        .map(|i| lo + (hi - lo) * i as f64 / n as f64)
        .collect();
    edges.extend(breakpoints.iter().copied().filter(|b| *b > lo && *b < hi));
    edges.sort_by(f64::total_cmp);
    edges.dedup_by(|a, b| (*a - *b).abs() < 1e-15);

    let panels = edges.len() - 1;
    let contributions = exec::map_indexed(panels, |i| {
        let (a, b) = (edges[i], edges[i + 1]);
        let mass = dist.cdf(b) - dist.cdf(a);
        if mass <= 0.0 {
            return Ok(0.0);
        }
        let mut s = seller.clone();
        let mut bu = buyer.clone();
        let tr = playout_seeded(
            &mut s,
            &mut bu,
            0.5 * (a + b),
            &config.regime,
            config.seed,
            0,
        )?;
        Ok(tr.revenue * mass)
    });
    let mut values = Vec::with_capacity(panels);
    for c in contributions {
        values.push(c?);
    }
    let value = exec::pairwise_sum(&values);
    let error = config.regime.tail_bound() + 1e-12 * panels as f64;
    Ok(Estimate {
        value,
        error,
        method: Method::Quadrature,
        samples: panels as u64,
    })
}

const MC_BATCH: u64 = 10_000;

fn monte_carlo_revenue<S, B>(
    seller: &S,
    buyer: &B,
    dist: &ValueDistribution,
    config: &SimulationConfig,
) -> Result<Estimate, SimError>
where
    S: SellerStrategy + Clone + Send + Sync,
    B: BuyerStrategy + Clone + Send + Sync,
{
    let n = config.mc_samples.max(2);
    let batches = n.div_ceil(MC_BATCH);
    let partials = exec::map_indexed(batches as usize, |b| {
        let b = b as u64;
        let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
        rng.set_stream(b + 1);
        let count = MC_BATCH.min(n - b * MC_BATCH);
        let mut s = seller.clone();
        let mut bu = buyer.clone();
        let mut sum = 0.0;
        let mut sumsq = 0.0;
        for _ in 0..count {
            let v = dist.quantile(rng.random::<f64>());
            let tr = playout(&mut s, &mut bu, v, &config.regime, &mut rng)?;
            sum += tr.revenue;
            sumsq += tr.revenue * tr.revenue;
        }
        Ok((sum, sumsq))
    });
    let mut sums = Vec::with_capacity(batches as usize);
    let mut sumsqs = Vec::with_capacity(batches as usize);
    for p in partials {
        let (s, sq) = p?;
        sums.push(s);
        sumsqs.push(sq);
    }
    let total = exec::pairwise_sum(&sums);
    let total_sq = exec::pairwise_sum(&sumsqs);
    let nf = n as f64;
    let mean = total / nf;
    let var = ((total_sq - nf * mean * mean) / (nf - 1.0)).max(0.0);
    let se = (var / nf).sqrt();
    Ok(Estimate {
        value: mean,
        error: se,
        method: Method::MonteCarlo,
        samples: n,
    })
}

/// Outcome of comparing geometric-stopping Monte Carlo against the
/// discounted-regime value of the same strategy pair.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct GeometricEquivalenceReport {
    pub delta: f64,
    pub mc_value: f64,
    pub mc_standard_error: f64,
    pub reference_value: f64,
    pub reference_error: f64,
    pub difference: f64,
    pub samples: u64,
    pub pass: bool,
}

/// Checks that Monte-Carlo revenue under geometric stopping agrees with the
/// discounted-regime expectation within four standard errors.
#[allow(clippy::too_many_arguments)]
pub fn geometric_equivalence_check<S, B>(
    seller: &S,
    buyer: &B,
    dist: &ValueDistribution,
    delta: f64,
    samples: u64,
    seed: u64,
    breakpoints: &[f64],
    reference: Option<f64>,
) -> Result<GeometricEquivalenceReport, SimError>
where
    S: SellerStrategy + Clone + Send + Sync,
    B: BuyerStrategy + Clone + Send + Sync,
{
    let mc_cfg = SimulationConfig::new(Regime::geometric(delta))
        .with_samples(samples)
        .with_seed(seed);
    let mc = expected_revenue(seller, buyer, dist, &mc_cfg, Method::MonteCarlo, &[])?;

    let (reference_value, reference_error) = match reference {
        Some(v) => (v, 0.0),
        None => {
            let cfg = SimulationConfig::new(Regime::discounted(delta, 1e-7, dist.high()));
            let est = expected_revenue(seller, buyer, dist, &cfg, Method::Quadrature, breakpoints)?;
            (est.value, est.error)
        }
    };
    let difference = mc.value - reference_value;
    let pass = difference.abs() <= 4.0 * mc.error + reference_error + 1e-9;
    Ok(GeometricEquivalenceReport {
        delta,
        mc_value: mc.value,
        mc_standard_error: mc.error,
        reference_value,
        reference_error,
        difference,
        samples,
        pass,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Posts a fixed price every round.
    #[derive(Clone)]
    struct ConstSeller(f64);
    impl SellerStrategy for ConstSeller {
        fn reset(&mut self) {}
        fn price(&self) -> f64 {
            self.0
        }
        fn observe(&mut self, _: f64, _: Action) {}
    }

    /// Accepts whenever value covers the price.
    #[derive(Clone)]
    struct MyopicBuyer;
    impl BuyerStrategy for MyopicBuyer {
        fn reset(&mut self) {}
        fn decide(&self, value: f64, price: f64) -> Action {
            if value >= price {
                Action::Accept
            } else {
                Action::Reject
            }
        }
        fn observe(&mut self, _: f64, _: Action) {}
    }

    #[test]
    fn fixed_horizon_weights_and_totals() {
        let tr = playout_seeded(
            &mut ConstSeller(0.4),
            &mut MyopicBuyer,
            0.9,
            &Regime::fixed(3),
            0,
            0,
        )
        .unwrap();
        assert_eq!(tr.rounds.len(), 3);
        assert!(tr.rounds.iter().all(|r| r.weight == 1.0));
        assert!((tr.revenue - 1.2).abs() < 1e-15);
        assert!((tr.buyer_utility - 1.5).abs() < 1e-15);
    }

    #[test]
    fn discounted_weights_follow_the_geometric_series() {
        let regime = Regime::discounted(0.5, 1e-6, 1.0);
        let tr =
            playout_seeded(&mut ConstSeller(0.2), &mut MyopicBuyer, 1.0, &regime, 0, 0).unwrap();
        for (i, r) in tr.rounds.iter().enumerate() {
            assert!((r.weight - 0.5f64.powi(i as i32)).abs() < 1e-12);
        }
        // Revenue approaches price / delta as the truncation tightens.
        assert!((tr.revenue - 0.4).abs() < 1e-6);
    }

    #[test]
    fn discounted_truncation_respects_the_tail_bound() {
        let regime = Regime::discounted(0.3, 1e-6, 1.0);
        let Regime::Discounted {
            horizon,
            tail_bound,
            ..
        } = regime
        else {
            unreachable!()
        };
        assert!(tail_bound <= 1e-7);
        assert!(0.7f64.powi(horizon as i32) / 0.3 <= 1e-7);
    }

    #[test]
    fn geometric_stops_immediately_at_delta_one() {
        let tr = playout_seeded(
            &mut ConstSeller(0.2),
            &mut MyopicBuyer,
            1.0,
            &Regime::geometric(1.0),
            0,
            0,
        )
        .unwrap();
        assert_eq!(tr.rounds.len(), 1);
    }

    #[test]
    fn negative_price_is_rejected() {
        let err = playout_seeded(
            &mut ConstSeller(-0.1),
            &mut MyopicBuyer,
            1.0,
            &Regime::fixed(1),
            0,
            0,
        )
        .unwrap_err();
        assert!(matches!(err, SimError::InvalidPrice { round: 1, .. }));
    }

    #[test]
    fn playouts_are_bit_identical_across_runs() {
        let regime = Regime::geometric(0.3);
        let a =
            playout_seeded(&mut ConstSeller(0.2), &mut MyopicBuyer, 0.7, &regime, 42, 7).unwrap();
        let b =
            playout_seeded(&mut ConstSeller(0.2), &mut MyopicBuyer, 0.7, &regime, 42, 7).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn quadrature_matches_closed_form_single_round() {
        // One round at price 0.5 on uniform(0,1): revenue 0.25.
        let dist = ValueDistribution::uniform(0.0, 1.0).unwrap();
        let cfg = SimulationConfig::new(Regime::fixed(1));
        let est = expected_revenue(
            &ConstSeller(0.5),
            &MyopicBuyer,
            &dist,
            &cfg,
            Method::Quadrature,
            &[0.5],
        )
        .unwrap();
        assert!((est.value - 0.25).abs() < 1e-12);
    }

    #[test]
    fn monte_carlo_matches_closed_form_single_round() {
        let dist = ValueDistribution::uniform(0.0, 1.0).unwrap();
        let cfg = SimulationConfig::new(Regime::fixed(1)).with_samples(200_000);
        let est = expected_revenue(
            &ConstSeller(0.5),
            &MyopicBuyer,
            &dist,
            &cfg,
            Method::MonteCarlo,
            &[],
        )
        .unwrap();
        assert!((est.value - 0.25).abs() < 5.0 * est.error);
        assert!(est.error < 1e-2);
    }

    #[test]
    fn quadrature_rejects_geometric_regime() {
        let dist = ValueDistribution::uniform(0.0, 1.0).unwrap();
        let cfg = SimulationConfig::new(Regime::geometric(0.5));
        let err = expected_revenue(
            &ConstSeller(0.5),
            &MyopicBuyer,
            &dist,
            &cfg,
            Method::Quadrature,
            &[],
        )
        .unwrap_err();
        assert!(matches!(err, SimError::UnsupportedConfig(_)));
    }
}
