//! Acceptance suite: one test per release criterion, each printing a
//! PASS line with its runtime. Run with
//! `cargo test -p repeated-sales --test acceptance -- --nocapture`.

use std::time::{Duration, Instant};

use repeated_sales::dist::ValueDistribution;
use repeated_sales::finite::{
    self, solve_partial_power_law, solve_partial_uniform, threshold_pbe_exists, ScalarRecursion,
};
use repeated_sales::games::{Game, Perturbation};
use repeated_sales::infinite::{self, InfiniteError};
use repeated_sales::sim::{
    expected_revenue, geometric_equivalence_check, Method, SimulationConfig,
};
use repeated_sales::two_round::solve_two_round;
use repeated_sales::verify::{
    check_belief_consistency, check_buyer_best_response, check_revenue_upper_bound,
    check_seller_best_response, replay_witness, BuyerCheckConfig, ConsistencyCheckConfig,
    SellerCheckConfig, Verdict,
};

const RATIO_LIMIT: f64 = 0.686_291_501_015_239_4; // 4 / (3 + 2 sqrt(2))
const PRICE_LIMIT: f64 = 0.585_786_437_626_904_9; // sqrt(2) / (sqrt(2) + 1)

fn finish(criterion: &str, what: &str, started: Instant, limit: Duration) {
    let elapsed = started.elapsed();
    println!("criterion {criterion} ({what}): PASS in {elapsed:.2?}");
    assert!(
        elapsed < limit,
        "criterion {criterion} exceeded its {limit:?} budget: {elapsed:?}"
    );
}

#[test]
fn criterion_1_two_round_uniform() {
    let started = Instant::now();
    let dist = ValueDistribution::uniform(0.0, 1.0).unwrap();
    let eq = solve_two_round(&dist).unwrap();
    assert!((eq.p1 - 0.3).abs() <= 1e-6, "p1 = {}", eq.p1);
    assert!((eq.t1 - 0.6).abs() <= 1e-6, "t1 = {}", eq.t1);
    assert!((eq.p21 - 0.6).abs() <= 1e-6, "p21 = {}", eq.p21);
    assert!(
        (eq.revenue - 0.45).abs() <= 1e-6,
        "revenue = {}",
        eq.revenue
    );
    finish(
        "1",
        "two-round uniform(0,1) equilibrium",
        started,
        Duration::from_secs(1),
    );
}

#[test]
fn criterion_2_threshold_existence() {
    let started = Instant::now();
    let uniform01 = ValueDistribution::uniform(0.0, 1.0).unwrap();
    let report = threshold_pbe_exists(&uniform01, 3).unwrap();
    assert!(
        !report.exists,
        "uniform(0,1) must not admit a 3-round threshold equilibrium"
    );

    let upper = ValueDistribution::uniform(0.5, 1.0).unwrap();
    for n in [3u32, 5] {
        let report = threshold_pbe_exists(&upper, n).unwrap();
        assert!(
            report.exists,
            "uniform(1/2,1) admits the equilibrium for n = {n}"
        );
        assert_eq!(report.equilibrium_prices.len(), n as usize);
        for p in &report.equilibrium_prices {
            assert!((p - 0.5).abs() <= 1e-9, "price {p}");
        }
    }
    finish(
        "2",
        "n-round threshold-equilibrium existence",
        started,
        Duration::from_secs(1),
    );
}

#[test]
fn criterion_3_finite_partial_recursion() {
    let started = Instant::now();
    assert!((finite::scalar_revenue(2) - 0.45).abs() <= 1e-12);

    let rows = solve_partial_uniform(1_000_000);
    for row in &rows {
        let identity = row.n as f64 * row.price / 2.0;
        assert!(
            (row.revenue - identity).abs() <= 1e-12 * row.revenue.max(1.0),
            "R_n = n p_n / 2 fails at n = {}",
            row.n
        );
    }

    let mut gap_1e5 = f64::NAN;
    let mut gap_1e6 = f64::NAN;
    for (n, revenue) in ScalarRecursion::new().take(1_000_000) {
        if n < 2 {
            continue;
        }
        let v = revenue + 1.0;
        let gap = v * v - n as f64 / 2.0 - (n as f64).ln() / 8.0;
        assert!(gap.abs() <= 2.0, "residual {gap} out of bounds at n = {n}");
        if n == 100_000 {
            gap_1e5 = gap;
        }
        if n == 1_000_000 {
            gap_1e6 = gap;
        }
    }
    assert!(
        (gap_1e6 - gap_1e5).abs() <= 1e-3,
        "residual not Cauchy: {gap_1e5} vs {gap_1e6}"
    );
    finish(
        "3",
        "partial-commitment recursion and asymptotics",
        started,
        Duration::from_secs(5),
    );
}

#[test]
fn criterion_4_infinite_partial_limits() {
    let started = Instant::now();
    let eq = infinite::equilibrium(1e-4).unwrap();
    assert!(
        (eq.ratio - RATIO_LIMIT).abs() <= 1e-3,
        "ratio = {}",
        eq.ratio
    );
    assert!(
        eq.ratio > RATIO_LIMIT,
        "ratio must approach the limit from above"
    );
    assert!(
        (eq.t - (1.0 - 1e-4 / 2f64.sqrt())).abs() <= 1e-6,
        "t = {}",
        eq.t
    );
    assert!((eq.p - PRICE_LIMIT).abs() <= 1e-4, "p = {}", eq.p);

    // Log-spaced sweep: the ratio decreases monotonically as delta drops and
    // stays above the limit throughout.
    let steps = 50;
    let (lo, hi) = (1e-4f64, 1.0f64);
    let mut previous = f64::NEG_INFINITY;
    for i in 0..steps {
        let delta = lo * (hi / lo).powf(i as f64 / (steps - 1) as f64);
        let eq = infinite::equilibrium(delta).unwrap();
        assert!(
            eq.ratio >= RATIO_LIMIT - 1e-12,
            "ratio dips below the limit at delta {delta}"
        );
        assert!(
            eq.ratio >= previous - 1e-9,
            "ratio not monotone on the sweep at delta {delta}"
        );
        previous = eq.ratio;
    }

    let one_round = infinite::equilibrium(1.0).unwrap();
    assert_eq!(one_round.t, 0.5);
    assert_eq!(one_round.p, 0.5);
    assert_eq!(one_round.revenue, 0.25);
    assert_eq!(one_round.ratio, 1.0);
    finish(
        "4",
        "infinite-horizon partial-commitment limits",
        started,
        Duration::from_secs(5),
    );
}

#[test]
fn criterion_5_simulator_oracle_equivalence() {
    let started = Instant::now();
    for delta in [0.05, 0.1, 0.3, 0.5, 1.0] {
        let game = Game::infinite_partial(delta).unwrap();
        let (seller, buyer) = game.strategies(None);
        let breakpoints = game.quadrature_breakpoints();
        let cfg = SimulationConfig::new(game.regime(1e-6));
        let quad = expected_revenue(
            &seller,
            &buyer,
            game.dist(),
            &cfg,
            Method::Quadrature,
            &breakpoints,
        )
        .unwrap();
        let analytic = game.analytic_revenue();
        assert!(
            (quad.value - analytic).abs() <= 1e-6,
            "delta {delta}: quadrature {} vs closed form {analytic}",
            quad.value
        );

        let report = geometric_equivalence_check(
            &seller,
            &buyer,
            game.dist(),
            delta,
            1_000_000,
            0,
            &breakpoints,
            Some(analytic),
        )
        .unwrap();
        assert!(
            report.pass,
            "delta {delta}: MC {} +/- {} vs {}",
            report.mc_value, report.mc_standard_error, report.reference_value
        );
    }
    finish(
        "5",
        "quadrature and Monte-Carlo oracle equivalence",
        started,
        Duration::from_secs(60),
    );
}

#[test]
fn criterion_6_zero_commitment() {
    let started = Instant::now();
    for delta in [0.1, 0.3, 0.5] {
        let game = Game::infinite_zero(delta).unwrap();
        let (seller, buyer) = game.strategies(None);
        let cfg = SimulationConfig::new(game.regime(1e-6));
        let est =
            expected_revenue(&seller, &buyer, game.dist(), &cfg, Method::Quadrature, &[]).unwrap();
        assert_eq!(
            est.value, 0.0,
            "zero-commitment revenue must be exactly zero"
        );

        let report = check_buyer_best_response(&game, None, &BuyerCheckConfig::default()).unwrap();
        assert!(
            report.passed(),
            "delta {delta}: buyer check gain {}",
            report.gain
        );
    }
    assert!(matches!(
        Game::infinite_zero(0.6),
        Err(repeated_sales::games::GameError::Infinite(
            InfiniteError::ZeroCommitmentDelta(_)
        ))
    ));
    finish(
        "6",
        "zero-commitment equilibrium",
        started,
        Duration::from_secs(5),
    );
}

#[test]
fn criterion_7_verifier_certificates() {
    let started = Instant::now();
    let buyer_cfg = BuyerCheckConfig::default();
    let seller_cfg = SellerCheckConfig::default();
    let consistency_cfg = ConsistencyCheckConfig::default();

    let games: Vec<Game> = vec![
        Game::two_round(ValueDistribution::uniform(0.0, 1.0).unwrap()).unwrap(),
        Game::infinite_partial(0.3).unwrap(),
        Game::infinite_zero(0.5).unwrap(),
    ];
    for game in &games {
        let buyer = check_buyer_best_response(game, None, &buyer_cfg).unwrap();
        assert!(
            buyer.passed(),
            "{}: buyer gain {} budget {:?}",
            game.name(),
            buyer.gain,
            buyer.budget
        );
        let seller = check_seller_best_response(game, None, &seller_cfg).unwrap();
        assert!(
            seller.passed(),
            "{}: seller gain {} budget {:?}",
            game.name(),
            seller.gain,
            seller.budget
        );
        let consistency = check_belief_consistency(game, None, &consistency_cfg).unwrap();
        assert!(
            consistency.pass,
            "{}: {:?}",
            game.name(),
            consistency.violations
        );
        println!(
            "  {}: buyer gain {:+.2e}, seller gain {:+.2e}, buyer budget {:.2e}, seller budget {:.2e}, {} consistency branches",
            game.name(),
            buyer.gain,
            seller.gain,
            buyer.budget.total(),
            seller.budget.total(),
            consistency.branches_checked,
        );
    }

    // Perturbed profiles must fail with witnesses that replay to the
    // reported gain.
    let infinite = Game::infinite_partial(0.3).unwrap();
    let two_round = Game::two_round(ValueDistribution::uniform(0.0, 1.0).unwrap()).unwrap();

    let perturbed = check_buyer_best_response(
        &infinite,
        Some(Perturbation::BuyerThresholdShift(-0.05)),
        &buyer_cfg,
    )
    .unwrap();
    let Verdict::Fail { witness } = &perturbed.verdict else {
        panic!("buyer threshold -0.05 must fail, gain {}", perturbed.gain);
    };
    let replayed = replay_witness(
        &infinite,
        Some(Perturbation::BuyerThresholdShift(-0.05)),
        witness,
        &buyer_cfg,
        &seller_cfg,
    )
    .unwrap();
    assert!(
        (replayed - perturbed.gain).abs() <= 1e-9,
        "witness replay mismatch"
    );
    println!(
        "  buyer-threshold -0.05: FAIL with gain {:+.2e} (replayed)",
        perturbed.gain
    );

    for game in [&two_round, &infinite] {
        let shifted =
            check_seller_best_response(game, Some(Perturbation::RootPriceShift(0.05)), &seller_cfg)
                .unwrap();
        let Verdict::Fail { witness } = &shifted.verdict else {
            panic!(
                "{}: root price +0.05 must fail, gain {}",
                game.name(),
                shifted.gain
            );
        };
        let replayed = replay_witness(
            game,
            Some(Perturbation::RootPriceShift(0.05)),
            witness,
            &buyer_cfg,
            &seller_cfg,
        )
        .unwrap();
        assert!(
            (replayed - shifted.gain).abs() <= 1e-9,
            "witness replay mismatch"
        );
        println!(
            "  {} root price +0.05: FAIL with gain {:+.2e} (replayed)",
            game.name(),
            shifted.gain
        );
    }

    let stale = check_belief_consistency(
        &infinite,
        Some(Perturbation::SkipBeliefUpdate),
        &consistency_cfg,
    )
    .unwrap();
    assert!(
        !stale.pass,
        "skipping belief updates must break consistency"
    );
    println!(
        "  skip-belief-update: FAIL with {} violations",
        stale.violations.len()
    );

    finish(
        "7",
        "verifier certificates and perturbations",
        started,
        Duration::from_secs(120),
    );
}

#[test]
fn criterion_8_full_commitment_bound() {
    let started = Instant::now();

    // Finite partial-commitment sweeps on uniform and power laws.
    let n_max = 10_000;
    let rows = solve_partial_uniform(n_max);
    let uniform01 = ValueDistribution::uniform(0.0, 1.0).unwrap();
    for row in &rows {
        let report = check_revenue_upper_bound(
            row.revenue,
            &uniform01,
            &repeated_sales::sim::Regime::fixed(row.n),
        );
        assert!(
            report.pass,
            "n = {}: {} > {}",
            row.n, report.revenue, report.benchmark
        );
    }
    for k in [1u32, 2] {
        let dist = ValueDistribution::power_law(k).unwrap();
        for row in solve_partial_power_law(200, k) {
            let report = check_revenue_upper_bound(
                row.revenue,
                &dist,
                &repeated_sales::sim::Regime::fixed(row.n),
            );
            assert!(report.pass, "k = {k}, n = {}", row.n);
        }
    }

    // Discounted sweep.
    for i in 0..60 {
        let delta = 1e-4f64 * (1.0f64 / 1e-4).powf(i as f64 / 59.0);
        let game = Game::infinite_partial(delta).unwrap();
        let report =
            check_revenue_upper_bound(game.analytic_revenue(), game.dist(), &game.regime(1e-6));
        assert!(report.pass, "delta = {delta}");
    }

    // Two-round equilibria across the distribution families.
    let dists = vec![
        ValueDistribution::uniform(0.0, 1.0).unwrap(),
        ValueDistribution::uniform(0.5, 1.0).unwrap(),
        ValueDistribution::uniform(0.0, 2.0).unwrap(),
        ValueDistribution::power_law(1).unwrap(),
        ValueDistribution::power_law(2).unwrap(),
        ValueDistribution::piecewise_linear_cdf(vec![(0.0, 0.0), (0.4, 0.7), (1.0, 1.0)]).unwrap(),
    ];
    for dist in &dists {
        let eq = solve_two_round(dist).unwrap();
        let report =
            check_revenue_upper_bound(eq.revenue, dist, &repeated_sales::sim::Regime::fixed(2));
        assert!(report.pass, "two-round bound fails for {dist:?}");
    }

    finish(
        "8",
        "full-commitment revenue bound across sweeps",
        started,
        Duration::from_secs(60),
    );
}

#[test]
fn criterion_9_power_law_recursion() {
    let started = Instant::now();

    // k = 0 reproduces the closed-form uniform recursion.
    let uniform = solve_partial_uniform(1000);
    let numeric = solve_partial_power_law(1000, 0);
    for (u, p) in uniform.iter().zip(numeric.iter()) {
        assert!((u.price - p.price).abs() <= 1e-9, "price at n = {}", u.n);
        assert!((u.threshold - p.threshold).abs() <= 1e-9);
        assert!((u.revenue - p.revenue).abs() <= 1e-9);
        assert!((u.top_utility - p.top_utility).abs() <= 1e-9);
    }

    // One-round power_law(1) is monopoly pricing.
    let one = &solve_partial_power_law(1, 1)[0];
    let sqrt3 = 3f64.sqrt();
    assert!((one.price - 1.0 / sqrt3).abs() <= 1e-8);
    assert!((one.revenue - 2.0 / (3.0 * sqrt3)).abs() <= 1e-8);

    // Equilibrium paths pass the buyer best-response check.
    let cfg = BuyerCheckConfig {
        epsilon: 1e-3,
        ..Default::default()
    };
    for k in [1u32, 2] {
        for n in 1..=5u32 {
            let game = Game::finite_partial(n, k).unwrap();
            let report = check_buyer_best_response(&game, None, &cfg).unwrap();
            assert!(
                report.passed(),
                "k = {k}, n = {n}: gain {} budget {:?}",
                report.gain,
                report.budget
            );
        }
    }
    finish(
        "9",
        "power-law partial-commitment recursion",
        started,
        Duration::from_secs(60),
    );
}
