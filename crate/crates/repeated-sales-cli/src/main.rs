//! Command-line entry point: solve, simulate, verify and sweep the repeated
//! posted-price sales games.
//!
//! Single solutions print JSON, sweeps and the finite recursion print CSV
//! (first line: `# manifest: {...}`). Every output embeds a manifest echoing
//! the subcommand, full configuration, tool version and timestamp, so reruns
//! are reproducible byte for byte modulo the timestamp. Floats are printed
//! with 12 significant digits.
//!
//! Exit codes: 0 success, 2 verification failure, 3 invalid configuration.

use std::fmt::Write as _;
use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;
use std::time::{SystemTime, UNIX_EPOCH};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::{json, Value};

use repeated_sales::dist::ValueDistribution;
use repeated_sales::finite::{solve_partial_power_law, threshold_pbe_exists};
use repeated_sales::games::{Game, Perturbation};
use repeated_sales::infinite;
use repeated_sales::sim::{expected_revenue, playout_seeded, Method, SimulationConfig};
use repeated_sales::two_round::solve_two_round_with_grid;
use repeated_sales::verify::{
    check_belief_consistency, check_buyer_best_response, check_revenue_upper_bound,
    check_seller_best_response, BuyerCheckConfig, ConsistencyCheckConfig, SellerCheckConfig,
};

const DEFAULT_GRID: usize = 4097;

#[derive(Parser)]
#[command(
    name = "repeated-sales",
    version,
    about = "Solve, simulate and verify threshold equilibria of repeated posted-price sales"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum GameArg {
    TwoRound,
    Finite,
    InfinitePartial,
    InfiniteZero,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum MethodArg {
    Quadrature,
    Mc,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum ParameterArg {
    Delta,
    N,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum SweepGameArg {
    Finite,
    InfinitePartial,
    InfiniteZero,
    ThresholdExists,
}

/// Game selection shared by `simulate`, `verify` and `report`.
#[derive(Args)]
struct GameSelect {
    #[arg(long, value_enum)]
    game: GameArg,
    /// Distribution config JSON file (two-round game only; defaults to
    /// uniform(0,1)).
    #[arg(long, value_name = "FILE")]
    dist: Option<PathBuf>,
    /// Discount/stopping parameter for the infinite-horizon games.
    #[arg(long)]
    delta: Option<f64>,
    /// Horizon for the finite game.
    #[arg(long)]
    n: Option<u32>,
    /// Power-law exponent k for the finite game (default 0 = uniform).
    #[arg(long = "power-law")]
    power_law: Option<u32>,
}

#[derive(Subcommand)]
enum Command {
    /// Solve the two-round no-commitment game.
    SolveTwoRound {
        /// Distribution config JSON file (defaults to uniform(0,1)).
        #[arg(long, value_name = "FILE")]
        dist: Option<PathBuf>,
        /// Scan grid for the opening-price search.
        #[arg(long)]
        grid: Option<usize>,
    },
    /// Finite-horizon partial-commitment recursion (CSV: n,p,t,R,u,residual).
    SolveFinite {
        #[arg(long)]
        n: u32,
        /// Power-law exponent k (default 0 = uniform; residual column is
        /// filled for k = 0 only).
        #[arg(long = "power-law")]
        power_law: Option<u32>,
        /// Write the CSV here instead of stdout.
        #[arg(long, value_name = "FILE")]
        csv: Option<PathBuf>,
    },
    /// Discounted infinite-horizon partial-commitment equilibrium.
    SolveInfinite {
        #[arg(long)]
        delta: Option<f64>,
        /// Sweep spec D1:D2:STEPS (log-spaced); produces CSV.
        #[arg(long, value_name = "D1:D2:STEPS")]
        sweep: Option<String>,
        #[arg(long, value_name = "FILE")]
        csv: Option<PathBuf>,
    },
    /// Expected revenue of a solved game by quadrature or Monte Carlo.
    Simulate {
        #[command(flatten)]
        select: GameSelect,
        #[arg(long, value_enum, default_value = "quadrature")]
        method: MethodArg,
        /// Monte-Carlo path count.
        #[arg(long, default_value_t = 1_000_000)]
        samples: u64,
        /// RNG seed (default 0; REPEATED_SALES_SEED overrides the default).
        #[arg(long)]
        seed: Option<u64>,
        /// Also emit a single playout transcript, e.g. --transcript v=0.7
        #[arg(long, value_name = "v=VALUE")]
        transcript: Option<String>,
    },
    /// Certify a profile as an epsilon-equilibrium (exit 0 iff all pass).
    Verify {
        #[command(flatten)]
        select: GameSelect,
        /// Perturbation spec: buyer-threshold=-0.05 | root-price=0.05 |
        /// skip-belief-update
        #[arg(long)]
        perturb: Option<String>,
        #[arg(long, default_value_t = 1e-4)]
        epsilon: f64,
        /// Buyer-check value grid size.
        #[arg(long, default_value_t = 1000)]
        value_grid: usize,
        /// Buyer deviation window length.
        #[arg(long, default_value_t = 3)]
        lookahead: usize,
        /// Seller-check price grid size.
        #[arg(long, default_value_t = 2000)]
        price_grid: usize,
        /// Seller deviation depth.
        #[arg(long, default_value_t = 3)]
        depth: usize,
    },
    /// Sweep a parameter and write a CSV of equilibrium quantities.
    Sweep {
        #[arg(long, value_enum)]
        parameter: ParameterArg,
        #[arg(long, value_enum)]
        game: SweepGameArg,
        /// Range spec START:END:STEPS.
        #[arg(long, value_name = "START:END:STEPS")]
        range: String,
        /// Space the sweep points logarithmically.
        #[arg(long)]
        log: bool,
        /// Distribution config (threshold-exists game).
        #[arg(long, value_name = "FILE")]
        dist: Option<PathBuf>,
        /// Power-law exponent for the finite game.
        #[arg(long = "power-law")]
        power_law: Option<u32>,
        #[arg(long, value_name = "FILE")]
        output: PathBuf,
    },
    /// Human-readable summary plus JSON for one game.
    Report {
        #[command(flatten)]
        select: GameSelect,
        /// Also run the verifier and include its verdicts.
        #[arg(long)]
        verify: bool,
    },
}

#[derive(Debug)]
enum CliError {
    Config(String),
    VerificationFailed,
    Io(String),
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Config(msg) => write!(f, "invalid config: {msg}"),
            CliError::VerificationFailed => write!(f, "verification failed"),
            CliError::Io(msg) => write!(f, "i/o error: {msg}"),
        }
    }
}

fn config_err(e: impl std::fmt::Display) -> CliError {
    CliError::Config(e.to_string())
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(CliError::VerificationFailed) => {
            eprintln!("error: verification failed");
            ExitCode::from(2)
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(3)
        }
    }
}

/// Rounds to 12 significant digits, the precision of every printed float.
fn sig(x: f64) -> f64 {
    if x == 0.0 || !x.is_finite() {
        return x;
    }
    let magnitude = x.abs().log10().floor() as i32;
    let factor = 10f64.powi(11 - magnitude);
    (x * factor).round() / factor
}

fn sig_str(x: f64) -> String {
    format!("{}", sig(x))
}

fn default_seed() -> u64 {
    std::env::var("REPEATED_SALES_SEED")
        .ok()
        .and_then(|s| s.parse().ok())
        .unwrap_or(0)
}

fn manifest(subcommand: &str, config: Value) -> Value {
    let timestamp = SystemTime::now()
        .duration_since(UNIX_EPOCH)
        .map(|d| d.as_secs())
        .unwrap_or(0);
    json!({
        "subcommand": subcommand,
        "config": config,
        "version": env!("CARGO_PKG_VERSION"),
        "timestamp_unix": timestamp,
    })
}

fn load_dist(path: Option<&PathBuf>) -> Result<(ValueDistribution, Value), CliError> {
    match path {
        None => {
            let cfg = json!({"type": "uniform", "low": 0.0, "high": 1.0});
            Ok((
                ValueDistribution::uniform(0.0, 1.0).map_err(config_err)?,
                cfg,
            ))
        }
        Some(p) => {
            let text = fs::read_to_string(p).map_err(|e| CliError::Io(e.to_string()))?;
            let dist = ValueDistribution::from_json(&text).map_err(config_err)?;
            let echo: Value = serde_json::from_str(&text).map_err(config_err)?;
            Ok((dist, echo))
        }
    }
}

fn build_game(select: &GameSelect) -> Result<(Game, Value), CliError> {
    match select.game {
        GameArg::TwoRound => {
            let (dist, echo) = load_dist(select.dist.as_ref())?;
            let game = Game::two_round(dist).map_err(config_err)?;
            Ok((game, json!({"game": "two-round", "dist": echo})))
        }
        GameArg::Finite => {
            let n = select
                .n
                .ok_or_else(|| CliError::Config("--n is required".into()))?;
            let k = select.power_law.unwrap_or(0);
            let game = Game::finite_partial(n, k).map_err(config_err)?;
            Ok((game, json!({"game": "finite", "n": n, "power_law": k})))
        }
        GameArg::InfinitePartial => {
            let delta = select
                .delta
                .ok_or_else(|| CliError::Config("--delta is required".into()))?;
            let game = Game::infinite_partial(delta).map_err(config_err)?;
            Ok((game, json!({"game": "infinite-partial", "delta": delta})))
        }
        GameArg::InfiniteZero => {
            let delta = select
                .delta
                .ok_or_else(|| CliError::Config("--delta is required".into()))?;
            let game = Game::infinite_zero(delta).map_err(config_err)?;
            Ok((game, json!({"game": "infinite-zero", "delta": delta})))
        }
    }
}

fn parse_range(spec: &str) -> Result<(f64, f64, usize), CliError> {
    let parts: Vec<&str> = spec.split(':').collect();
    if parts.len() != 3 {
        return Err(CliError::Config(format!(
            "range spec '{spec}' is not START:END:STEPS"
        )));
    }
    let start: f64 = parts[0].parse().map_err(config_err)?;
    let end: f64 = parts[1].parse().map_err(config_err)?;
    let steps: usize = parts[2].parse().map_err(config_err)?;
    if steps < 1 || !(start.is_finite() && end.is_finite()) || start > end {
        return Err(CliError::Config(format!("bad range '{spec}'")));
    }
    Ok((start, end, steps))
}

fn range_points(start: f64, end: f64, steps: usize, log: bool) -> Vec<f64> {
    if steps == 1 {
        return vec![start];
    }
    (0..steps)
        .map(|i| {
            let f = i as f64 / (steps - 1) as f64;
            if log {
                start * (end / start).powf(f)
            } else {
                start + (end - start) * f
            }
        })
        .collect()
}

fn write_csv(path: Option<&PathBuf>, content: &str) -> Result<(), CliError> {
    match path {
        None => {
            print!("{content}");
            Ok(())
        }
        Some(p) => fs::write(p, content)
            .map_err(|e| CliError::Io(format!("cannot write {}: {e}", p.display()))),
    }
}

fn print_json(value: &Value) {
    println!(
        "{}",
        serde_json::to_string_pretty(value).expect("serializable")
    );
}

fn to_value<T: Serialize>(x: &T) -> Value {
    serde_json::to_value(x).expect("serializable")
}

fn run(cli: Cli) -> Result<(), CliError> {
    match cli.command {
        Command::SolveTwoRound { dist, grid } => {
            let (d, echo) = load_dist(dist.as_ref())?;
            let grid = grid.unwrap_or(DEFAULT_GRID);
            let eq = solve_two_round_with_grid(&d, grid).map_err(config_err)?;
            print_json(&json!({
                "manifest": manifest("solve-two-round", json!({"dist": echo, "grid": grid})),
                "p1": sig(eq.p1),
                "t1": sig(eq.t1),
                "p20": sig(eq.p20),
                "p21": sig(eq.p21),
                "revenue": sig(eq.revenue),
                "p1_equals_lower_support": eq.p1_equals_lower_support,
            }));
            Ok(())
        }

        Command::SolveFinite { n, power_law, csv } => {
            let k = power_law.unwrap_or(0);
            let rows = solve_partial_power_law(n, k);
            let mf = manifest("solve-finite", json!({"n": n, "power_law": k}));
            let mut out = format!("# manifest: {mf}\n");
            out.push_str("n,p,t,R,u,residual\n");
            for row in &rows {
                let residual = if k == 0 {
                    let v = row.revenue + 1.0;
                    sig_str(v * v - row.n as f64 / 2.0 - (row.n as f64).ln() / 8.0)
                } else {
                    String::new()
                };
                let _ = writeln!(
                    out,
                    "{},{},{},{},{},{}",
                    row.n,
                    sig_str(row.price),
                    sig_str(row.threshold),
                    sig_str(row.revenue),
                    sig_str(row.top_utility),
                    residual
                );
            }
            write_csv(csv.as_ref(), &out)
        }

        Command::SolveInfinite { delta, sweep, csv } => match (delta, sweep) {
            (Some(delta), None) => {
                let eq = infinite::equilibrium(delta).map_err(config_err)?;
                print_json(&json!({
                    "manifest": manifest("solve-infinite", json!({"delta": delta})),
                    "delta": sig(eq.delta),
                    "t": sig(eq.t),
                    "p": sig(eq.p),
                    "R": sig(eq.revenue),
                    "ratio": sig(eq.ratio),
                }));
                Ok(())
            }
            (None, Some(spec)) => {
                let (start, end, steps) = parse_range(&spec)?;
                if start <= 0.0 {
                    return Err(CliError::Config("delta sweep must start above 0".into()));
                }
                let mf = manifest("solve-infinite", json!({"sweep": spec}));
                let mut out = format!("# manifest: {mf}\n");
                out.push_str("delta,t,p,R,ratio\n");
                for delta in range_points(start, end, steps, true) {
                    let eq = infinite::equilibrium(delta).map_err(config_err)?;
                    let _ = writeln!(
                        out,
                        "{},{},{},{},{}",
                        sig_str(delta),
                        sig_str(eq.t),
                        sig_str(eq.p),
                        sig_str(eq.revenue),
                        sig_str(eq.ratio)
                    );
                }
                write_csv(csv.as_ref(), &out)
            }
            _ => Err(CliError::Config(
                "pass exactly one of --delta or --sweep".into(),
            )),
        },

        Command::Simulate {
            select,
            method,
            samples,
            seed,
            transcript,
        } => {
            let (game, echo) = build_game(&select)?;
            let seed = seed.unwrap_or_else(default_seed);
            let method = match method {
                MethodArg::Quadrature => Method::Quadrature,
                MethodArg::Mc => Method::MonteCarlo,
            };
            let cfg = SimulationConfig::new(game.regime(1e-6))
                .with_samples(samples)
                .with_seed(seed);
            let (seller, buyer) = game.strategies(None);
            let est = expected_revenue(
                &seller,
                &buyer,
                game.dist(),
                &cfg,
                method,
                &game.quadrature_breakpoints(),
            )
            .map_err(config_err)?;
            let mut output = json!({
                "manifest": manifest("simulate", json!({
                    "select": echo, "method": to_value(&method),
                    "samples": samples, "seed": seed,
                })),
                "revenue": sig(est.value),
                "error": sig(est.error),
                "method": to_value(&method),
                "samples": est.samples,
                "analytic_revenue": sig(game.analytic_revenue()),
            });
            if let Some(spec) = transcript {
                let v: f64 = spec
                    .strip_prefix("v=")
                    .ok_or_else(|| CliError::Config("transcript spec must be v=VALUE".into()))?
                    .parse()
                    .map_err(config_err)?;
                let mut s = seller.clone();
                let mut b = buyer.clone();
                let tr =
                    playout_seeded(&mut s, &mut b, v, &cfg.regime, seed, 0).map_err(config_err)?;
                output["transcript"] = to_value(&tr);
            }
            print_json(&output);
            Ok(())
        }

        Command::Verify {
            select,
            perturb,
            epsilon,
            value_grid,
            lookahead,
            price_grid,
            depth,
        } => {
            let (game, echo) = build_game(&select)?;
            let perturb = perturb
                .map(|s| s.parse::<Perturbation>())
                .transpose()
                .map_err(CliError::Config)?;
            let buyer_cfg = BuyerCheckConfig {
                value_grid,
                lookahead,
                epsilon,
                ..Default::default()
            };
            let seller_cfg = SellerCheckConfig {
                price_grid,
                depth,
                epsilon,
                ..Default::default()
            };
            let consistency_cfg = ConsistencyCheckConfig::default();

            let buyer =
                check_buyer_best_response(&game, perturb, &buyer_cfg).map_err(config_err)?;
            let seller =
                check_seller_best_response(&game, perturb, &seller_cfg).map_err(config_err)?;
            let consistency =
                check_belief_consistency(&game, perturb, &consistency_cfg).map_err(config_err)?;
            let bound =
                check_revenue_upper_bound(game.analytic_revenue(), game.dist(), &game.regime(1e-6));

            let all_pass = buyer.passed() && seller.passed() && consistency.pass && bound.pass;
            print_json(&json!({
                "manifest": manifest("verify", json!({
                    "select": echo, "perturb": to_value(&perturb), "epsilon": epsilon,
                    "value_grid": value_grid, "lookahead": lookahead,
                    "price_grid": price_grid, "depth": depth,
                })),
                "reports": [to_value(&buyer), to_value(&seller)],
                "consistency": to_value(&consistency),
                "revenue_bound": to_value(&bound),
                "all_pass": all_pass,
            }));
            if all_pass {
                Ok(())
            } else {
                Err(CliError::VerificationFailed)
            }
        }

        Command::Sweep {
            parameter,
            game,
            range,
            log,
            dist,
            power_law,
            output,
        } => {
            let (start, end, steps) = parse_range(&range)?;
            let mf = manifest(
                "sweep",
                json!({
                    "parameter": match parameter { ParameterArg::Delta => "delta", ParameterArg::N => "n" },
                    "range": range, "log": log, "power_law": power_law,
                }),
            );
            let mut out = format!("# manifest: {mf}\n");
            match (parameter, game) {
                (ParameterArg::Delta, SweepGameArg::InfinitePartial) => {
                    out.push_str("delta,t,p,R,benchmark,ratio\n");
                    for delta in range_points(start.max(1e-12), end, steps, log) {
                        let eq = infinite::equilibrium(delta).map_err(config_err)?;
                        let benchmark = 0.25 / delta;
                        let _ = writeln!(
                            out,
                            "{},{},{},{},{},{}",
                            sig_str(delta),
                            sig_str(eq.t),
                            sig_str(eq.p),
                            sig_str(eq.revenue),
                            sig_str(benchmark),
                            sig_str(eq.ratio)
                        );
                    }
                }
                (ParameterArg::Delta, SweepGameArg::InfiniteZero) => {
                    out.push_str("delta,t,p,R,benchmark,ratio\n");
                    for delta in range_points(start.max(1e-12), end, steps, log) {
                        Game::infinite_zero(delta).map_err(config_err)?;
                        let benchmark = 0.25 / delta;
                        let _ = writeln!(out, "{},,0,0,{},0", sig_str(delta), sig_str(benchmark));
                    }
                }
                (ParameterArg::N, SweepGameArg::Finite) => {
                    let k = power_law.unwrap_or(0);
                    let top = end.floor() as u32;
                    let rows = solve_partial_power_law(top.max(1), k);
                    let (_, r_star) = ValueDistribution::power_law(k)
                        .map_err(config_err)?
                        .monopoly_price();
                    out.push_str("n,t,p,R,benchmark,ratio\n");
                    for point in range_points(start, end, steps, log) {
                        let n = (point.round() as u32).clamp(1, top.max(1));
                        let row = &rows[n as usize - 1];
                        let benchmark = n as f64 * r_star;
                        let _ = writeln!(
                            out,
                            "{},{},{},{},{},{}",
                            n,
                            sig_str(row.threshold),
                            sig_str(row.price),
                            sig_str(row.revenue),
                            sig_str(benchmark),
                            sig_str(row.revenue / benchmark)
                        );
                    }
                }
                (ParameterArg::N, SweepGameArg::ThresholdExists) => {
                    let (d, _) = load_dist(dist.as_ref())?;
                    let (_, r_star) = d.monopoly_price();
                    let low = d.low();
                    out.push_str("n,t,p,R,benchmark,ratio,exists\n");
                    for point in range_points(start, end, steps, log) {
                        let n = (point.round() as u32).max(1);
                        let report = threshold_pbe_exists(&d, n).map_err(config_err)?;
                        let benchmark = n as f64 * r_star;
                        if report.exists {
                            let revenue = (n as f64 - 1.0) * d.revenue_curve(low) + r_star;
                            let _ = writeln!(
                                out,
                                "{},{},{},{},{},{},true",
                                n,
                                sig_str(low),
                                sig_str(low),
                                sig_str(revenue),
                                sig_str(benchmark),
                                sig_str(revenue / benchmark)
                            );
                        } else {
                            let _ = writeln!(out, "{n},,,,{},,false", sig_str(benchmark));
                        }
                    }
                }
                _ => {
                    return Err(CliError::Config(
                        "unsupported parameter/game combination".into(),
                    ))
                }
            }
            write_csv(Some(&output), &out)?;
            eprintln!("wrote {}", output.display());
            Ok(())
        }

        Command::Report { select, verify } => {
            let (game, echo) = build_game(&select)?;
            let benchmark = game.benchmark();
            let revenue = game.analytic_revenue();
            let ratio = revenue / benchmark;

            let mut human = String::new();
            let mut payload = json!({
                "manifest": manifest("report", json!({"select": echo, "verify": verify})),
                "game": game.name(),
                "revenue": sig(revenue),
                "benchmark": sig(benchmark),
                "ratio": sig(ratio),
            });
            match &game {
                Game::TwoRound { eq, .. } => {
                    let _ = writeln!(human, "two-round game");
                    let _ = writeln!(human, "  opening price p1        {}", sig_str(eq.p1));
                    let _ = writeln!(human, "  acceptance threshold t1 {}", sig_str(eq.t1));
                    let _ = writeln!(human, "  price after reject p20  {}", sig_str(eq.p20));
                    let _ = writeln!(human, "  price after accept p21  {}", sig_str(eq.p21));
                    payload["p1"] = json!(sig(eq.p1));
                    payload["t1"] = json!(sig(eq.t1));
                    payload["p20"] = json!(sig(eq.p20));
                    payload["p21"] = json!(sig(eq.p21));
                }
                Game::FinitePartial { n, k, rows, .. } => {
                    let row = rows.last().expect("n >= 1");
                    let _ = writeln!(human, "finite partial-commitment game, n = {n}, k = {k}");
                    let _ = writeln!(human, "  first-round price       {}", sig_str(row.price));
                    let _ = writeln!(
                        human,
                        "  first-round threshold   {}",
                        sig_str(row.threshold)
                    );
                    payload["n"] = json!(n);
                    payload["power_law"] = json!(k);
                    payload["p"] = json!(sig(row.price));
                    payload["t"] = json!(sig(row.threshold));
                }
                Game::InfinitePartial { eq, .. } => {
                    let _ = writeln!(
                        human,
                        "infinite partial-commitment game, delta = {}",
                        eq.delta
                    );
                    let _ = writeln!(human, "  threshold fraction t    {}", sig_str(eq.t));
                    let _ = writeln!(human, "  price fraction p        {}", sig_str(eq.p));
                    payload["delta"] = json!(sig(eq.delta));
                    payload["t"] = json!(sig(eq.t));
                    payload["p"] = json!(sig(eq.p));
                }
                Game::InfiniteZero { delta, .. } => {
                    let _ = writeln!(human, "infinite zero-commitment game, delta = {delta}");
                    let _ = writeln!(human, "  the no-discrimination profile earns nothing");
                    payload["delta"] = json!(sig(*delta));
                }
            }
            let _ = writeln!(human, "  expected revenue        {}", sig_str(revenue));
            let _ = writeln!(human, "  full-commitment bound   {}", sig_str(benchmark));
            let _ = writeln!(human, "  fraction of benchmark   {}", sig_str(ratio));

            let mut failed = false;
            if verify {
                let buyer = check_buyer_best_response(&game, None, &BuyerCheckConfig::default())
                    .map_err(config_err)?;
                let seller = check_seller_best_response(&game, None, &SellerCheckConfig::default())
                    .map_err(config_err)?;
                let consistency =
                    check_belief_consistency(&game, None, &ConsistencyCheckConfig::default())
                        .map_err(config_err)?;
                failed = !(buyer.passed() && seller.passed() && consistency.pass);
                let _ = writeln!(
                    human,
                    "  verifier                buyer {} / seller {} / consistency {}",
                    if buyer.passed() { "pass" } else { "FAIL" },
                    if seller.passed() { "pass" } else { "FAIL" },
                    if consistency.pass { "pass" } else { "FAIL" },
                );
                payload["verifier"] = json!({
                    "buyer": to_value(&buyer),
                    "seller": to_value(&seller),
                    "consistency": to_value(&consistency),
                });
            }

            print!("{human}");
            print_json(&payload);
            if failed {
                Err(CliError::VerificationFailed)
            } else {
                Ok(())
            }
        }
    }
}
