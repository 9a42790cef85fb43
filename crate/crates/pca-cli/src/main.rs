//! `pca`: closed-form queries, Monte Carlo simulation, oracle
//! comparison, and parameter sweeps for the two-parameter automaton.
//!
//! Output is CSV on stdout (or at `--out` for sweeps), with `--json`
//! for structured consumers. Exit codes: 0 success, 1 tolerance breach
//! in `compare`, 2 usage or domain error.

use std::collections::BTreeMap;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use pca_cli::manifest::RunManifest;
use pca_cli::montecarlo::{
    self, estimate_absorption_prob, estimate_front_speed, estimate_mean_absorption, Estimate,
    InitialConfig, MeanOutcome, SweepGrid, SweepTask,
};
use pca_cli::oracle::{
    build_birth_death_chain, build_ring_chain, solve_absorption, UpperBoundary,
};
use pca_core::analytics::{self, ExtReal, MeanTime, Side};
use pca_core::config::{compare_rings, Cell, Comparison, RingConfig, WindowConfig};
use pca_core::dynamics::{step_ring, JumpKind, StepRng};
use pca_core::measure::ArchipelagoMeasure;
use pca_core::params::Params;

/// Relative tolerance of the theory-vs-oracle gate.
const ORACLE_TOL: f64 = 1e-9;

#[derive(Parser)]
#[command(name = "pca", version, about)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Closed-form quantities printed as CSV rows.
    Exact(ExactArgs),
    /// Monte Carlo estimates (mean absorption times, probabilities,
    /// front speeds, coupling checks).
    Simulate(SimulateArgs),
    /// Closed forms against the exact-chain oracle (and optionally
    /// Monte Carlo); exits 1 when any relative error exceeds 1e-9.
    Compare(CompareArgs),
    /// Parameter-grid sweeps written to a CSV file with a manifest
    /// sidecar.
    Sweep(SweepArgs),
}

#[derive(Clone, Copy, ValueEnum)]
enum SideArg {
    Plus,
    Minus,
}

impl From<SideArg> for Side {
    fn from(s: SideArg) -> Side {
        match s {
            SideArg::Plus => Side::Plus,
            SideArg::Minus => Side::Minus,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum JumpKindArg {
    MinusPlus,
    PlusMinus,
}

impl From<JumpKindArg> for JumpKind {
    fn from(k: JumpKindArg) -> JumpKind {
        match k {
            JumpKindArg::MinusPlus => JumpKind::MinusPlus,
            JumpKindArg::PlusMinus => JumpKind::PlusMinus,
        }
    }
}

#[derive(Args)]
struct ParamFlags {
    /// Probability that a minus with a plus to its right becomes a plus.
    #[arg(long)]
    alpha: f64,
    /// Probability that a plus with a minus to its right stays a plus.
    #[arg(long)]
    beta: f64,
}

impl ParamFlags {
    fn params(&self) -> Result<Params, CliError> {
        Params::new(self.alpha, self.beta).map_err(|e| CliError::domain(e.to_string()))
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum ExactQuery {
    /// Down/up rate ratio of the plus-island length walk.
    Gamma,
    /// Absorption probability of a plus island of length i.
    H,
    /// Absorption probability of a minus island of length i.
    Hhat,
    /// Expected death time of a plus island of length i.
    ExpHitX,
    /// Expected death time of a minus island of length i.
    ExpHitY,
    /// Probability the two-sided walk reaches n before 0 from i.
    Gambler,
    /// Expected absorption time of a length-i block on an n-ring walk.
    RingTime,
    /// Whether the island mean absorption time is finite.
    Phase,
    /// Linear-in-giant bounds on the mixture mean absorption time.
    EroderBound,
    /// Behaviour of the length walk at boundary parameters.
    Degenerate,
}

#[derive(Args)]
struct ExactArgs {
    #[arg(value_enum)]
    query: ExactQuery,
    #[command(flatten)]
    params: ParamFlags,
    /// Island length or walk start, where the query needs one.
    #[arg(long)]
    i: Option<u64>,
    /// Ring size or upper absorbing state, where the query needs one.
    #[arg(long)]
    n: Option<u64>,
    /// Which island family the query refers to.
    #[arg(long, value_enum)]
    side: Option<SideArg>,
    /// Giant island length of the point mixture used by eroder-bound.
    #[arg(long)]
    giant: Option<u64>,
    /// Emit JSON instead of a CSV value.
    #[arg(long)]
    json: bool,
}

#[derive(Clone, Copy, ValueEnum)]
enum SimKind {
    /// Mean absorption time of a block on a ring.
    Ring,
    /// Mean death time of a contiguous island.
    Island,
    /// Mean leftward front speed of a jump configuration.
    Jump,
    /// Order violations along a monotone coupled pair of rings.
    Coupled,
    /// Absorbed fraction of a contiguous island before the horizon.
    Absorbed,
}

#[derive(Args)]
struct SimulateArgs {
    #[arg(value_enum)]
    kind: SimKind,
    #[command(flatten)]
    params: ParamFlags,
    /// Ring size (ring and coupled kinds).
    #[arg(long)]
    n: Option<usize>,
    /// Initial block length on the ring; defaults to n/2.
    #[arg(long)]
    block: Option<usize>,
    /// Island length (island and absorbed kinds).
    #[arg(long)]
    len: Option<usize>,
    /// Island family; defaults to plus islands.
    #[arg(long, value_enum, default_value = "plus")]
    side: SideArg,
    /// Jump front kind.
    #[arg(long = "kind", value_enum, default_value = "minus-plus")]
    kind_jump: JumpKindArg,
    /// Steps per replicate (jump and coupled kinds).
    #[arg(long, default_value_t = 10_000)]
    steps: u64,
    #[arg(long, default_value_t = 1_000)]
    replicates: u64,
    /// Per-replicate step budget; timing out censors the replicate.
    #[arg(long, default_value_t = 1_000_000)]
    horizon: u64,
    /// Stream seed; mandatory so runs are reproducible by default.
    #[arg(long)]
    seed: u64,
    #[arg(long)]
    json: bool,
}

#[derive(Clone, Copy, ValueEnum)]
enum CompareTarget {
    /// Block absorption time on rings against the 2^n-state solve.
    RingTime,
    /// Plus-island expected death times against a truncated chain.
    ExpHitX,
    /// Minus-island expected death times against a truncated chain.
    ExpHitY,
    /// Two-sided walk win probabilities against the exact chain.
    Gambler,
    /// Plus-island absorption probabilities against a truncated chain.
    H,
}

#[derive(Args)]
struct CompareArgs {
    #[arg(value_enum)]
    target: CompareTarget,
    /// Restrict to one parameter pair; defaults to a built-in panel.
    #[arg(long)]
    alpha: Option<f64>,
    #[arg(long)]
    beta: Option<f64>,
    /// Largest ring size for ring-time.
    #[arg(long, default_value_t = 8)]
    n_max: usize,
    /// Largest island length for the hitting-time and h targets.
    #[arg(long, default_value_t = 10)]
    i_max: u64,
    /// Upper absorbing state for gambler.
    #[arg(long, default_value_t = 6)]
    n: u64,
    /// Monte Carlo replicates per row (0 disables the mc column).
    #[arg(long, default_value_t = 0)]
    mc_replicates: u64,
    #[arg(long, default_value_t = 1_000_000)]
    horizon: u64,
    /// Seed for the optional Monte Carlo column.
    #[arg(long, default_value_t = 1)]
    seed: u64,
}

#[derive(Clone, Copy, ValueEnum)]
enum SweepTaskArg {
    /// Island mean absorption time over an (alpha, beta) grid.
    PhaseDiagram,
    /// Half-full ring absorption time over the grid, per ring size.
    RingScaling,
}

#[derive(Args)]
struct SweepArgs {
    /// What to estimate at each cell.
    #[arg(long, value_enum)]
    task: SweepTaskArg,
    /// Alpha grid: comma list (`0.1,0.2`) or `min:max:count`.
    #[arg(long)]
    alphas: String,
    /// Beta grid, same syntax.
    #[arg(long)]
    betas: String,
    /// Island length for phase-diagram.
    #[arg(long, default_value_t = 2)]
    len: usize,
    #[arg(long, value_enum, default_value = "plus")]
    side: SideArg,
    /// Ring sizes for ring-scaling, comma list.
    #[arg(long, default_value = "8,16,32,64")]
    sizes: String,
    #[arg(long, default_value_t = 1_000)]
    replicates: u64,
    #[arg(long, default_value_t = 100_000)]
    horizon: u64,
    #[arg(long)]
    seed: u64,
    /// Output file; a `<out>.manifest.json` sidecar is written too.
    #[arg(long)]
    out: PathBuf,
    /// Write a JSON array instead of CSV.
    #[arg(long)]
    json: bool,
}

/// A failure with the exit code it maps to.
struct CliError {
    message: String,
    code: u8,
}

impl CliError {
    fn domain(message: impl Into<String>) -> Self {
        CliError {
            message: message.into(),
            code: 2,
        }
    }

    fn tolerance(message: impl Into<String>) -> Self {
        CliError {
            message: message.into(),
            code: 1,
        }
    }

    fn io(e: impl std::fmt::Display) -> Self {
        CliError {
            message: e.to_string(),
            code: 2,
        }
    }
}

impl From<analytics::AnalyticsError> for CliError {
    fn from(e: analytics::AnalyticsError) -> Self {
        CliError::domain(e.to_string())
    }
}

/// Floats as CSV fields: integers keep one decimal (`8.0`), everything
/// else prints shortest-round-trip; infinities print `inf`.
fn fmt_value(v: f64) -> String {
    if v.is_infinite() {
        format!("{}inf", if v < 0.0 { "-" } else { "" })
    } else if v.fract() == 0.0 && v.abs() < 1e15 {
        format!("{v:.1}")
    } else {
        format!("{v}")
    }
}

fn fmt_ext(v: ExtReal) -> String {
    match v {
        ExtReal::Finite(x) => fmt_value(x),
        ExtReal::Infinite => "inf".to_string(),
    }
}

fn need(opt: Option<u64>, flag: &str) -> Result<u64, CliError> {
    opt.ok_or_else(|| CliError::domain(format!("this query needs --{flag}")))
}

fn run_exact(args: &ExactArgs) -> Result<(), CliError> {
    let p = args.params.params()?;
    let side: Side = args.side.unwrap_or(SideArg::Plus).into();
    let line = match args.query {
        ExactQuery::Gamma => fmt_value(analytics::gamma(&p)?),
        ExactQuery::H => fmt_value(analytics::absorption_prob_plus(&p, need(args.i, "i")?)?),
        ExactQuery::Hhat => fmt_value(analytics::absorption_prob_minus(&p, need(args.i, "i")?)?),
        ExactQuery::ExpHitX => fmt_ext(analytics::expected_hit_plus(&p, need(args.i, "i")?)?),
        ExactQuery::ExpHitY => fmt_ext(analytics::expected_hit_minus(&p, need(args.i, "i")?)?),
        ExactQuery::Gambler => fmt_value(analytics::gambler_win_prob(
            &p,
            need(args.i, "i")?,
            need(args.n, "n")?,
        )?),
        ExactQuery::RingTime => fmt_value(analytics::ring_expected_absorption(
            &p,
            need(args.i, "i")?,
            need(args.n, "n")?,
        )?),
        ExactQuery::Phase => {
            let v = analytics::phase_classify(&p, side)?;
            if args.json {
                println!(
                    "{}",
                    serde_json::json!({
                        "side": side.to_string(),
                        "mean_time": match v.mean_time {
                            MeanTime::Finite => "finite",
                            MeanTime::Infinite => "infinite",
                        },
                        "boundary": v.boundary,
                    })
                );
                return Ok(());
            }
            match v.mean_time {
                MeanTime::Finite => "finite".to_string(),
                MeanTime::Infinite => "infinite".to_string(),
            }
        }
        ExactQuery::EroderBound => {
            let giant = need(args.giant, "giant")? as usize;
            if giant == 0 {
                return Err(CliError::domain("--giant must be positive"));
            }
            let background = match side {
                Side::Plus => Cell::Minus,
                Side::Minus => Cell::Plus,
            };
            let mu =
                ArchipelagoMeasure::point(WindowConfig::contiguous_island(background, 0, giant));
            let b = analytics::eroder_bound(&mu, &p)?;
            if !args.json {
                println!("lower,upper,k1,k2");
            }
            format!(
                "{},{},{},{}",
                fmt_ext(b.lower),
                fmt_ext(b.upper),
                b.k1.map(fmt_value).unwrap_or_default(),
                b.k2.map(fmt_value).unwrap_or_default()
            )
        }
        ExactQuery::Degenerate => analytics::degenerate_behavior(&p)?.to_string(),
    };
    if args.json {
        println!("{}", serde_json::json!({ "value": line }));
    } else {
        println!("{line}");
    }
    Ok(())
}

fn print_estimate(e: &Estimate, json: bool) {
    if json {
        println!("{}", serde_json::to_string(e).expect("serializable"));
        return;
    }
    println!("point,std_error,replicates,censored,horizon,seed");
    println!(
        "{},{},{},{},{},{}",
        fmt_value(e.point),
        fmt_value(e.std_error),
        e.replicates,
        e.censored,
        e.horizon,
        e.seed
    );
}

fn print_mean_outcome(out: &MeanOutcome, json: bool) {
    match out {
        MeanOutcome::Estimated(e) => print_estimate(e, json),
        MeanOutcome::AllCensored {
            replicates,
            horizon,
            seed,
        } => {
            if json {
                println!("{}", serde_json::to_string(out).expect("serializable"));
            } else {
                // flagged row: no point to report, everything censored
                println!("point,std_error,replicates,censored,horizon,seed");
                println!(",,{replicates},{replicates},{horizon},{seed}");
            }
        }
    }
}

/// Random ordered pair of rings from one uniform draw per site: the
/// lower ring keeps a plus only where the upper one drew a plus too.
fn random_ordered_pair(n: usize, rng: &StepRng) -> (RingConfig, RingConfig) {
    let mut lower = Vec::with_capacity(n);
    let mut upper = Vec::with_capacity(n);
    for k in 0..n {
        let u = rng.uniform(0, k as i64);
        upper.push(if u < 0.6 { Cell::Plus } else { Cell::Minus });
        lower.push(if u < 0.3 { Cell::Plus } else { Cell::Minus });
    }
    (
        RingConfig::new(lower).expect("n > 0"),
        RingConfig::new(upper).expect("n > 0"),
    )
}

fn run_simulate(args: &SimulateArgs) -> Result<(), CliError> {
    let p = args.params.params()?;
    let side: Side = args.side.into();
    match args.kind {
        SimKind::Ring => {
            let n = args.n.ok_or_else(|| CliError::domain("ring needs --n"))?;
            if n == 0 {
                return Err(CliError::domain("--n must be positive"));
            }
            let block = args.block.unwrap_or(n / 2);
            if block > n {
                return Err(CliError::domain("--block cannot exceed --n"));
            }
            let start = InitialConfig::Ring(RingConfig::block(n, block).expect("checked"));
            let out =
                estimate_mean_absorption(&start, &p, args.replicates, args.horizon, args.seed);
            print_mean_outcome(&out, args.json);
        }
        SimKind::Island | SimKind::Absorbed => {
            let len = args
                .len
                .ok_or_else(|| CliError::domain("island needs --len"))?;
            if len == 0 {
                return Err(CliError::domain(
                    "--len 0 is the uniform configuration; nothing to estimate",
                ));
            }
            let background = match side {
                Side::Plus => Cell::Minus,
                Side::Minus => Cell::Plus,
            };
            let start =
                InitialConfig::Window(WindowConfig::contiguous_island(background, 0, len));
            if matches!(args.kind, SimKind::Island) {
                let out =
                    estimate_mean_absorption(&start, &p, args.replicates, args.horizon, args.seed);
                print_mean_outcome(&out, args.json);
            } else {
                let e =
                    estimate_absorption_prob(&start, &p, args.replicates, args.horizon, args.seed);
                print_estimate(&e, args.json);
            }
        }
        SimKind::Jump => {
            let e = estimate_front_speed(
                args.kind_jump.into(),
                &p,
                args.steps,
                args.replicates,
                args.seed,
            );
            print_estimate(&e, args.json);
        }
        SimKind::Coupled => {
            let n = args.n.unwrap_or(8);
            if n == 0 {
                return Err(CliError::domain("--n must be positive"));
            }
            let rng = StepRng::new(args.seed);
            let (mut x, mut y) = random_ordered_pair(n, &rng.replicate_stream(0));
            let stream = rng.replicate_stream(1);
            let mut violations = 0u64;
            for t in 0..args.steps {
                x = step_ring(&x, &p, &stream, t);
                y = step_ring(&y, &p, &stream, t);
                let ordered = matches!(
                    compare_rings(&x, &y).expect("sizes match"),
                    Comparison::Precedes | Comparison::Equal
                );
                violations += u64::from(!ordered);
            }
            if args.json {
                println!("{}", serde_json::json!({ "violations": violations }));
            } else {
                println!("violations,{violations}");
            }
        }
    }
    Ok(())
}

/// Truncation size for reflecting birth-death approximations of the
/// infinite chain: far enough above `i_max` that the leaked mass is
/// below the comparison tolerance.
fn truncation_for(sub_unity_ratio: f64, i_max: u64) -> usize {
    let tail = (1e-14f64.ln() / sub_unity_ratio.ln()).ceil();
    (i_max as usize + (tail.max(1.0) as usize)).max(16)
}

struct CompareRow {
    alpha: f64,
    beta: f64,
    i: u64,
    n: Option<u64>,
    theory: f64,
    oracle: f64,
    mc: Option<f64>,
}

fn emit_compare(rows: &[CompareRow]) -> Result<(), CliError> {
    println!("alpha,beta,i,n,theory,oracle,mc,abs_err,rel_err");
    let mut worst: f64 = 0.0;
    for r in rows {
        let abs_err = (r.theory - r.oracle).abs();
        let rel_err = if r.theory == 0.0 {
            abs_err
        } else {
            abs_err / r.theory.abs()
        };
        worst = worst.max(rel_err);
        println!(
            "{},{},{},{},{},{},{},{},{}",
            fmt_value(r.alpha),
            fmt_value(r.beta),
            r.i,
            r.n.map(|n| n.to_string()).unwrap_or_default(),
            fmt_value(r.theory),
            fmt_value(r.oracle),
            r.mc.map(fmt_value).unwrap_or_default(),
            fmt_value(abs_err),
            fmt_value(rel_err)
        );
    }
    if worst > ORACLE_TOL {
        return Err(CliError::tolerance(format!(
            "worst relative error {worst:e} exceeds {ORACLE_TOL:e}"
        )));
    }
    Ok(())
}

fn compare_panel(args: &CompareArgs) -> Result<Vec<Params>, CliError> {
    match (args.alpha, args.beta) {
        (Some(a), Some(b)) => Ok(vec![
            Params::new(a, b).map_err(|e| CliError::domain(e.to_string()))?
        ]),
        (None, None) => Ok([(0.2, 0.3), (0.5, 0.5), (0.8, 0.8), (0.3, 0.5), (0.7, 0.2)]
            .iter()
            .map(|&(a, b)| Params::new(a, b).expect("panel in range"))
            .collect()),
        _ => Err(CliError::domain("--alpha and --beta go together")),
    }
}

fn mc_mean(p: &Params, start: InitialConfig, args: &CompareArgs) -> Option<f64> {
    if args.mc_replicates == 0 {
        return None;
    }
    match estimate_mean_absorption(&start, p, args.mc_replicates, args.horizon, args.seed) {
        MeanOutcome::Estimated(e) => Some(e.point),
        MeanOutcome::AllCensored { .. } => None,
    }
}

fn run_compare(args: &CompareArgs) -> Result<(), CliError> {
    let mut rows = Vec::new();
    match args.target {
        CompareTarget::RingTime => {
            if !(2..=12).contains(&args.n_max) {
                return Err(CliError::domain("--n-max must lie in 2..=12"));
            }
            for p in compare_panel(args)? {
                for n in 2..=args.n_max {
                    let chain = build_ring_chain(n, &p).map_err(|e| CliError::domain(e.to_string()))?;
                    let sol = solve_absorption(&chain, &[0, (1 << n) - 1])
                        .map_err(|e| CliError::domain(e.to_string()))?;
                    for i in 1..n {
                        let theory = analytics::ring_expected_absorption(&p, i as u64, n as u64)?;
                        let state = (1usize << i) - 1;
                        let oracle = sol.expected_time[state]
                            .finite()
                            .ok_or_else(|| CliError::domain("oracle found an infinite time"))?;
                        let mc = mc_mean(
                            &p,
                            InitialConfig::Ring(RingConfig::block(n, i).expect("i < n")),
                            args,
                        );
                        rows.push(CompareRow {
                            alpha: p.alpha(),
                            beta: p.beta(),
                            i: i as u64,
                            n: Some(n as u64),
                            theory,
                            oracle,
                            mc,
                        });
                    }
                }
            }
        }
        CompareTarget::ExpHitX | CompareTarget::ExpHitY => {
            let side = if matches!(args.target, CompareTarget::ExpHitX) {
                Side::Plus
            } else {
                Side::Minus
            };
            for p in compare_panel(args)? {
                let spec = analytics::BirthDeathSpec::island_length_walk(&p, side);
                if spec.up == 0.0 && spec.down == 0.0 {
                    return Err(CliError::domain("frozen walk: hitting times undefined"));
                }
                if spec.down <= spec.up {
                    return Err(CliError::domain(
                        "infinite-mean phase: nothing finite to compare (hypothesis: down rate > up rate)",
                    ));
                }
                let trunc = truncation_for(spec.up / spec.down, args.i_max);
                let chain = build_birth_death_chain(&spec, trunc, UpperBoundary::Reflecting)
                    .map_err(|e| CliError::domain(e.to_string()))?;
                let sol = solve_absorption(&chain, &[0])
                    .map_err(|e| CliError::domain(e.to_string()))?;
                for i in 1..=args.i_max {
                    let theory = analytics::expected_hit(&p, side, i)?
                        .finite()
                        .expect("finite phase checked above");
                    let oracle = sol.expected_time[i as usize]
                        .finite()
                        .ok_or_else(|| CliError::domain("oracle found an infinite time"))?;
                    let background = match side {
                        Side::Plus => Cell::Minus,
                        Side::Minus => Cell::Plus,
                    };
                    let mc = mc_mean(
                        &p,
                        InitialConfig::Window(WindowConfig::contiguous_island(
                            background, 0, i as usize,
                        )),
                        args,
                    );
                    rows.push(CompareRow {
                        alpha: p.alpha(),
                        beta: p.beta(),
                        i,
                        n: None,
                        theory,
                        oracle,
                        mc,
                    });
                }
            }
        }
        CompareTarget::Gambler => {
            if args.n < 2 {
                return Err(CliError::domain("--n must be at least 2"));
            }
            for p in compare_panel(args)? {
                let spec = analytics::BirthDeathSpec::block_walk(&p, args.n);
                if spec.up == 0.0 && spec.down == 0.0 {
                    return Err(CliError::domain("frozen walk: win probability undefined"));
                }
                let chain =
                    build_birth_death_chain(&spec, args.n as usize, UpperBoundary::Absorbing)
                        .map_err(|e| CliError::domain(e.to_string()))?;
                let sol = solve_absorption(&chain, &[args.n as usize])
                    .map_err(|e| CliError::domain(e.to_string()))?;
                for i in 1..args.n {
                    rows.push(CompareRow {
                        alpha: p.alpha(),
                        beta: p.beta(),
                        i,
                        n: Some(args.n),
                        theory: analytics::gambler_win_prob(&p, i, args.n)?,
                        oracle: sol.hit_probability[i as usize],
                        mc: None,
                    });
                }
            }
        }
        CompareTarget::H => {
            for p in compare_panel(args)? {
                let spec = analytics::BirthDeathSpec::island_length_walk(&p, Side::Plus);
                if spec.up == 0.0 {
                    return Err(CliError::domain(
                        "absorption probabilities need alpha > 0 and beta > 0 (gamma defined)",
                    ));
                }
                let ratio = (spec.down / spec.up).min(spec.up / spec.down).min(0.9);
                let trunc = truncation_for(ratio, args.i_max);
                let chain = build_birth_death_chain(&spec, trunc, UpperBoundary::Reflecting)
                    .map_err(|e| CliError::domain(e.to_string()))?;
                let sol = solve_absorption(&chain, &[0])
                    .map_err(|e| CliError::domain(e.to_string()))?;
                for i in 1..=args.i_max {
                    rows.push(CompareRow {
                        alpha: p.alpha(),
                        beta: p.beta(),
                        i,
                        n: None,
                        theory: analytics::absorption_prob_plus(&p, i)?,
                        oracle: sol.hit_probability[i as usize],
                        mc: None,
                    });
                }
            }
        }
    }
    emit_compare(&rows)
}

/// Parses `0.1,0.2,0.3` or `min:max:count` into a grid axis.
fn parse_axis(text: &str) -> Result<Vec<f64>, CliError> {
    let bad = |t: &str| CliError::domain(format!("cannot parse grid axis '{t}'"));
    if let Some((lo, rest)) = text.split_once(':') {
        let (hi, count) = rest.split_once(':').ok_or_else(|| bad(text))?;
        let lo: f64 = lo.parse().map_err(|_| bad(text))?;
        let hi: f64 = hi.parse().map_err(|_| bad(text))?;
        let count: usize = count.parse().map_err(|_| bad(text))?;
        if count < 2 {
            return Ok(vec![lo]);
        }
        let step = (hi - lo) / (count - 1) as f64;
        return Ok((0..count).map(|k| lo + step * k as f64).collect());
    }
    text.split(',')
        .map(|t| t.trim().parse().map_err(|_| bad(t)))
        .collect()
}

fn parse_sizes(text: &str) -> Result<Vec<usize>, CliError> {
    text.split(',')
        .map(|t| {
            t.trim()
                .parse()
                .map_err(|_| CliError::domain(format!("cannot parse size '{t}'")))
        })
        .collect()
}

fn run_sweep(args: &SweepArgs, argv: &[String]) -> Result<(), CliError> {
    let grid = SweepGrid {
        alphas: parse_axis(&args.alphas)?,
        betas: parse_axis(&args.betas)?,
    };
    let task = match args.task {
        SweepTaskArg::PhaseDiagram => {
            if args.len == 0 {
                return Err(CliError::domain(
                    "--len 0 is the uniform configuration; nothing to estimate",
                ));
            }
            SweepTask::IslandMeanAbsorption {
                side: args.side.into(),
                length: args.len,
                replicates: args.replicates,
                horizon: args.horizon,
            }
        }
        SweepTaskArg::RingScaling => {
            let sizes = parse_sizes(&args.sizes)?;
            if sizes.contains(&0) {
                return Err(CliError::domain("ring sizes must be positive"));
            }
            SweepTask::RingScaling {
                sizes,
                replicates: args.replicates,
                horizon: args.horizon,
            }
        }
    };
    let rows = montecarlo::sweep(&grid, &task, args.seed);

    if args.json {
        let body = serde_json::to_string_pretty(&rows).expect("serializable") + "\n";
        std::fs::write(&args.out, body).map_err(CliError::io)?;
    } else {
        let mut w = csv::WriterBuilder::new()
            .terminator(csv::Terminator::Any(b'\n'))
            .from_path(&args.out)
            .map_err(CliError::io)?;
        w.write_record([
            "alpha",
            "beta",
            "size",
            "point",
            "std_error",
            "replicates",
            "censored",
            "horizon",
            "seed",
            "error",
        ])
        .map_err(CliError::io)?;
        for r in &rows {
            w.write_record([
                fmt_value(r.alpha),
                fmt_value(r.beta),
                r.size.map(|n| n.to_string()).unwrap_or_default(),
                r.point.map(fmt_value).unwrap_or_default(),
                r.std_error.map(fmt_value).unwrap_or_default(),
                r.replicates.to_string(),
                r.censored.to_string(),
                r.horizon.to_string(),
                r.seed.to_string(),
                r.error.clone().unwrap_or_default(),
            ])
            .map_err(CliError::io)?;
        }
        w.flush().map_err(CliError::io)?;
    }

    let mut parameters = BTreeMap::new();
    parameters.insert("alphas".to_string(), args.alphas.clone());
    parameters.insert("betas".to_string(), args.betas.clone());
    parameters.insert("replicates".to_string(), args.replicates.to_string());
    parameters.insert("horizon".to_string(), args.horizon.to_string());
    match args.task {
        SweepTaskArg::PhaseDiagram => {
            parameters.insert("task".to_string(), "phase-diagram".to_string());
            parameters.insert("len".to_string(), args.len.to_string());
        }
        SweepTaskArg::RingScaling => {
            parameters.insert("task".to_string(), "ring-scaling".to_string());
            parameters.insert("sizes".to_string(), args.sizes.clone());
        }
    }
    RunManifest::new(argv.join(" "), parameters, Some(args.seed))
        .write_sidecar(&args.out)
        .map_err(CliError::io)?;
    Ok(())
}

fn main() -> ExitCode {
    let argv: Vec<String> = std::env::args().collect();
    let cli = Cli::parse();
    let result = match &cli.command {
        Command::Exact(args) => run_exact(args),
        Command::Simulate(args) => run_simulate(args),
        Command::Compare(args) => run_compare(args),
        Command::Sweep(args) => run_sweep(args, &argv),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {}", e.message);
            ExitCode::from(e.code)
        }
    }
}
