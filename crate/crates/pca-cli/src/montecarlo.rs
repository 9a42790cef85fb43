//! Replicated Monte Carlo estimation on top of the exact steppers:
//! mean absorption times, absorption probabilities, front speeds, and
//! parameter sweeps.
//!
//! Every replicate draws from its own counter-based stream derived from
//! (seed, replicate index), so results are bit-for-bit reproducible and
//! independent of the parallel schedule. Replicates that neither absorb
//! nor get censored early run to the horizon; censoring is always
//! reported, never silently dropped.

use pca_core::analytics::Side;
use pca_core::config::{Cell, RingConfig, WindowConfig};
use pca_core::dynamics::{
    run_ring_to_absorption, step_jump, step_window, JumpConfig, JumpKind, RingOutcome, StepRng,
};
use pca_core::params::Params;
use rayon::prelude::*;
use serde::Serialize;

/// A Monte Carlo point estimate with its standard error and the inputs
/// needed to reproduce it.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Estimate {
    pub point: f64,
    pub std_error: f64,
    pub replicates: u64,
    /// Replicates that hit the horizon or the escape cutoff without
    /// absorbing. Mean estimates average the uncensored ones only.
    pub censored: u64,
    pub horizon: u64,
    pub seed: u64,
}

/// A mean absorption time estimate, or the report that every replicate
/// was censored (no uncensored time to average).
#[derive(Clone, Debug, PartialEq, Serialize)]
pub enum MeanOutcome {
    Estimated(Estimate),
    AllCensored {
        replicates: u64,
        horizon: u64,
        seed: u64,
    },
}

/// Starting configuration of a replicated run.
#[derive(Clone, Debug)]
pub enum InitialConfig {
    Ring(RingConfig),
    Window(WindowConfig),
}

/// Derives the stream seed of one sweep cell or sub-run from a master
/// seed; same mixing as the replicate streams, different constant.
pub fn derive_seed(master: u64, index: u64) -> u64 {
    master ^ index.wrapping_mul(0x9e3779b97f4a7c15).rotate_left(23) ^ 0xd1342543de82ef95
}

/// Island length above which a supercritical island is censored early:
/// its absorption probability `g^len` has dropped below 1e-12, so the
/// truncation bias on mean absorption times is below that as well.
/// `None` when the island absorbs almost surely (no early exit is
/// sound); `Some(1)` when absorption is impossible from any positive
/// length (frozen or shrink-proof walks).
pub fn escape_threshold(p: &Params, side: Side) -> Option<u64> {
    let (up, down) = match side {
        Side::Plus => (p.up_rate(), p.down_rate()),
        Side::Minus => (p.down_rate(), p.up_rate()),
    };
    if up == 0.0 && down == 0.0 {
        return Some(1);
    }
    if up == 0.0 {
        return None; // can only shrink: absorbs almost surely
    }
    let g = down / up;
    if g >= 1.0 {
        None
    } else {
        let cutoff = (1e-12f64.ln() / g.ln()).ceil() as u64;
        Some(cutoff.max(1))
    }
}

fn window_side(w: &WindowConfig) -> Side {
    match w.background() {
        Cell::Minus => Side::Plus,
        Cell::Plus => Side::Minus,
    }
}

/// One window replicate with optional early escape censoring: returns
/// the absorption time, or `None` when censored (cutoff or horizon).
fn run_window_censored(
    start: &WindowConfig,
    p: &Params,
    rng: &StepRng,
    horizon: u64,
    cutoff: Option<u64>,
) -> Option<u64> {
    let mut state = start.clone();
    for t in 0..=horizon {
        if state.is_uniform() {
            return Some(t);
        }
        if let Some(c) = cutoff {
            if state.length() as u64 >= c {
                return None;
            }
        }
        if t == horizon {
            break;
        }
        state = step_window(&state, p, rng, t);
    }
    None
}

fn run_replicate(start: &InitialConfig, p: &Params, rng: &StepRng, horizon: u64) -> Option<u64> {
    match start {
        InitialConfig::Ring(c) => match run_ring_to_absorption(c.clone(), p, rng, horizon) {
            RingOutcome::Absorbed { time, .. } => Some(time),
            RingOutcome::TimedOut { .. } => None,
        },
        InitialConfig::Window(w) => {
            let cutoff = escape_threshold(p, window_side(w));
            run_window_censored(w, p, rng, horizon, cutoff)
        }
    }
}

fn replicate_times(
    start: &InitialConfig,
    p: &Params,
    replicates: u64,
    horizon: u64,
    seed: u64,
) -> Vec<Option<u64>> {
    let base = StepRng::new(seed);
    (0..replicates)
        .into_par_iter()
        .map(|r| run_replicate(start, p, &base.replicate_stream(r), horizon))
        .collect()
}

fn mean_and_se(values: &[f64]) -> (f64, f64) {
    let k = values.len() as f64;
    let mean = values.iter().sum::<f64>() / k;
    if values.len() < 2 {
        return (mean, 0.0);
    }
    let var = values.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / (k - 1.0);
    (mean, (var / k).sqrt())
}

/// Estimates the mean absorption time of `start`, averaging replicates
/// that absorbed before the horizon (and before the escape cutoff for
/// windows in a survival regime).
pub fn estimate_mean_absorption(
    start: &InitialConfig,
    p: &Params,
    replicates: u64,
    horizon: u64,
    seed: u64,
) -> MeanOutcome {
    let outcomes = replicate_times(start, p, replicates, horizon, seed);
    let times: Vec<f64> = outcomes.iter().flatten().map(|&t| t as f64).collect();
    if times.is_empty() {
        return MeanOutcome::AllCensored {
            replicates,
            horizon,
            seed,
        };
    }
    let censored = replicates - times.len() as u64;
    let (point, std_error) = mean_and_se(&times);
    MeanOutcome::Estimated(Estimate {
        point,
        std_error,
        replicates,
        censored,
        horizon,
        seed,
    })
}

/// Estimates the probability that `start` absorbs before the horizon,
/// with the binomial standard error.
pub fn estimate_absorption_prob(
    start: &InitialConfig,
    p: &Params,
    replicates: u64,
    horizon: u64,
    seed: u64,
) -> Estimate {
    let outcomes = replicate_times(start, p, replicates, horizon, seed);
    let absorbed = outcomes.iter().flatten().count() as u64;
    let r = replicates as f64;
    let point = absorbed as f64 / r;
    Estimate {
        point,
        std_error: (point * (1.0 - point) / r).sqrt(),
        replicates,
        censored: replicates - absorbed,
        horizon,
        seed,
    }
}

/// Mean leftward speed of a jump front over `steps` updates: positive
/// for a minus-plus front that invades, near zero for a frozen one.
pub fn estimate_front_speed(
    kind: JumpKind,
    p: &Params,
    steps: u64,
    replicates: u64,
    seed: u64,
) -> Estimate {
    let base = StepRng::new(seed);
    let speeds: Vec<f64> = (0..replicates)
        .into_par_iter()
        .map(|r| {
            let stream = base.replicate_stream(r);
            let mut j = JumpConfig { kind, front: 0 };
            for t in 0..steps {
                j = step_jump(&j, p, &stream, t);
            }
            -j.front as f64 / steps as f64
        })
        .collect();
    let (point, std_error) = mean_and_se(&speeds);
    Estimate {
        point,
        std_error,
        replicates,
        censored: 0,
        horizon: steps,
        seed,
    }
}

/// Exact (Clopper-Pearson) confidence interval for a binomial
/// proportion, for rare-event counts where the normal approximation is
/// useless. Intended for small `successes` (terms are summed directly);
/// `confidence` is the two-sided level, e.g. 0.95.
pub fn clopper_pearson(successes: u64, trials: u64, confidence: f64) -> (f64, f64) {
    assert!(successes <= trials && trials > 0);
    assert!((0.0..1.0).contains(&confidence));
    let tail = (1.0 - confidence) / 2.0;
    // log of C(trials, j) p^j (1-p)^(trials-j), summed for j = 0..=k
    let cdf = |k: u64, p: f64| -> f64 {
        let n = trials as f64;
        let mut lchoose = 0.0;
        let mut total = 0.0;
        for j in 0..=k {
            if j > 0 {
                let jf = j as f64;
                lchoose += ((n - jf + 1.0) / jf).ln();
            }
            total += (lchoose + j as f64 * p.ln() + (n - j as f64) * (1.0 - p).ln()).exp();
        }
        total.min(1.0)
    };
    let bisect = |f: &dyn Fn(f64) -> f64| -> f64 {
        let (mut lo, mut hi) = (0.0f64, 1.0f64);
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if f(mid) > 0.0 {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        0.5 * (lo + hi)
    };
    let lower = if successes == 0 {
        0.0
    } else {
        // largest p with P(X >= k | p) <= tail
        bisect(&|p| tail - (1.0 - cdf(successes - 1, p)))
    };
    let upper = if successes == trials {
        1.0
    } else {
        // smallest p with P(X <= k | p) <= tail
        bisect(&|p| cdf(successes, p) - tail)
    };
    (lower, upper)
}

/// Least-squares slope of `ln y` against `ln x`.
pub fn loglog_slope(points: &[(f64, f64)]) -> f64 {
    let n = points.len() as f64;
    let (mut sx, mut sy, mut sxx, mut sxy) = (0.0, 0.0, 0.0, 0.0);
    for &(x, y) in points {
        let (lx, ly) = (x.ln(), y.ln());
        sx += lx;
        sy += ly;
        sxx += lx * lx;
        sxy += lx * ly;
    }
    (n * sxy - sx * sy) / (n * sxx - sx * sx)
}

/// The parameter grid of a sweep; cells are visited alpha-major in the
/// order given.
#[derive(Clone, Debug)]
pub struct SweepGrid {
    pub alphas: Vec<f64>,
    pub betas: Vec<f64>,
}

/// What to estimate at each grid cell.
#[derive(Clone, Debug)]
pub enum SweepTask {
    /// Mean absorption time of a single contiguous island.
    IslandMeanAbsorption {
        side: Side,
        length: usize,
        replicates: u64,
        horizon: u64,
    },
    /// Mean absorption time of a half-full ring, one row per size.
    RingScaling {
        sizes: Vec<usize>,
        replicates: u64,
        horizon: u64,
    },
}

/// One output row of a sweep. `point` and `std_error` are absent when
/// every replicate was censored or the cell failed (`error` says how).
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SweepRow {
    pub alpha: f64,
    pub beta: f64,
    pub size: Option<u64>,
    pub point: Option<f64>,
    pub std_error: Option<f64>,
    pub replicates: u64,
    pub censored: u64,
    pub horizon: u64,
    pub seed: u64,
    pub error: Option<String>,
}

fn sweep_cell(
    alpha: f64,
    beta: f64,
    size: Option<u64>,
    task: &SweepTask,
    seed: u64,
) -> SweepRow {
    let (replicates, horizon) = match task {
        SweepTask::IslandMeanAbsorption {
            replicates,
            horizon,
            ..
        }
        | SweepTask::RingScaling {
            replicates,
            horizon,
            ..
        } => (*replicates, *horizon),
    };
    let mut row = SweepRow {
        alpha,
        beta,
        size,
        point: None,
        std_error: None,
        replicates,
        censored: 0,
        horizon,
        seed,
        error: None,
    };
    let p = match Params::new(alpha, beta) {
        Ok(p) => p,
        Err(e) => {
            row.error = Some(e.to_string());
            return row;
        }
    };
    let start = match task {
        SweepTask::IslandMeanAbsorption { side, length, .. } => {
            let background = match side {
                Side::Plus => Cell::Minus,
                Side::Minus => Cell::Plus,
            };
            InitialConfig::Window(WindowConfig::contiguous_island(background, 0, *length))
        }
        SweepTask::RingScaling { .. } => {
            let n = size.expect("ring task rows carry a size") as usize;
            InitialConfig::Ring(RingConfig::block(n, n / 2).expect("size > 0"))
        }
    };
    match estimate_mean_absorption(&start, &p, replicates, horizon, seed) {
        MeanOutcome::Estimated(e) => {
            row.point = Some(e.point);
            row.std_error = Some(e.std_error);
            row.censored = e.censored;
        }
        MeanOutcome::AllCensored { .. } => {
            row.censored = replicates;
        }
    }
    row
}

/// Runs `task` over every grid cell. Rows come back in canonical order
/// (alphas outer, betas inner, sizes innermost) regardless of the
/// parallel schedule, each cell on its own seed stream.
pub fn sweep(grid: &SweepGrid, task: &SweepTask, master_seed: u64) -> Vec<SweepRow> {
    let sizes: Vec<Option<u64>> = match task {
        SweepTask::IslandMeanAbsorption { .. } => vec![None],
        SweepTask::RingScaling { sizes, .. } => sizes.iter().map(|&n| Some(n as u64)).collect(),
    };
    let mut cells = Vec::new();
    for &alpha in &grid.alphas {
        for &beta in &grid.betas {
            for &size in &sizes {
                let index = cells.len() as u64;
                cells.push((alpha, beta, size, derive_seed(master_seed, index)));
            }
        }
    }
    cells
        .into_par_iter()
        .map(|(alpha, beta, size, seed)| sweep_cell(alpha, beta, size, task, seed))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn params(a: f64, b: f64) -> Params {
        Params::new(a, b).unwrap()
    }

    fn island(len: usize) -> InitialConfig {
        InitialConfig::Window(WindowConfig::contiguous_island(Cell::Minus, 0, len))
    }

    #[test]
    fn escape_thresholds() {
        assert_eq!(escape_threshold(&params(0.0, 1.0), Side::Plus), Some(1));
        assert_eq!(escape_threshold(&params(0.2, 0.3), Side::Plus), None);
        assert_eq!(escape_threshold(&params(0.8, 0.8), Side::Plus), Some(10));
        assert_eq!(escape_threshold(&params(0.8, 0.8), Side::Minus), None);
        assert_eq!(escape_threshold(&params(0.2, 0.3), Side::Minus), Some(13));
        assert_eq!(escape_threshold(&params(0.0, 0.5), Side::Plus), None);
    }

    #[test]
    fn mean_absorption_matches_linear_form() {
        // length-1 plus island at (0.2, 0.3): mean death time 2.0
        let out = estimate_mean_absorption(&island(1), &params(0.2, 0.3), 20_000, 2_000, 42);
        let e = match out {
            MeanOutcome::Estimated(e) => e,
            other => panic!("{other:?}"),
        };
        assert!(e.censored == 0, "censored = {}", e.censored);
        assert!(
            (e.point - 2.0).abs() < 4.0 * e.std_error,
            "point = {} se = {}",
            e.point,
            e.std_error
        );
        assert!(e.std_error < 0.05);
    }

    #[test]
    fn absorption_prob_matches_power_law() {
        // supercritical (0.8, 0.8): a length-1 island dies w.p. 1/16
        let e = estimate_absorption_prob(&island(1), &params(0.8, 0.8), 20_000, 10_000, 7);
        assert!(
            (e.point - 0.0625).abs() < 4.0 * e.std_error.max(1e-4),
            "point = {}",
            e.point
        );
        assert!(e.censored > 0);
    }

    #[test]
    fn frozen_corner_is_all_censored() {
        let out = estimate_mean_absorption(&island(2), &params(0.0, 1.0), 100, 1_000, 3);
        assert_eq!(
            out,
            MeanOutcome::AllCensored {
                replicates: 100,
                horizon: 1_000,
                seed: 3
            }
        );
    }

    #[test]
    fn front_speed_estimates_alpha() {
        let e = estimate_front_speed(JumpKind::MinusPlus, &params(0.3, 0.9), 5_000, 100, 11);
        assert!((e.point - 0.3).abs() < 0.02, "speed = {}", e.point);
        assert_eq!(e.censored, 0);
    }

    #[test]
    fn estimates_are_reproducible() {
        let a = estimate_mean_absorption(&island(2), &params(0.2, 0.3), 500, 1_000, 123);
        let b = estimate_mean_absorption(&island(2), &params(0.2, 0.3), 500, 1_000, 123);
        assert_eq!(a, b);
        let c = estimate_mean_absorption(&island(2), &params(0.2, 0.3), 500, 1_000, 124);
        assert_ne!(a, c);
    }

    #[test]
    fn standard_error_shrinks_like_root_replicates() {
        let se = |r| match estimate_mean_absorption(&island(1), &params(0.2, 0.3), r, 2_000, 5) {
            MeanOutcome::Estimated(e) => e.std_error,
            other => panic!("{other:?}"),
        };
        let ratio = se(2_000) / se(32_000);
        assert!((ratio - 4.0).abs() < 1.2, "ratio = {ratio}");
    }

    #[test]
    fn clopper_pearson_closed_forms() {
        // k = 0: upper solves (1-p)^n = tail
        let (lo, hi) = clopper_pearson(0, 50, 0.95);
        assert_eq!(lo, 0.0);
        assert!((hi - (1.0 - 0.025f64.powf(1.0 / 50.0))).abs() < 1e-9);
        // k = n mirrors it
        let (lo, hi) = clopper_pearson(50, 50, 0.95);
        assert_eq!(hi, 1.0);
        assert!((lo - 0.025f64.powf(1.0 / 50.0)).abs() < 1e-9);
        // reference interval for 1 success in 10 trials
        let (lo, hi) = clopper_pearson(1, 10, 0.95);
        assert!((lo - 0.00253).abs() < 2e-4, "lo = {lo}");
        assert!((hi - 0.44502).abs() < 2e-4, "hi = {hi}");
    }

    #[test]
    fn loglog_slope_recovers_exponent() {
        let pts: Vec<(f64, f64)> = (1..=6).map(|k| (k as f64, 3.0 * (k as f64).powi(2))).collect();
        assert!((loglog_slope(&pts) - 2.0).abs() < 1e-12);
    }

    #[test]
    fn sweep_rows_are_canonical_and_reproducible() {
        let grid = SweepGrid {
            alphas: vec![0.2, 0.3],
            betas: vec![0.3, 0.4, 0.5],
        };
        let task = SweepTask::RingScaling {
            sizes: vec![4],
            replicates: 200,
            horizon: 10_000,
        };
        let rows = sweep(&grid, &task, 9);
        assert_eq!(rows.len(), 6);
        assert_eq!(rows[0].alpha, 0.2);
        assert_eq!(rows[0].beta, 0.3);
        assert_eq!(rows[1].beta, 0.4);
        assert_eq!(rows[3].alpha, 0.3);
        assert!(rows.iter().all(|r| r.size == Some(4) && r.error.is_none()));
        assert_eq!(sweep(&grid, &task, 9), rows);
        assert_ne!(sweep(&grid, &task, 10), rows);
    }

    #[test]
    fn sweep_cells_fail_independently() {
        let grid = SweepGrid {
            alphas: vec![0.2, 1.5],
            betas: vec![0.3],
        };
        let task = SweepTask::IslandMeanAbsorption {
            side: Side::Plus,
            length: 1,
            replicates: 100,
            horizon: 500,
        };
        let rows = sweep(&grid, &task, 1);
        assert!(rows[0].error.is_none() && rows[0].point.is_some());
        assert!(rows[1].error.is_some() && rows[1].point.is_none());
    }
}
