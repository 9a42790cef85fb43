//! Brute-force ground truth: exact finite Markov chains (the full
//! 2^n-state ring chain and tridiagonal birth-death chains) solved by
//! dense pivoted linear algebra. Every closed form in `pca-core`'s
//! analytics is validated against these solves.

use nalgebra::{DMatrix, DVector};
use pca_core::analytics::{AbsorbingSet, BirthDeathSpec, ExtReal};
use pca_core::params::Params;
use thiserror::Error;

/// Row-sum tolerance for chain construction.
const ROW_SUM_TOL: f64 = 1e-12;
/// States whose total absorption probability falls below `1 - REACH_TOL`
/// are reported as having infinite expected time.
const REACH_TOL: f64 = 1e-9;

#[derive(Debug, Error, PartialEq)]
pub enum OracleError {
    #[error("ring size must lie in 1..=12 (state count capped at 4096)")]
    RingTooLarge,
    #[error("chain rows must sum to 1 within {ROW_SUM_TOL}")]
    NotStochastic,
    #[error("chain needs at least one absorbing state")]
    NoAbsorbing,
    #[error("target must be a subset of the absorbing states")]
    BadTarget,
    #[error("truncation must be at least 2")]
    BadTruncation,
}

/// An explicitly enumerated absorbing Markov chain.
#[derive(Clone, Debug)]
pub struct ExactChain {
    transition: DMatrix<f64>,
    absorbing: Vec<usize>,
}

impl ExactChain {
    pub fn new(transition: DMatrix<f64>, absorbing: Vec<usize>) -> Result<Self, OracleError> {
        if absorbing.is_empty() {
            return Err(OracleError::NoAbsorbing);
        }
        let n = transition.nrows();
        for i in 0..n {
            let sum: f64 = transition.row(i).iter().sum();
            if (sum - 1.0).abs() > ROW_SUM_TOL {
                return Err(OracleError::NotStochastic);
            }
        }
        for &a in &absorbing {
            if transition[(a, a)] != 1.0 {
                return Err(OracleError::NotStochastic);
            }
        }
        Ok(ExactChain {
            transition,
            absorbing,
        })
    }

    pub fn num_states(&self) -> usize {
        self.transition.nrows()
    }

    pub fn transition(&self) -> &DMatrix<f64> {
        &self.transition
    }

    pub fn absorbing(&self) -> &[usize] {
        &self.absorbing
    }

    pub fn is_absorbing(&self, state: usize) -> bool {
        self.absorbing.contains(&state)
    }
}

/// Encodes a ring configuration as a state index: bit `k` set means
/// site `k` is a plus.
pub fn ring_state(cells: &[bool]) -> usize {
    cells
        .iter()
        .enumerate()
        .fold(0, |acc, (k, &plus)| acc | (usize::from(plus) << k))
}

/// State index of the contiguous block with pluses at sites `0..i`.
pub fn block_state(i: usize) -> usize {
    (1usize << i) - 1
}

fn theta(a0: bool, a1: bool, p: &Params) -> f64 {
    match (a0, a1) {
        (false, false) => 0.0,
        (true, false) => p.beta(),
        (false, true) => p.alpha(),
        (true, true) => 1.0,
    }
}

/// Full transition matrix of the synchronous rule on a ring of size
/// `n <= 12`: `P(C -> D)` is the product over sites of the plus or minus
/// probability of each neighbourhood. Both uniform states absorb.
pub fn build_ring_chain(n: usize, p: &Params) -> Result<ExactChain, OracleError> {
    if !(1..=12).contains(&n) {
        return Err(OracleError::RingTooLarge);
    }
    let states = 1usize << n;
    let mut transition = DMatrix::zeros(states, states);
    let mut thetas = vec![0.0; n];
    for c in 0..states {
        for (k, th) in thetas.iter_mut().enumerate() {
            let a0 = c >> k & 1 == 1;
            let a1 = c >> ((k + 1) % n) & 1 == 1;
            *th = theta(a0, a1, p);
        }
        for d in 0..states {
            let mut prob = 1.0;
            for (k, &th) in thetas.iter().enumerate() {
                prob *= if d >> k & 1 == 1 { th } else { 1.0 - th };
                if prob == 0.0 {
                    break;
                }
            }
            transition[(c, d)] = prob;
        }
    }
    ExactChain::new(transition, vec![0, states - 1])
}

/// How to close off the top of a truncated birth-death chain.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum UpperBoundary {
    /// The top state absorbs (the two-sided walk on `{0..n}`).
    Absorbing,
    /// Upward moves from the top are folded into holding, as a
    /// truncation-limit approximation of the infinite chain.
    Reflecting,
}

/// Tridiagonal chain on `{0..truncation}` with the spec's up/down/hold
/// rates on interior states and state 0 absorbing. When the spec
/// absorbs at an upper state, that state must equal the truncation.
pub fn build_birth_death_chain(
    spec: &BirthDeathSpec,
    truncation: usize,
    upper: UpperBoundary,
) -> Result<ExactChain, OracleError> {
    if truncation < 2 {
        return Err(OracleError::BadTruncation);
    }
    let top = truncation;
    let top_absorbing = match spec.absorbing {
        AbsorbingSet::Origin => upper == UpperBoundary::Absorbing,
        AbsorbingSet::OriginAnd(n) => {
            if n as usize != top {
                return Err(OracleError::BadTarget);
            }
            true
        }
    };
    let mut transition = DMatrix::zeros(top + 1, top + 1);
    transition[(0, 0)] = 1.0;
    for a in 1..top {
        transition[(a, a + 1)] = spec.up;
        transition[(a, a - 1)] = spec.down;
        transition[(a, a)] = spec.hold;
    }
    if top_absorbing {
        transition[(top, top)] = 1.0;
    } else {
        transition[(top, top - 1)] = spec.down;
        transition[(top, top)] = spec.hold + spec.up;
    }
    let absorbing = if top_absorbing {
        vec![0, top]
    } else {
        vec![0]
    };
    ExactChain::new(transition, absorbing)
}

/// Per-state absorption data: probability of ending in `target` and
/// expected time to reach the absorbing set (infinite when the chain
/// can avoid absorption).
#[derive(Clone, Debug)]
pub struct AbsorptionSolution {
    pub hit_probability: Vec<f64>,
    pub expected_time: Vec<ExtReal>,
}

/// First-step analysis over the transient block `Q`: solves
/// `(I-Q) h = R 1_target` for the hit probabilities and `(I-Q) m = 1`
/// for the expected times. States whose total absorption probability
/// is below `1 - 1e-9` get an infinite expected time. A singular
/// transient block (disconnected states) falls back to monotone
/// iteration, which converges to the minimal solution.
pub fn solve_absorption(
    chain: &ExactChain,
    target: &[usize],
) -> Result<AbsorptionSolution, OracleError> {
    if target.iter().any(|s| !chain.is_absorbing(*s)) {
        return Err(OracleError::BadTarget);
    }
    let n = chain.num_states();
    let transient: Vec<usize> = (0..n).filter(|s| !chain.is_absorbing(*s)).collect();
    let t = transient.len();
    let p = chain.transition();

    let mut q = DMatrix::zeros(t, t);
    for (i, &s) in transient.iter().enumerate() {
        for (j, &d) in transient.iter().enumerate() {
            q[(i, j)] = p[(s, d)];
        }
    }
    let r_target = DVector::from_iterator(
        t,
        transient
            .iter()
            .map(|&s| target.iter().map(|&a| p[(s, a)]).sum::<f64>()),
    );
    let r_all = DVector::from_iterator(
        t,
        transient
            .iter()
            .map(|&s| chain.absorbing().iter().map(|&a| p[(s, a)]).sum::<f64>()),
    );

    let system = DMatrix::identity(t, t) - &q;
    let lu = system.lu();
    let solve = |rhs: &DVector<f64>| -> DVector<f64> {
        if let Some(sol) = lu.solve(rhs) {
            sol
        } else {
            // minimal solution by monotone iteration from zero
            let mut x = DVector::zeros(t);
            for _ in 0..20_000 {
                x = rhs + &q * &x;
            }
            x
        }
    };

    let h = solve(&r_target);
    let g = solve(&r_all);
    let m = solve(&DVector::from_element(t, 1.0));

    let mut hit = vec![0.0; n];
    let mut time = vec![ExtReal::Finite(0.0); n];
    for &a in chain.absorbing() {
        hit[a] = if target.contains(&a) { 1.0 } else { 0.0 };
    }
    for (i, &s) in transient.iter().enumerate() {
        hit[s] = h[i];
        time[s] = if g[i] < 1.0 - REACH_TOL {
            ExtReal::Infinite
        } else {
            ExtReal::Finite(m[i])
        };
    }
    Ok(AbsorptionSolution {
        hit_probability: hit,
        expected_time: time,
    })
}
