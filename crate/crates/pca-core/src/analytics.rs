//! Closed-form quantities for the island-length walks and the finite
//! ring: absorption probabilities, expected hitting times, phase
//! classification, the limit mixture weight, and linear-in-giant
//! absorption-time bounds.
//!
//! Everything here is a pure function of value inputs. Infinite
//! expectations are a distinct [`ExtReal`] variant, never an overflowed
//! float; large powers of gamma are guarded through log space.

use core::fmt;

use crate::measure::ArchipelagoMeasure;
use crate::params::Params;

/// Which family of islands a quantity refers to: `Plus` for islands of
/// pluses on a minus background, `Minus` for the mirror image.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Side {
    Plus,
    Minus,
}

impl fmt::Display for Side {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Side::Plus => write!(f, "plus"),
            Side::Minus => write!(f, "minus"),
        }
    }
}

/// An extended real: a finite value or positive infinity.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum ExtReal {
    Finite(f64),
    Infinite,
}

impl ExtReal {
    pub fn is_finite(&self) -> bool {
        matches!(self, ExtReal::Finite(_))
    }

    pub fn finite(self) -> Option<f64> {
        match self {
            ExtReal::Finite(v) => Some(v),
            ExtReal::Infinite => None,
        }
    }
}

impl fmt::Display for ExtReal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ExtReal::Finite(v) => write!(f, "{v}"),
            ExtReal::Infinite => write!(f, "inf"),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum AnalyticsError {
    /// gamma needs alpha > 0 and beta > 0.
    GammaUndefined,
    /// The quantity is only defined for 0 < alpha < 1 and 0 < beta < 1;
    /// boundary parameters are described by [`degenerate_behavior`].
    DegenerateParams,
    /// [`degenerate_behavior`] called with interior parameters.
    NotDegenerate,
    /// Index outside the admissible range (e.g. i > n).
    BadIndex,
    /// A standing hypothesis of the classification is violated; the
    /// string names it.
    HypothesisViolated(&'static str),
}

impl fmt::Display for AnalyticsError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            AnalyticsError::GammaUndefined => {
                write!(f, "gamma undefined: needs alpha > 0 and beta > 0")
            }
            AnalyticsError::DegenerateParams => {
                write!(f, "degenerate parameters: see degenerate_behavior")
            }
            AnalyticsError::NotDegenerate => write!(f, "parameters are not degenerate"),
            AnalyticsError::BadIndex => write!(f, "index out of range"),
            AnalyticsError::HypothesisViolated(h) => write!(f, "hypothesis violated: {h}"),
        }
    }
}

/// Integer power with a log-space overflow guard: exponents whose
/// magnitude would overflow a double collapse to exactly 0 or infinity.
pub(crate) fn pow_int(base: f64, exp: i64) -> f64 {
    if exp == 0 {
        return 1.0;
    }
    if base == 0.0 {
        return if exp > 0 { 0.0 } else { f64::INFINITY };
    }
    if base.is_infinite() {
        return if exp > 0 { f64::INFINITY } else { 0.0 };
    }
    let log = exp as f64 * libm::log(base);
    if log > 700.0 {
        return f64::INFINITY;
    }
    if log < -700.0 {
        return 0.0;
    }
    // binary exponentiation; more accurate than exp(log)
    let mut acc = 1.0;
    let mut b = if exp > 0 { base } else { 1.0 / base };
    let mut e = exp.unsigned_abs();
    while e > 0 {
        if e & 1 == 1 {
            acc *= b;
        }
        b *= b;
        e >>= 1;
    }
    acc
}

fn require_interior(p: &Params) -> Result<(), AnalyticsError> {
    if p.is_degenerate() {
        Err(AnalyticsError::DegenerateParams)
    } else {
        Ok(())
    }
}

/// Down/up rate ratio of the plus-island length walk:
/// `(1-alpha)(1-beta) / (alpha beta)`. Equal to 1 exactly on the
/// critical line `alpha = 1 - beta`.
pub fn gamma(p: &Params) -> Result<f64, AnalyticsError> {
    if p.alpha() == 0.0 || p.beta() == 0.0 {
        return Err(AnalyticsError::GammaUndefined);
    }
    Ok(p.down_rate() / p.up_rate())
}

/// Probability that a plus island of length `i` ever disappears.
/// One in the subcritical and critical regimes, `gamma^i` above.
pub fn absorption_prob_plus(p: &Params, i: u64) -> Result<f64, AnalyticsError> {
    require_interior(p)?;
    if i == 0 || p.alpha() <= 1.0 - p.beta() {
        Ok(1.0)
    } else {
        Ok(pow_int(gamma(p)?, i as i64))
    }
}

/// Mirror image for minus islands: one when `alpha >= 1 - beta`,
/// `gamma^{-i}` below.
pub fn absorption_prob_minus(p: &Params, i: u64) -> Result<f64, AnalyticsError> {
    require_interior(p)?;
    if i == 0 || p.alpha() >= 1.0 - p.beta() {
        Ok(1.0)
    } else {
        Ok(pow_int(gamma(p)?, -(i as i64)))
    }
}

/// Probability that the island escapes to infinity instead of dying.
pub fn survival_prob(p: &Params, side: Side, i: u64) -> Result<f64, AnalyticsError> {
    let absorbed = match side {
        Side::Plus => absorption_prob_plus(p, i)?,
        Side::Minus => absorption_prob_minus(p, i)?,
    };
    Ok(1.0 - absorbed)
}

/// Expected time for a plus island of length `i` to disappear.
/// Infinite at and above the critical line. The piecewise closed form
/// simplifies to `i / (1 - alpha - beta)` below it.
pub fn expected_hit_plus(p: &Params, i: u64) -> Result<ExtReal, AnalyticsError> {
    require_interior(p)?;
    if i == 0 {
        return Ok(ExtReal::Finite(0.0));
    }
    if p.alpha() >= 1.0 - p.beta() {
        return Ok(ExtReal::Infinite);
    }
    let up = p.up_rate();
    let down = p.down_rate();
    let gi = 1.0 / gamma(p)?; // < 1 here
    let first = 1.0 / down + gi * gi / (up * (1.0 - gi));
    let value = if i == 1 {
        first
    } else {
        first + gi * (i - 1) as f64 / (up * (1.0 - gi))
    };
    Ok(ExtReal::Finite(value))
}

/// Mirror image for minus islands: infinite at and below the critical
/// line, otherwise simplifies to `i / (alpha + beta - 1)`.
pub fn expected_hit_minus(p: &Params, i: u64) -> Result<ExtReal, AnalyticsError> {
    require_interior(p)?;
    if i == 0 {
        return Ok(ExtReal::Finite(0.0));
    }
    if p.alpha() <= 1.0 - p.beta() {
        return Ok(ExtReal::Infinite);
    }
    let up = p.up_rate();
    let down = p.down_rate();
    let g = gamma(p)?; // < 1 here
    let first = 1.0 / up + g * g / (down * (1.0 - g));
    let value = if i == 1 {
        first
    } else {
        first + g * (i - 1) as f64 / (down * (1.0 - g))
    };
    Ok(ExtReal::Finite(value))
}

pub fn expected_hit(p: &Params, side: Side, i: u64) -> Result<ExtReal, AnalyticsError> {
    match side {
        Side::Plus => expected_hit_plus(p, i),
        Side::Minus => expected_hit_minus(p, i),
    }
}

/// `(1 - gamma^i) / (1 - gamma^n)` computed stably for any gamma != 1.
fn geometric_ratio(g: f64, i: i64, n: i64) -> f64 {
    if g < 1.0 {
        (1.0 - pow_int(g, i)) / (1.0 - pow_int(g, n))
    } else {
        // rewrite through negative powers so large gamma^n never appears
        (pow_int(g, -n) - pow_int(g, i - n)) / (pow_int(g, -n) - 1.0)
    }
}

/// Probability that the two-sided walk on `{0..N}` reaches `N` before 0
/// from `i`: `i/N` on the critical line, else `(1-gamma^i)/(1-gamma^N)`.
pub fn gambler_win_prob(p: &Params, i: u64, n: u64) -> Result<f64, AnalyticsError> {
    if n < 1 || i > n {
        return Err(AnalyticsError::BadIndex);
    }
    if p.up_rate() == 0.0 && p.down_rate() == 0.0 {
        return Err(AnalyticsError::DegenerateParams);
    }
    if p.is_boundary() {
        return Ok(i as f64 / n as f64);
    }
    let g = p.down_rate() / p.up_rate(); // may be +inf when up = 0
    Ok(geometric_ratio(g, i as i64, n as i64))
}

/// Expected time for the lazy two-sided walk (up `alpha beta`, down
/// `(1-alpha)(1-beta)`, absorbing `{0, n}`) to absorb from `i`.
///
/// `(i n - i^2) / (2 alpha (1-alpha))` on the critical line, otherwise
/// `[i - n (1-gamma^i)/(1-gamma^n)] / (1 - alpha - beta)`. This is the
/// sign-corrected form of a commonly quoted expression; see
/// `docs/errata.md` and the oracle equivalence suite.
pub fn ring_expected_absorption(p: &Params, i: u64, n: u64) -> Result<f64, AnalyticsError> {
    require_interior(p)?;
    if n < 2 || i == 0 || i >= n {
        return Err(AnalyticsError::BadIndex);
    }
    let (i_f, n_f) = (i as f64, n as f64);
    if p.is_boundary() {
        let a = p.alpha();
        return Ok((i_f * n_f - i_f * i_f) / (2.0 * a * (1.0 - a)));
    }
    let g = gamma(p)?;
    let ratio = geometric_ratio(g, i as i64, n as i64);
    Ok((i_f - n_f * ratio) / (1.0 - p.alpha() - p.beta()))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum MeanTime {
    Finite,
    Infinite,
}

/// Whether the mean absorption time of a single-sided island mixture is
/// finite, as a pure function of the parameters and the side.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct PhaseVerdict {
    pub side: Side,
    pub mean_time: MeanTime,
    /// Set when `alpha = 1 - beta` exactly (infinite mean on both sides).
    pub boundary: bool,
}

pub fn phase_classify(p: &Params, side: Side) -> Result<PhaseVerdict, AnalyticsError> {
    let finite = match side {
        Side::Plus => {
            if p.beta() >= 1.0 {
                return Err(AnalyticsError::HypothesisViolated("beta < 1"));
            }
            p.alpha() < 1.0 - p.beta()
        }
        Side::Minus => {
            if p.alpha() <= 0.0 {
                return Err(AnalyticsError::HypothesisViolated("alpha > 0"));
            }
            p.alpha() > 1.0 - p.beta()
        }
    };
    Ok(PhaseVerdict {
        side,
        mean_time: if finite {
            MeanTime::Finite
        } else {
            MeanTime::Infinite
        },
        boundary: p.is_boundary(),
    })
}

/// Limit mixture weight of the all-pluses state: the summed weights of
/// the minus-island components. Zero for a pure mixture of plus islands,
/// one for a pure mixture of minus islands. Valid whenever the process
/// converges componentwise (alpha > 0, beta < 1).
pub fn limit_lambda(mu: &ArchipelagoMeasure) -> f64 {
    mu.minus_island_weight()
}

/// Two-sided bound on the mixture mean absorption time, linear in the
/// giant component length.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct EroderBound {
    /// Mean death time of the shortest possible island.
    pub lower: ExtReal,
    /// Mean death time of an island as long as the giant.
    pub upper: ExtReal,
    /// Reporting constants of the linear bound (when finite):
    /// `k1 + gamma^{-1} k2` is the length-1 mean and `k2` the per-length
    /// increment on the plus side (mirrored on the minus side).
    pub k1: Option<f64>,
    pub k2: Option<f64>,
}

const INFINITE_BOUND: EroderBound = EroderBound {
    lower: ExtReal::Infinite,
    upper: ExtReal::Infinite,
    k1: None,
    k2: None,
};

/// Bounds the mixture mean absorption time of `mu`. A mixed-side
/// mixture, or a single-sided one in its infinite-mean phase, gets the
/// infinite bound; in the finite phase the bound is
/// `[mean(1), mean(giant)]`, witnessing the `k (1 + giant)` linear form.
pub fn eroder_bound(mu: &ArchipelagoMeasure, p: &Params) -> Result<EroderBound, AnalyticsError> {
    require_interior(p)?;
    let side = match mu.single_side() {
        Some(side) => side,
        None => return Ok(INFINITE_BOUND),
    };
    if phase_classify(p, side)?.mean_time == MeanTime::Infinite {
        return Ok(INFINITE_BOUND);
    }
    let g = gamma(p)?;
    let up = p.up_rate();
    let down = p.down_rate();
    let (k1, k2) = match side {
        Side::Plus => (1.0 / down, (1.0 / g) / (up * (1.0 - 1.0 / g))),
        Side::Minus => (1.0 / up, g / (down * (1.0 - g))),
    };
    Ok(EroderBound {
        lower: expected_hit(p, side, 1)?,
        upper: expected_hit(p, side, mu.giant() as u64)?,
        k1: Some(k1),
        k2: Some(k2),
    })
}

/// How the island-length walk behaves when alpha or beta sits on the
/// boundary of [0,1].
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum DegenerateBehavior {
    /// The walk collapses to zero: `P(X_t > eps) -> 0`.
    Dies,
    /// Escape has positive probability: `P(X_t -> inf | X_0 > 0) > 0`.
    Escapes,
    /// The walk is frozen: `X_t = X_0` for all t.
    Frozen,
}

impl fmt::Display for DegenerateBehavior {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            DegenerateBehavior::Dies => write!(f, "P(X_t>eps)->0"),
            DegenerateBehavior::Escapes => write!(f, "P(X_t->inf|X_0>0)>0"),
            DegenerateBehavior::Frozen => write!(f, "X_t=X_0 for all t"),
        }
    }
}

/// Classifies boundary parameters for the plus-island length walk;
/// rejects interior parameters.
pub fn degenerate_behavior(p: &Params) -> Result<DegenerateBehavior, AnalyticsError> {
    let (a, b) = (p.alpha(), p.beta());
    if !p.is_degenerate() {
        return Err(AnalyticsError::NotDegenerate);
    }
    if (a == 0.0 && b == 1.0) || (a == 1.0 && b == 0.0) {
        Ok(DegenerateBehavior::Frozen)
    } else if a == 0.0 || b == 0.0 {
        Ok(DegenerateBehavior::Dies)
    } else {
        Ok(DegenerateBehavior::Escapes)
    }
}

/// Absorbing set of a birth and death chain.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum AbsorbingSet {
    /// Only the origin absorbs; the state space is the nonnegative
    /// integers.
    Origin,
    /// Origin and the given upper state both absorb.
    OriginAnd(u64),
}

/// An abstract lazy birth and death chain: up/down probabilities per
/// step, the rest holding, with the given absorbing set.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct BirthDeathSpec {
    pub up: f64,
    pub down: f64,
    pub hold: f64,
    pub absorbing: AbsorbingSet,
}

impl BirthDeathSpec {
    fn new(up: f64, down: f64, absorbing: AbsorbingSet) -> Self {
        BirthDeathSpec {
            up,
            down,
            hold: 1.0 - up - down,
            absorbing,
        }
    }

    /// Length walk of an island: up `alpha beta`, down
    /// `(1-alpha)(1-beta)` for pluses, rates swapped for minuses.
    pub fn island_length_walk(p: &Params, side: Side) -> Self {
        match side {
            Side::Plus => Self::new(p.up_rate(), p.down_rate(), AbsorbingSet::Origin),
            Side::Minus => Self::new(p.down_rate(), p.up_rate(), AbsorbingSet::Origin),
        }
    }

    /// Plus-run length walk of a block on a ring of size `n`: same rates,
    /// absorbing at both 0 and `n`.
    pub fn block_walk(p: &Params, n: u64) -> Self {
        Self::new(p.up_rate(), p.down_rate(), AbsorbingSet::OriginAnd(n))
    }

    /// The same two-sided walk with holding removed (moves every step):
    /// up `alpha beta / (alpha beta + (1-alpha)(1-beta))`.
    pub fn rescaled_gambler(p: &Params, n: u64) -> Result<Self, AnalyticsError> {
        let total = p.up_rate() + p.down_rate();
        if total == 0.0 {
            return Err(AnalyticsError::DegenerateParams);
        }
        Ok(Self::new(
            p.up_rate() / total,
            p.down_rate() / total,
            AbsorbingSet::OriginAnd(n),
        ))
    }
}
