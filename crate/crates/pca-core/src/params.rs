use core::fmt;

/// The two free parameters of the local rule.
///
/// `alpha` is the probability that a minus with a plus to its right
/// becomes a plus; `beta` is the probability that a plus with a minus to
/// its right stays a plus. Both live in `[0,1]`; construction rejects
/// anything else (including NaN).
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Params {
    alpha: f64,
    beta: f64,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ParamError {
    /// alpha or beta outside [0,1].
    OutOfRange,
}

impl fmt::Display for ParamError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ParamError::OutOfRange => write!(f, "alpha and beta must lie in [0,1]"),
        }
    }
}

impl Params {
    pub fn new(alpha: f64, beta: f64) -> Result<Self, ParamError> {
        if !(0.0..=1.0).contains(&alpha) || !(0.0..=1.0).contains(&beta) {
            return Err(ParamError::OutOfRange);
        }
        Ok(Params { alpha, beta })
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn beta(&self) -> f64 {
        self.beta
    }

    /// Up rate of the plus-island length walk.
    pub fn up_rate(&self) -> f64 {
        self.alpha * self.beta
    }

    /// Down rate of the plus-island length walk.
    pub fn down_rate(&self) -> f64 {
        (1.0 - self.alpha) * (1.0 - self.beta)
    }

    /// True exactly on the critical line `alpha = 1 - beta`.
    ///
    /// Detected on the parsed decimal values, no epsilon snapping.
    pub fn is_boundary(&self) -> bool {
        self.alpha + self.beta == 1.0
    }

    /// True when alpha or beta sits on the boundary of [0,1].
    pub fn is_degenerate(&self) -> bool {
        self.alpha == 0.0 || self.alpha == 1.0 || self.beta == 0.0 || self.beta == 1.0
    }
}
