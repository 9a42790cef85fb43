use alloc::vec::Vec;
use core::fmt;

use crate::config::{Cell, WindowConfig};
use crate::Side;

/// Absolute tolerance for the weight normalisation check.
pub const WEIGHT_TOL: f64 = 1e-12;

/// A finite mixture of point measures, each concentrated on a compact
/// perturbation of a uniform background. Weights are strictly positive
/// and sum to one.
#[derive(Clone, Debug)]
pub struct ArchipelagoMeasure {
    components: Vec<(f64, WindowConfig)>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum MeasureError {
    Empty,
    NonPositiveWeight,
    WeightsNotNormalized,
}

impl fmt::Display for MeasureError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            MeasureError::Empty => write!(f, "measure needs at least one component"),
            MeasureError::NonPositiveWeight => write!(f, "weights must be strictly positive"),
            MeasureError::WeightsNotNormalized => {
                write!(f, "weights must sum to 1 within {WEIGHT_TOL}")
            }
        }
    }
}

impl ArchipelagoMeasure {
    pub fn new(components: Vec<(f64, WindowConfig)>) -> Result<Self, MeasureError> {
        if components.is_empty() {
            return Err(MeasureError::Empty);
        }
        // NaN weights fail this check too
        if !components.iter().all(|(w, _)| *w > 0.0) {
            return Err(MeasureError::NonPositiveWeight);
        }
        let total: f64 = components.iter().map(|(w, _)| w).sum();
        if libm::fabs(total - 1.0) > WEIGHT_TOL {
            return Err(MeasureError::WeightsNotNormalized);
        }
        Ok(ArchipelagoMeasure { components })
    }

    /// Point mass on a single configuration.
    pub fn point(config: WindowConfig) -> Self {
        ArchipelagoMeasure {
            components: alloc::vec![(1.0, config)],
        }
    }

    pub fn components(&self) -> &[(f64, WindowConfig)] {
        &self.components
    }

    /// Greatest component island length. Finite by construction.
    pub fn giant(&self) -> usize {
        self.components
            .iter()
            .map(|(_, c)| c.length())
            .max()
            .unwrap_or(0)
    }

    /// `Some(side)` when every component perturbs the same background:
    /// `Side::Plus` for islands of pluses (minus background), `Side::Minus`
    /// for islands of minuses. `None` for a mixed measure.
    pub fn single_side(&self) -> Option<Side> {
        let bg = self.components[0].1.background();
        if self.components.iter().all(|(_, c)| c.background() == bg) {
            Some(match bg {
                Cell::Minus => Side::Plus,
                Cell::Plus => Side::Minus,
            })
        } else {
            None
        }
    }

    /// Total weight carried by islands of minuses (plus background).
    pub fn minus_island_weight(&self) -> f64 {
        self.components
            .iter()
            .filter(|(_, c)| c.background() == Cell::Plus)
            .map(|(w, _)| w)
            .sum()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    #[test]
    fn validates_weights() {
        let island = WindowConfig::contiguous_island(Cell::Minus, 0, 1);
        assert!(ArchipelagoMeasure::new(vec![]).is_err());
        assert!(ArchipelagoMeasure::new(vec![(0.0, island.clone()), (1.0, island.clone())]).is_err());
        assert!(ArchipelagoMeasure::new(vec![(0.6, island.clone()), (0.3, island.clone())]).is_err());
        assert!(ArchipelagoMeasure::new(vec![(0.6, island.clone()), (0.4, island)]).is_ok());
    }

    #[test]
    fn giant_is_largest_length() {
        let mu = ArchipelagoMeasure::new(vec![
            (0.5, WindowConfig::contiguous_island(Cell::Minus, 0, 2)),
            (0.5, WindowConfig::contiguous_island(Cell::Minus, 10, 7)),
        ])
        .unwrap();
        assert_eq!(mu.giant(), 7);
        assert_eq!(mu.single_side(), Some(Side::Plus));
        assert_eq!(mu.minus_island_weight(), 0.0);
    }
}
