use crate::config::Cell;
use crate::params::Params;

/// The local transition table: probability of producing a plus given the
/// ordered neighbourhood `(a0, a1)` (a site and its right neighbour).
#[derive(Clone, Copy, Debug)]
pub struct TransitionTable {
    alpha: f64,
    beta: f64,
}

impl TransitionTable {
    pub fn new(p: &Params) -> Self {
        TransitionTable {
            alpha: p.alpha(),
            beta: p.beta(),
        }
    }

    /// theta(+|a0 a1). The minus probability is the complement.
    pub fn theta(&self, a0: Cell, a1: Cell) -> f64 {
        match (a0, a1) {
            (Cell::Minus, Cell::Minus) => 0.0,
            (Cell::Plus, Cell::Minus) => self.beta,
            (Cell::Minus, Cell::Plus) => self.alpha,
            (Cell::Plus, Cell::Plus) => 1.0,
        }
    }
}
