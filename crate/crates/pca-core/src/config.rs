use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

/// A lattice site state. `Minus` precedes `Plus` in the site order.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Cell {
    Minus,
    Plus,
}

impl Cell {
    pub fn flip(self) -> Cell {
        match self {
            Cell::Minus => Cell::Plus,
            Cell::Plus => Cell::Minus,
        }
    }
}

impl fmt::Display for Cell {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Cell::Minus => write!(f, "-"),
            Cell::Plus => write!(f, "+"),
        }
    }
}

/// Outcome of the componentwise comparison of two configurations.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Comparison {
    Precedes,
    Succeeds,
    Equal,
    Incomparable,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ConfigError {
    EmptyRing,
    SizeMismatch,
    BackgroundMismatch,
}

impl fmt::Display for ConfigError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ConfigError::EmptyRing => write!(f, "ring must have at least one cell"),
            ConfigError::SizeMismatch => write!(f, "rings have different sizes"),
            ConfigError::BackgroundMismatch => write!(f, "windows have different backgrounds"),
        }
    }
}

/// A circular configuration of fixed size, indexed modulo its length.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RingConfig {
    cells: Vec<Cell>,
}

impl RingConfig {
    pub fn new(cells: Vec<Cell>) -> Result<Self, ConfigError> {
        if cells.is_empty() {
            return Err(ConfigError::EmptyRing);
        }
        Ok(RingConfig { cells })
    }

    pub fn uniform(n: usize, cell: Cell) -> Result<Self, ConfigError> {
        Self::new(vec![cell; n])
    }

    /// A contiguous run of `plus_len` pluses starting at index 0,
    /// minuses elsewhere.
    pub fn block(n: usize, plus_len: usize) -> Result<Self, ConfigError> {
        assert!(plus_len <= n, "block longer than the ring");
        let mut cells = vec![Cell::Minus; n];
        for c in cells.iter_mut().take(plus_len) {
            *c = Cell::Plus;
        }
        Self::new(cells)
    }

    pub fn size(&self) -> usize {
        self.cells.len()
    }

    pub fn cells(&self) -> &[Cell] {
        &self.cells
    }

    /// Cell at position `i`, wrapping modulo the ring size.
    pub fn get(&self, i: i64) -> Cell {
        let n = self.cells.len() as i64;
        self.cells[(i.rem_euclid(n)) as usize]
    }

    /// `Some(cell)` when every site carries the same value.
    pub fn uniform_state(&self) -> Option<Cell> {
        let first = self.cells[0];
        self.cells.iter().all(|&c| c == first).then_some(first)
    }

    pub fn count(&self, cell: Cell) -> usize {
        self.cells.iter().filter(|&&c| c == cell).count()
    }
}

/// A compact perturbation of a uniform background: all cells outside the
/// stored window equal `background`. Construction trims the window so it
/// starts and ends on a non-background cell; the empty window is the
/// uniform configuration.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct WindowConfig {
    background: Cell,
    offset: i64,
    window: Vec<Cell>,
}

impl WindowConfig {
    pub fn new(background: Cell, offset: i64, cells: Vec<Cell>) -> Self {
        let first = cells.iter().position(|&c| c != background);
        match first {
            None => WindowConfig {
                background,
                offset: 0,
                window: Vec::new(),
            },
            Some(lo) => {
                let hi = cells.iter().rposition(|&c| c != background).unwrap();
                WindowConfig {
                    background,
                    offset: offset + lo as i64,
                    window: cells[lo..=hi].to_vec(),
                }
            }
        }
    }

    pub fn uniform(background: Cell) -> Self {
        WindowConfig {
            background,
            offset: 0,
            window: Vec::new(),
        }
    }

    /// A contiguous island of `len` non-background cells starting at
    /// lattice coordinate `offset`.
    pub fn contiguous_island(background: Cell, offset: i64, len: usize) -> Self {
        WindowConfig::new(background, offset, vec![background.flip(); len])
    }

    pub fn background(&self) -> Cell {
        self.background
    }

    pub fn offset(&self) -> i64 {
        self.offset
    }

    pub fn window(&self) -> &[Cell] {
        &self.window
    }

    pub fn is_uniform(&self) -> bool {
        self.window.is_empty()
    }

    /// Cell at absolute lattice coordinate `i`.
    pub fn get(&self, i: i64) -> Cell {
        if i < self.offset || i >= self.offset + self.window.len() as i64 {
            self.background
        } else {
            self.window[(i - self.offset) as usize]
        }
    }

    /// Span between the outermost non-background cells, inclusive.
    /// Zero for the uniform configuration. A single differing cell has
    /// length 1; interior background cells count towards the span.
    pub fn length(&self) -> usize {
        self.window.len()
    }

    /// Coordinates of the first and last non-background cell, if any.
    pub fn support(&self) -> Option<(i64, i64)> {
        if self.window.is_empty() {
            None
        } else {
            Some((self.offset, self.offset + self.window.len() as i64 - 1))
        }
    }
}

fn classify(any_less: bool, any_greater: bool) -> Comparison {
    match (any_less, any_greater) {
        (false, false) => Comparison::Equal,
        (true, false) => Comparison::Precedes,
        (false, true) => Comparison::Succeeds,
        (true, true) => Comparison::Incomparable,
    }
}

/// Componentwise comparison of two rings of the same size.
pub fn compare_rings(x: &RingConfig, y: &RingConfig) -> Result<Comparison, ConfigError> {
    if x.size() != y.size() {
        return Err(ConfigError::SizeMismatch);
    }
    let mut any_less = false;
    let mut any_greater = false;
    for (a, b) in x.cells().iter().zip(y.cells()) {
        any_less |= a < b;
        any_greater |= a > b;
    }
    Ok(classify(any_less, any_greater))
}

/// Componentwise comparison of two windows over the same background,
/// taken over the union of their supports (background elsewhere).
pub fn compare_windows(x: &WindowConfig, y: &WindowConfig) -> Result<Comparison, ConfigError> {
    if x.background() != y.background() {
        return Err(ConfigError::BackgroundMismatch);
    }
    let (lo, hi) = match (x.support(), y.support()) {
        (None, None) => return Ok(Comparison::Equal),
        (Some((a, b)), None) | (None, Some((a, b))) => (a, b),
        (Some((a, b)), Some((c, d))) => (a.min(c), b.max(d)),
    };
    let mut any_less = false;
    let mut any_greater = false;
    for i in lo..=hi {
        let (a, b) = (x.get(i), y.get(i));
        any_less |= a < b;
        any_greater |= a > b;
    }
    Ok(classify(any_less, any_greater))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bottom_ring_precedes_everything() {
        let bot = RingConfig::uniform(4, Cell::Minus).unwrap();
        let other = RingConfig::block(4, 2).unwrap();
        assert_eq!(compare_rings(&bot, &other).unwrap(), Comparison::Precedes);
        assert_eq!(compare_rings(&bot, &bot).unwrap(), Comparison::Equal);
    }

    #[test]
    fn nested_windows_precede() {
        let x = WindowConfig::contiguous_island(Cell::Minus, 0, 2);
        let y = WindowConfig::contiguous_island(Cell::Minus, 0, 3);
        assert_eq!(compare_windows(&x, &y).unwrap(), Comparison::Precedes);
    }

    #[test]
    fn shifted_rings_incomparable() {
        let x = RingConfig::new(vec![Cell::Plus, Cell::Minus]).unwrap();
        let y = RingConfig::new(vec![Cell::Minus, Cell::Plus]).unwrap();
        assert_eq!(compare_rings(&x, &y).unwrap(), Comparison::Incomparable);
    }

    #[test]
    fn mismatches_are_errors() {
        let x = RingConfig::uniform(2, Cell::Minus).unwrap();
        let y = RingConfig::uniform(3, Cell::Minus).unwrap();
        assert_eq!(compare_rings(&x, &y), Err(ConfigError::SizeMismatch));
        let w = WindowConfig::uniform(Cell::Minus);
        let v = WindowConfig::uniform(Cell::Plus);
        assert_eq!(compare_windows(&w, &v), Err(ConfigError::BackgroundMismatch));
    }

    #[test]
    fn length_counts_the_span() {
        let contiguous = WindowConfig::new(
            Cell::Minus,
            0,
            vec![Cell::Plus, Cell::Plus, Cell::Plus],
        );
        assert_eq!(contiguous.length(), 3);
        // interior background cells still count towards the span
        let gapped = WindowConfig::new(Cell::Minus, 0, vec![Cell::Plus, Cell::Minus, Cell::Plus]);
        assert_eq!(gapped.length(), 3);
        assert_eq!(WindowConfig::uniform(Cell::Minus).length(), 0);
    }

    #[test]
    fn construction_trims_background_margins() {
        let w = WindowConfig::new(
            Cell::Minus,
            -5,
            vec![Cell::Minus, Cell::Minus, Cell::Plus, Cell::Minus],
        );
        assert_eq!(w.offset(), -3);
        assert_eq!(w.window(), &[Cell::Plus]);
        assert_eq!(w.length(), 1);
    }
}
