//! Property suites: the partial order, the monotone coupling, and the
//! exact equivalence between the compact-window stepper and a large
//! ring embedding it.

use proptest::prelude::*;

use pca_core::config::{compare_rings, compare_windows, Comparison};
use pca_core::dynamics::{coupled_step_ring, coupled_step_window, step_ring, step_window, StepRng};
use pca_core::{Cell, Params, RingConfig, WindowConfig};

fn cell() -> impl Strategy<Value = Cell> {
    prop_oneof![Just(Cell::Minus), Just(Cell::Plus)]
}

fn ring(n: usize) -> impl Strategy<Value = RingConfig> {
    prop::collection::vec(cell(), n).prop_map(|cells| RingConfig::new(cells).unwrap())
}

/// An ordered pair of rings: the lower one keeps a plus only where the
/// upper one has a plus and its own coin says so.
fn ordered_pair(n: usize) -> impl Strategy<Value = (RingConfig, RingConfig)> {
    (ring(n), prop::collection::vec(any::<bool>(), n)).prop_map(|(upper, keep)| {
        let lower: Vec<Cell> = upper
            .cells()
            .iter()
            .zip(keep)
            .map(|(&c, k)| if k { c } else { Cell::Minus })
            .collect();
        (RingConfig::new(lower).unwrap(), upper)
    })
}

fn interior_prob() -> impl Strategy<Value = f64> {
    (0.01f64..0.99).prop_map(|v| v)
}

fn is_ordered(c: Comparison) -> bool {
    matches!(c, Comparison::Precedes | Comparison::Equal)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    /// The comparison is reflexive and antisymmetric on rings.
    #[test]
    fn comparison_is_a_partial_order(x in ring(7), y in ring(7)) {
        prop_assert_eq!(compare_rings(&x, &x).unwrap(), Comparison::Equal);
        let xy = compare_rings(&x, &y).unwrap();
        let yx = compare_rings(&y, &x).unwrap();
        let flipped = match xy {
            Comparison::Precedes => Comparison::Succeeds,
            Comparison::Succeeds => Comparison::Precedes,
            other => other,
        };
        prop_assert_eq!(yx, flipped);
    }

    /// Coupled ring steps keep any ordered pair ordered, for random
    /// parameters, pairs, and seeds.
    #[test]
    fn coupling_preserves_ring_order(
        (lower, upper) in ordered_pair(8),
        a in interior_prob(),
        b in interior_prob(),
        seed in any::<u64>(),
    ) {
        let p = Params::new(a, b).unwrap();
        let rng = StepRng::new(seed);
        let (mut x, mut y) = (lower, upper);
        for t in 0..30 {
            let (nx, ny) = coupled_step_ring(&x, &y, &p, &rng, t).unwrap();
            prop_assert!(is_ordered(compare_rings(&nx, &ny).unwrap()));
            x = nx;
            y = ny;
        }
    }

    /// Window counterpart: a sub-island stays below the island.
    #[test]
    fn coupling_preserves_window_order(
        len in 1usize..6,
        extra in 0usize..4,
        a in interior_prob(),
        b in interior_prob(),
        seed in any::<u64>(),
    ) {
        let p = Params::new(a, b).unwrap();
        let rng = StepRng::new(seed);
        let mut x = WindowConfig::contiguous_island(Cell::Minus, 0, len);
        let mut y = WindowConfig::contiguous_island(Cell::Minus, 0, len + extra);
        for t in 0..30 {
            let (nx, ny) = coupled_step_window(&x, &y, &p, &rng, t).unwrap();
            prop_assert!(is_ordered(compare_windows(&nx, &ny).unwrap()));
            x = nx;
            y = ny;
        }
    }

    /// Construction normalises away background margins, so equality of
    /// the stored forms is equality of the configurations.
    #[test]
    fn construction_is_translation_covariant(
        cells in prop::collection::vec(cell(), 1..10),
        offset in -50i64..50,
        shift in -50i64..50,
    ) {
        let w = WindowConfig::new(Cell::Minus, offset, cells.clone());
        let v = WindowConfig::new(Cell::Minus, offset + shift, cells);
        prop_assert_eq!(w.length(), v.length());
        prop_assert_eq!(w.window(), v.window());
        if let (Some((a, _)), Some((c, _))) = (w.support(), v.support()) {
            prop_assert_eq!(c - a, shift);
        }
    }

    /// A window island and a ring embedding it far from the seam evolve
    /// identically, site for site, under the same seed: both consume
    /// the uniform keyed by (time, absolute site).
    #[test]
    fn window_equals_ring_embedding(
        len in 1usize..5,
        a in interior_prob(),
        b in interior_prob(),
        seed in any::<u64>(),
    ) {
        let p = Params::new(a, b).unwrap();
        let rng = StepRng::new(seed);
        let horizon = 40u64;
        // islands only grow leftward, one site per step at most
        let offset = horizon as i64 + 2;
        let n = offset as usize + len + 2;
        let mut w = WindowConfig::contiguous_island(Cell::Minus, offset, len);
        let mut cells = vec![Cell::Minus; n];
        for k in 0..len {
            cells[offset as usize + k] = Cell::Plus;
        }
        let mut r = RingConfig::new(cells).unwrap();
        for t in 0..horizon {
            for k in 0..n {
                prop_assert_eq!(r.get(k as i64), w.get(k as i64), "t={} site={}", t, k);
            }
            w = step_window(&w, &p, &rng, t);
            r = step_ring(&r, &p, &rng, t);
        }
    }
}
