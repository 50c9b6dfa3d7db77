//! Seeded random instances.
//!
//! Breakpoints are multiples of `L/64`, so every instance is exactly
//! representable on a uniform grid of any power-of-two size from 64 up.

use rand::seq::index::sample;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::step::{BoundaryPair, StepFunction};

pub const GRID_DIVISIONS: usize = 64;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Step function on `(0, length)` with between 1 and `max_intervals`
/// intervals and values uniform in `[lo, hi]`.
pub fn step_function<R: Rng>(rng: &mut R, length: f64, max_intervals: usize, lo: f64, hi: f64) -> StepFunction {
    let n = rng.gen_range(1..=max_intervals.clamp(1, GRID_DIVISIONS));
    let mut cuts = sample(rng, GRID_DIVISIONS - 1, n - 1).into_vec();
    cuts.sort_unstable();
    let breaks = cuts.into_iter().map(|c| (c + 1) as f64 * length / GRID_DIVISIONS as f64).collect();
    let values = (0..n).map(|_| rng.gen_range(lo..=hi)).collect();
    StepFunction::new(length, breaks, values).expect("generated data is valid")
}

pub fn boundary<R: Rng>(rng: &mut R, lo: f64, hi: f64) -> BoundaryPair {
    BoundaryPair::new(rng.gen_range(lo..=hi), rng.gen_range(lo..=hi)).expect("finite")
}

/// `(f₁, f₂)` with `f₁ ≤ f₂` everywhere: `f₂` adds a non-negative step
/// function to `f₁`.
pub fn ordered_pair<R: Rng>(rng: &mut R, length: f64, max_intervals: usize, lo: f64, hi: f64) -> (StepFunction, StepFunction) {
    let f1 = step_function(rng, length, max_intervals, lo, hi);
    let bump = step_function(rng, length, max_intervals, 0.0, (hi - lo) / 2.0);
    let cells = crate::step::overlay(&f1, &bump).expect("same domain");
    let breaks = cells[1..].iter().map(|c| c.left).collect();
    let values = cells.iter().map(|c| c.u + c.v).collect();
    (f1, StepFunction::new(length, breaks, values).expect("valid"))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn generators_are_deterministic_and_dyadic() {
        let a = step_function(&mut rng(7), 2.0, 6, -5.0, 5.0);
        let b = step_function(&mut rng(7), 2.0, 6, -5.0, 5.0);
        assert_eq!(a, b);
        for seed in 0..200 {
            let f = step_function(&mut rng(seed), 2.0, 6, -5.0, 5.0);
            assert!(f.len() <= 6);
            assert!(f.values().iter().all(|v| (-5.0..=5.0).contains(v)));
            assert!(f.breakpoints().iter().all(|x| (x * 32.0).fract() == 0.0));
        }
    }

    #[test]
    fn ordered_pairs_are_ordered() {
        for seed in 0..100 {
            let (f1, f2) = ordered_pair(&mut rng(seed), 2.0, 4, -5.0, 5.0);
            let cells = crate::step::overlay(&f1, &f2).unwrap();
            assert!(cells.iter().all(|c| c.u <= c.v));
        }
    }
}
