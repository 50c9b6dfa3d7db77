//! Named instances used by the command line and the test suites.

use crate::step::{BoundaryPair, StepFunction};
use crate::Result;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct PresetInfo {
    pub name: &'static str,
    pub summary: &'static str,
    /// Accepts the `k` jump-height parameter.
    pub takes_k: bool,
}

pub const PRESETS: &[PresetInfo] = &[
    PresetInfo { name: "example-s4", summary: "flow of (0,-k,k,0) with φ = (-1,1) to its terminal state", takes_k: true },
    PresetInfo { name: "thm-4-1", summary: "boundary data equal to the data traces are attained", takes_k: false },
    PresetInfo { name: "thm-4-2", summary: "small data with φ at the mean gives a constant minimizer", takes_k: false },
    PresetInfo { name: "lemma-3-9-barriers", summary: "constant barriers bracketing the flow", takes_k: false },
    PresetInfo { name: "threshold", summary: "λ₁ for (0,-k,k,0) and the minimizer just below it", takes_k: true },
    PresetInfo { name: "large-gap", summary: "boundary jump beyond the variation bound is not attained", takes_k: false },
    PresetInfo { name: "instability-a", summary: "perturbing the data near the left end changes attainment", takes_k: false },
    PresetInfo { name: "instability-b", summary: "perturbing the left boundary datum changes attainment", takes_k: false },
    PresetInfo { name: "suite-all", summary: "every preset above", takes_k: false },
];

pub fn find(name: &str) -> Option<&'static PresetInfo> {
    PRESETS.iter().find(|p| p.name == name)
}

/// `(0, -k, k, 0)` on quarters of `(0, 2)` with `φ = (-1, 1)`.
pub fn example_s4(k: f64) -> Result<(StepFunction, BoundaryPair)> {
    Ok((crate::attain::four_step(k)?, BoundaryPair::new(-1.0, 1.0)?))
}

/// `(1, 3, 0)` on thirds of `(0, 3)` at `λ = 2`.
pub fn trace_inheritance() -> Result<(StepFunction, f64)> {
    Ok((StepFunction::new(3.0, vec![1.0, 2.0], vec![1.0, 3.0, 0.0])?, 2.0))
}

/// `(1, -1)` on halves of `(0, 1)` at `λ = 1`.
pub fn small_data() -> Result<(StepFunction, f64)> {
    Ok((StepFunction::new(1.0, vec![0.5], vec![1.0, -1.0])?, 1.0))
}

/// Data peaking at 5 with `φ = (-1, 1)` on `(0, 2)`.
pub fn barriers() -> Result<(StepFunction, BoundaryPair)> {
    Ok((StepFunction::new(2.0, vec![0.5, 1.5], vec![0.0, 5.0, -3.0])?, BoundaryPair::new(-1.0, 1.0)?))
}

/// `(2, 0)` on halves of `(0, 2)` at `λ = 1`.
pub fn large_gap() -> Result<(StepFunction, f64)> {
    Ok((StepFunction::new(2.0, vec![1.0], vec![2.0, 0.0])?, 1.0))
}

pub const INSTABILITY_EPSILONS: [f64; 3] = [0.25, 0.125, 0.0625];
