//! Piecewise-constant functions on `(0, L)` and the relaxed ROF energy.
//!
//! A [`StepFunction`] holds breakpoints `0 < x_1 < ... < x_{N-1} < L` and one
//! value per open interval. Values are kept canonical: adjacent intervals never
//! carry the same value (up to [`EPS_AMP`]), so every stored breakpoint is a
//! genuine jump. Traces are the first and last interval values.

use serde::{Deserialize, Serialize};

use crate::{Error, Result};

/// Absolute amplitude tolerance used for canonicalization and level comparisons.
pub const EPS_AMP: f64 = 1e-12;

/// Relative tolerance for treating two domain lengths as the same.
const EPS_LENGTH: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct StepFunction {
    length: f64,
    breaks: Vec<f64>,
    values: Vec<f64>,
}

impl StepFunction {
    /// Builds a step function and merges equal neighbours.
    pub fn new(length: f64, breaks: Vec<f64>, values: Vec<f64>) -> Result<Self> {
        if !(length.is_finite() && length > 0.0) {
            return Err(Error::InvalidStep(format!("domain length {length} must be positive")));
        }
        if values.len() != breaks.len() + 1 {
            return Err(Error::InvalidStep(format!(
                "{} breakpoints need {} values, got {}",
                breaks.len(),
                breaks.len() + 1,
                values.len()
            )));
        }
        if let Some(v) = values.iter().find(|v| !v.is_finite()) {
            return Err(Error::InvalidStep(format!("non-finite value {v}")));
        }
        let mut prev = 0.0;
        for &x in &breaks {
            if !(x.is_finite() && x > prev && x < length) {
                return Err(Error::InvalidStep(format!(
                    "breakpoint {x} is not strictly increasing inside (0, {length})"
                )));
            }
            prev = x;
        }
        let (breaks, values) = canonicalize(length, &breaks, &values);
        Ok(Self { length, breaks, values })
    }

    pub fn constant(length: f64, value: f64) -> Result<Self> {
        Self::new(length, Vec::new(), vec![value])
    }

    /// Equal-width intervals carrying `values` in order.
    pub fn uniform(length: f64, values: Vec<f64>) -> Result<Self> {
        let n = values.len();
        if n == 0 {
            return Err(Error::InvalidStep("no values".into()));
        }
        let breaks = (1..n).map(|i| length * i as f64 / n as f64).collect();
        Self::new(length, breaks, values)
    }

    /// Samples `g` at the midpoints of `n` equal cells.
    pub fn sample_midpoints(length: f64, n: usize, g: impl Fn(f64) -> f64) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidParameter("sample count must be positive".into()));
        }
        let h = length / n as f64;
        let values = (0..n).map(|i| g((i as f64 + 0.5) * h)).collect();
        Self::uniform(length, values)
    }

    /// Same partition, new values (re-canonicalized).
    pub fn with_values(&self, values: Vec<f64>) -> Result<Self> {
        Self::new(self.length, self.breaks.clone(), values)
    }

    pub fn length(&self) -> f64 {
        self.length
    }

    pub fn breakpoints(&self) -> &[f64] {
        &self.breaks
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    /// Number of constant intervals.
    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn is_constant(&self) -> bool {
        self.values.len() == 1
    }

    /// `0, x_1, ..., x_{N-1}, L`.
    pub fn nodes(&self) -> Vec<f64> {
        let mut nodes = Vec::with_capacity(self.breaks.len() + 2);
        nodes.push(0.0);
        nodes.extend_from_slice(&self.breaks);
        nodes.push(self.length);
        nodes
    }

    pub fn interval(&self, i: usize) -> (f64, f64) {
        let left = if i == 0 { 0.0 } else { self.breaks[i - 1] };
        let right = if i + 1 == self.values.len() { self.length } else { self.breaks[i] };
        (left, right)
    }

    pub fn widths(&self) -> Vec<f64> {
        (0..self.len()).map(|i| {
            let (l, r) = self.interval(i);
            r - l
        }).collect()
    }

    /// Value at `x`; breakpoints belong to the interval on their right.
    pub fn value_at(&self, x: f64) -> f64 {
        let i = self.breaks.partition_point(|&b| b <= x);
        self.values[i]
    }

    /// Interior jumps as `(position, right value - left value)`.
    pub fn jumps(&self) -> impl Iterator<Item = (f64, f64)> + '_ {
        self.breaks
            .iter()
            .zip(self.values.windows(2))
            .map(|(&x, w)| (x, w[1] - w[0]))
    }

    /// `|Du|(0, L)`: the sum of absolute jump sizes.
    pub fn total_variation(&self) -> f64 {
        self.jumps().fold(0.0, |acc, (_, j)| acc + j.abs())
    }

    /// `(γu(0), γu(L))`.
    pub fn traces(&self) -> (f64, f64) {
        (self.values[0], self.values[self.values.len() - 1])
    }

    pub fn integral(&self) -> f64 {
        self.widths().iter().zip(&self.values).map(|(w, v)| w * v).sum()
    }

    pub fn mean(&self) -> f64 {
        self.integral() / self.length
    }

    pub fn min_value(&self) -> f64 {
        self.values.iter().copied().fold(f64::INFINITY, f64::min)
    }

    pub fn max_value(&self) -> f64 {
        self.values.iter().copied().fold(f64::NEG_INFINITY, f64::max)
    }

    /// `u + c`.
    pub fn shifted(&self, c: f64) -> Self {
        Self {
            length: self.length,
            breaks: self.breaks.clone(),
            values: self.values.iter().map(|v| v + c).collect(),
        }
    }

    pub fn is_canonical(&self) -> bool {
        self.values.windows(2).all(|w| (w[1] - w[0]).abs() > EPS_AMP)
    }

    pub(crate) fn same_domain(&self, other: &Self) -> Result<()> {
        if (self.length - other.length).abs() <= EPS_LENGTH * self.length.max(1.0) {
            Ok(())
        } else {
            Err(Error::DomainMismatch(self.length, other.length))
        }
    }
}

/// Merges neighbours whose values agree within [`EPS_AMP`]; merged values are
/// the width-weighted mean.
pub(crate) fn canonicalize(length: f64, breaks: &[f64], values: &[f64]) -> (Vec<f64>, Vec<f64>) {
    let mut out_breaks = Vec::with_capacity(breaks.len());
    let mut out_values: Vec<f64> = Vec::with_capacity(values.len());
    let mut run_mass = 0.0;
    let mut run_width = 0.0;
    for (i, &v) in values.iter().enumerate() {
        let left = if i == 0 { 0.0 } else { breaks[i - 1] };
        let right = if i == breaks.len() { length } else { breaks[i] };
        let w = right - left;
        match out_values.last_mut() {
            Some(last) if (v - *last).abs() <= EPS_AMP => {
                run_mass += w * v;
                run_width += w;
                if *last != v {
                    *last = run_mass / run_width;
                }
            }
            _ => {
                if !out_values.is_empty() {
                    out_breaks.push(left);
                }
                out_values.push(v);
                run_mass = w * v;
                run_width = w;
            }
        }
    }
    (out_breaks, out_values)
}

/// One cell of the common refinement of two step functions.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Cell {
    pub left: f64,
    pub right: f64,
    pub u: f64,
    pub v: f64,
}

impl Cell {
    pub fn width(&self) -> f64 {
        self.right - self.left
    }
}

/// Cells of the merged breakpoint grid of `u` and `v`.
pub fn overlay(u: &StepFunction, v: &StepFunction) -> Result<Vec<Cell>> {
    u.same_domain(v)?;
    let length = u.length;
    let mut cells = Vec::with_capacity(u.len() + v.len());
    let (mut i, mut j) = (0usize, 0usize);
    let mut left = 0.0;
    loop {
        let ru = u.breaks.get(i).copied().unwrap_or(length);
        let rv = v.breaks.get(j).copied().unwrap_or(length);
        let right = ru.min(rv);
        if right > left {
            cells.push(Cell { left, right, u: u.values[i], v: v.values[j] });
        }
        if i == u.breaks.len() && j == v.breaks.len() {
            break;
        }
        if ru <= right && i < u.breaks.len() {
            i += 1;
        }
        if rv <= right && j < v.breaks.len() {
            j += 1;
        }
        left = right;
    }
    Ok(cells)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BoundaryPair {
    /// `φ(0)`
    pub a: f64,
    /// `φ(L)`
    pub b: f64,
}

impl BoundaryPair {
    pub fn new(a: f64, b: f64) -> Result<Self> {
        if a.is_finite() && b.is_finite() {
            Ok(Self { a, b })
        } else {
            Err(Error::InvalidBoundary(format!("({a}, {b}) is not finite")))
        }
    }

    pub fn min(&self) -> f64 {
        self.a.min(self.b)
    }

    pub fn max(&self) -> f64 {
        self.a.max(self.b)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Monotonicity {
    Increasing,
    Decreasing,
    Constant,
    NonMonotone,
}

impl Monotonicity {
    pub fn is_monotone(self) -> bool {
        self != Monotonicity::NonMonotone
    }

    /// Weak comparisons with [`EPS_AMP`] slack.
    pub fn of(values: &[f64]) -> Self {
        let diffs = || values.windows(2).map(|w| w[1] - w[0]);
        if diffs().all(|d| d.abs() <= EPS_AMP) {
            Monotonicity::Constant
        } else if diffs().all(|d| d >= -EPS_AMP) {
            Monotonicity::Increasing
        } else if diffs().all(|d| d <= EPS_AMP) {
            Monotonicity::Decreasing
        } else {
            Monotonicity::NonMonotone
        }
    }
}

/// `(φ(0), u_1, ..., u_N, φ(L))`: the function extended by its boundary data.
#[derive(Debug, Clone, PartialEq)]
pub struct ExtendedProfile {
    values: Vec<f64>,
}

impl ExtendedProfile {
    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn monotonicity(&self) -> Monotonicity {
        Monotonicity::of(&self.values)
    }
}

pub fn tilde_extend(u: &StepFunction, phi: &BoundaryPair) -> (ExtendedProfile, Monotonicity) {
    let mut values = Vec::with_capacity(u.len() + 2);
    values.push(phi.a);
    values.extend_from_slice(&u.values);
    values.push(phi.b);
    let profile = ExtendedProfile { values };
    let verdict = profile.monotonicity();
    (profile, verdict)
}

/// The data triple `(f, λ, φ)`.
#[derive(Debug, Clone, PartialEq)]
pub struct RofInstance {
    pub f: StepFunction,
    pub lambda: f64,
    pub phi: BoundaryPair,
}

impl RofInstance {
    pub fn new(f: StepFunction, lambda: f64, phi: BoundaryPair) -> Result<Self> {
        if !(lambda.is_finite() && lambda >= 0.0) {
            return Err(Error::InvalidLambda(lambda, "must be finite and non-negative"));
        }
        Ok(Self { f, lambda, phi })
    }

    pub fn with_lambda(&self, lambda: f64) -> Result<Self> {
        Self::new(self.f.clone(), lambda, self.phi)
    }

    pub fn with_phi(&self, phi: BoundaryPair) -> Self {
        Self { f: self.f.clone(), lambda: self.lambda, phi }
    }
}

/// `|Du|(Ω) + (λ/2)∫(u - f)² + |γu(0) - a| + |γu(L) - b|`.
pub fn relaxed_energy(u: &StepFunction, inst: &RofInstance) -> Result<f64> {
    let fidelity: f64 = overlay(u, &inst.f)?
        .iter()
        .map(|c| c.width() * (c.u - c.v).powi(2))
        .sum();
    Ok(tv_with_boundary(u, &inst.phi) + 0.5 * inst.lambda * fidelity)
}

/// The energy at `λ = 0`: total variation plus both boundary penalties.
pub fn tv_with_boundary(u: &StepFunction, phi: &BoundaryPair) -> f64 {
    let (g0, gl) = u.traces();
    u.total_variation() + (g0 - phi.a).abs() + (gl - phi.b).abs()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LpNorm {
    L1,
    L2,
}

pub fn lp_distance(u: &StepFunction, v: &StepFunction, p: LpNorm) -> Result<f64> {
    let cells = overlay(u, v)?;
    Ok(match p {
        LpNorm::L1 => cells.iter().map(|c| c.width() * (c.u - c.v).abs()).sum(),
        LpNorm::L2 => cells
            .iter()
            .map(|c| c.width() * (c.u - c.v).powi(2))
            .sum::<f64>()
            .sqrt(),
    })
}

pub fn linf_distance(u: &StepFunction, v: &StepFunction) -> Result<f64> {
    Ok(overlay(u, v)?.iter().map(|c| (c.u - c.v).abs()).fold(0.0, f64::max))
}

pub fn lp_norm(u: &StepFunction, p: LpNorm) -> f64 {
    let zero = StepFunction { length: u.length, breaks: Vec::new(), values: vec![0.0] };
    lp_distance(u, &zero, p).expect("same domain")
}
