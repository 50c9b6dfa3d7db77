//! Minimizers of the relaxed ROF functional.
//!
//! [`solve_rof`] is exact. On the interval grid of `f` the problem is
//!
//! ```text
//! min  |u_1 - a| + Σ |u_{i+1} - u_i| + |u_N - b| + Σ (λ/2) w_i (u_i - f_i)²
//! ```
//!
//! and is solved by a forward pass over convex piecewise-quadratic value
//! functions followed by back-substitution. The infimal convolution with `|·|`
//! that couples neighbours clips the value function's derivative to `[-1, 1]`
//! and records the two points where the clip starts; the backward pass clamps
//! each `u_i` into that window. Every answer is then proved optimal over all of
//! BV by [`verify_certificate`].
//!
//! [`solve_rof_oracle`] is an independent check: accelerated projected gradient
//! ascent on the dual of a uniform discretization, stopped by duality gap.

use serde::Serialize;

use crate::step::{linf_distance, relaxed_energy, BoundaryPair, RofInstance, StepFunction, EPS_AMP};
use crate::subdiff::{verify_certificate, CertificateReport, EPS_CERT};
use crate::{Error, Result};

/// Adjacent pieces whose coefficients agree this closely are fused.
const PRUNE_TOL: f64 = 1e-14;

/// `α t² + β t + c`
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Quadratic {
    pub alpha: f64,
    pub beta: f64,
    pub c: f64,
}

impl Quadratic {
    fn eval(&self, t: f64) -> f64 {
        (self.alpha * t + self.beta) * t + self.c
    }

    fn slope(&self, t: f64) -> f64 {
        2.0 * self.alpha * t + self.beta
    }

    fn linear(slope: f64, through: f64, value: f64) -> Self {
        Self { alpha: 0.0, beta: slope, c: value - slope * through }
    }

    fn close_to(&self, other: &Self) -> bool {
        let tol = |x: f64, y: f64| (x - y).abs() <= PRUNE_TOL * (1.0 + x.abs().max(y.abs()));
        tol(self.alpha, other.alpha) && tol(self.beta, other.beta) && tol(self.c, other.c)
    }
}

/// Convex, continuous piecewise quadratic on the real line. Piece `j` lives on
/// `(knots[j-1], knots[j])`, with the first and last pieces unbounded.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PiecewiseQuadratic {
    knots: Vec<f64>,
    pieces: Vec<Quadratic>,
}

impl PiecewiseQuadratic {
    /// `|t - center|`
    pub fn abs(center: f64) -> Self {
        Self {
            knots: vec![center],
            pieces: vec![Quadratic::linear(-1.0, center, 0.0), Quadratic::linear(1.0, center, 0.0)],
        }
    }

    pub fn knots(&self) -> &[f64] {
        &self.knots
    }

    pub fn pieces(&self) -> &[Quadratic] {
        &self.pieces
    }

    pub fn is_convex(&self) -> bool {
        self.pieces.iter().all(|p| p.alpha >= 0.0)
            && self.knots.iter().enumerate().all(|(k, &x)| {
                let (l, r) = (self.pieces[k].slope(x), self.pieces[k + 1].slope(x));
                r >= l - 1e-9 * (1.0 + l.abs())
            })
    }

    pub fn eval(&self, t: f64) -> f64 {
        self.pieces[self.knots.partition_point(|&k| k < t)].eval(t)
    }

    /// Adds `weight/2 · (t - center)²`.
    pub fn add_square(&mut self, weight: f64, center: f64) {
        for p in &mut self.pieces {
            p.alpha += 0.5 * weight;
            p.beta -= weight * center;
            p.c += 0.5 * weight * center * center;
        }
    }

    /// Adds `|t - center|`.
    pub fn add_abs(&mut self, center: f64) {
        let j = self.knots.partition_point(|&k| k < center);
        if self.knots.get(j) != Some(&center) {
            self.knots.insert(j, center);
            self.pieces.insert(j, self.pieces[j]);
        }
        for (i, p) in self.pieces.iter_mut().enumerate() {
            let s = if i <= j { -1.0 } else { 1.0 };
            p.beta += s;
            p.c -= s * center;
        }
    }

    /// Smallest `t` whose subdifferential reaches `level`. The function must be
    /// strictly convex on its outermost pieces so the crossing exists.
    pub fn level_point(&self, level: f64) -> f64 {
        let n = self.pieces.len();
        for j in 0..n {
            let right_slope = if j + 1 < n { self.pieces[j].slope(self.knots[j]) } else { f64::INFINITY };
            if right_slope < level {
                continue;
            }
            if j > 0 {
                let at_left = self.pieces[j].slope(self.knots[j - 1]);
                if at_left >= level {
                    return self.knots[j - 1];
                }
            }
            let p = &self.pieces[j];
            let t = (level - p.beta) / (2.0 * p.alpha);
            let lo = if j > 0 { self.knots[j - 1] } else { f64::NEG_INFINITY };
            let hi = if j + 1 < n { self.knots[j] } else { f64::INFINITY };
            return t.clamp(lo, hi);
        }
        unreachable!("the last piece has unbounded slope")
    }

    pub fn argmin(&self) -> f64 {
        self.level_point(0.0)
    }

    /// `t ↦ min_s self(s) + |t - s|`. Returns the result and the window
    /// `[lo, hi]` outside of which the derivative is clipped; the minimizing `s`
    /// for a given `t` is `clamp(t, lo, hi)`.
    pub fn inf_convolve_abs(&self) -> (Self, f64, f64) {
        let lo = self.level_point(-1.0);
        let hi = self.level_point(1.0);
        let mut knots = vec![lo];
        let mut pieces = vec![Quadratic::linear(-1.0, lo, self.eval(lo))];
        if hi > lo {
            let first = self.knots.partition_point(|&k| k <= lo);
            let last = self.knots.partition_point(|&k| k < hi);
            pieces.push(self.pieces[first]);
            for k in first..last {
                knots.push(self.knots[k]);
                pieces.push(self.pieces[k + 1]);
            }
            knots.push(hi);
        }
        pieces.push(Quadratic::linear(1.0, hi, self.eval(hi)));
        let mut out = Self { knots, pieces };
        out.prune();
        (out, lo, hi)
    }

    fn prune(&mut self) {
        let mut k = 0;
        while k < self.knots.len() {
            let degenerate = k + 1 < self.knots.len() && self.knots[k + 1] <= self.knots[k];
            if degenerate {
                // zero-width piece between two coincident knots
                self.knots.remove(k + 1);
                self.pieces.remove(k + 1);
            } else if self.pieces[k].close_to(&self.pieces[k + 1]) {
                self.knots.remove(k);
                self.pieces.remove(k + 1);
            } else {
                k += 1;
            }
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SolveStats {
    /// Grid intervals the dynamic program ran on.
    pub grid_intervals: usize,
    /// Largest knot count of any value function.
    pub max_knots: usize,
    /// Optimal value reported by the dynamic program itself.
    pub dp_value: f64,
    /// Grid refinements needed before the certificate verified.
    pub refinements: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SolveReport {
    pub minimizer: StepFunction,
    pub energy: f64,
    pub certificate: CertificateReport,
    pub stats: SolveStats,
}

/// Exact minimizer of `Σ (λ/2) w_i (u_i - f_i)² + TV + boundary penalties`
/// over grid functions.
fn solve_grid(widths: &[f64], data: &[f64], lambda: f64, phi: &BoundaryPair) -> (Vec<f64>, f64, usize) {
    let n = data.len();
    let mut value = PiecewiseQuadratic::abs(phi.a);
    let mut windows = Vec::with_capacity(n.saturating_sub(1));
    let mut max_knots = 1;
    for i in 0..n {
        if i > 0 {
            let (next, lo, hi) = value.inf_convolve_abs();
            windows.push((lo, hi));
            value = next;
        }
        value.add_square(lambda * widths[i], data[i]);
        max_knots = max_knots.max(value.knots.len());
    }
    value.add_abs(phi.b);
    debug_assert!(value.is_convex());

    let mut u = vec![0.0; n];
    u[n - 1] = value.argmin();
    let dp_value = value.eval(u[n - 1]);
    for i in (0..n - 1).rev() {
        let (lo, hi) = windows[i];
        u[i] = u[i + 1].clamp(lo, hi);
    }
    (u, dp_value, max_knots)
}

/// Splits every interval in two.
fn refine(widths: &[f64], data: &[f64]) -> (Vec<f64>, Vec<f64>) {
    let widths = widths.iter().flat_map(|&w| [0.5 * w, 0.5 * w]).collect();
    let data = data.iter().flat_map(|&v| [v, v]).collect();
    (widths, data)
}

const MAX_REFINEMENTS: usize = 2;

/// Exact minimizer of `Φ̄_{f,λ,φ}` for `λ > 0`, with its optimality certificate.
pub fn solve_rof(inst: &RofInstance) -> Result<SolveReport> {
    if inst.lambda <= 0.0 {
        return Err(Error::InvalidLambda(inst.lambda, "the minimizer is unique only for λ > 0"));
    }
    let f = &inst.f;
    let mut widths = f.widths();
    let mut data = f.values().to_vec();
    let mut refinements = 0;
    loop {
        let (u, dp_value, max_knots) = solve_grid(&widths, &data, inst.lambda, &inst.phi);
        let mut breaks = Vec::with_capacity(widths.len());
        let mut x = 0.0;
        for w in &widths[..widths.len() - 1] {
            x += w;
            breaks.push(x);
        }
        // Reuse f's own breakpoints when the grid was not refined, avoiding any
        // drift from re-summing widths.
        if refinements == 0 {
            breaks = f.breakpoints().to_vec();
        }
        let minimizer = StepFunction::new(f.length(), breaks, u)?;
        let certificate = verify_certificate(&minimizer, inst)?;
        let stats = SolveStats { grid_intervals: widths.len(), max_knots, dp_value, refinements };
        if certificate.feasible {
            let energy = relaxed_energy(&minimizer, inst)?;
            return Ok(SolveReport { minimizer, energy, certificate, stats });
        }
        if refinements == MAX_REFINEMENTS {
            return Err(Error::CertificateFailed(format!(
                "candidate rejected with worst violation {:e}",
                certificate.worst_violation
            )));
        }
        (widths, data) = refine(&widths, &data);
        refinements += 1;
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct OracleConfig {
    pub grid_n: usize,
    pub max_iter: usize,
    /// Stop once the primal-dual gap drops below this.
    pub tol: f64,
}

impl Default for OracleConfig {
    fn default() -> Self {
        Self { grid_n: 2048, max_iter: 2_000_000, tol: 1e-9 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct OracleSolution {
    pub solution: StepFunction,
    pub gap: f64,
    pub iterations: usize,
    /// The answer came from the exact solve on the detected jump pattern
    /// rather than from the iterate itself.
    pub polished: bool,
}

/// Discretized problem on `n` equal cells. Edge `e` of `n + 1` carries the
/// difference `u_e - u_{e-1}`, with `u_{-1} = a` and `u_n = b` as anchors.
struct Discrete {
    f: Vec<f64>,
    h: f64,
    lambda: f64,
    a: f64,
    b: f64,
}

impl Discrete {
    /// `u(p) = f - Dᵀp / (λh)` with `(Dᵀp)_j = p_j - p_{j+1}`.
    fn primal(&self, p: &[f64], u: &mut [f64]) {
        let s = 1.0 / (self.lambda * self.h);
        for (j, uj) in u.iter_mut().enumerate() {
            *uj = self.f[j] - s * (p[j] - p[j + 1]);
        }
    }

    /// `D u - c`, the dual gradient.
    fn edge_diffs(&self, u: &[f64], out: &mut [f64]) {
        let n = u.len();
        out[0] = u[0] - self.a;
        for e in 1..n {
            out[e] = u[e] - u[e - 1];
        }
        out[n] = self.b - u[n - 1];
    }

    fn primal_value(&self, u: &[f64], diffs: &[f64]) -> f64 {
        let fid: f64 = u.iter().zip(&self.f).map(|(u, f)| (u - f).powi(2)).sum();
        0.5 * self.lambda * self.h * fid + diffs.iter().map(|d| d.abs()).sum::<f64>()
    }

    /// `D(p) = -‖Dᵀp‖²/(2λh) + pᵀ(D f - c)`.
    fn dual_value(&self, p: &[f64]) -> f64 {
        let n = self.f.len();
        let quad: f64 = (0..n).map(|j| (p[j] - p[j + 1]).powi(2)).sum();
        let mut lin = p[0] * (self.f[0] - self.a) + p[n] * (self.b - self.f[n - 1]);
        lin += p[1..n].iter().zip(self.f.windows(2)).map(|(pe, w)| pe * (w[1] - w[0])).sum::<f64>();
        -quad / (2.0 * self.lambda * self.h) + lin
    }

    fn gap(&self, u: &[f64], p: &[f64]) -> f64 {
        let mut diffs = vec![0.0; p.len()];
        self.edge_diffs(u, &mut diffs);
        self.primal_value(u, &diffs) - self.dual_value(p)
    }

    /// Exact primal-dual pair for the jump pattern of `u`: neighbours closer
    /// than `delta` (anchors included) are fused into one run, every other edge
    /// is saturated at the sign of its jump. Returns `None` when the resulting
    /// dual leaves `[-1, 1]`.
    fn polish(&self, u: &[f64], delta: f64) -> Option<(Vec<f64>, Vec<f64>)> {
        let n = u.len();
        let s = self.lambda * self.h;
        // extended sequence a, u_0, ..., u_{n-1}, b; edge e joins entries e and e+1
        let ext = |i: usize| if i == 0 { self.a } else if i == n + 1 { self.b } else { u[i - 1] };
        let mut p = vec![f64::NAN; n + 1];
        let mut runs = Vec::new();
        let mut start = 0;
        for (e, pe) in p.iter_mut().enumerate() {
            let d = ext(e + 1) - ext(e);
            if d.abs() > delta {
                *pe = d.signum();
                runs.push((start, e));
                start = e + 1;
            }
        }
        runs.push((start, n + 1));

        let mut out = vec![0.0; n];
        for &(lo, hi) in &runs {
            // cells lo-1 ..= hi-1 of u, clipped to the grid
            let first = lo.max(1) - 1;
            let last = hi.min(n);
            let cells = first..last;
            let value = if lo == 0 {
                self.a
            } else if hi == n + 1 {
                self.b
            } else {
                let m = (last - first) as f64;
                let mean = self.f[cells.clone()].iter().sum::<f64>() / m;
                mean - (p[lo - 1] - p[hi]) / (s * m)
            };
            for j in cells.clone() {
                out[j] = value;
            }
            if lo == 0 {
                // integrate backwards from the right edge, or centre the free constant
                let end = if hi == n + 1 { 0.0 } else { p[hi] };
                let mut q = end;
                for j in cells.clone().rev() {
                    q -= s * (out[j] - self.f[j]);
                    p[j] = q;
                }
                if hi == n + 1 {
                    p[n] = 0.0;
                    let (mn, mx) = p.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), &x| (a.min(x), b.max(x)));
                    let shift = 0.5 * (mn + mx);
                    p.iter_mut().for_each(|x| *x -= shift);
                }
            } else {
                let mut q = p[lo - 1];
                for j in cells.clone() {
                    q += s * (out[j] - self.f[j]);
                    if j + 1 < hi {
                        p[j + 1] = q;
                    }
                }
            }
        }
        if p.iter().any(|x| x.is_nan() || x.abs() > 1.0 + 1e-12) {
            return None;
        }
        p.iter_mut().for_each(|x| *x = x.clamp(-1.0, 1.0));
        Some((out, p))
    }
}

/// Fusion thresholds tried when polishing an iterate.
const POLISH_DELTAS: [f64; 4] = [1e-7, 1e-5, 1e-3, 1e-2];

/// Accelerated projected gradient ascent on the dual of the uniformly
/// discretized problem, with gradient-based restarts. At every gap check the
/// iterate's jump pattern is also solved exactly; that candidate is returned
/// instead whenever its own duality gap meets the tolerance.
pub fn solve_rof_oracle(inst: &RofInstance, cfg: &OracleConfig) -> Result<OracleSolution> {
    if inst.lambda <= 0.0 {
        return Err(Error::InvalidLambda(inst.lambda, "the oracle needs λ > 0"));
    }
    if cfg.grid_n == 0 {
        return Err(Error::InvalidParameter("oracle grid must have at least one cell".into()));
    }
    let n = cfg.grid_n;
    let length = inst.f.length();
    let h = length / n as f64;
    let f: Vec<f64> = (0..n).map(|j| inst.f.value_at((j as f64 + 0.5) * h)).collect();
    let prob = Discrete { f, h, lambda: inst.lambda, a: inst.phi.a, b: inst.phi.b };

    // ‖D Dᵀ‖ ≤ 4 for the path incidence matrix.
    let step = inst.lambda * h / 4.0;
    let mut p = vec![0.0; n + 1];
    let mut y = p.clone();
    let mut p_prev = p.clone();
    let mut u = vec![0.0; n];
    let mut grad = vec![0.0; n + 1];
    let mut momentum = 1.0f64;
    let mut gap = f64::INFINITY;
    let check_every = 32;

    for it in 0..cfg.max_iter {
        prob.primal(&y, &mut u);
        prob.edge_diffs(&u, &mut grad);
        p_prev.copy_from_slice(&p);
        let mut restart_dot = 0.0;
        for e in 0..=n {
            let next = (y[e] + step * grad[e]).clamp(-1.0, 1.0);
            restart_dot += (next - y[e]) * (next - p_prev[e]);
            p[e] = next;
        }
        // Ascent direction opposed to the momentum: restart.
        if restart_dot < 0.0 {
            momentum = 1.0;
        }
        let next_m = 0.5 * (1.0 + (1.0 + 4.0 * momentum * momentum).sqrt());
        let beta = (momentum - 1.0) / next_m;
        momentum = next_m;
        for e in 0..=n {
            y[e] = p[e] + beta * (p[e] - p_prev[e]);
        }

        if it % check_every == 0 || it + 1 == cfg.max_iter {
            prob.primal(&p, &mut u);
            prob.edge_diffs(&u, &mut grad);
            gap = prob.primal_value(&u, &grad) - prob.dual_value(&p);
            if gap <= cfg.tol {
                let solution = StepFunction::uniform(length, u.clone())?;
                return Ok(OracleSolution { solution, gap, iterations: it + 1, polished: false });
            }
            for delta in POLISH_DELTAS {
                if let Some((pu, pp)) = prob.polish(&u, delta) {
                    let polished_gap = prob.gap(&pu, &pp);
                    if polished_gap <= cfg.tol {
                        let solution = StepFunction::uniform(length, pu)?;
                        return Ok(OracleSolution { solution, gap: polished_gap, iterations: it + 1, polished: true });
                    }
                }
            }
        }
    }
    Err(Error::NonConvergence { iterations: cfg.max_iter, gap })
}

/// Implicit-Euler steps `u^{k+1} = argmin Φ̄_{u^k, 1/Δt, φ}`, starting from `f`,
/// stopping early once two iterates agree within [`EPS_AMP`].
pub fn prox_flow(f: &StepFunction, phi: &BoundaryPair, dt: f64, n_steps: usize) -> Result<Vec<StepFunction>> {
    if !(dt.is_finite() && dt > 0.0) {
        return Err(Error::InvalidParameter(format!("time step {dt} must be positive")));
    }
    let mut iterates = vec![f.clone()];
    for _ in 0..n_steps {
        let current = iterates.last().expect("non-empty");
        let inst = RofInstance::new(current.clone(), 1.0 / dt, *phi)?;
        let next = solve_rof(&inst)?.minimizer;
        let stationary = linf_distance(&next, current)? <= EPS_AMP;
        iterates.push(next);
        if stationary {
            break;
        }
    }
    Ok(iterates)
}

/// Tolerance used when reporting certificate soundness of solver outputs.
pub const CERT_SOUNDNESS: f64 = 1e-7;

impl SolveReport {
    /// The certificate verifies and its worst residual is within `tol`.
    pub fn certified(&self, tol: f64) -> bool {
        self.certificate.feasible && self.certificate.worst_violation <= tol.max(EPS_CERT)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::step::{lp_distance, tv_with_boundary, LpNorm};
    use proptest::prelude::*;

    fn example_s4(k: f64) -> StepFunction {
        StepFunction::new(2.0, vec![0.5, 1.0, 1.5], vec![0.0, -k, k, 0.0]).unwrap()
    }

    fn pair(a: f64, b: f64) -> BoundaryPair {
        BoundaryPair::new(a, b).unwrap()
    }

    /// Brute-force minimization over a value lattice for two-interval data.
    fn grid_search_two(inst: &RofInstance, lo: f64, hi: f64, steps: usize) -> (f64, f64, f64) {
        let f = &inst.f;
        let mut best = (f64::INFINITY, 0.0, 0.0);
        for i in 0..=steps {
            for j in 0..=steps {
                let x = lo + (hi - lo) * i as f64 / steps as f64;
                let y = lo + (hi - lo) * j as f64 / steps as f64;
                let u = StepFunction::new(f.length(), f.breakpoints().to_vec(), vec![x, y]).unwrap();
                let e = relaxed_energy(&u, inst).unwrap();
                if e < best.0 {
                    best = (e, x, y);
                }
            }
        }
        best
    }

    #[test]
    fn piecewise_quadratic_operations() {
        let mut v = PiecewiseQuadratic::abs(0.0);
        v.add_square(2.0, 3.0); // |t| + (t - 3)²
        assert!((v.argmin() - 2.5).abs() < 1e-15);
        let (m, lo, hi) = v.inf_convolve_abs();
        // slope of |t| + (t-3)² is 2t - 7 for t > 0, 2t - 5 for t < 0
        assert_eq!((lo, hi), (2.0, 3.0));
        assert!(m.is_convex());
        assert!((m.eval(2.5) - v.eval(2.5)).abs() < 1e-12);
        assert!((m.eval(10.0) - (v.eval(3.0) + 7.0)).abs() < 1e-12);
        assert!((m.eval(-10.0) - (v.eval(2.0) + 12.0)).abs() < 1e-12);
    }

    #[test]
    fn worked_example_minimizer_is_the_terminal_state() {
        let inst = RofInstance::new(example_s4(4.0), 0.25, pair(-1.0, 1.0)).unwrap();
        let rep = solve_rof(&inst).unwrap();
        let ut = StepFunction::uniform(2.0, vec![-1.0, 1.0]).unwrap();
        assert!(linf_distance(&rep.minimizer, &ut).unwrap() < 1e-12);
        let (lo, hi) = rep.certificate.z0_interval.unwrap();
        assert!((lo - 0.75).abs() < 1e-9 && (hi - 0.75).abs() < 1e-9);
    }

    #[test]
    fn constant_data_is_its_own_minimizer() {
        for lambda in [0.1, 1.0, 30.0] {
            let f = StepFunction::constant(1.5, -2.0).unwrap();
            let rep = solve_rof(&RofInstance::new(f.clone(), lambda, pair(-2.0, -2.0)).unwrap()).unwrap();
            assert_eq!(rep.minimizer, f);
            assert_eq!(rep.energy, 0.0);
        }
    }

    #[test]
    fn two_step_example_matches_grid_search() {
        let f = StepFunction::new(2.0, vec![1.0], vec![2.0, 0.0]).unwrap();
        let inst = RofInstance::new(f, 1.0, pair(0.0, 0.0)).unwrap();
        let rep = solve_rof(&inst).unwrap();
        assert_eq!(rep.minimizer, StepFunction::constant(2.0, 0.0).unwrap());
        assert!((rep.energy - 2.0).abs() < 1e-12);
        let (e, x, y) = grid_search_two(&inst, -1.0, 3.0, 400);
        assert!((e - 2.0).abs() < 1e-12 && x.abs() < 1e-12 && y.abs() < 1e-12);
    }

    #[test]
    fn zero_lambda_is_rejected() {
        let inst = RofInstance::new(example_s4(1.0), 0.0, pair(0.0, 0.0)).unwrap();
        assert!(matches!(solve_rof(&inst), Err(Error::InvalidLambda(..))));
        assert!(matches!(solve_rof_oracle(&inst, &OracleConfig::default()), Err(Error::InvalidLambda(..))));
    }

    #[test]
    fn oracle_reproduces_exact_examples() {
        let cases = [
            RofInstance::new(example_s4(4.0), 0.25, pair(-1.0, 1.0)).unwrap(),
            RofInstance::new(StepFunction::new(2.0, vec![1.0], vec![2.0, 0.0]).unwrap(), 1.0, pair(0.0, 0.0)).unwrap(),
        ];
        for inst in &cases {
            let exact = solve_rof(inst).unwrap().minimizer;
            let oracle = solve_rof_oracle(inst, &OracleConfig::default()).unwrap();
            assert!(linf_distance(&exact, &oracle.solution).unwrap() < 1e-6, "gap {}", oracle.gap);
        }
    }

    #[test]
    fn oracle_on_constant_data_stops_at_once() {
        let f = StepFunction::constant(1.0, 0.3).unwrap();
        let inst = RofInstance::new(f.clone(), 2.0, pair(0.3, 0.3)).unwrap();
        let out = solve_rof_oracle(&inst, &OracleConfig::default()).unwrap();
        assert_eq!(out.iterations, 1);
        assert_eq!(out.solution, f);
    }

    #[test]
    fn polishing_recovers_the_exact_grid_solution() {
        let f: Vec<f64> = (0..16).map(|j| if j < 5 { 2.0 } else if j < 11 { -1.0 } else { 0.5 }).collect();
        let prob = Discrete { f, h: 1.0 / 16.0, lambda: 4.0, a: 0.0, b: 1.0 };
        let g = StepFunction::uniform(1.0, prob.f.clone()).unwrap();
        let inst = RofInstance::new(g, 4.0, pair(0.0, 1.0)).unwrap();
        let exact = solve_rof(&inst).unwrap().minimizer;
        let target: Vec<f64> = (0..16).map(|j| exact.value_at((j as f64 + 0.5) / 16.0)).collect();
        // a slightly perturbed iterate carries the same jump pattern
        let noisy: Vec<f64> = target.iter().enumerate().map(|(j, v)| v + 1e-9 * (j % 3) as f64).collect();
        let (u, p) = prob.polish(&noisy, 1e-7).unwrap();
        assert!(u.iter().zip(&target).all(|(x, y)| (x - y).abs() < 1e-12));
        assert!(prob.gap(&u, &p).abs() < 1e-12);
    }

    #[test]
    fn oracle_reports_non_convergence() {
        let inst = RofInstance::new(example_s4(4.0), 0.25, pair(-1.0, 1.0)).unwrap();
        let cfg = OracleConfig { grid_n: 256, max_iter: 3, tol: 1e-12 };
        assert!(matches!(solve_rof_oracle(&inst, &cfg), Err(Error::NonConvergence { iterations: 3, .. })));
    }

    #[test]
    fn prox_flow_examples() {
        let phi = pair(-1.0, 1.0);
        let terminal = StepFunction::uniform(2.0, vec![-1.0, 0.0, 1.0]).unwrap();
        let it = prox_flow(&terminal, &phi, 0.5, 10).unwrap();
        assert_eq!(it.len(), 2);
        assert!(it.iter().all(|u| linf_distance(u, &terminal).unwrap() <= EPS_AMP));

        let it = prox_flow(&example_s4(4.0), &phi, 4.0, 1).unwrap();
        let ut = StepFunction::uniform(2.0, vec![-1.0, 1.0]).unwrap();
        assert!(linf_distance(&it[1], &ut).unwrap() < 1e-8);

        assert!(prox_flow(&terminal, &phi, 0.0, 1).is_err());
    }

    fn arb_step() -> impl Strategy<Value = StepFunction> {
        (1usize..=6)
            .prop_flat_map(|n| (prop::collection::btree_set(1u32..32, n - 1), prop::collection::vec(-5.0..5.0f64, n)))
            .prop_map(|(cuts, vals)| {
                StepFunction::new(2.0, cuts.into_iter().map(|c| c as f64 / 16.0).collect(), vals).unwrap()
            })
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]

        #[test]
        fn solver_output_is_certified(f in arb_step(), lambda in 0.05..20.0f64, a in -5.0..5.0f64, b in -5.0..5.0f64) {
            let inst = RofInstance::new(f, lambda, pair(a, b)).unwrap();
            let rep = solve_rof(&inst).unwrap();
            prop_assert!(rep.certified(1e-9));
            prop_assert!((rep.energy - rep.stats.dp_value).abs() <= 1e-9 * (1.0 + rep.energy));
        }

        #[test]
        fn solver_is_non_expansive(f1 in arb_step(), f2 in arb_step(), lambda in 0.05..20.0f64, a in -5.0..5.0f64, b in -5.0..5.0f64) {
            let phi = pair(a, b);
            let u1 = solve_rof(&RofInstance::new(f1.clone(), lambda, phi).unwrap()).unwrap().minimizer;
            let u2 = solve_rof(&RofInstance::new(f2.clone(), lambda, phi).unwrap()).unwrap().minimizer;
            let du = lp_distance(&u1, &u2, LpNorm::L2).unwrap();
            let df = lp_distance(&f1, &f2, LpNorm::L2).unwrap();
            prop_assert!(du <= df + 1e-10);
        }

        #[test]
        fn prox_flow_decreases_energy(f in arb_step(), dt in 0.01..2.0f64, a in -5.0..5.0f64, b in -5.0..5.0f64) {
            let phi = pair(a, b);
            let it = prox_flow(&f, &phi, dt, 40).unwrap();
            for w in it.windows(2) {
                prop_assert!(tv_with_boundary(&w[1], &phi) <= tv_with_boundary(&w[0], &phi) + 1e-10);
            }
        }
    }

    #[test]
    fn energy_is_stable_under_data_perturbation() {
        // φ_n → φ_0 and λ_n → λ_0: the perturbed minimizers, scored at the
        // limiting data, approach the optimal limiting energy.
        let f = StepFunction::new(2.0, vec![0.5, 1.25], vec![1.0, -2.0, 3.0]).unwrap();
        let base = RofInstance::new(f, 1.5, pair(0.5, -0.5)).unwrap();
        let optimal = solve_rof(&base).unwrap().energy;
        let mut prev_phi = f64::INFINITY;
        let mut prev_lambda = f64::INFINITY;
        for k in 1..=12 {
            let eps = 0.5f64.powi(k);
            let u = solve_rof(&base.with_phi(pair(0.5 + eps, -0.5 - eps))).unwrap().minimizer;
            let excess = relaxed_energy(&u, &base).unwrap() - optimal;
            assert!(excess >= -1e-12 && excess <= prev_phi + 1e-12 && excess <= 2.0 * eps);
            prev_phi = excess;

            let u = solve_rof(&base.with_lambda(1.5 + eps).unwrap()).unwrap().minimizer;
            let excess = relaxed_energy(&u, &base).unwrap() - optimal;
            assert!(excess >= -1e-12 && excess <= prev_lambda + 1e-12);
            prev_lambda = excess;
        }
        assert!(prev_phi < 1e-3 && prev_lambda < 1e-6);
    }
}
