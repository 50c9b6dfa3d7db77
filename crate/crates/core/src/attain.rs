//! Which boundary data a minimizer actually takes on, and checkers for the
//! positive and negative attainment results.
//!
//! Each checker returns a [`TheoremVerdict`]: whether its hypotheses held on
//! the given input and, if so, whether the conclusion did. A checker never
//! panics on a failed conclusion; the caller decides what a failure means.

use serde::Serialize;

use crate::rofsolve::{solve_rof, solve_rof_oracle, OracleConfig, SolveReport};
use crate::step::{linf_distance, lp_distance, BoundaryPair, LpNorm, RofInstance, StepFunction, EPS_AMP};
use crate::subdiff::{integrate_dual, verify_certificate, EPS_CERT};
use crate::tvflow::{evolve, evolve_exact, End};
use crate::{Error, Result};

/// Tolerance for "the minimizer equals this function".
pub const MATCH_TOL: f64 = 1e-8;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum AttainmentMode {
    /// The trace equals the boundary datum.
    Trace,
    /// The trace misses the datum, but `z` is pinned at the sign the relaxed
    /// condition requires.
    ViscosityOnly,
    /// Neither holds; only possible for a non-minimizer.
    Violated,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct EndpointAttainment {
    pub mode: AttainmentMode,
    /// Witness `z` at this endpoint, when a certificate exists.
    pub z: Option<f64>,
    pub trace: f64,
    pub phi: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct AttainmentReport {
    pub left: EndpointAttainment,
    pub right: EndpointAttainment,
}

impl AttainmentReport {
    pub fn both_trace(&self) -> bool {
        self.left.mode == AttainmentMode::Trace && self.right.mode == AttainmentMode::Trace
    }

    pub fn any_violated(&self) -> bool {
        self.left.mode == AttainmentMode::Violated || self.right.mode == AttainmentMode::Violated
    }

    pub fn endpoint(&self, end: End) -> &EndpointAttainment {
        match end {
            End::Left => &self.left,
            End::Right => &self.right,
        }
    }
}

/// `z(0)` must be `+1` when the trace lies above the datum and `-1` below it;
/// at `L` the signs flip.
fn required_sign(trace: f64, datum: f64, end: End) -> f64 {
    let s = if trace > datum { 1.0 } else { -1.0 };
    match end {
        End::Left => s,
        End::Right => -s,
    }
}

/// Classifies both endpoints of `u` using its certificate for `inst`.
pub fn classify_attainment(u: &StepFunction, inst: &RofInstance) -> Result<AttainmentReport> {
    let cert = verify_certificate(u, inst)?;
    let witness = cert.witness.as_ref();
    let (t0, tl) = u.traces();
    let one = |end: End, trace: f64, phi: f64| {
        let z = witness.map(|w| match end {
            End::Left => w.at_left(),
            End::Right => w.at_right(),
        });
        let mode = if (trace - phi).abs() <= EPS_AMP {
            AttainmentMode::Trace
        } else if z.is_some_and(|z| (z - required_sign(trace, phi, end)).abs() <= EPS_CERT) {
            AttainmentMode::ViscosityOnly
        } else {
            AttainmentMode::Violated
        };
        EndpointAttainment { mode, z, trace, phi }
    };
    Ok(AttainmentReport { left: one(End::Left, t0, inst.phi.a), right: one(End::Right, tl, inst.phi.b) })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Theorem {
    /// `φ = γf` is always attained.
    TraceInheritance,
    /// `λ‖f‖₁ ≤ 1` with `φ` the mean makes the mean the minimizer.
    SmallData,
    /// Below `λ₁` the minimizer is the terminal state of the flow.
    TerminalMinimizer,
    /// Data outside `(min φ, max φ)` at both ends gives `γu_T = φ`.
    TerminalTrace,
    /// As [`Theorem::TerminalTrace`], with each data trace beyond its own
    /// boundary value in the direction `φ` runs.
    TerminalTraceOriented,
    /// Boundary data with a large enough jump is never attained.
    LargeGap,
    /// Attainment is not stable under perturbation of `f` or `φ`.
    Instability,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TheoremVerdict {
    pub theorem: Theorem,
    pub hypotheses: bool,
    pub conclusion: bool,
    pub diagnostics: Vec<(String, f64)>,
}

impl TheoremVerdict {
    fn new(theorem: Theorem, hypotheses: bool, conclusion: bool) -> Self {
        Self { theorem, hypotheses, conclusion, diagnostics: Vec::new() }
    }

    fn note(mut self, key: &str, value: f64) -> Self {
        self.diagnostics.push((key.to_string(), value));
        self
    }

    /// A verdict fails only when the hypotheses held and the conclusion did not.
    pub fn passed(&self) -> bool {
        !self.hypotheses || self.conclusion
    }

    pub fn diagnostic(&self, key: &str) -> Option<f64> {
        self.diagnostics.iter().find(|(k, _)| k == key).map(|&(_, v)| v)
    }
}

fn require_positive(lambda: f64) -> Result<()> {
    if lambda > 0.0 {
        Ok(())
    } else {
        Err(Error::InvalidLambda(lambda, "the checker needs λ > 0"))
    }
}

fn certificate_residual(rep: &SolveReport) -> f64 {
    if rep.certificate.feasible {
        rep.certificate.worst_violation
    } else {
        f64::INFINITY
    }
}

/// Solves with `φ = γf` and checks both traces are attained.
pub fn check_trace_inheritance(f: &StepFunction, lambda: f64) -> Result<(TheoremVerdict, SolveReport)> {
    require_positive(lambda)?;
    let (a, b) = f.traces();
    let inst = RofInstance::new(f.clone(), lambda, BoundaryPair::new(a, b)?)?;
    let rep = solve_rof(&inst)?;
    let att = classify_attainment(&rep.minimizer, &inst)?;
    let (ua, ub) = rep.minimizer.traces();
    let verdict = TheoremVerdict::new(Theorem::TraceInheritance, true, att.both_trace())
        .note("lambda", lambda)
        .note("trace_gap_left", (ua - a).abs())
        .note("trace_gap_right", (ub - b).abs())
        .note("certificate_residual", certificate_residual(&rep));
    Ok((verdict, rep))
}

/// `z(0)` for the constant minimizer, given the range `[g_min, g_max]` of
/// `λG` with `G(x) = ∫_0^x (f̄ - f)`: zero when the range already fits in
/// `[-1, 1]`, otherwise shifted just enough to bring the violated side back.
pub fn small_data_z0(g_min: f64, g_max: f64) -> f64 {
    if g_min < -1.0 {
        -1.0 - g_min
    } else if g_max > 1.0 {
        1.0 - g_max
    } else {
        0.0
    }
}

/// Outcome of [`check_small_data`] with the explicit certificate.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SmallDataCheck {
    pub verdict: TheoremVerdict,
    pub mean: f64,
    pub z0: f64,
    /// Range of admissible `z(0)` found by the certificate search.
    pub z0_interval: Option<(f64, f64)>,
    pub minimizer: StepFunction,
}

/// With `φ = (f̄, f̄)` and `λ‖f‖₁ ≤ 1`, checks that the minimizer is the
/// constant `f̄` and that the explicit `z` certifies it.
pub fn check_small_data(f: &StepFunction, lambda: f64) -> Result<SmallDataCheck> {
    require_positive(lambda)?;
    let mean = f.mean();
    let l1 = crate::step::lp_norm(f, LpNorm::L1);
    let hypotheses = lambda * l1 <= 1.0 + EPS_AMP;
    let inst = RofInstance::new(f.clone(), lambda, BoundaryPair::new(mean, mean)?)?;
    let rep = solve_rof(&inst)?;
    let constant = StepFunction::constant(f.length(), mean)?;

    let field = integrate_dual(&constant, &inst, 0.0)?;
    let (g_min, g_max) = field.values().iter().fold((0.0f64, 0.0f64), |(lo, hi), &g| (lo.min(g), hi.max(g)));
    let z0 = small_data_z0(g_min, g_max);
    let explicit = integrate_dual(&constant, &inst, z0)?;
    let explicit_ok = explicit.sup_norm() <= 1.0 + EPS_CERT;
    let cert = verify_certificate(&constant, &inst)?;
    let in_interval = cert.z0_interval.is_some_and(|(lo, hi)| z0 >= lo - EPS_CERT && z0 <= hi + EPS_CERT);
    let distance = linf_distance(&rep.minimizer, &constant)?;

    let verdict = TheoremVerdict::new(Theorem::SmallData, hypotheses, distance <= MATCH_TOL && explicit_ok && in_interval)
        .note("lambda_l1", lambda * l1)
        .note("mean", mean)
        .note("z0", z0)
        .note("distance_to_mean", distance)
        .note("explicit_sup_norm", explicit.sup_norm());
    Ok(SmallDataCheck { verdict, mean, z0, z0_interval: cert.z0_interval, minimizer: rep.minimizer })
}

/// `λ₁ = 2 / ‖f - u_T‖₁`, infinite when `f` is already terminal.
pub fn lambda_threshold(f: &StepFunction, phi: &BoundaryPair) -> Result<f64> {
    let traj = evolve(f, phi)?;
    let dist = lp_distance(f, &traj.terminal, LpNorm::L1)?;
    Ok(if dist <= EPS_AMP { f64::INFINITY } else { 2.0 / dist })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TerminalCheck {
    /// Minimizer equals the terminal state below the threshold.
    pub minimizer: TheoremVerdict,
    /// Traces of the terminal state equal the boundary data, given data
    /// traces outside `(min φ, max φ)`.
    pub trace: TheoremVerdict,
    /// The same conclusion under [`traces_oriented`].
    pub oriented_trace: TheoremVerdict,
    pub threshold: f64,
    pub terminal: StepFunction,
}

/// `γf(0)` lies beyond `φ(0)` and `γf(L)` beyond `φ(L)`, both pointing away
/// from the interval between them: `γf(0) ≥ φ(0) ≥ φ(L) ≥ γf(L)` or the mirror
/// image. Always true when `φ(0) = φ(L)`.
pub fn traces_oriented(f: &StepFunction, phi: &BoundaryPair) -> bool {
    let (f0, fl) = f.traces();
    let (a, b) = (phi.a, phi.b);
    if (a - b).abs() <= EPS_AMP {
        true
    } else if a > b {
        f0 >= a - EPS_AMP && fl <= b + EPS_AMP
    } else {
        f0 <= a + EPS_AMP && fl >= b - EPS_AMP
    }
}

/// Compares the minimizer with the flow's terminal state, and checks the
/// terminal traces when the data traces avoid `(min φ, max φ)`. That check
/// fails when both data traces sit on the same side of `φ`, or on the wrong
/// sides: `f ≡ -5`, `φ = (-2, -1)` ends at `u_T ≡ -2`. The oriented variant
/// holds.
pub fn check_terminal_minimizer(f: &StepFunction, phi: &BoundaryPair, lambda: f64) -> Result<TerminalCheck> {
    require_positive(lambda)?;
    let traj = evolve(f, phi)?;
    let terminal = traj.terminal;
    let dist = lp_distance(f, &terminal, LpNorm::L1)?;
    let threshold = if dist <= EPS_AMP { f64::INFINITY } else { 2.0 / dist };

    let rep = solve_rof(&RofInstance::new(f.clone(), lambda, *phi)?)?;
    let distance = linf_distance(&rep.minimizer, &terminal)?;
    let minimizer = TheoremVerdict::new(Theorem::TerminalMinimizer, lambda < threshold, distance <= MATCH_TOL)
        .note("lambda", lambda)
        .note("threshold", threshold)
        .note("distance_to_terminal", distance);

    let (f0, fl) = f.traces();
    let outside = |x: f64| !(x > phi.min() && x < phi.max());
    let (u0, ul) = terminal.traces();
    let gap = (u0 - phi.a).abs().max((ul - phi.b).abs());
    let trace = TheoremVerdict::new(Theorem::TerminalTrace, outside(f0) && outside(fl), gap <= EPS_AMP)
        .note("terminal_trace_gap", gap);
    let oriented_trace = TheoremVerdict::new(Theorem::TerminalTraceOriented, traces_oriented(f, phi), gap <= EPS_AMP)
        .note("terminal_trace_gap", gap);
    Ok(TerminalCheck { minimizer, trace, oriented_trace, threshold, terminal })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Orientation {
    /// `φ(0) < 0 < φ(L)`
    Rising,
    /// `φ(0) > 0 > φ(L)`
    Falling,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LargeGap {
    pub phi: BoundaryPair,
    /// `TV(f) + |γf(0)| + |γf(L)|`
    pub bound: f64,
    pub verdict: TheoremVerdict,
    /// Minimizer for the zero boundary datum.
    pub zero_data_minimizer: StepFunction,
    /// Orientation of `φ` under which the zero-datum minimizer stays certified,
    /// if any.
    pub kept_certificate: Option<Orientation>,
    pub minimizer: StepFunction,
    pub attainment: AttainmentReport,
}

/// Picks `φ` with `|φ(L) - φ(0)|` two units past the bound and checks that the
/// minimizer cannot attain both values.
pub fn construct_large_gap(f: &StepFunction, lambda: f64) -> Result<LargeGap> {
    require_positive(lambda)?;
    let (f0, fl) = f.traces();
    let bound = f.total_variation() + f0.abs() + fl.abs();
    let half = bound / 2.0 + 1.0;
    let zero = BoundaryPair::new(0.0, 0.0)?;
    let base = RofInstance::new(f.clone(), lambda, zero)?;
    let zero_data_minimizer = solve_rof(&base)?.minimizer;

    let rising = BoundaryPair::new(-half, half)?;
    let falling = BoundaryPair::new(half, -half)?;
    let mut kept_certificate = None;
    for (orientation, phi) in [(Orientation::Rising, rising), (Orientation::Falling, falling)] {
        if verify_certificate(&zero_data_minimizer, &base.with_phi(phi))?.feasible {
            kept_certificate = Some(orientation);
            break;
        }
    }
    let phi = match kept_certificate {
        Some(Orientation::Falling) => falling,
        _ => rising,
    };

    let inst = base.with_phi(phi);
    let rep = solve_rof(&inst)?;
    let attainment = classify_attainment(&rep.minimizer, &inst)?;
    let tv = rep.minimizer.total_variation();
    let (u0, ul) = rep.minimizer.traces();
    let jump = (phi.b - phi.a).abs();
    let non_trace = [attainment.left.mode, attainment.right.mode].iter().filter(|&&m| m != AttainmentMode::Trace).count();
    let conclusion = non_trace >= 1 && (ul - u0).abs() <= tv + EPS_AMP && tv < jump;
    let verdict = TheoremVerdict::new(Theorem::LargeGap, jump > bound, conclusion)
        .note("bound", bound)
        .note("boundary_jump", jump)
        .note("tv_minimizer", tv)
        .note("non_trace_endpoints", non_trace as f64);
    Ok(LargeGap { phi, bound, verdict, zero_data_minimizer, kept_certificate, minimizer: rep.minimizer, attainment })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct InstabilityMember {
    /// `None` for the limit.
    pub epsilon: Option<f64>,
    pub f: StepFunction,
    pub phi: BoundaryPair,
    pub minimizer: StepFunction,
    pub attainment: AttainmentReport,
    /// `‖u_ε - u_0‖₂`
    pub distance_to_limit: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct InstabilityFamily {
    pub members: Vec<InstabilityMember>,
    pub verdict: TheoremVerdict,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct InstabilityReport {
    /// Perturbed data `f_ε = φ(0)` on `(0, ε)`, `f_0` elsewhere.
    pub data: InstabilityFamily,
    /// Perturbed boundary datum `φ_ε(0) = γf_0(0) + ε`.
    pub boundary: InstabilityFamily,
}

/// Decreasing datum `(1, 0)` on `(0, 2)` with `φ = (2, 0)`.
pub fn instability_base() -> (StepFunction, BoundaryPair) {
    (StepFunction::new(2.0, vec![1.0], vec![1.0, 0.0]).expect("valid"), BoundaryPair::new(2.0, 0.0).expect("valid"))
}

const INSTABILITY_LAMBDA: f64 = 1.0;

fn member(epsilon: Option<f64>, f: StepFunction, phi: BoundaryPair) -> Result<(InstabilityMember, f64)> {
    let inst = RofInstance::new(f.clone(), INSTABILITY_LAMBDA, phi)?;
    let rep = solve_rof(&inst)?;
    let attainment = classify_attainment(&rep.minimizer, &inst)?;
    let to_data = linf_distance(&rep.minimizer, &f)?;
    Ok((InstabilityMember { epsilon, f, phi, minimizer: rep.minimizer, attainment, distance_to_limit: 0.0 }, to_data))
}

fn strictly_decreasing(xs: &[f64]) -> bool {
    xs.windows(2).all(|w| w[1] < w[0])
}

/// Builds both perturbation families for the given `ε` values (each in
/// `(0, L/2)`), sorted from largest to smallest.
pub fn construct_instability_families(epsilons: &[f64]) -> Result<InstabilityReport> {
    let (f0, phi) = instability_base();
    let half = f0.length() / 2.0;
    if epsilons.is_empty() {
        return Err(Error::InvalidParameter("at least one ε is required".into()));
    }
    if let Some(e) = epsilons.iter().find(|&&e| !(e > 0.0 && e < half)) {
        return Err(Error::InvalidParameter(format!("ε = {e} outside (0, {half})")));
    }
    let mut eps = epsilons.to_vec();
    eps.sort_by(|a, b| b.total_cmp(a));
    eps.dedup();

    // Data perturbation: every f_ε is its own minimizer and attains φ, the
    // limit does not.
    let (mut limit, limit_fit) = member(None, f0.clone(), phi)?;
    let mut members = Vec::new();
    let mut all_fixed = limit_fit <= MATCH_TOL;
    for &e in &eps {
        let f = StepFunction::new(2.0, vec![e, 1.0], vec![phi.a, 1.0, 0.0])?;
        let (mut m, fit) = member(Some(e), f, phi)?;
        m.distance_to_limit = lp_distance(&m.minimizer, &limit.minimizer, LpNorm::L2)?;
        all_fixed &= fit <= MATCH_TOL;
        members.push(m);
    }
    let distances: Vec<f64> = members.iter().map(|m| m.distance_to_limit).collect();
    let perturbed_trace = members.iter().all(|m| m.attainment.both_trace());
    let limit_modes = (limit.attainment.left.mode, limit.attainment.right.mode);
    let conclusion = all_fixed
        && perturbed_trace
        && limit_modes == (AttainmentMode::ViscosityOnly, AttainmentMode::Trace)
        && strictly_decreasing(&distances);
    let data_verdict = TheoremVerdict::new(Theorem::Instability, true, conclusion)
        .note("smallest_epsilon", *eps.last().expect("non-empty"))
        .note("smallest_distance", *distances.last().expect("non-empty"));
    limit.distance_to_limit = 0.0;
    members.push(limit);
    let data = InstabilityFamily { members, verdict: data_verdict };

    // Boundary perturbation: the minimizer never moves, yet only the limit
    // attains its datum.
    let (f_a, f_b) = f0.traces();
    let (limit, limit_fit) = member(None, f0.clone(), BoundaryPair::new(f_a, f_b)?)?;
    let mut members = Vec::new();
    let mut all_fixed = limit_fit <= MATCH_TOL;
    for &e in &eps {
        let (mut m, fit) = member(Some(e), f0.clone(), BoundaryPair::new(f_a + e, f_b)?)?;
        m.distance_to_limit = lp_distance(&m.minimizer, &limit.minimizer, LpNorm::L2)?;
        all_fixed &= fit <= MATCH_TOL;
        members.push(m);
    }
    let perturbed_viscous = members
        .iter()
        .all(|m| m.attainment.left.mode == AttainmentMode::ViscosityOnly && m.attainment.right.mode == AttainmentMode::Trace);
    let conclusion = all_fixed && perturbed_viscous && limit.attainment.both_trace();
    let boundary_verdict = TheoremVerdict::new(Theorem::Instability, true, conclusion)
        .note("largest_distance", members.iter().map(|m| m.distance_to_limit).fold(0.0, f64::max));
    members.push(limit);
    let boundary = InstabilityFamily { members, verdict: boundary_verdict };

    Ok(InstabilityReport { data, boundary })
}

/// Terminal state of the worked four-step example for small jump heights,
/// checked three independent ways.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SmallJumpFinding {
    pub k: f64,
    pub t_ext: f64,
    pub terminal: StepFunction,
    /// The state the large-jump regime predicts, `(a, b)` on the two halves.
    pub predicted: StepFunction,
    /// Terminal state certified by `0 ∈ ∂Φ̄_{0,0,φ}(u_T)`.
    pub terminal_certified: bool,
    pub lambda: f64,
    /// `‖oracle(λ) - u_T‖∞`
    pub oracle_distance: f64,
    /// `‖solve_rof(λ) - u_T‖∞`
    pub solver_distance: f64,
    /// `u_T` differs from the predicted state.
    pub discrepancy: bool,
}

/// `(0, -k, k, 0)` on quarters of `(0, 2)`.
pub fn four_step(k: f64) -> Result<StepFunction> {
    StepFunction::new(2.0, vec![0.5, 1.0, 1.5], vec![0.0, -k, k, 0.0])
}

/// Runs the four-step example with `φ = (-1, 1)` at jump height `k` and
/// cross-checks the terminal state against the certificate, the exact solver
/// and the iterative oracle at `λ`.
pub fn small_jump_finding(k: f64, lambda: f64, oracle: &OracleConfig) -> Result<SmallJumpFinding> {
    let f = four_step(k)?;
    let phi = BoundaryPair::new(-1.0, 1.0)?;
    let exact = evolve_exact(&f, &phi)?;
    let traj = exact.rounded;
    let terminal = traj.terminal.clone();
    let stationary = RofInstance::new(terminal.clone(), 0.0, phi)?;
    let terminal_certified = verify_certificate(&terminal, &stationary)?.feasible;
    let inst = RofInstance::new(f.clone(), lambda, phi)?;
    let solver_distance = linf_distance(&solve_rof(&inst)?.minimizer, &terminal)?;
    let oracle_distance = linf_distance(&solve_rof_oracle(&inst, oracle)?.solution, &terminal)?;
    let predicted = StepFunction::new(2.0, vec![1.0], vec![phi.a, phi.b])?;
    let discrepancy = linf_distance(&terminal, &predicted)? > EPS_AMP;
    Ok(SmallJumpFinding {
        k,
        t_ext: traj.t_ext,
        terminal,
        predicted,
        terminal_certified,
        lambda,
        oracle_distance,
        solver_distance,
        discrepancy,
    })
}
