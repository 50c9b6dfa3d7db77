//! Dual certificates for the relaxed ROF functional.
//!
//! A candidate `u` minimizes `Φ̄_{f,λ,φ}` iff there is a Lipschitz field `z` with
//! `|z| ≤ 1`, `z_x = λ(u - f)`, `z = sgn(jump)` at every jump of `u`, and the
//! boundary inclusions `-z(0) ∈ sgn(φ(0) - γu(0))`, `z(L) ∈ sgn(φ(L) - γu(L))`.
//! On step functions the field equation fixes `z` up to the constant `z(0)`, and
//! every other condition is an interval constraint on that constant, so
//! feasibility is decided exactly by intersecting intervals.

use std::cmp::Ordering;

use serde::Serialize;

use crate::scalar::FlowScalar;
use crate::step::{overlay, BoundaryPair, RofInstance, StepFunction, EPS_AMP};
use crate::Result;

/// Absolute slack for every certificate comparison.
pub const EPS_CERT: f64 = 1e-9;

/// Continuous piecewise-affine field given by its node values.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DualField {
    nodes: Vec<f64>,
    values: Vec<f64>,
}

impl DualField {
    pub fn new(nodes: Vec<f64>, values: Vec<f64>) -> Self {
        assert_eq!(nodes.len(), values.len(), "one value per node");
        assert!(nodes.len() >= 2, "a field needs both endpoints");
        Self { nodes, values }
    }

    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn at_left(&self) -> f64 {
        self.values[0]
    }

    pub fn at_right(&self) -> f64 {
        self.values[self.values.len() - 1]
    }

    /// Linear interpolation; clamps outside the node range.
    pub fn eval(&self, x: f64) -> f64 {
        let j = self.nodes.partition_point(|&y| y <= x);
        if j == 0 {
            return self.values[0];
        }
        if j == self.nodes.len() {
            return self.at_right();
        }
        let (x0, x1) = (self.nodes[j - 1], self.nodes[j]);
        let (z0, z1) = (self.values[j - 1], self.values[j]);
        z0 + (z1 - z0) * (x - x0) / (x1 - x0)
    }

    /// `max |z|`, attained at a node.
    pub fn sup_norm(&self) -> f64 {
        self.values.iter().fold(0.0, |m, z| m.max(z.abs()))
    }
}

/// Nodes of the merged grid of `u` and `f`, with `G(x) = ∫_0^x (u - f)` there.
fn primitive(u: &StepFunction, f: &StepFunction) -> Result<(Vec<f64>, Vec<f64>)> {
    let cells = overlay(u, f)?;
    let mut nodes = Vec::with_capacity(cells.len() + 1);
    let mut g = Vec::with_capacity(cells.len() + 1);
    nodes.push(0.0);
    g.push(0.0);
    let mut acc = 0.0;
    for c in &cells {
        acc += c.width() * (c.u - c.v);
        nodes.push(c.right);
        g.push(acc);
    }
    Ok((nodes, g))
}

/// `z(x) = z0 + λ ∫_0^x (u - f)`, without clipping.
pub fn integrate_dual(u: &StepFunction, inst: &RofInstance, z0: f64) -> Result<DualField> {
    let (nodes, g) = primitive(u, &inst.f)?;
    let values = g.iter().map(|g| z0 + inst.lambda * g).collect();
    Ok(DualField::new(nodes, values))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Condition {
    /// `|z| ≤ 1`
    SupNorm,
    /// `(z, Du) = |Du|`: `z = sgn(jump)` at each jump.
    JumpAlignment,
    /// `0 = -z_x + λ(u - f)`; holds by construction of `z`.
    FieldEquation,
    BoundaryLeft,
    BoundaryRight,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Violation {
    pub condition: Condition,
    pub x: f64,
    pub magnitude: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CertificateReport {
    pub feasible: bool,
    /// Admissible values of `z(0)`; `None` when infeasible.
    pub z0_interval: Option<(f64, f64)>,
    /// Field at the midpoint of `z0_interval`.
    pub witness: Option<DualField>,
    pub violations: Vec<Violation>,
    /// Largest amount by which the witness (or, when infeasible, the best
    /// compromise `z(0)`) breaks an unrelaxed condition.
    pub worst_violation: f64,
    pub conditions_checked: Vec<Condition>,
}

/// `z0 ∈ [lo, hi]` imposed by one condition at one location.
#[derive(Debug, Clone, Copy)]
struct Constraint {
    condition: Condition,
    x: f64,
    lo: f64,
    hi: f64,
}

impl Constraint {
    fn pinned(condition: Condition, x: f64, z0: f64) -> Self {
        Self { condition, x, lo: z0, hi: z0 }
    }

    fn excess(&self, z0: f64) -> f64 {
        (self.lo - z0).max(z0 - self.hi).max(0.0)
    }
}

fn sign_of(d: f64) -> Ordering {
    if d.abs() <= EPS_AMP {
        Ordering::Equal
    } else if d > 0.0 {
        Ordering::Greater
    } else {
        Ordering::Less
    }
}

/// Decides whether `u` minimizes `Φ̄_{f,λ,φ}` by searching for a certificate.
pub fn verify_certificate(u: &StepFunction, inst: &RofInstance) -> Result<CertificateReport> {
    let (nodes, g) = primitive(u, &inst.f)?;
    let lambda = inst.lambda;
    let mut constraints = Vec::new();

    let (imin, gmin) = argmin(&g);
    let (imax, gmax) = argmax(&g);
    constraints.push(Constraint { condition: Condition::SupNorm, x: nodes[imin], lo: -1.0 - lambda * gmin, hi: f64::INFINITY });
    constraints.push(Constraint { condition: Condition::SupNorm, x: nodes[imax], lo: f64::NEG_INFINITY, hi: 1.0 - lambda * gmax });

    for (x, jump) in u.jumps() {
        let j = nodes.partition_point(|&y| y < x);
        let s = jump.signum();
        constraints.push(Constraint::pinned(Condition::JumpAlignment, x, s - lambda * g[j]));
    }

    let (g0, gl) = u.traces();
    match sign_of(g0 - inst.phi.a) {
        Ordering::Greater => constraints.push(Constraint::pinned(Condition::BoundaryLeft, 0.0, 1.0)),
        Ordering::Less => constraints.push(Constraint::pinned(Condition::BoundaryLeft, 0.0, -1.0)),
        Ordering::Equal => {}
    }
    let g_end = g[g.len() - 1];
    let length = u.length();
    match sign_of(gl - inst.phi.b) {
        Ordering::Greater => constraints.push(Constraint::pinned(Condition::BoundaryRight, length, -1.0 - lambda * g_end)),
        Ordering::Less => constraints.push(Constraint::pinned(Condition::BoundaryRight, length, 1.0 - lambda * g_end)),
        Ordering::Equal => {}
    }

    let lo = constraints.iter().map(|c| c.lo).fold(f64::NEG_INFINITY, f64::max);
    let hi = constraints.iter().map(|c| c.hi).fold(f64::INFINITY, f64::min);
    let feasible = lo <= hi + EPS_CERT;
    let z0 = 0.5 * (lo + hi);
    let worst = constraints.iter().map(|c| c.excess(z0)).fold(0.0, f64::max);

    let conditions_checked = vec![
        Condition::SupNorm,
        Condition::JumpAlignment,
        Condition::FieldEquation,
        Condition::BoundaryLeft,
        Condition::BoundaryRight,
    ];
    if feasible {
        let interval = if lo <= hi { (lo, hi) } else { (z0, z0) };
        let witness = DualField::new(nodes, g.iter().map(|g| z0 + lambda * g).collect());
        Ok(CertificateReport {
            feasible,
            z0_interval: Some(interval),
            witness: Some(witness),
            violations: Vec::new(),
            worst_violation: worst,
            conditions_checked,
        })
    } else {
        let violations = constraints
            .iter()
            .filter(|c| c.excess(z0) > 0.0)
            .map(|c| Violation { condition: c.condition, x: c.x, magnitude: c.excess(z0) })
            .collect();
        Ok(CertificateReport {
            feasible,
            z0_interval: None,
            witness: None,
            violations,
            worst_violation: worst,
            conditions_checked,
        })
    }
}

fn argmin(g: &[f64]) -> (usize, f64) {
    g.iter().copied().enumerate().fold((0, f64::INFINITY), |m, (i, v)| if v < m.1 { (i, v) } else { m })
}

fn argmax(g: &[f64]) -> (usize, f64) {
    g.iter().copied().enumerate().fold((0, f64::NEG_INFINITY), |m, (i, v)| if v > m.1 { (i, v) } else { m })
}

/// Node values of the minimal-section field on the nodes `0, x_1, ..., L`.
///
/// Interior nodes are pinned to the jump sign. A strict trace/datum mismatch
/// pins the endpoint; an attained endpoint is free and takes the clamp of the
/// adjacent pin, which minimizes `∫ z_x²` under `|z| ≤ 1`. With no pin at all
/// (a constant equal to both data) the field is `0`.
pub(crate) fn section_pins<S: FlowScalar>(values: &[S], a: &S, b: &S) -> Vec<i64> {
    let n = values.len();
    let mut z = vec![0i64; n + 1];
    for k in 1..n {
        z[k] = match values[k].amp_cmp(&values[k - 1]) {
            Ordering::Greater => 1,
            Ordering::Less => -1,
            Ordering::Equal => 0,
        };
    }
    let left = match values[0].amp_cmp(a) {
        Ordering::Greater => Some(1),
        Ordering::Less => Some(-1),
        Ordering::Equal => None,
    };
    let right = match values[n - 1].amp_cmp(b) {
        Ordering::Greater => Some(-1),
        Ordering::Less => Some(1),
        Ordering::Equal => None,
    };
    z[0] = left.unwrap_or(if n >= 2 { z[1] } else { right.unwrap_or(0) });
    z[n] = right.unwrap_or(if n >= 2 { z[n - 1] } else { left.unwrap_or(0) });
    z
}

/// `u_t = z_x` on each interval for the given pin pattern.
pub(crate) fn section_speeds<S: FlowScalar>(pins: &[i64], widths: &[S]) -> Vec<S> {
    widths
        .iter()
        .enumerate()
        .map(|(i, w)| S::from_int(pins[i + 1] - pins[i]) / w.clone())
        .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MinimalSection {
    pub field: DualField,
    /// Facet speeds `z_x` per interval of `u`.
    pub speeds: Vec<f64>,
}

/// The least-norm element of `∂Φ̄_{0,0,φ}(u)`, which drives the flow.
pub fn minimal_section(u: &StepFunction, phi: &BoundaryPair) -> MinimalSection {
    let pins = section_pins(u.values(), &phi.a, &phi.b);
    let speeds = section_speeds(&pins, &u.widths());
    let field = DualField::new(u.nodes(), pins.iter().map(|&p| p as f64).collect());
    MinimalSection { field, speeds }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::step::{tilde_extend, Monotonicity};
    use proptest::prelude::*;

    fn halves(a: f64, b: f64) -> StepFunction {
        StepFunction::new(1.0, vec![0.5], vec![a, b]).unwrap()
    }

    fn example_s4(k: f64) -> StepFunction {
        StepFunction::new(2.0, vec![0.5, 1.0, 1.5], vec![0.0, -k, k, 0.0]).unwrap()
    }

    fn pair(a: f64, b: f64) -> BoundaryPair {
        BoundaryPair::new(a, b).unwrap()
    }

    #[test]
    fn integrate_dual_examples() {
        let zero = StepFunction::constant(1.0, 0.0).unwrap();
        let inst = RofInstance::new(halves(1.0, -1.0), 1.0, pair(0.0, 0.0)).unwrap();
        let z = integrate_dual(&zero, &inst, 0.0).unwrap();
        assert_eq!(z.nodes(), &[0.0, 0.5, 1.0]);
        assert_eq!(z.values(), &[0.0, -0.5, 0.0]);

        let inst0 = inst.with_lambda(0.0).unwrap();
        let z = integrate_dual(&zero, &inst0, 0.3).unwrap();
        assert!(z.values().iter().all(|&v| v == 0.3));

        let ut = StepFunction::uniform(2.0, vec![-1.0, 1.0]).unwrap();
        let inst = RofInstance::new(example_s4(4.0), 0.25, pair(-1.0, 1.0)).unwrap();
        let z = integrate_dual(&ut, &inst, 0.75).unwrap();
        assert_eq!(z.nodes(), &[0.0, 0.5, 1.0, 1.5, 2.0]);
        assert_eq!(z.values(), &[0.75, 0.625, 1.0, 0.625, 0.75]);
    }

    #[test]
    fn certificate_examples() {
        let zero = StepFunction::constant(1.0, 0.0).unwrap();
        let inst = RofInstance::new(halves(1.0, -1.0), 1.0, pair(0.0, 0.0)).unwrap();
        let rep = verify_certificate(&zero, &inst).unwrap();
        assert!(rep.feasible);
        let (lo, hi) = rep.z0_interval.unwrap();
        assert_eq!((lo, hi), (-0.5, 1.0));
        assert!(lo <= 0.0 && 0.0 <= hi);

        let c = StepFunction::constant(2.0, 1.5).unwrap();
        let inst = RofInstance::new(c.clone(), 7.0, pair(1.5, 1.5)).unwrap();
        let rep = verify_certificate(&c, &inst).unwrap();
        assert!(rep.feasible);
        assert_eq!(rep.z0_interval, Some((-1.0, 1.0)));
        assert!(rep.witness.unwrap().values().iter().all(|&z| z == 0.0));

        let ut = StepFunction::uniform(2.0, vec![-1.0, 1.0]).unwrap();
        let inst = RofInstance::new(example_s4(4.0), 0.25, pair(-1.0, 1.0)).unwrap();
        let rep = verify_certificate(&ut, &inst).unwrap();
        assert!(rep.feasible);
        assert_eq!(rep.z0_interval, Some((0.75, 0.75)));
        assert!(rep.violations.is_empty());
    }

    #[test]
    fn non_minimizer_is_rejected_with_violations() {
        // f itself is not the minimizer for λ = 0.25 on the worked example.
        let f = example_s4(4.0);
        let inst = RofInstance::new(f.clone(), 0.25, pair(-1.0, 1.0)).unwrap();
        let rep = verify_certificate(&f, &inst).unwrap();
        assert!(!rep.feasible);
        assert!(rep.z0_interval.is_none() && rep.witness.is_none());
        assert!(!rep.violations.is_empty());
        assert!(rep.worst_violation > EPS_CERT);
    }

    #[test]
    fn contradictory_boundary_pins_are_infeasible() {
        // u = f = 0 forces a constant z; φ = (1, -1) demands z(0) = -1 and z(L) = -1,
        // which is fine, while φ = (1, 1) demands z(0) = -1 and z(L) = 1.
        let zero = StepFunction::constant(1.0, 0.0).unwrap();
        let ok = RofInstance::new(zero.clone(), 1.0, pair(1.0, -1.0)).unwrap();
        assert!(verify_certificate(&zero, &ok).unwrap().feasible);
        let bad = ok.with_phi(pair(1.0, 1.0));
        let rep = verify_certificate(&zero, &bad).unwrap();
        assert!(!rep.feasible);
        assert!(rep.violations.iter().any(|v| matches!(v.condition, Condition::BoundaryLeft | Condition::BoundaryRight)));
    }

    #[test]
    fn minimal_section_examples() {
        let ms = minimal_section(&example_s4(4.0), &pair(-1.0, 1.0));
        assert_eq!(ms.field.values(), &[1.0, -1.0, 1.0, -1.0, 1.0]);
        assert_eq!(ms.speeds, vec![-4.0, 4.0, -4.0, 4.0]);

        let up = StepFunction::uniform(3.0, vec![0.0, 1.0, 2.0]).unwrap();
        let ms = minimal_section(&up, &pair(-1.0, 3.0));
        assert!(ms.field.values().iter().all(|&z| z == 1.0));
        assert!(ms.speeds.iter().all(|&s| s == 0.0));

        let low = StepFunction::constant(4.0, -2.0).unwrap();
        let ms = minimal_section(&low, &pair(0.0, 1.0));
        assert_eq!(ms.field.values(), &[-1.0, 1.0]);
        assert_eq!(ms.speeds, vec![0.5]);
    }

    #[test]
    fn free_endpoint_takes_neighbour_pin() {
        let u = StepFunction::uniform(2.0, vec![-1.0, -3.0]).unwrap();
        let ms = minimal_section(&u, &pair(-1.0, 5.0));
        assert_eq!(ms.field.values(), &[-1.0, -1.0, 1.0]);
        assert_eq!(ms.speeds, vec![0.0, 2.0]);
    }

    fn arb_step() -> impl Strategy<Value = StepFunction> {
        (1usize..=6)
            .prop_flat_map(|n| (prop::collection::btree_set(1u32..16, n - 1), prop::collection::vec(-4i32..=4, n)))
            .prop_map(|(cuts, vals)| {
                StepFunction::new(2.0, cuts.into_iter().map(|c| c as f64 / 8.0).collect(), vals.into_iter().map(f64::from).collect()).unwrap()
            })
    }

    proptest! {
        #[test]
        fn zero_speed_iff_monotone_extension(u in arb_step(), a in -4i32..=4, b in -4i32..=4) {
            let phi = pair(a as f64, b as f64);
            let ms = minimal_section(&u, &phi);
            let still = ms.speeds.iter().all(|&s| s == 0.0);
            let (_, m) = tilde_extend(&u, &phi);
            prop_assert_eq!(still, m.is_monotone());
            prop_assert!(ms.field.sup_norm() <= 1.0);
        }

        #[test]
        fn section_depends_only_on_order_pattern(u in arb_step(), a in -4i32..=4, b in -4i32..=4, scale in 0.1..10.0f64, shift in -3.0..3.0f64) {
            let phi = pair(a as f64, b as f64);
            let tu = StepFunction::new(u.length(), u.breakpoints().to_vec(), u.values().iter().map(|v| scale * v + shift).collect()).unwrap();
            let tphi = pair(scale * phi.a + shift, scale * phi.b + shift);
            prop_assert_eq!(minimal_section(&u, &phi).field, minimal_section(&tu, &tphi).field);
        }

        #[test]
        fn witness_satisfies_all_conditions(u in arb_step(), f in arb_step(), lambda in 0.0..3.0f64, a in -4.0..4.0f64, b in -4.0..4.0f64) {
            let inst = RofInstance::new(f, lambda, pair(a, b)).unwrap();
            let rep = verify_certificate(&u, &inst).unwrap();
            prop_assert_eq!(rep.feasible, rep.violations.is_empty());
            prop_assert_eq!(rep.feasible, rep.z0_interval.is_some());
            if let Some(z) = rep.witness {
                prop_assert!(z.sup_norm() <= 1.0 + EPS_CERT);
                for (x, jump) in u.jumps() {
                    prop_assert!((z.eval(x) * jump.signum() - 1.0).abs() <= EPS_CERT);
                }
            }
        }
    }

    #[test]
    fn monotone_profile_gives_terminal_section() {
        let u = StepFunction::uniform(2.0, vec![3.0, 1.0]).unwrap();
        let (_, m) = tilde_extend(&u, &pair(4.0, 0.0));
        assert_eq!(m, Monotonicity::Decreasing);
        assert!(minimal_section(&u, &pair(4.0, 0.0)).speeds.iter().all(|&s| s == 0.0));
    }
}
