//! Exact event-driven simulation of the Dirichlet total variation flow.
//!
//! For a step function the minimal section `z` is pinned at `±1` on every jump
//! and at strictly mismatched endpoints, and is affine in between. Each facet
//! therefore moves at the constant speed `z_x` until the pin pattern changes:
//! two neighbours meet (a merge) or a boundary facet reaches its datum (a
//! boundary hit, after which that endpoint is free). Between events the
//! evolution is exactly affine in time, so the whole trajectory is a finite list
//! of epochs. Facet preimages never move; they only merge.

use std::cmp::Ordering;

use num_rational::BigRational;
use serde::Serialize;

use crate::scalar::FlowScalar;
use crate::step::{overlay, tilde_extend, BoundaryPair, StepFunction, EPS_AMP};
use crate::subdiff::{section_pins, section_speeds};
use crate::{Error, Result};

/// Candidate event times closer than this are processed together.
pub const EPS_EVENT: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum End {
    Left,
    Right,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Curvature {
    Zero,
    Positive,
    Negative,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Facet {
    pub left: f64,
    pub right: f64,
    pub value: f64,
    pub speed: f64,
    pub curvature: Curvature,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum EventKind {
    /// Facets `left` and `left + 1` (indices before the event) meet at `x`.
    Merge { left: usize, x: f64 },
    BoundaryHit { end: End },
    Extinction,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FlowEvent {
    pub time: f64,
    pub kind: EventKind,
    pub state_after: StepFunction,
}

/// A time interval with constant facet speeds.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FlowEpoch {
    pub start: f64,
    pub end: f64,
    pub state: StepFunction,
    pub speeds: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FlowTrajectory {
    pub initial: StepFunction,
    pub phi: BoundaryPair,
    pub epochs: Vec<FlowEpoch>,
    pub events: Vec<FlowEvent>,
    pub t_ext: f64,
    pub terminal: StepFunction,
}

impl FlowTrajectory {
    /// `u(·, t)`; constant after extinction.
    pub fn state_at(&self, t: f64) -> StepFunction {
        if t >= self.t_ext {
            return self.terminal.clone();
        }
        let k = self.epochs.partition_point(|e| e.start <= t).saturating_sub(1);
        let epoch = &self.epochs[k];
        let dt = (t - epoch.start).max(0.0);
        let values = epoch.state.values().iter().zip(&epoch.speeds).map(|(v, s)| v + s * dt).collect();
        epoch.state.with_values(values).expect("advanced state stays finite")
    }

    /// Start times of every epoch plus the extinction time.
    pub fn event_times(&self) -> Vec<f64> {
        let mut times: Vec<f64> = self.epochs.iter().map(|e| e.start).collect();
        times.push(self.t_ext);
        times.dedup();
        times
    }
}

/// One constant interval per facet, classified by the sign of its speed.
pub fn facet_decomposition(u: &StepFunction, phi: &BoundaryPair) -> Vec<Facet> {
    let pins = section_pins(u.values(), &phi.a, &phi.b);
    let speeds = section_speeds(&pins, &u.widths());
    speeds
        .into_iter()
        .enumerate()
        .map(|(i, speed)| {
            let (left, right) = u.interval(i);
            let curvature = match speed.partial_cmp(&0.0) {
                Some(Ordering::Greater) => Curvature::Positive,
                Some(Ordering::Less) => Curvature::Negative,
                _ => Curvature::Zero,
            };
            Facet { left, right, value: u.values()[i], speed, curvature }
        })
        .collect()
}

/// Flow state over a generic scalar: breakpoints and values of a step function.
#[derive(Debug, Clone, PartialEq)]
pub(crate) struct Profile<S> {
    pub length: S,
    pub breaks: Vec<S>,
    pub values: Vec<S>,
}

impl<S: FlowScalar> Profile<S> {
    fn widths(&self) -> Vec<S> {
        let n = self.values.len();
        (0..n)
            .map(|i| {
                let l = if i == 0 { S::zero() } else { self.breaks[i - 1].clone() };
                let r = if i + 1 == n { self.length.clone() } else { self.breaks[i].clone() };
                r - l
            })
            .collect()
    }

    /// Merges neighbours that compare equal, keeping the left value.
    fn canonicalize(&mut self) {
        let mut breaks = Vec::with_capacity(self.breaks.len());
        let mut values: Vec<S> = Vec::with_capacity(self.values.len());
        for (i, v) in self.values.drain(..).enumerate() {
            match values.last() {
                Some(last) if v.amp_cmp(last) == Ordering::Equal => {}
                Some(_) => {
                    breaks.push(self.breaks[i - 1].clone());
                    values.push(v);
                }
                None => values.push(v),
            }
        }
        self.breaks = breaks;
        self.values = values;
    }

    fn to_step(&self) -> StepFunction {
        StepFunction::new(
            self.length.to_f64(),
            self.breaks.iter().map(FlowScalar::to_f64).collect(),
            self.values.iter().map(FlowScalar::to_f64).collect(),
        )
        .expect("flow state is a valid step function")
    }

    fn from_step(u: &StepFunction) -> Option<Self> {
        Some(Self {
            length: S::from_f64(u.length())?,
            breaks: u.breakpoints().iter().map(|&x| S::from_f64(x)).collect::<Option<_>>()?,
            values: u.values().iter().map(|&v| S::from_f64(v)).collect::<Option<_>>()?,
        })
    }
}

fn earliest<S: FlowScalar>(
    values: &[S],
    breaks: &[S],
    speeds: &[S],
    a: &S,
    b: &S,
) -> Option<(S, Vec<EventKind>, Vec<S>)> {
    let n = values.len();
    let mut cands: Vec<(S, EventKind)> = Vec::new();
    for i in 0..n.saturating_sub(1) {
        let closing = speeds[i].clone() - speeds[i + 1].clone();
        if closing.is_zero() {
            continue;
        }
        let t = (values[i + 1].clone() - values[i].clone()) / closing;
        if t.is_positive() {
            cands.push((t, EventKind::Merge { left: i, x: breaks[i].to_f64() }));
        }
    }
    if !speeds[0].is_zero() {
        let t = (a.clone() - values[0].clone()) / speeds[0].clone();
        if t.is_positive() {
            cands.push((t, EventKind::BoundaryHit { end: End::Left }));
        }
    }
    if !speeds[n - 1].is_zero() {
        let t = (b.clone() - values[n - 1].clone()) / speeds[n - 1].clone();
        if t.is_positive() {
            cands.push((t, EventKind::BoundaryHit { end: End::Right }));
        }
    }
    let t_min = cands
        .iter()
        .map(|(t, _)| t.clone())
        .reduce(|m, t| if t < m { t } else { m })?;
    let mut kinds = Vec::new();
    let mut times = Vec::new();
    for (t, k) in cands {
        if t.time_eq(&t_min) {
            kinds.push(k);
            times.push(t);
        }
    }
    Some((t_min, kinds, times))
}

/// Earliest event ahead of `u` moving with `speeds`, and every event kind that
/// coincides with it within [`EPS_EVENT`].
pub fn next_event(u: &StepFunction, phi: &BoundaryPair, speeds: &[f64]) -> Result<(f64, Vec<EventKind>)> {
    if speeds.len() != u.len() {
        return Err(Error::InvalidParameter(format!("{} speeds for {} facets", speeds.len(), u.len())));
    }
    if speeds.iter().all(|&s| s == 0.0) {
        return Err(Error::NoEvent);
    }
    earliest(u.values(), u.breakpoints(), speeds, &phi.a, &phi.b)
        .map(|(t, kinds, _)| (t, kinds))
        .ok_or(Error::NoEvent)
}

struct RawEpoch<S> {
    start: S,
    state: Profile<S>,
    speeds: Vec<S>,
}

struct RawEvent<S> {
    time: S,
    kind: EventKind,
    state_after: Profile<S>,
}

struct RawTrajectory<S> {
    epochs: Vec<RawEpoch<S>>,
    events: Vec<RawEvent<S>>,
    t_ext: S,
    terminal: Profile<S>,
}

fn epoch_cap(n: usize) -> usize {
    10 * n + 16
}

fn run<S: FlowScalar>(mut state: Profile<S>, a: S, b: S) -> Result<RawTrajectory<S>> {
    state.canonicalize();
    let cap = epoch_cap(state.values.len());
    let mut t = S::zero();
    let mut epochs = Vec::new();
    let mut events = Vec::new();

    for _ in 0..cap {
        let pins = section_pins(&state.values, &a, &b);
        let speeds = section_speeds(&pins, &state.widths());
        if speeds.iter().all(|s| s.is_zero()) {
            events.push(RawEvent { time: t.clone(), kind: EventKind::Extinction, state_after: state.clone() });
            return Ok(RawTrajectory { epochs, events, t_ext: t, terminal: state });
        }
        let (dt, kinds, _) = earliest(&state.values, &state.breaks, &speeds, &a, &b).ok_or(Error::NoEvent)?;
        let count_before = state.values.len();
        epochs.push(RawEpoch { start: t.clone(), state: state.clone(), speeds: speeds.clone() });

        for (v, s) in state.values.iter_mut().zip(&speeds) {
            *v = v.clone() + s.clone() * dt.clone();
        }
        t = t + dt;
        let n = state.values.len();
        for kind in &kinds {
            match *kind {
                EventKind::BoundaryHit { end: End::Left } => state.values[0] = a.clone(),
                EventKind::BoundaryHit { end: End::Right } => state.values[n - 1] = b.clone(),
                _ => {}
            }
        }
        // Left to right so that chains of simultaneous merges share one value.
        for kind in &kinds {
            if let EventKind::Merge { left, .. } = *kind {
                state.values[left + 1] = state.values[left].clone();
            }
        }
        state.canonicalize();

        let merges = kinds.iter().filter(|k| matches!(k, EventKind::Merge { .. })).count();
        if count_before - state.values.len() < merges {
            return Err(Error::FlowInvariant(format!(
                "{merges} merges removed only {} facets",
                count_before - state.values.len()
            )));
        }
        for kind in kinds {
            events.push(RawEvent { time: t.clone(), kind, state_after: state.clone() });
        }
    }
    Err(Error::IterationCap(cap))
}

fn assemble<S: FlowScalar>(initial: &StepFunction, phi: &BoundaryPair, raw: &RawTrajectory<S>) -> FlowTrajectory {
    let t_ext = raw.t_ext.to_f64();
    let epochs: Vec<FlowEpoch> = raw
        .epochs
        .iter()
        .enumerate()
        .map(|(k, e)| FlowEpoch {
            start: e.start.to_f64(),
            end: raw.epochs.get(k + 1).map_or(t_ext, |n| n.start.to_f64()),
            state: e.state.to_step(),
            speeds: e.speeds.iter().map(FlowScalar::to_f64).collect(),
        })
        .collect();
    let events = raw
        .events
        .iter()
        .map(|e| FlowEvent { time: e.time.to_f64(), kind: e.kind, state_after: e.state_after.to_step() })
        .collect();
    FlowTrajectory {
        initial: initial.clone(),
        phi: *phi,
        epochs,
        events,
        t_ext,
        terminal: raw.terminal.to_step(),
    }
}

/// Runs the flow from `u0` to extinction in double precision.
pub fn evolve(u0: &StepFunction, phi: &BoundaryPair) -> Result<FlowTrajectory> {
    let state = Profile::<f64>::from_step(u0).expect("finite input");
    let raw = run(state, phi.a, phi.b)?;
    Ok(assemble(u0, phi, &raw))
}

/// Trajectory computed in exact rational arithmetic.
#[derive(Debug, Clone)]
pub struct ExactTrajectory {
    /// Event times, one per event kind, in order.
    pub event_times: Vec<BigRational>,
    pub t_ext: BigRational,
    pub terminal_breaks: Vec<BigRational>,
    pub terminal_values: Vec<BigRational>,
    /// The same trajectory rounded to doubles.
    pub rounded: FlowTrajectory,
}

/// Runs the flow exactly. Every double is a dyadic rational, so the input is
/// converted without error and no rounding happens until [`ExactTrajectory::rounded`].
pub fn evolve_exact(u0: &StepFunction, phi: &BoundaryPair) -> Result<ExactTrajectory> {
    let state = Profile::<BigRational>::from_step(u0).expect("finite input");
    let a = <BigRational as FlowScalar>::from_f64(phi.a).expect("finite boundary");
    let b = <BigRational as FlowScalar>::from_f64(phi.b).expect("finite boundary");
    let raw = run(state, a, b)?;
    Ok(ExactTrajectory {
        event_times: raw.events.iter().map(|e| e.time.clone()).collect(),
        t_ext: raw.t_ext.clone(),
        terminal_breaks: raw.terminal.breaks.clone(),
        terminal_values: raw.terminal.values.clone(),
        rounded: assemble(u0, phi, &raw),
    })
}

/// Constant-in-space barriers above and below the data.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Barriers {
    /// `max{max φ, max u0}`
    pub upper_start: f64,
    /// `min{min φ, min u0}`
    pub lower_start: f64,
    /// Time for the upper barrier to descend to `max φ`.
    pub t_upper: f64,
    /// Time for the lower barrier to rise to `min φ`.
    pub t_lower: f64,
}

/// A spatially constant state `c` with `c > max φ` has `z(0) = 1`, `z(L) = -1`
/// and descends at speed `2/L`; symmetrically below `min φ`.
pub fn barrier_bounds(u0: &StepFunction, phi: &BoundaryPair) -> Barriers {
    let l = u0.length();
    let upper_start = phi.max().max(u0.max_value());
    let lower_start = phi.min().min(u0.min_value());
    let t_upper = if upper_start - phi.max() > EPS_AMP { (upper_start - phi.max()) * l / 2.0 } else { 0.0 };
    let t_lower = if phi.min() - lower_start > EPS_AMP { (phi.min() - lower_start) * l / 2.0 } else { 0.0 };
    Barriers { upper_start, lower_start, t_upper, t_lower }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "verdict", rename_all = "kebab-case")]
pub enum ComparisonVerdict {
    /// Initial or boundary data are not ordered, or the domains differ.
    NotApplicable { reason: String },
    Holds { times_checked: usize },
    Violated { t: f64, x: f64, excess: f64 },
}

/// Checks `u(·, t) ≤ v(·, t)` at every event time of either trajectory. Both
/// states are affine in time between consecutive times of the union, so the
/// ordering at those times implies it everywhere.
pub fn check_comparison(traj_u: &FlowTrajectory, traj_v: &FlowTrajectory) -> ComparisonVerdict {
    let na = |reason: String| ComparisonVerdict::NotApplicable { reason };
    let cells = match overlay(&traj_u.initial, &traj_v.initial) {
        Ok(c) => c,
        Err(e) => return na(e.to_string()),
    };
    if let Some(c) = cells.iter().find(|c| c.u > c.v + EPS_AMP) {
        return na(format!("initial data not ordered on ({}, {})", c.left, c.right));
    }
    if traj_u.phi.a > traj_v.phi.a + EPS_AMP || traj_u.phi.b > traj_v.phi.b + EPS_AMP {
        return na("boundary data not ordered".into());
    }

    let mut times: Vec<f64> = traj_u.event_times().into_iter().chain(traj_v.event_times()).collect();
    times.sort_by(f64::total_cmp);
    times.dedup();
    for &t in &times {
        let cells = overlay(&traj_u.state_at(t), &traj_v.state_at(t)).expect("domains checked above");
        if let Some(c) = cells.iter().max_by(|p, q| (p.u - p.v).total_cmp(&(q.u - q.v))) {
            if c.u > c.v + EPS_AMP {
                return ComparisonVerdict::Violated { t, x: 0.5 * (c.left + c.right), excess: c.u - c.v };
            }
        }
    }
    ComparisonVerdict::Holds { times_checked: times.len() }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum LayerRelation {
    /// `f ≥ u_T` near the endpoint (trace above the datum).
    DataAbove,
    /// `f ≤ u_T` near the endpoint (trace below the datum).
    DataBelow,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(tag = "status", rename_all = "kebab-case")]
pub enum EndpointLayer {
    /// The trace of the data equals the boundary datum.
    NotApplicable,
    Measured {
        relation: LayerRelation,
        /// Largest `δ` such that the relation holds on the `δ`-neighbourhood.
        width: f64,
        holds: bool,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BoundaryLayerReport {
    pub left: EndpointLayer,
    pub right: EndpointLayer,
}

/// Sign relation between the initial datum and the terminal state near each
/// endpoint, with the width of the layer on which it holds.
pub fn boundary_layer_report(traj: &FlowTrajectory) -> BoundaryLayerReport {
    let f = &traj.initial;
    let cells = overlay(f, &traj.terminal).expect("terminal state shares the domain");
    let (f0, fl) = f.traces();
    let relation = |trace: f64, datum: f64| {
        if (trace - datum).abs() <= EPS_AMP {
            None
        } else if trace > datum {
            Some(LayerRelation::DataAbove)
        } else {
            Some(LayerRelation::DataBelow)
        }
    };
    let ok = |rel: LayerRelation, c: &crate::step::Cell| match rel {
        LayerRelation::DataAbove => c.u >= c.v - EPS_AMP,
        LayerRelation::DataBelow => c.u <= c.v + EPS_AMP,
    };
    let left = match relation(f0, traj.phi.a) {
        None => EndpointLayer::NotApplicable,
        Some(rel) => {
            let width = cells.iter().take_while(|c| ok(rel, c)).last().map_or(0.0, |c| c.right);
            EndpointLayer::Measured { relation: rel, width, holds: width > 0.0 }
        }
    };
    let right = match relation(fl, traj.phi.b) {
        None => EndpointLayer::NotApplicable,
        Some(rel) => {
            let l = f.length();
            let width = cells.iter().rev().take_while(|c| ok(rel, c)).last().map_or(0.0, |c| l - c.left);
            EndpointLayer::Measured { relation: rel, width, holds: width > 0.0 }
        }
    };
    BoundaryLayerReport { left, right }
}

/// Whether the terminal state has a monotone extension by the boundary data.
pub fn is_terminal(u: &StepFunction, phi: &BoundaryPair) -> bool {
    tilde_extend(u, phi).1.is_monotone()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::subdiff::minimal_section;
    use num_traits::One;

    fn example_s4(k: f64) -> StepFunction {
        StepFunction::new(2.0, vec![0.5, 1.0, 1.5], vec![0.0, -k, k, 0.0]).unwrap()
    }

    fn pair(a: f64, b: f64) -> BoundaryPair {
        BoundaryPair::new(a, b).unwrap()
    }

    fn q(n: i64, d: i64) -> BigRational {
        BigRational::new(n.into(), d.into())
    }

    #[test]
    fn facet_examples() {
        let facets = facet_decomposition(&example_s4(4.0), &pair(-1.0, 1.0));
        let classes: Vec<_> = facets.iter().map(|f| f.curvature).collect();
        use Curvature::*;
        assert_eq!(classes, vec![Negative, Positive, Negative, Positive]);

        let u = StepFunction::uniform(2.0, vec![-1.0, 1.0]).unwrap();
        let facets = facet_decomposition(&u, &pair(-1.0, 1.0));
        assert_eq!(facets.len(), 2);
        assert!(facets.iter().all(|f| f.curvature == Zero));

        let c = StepFunction::constant(1.0, 0.5).unwrap();
        let facets = facet_decomposition(&c, &pair(0.0, 1.0));
        assert_eq!(facets.len(), 1);
        assert_eq!(facets[0].curvature, Zero);
    }

    #[test]
    fn next_event_examples() {
        let phi = pair(-1.0, 1.0);
        let u = example_s4(4.0);
        let speeds = minimal_section(&u, &phi).speeds;
        let (t, kinds) = next_event(&u, &phi, &speeds).unwrap();
        assert_eq!(t, 0.25);
        assert_eq!(kinds, vec![EventKind::BoundaryHit { end: End::Left }, EventKind::BoundaryHit { end: End::Right }]);

        let u = example_s4(1.0);
        let speeds = minimal_section(&u, &phi).speeds;
        let (t, kinds) = next_event(&u, &phi, &speeds).unwrap();
        assert_eq!(t, 0.125);
        assert_eq!(kinds, vec![EventKind::Merge { left: 0, x: 0.5 }, EventKind::Merge { left: 2, x: 1.5 }]);

        let still = StepFunction::uniform(2.0, vec![-1.0, 1.0]).unwrap();
        assert_eq!(next_event(&still, &phi, &[0.0, 0.0]), Err(Error::NoEvent));
    }

    #[test]
    fn worked_example_k4() {
        let traj = evolve(&example_s4(4.0), &pair(-1.0, 1.0)).unwrap();
        assert_eq!(traj.terminal, StepFunction::uniform(2.0, vec![-1.0, 1.0]).unwrap());
        assert!((traj.t_ext - 0.75).abs() <= 1e-12);
        assert_eq!(traj.events.last().unwrap().kind, EventKind::Extinction);
    }

    #[test]
    fn worked_example_exact() {
        let exact = evolve_exact(&example_s4(4.0), &pair(-1.0, 1.0)).unwrap();
        assert_eq!(exact.t_ext, q(3, 4));
        assert_eq!(exact.terminal_breaks, vec![BigRational::one()]);
        assert_eq!(exact.terminal_values, vec![-BigRational::one(), BigRational::one()]);

        let exact = evolve_exact(&example_s4(1.0), &pair(-1.0, 1.0)).unwrap();
        assert_eq!(exact.t_ext, q(1, 8));
        assert_eq!(exact.terminal_values, vec![q(-1, 2), q(1, 2)]);
    }

    #[test]
    fn worked_example_k1_stops_short_of_the_data() {
        let traj = evolve(&example_s4(1.0), &pair(-1.0, 1.0)).unwrap();
        assert_eq!(traj.terminal, StepFunction::uniform(2.0, vec![-0.5, 0.5]).unwrap());
        assert!((traj.t_ext - 0.125).abs() <= 1e-12);
    }

    #[test]
    fn simultaneous_merge_and_boundary_hit() {
        // k = 2: the first facet reaches -1 exactly when the second rises to it.
        let exact = evolve_exact(&example_s4(2.0), &pair(-1.0, 1.0)).unwrap();
        assert_eq!(exact.terminal_values, vec![-BigRational::one(), BigRational::one()]);
        assert_eq!(exact.t_ext, q(1, 4));
        let kinds: Vec<_> = exact.rounded.events.iter().map(|e| e.kind).collect();
        assert_eq!(kinds.iter().filter(|k| matches!(k, EventKind::Merge { .. })).count(), 2);
        assert_eq!(kinds.iter().filter(|k| matches!(k, EventKind::BoundaryHit { .. })).count(), 2);
    }

    #[test]
    fn terminal_initial_data_does_not_move() {
        let u = StepFunction::uniform(3.0, vec![0.0, 0.5, 1.0]).unwrap();
        let traj = evolve(&u, &pair(-1.0, 2.0)).unwrap();
        assert_eq!(traj.t_ext, 0.0);
        assert_eq!(traj.terminal, u);
        assert!(traj.epochs.is_empty());
    }

    #[test]
    fn constant_below_data_rises_to_the_lower_datum() {
        let u = StepFunction::constant(2.0, -3.0).unwrap();
        let traj = evolve(&u, &pair(0.0, 1.0)).unwrap();
        // z goes from -1 to 1 over length 2: speed 1, reaches 0 at t = 3.
        assert_eq!(traj.terminal, StepFunction::constant(2.0, 0.0).unwrap());
        assert!((traj.t_ext - 3.0).abs() < 1e-12);
    }

    #[test]
    fn state_at_is_affine_between_events() {
        let traj = evolve(&example_s4(4.0), &pair(-1.0, 1.0)).unwrap();
        let mid = traj.state_at(0.125);
        assert_eq!(mid.values(), &[-0.5, -3.5, 3.5, 0.5]);
        let later = traj.state_at(0.5);
        assert_eq!(later.values(), &[-1.0, -2.0, 2.0, 1.0]);
        assert_eq!(traj.state_at(10.0), traj.terminal);
    }

    #[test]
    fn barrier_examples() {
        let phi = pair(-1.0, 1.0);
        let inside = StepFunction::uniform(2.0, vec![-0.5, 0.5]).unwrap();
        let b = barrier_bounds(&inside, &phi);
        assert_eq!((b.t_upper, b.t_lower), (0.0, 0.0));

        let high = StepFunction::uniform(2.0, vec![0.0, 5.0]).unwrap();
        let b = barrier_bounds(&high, &phi);
        assert_eq!(b.upper_start, 5.0);
        assert_eq!(b.t_upper, 4.0);
        assert_eq!(b.t_lower, 0.0);

        // The barrier itself, evolved, takes exactly t_upper to settle.
        let v = StepFunction::constant(2.0, 5.0).unwrap();
        let traj = evolve(&v, &phi).unwrap();
        assert!((traj.t_ext - 4.0).abs() < 1e-12);
    }

    #[test]
    fn comparison_examples() {
        let phi = pair(-1.0, 1.0);
        let u = evolve(&example_s4(4.0), &phi).unwrap();
        let v = evolve(&StepFunction::constant(2.0, 4.0).unwrap(), &phi).unwrap();
        assert!(matches!(check_comparison(&u, &v), ComparisonVerdict::Holds { .. }));
        assert!(matches!(check_comparison(&u, &u), ComparisonVerdict::Holds { .. }));
        assert!(matches!(check_comparison(&v, &u), ComparisonVerdict::NotApplicable { .. }));
    }

    #[test]
    fn boundary_layer_examples() {
        let traj = evolve(&example_s4(4.0), &pair(-1.0, 1.0)).unwrap();
        let rep = boundary_layer_report(&traj);
        assert_eq!(rep.left, EndpointLayer::Measured { relation: LayerRelation::DataAbove, width: 0.5, holds: true });
        assert_eq!(rep.right, EndpointLayer::Measured { relation: LayerRelation::DataBelow, width: 0.5, holds: true });

        let dec = StepFunction::new(2.0, vec![0.25, 1.0], vec![2.0, 1.0, 0.0]).unwrap();
        let traj = evolve(&dec, &pair(2.0, 0.0)).unwrap();
        let rep = boundary_layer_report(&traj);
        assert_eq!(rep.left, EndpointLayer::NotApplicable);
        assert_eq!(rep.right, EndpointLayer::NotApplicable);
    }
}
