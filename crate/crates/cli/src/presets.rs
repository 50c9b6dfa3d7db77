//! Preset scenarios.

use rof1d::attain::{lambda_threshold, small_jump_finding};
use rof1d::presets::{self as p, PRESETS};
use rof1d::rofsolve::OracleConfig;
use rof1d::step::linf_distance;
use rof1d::BoundaryPair;

use crate::output::{describe, num, Report};
use crate::scenario::{Counterexample, Options, Scenario, Task};
use crate::{tasks, CliError};

fn scenario(name: &str, task: Task) -> Scenario {
    Scenario { name: name.to_string(), task, f: None, phi: None, lambda: None, options: Options::default() }
}

pub fn build(name: &str, k: f64) -> Result<Scenario, CliError> {
    let mut s = match name {
        "example-s4" | "threshold" => {
            let (f, phi) = p::example_s4(k)?;
            let mut s = scenario(name, if name == "threshold" { Task::Threshold } else { Task::Flow });
            s.f = Some(f);
            s.phi = Some(phi);
            s.options.rational = true;
            s
        }
        "thm-4-1" | "thm-4-2" => {
            let (f, lambda) = if name == "thm-4-1" { p::trace_inheritance()? } else { p::small_data()? };
            let phi = if name == "thm-4-1" {
                let (a, b) = f.traces();
                BoundaryPair::new(a, b)?
            } else {
                BoundaryPair::new(f.mean(), f.mean())?
            };
            let mut s = scenario(name, Task::Attainment);
            s.f = Some(f);
            s.phi = Some(phi);
            s.lambda = Some(lambda);
            s
        }
        "lemma-3-9-barriers" => {
            let (f, phi) = p::barriers()?;
            let mut s = scenario(name, Task::Flow);
            s.f = Some(f);
            s.phi = Some(phi);
            s
        }
        "large-gap" => {
            let (f, lambda) = p::large_gap()?;
            let mut s = scenario(name, Task::Counterexample);
            s.f = Some(f);
            s.lambda = Some(lambda);
            s.options.kind = Some(Counterexample::LargeGap);
            s
        }
        "instability-a" | "instability-b" => {
            let mut s = scenario(name, Task::Counterexample);
            s.options.kind =
                Some(if name == "instability-a" { Counterexample::InstabilityA } else { Counterexample::InstabilityB });
            s
        }
        _ => return Err(CliError::Usage(format!("unknown preset `{name}`; see `rof1d list`"))),
    };
    s.options.epsilons = Some(p::INSTABILITY_EPSILONS.to_vec());
    Ok(s)
}

/// Runs a preset. The four-step presets also check their terminal state
/// against the `(a, b)` halves and write `finding.txt` when they differ.
pub fn run(name: &str, k: f64) -> Result<Report, CliError> {
    if name == "suite-all" {
        let mut r = Report::default();
        r.kv("scenario", "suite-all");
        for info in PRESETS.iter().filter(|i| i.name != "suite-all") {
            let child = run(info.name, 4.0)?;
            let status = if child.failures().is_empty() { "pass" } else { "FAIL" };
            r.kv(info.name, status);
            r.children.push((info.name.to_string(), child));
        }
        return Ok(r);
    }
    let s = build(name, k)?;
    let mut r = tasks::execute(&s)?;
    if matches!(name, "example-s4" | "threshold") {
        r.kv("k", num(k));
        let (f, phi) = p::example_s4(k)?;
        let terminal = rof1d::tvflow::evolve(&f, &phi)?.terminal;
        let halves = rof1d::StepFunction::new(f.length(), vec![f.length() / 2.0], vec![phi.a, phi.b])?;
        if linf_distance(&terminal, &halves)? > rof1d::step::EPS_AMP {
            let l1 = lambda_threshold(&f, &phi)?;
            let lambda = if l1 > 0.25 { 0.25 } else { 0.5 * l1 };
            let finding = small_jump_finding(k, lambda, &OracleConfig::default())?;
            r.texts.push(("finding.txt".into(), finding_text(&finding)?));
            r.kv("finding", "terminal state differs from the boundary halves; see finding.txt");
            if !(finding.terminal_certified && finding.solver_distance <= 1e-8 && finding.oracle_distance <= 1e-6) {
                r.problems.push("finding not confirmed by certificate, solver and oracle".into());
            }
        }
    }
    Ok(r)
}

fn finding_text(f: &rof1d::attain::SmallJumpFinding) -> Result<String, CliError> {
    Ok(format!(
        "data: (0, -k, k, 0) on quarters of (0, 2), k = {}, phi = (-1, 1)\n\
         expected terminal state: {}\n\
         computed terminal state: {}\n\
         T_ext: {}\n\
         stationarity certificate: {}\n\
         lambda: {}\n\
         exact solver distance to terminal state: {}\n\
         oracle distance to terminal state: {}\n\
         expected vs computed L-infinity gap: {}\n",
        num(f.k),
        describe(&f.predicted),
        describe(&f.terminal),
        num(f.t_ext),
        if f.terminal_certified { "verified" } else { "failed" },
        num(f.lambda),
        num(f.solver_distance),
        num(f.oracle_distance),
        num(linf_distance(&f.predicted, &f.terminal)?),
    ))
}

pub fn listing() -> String {
    PRESETS
        .iter()
        .map(|p| format!("{:<20} {}{}\n", p.name, p.summary, if p.takes_k { " [--k]" } else { "" }))
        .collect()
}
