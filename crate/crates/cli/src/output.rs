//! Everything a task produces, and how it lands on disk.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use rof1d::attain::TheoremVerdict;
use rof1d::tvflow::{EventKind, FlowTrajectory};
use rof1d::{DualField, StepFunction};

use crate::CliError;

/// Formats a number for output files; `-0` prints as `0`.
pub fn num(x: f64) -> String {
    format!("{}", x + 0.0)
}

pub fn list(xs: &[f64]) -> String {
    let parts: Vec<String> = xs.iter().map(|&x| num(x)).collect();
    format!("({})", parts.join(", "))
}

pub fn describe(u: &StepFunction) -> String {
    if u.is_constant() {
        format!("constant {}", num(u.values()[0]))
    } else {
        format!("step {} with jumps at {}", list(u.values()), list(u.breakpoints()))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct EventRow {
    pub t: f64,
    pub kind: &'static str,
    pub detail: String,
}

#[derive(Debug, Default, Clone)]
pub struct Report {
    pub steps: Vec<(String, StepFunction)>,
    pub fields: Vec<(String, DualField)>,
    pub events: Vec<EventRow>,
    pub summary: Vec<(String, String)>,
    pub verdicts: Vec<TheoremVerdict>,
    pub texts: Vec<(String, String)>,
    /// Failed checks that are not theorem verdicts.
    pub problems: Vec<String>,
    /// Per-scenario reports of a multi-scenario task, written to subdirectories.
    pub children: Vec<(String, Report)>,
}

impl Report {
    pub fn step(&mut self, name: &str, u: &StepFunction) {
        self.steps.push((name.to_string(), u.clone()));
    }

    pub fn field(&mut self, name: &str, z: &DualField) {
        self.fields.push((name.to_string(), z.clone()));
    }

    pub fn kv(&mut self, key: &str, value: impl ToString) {
        self.summary.push((key.to_string(), value.to_string()));
    }

    pub fn verdict(&mut self, v: TheoremVerdict) {
        self.verdicts.push(v);
    }

    pub fn trajectory(&mut self, traj: &FlowTrajectory) {
        for e in &traj.events {
            let (kind, detail) = match e.kind {
                EventKind::Merge { left, x } => ("merge", format!("facets {left} and {} at x = {}", left + 1, num(x))),
                EventKind::BoundaryHit { end } => ("boundary-hit", format!("{end:?}").to_lowercase()),
                EventKind::Extinction => ("extinction", describe(&e.state_after)),
            };
            self.events.push(EventRow { t: e.time, kind, detail });
        }
    }

    /// Verdicts whose hypotheses held but whose conclusion failed, here and in
    /// every child.
    pub fn failures(&self) -> Vec<String> {
        let mut out: Vec<String> = self
            .verdicts
            .iter()
            .filter(|v| !v.passed())
            .map(|v| format!("{:?}: conclusion failed", v.theorem))
            .chain(self.problems.iter().cloned())
            .collect();
        for (name, child) in &self.children {
            out.extend(child.failures().into_iter().map(|f| format!("{name}/{f}")));
        }
        out
    }

    pub fn summary_text(&self) -> String {
        let mut s = String::new();
        for (k, v) in &self.summary {
            writeln!(s, "{k}: {v}").unwrap();
        }
        for v in &self.verdicts {
            let status = if !v.hypotheses {
                "hypotheses not met"
            } else if v.conclusion {
                "pass"
            } else {
                "FAIL"
            };
            let diag: Vec<String> = v.diagnostics.iter().map(|(k, x)| format!("{k}={}", num(*x))).collect();
            writeln!(s, "verdict {:?}: {status} [{}]", v.theorem, diag.join(", ")).unwrap();
        }
        s
    }

    /// Writes every artifact under `dir` and returns the paths written.
    pub fn write(&self, dir: &Path, svg: bool) -> Result<Vec<PathBuf>, CliError> {
        fs::create_dir_all(dir)?;
        let mut paths = Vec::new();
        for (name, u) in &self.steps {
            let path = dir.join(format!("{name}.csv"));
            write_step_csv(&path, u)?;
            paths.push(path);
        }
        for (name, z) in &self.fields {
            let path = dir.join(format!("{name}.csv"));
            let mut w = csv::Writer::from_path(&path)?;
            w.write_record(["x", "z"])?;
            for (x, v) in z.nodes().iter().zip(z.values()) {
                w.write_record([num(*x), num(*v)])?;
            }
            w.flush()?;
            paths.push(path);
        }
        if !self.events.is_empty() {
            let path = dir.join("events.csv");
            let mut w = csv::Writer::from_path(&path)?;
            w.write_record(["t", "kind", "detail"])?;
            for e in &self.events {
                w.write_record([num(e.t).as_str(), e.kind, e.detail.as_str()])?;
            }
            w.flush()?;
            paths.push(path);
        }
        for (name, text) in &self.texts {
            let path = dir.join(name);
            fs::write(&path, text)?;
            paths.push(path);
        }
        let path = dir.join("summary.txt");
        fs::write(&path, self.summary_text())?;
        paths.push(path);
        if svg && (!self.steps.is_empty() || !self.fields.is_empty()) {
            let path = dir.join("plot.svg");
            fs::write(&path, crate::svg::plot(&self.steps, &self.fields))?;
            paths.push(path);
        }
        for (name, child) in &self.children {
            paths.extend(child.write(&dir.join(name), svg)?);
        }
        Ok(paths)
    }
}

fn write_step_csv(path: &Path, u: &StepFunction) -> Result<(), CliError> {
    let mut w = csv::Writer::from_path(path)?;
    w.write_record(["x_left", "x_right", "value"])?;
    for i in 0..u.len() {
        let (l, r) = u.interval(i);
        w.write_record([num(l), num(r), num(u.values()[i])])?;
    }
    w.flush()?;
    Ok(())
}
