//! Verification results in a stable text form.

use std::fmt;

/// How a check value is compared with its tolerance.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Criterion {
    AtMost(f64),
    AtLeast(f64),
    Within(f64, f64),
    /// Strictly below zero.
    Negative,
}

impl Criterion {
    pub fn accepts(&self, v: f64) -> bool {
        match *self {
            Criterion::AtMost(t) => v <= t,
            Criterion::AtLeast(t) => v >= t,
            Criterion::Within(lo, hi) => v >= lo && v <= hi,
            Criterion::Negative => v < 0.0,
        }
    }
}

impl fmt::Display for Criterion {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match *self {
            Criterion::AtMost(t) => write!(f, "<={t:e}"),
            Criterion::AtLeast(t) => write!(f, ">={t:e}"),
            Criterion::Within(lo, hi) => write!(f, "in[{lo},{hi}]"),
            Criterion::Negative => write!(f, "<0"),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct CheckResult {
    pub name: String,
    pub order: usize,
    /// Measured value; signed only for the energy checks.
    pub residual: f64,
    pub criterion: Criterion,
    pub pass: bool,
    pub seconds: f64,
    pub note: String,
}

impl CheckResult {
    pub fn new(name: impl Into<String>, order: usize, residual: f64, criterion: Criterion) -> Self {
        Self {
            name: name.into(),
            order,
            residual,
            criterion,
            pass: criterion.accepts(residual),
            seconds: 0.0,
            note: String::new(),
        }
    }

    pub fn with_note(mut self, note: impl Into<String>) -> Self {
        self.note = note.into();
        self
    }

    /// A check that could not be evaluated.
    pub fn failed(name: impl Into<String>, order: usize, why: impl Into<String>) -> Self {
        Self {
            name: name.into(),
            order,
            residual: f64::NAN,
            criterion: Criterion::AtMost(0.0),
            pass: false,
            seconds: 0.0,
            note: why.into(),
        }
    }
}

impl fmt::Display for CheckResult {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "check={} order={} residual={:.3e} tolerance={} pass={} runtime_s={:.2}",
            self.name, self.order, self.residual, self.criterion, self.pass, self.seconds
        )?;
        if !self.note.is_empty() {
            write!(f, " note=\"{}\"", self.note.replace('"', "'"))?;
        }
        Ok(())
    }
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct VerificationReport {
    pub scene_hash: String,
    pub seed: u64,
    pub checks: Vec<CheckResult>,
}

impl VerificationReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.pass)
    }

    /// The report without timings, for reproducibility comparisons.
    pub fn without_timings(&self) -> Self {
        let mut r = self.clone();
        for c in &mut r.checks {
            c.seconds = 0.0;
        }
        r
    }
}

impl fmt::Display for VerificationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "report scene_hash={} seed={} checks={}", self.scene_hash, self.seed, self.checks.len())?;
        for c in &self.checks {
            writeln!(f, "{c}")?;
        }
        let failed = self.checks.iter().filter(|c| !c.pass).count();
        write!(f, "summary pass={} failed={}", failed == 0, failed)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn criteria() {
        assert!(Criterion::AtMost(1.0).accepts(1.0));
        assert!(!Criterion::AtLeast(2.0).accepts(1.0));
        assert!(Criterion::Within(0.3, 0.7).accepts(0.5));
        assert!(!Criterion::Negative.accepts(0.0));
        assert!(!Criterion::AtMost(1.0).accepts(f64::NAN));
    }

    #[test]
    fn rendering_is_stable() {
        let r = VerificationReport {
            scene_hash: "ab".into(),
            seed: 7,
            checks: vec![CheckResult::new("x", 12, 1e-5, Criterion::AtMost(1e-4)).with_note("a \"b\"")],
        };
        let s = r.to_string();
        assert_eq!(
            s,
            "report scene_hash=ab seed=7 checks=1\n\
             check=x order=12 residual=1.000e-5 tolerance=<=1e-4 pass=true runtime_s=0.00 note=\"a 'b'\"\n\
             summary pass=true failed=0"
        );
    }
}
