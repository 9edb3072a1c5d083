//! Structured pass/fail records produced by every check.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Status {
    Pass,
    Fail,
    Skipped,
    ExpectedPossibleFail,
}

impl Status {
    pub fn as_str(self) -> &'static str {
        match self {
            Status::Pass => "pass",
            Status::Fail => "fail",
            Status::Skipped => "skipped",
            Status::ExpectedPossibleFail => "expected-possible-fail",
        }
    }
}

/// Absolute plus relative slack for an inequality `lhs ≤ rhs`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Tolerance {
    pub abs: f64,
    pub rel: f64,
}

impl Default for Tolerance {
    fn default() -> Self {
        Tolerance { abs: 1e-8, rel: 1e-8 }
    }
}

impl Tolerance {
    pub fn absolute(abs: f64) -> Self {
        Tolerance { abs, rel: 0.0 }
    }

    pub fn uniform(v: f64) -> Self {
        Tolerance { abs: v, rel: v }
    }

    pub fn scaled(self, factor: f64) -> Self {
        Tolerance {
            abs: self.abs * factor,
            rel: self.rel * factor,
        }
    }

    pub fn slack(&self, lhs: f64, rhs: f64) -> f64 {
        let mag = finite_or_zero(lhs).abs().max(finite_or_zero(rhs).abs());
        self.abs + self.rel * mag
    }

    pub fn allows(&self, lhs: f64, rhs: f64) -> bool {
        lhs <= rhs || lhs - rhs <= self.slack(lhs, rhs)
    }
}

fn finite_or_zero(v: f64) -> f64 {
    if v.is_finite() {
        v
    } else {
        0.0
    }
}

/// Worst offending sample of a failed inequality.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ViolationWitness {
    #[serde(with = "real")]
    pub location: f64,
    #[serde(with = "real")]
    pub lhs: f64,
    #[serde(with = "real")]
    pub rhs: f64,
    #[serde(with = "real")]
    pub margin: f64,
}

/// One evaluated instance of an inequality `lhs ≤ rhs`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Sample {
    #[serde(with = "real")]
    pub location: f64,
    #[serde(with = "real")]
    pub lhs: f64,
    #[serde(with = "real")]
    pub rhs: f64,
}

impl Sample {
    pub fn margin(&self) -> f64 {
        self.lhs - self.rhs
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Check {
    pub name: String,
    pub anchor: String,
    pub status: Status,
    #[serde(with = "real")]
    pub max_violation: f64,
    pub witness: Option<ViolationWitness>,
    pub tolerance: Tolerance,
    #[serde(with = "real")]
    pub resolution: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
    pub samples: Vec<Sample>,
}

impl Check {
    pub fn passed(&self) -> bool {
        self.status != Status::Fail
    }

    pub fn skipped(name: &str, anchor: &str, tol: Tolerance, note: impl Into<String>) -> Self {
        Check {
            name: name.into(),
            anchor: anchor.into(),
            status: Status::Skipped,
            max_violation: f64::NEG_INFINITY,
            witness: None,
            tolerance: tol,
            resolution: 0.0,
            note: Some(note.into()),
            samples: Vec::new(),
        }
    }
}

/// Accumulates samples of one inequality and decides its status.
#[derive(Debug, Clone)]
pub struct CheckBuilder {
    name: String,
    anchor: String,
    tol: Tolerance,
    strict: bool,
    applicable: bool,
    samples: Vec<Sample>,
    worst: Option<(f64, ViolationWitness)>,
    max_margin: f64,
    resolution: f64,
    note: Option<String>,
}

impl CheckBuilder {
    pub fn new(name: impl Into<String>, anchor: impl Into<String>, tol: Tolerance) -> Self {
        CheckBuilder {
            name: name.into(),
            anchor: anchor.into(),
            tol,
            strict: false,
            applicable: true,
            samples: Vec::new(),
            worst: None,
            max_margin: f64::NEG_INFINITY,
            resolution: 0.0,
            note: None,
        }
    }

    /// Require `lhs < rhs` with no slack.
    pub fn strict(mut self) -> Self {
        self.strict = true;
        self
    }

    /// Outside the guaranteed regime failures are downgraded.
    pub fn applicable(mut self, yes: bool) -> Self {
        self.applicable = yes;
        self
    }

    pub fn note(mut self, note: impl Into<String>) -> Self {
        self.note = Some(note.into());
        self
    }

    pub fn set_note(&mut self, note: impl Into<String>) {
        self.note = Some(note.into());
    }

    /// Records `lhs ≤ rhs` at `location`, widened by a numerical `resolution`.
    pub fn compare(&mut self, location: f64, lhs: f64, rhs: f64, resolution: f64) -> bool {
        let s = Sample { location, lhs, rhs };
        self.samples.push(s);
        let margin = if lhs == rhs { 0.0 } else { lhs - rhs };
        let margin = if margin.is_nan() { f64::INFINITY } else { margin };
        self.max_margin = self.max_margin.max(margin);
        let resolution = if resolution.is_finite() {
            resolution.max(0.0)
        } else {
            0.0
        };
        self.resolution = self.resolution.max(resolution);
        let excess = if self.strict {
            if margin < 0.0 {
                return true;
            }
            margin.max(f64::MIN_POSITIVE)
        } else {
            let allowed = self.tol.slack(lhs, rhs) + resolution;
            if margin <= allowed {
                return true;
            }
            margin - allowed
        };
        let w = ViolationWitness {
            location,
            lhs,
            rhs,
            margin,
        };
        if self.worst.is_none_or(|(e, _)| excess > e) {
            self.worst = Some((excess, w));
        }
        false
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    pub fn failing(&self) -> bool {
        self.worst.is_some()
    }

    pub fn finish(self) -> Check {
        let status = if self.samples.is_empty() {
            Status::Skipped
        } else if self.worst.is_none() {
            Status::Pass
        } else if self.applicable {
            Status::Fail
        } else {
            Status::ExpectedPossibleFail
        };
        Check {
            name: self.name,
            anchor: self.anchor,
            status,
            max_violation: self.max_margin,
            witness: self.worst.map(|(_, w)| w),
            tolerance: self.tol,
            resolution: self.resolution,
            note: self.note,
            samples: self.samples,
        }
    }
}

/// Outcome of one verification run.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct VerificationReport {
    pub suite: String,
    #[serde(default)]
    pub config_echo: BTreeMap<String, String>,
    #[serde(default, with = "real_map")]
    pub values: BTreeMap<String, f64>,
    #[serde(default)]
    pub warnings: Vec<String>,
    pub checks: Vec<Check>,
}

impl VerificationReport {
    pub fn new(suite: impl Into<String>) -> Self {
        VerificationReport {
            suite: suite.into(),
            ..Default::default()
        }
    }

    pub fn push(&mut self, check: Check) {
        self.checks.push(check);
    }

    pub fn value(&mut self, key: impl Into<String>, v: f64) {
        self.values.insert(key.into(), v);
    }

    pub fn warn(&mut self, w: impl Into<String>) {
        self.warnings.push(w.into());
    }

    pub fn passed(&self) -> bool {
        self.checks.iter().all(Check::passed)
    }

    pub fn check(&self, name: &str) -> Option<&Check> {
        self.checks.iter().find(|c| c.name == name)
    }

    pub fn failures(&self) -> impl Iterator<Item = &Check> {
        self.checks.iter().filter(|c| c.status == Status::Fail)
    }

    /// Folds `other` in, prefixing its check names and values with `scope`.
    pub fn absorb(&mut self, scope: &str, other: VerificationReport) {
        let prefix = |s: &str| {
            if scope.is_empty() {
                s.to_string()
            } else {
                format!("{scope}/{s}")
            }
        };
        for mut c in other.checks {
            c.name = prefix(&c.name);
            self.checks.push(c);
        }
        for (k, v) in other.values {
            self.values.insert(prefix(&k), v);
        }
        for w in other.warnings {
            self.warnings
                .push(if scope.is_empty() { w } else { format!("{scope}: {w}") });
        }
    }
}

/// Serializes non-finite floats as strings so JSON stays valid.
pub mod real {
    use serde::de::{self, Deserializer, Visitor};
    use serde::Serializer;
    use std::fmt;

    pub fn serialize<S: Serializer>(v: &f64, s: S) -> Result<S::Ok, S::Error> {
        if v.is_finite() {
            s.serialize_f64(*v)
        } else if v.is_nan() {
            s.serialize_str("nan")
        } else if *v > 0.0 {
            s.serialize_str("inf")
        } else {
            s.serialize_str("-inf")
        }
    }

    struct RealVisitor;

    impl Visitor<'_> for RealVisitor {
        type Value = f64;
        fn expecting(&self, f: &mut fmt::Formatter) -> fmt::Result {
            f.write_str("a number or one of \"inf\", \"-inf\", \"nan\"")
        }
        fn visit_f64<E: de::Error>(self, v: f64) -> Result<f64, E> {
            Ok(v)
        }
        fn visit_i64<E: de::Error>(self, v: i64) -> Result<f64, E> {
            Ok(v as f64)
        }
        fn visit_u64<E: de::Error>(self, v: u64) -> Result<f64, E> {
            Ok(v as f64)
        }
        fn visit_str<E: de::Error>(self, v: &str) -> Result<f64, E> {
            match v {
                "inf" => Ok(f64::INFINITY),
                "-inf" => Ok(f64::NEG_INFINITY),
                "nan" => Ok(f64::NAN),
                other => Err(E::invalid_value(de::Unexpected::Str(other), &self)),
            }
        }
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<f64, D::Error> {
        d.deserialize_any(RealVisitor)
    }
}

mod real_map {
    use serde::ser::SerializeMap;
    use serde::{Deserialize, Deserializer, Serialize, Serializer};
    use std::collections::BTreeMap;

    #[derive(Serialize, Deserialize)]
    struct Wrap(#[serde(with = "super::real")] f64);

    pub fn serialize<S: Serializer>(m: &BTreeMap<String, f64>, s: S) -> Result<S::Ok, S::Error> {
        let mut out = s.serialize_map(Some(m.len()))?;
        for (k, v) in m {
            out.serialize_entry(k, &Wrap(*v))?;
        }
        out.end()
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<BTreeMap<String, f64>, D::Error> {
        let m = BTreeMap::<String, Wrap>::deserialize(d)?;
        Ok(m.into_iter().map(|(k, Wrap(v))| (k, v)).collect())
    }
}
