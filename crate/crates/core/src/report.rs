use serde::{Serialize, Serializer};

use crate::exactnum::BigInt;

/// Big integers go to JSON as decimal strings so no precision is lost.
pub(crate) fn big_as_str<S: Serializer>(x: &BigInt, s: S) -> Result<S::Ok, S::Error> {
    s.serialize_str(&x.to_string())
}

pub(crate) fn bigs_as_strs<S: Serializer>(xs: &[BigInt], s: S) -> Result<S::Ok, S::Error> {
    s.collect_seq(xs.iter().map(|x| x.to_string()))
}

/// Outcome of one named check over an index range.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Check {
    pub name: String,
    pub pass: bool,
    /// Smallest index at which the check failed.
    pub first_violation: Option<u64>,
}

impl Check {
    pub fn new(name: impl Into<String>, first_violation: Option<u64>) -> Self {
        Self { name: name.into(), pass: first_violation.is_none(), first_violation }
    }

    /// Runs `holds` over `range` and records the first index where it is false.
    pub fn over<I, F>(name: impl Into<String>, range: I, mut holds: F) -> Self
    where
        I: IntoIterator<Item = u64>,
        F: FnMut(u64) -> bool,
    {
        Self::new(name, range.into_iter().find(|&n| !holds(n)))
    }

    /// A check with no index, e.g. a fixed table comparison.
    pub fn single(name: impl Into<String>, pass: bool) -> Self {
        Self::new(name, if pass { None } else { Some(0) })
    }
}

/// The JSON-facing report shape shared by the checkers:
/// `{chain, n_max, checks: [{name, pass, first_violation}], observed_values}`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Report {
    pub chain: String,
    pub n_max: u64,
    pub checks: Vec<Check>,
    pub observed_values: Vec<String>,
}

impl Report {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.pass)
    }

    pub fn failures(&self) -> impl Iterator<Item = &Check> {
        self.checks.iter().filter(|c| !c.pass)
    }

    pub fn to_text(&self) -> String {
        let mut out = format!("{} (n_max = {})\n", self.chain, self.n_max);
        for c in &self.checks {
            match c.first_violation {
                None => out.push_str(&format!("  PASS {}\n", c.name)),
                Some(n) => out.push_str(&format!("  FAIL {} (first violation at n = {n})\n", c.name)),
            }
        }
        if !self.observed_values.is_empty() {
            out.push_str(&format!("  observed values: {{{}}}\n", self.observed_values.join(", ")));
        }
        out
    }
}
