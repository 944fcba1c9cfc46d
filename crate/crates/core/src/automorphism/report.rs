use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Pass,
    Skipped,
    /// The input data did not cover what the check needed.
    Gap,
    Fail,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Check {
    pub name: String,
    pub status: Status,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub counterexample: Option<String>,
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct CheckReport {
    pub checks: Vec<Check>,
}

impl CheckReport {
    pub fn new() -> CheckReport {
        CheckReport::default()
    }

    pub fn push(
        &mut self,
        name: impl Into<String>,
        status: Status,
        counterexample: Option<String>,
    ) {
        self.checks.push(Check {
            name: name.into(),
            status,
            counterexample,
        });
    }

    pub fn pass(&mut self, name: impl Into<String>) {
        self.push(name, Status::Pass, None);
    }

    pub fn fail(&mut self, name: impl Into<String>, counterexample: impl Into<String>) {
        self.push(name, Status::Fail, Some(counterexample.into()));
    }

    /// `Ok(None)` passes, `Ok(Some(cex))` fails and coverage gaps become
    /// `Gap`. Other errors propagate.
    pub fn record(
        &mut self,
        name: impl Into<String>,
        outcome: Result<Option<String>>,
    ) -> Result<Status> {
        let name = name.into();
        let status = match outcome {
            Ok(None) => Status::Pass,
            Ok(Some(cex)) => {
                self.fail(name, cex);
                return Ok(Status::Fail);
            }
            Err(Error::CoverageGap(msg)) => {
                self.push(name, Status::Gap, Some(msg));
                return Ok(Status::Gap);
            }
            Err(e) => return Err(e),
        };
        self.push(name, status, None);
        Ok(status)
    }

    pub fn extend(&mut self, other: CheckReport) {
        self.checks.extend(other.checks);
    }

    /// Worst status present; an empty report passes.
    pub fn status(&self) -> Status {
        self.checks
            .iter()
            .map(|c| c.status)
            .max()
            .unwrap_or(Status::Pass)
            .max(Status::Pass)
    }

    pub fn passed(&self) -> bool {
        self.checks
            .iter()
            .all(|c| matches!(c.status, Status::Pass | Status::Skipped))
    }

    pub fn get(&self, name: &str) -> Option<&Check> {
        self.checks.iter().find(|c| c.name == name)
    }

    pub fn to_json(&self) -> serde_json::Value {
        serde_json::to_value(self).expect("report serializes")
    }
}

impl fmt::Display for Status {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Status::Pass => "pass",
            Status::Skipped => "skipped",
            Status::Gap => "gap",
            Status::Fail => "FAIL",
        })
    }
}

impl fmt::Display for CheckReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for c in &self.checks {
            write!(f, "{:>7}  {}", c.status.to_string(), c.name)?;
            if let Some(cex) = &c.counterexample {
                write!(f, "  [{cex}]")?;
            }
            writeln!(f)?;
        }
        Ok(())
    }
}
