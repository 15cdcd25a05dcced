//! Headless replay of a trace against an interaction, with expectation
//! checks.

use serde::Serialize;

use crate::geometry::Point;
use crate::interactions::Interaction;
use crate::model::{json_approx_eq, Model};
use crate::statemachine::Fired;

use super::driver::Driver;
use super::trace::{check_expectations, Assertion, Expectation, TraceRecord};
use super::HarnessError;

#[derive(Clone, Debug, Serialize)]
pub struct StepLog {
    pub seq: u64,
    pub state: String,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub fired: Vec<Fired>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
}

#[derive(Clone, Debug, Serialize)]
pub struct CheckResult {
    pub after_seq: u64,
    pub assert: String,
    pub passed: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub expected: Option<serde_json::Value>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub actual: Option<serde_json::Value>,
}

/// Deterministic summary of a replay; serializes to the same bytes for the
/// same inputs.
#[derive(Clone, Debug, Serialize)]
pub struct ReplayReport {
    pub interaction: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    pub records: usize,
    pub steps: Vec<StepLog>,
    pub checks: Vec<CheckResult>,
    pub final_state: String,
    pub final_model: Model,
    pub passed: bool,
}

impl ReplayReport {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }

    pub fn errors(&self) -> impl Iterator<Item = &StepLog> {
        self.steps.iter().filter(|s| s.error.is_some())
    }
}

/// Replays `trace` and evaluates `expectations` after their records.
/// The driver is left in its final state.
pub fn replay_with(
    driver: &mut Driver,
    trace: &[TraceRecord],
    expectations: &[Expectation],
    seed: Option<u64>,
) -> Result<ReplayReport, HarnessError> {
    check_expectations(trace, expectations)?;
    let mut steps = Vec::with_capacity(trace.len());
    let mut checks = Vec::new();
    for (i, rec) in trace.iter().enumerate() {
        let seq = rec.seq.unwrap_or(i as u64 + 1);
        let out = driver.feed(&rec.input)?;
        steps.push(StepLog {
            seq,
            state: driver.state().to_string(),
            fired: out.fired,
            error: out.error,
        });
        for e in expectations.iter().filter(|e| e.after_seq == seq) {
            checks.push(evaluate(driver, e));
        }
    }
    let passed = checks.iter().all(|c| c.passed) && steps.iter().all(|s| s.error.is_none());
    Ok(ReplayReport {
        interaction: driver.interaction().kind().name().to_string(),
        seed,
        records: trace.len(),
        steps,
        checks,
        final_state: driver.state().to_string(),
        final_model: driver.interaction().model().clone(),
        passed,
    })
}

pub fn replay(
    interaction: Box<dyn Interaction>,
    trace: &[TraceRecord],
    expectations: &[Expectation],
    seed: Option<u64>,
) -> Result<(ReplayReport, Driver), HarnessError> {
    let mut driver = Driver::new(interaction)?;
    let report = replay_with(&mut driver, trace, expectations, seed)?;
    Ok((report, driver))
}

fn evaluate(driver: &Driver, e: &Expectation) -> CheckResult {
    let result = |assert: &str, passed: bool, expected, actual| CheckResult {
        after_seq: e.after_seq,
        assert: assert.to_string(),
        passed,
        expected: if passed { None } else { Some(expected) },
        actual: if passed { None } else { Some(actual) },
    };
    match &e.assertion {
        Assertion::State { equals } => {
            let actual = driver.state();
            result(
                "state",
                actual == equals,
                serde_json::json!(equals),
                serde_json::json!(actual),
            )
        }
        Assertion::Model { equals, tolerance } => {
            let expected = serde_json::to_value(equals).expect("model serializes");
            let actual =
                serde_json::to_value(driver.interaction().model()).expect("model serializes");
            let ok = json_approx_eq(&expected, &actual, *tolerance);
            result("model", ok, expected, actual)
        }
        Assertion::Pick { x, y, tag, id } => {
            let got = driver.pick_at(Point::new(*x, *y));
            let got_tag = driver.tag_of(got);
            let ok = tag.as_deref().is_none_or(|t| t == got_tag) && id.is_none_or(|i| i == got);
            result(
                "pick",
                ok,
                serde_json::json!({ "tag": tag, "id": id }),
                serde_json::json!({ "tag": got_tag, "id": got }),
            )
        }
    }
}
