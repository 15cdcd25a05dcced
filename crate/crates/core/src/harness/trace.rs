//! Trace and expectation files.
//!
//! A trace is JSON Lines, one record per line:
//!
//! ```text
//! {"seq":1,"type":"press","x":120,"y":300,"button":1}
//! {"seq":2,"type":"move","x":121,"y":309}
//! {"seq":3,"type":"release","x":121,"y":309}
//! {"seq":4,"type":"resize","w":1400,"h":960}
//! {"seq":5,"type":"set_view","week":0,"zoom":1.5,"pan_x":0,"pan_y":-100}
//! ```
//!
//! Expectations are a JSON array of
//! `{"after_seq":3,"assert":"state","equals":"idle"}`,
//! `{"after_seq":3,"assert":"model","equals":{...}}` or
//! `{"after_seq":3,"assert":"pick","x":10,"y":10,"tag":"thumb"}`.

use std::collections::HashSet;

use serde::{Deserialize, Serialize};

use crate::geometry::Point;
use crate::interactions::ViewUpdate;
use crate::model::Model;

use super::HarnessError;

fn default_button() -> u8 {
    1
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum Input {
    Press {
        x: f64,
        y: f64,
        #[serde(default = "default_button")]
        button: u8,
    },
    Move {
        x: f64,
        y: f64,
        #[serde(default = "default_button")]
        button: u8,
    },
    Release {
        x: f64,
        y: f64,
        #[serde(default = "default_button")]
        button: u8,
    },
    Wheel {
        x: f64,
        y: f64,
        #[serde(default)]
        delta: f64,
    },
    Resize {
        w: f64,
        h: f64,
    },
    SetView(ViewUpdate),
}

impl Input {
    pub fn press(p: Point) -> Self {
        Input::Press {
            x: p.x,
            y: p.y,
            button: 1,
        }
    }

    pub fn moved(p: Point) -> Self {
        Input::Move {
            x: p.x,
            y: p.y,
            button: 1,
        }
    }

    pub fn release(p: Point) -> Self {
        Input::Release {
            x: p.x,
            y: p.y,
            button: 1,
        }
    }

    /// Pointer position carried by the input, if any.
    pub fn point(&self) -> Option<Point> {
        match *self {
            Input::Press { x, y, .. }
            | Input::Move { x, y, .. }
            | Input::Release { x, y, .. }
            | Input::Wheel { x, y, .. } => Some(Point::new(x, y)),
            Input::Resize { .. } | Input::SetView(_) => None,
        }
    }

    /// Same input with its pointer position replaced by `f(position)`.
    pub fn map_point(&self, f: impl Fn(Point) -> Point) -> Input {
        let mut out = self.clone();
        match &mut out {
            Input::Press { x, y, .. }
            | Input::Move { x, y, .. }
            | Input::Release { x, y, .. }
            | Input::Wheel { x, y, .. } => {
                let q = f(Point::new(*x, *y));
                *x = q.x;
                *y = q.y;
            }
            Input::Resize { .. } | Input::SetView(_) => {}
        }
        out
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TraceRecord {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seq: Option<u64>,
    #[serde(flatten)]
    pub input: Input,
}

impl TraceRecord {
    pub fn new(seq: u64, input: Input) -> Self {
        TraceRecord {
            seq: Some(seq),
            input,
        }
    }
}

/// Numbers inputs `1..=n`.
pub fn number(inputs: impl IntoIterator<Item = Input>) -> Vec<TraceRecord> {
    inputs
        .into_iter()
        .enumerate()
        .map(|(i, input)| TraceRecord::new(i as u64 + 1, input))
        .collect()
}

/// Parses a JSON Lines trace. Blank lines are skipped; every record needs a
/// `seq`, strictly increasing.
pub fn parse_trace(text: &str) -> Result<Vec<TraceRecord>, HarnessError> {
    let mut out = Vec::new();
    let mut last: Option<u64> = None;
    for (i, line) in text.lines().enumerate() {
        let line_no = i + 1;
        if line.trim().is_empty() {
            continue;
        }
        let rec: TraceRecord =
            serde_json::from_str(line).map_err(|e| HarnessError::MalformedTrace {
                line: line_no,
                message: e.to_string(),
            })?;
        let seq = rec.seq.ok_or_else(|| HarnessError::MalformedTrace {
            line: line_no,
            message: "missing seq".into(),
        })?;
        if last.is_some_and(|l| seq <= l) {
            return Err(HarnessError::MalformedTrace {
                line: line_no,
                message: format!("seq {seq} does not increase"),
            });
        }
        if let Some(p) = rec.input.point() {
            if !p.is_finite() {
                return Err(HarnessError::MalformedTrace {
                    line: line_no,
                    message: "non-finite coordinates".into(),
                });
            }
        }
        last = Some(seq);
        out.push(rec);
    }
    Ok(out)
}

pub fn write_trace(records: &[TraceRecord]) -> String {
    let mut s = String::new();
    for r in records {
        s.push_str(&serde_json::to_string(r).expect("trace record serializes"));
        s.push('\n');
    }
    s
}

fn default_tolerance() -> f64 {
    1e-6
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "assert", rename_all = "snake_case")]
pub enum Assertion {
    /// Model snapshot equality, numbers compared within `tolerance`.
    Model {
        equals: Model,
        #[serde(default = "default_tolerance")]
        tolerance: f64,
    },
    /// Current machine state name.
    State { equals: String },
    /// Topmost picking object at a screen point, by tag and/or id.
    Pick {
        x: f64,
        y: f64,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        tag: Option<String>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        id: Option<u32>,
    },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Expectation {
    pub after_seq: u64,
    #[serde(flatten)]
    pub assertion: Assertion,
}

pub fn parse_expectations(text: &str) -> Result<Vec<Expectation>, HarnessError> {
    serde_json::from_str(text).map_err(|e| HarnessError::MalformedExpectations(e.to_string()))
}

/// Every expectation must point at a record of the trace.
pub fn check_expectations(
    trace: &[TraceRecord],
    expectations: &[Expectation],
) -> Result<(), HarnessError> {
    let seqs: HashSet<u64> = trace.iter().filter_map(|r| r.seq).collect();
    for e in expectations {
        if !seqs.contains(&e.after_seq) {
            return Err(HarnessError::MalformedExpectations(format!(
                "after_seq {} is not in the trace",
                e.after_seq
            )));
        }
    }
    Ok(())
}
