//! Conceptual models manipulated through the picking views: the calendar
//! event table, scrollbar range, draggable objects and magnetic guides.
//!
//! Calendar intervals are half-open `[start, end)` in minutes since the
//! Monday-aligned epoch.

use std::collections::{BTreeMap, HashSet};
use std::fs;
use std::path::Path;

use serde::{Deserialize, Deserializer, Serialize, Serializer};
use thiserror::Error;

pub const DEFAULT_MIN_DURATION: f64 = 15.0;

#[derive(Debug, Error)]
pub enum ModelError {
    #[error("unknown id {0}")]
    UnknownId(u64),
    #[error("invalid model: {0}")]
    Invalid(String),
    #[error("model file: {0}")]
    Io(#[from] std::io::Error),
    #[error("model json: {0}")]
    Json(#[from] serde_json::Error),
}

/// Writes whole minutes as JSON integers and anything else as a float.
mod minutes {
    use super::*;

    pub fn serialize<S: Serializer>(v: &f64, s: S) -> Result<S::Ok, S::Error> {
        if v.fract() == 0.0 && v.abs() < 9.0e15 {
            s.serialize_i64(*v as i64)
        } else {
            s.serialize_f64(*v)
        }
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<f64, D::Error> {
        f64::deserialize(d)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CalendarEvent {
    pub id: u64,
    #[serde(rename = "start_min", with = "minutes")]
    pub start: f64,
    #[serde(rename = "end_min", with = "minutes")]
    pub end: f64,
    #[serde(default)]
    pub title: String,
}

impl CalendarEvent {
    pub fn new(id: u64, start: f64, end: f64, title: impl Into<String>) -> Self {
        CalendarEvent {
            id,
            start,
            end,
            title: title.into(),
        }
    }

    pub fn duration(&self) -> f64 {
        self.end - self.start
    }

    pub fn overlaps(&self, t0: f64, t1: f64) -> bool {
        self.start < t1 && self.end > t0
    }
}

/// Events intersecting `[t0, t1)`, ordered by `(start, id)`.
pub fn select_visible(events: &[CalendarEvent], t0: f64, t1: f64) -> Vec<CalendarEvent> {
    let mut out: Vec<CalendarEvent> = events
        .iter()
        .filter(|e| e.overlaps(t0, t1))
        .cloned()
        .collect();
    sort_by_start(&mut out);
    out
}

fn sort_by_start(events: &mut [CalendarEvent]) {
    events.sort_by(|a, b| a.start.total_cmp(&b.start).then(a.id.cmp(&b.id)));
}

/// Replaces the interval of event `id`. When the new interval is shorter
/// than `min_duration`, the edge that moved is pinned at the limit.
pub fn update_event(
    events: &mut [CalendarEvent],
    id: u64,
    new_start: f64,
    new_end: f64,
    min_duration: f64,
) -> Result<CalendarEvent, ModelError> {
    let ev = events
        .iter_mut()
        .find(|e| e.id == id)
        .ok_or(ModelError::UnknownId(id))?;
    let (mut start, mut end) = (new_start, new_end);
    if end - start < min_duration {
        let start_only = start != ev.start && end == ev.end;
        if start_only {
            start = end - min_duration;
        } else {
            end = start + min_duration;
        }
    }
    ev.start = start;
    ev.end = end;
    Ok(ev.clone())
}

/// Column sharing for events of one day: each connected component of the
/// overlap graph splits the column evenly, members ordered by `(start, id)`.
/// Returns `id → (index, count)`.
pub fn overlap_layout(events: &[CalendarEvent]) -> BTreeMap<u64, (usize, usize)> {
    let mut sorted: Vec<&CalendarEvent> = events.iter().collect();
    sorted.sort_by(|a, b| a.start.total_cmp(&b.start).then(a.id.cmp(&b.id)));

    let mut out = BTreeMap::new();
    let mut component: Vec<u64> = Vec::new();
    let mut reach = f64::NEG_INFINITY;
    let mut flush = |component: &mut Vec<u64>| {
        let k = component.len();
        for (i, id) in component.drain(..).enumerate() {
            out.insert(id, (i, k));
        }
    };
    for ev in sorted {
        // half-open: an event starting exactly at `reach` does not overlap
        if !component.is_empty() && ev.start >= reach {
            flush(&mut component);
            reach = f64::NEG_INFINITY;
        }
        component.push(ev.id);
        reach = reach.max(ev.end);
    }
    flush(&mut component);
    out
}

/// Values of a [`ScrollbarModel`] live on this dyadic grid so that shifting
/// both bounds by the same amount preserves their difference bit-for-bit.
pub const SCROLL_QUANTUM: f64 = 1.0 / (1u64 << 40) as f64;

pub fn quantize(v: f64) -> f64 {
    (v / SCROLL_QUANTUM).round() * SCROLL_QUANTUM
}

/// The visible range of a scrolled document, as fractions `0 ≤ low ≤ high ≤ 1`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ScrollbarModel {
    pub low: f64,
    pub high: f64,
}

impl ScrollbarModel {
    pub fn new(low: f64, high: f64) -> Result<Self, ModelError> {
        let m = ScrollbarModel {
            low: quantize(low),
            high: quantize(high),
        };
        m.validate()?;
        Ok(m)
    }

    pub fn extent(&self) -> f64 {
        self.high - self.low
    }

    pub fn validate(&self) -> Result<(), ModelError> {
        if 0.0 <= self.low && self.low <= self.high && self.high <= 1.0 {
            Ok(())
        } else {
            Err(ModelError::Invalid(format!(
                "scrollbar range ({}, {}) violates 0 ≤ low ≤ high ≤ 1",
                self.low, self.high
            )))
        }
    }
}

/// Shifts both bounds by `dv`, clamped so the range stays inside `[0, 1]`
/// with its extent unchanged.
pub fn scrollbar_shift(m: ScrollbarModel, dv: f64) -> ScrollbarModel {
    if !dv.is_finite() {
        return m;
    }
    let dv = quantize(dv).clamp(-m.low, 1.0 - m.high);
    ScrollbarModel {
        low: m.low + dv,
        high: m.high + dv,
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DragObject {
    pub id: u64,
    /// Center.
    pub x: f64,
    pub y: f64,
    pub w: f64,
    pub h: f64,
}

impl DragObject {
    pub fn new(id: u64, x: f64, y: f64, w: f64, h: f64) -> Self {
        DragObject { id, x, y, w, h }
    }

    pub fn rect(&self) -> crate::geometry::Rect {
        crate::geometry::Rect::new(self.x - self.w / 2.0, self.y - self.h / 2.0, self.w, self.h)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Axis {
    Horizontal,
    Vertical,
}

/// An axis-aligned magnetic guide line at `pos` (y for horizontal guides,
/// x for vertical ones).
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Guide {
    pub id: u64,
    pub axis: Axis,
    pub pos: f64,
}

impl Guide {
    pub fn horizontal(id: u64, y: f64) -> Self {
        Guide {
            id,
            axis: Axis::Horizontal,
            pos: y,
        }
    }

    pub fn vertical(id: u64, x: f64) -> Self {
        Guide {
            id,
            axis: Axis::Vertical,
            pos: x,
        }
    }
}

fn default_min_duration() -> f64 {
    DEFAULT_MIN_DURATION
}

fn is_default_min_duration(v: &f64) -> bool {
    *v == DEFAULT_MIN_DURATION
}

/// Everything an interaction can mutate. Serialized as the model file.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct Model {
    #[serde(default)]
    pub events: Vec<CalendarEvent>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub scrollbar: Option<ScrollbarModel>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub objects: Vec<DragObject>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub guides: Vec<Guide>,
    #[serde(
        default = "default_min_duration",
        skip_serializing_if = "is_default_min_duration"
    )]
    pub min_duration: f64,
}

impl Model {
    pub fn new() -> Self {
        Model {
            min_duration: DEFAULT_MIN_DURATION,
            ..Default::default()
        }
    }

    pub fn with_events(events: Vec<CalendarEvent>) -> Self {
        Model {
            events,
            ..Model::new()
        }
    }

    pub fn event(&self, id: u64) -> Option<&CalendarEvent> {
        self.events.iter().find(|e| e.id == id)
    }

    pub fn object(&self, id: u64) -> Option<&DragObject> {
        self.objects.iter().find(|o| o.id == id)
    }

    pub fn object_mut(&mut self, id: u64) -> Result<&mut DragObject, ModelError> {
        self.objects
            .iter_mut()
            .find(|o| o.id == id)
            .ok_or(ModelError::UnknownId(id))
    }

    pub fn guide(&self, id: u64) -> Option<&Guide> {
        self.guides.iter().find(|g| g.id == id)
    }

    pub fn update_event(
        &mut self,
        id: u64,
        new_start: f64,
        new_end: f64,
    ) -> Result<CalendarEvent, ModelError> {
        update_event(&mut self.events, id, new_start, new_end, self.min_duration)
    }

    pub fn select_visible(&self, t0: f64, t1: f64) -> Vec<CalendarEvent> {
        select_visible(&self.events, t0, t1)
    }

    /// Checks every type invariant.
    pub fn validate(&self) -> Result<(), ModelError> {
        let invalid = |m: String| Err(ModelError::Invalid(m));
        if !(self.min_duration >= 0.0) {
            return invalid(format!("min_duration {}", self.min_duration));
        }
        let mut ids = HashSet::new();
        for e in &self.events {
            if !ids.insert(e.id) {
                return invalid(format!("duplicate event id {}", e.id));
            }
            if !(e.start.is_finite() && e.end.is_finite()) {
                return invalid(format!("event {} has non-finite bounds", e.id));
            }
            // tolerance for accumulated float error in snapped-off drags
            if e.end - e.start < self.min_duration - 1e-9 {
                return invalid(format!(
                    "event {} lasts {} min, below the {} min minimum",
                    e.id,
                    e.end - e.start,
                    self.min_duration
                ));
            }
        }
        if let Some(s) = &self.scrollbar {
            s.validate()?;
        }
        let mut ids = HashSet::new();
        for o in &self.objects {
            if !ids.insert(o.id) {
                return invalid(format!("duplicate object id {}", o.id));
            }
            if !(o.w > 0.0 && o.h > 0.0) {
                return invalid(format!("object {} has empty size", o.id));
            }
        }
        let mut ids = HashSet::new();
        for g in &self.guides {
            if !ids.insert(g.id) {
                return invalid(format!("duplicate guide id {}", g.id));
            }
        }
        Ok(())
    }

    pub fn from_json(s: &str) -> Result<Model, ModelError> {
        let mut m: Model = serde_json::from_str(s)?;
        if let Some(sb) = m.scrollbar {
            m.scrollbar = Some(ScrollbarModel::new(sb.low, sb.high)?);
        }
        m.validate()?;
        Ok(m)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("model serializes")
    }

    pub fn load(path: &Path) -> Result<Model, ModelError> {
        Model::from_json(&fs::read_to_string(path)?)
    }

    pub fn save(&self, path: &Path) -> Result<(), ModelError> {
        fs::write(path, serde_json::to_string_pretty(self)? + "\n")?;
        Ok(())
    }

    /// Numeric comparison of two snapshots with an absolute tolerance on
    /// every number.
    pub fn approx_eq(&self, other: &Model, tol: f64) -> bool {
        json_approx_eq(
            &serde_json::to_value(self).expect("model serializes"),
            &serde_json::to_value(other).expect("model serializes"),
            tol,
        )
    }
}

pub fn json_approx_eq(a: &serde_json::Value, b: &serde_json::Value, tol: f64) -> bool {
    use serde_json::Value;
    match (a, b) {
        (Value::Number(x), Value::Number(y)) => match (x.as_f64(), y.as_f64()) {
            (Some(x), Some(y)) => (x - y).abs() <= tol,
            _ => x == y,
        },
        (Value::Array(x), Value::Array(y)) => {
            x.len() == y.len() && x.iter().zip(y).all(|(x, y)| json_approx_eq(x, y, tol))
        }
        (Value::Object(x), Value::Object(y)) => {
            x.len() == y.len()
                && x
                    .iter()
                    .all(|(k, v)| y.get(k).is_some_and(|w| json_approx_eq(v, w, tol)))
        }
        _ => a == b,
    }
}
