//! Analytic reference answers, computed from distances only, to compare
//! the picking-based interactions against.

use serde::Serialize;

use crate::geometry::Point;
use crate::model::{Axis, DragObject, Guide};

use super::trace::{Input, TraceRecord};

/// Distance from a decision boundary under which pixel sampling may
/// disagree with exact geometry, px.
pub const BOUNDARY_TOL: f64 = 1.0;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "outcome", rename_all = "snake_case")]
pub enum HystOutcome {
    Select,
    /// Drag starting at trace record `from`.
    Drag { from: usize },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct HystVerdict {
    pub outcome: HystOutcome,
    /// Some move before the decision came within [`BOUNDARY_TOL`] of `r`.
    pub boundary: bool,
}

/// The classic hysteresis test: after the first press, the first move
/// farther than `r` from the press point starts a drag; a release before
/// that is a click. Returns `None` when the trace has no press.
pub fn oracle_hysteresis(trace: &[TraceRecord], r: f64) -> Option<HystVerdict> {
    let (start, press) = trace.iter().enumerate().find_map(|(i, rec)| match rec.input {
        Input::Press { x, y, .. } => Some((i, Point::new(x, y))),
        _ => None,
    })?;
    let mut boundary = false;
    for (i, rec) in trace.iter().enumerate().skip(start + 1) {
        match rec.input {
            Input::Move { x, y, .. } => {
                let d = press.distance(Point::new(x, y));
                boundary |= (d - r).abs() <= BOUNDARY_TOL;
                if d > r {
                    return Some(HystVerdict {
                        outcome: HystOutcome::Drag { from: i },
                        boundary,
                    });
                }
            }
            Input::Release { .. } => break,
            _ => {}
        }
    }
    Some(HystVerdict {
        outcome: HystOutcome::Select,
        boundary,
    })
}

/// An attraction band on one axis: cursor coordinates within
/// `attraction` of `center` are inside.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct OracleBand {
    pub tag: String,
    pub center: f64,
}

/// Cursor-space bands for dragging `obj` grabbed `rel` away from its
/// center: for each guide of `axis`, one band per feature (near edge,
/// center, far edge).
pub fn guide_bands(guides: &[Guide], axis: Axis, obj: &DragObject, rel: Point) -> Vec<OracleBand> {
    let (half, grab, names) = match axis {
        Axis::Horizontal => (obj.h / 2.0, rel.y, ["top", "center", "bottom"]),
        Axis::Vertical => (obj.w / 2.0, rel.x, ["left", "center", "right"]),
    };
    let prefix = match axis {
        Axis::Horizontal => "guide-h-",
        Axis::Vertical => "guide-v-",
    };
    let mut out = Vec::new();
    for g in guides.iter().filter(|g| g.axis == axis) {
        // the feature at offset -s from the center lies on the guide when
        // the center sits at pos + s
        for (name, s) in names.iter().zip([half, 0.0, -half]) {
            out.push(OracleBand {
                tag: format!("{prefix}{}-{name}", g.id),
                center: g.pos + s + grab,
            });
        }
    }
    out
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ZoneVerdict {
    /// The last listed band containing the cursor, if any.
    pub tag: Option<String>,
    /// The cursor is within [`BOUNDARY_TOL`] of some band edge.
    pub boundary: bool,
}

/// Which band (if any) a cursor coordinate falls in.
pub fn oracle_guide_zone(cursor: f64, bands: &[OracleBand], attraction: f64) -> ZoneVerdict {
    let mut tag = None;
    let mut boundary = false;
    for b in bands {
        let d = (cursor - b.center).abs();
        boundary |= (d - attraction).abs() <= BOUNDARY_TOL;
        if d <= attraction {
            tag = Some(b.tag.clone());
        }
    }
    ZoneVerdict { tag, boundary }
}

/// Expected guides machine state for a cursor while dragging.
pub fn oracle_guide_state(h: &ZoneVerdict, v: &ZoneVerdict) -> &'static str {
    match (&h.tag, &v.tag) {
        (Some(_), Some(_)) => "inStickGuide",
        (Some(_), None) => "dragInHGuide",
        (None, Some(_)) => "dragInVGuide",
        (None, None) => "dragging",
    }
}
