//! The calendar's model→screen pipeline and its inverse.
//!
//! A time value (minutes since a Monday 00:00 epoch) is first folded into
//! the week grid by [`wrap`], scaled into a cell of the grid, then carried
//! through an ordered list of plane bijections ([`PlaneStage`]). The first
//! plane stage is always the user pan/zoom; any further stages (a rotation,
//! an extra pan/zoom) are appended by the application. [`invtransf`] runs
//! the same chain backwards, each stage replaced by its inverse.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::geometry::{Affine2, GeometryError, Point};

pub const DAY: f64 = 1440.0;
pub const WEEK: f64 = 7.0 * DAY;

/// Largest fraction of a day produced by clamping in [`invtransf`].
pub const FRAC_MAX: f64 = 1.0 - 1e-12;

/// Slack, in columns, when deciding which day column a point falls in.
pub const COLUMN_EPS: f64 = 1e-9;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum TransformError {
    #[error("singular transform: {0}")]
    SingularTransform(String),
    #[error("time {t} is in week {week}, view shows week {current}")]
    WrongWeek { t: f64, week: i64, current: i64 },
}

impl From<GeometryError> for TransformError {
    fn from(e: GeometryError) -> Self {
        TransformError::SingularTransform(e.to_string())
    }
}

/// A time folded onto the week grid.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct WrapResult {
    pub week: i64,
    pub day: u8,
    pub frac: f64,
}

pub fn wrap(t: f64) -> WrapResult {
    let mut week = (t / WEEK).floor();
    let mut rem = t - week * WEEK;
    // floor/sub can land one ulp outside [0, WEEK) for values near a boundary
    if rem < 0.0 {
        week -= 1.0;
        rem += WEEK;
    }
    if rem >= WEEK {
        week += 1.0;
        rem -= WEEK;
    }
    let day = ((rem / DAY).floor() as i64).clamp(0, 6);
    let mut frac = (rem - day as f64 * DAY) / DAY;
    if frac >= 1.0 {
        frac = FRAC_MAX;
    } else if frac < 0.0 {
        frac = 0.0;
    }
    WrapResult {
        week: week as i64,
        day: day as u8,
        frac,
    }
}

pub fn invwrap(w: WrapResult) -> f64 {
    w.week as f64 * WEEK + w.day as f64 * DAY + w.frac * DAY
}

/// One bijection of the plane.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum PlaneStage {
    Scale { sx: f64, sy: f64 },
    /// `p ↦ zoom·p + pan`
    PanZoom { zoom: f64, pan_x: f64, pan_y: f64 },
    /// Rotation by `theta` radians about `(cx, cy)`.
    Rotate { theta: f64, cx: f64, cy: f64 },
}

impl PlaneStage {
    pub fn rotate_deg(deg: f64, cx: f64, cy: f64) -> Self {
        PlaneStage::Rotate {
            theta: deg.to_radians(),
            cx,
            cy,
        }
    }

    fn check(&self) -> Result<(), TransformError> {
        let ok = match *self {
            PlaneStage::Scale { sx, sy } => {
                sx.is_finite() && sy.is_finite() && sx.abs() > 1e-12 && sy.abs() > 1e-12
            }
            PlaneStage::PanZoom { zoom, pan_x, pan_y } => {
                zoom.is_finite() && zoom > 0.0 && pan_x.is_finite() && pan_y.is_finite()
            }
            PlaneStage::Rotate { theta, cx, cy } => {
                theta.is_finite() && cx.is_finite() && cy.is_finite()
            }
        };
        if ok {
            Ok(())
        } else {
            Err(TransformError::SingularTransform(format!("{self:?}")))
        }
    }

    pub fn forward(&self, p: Point) -> Point {
        match *self {
            PlaneStage::Scale { sx, sy } => Point::new(p.x * sx, p.y * sy),
            PlaneStage::PanZoom { zoom, pan_x, pan_y } => {
                Point::new(zoom * p.x + pan_x, zoom * p.y + pan_y)
            }
            PlaneStage::Rotate { theta, cx, cy } => {
                let (s, c) = theta.sin_cos();
                let (dx, dy) = (p.x - cx, p.y - cy);
                Point::new(cx + c * dx - s * dy, cy + s * dx + c * dy)
            }
        }
    }

    /// The stage undoing this one.
    pub fn inverse(&self) -> Result<PlaneStage, TransformError> {
        self.check()?;
        Ok(match *self {
            PlaneStage::Scale { sx, sy } => PlaneStage::Scale {
                sx: 1.0 / sx,
                sy: 1.0 / sy,
            },
            PlaneStage::PanZoom { zoom, pan_x, pan_y } => PlaneStage::PanZoom {
                zoom: 1.0 / zoom,
                pan_x: -pan_x / zoom,
                pan_y: -pan_y / zoom,
            },
            PlaneStage::Rotate { theta, cx, cy } => PlaneStage::Rotate {
                theta: -theta,
                cx,
                cy,
            },
        })
    }

    pub fn to_affine(&self) -> Affine2 {
        match *self {
            PlaneStage::Scale { sx, sy } => Affine2::scale(sx, sy),
            PlaneStage::PanZoom { zoom, pan_x, pan_y } => {
                Affine2::new(zoom, 0.0, 0.0, zoom, pan_x, pan_y)
            }
            PlaneStage::Rotate { theta, cx, cy } => {
                Affine2::rotate_about(theta, Point::new(cx, cy))
            }
        }
    }
}

/// An ordered list of plane stages, applied first to last.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Pipeline {
    pub stages: Vec<PlaneStage>,
}

impl Pipeline {
    pub fn new(stages: Vec<PlaneStage>) -> Self {
        Pipeline { stages }
    }

    pub fn is_empty(&self) -> bool {
        self.stages.is_empty()
    }

    pub fn push(&mut self, stage: PlaneStage) {
        self.stages.push(stage);
    }

    pub fn forward(&self, p: Point) -> Point {
        self.stages.iter().fold(p, |q, s| s.forward(q))
    }

    /// Reversed list of per-stage inverses.
    pub fn inverse(&self) -> Result<Pipeline, TransformError> {
        let stages = self
            .stages
            .iter()
            .rev()
            .map(PlaneStage::inverse)
            .collect::<Result<Vec<_>, _>>()?;
        Ok(Pipeline { stages })
    }

    /// The whole chain collapsed into one affine map.
    pub fn to_affine(&self) -> Affine2 {
        self.stages
            .iter()
            .fold(Affine2::IDENTITY, |m, s| m.then(&s.to_affine()))
    }
}

pub fn pipeline_forward(p: Point, stages: &[PlaneStage]) -> Point {
    stages.iter().fold(p, |q, s| s.forward(q))
}

pub fn pipeline_inverse(p: Point, stages: &[PlaneStage]) -> Result<Point, TransformError> {
    let mut q = p;
    for s in stages.iter().rev() {
        q = s.inverse()?.forward(q);
    }
    Ok(q)
}

/// Calendar view parameters.
///
/// `cell_width`/`cell_height` are overrides; when unset they follow the
/// window (a seventh of its width per day column, its full height per day).
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ViewParams {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub cell_width: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub cell_height: Option<f64>,
    pub zoom: f64,
    pub pan_x: f64,
    pub pan_y: f64,
    pub current_week: i64,
    pub window_w: f64,
    pub window_h: f64,
    /// Stages appended after pan/zoom.
    #[serde(default, skip_serializing_if = "Pipeline::is_empty")]
    pub post: Pipeline,
}

impl Default for ViewParams {
    fn default() -> Self {
        ViewParams::for_window(700.0, 960.0)
    }
}

impl ViewParams {
    pub fn for_window(w: f64, h: f64) -> Self {
        ViewParams {
            cell_width: None,
            cell_height: None,
            zoom: 1.0,
            pan_x: 0.0,
            pan_y: 0.0,
            current_week: 0,
            window_w: w,
            window_h: h,
            post: Pipeline::default(),
        }
    }

    pub fn with_cells(mut self, cell_w: f64, cell_h: f64) -> Self {
        self.cell_width = Some(cell_w);
        self.cell_height = Some(cell_h);
        self
    }

    pub fn with_pan_zoom(mut self, zoom: f64, pan_x: f64, pan_y: f64) -> Self {
        self.zoom = zoom;
        self.pan_x = pan_x;
        self.pan_y = pan_y;
        self
    }

    pub fn with_post(mut self, stage: PlaneStage) -> Self {
        self.post.push(stage);
        self
    }

    pub fn cell_w(&self) -> f64 {
        self.cell_width.unwrap_or(self.window_w / 7.0)
    }

    pub fn cell_h(&self) -> f64 {
        self.cell_height.unwrap_or(self.window_h)
    }

    pub fn week_start(&self) -> f64 {
        self.current_week as f64 * WEEK
    }

    pub fn week_end(&self) -> f64 {
        self.week_start() + WEEK
    }

    fn pan_zoom(&self) -> PlaneStage {
        PlaneStage::PanZoom {
            zoom: self.zoom,
            pan_x: self.pan_x,
            pan_y: self.pan_y,
        }
    }

    /// All plane stages: pan/zoom followed by the appended ones.
    pub fn plane_pipeline(&self) -> Pipeline {
        let mut stages = Vec::with_capacity(1 + self.post.stages.len());
        stages.push(self.pan_zoom());
        stages.extend(self.post.stages.iter().copied());
        Pipeline { stages }
    }

    fn validate(&self) -> Result<(), TransformError> {
        let (cw, ch) = (self.cell_w(), self.cell_h());
        if !(cw > 0.0 && ch > 0.0 && cw.is_finite() && ch.is_finite()) {
            return Err(TransformError::SingularTransform(format!(
                "cell size {cw}×{ch}"
            )));
        }
        self.pan_zoom().check()
    }

    /// Grid cell coordinates of a (day, fraction) pair, before any plane stage.
    pub fn cell_point(&self, day: f64, frac: f64) -> Point {
        Point::new(day * self.cell_w(), frac * self.cell_h())
    }

    /// Cell coordinates after pan/zoom but before the appended stages.
    /// Display rectangles and the picking view live in this plane.
    pub fn layout_point(&self, day: f64, frac: f64) -> Point {
        self.pan_zoom().forward(self.cell_point(day, frac))
    }

    /// Map from screen coordinates to the layout plane.
    pub fn screen_to_layout(&self) -> Result<Affine2, TransformError> {
        Ok(self.post.to_affine().invert()?)
    }

    /// Map from the layout plane to screen coordinates.
    pub fn layout_to_screen(&self) -> Affine2 {
        self.post.to_affine()
    }

    /// Screen point to layout plane, undoing the appended stages in reverse.
    pub fn unpost(&self, p: Point) -> Result<Point, TransformError> {
        pipeline_inverse(p, &self.post.stages)
    }
}

/// Screen position of time `t`; `t` must fall in the view's current week.
pub fn transf(t: f64, view: &ViewParams) -> Result<Point, TransformError> {
    view.validate()?;
    let w = wrap(t);
    if w.week != view.current_week {
        return Err(TransformError::WrongWeek {
            t,
            week: w.week,
            current: view.current_week,
        });
    }
    let cell = view.cell_point(w.day as f64, w.frac);
    Ok(view.plane_pipeline().forward(cell))
}

/// Time under screen point `p`. Positions outside the grid are clamped to
/// its edges.
pub fn invtransf(p: Point, view: &ViewParams) -> Result<f64, TransformError> {
    view.validate()?;
    let inverse = view.plane_pipeline().inverse()?;
    let q = inverse.forward(p);
    // column edges come back from rotations with round-off either side
    let day = (q.x / view.cell_w() + COLUMN_EPS).floor().clamp(0.0, 6.0);
    let frac = (q.y / view.cell_h()).clamp(0.0, FRAC_MAX);
    Ok(invwrap(WrapResult {
        week: view.current_week,
        day: day as u8,
        frac,
    }))
}
