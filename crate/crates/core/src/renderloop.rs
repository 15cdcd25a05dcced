//! Data-flow frame production.
//!
//! A frame is a pure function of the current scene: the display list is
//! regenerated from the model and the picking buffer is rasterized from
//! the live picking objects. Nothing is retained between frames except
//! the frame counter.

use serde::{Deserialize, Serialize};

use crate::geometry::{Affine2, Shape};
use crate::picking::{rasterize, PickBuffer, PickError, PickObject};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "shape", rename_all = "snake_case")]
pub enum Geom {
    Rect { x: f64, y: f64, w: f64, h: f64 },
    Circle { cx: f64, cy: f64, r: f64 },
    Line { x1: f64, y1: f64, x2: f64, y2: f64 },
    Text { x: f64, y: f64, text: String },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Layer {
    Display,
    PickingDebug,
}

/// One display-list entry, in pixels.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DrawCmd {
    #[serde(flatten)]
    pub geom: Geom,
    pub fill: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub stroke: Option<String>,
    #[serde(default, skip_serializing_if = "std::ops::Not::not")]
    pub dashed: bool,
    pub z: i32,
    pub tag: String,
    pub layer: Layer,
    /// Affine `[a, b, c, d, e, f]` applied to the geometry, canvas style.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub transform: Option<[f64; 6]>,
}

impl DrawCmd {
    pub fn new(geom: Geom, fill: &str, z: i32, tag: impl Into<String>) -> Self {
        DrawCmd {
            geom,
            fill: fill.to_string(),
            stroke: None,
            dashed: false,
            z,
            tag: tag.into(),
            layer: Layer::Display,
            transform: None,
        }
    }

    pub fn rect(r: crate::geometry::Rect, fill: &str, z: i32, tag: impl Into<String>) -> Self {
        DrawCmd::new(
            Geom::Rect {
                x: r.x,
                y: r.y,
                w: r.w,
                h: r.h,
            },
            fill,
            z,
            tag,
        )
    }

    pub fn stroke(mut self, color: &str) -> Self {
        self.stroke = Some(color.to_string());
        self
    }

    pub fn dashed(mut self) -> Self {
        self.dashed = true;
        self
    }

    /// Attaches `m` unless it is the identity.
    pub fn transformed(mut self, m: &Affine2) -> Self {
        if !m.is_identity() {
            self.transform = Some(m.to_array());
        }
        self
    }
}

/// Sorts by z, keeping emission order within a z.
pub fn order_display(cmds: &mut [DrawCmd]) {
    cmds.sort_by_key(|c| c.z);
}

pub fn display_json(cmds: &[DrawCmd]) -> String {
    serde_json::to_string(cmds).expect("draw commands serialize")
}

/// Anything that can be drawn: it knows its display list and the size of
/// the plane its picking view is rasterized in.
pub trait Scene {
    fn display_list(&self) -> Vec<DrawCmd>;
    fn viewport(&self) -> (u32, u32);
    /// Affine from the picking plane to the screen (identity for most scenes).
    fn pick_to_screen(&self) -> Affine2 {
        Affine2::IDENTITY
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct FrameOutput {
    pub seq: u64,
    pub display: Vec<DrawCmd>,
    pub pick_buffer: PickBuffer,
}

impl FrameOutput {
    pub fn display_json(&self) -> String {
        display_json(&self.display)
    }
}

/// Builds one frame from scratch.
pub fn render_frame(
    seq: u64,
    scene: &dyn Scene,
    picking: &[PickObject],
) -> Result<FrameOutput, PickError> {
    let mut display = scene.display_list();
    order_display(&mut display);
    let (w, h) = scene.viewport();
    let pick_buffer = rasterize(picking, w, h)?;
    Ok(FrameOutput {
        seq,
        display,
        pick_buffer,
    })
}

/// Owns the only state that survives between frames: the frame counter.
#[derive(Clone, Debug, Default)]
pub struct Renderer {
    seq: u64,
}

impl Renderer {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn last_seq(&self) -> u64 {
        self.seq
    }

    pub fn render(
        &mut self,
        scene: &dyn Scene,
        picking: &[PickObject],
    ) -> Result<FrameOutput, PickError> {
        let frame = render_frame(self.seq + 1, scene, picking)?;
        self.seq += 1;
        Ok(frame)
    }
}

/// A saturated color per id, spread around the hue circle, for the
/// visible picking overlay.
pub fn debug_color(id: u32) -> String {
    let hue = (id as f64 * 137.507_764) % 360.0;
    let (r, g, b) = hsv_to_rgb(hue, 0.75, 0.95);
    format!("#{r:02x}{g:02x}{b:02x}")
}

fn hsv_to_rgb(h: f64, s: f64, v: f64) -> (u8, u8, u8) {
    let c = v * s;
    let x = c * (1.0 - ((h / 60.0) % 2.0 - 1.0).abs());
    let m = v - c;
    let (r, g, b) = match (h / 60.0) as u32 {
        0 => (c, x, 0.0),
        1 => (x, c, 0.0),
        2 => (0.0, c, x),
        3 => (0.0, x, c),
        4 => (x, 0.0, c),
        _ => (c, 0.0, x),
    };
    let to = |v: f64| ((v + m) * 255.0).round() as u8;
    (to(r), to(g), to(b))
}

/// The picking view as a colorful draw list, for the debug overlay.
pub fn picking_debug_list(picking: &[PickObject], to_screen: &Affine2) -> Vec<DrawCmd> {
    let mut cmds: Vec<DrawCmd> = picking
        .iter()
        .map(|o| {
            let geom = match o.shape {
                Shape::Rect(r) => Geom::Rect {
                    x: r.x,
                    y: r.y,
                    w: r.w,
                    h: r.h,
                },
                Shape::Circle(c) => Geom::Circle {
                    cx: c.cx,
                    cy: c.cy,
                    r: c.r,
                },
            };
            let mut cmd = DrawCmd::new(geom, &debug_color(o.id), o.z, o.tag.clone())
                .transformed(to_screen);
            cmd.layer = Layer::PickingDebug;
            cmd
        })
        .collect();
    order_display(&mut cmds);
    cmds
}
