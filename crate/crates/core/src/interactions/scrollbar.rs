//! Vertical scrollbar: the model is a `(low, high)` range, the thumb is its
//! affine image in the trough, and a thumb drag of Δ pixels maps back to a
//! shift of Δ / trough height.

use crate::geometry::{Point, Rect};
use crate::model::{scrollbar_shift, Model, ScrollbarModel};
use crate::picking::{number_sequentially, PickObject};
use crate::renderloop::DrawCmd;
use crate::statemachine::{ActionError, EventKind, Machine, Pattern, Transition};

use super::{Controller, InteractionKind, World};

pub const THUMB_TAG: &str = "thumb";
pub const ABOVE_TAG: &str = "trough-above";
pub const BELOW_TAG: &str = "trough-below";

/// Thumbs thinner than this are inflated in the picking view, px.
pub const MIN_PICK_HEIGHT: f64 = 4.0;

/// Fraction of the extent scrolled per wheel notch.
pub const WHEEL_STEP: f64 = 0.1;

pub fn thumb_rect(m: &ScrollbarModel, trough: &Rect) -> Rect {
    Rect::from_edges(
        trough.x,
        trough.y + m.low * trough.h,
        trough.right(),
        trough.y + m.high * trough.h,
    )
}

/// The thumb as picked: at least [`MIN_PICK_HEIGHT`] tall, kept inside the
/// trough.
fn thumb_pick_rect(thumb: Rect, trough: &Rect) -> Rect {
    if thumb.h >= MIN_PICK_HEIGHT {
        return thumb;
    }
    let h = MIN_PICK_HEIGHT.min(trough.h);
    let top = (thumb.center().y - h / 2.0).clamp(trough.y, trough.bottom() - h);
    Rect::new(thumb.x, top, thumb.w, h)
}

pub fn scrollbar_build_views(m: &ScrollbarModel, trough: &Rect) -> (Vec<DrawCmd>, Vec<PickObject>) {
    let thumb = thumb_rect(m, trough);
    let cmds = vec![
        DrawCmd::rect(*trough, "#e0e0e0", 0, "trough").stroke("#9e9e9e"),
        DrawCmd::rect(thumb, "#757575", 1, THUMB_TAG),
    ];

    let pick_thumb = thumb_pick_rect(thumb, trough);
    let mut picks = Vec::with_capacity(3);
    let above = Rect::from_edges(trough.x, trough.y, trough.right(), pick_thumb.y);
    let below = Rect::from_edges(trough.x, pick_thumb.bottom(), trough.right(), trough.bottom());
    if !above.is_empty() {
        picks.push(PickObject::new(0, above, 0, ABOVE_TAG));
    }
    if !below.is_empty() {
        picks.push(PickObject::new(0, below, 0, BELOW_TAG));
    }
    picks.push(PickObject::new(0, pick_thumb, 1, THUMB_TAG));
    number_sequentially(&mut picks);
    (cmds, picks)
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ThumbGrab {
    pub press_y: f64,
    pub start: ScrollbarModel,
}

pub struct ScrollbarWorld {
    pub model: Model,
    pub trough: Rect,
    pub window: (f64, f64),
    pub grab: Option<ThumbGrab>,
}

impl ScrollbarWorld {
    pub fn new(model: Model, trough: Rect) -> Self {
        let mut model = model;
        if model.scrollbar.is_none() {
            model.scrollbar = Some(ScrollbarModel::new(0.0, 1.0).expect("valid range"));
        }
        ScrollbarWorld {
            model,
            window: (trough.right() + 20.0, trough.bottom() + 20.0),
            trough,
            grab: None,
        }
    }

    pub fn range(&self) -> ScrollbarModel {
        self.model.scrollbar.expect("scrollbar world always has a range")
    }

    fn set_range(&mut self, m: ScrollbarModel) -> Result<(), ActionError> {
        m.validate()?;
        self.model.scrollbar = Some(m);
        Ok(())
    }
}

fn page(w: &mut ScrollbarWorld, direction: f64) -> Result<(), ActionError> {
    let m = w.range();
    w.set_range(scrollbar_shift(m, direction * m.extent()))
}

/// idle ⇄ dragging; presses on the trough page by one extent.
pub fn scrollbar_machine() -> Machine<ScrollbarWorld> {
    Machine::builder()
        .state(
            "idle",
            vec![
                Transition::new(
                    "grab",
                    Pattern::tagged(EventKind::Press, THUMB_TAG).button(1),
                    "dragging",
                )
                .action(|w: &mut ScrollbarWorld, e| {
                    w.grab = Some(ThumbGrab {
                        press_y: e.p.y,
                        start: w.range(),
                    });
                    Ok(())
                }),
                Transition::new("pageUp", Pattern::tagged(EventKind::Press, ABOVE_TAG), "idle")
                    .action(|w: &mut ScrollbarWorld, _| page(w, -1.0)),
                Transition::new("pageDown", Pattern::tagged(EventKind::Press, BELOW_TAG), "idle")
                    .action(|w: &mut ScrollbarWorld, _| page(w, 1.0)),
                Transition::new("wheel", Pattern::on(EventKind::Wheel), "idle").action(
                    |w: &mut ScrollbarWorld, e| {
                        let m = w.range();
                        w.set_range(scrollbar_shift(m, e.delta * WHEEL_STEP * m.extent()))
                    },
                ),
            ],
        )
        .state(
            "dragging",
            vec![
                Transition::new("drag", Pattern::on(EventKind::Move), "dragging").action(
                    |w: &mut ScrollbarWorld, e| {
                        let g = w
                            .grab
                            .ok_or_else(|| ActionError::Other("no thumb grab".into()))?;
                        let dv = (e.p.y - g.press_y) / w.trough.h;
                        w.set_range(scrollbar_shift(g.start, dv))
                    },
                ),
                Transition::new("drop", Pattern::on(EventKind::Release), "idle").action(
                    |w: &mut ScrollbarWorld, _| {
                        w.grab = None;
                        Ok(())
                    },
                ),
            ],
        )
        .build()
        .expect("scrollbar machine is well formed")
}

impl World for ScrollbarWorld {
    fn kind(&self) -> InteractionKind {
        InteractionKind::Scrollbar
    }

    fn model(&self) -> &Model {
        &self.model
    }

    fn replace_model(&mut self, model: Model) {
        let trough = self.trough;
        let window = self.window;
        *self = ScrollbarWorld::new(model, trough);
        self.window = window;
    }

    fn display(&self) -> Vec<DrawCmd> {
        scrollbar_build_views(&self.range(), &self.trough).0
    }

    fn picking(&self) -> Vec<PickObject> {
        scrollbar_build_views(&self.range(), &self.trough).1
    }

    fn viewport(&self) -> (u32, u32) {
        (self.window.0.ceil() as u32, self.window.1.ceil() as u32)
    }

    fn resize(&mut self, w: f64, h: f64) {
        self.window = (w.max(1.0), h.max(1.0));
    }

    fn wheel(&mut self, _p: Point, _delta: f64) {}
}

pub fn default_trough() -> Rect {
    Rect::new(0.0, 0.0, 20.0, 300.0)
}

pub fn demo_model() -> Model {
    Model {
        scrollbar: Some(ScrollbarModel::new(0.2, 0.5).expect("valid range")),
        ..Model::new()
    }
}

pub fn controller(model: Model) -> Controller<ScrollbarWorld> {
    Controller::new(scrollbar_machine(), ScrollbarWorld::new(model, default_trough()))
}
