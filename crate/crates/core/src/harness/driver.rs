//! Turns raw inputs into machine events: picks the topmost object under the
//! pointer, synthesizes Enter/Leave, dispatches, then re-renders.
//!
//! Re-rendering can move objects under a still pointer (the hysteresis
//! circle appears on press, guide bands appear on drag start), so after
//! every dispatch the pointer is picked again against the new frame and the
//! resulting crossings are dispatched too, until the hovered object settles.

use serde::Serialize;

use crate::geometry::Point;
use crate::interactions::Interaction;
use crate::picking::{synthesize_crossings, Crossing, PickError, PickObject, PickRegistry, BACKGROUND};
use crate::renderloop::{picking_debug_list, DrawCmd, FrameOutput, Layer, Renderer};
use crate::statemachine::{ActionError, Event, EventKind, Fired};

use super::trace::Input;

/// Re-pick rounds after one input before the driver gives up on settling.
pub const MAX_SETTLE_ROUNDS: usize = 8;

/// What one input did.
#[derive(Clone, Debug, Default, Serialize)]
pub struct StepOutcome {
    pub fired: Vec<Fired>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
}

pub struct Driver {
    interaction: Box<dyn Interaction>,
    registry: PickRegistry,
    renderer: Renderer,
    picking: Vec<PickObject>,
    frame: FrameOutput,
    hover: u32,
    pointer: Option<Point>,
    button: u8,
}

impl Driver {
    pub fn new(interaction: Box<dyn Interaction>) -> Result<Self, PickError> {
        let mut registry = PickRegistry::new();
        let mut renderer = Renderer::new();
        let mut picking = interaction.picking();
        registry.stabilize(&mut picking)?;
        let frame = renderer.render(interaction.as_ref(), &picking)?;
        Ok(Driver {
            interaction,
            registry,
            renderer,
            picking,
            frame,
            hover: BACKGROUND,
            pointer: None,
            button: 1,
        })
    }

    pub fn interaction(&self) -> &dyn Interaction {
        self.interaction.as_ref()
    }

    /// Direct access; call [`Driver::rerender`] after changing anything.
    pub fn interaction_mut(&mut self) -> &mut dyn Interaction {
        self.interaction.as_mut()
    }

    pub fn state(&self) -> &str {
        self.interaction.state()
    }

    pub fn frame(&self) -> &FrameOutput {
        &self.frame
    }

    /// Picking objects of the current frame, with stable ids.
    pub fn picking(&self) -> &[PickObject] {
        &self.picking
    }

    pub fn hovered(&self) -> u32 {
        self.hover
    }

    pub fn tag_of(&self, id: u32) -> &str {
        self.registry.tag(id).unwrap_or("")
    }

    /// Id of the topmost picking object under a screen point.
    pub fn pick_at(&self, p: Point) -> u32 {
        let q = self.interaction.screen_to_pick().apply(p);
        self.frame.pick_buffer.pick(q)
    }

    /// Tag of the topmost picking object under a screen point, `""` for
    /// background.
    pub fn pick_tag_at(&self, p: Point) -> &str {
        self.tag_of(self.pick_at(p))
    }

    /// The picking view drawn in color, in screen space.
    pub fn picking_debug(&self) -> Vec<DrawCmd> {
        let to_screen = self.interaction.pick_to_screen();
        let mut cmds = picking_debug_list(&self.picking, &to_screen);
        for c in &mut cmds {
            c.layer = Layer::PickingDebug;
        }
        cmds
    }

    /// Replaces the model, resets the machine and re-renders.
    pub fn load_model(&mut self, model: crate::model::Model) -> Result<(), PickError> {
        self.interaction.load_model(model);
        self.rerender()
    }

    /// Rebuilds the frame without dispatching anything.
    pub fn rerender(&mut self) -> Result<(), PickError> {
        let mut picking = self.interaction.picking();
        self.registry.stabilize(&mut picking)?;
        self.frame = self.renderer.render(self.interaction.as_ref(), &picking)?;
        self.picking = picking;
        Ok(())
    }

    pub fn feed(&mut self, input: &Input) -> Result<StepOutcome, PickError> {
        let mut out = StepOutcome::default();
        match *input {
            Input::Press { x, y, button }
            | Input::Move { x, y, button }
            | Input::Release { x, y, button } => {
                let p = Point::new(x, y);
                let kind = match input {
                    Input::Press { .. } => EventKind::Press,
                    Input::Move { .. } => EventKind::Move,
                    _ => EventKind::Release,
                };
                self.pointer = Some(p);
                self.button = button;
                let now = self.pick_at(p);
                self.cross(now, &mut out);
                let e = Event::new(kind, p, self.tag_of(self.hover)).with_button(button);
                self.send(&e, &mut out);
            }
            Input::Wheel { x, y, delta } => {
                let p = Point::new(x, y);
                self.pointer = Some(p);
                let now = self.pick_at(p);
                self.cross(now, &mut out);
                self.interaction.wheel(p, delta);
                let mut e = Event::new(EventKind::Wheel, p, self.tag_of(self.hover));
                e.delta = delta;
                self.send(&e, &mut out);
            }
            Input::Resize { w, h } => {
                if w.is_finite() && h.is_finite() {
                    self.interaction.resize(w, h);
                    let p = self.pointer.unwrap_or(Point::ORIGIN);
                    self.send(&Event::new(EventKind::Resize, p, ""), &mut out);
                } else {
                    out.error = Some("resize needs finite sizes".into());
                }
            }
            Input::SetView(ref update) => {
                if let Err(e) = self.interaction.set_view(update) {
                    out.error = Some(e.to_string());
                }
            }
        }
        self.settle(&mut out)?;
        Ok(out)
    }

    fn send(&mut self, e: &Event, out: &mut StepOutcome) {
        if out.error.is_some() {
            return;
        }
        match self.interaction.dispatch(e) {
            Ok(Some(f)) => out.fired.push(f),
            Ok(None) => {}
            Err(err) => out.error = Some(describe(&err)),
        }
    }

    /// Dispatches Leave/Enter for a hover change at the current pointer.
    fn cross(&mut self, now: u32, out: &mut StepOutcome) -> bool {
        let crossings = synthesize_crossings(self.hover, now);
        if crossings.is_empty() {
            return false;
        }
        let p = self.pointer.unwrap_or(Point::ORIGIN);
        for c in crossings {
            let e = match c {
                Crossing::Leave(id) => Event::leave(p, self.tag_of(id)),
                Crossing::Enter(id) => Event::enter(p, self.tag_of(id)),
            }
            .with_button(self.button);
            self.send(&e, out);
        }
        self.hover = now;
        true
    }

    fn settle(&mut self, out: &mut StepOutcome) -> Result<(), PickError> {
        for _ in 0..MAX_SETTLE_ROUNDS {
            self.rerender()?;
            let Some(p) = self.pointer else {
                return Ok(());
            };
            let now = self.pick_at(p);
            if !self.cross(now, out) {
                return Ok(());
            }
        }
        self.rerender()
    }
}

fn describe(err: &ActionError) -> String {
    err.to_string()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::interactions::{create, InteractionConfig, InteractionKind};

    fn driver(kind: InteractionKind) -> Driver {
        Driver::new(create(kind, None, InteractionConfig::default())).unwrap()
    }

    fn press(x: f64, y: f64) -> Input {
        Input::press(Point::new(x, y))
    }

    fn mv(x: f64, y: f64) -> Input {
        Input::moved(Point::new(x, y))
    }

    #[test]
    fn press_shows_hysteresis_and_enters_it() {
        let mut d = driver(InteractionKind::Dnd);
        let obj = d.interaction().model().objects[0].clone();
        let out = d.feed(&press(obj.x, obj.y)).unwrap();
        assert_eq!(d.state(), "waitHyst");
        assert_eq!(d.tag_of(d.hovered()), "hyst");
        assert_eq!(out.fired[0].transition, "press");
        // a small move stays inside the circle
        d.feed(&mv(obj.x + 3.0, obj.y)).unwrap();
        assert_eq!(d.state(), "waitHyst");
        d.feed(&mv(obj.x + 6.0, obj.y)).unwrap();
        assert_eq!(d.state(), "dragging");
        let moved = d.interaction().model().object(obj.id).unwrap();
        assert_eq!((moved.x, moved.y), (obj.x + 6.0, obj.y));
    }

    #[test]
    fn frame_seq_increases() {
        let mut d = driver(InteractionKind::Scrollbar);
        let s0 = d.frame().seq;
        d.feed(&mv(5.0, 5.0)).unwrap();
        assert!(d.frame().seq > s0);
    }

    #[test]
    fn scrollbar_drag_through_driver() {
        let mut d = driver(InteractionKind::Scrollbar);
        assert_eq!(d.pick_tag_at(Point::new(10.0, 100.0)), "thumb");
        d.feed(&press(10.0, 100.0)).unwrap();
        d.feed(&mv(10.0, 130.0)).unwrap();
        assert_eq!(d.state(), "dragging");
        let sb = d.interaction().model().scrollbar.unwrap();
        assert!((sb.low - 0.3).abs() < 1e-9);
    }

    #[test]
    fn resize_and_bad_view_update() {
        let mut d = driver(InteractionKind::Calendar);
        d.feed(&Input::Resize { w: 1400.0, h: 960.0 }).unwrap();
        assert_eq!(d.frame().pick_buffer.width(), 1400);
        let bad = crate::interactions::ViewUpdate {
            zoom: Some(0.0),
            ..Default::default()
        };
        let out = d.feed(&Input::SetView(bad)).unwrap();
        assert!(out.error.is_some());
    }

    #[test]
    fn debug_list_is_on_debug_layer() {
        let d = driver(InteractionKind::Guides);
        let dbg = d.picking_debug();
        assert_eq!(dbg.len(), d.picking().len());
        assert!(dbg.iter().all(|c| c.layer == Layer::PickingDebug));
    }
}
