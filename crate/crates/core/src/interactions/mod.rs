//! The four reference interactions.
//!
//! Each one pairs a *world* (model, view parameters and the interaction's
//! transient picking state) with a state machine whose actions are the only
//! code that mutates the world. The world builds the display list and the
//! picking view from scratch on demand.

pub mod calendar;
pub mod dnd;
pub mod guides;
pub mod scrollbar;

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::geometry::{Affine2, Point};
use crate::model::Model;
use crate::picking::PickObject;
use crate::renderloop::{DrawCmd, Scene};
use crate::statemachine::{ActionError, Event, Fired, Machine};
use crate::transforms::PlaneStage;

pub use calendar::{CalendarWorld, Part};
pub use dnd::{DragContext, DragWorld};
pub use scrollbar::ScrollbarWorld;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct InteractionConfig {
    /// Radius of the invisible circle inserted on press, px.
    pub hysteresis_radius: f64,
    /// Half thickness of a guide's attraction band, px.
    pub attraction_distance: f64,
    /// Calendar snapping step in minutes; 0 disables snapping.
    pub snap_minutes: f64,
}

impl Default for InteractionConfig {
    fn default() -> Self {
        InteractionConfig {
            hysteresis_radius: 5.0,
            attraction_distance: 10.0,
            snap_minutes: 0.0,
        }
    }
}

impl InteractionConfig {
    pub fn with_snap(mut self, minutes: f64) -> Self {
        self.snap_minutes = minutes;
        self
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum InteractionKind {
    Scrollbar,
    Dnd,
    Guides,
    Calendar,
}

impl InteractionKind {
    pub const ALL: [InteractionKind; 4] = [
        InteractionKind::Scrollbar,
        InteractionKind::Dnd,
        InteractionKind::Guides,
        InteractionKind::Calendar,
    ];

    pub fn name(self) -> &'static str {
        match self {
            InteractionKind::Scrollbar => "scrollbar",
            InteractionKind::Dnd => "dnd",
            InteractionKind::Guides => "guides",
            InteractionKind::Calendar => "calendar",
        }
    }
}

impl fmt::Display for InteractionKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
#[error("unknown interaction `{0}` (expected scrollbar, dnd, guides or calendar)")]
pub struct UnknownInteraction(pub String);

impl FromStr for InteractionKind {
    type Err = UnknownInteraction;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        InteractionKind::ALL
            .into_iter()
            .find(|k| k.name() == s)
            .ok_or_else(|| UnknownInteraction(s.to_string()))
    }
}

/// Outputs that are not model changes.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum Emitted {
    Select { id: u64 },
}

/// Partial update of the calendar view; absent fields are kept.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct ViewUpdate {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub week: Option<i64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub zoom: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub pan_x: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub pan_y: Option<f64>,
    /// Replaces the stages appended after pan/zoom.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub stages: Option<Vec<PlaneStage>>,
}

/// Interaction-specific part of an interaction: everything except the
/// state machine.
pub trait World: Send + 'static {
    fn kind(&self) -> InteractionKind;
    fn model(&self) -> &Model;
    /// Installs a new model and drops any transient interaction state.
    fn replace_model(&mut self, model: Model);
    fn display(&self) -> Vec<DrawCmd>;
    fn picking(&self) -> Vec<PickObject>;
    fn viewport(&self) -> (u32, u32);
    fn resize(&mut self, w: f64, h: f64);
    /// Affine from screen coordinates to the plane the picking view is
    /// rasterized in.
    fn screen_to_pick(&self) -> Affine2 {
        Affine2::IDENTITY
    }
    fn pick_to_screen(&self) -> Affine2 {
        Affine2::IDENTITY
    }
    fn set_view(&mut self, _update: &ViewUpdate) -> Result<(), ActionError> {
        Ok(())
    }
    /// View-level wheel handling (e.g. zoom). Machines also see the event.
    fn wheel(&mut self, _p: Point, _delta: f64) {}
    fn emitted(&self) -> &[Emitted] {
        &[]
    }
}

/// Object-safe view of a running interaction, used by the harness and the
/// session protocol.
pub trait Interaction: Scene + Send {
    fn kind(&self) -> InteractionKind;
    fn state(&self) -> &str;
    fn model(&self) -> &Model;
    /// Replaces the model and resets the machine to its initial state.
    fn load_model(&mut self, model: Model);
    fn dispatch(&mut self, e: &Event) -> Result<Option<Fired>, ActionError>;
    fn picking(&self) -> Vec<PickObject>;
    fn screen_to_pick(&self) -> Affine2;
    fn resize(&mut self, w: f64, h: f64);
    fn set_view(&mut self, update: &ViewUpdate) -> Result<(), ActionError>;
    fn wheel(&mut self, p: Point, delta: f64);
    fn emitted(&self) -> &[Emitted];
}

/// A world driven by its machine.
pub struct Controller<W: World> {
    pub machine: Machine<W>,
    pub world: W,
}

impl<W: World> Controller<W> {
    pub fn new(machine: Machine<W>, world: W) -> Self {
        Controller { machine, world }
    }
}

impl<W: World> Scene for Controller<W> {
    fn display_list(&self) -> Vec<DrawCmd> {
        self.world.display()
    }
    fn viewport(&self) -> (u32, u32) {
        self.world.viewport()
    }
    fn pick_to_screen(&self) -> Affine2 {
        self.world.pick_to_screen()
    }
}

impl<W: World> Interaction for Controller<W> {
    fn kind(&self) -> InteractionKind {
        self.world.kind()
    }
    fn state(&self) -> &str {
        self.machine.current()
    }
    fn model(&self) -> &Model {
        self.world.model()
    }
    fn load_model(&mut self, model: Model) {
        self.world.replace_model(model);
        self.machine.reset();
    }
    fn dispatch(&mut self, e: &Event) -> Result<Option<Fired>, ActionError> {
        self.machine.dispatch(&mut self.world, e)
    }
    fn picking(&self) -> Vec<PickObject> {
        self.world.picking()
    }
    fn screen_to_pick(&self) -> Affine2 {
        self.world.screen_to_pick()
    }
    fn resize(&mut self, w: f64, h: f64) {
        self.world.resize(w, h)
    }
    fn set_view(&mut self, update: &ViewUpdate) -> Result<(), ActionError> {
        self.world.set_view(update)
    }
    fn wheel(&mut self, p: Point, delta: f64) {
        self.world.wheel(p, delta)
    }
    fn emitted(&self) -> &[Emitted] {
        self.world.emitted()
    }
}

/// Builds a ready-to-run interaction. Without a model, a small demo model
/// is used.
pub fn create(
    kind: InteractionKind,
    model: Option<Model>,
    cfg: InteractionConfig,
) -> Box<dyn Interaction> {
    match kind {
        InteractionKind::Scrollbar => Box::new(scrollbar::controller(
            model.unwrap_or_else(scrollbar::demo_model),
        )),
        InteractionKind::Dnd => Box::new(dnd::controller(
            model.unwrap_or_else(dnd::demo_model),
            cfg,
        )),
        InteractionKind::Guides => Box::new(guides::controller(
            model.unwrap_or_else(guides::demo_model),
            cfg,
        )),
        InteractionKind::Calendar => Box::new(calendar::controller(
            model.unwrap_or_else(calendar::demo_model),
            cfg,
        )),
    }
}

/// Id embedded in a tag such as `obj-12`.
pub(crate) fn tag_id(tag: &str, prefix: &str) -> Option<u64> {
    tag.strip_prefix(prefix)?.split(['-', '@']).next()?.parse().ok()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn kind_names_roundtrip() {
        for k in InteractionKind::ALL {
            assert_eq!(k.name().parse::<InteractionKind>().unwrap(), k);
        }
        assert!("menu".parse::<InteractionKind>().is_err());
    }

    #[test]
    fn tag_ids() {
        assert_eq!(tag_id("obj-12", "obj-"), Some(12));
        assert_eq!(tag_id("cal-ev-42-start", "cal-ev-"), Some(42));
        assert_eq!(tag_id("thumb", "obj-"), None);
    }
}
