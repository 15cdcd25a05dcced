//! Model / display / picking / controller toolkit.
//!
//! Each interaction keeps a model, derives a display list and a picking view
//! from it, and reacts to pointer events through a state machine. Picking is
//! done by rasterizing the picking view into an id buffer.

pub mod geometry;
pub mod harness;
pub mod interactions;
pub mod model;
pub mod picking;
pub mod renderloop;
pub mod server;
pub mod session;
pub mod statemachine;
pub mod transforms;

pub use geometry::{Affine2, Circle, Point, Rect, Shape};
pub use interactions::{create, Interaction, InteractionConfig, InteractionKind};
pub use model::{CalendarEvent, Model, ModelError};
pub use picking::{PickBuffer, PickObject};
pub use statemachine::{Event, EventKind, Machine};
pub use transforms::{invtransf, invwrap, transf, wrap, ViewParams};
