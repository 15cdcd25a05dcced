//! Drag'n'drop with hysteresis.
//!
//! Pressing on an object inserts an invisible circle centered on the press
//! point. Releasing inside it is a click (Select); leaving it starts the
//! drag and removes the circle. No distance is ever computed here: the
//! Leave event produced by the picking view does that work.

use crate::geometry::{Circle, Point};
use crate::model::{DragObject, Model};
use crate::picking::{number_sequentially, PickObject};
use crate::renderloop::{DrawCmd, Geom};
use crate::statemachine::{ActionError, Event, EventKind, Machine, Pattern, TagMatch, Transition};

use super::{tag_id, Controller, Emitted, InteractionConfig, InteractionKind, World};

pub const OBJECT_TAG: &str = "obj-";
pub const HYST_TAG: &str = "hyst";

pub(crate) const Z_OBJECT: i32 = 0;
pub(crate) const Z_BAND: i32 = 20;
pub(crate) const Z_STICK: i32 = 30;
pub(crate) const Z_HYST: i32 = 40;

/// What was grabbed and where.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct DragContext {
    pub target_id: u64,
    pub press_point: Point,
    /// Offset of the press point from the object center.
    pub rel_pos: Point,
}

pub struct DragWorld {
    pub model: Model,
    pub cfg: InteractionConfig,
    pub window: (f64, f64),
    pub drag: Option<DragContext>,
    pub hyst: Option<Circle>,
    /// Guide attraction zones, alive while dragging with guides.
    pub zones: Vec<PickObject>,
    pub emitted: Vec<Emitted>,
    kind: InteractionKind,
}

impl DragWorld {
    pub fn new(kind: InteractionKind, model: Model, cfg: InteractionConfig) -> Self {
        DragWorld {
            model,
            cfg,
            window: (500.0, 400.0),
            drag: None,
            hyst: None,
            zones: Vec::new(),
            emitted: Vec::new(),
            kind,
        }
    }

    pub fn dragged(&self) -> Option<&DragObject> {
        self.model.object(self.drag?.target_id)
    }

    fn ctx(&self) -> Result<DragContext, ActionError> {
        self.drag
            .ok_or_else(|| ActionError::Other("no drag in progress".into()))
    }

    /// Moves the dragged object so that it keeps its grab offset to `p`.
    pub(crate) fn follow(&mut self, p: Point) -> Result<(), ActionError> {
        let ctx = self.ctx()?;
        let obj = self.model.object_mut(ctx.target_id)?;
        obj.x = p.x - ctx.rel_pos.x;
        obj.y = p.y - ctx.rel_pos.y;
        Ok(())
    }

    pub(crate) fn place(&mut self, x: Option<f64>, y: Option<f64>) -> Result<(), ActionError> {
        let ctx = self.ctx()?;
        let obj = self.model.object_mut(ctx.target_id)?;
        if let Some(x) = x {
            obj.x = x;
        }
        if let Some(y) = y {
            obj.y = y;
        }
        Ok(())
    }
}

/// The hysteresis picking view: one invisible circle around the press point.
pub fn hyst_build_picking(press: Point, cfg: &InteractionConfig) -> Vec<PickObject> {
    let mut v = vec![PickObject::new(
        0,
        Circle::new(press.x, press.y, cfg.hysteresis_radius),
        Z_HYST,
        HYST_TAG,
    )];
    number_sequentially(&mut v);
    v
}

fn object_picking(objects: &[DragObject]) -> Vec<PickObject> {
    objects
        .iter()
        .map(|o| PickObject::new(0, o.rect(), Z_OBJECT, format!("{OBJECT_TAG}{}", o.id)))
        .collect()
}

fn press_action(w: &mut DragWorld, e: &Event) -> Result<(), ActionError> {
    // a second press lands on the circle itself; keep the previous target
    let target_id = match tag_id(&e.tag, OBJECT_TAG) {
        Some(id) => id,
        None => w.ctx()?.target_id,
    };
    let obj = w
        .model
        .object(target_id)
        .ok_or(crate::model::ModelError::UnknownId(target_id))?;
    w.drag = Some(DragContext {
        target_id,
        press_point: e.p,
        rel_pos: Point::new(e.p.x - obj.x, e.p.y - obj.y),
    });
    w.zones.clear();
    w.hyst = Some(Circle::new(e.p.x, e.p.y, w.cfg.hysteresis_radius));
    Ok(())
}

fn click_action(w: &mut DragWorld, _e: &Event) -> Result<(), ActionError> {
    let ctx = w.ctx()?;
    w.hyst = None;
    w.drag = None;
    w.emitted.push(Emitted::Select { id: ctx.target_id });
    Ok(())
}

fn drop_action(w: &mut DragWorld, _e: &Event) -> Result<(), ActionError> {
    w.drag = None;
    w.hyst = None;
    w.zones.clear();
    Ok(())
}

/// `start` and `waitHyst`, shared with the guides machine. `on_leave` runs
/// when the cursor leaves the circle.
pub(crate) fn hysteresis_states(
    on_leave: fn(&mut DragWorld, &Event) -> Result<(), ActionError>,
) -> [(&'static str, Vec<Transition<DragWorld>>); 2] {
    let start = vec![Transition::new(
        "press",
        Pattern::tag_prefix(EventKind::Press, OBJECT_TAG).button(1),
        "waitHyst",
    )
    .action(press_action)];
    let wait = vec![
        Transition::new(
            "rearm",
            Pattern {
                kind: EventKind::Press,
                tag: TagMatch::Any,
                button: Some(1),
            },
            "waitHyst",
        )
        .action(press_action),
        Transition::new("click", Pattern::on(EventKind::Release), "start").action(click_action),
        Transition::new("drag", Pattern::tagged(EventKind::Leave, HYST_TAG), "dragging")
            .action(on_leave),
    ];
    [("start", start), ("waitHyst", wait)]
}

pub(crate) fn move_transition(target: &str) -> Transition<DragWorld> {
    Transition::new("move", Pattern::on(EventKind::Move), target)
        .action(|w: &mut DragWorld, e| w.follow(e.p))
}

pub(crate) fn drop_transition() -> Transition<DragWorld> {
    Transition::new("drop", Pattern::on(EventKind::Release), "start").action(drop_action)
}

/// start → waitHyst → dragging.
pub fn hyst_machine() -> Machine<DragWorld> {
    let [start, wait] = hysteresis_states(|w, _| {
        w.hyst = None;
        Ok(())
    });
    Machine::builder()
        .state(start.0, start.1)
        .state(wait.0, wait.1)
        .state("dragging", vec![move_transition("dragging"), drop_transition()])
        .build()
        .expect("hysteresis machine is well formed")
}

impl World for DragWorld {
    fn kind(&self) -> InteractionKind {
        self.kind
    }

    fn model(&self) -> &Model {
        &self.model
    }

    fn replace_model(&mut self, model: Model) {
        self.model = model;
        self.drag = None;
        self.hyst = None;
        self.zones.clear();
        self.emitted.clear();
    }

    fn display(&self) -> Vec<DrawCmd> {
        let (ww, wh) = self.window;
        let mut cmds = Vec::new();
        for g in &self.model.guides {
            let geom = match g.axis {
                crate::model::Axis::Horizontal => Geom::Line {
                    x1: 0.0,
                    y1: g.pos,
                    x2: ww,
                    y2: g.pos,
                },
                crate::model::Axis::Vertical => Geom::Line {
                    x1: g.pos,
                    y1: 0.0,
                    x2: g.pos,
                    y2: wh,
                },
            };
            cmds.push(
                DrawCmd::new(geom, "#000000", 1, format!("guide-{}", g.id))
                    .stroke("#555555")
                    .dashed(),
            );
        }
        let dragged = self.drag.map(|d| d.target_id);
        for o in &self.model.objects {
            let fill = if Some(o.id) == dragged {
                "#2e9e5b"
            } else {
                "#7fc97f"
            };
            cmds.push(
                DrawCmd::rect(o.rect(), fill, 5, format!("{OBJECT_TAG}{}", o.id)).stroke("#1b5e20"),
            );
        }
        cmds
    }

    fn picking(&self) -> Vec<PickObject> {
        let mut v = object_picking(&self.model.objects);
        v.extend(self.zones.iter().cloned());
        if let Some(c) = self.hyst {
            v.push(PickObject::new(0, c, Z_HYST, HYST_TAG));
        }
        number_sequentially(&mut v);
        v
    }

    fn viewport(&self) -> (u32, u32) {
        (self.window.0.ceil() as u32, self.window.1.ceil() as u32)
    }

    fn resize(&mut self, w: f64, h: f64) {
        self.window = (w.max(1.0), h.max(1.0));
    }

    fn emitted(&self) -> &[Emitted] {
        &self.emitted
    }
}

pub fn demo_model() -> Model {
    Model {
        objects: vec![
            DragObject::new(1, 120.0, 100.0, 60.0, 40.0),
            DragObject::new(2, 330.0, 260.0, 80.0, 50.0),
        ],
        ..Model::new()
    }
}

pub fn controller(model: Model, cfg: InteractionConfig) -> Controller<DragWorld> {
    Controller::new(hyst_machine(), DragWorld::new(InteractionKind::Dnd, model, cfg))
}
