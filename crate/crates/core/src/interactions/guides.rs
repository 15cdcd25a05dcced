//! Magnetic guides on top of drag'n'drop with hysteresis.
//!
//! When the drag starts, every guide gets three invisible attraction bands,
//! one per alignable feature of the dragged object (top edge, center, bottom
//! edge for horizontal guides; left, center, right for vertical ones). The
//! bands are offset by the grab position so that the cursor entering a band
//! means the feature is within the attraction distance of the guide. Bands
//! of crossing guides occlude each other, so their intersections get their
//! own square zones on top, where the object sticks on both axes.

use crate::geometry::{rect_intersection, Point, Rect};
use crate::model::{Axis, DragObject, Guide, Model};
use crate::picking::{number_sequentially, PickObject};
use crate::statemachine::{ActionError, Event, EventKind, Machine, Pattern, Transition};

use super::dnd::{
    drop_transition, hysteresis_states, move_transition, DragWorld, Z_BAND, Z_STICK,
};
use super::{Controller, InteractionConfig, InteractionKind};

pub const H_BAND_PREFIX: &str = "guide-h-";
pub const V_BAND_PREFIX: &str = "guide-v-";
pub const STICK_PREFIX: &str = "stick-";

const H_PARTS: [&str; 3] = ["top", "center", "bottom"];
const V_PARTS: [&str; 3] = ["left", "center", "right"];

/// Offset of the object center from the guide when `part` lies on it.
fn feature_offset(axis: Axis, part: &str, obj: &DragObject) -> Option<f64> {
    let half = match axis {
        Axis::Horizontal => obj.h / 2.0,
        Axis::Vertical => obj.w / 2.0,
    };
    match part {
        "top" | "left" => Some(half),
        "center" => Some(0.0),
        "bottom" | "right" => Some(-half),
        _ => None,
    }
}

struct Band {
    guide: u64,
    part: &'static str,
    rect: Rect,
}

fn bands(
    guides: &[Guide],
    axis: Axis,
    obj: &DragObject,
    rel_pos: Point,
    cfg: &InteractionConfig,
    window: (f64, f64),
) -> Vec<Band> {
    let a = cfg.attraction_distance;
    let parts = match axis {
        Axis::Horizontal => H_PARTS,
        Axis::Vertical => V_PARTS,
    };
    let mut out = Vec::new();
    for g in guides.iter().filter(|g| g.axis == axis) {
        for part in parts {
            let delta = feature_offset(axis, part, obj).expect("known part");
            let rect = match axis {
                Axis::Horizontal => {
                    let c = g.pos + delta + rel_pos.y;
                    Rect::new(0.0, c - a, window.0, 2.0 * a)
                }
                Axis::Vertical => {
                    let c = g.pos + delta + rel_pos.x;
                    Rect::new(c - a, 0.0, 2.0 * a, window.1)
                }
            };
            out.push(Band {
                guide: g.id,
                part,
                rect,
            });
        }
    }
    out
}

/// Attraction zones for dragging `obj` grabbed at `rel_pos` from its center:
/// three bands per guide plus one square per horizontal×vertical band
/// crossing, stacked above the bands.
pub fn guides_build_picking(
    guides: &[Guide],
    obj: &DragObject,
    rel_pos: Point,
    cfg: &InteractionConfig,
    window: (f64, f64),
) -> Vec<PickObject> {
    let hs = bands(guides, Axis::Horizontal, obj, rel_pos, cfg, window);
    let vs = bands(guides, Axis::Vertical, obj, rel_pos, cfg, window);
    let mut out = Vec::with_capacity(hs.len() + vs.len() + hs.len() * vs.len());
    for b in &hs {
        out.push(PickObject::new(
            0,
            b.rect,
            Z_BAND,
            format!("{H_BAND_PREFIX}{}-{}", b.guide, b.part),
        ));
    }
    for b in &vs {
        out.push(PickObject::new(
            0,
            b.rect,
            Z_BAND,
            format!("{V_BAND_PREFIX}{}-{}", b.guide, b.part),
        ));
    }
    for h in &hs {
        for v in &vs {
            if let Some(square) = rect_intersection(&h.rect, &v.rect) {
                out.push(PickObject::new(
                    0,
                    square,
                    Z_STICK,
                    format!("{STICK_PREFIX}{}-{}-{}-{}", h.guide, h.part, v.guide, v.part),
                ));
            }
        }
    }
    number_sequentially(&mut out);
    out
}

/// Where a zone pins the object center: `(x, y)`, each axis optional.
pub fn zone_snap(tag: &str, guides: &[Guide], obj: &DragObject) -> Option<(Option<f64>, Option<f64>)> {
    let target = |axis: Axis, gid: &str, part: &str| -> Option<f64> {
        let gid: u64 = gid.parse().ok()?;
        let g = guides.iter().find(|g| g.id == gid && g.axis == axis)?;
        Some(g.pos + feature_offset(axis, part, obj)?)
    };
    if let Some(rest) = tag.strip_prefix(H_BAND_PREFIX) {
        let (gid, part) = rest.split_once('-')?;
        return Some((None, Some(target(Axis::Horizontal, gid, part)?)));
    }
    if let Some(rest) = tag.strip_prefix(V_BAND_PREFIX) {
        let (gid, part) = rest.split_once('-')?;
        return Some((Some(target(Axis::Vertical, gid, part)?), None));
    }
    if let Some(rest) = tag.strip_prefix(STICK_PREFIX) {
        let f: Vec<&str> = rest.split('-').collect();
        if let [hg, hp, vg, vp] = f[..] {
            return Some((
                Some(target(Axis::Vertical, vg, vp)?),
                Some(target(Axis::Horizontal, hg, hp)?),
            ));
        }
    }
    None
}

fn start_drag_with_guides(w: &mut DragWorld, _e: &Event) -> Result<(), ActionError> {
    w.hyst = None;
    let ctx = w
        .drag
        .ok_or_else(|| ActionError::Other("no drag in progress".into()))?;
    let obj = w
        .model
        .object(ctx.target_id)
        .ok_or(crate::model::ModelError::UnknownId(ctx.target_id))?
        .clone();
    w.zones = guides_build_picking(&w.model.guides, &obj, ctx.rel_pos, &w.cfg, w.window);
    Ok(())
}

/// Follows the cursor, then pins the axes the zone under `e.tag` controls.
fn snap_to_zone(w: &mut DragWorld, e: &Event) -> Result<(), ActionError> {
    let obj = w
        .dragged()
        .ok_or_else(|| ActionError::Other("no drag in progress".into()))?
        .clone();
    let (x, y) = zone_snap(&e.tag, &w.model.guides, &obj)
        .ok_or_else(|| ActionError::Other(format!("not a guide zone: {}", e.tag)))?;
    w.follow(e.p)?;
    w.place(x, y)
}

fn follow(w: &mut DragWorld, e: &Event) -> Result<(), ActionError> {
    w.follow(e.p)
}

fn enter_transitions() -> Vec<Transition<DragWorld>> {
    vec![
        Transition::new(
            "enterStick",
            Pattern::tag_prefix(EventKind::Enter, STICK_PREFIX),
            "inStickGuide",
        )
        .action(snap_to_zone),
        Transition::new(
            "enterH",
            Pattern::tag_prefix(EventKind::Enter, H_BAND_PREFIX),
            "dragInHGuide",
        )
        .action(snap_to_zone),
        Transition::new(
            "enterV",
            Pattern::tag_prefix(EventKind::Enter, V_BAND_PREFIX),
            "dragInVGuide",
        )
        .action(snap_to_zone),
    ]
}

/// Hysteresis followed by dragging ⇄ dragInHGuide / dragInVGuide / inStickGuide.
pub fn guides_machine() -> Machine<DragWorld> {
    let [start, wait] = hysteresis_states(start_drag_with_guides);

    let mut dragging = enter_transitions();
    dragging.push(move_transition("dragging"));
    dragging.push(drop_transition());

    let in_guide = |prefix: &str, state: &str| {
        vec![
            Transition::new("slide", Pattern::on(EventKind::Move), state).action(snap_to_zone_on_move),
            Transition::new("leave", Pattern::tag_prefix(EventKind::Leave, prefix), "dragging")
                .action(follow),
            drop_transition(),
        ]
    };

    Machine::builder()
        .state(start.0, start.1)
        .state(wait.0, wait.1)
        .state("dragging", dragging)
        .state("dragInHGuide", in_guide(H_BAND_PREFIX, "dragInHGuide"))
        .state("dragInVGuide", in_guide(V_BAND_PREFIX, "dragInVGuide"))
        // no move transition: the object stays stuck on both axes
        .state(
            "inStickGuide",
            vec![
                Transition::new("leave", Pattern::tag_prefix(EventKind::Leave, STICK_PREFIX), "dragging")
                    .action(follow),
                drop_transition(),
            ],
        )
        .build()
        .expect("guides machine is well formed")
}

/// Moves inside a band report the band as the picked tag; the free axis
/// follows the cursor and the pinned one stays on the guide.
fn snap_to_zone_on_move(w: &mut DragWorld, e: &Event) -> Result<(), ActionError> {
    let obj = w
        .dragged()
        .ok_or_else(|| ActionError::Other("no drag in progress".into()))?
        .clone();
    let (x, y) = match zone_snap(&e.tag, &w.model.guides, &obj) {
        Some(s) => s,
        // the topmost zone is not a band (cannot happen with full-width
        // bands, but keep the current pinned axis)
        None => (None, None),
    };
    let before = (obj.x, obj.y);
    w.follow(e.p)?;
    let pin_x = x.or(if y.is_none() { Some(before.0) } else { None });
    let pin_y = y.or(if x.is_none() { Some(before.1) } else { None });
    w.place(pin_x, pin_y)
}

pub fn demo_model() -> Model {
    Model {
        objects: vec![
            DragObject::new(1, 120.0, 100.0, 60.0, 40.0),
            DragObject::new(2, 330.0, 260.0, 80.0, 50.0),
        ],
        guides: vec![
            Guide::horizontal(1, 150.0),
            Guide::horizontal(2, 300.0),
            Guide::vertical(3, 200.0),
            Guide::vertical(4, 380.0),
        ],
        ..Model::new()
    }
}

pub fn controller(model: Model, cfg: InteractionConfig) -> Controller<DragWorld> {
    Controller::new(
        guides_machine(),
        DragWorld::new(InteractionKind::Guides, model, cfg),
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::interactions::dnd::HYST_TAG;

    fn obj() -> DragObject {
        DragObject::new(1, 100.0, 100.0, 60.0, 40.0)
    }

    fn band_rect(picks: &[PickObject], tag: &str) -> Rect {
        match picks.iter().find(|p| p.tag == tag).unwrap().shape {
            crate::geometry::Shape::Rect(r) => r,
            _ => panic!("band is a rect"),
        }
    }

    #[test]
    fn horizontal_bands_around_guide() {
        let guides = [Guide::horizontal(7, 200.0)];
        let cfg = InteractionConfig::default();
        let picks = guides_build_picking(&guides, &obj(), Point::ORIGIN, &cfg, (500.0, 400.0));
        assert_eq!(picks.len(), 3);
        let top = band_rect(&picks, "guide-h-7-top");
        let center = band_rect(&picks, "guide-h-7-center");
        let bottom = band_rect(&picks, "guide-h-7-bottom");
        assert_eq!((top.y, top.bottom()), (210.0, 230.0));
        assert_eq!((center.y, center.bottom()), (190.0, 210.0));
        assert_eq!((bottom.y, bottom.bottom()), (170.0, 190.0));
        assert_eq!((top.x, top.w), (0.0, 500.0));
    }

    #[test]
    fn bands_follow_grab_offset() {
        let guides = [Guide::horizontal(7, 200.0)];
        let cfg = InteractionConfig::default();
        let picks = guides_build_picking(&guides, &obj(), Point::new(0.0, 7.0), &cfg, (500.0, 400.0));
        let top = band_rect(&picks, "guide-h-7-top");
        assert_eq!((top.y, top.bottom()), (217.0, 237.0));
    }

    #[test]
    fn crossing_squares_sit_on_top() {
        let guides = [Guide::horizontal(1, 200.0), Guide::vertical(2, 250.0)];
        let cfg = InteractionConfig::default();
        let picks = guides_build_picking(&guides, &obj(), Point::ORIGIN, &cfg, (500.0, 400.0));
        assert_eq!(picks.len(), 3 + 3 + 9);
        let sq = picks.iter().find(|p| p.tag == "stick-1-center-2-center").unwrap();
        assert_eq!(sq.shape, Rect::new(240.0, 190.0, 20.0, 20.0).into());
        assert!(sq.z > picks[0].z);
    }

    #[test]
    fn zone_snap_targets() {
        let guides = [Guide::horizontal(1, 200.0), Guide::vertical(2, 250.0)];
        let o = obj();
        assert_eq!(zone_snap("guide-h-1-top", &guides, &o), Some((None, Some(220.0))));
        assert_eq!(zone_snap("guide-h-1-bottom", &guides, &o), Some((None, Some(180.0))));
        assert_eq!(zone_snap("guide-v-2-left", &guides, &o), Some((Some(280.0), None)));
        assert_eq!(
            zone_snap("stick-1-center-2-right", &guides, &o),
            Some((Some(220.0), Some(200.0)))
        );
        assert_eq!(zone_snap("guide-h-9-top", &guides, &o), None);
        assert_eq!(zone_snap("thumb", &guides, &o), None);
    }

    fn dragging_world() -> (Machine<DragWorld>, DragWorld) {
        let model = Model {
            objects: vec![DragObject::new(1, 100.0, 100.0, 60.0, 40.0)],
            guides: vec![Guide::horizontal(1, 200.0), Guide::vertical(2, 300.0)],
            ..Model::new()
        };
        let mut w = DragWorld::new(InteractionKind::Guides, model, InteractionConfig::default());
        let mut m = guides_machine();
        m.dispatch(&mut w, &Event::press(Point::new(100.0, 100.0), "obj-1")).unwrap();
        m.dispatch(&mut w, &Event::leave(Point::new(100.0, 110.0), HYST_TAG)).unwrap();
        assert_eq!(m.current(), "dragging");
        assert_eq!(w.zones.len(), 3 + 3 + 9);
        (m, w)
    }

    #[test]
    fn entering_band_aligns_top_edge() {
        let (mut m, mut w) = dragging_world();
        m.dispatch(&mut w, &Event::enter(Point::new(100.0, 212.0), "guide-h-1-top")).unwrap();
        assert_eq!(m.current(), "dragInHGuide");
        let o = w.model.objects[0].clone();
        assert_eq!(o.y, 220.0);
        assert_eq!(o.y - o.h / 2.0, 200.0);

        m.dispatch(&mut w, &Event::moved(Point::new(130.0, 215.0), "guide-h-1-top")).unwrap();
        let o = w.model.objects[0].clone();
        assert_eq!((o.x, o.y), (130.0, 220.0));

        m.dispatch(&mut w, &Event::leave(Point::new(130.0, 235.0), "guide-h-1-top")).unwrap();
        assert_eq!(m.current(), "dragging");
        let o = w.model.objects[0].clone();
        assert_eq!((o.x, o.y), (130.0, 235.0));
    }

    #[test]
    fn stick_zone_ignores_moves() {
        let (mut m, mut w) = dragging_world();
        m.dispatch(&mut w, &Event::enter(Point::new(301.0, 199.0), "stick-1-center-2-center")).unwrap();
        assert_eq!(m.current(), "inStickGuide");
        let before = w.model.objects[0].clone();
        assert_eq!((before.x, before.y), (300.0, 200.0));
        assert!(m
            .dispatch(&mut w, &Event::moved(Point::new(305.0, 195.0), "stick-1-center-2-center"))
            .unwrap()
            .is_none());
        assert_eq!(w.model.objects[0], before);
    }

    #[test]
    fn release_clears_zones() {
        let (mut m, mut w) = dragging_world();
        m.dispatch(&mut w, &Event::release(Point::new(100.0, 110.0), "")).unwrap();
        assert_eq!(m.current(), "start");
        assert!(w.zones.is_empty());
    }
}
