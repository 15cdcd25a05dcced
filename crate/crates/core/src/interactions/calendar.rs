//! Week calendar with drag-to-move and drag-to-resize events.
//!
//! Each visible event is drawn as a rectangle whose vertical extent comes
//! from [`transf`] of its start and end. Its picking view is three stacked
//! rectangles tiling the display rectangle: a start handle, the body and an
//! end handle. Dragging converts the cursor back to a time with
//! [`invtransf`] and writes the result into the model; the next frame
//! shows it.

use crate::geometry::{Affine2, Point, Rect};
use crate::model::{overlap_layout, CalendarEvent, Model};
use crate::picking::{number_sequentially, PickObject};
use crate::renderloop::{DrawCmd, Geom};
use crate::statemachine::{ActionError, Event, EventKind, Machine, Pattern, Transition};
use crate::transforms::{invtransf, Pipeline, ViewParams, DAY, WEEK};

use super::{tag_id, Controller, InteractionConfig, InteractionKind, ViewUpdate, World};

pub const EVENT_TAG: &str = "cal-ev-";

/// Handles are at most this tall, px.
pub const HANDLE_MAX: f64 = 8.0;
/// ... and at most this share of the event height.
pub const HANDLE_SHARE: f64 = 0.25;

pub const WHEEL_ZOOM_STEP: f64 = 1.1;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Part {
    Start,
    Move,
    End,
}

impl Part {
    pub fn name(self) -> &'static str {
        match self {
            Part::Start => "start",
            Part::Move => "move",
            Part::End => "end",
        }
    }

    fn parse(s: &str) -> Option<Part> {
        match s {
            "start" => Some(Part::Start),
            "move" => Some(Part::Move),
            "end" => Some(Part::End),
            _ => None,
        }
    }
}

/// `cal-ev-{id}-{part}`, with `@{day}` appended for continuation segments
/// of events spanning midnight.
pub fn part_tag(id: u64, part: Part, day: Option<u8>) -> String {
    match day {
        None => format!("{EVENT_TAG}{id}-{}", part.name()),
        Some(d) => format!("{EVENT_TAG}{id}-{}@{d}", part.name()),
    }
}

pub fn parse_part_tag(tag: &str) -> Option<(u64, Part)> {
    let id = tag_id(tag, EVENT_TAG)?;
    let rest = tag.strip_prefix(EVENT_TAG)?.split_once('-')?.1;
    let part = rest.split('@').next()?;
    Some((id, Part::parse(part)?))
}

/// Rounds to the nearest multiple of `step`; `step <= 0` leaves `t` alone.
pub fn snap(t: f64, step: f64) -> f64 {
    if step > 0.0 {
        (t / step).round() * step
    } else {
        t
    }
}

/// The part of an event that falls on one day column.
#[derive(Clone, Debug, PartialEq)]
pub struct Segment {
    pub id: u64,
    pub day: u8,
    pub start: f64,
    pub end: f64,
    /// This segment holds the event start (and thus the start handle).
    pub first: bool,
    /// This segment holds the event end.
    pub last: bool,
}

/// Splits the week's events at midnight.
pub fn day_segments(events: &[CalendarEvent], view: &ViewParams) -> Vec<Segment> {
    let week0 = view.week_start();
    let mut out = Vec::new();
    for ev in events {
        for day in 0..7u8 {
            let ds = week0 + day as f64 * DAY;
            let de = ds + DAY;
            let (s, e) = (ev.start.max(ds), ev.end.min(de));
            if e > s {
                out.push(Segment {
                    id: ev.id,
                    day,
                    start: s,
                    end: e,
                    first: ev.start >= ds,
                    last: ev.end <= de,
                });
            }
        }
    }
    out
}

/// Display rectangle of each segment, in the layout plane, sharing the day
/// column between overlapping events.
pub fn segment_rects(segments: &[Segment], view: &ViewParams) -> Vec<(Segment, Rect)> {
    let week0 = view.week_start();
    let mut out = Vec::with_capacity(segments.len());
    for day in 0..7u8 {
        let todays: Vec<&Segment> = segments.iter().filter(|s| s.day == day).collect();
        let as_events: Vec<CalendarEvent> = todays
            .iter()
            .map(|s| CalendarEvent::new(s.id, s.start, s.end, ""))
            .collect();
        let layout = overlap_layout(&as_events);
        let ds = week0 + day as f64 * DAY;
        for seg in todays {
            let (index, count) = layout[&seg.id];
            let col = day as f64 + index as f64 / count as f64;
            let col_next = day as f64 + (index + 1) as f64 / count as f64;
            let top_left = view.layout_point(col, (seg.start - ds) / DAY);
            let bottom_right = view.layout_point(col_next, (seg.end - ds) / DAY);
            out.push((
                seg.clone(),
                Rect::from_edges(top_left.x, top_left.y, bottom_right.x, bottom_right.y),
            ));
        }
    }
    out
}

/// Start handle, body and end handle tiling `rect` top to bottom.
pub fn split_handles(rect: Rect, with_start: bool, with_end: bool) -> Vec<(Part, Rect)> {
    let hh = HANDLE_MAX.min(HANDLE_SHARE * rect.h);
    let top = rect.y;
    let bottom = rect.bottom();
    let body_top = if with_start { top + hh } else { top };
    let body_bottom = if with_end { bottom - hh } else { bottom };
    let mut out = Vec::with_capacity(3);
    if with_start {
        out.push((Part::Start, Rect::from_edges(rect.x, top, rect.right(), body_top)));
    }
    out.push((
        Part::Move,
        Rect::from_edges(rect.x, body_top, rect.right(), body_bottom),
    ));
    if with_end {
        out.push((Part::End, Rect::from_edges(rect.x, body_bottom, rect.right(), bottom)));
    }
    out
}

const Z_GRID: i32 = 0;
const Z_EVENT: i32 = 10;
const Z_TITLE: i32 = 11;

/// Display commands and picking objects for the events of the view's week.
pub fn calendar_build_views(
    events: &[CalendarEvent],
    view: &ViewParams,
    _cfg: &InteractionConfig,
) -> (Vec<DrawCmd>, Vec<PickObject>) {
    let to_screen = view.layout_to_screen();
    let mut cmds = Vec::new();

    // day columns and hour lines
    for day in 0..7u8 {
        let a = view.layout_point(day as f64, 0.0);
        let b = view.layout_point(day as f64 + 1.0, 1.0);
        let fill = if day % 2 == 0 { "#fafafa" } else { "#f0f0f0" };
        cmds.push(
            DrawCmd::rect(Rect::from_edges(a.x, a.y, b.x, b.y), fill, Z_GRID, format!("day-{day}"))
                .transformed(&to_screen),
        );
    }
    for hour in 1..24 {
        let f = hour as f64 / 24.0;
        let a = view.layout_point(0.0, f);
        let b = view.layout_point(7.0, f);
        cmds.push(
            DrawCmd::new(
                Geom::Line {
                    x1: a.x,
                    y1: a.y,
                    x2: b.x,
                    y2: b.y,
                },
                "#dddddd",
                Z_GRID + 1,
                format!("hour-{hour}"),
            )
            .stroke("#dddddd")
            .transformed(&to_screen),
        );
    }

    let visible = crate::model::select_visible(events, view.week_start(), view.week_end());
    let segments = day_segments(&visible, view);
    let mut picks = Vec::new();
    for (seg, rect) in segment_rects(&segments, view) {
        let continuation = if seg.first { None } else { Some(seg.day) };
        cmds.push(
            DrawCmd::rect(rect, "#6fa8dc", Z_EVENT, format!("ev-{}", seg.id))
                .stroke("#1c4587")
                .transformed(&to_screen),
        );
        if let Some(ev) = visible.iter().find(|e| e.id == seg.id) {
            if seg.first && !ev.title.is_empty() {
                cmds.push(
                    DrawCmd::new(
                        Geom::Text {
                            x: rect.x + 3.0,
                            y: rect.y + 12.0,
                            text: ev.title.clone(),
                        },
                        "#0b2345",
                        Z_TITLE,
                        format!("title-{}", seg.id),
                    )
                    .transformed(&to_screen),
                );
            }
        }
        for (part, r) in split_handles(rect, seg.first, seg.last) {
            picks.push(PickObject::new(0, r, Z_EVENT, part_tag(seg.id, part, continuation)));
        }
    }
    number_sequentially(&mut picks);
    (cmds, picks)
}

/// What was grabbed by the press.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CalendarGrab {
    pub id: u64,
    pub part: Part,
    /// Time under the press point minus the event start.
    pub t_grab: f64,
    pub duration: f64,
}

pub struct CalendarWorld {
    pub model: Model,
    pub view: ViewParams,
    pub cfg: InteractionConfig,
    pub grab: Option<CalendarGrab>,
}

impl CalendarWorld {
    pub fn new(model: Model, view: ViewParams, cfg: InteractionConfig) -> Self {
        CalendarWorld {
            model,
            view,
            cfg,
            grab: None,
        }
    }
}

fn grab_action(w: &mut CalendarWorld, e: &Event) -> Result<(), ActionError> {
    let (id, part) = parse_part_tag(&e.tag)
        .ok_or_else(|| ActionError::Other(format!("not an event handle: {}", e.tag)))?;
    let ev = w
        .model
        .event(id)
        .ok_or(crate::model::ModelError::UnknownId(id))?;
    let t = invtransf(e.p, &w.view)?;
    w.grab = Some(CalendarGrab {
        id,
        part,
        t_grab: t - ev.start,
        duration: ev.duration(),
    });
    Ok(())
}

fn drag_action(w: &mut CalendarWorld, e: &Event) -> Result<(), ActionError> {
    let g = w
        .grab
        .ok_or_else(|| ActionError::Other("no event grabbed".into()))?;
    let t = snap(invtransf(e.p, &w.view)?, w.cfg.snap_minutes);
    let ev = w
        .model
        .event(g.id)
        .ok_or(crate::model::ModelError::UnknownId(g.id))?
        .clone();
    let min = w.model.min_duration;
    match g.part {
        Part::Move => {
            let start = t - g.t_grab;
            w.model.update_event(g.id, start, start + g.duration)?;
        }
        Part::Start => {
            w.model.update_event(g.id, t.min(ev.end - min), ev.end)?;
        }
        Part::End => {
            w.model.update_event(g.id, ev.start, t.max(ev.start + min))?;
        }
    }
    Ok(())
}

/// idle → dragging on a press over any event handle.
pub fn calendar_machine() -> Machine<CalendarWorld> {
    Machine::builder()
        .state(
            "idle",
            vec![Transition::new(
                "grab",
                Pattern::tag_prefix(EventKind::Press, EVENT_TAG).button(1),
                "dragging",
            )
            .action(grab_action)],
        )
        .state(
            "dragging",
            vec![
                Transition::new("drag", Pattern::on(EventKind::Move), "dragging").action(drag_action),
                Transition::new("drop", Pattern::on(EventKind::Release), "idle").action(
                    |w: &mut CalendarWorld, _| {
                        w.grab = None;
                        Ok(())
                    },
                ),
            ],
        )
        .build()
        .expect("calendar machine is well formed")
}

impl World for CalendarWorld {
    fn kind(&self) -> InteractionKind {
        InteractionKind::Calendar
    }

    fn model(&self) -> &Model {
        &self.model
    }

    fn replace_model(&mut self, model: Model) {
        self.model = model;
        self.grab = None;
    }

    fn display(&self) -> Vec<DrawCmd> {
        calendar_build_views(&self.model.events, &self.view, &self.cfg).0
    }

    fn picking(&self) -> Vec<PickObject> {
        calendar_build_views(&self.model.events, &self.view, &self.cfg).1
    }

    fn viewport(&self) -> (u32, u32) {
        (
            self.view.window_w.max(1.0).ceil() as u32,
            self.view.window_h.max(1.0).ceil() as u32,
        )
    }

    fn resize(&mut self, w: f64, h: f64) {
        self.view.window_w = w.max(1.0);
        self.view.window_h = h.max(1.0);
    }

    fn screen_to_pick(&self) -> Affine2 {
        self.view.screen_to_layout().unwrap_or(Affine2::IDENTITY)
    }

    fn pick_to_screen(&self) -> Affine2 {
        self.view.layout_to_screen()
    }

    fn set_view(&mut self, u: &ViewUpdate) -> Result<(), ActionError> {
        let mut next = self.view.clone();
        if let Some(week) = u.week {
            next.current_week = week;
        }
        if let Some(z) = u.zoom {
            next.zoom = z;
        }
        if let Some(x) = u.pan_x {
            next.pan_x = x;
        }
        if let Some(y) = u.pan_y {
            next.pan_y = y;
        }
        if let Some(stages) = &u.stages {
            next.post = Pipeline::new(stages.clone());
        }
        // reject views that cannot be inverted
        invtransf(Point::ORIGIN, &next)?;
        next.screen_to_layout()?;
        self.view = next;
        Ok(())
    }

    /// Zooms by [`WHEEL_ZOOM_STEP`] per notch about the cursor.
    fn wheel(&mut self, p: Point, delta: f64) {
        if delta == 0.0 || !delta.is_finite() {
            return;
        }
        let Ok(q) = self.view.unpost(p) else { return };
        let f = WHEEL_ZOOM_STEP.powf(-delta.signum());
        self.view.pan_x = q.x - f * (q.x - self.view.pan_x);
        self.view.pan_y = q.y - f * (q.y - self.view.pan_y);
        self.view.zoom *= f;
    }
}

pub fn demo_model() -> Model {
    let h = 60.0;
    Model::with_events(vec![
        CalendarEvent::new(1, 9.0 * h, 10.0 * h, "Standup"),
        CalendarEvent::new(2, DAY + 12.0 * h, DAY + 13.0 * h, "Lunch"),
        CalendarEvent::new(3, DAY + 12.5 * h, DAY + 14.0 * h, "Review"),
        CalendarEvent::new(4, 3.0 * DAY + 15.0 * h, 3.0 * DAY + 17.5 * h, "Workshop"),
        CalendarEvent::new(5, 4.0 * DAY + 8.0 * h, 4.0 * DAY + 8.25 * h, "Call"),
        CalendarEvent::new(6, WEEK + 10.0 * h, WEEK + 11.0 * h, "Next week"),
    ])
}

pub fn controller(model: Model, cfg: InteractionConfig) -> Controller<CalendarWorld> {
    controller_with_view(model, ViewParams::default(), cfg)
}

pub fn controller_with_view(
    model: Model,
    view: ViewParams,
    cfg: InteractionConfig,
) -> Controller<CalendarWorld> {
    Controller::new(calendar_machine(), CalendarWorld::new(model, view, cfg))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::transforms::transf;

    fn view() -> ViewParams {
        ViewParams::for_window(700.0, 960.0).with_cells(100.0, 960.0)
    }

    fn rect_of(p: &PickObject) -> Rect {
        match p.shape {
            crate::geometry::Shape::Rect(r) => r,
            _ => panic!("calendar picks are rects"),
        }
    }

    #[test]
    fn tags_roundtrip() {
        assert_eq!(part_tag(42, Part::Start, None), "cal-ev-42-start");
        assert_eq!(parse_part_tag("cal-ev-42-start"), Some((42, Part::Start)));
        assert_eq!(parse_part_tag("cal-ev-7-move@3"), Some((7, Part::Move)));
        assert_eq!(parse_part_tag("cal-ev-7-side"), None);
        assert_eq!(parse_part_tag("obj-7"), None);
    }

    #[test]
    fn one_hour_event_geometry() {
        // Tuesday 12:00-13:00
        let ev = CalendarEvent::new(1, 2160.0, 2220.0, "x");
        let (cmds, picks) = calendar_build_views(&[ev], &view(), &InteractionConfig::default());
        let r = cmds.iter().find(|c| c.tag == "ev-1").unwrap();
        assert_eq!(
            r.geom,
            Geom::Rect {
                x: 100.0,
                y: 480.0,
                w: 100.0,
                h: 40.0
            }
        );
        let heights: Vec<f64> = picks.iter().map(|p| rect_of(p).h).collect();
        assert_eq!(heights, vec![8.0, 24.0, 8.0]);
        assert_eq!(picks[0].tag, "cal-ev-1-start");
        assert_eq!(picks[2].tag, "cal-ev-1-end");
    }

    #[test]
    fn short_event_uses_quarter_handles() {
        // 1 px per minute, so a 16 min event is 16 px tall
        let v = ViewParams::for_window(700.0, 1440.0).with_cells(100.0, 1440.0);
        let ev = CalendarEvent::new(1, 600.0, 616.0, "x");
        let (_, picks) = calendar_build_views(&[ev], &v, &InteractionConfig::default());
        let heights: Vec<f64> = picks.iter().map(|p| rect_of(p).h).collect();
        assert_eq!(heights, vec![4.0, 8.0, 4.0]);
    }

    #[test]
    fn overlapping_events_share_column() {
        let evs = [
            CalendarEvent::new(1, 540.0, 600.0, "a"),
            CalendarEvent::new(2, 570.0, 630.0, "b"),
        ];
        let (cmds, _) = calendar_build_views(&evs, &view(), &InteractionConfig::default());
        for tag in ["ev-1", "ev-2"] {
            match cmds.iter().find(|c| c.tag == tag).unwrap().geom {
                Geom::Rect { w, .. } => assert_eq!(w, 50.0),
                _ => unreachable!(),
            }
        }
    }

    #[test]
    fn handles_tile_display_rect() {
        let r = Rect::new(10.0, 20.0, 30.0, 17.0);
        let parts = split_handles(r, true, true);
        assert_eq!(parts.first().unwrap().1.y, r.y);
        assert_eq!(parts.last().unwrap().1.bottom(), r.bottom());
        for w in parts.windows(2) {
            assert_eq!(w[0].1.bottom(), w[1].1.y);
        }
        let total: f64 = parts.iter().map(|p| p.1.h).sum();
        assert!((total - r.h).abs() < 1e-12);
    }

    #[test]
    fn midnight_spanning_event_is_split() {
        // Monday 23:00 to Tuesday 01:00
        let ev = CalendarEvent::new(9, 1380.0, 1500.0, "late");
        let (_, picks) = calendar_build_views(&[ev], &view(), &InteractionConfig::default());
        let tags: Vec<&str> = picks.iter().map(|p| p.tag.as_str()).collect();
        assert_eq!(tags, vec!["cal-ev-9-start", "cal-ev-9-move", "cal-ev-9-move@1", "cal-ev-9-end@1"]);
    }

    #[test]
    fn other_weeks_are_not_drawn() {
        let ev = CalendarEvent::new(1, WEEK + 600.0, WEEK + 660.0, "x");
        let (_, picks) = calendar_build_views(&[ev], &view(), &InteractionConfig::default());
        assert!(picks.is_empty());
    }

    fn world(events: Vec<CalendarEvent>) -> (Machine<CalendarWorld>, CalendarWorld) {
        (
            calendar_machine(),
            CalendarWorld::new(Model::with_events(events), view(), InteractionConfig::default()),
        )
    }

    #[test]
    fn body_drag_moves_both_edges() {
        let (mut m, mut w) = world(vec![CalendarEvent::new(1, 2160.0, 2220.0, "x")]);
        let press = Point::new(150.0, 500.0);
        m.dispatch(&mut w, &Event::press(press, "cal-ev-1-move")).unwrap();
        m.dispatch(&mut w, &Event::moved(Point::new(150.0, 540.0), "")).unwrap();
        let ev = w.model.event(1).unwrap();
        assert!((ev.start - 2220.0).abs() < 1e-9 && (ev.end - 2280.0).abs() < 1e-9);
        m.dispatch(&mut w, &Event::release(Point::new(150.0, 540.0), "")).unwrap();
        assert_eq!(m.current(), "idle");
        assert!(w.grab.is_none());
    }

    #[test]
    fn body_drag_into_next_column_changes_day() {
        let (mut m, mut w) = world(vec![CalendarEvent::new(1, 2160.0, 2220.0, "x")]);
        m.dispatch(&mut w, &Event::press(Point::new(150.0, 500.0), "cal-ev-1-move")).unwrap();
        m.dispatch(&mut w, &Event::moved(Point::new(250.0, 500.0), "")).unwrap();
        let ev = w.model.event(1).unwrap();
        assert!((ev.start - (2160.0 + DAY)).abs() < 1e-9);
    }

    #[test]
    fn end_handle_clamps_to_min_duration() {
        let (mut m, mut w) = world(vec![CalendarEvent::new(1, 2160.0, 2220.0, "x")]);
        m.dispatch(&mut w, &Event::press(Point::new(150.0, 518.0), "cal-ev-1-end")).unwrap();
        m.dispatch(&mut w, &Event::moved(Point::new(150.0, 400.0), "")).unwrap();
        let ev = w.model.event(1).unwrap();
        assert_eq!((ev.start, ev.end), (2160.0, 2175.0));
    }

    #[test]
    fn start_handle_moves_only_start() {
        let (mut m, mut w) = world(vec![CalendarEvent::new(1, 2160.0, 2220.0, "x")]);
        m.dispatch(&mut w, &Event::press(Point::new(150.0, 482.0), "cal-ev-1-start")).unwrap();
        m.dispatch(&mut w, &Event::moved(Point::new(150.0, 460.0), "")).unwrap();
        let ev = w.model.event(1).unwrap();
        let expect = invtransf(Point::new(150.0, 460.0), &view()).unwrap();
        assert_eq!((ev.start, ev.end), (expect, 2220.0));
        // past the end: pinned at end - 15
        m.dispatch(&mut w, &Event::moved(Point::new(150.0, 700.0), "")).unwrap();
        let ev = w.model.event(1).unwrap();
        assert_eq!((ev.start, ev.end), (2205.0, 2220.0));
    }

    #[test]
    fn snapping_rounds_to_step() {
        assert_eq!(snap(607.0, 15.0), 600.0);
        assert_eq!(snap(608.0, 15.0), 615.0);
        assert_eq!(snap(607.3, 0.0), 607.3);
    }

    #[test]
    fn wheel_zoom_keeps_cursor_time() {
        let mut w = CalendarWorld::new(Model::new(), view(), InteractionConfig::default());
        let p = Point::new(250.0, 300.0);
        let before = invtransf(p, &w.view).unwrap();
        w.wheel(p, -1.0);
        assert!((w.view.zoom - 1.1).abs() < 1e-12);
        let after = invtransf(p, &w.view).unwrap();
        assert!((before - after).abs() < 1e-9);
    }

    #[test]
    fn set_view_rejects_singular_zoom() {
        let mut w = CalendarWorld::new(Model::new(), view(), InteractionConfig::default());
        let bad = ViewUpdate {
            zoom: Some(0.0),
            ..Default::default()
        };
        assert!(w.set_view(&bad).is_err());
        assert_eq!(w.view.zoom, 1.0);
        assert!(transf(0.0, &w.view).is_ok());
    }
}
