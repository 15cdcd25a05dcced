//! Seeded random traces.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::geometry::Point;
use crate::interactions::calendar::{day_segments, segment_rects};
use crate::interactions::scrollbar::default_trough;
use crate::interactions::InteractionKind;
use crate::model::Model;
use crate::transforms::ViewParams;

use super::trace::{number, Input, TraceRecord};

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Integer coordinates plus one half land on pixel centers.
fn pixel_center(p: Point) -> Point {
    Point::new(p.x.floor() + 0.5, p.y.floor() + 0.5)
}

/// A press at `press` followed by `1..=max_moves` moves scattered up to
/// `2r` around it, then a release. With `wander`, a drag that escapes the
/// circle comes back inside it before the release.
pub fn hysteresis_inputs(rng: &mut impl Rng, press: Point, r: f64, max_moves: usize, wander: bool) -> Vec<Input> {
    let mut out = vec![Input::press(press)];
    let n = rng.gen_range(1..=max_moves);
    for _ in 0..n {
        let d = rng.gen_range(0.0..2.0 * r);
        let a = rng.gen_range(0.0..std::f64::consts::TAU);
        out.push(Input::moved(press.offset(d * a.cos(), d * a.sin())));
    }
    if wander {
        let d = rng.gen_range(0.0..r * 0.5);
        let a = rng.gen_range(0.0..std::f64::consts::TAU);
        out.push(Input::moved(press.offset(d * a.cos(), d * a.sin())));
    }
    let last = out.last().and_then(Input::point).unwrap_or(press);
    out.push(Input::release(last));
    out
}

/// A drag of one object: press inside it, `n` moves across the window,
/// release.
pub fn drag_inputs(rng: &mut impl Rng, model: &Model, window: (f64, f64), n: usize) -> Vec<Input> {
    let Some(obj) = model.objects.get(rng.gen_range(0..model.objects.len().max(1))) else {
        return Vec::new();
    };
    let r = obj.rect();
    let press = pixel_center(Point::new(
        rng.gen_range(r.x + 1.0..r.right() - 1.0),
        rng.gen_range(r.y + 1.0..r.bottom() - 1.0),
    ));
    let mut out = vec![Input::press(press)];
    for _ in 0..n {
        out.push(Input::moved(pixel_center(Point::new(
            rng.gen_range(0.0..window.0),
            rng.gen_range(0.0..window.1),
        ))));
    }
    let last = out.last().and_then(Input::point).unwrap_or(press);
    out.push(Input::release(last));
    out
}

/// Press on a random part of a visible calendar event, move, release.
pub fn calendar_inputs(rng: &mut impl Rng, model: &Model, view: &ViewParams, n: usize) -> Vec<Input> {
    let rects = segment_rects(&day_segments(&model.events, view), view);
    let mut out = Vec::new();
    if let Some((_, rect)) = rects.get(rng.gen_range(0..rects.len().max(1))) {
        let press = view.layout_to_screen().apply(Point::new(
            rng.gen_range(rect.x..rect.right()),
            rng.gen_range(rect.y..rect.bottom()),
        ));
        out.push(Input::press(press));
        let mut p = press;
        for _ in 0..n {
            p = p.offset(rng.gen_range(-40.0..40.0), rng.gen_range(-60.0..60.0));
            p = Point::new(p.x.clamp(0.0, view.window_w - 1.0), p.y.clamp(0.0, view.window_h - 1.0));
            out.push(Input::moved(p));
        }
        out.push(Input::release(p));
    }
    out
}

/// Arbitrary pointer activity over the scrollbar area: presses, moves,
/// releases and wheel notches, possibly outside the trough.
pub fn scrollbar_inputs(rng: &mut impl Rng, n: usize) -> Vec<Input> {
    let t = default_trough();
    let mut out = Vec::with_capacity(n);
    for _ in 0..n {
        let p = Point::new(
            rng.gen_range(t.x - 10.0..t.right() + 10.0),
            rng.gen_range(t.y - 50.0..t.bottom() + 50.0),
        );
        out.push(match rng.gen_range(0..10) {
            0..=1 => Input::press(p),
            2..=7 => Input::moved(p),
            8 => Input::release(p),
            _ => Input::Wheel {
                x: p.x,
                y: p.y,
                delta: rng.gen_range(-3..=3) as f64,
            },
        });
    }
    out
}

/// A random trace suited to `kind` and its model.
pub fn random_trace(kind: InteractionKind, model: &Model, seed: u64) -> Vec<TraceRecord> {
    let mut r = rng(seed);
    let inputs = match kind {
        InteractionKind::Scrollbar => scrollbar_inputs(&mut r, 40),
        InteractionKind::Dnd | InteractionKind::Guides => {
            let mut v = Vec::new();
            for _ in 0..3 {
                if r.gen_bool(0.3) {
                    if let Some(o) = model.objects.first() {
                        v.extend(hysteresis_inputs(&mut r, Point::new(o.x, o.y), 5.0, 6, false));
                        continue;
                    }
                }
                v.extend(drag_inputs(&mut r, model, (500.0, 400.0), 8));
            }
            v
        }
        InteractionKind::Calendar => {
            let view = ViewParams::default();
            let mut v = Vec::new();
            for _ in 0..3 {
                v.extend(calendar_inputs(&mut r, model, &view, 6));
            }
            v
        }
    };
    number(inputs)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::interactions::{calendar, dnd};

    #[test]
    fn same_seed_same_trace() {
        for kind in InteractionKind::ALL {
            let model = match kind {
                InteractionKind::Calendar => calendar::demo_model(),
                _ => dnd::demo_model(),
            };
            assert_eq!(random_trace(kind, &model, 3), random_trace(kind, &model, 3));
            assert!(!random_trace(kind, &model, 3).is_empty());
        }
    }

    #[test]
    fn hysteresis_inputs_shape() {
        let mut r = rng(1);
        let t = hysteresis_inputs(&mut r, Point::new(50.0, 50.0), 5.0, 4, true);
        assert!(matches!(t[0], Input::Press { .. }));
        assert!(matches!(t.last().unwrap(), Input::Release { .. }));
        assert!(t.len() >= 4);
    }
}
