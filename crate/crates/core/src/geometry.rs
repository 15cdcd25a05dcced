//! 2D primitives shared by every view: points, axis-aligned rectangles,
//! circles and affine maps.
//!
//! Screen coordinates are y-down with the origin at the top-left corner.
//! Rectangle containment is half-open (`[x, x + w)`) so that adjacent tiles
//! never claim the same pixel; circle containment is closed.

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Determinants at or below this magnitude are treated as singular.
pub const SINGULAR_EPS: f64 = 1e-12;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum GeometryError {
    #[error("singular transform (determinant {0:e})")]
    SingularTransform(f64),
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct Point {
    pub x: f64,
    pub y: f64,
}

impl Point {
    pub const ORIGIN: Point = Point { x: 0.0, y: 0.0 };

    pub const fn new(x: f64, y: f64) -> Self {
        Point { x, y }
    }

    pub fn is_finite(self) -> bool {
        self.x.is_finite() && self.y.is_finite()
    }

    pub fn distance(self, other: Point) -> f64 {
        (self.x - other.x).hypot(self.y - other.y)
    }

    pub fn distance_sq(self, other: Point) -> f64 {
        let dx = self.x - other.x;
        let dy = self.y - other.y;
        dx * dx + dy * dy
    }

    pub fn offset(self, dx: f64, dy: f64) -> Point {
        Point::new(self.x + dx, self.y + dy)
    }
}

impl std::ops::Sub for Point {
    type Output = Point;
    fn sub(self, rhs: Point) -> Point {
        Point::new(self.x - rhs.x, self.y - rhs.y)
    }
}

impl std::ops::Add for Point {
    type Output = Point;
    fn add(self, rhs: Point) -> Point {
        Point::new(self.x + rhs.x, self.y + rhs.y)
    }
}

/// Axis-aligned rectangle given by its top-left corner and extent.
#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct Rect {
    pub x: f64,
    pub y: f64,
    pub w: f64,
    pub h: f64,
}

impl Rect {
    /// Negative extents are clamped to zero.
    pub fn new(x: f64, y: f64, w: f64, h: f64) -> Self {
        Rect {
            x,
            y,
            w: w.max(0.0),
            h: h.max(0.0),
        }
    }

    pub fn from_edges(left: f64, top: f64, right: f64, bottom: f64) -> Self {
        Rect::new(left, top, right - left, bottom - top)
    }

    pub fn right(&self) -> f64 {
        self.x + self.w
    }

    pub fn bottom(&self) -> f64 {
        self.y + self.h
    }

    pub fn center(&self) -> Point {
        Point::new(self.x + self.w / 2.0, self.y + self.h / 2.0)
    }

    pub fn area(&self) -> f64 {
        self.w * self.h
    }

    pub fn is_empty(&self) -> bool {
        self.w <= 0.0 || self.h <= 0.0
    }

    pub fn contains(&self, p: Point) -> bool {
        self.x <= p.x && p.x < self.right() && self.y <= p.y && p.y < self.bottom()
    }

    /// Grows (or shrinks, for negative `d`) every side by `d`.
    pub fn inflate(&self, d: f64) -> Rect {
        Rect::new(self.x - d, self.y - d, self.w + 2.0 * d, self.h + 2.0 * d)
    }

    /// The maximal rectangle contained in both, or `None` when the overlap
    /// has zero area.
    pub fn intersection(&self, other: &Rect) -> Option<Rect> {
        let left = self.x.max(other.x);
        let top = self.y.max(other.y);
        let right = self.right().min(other.right());
        let bottom = self.bottom().min(other.bottom());
        if right > left && bottom > top {
            Some(Rect::from_edges(left, top, right, bottom))
        } else {
            None
        }
    }
}

/// Free-function form of [`Rect::intersection`].
pub fn rect_intersection(a: &Rect, b: &Rect) -> Option<Rect> {
    a.intersection(b)
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct Circle {
    pub cx: f64,
    pub cy: f64,
    pub r: f64,
}

impl Circle {
    pub fn new(cx: f64, cy: f64, r: f64) -> Self {
        Circle { cx, cy, r: r.max(0.0) }
    }

    pub fn center(&self) -> Point {
        Point::new(self.cx, self.cy)
    }

    pub fn contains(&self, p: Point) -> bool {
        self.center().distance_sq(p) <= self.r * self.r
    }

    pub fn bounds(&self) -> Rect {
        Rect::new(self.cx - self.r, self.cy - self.r, 2.0 * self.r, 2.0 * self.r)
    }
}

/// The shapes a picking object may take.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Shape {
    Rect(Rect),
    Circle(Circle),
}

impl Shape {
    pub fn contains(&self, p: Point) -> bool {
        match self {
            Shape::Rect(r) => r.contains(p),
            Shape::Circle(c) => c.contains(p),
        }
    }

    pub fn bounds(&self) -> Rect {
        match self {
            Shape::Rect(r) => *r,
            Shape::Circle(c) => c.bounds(),
        }
    }

    /// True when `p` lies within `tol` of the shape outline.
    pub fn near_boundary(&self, p: Point, tol: f64) -> bool {
        match self {
            Shape::Rect(r) => r.inflate(tol).contains(p) && !r.inflate(-tol).contains(p),
            Shape::Circle(c) => (c.center().distance(p) - c.r).abs() < tol,
        }
    }
}

impl From<Rect> for Shape {
    fn from(r: Rect) -> Self {
        Shape::Rect(r)
    }
}

impl From<Circle> for Shape {
    fn from(c: Circle) -> Self {
        Shape::Circle(c)
    }
}

/// Analytical containment test; the reference that picking is checked against.
pub fn contains(shape: &Shape, p: Point) -> bool {
    shape.contains(p)
}

/// Row-major 2×3 affine map: `x' = a·x + b·y + e`, `y' = c·x + d·y + f`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Affine2 {
    pub a: f64,
    pub b: f64,
    pub c: f64,
    pub d: f64,
    pub e: f64,
    pub f: f64,
}

impl Default for Affine2 {
    fn default() -> Self {
        Affine2::IDENTITY
    }
}

impl Affine2 {
    pub const IDENTITY: Affine2 = Affine2 {
        a: 1.0,
        b: 0.0,
        c: 0.0,
        d: 1.0,
        e: 0.0,
        f: 0.0,
    };

    pub const fn new(a: f64, b: f64, c: f64, d: f64, e: f64, f: f64) -> Self {
        Affine2 { a, b, c, d, e, f }
    }

    pub fn translate(tx: f64, ty: f64) -> Self {
        Affine2::new(1.0, 0.0, 0.0, 1.0, tx, ty)
    }

    pub fn scale(sx: f64, sy: f64) -> Self {
        Affine2::new(sx, 0.0, 0.0, sy, 0.0, 0.0)
    }

    /// Counter-clockwise in y-up terms; clockwise on a y-down screen.
    pub fn rotate(theta: f64) -> Self {
        let (s, c) = theta.sin_cos();
        Affine2::new(c, -s, s, c, 0.0, 0.0)
    }

    pub fn rotate_about(theta: f64, center: Point) -> Self {
        Affine2::translate(center.x, center.y)
            .then_after(&Affine2::rotate(theta))
            .then_after(&Affine2::translate(-center.x, -center.y))
    }

    pub fn determinant(&self) -> f64 {
        self.a * self.d - self.b * self.c
    }

    pub fn apply(&self, p: Point) -> Point {
        Point::new(
            self.a * p.x + self.b * p.y + self.e,
            self.c * p.x + self.d * p.y + self.f,
        )
    }

    /// `self ∘ inner`: applies `inner` first, then `self`.
    pub fn then_after(&self, inner: &Affine2) -> Affine2 {
        Affine2::new(
            self.a * inner.a + self.b * inner.c,
            self.a * inner.b + self.b * inner.d,
            self.c * inner.a + self.d * inner.c,
            self.c * inner.b + self.d * inner.d,
            self.a * inner.e + self.b * inner.f + self.e,
            self.c * inner.e + self.d * inner.f + self.f,
        )
    }

    /// Applies `self` first, then `outer`.
    pub fn then(&self, outer: &Affine2) -> Affine2 {
        outer.then_after(self)
    }

    pub fn invert(&self) -> Result<Affine2, GeometryError> {
        let det = self.determinant();
        if !det.is_finite() || det.abs() <= SINGULAR_EPS {
            return Err(GeometryError::SingularTransform(det));
        }
        let inv = 1.0 / det;
        let a = self.d * inv;
        let b = -self.b * inv;
        let c = -self.c * inv;
        let d = self.a * inv;
        Ok(Affine2::new(
            a,
            b,
            c,
            d,
            -(a * self.e + b * self.f),
            -(c * self.e + d * self.f),
        ))
    }

    pub fn is_identity(&self) -> bool {
        *self == Affine2::IDENTITY
    }

    pub fn approx_eq(&self, other: &Affine2, eps: f64) -> bool {
        self.to_array()
            .iter()
            .zip(other.to_array().iter())
            .all(|(x, y)| (x - y).abs() <= eps)
    }

    /// `[a, b, c, d, e, f]`, the layout used by serialized draw commands.
    pub fn to_array(&self) -> [f64; 6] {
        [self.a, self.b, self.c, self.d, self.e, self.f]
    }
}

/// Free-function form of [`Affine2::invert`].
pub fn affine_invert(m: &Affine2) -> Result<Affine2, GeometryError> {
    m.invert()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn circle_contains_examples() {
        assert!(Circle::new(0.0, 0.0, 5.0).contains(Point::new(0.0, 0.0)));
        assert!(!Circle::new(100.0, 100.0, 5.0).contains(Point::new(100.0, 106.0)));
        assert!(Circle::new(100.0, 100.0, 5.0).contains(Point::new(100.0, 105.0)));
    }

    #[test]
    fn rect_is_half_open() {
        let r = Rect::new(0.0, 0.0, 10.0, 10.0);
        assert!(!r.contains(Point::new(10.0, 5.0)));
        assert!(!r.contains(Point::new(5.0, 10.0)));
        assert!(r.contains(Point::new(0.0, 0.0)));
        assert!(r.contains(Point::new(9.999, 9.999)));
    }

    #[test]
    fn negative_extent_is_clamped() {
        let r = Rect::new(5.0, 5.0, -3.0, 2.0);
        assert_eq!(r.w, 0.0);
        assert!(r.is_empty());
    }

    #[test]
    fn intersection_examples() {
        let a = Rect::new(0.0, 0.0, 10.0, 10.0);
        assert_eq!(rect_intersection(&a, &a), Some(a));

        let band_h = Rect::new(0.0, 190.0, 500.0, 20.0);
        let band_v = Rect::new(240.0, 0.0, 20.0, 400.0);
        assert_eq!(
            rect_intersection(&band_h, &band_v),
            Some(Rect::new(240.0, 190.0, 20.0, 20.0))
        );

        let far = Rect::new(20.0, 20.0, 5.0, 5.0);
        assert_eq!(rect_intersection(&a, &far), None);
        // touching edges have zero-area overlap
        let touching = Rect::new(10.0, 0.0, 5.0, 10.0);
        assert_eq!(rect_intersection(&a, &touching), None);
    }

    #[test]
    fn invert_examples() {
        assert_eq!(Affine2::IDENTITY.invert().unwrap(), Affine2::IDENTITY);
        assert_eq!(
            Affine2::scale(2.0, 2.0).invert().unwrap(),
            Affine2::scale(0.5, 0.5)
        );
        assert!(matches!(
            Affine2::scale(0.0, 1.0).invert(),
            Err(GeometryError::SingularTransform(_))
        ));
        assert!(Affine2::new(1.0, 2.0, 2.0, 4.0, 0.0, 0.0).invert().is_err());
    }

    #[test]
    fn composition_order() {
        // scale first, then translate
        let m = Affine2::scale(2.0, 2.0).then(&Affine2::translate(5.0, 5.0));
        assert_eq!(m.apply(Point::new(1.0, 1.0)), Point::new(7.0, 7.0));
    }

    #[test]
    fn rotate_about_fixes_center() {
        let c = Point::new(30.0, -4.0);
        let m = Affine2::rotate_about(1.1, c);
        let q = m.apply(c);
        assert!((q.x - c.x).abs() < 1e-12 && (q.y - c.y).abs() < 1e-12);
    }

    #[test]
    fn near_boundary_band() {
        let r = Shape::Rect(Rect::new(0.0, 0.0, 10.0, 10.0));
        assert!(r.near_boundary(Point::new(0.5, 5.0), 1.0));
        assert!(r.near_boundary(Point::new(-0.5, 5.0), 1.0));
        assert!(!r.near_boundary(Point::new(5.0, 5.0), 1.0));
        let c = Shape::Circle(Circle::new(0.0, 0.0, 5.0));
        assert!(c.near_boundary(Point::new(5.5, 0.0), 1.0));
        assert!(!c.near_boundary(Point::new(2.0, 0.0), 1.0));
    }
}
