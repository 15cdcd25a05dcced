//! Pick-by-color picking views.
//!
//! Every picking object is drawn with a flat, unique 24-bit color into an
//! offscreen buffer; a pointer query reads the pixel under the cursor.
//! Enter/Leave events are derived from consecutive query results.

use std::collections::{HashMap, HashSet};
use std::io::{self, Read, Write};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::geometry::{Point, Shape};

/// Largest encodable id (24 bits).
pub const MAX_ID: u32 = (1 << 24) - 1;

/// Id read from pixels no object covers.
pub const BACKGROUND: u32 = 0;

#[derive(Debug, Error)]
pub enum PickError {
    #[error("id {0} does not fit in 24 bits")]
    IdOverflow(u32),
    #[error("id {0} is used by more than one picking object")]
    DuplicateId(u32),
    #[error("id 0 is reserved for the background")]
    ReservedId,
    #[error("malformed PPM: {0}")]
    BadPpm(String),
    #[error(transparent)]
    Io(#[from] io::Error),
}

pub type Rgb = [u8; 3];

pub fn encode_id(id: u32) -> Result<Rgb, PickError> {
    if id > MAX_ID {
        return Err(PickError::IdOverflow(id));
    }
    Ok([(id >> 16 & 0xff) as u8, (id >> 8 & 0xff) as u8, (id & 0xff) as u8])
}

pub fn decode_id(rgb: Rgb) -> u32 {
    (rgb[0] as u32) << 16 | (rgb[1] as u32) << 8 | rgb[2] as u32
}

/// An invisible (usually) shape reifying a spatial mode of interaction.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PickObject {
    pub id: u32,
    pub shape: Shape,
    pub z: i32,
    pub tag: String,
    #[serde(default)]
    pub visible: bool,
}

impl PickObject {
    pub fn new(id: u32, shape: impl Into<Shape>, z: i32, tag: impl Into<String>) -> Self {
        PickObject {
            id,
            shape: shape.into(),
            z,
            tag: tag.into(),
            visible: false,
        }
    }
}

/// Indices of `objects` in paint order: ascending z, list order within a z.
fn paint_order(objects: &[PickObject]) -> Vec<usize> {
    let mut order: Vec<usize> = (0..objects.len()).collect();
    order.sort_by_key(|&i| objects[i].z);
    order
}

/// Analytical topmost containment over the same ordering rule as
/// [`rasterize`]: highest z wins, later in the list wins ties.
pub fn topmost_at(objects: &[PickObject], p: Point) -> u32 {
    paint_order(objects)
        .into_iter()
        .rev()
        .find(|&i| objects[i].shape.contains(p))
        .map_or(BACKGROUND, |i| objects[i].id)
}

/// Row-major buffer of object ids.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PickBuffer {
    width: u32,
    height: u32,
    pixels: Vec<u32>,
}

impl PickBuffer {
    pub fn new(width: u32, height: u32) -> Self {
        PickBuffer {
            width,
            height,
            pixels: vec![BACKGROUND; width as usize * height as usize],
        }
    }

    pub fn width(&self) -> u32 {
        self.width
    }

    pub fn height(&self) -> u32 {
        self.height
    }

    pub fn pixels(&self) -> &[u32] {
        &self.pixels
    }

    pub fn get(&self, x: u32, y: u32) -> u32 {
        self.pixels[y as usize * self.width as usize + x as usize]
    }

    /// Id at the pixel containing `p`; background outside the buffer.
    pub fn pick(&self, p: Point) -> u32 {
        if !p.is_finite() {
            return BACKGROUND;
        }
        let (fx, fy) = (p.x.floor(), p.y.floor());
        if fx < 0.0 || fy < 0.0 || fx >= self.width as f64 || fy >= self.height as f64 {
            return BACKGROUND;
        }
        self.get(fx as u32, fy as u32)
    }

    fn fill_span(&mut self, id: u32, shape: &Shape) {
        let b = shape.bounds();
        let (w, h) = (self.width as i64, self.height as i64);
        // pixels whose centers can fall inside the bounds
        let x0 = ((b.x - 0.5).floor() as i64).clamp(0, w);
        let x1 = ((b.right() + 0.5).ceil() as i64).clamp(0, w);
        let y0 = ((b.y - 0.5).floor() as i64).clamp(0, h);
        let y1 = ((b.bottom() + 0.5).ceil() as i64).clamp(0, h);
        if let Shape::Rect(r) = shape {
            // containment is separable: find the covered columns and rows
            // with the same predicate, then fill row slices
            let center = |v: i64| v as f64 + 0.5;
            let cols: Vec<i64> = (x0..x1).filter(|&px| r.x <= center(px) && center(px) < r.right()).collect();
            let (Some(&c0), Some(&c1)) = (cols.first(), cols.last()) else {
                return;
            };
            for py in (y0..y1).filter(|&py| r.y <= center(py) && center(py) < r.bottom()) {
                let row = py as usize * self.width as usize;
                self.pixels[row + c0 as usize..=row + c1 as usize].fill(id);
            }
            return;
        }
        for py in y0..y1 {
            let row = py as usize * self.width as usize;
            for px in x0..x1 {
                let center = Point::new(px as f64 + 0.5, py as f64 + 0.5);
                if shape.contains(center) {
                    self.pixels[row + px as usize] = id;
                }
            }
        }
        // a circle smaller than a pixel still owns the pixel holding its center
        if let Shape::Circle(c) = shape {
            let (px, py) = (c.cx.floor(), c.cy.floor());
            if c.r < 1.0 && px >= 0.0 && py >= 0.0 && px < w as f64 && py < h as f64 {
                self.pixels[py as usize * self.width as usize + px as usize] = id;
            }
        }
    }

    /// Binary PPM (P6, maxval 255), one encoded id per pixel.
    pub fn write_ppm<W: Write>(&self, mut out: W) -> Result<(), PickError> {
        write!(out, "P6\n{} {}\n255\n", self.width, self.height)?;
        let mut bytes = Vec::with_capacity(self.pixels.len() * 3);
        for &id in &self.pixels {
            bytes.extend_from_slice(&encode_id(id)?);
        }
        out.write_all(&bytes)?;
        Ok(())
    }

    pub fn to_ppm(&self) -> Vec<u8> {
        let mut v = Vec::new();
        self.write_ppm(&mut v).expect("ids in a rasterized buffer fit 24 bits");
        v
    }

    pub fn read_ppm<R: Read>(mut input: R) -> Result<PickBuffer, PickError> {
        let mut data = Vec::new();
        input.read_to_end(&mut data)?;
        let bad = |m: &str| PickError::BadPpm(m.to_string());
        let mut fields = Vec::new();
        let mut pos = 0;
        while fields.len() < 4 {
            while pos < data.len() && data[pos].is_ascii_whitespace() {
                pos += 1;
            }
            if pos < data.len() && data[pos] == b'#' {
                while pos < data.len() && data[pos] != b'\n' {
                    pos += 1;
                }
                continue;
            }
            let start = pos;
            while pos < data.len() && !data[pos].is_ascii_whitespace() {
                pos += 1;
            }
            if start == pos {
                return Err(bad("truncated header"));
            }
            fields.push(String::from_utf8_lossy(&data[start..pos]).into_owned());
        }
        // exactly one whitespace byte separates the header from the raster
        pos += 1;
        if fields[0] != "P6" {
            return Err(bad("not a P6 file"));
        }
        let parse = |s: &str| s.parse::<u32>().map_err(|_| bad("bad header number"));
        let (width, height, maxval) = (parse(&fields[1])?, parse(&fields[2])?, parse(&fields[3])?);
        if maxval != 255 {
            return Err(bad("maxval must be 255"));
        }
        let n = width as usize * height as usize;
        let raster = data.get(pos..).ok_or_else(|| bad("missing raster"))?;
        if raster.len() != n * 3 {
            return Err(bad("raster size mismatch"));
        }
        let pixels = raster
            .chunks_exact(3)
            .map(|c| decode_id([c[0], c[1], c[2]]))
            .collect();
        Ok(PickBuffer {
            width,
            height,
            pixels,
        })
    }

    pub fn distinct_ids(&self) -> HashSet<u32> {
        self.pixels.iter().copied().collect()
    }
}

/// Renders the picking view. Each pixel gets the id of the highest-z object
/// containing the pixel center; ties go to the object later in the list.
pub fn rasterize(objects: &[PickObject], width: u32, height: u32) -> Result<PickBuffer, PickError> {
    let mut seen = HashSet::with_capacity(objects.len());
    for o in objects {
        if o.id == BACKGROUND {
            return Err(PickError::ReservedId);
        }
        if o.id > MAX_ID {
            return Err(PickError::IdOverflow(o.id));
        }
        if !seen.insert(o.id) {
            return Err(PickError::DuplicateId(o.id));
        }
    }
    let mut buf = PickBuffer::new(width, height);
    for i in paint_order(objects) {
        buf.fill_span(objects[i].id, &objects[i].shape);
    }
    Ok(buf)
}

pub fn pick(buf: &PickBuffer, p: Point) -> u32 {
    buf.pick(p)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Crossing {
    Leave(u32),
    Enter(u32),
}

/// Crossing events between two consecutive pick results, Leave first.
pub fn synthesize_crossings(prev_id: u32, new_id: u32) -> Vec<Crossing> {
    if prev_id == new_id {
        return Vec::new();
    }
    let mut out = Vec::with_capacity(2);
    if prev_id != BACKGROUND {
        out.push(Crossing::Leave(prev_id));
    }
    if new_id != BACKGROUND {
        out.push(Crossing::Enter(new_id));
    }
    out
}

/// Interns picking-object tags to ids that stay stable across frames, so a
/// crossing compares the same logical object even when the picking view is
/// rebuilt from scratch.
#[derive(Clone, Debug, Default)]
pub struct PickRegistry {
    ids: HashMap<String, u32>,
    tags: Vec<String>,
}

impl PickRegistry {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn intern(&mut self, tag: &str) -> Result<u32, PickError> {
        if let Some(&id) = self.ids.get(tag) {
            return Ok(id);
        }
        let id = self.tags.len() as u32 + 1;
        if id > MAX_ID {
            return Err(PickError::IdOverflow(id));
        }
        self.ids.insert(tag.to_string(), id);
        self.tags.push(tag.to_string());
        Ok(id)
    }

    /// Replaces every object's id with the interned id of its tag.
    pub fn stabilize(&mut self, objects: &mut [PickObject]) -> Result<(), PickError> {
        for o in objects.iter_mut() {
            o.id = self.intern(&o.tag)?;
        }
        Ok(())
    }

    pub fn tag(&self, id: u32) -> Option<&str> {
        if id == BACKGROUND {
            return None;
        }
        self.tags.get(id as usize - 1).map(String::as_str)
    }
}

/// Assigns ids `1..=n` in list order. Builders use this so their output is
/// valid on its own; a [`PickRegistry`] may re-key it later.
pub fn number_sequentially(objects: &mut [PickObject]) {
    for (i, o) in objects.iter_mut().enumerate() {
        o.id = i as u32 + 1;
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{Circle, Rect};

    #[test]
    fn encode_examples() {
        assert_eq!(encode_id(0).unwrap(), [0, 0, 0]);
        assert_eq!(encode_id(1).unwrap(), [0, 0, 1]);
        assert_eq!(encode_id(0x123456).unwrap(), [0x12, 0x34, 0x56]);
        assert_eq!(decode_id([0x12, 0x34, 0x56]), 0x123456);
        assert!(matches!(encode_id(1 << 24), Err(PickError::IdOverflow(_))));
        assert_eq!(encode_id(MAX_ID).unwrap(), [255, 255, 255]);
    }

    #[test]
    fn empty_scene_is_background() {
        let buf = rasterize(&[], 4, 4).unwrap();
        assert!(buf.pixels().iter().all(|&p| p == 0));
        assert_eq!(buf.pick(Point::new(1.5, 2.5)), 0);
    }

    #[test]
    fn single_rect_covers_pixel_centers() {
        let objs = [PickObject::new(7, Rect::new(0.0, 0.0, 2.0, 2.0), 0, "r")];
        let buf = rasterize(&objs, 4, 4).unwrap();
        for y in 0..4 {
            for x in 0..4 {
                let expect = if x < 2 && y < 2 { 7 } else { 0 };
                assert_eq!(buf.get(x, y), expect, "pixel ({x},{y})");
            }
        }
        assert_eq!(buf.pick(Point::new(1.0, 1.0)), 7);
    }

    #[test]
    fn higher_z_wins_then_list_order() {
        let objs = [
            PickObject::new(1, Rect::new(0.0, 0.0, 4.0, 4.0), 5, "top"),
            PickObject::new(2, Rect::new(0.0, 0.0, 4.0, 4.0), 0, "bottom"),
        ];
        let buf = rasterize(&objs, 4, 4).unwrap();
        assert_eq!(buf.get(2, 2), 1);

        let tie = [
            PickObject::new(1, Rect::new(0.0, 0.0, 4.0, 4.0), 0, "first"),
            PickObject::new(2, Rect::new(2.0, 2.0, 2.0, 2.0), 0, "second"),
        ];
        let buf = rasterize(&tie, 4, 4).unwrap();
        assert_eq!(buf.get(3, 3), 2);
        assert_eq!(buf.get(0, 0), 1);
    }

    #[test]
    fn duplicate_and_reserved_ids_rejected() {
        let r = Rect::new(0.0, 0.0, 1.0, 1.0);
        let dup = [PickObject::new(3, r, 0, "a"), PickObject::new(3, r, 0, "b")];
        assert!(matches!(rasterize(&dup, 2, 2), Err(PickError::DuplicateId(3))));
        assert!(matches!(
            rasterize(&[PickObject::new(0, r, 0, "z")], 2, 2),
            Err(PickError::ReservedId)
        ));
    }

    #[test]
    fn pick_outside_is_background() {
        let objs = [PickObject::new(9, Rect::new(0.0, 0.0, 4.0, 4.0), 0, "all")];
        let buf = rasterize(&objs, 4, 4).unwrap();
        assert_eq!(buf.pick(Point::new(-5.0, -5.0)), 0);
        assert_eq!(buf.pick(Point::new(4.0, 1.0)), 0);
        assert_eq!(buf.pick(Point::new(f64::NAN, 1.0)), 0);
        assert_eq!(buf.pick(Point::new(2.0, 2.0)), 9);
    }

    #[test]
    fn zero_radius_circle_owns_its_pixel() {
        let objs = [PickObject::new(4, Circle::new(10.0, 10.0, 0.0), 0, "hyst")];
        let buf = rasterize(&objs, 20, 20).unwrap();
        assert_eq!(buf.get(10, 10), 4);
        assert_eq!(buf.distinct_ids().len(), 2);
        assert_eq!(buf.pick(Point::new(11.0, 10.0)), 0);
    }

    #[test]
    fn crossing_examples() {
        assert!(synthesize_crossings(5, 5).is_empty());
        assert_eq!(
            synthesize_crossings(5, 9),
            vec![Crossing::Leave(5), Crossing::Enter(9)]
        );
        assert_eq!(synthesize_crossings(0, 9), vec![Crossing::Enter(9)]);
        assert_eq!(synthesize_crossings(9, 0), vec![Crossing::Leave(9)]);
    }

    #[test]
    fn ppm_roundtrip_and_header() {
        let objs = [
            PickObject::new(0x123456, Rect::new(0.0, 0.0, 2.0, 1.0), 0, "a"),
            PickObject::new(1, Circle::new(2.5, 1.5, 0.6), 1, "b"),
        ];
        let buf = rasterize(&objs, 3, 2).unwrap();
        let bytes = buf.to_ppm();
        assert!(bytes.starts_with(b"P6\n3 2\n255\n"));
        assert_eq!(bytes.len(), 11 + 3 * 2 * 3);
        assert_eq!(&bytes[11..14], &[0x12, 0x34, 0x56]);
        assert_eq!(PickBuffer::read_ppm(&bytes[..]).unwrap(), buf);
        assert!(PickBuffer::read_ppm(&b"P3\n1 1\n255\n000"[..]).is_err());
    }

    #[test]
    fn registry_ids_are_stable() {
        let mut reg = PickRegistry::new();
        let a = reg.intern("thumb").unwrap();
        let b = reg.intern("trough-above").unwrap();
        assert_ne!(a, b);
        assert_eq!(reg.intern("thumb").unwrap(), a);
        assert_eq!(reg.tag(b), Some("trough-above"));
        assert_eq!(reg.tag(0), None);

        let mut objs = vec![PickObject::new(1, Rect::new(0.0, 0.0, 1.0, 1.0), 0, "trough-above")];
        reg.stabilize(&mut objs).unwrap();
        assert_eq!(objs[0].id, b);
    }

    #[test]
    fn topmost_matches_raster_order() {
        let objs = [
            PickObject::new(1, Rect::new(0.0, 0.0, 10.0, 10.0), 1, "a"),
            PickObject::new(2, Rect::new(0.0, 0.0, 10.0, 10.0), 0, "b"),
        ];
        assert_eq!(topmost_at(&objs, Point::new(5.0, 5.0)), 1);
        assert_eq!(topmost_at(&objs, Point::new(50.0, 5.0)), 0);
    }
}
