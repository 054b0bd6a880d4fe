//! Axis-parallel primitives: rectangles with open/closed semantics,
//! rectilinear polygons, alignment predicates, and rectangle tilings of
//! polygons and polygon complements.

use crate::cells::{self, Arrangement, TraceError};
use serde::{Deserialize, Serialize};
use std::collections::BTreeSet;
use thiserror::Error;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Point {
    pub x: i64,
    pub y: i64,
}

impl Point {
    pub fn new(x: i64, y: i64) -> Self {
        Point { x, y }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub enum Openness {
    #[default]
    Open,
    Closed,
}

/// Axis-parallel rectangle with corners `(x1, y1)` and `(x2, y2)`, `x1 < x2`,
/// `y1 < y2`. Input rectangles are open point sets, fake rectangles and cells
/// are closed; the flag participates in intersection tests only and is not
/// serialized.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Rect {
    pub x1: i64,
    pub y1: i64,
    pub x2: i64,
    pub y2: i64,
    #[serde(skip)]
    pub openness: Openness,
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum GeometryError {
    #[error("rectangle ({0}, {1})-({2}, {3}) has no area")]
    EmptyRect(i64, i64, i64, i64),
    #[error("polygon is malformed: {0}")]
    BadPolygon(String),
    #[error("polygon is not contained in the bounding rectangle")]
    NotContained,
    #[error("region decomposition failed: {0}")]
    Trace(#[from] TraceError),
}

impl Rect {
    pub fn new(x1: i64, y1: i64, x2: i64, y2: i64, openness: Openness) -> Result<Self, GeometryError> {
        if x1 >= x2 || y1 >= y2 {
            return Err(GeometryError::EmptyRect(x1, y1, x2, y2));
        }
        Ok(Rect { x1, y1, x2, y2, openness })
    }

    pub fn open(x1: i64, y1: i64, x2: i64, y2: i64) -> Result<Self, GeometryError> {
        Rect::new(x1, y1, x2, y2, Openness::Open)
    }

    pub fn closed(x1: i64, y1: i64, x2: i64, y2: i64) -> Result<Self, GeometryError> {
        Rect::new(x1, y1, x2, y2, Openness::Closed)
    }

    pub fn as_open(mut self) -> Rect {
        self.openness = Openness::Open;
        self
    }

    pub fn as_closed(mut self) -> Rect {
        self.openness = Openness::Closed;
        self
    }

    pub fn width(&self) -> i64 {
        self.x2 - self.x1
    }

    pub fn height(&self) -> i64 {
        self.y2 - self.y1
    }

    pub fn area(&self) -> i64 {
        self.width() * self.height()
    }

    pub fn corners(&self) -> [Point; 4] {
        [
            Point::new(self.x1, self.y1),
            Point::new(self.x2, self.y1),
            Point::new(self.x2, self.y2),
            Point::new(self.x1, self.y2),
        ]
    }

    /// Coordinate-wise containment (`other` inside `self`); for open-in-closed
    /// and closed-in-closed alike this is the correct point-set test.
    pub fn contains_rect(&self, other: &Rect) -> bool {
        self.x1 <= other.x1 && other.x2 <= self.x2 && self.y1 <= other.y1 && other.y2 <= self.y2
    }

    /// True iff the closed rectangle contains the point.
    pub fn contains_point(&self, p: Point) -> bool {
        self.x1 <= p.x && p.x <= self.x2 && self.y1 <= p.y && p.y <= self.y2
    }

    pub fn coords_key(&self) -> (i64, i64, i64, i64) {
        (self.x1, self.y1, self.x2, self.y2)
    }
}

fn interval_shares_point(a1: i64, a2: i64, oa: Openness, b1: i64, b2: i64, ob: Openness) -> bool {
    let lo = a1.max(b1);
    let hi = a2.min(b2);
    if lo < hi {
        return true;
    }
    if lo > hi {
        return false;
    }
    let p = lo;
    let in_a = oa == Openness::Closed || (a1 < p && p < a2);
    let in_b = ob == Openness::Closed || (b1 < p && p < b2);
    in_a && in_b
}

/// True iff the two rectangles share a point, honoring each rectangle's
/// open/closed flag. Open rectangles touching only along boundaries do not
/// intersect.
pub fn intersects(a: &Rect, b: &Rect) -> bool {
    interval_shares_point(a.x1, a.x2, a.openness, b.x1, b.x2, b.openness)
        && interval_shares_point(a.y1, a.y2, a.openness, b.y1, b.y2, b.openness)
}

/// Point set for alignment tests: a point is aligned when its x appears among
/// `xs` and its y among `ys`.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct AlignmentPointSet {
    pub xs: BTreeSet<i64>,
    pub ys: BTreeSet<i64>,
}

impl AlignmentPointSet {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn from_points(points: impl IntoIterator<Item = Point>) -> Self {
        let mut z = Self::new();
        for p in points {
            z.xs.insert(p.x);
            z.ys.insert(p.y);
        }
        z
    }

    pub fn from_lines(xs: impl IntoIterator<Item = i64>, ys: impl IntoIterator<Item = i64>) -> Self {
        AlignmentPointSet { xs: xs.into_iter().collect(), ys: ys.into_iter().collect() }
    }

    pub fn insert_rect(&mut self, r: &Rect) {
        self.xs.insert(r.x1);
        self.xs.insert(r.x2);
        self.ys.insert(r.y1);
        self.ys.insert(r.y2);
    }

    pub fn from_rects<'a>(rects: impl IntoIterator<Item = &'a Rect>) -> Self {
        let mut z = Self::new();
        for r in rects {
            z.insert_rect(r);
        }
        z
    }

    pub fn contains_point(&self, p: Point) -> bool {
        self.xs.contains(&p.x) && self.ys.contains(&p.y)
    }

    pub fn is_rect_aligned(&self, r: &Rect) -> bool {
        r.corners().iter().all(|c| self.contains_point(*c))
    }

    pub fn is_polygon_aligned(&self, p: &RectilinearPolygon) -> bool {
        p.corners().iter().all(|c| self.contains_point(*c))
    }
}

/// Simple closed rectilinear polygon, stored as its corner cycle in
/// counter-clockwise order. Edges alternate horizontal/vertical and the
/// boundary does not self-intersect.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RectilinearPolygon {
    corners: Vec<Point>,
}

impl RectilinearPolygon {
    pub fn new(corners: Vec<Point>) -> Result<Self, GeometryError> {
        let p = RectilinearPolygon { corners };
        p.validate()?;
        Ok(p.oriented_ccw())
    }

    /// Builds a polygon from a closed walk, dropping collinear intermediate
    /// points first.
    pub fn from_walk(walk: &[Point]) -> Result<Self, GeometryError> {
        let mut pts: Vec<Point> = Vec::with_capacity(walk.len());
        for p in walk {
            if pts.last() == Some(p) {
                continue;
            }
            pts.push(*p);
        }
        while pts.len() > 1 && pts.first() == pts.last() {
            pts.pop();
        }
        // Remove collinear middles, including across the wrap-around.
        loop {
            let n = pts.len();
            if n < 4 {
                break;
            }
            let mut removed = false;
            let mut i = 0;
            while i < pts.len() {
                let n = pts.len();
                let prev = pts[(i + n - 1) % n];
                let cur = pts[i];
                let next = pts[(i + 1) % n];
                let collinear = (prev.x == cur.x && cur.x == next.x)
                    || (prev.y == cur.y && cur.y == next.y);
                if collinear {
                    pts.remove(i);
                    removed = true;
                } else {
                    i += 1;
                }
            }
            if !removed {
                break;
            }
        }
        RectilinearPolygon::new(pts)
    }

    pub fn from_rect(r: &Rect) -> Self {
        RectilinearPolygon {
            corners: vec![
                Point::new(r.x1, r.y1),
                Point::new(r.x2, r.y1),
                Point::new(r.x2, r.y2),
                Point::new(r.x1, r.y2),
            ],
        }
    }

    pub fn corners(&self) -> &[Point] {
        &self.corners
    }

    pub fn corner_count(&self) -> usize {
        self.corners.len()
    }

    pub fn edges(&self) -> impl Iterator<Item = (Point, Point)> + '_ {
        let n = self.corners.len();
        (0..n).map(move |i| (self.corners[i], self.corners[(i + 1) % n]))
    }

    pub fn bounding_rect(&self) -> Rect {
        let xs: Vec<i64> = self.corners.iter().map(|p| p.x).collect();
        let ys: Vec<i64> = self.corners.iter().map(|p| p.y).collect();
        Rect::closed(
            *xs.iter().min().unwrap(),
            *ys.iter().min().unwrap(),
            *xs.iter().max().unwrap(),
            *ys.iter().max().unwrap(),
        )
        .expect("polygon has positive extent")
    }

    /// If the polygon is a rectangle, returns it.
    pub fn as_rect(&self) -> Option<Rect> {
        if self.corners.len() != 4 {
            return None;
        }
        Some(self.bounding_rect())
    }

    /// Twice the signed area (positive for counter-clockwise).
    pub fn signed_area2(&self) -> i64 {
        let mut s = 0i64;
        for (a, b) in self.edges() {
            s += a.x * b.y - b.x * a.y;
        }
        s
    }

    fn oriented_ccw(mut self) -> Self {
        if self.signed_area2() < 0 {
            self.corners.reverse();
        }
        self
    }

    /// Even-odd membership for a point given in doubled coordinates. Exact
    /// whenever the doubled point avoids all (doubled) edge coordinates, which
    /// holds for cell centers of any arrangement containing the corners.
    pub fn contains_point2(&self, px2: i64, py2: i64) -> bool {
        let mut inside = false;
        for (a, b) in self.edges() {
            if a.x != b.x {
                continue; // horizontal edges never cross a horizontal ray
            }
            let (ylo, yhi) = (a.y.min(b.y), a.y.max(b.y));
            if 2 * ylo < py2 && py2 < 2 * yhi && 2 * a.x < px2 {
                inside = !inside;
            }
        }
        inside
    }

    fn validate(&self) -> Result<(), GeometryError> {
        let n = self.corners.len();
        if n < 4 {
            return Err(GeometryError::BadPolygon(format!("{n} corners")));
        }
        if n % 2 != 0 {
            return Err(GeometryError::BadPolygon("odd corner count".into()));
        }
        let mut distinct: BTreeSet<Point> = BTreeSet::new();
        for p in &self.corners {
            if !distinct.insert(*p) {
                return Err(GeometryError::BadPolygon(format!("repeated corner {p:?}")));
            }
        }
        // Edges alternate horizontal/vertical and have positive length.
        let mut dirs = Vec::with_capacity(n);
        for (a, b) in self.edges() {
            let horiz = a.y == b.y && a.x != b.x;
            let vert = a.x == b.x && a.y != b.y;
            if !(horiz || vert) {
                return Err(GeometryError::BadPolygon(format!("edge {a:?}-{b:?} not axis-parallel")));
            }
            dirs.push(horiz);
        }
        for i in 0..n {
            if dirs[i] == dirs[(i + 1) % n] {
                return Err(GeometryError::BadPolygon("consecutive edges share an axis".into()));
            }
        }
        // Simplicity: non-adjacent edges must not share any point.
        let edges: Vec<(Point, Point)> = self.edges().collect();
        for i in 0..n {
            for j in (i + 1)..n {
                if j == i + 1 || (i == 0 && j == n - 1) {
                    continue;
                }
                if segments_share_point(edges[i], edges[j]) {
                    return Err(GeometryError::BadPolygon(format!(
                        "edges {i} and {j} intersect"
                    )));
                }
            }
        }
        Ok(())
    }
}

fn segments_share_point(a: (Point, Point), b: (Point, Point)) -> bool {
    let (a1, a2) = a;
    let (b1, b2) = b;
    let a_vert = a1.x == a2.x;
    let b_vert = b1.x == b2.x;
    let (ax1, ax2) = (a1.x.min(a2.x), a1.x.max(a2.x));
    let (ay1, ay2) = (a1.y.min(a2.y), a1.y.max(a2.y));
    let (bx1, bx2) = (b1.x.min(b2.x), b1.x.max(b2.x));
    let (by1, by2) = (b1.y.min(b2.y), b1.y.max(b2.y));
    match (a_vert, b_vert) {
        (true, true) => ax1 == bx1 && ay1 <= by2 && by1 <= ay2,
        (false, false) => ay1 == by1 && ax1 <= bx2 && bx1 <= ax2,
        (true, false) => bx1 <= ax1 && ax1 <= bx2 && ay1 <= by1 && by1 <= ay2,
        (false, true) => ax1 <= bx1 && bx1 <= ax2 && by1 <= ay1 && ay1 <= by2,
    }
}

/// Alignment test for a rectangle against a point set.
pub fn is_rect_aligned(r: &Rect, z: &AlignmentPointSet) -> bool {
    z.is_rect_aligned(r)
}

/// Alignment test for a polygon against a point set.
pub fn is_polygon_aligned(p: &RectilinearPolygon, z: &AlignmentPointSet) -> bool {
    z.is_polygon_aligned(p)
}

/// Tiles a simple closed rectilinear polygon with at most `L - 3` closed,
/// internally disjoint rectangles whose union is exactly the polygon and
/// whose corners are aligned with the polygon's corner set.
pub fn tile_polygon(p: &RectilinearPolygon) -> Result<Vec<Rect>, GeometryError> {
    let tiles = tile_polygon_inner(p)?;
    debug_assert!(tiles.len() <= p.corner_count() - 3);
    Ok(tiles)
}

fn tile_polygon_inner(p: &RectilinearPolygon) -> Result<Vec<Rect>, GeometryError> {
    if let Some(r) = p.as_rect() {
        return Ok(vec![r.as_closed()]);
    }
    // Reflex corners whose adjacent vertical edge extends upward admit a
    // downward splitting ray; if none exists, mirror vertically and retry.
    match pick_reflex_down(p) {
        Some(corner) => {
            let (part1, part2) = split_at(p, corner)?;
            let mut tiles = tile_polygon_inner(&part1)?;
            tiles.extend(tile_polygon_inner(&part2)?);
            Ok(tiles)
        }
        None => {
            let mirrored = mirror_y_polygon(p)?;
            let tiles = tile_polygon_inner(&mirrored)?;
            Ok(tiles.into_iter().map(mirror_y_rect).collect())
        }
    }
}

fn mirror_y_polygon(p: &RectilinearPolygon) -> Result<RectilinearPolygon, GeometryError> {
    let pts: Vec<Point> = p.corners().iter().map(|c| Point::new(c.x, -c.y)).collect();
    RectilinearPolygon::new(pts)
}

fn mirror_y_rect(r: Rect) -> Rect {
    Rect { x1: r.x1, y1: -r.y2, x2: r.x2, y2: -r.y1, openness: r.openness }
}

/// Lexicographically smallest reflex corner whose vertical edge extends
/// upward (so the downward ray immediately enters the interior).
fn pick_reflex_down(p: &RectilinearPolygon) -> Option<Point> {
    let n = p.corner_count();
    let corners = p.corners();
    let mut best: Option<Point> = None;
    for i in 0..n {
        let prev = corners[(i + n - 1) % n];
        let cur = corners[i];
        let next = corners[(i + 1) % n];
        let din = (cur.x - prev.x, cur.y - prev.y);
        let dout = (next.x - cur.x, next.y - cur.y);
        let cross = din.0 * dout.1 - din.1 * dout.0;
        if cross >= 0 {
            continue; // convex for a CCW polygon
        }
        let vertical_up = (din.0 == 0 && din.1 < 0) || (dout.0 == 0 && dout.1 > 0);
        if !vertical_up {
            continue;
        }
        if best.map_or(true, |b| (cur.x, cur.y) < (b.x, b.y)) {
            best = Some(cur);
        }
    }
    best
}

/// Splits `p` along the maximal downward ray from the reflex corner.
fn split_at(
    p: &RectilinearPolygon,
    corner: Point,
) -> Result<(RectilinearPolygon, RectilinearPolygon), GeometryError> {
    // First boundary point strictly below the corner on the same x line.
    let mut hit_y: Option<i64> = None;
    for (a, b) in p.edges() {
        if a.y == b.y {
            let (xlo, xhi) = (a.x.min(b.x), a.x.max(b.x));
            if xlo <= corner.x && corner.x <= xhi && a.y < corner.y {
                hit_y = Some(hit_y.map_or(a.y, |h: i64| h.max(a.y)));
            }
        } else if a.x == corner.x {
            let top = a.y.max(b.y);
            if top < corner.y {
                hit_y = Some(hit_y.map_or(top, |h: i64| h.max(top)));
            }
        }
    }
    let hit_y = hit_y.ok_or_else(|| GeometryError::BadPolygon("no split target below reflex corner".into()))?;
    let hit = Point::new(corner.x, hit_y);

    // Expanded corner cycle with the hit point inserted if needed.
    let mut cycle: Vec<Point> = Vec::with_capacity(p.corner_count() + 1);
    for (a, b) in p.edges() {
        cycle.push(a);
        if a.y == b.y && a.y == hit_y {
            let (xlo, xhi) = (a.x.min(b.x), a.x.max(b.x));
            if xlo < hit.x && hit.x < xhi {
                cycle.push(hit);
            }
        }
    }
    let ip = cycle.iter().position(|q| *q == corner).expect("corner on cycle");
    let ih = cycle
        .iter()
        .position(|q| *q == hit)
        .ok_or_else(|| GeometryError::BadPolygon("split target not on boundary".into()))?;
    let n = cycle.len();
    let mut part1 = Vec::new();
    let mut i = ip;
    loop {
        part1.push(cycle[i]);
        if i == ih {
            break;
        }
        i = (i + 1) % n;
    }
    let mut part2 = Vec::new();
    let mut i = ih;
    loop {
        part2.push(cycle[i]);
        if i == ip {
            break;
        }
        i = (i + 1) % n;
    }
    Ok((RectilinearPolygon::from_walk(&part1)?, RectilinearPolygon::from_walk(&part2)?))
}

/// Tiles `b \ p` with at most `L + 2` closed internally disjoint rectangles,
/// aligned with the corners of `p` and `b`. `p` must lie inside `b`.
pub fn tile_complement(p: &RectilinearPolygon, b: &Rect) -> Result<Vec<Rect>, GeometryError> {
    for c in p.corners() {
        if !b.contains_point(*c) {
            return Err(GeometryError::NotContained);
        }
    }
    let box_poly = RectilinearPolygon::from_rect(b);
    let box_edges: Vec<(Point, Point)> = box_poly.edges().collect();
    let boundary_touches =
        p.edges().any(|e| box_edges.iter().any(|be| segments_share_point(e, *be)));

    if boundary_touches {
        let tiles = tile_region_complement(&[p.clone()], &[], b)?;
        debug_assert!(tiles.len() <= p.corner_count() + 2);
        return Ok(tiles);
    }

    // Strictly interior polygon: carve a rectangle from the leftmost vertical
    // edge to the left wall so that the remainder is a simple polygon.
    let mut leftmost: Option<(i64, i64, i64)> = None; // (x, ylo, yhi)
    for (a, bb) in p.edges() {
        if a.x == bb.x {
            let cand = (a.x, a.y.min(bb.y), a.y.max(bb.y));
            if leftmost.map_or(true, |l| (cand.0, cand.1) < (l.0, l.1)) {
                leftmost = Some(cand);
            }
        }
    }
    let (ex, eylo, eyhi) = leftmost.expect("polygon has vertical edges");
    let carve = Rect::closed(b.x1, eylo, ex, eyhi)?;
    let mut tiles = tile_region_complement(&[p.clone()], &[carve], b)?;
    tiles.push(carve);
    debug_assert!(tiles.len() <= p.corner_count() + 2);
    Ok(tiles)
}

/// Tiles `b` minus the union of polygons and rectangles by tracing each
/// connected component and tiling it as a simple polygon.
fn tile_region_complement(
    polys: &[RectilinearPolygon],
    rects: &[Rect],
    b: &Rect,
) -> Result<Vec<Rect>, GeometryError> {
    let mut xs = Vec::new();
    let mut ys = Vec::new();
    for p in polys {
        for c in p.corners() {
            xs.push(c.x);
            ys.push(c.y);
        }
    }
    for r in rects {
        xs.extend([r.x1, r.x2]);
        ys.extend([r.y1, r.y2]);
    }
    let arr = Arrangement::new(b, &xs, &ys);
    let mut mask = cells::CellMask::empty(arr.n_cells());
    for row in 0..arr.n_rows() {
        for col in 0..arr.n_cols() {
            let (cx2, cy2) = arr.cell_center2(col, row);
            let in_poly = polys.iter().any(|p| p.contains_point2(cx2, cy2));
            let in_rect = rects
                .iter()
                .any(|r| 2 * r.x1 < cx2 && cx2 < 2 * r.x2 && 2 * r.y1 < cy2 && cy2 < 2 * r.y2);
            if !in_poly && !in_rect {
                mask.set(arr.cell_index(col, row));
            }
        }
    }
    if mask.is_empty() {
        return Ok(Vec::new());
    }
    let mut tiles = Vec::new();
    for comp in cells::components(&arr, &mask) {
        let poly = cells::trace_boundary(&arr, &comp)?;
        tiles.extend(tile_polygon(&poly)?);
    }
    Ok(tiles)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::oracle;

    fn rect(x1: i64, y1: i64, x2: i64, y2: i64) -> Rect {
        Rect::open(x1, y1, x2, y2).unwrap()
    }

    #[test]
    fn open_rects_sharing_edge_do_not_intersect() {
        let a = rect(0, 0, 2, 2);
        let b = rect(2, 0, 4, 2);
        assert!(!intersects(&a, &b));
    }

    #[test]
    fn containment_intersects() {
        let a = rect(0, 0, 3, 3);
        let b = rect(1, 1, 2, 2);
        assert!(intersects(&a, &b));
    }

    #[test]
    fn closed_rects_sharing_edge_intersect() {
        let a = rect(0, 0, 2, 2).as_closed();
        let b = rect(2, 0, 4, 2).as_closed();
        assert!(intersects(&a, &b));
    }

    #[test]
    fn intersects_symmetric_and_reflexive() {
        let a = rect(0, 0, 5, 2);
        let b = rect(3, 1, 6, 4);
        assert!(intersects(&a, &a));
        assert_eq!(intersects(&a, &b), intersects(&b, &a));
    }

    #[test]
    fn self_alignment() {
        let r = rect(1, 1, 3, 3);
        let z = AlignmentPointSet::from_rects([&r]);
        assert!(z.is_rect_aligned(&r));
    }

    #[test]
    fn misaligned_corner_detected() {
        let r = rect(1, 1, 3, 4);
        let z = AlignmentPointSet::from_lines([1, 3], [1, 3]);
        assert!(!z.is_rect_aligned(&r));
    }

    #[test]
    fn alignment_is_transitive() {
        // P3 aligned with P2's corners, P2 aligned with P1's: then P3 is
        // aligned with P1's corners.
        let p1 = rect(0, 0, 10, 10);
        let z1 = AlignmentPointSet::from_rects([&p1]);
        let p2 = rect(0, 0, 10, 10);
        assert!(z1.is_rect_aligned(&p2));
        let z2 = AlignmentPointSet::from_rects([&p2]);
        let p3 = rect(0, 0, 10, 10);
        assert!(z2.is_rect_aligned(&p3) && z1.is_rect_aligned(&p3));
    }

    #[test]
    fn tile_rectangle_is_itself() {
        let p = RectilinearPolygon::from_rect(&rect(1, 1, 4, 3));
        let tiles = tile_polygon(&p).unwrap();
        assert_eq!(tiles.len(), 1);
        assert_eq!(tiles[0].coords_key(), (1, 1, 4, 3));
    }

    #[test]
    fn tile_l_shape() {
        let p = RectilinearPolygon::new(vec![
            Point::new(0, 0),
            Point::new(4, 0),
            Point::new(4, 2),
            Point::new(2, 2),
            Point::new(2, 4),
            Point::new(0, 4),
        ])
        .unwrap();
        let tiles = tile_polygon(&p).unwrap();
        assert_eq!(tiles.len(), 2);
        oracle::assert_tiles_match_polygon(&p, &tiles);
        let z = AlignmentPointSet::from_points(p.corners().iter().copied());
        for t in &tiles {
            assert!(z.is_rect_aligned(t));
        }
    }

    #[test]
    fn tile_plus_shape() {
        let p = RectilinearPolygon::new(vec![
            Point::new(2, 0),
            Point::new(4, 0),
            Point::new(4, 2),
            Point::new(6, 2),
            Point::new(6, 4),
            Point::new(4, 4),
            Point::new(4, 6),
            Point::new(2, 6),
            Point::new(2, 4),
            Point::new(0, 4),
            Point::new(0, 2),
            Point::new(2, 2),
        ])
        .unwrap();
        assert_eq!(p.corner_count(), 12);
        let tiles = tile_polygon(&p).unwrap();
        assert!(tiles.len() <= 9);
        oracle::assert_tiles_match_polygon(&p, &tiles);
    }

    #[test]
    fn tile_upside_down_u_uses_mirror_fallback() {
        // No reflex corner admits a downward ray here.
        let p = RectilinearPolygon::new(vec![
            Point::new(0, 0),
            Point::new(2, 0),
            Point::new(2, 2),
            Point::new(4, 2),
            Point::new(4, 0),
            Point::new(6, 0),
            Point::new(6, 4),
            Point::new(0, 4),
        ])
        .unwrap();
        let tiles = tile_polygon(&p).unwrap();
        assert!(tiles.len() <= p.corner_count() - 3);
        oracle::assert_tiles_match_polygon(&p, &tiles);
    }

    #[test]
    fn complement_of_half_box_is_single_rect() {
        let b = rect(0, 0, 4, 4).as_closed();
        let p = RectilinearPolygon::from_rect(&rect(0, 0, 2, 4));
        let tiles = tile_complement(&p, &b).unwrap();
        assert_eq!(tiles.len(), 1);
        assert_eq!(tiles[0].coords_key(), (2, 0, 4, 4));
    }

    #[test]
    fn complement_of_interior_rect_is_frame() {
        let b = rect(0, 0, 6, 6).as_closed();
        let p = RectilinearPolygon::from_rect(&rect(2, 2, 4, 4));
        let tiles = tile_complement(&p, &b).unwrap();
        assert!(tiles.len() <= 6);
        oracle::assert_tiles_match_complement(&p, &b, &tiles);
    }

    #[test]
    fn complement_of_full_box_is_empty() {
        let b = rect(0, 0, 4, 4).as_closed();
        let p = RectilinearPolygon::from_rect(&b);
        let tiles = tile_complement(&p, &b).unwrap();
        assert!(tiles.is_empty());
    }

    #[test]
    fn complement_rejects_outside_polygon() {
        let b = rect(0, 0, 4, 4).as_closed();
        let p = RectilinearPolygon::from_rect(&rect(2, 2, 6, 6));
        assert!(tile_complement(&p, &b).is_err());
    }

    #[test]
    fn malformed_polygon_rejected() {
        // Self-intersecting bowtie-like walk.
        let res = RectilinearPolygon::new(vec![
            Point::new(0, 0),
            Point::new(4, 0),
            Point::new(4, 2),
            Point::new(2, 2),
            Point::new(2,-1),
            Point::new(0, -1),
        ]);
        assert!(res.is_err());
    }
}
