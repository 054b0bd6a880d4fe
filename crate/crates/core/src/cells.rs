//! Shared cell-arrangement machinery: overlay grids of x/y coordinates,
//! bitmask regions over their elementary cells, and boundary tracing.
//!
//! All region comparisons in this crate reduce to membership of elementary
//! cell centers, which is exact for axis-parallel regions whose defining
//! coordinates are part of the arrangement.

use crate::geometry::{Point, Rect, RectilinearPolygon};

/// Sorted, deduplicated x/y coordinates spanning a bounding box.
#[derive(Debug, Clone)]
pub struct Arrangement {
    pub xs: Vec<i64>,
    pub ys: Vec<i64>,
}

impl Arrangement {
    /// Builds an arrangement from the bounding box plus extra coordinates.
    /// Coordinates outside the box are clamped away.
    pub fn new(bbox: &Rect, extra_xs: &[i64], extra_ys: &[i64]) -> Self {
        let mut xs = vec![bbox.x1, bbox.x2];
        xs.extend(extra_xs.iter().copied().filter(|x| *x > bbox.x1 && *x < bbox.x2));
        xs.sort_unstable();
        xs.dedup();
        let mut ys = vec![bbox.y1, bbox.y2];
        ys.extend(extra_ys.iter().copied().filter(|y| *y > bbox.y1 && *y < bbox.y2));
        ys.sort_unstable();
        ys.dedup();
        Arrangement { xs, ys }
    }

    pub fn from_rects<'a>(bbox: &Rect, rects: impl Iterator<Item = &'a Rect>) -> Self {
        let mut xs = Vec::new();
        let mut ys = Vec::new();
        for r in rects {
            xs.push(r.x1);
            xs.push(r.x2);
            ys.push(r.y1);
            ys.push(r.y2);
        }
        Arrangement::new(bbox, &xs, &ys)
    }

    pub fn n_cols(&self) -> usize {
        self.xs.len() - 1
    }

    pub fn n_rows(&self) -> usize {
        self.ys.len() - 1
    }

    pub fn n_cells(&self) -> usize {
        self.n_cols() * self.n_rows()
    }

    pub fn cell_index(&self, col: usize, row: usize) -> usize {
        row * self.n_cols() + col
    }

    pub fn cell_rect(&self, col: usize, row: usize) -> Rect {
        Rect::closed(self.xs[col], self.ys[row], self.xs[col + 1], self.ys[row + 1])
            .expect("arrangement cells are non-degenerate")
    }

    /// Center of an elementary cell in doubled coordinates (exact).
    pub fn cell_center2(&self, col: usize, row: usize) -> (i64, i64) {
        (self.xs[col] + self.xs[col + 1], self.ys[row] + self.ys[row + 1])
    }

    pub fn cell_area(&self, col: usize, row: usize) -> i64 {
        (self.xs[col + 1] - self.xs[col]) * (self.ys[row + 1] - self.ys[row])
    }
}

/// Bitmask over the elementary cells of one arrangement.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CellMask {
    words: Vec<u64>,
    len: usize,
}

impl CellMask {
    pub fn empty(len: usize) -> Self {
        CellMask { words: vec![0; (len + 63) / 64], len }
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.words.iter().all(|w| *w == 0)
    }

    pub fn set(&mut self, i: usize) {
        self.words[i / 64] |= 1u64 << (i % 64);
    }

    pub fn get(&self, i: usize) -> bool {
        self.words[i / 64] >> (i % 64) & 1 == 1
    }

    pub fn count(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }

    pub fn is_subset_of(&self, other: &CellMask) -> bool {
        self.words.iter().zip(&other.words).all(|(a, b)| a & !b == 0)
    }

    pub fn is_strict_subset_of(&self, other: &CellMask) -> bool {
        self.is_subset_of(other) && self != other
    }

    pub fn is_disjoint_from(&self, other: &CellMask) -> bool {
        self.words.iter().zip(&other.words).all(|(a, b)| a & b == 0)
    }

    pub fn iter_ones(&self) -> impl Iterator<Item = usize> + '_ {
        (0..self.len).filter(move |i| self.get(*i))
    }
}

/// Cells of the arrangement whose centers avoid every given closed rectangle.
pub fn uncovered_cells(arr: &Arrangement, covers: &[Rect]) -> CellMask {
    let mut mask = CellMask::empty(arr.n_cells());
    for row in 0..arr.n_rows() {
        for col in 0..arr.n_cols() {
            let (cx2, cy2) = arr.cell_center2(col, row);
            let covered = covers.iter().any(|r| {
                2 * r.x1 <= cx2 && cx2 <= 2 * r.x2 && 2 * r.y1 <= cy2 && cy2 <= 2 * r.y2
            });
            if !covered {
                mask.set(arr.cell_index(col, row));
            }
        }
    }
    mask
}

/// Cells whose centers lie inside the given polygon.
pub fn polygon_cells(arr: &Arrangement, poly: &RectilinearPolygon) -> CellMask {
    let mut mask = CellMask::empty(arr.n_cells());
    for row in 0..arr.n_rows() {
        for col in 0..arr.n_cols() {
            let (cx2, cy2) = arr.cell_center2(col, row);
            if poly.contains_point2(cx2, cy2) {
                mask.set(arr.cell_index(col, row));
            }
        }
    }
    mask
}

/// Total area of the cells selected by `mask`.
pub fn mask_area(arr: &Arrangement, mask: &CellMask) -> i64 {
    let mut area = 0;
    for row in 0..arr.n_rows() {
        for col in 0..arr.n_cols() {
            if mask.get(arr.cell_index(col, row)) {
                area += arr.cell_area(col, row);
            }
        }
    }
    area
}

/// Connected components of the selected cells under positive-length edge
/// adjacency.
pub fn components(arr: &Arrangement, mask: &CellMask) -> Vec<CellMask> {
    let ncols = arr.n_cols();
    let nrows = arr.n_rows();
    let mut seen = CellMask::empty(arr.n_cells());
    let mut out = Vec::new();
    for start in 0..arr.n_cells() {
        if !mask.get(start) || seen.get(start) {
            continue;
        }
        let mut comp = CellMask::empty(arr.n_cells());
        let mut stack = vec![start];
        seen.set(start);
        while let Some(i) = stack.pop() {
            comp.set(i);
            let (col, row) = (i % ncols, i / ncols);
            let mut push = |c: usize, r: usize| {
                let j = arr.cell_index(c, r);
                if mask.get(j) && !seen.get(j) {
                    seen.set(j);
                    stack.push(j);
                }
            };
            if col > 0 {
                push(col - 1, row);
            }
            if col + 1 < ncols {
                push(col + 1, row);
            }
            if row > 0 {
                push(col, row - 1);
            }
            if row + 1 < nrows {
                push(col, row + 1);
            }
        }
        out.push(comp);
    }
    out
}

/// Traces the outer boundary of a union of cells as a rectilinear polygon.
///
/// Fails when the region touches itself at a point (pinch) or has a hole;
/// callers treat both as "not a simple polygon".
pub fn trace_boundary(arr: &Arrangement, mask: &CellMask) -> Result<RectilinearPolygon, TraceError> {
    use std::collections::BTreeMap;
    let ncols = arr.n_cols();
    let nrows = arr.n_rows();
    // Horizontal/vertical unit boundary edges keyed by endpoints.
    let mut edges: BTreeMap<Point, Vec<Point>> = BTreeMap::new();
    let mut n_edges = 0usize;
    let add = |a: Point, b: Point, edges: &mut BTreeMap<Point, Vec<Point>>| {
        edges.entry(a).or_default().push(b);
        edges.entry(b).or_default().push(a);
    };
    for row in 0..nrows {
        for col in 0..ncols {
            if !mask.get(arr.cell_index(col, row)) {
                continue;
            }
            let (x1, y1, x2, y2) =
                (arr.xs[col], arr.ys[row], arr.xs[col + 1], arr.ys[row + 1]);
            let nb = |c: i64, r: i64| -> bool {
                if c < 0 || r < 0 || c as usize >= ncols || r as usize >= nrows {
                    return false;
                }
                mask.get(arr.cell_index(c as usize, r as usize))
            };
            if !nb(col as i64 - 1, row as i64) {
                add(Point::new(x1, y1), Point::new(x1, y2), &mut edges);
                n_edges += 1;
            }
            if !nb(col as i64 + 1, row as i64) {
                add(Point::new(x2, y1), Point::new(x2, y2), &mut edges);
                n_edges += 1;
            }
            if !nb(col as i64, row as i64 - 1) {
                add(Point::new(x1, y1), Point::new(x2, y1), &mut edges);
                n_edges += 1;
            }
            if !nb(col as i64, row as i64 + 1) {
                add(Point::new(x1, y2), Point::new(x2, y2), &mut edges);
                n_edges += 1;
            }
        }
    }
    if n_edges == 0 {
        return Err(TraceError::EmptyRegion);
    }
    for (p, nbs) in &edges {
        if nbs.len() != 2 {
            return Err(TraceError::Pinch(*p));
        }
    }
    // Walk the unique cycle starting from the smallest vertex.
    let start = *edges.keys().next().unwrap();
    let mut walk = vec![start];
    let mut prev = start;
    let mut cur = edges[&start][0];
    let mut steps = 0usize;
    while cur != start {
        walk.push(cur);
        let nbs = &edges[&cur];
        let next = if nbs[0] == prev { nbs[1] } else { nbs[0] };
        prev = cur;
        cur = next;
        steps += 1;
        if steps > 4 * n_edges + 8 {
            return Err(TraceError::Pinch(cur));
        }
    }
    if walk.len() < n_edges {
        // Unvisited boundary edges remain: the region has a hole.
        return Err(TraceError::Hole);
    }
    let poly = RectilinearPolygon::from_walk(&walk).map_err(|_| TraceError::Degenerate)?;
    Ok(poly)
}

#[derive(Debug, thiserror::Error, PartialEq, Eq)]
pub enum TraceError {
    #[error("region is empty")]
    EmptyRegion,
    #[error("region touches itself at {0:?}")]
    Pinch(Point),
    #[error("region has a hole")]
    Hole,
    #[error("traced walk is degenerate")]
    Degenerate,
}
