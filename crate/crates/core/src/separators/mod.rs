//! Planar dual of a cell partition and weighted simple-cycle separators.
//!
//! The dual has one vertex per partition cell plus one for the outer face;
//! edges connect cells sharing a positive-length boundary segment, and cells
//! touch the outer vertex through their segments on the bounding box
//! boundary. A simple cycle is drawn through cell centers and shared-segment
//! midpoints, so side membership is decided by exact point-in-polygon tests
//! on cell centers in doubled coordinates.

mod splits;

pub use splits::{
    decompose_pair_grid, decompose_triple, decompose_triple_grid, split_balanced,
    split_reduce_boundary, PairOutcome, SplitMeta, TripleOutcome,
};

use crate::geometry::Rect;
use crate::partitions::CellPartition;
use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Axis-parallel segment of positive length on a cell boundary.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Segment {
    pub vertical: bool,
    pub at: i64,
    pub lo: i64,
    pub hi: i64,
}

impl Segment {
    /// Midpoint in doubled coordinates.
    pub fn midpoint2(&self) -> (i64, i64) {
        if self.vertical {
            (2 * self.at, self.lo + self.hi)
        } else {
            (self.lo + self.hi, 2 * self.at)
        }
    }
}

#[derive(Debug, Clone)]
pub struct DualEdge {
    pub to: usize,
    pub seg: Segment,
}

/// Weighted planar dual of a rectangle partition.
#[derive(Debug, Clone)]
pub struct DualGraph {
    pub bbox: Rect,
    pub cells: Vec<Rect>,
    pub is_fake: Vec<bool>,
    pub weights: Vec<u64>,
    pub adj: Vec<Vec<DualEdge>>,
    /// Maximal straight segments each cell shares with the box boundary.
    pub boundary_segs: Vec<Vec<Segment>>,
    /// Maximum dual face size (at most 4 for rectangle partitions).
    pub max_face_size: usize,
}

#[derive(Debug, Error)]
pub enum SeparatorError {
    #[error("no qualifying separator cycle found (searched {candidates} candidates, budget left {budget_left})")]
    NoFeasibleCycle { candidates: usize, budget_left: u64 },
    #[error("precondition violated: {0}")]
    Precondition(String),
    #[error(transparent)]
    Partition(#[from] crate::partitions::PartitionError),
    #[error(transparent)]
    Geometry(#[from] crate::geometry::GeometryError),
    #[error(transparent)]
    Solver(#[from] crate::solvers::SolverError),
}

/// Simple cycle separator with its side assignment.
#[derive(Debug, Clone)]
pub struct SeparatorCycle {
    /// Cell vertices along the cycle, in order.
    pub cells: Vec<usize>,
    /// Whether the cycle passes through the outer-face vertex.
    pub uses_outer: bool,
    /// Boundary segments where the drawn curve enters/leaves the box
    /// (outer cycles only).
    pub entry: Option<Segment>,
    pub exit: Option<Segment>,
    pub interior: Vec<usize>,
    pub exterior: Vec<usize>,
    pub w_in: u64,
    pub w_out: u64,
}

impl SeparatorCycle {
    pub fn vertex_count(&self) -> usize {
        self.cells.len() + usize::from(self.uses_outer)
    }
}

fn shared_segment(a: &Rect, b: &Rect) -> Option<Segment> {
    // Vertical contact.
    for (x, (l, r)) in [(a.x2, (a, b)), (a.x1, (b, a))] {
        if l.x2 == r.x1 && l.x2 == x {
            let lo = a.y1.max(b.y1);
            let hi = a.y2.min(b.y2);
            if lo < hi {
                return Some(Segment { vertical: true, at: x, lo, hi });
            }
        }
    }
    // Horizontal contact.
    for (y, (l, r)) in [(a.y2, (a, b)), (a.y1, (b, a))] {
        if l.y2 == r.y1 && l.y2 == y {
            let lo = a.x1.max(b.x1);
            let hi = a.x2.min(b.x2);
            if lo < hi {
                return Some(Segment { vertical: false, at: y, lo, hi });
            }
        }
    }
    None
}

/// Builds the weighted planar dual of a partition; weights start at zero.
pub fn build_dual(partition: &CellPartition, bbox: &Rect) -> DualGraph {
    let cells: Vec<Rect> = partition.cells.iter().map(|c| c.rect).collect();
    let is_fake: Vec<bool> = partition.cells.iter().map(|c| c.is_fake).collect();
    let n = cells.len();
    let mut adj: Vec<Vec<DualEdge>> = vec![Vec::new(); n];
    for i in 0..n {
        for j in (i + 1)..n {
            if let Some(seg) = shared_segment(&cells[i], &cells[j]) {
                adj[i].push(DualEdge { to: j, seg });
                adj[j].push(DualEdge { to: i, seg });
            }
        }
    }
    let mut boundary_segs: Vec<Vec<Segment>> = vec![Vec::new(); n];
    for (i, c) in cells.iter().enumerate() {
        if c.x1 == bbox.x1 {
            boundary_segs[i].push(Segment { vertical: true, at: bbox.x1, lo: c.y1, hi: c.y2 });
        }
        if c.x2 == bbox.x2 {
            boundary_segs[i].push(Segment { vertical: true, at: bbox.x2, lo: c.y1, hi: c.y2 });
        }
        if c.y1 == bbox.y1 {
            boundary_segs[i].push(Segment { vertical: false, at: bbox.y1, lo: c.x1, hi: c.x2 });
        }
        if c.y2 == bbox.y2 {
            boundary_segs[i].push(Segment { vertical: false, at: bbox.y2, lo: c.x1, hi: c.x2 });
        }
        boundary_segs[i].sort();
    }
    let max_face_size = max_face_size(&cells, bbox);
    DualGraph {
        bbox: *bbox,
        cells,
        is_fake,
        weights: vec![0; n],
        adj,
        boundary_segs,
        max_face_size,
    }
}

/// Dual face sizes equal the number of visits the incident primal faces make
/// around each partition vertex: count maximal runs of distinct owners over
/// the four quadrants in circular order.
fn max_face_size(cells: &[Rect], bbox: &Rect) -> usize {
    let mut points: Vec<(i64, i64)> = Vec::new();
    for c in cells {
        points.extend([(c.x1, c.y1), (c.x2, c.y1), (c.x2, c.y2), (c.x1, c.y2)]);
    }
    points.extend([
        (bbox.x1, bbox.y1),
        (bbox.x2, bbox.y1),
        (bbox.x2, bbox.y2),
        (bbox.x1, bbox.y2),
    ]);
    points.sort_unstable();
    points.dedup();
    let owner = |px: i64, py: i64, dx: i64, dy: i64| -> Option<usize> {
        // Cell owning the quadrant (dx, dy) at point p.
        cells.iter().position(|c| {
            let x_ok = if dx > 0 { c.x1 <= px && px < c.x2 } else { c.x1 < px && px <= c.x2 };
            let y_ok = if dy > 0 { c.y1 <= py && py < c.y2 } else { c.y1 < py && py <= c.y2 };
            x_ok && y_ok
        })
    };
    let mut s = 0usize;
    for (px, py) in points {
        let quads = [
            owner(px, py, 1, 1),
            owner(px, py, -1, 1),
            owner(px, py, -1, -1),
            owner(px, py, 1, -1),
        ];
        let mut runs = 0usize;
        for i in 0..4 {
            if quads[i] != quads[(i + 1) % 4] {
                runs += 1;
            }
        }
        // All quadrants equal means the point is interior to a region and
        // contributes a single visit.
        s = s.max(runs.max(1));
    }
    s
}

/// Miller-style bound on the cycle vertex count.
pub fn length_bound(dual: &DualGraph) -> f64 {
    let n = dual.cells.len() + 1;
    let s = dual.max_face_size;
    2.0 * ((2 * (s / 2) * n) as f64).sqrt()
}

/// Candidate cycle before side evaluation.
#[derive(Debug, Clone)]
pub struct RawCycle {
    pub cells: Vec<usize>,
    pub uses_outer: bool,
    pub entry: Option<Segment>,
    pub exit: Option<Segment>,
}

/// Draws the cycle and classifies every non-cycle cell by exact ray casting
/// of its doubled center against the drawn polygon.
pub fn evaluate_cycle(dual: &DualGraph, raw: &RawCycle) -> SeparatorCycle {
    let k = raw.cells.len();
    let center2 = |i: usize| -> (i64, i64) {
        let c = &dual.cells[i];
        (c.x1 + c.x2, c.y1 + c.y2)
    };
    let mut poly: Vec<(i64, i64)> = Vec::new();
    if raw.uses_outer {
        let entry = raw.entry.expect("outer cycle has entry segment");
        let exit = raw.exit.expect("outer cycle has exit segment");
        poly.push(entry.midpoint2());
        for w in 0..k {
            poly.push(center2(raw.cells[w]));
            if w + 1 < k {
                let seg = dual.adj[raw.cells[w]]
                    .iter()
                    .find(|e| e.to == raw.cells[w + 1])
                    .expect("consecutive cycle cells are adjacent")
                    .seg;
                poly.push(seg.midpoint2());
            }
        }
        poly.push(exit.midpoint2());
        poly.extend(boundary_arc(&dual.bbox, exit.midpoint2(), entry.midpoint2()));
    } else {
        for w in 0..k {
            poly.push(center2(raw.cells[w]));
            let seg = dual.adj[raw.cells[w]]
                .iter()
                .find(|e| e.to == raw.cells[(w + 1) % k])
                .expect("consecutive cycle cells are adjacent")
                .seg;
            poly.push(seg.midpoint2());
        }
    }
    let on_cycle: std::collections::BTreeSet<usize> = raw.cells.iter().copied().collect();
    let mut interior = Vec::new();
    let mut exterior = Vec::new();
    let mut w_in = 0u64;
    let mut w_out = 0u64;
    for i in 0..dual.cells.len() {
        if on_cycle.contains(&i) {
            continue;
        }
        if point_in_poly2(&poly, center2(i)) {
            w_in += dual.weights[i];
            interior.push(i);
        } else {
            w_out += dual.weights[i];
            exterior.push(i);
        }
    }
    SeparatorCycle {
        cells: raw.cells.clone(),
        uses_outer: raw.uses_outer,
        entry: raw.entry,
        exit: raw.exit,
        interior,
        exterior,
        w_in,
        w_out,
    }
}

/// Counter-clockwise arc of the (doubled) box boundary from `from` to `to`,
/// exclusive of the endpoints, as the list of corners passed.
fn boundary_arc(bbox: &Rect, from: (i64, i64), to: (i64, i64)) -> Vec<(i64, i64)> {
    let corners = [
        (2 * bbox.x1, 2 * bbox.y1),
        (2 * bbox.x2, 2 * bbox.y1),
        (2 * bbox.x2, 2 * bbox.y2),
        (2 * bbox.x1, 2 * bbox.y2),
    ];
    // Position of a boundary point as (edge index, offset along edge).
    let locate = |p: (i64, i64)| -> (usize, i64) {
        for e in 0..4 {
            let a = corners[e];
            let b = corners[(e + 1) % 4];
            if a.0 == b.0 && p.0 == a.0 {
                let (lo, hi) = (a.1.min(b.1), a.1.max(b.1));
                if lo <= p.1 && p.1 <= hi {
                    return (e, (p.1 - a.1).abs());
                }
            }
            if a.1 == b.1 && p.1 == a.1 {
                let (lo, hi) = (a.0.min(b.0), a.0.max(b.0));
                if lo <= p.0 && p.0 <= hi {
                    return (e, (p.0 - a.0).abs());
                }
            }
        }
        unreachable!("point {p:?} not on boundary");
    };
    let (fe, fo) = locate(from);
    let (te, to_off) = locate(to);
    let mut arc = Vec::new();
    if fe == te && fo <= to_off {
        return arc; // same edge, forward: no corners in between
    }
    let mut e = fe;
    loop {
        let corner = corners[(e + 1) % 4];
        arc.push(corner);
        e = (e + 1) % 4;
        if e == te {
            break;
        }
    }
    arc
}

/// Exact even-odd test of a doubled point against a general integer polygon;
/// the point must not lie on the boundary.
pub fn point_in_poly2(poly: &[(i64, i64)], q: (i64, i64)) -> bool {
    let mut inside = false;
    let n = poly.len();
    for i in 0..n {
        let a = poly[i];
        let b = poly[(i + 1) % n];
        if (a.1 > q.1) != (b.1 > q.1) {
            let dy = (b.1 - a.1) as i128;
            let cross =
                (a.0 as i128 - q.0 as i128) * dy + (b.0 as i128 - a.0 as i128) * (q.1 - a.1) as i128;
            if (dy > 0 && cross > 0) || (dy < 0 && cross < 0) {
                inside = !inside;
            }
        }
    }
    inside
}

/// Balance and length feasibility of an evaluated cycle.
pub fn is_feasible(dual: &DualGraph, cycle: &SeparatorCycle) -> bool {
    let total: u64 = dual.weights.iter().sum();
    let bound = length_bound(dual);
    3 * cycle.w_in <= 2 * total
        && 3 * cycle.w_out <= 2 * total
        && (cycle.vertex_count() as f64) <= bound + 1e-9
}

/// Enumerates feasible simple cycles in increasing length, stopping at `cap`
/// collected candidates or when the node budget runs out. Returns the
/// candidates and the remaining budget.
pub fn enumerate_feasible_cycles(
    dual: &DualGraph,
    cap: usize,
    mut budget: u64,
) -> (Vec<SeparatorCycle>, u64) {
    let bound = length_bound(dual);
    let maxlen = bound.floor() as usize;
    let mut out: Vec<SeparatorCycle> = Vec::new();
    let n = dual.cells.len();
    for target in 2..=maxlen {
        if out.len() >= cap || budget == 0 {
            break;
        }
        // Pure cell cycles of exactly `target` vertices (needs >= 3 distinct
        // cells; two rectangles share at most one segment).
        if target >= 3 {
            for start in 0..n {
                let mut path = vec![start];
                dfs_cycles(dual, start, target, &mut path, &mut budget, &mut |cells| {
                    push_candidate(
                        dual,
                        RawCycle { cells: cells.to_vec(), uses_outer: false, entry: None, exit: None },
                        cap,
                        &mut out,
                    );
                });
                if out.len() >= cap || budget == 0 {
                    break;
                }
            }
        }
        // Cycles through the outer vertex with k = target - 1 path cells.
        let k = target - 1;
        if k == 1 {
            for c in 0..n {
                let segs = &dual.boundary_segs[c];
                for i in 0..segs.len() {
                    for j in (i + 1)..segs.len() {
                        push_candidate(
                            dual,
                            RawCycle {
                                cells: vec![c],
                                uses_outer: true,
                                entry: Some(segs[i]),
                                exit: Some(segs[j]),
                            },
                            cap,
                            &mut out,
                        );
                    }
                }
            }
        } else if k >= 2 {
            for start in 0..n {
                if dual.boundary_segs[start].is_empty() {
                    continue;
                }
                let mut path = vec![start];
                dfs_paths(dual, k, &mut path, &mut budget, &mut |cells| {
                    let last = *cells.last().unwrap();
                    if cells[0] > last || dual.boundary_segs[last].is_empty() {
                        return;
                    }
                    for &entry in &dual.boundary_segs[cells[0]] {
                        for &exit in &dual.boundary_segs[last] {
                            push_candidate(
                                dual,
                                RawCycle {
                                    cells: cells.to_vec(),
                                    uses_outer: true,
                                    entry: Some(entry),
                                    exit: Some(exit),
                                },
                                cap,
                                &mut out,
                            );
                        }
                    }
                });
                if out.len() >= cap || budget == 0 {
                    break;
                }
            }
        }
    }
    (out, budget)
}

fn push_candidate(dual: &DualGraph, raw: RawCycle, cap: usize, out: &mut Vec<SeparatorCycle>) {
    if out.len() >= cap {
        return;
    }
    let cycle = evaluate_cycle(dual, &raw);
    if is_feasible(dual, &cycle) {
        out.push(cycle);
    }
}

/// Simple cycles of exactly `target` vertices starting (and canonically
/// rooted) at `path[0]`.
fn dfs_cycles(
    dual: &DualGraph,
    start: usize,
    target: usize,
    path: &mut Vec<usize>,
    budget: &mut u64,
    emit: &mut impl FnMut(&[usize]),
) {
    if *budget == 0 {
        return;
    }
    *budget -= 1;
    let cur = *path.last().unwrap();
    if path.len() == target {
        if path[1] < cur && dual.adj[cur].iter().any(|e| e.to == start) {
            emit(path);
        }
        return;
    }
    for e in &dual.adj[cur] {
        if e.to <= start || path.contains(&e.to) {
            continue;
        }
        path.push(e.to);
        dfs_cycles(dual, start, target, path, budget, emit);
        path.pop();
    }
}

/// Simple paths of exactly `k` vertices from `path[0]`.
fn dfs_paths(
    dual: &DualGraph,
    k: usize,
    path: &mut Vec<usize>,
    budget: &mut u64,
    emit: &mut impl FnMut(&[usize]),
) {
    if *budget == 0 {
        return;
    }
    *budget -= 1;
    if path.len() == k {
        emit(path);
        return;
    }
    let cur = *path.last().unwrap();
    for e in &dual.adj[cur] {
        if path.contains(&e.to) {
            continue;
        }
        path.push(e.to);
        dfs_paths(dual, k, path, budget, emit);
        path.pop();
    }
}

pub const DEFAULT_CYCLE_CAP: usize = 192;
pub const DEFAULT_CYCLE_BUDGET: u64 = 400_000;

/// Best feasible separator cycle by (imbalance, length), or an error when
/// none exists within the search budget.
pub fn cycle_separator(dual: &DualGraph) -> Result<SeparatorCycle, SeparatorError> {
    let (mut candidates, budget_left) =
        enumerate_feasible_cycles(dual, DEFAULT_CYCLE_CAP, DEFAULT_CYCLE_BUDGET);
    if candidates.is_empty() {
        return Err(SeparatorError::NoFeasibleCycle { candidates: 0, budget_left });
    }
    candidates.sort_by_key(|c| (c.w_in.max(c.w_out), c.vertex_count(), c.cells.clone()));
    Ok(candidates.swap_remove(0))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fakes::FakeSet;
    use crate::instance::{generate, GenKind};
    use crate::params::Parameters;
    use crate::partitions::{build_r_good_partition, CellPartition, PartitionCell};
    use crate::solvers::exact_mis;

    fn partition_from_rects(rects: &[Rect]) -> CellPartition {
        CellPartition {
            cells: rects
                .iter()
                .map(|r| PartitionCell { rect: *r, is_fake: false, n_p: 0, excess: 0 })
                .collect(),
            r: 1,
            opt_size: 0,
        }
    }

    fn grid_partition(bbox: &Rect, k: i64) -> CellPartition {
        let mut rects = Vec::new();
        let w = (bbox.x2 - bbox.x1) / k;
        let h = (bbox.y2 - bbox.y1) / k;
        for i in 0..k {
            for j in 0..k {
                let x1 = bbox.x1 + i * w;
                let y1 = bbox.y1 + j * h;
                let x2 = if i == k - 1 { bbox.x2 } else { x1 + w };
                let y2 = if j == k - 1 { bbox.y2 } else { y1 + h };
                rects.push(Rect::closed(x1, y1, x2, y2).unwrap());
            }
        }
        partition_from_rects(&rects)
    }

    #[test]
    fn two_by_two_dual_shape() {
        let bbox = Rect::closed(0, 0, 4, 4).unwrap();
        let dual = build_dual(&grid_partition(&bbox, 2), &bbox);
        assert_eq!(dual.cells.len(), 4);
        // Each cell neighbors exactly two others and touches the boundary.
        for i in 0..4 {
            assert_eq!(dual.adj[i].len(), 2);
            assert_eq!(dual.boundary_segs[i].len(), 2);
        }
        assert!(dual.max_face_size <= 4);
    }

    #[test]
    fn strip_dual_is_a_path() {
        let bbox = Rect::closed(0, 0, 5, 1).unwrap();
        let rects: Vec<Rect> =
            (0..5).map(|i| Rect::closed(i, 0, i + 1, 1).unwrap()).collect();
        let dual = build_dual(&partition_from_rects(&rects), &bbox);
        assert_eq!(dual.adj[0].len(), 1);
        assert_eq!(dual.adj[2].len(), 2);
        assert_eq!(dual.adj[4].len(), 1);
    }

    #[test]
    fn single_cell_dual_has_multi_edges_to_outer() {
        let bbox = Rect::closed(0, 0, 3, 3).unwrap();
        let dual = build_dual(&partition_from_rects(&[bbox]), &bbox);
        assert_eq!(dual.cells.len(), 1);
        assert_eq!(dual.boundary_segs[0].len(), 4);
    }

    #[test]
    fn four_by_four_uniform_weights_balanced() {
        let bbox = Rect::closed(0, 0, 8, 8).unwrap();
        let mut dual = build_dual(&grid_partition(&bbox, 4), &bbox);
        dual.weights = vec![1; 16];
        let cycle = cycle_separator(&dual).unwrap();
        assert!(is_feasible(&dual, &cycle));
        let total: u64 = 16;
        assert!(3 * cycle.w_in <= 2 * total && 3 * cycle.w_out <= 2 * total);
    }

    #[test]
    fn concentrated_weight_still_separable() {
        let bbox = Rect::closed(0, 0, 8, 8).unwrap();
        let mut dual = build_dual(&grid_partition(&bbox, 4), &bbox);
        dual.weights = vec![0; 16];
        dual.weights[5] = 100;
        let cycle = cycle_separator(&dual).unwrap();
        assert!(is_feasible(&dual, &cycle));
    }

    #[test]
    fn weight_on_one_face_cycle() {
        // All weight sits on the four cells around an interior vertex; the
        // 4-cycle through them leaves weight zero on both sides.
        let bbox = Rect::closed(0, 0, 8, 8).unwrap();
        let mut dual = build_dual(&grid_partition(&bbox, 4), &bbox);
        dual.weights = vec![0; 16];
        for i in [5usize, 6, 9, 10] {
            dual.weights[i] = 5;
        }
        let cycle = cycle_separator(&dual).unwrap();
        assert_eq!(cycle.w_in.max(cycle.w_out), 0);
    }

    #[test]
    fn search_matches_bruteforce_oracle_feasibility() {
        for seed in 0..8u64 {
            let inst = generate(GenKind::UniformRandom, 8, seed).unwrap();
            let params = Parameters::default();
            let opt = exact_mis(&inst, params.node_budget).unwrap();
            let p =
                build_r_good_partition(&inst, &FakeSet::empty(), &opt, 3, seed, &params).unwrap();
            let mut dual = build_dual(&p, &inst.bounding_box);
            if dual.cells.len() + 1 > 18 {
                continue;
            }
            for (i, cell) in p.cells.iter().enumerate() {
                dual.weights[i] = cell.n_p;
            }
            let ours = cycle_separator(&dual);
            let oracle = crate::oracle::bruteforce_feasible_cycle_exists(&dual);
            assert_eq!(ours.is_ok(), oracle, "seed {seed}");
            if let Ok(cycle) = ours {
                assert!(is_feasible(&dual, &cycle));
            }
        }
    }
}
