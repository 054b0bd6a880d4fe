//! Brute-force reference implementations and randomized test inputs.
//!
//! Everything here is deliberately simple and independent of the production
//! code paths it is used to check: membership is decided by sampling
//! half-integer points, optima by enumerating all subsets, separators by
//! enumerating all simple cycles.

use crate::geometry::{Rect, RectilinearPolygon};
use crate::solvers::ConflictGraph;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Half-integer sample points (k + 1/2 offsets) covering `bbox`, in doubled
/// coordinates.
fn sample_points2(bbox: &Rect) -> Vec<(i64, i64)> {
    let mut pts = Vec::new();
    for x in bbox.x1..bbox.x2 {
        for y in bbox.y1..bbox.y2 {
            pts.push((2 * x + 1, 2 * y + 1));
        }
    }
    pts
}

fn point2_in_closed_rect(r: &Rect, px2: i64, py2: i64) -> bool {
    2 * r.x1 <= px2 && px2 <= 2 * r.x2 && 2 * r.y1 <= py2 && py2 <= 2 * r.y2
}

/// Rasterized check that closed tiles exactly cover the polygon and are
/// pairwise internally disjoint.
pub fn assert_tiles_match_polygon(p: &RectilinearPolygon, tiles: &[Rect]) {
    let bbox = p.bounding_rect();
    for (px2, py2) in sample_points2(&bbox) {
        let in_poly = p.contains_point2(px2, py2);
        let cover = tiles.iter().filter(|t| point2_in_closed_rect(t, px2, py2)).count();
        assert!(
            (in_poly && cover == 1) || (!in_poly && cover == 0),
            "tiling mismatch at ({px2}/2, {py2}/2): in_poly={in_poly} cover={cover}"
        );
    }
}

/// Rasterized check that closed tiles exactly cover `b \ p` and are pairwise
/// internally disjoint.
pub fn assert_tiles_match_complement(p: &RectilinearPolygon, b: &Rect, tiles: &[Rect]) {
    for (px2, py2) in sample_points2(b) {
        let in_poly = p.contains_point2(px2, py2);
        let cover = tiles.iter().filter(|t| point2_in_closed_rect(t, px2, py2)).count();
        assert!(
            (!in_poly && cover == 1) || (in_poly && cover == 0),
            "complement tiling mismatch at ({px2}/2, {py2}/2): in_poly={in_poly} cover={cover}"
        );
    }
}

/// Maximum independent set value by enumerating all `2^n` index subsets.
pub fn naive_mis_value(graph: &ConflictGraph) -> u64 {
    assert!(graph.n <= 24, "naive enumeration is limited to small instances");
    let mut best = 0u64;
    for subset in 0u64..(1u64 << graph.n) {
        let mut ok = true;
        for i in 0..graph.n {
            if subset >> i & 1 == 1 && (graph.adj[i] as u64) & subset != 0 {
                ok = false;
                break;
            }
        }
        if ok {
            best = best.max(subset.count_ones() as u64);
        }
    }
    best
}

/// Brute-force existence check for a feasible separator cycle: enumerate all
/// simple cycles (with and without the outer vertex) up to the length bound
/// by plain DFS, deduplicate, and test each with the shared side-evaluation
/// geometry. Intended for duals with at most ~18 vertices.
pub fn bruteforce_feasible_cycle_exists(dual: &crate::separators::DualGraph) -> bool {
    use crate::separators::{evaluate_cycle, is_feasible, RawCycle};
    let n = dual.cells.len();
    assert!(n + 1 <= 18, "brute-force cycle oracle is limited to 18 vertices");
    let bound = crate::separators::length_bound(dual).floor() as usize;
    let mut seen = std::collections::BTreeSet::new();
    let mut found = false;

    // Pure cell cycles: every simple path that closes back to its start.
    fn extend(
        dual: &crate::separators::DualGraph,
        path: &mut Vec<usize>,
        bound: usize,
        seen: &mut std::collections::BTreeSet<Vec<usize>>,
        found: &mut bool,
    ) {
        if *found {
            return;
        }
        let cur = *path.last().unwrap();
        if path.len() >= 3 && dual.adj[cur].iter().any(|e| e.to == path[0]) {
            let mut key = path.clone();
            key.sort_unstable();
            if seen.insert(key) {
                let raw = RawCycle {
                    cells: path.clone(),
                    uses_outer: false,
                    entry: None,
                    exit: None,
                };
                if is_feasible(dual, &evaluate_cycle(dual, &raw)) {
                    *found = true;
                    return;
                }
            }
        }
        if path.len() == bound {
            return;
        }
        for k in 0..dual.adj[cur].len() {
            let to = dual.adj[cur][k].to;
            if path.contains(&to) {
                continue;
            }
            path.push(to);
            extend(dual, path, bound, seen, found);
            path.pop();
        }
    }
    for start in 0..n {
        let mut path = vec![start];
        extend(dual, &mut path, bound, &mut seen, &mut found);
        if found {
            return true;
        }
    }

    // Cycles through the outer vertex: all simple paths between boundary
    // cells, with every entry/exit segment combination.
    fn extend_paths(
        dual: &crate::separators::DualGraph,
        path: &mut Vec<usize>,
        bound: usize,
        found: &mut bool,
    ) {
        if *found {
            return;
        }
        let last = *path.last().unwrap();
        if !dual.boundary_segs[last].is_empty() {
            for &entry in &dual.boundary_segs[path[0]] {
                for &exit in &dual.boundary_segs[last] {
                    if path.len() == 1 && entry == exit {
                        continue;
                    }
                    let raw = RawCycle {
                        cells: path.clone(),
                        uses_outer: true,
                        entry: Some(entry),
                        exit: Some(exit),
                    };
                    if is_feasible(dual, &evaluate_cycle(dual, &raw)) {
                        *found = true;
                        return;
                    }
                }
            }
        }
        if path.len() + 1 == bound {
            return;
        }
        for k in 0..dual.adj[last].len() {
            let to = dual.adj[last][k].to;
            if path.contains(&to) {
                continue;
            }
            path.push(to);
            extend_paths(dual, path, bound, found);
            path.pop();
        }
    }
    for start in 0..n {
        if dual.boundary_segs[start].is_empty() {
            continue;
        }
        let mut path = vec![start];
        extend_paths(dual, &mut path, bound, &mut found);
        if found {
            return true;
        }
    }
    false
}

/// Adjacency matrix of the instance's intersection graph as row bitmasks.
pub fn adjacency_matrix(inst: &crate::instance::Instance) -> Vec<u128> {
    let n = inst.rects.len();
    let mut rows = vec![0u128; n];
    for i in 0..n {
        for j in 0..n {
            if i != j && crate::geometry::intersects(&inst.rects[i], &inst.rects[j]) {
                rows[i] |= 1u128 << j;
            }
        }
    }
    rows
}

/// Random simple rectilinear polygon with at most `max_corners` corners,
/// grown as a pinch-free cell blob and traced. Deterministic in `seed`.
pub fn random_rectilinear_polygon(seed: u64, max_corners: usize) -> RectilinearPolygon {
    assert!(max_corners >= 4);
    for attempt in 0..64u64 {
        let mut rng = ChaCha8Rng::seed_from_u64(seed.wrapping_add(attempt.wrapping_mul(0x9e37)));
        let k = 6usize;
        let target_cells = 2 + rng.gen_range(0..8);
        let mut cells = std::collections::BTreeSet::new();
        let mut frontier = vec![(k as i64 / 2, k as i64 / 2)];
        cells.insert(frontier[0]);
        while cells.len() < target_cells && !frontier.is_empty() {
            let idx = rng.gen_range(0..frontier.len());
            let (cx, cy) = frontier[idx];
            let dirs = [(1i64, 0i64), (-1, 0), (0, 1), (0, -1)];
            let d = dirs[rng.gen_range(0..4)];
            let nxt = (cx + d.0, cy + d.1);
            if nxt.0 < 0 || nxt.1 < 0 || nxt.0 >= k as i64 || nxt.1 >= k as i64 {
                continue;
            }
            cells.insert(nxt);
            frontier.push(nxt);
        }
        // Fill holes: complement cells not reachable from the border.
        let mut outside = std::collections::BTreeSet::new();
        let mut stack: Vec<(i64, i64)> = Vec::new();
        for i in -1..=k as i64 {
            for j in [-1i64, k as i64] {
                stack.push((i, j));
                stack.push((j, i));
            }
        }
        while let Some((cx, cy)) = stack.pop() {
            if cx < -1 || cy < -1 || cx > k as i64 || cy > k as i64 {
                continue;
            }
            if cells.contains(&(cx, cy)) || outside.contains(&(cx, cy)) {
                continue;
            }
            outside.insert((cx, cy));
            stack.extend([(cx + 1, cy), (cx - 1, cy), (cx, cy + 1), (cx, cy - 1)]);
        }
        for x in 0..k as i64 {
            for y in 0..k as i64 {
                if !outside.contains(&(x, y)) {
                    cells.insert((x, y));
                }
            }
        }
        // Repair diagonal pinches by filling one of the missing quadrants.
        loop {
            let mut fixed = false;
            let snapshot: Vec<(i64, i64)> = cells.iter().copied().collect();
            for (x, y) in snapshot {
                for (dx, dy) in [(1i64, 1i64), (1, -1)] {
                    let diag = (x + dx, y + dy);
                    let a = (x + dx, y);
                    let b = (x, y + dy);
                    if cells.contains(&diag) && !cells.contains(&a) && !cells.contains(&b) {
                        cells.insert(a);
                        fixed = true;
                    }
                }
            }
            if !fixed {
                break;
            }
        }
        // Trace via the shared machinery over a unit arrangement.
        let max = k as i64 + 2;
        let bbox = Rect::closed(0, 0, max, max).unwrap();
        let covers: Vec<Rect> = cells
            .iter()
            .map(|(x, y)| Rect::closed(*x, *y, x + 1, y + 1).unwrap())
            .collect();
        let xs: Vec<i64> = (0..=max).collect();
        let arr = crate::cells::Arrangement::new(&bbox, &xs, &xs);
        let mut mask = crate::cells::CellMask::empty(arr.n_cells());
        for r in &covers {
            for row in 0..arr.n_rows() {
                for col in 0..arr.n_cols() {
                    let (cx2, cy2) = arr.cell_center2(col, row);
                    if 2 * r.x1 < cx2 && cx2 < 2 * r.x2 && 2 * r.y1 < cy2 && cy2 < 2 * r.y2 {
                        mask.set(arr.cell_index(col, row));
                    }
                }
            }
        }
        if let Ok(poly) = crate::cells::trace_boundary(&arr, &mask) {
            if poly.corner_count() <= max_corners {
                return poly;
            }
        }
    }
    // Fallback: a plain rectangle always satisfies the contract.
    RectilinearPolygon::from_rect(&Rect::closed(0, 0, 2, 2).unwrap())
}

/// Random raw rectangles with deliberate coordinate ties, for exercising the
/// degenerate paths of canonicalization.
pub fn random_raw_rects_with_ties(seed: u64, n: usize) -> Vec<crate::instance::RawRect> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let span = (4 * n.max(2)) as i64;
    let mut out = Vec::with_capacity(n);
    for _ in 0..n {
        let x1 = rng.gen_range(0..span - 1);
        let y1 = rng.gen_range(0..span - 1);
        let w = rng.gen_range(1..=span - x1 - 1).min(1 + rng.gen_range(0..span / 2));
        let h = rng.gen_range(1..=span - y1 - 1).min(1 + rng.gen_range(0..span / 2));
        out.push(crate::instance::RawRect {
            x1: x1 as f64,
            y1: y1 as f64,
            x2: (x1 + w) as f64,
            y2: (y1 + h) as f64,
        });
    }
    out
}
