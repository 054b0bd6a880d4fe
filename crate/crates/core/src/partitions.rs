//! Randomized r-good partitions of the bounding box into rectangular cells,
//! and their grid-aligned variant.

use crate::fakes::FakeSet;
use crate::geometry::{intersects, AlignmentPointSet, Rect};
use crate::grids::Grid;
use crate::instance::Instance;
use crate::params::Parameters;
use crate::solvers::IndependentSet;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct PartitionCell {
    pub rect: Rect,
    pub is_fake: bool,
    /// Number of the reference optimum's rectangles intersecting the closed
    /// cell.
    pub n_p: u64,
    /// `floor(r * n_p / opt)`.
    pub excess: u64,
}

/// Partition of the bounding box into rectangular cells with per-cell stats.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CellPartition {
    pub cells: Vec<PartitionCell>,
    pub r: u64,
    pub opt_size: u64,
}

#[derive(Debug, Error)]
pub enum PartitionError {
    #[error("precondition violated: {0}")]
    Precondition(String),
    #[error("no r-good partition found in {attempts} attempts (last cell count {last_cells}, worst n_p {worst_np}, bound {np_bound})")]
    RetriesExhausted { attempts: u32, last_cells: usize, worst_np: u64, np_bound: u64 },
    #[error("partition construction failed: {0}")]
    Internal(String),
    #[error("fake set invalid: {0}")]
    Fakes(#[from] crate::fakes::FakeSetError),
}

impl CellPartition {
    pub fn corner_set(&self) -> AlignmentPointSet {
        AlignmentPointSet::from_rects(self.cells.iter().map(|c| &c.rect))
    }

    pub fn cell_count(&self) -> usize {
        self.cells.len()
    }

    /// Exact tiling check: pairwise internal disjointness plus area identity.
    pub fn is_tiling_of(&self, bbox: &Rect) -> bool {
        let total: i64 = self.cells.iter().map(|c| c.rect.area()).sum();
        if total != bbox.area() {
            return false;
        }
        for c in &self.cells {
            if !bbox.contains_rect(&c.rect) {
                return false;
            }
        }
        for i in 0..self.cells.len() {
            for j in (i + 1)..self.cells.len() {
                if intersects(&self.cells[i].rect.as_open(), &self.cells[j].rect.as_open()) {
                    return false;
                }
            }
        }
        true
    }

    /// Recount of each cell's intersection count against the optimum.
    pub fn recount(&self, inst: &Instance, opt: &IndependentSet) -> Vec<u64> {
        self.cells.iter().map(|c| count_intersecting(inst, opt, &c.rect)).collect()
    }
}

fn count_intersecting(inst: &Instance, opt: &IndependentSet, cell: &Rect) -> u64 {
    opt.indices
        .iter()
        .filter(|i| intersects(&inst.rects[**i].as_open(), &cell.as_closed()))
        .count() as u64
}

/// Raw wall-based partition: boundaries of the obstacle rectangles, the
/// bounding box, and vertical rays shot from every obstacle corner (top
/// corners up, bottom corners down) to the first boundary they reach.
fn ray_partition(bbox: &Rect, obstacles: &[Rect]) -> Result<Vec<Rect>, PartitionError> {
    let mut xs: Vec<i64> = vec![bbox.x1, bbox.x2];
    let mut ys: Vec<i64> = vec![bbox.y1, bbox.y2];
    for r in obstacles {
        xs.extend([r.x1, r.x2]);
        ys.extend([r.y1, r.y2]);
    }
    xs.sort_unstable();
    xs.dedup();
    ys.sort_unstable();
    ys.dedup();
    let ncols = xs.len() - 1;
    let nrows = ys.len() - 1;
    let xi = |x: i64| xs.binary_search(&x).expect("coordinate in arrangement");
    let yi = |y: i64| ys.binary_search(&y).expect("coordinate in arrangement");

    // blocked_v[i][j]: vertical line x = xs[i] blocks crossing between
    // columns i-1 and i at row j; blocked_h analogous for horizontal lines.
    let mut blocked_v = vec![vec![false; nrows]; xs.len()];
    let mut blocked_h = vec![vec![false; ncols]; ys.len()];
    {
        let mut mark_v = |x: i64, ya: i64, yb: i64| {
            if ya >= yb {
                return;
            }
            let i = xi(x);
            for j in yi(ya)..yi(yb) {
                blocked_v[i][j] = true;
            }
        };
        for r in obstacles {
            mark_v(r.x1, r.y1, r.y2);
            mark_v(r.x2, r.y1, r.y2);
        }
        mark_v(bbox.x1, bbox.y1, bbox.y2);
        mark_v(bbox.x2, bbox.y1, bbox.y2);
        // Rays from the four corners of each obstacle.
        for (k, r) in obstacles.iter().enumerate() {
            for x in [r.x1, r.x2] {
                let up = ray_hit_up(x, r.y2, k, obstacles, bbox);
                mark_v(x, r.y2, up);
                let down = ray_hit_down(x, r.y1, k, obstacles, bbox);
                mark_v(x, down, r.y1);
            }
        }
    }
    {
        let mut mark_h = |y: i64, xa: i64, xb: i64| {
            if xa >= xb {
                return;
            }
            let j = yi(y);
            for i in xi(xa)..xi(xb) {
                blocked_h[j][i] = true;
            }
        };
        for r in obstacles {
            mark_h(r.y1, r.x1, r.x2);
            mark_h(r.y2, r.x1, r.x2);
        }
        mark_h(bbox.y1, bbox.x1, bbox.x2);
        mark_h(bbox.y2, bbox.x1, bbox.x2);
    }

    // Flood fill elementary cells into partition cells.
    let mut owner = vec![usize::MAX; ncols * nrows];
    let mut cells: Vec<Rect> = Vec::new();
    for start in 0..ncols * nrows {
        if owner[start] != usize::MAX {
            continue;
        }
        let id = cells.len();
        let mut stack = vec![start];
        owner[start] = id;
        let mut min_c = usize::MAX;
        let mut max_c = 0usize;
        let mut min_r = usize::MAX;
        let mut max_r = 0usize;
        let mut area = 0i64;
        while let Some(cur) = stack.pop() {
            let (c, row) = (cur % ncols, cur / ncols);
            min_c = min_c.min(c);
            max_c = max_c.max(c);
            min_r = min_r.min(row);
            max_r = max_r.max(row);
            area += (xs[c + 1] - xs[c]) * (ys[row + 1] - ys[row]);
            let mut visit = |nc: usize, nr: usize| {
                let idx = nr * ncols + nc;
                if owner[idx] == usize::MAX {
                    owner[idx] = id;
                    stack.push(idx);
                }
            };
            if c > 0 && !blocked_v[c][row] {
                visit(c - 1, row);
            }
            if c + 1 < ncols && !blocked_v[c + 1][row] {
                visit(c + 1, row);
            }
            if row > 0 && !blocked_h[row][c] {
                visit(c, row - 1);
            }
            if row + 1 < nrows && !blocked_h[row + 1][c] {
                visit(c, row + 1);
            }
        }
        let rect = Rect::closed(xs[min_c], ys[min_r], xs[max_c + 1], ys[max_r + 1])
            .map_err(|e| PartitionError::Internal(e.to_string()))?;
        if rect.area() != area {
            return Err(PartitionError::Internal(format!(
                "ray-shooting produced a non-rectangular cell near {:?}",
                rect.coords_key()
            )));
        }
        cells.push(rect);
    }
    Ok(cells)
}

/// First boundary at or above `y0` on the vertical line through `x`,
/// ignoring the originating obstacle; obstacles are scanned in index order.
fn ray_hit_up(x: i64, y0: i64, origin: usize, obstacles: &[Rect], bbox: &Rect) -> i64 {
    let mut best = bbox.y2;
    for (k, r) in obstacles.iter().enumerate() {
        if k == origin || x < r.x1 || x > r.x2 {
            continue;
        }
        if r.y2 >= y0 {
            best = best.min(r.y1.max(y0));
        }
    }
    best
}

/// First boundary at or below `y0`, mirror of `ray_hit_up`.
fn ray_hit_down(x: i64, y0: i64, origin: usize, obstacles: &[Rect], bbox: &Rect) -> i64 {
    let mut best = bbox.y1;
    for (k, r) in obstacles.iter().enumerate() {
        if k == origin || x < r.x1 || x > r.x2 {
            continue;
        }
        if r.y1 <= y0 {
            best = best.max(r.y2.min(y0));
        }
    }
    best
}

/// Quantile subdivision of an excess cell: at most `t^2` rectangular cells,
/// each intersecting at most `10 opt / r` rectangles of the optimum. Grid
/// lines are placed at the leftmost (bottommost) positions where the count of
/// rectangles fully to the left (below) reaches `i * n_c / t`.
pub fn subdivide_excess_cell(
    inst: &Instance,
    opt: &IndependentSet,
    cell: &Rect,
    r: u64,
    t: u64,
) -> Vec<Rect> {
    let hitting: Vec<usize> = opt
        .indices
        .iter()
        .copied()
        .filter(|i| intersects(&inst.rects[*i].as_open(), &cell.as_closed()))
        .collect();
    let n_c = hitting.len() as u64;
    debug_assert!(opt.value() == 0 || t <= r * n_c / opt.value(), "t must be the cell's excess");
    let quantile_lines = |coords: &mut Vec<i64>| -> Vec<i64> {
        coords.sort_unstable();
        let mut lines = Vec::new();
        for i in 1..t {
            let k = ((i as u128 * n_c as u128 + t as u128 - 1) / t as u128) as usize;
            if k == 0 || k > coords.len() {
                continue;
            }
            lines.push(coords[k - 1]);
        }
        lines
    };
    let mut right_bounds: Vec<i64> = hitting.iter().map(|i| inst.rects[*i].x2).collect();
    let mut top_bounds: Vec<i64> = hitting.iter().map(|i| inst.rects[*i].y2).collect();
    let mut vlines: Vec<i64> = quantile_lines(&mut right_bounds)
        .into_iter()
        .filter(|x| cell.x1 < *x && *x < cell.x2)
        .collect();
    let mut hlines: Vec<i64> = quantile_lines(&mut top_bounds)
        .into_iter()
        .filter(|y| cell.y1 < *y && *y < cell.y2)
        .collect();
    vlines.push(cell.x1);
    vlines.push(cell.x2);
    hlines.push(cell.y1);
    hlines.push(cell.y2);
    vlines.sort_unstable();
    vlines.dedup();
    hlines.sort_unstable();
    hlines.dedup();
    let mut out = Vec::new();
    for vw in vlines.windows(2) {
        for hw in hlines.windows(2) {
            out.push(Rect::closed(vw[0], hw[0], vw[1], hw[1]).expect("positive cell"));
        }
    }
    out
}

fn finalize_partition(
    inst: &Instance,
    f: &FakeSet,
    opt: &IndependentSet,
    r: u64,
    raw_cells: Vec<Rect>,
) -> CellPartition {
    let opt_size = opt.value();
    let fake_keys: std::collections::BTreeSet<_> =
        f.rects.iter().map(|x| x.coords_key()).collect();
    let mut cells = Vec::with_capacity(raw_cells.len());
    for rect in raw_cells {
        let is_fake = fake_keys.contains(&rect.coords_key());
        let n_p = count_intersecting(inst, opt, &rect);
        let excess = if opt_size == 0 { 0 } else { r * n_p / opt_size };
        cells.push(PartitionCell { rect, is_fake, n_p, excess });
    }
    cells.sort_by_key(|c| c.rect.coords_key());
    CellPartition { cells, r, opt_size }
}

/// The three defining clauses, with the configured cell-count constant.
pub fn is_r_good(
    partition: &CellPartition,
    inst: &Instance,
    f: &FakeSet,
    opt: &IndependentSet,
    r: u64,
    count_constant: u64,
) -> bool {
    let fake_keys: std::collections::BTreeSet<_> =
        f.rects.iter().map(|x| x.coords_key()).collect();
    let mut fakes_found = 0usize;
    for cell in &partition.cells {
        let is_fake = fake_keys.contains(&cell.rect.coords_key());
        if is_fake {
            fakes_found += 1;
            continue;
        }
        let n_p = count_intersecting(inst, opt, &cell.rect);
        if r * n_p > 20 * opt.value() {
            return false;
        }
    }
    fakes_found == f.rects.len() && partition.cells.len() as u64 <= count_constant * r
}

fn check_preconditions(
    f: &FakeSet,
    opt: &IndependentSet,
    r: u64,
    params: &Parameters,
) -> Result<(), PartitionError> {
    let m = f.rects.len() as u64;
    if r < m.max(3) {
        return Err(PartitionError::Precondition(format!(
            "r = {r} below max(|F|, 3) = {}",
            m.max(3)
        )));
    }
    if params.strict && 2 * r > opt.value() {
        return Err(PartitionError::Precondition(format!(
            "strict mode requires r <= opt/2, got r = {r}, opt = {}",
            opt.value()
        )));
    }
    Ok(())
}

/// Builds an r-good partition with respect to `f` and the exact optimum
/// `opt`: two independent samples of the optimum plus all fakes define a
/// ray-shooting partition, excess cells are subdivided, and the construction
/// retries over derived seeds until all three clauses hold.
pub fn build_r_good_partition(
    inst: &Instance,
    f: &FakeSet,
    opt: &IndependentSet,
    r: u64,
    seed: u64,
    params: &Parameters,
) -> Result<CellPartition, PartitionError> {
    f.validate(&inst.bounding_box)?;
    check_preconditions(f, opt, r, params)?;
    build_r_good_inner(inst, f, opt, r, seed, params, params.c_star)
}

fn build_r_good_inner(
    inst: &Instance,
    f: &FakeSet,
    opt: &IndependentSet,
    r: u64,
    seed: u64,
    params: &Parameters,
    count_constant: u64,
) -> Result<CellPartition, PartitionError> {
    let mut last_cells = 0usize;
    let mut worst_np = 0u64;
    for attempt in 0..params.retry_limit {
        let attempt_seed = crate::derive_seed(seed, "r-good", attempt as u64);
        match attempt_r_good(inst, f, opt, r, attempt_seed) {
            Ok(candidate) => {
                if is_r_good(&candidate, inst, f, opt, r, count_constant) {
                    return Ok(candidate);
                }
                last_cells = candidate.cells.len();
                worst_np = candidate
                    .cells
                    .iter()
                    .filter(|c| !c.is_fake)
                    .map(|c| c.n_p)
                    .max()
                    .unwrap_or(0);
            }
            Err(PartitionError::Internal(_)) => continue,
            Err(e) => return Err(e),
        }
    }
    Err(PartitionError::RetriesExhausted {
        attempts: params.retry_limit,
        last_cells,
        worst_np,
        np_bound: if r == 0 { 0 } else { 20 * opt.value() / r },
    })
}

fn attempt_r_good(
    inst: &Instance,
    f: &FakeSet,
    opt: &IndependentSet,
    r: u64,
    seed: u64,
) -> Result<CellPartition, PartitionError> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let opt_size = opt.value();
    let p = if opt_size == 0 { 0.0 } else { (r as f64 / opt_size as f64).min(1.0) };
    // Two independent samples; membership in either one puts the rectangle
    // into the obstacle set.
    let mut obstacles: Vec<Rect> = f.rects.clone();
    for &i in &opt.indices {
        let in_s1 = rng.gen_bool(p);
        let in_s2 = rng.gen_bool(p);
        if in_s1 || in_s2 {
            obstacles.push(inst.rects[i].as_closed());
        }
    }
    let raw = ray_partition(&inst.bounding_box, &obstacles)?;
    let initial = finalize_partition(inst, f, opt, r, raw);
    // Subdivide cells with excess at least 10.
    let mut final_cells = Vec::new();
    for cell in &initial.cells {
        if !cell.is_fake && cell.excess >= 10 {
            final_cells.extend(subdivide_excess_cell(inst, opt, &cell.rect, r, cell.excess));
        } else {
            final_cells.push(cell.rect);
        }
    }
    let partition = finalize_partition(inst, f, opt, r, final_cells);
    if !partition.is_tiling_of(&inst.bounding_box) {
        return Err(PartitionError::Internal("partition does not tile the box".into()));
    }
    Ok(partition)
}

/// Builds a grid-aligned r-good partition: an (8r)-good partition is split at
/// the extreme grid lines crossing each cell, small cells are replaced by
/// runs of grid cells, and all clauses plus grid alignment are enforced.
pub fn build_grid_aligned_r_good(
    inst: &Instance,
    f: &FakeSet,
    opt: &IndependentSet,
    r: u64,
    grid: &Grid,
    seed: u64,
    params: &Parameters,
) -> Result<CellPartition, PartitionError> {
    f.validate(&inst.bounding_box)?;
    check_preconditions(f, opt, r, params)?;
    if params.strict && 16 * r > opt.value() {
        return Err(PartitionError::Precondition(format!(
            "strict mode requires r <= opt/16, got r = {r}, opt = {}",
            opt.value()
        )));
    }
    let z = grid.point_set();
    if !f.is_aligned_with(&z) {
        return Err(PartitionError::Precondition("fake set is not aligned with the grid".into()));
    }
    let r_inner = 8 * r;
    let mut last_err = None;
    for attempt in 0..params.retry_limit {
        let attempt_seed = crate::derive_seed(seed, "grid-aligned", attempt as u64);
        let base = match attempt_r_good(inst, f, opt, r_inner, attempt_seed) {
            Ok(p) => p,
            Err(e) => {
                last_err = Some(e);
                continue;
            }
        };
        match align_partition(inst, f, opt, r, grid, base) {
            Ok(candidate) => {
                let aligned = candidate.cells.iter().all(|c| z.is_rect_aligned(&c.rect));
                if aligned && is_r_good(&candidate, inst, f, opt, r, params.c_star_star) {
                    return Ok(candidate);
                }
            }
            Err(e) => last_err = Some(e),
        }
    }
    Err(last_err.unwrap_or(PartitionError::RetriesExhausted {
        attempts: params.retry_limit,
        last_cells: 0,
        worst_np: 0,
        np_bound: if r == 0 { 0 } else { 20 * opt.value() / r },
    }))
}

fn align_partition(
    inst: &Instance,
    f: &FakeSet,
    opt: &IndependentSet,
    r: u64,
    grid: &Grid,
    base: CellPartition,
) -> Result<CellPartition, PartitionError> {
    // Pass 1: split every cell at the extreme grid lines crossing it, first
    // vertically then horizontally.
    let split_axis = |cells: Vec<Rect>, vertical: bool| -> Vec<Rect> {
        let lines = if vertical { &grid.vlines } else { &grid.hlines };
        let mut out = Vec::new();
        for c in cells {
            let (lo, hi) = if vertical { (c.x1, c.x2) } else { (c.y1, c.y2) };
            let inside: Vec<i64> =
                lines.iter().copied().filter(|l| lo < *l && *l < hi).collect();
            if inside.is_empty() {
                out.push(c);
                continue;
            }
            let cuts = [lo, *inside.first().unwrap(), *inside.last().unwrap(), hi];
            let mut uniq: Vec<i64> = cuts.to_vec();
            uniq.sort_unstable();
            uniq.dedup();
            for w in uniq.windows(2) {
                let piece = if vertical {
                    Rect::closed(w[0], c.y1, w[1], c.y2)
                } else {
                    Rect::closed(c.x1, w[0], c.x2, w[1])
                };
                out.push(piece.expect("split piece has positive area"));
            }
        }
        out
    };
    let cells0: Vec<Rect> = base.cells.iter().map(|c| c.rect).collect();
    let split = split_axis(split_axis(cells0, true), false);

    let in_strip = |lines: &[i64], lo: i64, hi: i64| -> Option<usize> {
        // Strip index whose [l_i, l_{i+1}] contains [lo, hi].
        let idx = lines.partition_point(|l| *l <= lo);
        if idx == 0 {
            return None;
        }
        let i = idx - 1;
        if i + 1 < lines.len() && lines[i] <= lo && hi <= lines[i + 1] {
            Some(i)
        } else {
            None
        }
    };
    let fake_keys: std::collections::BTreeSet<_> =
        f.rects.iter().map(|x| x.coords_key()).collect();

    #[derive(PartialEq, Clone, Copy)]
    enum Kind {
        Large,
        Small,
    }
    let classify = |c: &Rect| -> Kind {
        if fake_keys.contains(&c.coords_key()) {
            return Kind::Large;
        }
        let v = in_strip(&grid.vlines, c.x1, c.x2).is_some();
        let h = in_strip(&grid.hlines, c.y1, c.y2).is_some();
        if v || h {
            Kind::Small
        } else {
            Kind::Large
        }
    };

    let nv = grid.vlines.len() - 1;
    let nh = grid.hlines.len() - 1;
    let gcell = |i: usize, j: usize| -> Rect {
        Rect::closed(grid.vlines[i], grid.hlines[j], grid.vlines[i + 1], grid.hlines[j + 1])
            .expect("grid cell")
    };
    let mut marked = vec![vec![false; nh]; nv];
    let mut out: Vec<Rect> = Vec::new();

    // Large cells pass through unchanged and mark the grid cells they cover.
    for c in &split {
        if classify(c) == Kind::Large {
            out.push(*c);
            for i in 0..nv {
                for j in 0..nh {
                    if c.contains_rect(&gcell(i, j)) {
                        marked[i][j] = true;
                    }
                }
            }
        }
    }

    // Neutral grid cells: any split-cell corner on or inside them.
    let corners: Vec<crate::geometry::Point> =
        split.iter().flat_map(|c| c.corners().to_vec()).collect();
    for i in 0..nv {
        for j in 0..nh {
            if marked[i][j] {
                continue;
            }
            let g = gcell(i, j);
            if corners.iter().any(|p| g.contains_point(*p)) {
                marked[i][j] = true;
                out.push(g);
            }
        }
    }

    // Remaining grid cells are crossed by small cells either vertically or
    // horizontally; merge maximal runs.
    let orientation = |i: usize, j: usize| -> Result<bool, PartitionError> {
        let g = gcell(i, j);
        for c in &split {
            if classify(c) == Kind::Small && intersects(&g.as_open(), &c.as_open()) {
                let vertical = in_strip(&grid.vlines, c.x1, c.x2) == Some(i);
                let horizontal = in_strip(&grid.hlines, c.y1, c.y2) == Some(j);
                if vertical == horizontal {
                    return Err(PartitionError::Internal(
                        "ambiguous small-cell orientation".into(),
                    ));
                }
                return Ok(vertical);
            }
        }
        Err(PartitionError::Internal("unmarked grid cell not crossed by a small cell".into()))
    };
    for i in 0..nv {
        let mut j = 0;
        while j < nh {
            if marked[i][j] || !orientation(i, j)? {
                j += 1;
                continue;
            }
            let start = j;
            while j < nh && !marked[i][j] && orientation(i, j)? {
                marked[i][j] = true;
                j += 1;
            }
            out.push(
                Rect::closed(
                    grid.vlines[i],
                    grid.hlines[start],
                    grid.vlines[i + 1],
                    grid.hlines[j],
                )
                .expect("vertical run"),
            );
        }
    }
    for j in 0..nh {
        let mut i = 0;
        while i < nv {
            if marked[i][j] {
                i += 1;
                continue;
            }
            let start = i;
            while i < nv && !marked[i][j] {
                marked[i][j] = true;
                i += 1;
            }
            out.push(
                Rect::closed(
                    grid.vlines[start],
                    grid.hlines[j],
                    grid.vlines[i],
                    grid.hlines[j + 1],
                )
                .expect("horizontal run"),
            );
        }
    }

    let partition = finalize_partition(inst, f, opt, r, out);
    if !partition.is_tiling_of(&inst.bounding_box) {
        return Err(PartitionError::Internal("aligned partition does not tile the box".into()));
    }
    Ok(partition)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grids::{build_rho_accurate_grid, Rho};
    use crate::instance::{generate, GenKind};
    use crate::solvers::{exact_mis, ConflictGraph};

    fn setup(kind: GenKind, n: usize, seed: u64) -> (Instance, IndependentSet, Parameters) {
        let inst = generate(kind, n, seed).unwrap();
        let params = Parameters::default();
        let opt = exact_mis(&inst, params.node_budget).unwrap();
        (inst, opt, params)
    }

    #[test]
    fn disjoint_grid_r4_is_r_good() {
        let (inst, opt, params) = setup(GenKind::DisjointGrid, 16, 1);
        let f = FakeSet::empty();
        let p = build_r_good_partition(&inst, &f, &opt, 4, 7, &params).unwrap();
        assert!(is_r_good(&p, &inst, &f, &opt, 4, params.c_star));
        assert!(p.is_tiling_of(&inst.bounding_box));
        // Stored stats match a recount.
        let recounted = p.recount(&inst, &opt);
        for (cell, fresh) in p.cells.iter().zip(recounted) {
            assert_eq!(cell.n_p, fresh);
        }
    }

    #[test]
    fn fake_rects_stay_cells() {
        let (inst, _, params) = setup(GenKind::UniformRandom, 10, 3);
        let f = FakeSet::new(vec![Rect::closed(0, 0, 2, 2).unwrap()]);
        let mask = crate::fakes::induced_mask(&inst, &f);
        let graph = ConflictGraph::new(&inst).unwrap();
        let opt = crate::solvers::mis_set(&graph, mask, params.node_budget).unwrap();
        let p = build_r_good_partition(&inst, &f, &opt, 4, 11, &params).unwrap();
        let found = p
            .cells
            .iter()
            .any(|c| c.is_fake && c.rect.coords_key() == (0, 0, 2, 2));
        assert!(found, "fake rectangle must appear verbatim as a cell");
    }

    #[test]
    fn degenerate_r_at_half_opt_still_valid() {
        let (inst, opt, params) = setup(GenKind::DisjointGrid, 9, 5);
        let r = opt.value() / 2;
        let p = build_r_good_partition(&inst, &FakeSet::empty(), &opt, r.max(3), 2, &params)
            .unwrap();
        assert!(p.is_tiling_of(&inst.bounding_box));
    }

    #[test]
    fn oversampled_r_works_in_relaxed_mode() {
        // r > opt/2 forces sampling probability 1; the clauses still hold.
        let (inst, opt, params) = setup(GenKind::DisjointGrid, 9, 5);
        let p = build_r_good_partition(&inst, &FakeSet::empty(), &opt, 16, 2, &params).unwrap();
        assert!(is_r_good(&p, &inst, &FakeSet::empty(), &opt, 16, params.c_star));
    }

    #[test]
    fn strict_mode_rejects_large_r() {
        let (inst, opt, params) = setup(GenKind::DisjointGrid, 9, 5);
        let strict = params.clone().with_strict(true);
        let err = build_r_good_partition(&inst, &FakeSet::empty(), &opt, 16, 2, &strict);
        assert!(matches!(err, Err(PartitionError::Precondition(_))));
    }

    #[test]
    fn subdivision_respects_per_cell_bound() {
        let (inst, opt, _) = setup(GenKind::DisjointGrid, 16, 0);
        let r = 8;
        let cell = inst.bounding_box;
        let n_c = count_intersecting(&inst, &opt, &cell);
        let t = r * n_c / opt.value();
        if t >= 10 {
            let pieces = subdivide_excess_cell(&inst, &opt, &cell, r, t);
            assert!(pieces.len() as u64 <= t * t);
            for piece in &pieces {
                let n = count_intersecting(&inst, &opt, piece);
                assert!(r * n <= 10 * opt.value());
            }
        }
    }

    #[test]
    fn excess_subdivision_tiles_the_cell() {
        let (inst, opt, _) = setup(GenKind::UniformRandom, 12, 9);
        let cell = Rect::closed(2, 2, 20, 20).unwrap();
        let pieces = subdivide_excess_cell(&inst, &opt, &cell, 10, 10);
        let total: i64 = pieces.iter().map(|p| p.area()).sum();
        assert_eq!(total, cell.area());
    }

    #[test]
    fn grid_aligned_partition_all_cells_aligned() {
        for seed in 0..6u64 {
            let (inst, opt, params) = setup(GenKind::DisjointGrid, 12, seed);
            let graph = ConflictGraph::new(&inst).unwrap();
            let f = FakeSet::empty();
            let rho = Rho::integer(opt.value().max(4) as i64);
            let grid = build_rho_accurate_grid(&graph, &inst, &f, rho, &params).unwrap();
            let p =
                build_grid_aligned_r_good(&inst, &f, &opt, 4, &grid, seed, &params).unwrap();
            let z = grid.point_set();
            for cell in &p.cells {
                assert!(z.is_rect_aligned(&cell.rect), "cell {:?}", cell.rect.coords_key());
            }
            assert!(p.is_tiling_of(&inst.bounding_box));
            assert!(p.cells.len() as u64 <= 4 * 144 * params.c_star * 8 * 4);
        }
    }

    // Defining sets of the partition cells, computed per the construction's
    // rules; distinct cells must have distinct defining sets.
    #[test]
    fn defining_sets_are_unique() {
        let (inst, opt, params) = setup(GenKind::UniformRandom, 10, 4);
        let f = FakeSet::empty();
        let p = build_r_good_partition(&inst, &f, &opt, 4, 13, &params).unwrap();
        let mut keys = std::collections::BTreeSet::new();
        for cell in &p.cells {
            let c = &cell.rect;
            let top = p
                .cells
                .iter()
                .position(|o| o.rect.y1 == c.y2 && o.rect.x1 <= c.x1 && c.x2 <= o.rect.x2);
            let bottom = p
                .cells
                .iter()
                .position(|o| o.rect.y2 == c.y1 && o.rect.x1 <= c.x1 && c.x2 <= o.rect.x2);
            let key = (c.x1, c.x2, top, bottom, c.y1, c.y2);
            assert!(keys.insert(key));
        }
    }
}
