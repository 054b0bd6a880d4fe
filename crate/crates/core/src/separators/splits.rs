//! Balanced splits of sub-instances driven by cycle separators of the
//! partition dual, and the two/three-way decompositions built from them.

use super::{
    build_dual, enumerate_feasible_cycles, SeparatorCycle, SeparatorError, DEFAULT_CYCLE_BUDGET,
};
use crate::cells::{self, Arrangement, CellMask};
use crate::fakes::{self, FakeSet};
use crate::geometry::{tile_complement, tile_polygon, Rect};
use crate::grids::Grid;
use crate::instance::Instance;
use crate::params::Parameters;
use crate::partitions::{build_grid_aligned_r_good, build_r_good_partition, CellPartition};
use crate::solvers::{mis_set, ConflictGraph, OptCache};

/// Diagnostics of one separator-driven split.
#[derive(Debug, Clone)]
pub struct SplitMeta {
    pub cycle: SeparatorCycle,
    pub j_corners: usize,
    pub opt1: u64,
    pub opt2: u64,
    /// Reference-optimum indices contained in neither side.
    pub lost: Vec<usize>,
}

#[derive(Debug, Clone)]
pub struct PairOutcome {
    pub f1: FakeSet,
    pub f2: FakeSet,
    pub meta: SplitMeta,
}

#[derive(Debug, Clone)]
pub struct TripleOutcome {
    pub f1: FakeSet,
    pub f2: FakeSet,
    pub f3: FakeSet,
    pub opt_parent: u64,
    pub opts: [u64; 3],
    /// Intermediate valid pair splits `(parent, left, right)` performed on
    /// the way to the triple, for replay by the dynamic program.
    pub stage_pairs: Vec<(FakeSet, FakeSet, FakeSet)>,
}

struct CandidateEval {
    f1: FakeSet,
    f2: FakeSet,
    cycle: SeparatorCycle,
    j_corners: usize,
    opt1: u64,
    opt2: u64,
    lost: Vec<usize>,
}

/// Region of selected partition cells as a cell mask of their arrangement.
fn cells_mask(arr: &Arrangement, all: &[Rect], selected: &[usize]) -> CellMask {
    let mut mask = CellMask::empty(arr.n_cells());
    for &id in selected {
        let c = &all[id];
        for row in 0..arr.n_rows() {
            if !(c.y1 <= arr.ys[row] && arr.ys[row + 1] <= c.y2) {
                continue;
            }
            for col in 0..arr.n_cols() {
                if c.x1 <= arr.xs[col] && arr.xs[col + 1] <= c.x2 {
                    mask.set(arr.cell_index(col, row));
                }
            }
        }
    }
    mask
}

/// Turns a feasible cycle into a candidate decomposition pair: the interior
/// region plus the cycle cells trace to a simple polygon J; side one covers J
/// and the fakes outside it, side two covers the complement and the fakes
/// inside.
fn realize_candidate(
    inst: &Instance,
    graph: &ConflictGraph,
    f: &FakeSet,
    partition: &CellPartition,
    opt_prime: &[usize],
    cycle: &SeparatorCycle,
    params: &Parameters,
    cache: &mut OptCache,
) -> Option<CandidateEval> {
    let bbox = inst.bounding_box;
    let all: Vec<Rect> = partition.cells.iter().map(|c| c.rect).collect();
    let arr = Arrangement::from_rects(&bbox, all.iter());
    let mut selected: Vec<usize> = cycle.cells.clone();
    selected.extend(cycle.interior.iter().copied());
    let mask = cells_mask(&arr, &all, &selected);
    let j_poly = cells::trace_boundary(&arr, &mask).ok()?;
    let tiles_j = tile_polygon(&j_poly).ok()?;
    let tiles_c = tile_complement(&j_poly, &bbox).ok()?;

    let mut f1_rects = tiles_j;
    let mut f2_rects = tiles_c;
    let interior: std::collections::BTreeSet<usize> = cycle.interior.iter().copied().collect();
    let on_cycle: std::collections::BTreeSet<usize> = cycle.cells.iter().copied().collect();
    for (id, cell) in partition.cells.iter().enumerate() {
        if !cell.is_fake {
            continue;
        }
        if interior.contains(&id) || on_cycle.contains(&id) {
            f2_rects.push(cell.rect);
        } else {
            f1_rects.push(cell.rect);
        }
    }
    let f1 = FakeSet::new(f1_rects);
    let f2 = FakeSet::new(f2_rects);
    if !fakes::is_decomposition_pair(&bbox, f, &f1, &f2) {
        return None;
    }
    let m1 = fakes::induced_mask(inst, &f1);
    let m2 = fakes::induced_mask(inst, &f2);
    let opt1 = cache.value(graph, m1, params.node_budget).ok()?;
    let opt2 = cache.value(graph, m2, params.node_budget).ok()?;
    let lost: Vec<usize> = opt_prime
        .iter()
        .copied()
        .filter(|i| m1 >> *i & 1 == 0 && m2 >> *i & 1 == 0)
        .collect();
    Some(CandidateEval {
        f1,
        f2,
        cycle: cycle.clone(),
        j_corners: j_poly.corner_count(),
        opt1,
        opt2,
        lost,
    })
}

const SPLIT_CANDIDATE_CAP: usize = 64;

fn best_split(
    inst: &Instance,
    graph: &ConflictGraph,
    f: &FakeSet,
    partition: &CellPartition,
    opt_prime: &[usize],
    weights: Vec<u64>,
    params: &Parameters,
    cache: &mut OptCache,
    accept: impl Fn(&CandidateEval) -> bool,
    score: impl Fn(&CandidateEval) -> (u64, u64, u64),
) -> Result<PairOutcome, SeparatorError> {
    let mut dual = build_dual(partition, &inst.bounding_box);
    dual.weights = weights;
    let (candidates, budget_left) =
        enumerate_feasible_cycles(&dual, SPLIT_CANDIDATE_CAP, DEFAULT_CYCLE_BUDGET);
    let searched = candidates.len();
    let mut best: Option<(CandidateEval, (u64, u64, u64))> = None;
    for cycle in &candidates {
        let Some(eval) =
            realize_candidate(inst, graph, f, partition, opt_prime, cycle, params, cache)
        else {
            continue;
        };
        if !accept(&eval) {
            continue;
        }
        let key = score(&eval);
        if best.as_ref().map_or(true, |(_, bk)| key < *bk) {
            best = Some((eval, key));
        }
    }
    match best {
        Some((eval, _)) => Ok(PairOutcome {
            f1: eval.f1,
            f2: eval.f2,
            meta: SplitMeta {
                cycle: eval.cycle,
                j_corners: eval.j_corners,
                opt1: eval.opt1,
                opt2: eval.opt2,
                lost: eval.lost,
            },
        }),
        None => Err(SeparatorError::NoFeasibleCycle { candidates: searched, budget_left }),
    }
}

/// Splits a sub-instance so that both sides keep at most `2L/3 + c1 sqrt(r)`
/// fake rectangles: the dual is weighted by a fake-cell indicator and a
/// balanced cycle is turned into the pair of regions.
pub fn split_reduce_boundary(
    inst: &Instance,
    graph: &ConflictGraph,
    f: &FakeSet,
    opt_prime: &crate::solvers::IndependentSet,
    partition: &CellPartition,
    params: &Parameters,
    cache: &mut OptCache,
) -> Result<PairOutcome, SeparatorError> {
    let l = f.rects.len() as u64;
    if l <= 3 {
        return Err(SeparatorError::Precondition(format!(
            "boundary-reducing split needs more than 3 fakes, got {l}"
        )));
    }
    if params.strict && (partition.r < l || 2 * partition.r > opt_prime.value()) {
        return Err(SeparatorError::Precondition(
            "strict mode requires L <= r <= opt/2".into(),
        ));
    }
    let weights: Vec<u64> =
        partition.cells.iter().map(|c| if c.is_fake { 1 } else { 0 }).collect();
    let z = partition.corner_set();
    let r = partition.r as f64;
    let opt_v = opt_prime.value() as f64;
    let c1 = params.c1;
    let boundary_cap = (2.0 * l as f64 / 3.0 + c1 * r.sqrt()).floor() as u64;
    let loss_floor = opt_v * (1.0 - c1 / r.sqrt());
    best_split(
        inst,
        graph,
        f,
        partition,
        &opt_prime.indices,
        weights,
        params,
        cache,
        |e| {
            (e.f1.rects.len() as u64) <= boundary_cap
                && (e.f2.rects.len() as u64) <= boundary_cap
                && (e.opt1 + e.opt2) as f64 + 1e-9 >= loss_floor
                && e.f1.is_aligned_with(&z)
                && e.f2.is_aligned_with(&z)
        },
        |e| {
            (
                e.f1.rects.len().max(e.f2.rects.len()) as u64,
                e.lost.len() as u64,
                e.cycle.vertex_count() as u64,
            )
        },
    )
}

/// Weight of each cell under the upper-left-corner rule: a rectangle's
/// upper-left corner is charged to the unique cell having it strictly inside
/// or on its left/top boundary, excluding the bottom-left and top-right
/// corners.
fn upper_left_weights(
    inst: &Instance,
    opt_prime: &[usize],
    partition: &CellPartition,
) -> Vec<u64> {
    let mut weights = vec![0u64; partition.cells.len()];
    for &i in opt_prime {
        let p = (inst.rects[i].x1, inst.rects[i].y2);
        let mut hits = Vec::new();
        for (id, cell) in partition.cells.iter().enumerate() {
            let c = &cell.rect;
            let inside = c.x1 < p.0 && p.0 < c.x2 && c.y1 < p.1 && p.1 < c.y2;
            let on_left =
                p.0 == c.x1 && c.y1 <= p.1 && p.1 <= c.y2 && (p.0, p.1) != (c.x1, c.y1);
            let on_top =
                p.1 == c.y2 && c.x1 <= p.0 && p.0 <= c.x2 && (p.0, p.1) != (c.x2, c.y2);
            if inside || on_left || on_top {
                hits.push(id);
            }
        }
        assert_eq!(hits.len(), 1, "corner {p:?} must be charged to exactly one cell");
        assert!(!partition.cells[hits[0]].is_fake, "corner charged to a fake cell");
        weights[hits[0]] += 1;
    }
    debug_assert_eq!(weights.iter().sum::<u64>() as usize, opt_prime.len());
    weights
}

/// Splits a sub-instance so that each side keeps at most 3/4 of the optimum:
/// the dual is weighted by upper-left-corner counts of the optimum.
pub fn split_balanced(
    inst: &Instance,
    graph: &ConflictGraph,
    f: &FakeSet,
    opt_prime: &crate::solvers::IndependentSet,
    partition: &CellPartition,
    params: &Parameters,
    cache: &mut OptCache,
) -> Result<PairOutcome, SeparatorError> {
    if params.strict {
        let r_min = (1u64 << 24) * params.c_star;
        if partition.r < r_min {
            return Err(SeparatorError::Precondition(format!(
                "strict mode requires r >= 2^24 c* = {r_min}, got {}",
                partition.r
            )));
        }
    }
    let weights = upper_left_weights(inst, &opt_prime.indices, partition);
    let l = f.rects.len() as f64;
    let r = partition.r as f64;
    let opt_v = opt_prime.value();
    let c2 = params.c2;
    let boundary_cap = (l + c2 * r.sqrt()).floor() as u64;
    let loss_floor = opt_v as f64 * (1.0 - c2 / r.sqrt());
    best_split(
        inst,
        graph,
        f,
        partition,
        &opt_prime.indices,
        weights,
        params,
        cache,
        |e| {
            (e.f1.rects.len() as u64) <= boundary_cap
                && (e.f2.rects.len() as u64) <= boundary_cap
                && 4 * e.opt1 <= 3 * opt_v
                && 4 * e.opt2 <= 3 * opt_v
                && (e.opt1 + e.opt2) as f64 + 1e-9 >= loss_floor
        },
        |e| {
            (
                e.opt1.max(e.opt2),
                e.f1.rects.len().max(e.f2.rects.len()) as u64,
                e.lost.len() as u64,
            )
        },
    )
}

fn triple_r(l: u64, l_star: u64, opt: u64, params: &Parameters) -> u64 {
    let paper = ((l_star as f64 / (3.0 * (params.c1 + params.c2))).powi(2)).floor() as u64;
    paper.clamp(l.max(3), l.max(3).max(opt / 2))
}

/// Checks the five clauses of a candidate triple and returns its optima.
#[allow(clippy::too_many_arguments)]
fn accept_triple(
    inst: &Instance,
    graph: &ConflictGraph,
    f: &FakeSet,
    opt_f: u64,
    parts: [&FakeSet; 3],
    l_cap: f64,
    loss_constant: f64,
    l_star: u64,
    params: &Parameters,
    cache: &mut OptCache,
) -> Option<[u64; 3]> {
    let bbox = inst.bounding_box;
    if !fakes::is_decomposition_triple(&bbox, f, parts[0], parts[1], parts[2]) {
        return None;
    }
    let mut opts = [0u64; 3];
    for (k, part) in parts.iter().enumerate() {
        if part.rects.len() as f64 > l_cap {
            return None;
        }
        let mask = fakes::induced_mask(inst, part);
        opts[k] = cache.value(graph, mask, params.node_budget).ok()?;
        if 4 * opts[k] > 3 * opt_f {
            return None;
        }
    }
    let total: u64 = opts.iter().sum();
    let floor = opt_f as f64 * (1.0 - loss_constant / l_star as f64);
    if (total as f64) + 1e-9 < floor {
        return None;
    }
    Some(opts)
}

/// Decomposes a sub-instance into three smaller sub-instances: one
/// boundary-reducing split followed by one balanced split of the larger
/// side. All five clauses (validity, boundary caps, 3/4-balance, loss floor,
/// integrality) are asserted on the result.
pub fn decompose_triple(
    inst: &Instance,
    graph: &ConflictGraph,
    f: &FakeSet,
    l_star: u64,
    seed: u64,
    params: &Parameters,
    cache: &mut OptCache,
) -> Result<TripleOutcome, SeparatorError> {
    decompose_triple_impl(inst, graph, f, l_star, None, seed, params, cache)
}

/// Grid-aligned variant: every partition is grid-aligned, boundary caps drop
/// to `3 L* / 4`, and all output rectangles are aligned with the grid.
pub fn decompose_triple_grid(
    inst: &Instance,
    graph: &ConflictGraph,
    f: &FakeSet,
    l_star: u64,
    grid: &Grid,
    seed: u64,
    params: &Parameters,
    cache: &mut OptCache,
) -> Result<TripleOutcome, SeparatorError> {
    decompose_triple_impl(inst, graph, f, l_star, Some(grid), seed, params, cache)
}

#[allow(clippy::too_many_arguments)]
fn decompose_triple_impl(
    inst: &Instance,
    graph: &ConflictGraph,
    f: &FakeSet,
    l_star: u64,
    grid: Option<&Grid>,
    seed: u64,
    params: &Parameters,
    cache: &mut OptCache,
) -> Result<TripleOutcome, SeparatorError> {
    let bbox = inst.bounding_box;
    let l = f.rects.len() as u64;
    if l > l_star {
        return Err(SeparatorError::Precondition(format!(
            "boundary complexity {l} exceeds L* = {l_star}"
        )));
    }
    let opt_f_set = mis_set(graph, fakes::induced_mask(inst, f), params.node_budget)?;
    let opt_f = opt_f_set.value();
    if params.strict && opt_f < 64 * l_star * l_star {
        return Err(SeparatorError::Precondition(format!(
            "strict mode requires opt >= 64 (L*)^2 = {}, got {opt_f}",
            64 * l_star * l_star
        )));
    }
    if opt_f < 2 {
        return Err(SeparatorError::Precondition(format!(
            "optimum {opt_f} is too small to decompose"
        )));
    }
    let r = triple_r(l, l_star, opt_f, params);
    let (l_cap, loss_constant) = match grid {
        Some(_) => (3.0 * l_star as f64 / 4.0, params.c_tilde),
        None => (l_star as f64, params.c3),
    };
    let grid_points = grid.map(|g| g.point_set());

    let mut last_err: Option<SeparatorError> = None;
    for attempt in 0..params.retry_limit as u64 {
        let s1 = crate::derive_seed(seed, "triple-stage1", attempt);
        let s2 = crate::derive_seed(seed, "triple-stage2", attempt);
        // Stage 1: reduce the boundary complexity (skipped for tiny L).
        let stage1: Result<(FakeSet, FakeSet, Option<(FakeSet, FakeSet, FakeSet)>), SeparatorError> =
            if l > 3 {
                let partition = match grid {
                    Some(g) => {
                        build_grid_aligned_r_good(inst, f, &opt_f_set, r, g, s1, params)?
                    }
                    None => build_r_good_partition(inst, f, &opt_f_set, r, s1, params)?,
                };
                split_reduce_boundary(inst, graph, f, &opt_f_set, &partition, params, cache).map(
                    |pair| {
                        let hint = (f.clone(), pair.f1.clone(), pair.f2.clone());
                        (pair.f1, pair.f2, Some(hint))
                    },
                )
            } else {
                Ok((f.clone(), FakeSet::whole_box(&bbox), None))
            };
        let (mut f1p, mut f2p, hint1) = match stage1 {
            Ok(v) => v,
            Err(e) => {
                last_err = Some(e);
                continue;
            }
        };
        // The balanced split runs on the side with the larger optimum.
        let v1 = cache.value(graph, fakes::induced_mask(inst, &f1p), params.node_budget)?;
        let v2 = cache.value(graph, fakes::induced_mask(inst, &f2p), params.node_budget)?;
        if v2 > v1 {
            std::mem::swap(&mut f1p, &mut f2p);
        }
        let opt1_set = mis_set(graph, fakes::induced_mask(inst, &f1p), params.node_budget)?;

        let candidate = if opt1_set.value() == 0 {
            (f1p.clone(), FakeSet::whole_box(&bbox), f2p.clone(), None)
        } else {
            let partition = match grid {
                Some(g) => build_grid_aligned_r_good(inst, &f1p, &opt1_set, r, g, s2, params),
                None => build_r_good_partition(inst, &f1p, &opt1_set, r, s2, params),
            };
            let partition = match partition {
                Ok(p) => p,
                Err(e) => {
                    last_err = Some(e.into());
                    continue;
                }
            };
            match split_balanced(inst, graph, &f1p, &opt1_set, &partition, params, cache) {
                Ok(pair) => {
                    let hint = (f1p.clone(), pair.f1.clone(), pair.f2.clone());
                    (pair.f1, pair.f2, f2p.clone(), Some(hint))
                }
                Err(e) => {
                    last_err = Some(e);
                    continue;
                }
            }
        };
        let (g1, g2, g3, hint2) = candidate;
        if let Some(points) = &grid_points {
            if ![&g1, &g2, &g3].iter().all(|s| s.is_aligned_with(points)) {
                continue;
            }
        }
        if let Some(opts) = accept_triple(
            inst,
            graph,
            f,
            opt_f,
            [&g1, &g2, &g3],
            l_cap,
            loss_constant,
            l_star,
            params,
            cache,
        ) {
            let mut stage_pairs = Vec::new();
            if let Some(h) = hint1 {
                stage_pairs.push(h);
            }
            if let Some(h) = hint2 {
                stage_pairs.push(h);
            }
            return Ok(TripleOutcome { f1: g1, f2: g2, f3: g3, opt_parent: opt_f, opts, stage_pairs });
        }
    }
    Err(last_err.unwrap_or_else(|| {
        SeparatorError::Precondition("no decomposition satisfied all clauses".into())
    }))
}

/// Grid-aligned boundary-reducing pair: both sides drop to at most
/// `ceil(3L/4)` fakes, all outputs aligned with the grid.
pub fn decompose_pair_grid(
    inst: &Instance,
    graph: &ConflictGraph,
    f: &FakeSet,
    grid: &Grid,
    seed: u64,
    params: &Parameters,
    cache: &mut OptCache,
) -> Result<PairOutcome, SeparatorError> {
    let l = f.rects.len() as u64;
    if l <= 3 {
        return Err(SeparatorError::Precondition(format!(
            "pair decomposition needs more than 3 fakes, got {l}"
        )));
    }
    if params.strict && (l as f64) <= params.c_tilde {
        return Err(SeparatorError::Precondition(format!(
            "strict mode requires L > c~ = {}, got {l}",
            params.c_tilde
        )));
    }
    let opt_f_set = mis_set(graph, fakes::induced_mask(inst, f), params.node_budget)?;
    let opt_f = opt_f_set.value();
    if opt_f < 2 {
        return Err(SeparatorError::Precondition(format!(
            "optimum {opt_f} is too small to decompose"
        )));
    }
    let r = {
        let paper = ((l as f64 / (12.0 * (params.c1 + params.c2))).powi(2)).floor() as u64;
        paper.clamp(l.max(3), l.max(3).max(opt_f / 2))
    };
    let cap = (3 * l).div_ceil(4);
    let loss_floor = opt_f as f64 * (1.0 - params.c_tilde / l as f64);
    let z = grid.point_set();
    let mut last_err: Option<SeparatorError> = None;
    for attempt in 0..params.retry_limit as u64 {
        let s = crate::derive_seed(seed, "pair-grid", attempt);
        let partition = match build_grid_aligned_r_good(inst, f, &opt_f_set, r, grid, s, params) {
            Ok(p) => p,
            Err(e) => {
                last_err = Some(e.into());
                continue;
            }
        };
        let weights: Vec<u64> =
            partition.cells.iter().map(|c| if c.is_fake { 1 } else { 0 }).collect();
        let result = best_split(
            inst,
            graph,
            f,
            &partition,
            &opt_f_set.indices,
            weights,
            params,
            cache,
            |e| {
                (e.f1.rects.len() as u64) <= cap
                    && (e.f2.rects.len() as u64) <= cap
                    && (e.opt1 + e.opt2) as f64 + 1e-9 >= loss_floor
                    && e.f1.is_aligned_with(&z)
                    && e.f2.is_aligned_with(&z)
            },
            |e| {
                (
                    e.f1.rects.len().max(e.f2.rects.len()) as u64,
                    e.lost.len() as u64,
                    e.opt1.max(e.opt2),
                )
            },
        );
        match result {
            Ok(pair) => return Ok(pair),
            Err(e) => last_err = Some(e),
        }
    }
    Err(last_err
        .unwrap_or_else(|| SeparatorError::Precondition("no aligned pair satisfied the caps".into())))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grids::{build_rho_accurate_grid, Rho};
    use crate::instance::{generate, GenKind};
    use crate::solvers::exact_mis;

    fn boundary_fakes(inst: &Instance, count: usize) -> FakeSet {
        // Unit fakes along the bottom boundary band, below every canonical
        // rectangle.
        let b = inst.bounding_box;
        let rects: Vec<Rect> = (0..count as i64)
            .map(|i| {
                let x = (2 * i) % (b.x2 - 1);
                Rect::closed(x, 0, x + 1, 1).unwrap()
            })
            .take_while(|r| r.x2 <= b.x2)
            .collect();
        FakeSet::new(rects)
    }

    #[test]
    fn split_reduce_produces_valid_pair_with_bounds() {
        let inst = generate(GenKind::DisjointGrid, 12, 3).unwrap();
        let graph = ConflictGraph::new(&inst).unwrap();
        let params = Parameters::default();
        let mut cache = OptCache::new();
        let f = boundary_fakes(&inst, 6);
        assert!(f.rects.len() > 3);
        let opt = mis_set(&graph, fakes::induced_mask(&inst, &f), params.node_budget).unwrap();
        let r = f.rects.len() as u64;
        let p = build_r_good_partition(&inst, &f, &opt, r, 5, &params).unwrap();
        let pair =
            split_reduce_boundary(&inst, &graph, &f, &opt, &p, &params, &mut cache).unwrap();
        let l = f.rects.len() as f64;
        let cap = 2.0 * l / 3.0 + params.c1 * (r as f64).sqrt();
        assert!(pair.f1.rects.len() as f64 <= cap);
        assert!(pair.f2.rects.len() as f64 <= cap);
        assert!(fakes::is_decomposition_pair(&inst.bounding_box, &f, &pair.f1, &pair.f2));
        // Only rectangles touching the separator cells may be lost.
        assert!(pair.meta.opt1 + pair.meta.opt2 + pair.meta.lost.len() as u64 >= opt.value());
    }

    #[test]
    fn split_balanced_quarters_the_optimum() {
        let inst = generate(GenKind::DisjointGrid, 16, 1).unwrap();
        let graph = ConflictGraph::new(&inst).unwrap();
        let params = Parameters::default();
        let mut cache = OptCache::new();
        let f = FakeSet::empty();
        let opt = exact_mis(&inst, params.node_budget).unwrap();
        let p = build_r_good_partition(&inst, &f, &opt, 4, 9, &params).unwrap();
        let pair = split_balanced(&inst, &graph, &f, &opt, &p, &params, &mut cache).unwrap();
        assert!(4 * pair.meta.opt1 <= 3 * opt.value());
        assert!(4 * pair.meta.opt2 <= 3 * opt.value());
    }

    #[test]
    fn upper_left_weights_sum_to_opt() {
        let inst = generate(GenKind::UniformRandom, 10, 8).unwrap();
        let params = Parameters::default();
        let opt = exact_mis(&inst, params.node_budget).unwrap();
        let p = build_r_good_partition(&inst, &FakeSet::empty(), &opt, 3, 2, &params).unwrap();
        let w = upper_left_weights(&inst, &opt.indices, &p);
        assert_eq!(w.iter().sum::<u64>(), opt.value());
    }

    #[test]
    fn decompose_triple_passes_all_clauses() {
        let inst = generate(GenKind::DisjointGrid, 16, 2).unwrap();
        let graph = ConflictGraph::new(&inst).unwrap();
        let params = Parameters::default();
        let mut cache = OptCache::new();
        let f = FakeSet::empty();
        let out = decompose_triple(&inst, &graph, &f, 8, 3, &params, &mut cache).unwrap();
        assert!(fakes::is_decomposition_triple(
            &inst.bounding_box,
            &f,
            &out.f1,
            &out.f2,
            &out.f3
        ));
        for opt_i in out.opts {
            assert!(4 * opt_i <= 3 * out.opt_parent);
        }
        assert!(out.f1.rects.len() <= 8 && out.f2.rects.len() <= 8 && out.f3.rects.len() <= 8);
    }

    #[test]
    fn decompose_triple_grid_outputs_aligned() {
        let inst = generate(GenKind::DisjointGrid, 12, 4).unwrap();
        let graph = ConflictGraph::new(&inst).unwrap();
        let params = Parameters::default();
        let mut cache = OptCache::new();
        let f = FakeSet::empty();
        let opt = exact_mis(&inst, params.node_budget).unwrap();
        let rho = Rho::integer(opt.value() as i64);
        let grid = build_rho_accurate_grid(&graph, &inst, &f, rho, &params).unwrap();
        let out =
            decompose_triple_grid(&inst, &graph, &f, 8, &grid, 3, &params, &mut cache).unwrap();
        let z = grid.point_set();
        for part in [&out.f1, &out.f2, &out.f3] {
            assert!(part.is_aligned_with(&z));
            assert!(part.rects.len() as f64 <= 6.0);
        }
    }

    #[test]
    fn decompose_pair_grid_shrinks_boundary() {
        let inst = generate(GenKind::DisjointGrid, 14, 6).unwrap();
        let graph = ConflictGraph::new(&inst).unwrap();
        let params = Parameters::default();
        let mut cache = OptCache::new();
        let f = boundary_fakes(&inst, 12);
        let l = f.rects.len() as u64;
        assert!(l >= 8);
        let rho = Rho::integer(4);
        let grid = build_rho_accurate_grid(&graph, &inst, &f, rho, &params).unwrap();
        let pair =
            decompose_pair_grid(&inst, &graph, &f, &grid, 11, &params, &mut cache).unwrap();
        let cap = (3 * l).div_ceil(4);
        assert!(pair.f1.rects.len() as u64 <= cap);
        assert!(pair.f2.rects.len() as u64 <= cap);
        let z = grid.point_set();
        assert!(pair.f1.is_aligned_with(&z) && pair.f2.is_aligned_with(&z));
    }
}
