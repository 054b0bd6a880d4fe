//! MISR instances: canonicalization, kernelization, generators, and the JSON
//! file formats.

use crate::geometry::{intersects, Rect};
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;
use thiserror::Error;

/// Rectangle as read from an instance file; coordinates may be fractional
/// and degenerate ties are allowed.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct RawRect {
    pub x1: f64,
    pub y1: f64,
    pub x2: f64,
    pub y2: f64,
}

/// A MISR instance: open input rectangles plus a closed bounding box.
///
/// After `canonicalize` the instance is canonical: all `2n` x-coordinates are
/// distinct, all `2n` y-coordinates are distinct, coordinates are integers in
/// `[1, 2n]`, and the bounding box is `(0,0)-(2n+1, 2n+1)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Instance {
    pub rects: Vec<Rect>,
    pub bounding_box: Rect,
}

#[derive(Debug, Error)]
pub enum InstanceError {
    #[error("rectangle {0} has no area")]
    ZeroArea(usize),
    #[error("rectangle {0} has a non-finite coordinate")]
    NotFinite(usize),
    #[error("unknown generator kind `{0}`")]
    UnknownKind(String),
    #[error("generator needs n >= 1")]
    EmptyGenerator,
}

/// Index map from a transformed instance's rectangles back to the source
/// instance, with the source group of each transformed rectangle retained so
/// lifts can always pick distinct originals.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SolutionLift {
    pub mapping: Vec<usize>,
    pub source_groups: Vec<Vec<usize>>,
}

impl SolutionLift {
    pub fn identity(n: usize) -> Self {
        SolutionLift { mapping: (0..n).collect(), source_groups: (0..n).map(|i| vec![i]).collect() }
    }

    pub fn lift(&self, solution: &crate::solvers::IndependentSet) -> crate::solvers::IndependentSet {
        let mut indices: Vec<usize> = solution.indices.iter().map(|i| self.mapping[*i]).collect();
        indices.sort_unstable();
        indices.dedup();
        assert_eq!(indices.len(), solution.indices.len(), "lift collapsed indices");
        crate::solvers::IndependentSet { indices }
    }

    pub fn multiplicity(&self, transformed_index: usize) -> usize {
        self.source_groups[transformed_index].len()
    }
}

impl Instance {
    pub fn n(&self) -> usize {
        self.rects.len()
    }

    pub fn is_canonical(&self) -> bool {
        let n = self.rects.len() as i64;
        if self.bounding_box.coords_key() != (0, 0, 2 * n + 1, 2 * n + 1) {
            return false;
        }
        let mut xs = Vec::with_capacity(2 * self.rects.len());
        let mut ys = Vec::with_capacity(2 * self.rects.len());
        for r in &self.rects {
            xs.extend([r.x1, r.x2]);
            ys.extend([r.y1, r.y2]);
        }
        let in_range = |v: &[i64]| v.iter().all(|c| 1 <= *c && *c <= 2 * n);
        if !in_range(&xs) || !in_range(&ys) {
            return false;
        }
        let distinct = |v: &mut Vec<i64>| {
            v.sort_unstable();
            v.windows(2).all(|w| w[0] != w[1])
        };
        distinct(&mut xs) && distinct(&mut ys)
    }

    /// Sub-instance view: keeps the rectangles at `indices`, same box.
    pub fn restrict(&self, indices: &[usize]) -> (Instance, SolutionLift) {
        let rects = indices.iter().map(|i| self.rects[*i]).collect();
        let lift = SolutionLift {
            mapping: indices.to_vec(),
            source_groups: indices.iter().map(|i| vec![*i]).collect(),
        };
        (Instance { rects, bounding_box: self.bounding_box }, lift)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Side {
    Right,
    Left,
}

/// Transforms raw rectangles into a canonical instance with the same
/// intersection graph.
///
/// Coordinate ties are broken symbolically: each boundary is ranked by
/// (coordinate, side, rectangle index) with right/top boundaries ordered
/// before left/bottom ones at equal coordinates, which realizes the shrinking
/// perturbation exactly.
pub fn canonicalize(raw: &[RawRect]) -> Result<(Instance, SolutionLift), InstanceError> {
    for (i, r) in raw.iter().enumerate() {
        if !(r.x1.is_finite() && r.x2.is_finite() && r.y1.is_finite() && r.y2.is_finite()) {
            return Err(InstanceError::NotFinite(i));
        }
        if r.x1 >= r.x2 || r.y1 >= r.y2 {
            return Err(InstanceError::ZeroArea(i));
        }
    }
    let n = raw.len();
    let rank_axis = |lo: fn(&RawRect) -> f64, hi: fn(&RawRect) -> f64| -> Vec<(i64, i64)> {
        let mut events: Vec<(f64, Side, usize)> = Vec::with_capacity(2 * n);
        for (i, r) in raw.iter().enumerate() {
            events.push((lo(r), Side::Left, i));
            events.push((hi(r), Side::Right, i));
        }
        events.sort_by(|a, b| {
            a.0.total_cmp(&b.0)
                .then_with(|| {
                    let side_rank = |s: Side| if s == Side::Right { 0 } else { 1 };
                    side_rank(a.1).cmp(&side_rank(b.1))
                })
                .then_with(|| a.2.cmp(&b.2))
        });
        let mut out = vec![(0i64, 0i64); n];
        for (rank, (_, side, idx)) in events.into_iter().enumerate() {
            let coord = rank as i64 + 1;
            match side {
                Side::Left => out[idx].0 = coord,
                Side::Right => out[idx].1 = coord,
            }
        }
        out
    };
    let xs = rank_axis(|r| r.x1, |r| r.x2);
    let ys = rank_axis(|r| r.y1, |r| r.y2);
    let rects: Vec<Rect> = (0..n)
        .map(|i| Rect::open(xs[i].0, ys[i].0, xs[i].1, ys[i].1).expect("ranks are ordered"))
        .collect();
    let bound = 2 * n as i64 + 1;
    let inst = Instance { rects, bounding_box: Rect::closed(0, 0, bound, bound).unwrap() };
    debug_assert!(inst.is_canonical());
    Ok((inst, SolutionLift::identity(n)))
}

/// Rounds a canonical instance against stabbing lines built from maximal
/// interval independent sets, producing an instance with few distinct
/// rectangles whose solutions lift back without loss.
///
/// Works internally at doubled coordinates so interval midpoints stay
/// integral; each output rectangle contains its source rectangle.
pub fn kernelize(inst: &Instance) -> (Instance, SolutionLift) {
    let n = inst.n();
    if n == 0 {
        return (inst.clone(), SolutionLift::identity(0));
    }
    let bbox = inst.bounding_box;
    let vlines = stab_lines(
        inst.rects.iter().map(|r| (r.x1, r.x2)).collect(),
        2 * bbox.x1,
        2 * bbox.x2,
    );
    let hlines = stab_lines(
        inst.rects.iter().map(|r| (r.y1, r.y2)).collect(),
        2 * bbox.y1,
        2 * bbox.y2,
    );
    let snap_lo = |lines: &[i64], v: i64| -> i64 {
        let i = lines.partition_point(|l| *l <= v);
        lines[i - 1]
    };
    let snap_hi = |lines: &[i64], v: i64| -> i64 {
        let i = lines.partition_point(|l| *l < v);
        lines[i]
    };
    let mut groups: BTreeMap<(i64, i64, i64, i64), Vec<usize>> = BTreeMap::new();
    let mut order: Vec<(i64, i64, i64, i64)> = Vec::new();
    for (i, r) in inst.rects.iter().enumerate() {
        let key = (
            snap_lo(&vlines, 2 * r.x1),
            snap_lo(&hlines, 2 * r.y1),
            snap_hi(&vlines, 2 * r.x2),
            snap_hi(&hlines, 2 * r.y2),
        );
        let entry = groups.entry(key).or_default();
        if entry.is_empty() {
            order.push(key);
        }
        entry.push(i);
    }
    let mut rects = Vec::with_capacity(order.len());
    let mut mapping = Vec::with_capacity(order.len());
    let mut source_groups = Vec::with_capacity(order.len());
    for key in order {
        let members = groups.remove(&key).unwrap();
        rects.push(Rect::open(key.0, key.1, key.2, key.3).expect("snapped rect has area"));
        mapping.push(members[0]);
        source_groups.push(members);
    }
    let kernel = Instance {
        rects,
        bounding_box: Rect::closed(2 * bbox.x1, 2 * bbox.y1, 2 * bbox.x2, 2 * bbox.y2).unwrap(),
    };
    (kernel, SolutionLift { mapping, source_groups })
}

/// Stabbing lines for a set of open intervals, in doubled coordinates: for a
/// maximal interval independent set (no outside interval strictly inside a
/// chosen one), emit both endpoints plus the midpoint of each chosen
/// interval, and the two boundary lines.
fn stab_lines(intervals: Vec<(i64, i64)>, lo2: i64, hi2: i64) -> Vec<i64> {
    let m = intervals.len();
    let mut order: Vec<usize> = (0..m).collect();
    order.sort_by_key(|i| (intervals[*i].1, intervals[*i].0));
    let mut chosen: Vec<usize> = Vec::new();
    let mut last_end = i64::MIN;
    for i in order {
        if intervals[i].0 >= last_end {
            chosen.push(i);
            last_end = intervals[i].1;
        }
    }
    // Containment-swap: no unchosen interval may be strictly inside a chosen
    // one. Each swap shrinks total length, so this terminates.
    loop {
        let mut swapped = false;
        for i in 0..m {
            if chosen.contains(&i) {
                continue;
            }
            let (a, b) = intervals[i];
            for slot in 0..chosen.len() {
                let (ca, cb) = intervals[chosen[slot]];
                let strictly_inside = ca <= a && b <= cb && (ca < a || b < cb);
                if strictly_inside {
                    chosen[slot] = i;
                    swapped = true;
                    break;
                }
            }
            if swapped {
                break;
            }
        }
        if !swapped {
            break;
        }
    }
    let mut lines = vec![lo2, hi2];
    for i in chosen {
        let (a, b) = intervals[i];
        lines.extend([2 * a, a + b, 2 * b]);
    }
    lines.sort_unstable();
    lines.dedup();
    lines
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GenKind {
    UniformRandom,
    DisjointGrid,
    NestedStacks,
    AdversarialStrips,
}

impl std::str::FromStr for GenKind {
    type Err = InstanceError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "uniform-random" => Ok(GenKind::UniformRandom),
            "disjoint-grid" => Ok(GenKind::DisjointGrid),
            "nested-stacks" => Ok(GenKind::NestedStacks),
            "adversarial-strips" => Ok(GenKind::AdversarialStrips),
            other => Err(InstanceError::UnknownKind(other.to_string())),
        }
    }
}

impl std::fmt::Display for GenKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let s = match self {
            GenKind::UniformRandom => "uniform-random",
            GenKind::DisjointGrid => "disjoint-grid",
            GenKind::NestedStacks => "nested-stacks",
            GenKind::AdversarialStrips => "adversarial-strips",
        };
        f.write_str(s)
    }
}

/// Deterministic canonical instance generator.
pub fn generate(kind: GenKind, n: usize, seed: u64) -> Result<Instance, InstanceError> {
    if n == 0 {
        return Err(InstanceError::EmptyGenerator);
    }
    let raw = match kind {
        GenKind::UniformRandom => {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let span = 4 * n as i64;
            (0..n)
                .map(|_| {
                    let x1 = rng.gen_range(0..span - 1);
                    let y1 = rng.gen_range(0..span - 1);
                    let w = rng.gen_range(1..=(span - x1 - 1).min(span / 2));
                    let h = rng.gen_range(1..=(span - y1 - 1).min(span / 2));
                    RawRect {
                        x1: x1 as f64,
                        y1: y1 as f64,
                        x2: (x1 + w) as f64,
                        y2: (y1 + h) as f64,
                    }
                })
                .collect::<Vec<_>>()
        }
        GenKind::DisjointGrid => {
            let k = (n as f64).sqrt().ceil() as i64;
            (0..n as i64)
                .map(|i| {
                    let (gx, gy) = (i % k, i / k);
                    RawRect {
                        x1: (4 * gx) as f64,
                        y1: (4 * gy) as f64,
                        x2: (4 * gx + 2) as f64,
                        y2: (4 * gy + 2) as f64,
                    }
                })
                .collect()
        }
        GenKind::NestedStacks => (0..n as i64)
            .map(|i| {
                let hi = 4 * n as i64 - i;
                RawRect { x1: i as f64, y1: i as f64, x2: hi as f64, y2: hi as f64 }
            })
            .collect(),
        GenKind::AdversarialStrips => {
            let nh = (n + 1) / 2;
            let nv = n - nh;
            let span = (4 * n.max(2)) as i64;
            let mut raw: Vec<RawRect> = (0..nh as i64)
                .map(|i| RawRect {
                    x1: 0.0,
                    y1: (4 * i + 1) as f64,
                    x2: span as f64,
                    y2: (4 * i + 3) as f64,
                })
                .collect();
            raw.extend((0..nv as i64).map(|i| RawRect {
                x1: (4 * i + 1) as f64,
                y1: 0.0,
                x2: (4 * i + 3) as f64,
                y2: span as f64,
            }));
            raw
        }
    };
    let (inst, _) = canonicalize(&raw)?;
    Ok(inst)
}

// ---------------------------------------------------------------------------
// File formats
// ---------------------------------------------------------------------------

#[derive(Serialize)]
struct InstanceFileOut<'a> {
    n: usize,
    rects: &'a [Rect],
}

#[derive(Deserialize)]
struct InstanceFileIn {
    #[allow(dead_code)]
    #[serde(default)]
    n: Option<usize>,
    rects: Vec<RawRect>,
}

/// Serializes an integer-valued instance as `{"n": int, "rects": [...]}`.
pub fn instance_to_json(inst: &Instance) -> String {
    let mut s = serde_json::to_string_pretty(&InstanceFileOut { n: inst.n(), rects: &inst.rects })
        .expect("instance serializes");
    s.push('\n');
    s
}

/// Parses an instance file into raw rectangles.
pub fn raw_from_json(text: &str) -> Result<Vec<RawRect>, serde_json::Error> {
    Ok(serde_json::from_str::<InstanceFileIn>(text)?.rects)
}

/// Loads raw rectangles, reusing them verbatim when they already form a
/// canonical instance and canonicalizing otherwise. Returns whether
/// canonicalization ran.
pub fn load_lenient(raw: &[RawRect]) -> Result<(Instance, bool), InstanceError> {
    let integral = raw.iter().all(|r| {
        [r.x1, r.y1, r.x2, r.y2]
            .iter()
            .all(|c| c.fract() == 0.0 && c.abs() < 2i64.pow(40) as f64)
    });
    if integral {
        let rects: Result<Vec<Rect>, _> = raw
            .iter()
            .map(|r| Rect::open(r.x1 as i64, r.y1 as i64, r.x2 as i64, r.y2 as i64))
            .collect();
        if let Ok(rects) = rects {
            let n = rects.len() as i64;
            let candidate = Instance {
                rects,
                bounding_box: Rect::closed(0, 0, 2 * n + 1, 2 * n + 1).unwrap(),
            };
            if candidate.is_canonical() {
                return Ok((candidate, false));
            }
        }
    }
    let (inst, _) = canonicalize(raw)?;
    Ok((inst, true))
}

#[derive(Serialize, Deserialize)]
pub struct SolutionFile {
    pub indices: Vec<usize>,
}

pub fn solution_to_json(sol: &crate::solvers::IndependentSet) -> String {
    let mut s = serde_json::to_string_pretty(&SolutionFile { indices: sol.indices.clone() })
        .expect("solution serializes");
    s.push('\n');
    s
}

/// True iff the indexed rectangles are pairwise disjoint open rectangles.
pub fn solution_is_feasible(inst: &Instance, sol: &crate::solvers::IndependentSet) -> bool {
    let idx = &sol.indices;
    for (k, &i) in idx.iter().enumerate() {
        if i >= inst.n() {
            return false;
        }
        for &j in &idx[k + 1..] {
            if i == j || intersects(&inst.rects[i], &inst.rects[j]) {
                return false;
            }
        }
    }
    true
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::oracle;

    #[test]
    fn canonicalize_two_disjoint_float_rects() {
        let raw = vec![
            RawRect { x1: 0.25, y1: 0.5, x2: 1.75, y2: 2.5 },
            RawRect { x1: 3.5, y1: 4.25, x2: 5.0, y2: 6.75 },
        ];
        let (inst, lift) = canonicalize(&raw).unwrap();
        let mut xs: Vec<i64> = inst.rects.iter().flat_map(|r| [r.x1, r.x2]).collect();
        xs.sort_unstable();
        assert_eq!(xs, vec![1, 2, 3, 4]);
        let mut ys: Vec<i64> = inst.rects.iter().flat_map(|r| [r.y1, r.y2]).collect();
        ys.sort_unstable();
        assert_eq!(ys, vec![1, 2, 3, 4]);
        assert_eq!(lift.mapping, vec![0, 1]);
    }

    #[test]
    fn canonicalize_preserves_touching_as_disjoint() {
        // Shared x-coordinate: open rects touch but do not intersect, and the
        // canonical instance must keep them disjoint.
        let raw = vec![
            RawRect { x1: 0.0, y1: 0.0, x2: 2.0, y2: 2.0 },
            RawRect { x1: 2.0, y1: 0.0, x2: 4.0, y2: 2.0 },
        ];
        let (inst, _) = canonicalize(&raw).unwrap();
        assert!(!intersects(&inst.rects[0], &inst.rects[1]));
        // And in the reversed input order as well.
        let raw_rev: Vec<RawRect> = raw.into_iter().rev().collect();
        let (inst2, _) = canonicalize(&raw_rev).unwrap();
        assert!(!intersects(&inst2.rects[0], &inst2.rects[1]));
    }

    #[test]
    fn canonicalize_preserves_adjacency_under_ties() {
        for seed in 0..40u64 {
            let raw = oracle::random_raw_rects_with_ties(seed, 3 + (seed as usize % 8));
            let before: Vec<u128> = {
                let rects: Vec<Rect> = raw
                    .iter()
                    .map(|r| {
                        Rect::open(
                            (r.x1 * 2.0) as i64,
                            (r.y1 * 2.0) as i64,
                            (r.x2 * 2.0) as i64,
                            (r.y2 * 2.0) as i64,
                        )
                        .unwrap()
                    })
                    .collect();
                let n = rects.len();
                let mut rows = vec![0u128; n];
                for i in 0..n {
                    for j in 0..n {
                        if i != j && intersects(&rects[i], &rects[j]) {
                            rows[i] |= 1 << j;
                        }
                    }
                }
                rows
            };
            let (inst, _) = canonicalize(&raw).unwrap();
            assert!(inst.is_canonical());
            assert_eq!(before, oracle::adjacency_matrix(&inst), "seed {seed}");
        }
    }

    #[test]
    fn canonicalize_idempotent_on_structure() {
        let inst = generate(GenKind::UniformRandom, 8, 5).unwrap();
        let raw: Vec<RawRect> = inst
            .rects
            .iter()
            .map(|r| RawRect { x1: r.x1 as f64, y1: r.y1 as f64, x2: r.x2 as f64, y2: r.y2 as f64 })
            .collect();
        let (again, _) = canonicalize(&raw).unwrap();
        assert_eq!(oracle::adjacency_matrix(&inst), oracle::adjacency_matrix(&again));
    }

    #[test]
    fn canonicalize_rejects_zero_area() {
        let raw = vec![RawRect { x1: 1.0, y1: 1.0, x2: 1.0, y2: 3.0 }];
        assert!(matches!(canonicalize(&raw), Err(InstanceError::ZeroArea(0))));
    }

    #[test]
    fn kernel_contains_sources_and_lifts() {
        let inst = generate(GenKind::UniformRandom, 10, 3).unwrap();
        let (kernel, lift) = kernelize(&inst);
        for (k, group) in lift.source_groups.iter().enumerate() {
            for &i in group {
                // Kernel coordinates are doubled.
                let doubled = Rect::open(
                    2 * inst.rects[i].x1,
                    2 * inst.rects[i].y1,
                    2 * inst.rects[i].x2,
                    2 * inst.rects[i].y2,
                )
                .unwrap();
                assert!(kernel.rects[k].contains_rect(&doubled));
            }
        }
        assert!(kernel.n() <= inst.n());
    }

    #[test]
    fn single_rect_kernel() {
        let raw = vec![RawRect { x1: 0.0, y1: 0.0, x2: 1.0, y2: 1.0 }];
        let (inst, _) = canonicalize(&raw).unwrap();
        let (kernel, lift) = kernelize(&inst);
        assert_eq!(kernel.n(), 1);
        let sol = crate::solvers::IndependentSet { indices: vec![0] };
        assert_eq!(lift.lift(&sol).indices, vec![0]);
    }

    #[test]
    fn generate_disjoint_grid_is_all_disjoint() {
        let inst = generate(GenKind::DisjointGrid, 9, 17).unwrap();
        for i in 0..9 {
            for j in (i + 1)..9 {
                assert!(!intersects(&inst.rects[i], &inst.rects[j]));
            }
        }
    }

    #[test]
    fn generate_is_deterministic() {
        let a = generate(GenKind::UniformRandom, 10, 7).unwrap();
        let b = generate(GenKind::UniformRandom, 10, 7).unwrap();
        assert_eq!(instance_to_json(&a), instance_to_json(&b));
    }

    #[test]
    fn generate_nested_stacks_all_overlap() {
        let inst = generate(GenKind::NestedStacks, 5, 1).unwrap();
        for i in 0..5 {
            for j in (i + 1)..5 {
                assert!(intersects(&inst.rects[i], &inst.rects[j]));
            }
        }
    }

    #[test]
    fn json_round_trip() {
        let inst = generate(GenKind::UniformRandom, 6, 11).unwrap();
        let text = instance_to_json(&inst);
        let raw = raw_from_json(&text).unwrap();
        let (loaded, canonicalized) = load_lenient(&raw).unwrap();
        assert!(!canonicalized);
        assert_eq!(loaded, inst);
    }
}
