//! Fake-rectangle sets: holes carved out of the bounding box that define
//! sub-instances, plus the validity and decomposition predicates.

use crate::cells::{self, Arrangement, CellMask};
use crate::geometry::{intersects, AlignmentPointSet, Rect};
use crate::instance::{Instance, SolutionLift};
use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Valid set of closed fake rectangles inside the bounding box, mutually
/// internally disjoint. `|rects|` is the boundary complexity of the
/// sub-instance it defines; the region is `S(F) = B \ union(F)`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FakeSet {
    pub rects: Vec<Rect>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub provenance: Option<String>,
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum FakeSetError {
    #[error("fake rectangle {0} is not inside the bounding box")]
    OutsideBox(usize),
    #[error("fake rectangles {0} and {1} overlap internally")]
    Overlap(usize, usize),
}

impl FakeSet {
    pub fn new(mut rects: Vec<Rect>) -> Self {
        for r in &mut rects {
            *r = r.as_closed();
        }
        rects.sort_by_key(|r| r.coords_key());
        FakeSet { rects, provenance: None }
    }

    pub fn empty() -> Self {
        FakeSet::new(Vec::new())
    }

    /// The set `{B}` whose region is empty.
    pub fn whole_box(bbox: &Rect) -> Self {
        FakeSet::new(vec![bbox.as_closed()])
    }

    pub fn with_provenance(mut self, tag: &str) -> Self {
        self.provenance = Some(tag.to_string());
        self
    }

    pub fn boundary_complexity(&self) -> usize {
        self.rects.len()
    }

    /// Deterministic encoding used for deduplication and ordering.
    pub fn encoding(&self) -> Vec<(i64, i64, i64, i64)> {
        self.rects.iter().map(|r| r.coords_key()).collect()
    }

    pub fn validate(&self, bbox: &Rect) -> Result<(), FakeSetError> {
        for (i, r) in self.rects.iter().enumerate() {
            if !bbox.contains_rect(r) {
                return Err(FakeSetError::OutsideBox(i));
            }
        }
        for i in 0..self.rects.len() {
            for j in (i + 1)..self.rects.len() {
                if intersects(&self.rects[i].as_open(), &self.rects[j].as_open()) {
                    return Err(FakeSetError::Overlap(i, j));
                }
            }
        }
        Ok(())
    }

    /// Cells of the arrangement whose centers lie in `S(F)`.
    pub fn region_mask(&self, arr: &Arrangement) -> CellMask {
        cells::uncovered_cells(arr, &self.rects)
    }

    /// Exact emptiness of `S(F)` via the arrangement of this set's own
    /// coordinates.
    pub fn region_is_empty(&self, bbox: &Rect) -> bool {
        let arr = Arrangement::from_rects(bbox, self.rects.iter());
        self.region_mask(&arr).is_empty()
    }

    pub fn is_aligned_with(&self, z: &AlignmentPointSet) -> bool {
        self.rects.iter().all(|r| z.is_rect_aligned(r))
    }
}

/// Definition-level validity check.
pub fn is_valid_fake_set(f: &FakeSet, bbox: &Rect) -> bool {
    f.validate(bbox).is_ok()
}

/// Indices of the instance rectangles contained in `S(F)`: the open
/// rectangles sharing no point with any fake rectangle.
pub fn induced_indices(inst: &Instance, f: &FakeSet) -> Vec<usize> {
    inst.rects
        .iter()
        .enumerate()
        .filter(|(_, r)| f.rects.iter().all(|fr| !intersects(&r.as_open(), fr)))
        .map(|(i, _)| i)
        .collect()
}

/// Bitmask form of `induced_indices` for solver calls.
pub fn induced_mask(inst: &Instance, f: &FakeSet) -> u128 {
    induced_indices(inst, f).iter().fold(0u128, |m, i| m | (1 << *i))
}

/// The sub-instance defined by a valid fake set, with its lift back to the
/// source instance.
pub fn subinstance(inst: &Instance, f: &FakeSet) -> Result<(Instance, SolutionLift), FakeSetError> {
    f.validate(&inst.bounding_box)?;
    let indices = induced_indices(inst, f);
    Ok(inst.restrict(&indices))
}

/// Shared arrangement over the coordinates of several fake sets.
pub fn joint_arrangement(bbox: &Rect, sets: &[&FakeSet]) -> Arrangement {
    Arrangement::from_rects(bbox, sets.iter().flat_map(|f| f.rects.iter()))
}

/// Valid decomposition pair: both regions strictly inside the parent region
/// and mutually disjoint. Exact via cell centers of the joint arrangement.
pub fn is_decomposition_pair(bbox: &Rect, f: &FakeSet, f1: &FakeSet, f2: &FakeSet) -> bool {
    if [f, f1, f2].iter().any(|s| s.validate(bbox).is_err()) {
        return false;
    }
    let arr = joint_arrangement(bbox, &[f, f1, f2]);
    let s = f.region_mask(&arr);
    let s1 = f1.region_mask(&arr);
    let s2 = f2.region_mask(&arr);
    s1.is_strict_subset_of(&s) && s2.is_strict_subset_of(&s) && s1.is_disjoint_from(&s2)
}

/// Valid decomposition triple, analogous to the pair predicate.
pub fn is_decomposition_triple(
    bbox: &Rect,
    f: &FakeSet,
    f1: &FakeSet,
    f2: &FakeSet,
    f3: &FakeSet,
) -> bool {
    if [f, f1, f2, f3].iter().any(|s| s.validate(bbox).is_err()) {
        return false;
    }
    let arr = joint_arrangement(bbox, &[f, f1, f2, f3]);
    let s = f.region_mask(&arr);
    let parts = [f1.region_mask(&arr), f2.region_mask(&arr), f3.region_mask(&arr)];
    for p in &parts {
        if !p.is_strict_subset_of(&s) {
            return false;
        }
    }
    parts[0].is_disjoint_from(&parts[1])
        && parts[0].is_disjoint_from(&parts[2])
        && parts[1].is_disjoint_from(&parts[2])
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::instance::{generate, GenKind};
    use crate::solvers::{mis_value, ConflictGraph, DEFAULT_NODE_BUDGET};

    fn bbox(n: i64) -> Rect {
        Rect::closed(0, 0, 2 * n + 1, 2 * n + 1).unwrap()
    }

    #[test]
    fn edge_sharing_fakes_are_valid() {
        let b = bbox(4);
        let f = FakeSet::new(vec![
            Rect::closed(0, 0, 2, 4).unwrap(),
            Rect::closed(2, 0, 5, 4).unwrap(),
        ]);
        assert!(is_valid_fake_set(&f, &b));
    }

    #[test]
    fn overlapping_fakes_are_invalid() {
        let b = bbox(4);
        let f = FakeSet::new(vec![
            Rect::closed(0, 0, 3, 4).unwrap(),
            Rect::closed(2, 0, 5, 4).unwrap(),
        ]);
        assert!(!is_valid_fake_set(&f, &b));
    }

    #[test]
    fn fake_outside_box_is_invalid() {
        let b = bbox(2);
        let f = FakeSet::new(vec![Rect::closed(0, 0, 9, 2).unwrap()]);
        assert!(!is_valid_fake_set(&f, &b));
    }

    #[test]
    fn empty_fake_set_keeps_everything() {
        let inst = generate(GenKind::UniformRandom, 8, 2).unwrap();
        let (sub, _) = subinstance(&inst, &FakeSet::empty()).unwrap();
        assert_eq!(sub.n(), inst.n());
    }

    #[test]
    fn whole_box_empties_everything() {
        let inst = generate(GenKind::UniformRandom, 8, 2).unwrap();
        let f = FakeSet::whole_box(&inst.bounding_box);
        let (sub, _) = subinstance(&inst, &f).unwrap();
        assert_eq!(sub.n(), 0);
        assert!(f.region_is_empty(&inst.bounding_box));
    }

    #[test]
    fn half_cover_keeps_other_half() {
        let inst = generate(GenKind::DisjointGrid, 9, 0).unwrap();
        let b = inst.bounding_box;
        let mid = (b.x1 + b.x2) / 2;
        let f = FakeSet::new(vec![Rect::closed(b.x1, b.y1, mid, b.y2).unwrap()]);
        let kept = induced_indices(&inst, &f);
        for (i, r) in inst.rects.iter().enumerate() {
            let strictly_right = r.x1 >= mid;
            assert_eq!(kept.contains(&i), strictly_right);
        }
    }

    #[test]
    fn subinstance_shrinks_monotonically() {
        let inst = generate(GenKind::UniformRandom, 10, 5).unwrap();
        let b = inst.bounding_box;
        let mut rects = Vec::new();
        let mut last = usize::MAX;
        for step in 0..4 {
            rects.push(Rect::closed(5 * step, 0, 5 * step + 3, 6).unwrap());
            let f = FakeSet::new(rects.clone());
            if f.validate(&b).is_err() {
                continue;
            }
            let kept = induced_indices(&inst, &f).len();
            assert!(kept <= last);
            last = kept;
        }
    }

    #[test]
    fn trivial_pair_with_whole_box() {
        let b = bbox(5);
        let f = FakeSet::empty();
        let wb = FakeSet::whole_box(&b);
        assert!(is_decomposition_pair(&b, &f, &wb, &wb));
        // Containment must be strict.
        assert!(!is_decomposition_pair(&b, &f, &f, &wb));
    }

    #[test]
    fn disjoint_halves_form_a_pair() {
        let b = bbox(5);
        let f = FakeSet::empty();
        let left = FakeSet::new(vec![Rect::closed(5, 0, 11, 11).unwrap()]);
        let right = FakeSet::new(vec![Rect::closed(0, 0, 5, 11).unwrap()]);
        assert!(is_decomposition_pair(&b, &f, &left, &right));
    }

    #[test]
    fn pair_optima_never_exceed_parent() {
        for seed in 0..12u64 {
            let inst = generate(GenKind::UniformRandom, 10, seed).unwrap();
            let graph = ConflictGraph::new(&inst).unwrap();
            let b = inst.bounding_box;
            let cut = 3 + (seed as i64 % 5);
            let f = FakeSet::empty();
            let f1 = FakeSet::new(vec![Rect::closed(cut, 0, b.x2, b.y2).unwrap()]);
            let f2 = FakeSet::new(vec![Rect::closed(0, 0, cut, b.y2).unwrap()]);
            assert!(is_decomposition_pair(&b, &f, &f1, &f2));
            let whole = mis_value(&graph, induced_mask(&inst, &f), DEFAULT_NODE_BUDGET).unwrap();
            let a = mis_value(&graph, induced_mask(&inst, &f1), DEFAULT_NODE_BUDGET).unwrap();
            let c = mis_value(&graph, induced_mask(&inst, &f2), DEFAULT_NODE_BUDGET).unwrap();
            assert!(a + c <= whole, "seed {seed}: {a} + {c} > {whole}");
        }
    }
}
