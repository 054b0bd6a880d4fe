//! Exact and approximate MISR solvers over the conflict graph.

use crate::geometry::intersects;
use crate::instance::{kernelize, Instance};
use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Intersection graph of an instance, one adjacency bitmask per rectangle.
#[derive(Debug, Clone)]
pub struct ConflictGraph {
    pub n: usize,
    pub adj: Vec<u128>,
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum SolverError {
    #[error("instance has {0} rectangles; the exact solver handles at most 128")]
    TooLarge(usize),
    #[error("exact search exceeded its node budget of {0}")]
    BudgetExceeded(u64),
}

pub const DEFAULT_NODE_BUDGET: u64 = 10_000_000;

impl ConflictGraph {
    pub fn new(inst: &Instance) -> Result<Self, SolverError> {
        let n = inst.n();
        if n > 128 {
            return Err(SolverError::TooLarge(n));
        }
        let mut adj = vec![0u128; n];
        for i in 0..n {
            for j in (i + 1)..n {
                if intersects(&inst.rects[i], &inst.rects[j]) {
                    adj[i] |= 1 << j;
                    adj[j] |= 1 << i;
                }
            }
        }
        Ok(ConflictGraph { n, adj })
    }

    pub fn full_mask(&self) -> u128 {
        if self.n == 128 {
            u128::MAX
        } else {
            (1u128 << self.n) - 1
        }
    }

    pub fn mask_of(&self, indices: &[usize]) -> u128 {
        indices.iter().fold(0u128, |m, i| m | (1 << *i))
    }
}

/// Set of pairwise disjoint rectangle indices, kept sorted.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct IndependentSet {
    pub indices: Vec<usize>,
}

impl IndependentSet {
    pub fn empty() -> Self {
        IndependentSet { indices: Vec::new() }
    }

    pub fn value(&self) -> u64 {
        self.indices.len() as u64
    }

    pub fn mask(&self) -> u128 {
        self.indices.iter().fold(0u128, |m, i| m | (1 << *i))
    }
}

struct Search<'g> {
    graph: &'g ConflictGraph,
    budget: u64,
    nodes: u64,
}

impl<'g> Search<'g> {
    /// Greedy clique cover of the masked subgraph; the number of cliques
    /// bounds the independence number from above.
    fn clique_cover_bound(&self, mut mask: u128) -> u32 {
        let mut cliques = 0u32;
        while mask != 0 {
            let v = mask.trailing_zeros() as usize;
            let mut clique_candidates = self.graph.adj[v] & mask;
            mask &= !(1u128 << v);
            while clique_candidates != 0 {
                let u = clique_candidates.trailing_zeros() as usize;
                clique_candidates &= self.graph.adj[u];
                mask &= !(1u128 << u);
                clique_candidates &= mask;
            }
            cliques += 1;
        }
        cliques
    }

    fn branch(&mut self, mask: u128, current: u32, best: &mut u32) -> Result<(), SolverError> {
        self.nodes += 1;
        if self.nodes > self.budget {
            return Err(SolverError::BudgetExceeded(self.budget));
        }
        if mask == 0 {
            *best = (*best).max(current);
            return Ok(());
        }
        if current + self.clique_cover_bound(mask) <= *best {
            return Ok(());
        }
        // Branch on the max-degree vertex: either it is in the set or not.
        let mut pick = mask.trailing_zeros() as usize;
        let mut max_deg = -1i32;
        let mut m = mask;
        while m != 0 {
            let v = m.trailing_zeros() as usize;
            m &= m - 1;
            let deg = (self.graph.adj[v] & mask).count_ones() as i32;
            if deg > max_deg {
                max_deg = deg;
                pick = v;
            }
        }
        if max_deg == 0 {
            *best = (*best).max(current + mask.count_ones());
            return Ok(());
        }
        let vbit = 1u128 << pick;
        self.branch(mask & !vbit & !self.graph.adj[pick], current + 1, best)?;
        self.branch(mask & !vbit, current, best)
    }
}

/// Maximum independent set value within `mask`.
pub fn mis_value(graph: &ConflictGraph, mask: u128, budget: u64) -> Result<u64, SolverError> {
    let mut search = Search { graph, budget, nodes: 0 };
    let mut best = 0u32;
    search.branch(mask, 0, &mut best)?;
    Ok(best as u64)
}

/// Maximum independent set within `mask` with deterministic tie-breaking:
/// among all maximum sets, the lexicographically smallest index sequence.
pub fn mis_set(graph: &ConflictGraph, mask: u128, budget: u64) -> Result<IndependentSet, SolverError> {
    let opt = mis_value(graph, mask, budget)?;
    let mut chosen: Vec<usize> = Vec::with_capacity(opt as usize);
    let mut remaining = mask;
    let mut need = opt;
    let mut floor = 0usize;
    while need > 0 {
        let mut found = false;
        for v in floor..graph.n {
            if remaining >> v & 1 == 0 {
                continue;
            }
            let rest = remaining & !(1u128 << v) & !graph.adj[v] & !((1u128 << (v + 1)) - 1);
            if 1 + mis_value(graph, rest, budget)? >= need {
                chosen.push(v);
                remaining = rest;
                need -= 1;
                floor = v + 1;
                found = true;
                break;
            }
        }
        assert!(found, "lexicographic reconstruction is always feasible");
    }
    Ok(IndependentSet { indices: chosen })
}

/// Exact maximum independent set of the whole instance.
pub fn exact_mis(inst: &Instance, budget: u64) -> Result<IndependentSet, SolverError> {
    let graph = ConflictGraph::new(inst)?;
    mis_set(&graph, graph.full_mask(), budget)
}

/// Memo table for exact optimum values, keyed by the induced index set.
/// Behaves as an idempotent cache, so concurrent fills would agree.
#[derive(Debug, Default)]
pub struct OptCache {
    map: std::collections::HashMap<u128, u64>,
}

impl OptCache {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn value(&mut self, graph: &ConflictGraph, mask: u128, budget: u64) -> Result<u64, SolverError> {
        if let Some(v) = self.map.get(&mask) {
            return Ok(*v);
        }
        let v = mis_value(graph, mask, budget)?;
        self.map.insert(mask, v);
        Ok(v)
    }

    pub fn len(&self) -> usize {
        self.map.len()
    }

    pub fn is_empty(&self) -> bool {
        self.map.is_empty()
    }
}

/// Guaranteed approximation factor of `approx_divide` on an `n`-rectangle
/// instance: one exactly solved level per halving of the instance.
pub fn approx_factor(n: usize) -> u64 {
    let n = n.max(2) as f64;
    n.log2().ceil() as u64 + 1
}

/// Divide-and-conquer approximation: split at the median x-midpoint, solve
/// the stabbed rectangles exactly as an interval problem, recurse on both
/// sides, and keep the better of the two alternatives.
pub fn approx_divide(inst: &Instance) -> IndependentSet {
    let ids: Vec<usize> = (0..inst.n()).collect();
    let mut out = approx_divide_ids(inst, &ids);
    out.indices.sort_unstable();
    out
}

/// Same as `approx_divide` restricted to a subset of rectangle indices.
pub fn approx_divide_ids(inst: &Instance, ids: &[usize]) -> IndependentSet {
    if ids.is_empty() {
        return IndependentSet::empty();
    }
    if ids.len() == 1 {
        return IndependentSet { indices: vec![ids[0]] };
    }
    // Median of doubled x-midpoints; lower median keeps both sides strictly
    // smaller than the whole.
    let mut mids: Vec<i64> = ids.iter().map(|i| inst.rects[*i].x1 + inst.rects[*i].x2).collect();
    mids.sort_unstable();
    let m2 = mids[(mids.len() - 1) / 2];
    let mut left = Vec::new();
    let mut right = Vec::new();
    let mut stabbed = Vec::new();
    for &i in ids {
        let r = &inst.rects[i];
        if 2 * r.x2 <= m2 {
            left.push(i);
        } else if 2 * r.x1 >= m2 {
            right.push(i);
        } else {
            stabbed.push(i);
        }
    }
    // All stabbed rectangles cross the same vertical line, so they conflict
    // exactly when their open y-intervals overlap: greedy interval scheduling
    // solves them optimally.
    stabbed.sort_by_key(|i| (inst.rects[*i].y2, inst.rects[*i].y1, *i));
    let mut stab_sol = Vec::new();
    let mut last_end = i64::MIN;
    for &i in &stabbed {
        if inst.rects[i].y1 >= last_end {
            stab_sol.push(i);
            last_end = inst.rects[i].y2;
        }
    }
    if left.is_empty() && right.is_empty() {
        return IndependentSet { indices: stab_sol };
    }
    let mut rec = approx_divide_ids(inst, &left).indices;
    rec.extend(approx_divide_ids(inst, &right).indices);
    // Augment the recursive alternative with every stabbed rectangle that
    // stays compatible; on fully disjoint inputs this recovers the optimum.
    for &i in &stabbed {
        if rec.iter().all(|&j| !intersects(&inst.rects[i], &inst.rects[j])) {
            rec.push(i);
        }
    }
    if stab_sol.len() >= rec.len() {
        IndependentSet { indices: stab_sol }
    } else {
        IndependentSet { indices: rec }
    }
}

/// Kernelize, approximate the kernel, and lift the solution back.
pub fn approx_wrapped(inst: &Instance) -> IndependentSet {
    let (kernel, lift) = kernelize(inst);
    let sol = approx_divide(&kernel);
    lift.lift(&sol)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::instance::{generate, solution_is_feasible, GenKind};
    use crate::oracle;

    #[test]
    fn single_rect() {
        let inst = generate(GenKind::DisjointGrid, 1, 0).unwrap();
        let sol = exact_mis(&inst, DEFAULT_NODE_BUDGET).unwrap();
        assert_eq!(sol.indices, vec![0]);
    }

    #[test]
    fn nested_stacks_value_one() {
        let inst = generate(GenKind::NestedStacks, 5, 0).unwrap();
        let sol = exact_mis(&inst, DEFAULT_NODE_BUDGET).unwrap();
        assert_eq!(sol.value(), 1);
        assert_eq!(approx_divide(&inst).value(), 1);
    }

    #[test]
    fn exact_matches_naive_enumeration() {
        let inst = generate(GenKind::UniformRandom, 10, 7).unwrap();
        let graph = ConflictGraph::new(&inst).unwrap();
        let naive = oracle::naive_mis_value(&graph);
        let sol = exact_mis(&inst, DEFAULT_NODE_BUDGET).unwrap();
        assert_eq!(sol.value(), naive);
        assert!(solution_is_feasible(&inst, &sol));
    }

    #[test]
    fn budget_failure_is_explicit() {
        let inst = generate(GenKind::UniformRandom, 12, 3).unwrap();
        assert!(matches!(exact_mis(&inst, 2), Err(SolverError::BudgetExceeded(2))));
    }

    #[test]
    fn lexicographically_smallest_optimum() {
        // Two disjoint pairs of identical twins: {0, 2} ties {0, 3}, {1, 2},
        // {1, 3}; the lex-smallest must win.
        let raw = vec![
            crate::instance::RawRect { x1: 0.0, y1: 0.0, x2: 1.0, y2: 1.0 },
            crate::instance::RawRect { x1: 0.1, y1: 0.1, x2: 0.9, y2: 0.9 },
            crate::instance::RawRect { x1: 5.0, y1: 5.0, x2: 6.0, y2: 6.0 },
            crate::instance::RawRect { x1: 5.1, y1: 5.1, x2: 5.9, y2: 5.9 },
        ];
        let (inst, _) = crate::instance::canonicalize(&raw).unwrap();
        let sol = exact_mis(&inst, DEFAULT_NODE_BUDGET).unwrap();
        assert_eq!(sol.indices, vec![0, 2]);
    }

    #[test]
    fn approx_divide_exact_on_disjoint_grid() {
        let inst = generate(GenKind::DisjointGrid, 9, 0).unwrap();
        let sol = approx_divide(&inst);
        assert_eq!(sol.value(), 9);
        assert!(solution_is_feasible(&inst, &sol));
    }

    #[test]
    fn approx_divide_respects_logarithmic_guarantee() {
        for seed in 0..50u64 {
            let n = 4 + (seed as usize % 9);
            let inst = generate(GenKind::UniformRandom, n, seed).unwrap();
            let opt = exact_mis(&inst, DEFAULT_NODE_BUDGET).unwrap().value();
            let approx = approx_divide(&inst);
            assert!(solution_is_feasible(&inst, &approx));
            assert!(approx.value() <= opt);
            let factor = approx_factor(n);
            assert!(
                approx.value() * factor >= opt,
                "seed {seed}: approx {} opt {opt} factor {factor}",
                approx.value()
            );
        }
    }

    #[test]
    fn approx_wrapped_feasible_and_bounded() {
        for seed in [3u64, 11, 19] {
            let inst = generate(GenKind::UniformRandom, 10, seed).unwrap();
            let opt = exact_mis(&inst, DEFAULT_NODE_BUDGET).unwrap().value();
            let sol = approx_wrapped(&inst);
            assert!(solution_is_feasible(&inst, &sol));
            assert!(sol.value() >= 1);
            assert!(sol.value() <= opt);
        }
    }
}
