//! Maximum Independent Set of Rectangles (MISR) workbench.
//!
//! The crate models canonical MISR instances, exact and approximate solvers,
//! fake-rectangle sub-instances, randomized r-good partitions, planar cycle
//! separators, discretization grids, partitioning/cleanup trees, and a
//! table-driven dynamic program, together with brute-force oracles that make
//! every construction checkable at small scale.

pub mod cells;
pub mod dp;
pub mod exec;
pub mod fakes;
pub mod geometry;
pub mod grids;
pub mod instance;
pub mod oracle;
pub mod params;
pub mod partitions;
pub mod separators;
pub mod solvers;
pub mod trees;

pub use exec::ExecMode;
pub use params::Parameters;

/// Stable seed mixer (splitmix64) so derived sub-seeds do not depend on the
/// standard library hasher.
pub fn derive_seed(base: u64, tag: &str, index: u64) -> u64 {
    let mut h = base ^ 0x9e37_79b9_7f4a_7c15u64.wrapping_mul(index.wrapping_add(1));
    for b in tag.as_bytes() {
        h = h.wrapping_add(*b as u64);
        h = splitmix(h);
    }
    splitmix(h.wrapping_add(index))
}

fn splitmix(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}
