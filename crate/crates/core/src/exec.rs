//! Execution policy for data-parallel inner loops.
//!
//! With the `parallel` feature (default) `ExecMode::Parallel` farms work out
//! via rayon; without it both modes run sequentially. Results are returned in
//! index order either way, so outputs do not depend on the mode.

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum ExecMode {
    Sequential,
    #[default]
    Parallel,
}

impl std::str::FromStr for ExecMode {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "sequential" | "seq" => Ok(ExecMode::Sequential),
            "parallel" | "par" => Ok(ExecMode::Parallel),
            other => Err(format!("unknown exec mode `{other}`")),
        }
    }
}

/// Maps `f` over `0..n`, preserving index order in the output.
pub fn map_n<T, F>(mode: ExecMode, n: usize, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(usize) -> T + Sync + Send,
{
    #[cfg(feature = "parallel")]
    {
        if mode == ExecMode::Parallel {
            use rayon::prelude::*;
            return (0..n).into_par_iter().map(f).collect();
        }
    }
    let _ = mode;
    (0..n).map(f).collect()
}

/// True across all indices; short-circuits in sequential mode.
pub fn all_n<F>(mode: ExecMode, n: usize, f: F) -> bool
where
    F: Fn(usize) -> bool + Sync + Send,
{
    #[cfg(feature = "parallel")]
    {
        if mode == ExecMode::Parallel {
            use rayon::prelude::*;
            return (0..n).into_par_iter().all(f);
        }
    }
    let _ = mode;
    (0..n).all(f)
}
