//! Worker selection for the data-parallel loops.
//!
//! Every parallel loop in the crate maps independent work items to results
//! and collects them in input order, so output never depends on how many
//! workers ran. Without the `parallel` feature all loops are sequential.

/// How many workers a data-parallel loop may use.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Workers {
    /// Use the global rayon pool (all cores).
    #[default]
    Auto,
    /// Use exactly this many workers; `Count(0)` means [`Workers::Auto`] and
    /// `Count(1)` runs inline on the calling thread.
    Count(usize),
}

impl Workers {
    /// Interprets a thread cap where `0` means automatic.
    pub fn from_cap(cap: usize) -> Self {
        if cap == 0 {
            Self::Auto
        } else {
            Self::Count(cap)
        }
    }

    fn is_sequential(self) -> bool {
        !cfg!(feature = "parallel") || self == Self::Count(1)
    }
}

/// Maps `f` over `items` and returns the results in input order.
pub(crate) fn map_ordered<T, R, F>(items: &[T], workers: Workers, f: F) -> Vec<R>
where
    T: Sync,
    R: Send,
    F: Fn(&T) -> R + Sync + Send,
{
    if workers.is_sequential() {
        return items.iter().map(f).collect();
    }
    par_map(items, workers, f)
}

#[cfg(feature = "parallel")]
fn par_map<T, R, F>(items: &[T], workers: Workers, f: F) -> Vec<R>
where
    T: Sync,
    R: Send,
    F: Fn(&T) -> R + Sync + Send,
{
    use rayon::prelude::*;

    let run = || items.par_iter().map(&f).collect();
    match workers {
        Workers::Auto | Workers::Count(0) => run(),
        Workers::Count(n) => match rayon::ThreadPoolBuilder::new().num_threads(n).build() {
            Ok(pool) => pool.install(run),
            // pool creation only fails on OS thread exhaustion
            Err(_) => items.iter().map(&f).collect(),
        },
    }
}

#[cfg(not(feature = "parallel"))]
fn par_map<T, R, F>(items: &[T], _workers: Workers, f: F) -> Vec<R>
where
    F: Fn(&T) -> R,
{
    items.iter().map(f).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn order_is_preserved_for_any_worker_count() {
        let items: Vec<u64> = (0..1000).collect();
        let expected: Vec<u64> = items.iter().map(|x| x * x).collect();
        for w in [
            Workers::Auto,
            Workers::Count(1),
            Workers::Count(3),
            Workers::Count(8),
        ] {
            assert_eq!(map_ordered(&items, w, |x| x * x), expected);
        }
    }

    #[test]
    fn cap_zero_is_auto() {
        assert_eq!(Workers::from_cap(0), Workers::Auto);
        assert_eq!(Workers::from_cap(4), Workers::Count(4));
    }
}
