//! Data-parallel map with a sequential fallback.

/// Maps `f` over `items`, in parallel when the `parallel` feature is on and
/// `parallel` is true. Output order matches input order.
pub fn map<T, R, F>(items: &[T], parallel: bool, f: F) -> Vec<R>
where
    T: Sync,
    R: Send,
    F: Fn(&T) -> R + Sync + Send,
{
    #[cfg(feature = "parallel")]
    if parallel {
        use rayon::prelude::*;
        return items.par_iter().map(f).collect();
    }
    let _ = parallel;
    items.iter().map(f).collect()
}

/// Whether the parallel path is compiled in.
pub const fn available() -> bool {
    cfg!(feature = "parallel")
}

#[cfg(test)]
mod tests {
    #[test]
    fn both_paths_agree() {
        let xs: Vec<u64> = (0..1000).collect();
        let a = super::map(&xs, true, |x| x * x);
        let b = super::map(&xs, false, |x| x * x);
        assert_eq!(a, b);
    }
}
