//! Order-preserving data-parallel map. With the `parallel` feature the work
//! runs on the rayon pool unless the caller opts out; without it everything
//! is sequential.

#[cfg(feature = "parallel")]
use rayon::prelude::*;

/// Maps `f` over `items`, keeping input order in the output.
pub fn map<T, R, F>(items: Vec<T>, parallel: bool, f: F) -> Vec<R>
where
    T: Send,
    R: Send,
    F: Fn(T) -> R + Sync + Send,
{
    #[cfg(feature = "parallel")]
    {
        if parallel && items.len() > 1 {
            return items.into_par_iter().map(f).collect();
        }
    }
    let _ = parallel;
    items.into_iter().map(f).collect()
}

/// Sizes the global pool; `0` keeps rayon's default. Returns false if the
/// pool was already initialized or the feature is off.
pub fn init_threads(n: usize) -> bool {
    #[cfg(feature = "parallel")]
    {
        if n == 0 {
            return false;
        }
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .is_ok()
    }
    #[cfg(not(feature = "parallel"))]
    {
        let _ = n;
        false
    }
}

pub const fn available() -> bool {
    cfg!(feature = "parallel")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn preserves_order_both_ways() {
        let v: Vec<usize> = (0..1000).collect();
        let a = map(v.clone(), true, |x| x * x);
        let b = map(v, false, |x| x * x);
        assert_eq!(a, b);
        assert_eq!(a[999], 999 * 999);
    }
}
