use rayon::prelude::*;

/// True unless `NO_PARALLEL` is set to something other than `0` or empty.
pub fn enabled() -> bool {
    !matches!(std::env::var("NO_PARALLEL"), Ok(v) if !v.is_empty() && v != "0")
}

/// Order-preserving map, parallel unless disabled; stops at the first
/// error in input order.
pub fn try_map<T, U, E, F>(items: &[T], f: F) -> Result<Vec<U>, E>
where
    T: Sync,
    U: Send,
    E: Send,
    F: Fn(&T) -> Result<U, E> + Sync + Send,
{
    if enabled() {
        items.par_iter().map(f).collect()
    } else {
        items.iter().map(f).collect()
    }
}
