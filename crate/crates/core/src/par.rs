//! Trial-level data parallelism. With the `parallel` feature the `Parallel`
//! mode fans out over rayon; without it both modes run sequentially.

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum Execution {
    Sequential,
    #[default]
    Parallel,
}

/// `(0..n).map(f)` in the requested mode; results keep index order.
pub fn map_indexed<T, F>(exec: Execution, n: usize, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(usize) -> T + Sync + Send,
{
    match exec {
        Execution::Sequential => (0..n).map(f).collect(),
        Execution::Parallel => par_map(n, f),
    }
}

/// Maps over a slice in the requested mode.
pub fn map_slice<'a, S, T, F>(exec: Execution, items: &'a [S], f: F) -> Vec<T>
where
    S: Sync,
    T: Send,
    F: Fn(&'a S) -> T + Sync + Send,
{
    map_indexed(exec, items.len(), |k| f(&items[k]))
}

#[cfg(feature = "parallel")]
fn par_map<T: Send, F: Fn(usize) -> T + Sync + Send>(n: usize, f: F) -> Vec<T> {
    use rayon::prelude::*;
    (0..n).into_par_iter().map(f).collect()
}

#[cfg(not(feature = "parallel"))]
fn par_map<T: Send, F: Fn(usize) -> T + Sync + Send>(n: usize, f: F) -> Vec<T> {
    (0..n).map(f).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn modes_agree() {
        let f = |k: usize| k * k + 1;
        assert_eq!(map_indexed(Execution::Sequential, 100, f), map_indexed(Execution::Parallel, 100, f));
        assert!(map_indexed(Execution::Parallel, 0, f).is_empty());
    }
}
