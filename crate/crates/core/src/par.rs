//! Data-parallel helpers with a sequential fallback.
//!
//! With the `parallel` feature (default) [`Exec::Parallel`] runs on the rayon
//! global pool; without it every call is sequential. Results are always
//! returned in index order, so output never depends on scheduling.

#[cfg(feature = "parallel")]
use rayon::prelude::*;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Exec {
    Sequential,
    #[default]
    Parallel,
}

impl Exec {
    pub fn is_parallel(self) -> bool {
        cfg!(feature = "parallel") && self == Exec::Parallel
    }

    /// `(0..n).map(f).collect()`.
    pub fn map_range<T, F>(self, n: usize, f: F) -> Vec<T>
    where
        T: Send,
        F: Fn(usize) -> T + Sync + Send,
    {
        #[cfg(feature = "parallel")]
        if self.is_parallel() {
            return (0..n).into_par_iter().map(f).collect();
        }
        (0..n).map(f).collect()
    }

    /// `items.iter().map(f).collect()`.
    pub fn map_slice<A, T, F>(self, items: &[A], f: F) -> Vec<T>
    where
        A: Sync,
        T: Send,
        F: Fn(&A) -> T + Sync + Send,
    {
        #[cfg(feature = "parallel")]
        if self.is_parallel() {
            return items.par_iter().map(f).collect();
        }
        items.iter().map(f).collect()
    }

    /// `items.iter().all(f)`.
    pub fn all<A, F>(self, items: &[A], f: F) -> bool
    where
        A: Sync,
        F: Fn(&A) -> bool + Sync + Send,
    {
        #[cfg(feature = "parallel")]
        if self.is_parallel() {
            return items.par_iter().all(f);
        }
        items.iter().all(f)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn both_modes_agree_and_keep_order() {
        let xs: Vec<u64> = (0..1000).collect();
        let seq = Exec::Sequential.map_slice(&xs, |x| x * x);
        let par = Exec::Parallel.map_slice(&xs, |x| x * x);
        assert_eq!(seq, par);
        assert_eq!(Exec::Parallel.map_range(5, |i| i), vec![0, 1, 2, 3, 4]);
        assert!(Exec::Parallel.all(&xs, |&x| x < 1000));
        assert!(!Exec::Sequential.all(&xs, |&x| x < 999));
    }
}
