//! Optional data parallelism. With the `parallel` feature, independent work
//! items are mapped on the rayon pool; otherwise, and in `Sequential` mode,
//! they run in order on the calling thread. Results are always returned in
//! input order.

#[cfg(feature = "parallel")]
use rayon::prelude::*;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Exec {
    Sequential,
    Parallel,
}

impl Default for Exec {
    fn default() -> Exec {
        if cfg!(feature = "parallel") {
            Exec::Parallel
        } else {
            Exec::Sequential
        }
    }
}

impl Exec {
    pub fn map<T, R, G>(self, items: &[T], f: G) -> Vec<R>
    where
        T: Sync,
        R: Send,
        G: Fn(&T) -> R + Sync + Send,
    {
        match self {
            #[cfg(feature = "parallel")]
            Exec::Parallel => items.par_iter().map(f).collect(),
            _ => items.iter().map(f).collect(),
        }
    }
}
