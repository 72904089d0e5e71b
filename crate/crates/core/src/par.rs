//! Execution policy for the data-parallel loops (word enumeration, ball
//! frontiers, measurement rows).
//!
//! With the `parallel` feature disabled every policy runs sequentially. Results
//! never depend on the policy: parallel maps preserve input order and all
//! reductions are order independent.

#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum Exec {
    Sequential,
    #[default]
    Parallel,
}

impl Exec {
    pub fn map<T, R, F>(self, items: &[T], f: F) -> Vec<R>
    where
        T: Sync,
        R: Send,
        F: Fn(&T) -> R + Sync + Send,
    {
        match self {
            #[cfg(feature = "parallel")]
            Exec::Parallel => {
                use rayon::prelude::*;
                items.par_iter().map(f).collect()
            }
            _ => items.iter().map(f).collect(),
        }
    }

    /// Runs `f` inside a pool with `workers` threads (parallel builds only).
    pub fn with_workers<R: Send>(workers: usize, f: impl FnOnce() -> R + Send) -> R {
        #[cfg(feature = "parallel")]
        {
            if workers > 0 {
                if let Ok(pool) = rayon::ThreadPoolBuilder::new().num_threads(workers).build() {
                    return pool.install(f);
                }
            }
        }
        let _ = workers;
        f()
    }

    pub fn from_workers(workers: usize) -> Exec {
        if workers == 1 {
            Exec::Sequential
        } else {
            Exec::Parallel
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn policies_agree() {
        let xs: Vec<u64> = (0..1000).collect();
        let a = Exec::Sequential.map(&xs, |x| x * x);
        let b = Exec::Parallel.map(&xs, |x| x * x);
        assert_eq!(a, b);
    }
}
