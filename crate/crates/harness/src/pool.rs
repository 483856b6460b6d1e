//! Order-preserving parallel map over trial indices.

use rayon::prelude::*;

use crate::error::Result;

pub struct WorkerPool {
    pool: rayon::ThreadPool,
}

impl WorkerPool {
    /// `None` uses one worker per available CPU.
    pub fn new(workers: Option<usize>) -> Result<Self> {
        let mut builder = rayon::ThreadPoolBuilder::new();
        if let Some(w) = workers {
            builder = builder.num_threads(w.max(1));
        }
        Ok(WorkerPool { pool: builder.build()? })
    }

    pub fn workers(&self) -> usize {
        self.pool.current_num_threads()
    }

    /// `f(0), ..., f(count - 1)` in index order, whatever the schedule.
    pub fn map<T, F>(&self, count: u64, f: F) -> Vec<T>
    where
        T: Send,
        F: Fn(u64) -> T + Sync + Send,
    {
        self.pool.install(|| (0..count).into_par_iter().map(f).collect())
    }

    pub fn try_map<T, E, F>(&self, count: u64, f: F) -> std::result::Result<Vec<T>, E>
    where
        T: Send,
        E: Send,
        F: Fn(u64) -> std::result::Result<T, E> + Sync + Send,
    {
        self.pool.install(|| (0..count).into_par_iter().map(f).collect())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn results_are_in_index_order() {
        for w in [1, 3] {
            let pool = WorkerPool::new(Some(w)).unwrap();
            assert_eq!(pool.map(100, |i| i * i), (0..100u64).map(|i| i * i).collect::<Vec<_>>());
            let r: std::result::Result<Vec<u64>, String> =
                pool.try_map(10, |i| if i == 7 { Err("seven".to_string()) } else { Ok(i) });
            assert_eq!(r.unwrap_err(), "seven");
        }
    }
}
