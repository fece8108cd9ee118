//! Worker-pool selection shared by the scanners.

/// A dedicated rayon pool of a fixed size, or the global pool.
pub struct Workers(Option<rayon::ThreadPool>);

impl Workers {
    pub fn new(workers: Option<usize>) -> Self {
        Workers(workers.map(|n| {
            rayon::ThreadPoolBuilder::new()
                .num_threads(n.max(1))
                .build()
                .expect("thread pool")
        }))
    }

    pub fn install<R: Send>(&self, f: impl FnOnce() -> R + Send) -> R {
        match &self.0 {
            Some(pool) => pool.install(f),
            None => f(),
        }
    }
}
