use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Environment variable capping the number of worker threads.
pub const THREADS_ENV: &str = "DIAMOND_FORESTS_THREADS";

/// Counter-based generator for one path: ChaCha8 keyed by `seed`, stream
/// `path_index`, starting at word 0. Draws within a path advance the
/// counter step by step, so a path's numbers never depend on how paths are
/// batched across threads.
pub fn path_rng(seed: u64, path_index: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(path_index);
    rng.set_word_pos(0);
    rng
}

/// Runs `f` on a pool limited by [`THREADS_ENV`], or on the global pool.
pub fn with_thread_cap<R: Send>(f: impl FnOnce() -> R + Send) -> R {
    let cap = std::env::var(THREADS_ENV)
        .ok()
        .and_then(|v| v.trim().parse::<usize>().ok())
        .filter(|&n| n > 0);
    match cap.and_then(|n| rayon::ThreadPoolBuilder::new().num_threads(n).build().ok()) {
        Some(pool) => pool.install(f),
        None => f(),
    }
}
