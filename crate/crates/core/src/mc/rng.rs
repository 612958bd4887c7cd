use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

/// Consecutive trials sharing one generator stream.
pub const BLOCK_TRIALS: u64 = 1024;

/// Generator for block `block` of a run seeded with `seed`.
pub fn block_rng(seed: u64, block: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(block);
    rng
}

/// Runs `work(rng, trials_in_block)` over every block in parallel and
/// returns the per-block results in block order.
pub(crate) fn map_blocks<T, F>(seed: u64, trials: u64, work: F) -> Vec<T>
where
    T: Send,
    F: Fn(&mut ChaCha8Rng, u64) -> T + Sync,
{
    let blocks = trials.div_ceil(BLOCK_TRIALS);
    (0..blocks)
        .into_par_iter()
        .map(|b| {
            let len = BLOCK_TRIALS.min(trials - b * BLOCK_TRIALS);
            work(&mut block_rng(seed, b), len)
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::Rng;

    #[test]
    fn streams_are_distinct_and_repeatable() {
        let a: u64 = block_rng(7, 0).random();
        let b: u64 = block_rng(7, 1).random();
        let c: u64 = block_rng(8, 0).random();
        assert_ne!(a, b);
        assert_ne!(a, c);
        assert_eq!(a, block_rng(7, 0).random::<u64>());
    }

    #[test]
    fn blocks_cover_trials_in_order() {
        let lens = map_blocks(1, 2 * BLOCK_TRIALS + 5, |_, len| len);
        assert_eq!(lens, vec![BLOCK_TRIALS, BLOCK_TRIALS, 5]);
        assert!(map_blocks(1, 0, |_, len| len).is_empty());
    }

    #[test]
    fn independent_of_thread_count() {
        let run = |threads| {
            rayon::ThreadPoolBuilder::new()
                .num_threads(threads)
                .build()
                .unwrap()
                .install(|| map_blocks(99, 50_000, |rng, len| (0..len).map(|_| rng.random::<u32>() as u64).sum::<u64>()))
        };
        assert_eq!(run(1), run(4));
    }
}
