use rand_chacha::ChaCha8Rng;

use crate::seed::replicate_rng;

/// Runs `job` once per replicate index and returns the results in index
/// order.
///
/// Each job receives its own generator derived from `(master_seed, index)`.
/// With the `parallel` feature the jobs run on the ambient rayon pool; the
/// output is identical for every pool size.
pub fn map_replicates<T, F>(master_seed: u64, count: u64, job: F) -> Vec<T>
where
    T: Send,
    F: Fn(u64, &mut ChaCha8Rng) -> T + Sync + Send,
{
    let run = |i: u64| {
        let mut rng = replicate_rng(master_seed, i);
        job(i, &mut rng)
    };
    #[cfg(feature = "parallel")]
    {
        use rayon::prelude::*;
        (0..count).into_par_iter().map(run).collect()
    }
    #[cfg(not(feature = "parallel"))]
    {
        (0..count).map(run).collect()
    }
}
