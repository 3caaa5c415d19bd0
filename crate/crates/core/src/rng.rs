//! Seed hierarchy for reproducible parallel Monte Carlo.
//!
//! Every replication owns a private stream seeded by
//! `derive_seed(master, index)`, so results never depend on how replications
//! are scheduled across threads.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

/// Generator used by every sampler in the crate.
pub type SimRng = ChaCha8Rng;

#[inline]
fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// `hash(master, index)`: child seed for stream `index` under `master`.
pub fn derive_seed(master: u64, index: u64) -> u64 {
    splitmix64(splitmix64(master) ^ splitmix64(index.wrapping_add(0xA076_1D64_78BD_642F)))
}

pub fn rng_from_seed(seed: u64) -> SimRng {
    SimRng::seed_from_u64(seed)
}

/// Stream for replication `index` under `master`.
pub fn stream(master: u64, index: u64) -> SimRng {
    rng_from_seed(derive_seed(master, index))
}

/// Runs `f` once per replication in parallel and returns the results in
/// replication order.
pub fn replicate<T, F>(master: u64, replications: usize, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(&mut SimRng, usize) -> T + Sync,
{
    (0..replications)
        .into_par_iter()
        .map(|i| {
            let mut rng = stream(master, i as u64);
            f(&mut rng, i)
        })
        .collect()
}

/// Like [`replicate`], but folds results into `acc` in replication order,
/// holding at most `chunk` results in memory at a time.
pub fn replicate_fold<T, A, F, G>(
    master: u64,
    replications: usize,
    chunk: usize,
    mut acc: A,
    f: F,
    mut fold: G,
) -> A
where
    T: Send,
    F: Fn(&mut SimRng, usize) -> T + Sync,
    G: FnMut(A, T) -> A,
{
    let chunk = chunk.max(1);
    let mut start = 0;
    while start < replications {
        let end = (start + chunk).min(replications);
        let part: Vec<T> = (start..end)
            .into_par_iter()
            .map(|i| {
                let mut rng = stream(master, i as u64);
                f(&mut rng, i)
            })
            .collect();
        for v in part {
            acc = fold(acc, v);
        }
        start = end;
    }
    acc
}
