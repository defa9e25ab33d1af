//! Benchmark fixtures shared by the criterion targets.

use anyonwalk::{IslandConfig, OccupationDistribution};

/// A reproducible random background of `n` islands with occupations `lo..=hi`.
pub fn background(n: usize, lo: u32, hi: u32, seed: u64) -> IslandConfig {
    let occ = OccupationDistribution::uniform(lo, hi).expect("valid range");
    IslandConfig::random(n, &occ, &mut anyonwalk::seed::substream(seed, 0))
}
