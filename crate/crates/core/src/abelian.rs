//! Abelian anyonic walk: the walker picks up `e^{+-i pi m / N}` whenever it
//! passes an island holding `m` anyons.

use std::f64::consts::{FRAC_1_SQRT_2, PI};

use num_complex::Complex64;
use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::distribution::{OccupationDistribution, SpatialDistribution};
use crate::error::{Error, Result};
use crate::pathsum::{HistoryTable, PhaseTally};
use crate::seed::{substream, NOISE_STREAM, REDUCTION_BLOCK};
use crate::stats::{mean_stderr, raw_variance, VariancePoint};
use crate::topo::invariants::check_dims;
use crate::walk::{IslandConfig, LinkingProfile, WalkGeometry};

/// Default enumeration limit for Abelian path sums.
pub const PATHSUM_STEP_LIMIT: usize = 14;
/// Imaginary parts below this are rounding noise.
pub const IMAGINARY_TOLERANCE: f64 = 1e-12;
/// Imaginary parts above this indicate a convention error.
pub const IMAGINARY_ABORT: f64 = 1e-9;

/// Exchange angle `sign * pi / N`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct AbelianStatistics {
    pub n: u32,
    pub sign: i8,
}

impl AbelianStatistics {
    pub fn new(n: u32, sign: i8) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidParameter("N must be at least 1".into()));
        }
        if sign != 1 && sign != -1 {
            return Err(Error::InvalidParameter(format!("sign must be +1 or -1, got {sign}")));
        }
        Ok(Self { n, sign })
    }

    pub fn fermions() -> Self {
        Self { n: 1, sign: 1 }
    }

    pub fn angle(&self) -> f64 {
        self.sign as f64 * PI / self.n as f64
    }

    /// `e^{i pi k / N}` for `k` in `0..2N`.
    fn roots(&self) -> Vec<Complex64> {
        (0..2 * self.n).map(|k| Complex64::from_polar(1.0, PI * k as f64 / self.n as f64)).collect()
    }

    /// Index into [`Self::roots`] of the phase picked up by `m` crossings.
    fn phase_index(&self, m: i64) -> usize {
        (self.sign as i64 * m).rem_euclid(2 * self.n as i64) as usize
    }
}

/// `prod_s exp(+-2 pi i m_s l_s / N)`.
pub fn abelian_trace(profile: &LinkingProfile, config: &IslandConfig, stats: &AbelianStatistics) -> Result<Complex64> {
    check_dims(profile, config)?;
    let k: i64 = profile.links().iter().zip(config.as_slice()).map(|(&l, &m)| 2 * l * m as i64).sum();
    Ok(stats.roots()[stats.phase_index(k)])
}

fn check_geometry(config: &IslandConfig, geometry: &WalkGeometry) -> Result<()> {
    if config.len() != geometry.n {
        return Err(Error::Dimension(format!(
            "configuration has {} islands, lattice {} sites",
            config.len(),
            geometry.n
        )));
    }
    Ok(())
}

/// Converts per-endpoint phase tallies into probabilities, enforcing reality.
fn tallies_to_distribution(
    tallies: Vec<(i64, PhaseTally)>,
    stats: &AbelianStatistics,
    geometry: &WalkGeometry,
) -> Result<(SpatialDistribution, f64)> {
    let roots = stats.roots();
    let scale = 0.5f64.powi(geometry.t as i32);
    let mut p = vec![0.0; geometry.n];
    let mut worst: f64 = 0.0;
    for (site, tally) in tallies {
        let value: Complex64 = tally.0.iter().zip(&roots).map(|(&c, r)| r * c as f64).sum::<Complex64>() * scale;
        if value.im.abs() > IMAGINARY_ABORT {
            return Err(Error::ImaginaryResidue { site, residue: value.im, tolerance: IMAGINARY_ABORT });
        }
        worst = worst.max(value.im.abs());
        p[geometry.site_index(site)] = value.re;
    }
    Ok((SpatialDistribution::new(geometry, p), worst))
}

/// `p(s, t)` by summing `(-1)^z` times the Abelian trace over every pair of
/// histories ending at `s`. Phases are tallied exactly by their root index.
pub fn fixed_config_distribution_pathsum(
    config: &IslandConfig,
    stats: &AbelianStatistics,
    geometry: &WalkGeometry,
    limit: usize,
) -> Result<SpatialDistribution> {
    check_geometry(config, geometry)?;
    let table = HistoryTable::build(geometry.t, geometry.s0, limit)?;
    let m: Vec<i64> = (0..table.width()).map(|w| config.get(table.island_lo() + w as i64) as i64).collect();
    let two_n = 2 * stats.n as usize;
    let tallies = table.pair_sum(
        || (),
        |_, a, b| {
            let k: i64 = m.iter().zip(a.counts.iter().zip(b.counts)).map(|(&mi, (&ca, &cb))| mi * (ca as i64 - cb as i64)).sum();
            let mut idx = stats.phase_index(k);
            if (a.z + b.z) % 2 == 1 {
                idx = (idx + stats.n as usize) % two_n;
            }
            let mut tally = vec![0i64; two_n];
            tally[idx] = 1;
            Ok(PhaseTally(tally))
        },
    )?;
    let (dist, residue) = tallies_to_distribution(tallies, stats, geometry)?;
    Ok(dist
        .with_meta("engine", "abelian-pathsum")
        .with_meta("N", stats.n)
        .with_meta("sign", stats.sign)
        .with_meta("max_imaginary_residue", residue))
}

/// Amplitudes over (site, coin) with island phases precomputed per site.
#[derive(Clone, Debug)]
pub struct AbelianWalker {
    s0: i64,
    n: usize,
    steps: usize,
    amp: [Vec<Complex64>; 2],
    scratch: [Vec<Complex64>; 2],
    /// Phase for a right move from site index `i` (crosses island `i + 1`).
    right: Vec<Complex64>,
    /// Phase for a left move from site index `i` (crosses island `i`).
    left: Vec<Complex64>,
}

impl AbelianWalker {
    pub fn new(config: &IslandConfig, stats: &AbelianStatistics, geometry: &WalkGeometry) -> Result<Self> {
        check_geometry(config, geometry)?;
        let n = geometry.n;
        let roots = stats.roots();
        let phase = |island: i64| roots[stats.phase_index(config.get(island) as i64)];
        let right = (0..n).map(|i| phase(i as i64 + 1)).collect();
        let left = (0..n).map(|i| phase(i as i64)).collect();
        let mut amp = [vec![Complex64::default(); n], vec![Complex64::default(); n]];
        amp[0][geometry.site_index(geometry.s0)] = Complex64::new(1.0, 0.0);
        Ok(Self { s0: geometry.s0, n, steps: 0, scratch: amp.clone(), amp, right, left })
    }

    pub fn steps(&self) -> usize {
        self.steps
    }

    /// Site indices that can hold amplitude after the current step count.
    fn cone(&self, extra: usize) -> (i64, i64) {
        let c = self.s0 - 1;
        let r = (self.steps + extra) as i64;
        if 2 * r + 1 >= self.n as i64 {
            (0, self.n as i64 - 1)
        } else {
            (c - r, c + r)
        }
    }

    /// Hadamard coin followed by the phase-conditioned shift.
    pub fn step(&mut self) {
        let n = self.n as i64;
        let (lo, hi) = self.cone(1);
        for side in &mut self.scratch {
            for i in lo..=hi {
                side[i.rem_euclid(n) as usize] = Complex64::default();
            }
        }
        let (olo, ohi) = self.cone(0);
        for i in olo..=ohi {
            let iu = i.rem_euclid(n) as usize;
            let (c0, c1) = (self.amp[0][iu], self.amp[1][iu]);
            let up = (c0 - c1) * FRAC_1_SQRT_2;
            let down = (c0 + c1) * FRAC_1_SQRT_2;
            let r = (i + 1).rem_euclid(n) as usize;
            let l = (i - 1).rem_euclid(n) as usize;
            self.scratch[1][r] += up * self.right[iu];
            self.scratch[0][l] += down * self.left[iu];
        }
        std::mem::swap(&mut self.amp, &mut self.scratch);
        self.steps += 1;
    }

    /// Multiplies both coin components at site `s` by `-1`.
    pub fn flip_sign(&mut self, s: i64) {
        let i = (s - 1).rem_euclid(self.n as i64) as usize;
        self.amp[0][i] = -self.amp[0][i];
        self.amp[1][i] = -self.amp[1][i];
    }

    pub fn probabilities(&self) -> Vec<f64> {
        self.amp[0].iter().zip(&self.amp[1]).map(|(a, b)| a.norm_sqr() + b.norm_sqr()).collect()
    }

    pub fn norm_sqr(&self) -> f64 {
        self.probabilities().iter().sum()
    }

    pub fn variance(&self) -> f64 {
        raw_variance(&self.probabilities(), self.s0)
    }
}

/// Direct unitary evolution for `geometry.t` steps.
pub fn fixed_config_distribution_statevec(
    config: &IslandConfig,
    stats: &AbelianStatistics,
    geometry: &WalkGeometry,
) -> Result<SpatialDistribution> {
    let mut walker = AbelianWalker::new(config, stats, geometry)?;
    for _ in 0..geometry.t {
        walker.step();
    }
    Ok(SpatialDistribution::new(geometry, walker.probabilities())
        .with_meta("engine", "abelian-statevec")
        .with_meta("N", stats.n)
        .with_meta("sign", stats.sign))
}

/// Exact disorder average for `W(m)` uniform on `1..=N`: only pairs whose
/// every winding number vanishes mod `N` survive.
pub fn averaged_distribution_exact(
    stats: &AbelianStatistics,
    geometry: &WalkGeometry,
    limit: usize,
) -> Result<SpatialDistribution> {
    let table = HistoryTable::build(geometry.t, geometry.s0, limit)?;
    let n = stats.n as i64;
    let sums = table.pair_sum(
        || (),
        |_, a, b| {
            let pass = a.counts.iter().zip(b.counts).all(|(&ca, &cb)| ((ca as i64 - cb as i64) / 2) % n == 0);
            Ok(if !pass {
                0i64
            } else if (a.z + b.z) % 2 == 0 {
                1
            } else {
                -1
            })
        },
    )?;
    let scale = 0.5f64.powi(geometry.t as i32);
    let mut p = vec![0.0; geometry.n];
    for (site, s) in sums {
        p[geometry.site_index(site)] = s as f64 * scale;
    }
    Ok(SpatialDistribution::new(geometry, p)
        .with_meta("engine", "abelian-exact-average")
        .with_meta("N", stats.n))
}

/// Sample average of state-vector distributions.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct McAverage {
    pub distribution: SpatialDistribution,
    /// Standard error of the mean of `p` per site.
    pub stderr: Vec<f64>,
    /// Mean of `ln p` per site; `None` where some sample had `p = 0`.
    pub mean_ln_p: Vec<Option<f64>>,
    /// `sigma^2(t)` for `t = 1..=T`, averaged over samples.
    pub variance: Vec<VariancePoint>,
    pub samples: usize,
}

/// Running sums over a block of samples.
#[derive(Clone)]
pub(crate) struct Accumulator {
    sum: Vec<f64>,
    sum_sq: Vec<f64>,
    sum_ln: Vec<f64>,
    positive: Vec<bool>,
    var_sum: Vec<f64>,
    var_sum_sq: Vec<f64>,
    count: usize,
}

impl Accumulator {
    pub(crate) fn new(n: usize, t: usize) -> Self {
        Self {
            sum: vec![0.0; n],
            sum_sq: vec![0.0; n],
            sum_ln: vec![0.0; n],
            positive: vec![true; n],
            var_sum: vec![0.0; t],
            var_sum_sq: vec![0.0; t],
            count: 0,
        }
    }

    pub(crate) fn add_sample(&mut self, p: &[f64], variances: &[f64]) {
        for (i, &pi) in p.iter().enumerate() {
            self.sum[i] += pi;
            self.sum_sq[i] += pi * pi;
            if pi > 0.0 {
                self.sum_ln[i] += pi.ln();
            } else {
                self.positive[i] = false;
            }
        }
        for (k, &v) in variances.iter().enumerate() {
            self.var_sum[k] += v;
            self.var_sum_sq[k] += v * v;
        }
        self.count += 1;
    }

    pub(crate) fn merge(&mut self, other: &Self) {
        for i in 0..self.sum.len() {
            self.sum[i] += other.sum[i];
            self.sum_sq[i] += other.sum_sq[i];
            self.sum_ln[i] += other.sum_ln[i];
            self.positive[i] &= other.positive[i];
        }
        for k in 0..self.var_sum.len() {
            self.var_sum[k] += other.var_sum[k];
            self.var_sum_sq[k] += other.var_sum_sq[k];
        }
        self.count += other.count;
    }

    pub(crate) fn finish(self, geometry: &WalkGeometry) -> McAverage {
        let n = self.count;
        let mut mean = Vec::with_capacity(self.sum.len());
        let mut stderr = Vec::with_capacity(self.sum.len());
        for i in 0..self.sum.len() {
            let (m, e) = mean_stderr(self.sum[i], self.sum_sq[i], n);
            mean.push(m);
            stderr.push(e);
        }
        let mean_ln_p = self
            .sum_ln
            .iter()
            .zip(&self.positive)
            .map(|(&s, &ok)| ok.then(|| s / n as f64))
            .collect();
        let variance = self
            .var_sum
            .iter()
            .zip(&self.var_sum_sq)
            .enumerate()
            .map(|(k, (&s, &s2))| {
                let (m, e) = mean_stderr(s, s2, n);
                VariancePoint { t: k + 1, mean: m, stderr: e }
            })
            .collect();
        McAverage { distribution: SpatialDistribution::new(geometry, mean), stderr, mean_ln_p, variance, samples: n }
    }
}

/// Runs `samples` independent samples in fixed blocks and merges the blocks in
/// index order.
pub(crate) fn run_blocks<F>(samples: usize, geometry: &WalkGeometry, series_len: usize, sample: F) -> Result<McAverage>
where
    F: Fn(u64, &mut Accumulator) -> Result<()> + Sync + Send,
{
    if samples == 0 {
        return Err(Error::InvalidParameter("at least one sample is required".into()));
    }
    let blocks: Vec<usize> = (0..samples).step_by(REDUCTION_BLOCK).collect();
    let partial: Vec<Result<Accumulator>> = blocks
        .par_iter()
        .map(|&start| {
            let mut acc = Accumulator::new(geometry.n, series_len);
            for i in start..(start + REDUCTION_BLOCK).min(samples) {
                sample(i as u64, &mut acc)?;
            }
            Ok(acc)
        })
        .collect();
    let mut total = Accumulator::new(geometry.n, series_len);
    for acc in partial {
        total.merge(&acc?);
    }
    Ok(total.finish(geometry))
}

/// Region of sites subject to temporal sign noise, inclusive.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct TemporalNoise {
    pub p_minus1: f64,
    pub region: (i64, i64),
}

impl TemporalNoise {
    pub fn none() -> Self {
        Self { p_minus1: 0.0, region: (1, 0) }
    }

    pub fn whole_lattice(p_minus1: f64, geometry: &WalkGeometry) -> Self {
        Self { p_minus1, region: (1, geometry.n as i64) }
    }

    fn validate(&self, geometry: &WalkGeometry) -> Result<()> {
        if !(0.0..=1.0).contains(&self.p_minus1) {
            return Err(Error::InvalidParameter(format!("p_minus1 = {} outside [0, 1]", self.p_minus1)));
        }
        let (lo, hi) = self.region;
        if lo <= hi && (lo < 1 || hi > geometry.n as i64) {
            return Err(Error::Geometry(format!("noise region [{lo}, {hi}] outside 1..={}", geometry.n)));
        }
        Ok(())
    }
}

/// Monte Carlo disorder average over configurations drawn from `occupation`.
pub fn averaged_distribution_mc(
    stats: &AbelianStatistics,
    occupation: &OccupationDistribution,
    samples: usize,
    seed: u64,
    geometry: &WalkGeometry,
) -> Result<McAverage> {
    temporal_noise_walk(stats, occupation, &TemporalNoise::none(), samples, seed, geometry)
}

/// As [`averaged_distribution_mc`], with every site of the noise region
/// independently flipping sign with probability `p_minus1` after each step.
pub fn temporal_noise_walk(
    stats: &AbelianStatistics,
    occupation: &OccupationDistribution,
    noise: &TemporalNoise,
    samples: usize,
    seed: u64,
    geometry: &WalkGeometry,
) -> Result<McAverage> {
    noise.validate(geometry)?;
    let noisy = noise.p_minus1 > 0.0 && noise.region.0 <= noise.region.1;
    let mut out = run_blocks(samples, geometry, geometry.t, |i, acc| {
        let mut rng = substream(seed, i);
        let config = IslandConfig::random(geometry.n, occupation, &mut rng);
        let mut walker = AbelianWalker::new(&config, stats, geometry)?;
        let mut noise_rng = substream(seed, NOISE_STREAM + i);
        let mut variances = Vec::with_capacity(geometry.t);
        for _ in 0..geometry.t {
            walker.step();
            if noisy {
                for s in noise.region.0..=noise.region.1 {
                    if noise_rng.gen_bool(noise.p_minus1) {
                        walker.flip_sign(s);
                    }
                }
            }
            variances.push(walker.variance());
        }
        acc.add_sample(&walker.probabilities(), &variances);
        Ok(())
    })?;
    let engine = if noisy { "abelian-temporal-noise" } else { "abelian-mc" };
    out.distribution = out
        .distribution
        .with_meta("engine", engine)
        .with_meta("N", stats.n)
        .with_meta("sign", stats.sign)
        .with_meta("samples", samples)
        .with_meta("seed", seed);
    Ok(out)
}
