//! Ising anyonic walk: closed-form fusion traces, their disorder average and
//! the triple-invariant correlator.

use std::collections::BTreeSet;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::abelian::{run_blocks, McAverage};
use crate::distribution::{OccupationDistribution, SpatialDistribution};
use crate::error::{Error, Result};
use crate::gf2::{CharacterSum, QuadraticForm, MAX_BRUTE_FORCE_VARIABLES, MAX_FORM_VARIABLES};
use crate::pathsum::{History, HistoryTable};
use crate::seed::substream;
use crate::stats::{raw_variance, VariancePoint};
use crate::topo::bracket::BracketConvention;
use crate::topo::invariants::{check_dims, minus_i_pow, tau_parity};
use crate::topo::triple::{is_pure3, TripleCache};
use crate::walk::{linking_profile, IslandConfig, LinkingProfile, PathPair, WalkGeometry};

/// Default enumeration limit for Ising path sums.
pub const ISING_STEP_LIMIT: usize = 12;
/// Limit when a longer runtime is acceptable.
pub const ISING_EXTENDED_STEP_LIMIT: usize = 14;
/// Fixed-point scale of the exact averaged sums.
const SCALE_BITS: i32 = 48;

/// Triple-invariant parities `tau(s', s'')` for `s' < s''`, islands one-based.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct TauMatrix {
    n: usize,
    ones: BTreeSet<(i64, i64)>,
}

impl TauMatrix {
    pub fn new(n: usize) -> Self {
        Self { n, ones: BTreeSet::new() }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn set(&mut self, s1: i64, s2: i64, value: u8) -> Result<()> {
        let (a, b) = (s1.min(s2), s1.max(s2));
        if a == b || a < 1 || b > self.n as i64 {
            return Err(Error::InvalidParameter(format!("tau entry ({s1}, {s2}) outside 1..={} or diagonal", self.n)));
        }
        if value & 1 == 1 {
            self.ones.insert((a, b));
        } else {
            self.ones.remove(&(a, b));
        }
        Ok(())
    }

    pub fn get(&self, s1: i64, s2: i64) -> u8 {
        self.ones.contains(&(s1.min(s2), s1.max(s2))) as u8
    }

    pub fn ones(&self) -> impl Iterator<Item = (i64, i64)> + '_ {
        self.ones.iter().copied()
    }

    pub fn is_zero(&self) -> bool {
        self.ones.is_empty()
    }

    /// Islands appearing in at least one nonzero entry, ascending.
    pub fn active_islands(&self) -> Vec<i64> {
        let set: BTreeSet<i64> = self.ones.iter().flat_map(|&(a, b)| [a, b]).collect();
        set.into_iter().collect()
    }

    /// `sum_{s'<s''} m_s' m_s'' tau x_s' x_s''` over the active islands.
    fn form(&self) -> Result<(QuadraticForm, usize)> {
        let active = self.active_islands();
        if active.len() > MAX_FORM_VARIABLES {
            return Err(Error::IslandLimit { islands: active.len(), limit: MAX_FORM_VARIABLES });
        }
        let mut q = QuadraticForm::new(active.len())?;
        for &(a, b) in &self.ones {
            let i = active.binary_search(&a).expect("active island");
            let j = active.binary_search(&b).expect("active island");
            q.toggle(i, j);
        }
        Ok((q, active.len()))
    }

    /// Oracle route: every entry from the bracket of its three-component sublink.
    pub fn from_pair_oracle(pair: &PathPair, geometry: &WalkGeometry, conv: &BracketConvention) -> Result<Self> {
        let profile = linking_profile(pair, geometry)?;
        let crossed = crossed_islands(&profile);
        let mut tau = Self::new(geometry.n);
        for (i, &s1) in crossed.iter().enumerate() {
            for &s2 in &crossed[i + 1..] {
                if tau_parity(pair, s1, s2, geometry, conv)? == 1 {
                    tau.set(s1, s2, 1)?;
                }
            }
        }
        Ok(tau)
    }

    /// Fast route through memoised three-strand words.
    pub fn from_pair(pair: &PathPair, geometry: &WalkGeometry, cache: &mut TripleCache) -> Result<Self> {
        let profile = linking_profile(pair, geometry)?;
        let crossed = crossed_islands(&profile);
        let fwd: Vec<i64> = crate::walk::crossed_islands(&pair.forward, geometry.s0).collect();
        let bwd: Vec<i64> = crate::walk::crossed_islands(&pair.backward, geometry.s0).collect();
        let mut tau = Self::new(geometry.n);
        let mut buf = Vec::new();
        for (i, &s1) in crossed.iter().enumerate() {
            for &s2 in &crossed[i + 1..] {
                triple_word(&fwd, &bwd, s1, s2, &mut buf);
                if is_pure3(&buf) && cache.tau(&buf)? == 1 {
                    tau.set(s1, s2, 1)?;
                }
            }
        }
        Ok(tau)
    }
}

fn crossed_islands(profile: &LinkingProfile) -> Vec<i64> {
    (0..profile.len())
        .filter(|&i| profile.forward_counts()[i] + profile.backward_counts()[i] > 0)
        .map(|i| i as i64 + 1)
        .collect()
}

/// Signed three-strand word: forward crossings, then backward ones reversed
/// and inverted.
fn triple_word<T: PartialEq + Copy>(fwd: &[T], bwd: &[T], s1: T, s2: T, buf: &mut Vec<i8>) {
    buf.clear();
    for &x in fwd {
        if x == s1 {
            buf.push(1);
        } else if x == s2 {
            buf.push(2);
        }
    }
    for &x in bwd.iter().rev() {
        if x == s1 {
            buf.push(-1);
        } else if x == s2 {
            buf.push(-2);
        }
    }
}

/// Pairs `(i, j)`, `i < j`, of `islands` (window indices) with odd `tau` for
/// the pair's first `prefix` steps. Sub-braids that are not pure give 0.
fn window_tau_ones(
    a: &History<'_>,
    b: &History<'_>,
    islands: &[u8],
    prefix: usize,
    cache: &mut TripleCache,
    buf: &mut Vec<i8>,
    ones: &mut Vec<(usize, usize)>,
) -> Result<()> {
    ones.clear();
    for i in 0..islands.len() {
        for j in i + 1..islands.len() {
            triple_word(&a.islands[..prefix], &b.islands[..prefix], islands[i], islands[j], buf);
            if buf.is_empty() || !is_pure3(buf) {
                continue;
            }
            if cache.tau(buf)? == 1 {
                ones.push((i, j));
            }
        }
    }
    Ok(())
}

/// The fusion trace with its factors kept apart.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct IsingTrace {
    pub value: Complex64,
    /// Some occupied island has an odd winding number.
    pub vanishing: bool,
    /// Exponent of `-i`, mod 4.
    pub quarter_turns: u8,
    /// `prod (-1)^{m' m'' tau}`.
    pub tau_sign: i8,
}

/// `prod_{m_s>0} l~_s (-i)^{(l_s/2) m_s} prod_{s'<s''} (-1)^{m_s' m_s'' tau(s', s'')}`.
pub fn ising_trace_formula(profile: &LinkingProfile, config: &IslandConfig, tau: &TauMatrix) -> Result<IsingTrace> {
    check_dims(profile, config)?;
    for (a, b) in tau.ones() {
        if profile.link(a) % 2 != 0 || profile.link(b) % 2 != 0 {
            return Err(Error::InconsistentTau(a as usize, b as usize));
        }
    }
    let tau_parity: i64 = tau.ones().map(|(a, b)| (config.get(a) as i64 * config.get(b) as i64) & 1).sum();
    let tau_sign = if tau_parity % 2 == 0 { 1 } else { -1 };
    let mut quarter: i64 = 0;
    let mut vanishing = false;
    for (&l, &m) in profile.links().iter().zip(config.as_slice()) {
        if m == 0 {
            continue;
        }
        if l % 2 != 0 {
            vanishing = true;
            continue;
        }
        quarter += (l / 2) * m as i64;
    }
    let quarter_turns = quarter.rem_euclid(4) as u8;
    let value = if vanishing { Complex64::new(0.0, 0.0) } else { minus_i_pow(quarter) * tau_sign as f64 };
    Ok(IsingTrace { value, vanishing, quarter_turns, tau_sign })
}

/// `T = 2^{-n} sum_{m in {0,1}^n} prod (-1)^{m m tau}` by elimination over GF(2).
pub fn t_coefficient(tau: &TauMatrix) -> Result<f64> {
    let (q, n) = tau.form()?;
    Ok(q.character_sum().normalised(n))
}

/// Same as [`t_coefficient`] by direct enumeration of the active islands.
pub fn t_coefficient_brute(tau: &TauMatrix) -> Result<f64> {
    let (q, n) = tau.form()?;
    if n > MAX_BRUTE_FORCE_VARIABLES {
        return Err(Error::IslandLimit { islands: n, limit: MAX_BRUTE_FORCE_VARIABLES });
    }
    Ok(q.character_sum_brute()? as f64 / 2f64.powi(n as i32))
}

/// `<<tr Y>> = T prod_s delta(l_s mod 8)`.
pub fn averaged_ising_trace(pair: &PathPair, geometry: &WalkGeometry, cache: &mut TripleCache) -> Result<f64> {
    if !pair.is_admissible(geometry.s0) {
        return Err(Error::InadmissiblePair("endpoints or last outcomes differ".into()));
    }
    let profile = linking_profile(pair, geometry)?;
    if profile.links().iter().any(|l| l % 8 != 0) {
        return Ok(0.0);
    }
    t_coefficient(&TauMatrix::from_pair(pair, geometry, cache)?)
}

/// Per-worker scratch for the Ising path sums.
struct Scratch {
    cache: TripleCache,
    buf: Vec<i8>,
    islands: Vec<u8>,
    ones: Vec<(usize, usize)>,
}

impl Scratch {
    fn new(conv: BracketConvention) -> Self {
        Self { cache: TripleCache::new(conv), buf: Vec::new(), islands: Vec::new(), ones: Vec::new() }
    }
}

/// Disorder-averaged `p(s, t)` weighted by the averaged fusion trace.
/// Accumulation is exact: every weight is a dyadic rational.
pub fn ising_averaged_distribution(
    geometry: &WalkGeometry,
    limit: usize,
    conv: &BracketConvention,
) -> Result<SpatialDistribution> {
    let table = HistoryTable::build(geometry.t, geometry.s0, limit.min(ISING_EXTENDED_STEP_LIMIT))?;
    let conv = *conv;
    let sums = table.pair_sum(
        || Scratch::new(conv),
        |st, a, b| {
            st.islands.clear();
            for (w, (&ca, &cb)) in a.counts.iter().zip(b.counts).enumerate() {
                if (ca as i64 - cb as i64) % 16 != 0 {
                    return Ok(0i128);
                }
                if ca + cb > 0 {
                    st.islands.push(w as u8);
                }
            }
            window_tau_ones(a, b, &st.islands, a.islands.len(), &mut st.cache, &mut st.buf, &mut st.ones)?;
            let mut q = QuadraticForm::new(st.islands.len())?;
            for &(i, j) in &st.ones {
                q.toggle(i, j);
            }
            let weight = match q.character_sum() {
                CharacterSum::Zero => 0i128,
                CharacterSum::Signed { negative, exponent } => {
                    let shift = SCALE_BITS + exponent as i32 - st.islands.len() as i32;
                    let v = 1i128 << shift;
                    if negative {
                        -v
                    } else {
                        v
                    }
                }
            };
            Ok(if (a.z + b.z) % 2 == 0 { weight } else { -weight })
        },
    )?;
    let scale = 2f64.powi(-(SCALE_BITS + geometry.t as i32));
    let mut p = vec![0.0; geometry.n];
    for (site, s) in sums {
        p[geometry.site_index(site)] = s as f64 * scale;
    }
    Ok(SpatialDistribution::new(geometry, p).with_meta("engine", "ising-exact-average").with_meta("bracket", conv.label()))
}

/// `sigma^2(t)` of the averaged Ising walk for `t = 1..=t_max` on a fixed lattice.
pub fn ising_variance_series(
    geometry: &WalkGeometry,
    t_max: usize,
    limit: usize,
    conv: &BracketConvention,
) -> Result<Vec<VariancePoint>> {
    (1..=t_max)
        .map(|t| {
            let g = geometry.with_steps(t)?;
            let d = ising_averaged_distribution(&g, limit, conv)?;
            Ok(VariancePoint { t, mean: raw_variance(&d.probabilities, d.s0), stderr: 0.0 })
        })
        .collect()
}

/// `p(s, t)` for one configuration using the closed-form trace. Phases are
/// tallied exactly; any imaginary remainder is reported.
pub fn ising_fixed_distribution(
    config: &IslandConfig,
    geometry: &WalkGeometry,
    limit: usize,
    conv: &BracketConvention,
) -> Result<SpatialDistribution> {
    if config.len() != geometry.n {
        return Err(Error::Dimension(format!("configuration has {} islands, lattice {}", config.len(), geometry.n)));
    }
    let table = HistoryTable::build(geometry.t, geometry.s0, limit.min(ISING_EXTENDED_STEP_LIMIT))?;
    let m: Vec<u32> = (0..table.width()).map(|w| config.get(table.island_lo() + w as i64)).collect();
    let conv = *conv;
    let sums = table.pair_sum(
        || Scratch::new(conv),
        |st, a, b| {
            let mut quarter: i64 = 0;
            st.islands.clear();
            for (w, (&ca, &cb)) in a.counts.iter().zip(b.counts).enumerate() {
                if m[w] == 0 {
                    continue;
                }
                let diff = ca as i64 - cb as i64;
                if diff % 4 != 0 {
                    return Ok(Quarters::default());
                }
                quarter += diff / 4 * m[w] as i64;
                if m[w] % 2 == 1 && ca + cb > 0 {
                    st.islands.push(w as u8);
                }
            }
            window_tau_ones(a, b, &st.islands, a.islands.len(), &mut st.cache, &mut st.buf, &mut st.ones)?;
            let mut q = quarter + 2 * st.ones.len() as i64;
            if (a.z + b.z) % 2 == 1 {
                q += 2;
            }
            let mut out = Quarters::default();
            out.0[q.rem_euclid(4) as usize] = 1;
            Ok(out)
        },
    )?;
    let scale = 0.5f64.powi(geometry.t as i32);
    let mut p = vec![0.0; geometry.n];
    for (site, tally) in sums {
        // (-i)^k for k = 0..4 is 1, -i, -1, i
        let im = tally.0[3] - tally.0[1];
        if im != 0 {
            return Err(Error::ImaginaryResidue { site, residue: im as f64 * scale, tolerance: 0.0 });
        }
        p[geometry.site_index(site)] = (tally.0[0] - tally.0[2]) as f64 * scale;
    }
    Ok(SpatialDistribution::new(geometry, p).with_meta("engine", "ising-fixed").with_meta("bracket", conv.label()))
}

/// Counts of `(-i)^k`, `k` in `0..4`.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
struct Quarters([i64; 4]);

impl std::ops::AddAssign for Quarters {
    fn add_assign(&mut self, rhs: Self) {
        for k in 0..4 {
            self.0[k] += rhs.0[k];
        }
    }
}

/// Fixed-configuration mode averaged over sampled configurations; the
/// variance carries the spread across configurations.
pub fn ising_fixed_mc(
    occupation: &OccupationDistribution,
    samples: usize,
    seed: u64,
    geometry: &WalkGeometry,
    limit: usize,
    conv: &BracketConvention,
) -> Result<McAverage> {
    let mut out = run_blocks(samples, geometry, 1, |i, acc| {
        let config = IslandConfig::random(geometry.n, occupation, &mut substream(seed, i));
        let d = ising_fixed_distribution(&config, geometry, limit, conv)?;
        let v = raw_variance(&d.probabilities, d.s0);
        acc.add_sample(&d.probabilities, &[v]);
        Ok(())
    })?;
    for p in &mut out.variance {
        p.t = geometry.t;
    }
    out.distribution = out
        .distribution
        .with_meta("engine", "ising-fixed-mc")
        .with_meta("samples", samples)
        .with_meta("seed", seed);
    Ok(out)
}

/// `C(t, t')` for `t' = 0..=t` over admissible pairs ending at `s0`, every island singly occupied.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CorrelatorSeries {
    pub t: usize,
    pub pairs: u64,
    /// Mean of `(-1)^{tau_t}` over the pairs.
    pub mean_sign: f64,
    /// `(t', C)`; `None` where the normalisation is degenerate.
    pub values: Vec<(usize, Option<f64>)>,
}

pub fn correlator_series(t: usize, limit: usize, conv: &BracketConvention) -> Result<CorrelatorSeries> {
    if !t.is_multiple_of(2) {
        return Err(Error::InvalidParameter(format!("pairs return to the start only for even t, got {t}")));
    }
    let geometry = WalkGeometry::minimal(t);
    let table = HistoryTable::build(t, geometry.s0, limit.min(ISING_EXTENDED_STEP_LIMIT))?;
    let conv = *conv;
    // per pair: x_t, and x_{t-t'} for every t'
    let sums = table.pair_sum_filtered(
        |site| site == geometry.s0,
        || Scratch::new(conv),
        |st, a, b| {
            let mut signs = Vec::with_capacity(t + 1);
            for prefix in (0..=t).rev() {
                st.islands.clear();
                let mut seen = [false; 64];
                for &w in a.islands[..prefix].iter().chain(&b.islands[..prefix]) {
                    seen[w as usize] = true;
                }
                st.islands.extend((0..table.width() as u8).filter(|&w| seen[w as usize]));
                window_tau_ones(a, b, &st.islands, prefix, &mut st.cache, &mut st.buf, &mut st.ones)?;
                signs.push(if st.ones.len() % 2 == 0 { 1i64 } else { -1 });
            }
            // signs[t'] = x_{t-t'}
            let x_t = signs[0];
            let mut acc = CorrelatorSums { count: 1, s1: x_t, s2: vec![0; t + 1], s12: vec![0; t + 1] };
            for (tp, &x) in signs.iter().enumerate() {
                acc.s2[tp] = x;
                acc.s12[tp] = x_t * x;
            }
            Ok(acc)
        },
    )?;
    let total = sums.into_iter().map(|(_, s)| s).fold(CorrelatorSums::default(), |mut acc, s| {
        acc += s;
        acc
    });
    let n = total.count as i128;
    let s1 = total.s1 as i128;
    let denom = n * n - s1 * s1;
    let values = (0..=t)
        .map(|tp| {
            let num = n * total.s12[tp] as i128 - s1 * total.s2[tp] as i128;
            let c = (denom as f64 / (n * n) as f64 >= 1e-12).then(|| num as f64 / denom as f64);
            (tp, c)
        })
        .collect();
    Ok(CorrelatorSeries { t, pairs: total.count, mean_sign: total.s1 as f64 / total.count as f64, values })
}

/// Single correlator value; a degenerate normalisation is an error.
pub fn correlator(t: usize, t_prime: usize, limit: usize, conv: &BracketConvention) -> Result<f64> {
    if t_prime > t {
        return Err(Error::InvalidParameter(format!("t' = {t_prime} exceeds t = {t}")));
    }
    let series = correlator_series(t, limit, conv)?;
    series.values[t_prime].1.ok_or(Error::DegenerateNormalization(1.0 - series.mean_sign * series.mean_sign))
}

#[derive(Clone, Debug, Default)]
struct CorrelatorSums {
    count: u64,
    s1: i64,
    s2: Vec<i64>,
    s12: Vec<i64>,
}

impl std::ops::AddAssign for CorrelatorSums {
    fn add_assign(&mut self, rhs: Self) {
        if self.s2.len() < rhs.s2.len() {
            self.s2.resize(rhs.s2.len(), 0);
            self.s12.resize(rhs.s12.len(), 0);
        }
        self.count += rhs.count;
        self.s1 += rhs.s1;
        for k in 0..rhs.s2.len() {
            self.s2[k] += rhs.s2[k];
            self.s12[k] += rhs.s12[k];
        }
    }
}
