//! Coin histories, walker trajectories and the linking bookkeeping shared by
//! every engine.
//!
//! Sites and islands are both labelled `1..=n`. Site `s` sits between island
//! `s - 1` and island `s`, so a right move from `s` crosses island `s` and a
//! left move from `s` crosses island `s - 1`.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::distribution::OccupationDistribution;
use crate::error::{Error, Result};
use crate::topo::braid::{BraidWord, Crossing};

/// Largest history the packed representation can hold.
pub const MAX_HISTORY_LEN: usize = 64;

/// Largest `t` for which [`enumerate_path_pairs`] will materialise histories.
pub const MAX_PAIR_ENUMERATION: usize = 24;

/// A sequence of coin outcomes, `0` for a left move and `1` for a right move.
///
/// Bit `k` of the packed word holds outcome `a_{k+1}`.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Debug)]
pub struct CoinHistory {
    bits: u64,
    len: u8,
}

impl CoinHistory {
    pub fn new(outcomes: &[u8]) -> Result<Self> {
        if outcomes.len() > MAX_HISTORY_LEN {
            return Err(Error::HistoryTooLong(outcomes.len()));
        }
        let mut bits = 0u64;
        for (k, &a) in outcomes.iter().enumerate() {
            match a {
                0 => {}
                1 => bits |= 1 << k,
                other => {
                    return Err(Error::InvalidParameter(format!(
                        "coin outcome {other} at step {} is not 0 or 1",
                        k + 1
                    )))
                }
            }
        }
        Ok(Self { bits, len: outcomes.len() as u8 })
    }

    /// Builds a history from its packed form; bits above `len` are discarded.
    pub fn from_packed(bits: u64, len: usize) -> Result<Self> {
        if len > MAX_HISTORY_LEN {
            return Err(Error::HistoryTooLong(len));
        }
        let mask = if len == 64 { u64::MAX } else { (1u64 << len) - 1 };
        Ok(Self { bits: bits & mask, len: len as u8 })
    }

    pub fn packed(&self) -> u64 {
        self.bits
    }

    pub fn len(&self) -> usize {
        self.len as usize
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    /// Outcome of step `k` (zero-based).
    pub fn get(&self, k: usize) -> u8 {
        debug_assert!(k < self.len());
        ((self.bits >> k) & 1) as u8
    }

    pub fn last(&self) -> Option<u8> {
        (!self.is_empty()).then(|| self.get(self.len() - 1))
    }

    pub fn iter(&self) -> impl Iterator<Item = u8> + '_ {
        (0..self.len()).map(move |k| self.get(k))
    }

    pub fn ones(&self) -> usize {
        self.bits.count_ones() as usize
    }

    /// The first `k` outcomes.
    pub fn truncated(&self, k: usize) -> Self {
        let k = k.min(self.len());
        Self::from_packed(self.bits, k).expect("k is within the packing limit")
    }
}

impl std::fmt::Display for CoinHistory {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "(")?;
        for (k, a) in self.iter().enumerate() {
            if k > 0 {
                write!(f, ",")?;
            }
            write!(f, "{a}")?;
        }
        write!(f, ")")
    }
}

/// A forward history `a` paired with a backward history `a'`.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug)]
pub struct PathPair {
    pub forward: CoinHistory,
    pub backward: CoinHistory,
}

impl PathPair {
    pub fn new(forward: CoinHistory, backward: CoinHistory) -> Result<Self> {
        if forward.len() != backward.len() {
            return Err(Error::LengthMismatch { left: forward.len(), right: backward.len() });
        }
        Ok(Self { forward, backward })
    }

    pub fn steps(&self) -> usize {
        self.forward.len()
    }

    pub fn swapped(&self) -> Self {
        Self { forward: self.backward, backward: self.forward }
    }

    /// Whether the pair contributes to a diagonal element: equal last coin
    /// outcome and equal endpoints.
    pub fn is_admissible(&self, s0: i64) -> bool {
        self.forward.last() == self.backward.last()
            && final_position(&self.forward, s0) == final_position(&self.backward, s0)
    }
}

/// Static anyon occupations `m_s`, one per island.
#[derive(Clone, PartialEq, Eq, Debug, Serialize, Deserialize)]
pub struct IslandConfig {
    occupations: Vec<u32>,
}

impl IslandConfig {
    pub fn new(occupations: Vec<u32>) -> Result<Self> {
        if occupations.is_empty() {
            return Err(Error::Geometry("island configuration needs at least one island".into()));
        }
        Ok(Self { occupations })
    }

    pub fn empty(n: usize) -> Self {
        Self { occupations: vec![0; n.max(1)] }
    }

    pub fn uniform(n: usize, m: u32) -> Self {
        Self { occupations: vec![m; n.max(1)] }
    }

    /// All islands empty except the listed `(island, m)` entries.
    pub fn sparse(n: usize, entries: &[(i64, u32)]) -> Self {
        let mut config = Self::empty(n);
        for &(island, m) in entries {
            let idx = config.index(island);
            config.occupations[idx] = m;
        }
        config
    }

    /// Draws every island independently from `occupation`.
    pub fn random<R: Rng + ?Sized>(n: usize, occupation: &OccupationDistribution, rng: &mut R) -> Self {
        Self { occupations: (0..n.max(1)).map(|_| occupation.sample(rng)).collect() }
    }

    pub fn len(&self) -> usize {
        self.occupations.len()
    }

    pub fn is_empty(&self) -> bool {
        self.occupations.is_empty()
    }

    fn index(&self, island: i64) -> usize {
        (island - 1).rem_euclid(self.occupations.len() as i64) as usize
    }

    /// Occupation of island `island`, labels taken modulo `n` (periodic lattice).
    pub fn get(&self, island: i64) -> u32 {
        self.occupations[self.index(island)]
    }

    pub fn set(&mut self, island: i64, m: u32) {
        let idx = self.index(island);
        self.occupations[idx] = m;
    }

    pub fn total(&self) -> u64 {
        self.occupations.iter().map(|&m| m as u64).sum()
    }

    pub fn as_slice(&self) -> &[u32] {
        &self.occupations
    }
}

/// Lattice size, start site and step count of one walk.
#[derive(Clone, Copy, PartialEq, Eq, Debug, Serialize, Deserialize)]
pub struct WalkGeometry {
    pub n: usize,
    pub s0: i64,
    pub t: usize,
}

impl WalkGeometry {
    /// Standard geometry with `s0 = ceil(n/2)`; requires `n >= 2t + 1` so the
    /// walker never wraps around the periodic lattice.
    pub fn new(n: usize, t: usize) -> Result<Self> {
        Self::with_s0(n, t, n.div_ceil(2) as i64)
    }

    pub fn with_s0(n: usize, t: usize, s0: i64) -> Result<Self> {
        if n < 2 {
            return Err(Error::Geometry(format!("lattice size {n} < 2")));
        }
        if n < 2 * t + 1 {
            return Err(Error::Geometry(format!("n = {n} < 2t + 1 = {} (walk would wrap)", 2 * t + 1)));
        }
        if s0 < 1 || s0 > n as i64 {
            return Err(Error::Geometry(format!("start site {s0} outside 1..={n}")));
        }
        if s0 - (t as i64) < 1 || s0 + t as i64 > n as i64 {
            return Err(Error::Geometry(format!(
                "light cone [{}, {}] leaves 1..={n}",
                s0 - t as i64,
                s0 + t as i64
            )));
        }
        Ok(Self { n, s0, t })
    }

    /// Smallest admissible lattice for `t` steps.
    pub fn minimal(t: usize) -> Self {
        Self::new(2 * t + 1, t).expect("2t + 1 always admits t steps")
    }

    /// Same lattice and start, different step count.
    pub fn with_steps(&self, t: usize) -> Result<Self> {
        Self::with_s0(self.n, t, self.s0)
    }

    /// Zero-based storage index of site `s`.
    pub fn site_index(&self, s: i64) -> usize {
        (s - 1).rem_euclid(self.n as i64) as usize
    }

    pub fn sites(&self) -> impl Iterator<Item = i64> {
        1..=self.n as i64
    }
}

/// `s0 + sum(2 a_k - 1)`.
pub fn final_position(a: &CoinHistory, s0: i64) -> i64 {
    s0 + 2 * a.ones() as i64 - a.len() as i64
}

/// `z = sum_{k=1}^{t-1} (a_k a_{k+1} + a'_k a'_{k+1})`; the coin trace weight is `(-1)^z / 2^t`.
pub fn coin_sign_exponent(a: &CoinHistory, b: &CoinHistory) -> Result<u32> {
    if a.len() != b.len() {
        return Err(Error::LengthMismatch { left: a.len(), right: b.len() });
    }
    Ok(adjacent_ones(a) + adjacent_ones(b))
}

/// Number of `1 -> 1` transitions in one history.
pub(crate) fn adjacent_ones(a: &CoinHistory) -> u32 {
    if a.len() < 2 {
        return 0;
    }
    (a.bits & (a.bits >> 1)).count_ones()
}

/// Island crossed at each step, in time order.
pub fn crossed_islands(a: &CoinHistory, s0: i64) -> impl Iterator<Item = i64> + '_ {
    let mut s = s0;
    a.iter().map(move |bit| {
        if bit == 1 {
            s += 1;
            s - 1
        } else {
            s -= 1;
            s
        }
    })
}

/// Per-island crossing counts `c_a(s)`, indexed by `island - 1`.
pub fn traversal_counts(a: &CoinHistory, geometry: &WalkGeometry) -> Vec<u32> {
    let mut counts = vec![0u32; geometry.n];
    for island in crossed_islands(a, geometry.s0) {
        counts[geometry.site_index(island)] += 1;
    }
    counts
}

/// Per-island winding numbers of a path pair together with the raw crossing counts.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct LinkingProfile {
    links: Vec<i64>,
    forward_counts: Vec<u32>,
    backward_counts: Vec<u32>,
}

impl LinkingProfile {
    /// Winding number of island `island`.
    pub fn link(&self, island: i64) -> i64 {
        self.links[(island - 1).rem_euclid(self.links.len() as i64) as usize]
    }

    /// Winding numbers indexed by `island - 1`.
    pub fn links(&self) -> &[i64] {
        &self.links
    }

    pub fn forward_counts(&self) -> &[u32] {
        &self.forward_counts
    }

    pub fn backward_counts(&self) -> &[u32] {
        &self.backward_counts
    }

    pub fn len(&self) -> usize {
        self.links.len()
    }

    pub fn is_empty(&self) -> bool {
        self.links.is_empty()
    }

    pub fn is_zero(&self) -> bool {
        self.links.iter().all(|&l| l == 0)
    }

    /// Islands with non-zero winding, as `(island, l)`.
    pub fn nonzero(&self) -> impl Iterator<Item = (i64, i64)> + '_ {
        self.links.iter().enumerate().filter(|(_, &l)| l != 0).map(|(i, &l)| (i as i64 + 1, l))
    }
}

/// `l_s = (c_a(s) - c_a'(s)) / 2`; fails if some difference is odd, which
/// only happens when the endpoints differ.
pub fn linking_profile(pair: &PathPair, geometry: &WalkGeometry) -> Result<LinkingProfile> {
    let forward_counts = traversal_counts(&pair.forward, geometry);
    let backward_counts = traversal_counts(&pair.backward, geometry);
    let mut links = Vec::with_capacity(geometry.n);
    for (island, (&f, &b)) in forward_counts.iter().zip(&backward_counts).enumerate() {
        let diff = f as i64 - b as i64;
        if diff % 2 != 0 {
            return Err(Error::InadmissiblePair(format!(
                "odd crossing difference {diff} at island {}",
                island + 1
            )));
        }
        links.push(diff / 2);
    }
    Ok(LinkingProfile { links, forward_counts, backward_counts })
}

/// All histories of length `t` ending at `target`, split by last outcome.
fn histories_to(t: usize, target: i64, s0: i64) -> [Vec<CoinHistory>; 2] {
    let mut groups = [Vec::new(), Vec::new()];
    let disp = target - s0;
    if t == 0 || disp.unsigned_abs() as usize > t || (disp + t as i64).rem_euclid(2) != 0 {
        return groups;
    }
    let ones = ((disp + t as i64) / 2) as u32;
    for bits in 0..(1u64 << t) {
        if bits.count_ones() == ones {
            let h = CoinHistory::from_packed(bits, t).expect("t is guarded");
            groups[((bits >> (t - 1)) & 1) as usize].push(h);
        }
    }
    groups
}

/// Every admissible pair `(a, a')` of `t`-step histories with `a_t = a'_t`
/// and both ending at `target`, each exactly once.
pub fn enumerate_path_pairs(t: usize, target: i64, s0: i64) -> Result<impl Iterator<Item = PathPair>> {
    if t > MAX_PAIR_ENUMERATION {
        return Err(Error::EnumerationLimit { requested: t, limit: MAX_PAIR_ENUMERATION });
    }
    let groups = histories_to(t, target, s0);
    Ok(groups.into_iter().flat_map(|group| {
        let backward = group.clone();
        group.into_iter().flat_map(move |a| {
            backward.clone().into_iter().map(move |b| PathPair { forward: a, backward: b })
        })
    }))
}

/// Expected number of admissible pairs ending at `target`.
pub fn admissible_pair_count(t: usize, target: i64, s0: i64) -> u64 {
    let disp = target - s0;
    if t == 0 || disp.unsigned_abs() as usize > t || (disp + t as i64).rem_euclid(2) != 0 {
        return 0;
    }
    let ones = ((disp + t as i64) / 2) as u64;
    let tm1 = t as u64 - 1;
    // last bit 1: choose ones-1 of the first t-1; last bit 0: choose ones of the first t-1
    let with_one = if ones >= 1 { binomial(tm1, ones - 1) } else { 0 };
    let with_zero = binomial(tm1, ones);
    with_one * with_one + with_zero * with_zero
}

pub(crate) fn binomial(n: u64, k: u64) -> u64 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    (0..k).fold(1u64, |acc, i| acc * (n - i) / (i + 1))
}

/// Number of anyons strictly left of site `s` (islands `1..s-1`).
fn strands_left_of(config: &IslandConfig, s: i64) -> usize {
    (1..s).map(|island| config.get(island) as usize).sum()
}

/// Braid word `B_a` of the forward evolution, crossings in time order.
///
/// A right move from `s` appends `b_{s,1}` up to `b_{s,m_s}`; a left move
/// from `s` appends `b_{s-1,m}` down to `b_{s-1,1}`. Every generator is a
/// positive elementary crossing between the walker and one static anyon.
pub fn braid_word(a: &CoinHistory, config: &IslandConfig, geometry: &WalkGeometry) -> BraidWord {
    let strands = 1 + config.total() as usize;
    let mut walker = strands_left_of(config, geometry.s0);
    let mut crossings = Vec::new();
    let mut s = geometry.s0;
    for bit in a.iter() {
        if bit == 1 {
            let m = config.get(s) as usize;
            for _ in 0..m {
                crossings.push(Crossing { k: walker + 1, sign: 1 });
                walker += 1;
            }
            s += 1;
        } else {
            let m = config.get(s - 1) as usize;
            for _ in 0..m {
                crossings.push(Crossing { k: walker, sign: 1 });
                walker -= 1;
            }
            s -= 1;
        }
    }
    BraidWord::new(strands, crossings).expect("walk generators stay within the strand range")
}

/// The word `B_{a'}^dagger B_a` whose Markov closure is the pair's link.
pub fn pair_word(pair: &PathPair, config: &IslandConfig, geometry: &WalkGeometry) -> BraidWord {
    let forward = braid_word(&pair.forward, config, geometry);
    let backward = braid_word(&pair.backward, config, geometry);
    forward.then(&backward.inverse())
}
