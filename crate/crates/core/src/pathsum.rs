//! Precomputed coin histories and a deterministic parallel sum over
//! admissible path pairs.

use std::ops::AddAssign;

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::walk::{adjacent_ones, final_position, CoinHistory, MAX_PAIR_ENUMERATION};

/// Forward histories per parallel work item.
const CHUNK: usize = 32;

/// One precomputed history.
#[derive(Clone, Copy, Debug)]
pub struct History<'a> {
    pub bits: u64,
    pub site: i64,
    /// Number of `1 -> 1` transitions.
    pub z: u32,
    /// Crossings per island of the window, indexed by `island - island_lo`.
    pub counts: &'a [u8],
    /// Window index of the island crossed at each step.
    pub islands: &'a [u8],
}

/// Histories sharing an endpoint and a last outcome.
#[derive(Clone, Debug)]
pub struct HistoryGroup {
    pub site: i64,
    pub last: u8,
    pub members: Vec<u32>,
}

/// All `2^t` histories from `s0` with their crossing data.
pub struct HistoryTable {
    t: usize,
    s0: i64,
    width: usize,
    bits: Vec<u64>,
    sites: Vec<i64>,
    z: Vec<u32>,
    counts: Vec<u8>,
    islands: Vec<u8>,
    groups: Vec<HistoryGroup>,
}

impl HistoryTable {
    pub fn build(t: usize, s0: i64, limit: usize) -> Result<Self> {
        let limit = limit.min(MAX_PAIR_ENUMERATION);
        if t > limit {
            return Err(Error::EnumerationLimit { requested: t, limit });
        }
        if t == 0 {
            return Err(Error::InvalidParameter("path sums need t >= 1".into()));
        }
        let width = 2 * t;
        let total = 1usize << t;
        let lo = s0 - t as i64;
        let mut table = Self {
            t,
            s0,
            width,
            bits: Vec::with_capacity(total),
            sites: Vec::with_capacity(total),
            z: Vec::with_capacity(total),
            counts: vec![0; total * width],
            islands: vec![0; total * t],
            groups: Vec::new(),
        };
        for bits in 0..total as u64 {
            let h = CoinHistory::from_packed(bits, t)?;
            let idx = bits as usize;
            let mut s = s0;
            for (k, bit) in h.iter().enumerate() {
                let island = if bit == 1 { s } else { s - 1 };
                let w = (island - lo) as usize;
                table.counts[idx * width + w] += 1;
                table.islands[idx * t + k] = w as u8;
                s += if bit == 1 { 1 } else { -1 };
            }
            table.bits.push(bits);
            table.sites.push(final_position(&h, s0));
            table.z.push(adjacent_ones(&h));
        }
        for site in (s0 - t as i64..=s0 + t as i64).step_by(2) {
            for last in 0..2u8 {
                let members: Vec<u32> = (0..total as u32)
                    .filter(|&h| table.sites[h as usize] == site && (table.bits[h as usize] >> (t - 1)) & 1 == last as u64)
                    .collect();
                if !members.is_empty() {
                    table.groups.push(HistoryGroup { site, last, members });
                }
            }
        }
        Ok(table)
    }

    pub fn t(&self) -> usize {
        self.t
    }

    pub fn s0(&self) -> i64 {
        self.s0
    }

    /// Leftmost island the walk can cross.
    pub fn island_lo(&self) -> i64 {
        self.s0 - self.t as i64
    }

    /// Number of islands in the reachable window.
    pub fn width(&self) -> usize {
        self.width
    }

    pub fn len(&self) -> usize {
        self.bits.len()
    }

    pub fn is_empty(&self) -> bool {
        self.bits.is_empty()
    }

    pub fn groups(&self) -> &[HistoryGroup] {
        &self.groups
    }

    pub fn history(&self, h: u32) -> History<'_> {
        let i = h as usize;
        History {
            bits: self.bits[i],
            site: self.sites[i],
            z: self.z[i],
            counts: &self.counts[i * self.width..(i + 1) * self.width],
            islands: &self.islands[i * self.t..(i + 1) * self.t],
        }
    }

    /// `sum_{(a, a')} f(a, a')` per endpoint over all admissible pairs.
    ///
    /// `init` builds per-worker scratch state. Every work item is summed
    /// sequentially and items are combined in a fixed order, so the result
    /// does not depend on the number of workers.
    pub fn pair_sum<T, S, I, F>(&self, init: I, f: F) -> Result<Vec<(i64, T)>>
    where
        T: Default + AddAssign + Send,
        I: Fn() -> S + Sync + Send,
        F: Fn(&mut S, &History<'_>, &History<'_>) -> Result<T> + Sync + Send,
    {
        self.pair_sum_filtered(|_| true, init, f)
    }

    /// As [`Self::pair_sum`], restricted to groups whose endpoint passes `keep`.
    pub fn pair_sum_filtered<T, S, K, I, F>(&self, keep: K, init: I, f: F) -> Result<Vec<(i64, T)>>
    where
        T: Default + AddAssign + Send,
        K: Fn(i64) -> bool,
        I: Fn() -> S + Sync + Send,
        F: Fn(&mut S, &History<'_>, &History<'_>) -> Result<T> + Sync + Send,
    {
        let items: Vec<(usize, usize, usize)> = self
            .groups
            .iter()
            .enumerate()
            .filter(|(_, g)| keep(g.site))
            .flat_map(|(gi, g)| (0..g.members.len()).step_by(CHUNK).map(move |lo| (gi, lo, (lo + CHUNK).min(g.members.len()))))
            .collect();
        let partial: Vec<Result<(usize, T)>> = items
            .par_iter()
            .map_init(&init, |state, &(gi, lo, hi)| {
                let group = &self.groups[gi];
                let mut acc = T::default();
                for &a in &group.members[lo..hi] {
                    let ha = self.history(a);
                    for &b in &group.members {
                        acc += f(state, &ha, &self.history(b))?;
                    }
                }
                Ok((gi, acc))
            })
            .collect();
        let mut out: Vec<(i64, T)> = Vec::new();
        for item in partial {
            let (gi, acc) = item?;
            let site = self.groups[gi].site;
            match out.last_mut() {
                Some((s, total)) if *s == site => *total += acc,
                _ => out.push((site, acc)),
            }
        }
        Ok(out)
    }
}

/// Exact tally of unit phases `e^{i pi k / N}`, `k` in `0..2N`.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct PhaseTally(pub Vec<i64>);

impl AddAssign for PhaseTally {
    fn add_assign(&mut self, rhs: Self) {
        if self.0.len() < rhs.0.len() {
            self.0.resize(rhs.0.len(), 0);
        }
        for (a, b) in self.0.iter_mut().zip(rhs.0) {
            *a += b;
        }
    }
}
