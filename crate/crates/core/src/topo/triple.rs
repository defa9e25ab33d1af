//! Fast triple-invariant parity for the three-strand sublink (walker plus one
//! anyon from each of two islands).
//!
//! Crossings with the left island are always `sigma_1` and crossings with the
//! right island `sigma_2`, whatever side the walker starts on, so the sublink
//! is fixed by a signed sequence over `{1, 2}`. Results are memoised on the
//! reduced sequence.

use std::collections::HashMap;

use super::bracket::BracketConvention;
use super::braid::{BraidWord, Crossing};
use super::invariants::{normalised_bracket, tau_from_trace};
use crate::error::Result;

/// Freely and cyclically reduces a signed generator sequence in place.
/// Both moves preserve the closure.
pub(crate) fn reduce_cyclic(word: &mut Vec<i8>) {
    let mut out: Vec<i8> = Vec::with_capacity(word.len());
    for &g in word.iter() {
        if out.last() == Some(&-g) {
            out.pop();
        } else {
            out.push(g);
        }
    }
    let (mut lo, mut hi) = (0, out.len());
    while hi - lo >= 2 && out[lo] == -out[hi - 1] {
        lo += 1;
        hi -= 1;
    }
    word.clear();
    word.extend_from_slice(&out[lo..hi]);
}

/// Final positions of the three strands; the sublink is pure iff this is the identity.
pub(crate) fn is_pure3(word: &[i8]) -> bool {
    let mut at = [0u8, 1, 2];
    for &g in word {
        let k = g.unsigned_abs() as usize;
        at.swap(k - 1, k);
    }
    at == [0, 1, 2]
}

/// Signed crossing counts with the left and right anyon; each is twice the
/// corresponding winding number on a pure walk word.
pub(crate) fn crossing_balance(word: &[i8]) -> (i64, i64) {
    let (mut a, mut b) = (0i64, 0i64);
    for &g in word {
        match g {
            1 => a += 1,
            -1 => a -= 1,
            2 => b += 1,
            _ => b -= 1,
        }
    }
    (a, b)
}

/// Per-worker memo table. Hits and misses give identical values.
pub struct TripleCache {
    conv: BracketConvention,
    map: HashMap<Vec<i8>, u8>,
    scratch: Vec<i8>,
}

impl TripleCache {
    pub fn new(conv: BracketConvention) -> Self {
        Self { conv, map: HashMap::new(), scratch: Vec::new() }
    }

    pub fn len(&self) -> usize {
        self.map.len()
    }

    pub fn is_empty(&self) -> bool {
        self.map.is_empty()
    }

    /// `tau` for a pure three-strand word; 0 when either winding is odd.
    pub fn tau(&mut self, word: &[i8]) -> Result<u8> {
        let Some((l1, l2)) = even_windings(word) else {
            return Ok(0);
        };
        self.scratch.clear();
        self.scratch.extend_from_slice(word);
        reduce_cyclic(&mut self.scratch);
        if self.scratch.is_empty() {
            return Ok(0);
        }
        if let Some(&v) = self.map.get(&self.scratch) {
            return Ok(v);
        }
        let v = evaluate(&self.scratch, l1, l2, &self.conv)?;
        self.map.insert(self.scratch.clone(), v);
        Ok(v)
    }

    /// Uncached evaluation, for checking the cache.
    pub fn tau_uncached(&self, word: &[i8]) -> Result<u8> {
        let Some((l1, l2)) = even_windings(word) else {
            return Ok(0);
        };
        evaluate(word, l1, l2, &self.conv)
    }
}

fn even_windings(word: &[i8]) -> Option<(i64, i64)> {
    let (a, b) = crossing_balance(word);
    if a % 4 != 0 || b % 4 != 0 {
        return None;
    }
    Some((a / 2, b / 2))
}

fn evaluate(word: &[i8], l1: i64, l2: i64, conv: &BracketConvention) -> Result<u8> {
    let crossings = word.iter().map(|&g| Crossing { k: g.unsigned_abs() as usize, sign: g.signum() }).collect();
    let braid = BraidWord::new(3, crossings)?;
    let trace = normalised_bracket(&braid, conv)?;
    tau_from_trace(trace, l1, l2)
}
