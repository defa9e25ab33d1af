use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Elementary generator `sigma_k^{sign}` exchanging strands `k` and `k+1` (one-based).
#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug, Serialize, Deserialize)]
pub struct Crossing {
    pub k: usize,
    pub sign: i8,
}

impl Crossing {
    pub fn inverse(self) -> Self {
        Self { k: self.k, sign: -self.sign }
    }
}

/// An `r`-strand braid word, crossings listed in the order they are applied.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct BraidWord {
    strands: usize,
    crossings: Vec<Crossing>,
}

impl BraidWord {
    pub fn new(strands: usize, crossings: Vec<Crossing>) -> Result<Self> {
        if strands == 0 {
            return Err(Error::InvalidParameter("a braid needs at least one strand".into()));
        }
        for c in &crossings {
            if c.k == 0 || c.k >= strands {
                return Err(Error::InvalidParameter(format!(
                    "generator sigma_{} outside 1..={} for {strands} strands",
                    c.k,
                    strands - 1
                )));
            }
            if c.sign != 1 && c.sign != -1 {
                return Err(Error::InvalidParameter(format!("crossing sign {} is not +-1", c.sign)));
            }
        }
        Ok(Self { strands, crossings })
    }

    pub fn identity(strands: usize) -> Self {
        Self { strands: strands.max(1), crossings: Vec::new() }
    }

    /// Parses whitespace- or comma-separated signed generator indices, e.g. `"1 1 -2"`.
    pub fn parse(strands: usize, text: &str) -> Result<Self> {
        let mut crossings = Vec::new();
        for tok in text.split(|c: char| c.is_whitespace() || c == ',').filter(|s| !s.is_empty()) {
            let v: i64 = tok
                .parse()
                .map_err(|_| Error::InvalidParameter(format!("bad generator token {tok:?}")))?;
            if v == 0 {
                return Err(Error::InvalidParameter("generator index 0 is not allowed".into()));
            }
            crossings.push(Crossing { k: v.unsigned_abs() as usize, sign: v.signum() as i8 });
        }
        Self::new(strands, crossings)
    }

    pub fn strands(&self) -> usize {
        self.strands
    }

    pub fn crossings(&self) -> &[Crossing] {
        &self.crossings
    }

    pub fn len(&self) -> usize {
        self.crossings.len()
    }

    pub fn is_empty(&self) -> bool {
        self.crossings.is_empty()
    }

    pub fn writhe(&self) -> i64 {
        self.crossings.iter().map(|c| c.sign as i64).sum()
    }

    pub fn inverse(&self) -> Self {
        Self { strands: self.strands, crossings: self.crossings.iter().rev().map(|c| c.inverse()).collect() }
    }

    /// `self` followed by `next`.
    pub fn then(&self, next: &Self) -> Self {
        assert_eq!(self.strands, next.strands, "braid words act on different strand counts");
        let mut crossings = self.crossings.clone();
        crossings.extend_from_slice(&next.crossings);
        Self { strands: self.strands, crossings }
    }

    /// Cancels adjacent `sigma_k sigma_k^{-1}` pairs until none remain.
    pub fn free_reduced(&self) -> Self {
        let mut out: Vec<Crossing> = Vec::with_capacity(self.crossings.len());
        for &c in &self.crossings {
            match out.last() {
                Some(&prev) if prev == c.inverse() => {
                    out.pop();
                }
                _ => out.push(c),
            }
        }
        Self { strands: self.strands, crossings: out }
    }

    /// `perm[i]` is the final position of the strand starting at position `i`.
    pub fn permutation(&self) -> Vec<usize> {
        let mut at: Vec<usize> = (0..self.strands).collect(); // at[pos] = strand
        for c in &self.crossings {
            at.swap(c.k - 1, c.k);
        }
        let mut perm = vec![0; self.strands];
        for (pos, &strand) in at.iter().enumerate() {
            perm[strand] = pos;
        }
        perm
    }

    pub fn is_pure(&self) -> bool {
        self.permutation().iter().enumerate().all(|(i, &p)| i == p)
    }

    /// Removes strands at either edge that take part in no crossing. Returns
    /// the trimmed word and the number of strands removed; each removed strand
    /// closes to a separate unknot.
    pub fn trimmed(&self) -> (Self, usize) {
        let (lo, hi) = match (self.crossings.iter().map(|c| c.k).min(), self.crossings.iter().map(|c| c.k).max()) {
            (Some(lo), Some(hi)) => (lo - 1, hi),
            _ => return (Self::identity(1), self.strands - 1),
        };
        let strands = hi - lo + 1;
        let crossings = self.crossings.iter().map(|c| Crossing { k: c.k - lo, sign: c.sign }).collect();
        (Self { strands, crossings }, self.strands - strands)
    }

    pub fn closure(&self) -> ClosedLink {
        ClosedLink::new(self.clone())
    }
}

impl std::fmt::Display for BraidWord {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        if self.crossings.is_empty() {
            return write!(f, "1");
        }
        for (i, c) in self.crossings.iter().enumerate() {
            if i > 0 {
                write!(f, " ")?;
            }
            write!(f, "{}", c.k as i64 * c.sign as i64)?;
        }
        Ok(())
    }
}

/// Markov closure of a braid word.
#[derive(Clone, Debug)]
pub struct ClosedLink {
    word: BraidWord,
    components: usize,
}

impl ClosedLink {
    pub fn new(word: BraidWord) -> Self {
        let perm = word.permutation();
        let mut seen = vec![false; perm.len()];
        let mut components = 0;
        for start in 0..perm.len() {
            if seen[start] {
                continue;
            }
            components += 1;
            let mut i = start;
            while !seen[i] {
                seen[i] = true;
                i = perm[i];
            }
        }
        Self { word, components }
    }

    pub fn word(&self) -> &BraidWord {
        &self.word
    }

    pub fn components(&self) -> usize {
        self.components
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn validates_generators() {
        assert!(BraidWord::parse(2, "1 2").is_err());
        assert!(BraidWord::parse(3, "0").is_err());
        let w = BraidWord::parse(3, "1, -2 1").unwrap();
        assert_eq!(w.len(), 3);
        assert_eq!(w.writhe(), 1);
        assert_eq!(w.to_string(), "1 -2 1");
    }

    #[test]
    fn closure_components_follow_permutation_cycles() {
        assert_eq!(BraidWord::parse(2, "1").unwrap().closure().components(), 1);
        assert_eq!(BraidWord::parse(2, "1 1").unwrap().closure().components(), 2);
        assert_eq!(BraidWord::parse(3, "1 2").unwrap().closure().components(), 1);
        assert_eq!(BraidWord::identity(4).closure().components(), 4);
    }

    #[test]
    fn free_reduction_and_inverse() {
        let w = BraidWord::parse(3, "1 2 -2 -1 2").unwrap();
        assert_eq!(w.free_reduced().to_string(), "2");
        let id = w.then(&w.inverse()).free_reduced();
        assert!(id.is_empty());
    }

    #[test]
    fn trimming_drops_idle_edge_strands() {
        let w = BraidWord::parse(6, "3 -4 3").unwrap();
        let (t, idle) = w.trimmed();
        assert_eq!(idle, 3);
        assert_eq!(t.strands(), 3);
        assert_eq!(t.to_string(), "1 -2 1");
        let (t, idle) = BraidWord::identity(5).trimmed();
        assert_eq!((t.strands(), idle), (1, 4));
    }
}
