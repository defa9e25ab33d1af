//! Character sums of quadratic forms over the two-element field.
//!
//! `q(x) = sum_{i<j} B_ij x_i x_j + sum_i l_i x_i + c` with `x` in `{0,1}^n`.
//! The sum `F = sum_x (-1)^{q(x)}` is always `0` or `+-2^k`.

use crate::error::{Error, Result};

/// Variable limit for the bitset representation.
pub const MAX_FORM_VARIABLES: usize = 64;
/// Variable limit for Gray-code enumeration.
pub const MAX_BRUTE_FORCE_VARIABLES: usize = 20;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct QuadraticForm {
    n: usize,
    /// Symmetric adjacency rows with empty diagonal.
    adj: Vec<u64>,
    linear: u64,
    constant: bool,
}

/// `sign * 2^exponent`, or zero.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CharacterSum {
    Zero,
    Signed { negative: bool, exponent: u32 },
}

impl CharacterSum {
    pub fn to_i64(self) -> i64 {
        match self {
            CharacterSum::Zero => 0,
            CharacterSum::Signed { negative, exponent } => {
                let v = 1i64 << exponent;
                if negative {
                    -v
                } else {
                    v
                }
            }
        }
    }

    /// `F / 2^n` as a float; exact because the value is dyadic.
    pub fn normalised(self, n: usize) -> f64 {
        match self {
            CharacterSum::Zero => 0.0,
            CharacterSum::Signed { negative, exponent } => {
                let v = 2f64.powi(exponent as i32 - n as i32);
                if negative {
                    -v
                } else {
                    v
                }
            }
        }
    }
}

impl QuadraticForm {
    pub fn new(n: usize) -> Result<Self> {
        if n > MAX_FORM_VARIABLES {
            return Err(Error::IslandLimit { islands: n, limit: MAX_FORM_VARIABLES });
        }
        Ok(Self { n, adj: vec![0; n], linear: 0, constant: false })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// Toggles the coefficient of `x_i x_j`; `i == j` toggles the linear term.
    pub fn toggle(&mut self, i: usize, j: usize) {
        assert!(i < self.n && j < self.n);
        if i == j {
            self.linear ^= 1 << i;
        } else {
            self.adj[i] ^= 1 << j;
            self.adj[j] ^= 1 << i;
        }
    }

    pub fn toggle_linear(&mut self, i: usize) {
        self.linear ^= 1 << i;
    }

    pub fn toggle_constant(&mut self) {
        self.constant = !self.constant;
    }

    pub fn eval(&self, x: u64) -> bool {
        let mut q = self.constant ^ ((self.linear & x).count_ones() & 1 == 1);
        let mut pairs = 0;
        for i in 0..self.n {
            if x >> i & 1 == 1 {
                pairs += (self.adj[i] & x & !((2u64 << i) - 1)).count_ones();
            }
        }
        q ^= pairs & 1 == 1;
        q
    }

    /// Gray-code enumeration of all `2^n` assignments.
    pub fn character_sum_brute(&self) -> Result<i64> {
        if self.n > MAX_BRUTE_FORCE_VARIABLES {
            return Err(Error::IslandLimit { islands: self.n, limit: MAX_BRUTE_FORCE_VARIABLES });
        }
        let mut x = 0u64;
        let mut q = self.constant;
        let mut sum: i64 = if q { -1 } else { 1 };
        for step in 1u64..(1u64 << self.n) {
            let j = step.trailing_zeros() as usize;
            // flipping x_j changes q by l_j + sum_{i != j} B_ij x_i
            let delta = (self.linear >> j & 1) as u32 + (self.adj[j] & x).count_ones();
            q ^= delta & 1 == 1;
            x ^= 1 << j;
            sum += if q { -1 } else { 1 };
        }
        Ok(sum)
    }

    /// Gaussian elimination: each pivot either kills the sum, or removes one
    /// free variable (factor 2), or solves a linear constraint for a partner
    /// variable and substitutes it back (factor 2, two variables removed).
    pub fn character_sum(&self) -> CharacterSum {
        let mut adj = self.adj.clone();
        let mut lin = self.linear;
        let mut c = self.constant;
        let mut alive: u64 = if self.n == 64 { u64::MAX } else { (1u64 << self.n) - 1 };
        let mut exponent = 0u32;

        let remove = |adj: &mut Vec<u64>, lin: &mut u64, alive: &mut u64, v: usize| {
            *alive &= !(1 << v);
            *lin &= !(1 << v);
            let mut nb = adj[v];
            while nb != 0 {
                let i = nb.trailing_zeros() as usize;
                adj[i] &= !(1 << v);
                nb &= nb - 1;
            }
            adj[v] = 0;
        };

        while alive != 0 {
            let v = alive.trailing_zeros() as usize;
            let neighbours = adj[v] & alive;
            let lv = lin >> v & 1 == 1;
            remove(&mut adj, &mut lin, &mut alive, v);
            exponent += 1;
            if neighbours == 0 {
                if lv {
                    return CharacterSum::Zero;
                }
                continue;
            }
            // summing over x_v enforces  x_j = lv + sum_{k in S} x_k
            let j = neighbours.trailing_zeros() as usize;
            let s = neighbours & !(1 << j);
            let nj = adj[j] & alive & !(1 << j);
            let lj = lin >> j & 1 == 1;
            remove(&mut adj, &mut lin, &mut alive, j);

            // (lv + S.x)(N.x + lj) expanded into the remaining form
            let mut touched = s | nj;
            while touched != 0 {
                let k = touched.trailing_zeros() as usize;
                touched &= touched - 1;
                let mut row = 0;
                if s >> k & 1 == 1 {
                    row ^= nj;
                }
                if nj >> k & 1 == 1 {
                    row ^= s;
                }
                adj[k] ^= row & !(1 << k);
            }
            if lv {
                lin ^= nj;
            }
            if lj {
                lin ^= s;
            }
            lin ^= s & nj;
            c ^= lv && lj;
        }
        CharacterSum::Signed { negative: c, exponent }
    }
}
