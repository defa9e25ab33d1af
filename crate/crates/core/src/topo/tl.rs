//! Temperley-Lieb diagrams: planar matchings of `2r` boundary points.
//!
//! Bottom points are `0..r`, top points `r..2r`. Generators `e_j` are stacked
//! on top of a diagram.

use std::collections::HashMap;
use std::sync::{Arc, Mutex, OnceLock};

/// Largest strand count for which the full basis is tabulated.
pub(crate) const DENSE_MAX_STRANDS: usize = 8;

#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Debug)]
pub struct TlDiagram {
    partner: Vec<u8>,
}

impl TlDiagram {
    pub fn identity(r: usize) -> Self {
        assert!(r >= 1 && 2 * r <= u8::MAX as usize, "strand count {r} unsupported");
        let partner = (0..2 * r).map(|i| if i < r { (i + r) as u8 } else { (i - r) as u8 }).collect();
        Self { partner }
    }

    pub fn strands(&self) -> usize {
        self.partner.len() / 2
    }

    /// Stacks `e_j` (cup-cap on strands `j`, `j+1`, zero-based) on top.
    /// Returns the new diagram and whether a closed loop was created.
    pub fn stack_generator(&self, j: usize) -> (Self, bool) {
        let r = self.strands();
        let (tj, tj1) = (r + j, r + j + 1);
        let x = self.partner[tj] as usize;
        let y = self.partner[tj1] as usize;
        if x == tj1 {
            return (self.clone(), true);
        }
        let mut partner = self.partner.clone();
        partner[x] = y as u8;
        partner[y] = x as u8;
        partner[tj] = tj1 as u8;
        partner[tj1] = tj as u8;
        (Self { partner }, false)
    }

    /// Number of loops in the Markov closure (top `i` joined to bottom `i`).
    pub fn closure_loops(&self) -> usize {
        let r = self.strands();
        let mut seen = vec![false; 2 * r];
        let mut loops = 0;
        for start in 0..2 * r {
            if seen[start] {
                continue;
            }
            loops += 1;
            let mut p = start;
            loop {
                seen[p] = true;
                let q = self.partner[p] as usize;
                seen[q] = true;
                let next = if q < r { q + r } else { q - r };
                if seen[next] {
                    break;
                }
                p = next;
            }
        }
        loops
    }
}

/// Full basis of `TL_r` with generator action tables.
pub(crate) struct DenseTl {
    pub basis_len: usize,
    pub identity: usize,
    /// `action[j][i] = (target, closes_loop)` for `e_j` applied to basis `i`.
    pub action: Vec<Vec<(u32, bool)>>,
    pub loops: Vec<usize>,
}

impl DenseTl {
    fn build(r: usize) -> Self {
        let id = TlDiagram::identity(r);
        let mut index: HashMap<TlDiagram, usize> = HashMap::new();
        let mut basis = vec![id.clone()];
        index.insert(id, 0);
        let mut frontier = 0;
        while frontier < basis.len() {
            let d = basis[frontier].clone();
            for j in 0..r.saturating_sub(1) {
                let (next, _) = d.stack_generator(j);
                if !index.contains_key(&next) {
                    index.insert(next.clone(), basis.len());
                    basis.push(next);
                }
            }
            frontier += 1;
        }
        let action = (0..r.saturating_sub(1))
            .map(|j| {
                basis
                    .iter()
                    .map(|d| {
                        let (next, closed) = d.stack_generator(j);
                        (index[&next] as u32, closed)
                    })
                    .collect()
            })
            .collect();
        let loops = basis.iter().map(TlDiagram::closure_loops).collect();
        Self { basis_len: basis.len(), identity: 0, action, loops }
    }

    /// Shared table for `r` strands.
    pub fn get(r: usize) -> Arc<DenseTl> {
        static CACHE: OnceLock<Mutex<HashMap<usize, Arc<DenseTl>>>> = OnceLock::new();
        let cache = CACHE.get_or_init(|| Mutex::new(HashMap::new()));
        let mut guard = cache.lock().expect("TL table cache poisoned");
        guard.entry(r).or_insert_with(|| Arc::new(DenseTl::build(r))).clone()
    }
}
