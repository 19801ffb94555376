//! Legendre-sequence constructions and the rotation/appending grid search.
//!
//! A Legendre sequence of odd prime length p takes `s_i = +1` when i is a
//! nonzero quadratic residue mod p and `-1` otherwise, with `s_0 := +1` by
//! convention. Rotating the sequence left by `⌊r·p⌋` and periodically
//! appending its first `⌊t·p⌋` symbols yields merit factors approaching
//! 6.34 for large p in polynomial time; the grid search sweeps r and t in
//! increments of `1/p` and evaluates every cell, which is O(p³) overall.

use rayon::prelude::*;
use thiserror::Error;

use crate::seq::{compute_correlations, merit_from_energy, BinarySequence, MeritFactor, MAX_LEN};

#[derive(Error, Debug, Clone, PartialEq)]
pub enum LegendreError {
    #[error("{0} is not an odd prime")]
    NotPrime(u64),
    #[error("prime {0} too large for the supported sequence length")]
    TooLarge(u64),
    #[error("the requested grid contains no cells")]
    EmptyGrid,
}

fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    if n % 2 == 0 {
        return n == 2;
    }
    let mut d = 3u64;
    while d * d <= n {
        if n % d == 0 {
            return false;
        }
        d += 2;
    }
    true
}

/// Legendre sequence of odd prime length p.
pub fn legendre_sequence(p: u64) -> Result<BinarySequence, LegendreError> {
    if p == 2 || !is_prime(p) {
        return Err(LegendreError::NotPrime(p));
    }
    if p as usize > MAX_LEN {
        return Err(LegendreError::TooLarge(p));
    }
    let mut residue = vec![false; p as usize];
    for i in 1..p {
        residue[((i * i) % p) as usize] = true;
    }
    // bit 0 ↔ +1: index 0 and the quadratic residues are +1
    let bits = (0..p as usize)
        .map(|i| if i == 0 || residue[i] { 0u8 } else { 1u8 })
        .collect();
    Ok(BinarySequence::from_bits(bits).expect("valid bits"))
}

/// Left-rotates by `⌊r·p⌋` and appends the first `⌊t·p⌋` symbols of the
/// rotated sequence periodically; the output has length `p + ⌊t·p⌋`.
pub fn rotate_append(seq: &BinarySequence, r: f64, t: f64) -> BinarySequence {
    let p = seq.len();
    let rot = ((r * p as f64).floor() as usize) % p;
    let app = (t * p as f64).floor() as usize;
    rotate_append_counts(seq, rot, app)
}

fn rotate_append_counts(seq: &BinarySequence, rot: usize, app: usize) -> BinarySequence {
    let p = seq.len();
    let mut bits = Vec::with_capacity(p + app);
    for i in 0..p + app {
        bits.push(seq.bit((i + rot) % p));
    }
    BinarySequence::from_bits(bits).expect("valid bits")
}

/// One evaluated grid cell.
#[derive(Debug, Clone, PartialEq)]
pub struct GridCell {
    /// Rotation fraction `rot/p`.
    pub r: f64,
    /// Appending fraction `app/p`.
    pub t: f64,
    pub rot: usize,
    pub app: usize,
    /// Output length `p + app`.
    pub out_len: usize,
    pub energy: i64,
    pub merit: f64,
}

/// Result of a grid search: the best cell and every evaluated cell.
#[derive(Debug, Clone)]
pub struct GridSearch {
    pub p: u64,
    pub best: GridCell,
    pub cells: Vec<GridCell>,
}

/// Grid ranges in rotation/appending fractions, stepped in `1/p`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GridRange {
    pub r_min: f64,
    pub r_max: f64,
    pub t_min: f64,
    pub t_max: f64,
}

impl GridRange {
    /// Published sweep for short sequences: `r ∈ [0, 0.5]`, `t ∈ [0, 0.1]`.
    pub const SMALL: GridRange = GridRange {
        r_min: 0.0,
        r_max: 0.5,
        t_min: 0.0,
        t_max: 0.1,
    };

    /// Published sweep for long sequences (p >= 500): a narrow window
    /// around the quarter rotation, `r ∈ [0.2, 0.24]`, `t ∈ [0.055, 0.063]`.
    pub const LARGE: GridRange = GridRange {
        r_min: 0.2,
        r_max: 0.24,
        t_min: 0.055,
        t_max: 0.063,
    };

    /// Range the published experiments used at this size.
    pub fn default_for(p: u64) -> GridRange {
        if p < 500 {
            GridRange::SMALL
        } else {
            GridRange::LARGE
        }
    }

    fn steps(&self, p: u64) -> (Vec<usize>, Vec<usize>) {
        let pf = p as f64;
        let bound = |lo: f64, hi: f64| -> Vec<usize> {
            let from = (lo * pf - 1e-9).ceil().max(0.0) as usize;
            let to = (hi * pf + 1e-9).floor() as usize;
            (from..=to).collect()
        };
        (bound(self.r_min, self.r_max), bound(self.t_min, self.t_max))
    }
}

/// Exhaustive merit-factor sweep over the grid. Cells are independent and
/// evaluated in parallel; the best cell is the maximum merit factor with
/// ties broken toward the smallest (rotation, appending) pair.
pub fn grid_search_merit(p: u64, range: GridRange) -> Result<GridSearch, LegendreError> {
    let seq = legendre_sequence(p)?;
    let (rots, apps) = range.steps(p);
    if rots.is_empty() || apps.is_empty() {
        return Err(LegendreError::EmptyGrid);
    }
    let pf = p as f64;
    let mut cells: Vec<GridCell> = rots
        .par_iter()
        .flat_map_iter(|&rot| {
            let seq = &seq;
            apps.iter().map(move |&app| {
                let out = rotate_append_counts(seq, rot, app);
                let energy = compute_correlations(&out).energy();
                let merit = match merit_from_energy(out.len(), energy) {
                    MeritFactor::Finite(f) => f,
                    MeritFactor::Infinite => f64::INFINITY,
                };
                GridCell {
                    r: rot as f64 / pf,
                    t: app as f64 / pf,
                    rot,
                    app,
                    out_len: out.len(),
                    energy,
                    merit,
                }
            })
        })
        .collect();
    cells.sort_by(|a, b| (a.rot, a.app).cmp(&(b.rot, b.app)));
    let best = cells
        .iter()
        .max_by(|a, b| {
            a.merit
                .total_cmp(&b.merit)
                .then((b.rot, b.app).cmp(&(a.rot, a.app)))
        })
        .expect("grid is nonempty")
        .clone();
    Ok(GridSearch {
        p,
        best,
        cells,
    })
}
