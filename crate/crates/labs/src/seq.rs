//! Binary sequences and their aperiodic autocorrelation.
//!
//! A sequence `S = s_1 .. s_L` over `{+1, -1}` is stored as a bit string
//! with the fixed mapping **bit 0 ↔ s = +1, bit 1 ↔ s = -1**. The lag-k
//! autocorrelation is `C_k = Σ_{i=1}^{L-k} s_i s_{i+k}` and the energy is
//! `E = Σ_{k=1}^{L-1} C_k²`; the merit factor is `F = L² / (2E)`.
//!
//! [`CorrelationState`] caches the `C_k` vector and energy and supports
//! O(L) single-flip updates, which is what every solver and the exhaustive
//! oracle build on. All correlation arithmetic is exact integer arithmetic.
//!
//! Skew-symmetric sequences (odd `L` only) are represented by their first
//! `L' = (L+1)/2` bits ([`SkewHalf`]); [`expand_skew`] reconstructs the full
//! sequence. Solutions are published in a run-length encoding
//! ([`RleSolution`]) whose leading run counts 0s.

use std::fmt;
use std::str::FromStr;

use thiserror::Error;

/// Largest supported sequence length. Covers every tabulated instance and
/// leaves room for constructions of a few thousand symbols; the O(L²) full
/// evaluation stays cheap at this size.
pub const MAX_LEN: usize = 4096;

#[derive(Error, Debug, Clone, PartialEq, Eq)]
pub enum SeqError {
    #[error("sequence length must be in 1..={MAX_LEN}, got {0}")]
    BadLength(usize),
    #[error("sequence text must consist of '0' and '1' only")]
    BadSymbol,
    #[error("length mismatch: {0} vs {1}")]
    LengthMismatch(usize, usize),
    #[error("canonic form needs length >= 2, got {0}")]
    TooShort(usize),
    #[error("run-length solution needs at least one run")]
    EmptyRuns,
    #[error("run lengths must be positive")]
    ZeroRun,
    #[error("run-length encoding starts with a run of 0s; sequence begins with 1")]
    LeadingOne,
    #[error("bad run-length text: {0}")]
    BadRunText(String),
}

/// A binary sequence of length `L >= 1`, bit 0 ↔ +1 and bit 1 ↔ -1.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct BinarySequence {
    bits: Vec<u8>,
}

impl BinarySequence {
    /// Builds a sequence from raw bits (each must be 0 or 1).
    pub fn from_bits(bits: Vec<u8>) -> Result<Self, SeqError> {
        if bits.is_empty() || bits.len() > MAX_LEN {
            return Err(SeqError::BadLength(bits.len()));
        }
        if bits.iter().any(|&b| b > 1) {
            return Err(SeqError::BadSymbol);
        }
        Ok(Self { bits })
    }

    /// The all-zero (all `+1`) sequence.
    pub fn zeros(len: usize) -> Result<Self, SeqError> {
        if len == 0 || len > MAX_LEN {
            return Err(SeqError::BadLength(len));
        }
        Ok(Self { bits: vec![0; len] })
    }

    /// Builds a sequence from ±1 spins.
    pub fn from_spins(spins: &[i32]) -> Result<Self, SeqError> {
        let bits = spins
            .iter()
            .map(|&s| match s {
                1 => Ok(0u8),
                -1 => Ok(1u8),
                _ => Err(SeqError::BadSymbol),
            })
            .collect::<Result<Vec<_>, _>>()?;
        Self::from_bits(bits)
    }

    pub fn len(&self) -> usize {
        self.bits.len()
    }

    pub fn is_empty(&self) -> bool {
        false // length is always >= 1
    }

    pub fn bits(&self) -> &[u8] {
        &self.bits
    }

    pub fn bit(&self, i: usize) -> u8 {
        self.bits[i]
    }

    /// Spin value of position `i`: `+1` for bit 0, `-1` for bit 1.
    pub fn spin(&self, i: usize) -> i32 {
        1 - 2 * i32::from(self.bits[i])
    }

    pub fn complement(&self) -> Self {
        Self {
            bits: self.bits.iter().map(|b| b ^ 1).collect(),
        }
    }

    pub fn reverse(&self) -> Self {
        let mut bits = self.bits.clone();
        bits.reverse();
        Self { bits }
    }
}

impl fmt::Display for BinarySequence {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for b in &self.bits {
            write!(f, "{b}")?;
        }
        Ok(())
    }
}

impl fmt::Debug for BinarySequence {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "BinarySequence({self})")
    }
}

impl FromStr for BinarySequence {
    type Err = SeqError;

    /// Parses the text form: one '0' or '1' per symbol, round-trips with
    /// `Display` losslessly.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let bits = s
            .chars()
            .map(|c| match c {
                '0' => Ok(0u8),
                '1' => Ok(1u8),
                _ => Err(SeqError::BadSymbol),
            })
            .collect::<Result<Vec<_>, _>>()?;
        Self::from_bits(bits)
    }
}

/// Sequence plus cached autocorrelations `C_k` and energy, supporting O(L)
/// single-flip updates. The invariants `|C_k| <= L-k`, `C_k ≡ (L-k) mod 2`
/// and `energy = Σ C_k²` hold after every operation.
#[derive(Clone, PartialEq, Eq)]
pub struct CorrelationState {
    spins: Vec<i32>,
    corr: Vec<i32>,
    energy: i64,
}

impl CorrelationState {
    /// Full O(L²) evaluation of a sequence.
    pub fn from_sequence(seq: &BinarySequence) -> Self {
        let len = seq.len();
        let spins: Vec<i32> = (0..len).map(|i| seq.spin(i)).collect();
        let mut corr = vec![0i32; len.saturating_sub(1)];
        for (km1, c) in corr.iter_mut().enumerate() {
            let k = km1 + 1;
            let mut acc = 0i32;
            for i in 0..len - k {
                acc += spins[i] * spins[i + k];
            }
            *c = acc;
        }
        let energy = corr.iter().map(|&c| i64::from(c) * i64::from(c)).sum();
        Self { spins, corr, energy }
    }

    pub fn len(&self) -> usize {
        self.spins.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn energy(&self) -> i64 {
        self.energy
    }

    /// Autocorrelations `C_1 .. C_{L-1}` (index 0 holds `C_1`).
    pub fn corr(&self) -> &[i32] {
        &self.corr
    }

    pub fn spin(&self, i: usize) -> i32 {
        self.spins[i]
    }

    pub fn sequence(&self) -> BinarySequence {
        BinarySequence::from_spins(&self.spins).expect("spins are ±1")
    }

    /// Flips position `i` (0-based), updating every `C_k` and the energy in
    /// O(L). The energy is recomputed from the squared correlation deltas,
    /// never from floating-point accumulation.
    ///
    /// Panics if `i` is out of range.
    pub fn flip(&mut self, i: usize) {
        let len = self.spins.len();
        assert!(i < len, "flip index {i} out of range for length {len}");
        let si = self.spins[i];
        let mut de = 0i64;
        for k in 1..len {
            let mut t = 0i32;
            if i >= k {
                t += self.spins[i - k];
            }
            if i + k < len {
                t += self.spins[i + k];
            }
            if t != 0 {
                let d = -2 * si * t;
                let c = self.corr[k - 1];
                de += i64::from(d) * (2 * i64::from(c) + i64::from(d));
                self.corr[k - 1] = c + d;
            }
        }
        self.energy += de;
        self.spins[i] = -si;
    }

    /// Energy change from flipping the pair `a`, `b` (a != b), without
    /// mutating the state. Written against pre-flip spins; the lag that
    /// couples both positions is corrected exactly.
    pub fn pair_flip_delta(&self, a: usize, b: usize) -> i64 {
        debug_assert!(a != b);
        let len = self.spins.len();
        let sa = self.spins[a];
        let sb = self.spins[b];
        let gap = a.abs_diff(b);
        let mut de = 0i64;
        for k in 1..len {
            let mut t = 0i32;
            if a >= k {
                t += sa * self.spins[a - k];
            }
            if a + k < len {
                t += sa * self.spins[a + k];
            }
            if b >= k {
                t += sb * self.spins[b - k];
            }
            if b + k < len {
                t += sb * self.spins[b + k];
            }
            if k == gap {
                // the product s_a·s_b itself does not change sign
                t -= 2 * sa * sb;
            }
            if t != 0 {
                let d = -2 * t;
                de += i64::from(d) * (2 * i64::from(self.corr[k - 1]) + i64::from(d));
            }
        }
        de
    }

    /// Energy change from flipping position `i` alone, without mutating.
    pub fn flip_delta(&self, i: usize) -> i64 {
        let len = self.spins.len();
        let si = self.spins[i];
        let mut de = 0i64;
        for k in 1..len {
            let mut t = 0i32;
            if i >= k {
                t += self.spins[i - k];
            }
            if i + k < len {
                t += self.spins[i + k];
            }
            if t != 0 {
                let d = -2 * si * t;
                de += i64::from(d) * (2 * i64::from(self.corr[k - 1]) + i64::from(d));
            }
        }
        de
    }

    /// Flips half-coordinate bit `i` of a skew-symmetric state: the two
    /// coupled positions `i` and `L-1-i` for `i < L'-1`, or the single
    /// center position for `i = L'-1` (0-based). Cost stays O(L).
    pub fn skew_flip(&mut self, i: usize) {
        let len = self.spins.len();
        debug_assert!(len % 2 == 1, "skew flips need odd length");
        let half = (len + 1) / 2;
        assert!(i < half, "half index {i} out of range for L'={half}");
        let mirror = len - 1 - i;
        self.flip(i);
        if mirror != i {
            self.flip(mirror);
        }
    }

    /// Energy change of [`Self::skew_flip`] without mutating. Assumes the
    /// state is skew-symmetric, so all odd-lag correlations are zero and
    /// stay zero; only even lags are accumulated.
    pub fn skew_flip_delta(&self, i: usize) -> i64 {
        let len = self.spins.len();
        debug_assert!(len % 2 == 1);
        let half = (len + 1) / 2;
        debug_assert!(i < half);
        if i == half - 1 {
            return self.center_flip_delta_even_lags(i);
        }
        let b = len - 1 - i;
        let sa = self.spins[i];
        let sb = self.spins[b];
        let gap = b - i;
        let mut de = 0i64;
        let mut k = 2;
        while k < len {
            let mut t = 0i32;
            if i >= k {
                t += sa * self.spins[i - k];
            }
            // i + k < len always holds for i < L'-1, k <= L-1 is not
            // guaranteed, so keep the bound check.
            if i + k < len {
                t += sa * self.spins[i + k];
            }
            if b >= k {
                t += sb * self.spins[b - k];
            }
            if b + k < len {
                t += sb * self.spins[b + k];
            }
            if k == gap {
                t -= 2 * sa * sb;
            }
            if t != 0 {
                let d = -2 * t;
                de += i64::from(d) * (2 * i64::from(self.corr[k - 1]) + i64::from(d));
            }
            k += 2;
        }
        de
    }

    fn center_flip_delta_even_lags(&self, i: usize) -> i64 {
        let len = self.spins.len();
        let si = self.spins[i];
        let mut de = 0i64;
        let mut k = 2;
        while k < len {
            let mut t = 0i32;
            if i >= k {
                t += self.spins[i - k];
            }
            if i + k < len {
                t += self.spins[i + k];
            }
            if t != 0 {
                let d = -2 * si * t;
                de += i64::from(d) * (2 * i64::from(self.corr[k - 1]) + i64::from(d));
            }
            k += 2;
        }
        de
    }
}

impl fmt::Debug for CorrelationState {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "CorrelationState({}, E={})", self.sequence(), self.energy)
    }
}

/// Full evaluation of the autocorrelation vector and energy.
pub fn compute_correlations(seq: &BinarySequence) -> CorrelationState {
    CorrelationState::from_sequence(seq)
}

/// Energy `E(S) = Σ C_k²`.
pub fn energy(seq: &BinarySequence) -> i64 {
    compute_correlations(seq).energy()
}

/// Merit factor `F = L² / (2E)`.
///
/// `E = 0` (possible only for `L = 1`, by the parity of `C_{L-1}` for
/// longer sequences) is reported as a distinct infinite outcome rather
/// than silently mapped to a number.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum MeritFactor {
    Finite(f64),
    Infinite,
}

impl MeritFactor {
    pub fn value(self) -> Option<f64> {
        match self {
            MeritFactor::Finite(f) => Some(f),
            MeritFactor::Infinite => None,
        }
    }
}

pub fn merit_factor(seq: &BinarySequence) -> MeritFactor {
    merit_from_energy(seq.len(), energy(seq))
}

/// Merit factor from a known energy value.
pub fn merit_from_energy(len: usize, energy: i64) -> MeritFactor {
    if energy == 0 {
        MeritFactor::Infinite
    } else {
        let l = len as f64;
        MeritFactor::Finite(l * l / (2.0 * energy as f64))
    }
}

/// Hamming distance `Σ a_i ⊕ b_i`; errors when lengths differ.
pub fn hamming(a: &BinarySequence, b: &BinarySequence) -> Result<usize, SeqError> {
    if a.len() != b.len() {
        return Err(SeqError::LengthMismatch(a.len(), b.len()));
    }
    Ok(a.bits()
        .iter()
        .zip(b.bits())
        .filter(|(x, y)| x != y)
        .count())
}

/// The four symmetry images of a sequence: identity, complement, reversal,
/// and complemented reversal. All four have equal energy.
pub fn symmetry_images(seq: &BinarySequence) -> [BinarySequence; 4] {
    let rev = seq.reverse();
    let comp_rev = rev.complement();
    [seq.clone(), seq.complement(), rev, comp_rev]
}

/// Canonic representative of a symmetry orbit: the lexicographically
/// smallest image whose first two bits are `00`. For inputs whose orbit has
/// no `00`-prefix image (possible for arbitrary non-optimal sequences) the
/// smallest image overall is returned; callers can detect that case from
/// the missing `00` prefix. Idempotent and constant on orbits.
pub fn canonicalize(seq: &BinarySequence) -> Result<BinarySequence, SeqError> {
    if seq.len() < 2 {
        return Err(SeqError::TooShort(seq.len()));
    }
    let images = symmetry_images(seq);
    let quadrant = images
        .iter()
        .filter(|s| s.bit(0) == 0 && s.bit(1) == 0)
        .min()
        .cloned();
    Ok(match quadrant {
        Some(best) => best,
        None => images.into_iter().min().expect("four images"),
    })
}

/// The first `L' = (L+1)/2` bits of a skew-symmetric sequence of odd
/// length `L`. Every half expands to a full sequence; the parity rule puts
/// skew-symmetric sequences in bijection with their halves.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct SkewHalf {
    bits: Vec<u8>,
}

impl SkewHalf {
    pub fn from_bits(bits: Vec<u8>) -> Result<Self, SeqError> {
        if bits.is_empty() || 2 * bits.len() - 1 > MAX_LEN {
            return Err(SeqError::BadLength(bits.len()));
        }
        if bits.iter().any(|&b| b > 1) {
            return Err(SeqError::BadSymbol);
        }
        Ok(Self { bits })
    }

    pub fn len(&self) -> usize {
        self.bits.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// Length `L = 2L' - 1` of the expanded sequence; always odd.
    pub fn full_len(&self) -> usize {
        2 * self.bits.len() - 1
    }

    pub fn bits(&self) -> &[u8] {
        &self.bits
    }
}

impl fmt::Display for SkewHalf {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for b in &self.bits {
            write!(f, "{b}")?;
        }
        Ok(())
    }
}

impl fmt::Debug for SkewHalf {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "SkewHalf({self})")
    }
}

impl FromStr for SkewHalf {
    type Err = SeqError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let bits = s
            .chars()
            .map(|c| match c {
                '0' => Ok(0u8),
                '1' => Ok(1u8),
                _ => Err(SeqError::BadSymbol),
            })
            .collect::<Result<Vec<_>, _>>()?;
        Self::from_bits(bits)
    }
}

/// Expands a half-coordinate to the full odd-length sequence:
/// `b_{L'+i}` is the complement of `b_{L'-i}` for odd `i` and a copy for
/// even `i` (1-based positions).
pub fn expand_skew(half: &SkewHalf) -> BinarySequence {
    let hl = half.len();
    let mut bits = Vec::with_capacity(2 * hl - 1);
    bits.extend_from_slice(half.bits());
    for i in 1..hl {
        let src = half.bits()[hl - 1 - i];
        bits.push(if i % 2 == 1 { src ^ 1 } else { src });
    }
    BinarySequence::from_bits(bits).expect("valid expansion")
}

/// First `(L+1)/2` bits of a sequence as a half-coordinate (odd `L` only).
pub fn half_of(seq: &BinarySequence) -> Result<SkewHalf, SeqError> {
    if seq.len() % 2 == 0 {
        return Err(SeqError::BadLength(seq.len()));
    }
    let hl = (seq.len() + 1) / 2;
    SkewHalf::from_bits(seq.bits()[..hl].to_vec())
}

/// True iff `L` is odd and the skew-symmetry rule holds at every offset.
pub fn is_skew_symmetric(seq: &BinarySequence) -> bool {
    let len = seq.len();
    if len % 2 == 0 {
        return false;
    }
    let hl = (len + 1) / 2;
    for i in 1..hl {
        let src = seq.bit(hl - 1 - i);
        let want = if i % 2 == 1 { src ^ 1 } else { src };
        if seq.bit(hl - 1 + i) != want {
            return false;
        }
    }
    true
}

/// Run-length encoded half-coordinate: alternating runs starting with 0s,
/// exactly the published solution notation (e.g. `7,11,1,...` is seven 0s,
/// eleven 1s, one 0, ...). Canonic solutions start with a run of at
/// least two 0s.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RleSolution {
    runs: Vec<u32>,
}

impl RleSolution {
    pub fn new(runs: Vec<u32>) -> Result<Self, SeqError> {
        if runs.is_empty() {
            return Err(SeqError::EmptyRuns);
        }
        if runs.iter().any(|&r| r == 0) {
            return Err(SeqError::ZeroRun);
        }
        Ok(Self { runs })
    }

    pub fn runs(&self) -> &[u32] {
        &self.runs
    }

    /// Sum of the runs, i.e. the length of the decoded half.
    pub fn implied_half_len(&self) -> usize {
        self.runs.iter().map(|&r| r as usize).sum()
    }

    /// Canonic solutions begin with a run of at least two 0s.
    pub fn has_canonic_prefix(&self) -> bool {
        self.runs[0] >= 2
    }

    /// Decodes into the half-coordinate.
    pub fn decode(&self) -> Result<SkewHalf, SeqError> {
        let mut bits = Vec::with_capacity(self.implied_half_len());
        let mut sym = 0u8;
        for &r in &self.runs {
            for _ in 0..r {
                bits.push(sym);
            }
            sym ^= 1;
        }
        SkewHalf::from_bits(bits)
    }

    /// Encodes a half-coordinate; the half must begin with a 0 so the
    /// leading run counts 0s.
    pub fn encode(half: &SkewHalf) -> Result<Self, SeqError> {
        if half.bits()[0] != 0 {
            return Err(SeqError::LeadingOne);
        }
        let mut runs = Vec::new();
        let mut cur = 0u8;
        let mut count = 0u32;
        for &b in half.bits() {
            if b == cur {
                count += 1;
            } else {
                runs.push(count);
                cur = b;
                count = 1;
            }
        }
        runs.push(count);
        Ok(Self { runs })
    }
}

impl fmt::Display for RleSolution {
    /// Comma-separated decimal runs, the published text form.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, r) in self.runs.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{r}")?;
        }
        Ok(())
    }
}

impl FromStr for RleSolution {
    type Err = SeqError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let runs = s
            .split(',')
            .map(|tok| {
                tok.trim()
                    .parse::<u32>()
                    .map_err(|_| SeqError::BadRunText(tok.trim().to_string()))
            })
            .collect::<Result<Vec<_>, _>>()?;
        Self::new(runs)
    }
}
