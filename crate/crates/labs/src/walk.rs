//! Self-avoiding walk solver over skew-symmetric half-coordinates.
//!
//! The search runs as one contiguous self-avoiding walk or as a sequence of
//! walk segments. Each step probes the distance-1 neighbors of the pivot
//! that are not already on the current segment, moves to the best one
//! (uniform random tie-break), and marks it visited. A segment ends when
//! the target is reached, the segment length limit `ω_lmt = ω_c · L'` is
//! hit (a fresh random coordinate restarts the walk), the clock runs out,
//! or the walk is trapped with every neighbor already visited — in which
//! case the segment re-initializes in place and the trapped count is
//! flagged on the record.
//!
//! Only the current segment's pivots are stored; with a bounded segment
//! length the memory footprint is constant. Unlimited walks keep every
//! pivot and abort with a distinct memory-capped status when the visited
//! set would outgrow the configured cap.

use std::collections::HashSet;
use std::time::{Duration, Instant};

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};

use crate::seq::{compute_correlations, expand_skew, CorrelationState, SkewHalf, MAX_LEN};
use crate::trial::{SolverError, TrialRecord, TrialRng};

/// Walk-segment length policy.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum WalkLimit {
    /// Segment length limit `ω_c · L'`; the tuned default is `ω_c = 8`.
    Bounded(u32),
    /// Single contiguous walk, limited only by memory.
    Unlimited,
}

pub const DEFAULT_WALK_COEF: u32 = 8;
pub const DEFAULT_MEMORY_CAP: u64 = 8 << 30;

/// Configuration of one self-avoiding walk trial.
#[derive(Debug, Clone)]
pub struct SawConfig {
    /// Odd instance size L; the walk moves in the L' = (L+1)/2 half space.
    pub len: u32,
    /// Target energy (the best upper bound for the instance).
    pub target: i64,
    pub time_limit: Duration,
    pub walk_limit: WalkLimit,
    pub seed: u64,
    /// Byte budget for the visited set of unlimited walks.
    pub memory_cap: u64,
}

impl SawConfig {
    pub fn new(len: u32, target: i64, time_limit: Duration, seed: u64) -> Self {
        Self {
            len,
            target,
            time_limit,
            walk_limit: WalkLimit::Bounded(DEFAULT_WALK_COEF),
            seed,
            memory_cap: DEFAULT_MEMORY_CAP,
        }
    }

    pub fn half_len(&self) -> usize {
        (self.len as usize + 1) / 2
    }

    /// Steps allowed per segment.
    pub fn segment_limit(&self) -> u64 {
        match self.walk_limit {
            WalkLimit::Bounded(coef) => u64::from(coef) * self.half_len() as u64,
            WalkLimit::Unlimited => u64::MAX,
        }
    }

    pub fn solver_id(&self) -> String {
        match self.walk_limit {
            WalkLimit::Bounded(coef) => format!("saw{coef}"),
            WalkLimit::Unlimited => "sawU".to_string(),
        }
    }

    fn validate(&self) -> Result<(), SolverError> {
        if self.len % 2 == 0 {
            return Err(SolverError::EvenLength(self.len));
        }
        if self.len == 0 || self.len as usize > MAX_LEN {
            return Err(SolverError::BadLength(self.len));
        }
        Ok(())
    }
}

/// Packed half-coordinate used as the visited-set key.
fn key_words(half_len: usize) -> usize {
    half_len.div_ceil(64)
}

/// Estimated bytes per visited entry: the packed words plus set overhead.
fn entry_bytes(words: usize) -> u64 {
    (words * 8 + 32) as u64
}

enum StepOutcome {
    Moved,
    Trapped,
    MemCapped,
}

enum SegmentEnd {
    TargetMet,
    TimedOut,
    LimitHit,
    MemCapped,
}

struct Trial {
    target: i64,
    time_limit: Duration,
    segment_limit: u64,
    unlimited: bool,
    memory_cap: u64,
    rng: TrialRng,
    state: CorrelationState,
    half: Vec<u8>,
    key: Vec<u64>,
    visited: HashSet<Box<[u64]>>,
    scratch: Vec<u64>,
    perm: Vec<u32>,
    ties: Vec<u32>,
    best_half: Vec<u8>,
    best_energy: i64,
    probes: u64,
    steps: u64,
    restarts: u64,
    trapped: u64,
    started: Instant,
    timed_out: bool,
    mem_capped: bool,
}

impl Trial {
    fn new(cfg: &SawConfig) -> Self {
        let half_len = cfg.half_len();
        let mut rng = TrialRng::seed_from_u64(cfg.seed);
        let half: Vec<u8> = (0..half_len).map(|_| rng.gen_range(0..=1u8)).collect();
        let state = evaluate_half(&half);
        let key = pack(&half);
        let best_energy = state.energy();
        Self {
            target: cfg.target,
            time_limit: cfg.time_limit,
            segment_limit: cfg.segment_limit(),
            unlimited: cfg.walk_limit == WalkLimit::Unlimited,
            memory_cap: cfg.memory_cap,
            rng,
            state,
            best_half: half.clone(),
            half,
            visited: HashSet::new(),
            scratch: vec![0; key_words(half_len)],
            key,
            perm: (0..half_len as u32).collect(),
            ties: Vec::with_capacity(half_len),
            best_energy,
            probes: 1,
            steps: 0,
            restarts: 0,
            trapped: 0,
            started: Instant::now(),
            timed_out: false,
            mem_capped: false,
        }
    }

    fn draw_coordinate(&mut self) {
        for b in &mut self.half {
            *b = self.rng.gen_range(0..=1u8);
        }
        self.key.copy_from_slice(&pack(&self.half));
        self.state = evaluate_half(&self.half);
        self.probes += 1;
    }

    fn note_best(&mut self) {
        let e = self.state.energy();
        if e <= self.best_energy {
            self.best_energy = e;
            self.best_half.copy_from_slice(&self.half);
        }
    }

    fn mark_visited(&mut self) -> bool {
        if self.unlimited {
            let next = (self.visited.len() as u64 + 1) * entry_bytes(self.key.len());
            if next > self.memory_cap {
                return false;
            }
        }
        self.visited.insert(self.key.clone().into_boxed_slice());
        true
    }

    /// One walk step: probe the unvisited neighbors in a fresh random
    /// permutation, move to the minimum-energy candidate with a uniform
    /// tie-break, and mark it visited. Every candidate costs one probe.
    fn step(&mut self) -> StepOutcome {
        self.perm.shuffle(&mut self.rng);
        self.ties.clear();
        let mut best = i64::MAX;
        let mut candidates = 0u64;
        self.scratch.copy_from_slice(&self.key);
        for idx in &self.perm {
            let i = *idx as usize;
            self.scratch[i / 64] ^= 1 << (i % 64);
            if !self.visited.contains(&self.scratch[..]) {
                candidates += 1;
                let e = self.state.energy() + self.state.skew_flip_delta(i);
                if e < best {
                    best = e;
                    self.ties.clear();
                    self.ties.push(*idx);
                } else if e == best {
                    self.ties.push(*idx);
                }
            }
            self.scratch[i / 64] ^= 1 << (i % 64);
        }
        self.probes += candidates;
        if self.ties.is_empty() {
            // trapped: every neighbor is already a pivot of this segment
            self.trapped += 1;
            self.draw_coordinate();
            self.visited.clear();
            self.mark_visited();
            return StepOutcome::Trapped;
        }
        let choice = if self.ties.len() == 1 {
            self.ties[0]
        } else {
            self.ties[self.rng.gen_range(0..self.ties.len())]
        } as usize;
        self.state.skew_flip(choice);
        self.half[choice] ^= 1;
        self.key[choice / 64] ^= 1 << (choice % 64);
        if !self.mark_visited() {
            return StepOutcome::MemCapped;
        }
        StepOutcome::Moved
    }

    /// One contiguous self-avoiding walk segment.
    fn run_segment(&mut self) -> SegmentEnd {
        self.note_best();
        self.visited.clear();
        self.mark_visited();
        let mut seg_steps = 0u64;
        let end = loop {
            if self.best_energy <= self.target {
                break SegmentEnd::TargetMet;
            }
            if seg_steps >= self.segment_limit {
                break SegmentEnd::LimitHit;
            }
            if self.started.elapsed() >= self.time_limit {
                self.timed_out = true;
                break SegmentEnd::TimedOut;
            }
            seg_steps += 1;
            match self.step() {
                StepOutcome::Moved | StepOutcome::Trapped => {}
                StepOutcome::MemCapped => {
                    self.mem_capped = true;
                    break SegmentEnd::MemCapped;
                }
            }
            self.note_best();
        };
        self.steps += seg_steps;
        end
    }

    fn into_record(self, cfg: &SawConfig) -> TrialRecord {
        let coord = SkewHalf::from_bits(self.best_half).expect("valid half");
        let (target_reached, is_censored) =
            TrialRecord::status(self.best_energy, self.target, self.timed_out);
        TrialRecord {
            solver: cfg.solver_id(),
            len: cfg.len,
            target: cfg.target,
            seed_init: cfg.seed,
            coord_best: coord.to_string(),
            value_best: self.best_energy,
            total_steps: self.steps,
            cnt_probe: self.probes,
            cnt_restart: self.restarts,
            cnt_trapped: self.trapped,
            runtime_ms: self.started.elapsed().as_millis() as u64,
            is_censored,
            target_reached,
            mem_capped: u8::from(self.mem_capped),
        }
    }
}

fn evaluate_half(half: &[u8]) -> CorrelationState {
    let half = SkewHalf::from_bits(half.to_vec()).expect("valid half bits");
    compute_correlations(&expand_skew(&half))
}

fn pack(half: &[u8]) -> Vec<u64> {
    let mut words = vec![0u64; key_words(half.len())];
    for (i, &b) in half.iter().enumerate() {
        if b == 1 {
            words[i / 64] |= 1 << (i % 64);
        }
    }
    words
}

/// Runs one fully instrumented self-avoiding walk trial. Deterministic for
/// a given configuration and seed, up to the wall-clock field.
pub fn run_saw_trial(cfg: &SawConfig) -> Result<TrialRecord, SolverError> {
    cfg.validate()?;
    let mut trial = Trial::new(cfg);
    loop {
        match trial.run_segment() {
            SegmentEnd::TargetMet | SegmentEnd::TimedOut | SegmentEnd::MemCapped => break,
            SegmentEnd::LimitHit => {
                if trial.started.elapsed() >= trial.time_limit {
                    trial.timed_out = true;
                    break;
                }
                trial.restarts += 1;
                trial.steps += 1;
                trial.draw_coordinate();
            }
        }
    }
    Ok(trial.into_record(cfg))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::exhaustive_optimum;
    use crate::seq::energy;

    fn quick_cfg(len: u32, target: i64, seed: u64) -> SawConfig {
        SawConfig::new(len, target, Duration::from_secs(60), seed)
    }

    #[test]
    fn rejects_even_lengths() {
        let cfg = quick_cfg(20, 10, 1);
        assert_eq!(run_saw_trial(&cfg), Err(SolverError::EvenLength(20)));
    }

    #[test]
    fn l21_bounded_walk_reaches_the_optimum() {
        for seed in 0..5 {
            let rec = run_saw_trial(&quick_cfg(21, 26, seed)).unwrap();
            assert_eq!(rec.target_reached, 1, "seed {seed}");
            assert_eq!(rec.is_censored, 0);
            assert_eq!(rec.value_best, 26);
            assert_eq!(rec.solver, "saw8");
        }
    }

    #[test]
    fn best_value_matches_expanded_best_coordinate() {
        for seed in [3u64, 99, 1234] {
            let rec = run_saw_trial(&quick_cfg(27, 37, seed)).unwrap();
            let half: SkewHalf = rec.coord_best.parse().unwrap();
            assert_eq!(energy(&expand_skew(&half)), rec.value_best);
        }
    }

    #[test]
    fn identical_seed_reproduces_the_record() {
        let cfg = quick_cfg(21, 26, 77);
        let a = run_saw_trial(&cfg).unwrap();
        let b = run_saw_trial(&cfg).unwrap();
        assert!(a.same_modulo_runtime(&b));
        let c = run_saw_trial(&quick_cfg(21, 26, 78)).unwrap();
        assert!(!a.same_modulo_runtime(&c));
    }

    #[test]
    fn zero_time_limit_censors_after_one_probe() {
        let mut cfg = quick_cfg(21, 0, 5);
        cfg.time_limit = Duration::ZERO;
        let rec = run_saw_trial(&cfg).unwrap();
        assert_eq!(rec.is_censored, 1);
        assert_eq!(rec.target_reached, 0);
        assert_eq!(rec.cnt_probe, 1);
        assert_eq!(rec.total_steps, 0);
    }

    #[test]
    fn start_at_target_takes_no_steps() {
        // target above every energy means the initial coordinate qualifies
        let mut cfg = quick_cfg(13, i64::MAX, 9);
        cfg.walk_limit = WalkLimit::Unlimited;
        let rec = run_saw_trial(&cfg).unwrap();
        assert_eq!(rec.total_steps, 0);
        assert_eq!(rec.cnt_probe, 1);
        assert_eq!(rec.target_reached, 2);
    }

    #[test]
    fn zero_segment_limit_degenerates_to_pure_restarts() {
        let mut cfg = quick_cfg(5, -1, 13); // unreachable target
        cfg.walk_limit = WalkLimit::Bounded(0); // ω_lmt = 0: restart every segment
        cfg.time_limit = Duration::from_millis(20);
        let rec = run_saw_trial(&cfg).unwrap();
        // every segment contributes zero walking steps, only restart jumps
        assert_eq!(rec.total_steps, rec.cnt_restart);
        assert_eq!(rec.is_censored, 1);
    }

    #[test]
    fn unit_segment_limit_takes_exactly_one_step() {
        let cfg = quick_cfg(21, -1, 21); // unreachable target
        let mut trial = Trial::new(&cfg);
        trial.segment_limit = 1;
        match trial.run_segment() {
            SegmentEnd::LimitHit => {}
            _ => panic!("segment should stop on its length limit"),
        }
        assert_eq!(trial.steps, 1);
    }

    #[test]
    fn unlimited_walks_on_l21_always_finish_without_restarts() {
        let mut lengths = Vec::new();
        for seed in 0..32 {
            let mut cfg = quick_cfg(21, 26, seed);
            cfg.walk_limit = WalkLimit::Unlimited;
            let rec = run_saw_trial(&cfg).unwrap();
            assert_eq!(rec.target_reached, 1, "seed {seed}");
            assert_eq!(rec.cnt_restart, 0);
            assert_eq!(rec.cnt_trapped, 0);
            assert_eq!(rec.solver, "sawU");
            lengths.push(rec.total_steps);
        }
        let max = *lengths.iter().max().unwrap();
        assert!(max < 1 << 11, "walk cannot exceed the half-space size");
    }

    #[test]
    fn probe_count_stays_within_step_bounds() {
        for seed in 0..8 {
            let rec = run_saw_trial(&quick_cfg(41, 108, seed)).unwrap();
            let walking = rec.total_steps - rec.cnt_restart;
            let accounted = rec.cnt_probe - 1 - rec.cnt_restart - rec.cnt_trapped;
            assert!(accounted >= walking);
            assert!(accounted <= walking * ((41 + 1) / 2));
        }
    }

    #[test]
    fn first_step_from_fixed_pivot_picks_a_minimum_energy_neighbor() {
        let cfg = quick_cfg(21, 26, 4242);
        let mut trial = Trial::new(&cfg);
        // force the pivot the walk starts from
        let pivot: SkewHalf = "11101011100".parse().unwrap();
        trial.half.copy_from_slice(pivot.bits());
        trial.key = pack(pivot.bits());
        trial.state = evaluate_half(pivot.bits());
        trial.visited.clear();
        trial.mark_visited();
        let probes_before = trial.probes;
        match trial.step() {
            StepOutcome::Moved => {}
            _ => panic!("fresh neighborhood cannot trap"),
        }
        // nothing was excluded, so all L' neighbors were probed
        assert_eq!(trial.probes - probes_before, 11);
        // brute-force the neighborhood: the chosen pivot has minimum energy
        let mut best = i64::MAX;
        for i in 0..11 {
            let mut bits = pivot.bits().to_vec();
            bits[i] ^= 1;
            let e = energy(&expand_skew(&SkewHalf::from_bits(bits).unwrap()));
            best = best.min(e);
        }
        assert_eq!(trial.state.energy(), best);
        // deterministic under a fixed seed
        let mut again = Trial::new(&cfg);
        again.half.copy_from_slice(pivot.bits());
        again.key = pack(pivot.bits());
        again.state = evaluate_half(pivot.bits());
        again.visited.clear();
        again.mark_visited();
        again.step();
        assert_eq!(again.half, trial.half);
    }

    #[test]
    fn fully_visited_neighborhood_traps_and_reinitializes() {
        let cfg = quick_cfg(3, -1, 7);
        let mut trial = Trial::new(&cfg);
        // mark the whole half space visited so every neighbor is excluded
        trial.visited.clear();
        for code in 0u8..4 {
            trial.key = pack(&[code & 1, code >> 1]);
            trial.mark_visited();
        }
        trial.key = pack(&trial.half.clone());
        match trial.step() {
            StepOutcome::Trapped => {}
            _ => panic!("expected a trapped pivot"),
        }
        assert_eq!(trial.trapped, 1);
        // the re-initialized walk keeps only the fresh pivot
        assert_eq!(trial.visited.len(), 1);
    }

    #[test]
    fn tiny_memory_cap_aborts_unlimited_walks() {
        let mut cfg = quick_cfg(21, -1, 3);
        cfg.walk_limit = WalkLimit::Unlimited;
        cfg.memory_cap = 200; // a handful of entries
        let rec = run_saw_trial(&cfg).unwrap();
        assert_eq!(rec.mem_capped, 1);
        assert_eq!(rec.target_reached, 0);
    }

    #[test]
    fn small_instances_hit_the_oracle_optimum() {
        for &len in &[5u32, 7, 11, 13] {
            let oracle = exhaustive_optimum(len, true).unwrap();
            for seed in 0..4 {
                let rec = run_saw_trial(&quick_cfg(len, oracle.optimum, seed)).unwrap();
                assert_eq!(rec.value_best, oracle.optimum, "L={len} seed={seed}");
                assert_eq!(rec.target_reached, 1);
            }
        }
    }
}
