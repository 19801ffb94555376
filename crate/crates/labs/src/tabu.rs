//! Memetic-tabu search and its restart-tabu reduction.
//!
//! The memetic solver evolves a population of evaluated coordinates:
//! tournament selection, uniform crossover, per-bit mutation, then a tabu
//! search walk on every offspring, with elitist replacement. The restart
//! variant drops the population and runs the identical tabu search from
//! fresh random coordinates, which isolates the contribution of the tabu
//! walk itself. Both are instrumented exactly like the self-avoiding walk
//! solver so cntProbe asymptotics compare head to head.
//!
//! By default the search moves through skew-symmetric half-coordinates of
//! an odd-length instance; the full-length mode searches all L positions
//! instead (the even-length solver lineage) behind the same interface.

use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};

use crate::seq::{
    compute_correlations, expand_skew, BinarySequence, CorrelationState, SkewHalf, MAX_LEN,
};
use crate::trial::{SolverError, TrialRecord, TrialRng};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TabuVariant {
    /// Memetic algorithm with tabu search on every offspring.
    Mats,
    /// Memetic algorithm with the walk length fixed at `8·L'` instead of a
    /// random draw, mirroring the tuned self-avoiding walk segments.
    Mats8,
    /// Random restarts into tabu search, no population.
    Rrts,
}

/// Configuration of one memetic/restart tabu trial.
#[derive(Debug, Clone)]
pub struct MaTsConfig {
    pub len: u32,
    pub target: i64,
    pub time_limit: Duration,
    pub seed: u64,
    pub variant: TabuVariant,
    /// Search skew-symmetric halves (odd L) or full-length coordinates.
    pub skew: bool,
    pub popsize: u32,
    pub crossover_prob: f64,
    pub tournament: u32,
}

impl MaTsConfig {
    pub fn new(len: u32, target: i64, time_limit: Duration, seed: u64, variant: TabuVariant) -> Self {
        Self {
            len,
            target,
            time_limit,
            seed,
            variant,
            skew: true,
            popsize: 100,
            crossover_prob: 0.9,
            tournament: 2,
        }
    }

    /// Dimension of the searched space: L' under skew symmetry, L otherwise.
    pub fn dim(&self) -> usize {
        if self.skew {
            (self.len as usize + 1) / 2
        } else {
            self.len as usize
        }
    }

    /// Per-bit mutation probability `2/(L+1)`.
    pub fn mutation_prob(&self) -> f64 {
        2.0 / (f64::from(self.len) + 1.0)
    }

    pub fn solver_id(&self) -> String {
        let name = match self.variant {
            TabuVariant::Mats => "mats",
            TabuVariant::Mats8 => "mats8",
            TabuVariant::Rrts => "rrts",
        };
        if self.skew {
            name.to_string()
        } else {
            format!("l{name}")
        }
    }

    fn validate(&self) -> Result<(), SolverError> {
        if self.len == 0 || self.len as usize > MAX_LEN {
            return Err(SolverError::BadLength(self.len));
        }
        if self.skew && self.len % 2 == 0 {
            return Err(SolverError::EvenLength(self.len));
        }
        if self.popsize == 0 {
            return Err(SolverError::EmptyPopulation);
        }
        if !(0.0..=1.0).contains(&self.crossover_prob) {
            return Err(SolverError::BadProbability(self.crossover_prob));
        }
        Ok(())
    }

    /// Tabu walk length: a fresh draw from `[⌊L/2⌋, ⌊3L/2⌋]` per walk, or
    /// the fixed `8·L'` for the constant-segment variant.
    fn walk_steps(&self, rng: &mut TrialRng) -> u64 {
        match self.variant {
            TabuVariant::Mats | TabuVariant::Rrts => {
                let lo = u64::from(self.len) / 2;
                let hi = 3 * u64::from(self.len) / 2;
                rng.gen_range(lo..=hi)
            }
            TabuVariant::Mats8 => 8 * self.dim() as u64,
        }
    }
}

#[derive(Clone)]
struct Individual {
    bits: Vec<u8>,
    energy: i64,
}

fn evaluate(bits: &[u8], skew: bool) -> CorrelationState {
    if skew {
        let half = SkewHalf::from_bits(bits.to_vec()).expect("valid half bits");
        compute_correlations(&expand_skew(&half))
    } else {
        let seq = BinarySequence::from_bits(bits.to_vec()).expect("valid bits");
        compute_correlations(&seq)
    }
}

fn probe_delta(state: &CorrelationState, i: usize, skew: bool) -> i64 {
    if skew {
        state.skew_flip_delta(i)
    } else {
        state.flip_delta(i)
    }
}

fn apply_flip(state: &mut CorrelationState, bits: &mut [u8], i: usize, skew: bool) {
    if skew {
        state.skew_flip(i);
    } else {
        state.flip(i);
    }
    bits[i] ^= 1;
}

/// Runs `steps` tabu iterations from an evaluated start. Each iteration
/// probes all `dim` single-flip neighbors, moves to the best one that is
/// not tabu — a tabu move is allowed when it improves the best energy seen
/// by this search (aspiration) — and makes the flipped index tabu for a
/// tenure drawn uniformly from `[⌈dim/10⌉, ⌈dim/2⌉]`. Unlike the
/// self-avoiding walk, the trajectory may revisit coordinates. Returns the
/// best visited coordinate, the start included; adds `dim` probes per
/// iteration.
fn tabu_search(
    bits: &mut Vec<u8>,
    state: &mut CorrelationState,
    steps: u64,
    skew: bool,
    rng: &mut TrialRng,
    probes: &mut u64,
) -> Individual {
    let dim = bits.len();
    let tenure_lo = dim.div_ceil(10) as u64;
    let tenure_hi = dim.div_ceil(2) as u64;
    let mut expiry = vec![0u64; dim];
    let mut best = Individual {
        bits: bits.clone(),
        energy: state.energy(),
    };
    let mut allowed_ties: Vec<usize> = Vec::with_capacity(dim);
    let mut any_ties: Vec<usize> = Vec::with_capacity(dim);
    for iter in 1..=steps {
        let mut best_allowed = i64::MAX;
        let mut best_any = i64::MAX;
        allowed_ties.clear();
        any_ties.clear();
        for i in 0..dim {
            let e = state.energy() + probe_delta(state, i, skew);
            if e < best_any {
                best_any = e;
                any_ties.clear();
                any_ties.push(i);
            } else if e == best_any {
                any_ties.push(i);
            }
            let allowed = expiry[i] <= iter || e < best.energy;
            if allowed {
                if e < best_allowed {
                    best_allowed = e;
                    allowed_ties.clear();
                    allowed_ties.push(i);
                } else if e == best_allowed {
                    allowed_ties.push(i);
                }
            }
        }
        *probes += dim as u64;
        // with staggered tenures some move is always available, but fall
        // back to the best move overall if every index is tabu
        let pool = if allowed_ties.is_empty() {
            &any_ties
        } else {
            &allowed_ties
        };
        let choice = if pool.len() == 1 {
            pool[0]
        } else {
            pool[rng.gen_range(0..pool.len())]
        };
        apply_flip(state, bits, choice, skew);
        expiry[choice] = iter + rng.gen_range(tenure_lo..=tenure_hi);
        if state.energy() < best.energy {
            best.energy = state.energy();
            best.bits.copy_from_slice(bits);
        }
    }
    best
}

fn random_bits(dim: usize, rng: &mut TrialRng) -> Vec<u8> {
    (0..dim).map(|_| rng.gen_range(0..=1u8)).collect()
}

struct Counters {
    probes: u64,
    steps: u64,
    restarts: u64,
    started: Instant,
}

fn finish(
    cfg: &MaTsConfig,
    best: Individual,
    counters: Counters,
    timed_out: bool,
) -> TrialRecord {
    let coord = if cfg.skew {
        SkewHalf::from_bits(best.bits).expect("half").to_string()
    } else {
        BinarySequence::from_bits(best.bits).expect("bits").to_string()
    };
    let (target_reached, is_censored) = TrialRecord::status(best.energy, cfg.target, timed_out);
    TrialRecord {
        solver: cfg.solver_id(),
        len: cfg.len,
        target: cfg.target,
        seed_init: cfg.seed,
        coord_best: coord,
        value_best: best.energy,
        total_steps: counters.steps,
        cnt_probe: counters.probes,
        cnt_restart: counters.restarts,
        cnt_trapped: 0,
        runtime_ms: counters.started.elapsed().as_millis() as u64,
        is_censored,
        target_reached,
        mem_capped: 0,
    }
}

/// One memetic-tabu trial. Termination is checked at generation
/// boundaries, exactly where the instrumented loop guards sit: the initial
/// population may already contain the target (a hit with zero walk steps).
pub fn run_mats_trial(cfg: &MaTsConfig) -> Result<TrialRecord, SolverError> {
    cfg.validate()?;
    debug_assert!(cfg.variant != TabuVariant::Rrts, "use run_rrts_trial");
    let started = Instant::now();
    let dim = cfg.dim();
    let popsize = cfg.popsize as usize;
    let mut rng = TrialRng::seed_from_u64(cfg.seed);
    let mut counters = Counters {
        probes: 0,
        steps: 0,
        restarts: 0,
        started,
    };

    // the initial population counts toward cntProbe: its evaluations give
    // the memetic solver a head start that must stay visible in the cost
    let mut pop: Vec<Individual> = (0..popsize)
        .map(|_| {
            let bits = random_bits(dim, &mut rng);
            let energy = evaluate(&bits, cfg.skew).energy();
            counters.probes += 1;
            Individual { bits, energy }
        })
        .collect();
    pop.sort_by(|a, b| a.energy.cmp(&b.energy));
    let mut best = pop[0].clone();

    let mut timed_out = false;
    while best.energy > cfg.target {
        if started.elapsed() >= cfg.time_limit {
            timed_out = true;
            break;
        }
        let mut offspring = Vec::with_capacity(popsize);
        for _ in 0..popsize {
            let mut bits = if rng.gen_bool(cfg.crossover_prob) {
                let a = tournament_select(&pop, cfg.tournament, &mut rng);
                let b = tournament_select(&pop, cfg.tournament, &mut rng);
                uniform_crossover(&pop[a].bits, &pop[b].bits, &mut rng)
            } else {
                let a = tournament_select(&pop, cfg.tournament, &mut rng);
                pop[a].bits.clone()
            };
            mutate(&mut bits, cfg.mutation_prob(), &mut rng);
            let mut state = evaluate(&bits, cfg.skew);
            counters.probes += 1;
            let steps = cfg.walk_steps(&mut rng);
            let walked = tabu_search(
                &mut bits,
                &mut state,
                steps,
                cfg.skew,
                &mut rng,
                &mut counters.probes,
            );
            counters.steps += steps;
            offspring.push(walked);
        }
        pop.extend(offspring);
        // elitist replacement: keep the best popsize of pop ∪ offspring
        pop.sort_by(|a, b| a.energy.cmp(&b.energy));
        pop.truncate(popsize);
        if pop[0].energy < best.energy {
            best = pop[0].clone();
        }
    }
    Ok(finish(cfg, best, counters, timed_out))
}

/// One restart-tabu trial: random coordinate, tabu walk, repeat.
pub fn run_rrts_trial(cfg: &MaTsConfig) -> Result<TrialRecord, SolverError> {
    cfg.validate()?;
    let started = Instant::now();
    let dim = cfg.dim();
    let mut rng = TrialRng::seed_from_u64(cfg.seed);
    let mut counters = Counters {
        probes: 0,
        steps: 0,
        restarts: 0,
        started,
    };

    let mut bits = random_bits(dim, &mut rng);
    let mut state = evaluate(&bits, cfg.skew);
    counters.probes += 1;
    let mut best = Individual {
        bits: bits.clone(),
        energy: state.energy(),
    };

    let mut timed_out = false;
    while best.energy > cfg.target {
        if started.elapsed() >= cfg.time_limit {
            timed_out = true;
            break;
        }
        counters.restarts += 1;
        bits = random_bits(dim, &mut rng);
        state = evaluate(&bits, cfg.skew);
        counters.probes += 1;
        let steps = cfg.walk_steps(&mut rng);
        let walked = tabu_search(
            &mut bits,
            &mut state,
            steps,
            cfg.skew,
            &mut rng,
            &mut counters.probes,
        );
        counters.steps += steps;
        if walked.energy < best.energy {
            best = walked;
        }
    }
    Ok(finish(cfg, best, counters, timed_out))
}

/// Dispatch on the configured variant.
pub fn run_tabu_trial(cfg: &MaTsConfig) -> Result<TrialRecord, SolverError> {
    match cfg.variant {
        TabuVariant::Mats | TabuVariant::Mats8 => run_mats_trial(cfg),
        TabuVariant::Rrts => run_rrts_trial(cfg),
    }
}

fn tournament_select(pop: &[Individual], size: u32, rng: &mut TrialRng) -> usize {
    let mut winner = rng.gen_range(0..pop.len());
    for _ in 1..size {
        let challenger = rng.gen_range(0..pop.len());
        if pop[challenger].energy < pop[winner].energy {
            winner = challenger;
        }
    }
    winner
}

fn uniform_crossover(a: &[u8], b: &[u8], rng: &mut TrialRng) -> Vec<u8> {
    a.iter()
        .zip(b)
        .map(|(&x, &y)| if rng.gen_bool(0.5) { x } else { y })
        .collect()
}

fn mutate(bits: &mut [u8], prob: f64, rng: &mut TrialRng) {
    for b in bits {
        if rng.gen_bool(prob) {
            *b ^= 1;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::exhaustive_optimum;
    use crate::seq::energy;

    fn cfg(len: u32, target: i64, seed: u64, variant: TabuVariant) -> MaTsConfig {
        MaTsConfig::new(len, target, Duration::from_secs(60), seed, variant)
    }

    #[test]
    fn zero_steps_returns_the_start() {
        let mut rng = TrialRng::seed_from_u64(1);
        let mut bits = random_bits(11, &mut rng);
        let orig = bits.clone();
        let mut state = evaluate(&bits, true);
        let e = state.energy();
        let mut probes = 0;
        let best = tabu_search(&mut bits, &mut state, 0, true, &mut rng, &mut probes);
        assert_eq!(best.bits, orig);
        assert_eq!(best.energy, e);
        assert_eq!(probes, 0);
    }

    #[test]
    fn walk_from_published_start_runs_27_steps() {
        let half: SkewHalf = "11101011100".parse().unwrap();
        let mut bits = half.bits().to_vec();
        let mut state = evaluate(&bits, true);
        assert_eq!(state.energy(), 130);
        let mut rng = TrialRng::seed_from_u64(5);
        let mut probes = 0;
        let best = tabu_search(&mut bits, &mut state, 27, true, &mut rng, &mut probes);
        assert_eq!(probes, 27 * 11);
        assert!(best.energy <= 130);
        let best_half = SkewHalf::from_bits(best.bits).unwrap();
        assert_eq!(energy(&expand_skew(&best_half)), best.energy);
    }

    #[test]
    fn the_search_always_moves() {
        let mut rng = TrialRng::seed_from_u64(9);
        for _ in 0..20 {
            let mut bits = random_bits(7, &mut rng);
            let orig = bits.clone();
            let mut state = evaluate(&bits, true);
            let mut probes = 0;
            tabu_search(&mut bits, &mut state, 1, true, &mut rng, &mut probes);
            assert_ne!(bits, orig, "one iteration must move the walk");
            assert_eq!(
                bits.iter().zip(&orig).filter(|(a, b)| a != b).count(),
                1,
                "moves are single half-bit flips"
            );
        }
    }

    #[test]
    fn zero_time_limit_censors_with_population_probes_only() {
        let mut c = cfg(21, 0, 11, TabuVariant::Mats);
        c.time_limit = Duration::ZERO;
        let rec = run_mats_trial(&c).unwrap();
        assert_eq!(rec.is_censored, 1);
        assert_eq!(rec.cnt_probe, 100);
        assert_eq!(rec.total_steps, 0);
    }

    #[test]
    fn memetic_trials_are_deterministic_per_seed() {
        let c = cfg(21, 26, 31, TabuVariant::Mats);
        let a = run_mats_trial(&c).unwrap();
        let b = run_mats_trial(&c).unwrap();
        assert!(a.same_modulo_runtime(&b));
        assert_eq!(a.target_reached, 1);
        let half: SkewHalf = a.coord_best.parse().unwrap();
        assert_eq!(energy(&expand_skew(&half)), a.value_best);
    }

    #[test]
    fn restart_trials_are_deterministic_per_seed() {
        let c = cfg(13, 6, 17, TabuVariant::Rrts);
        let a = run_rrts_trial(&c).unwrap();
        let b = run_rrts_trial(&c).unwrap();
        assert!(a.same_modulo_runtime(&b));
        assert_eq!(a.value_best, 6);
        assert_eq!(a.solver, "rrts");
    }

    #[test]
    fn restart_tabu_reaches_small_optima() {
        for &(len, opt) in &[(5u32, 2i64), (7, 3), (11, 5), (13, 6)] {
            for seed in 0..4 {
                let rec = run_rrts_trial(&cfg(len, opt, seed, TabuVariant::Rrts)).unwrap();
                assert_eq!(rec.value_best, opt, "L={len} seed={seed}");
                assert_eq!(rec.target_reached, 1);
            }
        }
    }

    #[test]
    fn some_memetic_trials_hit_in_the_initial_population() {
        let mut zero_walk_hits = 0;
        for seed in 0..120 {
            let rec = run_mats_trial(&cfg(21, 26, seed, TabuVariant::Mats)).unwrap();
            assert_eq!(rec.target_reached, 1);
            if rec.total_steps == 0 {
                zero_walk_hits += 1;
            }
        }
        // ~1/6 of random populations of 100 contain one of the 4 optima
        assert!(zero_walk_hits > 0, "expected hits with walk length 0");
    }

    #[test]
    fn fixed_segment_variant_walks_in_multiples_of_8_half_lengths() {
        let rec = run_mats_trial(&cfg(21, 26, 3, TabuVariant::Mats8)).unwrap();
        assert_eq!(rec.solver, "mats8");
        assert_eq!(rec.total_steps % (8 * 11), 0);
        assert_eq!(rec.target_reached, 1);
    }

    #[test]
    fn full_length_mode_solves_even_instances() {
        let oracle = exhaustive_optimum(20, false).unwrap();
        let mut c = cfg(20, oracle.optimum, 7, TabuVariant::Rrts);
        c.skew = false;
        let rec = run_rrts_trial(&c).unwrap();
        assert_eq!(rec.solver, "lrrts");
        assert_eq!(rec.value_best, oracle.optimum);
        let seq: BinarySequence = rec.coord_best.parse().unwrap();
        assert_eq!(energy(&seq), rec.value_best);
    }

    #[test]
    fn skew_mode_rejects_even_lengths() {
        let c = cfg(20, 26, 1, TabuVariant::Mats);
        assert_eq!(run_mats_trial(&c), Err(SolverError::EvenLength(20)));
    }
}
