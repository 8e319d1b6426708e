//! Competitive coevolutionary weight learning.
//!
//! A population of candidate solutions (bit-string chromosomes) is played
//! against the fixed population of constraints. Every encounter is zero-sum:
//! a solution that satisfies the constraint scores +1 and the constraint −1,
//! and the other way round when it does not. Both sides keep a bounded
//! history of scores and their fitness is the sum of that history. Each
//! generation runs a batch of encounters between tournament-selected
//! solutions and rank-selected constraints, then breeds one offspring that
//! replaces the worst solution. After the last generation the solutions are
//! dropped and the constraint fitness, shifted to a floor of 1, becomes the
//! weight vector.

mod chromosome;
mod selection;

pub use chromosome::{bit_mutation, crossover_at, decode, field_width, one_point_crossover, Chromosome, Layout};
pub use selection::{
    linear_ranking_probabilities, linear_ranking_select, rank_order, ranking_by_fitness,
    tournament_by_fitness, EncounterHistory,
};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::csp::{Constraint, CspInstance};
use crate::error::{Error, Result};
use crate::search::ConstraintWeights;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct CoevoParams {
    pub pop_size: usize,
    pub history_len: usize,
    pub encounters_per_gen: usize,
    pub crossover_rate: f64,
    pub mutation_rate: f64,
    pub ranking_bias: f64,
    pub tournament_size: usize,
    pub generations: usize,
    pub seed: u64,
}

impl Default for CoevoParams {
    fn default() -> Self {
        CoevoParams {
            pop_size: 50,
            history_len: 10,
            encounters_per_gen: 20,
            crossover_rate: 0.9,
            mutation_rate: 0.01,
            ranking_bias: 2.0,
            tournament_size: 2,
            generations: 10,
            seed: 0,
        }
    }
}

impl CoevoParams {
    pub fn validate(&self) -> Result<()> {
        let counts = [
            ("pop_size", self.pop_size),
            ("history_len", self.history_len),
            ("tournament_size", self.tournament_size),
        ];
        if let Some((name, _)) = counts.iter().find(|(_, v)| *v == 0) {
            return Err(Error::Param(format!("{name} must be at least 1")));
        }
        for (name, p) in [("crossover_rate", self.crossover_rate), ("mutation_rate", self.mutation_rate)] {
            if !(0.0..=1.0).contains(&p) {
                return Err(Error::Param(format!("{name} {p} outside [0, 1]")));
            }
        }
        if !(1.0..=2.0).contains(&self.ranking_bias) {
            return Err(Error::Param(format!("ranking_bias {} outside [1, 2]", self.ranking_bias)));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SolutionIndividual {
    pub chromosome: Chromosome,
    pub history: EncounterHistory,
}

impl SolutionIndividual {
    pub fn fitness(&self) -> i32 {
        self.history.fitness()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct EncounterResult {
    pub sol_score: i8,
    pub cons_score: i8,
}

/// Plays one solution against one constraint and appends the scores to both
/// histories.
pub fn encounter(
    sol: &mut SolutionIndividual,
    constraint: &Constraint,
    cons_history: &mut EncounterHistory,
    layout: &Layout,
) -> EncounterResult {
    let (x, y) = constraint.scope();
    let bits = &sol.chromosome.bits;
    let satisfied = constraint.allows_idx(layout.index_of(bits, x), layout.index_of(bits, y));
    let result = if satisfied {
        EncounterResult { sol_score: 1, cons_score: -1 }
    } else {
        EncounterResult { sol_score: -1, cons_score: 1 }
    };
    sol.history.push(result.sol_score);
    cons_history.push(result.cons_score);
    result
}

/// Tournament selection on history fitness.
pub fn tournament_select<R: Rng + ?Sized>(
    pop: &[SolutionIndividual],
    k: usize,
    rng: &mut R,
) -> Result<usize> {
    let fitness: Vec<i32> = pop.iter().map(SolutionIndividual::fitness).collect();
    tournament_by_fitness(&fitness, k, rng)
}

#[derive(Debug, Clone, PartialEq)]
pub struct CoevoState {
    pub solutions: Vec<SolutionIndividual>,
    pub constraint_histories: Vec<EncounterHistory>,
    pub generation: usize,
    layout: Layout,
}

impl CoevoState {
    /// Uniformly random chromosomes; every history starts empty.
    pub fn new<R: Rng + ?Sized>(inst: &CspInstance, params: &CoevoParams, rng: &mut R) -> Result<Self> {
        params.validate()?;
        let layout = Layout::for_instance(inst);
        let len = layout.total_bits();
        let solutions = (0..params.pop_size)
            .map(|_| SolutionIndividual {
                chromosome: Chromosome::random(len, rng),
                history: EncounterHistory::new(params.history_len),
            })
            .collect();
        Ok(CoevoState {
            solutions,
            constraint_histories: vec![EncounterHistory::new(params.history_len); inst.num_constraints()],
            generation: 0,
            layout,
        })
    }

    /// Replaces the solution population, e.g. to start from known chromosomes.
    pub fn with_chromosomes(
        inst: &CspInstance,
        params: &CoevoParams,
        chromosomes: Vec<Chromosome>,
    ) -> Result<Self> {
        params.validate()?;
        let layout = Layout::for_instance(inst);
        if let Some(bad) = chromosomes.iter().find(|c| c.len() != layout.total_bits()) {
            return Err(Error::Contract(format!(
                "chromosome has {} bits, layout needs {}",
                bad.len(),
                layout.total_bits()
            )));
        }
        Ok(CoevoState {
            solutions: chromosomes
                .into_iter()
                .map(|chromosome| SolutionIndividual {
                    chromosome,
                    history: EncounterHistory::new(params.history_len),
                })
                .collect(),
            constraint_histories: vec![EncounterHistory::new(params.history_len); inst.num_constraints()],
            generation: 0,
            layout,
        })
    }

    pub fn layout(&self) -> &Layout {
        &self.layout
    }

    pub fn solution_fitness(&self) -> Vec<i32> {
        self.solutions.iter().map(SolutionIndividual::fitness).collect()
    }

    pub fn constraint_fitness(&self) -> Vec<i32> {
        self.constraint_histories.iter().map(EncounterHistory::fitness).collect()
    }

    /// Constraint fitness shifted so that the minimum weight is exactly 1.
    pub fn weights(&self) -> ConstraintWeights {
        weights_from_fitness(&self.constraint_fitness())
    }

    fn play<R: Rng + ?Sized>(
        &mut self,
        sol: usize,
        inst: &CspInstance,
        bias: f64,
        rng: &mut R,
    ) -> Result<()> {
        let c = ranking_by_fitness(&self.constraint_fitness(), bias, rng)?;
        encounter(
            &mut self.solutions[sol],
            inst.constraint(c),
            &mut self.constraint_histories[c],
            &self.layout,
        );
        Ok(())
    }
}

pub fn weights_from_fitness(fitness: &[i32]) -> ConstraintWeights {
    let min = fitness.iter().copied().min().unwrap_or(0);
    ConstraintWeights::from_vec(fitness.iter().map(|&f| f64::from(f - min + 1)).collect())
        .expect("shifted fitness is positive")
}

/// One steady-state generation: the encounter batch, then one offspring that
/// is evaluated by a full history of fresh encounters and replaces the worst
/// solution (lowest index among equals).
pub fn run_generation<R: Rng + ?Sized>(
    state: &mut CoevoState,
    params: &CoevoParams,
    inst: &CspInstance,
    rng: &mut R,
) -> Result<()> {
    let has_constraints = inst.num_constraints() > 0;
    if has_constraints {
        for _ in 0..params.encounters_per_gen {
            let sol = tournament_select(&state.solutions, params.tournament_size, rng)?;
            state.play(sol, inst, params.ranking_bias, rng)?;
        }
    }

    let a = tournament_select(&state.solutions, params.tournament_size, rng)?;
    let b = tournament_select(&state.solutions, params.tournament_size, rng)?;
    let child = one_point_crossover(
        &state.solutions[a].chromosome,
        &state.solutions[b].chromosome,
        params.crossover_rate,
        rng,
    )?;
    let child = bit_mutation(&child, params.mutation_rate, rng);

    let worst = state
        .solutions
        .iter()
        .enumerate()
        .min_by_key(|(i, s)| (s.fitness(), *i))
        .map(|(i, _)| i)
        .expect("population is non-empty");
    state.solutions[worst] = SolutionIndividual {
        chromosome: child,
        history: EncounterHistory::new(params.history_len),
    };
    if has_constraints {
        for _ in 0..params.history_len {
            state.play(worst, inst, params.ranking_bias, rng)?;
        }
    }
    state.generation += 1;
    Ok(())
}

/// Runs `params.generations` generations from a seeded random population and
/// returns the learned constraint weights.
pub fn learn_weights(inst: &CspInstance, params: &CoevoParams) -> Result<ConstraintWeights> {
    let mut rng = ChaCha8Rng::seed_from_u64(params.seed);
    let mut state = CoevoState::new(inst, params, &mut rng)?;
    for _ in 0..params.generations {
        run_generation(&mut state, params, inst, &mut rng)?;
    }
    Ok(state.weights())
}
