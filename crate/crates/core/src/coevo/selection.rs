use std::collections::VecDeque;

use rand::Rng;

use crate::error::{Error, Result};

/// Bounded record of ±1 encounter scores; the oldest entry is evicted once
/// `capacity` is reached. Fitness is the sum of the scores held.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EncounterHistory {
    scores: VecDeque<i8>,
    capacity: usize,
    sum: i32,
}

impl EncounterHistory {
    pub fn new(capacity: usize) -> Self {
        EncounterHistory { scores: VecDeque::with_capacity(capacity), capacity, sum: 0 }
    }

    pub fn push(&mut self, score: i8) {
        debug_assert!(score == 1 || score == -1);
        if self.capacity == 0 {
            return;
        }
        if self.scores.len() == self.capacity {
            self.sum -= i32::from(self.scores.pop_front().unwrap());
        }
        self.scores.push_back(score);
        self.sum += i32::from(score);
    }

    pub fn fitness(&self) -> i32 {
        self.sum
    }

    pub fn len(&self) -> usize {
        self.scores.len()
    }

    pub fn is_empty(&self) -> bool {
        self.scores.is_empty()
    }

    pub fn capacity(&self) -> usize {
        self.capacity
    }

    pub fn scores(&self) -> impl Iterator<Item = i8> + '_ {
        self.scores.iter().copied()
    }
}

/// Draws `k` indices with replacement and returns the fittest, breaking ties
/// uniformly among the tied draws.
pub fn tournament_by_fitness<R: Rng + ?Sized>(fitness: &[i32], k: usize, rng: &mut R) -> Result<usize> {
    if fitness.is_empty() || k == 0 {
        return Err(Error::Contract("tournament needs a non-empty population and k >= 1".into()));
    }
    let draws: Vec<usize> = (0..k).map(|_| rng.gen_range(0..fitness.len())).collect();
    let best = draws.iter().map(|&i| fitness[i]).max().unwrap();
    let tied: Vec<usize> = draws.into_iter().filter(|&i| fitness[i] == best).collect();
    Ok(if tied.len() == 1 { tied[0] } else { tied[rng.gen_range(0..tied.len())] })
}

/// Selection probability of ranks `1..=n` (worst first):
/// `(2 − bias)/n + 2(r − 1)(bias − 1)/(n(n − 1))`.
pub fn linear_ranking_probabilities(n: usize, bias: f64) -> Vec<f64> {
    if n == 1 {
        return vec![1.0];
    }
    let nf = n as f64;
    (1..=n)
        .map(|r| (2.0 - bias) / nf + 2.0 * (r as f64 - 1.0) * (bias - 1.0) / (nf * (nf - 1.0)))
        .collect()
}

/// Ids ordered worst to best: ascending fitness, equal fitness by ascending id.
pub fn rank_order(fitness: &[i32]) -> Vec<usize> {
    let mut ids: Vec<usize> = (0..fitness.len()).collect();
    ids.sort_by_key(|&i| (fitness[i], i));
    ids
}

/// Linear ranking selection over the given fitness values.
pub fn ranking_by_fitness<R: Rng + ?Sized>(fitness: &[i32], bias: f64, rng: &mut R) -> Result<usize> {
    if fitness.is_empty() {
        return Err(Error::Contract("linear ranking needs at least one candidate".into()));
    }
    if !(1.0..=2.0).contains(&bias) {
        return Err(Error::Param(format!("ranking bias {bias} outside [1, 2]")));
    }
    let order = rank_order(fitness);
    if order.len() == 1 {
        return Ok(order[0]);
    }
    let probs = linear_ranking_probabilities(order.len(), bias);
    let u: f64 = rng.gen();
    let mut acc = 0.0;
    for (rank, p) in probs.iter().enumerate() {
        acc += p;
        if u < acc {
            return Ok(order[rank]);
        }
    }
    Ok(*order.last().unwrap())
}

pub fn linear_ranking_select<R: Rng + ?Sized>(
    histories: &[EncounterHistory],
    bias: f64,
    rng: &mut R,
) -> Result<usize> {
    let fitness: Vec<i32> = histories.iter().map(EncounterHistory::fitness).collect();
    ranking_by_fitness(&fitness, bias, rng)
}
