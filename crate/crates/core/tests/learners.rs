mod common;

use coevo_csp::baselines::{hc_learn, rndi_learn, HcParams, RndiParams};
use coevo_csp::coevo::{learn_weights, run_generation, CoevoParams, CoevoState};
use coevo_csp::{mac_search, ConstraintWeights, HeuristicSpec, SearchLimits};
use common::small_model_d;
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn coevo_params() -> impl Strategy<Value = CoevoParams> {
    (2usize..20, 1usize..12, 0usize..25, 0.0f64..=1.0, 0.0f64..0.1, 1.0f64..=2.0, 1usize..4, 0usize..12, any::<u64>())
        .prop_map(|(pop_size, history_len, encounters_per_gen, crossover_rate, mutation_rate, ranking_bias, tournament_size, generations, seed)| CoevoParams {
            pop_size,
            history_len,
            encounters_per_gen,
            crossover_rate,
            mutation_rate,
            ranking_bias,
            tournament_size,
            generations,
            seed,
        })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(40))]

    #[test]
    fn coevo_fitness_stays_within_history(inst_seed in any::<u64>(), params in coevo_params()) {
        let inst = small_model_d(&mut ChaCha8Rng::seed_from_u64(inst_seed), 8, 4);
        let mut rng = ChaCha8Rng::seed_from_u64(params.seed);
        let mut state = CoevoState::new(&inst, &params, &mut rng).unwrap();
        let bound = params.history_len as i32;
        for _ in 0..params.generations {
            run_generation(&mut state, &params, &inst, &mut rng).unwrap();
            for f in state.solution_fitness().into_iter().chain(state.constraint_fitness()) {
                prop_assert!((-bound..=bound).contains(&f));
            }
        }
        // learn_weights walks the same seeded path
        let w = learn_weights(&inst, &params).unwrap();
        prop_assert_eq!(&w, &state.weights());
        if inst.num_constraints() > 0 {
            prop_assert_eq!(w.as_slice().iter().copied().fold(f64::INFINITY, f64::min), 1.0);
        }
    }

    #[test]
    fn rndi_weights_match_probe_wipeouts(inst_seed in any::<u64>(), restarts in 1usize..8, seed in any::<u64>()) {
        let inst = small_model_d(&mut ChaCha8Rng::seed_from_u64(inst_seed), 8, 4);
        let p = RndiParams { restarts, node_cap_factor: 2, seed, ..Default::default() };
        let learned = rndi_learn(&inst, &p).unwrap();
        prop_assert!(learned.probes.len() < restarts.max(1));
        prop_assert_eq!(learned.weights.excess(), learned.total_wipeouts() as f64);
        let again = rndi_learn(&inst, &p).unwrap();
        prop_assert_eq!(&again.weights, &learned.weights);
        prop_assert!(again.probes.iter().zip(&learned.probes).all(|(a, b)| a.same_run(b)));
    }

    #[test]
    fn hc_weights_match_climb_log(inst_seed in any::<u64>(), total in 1usize..60, cutoff in 1usize..10, seed in any::<u64>()) {
        let inst = small_model_d(&mut ChaCha8Rng::seed_from_u64(inst_seed), 8, 4);
        let learned = hc_learn(&inst, &HcParams { iterations_total: total, cutoff, seed }).unwrap();
        let charged: usize = learned.climbs.iter().map(|c| c.incremented.len()).sum();
        prop_assert_eq!(learned.weights.excess(), charged as f64);
        prop_assert!(learned.steps <= total);
        prop_assert!(learned.climbs.iter().all(|c| c.steps <= cutoff));
        if let Some(sol) = &learned.solution {
            prop_assert!(inst.is_solution(sol).unwrap());
        }
    }

    #[test]
    fn learned_weights_never_change_satisfiability(inst_seed in any::<u64>(), seed in any::<u64>()) {
        let inst = small_model_d(&mut ChaCha8Rng::seed_from_u64(inst_seed), 7, 4);
        let mut plain = ConstraintWeights::uniform(inst.num_constraints());
        let base = mac_search(&inst, HeuristicSpec::Lex, &mut plain, SearchLimits::unlimited(), 0).unwrap();
        let mut learned = learn_weights(&inst, &CoevoParams { generations: 5, seed, ..Default::default() }).unwrap();
        let with = mac_search(&inst, HeuristicSpec::Wdeg, &mut learned, SearchLimits::unlimited(), 0).unwrap();
        prop_assert_eq!(base.outcome.label(), with.outcome.label());
    }
}
