use coevo_csp::bench::stats::{mann_whitney_exact_p, mann_whitney_normal_p, midranks};
use coevo_csp::bench::{mann_whitney_u, vargha_delaney_a};
use proptest::prelude::*;

fn sample(max_len: usize) -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec((0i32..10).prop_map(f64::from), 1..=max_len)
}

proptest! {
    #[test]
    fn a_measure_is_antisymmetric(a in sample(30), b in sample(30)) {
        let ab = vargha_delaney_a(&a, &b).unwrap();
        let ba = vargha_delaney_a(&b, &a).unwrap();
        prop_assert_eq!(ab + ba, 1.0);
        prop_assert!((0.0..=1.0).contains(&ab));
    }

    #[test]
    fn u_statistics_sum_to_the_pair_count(a in sample(30), b in sample(30)) {
        let r = mann_whitney_u(&a, &b).unwrap();
        prop_assert_eq!(r.u_a + r.u_b, (a.len() * b.len()) as f64);
        prop_assert_eq!(r.u, r.u_a.min(r.u_b));
        prop_assert!((0.0..=1.0).contains(&r.p));
        // U_a / (|a||b|) is the A measure
        prop_assert!((r.u_a / (a.len() * b.len()) as f64 - vargha_delaney_a(&a, &b).unwrap()).abs() < 1e-12);
    }

    #[test]
    fn p_values_are_symmetric(a in sample(8), b in sample(8)) {
        prop_assert_eq!(mann_whitney_exact_p(&a, &b).unwrap(), mann_whitney_exact_p(&b, &a).unwrap());
        prop_assert_eq!(mann_whitney_normal_p(&a, &b).unwrap(), mann_whitney_normal_p(&b, &a).unwrap());
    }

    #[test]
    fn midranks_sum_to_triangle(xs in sample(40)) {
        let n = xs.len() as f64;
        prop_assert_eq!(midranks(&xs).iter().sum::<f64>(), n * (n + 1.0) / 2.0);
    }
}

/// Exact p by listing every split of the pooled ranks independently of the
/// library (recursive subset walk over U_a values).
fn oracle_exact_p(a: &[f64], b: &[f64]) -> f64 {
    let pooled: Vec<f64> = a.iter().chain(b).copied().collect();
    let ranks: Vec<f64> = pooled
        .iter()
        .map(|x| {
            let below = pooled.iter().filter(|y| *y < x).count() as f64;
            let equal = pooled.iter().filter(|y| *y == x).count() as f64;
            below + (equal + 1.0) / 2.0
        })
        .collect();
    let n1 = a.len();
    let base = (n1 * (n1 + 1)) as f64 / 2.0;
    let mean = (n1 * b.len()) as f64 / 2.0;
    let obs = (ranks[..n1].iter().sum::<f64>() - base - mean).abs();
    fn walk(r: &[f64], k: usize, acc: f64, out: &mut Vec<f64>) {
        if k == 0 {
            out.push(acc);
            return;
        }
        if r.len() < k {
            return;
        }
        walk(&r[1..], k - 1, acc + r[0], out);
        walk(&r[1..], k, acc, out);
    }
    let mut sums = Vec::new();
    walk(&ranks, n1, 0.0, &mut sums);
    let hits = sums.iter().filter(|&&s| (s - base - mean).abs() >= obs - 1e-9).count();
    hits as f64 / sums.len() as f64
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn exact_p_matches_oracle(a in sample(7), b in sample(7)) {
        let lib = mann_whitney_exact_p(&a, &b).unwrap();
        prop_assert!((lib - oracle_exact_p(&a, &b)).abs() < 1e-12);
    }
}

#[test]
fn small_exact_examples() {
    assert_eq!(mann_whitney_u(&[1.0, 2.0, 3.0], &[4.0, 5.0, 6.0]).unwrap().p, 0.1);
    assert_eq!(oracle_exact_p(&[1.0, 2.0, 3.0], &[4.0, 5.0, 6.0]), 0.1);
    assert_eq!(mann_whitney_u(&[1.0], &[2.0]).unwrap().p, 1.0);
    // C(8,4) = 70 splits, two at the extremes
    let r = mann_whitney_u(&[1.0, 2.0, 3.0, 4.0], &[5.0, 6.0, 7.0, 8.0]).unwrap();
    assert!((r.p - 2.0 / 70.0).abs() < 1e-15);
}
