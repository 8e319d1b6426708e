//! Mann-Whitney U test and the Vargha-Delaney A effect size.

use statrs::distribution::{ContinuousCDF, Normal};

use crate::error::{Error, Result};

/// Pooled sample size up to which [`mann_whitney_u`] enumerates the exact
/// permutation distribution.
pub const EXACT_LIMIT: usize = 16;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MannWhitney {
    /// min(U_a, U_b)
    pub u: f64,
    pub u_a: f64,
    pub u_b: f64,
    /// Two-sided p-value.
    pub p: f64,
    pub exact: bool,
}

fn check_samples(a: &[f64], b: &[f64]) -> Result<()> {
    if a.is_empty() || b.is_empty() {
        return Err(Error::Stats("both samples must be non-empty".into()));
    }
    if a.iter().chain(b).any(|x| x.is_nan()) {
        return Err(Error::Stats("samples contain NaN".into()));
    }
    Ok(())
}

/// 1-based ranks with ties sharing their mean rank.
pub fn midranks(values: &[f64]) -> Vec<f64> {
    let mut order: Vec<usize> = (0..values.len()).collect();
    order.sort_by(|&i, &j| values[i].total_cmp(&values[j]));
    let mut ranks = vec![0.0; values.len()];
    let mut start = 0;
    while start < order.len() {
        let mut end = start + 1;
        while end < order.len() && values[order[end]] == values[order[start]] {
            end += 1;
        }
        // positions start..end hold ranks start+1..=end
        let mid = (start + 1 + end) as f64 / 2.0;
        for &i in &order[start..end] {
            ranks[i] = mid;
        }
        start = end;
    }
    ranks
}

fn u_statistics(a: &[f64], b: &[f64]) -> (Vec<f64>, f64, f64) {
    let pooled: Vec<f64> = a.iter().chain(b).copied().collect();
    let ranks = midranks(&pooled);
    let n1 = a.len() as f64;
    let r_a: f64 = ranks[..a.len()].iter().sum();
    let u_a = r_a - n1 * (n1 + 1.0) / 2.0;
    let u_b = n1 * b.len() as f64 - u_a;
    (ranks, u_a, u_b)
}

/// Exact two-sided p-value from the permutation distribution of U_a over all
/// ways of splitting the pooled midranks into groups of |a| and |b|.
pub fn mann_whitney_exact_p(a: &[f64], b: &[f64]) -> Result<f64> {
    check_samples(a, b)?;
    let total = a.len() + b.len();
    if total > 24 {
        return Err(Error::Stats(format!("exact enumeration over {total} values is too large")));
    }
    let (ranks, u_a, _) = u_statistics(a, b);
    let n1 = a.len();
    let offset = (n1 * (n1 + 1)) as f64 / 2.0;
    let mean = (n1 * b.len()) as f64 / 2.0;
    let observed = (u_a - mean).abs();
    let mut extreme = 0u64;
    let mut count = 0u64;
    for mask in 0u32..(1u32 << total) {
        if mask.count_ones() as usize != n1 {
            continue;
        }
        let r: f64 = (0..total).filter(|i| mask >> i & 1 == 1).map(|i| ranks[i]).sum();
        count += 1;
        if ((r - offset) - mean).abs() >= observed - 1e-9 {
            extreme += 1;
        }
    }
    Ok(extreme as f64 / count as f64)
}

/// Two-sided p-value from the normal approximation with continuity
/// correction and tie-corrected variance.
pub fn mann_whitney_normal_p(a: &[f64], b: &[f64]) -> Result<f64> {
    check_samples(a, b)?;
    let (_, u_a, _) = u_statistics(a, b);
    let (n1, n2) = (a.len() as f64, b.len() as f64);
    let n = n1 + n2;
    let mut pooled: Vec<f64> = a.iter().chain(b).copied().collect();
    pooled.sort_by(f64::total_cmp);
    let mut tie_term = 0.0;
    for group in pooled.chunk_by(|x, y| x == y) {
        let t = group.len() as f64;
        tie_term += t * t * t - t;
    }
    let variance = if n > 1.0 { n1 * n2 / 12.0 * ((n + 1.0) - tie_term / (n * (n - 1.0))) } else { 0.0 };
    if variance <= 0.0 {
        return Ok(1.0);
    }
    let z = (((u_a - n1 * n2 / 2.0).abs() - 0.5).max(0.0)) / variance.sqrt();
    let tail = 1.0 - Normal::standard().cdf(z);
    Ok((2.0 * tail).min(1.0))
}

/// U statistics and a two-sided p-value: exact when the pooled size is at
/// most [`EXACT_LIMIT`], normal approximation otherwise.
pub fn mann_whitney_u(a: &[f64], b: &[f64]) -> Result<MannWhitney> {
    check_samples(a, b)?;
    let (_, u_a, u_b) = u_statistics(a, b);
    let exact = a.len() + b.len() <= EXACT_LIMIT;
    let p = if exact { mann_whitney_exact_p(a, b)? } else { mann_whitney_normal_p(a, b)? };
    Ok(MannWhitney { u: u_a.min(u_b), u_a, u_b, p, exact })
}

/// Probability that a value from `a` exceeds one from `b`, ties counted half.
pub fn vargha_delaney_a(a: &[f64], b: &[f64]) -> Result<f64> {
    check_samples(a, b)?;
    let mut wins = 0.0;
    for x in a {
        for y in b {
            if x > y {
                wins += 1.0;
            } else if x == y {
                wins += 0.5;
            }
        }
    }
    Ok(wins / (a.len() * b.len()) as f64)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn separated_triples() {
        let r = mann_whitney_u(&[1.0, 2.0, 3.0], &[4.0, 5.0, 6.0]).unwrap();
        assert_eq!((r.u, r.u_a, r.u_b), (0.0, 0.0, 9.0));
        assert!(r.exact);
        assert_eq!(r.p, 0.1);
    }

    #[test]
    fn identical_samples_are_symmetric() {
        let a = [3.0, 1.0, 4.0, 1.0, 5.0];
        let r = mann_whitney_u(&a, &a).unwrap();
        assert_eq!(r.u_a, 12.5);
        assert_eq!(r.u_b, 12.5);
        assert_eq!(r.p, 1.0);
        assert_eq!(vargha_delaney_a(&a, &a).unwrap(), 0.5);
    }

    #[test]
    fn singletons() {
        let r = mann_whitney_u(&[1.0], &[2.0]).unwrap();
        assert_eq!(r.u, 0.0);
        assert_eq!(r.p, 1.0);
    }

    #[test]
    fn empty_samples_are_errors() {
        assert!(mann_whitney_u(&[], &[1.0]).is_err());
        assert!(vargha_delaney_a(&[1.0], &[]).is_err());
        assert!(mann_whitney_u(&[f64::NAN], &[1.0]).is_err());
    }

    #[test]
    fn a_measure_examples() {
        assert_eq!(vargha_delaney_a(&[1.0, 3.0], &[2.0, 4.0]).unwrap(), 0.25);
        assert_eq!(vargha_delaney_a(&[5.0, 6.0], &[1.0, 2.0, 3.0]).unwrap(), 1.0);
    }

    #[test]
    fn midranks_average_ties() {
        assert_eq!(midranks(&[10.0, 20.0, 10.0, 30.0, 20.0]), vec![1.5, 3.5, 1.5, 5.0, 3.5]);
    }

    #[test]
    fn large_tied_samples_use_the_normal_route() {
        let a = vec![1.0; 50];
        let b = vec![2.0; 50];
        let r = mann_whitney_u(&a, &b).unwrap();
        assert!(!r.exact);
        assert_eq!(r.u, 0.0);
        assert!(r.p < 1e-10);
        assert_eq!(vargha_delaney_a(&a, &b).unwrap(), 0.0);
    }

    #[test]
    fn all_tied_normal_p_is_one() {
        assert_eq!(mann_whitney_normal_p(&[2.0; 20], &[2.0; 20]).unwrap(), 1.0);
    }
}
