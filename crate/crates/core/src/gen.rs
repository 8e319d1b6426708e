//! Seeded random binary CSP generators: Model D, forced-satisfiable Model RB,
//! and geometric (quasi-random) instances.
//!
//! Tightness is always the fraction of value pairs a relation forbids. All
//! derived counts use round-half-up.

use rand::seq::index::sample;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::csp::{Assignment, CspInstance, Domain, Relation, Value};
use crate::error::{Error, Result};

pub fn round_half_up(x: f64) -> usize {
    (x + 0.5).floor() as usize
}

fn max_pairs(n: usize) -> usize {
    n * n.saturating_sub(1) / 2
}

/// Maps a linear index in `0..n(n−1)/2` to the pair `(i, j)`, `i < j`,
/// enumerated row by row.
fn pair_at(n: usize, mut k: usize) -> (usize, usize) {
    let mut i = 0;
    loop {
        let row = n - 1 - i;
        if k < row {
            return (i, i + 1 + k);
        }
        k -= row;
        i += 1;
    }
}

fn distinct_pairs<R: Rng>(rng: &mut R, n: usize, e: usize) -> Vec<(usize, usize)> {
    let mut picked: Vec<usize> = sample(rng, max_pairs(n), e).into_vec();
    picked.sort_unstable();
    picked.into_iter().map(|k| pair_at(n, k)).collect()
}

/// `count` distinct tuples of `d × d`, skipping `exclude` when given.
fn forbidden_tuples<R: Rng>(
    rng: &mut R,
    d: usize,
    count: usize,
    exclude: Option<(usize, usize)>,
) -> Relation {
    let total = d * d;
    let skip = exclude.map(|(a, b)| a * d + b);
    let pool = total - usize::from(skip.is_some());
    let tuples = sample(rng, pool, count).into_iter().map(|mut k| {
        if let Some(s) = skip {
            if k >= s {
                k += 1;
            }
        }
        ((k / d) as Value, (k % d) as Value)
    });
    Relation::conflicts(tuples)
}

fn value_domain(d: usize) -> Domain {
    Domain::range(0, d as Value - 1).expect("d >= 1")
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModelDParams {
    pub n: usize,
    pub d: usize,
    pub e: usize,
    pub tightness: f64,
    pub seed: u64,
}

impl ModelDParams {
    pub fn forbidden_per_relation(&self) -> usize {
        round_half_up(self.tightness * (self.d * self.d) as f64)
    }

    /// `rand-2-<n>-<d>-<e>-<1000·t>-<seed>`
    pub fn instance_name(&self) -> String {
        format!(
            "rand-2-{}-{}-{}-{}-{}",
            self.n,
            self.d,
            self.e,
            round_half_up(self.tightness * 1000.0),
            self.seed
        )
    }
}

fn check_tightness(name: &str, t: f64) -> Result<()> {
    if !(0.0..=1.0).contains(&t) {
        return Err(Error::Param(format!("{name} {t} outside [0, 1]")));
    }
    Ok(())
}

/// Model D: `e` distinct variable pairs, each relation forbidding
/// `round(t·d²)` distinct tuples.
pub fn gen_model_d(p: &ModelDParams) -> Result<CspInstance> {
    if p.n == 0 || p.d == 0 {
        return Err(Error::Param("n and d must be at least 1".into()));
    }
    if p.e > max_pairs(p.n) {
        return Err(Error::Param(format!(
            "e = {} exceeds the {} variable pairs available for n = {}",
            p.e,
            max_pairs(p.n),
            p.n
        )));
    }
    check_tightness("tightness", p.tightness)?;
    let mut rng = ChaCha8Rng::seed_from_u64(p.seed);
    let k = p.forbidden_per_relation();
    let constraints = distinct_pairs(&mut rng, p.n, p.e)
        .into_iter()
        .map(|scope| (scope, forbidden_tuples(&mut rng, p.d, k, None)))
        .collect();
    CspInstance::new(p.instance_name(), vec![value_domain(p.d); p.n], constraints)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModelRbParams {
    pub n: usize,
    pub alpha: f64,
    pub r: f64,
    pub p: f64,
    pub forced: bool,
    pub seed: u64,
}

impl ModelRbParams {
    pub fn domain_size(&self) -> usize {
        round_half_up((self.n as f64).powf(self.alpha))
    }

    pub fn num_constraints(&self) -> usize {
        let n = self.n as f64;
        round_half_up(self.r * n * n.ln())
    }

    pub fn forbidden_per_relation(&self) -> usize {
        let d = self.domain_size();
        round_half_up(self.p * (d * d) as f64)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RbInstance {
    pub instance: CspInstance,
    /// The hidden solution, when forced.
    pub planted: Option<Assignment>,
}

/// Model RB with `d = round(n^α)` and `e = round(r·n·ln n)`. When forced, a
/// planted assignment is drawn first and its tuple is never forbidden.
pub fn gen_model_rb(p: &ModelRbParams) -> Result<RbInstance> {
    if p.n < 2 || p.alpha.is_nan() || p.alpha <= 0.0 || p.r.is_nan() || p.r <= 0.0 {
        return Err(Error::Param("Model RB needs n >= 2, alpha > 0 and r > 0".into()));
    }
    if !(p.p > 0.0 && p.p < 1.0) {
        return Err(Error::Param(format!("tightness p = {} outside (0, 1)", p.p)));
    }
    let d = p.domain_size();
    let e = p.num_constraints();
    let k = p.forbidden_per_relation();
    if d < 2 {
        return Err(Error::Param(format!("domain size round(n^alpha) = {d} is below 2")));
    }
    if e > max_pairs(p.n) {
        return Err(Error::Param(format!("e = {e} exceeds the {} variable pairs", max_pairs(p.n))));
    }
    if p.forced && k > d * d - 1 {
        return Err(Error::Param(format!(
            "cannot forbid {k} of {} tuples and keep the planted one",
            d * d
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(p.seed);
    let planted: Option<Vec<usize>> =
        p.forced.then(|| (0..p.n).map(|_| rng.gen_range(0..d)).collect());
    let constraints = distinct_pairs(&mut rng, p.n, e)
        .into_iter()
        .map(|(x, y)| {
            let exclude = planted.as_ref().map(|s| (s[x], s[y]));
            ((x, y), forbidden_tuples(&mut rng, d, k, exclude))
        })
        .collect();
    let name = format!("frb{}-{}-{}", p.n, d, p.seed);
    let instance = CspInstance::new(name, vec![value_domain(d); p.n], constraints)?;
    let planted = planted.map(|s| Assignment::total(s.into_iter().map(|v| v as Value)));
    Ok(RbInstance { instance, planted })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GeoParams {
    pub n: usize,
    pub d: usize,
    pub distance: f64,
    pub tightness: f64,
    pub seed: u64,
}

/// Geometric instances: one uniform point in the unit square per variable, a
/// constraint for every pair within `distance`.
pub fn gen_geo(p: &GeoParams) -> Result<CspInstance> {
    let mut rng = ChaCha8Rng::seed_from_u64(p.seed);
    let points: Vec<(f64, f64)> = (0..p.n).map(|_| (rng.gen::<f64>(), rng.gen::<f64>())).collect();
    let name = format!(
        "geo-{}-{}-{}-{}-{}",
        p.n,
        p.d,
        round_half_up(p.distance * 1000.0),
        round_half_up(p.tightness * 1000.0),
        p.seed
    );
    geo_from_points(&name, &points, p.d, p.distance, p.tightness, &mut rng)
}

/// Geometric construction over given points; relations are drawn from `rng`.
pub fn geo_from_points<R: Rng>(
    name: &str,
    points: &[(f64, f64)],
    d: usize,
    distance: f64,
    tightness: f64,
    rng: &mut R,
) -> Result<CspInstance> {
    if d == 0 {
        return Err(Error::Param("d must be at least 1".into()));
    }
    if !(0.0..=std::f64::consts::SQRT_2).contains(&distance) {
        return Err(Error::Param(format!("distance {distance} outside [0, sqrt(2)]")));
    }
    check_tightness("tightness", tightness)?;
    let k = round_half_up(tightness * (d * d) as f64);
    let mut constraints = Vec::new();
    for i in 0..points.len() {
        for j in i + 1..points.len() {
            let (dx, dy) = (points[i].0 - points[j].0, points[i].1 - points[j].1);
            if (dx * dx + dy * dy).sqrt() <= distance {
                constraints.push(((i, j), forbidden_tuples(rng, d, k, None)));
            }
        }
    }
    CspInstance::new(name, vec![value_domain(d); points.len()], constraints)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn pair_indexing_covers_all_pairs() {
        let n = 6;
        let pairs: Vec<_> = (0..max_pairs(n)).map(|k| pair_at(n, k)).collect();
        let mut expected = Vec::new();
        for i in 0..n {
            for j in i + 1..n {
                expected.push((i, j));
            }
        }
        assert_eq!(pairs, expected);
    }

    #[test]
    fn model_d_table_family_shape() {
        let p = ModelDParams { n: 40, d: 8, e: 753, tightness: 0.1, seed: 0 };
        let inst = gen_model_d(&p).unwrap();
        assert_eq!(inst.name(), "rand-2-40-8-753-100-0");
        assert_eq!(inst.num_constraints(), 753);
        for c in inst.constraints() {
            assert_eq!(c.relation().tuples.len(), 6);
            assert_eq!(c.allowed_count(), 58);
        }
    }

    #[test]
    fn model_d_extreme_tightness() {
        let loose = gen_model_d(&ModelDParams { n: 5, d: 3, e: 10, tightness: 0.0, seed: 1 }).unwrap();
        assert!(loose.is_solution(&Assignment::total([0, 1, 2, 0, 1])).unwrap());
        let tight = gen_model_d(&ModelDParams { n: 5, d: 3, e: 1, tightness: 1.0, seed: 1 }).unwrap();
        assert!(tight.constraints().iter().all(|c| c.allowed_count() == 0));
    }

    #[test]
    fn model_d_rejects_too_many_constraints() {
        assert!(gen_model_d(&ModelDParams { n: 4, d: 2, e: 7, tightness: 0.5, seed: 0 }).is_err());
        assert!(gen_model_d(&ModelDParams { n: 4, d: 2, e: 2, tightness: 1.5, seed: 0 }).is_err());
    }

    #[test]
    fn model_rb_frb56_shape() {
        let p = ModelRbParams {
            n: 56,
            alpha: 25f64.ln() / 56f64.ln(),
            r: 0.7,
            p: 0.25,
            forced: true,
            seed: 3,
        };
        assert_eq!(p.domain_size(), 25);
        assert_eq!(p.forbidden_per_relation(), 156);
        let rb = gen_model_rb(&p).unwrap();
        assert_eq!(rb.instance.num_constraints(), p.num_constraints());
        assert!(rb.instance.constraints().iter().all(|c| c.relation().tuples.len() == 156));
        assert!(rb.instance.is_solution(rb.planted.as_ref().unwrap()).unwrap());
    }

    #[test]
    fn model_rb_forced_rejects_full_relations() {
        let p = ModelRbParams { n: 10, alpha: 0.5, r: 0.5, p: 0.99, forced: true, seed: 0 };
        // d = round(sqrt 10) = 3, round(0.99 * 9) = 9 > 8
        assert!(gen_model_rb(&p).is_err());
        assert!(gen_model_rb(&ModelRbParams { forced: false, ..p }).is_ok());
    }

    #[test]
    fn model_rb_tiny_p_forbids_nothing() {
        let p = ModelRbParams { n: 12, alpha: 0.6, r: 0.5, p: 0.001, forced: false, seed: 4 };
        let rb = gen_model_rb(&p).unwrap();
        assert!(rb.instance.constraints().iter().all(|c| c.relation().tuples.is_empty()));
        assert!(rb.planted.is_none());
    }

    #[test]
    fn geo_distance_extremes() {
        let full = gen_geo(&GeoParams { n: 9, d: 3, distance: std::f64::consts::SQRT_2, tightness: 0.3, seed: 2 })
            .unwrap();
        assert_eq!(full.num_constraints(), 36);
        let none = gen_geo(&GeoParams { n: 9, d: 3, distance: 0.0, tightness: 0.3, seed: 2 }).unwrap();
        assert_eq!(none.num_constraints(), 0);
        assert!(gen_geo(&GeoParams { n: 3, d: 3, distance: 1.5, tightness: 0.3, seed: 2 }).is_err());
    }

    #[test]
    fn geo_fixed_points() {
        // distances: 0.5, sqrt 2, sqrt(1.25) = 1.118
        let pts = [(0.0, 0.0), (0.0, 0.5), (1.0, 1.0)];
        let inst = geo_from_points("g", &pts, 4, 0.6, 0.25, &mut ChaCha8Rng::seed_from_u64(0)).unwrap();
        assert_eq!(inst.num_constraints(), 1);
        assert_eq!(inst.constraint(0).scope(), (0, 1));
        assert_eq!(inst.constraint(0).relation().tuples.len(), 4);
    }

    #[test]
    fn generators_are_seed_deterministic() {
        let p = ModelDParams { n: 12, d: 4, e: 30, tightness: 0.35, seed: 17 };
        assert_eq!(gen_model_d(&p).unwrap(), gen_model_d(&p).unwrap());
        let q = ModelDParams { seed: 18, ..p };
        assert_ne!(gen_model_d(&q).unwrap().constraints(), gen_model_d(&ModelDParams { seed: 17, ..q }).unwrap().constraints());
    }
}
