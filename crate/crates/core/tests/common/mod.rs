#![allow(dead_code)]

use coevo_csp::gen::{gen_model_d, ModelDParams};
use coevo_csp::{CspInstance, Value};
use rand::Rng;

/// Every total assignment in lexicographic order until `visit` returns true.
fn enumerate(inst: &CspInstance, mut visit: impl FnMut(&[Value]) -> bool) -> bool {
    let n = inst.num_vars();
    let mut idx = vec![0usize; n];
    loop {
        let values: Vec<Value> = (0..n).map(|v| inst.domain(v).value(idx[v])).collect();
        if visit(&values) {
            return true;
        }
        let mut v = n;
        loop {
            if v == 0 {
                return false;
            }
            v -= 1;
            idx[v] += 1;
            if idx[v] < inst.domain(v).len() {
                break;
            }
            idx[v] = 0;
        }
    }
}

fn satisfies(inst: &CspInstance, values: &[Value]) -> bool {
    inst.constraints().iter().all(|c| {
        let (x, y) = c.scope();
        c.relation().allows(values[x], values[y])
    })
}

/// Brute-force satisfiability by checking every relation tuple directly.
pub fn brute_force_sat(inst: &CspInstance) -> bool {
    enumerate(inst, |vals| satisfies(inst, vals))
}

pub fn count_solutions(inst: &CspInstance) -> usize {
    let mut count = 0;
    enumerate(inst, |vals| {
        if satisfies(inst, vals) {
            count += 1;
        }
        false
    });
    count
}

/// Arc-consistency closure by repeated full sweeps over all constraints in
/// both directions until nothing changes. `None` when a domain empties.
pub fn brute_force_ac_closure(inst: &CspInstance, start: &[Vec<Value>]) -> Option<Vec<Vec<Value>>> {
    let mut doms: Vec<Vec<Value>> = start.to_vec();
    loop {
        let mut changed = false;
        for c in inst.constraints() {
            let (x, y) = c.scope();
            let rel = c.relation();
            let keep_x: Vec<Value> =
                doms[x].iter().copied().filter(|&a| doms[y].iter().any(|&b| rel.allows(a, b))).collect();
            if keep_x.len() != doms[x].len() {
                doms[x] = keep_x;
                changed = true;
            }
            let keep_y: Vec<Value> =
                doms[y].iter().copied().filter(|&b| doms[x].iter().any(|&a| rel.allows(a, b))).collect();
            if keep_y.len() != doms[y].len() {
                doms[y] = keep_y;
                changed = true;
            }
        }
        if doms.iter().any(Vec::is_empty) {
            return None;
        }
        if !changed {
            return Some(doms);
        }
    }
}

/// Model D instance with n ≤ `max_n`, d ≤ `max_d`, a uniform edge count and
/// tightness; seeded from `rng`.
pub fn small_model_d<R: Rng>(rng: &mut R, max_n: usize, max_d: usize) -> CspInstance {
    let n = rng.gen_range(2..=max_n);
    let d = rng.gen_range(2..=max_d);
    let e = rng.gen_range(0..=n * (n - 1) / 2);
    let tightness = rng.gen_range(0..=10) as f64 / 10.0;
    gen_model_d(&ModelDParams { n, d, e, tightness, seed: rng.gen() }).expect("valid generator params")
}

/// `round(n·ln d / −ln(1 − t))`: the edge count where the expected number
/// of solutions of a Model D instance is 1.
pub fn threshold_edges(n: usize, d: usize, t: f64) -> usize {
    ((n as f64) * (d as f64).ln() / -(1.0 - t).ln()).round() as usize
}
