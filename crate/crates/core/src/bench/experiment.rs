use std::io::{Read, Write};
use std::path::PathBuf;
use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::baselines::{hc_learn, rndi_learn, HcParams, RndiParams};
use crate::coevo::{learn_weights, CoevoParams};
use crate::csp::CspInstance;
use crate::error::{Error, Result};
use crate::gen::{gen_geo, gen_model_d, gen_model_rb, GeoParams, ModelDParams, ModelRbParams};
use crate::io::load_instance;
use crate::search::{mac_search, ConstraintWeights, HeuristicSpec, Outcome, SearchLimits};

pub const DEFAULT_RUNS: usize = 50;
pub const DEFAULT_TIMEOUT_SECS: f64 = 1200.0;

/// Columns of the run CSV that hold wall-clock measurements.
pub const WALL_CLOCK_COLUMNS: [&str; 3] = ["learn_time", "search_time", "t"];

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum InstanceSource {
    File { path: PathBuf },
    ModelD(ModelDParams),
    ModelRb(ModelRbParams),
    Geo(GeoParams),
}

impl InstanceSource {
    pub fn load(&self) -> Result<CspInstance> {
        match self {
            InstanceSource::File { path } => load_instance(path),
            InstanceSource::ModelD(p) => gen_model_d(p),
            InstanceSource::ModelRb(p) => Ok(gen_model_rb(p)?.instance),
            InstanceSource::Geo(p) => gen_geo(p),
        }
    }
}

fn wdeg() -> HeuristicSpec {
    HeuristicSpec::Wdeg
}

/// Weight learner (if any) followed by the final MAC search. The `seed`
/// fields inside learner params are replaced by the per-run seed.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Method {
    Coevo {
        #[serde(default)]
        params: CoevoParams,
        #[serde(default = "wdeg")]
        heuristic: HeuristicSpec,
    },
    Rndi {
        #[serde(default)]
        params: RndiParams,
    },
    Hc {
        #[serde(default)]
        params: HcParams,
        #[serde(default = "wdeg")]
        heuristic: HeuristicSpec,
    },
    PlainMac { heuristic: HeuristicSpec },
}

impl Method {
    pub fn coevo(params: CoevoParams) -> Self {
        Method::Coevo { params, heuristic: HeuristicSpec::Wdeg }
    }

    pub fn rndi(params: RndiParams) -> Self {
        Method::Rndi { params }
    }

    pub fn hc(params: HcParams) -> Self {
        Method::Hc { params, heuristic: HeuristicSpec::Wdeg }
    }

    pub fn plain(heuristic: HeuristicSpec) -> Self {
        Method::PlainMac { heuristic }
    }

    /// Heuristic of the final search.
    pub fn final_heuristic(&self) -> HeuristicSpec {
        match self {
            Method::Coevo { heuristic, .. } | Method::Hc { heuristic, .. } => *heuristic,
            Method::Rndi { params } => params.final_heuristic,
            Method::PlainMac { heuristic } => *heuristic,
        }
    }

    /// `coevo+mac`, `rndi+mac`, `hc+mac` or `plain-mac(<heuristic>)`; a
    /// non-default final heuristic is appended as `(<heuristic>)`.
    pub fn label(&self) -> String {
        let h = self.final_heuristic();
        let suffix = if h == HeuristicSpec::Wdeg { String::new() } else { format!("({h})") };
        match self {
            Method::Coevo { .. } => format!("coevo+mac{suffix}"),
            Method::Rndi { .. } => format!("rndi+mac{suffix}"),
            Method::Hc { .. } => format!("hc+mac{suffix}"),
            Method::PlainMac { heuristic } => format!("plain-mac({heuristic})"),
        }
    }

    pub fn validate(&self) -> Result<()> {
        match self {
            Method::Coevo { params, .. } => params.validate(),
            Method::Rndi { params } => params.validate(),
            Method::Hc { params, .. } => params.validate(),
            Method::PlainMac { .. } => Ok(()),
        }
    }

    /// Learned weights for `seed` and the nodes spent learning them.
    pub fn learn(&self, inst: &CspInstance, seed: u64) -> Result<(ConstraintWeights, u64)> {
        match self {
            Method::Coevo { params, .. } => {
                Ok((learn_weights(inst, &CoevoParams { seed, ..params.clone() })?, 0))
            }
            Method::Rndi { params } => {
                let learned = rndi_learn(inst, &RndiParams { seed, ..params.clone() })?;
                let nodes = learned.total_nodes();
                Ok((learned.weights, nodes))
            }
            Method::Hc { params, .. } => {
                Ok((hc_learn(inst, &HcParams { seed, ..params.clone() })?.weights, 0))
            }
            Method::PlainMac { .. } => Ok((ConstraintWeights::uniform(inst.num_constraints()), 0)),
        }
    }
}

fn default_runs() -> usize {
    DEFAULT_RUNS
}

fn default_timeout() -> f64 {
    DEFAULT_TIMEOUT_SECS
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    #[serde(default = "default_runs")]
    pub runs: usize,
    /// Applies to each run's total time, learning included.
    #[serde(default = "default_timeout")]
    pub timeout_secs: f64,
    #[serde(default)]
    pub base_seed: u64,
    /// Optional node cap on the final search.
    #[serde(default)]
    pub node_cap: Option<u64>,
    pub instance: InstanceSource,
    pub method: Method,
}

impl ExperimentConfig {
    pub fn new(instance: InstanceSource, method: Method) -> Self {
        ExperimentConfig {
            runs: DEFAULT_RUNS,
            timeout_secs: DEFAULT_TIMEOUT_SECS,
            base_seed: 0,
            node_cap: None,
            instance,
            method,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.runs == 0 {
            return Err(Error::Param("runs must be at least 1".into()));
        }
        SearchLimits::new(self.node_cap, Some(self.timeout_secs))?;
        self.method.validate()
    }
}

/// Measurements of one run. `n` counts the final search only; nodes spent
/// by RNDI probes are in `learn_nodes`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunRecord {
    pub run: usize,
    pub seed: u64,
    pub method: String,
    pub outcome: String,
    pub n: u64,
    pub wipeouts: u64,
    pub learn_nodes: u64,
    pub learn_time: f64,
    pub search_time: f64,
    pub t: f64,
}

impl RunRecord {
    /// Equality on everything except the wall-clock fields.
    pub fn same_run(&self, other: &RunRecord) -> bool {
        (self.run, self.seed, &self.method, &self.outcome, self.n, self.wipeouts, self.learn_nodes)
            == (other.run, other.seed, &other.method, &other.outcome, other.n, other.wipeouts, other.learn_nodes)
    }
}

/// One pipeline run with seed `base_seed + run`.
pub fn run_once(cfg: &ExperimentConfig, inst: &CspInstance, run: usize) -> Result<RunRecord> {
    let seed = cfg.base_seed.wrapping_add(run as u64);
    let start = Instant::now();
    let (mut weights, learn_nodes) = cfg.method.learn(inst, seed)?;
    let learn_time = start.elapsed().as_secs_f64();
    let mut record = RunRecord {
        run,
        seed,
        method: cfg.method.label(),
        outcome: Outcome::Timeout.label().to_string(),
        n: 0,
        wipeouts: 0,
        learn_nodes,
        learn_time,
        search_time: 0.0,
        t: cfg.timeout_secs,
    };
    let remaining = cfg.timeout_secs - learn_time;
    if remaining <= 0.0 {
        return Ok(record);
    }
    let limits = SearchLimits { node_cap: cfg.node_cap, timeout_secs: Some(remaining) };
    let stats = mac_search(inst, cfg.method.final_heuristic(), &mut weights, limits, seed)?;
    record.outcome = stats.outcome.label().to_string();
    record.n = stats.nodes;
    record.wipeouts = stats.wipeouts;
    record.search_time = stats.elapsed;
    record.t = if stats.outcome == Outcome::Timeout { cfg.timeout_secs } else { learn_time + stats.elapsed };
    Ok(record)
}

pub fn run_experiment(cfg: &ExperimentConfig) -> Result<Vec<RunRecord>> {
    run_experiment_jobs(cfg, 1)
}

/// Runs on up to `jobs` threads; records come back in run order.
pub fn run_experiment_jobs(cfg: &ExperimentConfig, jobs: usize) -> Result<Vec<RunRecord>> {
    cfg.validate()?;
    let inst = cfg.instance.load()?;
    if jobs <= 1 {
        return (0..cfg.runs).map(|r| run_once(cfg, &inst, r)).collect();
    }
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(jobs)
        .build()
        .map_err(|e| Error::Contract(format!("thread pool: {e}")))?;
    pool.install(|| (0..cfg.runs).into_par_iter().map(|r| run_once(cfg, &inst, r)).collect())
}

fn csv_err(e: csv::Error) -> Error {
    match e.into_kind() {
        csv::ErrorKind::Io(io) => Error::from(io),
        other => Error::Parse(format!("csv: {other:?}")),
    }
}

/// Header: `run,seed,method,outcome,n,wipeouts,learn_nodes,learn_time,search_time,t`.
pub fn write_records_csv<W: Write>(out: W, records: &[RunRecord]) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    if records.is_empty() {
        w.write_record(["run", "seed", "method", "outcome", "n", "wipeouts", "learn_nodes", "learn_time", "search_time", "t"])
            .map_err(csv_err)?;
    }
    for r in records {
        w.serialize(r).map_err(csv_err)?;
    }
    w.flush()?;
    Ok(())
}

pub fn records_to_csv(records: &[RunRecord]) -> String {
    let mut buf = Vec::new();
    write_records_csv(&mut buf, records).expect("writing to memory");
    String::from_utf8(buf).expect("csv is utf-8")
}

pub fn read_records_csv<R: Read>(input: R) -> Result<Vec<RunRecord>> {
    csv::Reader::from_reader(input).deserialize().map(|r| r.map_err(csv_err)).collect()
}

/// Numeric values of column `col` from any CSV with a header row, keeping
/// only rows whose column `filter.0` equals `filter.1` when given.
pub fn read_csv_column<R: Read>(input: R, col: &str, filter: Option<(&str, &str)>) -> Result<Vec<f64>> {
    let mut reader = csv::Reader::from_reader(input);
    let headers = reader.headers().map_err(csv_err)?.clone();
    let find = |name: &str| {
        headers.iter().position(|h| h == name).ok_or_else(|| {
            Error::Parse(format!("no column '{name}' (have: {})", headers.iter().collect::<Vec<_>>().join(",")))
        })
    };
    let idx = find(col)?;
    let filter = filter.map(|(name, value)| find(name).map(|i| (i, value))).transpose()?;
    let mut values = Vec::new();
    for (line, row) in reader.records().enumerate() {
        let row = row.map_err(csv_err)?;
        if let Some((i, want)) = filter {
            if row.get(i) != Some(want) {
                continue;
            }
        }
        let cell = row.get(idx).unwrap_or("");
        let v: f64 = cell
            .trim()
            .parse()
            .map_err(|_| Error::Parse(format!("row {}: '{cell}' in column '{col}' is not a number", line + 1)))?;
        values.push(v);
    }
    Ok(values)
}

/// CSV text with the wall-clock columns removed, for byte comparisons.
pub fn strip_wall_clock(csv_text: &str) -> Result<String> {
    let mut reader = csv::Reader::from_reader(csv_text.as_bytes());
    let headers = reader.headers().map_err(csv_err)?.clone();
    let keep: Vec<usize> =
        (0..headers.len()).filter(|&i| !WALL_CLOCK_COLUMNS.contains(&&headers[i])).collect();
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(keep.iter().map(|&i| &headers[i])).map_err(csv_err)?;
    for row in reader.records() {
        let row = row.map_err(csv_err)?;
        w.write_record(keep.iter().map(|&i| &row[i])).map_err(csv_err)?;
    }
    let bytes = w.into_inner().map_err(|e| Error::Io(e.to_string()))?;
    Ok(String::from_utf8(bytes).expect("csv is utf-8"))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::csp::{Domain, Relation};

    fn triangle_file(colours: i64) -> (tempfile::TempDir, InstanceSource) {
        let d = Domain::range(0, colours - 1).unwrap();
        let ne = Relation::not_equal(&d, &d);
        let inst = CspInstance::new(
            "triangle",
            vec![d.clone(); 3],
            vec![((0, 1), ne.clone()), ((1, 2), ne.clone()), ((0, 2), ne)],
        )
        .unwrap();
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("triangle.json");
        std::fs::write(&path, crate::io::serialize_native(&inst)).unwrap();
        (dir, InstanceSource::File { path })
    }

    #[test]
    fn one_run_on_a_satisfiable_instance() {
        let (_dir, src) = triangle_file(3);
        let mut cfg = ExperimentConfig::new(src, Method::plain(HeuristicSpec::Lex));
        cfg.runs = 1;
        let recs = run_experiment(&cfg).unwrap();
        assert_eq!(recs.len(), 1);
        assert_eq!(recs[0].outcome, "sat");
        assert!(recs[0].t >= recs[0].search_time && recs[0].search_time >= 0.0);
    }

    #[test]
    fn lex_on_unsat_triangle_is_constant() {
        let (_dir, src) = triangle_file(2);
        let cfg = ExperimentConfig::new(src, Method::plain(HeuristicSpec::Lex));
        let recs = run_experiment(&cfg).unwrap();
        assert_eq!(recs.len(), 50);
        assert!(recs.iter().all(|r| r.outcome == "unsat" && r.n == recs[0].n));
        assert_eq!(recs.iter().map(|r| r.run).collect::<Vec<_>>(), (0..50).collect::<Vec<_>>());
    }

    #[test]
    fn parallel_runs_match_sequential() {
        let src = InstanceSource::ModelD(ModelDParams { n: 12, d: 4, e: 30, tightness: 0.3, seed: 3 });
        let mut cfg = ExperimentConfig::new(src, Method::coevo(CoevoParams { generations: 2, ..Default::default() }));
        cfg.runs = 6;
        let a = run_experiment(&cfg).unwrap();
        let b = run_experiment_jobs(&cfg, 3).unwrap();
        assert!(a.iter().zip(&b).all(|(x, y)| x.same_run(y)));
        assert_eq!(strip_wall_clock(&records_to_csv(&a)).unwrap(), strip_wall_clock(&records_to_csv(&b)).unwrap());
    }

    #[test]
    fn missing_file_fails_before_running() {
        let cfg = ExperimentConfig::new(
            InstanceSource::File { path: "/nonexistent/x.json".into() },
            Method::plain(HeuristicSpec::Lex),
        );
        assert!(run_experiment(&cfg).is_err());
    }

    #[test]
    fn zero_runs_rejected() {
        let (_dir, src) = triangle_file(3);
        let mut cfg = ExperimentConfig::new(src, Method::plain(HeuristicSpec::Lex));
        cfg.runs = 0;
        assert!(matches!(run_experiment(&cfg), Err(Error::Param(_))));
    }

    #[test]
    fn csv_round_trip_and_columns() {
        let (_dir, src) = triangle_file(2);
        let mut cfg = ExperimentConfig::new(src, Method::rndi(RndiParams { restarts: 3, ..Default::default() }));
        cfg.runs = 3;
        let recs = run_experiment(&cfg).unwrap();
        let text = records_to_csv(&recs);
        assert!(text.starts_with("run,seed,method,outcome,n,wipeouts,learn_nodes,learn_time,search_time,t\n"));
        assert_eq!(read_records_csv(text.as_bytes()).unwrap(), recs);
        let n = read_csv_column(text.as_bytes(), "n", None).unwrap();
        assert_eq!(n, recs.iter().map(|r| r.n as f64).collect::<Vec<_>>());
        assert!(read_csv_column(text.as_bytes(), "nope", None).is_err());
        let only = read_csv_column(text.as_bytes(), "n", Some(("run", "1"))).unwrap();
        assert_eq!(only, vec![recs[1].n as f64]);
        assert!(read_csv_column(text.as_bytes(), "n", Some(("method", "other"))).unwrap().is_empty());
        assert!(strip_wall_clock(&text).unwrap().starts_with("run,seed,method,outcome,n,wipeouts,learn_nodes\n"));
    }

    #[test]
    fn labels() {
        assert_eq!(Method::plain(HeuristicSpec::DomWdeg).label(), "plain-mac(dom_wdeg)");
        assert_eq!(Method::coevo(CoevoParams::default()).label(), "coevo+mac");
        let m = Method::Hc { params: HcParams::default(), heuristic: HeuristicSpec::DomWdeg };
        assert_eq!(m.label(), "hc+mac(dom_wdeg)");
    }
}
