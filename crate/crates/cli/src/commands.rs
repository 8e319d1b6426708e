use std::fmt::{self, Write as _};
use std::io::Write;
use std::path::{Path, PathBuf};
use std::time::Instant;

use coevo_csp::bench::{
    mann_whitney_u, read_csv_column, run_experiment_jobs, summarize, vargha_delaney_a, write_records_csv,
    ExperimentConfig, InstanceSource, Method, DEFAULT_RUNS, DEFAULT_TIMEOUT_SECS,
};
use coevo_csp::baselines::{HcParams, RndiParams};
use coevo_csp::coevo::CoevoParams;
use coevo_csp::gen::{gen_geo, gen_model_d, gen_model_rb, GeoParams, ModelDParams, ModelRbParams};
use coevo_csp::io::{load_instance, serialize_native, write_xcsp};
use coevo_csp::{mac_search, CspInstance, HeuristicSpec, Outcome, SearchLimits};
use serde::Deserialize;

use crate::args::*;

#[derive(Debug)]
pub enum CliError {
    Usage(String),
    Input(String),
    Internal(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => 1,
            CliError::Input(_) => 2,
            CliError::Internal(_) => 3,
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let (kind, msg) = match self {
            CliError::Usage(m) => ("usage", m),
            CliError::Input(m) => ("input", m),
            CliError::Internal(m) => ("internal", m),
        };
        write!(f, "coevo-csp: error[{kind}]: {}", msg.replace('\n', " "))
    }
}

impl From<coevo_csp::Error> for CliError {
    fn from(e: coevo_csp::Error) -> Self {
        match e {
            coevo_csp::Error::Param(_) => CliError::Usage(e.to_string()),
            coevo_csp::Error::Contract(_) => CliError::Internal(e.to_string()),
            _ => CliError::Input(e.to_string()),
        }
    }
}

type CliResult<T> = Result<T, CliError>;

fn io_err(path: &Path, e: impl fmt::Display) -> CliError {
    CliError::Input(format!("{}: {e}", path.display()))
}

struct Ctx {
    data_dir: Option<PathBuf>,
}

impl Ctx {
    fn path(&self, p: &Path) -> PathBuf {
        match &self.data_dir {
            Some(dir) if p.is_relative() => dir.join(p),
            _ => p.to_path_buf(),
        }
    }

    fn load(&self, p: &Path) -> CliResult<CspInstance> {
        let path = self.path(p);
        load_instance(&path).map_err(|e| io_err(&path, e))
    }

    fn write(&self, output: Option<&Path>, text: &str) -> CliResult<()> {
        match output {
            Some(p) => {
                let path = self.path(p);
                std::fs::write(&path, text).map_err(|e| io_err(&path, e))
            }
            None => emit(text),
        }
    }
}

/// Writes to stdout; a closed pipe (e.g. `| head`) is not an error.
fn emit(text: &str) -> CliResult<()> {
    match std::io::stdout().lock().write_all(text.as_bytes()) {
        Err(e) if e.kind() != std::io::ErrorKind::BrokenPipe => Err(CliError::Internal(e.to_string())),
        _ => Ok(()),
    }
}

fn seed_value(s: SeedArg) -> u64 {
    match s {
        SeedArg::Fixed(v) => v,
        SeedArg::Random => {
            let v = rand::random();
            eprintln!("seed: {v}");
            v
        }
    }
}

fn require<T>(v: Option<T>, flag: &str, model: &str) -> CliResult<T> {
    v.ok_or_else(|| CliError::Usage(format!("--model {model} requires {flag}")))
}

pub fn run(cli: Cli) -> CliResult<()> {
    let ctx = Ctx { data_dir: cli.data_dir };
    match cli.command {
        Command::Generate(a) => generate(&ctx, a),
        Command::Solve(a) => solve(&ctx, a),
        Command::LearnWeights(a) => learn(&ctx, a),
        Command::Bench(a) => bench(&ctx, a),
        Command::Stats(a) => stats(&ctx, a),
        Command::Convert(a) => convert(&ctx, a),
    }
}

fn render(inst: &CspInstance, format: Format) -> String {
    match format {
        Format::Native => serialize_native(inst),
        Format::Xcsp => write_xcsp(inst),
    }
}

fn format_for(explicit: Option<Format>, output: Option<&Path>) -> Format {
    explicit.unwrap_or_else(|| match output.and_then(Path::extension) {
        Some(ext) if ext.eq_ignore_ascii_case("xml") => Format::Xcsp,
        _ => Format::Native,
    })
}

fn generate(ctx: &Ctx, a: GenerateArgs) -> CliResult<()> {
    let seed = seed_value(a.seed);
    let mut planted = None;
    let inst = match a.model {
        Model::D => gen_model_d(&ModelDParams {
            n: a.n,
            d: require(a.d, "--d", "d")?,
            e: require(a.e, "--e", "d")?,
            tightness: require(a.t, "--t", "d")?,
            seed,
        })?,
        Model::Rb => {
            let rb = gen_model_rb(&ModelRbParams {
                n: a.n,
                alpha: a.alpha,
                r: a.r,
                p: require(a.p, "--p", "rb")?,
                forced: a.forced,
                seed,
            })?;
            planted = rb.planted;
            rb.instance
        }
        Model::Geo => gen_geo(&GeoParams {
            n: a.n,
            d: require(a.d, "--d", "geo")?,
            distance: require(a.distance, "--distance", "geo")?,
            tightness: require(a.t, "--t", "geo")?,
            seed,
        })?,
    };
    if let Some(path) = &a.planted_out {
        let sol = planted
            .and_then(|p| p.to_values())
            .ok_or_else(|| CliError::Usage("--planted-out needs --model rb --forced".into()))?;
        let text: String = sol.iter().map(|v| format!("{v}\n")).collect();
        ctx.write(Some(path), &text)?;
    }
    let format = format_for(a.format, a.output.as_deref());
    ctx.write(a.output.as_deref(), &render(&inst, format))?;
    if a.output.is_some() {
        eprintln!("generated {} ({} variables, {} constraints, seed {seed})", inst.name(), inst.num_vars(), inst.num_constraints());
    }
    Ok(())
}

fn coevo_params(l: &LearnerArgs) -> CoevoParams {
    let d = CoevoParams::default();
    CoevoParams {
        pop_size: l.pop_size.unwrap_or(d.pop_size),
        history_len: l.history_len.unwrap_or(d.history_len),
        encounters_per_gen: l.encounters.unwrap_or(d.encounters_per_gen),
        crossover_rate: l.crossover_rate.unwrap_or(d.crossover_rate),
        mutation_rate: l.mutation_rate.unwrap_or(d.mutation_rate),
        ranking_bias: l.ranking_bias.unwrap_or(d.ranking_bias),
        tournament_size: l.tournament_size.unwrap_or(d.tournament_size),
        generations: l.generations.unwrap_or(d.generations),
        seed: d.seed,
    }
}

fn rndi_params(l: &LearnerArgs, final_heuristic: HeuristicSpec) -> RndiParams {
    let d = RndiParams::default();
    RndiParams {
        restarts: l.restarts.unwrap_or(d.restarts),
        node_cap_factor: l.node_cap_factor.unwrap_or(d.node_cap_factor),
        final_heuristic,
        seed: d.seed,
    }
}

fn hc_params(l: &LearnerArgs) -> HcParams {
    let d = HcParams::default();
    HcParams {
        iterations_total: l.hc_iterations.unwrap_or(d.iterations_total),
        cutoff: l.hc_cutoff.unwrap_or(d.cutoff),
        seed: d.seed,
    }
}

fn build_method(kind: MethodKind, heuristic: Option<HeuristicSpec>, l: &LearnerArgs) -> Method {
    let learned = heuristic.unwrap_or(HeuristicSpec::Wdeg);
    match kind {
        MethodKind::PlainMac => Method::plain(heuristic.unwrap_or(HeuristicSpec::DomWdeg)),
        MethodKind::Coevo => Method::Coevo { params: coevo_params(l), heuristic: learned },
        MethodKind::Rndi => Method::rndi(rndi_params(l, learned)),
        MethodKind::Hc => Method::Hc { params: hc_params(l), heuristic: learned },
    }
}

/// `kind[:heuristic]` or `kind(heuristic)`.
fn parse_method(text: &str, l: &LearnerArgs) -> CliResult<Method> {
    let (kind, h) = match text.split_once([':', '(']) {
        Some((k, h)) => (k, Some(h.trim_end_matches(')'))),
        None => (text, None),
    };
    let kind = match kind.trim_end_matches("+mac") {
        "plain-mac" | "plain_mac" | "mac" => MethodKind::PlainMac,
        "coevo" => MethodKind::Coevo,
        "rndi" => MethodKind::Rndi,
        "hc" => MethodKind::Hc,
        other => return Err(CliError::Usage(format!("unknown method '{other}' in '{text}'"))),
    };
    let h = h.map(parse_heuristic).transpose().map_err(CliError::Usage)?;
    Ok(build_method(kind, h, l))
}

fn solve(ctx: &Ctx, a: SolveArgs) -> CliResult<()> {
    let inst = ctx.load(&a.instance)?;
    let seed = seed_value(a.seed);
    let method = build_method(a.method, a.heuristic, &a.learner);
    method.validate()?;
    let limits = SearchLimits::new(a.node_cap, a.timeout)?;
    let start = Instant::now();
    let (mut weights, learn_nodes) = method.learn(&inst, seed)?;
    let learn_time = start.elapsed().as_secs_f64();
    let remaining = a.timeout.map(|t| t - learn_time);
    let (outcome, n, wipeouts, search_time) = if remaining.is_some_and(|r| r <= 0.0) {
        (Outcome::Timeout, 0, 0, 0.0)
    } else {
        let limits = SearchLimits { timeout_secs: remaining, ..limits };
        let s = mac_search(&inst, method.final_heuristic(), &mut weights, limits, seed)?;
        (s.outcome, s.nodes, s.wipeouts, s.elapsed)
    };
    let t = match (&outcome, a.timeout) {
        (Outcome::Timeout, Some(limit)) => limit,
        _ => learn_time + search_time,
    };
    let mut out = String::new();
    let _ = writeln!(out, "instance: {}", inst.name());
    let _ = writeln!(out, "method: {}", method.label());
    let _ = writeln!(out, "seed: {seed}");
    let _ = writeln!(out, "outcome: {}", outcome.label());
    let _ = writeln!(out, "t: {t:.6}");
    let _ = writeln!(out, "n: {n}");
    let _ = writeln!(out, "wipeouts: {wipeouts}");
    let _ = writeln!(out, "learn_nodes: {learn_nodes}");
    if a.show_solution {
        if let Outcome::Sat(sol) = &outcome {
            let values = sol.to_values().ok_or_else(|| CliError::Internal("partial solution".into()))?;
            let text: Vec<String> = values.iter().map(i64::to_string).collect();
            let _ = writeln!(out, "solution: {}", text.join(" "));
        }
    }
    emit(&out)
}

fn learn(ctx: &Ctx, a: LearnWeightsArgs) -> CliResult<()> {
    let inst = ctx.load(&a.instance)?;
    let seed = seed_value(a.seed);
    let kind = match a.method {
        LearnerKind::Coevo => MethodKind::Coevo,
        LearnerKind::Rndi => MethodKind::Rndi,
        LearnerKind::Hc => MethodKind::Hc,
    };
    let method = build_method(kind, None, &a.learner);
    method.validate()?;
    let (weights, _) = method.learn(&inst, seed)?;
    let mut out = String::from("constraint,x,y,weight\n");
    for (c, w) in inst.constraints().iter().zip(weights.as_slice()) {
        let (x, y) = c.scope();
        out.push_str(&format!("{},{x},{y},{w}\n", c.id()));
    }
    ctx.write(None, &out)
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct BenchFile {
    runs: Option<usize>,
    timeout_secs: Option<f64>,
    base_seed: Option<u64>,
    node_cap: Option<u64>,
    instance: Option<InstanceSource>,
    #[serde(default)]
    methods: Vec<Method>,
}

fn bench(ctx: &Ctx, a: BenchArgs) -> CliResult<()> {
    let file = match &a.config {
        Some(p) => {
            let path = ctx.path(p);
            let text = std::fs::read_to_string(&path).map_err(|e| io_err(&path, e))?;
            toml::from_str::<BenchFile>(&text).map_err(|e| io_err(&path, e))?
        }
        None => BenchFile::default(),
    };
    let instance = match (a.instance, file.instance) {
        (Some(p), _) => InstanceSource::File { path: ctx.path(&p) },
        (None, Some(InstanceSource::File { path })) => InstanceSource::File { path: ctx.path(&path) },
        (None, Some(src)) => src,
        (None, None) => return Err(CliError::Usage("bench needs --instance or a config with [instance]".into())),
    };
    let methods = if a.methods.is_empty() {
        file.methods
    } else {
        a.methods.iter().map(|m| parse_method(m, &a.learner)).collect::<CliResult<_>>()?
    };
    if methods.is_empty() {
        return Err(CliError::Usage("bench needs at least one --method or [[methods]] entry".into()));
    }
    let labels: Vec<String> = methods.iter().map(Method::label).collect();
    if let Some(dup) = labels.iter().enumerate().find(|(i, l)| labels[..*i].contains(l)) {
        return Err(CliError::Usage(format!("method '{}' listed twice", dup.1)));
    }
    if a.jobs == 0 {
        return Err(CliError::Usage("--jobs must be at least 1".into()));
    }
    let base_seed = match a.seed {
        Some(s) => seed_value(s),
        None => file.base_seed.unwrap_or(DEFAULT_SEED),
    };
    let runs = a.runs.or(file.runs).unwrap_or(DEFAULT_RUNS);
    let timeout_secs = a.timeout.or(file.timeout_secs).unwrap_or(DEFAULT_TIMEOUT_SECS);
    let node_cap = a.node_cap.or(file.node_cap);

    let configs: Vec<ExperimentConfig> = methods
        .into_iter()
        .map(|method| ExperimentConfig { runs, timeout_secs, base_seed, node_cap, instance: instance.clone(), method })
        .collect();
    for cfg in &configs {
        cfg.validate()?;
    }
    // load once up front so a bad instance fails before any run
    instance.load().map_err(|e| match &instance {
        InstanceSource::File { path } => io_err(path, e),
        _ => CliError::from(e),
    })?;

    let mut groups = Vec::new();
    for cfg in &configs {
        eprintln!("running {} x {runs}", cfg.method.label());
        groups.push((cfg.method.label(), run_experiment_jobs(cfg, a.jobs)?));
    }
    let summary = summarize(&groups)?;

    let out_dir = ctx.path(&a.out_dir);
    std::fs::create_dir_all(&out_dir).map_err(|e| io_err(&out_dir, e))?;
    let all: Vec<_> = groups.iter().flat_map(|(_, r)| r.iter().cloned()).collect();
    let runs_path = out_dir.join("runs.csv");
    let file = std::fs::File::create(&runs_path).map_err(|e| io_err(&runs_path, e))?;
    write_records_csv(std::io::BufWriter::new(file), &all)?;
    for (name, text) in [("summary.csv", summary.means_csv()), ("comparisons.csv", summary.comparisons_csv())] {
        let path = out_dir.join(name);
        std::fs::write(&path, text).map_err(|e| io_err(&path, e))?;
    }
    eprintln!("wrote {}", out_dir.display());
    emit(&summary.to_text())
}

fn stats(ctx: &Ctx, a: StatsArgs) -> CliResult<()> {
    let column = |p: &Path, method: Option<&str>| -> CliResult<Vec<f64>> {
        let path = ctx.path(p);
        let file = std::fs::File::open(&path).map_err(|e| io_err(&path, e))?;
        let values = read_csv_column(file, &a.col, method.map(|m| ("method", m))).map_err(|e| io_err(&path, e))?;
        if values.is_empty() {
            return Err(io_err(&path, format!("no values in column '{}'", a.col)));
        }
        Ok(values)
    };
    let xa = column(&a.a, a.method_a.as_deref())?;
    let xb = column(&a.b, a.method_b.as_deref())?;
    let mw = mann_whitney_u(&xa, &xb)?;
    let am = vargha_delaney_a(&xa, &xb)?;
    let mut out = String::new();
    let _ = writeln!(out, "column: {}", a.col);
    let _ = writeln!(out, "size_a: {}", xa.len());
    let _ = writeln!(out, "size_b: {}", xb.len());
    let _ = writeln!(out, "u: {}", mw.u);
    let _ = writeln!(out, "u_a: {}", mw.u_a);
    let _ = writeln!(out, "p: {}", mw.p);
    let _ = writeln!(out, "test: {}", if mw.exact { "exact" } else { "normal" });
    let _ = writeln!(out, "a: {am}");
    let _ = writeln!(out, "significant: {}", mw.p < coevo_csp::bench::SIGNIFICANCE);
    emit(&out)
}

fn convert(ctx: &Ctx, a: ConvertArgs) -> CliResult<()> {
    let inst = ctx.load(&a.input)?;
    ctx.write(a.output.as_deref(), &render(&inst, a.to))
}
