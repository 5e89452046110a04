use std::fs;
use std::path::{Path, PathBuf};
use std::time::{SystemTime, UNIX_EPOCH};

use serde::Serialize;

use super::output::{num, opt_num, write_json, Table};
use super::{
    CommandConfig, ErrorModeConfig, ExperimentConfig, Finding, FindingKind, OutputDigest,
    RunRecord, SubsetConfig, MANIFEST_FILE, SCHEMA_VERSION,
};
use crate::capacity::{
    capacity_curve, cardinality_comparison, wtc1_ss_capacity_with, wtc2_ss_capacity_with,
    CapacityMethod, CapacityResult, OptimizerConfig,
};
use crate::error::{Error, Result};
use crate::exponents::ExponentParams;
use crate::probability::json::{load_channel, load_joint, load_pmf, read_json};
use crate::probability::{sequence_count, Channel, JointPmf, Pmf};
use crate::rng::derive_seed;
use crate::softcover::{ensemble_experiment, size_exponent, EnsembleConfig, NSummary, SoftCoveringModel};
use crate::wiretap::{
    binomial, build_wiretap_code, error_probabilities, expurgate, observed_count, sanov_bound,
    sanov_crossover, ss_metric_wtc1, ss_metric_wtc2, ErrorMode, ErrorReport, LeakageReport,
    SanovBound, SubsetLeakage, SubsetMode,
};

#[derive(Default)]
struct Findings(Vec<Finding>);

impl Findings {
    fn invalid(&mut self, field: &str, message: impl Into<String>) {
        self.0.push(Finding {
            field: field.to_string(),
            message: message.into(),
            kind: FindingKind::Invalid,
            needed: None,
            limit: None,
        });
    }

    fn check(&mut self, ok: bool, field: &str, message: impl Into<String>) {
        if !ok {
            self.invalid(field, message);
        }
    }

    fn cap(&mut self, field: &str, message: impl Into<String>, needed: u128, limit: u64) {
        self.0.push(Finding {
            field: field.to_string(),
            message: message.into(),
            kind: FindingKind::Cap,
            needed: Some(needed),
            limit: Some(limit as u128),
        });
    }

    fn load<T>(&mut self, field: &str, path: &Path, loader: fn(&Path) -> Result<T>) -> Option<T> {
        match loader(path) {
            Ok(v) => Some(v),
            Err(e) => {
                self.invalid(field, e.to_string());
                None
            }
        }
    }
}

fn pow(base: usize, exp: usize) -> u128 {
    (base as u128).saturating_pow(exp.min(u32::MAX as usize) as u32)
}

enum Inputs {
    Joint(JointPmf),
    Capacity {
        main: Channel,
        eave: Option<Channel>,
    },
    Wiretap {
        main: Channel,
        eave: Option<Channel>,
        input: Pmf,
        prefix: Option<Channel>,
    },
}

/// Every problem with `config`, including predicted cap overruns. Input files
/// are loaded and parsed; nothing is computed.
pub fn validate(config: &ExperimentConfig) -> Vec<Finding> {
    prepare(config).0
}

fn prepare(config: &ExperimentConfig) -> (Vec<Finding>, Option<Inputs>) {
    let mut f = Findings::default();
    f.check(config.threads != Some(0), "threads", "must be >= 1");
    f.check(config.cap_dense > 0, "cap_dense", "must be >= 1");
    f.check(config.cap_subsets > 0, "cap_subsets", "must be >= 1");
    let cap = config.cap_dense;
    let inputs = match &config.command {
        CommandConfig::Exponents { joint, rate, delta, n } => {
            f.check(rate.is_finite() && *rate >= 0.0, "rate", format!("{rate} must be finite and >= 0"));
            f.check(delta.is_finite() && *delta >= 0.0, "delta", format!("{delta} must be finite and >= 0"));
            f.check(*n != Some(0), "n", "blocklength must be >= 1");
            f.load("joint", joint, load_joint).map(Inputs::Joint)
        }
        CommandConfig::Softcover { joint, rate, delta, n, trials, split } => {
            let rate_ok = rate.is_finite() && *rate > 0.0;
            f.check(rate_ok, "rate", format!("{rate} must be finite and > 0"));
            f.check(delta.is_finite() && *delta >= 0.0, "delta", format!("{delta} must be finite and >= 0"));
            f.check(!n.is_empty(), "n", "no blocklengths given");
            f.check(n.iter().all(|&k| k >= 1), "n", "blocklengths must be >= 1");
            f.check(*trials >= 1, "trials", "must be >= 1");
            let j = f.load("joint", joint, load_joint);
            if let (Some(j), true) = (&j, rate_ok) {
                softcover_caps(&mut f, j, *rate, n, *split, cap);
            }
            j.map(Inputs::Joint)
        }
        CommandConfig::Capacity { main, eave, alpha, u_card, grid, compare_cardinality, .. } => {
            let modes = [eave.is_some(), alpha.is_some(), grid.is_some()];
            f.check(
                modes.iter().filter(|&&b| b).count() == 1,
                "alpha",
                "give exactly one of --eave, --alpha or --grid",
            );
            if let Some(a) = alpha {
                f.check((0.0..=1.0).contains(a), "alpha", format!("{a} is not in [0, 1]"));
            }
            if let Some(g) = grid {
                f.check(!g.is_empty(), "grid", "empty");
                f.check(g.iter().all(|a| (0.0..=1.0).contains(a)), "grid", "points must lie in [0, 1]");
                f.check(g.windows(2).all(|w| w[1] > w[0]), "grid", "must be strictly increasing");
                f.check(!compare_cardinality, "compare_cardinality", "not available for curves");
            }
            f.check(*u_card != Some(0), "u_card", "must be >= 1");
            f.check(
                !(*compare_cardinality && u_card.is_some()),
                "u_card",
                "the comparison uses |X| and |X| - 1; drop --u-card",
            );
            let m = f.load("main", main, load_channel);
            let e = eave.as_ref().and_then(|p| f.load("eave", p, load_channel));
            if let (Some(m), Some(e)) = (&m, &e) {
                f.check(e.input_len() == m.input_len(), "eave", "input alphabet size differs from main");
            }
            match (m, eave.is_some(), e) {
                (Some(main), false, _) => Some(Inputs::Capacity { main, eave: None }),
                (Some(main), true, Some(e)) => Some(Inputs::Capacity { main, eave: Some(e) }),
                _ => None,
            }
        }
        CommandConfig::Wiretap {
            main,
            eave,
            alpha,
            input,
            prefix,
            n,
            rate,
            rtilde,
            eps,
            mode,
            subsets,
            expurgate,
            sanov_beta,
            sanov_threshold,
        } => {
            f.check(*n >= 1, "n", "blocklength must be >= 1");
            let rates_ok = rate.is_finite() && *rate > 0.0 && rtilde.is_finite() && *rtilde > 0.0;
            f.check(rate.is_finite() && *rate > 0.0, "rate", format!("{rate} must be finite and > 0"));
            f.check(rtilde.is_finite() && *rtilde > 0.0, "rtilde", format!("{rtilde} must be finite and > 0"));
            f.check(eps.is_finite() && *eps >= 0.0, "eps", format!("{eps} must be finite and >= 0"));
            f.check(eave.is_some() != alpha.is_some(), "alpha", "give exactly one of --eave or --alpha");
            if let Some(a) = alpha {
                f.check((0.0..=1.0).contains(a), "alpha", format!("{a} is not in [0, 1]"));
            }
            if let ErrorModeConfig::MonteCarlo { trials } = mode {
                f.check(*trials >= 1, "mode", "Monte Carlo needs at least one trial");
            }
            if let SubsetConfig::Sampled { count } = subsets {
                f.check(*count >= 1, "subsets", "sample count must be >= 1");
            }
            if let Some(b) = sanov_beta {
                match alpha {
                    Some(a) => f.check((0.0..*a).contains(b), "sanov_beta", format!("{b} must lie in [0, alpha = {a})")),
                    None => f.invalid("sanov_beta", "needs --alpha"),
                }
            }
            f.check(
                sanov_threshold.is_finite() && *sanov_threshold > 0.0,
                "sanov_threshold",
                "must be finite and > 0",
            );
            let m = f.load("main", main, load_channel);
            let e = eave.as_ref().and_then(|p| f.load("eave", p, load_channel));
            let pre = prefix.as_ref().and_then(|p| f.load("prefix", p, load_channel));
            let inp = input.as_ref().and_then(|p| f.load("input", p, load_pmf));
            let loaded = m.is_some()
                && (eave.is_none() || e.is_some())
                && (prefix.is_none() || pre.is_some())
                && (input.is_none() || inp.is_some());
            if !loaded {
                None
            } else {
                let main = m.expect("loaded");
                let x_len = main.input_len();
                if let Some(e) = &e {
                    f.check(e.input_len() == x_len, "eave", "input alphabet size differs from main");
                }
                if let Some(p) = &pre {
                    f.check(p.output_len() == x_len, "prefix", "output alphabet size differs from the main input");
                }
                let code_len = pre.as_ref().map_or(x_len, |p| p.input_len());
                let inp = inp.unwrap_or_else(|| Pmf::uniform(code_len));
                f.check(inp.len() == code_len, "input", "alphabet size differs from the codeword alphabet");
                if *n >= 1 && rates_ok {
                    let caps = WiretapCaps {
                        n: *n,
                        rate: *rate,
                        rtilde: *rtilde,
                        code_len,
                        y_len: main.output_len(),
                        x_len,
                        cap,
                        cap_subsets: config.cap_subsets,
                    };
                    caps.check(&mut f, e.as_ref(), *alpha, mode, subsets, *expurgate);
                }
                Some(Inputs::Wiretap { main, eave: e, input: inp, prefix: pre })
            }
        }
    };
    (f.0, inputs)
}

fn softcover_caps(f: &mut Findings, j: &JointPmf, rate: f64, ns: &[usize], split: bool, cap: u64) {
    let (qu, ch) = j.split();
    let (ku, kv) = (qu.len(), ch.output_len());
    let min_support = qu
        .support()
        .iter()
        .map(|&u| ch.row(u).iter().filter(|&&p| p > 0.0).count())
        .min()
        .unwrap_or(1);
    for &n in ns.iter().filter(|&&n| n >= 1) {
        if sequence_count(ku, n).is_none() {
            f.invalid("n", format!("n = {n}: |U|^n overflows 64-bit sequence indices"));
            continue;
        }
        let k = size_exponent(n, rate);
        let size = 1u128 << k.min(127);
        if k >= 63 || size > cap as u128 {
            f.cap("n", format!("n = {n}: codebook of 2^{k} codewords exceeds --cap-dense"), size, cap);
            continue;
        }
        let v_total = pow(kv, n);
        if v_total > cap as u128 {
            let sparse_min = size.saturating_mul(pow(min_support, n));
            if sparse_min > cap as u128 || sequence_count(kv, n).is_none() {
                f.cap(
                    "n",
                    format!("n = {n}: |V|^n = {v_total} entries, and the sparse support needs at least {sparse_min}"),
                    v_total.min(sparse_min),
                    cap,
                );
            } else if split {
                f.cap("split", format!("n = {n}: the split enumerates |V|^n = {v_total} entries"), v_total, cap);
            }
        }
    }
}

struct WiretapCaps {
    n: usize,
    rate: f64,
    rtilde: f64,
    code_len: usize,
    y_len: usize,
    x_len: usize,
    cap: u64,
    cap_subsets: u64,
}

impl WiretapCaps {
    fn check(
        &self,
        f: &mut Findings,
        eave: Option<&Channel>,
        alpha: Option<f64>,
        mode: &ErrorModeConfig,
        subsets: &SubsetConfig,
        expurgate: bool,
    ) {
        let (n, cap) = (self.n, self.cap);
        if sequence_count(self.code_len, n).is_none() {
            f.invalid("n", "codeword space overflows 64-bit sequence indices");
            return;
        }
        let km = size_exponent(n, self.rate);
        let kw = size_exponent(n, self.rtilde);
        let pairs = 1u128 << (km + kw).min(127);
        if km >= 32 || kw >= 32 || pairs > cap as u128 {
            f.cap("rate", format!("|M||W| = 2^{} codewords exceeds --cap-dense", km + kw), pairs, cap);
            return;
        }
        if *mode == ErrorModeConfig::Exact {
            let y = pow(self.y_len, n);
            if y > cap as u128 {
                f.cap("mode", format!("exact errors enumerate |Y|^n = {y} outputs; use --mode mc:TRIALS"), y, cap);
            }
        }
        if let Some(e) = eave {
            let z = pow(e.output_len(), n);
            if z > cap as u128 {
                f.cap("eave", format!("leakage enumerates |Z|^n = {z} outputs"), z, cap);
            }
        }
        if let Some(a) = alpha.filter(|a| (0.0..=1.0).contains(a)) {
            let mu = observed_count(a, n);
            let xs = pow(self.x_len, mu);
            if xs > cap as u128 {
                f.cap("alpha", format!("each subset enumerates |X|^mu = {xs} observations"), xs, cap);
            }
            if *subsets == SubsetConfig::Exhaustive {
                let messages = 1u128 << km;
                let messages = if expurgate && messages > 1 { messages.div_ceil(2) } else { messages };
                let evals = binomial(n, mu).saturating_mul(messages);
                if evals > self.cap_subsets as u128 {
                    f.cap(
                        "subsets",
                        format!("C({n},{mu}) x |M| = {evals} evaluations; use --subsets sampled:K"),
                        evals,
                        self.cap_subsets,
                    );
                }
            }
        }
    }
}

fn findings_error(findings: &[Finding]) -> Option<Error> {
    let invalid: Vec<&Finding> = findings.iter().filter(|f| f.kind == FindingKind::Invalid).collect();
    if !invalid.is_empty() {
        let fields: Vec<&str> = invalid.iter().map(|f| f.field.as_str()).collect();
        let messages: Vec<String> = invalid.iter().map(|f| format!("{}: {}", f.field, f.message)).collect();
        return Some(Error::validation(fields.join(", "), messages.join("; ")));
    }
    findings
        .iter()
        .find(|f| f.kind == FindingKind::Cap)
        .map(|f| Error::cap(format!("{} ({})", f.field, f.message), f.needed.unwrap_or(0), f.limit.unwrap_or(0)))
}

fn now_ms() -> u128 {
    SystemTime::now().duration_since(UNIX_EPOCH).map_or(0, |d| d.as_millis())
}

#[cfg(feature = "parallel")]
fn with_threads<T: Send>(threads: Option<usize>, f: impl FnOnce() -> T + Send) -> Result<T> {
    match threads {
        None => Ok(f()),
        Some(k) => {
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(k)
                .build()
                .map_err(|e| Error::validation("threads", e.to_string()))?;
            Ok(pool.install(f))
        }
    }
}

#[cfg(not(feature = "parallel"))]
fn with_threads<T: Send>(_threads: Option<usize>, f: impl FnOnce() -> T + Send) -> Result<T> {
    Ok(f())
}

/// Validates, dispatches, writes every output into `config.out` and finally the
/// manifest. Output bytes depend only on the configuration and seed.
pub fn run(config: &ExperimentConfig) -> Result<RunRecord> {
    let started = now_ms();
    let (findings, inputs) = prepare(config);
    if let Some(e) = findings_error(&findings) {
        return Err(e);
    }
    let inputs = inputs.ok_or_else(|| Error::validation("config", "inputs could not be loaded"))?;
    let dir = &config.out;
    fs::create_dir_all(dir).map_err(|source| Error::Io {
        path: dir.display().to_string(),
        source,
    })?;
    let outputs = with_threads(config.threads, || dispatch(config, inputs, dir))??;
    let record = RunRecord {
        schema_version: SCHEMA_VERSION,
        tool_version: env!("CARGO_PKG_VERSION").to_string(),
        config: config.clone(),
        started_unix_ms: started,
        finished_unix_ms: now_ms(),
        outputs,
    };
    write_json(dir, MANIFEST_FILE, &record)?;
    Ok(record)
}

#[derive(Serialize)]
struct Envelope<'a, T: Serialize> {
    schema_version: u32,
    subcommand: &'static str,
    seed: u64,
    seed_generated: bool,
    parameters: &'a CommandConfig,
    result: T,
}

fn envelope<'a, T: Serialize>(config: &'a ExperimentConfig, result: T) -> Envelope<'a, T> {
    Envelope {
        schema_version: SCHEMA_VERSION,
        subcommand: config.command.name(),
        seed: config.seed,
        seed_generated: config.seed_generated,
        parameters: &config.command,
        result,
    }
}

fn method_name(m: CapacityMethod) -> &'static str {
    match m {
        CapacityMethod::Anchor0 => "anchor0",
        CapacityMethod::Anchor1 => "anchor1",
        CapacityMethod::Ascent => "ascent",
        CapacityMethod::Grid => "grid",
    }
}

fn dispatch(config: &ExperimentConfig, inputs: Inputs, dir: &Path) -> Result<Vec<OutputDigest>> {
    let seed = config.seed;
    let cap = config.cap_dense;
    let mut out = Vec::new();
    match (&config.command, inputs) {
        (CommandConfig::Exponents { rate, delta, n, .. }, Inputs::Joint(joint)) => {
            let params = ExponentParams::new(&joint, *rate, *delta)?;
            out.push(write_json(dir, "exponents.json", &envelope(config, params.report(*n)))?);
            let mut t = Table::new(&["alpha", "beta"]);
            for (a, b) in params.beta_curve() {
                t.push(vec![num(a), num(b)]);
            }
            out.push(t.write(dir, "exponents_beta_curve.csv")?);
        }
        (CommandConfig::Softcover { rate, delta, n, trials, split, .. }, Inputs::Joint(joint)) => {
            let model = SoftCoveringModel::from_joint(&joint);
            let report = ensemble_experiment(
                &model,
                &EnsembleConfig {
                    rate: *rate,
                    delta: *delta,
                    n_list: n.clone(),
                    trials: *trials,
                    seed,
                    cap,
                    with_split: *split,
                },
            )?;
            let comparisons: Vec<BoundComparison> = report.per_n.iter().map(BoundComparison::from).collect();
            let summary = SoftcoverSummary {
                mutual_information: report.mutual_information,
                slope_log2_mean: report.slope_log2_mean,
                per_n: &report.per_n,
                bound_comparisons: comparisons,
            };
            out.push(write_json(dir, "softcover.json", &envelope(config, summary))?);
            let mut t = Table::new(&[
                "n", "trial", "seed", "codebook_size", "divergence", "threshold", "exceeds", "atypical_mass",
            ]);
            for r in &report.trials {
                t.push(vec![
                    r.n.to_string(),
                    r.trial.to_string(),
                    r.seed.to_string(),
                    r.codebook_size.to_string(),
                    num(r.divergence),
                    num(r.threshold),
                    r.exceeds.to_string(),
                    opt_num(r.atypical_mass),
                ]);
            }
            out.push(t.write(dir, "softcover_trials.csv")?);
            let mut s = Table::new(&[
                "n", "codebook_size", "mean", "median", "max", "threshold", "exceed_fraction", "failure_bound_raw",
            ]);
            for p in &report.per_n {
                s.push(vec![
                    p.n.to_string(),
                    p.codebook_size.to_string(),
                    num(p.mean),
                    num(p.median),
                    num(p.max),
                    num(p.threshold),
                    num(p.exceed_fraction),
                    num(p.failure_bound.raw),
                ]);
            }
            out.push(s.write(dir, "softcover_summary.csv")?);
        }
        (CommandConfig::Capacity { alpha, u_card, grid, restarts, compare_cardinality, .. }, Inputs::Capacity { main, eave }) => {
            let cfg = OptimizerConfig {
                restarts: *restarts,
                seed,
                ..OptimizerConfig::default()
            };
            let x_len = main.input_len();
            let u = u_card.unwrap_or(x_len);
            let mut t = Table::new(&["alpha", "u_card", "value", "method", "flagged"]);
            let row = |t: &mut Table, a: Option<f64>, r: &CapacityResult| {
                t.push(vec![
                    opt_num(a),
                    r.u_cardinality_used.to_string(),
                    num(r.value),
                    method_name(r.method).to_string(),
                    r.flagged.to_string(),
                ]);
            };
            if let Some(g) = grid {
                let curve = capacity_curve(&main, g, u, &cfg)?;
                for p in &curve.points {
                    t.push(vec![num(p.alpha), u.to_string(), num(p.value), method_name(p.method).to_string(), p.flagged.to_string()]);
                }
                out.push(write_json(dir, "capacity.json", &envelope(config, &curve))?);
            } else {
                let solve = |k: usize| match (&eave, alpha) {
                    (Some(e), _) => wtc1_ss_capacity_with(&main, e, k, &cfg),
                    (None, Some(a)) => wtc2_ss_capacity_with(&main, *a, k, &cfg),
                    (None, None) => Err(Error::validation("alpha", "give --eave or --alpha")),
                };
                if *compare_cardinality {
                    let cmp = cardinality_comparison(solve, x_len)?;
                    row(&mut t, *alpha, &cmp.full);
                    if let Some(r) = &cmp.reduced {
                        row(&mut t, *alpha, r);
                    }
                    out.push(write_json(dir, "capacity.json", &envelope(config, &cmp))?);
                } else {
                    let r = solve(u)?;
                    row(&mut t, *alpha, &r);
                    out.push(write_json(dir, "capacity.json", &envelope(config, &r))?);
                }
            }
            out.push(t.write(dir, "capacity_curve.csv")?);
        }
        (
            CommandConfig::Wiretap {
                alpha,
                n,
                rate,
                rtilde,
                eps,
                mode,
                subsets,
                expurgate: do_expurgate,
                sanov_beta,
                sanov_threshold,
                ..
            },
            Inputs::Wiretap { main, eave, input, prefix },
        ) => {
            let code = build_wiretap_code(&input, prefix, *n, *rate, *rtilde, *eps, seed, cap)?;
            let err_mode = match mode {
                ErrorModeConfig::Exact => ErrorMode::Exact,
                ErrorModeConfig::MonteCarlo { trials } => ErrorMode::MonteCarlo {
                    trials: *trials,
                    seed: derive_seed(seed, 1, 0),
                },
            };
            let errors = error_probabilities(&code, &main, &err_mode, cap)?;
            let (used, kept, expurgation) = if *do_expurgate {
                let ex = expurgate(&code, &errors.errors())?;
                let e = errors.errors();
                let summary = ExpurgationSummary {
                    kept: ex.kept.clone(),
                    unchanged: ex.unchanged,
                    rate_before: ex.rate_before,
                    rate_after: ex.rate_after,
                    max_error_kept: ex.kept.iter().map(|&m| e[m]).fold(0.0, f64::max),
                };
                (ex.code, ex.kept, Some(summary))
            } else {
                (code.clone(), (0..code.message_count).collect(), None)
            };
            let leakage = match (&eave, alpha) {
                (Some(e), _) => Leakage::Wtc1 { report: ss_metric_wtc1(&used, e, cap)? },
                (None, Some(a)) => {
                    let sm = match subsets {
                        SubsetConfig::Exhaustive => SubsetMode::Exhaustive,
                        SubsetConfig::Sampled { count } => SubsetMode::Sampled {
                            count: *count,
                            seed: derive_seed(seed, 2, 0),
                        },
                    };
                    Leakage::Wtc2 { report: ss_metric_wtc2(&used, *a, &sm, config.cap_subsets, cap)? }
                }
                (None, None) => return Err(Error::validation("alpha", "give --eave or --alpha")),
            };
            let sanov = match (sanov_beta, alpha) {
                (Some(b), Some(a)) => Some(SanovSummary {
                    bound: sanov_bound(*n, *a, *b, main.input_len(), None)?,
                    threshold: *sanov_threshold,
                    crossover: sanov_crossover(*a, *b, main.input_len(), None, *sanov_threshold)?,
                }),
                _ => None,
            };
            let mut errs = Table::new(&["message", "error", "interval_low", "interval_high", "trials"]);
            for e in &errors.per_message {
                errs.push(vec![
                    e.message.to_string(),
                    num(e.error),
                    opt_num(e.interval.map(|i| i.0)),
                    opt_num(e.interval.map(|i| i.1)),
                    e.trials.map(|t| t.to_string()).unwrap_or_default(),
                ]);
            }
            let mut divs = Table::new(&["subset", "message", "divergence"]);
            let join = |s: &[usize]| s.iter().map(usize::to_string).collect::<Vec<_>>().join(" ");
            match &leakage {
                Leakage::Wtc1 { report } => {
                    for (i, d) in report.per_message_divergence.iter().enumerate() {
                        divs.push(vec![String::new(), kept[i].to_string(), num(*d)]);
                    }
                }
                Leakage::Wtc2 { report } => {
                    for e in &report.per_subset {
                        for (i, d) in e.report.per_message_divergence.iter().enumerate() {
                            divs.push(vec![join(&e.subset), kept[i].to_string(), num(*d)]);
                        }
                    }
                }
            }
            let summary = WiretapSummary {
                code: CodeSummary {
                    n: code.n,
                    message_count: code.message_count,
                    randomness_count: code.randomness_count,
                    realized_rate: code.realized_rate(),
                    realized_rate_tilde: code.realized_rate_tilde(),
                    typicality_eps: code.typicality_eps,
                    codewords: code.codewords.clone(),
                },
                errors: &errors,
                expurgation,
                leakage,
                sanov,
            };
            out.push(write_json(dir, "wiretap.json", &envelope(config, summary))?);
            out.push(errs.write(dir, "wiretap_errors.csv")?);
            out.push(divs.write(dir, "wiretap_divergences.csv")?);
        }
        _ => return Err(Error::validation("config", "inputs do not match the subcommand")),
    }
    Ok(out)
}

#[derive(Serialize)]
struct BoundComparison {
    n: usize,
    exceed_fraction: f64,
    failure_bound_raw: f64,
    /// The un-clamped bound is below one, so the comparison says something.
    informative: bool,
    within_bound: bool,
}

impl From<&NSummary> for BoundComparison {
    fn from(s: &NSummary) -> Self {
        let raw = s.failure_bound.raw;
        BoundComparison {
            n: s.n,
            exceed_fraction: s.exceed_fraction,
            failure_bound_raw: raw,
            informative: raw < 1.0,
            within_bound: raw >= 1.0 || s.exceed_fraction <= raw,
        }
    }
}

#[derive(Serialize)]
struct SoftcoverSummary<'a> {
    mutual_information: f64,
    slope_log2_mean: Option<f64>,
    per_n: &'a [NSummary],
    bound_comparisons: Vec<BoundComparison>,
}

#[derive(Serialize)]
struct CodeSummary {
    n: usize,
    message_count: usize,
    randomness_count: usize,
    realized_rate: f64,
    realized_rate_tilde: f64,
    typicality_eps: f64,
    codewords: Vec<u64>,
}

#[derive(Serialize)]
struct ExpurgationSummary {
    /// Original indices of the kept messages.
    kept: Vec<usize>,
    unchanged: bool,
    rate_before: f64,
    rate_after: f64,
    max_error_kept: f64,
}

#[derive(Serialize)]
#[serde(tag = "channel", rename_all = "snake_case")]
enum Leakage {
    Wtc1 { report: LeakageReport },
    Wtc2 { report: SubsetLeakage },
}

#[derive(Serialize)]
struct SanovSummary {
    bound: SanovBound,
    threshold: f64,
    crossover: Option<usize>,
}

#[derive(Serialize)]
struct WiretapSummary<'a> {
    code: CodeSummary,
    errors: &'a ErrorReport,
    expurgation: Option<ExpurgationSummary>,
    leakage: Leakage,
    sanov: Option<SanovSummary>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RerunOutcome {
    pub original: RunRecord,
    pub record: RunRecord,
    /// Files whose digest differs or that exist in only one of the two runs.
    pub mismatches: Vec<String>,
}

impl RerunOutcome {
    pub fn identical(&self) -> bool {
        self.mismatches.is_empty()
    }
}

/// Runs the configuration recorded in `manifest` again, into `out` when given,
/// and compares the output digests.
pub fn rerun(manifest: &Path, out: Option<PathBuf>) -> Result<RerunOutcome> {
    let original: RunRecord = read_json(manifest)?;
    let mut config = original.config.clone();
    if let Some(o) = out {
        config.out = o;
    }
    let record = run(&config)?;
    let mut mismatches = Vec::new();
    for o in &original.outputs {
        match record.outputs.iter().find(|r| r.file == o.file) {
            Some(r) if r.sha256 == o.sha256 => {}
            _ => mismatches.push(o.file.clone()),
        }
    }
    for r in &record.outputs {
        if !original.outputs.iter().any(|o| o.file == r.file) {
            mismatches.push(r.file.clone());
        }
    }
    Ok(RerunOutcome { original, record, mismatches })
}
