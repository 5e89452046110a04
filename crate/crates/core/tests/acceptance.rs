//! Acceptance criteria, one PASS/FAIL line each. Exits non-zero if any fails.

use std::time::Instant;

use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Binomial, Distribution};

use sscap::capacity::{
    ba_capacity, capacity_curve, erasure_reduction_check, uniform_grid, wtc2_ss_capacity, CapacityMethod,
    OptimizerConfig, SecrecyObjective,
};
use sscap::exponents::{chernoff_bound, ExponentParams};
use sscap::info::binary_entropy;
use sscap::probability::{Alphabet, Channel, JointPmf, Pmf};
use sscap::rng::stream;
use sscap::softcover::{ensemble_experiment, sample_codebook, split_report, EnsembleConfig, SoftCoveringModel};
use sscap::wiretap::{
    build_wiretap_code, combinations, decomposition_check, ss_metric_wtc1, ss_metric_wtc2, wtc1_conditionals,
    SubsetMode,
};

const CAP: u64 = 1 << 24;

type Check = Result<String, String>;

fn simplex(rng: &mut ChaCha8Rng, k: usize) -> Vec<f64> {
    let e: Vec<f64> = (0..k).map(|_| -(1.0 - rng.random::<f64>()).ln()).collect();
    let s: f64 = e.iter().sum();
    e.into_iter().map(|x| x / s).collect()
}

fn random_joint(rng: &mut ChaCha8Rng, ku: usize, kv: usize) -> JointPmf {
    JointPmf::from_flat(Alphabet::indexed(ku), Alphabet::indexed(kv), simplex(rng, ku * kv)).unwrap()
}

fn random_channel(rng: &mut ChaCha8Rng, kin: usize, kout: usize) -> Channel {
    Channel::from_rows((0..kin).map(|_| simplex(rng, kout)).collect()).unwrap()
}

fn c1_erasure_identity() -> Check {
    let mut rng = stream(1, 0);
    let mut worst = 0.0f64;
    for _ in 0..200 {
        let ku = rng.random_range(1..=5);
        let kx = rng.random_range(1..=5);
        let beta = rng.random::<f64>();
        let c = erasure_reduction_check(&random_joint(&mut rng, ku, kx), beta).map_err(|e| e.to_string())?;
        worst = worst.max(c.difference.abs());
    }
    let msg = format!("max |I(U;Z) - beta I(U;X)| = {worst:.3e} over 200 instances");
    if worst < 1e-12 { Ok(msg) } else { Err(msg) }
}

fn c2_lemma4() -> Check {
    let mut rng = stream(2, 0);
    let mut violations = 0;
    let mut min_slack = f64::INFINITY;
    for i in 0..100 {
        let n = [4, 6, 8][i % 3];
        let rate = [0.6, 0.9][(i / 3) % 2];
        let model = SoftCoveringModel::from_joint(&random_joint(&mut rng, 2, 2));
        let cb = sample_codebook(&model.qu, n, rate, rng.random(), CAP).map_err(|e| e.to_string())?;
        let eps = if (i / 6) % 2 == 0 {
            0.05
        } else {
            let realized = cb.realized_rate();
            ExponentParams::new(&model.joint, realized, 0.05).map_err(|e| e.to_string())?.epsilon_at_optimum().max(0.0)
        };
        let r = split_report(&model, &cb, eps, CAP).map_err(|e| e.to_string())?;
        if !(r.exact_divergence <= r.lemma4_bound) {
            violations += 1;
        }
        min_slack = min_slack.min(r.lemma4_bound - r.exact_divergence);
    }
    let msg = format!("{violations} violations in 100 codebooks, min slack {min_slack:.3e}");
    if violations == 0 { Ok(msg) } else { Err(msg) }
}

fn bsc02_model() -> SoftCoveringModel {
    SoftCoveringModel::from_joint(
        &JointPmf::from_input_and_channel(&Pmf::uniform(2), &Channel::bsc(0.2).unwrap()).unwrap(),
    )
}

fn c3_decay_trend() -> Check {
    let model = bsc02_model();
    // Oracle: 1 - h(0.2) for a uniform input.
    let i_oracle = 1.0 - binary_entropy(0.2).unwrap();
    if (model.mutual_info - i_oracle).abs() > 1e-12 {
        return Err(format!("I(U;V) = {} differs from 1 - h(0.2)", model.mutual_info));
    }
    let slope = |rate: f64| -> Result<f64, String> {
        let cfg = EnsembleConfig {
            rate,
            delta: 0.05,
            n_list: vec![6, 8, 10, 12, 14],
            trials: 50,
            seed: 3,
            cap: CAP,
            with_split: false,
        };
        let r = ensemble_experiment(&model, &cfg).map_err(|e| e.to_string())?;
        r.slope_log2_mean.ok_or_else(|| "no slope".to_string())
    };
    let (above, below) = (slope(0.8)?, slope(0.15)?);
    let msg = format!("I = {:.4}; slope at R=0.8: {above:.4}, at R=0.15: {below:.4}", model.mutual_info);
    if above <= -0.05 && below >= -0.01 { Ok(msg) } else { Err(msg) }
}

fn c4_concentration() -> Check {
    let cfg = EnsembleConfig {
        rate: 0.9,
        delta: 0.45,
        n_list: vec![6, 8, 10, 12, 14],
        trials: 200,
        seed: 4,
        cap: CAP,
        with_split: false,
    };
    let r = ensemble_experiment(&bsc02_model(), &cfg).map_err(|e| e.to_string())?;
    let mut parts = Vec::new();
    let mut ok = true;
    let mut informative = 0;
    for s in &r.per_n {
        if s.failure_bound.raw < 1.0 {
            informative += 1;
            ok &= s.exceed_fraction <= s.failure_bound.raw;
            parts.push(format!("n={}: {:.3} <= {:.3e}", s.n, s.exceed_fraction, s.failure_bound.raw));
        }
    }
    let msg = format!("{informative} informative n ({})", parts.join(", "));
    if ok && informative > 0 { Ok(msg) } else { Err(msg) }
}

fn c5_chernoff() -> Check {
    let (m, mu) = (2000u64, 0.01);
    let dist = Binomial::new(m, mu).map_err(|e| e.to_string())?;
    let mut rng = stream(5, 0);
    let draws: Vec<u64> = (0..100_000).map(|_| dist.sample(&mut rng)).collect();
    let mut parts = Vec::new();
    let mut ok = true;
    for ratio in [1.25, 1.5, 2.0] {
        let c = ratio * mu;
        let b = chernoff_bound(m, mu, 1.0, c).map_err(|e| e.to_string())?;
        let q = b.quadratic.ok_or("quadratic form missing")?;
        let emp = draws.iter().filter(|&&k| k as f64 / m as f64 >= c).count() as f64 / draws.len() as f64;
        ok &= emp <= q;
        parts.push(format!("c/mu={ratio}: {emp:.4} <= {q:.4}"));
    }
    for i in 0..=1000 {
        let b = chernoff_bound(m, mu, 1.0, mu * (1.0 + i as f64 / 1000.0)).map_err(|e| e.to_string())?;
        ok &= b.quadratic_dominates == Some(true);
    }
    let msg = format!("{}; exact <= quadratic on 1001 grid points", parts.join(", "));
    if ok { Ok(msg) } else { Err(msg) }
}

fn c6_anchors() -> Check {
    let bsc = Channel::bsc(0.11).unwrap();
    let c0 = wtc2_ss_capacity(&bsc, 0.0, 2).map_err(|e| e.to_string())?;
    let (ba, _) = ba_capacity(&bsc).map_err(|e| e.to_string())?;
    let closed = 1.0 - binary_entropy(0.11).unwrap();
    let c1 = wtc2_ss_capacity(&bsc, 1.0, 2).map_err(|e| e.to_string())?;
    let noiseless = Channel::identity(Alphabet::binary());
    let half = wtc2_ss_capacity(&noiseless, 0.5, 2).map_err(|e| e.to_string())?;
    let grid = half.grid_value.ok_or("grid oracle did not run")?;
    let msg = format!(
        "C(0) = {:.9} vs BA {:.9} vs 1-h(0.11) {:.9}; C(1) = {}; noiseless C(0.5) = {:.9} (grid {:.9})",
        c0.value, ba.value, closed, c1.value, half.value, grid
    );
    let ok = (c0.value - ba.value).abs() < 1e-6
        && (ba.value - closed).abs() < 1e-6
        && c1.value == 0.0
        && c1.method == CapacityMethod::Anchor1
        && (half.value - 0.5).abs() < 1e-6
        && (grid - 0.5).abs() < 1e-6
        && !half.flagged;
    if ok { Ok(msg) } else { Err(msg) }
}

fn c7_curve_shape() -> Check {
    let main = Channel::bsc(0.1).unwrap();
    let curve = capacity_curve(&main, &uniform_grid(20), 2, &OptimizerConfig::default()).map_err(|e| e.to_string())?;
    let msg = format!(
        "21 points, C(0) = {:.6}, non-increasing {}, convex {} (min second difference {:.2e}), bounded by {} {}",
        curve.points[0].value, curve.non_increasing, curve.convex, curve.min_second_difference, curve.log2_output_size, curve.bounded
    );
    if curve.non_increasing && curve.convex && curve.bounded && curve.points.len() == 21 { Ok(msg) } else { Err(msg) }
}

/// `I(M;Z)` for message law `pm` over the rows `P_{Z|M=m}`.
fn mutual_info_rows(pm: &[f64], rows: &[Vec<f64>]) -> f64 {
    let k = rows[0].len();
    let q: Vec<f64> = (0..k).map(|z| pm.iter().zip(rows).map(|(p, r)| p * r[z]).sum()).collect();
    let mut s = 0.0;
    for (p, r) in pm.iter().zip(rows) {
        for z in 0..k {
            if *p > 0.0 && r[z] > 0.0 {
                s += p * r[z] * (r[z] / q[z]).log2();
            }
        }
    }
    s
}

fn compositions(parts: usize, total: usize, cur: &mut Vec<usize>, f: &mut impl FnMut(&[usize])) {
    if cur.len() + 1 == parts {
        cur.push(total);
        f(cur);
        cur.pop();
        return;
    }
    for k in 0..=total {
        cur.push(k);
        compositions(parts, total - k, cur, f);
        cur.pop();
    }
}

/// Simplex grid with step 1/60, then pairwise mass transfers with halving steps.
fn grid_max(rows: &[Vec<f64>]) -> f64 {
    let k = rows.len();
    let steps = 60;
    let mut best = (f64::NEG_INFINITY, vec![0.0; k]);
    compositions(k, steps, &mut Vec::new(), &mut |c| {
        let pm: Vec<f64> = c.iter().map(|&x| x as f64 / steps as f64).collect();
        let v = mutual_info_rows(&pm, rows);
        if v > best.0 {
            best = (v, pm);
        }
    });
    let (mut val, mut pm) = best;
    let mut h = 1.0 / steps as f64;
    while h > 1e-12 {
        let mut improved = false;
        for i in 0..k {
            for j in 0..k {
                if i == j || pm[j] <= 0.0 {
                    continue;
                }
                let t = h.min(pm[j]);
                let mut cand = pm.clone();
                cand[i] += t;
                cand[j] -= t;
                let v = mutual_info_rows(&cand, rows);
                if v > val {
                    val = v;
                    pm = cand;
                    improved = true;
                }
            }
        }
        if !improved {
            h *= 0.5;
        }
    }
    val
}

fn c8_ss_metric() -> Check {
    let mut rng = stream(8, 0);
    let mut worst = 0.0f64;
    let mut bound_ok = true;
    for i in 0..20 {
        let n = rng.random_range(3..=6);
        let km = rng.random_range(1..=2);
        let kw = rng.random_range(1..=2);
        let kx = rng.random_range(2..=3);
        let kz = rng.random_range(2..=3);
        let input = Pmf::from_weights(Alphabet::indexed(kx), &simplex(&mut rng, kx)).map_err(|e| e.to_string())?;
        let eave = random_channel(&mut rng, kx, kz);
        let code = build_wiretap_code(&input, None, n, km as f64 / n as f64, kw as f64 / n as f64, 0.2, i, CAP)
            .map_err(|e| e.to_string())?;
        let report = ss_metric_wtc1(&code, &eave, CAP).map_err(|e| e.to_string())?;
        let rows = wtc1_conditionals(&code, &eave, CAP).map_err(|e| e.to_string())?;
        let oracle = grid_max(&rows);
        worst = worst.max((report.exact_sem - oracle).abs());
        bound_ok &= report.bound_check && report.exact_sem <= report.max_divergence;
    }
    let msg = format!("max |BA - grid search| = {worst:.3e} over 20 codes; sem <= max divergence on all: {bound_ok}");
    if worst < 1e-6 && bound_ok { Ok(msg) } else { Err(msg) }
}

fn c9_decomposition() -> Check {
    let mut worst = 0.0f64;
    let mut checks = 0;
    for (i, n) in [4usize, 6, 8].into_iter().enumerate() {
        let input = Pmf::from_weights(Alphabet::binary(), &[0.6, 0.4]).unwrap();
        let code = build_wiretap_code(&input, None, n, 1.0 / n as f64, 2.0 / n as f64, 0.2, 90 + i as u64, CAP)
            .map_err(|e| e.to_string())?;
        for mu in 1..=3 {
            for s in combinations(n, mu) {
                for m in 0..code.message_count {
                    let c = decomposition_check(&code, &s, m, CAP).map_err(|e| e.to_string())?;
                    worst = worst.max(c.difference.abs());
                    checks += 1;
                }
            }
        }
    }
    let msg = format!("max difference {worst:.3e} over {checks} (n, S, m) cases");
    if worst < 1e-12 { Ok(msg) } else { Err(msg) }
}

fn c10_randomization() -> Check {
    let n = 8;
    let alpha = 3.0 / 8.0;
    let mut values = Vec::new();
    for w_bits in 1..=4 {
        let code = build_wiretap_code(&Pmf::uniform(2), None, n, 1.0 / 8.0, w_bits as f64 / 8.0, 0.2, 0, CAP)
            .map_err(|e| e.to_string())?;
        let r = ss_metric_wtc2(&code, alpha, &SubsetMode::Exhaustive, 1_000_000, CAP).map_err(|e| e.to_string())?;
        if r.mu != 3 || code.message_count != 2 {
            return Err(format!("unexpected mu {} or |M| {}", r.mu, code.message_count));
        }
        values.push(r.max_divergence_bound);
    }
    let monotone = values.windows(2).all(|w| w[1] <= w[0]);
    let ratio = values[3] / values[0];
    let msg = format!(
        "seed 0, |M| = 2: max D over |W| = 2,4,8,16: {:.4}, {:.4}, {:.4}, {:.4}; non-increasing {monotone}; ratio {:.3} (need < 0.25)",
        values[0], values[1], values[2], values[3], ratio
    );
    if monotone && ratio < 0.25 { Ok(msg) } else { Err(msg) }
}

fn c11_gradient() -> Check {
    let mut rng = stream(11, 0);
    let mut worst = 0.0f64;
    for _ in 0..100 {
        let kx = rng.random_range(2..=3);
        let ky = rng.random_range(2..=3);
        let ku = rng.random_range(1..=3);
        let alpha = rng.random::<f64>();
        let main = random_channel(&mut rng, kx, ky);
        let obj = SecrecyObjective::wtc2(&main, alpha, ku);
        let j = simplex(&mut rng, ku * kx);
        let mut s = obj.scratch();
        let mut g = vec![0.0; j.len()];
        obj.gradient(&j, &mut g, &mut s);
        let scale = g.iter().fold(1.0f64, |a, x| a.max(x.abs()));
        let h = 1e-6;
        for k in 0..j.len() {
            let (mut jp, mut jm) = (j.clone(), j.clone());
            jp[k] += h;
            jm[k] -= h;
            let fd = (obj.value(&jp, &mut s) - obj.value(&jm, &mut s)) / (2.0 * h);
            worst = worst.max((fd - g[k]).abs() / scale);
        }
    }
    let msg = format!("max relative error {worst:.3e} at 100 interior points");
    if worst < 1e-5 { Ok(msg) } else { Err(msg) }
}

fn c12_determinism() -> Check {
    let exe = env!("CARGO_BIN_EXE_sscap");
    let data = std::path::Path::new(env!("CARGO_MANIFEST_DIR")).join("data");
    let d = |f: &str| data.join(f).display().to_string();
    let runs: Vec<Vec<String>> = vec![
        vec!["exponents".into(), "--joint".into(), d("bsc02_uniform_joint.json"), "--rate".into(), "0.8".into(), "--delta".into(), "0.05".into(), "--n".into(), "10".into()],
        vec!["softcover".into(), "--joint".into(), d("bsc02_uniform_joint.json"), "--rate".into(), "0.8".into(), "--delta".into(), "0.05".into(), "--n".into(), "6:10:2".into(), "--trials".into(), "5".into(), "--split".into()],
        vec!["capacity".into(), "--main".into(), d("bsc01.json"), "--grid".into(), "0:1:0.25".into(), "--restarts".into(), "8".into()],
        vec!["wiretap".into(), "--main".into(), d("bsc01.json"), "--alpha".into(), "0.5".into(), "--n".into(), "6".into(), "--rate".into(), "0.17".into(), "--rtilde".into(), "0.34".into(), "--mode".into(), "mc:100".into(), "--sanov-beta".into(), "0.2".into()],
    ];
    let tmp = tempfile::tempdir().map_err(|e| e.to_string())?;
    let mut compared = 0;
    for (i, args) in runs.iter().enumerate() {
        let mut outs = Vec::new();
        for rep in 0..2 {
            let dir = tmp.path().join(format!("{i}-{rep}"));
            let st = std::process::Command::new(exe)
                .args(args)
                .args(["--seed", "12", "--out", &dir.display().to_string()])
                .output()
                .map_err(|e| e.to_string())?;
            if !st.status.success() {
                return Err(format!("{} failed: {}", args[0], String::from_utf8_lossy(&st.stderr)));
            }
            let mut files: Vec<(String, Vec<u8>)> = std::fs::read_dir(&dir)
                .map_err(|e| e.to_string())?
                .map(|e| e.unwrap().path())
                .filter(|p| p.file_name().unwrap() != "manifest.json")
                .map(|p| (p.file_name().unwrap().to_string_lossy().into_owned(), std::fs::read(&p).unwrap()))
                .collect();
            files.sort();
            outs.push(files);
        }
        if outs[0] != outs[1] {
            return Err(format!("{} outputs differ between runs", args[0]));
        }
        compared += outs[0].len();
    }
    Ok(format!("4 subcommands, {compared} CSV/JSON files byte-identical across two runs"))
}

fn main() {
    let criteria: [(&str, fn() -> Check); 12] = [
        ("erasure reduction identity", c1_erasure_identity),
        ("decomposition bound on random codebooks", c2_lemma4),
        ("soft-covering decay trend", c3_decay_trend),
        ("concentration versus failure bound", c4_concentration),
        ("Chernoff bound", c5_chernoff),
        ("capacity anchors", c6_anchors),
        ("capacity curve shape", c7_curve_shape),
        ("semantic-security metric", c8_ss_metric),
        ("type II decomposition", c9_decomposition),
        ("randomization buys secrecy", c10_randomization),
        ("gradient validation", c11_gradient),
        ("determinism", c12_determinism),
    ];
    let mut failed = 0;
    for (i, (name, f)) in criteria.iter().enumerate() {
        let t = Instant::now();
        let r = f();
        let secs = t.elapsed().as_secs_f64();
        match r {
            Ok(msg) => println!("PASS [{:>2}] {name}: {msg} ({secs:.2} s)", i + 1),
            Err(msg) => {
                failed += 1;
                println!("FAIL [{:>2}] {name}: {msg} ({secs:.2} s)", i + 1);
            }
        }
    }
    println!("{} of 12 criteria passed", 12 - failed);
    if failed > 0 {
        std::process::exit(1);
    }
}
