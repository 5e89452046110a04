use rand::Rng;
use serde::Serialize;

use super::ba::ba_capacity;
use crate::error::{Error, Result};
use crate::numeric::{ser_f64, ser_opt_f64, LOG2_E};
use crate::parallel::map_indexed;
use crate::probability::{Alphabet, Channel, JointPmf};
use crate::rng::stream;

/// `I(U;Y) - c·I(U;Z)` as a function of the joint `Q_{U,X}`, with `Y` and `Z`
/// obtained from `X` through fixed channels.
///
/// `value` and `gradient` accept unnormalized tables: the mutual-information
/// terms are evaluated as `Σ P log(P / (P_U P_Y))` without dividing by the
/// total, so the gradient is the exact partial derivative of `value`.
#[derive(Debug, Clone)]
pub struct SecrecyObjective {
    pub u_card: usize,
    kx: usize,
    ky: usize,
    kz: usize,
    main: Vec<f64>,
    /// `None` when `Z = X`.
    eave: Option<Vec<f64>>,
    coef: f64,
}

/// Reusable buffers for objective evaluation.
#[derive(Debug, Clone)]
pub struct Scratch {
    py: Vec<f64>,
    pz: Vec<f64>,
    my: Vec<f64>,
    mz: Vec<f64>,
    mu: Vec<f64>,
    ly: Vec<f64>,
    lz: Vec<f64>,
}

impl SecrecyObjective {
    /// `I(U;Y) - α I(U;X)`.
    pub fn wtc2(main: &Channel, alpha: f64, u_card: usize) -> Self {
        SecrecyObjective {
            u_card,
            kx: main.input_len(),
            ky: main.output_len(),
            kz: main.input_len(),
            main: main.matrix().to_vec(),
            eave: None,
            coef: alpha,
        }
    }

    /// `I(U;Y) - I(U;Z)`.
    pub fn wtc1(main: &Channel, eave: &Channel, u_card: usize) -> Self {
        SecrecyObjective {
            u_card,
            kx: main.input_len(),
            ky: main.output_len(),
            kz: eave.output_len(),
            main: main.matrix().to_vec(),
            eave: Some(eave.matrix().to_vec()),
            coef: 1.0,
        }
    }

    pub fn dim(&self) -> usize {
        self.u_card * self.kx
    }

    pub fn scratch(&self) -> Scratch {
        Scratch {
            py: vec![0.0; self.u_card * self.ky],
            pz: vec![0.0; self.u_card * self.kz],
            my: vec![0.0; self.ky],
            mz: vec![0.0; self.kz],
            mu: vec![0.0; self.u_card],
            ly: vec![0.0; self.u_card * self.ky],
            lz: vec![0.0; self.u_card * self.kz],
        }
    }

    fn fill(&self, j: &[f64], s: &mut Scratch) {
        let (ku, kx) = (self.u_card, self.kx);
        s.mu.iter_mut().for_each(|v| *v = 0.0);
        for u in 0..ku {
            for x in 0..kx {
                s.mu[u] += j[u * kx + x];
            }
        }
        push_through(j, ku, kx, &self.main, self.ky, &mut s.py, &mut s.my);
        log_ratio(&s.py, &s.mu, &s.my, &mut s.ly);
        match &self.eave {
            Some(e) => push_through(j, ku, kx, e, self.kz, &mut s.pz, &mut s.mz),
            None => {
                s.pz.copy_from_slice(j);
                s.mz.iter_mut().for_each(|v| *v = 0.0);
                for u in 0..ku {
                    for x in 0..kx {
                        s.mz[x] += j[u * kx + x];
                    }
                }
            }
        }
        log_ratio(&s.pz, &s.mu, &s.mz, &mut s.lz);
    }

    pub fn value(&self, j: &[f64], s: &mut Scratch) -> f64 {
        self.fill(j, s);
        let iy: f64 = s.py.iter().zip(&s.ly).map(|(p, l)| if *p > 0.0 { p * l } else { 0.0 }).sum();
        let iz: f64 = s.pz.iter().zip(&s.lz).map(|(p, l)| if *p > 0.0 { p * l } else { 0.0 }).sum();
        iy - self.coef * iz
    }

    /// Writes `∂value/∂J(u,x)` into `g` and returns the value.
    pub fn gradient(&self, j: &[f64], g: &mut [f64], s: &mut Scratch) -> f64 {
        let v = self.value(j, s);
        let (kx, ky, kz) = (self.kx, self.ky, self.kz);
        let shift = (1.0 - self.coef) * LOG2_E;
        for u in 0..self.u_card {
            for x in 0..kx {
                let w = &self.main[x * ky..(x + 1) * ky];
                let mut a = 0.0;
                for y in 0..ky {
                    if w[y] > 0.0 {
                        a += w[y] * s.ly[u * ky + y];
                    }
                }
                let b = match &self.eave {
                    Some(e) => {
                        let r = &e[x * kz..(x + 1) * kz];
                        let mut b = 0.0;
                        for z in 0..kz {
                            if r[z] > 0.0 {
                                b += r[z] * s.lz[u * kz + z];
                            }
                        }
                        b
                    }
                    None => s.lz[u * kz + x],
                };
                g[u * kx + x] = a - self.coef * b - shift;
            }
        }
        v
    }
}

fn push_through(j: &[f64], ku: usize, kx: usize, ch: &[f64], ko: usize, out: &mut [f64], m: &mut [f64]) {
    out.iter_mut().for_each(|v| *v = 0.0);
    m.iter_mut().for_each(|v| *v = 0.0);
    for u in 0..ku {
        for x in 0..kx {
            let p = j[u * kx + x];
            if p == 0.0 {
                continue;
            }
            for o in 0..ko {
                out[u * ko + o] += p * ch[x * ko + o];
            }
        }
    }
    for u in 0..ku {
        for o in 0..ko {
            m[o] += out[u * ko + o];
        }
    }
}

// log2(P(u,o) / (P(u) P(o))); zero where P(u,o) = 0.
fn log_ratio(p: &[f64], mu: &[f64], mo: &[f64], out: &mut [f64]) {
    let ko = mo.len();
    for u in 0..mu.len() {
        for o in 0..ko {
            let x = p[u * ko + o];
            out[u * ko + o] = if x > 0.0 { (x / (mu[u] * mo[o])).log2() } else { 0.0 };
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct OptimizerConfig {
    pub restarts: usize,
    pub max_iterations: usize,
    /// Stop when the Frank–Wolfe gap `max g - <J, g>` drops below this.
    #[serde(serialize_with = "ser_f64")]
    pub tolerance: f64,
    pub seed: u64,
    /// Run the grid oracle when `|X| <= 3` and `u_card <= 3`.
    pub grid: bool,
    /// Upper bound on grid points.
    pub grid_budget: usize,
}

impl Default for OptimizerConfig {
    fn default() -> Self {
        OptimizerConfig {
            restarts: 64,
            max_iterations: 10_000,
            tolerance: 1e-9,
            seed: 0,
            grid: true,
            grid_budget: 200_000,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RestartTrace {
    pub restart: usize,
    #[serde(serialize_with = "ser_f64")]
    pub value: f64,
    pub iterations: usize,
    #[serde(serialize_with = "ser_f64")]
    pub gap: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum CapacityMethod {
    /// `α = 0`: plain channel capacity.
    Anchor0,
    /// `α = 1`: zero.
    Anchor1,
    Ascent,
    Grid,
}

#[derive(Debug, Clone, Serialize)]
pub struct CapacityResult {
    #[serde(serialize_with = "ser_f64")]
    pub value: f64,
    pub maximizer: JointPmf,
    pub u_cardinality_used: usize,
    pub method: CapacityMethod,
    #[serde(serialize_with = "ser_opt_f64")]
    pub ascent_value: Option<f64>,
    #[serde(serialize_with = "ser_opt_f64")]
    pub grid_value: Option<f64>,
    pub grid_resolution: Option<usize>,
    /// Ascent fell more than `1e-4` below the grid oracle.
    pub flagged: bool,
    pub optimizer_trace: Vec<RestartTrace>,
}

/// Secrecy capacity `max I(U;Y) - α I(U;X)` of the type II wiretap channel.
pub fn wtc2_ss_capacity(main: &Channel, alpha: f64, u_card: usize) -> Result<CapacityResult> {
    wtc2_ss_capacity_with(main, alpha, u_card, &OptimizerConfig::default())
}

pub fn wtc2_ss_capacity_with(
    main: &Channel,
    alpha: f64,
    u_card: usize,
    cfg: &OptimizerConfig,
) -> Result<CapacityResult> {
    if !(0.0..=1.0).contains(&alpha) {
        return Err(Error::validation("alpha", format!("{alpha} is not in [0, 1]")));
    }
    check_u_card(u_card)?;
    let x = main.input_alphabet();
    if alpha == 1.0 {
        return Ok(anchor_one(x, u_card));
    }
    if alpha == 0.0 {
        let (ba, p) = ba_capacity(main)?;
        let support = p.support();
        if support.len() <= u_card {
            let mut table = vec![0.0; u_card * x.len()];
            for (u, &s) in support.iter().enumerate() {
                table[u * x.len() + s] = p.get(s);
            }
            return Ok(CapacityResult {
                value: ba.value,
                maximizer: JointPmf::from_flat(Alphabet::indexed(u_card), x.clone(), table)?,
                u_cardinality_used: u_card,
                method: CapacityMethod::Anchor0,
                ascent_value: None,
                grid_value: None,
                grid_resolution: None,
                flagged: false,
                optimizer_trace: Vec::new(),
            });
        }
    }
    let obj = SecrecyObjective::wtc2(main, alpha, u_card);
    optimize(&obj, main, x, cfg)
}

/// Secrecy capacity `max I(U;Y) - I(U;Z)` of the type I wiretap channel.
pub fn wtc1_ss_capacity(main: &Channel, eave: &Channel, u_card: usize) -> Result<CapacityResult> {
    wtc1_ss_capacity_with(main, eave, u_card, &OptimizerConfig::default())
}

pub fn wtc1_ss_capacity_with(
    main: &Channel,
    eave: &Channel,
    u_card: usize,
    cfg: &OptimizerConfig,
) -> Result<CapacityResult> {
    if main.input_alphabet() != eave.input_alphabet() {
        return Err(Error::validation("eave", "input alphabet differs from the main channel"));
    }
    check_u_card(u_card)?;
    let obj = SecrecyObjective::wtc1(main, eave, u_card);
    optimize(&obj, main, main.input_alphabet(), cfg)
}

fn check_u_card(u_card: usize) -> Result<()> {
    if u_card == 0 {
        return Err(Error::validation("u_card", "must be >= 1"));
    }
    Ok(())
}

fn anchor_one(x: &Alphabet, u_card: usize) -> CapacityResult {
    let mut table = vec![0.0; u_card * x.len()];
    table[..x.len()].iter_mut().for_each(|v| *v = 1.0 / x.len() as f64);
    CapacityResult {
        value: 0.0,
        maximizer: JointPmf::from_flat(Alphabet::indexed(u_card), x.clone(), table)
            .expect("uniform row is a valid joint"),
        u_cardinality_used: u_card,
        method: CapacityMethod::Anchor1,
        ascent_value: None,
        grid_value: None,
        grid_resolution: None,
        flagged: false,
        optimizer_trace: Vec::new(),
    }
}

struct Candidate {
    value: f64,
    joint: Vec<f64>,
}

fn better(a: &Candidate, b: &Candidate) -> bool {
    if a.value > b.value + 1e-12 {
        return true;
    }
    if b.value > a.value + 1e-12 {
        return false;
    }
    a.joint.iter().zip(&b.joint).map(|(x, y)| x.total_cmp(y)).find(|o| o.is_ne())
        == Some(std::cmp::Ordering::Less)
}

fn optimize(obj: &SecrecyObjective, main: &Channel, x: &Alphabet, cfg: &OptimizerConfig) -> Result<CapacityResult> {
    let mut s = obj.scratch();
    let ku = obj.u_card;
    let kx = obj.kx;

    // Deterministic starting candidates: U independent of X (value 0) and,
    // when it fits, U = X with the capacity-achieving input.
    let mut fixed = Vec::new();
    let mut indep = vec![0.0; obj.dim()];
    indep[..kx].iter_mut().for_each(|v| *v = 1.0 / kx as f64);
    fixed.push(indep);
    let (_, p) = ba_capacity(main)?;
    let support = p.support();
    if support.len() <= ku {
        let mut diag = vec![0.0; obj.dim()];
        for (u, &sx) in support.iter().enumerate() {
            diag[u * kx + sx] = p.get(sx);
        }
        fixed.push(diag);
    }

    let runs = map_indexed(cfg.restarts, |r| {
        let mut rng = stream(cfg.seed, r as u64);
        let init: Vec<f64> = {
            // Dirichlet(1) via normalized exponentials.
            let e: Vec<f64> = (0..obj.dim()).map(|_| -(1.0 - rng.random::<f64>()).ln()).collect();
            let t: f64 = e.iter().sum();
            e.iter().map(|v| v / t).collect()
        };
        let (joint, value, iterations, gap) = ascend(obj, init, cfg);
        (RestartTrace { restart: r, value, iterations, gap }, joint)
    });

    let mut best: Option<Candidate> = None;
    let consider = |c: Candidate, best: &mut Option<Candidate>| {
        if best.as_ref().is_none_or(|b| better(&c, b)) {
            *best = Some(c);
        }
    };
    for f in fixed {
        let (joint, value, _, _) = ascend(obj, f, cfg);
        consider(Candidate { value, joint }, &mut best);
    }
    let mut trace = Vec::with_capacity(runs.len());
    for (t, joint) in runs {
        consider(Candidate { value: t.value, joint }, &mut best);
        trace.push(t);
    }
    let ascent = best.expect("at least one candidate");
    let ascent_value = ascent.value;

    let mut method = CapacityMethod::Ascent;
    let mut grid_value = None;
    let mut grid_resolution = None;
    let mut flagged = false;
    let mut chosen = ascent;
    if cfg.grid && kx <= 3 && ku <= 3 {
        let (g, resolution) = grid_oracle(obj, cfg.grid_budget);
        grid_value = Some(g.value);
        grid_resolution = Some(resolution);
        flagged = ascent_value < g.value - 1e-4;
        if g.value > chosen.value + 1e-12 {
            chosen = g;
            method = CapacityMethod::Grid;
        }
    }
    let value = obj.value(&chosen.joint, &mut s).max(0.0);
    Ok(CapacityResult {
        value,
        maximizer: JointPmf::from_flat(Alphabet::indexed(ku), x.clone(), chosen.joint)?,
        u_cardinality_used: ku,
        method,
        ascent_value: Some(ascent_value),
        grid_value,
        grid_resolution,
        flagged,
        optimizer_trace: trace,
    })
}

/// Exponentiated-gradient ascent on the simplex with backtracking steps.
/// Returns `(joint, value, iterations, gap)`.
fn ascend(obj: &SecrecyObjective, mut j: Vec<f64>, cfg: &OptimizerConfig) -> (Vec<f64>, f64, usize, f64) {
    let mut s = obj.scratch();
    let d = obj.dim();
    let mut g = vec![0.0; d];
    let mut trial = vec![0.0; d];
    let mut eta = 1.0;
    let mut f = obj.gradient(&j, &mut g, &mut s);
    let mut gap = f64::INFINITY;
    let mut it = 0;
    while it < cfg.max_iterations {
        let gmax = j
            .iter()
            .zip(&g)
            .filter(|(p, _)| **p > 0.0)
            .map(|(_, v)| *v)
            .fold(f64::NEG_INFINITY, f64::max);
        let avg: f64 = j.iter().zip(&g).map(|(p, v)| p * v).sum();
        gap = gmax - avg;
        if gap < cfg.tolerance {
            break;
        }
        it += 1;
        let mut accepted = false;
        while eta > 1e-12 {
            let mut z = 0.0;
            for k in 0..d {
                trial[k] = if j[k] > 0.0 { j[k] * (eta * (g[k] - gmax)).exp() } else { 0.0 };
                z += trial[k];
            }
            trial.iter_mut().for_each(|v| *v /= z);
            let ft = obj.value(&trial, &mut s);
            let lin: f64 = (0..d).map(|k| g[k] * (trial[k] - j[k])).sum();
            if ft >= f + 1e-4 * lin && ft >= f {
                accepted = true;
                break;
            }
            eta *= 0.5;
        }
        if !accepted {
            break;
        }
        std::mem::swap(&mut j, &mut trial);
        f = obj.gradient(&j, &mut g, &mut s);
        eta = (eta * 2.0).min(1e6);
    }
    (j, f, it, gap)
}

/// All compositions of `resolution` into `dim` parts, scaled to the simplex.
/// The resolution is the largest one whose point count fits `budget`.
fn grid_oracle(obj: &SecrecyObjective, budget: usize) -> (Candidate, usize) {
    let d = obj.dim();
    let mut n = 1;
    while binom(n + 1 + d - 1, d - 1) <= budget as f64 {
        n += 1;
    }
    let mut s = obj.scratch();
    let mut counts = vec![0usize; d];
    let mut joint = vec![0.0; d];
    let mut best: Option<Candidate> = None;
    compositions(&mut counts, 0, n, &mut |c| {
        for k in 0..d {
            joint[k] = c[k] as f64 / n as f64;
        }
        let v = obj.value(&joint, &mut s);
        let cand = Candidate { value: v, joint: joint.clone() };
        if best.as_ref().is_none_or(|b| better(&cand, b)) {
            best = Some(cand);
        }
    });
    (best.expect("grid is non-empty"), n)
}

fn binom(n: usize, k: usize) -> f64 {
    (0..k).fold(1.0, |acc, i| acc * (n - i) as f64 / (i + 1) as f64)
}

fn compositions(c: &mut [usize], pos: usize, left: usize, f: &mut impl FnMut(&[usize])) {
    if pos == c.len() - 1 {
        c[pos] = left;
        f(c);
        return;
    }
    for k in (0..=left).rev() {
        c[pos] = k;
        compositions(c, pos + 1, left - k, f);
    }
}

/// Capacity at `u_card = |X|` and `|X| - 1`.
#[derive(Debug, Clone, Serialize)]
pub struct CardinalityComparison {
    pub full: CapacityResult,
    pub reduced: Option<CapacityResult>,
    #[serde(serialize_with = "ser_opt_f64")]
    pub difference: Option<f64>,
}

pub fn cardinality_comparison(
    run: impl Fn(usize) -> Result<CapacityResult>,
    x_len: usize,
) -> Result<CardinalityComparison> {
    let full = run(x_len)?;
    let reduced = if x_len > 1 { Some(run(x_len - 1)?) } else { None };
    let difference = reduced.as_ref().map(|r| full.value - r.value);
    Ok(CardinalityComparison { full, reduced, difference })
}
