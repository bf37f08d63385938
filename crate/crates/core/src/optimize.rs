//! Seeded, box-constrained global maximization.
//!
//! Four engines share one contract: given the same problem, method, seed and
//! budget they return the same [`OptResult`] on any number of worker threads.
//! Every random draw comes from a substream keyed by `(seed, round, member)`,
//! and parallel batches are recorded in index order.

use std::fmt;
use std::str::FromStr;
use std::time::Instant;

use rand::seq::SliceRandom;
use rand::Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::diagonal::diag3_catalog;
use crate::error::{Error, Result};
use crate::grid::{enumerate_types, fsl_objective_closed, grid_objective};
use crate::rng::substream;

#[derive(Copy, Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    De,
    NelderMead,
    SimulatedAnnealing,
    RandomSearch,
}

impl Method {
    pub const ALL: [Method; 4] = [
        Method::De,
        Method::NelderMead,
        Method::SimulatedAnnealing,
        Method::RandomSearch,
    ];

    pub fn as_str(&self) -> &'static str {
        match self {
            Method::De => "de",
            Method::NelderMead => "nelder_mead",
            Method::SimulatedAnnealing => "simulated_annealing",
            Method::RandomSearch => "random_search",
        }
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Method {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        match s.to_ascii_lowercase().replace('-', "_").as_str() {
            "de" | "differential_evolution" => Ok(Method::De),
            "nm" | "nelder_mead" => Ok(Method::NelderMead),
            "sa" | "simulated_annealing" => Ok(Method::SimulatedAnnealing),
            "rs" | "random_search" => Ok(Method::RandomSearch),
            other => Err(format!("unknown method {other:?}")),
        }
    }
}

/// An objective over a closed box. The evaluator must be total on the box and
/// free of side effects.
pub struct OptProblem<F> {
    evaluator: F,
    bounds: Vec<(f64, f64)>,
}

impl<F> OptProblem<F>
where
    F: Fn(&[f64]) -> f64 + Sync,
{
    pub fn new(evaluator: F, bounds: Vec<(f64, f64)>) -> Result<Self> {
        if bounds.is_empty() {
            return Err(Error::InvalidDimension {
                dim: 0,
                reason: "at least one variable is required",
            });
        }
        for (index, &(lo, hi)) in bounds.iter().enumerate() {
            if !(lo.is_finite() && hi.is_finite() && lo <= hi) {
                return Err(Error::InvalidBounds { index, lo, hi });
            }
        }
        Ok(OptProblem { evaluator, bounds })
    }

    pub fn n_vars(&self) -> usize {
        self.bounds.len()
    }

    pub fn bounds(&self) -> &[(f64, f64)] {
        &self.bounds
    }

    pub fn evaluate(&self, x: &[f64]) -> f64 {
        (self.evaluator)(x)
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct OptResult {
    pub value: f64,
    pub argmax: Vec<f64>,
    pub evaluations: usize,
    pub method: Method,
    pub seed: u64,
    pub wall_time_ms: f64,
    /// `(evaluation index, best value so far)` at every strict improvement.
    pub trace: Vec<(usize, f64)>,
}

impl OptResult {
    /// Equality of everything except wall time.
    pub fn same_outcome(&self, other: &OptResult) -> bool {
        self.value.to_bits() == other.value.to_bits()
            && self.argmax.len() == other.argmax.len()
            && self
                .argmax
                .iter()
                .zip(&other.argmax)
                .all(|(a, b)| a.to_bits() == b.to_bits())
            && self.evaluations == other.evaluations
            && self.method == other.method
            && self.seed == other.seed
            && self.trace == other.trace
    }
}

/// Differential evolution settings.
#[derive(Clone, Debug)]
pub struct DeConfig {
    pub population_per_var: usize,
    pub crossover: f64,
    pub weight_range: (f64, f64),
    pub stagnation_generations: usize,
    pub stagnation_tol: f64,
    /// Share of the budget held back for a final simplex polish.
    pub polish_fraction: f64,
}

impl Default for DeConfig {
    fn default() -> Self {
        DeConfig {
            population_per_var: 20,
            crossover: 0.9,
            weight_range: (0.5, 1.0),
            stagnation_generations: 200,
            stagnation_tol: 1e-12,
            polish_fraction: 0.1,
        }
    }
}

const NM_STARTS: usize = 64;

/// Running record of evaluations; always updated in a fixed order.
struct Tracker {
    evals: usize,
    best: f64,
    best_x: Vec<f64>,
    trace: Vec<(usize, f64)>,
}

impl Tracker {
    fn new(n: usize) -> Self {
        Tracker {
            evals: 0,
            best: f64::NEG_INFINITY,
            best_x: vec![0.0; n],
            trace: Vec::new(),
        }
    }

    fn record(&mut self, x: &[f64], v: f64) -> Result<()> {
        self.evals += 1;
        if !v.is_finite() {
            return Err(Error::NonFiniteObjective {
                evaluation: self.evals,
            });
        }
        if v > self.best {
            self.best = v;
            self.best_x.clear();
            self.best_x.extend_from_slice(x);
            self.trace.push((self.evals, v));
        }
        Ok(())
    }

    /// Appends a sub-run that started after `self.evals` evaluations.
    fn absorb(&mut self, other: Tracker) {
        let offset = self.evals;
        for (i, v) in other.trace {
            if v > self.best {
                self.best = v;
                self.trace.push((offset + i, v));
            }
        }
        if other.best >= self.best && other.best.is_finite() {
            self.best_x = other.best_x;
        }
        self.evals += other.evals;
    }
}

fn reflect_into(x: f64, lo: f64, hi: f64) -> f64 {
    let y = if x < lo {
        lo + (lo - x)
    } else if x > hi {
        hi - (x - hi)
    } else {
        x
    };
    y.clamp(lo, hi)
}

fn uniform_point<R: Rng>(rng: &mut R, bounds: &[(f64, f64)]) -> Vec<f64> {
    bounds
        .iter()
        .map(|&(lo, hi)| if hi > lo { rng.gen_range(lo..=hi) } else { lo })
        .collect()
}

fn eval_batch<F>(problem: &OptProblem<F>, xs: &[Vec<f64>]) -> Vec<f64>
where
    F: Fn(&[f64]) -> f64 + Sync,
{
    xs.par_iter().map(|x| problem.evaluate(x)).collect()
}

/// Smallest budget accepted by `method` for `n` variables.
pub fn min_budget(method: Method, n: usize) -> usize {
    match method {
        Method::De => DeConfig::default().population_per_var * n,
        Method::NelderMead => NM_STARTS * (n + 1),
        Method::SimulatedAnnealing | Method::RandomSearch => 1,
    }
}

/// Maximizes `problem` with `method` using at most `budget` evaluations.
pub fn maximize<F>(
    problem: &OptProblem<F>,
    method: Method,
    seed: u64,
    budget: usize,
) -> Result<OptResult>
where
    F: Fn(&[f64]) -> f64 + Sync,
{
    let needed = min_budget(method, problem.n_vars());
    if budget < needed {
        return Err(Error::BudgetTooSmall { budget, needed });
    }
    let start = Instant::now();
    let tracker = match method {
        Method::De => differential_evolution(problem, seed, budget, &DeConfig::default())?,
        Method::NelderMead => nelder_mead_multistart(problem, seed, budget)?,
        Method::SimulatedAnnealing => simulated_annealing(problem, seed, budget)?,
        Method::RandomSearch => random_search(problem, seed, budget)?,
    };
    Ok(OptResult {
        value: tracker.best,
        argmax: tracker.best_x,
        evaluations: tracker.evals,
        method,
        seed,
        wall_time_ms: start.elapsed().as_secs_f64() * 1e3,
        trace: tracker.trace,
    })
}

/// Differential evolution with an explicit configuration.
pub fn maximize_de<F>(
    problem: &OptProblem<F>,
    seed: u64,
    budget: usize,
    cfg: &DeConfig,
) -> Result<OptResult>
where
    F: Fn(&[f64]) -> f64 + Sync,
{
    let needed = cfg.population_per_var * problem.n_vars();
    if budget < needed.max(4) {
        return Err(Error::BudgetTooSmall {
            budget,
            needed: needed.max(4),
        });
    }
    let start = Instant::now();
    let tracker = differential_evolution(problem, seed, budget, cfg)?;
    Ok(OptResult {
        value: tracker.best,
        argmax: tracker.best_x,
        evaluations: tracker.evals,
        method: Method::De,
        seed,
        wall_time_ms: start.elapsed().as_secs_f64() * 1e3,
        trace: tracker.trace,
    })
}

fn differential_evolution<F>(
    problem: &OptProblem<F>,
    seed: u64,
    budget: usize,
    cfg: &DeConfig,
) -> Result<Tracker>
where
    F: Fn(&[f64]) -> f64 + Sync,
{
    let n = problem.n_vars();
    let bounds = problem.bounds();
    let np = (cfg.population_per_var * n).max(4);
    let polish_budget = ((budget as f64) * cfg.polish_fraction) as usize;
    let evolve_budget = budget - polish_budget;
    let mut tracker = Tracker::new(n);

    let mut pop: Vec<Vec<f64>> = (0..np)
        .map(|i| uniform_point(&mut substream(seed, 0, i as u64), bounds))
        .collect();
    let mut fit = eval_batch(problem, &pop);
    for (x, &v) in pop.iter().zip(&fit) {
        tracker.record(x, v)?;
    }

    let mut mark = tracker.best;
    let mut stale = 0usize;
    let mut generation = 0u64;
    while tracker.evals < evolve_budget && stale < cfg.stagnation_generations {
        generation += 1;
        let members = np.min(evolve_budget - tracker.evals);
        let (wlo, whi) = cfg.weight_range;
        let weight = substream(seed, generation, u64::MAX).gen_range(wlo..=whi);
        let trials: Vec<Vec<f64>> = (0..members)
            .into_par_iter()
            .map(|i| {
                let mut rng = substream(seed, generation, i as u64);
                let mut pick = || loop {
                    let r = rng.gen_range(0..np);
                    if r != i {
                        break r;
                    }
                };
                let r1 = pick();
                let r2 = loop {
                    let r = pick();
                    if r != r1 {
                        break r;
                    }
                };
                let r3 = loop {
                    let r = pick();
                    if r != r1 && r != r2 {
                        break r;
                    }
                };
                let jrand = rng.gen_range(0..n);
                (0..n)
                    .map(|j| {
                        if j == jrand || rng.gen::<f64>() < cfg.crossover {
                            let v = pop[r1][j] + weight * (pop[r2][j] - pop[r3][j]);
                            reflect_into(v, bounds[j].0, bounds[j].1)
                        } else {
                            pop[i][j]
                        }
                    })
                    .collect()
            })
            .collect();
        let vals = eval_batch(problem, &trials);
        for (i, (x, v)) in trials.into_iter().zip(vals).enumerate() {
            tracker.record(&x, v)?;
            if v >= fit[i] {
                pop[i] = x;
                fit[i] = v;
            }
        }
        if tracker.best > mark + cfg.stagnation_tol {
            mark = tracker.best;
            stale = 0;
        } else {
            stale += 1;
        }
    }

    let remaining = budget - tracker.evals;
    if remaining > n + 1 {
        let x0 = tracker.best_x.clone();
        let sub = local_refine(problem, &x0, remaining)?;
        tracker.absorb(sub);
    }
    Ok(tracker)
}

/// Nelder–Mead on a closed box; vertices are reflected back into the box.
/// Evaluations stop at `max_evals`.
fn nelder_mead_run<F>(
    problem: &OptProblem<F>,
    x0: &[f64],
    step_frac: f64,
    max_evals: usize,
    tracker: &mut Tracker,
) -> Result<()>
where
    F: Fn(&[f64]) -> f64 + Sync,
{
    let n = problem.n_vars();
    let bounds = problem.bounds();
    let limit = tracker.evals + max_evals;
    let clip = |x: &mut Vec<f64>| {
        for (v, &(lo, hi)) in x.iter_mut().zip(bounds) {
            *v = reflect_into(*v, lo, hi);
        }
    };
    macro_rules! eval {
        ($x:expr) => {{
            if tracker.evals >= limit {
                return Ok(());
            }
            let v = problem.evaluate(&$x);
            tracker.record(&$x, v)?;
            v
        }};
    }

    let mut simplex: Vec<Vec<f64>> = Vec::with_capacity(n + 1);
    let mut start = x0.to_vec();
    clip(&mut start);
    simplex.push(start.clone());
    for i in 0..n {
        let (lo, hi) = bounds[i];
        let step = step_frac * (hi - lo);
        let mut x = start.clone();
        x[i] = if x[i] + step <= hi {
            x[i] + step
        } else {
            x[i] - step
        };
        simplex.push(x);
    }
    let mut vals = Vec::with_capacity(n + 1);
    for x in &simplex {
        vals.push(eval!(x));
    }

    loop {
        // Best first.
        let mut order: Vec<usize> = (0..=n).collect();
        order.sort_by(|&a, &b| vals[b].total_cmp(&vals[a]));
        simplex = order.iter().map(|&i| simplex[i].clone()).collect();
        vals = order.iter().map(|&i| vals[i]).collect();

        let spread = vals[0] - vals[n];
        let diameter = simplex[1..]
            .iter()
            .map(|x| {
                x.iter()
                    .zip(&simplex[0])
                    .map(|(a, b)| (a - b).abs())
                    .fold(0.0, f64::max)
            })
            .fold(0.0, f64::max);
        if diameter <= 1e-13 || (spread <= 1e-16 * vals[0].abs().max(1e-300) && diameter <= 1e-9) {
            return Ok(());
        }

        let centroid: Vec<f64> = (0..n)
            .map(|j| simplex[..n].iter().map(|x| x[j]).sum::<f64>() / n as f64)
            .collect();
        let along = |t: f64| -> Vec<f64> {
            let mut x: Vec<f64> = (0..n)
                .map(|j| centroid[j] + t * (simplex[n][j] - centroid[j]))
                .collect();
            clip(&mut x);
            x
        };

        let xr = along(-1.0);
        let fr = eval!(xr);
        if fr > vals[0] {
            let xe = along(-2.0);
            let fe = eval!(xe);
            if fe > fr {
                simplex[n] = xe;
                vals[n] = fe;
            } else {
                simplex[n] = xr;
                vals[n] = fr;
            }
            continue;
        }
        if fr > vals[n - 1] {
            simplex[n] = xr;
            vals[n] = fr;
            continue;
        }
        let (xc, fc, accept) = if fr > vals[n] {
            let xc = along(-0.5);
            let fc = eval!(xc);
            (xc, fc, fc >= fr)
        } else {
            let xc = along(0.5);
            let fc = eval!(xc);
            (xc, fc, fc > vals[n])
        };
        if accept {
            simplex[n] = xc;
            vals[n] = fc;
            continue;
        }
        for i in 1..=n {
            let mut x: Vec<f64> = (0..n)
                .map(|j| simplex[0][j] + 0.5 * (simplex[i][j] - simplex[0][j]))
                .collect();
            clip(&mut x);
            vals[i] = eval!(x);
            simplex[i] = x;
        }
    }
}

/// Local simplex refinement from `x0`, restarted with shrinking initial steps
/// until a restart brings no improvement.
fn local_refine<F>(problem: &OptProblem<F>, x0: &[f64], budget: usize) -> Result<Tracker>
where
    F: Fn(&[f64]) -> f64 + Sync,
{
    let mut tracker = Tracker::new(problem.n_vars());
    let mut x = x0.to_vec();
    let mut step = 0.02;
    let mut previous = f64::NEG_INFINITY;
    while tracker.evals < budget {
        nelder_mead_run(problem, &x, step, budget - tracker.evals, &mut tracker)?;
        if tracker.best <= previous {
            break;
        }
        previous = tracker.best;
        x = tracker.best_x.clone();
        step = (step * 0.1).max(1e-7);
    }
    Ok(tracker)
}

/// Local refinement of a known good point, for high-precision probes.
pub fn refine<F>(problem: &OptProblem<F>, x0: &[f64], budget: usize) -> Result<OptResult>
where
    F: Fn(&[f64]) -> f64 + Sync,
{
    if x0.len() != problem.n_vars() {
        return Err(Error::DimensionMismatch {
            expected: problem.n_vars(),
            found: x0.len(),
        });
    }
    let start = Instant::now();
    let tracker = local_refine(problem, x0, budget)?;
    Ok(OptResult {
        value: tracker.best,
        argmax: tracker.best_x,
        evaluations: tracker.evals,
        method: Method::NelderMead,
        seed: 0,
        wall_time_ms: start.elapsed().as_secs_f64() * 1e3,
        trace: tracker.trace,
    })
}

fn latin_hypercube(seed: u64, count: usize, bounds: &[(f64, f64)]) -> Vec<Vec<f64>> {
    let columns: Vec<Vec<f64>> = bounds
        .iter()
        .enumerate()
        .map(|(j, &(lo, hi))| {
            let mut rng = substream(seed, 0, j as u64);
            let mut strata: Vec<usize> = (0..count).collect();
            strata.shuffle(&mut rng);
            strata
                .into_iter()
                .map(|s| lo + (hi - lo) * (s as f64 + rng.gen::<f64>()) / count as f64)
                .collect()
        })
        .collect();
    (0..count)
        .map(|k| columns.iter().map(|c| c[k]).collect())
        .collect()
}

fn nelder_mead_multistart<F>(problem: &OptProblem<F>, seed: u64, budget: usize) -> Result<Tracker>
where
    F: Fn(&[f64]) -> f64 + Sync,
{
    let n = problem.n_vars();
    let starts = latin_hypercube(seed, NM_STARTS, problem.bounds());
    let per_start = budget / NM_STARTS;
    let runs: Vec<Result<Tracker>> = starts
        .par_iter()
        .map(|x0| {
            let mut t = Tracker::new(n);
            let mut step = 0.1;
            let mut previous = f64::NEG_INFINITY;
            while t.evals < per_start {
                let from = if t.best.is_finite() {
                    t.best_x.clone()
                } else {
                    x0.clone()
                };
                nelder_mead_run(problem, &from, step, per_start - t.evals, &mut t)?;
                if t.best <= previous {
                    break;
                }
                previous = t.best;
                step = (step * 0.1).max(1e-7);
            }
            Ok(t)
        })
        .collect();
    let mut tracker = Tracker::new(n);
    for run in runs {
        tracker.absorb(run?);
    }
    Ok(tracker)
}

fn simulated_annealing<F>(problem: &OptProblem<F>, seed: u64, budget: usize) -> Result<Tracker>
where
    F: Fn(&[f64]) -> f64 + Sync,
{
    const COOLING: f64 = 0.995;
    const REANNEAL_AFTER: usize = 1000;
    let n = problem.n_vars();
    let bounds = problem.bounds();
    let mut tracker = Tracker::new(n);
    let mut rng = substream(seed, 0, 0);

    // Temperature scale from a small uniform sample.
    let n_init = (budget / 10).clamp(1, 100);
    let mut samples = Vec::with_capacity(n_init);
    for _ in 0..n_init {
        let x = uniform_point(&mut rng, bounds);
        let v = problem.evaluate(&x);
        tracker.record(&x, v)?;
        samples.push(v);
    }
    let mean = samples.iter().sum::<f64>() / n_init as f64;
    let var = samples.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / n_init as f64;
    let t0 = var.sqrt().max(tracker.best.abs() * 0.1).max(1e-300);

    let mut x = tracker.best_x.clone();
    let mut fx = tracker.best;
    let mut temp = t0;
    let mut since_best = 0usize;
    while tracker.evals < budget {
        let y: Vec<f64> = x
            .iter()
            .zip(bounds)
            .map(|(&xi, &(lo, hi))| {
                reflect_into(
                    xi + 0.1 * (hi - lo) * rng.sample::<f64, _>(StandardNormal),
                    lo,
                    hi,
                )
            })
            .collect();
        let fy = problem.evaluate(&y);
        let before = tracker.best;
        tracker.record(&y, fy)?;
        if fy >= fx || rng.gen::<f64>() < ((fy - fx) / temp).exp() {
            x = y;
            fx = fy;
        }
        if tracker.best > before {
            since_best = 0;
        } else {
            since_best += 1;
        }
        temp *= COOLING;
        if since_best >= REANNEAL_AFTER {
            temp = t0;
            x = tracker.best_x.clone();
            fx = tracker.best;
            since_best = 0;
        }
    }
    Ok(tracker)
}

fn random_search<F>(problem: &OptProblem<F>, seed: u64, budget: usize) -> Result<Tracker>
where
    F: Fn(&[f64]) -> f64 + Sync,
{
    const BATCH: usize = 1024;
    let n = problem.n_vars();
    let mut tracker = Tracker::new(n);
    let mut batch = 0u64;
    while tracker.evals < budget {
        let size = BATCH.min(budget - tracker.evals);
        let mut rng = substream(seed, batch, 0);
        let xs: Vec<Vec<f64>> = (0..size)
            .map(|_| uniform_point(&mut rng, problem.bounds()))
            .collect();
        let vals = eval_batch(problem, &xs);
        for (x, v) in xs.iter().zip(vals) {
            tracker.record(x, v)?;
        }
        batch += 1;
    }
    Ok(tracker)
}

/// Point families whose per-type maxima bound the line-stabbing constant.
#[derive(Copy, Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Family {
    Grid,
    Diag3,
}

/// One maximized type (grid) or catalog entry (diagonal).
#[derive(Clone, Debug)]
pub struct TypeOutcome {
    pub label: String,
    pub q: Vec<f64>,
    pub p: Vec<f64>,
    pub result: OptResult,
}

#[derive(Clone, Debug)]
pub struct AllTypesOutcome {
    pub family: Family,
    pub dim: usize,
    pub entries: Vec<TypeOutcome>,
}

impl AllTypesOutcome {
    pub fn best(&self) -> &TypeOutcome {
        self.entries
            .iter()
            .max_by(|a, b| a.result.value.total_cmp(&b.result.value))
            .expect("at least one type")
    }
}

/// Default evaluation budget per type: `2·10^5` up to `d = 5`, `2·10^6` beyond.
pub fn default_budget(d: usize) -> usize {
    if d <= 5 {
        200_000
    } else {
        2_000_000
    }
}

/// Maximizes the grid objective of one normalized type.
pub fn maximize_grid_type(
    d: usize,
    ty: &crate::grid::PathType,
    method: Method,
    seed: u64,
    budget: usize,
) -> Result<TypeOutcome> {
    let obj = grid_objective(d, ty)?;
    let problem = OptProblem::new(|x: &[f64]| obj.evaluate(x), obj.bounds())?;
    let result = maximize(&problem, method, seed, budget)?;
    let (q, p) = obj.qp_from_free(&result.argmax);
    Ok(TypeOutcome {
        label: ty.to_string(),
        q,
        p,
        result,
    })
}

/// Maximizes every normalized grid type in dimension `d`, or every
/// dimension-3 diagonal catalog entry. Each type uses the same seed.
pub fn maximize_all_types(
    d: usize,
    family: Family,
    method: Method,
    seed: u64,
    budget: usize,
) -> Result<AllTypesOutcome> {
    let entries = match family {
        Family::Grid => {
            if d < 3 {
                return Err(Error::InvalidDimension {
                    dim: d,
                    reason: "grid maximization needs d >= 3",
                });
            }
            enumerate_types(d)?
                .iter()
                .map(|ty| maximize_grid_type(d, ty, method, seed, budget))
                .collect::<Result<Vec<_>>>()?
        }
        Family::Diag3 => {
            if d != 3 {
                return Err(Error::InvalidDimension {
                    dim: d,
                    reason: "the diagonal catalog exists only for d = 3",
                });
            }
            diag3_catalog()
                .iter()
                .map(|f| {
                    let problem = OptProblem::new(|x: &[f64]| f.evaluate(x), f.bounds())?;
                    let result = maximize(&problem, method, seed, budget)?;
                    let (q, p) = f.qp_from_free(&result.argmax);
                    Ok(TypeOutcome {
                        label: format!("F{}", f.id),
                        q,
                        p,
                        result,
                    })
                })
                .collect::<Result<Vec<_>>>()?
        }
    };
    Ok(AllTypesOutcome {
        family,
        dim: d,
        entries,
    })
}

/// Maximizes the product of type-region volumes over `[0,1]^d`.
pub fn maximize_fsl(d: usize, method: Method, seed: u64, budget: usize) -> Result<OptResult> {
    if d == 0 {
        return Err(Error::InvalidDimension {
            dim: d,
            reason: "need d >= 1",
        });
    }
    let problem = OptProblem::new(fsl_objective_closed, vec![(0.0, 1.0); d])?;
    maximize(&problem, method, seed, budget)
}
