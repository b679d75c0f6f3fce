//! Derivative-free outer loop and the optimization drivers.
//!
//! The loop is a plain Nelder-Mead simplex search (reflect 1, expand 2,
//! contract 1/2, shrink 1/2), run as a maximizer. Parameters live in
//! [0, pi]; candidate points are folded back through the walls by
//! reflection, which costs nothing since every angle is pi-periodic at the
//! gate level. Drivers wrap it for exact-expectation optimization, R-shot
//! sampled optimization, and warm starts seeded from cat-state parameters.

use serde::{Deserialize, Serialize};

use crate::catstate::cat_schedule;
use crate::derive_seed;
use crate::embedding::Assignment;
use crate::error::{Error, Result};
use crate::instance::{BitString, Grid, ProblemGraph, ENUMERATION_BUDGET};
use crate::objective::{c_quad, objective_from_graph, DiagonalObjective, TabulatedObjective};
use crate::simulator::{expectation, measure, prepare_state_on, ParamSchedule};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const PI: f64 = std::f64::consts::PI;

/// Flat parameter vector in canonical (layer; betas, gammas) order.
pub type ParamVector = Vec<f64>;

/// Per-coordinate bounds of the search box.
pub const PARAM_BOUNDS: (f64, f64) = (0.0, PI);

/// Knobs for a Nelder-Mead run. `max_evals` is the per-restart evaluation
/// budget; `tolerance` stops a run once the simplex value spread (best minus
/// worst) falls below it.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct OptimizerConfig {
    pub max_evals: usize,
    pub tolerance: f64,
    pub reflect: f64,
    pub expand: f64,
    pub contract: f64,
    pub shrink: f64,
    pub restarts: usize,
    pub seed: u64,
    /// Optional stop: end a run once the best value reaches this.
    pub target_value: Option<f64>,
}

impl Default for OptimizerConfig {
    fn default() -> Self {
        OptimizerConfig {
            max_evals: 4000,
            tolerance: 1e-8,
            reflect: 1.0,
            expand: 2.0,
            contract: 0.5,
            shrink: 0.5,
            restarts: 1,
            seed: 0,
            target_value: None,
        }
    }
}

impl OptimizerConfig {
    fn validate(&self) -> Result<()> {
        if self.reflect < 1.0
            || self.expand <= 1.0
            || !(0.0..1.0).contains(&self.contract)
            || !(0.0..1.0).contains(&self.shrink)
        {
            return Err(Error::InvalidArgument(
                "Nelder-Mead coefficients must satisfy reflect >= 1, expand > 1, \
                 0 < contract < 1, 0 < shrink < 1"
                    .into(),
            ));
        }
        Ok(())
    }
}

/// One row of the best-value trace.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TracePoint {
    pub iteration: usize,
    pub evals: usize,
    pub best_value: f64,
}

/// Best measured string seen during a sampled run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BestString {
    pub string: String,
    pub value: f64,
}

/// Outcome of an optimization run (or the winner of a restart batch).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunRecord {
    pub best_value: f64,
    pub best_params: ParamVector,
    /// Non-decreasing best-value trace of the winning run.
    pub trace: Vec<TracePoint>,
    /// Total objective evaluations, summed over restarts.
    pub evals: usize,
    /// Winning restart index.
    pub restart: usize,
    /// Best measured string and its objective value (sampled runs only).
    pub best_string: Option<BestString>,
    /// Per-evaluation frequency of measuring an optimal string (sampled
    /// runs with a known optimum only).
    pub prob_optimum: Option<Vec<f64>>,
    /// Value of the warm-start vertex (warm-started runs only).
    pub warm_start_value: Option<f64>,
    /// best_value / brute-force maximum, when the oracle is affordable.
    pub ratio: Option<f64>,
}

/// Reflects a coordinate back into the search box; the box walls act as
/// mirrors so the fold is continuous.
fn fold_into_bounds(x: f64) -> f64 {
    let (lo, hi) = PARAM_BOUNDS;
    let width = hi - lo;
    let t = (x - lo).rem_euclid(2.0 * width);
    lo + if t > width { 2.0 * width - t } else { t }
}

fn fold_point(x: &mut [f64]) {
    for coord in x {
        *coord = fold_into_bounds(*coord);
    }
}

/// dim+1 points tossed uniformly in the search box; deterministic per seed.
pub fn random_simplex(dim: usize, bounds: (f64, f64), seed: u64) -> Vec<ParamVector> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..=dim)
        .map(|_| (0..dim).map(|_| rng.random_range(bounds.0..bounds.1)).collect())
        .collect()
}

/// Gaussian elimination rank check on the edge vectors p_i - p_0.
fn check_affine_independence(simplex: &[ParamVector]) -> Result<()> {
    let dim = simplex[0].len();
    let mut m: Vec<Vec<f64>> =
        simplex[1..].iter().map(|p| p.iter().zip(&simplex[0]).map(|(a, b)| a - b).collect()).collect();
    let scale = m
        .iter()
        .flat_map(|row| row.iter().map(|v| v.abs()))
        .fold(0.0f64, f64::max)
        .max(1.0);
    for col in 0..dim {
        let pivot_row = (col..dim)
            .max_by(|&a, &b| m[a][col].abs().total_cmp(&m[b][col].abs()))
            .unwrap();
        if m[pivot_row][col].abs() <= 1e-12 * scale {
            return Err(Error::DegenerateSimplex);
        }
        m.swap(col, pivot_row);
        for row in col + 1..dim {
            let factor = m[row][col] / m[col][col];
            for k in col..dim {
                m[row][k] -= factor * m[col][k];
            }
        }
    }
    Ok(())
}

struct Vertex {
    x: ParamVector,
    value: f64,
}

/// Core loop shared by all drivers. The objective returns (value, stop); a
/// true stop flag ends the run after the current evaluation (used by the
/// sampled driver when a measured string hits the target).
fn nelder_mead_core(
    f: &mut dyn FnMut(&[f64]) -> (f64, bool),
    simplex: Vec<ParamVector>,
    config: &OptimizerConfig,
) -> Result<RunRecord> {
    config.validate()?;
    let dim = simplex.first().map_or(0, Vec::len);
    if dim == 0 || simplex.len() != dim + 1 {
        return Err(Error::InvalidArgument(format!(
            "simplex must hold dim+1 points of equal dimension >= 1, got {} points",
            simplex.len()
        )));
    }
    if simplex.iter().any(|p| p.len() != dim) {
        return Err(Error::InvalidArgument("ragged simplex".into()));
    }
    check_affine_independence(&simplex)?;

    let mut evals = 0usize;
    let mut stop = false;
    let mut eval = |x: &[f64], evals: &mut usize, stop: &mut bool| -> f64 {
        let (value, s) = f(x);
        *evals += 1;
        *stop |= s;
        value
    };

    let mut vertices: Vec<Vertex> = simplex
        .into_iter()
        .map(|x| {
            let value = eval(&x, &mut evals, &mut stop);
            Vertex { x, value }
        })
        .collect();

    let mut trace: Vec<TracePoint> = Vec::new();
    let mut iteration = 0usize;
    loop {
        vertices.sort_by(|a, b| b.value.total_cmp(&a.value)); // best first
        let best = vertices[0].value;
        if trace.last().map_or(true, |t| best > t.best_value) || trace.is_empty() {
            trace.push(TracePoint { iteration, evals, best_value: best });
        }
        let worst = vertices[dim].value;
        let reached_target = config.target_value.is_some_and(|t| best >= t);
        if stop || reached_target || evals >= config.max_evals || best - worst < config.tolerance
        {
            break;
        }
        iteration += 1;

        // centroid of all but the worst
        let mut centroid = vec![0.0; dim];
        for vertex in &vertices[..dim] {
            for (c, &xi) in centroid.iter_mut().zip(&vertex.x) {
                *c += xi;
            }
        }
        for c in &mut centroid {
            *c /= dim as f64;
        }

        let step = |coeff: f64, from: &[f64]| -> ParamVector {
            let mut x: ParamVector = centroid
                .iter()
                .zip(from)
                .map(|(&c, &w)| c + coeff * (c - w))
                .collect();
            fold_point(&mut x);
            x
        };

        let reflected = step(config.reflect, &vertices[dim].x);
        let f_reflected = eval(&reflected, &mut evals, &mut stop);

        if f_reflected > vertices[0].value {
            // try to expand; keep the better of the two (greedy)
            let expanded = step(config.reflect * config.expand, &vertices[dim].x);
            let f_expanded = eval(&expanded, &mut evals, &mut stop);
            vertices[dim] = if f_expanded > f_reflected {
                Vertex { x: expanded, value: f_expanded }
            } else {
                Vertex { x: reflected, value: f_reflected }
            };
        } else if f_reflected > vertices[dim - 1].value {
            vertices[dim] = Vertex { x: reflected, value: f_reflected };
        } else {
            let (contracted, threshold) = if f_reflected > vertices[dim].value {
                // outside contraction
                (step(config.reflect * config.contract, &vertices[dim].x), f_reflected)
            } else {
                // inside contraction
                (step(-config.contract, &vertices[dim].x), vertices[dim].value)
            };
            let f_contracted = eval(&contracted, &mut evals, &mut stop);
            if f_contracted >= threshold {
                vertices[dim] = Vertex { x: contracted, value: f_contracted };
            } else {
                // shrink everything toward the best vertex
                for i in 1..=dim {
                    let mut x: ParamVector = vertices[0]
                        .x
                        .iter()
                        .zip(&vertices[i].x)
                        .map(|(&b, &v)| b + config.shrink * (v - b))
                        .collect();
                    fold_point(&mut x);
                    let value = eval(&x, &mut evals, &mut stop);
                    vertices[i] = Vertex { x, value };
                    if stop || evals >= config.max_evals {
                        break;
                    }
                }
            }
        }
    }

    vertices.sort_by(|a, b| b.value.total_cmp(&a.value));
    Ok(RunRecord {
        best_value: vertices[0].value,
        best_params: vertices[0].x.clone(),
        trace,
        evals,
        restart: 0,
        best_string: None,
        prob_optimum: None,
        warm_start_value: None,
        ratio: None,
    })
}

/// Nelder-Mead maximization of `f` from a caller-supplied starting simplex.
pub fn nelder_mead(
    mut f: impl FnMut(&[f64]) -> f64,
    simplex: Vec<ParamVector>,
    config: &OptimizerConfig,
) -> Result<RunRecord> {
    nelder_mead_core(&mut |x| (f(x), false), simplex, config)
}

fn pick_winner(mut runs: Vec<RunRecord>) -> RunRecord {
    let total_evals: usize = runs.iter().map(|r| r.evals).sum();
    let mut best = 0;
    for (k, run) in runs.iter().enumerate() {
        if run.best_value > runs[best].best_value {
            best = k;
        }
    }
    let mut winner = runs.swap_remove(best);
    winner.restart = best;
    winner.evals = total_evals;
    winner
}

/// Exact-expectation driver over an arbitrary coupling. One restart per
/// seed stream; the winner (ties to the lowest restart index) is returned
/// with the total evaluation count.
fn optimize_expectation_on(
    n_qubits: usize,
    edges: &[(usize, usize)],
    objective: &TabulatedObjective,
    p: usize,
    config: &OptimizerConfig,
    seed_vertex: Option<&ParamVector>,
) -> Result<RunRecord> {
    let dim = p * (n_qubits + edges.len());
    if p == 0 {
        // no parameters: the state is |s> regardless
        let state = prepare_state_on(n_qubits, edges, &ParamSchedule::zero(0, n_qubits, edges.len()))?;
        let value = expectation(&state, objective)?;
        return Ok(RunRecord {
            best_value: value,
            best_params: Vec::new(),
            trace: vec![TracePoint { iteration: 0, evals: 1, best_value: value }],
            evals: 1,
            restart: 0,
            best_string: None,
            prob_optimum: None,
            warm_start_value: None,
            ratio: None,
        });
    }

    let value_of = |x: &[f64]| -> f64 {
        let schedule = ParamSchedule::from_flat(n_qubits, edges.len(), p, x)
            .expect("optimizer produced a malformed parameter vector");
        let state = prepare_state_on(n_qubits, edges, &schedule)
            .expect("schedule validated against the coupling");
        expectation(&state, objective).expect("objective validated against the state")
    };

    let mut runs = Vec::with_capacity(config.restarts.max(1));
    for k in 0..config.restarts.max(1) {
        let simplex_seed = derive_seed(config.seed, &format!("simplex/restart{k}"));
        let mut simplex = random_simplex(dim, PARAM_BOUNDS, simplex_seed);
        let mut warm_value = None;
        if let Some(vertex) = seed_vertex {
            simplex[0] = vertex.clone();
            warm_value = Some(value_of(vertex));
        }
        let mut record = nelder_mead_core(&mut |x| (value_of(x), false), simplex, config)?;
        record.warm_start_value = warm_value;
        runs.push(record);
    }
    Ok(pick_winner(runs))
}

fn attach_ratio(record: &mut RunRecord, graph: &ProblemGraph) -> Result<()> {
    if graph.n() <= ENUMERATION_BUDGET {
        let (max, _) = graph.brute_force_maxcut()?;
        record.ratio = Some(record.best_value / max);
    }
    Ok(())
}

fn check_embedding_sizes(grid: &Grid, graph: &ProblemGraph, assignment: &Assignment) -> Result<()> {
    if graph.n() != grid.site_count() {
        return Err(Error::LengthMismatch { expected: grid.site_count(), got: graph.n() });
    }
    if assignment.n() != graph.n() {
        return Err(Error::LengthMismatch { expected: graph.n(), got: assignment.n() });
    }
    Ok(())
}

/// Exact-expectation driver over the two shared angles (gamma, beta): the
/// depth-1 state with every edge at gamma/2 and every qubit at beta.
fn optimize_two_angle_on(
    n_qubits: usize,
    edges: &[(usize, usize)],
    objective: &TabulatedObjective,
    config: &OptimizerConfig,
) -> Result<RunRecord> {
    let n_edges = edges.len();
    let value_of = |x: &[f64]| -> f64 {
        let schedule = ParamSchedule::new(
            vec![vec![x[1]; n_qubits]],
            vec![vec![x[0] / 2.0; n_edges]],
        )
        .expect("two-angle schedule from in-bounds parameters");
        let state = prepare_state_on(n_qubits, edges, &schedule)
            .expect("schedule validated against the coupling");
        expectation(&state, objective).expect("objective validated against the state")
    };
    let mut runs = Vec::with_capacity(config.restarts.max(1));
    for k in 0..config.restarts.max(1) {
        let simplex_seed = derive_seed(config.seed, &format!("simplex/restart{k}"));
        let simplex = random_simplex(2, PARAM_BOUNDS, simplex_seed);
        runs.push(nelder_mead_core(&mut |x| (value_of(x), false), simplex, config)?);
    }
    Ok(pick_winner(runs))
}

/// Two-angle (shared gamma, beta) optimization of the embedded MaxCut
/// objective on the grid ansatz.
pub fn optimize_two_angle(
    grid: &Grid,
    graph: &ProblemGraph,
    assignment: &Assignment,
    config: &OptimizerConfig,
) -> Result<RunRecord> {
    check_embedding_sizes(grid, graph, assignment)?;
    let objective =
        TabulatedObjective::from_objective(&objective_from_graph(graph, assignment)?)?;
    let mut record = optimize_two_angle_on(grid.site_count(), grid.edges(), &objective, config)?;
    attach_ratio(&mut record, graph)?;
    Ok(record)
}

/// Two-angle optimization with the ansatz on the problem graph's own edges
/// (the original depth-1 algorithm).
pub fn optimize_two_angle_native(
    graph: &ProblemGraph,
    config: &OptimizerConfig,
) -> Result<RunRecord> {
    let objective = TabulatedObjective::from_objective(&objective_from_graph(
        graph,
        &Assignment::identity(graph.n()),
    )?)?;
    let mut record = optimize_two_angle_on(graph.n(), graph.edges(), &objective, config)?;
    attach_ratio(&mut record, graph)?;
    Ok(record)
}

/// Maximizes the exact expectation of the embedded MaxCut objective over a
/// level-p grid schedule; best of `config.restarts` independent runs.
pub fn optimize_exact(
    grid: &Grid,
    graph: &ProblemGraph,
    assignment: &Assignment,
    p: usize,
    config: &OptimizerConfig,
) -> Result<RunRecord> {
    check_embedding_sizes(grid, graph, assignment)?;
    let objective =
        TabulatedObjective::from_objective(&objective_from_graph(graph, assignment)?)?;
    let mut record =
        optimize_expectation_on(grid.site_count(), grid.edges(), &objective, p, config, None)?;
    attach_ratio(&mut record, graph)?;
    Ok(record)
}

/// Same protocol with the ansatz living on the problem graph's own edges
/// (identity assignment); the comparison baseline for the grid runs.
pub fn optimize_exact_native(
    graph: &ProblemGraph,
    p: usize,
    config: &OptimizerConfig,
) -> Result<RunRecord> {
    let objective = TabulatedObjective::from_objective(&objective_from_graph(
        graph,
        &Assignment::identity(graph.n()),
    )?)?;
    let mut record =
        optimize_expectation_on(graph.n(), graph.edges(), &objective, p, config, None)?;
    attach_ratio(&mut record, graph)?;
    Ok(record)
}

/// R-shot sampled driver: every objective query prepares the state, draws
/// `shots` measurements, and returns the sample mean. Tracks the best string
/// ever observed and stops early once a measured string reaches the target
/// (the brute-force optimum by default on small instances).
pub fn optimize_sampled(
    grid: &Grid,
    graph: &ProblemGraph,
    assignment: &Assignment,
    p: usize,
    shots: usize,
    config: &OptimizerConfig,
) -> Result<RunRecord> {
    check_embedding_sizes(grid, graph, assignment)?;
    if shots == 0 {
        return Err(Error::InvalidArgument("shot count must be at least 1".into()));
    }
    let objective =
        TabulatedObjective::from_objective(&objective_from_graph(graph, assignment)?)?;
    let n = grid.site_count();

    // Early-stop target: explicit config target, else the brute-force
    // optimum when enumeration is cheap (n <= 24), else disabled.
    let string_target = match config.target_value {
        Some(t) => Some(t),
        None if graph.n() <= 24 => Some(graph.brute_force_maxcut()?.0),
        None => None,
    };

    let mut runs = Vec::with_capacity(config.restarts.max(1));
    for k in 0..config.restarts.max(1) {
        let mut best_string: Option<BestString> = None;
        let mut prob_trace: Vec<f64> = Vec::new();
        let mut eval_counter = 0usize;
        let mut sampled = |x: &[f64]| -> (f64, bool) {
            let schedule = ParamSchedule::from_flat(n, grid.edge_count(), p, x)
                .expect("optimizer produced a malformed parameter vector");
            let state = prepare_state_on(n, grid.edges(), &schedule)
                .expect("schedule validated against the coupling");
            let shot_seed =
                derive_seed(config.seed, &format!("shots/restart{k}/eval{eval_counter}"));
            eval_counter += 1;
            let samples = measure(&state, shots, shot_seed);
            let mut sum = 0.0;
            let mut hits = 0usize;
            let mut stop = false;
            for z in &samples {
                let value = objective.value(z.index());
                sum += value;
                if let Some(target) = string_target {
                    if value >= target {
                        hits += 1;
                        stop = true;
                    }
                }
                if best_string.as_ref().is_none_or(|b| value > b.value) {
                    best_string = Some(BestString { string: z.to_string(), value });
                }
            }
            if string_target.is_some() {
                prob_trace.push(hits as f64 / shots as f64);
            }
            (sum / shots as f64, stop)
        };

        let simplex_seed = derive_seed(config.seed, &format!("simplex/restart{k}"));
        let simplex = random_simplex(p * (n + grid.edge_count()), PARAM_BOUNDS, simplex_seed);
        let mut record = nelder_mead_core(&mut sampled, simplex, config)?;
        record.best_string = best_string;
        record.prob_optimum = if string_target.is_some() { Some(prob_trace) } else { None };
        runs.push(record);
    }
    let mut winner = pick_winner(runs);
    attach_ratio(&mut winner, graph)?;
    Ok(winner)
}

/// How warm-start parameters are obtained.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum WarmStartMode {
    /// Direct cat-state construction (depth must fit in p).
    Analytic,
    /// Optimize the Hamming quadratic objective first, then reuse its
    /// parameters.
    CQuad,
}

/// Relative slack on (n/2)^2 at which the quadratic warm-start phase stops.
const CQUAD_STOP_FRACTION: f64 = 1.0 - 1e-3;

/// Seeds one simplex vertex with parameters that reproduce the classical
/// string `w` (through the cat state (|w>+|w-bar>)/sqrt(2), which scores
/// exactly C(w)), then maximizes the MaxCut objective. `w` is indexed by
/// problem vertices and mapped onto the grid through the assignment.
pub fn warm_start(
    grid: &Grid,
    graph: &ProblemGraph,
    assignment: &Assignment,
    w: &BitString,
    p: usize,
    config: &OptimizerConfig,
    mode: WarmStartMode,
) -> Result<RunRecord> {
    check_embedding_sizes(grid, graph, assignment)?;
    if w.len() != graph.n() {
        return Err(Error::LengthMismatch { expected: graph.n(), got: w.len() });
    }
    if p == 0 {
        return Err(Error::DepthTooSmall { needed: 1, got: 0 });
    }

    // push w onto the grid: the bit at site a[v] is w[v]
    let mut site_bits = 0u64;
    for v in 0..graph.n() {
        if w.bit(v) {
            site_bits |= 1 << assignment.site_of(v);
        }
    }
    let w_sites = BitString::new(grid.site_count(), site_bits);

    let seed_params = match mode {
        WarmStartMode::Analytic => cat_schedule(grid, &w_sites)?.padded_to(p)?.to_flat(),
        WarmStartMode::CQuad => {
            let quad = c_quad(w_sites);
            let mut quad_config = config.clone();
            quad_config.seed = derive_seed(config.seed, "cquad");
            quad_config.target_value = Some(CQUAD_STOP_FRACTION * quad.max_value());
            let table = TabulatedObjective::from_objective(&quad)?;
            let record = optimize_expectation_on(
                grid.site_count(),
                grid.edges(),
                &table,
                p,
                &quad_config,
                None,
            )?;
            record.best_params
        }
    };

    let objective =
        TabulatedObjective::from_objective(&objective_from_graph(graph, assignment)?)?;
    let mut record = optimize_expectation_on(
        grid.site_count(),
        grid.edges(),
        &objective,
        p,
        config,
        Some(&seed_params),
    )?;
    attach_ratio(&mut record, graph)?;
    Ok(record)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::analytic::{optimal_angles, p1_objective_estimate, AnglePair};
    use crate::embedding::greedy_embed;
    use crate::instance::random_regular_graph;

    fn quick_config(max_evals: usize, seed: u64) -> OptimizerConfig {
        OptimizerConfig { max_evals, seed, ..OptimizerConfig::default() }
    }

    #[test]
    fn converges_on_a_smooth_concave_function() {
        let target = [0.3, 1.1, 2.0, 0.7, 1.9];
        let f = |x: &[f64]| -> f64 {
            -x.iter().zip(&target).map(|(a, b)| (a - b) * (a - b)).sum::<f64>()
        };
        let config = quick_config(5000, 3);
        let simplex = random_simplex(5, PARAM_BOUNDS, 3);
        let record = nelder_mead(f, simplex, &config).unwrap();
        assert!(record.evals <= 5000);
        for (got, want) in record.best_params.iter().zip(&target) {
            assert!((got - want).abs() < 1e-4, "{got} vs {want}");
        }
    }

    #[test]
    fn constant_function_stops_on_spread_tolerance() {
        let config = quick_config(10_000, 0);
        let record = nelder_mead(|_| 1.5, random_simplex(4, PARAM_BOUNDS, 0), &config).unwrap();
        assert_eq!(record.best_value, 1.5);
        assert_eq!(record.evals, 5); // initial simplex only
    }

    #[test]
    fn recovers_the_analytic_two_angle_optimum() {
        let m = 24;
        let counts = (8usize, 2usize, 1usize);
        let config = OptimizerConfig { max_evals: 4000, tolerance: 1e-12, ..quick_config(0, 5) };
        let record = nelder_mead(
            |x| p1_objective_estimate(m, counts, AnglePair::new(x[0], x[1])).unwrap(),
            random_simplex(2, PARAM_BOUNDS, 17),
            &config,
        )
        .unwrap();
        let (_, contribution) = optimal_angles(counts.0, counts.1, counts.2).unwrap();
        let expect = m as f64 / 2.0 + contribution;
        assert!((record.best_value - expect).abs() < 1e-5, "{} vs {expect}", record.best_value);
    }

    #[test]
    fn trace_is_monotone_and_runs_are_deterministic() {
        let f = |x: &[f64]| -> f64 { (x[0] - 1.0).cos() + (x[1] - 2.0).cos() };
        let config = quick_config(300, 9);
        let a = nelder_mead(f, random_simplex(2, PARAM_BOUNDS, 9), &config).unwrap();
        let b = nelder_mead(f, random_simplex(2, PARAM_BOUNDS, 9), &config).unwrap();
        assert_eq!(a, b);
        for pair in a.trace.windows(2) {
            assert!(pair[1].best_value >= pair[0].best_value);
        }
    }

    #[test]
    fn simplex_toss_has_the_right_shape() {
        let simplex = random_simplex(160, PARAM_BOUNDS, 1);
        assert_eq!(simplex.len(), 161);
        assert!(simplex.iter().flatten().all(|&x| (0.0..PI).contains(&x)));
        assert_eq!(simplex, random_simplex(160, PARAM_BOUNDS, 1));
        assert_ne!(simplex, random_simplex(160, PARAM_BOUNDS, 2));
    }

    #[test]
    fn degenerate_simplex_is_rejected() {
        let simplex = vec![vec![0.0, 0.0], vec![1.0, 1.0], vec![2.0, 2.0]];
        assert!(matches!(
            nelder_mead(|x| x[0], simplex, &quick_config(100, 0)),
            Err(Error::DegenerateSimplex)
        ));
    }

    #[test]
    fn folding_respects_the_walls() {
        assert!((fold_into_bounds(-0.3) - 0.3).abs() < 1e-15);
        assert!((fold_into_bounds(PI + 0.4) - (PI - 0.4)).abs() < 1e-12);
        assert!((fold_into_bounds(2.0 * PI + 0.1) - 0.1).abs() < 1e-12);
        assert_eq!(fold_into_bounds(1.0), 1.0);
    }

    #[test]
    fn p0_exact_run_scores_half_the_edges() {
        let grid = Grid::new(2, 2).unwrap();
        let graph = ProblemGraph::k4();
        let record =
            optimize_exact(&grid, &graph, &Assignment::identity(4), 0, &quick_config(10, 0))
                .unwrap();
        assert!((record.best_value - 3.0).abs() < 1e-12);
        assert_eq!(record.ratio, Some(0.75));
    }

    #[test]
    fn exact_runs_are_deterministic_and_beat_random_guessing() {
        let grid = Grid::new(2, 3).unwrap();
        let graph = random_regular_graph(6, 3, 2).unwrap();
        let assignment = greedy_embed(&graph, &grid, 0).unwrap();
        let config =
            OptimizerConfig { restarts: 2, ..quick_config(400, 7) };
        let a = optimize_exact(&grid, &graph, &assignment, 1, &config).unwrap();
        let b = optimize_exact(&grid, &graph, &assignment, 1, &config).unwrap();
        assert_eq!(a, b);
        assert!(a.best_value > graph.edge_count() as f64 / 2.0);
        assert!(a.ratio.unwrap() > 0.5);
        for pair in a.trace.windows(2) {
            assert!(pair[1].best_value >= pair[0].best_value);
        }
    }

    #[test]
    fn sampled_runs_early_stop_on_the_optimum() {
        let grid = Grid::new(2, 2).unwrap();
        let graph = ProblemGraph::k4();
        let config = quick_config(200, 11);
        let record =
            optimize_sampled(&grid, &graph, &Assignment::identity(4), 1, 128, &config).unwrap();
        let best = record.best_string.as_ref().expect("sampled runs record the best string");
        // K4's optimum is 4 and almost every batch contains one such string,
        // so the run must stop the moment one is measured.
        assert_eq!(best.value, 4.0);
        let prob = record.prob_optimum.as_ref().unwrap();
        assert_eq!(prob.len(), record.evals);
        assert!(prob.last().unwrap() > &0.0);
        assert_eq!(record, optimize_sampled(&grid, &graph, &Assignment::identity(4), 1, 128, &config).unwrap());
    }

    #[test]
    fn warm_start_seeded_vertex_scores_the_classical_string() {
        let grid = Grid::new(2, 3).unwrap();
        let graph = random_regular_graph(6, 3, 4).unwrap();
        let assignment = greedy_embed(&graph, &grid, 1).unwrap();
        let (_, maximizers) = graph.brute_force_maxcut().unwrap();
        // a string strictly below the optimum
        let w = (0..1u64 << 6)
            .map(|bits| BitString::new(6, bits))
            .find(|z| !maximizers.contains(z))
            .unwrap();
        let cw = graph.maxcut(&w).unwrap();
        let config = quick_config(600, 3);
        let record = warm_start(
            &grid,
            &graph,
            &assignment,
            &w,
            cat_schedule(&grid, &w).unwrap().p(),
            &config,
            WarmStartMode::Analytic,
        )
        .unwrap();
        let seeded = record.warm_start_value.unwrap();
        assert!((seeded - cw).abs() < 1e-6, "seeded vertex {seeded} vs C(w) {cw}");
        assert!(record.best_value >= cw);
    }

    #[test]
    fn warm_start_rejects_depths_below_the_cat_plan() {
        let grid = Grid::new(3, 3).unwrap();
        let graph = random_regular_graph(9, 3, 0);
        // 9 vertices is odd, so build a valid instance another way: use 3x3=9
        // sites but a 8-vertex graph is a size mismatch anyway; check the
        // depth error with a direct cat schedule instead.
        assert!(graph.is_err());
        let w = BitString::zeros(9);
        let schedule = cat_schedule(&grid, &w).unwrap();
        assert_eq!(schedule.p(), 2);
        assert!(matches!(schedule.padded_to(1), Err(Error::DepthTooSmall { .. })));
    }

    #[test]
    fn cquad_warm_start_reaches_the_cat_state_on_a_small_grid() {
        let grid = Grid::new(2, 2).unwrap();
        let graph = ProblemGraph::k4();
        // 1-3 split: C(w) = 3, strictly below K4's optimum of 4
        let w = BitString::new(4, 0b1110);
        assert_eq!(graph.maxcut(&w).unwrap(), 3.0);
        let config = OptimizerConfig { restarts: 3, ..quick_config(2000, 23) };
        let record = warm_start(
            &grid,
            &graph,
            &Assignment::identity(4),
            &w,
            2,
            &config,
            WarmStartMode::CQuad,
        )
        .unwrap();
        let cw = graph.maxcut(&w).unwrap();
        // the quadratic phase may stop marginally short of a perfect cat
        assert!(record.warm_start_value.unwrap() >= cw - 0.1);
        assert!(record.best_value >= cw);
    }
}
