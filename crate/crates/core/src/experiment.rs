//! Experiment configuration, instance generation, trial orchestration,
//! and result emission.
//!
//! A single JSON config plus flag overrides fully determines a run:
//! given the same config and seed, every emitted byte is identical
//! (wall-clock time lives only in the summary). Trials derive child
//! random streams from `(seed, "trial", index)` and may execute in
//! parallel; rows are ordered by trial index regardless of completion
//! order.

use std::thread;
use std::time::Instant;

use serde::{Deserialize, Serialize};

use crate::domain::{enumerate_feasible, Domain, MatroidOracle};
use crate::error::{Error, Result};
use crate::exchange::{
    build_knapsack_heavy_map, build_knapsack_light_map, build_matroid_rota_map,
    build_path_exchange_map, build_path_multiset, build_trivial_k_exchange_map, certify_uniformity,
    verify_gain_bound, CertMethod, ExchangeMap, RotaFamily,
};
use crate::domain::k_exchange_certificate;
use crate::objective::{check_axioms, Objective, ObjectiveClass, SetFunction};
use crate::rng::RandomSource;
use crate::scenario::sample_activation;
use crate::set::Subset;
use crate::solver::Solver;
use crate::strategy::{
    compute_round_count, run_adaptive_local_search, run_algorithm1, run_knapsack_combined,
    StrategyConfig,
};

/// Hard cap on instance size; brute-force omniscient oracles must stay
/// tractable.
pub const ELEMENT_CAP: usize = 22;

/// Domain description: either an explicit instance or a seeded generator.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum DomainSpec {
    Matching {
        vertices: usize,
        edges: Vec<(usize, usize)>,
    },
    SetPacking {
        items: usize,
        sets: Vec<Vec<usize>>,
    },
    Knapsack {
        sizes: Vec<f64>,
    },
    Cardinality {
        n: usize,
        rank: usize,
    },
    UniformMatroid {
        n: usize,
        rank: usize,
    },
    PartitionMatroid {
        block_of: Vec<usize>,
        capacities: Vec<usize>,
    },
    GraphicMatroid {
        vertices: usize,
        edges: Vec<(usize, usize)>,
    },
    MatroidBase {
        matroid: Box<DomainSpec>,
    },
    Intersection {
        matroids: Vec<DomainSpec>,
    },
    /// Erdos-Renyi graph; elements are its edges, with generated weights.
    RandomGraphMatching {
        n_vertices: usize,
        edge_prob: f64,
        weight_range: (f64, f64),
    },
    RandomPartitionMatroid {
        n_elements: usize,
        n_blocks: usize,
        weight_range: (f64, f64),
    },
    RandomKnapsack {
        n: usize,
        size_range: (f64, f64),
        weight_range: (f64, f64),
    },
}

/// Objective description. When absent, the domain generator's weights
/// define a linear objective.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum ObjectiveSpec {
    Linear { weights: Vec<f64> },
    Coverage { sets: Vec<Vec<usize>>, item_weights: Vec<f64> },
    Explicit { n: usize, table: Vec<f64> },
    RandomLinear { weight_range: (f64, f64) },
    RandomCoverage { items: usize, density: f64, item_weight_range: (f64, f64) },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum StrategyKind {
    Algorithm1,
    AdaptiveLocalSearch,
    KnapsackCombined,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SolverSpec {
    BruteForce,
    Greedy,
    LocalSearchKExchange,
    KnapsackDp,
    KnapsackEnumGreedy,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum OutputFormat {
    Csv,
    Json,
}

fn default_trials() -> u64 {
    1
}

fn default_true() -> bool {
    true
}

/// Full experiment description; see the README for the schema.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub domain: DomainSpec,
    #[serde(default)]
    pub objective: Option<ObjectiveSpec>,
    /// Uniform activation probability; `probs` overrides it per element.
    #[serde(default)]
    pub p: Option<f64>,
    #[serde(default)]
    pub probs: Option<Vec<f64>>,
    pub epsilon: f64,
    pub delta: f64,
    pub strategy: StrategyKind,
    #[serde(default)]
    pub solver: Option<SolverSpec>,
    #[serde(default = "default_trials")]
    pub trials: u64,
    pub seed: u64,
    /// Uniformity parameters feeding the round-count formula
    /// (algorithm1 only; the combined strategy derives its own).
    #[serde(default)]
    pub alpha: Option<f64>,
    #[serde(default)]
    pub beta: Option<f64>,
    #[serde(default)]
    pub eta: Option<f64>,
    #[serde(default)]
    pub n_override: Option<usize>,
    /// Ratio threshold for the success-probability summary; defaults to
    /// the guarantee implied by the strategy and parameters.
    #[serde(default)]
    pub threshold: Option<f64>,
    /// Local-search parameters (adaptive-local-search only).
    #[serde(default)]
    pub local_search_k: Option<usize>,
    #[serde(default)]
    pub epsilon_ls: Option<f64>,
    /// Draw a fresh instance per trial (default) or reuse one.
    #[serde(default = "default_true")]
    pub fresh_instance_per_trial: bool,
    #[serde(default)]
    pub out: Option<String>,
    #[serde(default)]
    pub format: Option<OutputFormat>,
}

fn matroid_from_spec(spec: &DomainSpec) -> Result<MatroidOracle> {
    match spec {
        DomainSpec::UniformMatroid { n, rank } => MatroidOracle::uniform(*n, *rank),
        DomainSpec::PartitionMatroid { block_of, capacities } => {
            MatroidOracle::partition(block_of.clone(), capacities.clone())
        }
        DomainSpec::GraphicMatroid { vertices, edges } => {
            MatroidOracle::graphic(*vertices, edges.clone())
        }
        other => Err(Error::InvalidConfig(format!("{other:?} is not a matroid spec"))),
    }
}

/// Instantiate `(Domain, Objective)` from specs, deterministically in the
/// random source. Generated weights define the default linear objective;
/// an explicit objective spec overrides them.
pub fn generate_instance(
    domain_spec: &DomainSpec,
    objective_spec: Option<&ObjectiveSpec>,
    rng: &mut RandomSource,
) -> Result<(Domain, Objective)> {
    let (domain, generated_weights): (Domain, Option<Vec<f64>>) = match domain_spec {
        DomainSpec::Matching { vertices, edges } => {
            (Domain::matching(*vertices, edges.clone())?, None)
        }
        DomainSpec::SetPacking { items, sets } => (Domain::set_packing(*items, sets)?, None),
        DomainSpec::Knapsack { sizes } => (Domain::knapsack(sizes.clone())?, None),
        DomainSpec::Cardinality { n, rank } => (Domain::cardinality(*n, *rank)?, None),
        DomainSpec::UniformMatroid { .. }
        | DomainSpec::PartitionMatroid { .. }
        | DomainSpec::GraphicMatroid { .. } => {
            (Domain::MatroidIndependent(matroid_from_spec(domain_spec)?), None)
        }
        DomainSpec::MatroidBase { matroid } => {
            (Domain::MatroidBase(matroid_from_spec(matroid)?), None)
        }
        DomainSpec::Intersection { matroids } => {
            let oracles: Result<Vec<_>> = matroids.iter().map(matroid_from_spec).collect();
            (Domain::Intersection(oracles?), None)
        }
        DomainSpec::RandomGraphMatching { n_vertices, edge_prob, weight_range } => {
            if !(0.0..=1.0).contains(edge_prob) {
                return Err(Error::InvalidConfig(format!("edge_prob {edge_prob}")));
            }
            let mut rng = rng.child("matching");
            let mut edges = Vec::new();
            let mut weights = Vec::new();
            for u in 0..*n_vertices {
                for v in (u + 1)..*n_vertices {
                    if rng.bernoulli(*edge_prob) {
                        edges.push((u, v));
                        weights.push(rng.range_f64(weight_range.0, weight_range.1));
                    }
                }
            }
            if edges.is_empty() {
                edges.push((0, 1));
                weights.push(rng.range_f64(weight_range.0, weight_range.1));
            }
            (Domain::matching(*n_vertices, edges)?, Some(weights))
        }
        DomainSpec::RandomPartitionMatroid { n_elements, n_blocks, weight_range } => {
            let mut rng = rng.child("partition");
            if *n_blocks == 0 {
                return Err(Error::InvalidConfig("n_blocks must be positive".into()));
            }
            let block_of: Vec<usize> =
                (0..*n_elements).map(|_| rng.range_usize(*n_blocks)).collect();
            let capacities: Vec<usize> = (0..*n_blocks).map(|_| 1 + rng.range_usize(2)).collect();
            let weights: Vec<f64> =
                (0..*n_elements).map(|_| rng.range_f64(weight_range.0, weight_range.1)).collect();
            (
                Domain::MatroidIndependent(MatroidOracle::partition(block_of, capacities)?),
                Some(weights),
            )
        }
        DomainSpec::RandomKnapsack { n, size_range, weight_range } => {
            let mut rng = rng.child("knapsack");
            let sizes: Vec<f64> =
                (0..*n).map(|_| rng.range_f64(size_range.0, size_range.1)).collect();
            let weights: Vec<f64> =
                (0..*n).map(|_| rng.range_f64(weight_range.0, weight_range.1)).collect();
            (Domain::knapsack(sizes)?, Some(weights))
        }
    };
    let n = domain.universe_len();
    if n > ELEMENT_CAP {
        return Err(Error::UniverseTooLarge { size: n, max: ELEMENT_CAP });
    }
    let objective = match objective_spec {
        None => {
            let weights = generated_weights.unwrap_or_else(|| vec![1.0; n]);
            Objective::linear(weights)?
        }
        Some(ObjectiveSpec::Linear { weights }) => Objective::linear(weights.clone())?,
        Some(ObjectiveSpec::Coverage { sets, item_weights }) => {
            Objective::coverage(n, sets, item_weights.clone())?
        }
        Some(ObjectiveSpec::Explicit { n: tn, table }) => {
            if *tn != n {
                return Err(Error::InvalidConfig("explicit table universe mismatch".into()));
            }
            Objective::explicit(n, table.clone())?
        }
        Some(ObjectiveSpec::RandomLinear { weight_range }) => {
            let mut rng = rng.child("linear-objective");
            Objective::linear(
                (0..n).map(|_| rng.range_f64(weight_range.0, weight_range.1)).collect(),
            )?
        }
        Some(ObjectiveSpec::RandomCoverage { items, density, item_weight_range }) => {
            let mut rng = rng.child("coverage-objective");
            let sets: Vec<Vec<usize>> = (0..n)
                .map(|_| (0..*items).filter(|_| rng.bernoulli(*density)).collect())
                .collect();
            let item_weights: Vec<f64> = (0..*items)
                .map(|_| rng.range_f64(item_weight_range.0, item_weight_range.1))
                .collect();
            Objective::coverage(n, &sets, item_weights)?
        }
    };
    if objective.universe_len() != n {
        return Err(Error::InvalidConfig(format!(
            "objective over {} elements, domain over {n}",
            objective.universe_len()
        )));
    }
    Ok((domain, objective))
}

/// One row of experiment output; the CSV column order is fixed.
#[derive(Clone, Debug, Serialize)]
pub struct TrialRow {
    pub trial: u64,
    pub seed: u64,
    pub domain: String,
    pub objective: String,
    pub p: f64,
    pub epsilon: f64,
    pub delta: f64,
    #[serde(rename = "N")]
    pub n_rounds: usize,
    pub rounds_used: usize,
    pub queries_total: usize,
    pub realized: f64,
    pub omniscient: f64,
    pub ratio: f64,
}

/// Aggregate view over all trial rows.
#[derive(Clone, Debug, Serialize)]
pub struct AggregateSummary {
    pub trials: u64,
    pub mean_ratio: f64,
    pub min_ratio: f64,
    pub threshold: f64,
    pub success_probability: f64,
    pub mean_queries: f64,
    pub mean_rounds: f64,
    pub wall_time_secs: f64,
}

#[derive(Clone, Debug)]
pub struct ExperimentOutput {
    pub rows: Vec<TrialRow>,
    pub summary: AggregateSummary,
}

fn activation_probs(cfg: &ExperimentConfig, n: usize) -> Result<Vec<f64>> {
    match (&cfg.probs, cfg.p) {
        (Some(probs), _) => {
            if probs.len() != n {
                return Err(Error::InvalidConfig(format!(
                    "{} probs for {n} elements",
                    probs.len()
                )));
            }
            Ok(probs.clone())
        }
        (None, Some(p)) => Ok(vec![p; n]),
        (None, None) => Err(Error::InvalidConfig("one of `p` or `probs` is required".into())),
    }
}

fn build_solver(cfg: &ExperimentConfig) -> Result<Solver> {
    Ok(match cfg.solver.unwrap_or(SolverSpec::BruteForce) {
        SolverSpec::BruteForce => Solver::brute_force(),
        SolverSpec::Greedy => Solver::greedy(cfg.eta.unwrap_or(1.0 / 3.0)),
        SolverSpec::LocalSearchKExchange => Solver::local_search(
            cfg.local_search_k.unwrap_or(2),
            cfg.epsilon_ls.unwrap_or(0.1),
        )?,
        SolverSpec::KnapsackDp => Solver::knapsack_dp(),
        SolverSpec::KnapsackEnumGreedy => Solver::knapsack_enum_greedy(),
    })
}

fn objective_class(objective: &Objective) -> ObjectiveClass {
    objective.class()
}

/// Default success threshold implied by the configured guarantee.
fn default_threshold(cfg: &ExperimentConfig, class: ObjectiveClass, eta: f64) -> f64 {
    match cfg.strategy {
        StrategyKind::Algorithm1 => {
            let alpha = cfg.alpha.unwrap_or_else(|| cfg.p.unwrap_or(0.5));
            let beta = cfg.beta.unwrap_or(alpha);
            match class {
                ObjectiveClass::Linear => {
                    (1.0 - cfg.epsilon) * alpha * eta / alpha.max(beta)
                }
                ObjectiveClass::Submodular => {
                    (1.0 - cfg.epsilon) * alpha * eta / (alpha + beta)
                }
            }
        }
        StrategyKind::KnapsackCombined => (1.0 - cfg.epsilon) / 5.0,
        StrategyKind::AdaptiveLocalSearch => {
            let k = cfg.local_search_k.unwrap_or(2) as f64;
            (1.0 - cfg.epsilon_ls.unwrap_or(0.1)) / (k + 1.0)
        }
    }
}

fn run_one_trial(cfg: &ExperimentConfig, trial: u64) -> Result<TrialRow> {
    let root = RandomSource::new(cfg.seed);
    let trial_rng = root.child_indexed("trial", trial);
    let mut instance_rng = if cfg.fresh_instance_per_trial {
        trial_rng.child("instance")
    } else {
        root.child("instance")
    };
    let (domain, objective) = generate_instance(&cfg.domain, cfg.objective.as_ref(), &mut instance_rng)?;
    let n = domain.universe_len();
    let probs = activation_probs(cfg, n)?;
    let mut activation_rng = trial_rng.child("activation");
    let scenario = sample_activation(&probs, &mut activation_rng)?;
    let class = objective_class(&objective);
    let eta = cfg.eta.unwrap_or(1.0);
    let p_min = probs.iter().cloned().fold(1.0, f64::min);

    let strategy_cfg = StrategyConfig {
        epsilon: cfg.epsilon,
        delta: cfg.delta,
        objective_class: class,
        alpha: cfg.alpha.unwrap_or(p_min),
        beta: cfg.beta.unwrap_or(cfg.alpha.unwrap_or(p_min)),
        eta,
        n_override: cfg.n_override,
    };
    let report = match cfg.strategy {
        StrategyKind::Algorithm1 => {
            let solver = build_solver(cfg)?;
            run_algorithm1(&objective, &domain, &solver, &scenario, &strategy_cfg)?
        }
        StrategyKind::AdaptiveLocalSearch => run_adaptive_local_search(
            &objective,
            &domain,
            &scenario,
            cfg.local_search_k.unwrap_or(2),
            cfg.epsilon_ls.unwrap_or(0.1),
        )?,
        StrategyKind::KnapsackCombined => {
            run_knapsack_combined(&objective, &domain, &scenario, &strategy_cfg)?
        }
    };
    Ok(TrialRow {
        trial,
        seed: trial_rng.seed(),
        domain: domain.kind_name().to_string(),
        objective: objective.kind_name().to_string(),
        p: p_min,
        epsilon: cfg.epsilon,
        delta: cfg.delta,
        n_rounds: report.rounds_planned,
        rounds_used: report.rounds_used,
        queries_total: report.queries_total,
        realized: report.realized_value,
        omniscient: report.omniscient_value,
        ratio: report.ratio,
    })
}

/// Run every trial and aggregate. `threads` bounds worker parallelism;
/// results are identical for any thread count.
pub fn run_experiment(cfg: &ExperimentConfig, threads: usize) -> Result<ExperimentOutput> {
    if cfg.trials == 0 {
        return Err(Error::InvalidConfig("trials must be at least 1".into()));
    }
    let started = Instant::now();
    let trials = cfg.trials;
    let workers = threads.max(1).min(trials as usize);
    let mut rows: Vec<Option<TrialRow>> = Vec::new();
    rows.resize_with(trials as usize, || None);
    if workers <= 1 {
        for (i, slot) in rows.iter_mut().enumerate() {
            *slot = Some(run_one_trial(cfg, i as u64)?);
        }
    } else {
        let results: Vec<Result<Vec<(u64, TrialRow)>>> = thread::scope(|scope| {
            let mut handles = Vec::new();
            for w in 0..workers {
                let cfg = &*cfg;
                handles.push(scope.spawn(move || {
                    let mut out = Vec::new();
                    let mut t = w as u64;
                    while t < trials {
                        out.push((t, run_one_trial(cfg, t)?));
                        t += workers as u64;
                    }
                    Ok(out)
                }));
            }
            handles.into_iter().map(|h| h.join().expect("worker panicked")).collect()
        });
        for result in results {
            for (t, row) in result? {
                rows[t as usize] = Some(row);
            }
        }
    }
    let rows: Vec<TrialRow> = rows.into_iter().map(|r| r.expect("missing trial")).collect();

    // Derive the threshold from a representative instance's objective class.
    let mut probe_rng = RandomSource::new(cfg.seed).child("instance-probe");
    let (_, probe_objective) =
        generate_instance(&cfg.domain, cfg.objective.as_ref(), &mut probe_rng)?;
    let threshold = cfg
        .threshold
        .unwrap_or_else(|| default_threshold(cfg, probe_objective.class(), cfg.eta.unwrap_or(1.0)));

    let count = rows.len() as f64;
    let summary = AggregateSummary {
        trials,
        mean_ratio: rows.iter().map(|r| r.ratio).sum::<f64>() / count,
        min_ratio: rows.iter().map(|r| r.ratio).fold(f64::INFINITY, f64::min),
        threshold,
        success_probability: rows.iter().filter(|r| r.ratio >= threshold).count() as f64 / count,
        mean_queries: rows.iter().map(|r| r.queries_total as f64).sum::<f64>() / count,
        mean_rounds: rows.iter().map(|r| r.rounds_used as f64).sum::<f64>() / count,
        wall_time_secs: started.elapsed().as_secs_f64(),
    };
    Ok(ExperimentOutput { rows, summary })
}

/// Fixed CSV header for trial rows.
pub const CSV_HEADER: &str =
    "trial,seed,domain,objective,p,epsilon,delta,N,rounds_used,queries_total,realized,omniscient,ratio";

/// Render rows as CSV with the fixed, versioned header.
pub fn rows_to_csv(rows: &[TrialRow]) -> String {
    let mut out = String::from(CSV_HEADER);
    out.push('\n');
    for r in rows {
        out.push_str(&format!(
            "{},{},{},{},{},{},{},{},{},{},{},{},{}\n",
            r.trial,
            r.seed,
            r.domain,
            r.objective,
            r.p,
            r.epsilon,
            r.delta,
            r.n_rounds,
            r.rounds_used,
            r.queries_total,
            r.realized,
            r.omniscient,
            r.ratio
        ));
    }
    out
}

/// Render rows as newline-delimited JSON objects.
pub fn rows_to_json(rows: &[TrialRow]) -> String {
    let mut out = String::new();
    for r in rows {
        out.push_str(&serde_json::to_string(r).expect("row serialization"));
        out.push('\n');
    }
    out
}

/// Which exchange map family a certification run exercises.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum MapKindSpec {
    TrivialKExchange,
    PathKExchange,
    MatroidRota,
    KnapsackLight,
    KnapsackHeavy,
}

/// Config for the map-certification command.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CertifyConfig {
    pub domain: DomainSpec,
    pub map: MapKindSpec,
    pub p: f64,
    /// Number of feasible (X, Y) pairs to sample.
    pub pairs: u64,
    pub seed: u64,
    /// Path-map parameter (path-k-exchange only).
    #[serde(default)]
    pub h: Option<usize>,
    /// Monte-Carlo sample count for maps without exact enumeration.
    #[serde(default)]
    pub samples: Option<u64>,
    #[serde(default)]
    pub out: Option<String>,
    #[serde(default)]
    pub format: Option<OutputFormat>,
}

/// One certification row: uniformity estimates plus the gain-bound slack
/// where exact enumeration applies.
#[derive(Clone, Debug, Serialize)]
pub struct CertifyRow {
    pub pair: u64,
    pub kind: String,
    pub x: Subset,
    pub y: Subset,
    pub alpha_hat: f64,
    pub beta_hat: f64,
    pub method: CertMethod,
    pub samples: u64,
    pub radius: f64,
    pub vacuous: bool,
    pub gain_slack_linear: Option<f64>,
    pub gain_slack_submodular: Option<f64>,
}

fn build_map_for_pair(
    cfg: &CertifyConfig,
    domain: &Domain,
    x: Subset,
    y: Subset,
) -> Result<ExchangeMap> {
    match cfg.map {
        MapKindSpec::TrivialKExchange => {
            Ok(build_trivial_k_exchange_map(&k_exchange_certificate(domain, x, y)?))
        }
        MapKindSpec::PathKExchange => {
            let cert = k_exchange_certificate(domain, x, y)?;
            let pm = build_path_multiset(&cert, cfg.h.unwrap_or(1))?;
            build_path_exchange_map(&pm, cfg.p)
        }
        MapKindSpec::MatroidRota => match domain {
            Domain::MatroidIndependent(oracle) => {
                build_matroid_rota_map(oracle, x, y, RotaFamily::IndependentSets)
            }
            Domain::MatroidBase(oracle) => {
                build_matroid_rota_map(oracle, x, y, RotaFamily::Bases)
            }
            other => Err(Error::UnsupportedDomain(format!(
                "matroid-rota maps need a matroid domain, got {}",
                other.kind_name()
            ))),
        },
        MapKindSpec::KnapsackLight => match domain {
            Domain::Knapsack { sizes } => build_knapsack_light_map(sizes, x, y),
            other => Err(Error::UnsupportedDomain(format!(
                "knapsack-light maps need a knapsack domain, got {}",
                other.kind_name()
            ))),
        },
        MapKindSpec::KnapsackHeavy => build_knapsack_heavy_map(x, y, 2),
    }
}

/// Sample feasible (X, Y) pairs, build the requested map for each, and
/// certify uniformity plus (where enumerable) the gain-bound slack for a
/// random linear and a random coverage objective.
pub fn certify_maps(cfg: &CertifyConfig) -> Result<Vec<CertifyRow>> {
    let root = RandomSource::new(cfg.seed);
    let mut instance_rng = root.child("instance");
    let (domain, _) = generate_instance(&cfg.domain, None, &mut instance_rng)?;
    let n = domain.universe_len();
    let feasible = enumerate_feasible(&domain, Subset::full(n))?;
    if feasible.is_empty() {
        return Err(Error::InvalidConfig("domain has no feasible sets".into()));
    }
    let probs = vec![cfg.p; n];
    let mut rows = Vec::new();
    for pair in 0..cfg.pairs {
        let mut rng = root.child_indexed("pair", pair);
        let x = feasible[rng.range_usize(feasible.len())];
        let y = feasible[rng.range_usize(feasible.len())];
        let map = build_map_for_pair(cfg, &domain, x, y)?;
        let (method, samples) = if map.enumerable() {
            (CertMethod::Exact, 0)
        } else {
            (CertMethod::MonteCarlo, cfg.samples.unwrap_or(100_000))
        };
        let report = certify_uniformity(&map, &probs, method, samples, Some(&mut rng))?;
        let (gain_slack_linear, gain_slack_submodular) = if map.enumerable() {
            let weights: Vec<f64> = (0..n).map(|_| rng.range_f64(0.5, 5.0)).collect();
            let linear = Objective::linear(weights)?;
            let sets: Vec<Vec<usize>> =
                (0..n).map(|_| (0..8).filter(|_| rng.bernoulli(0.4)).collect()).collect();
            let coverage = Objective::coverage(n, &sets, vec![1.0; 8])?;
            (
                Some(verify_gain_bound(&map, &linear, ObjectiveClass::Linear, &probs)?),
                Some(verify_gain_bound(&map, &coverage, ObjectiveClass::Submodular, &probs)?),
            )
        } else {
            (None, None)
        };
        rows.push(CertifyRow {
            pair,
            kind: report.kind.clone(),
            x,
            y,
            alpha_hat: report.alpha_hat,
            beta_hat: report.beta_hat,
            method: report.method,
            samples: report.samples,
            radius: report.radius,
            vacuous: report.vacuous,
            gain_slack_linear,
            gain_slack_submodular,
        });
    }
    Ok(rows)
}

pub const CERTIFY_CSV_HEADER: &str =
    "pair,kind,x,y,alpha_hat,beta_hat,method,samples,radius,vacuous,gain_slack_linear,gain_slack_submodular";

pub fn certify_rows_to_csv(rows: &[CertifyRow]) -> String {
    let fmt_opt = |v: Option<f64>| v.map_or(String::new(), |x| x.to_string());
    let mut out = String::from(CERTIFY_CSV_HEADER);
    out.push('\n');
    for r in rows {
        let method = match r.method {
            CertMethod::Exact => "exact",
            CertMethod::MonteCarlo => "monte-carlo",
        };
        out.push_str(&format!(
            "{},{},{},{},{},{},{},{},{},{},{},{}\n",
            r.pair,
            r.kind,
            r.x,
            r.y,
            r.alpha_hat,
            r.beta_hat,
            method,
            r.samples,
            r.radius,
            r.vacuous,
            fmt_opt(r.gain_slack_linear),
            fmt_opt(r.gain_slack_submodular),
        ));
    }
    out
}

pub fn certify_rows_to_json(rows: &[CertifyRow]) -> String {
    let mut out = String::new();
    for r in rows {
        out.push_str(&serde_json::to_string(r).expect("row serialization"));
        out.push('\n');
    }
    out
}

/// Config for the `check` command: axiom and property suites over one
/// instance.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CheckConfig {
    pub domain: DomainSpec,
    #[serde(default)]
    pub objective: Option<ObjectiveSpec>,
    pub seed: u64,
}

/// Name, pass/fail, and detail for one check.
#[derive(Clone, Debug, Serialize)]
pub struct CheckLine {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

/// Run the axiom/property suite for the configured instance: objective
/// axioms (exhaustive), matroid axioms where applicable, downward
/// closure spot checks, and covering-bound slacks for small universes.
pub fn run_checks(cfg: &CheckConfig) -> Result<Vec<CheckLine>> {
    let root = RandomSource::new(cfg.seed);
    let mut instance_rng = root.child("instance");
    let (domain, objective) = generate_instance(&cfg.domain, cfg.objective.as_ref(), &mut instance_rng)?;
    let n = domain.universe_len();
    let mut lines = Vec::new();

    if n <= 16 {
        let report = check_axioms(&objective)?;
        lines.push(CheckLine {
            name: "objective-axioms".into(),
            passed: report.all(),
            detail: format!(
                "normalized={} monotone={} submodular={}",
                report.normalized, report.monotone, report.submodular
            ),
        });
    }
    let oracles: Vec<&MatroidOracle> = match &domain {
        Domain::MatroidIndependent(m) | Domain::MatroidBase(m) => vec![m],
        Domain::Intersection(ms) => ms.iter().collect(),
        _ => vec![],
    };
    for (i, oracle) in oracles.iter().enumerate() {
        if oracle.universe_len() <= 15 {
            let ok = crate::domain::verify_matroid_axioms(oracle)?;
            lines.push(CheckLine {
                name: format!("matroid-axioms-{i}"),
                passed: ok,
                detail: format!("{} matroid over {} elements", oracle.kind_name(), n),
            });
        }
    }
    if domain.is_downward_closed() {
        let mut rng = root.child("closure");
        let feasible = enumerate_feasible(&domain, Subset::full(n))?;
        let mut ok = true;
        for _ in 0..200 {
            let x = feasible[rng.range_usize(feasible.len())];
            for e in x.iter() {
                ok &= domain.is_feasible(x.without(e));
            }
        }
        lines.push(CheckLine {
            name: "downward-closure".into(),
            passed: ok,
            detail: format!("{} feasible sets sampled", feasible.len().min(200)),
        });
    }
    if n <= 15 {
        let mut worst: f64 = f64::INFINITY;
        for marginal in [0.2, 0.5, 0.8] {
            let slack = crate::objective::verify_covering_lemma(
                &objective,
                &vec![marginal; n],
                marginal,
            )?;
            worst = worst.min(slack);
            let slack = crate::objective::verify_covering_complement_lemma(
                &objective,
                &vec![marginal; n],
                marginal,
            )?;
            worst = worst.min(slack);
        }
        lines.push(CheckLine {
            name: "covering-bounds".into(),
            passed: worst >= -1e-9,
            detail: format!("worst slack {worst:.3e}"),
        });
    }
    Ok(lines)
}
