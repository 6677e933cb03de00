//! Query strategies and per-trial evaluation.
//!
//! The main strategy alternates between solving the optimistic problem
//! (unqueried elements assumed active), querying the round's solution,
//! and finally solving the pessimistic problem (unqueried elements
//! assumed inactive). The adaptive baseline converts local search into a
//! one-query-per-round strategy. Every run is scored against the
//! brute-force omniscient optimum `max f(Z ∩ A)`.

use crate::domain::Domain;
use crate::error::{Error, Result};
use crate::objective::{Objective, ObjectiveClass, RestrictedObjective, SetFunction, VALUE_TOL};
use crate::scenario::{ActivationScenario, KnowledgeState, QueryTranscript};
use crate::set::{subsets_of_size, Subset};
use crate::solver::Solver;

/// Parameters of a strategy run. `alpha` and `beta` are the uniformity
/// parameters of the exchange map backing the guarantee; they and the
/// solver factor `eta` feed the round-count formula.
#[derive(Clone, Debug)]
pub struct StrategyConfig {
    pub epsilon: f64,
    pub delta: f64,
    pub objective_class: ObjectiveClass,
    pub alpha: f64,
    pub beta: f64,
    pub eta: f64,
    pub n_override: Option<usize>,
}

impl StrategyConfig {
    pub fn validate(&self) -> Result<()> {
        for (name, v) in [("epsilon", self.epsilon), ("delta", self.delta)] {
            if !(v > 0.0 && v < 1.0) {
                return Err(Error::InvalidParameter(format!("{name} = {v} outside (0,1)")));
            }
        }
        if !(self.alpha > 0.0 && self.alpha <= 1.0) {
            return Err(Error::InvalidParameter(format!("alpha = {} outside (0,1]", self.alpha)));
        }
        if !(self.beta > 0.0) {
            return Err(Error::InvalidParameter(format!("beta = {} must be positive", self.beta)));
        }
        if !(self.eta > 0.0 && self.eta <= 1.0) {
            return Err(Error::InvalidParameter(format!("eta = {} outside (0,1]", self.eta)));
        }
        Ok(())
    }
}

/// Round count `N = ceil(16 ln(1/min(delta, epsilon)) / (alpha * D * eta
/// * epsilon))` with `D = min(2, max(alpha, beta))` for linear objectives
/// and `D = min(2, alpha + beta)` for submodular ones.
pub fn compute_round_count(cfg: &StrategyConfig) -> Result<usize> {
    cfg.validate()?;
    let drive = match cfg.objective_class {
        ObjectiveClass::Linear => cfg.alpha.max(cfg.beta).min(2.0),
        ObjectiveClass::Submodular => (cfg.alpha + cfg.beta).min(2.0),
    };
    let numerator = 16.0 * (1.0 / cfg.delta.min(cfg.epsilon)).ln();
    let n = numerator / (cfg.alpha * drive * cfg.eta * cfg.epsilon);
    Ok((n.ceil() as usize).max(1))
}

/// Restriction to `known_active ∪ unknown`: unqueried elements assumed
/// active.
pub fn optimistic_objective<'a>(
    f: &'a Objective,
    ks: &KnowledgeState,
) -> RestrictedObjective<'a> {
    f.restrict(ks.known_active.union(ks.unknown))
}

/// Restriction to `known_active`: unqueried elements assumed inactive.
pub fn pessimistic_objective<'a>(
    f: &'a Objective,
    ks: &KnowledgeState,
) -> RestrictedObjective<'a> {
    f.restrict(ks.known_active)
}

/// Outcome of one strategy run against one activation scenario.
#[derive(Clone, Debug)]
pub struct StrategyReport {
    /// Rounds that actually issued queries.
    pub rounds_used: usize,
    /// Planned round budget (the configured or computed N).
    pub rounds_planned: usize,
    /// Distinct elements queried.
    pub queries_total: usize,
    /// Newly revealed elements per round.
    pub queries_per_round: Vec<usize>,
    /// `f(X_N ∩ A ∩ Q)` for the final solution.
    pub realized_value: f64,
    /// `max over feasible Z of f(Z ∩ A)`, by brute force.
    pub omniscient_value: f64,
    /// `realized / omniscient`, defined as 1 when the omniscient optimum
    /// is zero (the guarantee is vacuous there).
    pub ratio: f64,
    pub final_solution: Subset,
}

/// Brute-force omniscient optimum `max over feasible Z of f(Z ∩ A)`.
pub fn omniscient_optimum(
    f: &Objective,
    d: &Domain,
    scenario: &ActivationScenario,
) -> Result<f64> {
    let restricted = f.restrict(scenario.active());
    let solver = Solver::brute_force();
    let best = solver.solve(&restricted, d, Subset::full(d.universe_len()))?;
    Ok(restricted.value(best))
}

fn finish_report(
    f: &Objective,
    d: &Domain,
    scenario: &ActivationScenario,
    transcript: &QueryTranscript,
    final_solution: Subset,
    rounds_planned: usize,
    queries_per_round: Vec<usize>,
) -> Result<StrategyReport> {
    let queried = transcript.queried();
    let realized_value =
        f.value(final_solution.intersection(scenario.active()).intersection(queried));
    let omniscient_value = omniscient_optimum(f, d, scenario)?;
    let ratio = if omniscient_value <= VALUE_TOL {
        1.0
    } else {
        realized_value / omniscient_value
    };
    Ok(StrategyReport {
        rounds_used: transcript.adaptivity(),
        rounds_planned,
        queries_total: queried.len(),
        queries_per_round,
        realized_value,
        omniscient_value,
        ratio,
        final_solution,
    })
}

/// Elements the round solver may use: known-inactive elements contribute
/// nothing to the optimistic objective, so they are excluded wherever
/// the domain is downward closed (base domains keep the full universe).
fn allowed_elements(d: &Domain, ks: &KnowledgeState) -> Subset {
    let full = Subset::full(d.universe_len());
    if d.is_downward_closed() {
        full.difference(ks.known_inactive)
    } else {
        full
    }
}

struct RoundsOutcome {
    transcript: QueryTranscript,
    /// The solution queried in each executed round.
    round_targets: Vec<Subset>,
    solution: Subset,
    planned: usize,
}

fn run_rounds(
    f: &Objective,
    d: &Domain,
    solver: &Solver,
    scenario: &ActivationScenario,
    cfg: &StrategyConfig,
    universe: Subset,
) -> Result<RoundsOutcome> {
    let n = d.universe_len();
    let planned = match cfg.n_override {
        Some(n_rounds) => n_rounds.max(1),
        None => compute_round_count(cfg)?,
    };
    let mut transcript = QueryTranscript::new(n);
    let mut round_targets = Vec::new();
    for _ in 0..planned {
        let ks = transcript.knowledge_state();
        let optimistic = optimistic_objective(f, &ks);
        let allowed = allowed_elements(d, &ks).intersection(universe);
        let round_solution = solver.solve(&optimistic, d, allowed)?;
        if round_solution.difference(transcript.queried()).is_empty() {
            // Optimistic and pessimistic problems coincide on this
            // solution; further rounds would repeat it verbatim.
            break;
        }
        round_targets.push(round_solution);
        transcript.apply_round(round_solution, scenario);
    }
    let ks = transcript.knowledge_state();
    let pessimistic = pessimistic_objective(f, &ks);
    let allowed = allowed_elements(d, &ks).intersection(universe);
    let solution = solver.solve(&pessimistic, d, allowed)?;
    Ok(RoundsOutcome { transcript, round_targets, solution, planned })
}

/// The batched query strategy: for up to N rounds, solve the optimistic
/// problem and query the solution; then output a solution to the
/// pessimistic problem. Exits early once a round's solution contains no
/// unknown elements.
pub fn run_algorithm1(
    f: &Objective,
    d: &Domain,
    solver: &Solver,
    scenario: &ActivationScenario,
    cfg: &StrategyConfig,
) -> Result<StrategyReport> {
    let n = d.universe_len();
    if f.universe_len() != n || scenario.universe_len() != n {
        return Err(Error::InvalidParameter("universe mismatch".into()));
    }
    cfg.validate()?;
    let out = run_rounds(f, d, solver, scenario, cfg, Subset::full(n))?;
    let mut queried = Subset::empty(n);
    let mut queries_per_round = Vec::new();
    for target in &out.round_targets {
        queries_per_round.push(target.difference(queried).len());
        queried = queried.union(*target);
    }
    finish_report(
        f,
        d,
        scenario,
        &out.transcript,
        out.solution,
        out.planned,
        queries_per_round,
    )
}

/// The adaptive baseline: emulate omniscient local search, querying each
/// selected element before committing to its exchange (one query per
/// round). Inactive elements are skipped in favor of the next-best move;
/// the run stops after `ceil(n ln(1/epsilon_ls))` successful exchanges or
/// at a local optimum.
pub fn run_adaptive_local_search(
    f: &Objective,
    d: &Domain,
    scenario: &ActivationScenario,
    k: usize,
    epsilon_ls: f64,
) -> Result<StrategyReport> {
    if !(epsilon_ls > 0.0 && epsilon_ls < 1.0) {
        return Err(Error::InvalidParameter(format!("epsilon_ls = {epsilon_ls} outside (0,1)")));
    }
    if !d.is_downward_closed() {
        return Err(Error::UnsupportedDomain(format!(
            "adaptive local search needs k-exchange moves; {} is not downward closed",
            d.kind_name()
        )));
    }
    let n = d.universe_len();
    if f.universe_len() != n || scenario.universe_len() != n {
        return Err(Error::InvalidParameter("universe mismatch".into()));
    }
    let budget = ((n.max(1) as f64) * (1.0 / epsilon_ls).ln()).ceil().max(1.0) as usize;
    let mut transcript = QueryTranscript::new(n);
    let mut queries_per_round = Vec::new();
    let mut x = Subset::empty(n);
    let mut exchanges = 0usize;
    'search: while exchanges < budget {
        // Improving insert-one/remove-at-most-k moves among elements not
        // known inactive, ranked as if the candidate were active.
        let ks = transcript.knowledge_state();
        let candidates = Subset::full(n).difference(ks.known_inactive).difference(x);
        let current = f.value(x);
        let mut moves: Vec<(f64, Subset, usize)> = Vec::new();
        for e in candidates.iter() {
            for t_size in 0..=k.min(x.len()) {
                for t in subsets_of_size(x, t_size) {
                    let next = x.with(e).difference(t);
                    if !d.is_feasible(next) {
                        continue;
                    }
                    let v = f.value(next);
                    if v > current + VALUE_TOL {
                        moves.push((v, next, e));
                    }
                }
            }
        }
        if moves.is_empty() {
            break;
        }
        // Highest value first; ties toward the lexicographically smaller
        // resulting set.
        moves.sort_by(|a, b| b.0.partial_cmp(&a.0).unwrap().then_with(|| a.1.cmp(&b.1)));
        for (_, next, e) in moves {
            match transcript.revealed(e) {
                Some(false) => continue,
                Some(true) => {
                    x = next;
                    exchanges += 1;
                    continue 'search;
                }
                None => {
                    transcript.apply_round(Subset::singleton(n, e), scenario);
                    queries_per_round.push(1);
                    if scenario.is_active(e) {
                        x = next;
                        exchanges += 1;
                    }
                    // Inactive: re-rank against the new knowledge.
                    continue 'search;
                }
            }
        }
        break;
    }
    finish_report(f, d, scenario, &transcript, x, budget, queries_per_round)
}

/// Threshold above which a knapsack item is heavy.
pub const HEAVY_THRESHOLD: f64 = 1.0 / 3.0;

/// The combined knapsack strategy: run the batched strategy
/// simultaneously on the light items (sizes at most 1/3, map uniformity
/// `(p, p)`) and on the heavy items (at most two fit, all-or-nothing map
/// with `beta = 1 - (1-p)^2`), query the union round by round, and keep
/// the better of the two final solutions.
pub fn run_knapsack_combined(
    f: &Objective,
    d: &Domain,
    scenario: &ActivationScenario,
    cfg: &StrategyConfig,
) -> Result<StrategyReport> {
    let sizes = match d {
        Domain::Knapsack { sizes } => sizes.clone(),
        other => {
            return Err(Error::UnsupportedDomain(format!(
                "combined strategy is knapsack-only, got {}",
                other.kind_name()
            )))
        }
    };
    cfg.validate()?;
    let n = d.universe_len();
    if f.universe_len() != n || scenario.universe_len() != n {
        return Err(Error::InvalidParameter("universe mismatch".into()));
    }
    let mut light = Subset::empty(n);
    let mut heavy = Subset::empty(n);
    for (e, &c) in sizes.iter().enumerate() {
        if c > HEAVY_THRESHOLD {
            heavy.insert(e);
        } else {
            light.insert(e);
        }
    }
    let p = scenario.p_min();
    let solver = Solver::brute_force();
    let light_cfg = StrategyConfig { alpha: p, beta: p, eta: 1.0, ..cfg.clone() };
    let heavy_beta = 1.0 - (1.0 - p) * (1.0 - p);
    let heavy_cfg =
        StrategyConfig { alpha: p, beta: heavy_beta.max(p), eta: 1.0, ..cfg.clone() };

    let mut outcomes = Vec::new();
    for (universe, sub_cfg) in [(light, light_cfg), (heavy, heavy_cfg)] {
        if universe.is_empty() {
            continue;
        }
        outcomes.push(run_rounds(f, d, &solver, scenario, &sub_cfg, universe)?);
    }
    if outcomes.is_empty() {
        return Err(Error::InvalidParameter("empty knapsack instance".into()));
    }

    // The sub-runs touch disjoint elements and execute simultaneously:
    // merged round r queries both runs' round-r solutions.
    let rounds_planned = outcomes.iter().map(|o| o.planned).max().unwrap_or(1);
    let max_rounds = outcomes.iter().map(|o| o.round_targets.len()).max().unwrap_or(0);
    let mut transcript = QueryTranscript::new(n);
    let mut queries_per_round = Vec::new();
    for round in 0..max_rounds {
        let mut targets = Subset::empty(n);
        for outcome in &outcomes {
            if let Some(t) = outcome.round_targets.get(round) {
                targets = targets.union(*t);
            }
        }
        queries_per_round.push(targets.difference(transcript.queried()).len());
        transcript.apply_round(targets, scenario);
    }

    let queried = transcript.queried();
    let mut best = outcomes[0].solution;
    let mut best_value = f64::NEG_INFINITY;
    for outcome in &outcomes {
        let realized =
            f.value(outcome.solution.intersection(scenario.active()).intersection(queried));
        if realized > best_value + VALUE_TOL
            || (realized >= best_value - VALUE_TOL && outcome.solution < best)
        {
            best_value = realized;
            best = outcome.solution;
        }
    }
    finish_report(f, d, scenario, &transcript, best, rounds_planned, queries_per_round)
}
