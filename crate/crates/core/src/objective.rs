//! Monotone submodular objective functions and their verification.
//!
//! Three concrete families are shipped: linear (modular) functions,
//! weighted coverage functions, and explicit value tables. Tables are the
//! escape hatch for hand-built near-tight instances; linear and coverage
//! objectives are structurally normalized, monotone, and submodular.

use crate::error::{Error, Result};
use crate::set::{subsets_of, Subset, MAX_UNIVERSE};

/// Comparison tolerance for objective values throughout the crate.
pub const VALUE_TOL: f64 = 1e-9;

/// Whether a bound should be instantiated in its linear or its general
/// submodular form.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ObjectiveClass {
    Linear,
    Submodular,
}

impl ObjectiveClass {
    pub fn name(&self) -> &'static str {
        match self {
            ObjectiveClass::Linear => "linear",
            ObjectiveClass::Submodular => "submodular",
        }
    }
}

/// A set function `f : 2^E -> R` evaluated through a common interface.
pub trait SetFunction {
    fn universe_len(&self) -> usize;

    fn value(&self, x: Subset) -> f64;

    /// For linear functions, the per-element weights; `None` otherwise.
    /// Lets solvers that require linearity (knapsack DP) check their input.
    fn linear_weights(&self) -> Option<Vec<f64>> {
        None
    }
}

/// A concrete objective function.
#[derive(Clone, Debug)]
pub enum Objective {
    /// `f(X) = sum of w_e over X`, all weights nonnegative.
    Linear { weights: Vec<f64> },
    /// Weighted coverage: element `e` covers the item set `element_items[e]`
    /// (a mask over `item_weights.len()` items); `f(X)` is the total weight
    /// of items covered by the union.
    Coverage { element_items: Vec<u64>, item_weights: Vec<f64> },
    /// Full value table indexed by subset mask; `table.len() == 2^n`.
    Explicit { n: usize, table: Vec<f64> },
}

impl Objective {
    pub fn linear(weights: Vec<f64>) -> Result<Objective> {
        if weights.len() > MAX_UNIVERSE {
            return Err(Error::UniverseTooLarge { size: weights.len(), max: MAX_UNIVERSE });
        }
        for &w in &weights {
            if !(w >= 0.0) || !w.is_finite() {
                return Err(Error::InvalidParameter(format!("linear weight {w} must be >= 0")));
            }
        }
        Ok(Objective::Linear { weights })
    }

    /// Coverage objective over `n` elements; `sets[e]` lists the items
    /// element `e` covers.
    pub fn coverage(n: usize, sets: &[Vec<usize>], item_weights: Vec<f64>) -> Result<Objective> {
        if n > MAX_UNIVERSE {
            return Err(Error::UniverseTooLarge { size: n, max: MAX_UNIVERSE });
        }
        if sets.len() != n {
            return Err(Error::InvalidParameter(format!(
                "{} cover sets for {} elements",
                sets.len(),
                n
            )));
        }
        if item_weights.len() > 64 {
            return Err(Error::InvalidParameter("more than 64 coverage items".into()));
        }
        for &w in &item_weights {
            if !(w >= 0.0) || !w.is_finite() {
                return Err(Error::InvalidParameter(format!("item weight {w} must be >= 0")));
            }
        }
        let mut element_items = Vec::with_capacity(n);
        for items in sets {
            let mut mask = 0u64;
            for &it in items {
                if it >= item_weights.len() {
                    return Err(Error::InvalidParameter(format!(
                        "item {it} outside {} items",
                        item_weights.len()
                    )));
                }
                mask |= 1u64 << it;
            }
            element_items.push(mask);
        }
        Ok(Objective::Coverage { element_items, item_weights })
    }

    /// Explicit table objective. The table is taken as-is so that
    /// non-monotone or non-submodular instances can be built for testing
    /// the axiom checker.
    pub fn explicit(n: usize, table: Vec<f64>) -> Result<Objective> {
        if n > 20 {
            return Err(Error::UniverseTooLarge { size: n, max: 20 });
        }
        if table.len() != 1usize << n {
            return Err(Error::InvalidParameter(format!(
                "table of length {} for universe {n}",
                table.len()
            )));
        }
        Ok(Objective::Explicit { n, table })
    }

    pub fn kind_name(&self) -> &'static str {
        match self {
            Objective::Linear { .. } => "linear",
            Objective::Coverage { .. } => "coverage",
            Objective::Explicit { .. } => "explicit",
        }
    }

    /// The natural bound class: linear objectives are linear, everything
    /// else is treated as general monotone submodular.
    pub fn class(&self) -> ObjectiveClass {
        match self {
            Objective::Linear { .. } => ObjectiveClass::Linear,
            _ => ObjectiveClass::Submodular,
        }
    }

    /// Restriction `X -> f(X ∩ mask)`.
    pub fn restrict(&self, mask: Subset) -> RestrictedObjective<'_> {
        RestrictedObjective { base: self, mask }
    }
}

impl SetFunction for Objective {
    fn universe_len(&self) -> usize {
        match self {
            Objective::Linear { weights } => weights.len(),
            Objective::Coverage { element_items, .. } => element_items.len(),
            Objective::Explicit { n, .. } => *n,
        }
    }

    fn value(&self, x: Subset) -> f64 {
        debug_assert_eq!(x.universe_len(), self.universe_len());
        match self {
            Objective::Linear { weights } => x.iter().map(|e| weights[e]).sum(),
            Objective::Coverage { element_items, item_weights } => {
                let mut covered = 0u64;
                for e in x.iter() {
                    covered |= element_items[e];
                }
                let mut total = 0.0;
                while covered != 0 {
                    let it = covered.trailing_zeros() as usize;
                    total += item_weights[it];
                    covered &= covered - 1;
                }
                total
            }
            Objective::Explicit { table, .. } => table[x.mask() as usize],
        }
    }

    fn linear_weights(&self) -> Option<Vec<f64>> {
        match self {
            Objective::Linear { weights } => Some(weights.clone()),
            _ => None,
        }
    }
}

/// A base objective evaluated through an intersection mask:
/// `X -> f(X ∩ mask)`. Restriction preserves normalization, monotonicity,
/// and submodularity.
#[derive(Clone, Copy, Debug)]
pub struct RestrictedObjective<'a> {
    base: &'a Objective,
    mask: Subset,
}

impl<'a> RestrictedObjective<'a> {
    pub fn new(base: &'a Objective, mask: Subset) -> RestrictedObjective<'a> {
        RestrictedObjective { base, mask }
    }

    pub fn mask(&self) -> Subset {
        self.mask
    }
}

impl SetFunction for RestrictedObjective<'_> {
    fn universe_len(&self) -> usize {
        self.base.universe_len()
    }

    fn value(&self, x: Subset) -> f64 {
        self.base.value(x.intersection(self.mask))
    }

    fn linear_weights(&self) -> Option<Vec<f64>> {
        self.base.linear_weights().map(|mut w| {
            for (e, w_e) in w.iter_mut().enumerate() {
                if !self.mask.contains(e) {
                    *w_e = 0.0;
                }
            }
            w
        })
    }
}

/// `f(X ∪ {e}) - f(X)`; errors if `e` is already a member.
pub fn marginal_gain<F: SetFunction>(f: &F, x: Subset, e: usize) -> Result<f64> {
    if e >= f.universe_len() {
        return Err(Error::ElementOutsideUniverse { element: e, universe: f.universe_len() });
    }
    if x.contains(e) {
        return Err(Error::InvalidParameter(format!("element {e} already in the set")));
    }
    Ok(f.value(x.with(e)) - f.value(x))
}

/// Result of the exhaustive axiom check.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct AxiomReport {
    pub normalized: bool,
    pub monotone: bool,
    pub submodular: bool,
}

impl AxiomReport {
    pub fn all(&self) -> bool {
        self.normalized && self.monotone && self.submodular
    }
}

/// Exhaustively verify normalization, monotonicity, and submodularity.
///
/// Submodularity is checked in the diminishing-returns form: for every
/// base set `X` and distinct `e, g` outside it, the gain of `e` must not
/// increase after `g` is added. That pairwise condition is equivalent to
/// the subset form over all `X ⊆ Y` and costs `O(2^n · n^2)` instead of
/// `O(3^n · n)`.
pub fn check_axioms<F: SetFunction>(f: &F) -> Result<AxiomReport> {
    let n = f.universe_len();
    if n > 20 {
        return Err(Error::UniverseTooLarge { size: n, max: 20 });
    }
    let full = Subset::full(n);
    let normalized = f.value(Subset::empty(n)).abs() <= VALUE_TOL;

    let mut monotone = true;
    'mono: for x in subsets_of(full) {
        let vx = f.value(x);
        for e in 0..n {
            if !x.contains(e) && f.value(x.with(e)) < vx - VALUE_TOL {
                monotone = false;
                break 'mono;
            }
        }
    }

    let mut submodular = true;
    'sub: for x in subsets_of(full) {
        for e in 0..n {
            if x.contains(e) {
                continue;
            }
            let gain_small = f.value(x.with(e)) - f.value(x);
            for g in 0..n {
                if g == e || x.contains(g) {
                    continue;
                }
                let xg = x.with(g);
                let gain_large = f.value(xg.with(e)) - f.value(xg);
                if gain_large > gain_small + VALUE_TOL {
                    submodular = false;
                    break 'sub;
                }
            }
        }
    }

    Ok(AxiomReport { normalized, monotone, submodular })
}

fn validate_marginals(marginals: &[f64], n: usize) -> Result<()> {
    if marginals.len() != n {
        return Err(Error::InvalidParameter(format!(
            "{} marginals for universe of size {n}",
            marginals.len()
        )));
    }
    for &m in marginals {
        if !(0.0..=1.0).contains(&m) || !m.is_finite() {
            return Err(Error::InvalidProbability(m));
        }
    }
    Ok(())
}

/// Expected value of `f(S)` under the product distribution with the given
/// inclusion marginals, by full enumeration.
pub fn expected_value_product<F: SetFunction>(f: &F, marginals: &[f64]) -> Result<f64> {
    let n = f.universe_len();
    if n > 15 {
        return Err(Error::UniverseTooLarge { size: n, max: 15 });
    }
    validate_marginals(marginals, n)?;
    let mut total = 0.0;
    for s in subsets_of(Subset::full(n)) {
        let mut w = 1.0;
        for (e, &m) in marginals.iter().enumerate() {
            w *= if s.contains(e) { m } else { 1.0 - m };
        }
        if w > 0.0 {
            total += w * f.value(s);
        }
    }
    Ok(total)
}

/// Exact slack of the covering bound `E[f(S)] >= alpha * f(E)` for a
/// random `S` with every inclusion marginal at least `alpha`.
///
/// Returns `E[f(S)] - alpha * f(E)`, which is nonnegative for every
/// normalized monotone submodular `f`. Equality holds for linear `f` with
/// all marginals exactly `alpha`.
pub fn verify_covering_lemma<F: SetFunction>(
    f: &F,
    marginals: &[f64],
    alpha: f64,
) -> Result<f64> {
    let n = f.universe_len();
    validate_marginals(marginals, n)?;
    if !(0.0..=1.0).contains(&alpha) {
        return Err(Error::InvalidProbability(alpha));
    }
    if marginals.iter().any(|&m| m < alpha - VALUE_TOL) {
        return Err(Error::InvalidParameter(format!("a marginal is below alpha = {alpha}")));
    }
    let expected = expected_value_product(f, marginals)?;
    Ok(expected - alpha * f.value(Subset::full(n)))
}

/// Exact slack of the complement bound
/// `E[f(E) - f(E \ T)] <= beta * f(E)` for a random `T` with every
/// inclusion marginal at most `beta`.
///
/// Returns `beta * f(E) - E[f(E) - f(E \ T)]`, nonnegative for every
/// normalized monotone submodular `f`.
pub fn verify_covering_complement_lemma<F: SetFunction>(
    f: &F,
    marginals: &[f64],
    beta: f64,
) -> Result<f64> {
    let n = f.universe_len();
    validate_marginals(marginals, n)?;
    if !(0.0..=1.0).contains(&beta) {
        return Err(Error::InvalidProbability(beta));
    }
    if marginals.iter().any(|&m| m > beta + VALUE_TOL) {
        return Err(Error::InvalidParameter(format!("a marginal is above beta = {beta}")));
    }
    if n > 15 {
        return Err(Error::UniverseTooLarge { size: n, max: 15 });
    }
    let full = Subset::full(n);
    let f_full = f.value(full);
    let mut expected_drop = 0.0;
    for t in subsets_of(full) {
        let mut w = 1.0;
        for (e, &m) in marginals.iter().enumerate() {
            w *= if t.contains(e) { m } else { 1.0 - m };
        }
        if w > 0.0 {
            expected_drop += w * (f_full - f.value(full.difference(t)));
        }
    }
    Ok(beta * f_full - expected_drop)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::RandomSource;
    use proptest::prelude::*;

    pub(crate) fn random_coverage(n: usize, items: usize, rng: &mut RandomSource) -> Objective {
        let sets: Vec<Vec<usize>> = (0..n)
            .map(|_| (0..items).filter(|_| rng.bernoulli(0.4)).collect())
            .collect();
        let weights: Vec<f64> = (0..items).map(|_| rng.range_f64(0.5, 2.0)).collect();
        Objective::coverage(n, &sets, weights).unwrap()
    }

    #[test]
    fn linear_evaluation() {
        let f = Objective::linear(vec![1.0, 2.0, 3.0]).unwrap();
        let x = Subset::from_ids(3, &[0, 2]).unwrap();
        assert!((f.value(x) - 4.0).abs() < VALUE_TOL);
        let y = Subset::from_ids(3, &[1, 2]).unwrap();
        assert!((f.value(y) - 5.0).abs() < VALUE_TOL);
        assert_eq!(f.value(Subset::empty(3)), 0.0);
    }

    #[test]
    fn coverage_evaluation() {
        // Sets {a,b} and {b,c} over unit item weights cover 3 items together.
        let f =
            Objective::coverage(2, &[vec![0, 1], vec![1, 2]], vec![1.0, 1.0, 1.0]).unwrap();
        assert!((f.value(Subset::full(2)) - 3.0).abs() < VALUE_TOL);
        assert!((f.value(Subset::singleton(2, 0)) - 2.0).abs() < VALUE_TOL);
        assert_eq!(f.value(Subset::empty(2)), 0.0);
    }

    #[test]
    fn marginal_gains() {
        let f = Objective::linear(vec![1.0, 2.0]).unwrap();
        assert!((marginal_gain(&f, Subset::empty(2), 1).unwrap() - 2.0).abs() < VALUE_TOL);

        // Dominated coverage set adds nothing.
        let g = Objective::coverage(2, &[vec![0, 1], vec![1]], vec![1.0, 1.0]).unwrap();
        let gain = marginal_gain(&g, Subset::singleton(2, 0), 1).unwrap();
        assert!(gain.abs() < VALUE_TOL);

        // Table lookup.
        let t = Objective::explicit(2, vec![0.0, 1.0, 0.5, 1.5]).unwrap();
        let gain = marginal_gain(&t, Subset::singleton(2, 0), 1).unwrap();
        assert!((gain - 0.5).abs() < VALUE_TOL);

        assert!(marginal_gain(&f, Subset::singleton(2, 1), 1).is_err());
    }

    #[test]
    fn axioms_hold_for_shipped_kinds() {
        let root = RandomSource::new(7);
        for i in 0..100 {
            let mut rng = root.child_indexed("inst", i);
            let n = 2 + rng.range_usize(6);
            let lin =
                Objective::linear((0..n).map(|_| rng.range_f64(0.0, 3.0)).collect()).unwrap();
            assert!(check_axioms(&lin).unwrap().all());
            let cov = random_coverage(n, 6, &mut rng);
            assert!(check_axioms(&cov).unwrap().all());
        }
    }

    #[test]
    fn four_point_table_is_not_submodular() {
        // f(∅)=0, f({0})=0, f({1})=0, f({0,1})=2: the gain of 0 increases
        // once 1 is present.
        let f = Objective::explicit(2, vec![0.0, 0.0, 0.0, 2.0]).unwrap();
        let report = check_axioms(&f).unwrap();
        assert!(report.normalized);
        assert!(report.monotone);
        assert!(!report.submodular);
    }

    #[test]
    fn restriction_preserves_axioms() {
        let mut rng = RandomSource::new(11);
        for _ in 0..20 {
            let cov = random_coverage(6, 5, &mut rng);
            let mask = Subset::from_mask(6, rng.next_u64() & 0x3f);
            let restricted = cov.restrict(mask);
            assert!(check_axioms(&restricted).unwrap().all());
        }
    }

    #[test]
    fn covering_lemma_linear_equality() {
        let f = Objective::linear(vec![1.0, 2.0, 0.5, 3.0]).unwrap();
        for &alpha in &[0.2, 0.5, 0.8] {
            let slack = verify_covering_lemma(&f, &vec![alpha; 4], alpha).unwrap();
            assert!(slack.abs() < VALUE_TOL, "slack {slack}");
            let slack = verify_covering_complement_lemma(&f, &vec![alpha; 4], alpha).unwrap();
            assert!(slack.abs() < VALUE_TOL, "slack {slack}");
        }
    }

    #[test]
    fn covering_lemma_zero_function() {
        let f = Objective::linear(vec![0.0; 5]).unwrap();
        let slack = verify_covering_lemma(&f, &vec![0.3; 5], 0.3).unwrap();
        assert!(slack.abs() < VALUE_TOL);
        // beta = 0: T always empty, slack 0.
        let slack = verify_covering_complement_lemma(&f, &vec![0.0; 5], 0.0).unwrap();
        assert!(slack.abs() < VALUE_TOL);
    }

    #[test]
    fn covering_lemmas_nonnegative_on_random_instances() {
        let root = RandomSource::new(33);
        for i in 0..100 {
            let mut rng = root.child_indexed("cover", i);
            let n = 3 + rng.range_usize(6);
            let f = random_coverage(n, 7, &mut rng);
            let alpha = rng.range_f64(0.05, 0.9);
            let marginals: Vec<f64> =
                (0..n).map(|_| rng.range_f64(alpha, 1.0)).collect();
            let slack = verify_covering_lemma(&f, &marginals, alpha).unwrap();
            assert!(slack >= -VALUE_TOL, "covering slack {slack}");

            let beta = rng.range_f64(0.1, 0.95);
            let marginals: Vec<f64> = (0..n).map(|_| rng.range_f64(0.0, beta)).collect();
            let slack = verify_covering_complement_lemma(&f, &marginals, beta).unwrap();
            assert!(slack >= -VALUE_TOL, "complement slack {slack}");
        }
    }

    #[test]
    fn size_caps_enforced() {
        let f = Objective::linear(vec![1.0; 16]).unwrap();
        assert!(matches!(
            verify_covering_lemma(&f, &vec![0.5; 16], 0.5),
            Err(Error::UniverseTooLarge { .. })
        ));
    }

    proptest! {
        /// Explicit tables built from coverage functions agree with the
        /// direct coverage evaluation and pass the axiom check.
        #[test]
        fn explicit_table_matches_coverage(seed in 0u64..500) {
            let mut rng = RandomSource::new(seed);
            let n = 2 + rng.range_usize(4);
            let cov = random_coverage(n, 5, &mut rng);
            let table: Vec<f64> = (0..(1usize << n))
                .map(|m| cov.value(Subset::from_mask(n, m as u64)))
                .collect();
            let tab = Objective::explicit(n, table).unwrap();
            prop_assert!(check_axioms(&tab).unwrap().all());
            for m in 0..(1u64 << n) {
                let s = Subset::from_mask(n, m);
                prop_assert!((tab.value(s) - cov.value(s)).abs() < VALUE_TOL);
            }
        }
    }
}
