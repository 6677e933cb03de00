//! Removal families for matroid exchange maps.
//!
//! For feasible X, Y the map is `S(R) = R`, `T(R) = B_R`, where the
//! family `{B_R}` keeps `X ∪ R \ B_R` feasible for every `R ⊆ Y \ X`
//! simultaneously. Coverage is balanced per cardinality level: within
//! the level `|R| = s`, each `x ∈ X \ Y` appears in exactly
//! `C(m-1, s-1)` of the `B_R` (bases) or at most that many (independent
//! sets), where `m = |Y \ X|`. Summing the binomials gives the total
//! coverage `2^(m-1)`, and under Bernoulli(p) activation the removal
//! probability telescopes to exactly `p` for bases and at most `p` for
//! independent sets.
//!
//! The family is found by backtracking over per-R removal candidates,
//! most-needed-coverage first; the generalized exchange theorems
//! guarantee existence, so search failure within the node budget is
//! reported as a construction error.

use crate::domain::MatroidOracle;
use crate::error::{Error, Result};
use crate::exchange::{ExchangeMap, Mechanism};
use crate::set::{subsets_of, subsets_of_size, Subset};

/// Which feasible family of the matroid the map targets.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum RotaFamily {
    Bases,
    IndependentSets,
}

fn binomial(n: usize, k: usize) -> u64 {
    if k > n {
        return 0;
    }
    let mut out = 1u64;
    for i in 0..k.min(n - k) {
        out = out * (n - i) as u64 / (i + 1) as u64;
    }
    out
}

/// Build the deterministic matroid exchange map between X and Y.
///
/// Target uniformity: `alpha_hat = p`; `beta_hat = p` exactly for bases
/// and at most `p` for independent sets.
pub fn build_matroid_rota_map(
    oracle: &MatroidOracle,
    x: Subset,
    y: Subset,
    family: RotaFamily,
) -> Result<ExchangeMap> {
    let n = oracle.universe_len();
    if x.universe_len() != n || y.universe_len() != n {
        return Err(Error::InvalidParameter("X, Y universe mismatch".into()));
    }
    match family {
        RotaFamily::Bases => {
            if !oracle.is_base(x) || !oracle.is_base(y) {
                return Err(Error::InvalidParameter("X and Y must both be bases".into()));
            }
        }
        RotaFamily::IndependentSets => {
            if !oracle.is_independent(x) || !oracle.is_independent(y) {
                return Err(Error::InvalidParameter("X and Y must both be independent".into()));
            }
        }
    }
    let y_side = y.difference(x);
    let x_side = x.difference(y);
    let m = y_side.len();
    if m > 10 {
        return Err(Error::UniverseTooLarge { size: m, max: 10 });
    }

    let feasible = |set: Subset| -> bool {
        match family {
            RotaFamily::Bases => oracle.is_base(set),
            RotaFamily::IndependentSets => oracle.is_independent(set),
        }
    };

    let mut removal: Vec<(u64, u64)> = vec![(0, 0)];
    for s in 1..=m {
        let r_list = subsets_of_size(y_side, s);
        let quota = binomial(m - 1, s - 1);
        // Candidate removal sets per R.
        let mut candidates: Vec<Vec<Subset>> = Vec::with_capacity(r_list.len());
        for &r in &r_list {
            let with_r = x.union(r);
            let cands: Vec<Subset> = match family {
                RotaFamily::Bases => subsets_of_size(x_side, s)
                    .into_iter()
                    .filter(|&b| feasible(with_r.difference(b)))
                    .collect(),
                RotaFamily::IndependentSets => {
                    // Smallest removals first.
                    let mut all: Vec<Subset> = subsets_of(x_side)
                        .filter(|&b| feasible(with_r.difference(b)))
                        .collect();
                    all.sort_by_key(|b| (b.len(), b.mask()));
                    all
                }
            };
            if cands.is_empty() {
                return Err(Error::ConstructionFailed(format!(
                    "no feasible removal for R = {r}"
                )));
            }
            candidates.push(cands);
        }
        // Per-element availability suffix: how many later R's can still
        // cover x_el. Used to prune exact-coverage search.
        let mut supply = vec![vec![0u64; n]; r_list.len() + 1];
        for i in (0..r_list.len()).rev() {
            for e in x_side.iter() {
                let here = candidates[i].iter().any(|b| b.contains(e)) as u64;
                supply[i][e] = supply[i + 1][e] + here;
            }
        }
        let mut used = vec![0u64; n];
        let mut chosen = vec![Subset::empty(n); r_list.len()];
        let mut budget = 2_000_000u64;
        let exact = family == RotaFamily::Bases;
        if !assign(
            &r_list, &candidates, &supply, x_side, quota, exact, 0, &mut used, &mut chosen,
            &mut budget,
        ) {
            return Err(Error::ConstructionFailed(format!(
                "no coverage-{quota} removal family at level {s}"
            )));
        }
        for (r, b) in r_list.iter().zip(chosen) {
            removal.push((r.mask(), b.mask()));
        }
    }
    removal.sort_unstable_by_key(|&(r, _)| r);
    Ok(ExchangeMap::from_parts(x, y, 1, Mechanism::Rota { removal }))
}

#[allow(clippy::too_many_arguments)]
fn assign(
    r_list: &[Subset],
    candidates: &[Vec<Subset>],
    supply: &[Vec<u64>],
    x_side: Subset,
    quota: u64,
    exact: bool,
    depth: usize,
    used: &mut [u64],
    chosen: &mut [Subset],
    budget: &mut u64,
) -> bool {
    if *budget == 0 {
        return false;
    }
    *budget -= 1;
    if depth == r_list.len() {
        return !exact || x_side.iter().all(|e| used[e] == quota);
    }
    if exact {
        // Every element must still be coverable by the remaining slots.
        for e in x_side.iter() {
            if quota - used[e] > supply[depth][e] {
                return false;
            }
        }
    }
    // Most-needed coverage first keeps the family balanced and usually
    // makes the first branch succeed.
    let mut order: Vec<&Subset> = candidates[depth]
        .iter()
        .filter(|b| b.iter().all(|e| used[e] < quota))
        .collect();
    order.sort_by_key(|b| {
        let need: i64 = b.iter().map(|e| (quota - used[e]) as i64).sum();
        (-need, b.mask())
    });
    for b in order {
        for e in b.iter() {
            used[e] += 1;
        }
        chosen[depth] = *b;
        if assign(
            r_list, candidates, supply, x_side, quota, exact, depth + 1, used, chosen, budget,
        ) {
            return true;
        }
        for e in b.iter() {
            used[e] -= 1;
        }
    }
    // For the at-most family an empty assignment is always one of the
    // candidates, so reaching here means a genuine dead end.
    false
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exchange::{certify_uniformity, CertMethod};
    use crate::objective::VALUE_TOL;
    use crate::set::subsets_of;

    #[test]
    fn binomials() {
        assert_eq!(binomial(5, 2), 10);
        assert_eq!(binomial(4, 0), 1);
        assert_eq!(binomial(3, 5), 0);
    }

    #[test]
    fn uniform_matroid_bases_exact_p() {
        let oracle = MatroidOracle::uniform(8, 4).unwrap();
        let x = Subset::from_ids(8, &[0, 1, 2, 3]).unwrap();
        let y = Subset::from_ids(8, &[4, 5, 6, 7]).unwrap();
        let map = build_matroid_rota_map(&oracle, x, y, RotaFamily::Bases).unwrap();
        for p in [0.3, 0.5, 0.9] {
            let report =
                certify_uniformity(&map, &vec![p; 8], CertMethod::Exact, 0, None).unwrap();
            assert!((report.alpha_hat - p).abs() < VALUE_TOL, "alpha {}", report.alpha_hat);
            assert!((report.beta_hat - p).abs() < VALUE_TOL, "beta {}", report.beta_hat);
        }
    }

    #[test]
    fn identical_bases_never_remove() {
        let oracle = MatroidOracle::uniform(4, 2).unwrap();
        let x = Subset::from_ids(4, &[0, 1]).unwrap();
        let map = build_matroid_rota_map(&oracle, x, x, RotaFamily::Bases).unwrap();
        let report = certify_uniformity(&map, &[0.5; 4], CertMethod::Exact, 0, None).unwrap();
        assert_eq!(report.beta_hat, 0.0);
        assert!(report.vacuous);
    }

    #[test]
    fn partition_matroid_complementary_bases() {
        // Blocks {0,1}, {2,3}, {4,5} with capacity 1: X = {0,2,4} and the
        // complementary base Y = {1,3,5}; the only viable removal for R is
        // the set of partners, giving alpha = beta = p exactly.
        let oracle =
            MatroidOracle::partition(vec![0, 0, 1, 1, 2, 2], vec![1, 1, 1]).unwrap();
        let x = Subset::from_ids(6, &[0, 2, 4]).unwrap();
        let y = Subset::from_ids(6, &[1, 3, 5]).unwrap();
        let map = build_matroid_rota_map(&oracle, x, y, RotaFamily::Bases).unwrap();
        let p = 0.4;
        let report = certify_uniformity(&map, &vec![p; 6], CertMethod::Exact, 0, None).unwrap();
        assert!((report.alpha_hat - p).abs() < VALUE_TOL);
        assert!((report.beta_hat - p).abs() < VALUE_TOL);
        // Partner structure: removal of R is exactly the partner set.
        for r in subsets_of(y.difference(x)) {
            let outcome = &map.outcomes(r).unwrap()[0];
            let partners: Vec<usize> = r.iter().map(|e| e - 1).collect();
            assert_eq!(outcome.remove, Subset::from_ids(6, &partners).unwrap());
        }
    }

    #[test]
    fn independent_sets_beta_at_most_p() {
        let oracle = MatroidOracle::uniform(7, 5).unwrap();
        let x = Subset::from_ids(7, &[0, 1, 2]).unwrap();
        let y = Subset::from_ids(7, &[3, 4, 5, 6]).unwrap();
        let map =
            build_matroid_rota_map(&oracle, x, y, RotaFamily::IndependentSets).unwrap();
        for p in [0.3, 0.7] {
            let report =
                certify_uniformity(&map, &vec![p; 7], CertMethod::Exact, 0, None).unwrap();
            assert!((report.alpha_hat - p).abs() < VALUE_TOL);
            assert!(report.beta_hat <= p + VALUE_TOL, "beta {}", report.beta_hat);
        }
    }

    #[test]
    fn graphic_matroid_bases() {
        // Spanning trees of the 4-cycle: X = {e0, e1, e2}, Y = {e1, e2, e3}.
        let oracle =
            MatroidOracle::graphic(4, vec![(0, 1), (1, 2), (2, 3), (3, 0)]).unwrap();
        let x = Subset::from_ids(4, &[0, 1, 2]).unwrap();
        let y = Subset::from_ids(4, &[1, 2, 3]).unwrap();
        let map = build_matroid_rota_map(&oracle, x, y, RotaFamily::Bases).unwrap();
        let report = certify_uniformity(&map, &[0.6; 4], CertMethod::Exact, 0, None).unwrap();
        assert!((report.alpha_hat - 0.6).abs() < VALUE_TOL);
        assert!((report.beta_hat - 0.6).abs() < VALUE_TOL);
    }

    #[test]
    fn every_exchange_stays_feasible() {
        let oracle =
            MatroidOracle::partition(vec![0, 0, 0, 1, 1, 1], vec![2, 1]).unwrap();
        let x = Subset::from_ids(6, &[0, 1, 3]).unwrap();
        let y = Subset::from_ids(6, &[1, 2, 4]).unwrap();
        for family in [RotaFamily::Bases, RotaFamily::IndependentSets] {
            let map = build_matroid_rota_map(&oracle, x, y, family).unwrap();
            for r in subsets_of(y.difference(x)) {
                for outcome in map.outcomes(r).unwrap() {
                    let exchanged = x.union(outcome.insert).difference(outcome.remove);
                    assert!(oracle.is_independent(exchanged));
                    if family == RotaFamily::Bases {
                        assert!(oracle.is_base(exchanged));
                    }
                }
            }
        }
    }

    #[test]
    fn rejects_non_bases() {
        let oracle = MatroidOracle::uniform(4, 2).unwrap();
        let x = Subset::singleton(4, 0);
        let y = Subset::from_ids(4, &[1, 2]).unwrap();
        assert!(build_matroid_rota_map(&oracle, x, y, RotaFamily::Bases).is_err());
    }
}
