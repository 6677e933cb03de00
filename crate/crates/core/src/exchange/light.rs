//! The 2-relaxed exchange map for knapsacks without heavy items.
//!
//! Elements of `X \ Y` are packed as arcs on a unit circle. Given the
//! activated set R, an arc of length `sum of c_r over r in R` is placed
//! uniformly at random; fully covered items are removed and boundary
//! items are removed with probability proportional to their covered
//! fraction, so `P(x ∈ T(R)) = p · sum of c_y over Y \ X <= p`. The
//! exchanged set can exceed capacity 1 but never 5/3, and with all items
//! of size at most 1/3 it always splits into two feasible knapsack sets.

use crate::domain::CAPACITY_TOL;
use crate::error::{Error, Result};
use crate::exchange::{ExchangeMap, LightArc, Mechanism};
use crate::set::Subset;

/// Whether `set` packs into two capacity-1 knapsacks, decided by the
/// interval rule: lay the items out contiguously and cut greedily at
/// capacity 1. Sufficient whenever total size <= 5/3 and every item is
/// light.
pub fn splits_into_two_unit_sets(sizes: &[f64], set: Subset) -> bool {
    let mut first = 0.0;
    let mut second = 0.0;
    for e in set.iter() {
        if first + sizes[e] <= 1.0 + CAPACITY_TOL {
            first += sizes[e];
        } else {
            second += sizes[e];
        }
    }
    second <= 1.0 + CAPACITY_TOL
}

/// Build the circle map between feasible knapsack sets X and Y. Every
/// item size must be at most 1/3 (no heavy items). The resulting map is
/// 2-relaxed with continuous internal randomness, so it is certified by
/// Monte-Carlo only.
pub fn build_knapsack_light_map(sizes: &[f64], x: Subset, y: Subset) -> Result<ExchangeMap> {
    let n = sizes.len();
    if x.universe_len() != n || y.universe_len() != n {
        return Err(Error::InvalidParameter("X, Y universe mismatch".into()));
    }
    for (e, &c) in sizes.iter().enumerate() {
        if !(c > 0.0) {
            return Err(Error::InvalidParameter(format!("item size {c} must be positive")));
        }
        if c > 1.0 / 3.0 + CAPACITY_TOL {
            return Err(Error::HeavyItemPresent { element: e, size: c });
        }
    }
    let total = |s: Subset| s.iter().map(|e| sizes[e]).sum::<f64>();
    if total(x) > 1.0 + CAPACITY_TOL || total(y) > 1.0 + CAPACITY_TOL {
        return Err(Error::InvalidParameter("X and Y must be feasible knapsack sets".into()));
    }
    // Pack X \ Y contiguously from position 0, ascending element order.
    let mut arcs = Vec::new();
    let mut cursor = 0.0;
    for e in x.difference(y).iter() {
        arcs.push(LightArc { element: e, start: cursor, len: sizes[e] });
        cursor += sizes[e];
    }
    Ok(ExchangeMap::from_parts(
        x,
        y,
        2,
        Mechanism::Light { sizes: sizes.to_vec(), arcs },
    ))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exchange::{certify_uniformity, verify_well_formed, CertMethod};
    use crate::rng::RandomSource;

    #[test]
    fn empty_activation_removes_nothing() {
        let sizes = vec![0.2; 6];
        let x = Subset::from_ids(6, &[0, 1, 2]).unwrap();
        let y = Subset::from_ids(6, &[3, 4, 5]).unwrap();
        let map = build_knapsack_light_map(&sizes, x, y).unwrap();
        let mut rng = RandomSource::new(3);
        for _ in 0..100 {
            let (s, t) = map.sample(Subset::empty(6), &mut rng);
            assert!(s.is_empty());
            assert!(t.is_empty());
        }
    }

    #[test]
    fn heavy_items_rejected() {
        let sizes = vec![0.2, 0.5];
        let x = Subset::singleton(2, 0);
        let y = Subset::singleton(2, 1);
        assert!(matches!(
            build_knapsack_light_map(&sizes, x, y),
            Err(Error::HeavyItemPresent { element: 1, .. })
        ));
    }

    #[test]
    fn exact_certification_unavailable() {
        let sizes = vec![0.2; 4];
        let x = Subset::from_ids(4, &[0, 1]).unwrap();
        let y = Subset::from_ids(4, &[2, 3]).unwrap();
        let map = build_knapsack_light_map(&sizes, x, y).unwrap();
        assert!(matches!(
            certify_uniformity(&map, &[0.5; 4], CertMethod::Exact, 0, None),
            Err(Error::ExactCertificationUnsupported)
        ));
    }

    #[test]
    fn monte_carlo_beta_matches_theory() {
        // Sizes all 0.2, |X \ Y| = 4, |Y \ X| = 3, p = 0.5: removal
        // probability is p * 0.6 = 0.3 for every x.
        let sizes = vec![0.2; 7];
        let x = Subset::from_ids(7, &[0, 1, 2, 3]).unwrap();
        let y = Subset::from_ids(7, &[4, 5, 6]).unwrap();
        let map = build_knapsack_light_map(&sizes, x, y).unwrap();
        let mut rng = RandomSource::new(17);
        let report = certify_uniformity(
            &map,
            &[0.5; 7],
            CertMethod::MonteCarlo,
            100_000,
            Some(&mut rng),
        )
        .unwrap();
        assert!((report.alpha_hat - 0.5).abs() < report.radius, "alpha {}", report.alpha_hat);
        assert!(report.beta_hat <= 0.3 + report.radius, "beta {}", report.beta_hat);
        assert!((report.beta_hat - 0.3).abs() < report.radius, "beta {}", report.beta_hat);
    }

    #[test]
    fn every_sampled_exchange_two_splits() {
        let mut rng = RandomSource::new(23);
        let sizes: Vec<f64> = (0..10).map(|_| rng.range_f64(0.05, 1.0 / 3.0)).collect();
        // Feasible X and Y packed greedily from disjoint halves.
        let mut x = Subset::empty(10);
        let mut load = 0.0;
        for e in 0..5 {
            if load + sizes[e] <= 1.0 {
                x.insert(e);
                load += sizes[e];
            }
        }
        let mut y = Subset::empty(10);
        let mut load = 0.0;
        for e in 5..10 {
            if load + sizes[e] <= 1.0 {
                y.insert(e);
                load += sizes[e];
            }
        }
        let map = build_knapsack_light_map(&sizes, x, y).unwrap();
        verify_well_formed(
            &map,
            &|set, gamma| {
                assert_eq!(gamma, 2);
                splits_into_two_unit_sets(&sizes, set)
            },
            100_000,
            &mut rng,
        )
        .unwrap();
    }

    #[test]
    fn split_check_rejects_oversize() {
        // Three items of 0.9 cannot fit two unit bins.
        let sizes = vec![0.9, 0.9, 0.9];
        assert!(!splits_into_two_unit_sets(&sizes, Subset::full(3)));
        assert!(splits_into_two_unit_sets(&sizes, Subset::from_ids(3, &[0, 1]).unwrap()));
    }
}
