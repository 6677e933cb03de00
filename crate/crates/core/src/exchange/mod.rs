//! Exchange maps and their certification.
//!
//! An exchange map between feasible sets X and Y sends each activated
//! subset `R ⊆ Y \ X` to an insertion set `S(R) ⊆ R` and a removal set
//! `T(R) ⊆ X \ Y` such that `X ∪ S(R) \ T(R)` stays inside the (possibly
//! γ-relaxed) domain. The maps are analysis artifacts — the query strategy
//! never calls them — and this module exists to certify their
//! (α, β)-uniformity and expected-gain bounds, exactly where the internal
//! randomness is discrete and by Monte-Carlo otherwise.

mod light;
mod path;
mod rota;

pub use light::{build_knapsack_light_map, splits_into_two_unit_sets};
pub use path::{build_path_exchange_map, build_path_multiset, LabeledPath, PathMultiset};
pub use rota::{build_matroid_rota_map, RotaFamily};

use serde::Serialize;

use crate::domain::KExchangeCertificate;
use crate::error::{Error, Result};
use crate::objective::{ObjectiveClass, SetFunction};
use crate::rng::RandomSource;
use crate::set::{subsets_of, Subset};

/// How a uniformity report was computed.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum CertMethod {
    Exact,
    MonteCarlo,
}

/// Certified uniformity of an exchange map.
///
/// `alpha_hat` is the minimum over `y ∈ Y \ X` of `P(y ∈ S(R))`;
/// `beta_hat` the maximum over `x ∈ X \ Y` of `P(x ∈ T(R))`. When
/// `Y \ X` is empty the minimum is vacuous: `alpha_hat` is reported as 1
/// and the row is flagged.
#[derive(Clone, Debug, Serialize)]
pub struct UniformityReport {
    pub kind: String,
    pub alpha_hat: f64,
    pub beta_hat: f64,
    pub method: CertMethod,
    pub samples: u64,
    pub radius: f64,
    pub vacuous: bool,
}

/// One realization of a map: probability mass, insertion set, removal set.
#[derive(Clone, Debug)]
pub struct Outcome {
    pub probability: f64,
    pub insert: Subset,
    pub remove: Subset,
}

#[derive(Clone, Debug)]
pub(crate) struct PathSet {
    pub s: Subset,
    pub t: Subset,
    /// Selection coin `p^(h - |S_i|)` applied once `S_i ⊆ R`.
    pub coin: f64,
    pub class: usize,
}

#[derive(Clone, Debug)]
pub(crate) struct LightArc {
    pub element: usize,
    pub start: f64,
    pub len: f64,
}

#[derive(Clone, Debug)]
pub(crate) enum Mechanism {
    /// `S(R) = R`, `T(R) = union of T_y over y in R`.
    Trivial { removal: Vec<(usize, Subset)> },
    /// Random color class, then per-set thinning coins.
    Path { sets: Vec<PathSet>, classes: usize },
    /// Precomputed removal family indexed by the mask of R.
    Rota { removal: Vec<(u64, u64)> },
    Composition { parts: Vec<ExchangeMap> },
    /// Circle packing of X \ Y with a uniformly positioned arc.
    Light { sizes: Vec<f64>, arcs: Vec<LightArc> },
    /// Remove all of X \ Y whenever R is nonempty.
    Heavy,
}

/// An exchange map between two fixed feasible sets.
#[derive(Clone, Debug)]
pub struct ExchangeMap {
    x: Subset,
    y: Subset,
    gamma: u32,
    mechanism: Mechanism,
}

impl ExchangeMap {
    pub(crate) fn from_parts(x: Subset, y: Subset, gamma: u32, mechanism: Mechanism) -> Self {
        ExchangeMap { x, y, gamma, mechanism }
    }

    pub fn x(&self) -> Subset {
        self.x
    }

    pub fn y(&self) -> Subset {
        self.y
    }

    /// Relaxation level: exchanges land in the union of `gamma` feasible
    /// sets. 1 for every kind except the knapsack light-item map.
    pub fn gamma(&self) -> u32 {
        self.gamma
    }

    /// Elements eligible for insertion: `Y \ X`.
    pub fn added_support(&self) -> Subset {
        self.y.difference(self.x)
    }

    /// Elements eligible for removal: `X \ Y`.
    pub fn removed_support(&self) -> Subset {
        self.x.difference(self.y)
    }

    pub fn kind_name(&self) -> &'static str {
        match &self.mechanism {
            Mechanism::Trivial { .. } => "trivial-k-exchange",
            Mechanism::Path { .. } => "path-k-exchange",
            Mechanism::Rota { .. } => "matroid-rota",
            Mechanism::Composition { .. } => "composition",
            Mechanism::Light { .. } => "knapsack-light",
            Mechanism::Heavy => "knapsack-heavy",
        }
    }

    /// Whether the internal randomness is discrete, so the exact
    /// certification path applies.
    pub fn enumerable(&self) -> bool {
        match &self.mechanism {
            Mechanism::Light { .. } => false,
            Mechanism::Composition { parts } => parts.iter().all(|m| m.enumerable()),
            _ => true,
        }
    }

    /// Whether `S(R) = R` deterministically (required for composition).
    pub fn has_identity_insert(&self) -> bool {
        match &self.mechanism {
            Mechanism::Trivial { .. } | Mechanism::Rota { .. } | Mechanism::Heavy => true,
            Mechanism::Light { .. } => true,
            Mechanism::Composition { parts } => parts.iter().all(|m| m.has_identity_insert()),
            Mechanism::Path { .. } => false,
        }
    }

    /// Exact distribution of `(S(R), T(R))` for a fixed activated set `R`.
    pub fn outcomes(&self, r: Subset) -> Result<Vec<Outcome>> {
        if !r.is_subset_of(self.added_support()) {
            return Err(Error::InvalidParameter("R must be a subset of Y \\ X".into()));
        }
        let n = self.x.universe_len();
        match &self.mechanism {
            Mechanism::Trivial { removal } => {
                let mut t = Subset::empty(n);
                for &(y_el, t_y) in removal {
                    if r.contains(y_el) {
                        t = t.union(t_y);
                    }
                }
                Ok(vec![Outcome { probability: 1.0, insert: r, remove: t }])
            }
            Mechanism::Rota { removal } => {
                let b = removal
                    .binary_search_by_key(&r.mask(), |&(m, _)| m)
                    .map(|i| removal[i].1)
                    .map_err(|_| Error::ConstructionFailed("missing removal entry".into()))?;
                Ok(vec![Outcome {
                    probability: 1.0,
                    insert: r,
                    remove: Subset::from_mask(n, b),
                }])
            }
            Mechanism::Heavy => {
                let t = if r.is_empty() { Subset::empty(n) } else { self.removed_support() };
                Ok(vec![Outcome { probability: 1.0, insert: r, remove: t }])
            }
            Mechanism::Path { sets, classes } => {
                let class_prob = 1.0 / *classes as f64;
                let mut out = Vec::new();
                for class in 0..*classes {
                    let candidates: Vec<&PathSet> = sets
                        .iter()
                        .filter(|ps| ps.class == class && ps.s.is_subset_of(r))
                        .collect();
                    // Coins are independent; enumerate all selections.
                    let m = candidates.len();
                    for pick in 0..(1u64 << m) {
                        let mut prob = class_prob;
                        let mut s = Subset::empty(n);
                        let mut t = Subset::empty(n);
                        for (i, ps) in candidates.iter().enumerate() {
                            if pick & (1 << i) != 0 {
                                prob *= ps.coin;
                                s = s.union(ps.s);
                                t = t.union(ps.t);
                            } else {
                                prob *= 1.0 - ps.coin;
                            }
                        }
                        if prob > 0.0 {
                            out.push(Outcome { probability: prob, insert: s, remove: t });
                        }
                    }
                }
                Ok(out)
            }
            Mechanism::Composition { parts } => {
                let mut acc = vec![Outcome {
                    probability: 1.0,
                    insert: r,
                    remove: Subset::empty(n),
                }];
                for part in parts {
                    let part_outcomes = part.outcomes(r)?;
                    let mut next = Vec::with_capacity(acc.len() * part_outcomes.len());
                    for a in &acc {
                        for po in &part_outcomes {
                            next.push(Outcome {
                                probability: a.probability * po.probability,
                                insert: r,
                                remove: a.remove.union(po.remove),
                            });
                        }
                    }
                    acc = next;
                }
                Ok(acc)
            }
            Mechanism::Light { .. } => Err(Error::ExactCertificationUnsupported),
        }
    }

    /// Draw one realization of `(S(R), T(R))`.
    pub fn sample(&self, r: Subset, rng: &mut RandomSource) -> (Subset, Subset) {
        debug_assert!(r.is_subset_of(self.added_support()));
        let n = self.x.universe_len();
        match &self.mechanism {
            Mechanism::Trivial { removal } => {
                let mut t = Subset::empty(n);
                for &(y_el, t_y) in removal {
                    if r.contains(y_el) {
                        t = t.union(t_y);
                    }
                }
                (r, t)
            }
            Mechanism::Rota { removal } => {
                let b = removal
                    .binary_search_by_key(&r.mask(), |&(m, _)| m)
                    .map(|i| removal[i].1)
                    .unwrap_or(0);
                (r, Subset::from_mask(n, b))
            }
            Mechanism::Heavy => {
                let t = if r.is_empty() { Subset::empty(n) } else { self.removed_support() };
                (r, t)
            }
            Mechanism::Path { sets, classes } => {
                let class = rng.range_usize(*classes);
                let mut s = Subset::empty(n);
                let mut t = Subset::empty(n);
                for ps in sets {
                    if ps.class == class && ps.s.is_subset_of(r) && rng.bernoulli(ps.coin) {
                        s = s.union(ps.s);
                        t = t.union(ps.t);
                    }
                }
                (s, t)
            }
            Mechanism::Composition { parts } => {
                let mut t = Subset::empty(n);
                for part in parts {
                    let (_, pt) = part.sample(r, rng);
                    t = t.union(pt);
                }
                (r, t)
            }
            Mechanism::Light { sizes, arcs } => {
                let arc_len: f64 = r.iter().map(|e| sizes[e]).sum();
                let start = rng.f64();
                let mut t = Subset::empty(n);
                for arc in arcs {
                    let overlap = circle_overlap(start, arc_len, arc.start, arc.len);
                    if overlap >= arc.len - 1e-12 {
                        t.insert(arc.element);
                    } else if overlap > 0.0 && rng.bernoulli(overlap / arc.len) {
                        t.insert(arc.element);
                    }
                }
                (r, t)
            }
        }
    }
}

/// Overlap length of the arc `[a, a + la)` (mod 1) with the fixed arc
/// `[b, b + lb)`, where the fixed arc does not wrap.
fn circle_overlap(a: f64, la: f64, b: f64, lb: f64) -> f64 {
    debug_assert!(b + lb <= 1.0 + 1e-12);
    let seg = |lo: f64, hi: f64| -> f64 { (hi.min(b + lb) - lo.max(b)).max(0.0) };
    if a + la <= 1.0 {
        seg(a, a + la)
    } else {
        seg(a, 1.0) + seg(0.0, a + la - 1.0)
    }
}

/// The deterministic map induced by a k-exchange certificate:
/// `S(R) = R`, `T(R) = ∪_{y ∈ R} T_y`. Target uniformity `(p, pk)`.
pub fn build_trivial_k_exchange_map(cert: &KExchangeCertificate) -> ExchangeMap {
    let removal: Vec<(usize, Subset)> = cert
        .y()
        .difference(cert.x())
        .iter()
        .map(|y_el| (y_el, cert.removal_set(y_el)))
        .collect();
    ExchangeMap {
        x: cert.x(),
        y: cert.y(),
        gamma: 1,
        mechanism: Mechanism::Trivial { removal },
    }
}

/// The all-or-nothing map for domains whose members have at most `k`
/// elements: remove every element of `X \ Y` as soon as anything
/// activates. Exact removal probability `1 - (1-p)^{|Y \ X|}`.
pub fn build_knapsack_heavy_map(x: Subset, y: Subset, k: usize) -> Result<ExchangeMap> {
    if x.len() > k {
        return Err(Error::CardinalityBound { len: x.len(), max: k });
    }
    if y.len() > k {
        return Err(Error::CardinalityBound { len: y.len(), max: k });
    }
    Ok(ExchangeMap { x, y, gamma: 1, mechanism: Mechanism::Heavy })
}

/// Compose maps that share `(X, Y)` and the identity insertion rule:
/// the removal set becomes the union of the parts' removals, landing in
/// the intersection of the parts' domains.
pub fn compose_maps(maps: Vec<ExchangeMap>) -> Result<ExchangeMap> {
    let first = maps
        .first()
        .ok_or_else(|| Error::MismatchedMaps("composition of zero maps".into()))?;
    let (x, y) = (first.x, first.y);
    let gamma = maps.iter().map(|m| m.gamma).max().unwrap_or(1);
    for m in &maps {
        if m.x != x || m.y != y {
            return Err(Error::MismatchedMaps("maps disagree on (X, Y)".into()));
        }
        if !m.has_identity_insert() {
            return Err(Error::MismatchedMaps(format!(
                "{} does not use S(R) = R",
                m.kind_name()
            )));
        }
    }
    if maps.len() == 1 {
        return Ok(maps.into_iter().next().unwrap());
    }
    Ok(ExchangeMap { x, y, gamma, mechanism: Mechanism::Composition { parts: maps } })
}

fn probs_for(map: &ExchangeMap, probs: &[f64]) -> Result<()> {
    if probs.len() != map.x.universe_len() {
        return Err(Error::InvalidParameter(format!(
            "{} probabilities for universe of size {}",
            probs.len(),
            map.x.universe_len()
        )));
    }
    for &p in probs {
        if !(0.0..=1.0).contains(&p) {
            return Err(Error::InvalidProbability(p));
        }
    }
    Ok(())
}

/// Iterate `(R, P(R))` over the product distribution on `Y \ X`.
pub(crate) fn weighted_activations(
    support: Subset,
    probs: &[f64],
) -> impl Iterator<Item = (Subset, f64)> + '_ {
    subsets_of(support).map(move |r| {
        let mut w = 1.0;
        for e in support.iter() {
            w *= if r.contains(e) { probs[e] } else { 1.0 - probs[e] };
        }
        (r, w)
    })
}

/// Certify `(alpha_hat, beta_hat)` under independent activation of
/// `Y \ X` with the given marginals.
///
/// The exact method enumerates every `R` (weighted by the product
/// distribution) and, for discretely randomized maps, every internal
/// draw; it requires `|Y \ X| <= 12`. Monte-Carlo reports a 3-sigma
/// confidence radius and needs a random source.
pub fn certify_uniformity(
    map: &ExchangeMap,
    probs: &[f64],
    method: CertMethod,
    samples: u64,
    rng: Option<&mut RandomSource>,
) -> Result<UniformityReport> {
    probs_for(map, probs)?;
    let added = map.added_support();
    let removed = map.removed_support();
    match method {
        CertMethod::Exact => {
            if added.len() > 12 {
                return Err(Error::UniverseTooLarge { size: added.len(), max: 12 });
            }
            if !map.enumerable() {
                return Err(Error::ExactCertificationUnsupported);
            }
            let n = map.x.universe_len();
            let mut s_prob = vec![0.0f64; n];
            let mut t_prob = vec![0.0f64; n];
            let mut enumerated = 0u64;
            for (r, w) in weighted_activations(added, probs) {
                if w == 0.0 {
                    continue;
                }
                for outcome in map.outcomes(r)? {
                    enumerated += 1;
                    let mass = w * outcome.probability;
                    for e in outcome.insert.iter() {
                        s_prob[e] += mass;
                    }
                    for e in outcome.remove.iter() {
                        t_prob[e] += mass;
                    }
                }
            }
            let alpha_hat = added.iter().map(|e| s_prob[e]).fold(f64::INFINITY, f64::min);
            let beta_hat = removed.iter().map(|e| t_prob[e]).fold(0.0, f64::max);
            Ok(UniformityReport {
                kind: map.kind_name().to_string(),
                alpha_hat: if added.is_empty() { 1.0 } else { alpha_hat },
                beta_hat,
                method: CertMethod::Exact,
                samples: enumerated,
                radius: 0.0,
                vacuous: added.is_empty(),
            })
        }
        CertMethod::MonteCarlo => {
            let rng = rng.ok_or_else(|| {
                Error::InvalidParameter("Monte-Carlo certification needs a random source".into())
            })?;
            if samples == 0 {
                return Err(Error::InvalidParameter("sample count must be positive".into()));
            }
            let n = map.x.universe_len();
            let mut s_count = vec![0u64; n];
            let mut t_count = vec![0u64; n];
            for _ in 0..samples {
                let mut r = Subset::empty(n);
                for e in added.iter() {
                    if rng.bernoulli(probs[e]) {
                        r.insert(e);
                    }
                }
                let (s, t) = map.sample(r, rng);
                for e in s.iter() {
                    s_count[e] += 1;
                }
                for e in t.iter() {
                    t_count[e] += 1;
                }
            }
            let alpha_hat = added
                .iter()
                .map(|e| s_count[e] as f64 / samples as f64)
                .fold(f64::INFINITY, f64::min);
            let beta_hat = removed
                .iter()
                .map(|e| t_count[e] as f64 / samples as f64)
                .fold(0.0, f64::max);
            Ok(UniformityReport {
                kind: map.kind_name().to_string(),
                alpha_hat: if added.is_empty() { 1.0 } else { alpha_hat },
                beta_hat,
                method: CertMethod::MonteCarlo,
                samples,
                radius: 3.0 * (0.25 / samples as f64).sqrt(),
                vacuous: added.is_empty(),
            })
        }
    }
}

/// Exact slack of the expected-gain bound for an enumerable map.
///
/// Computes `E[f(X ∪ S(R) \ T(R)) - f(X)]` by full enumeration and
/// subtracts the bound instantiated with the certified `(alpha_hat,
/// beta_hat)`: `alpha f(Y) - max(alpha, beta) f(X)` in the linear form,
/// `alpha f(X ∪ Y) - (alpha + beta) f(X)` in the submodular form. The
/// result is nonnegative (up to tolerance) for every conforming map and
/// normalized monotone objective of the stated class.
pub fn verify_gain_bound<F: SetFunction>(
    map: &ExchangeMap,
    f: &F,
    class: ObjectiveClass,
    probs: &[f64],
) -> Result<f64> {
    probs_for(map, probs)?;
    if !map.enumerable() {
        return Err(Error::ExactCertificationUnsupported);
    }
    if class == ObjectiveClass::Linear && f.linear_weights().is_none() {
        return Err(Error::InvalidParameter(
            "linear-form bound requires a linear objective".into(),
        ));
    }
    let report = certify_uniformity(map, probs, CertMethod::Exact, 0, None)?;
    let (alpha, beta) = (report.alpha_hat, report.beta_hat);
    let x = map.x();
    let fx = f.value(x);
    let mut expected_gain = 0.0;
    for (r, w) in weighted_activations(map.added_support(), probs) {
        if w == 0.0 {
            continue;
        }
        for outcome in map.outcomes(r)? {
            let exchanged = x.union(outcome.insert).difference(outcome.remove);
            expected_gain += w * outcome.probability * (f.value(exchanged) - fx);
        }
    }
    let bound = match class {
        ObjectiveClass::Linear => alpha * f.value(map.y()) - alpha.max(beta) * fx,
        ObjectiveClass::Submodular => alpha * f.value(x.union(map.y())) - (alpha + beta) * fx,
    };
    Ok(expected_gain - bound)
}

/// Check `S(R) ⊆ R` and `X ∪ S(R) \ T(R) ∈ γD` across the whole outcome
/// space (enumerable maps) or `samples` Monte-Carlo draws. `feasible`
/// receives the exchanged set and the map's `gamma`.
pub fn verify_well_formed(
    map: &ExchangeMap,
    feasible: &dyn Fn(Subset, u32) -> bool,
    samples: u64,
    rng: &mut RandomSource,
) -> Result<()> {
    let added = map.added_support();
    let check = |r: Subset, s: Subset, t: Subset| -> Result<()> {
        if !s.is_subset_of(r) {
            return Err(Error::CertificateInvalid(format!("S(R) = {s} not inside R = {r}")));
        }
        let exchanged = map.x().union(s).difference(t);
        if !feasible(exchanged, map.gamma()) {
            return Err(Error::CertificateInvalid(format!(
                "exchange {exchanged} leaves gamma = {} domain",
                map.gamma()
            )));
        }
        Ok(())
    };
    if map.enumerable() && added.len() <= 12 {
        for r in subsets_of(added) {
            for outcome in map.outcomes(r)? {
                check(r, outcome.insert, outcome.remove)?;
            }
        }
    } else {
        let n = map.x().universe_len();
        for _ in 0..samples {
            let mut r = Subset::empty(n);
            for e in added.iter() {
                if rng.bernoulli(0.5) {
                    r.insert(e);
                }
            }
            let (s, t) = map.sample(r, rng);
            check(r, s, t)?;
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::domain::{k_exchange_certificate, Domain};
    use crate::objective::{Objective, VALUE_TOL};
    use std::collections::BTreeMap;

    fn certificate(
        n: usize,
        x: &[usize],
        y: &[usize],
        k: usize,
        removal: &[(usize, &[usize])],
    ) -> KExchangeCertificate {
        let x = Subset::from_ids(n, x).unwrap();
        let y = Subset::from_ids(n, y).unwrap();
        let mut map = BTreeMap::new();
        for &(y_el, t) in removal {
            map.insert(y_el, Subset::from_ids(n, t).unwrap());
        }
        KExchangeCertificate::new(x, y, k, map).unwrap()
    }

    #[test]
    fn trivial_map_shared_removal() {
        // Y \ X = {y1, y2} both mapping to {x1}: x1 is removed unless
        // R is empty, so beta_hat = 1 - (1-p)^2 = 0.75 at p = 0.5.
        let cert = certificate(3, &[0], &[1, 2], 2, &[(1, &[0]), (2, &[0])]);
        let map = build_trivial_k_exchange_map(&cert);
        let report = certify_uniformity(&map, &[0.5; 3], CertMethod::Exact, 0, None).unwrap();
        assert!((report.alpha_hat - 0.5).abs() < VALUE_TOL);
        assert!((report.beta_hat - 0.75).abs() < VALUE_TOL);
        assert!(report.beta_hat <= 2.0 * 0.5 + VALUE_TOL);
        assert!(!report.vacuous);
    }

    #[test]
    fn trivial_map_empty_difference_is_vacuous() {
        let cert = certificate(2, &[0, 1], &[0, 1], 2, &[]);
        let map = build_trivial_k_exchange_map(&cert);
        for r in subsets_of(map.added_support()) {
            let outcomes = map.outcomes(r).unwrap();
            assert_eq!(outcomes.len(), 1);
            assert!(outcomes[0].insert.is_empty());
            assert!(outcomes[0].remove.is_empty());
        }
        let report = certify_uniformity(&map, &[0.5; 2], CertMethod::Exact, 0, None).unwrap();
        assert!(report.vacuous);
        assert_eq!(report.alpha_hat, 1.0);
        assert_eq!(report.beta_hat, 0.0);
    }

    #[test]
    fn trivial_map_disjoint_singletons() {
        // Disjoint removal singletons: each x removed exactly when its
        // unique y activates, so beta_hat = p.
        let cert = certificate(4, &[0, 1], &[2, 3], 2, &[(2, &[0]), (3, &[1])]);
        let map = build_trivial_k_exchange_map(&cert);
        let report = certify_uniformity(&map, &[0.5; 4], CertMethod::Exact, 0, None).unwrap();
        assert!((report.alpha_hat - 0.5).abs() < VALUE_TOL);
        assert!((report.beta_hat - 0.5).abs() < VALUE_TOL);
    }

    #[test]
    fn heavy_map_exact_beta() {
        let x = Subset::from_ids(4, &[0, 1]).unwrap();
        let y = Subset::from_ids(4, &[2, 3]).unwrap();
        let map = build_knapsack_heavy_map(x, y, 2).unwrap();
        let report = certify_uniformity(&map, &[0.5; 4], CertMethod::Exact, 0, None).unwrap();
        assert!((report.alpha_hat - 0.5).abs() < VALUE_TOL);
        assert!((report.beta_hat - 0.75).abs() < VALUE_TOL);

        // p = 1: everything activates, everything is removed.
        let report = certify_uniformity(&map, &[1.0; 4], CertMethod::Exact, 0, None).unwrap();
        assert!((report.alpha_hat - 1.0).abs() < VALUE_TOL);
        assert!((report.beta_hat - 1.0).abs() < VALUE_TOL);

        // Y \ X empty: beta_hat = 0.
        let map = build_knapsack_heavy_map(x, x, 2).unwrap();
        let report = certify_uniformity(&map, &[0.5; 4], CertMethod::Exact, 0, None).unwrap();
        assert_eq!(report.beta_hat, 0.0);
    }

    #[test]
    fn heavy_map_rejects_large_sets() {
        let x = Subset::from_ids(4, &[0, 1, 2]).unwrap();
        let y = Subset::singleton(4, 3);
        assert!(matches!(
            build_knapsack_heavy_map(x, y, 2),
            Err(Error::CardinalityBound { len: 3, max: 2 })
        ));
    }

    #[test]
    fn small_p_limit_drives_alpha_down() {
        let cert = certificate(2, &[0], &[1], 2, &[(1, &[0])]);
        let map = build_trivial_k_exchange_map(&cert);
        let report = certify_uniformity(&map, &[0.001; 2], CertMethod::Exact, 0, None).unwrap();
        assert!(report.alpha_hat < 0.002);
    }

    #[test]
    fn composition_unions_removals() {
        let x = Subset::from_ids(4, &[0, 1]).unwrap();
        let y = Subset::from_ids(4, &[2, 3]).unwrap();
        let m1 = build_trivial_k_exchange_map(&certificate(
            4,
            &[0, 1],
            &[2, 3],
            1,
            &[(2, &[0]), (3, &[])],
        ));
        let m2 = build_trivial_k_exchange_map(&certificate(
            4,
            &[0, 1],
            &[2, 3],
            1,
            &[(2, &[]), (3, &[1])],
        ));
        // Single-map composition is the map itself.
        let only = compose_maps(vec![m1.clone()]).unwrap();
        assert_eq!(only.kind_name(), "trivial-k-exchange");

        let composed = compose_maps(vec![m1.clone(), m2.clone()]).unwrap();
        assert_eq!(composed.x(), x);
        assert_eq!(composed.y(), y);
        let r1 = certify_uniformity(&m1, &[0.5; 4], CertMethod::Exact, 0, None).unwrap();
        let r2 = certify_uniformity(&m2, &[0.5; 4], CertMethod::Exact, 0, None).unwrap();
        let rc = certify_uniformity(&composed, &[0.5; 4], CertMethod::Exact, 0, None).unwrap();
        assert!(rc.beta_hat <= r1.beta_hat + r2.beta_hat + VALUE_TOL);
        assert!((rc.alpha_hat - 0.5).abs() < VALUE_TOL);
    }

    #[test]
    fn composition_rejects_mismatches() {
        let m1 = build_trivial_k_exchange_map(&certificate(3, &[0], &[1], 2, &[(1, &[0])]));
        let m2 = build_trivial_k_exchange_map(&certificate(3, &[0], &[2], 2, &[(2, &[0])]));
        assert!(compose_maps(vec![m1, m2]).is_err());
        assert!(compose_maps(vec![]).is_err());
    }

    #[test]
    fn gain_bound_trivial_map_linear() {
        let cert = certificate(4, &[0, 1], &[2, 3], 2, &[(2, &[0]), (3, &[1])]);
        let map = build_trivial_k_exchange_map(&cert);
        let f = Objective::linear(vec![1.0, 2.0, 3.0, 4.0]).unwrap();
        let slack = verify_gain_bound(&map, &f, ObjectiveClass::Linear, &[0.5; 4]).unwrap();
        assert!(slack >= -VALUE_TOL, "slack {slack}");

        // Zero objective: expected gain and bound both vanish.
        let zero = Objective::linear(vec![0.0; 4]).unwrap();
        let slack = verify_gain_bound(&map, &zero, ObjectiveClass::Linear, &[0.5; 4]).unwrap();
        assert!(slack.abs() < VALUE_TOL);
    }

    #[test]
    fn monte_carlo_matches_exact_on_trivial_map() {
        let cert = certificate(3, &[0], &[1, 2], 2, &[(1, &[0]), (2, &[0])]);
        let map = build_trivial_k_exchange_map(&cert);
        let mut rng = RandomSource::new(5);
        let mc = certify_uniformity(
            &map,
            &[0.5; 3],
            CertMethod::MonteCarlo,
            20_000,
            Some(&mut rng),
        )
        .unwrap();
        assert!((mc.alpha_hat - 0.5).abs() < mc.radius);
        assert!((mc.beta_hat - 0.75).abs() < mc.radius);
    }

    #[test]
    fn well_formedness_on_matching_maps() {
        let d = Domain::matching(4, vec![(0, 1), (1, 2), (2, 3), (0, 3)]).unwrap();
        let x = Subset::from_ids(4, &[0, 2]).unwrap(); // edges (0,1), (2,3)
        let y = Subset::from_ids(4, &[1, 3]).unwrap(); // edges (1,2), (0,3)
        let cert = k_exchange_certificate(&d, x, y).unwrap();
        let map = build_trivial_k_exchange_map(&cert);
        let mut rng = RandomSource::new(1);
        verify_well_formed(&map, &|s, _| d.is_feasible(s), 0, &mut rng).unwrap();
    }
}
