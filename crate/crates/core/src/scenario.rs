//! Activation scenarios, query transcripts, and knowledge states.
//!
//! Nature activates each element independently; a query reveals one
//! element's hidden state. The transcript records rounds of simultaneous
//! queries, and the knowledge state is the tri-state partition it induces.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::rng::RandomSource;
use crate::set::Subset;

/// A hidden activation draw together with the marginals it was drawn from.
#[derive(Clone, Debug, Serialize)]
pub struct ActivationScenario {
    probs: Vec<f64>,
    active: Subset,
}

fn validate_probs(probs: &[f64]) -> Result<()> {
    if probs.len() > crate::set::MAX_UNIVERSE {
        return Err(Error::UniverseTooLarge { size: probs.len(), max: crate::set::MAX_UNIVERSE });
    }
    for &p in probs {
        if !(p > 0.0 && p <= 1.0) {
            return Err(Error::InvalidProbability(p));
        }
    }
    Ok(())
}

impl ActivationScenario {
    /// Build a scenario with an explicitly chosen active set. Used by
    /// tests and by degenerate-case harnesses; sampled scenarios come from
    /// [`sample_activation`].
    pub fn with_active(probs: Vec<f64>, active: Subset) -> Result<ActivationScenario> {
        validate_probs(&probs)?;
        if active.universe_len() != probs.len() {
            return Err(Error::InvalidParameter(format!(
                "active set universe {} does not match {} probabilities",
                active.universe_len(),
                probs.len()
            )));
        }
        Ok(ActivationScenario { probs, active })
    }

    pub fn universe_len(&self) -> usize {
        self.probs.len()
    }

    pub fn probs(&self) -> &[f64] {
        &self.probs
    }

    pub fn active(&self) -> Subset {
        self.active
    }

    pub fn is_active(&self, e: usize) -> bool {
        self.active.contains(e)
    }

    pub fn p_min(&self) -> f64 {
        self.probs.iter().cloned().fold(1.0, f64::min)
    }
}

/// Draw a scenario: each element is active independently with its own
/// marginal. Deterministic given the random source state.
pub fn sample_activation(probs: &[f64], rng: &mut RandomSource) -> Result<ActivationScenario> {
    validate_probs(probs)?;
    let mut active = Subset::empty(probs.len());
    for (e, &p) in probs.iter().enumerate() {
        if rng.bernoulli(p) {
            active.insert(e);
        }
    }
    Ok(ActivationScenario { probs: probs.to_vec(), active })
}

/// An ordered record of query rounds and the states they revealed.
///
/// Re-querying an element is a no-op on the revealed map; the round still
/// counts toward adaptivity if it is nonempty.
#[derive(Clone, Debug)]
pub struct QueryTranscript {
    n: usize,
    rounds: Vec<Subset>,
    revealed_active: Subset,
    revealed_inactive: Subset,
}

impl QueryTranscript {
    pub fn new(n: usize) -> QueryTranscript {
        QueryTranscript {
            n,
            rounds: Vec::new(),
            revealed_active: Subset::empty(n),
            revealed_inactive: Subset::empty(n),
        }
    }

    pub fn universe_len(&self) -> usize {
        self.n
    }

    /// Append one round of simultaneous queries, extending the revealed
    /// map with the scenario's truth for newly queried elements.
    pub fn apply_round(&mut self, targets: Subset, scenario: &ActivationScenario) {
        assert_eq!(targets.universe_len(), self.n, "targets outside universe");
        assert_eq!(scenario.universe_len(), self.n, "scenario universe mismatch");
        let newly = targets.difference(self.queried());
        self.revealed_active = self.revealed_active.union(newly.intersection(scenario.active()));
        self.revealed_inactive =
            self.revealed_inactive.union(newly.difference(scenario.active()));
        self.rounds.push(targets);
    }

    pub fn rounds(&self) -> &[Subset] {
        &self.rounds
    }

    /// Number of nonempty rounds.
    pub fn adaptivity(&self) -> usize {
        self.rounds.iter().filter(|r| !r.is_empty()).count()
    }

    /// Union of all queried elements.
    pub fn queried(&self) -> Subset {
        self.revealed_active.union(self.revealed_inactive)
    }

    pub fn revealed(&self, e: usize) -> Option<bool> {
        if self.revealed_active.contains(e) {
            Some(true)
        } else if self.revealed_inactive.contains(e) {
            Some(false)
        } else {
            None
        }
    }

    pub fn knowledge_state(&self) -> KnowledgeState {
        KnowledgeState {
            known_active: self.revealed_active,
            known_inactive: self.revealed_inactive,
            unknown: self.queried().complement(),
        }
    }
}

/// Tri-state partition of the universe induced by a transcript.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct KnowledgeState {
    pub known_active: Subset,
    pub known_inactive: Subset,
    pub unknown: Subset,
}

/// Partition of the universe by revealed status.
pub fn knowledge_state(transcript: &QueryTranscript) -> KnowledgeState {
    transcript.knowledge_state()
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn certainty_activates_everything() {
        let mut rng = RandomSource::new(1);
        let s = sample_activation(&[1.0; 5], &mut rng).unwrap();
        assert_eq!(s.active(), Subset::full(5));
    }

    #[test]
    fn rejects_bad_probabilities() {
        let mut rng = RandomSource::new(1);
        assert!(sample_activation(&[0.0], &mut rng).is_err());
        assert!(sample_activation(&[1.5], &mut rng).is_err());
        assert!(sample_activation(&[-0.1], &mut rng).is_err());
    }

    #[test]
    fn same_seed_same_active_set() {
        let a = sample_activation(&[0.5; 20], &mut RandomSource::new(99)).unwrap();
        let b = sample_activation(&[0.5; 20], &mut RandomSource::new(99)).unwrap();
        assert_eq!(a.active(), b.active());
    }

    #[test]
    fn empirical_marginals_match() {
        // 10^4 samples; per-element inclusion rate within 3 standard errors
        // of 0.5 (se = sqrt(0.25/10^4) = 0.005), loosened to the spec'd 0.02.
        let n = 20;
        let trials = 10_000;
        let root = RandomSource::new(2024);
        let mut counts = vec![0usize; n];
        for t in 0..trials {
            let mut rng = root.child_indexed("sample", t as u64);
            let s = sample_activation(&vec![0.5; n], &mut rng).unwrap();
            for e in s.active().iter() {
                counts[e] += 1;
            }
        }
        for &c in &counts {
            let rate = c as f64 / trials as f64;
            assert!((rate - 0.5).abs() < 0.02, "rate {rate} too far from 0.5");
        }
    }

    #[test]
    fn round_application_and_idempotence() {
        let probs = vec![0.5; 4];
        let active = Subset::from_ids(4, &[1]).unwrap();
        let scenario = ActivationScenario::with_active(probs, active).unwrap();
        let mut t = QueryTranscript::new(4);

        t.apply_round(Subset::from_ids(4, &[1, 2]).unwrap(), &scenario);
        assert_eq!(t.revealed(1), Some(true));
        assert_eq!(t.revealed(2), Some(false));
        assert_eq!(t.adaptivity(), 1);

        // Re-query: revealed unchanged, adaptivity counts the round.
        t.apply_round(Subset::from_ids(4, &[1]).unwrap(), &scenario);
        assert_eq!(t.revealed(1), Some(true));
        assert_eq!(t.adaptivity(), 2);

        // Empty round does not count toward adaptivity.
        t.apply_round(Subset::empty(4), &scenario);
        assert_eq!(t.adaptivity(), 2);
    }

    #[test]
    fn batched_vs_sequential_rounds() {
        let scenario =
            ActivationScenario::with_active(vec![0.5; 4], Subset::from_ids(4, &[1]).unwrap())
                .unwrap();
        let mut seq = QueryTranscript::new(4);
        seq.apply_round(Subset::singleton(4, 1), &scenario);
        seq.apply_round(Subset::singleton(4, 2), &scenario);
        let mut bat = QueryTranscript::new(4);
        bat.apply_round(Subset::from_ids(4, &[1, 2]).unwrap(), &scenario);
        assert_eq!(seq.queried(), bat.queried());
        assert_eq!(seq.revealed(1), bat.revealed(1));
        assert_eq!(seq.adaptivity(), 2);
        assert_eq!(bat.adaptivity(), 1);
    }

    #[test]
    fn knowledge_state_partitions() {
        let scenario =
            ActivationScenario::with_active(vec![0.5; 4], Subset::from_ids(4, &[3]).unwrap())
                .unwrap();
        let mut t = QueryTranscript::new(4);
        let ks = t.knowledge_state();
        assert_eq!(ks.unknown, Subset::full(4));

        t.apply_round(Subset::from_ids(4, &[0, 3]).unwrap(), &scenario);
        let ks = t.knowledge_state();
        assert_eq!(ks.known_active.ids(), vec![3]);
        assert_eq!(ks.known_inactive.ids(), vec![0]);
        assert_eq!(ks.unknown.ids(), vec![1, 2]);
    }

    proptest! {
        /// Partition + consistency invariants over random query sequences.
        #[test]
        fn partition_and_consistency(
            active_mask in 0u64..256,
            rounds in proptest::collection::vec(0u64..256, 0..6),
        ) {
            let n = 8;
            let scenario = ActivationScenario::with_active(
                vec![0.5; n],
                Subset::from_mask(n, active_mask),
            ).unwrap();
            let mut t = QueryTranscript::new(n);
            for r in rounds {
                t.apply_round(Subset::from_mask(n, r), &scenario);
                let ks = t.knowledge_state();
                // Partition: pairwise disjoint, union = universe.
                prop_assert!(ks.known_active.is_disjoint(ks.known_inactive));
                prop_assert!(ks.known_active.is_disjoint(ks.unknown));
                prop_assert!(ks.known_inactive.is_disjoint(ks.unknown));
                let all = ks.known_active.union(ks.known_inactive).union(ks.unknown);
                prop_assert_eq!(all, Subset::full(n));
                // Consistency with the generating scenario.
                prop_assert!(ks.known_active.is_subset_of(scenario.active()));
                prop_assert!(ks.known_inactive.is_disjoint(scenario.active()));
            }
        }
    }
}
