//! Feasible domains, matroid oracles, and k-exchange certificates.
//!
//! Every domain exposes a feasibility oracle and desk-scale enumeration.
//! Matching and set-packing domains additionally produce the k-exchange
//! certificates that the exchange-map constructions consume.

use std::collections::BTreeMap;

use crate::error::{Error, Result};
use crate::set::{subsets_of, Subset, MAX_UNIVERSE};

/// Tolerance for knapsack capacity comparisons.
pub const CAPACITY_TOL: f64 = 1e-9;

/// Cap on `|allowed|` for exhaustive feasibility enumeration.
pub const ENUMERATION_CAP: usize = 22;

/// An independence oracle for a matroid over elements `0..n`.
#[derive(Clone, Debug)]
pub enum MatroidOracle {
    /// Independent iff `|X| <= rank`.
    Uniform { n: usize, rank: usize },
    /// Independent iff each block contributes at most its capacity.
    Partition { block_of: Vec<usize>, capacities: Vec<usize> },
    /// Elements are edges of a graph; independent iff acyclic.
    Graphic { vertices: usize, edges: Vec<(usize, usize)> },
    /// Explicit independence family, stored as sorted masks.
    Explicit { n: usize, independent: Vec<u64> },
}

impl MatroidOracle {
    pub fn uniform(n: usize, rank: usize) -> Result<MatroidOracle> {
        check_universe(n)?;
        Ok(MatroidOracle::Uniform { n, rank })
    }

    pub fn partition(block_of: Vec<usize>, capacities: Vec<usize>) -> Result<MatroidOracle> {
        check_universe(block_of.len())?;
        for &b in &block_of {
            if b >= capacities.len() {
                return Err(Error::InvalidParameter(format!(
                    "block id {b} outside {} blocks",
                    capacities.len()
                )));
            }
        }
        Ok(MatroidOracle::Partition { block_of, capacities })
    }

    pub fn graphic(vertices: usize, edges: Vec<(usize, usize)>) -> Result<MatroidOracle> {
        check_universe(edges.len())?;
        for &(u, v) in &edges {
            if u >= vertices || v >= vertices {
                return Err(Error::InvalidParameter(format!(
                    "edge ({u},{v}) outside {vertices} vertices"
                )));
            }
        }
        Ok(MatroidOracle::Graphic { vertices, edges })
    }

    /// Explicit family from a list of independent sets. The list is stored
    /// verbatim (deduplicated); deliberately invalid families can be built
    /// to exercise the axiom checker.
    pub fn explicit(n: usize, sets: &[Subset]) -> Result<MatroidOracle> {
        check_universe(n)?;
        let mut independent: Vec<u64> = sets.iter().map(|s| s.mask()).collect();
        independent.sort_unstable();
        independent.dedup();
        Ok(MatroidOracle::Explicit { n, independent })
    }

    pub fn universe_len(&self) -> usize {
        match self {
            MatroidOracle::Uniform { n, .. } => *n,
            MatroidOracle::Partition { block_of, .. } => block_of.len(),
            MatroidOracle::Graphic { edges, .. } => edges.len(),
            MatroidOracle::Explicit { n, .. } => *n,
        }
    }

    pub fn kind_name(&self) -> &'static str {
        match self {
            MatroidOracle::Uniform { .. } => "uniform",
            MatroidOracle::Partition { .. } => "partition",
            MatroidOracle::Graphic { .. } => "graphic",
            MatroidOracle::Explicit { .. } => "explicit",
        }
    }

    pub fn is_independent(&self, x: Subset) -> bool {
        debug_assert_eq!(x.universe_len(), self.universe_len());
        match self {
            MatroidOracle::Uniform { rank, .. } => x.len() <= *rank,
            MatroidOracle::Partition { block_of, capacities } => {
                let mut counts = vec![0usize; capacities.len()];
                for e in x.iter() {
                    let b = block_of[e];
                    counts[b] += 1;
                    if counts[b] > capacities[b] {
                        return false;
                    }
                }
                true
            }
            MatroidOracle::Graphic { vertices, edges } => {
                let mut uf = UnionFind::new(*vertices);
                for e in x.iter() {
                    let (u, v) = edges[e];
                    if !uf.union(u, v) {
                        return false;
                    }
                }
                true
            }
            MatroidOracle::Explicit { independent, .. } => {
                independent.binary_search(&x.mask()).is_ok()
            }
        }
    }

    /// Rank of a subset: size of a maximal independent subset, computed
    /// greedily (valid for matroids).
    pub fn rank_of(&self, x: Subset) -> usize {
        let n = self.universe_len();
        let mut cur = Subset::empty(n);
        for e in x.iter() {
            if self.is_independent(cur.with(e)) {
                cur.insert(e);
            }
        }
        cur.len()
    }

    /// Whether `x` is a base: independent and not extendable.
    pub fn is_base(&self, x: Subset) -> bool {
        if !self.is_independent(x) {
            return false;
        }
        for e in x.complement().iter() {
            if self.is_independent(x.with(e)) {
                return false;
            }
        }
        true
    }
}

fn check_universe(n: usize) -> Result<()> {
    if n > MAX_UNIVERSE {
        return Err(Error::UniverseTooLarge { size: n, max: MAX_UNIVERSE });
    }
    Ok(())
}

struct UnionFind {
    parent: Vec<usize>,
}

impl UnionFind {
    fn new(n: usize) -> UnionFind {
        UnionFind { parent: (0..n).collect() }
    }

    fn find(&mut self, mut x: usize) -> usize {
        while self.parent[x] != x {
            self.parent[x] = self.parent[self.parent[x]];
            x = self.parent[x];
        }
        x
    }

    /// Returns false if `u` and `v` were already connected.
    fn union(&mut self, u: usize, v: usize) -> bool {
        let ru = self.find(u);
        let rv = self.find(v);
        if ru == rv {
            return false;
        }
        self.parent[ru] = rv;
        true
    }
}

/// Exhaustively check the three independence axioms. `n <= 15`.
///
/// Augmentation is checked for cardinality gap one only; together with
/// downward closure that implies the general form.
pub fn verify_matroid_axioms(m: &MatroidOracle) -> Result<bool> {
    let n = m.universe_len();
    if n > 15 {
        return Err(Error::UniverseTooLarge { size: n, max: 15 });
    }
    let full = Subset::full(n);
    if !m.is_independent(Subset::empty(n)) {
        return Ok(false);
    }
    let mut by_size: Vec<Vec<Subset>> = vec![Vec::new(); n + 1];
    for x in subsets_of(full) {
        if m.is_independent(x) {
            by_size[x.len()].push(x);
        }
    }
    // Downward closure.
    for sets in &by_size {
        for &x in sets {
            for e in x.iter() {
                if !m.is_independent(x.without(e)) {
                    return Ok(false);
                }
            }
        }
    }
    // Augmentation across one cardinality step.
    for s in 0..n {
        for &x in &by_size[s] {
            for &y in &by_size[s + 1] {
                let mut found = false;
                for e in y.difference(x).iter() {
                    if m.is_independent(x.with(e)) {
                        found = true;
                        break;
                    }
                }
                if !found {
                    return Ok(false);
                }
            }
        }
    }
    Ok(true)
}

/// A feasible domain over elements `0..n`.
#[derive(Clone, Debug)]
pub enum Domain {
    /// Elements are edges; feasible iff no two share a vertex.
    Matching { vertices: usize, edges: Vec<(usize, usize)> },
    /// Elements index item sets; feasible iff the chosen sets are pairwise
    /// disjoint. `k` is the maximum set size across the instance.
    SetPacking { items: usize, sets: Vec<u64>, k: usize },
    MatroidIndependent(MatroidOracle),
    /// Feasible iff the set is a base of the matroid (not downward closed).
    MatroidBase(MatroidOracle),
    /// Feasible iff independent in every listed matroid.
    Intersection(Vec<MatroidOracle>),
    /// Capacity-1 knapsack with pre-normalized item sizes in (0, 1].
    Knapsack { sizes: Vec<f64> },
    /// Feasible iff `|X| <= rank`.
    Cardinality { n: usize, rank: usize },
}

impl Domain {
    pub fn matching(vertices: usize, edges: Vec<(usize, usize)>) -> Result<Domain> {
        check_universe(edges.len())?;
        for &(u, v) in &edges {
            if u >= vertices || v >= vertices || u == v {
                return Err(Error::InvalidParameter(format!("bad edge ({u},{v})")));
            }
        }
        Ok(Domain::Matching { vertices, edges })
    }

    /// `sets[e]` lists the items of set `e`.
    pub fn set_packing(items: usize, sets: &[Vec<usize>]) -> Result<Domain> {
        check_universe(sets.len())?;
        if items > 64 {
            return Err(Error::InvalidParameter("more than 64 packing items".into()));
        }
        let mut masks = Vec::with_capacity(sets.len());
        let mut k = 1;
        for set in sets {
            let mut mask = 0u64;
            for &it in set {
                if it >= items {
                    return Err(Error::InvalidParameter(format!("item {it} outside {items}")));
                }
                mask |= 1u64 << it;
            }
            k = k.max(set.len());
            masks.push(mask);
        }
        Ok(Domain::SetPacking { items, sets: masks, k })
    }

    pub fn knapsack(sizes: Vec<f64>) -> Result<Domain> {
        check_universe(sizes.len())?;
        for &c in &sizes {
            if !(c > 0.0 && c <= 1.0 + CAPACITY_TOL) {
                return Err(Error::InvalidParameter(format!("item size {c} outside (0, 1]")));
            }
        }
        Ok(Domain::Knapsack { sizes })
    }

    pub fn cardinality(n: usize, rank: usize) -> Result<Domain> {
        check_universe(n)?;
        Ok(Domain::Cardinality { n, rank })
    }

    pub fn universe_len(&self) -> usize {
        match self {
            Domain::Matching { edges, .. } => edges.len(),
            Domain::SetPacking { sets, .. } => sets.len(),
            Domain::MatroidIndependent(m) => m.universe_len(),
            Domain::MatroidBase(m) => m.universe_len(),
            Domain::Intersection(ms) => ms.first().map_or(0, |m| m.universe_len()),
            Domain::Knapsack { sizes } => sizes.len(),
            Domain::Cardinality { n, .. } => *n,
        }
    }

    pub fn kind_name(&self) -> &'static str {
        match self {
            Domain::Matching { .. } => "matching",
            Domain::SetPacking { .. } => "k-set-packing",
            Domain::MatroidIndependent(_) => "matroid-independent",
            Domain::MatroidBase(_) => "matroid-base",
            Domain::Intersection(_) => "intersection",
            Domain::Knapsack { .. } => "knapsack",
            Domain::Cardinality { .. } => "cardinality",
        }
    }

    /// All kinds except matroid bases are downward closed.
    pub fn is_downward_closed(&self) -> bool {
        !matches!(self, Domain::MatroidBase(_))
    }

    pub fn is_feasible(&self, x: Subset) -> bool {
        debug_assert_eq!(x.universe_len(), self.universe_len());
        match self {
            Domain::Matching { vertices, edges } => {
                let mut used = vec![false; *vertices];
                for e in x.iter() {
                    let (u, v) = edges[e];
                    if used[u] || used[v] {
                        return false;
                    }
                    used[u] = true;
                    used[v] = true;
                }
                true
            }
            Domain::SetPacking { sets, .. } => {
                let mut covered = 0u64;
                for e in x.iter() {
                    if covered & sets[e] != 0 {
                        return false;
                    }
                    covered |= sets[e];
                }
                true
            }
            Domain::MatroidIndependent(m) => m.is_independent(x),
            Domain::MatroidBase(m) => m.is_base(x),
            Domain::Intersection(ms) => ms.iter().all(|m| m.is_independent(x)),
            Domain::Knapsack { sizes } => {
                x.iter().map(|e| sizes[e]).sum::<f64>() <= 1.0 + CAPACITY_TOL
            }
            Domain::Cardinality { rank, .. } => x.len() <= *rank,
        }
    }
}

/// All feasible subsets of `allowed`, sorted by mask.
///
/// For downward-closed kinds the search extends feasible sets only, so the
/// cost is proportional to the feasible family rather than `2^|allowed|`.
/// For matroid bases it enumerates independent subsets of `allowed` and
/// keeps those of maximum rank.
pub fn enumerate_feasible(d: &Domain, allowed: Subset) -> Result<Vec<Subset>> {
    if allowed.len() > ENUMERATION_CAP {
        return Err(Error::UniverseTooLarge { size: allowed.len(), max: ENUMERATION_CAP });
    }
    let n = d.universe_len();
    if allowed.universe_len() != n {
        return Err(Error::InvalidParameter("allowed set universe mismatch".into()));
    }
    let mut out = Vec::new();
    match d {
        Domain::MatroidBase(m) => {
            let mut independent = Vec::new();
            grow_feasible(
                &|s| m.is_independent(s),
                allowed,
                Subset::empty(n),
                0,
                &mut independent,
            );
            let rank = independent.iter().map(|s| s.len()).max().unwrap_or(0);
            out.extend(independent.into_iter().filter(|s| s.len() == rank));
        }
        _ => {
            grow_feasible(&|s| d.is_feasible(s), allowed, Subset::empty(n), 0, &mut out);
        }
    }
    out.sort_unstable_by_key(|s| s.mask());
    Ok(out)
}

fn grow_feasible(
    feasible: &dyn Fn(Subset) -> bool,
    allowed: Subset,
    cur: Subset,
    min_next: usize,
    out: &mut Vec<Subset>,
) {
    if cur.is_empty() && !feasible(cur) {
        return;
    }
    out.push(cur);
    for e in min_next..allowed.universe_len() {
        if allowed.contains(e) && !cur.contains(e) {
            let ext = cur.with(e);
            if feasible(ext) {
                grow_feasible(feasible, allowed, ext, e + 1, out);
            }
        }
    }
}

/// A k-exchange collection between two feasible sets: for each
/// `y ∈ Y \ X`, a removal set `T_y ⊆ X \ Y` such that any subset of
/// `Y \ X` can be swapped in simultaneously.
#[derive(Clone, Debug)]
pub struct KExchangeCertificate {
    x: Subset,
    y: Subset,
    k: usize,
    removal: BTreeMap<usize, Subset>,
}

impl KExchangeCertificate {
    /// Assemble a certificate from explicit removal sets. Shape is
    /// validated here; the exchange property itself is checked by
    /// [`KExchangeCertificate::verify`].
    pub fn new(
        x: Subset,
        y: Subset,
        k: usize,
        removal: BTreeMap<usize, Subset>,
    ) -> Result<KExchangeCertificate> {
        let x_only = x.difference(y);
        let y_only = y.difference(x);
        for e in y_only.iter() {
            let t = removal
                .get(&e)
                .ok_or_else(|| Error::CertificateInvalid(format!("missing T_y for y = {e}")))?;
            if !t.is_subset_of(x_only) {
                return Err(Error::CertificateInvalid(format!("T_{e} not inside X \\ Y")));
            }
        }
        if removal.keys().any(|&e| !y_only.contains(e)) {
            return Err(Error::CertificateInvalid("removal key outside Y \\ X".into()));
        }
        Ok(KExchangeCertificate { x, y, k, removal })
    }

    pub fn x(&self) -> Subset {
        self.x
    }

    pub fn y(&self) -> Subset {
        self.y
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn removal_set(&self, y: usize) -> Subset {
        self.removal
            .get(&y)
            .copied()
            .unwrap_or_else(|| Subset::empty(self.x.universe_len()))
    }

    /// Union of removal sets over the members of `s`.
    pub fn removal_union(&self, s: Subset) -> Subset {
        let mut t = Subset::empty(self.x.universe_len());
        for e in s.iter() {
            t = t.union(self.removal_set(e));
        }
        t
    }

    /// Exhaustively verify the three k-exchange properties against a
    /// feasibility oracle. Property 3 enumerates all `2^{|Y \ X|}` swaps,
    /// so `|Y \ X|` is capped at 20.
    pub fn verify(&self, d: &Domain) -> Result<()> {
        let y_only = self.y.difference(self.x);
        if y_only.len() > 20 {
            return Err(Error::UniverseTooLarge { size: y_only.len(), max: 20 });
        }
        let mut occurrences: BTreeMap<usize, usize> = BTreeMap::new();
        for e in y_only.iter() {
            let t = self.removal_set(e);
            if t.len() > self.k {
                return Err(Error::CertificateInvalid(format!(
                    "|T_{e}| = {} exceeds k = {}",
                    t.len(),
                    self.k
                )));
            }
            for x_el in t.iter() {
                *occurrences.entry(x_el).or_insert(0) += 1;
            }
        }
        for (x_el, count) in occurrences {
            if count > self.k {
                return Err(Error::CertificateInvalid(format!(
                    "element {x_el} appears {count} times, k = {}",
                    self.k
                )));
            }
        }
        for s in subsets_of(y_only) {
            let swapped = self.x.union(s).difference(self.removal_union(s));
            if !d.is_feasible(swapped) {
                return Err(Error::CertificateInvalid(format!(
                    "swap of {s} leaves infeasible {swapped}"
                )));
            }
        }
        Ok(())
    }
}

/// Build the canonical k-exchange certificate for matchings (k = 2,
/// removal sets by shared endpoints) or set packings (k = max set size,
/// removal sets by item intersection).
pub fn k_exchange_certificate(d: &Domain, x: Subset, y: Subset) -> Result<KExchangeCertificate> {
    if !d.is_feasible(x) || !d.is_feasible(y) {
        return Err(Error::InvalidParameter("X and Y must both be feasible".into()));
    }
    let x_only = x.difference(y);
    let y_only = y.difference(x);
    let mut removal = BTreeMap::new();
    let k = match d {
        Domain::Matching { edges, .. } => {
            for ye in y_only.iter() {
                let (a, b) = edges[ye];
                let mut t = Subset::empty(d.universe_len());
                for xe in x_only.iter() {
                    let (u, v) = edges[xe];
                    if u == a || u == b || v == a || v == b {
                        t.insert(xe);
                    }
                }
                removal.insert(ye, t);
            }
            2
        }
        Domain::SetPacking { sets, k, .. } => {
            for ye in y_only.iter() {
                let mut t = Subset::empty(d.universe_len());
                for xe in x_only.iter() {
                    if sets[xe] & sets[ye] != 0 {
                        t.insert(xe);
                    }
                }
                removal.insert(ye, t);
            }
            *k
        }
        other => {
            return Err(Error::UnsupportedDomain(format!(
                "k-exchange certificates are defined for matching and set packing, not {}",
                other.kind_name()
            )))
        }
    };
    KExchangeCertificate::new(x, y, k, removal)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::RandomSource;
    use proptest::prelude::*;

    fn triangle() -> Domain {
        Domain::matching(3, vec![(0, 1), (1, 2), (0, 2)]).unwrap()
    }

    #[test]
    fn matching_feasibility() {
        let d = triangle();
        assert!(d.is_feasible(Subset::singleton(3, 0)));
        // Two edges of a triangle always share a vertex.
        assert!(!d.is_feasible(Subset::from_ids(3, &[0, 1]).unwrap()));
    }

    #[test]
    fn knapsack_feasibility() {
        let d = Domain::knapsack(vec![0.5, 0.5, 0.5]).unwrap();
        assert!(d.is_feasible(Subset::from_ids(3, &[0, 1]).unwrap()));
        assert!(!d.is_feasible(Subset::full(3)));
    }

    #[test]
    fn partition_matroid_feasibility() {
        let m = MatroidOracle::partition(vec![0, 0, 1], vec![1, 1]).unwrap();
        let d = Domain::MatroidIndependent(m);
        assert!(d.is_feasible(Subset::from_ids(3, &[0, 2]).unwrap()));
        assert!(!d.is_feasible(Subset::from_ids(3, &[0, 1]).unwrap()));
    }

    #[test]
    fn enumerate_cardinality() {
        let d = Domain::cardinality(2, 1).unwrap();
        let sets = enumerate_feasible(&d, Subset::full(2)).unwrap();
        assert_eq!(sets.len(), 3); // {}, {0}, {1}
    }

    #[test]
    fn enumerate_path_matching() {
        // Path a-b-c: edges (a,b) and (b,c) conflict.
        let d = Domain::matching(3, vec![(0, 1), (1, 2)]).unwrap();
        let sets = enumerate_feasible(&d, Subset::full(2)).unwrap();
        assert_eq!(sets.len(), 3);
    }

    #[test]
    fn enumerate_uniform_matroid_bases() {
        let d = Domain::MatroidBase(MatroidOracle::uniform(3, 2).unwrap());
        let bases = enumerate_feasible(&d, Subset::full(3)).unwrap();
        assert_eq!(bases.len(), 3);
        assert!(bases.iter().all(|b| b.len() == 2));
    }

    #[test]
    fn enumeration_agrees_with_oracle() {
        let mut rng = RandomSource::new(5);
        let sizes: Vec<f64> = (0..8).map(|_| rng.range_f64(0.1, 0.7)).collect();
        let d = Domain::knapsack(sizes).unwrap();
        let listed = enumerate_feasible(&d, Subset::full(8)).unwrap();
        let mut count = 0;
        for s in subsets_of(Subset::full(8)) {
            if d.is_feasible(s) {
                count += 1;
                assert!(listed.binary_search_by_key(&s.mask(), |t| t.mask()).is_ok());
            }
        }
        assert_eq!(count, listed.len());
    }

    #[test]
    fn matching_certificate_by_adjacency() {
        // X = {ab}, Y = {bc}: the only removal set is {ab}.
        let d = Domain::matching(3, vec![(0, 1), (1, 2)]).unwrap();
        let x = Subset::singleton(2, 0);
        let y = Subset::singleton(2, 1);
        let cert = k_exchange_certificate(&d, x, y).unwrap();
        assert_eq!(cert.k(), 2);
        assert_eq!(cert.removal_set(1), Subset::singleton(2, 0));
        cert.verify(&d).unwrap();
    }

    #[test]
    fn identical_sets_give_empty_certificate() {
        let d = triangle();
        let x = Subset::singleton(3, 0);
        let cert = k_exchange_certificate(&d, x, x).unwrap();
        assert!(cert.removal.is_empty());
        cert.verify(&d).unwrap();
    }

    #[test]
    fn set_packing_certificate() {
        // X = {A, B} with A = {1,2,3}, B = {4,5,7}; Y = {C} with C = {2,4,6}.
        // C intersects both A and B, so T_C = {A, B}.
        let d = Domain::set_packing(
            8,
            &[vec![1, 2, 3], vec![4, 5, 7], vec![2, 4, 6]],
        )
        .unwrap();
        let x = Subset::from_ids(3, &[0, 1]).unwrap();
        let y = Subset::singleton(3, 2);
        let cert = k_exchange_certificate(&d, x, y).unwrap();
        assert_eq!(cert.k(), 3);
        assert_eq!(cert.removal_set(2), Subset::from_ids(3, &[0, 1]).unwrap());
        cert.verify(&d).unwrap();
    }

    #[test]
    fn matroid_axioms_verified() {
        assert!(verify_matroid_axioms(&MatroidOracle::uniform(6, 3).unwrap()).unwrap());
        assert!(verify_matroid_axioms(
            &MatroidOracle::partition(vec![0, 0, 1, 1, 2], vec![1, 2, 1]).unwrap()
        )
        .unwrap());
        // Graphic matroid of a triangle.
        let g = MatroidOracle::graphic(3, vec![(0, 1), (1, 2), (0, 2)]).unwrap();
        assert!(verify_matroid_axioms(&g).unwrap());

        // {∅, {0,1}} is not downward closed.
        let bad = MatroidOracle::explicit(
            2,
            &[Subset::empty(2), Subset::full(2)],
        )
        .unwrap();
        assert!(!verify_matroid_axioms(&bad).unwrap());
    }

    #[test]
    fn graphic_matroid_cycles_are_dependent() {
        let g = MatroidOracle::graphic(3, vec![(0, 1), (1, 2), (0, 2)]).unwrap();
        assert!(g.is_independent(Subset::from_ids(3, &[0, 1]).unwrap()));
        assert!(!g.is_independent(Subset::full(3)));
        assert_eq!(g.rank_of(Subset::full(3)), 2);
    }

    fn random_matching_instance(rng: &mut RandomSource, vertices: usize) -> Domain {
        let mut edges = Vec::new();
        for u in 0..vertices {
            for v in (u + 1)..vertices {
                if rng.bernoulli(0.6) {
                    edges.push((u, v));
                }
            }
        }
        if edges.is_empty() {
            edges.push((0, 1));
        }
        edges.truncate(ENUMERATION_CAP);
        Domain::matching(vertices, edges).unwrap()
    }

    #[test]
    fn certificates_pass_exhaustive_verification() {
        let root = RandomSource::new(77);
        for i in 0..40 {
            let mut rng = root.child_indexed("cert", i);
            let d = random_matching_instance(&mut rng, 6);
            let feasible = enumerate_feasible(&d, Subset::full(d.universe_len())).unwrap();
            let x = feasible[rng.range_usize(feasible.len())];
            let y = feasible[rng.range_usize(feasible.len())];
            let cert = k_exchange_certificate(&d, x, y).unwrap();
            cert.verify(&d).unwrap();
            // 2-exchange: removal sets of size <= 2, occurrences <= 2.
            for e in y.difference(x).iter() {
                assert!(cert.removal_set(e).len() <= 2);
            }
        }
    }

    proptest! {
        /// Downward closure for every downward-closed kind.
        #[test]
        fn downward_closure(seed in 0u64..300, sub_mask in 0u64..4096) {
            let mut rng = RandomSource::new(seed);
            let n = 6;
            let kinds: Vec<Domain> = vec![
                random_matching_instance(&mut rng, 5),
                Domain::knapsack((0..n).map(|_| rng.range_f64(0.1, 0.9)).collect()).unwrap(),
                Domain::cardinality(n, rng.range_usize(n)).unwrap(),
                Domain::MatroidIndependent(MatroidOracle::uniform(n, 3).unwrap()),
                Domain::Intersection(vec![
                    MatroidOracle::uniform(n, 3).unwrap(),
                    MatroidOracle::partition(vec![0, 0, 1, 1, 2, 2], vec![1, 1, 1]).unwrap(),
                ]),
            ];
            for d in kinds {
                let un = d.universe_len();
                let x = Subset::from_mask(un, sub_mask & (Subset::full(un).mask()));
                if d.is_feasible(x) {
                    for e in x.iter() {
                        prop_assert!(d.is_feasible(x.without(e)));
                    }
                }
            }
        }
    }
}
