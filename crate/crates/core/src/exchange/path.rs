//! Labeled path multisets over exchange graphs, and the randomized
//! exchange maps they induce.
//!
//! For a certificate between X and Y, the exchange graph is bipartite on
//! `(X \ Y) ∪ (Y \ X)` with an edge `(x, y)` whenever `x ∈ T_y`. The map
//! construction needs a multiset of labeled simple paths in which every
//! `(vertex, label)` pair is hit exactly `n(k, 2h) = k(k-1)^{2h-2}` times,
//! endpoints carry boundary labels unless the vertex is degree-deficient,
//! and the induced insertion sets admit a proper coloring into
//! `2h² n(k, 2h)` classes.
//!
//! Construction: complete the graph to degree `k` by hanging an infinite
//! `(k-1)`-ary tree off each missing port, and take all non-backtracking
//! walks of exactly `2h` labeled positions in the completed graph. Their
//! real segments are the paths; a segment born at position `b > 1` or
//! dying at `d < 2h` absorbs its tree-walk continuations as an integer
//! multiplicity `(k - deg) · (k-1)^(steps-1)` per truncated side. Walks in
//! trees never revisit the real graph, so the per-(vertex, label) counts
//! of the k-regular case carry over exactly — provided every
//! non-backtracking walk of at most `2h` real vertices is simple, which
//! holds for all bipartite graphs when `h <= 2` and for forests at any
//! `h`. The final verification catches the remaining cases and fails the
//! construction instead of degrading.

use std::collections::BTreeMap;

use crate::domain::KExchangeCertificate;
use crate::error::{Error, Result};
use crate::exchange::{ExchangeMap, Mechanism, PathSet};
use crate::set::Subset;

/// A simple path with consecutive labels starting at `start_label`.
#[derive(Clone, Debug)]
pub struct LabeledPath {
    pub vertices: Vec<usize>,
    pub start_label: usize,
    pub multiplicity: u64,
}

impl LabeledPath {
    /// Label of `v` in this path, or 0 if absent.
    pub fn label_of(&self, v: usize) -> usize {
        self.vertices
            .iter()
            .position(|&u| u == v)
            .map_or(0, |i| self.start_label + i)
    }
}

/// A verified path multiset together with the expanded, colored
/// insertion sets it induces.
#[derive(Clone, Debug)]
pub struct PathMultiset {
    x: Subset,
    y: Subset,
    k: usize,
    h: usize,
    n_count: u64,
    adjacency: BTreeMap<usize, Vec<usize>>,
    paths: Vec<LabeledPath>,
    /// Expanded copies: insertion set, removal union, color class.
    sets: Vec<(Subset, Subset, usize)>,
    classes: usize,
}

impl PathMultiset {
    pub fn x(&self) -> Subset {
        self.x
    }

    pub fn y(&self) -> Subset {
        self.y
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn h(&self) -> usize {
        self.h
    }

    /// Required count `n(k, 2h) = k (k-1)^(2h-2)` per (vertex, label).
    pub fn n_count(&self) -> u64 {
        self.n_count
    }

    pub fn paths(&self) -> &[LabeledPath] {
        &self.paths
    }

    /// Number of color classes the induced map draws from: `2h² n(k, 2h)`.
    pub fn classes(&self) -> usize {
        self.classes
    }

    /// Expanded insertion sets with their removal unions and classes.
    pub fn sets(&self) -> &[(Subset, Subset, usize)] {
        &self.sets
    }

    fn degree(&self, v: usize) -> usize {
        self.adjacency.get(&v).map_or(0, |a| a.len())
    }

    /// Exhaustively re-verify the multiset: simplicity and adjacency of
    /// every path, consecutive labels inside `[1, 2h]`, boundary labels on
    /// full-degree endpoints, exact per-(vertex, label) counts, the
    /// `|S_i| <= h` cap, and properness of the coloring within the class
    /// budget.
    pub fn verify(&self) -> Result<()> {
        let span = 2 * self.h;
        let y_side = self.y.difference(self.x);
        for path in &self.paths {
            if path.vertices.is_empty() || path.multiplicity == 0 {
                return Err(Error::CertificateInvalid("empty or zero-multiplicity path".into()));
            }
            let start = path.start_label;
            let end = start + path.vertices.len() - 1;
            if start < 1 || end > span {
                return Err(Error::CertificateInvalid(format!(
                    "labels {start}..{end} outside [1, {span}]"
                )));
            }
            let mut seen = Subset::empty(self.x.universe_len());
            for window in path.vertices.windows(2) {
                if !self.adjacency.get(&window[0]).is_some_and(|a| a.contains(&window[1])) {
                    return Err(Error::CertificateInvalid(format!(
                        "vertices {} and {} not adjacent",
                        window[0], window[1]
                    )));
                }
            }
            for &v in &path.vertices {
                if seen.contains(v) {
                    return Err(Error::CertificateInvalid(format!("vertex {v} repeats")));
                }
                seen.insert(v);
            }
            // Endpoints with interior labels need a missing port.
            let first = path.vertices[0];
            let last = *path.vertices.last().unwrap();
            if start != 1 && self.degree(first) >= self.k {
                return Err(Error::CertificateInvalid(format!(
                    "full-degree vertex {first} starts at interior label {start}"
                )));
            }
            if end != span && self.degree(last) >= self.k {
                return Err(Error::CertificateInvalid(format!(
                    "full-degree vertex {last} ends at interior label {end}"
                )));
            }
        }
        // Exact counts per (vertex, label).
        for (&v, _) in &self.adjacency {
            for label in 1..=span {
                let count: u64 = self
                    .paths
                    .iter()
                    .filter(|p| p.label_of(v) == label)
                    .map(|p| p.multiplicity)
                    .sum();
                if count != self.n_count {
                    return Err(Error::ConstructionFailed(format!(
                        "vertex {v} carries label {label} {count} times, expected {}",
                        self.n_count
                    )));
                }
            }
        }
        // Insertion-set cap and proper coloring.
        for (s, _, class) in &self.sets {
            if s.len() > self.h {
                return Err(Error::CertificateInvalid(format!(
                    "insertion set {s} larger than h = {}",
                    self.h
                )));
            }
            if !s.is_subset_of(y_side) {
                return Err(Error::CertificateInvalid("insertion set leaves Y \\ X".into()));
            }
            if *class >= self.classes {
                return Err(Error::ConstructionFailed("color class out of range".into()));
            }
        }
        for i in 0..self.sets.len() {
            for j in (i + 1)..self.sets.len() {
                if self.sets[i].2 == self.sets[j].2
                    && !self.sets[i].0.is_disjoint(self.sets[j].0)
                {
                    return Err(Error::ConstructionFailed(
                        "intersecting insertion sets share a color class".into(),
                    ));
                }
            }
        }
        Ok(())
    }
}

fn exchange_graph(cert: &KExchangeCertificate) -> BTreeMap<usize, Vec<usize>> {
    let x_side = cert.x().difference(cert.y());
    let y_side = cert.y().difference(cert.x());
    let mut adjacency: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
    for v in x_side.iter().chain(y_side.iter()) {
        adjacency.insert(v, Vec::new());
    }
    for y_el in y_side.iter() {
        for x_el in cert.removal_set(y_el).iter() {
            adjacency.get_mut(&x_el).unwrap().push(y_el);
            adjacency.get_mut(&y_el).unwrap().push(x_el);
        }
    }
    adjacency
}

/// Build and verify the labeled path multiset for an exchange graph with
/// max degree at most `k`, spanning labels `[1, 2h]`.
///
/// Errors if the verified counting property cannot be met — an infeasible
/// `(k, h)` combination for this degree pattern (cyclic exchange graphs
/// at `h >= 3`) — rather than returning a degraded multiset.
pub fn build_path_multiset(cert: &KExchangeCertificate, h: usize) -> Result<PathMultiset> {
    if h == 0 {
        return Err(Error::InvalidParameter("h must be at least 1".into()));
    }
    let adjacency = exchange_graph(cert);
    if adjacency.len() > 12 {
        return Err(Error::UniverseTooLarge { size: adjacency.len(), max: 12 });
    }
    if h > 3 {
        return Err(Error::InvalidParameter("h is capped at 3 at desk scale".into()));
    }
    // Walk counting needs branching factor at least 2; a 1-exchange
    // certificate is also a valid 2-exchange certificate.
    let k = cert.k().max(2);
    let max_deg = adjacency.values().map(|a| a.len()).max().unwrap_or(0);
    if max_deg > k {
        return Err(Error::CertificateInvalid(format!(
            "exchange graph degree {max_deg} exceeds k = {k}"
        )));
    }
    let span = 2 * h;
    let n_count = (k as u64) * ((k - 1) as u64).pow(span as u32 - 2);
    let deg = |v: usize| adjacency[&v].len() as u64;
    let km1 = (k - 1) as u64;
    let missing = |v: usize| (k as u64).saturating_sub(deg(v));

    // Enumerate simple path segments and place them at every start label.
    let mut paths: Vec<LabeledPath> = Vec::new();
    let mut place = |vertices: &[usize]| {
        let len = vertices.len();
        for b in 1..=(span - len + 1) {
            let d = b + len - 1;
            let mult = if len == 1 {
                let v = vertices[0];
                match (b == 1, d == span) {
                    (true, false) => missing(v) * km1.pow(span as u32 - 2),
                    (false, true) => missing(v) * km1.pow(span as u32 - 2),
                    (false, false) => {
                        missing(v)
                            * km1.pow(b as u32 - 2)
                            * missing(v).saturating_sub(1)
                            * km1.pow((span - d) as u32 - 1)
                    }
                    (true, true) => unreachable!("span >= 2"),
                }
            } else {
                let birth = if b == 1 {
                    1
                } else {
                    missing(vertices[0]) * km1.pow(b as u32 - 2)
                };
                let death = if d == span {
                    1
                } else {
                    missing(*vertices.last().unwrap()) * km1.pow((span - d) as u32 - 1)
                };
                birth * death
            };
            if mult > 0 {
                paths.push(LabeledPath {
                    vertices: vertices.to_vec(),
                    start_label: b,
                    multiplicity: mult,
                });
            }
        }
    };

    let universe = cert.x().universe_len();
    for (&start, _) in &adjacency {
        let mut stack = vec![start];
        let mut visited = Subset::empty(universe).with(start);
        dfs_paths(&adjacency, span, &mut stack, &mut visited, &mut place);
    }

    // Expand multiplicities into individual insertion sets and color them
    // greedily; sets sharing a y pairwise intersect, so all land in
    // distinct classes and the budget 2h²·n(k,2h) always suffices.
    let y_side = cert.y().difference(cert.x());
    let classes = 2 * h * h * n_count as usize;
    let mut sets: Vec<(Subset, Subset, usize)> = Vec::new();
    for path in &paths {
        let mut s = Subset::empty(universe);
        for &v in &path.vertices {
            if y_side.contains(v) {
                s.insert(v);
            }
        }
        let t = cert.removal_union(s);
        for _ in 0..path.multiplicity {
            let class = if s.is_empty() {
                0
            } else {
                let mut used = vec![false; classes];
                for (other, _, c) in &sets {
                    if !other.is_disjoint(s) {
                        used[*c] = true;
                    }
                }
                match used.iter().position(|&u| !u) {
                    Some(c) => c,
                    None => {
                        return Err(Error::ConstructionFailed(
                            "ran out of color classes".into(),
                        ))
                    }
                }
            };
            sets.push((s, t, class));
        }
    }

    let pm = PathMultiset {
        x: cert.x(),
        y: cert.y(),
        k,
        h,
        n_count,
        adjacency,
        paths,
        sets,
        classes,
    };
    pm.verify()?;
    Ok(pm)
}

fn dfs_paths(
    adjacency: &BTreeMap<usize, Vec<usize>>,
    max_len: usize,
    stack: &mut Vec<usize>,
    visited: &mut Subset,
    place: &mut impl FnMut(&[usize]),
) {
    place(stack);
    if stack.len() == max_len {
        return;
    }
    let last = *stack.last().unwrap();
    // Sorted neighbor order keeps enumeration deterministic.
    let mut neighbors = adjacency[&last].clone();
    neighbors.sort_unstable();
    for next in neighbors {
        if !visited.contains(next) {
            stack.push(next);
            visited.insert(next);
            dfs_paths(adjacency, max_len, stack, visited, place);
            stack.pop();
            visited.remove(next);
        }
    }
}

/// The randomized map induced by a path multiset: draw one of the
/// `2h² n(k,2h)` color classes uniformly, then select each set `S_i` of
/// the class whose members all activated, thinned by an independent coin
/// of probability `p^(h - |S_i|)` so that every set is selected with
/// probability exactly `p^h`.
///
/// Target uniformity: `alpha = p^h / h` exactly, and
/// `beta <= (p^h / h)(k - 1 + 1/h)`.
pub fn build_path_exchange_map(pm: &PathMultiset, p: f64) -> Result<ExchangeMap> {
    if !(p > 0.0 && p <= 1.0) {
        return Err(Error::InvalidProbability(p));
    }
    let sets = pm
        .sets
        .iter()
        .filter(|(s, _, _)| !s.is_empty())
        .map(|&(s, t, class)| PathSet {
            s,
            t,
            coin: p.powi((pm.h - s.len()) as i32),
            class,
        })
        .collect();
    Ok(ExchangeMap::from_parts(
        pm.x,
        pm.y,
        1,
        Mechanism::Path { sets, classes: pm.classes },
    ))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exchange::{certify_uniformity, CertMethod};
    use crate::objective::VALUE_TOL;
    use std::collections::BTreeMap as Map;

    fn certificate(
        n: usize,
        x: &[usize],
        y: &[usize],
        k: usize,
        removal: &[(usize, &[usize])],
    ) -> KExchangeCertificate {
        let x = Subset::from_ids(n, x).unwrap();
        let y = Subset::from_ids(n, y).unwrap();
        let mut map = Map::new();
        for &(y_el, t) in removal {
            map.insert(y_el, Subset::from_ids(n, t).unwrap());
        }
        KExchangeCertificate::new(x, y, k, map).unwrap()
    }

    #[test]
    fn single_edge_counts() {
        // One x, one y, k = 2, h = 1: every (vertex, label) pair must be
        // covered exactly n(2, 2) = 2 times.
        let cert = certificate(2, &[0], &[1], 2, &[(1, &[0])]);
        let pm = build_path_multiset(&cert, 1).unwrap();
        assert_eq!(pm.n_count(), 2);
        pm.verify().unwrap();
    }

    #[test]
    fn empty_graph_is_vacuous() {
        let cert = certificate(2, &[0, 1], &[0, 1], 2, &[]);
        let pm = build_path_multiset(&cert, 1).unwrap();
        assert!(pm.paths().is_empty());
        pm.verify().unwrap();
    }

    #[test]
    fn path_graph_counts() {
        // x - y - x' with k = 2, h = 1: every pair covered exactly twice.
        let cert = certificate(3, &[0, 2], &[1], 2, &[(1, &[0, 2])]);
        let pm = build_path_multiset(&cert, 1).unwrap();
        assert_eq!(pm.n_count(), 2);
        pm.verify().unwrap();
    }

    #[test]
    fn alpha_is_exactly_p_to_h_over_h() {
        let cert = certificate(3, &[0, 2], &[1], 2, &[(1, &[0, 2])]);
        for h in [1usize, 2] {
            let pm = build_path_multiset(&cert, h).unwrap();
            for p in [0.3, 0.5, 1.0] {
                let map = build_path_exchange_map(&pm, p).unwrap();
                let report =
                    certify_uniformity(&map, &vec![p; 3], CertMethod::Exact, 0, None).unwrap();
                let alpha_target = p.powi(h as i32) / h as f64;
                let beta_target = alpha_target * (2.0 - 1.0 + 1.0 / h as f64);
                assert!(
                    (report.alpha_hat - alpha_target).abs() < VALUE_TOL,
                    "h={h} p={p}: alpha {} vs {}",
                    report.alpha_hat,
                    alpha_target
                );
                assert!(
                    report.beta_hat <= beta_target + VALUE_TOL,
                    "h={h} p={p}: beta {} vs {}",
                    report.beta_hat,
                    beta_target
                );
            }
        }
    }

    #[test]
    fn matching_swap_h2_targets() {
        // 4-cycle exchange graph (two X edges, two Y edges), k = 2, h = 2,
        // p = 0.5: alpha = p^2/2 = 0.125, beta <= (p^2/2)(1 + 1/2) = 0.1875.
        let cert = certificate(
            4,
            &[0, 1],
            &[2, 3],
            2,
            &[(2, &[0, 1]), (3, &[0, 1])],
        );
        let pm = build_path_multiset(&cert, 2).unwrap();
        pm.verify().unwrap();
        let map = build_path_exchange_map(&pm, 0.5).unwrap();
        let report = certify_uniformity(&map, &[0.5; 4], CertMethod::Exact, 0, None).unwrap();
        assert!((report.alpha_hat - 0.125).abs() < VALUE_TOL, "alpha {}", report.alpha_hat);
        assert!(report.beta_hat <= 0.1875 + VALUE_TOL, "beta {}", report.beta_hat);
    }

    #[test]
    fn cycle_at_h3_fails_honestly() {
        // A 4-cycle has non-backtracking walks of 6 vertices that revisit,
        // so the counting property cannot be met with simple paths.
        let cert = certificate(
            4,
            &[0, 1],
            &[2, 3],
            2,
            &[(2, &[0, 1]), (3, &[0, 1])],
        );
        assert!(build_path_multiset(&cert, 3).is_err());
    }

    #[test]
    fn forest_at_h3_succeeds() {
        // Star: y adjacent to x0, x1 (degree 2 = k), leaves deficient.
        let cert = certificate(3, &[0, 2], &[1], 2, &[(1, &[0, 2])]);
        let pm = build_path_multiset(&cert, 3).unwrap();
        pm.verify().unwrap();
        assert_eq!(pm.n_count(), 2);
    }

    #[test]
    fn degree_three_graph_with_k3() {
        // Set-packing-like exchange graph: y0 adjacent to x0,x1,x2; y1 to x0.
        let cert = certificate(
            5,
            &[0, 1, 2],
            &[3, 4],
            3,
            &[(3, &[0, 1, 2]), (4, &[0])],
        );
        let pm = build_path_multiset(&cert, 1).unwrap();
        pm.verify().unwrap();
        assert_eq!(pm.n_count(), 3 * 2u64.pow(0)); // k (k-1)^(2h-2) = 3
        let map = build_path_exchange_map(&pm, 0.5).unwrap();
        let report = certify_uniformity(&map, &[0.5; 5], CertMethod::Exact, 0, None).unwrap();
        let alpha_target = 0.5;
        let beta_target = 0.5 * (3.0 - 1.0 + 1.0);
        assert!((report.alpha_hat - alpha_target).abs() < VALUE_TOL);
        assert!(report.beta_hat <= beta_target + VALUE_TOL);
    }
}
