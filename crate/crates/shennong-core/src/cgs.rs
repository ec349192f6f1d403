//! Coreference primary term graph construction and resolution.
//!
//! Terms form a directed acyclic graph whose designated primary terms have no
//! outgoing edges. Resolution walks downstream from any node, at each step
//! following the out-edge of maximum weight (ties broken by the
//! lexicographically smallest target), until a primary term is reached. The
//! foundational mode additionally forbids branching nodes; the weighted mode
//! allows them.

use std::cmp::Ordering;
use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum CgsMode {
    Foundational,
    Weighted,
}

impl std::str::FromStr for CgsMode {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "foundational" => Ok(CgsMode::Foundational),
            "weighted" => Ok(CgsMode::Weighted),
            other => Err(format!("unknown graph mode {other:?}")),
        }
    }
}

/// An input coreference edge. Weights default to 1 and are ignored in
/// foundational mode.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EdgeSpec {
    pub from: String,
    pub to: String,
    pub weight: f64,
}

impl EdgeSpec {
    pub fn new(from: impl Into<String>, to: impl Into<String>) -> Self {
        EdgeSpec {
            from: from.into(),
            to: to.into(),
            weight: 1.0,
        }
    }

    pub fn weighted(from: impl Into<String>, to: impl Into<String>, weight: f64) -> Self {
        EdgeSpec {
            from: from.into(),
            to: to.into(),
            weight,
        }
    }
}

#[derive(Debug, Error, PartialEq)]
pub enum CgsError {
    #[error("graph contains a cycle: {}", .0.join(" -> "))]
    Cycle(Vec<String>),
    #[error("primary term {0:?} has an outgoing edge")]
    PrimaryHasOutEdge(String),
    #[error("node {0:?} branches, which foundational mode forbids")]
    Branching(String),
    #[error("edge {from:?} -> {to:?} has non-positive weight {weight}")]
    NonPositiveWeight { from: String, to: String, weight: f64 },
}

#[derive(Debug, Clone, PartialEq)]
struct Edge {
    to: String,
    weight: f64,
}

/// A validated coreference primary term graph.
#[derive(Debug, Clone)]
pub struct Cptg {
    adjacency: BTreeMap<String, Vec<Edge>>,
    nodes: BTreeSet<String>,
    primaries: BTreeSet<String>,
    mode: CgsMode,
}

/// Term to ultimate primary term mapping; primaries map to themselves and
/// terms whose walk dead-ends at a non-primary sink are absent.
pub type ResolutionDict = BTreeMap<String, String>;

/// Validates the graph conditions and builds a graph. Duplicate edges keep
/// the maximum weight and are reported in the returned warnings.
pub fn build_graph<I>(
    edges: I,
    primaries: impl IntoIterator<Item = String>,
    mode: CgsMode,
) -> Result<(Cptg, Vec<String>), CgsError>
where
    I: IntoIterator<Item = EdgeSpec>,
{
    let primaries: BTreeSet<String> = primaries.into_iter().collect();
    let mut nodes: BTreeSet<String> = primaries.iter().cloned().collect();
    let mut warnings = Vec::new();

    let mut merged: BTreeMap<(String, String), f64> = BTreeMap::new();
    for edge in edges {
        if !(edge.weight > 0.0) {
            return Err(CgsError::NonPositiveWeight {
                from: edge.from,
                to: edge.to,
                weight: edge.weight,
            });
        }
        nodes.insert(edge.from.clone());
        nodes.insert(edge.to.clone());
        let key = (edge.from, edge.to);
        if let Some(existing) = merged.get_mut(&key) {
            let kept = existing.max(edge.weight);
            warnings.push(format!(
                "duplicate edge {:?} -> {:?}: keeping weight {}",
                key.0, key.1, kept
            ));
            *existing = kept;
        } else {
            merged.insert(key, edge.weight);
        }
    }

    let mut adjacency: BTreeMap<String, Vec<Edge>> = BTreeMap::new();
    for ((from, to), weight) in merged {
        adjacency.entry(from).or_default().push(Edge { to, weight });
    }

    for (from, out) in &adjacency {
        if primaries.contains(from) {
            return Err(CgsError::PrimaryHasOutEdge(from.clone()));
        }
        if mode == CgsMode::Foundational && out.len() > 1 {
            return Err(CgsError::Branching(from.clone()));
        }
    }

    let graph = Cptg {
        adjacency,
        nodes,
        primaries,
        mode,
    };
    graph.check_acyclic()?;
    Ok((graph, warnings))
}

impl Cptg {
    pub fn mode(&self) -> CgsMode {
        self.mode
    }

    pub fn nodes(&self) -> impl Iterator<Item = &str> {
        self.nodes.iter().map(String::as_str)
    }

    pub fn primaries(&self) -> impl Iterator<Item = &str> {
        self.primaries.iter().map(String::as_str)
    }

    pub fn is_primary(&self, term: &str) -> bool {
        self.primaries.contains(term)
    }

    pub fn contains(&self, term: &str) -> bool {
        self.nodes.contains(term)
    }

    fn out_edges(&self, term: &str) -> &[Edge] {
        self.adjacency.get(term).map_or(&[], Vec::as_slice)
    }

    /// The next hop from `term`: the out-edge of maximum weight, ties broken
    /// by lexicographically smallest target.
    fn next_hop(&self, term: &str) -> Option<&str> {
        self.out_edges(term)
            .iter()
            .reduce(|best, e| match e.weight.partial_cmp(&best.weight) {
                Some(Ordering::Greater) => e,
                Some(Ordering::Equal) if e.to < best.to => e,
                _ => best,
            })
            .map(|e| e.to.as_str())
    }

    fn check_acyclic(&self) -> Result<(), CgsError> {
        #[derive(Clone, Copy, PartialEq)]
        enum Color {
            White,
            Gray,
            Black,
        }
        let mut color: BTreeMap<&str, Color> =
            self.nodes.iter().map(|n| (n.as_str(), Color::White)).collect();

        fn visit<'a>(
            graph: &'a Cptg,
            node: &'a str,
            color: &mut BTreeMap<&'a str, Color>,
            stack: &mut Vec<&'a str>,
        ) -> Result<(), CgsError> {
            color.insert(node, Color::Gray);
            stack.push(node);
            for edge in graph.out_edges(node) {
                match color.get(edge.to.as_str()) {
                    Some(Color::Gray) => {
                        let from = stack
                            .iter()
                            .position(|&n| n == edge.to)
                            .expect("gray node is on the stack");
                        let mut cycle: Vec<String> =
                            stack[from..].iter().map(|s| s.to_string()).collect();
                        cycle.push(edge.to.clone());
                        return Err(CgsError::Cycle(cycle));
                    }
                    Some(Color::White) => visit(graph, &edge.to, color, stack)?,
                    _ => {}
                }
            }
            stack.pop();
            color.insert(node, Color::Black);
            Ok(())
        }

        let nodes: Vec<&str> = self.nodes.iter().map(String::as_str).collect();
        let mut stack = Vec::new();
        for node in nodes {
            if color[node] == Color::White {
                visit(self, node, &mut color, &mut stack)?;
            }
        }
        Ok(())
    }
}

/// Computes the ultimate primary term for every node with a memoized walk;
/// each node is resolved once and downstream results are reused.
pub fn resolve_all(graph: &Cptg) -> ResolutionDict {
    fn walk<'a>(
        graph: &'a Cptg,
        node: &'a str,
        memo: &mut BTreeMap<&'a str, Option<&'a str>>,
    ) -> Option<&'a str> {
        if let Some(cached) = memo.get(node) {
            return *cached;
        }
        let result = if graph.is_primary(node) {
            Some(node)
        } else {
            match graph.next_hop(node) {
                Some(next) => walk(graph, next, memo),
                None => None,
            }
        };
        memo.insert(node, result);
        result
    }

    let mut memo: BTreeMap<&str, Option<&str>> = BTreeMap::new();
    let mut dict = ResolutionDict::new();
    for node in &graph.nodes {
        if let Some(primary) = walk(graph, node, &mut memo) {
            dict.insert(node.clone(), primary.to_string());
        }
    }
    dict
}

/// Dictionary lookup of a term's primary.
pub fn resolve<'a>(dict: &'a ResolutionDict, term: &str) -> Option<&'a str> {
    dict.get(term).map(String::as_str)
}

/// The full greedy walk from `term` to its primary, inclusive of both ends.
/// Returns `None` when the walk dead-ends at a non-primary sink or the term
/// is unknown.
pub fn resolve_path(graph: &Cptg, term: &str) -> Option<Vec<String>> {
    if !graph.contains(term) {
        return None;
    }
    let mut path = vec![term.to_string()];
    let mut current = term;
    loop {
        if graph.is_primary(current) {
            return Some(path);
        }
        match graph.next_hop(current) {
            Some(next) => {
                path.push(next.to_string());
                current = next;
            }
            None => return None,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn foundational_example() -> Cptg {
        let edges = vec![
            EdgeSpec::new("A", "B"),
            EdgeSpec::new("B", "C"),
            EdgeSpec::new("D", "B"),
            EdgeSpec::new("E", "F"),
        ];
        let (graph, warnings) = build_graph(
            edges,
            ["C".to_string(), "F".to_string()],
            CgsMode::Foundational,
        )
        .unwrap();
        assert!(warnings.is_empty());
        graph
    }

    fn weighted_example() -> Cptg {
        let edges = vec![
            EdgeSpec::weighted("A", "B", 1.0),
            EdgeSpec::weighted("B", "C", 2.0),
            EdgeSpec::weighted("D", "B", 1.0),
            EdgeSpec::weighted("B", "E", 1.0),
        ];
        build_graph(edges, ["C".to_string(), "E".to_string()], CgsMode::Weighted)
            .unwrap()
            .0
    }

    fn dict_of(pairs: &[(&str, &str)]) -> ResolutionDict {
        pairs
            .iter()
            .map(|(k, v)| (k.to_string(), v.to_string()))
            .collect()
    }

    #[test]
    fn foundational_graph_has_six_nodes() {
        let graph = foundational_example();
        assert_eq!(graph.nodes().count(), 6);
    }

    #[test]
    fn foundational_resolution_dictionary() {
        let dict = resolve_all(&foundational_example());
        assert_eq!(
            dict,
            dict_of(&[("A", "C"), ("B", "C"), ("C", "C"), ("D", "C"), ("E", "F"), ("F", "F")])
        );
    }

    #[test]
    fn weighted_resolution_follows_heavier_edge() {
        let graph = weighted_example();
        let dict = resolve_all(&graph);
        assert_eq!(
            dict,
            dict_of(&[("A", "C"), ("B", "C"), ("C", "C"), ("D", "C"), ("E", "E")])
        );
        assert_eq!(
            resolve_path(&graph, "A").unwrap(),
            vec!["A".to_string(), "B".to_string(), "C".to_string()]
        );
    }

    #[test]
    fn equal_weights_break_ties_lexicographically() {
        let edges = vec![
            EdgeSpec::weighted("B", "E", 1.0),
            EdgeSpec::weighted("B", "C", 1.0),
        ];
        let (graph, _) =
            build_graph(edges, ["C".to_string(), "E".to_string()], CgsMode::Weighted).unwrap();
        assert_eq!(resolve(&resolve_all(&graph), "B"), Some("C"));
    }

    #[test]
    fn two_cycle_is_rejected() {
        let err = build_graph(
            vec![EdgeSpec::new("A", "B"), EdgeSpec::new("B", "A")],
            [],
            CgsMode::Weighted,
        )
        .unwrap_err();
        match err {
            CgsError::Cycle(cycle) => {
                assert_eq!(cycle.first(), cycle.last());
                assert!(cycle.len() >= 3);
            }
            other => panic!("expected cycle error, got {other:?}"),
        }
    }

    #[test]
    fn primary_with_out_edge_is_rejected() {
        let err = build_graph(
            vec![EdgeSpec::new("C", "A")],
            ["C".to_string()],
            CgsMode::Foundational,
        )
        .unwrap_err();
        assert_eq!(err, CgsError::PrimaryHasOutEdge("C".into()));
    }

    #[test]
    fn branching_is_rejected_in_foundational_mode() {
        let edges = vec![EdgeSpec::new("B", "C"), EdgeSpec::new("B", "E")];
        let err = build_graph(
            edges.clone(),
            ["C".to_string(), "E".to_string()],
            CgsMode::Foundational,
        )
        .unwrap_err();
        assert_eq!(err, CgsError::Branching("B".into()));
        assert!(build_graph(edges, ["C".to_string(), "E".to_string()], CgsMode::Weighted).is_ok());
    }

    #[test]
    fn dead_end_walks_are_omitted() {
        // X -> Y where Y is not a primary: neither resolves.
        let (graph, _) = build_graph(
            vec![EdgeSpec::new("X", "Y")],
            [],
            CgsMode::Foundational,
        )
        .unwrap();
        let dict = resolve_all(&graph);
        assert!(dict.is_empty());
        assert_eq!(resolve(&dict, "X"), None);
        assert_eq!(resolve_path(&graph, "X"), None);
    }

    #[test]
    fn unknown_term_resolves_to_none() {
        let dict = resolve_all(&foundational_example());
        assert_eq!(resolve(&dict, "unknown"), None);
    }

    #[test]
    fn duplicate_edges_keep_max_weight_with_warning() {
        let edges = vec![
            EdgeSpec::weighted("A", "B", 1.0),
            EdgeSpec::weighted("A", "B", 3.0),
            EdgeSpec::weighted("A", "C", 2.0),
        ];
        let (graph, warnings) = build_graph(
            edges,
            ["B".to_string(), "C".to_string()],
            CgsMode::Weighted,
        )
        .unwrap();
        assert_eq!(warnings.len(), 1);
        assert!(warnings[0].contains("duplicate edge"));
        assert_eq!(resolve(&resolve_all(&graph), "A"), Some("B"));
    }

    #[test]
    fn non_positive_weight_is_rejected() {
        let err = build_graph(
            vec![EdgeSpec::weighted("A", "B", 0.0)],
            ["B".to_string()],
            CgsMode::Weighted,
        )
        .unwrap_err();
        assert!(matches!(err, CgsError::NonPositiveWeight { .. }));
    }

    #[test]
    fn resolution_is_idempotent() {
        let dict = resolve_all(&weighted_example());
        for term in dict.keys() {
            let once = resolve(&dict, term).unwrap();
            assert_eq!(resolve(&dict, once), Some(once));
        }
    }

    mod properties {
        use super::*;
        use proptest::prelude::*;

        /// Independent oracle: an unmemoized recursive walk that rescans the
        /// edge list at every step and applies the max-weight /
        /// lexicographic-target rule by hand.
        fn oracle_resolve(
            edges: &[(String, String, f64)],
            primaries: &BTreeSet<String>,
            term: &str,
        ) -> Option<String> {
            if primaries.contains(term) {
                return Some(term.to_string());
            }
            let mut best: Option<(&str, f64)> = None;
            for (from, to, weight) in edges {
                if from != term {
                    continue;
                }
                best = match best {
                    None => Some((to, *weight)),
                    Some((bt, bw)) => {
                        if *weight > bw || (*weight == bw && to.as_str() < bt) {
                            Some((to, *weight))
                        } else {
                            Some((bt, bw))
                        }
                    }
                };
            }
            best.and_then(|(next, _)| oracle_resolve(edges, primaries, next))
        }

        /// Random DAGs of up to 12 nodes: edges only point from lower to
        /// higher labels; primaries are a subset of the sinks.
        fn arb_dag() -> impl Strategy<Value = (Vec<(String, String, f64)>, BTreeSet<String>)> {
            (2usize..=12)
                .prop_flat_map(|n| {
                    let pairs: Vec<(usize, usize)> = (0..n)
                        .flat_map(|i| ((i + 1)..n).map(move |j| (i, j)))
                        .collect();
                    let edge_flags = proptest::collection::vec(
                        (proptest::bool::ANY, 1u32..=5),
                        pairs.len(),
                    );
                    let primary_flags = proptest::collection::vec(proptest::bool::ANY, n);
                    (Just(n), Just(pairs), edge_flags, primary_flags)
                })
                .prop_map(|(n, pairs, edge_flags, primary_flags)| {
                    let name = |i: usize| format!("n{i:02}");
                    let mut edges = Vec::new();
                    for ((i, j), (keep, weight)) in pairs.iter().zip(edge_flags) {
                        if keep {
                            edges.push((name(*i), name(*j), weight as f64));
                        }
                    }
                    let mut has_out = BTreeSet::new();
                    for (from, _, _) in &edges {
                        has_out.insert(from.clone());
                    }
                    let primaries: BTreeSet<String> = (0..n)
                        .filter(|&i| primary_flags[i] && !has_out.contains(&name(i)))
                        .map(name)
                        .collect();
                    (edges, primaries)
                })
        }

        proptest! {
            #[test]
            fn resolve_all_matches_brute_force_oracle((edges, primaries) in arb_dag()) {
                let specs: Vec<EdgeSpec> = edges
                    .iter()
                    .map(|(f, t, w)| EdgeSpec::weighted(f.clone(), t.clone(), *w))
                    .collect();
                let (graph, _) =
                    build_graph(specs, primaries.iter().cloned(), CgsMode::Weighted).unwrap();
                let dict = resolve_all(&graph);
                for node in graph.nodes() {
                    let expected = oracle_resolve(&edges, &primaries, node);
                    prop_assert_eq!(dict.get(node).cloned(), expected, "node {}", node);
                }
            }

            #[test]
            fn weight_scaling_leaves_dictionary_unchanged(
                (edges, primaries) in arb_dag(),
                scale in 1u32..=1000,
            ) {
                let build = |factor: f64| {
                    let specs: Vec<EdgeSpec> = edges
                        .iter()
                        .map(|(f, t, w)| EdgeSpec::weighted(f.clone(), t.clone(), *w * factor))
                        .collect();
                    let (graph, _) =
                        build_graph(specs, primaries.iter().cloned(), CgsMode::Weighted).unwrap();
                    resolve_all(&graph)
                };
                prop_assert_eq!(build(1.0), build(scale as f64 / 16.0));
            }

            #[test]
            fn foundational_and_weighted_agree_without_branching(
                (edges, primaries) in arb_dag(),
            ) {
                // Keep only the first out-edge of every node.
                let mut seen = BTreeSet::new();
                let chain: Vec<(String, String, f64)> = edges
                    .into_iter()
                    .filter(|(from, _, _)| seen.insert(from.clone()))
                    .collect();
                let primaries: BTreeSet<String> = primaries
                    .into_iter()
                    .filter(|p| !seen.contains(p))
                    .collect();
                let specs: Vec<EdgeSpec> = chain
                    .iter()
                    .map(|(f, t, w)| EdgeSpec::weighted(f.clone(), t.clone(), *w))
                    .collect();
                let (foundational, _) = build_graph(
                    specs.clone(),
                    primaries.iter().cloned(),
                    CgsMode::Foundational,
                )
                .unwrap();
                let (weighted, _) =
                    build_graph(specs, primaries.iter().cloned(), CgsMode::Weighted).unwrap();
                prop_assert_eq!(resolve_all(&foundational), resolve_all(&weighted));
            }
        }
    }
}
