use std::collections::{BTreeSet, HashMap, HashSet};
use std::fmt;
use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::text::{normalize_label, split_camel_case};

/// A `(head, relation, tail)` edge. Ordering is lexicographic over the
/// three fields in that order.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Triplet {
    pub head: String,
    pub relation: String,
    pub tail: String,
}

impl Triplet {
    pub fn new(head: impl Into<String>, relation: impl Into<String>, tail: impl Into<String>) -> Self {
        Triplet {
            head: head.into(),
            relation: relation.into(),
            tail: tail.into(),
        }
    }

    /// Natural-text form `head relation tail`, with the relation split into
    /// lowercase words. This is also the triplet's embedding and confidence id.
    pub fn text(&self) -> String {
        format!("{} {} {}", self.head, split_camel_case(&self.relation), self.tail)
    }
}

impl fmt::Display for Triplet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {}, {})", self.head, self.relation, self.tail)
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct KgStats {
    pub nodes: usize,
    pub edges: usize,
    pub lines: usize,
    pub self_loops_dropped: usize,
    pub duplicates_dropped: usize,
}

#[derive(Debug, Clone, PartialEq, Eq)]
struct Edge {
    head: u32,
    relation: String,
    tail: u32,
}

#[derive(Debug, Clone)]
pub struct KnowledgeGraph {
    labels: Vec<String>,
    ids: HashMap<String, u32>,
    edges: Vec<Edge>,
    adjacency: Vec<Vec<u32>>,
    stats: KgStats,
}

impl KnowledgeGraph {
    /// Builds a graph from raw `(head, relation, tail)` rows in order. Node
    /// labels are normalized; self-loops and repeated edges are dropped and
    /// counted.
    pub fn from_rows<I, S>(rows: I) -> Self
    where
        I: IntoIterator<Item = (S, S, S)>,
        S: AsRef<str>,
    {
        let mut g = KnowledgeGraph {
            labels: Vec::new(),
            ids: HashMap::new(),
            edges: Vec::new(),
            adjacency: Vec::new(),
            stats: KgStats::default(),
        };
        let mut seen: HashSet<(u32, String, u32)> = HashSet::new();
        for (h, r, t) in rows {
            g.stats.lines += 1;
            let (h, t) = (normalize_label(h.as_ref()), normalize_label(t.as_ref()));
            let r = r.as_ref().trim().to_owned();
            if h == t {
                g.stats.self_loops_dropped += 1;
                continue;
            }
            let (hid, tid) = (g.intern(h), g.intern(t));
            if !seen.insert((hid, r.clone(), tid)) {
                g.stats.duplicates_dropped += 1;
                continue;
            }
            let eid = g.edges.len() as u32;
            g.edges.push(Edge {
                head: hid,
                relation: r,
                tail: tid,
            });
            g.adjacency[hid as usize].push(eid);
            g.adjacency[tid as usize].push(eid);
        }
        g.stats.nodes = g.labels.len();
        g.stats.edges = g.edges.len();
        g
    }

    fn intern(&mut self, label: String) -> u32 {
        if let Some(&id) = self.ids.get(&label) {
            return id;
        }
        let id = self.labels.len() as u32;
        self.ids.insert(label.clone(), id);
        self.labels.push(label);
        self.adjacency.push(Vec::new());
        id
    }

    pub fn stats(&self) -> &KgStats {
        &self.stats
    }

    pub fn node_count(&self) -> usize {
        self.labels.len()
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    /// Whether a normalized label names a node.
    pub fn has_node(&self, label: &str) -> bool {
        self.ids.contains_key(label)
    }

    pub fn labels(&self) -> impl Iterator<Item = &str> {
        self.labels.iter().map(String::as_str)
    }

    fn triplet(&self, e: &Edge) -> Triplet {
        Triplet {
            head: self.labels[e.head as usize].clone(),
            relation: e.relation.clone(),
            tail: self.labels[e.tail as usize].clone(),
        }
    }

    /// Every edge as a triplet, in load order.
    pub fn triplets(&self) -> impl Iterator<Item = Triplet> + '_ {
        self.edges.iter().map(move |e| self.triplet(e))
    }

    /// Edges whose two endpoints both carry a label in `keywords`, in either
    /// direction. Only the adjacency lists of keyword nodes are visited.
    /// The result is sorted by `(head, relation, tail)`.
    pub fn retrieve<'a, I>(&self, keywords: I) -> Vec<Triplet>
    where
        I: IntoIterator<Item = &'a str>,
    {
        let nodes: HashSet<u32> = keywords
            .into_iter()
            .filter_map(|k| self.ids.get(k).copied())
            .collect();
        let mut hit_edges = BTreeSet::new();
        for &n in &nodes {
            for &eid in &self.adjacency[n as usize] {
                let e = &self.edges[eid as usize];
                let other = if e.head == n { e.tail } else { e.head };
                if nodes.contains(&other) {
                    hit_edges.insert(eid);
                }
            }
        }
        let mut out: Vec<Triplet> = hit_edges
            .into_iter()
            .map(|eid| self.triplet(&self.edges[eid as usize]))
            .collect();
        out.sort();
        out
    }
}

/// Parses `head\trelation\ttail` rows. Columns past the third are ignored.
pub fn parse_kg_tsv(raw: &str, context: &str) -> Result<KnowledgeGraph> {
    let mut rows = Vec::new();
    for (i, line) in raw.lines().enumerate() {
        if line.trim().is_empty() {
            continue;
        }
        let mut cols = line.split('\t');
        let (h, r, t) = match (cols.next(), cols.next(), cols.next()) {
            (Some(h), Some(r), Some(t)) => (h, r, t),
            _ => {
                return Err(Error::parse(
                    context,
                    i + 1,
                    "expected 3 tab-separated columns: head, relation, tail",
                ))
            }
        };
        if [h, r, t].iter().any(|c| c.trim().is_empty()) {
            return Err(Error::parse(context, i + 1, "empty column"));
        }
        rows.push((h, r, t));
    }
    if rows.is_empty() {
        return Err(Error::EmptyGraph);
    }
    Ok(KnowledgeGraph::from_rows(rows))
}

pub fn load_kg(path: impl AsRef<Path>) -> Result<KnowledgeGraph> {
    let path = path.as_ref();
    let raw = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    parse_kg_tsv(&raw, &path.display().to_string())
}

#[cfg(test)]
mod tests {
    use super::*;

    pub(crate) const SMALL: &str = "kidney\tRelatedTo\torgan\nlung\tRelatedTo\torgan\nkidney\tPartOf\tbody\n";

    #[test]
    fn small_graph_counts() {
        let g = parse_kg_tsv(SMALL, "t").unwrap();
        assert_eq!((g.node_count(), g.edge_count()), (4, 3));
    }

    #[test]
    fn self_loop_is_dropped_and_reported() {
        let g = parse_kg_tsv("kidney\tRelatedTo\tkidney\nkidney\tRelatedTo\torgan\n", "t").unwrap();
        assert_eq!(g.edge_count(), 1);
        assert_eq!(g.stats().self_loops_dropped, 1);
        // loops are judged after normalization
        let g = parse_kg_tsv("Ice_Cream\tIsA\tice cream\na\tb\tc\n", "t").unwrap();
        assert_eq!(g.stats().self_loops_dropped, 1);
    }

    #[test]
    fn duplicates_are_dropped() {
        let g = parse_kg_tsv("a\tR\tb\nA\tR\tb\na\tS\tb\nb\tR\ta\n", "t").unwrap();
        assert_eq!(g.edge_count(), 3);
        assert_eq!(g.stats().duplicates_dropped, 1);
    }

    #[test]
    fn labels_are_normalized() {
        let g = parse_kg_tsv("Ice_Cream\tIsA\tdessert\n", "t").unwrap();
        assert!(g.has_node("ice cream"));
        assert!(!g.has_node("Ice_Cream"));
    }

    #[test]
    fn malformed_rows() {
        match parse_kg_tsv("a\tb\tc\nonly\ttwo\n", "kg.tsv") {
            Err(Error::Parse { record, .. }) => assert_eq!(record, 2),
            other => panic!("unexpected {other:?}"),
        }
        assert!(parse_kg_tsv("a\t\tc\n", "t").is_err());
        assert!(matches!(parse_kg_tsv("", "t"), Err(Error::EmptyGraph)));
        assert!(parse_kg_tsv("a\tb\tc\t1.0\n", "t").is_ok());
    }

    #[test]
    fn retrieval_examples() {
        let g = parse_kg_tsv(SMALL, "t").unwrap();
        assert_eq!(
            g.retrieve(["kidney", "organ"]),
            vec![Triplet::new("kidney", "RelatedTo", "organ")]
        );
        assert!(g.retrieve(std::iter::empty()).is_empty());
        let all: Vec<String> = g.labels().map(str::to_owned).collect();
        let mut expected: Vec<Triplet> = g.triplets().collect();
        expected.sort();
        assert_eq!(g.retrieve(all.iter().map(String::as_str)), expected);
        // direction does not matter
        assert_eq!(g.retrieve(["body", "kidney"]), vec![Triplet::new("kidney", "PartOf", "body")]);
    }

    #[test]
    fn triplet_text() {
        assert_eq!(Triplet::new("kidney", "RelatedTo", "organ").text(), "kidney related to organ");
    }
}
