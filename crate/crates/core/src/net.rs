use std::collections::{BTreeMap, BTreeSet, VecDeque};
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::alphabet::{Alphabet, LetterKind};
use crate::canon;
use crate::error::{Error, Result};

/// Node identifier, unique within a net. Ids never affect equality.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct NodeId(pub String);

impl NodeId {
    pub fn new(s: &str) -> Self {
        NodeId(s.to_string())
    }
    pub fn as_str(&self) -> &str {
        &self.0
    }
}

impl fmt::Display for NodeId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Direction {
    In,
    Out,
}

impl Direction {
    pub fn flip(self) -> Direction {
        match self {
            Direction::In => Direction::Out,
            Direction::Out => Direction::In,
        }
    }
    pub fn word(self) -> &'static str {
        match self {
            Direction::In => "in",
            Direction::Out => "out",
        }
    }
}

/// A port handle: (node, direction, index). Ports stand in for the paper's
/// arity letters; tags give stable names to unoccupied ones.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Port {
    pub node: NodeId,
    pub dir: Direction,
    pub index: usize,
}

impl Port {
    pub fn new(node: &NodeId, dir: Direction, index: usize) -> Self {
        Port {
            node: node.clone(),
            dir,
            index,
        }
    }
}

impl fmt::Display for Port {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}:{}", self.node, self.dir.word(), self.index)
    }
}

/// A directed tie occupying one out-port and one in-port.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Edge {
    pub src: NodeId,
    pub out_port: usize,
    pub dst: NodeId,
    pub in_port: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct NodeInfo {
    pub letter: String,
    pub in_rank: usize,
    pub out_rank: usize,
    pub kind: LetterKind,
}

/// A position inside a net: either a node occurrence or a single port.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub enum PositionRef {
    Node(NodeId),
    Port(Port),
}

/// Raw, not-yet-validated description of a net.
#[derive(Debug, Clone, Default)]
pub struct RawNet {
    pub nodes: Vec<(String, String, usize, usize, LetterKind)>,
    pub edges: Vec<(String, usize, String, usize)>,
    pub tags: Vec<(String, String, Direction, usize)>,
}

impl RawNet {
    pub fn node(mut self, id: &str, letter: &str, in_rank: usize, out_rank: usize) -> Self {
        self.nodes.push((
            id.to_string(),
            letter.to_string(),
            in_rank,
            out_rank,
            LetterKind::Ranked,
        ));
        self
    }

    pub fn var(mut self, id: &str, name: &str) -> Self {
        self.nodes
            .push((id.to_string(), name.to_string(), 1, 1, LetterKind::Frontier));
        self
    }

    pub fn edge(mut self, src: &str, out_port: usize, dst: &str, in_port: usize) -> Self {
        self.edges
            .push((src.to_string(), out_port, dst.to_string(), in_port));
        self
    }

    pub fn tag(mut self, name: &str, node: &str, dir: Direction, index: usize) -> Self {
        self.tags
            .push((name.to_string(), node.to_string(), dir, index));
        self
    }
}

/// A validated, immutable net.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Net {
    nodes: BTreeMap<NodeId, NodeInfo>,
    edges: BTreeSet<Edge>,
    tags: BTreeMap<String, Port>,
}

impl Net {
    /// Validates a raw description. All invariants are checked: letters agree
    /// with the alphabet when one is supplied, port indices are within rank,
    /// every port carries at most one edge, tags are unique and name only
    /// unoccupied ports, and the net is unbroken and non-empty.
    pub fn validate(raw: &RawNet, alphabet: Option<&Alphabet>) -> Result<Net> {
        let mut nodes: BTreeMap<NodeId, NodeInfo> = BTreeMap::new();
        let mut letter_ranks: BTreeMap<String, (usize, usize, LetterKind)> = BTreeMap::new();
        for (id, letter, in_rank, out_rank, kind) in &raw.nodes {
            let nid = NodeId::new(id);
            if nodes.contains_key(&nid) {
                return Err(Error::DuplicateNode(id.clone()));
            }
            let (in_rank, out_rank, kind) = match alphabet {
                Some(a) => {
                    let (ai, ao, ak) = a
                        .ranks(letter)
                        .ok_or_else(|| Error::UnknownLetter(letter.clone()))?;
                    if (*kind == LetterKind::Frontier) != (ak == LetterKind::Frontier) {
                        return Err(Error::UnknownLetter(letter.clone()));
                    }
                    (ai, ao, ak)
                }
                None => (*in_rank, *out_rank, *kind),
            };
            if kind == LetterKind::Frontier && (in_rank, out_rank) != (1, 1) {
                return Err(Error::RankMismatch {
                    letter: letter.clone(),
                    in_rank,
                    out_rank,
                    decl_in: 1,
                    decl_out: 1,
                });
            }
            match letter_ranks.get(letter) {
                Some(&(i, o, k)) => {
                    if (i, o, k) != (in_rank, out_rank, kind) {
                        return Err(Error::RankMismatch {
                            letter: letter.clone(),
                            in_rank,
                            out_rank,
                            decl_in: i,
                            decl_out: o,
                        });
                    }
                }
                None => {
                    letter_ranks.insert(letter.clone(), (in_rank, out_rank, kind));
                }
            }
            nodes.insert(
                nid,
                NodeInfo {
                    letter: letter.clone(),
                    in_rank,
                    out_rank,
                    kind,
                },
            );
        }
        if nodes.is_empty() {
            return Err(Error::EmptyNet);
        }

        let mut edges = BTreeSet::new();
        let mut occupied: BTreeSet<Port> = BTreeSet::new();
        for (src, out_port, dst, in_port) in &raw.edges {
            let src_id = NodeId::new(src);
            let dst_id = NodeId::new(dst);
            let s = nodes
                .get(&src_id)
                .ok_or_else(|| Error::UnknownNode(src.clone()))?;
            let d = nodes
                .get(&dst_id)
                .ok_or_else(|| Error::UnknownNode(dst.clone()))?;
            if *out_port >= s.out_rank {
                return Err(Error::PortIndexOutOfRange {
                    node: src.clone(),
                    dir: "out",
                    index: *out_port,
                    rank: s.out_rank,
                });
            }
            if *in_port >= d.in_rank {
                return Err(Error::PortIndexOutOfRange {
                    node: dst.clone(),
                    dir: "in",
                    index: *in_port,
                    rank: d.in_rank,
                });
            }
            let sp = Port::new(&src_id, Direction::Out, *out_port);
            let dp = Port::new(&dst_id, Direction::In, *in_port);
            if !occupied.insert(sp.clone()) {
                return Err(Error::PortDoubleOccupied(sp.to_string()));
            }
            if !occupied.insert(dp.clone()) {
                return Err(Error::PortDoubleOccupied(dp.to_string()));
            }
            edges.insert(Edge {
                src: src_id,
                out_port: *out_port,
                dst: dst_id,
                in_port: *in_port,
            });
        }

        let mut tags: BTreeMap<String, Port> = BTreeMap::new();
        for (name, node, dir, index) in &raw.tags {
            let nid = NodeId::new(node);
            let info = nodes
                .get(&nid)
                .ok_or_else(|| Error::UnknownNode(node.clone()))?;
            let rank = match dir {
                Direction::In => info.in_rank,
                Direction::Out => info.out_rank,
            };
            if *index >= rank {
                return Err(Error::PortIndexOutOfRange {
                    node: node.clone(),
                    dir: dir.word(),
                    index: *index,
                    rank,
                });
            }
            let port = Port::new(&nid, *dir, *index);
            if occupied.contains(&port) {
                return Err(Error::TagOnOccupiedPort(name.clone()));
            }
            if tags.insert(name.clone(), port).is_some() {
                return Err(Error::DuplicateTag(name.clone()));
            }
        }

        let net = Net { nodes, edges, tags };
        let comps = net.component_count();
        if comps != 1 {
            return Err(Error::BrokenNet(comps));
        }
        Ok(net)
    }

    /// Builds a net from already-validated parts. Used internally by net
    /// surgery; callers must uphold the invariants themselves.
    pub(crate) fn from_parts(
        nodes: BTreeMap<NodeId, NodeInfo>,
        edges: BTreeSet<Edge>,
        tags: BTreeMap<String, Port>,
    ) -> Net {
        Net { nodes, edges, tags }
    }

    pub fn node_count(&self) -> usize {
        self.nodes.len()
    }

    pub fn nodes(&self) -> impl Iterator<Item = (&NodeId, &NodeInfo)> {
        self.nodes.iter()
    }

    pub fn node_ids(&self) -> impl Iterator<Item = &NodeId> {
        self.nodes.keys()
    }

    pub fn info(&self, id: &NodeId) -> Option<&NodeInfo> {
        self.nodes.get(id)
    }

    pub fn edges(&self) -> impl Iterator<Item = &Edge> {
        self.edges.iter()
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn tags(&self) -> impl Iterator<Item = (&String, &Port)> {
        self.tags.iter()
    }

    pub fn tag_port(&self, name: &str) -> Option<&Port> {
        self.tags.get(name)
    }

    pub fn tag_of_port(&self, port: &Port) -> Option<&str> {
        self.tags
            .iter()
            .find(|(_, p)| *p == port)
            .map(|(n, _)| n.as_str())
    }

    /// The edge occupying a port, if any.
    pub fn edge_at(&self, port: &Port) -> Option<&Edge> {
        self.edges.iter().find(|e| match port.dir {
            Direction::Out => e.src == port.node && e.out_port == port.index,
            Direction::In => e.dst == port.node && e.in_port == port.index,
        })
    }

    pub fn is_occupied(&self, port: &Port) -> bool {
        self.edge_at(port).is_some()
    }

    /// All unoccupied ports, in sorted order.
    pub fn unoccupied_ports(&self) -> Vec<Port> {
        let mut occupied: BTreeSet<Port> = BTreeSet::new();
        for e in &self.edges {
            occupied.insert(Port::new(&e.src, Direction::Out, e.out_port));
            occupied.insert(Port::new(&e.dst, Direction::In, e.in_port));
        }
        let mut out = Vec::new();
        for (id, info) in &self.nodes {
            for i in 0..info.in_rank {
                let p = Port::new(id, Direction::In, i);
                if !occupied.contains(&p) {
                    out.push(p);
                }
            }
            for i in 0..info.out_rank {
                let p = Port::new(id, Direction::Out, i);
                if !occupied.contains(&p) {
                    out.push(p);
                }
            }
        }
        out.sort();
        out
    }

    /// (total, in, out) unoccupied-port counts.
    pub fn delta(&self) -> (usize, usize, usize) {
        let ports = self.unoccupied_ports();
        let ins = ports.iter().filter(|p| p.dir == Direction::In).count();
        let outs = ports.len() - ins;
        (ports.len(), ins, outs)
    }

    /// Ranked and frontier letters occurring in the net.
    pub fn letters(&self) -> BTreeSet<String> {
        self.nodes.values().map(|n| n.letter.clone()).collect()
    }

    pub fn ranked_letters(&self) -> BTreeSet<String> {
        self.nodes
            .values()
            .filter(|n| n.kind == LetterKind::Ranked)
            .map(|n| n.letter.clone())
            .collect()
    }

    /// Names of frontier letters (variables) occurring in the net.
    pub fn variable_names(&self) -> BTreeSet<String> {
        self.nodes
            .values()
            .filter(|n| n.kind == LetterKind::Frontier)
            .map(|n| n.letter.clone())
            .collect()
    }

    pub fn variable_occurrences(&self, name: &str) -> Vec<NodeId> {
        self.nodes
            .iter()
            .filter(|(_, n)| n.kind == LetterKind::Frontier && n.letter == name)
            .map(|(id, _)| id.clone())
            .collect()
    }

    /// Undirected neighbors of a node.
    pub fn neighbors(&self, id: &NodeId) -> BTreeSet<NodeId> {
        let mut out = BTreeSet::new();
        for e in &self.edges {
            if &e.src == id {
                out.insert(e.dst.clone());
            }
            if &e.dst == id {
                out.insert(e.src.clone());
            }
        }
        out
    }

    pub fn component_count(&self) -> usize {
        components_of(self.nodes.keys().cloned().collect(), &self.edges).len()
    }

    /// Whether the node subset induces a connected subnet.
    pub fn is_connected_subset(&self, subset: &BTreeSet<NodeId>) -> bool {
        if subset.is_empty() {
            return false;
        }
        let edges: BTreeSet<Edge> = self
            .edges
            .iter()
            .filter(|e| subset.contains(&e.src) && subset.contains(&e.dst))
            .cloned()
            .collect();
        components_of(subset.clone(), &edges).len() == 1
    }

    /// Splits the node set into connected components.
    pub fn components(&self) -> Vec<BTreeSet<NodeId>> {
        components_of(self.nodes.keys().cloned().collect(), &self.edges)
    }

    /// Whether a directed loop (one-way route from a node to itself) exists.
    pub fn has_directed_loop(&self) -> bool {
        // Kahn peeling: a directed cycle survives repeated removal of
        // in-degree-0 nodes.
        let mut indeg: BTreeMap<&NodeId, usize> = self.nodes.keys().map(|k| (k, 0)).collect();
        for e in &self.edges {
            *indeg.get_mut(&e.dst).unwrap() += 1;
        }
        let mut queue: VecDeque<&NodeId> = indeg
            .iter()
            .filter(|(_, &d)| d == 0)
            .map(|(&k, _)| k)
            .collect();
        let mut seen = 0usize;
        while let Some(n) = queue.pop_front() {
            seen += 1;
            for e in self.edges.iter().filter(|e| &e.src == n) {
                let d = indeg.get_mut(&e.dst).unwrap();
                *d -= 1;
                if *d == 0 {
                    queue.push_back(&e.dst);
                }
            }
        }
        seen != self.nodes.len()
    }

    /// Height per the inductive definition: frontier nodes weigh 0, ranked
    /// nodes weigh 1, and the height is the heaviest simple undirected route.
    /// Undefined (None) as soon as the net has a directed loop.
    pub fn height(&self) -> Option<usize> {
        if self.has_directed_loop() {
            return None;
        }
        let ids: Vec<&NodeId> = self.nodes.keys().collect();
        let weight = |id: &NodeId| -> usize {
            match self.nodes[id].kind {
                LetterKind::Ranked => 1,
                LetterKind::Frontier => 0,
            }
        };
        let mut best = 0usize;
        // Exhaustive simple-path search; nets are desk scale.
        fn dfs(
            net: &Net,
            at: &NodeId,
            visited: &mut BTreeSet<NodeId>,
            acc: usize,
            weight: &dyn Fn(&NodeId) -> usize,
            best: &mut usize,
        ) {
            *best = (*best).max(acc);
            for n in net.neighbors(at) {
                if !visited.contains(&n) {
                    visited.insert(n.clone());
                    dfs(net, &n, visited, acc + weight(&n), weight, best);
                    visited.remove(&n);
                }
            }
        }
        for start in ids {
            let mut visited = BTreeSet::new();
            visited.insert(start.clone());
            dfs(self, start, &mut visited, weight(start), &weight, &mut best);
        }
        Some(best)
    }

    /// Drops tags whose port no longer exists or is occupied.
    pub(crate) fn prune_tags(&mut self) {
        let stale: Vec<String> = self
            .tags
            .iter()
            .filter(|(_, p)| {
                !self
                    .nodes
                    .get(&p.node)
                    .map(|info| match p.dir {
                        Direction::In => p.index < info.in_rank,
                        Direction::Out => p.index < info.out_rank,
                    })
                    .unwrap_or(false)
                    || self.edges.iter().any(|e| match p.dir {
                        Direction::Out => e.src == p.node && e.out_port == p.index,
                        Direction::In => e.dst == p.node && e.in_port == p.index,
                    })
            })
            .map(|(n, _)| n.clone())
            .collect();
        for t in stale {
            self.tags.remove(&t);
        }
    }

    /// A copy with all tags removed.
    pub fn untagged(&self) -> Net {
        Net {
            nodes: self.nodes.clone(),
            edges: self.edges.clone(),
            tags: BTreeMap::new(),
        }
    }

    /// A copy with node ids prefixed; used when splicing nets together.
    pub fn with_id_prefix(&self, prefix: &str) -> Net {
        let rename = |id: &NodeId| NodeId(format!("{prefix}{id}"));
        Net {
            nodes: self
                .nodes
                .iter()
                .map(|(k, v)| (rename(k), v.clone()))
                .collect(),
            edges: self
                .edges
                .iter()
                .map(|e| Edge {
                    src: rename(&e.src),
                    out_port: e.out_port,
                    dst: rename(&e.dst),
                    in_port: e.in_port,
                })
                .collect(),
            tags: self
                .tags
                .iter()
                .map(|(k, p)| {
                    (
                        k.clone(),
                        Port {
                            node: rename(&p.node),
                            dir: p.dir,
                            index: p.index,
                        },
                    )
                })
                .collect(),
        }
    }
}

fn components_of(nodes: BTreeSet<NodeId>, edges: &BTreeSet<Edge>) -> Vec<BTreeSet<NodeId>> {
    let mut remaining = nodes;
    let mut out = Vec::new();
    while let Some(seed) = remaining.iter().next().cloned() {
        let mut comp = BTreeSet::new();
        let mut stack = vec![seed];
        while let Some(n) = stack.pop() {
            if !remaining.remove(&n) {
                continue;
            }
            comp.insert(n.clone());
            for e in edges {
                if e.src == n && remaining.contains(&e.dst) {
                    stack.push(e.dst.clone());
                }
                if e.dst == n && remaining.contains(&e.src) {
                    stack.push(e.src.clone());
                }
            }
        }
        out.push(comp);
    }
    out
}

/// A set of nets. Deduplicated by strict equality and kept in canonical-key
/// order, so jungles compare and iterate deterministically. Keys are cached
/// alongside the nets.
#[derive(Debug, Clone, Default, Serialize, Deserialize)]
pub struct Jungle {
    entries: Vec<(String, Net)>,
}

impl PartialEq for Jungle {
    fn eq(&self, other: &Self) -> bool {
        self.entries.len() == other.entries.len()
            && self
                .entries
                .iter()
                .zip(other.entries.iter())
                .all(|(a, b)| a.0 == b.0)
    }
}
impl Eq for Jungle {}

impl Jungle {
    pub fn new() -> Self {
        Jungle::default()
    }

    pub fn singleton(net: Net) -> Self {
        let mut j = Jungle::new();
        j.insert(net);
        j
    }

    pub fn from_nets<I: IntoIterator<Item = Net>>(nets: I) -> Self {
        let mut j = Jungle::new();
        for n in nets {
            j.insert(n);
        }
        j
    }

    /// Inserts a net unless a strictly-equal one is present. Returns whether
    /// the net was new.
    pub fn insert(&mut self, net: Net) -> bool {
        let key = canon::canonical_key(&net, canon::EqMode::Strict);
        match self.entries.binary_search_by(|(k, _)| k.cmp(&key)) {
            Ok(_) => false,
            Err(i) => {
                self.entries.insert(i, (key, net));
                true
            }
        }
    }

    pub fn contains(&self, net: &Net) -> bool {
        let key = canon::canonical_key(net, canon::EqMode::Strict);
        self.entries.binary_search_by(|(k, _)| k.cmp(&key)).is_ok()
    }

    pub fn iter(&self) -> impl Iterator<Item = &Net> {
        self.entries.iter().map(|(_, n)| n)
    }

    pub fn keys(&self) -> impl Iterator<Item = &str> {
        self.entries.iter().map(|(k, _)| k.as_str())
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn union(mut self, other: Jungle) -> Jungle {
        for (_, n) in other.entries {
            self.insert(n);
        }
        self
    }

    /// Set equality under strict net equality.
    pub fn set_eq(&self, other: &Jungle) -> bool {
        self == other
    }

    /// Whether every net of `self` is (strictly equal to) a net of `other`.
    pub fn subset_of(&self, other: &Jungle) -> bool {
        self.entries
            .iter()
            .all(|(k, _)| other.entries.binary_search_by(|(ok, _)| ok.cmp(k)).is_ok())
    }
}

impl IntoIterator for Jungle {
    type Item = Net;
    type IntoIter = std::iter::Map<std::vec::IntoIter<(String, Net)>, fn((String, Net)) -> Net>;
    fn into_iter(self) -> Self::IntoIter {
        self.entries.into_iter().map(|(_, n)| n)
    }
}

/// Unoccupied-port counts of a jungle: (total, in, out).
pub fn delta_d(j: &Jungle) -> (usize, usize, usize) {
    let mut t = (0, 0, 0);
    for n in j.iter() {
        let (a, b, c) = n.delta();
        t.0 += a;
        t.1 += b;
        t.2 += c;
    }
    t
}

/// Structural report: component count, directed-loop flag, height.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct StructureReport {
    pub components: usize,
    pub has_directed_loop: bool,
    /// None when a directed loop makes the inductive height diverge.
    pub height: Option<usize>,
}

pub fn structure(net: &Net) -> StructureReport {
    StructureReport {
        components: net.component_count(),
        has_directed_loop: net.has_directed_loop(),
        height: net.height(),
    }
}

#[cfg(test)]
pub mod fixtures {
    use super::*;

    /// D1: f(2,1) fed by ground a at in:0; n1:in:1 and n1:out:0 unoccupied.
    pub fn d1() -> Net {
        Net::validate(
            &RawNet::default()
                .node("n1", "f", 2, 1)
                .node("n2", "a", 0, 1)
                .edge("n2", 0, "n1", 0),
            None,
        )
        .unwrap()
    }

    /// D2: closed two-node directed loop of p and q, both (1,1).
    pub fn d2() -> Net {
        Net::validate(
            &RawNet::default()
                .node("n1", "p", 1, 1)
                .node("n2", "q", 1, 1)
                .edge("n1", 0, "n2", 0)
                .edge("n2", 0, "n1", 0),
            None,
        )
        .unwrap()
    }

    /// C1: a single (1,1) node labeled w0, both ports unoccupied.
    pub fn c1() -> Net {
        Net::validate(&RawNet::default().node("w0", "w0", 1, 1), None).unwrap()
    }
}

#[cfg(test)]
mod tests {
    use super::fixtures::*;
    use super::*;

    #[test]
    fn d1_validates_with_expected_counts() {
        let d1 = d1();
        assert_eq!(d1.node_count(), 2);
        assert_eq!(d1.edge_count(), 1);
        assert_eq!(d1.delta(), (2, 1, 1));
    }

    #[test]
    fn double_occupancy_rejected() {
        let raw = RawNet::default()
            .node("n1", "f", 2, 1)
            .node("n2", "a", 0, 1)
            .node("n3", "a2", 0, 1)
            .edge("n2", 0, "n1", 0)
            .edge("n3", 0, "n1", 0);
        assert!(matches!(
            Net::validate(&raw, None),
            Err(Error::PortDoubleOccupied(_))
        ));
    }

    #[test]
    fn d2_is_closed() {
        let d2 = d2();
        assert_eq!(d2.delta(), (0, 0, 0));
        assert!(d2.has_directed_loop());
        assert_eq!(d2.height(), None);
    }

    #[test]
    fn tag_errors() {
        let raw = RawNet::default()
            .node("n1", "f", 2, 1)
            .node("n2", "a", 0, 1)
            .edge("n2", 0, "n1", 0)
            .tag("t", "n1", Direction::In, 0);
        assert!(matches!(
            Net::validate(&raw, None),
            Err(Error::TagOnOccupiedPort(_))
        ));
        let raw = RawNet::default()
            .node("n1", "f", 2, 1)
            .tag("t", "n1", Direction::In, 0)
            .tag("t", "n1", Direction::In, 1);
        assert!(matches!(
            Net::validate(&raw, None),
            Err(Error::DuplicateTag(_))
        ));
    }

    #[test]
    fn broken_net_rejected() {
        let raw = RawNet::default().node("n1", "a", 0, 1).node("n2", "a", 0, 1);
        assert!(matches!(Net::validate(&raw, None), Err(Error::BrokenNet(2))));
    }

    #[test]
    fn delta_d_sums_over_jungle() {
        let j = Jungle::from_nets([d1(), c1()]);
        assert_eq!(delta_d(&j), (4, 2, 2));
    }

    #[test]
    fn heights() {
        // Single frontier-letter node has height 0.
        let x = Net::validate(&RawNet::default().var("v", "x"), None).unwrap();
        assert_eq!(x.height(), Some(0));
        // D1: ground below f, two ranked nodes on the longest route.
        assert_eq!(d1().height(), Some(2));
        // Single ranked node.
        let f = Net::validate(&RawNet::default().node("n", "f", 2, 1), None).unwrap();
        assert_eq!(f.height(), Some(1));
        // Variable below f contributes no weight.
        let fx = Net::validate(
            &RawNet::default()
                .node("n", "f", 2, 1)
                .var("v", "x")
                .edge("v", 0, "n", 0),
            None,
        )
        .unwrap();
        assert_eq!(fx.height(), Some(1));
    }

    #[test]
    fn structure_of_fixtures() {
        let s = structure(&d1());
        assert_eq!(s.components, 1);
        assert!(!s.has_directed_loop);
        assert_eq!(s.height, Some(2));
        let s = structure(&d2());
        assert!(s.has_directed_loop);
        assert_eq!(s.height, None);
    }
}
