//! Canonical forms for nets.
//!
//! Equality of nets is letter- and structure-preserving node bijection; node
//! ids and tags never participate. Two modes are provided: strict (port
//! indices must map identically) and port-permuting (indices may be permuted
//! per node within a direction). Both are decided by comparing canonical
//! keys computed by colour refinement followed by a pruned search for the
//! lexicographically minimal encoding.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::net::{Direction, Net, NodeId};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum EqMode {
    Strict,
    PortPermuting,
}

/// Canonical key; equal keys in a mode means equal nets in that mode.
pub fn canonical_key(net: &Net, mode: EqMode) -> String {
    let enc = canonical_encoding(net, mode, false).0;
    render(net, mode, &enc)
}

/// Strict canonical key with tags participating. Used where interface
/// placement matters (rule deduplication), not by `nets_equal`.
pub fn canonical_key_tagged(net: &Net) -> String {
    let (enc, tags) = canonical_encoding(net, EqMode::Strict, true);
    let mut s = render(net, EqMode::Strict, &enc);
    s.push('|');
    s.push_str(&tags);
    s
}

pub fn nets_equal(p: &Net, q: &Net, mode: EqMode) -> bool {
    if p.node_count() != q.node_count() || p.edge_count() != q.edge_count() {
        return false;
    }
    if letter_profile(p) != letter_profile(q) {
        return false;
    }
    if p.delta() != q.delta() {
        return false;
    }
    canonical_key(p, mode) == canonical_key(q, mode)
}

fn letter_profile(n: &Net) -> BTreeMap<(String, usize, usize), usize> {
    let mut m = BTreeMap::new();
    for (_, info) in n.nodes() {
        *m.entry((info.letter.clone(), info.in_rank, info.out_rank))
            .or_insert(0) += 1;
    }
    m
}

/// Header part of the key: the sorted multiset of node colours plus the
/// minimal edge encoding. The header is ordering-independent because the
/// search only admits colour-monotone orderings.
fn render(net: &Net, mode: EqMode, enc: &[u32]) -> String {
    let mut head: Vec<String> = net
        .nodes()
        .map(|(_, i)| format!("{}/{}/{}/{:?}", i.letter, i.in_rank, i.out_rank, i.kind))
        .collect();
    head.sort();
    let mode_ch = match mode {
        EqMode::Strict => 's',
        EqMode::PortPermuting => 'p',
    };
    let body: Vec<String> = enc.iter().map(|t| t.to_string()).collect();
    format!("{mode_ch};{};{}", head.join(","), body.join("."))
}

/// Iterated colour refinement. Colour integers are assigned in sorted
/// signature order each round, so they agree across isomorphic nets.
fn refine(net: &Net, mode: EqMode) -> BTreeMap<NodeId, u32> {
    let ids: Vec<NodeId> = net.node_ids().cloned().collect();
    let mut colors: BTreeMap<NodeId, u32> = BTreeMap::new();
    {
        let mut initial: Vec<(String, NodeId)> = ids
            .iter()
            .map(|id| {
                let i = net.info(id).unwrap();
                (
                    format!("{}/{}/{}/{:?}", i.letter, i.in_rank, i.out_rank, i.kind),
                    id.clone(),
                )
            })
            .collect();
        initial.sort();
        let mut next = 0u32;
        let mut last: Option<String> = None;
        for (key, id) in initial {
            if last.as_ref() != Some(&key) {
                if last.is_some() {
                    next += 1;
                }
                last = Some(key);
            }
            colors.insert(id, next);
        }
    }
    loop {
        let mut sigs: Vec<(Vec<u32>, NodeId)> = Vec::with_capacity(ids.len());
        for id in &ids {
            let mut sig = vec![colors[id]];
            let mut records: Vec<Vec<u32>> = Vec::new();
            for e in net.edges() {
                if &e.src == id {
                    let rec = match mode {
                        EqMode::Strict => vec![
                            0,
                            colors[&e.dst],
                            e.out_port as u32,
                            e.in_port as u32,
                        ],
                        EqMode::PortPermuting => vec![0, colors[&e.dst]],
                    };
                    records.push(rec);
                }
                if &e.dst == id {
                    let rec = match mode {
                        EqMode::Strict => vec![
                            1,
                            colors[&e.src],
                            e.in_port as u32,
                            e.out_port as u32,
                        ],
                        EqMode::PortPermuting => vec![1, colors[&e.src]],
                    };
                    records.push(rec);
                }
            }
            records.sort();
            for r in records {
                sig.extend(r);
            }
            sigs.push((sig, id.clone()));
        }
        sigs.sort();
        let mut new_colors: BTreeMap<NodeId, u32> = BTreeMap::new();
        let mut next = 0u32;
        let mut last: Option<&Vec<u32>> = None;
        for (sig, id) in &sigs {
            if let Some(l) = last {
                if l != sig {
                    next += 1;
                }
            }
            last = Some(sig);
            new_colors.insert(id.clone(), next);
        }
        let old_classes = colors.values().collect::<std::collections::BTreeSet<_>>().len();
        let new_classes = new_colors
            .values()
            .collect::<std::collections::BTreeSet<_>>()
            .len();
        let stable = new_classes == old_classes;
        colors = new_colors;
        if stable {
            return colors;
        }
    }
}

struct Searcher<'a> {
    net: &'a Net,
    mode: EqMode,
    colors: BTreeMap<NodeId, u32>,
    with_tags: bool,
    best: Option<(Vec<u32>, String)>,
}

impl<'a> Searcher<'a> {
    /// Edge records between the node being placed (position `pos`) and
    /// already-placed nodes.
    fn segment(&self, placed: &[NodeId], v: &NodeId, pos: u32) -> Vec<u32> {
        let at = |id: &NodeId| -> Option<u32> {
            placed.iter().position(|p| p == id).map(|i| i as u32)
        };
        let mut records: Vec<Vec<u32>> = Vec::new();
        for e in self.net.edges() {
            if &e.src == v && &e.dst == v {
                let rec = match self.mode {
                    EqMode::Strict => vec![2, pos, e.out_port as u32, e.in_port as u32],
                    EqMode::PortPermuting => vec![2, pos],
                };
                records.push(rec);
            } else if &e.src == v {
                if let Some(p) = at(&e.dst) {
                    let rec = match self.mode {
                        EqMode::Strict => vec![0, p, e.out_port as u32, e.in_port as u32],
                        EqMode::PortPermuting => vec![0, p],
                    };
                    records.push(rec);
                }
            } else if &e.dst == v {
                if let Some(p) = at(&e.src) {
                    let rec = match self.mode {
                        EqMode::Strict => vec![1, p, e.in_port as u32, e.out_port as u32],
                        EqMode::PortPermuting => vec![1, p],
                    };
                    records.push(rec);
                }
            }
        }
        records.sort();
        let mut seg = vec![self.colors[v], records.len() as u32];
        for r in records {
            seg.extend(r);
        }
        seg
    }

    fn tag_key(&self, placed: &[NodeId]) -> String {
        let mut entries: Vec<String> = self
            .net
            .tags()
            .map(|(name, port)| {
                let pos = placed.iter().position(|p| p == &port.node).unwrap();
                format!("{name}@{pos}:{}:{}", port.dir.word(), port.index)
            })
            .collect();
        entries.sort();
        entries.join(",")
    }

    fn dfs(&mut self, placed: &mut Vec<NodeId>, enc: &mut Vec<u32>, tight: bool) {
        let n = self.net.node_count();
        if placed.len() == n {
            let tags = if self.with_tags {
                self.tag_key(placed)
            } else {
                String::new()
            };
            let cand = (enc.clone(), tags);
            if self.best.as_ref().map_or(true, |b| cand < *b) {
                self.best = Some(cand);
            }
            return;
        }
        // Colour-monotone: only nodes carrying the minimal colour among the
        // unplaced ones may come next.
        let min_color = self
            .net
            .node_ids()
            .filter(|id| !placed.contains(id))
            .map(|id| self.colors[id])
            .min()
            .unwrap();
        let candidates: Vec<NodeId> = self
            .net
            .node_ids()
            .filter(|id| !placed.contains(id) && self.colors[*id] == min_color)
            .cloned()
            .collect();
        for v in candidates {
            let seg = self.segment(placed, &v, placed.len() as u32);
            let (prune, next_tight) = if tight {
                (false, true)
            } else if let Some((best_enc, _)) = &self.best {
                let lo = enc.len();
                let hi = (lo + seg.len()).min(best_enc.len());
                let best_slice = &best_enc[lo..hi];
                let seg_slice = &seg[..(hi - lo)];
                match seg_slice.cmp(best_slice) {
                    std::cmp::Ordering::Greater => (true, false),
                    std::cmp::Ordering::Less => (false, true),
                    std::cmp::Ordering::Equal => (false, false),
                }
            } else {
                (false, true)
            };
            if prune {
                continue;
            }
            let mark = enc.len();
            enc.extend(&seg);
            placed.push(v);
            self.dfs(placed, enc, next_tight);
            placed.pop();
            enc.truncate(mark);
        }
    }
}

fn canonical_encoding(net: &Net, mode: EqMode, with_tags: bool) -> (Vec<u32>, String) {
    let colors = refine(net, mode);
    let mut s = Searcher {
        net,
        mode,
        colors,
        with_tags,
        best: None,
    };
    let mut placed = Vec::new();
    let mut enc = Vec::new();
    s.dfs(&mut placed, &mut enc, false);
    s.best.unwrap_or_default()
}

/// Picks a canonical ordering of a jungle by strict key; handy whenever a
/// deterministic representative is needed.
pub fn sort_by_key(nets: &mut Vec<Net>) {
    nets.sort_by_key(|n| canonical_key(n, EqMode::Strict));
}

#[allow(unused)]
fn direction_token(d: Direction) -> u32 {
    match d {
        Direction::In => 0,
        Direction::Out => 1,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::net::fixtures::{d1, d2};
    use crate::net::RawNet;

    fn renamed_d1() -> Net {
        Net::validate(
            &RawNet::default()
                .node("zz", "f", 2, 1)
                .node("aa", "a", 0, 1)
                .edge("aa", 0, "zz", 0),
            None,
        )
        .unwrap()
    }

    #[test]
    fn rename_invariant() {
        assert!(nets_equal(&d1(), &renamed_d1(), EqMode::Strict));
        assert!(nets_equal(&d1(), &renamed_d1(), EqMode::PortPermuting));
    }

    #[test]
    fn different_nets_differ() {
        assert!(!nets_equal(&d1(), &d2(), EqMode::Strict));
        assert!(!nets_equal(&d1(), &d2(), EqMode::PortPermuting));
    }

    #[test]
    fn port_permutation_only_equal_in_permuting_mode() {
        let p = Net::validate(
            &RawNet::default()
                .node("n1", "f", 2, 1)
                .node("n2", "a", 0, 1)
                .edge("n2", 0, "n1", 0),
            None,
        )
        .unwrap();
        let q = Net::validate(
            &RawNet::default()
                .node("n1", "f", 2, 1)
                .node("n2", "a", 0, 1)
                .edge("n2", 0, "n1", 1),
            None,
        )
        .unwrap();
        assert!(!nets_equal(&p, &q, EqMode::Strict));
        assert!(nets_equal(&p, &q, EqMode::PortPermuting));
    }

    #[test]
    fn tags_ignored_by_equality() {
        let tagged = Net::validate(
            &RawNet::default()
                .node("n1", "f", 2, 1)
                .node("n2", "a", 0, 1)
                .edge("n2", 0, "n1", 0)
                .tag("t0", "n1", Direction::In, 1),
            None,
        )
        .unwrap();
        assert!(nets_equal(&d1(), &tagged, EqMode::Strict));
        assert_ne!(canonical_key_tagged(&d1()), canonical_key_tagged(&tagged));
    }

    #[test]
    fn loop_presentations_equal() {
        // The same three-node loop described starting from different nodes.
        let mk = |ids: [&str; 3]| {
            Net::validate(
                &RawNet::default()
                    .node(ids[0], "t", 1, 1)
                    .node(ids[1], "u", 1, 1)
                    .node(ids[2], "v", 1, 1)
                    .edge(ids[0], 0, ids[1], 0)
                    .edge(ids[1], 0, ids[2], 0)
                    .edge(ids[2], 0, ids[0], 0),
                None,
            )
            .unwrap()
        };
        let s = mk(["a", "b", "c"]);
        let q = mk(["b", "c", "a"]);
        let r = mk(["c", "a", "b"]);
        assert!(nets_equal(&s, &q, EqMode::Strict));
        assert!(nets_equal(&q, &r, EqMode::Strict));
    }

    #[test]
    fn symmetric_net_canonicalizes() {
        // Two identical ground letters feeding one operator: automorphic.
        let p = Net::validate(
            &RawNet::default()
                .node("n1", "g", 2, 1)
                .node("n2", "a", 0, 1)
                .node("n3", "a", 0, 1)
                .edge("n2", 0, "n1", 0)
                .edge("n3", 0, "n1", 1),
            None,
        )
        .unwrap();
        let q = Net::validate(
            &RawNet::default()
                .node("m9", "g", 2, 1)
                .node("m1", "a", 0, 1)
                .node("m2", "a", 0, 1)
                .edge("m1", 0, "m9", 1)
                .edge("m2", 0, "m9", 0),
            None,
        )
        .unwrap();
        assert!(nets_equal(&p, &q, EqMode::Strict));
    }
}
