//! Covers, saturation, partitions, and the induced common refinement.

use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

use crate::canon::{self, EqMode};
use crate::enclose;
use crate::error::{Error, Result};
use crate::net::{Jungle, Net, NodeId};

/// Disjoint, exhaustive, connected blocks of a net's node set.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PartitionSpec {
    pub blocks: Vec<BTreeSet<NodeId>>,
}

impl PartitionSpec {
    pub fn new(net: &Net, blocks: Vec<BTreeSet<NodeId>>) -> Result<PartitionSpec> {
        let mut seen: BTreeSet<NodeId> = BTreeSet::new();
        for b in &blocks {
            if b.is_empty() {
                return Err(Error::NotAPartition("empty block".into()));
            }
            for n in b {
                if net.info(n).is_none() {
                    return Err(Error::UnknownNode(n.to_string()));
                }
                if !seen.insert(n.clone()) {
                    return Err(Error::NotAPartition(format!("node {n} in two blocks")));
                }
            }
            if !net.is_connected_subset(b) {
                return Err(Error::DisconnectedBlock);
            }
        }
        if seen.len() != net.node_count() {
            return Err(Error::NotAPartition("blocks do not cover the net".into()));
        }
        Ok(PartitionSpec { blocks })
    }

    /// Parses the CLI syntax `n1,n2|n3`.
    pub fn parse(net: &Net, s: &str) -> Result<PartitionSpec> {
        let blocks = s
            .split('|')
            .map(|b| {
                b.split(',')
                    .map(|n| NodeId::new(n.trim()))
                    .collect::<BTreeSet<_>>()
            })
            .collect();
        PartitionSpec::new(net, blocks)
    }

    pub fn render(&self) -> String {
        self.blocks
            .iter()
            .map(|b| {
                b.iter()
                    .map(|n| n.as_str())
                    .collect::<Vec<_>>()
                    .join(",")
            })
            .collect::<Vec<_>>()
            .join("|")
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct PartitionOpsReport {
    pub is_cover: bool,
    pub is_saturating: bool,
    pub is_partition: bool,
    /// The common refinement induced by the elements, restricted to the net;
    /// present whenever the elements cover the net.
    pub induced: Option<PartitionSpec>,
}

/// Locates a cover element inside `t` by node ids: its nodes must exist in
/// `t` with the same letters.
fn located_nodes(t: &Net, element: &Net) -> Option<BTreeSet<NodeId>> {
    let mut out = BTreeSet::new();
    for (id, info) in element.nodes() {
        match t.info(id) {
            Some(h) if h.letter == info.letter => {
                out.insert(id.clone());
            }
            _ => return None,
        }
    }
    Some(out)
}

/// Cover, saturation, and partition checks for a jungle of candidate
/// elements against a net, plus the induced refinement.
pub fn partition_ops(t: &Net, elements: &Jungle) -> PartitionOpsReport {
    let mut memberships: Vec<BTreeSet<NodeId>> = Vec::new();
    let mut all_located = true;
    for el in elements.iter() {
        match located_nodes(t, el) {
            Some(nodes) => memberships.push(nodes),
            None => {
                all_located = false;
            }
        }
    }

    let covered: BTreeSet<NodeId> = memberships.iter().flatten().cloned().collect();
    let is_cover = all_located && t.node_ids().all(|n| covered.contains(n));

    // Saturating: each element embeds in t as an enclosure.
    let is_saturating = is_cover
        && elements.iter().all(|el| {
            located_nodes(t, el)
                .map(|nodes| {
                    t.is_connected_subset(&nodes)
                        && enclose::induced_subnet(t, &nodes)
                            .map(|sub| {
                                canon::nets_equal(&sub.untagged(), &el.untagged(), EqMode::Strict)
                            })
                            .unwrap_or(false)
                })
                .unwrap_or(false)
        });

    let is_partition = is_saturating && {
        let total: usize = memberships.iter().map(|m| m.len()).sum();
        total == t.node_count() && covered.len() == total
    };

    let induced = if is_cover {
        Some(induced_refinement(t, &memberships))
    } else {
        None
    };

    PartitionOpsReport {
        is_cover,
        is_saturating,
        is_partition,
        induced,
    }
}

/// The partition induced by a family of node sets: nodes with the same
/// membership signature form a class, split into connected components so
/// each block is a net.
pub fn induced_refinement(t: &Net, memberships: &[BTreeSet<NodeId>]) -> PartitionSpec {
    let mut sig: BTreeMap<Vec<usize>, BTreeSet<NodeId>> = BTreeMap::new();
    for id in t.node_ids() {
        let s: Vec<usize> = memberships
            .iter()
            .enumerate()
            .filter(|(_, m)| m.contains(id))
            .map(|(i, _)| i)
            .collect();
        if s.is_empty() {
            continue;
        }
        sig.entry(s).or_default().insert(id.clone());
    }
    let mut blocks = Vec::new();
    for (_, class) in sig {
        // Split into connected pieces within t.
        let mut remaining = class;
        while let Some(seed) = remaining.iter().next().cloned() {
            let mut comp = BTreeSet::new();
            let mut stack = vec![seed];
            while let Some(n) = stack.pop() {
                if !remaining.remove(&n) {
                    continue;
                }
                comp.insert(n.clone());
                for nb in t.neighbors(&n) {
                    if remaining.contains(&nb) {
                        stack.push(nb);
                    }
                }
            }
            blocks.push(comp);
        }
    }
    blocks.sort();
    PartitionSpec { blocks }
}

/// Whether the blocks form a partition of `t` (connected, disjoint,
/// exhaustive).
pub fn is_partition_of(t: &Net, blocks: &[BTreeSet<NodeId>]) -> bool {
    PartitionSpec::new(t, blocks.to_vec()).is_ok()
}

/// Enumerates every partition of `t` into connected blocks.
pub fn all_partitions(t: &Net) -> Vec<PartitionSpec> {
    let ids: Vec<NodeId> = t.node_ids().cloned().collect();
    let mut out = Vec::new();
    let mut blocks: Vec<BTreeSet<NodeId>> = Vec::new();
    fn rec(
        t: &Net,
        ids: &[NodeId],
        at: usize,
        blocks: &mut Vec<BTreeSet<NodeId>>,
        out: &mut Vec<PartitionSpec>,
    ) {
        if at == ids.len() {
            if blocks.iter().all(|b| t.is_connected_subset(b)) {
                out.push(PartitionSpec {
                    blocks: blocks.clone(),
                });
            }
            return;
        }
        let node = ids[at].clone();
        for i in 0..blocks.len() {
            blocks[i].insert(node.clone());
            rec(t, ids, at + 1, blocks, out);
            blocks[i].remove(&node);
        }
        let mut fresh = BTreeSet::new();
        fresh.insert(node);
        blocks.push(fresh);
        rec(t, ids, at + 1, blocks, out);
        blocks.pop();
    }
    rec(t, &ids, 0, &mut blocks, &mut out);
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::enclose::induced_subnet;
    use crate::net::fixtures::d1;

    fn n(s: &str) -> NodeId {
        NodeId::new(s)
    }

    #[test]
    fn whole_net_cover_is_partition() {
        let t = d1();
        let r = partition_ops(&t, &Jungle::singleton(t.clone()));
        assert!(r.is_cover && r.is_saturating && r.is_partition);
        assert_eq!(r.induced.unwrap().blocks.len(), 1);
    }

    #[test]
    fn overlapping_cover_refines() {
        let t = d1();
        let n1_sub = induced_subnet(&t, &[n("n1")].into_iter().collect()).unwrap();
        let els = Jungle::from_nets([n1_sub, t.clone()]);
        let r = partition_ops(&t, &els);
        assert!(r.is_cover);
        assert!(r.is_saturating);
        assert!(!r.is_partition);
        let induced = r.induced.unwrap();
        assert_eq!(induced.blocks.len(), 2);
        assert!(is_partition_of(&t, &induced.blocks));
    }

    #[test]
    fn missing_node_breaks_cover() {
        let t = d1();
        let n1_sub = induced_subnet(&t, &[n("n1")].into_iter().collect()).unwrap();
        let r = partition_ops(&t, &Jungle::singleton(n1_sub));
        assert!(!r.is_cover);
        assert!(r.induced.is_none());
    }

    #[test]
    fn all_partitions_of_d1() {
        // {n1,n2} and {{n1},{n2}}.
        let ps = all_partitions(&d1());
        assert_eq!(ps.len(), 2);
    }

    #[test]
    fn overlapping_blocks_rejected() {
        let t = d1();
        let dup = vec![
            [n("n1")].into_iter().collect::<BTreeSet<_>>(),
            [n("n1")].into_iter().collect(),
        ];
        assert!(matches!(
            PartitionSpec::new(&t, dup),
            Err(Error::NotAPartition(_))
        ));
    }

    #[test]
    fn parse_roundtrip() {
        let t = d1();
        let p = PartitionSpec::parse(&t, "n1|n2").unwrap();
        assert_eq!(p.blocks.len(), 2);
        assert_eq!(p.render(), "n1|n2");
    }
}
