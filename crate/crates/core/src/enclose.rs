//! Enclosures: connected node-induced subnets with severed boundary edges
//! left unoccupied and auto-tagged; embedding and overlap search.

use std::collections::BTreeSet;

use crate::canon::{self, EqMode};
use crate::error::{Error, Result};
use crate::matching;
use crate::net::{Direction, Jungle, Net, NodeId, Port};

/// Node-induced subnet on `nodes`, with every severed edge endpoint tagged
/// `b0, b1, ...` in port order. Host tags inside the subset survive when
/// their port is still unoccupied.
pub fn induced_subnet(t: &Net, nodes: &BTreeSet<NodeId>) -> Result<Net> {
    if nodes.is_empty() {
        return Err(Error::EmptyNet);
    }
    for n in nodes {
        if t.info(n).is_none() {
            return Err(Error::UnknownNode(n.to_string()));
        }
    }
    if !t.is_connected_subset(nodes) {
        return Err(Error::DisconnectedBlock);
    }
    let mut sub = matching::extract(t, nodes);
    // Severed endpoints: ports occupied in t but unoccupied in the subnet.
    let mut cut_ports: Vec<Port> = Vec::new();
    for e in t.edges() {
        let s_in = nodes.contains(&e.src);
        let d_in = nodes.contains(&e.dst);
        if s_in && !d_in {
            cut_ports.push(Port::new(&e.src, Direction::Out, e.out_port));
        }
        if d_in && !s_in {
            cut_ports.push(Port::new(&e.dst, Direction::In, e.in_port));
        }
    }
    cut_ports.sort();
    let mut raw_tags: Vec<(String, Port)> = Vec::new();
    for (i, p) in cut_ports.iter().enumerate() {
        raw_tags.push((format!("b{i}"), p.clone()));
    }
    let mut tags: std::collections::BTreeMap<String, Port> =
        sub.tags().map(|(n, p)| (n.clone(), p.clone())).collect();
    for (name, p) in raw_tags {
        tags.insert(name, p);
    }
    sub = Net::from_parts(
        sub.nodes().map(|(id, i)| (id.clone(), i.clone())).collect(),
        sub.edges().cloned().collect(),
        tags,
    );
    Ok(sub)
}

/// Like `induced_subnet` but with every unoccupied port tagged, cut or not:
/// cut endpoints first (`b0..`), then genuinely unoccupied ports (`u0..`).
pub fn induced_block_pattern(t: &Net, nodes: &BTreeSet<NodeId>) -> Result<Net> {
    let sub = induced_subnet(t, nodes)?;
    let tagged: BTreeSet<Port> = sub.tags().map(|(_, p)| p.clone()).collect();
    let mut tags: std::collections::BTreeMap<String, Port> =
        sub.tags().map(|(n, p)| (n.clone(), p.clone())).collect();
    let mut i = 0usize;
    for p in sub.unoccupied_ports() {
        if !tagged.contains(&p) {
            while tags.contains_key(&format!("u{i}")) {
                i += 1;
            }
            tags.insert(format!("u{i}"), p);
            i += 1;
        }
    }
    Ok(Net::from_parts(
        sub.nodes().map(|(id, i)| (id.clone(), i.clone())).collect(),
        sub.edges().cloned().collect(),
        tags,
    ))
}

/// All connected node-induced subnets of `t` up to `max_nodes` nodes,
/// deduplicated by strict equality.
pub fn enclosures(t: &Net, max_nodes: usize) -> Result<Vec<Net>> {
    if max_nodes < 1 {
        return Err(Error::BoundTooSmall);
    }
    let mut out: Vec<Net> = Vec::new();
    let mut seen: BTreeSet<String> = BTreeSet::new();
    for subset in connected_subsets(t, max_nodes) {
        let sub = induced_subnet(t, &subset)?;
        let key = canon::canonical_key(&sub, EqMode::Strict);
        if seen.insert(key) {
            out.push(sub);
        }
    }
    Ok(out)
}

/// All connected node subsets of size <= bound.
pub fn connected_subsets(t: &Net, bound: usize) -> Vec<BTreeSet<NodeId>> {
    // Grow each subset only by neighbors of its maximal seed to avoid
    // duplicates: standard connected-subgraph enumeration rooted per node.
    let ids: Vec<NodeId> = t.node_ids().cloned().collect();
    let mut out: Vec<BTreeSet<NodeId>> = Vec::new();
    for (i, root) in ids.iter().enumerate() {
        let forbidden: BTreeSet<NodeId> = ids[..i].iter().cloned().collect();
        let mut current: BTreeSet<NodeId> = BTreeSet::new();
        current.insert(root.clone());
        let mut ext: Vec<NodeId> = t
            .neighbors(root)
            .into_iter()
            .filter(|n| !forbidden.contains(n) && n != root)
            .collect();
        ext.sort();
        ext.dedup();
        rec(t, &mut current, ext, &forbidden, bound, &mut out);
        fn rec(
            t: &Net,
            current: &mut BTreeSet<NodeId>,
            extension: Vec<NodeId>,
            forbidden: &BTreeSet<NodeId>,
            bound: usize,
            out: &mut Vec<BTreeSet<NodeId>>,
        ) {
            out.push(current.clone());
            if current.len() >= bound {
                return;
            }
            let mut ext = extension;
            while let Some(v) = ext.pop() {
                current.insert(v.clone());
                let mut next_ext = ext.clone();
                for n in t.neighbors(&v) {
                    if !current.contains(&n) && !forbidden.contains(&n) && !next_ext.contains(&n) {
                        next_ext.push(n);
                    }
                }
                rec(t, current, next_ext, forbidden, bound, out);
                current.remove(&v);
            }
        }
    }
    out
}

/// Whether `s` embeds into `t` as an enclosure: an injective letter- and
/// port-preserving map whose image is node-induced. Tags and variables in
/// `s` are treated as plain boundary.
pub fn is_enclosure(s: &Net, t: &Net) -> bool {
    !matching::find_pattern_matches(&s.untagged(), &Jungle::singleton(t.clone())).is_empty()
}

#[derive(Debug, Clone)]
pub struct OverlapReport {
    pub overlap: bool,
    pub shared: Option<Net>,
    /// True when the bound truncated the search; a negative verdict is only
    /// definite when this is false.
    pub exhausted: bool,
}

/// Searches for the largest net embeddable as an enclosure of both `p` and
/// `q`, up to `bound` nodes.
pub fn overlaps(p: &Net, q: &Net, bound: usize) -> Result<OverlapReport> {
    if bound < 1 {
        return Err(Error::BoundTooSmall);
    }
    let cap = bound.min(p.node_count()).min(q.node_count());
    let mut shared: Option<Net> = None;
    // Enumerate enclosures of the smaller side, largest first.
    let (small, large) = if p.node_count() <= q.node_count() {
        (p, q)
    } else {
        (q, p)
    };
    let mut cands = enclosures(small, cap)?;
    cands.sort_by_key(|n| std::cmp::Reverse(n.node_count()));
    for c in cands {
        let bare = c.untagged();
        if is_enclosure(&bare, large) {
            shared = Some(bare);
            break;
        }
    }
    let exhausted = shared.as_ref().map_or(
        bound < p.node_count().min(q.node_count()),
        |s| s.node_count() == bound && bound < p.node_count().min(q.node_count()),
    );
    Ok(OverlapReport {
        overlap: shared.is_some(),
        shared,
        exhausted,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::net::fixtures::{d1, d2};
    use crate::net::RawNet;

    #[test]
    fn d1_enclosures_at_two() {
        let encs = enclosures(&d1(), 2).unwrap();
        assert_eq!(encs.len(), 3);
        assert!(encs.iter().any(|n| n.node_count() == 2));
        // The f block keeps its severed in-port tagged.
        let f_block = encs
            .iter()
            .find(|n| n.node_count() == 1 && n.letters().contains("f"))
            .unwrap();
        assert_eq!(f_block.tags().count(), 1);
        assert_eq!(f_block.delta(), (3, 2, 1));
    }

    #[test]
    fn enclosure_membership() {
        let f = Net::validate(&RawNet::default().node("z", "f", 2, 1), None).unwrap();
        let h = Net::validate(&RawNet::default().node("z", "h", 2, 1), None).unwrap();
        assert!(is_enclosure(&f, &d1()));
        assert!(!is_enclosure(&h, &d1()));
    }

    #[test]
    fn bound_too_small() {
        assert!(matches!(enclosures(&d1(), 0), Err(Error::BoundTooSmall)));
    }

    #[test]
    fn self_overlap_is_whole_net() {
        let r = overlaps(&d1(), &d1(), 2).unwrap();
        assert!(r.overlap);
        assert_eq!(r.shared.as_ref().unwrap().node_count(), 2);
        assert!(!r.exhausted);
    }

    #[test]
    fn disjoint_alphabets_do_not_overlap() {
        let r = overlaps(&d1(), &d2(), 2).unwrap();
        assert!(!r.overlap);
        assert!(!r.exhausted);
    }

    #[test]
    fn shared_f_node() {
        let f = Net::validate(&RawNet::default().node("z", "f", 2, 1), None).unwrap();
        let r = overlaps(&d1(), &f, 2).unwrap();
        assert!(r.overlap);
        let s = r.shared.unwrap();
        assert_eq!(s.node_count(), 1);
        assert!(s.letters().contains("f"));
    }
}
