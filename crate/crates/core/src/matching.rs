//! Pattern matching: backtracking embedding of rule left sides into hosts.
//!
//! The apex (ranked part) of a pattern embeds as a node-induced subnet;
//! variables bind the complete subnet hanging off their tied port. Matches
//! whose boundary loops back into the apex outside the declared interface
//! are rejected, mirroring the fact that such occurrences cannot be
//! rewritten without instance-sensitive right sides.

use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

use crate::alphabet::LetterKind;
use crate::canon;
use crate::net::{Direction, Edge, Jungle, Net, NodeId, Port};
use crate::rule::{Rns, Rule, RulePreform};
use crate::subst::TiedImage;

/// One bound variable: the extracted image plus the host nodes it covers.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct BoundVar {
    pub image: TiedImage,
    pub host_nodes: BTreeSet<NodeId>,
}

/// Where a left tag landed in the host: the far endpoint of the severed
/// edge, if the host port was occupied, and the host's own tag name if the
/// port carried one.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct BoundaryHit {
    pub outside: Option<Port>,
    pub host_tag: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Match {
    pub rule: String,
    pub preform: usize,
    /// Index of the host net within the probed jungle.
    pub net_index: usize,
    /// Pattern apex node -> host node.
    pub node_map: BTreeMap<NodeId, NodeId>,
    pub binding: BTreeMap<String, BoundVar>,
    /// Left tag name -> host boundary.
    pub boundary: BTreeMap<String, BoundaryHit>,
    /// Whether every untagged unoccupied apex port met an unoccupied host
    /// port; only gluable matches can be executed.
    pub gluable: bool,
}

impl Match {
    /// All host nodes consumed by the rewrite: apex image plus bound
    /// subnets.
    pub fn redex_nodes(&self) -> BTreeSet<NodeId> {
        self.node_map
            .values()
            .cloned()
            .chain(self.binding.values().flat_map(|b| b.host_nodes.iter().cloned()))
            .collect()
    }

    pub fn apex_nodes(&self) -> BTreeSet<NodeId> {
        self.node_map.values().cloned().collect()
    }
}

/// All matches of a bare pattern net (no rule context) into a jungle.
pub fn find_pattern_matches(pattern: &Net, host: &Jungle) -> Vec<Match> {
    let preform = PatternView::new(pattern);
    let mut out = Vec::new();
    for (idx, net) in host.iter().enumerate() {
        out.extend(match_into(&preform, net, idx, "", 0));
    }
    out
}

/// All matches of every preform of a rule.
pub fn find_rule_matches(rule: &Rule, host: &Jungle) -> Vec<Match> {
    let mut out = Vec::new();
    for (pi, p) in rule.preforms.iter().enumerate() {
        let view = PatternView::new(&p.left);
        for (idx, net) in host.iter().enumerate() {
            out.extend(match_into(&view, net, idx, &rule.name, pi));
        }
    }
    out
}

/// All matches of an entire system, ignoring conditions (the application
/// layer enforces them).
pub fn find_rns_matches(rns: &Rns, host: &Jungle) -> Vec<Match> {
    let mut out = Vec::new();
    for rule in &rns.rules {
        out.extend(find_rule_matches(rule, host));
    }
    out
}

/// Whether a preform has everything it needs to actually fire at a match.
pub fn executable(m: &Match, preform: &RulePreform) -> bool {
    m.gluable
        && preform
            .right_variables()
            .iter()
            .all(|v| m.binding.contains_key(v))
}

struct PatternView<'a> {
    net: &'a Net,
    apex: Vec<NodeId>,
    /// Variable nodes with their single tie edge.
    vars: Vec<(NodeId, String, Edge, Direction)>,
}

impl<'a> PatternView<'a> {
    fn new(net: &'a Net) -> Self {
        let apex: Vec<NodeId> = net
            .nodes()
            .filter(|(_, i)| i.kind == LetterKind::Ranked)
            .map(|(id, _)| id.clone())
            .collect();
        let mut vars = Vec::new();
        for (id, info) in net.nodes() {
            if info.kind == LetterKind::Frontier {
                for e in net.edges() {
                    if &e.src == id {
                        // Variable's out side occupies an apex in-port.
                        vars.push((id.clone(), info.letter.clone(), e.clone(), Direction::Out));
                    } else if &e.dst == id {
                        vars.push((id.clone(), info.letter.clone(), e.clone(), Direction::In));
                    }
                }
            }
        }
        PatternView { net, apex, vars }
    }

    /// BFS order over apex nodes along apex-internal edges, with the
    /// connecting edge for each non-root node.
    fn plan(&self) -> Option<(NodeId, Vec<(NodeId, Edge, bool)>)> {
        let root = self.apex.first()?.clone();
        let apex_set: BTreeSet<&NodeId> = self.apex.iter().collect();
        let mut placed: BTreeSet<NodeId> = BTreeSet::new();
        placed.insert(root.clone());
        let mut order = Vec::new();
        let mut frontier = vec![root.clone()];
        while let Some(at) = frontier.pop() {
            let mut adjacent: Vec<(NodeId, Edge, bool)> = Vec::new();
            for e in self.net.edges() {
                if e.src == at && apex_set.contains(&e.dst) && !placed.contains(&e.dst) {
                    adjacent.push((e.dst.clone(), e.clone(), true));
                }
                if e.dst == at && apex_set.contains(&e.src) && !placed.contains(&e.src) {
                    adjacent.push((e.src.clone(), e.clone(), false));
                }
            }
            adjacent.sort_by(|a, b| a.0.cmp(&b.0));
            for (n, e, fwd) in adjacent {
                if placed.insert(n.clone()) {
                    frontier.push(n.clone());
                    order.push((n, e, fwd));
                }
            }
        }
        // The apex of a valid preform is connected (variables are leaves),
        // so every apex node is placed.
        if placed.len() != self.apex.len() {
            return None;
        }
        Some((root, order))
    }
}

fn match_into(
    view: &PatternView<'_>,
    host: &Net,
    net_index: usize,
    rule: &str,
    preform: usize,
) -> Vec<Match> {
    let mut out = Vec::new();
    let Some((root, plan)) = view.plan() else {
        return out;
    };
    let root_info = view.net.info(&root).unwrap();
    'anchor: for (hid, hinfo) in host.nodes() {
        if hinfo.letter != root_info.letter
            || hinfo.in_rank != root_info.in_rank
            || hinfo.out_rank != root_info.out_rank
        {
            continue;
        }
        let mut map: BTreeMap<NodeId, NodeId> = BTreeMap::new();
        map.insert(root.clone(), hid.clone());
        // Deterministic extension: each planned node is forced through the
        // host edge at the already-mapped endpoint's port.
        for (pat_node, edge, forward) in &plan {
            let (anchor_pat, anchor_port, far_port, far_is_dst) = if *forward {
                (&edge.src, edge.out_port, edge.in_port, true)
            } else {
                (&edge.dst, edge.in_port, edge.out_port, false)
            };
            let Some(anchor_host) = map.get(anchor_pat) else {
                continue 'anchor;
            };
            let probe = Port::new(
                anchor_host,
                if far_is_dst { Direction::Out } else { Direction::In },
                anchor_port,
            );
            let Some(he) = host.edge_at(&probe) else {
                continue 'anchor;
            };
            let (host_far, host_far_port) = if far_is_dst {
                (he.dst.clone(), he.in_port)
            } else {
                (he.src.clone(), he.out_port)
            };
            if host_far_port != far_port {
                continue 'anchor;
            }
            let pinfo = view.net.info(pat_node).unwrap();
            let hfinfo = host.info(&host_far).unwrap();
            if pinfo.letter != hfinfo.letter {
                continue 'anchor;
            }
            match map.get(pat_node) {
                Some(existing) if existing != &host_far => continue 'anchor,
                _ => {}
            }
            if map.values().any(|v| v == &host_far) && map.get(pat_node) != Some(&host_far) {
                continue 'anchor;
            }
            map.insert(pat_node.clone(), host_far);
        }
        if let Some(m) = finish_match(view, host, &map, net_index, rule, preform) {
            out.push(m);
        }
    }
    out.sort_by(|a, b| a.node_map.cmp(&b.node_map).then(a.preform.cmp(&b.preform)));
    out.dedup();
    out
}

fn finish_match(
    view: &PatternView<'_>,
    host: &Net,
    map: &BTreeMap<NodeId, NodeId>,
    net_index: usize,
    rule: &str,
    preform: usize,
) -> Option<Match> {
    let image: BTreeSet<&NodeId> = map.values().collect();
    // Every pattern apex edge must be present in the host.
    let apex_set: BTreeSet<&NodeId> = view.apex.iter().collect();
    let mut pat_edges: BTreeSet<Edge> = BTreeSet::new();
    for e in view.net.edges() {
        if apex_set.contains(&e.src) && apex_set.contains(&e.dst) {
            let he = Edge {
                src: map[&e.src].clone(),
                out_port: e.out_port,
                dst: map[&e.dst].clone(),
                in_port: e.in_port,
            };
            if host.edge_at(&Port::new(&he.src, Direction::Out, he.out_port)) != Some(&he)
                && !host.edges().any(|x| x == &he)
            {
                return None;
            }
            pat_edges.insert(he);
        }
    }
    // Node-induced: a host edge between two image nodes outside the pattern
    // is an outside loop at the matching point.
    for e in host.edges() {
        if image.contains(&e.src) && image.contains(&e.dst) && !pat_edges.contains(e) {
            return None;
        }
    }

    // Bind variables.
    let mut binding: BTreeMap<String, BoundVar> = BTreeMap::new();
    let mut claimed: BTreeSet<NodeId> = map.values().cloned().collect();
    for (_, name, edge, side) in &view.vars {
        let (apex_pat, apex_port_dir, apex_port_idx) = match side {
            // var:out -> apex:in
            Direction::Out => (&edge.dst, Direction::In, edge.in_port),
            // apex:out -> var:in
            Direction::In => (&edge.src, Direction::Out, edge.out_port),
        };
        let host_port = Port::new(&map[apex_pat], apex_port_dir, apex_port_idx);
        let bound = match host.edge_at(&host_port) {
            None => BoundVar {
                image: TiedImage::empty(),
                host_nodes: BTreeSet::new(),
            },
            Some(he) => {
                let (far_node, far_port) = match side {
                    Direction::Out => (he.src.clone(), Port::new(&he.src, Direction::Out, he.out_port)),
                    Direction::In => (he.dst.clone(), Port::new(&he.dst, Direction::In, he.in_port)),
                };
                if image.contains(&far_node) {
                    // Tie loops straight back into the apex.
                    return None;
                }
                let comp = component_without(host, &far_node, &map.values().cloned().collect());
                // The component may touch the apex only through the tie.
                let mut touches = 0usize;
                for e in host.edges() {
                    let s_in = comp.contains(&e.src);
                    let d_in = comp.contains(&e.dst);
                    let s_ap = image.contains(&e.src);
                    let d_ap = image.contains(&e.dst);
                    if (s_in && d_ap) || (d_in && s_ap) {
                        touches += 1;
                    }
                }
                if touches != 1 {
                    return None;
                }
                if comp.iter().any(|n| claimed.contains(n)) {
                    return None;
                }
                claimed.extend(comp.iter().cloned());
                let sub = extract(host, &comp);
                let tie = Port {
                    node: far_port.node.clone(),
                    dir: far_port.dir,
                    index: far_port.index,
                };
                let image = match side {
                    Direction::Out => TiedImage::via_out(sub, tie),
                    Direction::In => TiedImage::via_in(sub, tie),
                };
                BoundVar {
                    image,
                    host_nodes: comp,
                }
            }
        };
        match binding.get(name) {
            None => {
                binding.insert(name.clone(), bound);
            }
            Some(prev) => {
                // Non-linear occurrence: images must agree (net, tie
                // placement and direction) and cover disjoint material.
                if !tied_equal(&prev.image, &bound.image)
                    || prev.host_nodes.intersection(&bound.host_nodes).next().is_some()
                        && prev.host_nodes != bound.host_nodes
                {
                    return None;
                }
                if prev.host_nodes == bound.host_nodes && !prev.host_nodes.is_empty() {
                    // The same component reached twice would be joined, which
                    // non-instance-sensitive application cannot express.
                    return None;
                }
            }
        }
    }

    // Boundary and gluability.
    let mut boundary = BTreeMap::new();
    let mut gluable = true;
    let var_tied: BTreeSet<Port> = view
        .vars
        .iter()
        .map(|(_, _, e, side)| match side {
            Direction::Out => Port::new(&e.dst, Direction::In, e.in_port),
            Direction::In => Port::new(&e.src, Direction::Out, e.out_port),
        })
        .collect();
    let tagged: BTreeMap<Port, String> = view
        .net
        .tags()
        .map(|(n, p)| (p.clone(), n.clone()))
        .collect();
    for pat_port in view.net.unoccupied_ports() {
        if view.net.info(&pat_port.node).unwrap().kind == LetterKind::Frontier {
            continue;
        }
        if var_tied.contains(&pat_port) {
            continue;
        }
        let host_port = Port::new(&map[&pat_port.node], pat_port.dir, pat_port.index);
        let hit = match host.edge_at(&host_port) {
            None => BoundaryHit {
                outside: None,
                host_tag: host.tag_of_port(&host_port).map(|s| s.to_string()),
            },
            Some(he) => {
                let outside = match pat_port.dir {
                    Direction::In => Port::new(&he.src, Direction::Out, he.out_port),
                    Direction::Out => Port::new(&he.dst, Direction::In, he.in_port),
                };
                BoundaryHit {
                    outside: Some(outside),
                    host_tag: None,
                }
            }
        };
        match tagged.get(&pat_port) {
            Some(tag) => {
                boundary.insert(tag.clone(), hit);
            }
            None => {
                if hit.outside.is_some() {
                    gluable = false;
                }
            }
        }
    }

    Some(Match {
        rule: rule.to_string(),
        preform,
        net_index,
        node_map: map.clone(),
        binding,
        boundary,
        gluable,
    })
}

fn tied_equal(a: &TiedImage, b: &TiedImage) -> bool {
    match (&a.net, &b.net) {
        (None, None) => true,
        (Some(x), Some(y)) => {
            let decorate = |n: &Net, img: &TiedImage| {
                let mut raw = crate::net::RawNet::default();
                for (id, info) in n.nodes() {
                    raw.nodes.push((
                        id.0.clone(),
                        info.letter.clone(),
                        info.in_rank,
                        info.out_rank,
                        info.kind,
                    ));
                }
                for e in n.edges() {
                    raw.edges
                        .push((e.src.0.clone(), e.out_port, e.dst.0.clone(), e.in_port));
                }
                for tie in [&img.out_tie, &img.in_tie].into_iter().flatten() {
                    raw.tags
                        .push(("~tie".into(), tie.node.0.clone(), tie.dir, tie.index));
                }
                Net::validate(&raw, None).ok().map(|n| canon::canonical_key_tagged(&n))
            };
            decorate(x, a) == decorate(y, b)
        }
        _ => false,
    }
}

/// Connected component of `seed` in the host with `blocked` nodes removed.
fn component_without(host: &Net, seed: &NodeId, blocked: &BTreeSet<NodeId>) -> BTreeSet<NodeId> {
    let mut comp = BTreeSet::new();
    let mut stack = vec![seed.clone()];
    while let Some(n) = stack.pop() {
        if blocked.contains(&n) || !comp.insert(n.clone()) {
            continue;
        }
        for e in host.edges() {
            if e.src == n && !blocked.contains(&e.dst) {
                stack.push(e.dst.clone());
            }
            if e.dst == n && !blocked.contains(&e.src) {
                stack.push(e.src.clone());
            }
        }
    }
    comp
}

/// Node-induced extraction keeping ids; host tags inside survive.
pub(crate) fn extract(host: &Net, nodes: &BTreeSet<NodeId>) -> Net {
    let n: BTreeMap<NodeId, crate::net::NodeInfo> = host
        .nodes()
        .filter(|(id, _)| nodes.contains(*id))
        .map(|(id, i)| (id.clone(), i.clone()))
        .collect();
    let e: BTreeSet<Edge> = host
        .edges()
        .filter(|e| nodes.contains(&e.src) && nodes.contains(&e.dst))
        .cloned()
        .collect();
    let t: BTreeMap<String, Port> = host
        .tags()
        .filter(|(_, p)| nodes.contains(&p.node))
        .map(|(n, p)| (n.clone(), p.clone()))
        .collect();
    let mut net = Net::from_parts(n, e, t);
    net.prune_tags();
    net
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::net::fixtures::{d1, d2};
    use crate::net::RawNet;
    use crate::rule::RulePreform;

    fn r1_rule() -> Rule {
        let left = Net::validate(
            &RawNet::default()
                .node("l", "f", 2, 1)
                .tag("t0", "l", Direction::In, 0)
                .tag("t1", "l", Direction::In, 1)
                .tag("t2", "l", Direction::Out, 0),
            None,
        )
        .unwrap();
        let right = Net::validate(
            &RawNet::default()
                .node("r", "h", 2, 1)
                .tag("t0", "r", Direction::In, 0)
                .tag("t1", "r", Direction::In, 1)
                .tag("t2", "r", Direction::Out, 0),
            None,
        )
        .unwrap();
        Rule::single("r1", RulePreform::new(left, vec![right]).unwrap())
    }

    #[test]
    fn r1_matches_d1_once() {
        let ms = find_rule_matches(&r1_rule(), &Jungle::singleton(d1()));
        assert_eq!(ms.len(), 1);
        let m = &ms[0];
        assert!(m.gluable);
        assert_eq!(m.apex_nodes().len(), 1);
        assert!(m.boundary["t0"].outside.is_some());
        assert!(m.boundary["t1"].outside.is_none());
        assert!(m.boundary["t2"].outside.is_none());
    }

    #[test]
    fn r1_does_not_match_d2() {
        let ms = find_rule_matches(&r1_rule(), &Jungle::singleton(d2()));
        assert!(ms.is_empty());
    }

    #[test]
    fn untagged_single_node_pattern_matches_inside_loop() {
        let p = Net::validate(&RawNet::default().node("x", "p", 1, 1), None).unwrap();
        let ms = find_pattern_matches(&p, &Jungle::singleton(d2()));
        assert_eq!(ms.len(), 1);
        assert!(!ms[0].gluable);
    }

    #[test]
    fn variable_binds_hanging_subnet() {
        let pat = Net::validate(
            &RawNet::default()
                .node("l", "f", 2, 1)
                .var("v", "x")
                .edge("v", 0, "l", 0),
            None,
        )
        .unwrap();
        let ms = find_pattern_matches(&pat, &Jungle::singleton(d1()));
        assert_eq!(ms.len(), 1);
        let b = &ms[0].binding["x"];
        assert_eq!(b.host_nodes.len(), 1);
        let img = b.image.net.as_ref().unwrap();
        assert_eq!(img.node_count(), 1);
        assert!(b.image.out_tie.is_some());
    }

    #[test]
    fn variable_on_unoccupied_port_binds_empty() {
        let pat = Net::validate(
            &RawNet::default()
                .node("l", "f", 2, 1)
                .var("v", "x")
                .edge("v", 0, "l", 1),
            None,
        )
        .unwrap();
        let ms = find_pattern_matches(&pat, &Jungle::singleton(d1()));
        // Two in-ports: in:1 carries the variable here, in:0 is untagged and
        // occupied in the host, so the match exists but is not gluable.
        assert_eq!(ms.len(), 1);
        assert!(ms[0].binding["x"].image.net.is_none());
        assert!(!ms[0].gluable);
    }
}
