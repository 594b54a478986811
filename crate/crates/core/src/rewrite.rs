//! Renetting-system application: single-redex replacement, breadth-first
//! derivation, and normal forms.

use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

use crate::alphabet::LetterKind;
use crate::error::{Error, Result};
use crate::hom::split_components;
use crate::matching::{self, executable, Match};
use crate::net::{Edge, Jungle, Net, NodeId, NodeInfo, Port};
use crate::rule::{Condition, Rns, RulePreform};
use crate::subst::fresh_prefix;

/// Matches of one system in one net, honoring the system's conditions:
/// apply-order gives priority tiers, redex restrictions filter, and
/// letters-outside aborts. Only executable matches are returned.
fn admitted_matches(rns: &Rns, net: &Net, net_index: usize) -> Result<Vec<(usize, usize, Match)>> {
    for c in &rns.conditions {
        if let Condition::LettersOutside(set) = c {
            if net.letters().iter().any(|l| set.contains(l)) {
                return Err(Error::ConditionViolated(format!(
                    "net contains letters excluded by `{}`",
                    rns.name
                )));
            }
        }
    }
    let host = Jungle::singleton(net.clone());
    let order: Option<&Vec<String>> = rns.conditions.iter().find_map(|c| match c {
        Condition::ApplyOrder(o) => Some(o),
        _ => None,
    });
    let within: Option<&BTreeMap<String, Vec<BTreeSet<NodeId>>>> =
        rns.conditions.iter().find_map(|c| match c {
            Condition::RedexWithin(w) => Some(w),
            _ => None,
        });
    let disjoint = rns
        .conditions
        .iter()
        .any(|c| matches!(c, Condition::RedexDisjoint));

    // Priority tiers: listed rules first, in order, then the rest together.
    let mut tiers: Vec<Vec<usize>> = Vec::new();
    match order {
        Some(names) => {
            for n in names {
                if let Some(i) = rns.rules.iter().position(|r| &r.name == n) {
                    tiers.push(vec![i]);
                }
            }
            let rest: Vec<usize> = (0..rns.rules.len())
                .filter(|i| !names.contains(&rns.rules[*i].name))
                .collect();
            if !rest.is_empty() {
                tiers.push(rest);
            }
        }
        None => tiers.push((0..rns.rules.len()).collect()),
    }

    for tier in tiers {
        let mut found: Vec<(usize, usize, Match)> = Vec::new();
        for ri in tier {
            let rule = &rns.rules[ri];
            for mut m in matching::find_rule_matches(rule, &host) {
                m.net_index = net_index;
                let preform = &rule.preforms[m.preform];
                if !executable(&m, preform) {
                    continue;
                }
                if let Some(w) = within {
                    match w.get(&rule.name) {
                        Some(allowed) => {
                            let apex = m.apex_nodes();
                            if !allowed.iter().any(|s| s == &apex) {
                                continue;
                            }
                        }
                        None => continue,
                    }
                }
                found.push((ri, m.preform, m));
            }
        }
        if found.is_empty() {
            continue;
        }
        if disjoint {
            let mut kept: Vec<(usize, usize, Match)> = Vec::new();
            let mut used: BTreeSet<NodeId> = BTreeSet::new();
            for (ri, pi, m) in found {
                let redex = m.redex_nodes();
                if redex.iter().all(|n| !used.contains(n)) {
                    used.extend(redex);
                    kept.push((ri, pi, m));
                }
            }
            return Ok(kept);
        }
        return Ok(found);
    }
    Ok(Vec::new())
}

/// One-step application of a system to a jungle: the union over all
/// executable matches and right-side alternatives of single-redex
/// replacement. Nets with nothing to execute pass through unchanged.
pub fn apply_rns(rns: &Rns, host: &Jungle) -> Result<Jungle> {
    let mut out = Jungle::new();
    for (idx, net) in host.iter().enumerate() {
        let ms = admitted_matches(rns, net, idx)?;
        if ms.is_empty() {
            out.insert(net.clone());
            continue;
        }
        for (ri, pi, m) in ms {
            let preform = &rns.rules[ri].preforms[pi];
            for right_idx in 0..preform.rights.len() {
                for piece in rewrite_at(net, &m, preform, right_idx)? {
                    out.insert(piece);
                }
            }
        }
    }
    Ok(out)
}

/// One-step application of several systems (union of per-system results).
pub fn apply_many(systems: &[Rns], host: &Jungle) -> Result<Jungle> {
    let mut out = Jungle::new();
    for rns in systems {
        out = out.union(apply_rns(rns, host)?);
    }
    if systems.is_empty() {
        out = host.clone();
    }
    Ok(out)
}

/// Splices a right-side alternative into the host at a match.
pub fn rewrite_at(
    host: &Net,
    m: &Match,
    preform: &RulePreform,
    right_idx: usize,
) -> Result<Vec<Net>> {
    let right = &preform.rights[right_idx];
    let redex = m.redex_nodes();

    let mut nodes: BTreeMap<NodeId, NodeInfo> = host
        .nodes()
        .filter(|(id, _)| !redex.contains(*id))
        .map(|(id, i)| (id.clone(), i.clone()))
        .collect();
    let mut edges: BTreeSet<Edge> = host
        .edges()
        .filter(|e| !redex.contains(&e.src) && !redex.contains(&e.dst))
        .cloned()
        .collect();
    let mut tags: BTreeMap<String, Port> = host
        .tags()
        .filter(|(_, p)| !redex.contains(&p.node))
        .map(|(n, p)| (n.clone(), p.clone()))
        .collect();

    let prefix = fresh_prefix(host.node_ids().cloned());
    let rcopy = right.with_id_prefix(&prefix);
    // Right-side variable nodes are placeholders, not material.
    let rvars: Vec<(NodeId, String)> = rcopy
        .nodes()
        .filter(|(_, i)| i.kind == LetterKind::Frontier)
        .map(|(id, i)| (id.clone(), i.letter.clone()))
        .collect();
    let rvar_ids: BTreeSet<&NodeId> = rvars.iter().map(|(id, _)| id).collect();
    for (id, info) in rcopy.nodes() {
        if !rvar_ids.contains(id) {
            nodes.insert(id.clone(), info.clone());
        }
    }
    for e in rcopy.edges() {
        if !rvar_ids.contains(&e.src) && !rvar_ids.contains(&e.dst) {
            edges.insert(e.clone());
        }
    }

    // Variable occurrences: splice a private copy of the binding.
    for (k, (vid, name)) in rvars.iter().enumerate() {
        let bound = m
            .binding
            .get(name)
            .ok_or_else(|| Error::GeneratorUnmapped(name.clone()))?;
        let Some(img) = &bound.image.net else {
            continue; // empty image: tied port stays unoccupied
        };
        let vprefix = format!("{prefix}v{k}_");
        let copy = img.with_id_prefix(&vprefix);
        for (nid, ninfo) in copy.nodes() {
            nodes.insert(nid.clone(), ninfo.clone());
        }
        for e in copy.edges() {
            edges.insert(e.clone());
        }
        let lift = |p: &Port| Port {
            node: NodeId(format!("{vprefix}{}", p.node)),
            dir: p.dir,
            index: p.index,
        };
        for e in rcopy.edges() {
            if &e.src == vid {
                // Image must offer an out tie.
                let tie = bound
                    .image
                    .out_tie
                    .as_ref()
                    .map(lift)
                    .or_else(|| {
                        copy.unoccupied_ports()
                            .into_iter()
                            .find(|p| p.dir == crate::net::Direction::Out)
                    })
                    .ok_or(Error::NoFreePortOnImage {
                        var: name.clone(),
                        dir: "out",
                    })?;
                edges.insert(Edge {
                    src: tie.node,
                    out_port: tie.index,
                    dst: e.dst.clone(),
                    in_port: e.in_port,
                });
            } else if &e.dst == vid {
                let tie = bound
                    .image
                    .in_tie
                    .as_ref()
                    .map(lift)
                    .or_else(|| {
                        copy.unoccupied_ports()
                            .into_iter()
                            .find(|p| p.dir == crate::net::Direction::In)
                    })
                    .ok_or(Error::NoFreePortOnImage {
                        var: name.clone(),
                        dir: "in",
                    })?;
                edges.insert(Edge {
                    src: e.src.clone(),
                    out_port: e.out_port,
                    dst: tie.node,
                    in_port: tie.index,
                });
            }
        }
    }

    // Boundary reconnection by tag name.
    for (tag, rport) in rcopy.tags() {
        if preform.new_boundary.contains(tag) {
            continue;
        }
        let hit = m.boundary.get(tag).ok_or_else(|| Error::BoundaryMismatch {
            rule: m.rule.clone(),
            tag: tag.clone(),
        })?;
        match &hit.outside {
            Some(q) => {
                let e = match rport.dir {
                    crate::net::Direction::In => Edge {
                        src: q.node.clone(),
                        out_port: q.index,
                        dst: rport.node.clone(),
                        in_port: rport.index,
                    },
                    crate::net::Direction::Out => Edge {
                        src: rport.node.clone(),
                        out_port: rport.index,
                        dst: q.node.clone(),
                        in_port: q.index,
                    },
                };
                edges.insert(e);
            }
            None => {
                if let Some(host_tag) = &hit.host_tag {
                    tags.insert(host_tag.clone(), rport.clone());
                }
            }
        }
    }

    let mut whole = Net::from_parts(nodes, edges, tags);
    whole.prune_tags();
    Ok(split_components(&whole).into_iter().collect())
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct DeriveResult {
    /// Every reachable net with the first step at which it appeared.
    pub reachable: Vec<(Net, usize)>,
    /// True when the final step still produced unseen nets.
    pub exhausted: bool,
    /// True when some step fired rewrites yet produced only seen nets.
    pub cycle_detected: bool,
}

impl DeriveResult {
    pub fn jungle(&self) -> Jungle {
        Jungle::from_nets(self.reachable.iter().map(|(n, _)| n.clone()))
    }
}

/// Breadth-first closure of one-step application, deduplicated by strict
/// equality.
pub fn derive(systems: &[Rns], start: &Jungle, max_steps: usize) -> Result<DeriveResult> {
    let mut seen = start.clone();
    let mut reachable: Vec<(Net, usize)> = start.iter().map(|n| (n.clone(), 0)).collect();
    let mut frontier = start.clone();
    let mut exhausted = false;
    let mut cycle_detected = false;
    for step in 1..=max_steps {
        if frontier.is_empty() {
            break;
        }
        let produced = apply_many(systems, &frontier)?;
        let mut fresh = Jungle::new();
        let mut fired_into_seen = false;
        for net in produced {
            if seen.insert(net.clone()) {
                reachable.push((net.clone(), step));
                fresh.insert(net);
            } else {
                fired_into_seen = true;
            }
        }
        if fresh.is_empty() {
            if fired_into_seen && frontier.iter().any(|n| !is_irreducible_of(systems, n)) {
                cycle_detected = true;
            }
            break;
        }
        if step == max_steps {
            // Peek whether the frontier was still growing at cutoff.
            let peek = apply_many(systems, &fresh)?;
            exhausted = peek.iter().any(|n| !seen.contains(n));
        }
        frontier = fresh;
    }
    Ok(DeriveResult {
        reachable,
        exhausted,
        cycle_detected,
    })
}

/// Operational irreducibility: one-step application returns the net itself
/// and nothing else.
pub fn is_irreducible(rns: &Rns, net: &Net) -> bool {
    is_irreducible_of(std::slice::from_ref(rns), net)
}

pub fn is_irreducible_of(systems: &[Rns], net: &Net) -> bool {
    let j = Jungle::singleton(net.clone());
    match apply_many(systems, &j) {
        Ok(out) => out.set_eq(&j),
        Err(_) => false,
    }
}

/// Reachable irreducible nets within the step budget. Errors when reducible
/// frontier nets remain at cutoff.
pub fn normal_forms(systems: &[Rns], start: &Jungle, budget: usize) -> Result<Jungle> {
    let mut out = Jungle::new();
    let mut seen = Jungle::new();
    let mut frontier: Vec<Net> = Vec::new();
    for n in start.iter() {
        seen.insert(n.clone());
        frontier.push(n.clone());
    }
    let mut steps = 0usize;
    loop {
        let mut next: Vec<Net> = Vec::new();
        for net in &frontier {
            if is_irreducible_of(systems, net) {
                out.insert(net.clone());
            } else {
                let j = Jungle::singleton(net.clone());
                for produced in apply_many(systems, &j)? {
                    if seen.insert(produced.clone()) {
                        next.push(produced);
                    }
                }
            }
        }
        if next.is_empty() {
            return Ok(out);
        }
        steps += 1;
        if steps > budget {
            return Err(Error::BudgetExhausted(budget));
        }
        frontier = next;
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::canon::{nets_equal, EqMode};
    use crate::net::fixtures::{d1, d2};
    use crate::net::{Direction, RawNet};
    use crate::rule::{Rule, RulePreform};

    fn tagged_single(letter: &str) -> Net {
        Net::validate(
            &RawNet::default()
                .node("n", letter, 2, 1)
                .tag("t0", "n", Direction::In, 0)
                .tag("t1", "n", Direction::In, 1)
                .tag("t2", "n", Direction::Out, 0),
            None,
        )
        .unwrap()
    }

    fn relabel(name: &str, from: &str, to: &str) -> Rns {
        Rns::new(
            name,
            vec![Rule::single(
                name,
                RulePreform::new(tagged_single(from), vec![tagged_single(to)]).unwrap(),
            )],
        )
    }

    pub fn d1_f_to_h() -> Net {
        Net::validate(
            &RawNet::default()
                .node("n1", "h", 2, 1)
                .node("n2", "a", 0, 1)
                .edge("n2", 0, "n1", 0),
            None,
        )
        .unwrap()
    }

    #[test]
    fn apply_r1_to_d1() {
        let rns = relabel("r1", "f", "h");
        let out = apply_rns(&rns, &Jungle::singleton(d1())).unwrap();
        assert_eq!(out.len(), 1);
        assert!(nets_equal(out.iter().next().unwrap(), &d1_f_to_h(), EqMode::Strict));
    }

    #[test]
    fn non_matching_net_passes_through() {
        let rns = relabel("r1", "f", "h");
        let out = apply_rns(&rns, &Jungle::singleton(d2())).unwrap();
        assert!(out.set_eq(&Jungle::singleton(d2())));
    }

    #[test]
    fn identity_rule_returns_host() {
        let rns = relabel("id", "f", "f");
        let out = apply_rns(&rns, &Jungle::singleton(d1())).unwrap();
        assert!(out.set_eq(&Jungle::singleton(d1())));
    }

    #[test]
    fn derive_one_step() {
        let rns = relabel("r1", "f", "h");
        let d = derive(&[rns], &Jungle::singleton(d1()), 1).unwrap();
        let expect = Jungle::from_nets([d1(), d1_f_to_h()]);
        assert!(d.jungle().set_eq(&expect));
        assert!(!d.exhausted);
    }

    #[test]
    fn derive_no_rules_is_identity() {
        let d = derive(&[], &Jungle::singleton(d1()), 5).unwrap();
        assert!(d.jungle().set_eq(&Jungle::singleton(d1())));
    }

    #[test]
    fn derive_two_way_cycle_detected() {
        let fwd = relabel("fw", "f", "h");
        let back = relabel("bk", "h", "f");
        let d = derive(&[fwd, back], &Jungle::singleton(d1()), 2).unwrap();
        let expect = Jungle::from_nets([d1(), d1_f_to_h()]);
        assert!(d.jungle().set_eq(&expect));
        assert!(d.cycle_detected);
    }

    #[test]
    fn derive_associativity() {
        let rns = relabel("r1", "f", "h");
        let both = derive(std::slice::from_ref(&rns), &Jungle::singleton(d1()), 2)
            .unwrap()
            .jungle();
        let first = derive(std::slice::from_ref(&rns), &Jungle::singleton(d1()), 1)
            .unwrap()
            .jungle();
        let second = derive(std::slice::from_ref(&rns), &first, 1).unwrap().jungle();
        assert!(both.set_eq(&second));
    }

    #[test]
    fn normal_forms_reach_irreducible() {
        let rns = relabel("r1", "f", "h");
        let nf = normal_forms(&[rns], &Jungle::singleton(d1()), 10).unwrap();
        assert!(nf.set_eq(&Jungle::singleton(d1_f_to_h())));
    }

    #[test]
    fn normal_forms_already_irreducible() {
        let rns = relabel("r1", "f", "h");
        let nf = normal_forms(&[rns], &Jungle::singleton(d2()), 10).unwrap();
        assert!(nf.set_eq(&Jungle::singleton(d2())));
    }

    #[test]
    fn growing_rule_exhausts_budget() {
        // p -> p with an extra q below a fresh in-port? p is (1,1); grow by
        // replacing p with p feeding q, keeping the interface.
        let left = Net::validate(
            &RawNet::default()
                .node("n", "p", 1, 1)
                .tag("t0", "n", Direction::In, 0)
                .tag("t1", "n", Direction::Out, 0),
            None,
        )
        .unwrap();
        let right = Net::validate(
            &RawNet::default()
                .node("n", "p", 1, 1)
                .node("m", "q", 1, 1)
                .edge("n", 0, "m", 0)
                .tag("t0", "n", Direction::In, 0)
                .tag("t1", "m", Direction::Out, 0),
            None,
        )
        .unwrap();
        let rns = Rns::new(
            "grow",
            vec![Rule::single(
                "grow",
                RulePreform::new(left, vec![right]).unwrap(),
            )],
        );
        // D2 has no unoccupied ports, but the rule's tags reconnect the loop
        // edges, so it fires forever.
        let r = normal_forms(&[rns], &Jungle::singleton(d2()), 3);
        assert!(matches!(r, Err(Error::BudgetExhausted(3))));
    }

    #[test]
    fn inverse_recovers_original() {
        let rns = relabel("r1", "f", "h");
        let fwd = apply_rns(&rns, &Jungle::singleton(d1())).unwrap();
        let inv = rns.inverted().unwrap();
        let back = apply_rns(&inv, &fwd).unwrap();
        assert!(back.set_eq(&Jungle::singleton(d1())));
    }

    #[test]
    fn variable_rule_moves_subnet() {
        // f(x at in:0) -> h(x at in:0), via variable instead of tags.
        let left = Net::validate(
            &RawNet::default()
                .node("l", "f", 2, 1)
                .var("v", "x")
                .edge("v", 0, "l", 0)
                .tag("t1", "l", Direction::In, 1)
                .tag("t2", "l", Direction::Out, 0),
            None,
        )
        .unwrap();
        let right = Net::validate(
            &RawNet::default()
                .node("r", "h", 2, 1)
                .var("v", "x")
                .edge("v", 0, "r", 0)
                .tag("t1", "r", Direction::In, 1)
                .tag("t2", "r", Direction::Out, 0),
            None,
        )
        .unwrap();
        let rns = Rns::new(
            "vr",
            vec![Rule::single(
                "vr",
                RulePreform::new(left, vec![right]).unwrap(),
            )],
        );
        let out = apply_rns(&rns, &Jungle::singleton(d1())).unwrap();
        assert_eq!(out.len(), 1);
        assert!(nets_equal(out.iter().next().unwrap(), &d1_f_to_h(), EqMode::Strict));
    }
}
