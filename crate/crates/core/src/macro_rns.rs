//! Macro/micro rewriting: lifting a substance-level system to the concept
//! level over a contraction system, solving back, and verifying the
//! commuting equation between the two routes.

use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

use crate::alphabet::FreshSupply;
use crate::canon;
use crate::error::{Error, Result};
use crate::matching::{self, Match};
use crate::net::{Direction, Edge, Jungle, Net, NodeId, NodeInfo, Port, RawNet};
use crate::prns::{concept_budget, contract_with_provenance, BlockTrace, Prns};
use crate::rewrite::normal_forms;
use crate::rule::{Condition, Rns, Rule, RulePreform};

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct MacroProvenance {
    pub micro_rule: String,
    pub micro_preform: usize,
    /// Names of the contraction rules whose blocks the redex consumed.
    pub blocks: Vec<String>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct MacroResult {
    /// The concept-level system: expansion rules for straddled blocks first,
    /// then the lifted rules, sequenced by an apply-order demand.
    pub macro_rns: Rns,
    /// The contraction actually used on the way up (the given one).
    pub pre_prns: Prns,
    /// The contraction of the rewrite result.
    pub post_prns: Prns,
    pub provenance: BTreeMap<String, MacroProvenance>,
}

/// Boundary ports of a node group inside `t`: ports unoccupied in `t` plus
/// endpoints of edges leaving the group.
fn group_boundary(t: &Net, nodes: &BTreeSet<NodeId>) -> Vec<Port> {
    let mut out = Vec::new();
    for id in nodes {
        let info = t.info(id).unwrap();
        for i in 0..info.in_rank {
            let p = Port::new(id, Direction::In, i);
            match t.edge_at(&p) {
                None => out.push(p),
                Some(e) => {
                    if !nodes.contains(&e.src) {
                        out.push(p);
                    }
                }
            }
        }
        for i in 0..info.out_rank {
            let p = Port::new(id, Direction::Out, i);
            match t.edge_at(&p) {
                None => out.push(p),
                Some(e) => {
                    if !nodes.contains(&e.dst) {
                        out.push(p);
                    }
                }
            }
        }
    }
    out.sort();
    out
}

/// One quotient node: the group's nodes, its letter, and the placement of
/// every boundary t-port on the quotient node.
#[derive(Debug, Clone)]
struct GroupSpec {
    nodes: BTreeSet<NodeId>,
    letter: String,
    ports: BTreeMap<Port, (Direction, usize)>,
    in_rank: usize,
    out_rank: usize,
}

impl GroupSpec {
    /// Sorted-port convention: in-ports first by port order, then outs.
    fn sorted(t: &Net, nodes: BTreeSet<NodeId>, letter: String) -> GroupSpec {
        let boundary = group_boundary(t, &nodes);
        let mut ports = BTreeMap::new();
        let mut ins = 0usize;
        let mut outs = 0usize;
        for p in boundary {
            match p.dir {
                Direction::In => {
                    ports.insert(p, (Direction::In, ins));
                    ins += 1;
                }
                Direction::Out => {
                    ports.insert(p, (Direction::Out, outs));
                    outs += 1;
                }
            }
        }
        GroupSpec {
            nodes,
            letter,
            ports,
            in_rank: ins,
            out_rank: outs,
        }
    }
}

/// Quotient of the region covered by the groups: one node per group, edges
/// between groups preserved through the port placements. Ports whose t-port
/// leads outside the region stay unoccupied.
fn quotient_region(t: &Net, groups: &[GroupSpec]) -> Result<(Net, BTreeMap<Port, Port>)> {
    let mut nodes: BTreeMap<NodeId, NodeInfo> = BTreeMap::new();
    let mut port_map: BTreeMap<Port, Port> = BTreeMap::new();
    let mut owner: BTreeMap<NodeId, usize> = BTreeMap::new();
    for (gi, g) in groups.iter().enumerate() {
        let qid = NodeId(format!("g{gi}"));
        nodes.insert(
            qid.clone(),
            NodeInfo {
                letter: g.letter.clone(),
                in_rank: g.in_rank,
                out_rank: g.out_rank,
                kind: crate::alphabet::LetterKind::Ranked,
            },
        );
        for n in &g.nodes {
            owner.insert(n.clone(), gi);
        }
        for (tp, &(dir, idx)) in &g.ports {
            port_map.insert(tp.clone(), Port::new(&qid, dir, idx));
        }
    }
    let mut edges: BTreeSet<Edge> = BTreeSet::new();
    for e in t.edges() {
        let so = owner.get(&e.src);
        let d_o = owner.get(&e.dst);
        match (so, d_o) {
            (Some(a), Some(b)) if a != b => {
                let sp = port_map
                    .get(&Port::new(&e.src, Direction::Out, e.out_port))
                    .ok_or_else(|| Error::Invalid("unplaced quotient port".into()))?;
                let dp = port_map
                    .get(&Port::new(&e.dst, Direction::In, e.in_port))
                    .ok_or_else(|| Error::Invalid("unplaced quotient port".into()))?;
                edges.insert(Edge {
                    src: sp.node.clone(),
                    out_port: sp.index,
                    dst: dp.node.clone(),
                    in_port: dp.index,
                });
            }
            _ => {}
        }
    }
    Ok((Net::from_parts(nodes, edges, BTreeMap::new()), port_map))
}

/// For a consumed block, the placement of its boundary t-ports on the
/// concept node, read off the contraction rule's tag wiring.
fn concept_port_assignment(
    t: &Net,
    w: &Prns,
    trace: &BlockTrace,
) -> Result<BTreeMap<Port, (Direction, usize)>> {
    let rule = w
        .rns
        .rule(&trace.rule)
        .ok_or_else(|| Error::Invalid(format!("missing contraction rule `{}`", trace.rule)))?;
    let preform = &rule.preforms[0];
    let host = Jungle::singleton(t.clone());
    let m = matching::find_rule_matches(rule, &host)
        .into_iter()
        .find(|m| m.apex_nodes() == trace.host_nodes)
        .ok_or_else(|| {
            Error::Invalid(format!(
                "contraction rule `{}` no longer matches its block",
                trace.rule
            ))
        })?;
    let right = &preform.rights[0];
    let mut out = BTreeMap::new();
    for (tag, lport) in preform.left.tags() {
        let hp = Port::new(&m.node_map[&lport.node], lport.dir, lport.index);
        let rport = right
            .tag_port(tag)
            .ok_or_else(|| Error::BoundaryMismatch {
                rule: trace.rule.clone(),
                tag: tag.clone(),
            })?;
        out.insert(hp, (rport.dir, rport.index));
    }
    Ok(out)
}

fn connected_components_of(t: &Net, nodes: &BTreeSet<NodeId>) -> Vec<BTreeSet<NodeId>> {
    let mut remaining = nodes.clone();
    let mut out = Vec::new();
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
        out.push(comp);
    }
    out
}

/// Builds the concept-level macro of `micro` with respect to `w` on `t`,
/// together with the contraction of the rewrite result. The construction
/// covers redexes made of whole blocks and the single-level split of
/// straddled blocks; richer configurations are routed to verify-only.
pub fn build_macro(
    micro: &Rns,
    w: &Prns,
    t: &Net,
    fresh: &mut FreshSupply,
) -> Result<MacroResult> {
    if micro.is_conditional() {
        return Err(Error::ConstructionUnsupported(
            "micro system carries conditional demands".into(),
        ));
    }
    for (_, p) in micro.preforms() {
        if !p.left_variables().is_empty() || !p.right_variables().is_empty() {
            return Err(Error::ConstructionUnsupported(
                "variable preforms are routed to verify-only workflows".into(),
            ));
        }
        if p.rights.len() != 1 {
            return Err(Error::ConstructionUnsupported(
                "jungle right sides are routed to verify-only workflows".into(),
            ));
        }
    }
    fresh.avoid(t.letters());
    fresh.avoid(w.concept_letters());
    fresh.avoid(micro.left_letters());
    fresh.avoid(micro.right_letters());

    let contraction = contract_with_provenance(&w.rns, t)?;
    let concept_net = &contraction.concept;
    let host = Jungle::singleton(t.clone());

    // Letter multiplicity in the concept: straddled blocks must be uniquely
    // addressable for expansion.
    let mut letter_count: BTreeMap<String, usize> = BTreeMap::new();
    for (_, info) in concept_net.nodes() {
        *letter_count.entry(info.letter.clone()).or_insert(0) += 1;
    }

    let mut expansion_rules: Vec<Rule> = Vec::new();
    let mut main_rules: Vec<Rule> = Vec::new();
    let mut post_rules: Vec<Rule> = Vec::new();
    let mut post_block_map: BTreeMap<String, (Net, String)> = BTreeMap::new();
    let mut post_seen: BTreeMap<String, String> = BTreeMap::new();
    let mut provenance: BTreeMap<String, MacroProvenance> = BTreeMap::new();
    // Per straddled block: the split group specs, shared between the
    // expansion rule and every macro left that uses them.
    let mut splits: BTreeMap<String, Vec<GroupSpec>> = BTreeMap::new();
    let mut straddled: BTreeSet<String> = BTreeSet::new();

    let mut push_post_rule = |left: Net, letter_hint: &str, fresh: &mut FreshSupply| -> Result<String> {
        let key = canon::canonical_key_tagged(&left.with_id_prefix("k_"));
        if let Some(existing) = post_seen.get(&key) {
            return Ok(existing.clone());
        }
        let letter = format!("{letter_hint}");
        let right = crate::prns::contraction_node(&left, &letter)?;
        let name = format!("post{}", post_rules.len());
        post_rules.push(Rule::single(
            &name,
            RulePreform::strict_interface(left.clone(), vec![right], &name)?,
        ));
        post_seen.insert(key, letter.clone());
        post_block_map.insert(name, (left, letter.clone()));
        let _ = fresh;
        Ok(letter)
    };

    for (mi_rule, micro_rule) in micro.rules.iter().enumerate() {
        for m in matching::find_rule_matches(micro_rule, &host) {
            let preform = &micro_rule.preforms[m.preform];
            if !matching::executable(&m, preform) {
                continue;
            }
            let redex = m.redex_nodes();
            let mut inside: Vec<&BlockTrace> = Vec::new();
            let mut straddle: Vec<&BlockTrace> = Vec::new();
            for b in &contraction.blocks {
                let inter: BTreeSet<_> = b.host_nodes.intersection(&redex).collect();
                if inter.is_empty() {
                    continue;
                }
                if inter.len() == b.host_nodes.len() {
                    inside.push(b);
                } else {
                    straddle.push(b);
                }
            }

            // Group specs for the macro left: whole blocks keep the concept
            // wiring, straddled blocks contribute their redex-side split
            // components.
            let mut left_groups: Vec<GroupSpec> = Vec::new();
            for b in &inside {
                let assignment = concept_port_assignment(t, w, b)?;
                let info = concept_net
                    .info(&b.concept_node)
                    .ok_or_else(|| Error::Invalid("stale concept node".into()))?;
                left_groups.push(GroupSpec {
                    nodes: b.host_nodes.clone(),
                    letter: info.letter.clone(),
                    in_rank: info.in_rank,
                    out_rank: info.out_rank,
                    ports: assignment,
                });
            }
            for b in &straddle {
                let info = concept_net
                    .info(&b.concept_node)
                    .ok_or_else(|| Error::Invalid("stale concept node".into()))?;
                if letter_count[&info.letter] > 1 {
                    return Err(Error::RedexStraddlesUnsupported(format!(
                        "block letter `{}` is not unique in the concept",
                        info.letter
                    )));
                }
                let split = match splits.get(&b.rule) {
                    Some(s) => s.clone(),
                    None => {
                        let a_side: BTreeSet<NodeId> = b
                            .host_nodes
                            .intersection(&redex)
                            .cloned()
                            .collect();
                        let b_side: BTreeSet<NodeId> =
                            b.host_nodes.difference(&a_side).cloned().collect();
                        let mut groups = Vec::new();
                        for comp in connected_components_of(t, &a_side) {
                            groups.push(GroupSpec::sorted(t, comp, fresh.mint()));
                        }
                        let redex_groups = groups.len();
                        for comp in connected_components_of(t, &b_side) {
                            groups.push(GroupSpec::sorted(t, comp, fresh.mint()));
                        }
                        if redex_groups == 0 || redex_groups == groups.len() {
                            return Err(Error::RedexStraddlesUnsupported(
                                "degenerate block split".into(),
                            ));
                        }
                        // Expansion rule: the block's concept node opens into
                        // its split.
                        let assignment = concept_port_assignment(t, w, b)?;
                        let info = concept_net.info(&b.concept_node).unwrap();
                        // Tag names per boundary t-port, shared by both
                        // sides.
                        let mut tag_names: BTreeMap<Port, String> = BTreeMap::new();
                        for (i, tp) in assignment.keys().enumerate() {
                            tag_names.insert(tp.clone(), format!("s{i}"));
                        }
                        let mut raw = RawNet::default().node(
                            "e0",
                            &info.letter,
                            info.in_rank,
                            info.out_rank,
                        );
                        for (tp, &(dir, idx)) in &assignment {
                            raw = raw.tag(&tag_names[tp], "e0", dir, idx);
                        }
                        let eleft = Net::validate(&raw, None)?;
                        let (eright_raw, pmap) = quotient_region(t, &groups)?;
                        let mut tags: BTreeMap<String, Port> = BTreeMap::new();
                        for (tp, name) in &tag_names {
                            let qp = pmap.get(tp).ok_or_else(|| {
                                Error::RedexStraddlesUnsupported(
                                    "boundary port lost in split".into(),
                                )
                            })?;
                            tags.insert(name.clone(), qp.clone());
                        }
                        let eright = Net::from_parts(
                            eright_raw.nodes().map(|(i, n)| (i.clone(), n.clone())).collect(),
                            eright_raw.edges().cloned().collect(),
                            tags,
                        );
                        let ename = format!("open{}", expansion_rules.len());
                        expansion_rules.push(Rule::single(
                            &ename,
                            RulePreform::strict_interface(eleft, vec![eright], &ename)?,
                        ));
                        splits.insert(b.rule.clone(), groups.clone());
                        straddled.insert(b.rule.clone());
                        groups
                    }
                };
                for (gi, g) in split.iter().enumerate() {
                    // Only redex-side components join the macro left; they
                    // are exactly those inside the redex.
                    if g.nodes.iter().all(|n| redex.contains(n)) {
                        left_groups.push(split[gi].clone());
                    }
                }
            }

            let (left_raw, left_pmap) = quotient_region(t, &left_groups)?;
            // Tag every unoccupied quotient port; remember t-port -> name.
            let mut left_tags: BTreeMap<String, Port> = BTreeMap::new();
            let mut name_of_tport: BTreeMap<Port, String> = BTreeMap::new();
            {
                let mut i = 0usize;
                // Deterministic order over the port map.
                for (tp, qp) in &left_pmap {
                    if left_raw.is_occupied(qp) {
                        continue;
                    }
                    let name = format!("m{i}");
                    i += 1;
                    left_tags.insert(name.clone(), qp.clone());
                    name_of_tport.insert(tp.clone(), name);
                }
            }
            let macro_left = Net::from_parts(
                left_raw.nodes().map(|(i, n)| (i.clone(), n.clone())).collect(),
                left_raw.edges().cloned().collect(),
                left_tags,
            );

            // The inserted right-side instance and its contraction.
            let right_instance = preform.rights[0].clone();
            let comps = connected_components_of(
                &right_instance,
                &right_instance.node_ids().cloned().collect(),
            );
            let mut right_groups: Vec<GroupSpec> = Vec::new();
            for comp in comps {
                right_groups.push(GroupSpec::sorted(
                    &right_instance,
                    comp,
                    String::new(), // letter assigned via the post rule below
                ));
            }
            // Post-contraction rules: one per component pattern.
            for g in &mut right_groups {
                let pattern = crate::enclose::induced_block_pattern(&right_instance, &g.nodes)?;
                let hint = fresh.mint();
                let letter = push_post_rule(pattern, &hint, fresh)?;
                g.letter = letter;
            }
            let (right_raw, right_pmap) = quotient_region(&right_instance, &right_groups)?;
            // Tags on the macro right: interface tags flow through the
            // micro preform's boundary; new-boundary tags get fresh names.
            let mut right_tags: BTreeMap<String, Port> = BTreeMap::new();
            let mut fresh_tag = 0usize;
            for (tag, rport) in right_instance.tags() {
                let qp = right_pmap
                    .get(&Port::new(&rport.node, rport.dir, rport.index))
                    .ok_or_else(|| Error::Invalid("right tag port lost in quotient".into()))?;
                if preform.new_boundary.contains(tag) {
                    right_tags.insert(format!("n{fresh_tag}"), qp.clone());
                    fresh_tag += 1;
                    continue;
                }
                // The left-side host port this tag reconnects through.
                let lport = preform.left.tag_port(tag).ok_or_else(|| {
                    Error::BoundaryMismatch {
                        rule: micro_rule.name.clone(),
                        tag: tag.clone(),
                    }
                })?;
                let hp = Port::new(&m.node_map[&lport.node], lport.dir, lport.index);
                let Some(name) = name_of_tport.get(&hp) else {
                    return Err(Error::RedexStraddlesUnsupported(
                        "interface port not on the region boundary".into(),
                    ));
                };
                right_tags.insert(name.clone(), qp.clone());
            }
            let macro_right = Net::from_parts(
                right_raw.nodes().map(|(i, n)| (i.clone(), n.clone())).collect(),
                right_raw.edges().cloned().collect(),
                right_tags,
            );

            let name = format!("lift{}", main_rules.len());
            let preform_built = RulePreform::new(macro_left, vec![macro_right])?;
            // Deduplicate identical lifted rules (same redex shape).
            let built_key = format!(
                "{}|{}",
                canon::canonical_key_tagged(&preform_built.left.with_id_prefix("k_")),
                canon::canonical_key_tagged(&preform_built.rights[0].with_id_prefix("k_"))
            );
            if main_rules.iter().any(|r| {
                let p = &r.preforms[0];
                format!(
                    "{}|{}",
                    canon::canonical_key_tagged(&p.left.with_id_prefix("k_")),
                    canon::canonical_key_tagged(&p.rights[0].with_id_prefix("k_"))
                ) == built_key
            }) {
                continue;
            }
            provenance.insert(
                name.clone(),
                MacroProvenance {
                    micro_rule: micro_rule.name.clone(),
                    micro_preform: m.preform,
                    blocks: inside
                        .iter()
                        .chain(straddle.iter())
                        .map(|b| b.rule.clone())
                        .collect(),
                },
            );
            let _ = mi_rule;
            main_rules.push(Rule::single(&name, preform_built));
        }
    }

    if main_rules.is_empty() && !micro.rules.is_empty() {
        // No applicable rule: the macro is empty and the equation holds with
        // both sides the contraction round trip.
    }

    // Post system: contraction of the rewrite result = untouched blocks
    // plus split context parts plus inserted-material contractions.
    for b in &contraction.blocks {
        if straddled.contains(&b.rule) {
            continue;
        }
        let rule = w.rns.rule(&b.rule).unwrap();
        if post_rules.iter().any(|r| r.name == rule.name) {
            continue;
        }
        post_rules.push(rule.clone());
        let (pat, letter) = w.block_map[&b.rule].clone();
        post_block_map.insert(b.rule.clone(), (pat, letter));
    }
    for (block_rule, groups) in &splits {
        for (gi, g) in groups.iter().enumerate() {
            let pattern = crate::enclose::induced_block_pattern(t, &g.nodes)?;
            // The split piece's contraction must reuse the letters the
            // expansion rule minted, with the same port placement.
            let mut raw = RawNet::default().node("c0", &g.letter, g.in_rank, g.out_rank);
            for (tp, &(dir, idx)) in &g.ports {
                let tag = pattern
                    .tag_of_port(tp)
                    .ok_or_else(|| Error::Invalid("split boundary lost a tag".into()))?;
                raw = raw.tag(tag, "c0", dir, idx);
            }
            let right = Net::validate(&raw, None)?;
            let name = format!("split_{block_rule}_{gi}");
            post_block_map.insert(name.clone(), (pattern.clone(), g.letter.clone()));
            post_rules.push(Rule::single(
                &name,
                RulePreform::strict_interface(pattern, vec![right], &name)?,
            ));
        }
    }

    let mut order: Vec<String> = expansion_rules.iter().map(|r| r.name.clone()).collect();
    order.extend(main_rules.iter().map(|r| r.name.clone()));
    let mut all_rules = expansion_rules;
    all_rules.extend(main_rules);
    let macro_rns = Rns::new("macro", all_rules).with_conditions(if order.is_empty() {
        vec![]
    } else {
        vec![Condition::ApplyOrder(order)]
    })?;

    let post_rns = Rns::new("post", post_rules).with_conditions(vec![Condition::FreshLetters])?;
    let post_prns = Prns {
        rns: post_rns,
        block_map: post_block_map,
    };

    let result = MacroResult {
        macro_rns,
        pre_prns: w.clone(),
        post_prns,
        provenance,
    };

    // The construction is only returned when its equation verifies on the
    // net it was built for.
    let budget = verify_budget(micro, w, t);
    let check = verify_macro_equation(
        &result.pre_prns.rns,
        &result.macro_rns,
        &result.post_prns.rns,
        micro,
        &Jungle::singleton(t.clone()),
        budget,
    )?;
    if !check.holds {
        return Err(Error::ConstructionUnsupported(
            "macro equation failed on the build net".into(),
        ));
    }
    Ok(result)
}

fn verify_budget(micro: &Rns, w: &Prns, t: &Net) -> usize {
    let j = Jungle::singleton(t.clone());
    concept_budget(&w.rns, &j) + concept_budget(micro, &j) + t.node_count() + 8
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct VerifyOutcome {
    pub holds: bool,
    pub left: Jungle,
    pub right: Jungle,
}

/// The commuting check: contraction, macro normal forms and inverse
/// post-contraction against the direct micro normal forms. Works for any
/// intervening systems, partition-based or not.
pub fn verify_macro_equation(
    w: &Rns,
    macro_rns: &Rns,
    w0: &Rns,
    micro: &Rns,
    t: &Jungle,
    budget: usize,
) -> Result<VerifyOutcome> {
    let up = normal_forms(std::slice::from_ref(w), t, budget)?;
    let rewritten = normal_forms(std::slice::from_ref(macro_rns), &up, budget)?;
    let w0_inv = w0.inverted()?;
    let left = normal_forms(&[w0_inv], &rewritten, budget)?;
    let right = normal_forms(std::slice::from_ref(micro), t, budget)?;
    Ok(VerifyOutcome {
        holds: left.set_eq(&right),
        left,
        right,
    })
}

/// Solves the substance-level system from a macro: each lifted preform's
/// sides are sent down through the inverse contractions. Preforms solving
/// to identities (the expansion bookkeeping) are dropped.
pub fn solve_micro(macro_rns: &Rns, w: &Prns, w0: &Prns) -> Result<Rns> {
    let concept_letters = w.concept_letters();
    let post_letters = w0.concept_letters();
    let w_inv = w.rns.inverted()?;
    let w0_inv = w0.rns.inverted()?;
    let mut rules = Vec::new();
    for (rule, p) in macro_rns.preforms() {
        for l in p.left.ranked_letters() {
            if !concept_letters.contains(&l) && !post_letters.contains(&l) {
                return Err(Error::NotInConceptAlphabet(l));
            }
        }
        let left_j = Jungle::singleton(p.left.clone());
        let lb = concept_budget(&w_inv, &left_j) + 4;
        let left_down = normal_forms(std::slice::from_ref(&w_inv), &left_j, lb)?;
        if left_down.len() != 1 {
            return Err(Error::Invalid(
                "macro left does not solve to a single substance net".into(),
            ));
        }
        let left = left_down.iter().next().unwrap().clone();
        let mut rights = Vec::new();
        for r in &p.rights {
            let rj = Jungle::singleton(r.clone());
            let rb = concept_budget(&w0_inv, &rj) + 4;
            let down = normal_forms(std::slice::from_ref(&w0_inv), &rj, rb)?;
            if down.len() != 1 {
                return Err(Error::Invalid(
                    "macro right does not solve to a single substance net".into(),
                ));
            }
            rights.push(down.iter().next().unwrap().clone());
        }
        // Skip identity bookkeeping (expansion rules solve to themselves).
        if rights.len() == 1
            && canon::canonical_key_tagged(&left.with_id_prefix("k_"))
                == canon::canonical_key_tagged(&rights[0].with_id_prefix("k_"))
        {
            continue;
        }
        let name = format!("{}_solved", rule.name);
        rules.push(Rule::single(&name, RulePreform::new(left, rights)?));
    }
    Rns::new("micro-solved", rules).with_conditions(vec![])
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::net::fixtures::d1;
    use crate::partition::PartitionSpec;
    use crate::prns::synthesize_prns;
    use crate::rewrite::apply_rns;
    use crate::rule::tests_support::r1_rns;

    fn fixture(partition: &str) -> (Net, Prns, Rns, FreshSupply) {
        let t = d1();
        let mut fresh = FreshSupply::new("%", "c");
        let spec = PartitionSpec::parse(&t, partition).unwrap();
        let w = synthesize_prns(&t, &spec, &mut fresh).unwrap();
        (t, w, r1_rns(), fresh)
    }

    #[test]
    fn one_block_macro_verifies() {
        let (t, w, micro, mut fresh) = fixture("n1,n2");
        let built = build_macro(&micro, &w, &t, &mut fresh).unwrap();
        // Straddled block: one expansion rule plus one lifted rule.
        assert_eq!(built.macro_rns.rules.len(), 2);
        let check = verify_macro_equation(
            &built.pre_prns.rns,
            &built.macro_rns,
            &built.post_prns.rns,
            &micro,
            &Jungle::singleton(t),
            64,
        )
        .unwrap();
        assert!(check.holds, "left {:?} right {:?}", check.left.len(), check.right.len());
    }

    #[test]
    fn two_block_macro_verifies() {
        let (t, w, micro, mut fresh) = fixture("n1|n2");
        let built = build_macro(&micro, &w, &t, &mut fresh).unwrap();
        // Redex is exactly the {n1} block: no expansions.
        assert_eq!(built.macro_rns.rules.len(), 1);
        assert_eq!(built.provenance.len(), 1);
        let check = verify_macro_equation(
            &built.pre_prns.rns,
            &built.macro_rns,
            &built.post_prns.rns,
            &micro,
            &Jungle::singleton(t),
            64,
        )
        .unwrap();
        assert!(check.holds);
    }

    #[test]
    fn non_matching_micro_gives_empty_macro() {
        let t = crate::net::fixtures::d2();
        let mut fresh = FreshSupply::new("%", "c");
        let spec = PartitionSpec::parse(&t, "n1,n2").unwrap();
        let w = synthesize_prns(&t, &spec, &mut fresh).unwrap();
        let micro = r1_rns();
        let built = build_macro(&micro, &w, &t, &mut fresh).unwrap();
        assert!(built.macro_rns.rules.is_empty());
        let check = verify_macro_equation(
            &built.pre_prns.rns,
            &built.macro_rns,
            &built.post_prns.rns,
            &micro,
            &Jungle::singleton(t),
            64,
        )
        .unwrap();
        assert!(check.holds);
    }

    #[test]
    fn identity_macro_fails_against_rewriting_micro() {
        let (t, w, micro, mut fresh) = fixture("n1|n2");
        let built = build_macro(&micro, &w, &t, &mut fresh).unwrap();
        // Replace the macro by an empty system: the left route now returns
        // the substance unchanged while the micro rewrites.
        let idle = Rns::new("idle", vec![]);
        let check = verify_macro_equation(
            &built.pre_prns.rns,
            &idle,
            &built.pre_prns.rns,
            &micro,
            &Jungle::singleton(t),
            64,
        )
        .unwrap();
        assert!(!check.holds);
    }

    #[test]
    fn pure_roundtrip_with_empty_systems() {
        let (t, w, _micro, _) = fixture("n1|n2");
        let idle = Rns::new("idle", vec![]);
        let check = verify_macro_equation(
            &w.rns,
            &idle,
            &w.rns,
            &idle,
            &Jungle::singleton(t),
            64,
        )
        .unwrap();
        assert!(check.holds);
    }

    #[test]
    fn solve_micro_recovers_micro_extensionally() {
        let (t, w, micro, mut fresh) = fixture("n1|n2");
        let built = build_macro(&micro, &w, &t, &mut fresh).unwrap();
        let solved = solve_micro(&built.macro_rns, &built.pre_prns, &built.post_prns).unwrap();
        let host = Jungle::singleton(t);
        let a = apply_rns(&micro, &host).unwrap();
        let b = apply_rns(&solved, &host).unwrap();
        assert!(a.set_eq(&b));
    }

    #[test]
    fn empty_macro_solves_to_empty_micro() {
        let (_, w, _, _) = fixture("n1|n2");
        let empty = Rns::new("empty", vec![]);
        let solved = solve_micro(&empty, &w, &w).unwrap();
        assert!(solved.rules.is_empty());
    }
}
