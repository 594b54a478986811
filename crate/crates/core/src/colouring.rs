//! Cross-colouring analysis: the recursive overlap computation attaching a
//! coloured jungle to each rule of a candidate system with respect to a net.

use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

use crate::alphabet::LetterKind;
use crate::canon::{self, EqMode};
use crate::enclose;
use crate::error::{Error, Result};
use crate::matching;
use crate::net::{Jungle, Net, NodeId};
use crate::partition;
use crate::prns::concept_budget;
use crate::rewrite;
use crate::rule::Rns;

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ColouredJungle {
    pub rule: String,
    pub round: usize,
    pub jungle: Jungle,
}

/// The ranked part of a rule's left side.
fn left_apex(rns: &Rns, rule_idx: usize) -> Net {
    let left = &rns.rules[rule_idx].preforms[0].left;
    let apex_nodes: BTreeSet<NodeId> = left
        .nodes()
        .filter(|(_, i)| i.kind == LetterKind::Ranked)
        .map(|(id, _)| id.clone())
        .collect();
    matching::extract(left, &apex_nodes).untagged()
}

/// Evaluates the overlap recursion. Base: the colouring normal form of each
/// left apex's overlap with `r`; step: the colouring normal form of each
/// left apex's overlap with a previously coloured jungle. Rounds are capped
/// by `budget`; exceeding it reports the non-terminating recursion.
pub fn colouring_overlaps(
    w: &Rns,
    colourings: &BTreeMap<String, Rns>,
    r: &Net,
    budget: usize,
) -> Result<Vec<ColouredJungle>> {
    let mut out: Vec<ColouredJungle> = Vec::new();
    let mut seen: BTreeSet<(String, String)> = BTreeSet::new();
    let key_of = |j: &Jungle| j.keys().collect::<Vec<_>>().join(";");

    let mut frontier: Vec<ColouredJungle> = Vec::new();
    for (ri, rule) in w.rules.iter().enumerate() {
        let Some(system) = colourings.get(&rule.name) else {
            continue;
        };
        let apex = left_apex(w, ri);
        let cap = apex.node_count().min(r.node_count());
        let shared = enclose::overlaps(&apex, r, cap)?;
        let Some(base) = shared.shared else {
            continue;
        };
        let start = Jungle::singleton(base);
        let nf = rewrite::normal_forms(
            std::slice::from_ref(system),
            &start,
            concept_budget(system, &start),
        )?;
        let cj = ColouredJungle {
            rule: rule.name.clone(),
            round: 0,
            jungle: nf,
        };
        seen.insert((cj.rule.clone(), key_of(&cj.jungle)));
        frontier.push(cj);
    }
    out.extend(frontier.iter().cloned());

    let mut round = 1usize;
    while !frontier.is_empty() {
        if round > budget {
            return Err(Error::NonTerminatingColouring(round));
        }
        let mut next: Vec<ColouredJungle> = Vec::new();
        for prev in &frontier {
            for (ri, rule) in w.rules.iter().enumerate() {
                let Some(system) = colourings.get(&rule.name) else {
                    continue;
                };
                let apex = left_apex(w, ri);
                let mut collected = Jungle::new();
                for net in prev.jungle.iter() {
                    let cap = apex.node_count().min(net.node_count());
                    if cap == 0 {
                        continue;
                    }
                    if let Some(shared) = enclose::overlaps(&apex, net, cap)?.shared {
                        collected.insert(shared);
                    }
                }
                if collected.is_empty() {
                    continue;
                }
                let nf = rewrite::normal_forms(
                    std::slice::from_ref(system),
                    &collected,
                    concept_budget(system, &collected),
                )?;
                let pair = (rule.name.clone(), key_of(&nf));
                if seen.insert(pair) {
                    let cj = ColouredJungle {
                        rule: rule.name.clone(),
                        round,
                        jungle: nf,
                    };
                    out.push(cj.clone());
                    next.push(cj);
                }
            }
        }
        frontier = next;
        round += 1;
    }
    Ok(out)
}

/// A system is cross colouring with respect to `r` when every coloured
/// jungle embeds in the corresponding rule's right apex.
pub fn is_cross_colouring(
    w: &Rns,
    colourings: &BTreeMap<String, Rns>,
    r: &Net,
    budget: usize,
) -> Result<bool> {
    let coloured = colouring_overlaps(w, colourings, r, budget)?;
    for cj in &coloured {
        let rule = w
            .rule(&cj.rule)
            .ok_or_else(|| Error::Invalid(format!("unknown rule `{}`", cj.rule)))?;
        for net in cj.jungle.iter() {
            let ok = rule.preforms.iter().any(|p| {
                p.rights
                    .iter()
                    .any(|right| enclose::is_enclosure(net, &right.untagged()))
            });
            if !ok {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

/// Totality: some `r`-embedding host whose left-apex occurrences induce a
/// partition. The host candidate checked is `r` itself.
pub fn is_total(w: &Rns, r: &Net) -> bool {
    let host = Jungle::singleton(r.clone());
    let mut memberships: Vec<BTreeSet<NodeId>> = Vec::new();
    for (ri, _) in w.rules.iter().enumerate() {
        let apex = left_apex(w, ri);
        for m in matching::find_pattern_matches(&apex, &host) {
            memberships.push(m.apex_nodes());
        }
    }
    let covered: BTreeSet<NodeId> = memberships.iter().flatten().cloned().collect();
    if !r.node_ids().all(|n| covered.contains(n)) {
        return false;
    }
    let spec = partition::induced_refinement(r, &memberships);
    partition::is_partition_of(r, &spec.blocks)
}

#[allow(unused)]
fn key(net: &Net) -> String {
    canon::canonical_key(net, EqMode::Strict)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::alphabet::FreshSupply;
    use crate::net::fixtures::d1;
    use crate::net::{Direction, RawNet};
    use crate::partition::PartitionSpec;
    use crate::prns::synthesize_prns;
    use crate::rule::{Rule, RulePreform};

    #[test]
    fn empty_base_is_vacuously_cross_colouring() {
        // A rule whose left apex shares no letters with r.
        let left = Net::validate(
            &RawNet::default()
                .node("l", "zz", 1, 1)
                .tag("t0", "l", Direction::In, 0)
                .tag("t1", "l", Direction::Out, 0),
            None,
        )
        .unwrap();
        let right = left.clone();
        let w = Rns::new(
            "w",
            vec![Rule::single(
                "rw0",
                RulePreform::new(left, vec![right]).unwrap(),
            )],
        );
        let mut colourings = BTreeMap::new();
        colourings.insert("rw0".to_string(), Rns::new("col", vec![]));
        let r = d1();
        let coloured = colouring_overlaps(&w, &colourings, &r, 8).unwrap();
        assert!(coloured.is_empty());
        assert!(is_cross_colouring(&w, &colourings, &r, 8).unwrap());
    }

    #[test]
    fn whole_net_rule_colours_to_contraction() {
        // Rule whose left apex equals r; colouring system contracts r to a
        // single fresh node; right apex contains that node.
        let r = d1();
        let spec = PartitionSpec::parse(&r, "n1,n2").unwrap();
        let mut fresh = FreshSupply::new("%", "c");
        let col = synthesize_prns(&r, &spec, &mut fresh).unwrap();
        let contracted = crate::prns::concept(&col.rns, &Jungle::singleton(r.clone()))
            .unwrap()
            .iter()
            .next()
            .unwrap()
            .clone();
        let w = Rns::new(
            "w",
            vec![Rule::single(
                "rw0",
                RulePreform::new(r.clone(), vec![contracted.clone()]).unwrap(),
            )],
        );
        let mut colourings = BTreeMap::new();
        colourings.insert("rw0".to_string(), col.rns.clone());
        let coloured = colouring_overlaps(&w, &colourings, &r, 8).unwrap();
        assert_eq!(coloured.len(), 1);
        assert!(coloured[0]
            .jungle
            .set_eq(&Jungle::singleton(contracted.clone())));
        assert!(is_cross_colouring(&w, &colourings, &r, 8).unwrap());
        assert!(is_total(&w, &r));
    }

    #[test]
    fn coloured_jungle_outside_right_apex_fails() {
        let r = d1();
        let spec = PartitionSpec::parse(&r, "n1,n2").unwrap();
        let mut fresh = FreshSupply::new("%", "c");
        let col = synthesize_prns(&r, &spec, &mut fresh).unwrap();
        // Right apex unrelated to the contraction.
        let right = Net::validate(&RawNet::default().node("z", "zz", 1, 1), None).unwrap();
        let w = Rns::new(
            "w",
            vec![Rule::single(
                "rw0",
                RulePreform::new(r.clone(), vec![right]).unwrap(),
            )],
        );
        let mut colourings = BTreeMap::new();
        colourings.insert("rw0".to_string(), col.rns);
        assert!(!is_cross_colouring(&w, &colourings, &r, 8).unwrap());
    }
}
