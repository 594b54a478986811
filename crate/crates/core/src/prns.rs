//! Partition and cover renetting systems: synthesis from a partition,
//! type validation, concept computation and round trips.

use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

use crate::alphabet::FreshSupply;
use crate::canon;
use crate::enclose::{self, induced_block_pattern};
use crate::error::{Error, Result};
use crate::hom::enumerate_nets;
use crate::matching;
use crate::net::{Direction, Jungle, Net, NodeId, Port, RawNet};
use crate::partition::PartitionSpec;
use crate::rewrite;
use crate::rule::{classify_rule, Condition, Label, Rns, Rule, RulePreform};

/// A validated partition renetting system: every rule contracts one block
/// pattern into a single fresh-letter node carrying the same tags.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Prns {
    pub rns: Rns,
    /// rule name -> (block pattern, concept letter)
    pub block_map: BTreeMap<String, (Net, String)>,
}

/// A cover renetting system; the witness host is the jungle the subject
/// embeds into when the subject itself carries no redex.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Crns {
    pub rns: Rns,
    pub witness_host: Option<Net>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum RnsKind {
    Prns,
    Gprns,
    Crns,
    Gcrns,
    GcdRns,
}

impl std::str::FromStr for RnsKind {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "prns" => Ok(RnsKind::Prns),
            "gprns" => Ok(RnsKind::Gprns),
            "crns" => Ok(RnsKind::Crns),
            "gcrns" => Ok(RnsKind::Gcrns),
            "gcdrns" => Ok(RnsKind::GcdRns),
            other => Err(Error::Invalid(format!("unknown system kind `{other}`"))),
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ConditionReport {
    pub name: String,
    pub passed: bool,
    pub counterexamples: Vec<String>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ValidationReport {
    pub kind: RnsKind,
    pub passed: bool,
    pub conditions: Vec<ConditionReport>,
}

impl ValidationReport {
    fn push(&mut self, name: &str, passed: bool, counterexamples: Vec<String>) {
        self.passed &= passed;
        self.conditions.push(ConditionReport {
            name: name.to_string(),
            passed,
            counterexamples,
        });
    }
}

/// Builds the contraction system of a partition: one rule per distinct block
/// pattern, each rewriting the block to a single fresh-letter node whose
/// ports are exactly the block's tags.
pub fn synthesize_prns(c: &Net, blocks: &PartitionSpec, fresh: &mut FreshSupply) -> Result<Prns> {
    // PartitionSpec::new has already checked the partition laws when the
    // spec was built; re-check against this net.
    let spec = PartitionSpec::new(c, blocks.blocks.clone())?;
    fresh.avoid(c.letters());
    let mut rules: Vec<Rule> = Vec::new();
    let mut block_map: BTreeMap<String, (Net, String)> = BTreeMap::new();
    let mut seen: BTreeMap<String, String> = BTreeMap::new(); // tagged key -> rule name
    for block in &spec.blocks {
        let left = induced_block_pattern(c, block)?;
        let key = canon::canonical_key_tagged(&left.with_id_prefix("k_"));
        if seen.contains_key(&key) {
            continue;
        }
        let letter = fresh.mint();
        let right = contraction_node(&left, &letter)?;
        let name = format!("blk{}", rules.len());
        rules.push(Rule::single(
            &name,
            RulePreform::strict_interface(left.clone(), vec![right], &name)?,
        ));
        seen.insert(key, name.clone());
        block_map.insert(name, (left, letter));
    }
    let rns = Rns::new("prns", rules).with_conditions(vec![Condition::FreshLetters])?;
    Ok(Prns { rns, block_map })
}

/// The single fresh node carrying exactly the pattern's tags, in-tags at
/// indices 0.. in name order, out-tags likewise.
pub fn contraction_node(pattern: &Net, letter: &str) -> Result<Net> {
    let mut ins: Vec<&str> = Vec::new();
    let mut outs: Vec<&str> = Vec::new();
    for (name, port) in pattern.tags() {
        match port.dir {
            Direction::In => ins.push(name),
            Direction::Out => outs.push(name),
        }
    }
    let mut raw = RawNet::default().node("c0", letter, ins.len(), outs.len());
    for (i, t) in ins.iter().enumerate() {
        raw = raw.tag(t, "c0", Direction::In, i);
    }
    for (i, t) in outs.iter().enumerate() {
        raw = raw.tag(t, "c0", Direction::Out, i);
    }
    Net::validate(&raw, None)
}

fn subject_letters(subject: &Jungle) -> BTreeSet<String> {
    subject.iter().flat_map(|n| n.letters()).collect()
}

/// Per-condition validation of a system against a kind and subject.
pub fn validate_rns_type(
    rns: &Rns,
    kind: RnsKind,
    subject: &Jungle,
    witness_host: Option<&Net>,
    search_bound: usize,
) -> ValidationReport {
    let mut report = ValidationReport {
        kind,
        passed: true,
        conditions: Vec::new(),
    };
    let subj_letters = subject_letters(subject);

    // (i) mightiness saving (manoeuvre relaxed to non-deleting for the
    // generalized kinds), never instance sensitive by construction.
    let mut bad_manoeuvre = Vec::new();
    let mut bad_arity = Vec::new();
    for rule in &rns.rules {
        let cls = classify_rule(rule, 1);
        let manoeuvre_ok = match kind {
            RnsKind::Prns | RnsKind::Crns => cls.has(Label::ManoeuvreMightinessSaving),
            RnsKind::Gprns | RnsKind::Gcrns | RnsKind::GcdRns => {
                !cls.has(Label::ManoeuvreDeleting)
            }
        };
        if !manoeuvre_ok {
            bad_manoeuvre.push(rule.name.clone());
        }
        if !cls.has(Label::ArityMightinessSaving) {
            bad_arity.push(rule.name.clone());
        }
    }
    let manoeuvre_name = match kind {
        RnsKind::Prns | RnsKind::Crns => "manoeuvre mightiness saving",
        _ => "not manoeuvre deleting",
    };
    report.push(manoeuvre_name, bad_manoeuvre.is_empty(), bad_manoeuvre);
    report.push("arity mightiness saving", bad_arity.is_empty(), bad_arity);

    // (ii) right sides introduce exactly one letter (partition kinds),
    // outside the subject, and left -> right is injective.
    let single_right_letter = matches!(kind, RnsKind::Prns | RnsKind::Gprns);
    let mut bad_singleton = Vec::new();
    let mut bad_outside = Vec::new();
    for (rule, p) in rns.preforms() {
        let letters: BTreeSet<String> = p
            .rights
            .iter()
            .flat_map(|r| r.ranked_letters())
            .collect();
        if single_right_letter && letters.len() != 1 {
            bad_singleton.push(rule.name.clone());
        }
        if letters.iter().any(|l| subj_letters.contains(l)) {
            bad_outside.push(rule.name.clone());
        }
    }
    if single_right_letter {
        report.push(
            "right apex letter singleton",
            bad_singleton.is_empty(),
            bad_singleton,
        );
    }
    report.push(
        "right letters outside subject",
        bad_outside.is_empty(),
        bad_outside,
    );

    let mut lefts: BTreeMap<String, usize> = BTreeMap::new();
    let mut rights: BTreeMap<String, usize> = BTreeMap::new();
    let mut injective = true;
    for (i, (_, p)) in rns.preforms().enumerate() {
        let lk = canon::canonical_key_tagged(&p.left.with_id_prefix("k_"));
        let rk = p
            .rights
            .iter()
            .map(|r| canon::canonical_key_tagged(&r.with_id_prefix("k_")))
            .collect::<Vec<_>>()
            .join("&");
        match lefts.get(&lk) {
            Some(&j) => {
                let prev_rk: Vec<&String> = rights
                    .iter()
                    .filter(|(_, &v)| v == j)
                    .map(|(k, _)| k)
                    .collect();
                if !prev_rk.iter().any(|k| **k == rk) {
                    injective = false;
                }
            }
            None => {
                lefts.insert(lk, i);
            }
        }
        match rights.get(&rk) {
            Some(&j) => {
                if j != i && !injective_pair_ok(rns, j, i) {
                    injective = false;
                }
            }
            None => {
                rights.insert(rk, i);
            }
        }
    }
    report.push("left-right injection", injective, Vec::new());

    // (iii) fresh-letters demand present.
    let has_fresh = rns
        .conditions
        .iter()
        .any(|c| matches!(c, Condition::FreshLetters));
    report.push("fresh-letters condition", has_fresh, Vec::new());

    // Cover kinds: a host the subject encloses into where every preform has
    // a redex.
    if matches!(kind, RnsKind::Crns | RnsKind::Gcrns | RnsKind::GcdRns) {
        let ok = match witness_host {
            Some(host) => host_witnesses(rns, subject, host),
            None => find_witness_host(rns, subject, search_bound).is_some(),
        };
        report.push("redex-bearing host", ok, Vec::new());
        // (v) single-net right sides for plain CRNS.
        if kind == RnsKind::Crns {
            let bad: Vec<String> = rns
                .preforms()
                .filter(|(_, p)| p.rights.len() != 1)
                .map(|(r, _)| r.name.clone())
                .collect();
            report.push("right sides single nets", bad.is_empty(), bad);
        }
    }

    // Distinct right sides for the d-variant.
    if kind == RnsKind::GcdRns {
        let all_rights: Vec<(String, &Net)> = rns
            .preforms()
            .flat_map(|(r, p)| p.rights.iter().map(move |n| (r.name.clone(), n)))
            .collect();
        let mut bad = Vec::new();
        for i in 0..all_rights.len() {
            for j in (i + 1)..all_rights.len() {
                let (an, a) = &all_rights[i];
                let (bn, b) = &all_rights[j];
                let cap = a.node_count().min(b.node_count());
                if let Ok(r) = enclose::overlaps(a, b, cap) {
                    if r.overlap {
                        bad.push(format!("{an}/{bn}"));
                    }
                }
            }
        }
        report.push("right sides pairwise distinct", bad.is_empty(), bad);
    }

    report
}

fn injective_pair_ok(rns: &Rns, i: usize, j: usize) -> bool {
    // Two preforms share a right side; injectivity demands equal lefts.
    let ps: Vec<&RulePreform> = rns.preforms().map(|(_, p)| p).collect();
    canon::canonical_key_tagged(&ps[i].left.with_id_prefix("k_"))
        == canon::canonical_key_tagged(&ps[j].left.with_id_prefix("k_"))
}

fn host_witnesses(rns: &Rns, subject: &Jungle, host: &Net) -> bool {
    subject.iter().all(|s| enclose::is_enclosure(s, host))
        && rns.preforms().all(|(_, p)| {
            !matching::find_pattern_matches(&p.left, &Jungle::singleton(host.clone())).is_empty()
        })
}

fn find_witness_host(rns: &Rns, subject: &Jungle, bound: usize) -> Option<Net> {
    // The subject itself first.
    for s in subject.iter() {
        if host_witnesses(rns, &Jungle::from_nets([s.clone()]), s)
            && subject.iter().all(|t| enclose::is_enclosure(t, s))
        {
            return Some(s.clone());
        }
    }
    if bound == 0 {
        return None;
    }
    // Bounded enumeration over the letters in play.
    let mut letters: BTreeMap<String, (usize, usize)> = BTreeMap::new();
    for n in subject.iter() {
        for (_, i) in n.nodes() {
            letters.insert(i.letter.clone(), (i.in_rank, i.out_rank));
        }
    }
    for (_, p) in rns.preforms() {
        for (_, i) in p.left.nodes() {
            if i.kind == crate::alphabet::LetterKind::Ranked {
                letters.insert(i.letter.clone(), (i.in_rank, i.out_rank));
            }
        }
    }
    let pool: Vec<(String, usize, usize)> = letters
        .into_iter()
        .map(|(l, (i, o))| (l, i, o))
        .collect();
    for host in enumerate_nets(&pool, bound) {
        if host_witnesses(rns, subject, &host) {
            return Some(host);
        }
    }
    None
}

impl Prns {
    /// Validates an arbitrary system as a PRNS of the subject.
    pub fn validate(rns: Rns, subject: &Jungle) -> Result<Prns> {
        let report = validate_rns_type(&rns, RnsKind::Prns, subject, None, 0);
        if !report.passed {
            let failed: Vec<String> = report
                .conditions
                .iter()
                .filter(|c| !c.passed)
                .map(|c| c.name.clone())
                .collect();
            return Err(Error::Invalid(format!(
                "not a PRNS: failed {}",
                failed.join(", ")
            )));
        }
        let mut block_map = BTreeMap::new();
        for (rule, p) in rns.preforms() {
            let letter = p.rights[0]
                .ranked_letters()
                .into_iter()
                .next()
                .ok_or_else(|| Error::Invalid("right side carries no letter".into()))?;
            block_map.insert(rule.name.clone(), (p.left.clone(), letter));
        }
        Ok(Prns { rns, block_map })
    }

    pub fn concept_letters(&self) -> BTreeSet<String> {
        self.block_map.values().map(|(_, l)| l.clone()).collect()
    }

    pub fn inverted(&self) -> Result<Rns> {
        self.rns.inverted()
    }
}

/// Budget for concept computation: a valid system strictly consumes
/// substance letters, so rules x nodes steps always suffice.
pub fn concept_budget(rns: &Rns, c: &Jungle) -> usize {
    let nodes: usize = c.iter().map(|n| n.node_count()).sum();
    (rns.rules.len().max(1)) * nodes.max(1) + 1
}

/// The concept of a jungle: normal forms under the contraction system. A
/// budget overrun here means an invalid system slipped validation, so the
/// error is surfaced, never swallowed.
pub fn concept(rns: &Rns, c: &Jungle) -> Result<Jungle> {
    rewrite::normal_forms(
        std::slice::from_ref(rns),
        c,
        concept_budget(rns, c),
    )
}

/// concept then inverse-concept; Lemma-style round trip.
pub fn roundtrip(rns: &Rns, c: &Jungle) -> Result<Jungle> {
    let up = concept(rns, c)?;
    let inv = rns.inverted()?;
    let budget = concept_budget(&inv, &up);
    rewrite::normal_forms(&[inv], &up, budget)
}

/// One block consumed during a provenance-tracked contraction.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct BlockTrace {
    pub rule: String,
    pub host_nodes: BTreeSet<NodeId>,
    pub concept_node: NodeId,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Contraction {
    pub concept: Net,
    pub blocks: Vec<BlockTrace>,
}

/// Deterministic greedy contraction with provenance: repeatedly fires the
/// canonically-first match until irreducible. Substance node ids survive
/// untouched until consumed, so traces refer to original ids.
pub fn contract_with_provenance(rns: &Rns, t: &Net) -> Result<Contraction> {
    let mut current = t.clone();
    let mut blocks = Vec::new();
    let budget = concept_budget(rns, &Jungle::singleton(t.clone()));
    for _ in 0..budget {
        let host = Jungle::singleton(current.clone());
        let mut candidates: Vec<(String, usize, matching::Match, usize)> = Vec::new();
        for (ri, rule) in rns.rules.iter().enumerate() {
            for m in matching::find_rule_matches(rule, &host) {
                if matching::executable(&m, &rule.preforms[m.preform]) {
                    candidates.push((rule.name.clone(), m.preform, m, ri));
                }
            }
        }
        if candidates.is_empty() {
            return Ok(Contraction {
                concept: current,
                blocks,
            });
        }
        candidates.sort_by(|a, b| {
            a.0.cmp(&b.0)
                .then(a.1.cmp(&b.1))
                .then(a.2.node_map.cmp(&b.2.node_map))
        });
        let (rule_name, pi, m, ri) = candidates.remove(0);
        let preform = &rns.rules[ri].preforms[pi];
        let before: BTreeSet<NodeId> = current.node_ids().cloned().collect();
        let consumed = m.redex_nodes();
        let pieces = rewrite::rewrite_at(&current, &m, preform, 0)?;
        if pieces.len() != 1 {
            return Err(Error::Invalid(
                "contraction disconnected the net".into(),
            ));
        }
        current = pieces.into_iter().next().unwrap();
        let fresh: Vec<NodeId> = current
            .node_ids()
            .filter(|n| !before.contains(*n))
            .cloned()
            .collect();
        if fresh.len() != 1 {
            return Err(Error::Invalid(
                "contraction inserted more than one node".into(),
            ));
        }
        blocks.push(BlockTrace {
            rule: rule_name,
            host_nodes: consumed,
            concept_node: fresh.into_iter().next().unwrap(),
        });
    }
    Err(Error::BudgetExhausted(budget))
}

/// Conversion of a left-right-distinct cover system to a partition system
/// agreeing on the subject's normal forms.
#[derive(Debug, Clone)]
pub enum CrnsToPrns {
    Converted(Prns),
    NotConvertible { preform: String, reason: String },
}

pub fn crns_to_prns(crns: &Crns, subject: &Jungle, fresh: &mut FreshSupply) -> Result<CrnsToPrns> {
    fresh.avoid(subject_letters(subject));
    fresh.avoid(crns.rns.right_letters());
    let mut rules: Vec<Rule> = Vec::new();
    let mut block_map = BTreeMap::new();
    for (rule, p) in crns.rns.preforms() {
        if p.rights.len() != 1 {
            return Ok(CrnsToPrns::NotConvertible {
                preform: rule.name.clone(),
                reason: "right side is a jungle".into(),
            });
        }
        let right = &p.rights[0];
        // Left-right distinct: the sides may not overlap.
        let cap = p.left.node_count().min(right.node_count());
        if enclose::overlaps(&p.left, right, cap)?.overlap {
            return Ok(CrnsToPrns::NotConvertible {
                preform: rule.name.clone(),
                reason: "left and right apexes overlap".into(),
            });
        }
        let check = crate::sisters::characterization_check(&p.left, right)?;
        let Some(partition) = check.witness else {
            return Ok(CrnsToPrns::NotConvertible {
                preform: rule.name.clone(),
                reason: "no block arrangement matches the right side's port counts".into(),
            });
        };
        // Rebuild the preform as per-block contractions onto right's nodes.
        match crate::sisters::exact_quotient_rules(&p.left, &partition, right) {
            Some(new_rules) => {
                for (left, right) in new_rules {
                    let name = format!("cv{}", rules.len());
                    let letter = right.ranked_letters().into_iter().next().unwrap();
                    block_map.insert(name.clone(), (left.clone(), letter));
                    rules.push(Rule::single(
                        &name,
                        RulePreform::strict_interface(left, vec![right], &name)?,
                    ));
                }
            }
            None => {
                return Ok(CrnsToPrns::NotConvertible {
                    preform: rule.name.clone(),
                    reason: "no exact block-to-node correspondence".into(),
                })
            }
        }
    }
    let rns = Rns::new("prns-of-crns", rules).with_conditions(vec![Condition::FreshLetters])?;
    match Prns::validate(rns, subject) {
        Ok(p) => Ok(CrnsToPrns::Converted(Prns {
            block_map,
            ..p
        })),
        Err(e) => Ok(CrnsToPrns::NotConvertible {
            preform: "<all>".into(),
            reason: e.to_string(),
        }),
    }
}

/// A quick accessor used across modules: the ports of a pattern, tagged or
/// untagged, by direction.
pub fn port_profile(net: &Net) -> (usize, usize) {
    let (_, i, o) = net.delta();
    (i, o)
}

#[allow(unused)]
fn unused_port(_: &Port) {}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::net::fixtures::{d1, d2};
    use crate::net::delta_d;

    fn fresh() -> FreshSupply {
        FreshSupply::new("%", "c")
    }

    fn two_block_prns() -> (Net, Prns) {
        let c = d1();
        let spec = PartitionSpec::parse(&c, "n1|n2").unwrap();
        let w = synthesize_prns(&c, &spec, &mut fresh()).unwrap();
        (c, w)
    }

    #[test]
    fn synthesize_two_blocks() {
        let (c, w) = two_block_prns();
        assert_eq!(w.rns.rules.len(), 2);
        let up = concept(&w.rns, &Jungle::singleton(c.clone())).unwrap();
        assert_eq!(up.len(), 1);
        let cn = up.iter().next().unwrap();
        assert_eq!(cn.node_count(), 2);
        assert_eq!(cn.edge_count(), 1);
        assert_eq!(delta_d(&up), (2, 1, 1));
        // Letters are all fresh.
        assert!(cn.letters().iter().all(|l| l.starts_with('%')));
    }

    #[test]
    fn synthesize_one_block() {
        let c = d1();
        let spec = PartitionSpec::parse(&c, "n1,n2").unwrap();
        let w = synthesize_prns(&c, &spec, &mut fresh()).unwrap();
        assert_eq!(w.rns.rules.len(), 1);
        let up = concept(&w.rns, &Jungle::singleton(c.clone())).unwrap();
        let cn = up.iter().next().unwrap();
        assert_eq!(cn.node_count(), 1);
        assert_eq!(cn.delta(), (2, 1, 1));
    }

    #[test]
    fn overlapping_blocks_is_not_a_partition() {
        let c = d1();
        assert!(matches!(
            PartitionSpec::parse(&c, "n1|n1"),
            Err(Error::NotAPartition(_))
        ));
    }

    #[test]
    fn synthesized_prns_validates() {
        let (c, w) = two_block_prns();
        let report = validate_rns_type(
            &w.rns,
            RnsKind::Prns,
            &Jungle::singleton(c),
            None,
            0,
        );
        assert!(report.passed, "{report:?}");
    }

    #[test]
    fn r1_is_not_a_prns() {
        let r1 = crate::rule::tests_support::r1_rns();
        let report = validate_rns_type(
            &r1,
            RnsKind::Prns,
            &Jungle::singleton(d1()),
            None,
            0,
        );
        assert!(!report.passed);
        assert!(report
            .conditions
            .iter()
            .any(|c| c.name == "fresh-letters condition" && !c.passed));
    }

    #[test]
    fn lemma_roundtrip_on_fixtures() {
        let (c, w) = two_block_prns();
        let back = roundtrip(&w.rns, &Jungle::singleton(c.clone())).unwrap();
        assert!(back.set_eq(&Jungle::singleton(c)));
    }

    #[test]
    fn closed_net_one_block_concept() {
        let c = d2();
        let spec = PartitionSpec::parse(&c, "n1,n2").unwrap();
        let w = synthesize_prns(&c, &spec, &mut fresh()).unwrap();
        let up = concept(&w.rns, &Jungle::singleton(c.clone())).unwrap();
        assert_eq!(up.len(), 1);
        let cn = up.iter().next().unwrap();
        assert_eq!(cn.node_count(), 1);
        // The loop's two edges become a pair of absorbed connections: delta
        // stays at zero.
        assert_eq!(cn.delta(), (0, 0, 0));
        let back = roundtrip(&w.rns, &Jungle::singleton(c.clone())).unwrap();
        assert!(back.set_eq(&Jungle::singleton(c)));
    }

    #[test]
    fn empty_jungle_concept_is_empty() {
        let (_, w) = two_block_prns();
        let up = concept(&w.rns, &Jungle::new()).unwrap();
        assert!(up.is_empty());
    }

    #[test]
    fn provenance_tracks_blocks() {
        let (c, w) = two_block_prns();
        let tr = contract_with_provenance(&w.rns, &c).unwrap();
        assert_eq!(tr.blocks.len(), 2);
        let all: BTreeSet<NodeId> = tr
            .blocks
            .iter()
            .flat_map(|b| b.host_nodes.iter().cloned())
            .collect();
        assert_eq!(all.len(), 2);
        assert_eq!(tr.concept.node_count(), 2);
    }
}
