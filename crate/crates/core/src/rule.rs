use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

use crate::alphabet::LetterKind;
use crate::canon;
use crate::error::{Error, Result};
use crate::net::{Direction, Jungle, Net, NodeId};

/// One ordered jungle-jungle pair of a rewrite rule. The left side is a
/// pattern net (ranked nodes plus variable leaves); the right sides are
/// alternatives, each produced independently when the preform fires. The
/// interface is carried by tag names shared between the sides and by
/// variable names.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RulePreform {
    pub left: Net,
    pub rights: Vec<Net>,
    /// Right-side tags that do not echo a left tag; they open a fresh
    /// unoccupied port instead of reconnecting a boundary edge.
    pub new_boundary: BTreeSet<String>,
}

fn tag_set(net: &Net) -> BTreeSet<(String, Direction)> {
    net.tags()
        .map(|(name, port)| (name.clone(), port.dir))
        .collect()
}

fn untagged_unoccupied(net: &Net) -> (usize, usize) {
    let tagged: BTreeSet<_> = net.tags().map(|(_, p)| p.clone()).collect();
    let mut ins = 0;
    let mut outs = 0;
    for p in net.unoccupied_ports() {
        if !tagged.contains(&p) {
            match p.dir {
                Direction::In => ins += 1,
                Direction::Out => outs += 1,
            }
        }
    }
    (ins, outs)
}

impl RulePreform {
    pub fn new(left: Net, rights: Vec<Net>) -> Result<Self> {
        let mut new_boundary = BTreeSet::new();
        let left_tags = tag_set(&left);
        for r in &rights {
            for (name, port) in r.tags() {
                if !left_tags.contains(&(name.clone(), port.dir)) {
                    new_boundary.insert(name.clone());
                }
            }
        }
        let p = RulePreform {
            left,
            rights,
            new_boundary,
        };
        p.validate()?;
        Ok(p)
    }

    /// Like `new` but fails on any right tag missing from the left side
    /// instead of declaring it new-boundary.
    pub fn strict_interface(left: Net, rights: Vec<Net>, rule: &str) -> Result<Self> {
        let left_tags = tag_set(&left);
        for r in &rights {
            for (name, port) in r.tags() {
                if !left_tags.contains(&(name.clone(), port.dir)) {
                    return Err(Error::BoundaryMismatch {
                        rule: rule.to_string(),
                        tag: name.clone(),
                    });
                }
            }
        }
        RulePreform::new(left, rights)
    }

    fn validate(&self) -> Result<()> {
        if !self
            .left
            .nodes()
            .any(|(_, i)| i.kind == LetterKind::Ranked)
        {
            return Err(Error::BareVariableLeft);
        }
        if self.rights.is_empty() {
            return Err(Error::Invalid("preform has no right side".into()));
        }
        // Left variables hang off the apex through exactly one tie.
        for (id, info) in self.left.nodes() {
            if info.kind == LetterKind::Frontier {
                let ties = self
                    .left
                    .edges()
                    .filter(|e| &e.src == id || &e.dst == id)
                    .count();
                if ties != 1 {
                    return Err(Error::VariableTieCount(info.letter.clone()));
                }
            }
        }
        for r in &self.rights {
            for (id, info) in r.nodes() {
                if info.kind == LetterKind::Frontier {
                    let ties = r.edges().filter(|e| &e.src == id || &e.dst == id).count();
                    if ties > 1 {
                        return Err(Error::VariableTieCount(info.letter.clone()));
                    }
                }
            }
        }
        Ok(())
    }

    pub fn left_variables(&self) -> BTreeSet<String> {
        self.left.variable_names()
    }

    pub fn right_variables(&self) -> BTreeSet<String> {
        self.rights
            .iter()
            .flat_map(|r| r.variable_names())
            .collect()
    }

    /// The inverse preforms: one per right-side alternative.
    pub fn inverted(&self) -> Result<Vec<RulePreform>> {
        self.rights
            .iter()
            .map(|r| RulePreform::new(r.clone(), vec![self.left.clone()]))
            .collect()
    }
}

/// A rewrite rule: a non-empty set of preforms. Simultaneous iff more than
/// one preform.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Rule {
    pub name: String,
    pub preforms: Vec<RulePreform>,
}

impl Rule {
    pub fn single(name: &str, preform: RulePreform) -> Rule {
        Rule {
            name: name.to_string(),
            preforms: vec![preform],
        }
    }

    pub fn is_simultaneous(&self) -> bool {
        self.preforms.len() > 1
    }

    pub fn inverted(&self) -> Result<Rule> {
        let mut preforms = Vec::new();
        for p in &self.preforms {
            preforms.extend(p.inverted()?);
        }
        Ok(Rule {
            name: format!("{}'", self.name.trim_end_matches('\'')),
            preforms,
        })
    }
}

/// Machine-checkable conditional demands of a renetting system. The demand
/// language is closed; free-text demands are rejected at parse time.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub enum Condition {
    /// Right-side letters lie outside the subject's letters; checked by
    /// system validation, inert during application.
    FreshLetters,
    /// Priority order among rule names: a later rule fires only when no
    /// earlier listed rule has an executable match.
    ApplyOrder(Vec<String>),
    /// Within one application sweep over a net, accepted matches must have
    /// pairwise node-disjoint redexes (greedy in canonical order).
    RedexDisjoint,
    /// Application to a net containing any of these letters is an error.
    LettersOutside(BTreeSet<String>),
    /// Rule may only fire where its redex apex equals one of the listed node
    /// sets. Host-specific; used by staged constructions.
    RedexWithin(BTreeMap<String, Vec<BTreeSet<NodeId>>>),
}

/// A renetting system: rules plus conditional demands.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Rns {
    pub name: String,
    pub rules: Vec<Rule>,
    pub conditions: Vec<Condition>,
}

impl Rns {
    pub fn new(name: &str, rules: Vec<Rule>) -> Rns {
        Rns {
            name: name.to_string(),
            rules,
            conditions: Vec::new(),
        }
    }

    pub fn with_conditions(mut self, conditions: Vec<Condition>) -> Result<Rns> {
        for c in &conditions {
            if let Condition::ApplyOrder(names) = c {
                for n in names {
                    if !self.rules.iter().any(|r| &r.name == n) {
                        return Err(Error::Invalid(format!(
                            "apply-order names unknown rule `{n}`"
                        )));
                    }
                }
            }
        }
        self.conditions = conditions;
        Ok(self)
    }

    pub fn rule(&self, name: &str) -> Option<&Rule> {
        self.rules.iter().find(|r| r.name == name)
    }

    pub fn preforms(&self) -> impl Iterator<Item = (&Rule, &RulePreform)> {
        self.rules
            .iter()
            .flat_map(|r| r.preforms.iter().map(move |p| (r, p)))
    }

    pub fn is_conditional(&self) -> bool {
        !self.conditions.is_empty()
    }

    /// Side-swapped system. Conditions carry over except apply-order, which
    /// has no meaning for the inverse, and fresh-letters, which is kept.
    pub fn inverted(&self) -> Result<Rns> {
        let rules = self
            .rules
            .iter()
            .map(|r| r.inverted())
            .collect::<Result<Vec<_>>>()?;
        let conditions = self
            .conditions
            .iter()
            .filter(|c| !matches!(c, Condition::ApplyOrder(_) | Condition::RedexWithin(_)))
            .cloned()
            .collect();
        Ok(Rns {
            name: format!("{}'", self.name.trim_end_matches('\'')),
            rules,
            conditions,
        })
    }

    /// All letters occurring in right sides, arities excluded.
    pub fn right_letters(&self) -> BTreeSet<String> {
        self.preforms()
            .flat_map(|(_, p)| p.rights.iter().flat_map(|r| r.ranked_letters()))
            .collect()
    }

    pub fn left_letters(&self) -> BTreeSet<String> {
        self.preforms()
            .flat_map(|(_, p)| p.left.ranked_letters())
            .collect()
    }
}

/// The relation RNS of a set of (jungle, jungle) pairs: one rule per pair,
/// one preform per mother net, the whole right jungle as alternatives.
pub fn rns_of_relation(pairs: &[(Jungle, Jungle)]) -> Result<Rns> {
    let mut rules = Vec::new();
    for (i, (s, t)) in pairs.iter().enumerate() {
        let mut preforms = Vec::new();
        for net in s.iter() {
            preforms.push(RulePreform::new(
                net.clone(),
                t.iter().cloned().collect(),
            )?);
        }
        if preforms.is_empty() {
            return Err(Error::Invalid(format!("pair {i} has an empty left jungle")));
        }
        rules.push(Rule {
            name: format!("rel{i}"),
            preforms,
        });
    }
    Ok(Rns::new("relation", rules))
}

/// Typology labels of Def-style rule classification.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Label {
    ManoeuvreIncreasing,
    ManoeuvreDeleting,
    ManoeuvreSaving,
    ManoeuvreChanging,
    ManoeuvreMightinessSaving,
    ArityIncreasing,
    ArityDeleting,
    AritySaving,
    ArityMightinessSaving,
    LetterIncreasing,
    LetterDeleting,
    LetterSaving,
    LetterMightinessIncreasing,
    LetterMightinessSaving,
    LeftLinear,
    RightLinear,
    TotallyLinear,
    Identity,
    HeightDiminishing,
    HeightIncreasing,
    HeightSaving,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum ThreeValued {
    Yes,
    No,
    Unknown,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RuleClassification {
    pub labels: BTreeSet<Label>,
    pub monadic: ThreeValued,
}

impl RuleClassification {
    pub fn has(&self, l: Label) -> bool {
        self.labels.contains(&l)
    }
}

fn var_counts(net: &Net) -> BTreeMap<String, usize> {
    let mut m = BTreeMap::new();
    for (_, info) in net.nodes() {
        if info.kind == LetterKind::Frontier {
            *m.entry(info.letter.clone()).or_insert(0) += 1;
        }
    }
    m
}

/// Evaluates the rule typology. `monadic_bound` caps the per-letter image
/// size of the net-homomorphism search backing the monadic label.
pub fn classify_rule(rule: &Rule, monadic_bound: usize) -> RuleClassification {
    let mut labels = BTreeSet::new();
    let pairs: Vec<(&Net, &Net)> = rule
        .preforms
        .iter()
        .flat_map(|p| p.rights.iter().map(move |r| (&p.left, r)))
        .collect();

    let all = |f: &dyn Fn(&Net, &Net) -> bool| pairs.iter().all(|(l, r)| f(l, r));
    let any = |f: &dyn Fn(&Net, &Net) -> bool| pairs.iter().any(|(l, r)| f(l, r));

    // Manoeuvre letters as sets.
    let fron = |n: &Net| n.variable_names();
    if all(&|l, r| fron(l).is_subset(&fron(r)) && fron(l) != fron(r)) {
        labels.insert(Label::ManoeuvreIncreasing);
    }
    if all(&|l, r| fron(r).is_subset(&fron(l)) && fron(l) != fron(r)) {
        labels.insert(Label::ManoeuvreDeleting);
    }
    if all(&|l, r| fron(l) == fron(r)) {
        labels.insert(Label::ManoeuvreSaving);
    }
    if any(&|l, r| !fron(l).is_subset(&fron(r)) && !fron(r).is_subset(&fron(l))) {
        labels.insert(Label::ManoeuvreChanging);
    }
    // Occurrence counts per manoeuvre letter.
    if all(&|l, r| {
        let (cl, cr) = (var_counts(l), var_counts(r));
        let names: BTreeSet<_> = cl.keys().chain(cr.keys()).cloned().collect();
        names
            .iter()
            .all(|x| cl.get(x).copied().unwrap_or(0) == cr.get(x).copied().unwrap_or(0))
    }) {
        labels.insert(Label::ManoeuvreMightinessSaving);
    }

    // Arities: tag sets plus counts of untagged unoccupied ports.
    let tags = tag_set;
    if all(&|l, r| tags(l) == tags(r) && untagged_unoccupied(l) == untagged_unoccupied(r)) {
        labels.insert(Label::AritySaving);
        labels.insert(Label::ArityMightinessSaving);
    }
    if all(&|l, r| {
        tags(l).is_subset(&tags(r))
            && tags(l) != tags(r)
            && untagged_unoccupied(l) <= untagged_unoccupied(r)
    }) {
        labels.insert(Label::ArityIncreasing);
    }
    if all(&|l, r| {
        tags(r).is_subset(&tags(l))
            && tags(l) != tags(r)
            && untagged_unoccupied(r) <= untagged_unoccupied(l)
    }) {
        labels.insert(Label::ArityDeleting);
    }

    // Ranked letters of the apexes.
    let rl = |n: &Net| n.ranked_letters();
    if all(&|l, r| rl(l).is_subset(&rl(r)) && rl(l) != rl(r)) {
        labels.insert(Label::LetterIncreasing);
    }
    if all(&|l, r| rl(r).is_subset(&rl(l)) && rl(l) != rl(r)) {
        labels.insert(Label::LetterDeleting);
    }
    if all(&|l, r| rl(l) == rl(r)) {
        labels.insert(Label::LetterSaving);
    }
    // Node-occurrence mightiness.
    if any(&|l, r| l.node_count() < r.node_count()) {
        labels.insert(Label::LetterMightinessIncreasing);
    }
    if all(&|l, r| l.node_count() == r.node_count()) {
        labels.insert(Label::LetterMightinessSaving);
    }

    // Linearity.
    let left_linear = rule.preforms.iter().all(|p| {
        var_counts(&p.left).values().all(|&c| c == 1)
    });
    let right_linear = rule
        .preforms
        .iter()
        .all(|p| p.rights.iter().all(|r| var_counts(r).values().all(|&c| c == 1)));
    if left_linear {
        labels.insert(Label::LeftLinear);
    }
    if right_linear {
        labels.insert(Label::RightLinear);
    }
    if left_linear && right_linear {
        labels.insert(Label::TotallyLinear);
    }

    // Identity: sides equal with identical interface placement.
    if rule.preforms.iter().all(|p| {
        p.rights.len() == 1
            && canon::canonical_key_tagged(&p.left) == canon::canonical_key_tagged(&p.rights[0])
    }) {
        labels.insert(Label::Identity);
    }

    // Heights; labels only when defined on every side.
    let heights: Option<Vec<(usize, usize)>> = pairs
        .iter()
        .map(|(l, r)| Some((l.height()?, r.height()?)))
        .collect();
    if let Some(hs) = heights {
        if hs.iter().all(|(l, r)| l > r) {
            labels.insert(Label::HeightDiminishing);
        }
        if hs.iter().all(|(l, r)| l < r) {
            labels.insert(Label::HeightIncreasing);
        }
        if hs.iter().all(|(l, r)| l == r) {
            labels.insert(Label::HeightSaving);
        }
    }

    let monadic = if pairs
        .iter()
        .all(|(l, r)| crate::hom::monadic_witness(l, r, monadic_bound) == ThreeValued::Yes)
    {
        ThreeValued::Yes
    } else if pairs
        .iter()
        .any(|(l, r)| crate::hom::monadic_witness(l, r, monadic_bound) == ThreeValued::No)
    {
        ThreeValued::No
    } else {
        ThreeValued::Unknown
    };

    RuleClassification { labels, monadic }
}

/// Height comparison on demand; errors when a side is cyclic.
pub fn height_label(rule: &Rule) -> Result<Label> {
    let mut cls = BTreeSet::new();
    for p in &rule.preforms {
        let hl = p.left.height().ok_or(Error::HeightUndefined)?;
        for r in &p.rights {
            let hr = r.height().ok_or(Error::HeightUndefined)?;
            cls.insert(hl.cmp(&hr));
        }
    }
    if cls.len() == 1 {
        Ok(match cls.into_iter().next().unwrap() {
            std::cmp::Ordering::Greater => Label::HeightDiminishing,
            std::cmp::Ordering::Less => Label::HeightIncreasing,
            std::cmp::Ordering::Equal => Label::HeightSaving,
        })
    } else {
        Err(Error::Invalid("mixed height relation across preforms".into()))
    }
}

#[cfg(test)]
pub mod tests_support {
    use super::*;
    use crate::net::{Direction, Net, RawNet};

    pub fn tagged_single(letter: &str) -> Net {
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

    /// The shared R1 fixture as a one-rule system: f -> h with the full
    /// boundary tagged.
    pub fn r1_rns() -> Rns {
        Rns::new(
            "r1",
            vec![Rule::single(
                "r1",
                RulePreform::new(tagged_single("f"), vec![tagged_single("h")]).unwrap(),
            )],
        )
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::net::RawNet;

    pub fn r1() -> Rule {
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
    fn r1_classification() {
        let c = classify_rule(&r1(), 1);
        for l in [
            Label::ManoeuvreSaving,
            Label::AritySaving,
            Label::ArityMightinessSaving,
            Label::LetterMightinessSaving,
            Label::HeightSaving,
            Label::TotallyLinear,
        ] {
            assert!(c.has(l), "missing {l:?}");
        }
        assert!(!c.has(Label::Identity));
        assert!(!c.has(Label::ArityIncreasing));
        assert!(!c.has(Label::ArityDeleting));
        assert!(!c.has(Label::LetterMightinessIncreasing));
    }

    #[test]
    fn duplicating_rule_not_mightiness_saving() {
        // f(x) -> h with x twice: |p(right, x)| = 2.
        let left = Net::validate(
            &RawNet::default()
                .node("l", "f", 2, 1)
                .var("v", "x")
                .edge("v", 0, "l", 0),
            None,
        )
        .unwrap();
        let right = Net::validate(
            &RawNet::default()
                .node("r", "h", 2, 1)
                .var("v1", "x")
                .var("v2", "x")
                .edge("v1", 0, "r", 0)
                .edge("v2", 0, "r", 1),
            None,
        )
        .unwrap();
        let rule = Rule::single("dup", RulePreform::new(left, vec![right]).unwrap());
        let c = classify_rule(&rule, 1);
        assert!(!c.has(Label::ManoeuvreMightinessSaving));
        assert!(c.has(Label::ManoeuvreSaving));
        assert!(!c.has(Label::RightLinear));
    }

    #[test]
    fn identity_rule_all_saving() {
        let side = || {
            Net::validate(
                &RawNet::default()
                    .node("l", "f", 2, 1)
                    .tag("t0", "l", Direction::In, 0),
                None,
            )
            .unwrap()
        };
        let rule = Rule::single("id", RulePreform::new(side(), vec![side()]).unwrap());
        let c = classify_rule(&rule, 1);
        assert!(c.has(Label::Identity));
        assert!(c.has(Label::ManoeuvreSaving));
        assert!(c.has(Label::AritySaving));
        assert!(c.has(Label::LetterSaving));
        assert!(c.has(Label::HeightSaving));
        assert_eq!(c.monadic, ThreeValued::Yes);
    }

    #[test]
    fn invert_is_involution() {
        let r = r1();
        let back = r.inverted().unwrap().inverted().unwrap();
        assert_eq!(r.preforms.len(), back.preforms.len());
        for (a, b) in r.preforms.iter().zip(back.preforms.iter()) {
            assert_eq!(
                canon::canonical_key_tagged(&a.left),
                canon::canonical_key_tagged(&b.left)
            );
            assert_eq!(
                canon::canonical_key_tagged(&a.rights[0]),
                canon::canonical_key_tagged(&b.rights[0])
            );
        }
    }

    #[test]
    fn bare_variable_left_rejected() {
        let left = Net::validate(&RawNet::default().var("v", "x"), None).unwrap();
        let right = Net::validate(&RawNet::default().node("r", "h", 1, 1), None).unwrap();
        assert!(matches!(
            RulePreform::new(left, vec![right]),
            Err(Error::BareVariableLeft)
        ));
    }
}
