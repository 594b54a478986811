//! The abstraction relation: sister checks by unoccupied-port counts,
//! the partition-result characterization, and bounded common-origin search.

use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

use crate::alphabet::FreshSupply;
use crate::canon::{self, EqMode};
use crate::enclose::induced_block_pattern;
use crate::error::{Error, Result};
use crate::net::{delta_d, Direction, Edge, Jungle, Net, NodeId, Port, RawNet};
use crate::partition::{all_partitions, PartitionSpec};
use crate::prns::{concept, Prns};
use crate::rule::{Condition, Rns, Rule, RulePreform};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum SisterMode {
    /// The characterization as stated: total unoccupied-port counts equal.
    Total,
    /// Additionally per-direction counts equal; used whenever a witness is
    /// actually constructed.
    Split,
}

impl std::str::FromStr for SisterMode {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "total" => Ok(SisterMode::Total),
            "split" => Ok(SisterMode::Split),
            other => Err(Error::Invalid(format!("unknown sister mode `{other}`"))),
        }
    }
}

/// The abstraction-relation test; also serves as the generalized relation
/// for every intervening system type sharing the count characterization.
pub fn abstract_sisters(a: &Jungle, b: &Jungle, mode: SisterMode) -> bool {
    let (ta, ia, oa) = delta_d(a);
    let (tb, ib, ob) = delta_d(b);
    match mode {
        SisterMode::Total => ta == tb,
        SisterMode::Split => (ia, oa) == (ib, ob),
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CharacterizationResult {
    pub possible: bool,
    pub witness: Option<PartitionSpec>,
}

/// Whether `b` can be a partition result of `a`: letters disjoint and some
/// partition of `a` whose per-block boundary-port counts match `b`'s
/// per-node port counts one-to-one. Exhaustive up to 12 nodes.
pub fn characterization_check(a: &Net, b: &Net) -> Result<CharacterizationResult> {
    if a.node_count() > 12 {
        return Err(Error::BudgetExhausted(12));
    }
    let la = a.ranked_letters();
    let lb = b.ranked_letters();
    if la.intersection(&lb).next().is_some() {
        return Ok(CharacterizationResult {
            possible: false,
            witness: None,
        });
    }
    let mut target: Vec<usize> = b
        .nodes()
        .map(|(_, i)| i.in_rank + i.out_rank)
        .collect();
    target.sort_unstable();
    for p in all_partitions(a) {
        if p.blocks.len() != target.len() {
            continue;
        }
        let mut counts: Vec<usize> = p
            .blocks
            .iter()
            .map(|blk| block_port_count(a, blk))
            .collect();
        counts.sort_unstable();
        if counts == target {
            return Ok(CharacterizationResult {
                possible: true,
                witness: Some(p),
            });
        }
    }
    Ok(CharacterizationResult {
        possible: false,
        witness: None,
    })
}

/// Boundary ports of a block: severed edge endpoints plus genuinely
/// unoccupied ports; exactly the port count of the contraction node.
pub fn block_port_count(net: &Net, block: &BTreeSet<NodeId>) -> usize {
    let rank_sum: usize = block
        .iter()
        .map(|n| {
            let i = net.info(n).unwrap();
            i.in_rank + i.out_rank
        })
        .sum();
    let internal = net
        .edges()
        .filter(|e| block.contains(&e.src) && block.contains(&e.dst))
        .count();
    rank_sum - 2 * internal
}

fn block_port_split(net: &Net, block: &BTreeSet<NodeId>) -> (usize, usize) {
    let mut ins = 0;
    let mut outs = 0;
    for n in block {
        let i = net.info(n).unwrap();
        ins += i.in_rank;
        outs += i.out_rank;
    }
    let internal = net
        .edges()
        .filter(|e| block.contains(&e.src) && block.contains(&e.dst))
        .count();
    (ins - internal, outs - internal)
}

/// Evidence that two nets are abstract sisters: a common origin and the two
/// contraction systems rewriting it onto each side.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct OriginWitness {
    pub origin: Net,
    pub w_a: Prns,
    pub w_b: Prns,
}

impl OriginWitness {
    pub fn swap(self) -> OriginWitness {
        OriginWitness {
            origin: self.origin,
            w_a: self.w_b,
            w_b: self.w_a,
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub enum OriginOutcome {
    Witness(Box<OriginWitness>),
    /// The bound was reached without a witness; explicitly not a refutation.
    Exhausted { candidates_tried: usize },
}

/// Checks both concept equalities exactly.
pub fn verify_origin(w: &OriginWitness, a: &Net, b: &Net) -> bool {
    let origin = Jungle::singleton(w.origin.clone());
    let up_a = concept(&w.w_a.rns, &origin);
    let up_b = concept(&w.w_b.rns, &origin);
    match (up_a, up_b) {
        (Ok(ja), Ok(jb)) => {
            ja.set_eq(&Jungle::singleton(a.clone())) && jb.set_eq(&Jungle::singleton(b.clone()))
        }
        _ => false,
    }
}

/// Bounded deterministic search for a common origin. Requires split-mode
/// sisterhood; single-node pairs use the closed form, the rest a bounded
/// enumeration of expansion candidates tested against both sides.
pub fn search_common_origin(
    a: &Net,
    b: &Net,
    max_origin_nodes: usize,
    fresh: &mut FreshSupply,
) -> Result<OriginOutcome> {
    let ja = Jungle::singleton(a.clone());
    let jb = Jungle::singleton(b.clone());
    if !abstract_sisters(&ja, &jb, SisterMode::Split) {
        return Err(Error::NotSisters);
    }
    Ok(raw_origin_search(a, b, max_origin_nodes, fresh))
}

/// The search body without the sisterhood precondition; used by the
/// falsification side of the characterization checks.
pub fn raw_origin_search(
    a: &Net,
    b: &Net,
    max_origin_nodes: usize,
    fresh: &mut FreshSupply,
) -> OriginOutcome {
    fresh.avoid(a.letters());
    fresh.avoid(b.letters());
    let mut tried = 0usize;
    let mut candidates: Vec<Net> = Vec::new();
    let mut seen: BTreeSet<String> = BTreeSet::new();

    // Closed form for single-node pairs.
    if a.node_count() == 1 && b.node_count() == 1 {
        let (_, i, o) = a.delta();
        let letter = fresh.mint();
        if let Ok(c) = Net::validate(&RawNet::default().node("o0", &letter, i, o), None) {
            candidates.push(c);
        }
    }
    for base in [a, b] {
        for c in expansions(base, max_origin_nodes, fresh) {
            let key = canon::canonical_key(&c, EqMode::Strict);
            if seen.insert(key) {
                candidates.push(c);
            }
        }
    }
    candidates.sort_by_key(|c| {
        (
            c.node_count(),
            c.edge_count(),
            canon::canonical_key(c, EqMode::Strict),
        )
    });

    for c in candidates {
        tried += 1;
        let Some(w_a) = quotient_prns(&c, a) else {
            continue;
        };
        let Some(w_b) = quotient_prns(&c, b) else {
            continue;
        };
        let witness = OriginWitness {
            origin: c,
            w_a,
            w_b,
        };
        if verify_origin(&witness, a, b) {
            return OriginOutcome::Witness(Box::new(witness));
        }
    }
    OriginOutcome::Exhausted {
        candidates_tried: tried,
    }
}

/// Searches partitions of `c` whose quotient is exactly `t` and builds the
/// contraction system onto `t`'s own nodes.
pub fn quotient_prns(c: &Net, t: &Net) -> Option<Prns> {
    if c.node_count() < t.node_count() {
        return None;
    }
    for p in all_partitions(c) {
        if p.blocks.len() != t.node_count() {
            continue;
        }
        if let Some(rules) = exact_quotient_rules(c, &p, t) {
            let mut rns_rules = Vec::new();
            let mut block_map = BTreeMap::new();
            let mut ok = true;
            for (i, (left, right)) in rules.into_iter().enumerate() {
                let name = format!("q{i}");
                let letter = right.ranked_letters().into_iter().next()?;
                block_map.insert(name.clone(), (left.clone(), letter));
                match RulePreform::strict_interface(left, vec![right], &name) {
                    Ok(p) => rns_rules.push(Rule::single(&name, p)),
                    Err(_) => {
                        ok = false;
                        break;
                    }
                }
            }
            if !ok {
                continue;
            }
            let rns = match Rns::new("quot", rns_rules)
                .with_conditions(vec![Condition::FreshLetters])
            {
                Ok(r) => r,
                Err(_) => continue,
            };
            match Prns::validate(rns, &Jungle::singleton(c.clone())) {
                Ok(mut w) => {
                    w.block_map = block_map;
                    // Confirm the contraction lands exactly on t.
                    if concept(&w.rns, &Jungle::singleton(c.clone()))
                        .map(|j| j.set_eq(&Jungle::singleton(t.clone())))
                        .unwrap_or(false)
                    {
                        return Some(w);
                    }
                }
                Err(_) => continue,
            }
        }
    }
    None
}

/// For a partition of `c` with as many blocks as `t` has nodes: a bijection
/// blocks -> nodes matching port profiles and severed edges, rendered as
/// (block pattern, tagged target node) rule sides. Deduplicates identical
/// lefts; a conflict (equal lefts needing different rights) aborts.
pub fn exact_quotient_rules(
    c: &Net,
    p: &PartitionSpec,
    t: &Net,
) -> Option<Vec<(Net, Net)>> {
    let blocks = &p.blocks;
    let t_nodes: Vec<NodeId> = t.node_ids().cloned().collect();
    if blocks.len() != t_nodes.len() {
        return None;
    }
    // Severed edges between blocks.
    let block_of = |n: &NodeId| blocks.iter().position(|b| b.contains(n));
    let mut severed: Vec<(usize, usize, Edge)> = Vec::new();
    for e in c.edges() {
        let bs = block_of(&e.src)?;
        let bd = block_of(&e.dst)?;
        if bs != bd {
            severed.push((bs, bd, e.clone()));
        }
    }

    // Backtracking over bijections with profile pruning.
    let mut assign: Vec<Option<usize>> = vec![None; blocks.len()]; // block -> t node index
    let mut used = vec![false; t_nodes.len()];
    fn profile_ok(c: &Net, t: &Net, block: &BTreeSet<NodeId>, node: &NodeId) -> bool {
        let info = t.info(node).unwrap();
        block_port_split(c, block) == (info.in_rank, info.out_rank)
    }
    fn edges_ok(
        t: &Net,
        t_nodes: &[NodeId],
        severed: &[(usize, usize, Edge)],
        assign: &[Option<usize>],
    ) -> bool {
        // Group assigned severed edges and compare counts with t.
        let mut want: BTreeMap<(usize, usize), usize> = BTreeMap::new();
        let mut complete = true;
        for (bs, bd, _) in severed {
            match (assign[*bs], assign[*bd]) {
                (Some(x), Some(y)) => *want.entry((x, y)).or_insert(0) += 1,
                _ => complete = false,
            }
        }
        let mut have: BTreeMap<(usize, usize), usize> = BTreeMap::new();
        for e in t.edges() {
            let x = t_nodes.iter().position(|n| n == &e.src).unwrap();
            let y = t_nodes.iter().position(|n| n == &e.dst).unwrap();
            *have.entry((x, y)).or_insert(0) += 1;
        }
        if complete {
            want == have
        } else {
            want.iter().all(|(k, v)| have.get(k).map_or(false, |h| h >= v))
        }
    }
    fn rec(
        c: &Net,
        t: &Net,
        t_nodes: &[NodeId],
        blocks: &[BTreeSet<NodeId>],
        severed: &[(usize, usize, Edge)],
        at: usize,
        assign: &mut Vec<Option<usize>>,
        used: &mut Vec<bool>,
    ) -> bool {
        if at == blocks.len() {
            return edges_ok(t, t_nodes, severed, assign);
        }
        for i in 0..t_nodes.len() {
            if used[i] || !profile_ok(c, t, &blocks[at], &t_nodes[i]) {
                continue;
            }
            assign[at] = Some(i);
            used[i] = true;
            if edges_ok(t, t_nodes, severed, assign)
                && rec(c, t, t_nodes, blocks, severed, at + 1, assign, used)
            {
                return true;
            }
            assign[at] = None;
            used[i] = false;
        }
        false
    }
    if !rec(c, t, &t_nodes, blocks, &severed, 0, &mut assign, &mut used) {
        return None;
    }

    // Build rule sides. For every t edge pick the severed edges mapped onto
    // its node pair, in deterministic order.
    let mut group_t: BTreeMap<(usize, usize), Vec<Edge>> = BTreeMap::new();
    for e in t.edges() {
        let x = t_nodes.iter().position(|n| n == &e.src).unwrap();
        let y = t_nodes.iter().position(|n| n == &e.dst).unwrap();
        group_t.entry((x, y)).or_default().push(e.clone());
    }
    let mut group_c: BTreeMap<(usize, usize), Vec<Edge>> = BTreeMap::new();
    for (bs, bd, e) in &severed {
        group_c
            .entry((assign[*bs].unwrap(), assign[*bd].unwrap()))
            .or_default()
            .push(e.clone());
    }
    // Port placement per block: tag name -> (direction, index on the target
    // node).
    let mut placements: Vec<BTreeMap<String, (Direction, usize)>> =
        vec![BTreeMap::new(); blocks.len()];
    let patterns: Vec<Net> = blocks
        .iter()
        .map(|b| induced_block_pattern(c, b))
        .collect::<Result<_>>()
        .ok()?;
    for (key, t_edges) in &group_t {
        let c_edges = group_c.get(key)?;
        if c_edges.len() != t_edges.len() {
            return None;
        }
        for (ce, te) in c_edges.iter().zip(t_edges.iter()) {
            let bs = block_of(&ce.src)?;
            let bd = block_of(&ce.dst)?;
            let src_tag = patterns[bs]
                .tag_of_port(&Port::new(&ce.src, Direction::Out, ce.out_port))?
                .to_string();
            let dst_tag = patterns[bd]
                .tag_of_port(&Port::new(&ce.dst, Direction::In, ce.in_port))?
                .to_string();
            placements[bs].insert(src_tag, (Direction::Out, te.out_port));
            placements[bd].insert(dst_tag, (Direction::In, te.in_port));
        }
    }
    // Free tags take the remaining indices in sorted order.
    let mut out: Vec<(Net, Net)> = Vec::new();
    let mut seen: BTreeMap<String, String> = BTreeMap::new();
    for (bi, pattern) in patterns.iter().enumerate() {
        let node = &t_nodes[assign[bi].unwrap()];
        let info = t.info(node).unwrap();
        let mut used_in: BTreeSet<usize> =
            placements[bi]
                .values()
                .filter(|(d, _)| *d == Direction::In)
                .map(|(_, i)| *i)
                .collect();
        let mut used_out: BTreeSet<usize> = placements[bi]
            .values()
            .filter(|(d, _)| *d == Direction::Out)
            .map(|(_, i)| *i)
            .collect();
        let mut raw = RawNet::default().node("c0", &info.letter, info.in_rank, info.out_rank);
        for (tag, port) in pattern.tags() {
            let (dir, idx) = match placements[bi].get(tag) {
                Some(&(d, i)) => (d, i),
                None => {
                    // Genuinely unoccupied port: next free index.
                    match port.dir {
                        Direction::In => {
                            let i = (0..info.in_rank).find(|i| !used_in.contains(i))?;
                            used_in.insert(i);
                            (Direction::In, i)
                        }
                        Direction::Out => {
                            let i = (0..info.out_rank).find(|i| !used_out.contains(i))?;
                            used_out.insert(i);
                            (Direction::Out, i)
                        }
                    }
                }
            };
            raw = raw.tag(tag, "c0", dir, idx);
        }
        let right = Net::validate(&raw, None).ok()?;
        let left_key = canon::canonical_key_tagged(&pattern.with_id_prefix("k_"));
        let right_key = canon::canonical_key_tagged(&right);
        match seen.get(&left_key) {
            Some(prev) if prev != &right_key => return None,
            Some(_) => continue,
            None => {
                seen.insert(left_key, right_key);
                out.push((pattern.clone(), right));
            }
        }
    }
    Some(out)
}

/// Expansion candidates: every node of `base` replaced by a one- or
/// two-node blob with the same outward port profile, fresh letters
/// throughout, bounded by `max_nodes` total.
fn expansions(base: &Net, max_nodes: usize, fresh: &mut FreshSupply) -> Vec<Net> {
    #[derive(Clone)]
    struct Blob {
        // For each original port: which blob member and which index.
        in_map: Vec<(usize, usize)>,
        out_map: Vec<(usize, usize)>,
        // (in_rank, out_rank) per member.
        members: Vec<(usize, usize)>,
        // internal edges (member, out idx, member, in idx)
        internal: Vec<(usize, usize, usize, usize)>,
    }
    let ids: Vec<NodeId> = base.node_ids().cloned().collect();
    let mut options: Vec<Vec<Blob>> = Vec::new();
    for id in &ids {
        let info = base.info(id).unwrap();
        let mut opts = Vec::new();
        // Identity blob.
        opts.push(Blob {
            in_map: (0..info.in_rank).map(|i| (0, i)).collect(),
            out_map: (0..info.out_rank).map(|i| (0, i)).collect(),
            members: vec![(info.in_rank, info.out_rank)],
            internal: Vec::new(),
        });
        // Two-member chains: each original port goes to member 0 or 1; the
        // chain link runs 0 -> 1.
        let total = info.in_rank + info.out_rank;
        if total <= 6 {
            for mask in 0..(1u32 << total) {
                let mut in_map = Vec::new();
                let mut out_map = Vec::new();
                let mut counts = [(0usize, 0usize); 2];
                for i in 0..info.in_rank {
                    let m = ((mask >> i) & 1) as usize;
                    in_map.push((m, counts[m].0));
                    counts[m].0 += 1;
                }
                for o in 0..info.out_rank {
                    let m = ((mask >> (info.in_rank + o)) & 1) as usize;
                    out_map.push((m, counts[m].1));
                    counts[m].1 += 1;
                }
                // Link: member 0 out -> member 1 in, appended last.
                let link_out = counts[0].1;
                let link_in = counts[1].0;
                opts.push(Blob {
                    in_map,
                    out_map,
                    members: vec![
                        (counts[0].0, counts[0].1 + 1),
                        (counts[1].0 + 1, counts[1].1),
                    ],
                    internal: vec![(0, link_out, 1, link_in)],
                });
            }
        }
        options.push(opts);
    }
    // Cartesian product bounded by total size.
    let mut out = Vec::new();
    let mut idx = vec![0usize; ids.len()];
    let cap = 20_000usize;
    'outer: loop {
        let total: usize = idx
            .iter()
            .enumerate()
            .map(|(i, &k)| options[i][k].members.len())
            .sum();
        if total <= max_nodes {
            let mut raw = RawNet::default();
            let mut letter_counter = 0usize;
            let mut port_map: BTreeMap<(NodeId, Direction, usize), (String, usize)> =
                BTreeMap::new();
            for (i, id) in ids.iter().enumerate() {
                let blob = &options[i][idx[i]];
                for (m, &(ir, or)) in blob.members.iter().enumerate() {
                    let letter = format!("{}o{letter_counter}", fresh_prefix_of(fresh));
                    letter_counter += 1;
                    raw = raw.node(&format!("x{i}_{m}"), &letter, ir, or);
                }
                for &(ms, op, md, ip) in &blob.internal {
                    raw = raw.edge(&format!("x{i}_{ms}"), op, &format!("x{i}_{md}"), ip);
                }
                let info = base.info(id).unwrap();
                for p in 0..info.in_rank {
                    let (m, pi) = blob.in_map[p];
                    port_map.insert(
                        (id.clone(), Direction::In, p),
                        (format!("x{i}_{m}"), pi),
                    );
                }
                for p in 0..info.out_rank {
                    let (m, pi) = blob.out_map[p];
                    port_map.insert(
                        (id.clone(), Direction::Out, p),
                        (format!("x{i}_{m}"), pi),
                    );
                }
            }
            for e in base.edges() {
                let (sn, sp) = &port_map[&(e.src.clone(), Direction::Out, e.out_port)];
                let (dn, dp) = &port_map[&(e.dst.clone(), Direction::In, e.in_port)];
                raw = raw.edge(sn, *sp, dn, *dp);
            }
            if let Ok(net) = Net::validate(&raw, None) {
                out.push(net);
                if out.len() >= cap {
                    break 'outer;
                }
            }
        }
        // Advance.
        let mut i = 0;
        loop {
            if i == idx.len() {
                break 'outer;
            }
            idx[i] += 1;
            if idx[i] < options[i].len() {
                break;
            }
            idx[i] = 0;
            i += 1;
        }
    }
    out
}

fn fresh_prefix_of(fresh: &mut FreshSupply) -> String {
    // The mint namespace is enough: expansion letters piggyback on the
    // supply's prefix so they stay outside user alphabets.
    let probe = fresh.mint();
    let p: String = probe.chars().take(1).collect();
    p
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::net::fixtures::{c1, d1, d2};

    #[test]
    fn sisters_by_counts() {
        let d1j = Jungle::singleton(d1());
        let c1j = Jungle::singleton(c1());
        let d2j = Jungle::singleton(d2());
        assert!(abstract_sisters(&d1j, &c1j, SisterMode::Total));
        assert!(abstract_sisters(&d1j, &c1j, SisterMode::Split));
        assert!(!abstract_sisters(&d1j, &d2j, SisterMode::Total));
        assert!(abstract_sisters(&d1j, &d1j, SisterMode::Total));
    }

    #[test]
    fn characterization_on_d1_concept() {
        // Concept of D1 under the two-block partition: fresh 2-node net.
        let c = d1();
        let spec = PartitionSpec::parse(&c, "n1|n2").unwrap();
        let mut fresh = FreshSupply::new("%", "c");
        let w = crate::prns::synthesize_prns(&c, &spec, &mut fresh).unwrap();
        let up = concept(&w.rns, &Jungle::singleton(c.clone())).unwrap();
        let b = up.iter().next().unwrap();
        let r = characterization_check(&c, b).unwrap();
        assert!(r.possible);
        assert_eq!(r.witness.unwrap().blocks.len(), 2);
    }

    #[test]
    fn characterization_rejects_wrong_profile() {
        // Single fresh node with 3 ports cannot be a partition result of D1.
        let b = Net::validate(&RawNet::default().node("z", "%z", 2, 1), None).unwrap();
        let r = characterization_check(&d1(), &b).unwrap();
        assert!(!r.possible);
    }

    #[test]
    fn characterization_rejects_shared_letters() {
        let b = Net::validate(&RawNet::default().node("z", "f", 2, 1), None).unwrap();
        let r = characterization_check(&d1(), &b).unwrap();
        assert!(!r.possible);
    }

    #[test]
    fn single_node_closed_form() {
        let a = c1();
        let b = Net::validate(&RawNet::default().node("z", "v1", 1, 1), None).unwrap();
        let mut fresh = FreshSupply::new("%", "c");
        match search_common_origin(&a, &b, 1, &mut fresh).unwrap() {
            OriginOutcome::Witness(w) => {
                assert!(verify_origin(&w, &a, &b));
                assert_eq!(w.origin.node_count(), 1);
            }
            OriginOutcome::Exhausted { .. } => panic!("closed form should find a witness"),
        }
    }

    #[test]
    fn chain_witness_found() {
        // a = C1, b = a 2-node chain with delta (1,1).
        let a = c1();
        let b = Net::validate(
            &RawNet::default()
                .node("m1", "g1", 1, 1)
                .node("m2", "g2", 1, 1)
                .edge("m1", 0, "m2", 0),
            None,
        )
        .unwrap();
        let mut fresh = FreshSupply::new("%", "c");
        match search_common_origin(&a, &b, 2, &mut fresh).unwrap() {
            OriginOutcome::Witness(w) => {
                assert_eq!(w.origin.node_count(), 2);
                assert!(verify_origin(&w, &a, &b));
                // One-block contraction on the a side, per-node on b's.
                assert_eq!(w.w_a.rns.rules.len(), 1);
                assert_eq!(w.w_b.rns.rules.len(), 2);
            }
            OriginOutcome::Exhausted { candidates_tried } => {
                panic!("expected witness, tried {candidates_tried}")
            }
        }
    }

    #[test]
    fn not_sisters_short_circuits() {
        let mut fresh = FreshSupply::new("%", "c");
        assert!(matches!(
            search_common_origin(&d1(), &d2(), 3, &mut fresh),
            Err(Error::NotSisters)
        ));
    }
}
