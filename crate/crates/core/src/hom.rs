//! Net homomorphisms: node-wise replacement of letters by image nets with
//! edge re-routing through designated placeholder ports.

use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

use crate::alphabet::LetterKind;
use crate::canon::{self, EqMode};
use crate::error::{Error, Result};
use crate::net::{Direction, Edge, Jungle, Net, NodeId, NodeInfo, Port, RawNet};
use crate::rule::ThreeValued;

/// Image of a ranked letter: a net plus, for every source port, the list of
/// image ports that inherit the source port's edge. An empty list deletes
/// the connection; more than one port duplicates it.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct HomImage {
    pub net: Net,
    pub in_ports: Vec<Vec<Port>>,
    pub out_ports: Vec<Vec<Port>>,
}

impl HomImage {
    /// Single-node image with identity port wiring.
    pub fn alphabetic(letter: &str, in_rank: usize, out_rank: usize) -> HomImage {
        let net = Net::validate(
            &RawNet::default().node("m", letter, in_rank, out_rank),
            None,
        )
        .expect("single node");
        let id = NodeId::new("m");
        HomImage {
            in_ports: (0..in_rank)
                .map(|i| vec![Port::new(&id, Direction::In, i)])
                .collect(),
            out_ports: (0..out_rank)
                .map(|i| vec![Port::new(&id, Direction::Out, i)])
                .collect(),
            net,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub enum LetterImage {
    /// Replace the letter, keeping ranks and port wiring.
    Rename(String),
    Image(HomImage),
}

/// A letter table driving a net homomorphism. Letters absent from the table
/// map identically.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct LetterTable {
    pub entries: BTreeMap<String, LetterImage>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
pub enum HomLabel {
    DownLinear,
    UpLinear,
    DownPreserving,
    DownDeleting,
    UpPreserving,
    UpDeleting,
    DownAlphabetic,
}

impl LetterTable {
    pub fn rename(mut self, from: &str, to: &str) -> Self {
        self.entries
            .insert(from.to_string(), LetterImage::Rename(to.to_string()));
        self
    }

    pub fn image(mut self, from: &str, image: HomImage) -> Self {
        self.entries
            .insert(from.to_string(), LetterImage::Image(image));
        self
    }

    fn image_for(&self, info: &NodeInfo) -> HomImage {
        match self.entries.get(&info.letter) {
            None => identity_image(info),
            Some(LetterImage::Rename(to)) => {
                let mut img = identity_image(info);
                img = HomImage {
                    net: rename_single(&img.net, to),
                    ..img
                };
                img
            }
            Some(LetterImage::Image(img)) => img.clone(),
        }
    }

    /// Classification over the letters the table actually maps, with ranks
    /// read from the supplied scope (letter -> (in, out)).
    pub fn classify(&self, scope: &BTreeMap<String, (usize, usize)>) -> BTreeSet<HomLabel> {
        let mut labels = BTreeSet::new();
        let mut down_linear = true;
        let mut up_linear = true;
        let mut down_preserving = true;
        let mut up_preserving = true;
        let mut alphabetic = true;
        for (letter, image) in &self.entries {
            let (in_rank, out_rank) = match scope.get(letter) {
                Some(&r) => r,
                None => continue,
            };
            match image {
                LetterImage::Rename(_) => {}
                LetterImage::Image(img) => {
                    if img.net.node_count() > 1 {
                        alphabetic = false;
                    }
                    for i in 0..in_rank {
                        let n = img.in_ports.get(i).map_or(0, |v| v.len());
                        if n > 1 {
                            down_linear = false;
                        }
                        if n == 0 {
                            down_preserving = false;
                        }
                    }
                    for i in 0..out_rank {
                        let n = img.out_ports.get(i).map_or(0, |v| v.len());
                        if n > 1 {
                            up_linear = false;
                        }
                        if n == 0 {
                            up_preserving = false;
                        }
                    }
                }
            }
        }
        if down_linear {
            labels.insert(HomLabel::DownLinear);
        }
        if up_linear {
            labels.insert(HomLabel::UpLinear);
        }
        if down_preserving {
            labels.insert(HomLabel::DownPreserving);
        } else {
            labels.insert(HomLabel::DownDeleting);
        }
        if up_preserving {
            labels.insert(HomLabel::UpPreserving);
        } else {
            labels.insert(HomLabel::UpDeleting);
        }
        if alphabetic {
            labels.insert(HomLabel::DownAlphabetic);
        }
        labels
    }
}

fn identity_image(info: &NodeInfo) -> HomImage {
    let raw = match info.kind {
        LetterKind::Ranked => RawNet::default().node("m", &info.letter, info.in_rank, info.out_rank),
        LetterKind::Frontier => RawNet::default().var("m", &info.letter),
    };
    let net = Net::validate(&raw, None).expect("single node");
    let id = NodeId::new("m");
    HomImage {
        in_ports: (0..info.in_rank)
            .map(|i| vec![Port::new(&id, Direction::In, i)])
            .collect(),
        out_ports: (0..info.out_rank)
            .map(|i| vec![Port::new(&id, Direction::Out, i)])
            .collect(),
        net,
    }
}

fn rename_single(net: &Net, to: &str) -> Net {
    let (id, info) = net.nodes().next().expect("single node");
    let raw = match info.kind {
        LetterKind::Ranked => RawNet::default().node(id.as_str(), to, info.in_rank, info.out_rank),
        LetterKind::Frontier => RawNet::default().var(id.as_str(), to),
    };
    Net::validate(&raw, None).expect("rename")
}

/// Applies the homomorphism node-wise. The result may fall apart when the
/// table deletes connections, so a jungle is returned.
pub fn apply_hom(table: &LetterTable, t: &Net, declared_preserving: bool) -> Result<Jungle> {
    let mut nodes: BTreeMap<NodeId, NodeInfo> = BTreeMap::new();
    let mut edges: BTreeSet<Edge> = BTreeSet::new();
    let mut wiring: BTreeMap<(NodeId, Direction, usize), Vec<Port>> = BTreeMap::new();

    for (idx, (id, info)) in t.nodes().enumerate() {
        let img = table.image_for(info);
        let prefix = format!("h{idx}_");
        let copy = img.net.with_id_prefix(&prefix);
        for (nid, ninfo) in copy.nodes() {
            nodes.insert(nid.clone(), ninfo.clone());
        }
        for e in copy.edges() {
            edges.insert(e.clone());
        }
        let lift = |p: &Port| Port {
            node: NodeId(format!("{prefix}{}", p.node)),
            dir: p.dir,
            index: p.index,
        };
        for i in 0..info.in_rank {
            let ports = img.in_ports.get(i).map_or(Vec::new(), |v| v.clone());
            if declared_preserving && ports.is_empty() && t.is_occupied(&Port::new(id, Direction::In, i))
            {
                return Err(Error::PlaceholderArityMismatch {
                    letter: info.letter.clone(),
                });
            }
            wiring.insert(
                (id.clone(), Direction::In, i),
                ports.iter().map(lift).collect(),
            );
        }
        for i in 0..info.out_rank {
            let ports = img.out_ports.get(i).map_or(Vec::new(), |v| v.clone());
            if declared_preserving
                && ports.is_empty()
                && t.is_occupied(&Port::new(id, Direction::Out, i))
            {
                return Err(Error::PlaceholderArityMismatch {
                    letter: info.letter.clone(),
                });
            }
            wiring.insert(
                (id.clone(), Direction::Out, i),
                ports.iter().map(lift).collect(),
            );
        }
    }

    for e in t.edges() {
        let outs = wiring
            .get(&(e.src.clone(), Direction::Out, e.out_port))
            .cloned()
            .unwrap_or_default();
        let ins = wiring
            .get(&(e.dst.clone(), Direction::In, e.in_port))
            .cloned()
            .unwrap_or_default();
        for (o, i) in outs.iter().zip(ins.iter()) {
            edges.insert(Edge {
                src: o.node.clone(),
                out_port: o.index,
                dst: i.node.clone(),
                in_port: i.index,
            });
        }
    }

    let whole = Net::from_parts(nodes, edges, BTreeMap::new());
    Ok(split_components(&whole))
}

/// Splits a possibly-broken net value into its connected components.
pub fn split_components(net: &Net) -> Jungle {
    let comps = net.components();
    let mut out = Jungle::new();
    for comp in comps {
        let nodes: BTreeMap<NodeId, NodeInfo> = net
            .nodes()
            .filter(|(id, _)| comp.contains(*id))
            .map(|(id, i)| (id.clone(), i.clone()))
            .collect();
        let edges: BTreeSet<Edge> = net
            .edges()
            .filter(|e| comp.contains(&e.src) && comp.contains(&e.dst))
            .cloned()
            .collect();
        let tags: BTreeMap<String, Port> = net
            .tags()
            .filter(|(_, p)| comp.contains(&p.node))
            .map(|(n, p)| (n.clone(), p.clone()))
            .collect();
        let mut piece = Net::from_parts(nodes, edges, tags);
        piece.prune_tags();
        out.insert(piece);
    }
    out
}

/// Exhaustively enumerates connected nets over the given ranked letters with
/// up to `max_nodes` nodes. Desk-scale tool backing bounded searches.
pub fn enumerate_nets(letters: &[(String, usize, usize)], max_nodes: usize) -> Vec<Net> {
    let mut out: Vec<Net> = Vec::new();
    let mut seen: BTreeSet<String> = BTreeSet::new();
    for n in 1..=max_nodes {
        let mut pick = vec![0usize; n];
        loop {
            // One node multiset (ordered tuples; dedup handles repeats).
            let mut raw = RawNet::default();
            let mut out_ports: Vec<(usize, usize)> = Vec::new();
            let mut in_ports: Vec<(usize, usize)> = Vec::new();
            for (i, &li) in pick.iter().enumerate() {
                let (l, ir, or) = &letters[li];
                raw = raw.node(&format!("e{i}"), l, *ir, *or);
                for p in 0..*or {
                    out_ports.push((i, p));
                }
                for p in 0..*ir {
                    in_ports.push((i, p));
                }
            }
            // Every assignment out-port -> Option<in-port>, injective on
            // used in-ports.
            let m = out_ports.len();
            let mut assign = vec![0usize; m];
            loop {
                let mut used = BTreeSet::new();
                let mut ok = true;
                let mut r = raw.clone();
                for (oi, &a) in assign.iter().enumerate() {
                    if a == 0 {
                        continue;
                    }
                    let ip = a - 1;
                    if !used.insert(ip) {
                        ok = false;
                        break;
                    }
                    let (sn, sp) = out_ports[oi];
                    let (dn, dp) = in_ports[ip];
                    r = r.edge(&format!("e{sn}"), sp, &format!("e{dn}"), dp);
                }
                if ok {
                    if let Ok(net) = Net::validate(&r, None) {
                        let key = canon::canonical_key(&net, EqMode::Strict);
                        if seen.insert(key) {
                            out.push(net);
                        }
                    }
                }
                // Advance assignment counter.
                let mut i = 0;
                loop {
                    if i == m {
                        break;
                    }
                    assign[i] += 1;
                    if assign[i] <= in_ports.len() {
                        break;
                    }
                    assign[i] = 0;
                    i += 1;
                }
                if i == m {
                    break;
                }
                if m == 0 {
                    break;
                }
            }
            // Advance letter tuple.
            let mut i = 0;
            loop {
                if i == n {
                    break;
                }
                pick[i] += 1;
                if pick[i] < letters.len() {
                    break;
                }
                pick[i] = 0;
                i += 1;
            }
            if i == n {
                break;
            }
        }
    }
    out
}

/// Bounded search for a net homomorphism witnessing `hom(left) = right`.
/// `bound` caps the node count of per-letter images. Yes carries a witness;
/// No is only reported when the bound makes the search exhaustive.
pub fn monadic_witness(left: &Net, right: &Net, bound: usize) -> ThreeValued {
    let bound = bound.max(1);
    let left_ranked: Vec<(String, usize, usize)> = {
        let mut seen = BTreeSet::new();
        left.nodes()
            .filter(|(_, i)| i.kind == LetterKind::Ranked)
            .filter(|(_, i)| seen.insert(i.letter.clone()))
            .map(|(_, i)| (i.letter.clone(), i.in_rank, i.out_rank))
            .collect()
    };
    let left_vars: Vec<String> = left.variable_names().into_iter().collect();
    let right_letters: Vec<(String, usize, usize)> = {
        let mut seen = BTreeSet::new();
        right
            .nodes()
            .filter(|(_, i)| i.kind == LetterKind::Ranked)
            .filter(|(_, i)| seen.insert(i.letter.clone()))
            .map(|(_, i)| (i.letter.clone(), i.in_rank, i.out_rank))
            .collect()
    };
    let right_vars: Vec<String> = right.variable_names().into_iter().collect();

    // Candidate images per ranked letter: all nets over the right-side
    // alphabet up to the bound, under every placeholder assignment.
    let pool = enumerate_nets(&right_letters, bound.min(right.node_count()));
    let mut candidates: Vec<Vec<HomImage>> = Vec::new();
    for (_, ir, or) in &left_ranked {
        let mut cands = Vec::new();
        for img_net in &pool {
            let free = img_net.unoccupied_ports();
            let free_in: Vec<&Port> = free.iter().filter(|p| p.dir == Direction::In).collect();
            let free_out: Vec<&Port> = free.iter().filter(|p| p.dir == Direction::Out).collect();
            // Injective partial assignments; linear images only (one
            // placeholder per source port, possibly none).
            let in_assignments = injective_options(*ir, &free_in);
            let out_assignments = injective_options(*or, &free_out);
            for ia in &in_assignments {
                for oa in &out_assignments {
                    cands.push(HomImage {
                        net: img_net.clone(),
                        in_ports: ia.clone(),
                        out_ports: oa.clone(),
                    });
                }
            }
        }
        candidates.push(cands);
    }
    let var_targets: Vec<Vec<String>> = left_vars
        .iter()
        .map(|_| right_vars.clone())
        .collect();

    // Cartesian search.
    let mut idx = vec![0usize; left_ranked.len() + left_vars.len()];
    let sizes: Vec<usize> = candidates
        .iter()
        .map(|c| c.len())
        .chain(var_targets.iter().map(|v| v.len().max(1)))
        .collect();
    if sizes.iter().any(|&s| s == 0) {
        // No image candidates for some letter at this bound.
        return if bound >= right.node_count() {
            ThreeValued::No
        } else {
            ThreeValued::Unknown
        };
    }
    loop {
        let mut table = LetterTable::default();
        for (k, (l, _, _)) in left_ranked.iter().enumerate() {
            table = table.image(l, candidates[k][idx[k]].clone());
        }
        let mut var_ok = true;
        for (k, v) in left_vars.iter().enumerate() {
            if var_targets[k].is_empty() {
                var_ok = false;
                break;
            }
            table = table.rename(v, &var_targets[k][idx[left_ranked.len() + k]]);
        }
        if var_ok {
            if let Ok(j) = apply_hom(&table, left, false) {
                if j.len() == 1 && canon::nets_equal(j.iter().next().unwrap(), right, EqMode::Strict)
                {
                    return ThreeValued::Yes;
                }
            }
        }
        // Advance.
        let mut i = 0;
        loop {
            if i == idx.len() {
                break;
            }
            idx[i] += 1;
            if idx[i] < sizes[i] {
                break;
            }
            idx[i] = 0;
            i += 1;
        }
        if i == idx.len() {
            break;
        }
        if idx.is_empty() {
            break;
        }
    }
    if bound >= right.node_count() {
        ThreeValued::No
    } else {
        ThreeValued::Unknown
    }
}

/// All ways to give each of `rank` source ports at most one distinct free
/// port from the pool.
fn injective_options(rank: usize, pool: &[&Port]) -> Vec<Vec<Vec<Port>>> {
    let mut out = Vec::new();
    let mut choice = vec![0usize; rank];
    // 0 = none, i+1 = pool[i]
    loop {
        let mut used = BTreeSet::new();
        let mut ok = true;
        let mut v: Vec<Vec<Port>> = Vec::with_capacity(rank);
        for &c in &choice {
            if c == 0 {
                v.push(Vec::new());
            } else {
                if !used.insert(c - 1) {
                    ok = false;
                    break;
                }
                v.push(vec![pool[c - 1].clone()]);
            }
        }
        if ok {
            out.push(v);
        }
        let mut i = 0;
        loop {
            if i == rank {
                break;
            }
            choice[i] += 1;
            if choice[i] <= pool.len() {
                break;
            }
            choice[i] = 0;
            i += 1;
        }
        if i == rank {
            break;
        }
        if rank == 0 {
            break;
        }
    }
    if rank == 0 {
        return vec![Vec::new()];
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::net::fixtures::d1;

    #[test]
    fn identity_table_is_identity() {
        let d1 = d1();
        let j = apply_hom(&LetterTable::default(), &d1, true).unwrap();
        assert_eq!(j.len(), 1);
        assert!(canon::nets_equal(j.iter().next().unwrap(), &d1, EqMode::Strict));
    }

    #[test]
    fn chain_image_splices() {
        // f -> chain g;k (g(2,1) feeding k(1,1)): in-ports on g, out on k.
        let chain = Net::validate(
            &RawNet::default()
                .node("g", "g", 2, 1)
                .node("k", "k", 1, 1)
                .edge("g", 0, "k", 0),
            None,
        )
        .unwrap();
        let gid = NodeId::new("g");
        let kid = NodeId::new("k");
        let img = HomImage {
            net: chain,
            in_ports: vec![
                vec![Port::new(&gid, Direction::In, 0)],
                vec![Port::new(&gid, Direction::In, 1)],
            ],
            out_ports: vec![vec![Port::new(&kid, Direction::Out, 0)]],
        };
        let table = LetterTable::default().image("f", img);
        let j = apply_hom(&table, &d1(), true).unwrap();
        assert_eq!(j.len(), 1);
        let n = j.iter().next().unwrap();
        assert_eq!(n.node_count(), 3);
        assert_eq!(n.delta(), (2, 1, 1));
        let mut scope = BTreeMap::new();
        scope.insert("f".to_string(), (2usize, 1usize));
        let labels = table.classify(&scope);
        assert!(labels.contains(&HomLabel::DownPreserving));
        assert!(labels.contains(&HomLabel::DownLinear));
        assert!(!labels.contains(&HomLabel::DownAlphabetic));
    }

    #[test]
    fn deleting_placeholder_classified_and_enforced() {
        let img = HomImage {
            net: Net::validate(&RawNet::default().node("m", "g", 2, 1), None).unwrap(),
            in_ports: vec![vec![Port::new(&NodeId::new("m"), Direction::In, 0)], vec![]],
            out_ports: vec![vec![Port::new(&NodeId::new("m"), Direction::Out, 0)]],
        };
        let table = LetterTable::default().image("f", img);
        let mut scope = BTreeMap::new();
        scope.insert("f".to_string(), (2usize, 1usize));
        assert!(table.classify(&scope).contains(&HomLabel::DownDeleting));
        // D1's occupied port is in:0 which is wired, so preserving enforcement
        // passes here.
        assert!(apply_hom(&table, &d1(), true).is_ok());
    }

    #[test]
    fn monadic_relabel_found() {
        let f = Net::validate(&RawNet::default().node("n", "f", 2, 1), None).unwrap();
        let h = Net::validate(&RawNet::default().node("n", "h", 2, 1), None).unwrap();
        assert_eq!(monadic_witness(&f, &h, 1), ThreeValued::Yes);
        assert_eq!(monadic_witness(&f, &f, 1), ThreeValued::Yes);
    }

    #[test]
    fn enumerate_small() {
        let nets = enumerate_nets(&[("a".into(), 0, 1), ("u".into(), 1, 1)], 2);
        // a; u; a->u; u->u (chain); u with self loop.
        assert!(nets.len() >= 5);
        assert!(nets.iter().all(|n| n.component_count() == 1));
    }
}
