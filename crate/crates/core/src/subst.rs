//! Net substitution: replacing variable leaves by tied images.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::alphabet::LetterKind;
use crate::canon::{self, EqMode};
use crate::error::{Error, Result};
use crate::hom::split_components;
use crate::matching;
use crate::net::{Direction, Edge, Jungle, Net, NodeId, Port};

/// Image of one variable: a net together with the designated unoccupied
/// ports gluing it where the variable sat. `net == None` is the empty image,
/// which deletes the variable and leaves the occupied arity unoccupied.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TiedImage {
    pub net: Option<Net>,
    pub out_tie: Option<Port>,
    pub in_tie: Option<Port>,
}

impl TiedImage {
    pub fn empty() -> TiedImage {
        TiedImage {
            net: None,
            out_tie: None,
            in_tie: None,
        }
    }

    pub fn via_out(net: Net, out_tie: Port) -> TiedImage {
        TiedImage {
            net: Some(net),
            out_tie: Some(out_tie),
            in_tie: None,
        }
    }

    pub fn via_in(net: Net, in_tie: Port) -> TiedImage {
        TiedImage {
            net: Some(net),
            in_tie: Some(in_tie),
            out_tie: None,
        }
    }

    fn check(&self, var: &str) -> Result<()> {
        if let Some(net) = &self.net {
            for (tie, dir) in [
                (&self.out_tie, Direction::Out),
                (&self.in_tie, Direction::In),
            ] {
                if let Some(p) = tie {
                    if p.dir != dir {
                        return Err(Error::DirectionMismatch(var.to_string()));
                    }
                    if net.info(&p.node).is_none() || net.is_occupied(p) {
                        return Err(Error::NoFreePortOnImage {
                            var: var.to_string(),
                            dir: dir.word(),
                        });
                    }
                }
            }
        }
        Ok(())
    }
}

pub type Binding = BTreeMap<String, TiedImage>;

/// Shortest id prefix that cannot collide with any existing node id.
pub(crate) fn fresh_prefix(existing: impl Iterator<Item = NodeId>) -> String {
    let ids: Vec<String> = existing.map(|n| n.0).collect();
    let mut p = "w".to_string();
    while ids.iter().any(|i| i.starts_with(&p)) {
        p.push('w');
    }
    p.push('_');
    p
}

/// Replaces every variable node of `t` by its image. Each occurrence gets a
/// private copy of the image. The result can fall apart when images are
/// empty, so a jungle is returned.
pub fn apply_substitution(binding: &Binding, t: &Net) -> Result<Jungle> {
    for (v, img) in binding {
        img.check(v)?;
    }
    let mut nodes: BTreeMap<NodeId, crate::net::NodeInfo> = BTreeMap::new();
    let mut edges: std::collections::BTreeSet<Edge> = std::collections::BTreeSet::new();
    let mut tags: BTreeMap<String, Port> = BTreeMap::new();

    let vars: Vec<(NodeId, String)> = t
        .nodes()
        .filter(|(_, i)| i.kind == LetterKind::Frontier)
        .map(|(id, i)| (id.clone(), i.letter.clone()))
        .collect();
    for (id, info) in t.nodes() {
        if info.kind != LetterKind::Frontier {
            nodes.insert(id.clone(), info.clone());
        }
    }
    for (name, port) in t.tags() {
        if t.info(&port.node).map(|i| i.kind) == Some(LetterKind::Ranked) {
            tags.insert(name.clone(), port.clone());
        }
    }
    // Edges not touching any variable copy over unchanged.
    let var_ids: std::collections::BTreeSet<&NodeId> = vars.iter().map(|(id, _)| id).collect();
    for e in t.edges() {
        if !var_ids.contains(&e.src) && !var_ids.contains(&e.dst) {
            edges.insert(e.clone());
        }
    }

    let prefix = fresh_prefix(t.node_ids().cloned());
    for (k, (vid, name)) in vars.iter().enumerate() {
        let image = binding
            .get(name)
            .ok_or_else(|| Error::GeneratorUnmapped(name.clone()))?;
        let occ_prefix = format!("{prefix}{k}_");
        let copied = image.net.as_ref().map(|n| n.with_id_prefix(&occ_prefix));
        if let Some(c) = &copied {
            for (nid, ninfo) in c.nodes() {
                nodes.insert(nid.clone(), ninfo.clone());
            }
            for e in c.edges() {
                edges.insert(e.clone());
            }
        }
        let lift = |p: &Port| Port {
            node: NodeId(format!("{occ_prefix}{}", p.node)),
            dir: p.dir,
            index: p.index,
        };
        // Re-route the variable's ties.
        for e in t.edges() {
            if &e.src == vid && &e.dst == vid {
                return Err(Error::DirectionMismatch(name.clone()));
            } else if &e.src == vid {
                // Variable's out side occupied the target in-port.
                match (&copied, &image.out_tie) {
                    (Some(_), Some(p)) => {
                        let lifted = lift(p);
                        edges.insert(Edge {
                            src: lifted.node,
                            out_port: lifted.index,
                            dst: e.dst.clone(),
                            in_port: e.in_port,
                        });
                    }
                    (Some(_), None) => {
                        return Err(Error::NoFreePortOnImage {
                            var: name.clone(),
                            dir: "out",
                        })
                    }
                    (None, _) => {}
                }
            } else if &e.dst == vid {
                match (&copied, &image.in_tie) {
                    (Some(_), Some(p)) => {
                        let lifted = lift(p);
                        edges.insert(Edge {
                            src: e.src.clone(),
                            out_port: e.out_port,
                            dst: lifted.node,
                            in_port: lifted.index,
                        });
                    }
                    (Some(_), None) => {
                        return Err(Error::NoFreePortOnImage {
                            var: name.clone(),
                            dir: "in",
                        })
                    }
                    (None, _) => {}
                }
            }
        }
    }

    let whole = Net::from_parts(nodes, edges, tags);
    Ok(split_components(&whole))
}

/// Whether `t` is an instance of `s`: some binding with images of at most
/// `bound` nodes makes the substituted `s` strictly equal to `t`. Decided by
/// full-coverage matching of `s` into `t`.
pub fn is_instance(t: &Net, s: &Net, bound: usize) -> bool {
    let host = Jungle::singleton(t.clone());
    for m in matching::find_pattern_matches(s, &host) {
        let covered: std::collections::BTreeSet<NodeId> = m
            .node_map
            .values()
            .cloned()
            .chain(m.binding.values().flat_map(|b| b.host_nodes.iter().cloned()))
            .collect();
        if covered.len() != t.node_count() {
            continue;
        }
        if m.binding
            .values()
            .any(|b| b.image.net.as_ref().map_or(0, |n| n.node_count()) > bound)
        {
            continue;
        }
        // Boundary ports of the pattern must meet unoccupied host ports:
        // full coverage already forbids outward edges, so only gluability
        // is left to check.
        if !m.gluable {
            continue;
        }
        // Confirm by substituting back.
        let binding: Binding = m
            .binding
            .iter()
            .map(|(k, b)| (k.clone(), b.image.clone()))
            .collect();
        if let Ok(j) = apply_substitution(&binding, s) {
            if j.len() == 1 && canon::nets_equal(j.iter().next().unwrap(), t, EqMode::Strict) {
                return true;
            }
        }
    }
    false
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::net::fixtures::d1;
    use crate::net::RawNet;

    fn f_of_x() -> Net {
        Net::validate(
            &RawNet::default()
                .node("n1", "f", 2, 1)
                .var("v", "x")
                .edge("v", 0, "n1", 0),
            None,
        )
        .unwrap()
    }

    fn a_node() -> Net {
        Net::validate(&RawNet::default().node("n2", "a", 0, 1), None).unwrap()
    }

    #[test]
    fn substitute_ground_into_pattern_gives_d1() {
        let mut b = Binding::new();
        b.insert(
            "x".to_string(),
            TiedImage::via_out(a_node(), Port::new(&NodeId::new("n2"), Direction::Out, 0)),
        );
        let j = apply_substitution(&b, &f_of_x()).unwrap();
        assert_eq!(j.len(), 1);
        assert!(canon::nets_equal(j.iter().next().unwrap(), &d1(), EqMode::Strict));
    }

    #[test]
    fn empty_image_unoccupies_the_arity() {
        let mut b = Binding::new();
        b.insert("x".to_string(), TiedImage::empty());
        let j = apply_substitution(&b, &f_of_x()).unwrap();
        assert_eq!(j.len(), 1);
        let n = j.iter().next().unwrap();
        assert_eq!(n.node_count(), 1);
        assert_eq!(n.delta(), (3, 2, 1));
    }

    #[test]
    fn direction_checked() {
        let mut b = Binding::new();
        b.insert(
            "x".to_string(),
            TiedImage {
                net: Some(a_node()),
                out_tie: Some(Port::new(&NodeId::new("n2"), Direction::Out, 0)),
                in_tie: Some(Port::new(&NodeId::new("n2"), Direction::Out, 0)),
            },
        );
        assert!(matches!(
            apply_substitution(&b, &f_of_x()),
            Err(Error::DirectionMismatch(_))
        ));
    }

    #[test]
    fn d1_is_instance_of_pattern() {
        assert!(is_instance(&d1(), &f_of_x(), 1));
        // Bound 0 excludes the one-node image.
        assert!(!is_instance(&d1(), &f_of_x(), 0));
    }
}
