//! Transducers: staged pipelines of renetting-system sets with step budgets.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::net::Jungle;
use crate::rewrite;
use crate::rule::Rns;

/// One pipeline stage. In sweep mode the stage applies its systems `budget`
/// times; in normal-form mode it derives to irreducible nets within the
/// budget.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Stage {
    pub systems: Vec<Rns>,
    pub budget: usize,
    pub normal_form: bool,
}

impl Stage {
    pub fn sweep(systems: Vec<Rns>, budget: usize) -> Stage {
        Stage {
            systems,
            budget,
            normal_form: false,
        }
    }

    pub fn to_normal_form(systems: Vec<Rns>, budget: usize) -> Stage {
        Stage {
            systems,
            budget,
            normal_form: true,
        }
    }
}

/// A staged pipeline applied as a relation on jungles. The empty pipeline is
/// the trivial transducer: identity on every jungle.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Transducer {
    pub stages: Vec<Stage>,
}

impl Transducer {
    pub fn trivial() -> Transducer {
        Transducer::default()
    }

    pub fn single(stage: Stage) -> Transducer {
        Transducer {
            stages: vec![stage],
        }
    }

    pub fn is_trivial(&self) -> bool {
        self.stages.is_empty()
    }

    pub fn stage_count(&self) -> usize {
        self.stages.len()
    }

    /// Total of all stage budgets.
    pub fn step_total(&self) -> usize {
        self.stages.iter().map(|s| s.budget).sum()
    }

    /// The normal-form pipeline: every stage switched to normal-form
    /// application.
    pub fn normal_form_td(&self) -> Transducer {
        Transducer {
            stages: self
                .stages
                .iter()
                .map(|s| Stage {
                    systems: s.systems.clone(),
                    budget: s.budget,
                    normal_form: true,
                })
                .collect(),
        }
    }
}

/// Applies the pipeline stage by stage. Stage failures carry the stage id.
pub fn apply_transducer(td: &Transducer, start: &Jungle) -> Result<Jungle> {
    let mut current = start.clone();
    for (i, stage) in td.stages.iter().enumerate() {
        if stage.normal_form {
            current = rewrite::normal_forms(&stage.systems, &current, stage.budget)
                .map_err(|e| match e {
                    Error::BudgetExhausted(_) => Error::StageBudgetExhausted { stage: i },
                    other => other,
                })?;
        } else {
            for _ in 0..stage.budget {
                current = rewrite::apply_many(&stage.systems, &current)?;
            }
        }
    }
    Ok(current)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::net::fixtures::d1;
    use crate::net::{Direction, Net, RawNet};
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

    #[test]
    fn single_stage_equals_apply() {
        let td = Transducer::single(Stage::sweep(vec![relabel("r1", "f", "h")], 1));
        let out = apply_transducer(&td, &Jungle::singleton(d1())).unwrap();
        let direct =
            rewrite::apply_rns(&relabel("r1", "f", "h"), &Jungle::singleton(d1())).unwrap();
        assert!(out.set_eq(&direct));
    }

    #[test]
    fn trivial_pipeline_is_identity() {
        let td = Transducer::trivial();
        let j = Jungle::singleton(d1());
        let out = apply_transducer(&td, &j).unwrap();
        assert!(out.set_eq(&j));
    }

    #[test]
    fn two_stages_compose() {
        let td = Transducer {
            stages: vec![
                Stage::sweep(vec![relabel("a", "f", "h")], 1),
                Stage::sweep(vec![relabel("b", "h", "k")], 1),
            ],
        };
        let out = apply_transducer(&td, &Jungle::singleton(d1())).unwrap();
        let expect = Net::validate(
            &RawNet::default()
                .node("n1", "k", 2, 1)
                .node("n2", "a", 0, 1)
                .edge("n2", 0, "n1", 0),
            None,
        )
        .unwrap();
        assert!(out.set_eq(&Jungle::singleton(expect)));
    }

    #[test]
    fn stage_budget_exhaustion_carries_stage_id() {
        // A growing rule to a normal-form stage with a tiny budget.
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
        let grow = Rns::new(
            "grow",
            vec![Rule::single(
                "grow",
                RulePreform::new(left, vec![right]).unwrap(),
            )],
        );
        let td = Transducer::single(Stage::to_normal_form(vec![grow], 2));
        let host = Jungle::singleton(crate::net::fixtures::d2());
        match apply_transducer(&td, &host) {
            Err(Error::StageBudgetExhausted { stage }) => assert_eq!(stage, 0),
            other => panic!("expected stage budget exhaustion, got {other:?}"),
        }
    }
}
