//! A port-graph ("net") rewriting engine.
//!
//! Nets are finite labeled port-graphs: every node carries a letter with a
//! fixed in-rank and out-rank, every edge occupies exactly one out-port and
//! one in-port, and unoccupied ports form the boundary of the net. On top of
//! the data model the crate provides rule matching and renetting-system
//! application, partition/cover contraction, the abstraction relation between
//! net classes with bounded common-origin search, macro/parallel rewriting
//! transfer, finite-algebra realizations, and a memory-driven solving
//! pipeline.

pub mod alphabet;
pub mod canon;
pub mod class_algebra;
pub mod colouring;
pub mod enclose;
pub mod error;
pub mod gen;
pub mod hom;
pub mod macro_rns;
pub mod matching;
pub mod memory;
pub mod net;
pub mod netf;
pub mod parallel;
pub mod partition;
pub mod prns;
pub mod problem;
pub mod realize;
pub mod recognize;
pub mod rewrite;
pub mod rule;
pub mod sisters;
pub mod solve;
pub mod subst;
pub mod transducer;

pub use alphabet::{Alphabet, FreshSupply, LetterKind};
pub use canon::{canonical_key, nets_equal, EqMode};
pub use error::{Error, Result};
pub use net::{delta_d, structure, Direction, Edge, Jungle, Net, NodeId, Port, RawNet};
pub use rule::{Rns, Rule, RulePreform};
pub use transducer::{Stage, Transducer};
