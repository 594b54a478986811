use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// What kind of letter a node carries.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum LetterKind {
    /// An operator with fixed in- and out-rank. Ground letters are the
    /// ranked letters with in-rank 0 and out-rank 1.
    Ranked,
    /// A variable (manoeuvre letter); always rank (1, 1).
    Frontier,
}

/// The three letter namespaces: ranked operators, frontier variables, and a
/// reserved prefix for minting letters guaranteed outside any user alphabet.
/// Arity letters are not stored; a port is identified by its node, direction
/// and index, and tags give stable names to unoccupied ports.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Alphabet {
    ranked: BTreeMap<String, (usize, usize)>,
    frontier: BTreeSet<String>,
    fresh_prefix: String,
}

pub const DEFAULT_FRESH_PREFIX: &str = "%";

impl Default for Alphabet {
    fn default() -> Self {
        Alphabet {
            ranked: BTreeMap::new(),
            frontier: BTreeSet::new(),
            fresh_prefix: DEFAULT_FRESH_PREFIX.to_string(),
        }
    }
}

impl Alphabet {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn fresh_prefix(&self) -> &str {
        &self.fresh_prefix
    }

    pub fn with_fresh_prefix(mut self, prefix: &str) -> Self {
        self.fresh_prefix = prefix.to_string();
        self
    }

    /// Declares a ranked letter. Re-declaring with the same ranks is a no-op.
    pub fn add_ranked(&mut self, letter: &str, in_rank: usize, out_rank: usize) -> Result<()> {
        if self.frontier.contains(letter) {
            return Err(Error::Invalid(format!(
                "letter `{letter}` already declared as frontier"
            )));
        }
        match self.ranked.get(letter) {
            Some(&(i, o)) if (i, o) != (in_rank, out_rank) => Err(Error::RankMismatch {
                letter: letter.to_string(),
                in_rank,
                out_rank,
                decl_in: i,
                decl_out: o,
            }),
            _ => {
                self.ranked
                    .insert(letter.to_string(), (in_rank, out_rank));
                Ok(())
            }
        }
    }

    pub fn add_frontier(&mut self, letter: &str) -> Result<()> {
        if self.ranked.contains_key(letter) {
            return Err(Error::Invalid(format!(
                "letter `{letter}` already declared as ranked"
            )));
        }
        self.frontier.insert(letter.to_string());
        Ok(())
    }

    pub fn ranks(&self, letter: &str) -> Option<(usize, usize, LetterKind)> {
        if let Some(&(i, o)) = self.ranked.get(letter) {
            Some((i, o, LetterKind::Ranked))
        } else if self.frontier.contains(letter) {
            Some((1, 1, LetterKind::Frontier))
        } else {
            None
        }
    }

    pub fn is_ground(&self, letter: &str) -> bool {
        matches!(self.ranked.get(letter), Some(&(0, 1)))
    }

    pub fn ranked_letters(&self) -> impl Iterator<Item = (&str, usize, usize)> {
        self.ranked.iter().map(|(l, &(i, o))| (l.as_str(), i, o))
    }

    pub fn frontier_letters(&self) -> impl Iterator<Item = &str> {
        self.frontier.iter().map(|s| s.as_str())
    }

    pub fn contains(&self, letter: &str) -> bool {
        self.ranked.contains_key(letter) || self.frontier.contains(letter)
    }
}

/// Deterministic mint for letters outside a given scope. Minted names are
/// `<prefix><base><counter>`; the counter is monotone and names colliding
/// with the avoid set are skipped.
#[derive(Debug, Clone)]
pub struct FreshSupply {
    prefix: String,
    base: String,
    counter: usize,
    avoid: BTreeSet<String>,
}

impl FreshSupply {
    pub fn new(prefix: &str, base: &str) -> Self {
        FreshSupply {
            prefix: prefix.to_string(),
            base: base.to_string(),
            counter: 0,
            avoid: BTreeSet::new(),
        }
    }

    /// Every letter in `letters` will be skipped by `mint`.
    pub fn avoid<I: IntoIterator<Item = String>>(&mut self, letters: I) {
        self.avoid.extend(letters);
    }

    pub fn mint(&mut self) -> String {
        loop {
            let name = format!("{}{}{}", self.prefix, self.base, self.counter);
            self.counter += 1;
            if !self.avoid.contains(&name) {
                self.avoid.insert(name.clone());
                return name;
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ranks_and_kinds() {
        let mut a = Alphabet::new();
        a.add_ranked("f", 2, 1).unwrap();
        a.add_ranked("a", 0, 1).unwrap();
        a.add_frontier("x").unwrap();
        assert_eq!(a.ranks("f"), Some((2, 1, LetterKind::Ranked)));
        assert_eq!(a.ranks("x"), Some((1, 1, LetterKind::Frontier)));
        assert!(a.is_ground("a"));
        assert!(!a.is_ground("f"));
        assert_eq!(a.ranks("zz"), None);
    }

    #[test]
    fn namespaces_disjoint() {
        let mut a = Alphabet::new();
        a.add_ranked("f", 2, 1).unwrap();
        assert!(a.add_frontier("f").is_err());
        a.add_frontier("x").unwrap();
        assert!(a.add_ranked("x", 1, 1).is_err());
        assert!(a.add_ranked("f", 3, 1).is_err());
    }

    #[test]
    fn fresh_mint_skips_avoided() {
        let mut s = FreshSupply::new("%", "c");
        s.avoid(["%c0".to_string(), "%c2".to_string()]);
        assert_eq!(s.mint(), "%c1");
        assert_eq!(s.mint(), "%c3");
        assert_eq!(s.mint(), "%c4");
    }
}
