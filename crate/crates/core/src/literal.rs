use serde::{Deserialize, Serialize};
use std::collections::BTreeSet;
use std::fmt;

/// A propositional atom, identified by name.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Atom(pub String);

impl Atom {
    pub fn new(name: impl Into<String>) -> Self {
        Atom(name.into())
    }

    pub fn name(&self) -> &str {
        &self.0
    }
}

impl fmt::Display for Atom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl From<&str> for Atom {
    fn from(s: &str) -> Self {
        Atom(s.to_string())
    }
}

/// An atom or its negation. Negation is involutive: `lit.negate().negate() == lit`.
///
/// The textual form is the atom name, prefixed with `!` when negated. Atom
/// names therefore must not start with `!`.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Literal {
    pub atom: Atom,
    pub negated: bool,
}

impl Literal {
    pub fn pos(atom: impl Into<Atom>) -> Self {
        Literal { atom: atom.into(), negated: false }
    }

    pub fn neg(atom: impl Into<Atom>) -> Self {
        Literal { atom: atom.into(), negated: true }
    }

    pub fn negate(&self) -> Self {
        Literal { atom: self.atom.clone(), negated: !self.negated }
    }

    pub fn is_positive(&self) -> bool {
        !self.negated
    }

    /// Parse the `name` / `!name` syntax.
    pub fn parse(s: &str) -> Result<Self, LiteralParseError> {
        let (negated, name) = match s.strip_prefix('!') {
            Some(rest) => (true, rest),
            None => (false, s),
        };
        if name.is_empty() || name.starts_with('!') {
            return Err(LiteralParseError(s.to_string()));
        }
        Ok(Literal { atom: Atom::new(name), negated })
    }
}

impl fmt::Display for Literal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.negated {
            write!(f, "!{}", self.atom)
        } else {
            write!(f, "{}", self.atom)
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("cannot parse literal from {0:?}")]
pub struct LiteralParseError(pub String);

impl Serialize for Literal {
    fn serialize<S: serde::Serializer>(&self, ser: S) -> Result<S::Ok, S::Error> {
        ser.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for Literal {
    fn deserialize<D: serde::Deserializer<'de>>(de: D) -> Result<Self, D::Error> {
        let s = String::deserialize(de)?;
        Literal::parse(&s).map_err(serde::de::Error::custom)
    }
}

/// A set of literals is consistent when it never contains an atom both
/// positively and negatively.
pub fn is_consistent<'a, I>(lits: I) -> bool
where
    I: IntoIterator<Item = &'a Literal>,
{
    let mut seen: BTreeSet<&Literal> = BTreeSet::new();
    for lit in lits {
        if seen.contains(&lit.negate()) {
            return false;
        }
        seen.insert(lit);
    }
    true
}

/// Complement every literal in a set.
pub fn negate(set: &BTreeSet<Literal>) -> BTreeSet<Literal> {
    set.iter().map(Literal::negate).collect()
}

/// Convenience constructor: parse a slice of `name` / `!name` strings.
pub fn lits(items: &[&str]) -> BTreeSet<Literal> {
    items
        .iter()
        .map(|s| Literal::parse(s).expect("literal syntax"))
        .collect()
}
