use crate::literal::{is_consistent, Literal};
use serde::{Deserialize, Serialize};
use std::collections::BTreeSet;
use std::fmt;

/// Identifier of an action inside one plan. Unique per plan, not globally.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct ActionId(pub String);

impl ActionId {
    pub fn new(name: impl Into<String>) -> Self {
        ActionId(name.into())
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }
}

impl fmt::Display for ActionId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl From<&str> for ActionId {
    fn from(s: &str) -> Self {
        ActionId(s.to_string())
    }
}

impl From<String> for ActionId {
    fn from(s: String) -> Self {
        ActionId(s)
    }
}

/// An action: a precondition set, an effect set, and a duration.
///
/// Both literal sets must be consistent. Duration is a whole number of time
/// units; zero is allowed (instantaneous bookkeeping actions use it).
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Action {
    pub id: ActionId,
    pub pre: BTreeSet<Literal>,
    pub post: BTreeSet<Literal>,
    pub duration: u32,
}

impl Action {
    pub fn new(
        id: impl Into<ActionId>,
        pre: BTreeSet<Literal>,
        post: BTreeSet<Literal>,
        duration: u32,
    ) -> Result<Self, InconsistentAction> {
        let id = id.into();
        if !is_consistent(&pre) {
            return Err(InconsistentAction { id, part: "pre" });
        }
        if !is_consistent(&post) {
            return Err(InconsistentAction { id, part: "post" });
        }
        Ok(Action { id, pre, post, duration })
    }

    /// Does this action assert `lit` as an effect?
    pub fn produces(&self, lit: &Literal) -> bool {
        self.post.contains(lit)
    }

    /// Does this action assert the opposite of `lit` as an effect?
    pub fn threatens(&self, lit: &Literal) -> bool {
        self.post.contains(&lit.negate())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("action {id} has an inconsistent {part} set")]
pub struct InconsistentAction {
    pub id: ActionId,
    pub part: &'static str,
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::literal::lits;

    #[test]
    fn constructor_rejects_inconsistent_sets() {
        assert!(Action::new("a", lits(&["p", "!p"]), lits(&[]), 1).is_err());
        assert!(Action::new("a", lits(&[]), lits(&["q", "!q"]), 1).is_err());
        let a = Action::new("a", lits(&["p"]), lits(&["!p", "q"]), 0).unwrap();
        assert_eq!(a.duration, 0);
    }

    #[test]
    fn produces_and_threatens() {
        let a = Action::new("a", lits(&[]), lits(&["p", "!q"]), 1).unwrap();
        assert!(a.produces(&Literal::pos("p")));
        assert!(a.threatens(&Literal::pos("q")));
        assert!(a.threatens(&Literal::neg("p")));
        assert!(!a.produces(&Literal::pos("q")));
    }
}
