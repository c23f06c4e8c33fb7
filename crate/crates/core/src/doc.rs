//! On-disk instance format. A document is JSON with a fixed field set; the
//! canonical form (what [`save`] writes) sorts every list, stores the order
//! as its transitive reduction, and ends with a newline, so equal instances
//! produce byte-equal files. Loading closes the order again and checks that
//! every referenced name is declared before any plan type is built.
//!
//! Canonical form, byte-exactly: `serde_json::to_string_pretty` (two-space
//! indent) of the document with `atoms` sorted and deduplicated, `actions`
//! sorted by id, literal lists sorted, `order` the sorted transitive
//! reduction, `nonconc` pairs stored (lesser id, greater id) and sorted,
//! `meta` keys sorted, and a trailing `\n`.

use crate::action::{Action, ActionId};
use crate::generators::Certificate;
use crate::literal::Literal;
use crate::order::OrderRelation;
use crate::parallel::{Execution, NonConcurrency, ParallelPlan};
use crate::plan::{PartialOrderPlan, Ppi};
use serde::{Deserialize, Serialize};
use std::collections::{BTreeMap, BTreeSet};
use std::path::Path;

pub const FORMAT_VERSION: u32 = 1;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ActionDoc {
    pub id: String,
    pub pre: Vec<String>,
    pub post: Vec<String>,
    pub duration: u32,
}

/// The file-level mirror of a problem/plan pair. Literals use the `name` /
/// `!name` syntax.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InstanceDocument {
    pub format_version: u32,
    pub atoms: Vec<String>,
    pub actions: Vec<ActionDoc>,
    pub init: Vec<String>,
    pub goal: Vec<String>,
    /// Any generating set; closed on load, stored as the reduction.
    #[serde(default)]
    pub order: Vec<(String, String)>,
    #[serde(default)]
    pub nonconc: Vec<(String, String)>,
    #[serde(default)]
    pub meta: BTreeMap<String, serde_json::Value>,
}

#[derive(Debug, thiserror::Error)]
#[error("line {line}, column {column}: {message}")]
pub struct ParseError {
    pub line: usize,
    pub column: usize,
    pub message: String,
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum SemanticError {
    #[error("unsupported format version {0}")]
    UnsupportedVersion(u32),
    #[error("{context} uses atom \"{atom}\", which is not declared")]
    UndeclaredAtom { context: String, atom: String },
    #[error("{context} mentions action \"{id}\", which is not declared")]
    UndeclaredId { context: String, id: String },
    #[error("action id \"{0}\" is declared twice")]
    DuplicateActionId(String),
    #[error("{context}: cannot parse literal {text:?}")]
    BadLiteral { context: String, text: String },
    #[error("{element} asserts an atom both positively and negatively")]
    Inconsistent { element: String },
    #[error("order forms a cycle through \"{through}\"")]
    Cycle { through: String },
    #[error("nonconc pairs \"{0}\" with itself")]
    SelfNonconcurrent(String),
}

#[derive(Debug, thiserror::Error)]
pub enum LoadError {
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Parse(#[from] ParseError),
    #[error(transparent)]
    Semantic(#[from] SemanticError),
}

fn parse_literals(
    context: &str,
    texts: &[String],
    declared: &BTreeSet<&str>,
) -> Result<BTreeSet<Literal>, SemanticError> {
    let mut out = BTreeSet::new();
    for text in texts {
        let lit = Literal::parse(text).map_err(|_| SemanticError::BadLiteral {
            context: context.to_string(),
            text: text.clone(),
        })?;
        if !declared.contains(lit.atom.name()) {
            return Err(SemanticError::UndeclaredAtom {
                context: context.to_string(),
                atom: lit.atom.name().to_string(),
            });
        }
        out.insert(lit);
    }
    Ok(out)
}

impl InstanceDocument {
    /// Build the canonical document for a problem/plan pair. Declares
    /// exactly the atoms the pair mentions.
    pub fn from_parts(problem: &Ppi, pp: &ParallelPlan) -> Self {
        let mut atoms: BTreeSet<String> = BTreeSet::new();
        let mut note = |lits: &BTreeSet<Literal>| {
            atoms.extend(lits.iter().map(|l| l.atom.name().to_string()));
        };
        note(&problem.init);
        note(&problem.goal);
        let mut actions: Vec<ActionDoc> = Vec::new();
        for id in pp.plan.ids() {
            let a = pp.plan.get(id).expect("listed id");
            note(&a.pre);
            note(&a.post);
            actions.push(ActionDoc {
                id: id.0.clone(),
                pre: a.pre.iter().map(|l| l.to_string()).collect(),
                post: a.post.iter().map(|l| l.to_string()).collect(),
                duration: a.duration,
            });
        }
        actions.sort_by(|x, y| x.id.cmp(&y.id));
        InstanceDocument {
            format_version: FORMAT_VERSION,
            atoms: atoms.into_iter().collect(),
            actions,
            init: problem.init.iter().map(|l| l.to_string()).collect(),
            goal: problem.goal.iter().map(|l| l.to_string()).collect(),
            order: pp
                .plan
                .order
                .reduction()
                .into_iter()
                .map(|(a, b)| (a.0, b.0))
                .collect(),
            nonconc: pp.nonconc.pairs().iter().map(|(a, b)| (a.0.clone(), b.0.clone())).collect(),
            meta: BTreeMap::new(),
        }
    }

    pub fn with_certificate(mut self, cert: &Certificate) -> Self {
        self.meta.insert(
            "certificate".to_string(),
            serde_json::to_value(cert).expect("certificates serialize"),
        );
        self
    }

    /// The embedded certificate, if the meta table has one.
    pub fn certificate(&self) -> Option<Result<Certificate, ParseError>> {
        self.meta.get("certificate").map(|v| {
            serde_json::from_value(v.clone()).map_err(|e| ParseError {
                line: 0,
                column: 0,
                message: format!("certificate: {e}"),
            })
        })
    }

    /// Validate and convert into plan types. Checks declarations before
    /// construction so errors name the offending element.
    pub fn to_parts(&self) -> Result<(Ppi, ParallelPlan), SemanticError> {
        if self.format_version != FORMAT_VERSION {
            return Err(SemanticError::UnsupportedVersion(self.format_version));
        }
        let declared: BTreeSet<&str> = self.atoms.iter().map(String::as_str).collect();
        let mut ids: BTreeSet<&str> = BTreeSet::new();
        let mut actions = Vec::new();
        for a in &self.actions {
            if !ids.insert(&a.id) {
                return Err(SemanticError::DuplicateActionId(a.id.clone()));
            }
            let pre = parse_literals(&format!("action \"{}\"", a.id), &a.pre, &declared)?;
            let post = parse_literals(&format!("action \"{}\"", a.id), &a.post, &declared)?;
            let action = Action::new(a.id.clone(), pre, post, a.duration)
                .map_err(|_| SemanticError::Inconsistent { element: format!("action \"{}\"", a.id) })?;
            actions.push(action);
        }
        let init = parse_literals("init", &self.init, &declared)?;
        let goal = parse_literals("goal", &self.goal, &declared)?;
        let problem = Ppi::new(init, goal).map_err(|e| SemanticError::Inconsistent {
            element: e.part.to_string(),
        })?;
        let check_ids = |context: &str, pairs: &[(String, String)]| {
            for (a, b) in pairs {
                for id in [a, b] {
                    if !ids.contains(id.as_str()) {
                        return Err(SemanticError::UndeclaredId {
                            context: context.to_string(),
                            id: id.clone(),
                        });
                    }
                }
            }
            Ok(())
        };
        check_ids("order", &self.order)?;
        check_ids("nonconc", &self.nonconc)?;
        let order = OrderRelation::from_pairs(
            self.order
                .iter()
                .map(|(a, b)| (ActionId::new(a.clone()), ActionId::new(b.clone()))),
        )
        .map_err(|c| SemanticError::Cycle { through: c.through.0.clone() })?;
        if let Some((a, _)) = self.nonconc.iter().find(|(a, b)| a == b) {
            return Err(SemanticError::SelfNonconcurrent(a.clone()));
        }
        let nonconc = NonConcurrency::from_pairs(
            self.nonconc
                .iter()
                .map(|(a, b)| (ActionId::new(a.clone()), ActionId::new(b.clone()))),
        )
        .expect("reflexive pairs rejected above");
        let plan = PartialOrderPlan::new(actions, order).expect("ids deduplicated above");
        let pp = ParallelPlan::new(plan, nonconc).expect("nonconc ids checked above");
        Ok((problem, pp))
    }

    pub fn parse(text: &str) -> Result<Self, ParseError> {
        serde_json::from_str(text).map_err(|e| ParseError {
            line: e.line(),
            column: e.column(),
            message: e.to_string(),
        })
    }

    /// The canonical byte form. Assumes canonical field ordering, which
    /// [`from_parts`](Self::from_parts) guarantees; use [`canonicalize`] for
    /// arbitrary input text.
    pub fn canonical_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("documents serialize");
        s.push('\n');
        s
    }
}

/// Parse, validate, and re-emit in canonical form (meta carried over).
pub fn canonicalize(text: &str) -> Result<String, LoadError> {
    let doc = InstanceDocument::parse(text)?;
    let (problem, pp) = doc.to_parts()?;
    let mut out = InstanceDocument::from_parts(&problem, &pp);
    out.meta = doc.meta;
    Ok(out.canonical_json())
}

pub fn load(path: impl AsRef<Path>) -> Result<(Ppi, ParallelPlan), LoadError> {
    let (parts, _) = load_with_document(path)?;
    Ok(parts)
}

pub fn load_with_document(
    path: impl AsRef<Path>,
) -> Result<((Ppi, ParallelPlan), InstanceDocument), LoadError> {
    let text = std::fs::read_to_string(path)?;
    let doc = InstanceDocument::parse(&text)?;
    let parts = doc.to_parts()?;
    Ok((parts, doc))
}

pub fn save(problem: &Ppi, pp: &ParallelPlan, path: impl AsRef<Path>) -> Result<(), LoadError> {
    save_document(&InstanceDocument::from_parts(problem, pp), path)
}

pub fn save_document(doc: &InstanceDocument, path: impl AsRef<Path>) -> Result<(), LoadError> {
    std::fs::write(path, doc.canonical_json())?;
    Ok(())
}

/// Release times for a named plan's actions, as a file.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExecutionDocument {
    pub format_version: u32,
    pub release: BTreeMap<String, u32>,
}

impl ExecutionDocument {
    pub fn from_execution(exec: &Execution) -> Self {
        ExecutionDocument {
            format_version: FORMAT_VERSION,
            release: exec.release.iter().map(|(a, r)| (a.0.clone(), *r)).collect(),
        }
    }

    pub fn to_execution(&self) -> Result<Execution, SemanticError> {
        if self.format_version != FORMAT_VERSION {
            return Err(SemanticError::UnsupportedVersion(self.format_version));
        }
        Ok(Execution::new(
            self.release
                .iter()
                .map(|(a, r)| (ActionId::new(a.clone()), *r))
                .collect(),
        ))
    }

    pub fn parse(text: &str) -> Result<Self, ParseError> {
        serde_json::from_str(text).map_err(|e| ParseError {
            line: e.line(),
            column: e.column(),
            message: e.to_string(),
        })
    }

    pub fn canonical_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("documents serialize");
        s.push('\n');
        s
    }
}
