use crate::action::{Action, ActionId};
use crate::literal::{is_consistent, Literal};
use crate::order::OrderRelation;
use std::collections::{BTreeMap, BTreeSet};

/// A planning problem: what holds initially and what must hold at the end.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Ppi {
    pub init: BTreeSet<Literal>,
    pub goal: BTreeSet<Literal>,
}

impl Ppi {
    pub fn new(init: BTreeSet<Literal>, goal: BTreeSet<Literal>) -> Result<Self, InconsistentProblem> {
        if !is_consistent(&init) {
            return Err(InconsistentProblem { part: "init" });
        }
        if !is_consistent(&goal) {
            return Err(InconsistentProblem { part: "goal" });
        }
        Ok(Ppi { init, goal })
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("problem has an inconsistent {part} set")]
pub struct InconsistentProblem {
    pub part: &'static str,
}

/// A partially ordered plan: a finite set of actions plus a strict partial
/// order on their ids. The order is kept transitively closed (see
/// [`OrderRelation`]), so `plan.order.len()` counts closure pairs.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PartialOrderPlan {
    pub actions: BTreeMap<ActionId, Action>,
    pub order: OrderRelation,
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum PlanError {
    #[error("duplicate action id {0}")]
    DuplicateAction(ActionId),
    #[error("order mentions unknown action {0}")]
    UnknownActionInOrder(ActionId),
}

impl PartialOrderPlan {
    pub fn new(actions: Vec<Action>, order: OrderRelation) -> Result<Self, PlanError> {
        let mut map = BTreeMap::new();
        for a in actions {
            let id = a.id.clone();
            if map.insert(id.clone(), a).is_some() {
                return Err(PlanError::DuplicateAction(id));
            }
        }
        for id in order.mentioned() {
            if !map.contains_key(&id) {
                return Err(PlanError::UnknownActionInOrder(id));
            }
        }
        Ok(PartialOrderPlan { actions: map, order })
    }

    /// A totally ordered plan running the actions in the given sequence.
    pub fn from_sequence(actions: Vec<Action>) -> Result<Self, PlanError> {
        let ids: Vec<ActionId> = actions.iter().map(|a| a.id.clone()).collect();
        PartialOrderPlan::new(actions, OrderRelation::chain(&ids))
    }

    /// Same actions under a different order.
    pub fn with_order(&self, order: OrderRelation) -> Result<Self, PlanError> {
        PartialOrderPlan::new(self.actions.values().cloned().collect(), order)
    }

    pub fn len(&self) -> usize {
        self.actions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.actions.is_empty()
    }

    pub fn get(&self, id: &ActionId) -> Option<&Action> {
        self.actions.get(id)
    }

    pub fn ids(&self) -> impl Iterator<Item = &ActionId> {
        self.actions.keys()
    }

    /// Sum of all action durations: the makespan of running everything
    /// back to back.
    pub fn total_duration(&self) -> u64 {
        self.actions.values().map(|a| a.duration as u64).sum()
    }

    pub fn is_total_order(&self) -> bool {
        let n = self.actions.len();
        self.order.len() == n * (n - 1) / 2
    }

    /// All linear extensions of the order, lexicographically by action id.
    /// Only feasible for small plans; the iterator is lazy, nothing is
    /// materialized up front.
    pub fn topological_sorts(&self) -> TopoSorts<'_> {
        TopoSorts::new(self)
    }

    /// The lexicographically least linear extension. Works at any size.
    pub fn lex_min_linearization(&self) -> Vec<ActionId> {
        let mut remaining: BTreeSet<ActionId> = self.actions.keys().cloned().collect();
        let mut placed: BTreeSet<ActionId> = BTreeSet::new();
        let mut out = Vec::with_capacity(remaining.len());
        while !remaining.is_empty() {
            let next = remaining
                .iter()
                .find(|id| self.order.iter().all(|(a, b)| b != *id || placed.contains(a)))
                .expect("order is acyclic, so some action is available")
                .clone();
            remaining.remove(&next);
            placed.insert(next.clone());
            out.push(next);
        }
        out
    }
}

/// Lazy enumeration of every linear extension, in lexicographic order.
pub struct TopoSorts<'a> {
    ids: Vec<&'a ActionId>,
    pred_mask: Vec<u128>,
    chosen: Vec<usize>,
    chosen_mask: u128,
    frames: Vec<(Vec<usize>, usize)>,
    yielded_empty: bool,
}

impl<'a> TopoSorts<'a> {
    fn new(plan: &'a PartialOrderPlan) -> Self {
        let ids: Vec<&ActionId> = plan.actions.keys().collect();
        assert!(ids.len() <= 128, "linear-extension enumeration capped at 128 actions");
        let index: BTreeMap<&ActionId, usize> = ids.iter().enumerate().map(|(i, a)| (*a, i)).collect();
        let mut pred_mask = vec![0u128; ids.len()];
        for (a, b) in plan.order.iter() {
            pred_mask[index[b]] |= 1 << index[a];
        }
        let mut it = TopoSorts {
            ids,
            pred_mask,
            chosen: Vec::new(),
            chosen_mask: 0,
            frames: Vec::new(),
            yielded_empty: false,
        };
        if !it.ids.is_empty() {
            let first = it.available();
            it.frames.push((first, 0));
        }
        it
    }

    fn available(&self) -> Vec<usize> {
        (0..self.ids.len())
            .filter(|&i| {
                self.chosen_mask >> i & 1 == 0
                    && self.pred_mask[i] & self.chosen_mask == self.pred_mask[i]
            })
            .collect()
    }
}

impl<'a> Iterator for TopoSorts<'a> {
    type Item = Vec<ActionId>;

    fn next(&mut self) -> Option<Vec<ActionId>> {
        if self.ids.is_empty() {
            if self.yielded_empty {
                return None;
            }
            self.yielded_empty = true;
            return Some(Vec::new());
        }
        loop {
            let frame = self.frames.last_mut()?;
            if frame.1 < frame.0.len() {
                let pick = frame.0[frame.1];
                frame.1 += 1;
                self.chosen.push(pick);
                self.chosen_mask |= 1 << pick;
                if self.chosen.len() == self.ids.len() {
                    let out = self.chosen.iter().map(|&i| self.ids[i].clone()).collect();
                    let undo = self.chosen.pop().unwrap();
                    self.chosen_mask &= !(1 << undo);
                    return Some(out);
                }
                let avail = self.available();
                self.frames.push((avail, 0));
            } else {
                self.frames.pop();
                if let Some(undo) = self.chosen.pop() {
                    self.chosen_mask &= !(1 << undo);
                } else {
                    return None;
                }
            }
        }
    }
}
