//! Plan validity.
//!
//! A totally ordered plan is valid when every action's preconditions hold in
//! the state reached so far and the goal holds at the end. States are
//! consistent literal sets; an atom nobody has asserted is simply unknown, so
//! a negative precondition is only satisfied by an explicit negative literal.
//! Effects overwrite: applying an action removes the complements of its
//! effects and adds the effects.
//!
//! A partially ordered plan is valid when *every* linear extension is valid.
//! Two checkers are provided: [`po_valid_bruteforce`] literally enumerates
//! extensions (guarded, exponential), and [`mtc_valid`] decides the same
//! property in polynomial time by checking, per consumed literal, that a
//! producer exists ahead of the consumer and that every possible clobberer is
//! either held off until after the consumer or is itself re-covered by a
//! later producer squeezed between them. The brute-force form exists to
//! cross-check the fast one.

use crate::action::{Action, ActionId};
use crate::literal::Literal;
use crate::order::OrderRelation;
use crate::plan::{PartialOrderPlan, Ppi};
use std::collections::{BTreeMap, BTreeSet};

/// Reserved id of the synthetic action that produces the initial state.
pub fn init_action_id() -> ActionId {
    ActionId::new("a_I")
}

/// Reserved id of the synthetic action that consumes the goal.
pub fn goal_action_id() -> ActionId {
    ActionId::new("a_G")
}

/// Apply an action's effects to a state, overwriting complements.
pub fn apply(state: &BTreeSet<Literal>, action: &Action) -> BTreeSet<Literal> {
    let mut next: BTreeSet<Literal> = state
        .iter()
        .filter(|l| !action.post.contains(&l.negate()))
        .cloned()
        .collect();
    next.extend(action.post.iter().cloned());
    next
}

pub fn applicable(state: &BTreeSet<Literal>, action: &Action) -> bool {
    action.pre.is_subset(state)
}

/// Run a sequence of actions from `init`, ignoring applicability.
pub fn result_state<'a, I>(init: &BTreeSet<Literal>, actions: I) -> BTreeSet<Literal>
where
    I: IntoIterator<Item = &'a Action>,
{
    actions.into_iter().fold(init.clone(), |s, a| apply(&s, a))
}

pub(crate) fn run_valid(init: &BTreeSet<Literal>, goal: &BTreeSet<Literal>, seq: &[&Action]) -> bool {
    let mut state = init.clone();
    for a in seq {
        if !applicable(&state, a) {
            return false;
        }
        state = apply(&state, a);
    }
    goal.is_subset(&state)
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum SequenceError {
    #[error("sequence refers to unknown action {0}")]
    UnknownAction(ActionId),
    #[error("sequence is not a permutation of the plan's actions")]
    NotAPermutation,
}

/// Is this particular linearization of the plan valid?
pub fn sequence_valid(
    problem: &Ppi,
    plan: &PartialOrderPlan,
    seq: &[ActionId],
) -> Result<bool, SequenceError> {
    let mut seen = BTreeSet::new();
    let mut acts = Vec::with_capacity(seq.len());
    for id in seq {
        let a = plan.get(id).ok_or_else(|| SequenceError::UnknownAction(id.clone()))?;
        if !seen.insert(id) {
            return Err(SequenceError::NotAPermutation);
        }
        acts.push(a);
    }
    if seq.len() != plan.len() {
        return Err(SequenceError::NotAPermutation);
    }
    Ok(run_valid(&problem.init, &problem.goal, &acts))
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("plan has {actual} actions, brute-force validity is capped at {max}")]
pub struct TooLargeForBruteForce {
    pub max: usize,
    pub actual: usize,
}

/// Decide validity by checking every linear extension. Exponential; refuses
/// plans larger than `max_actions`.
pub fn po_valid_bruteforce(
    problem: &Ppi,
    plan: &PartialOrderPlan,
    max_actions: usize,
) -> Result<bool, TooLargeForBruteForce> {
    if plan.len() > max_actions {
        return Err(TooLargeForBruteForce { max: max_actions, actual: plan.len() });
    }
    for seq in plan.topological_sorts() {
        let acts: Vec<&Action> = seq.iter().map(|id| plan.get(id).unwrap()).collect();
        if !run_valid(&problem.init, &problem.goal, &acts) {
            return Ok(false);
        }
    }
    Ok(true)
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum SelfContainError {
    #[error("plan already uses the reserved action id {0}")]
    ReservedId(ActionId),
    #[error("problem init/goal sets are inconsistent")]
    InconsistentProblem,
}

/// Absorb the problem into the plan: a zero-duration `a_I` producing the
/// initial state before everything, and a zero-duration `a_G` requiring the
/// goal after everything.
pub fn self_contained(
    problem: &Ppi,
    plan: &PartialOrderPlan,
) -> Result<PartialOrderPlan, SelfContainError> {
    let (ai, ag) = (init_action_id(), goal_action_id());
    for reserved in [&ai, &ag] {
        if plan.actions.contains_key(reserved) {
            return Err(SelfContainError::ReservedId(reserved.clone()));
        }
    }
    let init_act = Action::new(ai.clone(), BTreeSet::new(), problem.init.clone(), 0)
        .map_err(|_| SelfContainError::InconsistentProblem)?;
    let goal_act = Action::new(ag.clone(), problem.goal.clone(), BTreeSet::new(), 0)
        .map_err(|_| SelfContainError::InconsistentProblem)?;

    let mut pairs: BTreeSet<(ActionId, ActionId)> = plan.order.pairs().clone();
    for id in plan.ids() {
        pairs.insert((ai.clone(), id.clone()));
        pairs.insert((id.clone(), ag.clone()));
    }
    pairs.insert((ai.clone(), ag.clone()));

    let mut actions: Vec<Action> = plan.actions.values().cloned().collect();
    actions.push(init_act);
    actions.push(goal_act);
    // Bookending a closed order keeps it closed.
    let order = OrderRelation::from_closed_unchecked(pairs);
    Ok(PartialOrderPlan::new(actions, order).expect("ids already checked unique"))
}

/// Support structure for the fast validity check, reusable across many
/// candidate orders on the same action set: who consumes, produces and
/// clobbers each literal is independent of the order.
pub(crate) struct SupportIndex {
    /// (consumer id, literal it needs).
    pub demands: Vec<(ActionId, Literal)>,
    /// Per literal: every action asserting it.
    pub producers: BTreeMap<Literal, Vec<ActionId>>,
    /// Per literal: every action asserting its complement.
    pub clobberers: BTreeMap<Literal, Vec<ActionId>>,
}

impl SupportIndex {
    /// Build from a self-contained plan's action set.
    pub fn new(plan: &PartialOrderPlan) -> Self {
        let mut demands = Vec::new();
        let mut producers: BTreeMap<Literal, Vec<ActionId>> = BTreeMap::new();
        let mut clobberers: BTreeMap<Literal, Vec<ActionId>> = BTreeMap::new();
        for a in plan.actions.values() {
            for l in &a.pre {
                demands.push((a.id.clone(), l.clone()));
            }
            for l in &a.post {
                producers.entry(l.clone()).or_default().push(a.id.clone());
                clobberers.entry(l.negate()).or_default().push(a.id.clone());
            }
        }
        SupportIndex { demands, producers, clobberers }
    }

    /// The order-dependent part of the check.
    pub fn valid_under(&self, order: &OrderRelation) -> bool {
        let empty: Vec<ActionId> = Vec::new();
        for (consumer, lit) in &self.demands {
            let producers = self.producers.get(lit).unwrap_or(&empty);
            let clobberers = self.clobberers.get(lit).unwrap_or(&empty);
            let supported = producers.iter().any(|p| {
                order.contains(p, consumer)
                    && clobberers.iter().all(|t| {
                        t == p
                            || t == consumer
                            || order.contains(consumer, t)
                            || producers
                                .iter()
                                .any(|w| order.contains(t, w) && order.contains(w, consumer))
                    })
            });
            if !supported {
                return false;
            }
        }
        true
    }
}

/// Decide validity of a partially ordered plan in polynomial time.
///
/// Equivalent to [`po_valid_bruteforce`] on every input (the test suite
/// cross-checks them exhaustively on small random plans), but runs in
/// O(actions³ · literals).
pub fn mtc_valid(problem: &Ppi, plan: &PartialOrderPlan) -> Result<bool, SelfContainError> {
    let extended = self_contained(problem, plan)?;
    let index = SupportIndex::new(&extended);
    Ok(index.valid_under(&extended.order))
}

/// Validity of one explicit action sequence between two states: every
/// precondition must hold when its action runs and the goal must hold at the
/// end.
pub fn total_order_valid<'a, I>(init: &BTreeSet<Literal>, goal: &BTreeSet<Literal>, seq: I) -> bool
where
    I: IntoIterator<Item = &'a Action>,
{
    let actions: Vec<&Action> = seq.into_iter().collect();
    run_valid(init, goal, &actions)
}

/// Who asserts, requires and contradicts each literal, per action.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PctView {
    pub produces: BTreeMap<ActionId, BTreeSet<Literal>>,
    pub consumes: BTreeMap<ActionId, BTreeSet<Literal>>,
    /// Complements of the effects: the conditions this action destroys.
    pub threatens: BTreeMap<ActionId, BTreeSet<Literal>>,
}

pub fn pct_view<'a, I>(actions: I) -> PctView
where
    I: IntoIterator<Item = &'a Action>,
{
    let mut view = PctView {
        produces: BTreeMap::new(),
        consumes: BTreeMap::new(),
        threatens: BTreeMap::new(),
    };
    for a in actions {
        view.produces.insert(a.id.clone(), a.post.clone());
        view.consumes.insert(a.id.clone(), a.pre.clone());
        view.threatens.insert(a.id.clone(), crate::literal::negate(&a.post));
    }
    view
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum NotSelfContained {
    #[error("missing bookend action {0}")]
    MissingBookend(ActionId),
    #[error("bookend {0} has the wrong shape (`a_I` needs an empty precondition, `a_G` an empty effect)")]
    BookendShape(ActionId),
    #[error("bookend {bookend} is not ordered against {other}")]
    UnorderedBookend { bookend: ActionId, other: ActionId },
}

/// A plan that carries its own initial state and goal as bookend actions:
/// `a_I` (empty precondition) precedes everything, `a_G` (empty effect)
/// follows everything. Such a plan is judged against the empty problem.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SelfContainedPlan {
    plan: PartialOrderPlan,
}

impl SelfContainedPlan {
    /// Adopt an existing plan, verifying the bookend invariants.
    pub fn from_plan(plan: PartialOrderPlan) -> Result<Self, NotSelfContained> {
        let (ai, ag) = (init_action_id(), goal_action_id());
        for (bookend, must_be_empty) in [(&ai, true), (&ag, false)] {
            let act = plan
                .get(bookend)
                .ok_or_else(|| NotSelfContained::MissingBookend(bookend.clone()))?;
            let part = if must_be_empty { &act.pre } else { &act.post };
            if !part.is_empty() {
                return Err(NotSelfContained::BookendShape(bookend.clone()));
            }
        }
        for id in plan.ids() {
            if *id != ai && !plan.order.contains(&ai, id) {
                return Err(NotSelfContained::UnorderedBookend {
                    bookend: ai.clone(),
                    other: id.clone(),
                });
            }
            if *id != ag && !plan.order.contains(id, &ag) {
                return Err(NotSelfContained::UnorderedBookend {
                    bookend: ag.clone(),
                    other: id.clone(),
                });
            }
        }
        Ok(SelfContainedPlan { plan })
    }

    pub fn plan(&self) -> &PartialOrderPlan {
        &self.plan
    }

    pub fn into_plan(self) -> PartialOrderPlan {
        self.plan
    }

    /// Validity, decided directly on the internal order (the bookends are
    /// already present, so no further extension happens).
    pub fn is_valid(&self) -> bool {
        SupportIndex::new(&self.plan).valid_under(&self.plan.order)
    }

    /// Inner actions in some linear extension order, bookends excluded.
    pub fn inner_ids(&self) -> Vec<ActionId> {
        let (ai, ag) = (init_action_id(), goal_action_id());
        self.plan
            .lex_min_linearization()
            .into_iter()
            .filter(|id| *id != ai && *id != ag)
            .collect()
    }
}

/// Bookend the problem into the plan (see [`self_contained`]) and wrap it.
pub fn make_self_contained(
    problem: &Ppi,
    plan: &PartialOrderPlan,
) -> Result<SelfContainedPlan, SelfContainError> {
    Ok(SelfContainedPlan { plan: self_contained(problem, plan)? })
}

/// Undo [`make_self_contained`]: recover the problem from the bookends and
/// the plan from everything else.
pub fn strip_self_contained(sc: &SelfContainedPlan) -> (Ppi, PartialOrderPlan) {
    let (ai, ag) = (init_action_id(), goal_action_id());
    let init = sc.plan.get(&ai).expect("bookend invariant").post.clone();
    let goal = sc.plan.get(&ag).expect("bookend invariant").pre.clone();
    let problem = Ppi::new(init, goal).expect("bookend actions are consistent");
    let inner: Vec<Action> = sc
        .plan
        .actions
        .values()
        .filter(|a| a.id != ai && a.id != ag)
        .cloned()
        .collect();
    let keep: BTreeSet<ActionId> = inner.iter().map(|a| a.id.clone()).collect();
    let order = sc.plan.order.restrict(&keep);
    let plan = PartialOrderPlan::new(inner, order).expect("restriction keeps ids");
    (problem, plan)
}

/// Which validity decision procedure to run.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Validator {
    /// Polynomial check via producer/clobberer support analysis.
    Mtc,
    /// Enumerate every linear extension (capped).
    BruteForce { max_actions: usize },
}

impl Default for Validator {
    fn default() -> Self {
        Validator::Mtc
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ValidateError {
    #[error(transparent)]
    TooLarge(#[from] TooLargeForBruteForce),
    #[error(transparent)]
    SelfContain(#[from] SelfContainError),
}

impl Validator {
    pub fn check(&self, problem: &Ppi, plan: &PartialOrderPlan) -> Result<bool, ValidateError> {
        match *self {
            Validator::Mtc => Ok(mtc_valid(problem, plan)?),
            Validator::BruteForce { max_actions } => {
                Ok(po_valid_bruteforce(problem, plan, max_actions)?)
            }
        }
    }
}
