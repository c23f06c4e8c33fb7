//! Parallel plans and their executions.
//!
//! A parallel plan is a partially ordered plan plus a symmetric, irreflexive
//! non-concurrency relation listing action pairs that must never overlap in
//! time. The order alone decides validity; the non-concurrency relation only
//! constrains executions. A plan is *definite* when every non-concurrent pair
//! is already ordered — for such plans the earliest-release schedule is
//! optimal and computable by longest paths ([`dppl`]).

use crate::action::{Action, ActionId};
use crate::order::OrderRelation;
use crate::plan::{PartialOrderPlan, PlanError, Ppi};
use crate::semantics::{mtc_valid, SelfContainError};
use std::collections::{BTreeMap, BTreeSet};

/// Symmetric irreflexive relation of action pairs forbidden to overlap.
/// Pairs are stored normalized (smaller id first), so symmetry is by
/// construction.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct NonConcurrency {
    pairs: BTreeSet<(ActionId, ActionId)>,
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("action {0} cannot be non-concurrent with itself")]
pub struct ReflexiveNonConcurrency(pub ActionId);

impl NonConcurrency {
    pub fn empty() -> Self {
        NonConcurrency::default()
    }

    pub fn from_pairs<I>(pairs: I) -> Result<Self, ReflexiveNonConcurrency>
    where
        I: IntoIterator<Item = (ActionId, ActionId)>,
    {
        let mut nc = NonConcurrency::empty();
        for (a, b) in pairs {
            nc.insert(a, b)?;
        }
        Ok(nc)
    }

    pub fn insert(&mut self, a: ActionId, b: ActionId) -> Result<(), ReflexiveNonConcurrency> {
        if a == b {
            return Err(ReflexiveNonConcurrency(a));
        }
        let pair = if a < b { (a, b) } else { (b, a) };
        self.pairs.insert(pair);
        Ok(())
    }

    pub fn related(&self, a: &ActionId, b: &ActionId) -> bool {
        let pair = if a < b { (a.clone(), b.clone()) } else { (b.clone(), a.clone()) };
        self.pairs.contains(&pair)
    }

    /// Normalized pairs (smaller id first).
    pub fn iter(&self) -> impl Iterator<Item = &(ActionId, ActionId)> {
        self.pairs.iter()
    }

    pub fn pairs(&self) -> &BTreeSet<(ActionId, ActionId)> {
        &self.pairs
    }

    pub fn len(&self) -> usize {
        self.pairs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pairs.is_empty()
    }

    pub fn is_subset(&self, other: &NonConcurrency) -> bool {
        self.pairs.is_subset(&other.pairs)
    }

    pub fn mentioned(&self) -> BTreeSet<ActionId> {
        let mut ids = BTreeSet::new();
        for (a, b) in &self.pairs {
            ids.insert(a.clone());
            ids.insert(b.clone());
        }
        ids
    }
}

/// A partially ordered plan with a non-concurrency relation.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ParallelPlan {
    pub plan: PartialOrderPlan,
    pub nonconc: NonConcurrency,
}

impl ParallelPlan {
    pub fn new(plan: PartialOrderPlan, nonconc: NonConcurrency) -> Result<Self, PlanError> {
        for id in nonconc.mentioned() {
            if plan.get(&id).is_none() {
                return Err(PlanError::UnknownActionInOrder(id));
            }
        }
        Ok(ParallelPlan { plan, nonconc })
    }

    /// Every non-concurrent pair is ordered one way or the other.
    pub fn is_definite(&self) -> bool {
        self.nonconc
            .iter()
            .all(|(a, b)| self.plan.order.contains(a, b) || self.plan.order.contains(b, a))
    }

    /// Same actions and non-concurrency under a different order.
    pub fn with_order(&self, order: OrderRelation) -> Result<Self, PlanError> {
        Ok(ParallelPlan { plan: self.plan.with_order(order)?, nonconc: self.nonconc.clone() })
    }
}

/// The smallest non-concurrency relation under which no two actions with
/// contradictory effects may overlap.
pub fn post_exclusion<'a, I>(actions: I) -> NonConcurrency
where
    I: IntoIterator<Item = &'a Action>,
{
    let actions: Vec<&Action> = actions.into_iter().collect();
    let mut nc = NonConcurrency::empty();
    for (i, a) in actions.iter().enumerate() {
        for b in &actions[i + 1..] {
            if a.post.iter().any(|l| b.post.contains(&l.negate())) {
                nc.insert(a.id.clone(), b.id.clone()).expect("distinct ids");
            }
        }
    }
    nc
}

/// The smallest non-concurrency relation where producer/consumer,
/// producer/threat and consumer/threat pairs of a shared condition never
/// overlap. Two producers (or two consumers, or two threats) of the same
/// condition stay concurrent.
pub fn simple_concurrency<'a, I>(actions: I) -> NonConcurrency
where
    I: IntoIterator<Item = &'a Action>,
{
    let actions: Vec<&Action> = actions.into_iter().collect();
    let mut nc = NonConcurrency::empty();
    let interacts = |x: &Action, y: &Action| {
        // prod(x, l) vs cons(y, l)
        x.post.iter().any(|l| y.pre.contains(l))
            // prod(x, l) vs threat(y, l), i.e. contradictory effects
            || x.post.iter().any(|l| y.post.contains(&l.negate()))
            // cons(x, l) vs threat(y, l)
            || x.pre.iter().any(|l| y.post.contains(&l.negate()))
    };
    for (i, a) in actions.iter().enumerate() {
        for b in &actions[i + 1..] {
            if interacts(a, b) || interacts(b, a) {
                nc.insert(a.id.clone(), b.id.clone()).expect("distinct ids");
            }
        }
    }
    nc
}

/// Release times, one per action, 0-based.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Execution {
    pub release: BTreeMap<ActionId, u32>,
}

impl Execution {
    pub fn new(release: BTreeMap<ActionId, u32>) -> Self {
        Execution { release }
    }

    pub fn get(&self, id: &ActionId) -> Option<u32> {
        self.release.get(id).copied()
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ExecutionViolation {
    #[error("no release time for action {0}")]
    MissingRelease(ActionId),
    #[error("release times mention unknown action {0}")]
    UnknownAction(ActionId),
    #[error("{first} is ordered before {second} but does not finish before it starts")]
    OrderSeparation { first: ActionId, second: ActionId },
    #[error("{a} and {b} are non-concurrent but overlap in time")]
    NonConcurrencyOverlap { a: ActionId, b: ActionId },
}

/// Verify a release-time function against the plan: every ordered pair must
/// be separated, every non-concurrent pair must not overlap. On success
/// returns the makespan (latest finishing time).
pub fn check_execution(pp: &ParallelPlan, r: &Execution) -> Result<u64, ExecutionViolation> {
    for id in r.release.keys() {
        if pp.plan.get(id).is_none() {
            return Err(ExecutionViolation::UnknownAction(id.clone()));
        }
    }
    let time = |id: &ActionId| -> Result<(u64, u64), ExecutionViolation> {
        let start = r.get(id).ok_or_else(|| ExecutionViolation::MissingRelease(id.clone()))? as u64;
        let dur = pp.plan.get(id).unwrap().duration as u64;
        Ok((start, start + dur))
    };
    for (a, b) in pp.plan.order.iter() {
        let (_, end_a) = time(a)?;
        let (start_b, _) = time(b)?;
        if end_a > start_b {
            return Err(ExecutionViolation::OrderSeparation { first: a.clone(), second: b.clone() });
        }
    }
    for (a, b) in pp.nonconc.iter() {
        let (start_a, end_a) = time(a)?;
        let (start_b, end_b) = time(b)?;
        if end_a > start_b && end_b > start_a {
            return Err(ExecutionViolation::NonConcurrencyOverlap { a: a.clone(), b: b.clone() });
        }
    }
    let mut makespan = 0;
    for id in pp.plan.ids() {
        let (_, end) = time(id)?;
        makespan = makespan.max(end);
    }
    Ok(makespan)
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("plan is not definite: {a} and {b} are non-concurrent but unordered")]
pub struct NotDefinite {
    pub a: ActionId,
    pub b: ActionId,
}

/// Minimum parallel execution of a definite plan: release every action at
/// the length of its longest incoming duration-weighted chain. Returns the
/// execution and its makespan.
pub fn dppl(pp: &ParallelPlan) -> Result<(Execution, u64), NotDefinite> {
    if let Some((a, b)) = pp
        .nonconc
        .iter()
        .find(|(a, b)| !pp.plan.order.contains(a, b) && !pp.plan.order.contains(b, a))
    {
        return Err(NotDefinite { a: a.clone(), b: b.clone() });
    }
    let mut finish: BTreeMap<ActionId, u64> = BTreeMap::new();
    let mut release = BTreeMap::new();
    let mut makespan = 0;
    // The closed order lists all predecessors directly, so actions can be
    // relaxed in any linear extension.
    for id in pp.plan.lex_min_linearization() {
        let start: u64 = pp
            .plan
            .order
            .iter()
            .filter(|(_, b)| *b == id)
            .map(|(a, _)| finish[a])
            .max()
            .unwrap_or(0);
        let end = start + pp.plan.get(&id).unwrap().duration as u64;
        release.insert(id.clone(), u32::try_from(start).expect("schedule fits in u32"));
        finish.insert(id, end);
        makespan = makespan.max(end);
    }
    Ok((Execution::new(release), makespan))
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum PrfError {
    #[error(transparent)]
    NotDefinite(#[from] NotDefinite),
    #[error("input plan is not valid")]
    InvalidInput,
    #[error("non-concurrency relation is missing the required pair {a} / {b}")]
    SimpleConcurrencyViolated { a: ActionId, b: ActionId },
    #[error(transparent)]
    SelfContain(#[from] SelfContainError),
}

/// Keep exactly the ordered pairs that are also non-concurrent, then close.
/// For valid definite plans whose non-concurrency includes the
/// [`simple_concurrency`] pairs, the result is a minimum parallel deordering
/// and is again definite. Validity of the input is assumed, not checked —
/// see [`prf_strict`].
pub fn prf(pp: &ParallelPlan) -> Result<ParallelPlan, NotDefinite> {
    if let Some((a, b)) = pp
        .nonconc
        .iter()
        .find(|(a, b)| !pp.plan.order.contains(a, b) && !pp.plan.order.contains(b, a))
    {
        return Err(NotDefinite { a: a.clone(), b: b.clone() });
    }
    let kept = pp
        .plan
        .order
        .iter()
        .filter(|(a, b)| pp.nonconc.related(a, b))
        .cloned();
    let order = OrderRelation::from_pairs(kept).expect("subset of an acyclic order");
    Ok(pp.with_order(order).expect("same action set"))
}

/// [`prf`] with its hypotheses verified: the input must be valid and the
/// non-concurrency relation must contain every simple-concurrency pair.
pub fn prf_strict(pp: &ParallelPlan, problem: &Ppi) -> Result<ParallelPlan, PrfError> {
    let required = simple_concurrency(pp.plan.actions.values());
    if let Some((a, b)) = required.iter().find(|(a, b)| !pp.nonconc.related(a, b)) {
        return Err(PrfError::SimpleConcurrencyViolated { a: a.clone(), b: b.clone() });
    }
    if !mtc_valid(problem, &pp.plan)? {
        return Err(PrfError::InvalidInput);
    }
    Ok(prf(pp)?)
}

/// Order the actions by strict release time: a before b iff r(a) < r(b).
/// The result is definite whenever non-concurrent actions have distinct
/// releases, which separation guarantees for positive durations.
pub fn execution_to_definite_order(
    pp: &ParallelPlan,
    r: &Execution,
) -> Result<ParallelPlan, ExecutionViolation> {
    check_execution(pp, r)?;
    let mut pairs = BTreeSet::new();
    for a in pp.plan.ids() {
        for b in pp.plan.ids() {
            if r.get(a).unwrap() < r.get(b).unwrap() {
                pairs.insert((a.clone(), b.clone()));
            }
        }
    }
    // Slices of a weak order are transitively closed already.
    let order = OrderRelation::from_closed_unchecked(pairs);
    Ok(pp.with_order(order).expect("same action set"))
}
