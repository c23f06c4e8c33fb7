//! Two historical reordering/deordering procedures, kept faithful to their
//! published behavior — including the cases where they fail to reach a
//! minimal result. Both work on self-contained plans (explicit init/goal
//! bookend actions).
//!
//! * [`vpc`] re-derives an order for a totally ordered plan from greedy
//!   last-producer causal links, demotions for effect destroyers, and
//!   protection of "primary" effects. The output is a reordering of the
//!   input — valid when the primary set covers the consumed conditions
//!   (see [`all_effects_primaries`]) — that depends on the input sequence
//!   and need not be a suborder or minimal.
//! * [`kk`] deorders a plan by building a validation structure of causal
//!   links (earliest unclobbered producer along a fixed linearization) and
//!   keeping only bookend arcs, link arcs, and the two threat-protection arc
//!   classes. The output is a valid deordering, again not always minimal.

use crate::action::ActionId;
use crate::literal::Literal;
use crate::order::OrderRelation;
use crate::plan::PartialOrderPlan;
use crate::semantics::{goal_action_id, init_action_id, SelfContainedPlan};
use std::collections::{BTreeMap, BTreeSet};

/// One entry of a validation structure: `producer` established `condition`
/// for `consumer`.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub struct CausalLink {
    pub producer: ActionId,
    pub condition: Literal,
    pub consumer: ActionId,
}

/// Which effects of which actions count as load-bearing for the re-ordering
/// pass: only these get their destroyers demoted behind them.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct PrimaryEffectSet {
    map: BTreeMap<ActionId, BTreeSet<Literal>>,
}

impl PrimaryEffectSet {
    pub fn new(map: BTreeMap<ActionId, BTreeSet<Literal>>) -> Self {
        PrimaryEffectSet { map }
    }

    pub fn contains(&self, action: &ActionId, effect: &Literal) -> bool {
        self.map.get(action).is_some_and(|s| s.contains(effect))
    }

    pub fn effects_of(&self, action: &ActionId) -> Option<&BTreeSet<Literal>> {
        self.map.get(action)
    }

    pub fn iter(&self) -> impl Iterator<Item = (&ActionId, &BTreeSet<Literal>)> {
        self.map.iter()
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum VpcError {
    #[error("input plan is not totally ordered")]
    NotTotalOrder,
    #[error("action {action} has negative precondition {literal}, outside this procedure's language")]
    NegativePrecondition { action: ActionId, literal: Literal },
    #[error("input plan is not valid")]
    InvalidInput,
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum KkError {
    #[error("input plan is not valid")]
    InvalidInput,
}

fn check_vpc_input(sc: &SelfContainedPlan) -> Result<Vec<ActionId>, VpcError> {
    if !sc.plan().is_total_order() {
        return Err(VpcError::NotTotalOrder);
    }
    for a in sc.plan().actions.values() {
        if let Some(l) = a.pre.iter().find(|l| !l.is_positive()) {
            return Err(VpcError::NegativePrecondition {
                action: a.id.clone(),
                literal: l.clone(),
            });
        }
    }
    if !sc.is_valid() {
        return Err(VpcError::InvalidInput);
    }
    Ok(sc.plan().lex_min_linearization())
}

/// Default primary effects: chain backward from the goal. Each needed
/// condition is charged to its last producer in the sequence, whose own
/// preconditions become needed in turn. Effects of the init bookend are
/// nobody's primaries.
///
/// Actions that never serve as a charged producer keep an empty primary
/// set, so [`vpc`] will not demote destroyers behind them; its output is
/// then only guaranteed valid when every consumed condition lies on the
/// chain. For plans with dead-end actions use [`all_effects_primaries`].
pub fn goal_chain_primaries(sc: &SelfContainedPlan) -> Result<PrimaryEffectSet, VpcError> {
    let seq = check_vpc_input(sc)?;
    let get = |i: usize| sc.plan().get(&seq[i]).expect("linearization id");
    let mut map: BTreeMap<ActionId, BTreeSet<Literal>> = BTreeMap::new();
    let mut queued: BTreeSet<(usize, Literal)> = BTreeSet::new();
    let mut work: Vec<(usize, Literal)> = get(seq.len() - 1)
        .pre
        .iter()
        .map(|l| (seq.len() - 1, l.clone()))
        .collect();
    while let Some((i, p)) = work.pop() {
        if !queued.insert((i, p.clone())) {
            continue;
        }
        let k = (0..i)
            .rev()
            .find(|&k| get(k).post.contains(&p))
            .expect("valid plan supplies every positive precondition");
        if k == 0 {
            continue; // supplied by the initial state
        }
        if map.entry(seq[k].clone()).or_default().insert(p) {
            for q in &get(k).pre {
                work.push((k, q.clone()));
            }
        }
    }
    Ok(PrimaryEffectSet::new(map))
}

/// The widest choice of primaries: every positive effect of every inner
/// action. Under this set [`vpc`] demotes every earlier destroyer behind
/// every producer, which makes its output valid for any valid input,
/// regardless of whether the plan's actions all feed the goal.
pub fn all_effects_primaries(sc: &SelfContainedPlan) -> PrimaryEffectSet {
    let mut map: BTreeMap<ActionId, BTreeSet<Literal>> = BTreeMap::new();
    for id in sc.inner_ids() {
        let positives: BTreeSet<Literal> = sc
            .plan()
            .get(&id)
            .expect("inner id")
            .post
            .iter()
            .filter(|l| l.is_positive())
            .cloned()
            .collect();
        if !positives.is_empty() {
            map.insert(id.clone(), positives);
        }
    }
    PrimaryEffectSet::new(map)
}

/// Re-derive an order for a valid, totally ordered, positive-precondition
/// plan: each precondition is tied to its last producer, effect destroyers
/// are demoted behind all earlier consumers, and destroyers preceding a
/// primary effect's producer are demoted behind that producer too. The
/// result is the transitive closure of those arcs plus the bookends.
///
/// The output is always a total-order-respecting reordering of the input;
/// it is guaranteed *valid* only when the supplied primaries cover, for
/// each consumed condition, the last producer ahead of each consumer — a
/// destroyer sitting ahead of an unprotected producer is left unordered
/// against it and can slide in between in some linearization. The
/// goal-chain default provides that cover exactly when every action's
/// preconditions are reachable by chaining back from the goal.
pub fn vpc(
    sc: &SelfContainedPlan,
    primaries: &PrimaryEffectSet,
) -> Result<SelfContainedPlan, VpcError> {
    let seq = check_vpc_input(sc)?;
    let n = seq.len();
    let get = |i: usize| sc.plan().get(&seq[i]).expect("linearization id");

    let mut arcs: BTreeSet<(ActionId, ActionId)> = BTreeSet::new();
    for i in 1..n {
        // Last producer of each precondition.
        for p in &get(i).pre {
            let k = (0..i)
                .rev()
                .find(|&k| get(k).post.contains(p))
                .ok_or(VpcError::InvalidInput)?;
            arcs.insert((seq[k].clone(), seq[i].clone()));
        }
        // Earlier consumers come before a destroyer.
        for l in &get(i).post {
            if l.is_positive() {
                continue;
            }
            let p = l.negate();
            for k in 0..i {
                if get(k).pre.contains(&p) {
                    arcs.insert((seq[k].clone(), seq[i].clone()));
                }
            }
        }
        // Earlier destroyers come before a primary effect's producer.
        for p in &get(i).post {
            if !primaries.contains(&seq[i], p) {
                continue;
            }
            let np = p.negate();
            for k in 0..i {
                if get(k).post.contains(&np) {
                    arcs.insert((seq[k].clone(), seq[i].clone()));
                }
            }
        }
    }
    for x in &seq {
        if *x != init_action_id() {
            arcs.insert((init_action_id(), x.clone()));
        }
        if *x != goal_action_id() {
            arcs.insert((x.clone(), goal_action_id()));
        }
    }
    // Every arc points forward along the input sequence, so no cycles.
    let order = OrderRelation::from_pairs(arcs).expect("arcs follow the sequence");
    let plan = PartialOrderPlan::new(sc.plan().actions.values().cloned().collect(), order)
        .expect("same action set");
    Ok(SelfContainedPlan::from_plan(plan).expect("bookends preserved"))
}

/// Deorder a valid plan via its validation structure. Phase one walks the
/// lexicographically first linearization and links each precondition to its
/// earliest producer with no destroyer in between; phase two keeps an input
/// pair only if it leaves the init bookend, enters the goal bookend,
/// realizes a link, or protects one (consumer before destroyer, destroyer
/// before re-producer).
pub fn kk(sc: &SelfContainedPlan) -> Result<SelfContainedPlan, KkError> {
    kk_with_links(sc).map(|(out, _)| out)
}

pub fn kk_with_links(
    sc: &SelfContainedPlan,
) -> Result<(SelfContainedPlan, Vec<CausalLink>), KkError> {
    if !sc.is_valid() {
        return Err(KkError::InvalidInput);
    }
    let seq = sc.plan().lex_min_linearization();
    let n = seq.len();
    let get = |i: usize| sc.plan().get(&seq[i]).expect("linearization id");

    let mut links: Vec<CausalLink> = Vec::new();
    for i in 1..n {
        'pre: for p in &get(i).pre {
            let np = p.negate();
            for k in 0..i {
                if get(k).post.contains(p)
                    && (k + 1..i).all(|j| !get(j).post.contains(&np))
                {
                    links.push(CausalLink {
                        producer: seq[k].clone(),
                        condition: p.clone(),
                        consumer: seq[i].clone(),
                    });
                    continue 'pre;
                }
            }
            return Err(KkError::InvalidInput);
        }
    }

    let posts_negation_of = |x: &ActionId, p: &Literal| -> bool {
        sc.plan().get(x).expect("plan id").post.contains(&p.negate())
    };
    let mut kept: BTreeSet<(ActionId, ActionId)> = BTreeSet::new();
    for (a, b) in sc.plan().order.iter() {
        let keep = *a == init_action_id()
            || *b == goal_action_id()
            || links.iter().any(|l| l.producer == *a && l.consumer == *b)
            || links
                .iter()
                .any(|l| l.consumer == *a && posts_negation_of(b, &l.condition))
            || links
                .iter()
                .any(|l| l.producer == *b && posts_negation_of(a, &l.condition));
        if keep {
            kept.insert((a.clone(), b.clone()));
        }
    }
    // Kept pairs are a subset of a closed order, so their closure is too.
    let order = OrderRelation::from_pairs(kept).expect("subset of an acyclic order");
    let plan = PartialOrderPlan::new(sc.plan().actions.values().cloned().collect(), order)
        .expect("same action set");
    let out = SelfContainedPlan::from_plan(plan).expect("bookends kept by rule one");
    Ok((out, links))
}
