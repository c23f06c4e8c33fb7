//! Greedy minimal deordering.
//!
//! A deordering of a plan keeps the actions and a subset of the ordering
//! constraints while staying valid. Finding the *least* constrained one is
//! intractable, but a locally minimal one — no single constraint can still be
//! dropped — is cheap: repeatedly drop any removable constraint until stuck.
//!
//! Only covering constraints (those with no other chain between their
//! endpoints) are candidates: dropping one keeps the order transitively
//! closed, and every proper closed suborder sits below the full order through
//! a chain of such single drops, so being stuck really is minimality.

use crate::plan::{PartialOrderPlan, Ppi};
use crate::semantics::{ValidateError, Validator};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum MldError {
    #[error("input plan is not valid, so it has no valid deordering")]
    InvalidInput,
    #[error(transparent)]
    Validate(#[from] ValidateError),
}

/// Drop ordering constraints one at a time, keeping the plan valid, until no
/// more can go. Candidates are scanned in lexicographic (source, target)
/// order and the scan restarts after every removal, so the result is
/// deterministic. The output's order is a subset of the input's and removing
/// any single remaining constraint breaks validity.
pub fn mld(
    problem: &Ppi,
    plan: &PartialOrderPlan,
    validator: Validator,
) -> Result<PartialOrderPlan, MldError> {
    if !validator.check(problem, plan)? {
        return Err(MldError::InvalidInput);
    }
    let mut current = plan.clone();
    'scan: loop {
        for edge in current.order.reduction() {
            let candidate = current
                .with_order(current.order.without_pair(&edge))
                .expect("same action set");
            if validator.check(problem, &candidate)? {
                current = candidate;
                continue 'scan;
            }
        }
        return Ok(current);
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::action::{Action, ActionId};
    use crate::literal::lits;
    use crate::order::OrderRelation;

    fn id(s: &str) -> ActionId {
        ActionId::new(s)
    }

    fn act(name: &str, pre: &[&str], post: &[&str]) -> Action {
        Action::new(name, lits(pre), lits(post), 1).unwrap()
    }

    /// Four-action chain where c's effect both feeds d and would wipe out
    /// a's support for b, so c can shed some constraints but not all.
    fn tangle() -> (Ppi, PartialOrderPlan) {
        let a = act("a", &[], &["p"]);
        let b = act("b", &["p"], &["g"]);
        let c = act("c", &[], &["!p", "t"]);
        let d = act("d", &["t"], &["h"]);
        let plan = PartialOrderPlan::from_sequence(vec![c, d, a, b]).unwrap();
        let problem = Ppi::new(lits(&[]), lits(&["g", "h"])).unwrap();
        (problem, plan)
    }

    #[test]
    fn scan_is_deterministic_and_drops_what_it_can() {
        let (problem, plan) = tangle();
        assert_eq!(plan.order.len(), 6);
        let out = mld(&problem, &plan, Validator::Mtc).unwrap();
        // (d,a) falls first, then (d,b); what remains is forced: b needs a,
        // d needs c, and c's wipe of p must land before a re-produces it.
        let expected = OrderRelation::from_pairs([
            (id("a"), id("b")),
            (id("c"), id("a")),
            (id("c"), id("d")),
        ])
        .unwrap();
        assert_eq!(out.order, expected);
        assert_eq!(out.order.len(), 4);
    }

    #[test]
    fn output_is_a_suborder_and_locally_minimal() {
        let (problem, plan) = tangle();
        for validator in [Validator::Mtc, Validator::BruteForce { max_actions: 10 }] {
            let out = mld(&problem, &plan, validator).unwrap();
            assert!(out.order.pairs().is_subset(plan.order.pairs()));
            assert!(validator.check(&problem, &out).unwrap());
            for edge in out.order.reduction() {
                let weaker = out.with_order(out.order.without_pair(&edge)).unwrap();
                assert!(
                    !validator.check(&problem, &weaker).unwrap(),
                    "constraint {edge:?} was still removable"
                );
            }
        }
    }

    #[test]
    fn both_validators_agree_here() {
        let (problem, plan) = tangle();
        let fast = mld(&problem, &plan, Validator::Mtc).unwrap();
        let slow = mld(&problem, &plan, Validator::BruteForce { max_actions: 10 }).unwrap();
        assert_eq!(fast.order, slow.order);
    }

    #[test]
    fn already_minimal_plans_are_fixed_points() {
        let a = act("a", &[], &["p"]);
        let b = act("b", &["p"], &["g"]);
        let plan = PartialOrderPlan::from_sequence(vec![a, b]).unwrap();
        let problem = Ppi::new(lits(&[]), lits(&["g"])).unwrap();
        let out = mld(&problem, &plan, Validator::Mtc).unwrap();
        assert_eq!(out.order, plan.order);
        let again = mld(&problem, &out, Validator::Mtc).unwrap();
        assert_eq!(again.order, out.order);
    }

    #[test]
    fn unconstrained_actions_shed_everything() {
        let xs: Vec<Action> = (0..4).map(|i| act(&format!("x{i}"), &[], &[])).collect();
        let plan = PartialOrderPlan::from_sequence(xs).unwrap();
        let problem = Ppi::new(lits(&[]), lits(&[])).unwrap();
        let out = mld(&problem, &plan, Validator::Mtc).unwrap();
        assert!(out.order.is_empty());
    }

    #[test]
    fn invalid_input_is_rejected() {
        let a = act("a", &["missing"], &[]);
        let plan = PartialOrderPlan::from_sequence(vec![a]).unwrap();
        let problem = Ppi::new(lits(&[]), lits(&[])).unwrap();
        assert!(matches!(mld(&problem, &plan, Validator::Mtc), Err(MldError::InvalidInput)));
    }
}
