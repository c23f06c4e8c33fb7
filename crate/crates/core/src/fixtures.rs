//! Reference instances shared by the test suite, the generators, and the
//! CLI examples.

use crate::action::{Action, ActionId};
use crate::literal::lits;
use crate::order::OrderRelation;
use crate::parallel::{simple_concurrency, ParallelPlan};
use crate::plan::{PartialOrderPlan, Ppi};
use std::collections::BTreeMap;

fn act(name: &str, pre: &[&str], post: &[&str], d: u32) -> Action {
    Action::new(name, lits(pre), lits(post), d).expect("consistent fixture action")
}

fn id(s: &str) -> ActionId {
    ActionId::new(s)
}

/// Four-action totally ordered plan on which the greedy pair-dropping scan
/// gets stuck one pair above the optimum. Validity needs b ≺ c (to keep the
/// goal atom p alive past its destroyer) and a ≺ d or c ≺ d (d needs r from
/// either producer). The lexicographic scan drops every pair touching `a`
/// first and then cannot let go of c ≺ d, ending at the three-pair chain
/// b ≺ c ≺ d, while {a ≺ d, b ≺ c} with two pairs is valid.
pub fn scan_trap() -> (Ppi, PartialOrderPlan) {
    let actions = vec![
        act("a", &[], &["r"], 1),
        act("b", &[], &["!p"], 1),
        act("c", &[], &["p", "r"], 1),
        act("d", &["r"], &["!q", "r"], 1),
    ];
    let plan = PartialOrderPlan::from_sequence(actions).expect("distinct ids");
    let problem = Ppi::new(lits(&[]), lits(&["p", "r"])).expect("consistent");
    (problem, plan)
}

/// Three actions where only B and C conflict (B asserts q, C denies it), so
/// the final value of q depends on their order; with q outside the goal the
/// plan is valid anyway, with q in the goal it is not.
pub fn effect_clash_trio() -> (Ppi, ParallelPlan) {
    let a = act("A", &[], &["p"], 1);
    let b = act("B", &["p"], &["r", "q"], 1);
    let c = act("C", &[], &["s", "!q"], 1);
    let order = OrderRelation::from_pairs([(id("A"), id("B"))]).expect("acyclic");
    let plan = PartialOrderPlan::new(vec![a, b, c], order).expect("distinct ids");
    let nonconc =
        crate::parallel::NonConcurrency::from_pairs([(id("B"), id("C"))]).expect("irreflexive");
    let problem = Ppi::new(lits(&[]), lits(&["r", "s"])).expect("consistent");
    (problem, ParallelPlan::new(plan, nonconc).expect("ids match"))
}

/// Three actions whose greedy last-producer ordering depends on the input
/// sequence: c needs p and q, a supplies both, b resupplies p on the side.
/// Sequenced ⟨a,c,b⟩ the last producer of everything is a and the result is
/// optimal; sequenced ⟨a,b,c⟩ the p-link goes to b, adding an ordering that
/// a cheaper deordering does without.
pub fn producer_choice() -> (Ppi, Vec<Action>) {
    let actions = vec![
        act("a", &[], &["p", "q"], 1),
        act("b", &["q"], &["p", "s"], 1),
        act("c", &["p", "q"], &["r"], 1),
    ];
    let problem = Ppi::new(lits(&[]), lits(&["r", "s"])).expect("consistent");
    (problem, actions)
}

/// Chain ⟨A,B,C,D⟩ where B redundantly re-posts p, so the causal link
/// A —p→ D that the link-tracing deorderer keeps is not actually needed:
/// dropping A ≺ D stays valid because B covers p.
pub fn redundant_producer() -> (Ppi, PartialOrderPlan) {
    let actions = vec![
        act("A", &[], &["p", "s"], 1),
        act("B", &[], &["q", "t", "p"], 1),
        act("C", &[], &["r"], 1),
        act("D", &["p", "q"], &["u"], 1),
    ];
    let plan = PartialOrderPlan::from_sequence(actions).expect("distinct ids");
    let problem = Ppi::new(lits(&[]), lits(&["r", "s", "t", "u"])).expect("consistent");
    (problem, plan)
}

/// The toy-car assembly model: mount a top and inflated wheels on a car
/// body that must sit on stand 1 for the top and stand 2 for the wheels,
/// returning it to the side stand at the end.
pub struct ToyCar {
    pub problem: Ppi,
    /// The hand-written working sequence, as a totally ordered plan.
    pub chain: ParallelPlan,
    /// Its greedy deordering: 26 closure pairs, schedulable in 25.
    pub deordered: ParallelPlan,
    /// A hand reordering that schedules in 16, the best possible here.
    pub reordered: ParallelPlan,
}

fn toy_car_actions(overrides: &BTreeMap<ActionId, u32>) -> Vec<Action> {
    let base = vec![
        act("MvT1", &[], &["top1"], 1),
        act("MvW2", &[], &["w2"], 1),
        act("PAC", &[], &["press"], 5),
        act("IT", &["press", "w2"], &["infl"], 4),
        act("MvC1", &[], &["c1", "!c2", "!cS"], 2),
        act("MvC2", &[], &["c2", "!cS"], 2),
        act("MtT", &["top1", "c1"], &["topOn"], 7),
        act("MtW", &["w2", "infl", "c2"], &["wOn"], 4),
        act("MvS", &["topOn"], &["cS", "!c1", "!c2"], 3),
    ];
    base.into_iter()
        .map(|mut a| {
            if let Some(&d) = overrides.get(&a.id) {
                a.duration = d;
            }
            a
        })
        .collect()
}

/// The duration variation studied alongside the base model: a faster air
/// cylinder and a much slower top delivery.
pub fn toy_car_alternate_durations() -> BTreeMap<ActionId, u32> {
    BTreeMap::from([(id("PAC"), 2), (id("MvT1"), 8)])
}

pub fn toy_car() -> ToyCar {
    toy_car_with_durations(&BTreeMap::new())
}

pub fn toy_car_with_durations(overrides: &BTreeMap<ActionId, u32>) -> ToyCar {
    let actions = toy_car_actions(overrides);
    let nonconc = simple_concurrency(actions.iter());
    let problem = Ppi::new(lits(&["cS"]), lits(&["topOn", "wOn"])).expect("consistent");

    let seq = ["MvW2", "PAC", "IT", "MvC2", "MtW", "MvT1", "MvC1", "MtT", "MvS"];
    let seq_ids: Vec<ActionId> = seq.iter().map(|s| id(s)).collect();
    let mut by_id: BTreeMap<ActionId, Action> =
        actions.iter().map(|a| (a.id.clone(), a.clone())).collect();
    let ordered: Vec<Action> =
        seq_ids.iter().map(|i| by_id.remove(i).expect("known id")).collect();
    let chain_plan = PartialOrderPlan::from_sequence(ordered).expect("distinct ids");
    let chain = ParallelPlan::new(chain_plan, nonconc.clone()).expect("ids match");

    let deordered_arcs = [
        ("MvW2", "IT"),
        ("PAC", "IT"),
        ("IT", "MtW"),
        ("MvC2", "MtW"),
        ("MtW", "MvC1"),
        ("MvC1", "MtT"),
        ("MvT1", "MtT"),
        ("MtT", "MvS"),
    ];
    let reordered_arcs = [
        ("MvC1", "MvC2"),
        ("MvC1", "MtT"),
        ("MvT1", "MtT"),
        ("PAC", "IT"),
        ("MvW2", "IT"),
        ("IT", "MtW"),
        ("MvC2", "MtW"),
        ("MtT", "MvS"),
        ("MtW", "MvS"),
    ];
    let mk = |arcs: &[(&str, &str)]| -> ParallelPlan {
        let order =
            OrderRelation::from_pairs(arcs.iter().map(|(x, y)| (id(x), id(y)))).expect("acyclic");
        let plan = PartialOrderPlan::new(actions.clone(), order).expect("distinct ids");
        ParallelPlan::new(plan, nonconc.clone()).expect("ids match")
    };

    ToyCar { problem, chain, deordered: mk(&deordered_arcs), reordered: mk(&reordered_arcs) }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::deorder::mld;
    use crate::oracles::{mmcd_exact, mmcr_exact, OracleBudget};
    use crate::parallel::dppl;
    use crate::semantics::{mtc_valid, Validator};
    use std::collections::BTreeSet;

    #[test]
    fn scan_trap_behaves_as_advertised() {
        let (problem, plan) = scan_trap();
        assert!(mtc_valid(&problem, &plan).unwrap());
        let shrunk = mld(&problem, &plan, Validator::Mtc).unwrap();
        let expected: BTreeSet<_> =
            [(id("b"), id("c")), (id("b"), id("d")), (id("c"), id("d"))].into_iter().collect();
        assert_eq!(*shrunk.order.pairs(), expected, "greedy scan lands on the 3-pair chain");

        let budget = OracleBudget::default();
        let cd = mmcd_exact(&problem, &plan, &budget).unwrap();
        assert_eq!(cd.optimum, 2);
        let witness: BTreeSet<_> = [(id("a"), id("d")), (id("b"), id("c"))].into_iter().collect();
        assert_eq!(*cd.witness_order.unwrap().pairs(), witness);
        assert_eq!(mmcr_exact(&problem, &plan, &budget).unwrap().optimum, 2);
    }

    #[test]
    fn clash_trio_is_the_shared_parallel_example() {
        let (problem, pp) = effect_clash_trio();
        assert!(mtc_valid(&problem, &pp.plan).unwrap());
        assert!(!pp.is_definite());
        let with_q = Ppi::new(lits(&[]), lits(&["r", "s", "q"])).unwrap();
        assert!(!mtc_valid(&with_q, &pp.plan).unwrap());
    }

    #[test]
    fn producer_choice_sequences_are_both_valid() {
        let (problem, actions) = producer_choice();
        for seq in [["a", "c", "b"], ["a", "b", "c"]] {
            let mut by_id: BTreeMap<ActionId, Action> =
                actions.iter().map(|a| (a.id.clone(), a.clone())).collect();
            let ordered: Vec<Action> =
                seq.iter().map(|s| by_id.remove(&id(s)).unwrap()).collect();
            let plan = PartialOrderPlan::from_sequence(ordered).unwrap();
            assert!(mtc_valid(&problem, &plan).unwrap(), "sequence {seq:?}");
        }
    }

    #[test]
    fn redundant_producer_chain_is_valid() {
        let (problem, plan) = redundant_producer();
        assert!(plan.is_total_order());
        assert!(mtc_valid(&problem, &plan).unwrap());
    }

    #[test]
    fn toy_car_numbers_hold_for_both_duration_sets() {
        let car = toy_car();
        assert_eq!(car.chain.plan.total_duration(), 29);
        assert!(car.chain.plan.is_total_order());
        assert!(mtc_valid(&car.problem, &car.chain.plan).unwrap());
        assert!(mtc_valid(&car.problem, &car.deordered.plan).unwrap());
        assert!(mtc_valid(&car.problem, &car.reordered.plan).unwrap());
        assert_eq!(car.deordered.plan.order.len(), 26);
        assert!(car.deordered.is_definite());
        assert!(car.reordered.is_definite());
        assert_eq!(dppl(&car.deordered).unwrap().1, 25);
        assert_eq!(dppl(&car.reordered).unwrap().1, 16);

        let alt = toy_car_with_durations(&toy_car_alternate_durations());
        assert_eq!(dppl(&alt.deordered).unwrap().1, 22);
        assert_eq!(dppl(&alt.reordered).unwrap().1, 18);
    }

    #[test]
    fn toy_car_greedy_deordering_matches_the_published_suborder() {
        let car = toy_car();
        let shrunk = mld(&car.problem, &car.chain.plan, Validator::Mtc).unwrap();
        assert_eq!(shrunk.order, car.deordered.plan.order);
    }
}
