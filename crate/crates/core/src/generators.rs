//! Instance mills. Each constructor builds a problem/plan family around a
//! known combinatorial core (set cover, graph coloring, 3-SAT, a layered
//! deorder/reorder gap family, and the toy assembly model), works out the
//! expected answer with a tiny exact solver, and re-checks both the plan
//! and any witnesses through the public checkers before handing them out.

use crate::action::{Action, ActionId};
use crate::literal::{Atom, Literal};
use crate::order::OrderRelation;
use crate::parallel::{
    check_execution, dppl, post_exclusion, simple_concurrency, Execution, ParallelPlan,
};
use crate::plan::{PartialOrderPlan, Ppi};
use crate::semantics::mtc_valid;
use serde::{Deserialize, Serialize};
use std::collections::{BTreeMap, BTreeSet};

/// One machine-checkable statement about an instance. Witness orders are
/// stored as generating pairs (closed on decode); releases by action name.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Claim {
    /// The named quantity is exactly `value`.
    Optimum {
        problem: String,
        value: u64,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        witness_order: Option<Vec<(String, String)>>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        witness_release: Option<BTreeMap<String, u32>>,
    },
    /// The named quantity does (or provably does not) reach `threshold`.
    Threshold {
        problem: String,
        threshold: u64,
        achievable: bool,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        witness_order: Option<Vec<(String, String)>>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        witness_release: Option<BTreeMap<String, u32>>,
    },
}

impl Claim {
    pub fn optimum(problem: &str, value: u64) -> Claim {
        Claim::Optimum {
            problem: problem.to_string(),
            value,
            witness_order: None,
            witness_release: None,
        }
    }

    pub fn threshold(problem: &str, threshold: u64, achievable: bool) -> Claim {
        Claim::Threshold {
            problem: problem.to_string(),
            threshold,
            achievable,
            witness_order: None,
            witness_release: None,
        }
    }

    pub fn with_order_witness(mut self, order: &OrderRelation) -> Claim {
        let pairs: Vec<(String, String)> = order
            .reduction()
            .into_iter()
            .map(|(a, b)| (a.0, b.0))
            .collect();
        match &mut self {
            Claim::Optimum { witness_order, .. } | Claim::Threshold { witness_order, .. } => {
                *witness_order = Some(pairs)
            }
        }
        self
    }

    pub fn with_release_witness(mut self, exec: &Execution) -> Claim {
        let rel: BTreeMap<String, u32> =
            exec.release.iter().map(|(a, r)| (a.0.clone(), *r)).collect();
        match &mut self {
            Claim::Optimum { witness_release, .. } | Claim::Threshold { witness_release, .. } => {
                *witness_release = Some(rel)
            }
        }
        self
    }

    pub fn problem(&self) -> &str {
        match self {
            Claim::Optimum { problem, .. } | Claim::Threshold { problem, .. } => problem,
        }
    }

    /// The optimum value, or the threshold for threshold claims.
    pub fn expected(&self) -> u64 {
        match self {
            Claim::Optimum { value, .. } => *value,
            Claim::Threshold { threshold, .. } => *threshold,
        }
    }

    pub fn witness_order(&self) -> Option<&Vec<(String, String)>> {
        match self {
            Claim::Optimum { witness_order, .. } | Claim::Threshold { witness_order, .. } => {
                witness_order.as_ref()
            }
        }
    }

    pub fn witness_release(&self) -> Option<&BTreeMap<String, u32>> {
        match self {
            Claim::Optimum { witness_release, .. }
            | Claim::Threshold { witness_release, .. } => witness_release.as_ref(),
        }
    }
}

/// The expected answers bundled with a generated instance.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize, Default)]
pub struct Certificate {
    pub claims: Vec<Claim>,
}

/// A generated problem/plan pair plus its certificate.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CertifiedInstance {
    pub problem: Ppi,
    pub plan: ParallelPlan,
    pub certificate: Certificate,
}

impl CertifiedInstance {
    /// Re-check every embedded witness through the public checkers: witness
    /// orders must be acyclic, valid, and (for deordering problems) subsets
    /// of the instance order; witness releases must execute and meet the
    /// claimed number. Returns the first discrepancy as text.
    pub fn check_witnesses(&self) -> Result<(), String> {
        for claim in &self.certificate.claims {
            let name = claim.problem();
            let order = match claim.witness_order() {
                Some(pairs) => {
                    let native = pairs
                        .iter()
                        .map(|(a, b)| (ActionId::new(a.clone()), ActionId::new(b.clone())));
                    let order = OrderRelation::from_pairs(native)
                        .map_err(|c| format!("{name}: witness order is cyclic at {c:?}"))?;
                    let plan = self
                        .plan
                        .plan
                        .with_order(order.clone())
                        .map_err(|e| format!("{name}: witness order: {e}"))?;
                    if !mtc_valid(&self.problem, &plan)
                        .map_err(|e| format!("{name}: witness check: {e}"))?
                    {
                        return Err(format!("{name}: witness order is not valid"));
                    }
                    if matches!(name, "mmcd" | "mmpd")
                        && !order.pairs().is_subset(self.plan.plan.order.pairs())
                    {
                        return Err(format!("{name}: witness is not a suborder of the input"));
                    }
                    if matches!(name, "mmcd" | "mmcr") && order.len() as u64 != claim.expected() {
                        return Err(format!(
                            "{name}: witness has {} pairs, claim says {}",
                            order.len(),
                            claim.expected()
                        ));
                    }
                    Some(order)
                }
                None => None,
            };
            if let Some(rel) = claim.witness_release() {
                let release: BTreeMap<ActionId, u32> = rel
                    .iter()
                    .map(|(a, r)| (ActionId::new(a.clone()), *r))
                    .collect();
                let pp = match order {
                    Some(o) => self
                        .plan
                        .with_order(o)
                        .map_err(|e| format!("{name}: witness order: {e}"))?,
                    None => self.plan.clone(),
                };
                let makespan = check_execution(&pp, &Execution::new(release))
                    .map_err(|e| format!("{name}: witness release: {e}"))?;
                let ok = match claim {
                    Claim::Optimum { value, .. } => makespan == *value,
                    Claim::Threshold { threshold, achievable, .. } => {
                        *achievable && makespan <= *threshold
                    }
                };
                if !ok {
                    return Err(format!(
                        "{name}: witness runs in {makespan}, claim says {}",
                        claim.expected()
                    ));
                }
            }
            if name == "sequential" {
                let (_, len) = dppl(&self.plan)
                    .map_err(|e| format!("sequential claim on a non-definite plan: {e:?}"))?;
                if len != claim.expected() {
                    return Err(format!(
                        "sequential: plan runs in {len}, claim says {}",
                        claim.expected()
                    ));
                }
            }
        }
        Ok(())
    }
}

fn atom(s: impl Into<String>) -> Atom {
    Atom::new(s)
}

fn assert_emittable(problem: &Ppi, plan: &PartialOrderPlan) {
    assert!(
        mtc_valid(problem, plan).expect("generated plan is checkable"),
        "generated plan failed validation before emission"
    );
}

// ---------------------------------------------------------------------------
// Set cover
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum CoverError {
    #[error("subset {index} contains \"{element}\", which is not in the ground set")]
    ElementNotInS { index: usize, element: String },
    #[error("\"{element}\" is in no subset, so the ground set has no cover")]
    Uncoverable { element: String },
    #[error("the exact cover check handles at most {max} subsets, got {actual}")]
    TooManySubsets { max: usize, actual: usize },
}

const COVER_SUBSET_CAP: usize = 16;

/// Exact minimum cover by exhaustion; returns (size, chosen subset indices).
fn brute_min_cover(ground: &BTreeSet<Atom>, subsets: &[BTreeSet<Atom>]) -> Option<Vec<usize>> {
    let m = subsets.len();
    let mut best: Option<Vec<usize>> = None;
    for mask in 0u32..(1 << m) {
        if let Some(b) = &best {
            if mask.count_ones() as usize >= b.len() && !ground.is_empty() {
                if mask.count_ones() as usize > b.len() {
                    continue;
                }
            }
        }
        let chosen: Vec<usize> = (0..m).filter(|i| mask & (1 << i) != 0).collect();
        let covered: BTreeSet<&Atom> = chosen.iter().flat_map(|&i| subsets[i].iter()).collect();
        if ground.iter().all(|e| covered.contains(e)) {
            let better = match &best {
                Some(b) => chosen.len() < b.len(),
                None => true,
            };
            if better {
                best = Some(chosen);
            }
        }
    }
    best
}

/// A one-consumer instance whose least-commitment deordering is a minimum
/// cover: one effect-only action per subset, one final action demanding the
/// whole ground set. The only orderings worth keeping are subset-action →
/// final-action pairs, one per chosen subset.
pub fn gen_min_cover(
    ground: &BTreeSet<Atom>,
    subsets: &[BTreeSet<Atom>],
) -> Result<CertifiedInstance, CoverError> {
    if subsets.len() > COVER_SUBSET_CAP {
        return Err(CoverError::TooManySubsets {
            max: COVER_SUBSET_CAP,
            actual: subsets.len(),
        });
    }
    for (index, sub) in subsets.iter().enumerate() {
        if let Some(e) = sub.iter().find(|e| !ground.contains(*e)) {
            return Err(CoverError::ElementNotInS {
                index: index + 1,
                element: e.name().to_string(),
            });
        }
    }
    let all: BTreeSet<&Atom> = subsets.iter().flatten().collect();
    if let Some(e) = ground.iter().find(|e| !all.contains(*e)) {
        return Err(CoverError::Uncoverable { element: e.name().to_string() });
    }
    let best = brute_min_cover(ground, subsets).expect("coverability checked above");

    let goal_atom = {
        let mut name = "r".to_string();
        let mut k = 0;
        while ground.contains(&atom(name.clone())) {
            name = format!("r{k}");
            k += 1;
        }
        atom(name)
    };
    let mut actions = Vec::new();
    for (i, sub) in subsets.iter().enumerate() {
        let post: BTreeSet<Literal> = sub.iter().map(|a| Literal::pos(a.clone())).collect();
        actions.push(Action::new(format!("a{}", i + 1), BTreeSet::new(), post, 1).unwrap());
    }
    let pre: BTreeSet<Literal> = ground.iter().map(|a| Literal::pos(a.clone())).collect();
    let post: BTreeSet<Literal> = [Literal::pos(goal_atom.clone())].into();
    actions.push(Action::new("aS", pre, post, 1).unwrap());

    let problem = Ppi::new(BTreeSet::new(), [Literal::pos(goal_atom)].into()).unwrap();
    let nonconc = simple_concurrency(actions.iter());
    let plan = PartialOrderPlan::from_sequence(actions).unwrap();
    assert_emittable(&problem, &plan);

    let witness = OrderRelation::from_pairs(
        best.iter()
            .map(|&i| (ActionId::new(format!("a{}", i + 1)), ActionId::new("aS"))),
    )
    .unwrap();
    let claim = Claim::optimum("mmcd", best.len() as u64).with_order_witness(&witness);
    let instance = CertifiedInstance {
        problem,
        plan: ParallelPlan::new(plan, nonconc).unwrap(),
        certificate: Certificate { claims: vec![claim] },
    };
    instance.check_witnesses().expect("cover witness re-validates");
    Ok(instance)
}

// ---------------------------------------------------------------------------
// Graph coloring
// ---------------------------------------------------------------------------

/// An undirected simple graph on vertices `0..n`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SimpleGraph {
    n: usize,
    edges: BTreeSet<(usize, usize)>,
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum GraphError {
    #[error("edge ({0}, {1}) is out of range")]
    VertexOutOfRange(usize, usize),
    #[error("self-loop at vertex {0}")]
    SelfLoop(usize),
}

impl SimpleGraph {
    pub fn new(
        n: usize,
        edges: impl IntoIterator<Item = (usize, usize)>,
    ) -> Result<Self, GraphError> {
        let mut set = BTreeSet::new();
        for (a, b) in edges {
            if a == b {
                return Err(GraphError::SelfLoop(a));
            }
            if a >= n || b >= n {
                return Err(GraphError::VertexOutOfRange(a, b));
            }
            set.insert((a.min(b), a.max(b)));
        }
        Ok(SimpleGraph { n, edges: set })
    }

    pub fn edgeless(n: usize) -> Self {
        SimpleGraph { n, edges: BTreeSet::new() }
    }

    pub fn complete(n: usize) -> Self {
        let edges = (0..n).flat_map(|a| (a + 1..n).map(move |b| (a, b)));
        SimpleGraph::new(n, edges).unwrap()
    }

    pub fn cycle(n: usize) -> Self {
        assert!(n >= 3, "a cycle needs at least three vertices");
        SimpleGraph::new(n, (0..n).map(|i| (i, (i + 1) % n))).unwrap()
    }

    /// The 3-regular 10-vertex graph: outer 5-cycle, inner 5-star, spokes.
    pub fn petersen() -> Self {
        let outer = (0..5).map(|i| (i, (i + 1) % 5));
        let inner = (0..5).map(|i| (5 + i, 5 + (i + 2) % 5));
        let spokes = (0..5).map(|i| (i, i + 5));
        SimpleGraph::new(10, outer.chain(inner).chain(spokes)).unwrap()
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    pub fn edges(&self) -> &BTreeSet<(usize, usize)> {
        &self.edges
    }

    fn adjacent(&self, a: usize, b: usize) -> bool {
        self.edges.contains(&(a.min(b), a.max(b)))
    }
}

/// Exact chromatic number with a greedy-extension search; also returns one
/// optimal coloring.
fn brute_chromatic(g: &SimpleGraph) -> (u64, Vec<u32>) {
    if g.n == 0 {
        return (0, Vec::new());
    }
    fn extend(g: &SimpleGraph, k: u32, colors: &mut Vec<u32>) -> bool {
        let v = colors.len();
        if v == g.n {
            return true;
        }
        let used = colors.iter().copied().max().map_or(0, |m| m + 1);
        for c in 0..k.min(used + 1) {
            if (0..v).all(|u| !g.adjacent(u, v) || colors[u] != c) {
                colors.push(c);
                if extend(g, k, colors) {
                    return true;
                }
                colors.pop();
            }
        }
        false
    }
    for k in 1..=g.n as u32 {
        let mut colors = Vec::new();
        if extend(g, k, &mut colors) {
            return (k as u64, colors);
        }
    }
    unreachable!("n colors always suffice")
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ColoringError {
    #[error("the exact coloring check handles at most {max} vertices, got {actual}")]
    TooManyVertices { max: usize, actual: usize },
}

const COLORING_VERTEX_CAP: usize = 12;

/// A scheduling instance whose optimal makespan is the chromatic number:
/// one unit action per vertex, a private goal atom each, and effect clashes
/// exactly along the edges, so two adjacent vertices can never run in the
/// same time slot. With `totalize` the actions are chained in id order and
/// the claim moves to the best deordering instead.
pub fn gen_coloring(g: &SimpleGraph, totalize: bool) -> Result<CertifiedInstance, ColoringError> {
    if g.n > COLORING_VERTEX_CAP {
        return Err(ColoringError::TooManyVertices {
            max: COLORING_VERTEX_CAP,
            actual: g.n,
        });
    }
    let (chi, coloring) = brute_chromatic(g);

    let mut actions = Vec::new();
    for v in 0..g.n {
        let mut post: BTreeSet<Literal> = BTreeSet::new();
        post.insert(Literal::pos(atom(format!("p{}", v + 1))));
        post.insert(Literal::pos(atom(format!("q{}", v + 1))));
        for u in 0..g.n {
            if g.adjacent(v, u) {
                post.insert(Literal::neg(atom(format!("q{}", u + 1))));
            }
        }
        actions.push(Action::new(format!("v{}", v + 1), BTreeSet::new(), post, 1).unwrap());
    }
    let goal: BTreeSet<Literal> = (0..g.n)
        .map(|v| Literal::pos(atom(format!("p{}", v + 1))))
        .collect();
    let problem = Ppi::new(BTreeSet::new(), goal).unwrap();
    let nonconc = post_exclusion(actions.iter());
    debug_assert_eq!(
        nonconc.pairs().iter().cloned().collect::<BTreeSet<_>>(),
        g.edges
            .iter()
            .map(|(a, b)| {
                let a = ActionId::new(format!("v{}", a + 1));
                let b = ActionId::new(format!("v{}", b + 1));
                (a.clone().min(b.clone()), a.max(b))
            })
            .collect(),
        "effect clashes mirror the edge set"
    );

    let ids: Vec<ActionId> = actions.iter().map(|a| a.id.clone()).collect();
    let order = if totalize { OrderRelation::chain(&ids) } else { OrderRelation::empty() };
    let plan = PartialOrderPlan::new(actions, order).unwrap();
    assert_emittable(&problem, &plan);

    let release: BTreeMap<ActionId, u32> = ids
        .iter()
        .enumerate()
        .map(|(v, id)| (id.clone(), coloring[v]))
        .collect();
    let exec = Execution::new(release);
    let claim = if totalize {
        Claim::optimum("mmpd", chi)
            .with_order_witness(&OrderRelation::empty())
            .with_release_witness(&exec)
    } else {
        Claim::optimum("ppl", chi).with_release_witness(&exec)
    };
    let instance = CertifiedInstance {
        problem,
        plan: ParallelPlan::new(plan, nonconc).unwrap(),
        certificate: Certificate { claims: vec![claim] },
    };
    instance.check_witnesses().expect("coloring witness re-validates");
    Ok(instance)
}

// ---------------------------------------------------------------------------
// 3-SAT
// ---------------------------------------------------------------------------

/// A literal over the input atoms `1..=n` of a clause set.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
pub struct SatLiteral {
    pub atom: usize,
    pub positive: bool,
}

impl SatLiteral {
    pub fn pos(atom: usize) -> Self {
        SatLiteral { atom, positive: true }
    }

    pub fn neg(atom: usize) -> Self {
        SatLiteral { atom, positive: false }
    }
}

#[derive(Debug, Clone, Copy, Default)]
pub struct SatOptions {
    /// Accept clauses whose three slots repeat an atom.
    pub allow_repeats: bool,
    /// Reproduce the published gadget table to the letter: the third slot of
    /// every blocking action then reads clause 1's third token instead of
    /// its own clause's. The emitted plan is still validated; the makespan
    /// claim is dropped because the gadget no longer encodes the clause set.
    pub strict_text: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum SatError {
    #[error("clause {clause}: {reason}")]
    MalformedClause { clause: usize, reason: String },
    #[error("the exact satisfiability check handles at most {max} atoms, got {actual}")]
    TooManyAtoms { max: usize, actual: usize },
}

const SAT_ATOM_CAP: usize = 20;

fn brute_sat(n: usize, clauses: &[[SatLiteral; 3]]) -> Option<Vec<bool>> {
    for mask in 0u64..(1 << n) {
        let assign: Vec<bool> = (0..n).map(|i| mask & (1 << i) != 0).collect();
        let ok = clauses.iter().all(|cl| {
            cl.iter().any(|l| assign[l.atom - 1] == l.positive)
        });
        if ok {
            return Some(assign);
        }
    }
    None
}

/// The clause-set-to-plan gadget: four toggling unary actions per atom
/// (a flag raised and lowered around recording "true", then recording
/// "false"), nine per clause (a one-slot-at-a-time token cycle guarding a
/// blocking action per literal). The emitted plan is a valid total order;
/// the certificate states whether some reordering runs in 8 time units,
/// which holds exactly when the clause set is satisfiable.
pub fn gen_3sat(
    n: usize,
    clauses: &[[SatLiteral; 3]],
    opts: SatOptions,
) -> Result<CertifiedInstance, SatError> {
    if n > SAT_ATOM_CAP {
        return Err(SatError::TooManyAtoms { max: SAT_ATOM_CAP, actual: n });
    }
    for (ci, cl) in clauses.iter().enumerate() {
        let clause = ci + 1;
        for l in cl {
            if l.atom == 0 || l.atom > n {
                return Err(SatError::MalformedClause {
                    clause,
                    reason: format!("atom index {} is outside 1..={n}", l.atom),
                });
            }
        }
        let distinct: BTreeSet<usize> = cl.iter().map(|l| l.atom).collect();
        if distinct.len() < 3 && !opts.allow_repeats {
            return Err(SatError::MalformedClause {
                clause,
                reason: "atoms repeat within the clause (enable repeats to allow)".into(),
            });
        }
    }
    let m = clauses.len();

    let p_true = |i: usize| atom(format!("pT{i}"));
    let p_false = |i: usize| atom(format!("pF{i}"));
    let q = |i: usize| atom(format!("q{i}"));
    let c = |i: usize, j: usize| atom(format!("c{i}_{j}"));
    let r = |i: usize, j: usize| atom(format!("r{i}_{j}"));
    let star = |l: &SatLiteral| if l.positive { p_true(l.atom) } else { p_false(l.atom) };

    let mut actions = Vec::new();
    for i in 1..=n {
        actions.push(
            Action::new(
                format!("A{i}F"),
                [Literal::neg(p_false(i)), Literal::neg(q(i))].into(),
                [Literal::pos(p_false(i))].into(),
                1,
            )
            .unwrap(),
        );
        actions.push(
            Action::new(
                format!("A{i}T"),
                [Literal::neg(p_true(i)), Literal::pos(q(i))].into(),
                [Literal::pos(p_true(i))].into(),
                1,
            )
            .unwrap(),
        );
        actions.push(
            Action::new(
                format!("A{i}+"),
                [Literal::neg(q(i))].into(),
                [Literal::pos(q(i))].into(),
                1,
            )
            .unwrap(),
        );
        actions.push(
            Action::new(
                format!("A{i}-"),
                [Literal::pos(q(i))].into(),
                [Literal::neg(q(i))].into(),
                1,
            )
            .unwrap(),
        );
    }
    for (ci, cl) in clauses.iter().enumerate() {
        let i = ci + 1;
        // The printed table keys every third token to clause 1.
        let third = if opts.strict_text { 1 } else { i };
        for j in 1..=3 {
            let mut pre: BTreeSet<Literal> = BTreeSet::new();
            pre.insert(Literal::pos(star(&cl[j - 1])));
            for slot in 1..=3 {
                let tok = if slot == 3 { r(third, 3) } else { r(i, slot) };
                pre.insert(if slot == j { Literal::pos(tok) } else { Literal::neg(tok) });
            }
            pre.insert(Literal::neg(c(i, j)));
            actions.push(
                Action::new(format!("B{i}_{j}"), pre, [Literal::pos(c(i, j))].into(), 1).unwrap(),
            );
            actions.push(
                Action::new(
                    format!("C{i}_{j}+"),
                    [Literal::neg(r(i, j))].into(),
                    [Literal::pos(r(i, j))].into(),
                    1,
                )
                .unwrap(),
            );
            actions.push(
                Action::new(
                    format!("C{i}_{j}-"),
                    [Literal::pos(r(i, j))].into(),
                    [Literal::neg(r(i, j))].into(),
                    1,
                )
                .unwrap(),
            );
        }
    }
    debug_assert_eq!(actions.len(), 4 * n + 9 * m);
    debug_assert!(actions.iter().all(|a| is_toggling(a) && is_unary(a)));

    let mut all_atoms: BTreeSet<Atom> = BTreeSet::new();
    for i in 1..=n {
        all_atoms.extend([p_true(i), p_false(i), q(i)]);
    }
    for i in 1..=m {
        for j in 1..=3 {
            all_atoms.extend([c(i, j), r(i, j)]);
        }
    }
    let init: BTreeSet<Literal> = all_atoms.iter().map(|a| Literal::neg(a.clone())).collect();
    let mut goal: BTreeSet<Literal> = BTreeSet::new();
    for i in 1..=n {
        goal.extend([Literal::pos(p_true(i)), Literal::pos(p_false(i)), Literal::neg(q(i))]);
    }
    for i in 1..=m {
        for j in 1..=3 {
            goal.extend([Literal::pos(c(i, j)), Literal::neg(r(i, j))]);
        }
    }
    let problem = Ppi::new(init, goal).unwrap();

    // A valid working order: flag cycles per atom, then token cycles per
    // clause slot. Under strict text the third-slot cycles of later clauses
    // must run inside clause 1's third-token window.
    let mut seq: Vec<ActionId> = Vec::new();
    for i in 1..=n {
        for suffix in ["+", "T", "-", "F"] {
            seq.push(ActionId::new(format!("A{i}{suffix}")));
        }
    }
    let push_cycle = |seq: &mut Vec<ActionId>, i: usize, j: usize| {
        seq.push(ActionId::new(format!("C{i}_{j}+")));
        seq.push(ActionId::new(format!("B{i}_{j}")));
        seq.push(ActionId::new(format!("C{i}_{j}-")));
    };
    if opts.strict_text && m >= 1 {
        for j in 1..=2 {
            push_cycle(&mut seq, 1, j);
        }
        seq.push(ActionId::new("C1_3+"));
        for i in 2..=m {
            push_cycle(&mut seq, i, 3);
        }
        seq.push(ActionId::new("B1_3"));
        seq.push(ActionId::new("C1_3-"));
        for i in 2..=m {
            for j in 1..=2 {
                push_cycle(&mut seq, i, j);
            }
        }
    } else {
        for i in 1..=m {
            for j in 1..=3 {
                push_cycle(&mut seq, i, j);
            }
        }
    }
    let order = OrderRelation::chain(&seq);
    let nonconc = simple_concurrency(actions.iter());
    let plan = PartialOrderPlan::new(actions, order).unwrap();
    assert_emittable(&problem, &plan);
    let count = plan.len() as u64;

    let mut claims = vec![Claim::optimum("sequential", count)];
    if !opts.strict_text {
        match brute_sat(n, clauses) {
            Some(assign) => {
                let mut release: BTreeMap<ActionId, u32> = BTreeMap::new();
                for i in 1..=n {
                    let slots: [&str; 4] =
                        if assign[i - 1] { ["+", "T", "-", "F"] } else { ["F", "+", "T", "-"] };
                    for (t, suffix) in slots.iter().enumerate() {
                        release.insert(ActionId::new(format!("A{i}{suffix}")), t as u32);
                    }
                }
                for (ci, cl) in clauses.iter().enumerate() {
                    let i = ci + 1;
                    let sat_slot = (1..=3)
                        .find(|&j| {
                            let l = &cl[j - 1];
                            assign[l.atom - 1] == l.positive
                        })
                        .expect("assignment satisfies every clause");
                    let rest = (1..=3).filter(|&j| j != sat_slot);
                    for (h, j) in std::iter::once(sat_slot).chain(rest).enumerate() {
                        let h = h as u32 + 1;
                        release.insert(ActionId::new(format!("C{i}_{j}+")), 2 * h - 1);
                        release.insert(ActionId::new(format!("B{i}_{j}")), 2 * h);
                        release.insert(ActionId::new(format!("C{i}_{j}-")), 2 * h + 1);
                    }
                }
                let mut pairs = Vec::new();
                let ids: Vec<&ActionId> = release.keys().collect();
                for a in &ids {
                    for b in &ids {
                        if release[*a] < release[*b] {
                            pairs.push(((*a).clone(), (*b).clone()));
                        }
                    }
                }
                let worder = OrderRelation::from_pairs(pairs).unwrap();
                let exec = Execution::new(release);
                claims.push(
                    Claim::threshold("mmpr", 8, true)
                        .with_order_witness(&worder)
                        .with_release_witness(&exec),
                );
            }
            None => claims.push(Claim::threshold("mmpr", 8, false)),
        }
    }

    let instance = CertifiedInstance {
        problem,
        plan: ParallelPlan::new(plan, nonconc).unwrap(),
        certificate: Certificate { claims },
    };
    instance.check_witnesses().expect("3-sat witness re-validates");
    Ok(instance)
}

/// Every effect undoes a precondition: the action flips literals it checks.
pub fn is_toggling(a: &Action) -> bool {
    a.post.iter().all(|l| a.pre.contains(&l.negate()))
}

/// Exactly one effect.
pub fn is_unary(a: &Action) -> bool {
    a.post.len() == 1
}

// ---------------------------------------------------------------------------
// Deorder/reorder gap family
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum GapError {
    #[error("the gap family is capped at {max} actions, parameters give {actual}")]
    BudgetExceeded { max: u64, actual: u64 },
}

const GAP_ACTION_CAP: u64 = 512;

/// Predicted size of the level-`k` fan-out-`n` family: 3nᵏ plus 2nⁱ for
/// each intermediate level.
pub fn gap_action_count(k: u32, n: u32) -> Option<u64> {
    let n = n as u64;
    let mut total = 3u64.checked_mul(n.checked_pow(k)?)?;
    for i in 1..k {
        total = total.checked_add(2u64.checked_mul(n.checked_pow(i)?)?)?;
    }
    Some(total)
}

/// A layered fan-out family with an exponential gap between its best
/// deordering (the plan itself: every covering pair is load-bearing) and
/// its best reordering (a (2k+1)-slot schedule). Unit durations; initial
/// state supplies the level-k tickets, goal collects the level-k receipts.
pub fn gen_gap(k: u32, n: u32) -> Result<CertifiedInstance, GapError> {
    assert!(k >= 1 && n >= 1, "both parameters must be positive");
    let count = gap_action_count(k, n).unwrap_or(u64::MAX);
    if count > GAP_ACTION_CAP {
        return Err(GapError::BudgetExceeded { max: GAP_ACTION_CAP, actual: count });
    }

    let p = |i: u64, l: u32| atom(format!("p{i}_{l}"));
    let q = |i: u64, l: u32| atom(format!("q{i}_{l}"));
    let aid = |i: u64, l: u32| ActionId::new(format!("a{i}_{l}"));
    let bid = |i: u64| ActionId::new(format!("b{i}"));
    let cid = |i: u64, l: u32| ActionId::new(format!("c{i}_{l}"));

    let mut actions: Vec<Action> = Vec::new();
    // Reordering witness arcs and releases, built alongside the actions.
    let mut arcs: Vec<(ActionId, ActionId)> = Vec::new();
    let mut release: BTreeMap<ActionId, u32> = BTreeMap::new();

    fn build(
        l: u32,
        i: u64,
        k: u32,
        n: u64,
        actions: &mut Vec<Action>,
        arcs: &mut Vec<(ActionId, ActionId)>,
        release: &mut BTreeMap<ActionId, u32>,
        p: &impl Fn(u64, u32) -> Atom,
        q: &impl Fn(u64, u32) -> Atom,
        aid: &impl Fn(u64, u32) -> ActionId,
        bid: &impl Fn(u64) -> ActionId,
        cid: &impl Fn(u64, u32) -> ActionId,
    ) {
        if l == 1 {
            let post: BTreeSet<Literal> =
                [Literal::pos(p(i, 0)), Literal::neg(q(i - 1, 0))].into();
            actions.push(
                Action::new(aid(i, 1).0.clone(), [Literal::pos(p(i, 1))].into(), post, 1).unwrap(),
            );
            actions.push(
                Action::new(
                    bid(i).0.clone(),
                    [Literal::pos(p(i, 0))].into(),
                    [Literal::pos(q(i, 0))].into(),
                    1,
                )
                .unwrap(),
            );
            actions.push(
                Action::new(
                    cid(i, 1).0.clone(),
                    [Literal::pos(q(i, 0))].into(),
                    [Literal::pos(q(i, 1))].into(),
                    1,
                )
                .unwrap(),
            );
            arcs.push((aid(i, 1), bid(i)));
            arcs.push((bid(i), cid(i, 1)));
            if i >= 2 {
                arcs.push((aid(i, 1), bid(i - 1)));
            }
            release.insert(aid(i, 1), k - 1);
            release.insert(bid(i), k);
            release.insert(cid(i, 1), k + 1);
            return;
        }
        let lo = (i - 1) * n + 1;
        let hi = i * n;
        let mut post: BTreeSet<Literal> =
            (lo..=hi).map(|j| Literal::pos(p(j, l - 1))).collect();
        post.insert(Literal::neg(q((i - 1) * n, l - 1)));
        actions.push(
            Action::new(aid(i, l).0.clone(), [Literal::pos(p(i, l))].into(), post, 1).unwrap(),
        );
        for j in lo..=hi {
            arcs.push((aid(i, l), aid(j, l - 1)));
            build(l - 1, j, k, n, actions, arcs, release, p, q, aid, bid, cid);
            arcs.push((cid(j, l - 1), cid(i, l)));
        }
        if i >= 2 {
            arcs.push((aid(i, l), aid((i - 1) * n, l - 1)));
        }
        let pre: BTreeSet<Literal> = (lo..=hi).map(|j| Literal::pos(q(j, l - 1))).collect();
        actions.push(
            Action::new(cid(i, l).0.clone(), pre, [Literal::pos(q(i, l))].into(), 1).unwrap(),
        );
        release.insert(aid(i, l), k - l);
        release.insert(cid(i, l), k + l);
    }

    for i in 1..=n as u64 {
        build(k, i, k, n as u64, &mut actions, &mut arcs, &mut release, &p, &q, &aid, &bid, &cid);
    }
    debug_assert_eq!(actions.len() as u64, count);

    let init: BTreeSet<Literal> = (1..=n as u64).map(|i| Literal::pos(p(i, k))).collect();
    let goal: BTreeSet<Literal> = (1..=n as u64).map(|i| Literal::pos(q(i, k))).collect();
    let problem = Ppi::new(init, goal).unwrap();
    let nonconc = simple_concurrency(actions.iter());
    let plan = PartialOrderPlan::from_sequence(actions).unwrap();
    assert_emittable(&problem, &plan);

    let worder = OrderRelation::from_pairs(arcs).expect("witness arcs follow the layering");
    let exec = Execution::new(release);
    let claims = vec![
        Claim::optimum("mmpd", count),
        Claim::threshold("mmpr", 2 * k as u64 + 1, true)
            .with_order_witness(&worder)
            .with_release_witness(&exec),
    ];
    let instance = CertifiedInstance {
        problem,
        plan: ParallelPlan::new(plan, nonconc).unwrap(),
        certificate: Certificate { claims },
    };
    instance.check_witnesses().expect("gap witness re-validates");
    Ok(instance)
}

// ---------------------------------------------------------------------------
// Toy assembly model
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ToyCarError {
    #[error("no assembly action named \"{0}\"")]
    UnknownActionName(String),
}

/// The toy assembly instance, optionally with duration overrides. With the
/// stock durations the certificate states the three reference numbers as
/// optima (the suite verifies them against the exact oracles); with custom
/// durations it only claims what the two reference orders demonstrably
/// achieve.
pub fn gen_toy_car(
    overrides: &BTreeMap<ActionId, u32>,
) -> Result<CertifiedInstance, ToyCarError> {
    let tc = crate::fixtures::toy_car();
    for key in overrides.keys() {
        if tc.chain.plan.get(key).is_none() {
            return Err(ToyCarError::UnknownActionName(key.0.clone()));
        }
    }
    let tc = crate::fixtures::toy_car_with_durations(overrides);
    assert_emittable(&tc.problem, &tc.chain.plan);

    let (_, sequential) = dppl(&tc.chain).expect("total order is definite");
    let (de_exec, de_len) = dppl(&tc.deordered).expect("reference deordering is definite");
    let (re_exec, re_len) = dppl(&tc.reordered).expect("reference reordering is definite");

    let claims = if overrides.is_empty() {
        vec![
            Claim::optimum("sequential", sequential),
            Claim::optimum("mmpd", de_len)
                .with_order_witness(&tc.deordered.plan.order)
                .with_release_witness(&de_exec),
            Claim::optimum("mmpr", re_len)
                .with_order_witness(&tc.reordered.plan.order)
                .with_release_witness(&re_exec),
        ]
    } else {
        vec![
            Claim::optimum("sequential", sequential),
            Claim::threshold("mmpd", de_len, true)
                .with_order_witness(&tc.deordered.plan.order)
                .with_release_witness(&de_exec),
            Claim::threshold("mmpr", re_len, true)
                .with_order_witness(&tc.reordered.plan.order)
                .with_release_witness(&re_exec),
        ]
    };
    let instance = CertifiedInstance {
        problem: tc.problem,
        plan: tc.chain,
        certificate: Certificate { claims },
    };
    instance.check_witnesses().expect("assembly witnesses re-validate");
    Ok(instance)
}
