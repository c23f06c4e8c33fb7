//! Exact optimization oracles.
//!
//! Everything here is exponential and exists to pin down ground truth on
//! small instances: minimum-constraint deordering/reordering (fewest ordering
//! pairs), minimum parallel execution length of a fixed plan, and minimum
//! parallel deordering/reordering (shortest achievable schedule). All
//! searches respect an explicit [`OracleBudget`] and report how many nodes
//! they expanded, and all of them break ties toward the lexicographically
//! least witness so answers are reproducible byte for byte.
//!
//! Search strategies:
//! * deordering problems walk the lattice of transitively closed suborders,
//!   dropping one covering pair at a time (invalid nodes prune their whole
//!   subtree, since validity only grows with more constraints);
//! * reordering problems enumerate every labeled strict partial order on the
//!   action set;
//! * schedule length branches over the two ways to separate each unordered
//!   non-concurrent pair, bounding by the current critical path;
//! * the bounded reordering decision assigns integer release slots action by
//!   action and applies the support/threat conditions incrementally, then
//!   verifies the induced order exactly.

use crate::action::ActionId;
use crate::literal::Literal;
use crate::order::OrderRelation;
use crate::parallel::{Execution, NonConcurrency, ParallelPlan};
use crate::plan::{PartialOrderPlan, Ppi};
use crate::semantics::mtc_valid;
use std::collections::{BTreeMap, BTreeSet, HashMap};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct OracleBudget {
    /// Refuse instances with more actions than this.
    pub max_actions: usize,
    /// Abort the search after this many expanded nodes.
    pub max_nodes: u64,
}

impl Default for OracleBudget {
    fn default() -> Self {
        OracleBudget { max_actions: 12, max_nodes: 100_000 }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum OracleError {
    #[error("plan has {actual} actions, exact search is capped at {max}")]
    TooManyActions { max: usize, actual: usize },
    #[error("search exceeded the node budget of {max_nodes}")]
    BudgetExceeded { max_nodes: u64 },
    #[error("invalid input: {0}")]
    InvalidInput(String),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OracleAnswer {
    pub optimum: u64,
    pub witness_order: Option<OrderRelation>,
    pub witness_execution: Option<Execution>,
    /// Nodes the search expanded before settling.
    pub nodes: u64,
}

struct Counter {
    used: u64,
    max: u64,
}

impl Counter {
    fn new(max: u64) -> Self {
        Counter { used: 0, max }
    }

    fn tick(&mut self) -> Result<(), OracleError> {
        self.used += 1;
        if self.used > self.max {
            Err(OracleError::BudgetExceeded { max_nodes: self.max })
        } else {
            Ok(())
        }
    }
}

/// Index-based view of a problem/plan pair. Actions get indices `0..n` in id
/// order; the initial state and the goal act as virtual producer/consumer
/// sitting before and after everything.
struct Ctx {
    ids: Vec<ActionId>,
    durations: Vec<u64>,
    n: usize,
    /// (consumer index or GOAL, literal index).
    demands: Vec<(usize, usize)>,
    /// Per literal index: producers (may include INIT).
    producers: Vec<Vec<usize>>,
    /// Per literal index: actions asserting the complement (may include INIT).
    clobberers: Vec<Vec<usize>>,
    /// Per action index: bitmask of non-concurrent partners.
    nonconc: Vec<u32>,
}

const HARD_ACTION_CAP: usize = 32;

impl Ctx {
    fn init_idx(&self) -> usize {
        self.n
    }

    fn goal_idx(&self) -> usize {
        self.n + 1
    }

    fn new(
        problem: &Ppi,
        plan: &PartialOrderPlan,
        nonconc: Option<&NonConcurrency>,
        budget: &OracleBudget,
    ) -> Result<Self, OracleError> {
        let cap = budget.max_actions.min(HARD_ACTION_CAP);
        if plan.len() > cap {
            return Err(OracleError::TooManyActions { max: cap, actual: plan.len() });
        }
        let ids: Vec<ActionId> = plan.ids().cloned().collect();
        let index_of: BTreeMap<&ActionId, usize> =
            ids.iter().enumerate().map(|(i, id)| (id, i)).collect();
        let n = ids.len();

        let mut lit_ids: BTreeMap<Literal, usize> = BTreeMap::new();
        let mut lit_of = |l: &Literal, tbl: &mut Vec<Vec<usize>>, tbl2: &mut Vec<Vec<usize>>| {
            let next = lit_ids.len();
            let id = *lit_ids.entry(l.clone()).or_insert(next);
            while tbl.len() <= id {
                tbl.push(Vec::new());
                tbl2.push(Vec::new());
            }
            id
        };

        let mut producers: Vec<Vec<usize>> = Vec::new();
        let mut clobberers: Vec<Vec<usize>> = Vec::new();
        let mut demands = Vec::new();

        let init_idx = n;
        for a in plan.actions.values() {
            let ai = index_of[&a.id];
            for l in &a.pre {
                let li = lit_of(l, &mut producers, &mut clobberers);
                demands.push((ai, li));
            }
            for l in &a.post {
                let li = lit_of(l, &mut producers, &mut clobberers);
                producers[li].push(ai);
                let ni = lit_of(&l.negate(), &mut producers, &mut clobberers);
                clobberers[ni].push(ai);
            }
        }
        for l in &problem.goal {
            let li = lit_of(l, &mut producers, &mut clobberers);
            demands.push((n + 1, li));
        }
        for l in &problem.init {
            let li = lit_of(l, &mut producers, &mut clobberers);
            producers[li].push(init_idx);
            let ni = lit_of(&l.negate(), &mut producers, &mut clobberers);
            clobberers[ni].push(init_idx);
        }

        let mut nonconc_masks = vec![0u32; n];
        if let Some(nc) = nonconc {
            for (a, b) in nc.iter() {
                let (x, y) = (index_of[a], index_of[b]);
                nonconc_masks[x] |= 1 << y;
                nonconc_masks[y] |= 1 << x;
            }
        }

        let durations = plan.actions.values().map(|a| a.duration as u64).collect();
        Ok(Ctx { ids, durations, n, demands, producers, clobberers, nonconc: nonconc_masks })
    }

    /// The support condition for every demanded literal, under an arbitrary
    /// reachability predicate over real indices plus INIT/GOAL.
    fn valid_with<R: Fn(usize, usize) -> bool>(&self, reach: R) -> bool {
        let full_reach = |x: usize, y: usize| -> bool {
            if x == y {
                false
            } else if x == self.init_idx() {
                true
            } else if y == self.init_idx() || x == self.goal_idx() {
                false
            } else if y == self.goal_idx() {
                true
            } else {
                reach(x, y)
            }
        };
        self.demands.iter().all(|&(c, lit)| {
            let prods = &self.producers[lit];
            let clobs = self.clobberers.get(lit).map(|v| v.as_slice()).unwrap_or(&[]);
            prods.iter().any(|&p| {
                full_reach(p, c)
                    && clobs.iter().all(|&t| {
                        t == p
                            || t == c
                            || full_reach(c, t)
                            || prods.iter().any(|&w| full_reach(t, w) && full_reach(w, c))
                    })
            })
        })
    }

    fn valid_under_rows(&self, succ: &[u32]) -> bool {
        self.valid_with(|x, y| succ[x] >> y & 1 == 1)
    }

    /// Critical-path (earliest start) schedule of a transitively closed
    /// acyclic `succ`. Returns per-action starts and the makespan.
    fn earliest_starts(&self, succ: &[u32]) -> (Vec<u64>, u64) {
        let mut pred = vec![0u32; self.n];
        for i in 0..self.n {
            let mut row = succ[i];
            while row != 0 {
                let j = row.trailing_zeros() as usize;
                row &= row - 1;
                pred[j] |= 1 << i;
            }
        }
        let mut order: Vec<usize> = (0..self.n).collect();
        // In a closed order, predecessor sets grow strictly along the order.
        order.sort_by_key(|&i| pred[i].count_ones());
        let mut start = vec![0u64; self.n];
        let mut makespan = 0;
        for &i in &order {
            let mut s = 0;
            let mut row = pred[i];
            while row != 0 {
                let j = row.trailing_zeros() as usize;
                row &= row - 1;
                s = s.max(start[j] + self.durations[j]);
            }
            start[i] = s;
            makespan = makespan.max(s + self.durations[i]);
        }
        (start, makespan)
    }

    fn rows_to_order(&self, succ: &[u32]) -> OrderRelation {
        let mut pairs = BTreeSet::new();
        for i in 0..self.n {
            let mut row = succ[i];
            while row != 0 {
                let j = row.trailing_zeros() as usize;
                row &= row - 1;
                pairs.insert((self.ids[i].clone(), self.ids[j].clone()));
            }
        }
        OrderRelation::from_closed_unchecked(pairs)
    }

    fn rows_to_pairs(&self, succ: &[u32]) -> Vec<(usize, usize)> {
        let mut pairs = Vec::new();
        for i in 0..self.n {
            let mut row = succ[i];
            while row != 0 {
                let j = row.trailing_zeros() as usize;
                row &= row - 1;
                pairs.push((i, j));
            }
        }
        pairs.sort_unstable();
        pairs
    }

    fn starts_to_execution(&self, starts: &[u64]) -> Result<Execution, OracleError> {
        let mut release = BTreeMap::new();
        for (i, &s) in starts.iter().enumerate() {
            let s32 = u32::try_from(s)
                .map_err(|_| OracleError::InvalidInput("schedule does not fit in u32".into()))?;
            release.insert(self.ids[i].clone(), s32);
        }
        Ok(Execution::new(release))
    }
}

fn require_valid(problem: &Ppi, plan: &PartialOrderPlan) -> Result<(), OracleError> {
    match mtc_valid(problem, plan) {
        Ok(true) => Ok(()),
        Ok(false) => Err(OracleError::InvalidInput("input plan is not valid".into())),
        Err(e) => Err(OracleError::InvalidInput(e.to_string())),
    }
}

// ---------------------------------------------------------------------------
// Deordering lattice.

struct Lattice<'c> {
    ctx: &'c Ctx,
    pair_list: Vec<(usize, usize)>,
}

impl<'c> Lattice<'c> {
    fn new(ctx: &'c Ctx, order: &OrderRelation) -> Result<Self, OracleError> {
        let index_of: BTreeMap<&ActionId, usize> =
            ctx.ids.iter().enumerate().map(|(i, id)| (id, i)).collect();
        let mut pair_list = Vec::new();
        for (a, b) in order.iter() {
            pair_list.push((index_of[a], index_of[b]));
        }
        pair_list.sort_unstable();
        if pair_list.len() > 128 {
            return Err(OracleError::InvalidInput(
                "order closure exceeds 128 pairs, too large for the lattice search".into(),
            ));
        }
        Ok(Lattice { ctx, pair_list })
    }

    fn rows(&self, mask: u128) -> Vec<u32> {
        let mut succ = vec![0u32; self.ctx.n];
        let mut m = mask;
        while m != 0 {
            let b = m.trailing_zeros() as usize;
            m &= m - 1;
            let (i, j) = self.pair_list[b];
            succ[i] |= 1 << j;
        }
        succ
    }

    fn mask_to_sorted_pairs(&self, mask: u128) -> Vec<(usize, usize)> {
        let mut out = Vec::new();
        let mut m = mask;
        while m != 0 {
            let b = m.trailing_zeros() as usize;
            m &= m - 1;
            out.push(self.pair_list[b]);
        }
        out.sort_unstable();
        out
    }

    fn mask_to_order(&self, mask: u128) -> OrderRelation {
        let mut pairs = BTreeSet::new();
        for (i, j) in self.mask_to_sorted_pairs(mask) {
            pairs.insert((self.ctx.ids[i].clone(), self.ctx.ids[j].clone()));
        }
        OrderRelation::from_closed_unchecked(pairs)
    }

    /// Covering pairs of the closed order `mask`: pairs with no two-step
    /// chain between their endpoints. Removing one keeps the order closed.
    fn covering_bits(&self, mask: u128, succ: &[u32]) -> Vec<usize> {
        let mut out = Vec::new();
        let mut m = mask;
        while m != 0 {
            let b = m.trailing_zeros() as usize;
            m &= m - 1;
            let (i, j) = self.pair_list[b];
            let mut row = succ[i];
            let mut covered = true;
            while row != 0 {
                let c = row.trailing_zeros() as usize;
                row &= row - 1;
                if c != j && succ[c] >> j & 1 == 1 {
                    covered = false;
                    break;
                }
            }
            if covered {
                out.push(b);
            }
        }
        out
    }

    /// Depth-first walk over all valid closed suborders reachable from
    /// `mask` (which must be valid). Calls the visitor with each valid mask,
    /// its rows, and whether it is minimal (no valid child).
    fn walk<F>(
        &self,
        mask: u128,
        seen: &mut HashMap<u128, bool>,
        counter: &mut Counter,
        visit: &mut F,
    ) -> Result<(), OracleError>
    where
        F: FnMut(u128, &[u32], bool, &mut Counter) -> Result<(), OracleError>,
    {
        let succ = self.rows(mask);
        let mut any_valid_child = false;
        for b in self.covering_bits(mask, &succ) {
            let child = mask & !(1u128 << b);
            let child_valid = match seen.get(&child) {
                Some(&v) => v,
                None => {
                    counter.tick()?;
                    let rows = self.rows(child);
                    let v = self.ctx.valid_under_rows(&rows);
                    seen.insert(child, v);
                    if v {
                        self.walk(child, seen, counter, visit)?;
                    }
                    v
                }
            };
            any_valid_child |= child_valid;
        }
        visit(mask, &succ, !any_valid_child, counter)
    }
}

fn full_mask(len: usize) -> u128 {
    if len == 128 {
        u128::MAX
    } else {
        (1u128 << len) - 1
    }
}

/// Bits strictly above position `i`, shift-safe for `i + 1 == 32`.
fn bits_above(i: usize) -> u32 {
    if i + 1 >= 32 {
        0
    } else {
        u32::MAX << (i + 1)
    }
}

/// Bits strictly below position `i`, shift-safe for `i == 32`.
fn bits_below(i: usize) -> u32 {
    if i >= 32 {
        u32::MAX
    } else {
        (1u32 << i) - 1
    }
}

/// Fewest ordering pairs over all valid deorderings (suborders) of the plan.
pub fn mmcd_exact(
    problem: &Ppi,
    plan: &PartialOrderPlan,
    budget: &OracleBudget,
) -> Result<OracleAnswer, OracleError> {
    require_valid(problem, plan)?;
    let ctx = Ctx::new(problem, plan, None, budget)?;
    let lattice = Lattice::new(&ctx, &plan.order)?;
    let mut counter = Counter::new(budget.max_nodes);
    let root = full_mask(lattice.pair_list.len());
    let mut seen = HashMap::new();
    let mut best: Option<(u32, Vec<(usize, usize)>, u128)> = None;
    lattice.walk(root, &mut seen, &mut counter, &mut |mask, _succ, _minimal, _c| {
        let count = mask.count_ones();
        let better = match &best {
            None => true,
            Some((bc, bp, _)) => {
                count < *bc || (count == *bc && lattice.mask_to_sorted_pairs(mask) < *bp)
            }
        };
        if better {
            best = Some((count, lattice.mask_to_sorted_pairs(mask), mask));
        }
        Ok(())
    })?;
    let (count, _, mask) = best.expect("root is valid");
    Ok(OracleAnswer {
        optimum: count as u64,
        witness_order: Some(lattice.mask_to_order(mask)),
        witness_execution: None,
        nodes: counter.used,
    })
}

// ---------------------------------------------------------------------------
// Schedule length of a fixed plan.

/// State for the branch-and-bound over separations of unordered
/// non-concurrent pairs.
struct PplSearch<'c> {
    ctx: &'c Ctx,
    open: Vec<(usize, usize)>,
    best: Option<(u64, Vec<(usize, usize)>, Vec<u32>, Vec<u64>)>,
}

impl<'c> PplSearch<'c> {
    /// Add x ≺ y and everything transitivity implies; returns the added
    /// pairs for undo, or None on a cycle.
    fn add_closure(
        succ: &mut [u32],
        pred: &mut [u32],
        x: usize,
        y: usize,
    ) -> Option<Vec<(usize, usize)>> {
        if succ[y] >> x & 1 == 1 || x == y {
            return None;
        }
        let mut added = Vec::new();
        let sources = pred[x] | 1 << x;
        let targets = succ[y] | 1 << y;
        let mut srcs = sources;
        while srcs != 0 {
            let a = srcs.trailing_zeros() as usize;
            srcs &= srcs - 1;
            let mut tgts = targets & !succ[a];
            while tgts != 0 {
                let b = tgts.trailing_zeros() as usize;
                tgts &= tgts - 1;
                if a == b {
                    // Would create a cycle through an existing path.
                    Self::undo(succ, pred, &added);
                    return None;
                }
                succ[a] |= 1 << b;
                pred[b] |= 1 << a;
                added.push((a, b));
            }
        }
        Some(added)
    }

    fn undo(succ: &mut [u32], pred: &mut [u32], added: &[(usize, usize)]) {
        for &(a, b) in added.iter().rev() {
            succ[a] &= !(1 << b);
            pred[b] &= !(1 << a);
        }
    }

    fn run(
        &mut self,
        k: usize,
        succ: &mut Vec<u32>,
        pred: &mut Vec<u32>,
        counter: &mut Counter,
    ) -> Result<(), OracleError> {
        counter.tick()?;
        let (starts, bound) = self.ctx.earliest_starts(succ);
        if let Some((best_len, _, _, _)) = &self.best {
            if bound > *best_len {
                return Ok(());
            }
        }
        if k == self.open.len() {
            let pairs = self.ctx.rows_to_pairs(succ);
            let better = match &self.best {
                None => true,
                Some((len, bp, _, _)) => bound < *len || (bound == *len && pairs < *bp),
            };
            if better {
                self.best = Some((bound, pairs, succ.clone(), starts));
            }
            return Ok(());
        }
        let (i, j) = self.open[k];
        if succ[i] >> j & 1 == 1 || succ[j] >> i & 1 == 1 {
            return self.run(k + 1, succ, pred, counter);
        }
        for (x, y) in [(i, j), (j, i)] {
            if let Some(added) = Self::add_closure(succ, pred, x, y) {
                self.run(k + 1, succ, pred, counter)?;
                Self::undo(succ, pred, &added);
            }
        }
        Ok(())
    }
}

fn ppl_core(
    ctx: &Ctx,
    base: &[u32],
    counter: &mut Counter,
) -> Result<(u64, Vec<u32>, Vec<u64>), OracleError> {
    let mut open = Vec::new();
    for i in 0..ctx.n {
        // Each unordered pair once (i < j).
        let mut row = ctx.nonconc[i] & bits_above(i);
        while row != 0 {
            let j = row.trailing_zeros() as usize;
            row &= row - 1;
            if base[i] >> j & 1 == 0 && base[j] >> i & 1 == 0 {
                open.push((i, j));
            }
        }
    }
    let mut search = PplSearch { ctx, open, best: None };
    let mut succ = base.to_vec();
    let mut pred = vec![0u32; ctx.n];
    for i in 0..ctx.n {
        let mut row = succ[i];
        while row != 0 {
            let j = row.trailing_zeros() as usize;
            row &= row - 1;
            pred[j] |= 1 << i;
        }
    }
    search.run(0, &mut succ, &mut pred, counter)?;
    let (len, _, rows, starts) = search.best.expect("separations always exist");
    Ok((len, rows, starts))
}

/// Minimum parallel execution length of the plan as given (order and
/// non-concurrency both fixed).
pub fn ppl_exact(pp: &ParallelPlan, budget: &OracleBudget) -> Result<OracleAnswer, OracleError> {
    let empty = Ppi::new(BTreeSet::new(), BTreeSet::new()).expect("empty problem");
    let ctx = Ctx::new(&empty, &pp.plan, Some(&pp.nonconc), budget)?;
    let index_of: BTreeMap<&ActionId, usize> =
        ctx.ids.iter().enumerate().map(|(i, id)| (id, i)).collect();
    let mut base = vec![0u32; ctx.n];
    for (a, b) in pp.plan.order.iter() {
        base[index_of[a]] |= 1 << index_of[b];
    }
    let mut counter = Counter::new(budget.max_nodes);
    let (len, rows, starts) = ppl_core(&ctx, &base, &mut counter)?;
    Ok(OracleAnswer {
        optimum: len,
        witness_order: Some(ctx.rows_to_order(&rows)),
        witness_execution: Some(ctx.starts_to_execution(&starts)?),
        nodes: counter.used,
    })
}

/// Shortest schedule over all valid deorderings. The witness order is the
/// deordering; the witness execution achieves the optimum on it.
pub fn mmpd_exact(
    pp: &ParallelPlan,
    problem: &Ppi,
    budget: &OracleBudget,
) -> Result<OracleAnswer, OracleError> {
    mmpd_inner(pp, problem, budget, false)
}

/// Like [`mmpd_exact`] but only considers definite deorderings.
pub fn mmpd_exact_definite(
    pp: &ParallelPlan,
    problem: &Ppi,
    budget: &OracleBudget,
) -> Result<OracleAnswer, OracleError> {
    mmpd_inner(pp, problem, budget, true)
}

fn mmpd_inner(
    pp: &ParallelPlan,
    problem: &Ppi,
    budget: &OracleBudget,
    require_definite: bool,
) -> Result<OracleAnswer, OracleError> {
    require_valid(problem, &pp.plan)?;
    let ctx = Ctx::new(problem, &pp.plan, Some(&pp.nonconc), budget)?;
    let lattice = Lattice::new(&ctx, &pp.plan.order)?;
    let mut counter = Counter::new(budget.max_nodes);
    let root = full_mask(lattice.pair_list.len());
    let mut seen = HashMap::new();
    let mut best: Option<(u64, Vec<(usize, usize)>, u128, Vec<u64>)> = None;

    let is_definite = |succ: &[u32]| -> bool {
        (0..ctx.n).all(|i| {
            let mut row = ctx.nonconc[i] & bits_above(i);
            while row != 0 {
                let j = row.trailing_zeros() as usize;
                row &= row - 1;
                if succ[i] >> j & 1 == 0 && succ[j] >> i & 1 == 0 {
                    return false;
                }
            }
            true
        })
    };

    lattice.walk(root, &mut seen, &mut counter, &mut |mask, succ, minimal, counter| {
        // The schedule length only shrinks when constraints go, so for the
        // unrestricted problem the minimum sits at minimal nodes.
        let evaluate = if require_definite { is_definite(succ) } else { minimal };
        if !evaluate {
            return Ok(());
        }
        let (len, starts) = if require_definite {
            let (starts, len) = ctx.earliest_starts(succ);
            (len, starts)
        } else {
            let (len, _, starts) = ppl_core(&ctx, succ, counter)?;
            (len, starts)
        };
        let better = match &best {
            None => true,
            Some((bl, bp, _, _)) => {
                len < *bl || (len == *bl && lattice.mask_to_sorted_pairs(mask) < *bp)
            }
        };
        if better {
            best = Some((len, lattice.mask_to_sorted_pairs(mask), mask, starts));
        }
        Ok(())
    })?;
    let (len, _, mask, starts) =
        best.ok_or_else(|| OracleError::InvalidInput("no definite deordering exists".into()))?;
    Ok(OracleAnswer {
        optimum: len,
        witness_order: Some(lattice.mask_to_order(mask)),
        witness_execution: Some(ctx.starts_to_execution(&starts)?),
        nodes: counter.used,
    })
}

// ---------------------------------------------------------------------------
// Labeled poset enumeration for reordering problems.

/// Enumerate every strict partial order on `n` labeled elements exactly once.
/// Each complete poset costs one budget tick. The visitor receives closed
/// successor rows.
fn enumerate_posets<F>(n: usize, counter: &mut Counter, visit: &mut F) -> Result<(), OracleError>
where
    F: FnMut(&[u32], &mut Counter) -> Result<(), OracleError>,
{
    let pairs: Vec<(usize, usize)> =
        (0..n).flat_map(|i| (i + 1..n).map(move |j| (i, j))).collect();
    let mut pair_pos = vec![vec![usize::MAX; n]; n];
    for (k, &(i, j)) in pairs.iter().enumerate() {
        pair_pos[i][j] = k;
        pair_pos[j][i] = k;
    }
    let mut succ = vec![0u32; n];
    let mut pred = vec![0u32; n];

    fn rec<F>(
        k: usize,
        pairs: &[(usize, usize)],
        pair_pos: &[Vec<usize>],
        succ: &mut Vec<u32>,
        pred: &mut Vec<u32>,
        counter: &mut Counter,
        visit: &mut F,
    ) -> Result<(), OracleError>
    where
        F: FnMut(&[u32], &mut Counter) -> Result<(), OracleError>,
    {
        if k == pairs.len() {
            counter.tick()?;
            return visit(succ, counter);
        }
        let (i, j) = pairs[k];
        if succ[i] >> j & 1 == 1 || succ[j] >> i & 1 == 1 {
            // Orientation already forced by earlier choices.
            return rec(k + 1, pairs, pair_pos, succ, pred, counter, visit);
        }
        // Leave the pair incomparable.
        rec(k + 1, pairs, pair_pos, succ, pred, counter, visit)?;
        // Or orient it; additions may only force pairs not yet decided.
        for (x, y) in [(i, j), (j, i)] {
            let sources = pred[x] | 1 << x;
            let targets = succ[y] | 1 << y;
            let mut added = Vec::new();
            let mut srcs = sources;
            let mut ok = true;
            while srcs != 0 && ok {
                let a = srcs.trailing_zeros() as usize;
                srcs &= srcs - 1;
                let mut tgts = targets & !succ[a];
                while tgts != 0 {
                    let b = tgts.trailing_zeros() as usize;
                    tgts &= tgts - 1;
                    if a == b || pair_pos[a][b] < k {
                        // A cycle, or a pair already decided incomparable.
                        ok = false;
                        break;
                    }
                    succ[a] |= 1 << b;
                    pred[b] |= 1 << a;
                    added.push((a, b));
                }
            }
            if ok {
                rec(k + 1, pairs, pair_pos, succ, pred, counter, visit)?;
            }
            for &(a, b) in added.iter().rev() {
                succ[a] &= !(1 << b);
                pred[b] &= !(1 << a);
            }
        }
        Ok(())
    }

    rec(0, &pairs, &pair_pos, &mut succ, &mut pred, counter, visit)
}

/// Fewest ordering pairs over all valid reorderings (arbitrary new orders on
/// the same actions).
pub fn mmcr_exact(
    problem: &Ppi,
    plan: &PartialOrderPlan,
    budget: &OracleBudget,
) -> Result<OracleAnswer, OracleError> {
    require_valid(problem, plan)?;
    let ctx = Ctx::new(problem, plan, None, budget)?;
    let mut counter = Counter::new(budget.max_nodes);
    let mut best: Option<(u32, Vec<(usize, usize)>, Vec<u32>)> = None;
    enumerate_posets(ctx.n, &mut counter, &mut |succ, _c| {
        if !ctx.valid_under_rows(succ) {
            return Ok(());
        }
        let count: u32 = succ.iter().map(|r| r.count_ones()).sum();
        let better = match &best {
            None => true,
            Some((bc, bp, _)) => count < *bc || (count == *bc && ctx.rows_to_pairs(succ) < *bp),
        };
        if better {
            best = Some((count, ctx.rows_to_pairs(succ), succ.to_vec()));
        }
        Ok(())
    })?;
    let (count, _, rows) = best.expect("the input order itself is valid");
    Ok(OracleAnswer {
        optimum: count as u64,
        witness_order: Some(ctx.rows_to_order(&rows)),
        witness_execution: None,
        nodes: counter.used,
    })
}

/// Shortest schedule over all valid reorderings, by exhaustive enumeration.
/// Only sensible for very small plans; see [`mmpr_sweep`] for the practical
/// route.
pub fn mmpr_exact(
    pp: &ParallelPlan,
    problem: &Ppi,
    budget: &OracleBudget,
) -> Result<OracleAnswer, OracleError> {
    require_valid(problem, &pp.plan)?;
    let ctx = Ctx::new(problem, &pp.plan, Some(&pp.nonconc), budget)?;
    let mut counter = Counter::new(budget.max_nodes);
    let mut best: Option<(u64, Vec<(usize, usize)>, Vec<u32>, Vec<u64>)> = None;
    enumerate_posets(ctx.n, &mut counter, &mut |succ, counter| {
        if !ctx.valid_under_rows(succ) {
            return Ok(());
        }
        let (len, _, starts) = ppl_core(&ctx, succ, counter)?;
        let better = match &best {
            None => true,
            Some((bl, bp, _, _)) => len < *bl || (len == *bl && ctx.rows_to_pairs(succ) < *bp),
        };
        if better {
            best = Some((len, ctx.rows_to_pairs(succ), succ.to_vec(), starts));
        }
        Ok(())
    })?;
    let (len, _, rows, starts) = best.expect("the input order itself is valid");
    Ok(OracleAnswer {
        optimum: len,
        witness_order: Some(ctx.rows_to_order(&rows)),
        witness_execution: Some(ctx.starts_to_execution(&starts)?),
        nodes: counter.used,
    })
}

// ---------------------------------------------------------------------------
// Bounded reordering decision by release-slot search.

struct SlotSearch<'c> {
    ctx: &'c Ctx,
    limit: u64,
    slots: Vec<u64>,
}

impl<'c> SlotSearch<'c> {
    fn reach(&self, assigned: usize, x: usize, y: usize) -> bool {
        // Defined only for assigned real indices (and the virtual ends,
        // handled by valid_with).
        debug_assert!(x < assigned && y < assigned);
        self.slots[x] + self.ctx.durations[x] <= self.slots[y]
    }

    /// Check every demand that is already fully decided by the assigned
    /// prefix; reject only certain violations.
    fn prefix_consistent(&self, assigned: usize) -> bool {
        let init = self.ctx.init_idx();
        let goal = self.ctx.goal_idx();
        let placed = |x: usize| x < assigned || x == init || x == goal;
        for &(c, lit) in &self.ctx.demands {
            if !placed(c) {
                continue;
            }
            let prods = &self.ctx.producers[lit];
            let clobs = self.ctx.clobberers.get(lit).map(|v| v.as_slice()).unwrap_or(&[]);
            if !prods.iter().all(|&p| placed(p)) {
                continue;
            }
            // reach over the mixed real/virtual indices for the prefix.
            let reach = |x: usize, y: usize| -> bool {
                if x == y || x == goal || y == init {
                    false
                } else if x == init || y == goal {
                    true
                } else {
                    self.reach(assigned, x, y)
                }
            };
            let all_clobs_placed = clobs.iter().all(|&t| placed(t));
            if all_clobs_placed {
                let ok = prods.iter().any(|&p| {
                    reach(p, c)
                        && clobs.iter().all(|&t| {
                            t == p
                                || t == c
                                || reach(c, t)
                                || prods.iter().any(|&w| reach(t, w) && reach(w, c))
                        })
                });
                if !ok {
                    return false;
                }
            } else {
                // All producers placed but some threats are not: support must
                // at least exist, since no future action can produce this.
                if !prods.iter().any(|&p| reach(p, c)) {
                    return false;
                }
            }
        }
        true
    }

    fn run(&mut self, k: usize, counter: &mut Counter) -> Result<bool, OracleError> {
        counter.tick()?;
        if k == self.ctx.n {
            let slots = &self.slots;
            let durations = &self.ctx.durations;
            return Ok(self
                .ctx
                .valid_with(|x, y| slots[x] + durations[x] <= slots[y]));
        }
        let d = self.ctx.durations[k];
        for s in 0..=self.limit - d {
            // Non-concurrent partners must not overlap.
            let mut row = self.ctx.nonconc[k] & bits_below(k);
            let mut clash = false;
            while row != 0 {
                let j = row.trailing_zeros() as usize;
                row &= row - 1;
                if s + d > self.slots[j] && self.slots[j] + self.ctx.durations[j] > s {
                    clash = true;
                    break;
                }
            }
            if clash {
                continue;
            }
            self.slots[k] = s;
            if self.prefix_consistent(k + 1) && self.run(k + 1, counter)? {
                return Ok(true);
            }
        }
        Ok(false)
    }
}

fn bounded_core(
    ctx: &Ctx,
    limit: u64,
    counter: &mut Counter,
) -> Result<Option<(OrderRelation, Execution)>, OracleError> {
    if ctx.durations.iter().any(|&d| d == 0) {
        return Err(OracleError::InvalidInput(
            "zero-duration actions are not supported by the bounded reordering search".into(),
        ));
    }
    if let Some(&dmax) = ctx.durations.iter().max() {
        if dmax > limit {
            return Ok(None);
        }
    }
    let mut search = SlotSearch { ctx, limit, slots: vec![0; ctx.n] };
    if search.run(0, counter)? {
        let slots = search.slots.clone();
        let mut succ = vec![0u32; ctx.n];
        for i in 0..ctx.n {
            for j in 0..ctx.n {
                if i != j && slots[i] + ctx.durations[i] <= slots[j] {
                    succ[i] |= 1 << j;
                }
            }
        }
        let order = ctx.rows_to_order(&succ);
        let exec = ctx.starts_to_execution(&slots)?;
        Ok(Some((order, exec)))
    } else {
        Ok(None)
    }
}

/// Is there a valid reordering with an execution of length at most `limit`?
/// Complete for plans whose durations are all positive; the witness, when
/// one exists, is the one with the lexicographically least release vector
/// over the id-sorted actions.
pub fn mmpr_bounded_witness(
    pp: &ParallelPlan,
    problem: &Ppi,
    limit: u64,
    budget: &OracleBudget,
) -> Result<Option<(OrderRelation, Execution)>, OracleError> {
    require_valid(problem, &pp.plan)?;
    let ctx = Ctx::new(problem, &pp.plan, Some(&pp.nonconc), budget)?;
    let mut counter = Counter::new(budget.max_nodes);
    bounded_core(&ctx, limit, &mut counter)
}

/// Decision form of [`mmpr_bounded_witness`].
pub fn mmpr_bounded(
    pp: &ParallelPlan,
    problem: &Ppi,
    limit: u64,
    budget: &OracleBudget,
) -> Result<bool, OracleError> {
    Ok(mmpr_bounded_witness(pp, problem, limit, budget)?.is_some())
}

/// Minimum reordering schedule length by sweeping the bound upward from the
/// longest single duration. Terminates at the sequential length at the
/// latest, since the input is required to be valid.
pub fn mmpr_sweep(
    pp: &ParallelPlan,
    problem: &Ppi,
    budget: &OracleBudget,
) -> Result<OracleAnswer, OracleError> {
    require_valid(problem, &pp.plan)?;
    let ctx = Ctx::new(problem, &pp.plan, Some(&pp.nonconc), budget)?;
    let mut counter = Counter::new(budget.max_nodes);
    let lower = ctx.durations.iter().copied().max().unwrap_or(0);
    let upper = ctx.durations.iter().sum::<u64>();
    for limit in lower..=upper {
        if let Some((order, exec)) = bounded_core(&ctx, limit, &mut counter)? {
            return Ok(OracleAnswer {
                optimum: limit,
                witness_order: Some(order),
                witness_execution: Some(exec),
                nodes: counter.used,
            });
        }
    }
    Err(OracleError::InvalidInput("no schedule within the sequential bound".into()))
}
