//! Regenerates the fixture corpus under `fixtures/` at the workspace root.
//! Every file is written in canonical form with its certificate embedded, so
//! the corpus tests can check byte-stability as well as the claims.
//!
//!     cargo run -p planorder --example make_fixtures

use planorder::action::Action;
use planorder::doc::InstanceDocument;
use planorder::fixtures::{producer_choice, redundant_producer, toy_car_alternate_durations};
use planorder::generators::{
    gen_3sat, gen_coloring, gen_gap, gen_min_cover, gen_toy_car, Certificate, CertifiedInstance,
    Claim, SatLiteral, SatOptions, SimpleGraph,
};
use planorder::literal::Atom;
use planorder::oracles::{mmcd_exact, OracleBudget};
use planorder::parallel::simple_concurrency;
use planorder::plan::{PartialOrderPlan, Ppi};
use planorder::ParallelPlan;
use std::collections::BTreeSet;
use std::path::{Path, PathBuf};

fn corpus_dir() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../fixtures")
}

fn write(dir: &Path, name: &str, inst: &CertifiedInstance) {
    inst.check_witnesses().unwrap_or_else(|e| panic!("{name}: {e}"));
    let doc = InstanceDocument::from_parts(&inst.problem, &inst.plan)
        .with_certificate(&inst.certificate);
    std::fs::write(dir.join(name), doc.canonical_json()).expect("fixture directory is writable");
    println!("wrote {name}");
}

/// Wrap a hand-built plan with an oracle-backed fewest-constraints claim.
fn certified_mmcd(problem: Ppi, plan: PartialOrderPlan) -> CertifiedInstance {
    let ans = mmcd_exact(&problem, &plan, &OracleBudget::default()).expect("small instance");
    let claim = Claim::optimum("mmcd", ans.optimum)
        .with_order_witness(ans.witness_order.as_ref().expect("deorder witness"));
    let nonconc = simple_concurrency(plan.actions.values());
    CertifiedInstance {
        problem,
        plan: ParallelPlan::new(plan, nonconc).expect("matching ids"),
        certificate: Certificate { claims: vec![claim] },
    }
}

fn sequence(actions: &[Action], order: &[&str]) -> PartialOrderPlan {
    let picked: Vec<Action> = order
        .iter()
        .map(|name| {
            actions
                .iter()
                .find(|a| a.id.as_str() == *name)
                .expect("known action")
                .clone()
        })
        .collect();
    PartialOrderPlan::from_sequence(picked).expect("distinct ids")
}

fn atoms(names: &[&str]) -> BTreeSet<Atom> {
    names.iter().map(|n| Atom::new(*n)).collect()
}

fn main() {
    let dir = corpus_dir();
    std::fs::create_dir_all(&dir).expect("create fixtures dir");

    write(&dir, "toycar.json", &gen_toy_car(&Default::default()).unwrap());
    write(
        &dir,
        "toycar-alt.json",
        &gen_toy_car(&toy_car_alternate_durations()).unwrap(),
    );

    write(&dir, "coloring-k3.json", &gen_coloring(&SimpleGraph::complete(3), false).unwrap());
    write(&dir, "coloring-c5.json", &gen_coloring(&SimpleGraph::cycle(5), false).unwrap());
    write(&dir, "coloring-petersen.json", &gen_coloring(&SimpleGraph::petersen(), false).unwrap());
    write(&dir, "coloring-k3-chain.json", &gen_coloring(&SimpleGraph::complete(3), true).unwrap());

    write(
        &dir,
        "cover-overlap.json",
        &gen_min_cover(
            &atoms(&["p1", "p2", "p3"]),
            &[atoms(&["p1", "p2"]), atoms(&["p2", "p3"]), atoms(&["p3"])],
        )
        .unwrap(),
    );

    write(
        &dir,
        "3sat-sat.json",
        &gen_3sat(
            3,
            &[[SatLiteral::pos(1), SatLiteral::neg(2), SatLiteral::pos(3)]],
            SatOptions::default(),
        )
        .unwrap(),
    );
    write(
        &dir,
        "3sat-unsat.json",
        &gen_3sat(
            1,
            &[[SatLiteral::pos(1); 3], [SatLiteral::neg(1); 3]],
            SatOptions { allow_repeats: true, ..Default::default() },
        )
        .unwrap(),
    );
    write(
        &dir,
        "3sat-strict.json",
        &gen_3sat(
            3,
            &[
                [SatLiteral::pos(1), SatLiteral::neg(2), SatLiteral::pos(3)],
                [SatLiteral::neg(1), SatLiteral::pos(2), SatLiteral::neg(3)],
            ],
            SatOptions { strict_text: true, ..Default::default() },
        )
        .unwrap(),
    );

    write(&dir, "gap-1-2.json", &gen_gap(1, 2).unwrap());
    write(&dir, "gap-1-3.json", &gen_gap(1, 3).unwrap());
    write(&dir, "gap-2-2.json", &gen_gap(2, 2).unwrap());

    // Two sortings of the same greedy trap: the reorder procedure is
    // constraint-minimal on one and provably not on the other.
    let (problem, actions) = producer_choice();
    write(
        &dir,
        "refalg-vpc-favorable.json",
        &certified_mmcd(problem.clone(), sequence(&actions, &["a", "c", "b"])),
    );
    write(
        &dir,
        "refalg-vpc-unfavorable.json",
        &certified_mmcd(problem, sequence(&actions, &["a", "b", "c"])),
    );

    // The link tracer keeps a producer link that a redundant re-producer
    // makes unnecessary.
    let (problem, plan) = redundant_producer();
    write(&dir, "refalg-kk-redundant.json", &certified_mmcd(problem, plan));
}
