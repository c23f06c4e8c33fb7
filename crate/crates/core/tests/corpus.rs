//! Every file in the fixture corpus must load, be canonical byte-for-byte,
//! validate, and stand behind its embedded certificate. Regenerate the
//! corpus with `cargo run -p planorder --example make_fixtures`.

use planorder::doc::{canonicalize, InstanceDocument};
use planorder::generators::CertifiedInstance;
use planorder::semantics::mtc_valid;
use planorder::ActionId;
use std::path::PathBuf;

fn corpus_files() -> Vec<PathBuf> {
    let dir = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../fixtures");
    let mut files: Vec<PathBuf> = std::fs::read_dir(&dir)
        .expect("fixture corpus present; regenerate with the make_fixtures example")
        .map(|e| e.expect("readable dir").path())
        .filter(|p| p.extension().is_some_and(|x| x == "json"))
        .collect();
    files.sort();
    files
}

#[test]
fn corpus_is_canonical_valid_and_certified() {
    let files = corpus_files();
    assert!(files.len() >= 16, "corpus went missing? found {}", files.len());
    for path in files {
        let name = path.file_name().unwrap().to_string_lossy().into_owned();
        let text = std::fs::read_to_string(&path).unwrap();
        assert_eq!(
            canonicalize(&text).unwrap_or_else(|e| panic!("{name}: {e}")),
            text,
            "{name} is not in canonical form"
        );
        let doc = InstanceDocument::parse(&text).unwrap();
        let (problem, pp) = doc.to_parts().unwrap_or_else(|e| panic!("{name}: {e}"));
        assert!(
            mtc_valid(&problem, &pp.plan).unwrap_or_else(|e| panic!("{name}: {e}")),
            "{name}: plan is not valid"
        );
        let certificate = doc
            .certificate()
            .unwrap_or_else(|| panic!("{name}: no certificate in meta"))
            .unwrap_or_else(|e| panic!("{name}: {e}"));
        let instance = CertifiedInstance { problem, plan: pp, certificate };
        instance
            .check_witnesses()
            .unwrap_or_else(|e| panic!("{name}: certificate check failed: {e}"));
    }
}

#[test]
fn toy_car_fixture_matches_the_reference_durations() {
    let path = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../fixtures/toycar.json");
    let (_, pp) = planorder::doc::load(&path).unwrap();
    assert_eq!(pp.plan.len(), 9);
    let expect = [
        ("IT", 4),
        ("MtT", 7),
        ("MtW", 4),
        ("MvC1", 2),
        ("MvC2", 2),
        ("MvS", 3),
        ("MvT1", 1),
        ("MvW2", 1),
        ("PAC", 5),
    ];
    for (id, d) in expect {
        assert_eq!(pp.plan.get(&ActionId::new(id)).unwrap().duration, d, "{id}");
    }
}
