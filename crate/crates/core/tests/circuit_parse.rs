use std::f64::consts::FRAC_PI_2;
use std::fs;
use std::path::Path;

use eteleport::circuit::{builtin_teleport_network, parse_circuit, CircuitDescription, Element};
use eteleport::error::ParseErrorKind;
use proptest::prelude::*;

fn corpus() -> Vec<(String, String)> {
    let dir = Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/corpus");
    let mut files: Vec<_> = fs::read_dir(dir)
        .unwrap()
        .map(|e| e.unwrap().path())
        .filter(|p| p.extension().is_some_and(|e| e == "circ"))
        .collect();
    files.sort();
    files.into_iter().map(|p| (p.display().to_string(), fs::read_to_string(&p).unwrap())).collect()
}

#[test]
fn corpus_round_trips_and_composes() {
    let files = corpus();
    assert!(files.len() >= 5);
    for (name, text) in files {
        let parsed = parse_circuit(&text).unwrap_or_else(|e| panic!("{name}: {e}"));
        assert_eq!(parse_circuit(&parsed.to_string()).unwrap(), parsed, "{name}");
        let u = parsed.compose().unwrap();
        assert!(u.unitarity_deviation() < 1e-12, "{name}");
    }
}

#[test]
fn bundled_corpus_matches_files_on_disk() {
    for (name, text) in eteleport::acceptance::BUNDLED_CORPUS {
        let on_disk =
            fs::read_to_string(Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/corpus").join(name)).unwrap();
        assert_eq!(on_disk, text);
    }
}

#[test]
fn teleport_file_equals_builtin_network() {
    let text = fs::read_to_string(Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/corpus/teleport.circ")).unwrap();
    let from_file = parse_circuit(&text).unwrap().compose().unwrap();
    let builtin = builtin_teleport_network(0.3, 1.2, 0.5, FRAC_PI_2).unwrap();
    let file_rows = from_file.reorder_rows(builtin.rows().clone()).unwrap();
    assert!(file_rows.matrix().max_abs_diff(builtin.matrix()) < 1e-15);
}

#[test]
fn error_messages_carry_positions() {
    let e = parse_circuit("modes a b\n\nprep a b R=2 phi=0\n").unwrap_err();
    assert_eq!(e.to_string(), "3:10: parameter out of range: R=2 not in [0, 1]");
    let e = parse_circuit("modes a b\nsplit a b\n").unwrap_err();
    assert_eq!(e.kind, ParseErrorKind::UnknownElement("split".into()));
}

fn label() -> impl Strategy<Value = String> {
    "[a-zA-Z][a-zA-Z0-9_]{0,5}".prop_filter("reserved", |s| !matches!(s.as_str(), "modes" | "outputs"))
}

fn element(modes: Vec<String>) -> impl Strategy<Value = Element> {
    let n = modes.len();
    let pair = (0..n, 0..n).prop_filter("distinct", |(a, b)| a != b);
    let m1 = modes.clone();
    let m2 = modes.clone();
    let m3 = modes.clone();
    let m4 = modes;
    prop_oneof![
        pair.clone().prop_map(move |(a, b)| Element::sym(&m1[a], &m1[b])),
        (pair.clone(), 0.0f64..=1.0, -10.0f64..10.0)
            .prop_map(move |((a, b), r, phi)| Element::prep(&m2[a], &m2[b], r, phi).unwrap()),
        (pair, 0.0f64..=1.0, -10.0f64..10.0)
            .prop_map(move |((a, b), d, t)| Element::tomo(&m3[a], &m3[b], d, t).unwrap()),
        (0..n, -1e3f64..1e3).prop_map(move |(a, v)| Element::phase(&m4[a], v)),
    ]
}

fn circuit() -> impl Strategy<Value = CircuitDescription> {
    prop::collection::btree_set(label(), 2..6)
        .prop_flat_map(|set| {
            let modes: Vec<String> = set.into_iter().collect();
            let rename = prop::option::of(Just(modes.iter().map(|m| format!("{m}_out")).collect::<Vec<_>>()));
            (Just(modes.clone()), rename, prop::collection::vec(element(modes), 0..8))
        })
        .prop_map(|(modes, outputs, elements)| CircuitDescription { modes, outputs, elements })
}

proptest! {
    #[test]
    fn display_then_parse_is_identity(c in circuit()) {
        let text = c.to_string();
        prop_assert_eq!(parse_circuit(&text).unwrap(), c);
    }

    #[test]
    fn composed_networks_are_unitary(c in circuit()) {
        prop_assert!(c.compose().unwrap().unitarity_deviation() < 1e-12);
    }

    #[test]
    fn parser_never_panics(text in "[ -~\n]{0,200}") {
        let _ = parse_circuit(&text);
    }
}
