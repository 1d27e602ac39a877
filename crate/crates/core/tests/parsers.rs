//! Replays the fuzz corpus through the same properties the fuzz targets
//! assert, so they are exercised on stable toolchains too.

use std::fs;
use std::path::PathBuf;

use poincare_core::config::{
    format_word, group_to_config, parse_group_config, parse_point, parse_word, ExperimentConfig,
};
use poincare_core::series::Seed;
use poincare_core::Complex64;

fn corpus(target: &str) -> Vec<(String, String)> {
    let dir = PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("../../fuzz/corpus")
        .join(target);
    let mut files: Vec<(String, String)> = fs::read_dir(&dir)
        .unwrap_or_else(|e| panic!("{}: {e}", dir.display()))
        .map(|e| {
            let p = e.unwrap().path();
            let name = p.file_name().unwrap().to_string_lossy().into_owned();
            (name, String::from_utf8_lossy(&fs::read(&p).unwrap()).into_owned())
        })
        .collect();
    files.sort();
    assert!(!files.is_empty(), "empty corpus for {target}");
    files
}

#[test]
fn group_config_corpus() {
    for (name, text) in corpus("group_config") {
        match parse_group_config(&text) {
            Ok(g) => {
                let again = parse_group_config(&group_to_config(&g)).unwrap();
                assert_eq!(g.generators, again.generators, "{name}");
                assert_eq!(g.relators, again.relators, "{name}");
            }
            Err(_) => assert!(
                matches!(name.as_str(), "bad_letter" | "gap" | "short"),
                "{name} rejected"
            ),
        }
    }
}

#[test]
fn experiment_config_corpus() {
    for (name, text) in corpus("experiment_config") {
        let parsed = ExperimentConfig::parse(&text);
        assert_eq!(parsed.is_err(), name == "duplicate", "{name}: {parsed:?}");
    }
}

#[test]
fn seed_corpus() {
    let z = Complex64::new(0.3, -0.4);
    for (name, text) in corpus("seed") {
        match text.parse::<Seed>() {
            Ok(seed) => {
                let again: Seed = seed.to_string().parse().unwrap();
                assert_eq!(seed.eval(z), again.eval(z), "{name}");
            }
            Err(_) => assert!(
                matches!(name.as_str(), "empty_poly" | "pole_near_disc"),
                "{name} rejected"
            ),
        }
    }
}

#[test]
fn word_corpus() {
    for (name, text) in corpus("word") {
        match parse_word(&text) {
            Ok(w) => assert_eq!(parse_word(&format_word(&w)).unwrap(), w, "{name}"),
            Err(_) => assert!(matches!(name.as_str(), "overflow" | "zero"), "{name} rejected"),
        }
    }
}

#[test]
fn point_corpus() {
    for (name, text) in corpus("point") {
        match parse_point(&text) {
            Ok(z) => assert!(z.norm() < 1.0, "{name}"),
            Err(_) => assert!(
                matches!(name.as_str(), "boundary" | "nan" | "rounds_to_one"),
                "{name} rejected"
            ),
        }
    }
}
