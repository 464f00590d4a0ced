//! Replays the checked-in fuzz corpus through the same checks the fuzz
//! targets make, so regressions show up without a fuzzing toolchain.

use std::fs;
use std::path::PathBuf;

use qdisplace::bases::{BasisFamily, BasisLabel};
use qdisplace::cli::{parse_forced, parse_input, parse_tolerance};
use qdisplace::cloning::CloneKind;
use qdisplace::displacement::Variant;
use qdisplace::record::Record;
use qdisplace::swapping::SwapVariant;

fn seeds(target: &str) -> Vec<String> {
    let dir = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("fuzz/corpus").join(target);
    let mut paths: Vec<PathBuf> = fs::read_dir(&dir).unwrap().map(|e| e.unwrap().path()).collect();
    paths.sort();
    assert!(!paths.is_empty(), "no seeds in {}", dir.display());
    paths.into_iter().filter_map(|p| String::from_utf8(fs::read(p).unwrap()).ok()).collect()
}

#[test]
fn label_seeds() {
    let mut parsed = 0;
    for s in seeds("parse_label") {
        if let Ok(label) = s.parse::<BasisLabel>() {
            assert_eq!(label.to_string().parse::<BasisLabel>().unwrap(), label);
            parsed += 1;
        }
        if let Ok(labels) = parse_forced(&s) {
            assert!(labels.len() == 1 || labels.len() == 16);
        }
    }
    assert!(parsed > 0);
}

#[test]
fn selector_seeds() {
    for s in seeds("parse_selector") {
        if let Ok(f) = s.parse::<BasisFamily>() {
            assert_eq!(f.name().parse::<BasisFamily>().unwrap(), f);
        }
        if let Ok(v) = s.parse::<Variant>() {
            assert_eq!(v.roman().parse::<Variant>().unwrap(), v);
        }
        if let Ok(v) = s.parse::<SwapVariant>() {
            assert_eq!(v.roman().parse::<SwapVariant>().unwrap(), v);
        }
        if let Ok(k) = s.parse::<CloneKind>() {
            assert_eq!(k.name().parse::<CloneKind>().unwrap(), k);
        }
    }
}

#[test]
fn input_seeds() {
    for s in seeds("parse_input") {
        if let Ok(Some(q)) = parse_input(&s) {
            let n: f64 = q.amplitudes().iter().map(|a| a.norm_sqr()).sum();
            assert!((n - 1.0).abs() < 1e-12, "{s}");
        }
    }
}

#[test]
fn tolerance_seeds() {
    for s in seeds("parse_tolerance") {
        if let Ok(t) = parse_tolerance(&s) {
            assert!(t > 0.0 && t < 1.0, "{s}");
        }
    }
}

#[test]
fn record_seeds() {
    let mut parsed = 0;
    for s in seeds("parse_record") {
        if let Ok(r) = Record::parse(&s) {
            let once = r.render();
            assert_eq!(Record::parse(&once).unwrap().render(), once);
            parsed += 1;
        }
    }
    assert!(parsed > 0);
}
