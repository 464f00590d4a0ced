//! Regression tables checked against files produced by an independent
//! numpy implementation.

mod common;

use common::*;
use qdisplace::bases::{self, dyadic_string, BasisFamily};
use qdisplace::displacement::{derive_correction_oracle, variant_config, Variant};
use qdisplace::swapping::{self, SwapVariant};

#[test]
fn basis_dumps() {
    for family in BasisFamily::ALL {
        let expected = read_golden(&format!("bases/{}.txt", family.name()));
        assert_eq!(bases::export_text(family), expected, "family {family}");
    }
}

#[test]
fn correction_tables() {
    for v in Variant::ALL {
        let text = read_golden(&format!("corrections/displace-{v}.txt"));
        let table = derive_correction_oracle(&variant_config(v)).unwrap();
        for (label, cells) in golden_rows(&text) {
            let u = table.get(label.parse().unwrap());
            assert!(u.entries().iter().all(|e| e.im == 0.0), "variant {v} {label}");
            let got: Vec<String> = u.entries().iter().map(|e| dyadic_string(e.re)).collect();
            assert_eq!(got, cells, "variant {v} {label}");
        }
    }
}

#[test]
fn pairing_tables() {
    for v in SwapVariant::ALL {
        for transposed in [false, true] {
            let mut cfg = swapping::swap_variant_config(v);
            if transposed {
                cfg = cfg.transposed();
            }
            let total = swapping::build_swap_total(&cfg).unwrap();
            let table = swapping::derive_pairing_table(&total, &cfg).unwrap();
            let expected = read_golden(&format!("pairing/{}.txt", cfg.name()));
            assert_eq!(table.export_text(), expected, "{}", cfg.name());
        }
    }
}

#[test]
fn errata_verdicts() {
    let report = qdisplace::verify_printed_tables().unwrap();
    let got: Vec<(String, Vec<String>)> = report
        .lines
        .iter()
        .map(|l| (l.table.to_string(), vec![l.label.to_string(), l.verdict.as_str().to_string()]))
        .collect();
    assert_eq!(got, golden_rows(&read_golden("errata.txt")));
}

#[test]
fn printed_pairing_export_keeps_duplicates() {
    let text = swapping::export_entries(&swapping::paper_pairing_table());
    let x3_rows = text.lines().filter(|l| l.split_whitespace().nth(1) == Some("X_3")).count();
    assert_eq!(x3_rows, 2);
}
