#![no_main]

use libfuzzer_sys::fuzz_target;
use qdisplace::bases::BasisLabel;
use qdisplace::cli::parse_forced;

fuzz_target!(|data: &[u8]| {
    let Ok(s) = std::str::from_utf8(data) else { return };
    if let Ok(label) = s.parse::<BasisLabel>() {
        assert_eq!(label.to_string().parse::<BasisLabel>().unwrap(), label);
    }
    if let Ok(labels) = parse_forced(s) {
        assert!(labels.len() == 1 || labels.len() == 16);
    }
});
