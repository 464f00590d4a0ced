#![no_main]

use libfuzzer_sys::fuzz_target;
use qdisplace::cli::parse_tolerance;

fuzz_target!(|data: &[u8]| {
    let Ok(s) = std::str::from_utf8(data) else { return };
    if let Ok(t) = parse_tolerance(s) {
        assert!(t > 0.0 && t < 1.0);
    }
});
