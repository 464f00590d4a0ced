#![no_main]

use libfuzzer_sys::fuzz_target;
use qdisplace::cli::parse_input;

fuzz_target!(|data: &[u8]| {
    let Ok(s) = std::str::from_utf8(data) else { return };
    if let Ok(Some(q)) = parse_input(s) {
        let n: f64 = q.amplitudes().iter().map(|a| a.norm_sqr()).sum();
        assert!((n - 1.0).abs() < 1e-12);
    }
});
