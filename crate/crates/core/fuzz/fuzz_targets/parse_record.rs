#![no_main]

use libfuzzer_sys::fuzz_target;
use qdisplace::record::Record;

fuzz_target!(|data: &[u8]| {
    let Ok(s) = std::str::from_utf8(data) else { return };
    if let Ok(r) = Record::parse(s) {
        // rendering is a fixed point after one parse
        let once = r.render();
        let twice = Record::parse(&once).expect("rendered records parse").render();
        assert_eq!(once, twice);
    }
});
