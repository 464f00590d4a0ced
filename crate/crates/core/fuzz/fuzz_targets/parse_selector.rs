#![no_main]

use libfuzzer_sys::fuzz_target;
use qdisplace::bases::BasisFamily;
use qdisplace::cloning::CloneKind;
use qdisplace::displacement::Variant;
use qdisplace::swapping::SwapVariant;

fuzz_target!(|data: &[u8]| {
    let Ok(s) = std::str::from_utf8(data) else { return };
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
});
