#![no_main]

use libfuzzer_sys::fuzz_target;
use ricci_core::spaces::{catalog_lookup, SpaceSpec};

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    if let Ok(spec) = text.parse::<SpaceSpec>() {
        let back: SpaceSpec = spec.to_string().parse().expect("canonical form parses");
        assert_eq!(back, spec);
        assert!(catalog_lookup(&spec).is_ok());
    }
});
