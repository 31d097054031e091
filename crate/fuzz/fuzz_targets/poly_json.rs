#![no_main]

use libfuzzer_sys::fuzz_target;
use ricci_core::poly::{decode_field, encode_field};

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    if let Ok(f) = decode_field(text) {
        let back = decode_field(&encode_field(&f)).expect("encoded form decodes");
        assert_eq!(back, f);
    }
});
