#![no_main]

use libfuzzer_sys::fuzz_target;
use ricci_core::poly::Parser;

const NAMES: [&str; 4] = ["x1", "x2", "x3", "x4"];

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    if let Ok(p) = Parser::new(&NAMES).parse(text) {
        let back = Parser::new(&NAMES)
            .parse(&p.fmt_with(&NAMES))
            .expect("printed form parses");
        assert_eq!(back, p);
    }
});
