#![no_main]

use libfuzzer_sys::fuzz_target;
use twentyq_core::catalog::derive_era;
use twentyq_core::scoring::parse_era;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else {
        return;
    };
    if let Ok(decade) = parse_era(text) {
        assert_eq!(decade % 10, 0);
        if let Ok(label) = derive_era(decade) {
            assert_eq!(parse_era(&label).unwrap(), decade);
        }
    }
});
