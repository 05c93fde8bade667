#![no_main]

use libfuzzer_sys::fuzz_target;
use twentyq_core::catalog::{parse_catalog, preprocess, write_catalog, PreprocessOptions};

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else {
        return;
    };
    let Ok(loaded) = parse_catalog(text, "fuzz") else {
        return;
    };
    let mut buf = Vec::new();
    write_catalog(&loaded.value, &mut buf).expect("writing a parsed catalog");
    let again = parse_catalog(std::str::from_utf8(&buf).unwrap(), "fuzz").expect("re-parsing written catalog");
    assert_eq!(again.value.movies(), loaded.value.movies());
    if let Ok(once) = preprocess(&loaded.value, &PreprocessOptions::default()) {
        let twice = preprocess(&once, &PreprocessOptions::default()).expect("preprocess is idempotent");
        assert_eq!(once, twice);
    }
});
