#![no_main]

use libfuzzer_sys::fuzz_target;
use twentyq_core::Answer;

fuzz_target!(|data: &[u8]| {
    if let Ok(text) = std::str::from_utf8(data) {
        if let Ok(answer) = text.parse::<Answer>() {
            assert_eq!(answer.as_str().parse::<Answer>().unwrap(), answer);
        }
    }
});
