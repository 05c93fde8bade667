#![no_main]

use libfuzzer_sys::fuzz_target;
use twentyq_gateway::api::{parse_body, AnswerBody, CreateGame, GuessBody, RevealBody};

fuzz_target!(|data: &[u8]| {
    let _ = parse_body::<CreateGame>(data, true);
    let _ = serde_json::from_slice::<AnswerBody>(data);
    let _ = serde_json::from_slice::<GuessBody>(data);
    let _ = serde_json::from_slice::<RevealBody>(data);
});
