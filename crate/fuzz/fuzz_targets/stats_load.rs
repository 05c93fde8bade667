#![no_main]

use libfuzzer_sys::fuzz_target;
use twentyq_core::LearnedStats;

fuzz_target!(|data: &[u8]| {
    if let Ok(stats) = LearnedStats::load(data) {
        let mut buf = Vec::new();
        stats.save(&mut buf).expect("saving loaded stats");
        assert_eq!(
            LearnedStats::load(buf.as_slice()).expect("reloading saved stats"),
            stats
        );
    }
});
