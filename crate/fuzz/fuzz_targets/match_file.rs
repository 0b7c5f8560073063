#![no_main]
use libfuzzer_sys::fuzz_target;
use vo_core::io::{parse_match_file, write_match_file};

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else {
        return;
    };
    // Must never panic; accepted input must survive a write/parse round trip.
    if let Ok(blocks) = parse_match_file(text) {
        let written = write_match_file(&blocks);
        let reparsed = parse_match_file(&written).expect("writer output must parse");
        assert_eq!(blocks, reparsed);
        assert_eq!(written, write_match_file(&reparsed));
    }
});
