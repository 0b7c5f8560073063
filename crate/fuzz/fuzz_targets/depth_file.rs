#![no_main]
use libfuzzer_sys::fuzz_target;
use vo_core::io::{parse_depth_file, write_depth_file};

fuzz_target!(|data: &[u8]| {
    if let Ok(depth) = parse_depth_file(data) {
        for (&value, &ok) in depth.data().iter().zip(depth.validity()) {
            if ok {
                assert!(value.is_finite() && value > 0.0);
            }
        }
        // Serialization is a fixpoint after one normalization pass.
        let written = write_depth_file(&depth);
        let reparsed = parse_depth_file(&written).expect("writer output must parse");
        assert_eq!(written, write_depth_file(&reparsed));
    }
});
