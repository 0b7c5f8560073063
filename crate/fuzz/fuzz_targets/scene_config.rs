#![no_main]
use libfuzzer_sys::fuzz_target;
use vo_core::io::{parse_run_config, parse_scene_config};

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else {
        return;
    };
    if let Ok(cfg) = parse_scene_config(text) {
        assert!(cfg.frames >= 2);
        assert!(cfg.depth_min > 0.0 && cfg.depth_max > cfg.depth_min);
        assert!(cfg.intrinsics.build().is_ok());
    }
    if let Ok(cfg) = parse_run_config(text) {
        assert!(cfg.f2f.validate().is_ok());
        assert!(cfg.scale.validate().is_ok());
    }
});
