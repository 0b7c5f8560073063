#![no_main]
use libfuzzer_sys::fuzz_target;
use vo_core::io::{parse_pose_file, write_pose_file};
use vo_core::se3::orthonormality_error;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else {
        return;
    };
    if let Ok(load) = parse_pose_file(text) {
        // Every accepted rotation is on SO(3) within the load tolerance.
        for pose in &load.poses {
            assert!(orthonormality_error(pose.rotation.matrix()) < 1e-6);
        }
        // Writer output reparses to the same poses, with no warnings.
        let written = write_pose_file(&load.poses);
        let reparsed = parse_pose_file(&written).expect("writer output must parse");
        assert!(reparsed.reorthonormalized.is_empty());
        assert_eq!(written, write_pose_file(&reparsed.poses));
    }
});
