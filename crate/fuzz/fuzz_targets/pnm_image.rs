#![no_main]
use libfuzzer_sys::fuzz_target;
use vo_core::io::{parse_pnm, write_pgm, write_ppm};

fuzz_target!(|data: &[u8]| {
    if let Ok(image) = parse_pnm(data) {
        assert!(image.data().iter().all(|v| (0.0..=1.0).contains(v)));
        let written = match image.channels() {
            1 => write_pgm(&image, 65535).expect("gray image writes"),
            3 => write_ppm(&image, 65535).expect("rgb image writes"),
            _ => unreachable!("parser only yields 1 or 3 channels"),
        };
        let reparsed = parse_pnm(&written).expect("writer output must parse");
        assert_eq!(reparsed.width(), image.width());
        assert_eq!(reparsed.height(), image.height());
        assert_eq!(reparsed.channels(), image.channels());
    }
});
