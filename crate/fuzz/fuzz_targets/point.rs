#![no_main]
use libfuzzer_sys::fuzz_target;
use poincare_core::config::parse_point;

fuzz_target!(|data: &[u8]| {
    if let Ok(s) = std::str::from_utf8(data) {
        if let Ok(z) = parse_point(s) {
            assert!(z.norm() < 1.0, "{s:?} parsed outside the disc");
        }
    }
});
