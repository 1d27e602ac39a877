#![no_main]
use libfuzzer_sys::fuzz_target;
use poincare_core::config::{format_word, parse_word};

fuzz_target!(|data: &[u8]| {
    let Ok(s) = std::str::from_utf8(data) else { return };
    if let Ok(w) = parse_word(s) {
        assert_eq!(parse_word(&format_word(&w)).expect("re-parse of formatted word"), w);
    }
});
