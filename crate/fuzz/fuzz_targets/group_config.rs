#![no_main]
use libfuzzer_sys::fuzz_target;
use poincare_core::config::{group_to_config, parse_group_config};

fuzz_target!(|data: &[u8]| {
    let Ok(s) = std::str::from_utf8(data) else { return };
    if let Ok(g) = parse_group_config(s) {
        // anything accepted must survive a write/read cycle unchanged
        let again = parse_group_config(&group_to_config(&g)).expect("re-parse of written group");
        assert_eq!(g.generators, again.generators);
        assert_eq!(g.relators, again.relators);
    }
});
