#![no_main]
use libfuzzer_sys::fuzz_target;
use poincare_core::config::ExperimentConfig;

fuzz_target!(|data: &[u8]| {
    if let Ok(s) = std::str::from_utf8(data) {
        if let Ok(c) = ExperimentConfig::parse(s) {
            let _ = c.overridden_by(ExperimentConfig::default());
        }
    }
});
