#![no_main]
use libfuzzer_sys::fuzz_target;
use poincare_core::series::Seed;
use poincare_core::Complex64;

fuzz_target!(|data: &[u8]| {
    let Ok(s) = std::str::from_utf8(data) else { return };
    if let Ok(seed) = s.parse::<Seed>() {
        let again: Seed = seed.to_string().parse().expect("re-parse of displayed seed");
        let z = Complex64::new(0.3, -0.4);
        let (a, b) = (seed.eval(z), again.eval(z));
        assert!(a == b || (a.is_nan() && b.is_nan()), "{seed} vs {again}");
    }
});
