#![no_main]
use libfuzzer_sys::fuzz_target;
use secrelay_core::harness::parse_budget_list;

fuzz_target!(|data: &[u8]| {
    if let Ok(s) = std::str::from_utf8(data) {
        if let Ok(b) = parse_budget_list(s) {
            assert!(b.as_slice().iter().all(|p| *p > 0.0 && p.is_finite()));
        }
    }
});
