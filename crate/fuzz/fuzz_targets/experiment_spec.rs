#![no_main]
use libfuzzer_sys::fuzz_target;
use secrelay_core::harness::ExperimentSpec;

fuzz_target!(|data: &[u8]| {
    if let Ok(s) = std::str::from_utf8(data) {
        if let Ok(spec) = ExperimentSpec::parse(s) {
            let _ = spec.grid();
            let _ = spec.seed();
        }
    }
});
