#![no_main]
use libfuzzer_sys::fuzz_target;
use secrelay_core::channel::parse_channel;

fuzz_target!(|data: &[u8]| {
    if let Ok(s) = std::str::from_utf8(data) {
        if let Ok(ch) = parse_channel(s) {
            // accepted records must survive a round trip
            let again = parse_channel(&ch.to_json()).expect("re-parse");
            assert_eq!(again, ch);
        }
    }
});
