#![no_main]
use fpp_cli::acceptance::parse_acceptance_summary;
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    if let Ok(text) = std::str::from_utf8(data) {
        let _ = parse_acceptance_summary(text);
    }
});
