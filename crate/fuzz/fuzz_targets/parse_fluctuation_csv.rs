#![no_main]
use fpp_lab::parse_fluctuation_csv;
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    if let Ok(text) = std::str::from_utf8(data) {
        let _ = parse_fluctuation_csv(text);
    }
});
