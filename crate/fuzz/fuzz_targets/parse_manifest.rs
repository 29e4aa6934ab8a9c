#![no_main]
use fpp_cli::parse_manifest;
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    if let Ok(m) = parse_manifest(text) {
        let again = parse_manifest(&m.to_json()).expect("a parsed manifest re-parses");
        assert_eq!(again, m);
    }
});
