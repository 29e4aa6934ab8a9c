#![no_main]
use fpp_cli::parse_config;
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    if let Ok(cfg) = parse_config(text) {
        let again = parse_config(&cfg.to_json()).expect("a parsed config re-parses");
        assert_eq!(again, cfg);
    }
});
