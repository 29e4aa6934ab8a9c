#![no_main]
use fpp_lab::bench::parse_bench_report;
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    if let Ok(r) = parse_bench_report(text) {
        for e in &r.estimates {
            assert!(e.hits <= e.trials);
        }
    }
});
