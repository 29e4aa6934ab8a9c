#![no_main]
use fpp_core::io::decode_sample_binary;
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    if let Ok(points) = decode_sample_binary(data) {
        let _ = points.to_vecs();
    }
});
