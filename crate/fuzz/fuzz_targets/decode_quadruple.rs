#![no_main]

use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(s) = std::str::from_utf8(data) else { return };
    if let Ok((alg, q)) = cybe_core::json::decode_quadruple(s) {
        let _ = cybe_core::bdquad::validate(&alg, &q);
    }
});
