#![no_main]

use cybe_core::loopalg::LoopAlgebra;
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(s) = std::str::from_utf8(data) else { return };
    let alg = LoopAlgebra::build("A2", None, vec![1, 0, 0]).unwrap();
    let _ = cybe_core::json::decode_equivalence(&alg, s);
});
