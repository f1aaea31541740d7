#![no_main]

use cybe_core::loopalg::LoopAlgebra;
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(s) = std::str::from_utf8(data) else { return };
    // principal grading of sl(3) so that degree consistency is exercised
    let alg = LoopAlgebra::build("A2", None, vec![1, 1, 1]).unwrap();
    let _ = cybe_core::json::decode_loop_element(&alg, s);
});
