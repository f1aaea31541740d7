#![no_main]

use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    if let Ok(s) = std::str::from_utf8(data) {
        if let Ok(r) = cybe_core::json::decode_tensor(8, s) {
            let _ = r.normalized();
        }
    }
});
