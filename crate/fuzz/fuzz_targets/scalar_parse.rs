#![no_main]

use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    if let Ok(s) = std::str::from_utf8(data) {
        if let Ok(x) = cybe_core::Scalar::parse(s) {
            // printing and reparsing is the identity
            assert_eq!(cybe_core::Scalar::parse(&x.to_string()).unwrap(), x);
        }
    }
});
