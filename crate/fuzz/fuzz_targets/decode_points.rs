#![no_main]

use libfuzzer_sys::fuzz_target;
use rangeseg::pcio::{decode_points, encode_points};

fuzz_target!(|data: &[u8]| {
    if let Ok(loaded) = decode_points(data) {
        assert_eq!(loaded.source_len * 16, data.len());
        assert_eq!(loaded.cloud.len() + loaded.dropped(), loaded.source_len);
        let bytes = encode_points(&loaded.cloud);
        let again = decode_points(&bytes).unwrap();
        assert_eq!(again.dropped(), 0);
        assert_eq!(encode_points(&again.cloud), bytes);
    }
});
