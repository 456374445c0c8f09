#![no_main]

use libfuzzer_sys::fuzz_target;
use rangeseg::postproc::{decode_scores, encode_scores};

fuzz_target!(|data: &[u8]| {
    if let Ok(volume) = decode_scores(data) {
        let bytes = encode_scores(&volume);
        assert_eq!(bytes, data);
        assert_eq!(encode_scores(&decode_scores(&bytes).unwrap()), bytes);
    }
});
