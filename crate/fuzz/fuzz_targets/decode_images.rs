#![no_main]

use libfuzzer_sys::fuzz_target;
use rangeseg::rview::{decode_images, encode_images};

fuzz_target!(|data: &[u8]| {
    if let Ok(images) = decode_images(data) {
        let bytes = encode_images(&images);
        let again = decode_images(&bytes).unwrap();
        assert_eq!(encode_images(&again), bytes);
    }
});
