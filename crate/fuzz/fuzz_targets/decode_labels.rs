#![no_main]

use libfuzzer_sys::fuzz_target;
use rangeseg::pcio::{decode_labels, encode_labels};
use rangeseg::synth::synthetic_class_map;

fuzz_target!(|data: &[u8]| {
    let map = synthetic_class_map();
    if let Ok(decoded) = decode_labels(data, &map) {
        assert_eq!(decoded.labels.len() * 4, data.len());
        assert!(decoded.labels.iter().all(|&c| (c as usize) < map.num_classes()));
        let bytes = encode_labels(&decoded.labels, &map).unwrap();
        assert_eq!(decode_labels(&bytes, &map).unwrap().labels, decoded.labels);
    }
});
