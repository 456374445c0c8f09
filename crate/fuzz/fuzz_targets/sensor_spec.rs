#![no_main]

use libfuzzer_sys::fuzz_target;
use rangeseg::SensorSpec;

fuzz_target!(|data: &[u8]| {
    if let Ok(text) = std::str::from_utf8(data) {
        let _ = SensorSpec::from_toml_str(text);
    }
});
