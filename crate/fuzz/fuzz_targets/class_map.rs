#![no_main]

use libfuzzer_sys::fuzz_target;
use rangeseg::ClassMap;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    if let Ok(map) = ClassMap::from_toml_str(text) {
        let again = ClassMap::from_toml_str(&map.to_toml_string()).unwrap();
        assert_eq!(again.to_toml_string(), map.to_toml_string());
    }
});
