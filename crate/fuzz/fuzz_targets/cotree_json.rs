#![no_main]

use cographon::trees::{parse_cotree_json, serialize_cotree, to_json};
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    if let Ok(parsed) = parse_cotree_json(text) {
        let out = to_json(&parsed.tree).to_string();
        let again = parse_cotree_json(&out).expect("exported tree parses");
        assert_eq!(serialize_cotree(&again.tree), serialize_cotree(&parsed.tree));
    }
});
