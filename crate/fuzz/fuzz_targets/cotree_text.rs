#![no_main]

use cographon::trees::{parse_cotree, serialize_cotree};
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    if let Ok(parsed) = parse_cotree(text) {
        let out = serialize_cotree(&parsed.tree);
        let again = parse_cotree(&out).expect("serialized tree parses");
        assert_eq!(serialize_cotree(&again.tree), out);
        assert_eq!(again.alternating, parsed.alternating);
    }
});
