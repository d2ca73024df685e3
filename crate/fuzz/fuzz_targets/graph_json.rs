#![no_main]

use cographon::LabeledGraph;
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    if let Ok(g) = LabeledGraph::from_json(text) {
        let again = LabeledGraph::from_json(&g.to_json().to_string()).expect("exported graph parses");
        assert_eq!(again, g);
    }
});
