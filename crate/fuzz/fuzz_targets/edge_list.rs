#![no_main]

use cographon::LabeledGraph;
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    if let Ok(g) = LabeledGraph::from_edge_list(text) {
        let again = LabeledGraph::from_edge_list(&g.to_edge_list()).expect("exported graph parses");
        assert_eq!(again, g);
    }
});
