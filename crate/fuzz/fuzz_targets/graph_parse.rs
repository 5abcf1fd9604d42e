#![no_main]
use libfuzzer_sys::fuzz_target;
use opsys_core::graph_systems::{graph_system, Graph};

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    let Ok(g) = Graph::parse(text) else { return };
    // Whatever parses must survive both textual forms.
    assert_eq!(Graph::parse_edge_list(&g.to_edge_list()).unwrap(), g);
    assert_eq!(Graph::from_spec(&g.to_spec()).unwrap(), g);
    if g.vertex_count() <= 6 {
        assert_eq!(graph_system(&g).dim(), g.vertex_count() + 2 * g.edge_count());
    }
});
