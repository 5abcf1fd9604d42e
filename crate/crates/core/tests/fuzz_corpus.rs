//! Replays the checked-in fuzz seeds through the same decoders, so the
//! corpora stay meaningful on stable toolchains.

use std::fs;
use std::path::PathBuf;

use opsys_core::cp_maps::MapSpec;
use opsys_core::graph_systems::Graph;
use opsys_core::{CoproductSystem, HermitianMatrix, LinearMatrixMap, MatrixOperatorSystem, Tolerance};

fn seeds(target: &str) -> Vec<(String, String)> {
    let dir = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../fuzz/corpus").join(target);
    let mut out: Vec<_> = fs::read_dir(&dir)
        .unwrap_or_else(|e| panic!("{}: {e}", dir.display()))
        .map(|e| e.unwrap().path())
        .map(|p| (p.file_name().unwrap().to_string_lossy().into_owned(), fs::read_to_string(&p).unwrap()))
        .collect();
    out.sort();
    assert!(!out.is_empty(), "no seeds for {target}");
    out
}

#[test]
fn graph_seeds() {
    for (name, text) in seeds("graph_parse") {
        let parsed = Graph::parse(&text);
        assert_eq!(parsed.is_ok(), name != "loop.txt", "{name}");
        if let Ok(g) = parsed {
            assert_eq!(Graph::parse_edge_list(&g.to_edge_list()).unwrap(), g);
        }
    }
}

#[test]
fn system_seeds() {
    let tol = Tolerance::default();
    for (name, text) in seeds("system_json") {
        let sys = MatrixOperatorSystem::from_json(&text, &tol).unwrap_or_else(|e| panic!("{name}: {e}"));
        assert_eq!(MatrixOperatorSystem::from_json(&sys.to_json(), &tol).unwrap().dim(), sys.dim());
    }
}

#[test]
fn hermitian_seeds() {
    for (name, text) in seeds("hermitian_json") {
        let parsed = serde_json::from_str::<HermitianMatrix>(&text);
        assert_eq!(parsed.is_ok(), name != "not_hermitian.json", "{name}");
    }
}

#[test]
fn coproduct_seeds() {
    let tol = Tolerance::default();
    for (name, text) in seeds("coproduct_json") {
        let cp = CoproductSystem::from_json(&text, &tol).unwrap_or_else(|e| panic!("{name}: {e}"));
        assert_eq!(CoproductSystem::from_json(&cp.to_json(), &tol).unwrap().dim(), cp.dim());
    }
}

#[test]
fn map_spec_seeds() {
    for (name, text) in seeds("map_spec_json") {
        let spec: MapSpec = serde_json::from_str(&text).unwrap_or_else(|e| panic!("{name}: {e}"));
        LinearMatrixMap::from_spec(&spec, &Tolerance::default()).unwrap_or_else(|e| panic!("{name}: {e}"));
    }
}

/// Byte flips, insertions and truncations of every seed must never panic.
#[test]
fn mutated_seeds_do_not_panic() {
    use rand::{Rng, SeedableRng};
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(9);
    let tol = Tolerance::default();
    let alphabet = b"0123456789-+.eE,[]{}\": \n#nedgsa";
    for target in ["graph_parse", "system_json", "hermitian_json", "coproduct_json", "map_spec_json"] {
        for (_, text) in seeds(target) {
            for _ in 0..200 {
                let mut bytes = text.clone().into_bytes();
                for _ in 0..rng.random_range(1..4) {
                    let at = rng.random_range(0..=bytes.len());
                    let b = alphabet[rng.random_range(0..alphabet.len())];
                    match rng.random_range(0..3) {
                        0 if at < bytes.len() => bytes[at] = b,
                        1 => bytes.insert(at, b),
                        _ => bytes.truncate(at),
                    }
                }
                let Ok(s) = std::str::from_utf8(&bytes) else { continue };
                match target {
                    "graph_parse" => {
                        let _ = Graph::parse(s);
                    }
                    "system_json" => {
                        let _ = MatrixOperatorSystem::from_json(s, &tol);
                    }
                    "hermitian_json" => {
                        let _ = serde_json::from_str::<HermitianMatrix>(s);
                    }
                    "coproduct_json" => {
                        let _ = CoproductSystem::from_json(s, &tol);
                    }
                    _ => {
                        if let Ok(spec) = serde_json::from_str::<MapSpec>(s) {
                            let _ = LinearMatrixMap::from_spec(&spec, &tol);
                        }
                    }
                }
            }
        }
    }
}
