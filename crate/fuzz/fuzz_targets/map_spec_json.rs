#![no_main]
use libfuzzer_sys::fuzz_target;
use opsys_core::cp_maps::MapSpec;
use opsys_core::{LinearMatrixMap, Tolerance};

fuzz_target!(|data: &[u8]| {
    let Ok(spec) = serde_json::from_slice::<MapSpec>(data) else { return };
    let _ = LinearMatrixMap::from_spec(&spec, &Tolerance::default());
});
