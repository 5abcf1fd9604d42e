#![no_main]
use libfuzzer_sys::fuzz_target;
use opsys_core::{CoproductSystem, Tolerance};

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    let tol = Tolerance::default();
    let Ok(cp) = CoproductSystem::from_json(text, &tol) else { return };
    let back = CoproductSystem::from_json(&cp.to_json(), &tol).expect("own output parses");
    assert_eq!(back.dim(), cp.dim());
});
