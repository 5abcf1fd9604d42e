#![no_main]
use libfuzzer_sys::fuzz_target;
use opsys_core::{MatrixOperatorSystem, Tolerance};

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    let tol = Tolerance::default();
    let Ok(sys) = MatrixOperatorSystem::from_json(text, &tol) else { return };
    let back = MatrixOperatorSystem::from_json(&sys.to_json(), &tol).expect("own output parses");
    assert_eq!(back.dim(), sys.dim());
});
