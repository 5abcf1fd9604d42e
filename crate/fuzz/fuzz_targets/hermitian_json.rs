#![no_main]
use libfuzzer_sys::fuzz_target;
use opsys_core::HermitianMatrix;

fuzz_target!(|data: &[u8]| {
    let Ok(h) = serde_json::from_slice::<HermitianMatrix>(data) else { return };
    let text = serde_json::to_string(&h).unwrap();
    let back: HermitianMatrix = serde_json::from_str(&text).expect("own output parses");
    assert_eq!(back.dim(), h.dim());
});
