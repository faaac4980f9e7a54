//! Policy checkpoints restore three networks from named tensors; missing,
//! reshaped, or junk tensors must come back as errors, not panics.

#![no_main]

use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    // The generic tensor container first...
    if let Ok(ckpt) = autosmote::nn::Checkpoint::from_slice(data) {
        for entry in &ckpt.tensors {
            assert_eq!(entry.shape.iter().product::<usize>(), entry.data.len());
        }
    }
    // ...then the full policy-stack restore on top of it.
    let _ = autosmote::search::load_checkpoint_from_slice(data);
});
