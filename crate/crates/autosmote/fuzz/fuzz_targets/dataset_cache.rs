//! The dataset cache decoder guards version, shape, and finiteness; none
//! of those checks may panic on hostile bytes.

#![no_main]

use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    if let Ok(ds) = autosmote::data::load_cache_from_slice(data) {
        assert_eq!(ds.n_majority() + ds.n_minority(), ds.n_rows());
        assert_eq!(ds.features().nrows(), ds.n_rows());
        assert!(ds.features().iter().all(|v| v.is_finite()));
    }
});
