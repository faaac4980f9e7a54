//! Run reports round-trip through JSON; decoding foreign bytes must never
//! panic, and an accepted report must carry the supported version.

#![no_main]

use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    if let Ok(report) = autosmote::engine::RunReport::from_slice(data) {
        assert_eq!(report.version, autosmote::engine::REPORT_VERSION);
    }
});
