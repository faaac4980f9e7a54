//! CSV ingestion must reject malformed input with an error, never a panic.

#![no_main]

use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    if let Ok(raw) = autosmote::data::load_csv_from_reader(data, "label", None) {
        // A successful parse must satisfy the table's own accounting.
        assert_eq!(raw.n_majority() + raw.n_minority(), raw.n_rows());
        assert!(raw.n_majority() >= raw.n_minority());
        for column in &raw.columns {
            assert_eq!(column.len(), raw.n_rows());
        }
    }
});
