//! Experiment configs arrive as TOML or JSON text; both decoders and the
//! semantic validator must fail cleanly on arbitrary input.

#![no_main]

use autosmote::engine::ExperimentConfig;
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else {
        return;
    };
    if let Ok(config) = ExperimentConfig::from_toml_str(text) {
        let _ = config.validate();
    }
    if let Ok(config) = ExperimentConfig::from_json_str(text) {
        let _ = config.validate();
    }
});
