#![no_main]

use libfuzzer_sys::fuzz_target;
use trigapprox_harness::config::ExperimentConfig;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    let Ok(cfg) = ExperimentConfig::parse(text) else { return };
    if cfg.validate().is_ok() {
        let again = ExperimentConfig::parse(&cfg.to_toml()).expect("serialized config parses");
        assert_eq!(again, cfg);
    }
});
