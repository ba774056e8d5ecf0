#![no_main]

use libfuzzer_sys::fuzz_target;
use trigapprox::io::read_mterm_results;

fuzz_target!(|data: &[u8]| {
    if let Ok(records) = read_mterm_results(data) {
        for r in records {
            assert_eq!(r.gamma.len(), r.m);
        }
    }
});
