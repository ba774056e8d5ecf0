#![no_main]

use libfuzzer_sys::fuzz_target;
use trigapprox::io::read_extremal;

fuzz_target!(|data: &[u8]| {
    let _ = read_extremal(data);
});
