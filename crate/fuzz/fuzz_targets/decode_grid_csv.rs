#![no_main]

use libfuzzer_sys::fuzz_target;
use trigapprox::io::{read_grid, write_grid};

fuzz_target!(|data: &[u8]| {
    let Ok(signal) = read_grid(data) else { return };
    let mut buf = Vec::new();
    write_grid(&mut buf, &signal).unwrap();
    assert_eq!(read_grid(buf.as_slice()).unwrap(), signal);
});
