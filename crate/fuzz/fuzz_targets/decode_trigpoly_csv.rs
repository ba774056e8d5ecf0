#![no_main]

use libfuzzer_sys::fuzz_target;
use trigapprox::io::{read_trigpoly, write_trigpoly};

fuzz_target!(|data: &[u8]| {
    let Ok(poly) = read_trigpoly(data) else { return };
    let mut buf = Vec::new();
    write_trigpoly(&mut buf, &poly).unwrap();
    assert_eq!(read_trigpoly(buf.as_slice()).unwrap(), poly);
});
