#![no_main]

use libfuzzer_sys::fuzz_target;
use trigapprox_harness::report::{read_order_csv, write_order_csv};

fuzz_target!(|data: &[u8]| {
    let Ok(rows) = read_order_csv(data) else { return };
    let mut buf = Vec::new();
    write_order_csv(&mut buf, &rows).unwrap();
    assert_eq!(read_order_csv(buf.as_slice()).unwrap(), rows);
});
