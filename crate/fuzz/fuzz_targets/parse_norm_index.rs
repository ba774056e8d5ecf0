#![no_main]

use libfuzzer_sys::fuzz_target;
use trigapprox::approx::Method;
use trigapprox::{NormIndex, Strategy};

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    if let Ok(p) = text.parse::<NormIndex>() {
        assert!(p.is_infinite() || p.value() >= 1.0);
        assert_eq!(p.to_string().parse::<NormIndex>().unwrap(), p);
    }
    if let Ok(s) = text.parse::<Strategy>() {
        assert_eq!(s.to_string().parse::<Strategy>().unwrap(), s);
    }
    if let Some(m) = Method::parse(text) {
        assert_eq!(Method::parse(m.name()), Some(m));
    }
});
