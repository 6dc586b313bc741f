#![no_main]

use constalg::gpi::MultilinearPoly;
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &str| {
    for p in [2, 3, 5] {
        if let Ok(f) = MultilinearPoly::parse(data, p) {
            assert_eq!(MultilinearPoly::parse(&f.to_text(), p).expect("printed polynomial parses"), f);
        }
    }
});
