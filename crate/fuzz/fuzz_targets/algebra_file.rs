#![no_main]

use constalg::format;
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &str| {
    if let Ok(file) = format::parse(data) {
        let text = format::print(&file);
        assert_eq!(format::parse(&text).expect("printed file parses"), file);
    }
});
