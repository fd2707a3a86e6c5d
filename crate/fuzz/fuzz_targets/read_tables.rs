#![no_main]

use libfuzzer_sys::fuzz_target;

use ksemi::ode::tables::{read_csv, read_json, write_csv};

fuzz_target!(|data: &[u8]| {
    if let Ok(rows) = read_csv(data) {
        // whatever parses must survive a write and re-read
        let mut buf = Vec::new();
        write_csv(&rows, &mut buf).unwrap();
        assert_eq!(read_csv(&buf[..]).unwrap().len(), rows.len());
    }
    let _ = read_json(data);
});
