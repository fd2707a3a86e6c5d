#![no_main]

use libfuzzer_sys::fuzz_target;

use ksemi::harness::{read_report, read_trials_csv};

fuzz_target!(|data: &[u8]| {
    let _ = read_trials_csv(data);
    let _ = read_report(data);
});
