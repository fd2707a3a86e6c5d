#![no_main]

use libfuzzer_sys::fuzz_target;

use ksemi::harness::Target;
use ksemi::ode::tables::{parse_range, Property};
use ksemi::strategies::StrategyKind;
use ksemi::{LoopDegree, TieBreak};

fuzz_target!(|data: &[u8]| {
    let Ok(s) = std::str::from_utf8(data) else {
        return;
    };
    if let Ok((a, b)) = parse_range(s) {
        assert!(a <= b);
    }
    if let Ok(t) = s.parse::<Target>() {
        assert_eq!(t.to_string().parse::<Target>().unwrap(), t);
    }
    let _ = s.parse::<Property>();
    let _ = s.parse::<StrategyKind>();
    let _ = s.parse::<TieBreak>();
    let _ = s.parse::<LoopDegree>();
});
