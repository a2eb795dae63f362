#![no_main]

use libfuzzer_sys::fuzz_target;
use skdist::format;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    let Ok(first) = format::parse(text) else { return };
    let again = format::serialize(first.name.as_deref(), &first.dist);
    let second = format::parse(&again).expect("serialized output parses");
    assert_eq!(first.dist, second.dist);
});
