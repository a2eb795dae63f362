#![no_main]

use libfuzzer_sys::fuzz_target;
use skdist::{common, format, structure};

// Parsed inputs small enough to analyze quickly must not panic anywhere in
// the structural checks.
fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    let Ok(f) = format::parse(text) else { return };
    let d = f.dist;
    if d.shape().iter().product::<usize>() > 64 {
        return;
    }
    let cmi = d.conditional_mutual_information();
    assert!(cmi >= 0.0);
    let nc = common::no_comm_key_rate(&d);
    assert!(nc <= common::helper_no_comm_key_rate(&d) + 1e-9);
    let _ = structure::check_theorem3(&d);
    for w in structure::check_theorem4(&d).witnesses {
        let _ = structure::construct_reducing_channel(&d, w.z0, w.z1);
        let _ = structure::mixing_curve(&d, w.z0, w.z1, 8);
    }
});
