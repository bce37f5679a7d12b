#![no_main]

use libfuzzer_sys::fuzz_target;

use greensched::powergate::GatingPolicy;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    if let Ok(policy) = GatingPolicy::from_json(text) {
        policy.validate().expect("accepted policies are valid");
        let again = GatingPolicy::from_json(&policy.to_json()).expect("round trip");
        assert_eq!(again, policy);
    }
});
