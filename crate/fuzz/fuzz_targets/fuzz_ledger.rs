#![no_main]

use libfuzzer_sys::fuzz_target;

use greensched::sim::EnergyLedger;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    if let Ok(ledger) = EnergyLedger::from_json(text) {
        let bytes = ledger.to_json();
        let again = EnergyLedger::from_json(&bytes).expect("accepted documents round trip");
        assert_eq!(again.to_json(), bytes);
    }
});
