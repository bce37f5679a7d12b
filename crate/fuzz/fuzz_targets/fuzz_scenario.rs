#![no_main]

use libfuzzer_sys::fuzz_target;

use greensched::workload::ScenarioSpec;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    let Ok(spec) = ScenarioSpec::from_json(text) else { return };
    let again = ScenarioSpec::from_json(&spec.to_json()).expect("round trip");
    assert_eq!(again, spec);

    // Exercise generation on instances small enough to finish instantly.
    if spec.validate().is_ok() && spec.workflow.n_tasks <= 64 && spec.catalog.n_sites <= 8 {
        let (workflow, catalog) = spec.generate().expect("valid specs generate");
        catalog.validate_for(&workflow).expect("generated pair is consistent");
    }
});
