#![no_main]

use libfuzzer_sys::fuzz_target;

use greensched::model::Workflow;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    if let Ok(workflow) = Workflow::from_json(text) {
        let bytes = workflow.to_json();
        let again = Workflow::from_json(&bytes).expect("accepted documents round trip");
        assert_eq!(again.to_json(), bytes);
    }
});
