#![no_main]

use libfuzzer_sys::fuzz_target;

use greensched::model::Schedule;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    if let Ok(schedule) = Schedule::from_json(text) {
        let bytes = schedule.to_json();
        let again = Schedule::from_json(&bytes).expect("accepted documents round trip");
        assert_eq!(again, schedule);
    }
});
