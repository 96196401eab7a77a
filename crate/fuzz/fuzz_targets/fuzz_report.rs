#![no_main]
use foldhk_cli::report::VerificationReport;
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    if let Ok(report) = VerificationReport::from_json(text) {
        let again = VerificationReport::from_json(&report.to_json()).expect("encoded report decodes");
        assert_eq!(again, report);
    }
});
