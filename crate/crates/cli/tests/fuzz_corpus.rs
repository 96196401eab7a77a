//! Replays the checked-in fuzz seeds through the fuzz-target properties.

use foldhk_cli::config::RunConfig;
use foldhk_cli::report::VerificationReport;
use std::path::PathBuf;

fn seeds(target: &str) -> Vec<(PathBuf, Vec<u8>)> {
    let dir = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../fuzz/corpus").join(target);
    let mut v: Vec<_> = std::fs::read_dir(&dir)
        .unwrap_or_else(|e| panic!("{}: {e}", dir.display()))
        .map(|e| {
            let p = e.unwrap().path();
            let bytes = std::fs::read(&p).unwrap();
            (p, bytes)
        })
        .collect();
    v.sort();
    assert!(!v.is_empty());
    v
}

#[test]
fn config_seeds() {
    let mut accepted = 0;
    for (path, bytes) in seeds("fuzz_config") {
        let text = std::str::from_utf8(&bytes).unwrap();
        let name = path.file_name().unwrap().to_string_lossy();
        match RunConfig::from_toml_str(text) {
            Ok(cfg) => {
                accepted += 1;
                let canonical = cfg.to_toml_string();
                let again = RunConfig::from_toml_str(&canonical).unwrap();
                assert_eq!(again.to_toml_string(), canonical, "{name}");
            }
            Err(e) => assert!(name.contains("violation"), "{name}: {e}"),
        }
    }
    assert!(accepted >= 3);
}

#[test]
fn report_seeds() {
    for (path, bytes) in seeds("fuzz_report") {
        let text = std::str::from_utf8(&bytes).unwrap();
        let r = VerificationReport::from_json(text).unwrap_or_else(|e| panic!("{}: {e}", path.display()));
        assert_eq!(VerificationReport::from_json(&r.to_json()).unwrap(), r);
    }
}

#[test]
fn garbage_is_rejected_not_panicking() {
    for text in ["", "{", "[1,2]", "{\"pass\": true}", "\u{0}", "suite = 3", "[[nahm]]"] {
        assert!(VerificationReport::from_json(text).is_err());
        let _ = RunConfig::from_toml_str(text);
    }
}
