#![no_main]
use foldhk_cli::config::RunConfig;
use libfuzzer_sys::fuzz_target;

// Accepted configs must re-render to a config that parses back to the same
// canonical text (and hence the same provenance hash).
fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    if let Ok(cfg) = RunConfig::from_toml_str(text) {
        let canonical = cfg.to_toml_string();
        let again = RunConfig::from_toml_str(&canonical).expect("canonical config re-parses");
        assert_eq!(again.to_toml_string(), canonical);
        assert_eq!(again.digest(), cfg.digest());
    }
});
