#![no_main]

use libfuzzer_sys::fuzz_target;

// The configuration parser takes untrusted text (JSON or key=value) and
// must only ever return Ok or a diagnostic list, never panic.
fuzz_target!(|data: &[u8]| {
    if data.len() > 1 << 16 {
        return;
    }
    if let Ok(text) = std::str::from_utf8(data) {
        let _ = fracclock::parse_config(text);
    }
});
