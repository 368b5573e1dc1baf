#![no_main]

use clap::Parser;
use helmbie_cli::Cli;
use libfuzzer_sys::fuzz_target;

// Argument vectors separated by NUL bytes; only parsing is exercised.
fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    let argv = std::iter::once("helmbie").chain(text.split('\0'));
    let _ = Cli::try_parse_from(argv);
});
