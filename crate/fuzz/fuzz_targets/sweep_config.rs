#![no_main]

use helmbie_cli::commands::sweep::SweepArgs;
use helmbie_cli::config::{build_curve, check_wavenumbers, GridRule};
use libfuzzer_sys::fuzz_target;

// Config-file contents for the sweep subcommand: deserialisation plus the
// validation that runs before any assembly.
fuzz_target!(|data: &[u8]| {
    let Ok(args) = serde_json::from_slice::<SweepArgs>(data) else { return };
    let Ok(k) = check_wavenumbers(args.k.as_deref()) else { return };
    if let Ok(rule) = GridRule::parse(args.n.as_deref()) {
        for &k in &k {
            let _ = rule.size(k);
        }
    }
    let _ = build_curve(args.geometry.as_deref(), args.params.as_deref(), args.scale);
});
