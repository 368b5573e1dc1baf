#![no_main]

use helmbie::geom::{boundary_grid, make_curve};
use arbitrary::Arbitrary;
use libfuzzer_sys::fuzz_target;

#[derive(Debug, Arbitrary)]
struct Input {
    name: String,
    params: Vec<f64>,
    scale: f64,
    n: u8,
}

fuzz_target!(|input: Input| {
    let Ok(curve) = make_curve(&input.name, &input.params) else { return };
    let Ok(curve) = curve.scaled(input.scale) else { return };
    let _ = boundary_grid(&curve, 2 * input.n as usize);
});
