#![no_main]

use helmbie::billiards::{trace_ray, Scene};
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    let Ok(scene) = Scene::from_json(text) else { return };
    // Any accepted scene must support tracing from a free point.
    let start = [0.0, scene.radius * 0.999];
    if scene.is_free(start) {
        let _ = trace_ray(&scene, start, [0.6, -0.8], 50.0);
    }
});
