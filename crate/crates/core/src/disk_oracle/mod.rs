//! Exact Fourier-mode computations on the circle and ball.

mod ball;
mod mie;
mod modes;
mod poles;
mod sweeps;

pub use ball::{ball_order, ball_sharpness_ratio, radial_integral};
pub use mie::{mie_dirichlet, mie_truncation, MieSolution, TAIL_TOLERANCE};
pub use modes::{mode_table, regularizer_symbols, ModeTable, RegularizerSymbol, MAX_MODES};
pub use poles::{impedance_pole_scan, Pole, PoleScan, PoleScanConfig};
pub use sweeps::{mode_coercivity, mode_norms, mode_path, mode_truncation, sharpness_sweep, sharpness_sweep_truncated, ModeNorms, SharpnessSweep};
