//! Seeded randomness. Everything random in the crate flows from a ChaCha
//! stream keyed by a single `u64`, so runs are reproducible bit for bit.

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::spectral::{ScalarField, Spectrum};
use crate::Grid;

pub type SimRng = ChaCha8Rng;

pub fn seeded(seed: u64) -> SimRng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Uniform sample in `[-1, 1)`.
pub fn symmetric(rng: &mut SimRng) -> f64 {
    rng.gen_range(-1.0..1.0)
}

/// Random real, mean-free field whose modes satisfy `|ξ_a| <= points/4` on
/// every axis (well inside the dealiasing limit, no Nyquist content).
pub fn random_field(grid: &Grid, rng: &mut SimRng) -> ScalarField {
    random_spectrum(grid, (grid.points() / 4) as f64, rng).to_field()
}

/// Random Hermitian spectrum supported on `0 < |ξ|_∞ <= max_mode`.
pub fn random_spectrum(grid: &Grid, max_mode: f64, rng: &mut SimRng) -> Spectrum {
    let mut s = Spectrum::zeros(grid);
    let coeffs = s.coeffs_mut();
    for idx in 0..grid.len() {
        let mirror = grid.mirror(idx);
        let f = grid.frequency(idx);
        let inf = f.iter().fold(0.0f64, |m, v| m.max(v.abs()));
        if idx >= mirror || inf > max_mode || !grid.is_resolved(idx) {
            continue;
        }
        let c = Complex64::new(symmetric(rng), symmetric(rng));
        coeffs[idx] = c;
        coeffs[mirror] = c.conj();
    }
    s
}
