//! Alias-free pointwise nonlinearities.
//!
//! Inputs are zero-padded in Fourier space onto a grid `p` times finer,
//! combined pointwise there and truncated back to the modes the base grid
//! resolves symmetrically (`|ξ_a| < N/2`). With `p >= (d+1)/2` a polynomial of
//! degree `d` in band-limited inputs is computed without aliasing.

use alloc::vec;
use alloc::vec::Vec;

use num_complex::Complex64;

use super::fft::Direction;
use super::field::{ScalarField, Spectrum};
use super::grid::Padding;
use crate::{Error, Grid, Result};

const ZERO: Complex64 = Complex64::new(0.0, 0.0);

/// Physical samples of spectra on the padded grid, two per inverse FFT.
pub(crate) fn lift(spectra: &[&Spectrum], pad: &Padding) -> Vec<Vec<f64>> {
    let grid = spectra[0].grid();
    let mut out = Vec::with_capacity(spectra.len());
    let mut z = vec![ZERO; pad.len];
    for pair in spectra.chunks(2) {
        z.iter_mut().for_each(|c| *c = ZERO);
        let a = pair[0].coeffs();
        let b = pair.get(1).map(|s| s.coeffs());
        for (idx, target) in pad.map.iter().enumerate() {
            if let Some(p) = *target {
                let mut c = a[idx];
                if let Some(b) = b {
                    c += Complex64::new(-b[idx].im, b[idx].re);
                }
                z[p] = c;
            }
        }
        pad.plan.process_nd(&mut z, grid.dim(), Direction::Inverse);
        out.push(z.iter().map(|c| c.re).collect());
        if b.is_some() {
            out.push(z.iter().map(|c| c.im).collect());
        }
    }
    out
}

/// Forward transform of padded samples truncated to the base grid.
pub(crate) fn project(values: &[&[f64]], pad: &Padding, grid: &Grid) -> Vec<Spectrum> {
    let mut out = Vec::with_capacity(values.len());
    let mut z = vec![ZERO; pad.len];
    let scale = 1.0 / pad.len as f64;
    for pair in values.chunks(2) {
        match pair {
            [a] => {
                for (c, &x) in z.iter_mut().zip(a.iter()) {
                    *c = Complex64::new(x, 0.0);
                }
            }
            [a, b] => {
                for ((c, &x), &y) in z.iter_mut().zip(a.iter()).zip(b.iter()) {
                    *c = Complex64::new(x, y);
                }
            }
            _ => unreachable!(),
        }
        pad.plan.process_nd(&mut z, grid.dim(), Direction::Forward);
        let mut sa = vec![ZERO; grid.len()];
        let mut sb = vec![ZERO; grid.len()];
        for (idx, target) in pad.map.iter().enumerate() {
            let Some(p) = *target else { continue };
            if pair.len() == 1 {
                sa[idx] = z[p] * scale;
            } else {
                let q = pad.map[grid.mirror(idx)].expect("mirror of a resolved mode is resolved");
                let zm = z[q].conj();
                sa[idx] = (z[p] + zm) * (0.5 * scale);
                let d = (z[p] - zm) * (0.5 * scale);
                sb[idx] = Complex64::new(d.im, -d.re);
            }
        }
        out.push(Spectrum::from_coeffs(grid, sa).expect("grid length"));
        if pair.len() == 2 {
            out.push(Spectrum::from_coeffs(grid, sb).expect("grid length"));
        }
    }
    out
}

/// Evaluates `kernel(inputs_at_point, outputs_at_point)` on the grid padded
/// for polynomials of `degree` and returns the truncated output spectra.
///
/// At most 32 inputs and 32 outputs.
pub fn pointwise(
    inputs: &[&Spectrum],
    degree: usize,
    outputs: usize,
    kernel: impl FnMut(&[f64], &mut [f64]),
) -> Vec<Spectrum> {
    pointwise_grouped(&[inputs], degree, outputs, kernel)
}

/// [`pointwise`] with inputs concatenated from several groups. Each group is
/// lifted on its own, so equal groups produce bitwise equal samples.
pub fn pointwise_grouped(
    groups: &[&[&Spectrum]],
    degree: usize,
    outputs: usize,
    mut kernel: impl FnMut(&[f64], &mut [f64]),
) -> Vec<Spectrum> {
    let count: usize = groups.iter().map(|g| g.len()).sum();
    assert!(count <= 32 && outputs <= 32);
    let grid = groups[0][0].grid().clone();
    let pad = grid.padding(degree);
    let lifted: Vec<Vec<f64>> = groups.iter().flat_map(|g| lift(g, &pad)).collect();
    let mut results = vec![vec![0.0; pad.len]; outputs];
    let mut at = [0.0; 32];
    let mut res = [0.0; 32];
    for p in 0..pad.len {
        for (slot, values) in at.iter_mut().zip(&lifted) {
            *slot = values[p];
        }
        kernel(&at[..count], &mut res[..outputs]);
        for (column, &v) in results.iter_mut().zip(res.iter()) {
            column[p] = v;
        }
    }
    let refs: Vec<&[f64]> = results.iter().map(|v| v.as_slice()).collect();
    project(&refs, &pad, &grid)
}

/// Product of `fields.len()` factors (the degree), alias-free for
/// band-limited inputs.
pub fn dealiased_product(fields: &[&ScalarField]) -> Result<ScalarField> {
    let first = fields.first().ok_or(Error::ShapeMismatch { expected: 1, found: 0 })?;
    for f in fields {
        first.grid().check(f.grid())?;
    }
    let spectra: Vec<Spectrum> = super::field::spectra_of(fields);
    let refs: Vec<&Spectrum> = spectra.iter().collect();
    let out = pointwise(&refs, fields.len(), 1, |x, y| {
        // canonical order so the result does not depend on factor order
        let mut sorted = [0.0; 32];
        sorted[..x.len()].copy_from_slice(x);
        let s = &mut sorted[..x.len()];
        s.sort_by(|a, b| a.total_cmp(b));
        y[0] = s.iter().product();
    });
    Ok(out[0].to_field())
}
