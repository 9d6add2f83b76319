//! Principal-minor sums `E_k` and small dense matrix algebra.
//!
//! The incompressibility constraint expands as
//! `det(I + A) = 1 + tr A + Σ_{k=2}^n E_k(A)`, where `E_k(A)` is the sum of
//! the determinants of all `k × k` principal submatrices.

use alloc::vec::Vec;

use crate::spectral::{pointwise, Field, MatrixField, ScalarField, Spectrum};
use crate::{Error, Result};

/// Determinant of the principal submatrix selected by the bit set `rows`
/// of a row-major `n × n` matrix, by cofactor expansion along the first row.
fn principal_det(a: &[f64], n: usize, rows: u32) -> f64 {
    let idx: Vec<usize> = (0..n).filter(|i| rows & (1 << i) != 0).collect();
    submatrix_det(a, n, &idx, &idx)
}

fn submatrix_det(a: &[f64], n: usize, rows: &[usize], cols: &[usize]) -> f64 {
    match rows.len() {
        0 => 1.0,
        1 => a[rows[0] * n + cols[0]],
        2 => a[rows[0] * n + cols[0]] * a[rows[1] * n + cols[1]]
            - a[rows[0] * n + cols[1]] * a[rows[1] * n + cols[0]],
        _ => {
            let mut total = 0.0;
            let mut sign = 1.0;
            let mut minor_cols: Vec<usize> = Vec::with_capacity(cols.len() - 1);
            for (c, &col) in cols.iter().enumerate() {
                minor_cols.clear();
                minor_cols.extend(cols.iter().enumerate().filter(|(k, _)| *k != c).map(|(_, &v)| v));
                total += sign * a[rows[0] * n + col] * submatrix_det(a, n, &rows[1..], &minor_cols);
                sign = -sign;
            }
            total
        }
    }
}

/// Cofactor-expansion determinant of a row-major `n × n` matrix.
pub fn determinant(a: &[f64], n: usize) -> f64 {
    let idx: Vec<usize> = (0..n).collect();
    submatrix_det(a, n, &idx, &idx)
}

/// `E_k(A)` for a row-major `n × n` matrix; `E_0 = 1`, `E_1 = tr A`.
pub fn principal_minor_sum_matrix(a: &[f64], n: usize, k: usize) -> f64 {
    (0u32..(1 << n))
        .filter(|m| m.count_ones() as usize == k)
        .map(|m| principal_det(a, n, m))
        .sum()
}

/// `Σ_{k=2}^n E_k(A)`, written out for the supported dimensions.
#[inline]
pub(crate) fn higher_minor_sum(a: &[f64], n: usize) -> f64 {
    match n {
        2 => a[0] * a[3] - a[1] * a[2],
        3 => {
            let e2 = (a[0] * a[4] - a[1] * a[3]) + (a[0] * a[8] - a[2] * a[6])
                + (a[4] * a[8] - a[5] * a[7]);
            let e3 = a[0] * (a[4] * a[8] - a[5] * a[7]) - a[1] * (a[3] * a[8] - a[5] * a[6])
                + a[2] * (a[3] * a[7] - a[4] * a[6]);
            e2 + e3
        }
        _ => (2..=n).map(|k| principal_minor_sum_matrix(a, n, k)).sum(),
    }
}

/// Adjugate (transposed cofactor matrix) of `I + a` for `n ∈ {2, 3}`,
/// row-major into `out`.
#[inline]
pub(crate) fn adjugate_of_shifted(a: &[f64], n: usize, out: &mut [f64]) {
    match n {
        2 => {
            out[0] = 1.0 + a[3];
            out[1] = -a[1];
            out[2] = -a[2];
            out[3] = 1.0 + a[0];
        }
        3 => {
            let m = [
                1.0 + a[0], a[1], a[2],
                a[3], 1.0 + a[4], a[5],
                a[6], a[7], 1.0 + a[8],
            ];
            out[0] = m[4] * m[8] - m[5] * m[7];
            out[1] = m[2] * m[7] - m[1] * m[8];
            out[2] = m[1] * m[5] - m[2] * m[4];
            out[3] = m[5] * m[6] - m[3] * m[8];
            out[4] = m[0] * m[8] - m[2] * m[6];
            out[5] = m[2] * m[3] - m[0] * m[5];
            out[6] = m[3] * m[7] - m[4] * m[6];
            out[7] = m[1] * m[6] - m[0] * m[7];
            out[8] = m[0] * m[4] - m[1] * m[3];
        }
        _ => unreachable!("dimension 2 or 3"),
    }
}

/// `Σ_{k>=2} E_k(G)` from Jacobian spectra, dealiased at degree `n`.
pub(crate) fn minor_sum_spectrum(g: &[Spectrum]) -> Spectrum {
    let n = g[0].grid().dim();
    let refs: Vec<&Spectrum> = g.iter().collect();
    pointwise(&refs, n, 1, |a, out| out[0] = higher_minor_sum(a, n))
        .pop()
        .expect("one output")
}

/// Pointwise `E_k(A)` for `2 <= k <= n`, products dealiased at degree `k`.
pub fn principal_minor_sum(a: &MatrixField, k: usize) -> Result<ScalarField> {
    let n = a.dim();
    if !(2..=n).contains(&k) {
        return Err(Error::IndexOutOfRange { what: "minor size", index: k, bound: n + 1 });
    }
    let spectra = a.spectra();
    let refs: Vec<&Spectrum> = spectra.iter().collect();
    let out = pointwise(&refs, k, 1, |m, o| o[0] = principal_minor_sum_matrix(m, n, k));
    Ok(out[0].to_field())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::Grid;
    use libm::sin;

    #[test]
    fn identity_and_reference_matrix() {
        let grid = Grid::new(3, 8).unwrap();
        let id = MatrixField::constant(&grid, &[1., 0., 0., 0., 1., 0., 0., 0., 1.]).unwrap();
        let e2 = principal_minor_sum(&id, 2).unwrap();
        let e3 = principal_minor_sum(&id, 3).unwrap();
        assert!(e2.values().iter().all(|v| (v - 3.0).abs() < 1e-13));
        assert!(e3.values().iter().all(|v| (v - 1.0).abs() < 1e-13));

        // brute force by hand: minors (1,2): 5-8=-3, (1,3): 10-21=-11, (2,3): 50-48=2
        let a = [1., 2., 3., 4., 5., 6., 7., 8., 10.];
        assert_eq!(principal_minor_sum_matrix(&a, 3, 2), -12.0);
        assert_eq!(determinant(&a, 3), -3.0);
        let field = MatrixField::constant(&grid, &a).unwrap();
        let e2 = principal_minor_sum(&field, 2).unwrap();
        let e3 = principal_minor_sum(&field, 3).unwrap();
        assert!(e2.values().iter().all(|v| (v + 12.0).abs() < 1e-12));
        assert!(e3.values().iter().all(|v| (v + 3.0).abs() < 1e-12));
    }

    #[test]
    fn shear_minors_vanish() {
        let grid = Grid::new(3, 16).unwrap();
        let mut comps: Vec<ScalarField> = (0..9).map(|_| ScalarField::zeros(&grid)).collect();
        comps[1] = ScalarField::from_fn(&grid, |x| sin(x[1]) + 0.3 * sin(2.0 * x[1]));
        let a = MatrixField::new(&grid, comps).unwrap();
        for k in 2..=3 {
            assert!(principal_minor_sum(&a, k).unwrap().max_abs() < 1e-15);
        }
    }

    #[test]
    fn rejects_out_of_range_sizes() {
        let grid = Grid::new(2, 8).unwrap();
        let a = MatrixField::zeros(&grid);
        assert!(principal_minor_sum(&a, 1).is_err());
        assert!(principal_minor_sum(&a, 3).is_err());
    }

    #[test]
    fn unrolled_sum_matches_enumeration() {
        let a = [0.3, -1.2, 0.7, 2.0, 0.1, -0.4, 0.9, 1.5, -0.8];
        let e = principal_minor_sum_matrix(&a, 3, 2) + principal_minor_sum_matrix(&a, 3, 3);
        assert!((higher_minor_sum(&a, 3) - e).abs() < 1e-14);
        let mut adj = [0.0; 9];
        adjugate_of_shifted(&a, 3, &mut adj);
        let m: Vec<f64> = a
            .iter()
            .enumerate()
            .map(|(k, v)| if k % 4 == 0 { v + 1.0 } else { *v })
            .collect();
        let det = determinant(&m, 3);
        // adj(M)·M = det(M)·I
        for i in 0..3 {
            for j in 0..3 {
                let s: f64 = (0..3).map(|k| adj[i * 3 + k] * m[k * 3 + j]).sum();
                let expect = if i == j { det } else { 0.0 };
                assert!((s - expect).abs() < 1e-13);
            }
        }
    }
}
