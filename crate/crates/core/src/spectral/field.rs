use alloc::vec;
use alloc::vec::Vec;

use num_complex::Complex64;

use super::fft::Direction;
use super::Grid;
use crate::math;
use crate::{Error, Result};

const ZERO: Complex64 = Complex64::new(0.0, 0.0);

/// Real samples of a scalar function on a [`Grid`].
#[derive(Clone, Debug, PartialEq)]
pub struct ScalarField {
    grid: Grid,
    values: Vec<f64>,
}

/// Fourier coefficients `û(ξ)` with `u(x) = Σ_ξ û(ξ) e^{iξ·x}`.
#[derive(Clone, Debug, PartialEq)]
pub struct Spectrum {
    grid: Grid,
    coeffs: Vec<Complex64>,
}

impl ScalarField {
    pub fn zeros(grid: &Grid) -> Self {
        ScalarField { grid: grid.clone(), values: vec![0.0; grid.len()] }
    }

    pub fn constant(grid: &Grid, value: f64) -> Self {
        ScalarField { grid: grid.clone(), values: vec![value; grid.len()] }
    }

    pub fn from_values(grid: &Grid, values: Vec<f64>) -> Result<Self> {
        if values.len() != grid.len() {
            return Err(Error::ShapeMismatch { expected: grid.len(), found: values.len() });
        }
        Ok(ScalarField { grid: grid.clone(), values })
    }

    /// Samples `f` at the grid coordinates.
    pub fn from_fn(grid: &Grid, f: impl Fn([f64; 3]) -> f64) -> Self {
        let values = (0..grid.len()).map(|i| f(grid.coordinates(i))).collect();
        ScalarField { grid: grid.clone(), values }
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn values_mut(&mut self) -> &mut [f64] {
        &mut self.values
    }

    pub fn into_values(self) -> Vec<f64> {
        self.values
    }

    pub fn mean(&self) -> f64 {
        self.values.iter().sum::<f64>() / self.values.len() as f64
    }

    /// `(∫ |u|²)^{1/2}` over the torus.
    pub fn l2_norm(&self) -> f64 {
        math::sqrt(self.l2_norm_sq())
    }

    pub fn l2_norm_sq(&self) -> f64 {
        self.values.iter().map(|v| v * v).sum::<f64>() * self.grid.cell_volume()
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    pub fn spectrum(&self) -> Spectrum {
        let mut coeffs: Vec<Complex64> =
            self.values.iter().map(|&v| Complex64::new(v, 0.0)).collect();
        self.grid.plan().process_nd(&mut coeffs, self.grid.dim(), Direction::Forward);
        let scale = 1.0 / self.grid.len() as f64;
        coeffs.iter_mut().for_each(|c| *c *= scale);
        Spectrum { grid: self.grid.clone(), coeffs }
    }

    /// `self += a * other`
    pub fn axpy(&mut self, a: f64, other: &ScalarField) {
        debug_assert!(self.grid.same(&other.grid));
        for (x, y) in self.values.iter_mut().zip(&other.values) {
            *x += a * y;
        }
    }

    pub fn scaled(&self, a: f64) -> Self {
        ScalarField { grid: self.grid.clone(), values: self.values.iter().map(|v| a * v).collect() }
    }
}

impl Spectrum {
    pub fn zeros(grid: &Grid) -> Self {
        Spectrum { grid: grid.clone(), coeffs: vec![ZERO; grid.len()] }
    }

    pub fn from_coeffs(grid: &Grid, coeffs: Vec<Complex64>) -> Result<Self> {
        if coeffs.len() != grid.len() {
            return Err(Error::ShapeMismatch { expected: grid.len(), found: coeffs.len() });
        }
        Ok(Spectrum { grid: grid.clone(), coeffs })
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn coeffs(&self) -> &[Complex64] {
        &self.coeffs
    }

    pub fn coeffs_mut(&mut self) -> &mut [Complex64] {
        &mut self.coeffs
    }

    /// Real part of the inverse transform.
    pub fn to_field(&self) -> ScalarField {
        let mut data = self.coeffs.clone();
        self.grid.plan().process_nd(&mut data, self.grid.dim(), Direction::Inverse);
        ScalarField { grid: self.grid.clone(), values: data.into_iter().map(|c| c.re).collect() }
    }

    pub fn mean(&self) -> f64 {
        self.coeffs[0].re
    }

    /// Root-mean-square of the represented function, `(Σ|û|²)^{1/2}`.
    pub fn rms(&self) -> f64 {
        math::sqrt(self.coeffs.iter().map(|c| c.norm_sqr()).sum())
    }

    /// `(∫ |u|²)^{1/2}` by Parseval.
    pub fn l2_norm(&self) -> f64 {
        self.rms() * math::sqrt(self.grid.volume())
    }

    /// Zero-mode guard shared by operators that are undefined on constants.
    pub fn require_mean_free(&self) -> Result<()> {
        let mean = math::sqrt(self.coeffs[0].norm_sqr());
        let norm = self.rms();
        if mean > 1e-10 * norm {
            Err(Error::NonZeroMean { mean, norm })
        } else {
            Ok(())
        }
    }

    /// Applies a real or complex multiplier `m(idx)` mode by mode.
    pub fn multiplied(&self, mut m: impl FnMut(usize) -> Complex64) -> Spectrum {
        let coeffs = self.coeffs.iter().enumerate().map(|(i, c)| c * m(i)).collect();
        Spectrum { grid: self.grid.clone(), coeffs }
    }

    /// Applies a real multiplier `m(idx)` mode by mode.
    pub fn scaled_by(&self, mut m: impl FnMut(usize) -> f64) -> Spectrum {
        let coeffs = self.coeffs.iter().enumerate().map(|(i, c)| c * m(i)).collect();
        Spectrum { grid: self.grid.clone(), coeffs }
    }

    /// `self += a * other`
    pub fn axpy(&mut self, a: Complex64, other: &Spectrum) {
        debug_assert!(self.grid.same(&other.grid));
        for (x, y) in self.coeffs.iter_mut().zip(&other.coeffs) {
            *x += a * y;
        }
    }

    pub fn add_assign(&mut self, other: &Spectrum) {
        debug_assert!(self.grid.same(&other.grid));
        for (x, y) in self.coeffs.iter_mut().zip(&other.coeffs) {
            *x += y;
        }
    }

    pub fn sub(&self, other: &Spectrum) -> Spectrum {
        let coeffs = self.coeffs.iter().zip(&other.coeffs).map(|(a, b)| a - b).collect();
        Spectrum { grid: self.grid.clone(), coeffs }
    }
}

/// Forward transforms of real fields, two per complex FFT.
pub fn spectra_of(fields: &[&ScalarField]) -> Vec<Spectrum> {
    let mut out = Vec::with_capacity(fields.len());
    for pair in fields.chunks(2) {
        match pair {
            [a] => out.push(a.spectrum()),
            [a, b] => {
                let grid = a.grid();
                let mut z: Vec<Complex64> = a
                    .values
                    .iter()
                    .zip(&b.values)
                    .map(|(&x, &y)| Complex64::new(x, y))
                    .collect();
                grid.plan().process_nd(&mut z, grid.dim(), Direction::Forward);
                let scale = 0.5 / grid.len() as f64;
                let mut sa = Vec::with_capacity(z.len());
                let mut sb = Vec::with_capacity(z.len());
                for (i, zi) in z.iter().enumerate() {
                    let zm = z[grid.mirror(i)].conj();
                    sa.push((zi + zm) * scale);
                    // (z - conj(z(-k))) / 2i
                    let d = (zi - zm) * scale;
                    sb.push(Complex64::new(d.im, -d.re));
                }
                out.push(Spectrum { grid: grid.clone(), coeffs: sa });
                out.push(Spectrum { grid: grid.clone(), coeffs: sb });
            }
            _ => unreachable!(),
        }
    }
    out
}

/// Inverse transforms of Hermitian spectra, two per complex FFT.
pub fn fields_of(spectra: &[&Spectrum]) -> Vec<ScalarField> {
    let mut out = Vec::with_capacity(spectra.len());
    for pair in spectra.chunks(2) {
        match pair {
            [a] => out.push(a.to_field()),
            [a, b] => {
                let grid = a.grid();
                let mut z: Vec<Complex64> = a
                    .coeffs
                    .iter()
                    .zip(&b.coeffs)
                    .map(|(x, y)| x + Complex64::new(-y.im, y.re))
                    .collect();
                grid.plan().process_nd(&mut z, grid.dim(), Direction::Inverse);
                out.push(ScalarField { grid: grid.clone(), values: z.iter().map(|c| c.re).collect() });
                out.push(ScalarField { grid: grid.clone(), values: z.iter().map(|c| c.im).collect() });
            }
            _ => unreachable!(),
        }
    }
    out
}

/// Common interface of scalar, vector and matrix fields: a fixed number of
/// scalar components on one grid, determined by the grid dimension.
pub trait Field: Clone + Sized {
    /// Number of scalar components for a grid of dimension `dim`.
    fn component_count(dim: usize) -> usize;

    fn grid(&self) -> &Grid;

    fn components(&self) -> &[ScalarField];

    fn components_mut(&mut self) -> &mut [ScalarField];

    fn from_components(grid: &Grid, components: Vec<ScalarField>) -> Result<Self>;

    fn zeros(grid: &Grid) -> Self {
        let comps = (0..Self::component_count(grid.dim())).map(|_| ScalarField::zeros(grid)).collect();
        Self::from_components(grid, comps).expect("component count matches")
    }

    fn zeros_like(&self) -> Self {
        Self::zeros(self.grid())
    }

    /// Frobenius `L²` norm.
    fn l2_norm(&self) -> f64 {
        math::sqrt(self.components().iter().map(|c| c.l2_norm_sq()).sum())
    }

    fn max_abs(&self) -> f64 {
        self.components().iter().fold(0.0, |m, c| m.max(c.max_abs()))
    }

    fn spectra(&self) -> Vec<Spectrum> {
        let refs: Vec<&ScalarField> = self.components().iter().collect();
        spectra_of(&refs)
    }

    fn from_spectra(grid: &Grid, spectra: &[Spectrum]) -> Result<Self> {
        let refs: Vec<&Spectrum> = spectra.iter().collect();
        Self::from_components(grid, fields_of(&refs))
    }

    /// `self += a * other`
    fn axpy(&mut self, a: f64, other: &Self) {
        for (x, y) in self.components_mut().iter_mut().zip(other.components()) {
            x.axpy(a, y);
        }
    }

    fn difference(&self, other: &Self) -> Self {
        let mut out = self.clone();
        out.axpy(-1.0, other);
        out
    }

    fn map_components(&self, f: impl FnMut(&ScalarField) -> ScalarField) -> Self {
        let comps = self.components().iter().map(f).collect();
        Self::from_components(self.grid(), comps).expect("component count preserved")
    }
}

impl Field for ScalarField {
    fn component_count(_dim: usize) -> usize {
        1
    }

    fn grid(&self) -> &Grid {
        &self.grid
    }

    fn components(&self) -> &[ScalarField] {
        core::slice::from_ref(self)
    }

    fn components_mut(&mut self) -> &mut [ScalarField] {
        core::slice::from_mut(self)
    }

    fn from_components(grid: &Grid, mut components: Vec<ScalarField>) -> Result<Self> {
        if components.len() != 1 {
            return Err(Error::ShapeMismatch { expected: 1, found: components.len() });
        }
        let c = components.pop().expect("one component");
        grid.check(&c.grid)?;
        Ok(c)
    }
}

fn check_components(grid: &Grid, components: &[ScalarField], expected: usize) -> Result<()> {
    if components.len() != expected {
        return Err(Error::ShapeMismatch { expected, found: components.len() });
    }
    components.iter().try_for_each(|c| grid.check(&c.grid))
}

/// `dim` scalar components.
#[derive(Clone, Debug, PartialEq)]
pub struct VectorField {
    grid: Grid,
    components: Vec<ScalarField>,
}

impl VectorField {
    pub fn new(components: Vec<ScalarField>) -> Result<Self> {
        let grid = components.first().ok_or(Error::ShapeMismatch { expected: 2, found: 0 })?.grid.clone();
        Self::from_components(&grid, components)
    }

    pub fn component(&self, i: usize) -> &ScalarField {
        &self.components[i]
    }
}

impl Field for VectorField {
    fn component_count(dim: usize) -> usize {
        dim
    }

    fn grid(&self) -> &Grid {
        &self.grid
    }

    fn components(&self) -> &[ScalarField] {
        &self.components
    }

    fn components_mut(&mut self) -> &mut [ScalarField] {
        &mut self.components
    }

    fn from_components(grid: &Grid, components: Vec<ScalarField>) -> Result<Self> {
        check_components(grid, &components, grid.dim())?;
        Ok(VectorField { grid: grid.clone(), components })
    }
}

/// `dim × dim` scalar components stored row-major, `(i, j) -> i·dim + j`.
/// Jacobians follow `G_ij = ∂_j Y_i`.
#[derive(Clone, Debug, PartialEq)]
pub struct MatrixField {
    grid: Grid,
    components: Vec<ScalarField>,
}

impl MatrixField {
    pub fn new(grid: &Grid, components: Vec<ScalarField>) -> Result<Self> {
        Self::from_components(grid, components)
    }

    /// Constant matrix field from a row-major `dim × dim` array.
    pub fn constant(grid: &Grid, entries: &[f64]) -> Result<Self> {
        let n = grid.dim();
        if entries.len() != n * n {
            return Err(Error::ShapeMismatch { expected: n * n, found: entries.len() });
        }
        let comps = entries.iter().map(|&v| ScalarField::constant(grid, v)).collect();
        Self::from_components(grid, comps)
    }

    pub fn dim(&self) -> usize {
        self.grid.dim()
    }

    pub fn get(&self, i: usize, j: usize) -> &ScalarField {
        &self.components[i * self.grid.dim() + j]
    }

    pub fn get_mut(&mut self, i: usize, j: usize) -> &mut ScalarField {
        let n = self.grid.dim();
        &mut self.components[i * n + j]
    }

    pub fn transpose(&self) -> MatrixField {
        let n = self.grid.dim();
        let comps = (0..n * n).map(|k| self.components[(k % n) * n + k / n].clone()).collect();
        MatrixField { grid: self.grid.clone(), components: comps }
    }

    pub fn trace(&self) -> ScalarField {
        let n = self.grid.dim();
        let mut t = ScalarField::zeros(&self.grid);
        for i in 0..n {
            t.axpy(1.0, self.get(i, i));
        }
        t
    }

    /// Row-major matrix at one grid point.
    pub fn at(&self, idx: usize) -> [f64; 9] {
        let mut m = [0.0; 9];
        for (k, c) in self.components.iter().enumerate() {
            m[k] = c.values[idx];
        }
        m
    }
}

impl Field for MatrixField {
    fn component_count(dim: usize) -> usize {
        dim * dim
    }

    fn grid(&self) -> &Grid {
        &self.grid
    }

    fn components(&self) -> &[ScalarField] {
        &self.components
    }

    fn components_mut(&mut self) -> &mut [ScalarField] {
        &mut self.components
    }

    fn from_components(grid: &Grid, components: Vec<ScalarField>) -> Result<Self> {
        check_components(grid, &components, grid.dim() * grid.dim())?;
        Ok(MatrixField { grid: grid.clone(), components })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng;

    #[test]
    fn round_trip_all_shapes() {
        let grid = Grid::new(2, 16).unwrap();
        let mut r = rng::seeded(11);
        let m = MatrixField::from_components(
            &grid,
            (0..4).map(|_| rng::random_field(&grid, &mut r)).collect(),
        )
        .unwrap();
        let back = MatrixField::from_spectra(&grid, &m.spectra()).unwrap();
        assert!(back.difference(&m).max_abs() <= 1e-12 * m.max_abs());
        let s = m.get(0, 1).clone();
        let back = s.spectrum().to_field();
        assert!(back.difference(&s).max_abs() <= 1e-12 * s.max_abs());
    }

    #[test]
    fn paired_transforms_match_single() {
        let grid = Grid::new(3, 8).unwrap();
        let mut r = rng::seeded(2);
        let a = rng::random_field(&grid, &mut r);
        let b = rng::random_field(&grid, &mut r);
        let paired = spectra_of(&[&a, &b]);
        for (p, f) in paired.iter().zip([&a, &b]) {
            let single = f.spectrum();
            for (x, y) in p.coeffs().iter().zip(single.coeffs()) {
                assert!((x - y).norm() < 1e-15);
            }
        }
    }

    #[test]
    fn parseval() {
        let grid = Grid::new(2, 32).unwrap();
        let mut r = rng::seeded(9);
        let u = rng::random_field(&grid, &mut r);
        let a = u.l2_norm();
        let b = u.spectrum().l2_norm();
        assert!((a - b).abs() <= 1e-12 * a);
    }

    #[test]
    fn single_mode_coefficients() {
        let grid = Grid::new(2, 8).unwrap();
        let u = ScalarField::from_fn(&grid, |x| libm::cos(2.0 * x[0]));
        let s = u.spectrum();
        let mut count = 0;
        for (i, c) in s.coeffs().iter().enumerate() {
            if c.norm() > 1e-14 {
                count += 1;
                assert_eq!(grid.frequency(i)[0].abs(), 2.0);
                assert!((c.re - 0.5).abs() < 1e-14);
            }
        }
        assert_eq!(count, 2);
    }
}
