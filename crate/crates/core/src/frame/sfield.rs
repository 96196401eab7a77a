//! Band-limited periodic profiles in the fiber coordinate `s ∈ [0, 1)`.
//!
//! A profile with `N` modes stores the Fourier coefficients `c_k` for
//! `|k| < N/2` in FFT order. The Nyquist slot is kept at zero so that real
//! profiles have exactly Hermitian-symmetric coefficients and `d/ds` is exact
//! on the retained band.

use std::cell::RefCell;
use std::f64::consts::PI;
use std::ops::{Add, Mul, Neg, Sub};

use num_complex::Complex64;
use rustfft::FftPlanner;

thread_local! {
    static PLANNER: RefCell<FftPlanner<f64>> = RefCell::new(FftPlanner::new());
}

fn fft_forward(buf: &mut [Complex64]) {
    PLANNER.with(|p| p.borrow_mut().plan_fft_forward(buf.len()).process(buf));
}

fn fft_inverse(buf: &mut [Complex64]) {
    PLANNER.with(|p| p.borrow_mut().plan_fft_inverse(buf.len()).process(buf));
}

/// Signed wavenumber of FFT slot `idx` on an `n`-point grid.
pub(crate) fn wavenumber(idx: usize, n: usize) -> i64 {
    if idx < n / 2 {
        idx as i64
    } else {
        idx as i64 - n as i64
    }
}

/// Periodic scalar profile on `s ∈ [0, 1)`.
#[derive(Debug, Clone, PartialEq)]
pub struct SField {
    coeffs: Vec<Complex64>,
}

impl SField {
    /// Zero profile with `n` modes. `n` must be an even number ≥ 4.
    pub fn zeros(n: usize) -> Self {
        assert!(n >= 4 && n % 2 == 0, "SField needs an even mode count >= 4, got {n}");
        Self {
            coeffs: vec![Complex64::new(0.0, 0.0); n],
        }
    }

    pub fn constant(n: usize, value: f64) -> Self {
        let mut f = Self::zeros(n);
        f.coeffs[0] = Complex64::new(value, 0.0);
        f
    }

    /// Builds a profile from coefficients in FFT order; the Nyquist slot is dropped.
    pub fn from_coeffs(mut coeffs: Vec<Complex64>) -> Self {
        let n = coeffs.len();
        assert!(n >= 4 && n % 2 == 0, "SField needs an even mode count >= 4, got {n}");
        coeffs[n / 2] = Complex64::new(0.0, 0.0);
        Self { coeffs }
    }

    /// Interpolates real samples on the uniform grid `s_j = j / N`.
    pub fn from_values(values: &[f64]) -> Self {
        let n = values.len();
        let mut buf: Vec<Complex64> = values.iter().map(|&v| Complex64::new(v, 0.0)).collect();
        fft_forward(&mut buf);
        let scale = 1.0 / n as f64;
        buf.iter_mut().for_each(|c| *c *= scale);
        let mut f = Self::from_coeffs(buf);
        f.symmetrize();
        f
    }

    /// Samples `f` on the collocation grid and interpolates.
    pub fn from_fn(n: usize, f: impl Fn(f64) -> f64) -> Self {
        let values: Vec<f64> = (0..n).map(|j| f(j as f64 / n as f64)).collect();
        Self::from_values(&values)
    }

    /// `amplitude · sin(2π k s)`.
    pub fn sin_mode(n: usize, k: i64, amplitude: f64) -> Self {
        let mut f = Self::zeros(n);
        if amplitude != 0.0 {
            f.set_mode(k, Complex64::new(0.0, -0.5 * amplitude));
            f.set_mode(-k, Complex64::new(0.0, 0.5 * amplitude));
        }
        f
    }

    /// `amplitude · cos(2π k s)`.
    pub fn cos_mode(n: usize, k: i64, amplitude: f64) -> Self {
        let mut f = Self::zeros(n);
        if k == 0 {
            f.coeffs[0] = Complex64::new(amplitude, 0.0);
        } else if amplitude != 0.0 {
            f.set_mode(k, Complex64::new(0.5 * amplitude, 0.0));
            f.set_mode(-k, Complex64::new(0.5 * amplitude, 0.0));
        }
        f
    }

    fn set_mode(&mut self, k: i64, c: Complex64) {
        let n = self.coeffs.len() as i64;
        assert!(k.abs() < n / 2, "mode {k} outside the retained band");
        let idx = k.rem_euclid(n) as usize;
        self.coeffs[idx] = c;
    }

    pub fn mode(&self, k: i64) -> Complex64 {
        let n = self.coeffs.len() as i64;
        if k.abs() >= n / 2 {
            return Complex64::new(0.0, 0.0);
        }
        self.coeffs[k.rem_euclid(n) as usize]
    }

    /// Number of collocation points / coefficient slots.
    pub fn len(&self) -> usize {
        self.coeffs.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn coeffs(&self) -> &[Complex64] {
        &self.coeffs
    }

    /// Zeroes every Fourier coefficient with modulus below `threshold`.
    pub fn filter_below(&self, threshold: f64) -> Self {
        let coeffs = self
            .coeffs
            .iter()
            .map(|c| if c.norm() < threshold { Complex64::new(0.0, 0.0) } else { *c })
            .collect();
        Self { coeffs }
    }

    /// Enforces `c_{-k} = conj(c_k)`, i.e. projects onto real profiles.
    pub fn symmetrize(&mut self) {
        let n = self.coeffs.len();
        self.coeffs[0].im = 0.0;
        for k in 1..n / 2 {
            let a = self.coeffs[k];
            let b = self.coeffs[n - k].conj();
            let avg = (a + b) * 0.5;
            self.coeffs[k] = avg;
            self.coeffs[n - k] = avg.conj();
        }
    }

    /// Largest Hermitian-symmetry defect `|c_{-k} - conj(c_k)|`.
    pub fn hermitian_defect(&self) -> f64 {
        let n = self.coeffs.len();
        let mut worst = self.coeffs[0].im.abs();
        for k in 1..n / 2 {
            worst = worst.max((self.coeffs[n - k] - self.coeffs[k].conj()).norm());
        }
        worst
    }

    fn complex_values_on(&self, m: usize) -> Vec<Complex64> {
        let n = self.coeffs.len();
        let mut buf = vec![Complex64::new(0.0, 0.0); m];
        for (idx, c) in self.coeffs.iter().enumerate() {
            let k = wavenumber(idx, n);
            buf[k.rem_euclid(m as i64) as usize] = *c;
        }
        fft_inverse(&mut buf);
        buf
    }

    /// Real samples on the collocation grid `s_j = j / N`.
    pub fn values(&self) -> Vec<f64> {
        self.complex_values_on(self.coeffs.len())
            .into_iter()
            .map(|c| c.re)
            .collect()
    }

    /// Evaluates the trigonometric interpolant at an arbitrary `s`.
    pub fn eval(&self, s: f64) -> f64 {
        let n = self.coeffs.len();
        self.coeffs
            .iter()
            .enumerate()
            .map(|(idx, c)| {
                let k = wavenumber(idx, n) as f64;
                (c * Complex64::from_polar(1.0, 2.0 * PI * k * s)).re
            })
            .sum()
    }

    /// Exact `d/ds` on the retained band.
    pub fn derivative(&self) -> Self {
        let n = self.coeffs.len();
        let coeffs = self
            .coeffs
            .iter()
            .enumerate()
            .map(|(idx, c)| c * Complex64::new(0.0, 2.0 * PI * wavenumber(idx, n) as f64))
            .collect();
        Self::from_coeffs(coeffs)
    }

    /// De-aliased product: both factors are evaluated on a `2N` grid, multiplied,
    /// and the result is truncated back to the `N`-mode band.
    pub fn product(&self, other: &SField) -> Self {
        let n = self.coeffs.len();
        assert_eq!(n, other.coeffs.len(), "SField mode count mismatch");
        let m = 2 * n;
        let a = self.complex_values_on(m);
        let b = other.complex_values_on(m);
        let mut prod: Vec<Complex64> = a.iter().zip(&b).map(|(x, y)| x * y).collect();
        fft_forward(&mut prod);
        let scale = 1.0 / m as f64;
        let mut coeffs = vec![Complex64::new(0.0, 0.0); n];
        for (idx, slot) in coeffs.iter_mut().enumerate() {
            let k = wavenumber(idx, n);
            if k.unsigned_abs() as usize >= n / 2 {
                continue;
            }
            *slot = prod[k.rem_euclid(m as i64) as usize] * scale;
        }
        Self::from_coeffs(coeffs)
    }

    /// Applies a nonlinear map pointwise on the collocation grid.
    pub fn map_pointwise(&self, f: impl Fn(f64) -> f64) -> Self {
        let v: Vec<f64> = self.values().into_iter().map(f).collect();
        Self::from_values(&v)
    }

    pub fn scale(&self, a: f64) -> Self {
        Self {
            coeffs: self.coeffs.iter().map(|c| c * a).collect(),
        }
    }

    /// Mean value over one period (the `k = 0` coefficient).
    pub fn mean(&self) -> f64 {
        self.coeffs[0].re
    }

    /// Largest absolute sample on the collocation grid.
    pub fn max_abs(&self) -> f64 {
        self.values().into_iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    /// Sum of absolute coefficient moduli; bounds `max_s |f(s)|` from above.
    pub fn coeff_norm(&self) -> f64 {
        self.coeffs.iter().map(|c| c.norm()).sum()
    }

    /// True when every non-constant coefficient is exactly zero.
    pub fn is_constant(&self) -> bool {
        self.coeffs[1..].iter().all(|c| c.re == 0.0 && c.im == 0.0)
    }
}

impl Add for &SField {
    type Output = SField;
    fn add(self, rhs: &SField) -> SField {
        assert_eq!(self.len(), rhs.len(), "SField mode count mismatch");
        SField {
            coeffs: self.coeffs.iter().zip(&rhs.coeffs).map(|(a, b)| a + b).collect(),
        }
    }
}

impl Sub for &SField {
    type Output = SField;
    fn sub(self, rhs: &SField) -> SField {
        assert_eq!(self.len(), rhs.len(), "SField mode count mismatch");
        SField {
            coeffs: self.coeffs.iter().zip(&rhs.coeffs).map(|(a, b)| a - b).collect(),
        }
    }
}

impl Neg for &SField {
    type Output = SField;
    fn neg(self) -> SField {
        SField {
            coeffs: self.coeffs.iter().map(|c| -c).collect(),
        }
    }
}

impl Mul for &SField {
    type Output = SField;
    fn mul(self, rhs: &SField) -> SField {
        self.product(rhs)
    }
}

impl Mul<f64> for &SField {
    type Output = SField;
    fn mul(self, rhs: f64) -> SField {
        self.scale(rhs)
    }
}
