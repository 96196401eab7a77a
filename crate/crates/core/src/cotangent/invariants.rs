use super::{contract_xi_omega, harmonic_extension, omega1, CotangentError, Deformation, FiberChart};
use num_complex::Complex64;
use rustfft::FftPlanner;

/// A fiber 2-form `F(r, φ) dr∧dφ` sampled at the chart nodes.
///
/// Radial integrals treat `F √(1−r²)` as the smooth part, matching the
/// `(1−r²)^{−1/2}` blow-up of `ω₁` at the fold.
#[derive(Debug, Clone, PartialEq)]
pub struct FiberForm {
    chart: FiberChart,
    /// `values[j][k] = F(r_j, φ_k)`.
    values: Vec<Vec<Complex64>>,
}

impl FiberForm {
    pub fn from_fn(chart: &FiberChart, mut f: impl FnMut(f64, f64) -> Complex64) -> Self {
        let values = chart
            .nodes()
            .iter()
            .map(|&r| (0..chart.angular_len()).map(|k| f(r, chart.angle(k))).collect())
            .collect();
        Self {
            chart: chart.clone(),
            values,
        }
    }

    /// The fiber part `B(r) dr∧η` of the standard `ω₁`.
    pub fn standard(chart: &FiberChart) -> Self {
        Self::from_fn(chart, |r, _| Complex64::new(omega1(r).expect("chart nodes lie in (0,1)").1, 0.0))
    }

    pub fn chart(&self) -> &FiberChart {
        &self.chart
    }

    pub fn value(&self, j: usize, k: usize) -> Complex64 {
        self.values[j][k]
    }

    /// `self + c · other`.
    pub fn axpy(&self, c: Complex64, other: &FiberForm) -> Result<FiberForm, CotangentError> {
        if self.chart != other.chart {
            return Err(CotangentError::InvalidGrid("forms live on different charts".into()));
        }
        let values = self
            .values
            .iter()
            .zip(&other.values)
            .map(|(a, b)| a.iter().zip(b).map(|(x, y)| x + c * y).collect())
            .collect();
        Ok(FiberForm {
            chart: self.chart.clone(),
            values,
        })
    }
}

/// `p_n = ∫ wⁿ F dr∧dφ` over the unit disc: angular FFT on each ring, then the
/// radial Gauss rule.
pub fn invariant_polynomial(form: &FiberForm, n: i64) -> Result<Complex64, CotangentError> {
    if n <= 0 {
        return Err(CotangentError::InvalidFrequency(n));
    }
    let chart = &form.chart;
    let na = chart.angular_len();
    let fft = FftPlanner::new().plan_fft_forward(na);
    // forward FFT carries e^{−2πi jk/N}; e^{+inφ} sits at index N − n mod N
    let idx = (na - (n as usize % na)) % na;
    let mut total = Complex64::new(0.0, 0.0);
    for (j, (&r, &w)) in chart.nodes().iter().zip(chart.weights()).enumerate() {
        let mut ring = form.values[j].clone();
        fft.process(&mut ring);
        let angular = ring[idx] * (2.0 * std::f64::consts::PI / na as f64);
        total += angular * (w * (1.0 - r * r).sqrt() * r.powi(n as i32));
    }
    Ok(total)
}

/// `−(dw/w)∧η₁` with `η₁ = −Σ ι_ξ ω₁` over the given deformations.
///
/// For `η₁ = a dr/r + b dφ`, `−(dw/w)∧η₁ = (i a − b)/r dr∧dφ`.
pub fn variation_form(ds: &[Deformation], chart: &FiberChart) -> Result<FiberForm, CotangentError> {
    let mut err = None;
    let form = FiberForm::from_fn(chart, |r, angle| {
        let mut eta = [Complex64::new(0.0, 0.0); 2];
        for d in ds {
            match contract_xi_omega(d, r, angle) {
                Ok(c) => {
                    eta[0] -= c[0];
                    eta[1] -= c[1];
                }
                Err(e) => err = Some(e),
            }
        }
        (Complex64::i() * eta[0] - eta[1]) / r
    });
    match err {
        Some(e) => Err(e),
        None => Ok(form),
    }
}

/// `ṗ_n = −∫ wⁿ (dw/w)∧η₁` for `n = 1..=nmax`.
pub fn variation_of_invariants(
    ds: &[Deformation],
    chart: &FiberChart,
    nmax: u32,
) -> Result<Vec<Complex64>, CotangentError> {
    if nmax == 0 {
        return Err(CotangentError::InvalidFrequency(0));
    }
    if let Some(d) = ds.iter().find(|d| d.m > nmax) {
        return Err(CotangentError::FrequencyOutOfRange { m: d.m, nmax });
    }
    let form = variation_form(ds, chart)?;
    (1..=nmax as i64).map(|n| invariant_polynomial(&form, n)).collect()
}

/// `d(g̃ dw/w)` with `g̃ = a(r) g` built from the closed-form radial factor;
/// `∂_r a` is taken by complex-step differentiation.
///
/// For `g̃(r, φ)`, `d(g̃ dw/w) = (i ∂_r g̃ − ∂_φ g̃ / r) dr∧dφ`.
pub fn extension_variation_form(d: &Deformation, chart: &FiberChart) -> Result<FiberForm, CotangentError> {
    const STEP: f64 = 1e-30;
    let mut err = None;
    let form = FiberForm::from_fn(chart, |r, angle| {
        let a = harmonic_extension(d, Complex64::new(r, 0.0));
        let da = harmonic_extension(d, Complex64::new(r, STEP));
        match (a, da) {
            (Ok(a), Ok(da)) => {
                let g = d.on_fiber(angle);
                let g_r = g * (da.im / STEP);
                let g_phi = g * a.re * Complex64::new(0.0, -(d.m as f64));
                Complex64::i() * g_r - g_phi / r
            }
            (Err(e), _) | (_, Err(e)) => {
                err = Some(e);
                Complex64::new(0.0, 0.0)
            }
        }
    });
    match err {
        Some(e) => Err(e),
        None => Ok(form),
    }
}

/// Centered finite-ε slope of `p_n(ω₁ + ε d(g̃ dw/w))`.
pub fn finite_variation_slope(
    d: &Deformation,
    chart: &FiberChart,
    n: i64,
    epsilon: f64,
) -> Result<Complex64, CotangentError> {
    let base = FiberForm::standard(chart);
    let delta = extension_variation_form(d, chart)?;
    let plus = invariant_polynomial(&base.axpy(Complex64::new(epsilon, 0.0), &delta)?, n)?;
    let minus = invariant_polynomial(&base.axpy(Complex64::new(-epsilon, 0.0), &delta)?, n)?;
    Ok((plus - minus) / (2.0 * epsilon))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cotangent::weight_moment;
    use std::f64::consts::PI;

    fn chart() -> FiberChart {
        FiberChart::new(64, 64).unwrap()
    }

    #[test]
    fn standard_invariants_vanish() {
        let f = FiberForm::standard(&chart());
        for n in 1..=6 {
            assert!(invariant_polynomial(&f, n).unwrap().norm() < 1e-12);
        }
        assert!(invariant_polynomial(&f, 0).is_err());
    }

    #[test]
    fn variation_closed_form() {
        // ṗ_m = 4πi Φ G m_{2m−1}
        let c = chart();
        let g = Complex64::new(0.7, -0.4);
        let d = Deformation::new(3, g, 1.3).unwrap();
        let v = variation_of_invariants(&[d], &c, 6).unwrap();
        let want = Complex64::new(0.0, 4.0 * PI * 1.3 * weight_moment(5)) * g;
        assert!((v[2] - want).norm() < 1e-12, "{} vs {want}", v[2]);
        for (i, x) in v.iter().enumerate() {
            if i != 2 {
                assert!(x.norm() < 1e-12);
            }
        }
    }

    #[test]
    fn extension_form_matches_variation_form() {
        let c = chart();
        let d = Deformation::harmonic(2, Complex64::new(1.0, 0.5)).unwrap();
        let a = variation_form(&[d], &c).unwrap();
        let b = extension_variation_form(&d, &c).unwrap();
        for j in 0..c.radial_len() {
            for k in 0..c.angular_len() {
                let scale = (1.0 - c.nodes()[j].powi(2)).sqrt();
                assert!((a.value(j, k) - b.value(j, k)).norm() * scale < 1e-11);
            }
        }
    }
}
