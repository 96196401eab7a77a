use super::{weight_moment, CotangentError, FiberChart};
use num_complex::Complex64;

/// `ω₁ = A(r) p*ω_Σ + B(r) dr∧η` with `A = √(1−r²)`, `B = r/√(1−r²)`.
pub fn omega1(r: f64) -> Result<(f64, f64), CotangentError> {
    if !(r > 0.0 && r < 1.0) {
        return Err(CotangentError::Domain(r));
    }
    let a = (1.0 - r * r).sqrt();
    Ok((a, r / a))
}

/// A Hitchin deformation of frequency `m` (so `n = −m`), with chart value
/// `amplitude` of the holomorphic differential at the base point and
/// normalization `phi`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Deformation {
    pub m: u32,
    pub amplitude: Complex64,
    pub phi: f64,
}

impl Deformation {
    pub fn new(m: u32, amplitude: Complex64, phi: f64) -> Result<Self, CotangentError> {
        if !amplitude.re.is_finite() || !amplitude.im.is_finite() || !phi.is_finite() {
            return Err(CotangentError::NonFinite);
        }
        Ok(Self { m, amplitude, phi })
    }

    /// `Φ_m = 1 / (2 m_{2m−1})`, the value for which the extension
    /// `g̃ = a(r) g` with `r a′ + m a = 2Φ rᵐ/√(1−r²)` is regular at `r = 0`
    /// and equals `g` on the fold `r = 1`.
    pub fn harmonic(m: u32, amplitude: Complex64) -> Result<Self, CotangentError> {
        if m == 0 {
            return Err(CotangentError::InvalidFrequency(0));
        }
        Self::new(m, amplitude, 0.5 / weight_moment(2 * m - 1))
    }

    /// Frequencies `m ≥ 2` move the structure; `m = 0, 1` are trivial.
    pub fn is_hitchin(&self) -> bool {
        self.m >= 2
    }

    /// `g` on the fiber circle: `G e^{−imφ}`.
    pub fn on_fiber(&self, angle: f64) -> Complex64 {
        self.amplitude * Complex64::from_polar(1.0, -(self.m as f64) * angle)
    }

    pub fn scaled(&self, c: f64) -> Self {
        Self {
            amplitude: self.amplitude * c,
            ..*self
        }
    }
}

/// `φ(r) = Φ rᵐ/√(1−r²)`.
pub fn phi_profile(d: &Deformation, r: f64) -> Result<f64, CotangentError> {
    if !(r > 0.0 && r < 1.0) {
        return Err(CotangentError::Domain(r));
    }
    Ok(d.phi * r.powi(d.m as i32) / (1.0 - r * r).sqrt())
}

/// Coefficient of `∂_w` in `ξ = 2iΦ g rᵐ/w̄ ∂_w`.
///
/// With `g = G e^{−imφ}` this is `2iΦG w̄^{m−1}`, which is evaluated directly so
/// that the zero section is only excluded for `m = 0`.
pub fn xi_field(d: &Deformation, r: f64, angle: f64) -> Result<Complex64, CotangentError> {
    if !(r >= 0.0 && r < 1.0) {
        return Err(CotangentError::Domain(r));
    }
    let wbar = Complex64::from_polar(r, -angle);
    let factor = Complex64::new(0.0, 2.0 * d.phi) * d.amplitude;
    if d.m == 0 {
        if r == 0.0 {
            return Err(CotangentError::SingularAtZeroSection);
        }
        return Ok(factor / wbar);
    }
    Ok(factor * wbar.powu(d.m - 1))
}

/// `∂̄g̃ = φ(r) g (dr/r − iη)` as coefficients on `(dr/r, η)`.
pub fn dbar_extension(d: &Deformation, r: f64, angle: f64) -> Result<[Complex64; 2], CotangentError> {
    let c = d.on_fiber(angle) * phi_profile(d, r)?;
    Ok([c, c * Complex64::new(0.0, -1.0)])
}

/// `ι_ξ ω₁` on `(dr/r, η)`. Only the `B dr∧η` part of `ω₁` sees the vertical
/// field, and `ι_{∂_w}(dr∧dφ) = (i/2) e^{−iφ} (dr/r − i dφ)`.
pub fn contract_xi_omega(d: &Deformation, r: f64, angle: f64) -> Result<[Complex64; 2], CotangentError> {
    let (_, b) = omega1(r)?;
    let c = xi_field(d, r, angle)? * b * Complex64::new(0.0, 0.5) * Complex64::from_polar(1.0, -angle);
    Ok([c, c * Complex64::new(0.0, -1.0)])
}

/// `max |∂̄g̃ + ι_ξ ω₁|` over the chart nodes, component-wise on `(dr/r, η)`.
pub fn deformation_identity_residual(d: &Deformation, chart: &FiberChart) -> Result<f64, CotangentError> {
    let mut worst: f64 = 0.0;
    for &r in chart.nodes() {
        for k in 0..chart.angular_len() {
            let angle = chart.angle(k);
            let lhs = dbar_extension(d, r, angle)?;
            let rhs = contract_xi_omega(d, r, angle)?;
            for i in 0..2 {
                worst = worst.max((lhs[i] + rhs[i]).norm());
            }
        }
    }
    Ok(worst)
}

/// `I_k(r) = ∫₀ʳ t^k (1−t²)^{−1/2} dt` for odd `k`, divided by `rᵐ`.
fn scaled_primitive(k: u32, m: u32, r: Complex64) -> Complex64 {
    if r.norm() <= 0.7 {
        // (1−t²)^{−1/2} = Σ c_j t^{2j}, c_j = C(2j, j)/4^j
        let mut sum = Complex64::new(0.0, 0.0);
        let mut c = 1.0;
        let r2 = r * r;
        let mut power = r.powu(k + 1 - m);
        for j in 0..200u32 {
            let term = power * (c / (k + 1 + 2 * j) as f64);
            sum += term;
            if term.norm() < 1e-18 * sum.norm() {
                break;
            }
            c *= (2 * j + 1) as f64 / (2 * j + 2) as f64;
            power *= r2;
        }
        return sum;
    }
    let root = (Complex64::new(1.0, 0.0) - r * r).sqrt();
    let mut i = Complex64::new(1.0, 0.0) - root;
    let mut j = 3;
    while j <= k {
        i = (i * (j - 1) as f64 - r.powu(j - 1) * root) / j as f64;
        j += 2;
    }
    i / r.powu(m)
}

/// The radial factor `a(r) = 2Φ r^{−m} ∫₀ʳ t^{2m−1}/√(1−t²) dt` of `g̃ = a(r) g`,
/// the regular solution of `r a′ + m a = 2φ(r)`; complex arguments are
/// accepted for complex-step differentiation.
pub fn harmonic_extension(d: &Deformation, r: Complex64) -> Result<Complex64, CotangentError> {
    if d.m == 0 {
        return Err(CotangentError::InvalidFrequency(0));
    }
    if !(r.re >= 0.0 && r.re < 1.0) {
        return Err(CotangentError::Domain(r.re));
    }
    if r.re == 0.0 {
        return Ok(Complex64::new(0.0, 0.0));
    }
    Ok(scaled_primitive(2 * d.m - 1, d.m, r) * (2.0 * d.phi))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn omega_values() {
        let (a, b) = omega1(0.6).unwrap();
        assert!((a - 0.8).abs() < 1e-15 && (b - 0.75).abs() < 1e-15);
        let (a, b) = omega1(1e-9).unwrap();
        assert!((a - 1.0).abs() < 1e-15 && b.abs() < 1e-8);
        assert!(omega1(1.0).is_err() && omega1(0.0).is_err() && omega1(-0.5).is_err());
    }

    #[test]
    fn phi_values() {
        let d = Deformation::new(2, Complex64::new(1.0, 0.0), 1.0).unwrap();
        assert!((phi_profile(&d, 0.6).unwrap() - 0.45).abs() < 1e-15);
        let d = Deformation::new(3, Complex64::new(1.0, 0.0), 2.0).unwrap();
        assert!((phi_profile(&d, 0.5).unwrap() - 0.288_675_134_594_812_9).abs() < 1e-15);
    }

    #[test]
    fn xi_values() {
        let d = Deformation::new(2, Complex64::new(1.0, 0.0), 1.0).unwrap();
        let c = xi_field(&d, 0.5, 0.0).unwrap();
        assert!((c - Complex64::new(0.0, 1.0)).norm() < 1e-15);
        let d1 = Deformation::new(1, Complex64::new(0.3, -0.2), 1.5).unwrap();
        let c0 = xi_field(&d1, 0.0, 0.0).unwrap();
        let c1 = xi_field(&d1, 0.7, 2.0).unwrap();
        assert!((c0 - c1).norm() < 1e-15);
        let d0 = Deformation::new(0, Complex64::new(1.0, 0.0), 1.0).unwrap();
        assert_eq!(xi_field(&d0, 0.0, 0.0), Err(CotangentError::SingularAtZeroSection));
        assert!(xi_field(&d0, 0.5, 0.0).is_ok());
    }

    #[test]
    fn extension_boundary_value() {
        for m in 1..=6 {
            let d = Deformation::harmonic(m, Complex64::new(1.0, 0.0)).unwrap();
            let a = harmonic_extension(&d, Complex64::new(1.0 - 1e-12, 0.0)).unwrap();
            assert!((a.re - 1.0).abs() < 1e-5, "m = {m}: {a}");
        }
    }

    #[test]
    fn extension_branches_agree() {
        let d = Deformation::harmonic(3, Complex64::new(1.0, 0.0)).unwrap();
        let below = harmonic_extension(&d, Complex64::new(0.7, 0.0)).unwrap();
        let above = harmonic_extension(&d, Complex64::new(0.7 + 1e-15, 0.0)).unwrap();
        assert!((below - above).norm() < 1e-13);
    }
}
