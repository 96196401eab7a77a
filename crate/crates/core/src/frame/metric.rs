//! Pointwise 2-tensors in the coframe `(dx, θ¹, θ², θ³)` and the inhomogeneous
//! dilations `h_t(x, x¹, x², x³) = (tx, t²x¹, tx², tx³)`.

use super::FrameError;

/// Components `T_ij = T(E_i, E_j)` against the frame dual to `(dx, θ¹, θ², θ³)`.
///
/// Symmetric for metrics, antisymmetric for 2-forms (`ω = Σ_{i<j} T_ij e^i∧e^j`).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Tensor2 {
    pub c: [[f64; 4]; 4],
}

impl Tensor2 {
    pub fn zero() -> Self {
        Self { c: [[0.0; 4]; 4] }
    }

    pub fn diag(d: [f64; 4]) -> Self {
        let mut t = Self::zero();
        for i in 0..4 {
            t.c[i][i] = d[i];
        }
        t
    }

    /// Antisymmetric tensor from `(i, j, value)` entries with `i < j`.
    pub fn two_form(entries: &[(usize, usize, f64)]) -> Self {
        let mut t = Self::zero();
        for &(i, j, v) in entries {
            t.c[i][j] += v;
            t.c[j][i] -= v;
        }
        t
    }

    pub fn scale(&self, a: f64) -> Self {
        let mut t = *self;
        t.c.iter_mut().flatten().for_each(|v| *v *= a);
        t
    }

    pub fn max_abs_diff(&self, other: &Tensor2) -> f64 {
        self.c
            .iter()
            .flatten()
            .zip(other.c.iter().flatten())
            .fold(0.0, |m, (a, b)| m.max((a - b).abs()))
    }

    pub fn is_symmetric(&self) -> bool {
        (0..4).all(|i| (0..4).all(|j| self.c[i][j] == self.c[j][i]))
    }
}

/// A point of `ℝ × X` in the coordinates the s-dependent class sees.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CoframePoint {
    pub x: f64,
    pub s: f64,
}

/// `g₀ = x(dx² + (θ²)² + (θ³)²) + x⁻¹(θ¹)²`.
pub fn model_metric_g0(x: f64) -> Result<Tensor2, FrameError> {
    if x == 0.0 || !x.is_finite() {
        return Err(FrameError::FoldLocus { x });
    }
    Ok(Tensor2::diag([x, 1.0 / x, x, x]))
}

/// The three Kähler forms of the flat model:
/// `ω₁ = dx∧θ¹ + x θ²∧θ³`, `ω₂ = x dx∧θ² − θ¹∧θ³`, `ω₃ = x dx∧θ³ + θ¹∧θ²`.
pub fn model_kahler_forms(x: f64) -> [Tensor2; 3] {
    [
        Tensor2::two_form(&[(0, 1, 1.0), (2, 3, x)]),
        Tensor2::two_form(&[(0, 2, x), (1, 3, -1.0)]),
        Tensor2::two_form(&[(0, 3, x), (1, 2, 1.0)]),
    ]
}

/// Pullback weights of the coframe under `h_t`: `dx → t dx`, `θ¹ → t²θ¹`,
/// `θ² → tθ²`, `θ³ → tθ³`.
pub fn dilation_weights(t: f64) -> [f64; 4] {
    [t, t * t, t, t]
}

/// `(h_t^* T)_p` for a tensor field `T` whose coefficients depend on `(x, s)`.
///
/// Since `s` is the coordinate `x²`, `h_t` moves `(x, s)` to `(tx, ts)`.
pub fn dilation_pullback<F>(t: f64, field: F, p: CoframePoint) -> Result<Tensor2, FrameError>
where
    F: Fn(CoframePoint) -> Result<Tensor2, FrameError>,
{
    if t <= 0.0 || !t.is_finite() {
        return Err(FrameError::NonPositiveDilation { t });
    }
    let image = field(CoframePoint { x: t * p.x, s: t * p.s })?;
    let w = dilation_weights(t);
    let mut out = Tensor2::zero();
    for i in 0..4 {
        for j in 0..4 {
            out.c[i][j] = w[i] * w[j] * image.c[i][j];
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn g0_field(p: CoframePoint) -> Result<Tensor2, FrameError> {
        model_metric_g0(p.x)
    }

    #[test]
    fn g0_values() {
        assert_eq!(model_metric_g0(1.0).unwrap(), Tensor2::diag([1.0; 4]));
        assert_eq!(model_metric_g0(4.0).unwrap(), Tensor2::diag([4.0, 0.25, 4.0, 4.0]));
        assert_eq!(model_metric_g0(0.0), Err(FrameError::FoldLocus { x: 0.0 }));
        assert!(model_metric_g0(0.3).unwrap().is_symmetric());
    }

    #[test]
    fn identity_dilation() {
        let p = CoframePoint { x: 0.7, s: 0.2 };
        let pulled = dilation_pullback(1.0, g0_field, p).unwrap();
        assert_eq!(pulled, model_metric_g0(0.7).unwrap());
    }

    #[test]
    fn g0_scales_by_t_cubed() {
        let p = CoframePoint { x: 1.0, s: 0.0 };
        let pulled = dilation_pullback(2.0, g0_field, p).unwrap();
        let expected = model_metric_g0(1.0).unwrap().scale(8.0);
        assert!(pulled.max_abs_diff(&expected) < 1e-14);
    }

    #[test]
    fn model_forms_scale_by_t_cubed() {
        let t = 0.5;
        for x in [0.01, 0.1, 0.9] {
            for a in 0..3 {
                let pulled = dilation_pullback(t, |q| Ok(model_kahler_forms(q.x)[a]), CoframePoint { x, s: 0.3 })
                    .unwrap();
                let expected = model_kahler_forms(x)[a].scale(t * t * t);
                assert!(pulled.max_abs_diff(&expected) < 1e-15);
            }
        }
    }

    #[test]
    fn non_positive_dilation_rejected() {
        let p = CoframePoint { x: 1.0, s: 0.0 };
        assert!(matches!(
            dilation_pullback(0.0, g0_field, p),
            Err(FrameError::NonPositiveDilation { .. })
        ));
        assert!(dilation_pullback(-1.0, g0_field, p).is_err());
    }
}
