use super::NahmError;
use crate::frame::{lie_bracket, FormField, FrameError, InvariantVectorField, SField};

const T1: u8 = 0b0010;
const T2: u8 = 0b0100;
const T3: u8 = 0b1000;

/// A coframe `(θ̃¹, θ̃², θ̃³)` on X; `theta[i][k]` is the coefficient of `θᵏ` in `θ̃ⁱ`.
#[derive(Debug, Clone, PartialEq)]
pub struct BryantCoframe {
    pub theta: [[SField; 3]; 3],
    /// The dual frame `(W₁, W₂, W₃)`.
    pub frame: [InvariantVectorField; 3],
}

impl BryantCoframe {
    /// `θ̃ⁱ` as a 1-form.
    pub fn form(&self, i: usize) -> FormField {
        let n = self.theta[i][0].len();
        let mut out = FormField::zero(1, n, None).expect("degree 1");
        for (k, bit) in [T1, T2, T3].into_iter().enumerate() {
            out.set_component(0, bit, self.theta[i][k].clone());
        }
        out
    }

    /// Largest defect among `β₂ = −θ̃¹∧θ̃³`, `β₃ = θ̃¹∧θ̃²`, `dθ̃¹ = θ̃²∧θ̃³`.
    pub fn defect(&self, beta2: &FormField, beta3: &FormField) -> Result<f64, FrameError> {
        use crate::frame::{exterior_derivative, wedge};
        let [t1, t2, t3] = [self.form(0), self.form(1), self.form(2)];
        let r2 = wedge(&t1, &t3)?.scale(-1.0).sub(beta2)?.max_abs();
        let r3 = wedge(&t1, &t2)?.sub(beta3)?.max_abs();
        let r1 = exterior_derivative(&t1)?.sub(&wedge(&t2, &t3)?)?.max_abs();
        Ok(r1.max(r2).max(r3))
    }
}

/// The field `B` with `ι_B(θ¹∧θ²∧θ³) = β`, i.e. the kernel of a 2-form on X
/// with its natural scale.
fn kernel_field(beta: &FormField) -> InvariantVectorField {
    InvariantVectorField::new(
        beta.component(0, T2 | T3),
        beta.component(0, T1 | T3).scale(-1.0),
        beta.component(0, T1 | T2),
    )
}

fn det3(m: [[&SField; 3]; 3]) -> SField {
    let minor = |a: usize, b: usize| &(m[1][a] * m[2][b]) - &(m[1][b] * m[2][a]);
    let t0 = m[0][0] * &minor(1, 2);
    let t1 = m[0][1] * &minor(0, 2);
    let t2 = m[0][2] * &minor(0, 1);
    &(&t0 - &t1) + &t2
}

fn volume(a: &InvariantVectorField, b: &InvariantVectorField, c: &InvariantVectorField) -> SField {
    det3([a.components(), b.components(), c.components()])
}

/// Recovers `(θ̃¹, θ̃², θ̃³)` from `β₂ = i*ω₂`, `β₃ = i*ω₃`.
///
/// The kernels `B₂, B₃` of `β₂, β₃` are rescaled by a common factor `ν(s)`,
/// `W₁ = −[W₂, W₃]`, and `θ̃` is the dual coframe of `(W₁, W₂, W₃)`.
/// Matching `β₂ = −θ̃¹∧θ̃³` forces `ν³ = −1 / θ¹²³([B₂,B₃], B₂, B₃)`, which
/// has a single real root.
pub fn bryant_normalize(beta2: &FormField, beta3: &FormField) -> Result<BryantCoframe, NahmError> {
    for b in [beta2, beta3] {
        if b.degree() != 2 {
            return Err(FrameError::DegreeMismatch { left: b.degree(), right: 2 }.into());
        }
        if b.axis().is_some() {
            return Err(FrameError::GridMismatch.into());
        }
    }
    if beta2.modes() != beta3.modes() {
        return Err(FrameError::GridMismatch.into());
    }
    let b2 = kernel_field(beta2);
    let b3 = kernel_field(beta3);
    let tiny = 1e-12;
    if b2.max_abs() < tiny || b3.max_abs() < tiny {
        return Err(NahmError::DegenerateKernel);
    }
    let reeb = lie_bracket(&b2, &b3);
    let det = volume(&reeb, &b2, &b3).values();
    let scale = b2.max_abs() * b3.max_abs();
    let min_det = det.iter().fold(f64::INFINITY, |m, v| m.min(v.abs()));
    if !(min_det > 1e-9 * scale * scale) {
        return Err(NahmError::NonContact { min_det });
    }
    let nu = SField::from_values(&det.iter().map(|d| (-1.0 / d).cbrt()).collect::<Vec<_>>());
    let w2 = InvariantVectorField::new(&nu * &b2.f, &nu * &b2.g, &nu * &b2.h);
    let w3 = InvariantVectorField::new(&nu * &b3.f, &nu * &b3.g, &nu * &b3.h);
    let w1 = lie_bracket(&w2, &w3).scale(-1.0);
    let frame = [w1, w2, w3];

    let n = nu.len();
    let vals: Vec<[Vec<f64>; 3]> = frame
        .iter()
        .map(|w| [w.f.values(), w.g.values(), w.h.values()])
        .collect();
    let mut theta_vals = vec![vec![vec![0.0; n]; 3]; 3];
    for j in 0..n {
        let a = nalgebra::Matrix3::from_fn(|i, k| vals[i][k][j]);
        let inv = a.try_inverse().ok_or(NahmError::NonContact { min_det: 0.0 })?;
        for i in 0..3 {
            for k in 0..3 {
                theta_vals[i][k][j] = inv[(k, i)];
            }
        }
    }
    let theta = std::array::from_fn(|i| std::array::from_fn(|k| SField::from_values(&theta_vals[i][k])));
    Ok(BryantCoframe { theta, frame })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::frame::Coframe;

    const N: usize = 16;

    fn two(a: Coframe, b: Coframe, c: f64) -> FormField {
        FormField::basis(N, &[a, b]).unwrap().scale(c)
    }

    #[test]
    fn identity_datum() {
        let b2 = two(Coframe::Theta1, Coframe::Theta3, -1.0);
        let b3 = two(Coframe::Theta1, Coframe::Theta2, 1.0);
        let cf = bryant_normalize(&b2, &b3).unwrap();
        for i in 0..3 {
            for k in 0..3 {
                let want = if i == k { 1.0 } else { 0.0 };
                assert!((cf.theta[i][k].values()[3] - want).abs() < 1e-14);
            }
        }
        assert!(cf.defect(&b2, &b3).unwrap() < 1e-14);
    }

    #[test]
    fn constant_scale() {
        let c: f64 = 1.7;
        let b2 = two(Coframe::Theta1, Coframe::Theta3, -c * c);
        let b3 = two(Coframe::Theta1, Coframe::Theta2, c * c);
        let cf = bryant_normalize(&b2, &b3).unwrap();
        assert!(cf.defect(&b2, &b3).unwrap() < 1e-12);
        assert!((cf.theta[0][0].mean() - c.powf(4.0 / 3.0)).abs() < 1e-12);
        assert!((cf.theta[1][1].mean() - c.powf(2.0 / 3.0)).abs() < 1e-12);
    }

    #[test]
    fn coinciding_kernels_rejected() {
        let b = two(Coframe::Theta1, Coframe::Theta3, -1.0);
        assert!(matches!(bryant_normalize(&b, &b), Err(NahmError::NonContact { .. })));
    }

    #[test]
    fn zero_form_rejected() {
        let z = FormField::zero(2, N, None).unwrap();
        let b3 = two(Coframe::Theta1, Coframe::Theta2, 1.0);
        assert_eq!(bryant_normalize(&z, &b3), Err(NahmError::DegenerateKernel));
    }

    #[test]
    fn s_dependent_kernels() {
        // B₂ = X₂ + p X₃, B₃ = X₃ + q X₁ — both volume preserving, so β₂, β₃ are closed.
        const N: usize = 64;
        let p = SField::sin_mode(N, 1, 0.2);
        let q = SField::cos_mode(N, 1, 0.03);
        let one = SField::constant(N, 1.0);
        let zero = SField::zeros(N);
        let b2f = InvariantVectorField::new(zero.clone(), one.clone(), p);
        let b3f = InvariantVectorField::new(q, zero, one);
        let contract = |b: &InvariantVectorField| {
            let mut out = FormField::zero(2, N, None).unwrap();
            out.set_component(0, T2 | T3, b.f.clone());
            out.set_component(0, T1 | T3, b.g.scale(-1.0));
            out.set_component(0, T1 | T2, b.h.clone());
            out
        };
        let b2 = contract(&b2f);
        let b3 = contract(&b3f);
        let cf = bryant_normalize(&b2, &b3).unwrap();
        assert!(cf.defect(&b2, &b3).unwrap() < 1e-10, "{}", cf.defect(&b2, &b3).unwrap());
    }
}
