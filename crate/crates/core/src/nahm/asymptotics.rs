use super::{HKTriple, NahmError, Trajectory};
use crate::frame::{monomials, SField};
use crate::numerics::{loglog_slope, polyfit_powers};
use nalgebra::{Matrix3, Matrix4};

/// `J_a e⁰ = QUATERNION_SIGNS[a] · eᵃ` on the flat model.
pub const QUATERNION_SIGNS: [f64; 3] = [1.0, 1.0, 1.0];

/// Minimum number of samples in `(0, x_max/2]` used by the fits.
const MIN_POINTS: usize = 8;

/// Remainders below this are treated as exact zeros.
const EXACT: f64 = 1e-13;

/// Near-fold behaviour of a reconstructed triple.
#[derive(Debug, Clone, PartialEq)]
pub struct FoldReport {
    /// Per s-collocation point, `μ(x) ≈ c₁x + c₃x³` on `[−x_max/2, x_max/2]`.
    pub mu_c1: Vec<f64>,
    pub mu_c3: Vec<f64>,
    /// `max_s |μ(0, s)|`.
    pub mu_at_fold: f64,
    /// `max |μ(x) + μ(−x)|`.
    pub mu_odd_defect: f64,
    /// `(x, ‖V₁(x) − xX̃₁‖∞)` for sampled `x > 0`.
    pub v1_remainder: Vec<(f64, f64)>,
    pub v1_exponent: Option<f64>,
    /// `(x, max |ω_a − J ω_a^model|)` in the `e`-basis.
    pub omega_remainder: Vec<(f64, f64)>,
    pub omega_exponent: Option<f64>,
    /// `(x, max |J_a e⁰ − eᵃ|)`.
    pub quaternion_defect: Vec<(f64, f64)>,
    pub quaternion_exponent: Option<f64>,
}

fn exponent(samples: &[(f64, f64)]) -> Option<f64> {
    if samples.iter().all(|&(_, r)| r < EXACT) {
        return None;
    }
    let (xs, ys): (Vec<f64>, Vec<f64>) = samples.iter().filter(|&&(_, r)| r >= EXACT).copied().unzip();
    if xs.len() < 3 {
        return None;
    }
    loglog_slope(&xs, &ys)
}

fn two_form_matrix(values: &[(u8, f64)]) -> Matrix4<f64> {
    let mut m = Matrix4::zeros();
    for &(mask, c) in values {
        let i = mask.trailing_zeros() as usize;
        let j = 7 - (mask.leading_zeros() as usize);
        m[(i, j)] = c;
        m[(j, i)] = -c;
    }
    m
}

/// Flat-model forms `x(e⁰∧eᵃ + eᵇ∧eᶜ)` in the `e`-basis.
fn model_forms() -> [Matrix4<f64>; 3] {
    let (e01, e23, e02, e13, e03, e12) = (0b0011, 0b1100, 0b0101, 0b1010, 0b1001, 0b0110);
    [
        two_form_matrix(&[(e01, 1.0), (e23, 1.0)]),
        two_form_matrix(&[(e02, 1.0), (e13, -1.0)]),
        two_form_matrix(&[(e03, 1.0), (e12, 1.0)]),
    ]
}

/// Compares the triple near `x = 0` with the flat model attached to the fold
/// data `(X̃₁, V₂(0), V₃(0))`, `X̃₁ = −[V₂(0), V₃(0)]`.
///
/// With `θ̂` the coframe dual to the fold data, `J = θ¹²³(X̃₁, V₂(0), V₃(0))`,
/// and `e = (dx, x⁻¹θ̂¹, θ̂², θ̂³)`, the leading terms are
/// `μ ≈ Jx`, `g ≈ Jx Σ (eⁱ)²`, `ω_a ≈ Jx(e⁰∧eᵃ + eᵇ∧eᶜ)`.
pub fn fold_asymptotics(traj: &Trajectory, hk: &HKTriple) -> Result<FoldReport, NahmError> {
    let fold = traj.fold_index().ok_or(NahmError::AsymmetricRange)?;
    let last = traj.len() - 1;
    if fold == 0 || last - fold != fold {
        return Err(NahmError::AsymmetricRange);
    }
    let x_max = traj.states[last].x;
    let window: Vec<usize> = (fold + 1..=last)
        .filter(|&i| traj.states[i].x <= 0.5 * x_max + 1e-12)
        .collect();
    if window.len() < MIN_POINTS {
        return Err(NahmError::InsufficientResolution {
            points: window.len(),
            needed: MIN_POINTS,
        });
    }
    let n = traj.modes();

    // μ fits and parity.
    let mu_vals: Vec<Vec<f64>> = hk.mu.iter().map(SField::values).collect();
    let near: Vec<usize> = (fold - window.len()..=fold + window.len()).collect();
    let xs: Vec<f64> = near.iter().map(|&i| traj.states[i].x).collect();
    let mut mu_c1 = Vec::with_capacity(n);
    let mut mu_c3 = Vec::with_capacity(n);
    for j in 0..n {
        let ys: Vec<f64> = near.iter().map(|&i| mu_vals[i][j]).collect();
        let c = polyfit_powers(&xs, &ys, &[1, 3])
            .ok_or(NahmError::InsufficientResolution { points: xs.len(), needed: MIN_POINTS })?;
        mu_c1.push(c[0]);
        mu_c3.push(c[1]);
    }
    let mu_at_fold = hk.mu[fold].max_abs();
    let mu_odd_defect = (1..=fold)
        .map(|k| (&hk.mu[fold + k] + &hk.mu[fold - k]).max_abs())
        .fold(0.0, f64::max);

    // Fold data.
    let v0 = &traj.states[fold].v;
    let reeb = traj.states[fold].reeb_field();
    let data = [&reeb, &v0[1], &v0[2]];
    let data_vals: Vec<[Vec<f64>; 3]> = data.iter().map(|w| [w.f.values(), w.g.values(), w.h.values()]).collect();
    let mut p_mats = Vec::with_capacity(n);
    let mut jac = Vec::with_capacity(n);
    for j in 0..n {
        // P[k][i] = θᵏ(Ŵᵢ)
        let p = Matrix3::from_fn(|k, i| data_vals[i][k][j]);
        let det = p.determinant();
        if det.abs() < 1e-12 {
            return Err(NahmError::SingularFrame { x: 0.0, min_mu: det.abs() });
        }
        p_mats.push(p);
        jac.push(det);
    }

    let mut v1_remainder = Vec::with_capacity(window.len());
    let mut omega_remainder = Vec::with_capacity(window.len());
    let mut quaternion_defect = Vec::with_capacity(window.len());
    let masks = monomials(2);
    let model = model_forms();
    for &ix in &window {
        let x = traj.states[ix].x;
        v1_remainder.push((x, traj.states[ix].v[0].axpy(-x, &reeb).max_abs()));

        let metric = hk.metric[ix]
            .as_ref()
            .ok_or(NahmError::SingularFrame { x, min_mu: 0.0 })?;
        let omega_vals: Vec<Vec<(u8, Vec<f64>)>> = hk
            .omega
            .iter()
            .map(|w| masks.iter().map(|&m| (m, w.component(ix, m).values())).collect())
            .collect();
        let mut worst_omega: f64 = 0.0;
        let mut worst_quat: f64 = 0.0;
        for j in 0..n {
            let mut q = Matrix4::zeros();
            q[(0, 0)] = 1.0;
            q.fixed_view_mut::<3, 3>(1, 1).copy_from(&p_mats[j]);
            let d = Matrix4::from_diagonal(&nalgebra::Vector4::new(1.0, x, 1.0, 1.0));
            let qd = q * d;
            let g = Matrix4::from(metric.at(j));
            let g_e = qd.transpose() * g * qd;
            let g_inv = g_e
                .try_inverse()
                .ok_or(NahmError::SingularFrame { x, min_mu: 0.0 })?;
            for a in 0..3 {
                let entries: Vec<(u8, f64)> = omega_vals[a].iter().map(|(m, v)| (*m, v[j])).collect();
                let om = two_form_matrix(&entries);
                let om_e = qd.transpose() * om * qd;
                let diff = om_e - model[a] * (jac[j] * x);
                worst_omega = worst_omega.max(diff.amax());
                let j0 = (g_inv * om_e).row(0).into_owned();
                for b in 0..4 {
                    let want = if b == a + 1 { QUATERNION_SIGNS[a] } else { 0.0 };
                    worst_quat = worst_quat.max((j0[b] - want).abs());
                }
            }
        }
        omega_remainder.push((x, worst_omega));
        quaternion_defect.push((x, worst_quat));
    }

    Ok(FoldReport {
        mu_c1,
        mu_c3,
        mu_at_fold,
        mu_odd_defect,
        v1_exponent: exponent(&v1_remainder),
        omega_exponent: exponent(&omega_remainder),
        quaternion_exponent: exponent(&quaternion_defect),
        v1_remainder,
        omega_remainder,
        quaternion_defect,
    })
}
