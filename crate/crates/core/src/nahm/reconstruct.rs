use super::{NahmError, Trajectory};
use crate::frame::{exterior_derivative, wedge, FormField, InvariantVectorField, SField, XAxis};

const DX: u8 = 0b0001;
const T1: u8 = 0b0010;
const T2: u8 = 0b0100;
const T3: u8 = 0b1000;

/// `ι_V(θ¹∧θ²∧θ³) = f θ²∧θ³ − g θ¹∧θ³ + h θ¹∧θ²` as coefficients on `(θ²³, θ¹³, θ¹²)`.
fn contraction_coeffs(v: &InvariantVectorField) -> [(u8, SField); 3] {
    [(T2 | T3, v.f.clone()), (T1 | T3, v.g.scale(-1.0)), (T1 | T2, v.h.clone())]
}

/// `ι_V(θ¹∧θ²∧θ³)` as an x-independent 2-form.
pub fn contract_volume(v: &InvariantVectorField) -> FormField {
    let mut out = FormField::zero(2, v.modes(), None).expect("degree 2");
    for (mask, c) in contraction_coeffs(v) {
        out.set_component(0, mask, c);
    }
    out
}

/// Cofactor matrix of the 3×3 coefficient matrix `M_ij = θ^j(V_i)`.
fn cofactors(v: &[InvariantVectorField; 3]) -> [[SField; 3]; 3] {
    let m = |i: usize, j: usize| -> &SField { v[i].components()[j] };
    let minor = |i: usize, j: usize| -> SField {
        let r: Vec<usize> = (0..3).filter(|&k| k != i).collect();
        let c: Vec<usize> = (0..3).filter(|&k| k != j).collect();
        &(m(r[0], c[0]) * m(r[1], c[1])) - &(m(r[0], c[1]) * m(r[1], c[0]))
    };
    std::array::from_fn(|i| {
        std::array::from_fn(|j| {
            let mi = minor(i, j);
            if (i + j) % 2 == 0 {
                mi
            } else {
                mi.scale(-1.0)
            }
        })
    })
}

fn determinant(v: &[InvariantVectorField; 3], cof: &[[SField; 3]; 3]) -> SField {
    let row = v[0].components();
    &(&(row[0] * &cof[0][0]) + &(row[1] * &cof[0][1])) + &(row[2] * &cof[0][2])
}

/// `μ = υ(V₁, V₂, V₃) = det M` at every trajectory sample.
pub fn conformal_factor(traj: &Trajectory) -> Vec<SField> {
    traj.states
        .iter()
        .map(|s| determinant(&s.v, &cofactors(&s.v)))
        .collect()
}

/// Symmetric metric components in the coframe `(dx, θ¹, θ², θ³)`.
#[derive(Debug, Clone, PartialEq)]
pub struct MetricField {
    pub comps: [[SField; 4]; 4],
}

impl MetricField {
    /// Components at one collocation point `s_j = j / N`.
    pub fn at(&self, j: usize) -> [[f64; 4]; 4] {
        let vals: Vec<Vec<Vec<f64>>> = self
            .comps
            .iter()
            .map(|row| row.iter().map(|c| c.values()).collect())
            .collect();
        std::array::from_fn(|a| std::array::from_fn(|b| vals[a][b][j]))
    }
}

/// The folded hyperkähler triple on the trajectory's x-grid.
#[derive(Debug, Clone, PartialEq)]
pub struct HKTriple {
    pub axis: XAxis,
    pub mu: Vec<SField>,
    pub omega: [FormField; 3],
    /// `None` at the fold sample, where the metric degenerates.
    pub metric: Vec<Option<MetricField>>,
}

/// Builds `ω_a = μ(v⁰∧vᵃ + vᵇ∧vᶜ)` and `g = μ Σ (vⁱ)²` from the dual coframe
/// `(v⁰ = dx, v¹, v², v³)` of `(∂ₓ, V₁, V₂, V₃)`.
///
/// Writing `μ vᵃ` through cofactors and `μ vᵇ∧vᶜ = ι_{V_a}(θ¹∧θ²∧θ³)` makes
/// the forms polynomial in the coefficients, so they are evaluated on the whole
/// grid including `x = 0`. The metric needs `1/μ` and is only formed away from
/// the fold.
pub fn reconstruct(traj: &Trajectory) -> Result<HKTriple, NahmError> {
    let n = traj.modes();
    let axis = traj.axis();
    let mut omega: [FormField; 3] = std::array::from_fn(|_| FormField::zero(2, n, Some(axis)).expect("degree 2"));
    let mut mu = Vec::with_capacity(traj.len());
    let mut metric = Vec::with_capacity(traj.len());
    for (ix, state) in traj.states.iter().enumerate() {
        let cof = cofactors(&state.v);
        let det = determinant(&state.v, &cof);
        for a in 0..3 {
            for (k, bit) in [T1, T2, T3].into_iter().enumerate() {
                omega[a].set_component(ix, DX | bit, cof[a][k].clone());
            }
            for (mask, c) in contraction_coeffs(&state.v[a]) {
                omega[a].set_component(ix, mask, c);
            }
        }
        if state.x.abs() < 0.5 * traj.step {
            metric.push(None);
        } else {
            metric.push(Some(metric_from(&cof, &det, state.x)?));
        }
        mu.push(det);
    }
    Ok(HKTriple { axis, mu, omega, metric })
}

fn metric_from(cof: &[[SField; 3]; 3], det: &SField, x: f64) -> Result<MetricField, NahmError> {
    let n = det.len();
    let mu = det.values();
    let scale = mu.iter().fold(0.0_f64, |m, v| m.max(v.abs()));
    let min_mu = mu.iter().fold(f64::INFINITY, |m, v| m.min(v.abs()));
    if !(min_mu > 1e-12 * scale.max(1.0)) {
        return Err(NahmError::SingularFrame { x, min_mu });
    }
    let cv: Vec<Vec<Vec<f64>>> = cof
        .iter()
        .map(|row| row.iter().map(|c| c.values()).collect())
        .collect();
    let mut comps: [[SField; 4]; 4] = std::array::from_fn(|_| std::array::from_fn(|_| SField::zeros(n)));
    comps[0][0] = det.clone();
    for k in 0..3 {
        for l in k..3 {
            let vals: Vec<f64> = (0..n)
                .map(|j| (0..3).map(|a| cv[a][k][j] * cv[a][l][j]).sum::<f64>() / mu[j])
                .collect();
            let f = SField::from_values(&vals);
            comps[k + 1][l + 1] = f.clone();
            comps[l + 1][k + 1] = f;
        }
    }
    Ok(MetricField { comps })
}

/// `max_{a,b} ‖ω_a∧ω_b − δ_ab ω₁∧ω₁‖`.
pub fn wedge_identity_residual(hk: &HKTriple) -> Result<f64, NahmError> {
    let vol = wedge(&hk.omega[0], &hk.omega[0])?;
    let mut worst: f64 = 0.0;
    for a in 0..3 {
        for b in a..3 {
            let w = wedge(&hk.omega[a], &hk.omega[b])?;
            let r = if a == b { w.sub(&vol)? } else { w };
            worst = worst.max(r.max_abs());
        }
    }
    Ok(worst)
}

/// `‖dω_a‖∞` for each of the three forms.
pub fn closedness_residual(hk: &HKTriple) -> Result<[f64; 3], NahmError> {
    let mut out = [0.0; 3];
    for (a, slot) in out.iter_mut().enumerate() {
        *slot = exterior_derivative(&hk.omega[a])?.max_abs();
    }
    Ok(out)
}

impl HKTriple {
    /// `ω_a` restricted to the slice at x-sample `ix` as a form on X (dx-terms dropped).
    pub fn restrict_to_slice(&self, a: usize, ix: usize) -> FormField {
        let n = self.omega[a].modes();
        let mut out = FormField::zero(2, n, None).expect("degree 2");
        for mask in [T1 | T2, T1 | T3, T2 | T3] {
            out.set_component(0, mask, self.omega[a].component(ix, mask));
        }
        out
    }

    pub fn modes(&self) -> usize {
        self.omega[0].modes()
    }

    /// The four-form `dx∧θ¹∧θ²∧θ³` coefficient of `ω₁∧ω₁` equals `2μ`.
    pub fn volume_coefficient(&self) -> Result<Vec<SField>, NahmError> {
        let vol = wedge(&self.omega[0], &self.omega[0])?;
        Ok((0..self.axis.len)
            .map(|ix| vol.component(ix, DX | T1 | T2 | T3))
            .collect())
    }
}

