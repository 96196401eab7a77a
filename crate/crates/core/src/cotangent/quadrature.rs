use super::CotangentError;
use gauss_quad::legendre::GaussLegendre;
use nalgebra::{DMatrix, SymmetricEigen};
use std::f64::consts::{FRAC_PI_2, PI};

/// `m_k = ∫₀¹ r^k (1−r²)^{−1/2} dr`, from `m₀ = π/2`, `m₁ = 1`,
/// `m_k = (k−1)/k · m_{k−2}`.
pub fn weight_moment(k: u32) -> f64 {
    let mut m = if k % 2 == 0 { FRAC_PI_2 } else { 1.0 };
    let mut j = if k % 2 == 0 { 2 } else { 3 };
    while j <= k {
        m *= (j - 1) as f64 / j as f64;
        j += 2;
    }
    m
}

/// Radial Gauss rule for `(1−r²)^{−1/2} dr` on `(0, 1)` and a uniform angular grid.
#[derive(Debug, Clone, PartialEq)]
pub struct FiberChart {
    nodes: Vec<f64>,
    weights: Vec<f64>,
    angular: usize,
}

/// Points of the auxiliary Gauss–Legendre rule in `t` (with `r = sin t`) used
/// to discretize the weight.
const DISCRETIZATION: usize = 512;

impl FiberChart {
    /// `radial` Gauss nodes (exact for `r^k/√(1−r²)`, `k < 2·radial`) and
    /// `angular` equispaced angles.
    pub fn new(radial: usize, angular: usize) -> Result<Self, CotangentError> {
        if radial == 0 || radial > 128 {
            return Err(CotangentError::InvalidGrid(format!("radial node count {radial} not in 1..=128")));
        }
        if angular < 4 {
            return Err(CotangentError::InvalidGrid(format!("need at least 4 angles, got {angular}")));
        }
        let (nodes, weights) = gauss_rule(radial)?;
        Ok(Self { nodes, weights, angular })
    }

    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn radial_len(&self) -> usize {
        self.nodes.len()
    }

    pub fn angular_len(&self) -> usize {
        self.angular
    }

    pub fn angle(&self, k: usize) -> f64 {
        2.0 * PI * k as f64 / self.angular as f64
    }

    /// `∫₀¹ f(r) (1−r²)^{−1/2} dr`.
    pub fn integrate_radial(&self, f: impl Fn(f64) -> f64) -> f64 {
        self.nodes.iter().zip(&self.weights).map(|(r, w)| w * f(*r)).sum()
    }
}

/// Lanczos (discretized Stieltjes) on a fine substitution rule, then Golub–Welsch.
fn gauss_rule(n: usize) -> Result<(Vec<f64>, Vec<f64>), CotangentError> {
    let gl = GaussLegendre::new(DISCRETIZATION.try_into().expect("nonzero"));
    // t ∈ (0, π/2), dt = dr / √(1−r²)
    let (xs, ws): (Vec<f64>, Vec<f64>) = gl
        .as_node_weight_pairs()
        .iter()
        .map(|&(x, w)| (FRAC_PI_2 * 0.5 * (x + 1.0), FRAC_PI_2 * 0.5 * w))
        .unzip();
    let rs: Vec<f64> = xs.iter().map(|t| t.sin()).collect();
    let dot = |a: &[f64], b: &[f64]| -> f64 { a.iter().zip(b).zip(&ws).map(|((x, y), w)| x * y * w).sum() };

    let mass: f64 = ws.iter().sum();
    let mut basis: Vec<Vec<f64>> = vec![vec![1.0 / mass.sqrt(); rs.len()]];
    let mut alpha = Vec::with_capacity(n);
    let mut beta = Vec::with_capacity(n);
    for k in 0..n {
        let q = &basis[k];
        let mut v: Vec<f64> = q.iter().zip(&rs).map(|(q, r)| q * r).collect();
        let a = dot(&v, q);
        alpha.push(a);
        if k + 1 == n {
            break;
        }
        // full re-orthogonalization (twice is enough)
        for _ in 0..2 {
            for p in &basis {
                let c = dot(&v, p);
                v.iter_mut().zip(p).for_each(|(vi, pi)| *vi -= c * pi);
            }
        }
        let b = dot(&v, &v).sqrt();
        if !(b > 1e-14) {
            return Err(CotangentError::Quadrature(k + 1));
        }
        beta.push(b);
        basis.push(v.into_iter().map(|x| x / b).collect());
    }
    let jacobi = DMatrix::from_fn(n, n, |i, j| {
        if i == j {
            alpha[i]
        } else if i + 1 == j {
            beta[i]
        } else if j + 1 == i {
            beta[j]
        } else {
            0.0
        }
    });
    let eig = SymmetricEigen::new(jacobi);
    let mut pairs: Vec<(f64, f64)> = (0..n)
        .map(|i| (eig.eigenvalues[i], mass * eig.eigenvectors[(0, i)].powi(2)))
        .collect();
    pairs.sort_by(|a, b| a.0.total_cmp(&b.0));
    Ok(pairs.into_iter().unzip())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn moments_closed_form() {
        assert!((weight_moment(0) - FRAC_PI_2).abs() < 1e-16);
        assert_eq!(weight_moment(1), 1.0);
        assert!((weight_moment(2) - PI / 4.0).abs() < 1e-16);
        assert!((weight_moment(3) - 2.0 / 3.0).abs() < 1e-16);
    }

    #[test]
    fn rule_is_exact_on_monomials() {
        let chart = FiberChart::new(64, 64).unwrap();
        for k in 0..128 {
            let q = chart.integrate_radial(|r| r.powi(k as i32));
            assert!((q - weight_moment(k)).abs() < 1e-13, "k = {k}: {q} vs {}", weight_moment(k));
        }
    }

    #[test]
    fn nodes_inside_interval() {
        let chart = FiberChart::new(16, 8).unwrap();
        assert!(chart.nodes().iter().all(|r| *r > 0.0 && *r < 1.0));
        assert!(chart.weights().iter().all(|w| *w > 0.0));
        assert!(chart.nodes().windows(2).all(|p| p[0] < p[1]));
    }

    #[test]
    fn bad_grids() {
        assert!(FiberChart::new(0, 8).is_err());
        assert!(FiberChart::new(8, 2).is_err());
    }
}
