use super::sfield::SField;

/// Structure constants of the Heisenberg frame.
///
/// `bracket(i, j)` returns the coefficients of `[X_i, X_j]` in `(X₁, X₂, X₃)`
/// (indices 0-based). The only nonzero entries are `[X₂, X₃] = −X₁` and its
/// antisymmetric partner.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct FrameAlgebra;

impl FrameAlgebra {
    pub fn bracket(&self, i: usize, j: usize) -> [f64; 3] {
        match (i, j) {
            (1, 2) => [-1.0, 0.0, 0.0],
            (2, 1) => [1.0, 0.0, 0.0],
            _ => [0.0; 3],
        }
    }

    /// `dθ^k(X_i, X_j) = −θ^k([X_i, X_j])` for the invariant frame.
    pub fn coframe_differential(&self, k: usize, i: usize, j: usize) -> f64 {
        -self.bracket(i, j)[k]
    }

    /// `θ^i(X_j)`.
    pub fn pairing(&self, i: usize, j: usize) -> f64 {
        if i == j {
            1.0
        } else {
            0.0
        }
    }

    /// Largest Jacobi-identity defect over all basis triples.
    pub fn jacobi_defect(&self) -> f64 {
        let mut worst: f64 = 0.0;
        for a in 0..3 {
            for b in 0..3 {
                for c in 0..3 {
                    let mut total = [0.0; 3];
                    for (x, y, z) in [(a, b, c), (b, c, a), (c, a, b)] {
                        let inner = self.bracket(y, z);
                        for (m, coef) in inner.iter().enumerate() {
                            let outer = self.bracket(x, m);
                            for k in 0..3 {
                                total[k] += coef * outer[k];
                            }
                        }
                    }
                    worst = total.iter().fold(worst, |w, v| w.max(v.abs()));
                }
            }
        }
        worst
    }
}

/// `V = f(s) X₁ + g(s) X₂ + h(s) X₃`.
#[derive(Debug, Clone, PartialEq)]
pub struct InvariantVectorField {
    pub f: SField,
    pub g: SField,
    pub h: SField,
}

impl InvariantVectorField {
    pub fn new(f: SField, g: SField, h: SField) -> Self {
        assert!(
            f.len() == g.len() && g.len() == h.len(),
            "vector field components use different mode counts"
        );
        Self { f, g, h }
    }

    pub fn zero(modes: usize) -> Self {
        Self::new(SField::zeros(modes), SField::zeros(modes), SField::zeros(modes))
    }

    /// The frame field `X_{i+1}` (0-based index).
    pub fn frame(modes: usize, i: usize) -> Self {
        let mut v = Self::zero(modes);
        *v.components_mut()[i] = SField::constant(modes, 1.0);
        v
    }

    pub fn modes(&self) -> usize {
        self.f.len()
    }

    pub fn components(&self) -> [&SField; 3] {
        [&self.f, &self.g, &self.h]
    }

    pub fn components_mut(&mut self) -> [&mut SField; 3] {
        [&mut self.f, &mut self.g, &mut self.h]
    }

    /// The divergence with respect to `θ¹∧θ²∧θ³` is `∂_s g`; the field preserves
    /// the volume iff `g` is constant.
    pub fn is_volume_preserving(&self) -> bool {
        self.g.is_constant()
    }

    pub fn divergence(&self) -> SField {
        self.g.derivative()
    }

    pub fn add(&self, other: &Self) -> Self {
        Self::new(&self.f + &other.f, &self.g + &other.g, &self.h + &other.h)
    }

    pub fn sub(&self, other: &Self) -> Self {
        Self::new(&self.f - &other.f, &self.g - &other.g, &self.h - &other.h)
    }

    pub fn scale(&self, a: f64) -> Self {
        Self::new(self.f.scale(a), self.g.scale(a), self.h.scale(a))
    }

    /// `self + a·other`.
    pub fn axpy(&self, a: f64, other: &Self) -> Self {
        self.add(&other.scale(a))
    }

    /// Sum of coefficient moduli over the three components.
    pub fn norm(&self) -> f64 {
        self.f.coeff_norm() + self.g.coeff_norm() + self.h.coeff_norm()
    }

    pub fn filter_below(&self, threshold: f64) -> Self {
        Self::new(
            self.f.filter_below(threshold),
            self.g.filter_below(threshold),
            self.h.filter_below(threshold),
        )
    }

    /// Largest collocation-grid magnitude over the three components.
    pub fn max_abs(&self) -> f64 {
        self.f.max_abs().max(self.g.max_abs()).max(self.h.max_abs())
    }
}

/// Lie bracket of two s-dependent frame fields.
///
/// With `′ = d/ds`:
/// `[v, w] = (v_g w_f′ − w_g v_f′ − (v_g w_h − v_h w_g)) X₁
///         + (v_g w_g′ − w_g v_g′) X₂ + (v_g w_h′ − w_g v_h′) X₃`.
pub fn lie_bracket(v: &InvariantVectorField, w: &InvariantVectorField) -> InvariantVectorField {
    let vf = v.f.derivative();
    let vg = v.g.derivative();
    let vh = v.h.derivative();
    let wf = w.f.derivative();
    let wg = w.g.derivative();
    let wh = w.h.derivative();
    let twist = &(&v.g * &w.h) - &(&v.h * &w.g);
    let f = &(&(&v.g * &wf) - &(&w.g * &vf)) - &twist;
    let g = &(&v.g * &wg) - &(&w.g * &vg);
    let h = &(&v.g * &wh) - &(&w.g * &vh);
    InvariantVectorField::new(f, g, h)
}
