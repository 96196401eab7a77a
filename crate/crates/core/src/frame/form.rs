//! Differential forms on `[0, ε) × X` in the coframe `(dx, θ¹, θ², θ³)`.
//!
//! Coefficients depend on the fold coordinate `x` (sampled on an optional
//! uniform axis) and on the fiber coordinate `s` (band-limited, see
//! [`SField`]). On this coefficient class `X₂` acts as `∂_s` while `X₁` and
//! `X₃` annihilate coefficients.

use super::sfield::SField;
use super::FrameError;

/// One element of the ordered coframe.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Coframe {
    Dx,
    Theta1,
    Theta2,
    Theta3,
}

impl Coframe {
    pub const ALL: [Coframe; 4] = [Coframe::Dx, Coframe::Theta1, Coframe::Theta2, Coframe::Theta3];

    pub fn index(self) -> usize {
        self as usize
    }

    pub fn bit(self) -> u8 {
        1 << self.index()
    }
}

/// Basis monomials of degree `k`, as bitmasks over the coframe, in lexicographic order.
pub fn monomials(degree: usize) -> Vec<u8> {
    let mut out: Vec<u8> = (0u8..16).filter(|m| m.count_ones() as usize == degree).collect();
    out.sort_by_key(|m| {
        let mut idx = [0usize; 4];
        let mut len = 0;
        for i in 0..4 {
            if m & (1 << i) != 0 {
                idx[len] = i;
                len += 1;
            }
        }
        idx
    });
    out
}

/// Sign of `θ^A ∧ θ^B` relative to the ascending monomial `θ^{A∪B}`, or 0 if they overlap.
pub fn wedge_sign(a: u8, b: u8) -> i32 {
    if a & b != 0 {
        return 0;
    }
    let mut inversions = 0;
    for i in 0..4 {
        if a & (1 << i) == 0 {
            continue;
        }
        for j in 0..i {
            if b & (1 << j) != 0 {
                inversions += 1;
            }
        }
    }
    if inversions % 2 == 0 {
        1
    } else {
        -1
    }
}

/// Mask for an ordered list of coframe elements, together with its sign.
pub fn ordered_mask(elems: &[Coframe]) -> (u8, i32) {
    let mut mask = 0u8;
    let mut sign = 1;
    for e in elems {
        let s = wedge_sign(mask, e.bit());
        if s == 0 {
            return (mask | e.bit(), 0);
        }
        sign *= s;
        mask |= e.bit();
    }
    (mask, sign)
}

/// Uniform grid in the fold coordinate.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct XAxis {
    pub start: f64,
    pub step: f64,
    pub len: usize,
}

impl XAxis {
    pub fn new(start: f64, step: f64, len: usize) -> Self {
        Self { start, step, len }
    }

    pub fn point(&self, i: usize) -> f64 {
        self.start + self.step * i as f64
    }

    pub fn points(&self) -> Vec<f64> {
        (0..self.len).map(|i| self.point(i)).collect()
    }
}

/// A `k`-form with one [`SField`] coefficient per basis monomial, per x-sample.
#[derive(Debug, Clone, PartialEq)]
pub struct FormField {
    degree: usize,
    modes: usize,
    axis: Option<XAxis>,
    /// `slices[ix][m]` is the coefficient of `monomials(degree)[m]` at x-sample `ix`.
    slices: Vec<Vec<SField>>,
}

impl FormField {
    pub fn zero(degree: usize, modes: usize, axis: Option<XAxis>) -> Result<Self, FrameError> {
        if degree > 4 {
            return Err(FrameError::DegreeOverflow { degree });
        }
        let count = monomials(degree).len();
        let nx = axis.map_or(1, |a| a.len);
        Ok(Self {
            degree,
            modes,
            axis,
            slices: vec![vec![SField::zeros(modes); count]; nx],
        })
    }

    /// Constant-coefficient wedge of coframe elements, e.g. `[Dx, Theta1]` for `dx∧θ¹`.
    pub fn basis(modes: usize, elems: &[Coframe]) -> Result<Self, FrameError> {
        let mut f = Self::zero(elems.len(), modes, None)?;
        let (mask, sign) = ordered_mask(elems);
        if sign != 0 {
            f.set_component(0, mask, SField::constant(modes, sign as f64));
        }
        Ok(f)
    }

    /// Builds a form from a coefficient function evaluated per x-sample.
    pub fn from_fn(
        degree: usize,
        modes: usize,
        axis: Option<XAxis>,
        mut coeff: impl FnMut(f64, u8) -> SField,
    ) -> Result<Self, FrameError> {
        let mut f = Self::zero(degree, modes, axis)?;
        let masks = monomials(degree);
        for ix in 0..f.slices.len() {
            let x = axis.map_or(0.0, |a| a.point(ix));
            for (m, &mask) in masks.iter().enumerate() {
                let c = coeff(x, mask);
                if c.len() != modes {
                    return Err(FrameError::GridMismatch);
                }
                f.slices[ix][m] = c;
            }
        }
        Ok(f)
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn modes(&self) -> usize {
        self.modes
    }

    pub fn axis(&self) -> Option<XAxis> {
        self.axis
    }

    pub fn x_len(&self) -> usize {
        self.slices.len()
    }

    pub fn component_count(&self) -> usize {
        monomials(self.degree).len()
    }

    fn slot(&self, mask: u8) -> Option<usize> {
        monomials(self.degree).iter().position(|&m| m == mask)
    }

    /// Coefficient of the ascending monomial `mask` at x-sample `ix`.
    pub fn component(&self, ix: usize, mask: u8) -> SField {
        match self.slot(mask) {
            Some(m) => self.slices[ix][m].clone(),
            None => SField::zeros(self.modes),
        }
    }

    pub fn set_component(&mut self, ix: usize, mask: u8, value: SField) {
        let m = self
            .slot(mask)
            .unwrap_or_else(|| panic!("mask {mask:#06b} is not a degree-{} monomial", self.degree));
        self.slices[ix][m] = value;
    }

    pub fn add_to_component(&mut self, ix: usize, mask: u8, value: &SField) {
        let m = self
            .slot(mask)
            .unwrap_or_else(|| panic!("mask {mask:#06b} is not a degree-{} monomial", self.degree));
        self.slices[ix][m] = &self.slices[ix][m] + value;
    }

    /// Coefficients at one x-sample, in `monomials(degree)` order.
    pub fn slice(&self, ix: usize) -> &[SField] {
        &self.slices[ix]
    }

    /// Largest collocation-grid magnitude over all components and x-samples.
    pub fn max_abs(&self) -> f64 {
        self.slices
            .iter()
            .flatten()
            .fold(0.0, |m, c| m.max(c.max_abs()))
    }

    /// Largest magnitude restricted to a range of x-samples.
    pub fn max_abs_in(&self, range: std::ops::Range<usize>) -> f64 {
        self.slices[range]
            .iter()
            .flatten()
            .fold(0.0, |m, c| m.max(c.max_abs()))
    }

    fn check_compatible(&self, other: &FormField) -> Result<(), FrameError> {
        if self.modes != other.modes {
            return Err(FrameError::GridMismatch);
        }
        match (self.axis, other.axis) {
            (Some(a), Some(b)) if a != b => Err(FrameError::GridMismatch),
            _ => Ok(()),
        }
    }

    fn broadcast_len(&self, other: &FormField) -> (Option<XAxis>, usize) {
        let axis = self.axis.or(other.axis);
        (axis, axis.map_or(1, |a| a.len))
    }

    pub fn add(&self, other: &FormField) -> Result<FormField, FrameError> {
        self.combine(other, 1.0)
    }

    pub fn sub(&self, other: &FormField) -> Result<FormField, FrameError> {
        self.combine(other, -1.0)
    }

    fn combine(&self, other: &FormField, sign: f64) -> Result<FormField, FrameError> {
        self.check_compatible(other)?;
        if self.degree != other.degree {
            return Err(FrameError::DegreeMismatch {
                left: self.degree,
                right: other.degree,
            });
        }
        let (axis, nx) = self.broadcast_len(other);
        let mut out = Self::zero(self.degree, self.modes, axis)?;
        for ix in 0..nx {
            let a = &self.slices[ix.min(self.slices.len() - 1)];
            let b = &other.slices[ix.min(other.slices.len() - 1)];
            for m in 0..a.len() {
                out.slices[ix][m] = &a[m] + &(&b[m] * sign);
            }
        }
        Ok(out)
    }

    pub fn scale(&self, a: f64) -> FormField {
        let mut out = self.clone();
        out.slices
            .iter_mut()
            .flatten()
            .for_each(|c| *c = c.scale(a));
        out
    }

    /// Multiplies every coefficient at x-sample `ix` by `f(x_ix)`.
    pub fn scale_by_x(&self, f: impl Fn(f64) -> f64) -> FormField {
        let mut out = self.clone();
        for ix in 0..out.slices.len() {
            let x = self.axis.map_or(0.0, |a| a.point(ix));
            let k = f(x);
            out.slices[ix].iter_mut().for_each(|c| *c = c.scale(k));
        }
        out
    }
}

/// Graded-commutative exterior product.
pub fn wedge(a: &FormField, b: &FormField) -> Result<FormField, FrameError> {
    let degree = a.degree + b.degree;
    if degree > 4 {
        return Err(FrameError::DegreeOverflow { degree });
    }
    a.check_compatible(b)?;
    let (axis, nx) = a.broadcast_len(b);
    let mut out = FormField::zero(degree, a.modes, axis)?;
    let ma = monomials(a.degree);
    let mb = monomials(b.degree);
    for ix in 0..nx {
        let sa = &a.slices[ix.min(a.slices.len() - 1)];
        let sb = &b.slices[ix.min(b.slices.len() - 1)];
        for (i, &mask_a) in ma.iter().enumerate() {
            for (j, &mask_b) in mb.iter().enumerate() {
                let sign = wedge_sign(mask_a, mask_b);
                if sign == 0 {
                    continue;
                }
                let p = sa[i].product(&sb[j]).scale(sign as f64);
                out.add_to_component(ix, mask_a | mask_b, &p);
            }
        }
    }
    Ok(out)
}

/// First x-derivative of a sampled profile: centered second order inside,
/// one-sided third order at the two ends.
pub(crate) fn fd_x(values: &[&SField], step: f64) -> Result<Vec<SField>, FrameError> {
    let n = values.len();
    if n < 4 {
        return Err(FrameError::AxisTooShort { len: n });
    }
    let mut out = Vec::with_capacity(n);
    let inv6h = 1.0 / (6.0 * step);
    let one_sided = |f0: &SField, f1: &SField, f2: &SField, f3: &SField, sign: f64| {
        let acc = &(&(&(f0 * -11.0) + &(f1 * 18.0)) + &(f2 * -9.0)) + &(f3 * 2.0);
        acc.scale(sign * inv6h)
    };
    out.push(one_sided(values[0], values[1], values[2], values[3], 1.0));
    for i in 1..n - 1 {
        out.push((values[i + 1] - values[i - 1]).scale(0.5 / step));
    }
    out.push(one_sided(
        values[n - 1],
        values[n - 2],
        values[n - 3],
        values[n - 4],
        -1.0,
    ));
    Ok(out)
}

/// `∂ₓ` applied coefficient-wise. Requires an x-axis with at least four samples.
pub fn partial_x(a: &FormField) -> Result<FormField, FrameError> {
    let axis = a.axis.ok_or(FrameError::MissingXAxis)?;
    let mut out = FormField::zero(a.degree, a.modes, Some(axis))?;
    for m in 0..a.component_count() {
        let column: Vec<&SField> = a.slices.iter().map(|s| &s[m]).collect();
        for (ix, d) in fd_x(&column, axis.step)?.into_iter().enumerate() {
            out.slices[ix][m] = d;
        }
    }
    Ok(out)
}

/// `d` from the structure equations `dθ¹ = θ²∧θ³`, `dθ² = dθ³ = 0`, with
/// `X₂ = ∂_s` on coefficients and finite differences in `x`. A form without an
/// x-axis is treated as independent of `x`.
pub fn exterior_derivative(a: &FormField) -> Result<FormField, FrameError> {
    let degree = a.degree + 1;
    let mut out = FormField::zero(degree, a.modes, a.axis)?;
    let masks = monomials(a.degree);
    let dx_part = match a.axis {
        Some(_) => Some(partial_x(a)?),
        None => None,
    };
    let theta23 = Coframe::Theta2.bit() | Coframe::Theta3.bit();
    for ix in 0..a.slices.len() {
        for (m, &mask) in masks.iter().enumerate() {
            let c = &a.slices[ix][m];
            if let Some(dx) = &dx_part {
                let sign = wedge_sign(Coframe::Dx.bit(), mask);
                if sign != 0 {
                    let term = dx.slices[ix][m].scale(sign as f64);
                    out.add_to_component(ix, mask | Coframe::Dx.bit(), &term);
                }
            }
            let sign = wedge_sign(Coframe::Theta2.bit(), mask);
            if sign != 0 {
                let term = c.derivative().scale(sign as f64);
                out.add_to_component(ix, mask | Coframe::Theta2.bit(), &term);
            }
            // Leibniz over the monomial; only θ¹ has a nonzero differential.
            let t1 = Coframe::Theta1.bit();
            if mask & t1 != 0 {
                let before = mask & (t1 - 1);
                let after = mask & !(t1 | (t1 - 1));
                let position_sign = if before.count_ones() % 2 == 0 { 1 } else { -1 };
                let s1 = wedge_sign(before, theta23);
                let s2 = wedge_sign(before | theta23, after);
                let sign = position_sign * s1 * s2;
                if sign != 0 {
                    let term = c.scale(sign as f64);
                    out.add_to_component(ix, before | theta23 | after, &term);
                }
            }
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::frame::Coframe::*;

    const N: usize = 16;

    #[test]
    fn component_counts_are_binomial() {
        let expected = [1, 4, 6, 4, 1];
        for (k, &c) in expected.iter().enumerate() {
            assert_eq!(monomials(k).len(), c);
            assert_eq!(FormField::zero(k, N, None).unwrap().component_count(), c);
        }
        assert!(matches!(
            FormField::zero(5, N, None),
            Err(FrameError::DegreeOverflow { degree: 5 })
        ));
    }

    #[test]
    fn basis_monomial_product() {
        let a = FormField::basis(N, &[Dx, Theta1]).unwrap();
        let b = FormField::basis(N, &[Theta2, Theta3]).unwrap();
        let top = wedge(&a, &b).unwrap();
        assert_eq!(top.degree(), 4);
        assert_eq!(top.component(0, 0b1111).mean(), 1.0);
        // θ³∧θ² = −θ²∧θ³
        let c = FormField::basis(N, &[Theta3, Theta2]).unwrap();
        assert_eq!(c.component(0, 0b1100).mean(), -1.0);
    }

    #[test]
    fn one_form_squares_to_zero() {
        let mut a = FormField::zero(1, N, None).unwrap();
        a.set_component(0, Dx.bit(), SField::sin_mode(N, 1, 1.0));
        a.set_component(0, Theta2.bit(), SField::cos_mode(N, 2, 0.5));
        a.set_component(0, Theta3.bit(), SField::constant(N, 2.0));
        assert!(wedge(&a, &a).unwrap().max_abs() < 1e-15);
    }

    #[test]
    fn degree_overflow_is_rejected() {
        let a = FormField::basis(N, &[Dx, Theta1, Theta2]).unwrap();
        let b = FormField::basis(N, &[Theta3, Theta2]).unwrap();
        assert!(matches!(wedge(&a, &b), Err(FrameError::DegreeOverflow { degree: 5 })));
    }

    #[test]
    fn mismatched_grids_are_rejected() {
        let a = FormField::zero(1, N, Some(XAxis::new(0.0, 0.1, 5))).unwrap();
        let b = FormField::zero(1, N, Some(XAxis::new(0.0, 0.2, 5))).unwrap();
        assert_eq!(wedge(&a, &b), Err(FrameError::GridMismatch));
        let c = FormField::zero(1, 2 * N, None).unwrap();
        assert_eq!(wedge(&a, &c), Err(FrameError::GridMismatch));
    }

    #[test]
    fn d_theta1_is_theta2_wedge_theta3() {
        let t1 = FormField::basis(N, &[Theta1]).unwrap();
        let d = exterior_derivative(&t1).unwrap();
        let expected = FormField::basis(N, &[Theta2, Theta3]).unwrap();
        assert!(d.sub(&expected).unwrap().max_abs() < 1e-15);
    }

    #[test]
    fn d_of_constant_function_vanishes() {
        let mut f = FormField::zero(0, N, Some(XAxis::new(0.0, 0.1, 6))).unwrap();
        for ix in 0..6 {
            f.set_component(ix, 0, SField::constant(N, 4.2));
        }
        assert!(exterior_derivative(&f).unwrap().max_abs() < 1e-13);
    }

    #[test]
    fn d_of_x_theta23() {
        let axis = XAxis::new(0.1, 0.05, 8);
        let f = FormField::from_fn(2, N, Some(axis), |x, mask| {
            if mask == Theta2.bit() | Theta3.bit() {
                SField::constant(N, x)
            } else {
                SField::zeros(N)
            }
        })
        .unwrap();
        let d = exterior_derivative(&f).unwrap();
        for ix in 0..axis.len {
            assert!((d.component(ix, 0b1101).mean() - 1.0).abs() < 1e-12);
        }
        assert!(d.max_abs() < 1.0 + 1e-12);
    }

    #[test]
    fn d_of_dx_wedge_theta1() {
        let f = FormField::basis(N, &[Dx, Theta1]).unwrap();
        let d = exterior_derivative(&f).unwrap();
        assert_eq!(d.component(0, 0b1101).mean(), -1.0);
    }

    #[test]
    fn s_derivative_enters_through_theta2() {
        let mut f = FormField::zero(0, N, None).unwrap();
        f.set_component(0, 0, SField::sin_mode(N, 1, 1.0));
        let d = exterior_derivative(&f).unwrap();
        let expected = SField::cos_mode(N, 1, 2.0 * std::f64::consts::PI);
        assert!((&d.component(0, Theta2.bit()) - &expected).coeff_norm() < 1e-13);
        assert!(d.component(0, Theta1.bit()).coeff_norm() == 0.0);
    }

    #[test]
    fn partial_x_requires_axis() {
        let f = FormField::basis(N, &[Theta1]).unwrap();
        assert_eq!(partial_x(&f), Err(FrameError::MissingXAxis));
        let short = FormField::zero(1, N, Some(XAxis::new(0.0, 0.1, 3))).unwrap();
        assert_eq!(partial_x(&short), Err(FrameError::AxisTooShort { len: 3 }));
    }

    #[test]
    fn fd_is_exact_on_quadratics_inside_and_cubics_at_ends() {
        let axis = XAxis::new(0.0, 0.1, 7);
        let f = FormField::from_fn(0, N, Some(axis), |x, _| SField::constant(N, x * x * x)).unwrap();
        let d = partial_x(&f).unwrap();
        for ix in [0, axis.len - 1] {
            let x = axis.point(ix);
            assert!((d.component(ix, 0).mean() - 3.0 * x * x).abs() < 1e-12);
        }
        let g = FormField::from_fn(0, N, Some(axis), |x, _| SField::constant(N, x * x)).unwrap();
        let dg = partial_x(&g).unwrap();
        for ix in 0..axis.len {
            assert!((dg.component(ix, 0).mean() - 2.0 * axis.point(ix)).abs() < 1e-12);
        }
    }
}
