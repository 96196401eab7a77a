//! Fiberwise identities of the disc-bundle model and the variation of the
//! invariant polynomials.

use super::SuiteOutput;
use crate::config::{DeformationSpec, RunConfig};
use crate::report::{Bound, CheckRecord, Diagnostic, SuiteReport};
use crate::tables::Table;
use foldhk::cotangent::{
    deformation_identity_residual, finite_variation_slope, invariant_polynomial, omega1, phi_profile,
    variation_of_invariants, CotangentError, Deformation, FiberChart, FiberForm,
};
use num_complex::Complex64;

fn deformation(entry: &DeformationSpec) -> Result<Deformation, CotangentError> {
    let g = Complex64::new(entry.amplitude[0], entry.amplitude[1]);
    match entry.phi {
        Some(phi) => Deformation::new(entry.m, g, phi),
        None => Deformation::harmonic(entry.m, g),
    }
}

fn max_norm<'a>(it: impl IntoIterator<Item = &'a Complex64>) -> f64 {
    it.into_iter().fold(0.0, |m, z| m.max(z.norm()))
}

/// `max |A(r)B(r) − r|` on `r = i/1000`.
pub fn product_identity() -> Result<f64, CotangentError> {
    (1..1000).try_fold(0.0_f64, |worst, i| {
        let r = i as f64 / 1000.0;
        let (a, b) = omega1(r)?;
        Ok(worst.max((a * b - r).abs()))
    })
}

fn standard_invariants(chart: &FiberChart, nmax: u32) -> Result<(f64, Vec<Complex64>), CotangentError> {
    let std = FiberForm::standard(chart);
    // an angularly symmetric perturbation leaves every p_n at zero
    let sym = FiberForm::from_fn(chart, |r, _| Complex64::new(r * r / (1.0 - r * r).sqrt(), 0.0));
    let perturbed = std.axpy(Complex64::new(0.3, 0.0), &sym)?;
    let mut worst: f64 = 0.0;
    let mut values = Vec::new();
    for n in 1..=nmax as i64 {
        let p = invariant_polynomial(&std, n)?;
        worst = worst.max(p.norm()).max(invariant_polynomial(&perturbed, n)?.norm());
        values.push(p);
    }
    Ok((worst, values))
}

struct Variations {
    diagonality: f64,
    linearity: f64,
    superposition: f64,
    per_deformation: Vec<Vec<Complex64>>,
}

fn variations(ds: &[Deformation], chart: &FiberChart, nmax: u32) -> Result<Variations, CotangentError> {
    let mut out = Variations {
        diagonality: 0.0,
        linearity: 0.0,
        superposition: 0.0,
        per_deformation: Vec::new(),
    };
    let mut sum = vec![Complex64::new(0.0, 0.0); nmax as usize];
    for d in ds {
        let v = variation_of_invariants(&[*d], chart, nmax)?;
        for (i, p) in v.iter().enumerate() {
            if i + 1 != d.m as usize {
                out.diagonality = out.diagonality.max(p.norm());
            }
            sum[i] += p;
        }
        let t = 2.5;
        let scaled = variation_of_invariants(&[d.scaled(t)], chart, nmax)?;
        out.linearity = out.linearity.max(max_norm(&v.iter().zip(&scaled).map(|(a, b)| a * t - b).collect::<Vec<_>>()));
        out.per_deformation.push(v);
    }
    let joint = variation_of_invariants(ds, chart, nmax)?;
    out.superposition = max_norm(&joint.iter().zip(&sum).map(|(a, b)| a - b).collect::<Vec<_>>());
    Ok(out)
}

/// `ṗ_m / g` for every harmonic deformation with `m ≥ 2`.
fn kappas(cfg: &RunConfig, ds: &[Deformation], per: &[Vec<Complex64>]) -> Vec<(u32, Complex64)> {
    cfg.cotangent
        .deformations
        .iter()
        .zip(ds)
        .zip(per)
        .filter(|((entry, d), _)| entry.phi.is_none() && d.is_hitchin() && d.amplitude.norm() > 0.0)
        .map(|((_, d), v)| (d.m, v[d.m as usize - 1] / d.amplitude))
        .collect()
}

pub fn run(cfg: &RunConfig) -> SuiteOutput {
    let c = &cfg.cotangent;
    let tol = &cfg.tolerances;
    let mut checks = vec![CheckRecord::from_result(
        "product_identity",
        Bound::AtMost(tol.product_identity),
        product_identity(),
    )];
    let mut diags = Vec::new();
    let mut tables = Vec::new();
    let chart = match FiberChart::new(c.radial, c.angular) {
        Ok(ch) => ch,
        Err(e) => {
            checks.push(CheckRecord::failed("fiber_chart", Bound::AtMost(0.0), e));
            return SuiteOutput {
                report: SuiteReport::new("cotangent", checks, diags),
                tables,
            };
        }
    };
    let ds: Result<Vec<Deformation>, _> = c.deformations.iter().map(deformation).collect();
    let ds = match ds {
        Ok(ds) => ds,
        Err(e) => {
            checks.push(CheckRecord::failed("deformations", Bound::AtMost(0.0), e));
            return SuiteOutput {
                report: SuiteReport::new("cotangent", checks, diags),
                tables,
            };
        }
    };

    let ident = Bound::AtMost(tol.deformation_identity);
    for (k, d) in ds.iter().enumerate() {
        checks.push(CheckRecord::from_result(
            format!("deformation_identity_{k}_m{}", d.m),
            ident,
            deformation_identity_residual(d, &chart),
        ));
    }

    let mut inv = Table::new("cotangent_invariants.csv", &["source", "m", "n", "re", "im"]);
    let std_bound = Bound::AtMost(tol.standard_invariants);
    match standard_invariants(&chart, c.nmax) {
        Ok((worst, values)) => {
            checks.push(CheckRecord::measured("standard_invariants", worst, std_bound));
            for (i, p) in values.iter().enumerate() {
                inv.push(vec!["standard".into(), 0usize.into(), (i + 1).into(), p.re.into(), p.im.into()]);
            }
        }
        Err(e) => checks.push(CheckRecord::failed("standard_invariants", std_bound, e)),
    }

    match variations(&ds, &chart, c.nmax) {
        Ok(v) => {
            checks.push(CheckRecord::measured("frequency_diagonality", v.diagonality, Bound::AtMost(tol.diagonality)));
            checks.push(CheckRecord::measured("amplitude_linearity", v.linearity, Bound::AtMost(tol.linearity)));
            checks.push(CheckRecord::measured("superposition", v.superposition, Bound::AtMost(tol.linearity)));
            let ks = kappas(cfg, &ds, &v.per_deformation);
            if let Some(&(_, k0)) = ks.first() {
                diags.push(Diagnostic::new("kappa_re", Some(k0.re)));
                diags.push(Diagnostic::new("kappa_im", Some(k0.im)));
            }
            if ks.len() >= 2 {
                let spread = ks.iter().fold(0.0_f64, |m, (_, k)| m.max((k - ks[0].1).norm()));
                checks.push(CheckRecord::measured("kappa_spread", spread, Bound::AtMost(tol.kappa)));
            }
            for (k, (d, vals)) in ds.iter().zip(&v.per_deformation).enumerate() {
                for (i, p) in vals.iter().enumerate() {
                    inv.push(vec![format!("d{k}").into(), (d.m as usize).into(), (i + 1).into(), p.re.into(), p.im.into()]);
                }
            }
        }
        Err(e) => checks.push(CheckRecord::failed("frequency_diagonality", Bound::AtMost(tol.diagonality), e)),
    }

    // finite-ε consistency on the first Hitchin-type harmonic deformation
    let slope_bound = Bound::AtMost(tol.finite_epsilon_slope);
    if let Some(d) = c
        .deformations
        .iter()
        .zip(&ds)
        .find(|(s, d)| s.phi.is_none() && d.is_hitchin())
        .map(|(_, d)| d)
    {
        let n = d.m as i64;
        let r = variation_of_invariants(&[*d], &chart, c.nmax).and_then(|v| {
            let slope = finite_variation_slope(d, &chart, n, c.finite_epsilon)?;
            Ok((slope - v[d.m as usize - 1]).norm())
        });
        checks.push(CheckRecord::from_result(format!("finite_epsilon_slope_m{}", d.m), slope_bound, r));
    }

    let mut header = vec!["r".to_string(), "A".into(), "B".into()];
    header.extend(ds.iter().enumerate().map(|(k, d)| format!("phi_d{k}_m{}", d.m)));
    let mut prof = Table {
        name: "cotangent_profiles.csv".into(),
        header,
        rows: Vec::new(),
    };
    for i in 1..=c.profile_points {
        let r = i as f64 / (c.profile_points + 1) as f64;
        let Ok((a, b)) = omega1(r) else { continue };
        let mut row = vec![r.into(), a.into(), b.into()];
        row.extend(ds.iter().map(|d| phi_profile(d, r).unwrap_or(f64::NAN).into()));
        prof.push(row);
    }
    tables.push(prof);
    tables.push(inv);
    SuiteOutput {
        report: SuiteReport::new("cotangent", checks, diags),
        tables,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn default_suite_passes() {
        let out = run(&RunConfig::default());
        for c in &out.report.checks {
            assert!(c.pass, "{c:?}");
        }
        let names: Vec<_> = out.report.checks.iter().map(|c| c.name.as_str()).collect();
        assert!(names.contains(&"kappa_spread") && names.contains(&"finite_epsilon_slope_m2"));
    }

    #[test]
    fn kappa_is_two_pi_i() {
        let out = run(&RunConfig::default());
        let get = |n: &str| out.report.diagnostics.iter().find(|d| d.name == n).unwrap().value.unwrap();
        assert!(get("kappa_re").abs() < 1e-8);
        assert!((get("kappa_im") - 2.0 * std::f64::consts::PI).abs() < 1e-8);
    }
}
