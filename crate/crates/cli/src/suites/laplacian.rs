//! Mode solver: convergence, energy sweeps, expansion laws, the commuted
//! identity and the Dirichlet/Neumann assembly pattern.

use super::SuiteOutput;
use crate::config::{Boundary, ModeSpec, RunConfig};
use crate::report::{Bound, CheckRecord, Diagnostic, SuiteReport};
use crate::tables::Table;
use foldhk::laplacian::{
    commuted_identity_check, dn_assemble, energy_check, entry_condition, expansion_fit, manufactured_study,
    solve_mode, BoundaryCondition, LaplacianError, ModeProblem,
};
use foldhk::numerics::observed_order;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::f64::consts::PI;

/// Right-hand side of the configured modes.
pub fn mode_rhs(x: f64) -> f64 {
    1.0 + x * x
}

fn bc(b: Boundary) -> BoundaryCondition {
    match b {
        Boundary::Dirichlet => BoundaryCondition::Dirichlet,
        Boundary::Neumann => BoundaryCondition::Neumann,
    }
}

fn admissible(rng: &mut ChaCha8Rng) -> (f64, i64) {
    let lambda: f64 = rng.gen_range(0.5..4.0);
    let bound = (lambda * lambda).floor() as i64;
    (lambda, rng.gen_range(-bound..=bound))
}

/// `Σ_{k≤6} a_k cos kπx + b_k sin kπx` with uniform coefficients in `[−1, 1]`.
fn band_limited(rng: &mut ChaCha8Rng) -> impl Fn(f64) -> f64 {
    let a: [f64; 7] = std::array::from_fn(|_| rng.gen_range(-1.0..1.0));
    let b: [f64; 7] = std::array::from_fn(|_| rng.gen_range(-1.0..1.0));
    move |x| (0..7).map(|k| a[k] * (k as f64 * PI * x).cos() + b[k] * (k as f64 * PI * x).sin()).sum()
}

/// Manufactured solution `sin πx` at `M/2` and `M` intervals, random admissible modes.
pub fn manufactured_checks(cfg: &RunConfig) -> Vec<CheckRecord> {
    let c = &cfg.laplacian;
    let band = Bound::Within {
        min: 2.0 - cfg.tolerances.manufactured_order,
        max: 2.0 + cfg.tolerances.manufactured_order,
    };
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    (0..c.manufactured_trials)
        .map(|k| {
            let (l, n) = admissible(&mut rng);
            let r = manufactured_study(l, n, c.intervals / 2).map(|s| s.order);
            CheckRecord::from_result(format!("manufactured_order_{k}"), band, r).with_note(format!("lambda={l}, n={n}"))
        })
        .collect()
}

/// Seeded random trials of the energy inequality; the value is the number passing.
pub fn energy_sweep(cfg: &RunConfig) -> (CheckRecord, Diagnostic) {
    let c = &cfg.laplacian;
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed.wrapping_add(1));
    let mut passed = 0usize;
    let mut worst_ratio: f64 = 0.0;
    let mut first_error = None;
    for trial in 0..c.energy_trials {
        let (l, n) = admissible(&mut rng);
        let b = if trial % 2 == 0 { BoundaryCondition::Dirichlet } else { BoundaryCondition::Neumann };
        let g = band_limited(&mut rng);
        let r = ModeProblem::from_fn(l, n, b, c.intervals, g)
            .and_then(|p| solve_mode(&p).and_then(|s| energy_check(&p, &s)));
        match r {
            Ok(e) => {
                passed += e.pass as usize;
                if e.rhs > 0.0 {
                    worst_ratio = worst_ratio.max(e.lhs / e.rhs);
                }
            }
            Err(e) => {
                first_error.get_or_insert(e.to_string());
            }
        }
    }
    let mut check = CheckRecord::measured("energy_inequality_trials", passed as f64, Bound::AtLeast(c.energy_trials as f64));
    if let Some(e) = first_error {
        check = check.with_note(e);
    }
    (check, Diagnostic::new("energy_worst_ratio", Some(worst_ratio)))
}

struct ModeOutcome {
    checks: Vec<CheckRecord>,
    table: Option<Table>,
}

fn mode_checks(cfg: &RunConfig, idx: usize, mode: &ModeSpec) -> ModeOutcome {
    let tol = &cfg.tolerances;
    let m = cfg.laplacian.intervals;
    let tag = |what: &str| format!("mode_{idx}_{what}");
    let rel = Bound::AtMost(tol.expansion_relative);
    let order_band = Bound::Within {
        min: 2.0 - tol.commuted_order,
        max: 2.0 + tol.commuted_order,
    };
    let run = || -> Result<(Vec<CheckRecord>, Table), LaplacianError> {
        let p = ModeProblem::from_fn(mode.lambda, mode.n, bc(mode.bc), m, mode_rhs)?;
        let sol = solve_mode(&p)?;
        let folded = solve_mode(&p.folded())?;
        let fit = expansion_fit(&p, &folded)?;
        let energy = energy_check(&p, &sol)?;
        let coarse_p = ModeProblem::from_fn(mode.lambda, mode.n, bc(mode.bc), m / 2, mode_rhs)?;
        let coarse = commuted_identity_check(&coarse_p, &solve_mode(&coarse_p)?)?;
        let fine = commuted_identity_check(&p, &sol)?;
        let mut checks = vec![
            CheckRecord::measured(tag("expansion_f2"), fit.f2_error, rel),
            CheckRecord::measured(tag("expansion_f3"), fit.f3_error, rel),
            CheckRecord::measured(tag("energy_ratio"), energy.lhs / energy.rhs, Bound::AtMost(1.0 + 5.0 / m as f64)),
        ];
        checks.push(if fine.residual == 0.0 {
            CheckRecord::failed(tag("commuted_order"), order_band, "residual vanishes at the fine grid")
        } else {
            CheckRecord::measured(tag("commuted_order"), observed_order(coarse.residual, fine.residual, 2.0), order_band)
        });
        let mut t = Table::new(format!("laplacian_mode_{idx}.csv"), &["x", "g", "f", "f_folded"]);
        for i in 0..=m {
            t.push(vec![sol.x[i].into(), p.rhs[i].into(), sol.f[i].into(), folded.f[i].into()]);
        }
        Ok((checks, t))
    };
    match run() {
        Ok((checks, t)) => ModeOutcome { checks, table: Some(t) },
        Err(e) => ModeOutcome {
            checks: vec![CheckRecord::failed(tag("solve"), Bound::AtMost(0.0), e)],
            table: None,
        },
    }
}

/// Each of the nine entries, solved alone, carries its own fold condition.
pub fn assembly_check() -> CheckRecord {
    let m = 64;
    let bump: Vec<f64> = (0..=m).map(|i| 1.0 + i as f64 / m as f64).collect();
    let (lambda, n) = (2.0, 1);
    let h = 1.0 / m as f64;
    let mut correct = 0usize;
    let mut err = None;
    for r in 0..3 {
        for c in 0..3 {
            let mut v: [[Vec<f64>; 3]; 3] = std::array::from_fn(|_| std::array::from_fn(|_| vec![0.0; m + 1]));
            v[r][c] = bump.clone();
            v[c][r] = bump.clone();
            if r == c {
                let other = (r + 1) % 3;
                v[other][other] = bump.iter().map(|x| -x).collect();
            }
            let a = match dn_assemble(&v, lambda, n) {
                Ok(a) => a,
                Err(e) => {
                    err.get_or_insert(e.to_string());
                    continue;
                }
            };
            let f = &a.entries[r][c].f;
            let ok = match entry_condition(r, c) {
                BoundaryCondition::Dirichlet => f[0] == 0.0 && f[1] != 0.0,
                BoundaryCondition::Neumann => {
                    // the reflected-ghost row: (f₀ − f₁)/h² + ½ V(0) f₀ = ½ (x g)(0) = 0
                    let row0 = (f[0] - f[1]) / (h * h) + 0.5 * lambda * lambda * f[0];
                    f[0] != 0.0 && row0.abs() <= 1e-9 * f[0].abs()
                }
            };
            correct += (ok && a.conditions[r][c] == entry_condition(r, c)) as usize;
        }
    }
    let check = CheckRecord::measured("assembly_pattern_entries", correct as f64, Bound::AtLeast(9.0));
    match err {
        Some(e) => check.with_note(e),
        None => check,
    }
}

pub fn run(cfg: &RunConfig) -> SuiteOutput {
    let mut checks = manufactured_checks(cfg);
    let (energy, energy_diag) = energy_sweep(cfg);
    checks.push(energy);
    let mut tables = Vec::new();
    for (i, mode) in cfg.laplacian.modes.iter().enumerate() {
        let out = mode_checks(cfg, i, mode);
        checks.extend(out.checks);
        tables.extend(out.table);
    }
    checks.push(assembly_check());
    SuiteOutput {
        report: SuiteReport::new("laplacian", checks, vec![energy_diag]),
        tables,
    }
}
