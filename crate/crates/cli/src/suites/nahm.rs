//! Flow, reconstruction and fold checks on the Heisenberg model and its
//! perturbation.

use super::SuiteOutput;
use crate::config::{NahmConfig, RunConfig, Tolerances};
use crate::report::{Bound, CheckRecord, Diagnostic, SuiteReport};
use crate::tables::{Cell, Table};
use foldhk::frame::{
    dilation_pullback, model_kahler_forms, model_metric_g0, ordered_mask, Coframe, CoframePoint, InvariantVectorField,
};
use foldhk::nahm::{
    closedness_residual, flow_self_convergence, fold_asymptotics, integrate, parity_check, reconstruct,
    wedge_identity_residual, FlowConfig, HKTriple, NahmError, NahmState, Trajectory,
};
use foldhk::numerics::observed_order;

fn flow_config(c: &NahmConfig, step: f64, x_max: f64) -> FlowConfig {
    let mut f = FlowConfig::new(step, x_max, c.modes);
    f.noise_filter = c.noise_filter;
    f.blowup_bound = c.blowup_bound;
    f
}

/// `max ‖V₁ − xX₁‖, ‖V₂ − X₂‖, ‖V₃ − X₃‖` over the trajectory.
fn model_state_defect(traj: &Trajectory) -> f64 {
    let n = traj.modes();
    let x1 = InvariantVectorField::frame(n, 0);
    let frame = [InvariantVectorField::frame(n, 1), InvariantVectorField::frame(n, 2)];
    traj.states.iter().fold(0.0, |worst: f64, st| {
        worst
            .max(st.v[0].sub(&x1.scale(st.x)).max_abs())
            .max(st.v[1].sub(&frame[0]).max_abs())
            .max(st.v[2].sub(&frame[1]).max_abs())
    })
}

/// Component-wise distance of the reconstructed metric from `g₀` (`|x| ≥ h`).
fn model_metric_defect(traj: &Trajectory, hk: &HKTriple) -> Result<f64, NahmError> {
    let mut worst: f64 = 0.0;
    for (st, m) in traj.states.iter().zip(&hk.metric) {
        let Some(m) = m else { continue };
        let want = model_metric_g0(st.x)?;
        for j in 0..traj.modes() {
            let got = m.at(j);
            for p in 0..4 {
                for q in 0..4 {
                    worst = worst.max((got[p][q] - want.c[p][q]).abs());
                }
            }
        }
    }
    Ok(worst)
}

fn model_form_defect(traj: &Trajectory, hk: &HKTriple) -> f64 {
    let mut worst: f64 = 0.0;
    for (ix, st) in traj.states.iter().enumerate() {
        let want = model_kahler_forms(st.x);
        for (a, w) in want.iter().enumerate() {
            for p in 0..4 {
                for q in p + 1..4 {
                    let (mask, sign) = ordered_mask(&[Coframe::ALL[p], Coframe::ALL[q]]);
                    let got = hk.omega[a].component(ix, mask).scale(sign as f64);
                    for v in got.values() {
                        worst = worst.max((v - w.c[p][q]).abs());
                    }
                }
            }
        }
    }
    worst
}

/// The flat datum: states, metric and forms are exact.
pub fn model_checks(cfg: &RunConfig) -> Vec<CheckRecord> {
    let c = &cfg.nahm;
    let tol = Bound::AtMost(cfg.tolerances.model_exact);
    let traj = match integrate(&NahmState::model(c.modes), &flow_config(c, c.model_step, c.model_x_max)) {
        Ok(t) => t,
        Err(e) => return vec![CheckRecord::failed("model_states", tol, e)],
    };
    let mut out = vec![CheckRecord::measured("model_states", model_state_defect(&traj), tol)];
    match reconstruct(&traj) {
        Ok(hk) => {
            out.push(CheckRecord::from_result("model_metric", tol, model_metric_defect(&traj, &hk)));
            out.push(CheckRecord::measured("model_forms", model_form_defect(&traj, &hk), tol));
        }
        Err(e) => out.push(CheckRecord::failed("model_metric", tol, e)),
    }
    out
}

/// `h_t^* g₀ = t³ g₀` on `x ∈ {1/P, …, 1}`.
pub fn dilation_checks(cfg: &RunConfig) -> Vec<CheckRecord> {
    let c = &cfg.nahm;
    let bound = Bound::AtMost(cfg.tolerances.dilation);
    let g0 = |p: CoframePoint| model_metric_g0(p.x);
    c.dilations
        .iter()
        .map(|&t| {
            let name = format!("dilation_t={t}");
            let defect = (1..=c.dilation_points).try_fold(0.0_f64, |worst, i| {
                let x = i as f64 / c.dilation_points as f64;
                let p = CoframePoint { x, s: 0.0 };
                let pulled = dilation_pullback(t, g0, p)?;
                let want = model_metric_g0(x)?.scale(t * t * t);
                Ok::<_, foldhk::frame::FrameError>(worst.max(pulled.max_abs_diff(&want)))
            });
            CheckRecord::from_result(name, bound, defect)
        })
        .collect()
}

struct Run {
    step: f64,
    traj: Trajectory,
    hk: HKTriple,
    closedness: [f64; 3],
    wedge: f64,
    parity: f64,
}

fn run_step(init: &NahmState, c: &NahmConfig, step: f64) -> Result<Run, NahmError> {
    let traj = integrate(init, &flow_config(c, step, c.x_max))?;
    let hk = reconstruct(&traj)?;
    Ok(Run {
        step,
        closedness: closedness_residual(&hk)?,
        wedge: wedge_identity_residual(&hk)?,
        parity: parity_check(&traj)?.max(),
        traj,
        hk,
    })
}

fn trajectory_table(run: &Run) -> Table {
    let mut t = Table::new(
        "nahm_trajectory.csv",
        &["x", "mu_min", "mu_max", "v1_minus_x_x1", "v2_minus_v2_0", "v3_minus_v3_0"],
    );
    let n = run.traj.modes();
    let x1 = InvariantVectorField::frame(n, 0);
    let fold = run.traj.fold_index().unwrap_or(0);
    let base = &run.traj.states[fold];
    for (st, mu) in run.traj.states.iter().zip(&run.hk.mu) {
        let vals = mu.values();
        let lo = vals.iter().cloned().fold(f64::INFINITY, f64::min);
        let hi = vals.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        t.push(vec![
            st.x.into(),
            lo.into(),
            hi.into(),
            st.v[0].sub(&x1.scale(st.x)).max_abs().into(),
            st.v[1].sub(&base.v[1]).max_abs().into(),
            st.v[2].sub(&base.v[2]).max_abs().into(),
        ]);
    }
    t
}

fn residual_table(runs: &[Run], differences: &[f64]) -> Table {
    let mut t = Table::new(
        "nahm_residuals.csv",
        &["step", "flow_difference", "closedness_1", "closedness_2", "closedness_3", "wedge", "parity"],
    );
    for (i, r) in runs.iter().enumerate() {
        let diff: Cell = differences.get(i).map_or(Cell::Text(String::new()), |d| (*d).into());
        t.push(vec![
            r.step.into(),
            diff,
            r.closedness[0].into(),
            r.closedness[1].into(),
            r.closedness[2].into(),
            r.wedge.into(),
            r.parity.into(),
        ]);
    }
    t
}

/// Order, closedness, wedge, parity and fold checks on the perturbed datum.
pub fn perturbed_checks(cfg: &RunConfig) -> (Vec<CheckRecord>, Vec<Diagnostic>, Vec<Table>) {
    let c = &cfg.nahm;
    let tol: &Tolerances = &cfg.tolerances;
    let init = NahmState::perturbed(c.modes, c.epsilon);
    let mut checks = Vec::new();
    let mut diags = Vec::new();
    let mut tables = Vec::new();

    let order_band = Bound::Within {
        min: tol.flow_order_min,
        max: tol.flow_order_max,
    };
    let differences = match flow_self_convergence(&init, c.x_max, &c.steps, c.blowup_bound, c.noise_filter) {
        Ok(conv) => {
            for (i, o) in conv.orders.iter().enumerate() {
                checks.push(CheckRecord::measured(format!("flow_order_{i}"), *o, order_band));
            }
            conv.differences
        }
        Err(e) => {
            checks.push(CheckRecord::failed("flow_order_0", order_band, e));
            Vec::new()
        }
    };

    let runs: Result<Vec<Run>, NahmError> = c.steps.iter().map(|&h| run_step(&init, c, h)).collect();
    let runs = match runs {
        Ok(r) => r,
        Err(e) => {
            checks.push(CheckRecord::failed("reconstruction", Bound::AtMost(0.0), e));
            return (checks, diags, tables);
        }
    };

    let worst = |r: &Run| r.closedness.iter().cloned().fold(0.0, f64::max);
    for (i, pair) in runs.windows(2).enumerate() {
        let order = observed_order(worst(&pair[0]), worst(&pair[1]), pair[0].step / pair[1].step);
        checks.push(CheckRecord::measured(
            format!("closedness_order_{i}"),
            order,
            Bound::AtLeast(tol.closedness_order_min),
        ));
    }
    let wedge = runs.iter().fold(0.0_f64, |m, r| m.max(r.wedge));
    checks.push(CheckRecord::measured("wedge_identity", wedge, Bound::AtMost(tol.wedge)));
    let parity = runs.iter().fold(0.0_f64, |m, r| m.max(r.parity));
    checks.push(CheckRecord::measured("parity", parity, Bound::AtMost(tol.parity)));

    let finest = runs.last().expect("at least three steps");
    let v1_band = Bound::Within {
        min: tol.v1_exponent_min,
        max: tol.v1_exponent_max,
    };
    match fold_asymptotics(&finest.traj, &finest.hk) {
        Ok(rep) => {
            checks.push(match rep.v1_exponent {
                Some(e) => CheckRecord::measured("v1_fold_exponent", e, v1_band),
                None => CheckRecord::failed("v1_fold_exponent", v1_band, "remainder vanishes identically"),
            });
            diags.push(Diagnostic::new("omega_fold_exponent", rep.omega_exponent));
            diags.push(Diagnostic::new("quaternion_fold_exponent", rep.quaternion_exponent));
            diags.push(Diagnostic::new("mu_at_fold", Some(rep.mu_at_fold)));
            diags.push(Diagnostic::new("mu_odd_defect", Some(rep.mu_odd_defect)));
            let mut fit = Table::new("nahm_fold_fit.csv", &["s", "mu_c1", "mu_c3"]);
            for (j, (c1, c3)) in rep.mu_c1.iter().zip(&rep.mu_c3).enumerate() {
                fit.push(vec![(j as f64 / c.modes as f64).into(), (*c1).into(), (*c3).into()]);
            }
            tables.push(fit);
        }
        Err(e) => checks.push(CheckRecord::failed("v1_fold_exponent", v1_band, e)),
    }
    for (r, d) in runs.iter().zip(&differences) {
        diags.push(Diagnostic::new(format!("flow_difference_h={}", r.step), Some(*d)));
    }
    for r in &runs {
        diags.push(Diagnostic::new(format!("closedness_h={}", r.step), Some(worst(r))));
    }
    tables.insert(0, trajectory_table(finest));
    tables.insert(1, residual_table(&runs, &differences));
    (checks, diags, tables)
}

pub fn run(cfg: &RunConfig) -> SuiteOutput {
    let mut checks = model_checks(cfg);
    checks.extend(dilation_checks(cfg));
    let (perturbed, diagnostics, tables) = perturbed_checks(cfg);
    checks.extend(perturbed);
    SuiteOutput {
        report: SuiteReport::new("nahm", checks, diagnostics),
        tables,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn small() -> RunConfig {
        let mut cfg = RunConfig::default();
        cfg.nahm.modes = 16;
        cfg.nahm.steps = vec![0.05, 0.025, 0.0125];
        cfg
    }

    #[test]
    fn model_passes() {
        assert!(model_checks(&small()).iter().all(|c| c.pass));
    }

    #[test]
    fn dilation_exact() {
        for c in dilation_checks(&RunConfig::default()) {
            assert_eq!(c.value, Some(0.0), "{c:?}");
        }
    }

    #[test]
    fn blow_up_is_a_failed_check() {
        let mut cfg = small();
        cfg.nahm.blowup_bound = 1e-3;
        let (checks, _, _) = perturbed_checks(&cfg);
        assert!(checks.iter().any(|c| !c.pass && c.note.is_some()));
    }

    #[test]
    fn tables_cover_the_finest_run() {
        let cfg = small();
        let (_, _, tables) = perturbed_checks(&cfg);
        let names: Vec<_> = tables.iter().map(|t| t.name.as_str()).collect();
        assert_eq!(names, ["nahm_trajectory.csv", "nahm_residuals.csv", "nahm_fold_fit.csv"]);
        assert_eq!(tables[0].rows.len(), 81);
        assert_eq!(tables[1].rows.len(), 3);
    }
}
