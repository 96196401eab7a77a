use super::{FlowConfig, NahmError, NahmState};
use crate::frame::{lie_bracket, InvariantVectorField, XAxis};
use crate::numerics::observed_order;

/// `(dV₁/dx, dV₂/dx, dV₃/dx) = (−[V₂,V₃], −[V₃,V₁], −[V₁,V₂])`.
pub fn nahm_rhs(state: &NahmState) -> [InvariantVectorField; 3] {
    let [v1, v2, v3] = &state.v;
    [
        lie_bracket(v2, v3).scale(-1.0),
        lie_bracket(v3, v1).scale(-1.0),
        lie_bracket(v1, v2).scale(-1.0),
    ]
}

fn shifted(state: &NahmState, a: f64, k: &[InvariantVectorField; 3]) -> NahmState {
    NahmState {
        x: state.x,
        v: [
            state.v[0].axpy(a, &k[0]),
            state.v[1].axpy(a, &k[1]),
            state.v[2].axpy(a, &k[2]),
        ],
    }
}

fn rk4_step(state: &NahmState, h: f64, x_next: f64) -> NahmState {
    let k1 = nahm_rhs(state);
    let k2 = nahm_rhs(&shifted(state, 0.5 * h, &k1));
    let k3 = nahm_rhs(&shifted(state, 0.5 * h, &k2));
    let k4 = nahm_rhs(&shifted(state, h, &k3));
    let mut v = state.v.clone();
    for i in 0..3 {
        let incr = k1[i]
            .add(&k2[i].scale(2.0))
            .add(&k3[i].scale(2.0))
            .add(&k4[i]);
        v[i] = v[i].axpy(h / 6.0, &incr);
    }
    NahmState { x: x_next, v }
}

/// States on a uniform x-grid, ascending in `x`.
#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory {
    pub step: f64,
    pub states: Vec<NahmState>,
}

impl Trajectory {
    pub fn len(&self) -> usize {
        self.states.len()
    }

    pub fn is_empty(&self) -> bool {
        self.states.is_empty()
    }

    pub fn modes(&self) -> usize {
        self.states[0].modes()
    }

    pub fn axis(&self) -> XAxis {
        XAxis::new(self.states[0].x, self.step, self.states.len())
    }

    /// Index of the state at `x = 0`, if the grid contains it.
    pub fn fold_index(&self) -> Option<usize> {
        self.states.iter().position(|s| s.x == 0.0)
    }

    /// Index of the sample closest to `x`.
    pub fn index_of(&self, x: f64) -> Option<usize> {
        let i = ((x - self.states[0].x) / self.step).round();
        if i < 0.0 || i as usize >= self.states.len() {
            return None;
        }
        let i = i as usize;
        ((self.states[i].x - x).abs() <= 1e-9 * self.step).then_some(i)
    }
}

fn check_initial(init: &NahmState, modes: usize) -> Result<(), NahmError> {
    if init.x != 0.0 {
        return Err(NahmError::InvalidInitialData(format!("initial x = {}", init.x)));
    }
    if init.modes() != modes || init.v.iter().any(|v| v.modes() != modes) {
        return Err(NahmError::InvalidInitialData(format!(
            "initial data uses {} modes, configuration {}",
            init.modes(),
            modes
        )));
    }
    if init.v[0].norm() != 0.0 {
        return Err(NahmError::InvalidInitialData("V1(0) is not zero".into()));
    }
    if !init.v[1].is_volume_preserving() || !init.v[2].is_volume_preserving() {
        return Err(NahmError::InvalidInitialData(
            "X2-components of V2(0), V3(0) must be constant in s".into(),
        ));
    }
    Ok(())
}

/// Classical fixed-step RK4 from the fold, forward to `x_max` and (when
/// `cfg.symmetric`) backward to `−x_max`. Grid points are exact multiples of
/// the step so that `x` and `−x` are sampled alike.
pub fn integrate(init: &NahmState, cfg: &FlowConfig) -> Result<Trajectory, NahmError> {
    let steps = cfg.steps()?;
    check_initial(init, cfg.modes)?;
    let run = |direction: f64| -> Result<Vec<NahmState>, NahmError> {
        let mut out = Vec::with_capacity(steps);
        let mut current = init.clone();
        for k in 1..=steps {
            let mut next = rk4_step(&current, direction * cfg.step, direction * k as f64 * cfg.step);
            if cfg.noise_filter > 0.0 {
                for v in next.v.iter_mut() {
                    *v = v.filter_below(cfg.noise_filter);
                }
            }
            if !(next.max_abs() <= cfg.blowup_bound) {
                return Err(NahmError::BlowUp {
                    last_valid_x: current.x,
                    bound: cfg.blowup_bound,
                });
            }
            out.push(next.clone());
            current = next;
        }
        Ok(out)
    };
    let forward = run(1.0)?;
    let mut states = Vec::with_capacity(2 * steps + 1);
    if cfg.symmetric {
        let mut backward = run(-1.0)?;
        backward.reverse();
        states.extend(backward);
    }
    states.push(init.clone());
    states.extend(forward);
    Ok(Trajectory {
        step: cfg.step,
        states,
    })
}

/// `max_x ‖V₁(x) + V₁(−x)‖`, `max_x ‖V₂(x) − V₂(−x)‖`, `max_x ‖V₃(x) − V₃(−x)‖`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ParityResiduals {
    pub v1_odd: f64,
    pub v2_even: f64,
    pub v3_even: f64,
}

impl ParityResiduals {
    pub fn max(&self) -> f64 {
        self.v1_odd.max(self.v2_even).max(self.v3_even)
    }
}

/// Checks that the flow commutes with `(x, V₁, V₂, V₃) ↦ (−x, −V₁, V₂, V₃)`.
pub fn parity_check(traj: &Trajectory) -> Result<ParityResiduals, NahmError> {
    let n = traj.len();
    let zero = traj.fold_index().ok_or(NahmError::AsymmetricRange)?;
    if n % 2 == 0 || zero != n / 2 {
        return Err(NahmError::AsymmetricRange);
    }
    let mut res = ParityResiduals {
        v1_odd: 0.0,
        v2_even: 0.0,
        v3_even: 0.0,
    };
    for k in 0..=zero {
        let plus = &traj.states[zero + k];
        let minus = &traj.states[zero - k];
        if plus.x != -minus.x {
            return Err(NahmError::AsymmetricRange);
        }
        res.v1_odd = res.v1_odd.max(plus.v[0].add(&minus.v[0]).max_abs());
        res.v2_even = res.v2_even.max(plus.v[1].sub(&minus.v[1]).max_abs());
        res.v3_even = res.v3_even.max(plus.v[2].sub(&minus.v[2]).max_abs());
    }
    Ok(res)
}

/// Richardson self-convergence of the flow across successively halved steps.
#[derive(Debug, Clone, PartialEq)]
pub struct FlowConvergence {
    pub steps: Vec<f64>,
    /// `differences[i] = max_x ‖V_{h_i}(x) − V_{h_{i+1}}(x)‖` on the coarse grid.
    pub differences: Vec<f64>,
    /// Observed orders from consecutive differences.
    pub orders: Vec<f64>,
}

/// Integrates with each step in `steps` (each the previous one divided by an
/// integer) and measures the difference between consecutive solutions.
pub fn flow_self_convergence(
    init: &NahmState,
    x_max: f64,
    steps: &[f64],
    blowup_bound: f64,
    noise_filter: f64,
) -> Result<FlowConvergence, NahmError> {
    if steps.len() < 3 {
        return Err(NahmError::InvalidConfig("need at least three steps".into()));
    }
    let trajectories = steps
        .iter()
        .map(|&h| {
            let mut cfg = FlowConfig::new(h, x_max, init.modes());
            cfg.blowup_bound = blowup_bound;
            cfg.noise_filter = noise_filter;
            integrate(init, &cfg)
        })
        .collect::<Result<Vec<_>, _>>()?;
    let mut differences = Vec::new();
    for pair in trajectories.windows(2) {
        let (coarse, fine) = (&pair[0], &pair[1]);
        let mut worst: f64 = 0.0;
        for state in &coarse.states {
            let j = fine
                .index_of(state.x)
                .ok_or_else(|| NahmError::InvalidConfig("steps are not nested".into()))?;
            for a in 0..3 {
                worst = worst.max(state.v[a].sub(&fine.states[j].v[a]).max_abs());
            }
        }
        differences.push(worst);
    }
    let orders = differences
        .windows(2)
        .zip(steps.windows(2))
        .map(|(d, h)| observed_order(d[0], d[1], h[0] / h[1]))
        .collect();
    Ok(FlowConvergence {
        steps: steps.to_vec(),
        differences,
        orders,
    })
}
