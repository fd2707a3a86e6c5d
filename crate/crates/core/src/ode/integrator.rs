//! Adaptive Dormand-Prince 5(4) integrator with event location.
//!
//! Events and grid samples inside an accepted step are evaluated by taking a
//! fresh single step of the required length from the step's left end, so
//! they carry the full fifth-order accuracy of the scheme.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A first-order system `y' = f(s, y)`.
pub trait OdeSystem {
    fn dim(&self) -> usize;
    /// Write `f(s, y)` into `dy`. Non-finite output makes the step fail.
    fn rhs(&self, s: f64, y: &[f64], dy: &mut [f64]);
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct IntegratorConfig {
    pub rtol: f64,
    pub atol: f64,
    pub max_step: f64,
    pub event_tol: f64,
    /// Smallest step before the integration is declared failed.
    pub min_step: f64,
}

impl Default for IntegratorConfig {
    fn default() -> Self {
        Self {
            rtol: 1e-10,
            atol: 1e-12,
            max_step: 1e-3,
            event_tol: 1e-12,
            min_step: 1e-18,
        }
    }
}

impl IntegratorConfig {
    pub fn validate(&self) -> Result<()> {
        let ok = [self.rtol, self.atol, self.max_step, self.event_tol, self.min_step].iter().all(|&v| v > 0.0 && v.is_finite());
        if !ok {
            return Err(Error::InvalidConfig(format!("integrator tolerances must be positive: {self:?}")));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Crossing {
    Rising,
    Falling,
    Either,
}

impl Crossing {
    fn matches(self, before: f64, after: f64) -> bool {
        match self {
            Crossing::Rising => before < 0.0 && after >= 0.0,
            Crossing::Falling => before > 0.0 && after <= 0.0,
            Crossing::Either => (before < 0.0 && after >= 0.0) || (before > 0.0 && after <= 0.0),
        }
    }
}

/// A terminal event: integration stops where `func` crosses zero.
pub struct Event<'a> {
    pub func: &'a dyn Fn(f64, &[f64]) -> f64,
    pub direction: Crossing,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct IntegratorStats {
    pub accepted: u64,
    pub rejected: u64,
    pub evaluations: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Solution {
    pub s_end: f64,
    pub y_end: Vec<f64>,
    /// Index of the event that stopped the integration.
    pub event: Option<usize>,
    /// `(s, y)` on the grid `s = j * sample_dt` strictly inside the run.
    pub samples: Vec<(f64, Vec<f64>)>,
    pub stats: IntegratorStats,
}

// Dormand-Prince coefficients.
const C: [f64; 7] = [0.0, 1.0 / 5.0, 3.0 / 10.0, 4.0 / 5.0, 8.0 / 9.0, 1.0, 1.0];
const A: [[f64; 6]; 7] = [
    [0.0; 6],
    [1.0 / 5.0, 0.0, 0.0, 0.0, 0.0, 0.0],
    [3.0 / 40.0, 9.0 / 40.0, 0.0, 0.0, 0.0, 0.0],
    [44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0, 0.0, 0.0, 0.0],
    [19372.0 / 6561.0, -25360.0 / 2187.0, 64448.0 / 6561.0, -212.0 / 729.0, 0.0, 0.0],
    [9017.0 / 3168.0, -355.0 / 33.0, 46732.0 / 5247.0, 49.0 / 176.0, -5103.0 / 18656.0, 0.0],
    [35.0 / 384.0, 0.0, 500.0 / 1113.0, 125.0 / 192.0, -2187.0 / 6784.0, 11.0 / 84.0],
];
// fifth-order weights minus embedded fourth-order weights
const E: [f64; 7] = [
    71.0 / 57600.0,
    0.0,
    -71.0 / 16695.0,
    71.0 / 1920.0,
    -17253.0 / 339200.0,
    22.0 / 525.0,
    -1.0 / 40.0,
];

struct Stepper<'a, S: OdeSystem + ?Sized> {
    sys: &'a S,
    k: Vec<Vec<f64>>,
    tmp: Vec<f64>,
    evals: u64,
}

impl<'a, S: OdeSystem + ?Sized> Stepper<'a, S> {
    fn new(sys: &'a S) -> Self {
        let d = sys.dim();
        Self {
            sys,
            k: vec![vec![0.0; d]; 7],
            tmp: vec![0.0; d],
            evals: 0,
        }
    }

    /// One step of size `h` from `(s, y)` with `f(s, y)` already in
    /// `k[0]`. Writes the fifth-order result to `out` and returns the
    /// scaled error norm (infinite if anything is non-finite).
    fn step(&mut self, s: f64, y: &[f64], h: f64, out: &mut [f64], cfg: &IntegratorConfig) -> f64 {
        let d = y.len();
        for stage in 1..7 {
            for i in 0..d {
                let mut acc = 0.0;
                for (j, a) in A[stage].iter().enumerate().take(stage) {
                    acc += a * self.k[j][i];
                }
                self.tmp[i] = y[i] + h * acc;
            }
            let (_, tail) = self.k.split_at_mut(stage);
            self.sys.rhs(s + C[stage] * h, &self.tmp, &mut tail[0]);
            self.evals += 1;
        }
        // stage 6 was evaluated at the fifth-order solution
        out.copy_from_slice(&self.tmp);
        let mut norm = 0.0;
        for i in 0..d {
            let mut e = 0.0;
            for (j, w) in E.iter().enumerate() {
                e += w * self.k[j][i];
            }
            e *= h;
            let scale = cfg.atol + cfg.rtol * y[i].abs().max(out[i].abs());
            norm += (e / scale).powi(2);
        }
        let norm = (norm / d as f64).sqrt();
        if norm.is_finite() && out.iter().all(|v| v.is_finite()) && self.k[6].iter().all(|v| v.is_finite()) {
            norm
        } else {
            f64::INFINITY
        }
    }

    /// Fifth-order value after a sub-step of length `h` from `(s, y)` whose
    /// derivative is `f0`.
    fn substep(&mut self, s: f64, y: &[f64], f0: &[f64], h: f64, cfg: &IntegratorConfig) -> Vec<f64> {
        self.k[0].copy_from_slice(f0);
        let mut out = vec![0.0; y.len()];
        self.step(s, y, h, &mut out, cfg);
        out
    }
}

/// Integrate from `(s0, y0)` until an event fires or `s_budget` is reached.
/// When `sample_dt` is set, the state is recorded at every multiple of it.
pub fn integrate<S: OdeSystem + ?Sized>(
    sys: &S,
    cfg: &IntegratorConfig,
    s0: f64,
    y0: &[f64],
    s_budget: f64,
    events: &[Event<'_>],
    sample_dt: Option<f64>,
) -> Result<Solution> {
    cfg.validate()?;
    let d = sys.dim();
    if y0.len() != d {
        return Err(Error::InvalidConfig(format!("initial state has {} components, system has {d}", y0.len())));
    }
    let mut st = Stepper::new(sys);
    let mut s = s0;
    let mut y = y0.to_vec();
    let mut f = vec![0.0; d];
    sys.rhs(s, &y, &mut f);
    st.evals += 1;
    if f.iter().any(|v| !v.is_finite()) {
        return Err(Error::Integration {
            s,
            reason: "right-hand side is not finite at the initial point".into(),
        });
    }
    let mut ev_vals: Vec<f64> = events.iter().map(|e| (e.func)(s, &y)).collect();
    let mut stats = IntegratorStats::default();
    let mut samples = Vec::new();
    let mut next_sample = sample_dt.map(|dt| ((s0 / dt).floor() + 1.0) * dt);
    let mut h = cfg.max_step.min(1e-4).min(s_budget - s0).max(cfg.min_step);
    let mut y_new = vec![0.0; d];
    loop {
        if s >= s_budget {
            stats.evaluations = st.evals;
            return Ok(Solution {
                s_end: s,
                y_end: y,
                event: None,
                samples,
                stats,
            });
        }
        h = h.min(cfg.max_step).min(s_budget - s);
        st.k[0].copy_from_slice(&f);
        let err = st.step(s, &y, h, &mut y_new, cfg);
        if err > 1.0 {
            stats.rejected += 1;
            let factor = if err.is_finite() { (0.9 * err.powf(-0.2)).clamp(0.1, 0.9) } else { 0.1 };
            h *= factor;
            if h < cfg.min_step || s + h <= s {
                return Err(Error::Integration {
                    s,
                    reason: format!("step size underflow (h = {h:e})"),
                });
            }
            continue;
        }
        stats.accepted += 1;
        let s_new = if s_budget - (s + h) < 1e-15 * s_budget.abs().max(1.0) { s_budget } else { s + h };
        let f_new = st.k[6].clone();

        // first event crossing inside the step, if any
        let new_vals: Vec<f64> = events.iter().map(|e| (e.func)(s_new, &y_new)).collect();
        let fired = events
            .iter()
            .enumerate()
            .filter(|(i, e)| e.direction.matches(ev_vals[*i], new_vals[*i]))
            .map(|(i, _)| i)
            .collect::<Vec<_>>();
        let mut stop: Option<(usize, f64, Vec<f64>)> = None;
        for &i in &fired {
            // bisection on the sub-step length
            let (mut lo, mut hi) = (0.0, s_new - s);
            let mut y_hi = y_new.clone();
            while hi - lo > cfg.event_tol {
                let mid = 0.5 * (lo + hi);
                let ym = st.substep(s, &y, &f, mid, cfg);
                if events[i].direction.matches(ev_vals[i], (events[i].func)(s + mid, &ym)) {
                    hi = mid;
                    y_hi = ym;
                } else {
                    lo = mid;
                }
            }
            if stop.as_ref().is_none_or(|(_, sh, _)| hi < *sh) {
                stop = Some((i, hi, y_hi));
            }
        }
        let limit = stop.as_ref().map_or(s_new, |(_, sh, _)| s + sh);
        if let (Some(dt), Some(ns)) = (sample_dt, next_sample.as_mut()) {
            while *ns < limit {
                let ys = if *ns == s { y.clone() } else { st.substep(s, &y, &f, *ns - s, cfg) };
                samples.push((*ns, ys));
                *ns += dt;
                // avoid drift in the grid
                *ns = (*ns / dt).round() * dt;
            }
        }
        if let Some((i, sh, ys)) = stop {
            stats.evaluations = st.evals;
            return Ok(Solution {
                s_end: s + sh,
                y_end: ys,
                event: Some(i),
                samples,
                stats,
            });
        }
        s = s_new;
        y.copy_from_slice(&y_new);
        f.copy_from_slice(&f_new);
        ev_vals = new_vals;
        let factor = if err == 0.0 { 5.0 } else { (0.9 * err.powf(-0.2)).clamp(0.2, 5.0) };
        h *= factor;
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    struct Linear(f64);

    impl OdeSystem for Linear {
        fn dim(&self) -> usize {
            1
        }
        fn rhs(&self, _s: f64, y: &[f64], dy: &mut [f64]) {
            dy[0] = self.0 * y[0];
        }
    }

    struct Constant;

    impl OdeSystem for Constant {
        fn dim(&self) -> usize {
            1
        }
        fn rhs(&self, _s: f64, _y: &[f64], dy: &mut [f64]) {
            dy[0] = 1.0;
        }
    }

    #[test]
    fn exponential_decay_event_at_ln2() {
        let half = |_s: f64, y: &[f64]| y[0] - 0.5;
        let ev = [Event {
            func: &half,
            direction: Crossing::Falling,
        }];
        let sol = integrate(&Linear(-1.0), &IntegratorConfig::default(), 0.0, &[1.0], 10.0, &ev, None).unwrap();
        assert_eq!(sol.event, Some(0));
        assert!((sol.s_end - 2f64.ln()).abs() < 1e-10, "{}", sol.s_end);
    }

    #[test]
    fn constant_rate_event_is_exact() {
        let two = |_s: f64, y: &[f64]| y[0] - 2.0;
        let ev = [Event {
            func: &two,
            direction: Crossing::Rising,
        }];
        let sol = integrate(&Constant, &IntegratorConfig::default(), 0.0, &[0.0], 10.0, &ev, None).unwrap();
        assert!((sol.s_end - 2.0).abs() < 1e-11);
    }

    #[test]
    fn budget_without_event() {
        let sol = integrate(&Linear(1.0), &IntegratorConfig::default(), 0.0, &[1.0], 1.0, &[], Some(0.25)).unwrap();
        assert_eq!(sol.event, None);
        assert!((sol.y_end[0] - 1f64.exp()).abs() < 1e-9);
        let ts: Vec<f64> = sol.samples.iter().map(|p| p.0).collect();
        assert_eq!(ts, vec![0.25, 0.5, 0.75]);
        for (s, y) in &sol.samples {
            assert!((y[0] - s.exp()).abs() < 1e-10);
        }
    }

    #[test]
    fn rejects_bad_tolerances() {
        let cfg = IntegratorConfig {
            rtol: 0.0,
            ..IntegratorConfig::default()
        };
        assert!(integrate(&Constant, &cfg, 0.0, &[0.0], 1.0, &[], None).is_err());
    }

    #[test]
    fn blow_up_reports_failure() {
        // y' = y^2 explodes at s = 1
        struct Square;
        impl OdeSystem for Square {
            fn dim(&self) -> usize {
                1
            }
            fn rhs(&self, _s: f64, y: &[f64], dy: &mut [f64]) {
                dy[0] = y[0] * y[0];
            }
        }
        let err = integrate(&Square, &IntegratorConfig::default(), 0.0, &[1.0], 2.0, &[], None).unwrap_err();
        assert!(err.is_numerical());
    }
}
