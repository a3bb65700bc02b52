//! Convergence, conditioning and single-run experiments.

use mdrk_core::mdrk::{integrate_with, Coupling, Formulation, MethodSpec};
use mdrk_core::newton::empirical_order_eps;
use mdrk_core::odesys::problem_by_name;
use mdrk_core::{builtin_tableau, Error, FluxModel, JacobianMode, NewtonConfig, State, StrategyKind};
use rayon::prelude::*;

use crate::error::{LabError, Result};
use crate::record::RunRecord;
use crate::reference::{reference_state, ReferencePolicy};

/// The method-selecting flags of a sweep.
#[derive(Debug, Clone)]
pub struct MethodChoice {
    pub scheme: String,
    pub strategy: StrategyKind,
    pub formulation: Formulation,
    pub coupling: Coupling,
    pub halfwidth: Option<usize>,
    pub newton: NewtonConfig,
}

impl MethodChoice {
    pub fn new(scheme: &str, strategy: StrategyKind, formulation: Formulation, coupling: Coupling) -> Self {
        Self {
            scheme: scheme.to_string(),
            strategy,
            formulation,
            coupling,
            halfwidth: None,
            newton: NewtonConfig::default(),
        }
    }

    pub fn with_halfwidth(mut self, p: usize) -> Self {
        self.halfwidth = Some(p);
        self
    }

    pub fn with_newton(mut self, newton: NewtonConfig) -> Self {
        self.newton = newton;
        self
    }

    pub fn spec(&self) -> Result<MethodSpec> {
        let mut spec = MethodSpec::new(
            builtin_tableau(&self.scheme)?,
            self.strategy,
            self.formulation,
            self.coupling,
        )?
        .with_newton(self.newton);
        if let Some(p) = self.halfwidth {
            spec = spec.with_halfwidth(p);
        }
        Ok(spec)
    }
}

/// Result of one integration, successful or not.
#[derive(Debug, Clone)]
pub struct RunOutcome {
    pub record: RunRecord,
    /// Final state; `None` when the run failed.
    pub y: Option<State>,
    /// Newton iterations of each completed step.
    pub step_iterations: Vec<usize>,
    /// Solver failure that ended the run early.
    pub failure: Option<String>,
}

/// Integrates `model` in `n` steps. Solver failures are recorded, configuration errors returned.
pub fn run_point(spec: &MethodSpec, model: &FluxModel, n: usize) -> Result<RunOutcome> {
    spec.check_model(model)?;
    let mut cond_sum = 0.0;
    let mut cond_count = 0usize;
    let mut steps = Vec::new();
    let res = integrate_with(spec, model, n, |_, trace| {
        if let Some(m) = trace.monitored() {
            cond_sum += m.report.cond1.iter().sum::<f64>();
            cond_count += m.report.cond1.len();
        }
        steps.push(trace.newton_iterations());
    });
    let mut iters: usize = steps.iter().sum();
    let (y, failure) = match res {
        Ok(run) => (Some(run.y), None),
        Err(e @ Error::NotConverged { .. }) => {
            if let Error::NotConverged { report, .. } = &e {
                cond_sum += report.cond1.iter().sum::<f64>();
                cond_count += report.cond1.len();
                iters += report.n_iter;
            }
            (None, Some(e.to_string()))
        }
        Err(e @ (Error::SingularJacobian { .. } | Error::NonFinite(_))) => (None, Some(e.to_string())),
        Err(e) => return Err(e.into()),
    };
    let mean = (cond_count > 0).then(|| cond_sum / cond_count as f64);
    let mut method = spec.method_id();
    if spec.newton().jacobian_mode == JacobianMode::Analytic {
        method.push_str("/analytic-jac");
    }
    Ok(RunOutcome {
        record: RunRecord {
            method,
            epsilon: model.epsilon(),
            dt: model.t_end() / n as f64,
            n_steps: n,
            l2_error: None,
            eoc: None,
            n_iter_total: iters,
            mean_cond1: mean.filter(|m| m.is_finite()),
            eo_eps: None,
            converged: y.is_some(),
        },
        y,
        step_iterations: steps,
        failure,
    })
}

fn model(problem: &str, epsilon: f64, t_end: f64) -> Result<FluxModel> {
    if !(t_end > 0.0) {
        return Err(LabError::Usage(format!("end time must be positive, got {t_end}")));
    }
    Ok(problem_by_name(problem, epsilon)?.with_t_end(t_end))
}

/// Error-vs-resolution sweep. `n_list` must be strictly increasing.
pub fn convergence(
    choice: &MethodChoice,
    problem: &str,
    epsilon: f64,
    t_end: f64,
    n_list: &[usize],
    policy: &ReferencePolicy,
) -> Result<Vec<RunRecord>> {
    if n_list.is_empty() || n_list[0] == 0 || n_list.windows(2).any(|w| w[0] >= w[1]) {
        return Err(LabError::Usage(
            "step counts must be positive and strictly increasing".into(),
        ));
    }
    let spec = choice.spec()?;
    let model = model(problem, epsilon, t_end)?;
    spec.check_model(&model)?;
    let reference = reference_state(problem, epsilon, t_end, *n_list.last().unwrap(), policy)?;
    let outcomes = n_list
        .par_iter()
        .map(|&n| run_point(&spec, &model, n))
        .collect::<Result<Vec<_>>>()?;
    let mut rows: Vec<RunRecord> = outcomes
        .into_iter()
        .map(|o| {
            let mut r = o.record;
            r.l2_error = o.y.map(|y| (y - &reference).norm());
            r
        })
        .collect();
    fill_eoc(&mut rows);
    Ok(rows)
}

/// EOC between consecutive rows, `log(e_{i−1}/e_i) / log(N_i/N_{i−1})`.
pub fn fill_eoc(rows: &mut [RunRecord]) {
    for i in 1..rows.len() {
        let (a, b) = (&rows[i - 1], &rows[i]);
        rows[i].eoc = match (a.l2_error, b.l2_error) {
            (Some(ea), Some(eb)) if ea > 0.0 && eb > 0.0 => {
                Some((ea / eb).ln() / (b.n_steps as f64 / a.n_steps as f64).ln())
            }
            _ => None,
        };
    }
}

/// Conditioning sweep over `eps_list` with a fixed step count.
pub fn conditioning(
    choice: &MethodChoice,
    problem: &str,
    eps_list: &[f64],
    t_end: f64,
    n: usize,
) -> Result<Vec<RunRecord>> {
    if eps_list.is_empty() || n == 0 {
        return Err(LabError::Usage("need at least one ε and one step".into()));
    }
    let spec = choice.spec()?;
    let models = eps_list
        .iter()
        .map(|&e| model(problem, e, t_end))
        .collect::<Result<Vec<_>>>()?;
    let mut rows = models
        .par_iter()
        .map(|m| run_point(&spec, m, n).map(|o| o.record))
        .collect::<Result<Vec<_>>>()?;
    fill_eo_eps(&mut rows);
    Ok(rows)
}

/// `EO_ε` between consecutive rows whose ε are equal (order 0) or a decade apart.
pub fn fill_eo_eps(rows: &mut [RunRecord]) {
    for i in 1..rows.len() {
        let (a, b) = (&rows[i - 1], &rows[i]);
        let step = (a.epsilon / b.epsilon).log10();
        rows[i].eo_eps = match (a.mean_cond1, b.mean_cond1) {
            _ if a.epsilon == b.epsilon => Some(0.0),
            (Some(ma), Some(mb)) if (step - 1.0).abs() < 1e-9 => {
                empirical_order_eps(&[(a.epsilon, ma), (b.epsilon, mb)])
                    .ok()
                    .map(|v| v[0])
            }
            _ => None,
        };
    }
}

/// A single integration; the error column is filled when the problem has an exact solution.
pub fn single_run(choice: &MethodChoice, problem: &str, epsilon: f64, t_end: f64, n: usize) -> Result<RunOutcome> {
    let spec = choice.spec()?;
    let model = model(problem, epsilon, t_end)?;
    let mut out = run_point(&spec, &model, n)?;
    if let (Some(y), Some(exact)) = (&out.y, model.reference(t_end)) {
        out.record.l2_error = Some((y - exact).norm());
    }
    Ok(out)
}

/// Least-squares slope of `y` against `x`.
pub fn ls_slope(x: &[f64], y: &[f64]) -> f64 {
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let sxy: f64 = x.iter().zip(y).map(|(a, b)| (a - mx) * (b - my)).sum();
    let sxx: f64 = x.iter().map(|a| (a - mx).powi(2)).sum();
    sxy / sxx
}

/// Order fitted to the last `k` rows: slope of `log₂ e` against `log₂ Δt`.
pub fn fitted_order(rows: &[RunRecord], k: usize) -> Option<f64> {
    let tail = &rows[rows.len().checked_sub(k)?..];
    let pts: Option<Vec<(f64, f64)>> = tail
        .iter()
        .map(|r| r.l2_error.filter(|e| *e > 0.0).map(|e| (r.dt.log2(), e.log2())))
        .collect();
    let (x, y): (Vec<f64>, Vec<f64>) = pts?.into_iter().unzip();
    Some(ls_slope(&x, &y))
}

/// Slope of `log₁₀ μ(cond)` against `−log₁₀ ε` over all rows with a measured condition number.
pub fn conditioning_slope(rows: &[RunRecord]) -> Option<f64> {
    let (x, y): (Vec<f64>, Vec<f64>) = rows
        .iter()
        .filter_map(|r| r.mean_cond1.map(|m| (-r.epsilon.log10(), m.log10())))
        .unzip();
    (x.len() >= 2).then(|| ls_slope(&x, &y))
}
