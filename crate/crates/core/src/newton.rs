//! Damped Newton iteration for small dense systems `F(Y) = 0`.
//!
//! Every iteration factors the Newton matrix by LU with partial pivoting and
//! records its exact 1-norm condition number, so a solve doubles as a
//! conditioning measurement.

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};
use crate::linalg::{self, Lu};

/// How the Newton matrix is obtained.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum JacobianMode {
    /// Forward differences of the residual (Jacobian-free for the user).
    FiniteDifference,
    /// Caller-supplied Jacobian.
    Analytic,
}

/// Backtracking on the residual norm.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Damping {
    pub enabled: bool,
    /// Step shrink factor, in `(0, 1)`.
    pub factor: f64,
    /// Once the step fraction falls below this, the full step is taken instead.
    pub min_fraction: f64,
}

impl Default for Damping {
    fn default() -> Self {
        Self {
            enabled: true,
            factor: 0.5,
            min_fraction: 2f64.powi(-10),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NewtonConfig {
    /// Stop when `‖F‖₂ < 10^{-n_tol}`.
    pub n_tol: u32,
    /// Stop when `‖F‖₂ / ‖F(Y⁰)‖₂ < 10^{-n_tol0}`.
    pub n_tol0: u32,
    pub max_iter: usize,
    pub damping: Damping,
    pub jacobian_mode: JacobianMode,
    /// Relative perturbation for finite-difference columns.
    pub fd_step_scale: f64,
    /// Divergence is declared once `‖F‖₂` exceeds this factor times `max(1, ‖F(Y⁰)‖₂)`.
    pub divergence_factor: f64,
    /// Pivots below `pivot_floor · ‖F'‖₁` are treated as singular.
    pub pivot_floor: f64,
}

impl Default for NewtonConfig {
    fn default() -> Self {
        Self {
            n_tol: 12,
            n_tol0: 12,
            max_iter: 1000,
            damping: Damping::default(),
            jacobian_mode: JacobianMode::FiniteDifference,
            fd_step_scale: f64::EPSILON.sqrt(),
            divergence_factor: 1e12,
            pivot_floor: 1e3 * f64::EPSILON,
        }
    }
}

impl NewtonConfig {
    /// Settings for conditioning studies: tolerances `10^{-12}`, up to 10000 iterations,
    /// and only exactly vanishing pivots rejected, since these studies deliberately drive
    /// `cond₁` towards the reciprocal machine epsilon.
    pub fn conditioning() -> Self {
        Self {
            max_iter: 10_000,
            pivot_floor: 0.0,
            ..Self::default()
        }
    }

    pub fn with_tolerances(mut self, n_tol: u32, n_tol0: u32) -> Self {
        self.n_tol = n_tol;
        self.n_tol0 = n_tol0;
        self
    }

    pub fn with_max_iter(mut self, max_iter: usize) -> Self {
        self.max_iter = max_iter;
        self
    }

    pub fn with_pivot_floor(mut self, floor: f64) -> Self {
        self.pivot_floor = floor;
        self
    }

    pub fn with_jacobian_mode(mut self, mode: JacobianMode) -> Self {
        self.jacobian_mode = mode;
        self
    }

    pub fn validate(&self) -> Result<()> {
        let d = &self.damping;
        if self.n_tol < 1 || self.n_tol0 < 1 {
            return Err(Error::InvalidParameters("Newton tolerance exponents must be ≥ 1".into()));
        }
        if self.max_iter < 1 {
            return Err(Error::InvalidParameters("max_iter must be ≥ 1".into()));
        }
        if !(d.factor > 0.0 && d.factor < 1.0) || !(d.min_fraction > 0.0) {
            return Err(Error::InvalidParameters(format!(
                "damping factor must lie in (0, 1), got {}",
                d.factor
            )));
        }
        if !(self.fd_step_scale > 0.0) {
            return Err(Error::InvalidParameters("fd_step_scale must be positive".into()));
        }
        Ok(())
    }
}

/// Statistics of one Newton solve.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct NewtonReport {
    pub converged: bool,
    pub n_iter: usize,
    /// `‖F(Y⁰)‖₂`.
    pub initial_residual: f64,
    /// `‖F‖₂` after each update.
    pub residuals: Vec<f64>,
    /// `cond₁(F')` of the matrix factored in each iteration.
    pub cond1: Vec<f64>,
    /// Arithmetic mean of `cond1`; NaN when no iteration was needed.
    pub mean_cond1: f64,
    /// Accepted step fraction per iteration (1 = undamped).
    pub step_fractions: Vec<f64>,
    /// Iteration (1-based) at which divergence was declared.
    pub divergence_iter: Option<usize>,
}

impl NewtonReport {
    fn finish(mut self) -> Self {
        self.mean_cond1 = if self.cond1.is_empty() {
            f64::NAN
        } else {
            self.cond1.iter().sum::<f64>() / self.cond1.len() as f64
        };
        self
    }

    pub fn final_residual(&self) -> f64 {
        self.residuals.last().copied().unwrap_or(self.initial_residual)
    }
}

fn all_finite(v: &DVector<f64>) -> bool {
    v.iter().all(|x| x.is_finite())
}

/// Forward-difference Jacobian; column `j` uses the step `scale · (1 + |y_j|)`.
pub fn fd_jacobian<F>(residual: F, y: &DVector<f64>, scale: f64) -> Result<DMatrix<f64>>
where
    F: Fn(&DVector<f64>) -> Result<DVector<f64>>,
{
    let f0 = residual(y)?;
    fd_jacobian_at(&residual, y, &f0, scale)
}

fn fd_jacobian_at<F>(
    residual: &F,
    y: &DVector<f64>,
    f0: &DVector<f64>,
    scale: f64,
) -> Result<DMatrix<f64>>
where
    F: Fn(&DVector<f64>) -> Result<DVector<f64>>,
{
    if !all_finite(f0) {
        return Err(Error::NonFinite("finite-difference base evaluation"));
    }
    let n = y.len();
    let mut jac = DMatrix::zeros(f0.len(), n);
    let mut probe = y.clone();
    for j in 0..n {
        let h = scale * (1.0 + y[j].abs());
        probe[j] = y[j] + h;
        // Use the representable step to keep the quotient consistent.
        let h_eff = probe[j] - y[j];
        let fj = residual(&probe)?;
        if !all_finite(&fj) {
            return Err(Error::NonFinite("finite-difference column"));
        }
        jac.set_column(j, &((fj - f0) / h_eff));
        probe[j] = y[j];
    }
    Ok(jac)
}

/// Solves `F(Y) = 0` from `y_init`.
///
/// Non-convergence within `max_iter` and divergence are reported through
/// [`NewtonReport`]; only a singular Newton matrix or a non-finite initial
/// residual are errors.
pub fn solve<F, J>(
    residual: F,
    jacobian: Option<J>,
    y_init: &DVector<f64>,
    cfg: &NewtonConfig,
) -> Result<(DVector<f64>, NewtonReport)>
where
    F: Fn(&DVector<f64>) -> Result<DVector<f64>>,
    J: Fn(&DVector<f64>) -> Result<DMatrix<f64>>,
{
    cfg.validate()?;
    if cfg.jacobian_mode == JacobianMode::Analytic && jacobian.is_none() {
        return Err(Error::InvalidParameters(
            "analytic Jacobian mode requires a Jacobian".into(),
        ));
    }
    let abs_tol = 10f64.powi(-(cfg.n_tol as i32));
    let rel_tol = 10f64.powi(-(cfg.n_tol0 as i32));

    let mut y = y_init.clone();
    let mut f = residual(&y)?;
    if f.len() != y.len() {
        return Err(Error::DimensionMismatch {
            expected: y.len(),
            found: f.len(),
        });
    }
    if !all_finite(&f) {
        return Err(Error::NonFinite("initial Newton residual"));
    }
    let r0 = f.norm();
    let blowup = cfg.divergence_factor * r0.max(1.0);
    let mut report = NewtonReport {
        initial_residual: r0,
        ..Default::default()
    };
    if r0 < abs_tol {
        report.converged = true;
        return Ok((y, report.finish()));
    }

    let mut res = r0;
    for iter in 0..cfg.max_iter {
        let jac = match (cfg.jacobian_mode, &jacobian) {
            (JacobianMode::Analytic, Some(jf)) => jf(&y)?,
            _ => fd_jacobian_at(&residual, &y, &f, cfg.fd_step_scale)?,
        };
        if jac.iter().any(|x| !x.is_finite()) {
            report.divergence_iter = Some(iter + 1);
            break;
        }
        let floor = cfg.pivot_floor * linalg::norm1(&jac);
        let lu = Lu::factor(&jac, floor).map_err(|p| Error::SingularJacobian {
            iteration: iter + 1,
            pivot: p.pivot,
        })?;
        report.cond1.push(lu.cond1(&jac));
        let step = lu.solve(&(-&f));

        let mut eta = 1.0;
        let (y_next, f_next) = loop {
            let trial = &y + &step * eta;
            let f_trial = residual(&trial)?;
            let ok = all_finite(&f_trial) && f_trial.norm() < res;
            if ok || !cfg.damping.enabled {
                break (trial, f_trial);
            }
            eta *= cfg.damping.factor;
            if eta < cfg.damping.min_fraction {
                eta = 1.0;
                let full = &y + &step;
                let f_full = residual(&full)?;
                break (full, f_full);
            }
        };
        y = y_next;
        f = f_next;
        report.step_fractions.push(eta);
        report.n_iter = iter + 1;

        if !all_finite(&f) {
            report.residuals.push(f64::NAN);
            report.divergence_iter = Some(iter + 1);
            break;
        }
        res = f.norm();
        report.residuals.push(res);
        if res > blowup {
            report.divergence_iter = Some(iter + 1);
            break;
        }
        if res < abs_tol || res / r0 < rel_tol {
            report.converged = true;
            break;
        }
    }
    Ok((y, report.finish()))
}

/// `EO_ε` between consecutive rows: `log₁₀(μ_i / μ_{i−1})`, assuming each row's ε is a
/// decade below the previous one. Input rows are `(ε, μ(cond))`.
pub fn empirical_order_eps(means: &[(f64, f64)]) -> Result<Vec<f64>> {
    if means.len() < 2 {
        return Err(Error::InvalidParameters(
            "EO_ε needs at least two ε values".into(),
        ));
    }
    Ok(means
        .windows(2)
        .map(|w| (w[1].1 / w[0].1).log10())
        .collect())
}
