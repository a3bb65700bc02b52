//! Higher time derivatives `y^{(k)}` of the solution of `y' = Φ(y)`.
//!
//! Three strategies are available:
//!
//! * [`StrategyKind::Exact`] expands the derivatives with tensor actions of
//!   `Φ'`, `Φ''`, `Φ'''` (Faà di Bruno), up to the fourth derivative;
//! * [`StrategyKind::Recursive`] uses `y^{(k)} = [d^{k−2}Φ/dt^{k−2}]'(y) y^{(1)}`
//!   with matrices supplied by the model;
//! * [`StrategyKind::Approximate`] needs only flux evaluations: each derivative
//!   is a centered difference of flux values at Taylor-predicted states.
//!
//! In the derivatives-as-unknowns formulation the same relations are written as
//! `z_k = Ψ_k(z_0, …, z_{k−1})`. The exact strategies use unscaled unknowns
//! `z_k ≈ y^{(k)}`; the approximate strategy uses `z_k ≈ Δt^{k−1} ỹ^{(k)}`.

use std::cell::Cell;
use std::fmt;
use std::str::FromStr;

use nalgebra::DMatrix;

use crate::error::{Error, Result};
use crate::odesys::{FluxModel, Matrix, State};
use crate::stencil::{self, StencilWeights};

/// Highest derivative the exact tensor expansion is written out for.
pub const EXACT_MAX_ORDER: usize = 4;

/// Anything that can evaluate the flux of a [`FluxModel`].
pub trait FluxSource {
    fn model(&self) -> &FluxModel;

    fn flux(&self, y: &State) -> State {
        self.model().flux(y)
    }
}

impl FluxSource for FluxModel {
    fn model(&self) -> &FluxModel {
        self
    }
}

/// Wraps a model and counts flux evaluations.
pub struct CountingFlux<'m> {
    model: &'m FluxModel,
    count: Cell<u64>,
}

impl<'m> CountingFlux<'m> {
    pub fn new(model: &'m FluxModel) -> Self {
        Self {
            model,
            count: Cell::new(0),
        }
    }

    pub fn count(&self) -> u64 {
        self.count.get()
    }
}

impl FluxSource for CountingFlux<'_> {
    fn model(&self) -> &FluxModel {
        self.model
    }

    fn flux(&self, y: &State) -> State {
        self.count.set(self.count.get() + 1);
        self.model.flux(y)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum StrategyKind {
    /// Exact Jacobians (tensor expansion).
    Exact,
    /// Recursive relation with time-derivative Jacobians.
    Recursive,
    /// Centered differences of Taylor-predicted fluxes.
    Approximate,
}

impl StrategyKind {
    pub fn as_str(self) -> &'static str {
        match self {
            StrategyKind::Exact => "ej",
            StrategyKind::Recursive => "rec",
            StrategyKind::Approximate => "at",
        }
    }
}

impl fmt::Display for StrategyKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for StrategyKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "ej" | "exact" => Ok(StrategyKind::Exact),
            "rec" | "recursive" => Ok(StrategyKind::Recursive),
            "at" | "a" | "approximate" => Ok(StrategyKind::Approximate),
            other => Err(Error::InvalidParameters(format!(
                "unknown derivative strategy `{other}` (expected at, ej or rec)"
            ))),
        }
    }
}

/// A derivative strategy configured for `r` derivatives.
#[derive(Debug, Clone, PartialEq)]
pub struct DerivStrategy {
    kind: StrategyKind,
    max_order: usize,
    halfwidth: usize,
    dt: f64,
    /// `weights[k-1]` realizes the `k`-th derivative stencil, `k = 1..r-1`.
    weights: Vec<StencilWeights>,
}

impl DerivStrategy {
    pub fn exact(max_order: usize) -> Result<Self> {
        Self::check_order(max_order)?;
        if max_order > EXACT_MAX_ORDER {
            return Err(Error::UnsupportedOrder {
                what: "the exact tensor expansion",
                max: EXACT_MAX_ORDER,
                requested: max_order,
            });
        }
        Ok(Self {
            kind: StrategyKind::Exact,
            max_order,
            halfwidth: 0,
            dt: f64::NAN,
            weights: Vec::new(),
        })
    }

    pub fn recursive(max_order: usize) -> Result<Self> {
        Self::check_order(max_order)?;
        Ok(Self {
            kind: StrategyKind::Recursive,
            max_order,
            halfwidth: 0,
            dt: f64::NAN,
            weights: Vec::new(),
        })
    }

    /// Approximate strategy with stencil half-width `p` at timestep `dt`.
    pub fn approximate(max_order: usize, halfwidth: usize, dt: f64) -> Result<Self> {
        Self::check_order(max_order)?;
        if max_order >= 2 && halfwidth < stencil::min_halfwidth(max_order - 1) {
            return Err(Error::InvalidParameters(format!(
                "stencil half-width p = {halfwidth} too small for {max_order} derivatives (need p ≥ {})",
                stencil::min_halfwidth(max_order - 1)
            )));
        }
        let weights = (1..max_order)
            .map(|k| StencilWeights::new(k, halfwidth))
            .collect::<Result<Vec<_>>>()?;
        let mut s = Self {
            kind: StrategyKind::Approximate,
            max_order,
            halfwidth,
            dt: f64::NAN,
            weights,
        };
        s.set_dt(dt)?;
        Ok(s)
    }

    /// Builds any strategy; `halfwidth` and `dt` are only used by the approximate one.
    pub fn of_kind(kind: StrategyKind, max_order: usize, halfwidth: usize, dt: f64) -> Result<Self> {
        match kind {
            StrategyKind::Exact => Self::exact(max_order),
            StrategyKind::Recursive => Self::recursive(max_order),
            StrategyKind::Approximate => Self::approximate(max_order, halfwidth, dt),
        }
    }

    fn check_order(max_order: usize) -> Result<()> {
        if max_order == 0 {
            Err(Error::InvalidParameters("at least one derivative is required".into()))
        } else {
            Ok(())
        }
    }

    pub fn kind(&self) -> StrategyKind {
        self.kind
    }

    pub fn max_order(&self) -> usize {
        self.max_order
    }

    pub fn halfwidth(&self) -> usize {
        self.halfwidth
    }

    pub fn dt(&self) -> f64 {
        self.dt
    }

    /// Updates the timestep used by the approximate strategy.
    pub fn set_dt(&mut self, dt: f64) -> Result<()> {
        if self.kind == StrategyKind::Approximate && !(dt > 0.0 && dt.is_finite()) {
            return Err(Error::InvalidParameters(format!(
                "timestep must be positive, got {dt}"
            )));
        }
        self.dt = dt;
        Ok(())
    }

    /// Checks that `model` provides what this strategy needs.
    pub fn check_model(&self, model: &FluxModel) -> Result<()> {
        let r = self.max_order;
        match self.kind {
            StrategyKind::Approximate => Ok(()),
            StrategyKind::Exact => {
                let needed = r.saturating_sub(1);
                if model.tensor_order() >= needed {
                    Ok(())
                } else {
                    Err(model.missing(match needed {
                        1 => "the flux Jacobian",
                        2 => "Φ'' tensor actions",
                        _ => "Φ''' tensor actions",
                    }))
                }
            }
            StrategyKind::Recursive => {
                if r >= 2 && !model.has_jacobian() {
                    return Err(model.missing("the flux Jacobian"));
                }
                if r >= 3 && model.time_derivative_jacobians() < r - 2 {
                    return Err(model.missing("time-derivative Jacobians of sufficient order"));
                }
                Ok(())
            }
        }
    }

    /// `[y^{(1)}, …, y^{(r)}]` at `y` (approximations `ỹ^{(k)}` for the approximate strategy).
    pub fn derivatives_direct<S: FluxSource + ?Sized>(&self, src: &S, y: &State) -> Result<Vec<State>> {
        let model = src.model();
        if y.len() != model.dim() {
            return Err(Error::DimensionMismatch {
                expected: model.dim(),
                found: y.len(),
            });
        }
        let r = self.max_order;
        let mut ders = Vec::with_capacity(r);
        ders.push(src.flux(y));
        match self.kind {
            StrategyKind::Exact | StrategyKind::Recursive => {
                let mut z = Vec::with_capacity(r + 1);
                z.push(y.clone());
                z.push(ders[0].clone());
                for k in 2..=r {
                    let next = self.psi_exact(src, &z, k)?;
                    z.push(next.clone());
                    ders.push(next);
                }
            }
            StrategyKind::Approximate => {
                for k in 2..=r {
                    let w = &self.weights[k - 2];
                    let samples: Vec<State> = w
                        .nodes()
                        .map(|j| {
                            let jdt = j as f64 * self.dt;
                            let mut arg = y.clone();
                            let mut coef = 1.0;
                            for (m, d) in ders.iter().enumerate() {
                                coef *= jdt / (m + 1) as f64;
                                arg.axpy(coef, d, 1.0);
                            }
                            src.flux(&arg)
                        })
                        .collect();
                    ders.push(w.apply(&samples, self.dt)?);
                }
            }
        }
        Ok(ders)
    }

    /// `Ψ_k(z_0, …, z_{k−1})` for `2 ≤ k ≤ r`; `z` must hold at least `k` entries.
    pub fn psi_dersol<S: FluxSource + ?Sized>(&self, src: &S, z: &[State], k: usize) -> Result<State> {
        if k < 2 || k > self.max_order {
            return Err(Error::InvalidParameters(format!(
                "Ψ_k is defined for 2 ≤ k ≤ {}, requested k = {k}",
                self.max_order
            )));
        }
        if z.len() < k {
            return Err(Error::DimensionMismatch {
                expected: k,
                found: z.len(),
            });
        }
        let dim = src.model().dim();
        if let Some(bad) = z[..k].iter().find(|v| v.len() != dim) {
            return Err(Error::DimensionMismatch {
                expected: dim,
                found: bad.len(),
            });
        }
        match self.kind {
            StrategyKind::Exact | StrategyKind::Recursive => self.psi_exact(src, z, k),
            StrategyKind::Approximate => Ok(self.psi_approx(src, z, k)),
        }
    }

    fn psi_exact<S: FluxSource + ?Sized>(&self, src: &S, z: &[State], k: usize) -> Result<State> {
        let model = src.model();
        let y = &z[0];
        match self.kind {
            StrategyKind::Exact => {
                let jac = model.jacobian(y)?;
                match k {
                    2 => Ok(&jac * &z[1]),
                    3 => Ok(model.second_derivative(y, &z[1], &z[1])? + &jac * &z[2]),
                    4 => Ok(model.third_derivative(y, &z[1], &z[1], &z[1])?
                        + model.second_derivative(y, &z[1], &z[2])? * 3.0
                        + &jac * &z[3]),
                    _ => Err(Error::UnsupportedOrder {
                        what: "the exact tensor expansion",
                        max: EXACT_MAX_ORDER,
                        requested: k,
                    }),
                }
            }
            StrategyKind::Recursive => Ok(model.time_derivative_jacobian(k - 2, y)? * &z[1]),
            StrategyKind::Approximate => unreachable!("approximate strategy has no exact Ψ"),
        }
    }

    /// Argument `z_0 + Δt Σ_{m=1}^{k−1} j^m/m! z_m` of the scaled flux samples.
    fn scaled_sample_arg(&self, z: &[State], k: usize, j: isize) -> State {
        let mut arg = z[0].clone();
        let mut coef = self.dt;
        for (m, zm) in z.iter().enumerate().take(k).skip(1) {
            coef *= j as f64 / m as f64;
            arg.axpy(coef, zm, 1.0);
        }
        arg
    }

    fn psi_approx<S: FluxSource + ?Sized>(&self, src: &S, z: &[State], k: usize) -> State {
        let w = &self.weights[k - 2];
        let samples: Vec<State> = w
            .nodes()
            .map(|j| src.flux(&self.scaled_sample_arg(z, k, j)))
            .collect();
        w.combine(&samples)
    }

    /// Jacobians `∂y^{(k)}/∂y`, `k = 1..r`, of the direct derivative chain.
    ///
    /// Available for the approximate strategy (through `Φ'` at the sample
    /// states) and for a single derivative with any strategy.
    pub fn derivative_jacobians_direct<S: FluxSource + ?Sized>(
        &self,
        src: &S,
        y: &State,
    ) -> Result<Vec<Matrix>> {
        let model = src.model();
        if self.kind != StrategyKind::Approximate && self.max_order > 1 {
            return Err(model.missing("an analytic Newton Jacobian for this strategy"));
        }
        let ders = self.derivatives_direct(src, y)?;
        let n = model.dim();
        let ident = DMatrix::<f64>::identity(n, n);
        let mut jacs: Vec<Matrix> = vec![model.jacobian(y)?];
        for k in 2..=self.max_order {
            let w = &self.weights[k - 2];
            let mut acc = DMatrix::zeros(n, n);
            for j in w.nodes() {
                let d = w.weight(j);
                if d == 0.0 {
                    continue;
                }
                let jdt = j as f64 * self.dt;
                let mut arg = y.clone();
                let mut darg = ident.clone();
                let mut coef = 1.0;
                for m in 0..k - 1 {
                    coef *= jdt / (m + 1) as f64;
                    arg.axpy(coef, &ders[m], 1.0);
                    darg += &jacs[m] * coef;
                }
                acc += model.jacobian(&arg)? * darg * d;
            }
            jacs.push(acc / self.dt.powi(k as i32 - 1));
        }
        Ok(jacs)
    }

    /// Blocks `∂Ψ_k/∂z_m`, `m = 0..k−1`, of the derivatives-as-unknowns relation.
    ///
    /// Available for the approximate strategy only.
    pub fn psi_jacobians<S: FluxSource + ?Sized>(&self, src: &S, z: &[State], k: usize) -> Result<Vec<Matrix>> {
        let model = src.model();
        if self.kind != StrategyKind::Approximate {
            return Err(model.missing("an analytic Newton Jacobian for this strategy"));
        }
        if k < 2 || k > self.max_order || z.len() < k {
            return Err(Error::InvalidParameters(format!("invalid Ψ_k index k = {k}")));
        }
        let n = model.dim();
        let w = &self.weights[k - 2];
        let mut blocks = vec![DMatrix::zeros(n, n); k];
        for j in w.nodes() {
            let d = w.weight(j);
            if d == 0.0 {
                continue;
            }
            let jac = model.jacobian(&self.scaled_sample_arg(z, k, j))? * d;
            blocks[0] += &jac;
            let mut coef = self.dt;
            for (m, block) in blocks.iter_mut().enumerate().skip(1) {
                coef *= j as f64 / m as f64;
                *block += &jac * coef;
            }
        }
        Ok(blocks)
    }

    /// Initial guess `(z_1, …, z_r)` at `y` in this strategy's scaling convention.
    pub fn dersol_chain<S: FluxSource + ?Sized>(&self, src: &S, y: &State) -> Result<Vec<State>> {
        let mut ders = self.derivatives_direct(src, y)?;
        if self.kind == StrategyKind::Approximate {
            for (i, d) in ders.iter_mut().enumerate() {
                *d *= self.dt.powi(i as i32);
            }
        }
        Ok(ders)
    }

    /// Multiplier turning the `k`-th unknown into `Δt^k y^{(k)}` in a stage equation.
    pub fn stage_weight(&self, dt: f64, k: usize) -> f64 {
        match self.kind {
            StrategyKind::Approximate => dt,
            _ => dt.powi(k as i32),
        }
    }
}
