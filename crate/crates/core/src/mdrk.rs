//! Multiderivative Runge-Kutta time stepping.
//!
//! A step solves the stage equations
//!
//! ```text
//! Y_l = yⁿ + Σ_k Δt^k Σ_ν a^{(k)}_{lν} y^{(k)}(Y_ν)
//! ```
//!
//! and applies the update `yⁿ⁺¹ = yⁿ + Σ_k Δt^k Σ_l b^{(k)}_l y^{(k)}(Y_l)`.
//! With [`Formulation::Direct`] the unknowns are the stage values and the
//! derivative chains are evaluated inside the residual. With
//! [`Formulation::DerSol`] every derivative is an extra unknown tied to the
//! stage value by its defining relation, giving `(r+1)·M` unknowns per stage.
//!
//! Leading stages that only reference earlier stages are evaluated directly.
//! The remaining stages are solved one at a time ([`Coupling::Dimdrk`]) or as
//! one coupled system in stage-based ordering ([`Coupling::Fsmdrk`]).

use std::cell::RefCell;
use std::fmt;
use std::ops::Range;
use std::str::FromStr;

use nalgebra::{DMatrix, DVector};

use crate::derivchain::{CountingFlux, DerivStrategy, FluxSource, StrategyKind};
use crate::error::{Error, Result};
use crate::newton::{self, JacobianMode, NewtonConfig, NewtonReport};
use crate::odesys::{FluxModel, Matrix, State};
use crate::tableau::Tableau;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Formulation {
    Direct,
    DerSol,
}

impl Formulation {
    pub fn as_str(self) -> &'static str {
        match self {
            Formulation::Direct => "direct",
            Formulation::DerSol => "dersol",
        }
    }
}

impl fmt::Display for Formulation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Formulation {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "direct" => Ok(Formulation::Direct),
            "dersol" => Ok(Formulation::DerSol),
            other => Err(Error::InvalidParameters(format!(
                "unknown formulation `{other}` (expected direct or dersol)"
            ))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Coupling {
    /// Stage-at-a-time solves.
    Dimdrk,
    /// All implicit stages in one system.
    Fsmdrk,
}

impl Coupling {
    pub fn as_str(self) -> &'static str {
        match self {
            Coupling::Dimdrk => "dimdrk",
            Coupling::Fsmdrk => "fsmdrk",
        }
    }
}

impl fmt::Display for Coupling {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Coupling {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "dimdrk" => Ok(Coupling::Dimdrk),
            "fsmdrk" => Ok(Coupling::Fsmdrk),
            other => Err(Error::InvalidParameters(format!(
                "unknown coupling `{other}` (expected dimdrk or fsmdrk)"
            ))),
        }
    }
}

/// A complete method: tableau, derivative strategy, formulation, coupling and solver settings.
#[derive(Debug, Clone)]
pub struct MethodSpec {
    tableau: Tableau,
    strategy: StrategyKind,
    formulation: Formulation,
    coupling: Coupling,
    newton: NewtonConfig,
    halfwidth: Option<usize>,
}

impl MethodSpec {
    pub fn new(
        tableau: Tableau,
        strategy: StrategyKind,
        formulation: Formulation,
        coupling: Coupling,
    ) -> Result<Self> {
        if coupling == Coupling::Dimdrk && !tableau.is_lower_triangular() {
            return Err(Error::InvalidMethod(format!(
                "{} couples its stages and cannot be solved stage by stage; use fsmdrk",
                tableau.name()
            )));
        }
        if strategy != StrategyKind::Approximate {
            DerivStrategy::of_kind(strategy, tableau.derivatives(), 0, f64::NAN)?;
        }
        Ok(Self {
            tableau,
            strategy,
            formulation,
            coupling,
            newton: NewtonConfig::default(),
            halfwidth: None,
        })
    }

    pub fn with_newton(mut self, cfg: NewtonConfig) -> Self {
        self.newton = cfg;
        self
    }

    /// Overrides the stencil half-width of the approximate strategy.
    pub fn with_halfwidth(mut self, p: usize) -> Self {
        self.halfwidth = Some(p);
        self
    }

    pub fn tableau(&self) -> &Tableau {
        &self.tableau
    }

    pub fn strategy(&self) -> StrategyKind {
        self.strategy
    }

    pub fn formulation(&self) -> Formulation {
        self.formulation
    }

    pub fn coupling(&self) -> Coupling {
        self.coupling
    }

    pub fn newton(&self) -> &NewtonConfig {
        &self.newton
    }

    /// Stencil half-width in use: the override, or `⌊q/2⌋`.
    pub fn halfwidth(&self) -> usize {
        self.halfwidth.unwrap_or(self.tableau.order() / 2)
    }

    /// Identifier `scheme/strategy/formulation/coupling`.
    pub fn method_id(&self) -> String {
        let mut id = format!(
            "{}/{}/{}/{}",
            self.tableau.name(),
            self.strategy,
            self.formulation,
            self.coupling
        );
        if self.strategy == StrategyKind::Approximate && self.halfwidth.is_some() {
            id.push_str(&format!("/p{}", self.halfwidth()));
        }
        id
    }

    /// Derivative strategy configured for timestep `dt`.
    pub fn deriv_strategy(&self, dt: f64) -> Result<DerivStrategy> {
        DerivStrategy::of_kind(self.strategy, self.tableau.derivatives(), self.halfwidth(), dt)
    }

    /// Checks that `model` supports this method, including the Newton Jacobian mode.
    pub fn check_model(&self, model: &FluxModel) -> Result<()> {
        let strat = self.deriv_strategy(1.0)?;
        strat.check_model(model)?;
        if self.newton.jacobian_mode == JacobianMode::Analytic {
            if !model.has_jacobian() {
                return Err(Error::MissingCapability {
                    model: model.name().to_string(),
                    capability: "the flux Jacobian",
                });
            }
            if self.strategy != StrategyKind::Approximate && self.tableau.derivatives() > 1 {
                return Err(Error::InvalidMethod(format!(
                    "analytic Newton Jacobians are only assembled for the approximate strategy \
                     or single-derivative schemes, not {}",
                    self.method_id()
                )));
            }
        }
        Ok(())
    }

    /// The first implicit system of a step from `y_n`, for inspection.
    pub fn first_system<'m>(
        &self,
        model: &'m FluxModel,
        y_n: &State,
        dt: f64,
    ) -> Result<StageSystem<'m, FluxModel>> {
        self.check_model(model)?;
        let mut stepper = Stepper::new(self, model, y_n, dt)?;
        stepper.evaluate_prefix()?;
        let block = stepper
            .blocks()
            .into_iter()
            .next()
            .ok_or_else(|| Error::InvalidMethod(format!("{} has no implicit stage", self.tableau.name())))?;
        Ok(stepper.system(block))
    }
}

/// One Newton solve inside a step.
#[derive(Debug, Clone, PartialEq)]
pub struct StageSolve {
    /// Stages (0-based) solved together.
    pub stages: Range<usize>,
    pub report: NewtonReport,
}

/// Record of one accepted step.
#[derive(Debug, Clone, PartialEq)]
pub struct StepTrace {
    pub solves: Vec<StageSolve>,
    pub flux_evals: u64,
    pub y_next: State,
}

impl StepTrace {
    /// The solve whose conditioning is reported: the last implicit stage, or the coupled system.
    pub fn monitored(&self) -> Option<&StageSolve> {
        self.solves.last()
    }

    pub fn newton_iterations(&self) -> usize {
        self.solves.iter().map(|s| s.report.n_iter).sum()
    }
}

/// Aggregated statistics of a fixed-step integration.
#[derive(Debug, Clone, PartialEq)]
pub struct Integration {
    pub y: State,
    pub n_steps: usize,
    pub dt: f64,
    pub n_iter_total: usize,
    /// Newton iterations per step.
    pub step_iterations: Vec<usize>,
    /// Mean `cond₁` over all iterations of the monitored solves.
    pub mean_cond1: f64,
    pub flux_evals: u64,
}

/// Stage-sum weights `w_k` so that `Σ_k w_k z_k` equals `Σ_k Δt^k y^{(k)}`.
fn weights(strat: &DerivStrategy, formulation: Formulation, dt: f64, r: usize) -> Vec<f64> {
    (1..=r)
        .map(|k| match formulation {
            Formulation::Direct => dt.powi(k as i32),
            Formulation::DerSol => strat.stage_weight(dt, k),
        })
        .collect()
}

/// `Σ_k w_k Σ_ν a^{(k)}_{lν} chain_ν[k]`; stages with empty chains must carry zero coefficients.
fn stage_increment(tab: &Tableau, l: usize, chains: &[&[State]], w: &[f64], dim: usize) -> State {
    let mut acc = DVector::zeros(dim);
    for (k, wk) in w.iter().enumerate() {
        let ak = tab.a_matrix(k + 1);
        for (nu, chain) in chains.iter().enumerate() {
            let a = ak[(l, nu)];
            if a != 0.0 {
                acc.axpy(wk * a, &chain[k], 1.0);
            }
        }
    }
    acc
}

fn update_increment(tab: &Tableau, chains: &[Vec<State>], w: &[f64], dim: usize) -> State {
    let mut acc = DVector::zeros(dim);
    for (k, wk) in w.iter().enumerate() {
        let bk = tab.b_row(k + 1);
        for (l, chain) in chains.iter().enumerate() {
            if bk[l] != 0.0 {
                acc.axpy(wk * bk[l], &chain[k], 1.0);
            }
        }
    }
    acc
}

struct Stepper<'s, 'm, S: FluxSource + ?Sized> {
    spec: &'s MethodSpec,
    src: &'m S,
    strat: DerivStrategy,
    y_n: State,
    w: Vec<f64>,
    /// Per stage: `y^{(1..r)}` (Direct) or `z_1..z_r` (DerSol); empty until known.
    chains: Vec<Vec<State>>,
    /// Chain at `yⁿ`, shared by the first explicit stage and the initial guesses.
    chain_n: Option<Vec<State>>,
}

impl<'s, 'm, S: FluxSource + ?Sized> Stepper<'s, 'm, S> {
    fn new(spec: &'s MethodSpec, src: &'m S, y_n: &State, dt: f64) -> Result<Self> {
        if !(dt > 0.0 && dt.is_finite()) {
            return Err(Error::InvalidParameters(format!("timestep must be positive, got {dt}")));
        }
        let dim = src.model().dim();
        if y_n.len() != dim {
            return Err(Error::DimensionMismatch {
                expected: dim,
                found: y_n.len(),
            });
        }
        let strat = spec.deriv_strategy(dt)?;
        let w = weights(&strat, spec.formulation, dt, spec.tableau.derivatives());
        Ok(Self {
            spec,
            src,
            strat,
            y_n: y_n.clone(),
            w,
            chains: vec![Vec::new(); spec.tableau.stages()],
            chain_n: None,
        })
    }

    fn chain_at(&self, y: &State) -> Result<Vec<State>> {
        match self.spec.formulation {
            Formulation::Direct => self.strat.derivatives_direct(self.src, y),
            Formulation::DerSol => self.strat.dersol_chain(self.src, y),
        }
    }

    fn chain_n(&mut self) -> Result<Vec<State>> {
        if self.chain_n.is_none() {
            self.chain_n = Some(self.chain_at(&self.y_n)?);
        }
        Ok(self.chain_n.clone().unwrap())
    }

    fn evaluate_prefix(&mut self) -> Result<()> {
        let tab = &self.spec.tableau;
        let dim = self.y_n.len();
        for l in 0..tab.explicit_prefix() {
            let view: Vec<&[State]> = self.chains[..l].iter().map(|c| &c[..]).collect();
            let inc = stage_increment(tab, l, &view, &self.w, dim);
            self.chains[l] = if inc.iter().all(|&x| x == 0.0) {
                self.chain_n()?
            } else {
                self.chain_at(&(&self.y_n + inc))?
            };
        }
        Ok(())
    }

    fn blocks(&self) -> Vec<Range<usize>> {
        let s = self.spec.tableau.stages();
        let first = self.spec.tableau.explicit_prefix();
        match self.spec.coupling {
            Coupling::Dimdrk => (first..s).map(|l| l..l + 1).collect(),
            Coupling::Fsmdrk if first < s => std::iter::once(first..s).collect(),
            Coupling::Fsmdrk => Vec::new(),
        }
    }

    fn system(&self, block: Range<usize>) -> StageSystem<'m, S> {
        StageSystem {
            tableau: self.spec.tableau.clone(),
            strat: self.strat.clone(),
            formulation: self.spec.formulation,
            src: self.src,
            y_n: self.y_n.clone(),
            w: self.w.clone(),
            known: self.chains.clone(),
            block,
            cache: RefCell::new(None),
        }
    }

    fn run(mut self, cfg: &NewtonConfig) -> Result<(State, Vec<StageSolve>)> {
        self.evaluate_prefix()?;
        let mut solves = Vec::new();
        for block in self.blocks() {
            let sys = self.system(block.clone());
            let x0 = sys.initial_guess_from(&self.chain_n()?);
            let analytic = cfg.jacobian_mode == JacobianMode::Analytic;
            let jac = |x: &DVector<f64>| sys.analytic_jacobian(x);
            let (x, report) = newton::solve(
                |x: &DVector<f64>| sys.residual(x),
                analytic.then_some(jac),
                &x0,
                cfg,
            )?;
            if !report.converged {
                return Err(Error::NotConverged {
                    step: 0,
                    stage: (block.len() == 1).then_some(block.start),
                    report: Box::new(report),
                });
            }
            for (l, chain) in block.clone().zip(sys.chains_at(&x)?) {
                self.chains[l] = chain;
            }
            solves.push(StageSolve { stages: block, report });
        }
        let inc = update_increment(&self.spec.tableau, &self.chains, &self.w, self.y_n.len());
        Ok((&self.y_n + inc, solves))
    }
}

/// Residual argument and the per-stage derivative chains computed for it.
type ChainCache = (DVector<f64>, Vec<Vec<State>>);

/// The nonlinear system of one group of implicit stages within a step.
pub struct StageSystem<'m, S: FluxSource + ?Sized> {
    tableau: Tableau,
    strat: DerivStrategy,
    formulation: Formulation,
    src: &'m S,
    y_n: State,
    w: Vec<f64>,
    known: Vec<Vec<State>>,
    block: Range<usize>,
    /// Chains from the latest residual evaluation, keyed by its argument.
    cache: RefCell<Option<ChainCache>>,
}

impl<S: FluxSource + ?Sized> StageSystem<'_, S> {
    fn m(&self) -> usize {
        self.y_n.len()
    }

    fn r(&self) -> usize {
        self.tableau.derivatives()
    }

    /// Unknowns per stage.
    pub fn stage_dim(&self) -> usize {
        match self.formulation {
            Formulation::Direct => self.m(),
            Formulation::DerSol => (self.r() + 1) * self.m(),
        }
    }

    pub fn dim(&self) -> usize {
        self.block.len() * self.stage_dim()
    }

    pub fn stages(&self) -> Range<usize> {
        self.block.clone()
    }

    /// `z_j` of block stage `i` (`j = 0` is the stage value).
    fn part<'x>(&self, x: &'x DVector<f64>, i: usize, j: usize) -> nalgebra::DVectorView<'x, f64> {
        let m = self.m();
        x.rows(i * self.stage_dim() + j * m, m)
    }

    fn stage_value(&self, x: &DVector<f64>, i: usize) -> State {
        self.part(x, i, 0).into_owned()
    }

    /// Derivative chains of the block stages at `x`.
    fn chains_at(&self, x: &DVector<f64>) -> Result<Vec<Vec<State>>> {
        if let Some((cx, chains)) = self.cache.borrow().as_ref() {
            if cx == x {
                return Ok(chains.clone());
            }
        }
        let chains = (0..self.block.len())
            .map(|i| match self.formulation {
                Formulation::Direct => self.strat.derivatives_direct(self.src, &self.stage_value(x, i)),
                Formulation::DerSol => Ok((1..=self.r()).map(|j| self.part(x, i, j).into_owned()).collect()),
            })
            .collect::<Result<Vec<_>>>()?;
        *self.cache.borrow_mut() = Some((x.clone(), chains.clone()));
        Ok(chains)
    }

    fn view<'a>(&'a self, current: &'a [Vec<State>]) -> Vec<&'a [State]> {
        (0..self.tableau.stages())
            .map(|nu| {
                if self.block.contains(&nu) {
                    &current[nu - self.block.start][..]
                } else {
                    &self.known[nu][..]
                }
            })
            .collect()
    }

    /// Initial guess: stage values `yⁿ`, derivative unknowns from `chain_n`.
    pub fn initial_guess(&self) -> Result<DVector<f64>> {
        let chain = match self.formulation {
            Formulation::Direct => Vec::new(),
            Formulation::DerSol => self.strat.dersol_chain(self.src, &self.y_n)?,
        };
        Ok(self.initial_guess_from(&chain))
    }

    fn initial_guess_from(&self, chain_n: &[State]) -> DVector<f64> {
        let mut x = DVector::zeros(self.dim());
        let m = self.m();
        for i in 0..self.block.len() {
            let base = i * self.stage_dim();
            x.rows_mut(base, m).copy_from(&self.y_n);
            if self.formulation == Formulation::DerSol {
                for (j, z) in chain_n.iter().enumerate() {
                    x.rows_mut(base + (j + 1) * m, m).copy_from(z);
                }
            }
        }
        x
    }

    /// Residual `F(Y)` (Direct) or `𝓕(z)` (DerSol).
    pub fn residual(&self, x: &DVector<f64>) -> Result<DVector<f64>> {
        if x.len() != self.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                found: x.len(),
            });
        }
        let m = self.m();
        let current = self.chains_at(x)?;
        let view = self.view(&current);
        let mut out = DVector::zeros(self.dim());
        for (i, l) in self.block.clone().enumerate() {
            let base = i * self.stage_dim();
            let inc = stage_increment(&self.tableau, l, &view, &self.w, m);
            let z0 = self.stage_value(x, i);
            out.rows_mut(base, m).copy_from(&(&z0 - &self.y_n - inc));
            if self.formulation == Formulation::DerSol {
                let zs: Vec<State> = (0..=self.r()).map(|j| self.part(x, i, j).into_owned()).collect();
                let phi = self.src.flux(&z0);
                out.rows_mut(base + m, m).copy_from(&(phi - &zs[1]));
                for k in 2..=self.r() {
                    let psi = self.strat.psi_dersol(self.src, &zs, k)?;
                    out.rows_mut(base + k * m, m).copy_from(&(psi - &zs[k]));
                }
            }
        }
        Ok(out)
    }

    /// Forward-difference Jacobian of [`StageSystem::residual`].
    pub fn fd_jacobian(&self, x: &DVector<f64>, scale: f64) -> Result<DMatrix<f64>> {
        newton::fd_jacobian(|v: &DVector<f64>| self.residual(v), x, scale)
    }

    /// Jacobian assembled from `Φ'` (approximate strategy, or one derivative).
    pub fn analytic_jacobian(&self, x: &DVector<f64>) -> Result<Matrix> {
        let m = self.m();
        let nb = self.block.len();
        let mut jac = DMatrix::zeros(self.dim(), self.dim());
        let ident = DMatrix::<f64>::identity(m, m);
        match self.formulation {
            Formulation::Direct => {
                let djac: Vec<Vec<Matrix>> = (0..nb)
                    .map(|i| self.strat.derivative_jacobians_direct(self.src, &self.stage_value(x, i)))
                    .collect::<Result<_>>()?;
                for (i, l) in self.block.clone().enumerate() {
                    for (jn, nu) in self.block.clone().enumerate() {
                        let mut blk = if i == jn { ident.clone() } else { DMatrix::zeros(m, m) };
                        for (k, wk) in self.w.iter().enumerate() {
                            let a = self.tableau.a_matrix(k + 1)[(l, nu)];
                            if a != 0.0 {
                                blk -= &djac[jn][k] * (wk * a);
                            }
                        }
                        jac.view_mut((i * m, jn * m), (m, m)).copy_from(&blk);
                    }
                }
            }
            Formulation::DerSol => {
                let sd = self.stage_dim();
                let r = self.r();
                for (i, l) in self.block.clone().enumerate() {
                    let row = i * sd;
                    jac.view_mut((row, row), (m, m)).copy_from(&ident);
                    for (jn, nu) in self.block.clone().enumerate() {
                        for (k, wk) in self.w.iter().enumerate() {
                            let a = self.tableau.a_matrix(k + 1)[(l, nu)];
                            if a != 0.0 {
                                let col = jn * sd + (k + 1) * m;
                                jac.view_mut((row, col), (m, m)).copy_from(&(&ident * (-wk * a)));
                            }
                        }
                    }
                    let zs: Vec<State> = (0..=r).map(|j| self.part(x, i, j).into_owned()).collect();
                    let model = self.src.model();
                    jac.view_mut((row + m, row), (m, m)).copy_from(&model.jacobian(&zs[0])?);
                    for k in 1..=r {
                        jac.view_mut((row + k * m, row + k * m), (m, m)).copy_from(&(-&ident));
                    }
                    for k in 2..=r {
                        for (j, blk) in self.strat.psi_jacobians(self.src, &zs, k)?.iter().enumerate() {
                            jac.view_mut((row + k * m, row + j * m), (m, m)).copy_from(blk);
                        }
                    }
                }
            }
        }
        Ok(jac)
    }
}

/// Advances one step of size `dt` from `y_n`.
pub fn step(spec: &MethodSpec, model: &FluxModel, y_n: &State, dt: f64) -> Result<StepTrace> {
    spec.check_model(model)?;
    let src = CountingFlux::new(model);
    let (y_next, solves) = Stepper::new(spec, &src, y_n, dt)?.run(&spec.newton)?;
    if y_next.iter().any(|v| !v.is_finite()) {
        return Err(Error::NonFinite("step update"));
    }
    Ok(StepTrace {
        solves,
        flux_evals: src.count(),
        y_next,
    })
}

/// One step with the stage values as unknowns.
pub fn step_direct(spec: &MethodSpec, model: &FluxModel, y_n: &State, dt: f64) -> Result<StepTrace> {
    step(&spec.clone().with_formulation(Formulation::Direct), model, y_n, dt)
}

/// One step with the derivatives as additional unknowns.
pub fn step_dersol(spec: &MethodSpec, model: &FluxModel, y_n: &State, dt: f64) -> Result<StepTrace> {
    step(&spec.clone().with_formulation(Formulation::DerSol), model, y_n, dt)
}

impl MethodSpec {
    pub fn with_formulation(mut self, formulation: Formulation) -> Self {
        self.formulation = formulation;
        self
    }
}

/// Integrates from `model.y0()` to `model.t_end()` in `n_steps` equal steps.
pub fn integrate(spec: &MethodSpec, model: &FluxModel, n_steps: usize) -> Result<Integration> {
    integrate_with(spec, model, n_steps, |_, _| {})
}

/// Like [`integrate`], calling `observe(n, trace)` after every step.
pub fn integrate_with(
    spec: &MethodSpec,
    model: &FluxModel,
    n_steps: usize,
    mut observe: impl FnMut(usize, &StepTrace),
) -> Result<Integration> {
    if n_steps == 0 {
        return Err(Error::InvalidParameters("at least one step is required".into()));
    }
    let dt = model.t_end() / n_steps as f64;
    let mut y = model.y0().clone();
    let mut step_iterations = Vec::with_capacity(n_steps);
    let mut cond_sum = 0.0;
    let mut cond_count = 0usize;
    let mut flux_evals = 0;
    for n in 0..n_steps {
        let trace = step(spec, model, &y, dt).map_err(|e| match e {
            Error::NotConverged { stage, report, .. } => Error::NotConverged {
                step: n + 1,
                stage,
                report,
            },
            other => other,
        })?;
        if let Some(mon) = trace.monitored() {
            cond_sum += mon.report.cond1.iter().sum::<f64>();
            cond_count += mon.report.cond1.len();
        }
        step_iterations.push(trace.newton_iterations());
        flux_evals += trace.flux_evals;
        observe(n + 1, &trace);
        y = trace.y_next;
    }
    Ok(Integration {
        y,
        n_steps,
        dt,
        n_iter_total: step_iterations.iter().sum(),
        step_iterations,
        mean_cond1: if cond_count == 0 {
            f64::NAN
        } else {
            cond_sum / cond_count as f64
        },
        flux_evals,
    })
}
