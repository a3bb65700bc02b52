//! ODE systems `y' = Φ(y)` with an ε-scaled stiff part, plus the benchmark problems.
//!
//! Besides the flux itself a model can carry the operators that the exact
//! derivative strategies need:
//!
//! * the Jacobian `Φ'(y)`;
//! * the tensor actions `Φ''(y)•[u|v]` and `Φ'''(y)•[u|v|w]`;
//! * the total Jacobians `[d^{k}Φ/dt^{k}]'(y)` of the time derivatives, `k ≥ 1`,
//!   used by the recursive relation `y^{(k+2)} = [d^kΦ/dt^k]'(y) y^{(1)}`.

use std::f64::consts::FRAC_PI_2;
use std::fmt;
use std::sync::Arc;

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};

pub type State = DVector<f64>;
pub type Matrix = DMatrix<f64>;

pub type VectorField = Arc<dyn Fn(&State) -> State + Send + Sync>;
pub type MatrixField = Arc<dyn Fn(&State) -> Matrix + Send + Sync>;
pub type BilinearAction = Arc<dyn Fn(&State, &State, &State) -> State + Send + Sync>;
pub type TrilinearAction = Arc<dyn Fn(&State, &State, &State, &State) -> State + Send + Sync>;
pub type ReferenceSolution = Arc<dyn Fn(f64) -> State + Send + Sync>;

/// Where a problem definition comes from.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Provenance {
    /// Defined explicitly in the source material the benchmarks reproduce.
    Published,
    /// Standard textbook definition adopted where only a citation was available.
    Derived,
}

/// An autonomous ODE system with stiffness parameter ε.
#[derive(Clone)]
pub struct FluxModel {
    name: String,
    dim: usize,
    epsilon: f64,
    flux: VectorField,
    jacobian: Option<MatrixField>,
    second: Option<BilinearAction>,
    third: Option<TrilinearAction>,
    time_deriv_jacobians: Vec<MatrixField>,
    reference: Option<ReferenceSolution>,
    y0: State,
    t_end: f64,
    provenance: Provenance,
}

impl fmt::Debug for FluxModel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("FluxModel")
            .field("name", &self.name)
            .field("dim", &self.dim)
            .field("epsilon", &self.epsilon)
            .field("jacobian", &self.jacobian.is_some())
            .field("tensors", &(self.second.is_some(), self.third.is_some()))
            .field("time_deriv_jacobians", &self.time_deriv_jacobians.len())
            .field("reference", &self.reference.is_some())
            .field("y0", &self.y0.as_slice())
            .field("t_end", &self.t_end)
            .finish()
    }
}

fn check_epsilon(epsilon: f64) -> Result<()> {
    if epsilon > 0.0 && epsilon.is_finite() {
        Ok(())
    } else {
        Err(Error::InvalidParameters(format!(
            "stiffness parameter must be positive, got {epsilon}"
        )))
    }
}

impl FluxModel {
    /// A model with only the flux; attach operators with the `with_*` builders.
    pub fn new(
        name: impl Into<String>,
        epsilon: f64,
        y0: State,
        t_end: f64,
        flux: impl Fn(&State) -> State + Send + Sync + 'static,
    ) -> Result<Self> {
        check_epsilon(epsilon)?;
        let model = Self {
            name: name.into(),
            dim: y0.len(),
            epsilon,
            flux: Arc::new(flux),
            jacobian: None,
            second: None,
            third: None,
            time_deriv_jacobians: Vec::new(),
            reference: None,
            y0,
            t_end,
            provenance: Provenance::Published,
        };
        let probe = (model.flux)(&model.y0);
        if probe.len() != model.dim {
            return Err(Error::DimensionMismatch {
                expected: model.dim,
                found: probe.len(),
            });
        }
        Ok(model)
    }

    pub fn with_jacobian(mut self, f: impl Fn(&State) -> Matrix + Send + Sync + 'static) -> Self {
        self.jacobian = Some(Arc::new(f));
        self
    }

    pub fn with_second_derivative(
        mut self,
        f: impl Fn(&State, &State, &State) -> State + Send + Sync + 'static,
    ) -> Self {
        self.second = Some(Arc::new(f));
        self
    }

    pub fn with_third_derivative(
        mut self,
        f: impl Fn(&State, &State, &State, &State) -> State + Send + Sync + 'static,
    ) -> Self {
        self.third = Some(Arc::new(f));
        self
    }

    /// Appends `[d^kΦ/dt^k]'` for the next `k` (starting at `k = 1`).
    pub fn with_time_derivative_jacobian(
        mut self,
        f: impl Fn(&State) -> Matrix + Send + Sync + 'static,
    ) -> Self {
        self.time_deriv_jacobians.push(Arc::new(f));
        self
    }

    pub fn with_reference(mut self, f: impl Fn(f64) -> State + Send + Sync + 'static) -> Self {
        self.reference = Some(Arc::new(f));
        self
    }

    pub fn with_provenance(mut self, provenance: Provenance) -> Self {
        self.provenance = provenance;
        self
    }

    pub fn with_t_end(mut self, t_end: f64) -> Self {
        self.t_end = t_end;
        self
    }

    pub fn with_y0(mut self, y0: State) -> Result<Self> {
        if y0.len() != self.dim {
            return Err(Error::DimensionMismatch {
                expected: self.dim,
                found: y0.len(),
            });
        }
        self.y0 = y0;
        Ok(self)
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn epsilon(&self) -> f64 {
        self.epsilon
    }

    pub fn y0(&self) -> &State {
        &self.y0
    }

    pub fn t_end(&self) -> f64 {
        self.t_end
    }

    pub fn provenance(&self) -> Provenance {
        self.provenance
    }

    pub fn flux(&self, y: &State) -> State {
        (self.flux)(y)
    }

    pub fn has_jacobian(&self) -> bool {
        self.jacobian.is_some()
    }

    pub fn jacobian(&self, y: &State) -> Result<Matrix> {
        let f = self.jacobian.as_ref().ok_or_else(|| self.missing("the flux Jacobian"))?;
        Ok(f(y))
    }

    pub fn second_derivative(&self, y: &State, u: &State, v: &State) -> Result<State> {
        let f = self.second.as_ref().ok_or_else(|| self.missing("Φ'' tensor actions"))?;
        Ok(f(y, u, v))
    }

    pub fn third_derivative(&self, y: &State, u: &State, v: &State, w: &State) -> Result<State> {
        let f = self.third.as_ref().ok_or_else(|| self.missing("Φ''' tensor actions"))?;
        Ok(f(y, u, v, w))
    }

    /// Highest tensor order available (1 = Jacobian only, 0 = none).
    pub fn tensor_order(&self) -> usize {
        match (&self.jacobian, &self.second, &self.third) {
            (None, _, _) => 0,
            (Some(_), None, _) => 1,
            (Some(_), Some(_), None) => 2,
            (Some(_), Some(_), Some(_)) => 3,
        }
    }

    /// Number of time-derivative Jacobians beyond `Φ'` supplied.
    pub fn time_derivative_jacobians(&self) -> usize {
        self.time_deriv_jacobians.len()
    }

    /// `[d^kΦ/dt^k]'(y)` with `k = 0` meaning `Φ'`.
    pub fn time_derivative_jacobian(&self, k: usize, y: &State) -> Result<Matrix> {
        if k == 0 {
            return self.jacobian(y);
        }
        let f = self
            .time_deriv_jacobians
            .get(k - 1)
            .ok_or_else(|| self.missing("time-derivative Jacobians of sufficient order"))?;
        Ok(f(y))
    }

    pub fn has_reference(&self) -> bool {
        self.reference.is_some()
    }

    pub fn reference(&self, t: f64) -> Option<State> {
        self.reference.as_ref().map(|f| f(t))
    }

    pub(crate) fn missing(&self, capability: &'static str) -> Error {
        Error::MissingCapability {
            model: self.name.clone(),
            capability,
        }
    }

    /// Largest relative deviation between the supplied Jacobian and a forward
    /// finite-difference Jacobian of the flux at `y`.
    pub fn jacobian_consistency(&self, y: &State) -> Result<f64> {
        let analytic = self.jacobian(y)?;
        let fd = crate::newton::fd_jacobian(|x| Ok(self.flux(x)), y, f64::EPSILON.sqrt())?;
        let scale = analytic.amax().max(1.0);
        Ok((analytic - fd).amax() / scale)
    }
}

fn v2(a: f64, b: f64) -> State {
    DVector::from_vec(vec![a, b])
}

fn m2(a: f64, b: f64, c: f64, d: f64) -> Matrix {
    DMatrix::from_row_slice(2, 2, &[a, b, c, d])
}

/// Pareschi–Russo problem `y₁' = −y₂`, `y₂' = y₁ + (sin y₁ − y₂)/ε`, `y(0) = (π/2, 1)`.
pub fn pareschi_russo(epsilon: f64) -> Result<FluxModel> {
    check_epsilon(epsilon)?;
    let e = epsilon;
    let model = FluxModel::new("pr", e, v2(FRAC_PI_2, 1.0), 5.0, move |y| {
        v2(-y[1], y[0] + (y[0].sin() - y[1]) / e)
    })?
    .with_jacobian(move |y| m2(0.0, -1.0, 1.0 + y[0].cos() / e, -1.0 / e))
    .with_second_derivative(move |y, a, b| v2(0.0, -y[0].sin() * a[0] * b[0] / e))
    .with_third_derivative(move |y, a, b, c| v2(0.0, -y[0].cos() * a[0] * b[0] * c[0] / e))
    .with_time_derivative_jacobian(move |y| {
        let (u, v) = (y[0], y[1]);
        m2(
            -1.0 - u.cos() / e,
            e.recip(),
            v * u.sin() / e - 1.0 / e - u.cos() / e.powi(2),
            -1.0 - u.cos() / e + e.powi(-2),
        )
    })
    .with_time_derivative_jacobian(move |y| {
        let (u, v) = (y[0], y[1]);
        let (s, c) = u.sin_cos();
        m2(
            -v * s / e + e.recip() + c / e.powi(2),
            1.0 + c / e - 1.0 / e.powi(2),
            -1.0 + u * s / e - v.powi(2) * c / e - 2.0 * c / e - 2.0 * v * s / e.powi(2)
                + s.powi(2) / e.powi(2)
                - c.powi(2) / e.powi(2)
                + e.powi(-2)
                + c / e.powi(3),
            -2.0 * v * s / e + 2.0 / e + 2.0 * c / e.powi(2) - 1.0 / e.powi(3),
        )
    });
    Ok(model)
}

/// Scalar test equation `y' = (λ/ε) y`, `y(0) = 1`.
pub fn dahlquist_scaled(lambda: f64, epsilon: f64) -> Result<FluxModel> {
    check_epsilon(epsilon)?;
    let rate = lambda / epsilon;
    let mut model = FluxModel::new("dahlquist", epsilon, DVector::from_element(1, 1.0), 1.0, move |y| {
        y * rate
    })?
    .with_jacobian(move |_| DMatrix::from_element(1, 1, rate))
    .with_second_derivative(|_, _, _| DVector::zeros(1))
    .with_third_derivative(|_, _, _, _| DVector::zeros(1))
    .with_reference(move |t| DVector::from_element(1, (rate * t).exp()));
    // d^kΦ/dt^k = rate^{k+1} y, so its Jacobian is rate^{k+1}.
    for k in 1..=8 {
        model = model.with_time_derivative_jacobian(move |_| {
            DMatrix::from_element(1, 1, rate.powi(k + 1))
        });
    }
    Ok(model)
}

/// Scalar coupling `g(y₁, y₂)` with its first partials, for [`two_var_model`].
#[derive(Clone)]
pub struct Coupling {
    pub g: Arc<dyn Fn(f64, f64) -> f64 + Send + Sync>,
    pub g_u: Arc<dyn Fn(f64, f64) -> f64 + Send + Sync>,
    pub g_v: Arc<dyn Fn(f64, f64) -> f64 + Send + Sync>,
}

impl Coupling {
    pub fn new(
        g: impl Fn(f64, f64) -> f64 + Send + Sync + 'static,
        g_u: impl Fn(f64, f64) -> f64 + Send + Sync + 'static,
        g_v: impl Fn(f64, f64) -> f64 + Send + Sync + 'static,
    ) -> Self {
        Self {
            g: Arc::new(g),
            g_u: Arc::new(g_u),
            g_v: Arc::new(g_v),
        }
    }

    /// `g(u, v) = sin u − v`.
    pub fn pareschi_russo() -> Self {
        Self::new(|u, v| u.sin() - v, |u, _| u.cos(), |_, _| -1.0)
    }

    /// `g(u, v) = (1 − u²) v − u`.
    pub fn van_der_pol() -> Self {
        Self::new(
            |u, v| (1.0 - u * u) * v - u,
            |u, v| -2.0 * u * v - 1.0,
            |u, _| 1.0 - u * u,
        )
    }

    pub fn zero() -> Self {
        Self::new(|_, _| 0.0, |_, _| 0.0, |_, _| 0.0)
    }
}

/// Two-variable system `y₁' = y₂`, `y₂' = α y₁ + g(y₁, y₂)/ε`.
///
/// Only the flux Jacobian is attached, which suffices for two-derivative schemes.
pub fn two_var_model(alpha: f64, coupling: Coupling, epsilon: f64) -> Result<FluxModel> {
    check_epsilon(epsilon)?;
    let e = epsilon;
    let Coupling { g, g_u, g_v } = coupling;
    let model = FluxModel::new("two-var", e, v2(1.0, 0.0), 1.0, move |y| {
        v2(y[1], alpha * y[0] + g(y[0], y[1]) / e)
    })?
    .with_jacobian(move |y| {
        m2(
            0.0,
            1.0,
            alpha + g_u(y[0], y[1]) / e,
            g_v(y[0], y[1]) / e,
        )
    });
    Ok(model)
}

/// Kaps problem `y₁' = −(2 + 1/ε) y₁ + y₂²/ε`, `y₂' = y₁ − y₂ − y₂²`, `y(0) = (1, 1)`,
/// with exact solution `(e^{−2t}, e^{−t})`.
pub fn kaps(epsilon: f64) -> Result<FluxModel> {
    check_epsilon(epsilon)?;
    let e = epsilon;
    let model = FluxModel::new("kaps", e, v2(1.0, 1.0), 1.0, move |y| {
        v2(
            -(2.0 + 1.0 / e) * y[0] + y[1] * y[1] / e,
            y[0] - y[1] - y[1] * y[1],
        )
    })?
    .with_jacobian(move |y| m2(-(2.0 + 1.0 / e), 2.0 * y[1] / e, 1.0, -1.0 - 2.0 * y[1]))
    .with_second_derivative(move |_, a, b| v2(2.0 * a[1] * b[1] / e, -2.0 * a[1] * b[1]))
    .with_third_derivative(|_, _, _, _| DVector::zeros(2))
    .with_time_derivative_jacobian(move |y| {
        let (u, v) = (y[0], y[1]);
        m2(
            4.0 + 2.0 * v / e + 4.0 / e + e.powi(-2),
            2.0 * u / e - 6.0 * v.powi(2) / e - 8.0 * v / e - 2.0 * v / e.powi(2),
            -2.0 * v - 3.0 - 1.0 / e,
            -2.0 * u + 6.0 * v.powi(2) + 6.0 * v + 1.0 + 2.0 * v / e,
        )
    })
    .with_time_derivative_jacobian(move |y| {
        let (u, v) = (y[0], y[1]);
        m2(
            -8.0 + 4.0 * u / e - 8.0 * v.powi(2) / e - 14.0 * v / e - 12.0 / e
                - 4.0 * v / e.powi(2)
                - 6.0 / e.powi(2)
                - 1.0 / e.powi(3),
            -16.0 * u * v / e - 14.0 * u / e + 24.0 * v.powi(3) / e + 42.0 * v.powi(2) / e
                + 24.0 * v / e
                - 4.0 * u / e.powi(2)
                + 12.0 * v.powi(2) / e.powi(2)
                + 12.0 * v / e.powi(2)
                + 2.0 * v / e.powi(3),
            -4.0 * u + 8.0 * v.powi(2) + 12.0 * v + 7.0 + 4.0 * v / e + 5.0 / e + e.powi(-2),
            16.0 * u * v + 12.0 * u - 24.0 * v.powi(3) - 36.0 * v.powi(2) - 14.0 * v - 1.0
                + 4.0 * u / e
                - 12.0 * v.powi(2) / e
                - 10.0 * v / e
                - 2.0 * v / e.powi(2),
        )
    })
    .with_reference(|t| v2((-2.0 * t).exp(), (-t).exp()))
    .with_provenance(Provenance::Derived);
    Ok(model)
}

/// Van der Pol oscillator `y₁' = y₂`, `y₂' = ((1 − y₁²) y₂ − y₁)/ε` with
/// well-prepared data `y₁(0) = 2` and `y₂(0)` from the slow-manifold expansion.
pub fn van_der_pol(epsilon: f64) -> Result<FluxModel> {
    check_epsilon(epsilon)?;
    let e = epsilon;
    let y2 = -2.0 / 3.0 + 10.0 / 81.0 * e - 292.0 / 2187.0 * e * e - 1814.0 / 19683.0 * e.powi(3);
    let model = FluxModel::new("vdp", e, v2(2.0, y2), 0.5, move |y| {
        v2(y[1], ((1.0 - y[0] * y[0]) * y[1] - y[0]) / e)
    })?
    .with_jacobian(move |y| {
        m2(
            0.0,
            1.0,
            (-2.0 * y[0] * y[1] - 1.0) / e,
            (1.0 - y[0] * y[0]) / e,
        )
    })
    .with_second_derivative(move |y, a, b| {
        // g_uu = −2v, g_uv = −2u, g_vv = 0
        let (u, v) = (y[0], y[1]);
        v2(
            0.0,
            (-2.0 * v * a[0] * b[0] - 2.0 * u * (a[0] * b[1] + a[1] * b[0])) / e,
        )
    })
    .with_third_derivative(move |_, a, b, c| {
        // g_uuv = −2 is the only nonzero third partial
        let sym = a[0] * b[0] * c[1] + a[0] * b[1] * c[0] + a[1] * b[0] * c[0];
        v2(0.0, -2.0 * sym / e)
    })
    .with_time_derivative_jacobian(move |y| {
        let (u, v) = (y[0], y[1]);
        m2(
            -2.0 * u * v / e - 1.0 / e,
            -u.powi(2) / e + e.recip(),
            -2.0 * v.powi(2) / e + 4.0 * u.powi(3) * v / e.powi(2) + 3.0 * u.powi(2) / e.powi(2)
                - 4.0 * u * v / e.powi(2)
                - 1.0 / e.powi(2),
            -4.0 * u * v / e - 1.0 / e + u.powi(4) / e.powi(2) - 2.0 * u.powi(2) / e.powi(2)
                + e.powi(-2),
        )
    })
    .with_time_derivative_jacobian(move |y| {
        let (u, v) = (y[0], y[1]);
        m2(
            -2.0 * v.powi(2) / e + 4.0 * u.powi(3) * v / e.powi(2) + 3.0 * u.powi(2) / e.powi(2)
                - 4.0 * u * v / e.powi(2)
                - 1.0 / e.powi(2),
            -4.0 * u * v / e - 1.0 / e + u.powi(4) / e.powi(2) - 2.0 * u.powi(2) / e.powi(2)
                + e.powi(-2),
            24.0 * u.powi(2) * v.powi(2) / e.powi(2) + 16.0 * u * v / e.powi(2)
                - 8.0 * v.powi(2) / e.powi(2)
                + e.powi(-2)
                - 6.0 * u.powi(5) * v / e.powi(3)
                - 5.0 * u.powi(4) / e.powi(3)
                + 12.0 * u.powi(3) * v / e.powi(3)
                + 6.0 * u.powi(2) / e.powi(3)
                - 6.0 * u * v / e.powi(3)
                - 1.0 / e.powi(3),
            -6.0 * v.powi(2) / e + 16.0 * u.powi(3) * v / e.powi(2) + 8.0 * u.powi(2) / e.powi(2)
                - 16.0 * u * v / e.powi(2)
                - 2.0 / e.powi(2)
                - u.powi(6) / e.powi(3)
                + 3.0 * u.powi(4) / e.powi(3)
                - 3.0 * u.powi(2) / e.powi(3)
                + e.powi(-3),
        )
    })
    .with_provenance(Provenance::Derived);
    Ok(model)
}

/// Problem names understood by [`problem_by_name`].
pub const PROBLEM_NAMES: &[&str] = &["pr", "dahlquist", "vdp", "kaps"];

/// Registry lookup; `dahlquist` uses `λ = −1`.
pub fn problem_by_name(name: &str, epsilon: f64) -> Result<FluxModel> {
    match name {
        "pr" => pareschi_russo(epsilon),
        "dahlquist" => dahlquist_scaled(-1.0, epsilon),
        "vdp" => van_der_pol(epsilon),
        "kaps" => kaps(epsilon),
        other => Err(Error::InvalidParameters(format!(
            "unknown problem `{other}`; available: {}",
            PROBLEM_NAMES.join(", ")
        ))),
    }
}
