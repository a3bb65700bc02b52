//! Reference solutions for error measurements: the exact solution when the problem
//! has one, otherwise a cached high-resolution run.

use std::fs;
use std::path::{Path, PathBuf};

use mdrk_core::mdrk::{integrate, Coupling, Formulation, MethodSpec};
use mdrk_core::odesys::problem_by_name;
use mdrk_core::{builtin_tableau, NewtonConfig, State, StrategyKind};
use serde::{Deserialize, Serialize};

use crate::error::{LabError, Result};

/// Refinement of the fallback run relative to the finest requested grid.
pub const FALLBACK_REFINEMENT: usize = 64;
pub const FALLBACK_SCHEME: &str = "HB-I3DRK6-2s";

#[derive(Debug, Clone)]
pub struct ReferencePolicy {
    pub allow_fallback: bool,
    pub cache_dir: PathBuf,
}

impl Default for ReferencePolicy {
    /// Fallback enabled; cache in `MDRK_CACHE_DIR` or a directory under the system temp dir.
    fn default() -> Self {
        let cache_dir = std::env::var_os("MDRK_CACHE_DIR")
            .map(PathBuf::from)
            .unwrap_or_else(|| std::env::temp_dir().join("mdrk-lab-cache"));
        Self {
            allow_fallback: true,
            cache_dir,
        }
    }
}

#[derive(Debug, Serialize, Deserialize)]
struct CachedReference {
    problem: String,
    epsilon: f64,
    t_end: f64,
    n_steps: usize,
    method: String,
    y: Vec<f64>,
}

fn fallback_spec() -> Result<MethodSpec> {
    Ok(MethodSpec::new(
        builtin_tableau(FALLBACK_SCHEME)?,
        StrategyKind::Recursive,
        Formulation::Direct,
        Coupling::Dimdrk,
    )?
    .with_newton(NewtonConfig::default().with_tolerances(14, 14)))
}

fn cache_path(dir: &Path, problem: &str, epsilon: f64, t_end: f64, n: usize) -> PathBuf {
    // Bit patterns keep the key exact for any float.
    dir.join(format!(
        "{problem}-e{:016x}-t{:016x}-n{n}.json",
        epsilon.to_bits(),
        t_end.to_bits()
    ))
}

/// Solution of `problem` at `t_end`, using `finest_n` to size the fallback run.
pub fn reference_state(
    problem: &str,
    epsilon: f64,
    t_end: f64,
    finest_n: usize,
    policy: &ReferencePolicy,
) -> Result<State> {
    let model = problem_by_name(problem, epsilon)?.with_t_end(t_end);
    if let Some(y) = model.reference(t_end) {
        return Ok(y);
    }
    if !policy.allow_fallback {
        return Err(LabError::ReferenceUnavailable(problem.to_string()));
    }
    let n = FALLBACK_REFINEMENT * finest_n;
    let path = cache_path(&policy.cache_dir, problem, epsilon, t_end, n);
    if let Ok(text) = fs::read_to_string(&path) {
        if let Ok(c) = serde_json::from_str::<CachedReference>(&text) {
            if c.y.len() == model.dim() {
                return Ok(State::from_vec(c.y));
            }
        }
    }
    let spec = fallback_spec()?;
    let y = integrate(&spec, &model, n)?.y;
    let entry = CachedReference {
        problem: problem.to_string(),
        epsilon,
        t_end,
        n_steps: n,
        method: spec.method_id(),
        y: y.iter().copied().collect(),
    };
    // A failed cache write only costs a recomputation later.
    if fs::create_dir_all(&policy.cache_dir).is_ok() {
        let tmp = path.with_extension(format!("tmp{}", std::process::id()));
        if fs::write(&tmp, serde_json::to_string_pretty(&entry)?).is_ok() {
            let _ = fs::rename(&tmp, &path);
        }
    }
    Ok(y)
}
