//! Tolerances used by the verification suites.
//!
//! Defaults are compiled in; a TOML file with a `[tolerances]` table may
//! override any subset, and the environment variable `LAXFLOW_TOL_SCALE`
//! multiplies every value.

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{LaxError, Result};

pub const TOL_SCALE_ENV: &str = "LAXFLOW_TOL_SCALE";

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Tolerances {
    /// Relative drift of the spectral coefficients along RK4 flows.
    pub conservation: f64,
    /// Finite-difference Lie bracket of two `Y` fields.
    pub lie_bracket: f64,
    /// Least-squares distance to the gauge-orbit tangent span.
    pub orbit_span: f64,
    /// Relative singular value threshold for numerical rank.
    pub rank: f64,
    /// Coefficientwise covariance of `det D` under the gauge group.
    pub d_covariance: f64,
    /// Normal form recovery, idempotence and equivariance.
    pub normal_form: f64,
    /// Jacobi identity on coordinate triples.
    pub jacobi: f64,
    /// Brackets of Casimirs with coordinates.
    pub casimir: f64,
    /// Moment map and image equations on the image of `phi`.
    pub moment_zero: f64,
    /// Hamiltonian generation of `Upsilon` modulo gauge.
    pub hamiltonian_field: f64,
    /// Brackets of trace Hamiltonians on the image of `phi`.
    pub involution: f64,
    /// Hand-derived divisor of the genus-one example.
    pub divisor_exact: f64,
    /// `|P(x_i, y_i)|` at divisor points.
    pub divisor_residual: f64,
    /// Change of `y_i` under a change of `nu`.
    pub nu_independence: f64,
    /// Closed-form `r = 2` field against the solved projected field.
    pub even_mumford: f64,
    /// Closed-form `r = 3` ordinates against the divisor.
    pub r3_formulas: f64,
    /// Drift of `s_1` along flows started on `s_1 = 0`.
    pub s1_drift: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Tolerances {
            conservation: 1e-8,
            lie_bracket: 1e-6,
            orbit_span: 1e-8,
            rank: 1e-8,
            d_covariance: 1e-9,
            normal_form: 1e-9,
            jacobi: 1e-10,
            casimir: 1e-10,
            moment_zero: 1e-12,
            hamiltonian_field: 1e-8,
            involution: 1e-8,
            divisor_exact: 1e-12,
            divisor_residual: 1e-8,
            nu_independence: 1e-9,
            even_mumford: 1e-12,
            r3_formulas: 1e-9,
            s1_drift: 1e-9,
        }
    }
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct ConfigFile {
    #[serde(default)]
    tolerances: Tolerances,
}

impl Tolerances {
    pub fn from_toml(s: &str) -> Result<Self> {
        let file: ConfigFile = toml::from_str(s).map_err(|e| LaxError::Parse(e.to_string()))?;
        Ok(file.tolerances)
    }

    pub fn load(path: &Path) -> Result<Self> {
        Self::from_toml(&std::fs::read_to_string(path)?)
    }

    pub fn scaled(&self, s: f64) -> Self {
        let mut t = self.clone();
        for v in t.values_mut() {
            *v *= s;
        }
        t
    }

    /// Apply `LAXFLOW_TOL_SCALE` if it is set.
    pub fn with_env_scale(&self) -> Result<Self> {
        match std::env::var(TOL_SCALE_ENV) {
            Ok(v) => {
                let s: f64 = v
                    .trim()
                    .parse()
                    .map_err(|_| LaxError::Parse(format!("{TOL_SCALE_ENV}={v} is not a number")))?;
                if !(s > 0.0 && s.is_finite()) {
                    return Err(LaxError::InvalidArgument(format!("{TOL_SCALE_ENV} must be positive")));
                }
                Ok(self.scaled(s))
            }
            Err(_) => Ok(self.clone()),
        }
    }

    /// Defaults, overridden by `path` if given, then scaled by the environment.
    pub fn resolve(path: Option<&Path>) -> Result<Self> {
        let base = match path {
            Some(p) => Self::load(p)?,
            None => Self::default(),
        };
        base.with_env_scale()
    }

    fn values_mut(&mut self) -> [&mut f64; 17] {
        [
            &mut self.conservation,
            &mut self.lie_bracket,
            &mut self.orbit_span,
            &mut self.rank,
            &mut self.d_covariance,
            &mut self.normal_form,
            &mut self.jacobi,
            &mut self.casimir,
            &mut self.moment_zero,
            &mut self.hamiltonian_field,
            &mut self.involution,
            &mut self.divisor_exact,
            &mut self.divisor_residual,
            &mut self.nu_independence,
            &mut self.even_mumford,
            &mut self.r3_formulas,
            &mut self.s1_drift,
        ]
    }

    pub fn to_toml(&self) -> String {
        #[derive(Serialize)]
        struct Out<'a> {
            tolerances: &'a Tolerances,
        }
        toml::to_string(&Out { tolerances: self }).expect("serializable")
    }
}
