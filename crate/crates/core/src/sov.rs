//! Separation of variables on the slice `S_inf`.
//!
//! The `x`-coordinates of the divisor are the roots of `det D(A(x); x)`, a
//! monic polynomial of degree `g` on the slice. At each root the
//! `y`-coordinate is
//!
//! ```text
//! y = det(T nu, u, T u, ..., T^{r-3} u) / det(nu, u, T u, ..., T^{r-3} u)
//! ```
//!
//! for any `nu` making the denominator nonzero. For `r = 2` this is `t(x)`.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{LaxError, Result};
use crate::flows::{self, upsilon};
use crate::gauge::{self, theta_membership};
use crate::linalg::{self, CMat, CVec};
use crate::poly::{min_relative_separation, C64};
use crate::polymat::{random_c64, MatPoly, Node, PolyMatrix};
use crate::spectral::{char_poly, is_unramified_over, SpectralCurve};

/// Relative separation below which two divisor abscissae count as one.
pub const SIMPLE_ROOT_TOL: f64 = 1e-6;
/// Relative size of `det(nu, u, ...)` below which `nu` is rejected.
pub const NU_TOL: f64 = 1e-8;
/// Number of random `nu` tried after the canonical one.
pub const NU_RETRIES: usize = 16;
const NU_SEED: u64 = 0x5eed;

/// `sum_i (x_i, y_i)` with the on-curve residuals `|P(x_i, y_i)|`.
#[derive(Clone, Debug, PartialEq)]
pub struct Divisor {
    pub points: Vec<(C64, C64)>,
    pub residuals: Vec<f64>,
}

#[derive(Serialize, Deserialize)]
struct DivisorJson {
    points: Vec<[f64; 4]>,
    residuals: Vec<f64>,
}

impl Divisor {
    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn max_residual(&self) -> f64 {
        self.residuals.iter().copied().fold(0.0, f64::max)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(&DivisorJson::from(self)).expect("serializable")
    }

    pub fn to_json_pretty(&self) -> String {
        serde_json::to_string_pretty(&DivisorJson::from(self)).expect("serializable")
    }

    pub fn from_json(s: &str) -> Result<Self> {
        let raw: DivisorJson = serde_json::from_str(s)?;
        if raw.points.len() != raw.residuals.len() {
            return Err(LaxError::Parse("points and residuals differ in length".into()));
        }
        Ok(Divisor {
            points: raw.points.iter().map(|p| (C64::new(p[0], p[1]), C64::new(p[2], p[3]))).collect(),
            residuals: raw.residuals,
        })
    }

    /// Largest distance to `other` after matching points in order of `x`.
    pub fn max_diff(&self, other: &Divisor) -> f64 {
        if self.len() != other.len() {
            return f64::INFINITY;
        }
        self.points
            .iter()
            .zip(&other.points)
            .map(|((x1, y1), (x2, y2))| (x1 - x2).norm().max((y1 - y2).norm()))
            .fold(0.0, f64::max)
    }
}

impl From<&Divisor> for DivisorJson {
    fn from(d: &Divisor) -> Self {
        DivisorJson {
            points: d.points.iter().map(|(x, y)| [x.re, x.im, y.re, y.im]).collect(),
            residuals: d.residuals.clone(),
        }
    }
}

impl Serialize for Divisor {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        DivisorJson::from(self).serialize(s)
    }
}

fn blocks_at(a: &PolyMatrix, x: C64) -> (CVec, CMat) {
    let m = a.r() - 1;
    let ax = a.eval(x);
    (ax.view((1, 0), (m, 1)).column(0).into_owned(), ax.view((1, 1), (m, m)).into_owned())
}

/// Numerator and denominator determinants of the `y` formula at `x`.
fn y_parts(a: &PolyMatrix, x: C64, nu: &CVec) -> (C64, C64, f64) {
    let (u, t) = blocks_at(a, x);
    let m = u.len();
    let mut tail = Vec::with_capacity(m - 1);
    let mut col = u;
    for _ in 0..m - 1 {
        tail.push(col.clone());
        col = &t * col;
    }
    let mut num_cols = vec![&t * nu];
    num_cols.extend(tail.iter().cloned());
    let mut den_cols = vec![nu.clone()];
    den_cols.extend(tail.iter().cloned());
    let scale: f64 = den_cols.iter().map(|c| c.norm().max(f64::MIN_POSITIVE)).product();
    let num = linalg::det(&CMat::from_columns(&num_cols));
    let den = linalg::det(&CMat::from_columns(&den_cols));
    (num, den, den.norm() / scale)
}

/// The general `y` formula for a given `nu`.
pub fn y_general(a: &PolyMatrix, x: C64, nu: &CVec) -> Result<C64> {
    let (num, den, rel) = y_parts(a, x, nu);
    if rel <= NU_TOL {
        return Err(LaxError::NuNotFound { x: x.to_string() });
    }
    Ok(num / den)
}

/// The canonical `nu = e_1` followed by seeded random candidates.
pub fn nu_candidates(m: usize) -> Vec<CVec> {
    let mut rng = ChaCha8Rng::seed_from_u64(NU_SEED);
    let mut out = vec![crate::polymat::nu(m)];
    for _ in 0..NU_RETRIES {
        out.push(CVec::from_fn(m, |_, _| random_c64(&mut rng)));
    }
    out
}

/// First admissible `nu` at `x` and the resulting `y`.
pub fn y_with_admissible_nu(a: &PolyMatrix, x: C64) -> Result<(CVec, C64)> {
    for nu in nu_candidates(a.r() - 1) {
        if let Ok(y) = y_general(a, x, &nu) {
            return Ok((nu, y));
        }
    }
    Err(LaxError::NuNotFound { x: x.to_string() })
}

/// The divisor of a slice member.
pub fn sov_divisor(a: &PolyMatrix) -> Result<Divisor> {
    let violation = a.slice_violation(Node::Infinity);
    if violation > flows::SLICE_TOL {
        return Err(LaxError::NotInSlice { violation });
    }
    let xs = gauge::d_poly(a).roots(1e-14);
    let separation = min_relative_separation(&xs);
    if separation <= SIMPLE_ROOT_TOL {
        return Err(LaxError::MultipleRoot { separation });
    }
    let curve = char_poly(a);
    let mut points = Vec::with_capacity(xs.len());
    let mut residuals = Vec::with_capacity(xs.len());
    for x in xs {
        if !is_unramified_over(&curve, Node::Finite(x)) {
            return Err(LaxError::RamifiedPoint { node: x.to_string() });
        }
        let y = if a.r() == 2 { a.eval(x)[(1, 1)] } else { y_with_admissible_nu(a, x)?.1 };
        residuals.push(curve.eval(x, y).norm());
        points.push((x, y));
    }
    Ok(Divisor { points, residuals })
}

/// Residuals `|P(x_i, y_i)|` of `divisor` against another curve.
pub fn residuals_on(curve: &SpectralCurve, divisor: &Divisor) -> Vec<f64> {
    divisor.points.iter().map(|&(x, y)| curve.eval(x, y).norm()).collect()
}

/// The two closed-form `r = 3` expressions
/// `(u2 T11 - u1 T21) / u2` and `(u1 T22 - u2 T12) / u1`.
pub fn r3_y_formulas(a: &PolyMatrix, x: C64) -> Result<(C64, C64)> {
    if a.r() != 3 {
        return Err(LaxError::InvalidArgument("the closed forms are for r = 3".into()));
    }
    let (u, t) = blocks_at(a, x);
    let tiny = 1e-14 * (1.0 + u.norm());
    if u[1].norm() <= tiny {
        return Err(LaxError::ZeroDenominator { formula: 1 });
    }
    if u[0].norm() <= tiny {
        return Err(LaxError::ZeroDenominator { formula: 2 });
    }
    let y1 = (u[1] * t[(0, 0)] - u[0] * t[(1, 0)]) / u[1];
    let y2 = (u[0] * t[(1, 1)] - u[1] * t[(0, 1)]) / u[0];
    Ok((y1, y2))
}

/// The `r = 2` projected field in closed form:
/// `Upsilon_a^(1) + [G, A]` with `G = u(a) [[0, (x + a - u_{d-2}) w_{d+1} + w_d], [0, -v_d]]`.
pub fn even_mumford_field(a: &PolyMatrix, at: C64) -> Result<PolyMatrix> {
    if a.r() != 2 {
        return Err(LaxError::InvalidArgument("the closed form is for r = 2".into()));
    }
    let violation = a.slice_violation(Node::Infinity);
    if violation > flows::SLICE_TOL {
        return Err(LaxError::NotInSlice { violation });
    }
    let d = a.d();
    let blk = a.blocks();
    let ua = blk.u.eval(at)[(0, 0)];
    let u_dm2 = if d >= 2 { blk.u_k(d - 2)[(0, 0)] } else { C64::default() };
    let (w_d, w_d1) = (blk.w_k(d)[0], blk.w_k(d + 1)[0]);
    let v_d = blk.v_k(d);
    let b0 = ua * ((at - u_dm2) * w_d1 + w_d);
    let b1 = ua * w_d1;
    let g = MatPoly::new(
        2,
        2,
        vec![
            CMat::from_row_slice(2, 2, &[C64::default(), b0, C64::default(), -ua * v_d]),
            CMat::from_row_slice(2, 2, &[C64::default(), b1, C64::default(), C64::default()]),
        ],
    );
    let comm = PolyMatrix::from_matpoly(2, d, &a.commutator_left(&g), 0.0)?;
    Ok(upsilon(a, at, 1)?.add(&comm))
}

/// For `A` in `M_c` over an unramified `c`: all theta flags are true.
pub fn theta_complement_check(a: &PolyMatrix, node: Node) -> Result<bool> {
    let det_abs = gauge::d_det(a, node).norm();
    if det_abs <= gauge::MC_TOL {
        return Err(LaxError::NotInMc { det_abs });
    }
    Ok(theta_membership(a, node)?.outside_theta.iter().all(|f| *f))
}
