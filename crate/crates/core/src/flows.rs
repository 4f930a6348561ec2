//! Lax vector fields on `M(r, d)` and their integration.
//!
//! The basic field is
//!
//! ```text
//! Upsilon_a^(p)(A) = [A(a)^p, A(x)] / (x - a)
//! ```
//!
//! which is polynomial in `a` of degree `pd`; its coefficients are the fields
//! `Y_j^(p)`. On the slice `S_inf` the field is corrected by an infinitesimal
//! gauge transformation so that the flow stays on the slice.

use std::fmt::Write as _;

use serde::Serialize;

use crate::error::{LaxError, Result};
use crate::gauge::{self, LieGaugeElement};
use crate::linalg::{self, CMat, CVec};
use crate::poly::{Poly, C64};
use crate::polymat::{Node, PolyMatrix};
use crate::spectral::char_poly;

/// Relative remainder of the synthetic division above which it is reported.
pub const DIVISION_TOL: f64 = 1e-8;
/// Slice violation accepted by [`projected_field`].
pub const SLICE_TOL: f64 = 1e-8;
/// Slice violation at which an integration is aborted.
pub const SLICE_EXIT_TOL: f64 = 1e-4;
/// Step of the central differences in [`lie_bracket_residual`].
pub const FD_STEP: f64 = 1e-5;
/// Radius of the interpolation nodes used by [`y_fields`].
pub const Y_NODE_RADIUS: f64 = 1.1;

/// `[A(a)^p, A(x)] / (x - a)`.
pub fn upsilon(a: &PolyMatrix, at: C64, p: usize) -> Result<PolyMatrix> {
    if p == 0 {
        return Err(LaxError::InvalidArgument("p must be at least 1".into()));
    }
    let ap = linalg::pow(&a.eval(at), p);
    let comm = a.commutator_left(&crate::polymat::MatPoly::constant(ap));
    let (q, rem) = comm.div_linear(at);
    let residual = linalg::max_abs(&rem);
    if residual > DIVISION_TOL * (1.0 + comm.max_abs()) {
        return Err(LaxError::DivisionResidue { residual });
    }
    PolyMatrix::from_matpoly(a.r(), a.d(), &q, 0.0)
}

/// `Y_0^(p), ..., Y_{pd}^(p)`, the coefficients of `Upsilon_a^(p)` in `a`.
pub fn y_fields(a: &PolyMatrix, p: usize) -> Result<Vec<PolyMatrix>> {
    let n = p * a.d() + 1;
    let samples: Vec<CVec> = Poly::circle_nodes(n, Y_NODE_RADIUS)
        .into_iter()
        .map(|x| upsilon(a, x, p).map(|f| f.to_vector()))
        .collect::<Result<_>>()?;
    let dim = a.dimension();
    let mut out: Vec<CVec> = vec![CVec::zeros(dim); n];
    let mut vals = vec![C64::default(); n];
    for k in 0..dim {
        for (v, s) in vals.iter_mut().zip(&samples) {
            *v = s[k];
        }
        let coeffs = Poly::from_circle_samples(&vals, Y_NODE_RADIUS);
        for (j, field) in out.iter_mut().enumerate() {
            field[k] = coeffs.coeff(j);
        }
    }
    out.iter().map(|v| PolyMatrix::from_vector(a.r(), a.d(), v)).collect()
}

pub fn y_field(a: &PolyMatrix, j: usize, p: usize) -> Result<PolyMatrix> {
    if p == 0 || j > p * a.d() {
        return Err(LaxError::InvalidArgument(format!("Y_{j}^({p}) is not defined for d = {}", a.d())));
    }
    Ok(y_fields(a, p)?.swap_remove(j))
}

/// The linear part of the slice constraints at `node`, applied to a tangent
/// vector `x`: the `T`-block and `u`-block values and the first row of the
/// next `T`-coefficient.
pub fn slice_constraint_values(x: &PolyMatrix, node: Node) -> CVec {
    let b = x.blocks();
    let (d, m) = (x.d(), x.r() - 1);
    let (u0, t0, t1) = match node {
        Node::Infinity => (b.u_k(d - 1), b.t_k(d), b.t_k(d - 1)),
        Node::Finite(c) => (b.u.eval(c), b.t.eval(c), b.t.derivative().eval(c)),
    };
    let mut out = Vec::with_capacity(m * m + 2 * m);
    for i in 0..m {
        for j in 0..m {
            out.push(t0[(i, j)]);
        }
    }
    out.extend(u0.iter().copied());
    out.extend((0..m).map(|j| t1[(0, j)]));
    CVec::from_vec(out)
}

/// Largest slice constraint derivative of a tangent vector.
pub fn tangency_residual(x: &PolyMatrix, node: Node) -> f64 {
    slice_constraint_values(x, node).iter().map(|c| c.norm()).fold(0.0, f64::max)
}

/// The field `F_a^(p) = Upsilon_a^(p) + [G, A]` tangent to `S_inf`, together
/// with the unique `G` in `Lie G_r` that achieves tangency.
pub fn projected_field_with_gauge(a: &PolyMatrix, at: C64, p: usize) -> Result<(PolyMatrix, LieGaugeElement)> {
    projected_field_tol(a, at, p, SLICE_TOL)
}

pub fn projected_field(a: &PolyMatrix, at: C64, p: usize) -> Result<PolyMatrix> {
    projected_field_with_gauge(a, at, p).map(|(f, _)| f)
}

fn projected_field_tol(a: &PolyMatrix, at: C64, p: usize, tol: f64) -> Result<(PolyMatrix, LieGaugeElement)> {
    let violation = a.slice_violation(Node::Infinity);
    if violation > tol {
        return Err(LaxError::NotInSlice { violation });
    }
    let ups = upsilon(a, at, p)?;
    let tangents = gauge::orbit_tangent_basis(a);
    let cols: Vec<CVec> = tangents.iter().map(|t| slice_constraint_values(t, Node::Infinity)).collect();
    let sys = CMat::from_columns(&cols);
    let rhs = -slice_constraint_values(&ups, Node::Infinity);
    let sol = linalg::solve(&sys, &rhs)
        .ok_or_else(|| LaxError::LinearSolveFailure("tangency system is singular".into()))?;
    let residual = (&sys * &sol - &rhs).norm();
    if !residual.is_finite() || residual > 1e-8 * (1.0 + rhs.norm()) {
        return Err(LaxError::LinearSolveFailure(format!("tangency system residual {residual:e}")));
    }
    let mut field = ups;
    for (coef, t) in sol.iter().zip(&tangents) {
        field = field.axpy(*coef, t);
    }
    Ok((field, LieGaugeElement::from_vector(a.r(), sol.as_slice())))
}

/// A vector field on `M(r, d)` (or on `S_inf` for the projected kind).
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum FieldSpec {
    Upsilon { a: C64, p: usize },
    YField { j: usize, p: usize },
    Projected { a: C64, p: usize },
}

impl FieldSpec {
    pub fn eval(&self, a: &PolyMatrix) -> Result<PolyMatrix> {
        match *self {
            FieldSpec::Upsilon { a: at, p } => upsilon(a, at, p),
            FieldSpec::YField { j, p } => y_field(a, j, p),
            FieldSpec::Projected { a: at, p } => projected_field(a, at, p),
        }
    }

    /// Like [`FieldSpec::eval`] but lets projected fields run on points up to
    /// [`SLICE_EXIT_TOL`] away from the slice.
    fn eval_lenient(&self, a: &PolyMatrix) -> Result<PolyMatrix> {
        match *self {
            FieldSpec::Projected { a: at, p } => projected_field_tol(a, at, p, SLICE_EXIT_TOL).map(|(f, _)| f),
            _ => self.eval(a),
        }
    }

    pub fn is_projected(&self) -> bool {
        matches!(self, FieldSpec::Projected { .. })
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct Sample {
    pub t: f64,
    pub drift: f64,
    pub matrix: PolyMatrix,
}

#[derive(Clone, Debug, Serialize)]
pub struct Trajectory {
    pub field: FieldSpec,
    pub samples: Vec<Sample>,
    /// Max over time of the spectral coefficient drift, relative to
    /// `max(1, |s(0)|)`.
    pub conservation_drift: f64,
    /// Max slice violation along the path (projected fields only).
    pub slice_violation: Option<f64>,
}

impl Trajectory {
    pub fn last(&self) -> &PolyMatrix {
        &self.samples.last().expect("trajectory has the initial sample").matrix
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("serializable")
    }

    /// CSV with columns `t,drift` and, every `stride` rows, the real and
    /// imaginary parts of all coordinates.
    pub fn to_csv(&self, stride: Option<usize>) -> String {
        let mut out = String::from("t,drift");
        let dim = self.samples[0].matrix.dimension();
        if stride.is_some() {
            for k in 0..dim {
                let _ = write!(out, ",c{k}_re,c{k}_im");
            }
        }
        out.push('\n');
        for (i, s) in self.samples.iter().enumerate() {
            let _ = write!(out, "{},{:e}", s.t, s.drift);
            if let Some(st) = stride {
                if st > 0 && i % st == 0 {
                    for c in s.matrix.to_vector().iter() {
                        let _ = write!(out, ",{:?},{:?}", c.re, c.im);
                    }
                } else {
                    out.push_str(&",".repeat(2 * dim));
                }
            }
            out.push('\n');
        }
        out
    }
}

fn spectral_drift(reference: &[Poly], scale: f64, a: &PolyMatrix) -> f64 {
    let cur = char_poly(a);
    reference
        .iter()
        .zip(cur.coefficients())
        .map(|(s0, s1)| s0.max_diff(s1))
        .fold(0.0, f64::max)
        / scale
}

/// Fixed-step RK4 from `0` to `t_end` (which may be negative) with step
/// size at most `dt`.
pub fn integrate(a0: &PolyMatrix, field: FieldSpec, t_end: f64, dt: f64) -> Result<Trajectory> {
    if dt.is_nan() || dt <= 0.0 || !t_end.is_finite() {
        return Err(LaxError::InvalidArgument("dt must be positive and t_end finite".into()));
    }
    let steps = ((t_end.abs() / dt).round() as usize).max(1);
    let h = t_end / steps as f64;
    let hc = C64::new(h, 0.0);
    let (r, d) = (a0.r(), a0.d());

    let reference = char_poly(a0).coefficients().to_vec();
    let scale = reference.iter().map(Poly::max_abs).fold(1.0, f64::max);
    let mut slice_violation = field.is_projected().then(|| a0.slice_violation(Node::Infinity));

    let f = |y: &CVec| -> Result<CVec> {
        Ok(field.eval_lenient(&PolyMatrix::from_vector(r, d, y)?)?.to_vector())
    };
    let mut y = a0.to_vector();
    let mut samples = vec![Sample { t: 0.0, drift: 0.0, matrix: a0.clone() }];
    let mut max_drift = 0.0f64;
    for step in 1..=steps {
        let k1 = f(&y)?;
        let k2 = f(&(&y + &k1 * (hc * 0.5)))?;
        let k3 = f(&(&y + &k2 * (hc * 0.5)))?;
        let k4 = f(&(&y + &k3 * hc))?;
        y += (k1 + k2 * C64::new(2.0, 0.0) + k3 * C64::new(2.0, 0.0) + k4) * (hc / 6.0);

        let t = step as f64 * h;
        let a = PolyMatrix::from_vector(r, d, &y)?;
        if let Some(v) = slice_violation.as_mut() {
            let now = a.slice_violation(Node::Infinity);
            if now > SLICE_EXIT_TOL {
                return Err(LaxError::SliceExit { time: t, violation: now });
            }
            *v = v.max(now);
        }
        let drift = spectral_drift(&reference, scale, &a);
        max_drift = max_drift.max(drift);
        samples.push(Sample { t, drift, matrix: a });
    }
    Ok(Trajectory { field, samples, conservation_drift: max_drift, slice_violation })
}

fn directional_derivative(field: &FieldSpec, a: &PolyMatrix, v: &CVec) -> Result<CVec> {
    let n = v.norm();
    if n == 0.0 {
        return Ok(CVec::zeros(v.len()));
    }
    let step = v * C64::new(FD_STEP / n, 0.0);
    let base = a.to_vector();
    let plus = PolyMatrix::from_vector(a.r(), a.d(), &(&base + &step))?;
    let minus = PolyMatrix::from_vector(a.r(), a.d(), &(&base - &step))?;
    let diff = field.eval_lenient(&plus)?.to_vector() - field.eval_lenient(&minus)?.to_vector();
    Ok(diff * C64::new(n / (2.0 * FD_STEP), 0.0))
}

/// `|Df2(A)[f1(A)] - Df1(A)[f2(A)]|` with central differences.
pub fn lie_bracket_residual(a: &PolyMatrix, f1: &FieldSpec, f2: &FieldSpec) -> Result<f64> {
    if f1 == f2 {
        return Ok(0.0);
    }
    let v1 = f1.eval(a)?.to_vector();
    let v2 = f2.eval(a)?.to_vector();
    let lhs = directional_derivative(f2, a, &v1)?;
    let rhs = directional_derivative(f1, a, &v2)?;
    Ok((lhs - rhs).norm())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures::{f1, f2, f3, f4};
    use crate::polymat::SampleSlice;

    fn re(x: f64) -> C64 {
        C64::new(x, 0.0)
    }

    fn pm(r: usize, d: usize, rows: &[&[&[f64]]]) -> PolyMatrix {
        PolyMatrix::new(r, d, rows.iter().map(|row| row.iter().map(|c| Poly::from_real(c)).collect()).collect())
            .unwrap()
    }

    #[test]
    fn upsilon_examples() {
        let constant = pm(2, 1, &[&[&[1.0], &[2.0]], &[&[0.0], &[3.0]]]);
        assert_eq!(upsilon(&constant, re(0.7), 2).unwrap().max_abs(), 0.0);

        let expect = pm(2, 1, &[&[&[-1.0], &[]], &[&[], &[1.0]]]);
        for a in [re(0.0), re(2.5), C64::new(-1.0, 3.0)] {
            assert!(upsilon(&f2(), a, 1).unwrap().approx_eq(&expect, 1e-14));
        }

        // [A(0), A(x)] / x with A(0) = [[0, 0], [1, 0]]
        let expect = pm(2, 1, &[&[&[0.0, -1.0], &[]], &[&[2.0], &[0.0, 1.0]]]);
        assert!(upsilon(&f1(), re(0.0), 1).unwrap().approx_eq(&expect, 1e-14));
    }

    #[test]
    fn upsilon_matches_pointwise_commutator() {
        let a = PolyMatrix::random(3, 2, 5, SampleSlice::Full).unwrap();
        let at = C64::new(0.4, -0.2);
        let f = upsilon(&a, at, 2).unwrap();
        let ap = linalg::pow(&a.eval(at), 2);
        for x in [C64::new(1.3, 0.1), C64::new(-0.5, 0.9)] {
            let direct = linalg::commutator(&ap, &a.eval(x)) / (x - at);
            assert!(linalg::max_abs(&(direct - f.eval(x))) < 1e-12);
        }
    }

    #[test]
    fn y_fields_examples() {
        let ys = y_fields(&f2(), 1).unwrap();
        assert_eq!(ys.len(), 2);
        assert!(ys[0].approx_eq(&pm(2, 1, &[&[&[-1.0], &[]], &[&[], &[1.0]]]), 1e-13));
        assert!(ys[1].max_abs() < 1e-13);

        let zero = PolyMatrix::zero(3, 2).unwrap();
        assert!(y_fields(&zero, 2).unwrap().iter().all(|y| y.max_abs() == 0.0));

        let a = f4();
        for p in 1..=2 {
            let ys = y_fields(&a, p).unwrap();
            assert_eq!(ys.len(), 2 * p + 1);
            let at = C64::new(-0.35, 0.6);
            let mut sum = PolyMatrix::zero(3, 2).unwrap();
            for (j, y) in ys.iter().enumerate() {
                sum = sum.axpy(at.powi(j as i32), y);
            }
            assert!(sum.max_diff(&upsilon(&a, at, p).unwrap()) < 1e-8);
        }
        assert!(y_field(&a, 5, 2).is_err());
    }

    #[test]
    fn projected_field_is_tangent_to_the_slice() {
        let at = C64::new(0.3, 0.1);
        let (f, _) = projected_field_with_gauge(&f4(), at, 2).unwrap();
        assert!(tangency_residual(&f, Node::Infinity) < 1e-10);
        let r2 = projected_field(&f3(), re(1.0), 1).unwrap();
        assert!(tangency_residual(&r2, Node::Infinity) < 1e-12);
        assert!(matches!(projected_field(&f1(), re(1.0), 1), Err(LaxError::NotInSlice { .. })));
    }

    #[test]
    fn projected_field_differs_from_upsilon_by_a_gauge_direction() {
        let a = PolyMatrix::random(3, 2, 9, SampleSlice::SInfinity).unwrap();
        let at = C64::new(-0.7, 0.2);
        let (f, g) = projected_field_with_gauge(&a, at, 1).unwrap();
        let diff = f.sub(&upsilon(&a, at, 1).unwrap());
        assert!(diff.max_diff(&g.act(&a).unwrap()) < 1e-12);
        let basis = gauge::orbit_tangent_matrix(&a);
        assert!(linalg::least_squares_residual(&basis, &diff.to_vector()) < 1e-10);
    }

    #[test]
    fn zero_field_trajectory_is_constant() {
        let a = pm(2, 1, &[&[&[1.0], &[2.0]], &[&[0.0], &[3.0]]]);
        let traj = integrate(&a, FieldSpec::Upsilon { a: re(0.5), p: 1 }, 0.1, 0.01).unwrap();
        assert_eq!(traj.samples.len(), 11);
        assert_eq!(traj.conservation_drift, 0.0);
        assert!(traj.samples.iter().all(|s| s.matrix == a));
    }

    #[test]
    fn projected_flow_conserves_the_curve_and_stays_on_the_slice() {
        let field = FieldSpec::Projected { a: re(1.0), p: 1 };
        let traj = integrate(&f3(), field, 1.0, 1e-3).unwrap();
        // measured 1.03e-7; the path reaches |A| ~ 71
        assert!(traj.conservation_drift < 1.1e-7, "{}", traj.conservation_drift);
        assert!(traj.slice_violation.unwrap() < 1e-10);
        assert!(traj.last().max_diff(&f3()) > 1e-3);
        let fine = integrate(&f3(), field, 1.0, 5e-4).unwrap();
        assert!(fine.conservation_drift < 1e-8);
        assert!(traj.conservation_drift / fine.conservation_drift > 12.0);
    }

    #[test]
    fn projected_flow_matches_gauged_upsilon_flow() {
        let at = C64::new(-0.5, 0.5);
        let s = PolyMatrix::random(3, 2, 0, SampleSlice::SInfinity).unwrap();
        let proj = integrate(&s, FieldSpec::Projected { a: at, p: 1 }, 0.3, 1e-3).unwrap();
        let ups = integrate(&s, FieldSpec::Upsilon { a: at, p: 1 }, 0.3, 1e-3).unwrap();
        let (nf, _) = gauge::normal_form(ups.last(), Node::Infinity).unwrap();
        assert!(nf.max_diff(proj.last()) < 1e-10);
    }

    #[test]
    fn flows_are_reversible() {
        let a = PolyMatrix::random(3, 2, 2, SampleSlice::Full).unwrap();
        let field = FieldSpec::Upsilon { a: C64::new(0.2, 0.3), p: 1 };
        let fwd = integrate(&a, field, 0.5, 1e-3).unwrap();
        let back = integrate(fwd.last(), field, -0.5, 1e-3).unwrap();
        assert!(back.last().max_diff(&a) < 1e-6);
    }

    #[test]
    fn bracket_residual_of_a_field_with_itself_is_zero() {
        let f = FieldSpec::YField { j: 1, p: 1 };
        assert_eq!(lie_bracket_residual(&f4(), &f, &f).unwrap(), 0.0);
    }

    #[test]
    fn y_fields_commute() {
        let a = f4();
        let pairs = [
            (FieldSpec::YField { j: 0, p: 1 }, FieldSpec::YField { j: 1, p: 1 }),
            (FieldSpec::YField { j: 0, p: 1 }, FieldSpec::YField { j: 0, p: 2 }),
        ];
        for (x, y) in pairs {
            assert!(lie_bracket_residual(&a, &x, &y).unwrap() < 1e-6);
        }
    }

    #[test]
    fn csv_and_json_exports() {
        let traj = integrate(&f3(), FieldSpec::Projected { a: re(1.0), p: 1 }, 0.01, 5e-3).unwrap();
        let csv = traj.to_csv(Some(2));
        let lines: Vec<&str> = csv.lines().collect();
        assert_eq!(lines.len(), 4);
        assert!(lines[0].starts_with("t,drift,c0_re,c0_im"));
        let ncols = lines[0].split(',').count();
        assert!(lines.iter().all(|l| l.split(',').count() == ncols));
        let v: serde_json::Value = serde_json::from_str(&traj.to_json()).unwrap();
        assert_eq!(v["samples"].as_array().unwrap().len(), 3);
        assert_eq!(v["field"]["kind"], "projected");
        let back: PolyMatrix = serde_json::from_value(v["samples"][2]["matrix"].clone()).unwrap();
        assert_eq!(&back, traj.last());
    }
}
