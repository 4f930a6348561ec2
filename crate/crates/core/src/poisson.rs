//! The embedding `phi: M(r, d) -> gl_r^{d+2}` and the Lie-Poisson structure
//! upstairs.
//!
//! For distinct nodes `a_1, ..., a_{d+2}` put `P_a(x) = prod_{b != a} (x - a_b)`
//! and `c_a = 1 / P_a(a_a)`. Then `phi(A) = (c_1 A(a_1), ..., c_{d+2} A(a_{d+2}))`
//! and `A(x) = sum_a Y_a P_a(x)` inverts it on the image. Each factor carries
//! the bracket
//!
//! ```text
//! {y_ij, y_kl} = delta_jk y_il - delta_li y_kj
//! ```
//!
//! so for functions with gradients `F_a = (df/dy^a_ij)`,
//! `{f, g}(Y) = sum_a <F_a G_a - G_a F_a, Y_a>` with `<X, Y> = sum X_ij Y_ij`.

use std::sync::Arc;

use rand::Rng;

use crate::error::{LaxError, Result};
use crate::gauge::{self, GaugeElement, LieGaugeElement};
use crate::linalg::{self, CMat, CVec};
use crate::poly::{min_relative_separation, Poly, C64};
use crate::polymat::{random_c64, shape_bound, MatPoly, PolyMatrix};
use crate::flows::upsilon;

/// Interpolation nodes and their weights `c_a = 1 / P_a(a_a)`.
#[derive(Clone, Debug, PartialEq)]
pub struct Nodes {
    a: Vec<C64>,
    c: Vec<C64>,
}

impl Nodes {
    pub fn new(a: Vec<C64>) -> Result<Self> {
        if a.len() < 3 {
            return Err(LaxError::InvalidArgument("need at least three nodes".into()));
        }
        if min_relative_separation(&a) <= 1e-12 {
            return Err(LaxError::InvalidArgument("nodes must be pairwise distinct".into()));
        }
        let c = (0..a.len())
            .map(|i| {
                let p: C64 = (0..a.len()).filter(|&j| j != i).map(|j| a[i] - a[j]).product();
                p.inv()
            })
            .collect();
        Ok(Nodes { a, c })
    }

    /// `0, 1, ..., d+1`.
    pub fn standard(d: usize) -> Self {
        Nodes::new((0..d + 2).map(|k| C64::new(k as f64, 0.0)).collect()).expect("integers are distinct")
    }

    pub fn a(&self) -> &[C64] {
        &self.a
    }

    pub fn c(&self) -> &[C64] {
        &self.c
    }

    pub fn len(&self) -> usize {
        self.a.len()
    }

    pub fn is_empty(&self) -> bool {
        self.a.is_empty()
    }

    /// The degree `d` served by these nodes.
    pub fn d(&self) -> usize {
        self.a.len() - 2
    }

    /// `P_alpha(x)`.
    pub fn lagrange(&self, alpha: usize) -> Poly {
        let mut p = Poly::constant(C64::new(1.0, 0.0));
        for (j, &aj) in self.a.iter().enumerate() {
            if j != alpha {
                p = &p * &Poly::linear_factor(aj);
            }
        }
        p
    }

    pub fn lagrange_values(&self, x: C64) -> Vec<C64> {
        (0..self.len())
            .map(|i| (0..self.len()).filter(|&j| j != i).map(|j| x - self.a[j]).product())
            .collect()
    }

    /// `prod_alpha (x - a_alpha)`.
    pub fn node_poly_value(&self, x: C64) -> C64 {
        self.a.iter().map(|&aj| x - aj).product()
    }
}

/// A point `Y = (Y_1, ..., Y_{d+2})` of `gl_r^{d+2}`.
#[derive(Clone, Debug, PartialEq)]
pub struct MultiPoint {
    pub y: Vec<CMat>,
    pub nodes: Nodes,
}

impl MultiPoint {
    pub fn new(y: Vec<CMat>, nodes: Nodes) -> Result<Self> {
        if y.len() != nodes.len() || y.is_empty() {
            return Err(LaxError::InvalidArgument("one matrix per node is required".into()));
        }
        let r = y[0].nrows();
        if y.iter().any(|m| m.shape() != (r, r)) {
            return Err(LaxError::InvalidArgument("all factors must be r x r".into()));
        }
        Ok(MultiPoint { y, nodes })
    }

    pub fn zero(r: usize, nodes: Nodes) -> Self {
        MultiPoint { y: vec![CMat::zeros(r, r); nodes.len()], nodes }
    }

    /// Entries uniform on `[-1, 1] + i[-1, 1]`, with no image constraints.
    pub fn random<R: Rng>(r: usize, nodes: Nodes, rng: &mut R) -> Self {
        let y = (0..nodes.len()).map(|_| CMat::from_fn(r, r, |_, _| random_c64(rng))).collect();
        MultiPoint { y, nodes }
    }

    pub fn r(&self) -> usize {
        self.y[0].nrows()
    }

    /// Coordinates in the order factor, row, column.
    pub fn to_vector(&self) -> CVec {
        CVec::from_iterator(
            self.y.len() * self.r() * self.r(),
            self.y.iter().flat_map(|m| m.transpose().iter().copied().collect::<Vec<_>>()),
        )
    }

    pub fn from_vector(r: usize, nodes: Nodes, v: &CVec) -> Self {
        let y = (0..nodes.len())
            .map(|k| CMat::from_row_slice(r, r, &v.as_slice()[k * r * r..(k + 1) * r * r]))
            .collect();
        MultiPoint { y, nodes }
    }

    pub fn map(&self, f: impl Fn(usize, &CMat) -> CMat) -> MultiPoint {
        MultiPoint { y: self.y.iter().enumerate().map(|(k, m)| f(k, m)).collect(), nodes: self.nodes.clone() }
    }

    pub fn axpy(&self, s: C64, other: &MultiPoint) -> MultiPoint {
        self.map(|k, m| m + &other.y[k] * s)
    }

    pub fn max_diff(&self, other: &MultiPoint) -> f64 {
        self.y.iter().zip(&other.y).map(|(a, b)| linalg::max_abs(&(a - b))).fold(0.0, f64::max)
    }

    /// `sum_alpha Y_alpha P_alpha(x)` as an unconstrained matrix polynomial.
    pub fn interpolant(&self) -> MatPoly {
        let r = self.r();
        let mut acc = MatPoly::zero(r, r);
        for (k, m) in self.y.iter().enumerate() {
            let p = self.nodes.lagrange(k);
            let term = MatPoly::new(r, r, p.coeffs().iter().map(|&c| m * c).collect());
            acc = acc.add(&term);
        }
        acc
    }

    /// `A(x) = sum_alpha Y_alpha P_alpha(x)` at one point.
    pub fn interpolant_at(&self, x: C64) -> CMat {
        let w = self.nodes.lagrange_values(x);
        self.y.iter().zip(w).fold(CMat::zeros(self.r(), self.r()), |acc, (m, p)| acc + m * p)
    }
}

/// `Y_alpha = c_alpha A(a_alpha)`.
pub fn phi(a: &PolyMatrix, nodes: &Nodes) -> Result<MultiPoint> {
    if nodes.len() != a.d() + 2 {
        return Err(LaxError::InvalidArgument(format!("M(r, {}) needs {} nodes", a.d(), a.d() + 2)));
    }
    let y = nodes.a.iter().zip(&nodes.c).map(|(&x, &c)| a.eval(x) * c).collect();
    Ok(MultiPoint { y, nodes: nodes.clone() })
}

/// Largest coefficient of the interpolant lying outside the degree shape.
fn shape_overflow(mp: &MatPoly, r: usize, d: usize) -> f64 {
    let mut worst = 0.0f64;
    for (k, c) in mp.coeffs().iter().enumerate() {
        for i in 0..r {
            for j in 0..r {
                if k > shape_bound(d, i, j) {
                    worst = worst.max(c[(i, j)].norm());
                }
            }
        }
    }
    worst
}

/// Lagrange interpolation back to `M(r, d)`.
pub fn phi_inverse(y: &MultiPoint) -> Result<PolyMatrix> {
    phi_inverse_with(y, 1e-10)
}

pub fn phi_inverse_with(y: &MultiPoint, tol: f64) -> Result<PolyMatrix> {
    let (r, d) = (y.r(), y.nodes.d());
    let mp = y.interpolant();
    let residual = shape_overflow(&mp, r, d);
    if residual > tol * (1.0 + mp.max_abs()) {
        return Err(LaxError::NotInImage { residual });
    }
    truncate_to_shape(&mp, r, d)
}

type EvalFn = dyn Fn(&MultiPoint) -> C64 + Send + Sync;
type GradFn = dyn Fn(&MultiPoint) -> MultiPoint + Send + Sync;

/// A holomorphic function on `gl_r^{d+2}` with its gradient
/// `(df/dy^alpha_ij)`.
#[derive(Clone)]
pub struct ScalarField {
    eval: Arc<EvalFn>,
    grad: Arc<GradFn>,
}

impl ScalarField {
    pub fn new(
        eval: impl Fn(&MultiPoint) -> C64 + Send + Sync + 'static,
        grad: impl Fn(&MultiPoint) -> MultiPoint + Send + Sync + 'static,
    ) -> Self {
        ScalarField { eval: Arc::new(eval), grad: Arc::new(grad) }
    }

    /// A function whose gradient is taken by central differences.
    pub fn from_fn(eval: impl Fn(&MultiPoint) -> C64 + Send + Sync + 'static) -> Self {
        let eval: Arc<EvalFn> = Arc::new(eval);
        let e2 = eval.clone();
        ScalarField { eval, grad: Arc::new(move |y| finite_difference_gradient(&*e2, y, 1e-6)) }
    }

    pub fn eval(&self, y: &MultiPoint) -> C64 {
        (self.eval)(y)
    }

    pub fn grad(&self, y: &MultiPoint) -> MultiPoint {
        (self.grad)(y)
    }

    /// The coordinate function `y^alpha_ij`.
    pub fn coordinate(alpha: usize, i: usize, j: usize) -> Self {
        ScalarField::new(
            move |y| y.y[alpha][(i, j)],
            move |y| {
                let r = y.r();
                y.map(|k, _| {
                    let mut m = CMat::zeros(r, r);
                    if k == alpha {
                        m[(i, j)] = C64::new(1.0, 0.0);
                    }
                    m
                })
            },
        )
    }

    /// `Y -> sum_alpha <W_alpha, Y_alpha>`.
    pub fn linear(w: MultiPoint) -> Self {
        let w2 = w.clone();
        ScalarField::new(
            move |y| w.y.iter().zip(&y.y).map(|(a, b)| a.component_mul(b).sum()).sum(),
            move |_| w2.clone(),
        )
    }

    /// The Casimir `t_{k,alpha} = tr(Y_alpha^k)`.
    pub fn trace_power(alpha: usize, k: usize) -> Self {
        ScalarField::new(
            move |y| linalg::pow(&y.y[alpha], k).trace(),
            move |y| {
                let r = y.r();
                y.map(|b, m| {
                    if b == alpha && k > 0 {
                        linalg::pow(m, k - 1).transpose() * C64::new(k as f64, 0.0)
                    } else {
                        CMat::zeros(r, r)
                    }
                })
            },
        )
    }

    pub fn product(&self, other: &ScalarField) -> ScalarField {
        let (f1, g1) = (self.clone(), other.clone());
        let (f2, g2) = (self.clone(), other.clone());
        ScalarField::new(
            move |y| f1.eval(y) * g1.eval(y),
            move |y| {
                let (fv, gv) = (f2.eval(y), g2.eval(y));
                let (fg, gg) = (f2.grad(y), g2.grad(y));
                fg.map(|k, m| m * gv + &gg.y[k] * fv)
            },
        )
    }

    pub fn scale(&self, s: C64) -> ScalarField {
        let (f1, f2) = (self.clone(), self.clone());
        ScalarField::new(move |y| f1.eval(y) * s, move |y| f2.grad(y).map(|_, m| m * s))
    }
}

fn finite_difference_gradient(f: &EvalFn, y: &MultiPoint, h: f64) -> MultiPoint {
    let r = y.r();
    let mut out = MultiPoint::zero(r, y.nodes.clone());
    let hc = C64::new(h, 0.0);
    for k in 0..y.y.len() {
        for i in 0..r {
            for j in 0..r {
                let mut plus = y.clone();
                let mut minus = y.clone();
                plus.y[k][(i, j)] += hc;
                minus.y[k][(i, j)] -= hc;
                out.y[k][(i, j)] = (f(&plus) - f(&minus)) / (2.0 * h);
            }
        }
    }
    out
}

/// Largest deviation between the stored gradient and central differences.
pub fn gradient_check(f: &ScalarField, y: &MultiPoint, h: f64) -> f64 {
    let fd = finite_difference_gradient(&*f.eval, y, h);
    f.grad(y).max_diff(&fd)
}

/// The Lie-Poisson bracket `{f, g}(Y)`.
pub fn bracket(f: &ScalarField, g: &ScalarField, y: &MultiPoint) -> C64 {
    let (fg, gg) = (f.grad(y), g.grad(y));
    fg.y.iter()
        .zip(&gg.y)
        .zip(&y.y)
        .map(|((a, b), ya)| linalg::commutator(a, b).component_mul(ya).sum())
        .sum()
}

/// For linear `f` and `g` the bracket is again linear, with weights
/// `[F_alpha, G_alpha]`.
pub fn linear_bracket(f: &ScalarField, g: &ScalarField, r: usize, nodes: &Nodes) -> ScalarField {
    let probe = MultiPoint::zero(r, nodes.clone());
    let (fg, gg) = (f.grad(&probe), g.grad(&probe));
    ScalarField::linear(fg.map(|k, m| linalg::commutator(m, &gg.y[k])))
}

/// `X_f(Y) = {Y, f}`, i.e. `dY_alpha/dt = [Y_alpha, F_alpha^t]`.
pub fn hamiltonian_vector_field(f: &ScalarField, y: &MultiPoint) -> MultiPoint {
    let fg = f.grad(y);
    y.map(|k, m| linalg::commutator(m, &fg.y[k].transpose()))
}

/// `H_E(Y) = sum_alpha tr(E(a_alpha) Y_alpha)` for `E` in `Lie G_r`.
pub fn moment_hamiltonian(e: &LieGaugeElement, nodes: &Nodes) -> ScalarField {
    let r = e.c.nrows() + 1;
    let w = MultiPoint { y: nodes.a.iter().map(|&x| e.eval(x).transpose()).collect(), nodes: nodes.clone() };
    debug_assert_eq!(w.r(), r);
    ScalarField::linear(w)
}

/// Components of the moment map over the basis of `Lie G_r`.
pub fn moment_map(y: &MultiPoint) -> Vec<C64> {
    LieGaugeElement::basis(y.r())
        .iter()
        .map(|e| moment_hamiltonian(e, &y.nodes).eval(y))
        .collect()
}

/// `t_1 = sum_alpha tr Y_alpha`.
pub fn t1(y: &MultiPoint) -> C64 {
    y.y.iter().map(|m| m.trace()).sum()
}

/// Residual of the linear equations cutting out the image of `phi`:
/// `sum y^a_11 = 0`, `sum y^a_ij = 0` (`i, j >= 2`), and
/// `sum y^a_i1 = sum a_a y^a_i1 = 0` (`i >= 2`).
pub fn imvarphi_residual(y: &MultiPoint) -> f64 {
    let r = y.r();
    let a = y.nodes.a();
    let sum = |i: usize, j: usize, weighted: bool| -> C64 {
        y.y.iter()
            .zip(a)
            .map(|(m, &x)| if weighted { m[(i, j)] * x } else { m[(i, j)] })
            .sum()
    };
    let mut worst = sum(0, 0, false).norm();
    for i in 1..r {
        worst = worst.max(sum(i, 0, false).norm()).max(sum(i, 0, true).norm());
        for j in 1..r {
            worst = worst.max(sum(i, j, false).norm());
        }
    }
    worst
}

/// `max(|mu(Y)|, |t_1(Y)|)`.
pub fn moment_t1_residual(y: &MultiPoint) -> f64 {
    moment_map(y).iter().map(|c| c.norm()).fold(t1(y).norm(), f64::max)
}

pub fn image_predicate(y: &MultiPoint, tol: f64) -> bool {
    moment_t1_residual(y) <= tol
}

/// `Y -> tr A(a)^{p+1}` with `A(a) = sum_alpha Y_alpha P_alpha(a)`.
pub fn trace_hamiltonian(a: C64, p: usize, nodes: &Nodes) -> ScalarField {
    let w = nodes.lagrange_values(a);
    let w2 = w.clone();
    let interp = move |y: &MultiPoint, w: &[C64]| {
        y.y.iter().zip(w).fold(CMat::zeros(y.r(), y.r()), |acc, (m, p)| acc + m * *p)
    };
    ScalarField::new(
        move |y| linalg::pow(&interp(y, &w), p + 1).trace(),
        move |y| {
            let ap = linalg::pow(&interp(y, &w2), p).transpose() * C64::new((p + 1) as f64, 0.0);
            y.map(|k, _| &ap * w2[k])
        },
    )
}

/// Distance, modulo the gauge-orbit tangents, between the Hamiltonian field
/// of `tr A(a)^{p+1}` pulled back to `M(r, d)` and
/// `(p+1) prod (a - a_alpha) Upsilon_a^(p)`, relative to the size of the latter.
pub fn hamiltonian_field_check(a: &PolyMatrix, at: C64, p: usize, nodes: &Nodes) -> Result<f64> {
    let y = phi(a, nodes)?;
    let h = trace_hamiltonian(at, p, nodes);
    let pulled = hamiltonian_vector_field(&h, &y).interpolant();
    let target = upsilon(a, at, p)?.scale(C64::new((p + 1) as f64, 0.0) * nodes.node_poly_value(at));
    let diff = pulled.sub(&target.as_matpoly());
    let overflow = shape_overflow(&diff, a.r(), a.d());
    let inside = truncate_to_shape(&diff, a.r(), a.d())?;
    let basis = gauge::orbit_tangent_matrix(a);
    let res = linalg::least_squares_residual(&basis, &inside.to_vector());
    Ok(res.hypot(overflow) / target.to_vector().norm().max(1.0))
}

fn truncate_to_shape(mp: &MatPoly, r: usize, d: usize) -> Result<PolyMatrix> {
    let mut coeffs: Vec<CMat> = mp.coeffs().iter().take(d + 2).cloned().collect();
    coeffs.resize(d + 2, CMat::zeros(r, r));
    for (k, c) in coeffs.iter_mut().enumerate() {
        for i in 0..r {
            for j in 0..r {
                if k > shape_bound(d, i, j) {
                    c[(i, j)] = C64::default();
                }
            }
        }
    }
    PolyMatrix::from_matpoly(r, d, &MatPoly::new(r, r, coeffs), 0.0)
}

/// `(g(a_1)^{-1} Y_1 g(a_1), ...)`.
pub fn gauge_multipoint(g: &GaugeElement, y: &MultiPoint) -> Result<MultiPoint> {
    let mut out = Vec::with_capacity(y.y.len());
    for (m, &x) in y.y.iter().zip(y.nodes.a()) {
        let gx = g.eval(x);
        let inv = linalg::inverse(&gx).ok_or(LaxError::SingularB { det_abs: 0.0 })?;
        out.push(inv * m * gx);
    }
    MultiPoint::new(out, y.nodes.clone())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures::{f1, f4};
    use crate::polymat::SampleSlice;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn re(x: f64) -> C64 {
        C64::new(x, 0.0)
    }

    fn rng(seed: u64) -> ChaCha8Rng {
        ChaCha8Rng::seed_from_u64(seed)
    }

    fn e(r: usize, i: usize, j: usize) -> CMat {
        let mut m = CMat::zeros(r, r);
        m[(i, j)] = re(1.0);
        m
    }

    // {f, g} from the structure constants, summing over all coordinate pairs.
    fn brute_force_bracket(f: &ScalarField, g: &ScalarField, y: &MultiPoint) -> C64 {
        let (fg, gg) = (f.grad(y), g.grad(y));
        let r = y.r();
        let mut acc = C64::default();
        for a in 0..y.y.len() {
            let ya = &y.y[a];
            for i in 0..r {
                for j in 0..r {
                    for k in 0..r {
                        for l in 0..r {
                            let mut pb = C64::default();
                            if j == k {
                                pb += ya[(i, l)];
                            }
                            if l == i {
                                pb -= ya[(k, j)];
                            }
                            acc += fg.y[a][(i, j)] * gg.y[a][(k, l)] * pb;
                        }
                    }
                }
            }
        }
        acc
    }

    #[test]
    fn node_weights() {
        let n = Nodes::standard(1);
        let expect = [re(0.5), re(-1.0), re(0.5)];
        for (c, e) in n.c().iter().zip(expect) {
            assert!((c - e).norm() < 1e-15);
        }
        assert!(Nodes::new(vec![re(0.0), re(1.0), re(1.0)]).is_err());
    }

    #[test]
    fn phi_round_trip_and_image() {
        let nodes = Nodes::standard(1);
        let y = phi(&f1(), &nodes).unwrap();
        assert!(imvarphi_residual(&y) < 1e-12);
        assert!(phi_inverse(&y).unwrap().approx_eq(&f1(), 1e-12));
        assert!(phi(&PolyMatrix::zero(2, 1).unwrap(), &nodes).unwrap().y.iter().all(|m| m.iter().all(|c| c.norm() == 0.0)));

        let a = f4();
        let y = phi(&a, &Nodes::standard(2)).unwrap();
        assert!(phi_inverse(&y).unwrap().max_diff(&a) < 1e-10);
        assert!(moment_map(&y).iter().all(|c| c.norm() < 1e-12));
        assert!(image_predicate(&y, 1e-12));
    }

    #[test]
    fn phi_inverse_rejects_points_outside_the_image() {
        let nodes = Nodes::standard(2);
        let mut y = phi(&f4(), &nodes).unwrap();
        y.y[0][(0, 0)] += re(1.0);
        assert!(matches!(phi_inverse(&y), Err(LaxError::NotInImage { .. })));
        assert!(!image_predicate(&y, 1e-12));
    }

    // Independent sampler: random factors, then the last factors are adjusted
    // so that the linear image equations hold.
    fn constrained_sample(r: usize, nodes: &Nodes, rng: &mut ChaCha8Rng) -> MultiPoint {
        let mut y = MultiPoint::random(r, nodes.clone(), rng);
        let n = nodes.len();
        let a = nodes.a();
        for i in 0..r {
            for j in 0..r {
                if i == 0 && j > 0 {
                    continue;
                }
                let s: C64 = (0..n - 1).map(|k| y.y[k][(i, j)]).sum();
                if i > 0 && j == 0 {
                    // two equations: solve for the last two factors
                    let s: C64 = (0..n - 2).map(|k| y.y[k][(i, 0)]).sum();
                    let t: C64 = (0..n - 2).map(|k| y.y[k][(i, 0)] * a[k]).sum();
                    let (p, q) = (a[n - 2], a[n - 1]);
                    let z2 = (t - q * s) / (q - p);
                    let z1 = -s - z2;
                    y.y[n - 2][(i, 0)] = z2;
                    y.y[n - 1][(i, 0)] = z1;
                } else {
                    y.y[n - 1][(i, j)] = -s;
                }
            }
        }
        y
    }

    #[test]
    fn constrained_samples_are_in_the_image() {
        let mut rng = rng(1);
        let nodes = Nodes::standard(2);
        for _ in 0..5 {
            let y = constrained_sample(3, &nodes, &mut rng);
            assert!(imvarphi_residual(&y) < 1e-13);
            assert!(moment_t1_residual(&y) < 1e-12);
            let a = phi_inverse(&y).unwrap();
            assert!(phi(&a, &nodes).unwrap().max_diff(&y) < 1e-12);
        }
    }

    #[test]
    fn image_predicate_agrees_with_the_linear_equations() {
        let mut rng = rng(2);
        let nodes = Nodes::standard(2);
        for _ in 0..10 {
            let y = MultiPoint::random(3, nodes.clone(), &mut rng);
            assert!(imvarphi_residual(&y) > 1e-3);
            assert!(moment_t1_residual(&y) > 1e-3);
            let y = constrained_sample(3, &nodes, &mut rng);
            assert!(imvarphi_residual(&y) < 1e-12 && moment_t1_residual(&y) < 1e-12);
        }
    }

    #[test]
    fn coordinate_bracket() {
        let mut rng = rng(3);
        let y = MultiPoint::random(2, Nodes::standard(1), &mut rng);
        let f = ScalarField::coordinate(0, 0, 1);
        let g = ScalarField::coordinate(0, 1, 0);
        let expect = y.y[0][(0, 0)] - y.y[0][(1, 1)];
        assert!((bracket(&f, &g, &y) - expect).norm() < 1e-15);
        assert_eq!(bracket(&f, &f, &y), C64::default());
        let other = ScalarField::coordinate(1, 1, 0);
        assert_eq!(bracket(&f, &other, &y), C64::default());
    }

    #[test]
    fn bracket_matches_structure_constants() {
        let mut rng = rng(4);
        let nodes = Nodes::standard(2);
        let y = MultiPoint::random(3, nodes.clone(), &mut rng);
        let f = trace_hamiltonian(C64::new(0.3, 0.4), 2, &nodes);
        let g = ScalarField::coordinate(1, 2, 0).product(&ScalarField::trace_power(2, 2));
        assert!((bracket(&f, &g, &y) - brute_force_bracket(&f, &g, &y)).norm() < 1e-11);
    }

    #[test]
    fn casimirs_are_central() {
        let mut rng = rng(5);
        let y = MultiPoint::random(3, Nodes::standard(1), &mut rng);
        for alpha in 0..3 {
            for k in 1..=3 {
                let c = ScalarField::trace_power(alpha, k);
                for i in 0..3 {
                    for j in 0..3 {
                        for b in 0..3 {
                            let f = ScalarField::coordinate(b, i, j);
                            assert!(bracket(&c, &f, &y).norm() < 1e-10);
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn gradients_match_finite_differences() {
        let mut rng = rng(6);
        let nodes = Nodes::standard(2);
        let y = MultiPoint::random(3, nodes.clone(), &mut rng);
        assert!(gradient_check(&trace_hamiltonian(C64::new(0.5, -0.2), 2, &nodes), &y, 1e-5) < 1e-6);
        assert!(gradient_check(&ScalarField::trace_power(1, 3), &y, 1e-5) < 1e-6);
        let prod = ScalarField::coordinate(0, 1, 2).product(&ScalarField::trace_power(3, 2));
        assert!(gradient_check(&prod, &y, 1e-5) < 1e-6);
        let fd = ScalarField::from_fn(|y: &MultiPoint| y.y[0].determinant());
        let exact = y.y[0].clone().try_inverse().unwrap().transpose() * y.y[0].determinant();
        assert!(linalg::max_abs(&(fd.grad(&y).y[0].clone() - exact)) < 1e-6);
    }

    #[test]
    fn trace_hamiltonian_of_degree_one_is_linear() {
        let nodes = Nodes::standard(1);
        let h = trace_hamiltonian(re(2.5), 0, &nodes);
        let mut rng = rng(7);
        let y1 = MultiPoint::random(2, nodes.clone(), &mut rng);
        let y2 = MultiPoint::random(2, nodes.clone(), &mut rng);
        assert!(h.grad(&y1).max_diff(&h.grad(&y2)) == 0.0);
    }

    #[test]
    fn jacobi_and_leibniz() {
        let mut rng = rng(8);
        let nodes = Nodes::standard(1);
        let y = MultiPoint::random(3, nodes.clone(), &mut rng);
        let f = trace_hamiltonian(re(0.7), 1, &nodes);
        let g = ScalarField::coordinate(0, 0, 2).product(&ScalarField::coordinate(1, 2, 1));
        let h = ScalarField::trace_power(2, 2).product(&ScalarField::coordinate(2, 1, 0));
        let fg = f.product(&g);
        let lhs = bracket(&fg, &h, &y);
        let rhs = f.eval(&y) * bracket(&g, &h, &y) + g.eval(&y) * bracket(&f, &h, &y);
        assert!((lhs - rhs).norm() < 1e-9);
        assert!((bracket(&f, &g, &y) + bracket(&g, &f, &y)).norm() < 1e-12);
    }

    #[test]
    fn jacobi_identity_on_coordinates() {
        let mut rng = rng(12);
        let nodes = Nodes::standard(1);
        let y = MultiPoint::random(3, nodes.clone(), &mut rng);
        let coords: Vec<ScalarField> = (0..9).map(|k| ScalarField::coordinate(k % 3, k / 3, (k * 7) % 3)).collect();
        for f in &coords {
            for g in &coords {
                for h in &coords {
                    let j = bracket(&linear_bracket(f, g, 3, &nodes), h, &y)
                        + bracket(&linear_bracket(g, h, 3, &nodes), f, &y)
                        + bracket(&linear_bracket(h, f, 3, &nodes), g, &y);
                    assert!(j.norm() < 1e-12);
                }
            }
        }
        let f = ScalarField::coordinate(0, 0, 1);
        let g = ScalarField::coordinate(0, 1, 0);
        assert!((linear_bracket(&f, &g, 3, &nodes).eval(&y) - bracket(&f, &g, &y)).norm() < 1e-15);
    }

    #[test]
    fn moment_map_examples() {
        let nodes = Nodes::standard(1);
        let mut y = MultiPoint::zero(2, nodes.clone());
        y.y[0] = e(2, 1, 0);
        // basis order for r = 2: E_22, E_12, x E_12
        let mu = moment_map(&y);
        assert_eq!(mu, vec![re(0.0), re(1.0), re(0.0)]);
    }

    #[test]
    fn moment_map_is_an_anti_homomorphism() {
        let mut rng = rng(9);
        let nodes = Nodes::standard(2);
        let y = MultiPoint::random(3, nodes.clone(), &mut rng);
        let basis = LieGaugeElement::basis(3);
        for e1 in &basis {
            for e2 in &basis {
                let lhs = bracket(&moment_hamiltonian(e1, &nodes), &moment_hamiltonian(e2, &nodes), &y);
                let rhs = moment_hamiltonian(&e1.bracket(e2), &nodes).eval(&y);
                assert!((lhs + rhs).norm() < 1e-10);
            }
        }
    }

    #[test]
    fn gauge_compatibility_of_phi() {
        let mut rng = rng(10);
        let nodes = Nodes::new(vec![C64::new(0.2, 0.1), re(-0.8), C64::new(0.4, -0.9), re(1.1)]).unwrap();
        let a = PolyMatrix::random_with(3, 2, &mut rng, SampleSlice::Full).unwrap();
        let g = GaugeElement::random(3, &mut rng);
        let lhs = phi(&gauge::gauge_apply(&g, &a).unwrap(), &nodes).unwrap();
        let rhs = gauge_multipoint(&g, &phi(&a, &nodes).unwrap()).unwrap();
        assert!(lhs.max_diff(&rhs) < 1e-10);
    }

    #[test]
    fn hamiltonian_fields_generate_upsilon() {
        let nodes = Nodes::standard(1);
        assert!(hamiltonian_field_check(&f1(), re(3.0), 1, &nodes).unwrap() < 1e-8);
        let nodes = Nodes::standard(2);
        assert!(hamiltonian_field_check(&f4(), C64::new(0.0, 2.0), 2, &nodes).unwrap() < 1e-8);
    }

    #[test]
    fn trace_hamiltonians_are_in_involution() {
        let mut rng = rng(11);
        let nodes = Nodes::standard(2);
        let a = PolyMatrix::random_with(3, 2, &mut rng, SampleSlice::Full).unwrap();
        let y = phi(&a, &nodes).unwrap();
        let f = trace_hamiltonian(C64::new(0.3, 0.6), 1, &nodes);
        let g = trace_hamiltonian(C64::new(-1.2, 0.1), 2, &nodes);
        assert!(bracket(&f, &g, &y).norm() < 1e-8);
    }

    #[test]
    fn doubling_the_hamiltonian_doubles_the_field() {
        let nodes = Nodes::standard(1);
        let y = phi(&f1(), &nodes).unwrap();
        let h = trace_hamiltonian(re(3.0), 1, &nodes);
        let x1 = hamiltonian_vector_field(&h, &y);
        let x2 = hamiltonian_vector_field(&h.scale(re(2.0)), &y);
        assert!(x2.max_diff(&x1.map(|_, m| m * re(2.0))) < 1e-14);
    }
}
