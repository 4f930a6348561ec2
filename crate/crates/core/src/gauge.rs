//! The gauge group `G_r` of block upper-triangular matrices
//!
//! ```text
//! g(x) = [[1, b1^t x + b0^t], [0, B]],   B invertible
//! ```
//!
//! acting on `M(r, d)` by `A -> g^{-1} A g`, together with its Lie algebra,
//! the `D`-matrix criterion for the subsystems `M_c`, the normal form onto
//! the representative slices `S_c`, and the theta-divisor membership test.

use rand::Rng;
use serde::Serialize;

use crate::error::{LaxError, Result};
use crate::linalg::{self, CMat, CVec};
use crate::poly::{min_relative_separation, Poly, C64};
use crate::polymat::{random_c64, MatPoly, Node, PolyMatrix};
use crate::spectral::{self, ROOT_SEPARATION};

/// `|det B|` at or below this is treated as singular.
pub const SINGULAR_TOL: f64 = 1e-12;
/// `|det D(A; c)|` must exceed this for `A` to be in `M_c`.
pub const MC_TOL: f64 = 1e-10;
/// Relative size of an eigenvector's first entry below which it counts as zero.
pub const FIRST_ENTRY_TOL: f64 = 1e-8;

#[derive(Clone, Debug, PartialEq)]
pub struct GaugeElement {
    b: CMat,
    b1: CVec,
    b0: CVec,
}

/// JSON layout: `b` as rows of `[re, im]` pairs, `b1` and `b0` as lists of pairs.
impl Serialize for GaugeElement {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        #[derive(Serialize)]
        struct Out {
            b: Vec<Vec<[f64; 2]>>,
            b1: Vec<[f64; 2]>,
            b0: Vec<[f64; 2]>,
        }
        let pair = |z: &C64| [z.re, z.im];
        Out {
            b: self.b.row_iter().map(|row| row.iter().map(pair).collect()).collect(),
            b1: self.b1.iter().map(pair).collect(),
            b0: self.b0.iter().map(pair).collect(),
        }
        .serialize(s)
    }
}

impl GaugeElement {
    pub fn new(b: CMat, b1: CVec, b0: CVec) -> Result<Self> {
        let m = b.nrows();
        if b.ncols() != m || b1.len() != m || b0.len() != m || m == 0 {
            return Err(LaxError::InvalidArgument("inconsistent gauge element sizes".into()));
        }
        let det_abs = linalg::det(&b).norm();
        if det_abs <= SINGULAR_TOL {
            return Err(LaxError::SingularB { det_abs });
        }
        Ok(GaugeElement { b, b1, b0 })
    }

    pub fn identity(r: usize) -> Self {
        let m = r - 1;
        GaugeElement { b: linalg::identity(m), b1: CVec::zeros(m), b0: CVec::zeros(m) }
    }

    pub fn random<R: Rng>(r: usize, rng: &mut R) -> Self {
        let m = r - 1;
        loop {
            let b = CMat::from_fn(m, m, |_, _| random_c64(rng));
            let b1 = CVec::from_fn(m, |_, _| random_c64(rng));
            let b0 = CVec::from_fn(m, |_, _| random_c64(rng));
            if let Ok(g) = GaugeElement::new(b, b1, b0) {
                return g;
            }
        }
    }

    pub fn r(&self) -> usize {
        self.b.nrows() + 1
    }

    pub fn b(&self) -> &CMat {
        &self.b
    }

    pub fn b1(&self) -> &CVec {
        &self.b1
    }

    pub fn b0(&self) -> &CVec {
        &self.b0
    }

    /// `g(x)` as an `r x r` matrix polynomial.
    pub fn as_matpoly(&self) -> MatPoly {
        let m = self.b.nrows();
        let one = MatPoly::constant(CMat::identity(1, 1));
        let top = MatPoly::new(1, m, vec![row_mat(&self.b0), row_mat(&self.b1)]);
        let zero = MatPoly::zero(m, 1);
        MatPoly::from_blocks(&one, &top, &zero, &MatPoly::constant(self.b.clone()))
    }

    pub fn eval(&self, x: C64) -> CMat {
        self.as_matpoly().eval(x)
    }

    /// The element `g h`, so that acting by it equals acting by `g` then `h`.
    pub fn compose(&self, h: &GaugeElement) -> Result<GaugeElement> {
        let bt = h.b.transpose();
        GaugeElement::new(&self.b * &h.b, &h.b1 + &bt * &self.b1, &h.b0 + &bt * &self.b0)
    }

    pub fn invert(&self) -> Result<GaugeElement> {
        let binv = linalg::inverse(&self.b).ok_or(LaxError::SingularB { det_abs: 0.0 })?;
        let bit = binv.transpose();
        GaugeElement::new(binv, -(&bit * &self.b1), -(&bit * &self.b0))
    }

    pub fn max_diff(&self, other: &GaugeElement) -> f64 {
        linalg::max_abs(&(&self.b - &other.b))
            .max((&self.b1 - &other.b1).iter().map(|c| c.norm()).fold(0.0, f64::max))
            .max((&self.b0 - &other.b0).iter().map(|c| c.norm()).fold(0.0, f64::max))
    }
}

/// `g(A) = g^{-1} A g`, evaluated blockwise:
///
/// ```text
/// v' = v - b^t B^{-1} u
/// w'^t = w^t B + v b^t - (b^t B^{-1} u) b^t - b^t B^{-1} T B
/// u' = B^{-1} u
/// T' = B^{-1} u b^t + B^{-1} T B
/// ```
pub fn gauge_apply(g: &GaugeElement, a: &PolyMatrix) -> Result<PolyMatrix> {
    if g.r() != a.r() {
        return Err(LaxError::InvalidArgument("gauge element and matrix sizes differ".into()));
    }
    let binv = linalg::inverse(&g.b).ok_or(LaxError::SingularB { det_abs: 0.0 })?;
    let blk = a.blocks();
    let m = a.r() - 1;
    let bt = MatPoly::new(1, m, vec![row_mat(&g.b0), row_mat(&g.b1)]);

    let binv_u = blk.u.left_mul_const(&binv);
    let bt_binv_u = bt.mul(&binv_u);
    let binv_t_b = blk.t.left_mul_const(&binv).right_mul_const(&g.b);

    let v = blk.v.sub(&bt_binv_u);
    let wt = blk
        .wt
        .right_mul_const(&g.b)
        .add(&blk.v.mul(&bt))
        .sub(&bt_binv_u.mul(&bt))
        .sub(&bt.mul(&binv_t_b));
    let t = binv_u.mul(&bt).add(&binv_t_b);
    let mp = MatPoly::from_blocks(&v, &wt, &binv_u, &t);
    PolyMatrix::from_matpoly(a.r(), a.d(), &mp, 0.0)
}

/// `D(A; c) = (u(c), T(c) u(c), ..., T(c)^{r-2} u(c))`; at infinity the
/// leading coefficients `u_{d-1}` and `T_d` are used.
pub fn d_matrix(a: &PolyMatrix, node: Node) -> CMat {
    let m = a.r() - 1;
    let at = a.eval_at(node);
    krylov(&at.view((1, 0), (m, 1)).into_owned(), &at.view((1, 1), (m, m)).into_owned())
}

fn row_mat(v: &CVec) -> CMat {
    CMat::from_row_slice(1, v.len(), v.as_slice())
}

fn krylov(u: &CMat, t: &CMat) -> CMat {
    let m = t.nrows();
    let mut cols = Vec::with_capacity(m);
    let mut col = u.clone();
    for _ in 0..m {
        cols.push(col.column(0).into_owned());
        col = t * col;
    }
    CMat::from_columns(&cols)
}

pub fn d_det(a: &PolyMatrix, node: Node) -> C64 {
    linalg::det(&d_matrix(a, node))
}

/// `det D(A(x); x)` as a polynomial of degree at most `g`. The `x^g`
/// coefficient is `det D(A; inf)`; the lower part is interpolated from
/// values on the unit circle.
pub fn d_poly(a: &PolyMatrix) -> Poly {
    let g = spectral::genus(a.r(), a.d());
    let lead = d_det(a, Node::Infinity);
    let values: Vec<C64> = Poly::circle_nodes(g, 1.0)
        .into_iter()
        .map(|x| d_det(a, Node::Finite(x)) - lead * x.powi(g as i32))
        .collect();
    let mut coeffs = Poly::from_circle_samples(&values, 1.0).into_coeffs();
    coeffs.push(lead);
    Poly::new(coeffs)
}

pub fn in_mc(a: &PolyMatrix, node: Node) -> bool {
    in_mc_with(a, node, MC_TOL)
}

pub fn in_mc_with(a: &PolyMatrix, node: Node, tol: f64) -> bool {
    d_det(a, node).norm() > tol
}

/// An element `G(x) = [[0, beta^t + gamma^t x], [0, C]]` of `Lie G_r`.
#[derive(Clone, Debug, PartialEq)]
pub struct LieGaugeElement {
    pub c: CMat,
    pub beta: CVec,
    pub gamma: CVec,
}

impl LieGaugeElement {
    pub fn zero(r: usize) -> Self {
        let m = r - 1;
        LieGaugeElement { c: CMat::zeros(m, m), beta: CVec::zeros(m), gamma: CVec::zeros(m) }
    }

    pub fn dimension(r: usize) -> usize {
        (r - 1) * (r - 1) + 2 * (r - 1)
    }

    /// Coordinates in basis order: `E_ij` (`2 <= i,j <= r`, row-major),
    /// then `E_1j`, then `x E_1j`.
    pub fn from_vector(r: usize, v: &[C64]) -> Self {
        let m = r - 1;
        assert_eq!(v.len(), Self::dimension(r));
        LieGaugeElement {
            c: CMat::from_row_slice(m, m, &v[..m * m]),
            beta: CVec::from_column_slice(&v[m * m..m * m + m]),
            gamma: CVec::from_column_slice(&v[m * m + m..]),
        }
    }

    pub fn to_vector(&self) -> Vec<C64> {
        let m = self.c.nrows();
        let mut out = Vec::with_capacity(m * m + 2 * m);
        for i in 0..m {
            for j in 0..m {
                out.push(self.c[(i, j)]);
            }
        }
        out.extend(self.beta.iter().copied());
        out.extend(self.gamma.iter().copied());
        out
    }

    pub fn basis(r: usize) -> Vec<LieGaugeElement> {
        let n = Self::dimension(r);
        (0..n)
            .map(|k| {
                let mut v = vec![C64::default(); n];
                v[k] = C64::new(1.0, 0.0);
                Self::from_vector(r, &v)
            })
            .collect()
    }

    pub fn as_matpoly(&self) -> MatPoly {
        let m = self.c.nrows();
        let zero1 = MatPoly::constant(CMat::zeros(1, 1));
        let top = MatPoly::new(1, m, vec![row_mat(&self.beta), row_mat(&self.gamma)]);
        MatPoly::from_blocks(&zero1, &top, &MatPoly::zero(m, 1), &MatPoly::constant(self.c.clone()))
    }

    pub fn eval(&self, x: C64) -> CMat {
        self.as_matpoly().eval(x)
    }

    /// The infinitesimal action `[G(x), A(x)]`.
    pub fn act(&self, a: &PolyMatrix) -> Result<PolyMatrix> {
        let mp = a.commutator_left(&self.as_matpoly());
        PolyMatrix::from_matpoly(a.r(), a.d(), &mp, 0.0)
    }

    /// Lie bracket `[G, H]` as polynomial matrices.
    pub fn bracket(&self, other: &LieGaugeElement) -> LieGaugeElement {
        LieGaugeElement {
            c: linalg::commutator(&self.c, &other.c),
            beta: other.c.transpose() * &self.beta - self.c.transpose() * &other.beta,
            gamma: other.c.transpose() * &self.gamma - self.c.transpose() * &other.gamma,
        }
    }
}

/// The fields `X_E(A) = [E, A]` over the basis of `Lie G_r`.
pub fn orbit_tangent_basis(a: &PolyMatrix) -> Vec<PolyMatrix> {
    LieGaugeElement::basis(a.r())
        .iter()
        .map(|e| e.act(a).expect("Lie G_r preserves the degree shape"))
        .collect()
}

/// Orbit tangents as the columns of a matrix in the coordinates of
/// [`PolyMatrix::to_vector`].
pub fn orbit_tangent_matrix(a: &PolyMatrix) -> CMat {
    let cols: Vec<CVec> = orbit_tangent_basis(a).iter().map(|t| t.to_vector()).collect();
    CMat::from_columns(&cols)
}

/// Gauge `a` onto the slice `S_c` (or `S_inf`). Returns the representative
/// `S` and the unique `g` with `g(A) = S`.
pub fn normal_form(a: &PolyMatrix, node: Node) -> Result<(PolyMatrix, GaugeElement)> {
    let det_abs = d_det(a, node).norm();
    if det_abs <= MC_TOL {
        return Err(LaxError::NotInMc { det_abs });
    }
    let blk = a.blocks();
    let (d, m) = (a.d(), a.r() - 1);
    let (u0, t0, u1, t1) = match node {
        Node::Finite(c) => (
            blk.u.eval(c),
            blk.t.eval(c),
            blk.u.derivative().eval(c),
            blk.t.derivative().eval(c),
        ),
        Node::Infinity => {
            let u_below = if d >= 2 { blk.u_k(d - 2) } else { CMat::zeros(m, 1) };
            (blk.u_k(d - 1), blk.t_k(d), u_below, blk.t_k(d - 1))
        }
    };

    // B = (u, zeta_1 u, ..., zeta_{r-2} u) with zeta_i = T^i + beta_1 T^{i-1} + ... + beta_i
    let beta = spectral::char_coeffs(&t0);
    let mut cols = Vec::with_capacity(m);
    let mut zeta = linalg::identity(m);
    for i in 0..m {
        if i > 0 {
            zeta = &t0 * &zeta + linalg::identity(m) * beta[i - 1];
        }
        cols.push((&zeta * &u0).column(0).into_owned());
    }
    let b = CMat::from_columns(&cols);
    let binv = linalg::inverse(&b).ok_or(LaxError::NotInMc { det_abs })?;

    // Next-order data after conjugating by diag(1, B).
    let u1 = &binv * u1;
    let t1 = &binv * t1 * &b;
    let beta = CVec::from_vec(beta);
    let row: CVec = CVec::from_iterator(m, t1.row(0).iter().copied());
    let (b1, b0) = match node {
        Node::Finite(c) => {
            let b1 = -row - &beta * u1[(0, 0)];
            let b0 = &beta - &b1 * c;
            (b1, b0)
        }
        Node::Infinity => {
            let b0 = -row - &beta * u1[(0, 0)];
            (beta, b0)
        }
    };
    let g = GaugeElement::new(b, b1, b0)?;
    let s = gauge_apply(&g, a)?;
    Ok((s, g))
}

#[derive(Clone, Debug, Serialize)]
pub struct ThetaReport {
    pub node: Node,
    pub eigenvalues: Vec<C64>,
    /// One flag per eigenvalue: the eigenvector of `A(a)^t` has a nonzero
    /// first entry.
    pub outside_theta: Vec<bool>,
    /// `r - 1 - rank D`.
    pub dim_w: usize,
    pub rank_d: usize,
    /// Eigenvectors of `A(a)^t` found with a vanishing first entry.
    pub zero_first_entries: usize,
}

/// Per-eigenvalue theta-divisor test at an unramified node.
pub fn theta_membership(a: &PolyMatrix, node: Node) -> Result<ThetaReport> {
    let r = a.r();
    let m = r - 1;
    let at = a.eval_at(node);
    let eigenvalues = linalg::eigenvalues(&at);
    if min_relative_separation(&eigenvalues) <= ROOT_SEPARATION {
        return Err(LaxError::RamifiedPoint { node: node.to_string() });
    }
    let ct = at.transpose();
    let outside_theta: Vec<bool> = eigenvalues
        .iter()
        .map(|&lam| {
            let v = linalg::null_vector(&(&ct - linalg::identity(r) * lam));
            v[0].norm() > FIRST_ENTRY_TOL * v.norm()
        })
        .collect();

    // With C = A(a)^t written as C^t = [[*, *], [c, C_0]]:
    // D = (c, C_0 c, ..., C_0^{r-2} c)^t.
    let c = at.view((1, 0), (m, 1)).into_owned();
    let c0 = at.view((1, 1), (m, m)).into_owned();
    let dmat = krylov(&c, &c0).transpose();
    // Column k of D scales like |A(a)|^(k+1).
    let scale = linalg::max_abs(&at).max(1.0).powi(m as i32);
    let rank_d = linalg::rank_above(&dmat, linalg::RANK_REL_TOL * scale);
    let zero_first_entries = outside_theta.iter().filter(|f| !**f).count();
    Ok(ThetaReport {
        node,
        eigenvalues,
        outside_theta,
        dim_w: m - rank_d,
        rank_d,
        zero_first_entries,
    })
}
