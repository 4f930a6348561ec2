//! Degree-shaped polynomial matrices.
//!
//! A [`PolyMatrix`] is an `r x r` matrix of polynomials in `x` whose entries
//! obey the bounds
//!
//! ```text
//! (1,1): deg <= d     (1,j): deg <= d+1
//! (i,1): deg <= d-1   (i,j): deg <= d        (i, j >= 2)
//! ```
//!
//! Internally it is stored as the list of coefficient matrices of
//! `x^0 .. x^{d+1}`; positions outside the shape are always exactly zero.

use std::fmt;
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{LaxError, Result};
use crate::linalg::{self, CMat, CVec};
use crate::poly::{Poly, C64};

/// A point of the projective line.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Node {
    Finite(C64),
    Infinity,
}

impl Node {
    pub fn finite(re: f64, im: f64) -> Self {
        Node::Finite(C64::new(re, im))
    }

    pub fn is_infinity(&self) -> bool {
        matches!(self, Node::Infinity)
    }
}

impl fmt::Display for Node {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Node::Infinity => write!(f, "inf"),
            Node::Finite(z) => write!(f, "{z}"),
        }
    }
}

impl FromStr for Node {
    type Err = LaxError;

    /// Accepts `inf`, `infinity`, `∞`, a complex literal such as `1-2i`, or
    /// a pair `re,im`.
    fn from_str(s: &str) -> Result<Self> {
        let t = s.trim();
        match t.to_ascii_lowercase().as_str() {
            "inf" | "infinity" | "∞" => return Ok(Node::Infinity),
            _ => {}
        }
        let bad = || LaxError::Parse(format!("cannot parse node '{s}'"));
        if let Some((re, im)) = t.split_once(',') {
            let re: f64 = re.trim().parse().map_err(|_| bad())?;
            let im: f64 = im.trim().parse().map_err(|_| bad())?;
            return Ok(Node::finite(re, im));
        }
        C64::from_str(t).map(Node::Finite).map_err(|_| bad())
    }
}

impl Serialize for Node {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            Node::Infinity => s.serialize_str("inf"),
            Node::Finite(z) => [z.re, z.im].serialize(s),
        }
    }
}

impl<'de> Deserialize<'de> for Node {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Repr {
            Text(String),
            Pair([f64; 2]),
        }
        match Repr::deserialize(d)? {
            Repr::Pair([re, im]) => Ok(Node::finite(re, im)),
            Repr::Text(t) => t.parse().map_err(serde::de::Error::custom),
        }
    }
}

/// Maximal degree allowed in entry `(i, j)` (0-based) of `M(r, d)`.
pub fn shape_bound(d: usize, i: usize, j: usize) -> usize {
    match (i, j) {
        (0, 0) => d,
        (0, _) => d + 1,
        (_, 0) => d - 1,
        _ => d,
    }
}

/// Dimension of `M(r, d)` as a complex vector space.
pub fn space_dimension(r: usize, d: usize) -> usize {
    let m = r - 1;
    (d + 1) + m * (d + 2) + m * d + m * m * (d + 1)
}

/// The nilpotent shift `tau` of size `m` (ones on the subdiagonal).
pub fn tau(m: usize) -> CMat {
    let mut t = CMat::zeros(m, m);
    for i in 1..m {
        t[(i, i - 1)] = C64::new(1.0, 0.0);
    }
    t
}

/// The first standard basis vector of length `m`.
pub fn nu(m: usize) -> CVec {
    let mut v = CVec::zeros(m);
    v[0] = C64::new(1.0, 0.0);
    v
}

/// A matrix polynomial `sum_k M_k x^k` with rectangular coefficients.
#[derive(Clone, Debug, PartialEq)]
pub struct MatPoly {
    rows: usize,
    cols: usize,
    coeffs: Vec<CMat>,
}

impl MatPoly {
    pub fn zero(rows: usize, cols: usize) -> Self {
        MatPoly { rows, cols, coeffs: Vec::new() }
    }

    pub fn new(rows: usize, cols: usize, coeffs: Vec<CMat>) -> Self {
        debug_assert!(coeffs.iter().all(|c| c.shape() == (rows, cols)));
        MatPoly { rows, cols, coeffs }
    }

    pub fn constant(m: CMat) -> Self {
        MatPoly { rows: m.nrows(), cols: m.ncols(), coeffs: vec![m] }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn len(&self) -> usize {
        self.coeffs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn coeffs(&self) -> &[CMat] {
        &self.coeffs
    }

    pub fn coeff(&self, k: usize) -> CMat {
        self.coeffs
            .get(k)
            .cloned()
            .unwrap_or_else(|| CMat::zeros(self.rows, self.cols))
    }

    pub fn eval(&self, x: C64) -> CMat {
        let mut acc = CMat::zeros(self.rows, self.cols);
        for c in self.coeffs.iter().rev() {
            acc = acc * x + c;
        }
        acc
    }

    pub fn entry(&self, i: usize, j: usize) -> Poly {
        Poly::new(self.coeffs.iter().map(|c| c[(i, j)]).collect())
    }

    pub fn add(&self, other: &MatPoly) -> MatPoly {
        let n = self.len().max(other.len());
        MatPoly::new(self.rows, self.cols, (0..n).map(|k| self.coeff(k) + other.coeff(k)).collect())
    }

    pub fn sub(&self, other: &MatPoly) -> MatPoly {
        let n = self.len().max(other.len());
        MatPoly::new(self.rows, self.cols, (0..n).map(|k| self.coeff(k) - other.coeff(k)).collect())
    }

    pub fn scale(&self, s: C64) -> MatPoly {
        MatPoly::new(self.rows, self.cols, self.coeffs.iter().map(|c| c * s).collect())
    }

    pub fn mul(&self, other: &MatPoly) -> MatPoly {
        if self.is_empty() || other.is_empty() {
            return MatPoly::zero(self.rows, other.cols);
        }
        let mut out = vec![CMat::zeros(self.rows, other.cols); self.len() + other.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            for (j, b) in other.coeffs.iter().enumerate() {
                out[i + j] += a * b;
            }
        }
        MatPoly::new(self.rows, other.cols, out)
    }

    pub fn left_mul_const(&self, m: &CMat) -> MatPoly {
        MatPoly::new(m.nrows(), self.cols, self.coeffs.iter().map(|c| m * c).collect())
    }

    pub fn right_mul_const(&self, m: &CMat) -> MatPoly {
        MatPoly::new(self.rows, m.ncols(), self.coeffs.iter().map(|c| c * m).collect())
    }

    /// Multiply by `x`.
    pub fn shift_up(&self) -> MatPoly {
        let mut coeffs = vec![CMat::zeros(self.rows, self.cols)];
        coeffs.extend(self.coeffs.iter().cloned());
        MatPoly::new(self.rows, self.cols, coeffs)
    }

    pub fn derivative(&self) -> MatPoly {
        MatPoly::new(
            self.rows,
            self.cols,
            self.coeffs.iter().enumerate().skip(1).map(|(k, c)| c * C64::new(k as f64, 0.0)).collect(),
        )
    }

    /// Divide every entry by `(x - a)`; returns quotient and remainder
    /// (the value at `a`).
    pub fn div_linear(&self, a: C64) -> (MatPoly, CMat) {
        let n = self.len();
        if n == 0 {
            return (self.clone(), CMat::zeros(self.rows, self.cols));
        }
        let mut q = vec![CMat::zeros(self.rows, self.cols); n - 1];
        let mut carry = CMat::zeros(self.rows, self.cols);
        for k in (0..n).rev() {
            let val = &self.coeffs[k] + &carry * a;
            if k == 0 {
                return (MatPoly::new(self.rows, self.cols, q), val);
            }
            q[k - 1] = val.clone();
            carry = val;
        }
        unreachable!()
    }

    pub fn block(&self, r0: usize, c0: usize, nr: usize, nc: usize) -> MatPoly {
        MatPoly::new(
            nr,
            nc,
            self.coeffs.iter().map(|c| c.view((r0, c0), (nr, nc)).into_owned()).collect(),
        )
    }

    pub fn max_abs(&self) -> f64 {
        self.coeffs.iter().map(linalg::max_abs).fold(0.0, f64::max)
    }

    /// Assemble a square matrix polynomial from its four blocks.
    pub fn from_blocks(tl: &MatPoly, tr: &MatPoly, bl: &MatPoly, br: &MatPoly) -> MatPoly {
        let rows = tl.rows + bl.rows;
        let cols = tl.cols + tr.cols;
        let n = tl.len().max(tr.len()).max(bl.len()).max(br.len());
        let coeffs = (0..n)
            .map(|k| {
                let mut m = CMat::zeros(rows, cols);
                m.view_mut((0, 0), (tl.rows, tl.cols)).copy_from(&tl.coeff(k));
                m.view_mut((0, tl.cols), (tr.rows, tr.cols)).copy_from(&tr.coeff(k));
                m.view_mut((tl.rows, 0), (bl.rows, bl.cols)).copy_from(&bl.coeff(k));
                m.view_mut((tl.rows, tl.cols), (br.rows, br.cols)).copy_from(&br.coeff(k));
                m
            })
            .collect();
        MatPoly::new(rows, cols, coeffs)
    }
}

/// Sampling ensembles for [`PolyMatrix::random`].
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum SampleSlice {
    Full,
    SInfinity,
    Sc(C64),
}

impl SampleSlice {
    pub fn at(node: Node) -> Self {
        match node {
            Node::Infinity => SampleSlice::SInfinity,
            Node::Finite(c) => SampleSlice::Sc(c),
        }
    }
}

/// An element of `M(r, d)`.
#[derive(Clone, Debug, PartialEq)]
pub struct PolyMatrix {
    r: usize,
    d: usize,
    coeffs: Vec<CMat>,
}

fn check_rd(r: usize, d: usize) -> Result<()> {
    if r < 2 || d < 1 {
        return Err(LaxError::InvalidArgument(format!("need r >= 2 and d >= 1, got r={r}, d={d}")));
    }
    Ok(())
}

impl PolyMatrix {
    pub fn zero(r: usize, d: usize) -> Result<Self> {
        check_rd(r, d)?;
        Ok(PolyMatrix { r, d, coeffs: vec![CMat::zeros(r, r); d + 2] })
    }

    /// Build from an `r x r` grid of entries, rejecting any nonzero
    /// coefficient above the shape bound.
    pub fn new(r: usize, d: usize, entries: Vec<Vec<Poly>>) -> Result<Self> {
        check_rd(r, d)?;
        if entries.len() != r || entries.iter().any(|row| row.len() != r) {
            return Err(LaxError::Parse(format!("expected {r}x{r} entries")));
        }
        let mut out = PolyMatrix::zero(r, d)?;
        for (i, row) in entries.iter().enumerate() {
            for (j, p) in row.iter().enumerate() {
                let bound = shape_bound(d, i, j);
                if let Some(deg) = p.degree() {
                    if deg > bound {
                        return Err(LaxError::ShapeViolation { row: i + 1, col: j + 1, degree: deg, bound: bound as i64 });
                    }
                }
                for k in 0..=bound {
                    out.coeffs[k][(i, j)] = p.coeff(k);
                }
            }
        }
        Ok(out)
    }

    /// Build from a matrix polynomial, dropping coefficients above the shape
    /// bound if their modulus is at most `tol` and failing otherwise.
    pub fn from_matpoly(r: usize, d: usize, mp: &MatPoly, tol: f64) -> Result<Self> {
        check_rd(r, d)?;
        if mp.rows() != r || mp.cols() != r {
            return Err(LaxError::InvalidArgument("matrix polynomial has the wrong size".into()));
        }
        let mut out = PolyMatrix::zero(r, d)?;
        for (k, c) in mp.coeffs().iter().enumerate() {
            for i in 0..r {
                for j in 0..r {
                    let bound = shape_bound(d, i, j);
                    if k <= bound {
                        out.coeffs[k][(i, j)] = c[(i, j)];
                    } else if c[(i, j)].norm() > tol {
                        return Err(LaxError::ShapeViolation { row: i + 1, col: j + 1, degree: k, bound: bound as i64 });
                    }
                }
            }
        }
        Ok(out)
    }

    pub fn r(&self) -> usize {
        self.r
    }

    pub fn d(&self) -> usize {
        self.d
    }

    pub fn dimension(&self) -> usize {
        space_dimension(self.r, self.d)
    }

    /// Coefficient matrix of `x^k`.
    pub fn coeff_mat(&self, k: usize) -> CMat {
        self.coeffs.get(k).cloned().unwrap_or_else(|| CMat::zeros(self.r, self.r))
    }

    pub fn entry(&self, i: usize, j: usize) -> Poly {
        let bound = shape_bound(self.d, i, j);
        Poly::new((0..=bound).map(|k| self.coeffs[k][(i, j)]).collect())
    }

    pub fn entries(&self) -> Vec<Vec<Poly>> {
        (0..self.r).map(|i| (0..self.r).map(|j| self.entry(i, j)).collect()).collect()
    }

    pub fn as_matpoly(&self) -> MatPoly {
        MatPoly::new(self.r, self.r, self.coeffs.clone())
    }

    pub fn eval(&self, x: C64) -> CMat {
        let mut acc = CMat::zeros(self.r, self.r);
        for c in self.coeffs.iter().rev() {
            acc = acc * x + c;
        }
        acc
    }

    pub fn eval_at(&self, node: Node) -> CMat {
        match node {
            Node::Finite(x) => self.eval(x),
            Node::Infinity => self.leading(),
        }
    }

    /// `A(inf)`: entry `(i,j)` is the coefficient of the shape-maximal degree.
    pub fn leading(&self) -> CMat {
        CMat::from_fn(self.r, self.r, |i, j| self.coeffs[shape_bound(self.d, i, j)][(i, j)])
    }

    /// Coordinates in the fixed order entry-major, then ascending degree.
    pub fn to_vector(&self) -> CVec {
        let mut v = Vec::with_capacity(self.dimension());
        for i in 0..self.r {
            for j in 0..self.r {
                for k in 0..=shape_bound(self.d, i, j) {
                    v.push(self.coeffs[k][(i, j)]);
                }
            }
        }
        CVec::from_vec(v)
    }

    pub fn from_vector(r: usize, d: usize, v: &CVec) -> Result<Self> {
        check_rd(r, d)?;
        if v.len() != space_dimension(r, d) {
            return Err(LaxError::InvalidArgument(format!(
                "coordinate vector has length {}, expected {}",
                v.len(),
                space_dimension(r, d)
            )));
        }
        let mut out = PolyMatrix::zero(r, d)?;
        let mut idx = 0;
        for i in 0..r {
            for j in 0..r {
                for k in 0..=shape_bound(d, i, j) {
                    out.coeffs[k][(i, j)] = v[idx];
                    idx += 1;
                }
            }
        }
        Ok(out)
    }

    fn zip_with(&self, other: &PolyMatrix, f: impl Fn(&CMat, &CMat) -> CMat) -> PolyMatrix {
        assert_eq!((self.r, self.d), (other.r, other.d), "mismatched (r, d)");
        PolyMatrix {
            r: self.r,
            d: self.d,
            coeffs: self.coeffs.iter().zip(other.coeffs.iter()).map(|(a, b)| f(a, b)).collect(),
        }
    }

    pub fn add(&self, other: &PolyMatrix) -> PolyMatrix {
        self.zip_with(other, |a, b| a + b)
    }

    pub fn sub(&self, other: &PolyMatrix) -> PolyMatrix {
        self.zip_with(other, |a, b| a - b)
    }

    pub fn scale(&self, s: C64) -> PolyMatrix {
        PolyMatrix { r: self.r, d: self.d, coeffs: self.coeffs.iter().map(|c| c * s).collect() }
    }

    /// `self + s * other`
    pub fn axpy(&self, s: C64, other: &PolyMatrix) -> PolyMatrix {
        self.zip_with(other, |a, b| a + b * s)
    }

    pub fn max_abs(&self) -> f64 {
        self.coeffs.iter().map(linalg::max_abs).fold(0.0, f64::max)
    }

    pub fn max_diff(&self, other: &PolyMatrix) -> f64 {
        self.sub(other).max_abs()
    }

    pub fn approx_eq(&self, other: &PolyMatrix, tol: f64) -> bool {
        self.r == other.r && self.d == other.d && self.max_diff(other) <= tol
    }

    /// Commutator `[M, A(x)]` with a (possibly `x`-dependent) matrix polynomial.
    pub fn commutator_left(&self, m: &MatPoly) -> MatPoly {
        let a = self.as_matpoly();
        m.mul(&a).sub(&a.mul(m))
    }

    pub fn blocks(&self) -> BlockView {
        let mp = self.as_matpoly();
        let m = self.r - 1;
        BlockView {
            r: self.r,
            d: self.d,
            v: mp.block(0, 0, 1, 1),
            wt: mp.block(0, 1, 1, m),
            u: mp.block(1, 0, m, 1),
            t: mp.block(1, 1, m, m),
        }
    }

    /// Largest violation of the slice constraints at `node`.
    ///
    /// * `S_inf`: `T_d = tau`, `u_{d-1} = nu`, first row of `T_{d-1}` zero.
    /// * `S_c`: `u(c) = nu`, `T(c) = tau`, first row of `T'(c)` zero.
    pub fn slice_violation(&self, node: Node) -> f64 {
        let b = self.blocks();
        let m = self.r - 1;
        let (u0, t0, t1) = match node {
            Node::Infinity => (b.u_k(self.d - 1), b.t_k(self.d), b.t_k(self.d - 1)),
            Node::Finite(c) => (b.u.eval(c), b.t.eval(c), b.t.derivative().eval(c)),
        };
        let du = linalg::max_abs(&(u0 - CMat::from_column_slice(m, 1, nu(m).as_slice())));
        let dt = linalg::max_abs(&(t0 - tau(m)));
        let row = (0..m).map(|j| t1[(0, j)].norm()).fold(0.0, f64::max);
        du.max(dt).max(row)
    }

    pub fn in_slice(&self, node: Node, tol: f64) -> bool {
        self.slice_violation(node) <= tol
    }

    /// Deterministic random sample: real and imaginary parts uniform on
    /// `[-1, 1]`, with the slice constraints imposed exactly.
    pub fn random(r: usize, d: usize, seed: u64, slice: SampleSlice) -> Result<Self> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        Self::random_with(r, d, &mut rng, slice)
    }

    pub fn random_with<R: Rng>(r: usize, d: usize, rng: &mut R, slice: SampleSlice) -> Result<Self> {
        check_rd(r, d)?;
        let mut out = PolyMatrix::zero(r, d)?;
        for i in 0..r {
            for j in 0..r {
                for k in 0..=shape_bound(d, i, j) {
                    out.coeffs[k][(i, j)] = random_c64(rng);
                }
            }
        }
        let m = r - 1;
        match slice {
            SampleSlice::Full => {}
            SampleSlice::SInfinity => {
                for i in 0..m {
                    for j in 0..m {
                        out.coeffs[d][(i + 1, j + 1)] = tau(m)[(i, j)];
                    }
                    out.coeffs[d - 1][(i + 1, 0)] = nu(m)[i];
                }
                for j in 0..m {
                    out.coeffs[d - 1][(1, j + 1)] = C64::default();
                }
            }
            SampleSlice::Sc(c) => {
                // Constraints live in the (x - c) expansion: write the Taylor
                // coefficients there, then shift back to powers of x.
                for i in 1..r {
                    for j in 0..r {
                        let bound = shape_bound(d, i, j);
                        let mut taylor = out.entry(i, j).resized(bound + 1).into_coeffs();
                        if j == 0 {
                            taylor[0] = nu(m)[i - 1];
                        } else {
                            taylor[0] = tau(m)[(i - 1, j - 1)];
                            if i == 1 && bound >= 1 {
                                taylor[1] = C64::default();
                            }
                        }
                        let p = Poly::new(taylor).taylor_shift(-c);
                        for k in 0..=bound {
                            out.coeffs[k][(i, j)] = p.coeff(k);
                        }
                    }
                }
            }
        }
        Ok(out)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(&PolyMatrixJson::from(self)).expect("serializable")
    }

    pub fn to_json_pretty(&self) -> String {
        serde_json::to_string_pretty(&PolyMatrixJson::from(self)).expect("serializable")
    }

    pub fn from_json(s: &str) -> Result<Self> {
        let raw: PolyMatrixJson = serde_json::from_str(s)?;
        raw.try_into()
    }
}

pub(crate) fn random_c64<R: Rng>(rng: &mut R) -> C64 {
    C64::new(rng.gen_range(-1.0..=1.0), rng.gen_range(-1.0..=1.0))
}

/// Block decomposition `A = [[v, w^t], [u, T]]` with coefficient accessors.
#[derive(Clone, Debug)]
pub struct BlockView {
    pub r: usize,
    pub d: usize,
    pub v: MatPoly,
    pub wt: MatPoly,
    pub u: MatPoly,
    pub t: MatPoly,
}

impl BlockView {
    pub fn v_k(&self, k: usize) -> C64 {
        self.v.coeff(k)[(0, 0)]
    }

    /// `w_k` as a column vector.
    pub fn w_k(&self, k: usize) -> CVec {
        let row = self.wt.coeff(k);
        CVec::from_iterator(self.r - 1, row.iter().copied())
    }

    pub fn u_k(&self, k: usize) -> CMat {
        self.u.coeff(k)
    }

    pub fn u_vec_k(&self, k: usize) -> CVec {
        CVec::from_iterator(self.r - 1, self.u.coeff(k).iter().copied())
    }

    pub fn t_k(&self, k: usize) -> CMat {
        self.t.coeff(k)
    }

    pub fn assemble(&self) -> Result<PolyMatrix> {
        let mp = MatPoly::from_blocks(&self.v, &self.wt, &self.u, &self.t);
        PolyMatrix::from_matpoly(self.r, self.d, &mp, 0.0)
    }
}

#[derive(Serialize, Deserialize)]
struct PolyMatrixJson {
    r: usize,
    d: usize,
    entries: Vec<Vec<Vec<[f64; 2]>>>,
}

impl From<&PolyMatrix> for PolyMatrixJson {
    fn from(a: &PolyMatrix) -> Self {
        PolyMatrixJson {
            r: a.r,
            d: a.d,
            entries: a
                .entries()
                .iter()
                .map(|row| row.iter().map(poly_to_pairs).collect())
                .collect(),
        }
    }
}

impl TryFrom<PolyMatrixJson> for PolyMatrix {
    type Error = LaxError;

    fn try_from(raw: PolyMatrixJson) -> Result<Self> {
        if raw.entries.len() != raw.r || raw.entries.iter().any(|row| row.len() != raw.r) {
            return Err(LaxError::Parse(format!("expected {0}x{0} entries", raw.r)));
        }
        let entries = raw
            .entries
            .iter()
            .map(|row| row.iter().map(|c| pairs_to_poly(c)).collect())
            .collect();
        PolyMatrix::new(raw.r, raw.d, entries)
    }
}

impl Serialize for PolyMatrix {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        PolyMatrixJson::from(self).serialize(s)
    }
}

impl<'de> Deserialize<'de> for PolyMatrix {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let raw = PolyMatrixJson::deserialize(d)?;
        PolyMatrix::try_from(raw).map_err(serde::de::Error::custom)
    }
}

pub(crate) fn poly_to_pairs(p: &Poly) -> Vec<[f64; 2]> {
    p.coeffs().iter().map(|c| [c.re, c.im]).collect()
}

pub(crate) fn pairs_to_poly(c: &[[f64; 2]]) -> Poly {
    Poly::new(c.iter().map(|&[re, im]| C64::new(re, im)).collect())
}
