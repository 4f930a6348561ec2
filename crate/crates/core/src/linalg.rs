//! Dense complex linear algebra helpers on top of nalgebra.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

pub type CMat = DMatrix<Complex64>;
pub type CVec = DVector<Complex64>;

/// Default relative threshold for numerical rank.
pub const RANK_REL_TOL: f64 = 1e-8;

pub fn identity(n: usize) -> CMat {
    CMat::identity(n, n)
}

/// Determinant via LU with partial pivoting. The empty matrix has determinant 1.
pub fn det(m: &CMat) -> Complex64 {
    if m.nrows() == 0 {
        return Complex64::new(1.0, 0.0);
    }
    m.clone().lu().determinant()
}

pub fn solve(m: &CMat, b: &CVec) -> Option<CVec> {
    m.clone().lu().solve(b)
}

pub fn inverse(m: &CMat) -> Option<CMat> {
    m.clone().try_inverse()
}

pub fn pow(m: &CMat, p: usize) -> CMat {
    let mut out = identity(m.nrows());
    for _ in 0..p {
        out = &out * m;
    }
    out
}

pub fn commutator(a: &CMat, b: &CMat) -> CMat {
    a * b - b * a
}

pub fn singular_values(m: &CMat) -> Vec<f64> {
    if m.nrows() == 0 || m.ncols() == 0 {
        return Vec::new();
    }
    let mut s: Vec<f64> = m.clone().svd(false, false).singular_values.iter().copied().collect();
    s.sort_by(|a, b| b.partial_cmp(a).unwrap());
    s
}

/// Number of singular values above `rel_tol * sigma_max`.
pub fn numerical_rank(m: &CMat, rel_tol: f64) -> usize {
    let s = singular_values(m);
    match s.first() {
        None => 0,
        Some(&0.0) => 0,
        Some(&top) => s.iter().filter(|&&v| v > rel_tol * top).count(),
    }
}

/// Number of singular values above `threshold`.
pub fn rank_above(m: &CMat, threshold: f64) -> usize {
    singular_values(m).iter().filter(|&&v| v > threshold).count()
}

/// Unit vector spanning the numerical kernel direction of `m` (right
/// singular vector of the smallest singular value).
pub fn null_vector(m: &CMat) -> CVec {
    let n = m.ncols();
    let svd = m.clone().svd(false, true);
    let v_t = svd.v_t.expect("requested v_t");
    let (idx, _) = svd
        .singular_values
        .iter()
        .enumerate()
        .fold((0, f64::INFINITY), |best, (i, &s)| if s < best.1 { (i, s) } else { best });
    let mut v = CVec::zeros(n);
    for j in 0..n {
        v[j] = v_t[(idx, j)].conj();
    }
    v
}

/// Sort by real part, then imaginary part.
pub fn sort_complex(v: &mut [Complex64]) {
    v.sort_by(|a, b| {
        a.re.partial_cmp(&b.re)
            .unwrap()
            .then(a.im.partial_cmp(&b.im).unwrap())
    });
}

/// Eigenvalues of a square complex matrix via the complex Schur form,
/// sorted by real part then imaginary part.
pub fn eigenvalues(m: &CMat) -> Vec<Complex64> {
    let n = m.nrows();
    if n == 0 {
        return Vec::new();
    }
    if n == 1 {
        return vec![m[(0, 0)]];
    }
    let schur = nalgebra::linalg::Schur::new(m.clone());
    let (_, t) = schur.unpack();
    let mut ev: Vec<Complex64> = (0..n).map(|i| t[(i, i)]).collect();
    sort_complex(&mut ev);
    ev
}

/// Least-squares residual of `target` against the column span of `basis`:
/// `min_c || basis * c - target ||_2`.
pub fn least_squares_residual(basis: &CMat, target: &CVec) -> f64 {
    if basis.ncols() == 0 {
        return target.norm();
    }
    let svd = basis.clone().svd(true, true);
    let top = svd.singular_values.max();
    let eps = RANK_REL_TOL * top.max(f64::MIN_POSITIVE);
    let coeffs = svd.solve(target, eps).expect("svd computed u and v_t");
    (basis * coeffs - target).norm()
}

/// Columns of `m` projected onto the orthogonal complement of the span of
/// `basis` (numerical rank taken at `RANK_REL_TOL`).
pub fn project_out(basis: &CMat, m: &CMat) -> CMat {
    if basis.ncols() == 0 {
        return m.clone();
    }
    let svd = basis.clone().svd(true, false);
    let u = svd.u.expect("requested u");
    let top = svd.singular_values.max();
    let keep: Vec<usize> = (0..svd.singular_values.len())
        .filter(|&i| svd.singular_values[i] > RANK_REL_TOL * top)
        .collect();
    let mut out = m.clone();
    for &i in &keep {
        let q = u.column(i).into_owned();
        for c in 0..out.ncols() {
            let col = out.column(c).into_owned();
            let coef = q.dotc(&col);
            let new_col = col - &q * coef;
            out.set_column(c, &new_col);
        }
    }
    out
}

pub fn max_abs(m: &CMat) -> f64 {
    m.iter().map(|c| c.norm()).fold(0.0, f64::max)
}
