//! Spectral curves `P(x, y) = det(y I - A(x))`, their charts and
//! numerical smoothness certificates.

use serde::{Deserialize, Serialize};

use crate::error::{LaxError, Result};
use crate::linalg::{self, CMat};
use crate::poly::{min_relative_separation, Poly, C64};
use crate::polymat::{pairs_to_poly, poly_to_pairs, Node, PolyMatrix};

/// Relative pairwise separation below which two roots count as equal.
pub const ROOT_SEPARATION: f64 = 1e-7;

/// Relative size under which leading discriminant coefficients are dropped.
const DISCRIMINANT_TRIM: f64 = 1e-10;

/// `P(x, y) = y^r + s_1(x) y^{r-1} + ... + s_r(x)` with `deg s_i <= d i`.
#[derive(Clone, Debug, PartialEq)]
pub struct SpectralCurve {
    r: usize,
    d: usize,
    s: Vec<Poly>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Chart {
    Affine,
    Infinity,
}

impl SpectralCurve {
    pub fn new(r: usize, d: usize, s: Vec<Poly>) -> Result<Self> {
        if s.len() != r {
            return Err(LaxError::InvalidArgument(format!("expected {r} coefficients s_i, got {}", s.len())));
        }
        let mut out = Vec::with_capacity(r);
        for (i, p) in s.into_iter().enumerate() {
            let bound = d * (i + 1);
            if let Some(deg) = p.degree() {
                if deg > bound {
                    return Err(LaxError::ShapeViolation { row: i + 1, col: 0, degree: deg, bound: bound as i64 });
                }
            }
            out.push(p.resized(bound + 1));
        }
        Ok(SpectralCurve { r, d, s: out })
    }

    pub fn r(&self) -> usize {
        self.r
    }

    pub fn d(&self) -> usize {
        self.d
    }

    /// `s_i` for `i = 1..=r`.
    pub fn s(&self, i: usize) -> &Poly {
        &self.s[i - 1]
    }

    pub fn coefficients(&self) -> &[Poly] {
        &self.s
    }

    pub fn genus(&self) -> usize {
        genus(self.r, self.d)
    }

    pub fn eval(&self, x: C64, y: C64) -> C64 {
        self.s
            .iter()
            .fold(C64::new(1.0, 0.0), |acc, s| acc * y + s.eval(x))
    }

    /// The curve in the chart `x = 1/z, y = w / z^d`:
    /// `z^{dr} P(1/z, w/z^d) = w^r + sum_i z^{di} s_i(1/z) w^{r-i}`.
    /// It has the same degree shape as the affine chart.
    pub fn infinity_chart(&self) -> SpectralCurve {
        let s = self
            .s
            .iter()
            .enumerate()
            .map(|(i, p)| p.reversed(self.d * (i + 1)))
            .collect();
        SpectralCurve { r: self.r, d: self.d, s }
    }

    /// Fiber polynomial in `y` (or `w` at infinity), low degree first.
    pub fn fiber_poly(&self, node: Node) -> Poly {
        let (curve, x) = match node {
            Node::Finite(x) => (self.clone(), x),
            Node::Infinity => (self.infinity_chart(), C64::default()),
        };
        let mut coeffs: Vec<C64> = curve.s.iter().rev().map(|p| p.eval(x)).collect();
        coeffs.push(C64::new(1.0, 0.0));
        Poly::new(coeffs)
    }

    /// Minimum relative separation of the fiber roots over `node`.
    pub fn fiber_separation(&self, node: Node) -> f64 {
        min_relative_separation(&self.fiber_poly(node).roots(0.0))
    }

    /// `Res_y(P, dP/dy)` as a polynomial in `x`, computed by sampling the
    /// Sylvester determinant on the unit circle and interpolating.
    pub fn discriminant(&self) -> Poly {
        let n = self.d * self.r * (self.r - 1) + 1;
        let values: Vec<C64> = Poly::circle_nodes(n, 1.0)
            .into_iter()
            .map(|x| {
                let f = self.fiber_poly(Node::Finite(x));
                sylvester_resultant(&f, &f.derivative())
            })
            .collect();
        Poly::from_circle_samples(&values, 1.0)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(&CurveJson::from(self)).expect("serializable")
    }

    pub fn from_json(s: &str) -> Result<Self> {
        let raw: CurveJson = serde_json::from_str(s)?;
        SpectralCurve::new(raw.r, raw.d, raw.s.iter().map(|c| pairs_to_poly(c)).collect())
    }
}

#[derive(Serialize, Deserialize)]
struct CurveJson {
    r: usize,
    d: usize,
    s: Vec<Vec<[f64; 2]>>,
}

impl From<&SpectralCurve> for CurveJson {
    fn from(c: &SpectralCurve) -> Self {
        CurveJson { r: c.r, d: c.d, s: c.s.iter().map(poly_to_pairs).collect() }
    }
}

impl Serialize for SpectralCurve {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        CurveJson::from(self).serialize(s)
    }
}

/// Resultant of two polynomials (low degree first) as the determinant of
/// their Sylvester matrix.
pub fn sylvester_resultant(f: &Poly, g: &Poly) -> C64 {
    let f = f.trimmed();
    let g = g.trimmed();
    let (m, n) = match (f.degree(), g.degree()) {
        (Some(m), Some(n)) => (m, n),
        _ => return C64::default(),
    };
    let size = m + n;
    if size == 0 {
        return C64::new(1.0, 0.0);
    }
    let mut syl = CMat::zeros(size, size);
    for row in 0..n {
        for k in 0..=m {
            syl[(row, row + k)] = f.coeff(m - k);
        }
    }
    for row in 0..m {
        for k in 0..=n {
            syl[(n + row, row + k)] = g.coeff(n - k);
        }
    }
    linalg::det(&syl)
}

/// Convert power sums `t_1..t_n` into the coefficients `s_1..s_n` of
/// `prod (y - lambda_i)` by Newton's identities.
pub fn newton_to_char_coeffs(t: &[Poly]) -> Vec<Poly> {
    let mut s: Vec<Poly> = Vec::with_capacity(t.len());
    for k in 1..=t.len() {
        let mut acc = t[k - 1].clone();
        for i in 1..k {
            acc = &acc + &(&s[k - i - 1] * &t[i - 1]);
        }
        s.push(acc.scale(C64::new(-1.0 / k as f64, 0.0)));
    }
    s
}

/// Coefficients `beta_1..beta_n` of `det(y I - m) = y^n + beta_1 y^{n-1} + ...`.
pub fn char_coeffs(m: &CMat) -> Vec<C64> {
    let n = m.nrows();
    let mut pw = linalg::identity(n);
    let mut t = Vec::with_capacity(n);
    for _ in 0..n {
        pw = &pw * m;
        t.push(Poly::constant(pw.trace()));
    }
    newton_to_char_coeffs(&t).iter().map(|p| p.coeff(0)).collect()
}

/// The spectral map: traces `t_k(x) = tr A(x)^k` followed by Newton's identities.
pub fn char_poly(a: &PolyMatrix) -> SpectralCurve {
    let (r, d) = (a.r(), a.d());
    let mp = a.as_matpoly();
    let mut pw = mp.clone();
    let mut t = Vec::with_capacity(r);
    for k in 1..=r {
        if k > 1 {
            pw = pw.mul(&mp);
        }
        let tr = (0..r).fold(Poly::zero(), |acc, i| &acc + &pw.entry(i, i));
        t.push(tr);
    }
    let s = newton_to_char_coeffs(&t)
        .into_iter()
        .enumerate()
        .map(|(i, p)| p.resized(d * (i + 1) + 1))
        .collect();
    SpectralCurve { r, d, s }
}

/// Genus `(r-1)(rd-2)/2` of a smooth spectral curve.
pub fn genus(r: usize, d: usize) -> usize {
    (r - 1) * (r * d - 2) / 2
}

pub fn curve_eval(p: &SpectralCurve, x: C64, y: C64, chart: Chart) -> C64 {
    match chart {
        Chart::Affine => p.eval(x, y),
        Chart::Infinity => p.infinity_chart().eval(x, y),
    }
}

pub fn is_unramified_over(p: &SpectralCurve, node: Node) -> bool {
    is_unramified_over_with(p, node, ROOT_SEPARATION)
}

pub fn is_unramified_over_with(p: &SpectralCurve, node: Node, threshold: f64) -> bool {
    p.fiber_separation(node) > threshold
}

#[derive(Clone, Debug, Serialize)]
pub struct CurveReport {
    pub genus: usize,
    pub unramified_nodes_checked: Vec<(Node, bool)>,
    pub smooth_heuristic: bool,
    pub discriminant_min_separation: f64,
}

/// Sufficient smoothness certificate: the discriminant has only simple roots
/// in both charts. A `false` result means "not certified"; irreducibility of
/// non-certified curves is left undecided.
pub fn smoothness_check(p: &SpectralCurve) -> CurveReport {
    smoothness_check_with(p, ROOT_SEPARATION)
}

pub fn smoothness_check_with(p: &SpectralCurve, threshold: f64) -> CurveReport {
    let g = p.genus();
    let mut nodes: Vec<Node> = (0..=g).map(|k| Node::finite(k as f64, 0.0)).collect();
    nodes.push(Node::Infinity);
    let unramified_nodes_checked = nodes
        .into_iter()
        .map(|n| (n, is_unramified_over_with(p, n, threshold)))
        .collect();

    let sep = |disc: Poly| -> f64 {
        if disc.max_abs() < 1e-300 {
            return 0.0;
        }
        min_relative_separation(&disc.roots(DISCRIMINANT_TRIM))
    };
    let affine = p.discriminant();
    let at_infinity = p.infinity_chart().discriminant();
    let degenerate = affine.max_abs() == 0.0 || at_infinity.max_abs() == 0.0 || is_negligible(&affine);
    let min_sep = if degenerate { 0.0 } else { sep(affine).min(sep(at_infinity)) };
    CurveReport {
        genus: g,
        unramified_nodes_checked,
        smooth_heuristic: !degenerate && min_sep > threshold,
        discriminant_min_separation: min_sep,
    }
}

// An identically vanishing discriminant only shows up as round-off noise.
fn is_negligible(p: &Poly) -> bool {
    p.max_abs() < 1e-13
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures::{f1, f3, f4};
    use crate::polymat::SampleSlice;

    fn re(x: f64) -> C64 {
        C64::new(x, 0.0)
    }

    // det(yI - A) for 2x2 by the explicit formula y^2 - tr(A) y + det(A)
    fn two_by_two_oracle(a: &PolyMatrix) -> (Poly, Poly) {
        let e = a.entries();
        let tr = &e[0][0] + &e[1][1];
        let det = &(&e[0][0] * &e[1][1]) - &(&e[0][1] * &e[1][0]);
        (-&tr, det)
    }

    #[test]
    fn f1_curve_matches_symbolic_determinant() {
        let p = char_poly(&f1());
        let (s1, s2) = two_by_two_oracle(&f1());
        assert!(p.s(1).approx_eq(&s1, 1e-14));
        assert!(p.s(2).approx_eq(&s2, 1e-14));
        assert!(p.s(1).approx_eq(&Poly::zero(), 1e-14));
        assert!(p.s(2).approx_eq(&Poly::from_real(&[0.0, 0.0, -2.0]), 1e-14));
    }

    #[test]
    fn diagonal_and_zero_curves() {
        let a = PolyMatrix::new(
            2,
            1,
            vec![vec![Poly::from_real(&[1.0]), Poly::zero()], vec![Poly::zero(), Poly::from_real(&[2.0])]],
        )
        .unwrap();
        let p = char_poly(&a);
        assert!(p.s(1).approx_eq(&Poly::from_real(&[-3.0]), 1e-14));
        assert!(p.s(2).approx_eq(&Poly::from_real(&[2.0]), 1e-14));
        let z = char_poly(&PolyMatrix::zero(3, 2).unwrap());
        assert!(z.coefficients().iter().all(|s| s.is_zero()));
    }

    #[test]
    fn genus_values() {
        assert_eq!(genus(2, 3), 2);
        for d in 1..8 {
            assert_eq!(genus(2, d), d - 1);
        }
        assert_eq!(genus(3, 2), 4);
        for d in 1..6 {
            assert_eq!(genus(3, d), 3 * d - 2);
        }
    }

    #[test]
    fn f3_curve_evaluation_and_fibers() {
        let p = char_poly(&f3());
        assert!(p.s(1).approx_eq(&Poly::from_real(&[-2.0]), 1e-14));
        assert!(p.s(2).approx_eq(&Poly::from_real(&[0.0, -1.0, 0.0, 0.0, -1.0]), 1e-14));
        assert_eq!(curve_eval(&p, re(0.0), re(2.0), Chart::Affine), re(0.0));
        assert!(is_unramified_over(&p, Node::finite(1.0, 0.0)));
        assert!(is_unramified_over(&p, Node::Infinity));
        // fiber over 1: y^2 - 2y - 2, roots 1 +- sqrt(3)
        let mut roots = p.fiber_poly(Node::finite(1.0, 0.0)).roots(0.0);
        linalg::sort_complex(&mut roots);
        assert!((roots[0] - re(1.0 - 3f64.sqrt())).norm() < 1e-14);
        assert!((roots[1] - re(1.0 + 3f64.sqrt())).norm() < 1e-14);
        // fiber at infinity: w^2 - 1
        let inf = p.fiber_poly(Node::Infinity);
        assert!(inf.approx_eq(&Poly::from_real(&[-1.0, 0.0, 1.0]), 1e-14));
    }

    #[test]
    fn infinity_chart_agrees_with_substitution() {
        let p = char_poly(&f4());
        let (z, w) = (C64::new(0.7, -0.2), C64::new(-0.3, 1.1));
        let direct = z.powi((p.d() * p.r()) as i32) * p.eval(z.inv(), w / z.powi(p.d() as i32));
        assert!((curve_eval(&p, z, w, Chart::Infinity) - direct).norm() < 1e-12 * direct.norm().max(1.0));
    }

    #[test]
    fn monic_in_y() {
        let p = char_poly(&f4());
        let x = C64::new(0.3, 0.4);
        let y = re(1e6);
        assert!((p.eval(x, y) / y.powi(3) - re(1.0)).norm() < 1e-4);
    }

    #[test]
    fn zero_curve_is_ramified_and_singular() {
        let p = char_poly(&PolyMatrix::zero(2, 1).unwrap());
        assert_eq!(curve_eval(&p, re(1.0), re(0.0), Chart::Affine), re(0.0));
        assert!(!is_unramified_over(&p, Node::finite(0.5, 0.0)));
        assert!(!is_unramified_over(&p, Node::Infinity));
        assert!(!smoothness_check(&p).smooth_heuristic);
    }

    #[test]
    fn f3_discriminant_and_smoothness() {
        let p = char_poly(&f3());
        // Res_y(y^2 + b y + c, 2y + b) = -(b^2 - 4c) = -(4 + 4x + 4x^4)
        let disc = p.discriminant();
        assert!(disc.approx_eq(&Poly::from_real(&[-4.0, -4.0, 0.0, 0.0, -4.0]), 1e-12));
        let report = smoothness_check(&p);
        assert!(report.smooth_heuristic);
        assert_eq!(report.genus, 1);
        assert!(report.unramified_nodes_checked.iter().all(|(_, ok)| *ok));
    }

    #[test]
    fn singular_curve_is_not_certified() {
        // (y - x)(y + x) has a node at the origin.
        let p = SpectralCurve::new(2, 1, vec![Poly::zero(), Poly::from_real(&[0.0, 0.0, -1.0])]).unwrap();
        assert!(!smoothness_check(&p).smooth_heuristic);
    }

    #[test]
    fn char_poly_vanishes_on_eigenvalues() {
        for seed in 0..5 {
            let a = PolyMatrix::random(3, 2, seed, SampleSlice::Full).unwrap();
            let p = char_poly(&a);
            let x0 = C64::new(0.37, -0.81);
            for lambda in linalg::eigenvalues(&a.eval(x0)) {
                assert!(p.eval(x0, lambda).norm() < 1e-9);
            }
        }
    }

    #[test]
    fn curve_json_round_trip() {
        let p = char_poly(&f4());
        assert_eq!(SpectralCurve::from_json(&p.to_json()).unwrap(), p);
    }

    mod props {
        use super::*;
        use proptest::prelude::*;

        proptest! {
            #![proptest_config(ProptestConfig::with_cases(64))]
            #[test]
            fn curve_agrees_with_determinant(seed in 0u64..100_000, r in 2usize..5, d in 1usize..4, xr in -1.5..1.5f64, xi in -1.5..1.5f64, yr in -2.0..2.0f64, yi in -2.0..2.0f64) {
                let a = PolyMatrix::random(r, d, seed, SampleSlice::Full).unwrap();
                let p = char_poly(&a);
                let (x, y) = (C64::new(xr, xi), C64::new(yr, yi));
                let direct = linalg::det(&(CMat::identity(r, r) * y - a.eval(x)));
                prop_assert!((p.eval(x, y) - direct).norm() < 1e-9 * direct.norm().max(1.0));
            }
        }
    }
}
