//! Property suites behind `laxflow verify`.
//!
//! Every check draws from its own seeded stream, so a check gives the same
//! numbers whether it runs alone, in its suite, or in `all`.

use std::fmt;
use std::str::FromStr;
use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::config::Tolerances;
use crate::error::{LaxError, Result};
use crate::fixtures::{f3, f4};
use crate::flows::{self, integrate, lie_bracket_residual, FieldSpec};
use crate::gauge::{self, GaugeElement};
use crate::linalg::{self, CVec};
use crate::poisson::{self, MultiPoint, Nodes, ScalarField};
use crate::poly::C64;
use crate::polymat::{random_c64, Node, PolyMatrix, SampleSlice};
use crate::sov;
use crate::spectral::{self, char_poly, genus};

/// The `(r, d)` sizes exercised by the suites.
pub const SIZES: [(usize, usize); 3] = [(2, 2), (2, 3), (3, 2)];

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Suite {
    All,
    Flows,
    Poisson,
    Sov,
    Gauge,
}

impl FromStr for Suite {
    type Err = LaxError;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "all" => Ok(Suite::All),
            "flows" => Ok(Suite::Flows),
            "poisson" => Ok(Suite::Poisson),
            "sov" => Ok(Suite::Sov),
            "gauge" => Ok(Suite::Gauge),
            _ => Err(LaxError::Parse(format!("unknown suite {s:?}"))),
        }
    }
}

impl fmt::Display for Suite {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Suite::All => "all",
            Suite::Flows => "flows",
            Suite::Poisson => "poisson",
            Suite::Sov => "sov",
            Suite::Gauge => "gauge",
        };
        f.write_str(s)
    }
}

/// `(criterion, name, suite)` for every check.
pub const CHECKS: [(u8, &str, Suite); 14] = [
    (1, "01-genus-formula", Suite::Sov),
    (2, "02-spectral-conservation", Suite::Flows),
    (3, "03-field-commutativity", Suite::Flows),
    (4, "04-quotient-vanishing-and-dimension", Suite::Flows),
    (5, "05-gauge-covariance-of-d", Suite::Gauge),
    (6, "06-normal-form", Suite::Gauge),
    (7, "07-lie-poisson", Suite::Poisson),
    (8, "08-hamiltonian-generation", Suite::Poisson),
    (9, "09-involution", Suite::Poisson),
    (10, "10-separation-of-variables", Suite::Sov),
    (11, "11-closed-form-cross-checks", Suite::Sov),
    (12, "12-even-mumford-slice", Suite::Sov),
    (13, "13-chart-covering", Suite::Gauge),
    (14, "14-theta-test", Suite::Gauge),
];

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Pass,
    Fail,
    Skip,
}

/// One measured quantity against its bound. Bounds of kind `below` pass when
/// `value < tolerance`; exact counts pass when `value == 0`.
#[derive(Clone, Debug, Serialize)]
pub struct Measurement {
    pub label: String,
    pub value: f64,
    pub tolerance: f64,
    pub pass: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
}

impl Measurement {
    pub fn below(label: impl Into<String>, value: f64, tolerance: f64) -> Self {
        Measurement { label: label.into(), value, tolerance, pass: value < tolerance, error: None }
    }

    pub fn exact(label: impl Into<String>, mismatches: usize) -> Self {
        let value = mismatches as f64;
        Measurement { label: label.into(), value, tolerance: 0.0, pass: mismatches == 0, error: None }
    }

    pub fn from_result(label: impl Into<String>, value: Result<f64>, tolerance: f64) -> Self {
        match value {
            Ok(v) => Measurement::below(label, v, tolerance),
            Err(e) => Measurement {
                label: label.into(),
                value: f64::INFINITY,
                tolerance,
                pass: false,
                error: Some(e.to_string()),
            },
        }
    }

    fn ratio(&self) -> f64 {
        if self.tolerance > 0.0 {
            self.value / self.tolerance
        } else if self.value == 0.0 {
            0.0
        } else {
            f64::INFINITY
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct CheckResult {
    pub name: String,
    pub criterion: u8,
    pub status: Status,
    /// Value and bound of the part closest to (or furthest past) its bound.
    pub measured: f64,
    pub tolerance: f64,
    pub parts: Vec<Measurement>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub wall_time_s: Option<f64>,
}

impl CheckResult {
    fn from_parts(criterion: u8, name: &str, parts: Vec<Measurement>) -> Self {
        let status = if parts.is_empty() {
            Status::Skip
        } else if parts.iter().all(|m| m.pass) {
            Status::Pass
        } else {
            Status::Fail
        };
        let worst = parts
            .iter()
            .max_by(|a, b| {
                (!a.pass, a.ratio())
                    .partial_cmp(&(!b.pass, b.ratio()))
                    .unwrap_or(std::cmp::Ordering::Equal)
            })
            .cloned();
        let (measured, tolerance) = worst.map_or((0.0, 0.0), |m| (m.value, m.tolerance));
        CheckResult { name: name.to_string(), criterion, status, measured, tolerance, parts, wall_time_s: None }
    }

    /// `PASS 01-genus-formula  measured=0e0 tol=0e0`
    pub fn line(&self) -> String {
        let tag = match self.status {
            Status::Pass => "PASS",
            Status::Fail => "FAIL",
            Status::Skip => "SKIP",
        };
        format!("{tag} {:<38} measured={:.3e} tol={:.1e}", self.name, self.measured, self.tolerance)
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct VerifyReport {
    pub suite: Suite,
    pub seed: u64,
    pub tolerances: Tolerances,
    pub passed: usize,
    pub failed: usize,
    pub skipped: usize,
    pub checks: Vec<CheckResult>,
}

impl VerifyReport {
    pub fn all_passed(&self) -> bool {
        self.failed == 0
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("serializable")
    }
}

fn check_rng(seed: u64, criterion: u8) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed ^ (criterion as u64).wrapping_mul(0x9E37_79B9_7F4A_7C15))
}

/// Run one check by criterion number.
pub fn run_check(criterion: u8, seed: u64, tol: &Tolerances) -> Option<CheckResult> {
    let (_, name, _) = CHECKS.iter().find(|c| c.0 == criterion)?;
    let mut rng = check_rng(seed, criterion);
    let parts = match criterion {
        1 => genus_formula(),
        2 => spectral_conservation(&mut rng, tol),
        3 => field_commutativity(&mut rng, tol),
        4 => quotient_vanishing(&mut rng, tol),
        5 => gauge_covariance(&mut rng, tol),
        6 => normal_form_check(&mut rng, tol),
        7 => lie_poisson(&mut rng, tol),
        8 => hamiltonian_generation(&mut rng, tol),
        9 => involution(&mut rng, tol),
        10 => separation_of_variables(tol),
        11 => closed_forms(&mut rng, tol),
        12 => even_mumford_slice(&mut rng, tol),
        13 => covering(&mut rng),
        14 => theta_test(&mut rng),
        _ => return None,
    };
    Some(CheckResult::from_parts(criterion, name, parts))
}

/// Run every check of `suite` concurrently; the report is sorted by name.
pub fn verify_suite(seed: u64, suite: Suite, tol: &Tolerances, timings: bool) -> VerifyReport {
    let selected: Vec<u8> = CHECKS
        .iter()
        .filter(|(_, _, s)| suite == Suite::All || *s == suite)
        .map(|(c, _, _)| *c)
        .collect();
    let mut checks: Vec<CheckResult> = std::thread::scope(|scope| {
        let handles: Vec<_> = selected
            .iter()
            .map(|&c| {
                scope.spawn(move || {
                    let start = Instant::now();
                    let mut res = run_check(c, seed, tol).expect("listed check");
                    if timings {
                        res.wall_time_s = Some(start.elapsed().as_secs_f64());
                    }
                    res
                })
            })
            .collect();
        handles.into_iter().map(|h| h.join().expect("check thread panicked")).collect()
    });
    checks.sort_by(|a, b| a.name.cmp(&b.name));
    let count = |s: Status| checks.iter().filter(|c| c.status == s).count();
    VerifyReport {
        suite,
        seed,
        tolerances: tol.clone(),
        passed: count(Status::Pass),
        failed: count(Status::Fail),
        skipped: count(Status::Skip),
        checks,
    }
}

fn rand_point<R: Rng>(rng: &mut R, radius: f64) -> C64 {
    random_c64(rng) * radius
}

fn size_label(r: usize, d: usize) -> String {
    format!("({r},{d})")
}

fn genus_formula() -> Vec<Measurement> {
    let mut wrong = 0;
    wrong += usize::from(genus(2, 3) != 2);
    wrong += usize::from(genus(3, 2) != 4);
    for d in 1..=12 {
        wrong += usize::from(genus(2, d) != d - 1);
    }
    vec![Measurement::exact("genus(2,3)=2, genus(3,2)=4, genus(2,d)=d-1 for d<=12", wrong)]
}

fn spectral_conservation<R: Rng>(rng: &mut R, tol: &Tolerances) -> Vec<Measurement> {
    let mut parts = Vec::new();
    for (r, d) in SIZES {
        for k in 0..3 {
            let a = PolyMatrix::random_with(r, d, rng, SampleSlice::Full).expect("valid size");
            let at = rand_point(rng, 1.0);
            let drift = integrate(&a, FieldSpec::Upsilon { a: at, p: 1 }, 1.0, 1e-3).map(|t| t.conservation_drift);
            parts.push(Measurement::from_result(format!("upsilon {} #{k}", size_label(r, d)), drift, tol.conservation));

            let s = PolyMatrix::random_with(r, d, rng, SampleSlice::SInfinity).expect("valid size");
            let at = rand_point(rng, 1.0);
            let drift = integrate(&s, FieldSpec::Projected { a: at, p: 1 }, 1.0, 1e-3).map(|t| t.conservation_drift);
            parts.push(Measurement::from_result(format!("projected {} #{k}", size_label(r, d)), drift, tol.conservation));
        }
    }
    let drift = integrate(&f3(), FieldSpec::Projected { a: C64::new(1.0, 0.0), p: 1 }, 1.0, 1e-3)
        .map(|t| t.conservation_drift);
    parts.push(Measurement::from_result("projected F3 a=1", drift, tol.conservation));
    parts
}

fn y_specs(r: usize, d: usize) -> Vec<FieldSpec> {
    (1..r).flat_map(|p| (0..=p * d).map(move |j| FieldSpec::YField { j, p })).collect()
}

fn field_commutativity<R: Rng>(rng: &mut R, tol: &Tolerances) -> Vec<Measurement> {
    let mut parts = Vec::new();
    for (r, d) in SIZES {
        let specs = y_specs(r, d);
        let mut worst: Result<f64> = Ok(0.0);
        for _ in 0..5 {
            let a = PolyMatrix::random_with(r, d, rng, SampleSlice::Full).expect("valid size");
            for (i, f1) in specs.iter().enumerate() {
                for f2 in &specs[i + 1..] {
                    worst = match (worst, lie_bracket_residual(&a, f1, f2)) {
                        (Ok(w), Ok(v)) => Ok(w.max(v)),
                        (Err(e), _) | (_, Err(e)) => Err(e),
                    };
                }
            }
        }
        let label = format!("max over {} pairs x 5 instances {}", specs.len() * (specs.len() - 1) / 2, size_label(r, d));
        parts.push(Measurement::from_result(label, worst, tol.lie_bracket));
    }
    parts
}

fn quotient_vanishing<R: Rng>(rng: &mut R, tol: &Tolerances) -> Vec<Measurement> {
    let mut parts = Vec::new();
    for (r, d) in SIZES {
        let a = PolyMatrix::random_with(r, d, rng, SampleSlice::Full).expect("valid size");
        let basis = gauge::orbit_tangent_matrix(&a);
        let mut worst: f64 = 0.0;
        let mut rest = Vec::new();
        for p in 1..r {
            let ys = flows::y_fields(&a, p).expect("upsilon is exact");
            for (j, y) in ys.iter().enumerate() {
                let v = y.to_vector();
                if j + 1 >= p * d {
                    worst = worst.max(linalg::least_squares_residual(&basis, &v) / v.norm().max(1.0));
                } else {
                    rest.push(v);
                }
            }
        }
        parts.push(Measurement::below(format!("Y_pd, Y_pd-1 off the orbit span {}", size_label(r, d)), worst, tol.orbit_span));
        let reduced = linalg::project_out(&basis, &linalg::CMat::from_columns(&rest));
        let rank = linalg::numerical_rank(&reduced, tol.rank);
        let g = genus(r, d);
        parts.push(Measurement::exact(
            format!("rank {rank} of the remaining fields modulo gauge vs g = {g} {}", size_label(r, d)),
            rank.abs_diff(g),
        ));
    }
    parts
}

fn gauge_covariance<R: Rng>(rng: &mut R, tol: &Tolerances) -> Vec<Measurement> {
    let mut parts = Vec::new();
    for (r, d) in SIZES {
        let mut worst: f64 = 0.0;
        for _ in 0..3 {
            let a = PolyMatrix::random_with(r, d, rng, SampleSlice::Full).expect("valid size");
            let g = GaugeElement::random(r, rng);
            let lhs = gauge::d_poly(&gauge::gauge_apply(&g, &a).expect("valid gauge"));
            let rhs = gauge::d_poly(&a).scale(linalg::det(g.b()).inv());
            worst = worst.max(lhs.max_diff(&rhs) / rhs.max_abs().max(1.0));
        }
        parts.push(Measurement::below(format!("max coefficient error {}", size_label(r, d)), worst, tol.d_covariance));
    }
    parts
}

fn random_node<R: Rng>(rng: &mut R, k: usize) -> Node {
    if k.is_multiple_of(2) {
        Node::Infinity
    } else {
        Node::Finite(rand_point(rng, 1.0))
    }
}

fn normal_form_check<R: Rng>(rng: &mut R, tol: &Tolerances) -> Vec<Measurement> {
    let (mut recovery, mut round_trip, mut idempotence, mut equivariance) = (0.0f64, 0.0f64, 0.0f64, 0.0f64);
    let mut failures = Vec::new();
    for k in 0..20 {
        let (r, d) = SIZES[k % SIZES.len()];
        let node = random_node(rng, k);
        let s = PolyMatrix::random_with(r, d, rng, SampleSlice::at(node)).expect("valid size");
        let h = GaugeElement::random(r, rng);
        let a = gauge::gauge_apply(&h, &s).expect("valid gauge");
        let scale = 1.0 + s.max_abs();
        let run = || -> Result<(f64, f64, f64, f64)> {
            if !gauge::in_mc(&a, node) {
                return Err(LaxError::NotInMc { det_abs: gauge::d_det(&a, node).norm() });
            }
            let (s1, g) = gauge::normal_form(&a, node)?;
            let rt = gauge::gauge_apply(&g, &a)?.max_diff(&s1).max(s1.slice_violation(node));
            let (s2, g2) = gauge::normal_form(&s1, node)?;
            let idem = s2.max_diff(&s1).max(g2.max_diff(&GaugeElement::identity(r)));
            let h2 = GaugeElement::random(r, &mut ChaCha8Rng::seed_from_u64(k as u64));
            let (s3, _) = gauge::normal_form(&gauge::gauge_apply(&h2, &a)?, node)?;
            Ok((s1.max_diff(&s), rt, idem, s3.max_diff(&s1)))
        };
        match run() {
            Ok((rec, rt, idem, eq)) => {
                recovery = recovery.max(rec / scale);
                round_trip = round_trip.max(rt / scale);
                idempotence = idempotence.max(idem / scale);
                equivariance = equivariance.max(eq / scale);
            }
            Err(e) => failures.push(format!("case {k}: {e}")),
        }
    }
    let mut parts = vec![
        Measurement::below("recovery of the slice representative", recovery, tol.normal_form),
        Measurement::below("gauge_apply round trip and slice membership", round_trip, tol.normal_form),
        Measurement::below("idempotence", idempotence, tol.normal_form),
        Measurement::below("gauge equivariance", equivariance, tol.normal_form),
    ];
    let mut m = Measurement::exact("cases raising errors (of 20)", failures.len());
    if !failures.is_empty() {
        m.error = Some(failures.join("; "));
    }
    parts.push(m);
    parts
}

fn lie_poisson<R: Rng>(rng: &mut R, tol: &Tolerances) -> Vec<Measurement> {
    let mut parts = Vec::new();

    let mut jacobi: f64 = 0.0;
    for k in 0..100 {
        let (r, d) = SIZES[k % SIZES.len()];
        let nodes = Nodes::standard(d);
        let y = MultiPoint::random(r, nodes.clone(), rng);
        let mut coord = || ScalarField::coordinate(rng.gen_range(0..d + 2), rng.gen_range(0..r), rng.gen_range(0..r));
        let (f, g, h) = (coord(), coord(), coord());
        let j = poisson::bracket(&poisson::linear_bracket(&f, &g, r, &nodes), &h, &y)
            + poisson::bracket(&poisson::linear_bracket(&g, &h, r, &nodes), &f, &y)
            + poisson::bracket(&poisson::linear_bracket(&h, &f, r, &nodes), &g, &y);
        jacobi = jacobi.max(j.norm());
    }
    parts.push(Measurement::below("Jacobi identity, 100 coordinate triples", jacobi, tol.jacobi));

    let mut casimir: f64 = 0.0;
    for (r, d) in SIZES {
        let y = MultiPoint::random(r, Nodes::standard(d), rng);
        for alpha in 0..d + 2 {
            for k in 1..=r {
                let c = ScalarField::trace_power(alpha, k);
                for beta in 0..d + 2 {
                    for i in 0..r {
                        for j in 0..r {
                            let v = poisson::bracket(&c, &ScalarField::coordinate(beta, i, j), &y);
                            casimir = casimir.max(v.norm());
                        }
                    }
                }
            }
        }
    }
    parts.push(Measurement::below("Casimir brackets tr(Y_a^k), k<=r", casimir, tol.casimir));

    let mut moment: f64 = 0.0;
    let mut mismatches = 0;
    for (r, d) in SIZES {
        let nodes = Nodes::standard(d);
        for _ in 0..3 {
            let a = PolyMatrix::random_with(r, d, rng, SampleSlice::Full).expect("valid size");
            let y = poisson::phi(&a, &nodes).expect("matching nodes");
            moment = moment.max(poisson::moment_t1_residual(&y)).max(poisson::imvarphi_residual(&y));
            let mut off = y.clone();
            let (i, j) = (rng.gen_range(1..r), 0);
            off.y[rng.gen_range(0..d + 2)][(i, j)] += C64::new(1.0, 0.0);
            let random = MultiPoint::random(r, nodes.clone(), rng);
            for sample in [&y, &off, &random] {
                let lhs = poisson::image_predicate(sample, tol.moment_zero);
                let rhs = poisson::imvarphi_residual(sample) < tol.moment_zero;
                mismatches += usize::from(lhs != rhs);
            }
        }
    }
    parts.push(Measurement::below("moment map, t_1 and image equations on phi(A)", moment, tol.moment_zero));
    parts.push(Measurement::exact("image predicate disagreements with the image equations", mismatches));
    parts
}

fn hamiltonian_generation<R: Rng>(rng: &mut R, tol: &Tolerances) -> Vec<Measurement> {
    let mut parts = Vec::new();
    for (r, d) in SIZES {
        let nodes = Nodes::standard(d);
        let a = PolyMatrix::random_with(r, d, rng, SampleSlice::Full).expect("valid size");
        let mut worst: Result<f64> = Ok(0.0);
        for _ in 0..5 {
            let at = loop {
                let z = rand_point(rng, 2.0) + C64::new(1.0, 0.0);
                if nodes.a().iter().all(|n| (n - z).norm() > 0.1) {
                    break z;
                }
            };
            let p = rng.gen_range(1..=r);
            let v = poisson::hamiltonian_field_check(&a, at, p, &nodes);
            worst = match (worst, v) {
                (Ok(w), Ok(v)) => Ok(w.max(v)),
                (Err(e), _) | (_, Err(e)) => Err(e),
            };
        }
        parts.push(Measurement::from_result(format!("5 random (a, p) {}", size_label(r, d)), worst, tol.hamiltonian_field));
    }
    parts
}

fn involution<R: Rng>(rng: &mut R, tol: &Tolerances) -> Vec<Measurement> {
    let mut worst: f64 = 0.0;
    for k in 0..10 {
        let (r, d) = SIZES[k % SIZES.len()];
        let nodes = Nodes::standard(d);
        let a = PolyMatrix::random_with(r, d, rng, SampleSlice::Full).expect("valid size");
        let y = poisson::phi(&a, &nodes).expect("matching nodes");
        let (at, bt) = (rand_point(rng, 1.0), rand_point(rng, 1.0));
        let (p, q) = (rng.gen_range(1..=r), rng.gen_range(1..=r));
        let f = poisson::trace_hamiltonian(at, p, &nodes);
        let g = poisson::trace_hamiltonian(bt, q, &nodes);
        worst = worst.max(poisson::bracket(&f, &g, &y).norm());
    }
    vec![Measurement::below("|{tr A(a)^(p+1), tr A(b)^(q+1)}|, 10 samples", worst, tol.involution)]
}

fn separation_of_variables(tol: &Tolerances) -> Vec<Measurement> {
    let mut parts = Vec::new();
    match sov::sov_divisor(&f3()) {
        Ok(div) if div.len() == 1 => {
            let (x, y) = div.points[0];
            let err = x.norm().max((y - C64::new(2.0, 0.0)).norm());
            parts.push(Measurement::below("F3 divisor distance to (0, 2)", err, tol.divisor_exact));
            parts.push(Measurement::below("F3 residual |P(x, y)|", div.max_residual(), tol.divisor_exact));
        }
        Ok(div) => parts.push(Measurement::exact("F3 divisor size vs 1", div.len().abs_diff(1))),
        Err(e) => parts.push(Measurement::from_result("F3 divisor", Err(e), tol.divisor_exact)),
    }
    let a = f4();
    match sov::sov_divisor(&a) {
        Ok(div) => {
            parts.push(Measurement::exact("F4 divisor size vs g = 4", div.len().abs_diff(4)));
            parts.push(Measurement::below("F4 max residual |P(x_i, y_i)|", div.max_residual(), tol.divisor_residual));
            let mut spread: f64 = 0.0;
            let mut admissible = 0;
            for &(x, y) in &div.points {
                for nu in sov::nu_candidates(2) {
                    if let Ok(y2) = sov::y_general(&a, x, &nu) {
                        spread = spread.max((y2 - y).norm());
                        admissible += 1;
                    }
                }
            }
            parts.push(Measurement::below(
                format!("F4 y_i spread over {admissible} admissible nu"),
                spread,
                tol.nu_independence,
            ));
        }
        Err(e) => parts.push(Measurement::from_result("F4 divisor", Err(e), tol.divisor_residual)),
    }
    parts
}

fn closed_forms<R: Rng>(rng: &mut R, tol: &Tolerances) -> Vec<Measurement> {
    let mut worst2: Result<f64> = Ok(0.0);
    let mut r2 = vec![f3()];
    for d in [2, 3] {
        r2.push(PolyMatrix::random_with(2, d, rng, SampleSlice::SInfinity).expect("valid size"));
    }
    for a in &r2 {
        for at in [C64::new(1.0, 0.0), rand_point(rng, 1.0)] {
            let diff = sov::even_mumford_field(a, at)
                .and_then(|c| flows::projected_field(a, at, 1).map(|s| c.max_diff(&s)));
            worst2 = match (worst2, diff) {
                (Ok(w), Ok(v)) => Ok(w.max(v)),
                (Err(e), _) | (_, Err(e)) => Err(e),
            };
        }
    }
    let mut worst3: Result<f64> = Ok(0.0);
    let r3 = [f4(), PolyMatrix::random_with(3, 2, rng, SampleSlice::SInfinity).expect("valid size")];
    for a in &r3 {
        let diff = sov::sov_divisor(a).and_then(|div| {
            div.points.iter().try_fold(0.0f64, |acc, &(x, y)| {
                let (y1, y2) = sov::r3_y_formulas(a, x)?;
                Ok(acc.max((y1 - y).norm()).max((y2 - y).norm()))
            })
        });
        worst3 = match (worst3, diff) {
            (Ok(w), Ok(v)) => Ok(w.max(v)),
            (Err(e), _) | (_, Err(e)) => Err(e),
        };
    }
    vec![
        Measurement::from_result("r=2 even Mumford field vs projected field", worst2, tol.even_mumford),
        Measurement::from_result("r=3 closed-form y vs divisor", worst3, tol.r3_formulas),
    ]
}

fn even_mumford_slice<R: Rng>(rng: &mut R, tol: &Tolerances) -> Vec<Measurement> {
    let mut parts = Vec::new();
    for d in [2, 3] {
        let s = PolyMatrix::random_with(2, d, rng, SampleSlice::SInfinity).expect("valid size");
        let mut blk = s.blocks();
        blk.v = blk.t.scale(C64::new(-1.0, 0.0));
        let a = blk.assemble().expect("trace-free slice member");
        let at = rand_point(rng, 1.0);
        let drift = integrate(&a, FieldSpec::Projected { a: at, p: 1 }, 1.0, 1e-3).map(|t| {
            t.samples.iter().map(|s| char_poly(&s.matrix).s(1).max_abs()).fold(0.0, f64::max)
        });
        parts.push(Measurement::from_result(format!("max |s_1| along the flow (2,{d})"), drift, tol.s1_drift));
    }
    parts
}

fn covering<R: Rng>(rng: &mut R) -> Vec<Measurement> {
    let (mut uncovered, mut certified, mut drawn) = (0, 0, 0);
    while certified < 20 && drawn < 200 {
        let (r, d) = SIZES[drawn % SIZES.len()];
        drawn += 1;
        let a = PolyMatrix::random_with(r, d, rng, SampleSlice::Full).expect("valid size");
        if !spectral::smoothness_check(&char_poly(&a)).smooth_heuristic {
            continue;
        }
        certified += 1;
        let g = genus(r, d);
        if !(0..=g).any(|c| gauge::in_mc(&a, Node::finite(c as f64, 0.0))) {
            uncovered += 1;
        }
    }
    vec![
        Measurement::exact("certified samples (of 20) outside every M_c, c = 0..g", uncovered),
        Measurement::exact("certified samples short of 20", 20 - certified),
    ]
}

fn theta_test<R: Rng>(rng: &mut R) -> Vec<Measurement> {
    let (mut bad, mut evaluated, mut deficient, mut attempts) = (0, 0, 0, 0);
    while evaluated < 50 && attempts < 500 {
        attempts += 1;
        let (r, d) = SIZES[attempts % SIZES.len()];
        let a = PolyMatrix::random_with(r, d, rng, SampleSlice::Full).expect("valid size");
        let x = if attempts % 2 == 0 {
            rand_point(rng, 1.0)
        } else {
            let roots = gauge::d_poly(&a).roots(1e-14);
            if roots.is_empty() {
                continue;
            }
            roots[rng.gen_range(0..roots.len())]
        };
        let Ok(rep) = gauge::theta_membership(&a, Node::Finite(x)) else { continue };
        evaluated += 1;
        deficient += usize::from(rep.dim_w > 0);
        if rep.rank_d + rep.dim_w != r - 1 || rep.zero_first_entries != rep.dim_w {
            bad += 1;
        }
    }
    let mut flagged = 0;
    for (r, d) in SIZES {
        for k in 0..4 {
            let node = random_node(rng, k);
            let s = PolyMatrix::random_with(r, d, rng, SampleSlice::at(node)).expect("valid size");
            match gauge::theta_membership(&s, node) {
                Ok(rep) if rep.outside_theta.iter().all(|f| *f) => {}
                _ => flagged += 1,
            }
        }
    }
    vec![
        Measurement::exact(
            format!("evaluations (of {evaluated}, {deficient} rank-deficient) with false-flag count != r-1-rank D"),
            bad,
        ),
        Measurement::exact("unramified evaluations short of 50", 50usize.saturating_sub(evaluated)),
        Measurement::exact("slice members at their marked point with a false flag (of 12)", flagged),
    ]
}

/// The Hamiltonian field of `H_E` pulled back: used by examples to show the
/// moment map generating the gauge action.
pub fn moment_field_matches_gauge_action(a: &PolyMatrix, nodes: &Nodes) -> Result<f64> {
    let y = poisson::phi(a, nodes)?;
    let mut worst: f64 = 0.0;
    for e in gauge::LieGaugeElement::basis(a.r()) {
        let h = poisson::moment_hamiltonian(&e, nodes);
        let pulled = poisson::phi_inverse_with(&poisson::hamiltonian_vector_field(&h, &y), 1e-8)?;
        let act = e.act(a)?;
        let v: CVec = pulled.to_vector() + act.to_vector();
        worst = worst.max(v.norm());
    }
    Ok(worst)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn check_table_is_complete_and_sorted() {
        for (k, (c, name, _)) in CHECKS.iter().enumerate() {
            assert_eq!(*c as usize, k + 1);
            assert!(name.starts_with(&format!("{:02}-", k + 1)));
        }
        assert!(run_check(15, 0, &Tolerances::default()).is_none());
    }

    #[test]
    fn suite_names_round_trip() {
        for s in [Suite::All, Suite::Flows, Suite::Poisson, Suite::Sov, Suite::Gauge] {
            assert_eq!(s.to_string().parse::<Suite>().unwrap(), s);
        }
        assert!("everything".parse::<Suite>().is_err());
    }

    #[test]
    fn genus_check_passes() {
        let r = run_check(1, 0, &Tolerances::default()).unwrap();
        assert_eq!(r.status, Status::Pass);
    }

    #[test]
    fn moment_hamiltonians_generate_the_gauge_action() {
        let a = PolyMatrix::random(3, 2, 3, SampleSlice::Full).unwrap();
        assert!(moment_field_matches_gauge_action(&a, &Nodes::standard(2)).unwrap() < 1e-10);
    }
}
