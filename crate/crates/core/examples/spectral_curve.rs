//! Sample a Lax matrix, compute its spectral curve and check that every
//! eigenvalue of A(x) lies on the curve over x.

use laxflow::spectral::{char_poly, smoothness_check};
use laxflow::{linalg, PolyMatrix, SampleSlice, C64};

fn main() -> laxflow::Result<()> {
    let a = PolyMatrix::random(3, 2, 7, SampleSlice::Full)?;
    let curve = char_poly(&a);
    println!("r = {}, d = {}, genus = {}", curve.r(), curve.d(), curve.genus());
    for i in 1..=curve.r() {
        println!("deg s_{i} = {:?}", curve.s(i).degree());
    }

    let report = smoothness_check(&curve);
    println!("smooth (heuristic): {}", report.smooth_heuristic);

    let x = C64::new(0.4, -1.2);
    for y in linalg::eigenvalues(&a.eval(x)) {
        println!("|P({x:.2}, {y:.4})| = {:.2e}", curve.eval(x, y).norm());
    }
    Ok(())
}
