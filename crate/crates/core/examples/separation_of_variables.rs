//! Compute the divisor of a slice member and watch it move along the
//! projected flow while the curve stays fixed.

use laxflow::fixtures::f4;
use laxflow::flows::{integrate, FieldSpec};
use laxflow::sov;
use laxflow::spectral::char_poly;
use laxflow::C64;

fn main() -> laxflow::Result<()> {
    let a = f4();
    let div = sov::sov_divisor(&a)?;
    println!("divisor of F4 ({} points):", div.len());
    for ((x, y), res) in div.points.iter().zip(&div.residuals) {
        println!("  x = {x:.5}, y = {y:.5}, |P(x, y)| = {res:.1e}");
    }

    let traj = integrate(&a, FieldSpec::Projected { a: C64::new(0.3, 0.1), p: 1 }, 0.2, 1e-3)?;
    let moved = sov::sov_divisor(traj.last())?;
    let on_curve = sov::residuals_on(&char_poly(&a), &moved);
    println!("after t = 0.2: divisor moved by {:.3}", moved.max_diff(&div));
    println!("  max residual on the original curve {:.1e}", on_curve.iter().cloned().fold(0.0, f64::max));
    println!("{}", moved.to_json());
    Ok(())
}
