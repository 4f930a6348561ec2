//! Integrate Lax flows: the spectral curve is conserved, the Y fields
//! commute, and the projected flow stays on the slice at infinity.

use laxflow::fixtures::f3;
use laxflow::flows::{integrate, lie_bracket_residual, FieldSpec};
use laxflow::{PolyMatrix, SampleSlice, C64};

fn main() -> laxflow::Result<()> {
    let a = PolyMatrix::random(2, 3, 1, SampleSlice::Full)?;
    let field = FieldSpec::Upsilon { a: C64::new(0.2, 0.1), p: 1 };
    let traj = integrate(&a, field, 0.5, 1e-3)?;
    println!("upsilon flow: {} steps, spectral drift {:.2e}", traj.samples.len() - 1, traj.conservation_drift);

    let f1 = FieldSpec::YField { j: 1, p: 1 };
    let f2 = FieldSpec::YField { j: 3, p: 1 };
    println!("[Y_1, Y_3] residual {:.2e}", lie_bracket_residual(&a, &f1, &f2)?);

    for dt in [2e-3, 1e-3, 5e-4] {
        let traj = integrate(&f3(), FieldSpec::Projected { a: C64::new(1.0, 0.0), p: 1 }, 1.0, dt)?;
        println!("projected flow of F3, dt = {dt:e}: drift {:.2e}", traj.conservation_drift);
    }

    let traj = integrate(&f3(), FieldSpec::Projected { a: C64::new(1.0, 0.0), p: 1 }, 0.05, 1e-2)?;
    print!("{}", traj.to_csv(Some(5)));
    Ok(())
}
