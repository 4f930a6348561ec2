//! Small reference matrices with hand-checkable properties.

use crate::poly::Poly;
use crate::polymat::{PolyMatrix, SampleSlice};

/// `[[x, x^2], [1, -x]]` in `M(2, 1)`; spectral curve `y^2 - 2x^2`.
pub fn f1() -> PolyMatrix {
    PolyMatrix::new(
        2,
        1,
        vec![
            vec![Poly::from_real(&[0.0, 1.0]), Poly::from_real(&[0.0, 0.0, 1.0])],
            vec![Poly::from_real(&[1.0]), Poly::from_real(&[0.0, -1.0])],
        ],
    )
    .expect("F1 is shape-valid")
}

/// `[[0, x], [1, 0]]` in `M(2, 1)`.
pub fn f2() -> PolyMatrix {
    PolyMatrix::new(
        2,
        1,
        vec![
            vec![Poly::zero(), Poly::from_real(&[0.0, 1.0])],
            vec![Poly::from_real(&[1.0]), Poly::zero()],
        ],
    )
    .expect("F2 is shape-valid")
}

/// `[[0, x^3 + 1], [x, 2]]` in `S_inf` of `M(2, 2)`; spectral curve
/// `y^2 - 2y - x^4 - x`, genus 1.
pub fn f3() -> PolyMatrix {
    PolyMatrix::new(
        2,
        2,
        vec![
            vec![Poly::zero(), Poly::from_real(&[1.0, 0.0, 0.0, 1.0])],
            vec![Poly::from_real(&[0.0, 1.0]), Poly::from_real(&[2.0])],
        ],
    )
    .expect("F3 is shape-valid")
}

/// Seeded random member of `S_inf` in `M(3, 2)` (seed 42).
pub fn f4() -> PolyMatrix {
    PolyMatrix::random(3, 2, 42, SampleSlice::SInfinity).expect("valid (r, d)")
}
