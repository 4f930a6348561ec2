//! Embed a Lax matrix into the multipoint Lie-Poisson space and check
//! involution, Casimirs and the moment map.

use laxflow::poisson::{self, MultiPoint, Nodes, ScalarField};
use laxflow::{PolyMatrix, SampleSlice, C64};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn main() -> laxflow::Result<()> {
    let nodes = Nodes::standard(2);
    let a = PolyMatrix::random(3, 2, 5, SampleSlice::Full)?;
    let y = poisson::phi(&a, &nodes)?;
    println!("phi(A) round trip: {:.2e}", poisson::phi_inverse(&y)?.max_diff(&a));
    println!("moment map and t_1 on the image: {:.2e}", poisson::moment_t1_residual(&y));

    let f = poisson::trace_hamiltonian(C64::new(0.3, 0.0), 1, &nodes);
    let g = poisson::trace_hamiltonian(C64::new(-0.7, 0.5), 2, &nodes);
    println!("{{tr A(a)^2, tr A(b)^3}} = {:.2e}", poisson::bracket(&f, &g, &y).norm());

    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let z = MultiPoint::random(3, nodes.clone(), &mut rng);
    let cas = ScalarField::trace_power(1, 2);
    let coord = ScalarField::coordinate(1, 0, 2);
    println!("Casimir bracket at a random point: {:.2e}", poisson::bracket(&cas, &coord, &z).norm());

    println!(
        "Hamiltonian field of tr A(a)^2 vs Upsilon mod gauge: {:.2e}",
        poisson::hamiltonian_field_check(&a, C64::new(2.5, 0.0), 1, &nodes)?
    );
    Ok(())
}
