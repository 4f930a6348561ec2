//! Hide a slice representative behind a random gauge transformation and
//! recover it with the constructive normal form.

use laxflow::gauge::{self, GaugeElement};
use laxflow::{Node, PolyMatrix, SampleSlice};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn main() -> laxflow::Result<()> {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for node in [Node::Infinity, Node::finite(0.5, -0.25)] {
        let s = PolyMatrix::random_with(3, 2, &mut rng, SampleSlice::at(node))?;
        let h = GaugeElement::random(3, &mut rng);
        let a = gauge::gauge_apply(&h, &s)?;
        println!("node {node}: in M_c = {}, |det D| = {:.3}", gauge::in_mc(&a, node), gauge::d_det(&a, node).norm());

        let (rec, g) = gauge::normal_form(&a, node)?;
        println!("  recovery error      {:.2e}", rec.max_diff(&s));
        println!("  slice violation     {:.2e}", rec.slice_violation(node));
        println!("  g(A) - normal form  {:.2e}", gauge::gauge_apply(&g, &a)?.max_diff(&rec));
    }
    Ok(())
}
