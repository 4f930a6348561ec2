//! Theta-divisor membership: false flags appear exactly where D loses rank.

use laxflow::gauge;
use laxflow::{Node, PolyMatrix, SampleSlice, C64};

fn main() -> laxflow::Result<()> {
    let a = PolyMatrix::random(3, 2, 4, SampleSlice::Full)?;
    let generic = gauge::theta_membership(&a, Node::Finite(C64::new(0.2, 0.3)))?;
    println!("generic point: flags {:?}, rank D = {}", generic.outside_theta, generic.rank_d);

    for x in gauge::d_poly(&a).roots(1e-14) {
        let rep = gauge::theta_membership(&a, Node::Finite(x))?;
        println!("det D(A; {x:.4}) = 0: flags {:?}, rank D = {}, dim W = {}", rep.outside_theta, rep.rank_d, rep.dim_w);
    }

    let s = PolyMatrix::random(3, 2, 4, SampleSlice::SInfinity)?;
    let rep = gauge::theta_membership(&s, Node::Infinity)?;
    println!("slice member at infinity: flags {:?}", rep.outside_theta);
    Ok(())
}
