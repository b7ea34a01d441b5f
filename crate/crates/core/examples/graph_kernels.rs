//! Star graph geometry, the kernels Y and T, and integrals against a measure.

use krein_star::number::{frac, q};
use krein_star::{GraphMeasure, StarGraph};

fn main() {
    let g = StarGraph::with_lengths(&[q(1), q(2), q(3)]).unwrap();
    let (l, co) = g.harmonic_lengths();
    println!("harmonic length L = {l}");
    for (e, le) in co.iter().enumerate() {
        println!("edge {}: length {}, co-harmonic length {le}", g.edges()[e].id, g.length(e));
    }
    for x in [q(0), frac(1, 2), q(1)] {
        println!("Y(e1, {x}) = {}, T(e1, {x}) = {}", g.eval_y(0, &x).unwrap(), g.eval_t(0, &x).unwrap());
    }

    let m = GraphMeasure::from_masses(g, frac(1, 2), vec![vec![(frac(1, 2), q(1))], vec![], vec![(q(1), q(2)), (q(2), q(1))]])
        .unwrap();
    println!("total mass {}", m.total_mass());
    println!("int T dw = {}", m.trace_integral());
    println!("int Y dw = {}", m.growth_integral());
    for e in 0..3 {
        println!("edge trace integral {}: {}", m.graph().edges()[e].id, m.edge_trace_integral(e));
    }
}
