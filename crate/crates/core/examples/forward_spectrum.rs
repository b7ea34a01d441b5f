//! From a measure to its spectral data.

use krein_star::forward::Forward;
use krein_star::number::{frac, q};
use krein_star::{GraphMeasure, StarGraph};

fn main() {
    // unit mass at the midpoint of every unit edge
    let g = StarGraph::with_lengths(&[q(1), q(1), q(1)]).unwrap();
    let m = GraphMeasure::from_masses(g, q(0), vec![vec![(frac(1, 2), q(1))]; 3]).unwrap();
    let fwd = Forward::new(&m).unwrap();

    println!("W(z) = {:?}", fwd.w());
    for (lambda, kappa) in fwd.spectrum() {
        println!("lambda = {} with multiplicity {kappa}", lambda.to_decimal(20));
    }
    for e in 0..3 {
        let s: Vec<String> = fwd.edge_spectrum(e).iter().map(|r| r.to_decimal(20)).collect();
        println!("edge e{} spectrum {:?}", e + 1, s);
    }
    for c in fwd.coupling_matrices() {
        let rows: Vec<Vec<String>> = c.full().iter().map(|r| r.iter().map(|v| v.to_decimal(10)).collect()).collect();
        println!("coupling at {}: {:?}", c.lambda().to_decimal(10), rows);
    }
    let t = fwd.trace_checks();
    println!("trace: int T dw = {}, sum kappa/lambda = {}", t.graph.0, t.graph.1);

    let report = fwd.invariants();
    for (name, ok) in report.verdicts() {
        println!("{name}: {}", if ok { "holds" } else { "FAILS" });
    }
}
