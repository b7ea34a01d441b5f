//! Cross-check of exact spectra against a dense floating-point eigensolver.

use krein_star::number::{frac, q};
use krein_star::oracle::{assemble, compare, generalized_eigen, DEFAULT_TOLERANCE};
use krein_star::{GraphMeasure, StarGraph};

fn main() {
    let g = StarGraph::with_lengths(&[q(1), frac(3, 2), q(2)]).unwrap();
    let m = GraphMeasure::from_masses(
        g,
        frac(1, 2),
        vec![vec![(frac(1, 4), q(1)), (frac(3, 4), q(2))], vec![(frac(1, 2), frac(1, 3))], vec![(q(1), q(1))]],
    )
    .unwrap();

    let sys = assemble(&m);
    println!("stiffness:{}", sys.stiffness);
    println!("mass diagonal: {:?}", sys.mass.as_slice());
    for p in generalized_eigen(&sys).unwrap() {
        println!("lambda = {:.15}, u.K.u = {:.15}", p.lambda, p.energy);
    }

    let report = compare(&m, DEFAULT_TOLERANCE).unwrap();
    for r in &report.rows {
        let scope = r.edge.map_or("graph".to_string(), |e| format!("edge {e}"));
        println!("{scope}: exact {:.15} (x{}) oracle {:.15} (x{}) deviation {:.1e}", r.exact, r.kappa, r.oracle, r.multiplicity, r.deviation);
    }
    println!("passed: {} (max deviation {:.1e})", report.passed(), report.max_deviation);
}
