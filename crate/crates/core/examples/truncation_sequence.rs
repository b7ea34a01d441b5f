//! Reconstruction from spectral data cut off at increasing thresholds.

use krein_star::approx::approximation_sequence;
use krein_star::number::{frac, q};
use krein_star::{GraphMeasure, StarGraph};

fn main() {
    let g = StarGraph::with_lengths(&[q(1), q(1), q(1)]).unwrap();
    let m = GraphMeasure::from_masses(
        g,
        q(0),
        vec![vec![(frac(1, 3), q(1)), (frac(2, 3), q(1))], vec![(frac(1, 2), q(1))], vec![(frac(1, 4), frac(1, 2))]],
    )
    .unwrap();
    let cutoffs: Vec<_> = [2, 5, 10, 20, 40, 80].iter().map(|&n| q(n)).collect();
    let report = approximation_sequence(&m, &cutoffs).unwrap();
    println!("int T dw = {} ~ {:.12}", report.trace, krein_star::number::to_f64(&report.trace));
    for r in &report.rows {
        println!(
            "n = {:>3}: int T dw_n ~ {:.12}, masses {:?}, central {:.6}, reproduces {}",
            r.cutoff.to_string(),
            krein_star::number::to_f64(&r.trace),
            r.mass_counts,
            krein_star::number::to_f64(&r.central_mass),
            r.reproduces
        );
    }
    println!("failures: {:?}", report.failures());
}
