//! The spectra alone do not fix the measure: changing the coupling matrix at
//! a shared eigenvalue gives another measure with the same spectra.

use krein_star::forward::{export_spectral_data, Forward};
use krein_star::inverse::solve;
use krein_star::io::measure_to_string;
use krein_star::number::{frac, q};
use krein_star::{AlgebraicValue, CouplingMatrix, GraphMeasure, StarGraph};

fn main() {
    let g = StarGraph::with_lengths(&[q(1), q(1), q(1)]).unwrap();
    let m = GraphMeasure::from_masses(g, q(0), vec![vec![(frac(1, 2), q(1))]; 3]).unwrap();
    let mut data = export_spectral_data(&m).unwrap();
    let lambda = data.coupling[0].lambda().clone();
    let r = |x| AlgebraicValue::rational(x);
    data.coupling[0] = CouplingMatrix::from_ratios(lambda, 0, vec![(1, r(q(4))), (2, r(frac(1, 4)))]).unwrap();

    let other = solve(&data).unwrap();
    print!("{}", measure_to_string(&other, 30));
    let fwd = Forward::new(&other).unwrap();
    let again = fwd.export();
    println!("same graph spectrum: {}", again.sigma == data.sigma);
    println!("same edge spectra: {}", again.sigma_e == data.sigma_e);
    println!("same measure: {}", other == m);
}
