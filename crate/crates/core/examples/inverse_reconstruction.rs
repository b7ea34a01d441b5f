//! From spectral data back to the measure.

use krein_star::inverse::Inverse;
use krein_star::number::q;
use krein_star::{AlgebraicValue, CouplingMatrix, RealRoot, SpectralData, StarGraph};

fn main() {
    let g = StarGraph::with_lengths(&[q(1), q(1), q(1)]).unwrap();
    let four = RealRoot::rational(q(4));
    let one = || AlgebraicValue::rational(q(1));
    let data = SpectralData {
        graph: g,
        sigma: vec![RealRoot::rational(q(2)), four.clone()],
        sigma_e: vec![vec![four.clone()]; 3],
        coupling: vec![CouplingMatrix::from_ratios(four, 0, vec![(1, one()), (2, one())]).unwrap()],
        declared_kappa: vec![],
    };

    let inv = Inverse::new(&data).unwrap();
    for (mu, eta) in inv.residues_eta().unwrap() {
        println!("eta at {} = {}", mu.to_decimal(10), eta.to_decimal(10));
    }
    println!("central mass {}", inv.central_mass().unwrap());
    for w in inv.weyl_functions().unwrap() {
        println!("m_e{} = {:?}", w.edge + 1, w.m);
    }
    let m = inv.solve().unwrap();
    for (e, em) in m.edge_measures().iter().enumerate() {
        for p in em.masses() {
            println!("edge e{}: mass {} at {}", e + 1, p.weight, p.position);
        }
    }
    println!("regularity sum on e1: {}", inv.regularity_sum(0).unwrap());
}
