mod common;

use common::{edge_char, frac, graph_char, q, sample_points};
use krein_star::forward::Forward;
use krein_star::random::{random_measures, RandomConfig};
use krein_star::{GraphMeasure, StarGraph};

fn measures() -> Vec<GraphMeasure> {
    random_measures(404, 25, &RandomConfig::default())
}

#[test]
fn characteristic_functions_match_determinants() {
    for (i, m) in measures().iter().enumerate() {
        let fwd = Forward::new(m).unwrap();
        let w = fwd.w();
        let pts = sample_points(m.atom_count() + 2);
        for z in &pts {
            assert_eq!(w.eval(z), graph_char(m, z), "case {i}: W at {z}");
            for e in 0..m.graph().len() {
                assert_eq!(fwd.edges[e].p.eval(z), edge_char(m, e, z), "case {i}: P_{e} at {z}");
            }
        }
    }
}

#[test]
fn spectra_are_the_zeros_with_multiplicity() {
    for (i, m) in measures().iter().enumerate() {
        let fwd = Forward::new(m).unwrap();
        let spectrum = fwd.spectrum();
        let total: usize = spectrum.iter().map(|s| s.1).sum();
        assert_eq!(total, m.atom_count(), "case {i}");
        assert_eq!(Some(total), fwd.w().degree(), "case {i}");
        for (lambda, _) in &spectrum {
            assert!(lambda.is_root_of(fwd.w()), "case {i}");
        }
        for e in 0..m.graph().len() {
            assert_eq!(fwd.edge_spectrum(e).len(), m.edge(e).len(), "case {i} edge {e}");
        }
    }
}

#[test]
fn trace_identities() {
    for m in measures() {
        let fwd = Forward::new(&m).unwrap();
        let t = fwd.trace_checks();
        assert!(t.holds());
        assert_eq!(t.graph.0, m.trace_integral());
        for (e, (lhs, rhs)) in t.edges.iter().enumerate() {
            assert_eq!(lhs, rhs, "edge {e}");
            assert_eq!(*lhs, m.edge_trace_integral(e));
        }
    }
}

#[test]
fn invariants_hold() {
    for (i, m) in measures().iter().enumerate() {
        let r = Forward::new(m).unwrap().invariants();
        assert!(r.holds(), "case {i}: {:?}", r.failures());
    }
}

#[test]
fn identical_edges_share_their_spectrum() {
    let g = StarGraph::with_lengths(&[q(2), q(2), q(1)]).unwrap();
    let a = vec![(frac(1, 2), q(1)), (frac(3, 2), q(2))];
    let m = GraphMeasure::from_masses(g, q(1), vec![a.clone(), a, vec![(frac(1, 3), frac(1, 2))]]).unwrap();
    let fwd = Forward::new(&m).unwrap();
    let data = fwd.export();
    for mu in &data.sigma_e[0] {
        assert_eq!(data.kappa(mu), 1);
        assert!(data.sigma.iter().any(|l| l.same_value(mu)));
        let gamma = fwd.coupling_matrix(mu).unwrap();
        assert_eq!(gamma.edges(), &[0, 1]);
    }
    assert!(fwd.invariants().holds());
}
