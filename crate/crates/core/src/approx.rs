//! Truncated spectral data and the sequence of measures it reconstructs.

use std::cmp::Ordering;

use num::{One, Zero};
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::forward::export_spectral_data;
use crate::graph::{GraphMeasure, GraphPoint};
use crate::inverse::{validate_spectral_data, Inverse};
use crate::number::{pow10_q, round_significant, Q};
use crate::roots::{AlgebraicValue, RealRoot};
use crate::spectral::{CouplingMatrix, SpectralData};

/// Significant digits kept when an eigenvalue loses some of its conjugates.
pub const SNAP_DIGITS: usize = 40;

fn snap_root(r: &RealRoot) -> RealRoot {
    match r.as_rational() {
        Some(_) => r.clone(),
        None => RealRoot::rational(round_significant(&r.approx_within(&pow10_q(-(SNAP_DIGITS as i64) - 6)), SNAP_DIGITS)),
    }
}

fn snap_value(v: &AlgebraicValue) -> AlgebraicValue {
    match v.as_rational() {
        Some(_) => v.clone(),
        None => AlgebraicValue::rational(round_significant(
            &v.approx_within(&pow10_q(-(SNAP_DIGITS as i64) - 6)),
            SNAP_DIGITS,
        )),
    }
}

/// Truncated data together with whether any eigenvalue had to be rounded.
#[derive(Clone, Debug)]
pub struct Truncation {
    pub data: SpectralData,
    /// An algebraic eigenvalue was kept while some of its conjugates were cut.
    pub snapped: bool,
}

/// Keeps the eigenvalues in the open interval `(0, n)` together with their
/// coupling matrices.
///
/// Irrational eigenvalues whose conjugates are not all kept cannot be carried
/// exactly; they and their coupling ratios are rounded to [`SNAP_DIGITS`]
/// significant digits.
pub fn truncate_with_report(data: &SpectralData, n: &Q) -> Result<Truncation> {
    if *n <= Q::zero() {
        return Err(Error::invalid("cutoff must be positive"));
    }
    let basis = validate_spectral_data(data).map_err(Error::InvalidSpectralData)?;
    let mut out = SpectralData::empty(basis.graph.clone());
    let mut snapped = false;
    for f in &basis.factors {
        let roots = f.group.roots();
        let kept: Vec<&RealRoot> = roots.iter().filter(|r| r.cmp_rational(n) == Ordering::Less).collect();
        if kept.is_empty() {
            continue;
        }
        let split = kept.len() < roots.len();
        snapped |= split;
        for r in kept {
            let lambda = if split { snap_root(r) } else { r.clone() };
            if f.in_sigma() {
                out.sigma.push(lambda.clone());
            }
            for &e in &f.edges {
                out.sigma_e[e].push(lambda.clone());
            }
            if let (true, Some(ratios)) = (f.is_shared(), &f.coupling) {
                let vals = f
                    .edges
                    .iter()
                    .zip(ratios)
                    .map(|(&d, x)| {
                        let v = AlgebraicValue::new(r.clone(), x);
                        (d, if split { snap_value(&v) } else { v })
                    })
                    .collect();
                out.coupling.push(CouplingMatrix::from_ratios(lambda.clone(), f.edges[0], vals).map_err(|v| {
                    Error::InvalidSpectralData(vec![v])
                })?);
            }
        }
    }
    out.sigma.sort();
    for s in &mut out.sigma_e {
        s.sort();
    }
    out.coupling.sort_by(|a, b| a.lambda().cmp(b.lambda()));
    if let Err(v) = validate_spectral_data(&out) {
        return Err(Error::invariant(format!(
            "truncated data is not admissible: {}",
            v.iter().map(|x| x.to_string()).collect::<Vec<_>>().join("; ")
        )));
    }
    Ok(Truncation { data: out, snapped })
}

pub fn truncate(data: &SpectralData, n: &Q) -> Result<SpectralData> {
    Ok(truncate_with_report(data, n)?.data)
}

/// Test functions for the weak* probes: per edge, hats of half-width `l/4`
/// centered at `l/4`, `l/2`, `3l/4`; then the cap equal to 1 at the center
/// and decreasing linearly to 0 at every outer vertex.
pub fn probe_labels(measure: &GraphMeasure) -> Vec<String> {
    let mut out = Vec::new();
    for e in measure.graph().edges() {
        for k in 1..=3 {
            out.push(format!("hat_{}_{}q", e.id, k));
        }
    }
    out.push("cap".into());
    out
}

fn hat(center: &Q, half_width: &Q, x: &Q) -> Q {
    let d = (x - center) / half_width;
    let d = if d < Q::zero() { -d } else { d };
    if d >= Q::one() {
        Q::zero()
    } else {
        Q::one() - d
    }
}

/// `int f T dw` over the probe panel.
pub fn probe_integrals(measure: &GraphMeasure) -> Vec<Q> {
    let graph = measure.graph();
    let (big_l, co) = graph.harmonic_lengths();
    let t = |e: usize, x: &Q| &big_l * (Q::one() + x / &co[e]) * (Q::one() - x / graph.length(e));
    let mut out = Vec::new();
    for e in 0..graph.len() {
        let l = graph.length(e);
        let w = l / Q::from_integer(4.into());
        for k in 1..=3 {
            let c = &w * Q::from_integer(k.into());
            out.push(measure.integrate(|p| match p {
                GraphPoint::Edge(d, x) if d == e => hat(&c, &w, x) * t(d, x),
                _ => Q::zero(),
            }));
        }
    }
    out.push(measure.integrate(|p| match p {
        GraphPoint::Center => big_l.clone(),
        GraphPoint::Edge(d, x) => (Q::one() - x / graph.length(d)) * t(d, x),
    }));
    out
}

#[derive(Clone, Debug)]
pub struct CutoffRow {
    pub cutoff: Q,
    /// `int T dw_n`
    pub trace: Q,
    /// `sum kappa/lambda` over the truncated graph spectrum.
    pub partial_sum: Q,
    pub probes: Vec<Q>,
    pub central_mass: Q,
    pub mass_counts: Vec<usize>,
    pub snapped: bool,
    /// `w_n = w`
    pub reproduces: bool,
    pub measure: GraphMeasure,
}

#[derive(Clone, Debug)]
pub struct SequenceReport {
    pub labels: Vec<String>,
    pub rows: Vec<CutoffRow>,
    pub trace: Q,
    pub probes: Vec<Q>,
    /// Largest eigenvalue over the graph and edge spectra.
    pub max_eigenvalue: Option<RealRoot>,
}

impl SequenceReport {
    /// Truncated trace formula and stabilization above the largest eigenvalue.
    pub fn failures(&self) -> Vec<String> {
        let mut out = Vec::new();
        for r in &self.rows {
            if r.trace != r.partial_sum {
                out.push(format!("cutoff {}: trace {} differs from partial sum {}", r.cutoff, r.trace, r.partial_sum));
            }
            let above = self.max_eigenvalue.as_ref().is_none_or(|m| m.cmp_rational(&r.cutoff) == Ordering::Less);
            if above && !r.reproduces {
                out.push(format!("cutoff {}: reconstruction does not reproduce the measure", r.cutoff));
            }
        }
        out
    }
}

/// Reconstructs `w_n` from the data truncated at each cutoff.
pub fn approximation_sequence(measure: &GraphMeasure, cutoffs: &[Q]) -> Result<SequenceReport> {
    if cutoffs.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::invalid("cutoffs must be strictly increasing"));
    }
    let data = export_spectral_data(measure)?;
    let basis = validate_spectral_data(&data).map_err(Error::InvalidSpectralData)?;
    let max_eigenvalue = basis.max_value();
    let rows = cutoffs
        .par_iter()
        .map(|n| {
            let t = truncate_with_report(&data, n)?;
            let inv = Inverse::new(&t.data)?;
            let partial_sum = inv.basis().trace();
            let m = inv.solve()?;
            Ok(CutoffRow {
                cutoff: n.clone(),
                trace: m.trace_integral(),
                partial_sum,
                probes: probe_integrals(&m),
                central_mass: m.central_mass().clone(),
                mass_counts: m.edge_measures().iter().map(|e| e.len()).collect(),
                snapped: t.snapped,
                reproduces: m == *measure,
                measure: m,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(SequenceReport {
        labels: probe_labels(measure),
        rows,
        trace: measure.trace_integral(),
        probes: probe_integrals(measure),
        max_eigenvalue,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::StarGraph;
    use crate::number::{frac, q};

    fn star3() -> StarGraph {
        StarGraph::with_lengths(&[q(1), q(1), q(1)]).unwrap()
    }

    fn symmetric() -> GraphMeasure {
        GraphMeasure::from_masses(star3(), q(0), vec![vec![(frac(1, 2), q(1))]; 3]).unwrap()
    }

    #[test]
    fn truncation_examples() {
        let data = export_spectral_data(&symmetric()).unwrap();
        let t = truncate(&data, &q(3)).unwrap();
        assert_eq!(t.sigma, vec![RealRoot::rational(q(2))]);
        assert!(t.sigma_e.iter().all(|s| s.is_empty()));
        assert!(t.coupling.is_empty());
        assert!(truncate(&data, &q(5)).unwrap().same_as(&data));
        let t = truncate(&data, &q(2)).unwrap();
        assert!(t.sigma.is_empty());
        assert_eq!(Inverse::new(&t).unwrap().solve().unwrap(), GraphMeasure::empty(star3()));
        // the cutoff itself is excluded
        assert_eq!(truncate(&data, &q(4)).unwrap().sigma.len(), 1);
    }

    #[test]
    fn sequence_on_symmetric_star() {
        let r = approximation_sequence(&symmetric(), &[q(1), q(3), q(5)]).unwrap();
        let traces: Vec<Q> = r.rows.iter().map(|x| x.trace.clone()).collect();
        assert_eq!(traces, vec![q(0), frac(1, 2), q(1)]);
        assert!(r.rows[2].reproduces);
        // W = 1 - z/2 alone: central mass 1/(2L)
        assert_eq!(r.rows[1].central_mass, frac(3, 2));
        assert!(r.failures().is_empty());
        assert_eq!(r.labels.len(), 10);
        assert_eq!(r.rows[2].probes, r.probes);
    }

    #[test]
    fn hat_probes() {
        let p = probe_integrals(&symmetric());
        // T(1/2) = L (1 + x/L_e)(1 - x) with L = 1/3, L_e = 1/2: (1/3)(2)(1/2) = 1/3
        assert_eq!(p[1], frac(1, 3));
        assert_eq!(p[0], q(0));
        assert_eq!(p[9], frac(1, 2));
    }

    #[test]
    fn irrational_cutoffs_snap() {
        let ms = vec![(frac(1, 4), q(1)), (frac(1, 2), q(2)), (frac(3, 4), frac(1, 2))];
        let g = StarGraph::with_lengths(&[q(1), frac(3, 2), q(2)]).unwrap();
        let m = GraphMeasure::from_masses(g, frac(1, 3), vec![ms.clone(), ms, vec![(frac(1, 3), q(1))]]).unwrap();
        let data = export_spectral_data(&m).unwrap();
        let mut all: Vec<RealRoot> = data.sigma.clone();
        all.extend(data.sigma_e.iter().flatten().cloned());
        all.sort();
        let top = all.last().unwrap().approx() + q(1);
        let mid = (all[0].approx() + all[1].approx()) / q(2);
        let r = approximation_sequence(&m, &[mid, top]).unwrap();
        assert!(r.failures().is_empty(), "{:?}", r.failures());
        assert!(r.rows[1].reproduces);
        assert!(r.rows[0].trace < r.rows[1].trace);
    }
}
