//! Spectral data of a given measure: edge transfer, characteristic functions,
//! eigenfunctions, Green's function, coupling matrices and trace identities.
//!
//! Quantities attached to an eigenvalue are computed as polynomial expressions
//! modulo the eigenvalue's defining polynomial, so every identity is checked by
//! exact polynomial congruence and holds simultaneously for all conjugates.

use std::cmp::Ordering;

use num::{One, Zero};
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::graph::{EdgeMeasure, GraphMeasure};
use crate::number::Q;
use crate::poly::{gcd_free_basis, Poly};
use crate::ratfun::{Factored, HerglotzCertificate, RatFun};
use crate::roots::{AlgebraicValue, RealRoot, RootGroup};
use crate::spectral::{BasisFactor, CouplingMatrix, SpectralBasis, SpectralData};

/// `phi_e(z, .)` on one edge: its value `P` and derivative `Q` at the center and
/// its values at the masses, all as polynomials in the spectral parameter.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EdgeCharacteristic {
    pub length: Q,
    pub positions: Vec<Q>,
    pub weights: Vec<Q>,
    pub p: Poly,
    pub q: Poly,
    /// `phi_e(z, x_k)` for every mass, in order of increasing position.
    pub node_values: Vec<Poly>,
}

impl EdgeCharacteristic {
    /// `0, x_1, ..., x_n, l_e`
    pub fn breakpoints(&self) -> Vec<Q> {
        std::iter::once(Q::zero())
            .chain(self.positions.iter().cloned())
            .chain(std::iter::once(self.length.clone()))
            .collect()
    }

    /// Values at [`breakpoints`](Self::breakpoints).
    pub fn breakpoint_values(&self) -> Vec<Poly> {
        std::iter::once(self.p.clone())
            .chain(self.node_values.iter().cloned())
            .chain(std::iter::once(Poly::zero()))
            .collect()
    }

    pub fn mass_count(&self) -> usize {
        self.positions.len()
    }

    /// `sum slope^2 * segment length` modulo `m`.
    pub fn h1_expr(&self, m: &Poly) -> Poly {
        let xs = self.breakpoints();
        let vs: Vec<Poly> = self.breakpoint_values().iter().map(|v| v.rem(m)).collect();
        let mut acc = Poly::zero();
        for k in 0..xs.len() - 1 {
            let h = &xs[k + 1] - &xs[k];
            let dv = &vs[k + 1] - &vs[k];
            acc = &acc + &(&dv * &dv).scale(&(Q::one() / h)).rem(m);
        }
        acc.rem(m)
    }

    /// `sum m_k phi(x_k)^2` modulo `m`.
    pub fn omega_expr(&self, m: &Poly) -> Poly {
        let mut acc = Poly::zero();
        for (v, w) in self.node_values.iter().zip(&self.weights) {
            let v = v.rem(m);
            acc = &acc + &(&v * &v).scale(w).rem(m);
        }
        acc
    }
}

/// Transfer from the outer vertex to the center, one mass at a time.
pub fn edge_transfer(length: &Q, masses: &EdgeMeasure) -> EdgeCharacteristic {
    let mut f = Poly::zero();
    let mut df = Poly::constant(-Q::one() / length);
    let mut b = length.clone();
    let n = masses.len();
    let mut node_values = vec![Poly::zero(); n];
    for (k, pm) in masses.masses().iter().enumerate().rev() {
        f = &f - &df.scale(&(&b - &pm.position));
        df = &df + &(&Poly::z() * &f).scale(&pm.weight);
        b = pm.position.clone();
        node_values[k] = f.clone();
    }
    let p = &f - &df.scale(&b);
    EdgeCharacteristic {
        length: length.clone(),
        positions: masses.masses().iter().map(|m| m.position.clone()).collect(),
        weights: masses.masses().iter().map(|m| m.weight.clone()).collect(),
        p,
        q: df,
        node_values,
    }
}

/// Zeros of `P`: simple and positive.
pub fn edge_spectrum(ec: &EdgeCharacteristic) -> Result<Vec<RealRoot>> {
    if ec.p.is_constant() {
        return Ok(Vec::new());
    }
    if !ec.p.is_squarefree() {
        return Err(Error::invariant("edge characteristic polynomial has a multiple root"));
    }
    let group = RootGroup::new(&ec.p).ok_or_else(|| Error::invariant("edge spectrum is not real"))?;
    if group.min_root().cmp_rational(&Q::zero()) != Ordering::Greater {
        return Err(Error::invariant("edge spectrum is not positive"));
    }
    Ok(group.roots().to_vec())
}

/// A continuous function on one edge, linear between breakpoints.
#[derive(Clone, Debug)]
pub struct PiecewiseLinearFn {
    pub breakpoints: Vec<Q>,
    pub values: Vec<AlgebraicValue>,
}

impl PiecewiseLinearFn {
    pub fn slopes(&self) -> Vec<AlgebraicValue> {
        self.breakpoints
            .windows(2)
            .zip(self.values.windows(2))
            .map(|(x, v)| v[1].sub(&v[0]).scale(&(Q::one() / (&x[1] - &x[0]))))
            .collect()
    }

    /// `int |f'|^2`
    pub fn h1_norm_sq(&self) -> AlgebraicValue {
        self.slopes()
            .iter()
            .zip(self.breakpoints.windows(2))
            .map(|(s, x)| s.mul(s).scale(&(&x[1] - &x[0])))
            .fold(AlgebraicValue::rational(Q::zero()), |a, b| a.add(&b))
    }

    /// Value at `x`, by linear interpolation.
    pub fn eval(&self, x: &Q) -> Option<AlgebraicValue> {
        let k = self.breakpoints.windows(2).position(|w| w[0] <= *x && *x <= w[1])?;
        let (a, b) = (&self.breakpoints[k], &self.breakpoints[k + 1]);
        let t = (x - a) / (b - a);
        Some(self.values[k].add(&self.values[k + 1].sub(&self.values[k]).scale(&t)))
    }
}

#[derive(Clone, Debug)]
pub struct EdgeEigenfunction {
    pub mu: RealRoot,
    pub phi: PiecewiseLinearFn,
    pub h1_norm_sq: AlgebraicValue,
    pub omega_norm_sq: AlgebraicValue,
}

/// `phi_e(mu, .)` for an eigenvalue `mu` of the edge problem, with its norms.
pub fn edge_eigenfunction(ec: &EdgeCharacteristic, mu: &RealRoot) -> Result<EdgeEigenfunction> {
    if !mu.is_root_of(&ec.p) {
        return Err(Error::invalid(format!("{} is not an eigenvalue of the edge", mu.to_decimal(12))));
    }
    let m = mu.poly();
    let values = ec.breakpoint_values().iter().map(|v| AlgebraicValue::new(mu.clone(), v)).collect();
    let phi = PiecewiseLinearFn { breakpoints: ec.breakpoints(), values };
    let h1_norm_sq = AlgebraicValue::new(mu.clone(), &ec.h1_expr(m));
    let omega_norm_sq = AlgebraicValue::new(mu.clone(), &ec.omega_expr(m));
    Ok(EdgeEigenfunction { mu: mu.clone(), phi, h1_norm_sq, omega_norm_sq })
}

/// Characteristic function `W` with its eigenvalue groups.
#[derive(Clone, Debug)]
pub struct GraphCharacteristic {
    pub w: Poly,
    /// Eigenvalue groups of `W` and of every `P_e`; `kappa` is the multiplicity in `W`.
    pub basis: SpectralBasis,
}

impl GraphCharacteristic {
    /// `(lambda, kappa_lambda, E_lambda)`, increasing.
    pub fn spectrum(&self) -> Vec<(RealRoot, usize, Vec<usize>)> {
        let mut out: Vec<_> = self
            .basis
            .factors
            .iter()
            .filter(|f| f.in_sigma())
            .flat_map(|f| f.group.roots().iter().map(move |r| (r.clone(), f.kappa, f.edges.clone())))
            .collect();
        out.sort_by(|a, b| a.0.cmp_value(&b.0));
        out
    }
}

/// All forward quantities of one measure.
#[derive(Clone, Debug)]
pub struct Forward {
    pub measure: GraphMeasure,
    pub edges: Vec<EdgeCharacteristic>,
    pub characteristic: GraphCharacteristic,
    harmonic: Q,
}

/// `W = -L [w_c z prod P_e + sum_e Q_e prod_{d != e} P_d]`
fn assemble_w(measure: &GraphMeasure, edges: &[EdgeCharacteristic], big_l: &Q) -> Poly {
    let n = edges.len();
    // prefix/suffix products avoid the quadratic number of multiplications
    let mut prefix = vec![Poly::one(); n + 1];
    for e in 0..n {
        prefix[e + 1] = &prefix[e] * &edges[e].p;
    }
    let mut suffix = vec![Poly::one(); n + 1];
    for e in (0..n).rev() {
        suffix[e] = &suffix[e + 1] * &edges[e].p;
    }
    let mut acc = (&Poly::z() * &prefix[n]).scale(measure.central_mass());
    for e in 0..n {
        acc = &acc + &(&(&prefix[e] * &suffix[e + 1]) * &edges[e].q);
    }
    acc.scale(&-big_l.clone())
}

/// Eigenvalue groups with exact memberships and multiplicities; checks the
/// multiplicity rule and attaches coupling ratios.
fn build_basis(measure: &GraphMeasure, edges: &[EdgeCharacteristic], w: &Poly) -> Result<SpectralBasis> {
    for ec in edges {
        if !ec.p.is_constant() && !ec.p.is_squarefree() {
            return Err(Error::invariant("edge characteristic polynomial has a multiple root"));
        }
    }
    let yun = w.squarefree_decomposition();
    let mut inputs: Vec<Poly> = edges.iter().map(|ec| ec.p.clone()).collect();
    inputs.extend(yun.iter().map(|(_, s)| s.clone()));
    let basis = gcd_free_basis(&inputs);
    let factors: Vec<Result<BasisFactor>> = basis
        .par_iter()
        .map(|b| {
            let group = RootGroup::new(b).ok_or_else(|| Error::invariant("non-real eigenvalues"))?;
            let members: Vec<usize> = (0..edges.len()).filter(|&e| b.divides(&edges[e].p)).collect();
            let kappa = yun.iter().find(|(_, s)| b.divides(s)).map(|(k, _)| *k).unwrap_or(0);
            let predicted = match members.len() {
                0 => 1,
                k => k - 1,
            };
            if kappa != predicted {
                return Err(Error::invariant(format!(
                    "eigenvalue {} has multiplicity {kappa} in W, but {} edge spectra contain it",
                    group.min_root().to_decimal(12),
                    members.len()
                )));
            }
            if group.min_root().cmp_rational(&Q::zero()) != Ordering::Greater {
                return Err(Error::invariant("non-positive eigenvalue"));
            }
            let coupling = (kappa > 0 && !members.is_empty()).then(|| coupling_ratio_exprs(edges, &members, b));
            Ok(BasisFactor { group, edges: members, kappa, coupling: coupling.transpose()? })
        })
        .collect();
    let mut factors = factors.into_iter().collect::<Result<Vec<_>>>()?;
    factors.sort_by(|a, b| a.group.min_root().cmp_value(b.group.min_root()));
    Ok(SpectralBasis { graph: measure.graph().clone(), factors })
}

/// `a_e = ||phi_e||^2 / Pdot_e^2` modulo `m`.
fn coupling_weight_expr(ec: &EdgeCharacteristic, m: &Poly) -> Result<Poly> {
    let dp = ec.p.derivative().rem(m);
    let inv = (&dp * &dp).rem(m).inverse_mod(m).ok_or_else(|| Error::invariant("multiple edge eigenvalue"))?;
    Ok((&ec.h1_expr(m) * &inv).rem(m))
}

/// Ratios `Gamma_{e0, d} = a_{e0} / a_d` for the edges sharing the roots of `m`.
fn coupling_ratio_exprs(edges: &[EdgeCharacteristic], members: &[usize], m: &Poly) -> Result<Vec<Poly>> {
    let weights = members.iter().map(|&e| coupling_weight_expr(&edges[e], m)).collect::<Result<Vec<_>>>()?;
    weights
        .iter()
        .map(|a| {
            let inv = a.inverse_mod(m).ok_or_else(|| Error::invariant("vanishing eigenfunction norm"))?;
            Ok((&weights[0] * &inv).rem(m))
        })
        .collect()
}

impl Forward {
    pub fn new(measure: &GraphMeasure) -> Result<Forward> {
        let graph = measure.graph();
        let edges: Vec<EdgeCharacteristic> = (0..graph.len())
            .into_par_iter()
            .map(|e| edge_transfer(graph.length(e), measure.edge(e)))
            .collect();
        let harmonic = graph.harmonic_length();
        let w = assemble_w(measure, &edges, &harmonic);
        if w.coeff(0) != Q::one() {
            return Err(Error::invariant("W(0) != 1"));
        }
        let basis = build_basis(measure, &edges, &w)?;
        Ok(Forward { measure: measure.clone(), edges, characteristic: GraphCharacteristic { w, basis }, harmonic })
    }

    pub fn basis(&self) -> &SpectralBasis {
        &self.characteristic.basis
    }

    pub fn w(&self) -> &Poly {
        &self.characteristic.w
    }

    pub fn harmonic_length(&self) -> &Q {
        &self.harmonic
    }

    /// `(lambda, kappa)`, increasing.
    pub fn spectrum(&self) -> Vec<(RealRoot, usize)> {
        self.characteristic.spectrum().into_iter().map(|(r, k, _)| (r, k)).collect()
    }

    pub fn edge_spectrum(&self, e: usize) -> Vec<RealRoot> {
        self.basis().sigma_edge(e)
    }

    pub fn eigenvalue_count(&self) -> usize {
        self.basis().total_multiplicity()
    }

    /// `G = L prod P_e / W` in factored, reduced form.
    pub fn green_factored(&self) -> Factored {
        Factored::new(
            self.harmonic.clone(),
            self.basis()
                .factors
                .iter()
                .map(|f| (f.group.clone(), f.edges.len() as i64 - f.kappa as i64))
                .collect(),
        )
    }

    /// Coupling matrix of a graph eigenvalue shared by edge spectra.
    pub fn coupling_matrix(&self, lambda: &RealRoot) -> Result<CouplingMatrix> {
        let (fi, j) = self
            .basis()
            .factor_containing(lambda)
            .ok_or_else(|| Error::invalid("not an eigenvalue"))?;
        let f = &self.basis().factors[fi];
        let ratios = match (&f.coupling, f.in_sigma()) {
            (Some(r), true) => r,
            _ => return Err(Error::invalid("coupling matrices exist only for shared eigenvalues")),
        };
        let root = f.group.roots()[j].clone();
        let vals = f.edges.iter().zip(ratios).map(|(&d, x)| (d, AlgebraicValue::new(root.clone(), x))).collect();
        CouplingMatrix::from_ratios(root, f.edges[0], vals).map_err(|v| Error::invariant(v.to_string()))
    }

    pub fn coupling_matrices(&self) -> Vec<CouplingMatrix> {
        self.basis().to_data().coupling
    }

    pub fn export(&self) -> SpectralData {
        self.basis().to_data()
    }

    pub fn trace_checks(&self) -> TraceReport {
        let edges = (0..self.edges.len())
            .map(|e| (self.measure.edge_trace_integral(e), self.basis().edge_trace(e)))
            .collect();
        TraceReport { edges, graph: (self.measure.trace_integral(), self.basis().trace()) }
    }

    /// Checks every identity that must hold for a valid measure.
    pub fn invariants(&self) -> InvariantReport {
        let mut rep = InvariantReport::default();
        let basis = self.basis();
        let g = self.green_factored();
        let neg_inv = g.neg_recip();
        rep.green_herglotz = g.herglotz();
        rep.neg_inv_green_herglotz = neg_inv.herglotz();
        rep.count = (self.eigenvalue_count(), self.measure.atom_count());
        rep.w_at_zero = self.w().coeff(0) == Q::one();
        let sigma = basis.sigma();
        rep.smallest_eigenvalue = (0..self.edges.len()).all(|e| match self.edge_spectrum(e).first() {
            None => true,
            Some(m) => sigma.first().is_some_and(|s| s.cmp_value(m) == Ordering::Less),
        });
        for f in basis.factors.iter() {
            let m = f.group.poly();
            for &e in &f.edges {
                let ec = &self.edges[e];
                let dp = ec.p.derivative().rem(m);
                let q = ec.q.rem(m);
                let h1 = ec.h1_expr(m);
                let om = ec.omega_expr(m);
                // -Pdot(mu) Q(mu) = ||phi||_w^2
                rep.dot_phi &= (&(&dp * &q) + &om).rem(m).is_zero();
                // ||phi'||^2 = mu ||phi||_w^2
                rep.h1_vs_omega &= (&h1 - &(&Poly::z() * &om)).rem(m).is_zero();
                rep.checked_edge_eigenvalues += f.group.degree();
            }
            if !f.edges.is_empty() {
                // residue of -1/G at these eigenvalues
                let idx = neg_inv.index_of(m).expect("pole of -1/G");
                let res = match neg_inv.residue_expr(idx) {
                    Ok(r) => r,
                    Err(_) => {
                        rep.residue_bookkeeping = false;
                        continue;
                    }
                };
                let mut direct = Poly::zero();
                let mut via_norms = Poly::zero();
                for &e in &f.edges {
                    let ec = &self.edges[e];
                    let dp = ec.p.derivative().rem(m);
                    let inv_dp = dp.inverse_mod(m).expect("simple root");
                    direct = &direct + &(&ec.q * &inv_dp).rem(m);
                    let inv_z = Poly::z().inverse_mod(m).expect("nonzero eigenvalue");
                    let term = (&(&ec.h1_expr(m) * &(&inv_dp * &inv_dp)) * &inv_z).rem(m);
                    via_norms = &via_norms - &term;
                }
                rep.residue_bookkeeping &= (&direct - &via_norms).rem(m).is_zero() && (&direct - &res).rem(m).is_zero();
                if f.is_shared() {
                    for (i, &e) in f.edges.iter().enumerate() {
                        let ec = &self.edges[e];
                        let inv_dp = ec.p.derivative().rem(m).inverse_mod(m).expect("simple root");
                        let s = f.coupling_sum_expr(i).expect("coupling present");
                        let lhs = (&(&ec.q * &inv_dp) * &s).rem(m);
                        rep.residue_coupling &= (&lhs - &res).rem(m).is_zero();
                    }
                }
            }
        }
        for c in self.coupling_matrices() {
            rep.row_sum_identity &= c.row_sum_identity().as_rational() == Some(Q::one());
            rep.coupling_matrices += 1;
        }
        rep.traces = self.trace_checks();
        rep
    }
}

/// Trace integrals against the corresponding eigenvalue sums.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct TraceReport {
    /// `(int x(1 - x/l_e) dw_e, sum 1/mu)` per edge.
    pub edges: Vec<(Q, Q)>,
    /// `(int T dw, sum kappa/lambda)`
    pub graph: (Q, Q),
}

impl TraceReport {
    pub fn holds(&self) -> bool {
        self.graph.0 == self.graph.1 && self.edges.iter().all(|(a, b)| a == b)
    }
}

#[derive(Clone, Debug)]
pub struct InvariantReport {
    pub w_at_zero: bool,
    /// `(sum kappa, number of atoms)`
    pub count: (usize, usize),
    pub green_herglotz: HerglotzCertificate,
    pub neg_inv_green_herglotz: HerglotzCertificate,
    pub smallest_eigenvalue: bool,
    pub dot_phi: bool,
    pub h1_vs_omega: bool,
    pub residue_bookkeeping: bool,
    pub residue_coupling: bool,
    pub row_sum_identity: bool,
    pub traces: TraceReport,
    pub checked_edge_eigenvalues: usize,
    pub coupling_matrices: usize,
}

impl Default for InvariantReport {
    fn default() -> Self {
        let empty = HerglotzCertificate { is_herglotz: true, reason: None, sequence: Vec::new() };
        InvariantReport {
            w_at_zero: true,
            count: (0, 0),
            green_herglotz: empty.clone(),
            neg_inv_green_herglotz: empty,
            smallest_eigenvalue: true,
            dot_phi: true,
            h1_vs_omega: true,
            residue_bookkeeping: true,
            residue_coupling: true,
            row_sum_identity: true,
            traces: TraceReport::default(),
            checked_edge_eigenvalues: 0,
            coupling_matrices: 0,
        }
    }
}

impl InvariantReport {
    /// Names of the identities that failed.
    /// Every check with its verdict, in a fixed order.
    pub fn verdicts(&self) -> Vec<(&'static str, bool)> {
        vec![
            ("w-at-zero", self.w_at_zero),
            ("eigenvalue-count", self.count.0 == self.count.1),
            ("green-herglotz", self.green_herglotz.is_herglotz),
            ("neg-inverse-green-herglotz", self.neg_inv_green_herglotz.is_herglotz),
            ("smallest-eigenvalue", self.smallest_eigenvalue),
            ("norm-derivative-identity", self.dot_phi),
            ("energy-identity", self.h1_vs_omega),
            ("residue-bookkeeping", self.residue_bookkeeping),
            ("residue-coupling", self.residue_coupling),
            ("row-sum-identity", self.row_sum_identity),
            ("trace", self.traces.holds()),
        ]
    }

    pub fn failures(&self) -> Vec<&'static str> {
        self.verdicts().into_iter().filter(|v| !v.1).map(|v| v.0).collect()
    }

    pub fn holds(&self) -> bool {
        self.failures().is_empty()
    }
}

/// Edge characteristics of every edge, in graph order.
pub fn edge_characteristics(measure: &GraphMeasure) -> Vec<EdgeCharacteristic> {
    let g = measure.graph();
    (0..g.len()).map(|e| edge_transfer(g.length(e), measure.edge(e))).collect()
}

/// The characteristic function `W` with its spectrum and multiplicities.
pub fn wronskian(measure: &GraphMeasure) -> Result<GraphCharacteristic> {
    Ok(Forward::new(measure)?.characteristic)
}

/// `G = L prod P_e / W`, reduced; checked to be Herglotz and to have its smallest
/// pole below every edge eigenvalue.
pub fn greens_function(measure: &GraphMeasure) -> Result<RatFun> {
    let fw = Forward::new(measure)?;
    let g = fw.green_factored();
    let cert = g.herglotz();
    if !cert.is_herglotz {
        return Err(Error::invariant(format!("G is not Herglotz: {}", cert.reason.unwrap_or_default())));
    }
    if !fw.invariants().smallest_eigenvalue {
        return Err(Error::invariant("smallest graph eigenvalue is not below every edge eigenvalue"));
    }
    Ok(g.expand())
}

pub fn coupling_matrices(measure: &GraphMeasure) -> Result<Vec<CouplingMatrix>> {
    Ok(Forward::new(measure)?.coupling_matrices())
}

pub fn trace_checks(measure: &GraphMeasure) -> Result<TraceReport> {
    let rep = Forward::new(measure)?.trace_checks();
    if !rep.holds() {
        return Err(Error::invariant("trace identity violated"));
    }
    Ok(rep)
}

pub fn export_spectral_data(measure: &GraphMeasure) -> Result<SpectralData> {
    Ok(Forward::new(measure)?.export())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{PointMass, StarGraph};
    use crate::number::{frac, q};

    fn star3() -> StarGraph {
        StarGraph::with_lengths(&[q(1), q(1), q(1)]).unwrap()
    }

    fn single_mass() -> GraphMeasure {
        GraphMeasure::from_masses(star3(), q(0), vec![vec![(frac(1, 2), q(1))], vec![], vec![]]).unwrap()
    }

    fn symmetric() -> GraphMeasure {
        GraphMeasure::from_masses(star3(), q(0), vec![vec![(frac(1, 2), q(1))]; 3]).unwrap()
    }

    fn lin(r: i64) -> Poly {
        Poly::new(vec![q(1), frac(-1, r)])
    }

    #[test]
    fn transfer_examples() {
        let bare = edge_transfer(&q(1), &EdgeMeasure::empty());
        assert_eq!((bare.p, bare.q), (Poly::one(), Poly::constant(q(-1))));
        let one = EdgeMeasure::new(vec![PointMass::new(frac(1, 2), q(1))], &q(1)).unwrap();
        let ec = edge_transfer(&q(1), &one);
        assert_eq!(ec.p, lin(4));
        assert_eq!(ec.q, Poly::new(vec![q(-1), frac(1, 2)]));
        // symbolic single mass: P = 1 - z m x0 (1 - x0), Q = -1 + z m (1 - x0)
        let (m, x0) = (frac(7, 3), frac(2, 5));
        let em = EdgeMeasure::new(vec![PointMass::new(x0.clone(), m.clone())], &q(1)).unwrap();
        let ec = edge_transfer(&q(1), &em);
        assert_eq!(ec.p, Poly::new(vec![q(1), -(&m * &x0 * (q(1) - &x0))]));
        assert_eq!(ec.q, Poly::new(vec![q(-1), &m * (q(1) - &x0)]));
    }

    #[test]
    fn eigenfunction_of_single_mass() {
        let one = EdgeMeasure::new(vec![PointMass::new(frac(1, 2), q(1))], &q(1)).unwrap();
        let ec = edge_transfer(&q(1), &one);
        let spec = edge_spectrum(&ec).unwrap();
        assert_eq!(spec.len(), 1);
        assert_eq!(spec[0].as_rational(), Some(q(4)));
        let ef = edge_eigenfunction(&ec, &spec[0]).unwrap();
        let vals: Vec<Q> = ef.phi.values.iter().map(|v| v.as_rational().unwrap()).collect();
        assert_eq!(vals, vec![q(0), frac(1, 2), q(0)]);
        assert_eq!(ef.h1_norm_sq.as_rational(), Some(q(1)));
        assert_eq!(ef.omega_norm_sq.as_rational(), Some(frac(1, 4)));
        assert_eq!(ef.phi.h1_norm_sq().as_rational(), Some(q(1)));
        assert!(edge_eigenfunction(&ec, &RealRoot::rational(q(3))).is_err());
    }

    #[test]
    fn two_mass_edge_spectrum_is_simple_and_positive() {
        let em = EdgeMeasure::new(
            vec![PointMass::new(frac(1, 3), q(1)), PointMass::new(frac(2, 3), q(1))],
            &q(1),
        )
        .unwrap();
        let ec = edge_transfer(&q(1), &em);
        let spec = edge_spectrum(&ec).unwrap();
        // tridiagonal 3*[[2,-1],[-1,2]] with unit masses: eigenvalues 3 and 9
        let got: Vec<Q> = spec.iter().map(|r| r.as_rational().unwrap()).collect();
        assert_eq!(got, vec![q(3), q(9)]);
    }

    #[test]
    fn characteristic_function_examples() {
        let empty = GraphMeasure::empty(star3());
        let w = wronskian(&empty).unwrap();
        assert_eq!(w.w, Poly::one());
        assert!(w.spectrum().is_empty());

        let w = wronskian(&single_mass()).unwrap();
        assert_eq!(w.w, lin(3));
        let s = w.spectrum();
        assert_eq!(s.len(), 1);
        assert_eq!((s[0].0.as_rational(), s[0].1), (Some(q(3)), 1));

        let w = wronskian(&symmetric()).unwrap();
        assert_eq!(w.w, &(&lin(2) * &lin(4)) * &lin(4));
        let s = w.spectrum();
        assert_eq!((s[0].0.as_rational(), s[0].1), (Some(q(2)), 1));
        assert_eq!((s[1].0.as_rational(), s[1].1, s[1].2.clone()), (Some(q(4)), 2, vec![0, 1, 2]));

        let central = GraphMeasure::from_masses(star3(), q(1), vec![vec![], vec![], vec![]]).unwrap();
        assert_eq!(wronskian(&central).unwrap().w, lin(3));
    }

    #[test]
    fn greens_function_examples() {
        let g = greens_function(&symmetric()).unwrap();
        assert_eq!(g, RatFun::new(lin(4).scale(&frac(1, 3)), lin(2)).unwrap());
        assert_eq!(greens_function(&GraphMeasure::empty(star3())).unwrap(), RatFun::constant(frac(1, 3)));
        let g = greens_function(&single_mass()).unwrap();
        assert_eq!(g, RatFun::new(lin(4).scale(&frac(1, 3)), lin(3)).unwrap());
    }

    #[test]
    fn coupling_of_symmetric_star() {
        let fw = Forward::new(&symmetric()).unwrap();
        let c = fw.coupling_matrix(&RealRoot::rational(q(4))).unwrap();
        assert!(c.full().iter().flatten().all(|x| x.as_rational() == Some(q(1))));
        assert_eq!(c.row_sum_identity().as_rational(), Some(q(1)));
        assert!(fw.coupling_matrix(&RealRoot::rational(q(2))).is_err());
        assert!(Forward::new(&single_mass()).unwrap().coupling_matrices().is_empty());
    }

    #[test]
    fn traces() {
        let rep = trace_checks(&single_mass()).unwrap();
        assert_eq!(rep.graph, (frac(1, 3), frac(1, 3)));
        assert_eq!(rep.edges[0], (frac(1, 4), frac(1, 4)));
        let rep = trace_checks(&GraphMeasure::empty(star3())).unwrap();
        assert_eq!(rep.graph, (q(0), q(0)));
    }

    #[test]
    fn export_examples() {
        let d = export_spectral_data(&symmetric()).unwrap();
        let sigma: Vec<Q> = d.sigma.iter().map(|r| r.as_rational().unwrap()).collect();
        assert_eq!(sigma, vec![q(2), q(4)]);
        assert_eq!(d.kappa(&d.sigma[1]), 2);
        assert!(d.sigma_e.iter().all(|s| s.len() == 1 && s[0].as_rational() == Some(q(4))));
        assert_eq!(d.coupling.len(), 1);

        let d = export_spectral_data(&single_mass()).unwrap();
        assert_eq!(d.sigma.len(), 1);
        assert_eq!(d.sigma_e[0][0].as_rational(), Some(q(4)));
        assert!(d.sigma_e[1].is_empty() && d.coupling.is_empty());

        let d = export_spectral_data(&GraphMeasure::empty(star3())).unwrap();
        assert!(d.sigma.is_empty() && d.sigma_e.iter().all(Vec::is_empty));
    }

    #[test]
    fn invariants_hold_on_examples() {
        for m in [single_mass(), symmetric(), GraphMeasure::empty(star3())] {
            let rep = Forward::new(&m).unwrap().invariants();
            assert!(rep.holds(), "{:?}", rep.failures());
        }
    }

    #[test]
    fn irrational_shared_spectrum() {
        // two identical two-mass edges give shared irrational eigenvalues
        let ms = vec![(frac(1, 4), q(1)), (frac(1, 2), q(2))];
        let g = StarGraph::with_lengths(&[q(1), q(1), frac(3, 2)]).unwrap();
        let m = GraphMeasure::from_masses(g, frac(1, 2), vec![ms.clone(), ms, vec![(frac(1, 3), q(1))]]).unwrap();
        let fw = Forward::new(&m).unwrap();
        let rep = fw.invariants();
        assert!(rep.holds(), "{:?}", rep.failures());
        assert_eq!(fw.eigenvalue_count(), 6);
        assert!(rep.coupling_matrices >= 2);
    }

    #[test]
    fn reproducing_property_of_y() {
        // sum_e int h' Y' = h(c) for h piecewise linear, zero at the outer ends
        let g = StarGraph::with_lengths(&[q(1), q(2), frac(1, 2)]).unwrap();
        let big_l = g.harmonic_length();
        let hc = frac(3, 7);
        let mut total = Q::zero();
        for e in 0..3 {
            let l = g.length(e).clone();
            let xs = [q(0), &l / q(3), &l * frac(3, 4), l.clone()];
            let hs = [hc.clone(), frac(5, 2), frac(-1, 3), q(0)];
            let dy = -&big_l / &l;
            for k in 0..3 {
                let slope = (&hs[k + 1] - &hs[k]) / (&xs[k + 1] - &xs[k]);
                total += slope * &dy * (&xs[k + 1] - &xs[k]);
            }
        }
        assert_eq!(total, hc);
    }
}
