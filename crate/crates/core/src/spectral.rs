//! Spectral data of a star graph and its canonical factored form.
//!
//! [`SpectralData`] is the user-facing bundle (graph spectrum, edge spectra,
//! coupling matrices). [`SpectralBasis`] regroups all eigenvalues over pairwise
//! coprime defining polynomials, so that conjugate irrational eigenvalues are
//! processed together by arithmetic modulo one polynomial and every derived
//! polynomial (`V`, `P_e`) has rational coefficients.

use std::collections::BTreeMap;
use std::fmt;

use num::{One, Zero};

use crate::graph::StarGraph;
use crate::number::Q;
use crate::poly::{gcd_free_basis, Poly};
use crate::ratfun::{Factored, HerglotzCertificate};
use crate::roots::{AlgebraicValue, RealRoot, RootGroup};

/// A failed hypothesis of the inverse problem.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Violation {
    NonPositive { set: String, value: String },
    Repeated { set: String, value: String },
    UnknownEdge { id: String },
    KappaZero { lambda: String },
    KappaMismatch { lambda: String, declared: usize, derived: usize },
    MissingCoupling { lambda: String },
    UnexpectedCoupling { lambda: String },
    CouplingIndexSet { lambda: String, expected: Vec<String>, found: Vec<String> },
    CouplingNotPositive { lambda: String },
    CouplingDiagonal { lambda: String },
    CouplingNotMultiplicative { lambda: String },
    NotHerglotz { reason: String },
    SmallestEigenvalue { edge: String, sigma_min: String, edge_min: String },
    IncompleteConjugates { value: String },
    NonUniformConjugates { value: String },
}

impl Violation {
    /// Short name of the failed hypothesis.
    pub fn code(&self) -> &'static str {
        match self {
            Violation::NonPositive { .. } => "non-positive",
            Violation::Repeated { .. } => "repeated",
            Violation::UnknownEdge { .. } => "unknown-edge",
            Violation::KappaZero { .. } => "kappa-zero",
            Violation::KappaMismatch { .. } => "kappa-mismatch",
            Violation::MissingCoupling { .. } => "missing-coupling",
            Violation::UnexpectedCoupling { .. } => "unexpected-coupling",
            Violation::CouplingIndexSet { .. } => "coupling-index-set",
            Violation::CouplingNotPositive { .. } => "coupling-not-positive",
            Violation::CouplingDiagonal { .. } => "coupling-diagonal",
            Violation::CouplingNotMultiplicative { .. } => "coupling-not-multiplicative",
            Violation::NotHerglotz { .. } => "not-herglotz",
            Violation::SmallestEigenvalue { .. } => "smallest-eigenvalue",
            Violation::IncompleteConjugates { .. } => "incomplete-conjugates",
            Violation::NonUniformConjugates { .. } => "non-uniform-conjugates",
        }
    }
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::NonPositive { set, value } => write!(f, "{set} contains non-positive value {value}"),
            Violation::Repeated { set, value } => write!(f, "{set} contains {value} more than once"),
            Violation::UnknownEdge { id } => write!(f, "unknown edge {id}"),
            Violation::KappaZero { lambda } => {
                write!(f, "kappa_{lambda} = 0: {lambda} is in sigma but in exactly one edge spectrum")
            }
            Violation::KappaMismatch { lambda, declared, derived } => {
                write!(f, "kappa_{lambda} declared {declared}, derived {derived}")
            }
            Violation::MissingCoupling { lambda } => write!(f, "no coupling matrix for shared eigenvalue {lambda}"),
            Violation::UnexpectedCoupling { lambda } => {
                write!(f, "coupling matrix given for {lambda}, which is not a shared eigenvalue")
            }
            Violation::CouplingIndexSet { lambda, expected, found } => write!(
                f,
                "coupling matrix for {lambda} indexed by [{}], expected [{}]",
                found.join(", "),
                expected.join(", ")
            ),
            Violation::CouplingNotPositive { lambda } => write!(f, "coupling matrix for {lambda} has a non-positive entry"),
            Violation::CouplingDiagonal { lambda } => write!(f, "coupling matrix for {lambda} has a diagonal entry other than 1"),
            Violation::CouplingNotMultiplicative { lambda } => {
                write!(f, "coupling matrix for {lambda} violates r_ed = r_eb r_bd")
            }
            Violation::NotHerglotz { reason } => {
                write!(f, "product of edge and graph characteristic functions is not Herglotz: {reason}")
            }
            Violation::SmallestEigenvalue { edge, sigma_min, edge_min } => write!(
                f,
                "smallest eigenvalue {sigma_min} is not below the smallest eigenvalue {edge_min} of edge {edge}"
            ),
            Violation::IncompleteConjugates { value } => {
                write!(f, "{value} is irrational but not all of its conjugates are listed")
            }
            Violation::NonUniformConjugates { value } => {
                write!(f, "conjugates of {value} are treated inconsistently")
            }
        }
    }
}

fn show(r: &RealRoot) -> String {
    r.to_decimal(12)
}

/// Coupling matrix `Gamma_lambda` over the edges sharing `lambda`, stored as the
/// ratios `r_{ref,d}` relative to a reference edge; `r_ed = r_{ref,d} / r_{ref,e}`.
#[derive(Clone, Debug)]
pub struct CouplingMatrix {
    lambda: RealRoot,
    edges: Vec<usize>,
    reference: usize,
    ratios: Vec<AlgebraicValue>,
}

impl CouplingMatrix {
    /// From the ratios of the reference row; the reference itself may be listed with value 1.
    pub fn from_ratios(
        lambda: RealRoot,
        reference: usize,
        ratios: Vec<(usize, AlgebraicValue)>,
    ) -> Result<CouplingMatrix, Violation> {
        let mut map: BTreeMap<usize, AlgebraicValue> = BTreeMap::new();
        for (d, r) in ratios {
            if !r.is_positive() {
                return Err(Violation::CouplingNotPositive { lambda: show(&lambda) });
            }
            if d == reference && r.as_rational() != Some(Q::one()) {
                return Err(Violation::CouplingDiagonal { lambda: show(&lambda) });
            }
            map.insert(d, r);
        }
        map.insert(reference, AlgebraicValue::rational(Q::one()));
        let (edges, ratios) = map.into_iter().unzip();
        Ok(CouplingMatrix { lambda, edges, reference, ratios })
    }

    /// From weights `a_e`, with `Gamma_ed = a_e / a_d`; the first edge is the reference.
    pub fn from_weights(lambda: RealRoot, weights: Vec<(usize, AlgebraicValue)>) -> CouplingMatrix {
        let mut weights = weights;
        weights.sort_by_key(|w| w.0);
        let reference = weights[0].0;
        let a0 = weights[0].1.clone();
        let (edges, ratios) = weights
            .into_iter()
            .map(|(d, a)| (d, a0.div(&a).expect("positive weight")))
            .unzip();
        CouplingMatrix { lambda, edges, reference, ratios }
    }

    /// From a full square matrix over `edges`, checked for membership in the
    /// multiplicative class: unit diagonal, positive entries, `r_ed = r_eb r_bd`.
    pub fn from_full(
        lambda: RealRoot,
        edges: Vec<usize>,
        matrix: Vec<Vec<AlgebraicValue>>,
    ) -> Result<CouplingMatrix, Violation> {
        let n = edges.len();
        let lam = show(&lambda);
        if matrix.len() != n || matrix.iter().any(|row| row.len() != n) {
            return Err(Violation::CouplingIndexSet {
                lambda: lam,
                expected: edges.iter().map(|e| e.to_string()).collect(),
                found: vec![format!("{}x? matrix", matrix.len())],
            });
        }
        for i in 0..n {
            if matrix[i][i].as_rational() != Some(Q::one()) && !matrix[i][i].same_value(&AlgebraicValue::rational(Q::one())) {
                return Err(Violation::CouplingDiagonal { lambda: lam });
            }
            for j in 0..n {
                if !matrix[i][j].is_positive() {
                    return Err(Violation::CouplingNotPositive { lambda: lam });
                }
            }
        }
        for i in 0..n {
            for j in 0..n {
                for b in 0..n {
                    if !matrix[i][j].same_value(&matrix[i][b].mul(&matrix[b][j])) {
                        return Err(Violation::CouplingNotMultiplicative { lambda: lam });
                    }
                }
            }
        }
        let mut order: Vec<usize> = (0..n).collect();
        order.sort_by_key(|&i| edges[i]);
        let reference = edges[order[0]];
        let ratios = order.iter().map(|&j| matrix[order[0]][j].clone()).collect();
        let edges = order.iter().map(|&i| edges[i]).collect();
        Ok(CouplingMatrix { lambda, edges, reference, ratios })
    }

    pub fn lambda(&self) -> &RealRoot {
        &self.lambda
    }

    /// Edge indices `E_lambda`, increasing.
    pub fn edges(&self) -> &[usize] {
        &self.edges
    }

    pub fn reference(&self) -> usize {
        self.reference
    }

    /// `r_{ref,d}` for every `d` in [`edges`](Self::edges).
    pub fn ratios(&self) -> &[AlgebraicValue] {
        &self.ratios
    }

    fn pos(&self, e: usize) -> usize {
        self.edges.iter().position(|&d| d == e).expect("edge in index set")
    }

    /// `r_ed` for edge indices `e, d` in the index set.
    pub fn entry(&self, e: usize, d: usize) -> AlgebraicValue {
        let (i, j) = (self.pos(e), self.pos(d));
        self.ratios[j].div(&self.ratios[i]).expect("positive ratio")
    }

    pub fn full(&self) -> Vec<Vec<AlgebraicValue>> {
        self.edges.iter().map(|&e| self.edges.iter().map(|&d| self.entry(e, d)).collect()).collect()
    }

    /// `sum_d r_de`
    pub fn column_sum(&self, e: usize) -> AlgebraicValue {
        self.edges
            .iter()
            .map(|&d| self.entry(d, e))
            .reduce(|a, b| a.add(&b))
            .expect("nonempty")
    }

    /// `sum_e (sum_d r_de)^-1`, which equals 1 for every matrix of the class.
    pub fn row_sum_identity(&self) -> AlgebraicValue {
        self.edges
            .iter()
            .map(|&e| self.column_sum(e).inverse().expect("positive"))
            .reduce(|a, b| a.add(&b))
            .expect("nonempty")
    }

    /// Multiplies the ratio of `d` by `factor` (the result stays in the class).
    pub fn scaled(&self, d: usize, factor: &Q) -> CouplingMatrix {
        let mut out = self.clone();
        let j = out.pos(d);
        out.ratios[j] = out.ratios[j].scale(factor);
        if d == out.reference {
            let inv = out.ratios[j].inverse().expect("positive");
            out.ratios = out.ratios.iter().map(|r| r.mul(&inv)).collect();
        }
        out
    }
}

/// Graph spectrum, edge spectra and coupling matrices.
#[derive(Clone, Debug)]
pub struct SpectralData {
    pub graph: StarGraph,
    /// Distinct eigenvalues of the graph problem, increasing.
    pub sigma: Vec<RealRoot>,
    /// Eigenvalues of each edge problem (Dirichlet at the center), increasing, in graph edge order.
    pub sigma_e: Vec<Vec<RealRoot>>,
    pub coupling: Vec<CouplingMatrix>,
    /// Multiplicities stated by the producer, checked against the derived ones.
    pub declared_kappa: Vec<(RealRoot, usize)>,
}

impl SpectralData {
    pub fn empty(graph: StarGraph) -> SpectralData {
        let n = graph.len();
        SpectralData { graph, sigma: Vec::new(), sigma_e: vec![Vec::new(); n], coupling: Vec::new(), declared_kappa: Vec::new() }
    }

    /// `E_lambda`
    pub fn shared_edges(&self, lambda: &RealRoot) -> Vec<usize> {
        (0..self.sigma_e.len()).filter(|&e| self.sigma_e[e].iter().any(|m| m.same_value(lambda))).collect()
    }

    /// Multiplicity rule: 1 for an unshared eigenvalue, `|E_lambda| - 1` otherwise.
    pub fn kappa(&self, lambda: &RealRoot) -> usize {
        let n = self.shared_edges(lambda).len();
        if n == 0 {
            1
        } else {
            n - 1
        }
    }

    pub fn coupling_for(&self, lambda: &RealRoot) -> Option<&CouplingMatrix> {
        self.coupling.iter().find(|c| c.lambda.same_value(lambda))
    }

    /// Eigenvalue count with multiplicity.
    pub fn total_multiplicity(&self) -> usize {
        self.sigma.iter().map(|l| self.kappa(l)).sum()
    }

    pub fn edge_id(&self, e: usize) -> &str {
        &self.graph.edges()[e].id
    }

    /// Structural equality: same graph, same values, same coupling entries.
    pub fn same_as(&self, other: &SpectralData) -> bool {
        fn same_list(a: &[RealRoot], b: &[RealRoot]) -> bool {
            a.len() == b.len() && a.iter().zip(b).all(|(x, y)| x.same_value(y))
        }
        if self.graph != other.graph || !same_list(&self.sigma, &other.sigma) {
            return false;
        }
        if self.sigma_e.len() != other.sigma_e.len()
            || !self.sigma_e.iter().zip(&other.sigma_e).all(|(a, b)| same_list(a, b))
        {
            return false;
        }
        if self.coupling.len() != other.coupling.len() {
            return false;
        }
        self.coupling.iter().all(|c| {
            other.coupling_for(&c.lambda).is_some_and(|d| {
                d.edges == c.edges
                    && c.edges.iter().all(|&e| c.entry(c.reference, e).same_value(&d.entry(c.reference, e)))
            })
        })
    }
}

/// One group of conjugate eigenvalues with uniform spectral membership.
#[derive(Clone, Debug)]
pub struct BasisFactor {
    pub group: RootGroup,
    /// Edges whose spectrum contains these values.
    pub edges: Vec<usize>,
    /// Multiplicity as eigenvalues of the graph problem (0 if not in sigma).
    pub kappa: usize,
    /// Coupling ratios `r_{edges[0], d}` as expressions modulo the group polynomial,
    /// aligned with `edges`; present exactly for shared graph eigenvalues.
    pub coupling: Option<Vec<Poly>>,
}

impl BasisFactor {
    pub fn in_sigma(&self) -> bool {
        self.kappa > 0
    }

    pub fn is_shared(&self) -> bool {
        self.in_sigma() && !self.edges.is_empty()
    }

    /// `sum_d Gamma_de` for `e = edges[i]`, modulo the group polynomial.
    pub fn coupling_sum_expr(&self, i: usize) -> Option<Poly> {
        let ratios = self.coupling.as_ref()?;
        let m = self.group.poly();
        // Gamma_de = r_{0,e} / r_{0,d}
        let mut inv_sum = Poly::zero();
        for r in ratios {
            inv_sum = &inv_sum + &r.inverse_mod(m)?;
        }
        Some((&ratios[i] * &inv_sum).rem(m))
    }
}

/// Eigenvalue data regrouped over pairwise coprime root groups.
#[derive(Clone, Debug)]
pub struct SpectralBasis {
    pub graph: StarGraph,
    pub factors: Vec<BasisFactor>,
}

fn expr_mod(v: &AlgebraicValue, m: &Poly) -> Option<Poly> {
    if let Some(x) = v.as_rational() {
        return Some(Poly::constant(x));
    }
    let p = v.root().poly();
    if p == m || m.divides(p) {
        Some(v.expr().rem(m))
    } else {
        None
    }
}

impl SpectralBasis {
    /// `P_e = prod (1 - z/mu)` over `sigma_e`.
    pub fn edge_poly(&self, e: usize) -> Poly {
        self.factors.iter().filter(|f| f.edges.contains(&e)).map(|f| f.group.normalized()).product()
    }

    /// `V = prod (1 - z/lambda)^kappa` over `sigma`.
    pub fn graph_poly(&self) -> Poly {
        self.factors.iter().filter(|f| f.in_sigma()).map(|f| f.group.normalized().pow(f.kappa)).product()
    }

    /// `prod_e P_e / V`, Herglotz for admissible data.
    pub fn product_function(&self) -> Factored {
        Factored::new(
            Q::one(),
            self.factors
                .iter()
                .map(|f| (f.group.clone(), f.edges.len() as i64 - f.kappa as i64))
                .collect(),
        )
    }

    pub fn herglotz(&self) -> HerglotzCertificate {
        self.product_function().herglotz()
    }

    pub fn sigma(&self) -> Vec<RealRoot> {
        let mut out: Vec<RealRoot> =
            self.factors.iter().filter(|f| f.in_sigma()).flat_map(|f| f.group.roots().iter().cloned()).collect();
        out.sort_by(|a, b| a.cmp_value(b));
        out
    }

    pub fn sigma_edge(&self, e: usize) -> Vec<RealRoot> {
        let mut out: Vec<RealRoot> = self
            .factors
            .iter()
            .filter(|f| f.edges.contains(&e))
            .flat_map(|f| f.group.roots().iter().cloned())
            .collect();
        out.sort_by(|a, b| a.cmp_value(b));
        out
    }

    /// Exact `sum kappa/lambda` over the graph spectrum.
    pub fn trace(&self) -> Q {
        self.factors
            .iter()
            .filter(|f| f.in_sigma())
            .map(|f| -f.group.normalized().coeff(1) * Q::from_integer(f.kappa.into()))
            .sum()
    }

    /// Exact `sum 1/mu` over `sigma_e`.
    pub fn edge_trace(&self, e: usize) -> Q {
        -self.edge_poly(e).coeff(1)
    }

    /// Back to the flat representation, sharing one root object per value.
    pub fn to_data(&self) -> SpectralData {
        let n = self.graph.len();
        let mut coupling = Vec::new();
        for f in &self.factors {
            if let (true, Some(ratios)) = (f.is_shared(), &f.coupling) {
                for r in f.group.roots() {
                    let vals = f
                        .edges
                        .iter()
                        .zip(ratios)
                        .map(|(&d, x)| (d, AlgebraicValue::new(r.clone(), x)))
                        .collect();
                    coupling.push(CouplingMatrix::from_ratios(r.clone(), f.edges[0], vals).expect("valid coupling"));
                }
            }
        }
        coupling.sort_by(|a, b| a.lambda.cmp_value(&b.lambda));
        SpectralData {
            graph: self.graph.clone(),
            sigma: self.sigma(),
            sigma_e: (0..n).map(|e| self.sigma_edge(e)).collect(),
            coupling,
            declared_kappa: Vec::new(),
        }
    }

    /// Regroups flat data; reports structural violations (positivity, repeats,
    /// conjugate completeness, multiplicities, coupling shape and class).
    pub fn from_data(data: &SpectralData) -> Result<SpectralBasis, Vec<Violation>> {
        let mut violations = Vec::new();
        let n = data.graph.len();
        if data.sigma_e.len() != n {
            return Err(vec![Violation::UnknownEdge { id: format!("{} edge spectra for {n} edges", data.sigma_e.len()) }]);
        }
        // every listed value with its memberships: (root, in sigma, edges)
        let mut values: Vec<(RealRoot, bool, Vec<usize>)> = Vec::new();
        let mut rational_index: BTreeMap<Q, usize> = BTreeMap::new();
        let mut add = |r: &RealRoot, set: Option<usize>, label: &str, violations: &mut Vec<Violation>| {
            if r.cmp_rational(&Q::zero()) != std::cmp::Ordering::Greater {
                violations.push(Violation::NonPositive { set: label.to_string(), value: show(r) });
                return;
            }
            let slot = match r.as_rational() {
                Some(x) => rational_index.get(&x).copied(),
                None => values.iter().position(|v| v.0.same_value(r)),
            };
            let i = match slot {
                Some(i) => i,
                None => {
                    if let Some(x) = r.as_rational() {
                        rational_index.insert(x, values.len());
                    }
                    values.push((r.clone(), false, Vec::new()));
                    values.len() - 1
                }
            };
            let entry = &mut values[i];
            let repeated = match set {
                None => std::mem::replace(&mut entry.1, true),
                Some(e) => {
                    let had = entry.2.contains(&e);
                    if !had {
                        entry.2.push(e);
                    }
                    had
                }
            };
            if repeated {
                violations.push(Violation::Repeated { set: label.to_string(), value: show(r) });
            }
        };
        for r in &data.sigma {
            add(r, None, "sigma", &mut violations);
        }
        for (e, list) in data.sigma_e.iter().enumerate() {
            let label = format!("sigma_{}", data.graph.edges()[e].id);
            for r in list {
                add(r, Some(e), &label, &mut violations);
            }
        }
        if !violations.is_empty() {
            return Err(violations);
        }

        // defining polynomials: rationals are linear, irrationals share a gcd-free basis
        let irrational: Vec<Poly> = values.iter().filter(|v| v.0.as_rational().is_none()).map(|v| v.0.poly().clone()).collect();
        let mut basis_input = irrational.clone();
        for x in rational_index.keys() {
            if irrational.iter().any(|p| p.eval(x).is_zero()) {
                basis_input.push(Poly::linear_root(x));
            }
        }
        let basis = gcd_free_basis(&basis_input);
        let mut groups: Vec<(Poly, Vec<usize>)> = Vec::new();
        let mut linear: BTreeMap<Q, usize> = BTreeMap::new();
        for (i, v) in values.iter().enumerate() {
            let poly = match v.0.as_rational() {
                Some(x) if !basis.iter().any(|b| b.degree() == Some(1) && b.eval(&x).is_zero()) => {
                    if let Some(&g) = linear.get(&x) {
                        groups[g].1.push(i);
                        continue;
                    }
                    linear.insert(x.clone(), groups.len());
                    groups.push((Poly::linear_root(&x), vec![i]));
                    continue;
                }
                _ => basis.iter().find(|b| v.0.is_root_of(b)).expect("basis covers every value").clone(),
            };
            match groups.iter_mut().find(|g| g.0 == poly) {
                Some(g) => g.1.push(i),
                None => groups.push((poly, vec![i])),
            }
        }

        let mut factors = Vec::new();
        for (poly, members) in groups {
            let first = &values[members[0]];
            if members.len() != poly.degree().unwrap_or(0) {
                violations.push(Violation::IncompleteConjugates { value: show(&first.0) });
                continue;
            }
            if members.iter().any(|&i| values[i].1 != first.1 || {
                let mut a = values[i].2.clone();
                let mut b = first.2.clone();
                a.sort();
                b.sort();
                a != b
            }) {
                violations.push(Violation::NonUniformConjugates { value: show(&first.0) });
                continue;
            }
            let mut roots: Vec<RealRoot> = members.iter().map(|&i| values[i].0.with_poly(poly.clone())).collect();
            roots.sort_by(|a, b| a.cmp_value(b));
            let mut edges = first.2.clone();
            edges.sort();
            let kappa = match (first.1, edges.len()) {
                (false, _) => 0,
                (true, 0) => 1,
                (true, k) => k - 1,
            };
            if first.1 && kappa == 0 {
                for r in &roots {
                    violations.push(Violation::KappaZero { lambda: show(r) });
                }
            }
            factors.push(BasisFactor { group: RootGroup::from_parts(poly.monic(), roots), edges, kappa, coupling: None });
        }

        for (lambda, declared) in &data.declared_kappa {
            let derived = if data.sigma.iter().any(|s| s.same_value(lambda)) { data.kappa(lambda) } else { 0 };
            if *declared != derived {
                violations.push(Violation::KappaMismatch { lambda: show(lambda), declared: *declared, derived });
            }
        }

        // coupling matrices
        let mut used = vec![false; data.coupling.len()];
        for f in factors.iter_mut().filter(|f| f.is_shared()) {
            let m = f.group.poly().clone();
            let mut exprs: Option<(usize, Vec<Poly>)> = None;
            let mut ok = true;
            for r in f.group.roots() {
                let Some(ci) = data.coupling.iter().position(|c| c.lambda.same_value(r)) else {
                    violations.push(Violation::MissingCoupling { lambda: show(r) });
                    ok = false;
                    continue;
                };
                used[ci] = true;
                let c = &data.coupling[ci];
                if c.edges != f.edges {
                    let ids = |v: &[usize]| v.iter().map(|&e| data.graph.edges()[e].id.clone()).collect();
                    violations.push(Violation::CouplingIndexSet {
                        lambda: show(r),
                        expected: ids(&f.edges),
                        found: ids(&c.edges),
                    });
                    ok = false;
                    continue;
                }
                let raw: Option<Vec<Poly>> = c.ratios.iter().map(|v| expr_mod(v, &m)).collect();
                let Some(raw) = raw else {
                    violations.push(Violation::NonUniformConjugates { value: show(r) });
                    ok = false;
                    continue;
                };
                match &exprs {
                    None => exprs = Some((c.reference, raw)),
                    Some((reference, prev)) => {
                        if *reference != c.reference || *prev != raw {
                            violations.push(Violation::NonUniformConjugates { value: show(r) });
                            ok = false;
                        }
                    }
                }
            }
            if let (true, Some((_, raw))) = (ok, exprs) {
                // renormalize to the smallest edge as reference
                let inv0 = raw[0].inverse_mod(&m).expect("positive ratio");
                f.coupling = Some(raw.iter().map(|x| (x * &inv0).rem(&m)).collect());
            }
        }
        for (i, c) in data.coupling.iter().enumerate() {
            if !used[i] {
                violations.push(Violation::UnexpectedCoupling { lambda: show(&c.lambda) });
            }
        }

        if violations.is_empty() {
            factors.sort_by(|a, b| a.group.min_root().cmp_value(b.group.min_root()));
            Ok(SpectralBasis { graph: data.graph.clone(), factors })
        } else {
            Err(violations)
        }
    }

    /// Hypotheses that depend on the whole spectrum: the Herglotz property of
    /// `prod P_e / V` and the smallest-eigenvalue condition.
    pub fn global_violations(&self) -> Vec<Violation> {
        let mut out = Vec::new();
        let cert = self.herglotz();
        if !cert.is_herglotz {
            out.push(Violation::NotHerglotz { reason: cert.reason.unwrap_or_default() });
        }
        let sigma = self.sigma();
        for e in 0..self.graph.len() {
            let se = self.sigma_edge(e);
            let Some(edge_min) = se.first() else { continue };
            let ok = sigma.first().is_some_and(|s| s.cmp_value(edge_min) == std::cmp::Ordering::Less);
            if !ok {
                out.push(Violation::SmallestEigenvalue {
                    edge: self.graph.edges()[e].id.clone(),
                    sigma_min: sigma.first().map(show).unwrap_or_else(|| "none".into()),
                    edge_min: show(edge_min),
                });
            }
        }
        out
    }

    pub fn factor_containing(&self, r: &RealRoot) -> Option<(usize, usize)> {
        self.factors.iter().enumerate().find_map(|(i, f)| f.group.position(r).map(|j| (i, j)))
    }

    pub fn max_value(&self) -> Option<RealRoot> {
        self.factors.iter().map(|f| f.group.max_root().clone()).max_by(|a, b| a.cmp_value(b))
    }

    pub fn total_multiplicity(&self) -> usize {
        self.factors.iter().map(|f| f.kappa * f.group.degree()).sum()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::number::{frac, q};

    fn rr(x: Q) -> RealRoot {
        RealRoot::rational(x)
    }

    fn star3() -> StarGraph {
        StarGraph::with_lengths(&[q(1), q(1), q(1)]).unwrap()
    }

    fn ones(lambda: Q, edges: &[usize]) -> CouplingMatrix {
        CouplingMatrix::from_ratios(
            rr(lambda),
            edges[0],
            edges.iter().map(|&d| (d, AlgebraicValue::rational(q(1)))).collect(),
        )
        .unwrap()
    }

    fn symmetric() -> SpectralData {
        SpectralData {
            graph: star3(),
            sigma: vec![rr(q(2)), rr(q(4))],
            sigma_e: vec![vec![rr(q(4))]; 3],
            coupling: vec![ones(q(4), &[0, 1, 2])],
            declared_kappa: vec![(rr(q(4)), 2)],
        }
    }

    #[test]
    fn coupling_matrix_class() {
        let c = ones(q(4), &[0, 1, 2]);
        assert_eq!(c.row_sum_identity().as_rational(), Some(q(1)));
        assert!(c.full().iter().flatten().all(|x| x.as_rational() == Some(q(1))));
        let r = CouplingMatrix::from_ratios(rr(q(4)), 0, vec![(1, AlgebraicValue::rational(q(3)))]).unwrap();
        assert_eq!(r.entry(0, 1).as_rational(), Some(q(3)));
        assert_eq!(r.entry(1, 0).as_rational(), Some(frac(1, 3)));
        assert_eq!(r.row_sum_identity().as_rational(), Some(q(1)));
        let skew = CouplingMatrix::from_ratios(rr(q(4)), 0, vec![(1, AlgebraicValue::rational(q(4))), (2, AlgebraicValue::rational(frac(1, 4)))]).unwrap();
        assert_eq!(skew.entry(1, 2).as_rational(), Some(frac(1, 16)));
        assert_eq!(skew.row_sum_identity().as_rational(), Some(q(1)));
    }

    #[test]
    fn full_matrix_validation() {
        let v = |x: Q| AlgebraicValue::rational(x);
        let good = vec![vec![v(q(1)), v(q(2))], vec![v(frac(1, 2)), v(q(1))]];
        let c = CouplingMatrix::from_full(rr(q(4)), vec![0, 1], good).unwrap();
        assert_eq!(c.ratios()[1].as_rational(), Some(q(2)));
        let bad = vec![vec![v(q(1)), v(q(2))], vec![v(q(2)), v(q(1))]];
        assert_eq!(
            CouplingMatrix::from_full(rr(q(4)), vec![0, 1], bad).unwrap_err().code(),
            "coupling-not-multiplicative"
        );
        let diag = vec![vec![v(q(2)), v(q(2))], vec![v(frac(1, 2)), v(q(1))]];
        assert_eq!(CouplingMatrix::from_full(rr(q(4)), vec![0, 1], diag).unwrap_err().code(), "coupling-diagonal");
    }

    #[test]
    fn canonical_basis_of_symmetric_data() {
        let b = SpectralBasis::from_data(&symmetric()).unwrap();
        assert_eq!(b.factors.len(), 2);
        assert_eq!(b.factors[1].kappa, 2);
        assert_eq!(b.factors[1].edges, vec![0, 1, 2]);
        assert!(b.global_violations().is_empty());
        assert_eq!(b.graph_poly(), Poly::from_roots(&[(q(2), 1), (q(4), 2)]).unwrap());
        assert_eq!(b.trace(), q(1));
        assert!(b.to_data().same_as(&symmetric()));
    }

    #[test]
    fn kappa_zero_is_reported() {
        let mut d = SpectralData::empty(star3());
        d.sigma = vec![rr(q(4))];
        d.sigma_e[0] = vec![rr(q(4))];
        let err = SpectralBasis::from_data(&d).unwrap_err();
        assert_eq!(err[0].code(), "kappa-zero");
    }

    #[test]
    fn non_interlacing_is_rejected() {
        let mut d = SpectralData::empty(star3());
        d.sigma = vec![rr(q(5))];
        d.sigma_e[0] = vec![rr(q(4))];
        d.sigma_e[1] = vec![rr(q(4))];
        // 4 is in two edge spectra but not in sigma
        let b = SpectralBasis::from_data(&d).unwrap();
        let v = b.global_violations();
        assert!(v.iter().any(|x| x.code() == "not-herglotz"));
        assert!(v.iter().any(|x| x.code() == "smallest-eigenvalue"));
    }

    #[test]
    fn irrational_groups_must_be_complete() {
        let s = crate::roots::isolate_roots(&Poly::from_ints(&[2, -4, 1])); // 2 +- sqrt 2
        let mut d = SpectralData::empty(star3());
        d.sigma = vec![s[1].clone()];
        assert_eq!(SpectralBasis::from_data(&d).unwrap_err()[0].code(), "incomplete-conjugates");
        d.sigma = s.clone();
        let b = SpectralBasis::from_data(&d).unwrap();
        assert_eq!(b.factors.len(), 1);
        assert_eq!(b.trace(), q(2)); // 1/(2-r) + 1/(2+r) = 4/2
    }

    #[test]
    fn coupling_problems_are_reported() {
        let mut d = symmetric();
        d.coupling.clear();
        assert_eq!(SpectralBasis::from_data(&d).unwrap_err()[0].code(), "missing-coupling");
        let mut d = symmetric();
        d.coupling = vec![ones(q(4), &[0, 1])];
        assert_eq!(SpectralBasis::from_data(&d).unwrap_err()[0].code(), "coupling-index-set");
        let mut d = symmetric();
        d.coupling.push(ones(q(2), &[0, 1]));
        assert_eq!(SpectralBasis::from_data(&d).unwrap_err()[0].code(), "unexpected-coupling");
        let mut d = symmetric();
        d.declared_kappa = vec![(rr(q(4)), 1)];
        assert_eq!(SpectralBasis::from_data(&d).unwrap_err()[0].code(), "kappa-mismatch");
    }
}
