//! Floating-point cross-check: the string problem as a finite generalized
//! eigenvalue problem `K u = lambda M u` on the mesh of mass points.

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use num::{One, Zero};

use crate::error::{Error, Result};
use crate::forward::Forward;
use crate::graph::{EdgeMeasure, GraphMeasure};
use crate::number::{to_f64, Q};

pub const DEFAULT_TOLERANCE: f64 = 1e-10;
pub const CLUSTER_GAP: f64 = 1e-6;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum MeshNode {
    Center,
    Mass { edge: usize, index: usize },
}

#[derive(Clone, Debug)]
pub struct AssembledSystem {
    pub nodes: Vec<MeshNode>,
    pub stiffness: DMatrix<f64>,
    pub mass: DVector<f64>,
}

#[derive(Clone, Debug)]
pub struct Eigenpair {
    pub lambda: f64,
    /// Full nodal vector, `u.M.u = 1`.
    pub vector: DVector<f64>,
    /// `u.K.u`
    pub energy: f64,
}

impl AssembledSystem {
    pub fn dim(&self) -> usize {
        self.nodes.len()
    }

    pub fn rank_mass(&self) -> usize {
        self.mass.iter().filter(|m| **m > 0.0).count()
    }
}

/// Adds the chain `0 = start, x_1, ..., x_k, l` to `k` with Dirichlet at `l`.
/// `first` is the node at the start of the chain, `None` for Dirichlet.
fn add_chain(k: &mut [Vec<Q>], first: Option<usize>, nodes: &[usize], positions: &[Q], length: &Q) {
    let mut prev = first;
    let mut x = Q::zero();
    for (&n, p) in nodes.iter().zip(positions) {
        let c = Q::one() / (p - &x);
        k[n][n] += &c;
        if let Some(a) = prev {
            k[a][a] += &c;
            k[a][n] -= &c;
            k[n][a] -= &c;
        }
        prev = Some(n);
        x = p.clone();
    }
    let c = Q::one() / (length - &x);
    if let Some(a) = prev {
        k[a][a] += &c;
    }
}

fn to_matrix(k: &[Vec<Q>]) -> DMatrix<f64> {
    let n = k.len();
    DMatrix::from_fn(n, n, |i, j| to_f64(&k[i][j]))
}

/// Stiffness and mass on center plus mass nodes, edge chains joined at the center.
pub fn assemble(measure: &GraphMeasure) -> AssembledSystem {
    let graph = measure.graph();
    let mut nodes = vec![MeshNode::Center];
    let mut masses = vec![measure.central_mass().clone()];
    for (e, em) in measure.edge_measures().iter().enumerate() {
        for (i, pm) in em.masses().iter().enumerate() {
            nodes.push(MeshNode::Mass { edge: e, index: i });
            masses.push(pm.weight.clone());
        }
    }
    let n = nodes.len();
    let mut k = vec![vec![Q::zero(); n]; n];
    let mut next = 1;
    for (e, em) in measure.edge_measures().iter().enumerate() {
        let ids: Vec<usize> = (next..next + em.len()).collect();
        next += em.len();
        let pos: Vec<Q> = em.masses().iter().map(|m| m.position.clone()).collect();
        add_chain(&mut k, Some(0), &ids, &pos, graph.length(e));
    }
    AssembledSystem {
        nodes,
        stiffness: to_matrix(&k),
        mass: DVector::from_iterator(n, masses.iter().map(to_f64)),
    }
}

/// Single edge with Dirichlet conditions at both ends.
pub fn assemble_edge(length: &Q, em: &EdgeMeasure) -> AssembledSystem {
    let n = em.len();
    let mut k = vec![vec![Q::zero(); n]; n];
    let ids: Vec<usize> = (0..n).collect();
    let pos: Vec<Q> = em.masses().iter().map(|m| m.position.clone()).collect();
    add_chain(&mut k, None, &ids, &pos, length);
    AssembledSystem {
        nodes: (0..n).map(|index| MeshNode::Mass { edge: 0, index }).collect(),
        stiffness: to_matrix(&k),
        mass: DVector::from_iterator(n, em.masses().iter().map(|m| to_f64(&m.weight))),
    }
}

fn select(m: &DMatrix<f64>, rows: &[usize], cols: &[usize]) -> DMatrix<f64> {
    DMatrix::from_fn(rows.len(), cols.len(), |i, j| m[(rows[i], cols[j])])
}

/// Finite eigenpairs, ascending. Massless nodes are eliminated by a Schur
/// complement and the rest is symmetrized with `M^{-1/2}`.
pub fn generalized_eigen(sys: &AssembledSystem) -> Result<Vec<Eigenpair>> {
    let (inner, outer): (Vec<usize>, Vec<usize>) = (0..sys.dim()).partition(|&i| sys.mass[i] > 0.0);
    if inner.is_empty() {
        return Ok(Vec::new());
    }
    let k = &sys.stiffness;
    let kii = select(k, &inner, &inner);
    let (ks, back) = if outer.is_empty() {
        (kii, None)
    } else {
        let kjj = select(k, &outer, &outer);
        let kji = select(k, &outer, &inner);
        let chol = kjj.cholesky().ok_or_else(|| Error::invariant("stiffness is not positive definite"))?;
        let x = chol.solve(&kji);
        (kii - kji.transpose() * &x, Some(x))
    };
    let d: Vec<f64> = inner.iter().map(|&i| 1.0 / sys.mass[i].sqrt()).collect();
    let n = inner.len();
    let a = DMatrix::from_fn(n, n, |i, j| d[i] * ks[(i, j)] * d[j]);
    let a = (&a + a.transpose()) * 0.5;
    let eig = SymmetricEigen::new(a);
    let mut out = Vec::with_capacity(n);
    for c in 0..n {
        let y = eig.eigenvectors.column(c);
        let ui = DVector::from_fn(n, |i, _| d[i] * y[i]);
        let mut u = DVector::zeros(sys.dim());
        for (r, &i) in inner.iter().enumerate() {
            u[i] = ui[r];
        }
        if let Some(x) = &back {
            let uj = -(x * &ui);
            for (r, &j) in outer.iter().enumerate() {
                u[j] = uj[r];
            }
        }
        let energy = u.dot(&(k * &u));
        out.push(Eigenpair { lambda: eig.eigenvalues[c], vector: u, energy });
    }
    out.sort_by(|a, b| a.lambda.total_cmp(&b.lambda));
    Ok(out)
}

/// Groups sorted values whose relative gap is below `gap`: `(mean, count)`.
pub fn cluster(values: &[(f64, usize)], gap: f64) -> Vec<(f64, usize)> {
    let mut out: Vec<(f64, usize, f64)> = Vec::new();
    for &(v, k) in values {
        let merge = out.last().is_some_and(|l| (v - l.2).abs() <= gap * v.abs().max(l.2.abs()));
        if merge {
            let l = out.last_mut().unwrap();
            l.0 = (l.0 * l.1 as f64 + v * k as f64) / (l.1 + k) as f64;
            l.1 += k;
            l.2 = v;
        } else {
            out.push((v, k, v));
        }
    }
    out.into_iter().map(|(m, n, _)| (m, n)).collect()
}

#[derive(Clone, Debug, PartialEq)]
pub struct OracleRow {
    /// `None` for the graph, otherwise the edge index.
    pub edge: Option<usize>,
    pub exact: f64,
    pub kappa: usize,
    pub oracle: f64,
    pub multiplicity: usize,
    pub deviation: f64,
}

#[derive(Clone, Debug)]
pub struct OracleReport {
    pub tolerance: f64,
    pub rows: Vec<OracleRow>,
    /// `(sum kappa, rank M)` for the graph.
    pub count: (usize, usize),
    pub max_deviation: f64,
    /// Largest `|u.K.u - lambda u.M.u| / lambda` over oracle eigenpairs.
    pub rayleigh_residual: f64,
    pub mismatches: Vec<String>,
}

impl OracleReport {
    pub fn passed(&self) -> bool {
        self.mismatches.is_empty()
    }
}

fn compare_lists(
    edge: Option<usize>,
    exact: &[(f64, usize)],
    oracle: &[Eigenpair],
    tol: f64,
    rows: &mut Vec<OracleRow>,
    mismatches: &mut Vec<String>,
) -> f64 {
    let label = edge.map_or("graph".to_string(), |e| format!("edge {e}"));
    let ex = cluster(exact, CLUSTER_GAP);
    let or = cluster(&oracle.iter().map(|p| (p.lambda, 1)).collect::<Vec<_>>(), CLUSTER_GAP);
    if ex.len() != or.len() {
        mismatches.push(format!("{label}: {} distinct exact eigenvalues, {} from oracle", ex.len(), or.len()));
    }
    let mut worst: f64 = 0.0;
    for (&(x, k), &(o, n)) in ex.iter().zip(&or) {
        let dev = (x - o).abs() / x.abs().max(f64::MIN_POSITIVE);
        worst = worst.max(dev);
        if dev > tol {
            mismatches.push(format!("{label}: eigenvalue {x:e} vs oracle {o:e}, relative deviation {dev:e}"));
        }
        if k != n {
            mismatches.push(format!("{label}: multiplicity {k} at {x:e}, oracle finds {n}"));
        }
        rows.push(OracleRow { edge, exact: x, kappa: k, oracle: o, multiplicity: n, deviation: dev });
    }
    worst
}

pub fn compare_with(fwd: &Forward, tol: f64) -> Result<OracleReport> {
    let measure = &fwd.measure;
    let mut rows = Vec::new();
    let mut mismatches = Vec::new();
    let sys = assemble(measure);
    let pairs = generalized_eigen(&sys)?;
    let mut rayleigh: f64 = 0.0;
    let exact: Vec<(f64, usize)> = fwd.spectrum().iter().map(|(r, k)| (r.to_f64(), *k)).collect();
    let count = (exact.iter().map(|x| x.1).sum::<usize>(), sys.rank_mass());
    if count.0 != count.1 {
        mismatches.push(format!("graph: {} eigenvalues with multiplicity, rank M = {}", count.0, count.1));
    }
    for p in &pairs {
        rayleigh = rayleigh.max((p.energy - p.lambda).abs() / p.lambda.abs());
    }
    let mut max_dev = compare_lists(None, &exact, &pairs, tol, &mut rows, &mut mismatches);
    for (e, em) in measure.edge_measures().iter().enumerate() {
        let pairs = generalized_eigen(&assemble_edge(measure.graph().length(e), em))?;
        let exact: Vec<(f64, usize)> = fwd.edge_spectrum(e).iter().map(|r| (r.to_f64(), 1)).collect();
        let d = compare_lists(Some(e), &exact, &pairs, tol, &mut rows, &mut mismatches);
        max_dev = max_dev.max(d);
    }
    if rayleigh > tol {
        mismatches.push(format!("Rayleigh residual {rayleigh:e}"));
    }
    Ok(OracleReport { tolerance: tol, rows, count, max_deviation: max_dev, rayleigh_residual: rayleigh, mismatches })
}

/// Runs the forward pipeline and the oracle and compares spectra and multiplicities.
pub fn compare(measure: &GraphMeasure, tol: f64) -> Result<OracleReport> {
    compare_with(&Forward::new(measure)?, tol)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::StarGraph;
    use crate::number::{frac, q};

    fn star3() -> StarGraph {
        StarGraph::with_lengths(&[q(1), q(1), q(1)]).unwrap()
    }

    fn half(n: usize) -> Vec<Vec<(Q, Q)>> {
        (0..3).map(|e| if e < n { vec![(frac(1, 2), q(1))] } else { vec![] }).collect()
    }

    #[test]
    fn single_mass_system() {
        let m = GraphMeasure::from_masses(star3(), q(0), half(1)).unwrap();
        let sys = assemble(&m);
        // energy 2(b - c)^2 + 2 b^2 + 2 c^2
        assert_eq!(sys.stiffness, DMatrix::from_row_slice(2, 2, &[4.0, -2.0, -2.0, 4.0]));
        assert_eq!(sys.mass.as_slice(), &[0.0, 1.0]);
        let pairs = generalized_eigen(&sys).unwrap();
        assert_eq!(pairs.len(), 1);
        assert!((pairs[0].lambda - 3.0).abs() < 1e-14);
        assert!((pairs[0].energy - 3.0).abs() < 1e-14);
    }

    #[test]
    fn degenerate_systems() {
        let sys = assemble(&GraphMeasure::empty(star3()));
        assert_eq!(sys.stiffness[(0, 0)], 3.0);
        assert!(generalized_eigen(&sys).unwrap().is_empty());
        let sys = assemble(&GraphMeasure::from_masses(star3(), q(1), half(0)).unwrap());
        let pairs = generalized_eigen(&sys).unwrap();
        assert!((pairs[0].lambda - 3.0).abs() < 1e-14);
    }

    #[test]
    fn symmetric_star() {
        let m = GraphMeasure::from_masses(star3(), q(0), half(3)).unwrap();
        let ev: Vec<f64> = generalized_eigen(&assemble(&m)).unwrap().iter().map(|p| p.lambda).collect();
        assert_eq!(ev.len(), 3);
        for (a, b) in ev.iter().zip([2.0, 4.0, 4.0]) {
            assert!((a - b).abs() < 1e-12);
        }
        let r = compare(&m, DEFAULT_TOLERANCE).unwrap();
        assert!(r.passed(), "{:?}", r.mismatches);
        assert!(r.max_deviation < 1e-12);
        assert_eq!(r.count, (3, 3));
        let graph_rows: Vec<_> = r.rows.iter().filter(|x| x.edge.is_none()).map(|x| x.kappa).collect();
        assert_eq!(graph_rows, vec![1, 2]);
    }

    #[test]
    fn edge_system() {
        let em = EdgeMeasure::new(
            vec![crate::graph::PointMass::new(frac(1, 3), q(1)), crate::graph::PointMass::new(frac(2, 3), q(1))],
            &q(1),
        )
        .unwrap();
        let ev: Vec<f64> = generalized_eigen(&assemble_edge(&q(1), &em)).unwrap().iter().map(|p| p.lambda).collect();
        assert!((ev[0] - 3.0).abs() < 1e-12 && (ev[1] - 9.0).abs() < 1e-12);
    }

    #[test]
    fn four_edges_with_central_mass() {
        let g = StarGraph::with_lengths(&[q(1), frac(3, 2), q(2), frac(1, 2)]).unwrap();
        let masses = (0..4)
            .map(|e| (1..=3).map(|j| (g.length(e) * frac(j, 4), frac(j + e as i64, 3))).collect())
            .collect();
        let m = GraphMeasure::from_masses(g, frac(1, 2), masses).unwrap();
        let r = compare(&m, DEFAULT_TOLERANCE).unwrap();
        assert!(r.passed(), "{:?}", r.mismatches);
        assert_eq!(r.count, (13, 13));
    }

    #[test]
    fn clustering() {
        let c = cluster(&[(1.0, 1), (1.0 + 1e-9, 1), (2.0, 2)], CLUSTER_GAP);
        assert_eq!(c.len(), 2);
        assert_eq!((c[0].1, c[1].1), (2, 2));
    }
}
