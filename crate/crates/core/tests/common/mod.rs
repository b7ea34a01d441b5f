//! Independent reference computations shared by the integration tests.
//!
//! Nothing here goes through the library's polynomial or root code: the
//! characteristic functions are evaluated pointwise as ratios of determinants
//! of the exact stiffness and mass matrices.

#![allow(dead_code)]

use krein_star::{GraphMeasure, Q};
use num::{One, Zero};

pub fn q(n: i64) -> Q {
    Q::from_integer(n.into())
}

pub fn frac(n: i64, d: i64) -> Q {
    Q::new(n.into(), d.into())
}

/// Exact determinant by fraction Gaussian elimination.
pub fn det(mut a: Vec<Vec<Q>>) -> Q {
    let n = a.len();
    let mut d = Q::one();
    for c in 0..n {
        let Some(p) = (c..n).find(|&r| !a[r][c].is_zero()) else { return Q::zero() };
        if p != c {
            a.swap(p, c);
            d = -d;
        }
        let piv = a[c][c].clone();
        d *= &piv;
        for r in c + 1..n {
            if a[r][c].is_zero() {
                continue;
            }
            let f = &a[r][c] / &piv;
            for k in c..n {
                let t = &f * &a[c][k];
                a[r][k] -= t;
            }
        }
    }
    d
}

/// Stiffness (energy form of piecewise-linear functions) and mass diagonal;
/// node 0 is the center, then the masses edge by edge.
pub fn exact_system(m: &GraphMeasure) -> (Vec<Vec<Q>>, Vec<Q>) {
    let mut mass = vec![m.central_mass().clone()];
    for em in m.edge_measures() {
        mass.extend(em.masses().iter().map(|p| p.weight.clone()));
    }
    let n = mass.len();
    let mut k = vec![vec![Q::zero(); n]; n];
    let mut idx = 1;
    for (e, em) in m.edge_measures().iter().enumerate() {
        let mut prev = 0usize;
        let mut x = Q::zero();
        for p in em.masses() {
            let c = Q::one() / (&p.position - &x);
            k[prev][prev] += &c;
            k[idx][idx] += &c;
            k[prev][idx] -= &c;
            k[idx][prev] -= &c;
            prev = idx;
            x = p.position.clone();
            idx += 1;
        }
        k[prev][prev] += Q::one() / (m.graph().length(e) - &x);
    }
    (k, mass)
}

/// `det(K - z M) / det K`, which vanishes exactly on the spectrum with multiplicity.
pub fn char_ratio(k: &[Vec<Q>], mass: &[Q], z: &Q) -> Q {
    let shifted: Vec<Vec<Q>> = k
        .iter()
        .enumerate()
        .map(|(i, row)| row.iter().enumerate().map(|(j, v)| if i == j { v - z * &mass[i] } else { v.clone() }).collect())
        .collect();
    det(shifted) / det(k.to_vec())
}

pub fn graph_char(m: &GraphMeasure, z: &Q) -> Q {
    let (k, mass) = exact_system(m);
    char_ratio(&k, &mass, z)
}

/// Edge problem with Dirichlet conditions at both ends.
pub fn edge_char(m: &GraphMeasure, e: usize, z: &Q) -> Q {
    let em = m.edge(e);
    let n = em.len();
    if n == 0 {
        return Q::one();
    }
    let mut k = vec![vec![Q::zero(); n]; n];
    let mut x = Q::zero();
    for (i, p) in em.masses().iter().enumerate() {
        let c = Q::one() / (&p.position - &x);
        k[i][i] += &c;
        if i > 0 {
            k[i - 1][i - 1] += &c;
            k[i - 1][i] -= &c;
            k[i][i - 1] -= &c;
        }
        x = p.position.clone();
    }
    k[n - 1][n - 1] += Q::one() / (m.graph().length(e) - &x);
    let mass: Vec<Q> = em.masses().iter().map(|p| p.weight.clone()).collect();
    char_ratio(&k, &mass, z)
}

/// Sample points for polynomial identity checks.
pub fn sample_points(count: usize) -> Vec<Q> {
    (0..count as i64).map(|i| frac(7 * i + 3, 5)).collect()
}
