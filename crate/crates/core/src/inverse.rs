//! Reconstruction of the measure from spectral data.
//!
//! The residues of `-V/(L prod P_e)` give the norming constants, the coupling
//! matrices split them among the edges sharing an eigenvalue, each edge's Weyl
//! function is assembled from its residues, and a Stieltjes continued fraction
//! turns every Weyl function back into point masses.

use num::{BigInt, Integer, One, Signed, Zero};
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::graph::{EdgeMeasure, GraphMeasure, PointMass};
use crate::number::Q;
use crate::poly::Poly;
use crate::ratfun::{Factored, RatFun};
use crate::roots::{AlgebraicValue, RealRoot};
use crate::spectral::{SpectralBasis, SpectralData, Violation};

/// Checks every hypothesis of the inverse problem; returns the canonical form on success.
pub fn validate_spectral_data(data: &SpectralData) -> std::result::Result<SpectralBasis, Vec<Violation>> {
    let basis = SpectralBasis::from_data(data)?;
    let v = basis.global_violations();
    if v.is_empty() {
        Ok(basis)
    } else {
        Err(v)
    }
}

/// `m_e = phi_e'(., 0) / phi_e(., 0)` with its residues.
#[derive(Clone, Debug)]
pub struct WeylFunction {
    pub edge: usize,
    pub m: RatFun,
    /// `(mu, rho_{mu,e})` over the edge spectrum.
    pub rho: Vec<(RealRoot, AlgebraicValue)>,
}

/// Inverse pipeline over validated data.
#[derive(Clone, Debug)]
pub struct Inverse {
    basis: SpectralBasis,
    harmonic: Q,
}

impl Inverse {
    pub fn new(data: &SpectralData) -> Result<Inverse> {
        let basis = validate_spectral_data(data).map_err(Error::InvalidSpectralData)?;
        Ok(Inverse::from_basis(basis))
    }

    pub fn from_basis(basis: SpectralBasis) -> Inverse {
        let harmonic = basis.graph.harmonic_length();
        Inverse { basis, harmonic }
    }

    pub fn basis(&self) -> &SpectralBasis {
        &self.basis
    }

    /// `-V / (L prod P_e)`
    pub fn negated_inverse_green(&self) -> Factored {
        Factored::new(
            -Q::one() / &self.harmonic,
            self.basis
                .factors
                .iter()
                .map(|f| (f.group.clone(), f.kappa as i64 - f.edges.len() as i64))
                .collect(),
        )
    }

    /// `-1/eta` as an expression modulo each edge-spectrum factor, keyed by factor index.
    fn neg_inv_eta_exprs(&self) -> Result<Vec<(usize, Poly)>> {
        let f = self.negated_inverse_green();
        let mut out = Vec::new();
        for (i, b) in self.basis.factors.iter().enumerate() {
            if b.edges.is_empty() {
                continue;
            }
            let idx = f.index_of(b.group.poly()).ok_or_else(|| Error::invariant("edge eigenvalue is not a pole"))?;
            out.push((i, f.residue_expr(idx)?));
        }
        Ok(out)
    }

    /// Norming constants `eta_mu > 0` for every edge eigenvalue.
    pub fn residues_eta(&self) -> Result<Vec<(RealRoot, AlgebraicValue)>> {
        let mut out = Vec::new();
        for (i, r) in self.neg_inv_eta_exprs()? {
            let g = &self.basis.factors[i].group;
            let eta = -&r.inverse_mod(g.poly()).ok_or_else(|| Error::invariant("vanishing residue"))?;
            for (mu, v) in g.roots().iter().zip(g.values(&eta)) {
                if !v.is_positive() {
                    return Err(Error::invariant(format!("eta at {} is not positive", mu.to_decimal(12))));
                }
                out.push((mu.clone(), v));
            }
        }
        out.sort_by(|a, b| a.0.cmp_value(&b.0));
        Ok(out)
    }

    /// Point mass at the central vertex.
    pub fn central_mass(&self) -> Result<Q> {
        let f = self.negated_inverse_green();
        let (dn, dd) = (f.deg_num(), f.deg_den());
        if dn > dd + 1 {
            return Err(Error::InvalidSpectralData(vec![Violation::NotHerglotz {
                reason: "graph spectrum too large for the edge spectra".into(),
            }]));
        }
        if dn <= dd {
            return Ok(Q::zero());
        }
        let w = f.leading();
        if w.is_negative() {
            return Err(Error::invariant("negative central mass"));
        }
        Ok(w)
    }

    /// `rho_{mu,e}` modulo each factor of the edge spectrum of `e`.
    fn rho_exprs(&self, e: usize, eta: &[(usize, Poly)]) -> Result<Vec<(usize, Poly)>> {
        let mut out = Vec::new();
        for (i, r) in eta {
            let b = &self.basis.factors[*i];
            let Some(pos) = b.edges.iter().position(|&d| d == e) else { continue };
            let m = b.group.poly();
            let rho = if b.is_shared() {
                let s = b.coupling_sum_expr(pos).ok_or_else(|| Error::invariant("missing coupling"))?;
                let inv = s.inverse_mod(m).ok_or_else(|| Error::invariant("vanishing coupling sum"))?;
                (r * &inv).rem(m)
            } else {
                r.clone()
            };
            out.push((*i, rho));
        }
        Ok(out)
    }

    fn weyl_from(&self, e: usize, eta: &[(usize, Poly)]) -> Result<WeylFunction> {
        let rho = self.rho_exprs(e, eta)?;
        let length = self.basis.graph.length(e);
        let den: Poly = rho.iter().map(|(i, _)| self.basis.factors[*i].group.poly().clone()).product();
        let mut constant = -Q::one() / length;
        let mut num = Poly::zero();
        let mut listed = Vec::new();
        for (i, r) in &rho {
            let g = &self.basis.factors[*i].group;
            let b = g.poly();
            // sum over the roots of b of rho/(z - mu) is n_b / b
            let n_b = (r * &b.derivative()).rem(b);
            constant -= n_b.coeff(0) / b.coeff(0);
            num = &num + &(&n_b * &den.exact_div(b).expect("factor of the product"));
            for (mu, v) in g.roots().iter().zip(g.values(r)) {
                if !v.is_negative_value() {
                    return Err(Error::invariant("non-negative residue of a Weyl function"));
                }
                listed.push((mu.clone(), v));
            }
        }
        listed.sort_by(|a, b| a.0.cmp_value(&b.0));
        let num = &num + &den.scale(&constant);
        Ok(WeylFunction { edge: e, m: RatFun::from_coprime(num, den), rho: listed })
    }

    pub fn weyl_functions(&self) -> Result<Vec<WeylFunction>> {
        let eta = self.neg_inv_eta_exprs()?;
        let out = (0..self.basis.graph.len())
            .into_par_iter()
            .map(|e| self.weyl_from(e, &eta))
            .collect::<Result<Vec<_>>>()?;
        self.check_reconstruction(&out)?;
        Ok(out)
    }

    /// `w_c z + sum m_e = -V/(L prod P_e)`, checked after clearing denominators.
    fn check_reconstruction(&self, weyl: &[WeylFunction]) -> Result<()> {
        let w = self.central_mass()?;
        let dens: Vec<&Poly> = weyl.iter().map(|m| m.m.denominator()).collect();
        let all: Poly = dens.iter().map(|d| (*d).clone()).product();
        let mut lhs = (&Poly::z() * &all).scale(&w);
        for (k, m) in weyl.iter().enumerate() {
            let others: Poly = dens.iter().enumerate().filter(|(j, _)| *j != k).map(|(_, d)| (*d).clone()).product();
            lhs = &lhs + &(m.m.numerator() * &others);
        }
        // prod of monic edge polynomials times -V/(L prod P_e)
        let v = self.basis.graph_poly();
        let p: Poly = (0..self.basis.graph.len()).map(|e| self.basis.edge_poly(e)).product();
        let rhs = (&v * &all).scale(&(-Q::one() / &self.harmonic));
        if &lhs * &p != rhs {
            return Err(Error::invariant("Weyl functions do not reproduce -V/(L prod P_e)"));
        }
        Ok(())
    }

    pub fn solve(&self) -> Result<GraphMeasure> {
        let central = self.central_mass()?;
        let weyl = self.weyl_functions()?;
        let graph = &self.basis.graph;
        let edges = weyl
            .par_iter()
            .map(|w| stieltjes_cf_reconstruct(&w.m, graph.length(w.edge)))
            .collect::<Result<Vec<_>>>()?;
        GraphMeasure::new(graph.clone(), central, edges)
    }

    /// `sum_mu eta_mu s_e(mu) / (mu^2 Pdot_e(mu)^2)` over the edge spectrum of `e`.
    pub fn regularity_sum(&self, e: usize) -> Result<Q> {
        let eta = self.neg_inv_eta_exprs()?;
        let p = self.basis.edge_poly(e);
        let mut total = Q::zero();
        for (i, r) in eta {
            let b = &self.basis.factors[i];
            let Some(pos) = b.edges.iter().position(|&d| d == e) else { continue };
            let m = b.group.poly();
            let eta_expr = -&r.inverse_mod(m).ok_or_else(|| Error::invariant("vanishing residue"))?;
            let s = if b.is_shared() {
                b.coupling_sum_expr(pos).ok_or_else(|| Error::invariant("missing coupling"))?
            } else {
                Poly::one()
            };
            let dp = p.derivative().rem(m);
            let zd = (&(&Poly::z() * &dp) * &(&Poly::z() * &dp)).rem(m);
            let inv = zd.inverse_mod(m).ok_or_else(|| Error::invariant("multiple edge eigenvalue"))?;
            total += b.group.trace(&(&(&eta_expr * &s) * &inv).rem(m));
        }
        Ok(total)
    }
}

trait NegativeValue {
    fn is_negative_value(&self) -> bool;
}

impl NegativeValue for AlgebraicValue {
    fn is_negative_value(&self) -> bool {
        self.sign() == std::cmp::Ordering::Less
    }
}

fn trim(mut v: Vec<BigInt>) -> Vec<BigInt> {
    while v.last().is_some_and(Zero::is_zero) {
        v.pop();
    }
    v
}

fn lin_comb(x: &BigInt, a: &[BigInt], y: &BigInt, b: &[BigInt]) -> Vec<BigInt> {
    let n = a.len().max(b.len());
    let z = BigInt::zero();
    trim((0..n).map(|i| x * a.get(i).unwrap_or(&z) - y * b.get(i).unwrap_or(&z)).collect())
}

fn remove_content(a: &mut [BigInt], b: &mut [BigInt]) {
    let g = a.iter().chain(b.iter()).fold(BigInt::zero(), |g, c| g.gcd(c));
    if !g.is_zero() && !g.is_one() {
        for c in a.iter_mut().chain(b.iter_mut()) {
            *c /= &g;
        }
    }
}

/// Continued-fraction expansion of `-1/m` into segment lengths and masses.
///
/// Runs fraction-free: `-1/m = a/b` with integer polynomials, rescaled
/// jointly after every step.
pub fn stieltjes_cf_reconstruct(m: &RatFun, length: &Q) -> Result<EdgeMeasure> {
    if m.is_zero() {
        return Err(Error::invalid("zero Weyl function"));
    }
    let (den, dd) = m.denominator().integer_image();
    let (num, dn) = m.numerator().integer_image();
    let mut a: Vec<BigInt> = den.iter().map(|c| -(c * &dn)).collect();
    let mut b: Vec<BigInt> = num.iter().map(|c| c * &dd).collect();
    remove_content(&mut a, &mut b);
    let mut x = Q::zero();
    let mut masses = Vec::new();
    loop {
        if a.len() != b.len() {
            return Err(Error::invalid("continued fraction: unbalanced degrees"));
        }
        let (la, lb) = (a.last().expect("nonzero").clone(), b.last().expect("nonzero").clone());
        let d = Q::new(la.clone(), lb.clone());
        if !d.is_positive() {
            return Err(Error::invalid(format!("continued fraction: non-positive segment length {d}")));
        }
        x += &d;
        // lb (a - d b)
        let r = lin_comb(&lb, &a, &la, &b);
        if r.is_empty() {
            break;
        }
        if b.len() != r.len() + 1 {
            return Err(Error::invalid("continued fraction: degree did not drop by one"));
        }
        let lr = r.last().expect("nonzero").clone();
        let w = Q::new(-(&lb * &lb), lr.clone());
        if !w.is_positive() {
            return Err(Error::invalid(format!("continued fraction: non-positive mass {w}")));
        }
        masses.push(PointMass::new(x.clone(), w));
        // -1/m continues as  lr r / (lr lb b - z lb^2 r)
        let mut shifted = vec![BigInt::zero()];
        shifted.extend(r.iter().cloned());
        let next_b = lin_comb(&(&lr * &lb), &b, &(&lb * &lb), &shifted);
        a = r.iter().map(|c| c * &lr).collect();
        b = next_b;
        remove_content(&mut a, &mut b);
    }
    if x != *length {
        return Err(Error::invariant(format!("segment lengths sum to {x}, expected {length}")));
    }
    EdgeMeasure::new(masses, length)
}

pub fn residues_eta(data: &SpectralData) -> Result<Vec<(RealRoot, AlgebraicValue)>> {
    Inverse::new(data)?.residues_eta()
}

pub fn central_mass(data: &SpectralData) -> Result<Q> {
    Inverse::new(data)?.central_mass()
}

pub fn edge_weyl_functions(data: &SpectralData) -> Result<Vec<WeylFunction>> {
    Inverse::new(data)?.weyl_functions()
}

pub fn solve(data: &SpectralData) -> Result<GraphMeasure> {
    Inverse::new(data)?.solve()
}

pub fn regularity_sum(data: &SpectralData, edge: usize) -> Result<Q> {
    Inverse::new(data)?.regularity_sum(edge)
}
