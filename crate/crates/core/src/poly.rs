//! Dense univariate polynomials with exact rational coefficients.
//!
//! Coefficients are stored in ascending degree order with no trailing zeros,
//! so the representation of every polynomial is unique. Greatest common
//! divisors run over primitive integer images (pseudo-remainder sequences
//! with content removal) and short-circuit through a modular coprimality test.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num::bigint::Sign;
use num::{BigInt, Integer, One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};
use crate::number::Q;

#[derive(Clone, PartialEq, Eq, Hash, Default)]
pub struct Poly {
    coeffs: Vec<Q>,
}

impl Poly {
    pub fn new(mut coeffs: Vec<Q>) -> Self {
        while coeffs.last().is_some_and(Zero::is_zero) {
            coeffs.pop();
        }
        Poly { coeffs }
    }

    pub fn from_ints(coeffs: &[i64]) -> Self {
        Poly::new(coeffs.iter().map(|&c| Q::from_integer(c.into())).collect())
    }

    pub fn zero() -> Self {
        Poly { coeffs: Vec::new() }
    }

    pub fn one() -> Self {
        Poly::constant(Q::one())
    }

    pub fn constant(c: Q) -> Self {
        Poly::new(vec![c])
    }

    /// The monomial `z`.
    pub fn z() -> Self {
        Poly::new(vec![Q::zero(), Q::one()])
    }

    /// `c * z^k`
    pub fn monomial(c: Q, k: usize) -> Self {
        let mut coeffs = vec![Q::zero(); k];
        coeffs.push(c);
        Poly::new(coeffs)
    }

    /// `z - r`
    pub fn linear_root(r: &Q) -> Self {
        Poly::new(vec![-r.clone(), Q::one()])
    }

    pub fn coeffs(&self) -> &[Q] {
        &self.coeffs
    }

    pub fn coeff(&self, k: usize) -> Q {
        self.coeffs.get(k).cloned().unwrap_or_else(Q::zero)
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    /// Degree with the zero polynomial mapped to 0; for loops where that is harmless.
    fn deg0(&self) -> usize {
        self.degree().unwrap_or(0)
    }

    pub fn is_constant(&self) -> bool {
        self.coeffs.len() <= 1
    }

    pub fn leading(&self) -> Q {
        self.coeffs.last().cloned().unwrap_or_else(Q::zero)
    }

    pub fn eval(&self, x: &Q) -> Q {
        let mut acc = Q::zero();
        for c in self.coeffs.iter().rev() {
            acc = acc * x + c;
        }
        acc
    }

    pub fn derivative(&self) -> Poly {
        Poly::new(
            self.coeffs
                .iter()
                .enumerate()
                .skip(1)
                .map(|(k, c)| c * Q::from_integer(BigInt::from(k)))
                .collect(),
        )
    }

    /// `(A, d)` with integer coefficients `A` and `self = A / d`.
    pub(crate) fn integer_image(&self) -> (Vec<BigInt>, BigInt) {
        let mut d = BigInt::one();
        for c in &self.coeffs {
            if !c.denom().is_one() {
                d = d.lcm(c.denom());
            }
        }
        let a = self.coeffs.iter().map(|c| c.numer() * (&d / c.denom())).collect();
        (a, d)
    }

    fn from_integer_image(a: Vec<BigInt>, d: &BigInt) -> Poly {
        Poly::new(a.into_iter().map(|x| Q::new(x, d.clone())).collect())
    }

    pub fn scale(&self, c: &Q) -> Poly {
        if c.is_zero() {
            return Poly::zero();
        }
        Poly { coeffs: self.coeffs.iter().map(|a| a * c).collect() }
    }

    pub fn monic(&self) -> Poly {
        if self.is_zero() {
            return Poly::zero();
        }
        self.scale(&(Q::one() / self.leading()))
    }

    /// Rescaled so that `p(0) = 1`; `None` when `p(0) = 0`.
    pub fn normalized_at_zero(&self) -> Option<Poly> {
        let c0 = self.coeff(0);
        if c0.is_zero() {
            None
        } else {
            Some(self.scale(&(Q::one() / c0)))
        }
    }

    pub fn pow(&self, k: usize) -> Poly {
        let mut acc = Poly::one();
        for _ in 0..k {
            acc = &acc * self;
        }
        acc
    }

    /// Euclidean division; panics on a zero divisor.
    pub fn div_rem(&self, d: &Poly) -> (Poly, Poly) {
        assert!(!d.is_zero(), "polynomial division by zero");
        let dd = d.deg0();
        if self.is_zero() || self.deg0() < dd {
            return (Poly::zero(), self.clone());
        }
        // lb^k a = q b + r over the integers, a = A/da, d = B/db
        let (a, da) = self.integer_image();
        let (b, db) = d.integer_image();
        let lb = b.last().expect("nonzero").clone();
        let mut rem = a;
        let mut quot = vec![BigInt::zero(); rem.len() - dd];
        let steps = quot.len();
        for k in (0..steps).rev() {
            let c = rem[k + dd].clone();
            if !lb.is_one() {
                for r in rem.iter_mut().take(k + dd) {
                    *r *= &lb;
                }
                for q in quot.iter_mut().skip(k + 1) {
                    *q *= &lb;
                }
            }
            if !c.is_zero() {
                for (j, bc) in b.iter().enumerate().take(dd) {
                    rem[k + j] -= &c * bc;
                }
            }
            rem[k + dd] = BigInt::zero();
            quot[k] = c;
        }
        rem.truncate(dd);
        // remainder and quotient both carry lb^steps / da; the quotient also db
        let scale = &da * lb.pow(steps as u32);
        let quot = Poly::from_integer_image(quot.into_iter().map(|q| q * &db).collect(), &scale);
        (quot, Poly::from_integer_image(rem, &scale))
    }

    pub fn rem(&self, d: &Poly) -> Poly {
        self.div_rem(d).1
    }

    /// Exact quotient; `None` when `d` does not divide `self`.
    pub fn exact_div(&self, d: &Poly) -> Option<Poly> {
        let (q, r) = self.div_rem(d);
        r.is_zero().then_some(q)
    }

    pub fn divides(&self, other: &Poly) -> bool {
        other.rem(self).is_zero()
    }

    /// Monic greatest common divisor (zero only when both inputs are zero).
    pub fn gcd(&self, other: &Poly) -> Poly {
        if self.is_zero() {
            return other.monic();
        }
        if other.is_zero() {
            return self.monic();
        }
        if self.is_constant() || other.is_constant() {
            return Poly::one();
        }
        let a = IntPoly::primitive_of(self);
        let b = IntPoly::primitive_of(other);
        if a.coprime_mod_p(&b) {
            return Poly::one();
        }
        a.gcd(&b).to_poly().monic()
    }

    pub fn is_coprime(&self, other: &Poly) -> bool {
        self.gcd(other).is_constant()
    }

    pub fn is_squarefree(&self) -> bool {
        self.is_constant() || self.is_coprime(&self.derivative())
    }

    /// Monic square-free part (product of the distinct irreducible factors).
    pub fn squarefree_part(&self) -> Poly {
        if self.is_constant() {
            return Poly::one();
        }
        let g = self.gcd(&self.derivative());
        self.exact_div(&g).expect("gcd divides").monic()
    }

    /// Yun's square-free decomposition: returns `(k, s_k)` with monic, nonconstant,
    /// pairwise coprime `s_k` such that `self = c * prod s_k^k`.
    pub fn squarefree_decomposition(&self) -> Vec<(usize, Poly)> {
        let mut out = Vec::new();
        if self.is_constant() {
            return out;
        }
        let f = self.monic();
        let df = f.derivative();
        let a0 = f.gcd(&df);
        if a0.is_constant() {
            out.push((1, f));
            return out;
        }
        let mut b = f.exact_div(&a0).expect("gcd divides");
        let mut c = df.exact_div(&a0).expect("gcd divides");
        let mut d = &c - &b.derivative();
        let mut k = 1;
        loop {
            let a = b.gcd(&d);
            if !a.is_constant() {
                out.push((k, a.monic()));
            }
            b = b.exact_div(&a).expect("gcd divides");
            if b.is_constant() {
                break;
            }
            c = d.exact_div(&a).expect("gcd divides");
            d = &c - &b.derivative();
            k += 1;
        }
        out
    }

    /// Multiplicative inverse modulo `m`, if `gcd(self, m) = 1`.
    pub fn inverse_mod(&self, m: &Poly) -> Option<Poly> {
        let a = self.rem(m);
        if a.is_zero() {
            return None;
        }
        if m.deg0() == 0 {
            return None;
        }
        // extended Euclid with monic normalization of the remainders
        let (mut r0, mut r1) = (m.clone(), a);
        let (mut t0, mut t1) = (Poly::zero(), Poly::one());
        while !r1.is_zero() {
            let (quot, r2) = r0.div_rem(&r1);
            let t2 = &t0 - &(&quot * &t1);
            r0 = r1;
            t0 = t1;
            let lead = r2.leading();
            if r2.is_zero() {
                r1 = r2;
                t1 = t2;
            } else {
                let inv = Q::one() / lead;
                r1 = r2.scale(&inv);
                t1 = t2.scale(&inv);
            }
        }
        if r0.degree() != Some(0) {
            return None;
        }
        let inv = Q::one() / r0.leading();
        Some(t0.scale(&inv).rem(m))
    }

    /// Builds `prod (1 - z/r)^k` over distinct positive roots.
    pub fn from_roots(roots: &[(Q, usize)]) -> Result<Poly> {
        let mut seen: Vec<&Q> = Vec::new();
        let mut acc = Poly::one();
        for (r, k) in roots {
            if !r.is_positive() {
                return Err(Error::InvalidInput(format!("root {r} is not positive")));
            }
            if seen.contains(&r) {
                return Err(Error::InvalidInput(format!("repeated root value {r}")));
            }
            seen.push(r);
            let factor = Poly::new(vec![Q::one(), -Q::one() / r]);
            acc = &acc * &factor.pow(*k);
        }
        Ok(acc)
    }

    /// Substitutes `z -> -z`.
    pub fn reflect(&self) -> Poly {
        Poly::new(
            self.coeffs
                .iter()
                .enumerate()
                .map(|(k, c)| if k % 2 == 1 { -c.clone() } else { c.clone() })
                .collect(),
        )
    }

    /// Newton power sums `p_k = sum r^k` over all complex roots of `self`, `k = 0..=n`.
    pub fn power_sums(&self, n: usize) -> Vec<Q> {
        let deg = self.deg0();
        let m = self.monic();
        // monic: z^d + a_{d-1} z^{d-1} + ... ; e-style coefficients c_j = coeff of z^{d-j}
        let c = |j: usize| -> Q { if j > deg { Q::zero() } else { m.coeff(deg - j) } };
        let mut p = vec![Q::from_integer(BigInt::from(deg))];
        for k in 1..=n {
            let mut s = Q::zero();
            for j in 1..k {
                s += c(j) * &p[k - j];
            }
            if k <= deg {
                s += c(k) * Q::from_integer(BigInt::from(k));
            }
            p.push(-s);
        }
        p
    }

    /// `sum_{f(r)=0} h(r)` over all complex roots of squarefree `f`, exactly.
    pub fn trace_over_roots(h: &Poly, f: &Poly) -> Q {
        let h = h.rem(f);
        let sums = f.power_sums(h.deg0());
        h.coeffs.iter().zip(sums.iter()).map(|(a, s)| a * s).sum()
    }
}

/// Pairwise-coprime square-free refinement of a family of polynomials:
/// every input's square-free part is a product of some of the returned factors.
pub fn gcd_free_basis(polys: &[Poly]) -> Vec<Poly> {
    let mut basis: Vec<Poly> = Vec::new();
    for p in polys {
        if p.is_constant() {
            continue;
        }
        let mut f = p.squarefree_part();
        let mut i = 0;
        let mut added = Vec::new();
        while i < basis.len() && !f.is_constant() {
            let g = f.gcd(&basis[i]);
            if g.is_constant() {
                i += 1;
                continue;
            }
            let b = basis.swap_remove(i);
            let rest = b.exact_div(&g).expect("gcd divides");
            f = f.exact_div(&g).expect("gcd divides");
            added.push(g.monic());
            if !rest.is_constant() {
                added.push(rest.monic());
            }
        }
        basis.extend(added);
        if !f.is_constant() {
            basis.push(f.monic());
        }
    }
    basis
}

impl fmt::Debug for Poly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Poly({self})")
    }
}

impl fmt::Display for Poly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut first = true;
        for (k, c) in self.coeffs.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            match k {
                0 => write!(f, "{c}")?,
                1 => write!(f, "({c})z")?,
                _ => write!(f, "({c})z^{k}")?,
            }
        }
        Ok(())
    }
}

impl Add for &Poly {
    type Output = Poly;
    fn add(self, rhs: &Poly) -> Poly {
        let n = self.coeffs.len().max(rhs.coeffs.len());
        Poly::new((0..n).map(|k| self.coeff(k) + rhs.coeff(k)).collect())
    }
}

impl Sub for &Poly {
    type Output = Poly;
    fn sub(self, rhs: &Poly) -> Poly {
        let n = self.coeffs.len().max(rhs.coeffs.len());
        Poly::new((0..n).map(|k| self.coeff(k) - rhs.coeff(k)).collect())
    }
}

impl Mul for &Poly {
    type Output = Poly;
    fn mul(self, rhs: &Poly) -> Poly {
        if self.is_zero() || rhs.is_zero() {
            return Poly::zero();
        }
        let (a, da) = self.integer_image();
        let (b, db) = rhs.integer_image();
        let mut out = vec![BigInt::zero(); a.len() + b.len() - 1];
        for (i, x) in a.iter().enumerate() {
            if x.is_zero() {
                continue;
            }
            for (j, y) in b.iter().enumerate() {
                out[i + j] += x * y;
            }
        }
        Poly::from_integer_image(out, &(da * db))
    }
}

impl Neg for &Poly {
    type Output = Poly;
    fn neg(self) -> Poly {
        Poly { coeffs: self.coeffs.iter().map(|c| -c.clone()).collect() }
    }
}

macro_rules! forward_owned {
    ($tr:ident, $m:ident) => {
        impl $tr for Poly {
            type Output = Poly;
            fn $m(self, rhs: Poly) -> Poly {
                (&self).$m(&rhs)
            }
        }
    };
}
forward_owned!(Add, add);
forward_owned!(Sub, sub);
forward_owned!(Mul, mul);

impl std::iter::Product for Poly {
    fn product<I: Iterator<Item = Poly>>(iter: I) -> Poly {
        iter.fold(Poly::one(), |acc, p| &acc * &p)
    }
}

/// Integer polynomial used for gcd and sign-variation computations.
#[derive(Clone, Debug, PartialEq, Eq)]
pub(crate) struct IntPoly {
    pub(crate) c: Vec<BigInt>,
}

const PRIMES: [u64; 2] = [2_305_843_009_213_693_951, 4_611_686_018_427_387_847];

impl IntPoly {
    fn trim(mut c: Vec<BigInt>) -> Self {
        while c.last().is_some_and(Zero::is_zero) {
            c.pop();
        }
        IntPoly { c }
    }

    /// Positive rational multiple of `p` with coprime integer coefficients.
    pub(crate) fn primitive_of(p: &Poly) -> Self {
        let lcm = p.coeffs().iter().fold(BigInt::one(), |acc, c| acc.lcm(c.denom()));
        let ints = p
            .coeffs()
            .iter()
            .map(|c| (c * Q::from_integer(lcm.clone())).to_integer())
            .collect();
        IntPoly::trim(ints).primitive()
    }

    pub(crate) fn is_zero(&self) -> bool {
        self.c.is_empty()
    }

    pub(crate) fn degree(&self) -> usize {
        self.c.len().saturating_sub(1)
    }

    fn lead(&self) -> &BigInt {
        self.c.last().expect("nonzero")
    }

    /// Divides by the (positive) content.
    pub(crate) fn primitive(self) -> Self {
        let content = self.c.iter().fold(BigInt::zero(), |acc, c| acc.gcd(c));
        if content.is_zero() || content.is_one() {
            return self;
        }
        IntPoly { c: self.c.into_iter().map(|x| x / &content).collect() }
    }

    pub(crate) fn to_poly(&self) -> Poly {
        Poly::new(self.c.iter().map(|x| Q::from_integer(x.clone())).collect())
    }

    pub(crate) fn derivative(&self) -> Self {
        IntPoly::trim(self.c.iter().enumerate().skip(1).map(|(k, x)| x * BigInt::from(k)).collect())
    }

    /// `k * self mod b` for some positive integer `k`.
    pub(crate) fn positive_prem(&self, b: &IntPoly) -> IntPoly {
        let db = b.degree();
        let lb = b.lead().clone();
        let lb_abs = lb.abs();
        let lb_neg = lb.sign() == Sign::Minus;
        let mut r = self.c.clone();
        while r.len() > db && !r.is_empty() {
            let k = r.len() - 1 - db;
            let lr = r.last().unwrap().clone();
            for x in r.iter_mut() {
                *x *= &lb_abs;
            }
            for (j, bc) in b.c.iter().enumerate() {
                let t = &lr * bc;
                if lb_neg {
                    r[k + j] += t;
                } else {
                    r[k + j] -= t;
                }
            }
            debug_assert!(r.last().unwrap().is_zero());
            r.pop();
            while r.last().is_some_and(Zero::is_zero) {
                r.pop();
            }
        }
        IntPoly::trim(r).primitive()
    }

    pub(crate) fn gcd(&self, other: &IntPoly) -> IntPoly {
        let (mut a, mut b) = if self.degree() >= other.degree() {
            (self.clone(), other.clone())
        } else {
            (other.clone(), self.clone())
        };
        while !b.is_zero() {
            let r = a.positive_prem(&b);
            a = b;
            b = r;
        }
        a.primitive()
    }

    /// `true` only if the two polynomials are certainly coprime over Q.
    pub(crate) fn coprime_mod_p(&self, other: &IntPoly) -> bool {
        PRIMES.iter().any(|&p| {
            let a = reduce_mod(&self.c, p);
            let b = reduce_mod(&other.c, p);
            if a.last().copied().unwrap_or(0) == 0 || b.last().copied().unwrap_or(0) == 0 {
                return false;
            }
            gcd_mod_p_degree(a, b, p) == 0
        })
    }

    /// Sign of `self(num/den)` for `den > 0`, via the homogenized sum.
    pub(crate) fn sign_at(&self, num: &BigInt, den: &BigInt) -> Sign {
        if self.c.is_empty() {
            return Sign::NoSign;
        }
        let mut acc = BigInt::zero();
        let mut dpow = BigInt::one();
        for x in self.c.iter().rev() {
            acc = acc * num + x * &dpow;
            dpow *= den;
        }
        acc.sign()
    }
}

fn reduce_mod(c: &[BigInt], p: u64) -> Vec<u64> {
    let pb = BigInt::from(p);
    let mut out: Vec<u64> = c.iter().map(|x| x.mod_floor(&pb).to_u64().unwrap()).collect();
    while out.last() == Some(&0) {
        out.pop();
    }
    out
}

fn mulmod(a: u64, b: u64, p: u64) -> u64 {
    ((a as u128 * b as u128) % p as u128) as u64
}

fn powmod(mut a: u64, mut e: u64, p: u64) -> u64 {
    let mut r = 1u64;
    while e > 0 {
        if e & 1 == 1 {
            r = mulmod(r, a, p);
        }
        a = mulmod(a, a, p);
        e >>= 1;
    }
    r
}

fn gcd_mod_p_degree(mut a: Vec<u64>, mut b: Vec<u64>, p: u64) -> usize {
    if a.len() < b.len() {
        std::mem::swap(&mut a, &mut b);
    }
    while !b.is_empty() {
        let inv = powmod(*b.last().unwrap(), p - 2, p);
        let db = b.len() - 1;
        while a.len() > db && !a.is_empty() {
            let k = a.len() - 1 - db;
            let f = mulmod(*a.last().unwrap(), inv, p);
            for (j, &bc) in b.iter().enumerate() {
                let t = mulmod(f, bc, p);
                a[k + j] = (a[k + j] + p - t) % p;
            }
            while a.last() == Some(&0) {
                a.pop();
            }
        }
        std::mem::swap(&mut a, &mut b);
    }
    a.len().saturating_sub(1)
}
