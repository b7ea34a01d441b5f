//! Rational functions, partial fractions and the rational Herglotz–Nevanlinna test.

use std::cmp::Ordering;
use std::fmt;

use num::{One, Zero};

use crate::error::{Error, Result};
use crate::number::{self, Q};
use crate::poly::Poly;
use crate::roots::{isolate_roots, AlgebraicValue, RealRoot, RootGroup};

/// A reduced quotient `num / den` with monic denominator.
#[derive(Clone, PartialEq, Eq)]
pub struct RatFun {
    num: Poly,
    den: Poly,
}

impl RatFun {
    pub fn new(num: Poly, den: Poly) -> Result<RatFun> {
        if den.is_zero() {
            return Err(Error::invalid("zero denominator"));
        }
        let g = num.gcd(&den);
        let (num, den) = if g.is_constant() {
            (num, den)
        } else {
            (num.exact_div(&g).expect("gcd divides"), den.exact_div(&g).expect("gcd divides"))
        };
        Ok(RatFun::from_coprime(num, den))
    }

    /// Skips the gcd; the caller guarantees the two polynomials are coprime.
    pub fn from_coprime(num: Poly, den: Poly) -> RatFun {
        let lead = den.leading();
        RatFun { num: num.scale(&(Q::one() / &lead)), den: den.monic() }
    }

    pub fn poly(p: Poly) -> RatFun {
        RatFun { num: p, den: Poly::one() }
    }

    pub fn constant(c: Q) -> RatFun {
        RatFun::poly(Poly::constant(c))
    }

    pub fn numerator(&self) -> &Poly {
        &self.num
    }

    pub fn denominator(&self) -> &Poly {
        &self.den
    }

    pub fn is_zero(&self) -> bool {
        self.num.is_zero()
    }

    /// `None` at a pole.
    pub fn eval(&self, x: &Q) -> Option<Q> {
        let d = self.den.eval(x);
        (!d.is_zero()).then(|| self.num.eval(x) / d)
    }

    pub fn add(&self, other: &RatFun) -> RatFun {
        let num = &(&self.num * &other.den) + &(&other.num * &self.den);
        RatFun::new(num, &self.den * &other.den).expect("nonzero denominator")
    }

    pub fn neg(&self) -> RatFun {
        RatFun { num: -&self.num, den: self.den.clone() }
    }

    pub fn mul(&self, other: &RatFun) -> RatFun {
        RatFun::new(&self.num * &other.num, &self.den * &other.den).expect("nonzero denominator")
    }

    pub fn recip(&self) -> Result<RatFun> {
        if self.num.is_zero() {
            return Err(Error::invalid("reciprocal of zero"));
        }
        Ok(RatFun::from_coprime(self.den.clone(), self.num.clone()))
    }

    /// `-1/f`
    pub fn neg_recip(&self) -> Result<RatFun> {
        Ok(self.recip()?.neg())
    }

    /// Partial fraction form `alpha + beta z + sum residue/(z - mu)`.
    pub fn partial_fractions(&self) -> Result<PartialFractions> {
        let dn = self.num.degree().unwrap_or(0);
        let dd = self.den.degree().unwrap_or(0);
        if !self.num.is_zero() && dn > dd + 1 {
            return Err(Error::invalid(format!(
                "numerator degree {dn} exceeds denominator degree {dd} by more than one"
            )));
        }
        let (quot, rem) = self.num.div_rem(&self.den);
        let mut poles = Vec::new();
        if dd > 0 {
            if !self.den.is_squarefree() {
                return Err(Error::invalid("denominator has a repeated root"));
            }
            let group = RootGroup::new(&self.den)
                .ok_or_else(|| Error::invalid("denominator has non-real roots"))?;
            let inv = self.den.derivative().inverse_mod(&self.den).expect("simple roots");
            let expr = (&rem * &inv).rem(&self.den);
            for (r, v) in group.roots().iter().zip(group.values(&expr)) {
                poles.push((r.clone(), v));
            }
        }
        Ok(PartialFractions { alpha: quot.coeff(0), beta: quot.coeff(1), poles })
    }

    /// Rational Herglotz–Nevanlinna test with an interlacing certificate.
    pub fn herglotz(&self) -> HerglotzCertificate {
        if self.num.is_zero() {
            return HerglotzCertificate::fail(Vec::new(), "zero function");
        }
        let dd = self.den.degree().unwrap_or(0);
        if dd > 0 && !self.den.is_squarefree() {
            return HerglotzCertificate::fail(Vec::new(), "non-simple pole");
        }
        let poles: Vec<(RealRoot, usize)> =
            isolate_roots(&self.den).into_iter().map(|r| (r, 1)).collect();
        if poles.len() != dd {
            return HerglotzCertificate::fail(Vec::new(), "non-real pole");
        }
        let zeros: Vec<(RealRoot, usize)> = self
            .num
            .squarefree_decomposition()
            .into_iter()
            .flat_map(|(k, s)| isolate_roots(&s).into_iter().map(move |r| (r, k)))
            .collect();
        herglotz_test(
            number::sign(&self.num.leading()),
            self.num.degree().unwrap_or(0),
            dd,
            zeros,
            poles,
        )
    }

    pub fn is_rational_herglotz(&self) -> bool {
        self.herglotz().is_herglotz
    }
}

impl fmt::Debug for RatFun {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}) / ({})", self.num, self.den)
    }
}

#[derive(Clone, Debug)]
pub struct PartialFractions {
    pub alpha: Q,
    pub beta: Q,
    /// `(mu, residue)` in the `residue / (z - mu)` convention, increasing in `mu`.
    pub poles: Vec<(RealRoot, AlgebraicValue)>,
}

impl PartialFractions {
    /// Reassembles the rational function exactly.
    pub fn reconstruct(&self) -> Result<RatFun> {
        let mut acc = RatFun::poly(Poly::new(vec![self.alpha.clone(), self.beta.clone()]));
        let mut done = vec![false; self.poles.len()];
        for i in 0..self.poles.len() {
            if done[i] {
                continue;
            }
            let (root, res) = &self.poles[i];
            let g = root.poly().clone();
            let expr = res.expr().rem(&g);
            // all conjugate poles must carry the same residue expression
            for j in i..self.poles.len() {
                let (r2, v2) = &self.poles[j];
                if r2.is_root_of(&g) {
                    if !AlgebraicValue::new(r2.clone(), &expr).same_value(v2) {
                        return Err(Error::invalid("residues are not conjugate"));
                    }
                    done[j] = true;
                }
            }
            acc = acc.add(&conjugate_sum(&g, &expr));
        }
        Ok(acc)
    }
}

/// `sum_{g(mu)=0} c(mu)/(z - mu)` for square-free `g`, as a rational function.
pub fn conjugate_sum(g: &Poly, c: &Poly) -> RatFun {
    let num = (c * &g.derivative()).rem(g);
    RatFun::new(num, g.clone()).expect("nonzero denominator")
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Node {
    Zero,
    Pole,
}

#[derive(Clone, Debug)]
pub struct HerglotzCertificate {
    pub is_herglotz: bool,
    pub reason: Option<String>,
    /// Real zeros and poles in increasing order, with multiplicities.
    pub sequence: Vec<(RealRoot, Node, usize)>,
}

impl HerglotzCertificate {
    fn fail(sequence: Vec<(RealRoot, Node, usize)>, reason: impl Into<String>) -> Self {
        HerglotzCertificate { is_herglotz: false, reason: Some(reason.into()), sequence }
    }

    pub fn poles(&self) -> usize {
        self.sequence.iter().filter(|s| s.1 == Node::Pole).count()
    }

    pub fn zeros(&self) -> usize {
        self.sequence.iter().filter(|s| s.1 == Node::Zero).map(|s| s.2).sum()
    }

    /// Zeros and poles are simple and strictly alternate.
    pub fn interlaces(&self) -> bool {
        self.sequence.iter().all(|s| s.2 == 1)
            && self.sequence.windows(2).all(|w| w[0].1 != w[1].1)
    }
}

/// Decides whether `c * prod (z - a_i)^{k_i} * (complex pairs) / prod (z - b_j)` is
/// Herglotz–Nevanlinna, given the sign of `c`, the degrees, the real zeros with
/// multiplicities and the (real, simple) poles.
///
/// Uses only the signs of the residues, `sign(c) prod sign(b_j - a_i)^{k_i}
/// prod_{l != j} sign(b_j - b_l)`, which must all be negative.
pub fn herglotz_test(
    lead_sign: Ordering,
    deg_num: usize,
    deg_den: usize,
    zeros: Vec<(RealRoot, usize)>,
    poles: Vec<(RealRoot, usize)>,
) -> HerglotzCertificate {
    let mut seq: Vec<(RealRoot, Node, usize)> = zeros
        .into_iter()
        .map(|(r, k)| (r, Node::Zero, k))
        .chain(poles.into_iter().map(|(r, k)| (r, Node::Pole, k)))
        .collect();
    seq.sort_by(|a, b| a.0.cmp_value(&b.0));
    if seq.windows(2).any(|w| w[0].0.same_value(&w[1].0)) {
        return HerglotzCertificate::fail(seq, "zero and pole coincide");
    }
    if lead_sign == Ordering::Equal {
        return HerglotzCertificate::fail(seq, "zero function");
    }
    if deg_num > deg_den + 1 {
        return HerglotzCertificate::fail(seq, "numerator degree exceeds denominator degree + 1");
    }
    if deg_num == deg_den + 1 && lead_sign != Ordering::Greater {
        return HerglotzCertificate::fail(seq, "negative linear coefficient");
    }
    if let Some(p) = seq.iter().find(|s| s.2 != 1) {
        let kind = if p.1 == Node::Pole { "pole" } else { "zero" };
        let msg = format!("{kind} of order {} at {}", p.2, p.0.to_decimal(12));
        return HerglotzCertificate::fail(seq, msg);
    }
    // sign of the residue at each pole: count the nodes to its right
    let positive = lead_sign == Ordering::Greater;
    let n = seq.len();
    let mut right = 0usize;
    let mut bad = None;
    for i in (0..n).rev() {
        if seq[i].1 == Node::Pole {
            // (b_j - x) < 0 for every node x to the right of b_j
            let negative_factors = right % 2 == 1;
            let residue_positive = positive != negative_factors;
            if residue_positive {
                bad = Some(i);
            }
        }
        right += seq[i].2;
    }
    if let Some(i) = bad {
        let msg = format!("non-negative residue at pole {}", seq[i].0.to_decimal(12));
        return HerglotzCertificate::fail(seq, msg);
    }
    HerglotzCertificate { is_herglotz: true, reason: None, sequence: seq }
}

/// `scale * prod B_i(z)^{e_i}` over pairwise coprime root groups, each factor
/// normalized to the value 1 at the origin.
#[derive(Clone, Debug)]
pub struct Factored {
    pub scale: Q,
    pub factors: Vec<(RootGroup, i64)>,
}

impl Factored {
    pub fn new(scale: Q, factors: Vec<(RootGroup, i64)>) -> Factored {
        Factored { scale, factors: factors.into_iter().filter(|f| f.1 != 0).collect() }
    }

    pub fn deg_num(&self) -> usize {
        self.factors.iter().filter(|f| f.1 > 0).map(|f| f.0.degree() * f.1 as usize).sum()
    }

    pub fn deg_den(&self) -> usize {
        self.factors.iter().filter(|f| f.1 < 0).map(|f| f.0.degree() * (-f.1) as usize).sum()
    }

    /// Leading coefficient of the expanded numerator over the monic denominator.
    pub fn leading(&self) -> Q {
        let mut c = self.scale.clone();
        for (g, e) in &self.factors {
            let lead = g.normalized().leading();
            let lead = if *e >= 0 { lead } else { Q::one() / lead };
            for _ in 0..e.unsigned_abs() {
                c *= &lead;
            }
        }
        c
    }

    /// `-1/f`
    pub fn neg_recip(&self) -> Factored {
        Factored {
            scale: -Q::one() / &self.scale,
            factors: self.factors.iter().map(|(g, e)| (g.clone(), -e)).collect(),
        }
    }

    pub fn herglotz(&self) -> HerglotzCertificate {
        let mut zeros = Vec::new();
        let mut poles = Vec::new();
        for (g, e) in &self.factors {
            for r in g.roots() {
                if *e > 0 {
                    zeros.push((r.clone(), *e as usize));
                } else {
                    poles.push((r.clone(), (-e) as usize));
                }
            }
        }
        herglotz_test(number::sign(&self.leading()), self.deg_num(), self.deg_den(), zeros, poles)
    }

    pub fn expand(&self) -> RatFun {
        let mut num = Poly::constant(self.scale.clone());
        let mut den = Poly::one();
        for (g, e) in &self.factors {
            let p = g.normalized().pow(e.unsigned_abs() as usize);
            if *e > 0 {
                num = &num * &p;
            } else {
                den = &den * &p;
            }
        }
        RatFun::from_coprime(num, den)
    }

    /// Product of all factors other than `skip`, reduced modulo `m`.
    fn cofactor_mod(&self, skip: usize, m: &Poly) -> Result<Poly> {
        let mut acc = Poly::constant(self.scale.clone());
        for (i, (g, e)) in self.factors.iter().enumerate() {
            if i == skip {
                continue;
            }
            let mut b = g.normalized().rem(m);
            if *e < 0 {
                b = b.inverse_mod(m).ok_or_else(|| Error::invariant("factors are not coprime"))?;
            }
            for _ in 0..e.unsigned_abs() {
                acc = (&acc * &b).rem(m);
            }
        }
        Ok(acc)
    }

    /// Residue at the roots of factor `i`, which must have exponent -1, as an
    /// expression modulo that factor's polynomial.
    pub fn residue_expr(&self, i: usize) -> Result<Poly> {
        let (g, e) = &self.factors[i];
        if *e != -1 {
            return Err(Error::invariant("residue requested at a non-simple pole"));
        }
        let m = g.poly();
        let b = g.normalized();
        let d = b.derivative().rem(m).inverse_mod(m).ok_or_else(|| Error::invariant("repeated root"))?;
        Ok((&self.cofactor_mod(i, m)? * &d).rem(m))
    }

    /// Value at the roots of a group coprime to every factor, modulo its polynomial.
    pub fn value_expr_at(&self, g: &RootGroup) -> Result<Poly> {
        self.cofactor_mod(usize::MAX, g.poly())
    }

    /// Index of the factor with the given polynomial.
    pub fn index_of(&self, g: &Poly) -> Option<usize> {
        self.factors.iter().position(|(h, _)| h.poly() == g)
    }
}
