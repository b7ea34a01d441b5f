//! Real root isolation and exact arithmetic with real algebraic numbers.
//!
//! A [`RealRoot`] is a root of a square-free rational polynomial together with
//! an isolating interval; equality and ordering between roots are decided
//! exactly (gcd of the defining polynomials plus Sturm counts), and intervals
//! are refined by rational bisection only when a decision or a decimal
//! approximation needs it. An [`AlgebraicValue`] is a polynomial expression
//! evaluated at such a root, i.e. an element of `Q(root)`.

use std::cmp::Ordering;
use std::fmt;

use num::bigint::Sign;
use num::{BigInt, One, Signed, Zero};

use crate::number::{self, Q};
use crate::poly::{IntPoly, Poly};

/// Default relative refinement tolerance for reported roots (10^-30).
pub fn default_tolerance() -> Q {
    number::pow10_q(-30)
}

/// Sturm sequence of a polynomial, stored as primitive integer polynomials.
#[derive(Clone, Debug)]
pub struct SturmChain {
    seq: Vec<IntPoly>,
}

impl SturmChain {
    pub fn new(p: &Poly) -> Self {
        let mut seq = Vec::new();
        if p.is_zero() {
            return SturmChain { seq };
        }
        let p0 = IntPoly::primitive_of(p);
        let p1 = p0.derivative().primitive();
        seq.push(p0);
        if !p1.is_zero() {
            seq.push(p1);
        }
        while seq.len() >= 2 {
            let n = seq.len();
            let r = seq[n - 2].positive_prem(&seq[n - 1]);
            if r.is_zero() {
                break;
            }
            let neg = IntPoly { c: r.c.into_iter().map(|x| -x).collect() };
            seq.push(neg);
        }
        SturmChain { seq }
    }

    fn variations<I: Iterator<Item = Sign>>(signs: I) -> usize {
        let mut last = Sign::NoSign;
        let mut count = 0;
        for s in signs {
            if s == Sign::NoSign {
                continue;
            }
            if last != Sign::NoSign && s != last {
                count += 1;
            }
            last = s;
        }
        count
    }

    fn variations_at(&self, x: &Q) -> usize {
        let (n, d) = (x.numer(), x.denom());
        SturmChain::variations(self.seq.iter().map(|p| p.sign_at(n, d)))
    }

    fn variations_at_infinity(&self, positive: bool) -> usize {
        SturmChain::variations(self.seq.iter().map(|p| {
            let s = p.c.last().map(|c| c.sign()).unwrap_or(Sign::NoSign);
            if positive || p.degree() % 2 == 0 {
                s
            } else {
                -s
            }
        }))
    }

    /// Number of distinct real roots in the half-open interval `(lo, hi]`.
    pub fn count_in(&self, lo: &Q, hi: &Q) -> usize {
        if lo >= hi || self.seq.is_empty() {
            return 0;
        }
        self.variations_at(lo).saturating_sub(self.variations_at(hi))
    }

    /// Number of distinct real roots.
    pub fn count_all(&self) -> usize {
        if self.seq.is_empty() {
            return 0;
        }
        self.variations_at_infinity(false).saturating_sub(self.variations_at_infinity(true))
    }
}

/// A real root of a square-free polynomial with an isolating interval.
///
/// Either `lo == hi` and the root is exactly that rational, or the root is the
/// unique root of `poly` in the open interval `(lo, hi)` and `poly(hi) != 0`.
#[derive(Clone)]
pub struct RealRoot {
    poly: Poly,
    ip: IntPoly,
    lo: Q,
    hi: Q,
}

impl RealRoot {
    pub fn rational(x: Q) -> Self {
        let poly = Poly::linear_root(&x);
        RealRoot { ip: IntPoly::primitive_of(&poly), poly, lo: x.clone(), hi: x }
    }

    pub(crate) fn isolated(poly: Poly, lo: Q, hi: Q) -> Self {
        if let (Some(1), false) = (poly.degree(), lo == hi) {
            let r = -poly.coeff(0) / poly.coeff(1);
            return RealRoot::rational(r);
        }
        RealRoot { ip: IntPoly::primitive_of(&poly), poly, lo, hi }
    }

    /// Defining square-free polynomial (monic).
    pub fn poly(&self) -> &Poly {
        &self.poly
    }

    pub fn interval(&self) -> (&Q, &Q) {
        (&self.lo, &self.hi)
    }

    pub fn is_exact(&self) -> bool {
        self.lo == self.hi
    }

    pub fn as_rational(&self) -> Option<Q> {
        if self.is_exact() {
            Some(self.lo.clone())
        } else if self.poly.degree() == Some(1) {
            Some(-self.poly.coeff(0) / self.poly.coeff(1))
        } else {
            None
        }
    }

    fn sign_at(&self, x: &Q) -> Sign {
        self.ip.sign_at(x.numer(), x.denom())
    }

    /// One bisection step.
    pub fn bisect(&mut self) {
        if self.is_exact() {
            return;
        }
        let mid = (&self.lo + &self.hi) / Q::from_integer(BigInt::from(2));
        let s = self.sign_at(&mid);
        if s == Sign::NoSign {
            *self = RealRoot::rational(mid);
        } else if s == self.sign_at(&self.hi) {
            self.hi = mid;
        } else {
            self.lo = mid;
        }
    }

    pub fn width(&self) -> Q {
        &self.hi - &self.lo
    }

    pub fn refine_to_width(&mut self, width: &Q) {
        while self.width() > *width {
            self.bisect();
        }
    }

    /// Refines until the interval width is at most `tol` times the magnitude of the root.
    pub fn refine_relative(&mut self, tol: &Q) {
        for _ in 0..100_000 {
            if self.is_exact() {
                return;
            }
            let straddles_zero = !self.lo.is_positive() && !self.hi.is_negative();
            if !straddles_zero {
                let mag = self.lo.abs().min(self.hi.abs());
                if self.width() <= tol * mag {
                    return;
                }
            }
            self.bisect();
        }
    }

    /// Collapses the interval onto a rational root, if its simplest rational is one.
    pub(crate) fn try_exact(&mut self) {
        if self.is_exact() {
            return;
        }
        let r = number::simplest_between(&self.lo, &self.hi);
        if self.sign_at(&r) == Sign::NoSign {
            *self = RealRoot::rational(r);
        }
    }

    pub fn refined(&self, tol: &Q) -> RealRoot {
        let mut r = self.clone();
        r.refine_relative(tol);
        r
    }

    /// Midpoint of the current isolating interval.
    pub fn approx(&self) -> Q {
        (&self.lo + &self.hi) / Q::from_integer(BigInt::from(2))
    }

    /// Rational approximation with relative error below `tol`.
    pub fn approx_within(&self, tol: &Q) -> Q {
        self.refined(tol).approx()
    }

    pub fn to_f64(&self) -> f64 {
        number::to_f64(&self.approx_within(&number::pow10_q(-20)))
    }

    /// Decimal rendering with `digits` significant digits.
    pub fn to_decimal(&self, digits: usize) -> String {
        match self.as_rational() {
            Some(x) => number::format_decimal(&x, digits),
            None => {
                let tol = number::pow10_q(-(digits as i64) - 6);
                number::format_decimal(&self.approx_within(&tol), digits)
            }
        }
    }

    /// Compares the root with a rational number exactly.
    pub fn cmp_rational(&self, x: &Q) -> Ordering {
        if self.is_exact() {
            return self.lo.cmp(x);
        }
        let mut r = self.clone();
        loop {
            if r.is_exact() {
                return r.lo.cmp(x);
            }
            if *x <= r.lo {
                return Ordering::Greater;
            }
            if *x >= r.hi {
                return Ordering::Less;
            }
            if r.sign_at(x) == Sign::NoSign {
                return Ordering::Equal;
            }
            r.bisect();
        }
    }

    /// Exact equality of the two real numbers.
    pub fn same_value(&self, other: &RealRoot) -> bool {
        if self.is_exact() {
            return other.cmp_rational(&self.lo) == Ordering::Equal;
        }
        if other.is_exact() {
            return self.cmp_rational(&other.lo) == Ordering::Equal;
        }
        let lo = (&self.lo).max(&other.lo);
        let hi = (&self.hi).min(&other.hi);
        if lo >= hi {
            return false;
        }
        if self.poly == other.poly {
            return true;
        }
        let g = self.poly.gcd(&other.poly);
        if g.is_constant() {
            return false;
        }
        SturmChain::new(&g).count_in(lo, hi) > 0
    }

    /// Exact ordering of two real algebraic numbers.
    pub fn cmp_value(&self, other: &RealRoot) -> Ordering {
        if self.same_value(other) {
            return Ordering::Equal;
        }
        let (mut a, mut b) = (self.clone(), other.clone());
        loop {
            if a.hi <= b.lo {
                return Ordering::Less;
            }
            if b.hi <= a.lo {
                return Ordering::Greater;
            }
            if a.width() >= b.width() {
                a.bisect();
            } else {
                b.bisect();
            }
        }
    }

    /// Exact sign of `v(root)`.
    pub fn sign_of(&self, v: &Poly) -> Ordering {
        if self.is_exact() {
            return number::sign(&v.eval(&self.lo));
        }
        let v = v.rem(&self.poly);
        if v.is_zero() {
            return Ordering::Equal;
        }
        if v.is_constant() {
            return number::sign(&v.coeff(0));
        }
        let g = v.gcd(&self.poly);
        if !g.is_constant() && SturmChain::new(&g).count_in(&self.lo, &self.hi) > 0 {
            return Ordering::Equal;
        }
        let mut r = self.clone();
        loop {
            if r.is_exact() {
                return number::sign(&v.eval(&r.lo));
            }
            let (a, b) = eval_interval(&v, &r.lo, &r.hi);
            if a.is_positive() {
                return Ordering::Greater;
            }
            if b.is_negative() {
                return Ordering::Less;
            }
            r.bisect();
        }
    }

    /// `true` if `v(root) = 0`.
    pub fn is_root_of(&self, v: &Poly) -> bool {
        self.sign_of(v) == Ordering::Equal
    }

    /// Same root, re-expressed with a (nonconstant) factor of the defining polynomial
    /// that still vanishes at it.
    pub(crate) fn with_poly(&self, factor: Poly) -> RealRoot {
        debug_assert!(self.is_root_of(&factor));
        if self.is_exact() {
            return RealRoot::rational(self.lo.clone());
        }
        RealRoot::isolated(factor.monic(), self.lo.clone(), self.hi.clone())
    }

    /// Common representation of two equal roots over `gcd` of their defining polynomials.
    fn unify(&self, other: &RealRoot) -> RealRoot {
        if self.poly == other.poly {
            return if self.width() <= other.width() { self.clone() } else { other.clone() };
        }
        if let Some(x) = self.as_rational().or_else(|| other.as_rational()) {
            return RealRoot::rational(x);
        }
        let g = self.poly.gcd(&other.poly);
        let lo = (&self.lo).max(&other.lo).clone();
        let hi = (&self.hi).min(&other.hi).clone();
        RealRoot::isolated(g, lo, hi)
    }
}

impl PartialEq for RealRoot {
    fn eq(&self, other: &Self) -> bool {
        self.same_value(other)
    }
}

impl Eq for RealRoot {}

impl PartialOrd for RealRoot {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for RealRoot {
    fn cmp(&self, other: &Self) -> Ordering {
        self.cmp_value(other)
    }
}

impl fmt::Debug for RealRoot {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.as_rational() {
            Some(x) => write!(f, "RealRoot({x})"),
            None => write!(f, "RealRoot(~{} of {})", self.to_decimal(12), self.poly),
        }
    }
}

impl fmt::Display for RealRoot {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.to_decimal(number::DEFAULT_DIGITS))
    }
}

/// Interval enclosure of `p([lo, hi])` by Horner's scheme.
pub fn eval_interval(p: &Poly, lo: &Q, hi: &Q) -> (Q, Q) {
    let mut a = Q::zero();
    let mut b = Q::zero();
    for c in p.coeffs().iter().rev() {
        let prods = [&a * lo, &a * hi, &b * lo, &b * hi];
        let mn = prods.iter().min().unwrap().clone();
        let mx = prods.iter().max().unwrap().clone();
        a = mn + c;
        b = mx + c;
    }
    (a, b)
}

fn cauchy_bound(p: &Poly) -> Q {
    let lead = p.leading().abs();
    let m = p.coeffs().iter().map(|c| c.abs() / &lead).max().unwrap_or_else(Q::zero);
    let bound = m + Q::one();
    let mut pow = Q::one();
    while pow < bound {
        pow *= Q::from_integer(BigInt::from(2));
    }
    pow
}

/// Isolates all real roots of a square-free polynomial, in increasing order.
pub fn isolate_roots(p: &Poly) -> Vec<RealRoot> {
    let mut out = Vec::new();
    match p.degree() {
        None | Some(0) => return out,
        Some(1) => {
            out.push(RealRoot::rational(-p.coeff(0) / p.coeff(1)));
            return out;
        }
        _ => {}
    }
    let monic = p.monic();
    let chain = SturmChain::new(&monic);
    let b = cauchy_bound(&monic);
    let ip = IntPoly::primitive_of(&monic);
    let two = Q::from_integer(BigInt::from(2));
    let mut stack = vec![(-b.clone(), b.clone(), chain.count_in(&-b.clone(), &b))];
    while let Some((lo, hi, n)) = stack.pop() {
        match n {
            0 => {}
            1 => {
                if ip.sign_at(hi.numer(), hi.denom()) == Sign::NoSign {
                    out.push(RealRoot::rational(hi));
                } else {
                    out.push(RealRoot::isolated(monic.clone(), lo, hi));
                }
            }
            _ => {
                let mid = (&lo + &hi) / &two;
                let left = chain.count_in(&lo, &mid);
                // pushed right first so the left half is processed first
                stack.push((mid.clone(), hi, n - left));
                stack.push((lo, mid, left));
            }
        }
    }
    out
}

/// Real roots with multiplicities, increasing, refined to relative tolerance `tol`.
pub fn real_roots_with_tol(p: &Poly, tol: &Q) -> Vec<(RealRoot, usize)> {
    assert!(!p.is_zero(), "real_roots of the zero polynomial");
    let mut all: Vec<(RealRoot, usize)> = p
        .squarefree_decomposition()
        .into_iter()
        .flat_map(|(k, s)| isolate_roots(&s).into_iter().map(move |r| (r, k)))
        .collect();
    for (r, _) in all.iter_mut() {
        r.refine_relative(tol);
        r.try_exact();
    }
    all.sort_by(|a, b| a.0.cmp_value(&b.0));
    all
}

/// Real roots with multiplicities at the default tolerance.
pub fn real_roots(p: &Poly) -> Vec<(RealRoot, usize)> {
    real_roots_with_tol(p, &default_tolerance())
}

/// All real roots of a square-free polynomial whose roots are all real.
///
/// Used as the unit of exact spectral bookkeeping: conjugate eigenvalues share
/// one defining polynomial and are handled together through arithmetic modulo it.
#[derive(Clone, Debug)]
pub struct RootGroup {
    poly: Poly,
    roots: Vec<RealRoot>,
}

impl RootGroup {
    /// Isolates and refines the roots of `poly` (made monic); `None` unless
    /// `poly` is square-free, nonconstant and has only real roots.
    pub fn new(poly: &Poly) -> Option<RootGroup> {
        let poly = poly.monic();
        let deg = poly.degree().filter(|&d| d > 0)?;
        let mut roots = isolate_roots(&poly);
        if roots.len() != deg {
            return None;
        }
        let tol = default_tolerance();
        for r in roots.iter_mut() {
            r.refine_relative(&tol);
            r.try_exact();
        }
        Some(RootGroup { poly, roots })
    }

    /// Wraps roots that are already known to be exactly the real roots of `poly`.
    pub(crate) fn from_parts(poly: Poly, roots: Vec<RealRoot>) -> RootGroup {
        debug_assert_eq!(poly.degree(), Some(roots.len()));
        RootGroup { poly, roots }
    }

    /// Monic defining polynomial.
    pub fn poly(&self) -> &Poly {
        &self.poly
    }

    /// The polynomial rescaled to the value 1 at the origin, `prod (1 - z/r)`.
    pub fn normalized(&self) -> Poly {
        self.poly.normalized_at_zero().expect("root group contains zero")
    }

    pub fn roots(&self) -> &[RealRoot] {
        &self.roots
    }

    pub fn degree(&self) -> usize {
        self.roots.len()
    }

    /// Index of the root equal to `x`, if any.
    pub fn position(&self, x: &RealRoot) -> Option<usize> {
        if !x.is_exact() && x.poly() != &self.poly && self.poly.is_coprime(x.poly()) {
            return None;
        }
        self.roots.iter().position(|r| r.same_value(x))
    }

    /// `h(r)` for every root `r`, as field elements.
    pub fn values(&self, h: &Poly) -> Vec<AlgebraicValue> {
        let h = h.rem(&self.poly);
        self.roots.iter().map(|r| AlgebraicValue::new(r.clone(), &h)).collect()
    }

    /// Exact `sum h(r)` over the roots.
    pub fn trace(&self, h: &Poly) -> Q {
        Poly::trace_over_roots(h, &self.poly)
    }

    pub fn min_root(&self) -> &RealRoot {
        &self.roots[0]
    }

    pub fn max_root(&self) -> &RealRoot {
        self.roots.last().expect("nonempty")
    }
}

/// An element of `Q(root)`: a polynomial expression evaluated at a real root.
#[derive(Clone)]
pub struct AlgebraicValue {
    root: RealRoot,
    expr: Poly,
}

impl AlgebraicValue {
    pub fn new(root: RealRoot, expr: &Poly) -> Self {
        let expr = match root.as_rational() {
            Some(x) => Poly::constant(expr.eval(&x)),
            None => expr.rem(root.poly()),
        };
        AlgebraicValue { root, expr }
    }

    pub fn rational(x: Q) -> Self {
        AlgebraicValue { root: RealRoot::rational(Q::zero()), expr: Poly::constant(x) }
    }

    pub fn root(&self) -> &RealRoot {
        &self.root
    }

    /// Polynomial representative, reduced modulo the root's defining polynomial.
    pub fn expr(&self) -> &Poly {
        &self.expr
    }

    pub fn as_rational(&self) -> Option<Q> {
        if self.expr.is_constant() {
            Some(self.expr.coeff(0))
        } else {
            self.root.as_rational().map(|x| self.expr.eval(&x))
        }
    }

    pub fn sign(&self) -> Ordering {
        match self.as_rational() {
            Some(x) => number::sign(&x),
            None => self.root.sign_of(&self.expr),
        }
    }

    pub fn is_zero(&self) -> bool {
        self.sign() == Ordering::Equal
    }

    pub fn is_positive(&self) -> bool {
        self.sign() == Ordering::Greater
    }

    fn paired(&self, other: &AlgebraicValue) -> (RealRoot, Poly, Poly) {
        if self.expr.is_constant() {
            return (other.root.clone(), self.expr.clone(), other.expr.clone());
        }
        if other.expr.is_constant() {
            return (self.root.clone(), self.expr.clone(), other.expr.clone());
        }
        debug_assert!(self.root.same_value(&other.root), "values over different roots");
        let root = self.root.unify(&other.root);
        (root, self.expr.clone(), other.expr.clone())
    }

    pub fn add(&self, other: &AlgebraicValue) -> AlgebraicValue {
        let (root, a, b) = self.paired(other);
        AlgebraicValue::new(root, &(&a + &b))
    }

    pub fn sub(&self, other: &AlgebraicValue) -> AlgebraicValue {
        let (root, a, b) = self.paired(other);
        AlgebraicValue::new(root, &(&a - &b))
    }

    pub fn mul(&self, other: &AlgebraicValue) -> AlgebraicValue {
        let (root, a, b) = self.paired(other);
        AlgebraicValue::new(root, &(&a * &b))
    }

    pub fn scale(&self, c: &Q) -> AlgebraicValue {
        AlgebraicValue { root: self.root.clone(), expr: self.expr.scale(c) }
    }

    /// Multiplicative inverse; `None` for zero.
    pub fn inverse(&self) -> Option<AlgebraicValue> {
        if let Some(x) = self.as_rational() {
            return (!x.is_zero()).then(|| AlgebraicValue::rational(Q::one() / x));
        }
        if self.is_zero() {
            return None;
        }
        let mut root = self.root.clone();
        let g = self.expr.gcd(root.poly());
        if !g.is_constant() {
            // the root is not a root of g, so it survives in the cofactor
            let cof = root.poly().exact_div(&g).expect("gcd divides");
            root = root.with_poly(cof);
        }
        let inv = self.expr.rem(root.poly()).inverse_mod(root.poly())?;
        Some(AlgebraicValue::new(root, &inv))
    }

    pub fn div(&self, other: &AlgebraicValue) -> Option<AlgebraicValue> {
        Some(self.mul(&other.inverse()?))
    }

    pub fn same_value(&self, other: &AlgebraicValue) -> bool {
        self.sub(other).is_zero()
    }

    /// Rational enclosure of width at most `tol` times the magnitude of the value.
    pub fn enclose(&self, tol: &Q) -> (Q, Q) {
        if let Some(x) = self.as_rational() {
            return (x.clone(), x);
        }
        let mut r = self.root.clone();
        loop {
            if let Some(x) = r.as_rational() {
                let v = self.expr.eval(&x);
                return (v.clone(), v);
            }
            let (a, b) = eval_interval(&self.expr, &r.lo, &r.hi);
            let same_side = a.is_positive() || b.is_negative();
            if same_side && (&b - &a) <= tol * a.abs().min(b.abs()) {
                return (a, b);
            }
            if !same_side && self.is_zero() {
                return (Q::zero(), Q::zero());
            }
            r.bisect();
        }
    }

    pub fn approx_within(&self, tol: &Q) -> Q {
        let (a, b) = self.enclose(tol);
        (a + b) / Q::from_integer(BigInt::from(2))
    }

    pub fn to_f64(&self) -> f64 {
        number::to_f64(&self.approx_within(&number::pow10_q(-20)))
    }

    pub fn to_decimal(&self, digits: usize) -> String {
        match self.as_rational() {
            Some(x) => number::format_decimal(&x, digits),
            None => {
                let tol = number::pow10_q(-(digits as i64) - 6);
                number::format_decimal(&self.approx_within(&tol), digits)
            }
        }
    }
}

impl fmt::Debug for AlgebraicValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "AlgebraicValue({})", self.to_decimal(16))
    }
}

impl From<Q> for AlgebraicValue {
    fn from(x: Q) -> Self {
        AlgebraicValue::rational(x)
    }
}

impl One for AlgebraicValue {
    fn one() -> Self {
        AlgebraicValue::rational(Q::one())
    }
}

impl std::ops::Mul for AlgebraicValue {
    type Output = AlgebraicValue;
    fn mul(self, rhs: AlgebraicValue) -> AlgebraicValue {
        AlgebraicValue::mul(&self, &rhs)
    }
}
