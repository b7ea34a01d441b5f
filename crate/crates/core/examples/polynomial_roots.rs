//! Exact polynomials, real root isolation and the Herglotz test.

use krein_star::number::{frac, q};
use krein_star::roots::real_roots;
use krein_star::{Poly, RatFun, RootGroup};

fn main() {
    // (z - 2)(z^2 - 2), isolated and refined without floating point
    let p = &Poly::from_ints(&[-2, 1]) * &Poly::from_ints(&[-2, 0, 1]);
    for (r, mult) in real_roots(&p) {
        println!("root {} (multiplicity {mult})", r.to_decimal(25));
    }

    // values in Q(sqrt 2) are polynomials modulo z^2 - 2
    let g = RootGroup::new(&Poly::from_ints(&[-2, 0, 1])).expect("two real roots");
    for v in g.values(&Poly::from_ints(&[1, 1])) {
        println!("1 + root = {}", v.to_decimal(20));
    }
    println!("sum of root^2 - 1 over both roots = {}", g.trace(&Poly::from_ints(&[-1, 0, 1])));

    // (-3)(1 - z/2)/(1 - z/4): zeros and poles interlace
    let lin = |r: i64| Poly::new(vec![q(1), frac(-1, r)]);
    let f = RatFun::new(lin(2).scale(&q(-3)), lin(4)).unwrap();
    let pf = f.partial_fractions().unwrap();
    println!("alpha = {}, beta = {}", pf.alpha, pf.beta);
    for (pole, residue) in &pf.poles {
        println!("pole {} residue {}", pole.to_decimal(10), residue.to_decimal(10));
    }
    let cert = f.herglotz();
    println!("herglotz: {} ({} zeros, {} poles)", cert.is_herglotz, cert.zeros(), cert.poles());
    println!("-1/f herglotz: {}", f.neg_recip().unwrap().is_rational_herglotz());
}
