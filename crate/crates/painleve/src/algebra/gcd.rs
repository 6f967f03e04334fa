//! Multivariate polynomial gcd: monomial content extraction plus a
//! subresultant polynomial remainder sequence on a main variable, recursing
//! into the coefficients. Adequate for the small degrees that occur here.

use std::collections::BTreeMap;

use num::One;

use super::context::VarId;
use super::poly::{Monomial, Polynomial};
use super::rat::Rat;

/// Gcd normalized to leading coefficient 1 (graded-lex). `gcd(0, b) = b`
/// up to normalization; `gcd(0, 0) = 0`.
pub fn poly_gcd(a: &Polynomial, b: &Polynomial) -> Polynomial {
    if a.is_zero() {
        return make_monic(b.clone());
    }
    if b.is_zero() {
        return make_monic(a.clone());
    }
    let ctx = a.context();
    // Common monomial factor comes out first; it is the whole answer when
    // either side is a single term.
    let ma = a.monomial_content();
    let mb = b.monomial_content();
    let common = ma.gcd(&mb);
    let a1 = divide_monomial(a, &ma);
    let b1 = divide_monomial(b, &mb);
    let core = if a1.num_terms() == 1 || b1.num_terms() == 1 {
        Polynomial::one(ctx)
    } else {
        gcd_core(&a1, &b1)
    };
    make_monic(core.mul_monomial(&common, &Rat::one()))
}

fn make_monic(p: Polynomial) -> Polynomial {
    if p.is_zero() {
        return p;
    }
    let lc = p.leading_coeff();
    if lc.is_one() {
        p
    } else {
        p.scale(&(Rat::one() / lc))
    }
}

fn divide_monomial(p: &Polynomial, m: &Monomial) -> Polynomial {
    if m.is_one() {
        return p.clone();
    }
    let mono_poly = Polynomial::from_terms(p.context(), [(m.clone(), Rat::one())]);
    p.try_exact_div(&mono_poly)
        .expect("monomial content divides")
}

fn gcd_core(a: &Polynomial, b: &Polynomial) -> Polynomial {
    if a.as_constant().is_some() || b.as_constant().is_some() {
        return Polynomial::one(a.context());
    }
    // Main variable: highest-index variable occurring in either operand.
    let main = a
        .variables()
        .into_iter()
        .chain(b.variables())
        .max()
        .expect("non-constant operands");

    let ua = Uni::from_poly(a, main);
    let ub = Uni::from_poly(b, main);

    let ca = content(&ua);
    let cb = content(&ub);
    let cg = poly_gcd(&ca, &cb);

    let pa = ua.exact_div_coeff(&ca);
    let pb = ub.exact_div_coeff(&cb);
    let g = subresultant_gcd(pa, pb, main);
    &cg * &g
}

/// Gcd of the coefficients of a univariate view.
fn content(u: &Uni) -> Polynomial {
    let mut g = Polynomial::zero(u.ctx());
    for c in u.coeffs.values() {
        g = poly_gcd(&g, c);
        if g.is_one() {
            break;
        }
    }
    g
}

/// Subresultant PRS on operands that are primitive with respect to `main`.
fn subresultant_gcd(mut a: Uni, mut b: Uni, main: VarId) -> Polynomial {
    if a.degree() < b.degree() {
        std::mem::swap(&mut a, &mut b);
    }
    if b.degree() == 0 {
        // Primitive of degree zero means the operands are coprime in main.
        return Polynomial::one(a.ctx());
    }
    let one = Polynomial::one(a.ctx());
    let mut g = one.clone();
    let mut h = one.clone();
    loop {
        let d = a.degree() - b.degree();
        let r = pseudo_rem(&a, &b);
        if r.is_zero() {
            let prim = b.exact_div_coeff(&content(&b));
            return prim.to_poly(main);
        }
        if r.degree() == 0 {
            return one;
        }
        let divisor = &g * &h.pow(d);
        let next = r.exact_div_coeff(&divisor);
        a = b;
        b = next;
        g = a.lc().clone();
        h = if d == 0 {
            h
        } else {
            g.pow(d)
                .try_exact_div(&h.pow(d - 1))
                .expect("subresultant coefficient divides")
        };
    }
}

/// `lc(b)^(deg a - deg b + 1) * a  mod  b`, computed without coefficient
/// division.
fn pseudo_rem(a: &Uni, b: &Uni) -> Uni {
    let db = b.degree();
    let lb = b.lc().clone();
    let mut r = a.clone();
    let mut e = a.degree() - db + 1;
    while !r.is_zero() && r.degree() >= db {
        let dr = r.degree();
        let lr = r.lc().clone();
        // r := lb*r - lr * x^(dr-db) * b
        r = &r.scale_coeff(&lb) - &b.shift(dr - db).scale_coeff(&lr);
        e -= 1;
    }
    if e > 0 {
        r = r.scale_coeff(&lb.pow(e));
    }
    r
}

/// Polynomial viewed as univariate in a main variable, with multivariate
/// polynomial coefficients (the main variable zeroed inside them).
#[derive(Clone)]
struct Uni {
    coeffs: BTreeMap<u32, Polynomial>,
}

impl Uni {
    fn from_poly(p: &Polynomial, main: VarId) -> Uni {
        Uni {
            coeffs: p.coeffs_in(main),
        }
    }

    fn ctx(&self) -> &std::sync::Arc<super::context::Context> {
        self.coeffs
            .values()
            .next()
            .expect("empty univariate view")
            .context()
    }

    fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    fn degree(&self) -> u32 {
        self.coeffs.keys().next_back().copied().unwrap_or(0)
    }

    fn lc(&self) -> &Polynomial {
        self.coeffs
            .values()
            .next_back()
            .expect("leading coefficient of zero")
    }

    fn scale_coeff(&self, c: &Polynomial) -> Uni {
        Uni {
            coeffs: self
                .coeffs
                .iter()
                .map(|(e, p)| (*e, p * c))
                .filter(|(_, p)| !p.is_zero())
                .collect(),
        }
    }

    fn shift(&self, k: u32) -> Uni {
        Uni {
            coeffs: self.coeffs.iter().map(|(e, p)| (e + k, p.clone())).collect(),
        }
    }

    fn exact_div_coeff(&self, d: &Polynomial) -> Uni {
        Uni {
            coeffs: self
                .coeffs
                .iter()
                .map(|(e, p)| {
                    (
                        *e,
                        p.try_exact_div(d).expect("coefficient divides in PRS"),
                    )
                })
                .collect(),
        }
    }

    fn to_poly(&self, main: VarId) -> Polynomial {
        Polynomial::from_coeffs_in(self.ctx(), main, &self.coeffs)
    }
}

impl std::ops::Sub for &Uni {
    type Output = Uni;
    fn sub(self, rhs: &Uni) -> Uni {
        let mut coeffs = self.coeffs.clone();
        for (e, p) in &rhs.coeffs {
            let entry = coeffs.entry(*e).or_insert_with(|| Polynomial::zero(p.context()));
            *entry = &*entry - p;
        }
        coeffs.retain(|_, p| !p.is_zero());
        Uni { coeffs }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::context::Context;
    use crate::algebra::rat::int;

    fn setup() -> (
        std::sync::Arc<Context>,
        Polynomial,
        Polynomial,
        Polynomial,
    ) {
        let ctx = Context::builder()
            .time("t")
            .dependent("y")
            .dependent("x")
            .build();
        let t = Polynomial::var(&ctx, ctx.var("t"));
        let y = Polynomial::var(&ctx, ctx.var("y"));
        let x = Polynomial::var(&ctx, ctx.var("x"));
        (ctx, t, y, x)
    }

    #[test]
    fn univariate_gcd() {
        let (ctx, _t, y, _x) = setup();
        let one = Polynomial::one(&ctx);
        // (y-1)(y+1) vs (y-1): gcd y-1
        let a = &(&y - &one) * &(&y + &one);
        let g = poly_gcd(&a, &(&y - &one));
        assert_eq!(g, &y - &one);
        // coprime
        let g2 = poly_gcd(&(&y + &one), &(&y - &one));
        assert!(g2.is_one());
    }

    #[test]
    fn monomial_and_content() {
        let (_ctx, t, y, _x) = setup();
        // gcd(2 t^2 y, 4 t y^2) = t*y (monic)
        let a = (&t.pow(2) * &y).scale(&int(2));
        let b = (&t * &y.pow(2)).scale(&int(4));
        assert_eq!(poly_gcd(&a, &b), &t * &y);
    }

    #[test]
    fn multivariate_common_factor() {
        let (ctx, t, y, x) = setup();
        let one = Polynomial::one(&ctx);
        let common = &(&y * &x) - &t; // yx - t
        let a = &common * &(&y + &one);
        let b = &common * &(&x.pow(2) + &t);
        let g = poly_gcd(&a, &b);
        assert_eq!(g, common);
    }

    #[test]
    fn gcd_with_zero() {
        let (ctx, t, _y, _x) = setup();
        let z = Polynomial::zero(&ctx);
        assert_eq!(poly_gcd(&z, &t.scale(&int(3))), t);
        assert!(poly_gcd(&z, &z).is_zero());
    }
}
