//! Rational functions in canonical reduced form.

use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::sync::Arc;

use num::{BigInt, One};

use super::context::{Context, VarId};
use super::gcd::poly_gcd;
use super::poly::Polynomial;
use super::rat::{self, Rat};
use crate::error::{Error, Result};

/// Quotient of two polynomials, always reduced: gcd(num, den) = 1 and the
/// denominator is monic in the graded-lex order. Structural equality is
/// mathematical equality.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RationalFunction {
    num: Polynomial,
    den: Polynomial,
}

impl RationalFunction {
    /// Canonical reduced form of `num/den`. Idempotent.
    pub fn new(num: Polynomial, den: Polynomial) -> Result<Self> {
        if den.is_zero() {
            return Err(Error::DivisionByZero);
        }
        if num.is_zero() {
            return Ok(RationalFunction {
                den: Polynomial::one(num.context()),
                num,
            });
        }
        let g = poly_gcd(&num, &den);
        let (mut num, mut den) = if g.is_one() {
            (num, den)
        } else {
            (
                num.try_exact_div(&g).expect("gcd divides numerator"),
                den.try_exact_div(&g).expect("gcd divides denominator"),
            )
        };
        let lc = den.leading_coeff();
        if !lc.is_one() {
            let inv = Rat::one() / lc;
            num = num.scale(&inv);
            den = den.scale(&inv);
        }
        Ok(RationalFunction { num, den })
    }

    pub fn from_poly(p: Polynomial) -> Self {
        RationalFunction {
            den: Polynomial::one(p.context()),
            num: p,
        }
    }

    pub fn zero(ctx: &Arc<Context>) -> Self {
        Self::from_poly(Polynomial::zero(ctx))
    }

    pub fn one(ctx: &Arc<Context>) -> Self {
        Self::from_poly(Polynomial::one(ctx))
    }

    pub fn constant(ctx: &Arc<Context>, c: Rat) -> Self {
        Self::from_poly(Polynomial::constant(ctx, c))
    }

    pub fn int(ctx: &Arc<Context>, n: i64) -> Self {
        Self::constant(ctx, rat::int(n))
    }

    pub fn ratio(ctx: &Arc<Context>, n: i64, d: i64) -> Self {
        Self::constant(ctx, rat::ratio(n, d))
    }

    pub fn var(ctx: &Arc<Context>, v: VarId) -> Self {
        Self::from_poly(Polynomial::var(ctx, v))
    }

    pub fn named(ctx: &Arc<Context>, name: &str) -> Self {
        Self::var(ctx, ctx.var(name))
    }

    pub fn numerator(&self) -> &Polynomial {
        &self.num
    }

    pub fn denominator(&self) -> &Polynomial {
        &self.den
    }

    pub fn context(&self) -> &Arc<Context> {
        self.num.context()
    }

    pub fn is_zero(&self) -> bool {
        self.num.is_zero()
    }

    pub fn is_one(&self) -> bool {
        self.num.is_one() && self.den.is_one()
    }

    pub fn is_polynomial(&self) -> bool {
        self.den.is_one()
    }

    /// Constant rational value after canonicalization, if any.
    pub fn as_rational(&self) -> Option<Rat> {
        if !self.den.is_one() {
            return None;
        }
        self.num.as_constant()
    }

    /// `yes(n)` iff the canonical form is a constant integer `n`.
    /// Transcendental symbols surviving canonicalization force `no`.
    pub fn as_integer(&self) -> Option<BigInt> {
        self.as_rational().and_then(|r| rat::as_integer(&r))
    }

    pub fn div(&self, rhs: &RationalFunction) -> Result<RationalFunction> {
        if rhs.is_zero() {
            return Err(Error::DivisionByZero);
        }
        RationalFunction::new(&self.num * &rhs.den, &self.den * &rhs.num)
    }

    pub fn recip(&self) -> Result<RationalFunction> {
        RationalFunction::one(self.context()).div(self)
    }

    /// Integer power; negative exponents invert (error on zero base).
    pub fn pow_i(&self, e: i32) -> Result<RationalFunction> {
        if e < 0 {
            if self.is_zero() {
                return Err(Error::DivisionByZero);
            }
            let p = self.pow_i(-e)?;
            return p.recip();
        }
        Ok(RationalFunction {
            num: self.num.pow(e as u32),
            den: self.den.pow(e as u32),
        })
    }

    pub fn scale(&self, c: &Rat) -> RationalFunction {
        RationalFunction::new(self.num.scale(c), self.den.clone()).expect("den nonzero")
    }

    /// Partial derivative with respect to a single variable (quotient rule).
    pub fn partial(&self, v: VarId) -> RationalFunction {
        if !self.num.involves(v) && !self.den.involves(v) {
            return RationalFunction::zero(self.context());
        }
        let dn = self.num.partial(v);
        let dd = self.den.partial(v);
        let num = &(&dn * &self.den) - &(&self.num * &dd);
        let den = &self.den * &self.den;
        RationalFunction::new(num, den).expect("den nonzero")
    }

    /// Simultaneous substitution of rational functions for variables.
    /// Unbound variables stay fixed. Fails with [`Error::SubstitutionPole`]
    /// when the denominator vanishes identically after substitution.
    pub fn substitute(
        &self,
        bindings: &BTreeMap<VarId, RationalFunction>,
    ) -> Result<RationalFunction> {
        if bindings.is_empty() {
            return Ok(self.clone());
        }
        let n = poly_substitute(&self.num, bindings)?;
        let d = poly_substitute(&self.den, bindings)?;
        if d.is_zero() {
            return Err(Error::SubstitutionPole);
        }
        n.div(&d)
    }

    /// All variables with positive degree in the canonical form.
    pub fn variables(&self) -> Vec<VarId> {
        let mut vs = self.num.variables();
        for v in self.den.variables() {
            if !vs.contains(&v) {
                vs.push(v);
            }
        }
        vs.sort();
        vs
    }

    /// Square root within the supported field: exact roots of rational
    /// squares and of rational-square multiples of a single even-power
    /// monomial in constant symbols. Returns the root with positive leading
    /// coefficient.
    pub fn sqrt_in_field(&self) -> Option<RationalFunction> {
        if self.is_zero() {
            return Some(self.clone());
        }
        if !self.den.is_one() || self.num.num_terms() != 1 {
            // A square of a rational multiple of a monomial is a single term.
            return None;
        }
        let (mono, coeff) = self.num.leading();
        let c = rat::sqrt_exact(coeff)?;
        let mut half = Vec::with_capacity(mono.0.len());
        for &e in mono.0.iter() {
            if e % 2 != 0 {
                return None;
            }
            half.push(e / 2);
        }
        let m = super::poly::Monomial(half.into_boxed_slice());
        Some(RationalFunction::from_poly(Polynomial::from_terms(
            self.context(),
            [(m, c)],
        )))
    }

    /// Evaluates at a full point (one value per context variable); `None`
    /// when the denominator is numerically negligible or non-finite.
    pub fn eval_f64(&self, point: &[f64]) -> Option<f64> {
        let d = self.den.eval_f64(point);
        if !d.is_finite() || d.abs() < 1e-300 {
            return None;
        }
        let n = self.num.eval_f64(point);
        if !n.is_finite() {
            return None;
        }
        Some(n / d)
    }
}

/// Evaluates a polynomial with rational-function values plugged in for the
/// bound variables, assembled over a single common denominator so only one
/// final normalization is needed.
fn poly_substitute(
    p: &Polynomial,
    bindings: &BTreeMap<VarId, RationalFunction>,
) -> Result<RationalFunction> {
    let ctx = p.context();
    let bound: Vec<(VarId, &RationalFunction)> = bindings
        .iter()
        .filter(|(v, _)| p.involves(**v))
        .map(|(v, r)| (*v, r))
        .collect();
    if bound.is_empty() {
        return Ok(RationalFunction::from_poly(p.clone()));
    }
    let max_deg: Vec<u32> = bound.iter().map(|(v, _)| p.degree_in(*v)).collect();

    // Power tables for numerators and denominators of each bound image.
    let mut num_pows: Vec<Vec<Polynomial>> = Vec::new();
    let mut den_pows: Vec<Vec<Polynomial>> = Vec::new();
    for ((_, r), &d) in bound.iter().zip(&max_deg) {
        let mut np = vec![Polynomial::one(ctx)];
        let mut dp = vec![Polynomial::one(ctx)];
        for k in 1..=d as usize {
            np.push(&np[k - 1] * r.numerator());
            dp.push(&dp[k - 1] * r.denominator());
        }
        num_pows.push(np);
        den_pows.push(dp);
    }

    let mut acc = Polynomial::zero(ctx);
    for (mono, coeff) in p.terms() {
        // Strip bound variables out of the monomial; keep the rest.
        let mut rest = mono.0.to_vec();
        for (v, _) in &bound {
            rest[v.index()] = 0;
        }
        let mut term = Polynomial::from_terms(
            ctx,
            [(super::poly::Monomial(rest.into_boxed_slice()), coeff.clone())],
        );
        for (k, (v, _)) in bound.iter().enumerate() {
            let e = mono.0[v.index()] as usize;
            term = &term * &num_pows[k][e];
            term = &term * &den_pows[k][max_deg[k] as usize - e];
        }
        acc = &acc + &term;
    }
    let mut full_den = Polynomial::one(ctx);
    for (k, _) in bound.iter().enumerate() {
        full_den = &full_den * &den_pows[k][max_deg[k] as usize];
    }
    RationalFunction::new(acc, full_den)
}

impl Add for &RationalFunction {
    type Output = RationalFunction;
    fn add(self, rhs: &RationalFunction) -> RationalFunction {
        let num = &(&self.num * &rhs.den) + &(&rhs.num * &self.den);
        let den = &self.den * &rhs.den;
        RationalFunction::new(num, den).expect("den nonzero")
    }
}

impl Sub for &RationalFunction {
    type Output = RationalFunction;
    fn sub(self, rhs: &RationalFunction) -> RationalFunction {
        let num = &(&self.num * &rhs.den) - &(&rhs.num * &self.den);
        let den = &self.den * &rhs.den;
        RationalFunction::new(num, den).expect("den nonzero")
    }
}

impl Mul for &RationalFunction {
    type Output = RationalFunction;
    fn mul(self, rhs: &RationalFunction) -> RationalFunction {
        RationalFunction::new(&self.num * &rhs.num, &self.den * &rhs.den).expect("den nonzero")
    }
}

impl Neg for &RationalFunction {
    type Output = RationalFunction;
    fn neg(self) -> RationalFunction {
        RationalFunction {
            num: -&self.num,
            den: self.den.clone(),
        }
    }
}

impl fmt::Display for RationalFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.den.is_one() {
            return write!(f, "{}", self.num);
        }
        let num = if self.num.num_terms() > 1 {
            format!("({})", self.num)
        } else {
            format!("{}", self.num)
        };
        let den = if self.den.num_terms() > 1 || self.den.leading().0.total_degree() > 1 {
            format!("({})", self.den)
        } else {
            format!("{}", self.den)
        };
        write!(f, "{num}/{den}")
    }
}
