//! Multivariate polynomials over the rationals in graded-lexicographic order.

use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::sync::Arc;

use num::{One, Signed, Zero};

use super::context::{Context, VarId};
use super::rat::{self, Rat};

/// Exponent vector over the context's variable list. Ordered graded-lex:
/// total degree first, then lexicographically with earlier variables more
/// significant.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Monomial(pub Box<[u32]>);

impl Monomial {
    pub fn one(nvars: usize) -> Self {
        Monomial(vec![0; nvars].into_boxed_slice())
    }

    pub fn var(nvars: usize, v: VarId) -> Self {
        let mut e = vec![0; nvars];
        e[v.index()] = 1;
        Monomial(e.into_boxed_slice())
    }

    pub fn total_degree(&self) -> u32 {
        self.0.iter().sum()
    }

    pub fn is_one(&self) -> bool {
        self.0.iter().all(|&e| e == 0)
    }

    pub(crate) fn mul(&self, other: &Monomial) -> Monomial {
        Monomial(
            self.0
                .iter()
                .zip(other.0.iter())
                .map(|(a, b)| a + b)
                .collect(),
        )
    }

    /// Componentwise quotient, when `other` divides `self`.
    pub(crate) fn try_div(&self, other: &Monomial) -> Option<Monomial> {
        let mut e = Vec::with_capacity(self.0.len());
        for (a, b) in self.0.iter().zip(other.0.iter()) {
            if a < b {
                return None;
            }
            e.push(a - b);
        }
        Some(Monomial(e.into_boxed_slice()))
    }

    pub(crate) fn gcd(&self, other: &Monomial) -> Monomial {
        Monomial(
            self.0
                .iter()
                .zip(other.0.iter())
                .map(|(a, b)| *a.min(b))
                .collect(),
        )
    }
}

impl Ord for Monomial {
    fn cmp(&self, other: &Self) -> Ordering {
        self.total_degree()
            .cmp(&other.total_degree())
            .then_with(|| self.0.cmp(&other.0))
    }
}

impl PartialOrd for Monomial {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// Multivariate polynomial with exact rational coefficients. Zero
/// coefficients are never stored; the term map is canonically ordered, so
/// structural equality is mathematical equality.
#[derive(Debug, Clone)]
pub struct Polynomial {
    ctx: Arc<Context>,
    terms: BTreeMap<Monomial, Rat>,
}

impl PartialEq for Polynomial {
    fn eq(&self, other: &Self) -> bool {
        self.same_context(other) && self.terms == other.terms
    }
}

impl Eq for Polynomial {}

impl Polynomial {
    pub fn zero(ctx: &Arc<Context>) -> Self {
        Polynomial {
            ctx: Arc::clone(ctx),
            terms: BTreeMap::new(),
        }
    }

    pub fn one(ctx: &Arc<Context>) -> Self {
        Self::constant(ctx, Rat::one())
    }

    pub fn constant(ctx: &Arc<Context>, c: Rat) -> Self {
        let mut terms = BTreeMap::new();
        if !c.is_zero() {
            terms.insert(Monomial::one(ctx.len()), c);
        }
        Polynomial {
            ctx: Arc::clone(ctx),
            terms,
        }
    }

    pub fn var(ctx: &Arc<Context>, v: VarId) -> Self {
        let mut terms = BTreeMap::new();
        terms.insert(Monomial::var(ctx.len(), v), Rat::one());
        Polynomial {
            ctx: Arc::clone(ctx),
            terms,
        }
    }

    pub fn from_terms(ctx: &Arc<Context>, it: impl IntoIterator<Item = (Monomial, Rat)>) -> Self {
        let mut p = Polynomial::zero(ctx);
        for (m, c) in it {
            p.add_term(m, c);
        }
        p
    }

    pub fn context(&self) -> &Arc<Context> {
        &self.ctx
    }

    fn same_context(&self, other: &Polynomial) -> bool {
        Arc::ptr_eq(&self.ctx, &other.ctx) || self.ctx == other.ctx
    }

    fn assert_same_context(&self, other: &Polynomial) {
        assert!(
            self.same_context(other),
            "polynomial arithmetic across different contexts"
        );
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_one(&self) -> bool {
        self.as_constant().map_or(false, |c| c.is_one())
    }

    /// The constant value when the polynomial has no variables, else `None`.
    pub fn as_constant(&self) -> Option<Rat> {
        match self.terms.len() {
            0 => Some(Rat::zero()),
            1 => {
                let (m, c) = self.terms.iter().next().unwrap();
                if m.is_one() {
                    Some(c.clone())
                } else {
                    None
                }
            }
            _ => None,
        }
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Monomial, &Rat)> {
        self.terms.iter()
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    /// Leading term in the graded-lex order. Panics on zero.
    pub fn leading(&self) -> (&Monomial, &Rat) {
        self.terms.iter().next_back().expect("leading of zero")
    }

    pub fn leading_coeff(&self) -> Rat {
        self.leading().1.clone()
    }

    pub fn total_degree(&self) -> u32 {
        self.terms
            .keys()
            .map(|m| m.total_degree())
            .max()
            .unwrap_or(0)
    }

    pub fn degree_in(&self, v: VarId) -> u32 {
        self.terms.keys().map(|m| m.0[v.index()]).max().unwrap_or(0)
    }

    pub fn involves(&self, v: VarId) -> bool {
        self.terms.keys().any(|m| m.0[v.index()] > 0)
    }

    /// Variables with positive degree somewhere in the polynomial.
    pub fn variables(&self) -> Vec<VarId> {
        let n = self.ctx.len();
        let mut seen = vec![false; n];
        for m in self.terms.keys() {
            for (i, &e) in m.0.iter().enumerate() {
                if e > 0 {
                    seen[i] = true;
                }
            }
        }
        (0..n).filter(|&i| seen[i]).map(VarId).collect()
    }

    fn add_term(&mut self, m: Monomial, c: Rat) {
        if c.is_zero() {
            return;
        }
        use std::collections::btree_map::Entry;
        match self.terms.entry(m) {
            Entry::Vacant(e) => {
                e.insert(c);
            }
            Entry::Occupied(mut e) => {
                let sum = e.get() + &c;
                if sum.is_zero() {
                    e.remove();
                } else {
                    *e.get_mut() = sum;
                }
            }
        }
    }

    pub fn scale(&self, c: &Rat) -> Polynomial {
        if c.is_zero() {
            return Polynomial::zero(&self.ctx);
        }
        Polynomial {
            ctx: Arc::clone(&self.ctx),
            terms: self
                .terms
                .iter()
                .map(|(m, a)| (m.clone(), a * c))
                .collect(),
        }
    }

    pub fn mul_monomial(&self, m: &Monomial, c: &Rat) -> Polynomial {
        if c.is_zero() {
            return Polynomial::zero(&self.ctx);
        }
        Polynomial {
            ctx: Arc::clone(&self.ctx),
            terms: self
                .terms
                .iter()
                .map(|(k, a)| (k.mul(m), a * c))
                .collect(),
        }
    }

    pub fn pow(&self, e: u32) -> Polynomial {
        let mut out = Polynomial::one(&self.ctx);
        let mut base = self.clone();
        let mut e = e;
        while e > 0 {
            if e & 1 == 1 {
                out = &out * &base;
            }
            e >>= 1;
            if e > 0 {
                base = &base * &base;
            }
        }
        out
    }

    /// Partial derivative with respect to one variable.
    pub fn partial(&self, v: VarId) -> Polynomial {
        let idx = v.index();
        let mut out = Polynomial::zero(&self.ctx);
        for (m, c) in &self.terms {
            let e = m.0[idx];
            if e == 0 {
                continue;
            }
            let mut exps = m.0.to_vec();
            exps[idx] -= 1;
            out.add_term(Monomial(exps.into_boxed_slice()), c * Rat::from_integer(e.into()));
        }
        out
    }

    /// View as univariate in `v` with polynomial coefficients (the `v`
    /// exponent is zeroed out inside each coefficient).
    pub fn coeffs_in(&self, v: VarId) -> BTreeMap<u32, Polynomial> {
        let idx = v.index();
        let mut out: BTreeMap<u32, Polynomial> = BTreeMap::new();
        for (m, c) in &self.terms {
            let e = m.0[idx];
            let mut exps = m.0.to_vec();
            exps[idx] = 0;
            out.entry(e)
                .or_insert_with(|| Polynomial::zero(&self.ctx))
                .add_term(Monomial(exps.into_boxed_slice()), c.clone());
        }
        out.retain(|_, p| !p.is_zero());
        out
    }

    pub fn from_coeffs_in(
        ctx: &Arc<Context>,
        v: VarId,
        coeffs: &BTreeMap<u32, Polynomial>,
    ) -> Polynomial {
        let mut out = Polynomial::zero(ctx);
        for (e, p) in coeffs {
            let mut mv = vec![0u32; ctx.len()];
            mv[v.index()] = *e;
            out = &out + &p.mul_monomial(&Monomial(mv.into_boxed_slice()), &Rat::one());
        }
        out
    }

    /// Exact multivariate division; `None` when `d` does not divide `self`.
    pub fn try_exact_div(&self, d: &Polynomial) -> Option<Polynomial> {
        self.assert_same_context(d);
        assert!(!d.is_zero(), "division by zero polynomial");
        if self.is_zero() {
            return Some(Polynomial::zero(&self.ctx));
        }
        if let Some(c) = d.as_constant() {
            return Some(self.scale(&(Rat::one() / c)));
        }
        let (dm, dc) = {
            let (m, c) = d.leading();
            (m.clone(), c.clone())
        };
        let mut rem = self.clone();
        let mut quot = Polynomial::zero(&self.ctx);
        while !rem.is_zero() {
            let (rm, rc) = {
                let (m, c) = rem.leading();
                (m.clone(), c.clone())
            };
            let qm = rm.try_div(&dm)?;
            let qc = rc / &dc;
            quot.add_term(qm.clone(), qc.clone());
            rem = &rem - &d.mul_monomial(&qm, &qc);
        }
        Some(quot)
    }

    /// Greatest common monomial factor of all terms (coefficient 1).
    pub fn monomial_content(&self) -> Monomial {
        let mut it = self.terms.keys();
        let first = match it.next() {
            Some(m) => m.clone(),
            None => return Monomial::one(self.ctx.len()),
        };
        it.fold(first, |acc, m| acc.gcd(m))
    }

    /// Evaluates at a full point, one value per context variable.
    pub fn eval_f64(&self, point: &[f64]) -> f64 {
        debug_assert_eq!(point.len(), self.ctx.len());
        let mut acc = 0.0;
        for (m, c) in &self.terms {
            let mut term = rat::to_f64(c);
            for (i, &e) in m.0.iter().enumerate() {
                if e > 0 {
                    term *= point[i].powi(e as i32);
                }
            }
            acc += term;
        }
        acc
    }
}

impl Add for &Polynomial {
    type Output = Polynomial;
    fn add(self, rhs: &Polynomial) -> Polynomial {
        self.assert_same_context(rhs);
        let mut out = self.clone();
        for (m, c) in &rhs.terms {
            out.add_term(m.clone(), c.clone());
        }
        out
    }
}

impl Sub for &Polynomial {
    type Output = Polynomial;
    fn sub(self, rhs: &Polynomial) -> Polynomial {
        self.assert_same_context(rhs);
        let mut out = self.clone();
        for (m, c) in &rhs.terms {
            out.add_term(m.clone(), -c.clone());
        }
        out
    }
}

impl Mul for &Polynomial {
    type Output = Polynomial;
    fn mul(self, rhs: &Polynomial) -> Polynomial {
        self.assert_same_context(rhs);
        let mut out = Polynomial::zero(&self.ctx);
        for (ma, ca) in &self.terms {
            for (mb, cb) in &rhs.terms {
                out.add_term(ma.mul(mb), ca * cb);
            }
        }
        out
    }
}

impl Neg for &Polynomial {
    type Output = Polynomial;
    fn neg(self) -> Polynomial {
        Polynomial {
            ctx: Arc::clone(&self.ctx),
            terms: self
                .terms
                .iter()
                .map(|(m, c)| (m.clone(), -c.clone()))
                .collect(),
        }
    }
}

impl fmt::Display for Polynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        // Leading (largest) terms first.
        for (i, (m, c)) in self.terms.iter().rev().enumerate() {
            let neg = c.is_negative();
            let abs = c.abs();
            if i == 0 {
                if neg {
                    write!(f, "-")?;
                }
            } else if neg {
                write!(f, " - ")?;
            } else {
                write!(f, " + ")?;
            }
            let mut factors: Vec<String> = Vec::new();
            if !abs.is_one() || m.is_one() {
                factors.push(rat::display(&abs));
            }
            for (idx, &e) in m.0.iter().enumerate() {
                if e == 0 {
                    continue;
                }
                let name = self.ctx.name(VarId(idx));
                if e == 1 {
                    factors.push(name.to_string());
                } else {
                    factors.push(format!("{name}^{e}"));
                }
            }
            write!(f, "{}", factors.join("*"))?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::rat::{int, ratio};

    fn ctx() -> Arc<Context> {
        Context::builder()
            .time("t")
            .dependent("y")
            .parameter("alpha")
            .build()
    }

    #[test]
    fn graded_lex_order() {
        let c = ctx();
        let t = Polynomial::var(&c, c.var("t"));
        let y = Polynomial::var(&c, c.var("y"));
        // y^3 ranks above t*y which ranks above t (degree first).
        let p = &(&y.pow(3) + &(&t * &y)) + &t;
        let lead = p.leading().0.clone();
        assert_eq!(lead, Monomial(vec![0, 3, 0].into_boxed_slice()));
        // t*y beats y^2 at equal degree: earlier variable more significant.
        let a = Monomial(vec![1, 1, 0].into_boxed_slice());
        let b = Monomial(vec![0, 2, 0].into_boxed_slice());
        assert!(a > b);
    }

    #[test]
    fn arithmetic_and_cancellation() {
        let c = ctx();
        let t = Polynomial::var(&c, c.var("t"));
        let one = Polynomial::one(&c);
        let p = &(&t + &one) * &(&t - &one);
        let q = &t.pow(2) - &one;
        assert_eq!(p, q);
        assert!((&p - &q).is_zero());
    }

    #[test]
    fn exact_division() {
        let c = ctx();
        let t = Polynomial::var(&c, c.var("t"));
        let y = Polynomial::var(&c, c.var("y"));
        let one = Polynomial::one(&c);
        let a = &(&y + &t) * &(&y - &one);
        assert_eq!(a.try_exact_div(&(&y + &t)), Some(&y - &one));
        assert_eq!(a.try_exact_div(&(&y + &one)), None);
        let half = Polynomial::constant(&c, ratio(1, 2));
        assert_eq!(t.try_exact_div(&half), Some(t.scale(&int(2))));
    }

    #[test]
    fn partial_derivative() {
        let c = ctx();
        let t = Polynomial::var(&c, c.var("t"));
        let y = Polynomial::var(&c, c.var("y"));
        let p = &(&t.pow(2) * &y.pow(3)) + &t;
        let dt = p.partial(c.var("t"));
        let expect = &(&t * &y.pow(3)).scale(&int(2)) + &Polynomial::one(&c);
        assert_eq!(dt, expect);
    }
}
