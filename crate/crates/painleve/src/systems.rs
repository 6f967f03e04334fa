//! The six Painlevé equations, the Hamiltonian systems S_II, S_III′ and
//! S_VI, residual checks, conversion between second-order and Hamiltonian
//! forms, and parameter-coordinate conversions.

use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use serde::Serialize;

use crate::algebra::{rat, Context, Derivation, Polynomial, RationalFunction, VarId, VarKind};
use crate::error::{Error, Result};

/// Equation family identifiers. Parameter arity is fixed per family.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum FamilyId {
    PI,
    PII,
    PIII,
    PIV,
    PV,
    PVI,
    SII,
    SIIIp,
    SVI,
}

impl FamilyId {
    pub fn arity(self) -> usize {
        match self {
            FamilyId::PI => 0,
            FamilyId::PII | FamilyId::SII => 1,
            FamilyId::PIV | FamilyId::SIIIp => 2,
            FamilyId::PIII | FamilyId::PV | FamilyId::PVI => 4,
            FamilyId::SVI => 5,
        }
    }

    /// Canonical parameter symbol names, in argument order.
    pub fn param_names(self) -> &'static [&'static str] {
        match self {
            FamilyId::PI => &[],
            FamilyId::PII | FamilyId::SII => &["alpha"],
            FamilyId::PIV => &["alpha", "beta"],
            FamilyId::SIIIp => &["v1", "v2"],
            FamilyId::PIII | FamilyId::PV | FamilyId::PVI => &["alpha", "beta", "gamma", "delta"],
            FamilyId::SVI => &["a0", "a1", "a2", "a3", "a4"],
        }
    }

    pub fn is_hamiltonian(self) -> bool {
        matches!(self, FamilyId::SII | FamilyId::SIIIp | FamilyId::SVI)
    }

    /// Fixed (parameter-independent) singularities on the t-line.
    pub fn fixed_singularities(self) -> &'static [f64] {
        match self {
            FamilyId::PIII | FamilyId::SIIIp | FamilyId::PV => &[0.0],
            FamilyId::PVI | FamilyId::SVI => &[0.0, 1.0],
            _ => &[],
        }
    }

    pub fn parse(s: &str) -> Option<FamilyId> {
        Some(match s.to_ascii_lowercase().as_str() {
            "pi" => FamilyId::PI,
            "pii" => FamilyId::PII,
            "piii" | "piii-prime" => FamilyId::PIII,
            "piv" => FamilyId::PIV,
            "pv" => FamilyId::PV,
            "pvi" => FamilyId::PVI,
            "sii" => FamilyId::SII,
            "siii-prime" | "siiip" => FamilyId::SIIIp,
            "svi" => FamilyId::SVI,
            _ => return None,
        })
    }

    pub fn as_str(self) -> &'static str {
        match self {
            FamilyId::PI => "pi",
            FamilyId::PII => "pii",
            FamilyId::PIII => "piii",
            FamilyId::PIV => "piv",
            FamilyId::PV => "pv",
            FamilyId::PVI => "pvi",
            FamilyId::SII => "sii",
            FamilyId::SIIIp => "siii-prime",
            FamilyId::SVI => "svi",
        }
    }
}

impl fmt::Display for FamilyId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl Serialize for FamilyId {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(self.as_str())
    }
}

/// A second-order equation y″ = rhs(t, y, y′; params).
#[derive(Debug, Clone)]
pub struct SecondOrderODE {
    pub family: FamilyId,
    pub ctx: Arc<Context>,
    pub params: Vec<RationalFunction>,
    pub rhs: RationalFunction,
}

/// A first-order Hamiltonian pair ∂y = f1, ∂x = f2; for S_VI the generating
/// Hamiltonian is carried along and f1 = ∂H/∂x, f2 = −∂H/∂y hold exactly.
#[derive(Debug, Clone)]
pub struct HamiltonianSystem {
    pub family: FamilyId,
    pub ctx: Arc<Context>,
    pub params: Vec<RationalFunction>,
    pub f1: RationalFunction,
    pub f2: RationalFunction,
    pub hamiltonian: Option<RationalFunction>,
}

/// Either form of an equation.
#[derive(Debug, Clone)]
pub enum Equation {
    SecondOrder(SecondOrderODE),
    Hamiltonian(HamiltonianSystem),
}

impl Equation {
    pub fn family(&self) -> FamilyId {
        match self {
            Equation::SecondOrder(e) => e.family,
            Equation::Hamiltonian(s) => s.family,
        }
    }

    pub fn ctx(&self) -> &Arc<Context> {
        match self {
            Equation::SecondOrder(e) => &e.ctx,
            Equation::Hamiltonian(s) => &s.ctx,
        }
    }

    pub fn params(&self) -> &[RationalFunction] {
        match self {
            Equation::SecondOrder(e) => &e.params,
            Equation::Hamiltonian(s) => &s.params,
        }
    }

    /// State variable names of the first-order view: (y, y′) for
    /// second-order equations, (y, x) for Hamiltonian pairs.
    pub fn state_vars(&self) -> (&'static str, &'static str) {
        match self {
            Equation::SecondOrder(_) => ("y", "y'"),
            Equation::Hamiltonian(_) => ("y", "x"),
        }
    }

    /// The first-order vector field over the state variables.
    pub fn vector_field(&self) -> (RationalFunction, RationalFunction) {
        match self {
            Equation::SecondOrder(e) => (RationalFunction::named(&e.ctx, "y'"), e.rhs.clone()),
            Equation::Hamiltonian(s) => (s.f1.clone(), s.f2.clone()),
        }
    }

    pub fn second_order(&self) -> Option<&SecondOrderODE> {
        match self {
            Equation::SecondOrder(e) => Some(e),
            _ => None,
        }
    }

    pub fn hamiltonian(&self) -> Option<&HamiltonianSystem> {
        match self {
            Equation::Hamiltonian(s) => Some(s),
            _ => None,
        }
    }
}

/// Context with the standard dependent variables plus the family's canonical
/// parameter symbols.
pub fn family_context(family: FamilyId) -> Arc<Context> {
    let consts: Vec<(&str, VarKind)> = family
        .param_names()
        .iter()
        .map(|n| (*n, VarKind::Parameter))
        .collect();
    Context::standard(&consts)
}

/// Builds the family's equation with its canonical symbolic parameters.
/// For S_VI the free symbols are (α₀, α₁, α₃, α₄) and α₂ is derived from
/// the affine constraint.
pub fn symbolic_equation(family: FamilyId) -> Equation {
    if family == FamilyId::SVI {
        let ctx = Context::standard(&[
            ("a0", VarKind::Parameter),
            ("a1", VarKind::Parameter),
            ("a3", VarKind::Parameter),
            ("a4", VarKind::Parameter),
        ]);
        let tuple = ParamTuple::from_a4([
            RationalFunction::named(&ctx, "a0"),
            RationalFunction::named(&ctx, "a1"),
            RationalFunction::named(&ctx, "a3"),
            RationalFunction::named(&ctx, "a4"),
        ]);
        return Equation::Hamiltonian(build_svi(&ctx, &tuple));
    }
    let ctx = family_context(family);
    let params: Vec<RationalFunction> = family
        .param_names()
        .iter()
        .map(|n| RationalFunction::named(&ctx, n))
        .collect();
    build_equation(family, &ctx, &params).expect("canonical build succeeds")
}

/// Builds the exact equation of a family from parameter values living in
/// `ctx` (which must be a standard context).
pub fn build_equation(
    family: FamilyId,
    ctx: &Arc<Context>,
    params: &[RationalFunction],
) -> Result<Equation> {
    if params.len() != family.arity() {
        return Err(Error::ArityMismatch {
            family: family.as_str(),
            expected: family.arity(),
            got: params.len(),
        });
    }
    let t = RationalFunction::named(ctx, "t");
    let y = RationalFunction::named(ctx, "y");
    let yp = RationalFunction::named(ctx, "y'");
    let x = RationalFunction::named(ctx, "x");
    let one = RationalFunction::one(ctx);
    let half = RationalFunction::ratio(ctx, 1, 2);

    let second = |rhs: RationalFunction| -> Equation {
        Equation::SecondOrder(SecondOrderODE {
            family,
            ctx: Arc::clone(ctx),
            params: params.to_vec(),
            rhs,
        })
    };

    match family {
        FamilyId::PI => {
            // 6y^2 + t
            Ok(second(&y.pow_i(2)?.scale(&rat::int(6)) + &t))
        }
        FamilyId::PII => {
            // 2y^3 + ty + alpha
            let a = &params[0];
            Ok(second(
                &(&y.pow_i(3)?.scale(&rat::int(2)) + &(&t * &y)) + a,
            ))
        }
        FamilyId::PIII => {
            // (1/y) y'^2 - (1/t) y' + (1/t)(a y^2 + b) + c y^3 + d/y
            let (a, b, c, d) = (&params[0], &params[1], &params[2], &params[3]);
            let rhs = &(&(&yp.pow_i(2)?.div(&y)? - &yp.div(&t)?)
                + &(&(a * &y.pow_i(2)?) + b).div(&t)?)
                + &(&(c * &y.pow_i(3)?) + &d.div(&y)?);
            Ok(second(rhs))
        }
        FamilyId::PIV => {
            // (1/(2y)) y'^2 + (3/2) y^3 + 4 t y^2 + 2 (t^2 - a) y + b/y
            let (a, b) = (&params[0], &params[1]);
            let rhs = &(&(&yp.pow_i(2)?.div(&y.scale(&rat::int(2)))?
                + &y.pow_i(3)?.scale(&rat::ratio(3, 2)))
                + &(&t * &y.pow_i(2)?).scale(&rat::int(4)))
                + &(&(&(&t.pow_i(2)? - a) * &y).scale(&rat::int(2)) + &b.div(&y)?);
            Ok(second(rhs))
        }
        FamilyId::PV => {
            // (1/(2y) + 1/(y-1)) y'^2 - (1/t) y'
            //   + ((y-1)^2/t^2)(a y + b/y) + c y/t + d y(y+1)/(y-1)
            let (a, b, c, d) = (&params[0], &params[1], &params[2], &params[3]);
            let ym1 = &y - &one;
            let coeff = &one.div(&y.scale(&rat::int(2)))? + &one.div(&ym1)?;
            let rhs = &(&(&(&coeff * &yp.pow_i(2)?) - &yp.div(&t)?)
                + &(&ym1.pow_i(2)?.div(&t.pow_i(2)?)? * &(&(a * &y) + &b.div(&y)?)))
                + &(&(c * &y.div(&t)?) + &(d * &(&y * &(&y + &one)).div(&ym1)?));
            Ok(second(rhs))
        }
        FamilyId::PVI => {
            // Second-order form induced by the S_VI Hamiltonian; the
            // reduction identity is re-verified in the test suite.
            //   (1/2)(1/y + 1/(y-1) + 1/(y-t)) y'^2
            //   - (1/t + 1/(t-1) + 1/(y-t)) y'
            //   + (y(y-1)(y-t)/(t^2(t-1)^2))
            //       (a + b t/y^2 + c (t-1)/(y-1)^2 + d t(t-1)/(y-t)^2)
            let (a, b, c, d) = (&params[0], &params[1], &params[2], &params[3]);
            let ym1 = &y - &one;
            let ymt = &y - &t;
            let tm1 = &t - &one;
            let c1 = (&(&one.div(&y)? + &one.div(&ym1)?) + &one.div(&ymt)?).scale(&rat::ratio(1, 2));
            let c2 = &(&one.div(&t)? + &one.div(&tm1)?) + &one.div(&ymt)?;
            let front = (&(&y * &ym1) * &ymt).div(&(&t.pow_i(2)? * &tm1.pow_i(2)?))?;
            let inner = &(&(a + &(b * &t.div(&y.pow_i(2)?)?)) + &(c * &tm1.div(&ym1.pow_i(2)?)?))
                + &(d * &(&t * &tm1).div(&ymt.pow_i(2)?)?);
            let rhs = &(&(&c1 * &yp.pow_i(2)?) - &(&c2 * &yp)) + &(&front * &inner);
            Ok(second(rhs))
        }
        FamilyId::SII => {
            // dy = x - y^2 - t/2 ; dx = 2xy + alpha + 1/2
            let a = &params[0];
            let f1 = &(&x - &y.pow_i(2)?) - &t.scale(&rat::ratio(1, 2));
            let f2 = &(&(&x * &y).scale(&rat::int(2)) + a) + &half;
            Ok(Equation::Hamiltonian(HamiltonianSystem {
                family,
                ctx: Arc::clone(ctx),
                params: params.to_vec(),
                f1,
                f2,
                hamiltonian: None,
            }))
        }
        FamilyId::SIIIp => {
            // dy = (2y^2 x - y^2 + v1 y + t)/t
            // dx = (-2yx^2 + 2xy - v1 x + (v1+v2)/2)/t
            let (v1, v2) = (&params[0], &params[1]);
            let f1 = (&(&(&(&y.pow_i(2)? * &x).scale(&rat::int(2)) - &y.pow_i(2)?) + &(v1 * &y))
                + &t)
                .div(&t)?;
            let f2 = (&(&(&(-&(&y * &x.pow_i(2)?).scale(&rat::int(2)))
                + &(&x * &y).scale(&rat::int(2)))
                - &(v1 * &x))
                + &(v1 + v2).scale(&rat::ratio(1, 2)))
                .div(&t)?;
            Ok(Equation::Hamiltonian(HamiltonianSystem {
                family,
                ctx: Arc::clone(ctx),
                params: params.to_vec(),
                f1,
                f2,
                hamiltonian: None,
            }))
        }
        FamilyId::SVI => {
            let tuple = ParamTuple::from_a5([
                params[0].clone(),
                params[1].clone(),
                params[2].clone(),
                params[3].clone(),
                params[4].clone(),
            ])?;
            Ok(Equation::Hamiltonian(build_svi(ctx, &tuple)))
        }
    }
}

/// S_VI from its Hamiltonian
///   H = [y(y−1)(y−t)x² − x(α₄(y−1)(y−t) + α₃y(y−t) + (α₀−1)y(y−1))
///        + α₂(α₂+α₁)(y−t)] / (t(t−1)),
/// with f1 = ∂H/∂x and f2 = −∂H/∂y exactly.
pub fn build_svi(ctx: &Arc<Context>, tuple: &ParamTuple) -> HamiltonianSystem {
    let [a0, a1, a2, a3, a4] = tuple.a5().clone();
    let t = RationalFunction::named(ctx, "t");
    let y = RationalFunction::named(ctx, "y");
    let x = RationalFunction::named(ctx, "x");
    let one = RationalFunction::one(ctx);
    let ym1 = &y - &one;
    let ymt = &y - &t;
    let linear = &(&(&a4 * &(&ym1 * &ymt)) + &(&a3 * &(&y * &ymt)))
        + &(&(&a0 - &one) * &(&y * &ym1));
    let h_num = &(&(&(&(&y * &ym1) * &ymt) * &x.pow_i(2).unwrap()) - &(&x * &linear))
        + &(&(&a2 * &(&a2 + &a1)) * &ymt);
    let h = h_num.div(&(&t * &(&t - &one))).expect("t(t-1) is nonzero");
    let f1 = h.partial(ctx.var("x"));
    let f2 = -&h.partial(ctx.var("y"));
    HamiltonianSystem {
        family: FamilyId::SVI,
        ctx: Arc::clone(ctx),
        params: tuple.a5().to_vec(),
        f1,
        f2,
        hamiltonian: Some(h),
    }
}

/// Rejects solution expressions that involve anything but t and constants.
fn check_solution_expr(ctx: &Arc<Context>, e: &RationalFunction) -> Result<()> {
    for v in e.variables() {
        if ctx.kind(v) == VarKind::Dependent {
            return Err(Error::InvalidSolution(ctx.name(v).to_string()));
        }
    }
    Ok(())
}

/// ∂²(y_expr) − rhs[y ↦ y_expr, y′ ↦ ∂(y_expr)]; zero iff `y_expr` solves
/// the equation.
pub fn residual_second_order(
    eq: &SecondOrderODE,
    y_expr: &RationalFunction,
) -> Result<RationalFunction> {
    check_solution_expr(&eq.ctx, y_expr)?;
    let d = Derivation::new(&eq.ctx);
    let dy = d.apply(y_expr)?;
    let d2y = d.apply(&dy)?;
    let mut bind = BTreeMap::new();
    bind.insert(eq.ctx.var("y"), y_expr.clone());
    bind.insert(eq.ctx.var("y'"), dy);
    let rhs = eq.rhs.substitute(&bind)?;
    Ok(&d2y - &rhs)
}

/// (∂y_expr − f1[…], ∂x_expr − f2[…]); (0, 0) iff the pair is a solution.
pub fn residual_system(
    sys: &HamiltonianSystem,
    y_expr: &RationalFunction,
    x_expr: &RationalFunction,
) -> Result<(RationalFunction, RationalFunction)> {
    check_solution_expr(&sys.ctx, y_expr)?;
    check_solution_expr(&sys.ctx, x_expr)?;
    let d = Derivation::new(&sys.ctx);
    let dy = d.apply(y_expr)?;
    let dx = d.apply(x_expr)?;
    let mut bind = BTreeMap::new();
    bind.insert(sys.ctx.var("y"), y_expr.clone());
    bind.insert(sys.ctx.var("x"), x_expr.clone());
    let f1 = sys.f1.substitute(&bind)?;
    let f2 = sys.f2.substitute(&bind)?;
    Ok((&dy - &f1, &dx - &f2))
}

/// Splits `rf` as A·v + B with A, B free of `v`; `None` when `rf` is not
/// affine in `v` or its denominator involves `v`.
fn affine_in(rf: &RationalFunction, v: VarId) -> Option<(RationalFunction, RationalFunction)> {
    if rf.denominator().involves(v) {
        return None;
    }
    let coeffs = rf.numerator().coeffs_in(v);
    if coeffs.keys().any(|&e| e > 1) {
        return None;
    }
    let ctx = rf.context();
    let zero = Polynomial::zero(ctx);
    let n1 = coeffs.get(&1).unwrap_or(&zero).clone();
    let n0 = coeffs.get(&0).unwrap_or(&zero).clone();
    let a = RationalFunction::new(n1, rf.denominator().clone()).ok()?;
    let b = RationalFunction::new(n0, rf.denominator().clone()).ok()?;
    Some((a, b))
}

/// Solves x from ∂y = f1 for a given y(t): the unique x_expr with
/// ∂(y_expr) = f1[y ↦ y_expr, x ↦ x_expr]. For S_II this is
/// x = y′ + y² + t/2. Fails when the x-coefficient vanishes identically
/// (y ∈ {0, 1, t} for S_VI).
pub fn lift_to_hamiltonian(
    sys: &HamiltonianSystem,
    y_expr: &RationalFunction,
) -> Result<RationalFunction> {
    check_solution_expr(&sys.ctx, y_expr)?;
    let xv = sys.ctx.var("x");
    let (a, b) = affine_in(&sys.f1, xv).ok_or(Error::NotLiftable)?;
    let mut bind = BTreeMap::new();
    bind.insert(sys.ctx.var("y"), y_expr.clone());
    let a_sub = a.substitute(&bind)?;
    if a_sub.is_zero() {
        return Err(Error::NotLiftable);
    }
    let b_sub = b.substitute(&bind)?;
    let d = Derivation::new(&sys.ctx);
    let dy = d.apply(y_expr)?;
    (&dy - &b_sub).div(&a_sub)
}

/// Eliminates x symbolically: solves x from f1, differentiates along the
/// flow and substitutes into f2, producing the induced y″ = f(t, y, y′).
pub fn reduce_to_second_order(sys: &HamiltonianSystem) -> Result<SecondOrderODE> {
    let ctx = &sys.ctx;
    let xv = ctx.var("x");
    let (a, b) = affine_in(&sys.f1, xv).ok_or(Error::NotReducible)?;
    if a.is_zero() {
        return Err(Error::NotReducible);
    }
    let yp = RationalFunction::named(ctx, "y'");
    let x_expr = (&yp - &b).div(&a)?;

    // Differentiate x(t, y, y') along y ↦ y', y' ↦ y''.
    let d = Derivation::new(ctx)
        .with_image("y", yp.clone())
        .with_image("y'", RationalFunction::named(ctx, "y''"));
    let dx = d.apply(&x_expr)?;

    let mut bind = BTreeMap::new();
    bind.insert(xv, x_expr);
    let f2_sub = sys.f2.substitute(&bind)?;
    let residual = &dx - &f2_sub;

    // residual = C1·y'' + C0 = 0  =>  y'' = -C0/C1
    let (c1, c0) = affine_in(&residual, ctx.var("y''")).ok_or(Error::NotReducible)?;
    if c1.is_zero() {
        return Err(Error::NotReducible);
    }
    let rhs = (-&c0).div(&c1)?;

    let (family, params) = match sys.family {
        FamilyId::SII => (FamilyId::PII, sys.params.clone()),
        FamilyId::SVI => {
            let tuple = ParamTuple::from_a5([
                sys.params[0].clone(),
                sys.params[1].clone(),
                sys.params[2].clone(),
                sys.params[3].clone(),
                sys.params[4].clone(),
            ])?;
            (FamilyId::PVI, tuple.pvi().to_vec())
        }
        other => (other, sys.params.clone()),
    };
    Ok(SecondOrderODE {
        family,
        ctx: Arc::clone(ctx),
        params,
        rhs,
    })
}

/// Exact 5-tuple (α₀, α₁, α₂, α₃, α₄) with α₀+α₁+2α₂+α₃+α₄ = 1.
#[derive(Debug, Clone, PartialEq)]
pub struct ParamTuple {
    a: [RationalFunction; 5],
}

impl ParamTuple {
    /// Validates the affine constraint exactly.
    pub fn from_a5(a: [RationalFunction; 5]) -> Result<Self> {
        let ctx = a[0].context();
        let sum = &(&(&(&a[0] + &a[1]) + &a[2].scale(&rat::int(2))) + &a[3]) + &a[4];
        if sum != RationalFunction::one(ctx) {
            return Err(Error::ConstraintViolated);
        }
        Ok(ParamTuple { a })
    }

    /// Recomputes α₂ from the 4-tuple view (α₀, α₁, α₃, α₄).
    pub fn from_a4(v: [RationalFunction; 4]) -> Self {
        let ctx = v[0].context();
        let one = RationalFunction::one(ctx);
        let a2 =
            (&(&(&(&one - &v[0]) - &v[1]) - &v[2]) - &v[3]).scale(&rat::ratio(1, 2));
        ParamTuple {
            a: [v[0].clone(), v[1].clone(), a2, v[2].clone(), v[3].clone()],
        }
    }

    /// From Watanabe's parameters: α₄ = a₃+a₄, α₃ = a₃−a₄, α₀ = 1−a₁−a₂,
    /// α₁ = a₁−a₂.
    pub fn from_watanabe(w: [RationalFunction; 4]) -> Self {
        let ctx = w[0].context();
        let one = RationalFunction::one(ctx);
        let a0 = &(&one - &w[0]) - &w[1];
        let a1 = &w[0] - &w[1];
        let a3 = &w[2] - &w[3];
        let a4 = &w[2] + &w[3];
        ParamTuple::from_a4([a0, a1, a3, a4])
    }

    pub fn context(&self) -> &Arc<Context> {
        self.a[0].context()
    }

    pub fn a5(&self) -> &[RationalFunction; 5] {
        &self.a
    }

    /// The 4-tuple view (α₀, α₁, α₃, α₄).
    pub fn a4(&self) -> [RationalFunction; 4] {
        [
            self.a[0].clone(),
            self.a[1].clone(),
            self.a[3].clone(),
            self.a[4].clone(),
        ]
    }

    /// P_VI-form view: α = ½α₁², β = −½α₄², γ = ½α₃², δ = ½(1−α₀²).
    pub fn pvi(&self) -> [RationalFunction; 4] {
        let ctx = self.context();
        let half = rat::ratio(1, 2);
        let one = RationalFunction::one(ctx);
        [
            self.a[1].pow_i(2).unwrap().scale(&half),
            -&self.a[4].pow_i(2).unwrap().scale(&half),
            self.a[3].pow_i(2).unwrap().scale(&half),
            (&one - &self.a[0].pow_i(2).unwrap()).scale(&half),
        ]
    }

    /// Watanabe view (a₁, a₂, a₃, a₄).
    pub fn watanabe(&self) -> [RationalFunction; 4] {
        let ctx = self.context();
        let half = rat::ratio(1, 2);
        let one = RationalFunction::one(ctx);
        [
            (&(&one - &self.a[0]) + &self.a[1]).scale(&half),
            (&(&one - &self.a[0]) - &self.a[1]).scale(&half),
            (&self.a[3] + &self.a[4]).scale(&half),
            (&self.a[4] - &self.a[3]).scale(&half),
        ]
    }
}

/// All exact preimages of (α, β, γ, δ) under the P_VI-form view: every sign
/// choice of the four square roots, up to 16 tuples. Fails with
/// [`Error::NotASquare`] when a root leaves the supported coefficient field.
pub fn invert_pvi(v: &[RationalFunction; 4]) -> Result<Vec<ParamTuple>> {
    let ctx = v[0].context();
    let two = rat::int(2);
    let one = RationalFunction::one(ctx);
    let r1 = v[0].scale(&two).sqrt_in_field().ok_or(Error::NotASquare)?;
    let r4 = (-&v[1].scale(&two))
        .sqrt_in_field()
        .ok_or(Error::NotASquare)?;
    let r3 = v[2].scale(&two).sqrt_in_field().ok_or(Error::NotASquare)?;
    let r0 = (&one - &v[3].scale(&two))
        .sqrt_in_field()
        .ok_or(Error::NotASquare)?;
    let mut out = Vec::new();
    for s0 in [1i64, -1] {
        for s1 in [1i64, -1] {
            for s3 in [1i64, -1] {
                for s4 in [1i64, -1] {
                    let tuple = ParamTuple::from_a4([
                        r0.scale(&rat::int(s0)),
                        r1.scale(&rat::int(s1)),
                        r3.scale(&rat::int(s3)),
                        r4.scale(&rat::int(s4)),
                    ]);
                    if !out.contains(&tuple) {
                        out.push(tuple);
                    }
                }
            }
        }
    }
    Ok(out)
}

/// Outcome of comparing the Hamiltonian-induced second-order form of S_VI
/// against the two circulating second-order displays.
#[derive(Debug, Clone)]
pub struct PviFormReport {
    /// Reduction minus the display whose squared-derivative coefficient sum
    /// uses 1/(y−1). Zero: the forms agree.
    pub residual_y_minus_1: RationalFunction,
    /// Reduction minus the variant using 1/(y+1) instead. Nonzero:
    /// y′²/((y−1)(y+1)).
    pub residual_y_plus_1: RationalFunction,
}

impl PviFormReport {
    pub fn summary(&self) -> String {
        format!(
            "pvi form check: residual[1/(y-1)] = {}; residual[1/(y+1)] = {}",
            self.residual_y_minus_1, self.residual_y_plus_1
        )
    }
}

/// Reduces symbolic S_VI to second order and compares it term-by-term, at
/// the matching parameter values, against both second-order displays.
pub fn pvi_form_report() -> Result<PviFormReport> {
    let eq = symbolic_equation(FamilyId::SVI);
    let sys = eq.hamiltonian().expect("svi is hamiltonian");
    let reduced = reduce_to_second_order(sys)?;
    let ctx = &reduced.ctx;

    let induced = build_equation(FamilyId::PVI, ctx, &reduced.params)?;
    let induced_rhs = induced.second_order().unwrap().rhs.clone();

    // Variant with 1/(y+1) as the middle squared-derivative coefficient.
    let y = RationalFunction::named(ctx, "y");
    let one = RationalFunction::one(ctx);
    let yp = RationalFunction::named(ctx, "y'");
    let swap = &one.div(&(&y + &one))? - &one.div(&(&y - &one))?;
    let variant_rhs = &induced_rhs + &(&swap * &yp.pow_i(2)?).scale(&rat::ratio(1, 2));

    Ok(PviFormReport {
        residual_y_minus_1: &reduced.rhs - &induced_rhs,
        residual_y_plus_1: &reduced.rhs - &variant_rhs,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::parser::parse_expr;

    fn rf(ctx: &Arc<Context>, text: &str) -> RationalFunction {
        let d = Derivation::new(ctx)
            .with_image("y", RationalFunction::named(ctx, "y'"))
            .with_image("y'", RationalFunction::named(ctx, "y''"));
        parse_expr(text, ctx, &d).expect("fixture parses")
    }

    #[test]
    fn build_examples() {
        // P_II(0) rhs is 2y^3 + ty
        let ctx = family_context(FamilyId::PII);
        let eq = build_equation(FamilyId::PII, &ctx, &[RationalFunction::zero(&ctx)]).unwrap();
        let rhs = &eq.second_order().unwrap().rhs;
        assert_eq!(rhs, &rf(&ctx, "2*y^3 + t*y"));

        // S_II(alpha): f1 = x - y^2 - t/2
        let eq = symbolic_equation(FamilyId::SII);
        let sys = eq.hamiltonian().unwrap();
        assert_eq!(sys.f1, rf(&sys.ctx, "x - y^2 - t/2"));
        assert_eq!(sys.f2, rf(&sys.ctx, "2*x*y + alpha + 1/2"));

        // S_IIIp: f1 = (2y^2 x - y^2 + v1 y + t)/t
        let eq = symbolic_equation(FamilyId::SIIIp);
        let sys = eq.hamiltonian().unwrap();
        assert_eq!(sys.f1, rf(&sys.ctx, "(2*y^2*x - y^2 + v1*y + t)/t"));

        // arity mismatch
        let ctx = family_context(FamilyId::PIV);
        assert!(matches!(
            build_equation(FamilyId::PIV, &ctx, &[]),
            Err(Error::ArityMismatch { .. })
        ));
    }

    #[test]
    fn svi_hamiltonian_consistency() {
        let eq = symbolic_equation(FamilyId::SVI);
        let sys = eq.hamiltonian().unwrap();
        let h = sys.hamiltonian.as_ref().unwrap();
        assert_eq!(sys.f1, h.partial(sys.ctx.var("x")));
        assert_eq!(sys.f2, -&h.partial(sys.ctx.var("y")));
        // constraint violation is rejected
        let ctx = family_context(FamilyId::SVI);
        let bad: Vec<RationalFunction> = (0..5).map(|_| RationalFunction::one(&ctx)).collect();
        assert!(matches!(
            build_equation(FamilyId::SVI, &ctx, &bad),
            Err(Error::ConstraintViolated)
        ));
    }

    #[test]
    fn residual_second_order_examples() {
        // P_II(0) with y = 0
        let ctx = family_context(FamilyId::PII);
        let zero = RationalFunction::zero(&ctx);
        let eq0 = build_equation(FamilyId::PII, &ctx, &[zero.clone()]).unwrap();
        let r = residual_second_order(eq0.second_order().unwrap(), &zero).unwrap();
        assert!(r.is_zero());

        // P_II(1) with y = -1/t
        let one = RationalFunction::one(&ctx);
        let eq1 = build_equation(FamilyId::PII, &ctx, &[one]).unwrap();
        let r = residual_second_order(eq1.second_order().unwrap(), &rf(&ctx, "-1/t")).unwrap();
        assert!(r.is_zero());

        // P_I with y = t is off by -6t^2 - t
        let ctx = family_context(FamilyId::PI);
        let eq = build_equation(FamilyId::PI, &ctx, &[]).unwrap();
        let r = residual_second_order(eq.second_order().unwrap(), &rf(&ctx, "t")).unwrap();
        assert_eq!(r, rf(&ctx, "-6*t^2 - t"));

        // dependent variables are rejected in solution expressions
        let bad = rf(&ctx, "y");
        assert!(matches!(
            residual_second_order(eq.second_order().unwrap(), &bad),
            Err(Error::InvalidSolution(_))
        ));
    }

    #[test]
    fn residual_system_examples() {
        let ctx = family_context(FamilyId::SII);
        let zero = RationalFunction::zero(&ctx);
        let eq = build_equation(FamilyId::SII, &ctx, &[zero.clone()]).unwrap();
        let sys = eq.hamiltonian().unwrap();

        let (r1, r2) = residual_system(sys, &zero, &rf(&ctx, "t/2")).unwrap();
        assert!(r1.is_zero() && r2.is_zero());

        let (r1, r2) = residual_system(sys, &zero, &rf(&ctx, "t")).unwrap();
        assert_eq!(r1, rf(&ctx, "-t/2"));
        assert_eq!(r2, rf(&ctx, "1/2"));

        // S_VI with (y, x) = (t, 0) misses the field
        let eq = symbolic_equation(FamilyId::SVI);
        let svi = eq.hamiltonian().unwrap();
        let t = RationalFunction::named(&svi.ctx, "t");
        let z = RationalFunction::zero(&svi.ctx);
        let (r1, _r2) = residual_system(svi, &t, &z).unwrap();
        assert!(!r1.is_zero());
        assert_eq!(r1, rf(&svi.ctx, "a0"));
    }

    #[test]
    fn lift_examples() {
        let ctx = family_context(FamilyId::SII);
        let zero = RationalFunction::zero(&ctx);
        let eq = build_equation(FamilyId::SII, &ctx, &[zero.clone()]).unwrap();
        let sys = eq.hamiltonian().unwrap();
        assert_eq!(lift_to_hamiltonian(sys, &zero).unwrap(), rf(&ctx, "t/2"));

        // S_II(1) with y = -1/t lifts to y' + y^2 + t/2 = 2/t^2 + t/2
        let one = RationalFunction::one(&ctx);
        let eq = build_equation(FamilyId::SII, &ctx, &[one]).unwrap();
        let sys = eq.hamiltonian().unwrap();
        let x = lift_to_hamiltonian(sys, &rf(&ctx, "-1/t")).unwrap();
        assert_eq!(x, rf(&ctx, "2/t^2 + t/2"));
        let (r1, r2) = residual_system(sys, &rf(&ctx, "-1/t"), &x).unwrap();
        assert!(r1.is_zero() && r2.is_zero());

        // y = t is an excluded value for S_VI
        let eq = symbolic_equation(FamilyId::SVI);
        let svi = eq.hamiltonian().unwrap();
        let t = RationalFunction::named(&svi.ctx, "t");
        assert!(matches!(
            lift_to_hamiltonian(svi, &t),
            Err(Error::NotLiftable)
        ));
    }

    #[test]
    fn reduce_sii_reproduces_pii() {
        let eq = symbolic_equation(FamilyId::SII);
        let sys = eq.hamiltonian().unwrap();
        let reduced = reduce_to_second_order(sys).unwrap();
        assert_eq!(reduced.family, FamilyId::PII);
        assert_eq!(reduced.rhs, rf(&sys.ctx, "2*y^3 + t*y + alpha"));
    }

    #[test]
    fn reduce_siiip_golden_fixture() {
        let eq = symbolic_equation(FamilyId::SIIIp);
        let sys = eq.hamiltonian().unwrap();
        let reduced = reduce_to_second_order(sys).unwrap();
        let golden = rf(
            &sys.ctx,
            "(t^2*y'^2 - t^2 - t*v1*y - t*y*y' + t*y + v2*y^3 + y^4) / (t^2*y)",
        );
        assert_eq!(reduced.rhs, golden);
    }

    #[test]
    fn reduce_svi_matches_induced_display() {
        let report = pvi_form_report().unwrap();
        assert!(report.residual_y_minus_1.is_zero());
        assert!(!report.residual_y_plus_1.is_zero());
        // The variant differs by exactly y'^2/((y-1)(y+1)).
        let ctx = report.residual_y_plus_1.context().clone();
        let expect = rf(&ctx, "y'^2/((y-1)*(y+1))");
        assert_eq!(report.residual_y_plus_1, expect);
    }

    #[test]
    fn lift_reduce_round_trip_on_fixture() {
        // residual_system(sys, y, lift(y)) = (0,0) iff
        // residual_second_order(reduce(sys), y) = 0, on S_II fixtures.
        let ctx = family_context(FamilyId::SII);
        let one = RationalFunction::one(&ctx);
        let eq = build_equation(FamilyId::SII, &ctx, &[one]).unwrap();
        let sys = eq.hamiltonian().unwrap();
        let reduced = reduce_to_second_order(sys).unwrap();

        for (text, solves) in [("-1/t", true), ("t", false)] {
            let y = rf(&ctx, text);
            let x = lift_to_hamiltonian(sys, &y).unwrap();
            let (r1, r2) = residual_system(sys, &y, &x).unwrap();
            let r = residual_second_order(&reduced, &y).unwrap();
            assert_eq!(r1.is_zero() && r2.is_zero(), solves);
            assert_eq!(r.is_zero(), solves);
        }
    }

    #[test]
    fn param_tuple_views() {
        let ctx = family_context(FamilyId::SVI);
        let c = |n: i64, d: i64| RationalFunction::ratio(&ctx, n, d);

        // Watanabe (0,0,0,0) -> a4 view (1,0,0,0)
        let w0 = ParamTuple::from_watanabe([c(0, 1), c(0, 1), c(0, 1), c(0, 1)]);
        assert_eq!(w0.a4(), [c(1, 1), c(0, 1), c(0, 1), c(0, 1)]);
        // round trip
        assert_eq!(w0.watanabe(), [c(0, 1), c(0, 1), c(0, 1), c(0, 1)]);

        // pvi view of (1,0,0,0) is (0,0,0,0)
        let p = ParamTuple::from_a4([c(1, 1), c(0, 1), c(0, 1), c(0, 1)]);
        assert_eq!(p.pvi(), [c(0, 1), c(0, 1), c(0, 1), c(0, 1)]);

        // invert_pvi(1/2, -1/2, 1/2, 0) has 16 preimages including (1,1,1,1)
        let tuples = invert_pvi(&[c(1, 2), c(-1, 2), c(1, 2), c(0, 1)]).unwrap();
        assert_eq!(tuples.len(), 16);
        let target = ParamTuple::from_a4([c(1, 1), c(1, 1), c(1, 1), c(1, 1)]);
        assert!(tuples.contains(&target));
        // every preimage maps forward to the input
        for tu in &tuples {
            assert_eq!(tu.pvi(), [c(1, 2), c(-1, 2), c(1, 2), c(0, 1)]);
        }

        // non-square fails
        assert!(matches!(
            invert_pvi(&[c(1, 1), c(-1, 2), c(1, 2), c(0, 1)]),
            Err(Error::NotASquare)
        ));
    }

    #[test]
    fn invert_pvi_with_transcendental() {
        let ctx = Context::standard(&[("tau", VarKind::Transcendental)]);
        let tau = RationalFunction::named(&ctx, "tau");
        let half = rat::ratio(1, 2);
        // alpha = tau^2/2 so a1 = ±tau
        let alpha = tau.pow_i(2).unwrap().scale(&half);
        let zero = RationalFunction::zero(&ctx);
        let tuples = invert_pvi(&[
            alpha,
            zero.clone(),
            zero.clone(),
            RationalFunction::ratio(&ctx, 1, 2),
        ])
        .unwrap();
        // a0 = 0, a4 = 0, a3 = 0, a1 = ±tau: two preimages
        assert_eq!(tuples.len(), 2);
        assert!(tuples.iter().any(|t| t.a4()[1] == tau));
    }
}
