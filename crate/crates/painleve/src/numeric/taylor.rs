//! Exact Taylor-series seeds for second-order equations, used as an
//! independent reference for the adaptive integrator.

use num::{One, Zero};

use crate::algebra::rat::Rat;
use crate::error::{Error, Result};
use crate::systems::SecondOrderODE;

const MAX_ORDER: usize = 30;

/// Taylor coefficients c₀..c_N of the local solution of y″ = rhs(t, y, y′)
/// at t₀ with y(t₀) = y₀, y′(t₀) = y₀′, generated by the standard
/// order-by-order recurrence: the coefficient of (t−t₀)^k in the rhs series
/// determines c_{k+2} = [s^k] rhs / ((k+1)(k+2)). All arithmetic is exact.
pub fn taylor_seed(
    eq: &SecondOrderODE,
    t0: &Rat,
    y0: &Rat,
    yp0: &Rat,
    order: usize,
) -> Result<Vec<Rat>> {
    if order > MAX_ORDER {
        return Err(Error::Usage(format!("order must be at most {MAX_ORDER}")));
    }
    let ctx = &eq.ctx;
    for v in eq.rhs.variables() {
        let name = ctx.name(v);
        if name != "t" && name != "y" && name != "y'" {
            return Err(Error::Usage(format!(
                "equation has unbound symbol `{name}`; the series seed needs \
                 fully numeric parameters"
            )));
        }
    }
    let n = order + 1;

    let mut y = vec![Rat::zero(); n];
    y[0] = y0.clone();
    if n > 1 {
        y[1] = yp0.clone();
    }

    for k in 0..order.saturating_sub(1) {
        let f = rhs_series(eq, t0, &y, k + 1)?;
        let denom = Rat::from_integer(((k + 1) * (k + 2)).into());
        y[k + 2] = &f[k] / denom;
    }
    Ok(y)
}

/// Series of the rhs at the current approximation, truncated to `len`
/// coefficients.
fn rhs_series(eq: &SecondOrderODE, t0: &Rat, y: &[Rat], len: usize) -> Result<Vec<Rat>> {
    let ctx = &eq.ctx;
    // Per-variable argument series in s = t - t0.
    let mut t_series = vec![Rat::zero(); len];
    t_series[0] = t0.clone();
    if len > 1 {
        t_series[1] = Rat::one();
    }
    let mut yp_series = vec![Rat::zero(); len];
    for k in 0..len.min(y.len().saturating_sub(1)) {
        yp_series[k] = &y[k + 1] * Rat::from_integer((k as i64 + 1).into());
    }
    let y_series: Vec<Rat> = (0..len)
        .map(|k| y.get(k).cloned().unwrap_or_else(Rat::zero))
        .collect();

    let series_for = |name: &str| -> Vec<Rat> {
        match name {
            "t" => t_series.clone(),
            "y" => y_series.clone(),
            "y'" => yp_series.clone(),
            _ => unreachable!("checked in taylor_seed"),
        }
    };

    let eval_poly = |p: &crate::algebra::Polynomial| -> Vec<Rat> {
        let mut acc = vec![Rat::zero(); len];
        for (mono, coeff) in p.terms() {
            let mut term = vec![Rat::zero(); len];
            term[0] = coeff.clone();
            for (i, &e) in mono.0.iter().enumerate() {
                if e == 0 {
                    continue;
                }
                let name = ctx.name(crate::algebra::VarId(i));
                let s = series_for(name);
                for _ in 0..e {
                    term = mul_series(&term, &s, len);
                }
            }
            for (a, b) in acc.iter_mut().zip(term.iter()) {
                *a += b;
            }
        }
        acc
    };

    let num = eval_poly(eq.rhs.numerator());
    let den = eval_poly(eq.rhs.denominator());
    if den[0].is_zero() {
        return Err(Error::RhsSingularAtSeed);
    }
    Ok(div_series(&num, &den, len))
}

fn mul_series(a: &[Rat], b: &[Rat], len: usize) -> Vec<Rat> {
    let mut out = vec![Rat::zero(); len];
    for (i, ai) in a.iter().enumerate() {
        if ai.is_zero() {
            continue;
        }
        for (j, bj) in b.iter().enumerate() {
            if i + j >= len {
                break;
            }
            out[i + j] += ai * bj;
        }
    }
    out
}

fn div_series(num: &[Rat], den: &[Rat], len: usize) -> Vec<Rat> {
    let mut out = vec![Rat::zero(); len];
    for k in 0..len {
        let mut acc = num[k].clone();
        for j in 0..k {
            acc -= &out[j] * &den[k - j];
        }
        out[k] = acc / den[0].clone();
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::rat::{int, ratio};
    use crate::algebra::RationalFunction;
    use crate::systems::{build_equation, family_context, FamilyId};

    #[test]
    fn pi_series_start() {
        // y'' = 6y^2 + t with zero data: 0 + 0 t + 0 t^2 + (1/6) t^3 + ...
        let ctx = family_context(FamilyId::PI);
        let eq = build_equation(FamilyId::PI, &ctx, &[]).unwrap();
        let c = taylor_seed(eq.second_order().unwrap(), &int(0), &int(0), &int(0), 6).unwrap();
        assert_eq!(c[0], int(0));
        assert_eq!(c[1], int(0));
        assert_eq!(c[2], int(0));
        assert_eq!(c[3], ratio(1, 6));
    }

    #[test]
    fn pii_zero_solution() {
        let ctx = family_context(FamilyId::PII);
        let eq = build_equation(FamilyId::PII, &ctx, &[RationalFunction::zero(&ctx)]).unwrap();
        let c = taylor_seed(eq.second_order().unwrap(), &int(0), &int(0), &int(0), 10).unwrap();
        assert!(c.iter().all(|v| v.is_zero()));
    }

    #[test]
    fn pii_geometric_series() {
        // P_II(1), y = -1/t at t0 = 1: -1 + (t-1) - (t-1)^2 + ...
        let ctx = family_context(FamilyId::PII);
        let eq = build_equation(FamilyId::PII, &ctx, &[RationalFunction::one(&ctx)]).unwrap();
        let c = taylor_seed(eq.second_order().unwrap(), &int(1), &int(-1), &int(1), 8).unwrap();
        for (k, v) in c.iter().enumerate() {
            let expect = if k % 2 == 0 { int(-1) } else { int(1) };
            assert_eq!(*v, expect, "coefficient {k}");
        }
    }

    #[test]
    fn singular_seed_is_rejected() {
        // P_IV rhs has y in the denominator: y0 = 0 is singular.
        let ctx = family_context(FamilyId::PIV);
        let eq = build_equation(
            FamilyId::PIV,
            &ctx,
            &[RationalFunction::zero(&ctx), RationalFunction::one(&ctx)],
        )
        .unwrap();
        assert_eq!(
            taylor_seed(eq.second_order().unwrap(), &int(1), &int(0), &int(1), 5),
            Err(Error::RhsSingularAtSeed)
        );
    }

    #[test]
    fn order_cap() {
        let ctx = family_context(FamilyId::PI);
        let eq = build_equation(FamilyId::PI, &ctx, &[]).unwrap();
        assert!(taylor_seed(eq.second_order().unwrap(), &int(0), &int(0), &int(0), 31).is_err());
    }
}
