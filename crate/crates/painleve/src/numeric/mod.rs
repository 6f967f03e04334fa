//! Floating-point evaluation: adaptive integration of the Painlevé systems,
//! pointwise numerical Bäcklund checks, Taylor-series seeds, and detection
//! of polynomial relations among sampled solutions.

mod relations;
mod taylor;

pub use relations::{candidate_max_residual, detect_relations, monomial_basis, RelationCandidate};
pub use taylor::taylor_seed;

use std::sync::Arc;

use serde::Serialize;

use crate::algebra::{rat, Context, RationalFunction};
use crate::backlund::{act_params, Generator, WeylWord};
use crate::error::{Error, Result};
use crate::systems::{build_svi, Equation, FamilyId, ParamTuple};

/// Hard cap on |y|, |x|; beyond it the integrator assumes an approaching
/// movable pole and aborts cleanly.
const POLE_GUARD: f64 = 1e8;

/// One accepted integration sample.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Sample {
    pub t: f64,
    pub y: f64,
    pub x: f64,
}

/// Numerically integrated sample sequence with error metadata. The second
/// state slot holds y′ for second-order equations and x for Hamiltonian
/// pairs; the CSV header is `t,y,x` either way.
#[derive(Debug, Clone, Serialize)]
pub struct Trajectory {
    pub family: FamilyId,
    pub params: Vec<f64>,
    pub tol: f64,
    pub samples: Vec<Sample>,
    /// Location at which the pole guard fired, if it did.
    pub pole_abort: Option<f64>,
}

impl Trajectory {
    pub fn last(&self) -> Option<&Sample> {
        self.samples.last()
    }

    /// CSV export with header `t,y,x`.
    pub fn write_csv(&self, w: &mut impl std::io::Write) -> std::io::Result<()> {
        writeln!(w, "t,y,x")?;
        for s in &self.samples {
            writeln!(w, "{},{},{}", fmt_f64(s.t), fmt_f64(s.y), fmt_f64(s.x))?;
        }
        Ok(())
    }

    /// The JSON sidecar `{system, params, tol, pole_abort}`.
    pub fn sidecar(&self) -> serde_json::Value {
        serde_json::json!({
            "system": self.family.as_str(),
            "params": self.params,
            "tol": self.tol,
            "pole_abort": self.pole_abort,
        })
    }
}

fn fmt_f64(v: f64) -> String {
    // Shortest representation that round-trips.
    let mut s = format!("{v}");
    if !s.contains('.') && !s.contains('e') && !s.contains("inf") && !s.contains("NaN") {
        s.push_str(".0");
    }
    s
}

/// A rational function compiled to f64 term lists for fast evaluation.
struct CompiledRf {
    num: Vec<(f64, Box<[(usize, u32)]>)>,
    den: Vec<(f64, Box<[(usize, u32)]>)>,
}

impl CompiledRf {
    fn compile(rf: &RationalFunction) -> CompiledRf {
        let pack = |p: &crate::algebra::Polynomial| {
            p.terms()
                .map(|(m, c)| {
                    let exps: Vec<(usize, u32)> = m
                        .0
                        .iter()
                        .enumerate()
                        .filter(|(_, &e)| e > 0)
                        .map(|(i, &e)| (i, e))
                        .collect();
                    (rat::to_f64(c), exps.into_boxed_slice())
                })
                .collect()
        };
        CompiledRf {
            num: pack(rf.numerator()),
            den: pack(rf.denominator()),
        }
    }

    fn eval_terms(terms: &[(f64, Box<[(usize, u32)]>)], point: &[f64]) -> f64 {
        let mut acc = 0.0;
        for (c, exps) in terms {
            let mut v = *c;
            for &(i, e) in exps.iter() {
                v *= point[i].powi(e as i32);
            }
            acc += v;
        }
        acc
    }

    /// `None` when the denominator is smaller than `min_den` in magnitude or
    /// anything is non-finite.
    fn eval(&self, point: &[f64], min_den: f64) -> Option<f64> {
        let d = Self::eval_terms(&self.den, point);
        if !d.is_finite() || d.abs() < min_den {
            return None;
        }
        let n = Self::eval_terms(&self.num, point);
        if !n.is_finite() {
            return None;
        }
        Some(n / d)
    }
}

/// The first-order vector field of an equation compiled over (t, state).
struct CompiledField {
    f1: CompiledRf,
    f2: CompiledRf,
    idx_t: usize,
    idx_y: usize,
    idx_s2: usize,
    point: Vec<f64>,
}

impl CompiledField {
    fn new(eq: &Equation) -> Result<CompiledField> {
        let ctx = eq.ctx();
        let (f1, f2) = eq.vector_field();
        let (sy, s2) = eq.state_vars();
        for f in [&f1, &f2] {
            for v in f.variables() {
                let name = ctx.name(v);
                if name != "t" && name != sy && name != s2 {
                    return Err(Error::Usage(format!(
                        "equation has unbound symbol `{name}`; numeric \
                         integration needs fully numeric parameters"
                    )));
                }
            }
        }
        Ok(CompiledField {
            f1: CompiledRf::compile(&f1),
            f2: CompiledRf::compile(&f2),
            idx_t: ctx.var("t").index(),
            idx_y: ctx.var(sy).index(),
            idx_s2: ctx.var(s2).index(),
            point: vec![0.0; ctx.len()],
        })
    }

    fn eval(&mut self, t: f64, state: [f64; 2]) -> Option<[f64; 2]> {
        self.point[self.idx_t] = t;
        self.point[self.idx_y] = state[0];
        self.point[self.idx_s2] = state[1];
        let d1 = self.f1.eval(&self.point, 1e-300)?;
        let d2 = self.f2.eval(&self.point, 1e-300)?;
        Some([d1, d2])
    }
}

fn check_path(family: FamilyId, t0: f64, t1: f64) -> Result<()> {
    let (lo, hi) = (t0.min(t1), t0.max(t1));
    for &s in family.fixed_singularities() {
        if lo <= s && s <= hi {
            return Err(Error::PathThroughFixedSingularity(s));
        }
    }
    Ok(())
}

/// Integrates the equation from `t0` to `t1` with an embedded adaptive
/// Runge–Kutta 5(4) pair; local error per step is controlled to `tol`.
/// Deterministic for fixed inputs. Samples are the accepted steps.
pub fn integrate(
    eq: &Equation,
    t0: f64,
    state0: [f64; 2],
    t1: f64,
    tol: f64,
) -> Result<Trajectory> {
    integrate_impl(eq, t0, state0, t1, tol, None)
}

/// Like [`integrate`], but records samples exactly at the given output
/// points (between `t0` and `t1`, sorted in integration direction); the
/// stepper lands on each output point.
pub fn integrate_at(
    eq: &Equation,
    t0: f64,
    state0: [f64; 2],
    t1: f64,
    tol: f64,
    outputs: &[f64],
) -> Result<Trajectory> {
    integrate_impl(eq, t0, state0, t1, tol, Some(outputs))
}

fn integrate_impl(
    eq: &Equation,
    t0: f64,
    state0: [f64; 2],
    t1: f64,
    tol: f64,
    outputs: Option<&[f64]>,
) -> Result<Trajectory> {
    if t0 == t1 {
        return Err(Error::Usage("integration requires t0 != t1".into()));
    }
    if !(1e-13..=1e-3).contains(&tol) {
        return Err(Error::Usage("tol must lie in [1e-13, 1e-3]".into()));
    }
    check_path(eq.family(), t0, t1)?;
    let mut field = CompiledField::new(eq)?;

    let params: Vec<f64> = eq
        .params()
        .iter()
        .map(|p| p.as_rational().map(|r| rat::to_f64(&r)).unwrap_or(f64::NAN))
        .collect();

    let dir = (t1 - t0).signum();
    let mut out_iter = outputs.map(|o| o.iter().copied().peekable());
    let record_steps = outputs.is_none();

    let mut traj = Trajectory {
        family: eq.family(),
        params,
        tol,
        samples: Vec::new(),
        pole_abort: None,
    };

    let mut t = t0;
    let mut state = state0;
    if record_steps {
        traj.samples.push(Sample {
            t,
            y: state[0],
            x: state[1],
        });
    }

    let mut k1 = field
        .eval(t, state)
        .ok_or(Error::StepSizeUnderflow { last_t: t })?;
    let mut h = dir * (0.01 * (t1 - t0).abs()).min(0.1);

    // Dormand–Prince RK5(4) tableau.
    const A: [[f64; 6]; 6] = [
        [1.0 / 5.0, 0.0, 0.0, 0.0, 0.0, 0.0],
        [3.0 / 40.0, 9.0 / 40.0, 0.0, 0.0, 0.0, 0.0],
        [44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0, 0.0, 0.0, 0.0],
        [
            19372.0 / 6561.0,
            -25360.0 / 2187.0,
            64448.0 / 6561.0,
            -212.0 / 729.0,
            0.0,
            0.0,
        ],
        [
            9017.0 / 3168.0,
            -355.0 / 33.0,
            46732.0 / 5247.0,
            49.0 / 176.0,
            -5103.0 / 18656.0,
            0.0,
        ],
        [
            35.0 / 384.0,
            0.0,
            500.0 / 1113.0,
            125.0 / 192.0,
            -2187.0 / 6784.0,
            11.0 / 84.0,
        ],
    ];
    const C: [f64; 6] = [0.2, 0.3, 0.8, 8.0 / 9.0, 1.0, 1.0];
    // Error coefficients: b5 - b4.
    const E: [f64; 7] = [
        71.0 / 57600.0,
        0.0,
        -71.0 / 16695.0,
        71.0 / 1920.0,
        -17253.0 / 339200.0,
        22.0 / 525.0,
        -1.0 / 40.0,
    ];

    let mut steps: u64 = 0;
    loop {
        if (t - t1) * dir >= 0.0 {
            break;
        }
        steps += 1;
        if steps > 10_000_000 {
            return Err(Error::StepSizeUnderflow { last_t: t });
        }
        // Clamp to the end point and to the next requested output.
        let mut limit = t1;
        if let Some(it) = out_iter.as_mut() {
            while let Some(&next) = it.peek() {
                if (next - t) * dir <= 1e-14 * t.abs().max(1.0) {
                    it.next();
                } else {
                    limit = if (next - t1) * dir < 0.0 { next } else { t1 };
                    break;
                }
            }
        }
        if h.abs() > (limit - t).abs() {
            h = limit - t;
        }
        if h.abs() < 1e-14 * t.abs().max(1.0) {
            return Err(Error::StepSizeUnderflow { last_t: t });
        }

        // Stage evaluations.
        let mut ks = [[0.0; 2]; 7];
        ks[0] = k1;
        let mut failed = false;
        for s in 0..6 {
            let mut yi = state;
            for (j, kj) in ks.iter().enumerate().take(s + 1) {
                yi[0] += h * A[s][j] * kj[0];
                yi[1] += h * A[s][j] * kj[1];
            }
            match field.eval(t + C[s] * h, yi) {
                Some(k) => ks[s + 1] = k,
                None => {
                    failed = true;
                    break;
                }
            }
        }
        if failed {
            h *= 0.5;
            continue;
        }

        // 5th-order solution is stage row 6 (FSAL); error via E.
        let mut y_new = state;
        for (j, kj) in ks.iter().enumerate().take(6) {
            y_new[0] += h * A[5][j] * kj[0];
            y_new[1] += h * A[5][j] * kj[1];
        }
        let mut err = 0.0_f64;
        for d in 0..2 {
            let mut e = 0.0;
            for (j, kj) in ks.iter().enumerate() {
                e += E[j] * kj[d];
            }
            e *= h;
            let scale = tol + tol * state[d].abs().max(y_new[d].abs());
            err = err.max((e / scale).abs());
        }

        if !err.is_finite() {
            h *= 0.5;
            continue;
        }
        if err <= 1.0 {
            // Accept.
            t += h;
            state = y_new;
            k1 = ks[6];
            if !state[0].is_finite()
                || !state[1].is_finite()
                || state[0].abs() > POLE_GUARD
                || state[1].abs() > POLE_GUARD
            {
                traj.pole_abort = Some(t);
                break;
            }
            let is_output = out_iter
                .as_mut()
                .map(|it| {
                    if it
                        .peek()
                        .is_some_and(|&o| (o - t) * dir <= 1e-12 * t.abs().max(1.0))
                    {
                        it.next();
                        true
                    } else {
                        false
                    }
                })
                .unwrap_or(false);
            if record_steps || is_output {
                traj.samples.push(Sample {
                    t,
                    y: state[0],
                    x: state[1],
                });
            }
        }
        // Step-size update.
        let factor = if err == 0.0 {
            5.0
        } else {
            (0.9 * err.powf(-0.2)).clamp(0.2, 5.0)
        };
        h *= factor;
    }
    Ok(traj)
}

/// Transforms trajectory samples pointwise through a Bäcklund word and
/// measures how well they satisfy the target system. Derivatives are pushed
/// through each generator's closed form by the chain rule, seeded with the
/// source vector field; parameter tracking stays exact while the pointwise
/// evaluation is floating point. The max-norm residual against the target
/// field over all samples is returned.
pub fn backlund_numeric_check(word: &WeylWord, a4: &[f64; 4], traj: &Trajectory) -> Result<f64> {
    let ctx = Context::standard(&[]);
    let tuple = tuple_from_f64(&ctx, a4);
    let source = build_svi(&ctx, &tuple);
    let f1c = CompiledRf::compile(&source.f1);
    let f2c = CompiledRf::compile(&source.f2);

    // Exact parameter tuples along the word (rightmost factor first).
    let steps: Vec<Generator> = word.0.iter().rev().copied().collect();
    let mut tuples = vec![tuple.clone()];
    for &g in &steps {
        let next = act_params(g, tuples.last().unwrap());
        tuples.push(next);
    }
    let target = build_svi(&ctx, tuples.last().unwrap());
    let g1c = CompiledRf::compile(&target.f1);
    let g2c = CompiledRf::compile(&target.f2);

    // Per-step alpha values as f64 (exact tuples stay small; only the
    // pointwise evaluation rounds).
    let alpha_f64 = |p: &ParamTuple, i: usize| {
        p.a5()[i]
            .as_rational()
            .map(|r| rat::to_f64(&r))
            .expect("constant tuple entry")
    };

    let (it, iy, ix) = (
        ctx.var("t").index(),
        ctx.var("y").index(),
        ctx.var("x").index(),
    );
    let mut point = vec![0.0; ctx.len()];
    let mut max_res = 0.0_f64;
    const MIN_DEN: f64 = 1e-12;

    for (idx, s) in traj.samples.iter().enumerate() {
        let sing = || Error::PointwiseSingular { index: idx };
        point[it] = s.t;
        point[iy] = s.y;
        point[ix] = s.x;
        let mut y = s.y;
        let mut x = s.x;
        let mut dy = f1c.eval(&point, MIN_DEN).ok_or_else(sing)?;
        let mut dx = f2c.eval(&point, MIN_DEN).ok_or_else(sing)?;

        // Chain rule through each generator's closed form.
        for (k, &g) in steps.iter().enumerate() {
            match g {
                0 | 3 | 4 => {
                    // x' = x - a/den(y), den is y-t, y-1 or y.
                    let (a_idx, den, dden_dt): (usize, f64, f64) = match g {
                        0 => (0, y - s.t, -1.0),
                        3 => (3, y - 1.0, 0.0),
                        _ => (4, y, 0.0),
                    };
                    if den.abs() < MIN_DEN {
                        return Err(sing());
                    }
                    let a = alpha_f64(&tuples[k], a_idx as usize);
                    // d/dt [x - a/den] = dx + a (dden/dt) / den^2
                    let dden = dy + dden_dt;
                    x -= a / den;
                    dx += a * dden / (den * den);
                }
                1 => {}
                2 => {
                    if x.abs() < MIN_DEN {
                        return Err(sing());
                    }
                    let a = alpha_f64(&tuples[k], 2);
                    // d/dt [y + a/x] = dy - a dx / x^2
                    y += a / x;
                    dy -= a * dx / (x * x);
                }
                other => panic!("generator index out of range: {other}"),
            }
        }

        // Target field at the transformed point.
        let mut tp = point.clone();
        tp[iy] = y;
        tp[ix] = x;
        let g1 = g1c.eval(&tp, MIN_DEN).ok_or_else(sing)?;
        let g2 = g2c.eval(&tp, MIN_DEN).ok_or_else(sing)?;

        max_res = max_res.max((dy - g1).abs()).max((dx - g2).abs());
    }
    Ok(max_res)
}

/// Exact parameter tuple from floating 4-tuple values (each finite f64
/// converts exactly to a rational; α₂ is derived so the constraint holds
/// exactly).
pub fn tuple_from_f64(ctx: &Arc<Context>, a4: &[f64; 4]) -> ParamTuple {
    let vals = a4.map(|v| {
        RationalFunction::constant(
            ctx,
            num::BigRational::from_float(v).expect("finite parameter"),
        )
    });
    ParamTuple::from_a4(vals)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::systems::{build_equation, family_context};

    fn sii(alpha: i64) -> Equation {
        let ctx = family_context(FamilyId::SII);
        build_equation(FamilyId::SII, &ctx, &[RationalFunction::int(&ctx, alpha)]).unwrap()
    }

    #[test]
    fn rational_solution_tracking() {
        // S_II(0) from (0, t0/2): stays on (0, t/2).
        let eq = sii(0);
        let traj = integrate(&eq, 1.0, [0.0, 0.5], 3.0, 1e-10).unwrap();
        let last = traj.last().unwrap();
        assert!((last.t - 3.0).abs() < 1e-12);
        assert!(last.y.abs() < 1e-9, "y = {}", last.y);
        assert!((last.x - 1.5).abs() < 1e-9, "x = {}", last.x);
        assert!(traj.pole_abort.is_none());
    }

    #[test]
    fn pii_closed_form_endpoint() {
        // P_II(1) from y(1) = -1, y'(1) = 1: y = -1/t, so y(2) = -0.5.
        let ctx = family_context(FamilyId::PII);
        let eq = build_equation(FamilyId::PII, &ctx, &[RationalFunction::one(&ctx)]).unwrap();
        let traj = integrate(&eq, 1.0, [-1.0, 1.0], 2.0, 1e-10).unwrap();
        let last = traj.last().unwrap();
        assert!((last.y + 0.5).abs() < 1e-8, "y(2) = {}", last.y);
    }

    #[test]
    fn tolerance_convergence_against_taylor() {
        // Halving tol never increases the end-state error on the P_I seed.
        let ctx = family_context(FamilyId::PI);
        let eq = build_equation(FamilyId::PI, &ctx, &[]).unwrap();
        let coeffs = taylor_seed(
            eq.second_order().unwrap(),
            &rat::int(0),
            &rat::int(0),
            &rat::int(0),
            12,
        )
        .unwrap();
        let t_end = 0.4_f64;
        let reference: f64 = coeffs
            .iter()
            .enumerate()
            .map(|(k, c)| rat::to_f64(c) * t_end.powi(k as i32))
            .sum();
        let mut prev = f64::INFINITY;
        for tol in [1e-6, 5e-7, 2.5e-7, 1.25e-7] {
            let traj = integrate(&eq, 0.0, [0.0, 0.0], t_end, tol).unwrap();
            let err = (traj.last().unwrap().y - reference).abs();
            assert!(err <= prev + 1e-15, "error grew at tol {tol}");
            prev = err;
        }
    }

    #[test]
    fn fixed_singularity_guard() {
        let ctx = family_context(FamilyId::SIIIp);
        let eq = build_equation(
            FamilyId::SIIIp,
            &ctx,
            &[RationalFunction::one(&ctx), RationalFunction::one(&ctx)],
        )
        .unwrap();
        assert!(matches!(
            integrate(&eq, -1.0, [1.0, 1.0], 1.0, 1e-8),
            Err(Error::PathThroughFixedSingularity(s)) if s == 0.0
        ));
    }

    #[test]
    fn pole_guard_aborts_cleanly() {
        // P_I solutions blow up quickly from a large seed.
        let ctx = family_context(FamilyId::PI);
        let eq = build_equation(FamilyId::PI, &ctx, &[]).unwrap();
        let traj = integrate(&eq, 0.0, [3.0, 0.0], 8.0, 1e-9).unwrap();
        assert!(traj.pole_abort.is_some(), "expected pole abort");
        let abort = traj.pole_abort.unwrap();
        assert!(traj.samples.iter().all(|s| s.t <= abort));
    }

    #[test]
    fn output_points_are_hit_exactly() {
        let eq = sii(0);
        let outs = [1.25, 1.5, 2.0, 2.75];
        let traj = integrate_at(&eq, 1.0, [0.0, 0.5], 3.0, 1e-9, &outs).unwrap();
        assert_eq!(traj.samples.len(), outs.len());
        for (s, o) in traj.samples.iter().zip(outs.iter()) {
            assert!((s.t - o).abs() < 1e-12);
            assert!((s.x - o / 2.0).abs() < 1e-8);
        }
    }

    #[test]
    fn determinism() {
        let eq = sii(0);
        let a = integrate(&eq, 1.0, [0.3, 0.9], 4.0, 1e-9).unwrap();
        let b = integrate(&eq, 1.0, [0.3, 0.9], 4.0, 1e-9).unwrap();
        assert_eq!(a.samples, b.samples);
    }

    #[test]
    fn backlund_residual_small_on_good_trajectory() {
        let a4 = [0.3125, 0.25, 0.21875, 0.171875];
        let ctx = Context::standard(&[]);
        let tuple = tuple_from_f64(&ctx, &a4);
        let eq = Equation::Hamiltonian(build_svi(&ctx, &tuple));
        let traj = integrate(&eq, 2.0, [2.4, 0.7], 2.6, 1e-10).unwrap();
        assert!(traj.pole_abort.is_none());

        // s1 leaves (y, x) untouched and the residual is exactly zero.
        let w: WeylWord = "s1".parse().unwrap();
        let r = backlund_numeric_check(&w, &a4, &traj).unwrap();
        assert_eq!(r, 0.0);

        // s4 transforms x; the identity keeps the residual at rounding level.
        let w: WeylWord = "s4".parse().unwrap();
        let r = backlund_numeric_check(&w, &a4, &traj).unwrap();
        assert!(r < 1e-8, "s4 residual {r}");

        // the translation word t0 composes ten generators
        let w = WeylWord::translation(0);
        let r = backlund_numeric_check(&w, &a4, &traj).unwrap();
        assert!(r < 1e-7, "t0 residual {r}");
    }

    #[test]
    fn csv_and_sidecar_shape() {
        let eq = sii(0);
        let traj = integrate(&eq, 1.0, [0.0, 0.5], 1.5, 1e-9).unwrap();
        let mut buf = Vec::new();
        traj.write_csv(&mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert!(text.starts_with("t,y,x\n"));
        let side = traj.sidecar();
        assert_eq!(side["system"], "sii");
        assert_eq!(side["pole_abort"], serde_json::Value::Null);
    }
}
