//! Bäcklund generators s₀…s₄ for S_VI acting on parameters and solutions,
//! Weyl words, translation operators, symbolic solution-preservation checks,
//! and the reflecting hyperplane set ℳ of the affine D₄ action.
//!
//! Generator action (parameters | solution):
//!
//! ```text
//! s0: (-a0, a1, a2+a0, a3, a4)          | y,            x - a0/(y-t)
//! s1: (a0, -a1, a2+a1, a3, a4)          | y,            x
//! s2: (a0+a2, a1+a2, -a2, a3+a2, a4+a2) | y + a2/x,     x
//! s3: (a0, a1, a2+a3, -a3, a4)          | y,            x - a3/(y-1)
//! s4: (a0, a1, a2+a4, a3, -a4)          | y,            x - a4/y
//! ```
//!
//! Each generator is an involution; words compose right-to-left (the
//! rightmost generator acts first).

use std::collections::{HashMap, VecDeque};
use std::fmt;
use std::str::FromStr;

use num::{BigInt, Integer};
use serde::Serialize;

use crate::algebra::{rat, Rat, RationalFunction};
use crate::error::{Error, Result};
use crate::systems::{build_svi, symbolic_equation, FamilyId, ParamTuple};

/// Generator index 0..=4.
pub type Generator = u8;

/// Applies the parameter row of generator `g`. The affine constraint is
/// preserved.
pub fn act_params(g: Generator, p: &ParamTuple) -> ParamTuple {
    let [a0, a1, a2, a3, a4] = p.a5().clone();
    let a = match g {
        0 => [-&a0, a1.clone(), &a2 + &a0, a3.clone(), a4.clone()],
        1 => [a0.clone(), -&a1, &a2 + &a1, a3.clone(), a4.clone()],
        2 => [&a0 + &a2, &a1 + &a2, -&a2, &a3 + &a2, &a4 + &a2],
        3 => [a0.clone(), a1.clone(), &a2 + &a3, -&a3, a4.clone()],
        4 => [a0.clone(), a1.clone(), &a2 + &a4, a3.clone(), -&a4],
        _ => panic!("generator index out of range: {g}"),
    };
    ParamTuple::from_a5(a).expect("generators preserve the affine constraint")
}

/// Applies the solution row of generator `g`, using the source tuple's
/// parameter values. Fails when the rewrite's denominator (x for s₂, y−t
/// for s₀, y−1 for s₃, y for s₄) is identically zero after substitution.
pub fn act_solution(
    g: Generator,
    p: &ParamTuple,
    y: &RationalFunction,
    x: &RationalFunction,
) -> Result<(RationalFunction, RationalFunction)> {
    let ctx = p.context();
    let a = p.a5();
    let t = RationalFunction::named(ctx, "t");
    let one = RationalFunction::one(ctx);
    let shift = |den: RationalFunction, coeff: &RationalFunction| -> Result<RationalFunction> {
        if den.is_zero() {
            return Err(Error::IdenticallySingular { step: 0 });
        }
        Ok(x - &coeff.div(&den)?)
    };
    match g {
        0 => Ok((y.clone(), shift(y - &t, &a[0])?)),
        1 => Ok((y.clone(), x.clone())),
        2 => {
            if x.is_zero() {
                return Err(Error::IdenticallySingular { step: 0 });
            }
            Ok((y + &a[2].div(x)?, x.clone()))
        }
        3 => Ok((y.clone(), shift(y - &one, &a[3])?)),
        4 => Ok((y.clone(), shift(y.clone(), &a[4])?)),
        _ => panic!("generator index out of range: {g}"),
    }
}

/// A finite word in the generators; the rightmost factor acts first.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct WeylWord(pub Vec<Generator>);

impl WeylWord {
    pub fn identity() -> Self {
        WeylWord(Vec::new())
    }

    /// The translation word t_i (i ∈ {0, 1, 3, 4}) sending α_i ↦ α_i − 2
    /// and fixing the other three 4-tuple coordinates.
    pub fn translation(i: usize) -> Self {
        let (head, block) = match i {
            0 => (0, [1, 3, 4, 2]),
            1 => (1, [0, 3, 4, 2]),
            3 => (3, [0, 1, 4, 2]),
            4 => (4, [0, 1, 3, 2]),
            _ => panic!("translation index must be one of 0, 1, 3, 4"),
        };
        let mut w = vec![head, 2];
        w.extend_from_slice(&block);
        w.extend_from_slice(&block);
        WeylWord(w)
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

impl fmt::Display for WeylWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.0.iter().map(|g| format!("s{g}")).collect();
        write!(f, "{}", parts.join(" "))
    }
}

impl FromStr for WeylWord {
    type Err = Error;

    /// Word syntax: `"s0 s2 (s1 s3 s4 s2)^2"` with parentheses and `^`
    /// repetition.
    fn from_str(s: &str) -> Result<Self> {
        let mut p = WordParser {
            bytes: s.as_bytes(),
            pos: 0,
        };
        let seq = p.sequence(0)?;
        p.skip_ws();
        if p.pos != p.bytes.len() {
            return Err(Error::Syntax {
                offset: p.pos,
                message: "unexpected trailing input in word".into(),
            });
        }
        Ok(WeylWord(seq))
    }
}

struct WordParser<'a> {
    bytes: &'a [u8],
    pos: usize,
}

impl<'a> WordParser<'a> {
    fn skip_ws(&mut self) {
        while self.pos < self.bytes.len() && self.bytes[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn err(&self, message: &str) -> Error {
        Error::Syntax {
            offset: self.pos,
            message: message.to_string(),
        }
    }

    fn sequence(&mut self, depth: usize) -> Result<Vec<Generator>> {
        let mut out = Vec::new();
        loop {
            self.skip_ws();
            match self.bytes.get(self.pos) {
                None => return Ok(out),
                Some(b')') if depth > 0 => return Ok(out),
                Some(b'(') => {
                    self.pos += 1;
                    let inner = self.sequence(depth + 1)?;
                    self.skip_ws();
                    if self.bytes.get(self.pos) != Some(&b')') {
                        return Err(self.err("expected ')'"));
                    }
                    self.pos += 1;
                    let reps = self.repetition()?;
                    for _ in 0..reps {
                        out.extend_from_slice(&inner);
                    }
                }
                Some(b's') => {
                    self.pos += 1;
                    let d = self
                        .bytes
                        .get(self.pos)
                        .copied()
                        .filter(u8::is_ascii_digit)
                        .ok_or_else(|| self.err("expected generator digit after 's'"))?;
                    let g = d - b'0';
                    if g > 4 {
                        return Err(self.err("generator index must be 0..=4"));
                    }
                    self.pos += 1;
                    let reps = self.repetition()?;
                    for _ in 0..reps {
                        out.push(g);
                    }
                }
                Some(_) => return Err(self.err("expected 's<digit>' or '('")),
            }
        }
    }

    fn repetition(&mut self) -> Result<u32> {
        self.skip_ws();
        if self.bytes.get(self.pos) != Some(&b'^') {
            return Ok(1);
        }
        self.pos += 1;
        self.skip_ws();
        let start = self.pos;
        while self
            .bytes
            .get(self.pos)
            .copied()
            .is_some_and(|b| b.is_ascii_digit())
        {
            self.pos += 1;
        }
        if self.pos == start {
            return Err(self.err("expected repetition count after '^'"));
        }
        std::str::from_utf8(&self.bytes[start..self.pos])
            .unwrap()
            .parse()
            .map_err(|_| self.err("repetition count out of range"))
    }
}

/// Right-to-left composition of the word on parameters and, optionally, a
/// carried solution pair. An identically singular step reports its position
/// in the word as written (0-based from the left).
pub fn apply_word(
    w: &WeylWord,
    p: &ParamTuple,
    solution: Option<(&RationalFunction, &RationalFunction)>,
) -> Result<(ParamTuple, Option<(RationalFunction, RationalFunction)>)> {
    let mut tuple = p.clone();
    let mut sol = solution.map(|(y, x)| (y.clone(), x.clone()));
    for (k, &g) in w.0.iter().enumerate().rev() {
        if let Some((y, x)) = &sol {
            let (ny, nx) = act_solution(g, &tuple, y, x).map_err(|e| match e {
                Error::IdenticallySingular { .. } => Error::IdenticallySingular { step: k },
                other => other,
            })?;
            sol = Some((ny, nx));
        }
        tuple = act_params(g, &tuple);
    }
    Ok((tuple, sol))
}

/// Result of the exact identity check that generator `g` maps solutions of
/// S_VI(ᾱ) to solutions of S_VI(s_g(ᾱ)): with ∂y, ∂x replaced by the source
/// vector field, the flow derivative of the transformed pair must equal the
/// target vector field at the transformed pair. The residual pair is (0, 0)
/// iff the identity holds.
#[derive(Debug, Clone)]
pub struct PreservationReport {
    pub generator: Generator,
    pub residual: (RationalFunction, RationalFunction),
}

impl PreservationReport {
    pub fn holds(&self) -> bool {
        self.residual.0.is_zero() && self.residual.1.is_zero()
    }
}

pub fn verify_solution_preservation(g: Generator) -> PreservationReport {
    let eq = symbolic_equation(FamilyId::SVI);
    let sys = eq.hamiltonian().expect("svi is hamiltonian");
    let ctx = &sys.ctx;
    let tuple = ParamTuple::from_a4([
        RationalFunction::named(ctx, "a0"),
        RationalFunction::named(ctx, "a1"),
        RationalFunction::named(ctx, "a3"),
        RationalFunction::named(ctx, "a4"),
    ]);

    let y = RationalFunction::named(ctx, "y");
    let x = RationalFunction::named(ctx, "x");
    let (ty, tx) = act_solution(g, &tuple, &y, &x).expect("indeterminate solution pair");

    // Flow derivative: ∂e = ∂e/∂t + (∂e/∂y)·f1 + (∂e/∂x)·f2.
    let d = crate::algebra::Derivation::new(ctx)
        .with_image("y", sys.f1.clone())
        .with_image("x", sys.f2.clone());
    let dy = d.apply(&ty).expect("images assigned");
    let dx = d.apply(&tx).expect("images assigned");

    let target = build_svi(ctx, &act_params(g, &tuple));
    let mut bind = std::collections::BTreeMap::new();
    bind.insert(ctx.var("y"), ty);
    bind.insert(ctx.var("x"), tx);
    let g1 = target.f1.substitute(&bind).expect("no identical pole");
    let g2 = target.f2.substitute(&bind).expect("no identical pole");

    PreservationReport {
        generator: g,
        residual: (&dy - &g1, &dx - &g2),
    }
}

/// Witness of membership in the union ℳ of reflecting hyperplanes.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum HyperplaneWitness {
    /// α_i = n for i ∈ {0, 1, 3, 4} and integer n.
    Coordinate {
        /// Index into (α₀, α₁, α₃, α₄), written as 0, 1, 3, 4.
        index: u8,
        #[serde(serialize_with = "crate::classify::serialize_bigint")]
        n: BigInt,
    },
    /// α₀ ± α₁ ± α₃ ± α₄ = 2n + 1 for integer n.
    SignedSum {
        /// Signs applied to (α₀, α₁, α₃, α₄); the first is always +1.
        signs: [i8; 4],
        #[serde(serialize_with = "crate::classify::serialize_bigint")]
        n: BigInt,
    },
}

impl fmt::Display for HyperplaneWitness {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            HyperplaneWitness::Coordinate { index, n } => write!(f, "alpha{index} = {n}"),
            HyperplaneWitness::SignedSum { signs, n } => {
                let pat: String = signs.iter().map(|&s| if s > 0 { '+' } else { '-' }).collect();
                write!(f, "signed sum {pat} = 2*{n}+1")
            }
        }
    }
}

/// Decides membership of the 4-tuple (α₀, α₁, α₃, α₄) in ℳ: some coordinate
/// is an integer, or some signed sum α₀ ± α₁ ± α₃ ± α₄ is an odd integer.
pub fn in_hyperplane_set(p: &[RationalFunction; 4]) -> Option<HyperplaneWitness> {
    const ALPHA_INDEX: [u8; 4] = [0, 1, 3, 4];
    for (k, v) in p.iter().enumerate() {
        if let Some(n) = v.as_integer() {
            return Some(HyperplaneWitness::Coordinate {
                index: ALPHA_INDEX[k],
                n,
            });
        }
    }
    for s1 in [1i8, -1] {
        for s3 in [1i8, -1] {
            for s4 in [1i8, -1] {
                let sum =
                    &(&(&p[0] + &signed(&p[1], s1)) + &signed(&p[2], s3)) + &signed(&p[3], s4);
                if let Some(v) = sum.as_integer() {
                    if v.is_odd() {
                        let n = (v - 1) / 2;
                        return Some(HyperplaneWitness::SignedSum {
                            signs: [1, s1, s3, s4],
                            n,
                        });
                    }
                }
            }
        }
    }
    None
}

fn signed(v: &RationalFunction, s: i8) -> RationalFunction {
    if s > 0 {
        v.clone()
    } else {
        -v
    }
}

/// True iff p − q lies in (2ℤ)⁴ componentwise: membership in the same coset
/// of the translation sublattice, a sufficient condition for lying in the
/// same Weyl orbit.
pub fn translation_coset_equal(p: &[RationalFunction; 4], q: &[RationalFunction; 4]) -> bool {
    p.iter()
        .zip(q.iter())
        .all(|(a, b)| (a - b).scale(&rat::ratio(1, 2)).as_integer().is_some())
}

/// Bounded breadth-first search for a generator word sending the rational
/// 4-tuple `p` to `q`. Returns the word (rightmost factor acts first) when
/// one exists within `depth` applications.
pub fn orbit_word_search(p: &[Rat; 4], q: &[Rat; 4], depth: usize) -> Option<WeylWord> {
    if p == q {
        return Some(WeylWord::identity());
    }
    let mut seen: HashMap<[Rat; 4], (u8, [Rat; 4])> = HashMap::new();
    let mut queue: VecDeque<([Rat; 4], usize)> = VecDeque::new();
    queue.push_back((p.clone(), 0));
    while let Some((cur, d)) = queue.pop_front() {
        if d >= depth {
            continue;
        }
        for g in 0..5u8 {
            let next = act_params_rat(g, &cur);
            if next == *q {
                // Generators recorded most-recent-first, so the path reads
                // left-to-right with the first move rightmost.
                let mut word = vec![g];
                let mut back = cur.clone();
                while back != *p {
                    let (pg, prev) = seen[&back].clone();
                    word.push(pg);
                    back = prev;
                }
                return Some(WeylWord(word));
            }
            if !seen.contains_key(&next) && next != *p {
                seen.insert(next.clone(), (g, cur.clone()));
                queue.push_back((next, d + 1));
            }
        }
    }
    None
}

/// Parameter action of a generator on a rational 4-tuple (α₂ implicit).
fn act_params_rat(g: Generator, p: &[Rat; 4]) -> [Rat; 4] {
    let a2 = (Rat::from_integer(1.into()) - &p[0] - &p[1] - &p[2] - &p[3])
        / Rat::from_integer(2.into());
    let [a0, a1, a3, a4] = p.clone();
    match g {
        0 => [-a0, a1, a3, a4],
        1 => [a0, -a1, a3, a4],
        2 => [a0 + &a2, a1 + &a2, a3 + &a2, a4 + &a2],
        3 => [a0, a1, -a3, a4],
        4 => [a0, a1, a3, -a4],
        _ => panic!("generator index out of range: {g}"),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::{Context, VarKind};
    use std::sync::Arc;

    fn symbolic_tuple() -> (Arc<Context>, ParamTuple) {
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
        (ctx, tuple)
    }

    fn rational_tuple(vals: [(i64, i64); 4]) -> [RationalFunction; 4] {
        let ctx = Context::standard(&[]);
        vals.map(|(n, d)| RationalFunction::ratio(&ctx, n, d))
    }

    #[test]
    fn table_rows_on_symbolic_tuple() {
        let (ctx, p) = symbolic_tuple();
        let a = |n: &str| RationalFunction::named(&ctx, n);
        let a2 = p.a5()[2].clone();

        // s1: (a0, -a1, a2+a1, a3, a4)
        let s1 = act_params(1, &p);
        assert_eq!(s1.a5()[0], a("a0"));
        assert_eq!(s1.a5()[1], -&a("a1"));
        assert_eq!(s1.a5()[2], &a2 + &a("a1"));
        assert_eq!(s1.a5()[3], a("a3"));
        assert_eq!(s1.a5()[4], a("a4"));

        // s2: (a0+a2, a1+a2, -a2, a3+a2, a4+a2)
        let s2 = act_params(2, &p);
        assert_eq!(s2.a5()[0], &a("a0") + &a2);
        assert_eq!(s2.a5()[1], &a("a1") + &a2);
        assert_eq!(s2.a5()[2], -&a2);
        assert_eq!(s2.a5()[3], &a("a3") + &a2);
        assert_eq!(s2.a5()[4], &a("a4") + &a2);
    }

    #[test]
    fn involutions() {
        let (ctx, p) = symbolic_tuple();
        let y = RationalFunction::named(&ctx, "y");
        let x = RationalFunction::named(&ctx, "x");
        for g in 0..5u8 {
            let once = act_params(g, &p);
            assert_eq!(act_params(g, &once), p, "s{g}^2 on parameters");
            let (y1, x1) = act_solution(g, &p, &y, &x).unwrap();
            let (y2, x2) = act_solution(g, &once, &y1, &x1).unwrap();
            assert_eq!((y2, x2), (y.clone(), x.clone()), "s{g}^2 on solutions");
        }
    }

    #[test]
    fn solution_rows() {
        let (ctx, p) = symbolic_tuple();
        let y = RationalFunction::named(&ctx, "y");
        let x = RationalFunction::named(&ctx, "x");

        // s1 is the identity on (y, x)
        assert_eq!(act_solution(1, &p, &y, &x).unwrap(), (y.clone(), x.clone()));

        // s4 sends x to x - a4/y
        let (y4, x4) = act_solution(4, &p, &y, &x).unwrap();
        assert_eq!(y4, y);
        assert_eq!(x4, &x - &RationalFunction::named(&ctx, "a4").div(&y).unwrap());

        // s2 with x identically zero is singular
        let zero = RationalFunction::zero(&ctx);
        assert!(matches!(
            act_solution(2, &p, &y, &zero),
            Err(Error::IdenticallySingular { .. })
        ));
    }

    #[test]
    fn preservation_all_generators() {
        for g in 0..5u8 {
            let report = verify_solution_preservation(g);
            assert!(report.holds(), "s{g} preservation residual nonzero");
        }
    }

    #[test]
    fn translation_words() {
        let (_ctx, p) = symbolic_tuple();
        let base = p.a4();
        for i in [0usize, 1, 3, 4] {
            let w = WeylWord::translation(i);
            let (out, _) = apply_word(&w, &p, None).unwrap();
            let got = out.a4();
            let slot = match i {
                0 => 0,
                1 => 1,
                3 => 2,
                4 => 3,
                _ => unreachable!(),
            };
            for k in 0..4 {
                let diff = &got[k] - &base[k];
                if k == slot {
                    assert_eq!(
                        diff,
                        RationalFunction::int(base[k].context(), -2),
                        "t{i} moves alpha{i} by -2"
                    );
                } else {
                    assert!(diff.is_zero(), "t{i} fixes coordinate {k}");
                }
            }
        }
    }

    #[test]
    fn word_composition() {
        let (_ctx, p) = symbolic_tuple();
        // t0 then t1 shifts both alpha0 and alpha1 by -2.
        let mut w = WeylWord::translation(0).0;
        w.extend(WeylWord::translation(1).0);
        let (out, _) = apply_word(&WeylWord(w), &p, None).unwrap();
        let base = p.a4();
        let got = out.a4();
        for (k, delta) in [(0usize, -2i64), (1, -2), (2, 0), (3, 0)] {
            let diff = &got[k] - &base[k];
            assert_eq!(diff, RationalFunction::int(base[k].context(), delta));
        }
    }

    #[test]
    fn word_parsing() {
        let w: WeylWord = "s0 s2 (s1 s3 s4 s2)^2".parse().unwrap();
        assert_eq!(w, WeylWord::translation(0));
        let w: WeylWord = "(s2)^3 s4^2".parse().unwrap();
        assert_eq!(w.0, vec![2, 2, 2, 4, 4]);
        assert!("s5".parse::<WeylWord>().is_err());
        assert!("s0 (s1".parse::<WeylWord>().is_err());
        assert!("q1".parse::<WeylWord>().is_err());
    }

    #[test]
    fn hyperplane_membership() {
        // integer coordinate
        let p = rational_tuple([(1, 1), (1, 2), (1, 3), (1, 5)]);
        assert_eq!(
            in_hyperplane_set(&p),
            Some(HyperplaneWitness::Coordinate {
                index: 0,
                n: BigInt::from(1)
            })
        );

        // the strong-minimality fixture is outside every hyperplane
        let p = rational_tuple([(1, 2), (4, 5), (1, 3), (2, 5)]);
        assert_eq!(in_hyperplane_set(&p), None);

        // all-plus signed sum 1 = 2*0+1
        let p = rational_tuple([(1, 4), (1, 4), (1, 4), (1, 4)]);
        assert_eq!(
            in_hyperplane_set(&p),
            Some(HyperplaneWitness::SignedSum {
                signs: [1, 1, 1, 1],
                n: BigInt::from(0)
            })
        );
    }

    #[test]
    fn hyperplane_on_symbolic_tuple() {
        let (_ctx, p) = symbolic_tuple();
        assert_eq!(in_hyperplane_set(&p.a4()), None);
    }

    #[test]
    fn coset_equality() {
        let p = rational_tuple([(1, 2), (-1, 5), (1, 3), (2, 5)]);
        assert!(translation_coset_equal(&p, &p));
        let q = rational_tuple([(-3, 2), (-1, 5), (1, 3), (22, 5)]);
        assert!(translation_coset_equal(&p, &q));
        let r = rational_tuple([(1, 2), (-1, 5), (1, 3), (1, 5)]);
        assert!(!translation_coset_equal(&p, &r));
    }

    #[test]
    fn orbit_search_finds_reflections() {
        let a = |n: i64, d: i64| Rat::new(n.into(), d.into());
        let p = [a(1, 2), a(-1, 5), a(1, 3), a(2, 5)];
        // s1 flips the second coordinate.
        let q = [a(1, 2), a(1, 5), a(1, 3), a(2, 5)];
        let w = orbit_word_search(&p, &q, 4).expect("one reflection away");
        let ctx = Context::standard(&[]);
        let tuple = ParamTuple::from_a4([
            RationalFunction::ratio(&ctx, 1, 2),
            RationalFunction::ratio(&ctx, -1, 5),
            RationalFunction::ratio(&ctx, 1, 3),
            RationalFunction::ratio(&ctx, 2, 5),
        ]);
        let (got, _) = apply_word(&w, &tuple, None).unwrap();
        assert_eq!(got.a4()[1], RationalFunction::ratio(&ctx, 1, 5));
        // unreachable targets give None
        let far = [a(1, 7), a(1, 7), a(1, 7), a(1, 7)];
        assert!(orbit_word_search(&p, &far, 3).is_none());
    }
}
