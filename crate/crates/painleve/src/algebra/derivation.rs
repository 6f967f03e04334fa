//! Derivations with assignable images on dependent variables.

use std::sync::Arc;

use super::context::{Context, VarId, VarKind};
use super::ratfun::RationalFunction;
use crate::error::{Error, Result};

/// A derivation ∂ on the rational-function field: ∂(t) = 1, parameters and
/// transcendental symbols map to 0, and dependent variables carry assignable
/// images. Differentiation satisfies linearity, the Leibniz rule and the
/// quotient rule by construction.
#[derive(Debug, Clone)]
pub struct Derivation {
    ctx: Arc<Context>,
    images: Vec<Option<RationalFunction>>,
}

impl Derivation {
    /// Time derivation: t ↦ 1, constants ↦ 0, dependent images unset.
    pub fn new(ctx: &Arc<Context>) -> Self {
        let images = ctx
            .ids()
            .map(|v| match ctx.kind(v) {
                VarKind::Time => Some(RationalFunction::one(ctx)),
                VarKind::Parameter | VarKind::Transcendental => {
                    Some(RationalFunction::zero(ctx))
                }
                VarKind::Dependent => None,
            })
            .collect();
        Derivation {
            ctx: Arc::clone(ctx),
            images,
        }
    }

    pub fn context(&self) -> &Arc<Context> {
        &self.ctx
    }

    /// Assigns the image of a dependent variable. Images of t and constants
    /// are fixed by the invariants and cannot be reassigned.
    pub fn set_image(&mut self, v: VarId, image: RationalFunction) {
        assert_eq!(
            self.ctx.kind(v),
            VarKind::Dependent,
            "only dependent variables take assignable images"
        );
        self.images[v.index()] = Some(image);
    }

    pub fn with_image(mut self, name: &str, image: RationalFunction) -> Self {
        let v = self.ctx.var(name);
        self.set_image(v, image);
        self
    }

    pub fn image(&self, v: VarId) -> Option<&RationalFunction> {
        self.images[v.index()].as_ref()
    }

    /// ∂(e) = Σ_v (∂e/∂v)·∂(v) over the variables present in `e`.
    pub fn apply(&self, e: &RationalFunction) -> Result<RationalFunction> {
        let mut out = RationalFunction::zero(&self.ctx);
        for v in e.variables() {
            let image = self.images[v.index()]
                .as_ref()
                .ok_or_else(|| Error::UnknownDerivative(self.ctx.name(v).to_string()))?;
            if image.is_zero() {
                continue;
            }
            out = &out + &(&e.partial(v) * image);
        }
        Ok(out)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::rat::int;

    fn setup() -> (Arc<Context>, Derivation) {
        let ctx = Context::builder()
            .time("t")
            .dependent("y")
            .transcendental("tau")
            .build();
        let d = Derivation::new(&ctx);
        (ctx, d)
    }

    #[test]
    fn power_rule() {
        let (ctx, d) = setup();
        let t = RationalFunction::named(&ctx, "t");
        let dt2 = d.apply(&t.pow_i(2).unwrap()).unwrap();
        assert_eq!(dt2, t.scale(&int(2)));
    }

    #[test]
    fn quotient_rule_with_assigned_image() {
        let (ctx, d) = setup();
        let t = RationalFunction::named(&ctx, "t");
        let y = RationalFunction::named(&ctx, "y");
        // d(1/y) with dy = F is -F/y^2; take F = t.
        let d = d.with_image("y", t.clone());
        let got = d.apply(&y.recip().unwrap()).unwrap();
        let expect = (-&t).div(&y.pow_i(2).unwrap()).unwrap();
        assert_eq!(got, expect);
    }

    #[test]
    fn transcendental_is_constant() {
        let (ctx, d) = setup();
        let t = RationalFunction::named(&ctx, "t");
        let tau = RationalFunction::named(&ctx, "tau");
        let got = d.apply(&(&t * &tau)).unwrap();
        assert_eq!(got, tau);
    }

    #[test]
    fn missing_image_is_reported() {
        let (ctx, d) = setup();
        let y = RationalFunction::named(&ctx, "y");
        assert_eq!(
            d.apply(&y),
            Err(Error::UnknownDerivative("y".to_string()))
        );
    }

    #[test]
    fn leibniz_and_linearity() {
        let (ctx, d) = setup();
        let t = RationalFunction::named(&ctx, "t");
        let y = RationalFunction::named(&ctx, "y");
        let d = d.with_image("y", &(&y * &y) + &t);
        let e1 = &y + &t.pow_i(3).unwrap();
        let e2 = &y.recip().unwrap() - &t;
        let lhs = d.apply(&(&e1 * &e2)).unwrap();
        let rhs = &(&d.apply(&e1).unwrap() * &e2) + &(&e1 * &d.apply(&e2).unwrap());
        assert_eq!(lhs, rhs);
        let sum = d.apply(&(&e1 + &e2)).unwrap();
        assert_eq!(sum, &d.apply(&e1).unwrap() + &d.apply(&e2).unwrap());
    }
}
