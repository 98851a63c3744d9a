//! Modulated ball terms: coeff * lambda(freq * x) * 1_{ball}(x).
//!
//! This class of functions is closed under the Fourier transform term by
//! term (the transform of a modulated ball is a modulated ball), under
//! support cutoffs and under dilations by grid points, with every step a
//! single exact character-ball integral. It backs the cutoff-trace oracle,
//! where full grid transforms would be far too large; agreement with the
//! grid character sum of `bruhat` is checked in tests on shared domains.

use crate::bruhat::{BruhatFunction, Term};
use crate::error::{Error, Result};
use crate::mult::MultFunction;
use crate::padic::{Ball, PRat};
use crate::scalar::{Scalar, ScalarContext};
use std::sync::Arc;

#[derive(Clone, Debug)]
pub struct ModTerm {
    pub ball: Ball,
    pub freq: PRat,
    pub coeff: Scalar,
}

impl ModTerm {
    /// Exact integral of the term: lambda(freq*c) p^{-r} if |freq| <= p^r, else 0.
    fn integral(&self, ctx: &Arc<ScalarContext>) -> Scalar {
        let r = self.ball.rexp;
        let nontrivial = self.freq.norm_exp().map_or(false, |n| n > r);
        if nontrivial {
            return Scalar::zero(ctx);
        }
        let phase = self.freq.mul(&self.ball.center);
        self.coeff
            .mul_lambda(&phase)
            .expect("lambda exponent inside ambient field")
            .scale(&crate::cyclo::p_pow_rational(ctx.params.p, -r))
    }
}

/// Finite combination of modulated ball terms.
#[derive(Clone, Debug)]
pub struct ModFunction {
    ctx: Arc<ScalarContext>,
    terms: Vec<ModTerm>,
}

impl ModFunction {
    pub fn new(ctx: &Arc<ScalarContext>, terms: Vec<ModTerm>) -> Self {
        assert!(ctx.params.concrete(), "modulated terms live in the additive picture");
        ModFunction { ctx: Arc::clone(ctx), terms }
    }

    pub fn ctx(&self) -> &Arc<ScalarContext> {
        &self.ctx
    }

    pub fn terms(&self) -> &[ModTerm] {
        &self.terms
    }

    pub fn from_bruhat(f: &BruhatFunction) -> Self {
        let ctx = Arc::clone(f.ctx());
        let p = ctx.params.p;
        let terms = f
            .terms()
            .iter()
            .map(|t| ModTerm { ball: t.ball.clone(), freq: PRat::zero(p), coeff: t.coeff.clone() })
            .collect();
        ModFunction { ctx, terms }
    }

    pub fn zero(ctx: &Arc<ScalarContext>) -> Self {
        Self::new(ctx, Vec::new())
    }

    pub fn add(&self, other: &Self) -> Self {
        let mut terms = self.terms.clone();
        terms.extend(other.terms.iter().cloned());
        Self::new(&self.ctx, terms)
    }

    pub fn scale(&self, s: &Scalar) -> Self {
        let terms = self
            .terms
            .iter()
            .map(|t| ModTerm { ball: t.ball.clone(), freq: t.freq.clone(), coeff: t.coeff.mul(s) })
            .collect();
        Self::new(&self.ctx, terms)
    }

    pub fn neg(&self) -> Self {
        self.scale(&Scalar::from_integer(&self.ctx, -1))
    }

    pub fn eval(&self, x: &PRat) -> Scalar {
        let mut acc = Scalar::zero(&self.ctx);
        for t in &self.terms {
            if t.ball.contains_point(x) {
                let v = t.coeff.mul_lambda(&t.freq.mul(x)).expect("lambda inside field");
                acc = acc.add(&v);
            }
        }
        acc
    }

    pub fn integral(&self) -> Scalar {
        let mut acc = Scalar::zero(&self.ctx);
        for t in &self.terms {
            acc = acc.add(&t.integral(&self.ctx));
        }
        acc
    }

    /// F(coeff lambda(xi x) 1_{B(c,r)})(y)
    ///   = [coeff p^{-r} lambda(xi c)] lambda(-c y) 1_{B(xi, -r)}(y).
    pub fn fourier(&self) -> Self {
        let p = self.ctx.params.p;
        let terms = self
            .terms
            .iter()
            .map(|t| {
                let phase = t.freq.mul(&t.ball.center);
                let coeff = t
                    .coeff
                    .mul_lambda(&phase)
                    .expect("lambda inside field")
                    .scale(&crate::cyclo::p_pow_rational(p, -t.ball.rexp));
                ModTerm {
                    ball: Ball::new(t.freq.clone(), -t.ball.rexp),
                    freq: t.ball.center.neg(),
                    coeff,
                }
            })
            .collect();
        Self::new(&self.ctx, terms)
    }

    /// phi(x) -> phi(-x).
    pub fn parity(&self) -> Self {
        let terms = self
            .terms
            .iter()
            .map(|t| ModTerm {
                ball: Ball::new(t.ball.center.neg(), t.ball.rexp),
                freq: t.freq.neg(),
                coeff: t.coeff.clone(),
            })
            .collect();
        Self::new(&self.ctx, terms)
    }

    pub fn fourier_inv(&self) -> Self {
        self.parity().fourier()
    }

    /// Support cutoff to |x| <= p^n (exact: balls nest or are disjoint).
    pub fn cutoff(&self, n: i32) -> Self {
        let big = Ball::new(PRat::zero(self.ctx.params.p), -n);
        let terms = self
            .terms
            .iter()
            .filter_map(|t| {
                t.ball.intersect(&big).map(|ball| ModTerm {
                    ball,
                    freq: t.freq.clone(),
                    coeff: t.coeff.clone(),
                })
            })
            .collect();
        Self::new(&self.ctx, terms)
    }

    /// <self | other>: sum over term pairs of the exact character-ball
    /// integral over the intersection.
    pub fn inner_product(&self, other: &Self) -> Scalar {
        let p = self.ctx.params.p;
        let mut acc = Scalar::zero(&self.ctx);
        for t1 in &self.terms {
            for t2 in &other.terms {
                let Some(cap) = t1.ball.intersect(&t2.ball) else { continue };
                let dfreq = t2.freq.sub(&t1.freq);
                if dfreq.norm_exp().map_or(false, |n| n > cap.rexp) {
                    continue;
                }
                let phase = dfreq.mul(&cap.center);
                let v = t1
                    .coeff
                    .conj()
                    .mul(&t2.coeff)
                    .mul_lambda(&phase)
                    .expect("lambda inside field")
                    .scale(&crate::cyclo::p_pow_rational(p, -cap.rexp));
                acc = acc.add(&v);
            }
        }
        acc
    }

    /// U(f) in units of log q; defined here for unmodulated term lists.
    pub fn smear_dilate(&self, f: &MultFunction) -> Result<Self> {
        let p = self.ctx.params.p;
        let mut plain = Vec::with_capacity(self.terms.len());
        for t in &self.terms {
            if !t.freq.is_zero() {
                return Err(Error::Infeasible(
                    "smearing of modulated terms is not needed and not supported".into(),
                ));
            }
            plain.push((t.ball.clone(), t.coeff.clone()));
        }
        let out = crate::bruhat::smear_terms(&self.ctx, &plain, f);
        Ok(Self::new(
            &self.ctx,
            out.into_iter()
                .map(|(ball, coeff)| ModTerm { ball, freq: PRat::zero(p), coeff })
                .collect(),
        ))
    }

    /// Expand into plain ball terms (splitting each ball until the
    /// modulation is constant on every piece).
    pub fn to_bruhat(&self, cell_cap: u64) -> Result<BruhatFunction> {
        let mut terms = Vec::new();
        for t in &self.terms {
            let split_level = match t.freq.norm_exp() {
                None => t.ball.rexp,
                Some(n) => n.max(t.ball.rexp),
            };
            let count = (self.ctx.params.p as u64).pow((split_level - t.ball.rexp) as u32);
            if count > cell_cap {
                return Err(Error::GridTooLarge(count, cell_cap));
            }
            for cell in t.ball.cells_at_level(split_level) {
                let phase = t.freq.mul(&cell.center);
                let coeff = t.coeff.mul_lambda(&phase).expect("lambda inside field");
                terms.push(Term { ball: cell, coeff });
            }
        }
        Ok(BruhatFunction::new(&self.ctx, terms))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::FieldParams;
    use num::rational::BigRational;

    fn ctx(p: u32, n: u64) -> Arc<ScalarContext> {
        ScalarContext::new(FieldParams { p, f: 1, delta: 0 }, n)
    }

    fn sample_function(c: &Arc<ScalarContext>, p: u32) -> BruhatFunction {
        BruhatFunction::new(
            c,
            vec![
                Term {
                    ball: Ball::new(PRat::new(p, 1.into(), 1), 1),
                    coeff: Scalar::one(c),
                },
                Term {
                    ball: Ball::new(PRat::new(p, 2.into(), 0), 2),
                    coeff: Scalar::root_of_unity(c, p as u64, 1).unwrap(),
                },
                Term {
                    ball: Ball::new(PRat::zero(p), 0),
                    coeff: Scalar::from_rational(c, BigRational::new(1.into(), 2.into())),
                },
            ],
        )
    }

    #[test]
    fn termwise_fourier_matches_grid_character_sum() {
        for p in [2u32, 3] {
            let c = ctx(p, 4 * (p as u64).pow(7));
            let f = sample_function(&c, p);
            let grid_ft = f.fourier().unwrap();
            let term_ft = ModFunction::from_bruhat(&f).fourier().to_bruhat(1 << 12).unwrap();
            assert!(grid_ft.equals(&term_ft), "p = {}", p);
        }
    }

    #[test]
    fn termwise_double_fourier_is_parity() {
        let c = ctx(3, 4 * 3u64.pow(7));
        let f = sample_function(&c, 3);
        let ff = ModFunction::from_bruhat(&f).fourier().fourier().to_bruhat(1 << 12).unwrap();
        assert!(ff.equals(&f.parity()));
    }

    #[test]
    fn inner_products_match_plain_form() {
        let c = ctx(2, 4 * 2u64.pow(9));
        let f = sample_function(&c, 2);
        let g = BruhatFunction::new(
            &c,
            vec![Term {
                ball: Ball::new(PRat::new(2, 1.into(), 0), 1),
                coeff: Scalar::sqrt_p(&c),
            }],
        );
        let mf = ModFunction::from_bruhat(&f).fourier();
        let mg = ModFunction::from_bruhat(&g).fourier();
        let lhs = mf.inner_product(&mg);
        // Plancherel route through the grid transform
        let rhs = f.fourier().unwrap().inner_product(&g.fourier().unwrap());
        assert_eq!(lhs, rhs);
        // and equals the original inner product
        assert_eq!(lhs, f.inner_product(&g));
    }

    #[test]
    fn cutoff_and_integral() {
        let c = ctx(2, 4 * 2u64.pow(8));
        let f = sample_function(&c, 2);
        let mf = ModFunction::from_bruhat(&f).fourier();
        // integral of the transform = value of f at 0
        assert_eq!(mf.integral(), f.eval(&PRat::zero(2)));
        let cut = mf.cutoff(0).to_bruhat(1 << 12).unwrap();
        let direct = mf.to_bruhat(1 << 12).unwrap().cutoff(0);
        assert!(cut.equals(&direct));
    }

    #[test]
    fn smear_matches_bruhat_smear() {
        let c = ctx(3, 4 * 3u64.pow(8));
        let f = sample_function(&c, 3);
        let mut h = MultFunction::new(&c, 1);
        h.set(1, 1, Scalar::one(&c)).unwrap();
        h.set(0, 2, Scalar::from_integer(&c, 2)).unwrap();
        h.set(-1, 1, Scalar::sqrt_p(&c)).unwrap();
        let via_mod = ModFunction::from_bruhat(&f).smear_dilate(&h).unwrap().to_bruhat(1 << 13).unwrap();
        let via_plain = f.smear_dilate(&h);
        assert!(via_mod.equals(&via_plain));
    }
}
