//! The spectral picture: per-character-component rational functions on the
//! unit circle, the Mellin transform pair, and the diagonal multipliers.

pub mod kernel;
pub mod multiplier;
pub mod rational;

pub use kernel::{kernel_diagonal_sum_direct, kernel_diagonal_sum_series, FiniteKernel, KernelSum};
pub use multiplier::{
    alpha_multiplier, apply_fourier_spectral, gamma_multiplier, h_multiplier, root_number,
    s_multiplier, t_multiplier, Multiplier, MultiplierKind,
};
pub use rational::{poisson_kernel, RationalSpectral};

use crate::bruhat::BruhatFunction;
use crate::error::{Error, Result};
use crate::localfield::{enumerate_characters, UnitCharacter};
use crate::mult::MultFunction;
use crate::padic::{Ball, PRat};
use crate::scalar::{Scalar, ScalarContext};
use std::collections::BTreeMap;
use std::sync::Arc;

/// A point (chi; z) of the spectral space; z an exact root of unity.
#[derive(Clone, Debug)]
pub struct SpectralPoint {
    pub chi: UnitCharacter,
    pub z: Scalar,
}

/// Element of the smooth spectral domain: finitely many components, each a
/// rational function on its circle.
#[derive(Clone, Debug)]
pub struct SpectralElement {
    ctx: Arc<ScalarContext>,
    comps: BTreeMap<UnitCharacter, RationalSpectral>,
}

impl SpectralElement {
    pub fn new(ctx: &Arc<ScalarContext>) -> Self {
        SpectralElement { ctx: Arc::clone(ctx), comps: BTreeMap::new() }
    }

    pub fn ctx(&self) -> &Arc<ScalarContext> {
        &self.ctx
    }

    pub fn set(&mut self, chi: UnitCharacter, r: RationalSpectral) {
        if r.is_zero() {
            self.comps.remove(&chi);
        } else {
            self.comps.insert(chi, r);
        }
    }

    pub fn component(&self, chi: &UnitCharacter) -> RationalSpectral {
        self.comps.get(chi).cloned().unwrap_or_else(|| RationalSpectral::zero(&self.ctx))
    }

    pub fn components(&self) -> impl Iterator<Item = (&UnitCharacter, &RationalSpectral)> {
        self.comps.iter()
    }

    pub fn support(&self) -> Vec<UnitCharacter> {
        self.comps.keys().cloned().collect()
    }

    pub fn is_zero(&self) -> bool {
        self.comps.values().all(|r| r.is_zero())
    }

    pub fn add(&self, other: &Self) -> Self {
        let mut out = self.clone();
        for (chi, r) in &other.comps {
            let sum = out.component(chi).add(r);
            out.set(chi.clone(), sum);
        }
        out
    }

    pub fn neg(&self) -> Self {
        let mut out = Self::new(&self.ctx);
        for (chi, r) in &self.comps {
            out.set(chi.clone(), r.neg());
        }
        out
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.neg())
    }

    pub fn scale(&self, s: &Scalar) -> Self {
        let mut out = Self::new(&self.ctx);
        for (chi, r) in &self.comps {
            out.set(chi.clone(), r.scale(s));
        }
        out
    }

    pub fn equals(&self, other: &Self) -> bool {
        self.sub(other).is_zero()
    }

    /// The largest conductor carrying a nonzero component.
    pub fn max_conductor(&self) -> u32 {
        self.comps
            .iter()
            .filter(|(_, r)| !r.is_zero())
            .map(|(chi, _)| chi.e)
            .max()
            .unwrap_or(0)
    }

    /// The inversion: l(chi; z) -> l(conj chi; 1/z).
    pub fn invert(&self) -> Self {
        let mut out = Self::new(&self.ctx);
        for (chi, r) in &self.comps {
            out.set(chi.conj(), r.subst_z_inv());
        }
        out
    }
}

/// Mellin transform: f(chi; z) = sum_m z^m (1/phi(p^e)) sum_u f(pi^{-m} u) chi(u).
pub fn mellin(f: &MultFunction) -> Result<SpectralElement> {
    let ctx = Arc::clone(f.ctx());
    let mut out = SpectralElement::new(&ctx);
    let (m_lo, m_hi) = match f.m_range() {
        None => return Ok(out),
        Some(r) => r,
    };
    for chi in enumerate_characters(ctx.params.p, f.level()) {
        let mut terms = Vec::new();
        for m in m_lo..=m_hi {
            terms.push((m, f.character_coefficient(&chi, m)?));
        }
        out.set(chi, RationalSpectral::from_laurent(&ctx, terms));
    }
    Ok(out)
}

/// Inverse Mellin transform for Laurent-polynomial elements.
pub fn mellin_inverse(l: &SpectralElement) -> Result<MultFunction> {
    let ctx = Arc::clone(l.ctx());
    let level = l.max_conductor();
    let mut f = MultFunction::new(&ctx, level);
    for (chi, r) in l.components() {
        if !r.is_laurent() {
            return Err(Error::NotLaurent);
        }
        for (m, c) in r.laurent_terms() {
            for u in crate::mult::unit_residues(ctx.params.p, level) {
                let cv = chi.eval(&ctx, u as i64)?.conj();
                f.add_to(*m, u as i64, c.mul(&cv))?;
            }
        }
    }
    Ok(f)
}

/// Spectral transform of a Schwartz function supported in a ball |x| <= p^k
/// (not necessarily vanishing at 0): the S_0 part transforms termwise and
/// the residual ball indicator contributes
/// a (z sqrt q)^{-L} / (1 - 1/(z sqrt q)) on the trivial component.
pub fn spectral_of_bruhat(phi: &BruhatFunction) -> Result<SpectralElement> {
    let ctx = Arc::clone(phi.ctx());
    let norm = phi.normalize();
    let p = ctx.params.p;
    let mut s0_terms = Vec::new();
    let mut tail: Option<(i32, Scalar)> = None;
    for t in norm.terms() {
        if t.ball.contains_zero() {
            assert!(tail.is_none(), "normalized form has one cell at the origin");
            tail = Some((t.ball.rexp, t.coeff.clone()));
        } else {
            s0_terms.push(t.clone());
        }
    }
    let s0 = BruhatFunction::new(&ctx, s0_terms);
    let mut out = mellin(&s0.to_mult()?)?;
    if let Some((l_exp, coeff)) = tail {
        // indicator of p^L Z_p: components live on the trivial character
        let a = Scalar::a(&ctx);
        let lead = a.mul(&Scalar::sqrt_q_pow(&ctx, -l_exp)).mul(&coeff);
        let tail_rs = RationalSpectral::from_parts(&ctx, [(-l_exp, lead)], 0, 1);
        let triv = UnitCharacter::trivial(p);
        let cur = out.component(&triv);
        out.set(triv, cur.add(&tail_rs));
    }
    Ok(out)
}

/// Membership in the spectral model of the incoming space: every component
/// exterior-holomorphic (coefficients at non-positive degrees only) and the
/// trivial-component continuation vanishing at z = sqrt(q).
pub fn in_d_minus_spectral(l: &SpectralElement) -> Result<bool> {
    for (chi, r) in l.components() {
        if !r.is_exterior_hardy() {
            return Ok(false);
        }
        if chi.is_trivial() {
            let v = r.eval_at_sqrt_q()?;
            if !v.is_zero() {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

/// A grid point t = pi^{-m} u as a spectral character value:
/// (chi; z)(t) = z^m chi(u).
pub fn character_value(
    ctx: &Arc<ScalarContext>,
    chi: &UnitCharacter,
    t: &PRat,
    z_power: &mut dyn FnMut(i32) -> RationalSpectral,
) -> Result<RationalSpectral> {
    let m = -t.val().ok_or(Error::NotUnit(0, 0))?;
    let cu = chi.eval_at(ctx, t)?;
    Ok(z_power(m).scale(&cu))
}

/// Indicator ball helper shared by tests.
pub fn ball_at(p: u32, num: i64, den: i32, rexp: i32) -> Ball {
    Ball::new(PRat::new(p, num.into(), den), rexp)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::FieldParams;

    fn ctx(p: u32, n: u64) -> Arc<ScalarContext> {
        ScalarContext::new(FieldParams { p, f: 1, delta: 0 }, n)
    }

    #[test]
    fn mellin_of_unit_indicator() {
        let c = ctx(3, 36);
        let f = MultFunction::indicator_units(&c);
        let l = mellin(&f).unwrap();
        let triv = UnitCharacter::trivial(3);
        assert!(l.component(&triv).equals(&RationalSpectral::one(&c)));
        assert_eq!(l.support(), vec![triv]);
    }

    #[test]
    fn mellin_of_sphere_is_z() {
        let c = ctx(3, 36);
        let f = MultFunction::indicator_sphere(&c, 1);
        let l = mellin(&f).unwrap();
        let triv = UnitCharacter::trivial(3);
        assert!(l
            .component(&triv)
            .equals(&RationalSpectral::monomial(&c, 1, Scalar::one(&c))));
    }

    #[test]
    fn mellin_of_character_lands_on_conjugate_component() {
        let c = ctx(5, 20);
        let chars = enumerate_characters(5, 1);
        let chi = chars.iter().find(|ch| ch.e == 1 && ch.exps == vec![1]).unwrap();
        let f = MultFunction::from_character(&c, chi).unwrap();
        let l = mellin(&f).unwrap();
        assert!(l.component(&chi.conj()).equals(&RationalSpectral::one(&c)));
        for other in &chars {
            if *other != chi.conj() {
                assert!(l.component(other).is_zero(), "component {:?}", other);
            }
        }
    }

    #[test]
    fn mellin_inverse_round_trip() {
        let c = ctx(2, 16);
        let mut f = MultFunction::new(&c, 2);
        f.set(0, 1, Scalar::one(&c)).unwrap();
        f.set(0, 3, Scalar::root_of_unity(&c, 8, 1).unwrap()).unwrap();
        f.set(2, 3, Scalar::sqrt_p(&c)).unwrap();
        f.set(-1, 1, Scalar::from_integer(&c, -2)).unwrap();
        let l = mellin(&f).unwrap();
        let back = mellin_inverse(&l).unwrap();
        assert!(back.equals(&f));
        // and forward again agrees
        assert!(mellin(&back).unwrap().equals(&l));
    }

    #[test]
    fn mellin_is_unitary_for_the_d_star_inner_product() {
        let c = ctx(3, 36);
        let mut f = MultFunction::new(&c, 1);
        f.set(0, 1, Scalar::one(&c)).unwrap();
        f.set(1, 2, Scalar::root_of_unity(&c, 3, 1).unwrap()).unwrap();
        let mut g = MultFunction::new(&c, 1);
        g.set(1, 2, Scalar::sqrt_p(&c)).unwrap();
        g.set(-2, 1, Scalar::one(&c)).unwrap();
        let lf = mellin(&f).unwrap();
        let lg = mellin(&g).unwrap();
        let mut spectral_inner = Scalar::zero(&c);
        let mut seen = std::collections::BTreeSet::new();
        for chi in lf.support().into_iter().chain(lg.support()) {
            if !seen.insert(chi.clone()) {
                continue;
            }
            let prod = lf.component(&chi).conj_fn().mul(&lg.component(&chi));
            spectral_inner = spectral_inner.add(&prod.circle_integral());
        }
        assert_eq!(spectral_inner, f.d_star_inner(&g));
    }

    #[test]
    fn inversion_in_spectral_picture() {
        let c = ctx(3, 36);
        let mut f = MultFunction::new(&c, 1);
        f.set(1, 2, Scalar::one(&c)).unwrap();
        f.set(0, 1, Scalar::sqrt_p(&c)).unwrap();
        // mellin(I f) = inversion of mellin(f)
        let lhs = mellin(&f.invert_t()).unwrap();
        let rhs = mellin(&f).unwrap().invert();
        assert!(lhs.equals(&rhs));
        // involution
        assert!(rhs.invert().equals(&mellin(&f).unwrap()));
    }

    #[test]
    fn mellin_intertwines_dilation_with_z_multiplication() {
        // multiplicative translation by 1/pi = multiplication by z
        let c = ctx(2, 16);
        let mut f = MultFunction::new(&c, 1);
        f.set(0, 1, Scalar::one(&c)).unwrap();
        f.set(2, 1, Scalar::sqrt_p(&c)).unwrap();
        // U(1/pi) f in the multiplicative picture: g(t) = f(t pi) i.e. m -> m+1
        let mut g = MultFunction::new(&c, 1);
        g.set(1, 1, Scalar::one(&c)).unwrap();
        g.set(3, 1, Scalar::sqrt_p(&c)).unwrap();
        let lhs = mellin(&g).unwrap();
        let triv = UnitCharacter::trivial(2);
        let rhs = mellin(&f)
            .unwrap()
            .component(&triv)
            .mul_monomial(1, &Scalar::one(&c));
        assert!(lhs.component(&triv).equals(&rhs));
    }

    #[test]
    fn spectral_transform_of_omega() {
        // omega is not in S_0; its trivial component is a (1 - 1/(z sqrt q))^{-1}
        let c = ctx(2, 16);
        let omega = BruhatFunction::omega(&c);
        let l = spectral_of_bruhat(&omega).unwrap();
        let triv = UnitCharacter::trivial(2);
        let expected = RationalSpectral::from_parts(&c, [(0, Scalar::a(&c))], 0, 1);
        assert!(l.component(&triv).equals(&expected));
        // omega is not in D_-: continuation at sqrt q is nonzero
        assert!(!in_d_minus_spectral(&l).unwrap());
    }

    #[test]
    fn d_minus_spectral_characterization_matches_additive() {
        let c = ctx(2, 64);
        // phi = 1_{2 Z_2} - (1/2) 1_{Z_2}: integral zero, support in Z_2
        let phi = BruhatFunction::indicator(&c, ball_at(2, 0, 0, 1), Scalar::one(&c)).sub(
            &BruhatFunction::indicator(
                &c,
                ball_at(2, 0, 0, 0),
                Scalar::from_rational(&c, num::BigRational::new(1.into(), 2.into())),
            ),
        );
        assert!(phi.supported_in(0));
        assert!(phi.integral().is_zero());
        let l = spectral_of_bruhat(&phi).unwrap();
        assert!(in_d_minus_spectral(&l).unwrap());
        // a function with nonzero integral fails
        let l2 = spectral_of_bruhat(&BruhatFunction::omega(&c)).unwrap();
        assert!(!in_d_minus_spectral(&l2).unwrap());
        // a function supported outside Z_p fails the Hardy condition
        let wide = BruhatFunction::indicator(&c, ball_at(2, 1, 1, 1), Scalar::one(&c));
        let l3 = spectral_of_bruhat(&wide).unwrap();
        assert!(!in_d_minus_spectral(&l3).unwrap());
    }
}
