//! The diagonal spectral multipliers: the gamma factor of the Fourier
//! transform composed with inversion, the conductor operator H, the time
//! delay density T, the scattering matrix S, and the incoming-space
//! normalizer alpha. All are per-component rational functions built from
//! (q, delta, e(chi)); the ramified gamma factor also needs the root
//! number, which is computed (never assumed) from the functional equation
//! on an explicit test function.

use crate::bruhat::BruhatFunction;
use crate::error::{Error, Result};
use crate::localfield::UnitCharacter;
use crate::mult::unit_residues;
use crate::padic::{Ball, PRat};
use crate::scalar::{Scalar, ScalarContext};
use crate::spectral::rational::{poisson_kernel, RationalSpectral};
use crate::spectral::{mellin, SpectralElement};
use std::collections::BTreeMap;
use std::sync::Arc;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum MultiplierKind {
    Gamma,
    H,
    T,
    S,
    Alpha,
}

/// A diagonal multiplier on one component.
#[derive(Clone, Debug)]
pub struct Multiplier {
    pub kind: MultiplierKind,
    pub chi: UnitCharacter,
    pub value: RationalSpectral,
    /// true when the values are in units of log q
    pub logq_units: bool,
}

/// Gamma factor: z^delta (1 - z/sqrt q)/(1 - 1/(z sqrt q)) on the trivial
/// component, w(chi) z^{e+delta} on ramified components.
pub fn gamma_multiplier(
    ctx: &Arc<ScalarContext>,
    chi: &UnitCharacter,
    root_numbers: &BTreeMap<UnitCharacter, Scalar>,
) -> Result<Multiplier> {
    let delta = ctx.params.delta as i32;
    let value = if chi.is_trivial() {
        let isq = Scalar::sqrt_q_pow(ctx, -1);
        RationalSpectral::from_parts(
            ctx,
            [(delta, Scalar::one(ctx)), (delta + 1, isq.neg())],
            0,
            1,
        )
    } else {
        let w = root_numbers.get(chi).ok_or(Error::RootNumberUnavailable)?;
        RationalSpectral::monomial(ctx, chi.e as i32 + delta, w.clone())
    };
    Ok(Multiplier { kind: MultiplierKind::Gamma, chi: chi.clone(), value, logq_units: false })
}

/// Conductor-operator multiplier, in units of log q:
/// (delta + 1) - (1 - 1/q)/|1 - z/sqrt q|^2 on the trivial component,
/// the constant e(chi) + delta on ramified components.
pub fn h_multiplier(ctx: &Arc<ScalarContext>, chi: &UnitCharacter) -> Multiplier {
    let delta = ctx.params.delta as i64;
    let value = if chi.is_trivial() {
        RationalSpectral::constant(Scalar::from_integer(ctx, delta + 1))
            .sub(&poisson_kernel(ctx))
    } else {
        RationalSpectral::constant(Scalar::from_integer(ctx, chi.e as i64 + delta))
    };
    Multiplier { kind: MultiplierKind::H, chi: chi.clone(), value, logq_units: true }
}

/// Time-delay density, in units of log q: delta + Poisson kernel on the
/// trivial component, delta + e(chi) - 1 on ramified components.
pub fn t_multiplier(ctx: &Arc<ScalarContext>, chi: &UnitCharacter) -> Multiplier {
    let delta = ctx.params.delta as i64;
    let value = if chi.is_trivial() {
        RationalSpectral::constant(Scalar::from_integer(ctx, delta)).add(&poisson_kernel(ctx))
    } else {
        RationalSpectral::constant(Scalar::from_integer(ctx, delta + chi.e as i64 - 1))
    };
    Multiplier { kind: MultiplierKind::T, chi: chi.clone(), value, logq_units: true }
}

/// Scattering matrix: z^{-delta} (sqrt q - z)/(sqrt q z - 1) =
/// z^{-delta-1}(1 - z/sqrt q)/(1 - 1/(z sqrt q)) on the trivial component,
/// z^{1-e-delta} on ramified components.
pub fn s_multiplier(ctx: &Arc<ScalarContext>, chi: &UnitCharacter) -> Multiplier {
    let delta = ctx.params.delta as i32;
    let value = if chi.is_trivial() {
        let isq = Scalar::sqrt_q_pow(ctx, -1);
        RationalSpectral::from_parts(
            ctx,
            [(-delta - 1, Scalar::one(ctx)), (-delta, isq.neg())],
            0,
            1,
        )
    } else {
        RationalSpectral::monomial(ctx, 1 - chi.e as i32 - delta, Scalar::one(ctx))
    };
    Multiplier { kind: MultiplierKind::S, chi: chi.clone(), value, logq_units: false }
}

/// Normalizer of the incoming space on the trivial component:
/// (sqrt q z - 1)/(sqrt q - z) = z (1 - 1/(z sqrt q))/(1 - z/sqrt q);
/// the identity on ramified components.
pub fn alpha_multiplier(ctx: &Arc<ScalarContext>, chi: &UnitCharacter) -> Multiplier {
    let value = if chi.is_trivial() {
        let isq = Scalar::sqrt_q_pow(ctx, -1);
        RationalSpectral::from_parts(ctx, [(1, Scalar::one(ctx)), (0, isq.neg())], 1, 0)
    } else {
        RationalSpectral::one(ctx)
    };
    Multiplier { kind: MultiplierKind::Alpha, chi: chi.clone(), value, logq_units: false }
}

/// The root number w(chi) for a ramified character, extracted from the
/// functional equation: with phi(x) = chi(x) on the units, the transform
/// side concentrates on the component of chi and equals
/// w(chi) z^{e+delta} times the reflected untransformed side.
pub fn root_number(ctx: &Arc<ScalarContext>, chi: &UnitCharacter) -> Result<Scalar> {
    if !ctx.params.concrete() {
        return Err(Error::RootNumberUnavailable);
    }
    if chi.is_trivial() || chi.abstract_only {
        return Err(Error::RootNumberUnavailable);
    }
    let p = ctx.params.p;
    let e = chi.e;
    // phi(x) = chi(x) on units
    let mut terms = Vec::new();
    for u in unit_residues(p, e) {
        terms.push(crate::bruhat::Term {
            ball: Ball::new(PRat::from_integer(p, u as i64), e as i32),
            coeff: chi.eval(ctx, u as i64)?,
        });
    }
    let phi = BruhatFunction::new(ctx, terms);
    let untransformed = mellin(&phi.to_mult()?)?;
    // sanity: lives on the conjugate component, constant a
    let expect_a = RationalSpectral::constant(Scalar::a(ctx));
    if !untransformed.component(&chi.conj()).equals(&expect_a) {
        return Err(Error::NotMonomial);
    }
    let transformed = mellin(&phi.fourier()?.to_mult()?)?;
    for (other, r) in transformed.components() {
        if other != chi && !r.is_zero() {
            return Err(Error::NotMonomial);
        }
    }
    let comp = transformed.component(chi);
    if !comp.is_laurent() {
        return Err(Error::NotMonomial);
    }
    let mut terms: Vec<(i32, Scalar)> =
        comp.laurent_terms().map(|(m, c)| (*m, c.clone())).collect();
    if terms.len() != 1 {
        return Err(Error::NotMonomial);
    }
    let (deg, coeff) = terms.pop().unwrap();
    if deg != e as i32 {
        return Err(Error::NotMonomial);
    }
    let w = coeff.mul(&Scalar::a(ctx).try_invert()?);
    if !w.mul(&w.conj()).is_one() {
        return Err(Error::NotMonomial);
    }
    Ok(w)
}

/// Root numbers for every ramified character up to a conductor bound.
pub fn root_number_table(
    ctx: &Arc<ScalarContext>,
    max_e: u32,
) -> Result<BTreeMap<UnitCharacter, Scalar>> {
    let mut out = BTreeMap::new();
    for chi in crate::localfield::enumerate_characters(ctx.params.p, max_e) {
        if !chi.is_trivial() {
            out.insert(chi.clone(), root_number(ctx, &chi)?);
        }
    }
    Ok(out)
}

/// Theorem-level action of the Fourier transform in the spectral picture:
/// component chi of the output is Gamma(chi; z) times the input component
/// at conj(chi) with z -> 1/z.
pub fn apply_fourier_spectral(
    l: &SpectralElement,
    root_numbers: &BTreeMap<UnitCharacter, Scalar>,
) -> Result<SpectralElement> {
    let ctx = Arc::clone(l.ctx());
    let mut out = SpectralElement::new(&ctx);
    for (chi, _) in l.components() {
        let target = chi.conj();
        let gamma = gamma_multiplier(&ctx, &target, root_numbers)?;
        let reflected = l.component(chi).subst_z_inv();
        out.set(target, gamma.value.mul(&reflected));
    }
    Ok(out)
}
