//! Finitely supported functions on the multiplicative grid of K^x:
//! valuation index m (|t| = q^m) times unit cosets modulo 1 + p^e Z_p.

use crate::error::{Error, Result};
use crate::localfield::{phi_p_pow, UnitCharacter};
use crate::padic::{mod_inverse, p_pow, PRat};
use crate::scalar::{Scalar, ScalarContext};
use num::bigint::BigInt;
use num::Integer;
use std::collections::BTreeMap;
use std::sync::Arc;

/// Unit residues modulo p^e (the single residue 1 at level 0).
pub fn unit_residues(p: u32, e: u32) -> Vec<u64> {
    if e == 0 {
        return vec![1];
    }
    let m = (p as u64).pow(e);
    (1..m).filter(|u| u % p as u64 != 0).collect()
}

/// f(t) for t = pi^{-m} u, stored per (m, unit coset at `level`).
#[derive(Clone, Debug)]
pub struct MultFunction {
    ctx: Arc<ScalarContext>,
    level: u32,
    entries: BTreeMap<(i32, u64), Scalar>,
}

impl MultFunction {
    pub fn new(ctx: &Arc<ScalarContext>, level: u32) -> Self {
        MultFunction { ctx: Arc::clone(ctx), level, entries: BTreeMap::new() }
    }

    pub fn ctx(&self) -> &Arc<ScalarContext> {
        &self.ctx
    }

    pub fn level(&self) -> u32 {
        self.level
    }

    pub fn p(&self) -> u32 {
        self.ctx.params.p
    }

    pub fn entries(&self) -> impl Iterator<Item = (&(i32, u64), &Scalar)> {
        self.entries.iter()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.values().all(|v| v.is_zero())
    }

    fn canonical_residue(&self, u: i64) -> Result<u64> {
        if self.level == 0 {
            return Ok(1);
        }
        let m = (self.p() as u64).pow(self.level);
        let r = BigInt::from(u).mod_floor(&BigInt::from(m));
        let r: u64 = (&r).try_into().unwrap();
        if r % self.p() as u64 == 0 {
            return Err(Error::NotUnit(u, self.level));
        }
        Ok(r)
    }

    pub fn set(&mut self, m: i32, u: i64, value: Scalar) -> Result<()> {
        let r = self.canonical_residue(u)?;
        if value.is_zero() {
            self.entries.remove(&(m, r));
        } else {
            self.entries.insert((m, r), value);
        }
        Ok(())
    }

    pub fn add_to(&mut self, m: i32, u: i64, value: Scalar) -> Result<()> {
        let r = self.canonical_residue(u)?;
        let cur = self.entries.remove(&(m, r)).unwrap_or_else(|| Scalar::zero(&self.ctx));
        let next = cur.add(&value);
        if !next.is_zero() {
            self.entries.insert((m, r), next);
        }
        Ok(())
    }

    pub fn value(&self, m: i32, u: i64) -> Scalar {
        match self.canonical_residue(u) {
            Ok(r) => self
                .entries
                .get(&(m, r))
                .cloned()
                .unwrap_or_else(|| Scalar::zero(&self.ctx)),
            Err(_) => Scalar::zero(&self.ctx),
        }
    }

    /// f(1): value at valuation 0, unit coset of 1.
    pub fn value_at_one(&self) -> Scalar {
        self.value(0, 1)
    }

    /// Indicator of the unit group.
    pub fn indicator_units(ctx: &Arc<ScalarContext>) -> Self {
        let mut f = Self::new(ctx, 0);
        f.set(0, 1, Scalar::one(ctx)).unwrap();
        f
    }

    /// Indicator of the sphere |t| = q^m.
    pub fn indicator_sphere(ctx: &Arc<ScalarContext>, m: i32) -> Self {
        let mut f = Self::new(ctx, 0);
        f.set(m, 1, Scalar::one(ctx)).unwrap();
        f
    }

    /// chi(u) on the unit group (zero elsewhere).
    pub fn from_character(ctx: &Arc<ScalarContext>, chi: &UnitCharacter) -> Result<Self> {
        let mut f = Self::new(ctx, chi.e);
        for u in unit_residues(ctx.params.p, chi.e) {
            f.set(0, u as i64, chi.eval(ctx, u as i64)?)?;
        }
        Ok(f)
    }

    /// Same function expressed on a finer coset grid.
    pub fn refine(&self, new_level: u32) -> Self {
        assert!(new_level >= self.level);
        if new_level == self.level {
            return self.clone();
        }
        let mut out = Self::new(&self.ctx, new_level);
        for ((m, u), v) in &self.entries {
            for u_ref in self.refine_residue(*u, new_level) {
                out.set(*m, u_ref as i64, v.clone()).unwrap();
            }
        }
        out
    }

    /// Representatives at `level >= self.level` of the coset of `u`.
    pub fn refine_residue(&self, u: u64, level: u32) -> Vec<u64> {
        refine_residue(self.p(), u, self.level, level)
    }

    /// Canonical minimal-level form (merges cosets with equal values).
    pub fn reduced(&self) -> Self {
        let mut cur = self.clone();
        'outer: while cur.level > 0 {
            let coarse = cur.level - 1;
            let modulus = p_pow(cur.p(), coarse);
            let mut grouped: BTreeMap<(i32, u64), Vec<Scalar>> = BTreeMap::new();
            for ((m, u), v) in &cur.entries {
                let key = if coarse == 0 {
                    1u64
                } else {
                    (&BigInt::from(*u).mod_floor(&modulus)).try_into().unwrap()
                };
                grouped.entry((*m, key)).or_default().push(v.clone());
            }
            let per_coset = (phi_p_pow(cur.p(), cur.level) / phi_p_pow(cur.p(), coarse)) as usize;
            let mut out = Self::new(&cur.ctx, coarse);
            for ((m, key), vals) in grouped {
                if vals.len() != per_coset || vals.iter().any(|v| v != &vals[0]) {
                    break 'outer;
                }
                out.set(m, key as i64, vals[0].clone()).unwrap();
            }
            cur = out;
        }
        cur
    }

    pub fn is_unit_invariant(&self) -> bool {
        self.reduced().level == 0
    }

    pub fn add(&self, other: &Self) -> Self {
        let level = self.level.max(other.level);
        let mut out = self.refine(level);
        for ((m, u), v) in other.refine(level).entries {
            out.add_to(m, u as i64, v).unwrap();
        }
        out
    }

    pub fn neg(&self) -> Self {
        let mut out = Self::new(&self.ctx, self.level);
        for ((m, u), v) in &self.entries {
            out.set(*m, *u as i64, v.neg()).unwrap();
        }
        out
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.neg())
    }

    pub fn scale(&self, s: &Scalar) -> Self {
        let mut out = Self::new(&self.ctx, self.level);
        for ((m, u), v) in &self.entries {
            out.set(*m, *u as i64, v.mul(s)).unwrap();
        }
        out
    }

    pub fn equals(&self, other: &Self) -> bool {
        self.sub(other).is_empty()
    }

    /// The inversion in the multiplicative picture: f(t) -> f(1/t).
    pub fn invert_t(&self) -> Self {
        let mut out = Self::new(&self.ctx, self.level);
        for ((m, u), v) in &self.entries {
            let u_inv = if self.level == 0 {
                1u64
            } else {
                let modulus = p_pow(self.p(), self.level);
                (&mod_inverse(&BigInt::from(*u), &modulus)).try_into().unwrap()
            };
            out.set(-m, u_inv as i64, v.clone()).unwrap();
        }
        out
    }

    /// Restriction to |t| >= 1 (m >= 0) or |t| < 1 (m < 0).
    pub fn split_by_norm(&self) -> (Self, Self) {
        let mut big = Self::new(&self.ctx, self.level);
        let mut small = Self::new(&self.ctx, self.level);
        for ((m, u), v) in &self.entries {
            if *m >= 0 {
                big.set(*m, *u as i64, v.clone()).unwrap();
            } else {
                small.set(*m, *u as i64, v.clone()).unwrap();
            }
        }
        (big, small)
    }

    pub fn m_range(&self) -> Option<(i32, i32)> {
        let mut r: Option<(i32, i32)> = None;
        for ((m, _), v) in &self.entries {
            if v.is_zero() {
                continue;
            }
            r = Some(match r {
                None => (*m, *m),
                Some((lo, hi)) => (lo.min(*m), hi.max(*m)),
            });
        }
        r
    }

    /// Average of f over the unit cosets at valuation m: the coefficient
    /// (1/phi(p^e)) sum_u f(pi^{-m} u) chi(u).
    pub fn character_coefficient(&self, chi: &UnitCharacter, m: i32) -> Result<Scalar> {
        let level = self.level.max(chi.e);
        let f = if level > self.level { self.refine(level) } else { self.clone() };
        let mut acc = Scalar::zero(&self.ctx);
        let weight =
            num::BigRational::new(BigInt::from(1), BigInt::from(phi_p_pow(f.p(), level)));
        for ((mm, u), v) in &f.entries {
            if *mm != m {
                continue;
            }
            let cv = chi.eval(&self.ctx, *u as i64)?;
            acc = acc.add(&v.mul(&cv));
        }
        Ok(acc.scale(&weight))
    }

    /// d^*-inner product <self | other>.
    pub fn d_star_inner(&self, other: &Self) -> Scalar {
        let level = self.level.max(other.level);
        let a = self.refine(level);
        let b = other.refine(level);
        let weight = num::BigRational::new(
            BigInt::from(1),
            BigInt::from(phi_p_pow(a.p(), level)),
        );
        let mut acc = Scalar::zero(&self.ctx);
        for ((m, u), v) in &a.entries {
            let w = b.value(*m, *u as i64);
            acc = acc.add(&v.conj().mul(&w));
        }
        acc.scale(&weight)
    }

    pub fn norm_sq(&self) -> Scalar {
        self.d_star_inner(self)
    }

    /// The point t = pi^{-m} u as an element of Q_p (concrete sessions).
    pub fn grid_point(&self, m: i32, u: u64) -> PRat {
        PRat::unit_times_p_pow(self.p(), u as i64, m)
    }
}

pub(crate) fn refine_residue(p: u32, u: u64, from_level: u32, to_level: u32) -> Vec<u64> {
    assert!(to_level >= from_level);
    if to_level == from_level {
        return vec![u];
    }
    let step = (p as u64).pow(from_level);
    let m = (p as u64).pow(to_level);
    let mut out = Vec::new();
    if from_level == 0 {
        // whole unit group
        for v in 1..m {
            if v % p as u64 != 0 {
                out.push(v);
            }
        }
        return out;
    }
    let mut x = u % step;
    while x < m {
        if x % p as u64 != 0 {
            out.push(x);
        }
        x += step;
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::FieldParams;

    fn ctx(p: u32, n: u64) -> Arc<ScalarContext> {
        ScalarContext::new(FieldParams { p, f: 1, delta: 0 }, n)
    }

    #[test]
    fn refine_and_reduce() {
        let c = ctx(3, 36);
        let f = MultFunction::indicator_units(&c);
        let g = f.refine(2);
        assert_eq!(g.entries().count(), 6);
        assert_eq!(g.reduced().level(), 0);
        assert!(f.equals(&g));
    }

    #[test]
    fn inversion_is_involutive() {
        let c = ctx(5, 20);
        let mut f = MultFunction::new(&c, 1);
        f.set(2, 3, Scalar::from_integer(&c, 7)).unwrap();
        f.set(-1, 2, Scalar::sqrt_p(&c)).unwrap();
        assert!(f.invert_t().invert_t().equals(&f));
        assert_eq!(f.invert_t().value(-2, 2), Scalar::from_integer(&c, 7)); // 3^{-1} = 2 mod 5
    }

    #[test]
    fn character_coefficients_pick_components() {
        let c = ctx(3, 36);
        let chars = crate::localfield::enumerate_characters(3, 1);
        let quad = chars.iter().find(|ch| ch.e == 1).unwrap();
        let triv = chars.iter().find(|ch| ch.e == 0).unwrap();
        let f = MultFunction::from_character(&c, quad).unwrap();
        // sum chi(u) chi'(u) / phi picks the conjugate component
        let c_quad = f.character_coefficient(quad, 0).unwrap();
        assert_eq!(c_quad, Scalar::one(&c)); // quadratic is self-conjugate
        let c_triv = f.character_coefficient(triv, 0).unwrap();
        assert!(c_triv.is_zero());
    }

    #[test]
    fn value_at_one_accessor() {
        let c = ctx(2, 8);
        let mut f = MultFunction::new(&c, 2);
        f.set(0, 1, Scalar::from_integer(&c, 5)).unwrap();
        f.set(0, 3, Scalar::from_integer(&c, 9)).unwrap();
        assert_eq!(f.value_at_one(), Scalar::from_integer(&c, 5));
        // canonical residue folds 5 to 1 at level 2
        assert_eq!(f.value(0, 5), Scalar::from_integer(&c, 5));
        assert_eq!(f.value(0, 7), Scalar::from_integer(&c, 9));
    }
}
