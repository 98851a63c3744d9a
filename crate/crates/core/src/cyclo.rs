//! Exact arithmetic in Q(zeta_N), the field of N-th roots of unity.
//!
//! Elements are sparse polynomials in X = zeta_N, kept in the canonical
//! reduced form of degree < phi(N). Reduction uses the inflation
//! Phi_N(X) = Phi_rad(X^{N/rad}) where rad is the squarefree kernel of N,
//! so a monomial reduces in O(phi(rad)) regardless of how large N is.

use crate::padic::p_pow;
use num::bigint::BigInt;
use num::rational::BigRational;
use num::{Complex, One, Zero};
use std::collections::BTreeMap;
use std::fmt;

pub type Complex64 = Complex<f64>;

fn factorize(mut n: u64) -> Vec<(u64, u32)> {
    let mut out = Vec::new();
    let mut d = 2u64;
    while d * d <= n {
        if n % d == 0 {
            let mut e = 0;
            while n % d == 0 {
                n /= d;
                e += 1;
            }
            out.push((d, e));
        }
        d += 1;
    }
    if n > 1 {
        out.push((n, 1));
    }
    out
}

pub fn euler_phi(n: u64) -> u64 {
    factorize(n).iter().fold(n, |acc, (p, _)| acc / p * (p - 1))
}

fn divisors(n: u64) -> Vec<u64> {
    let mut out = vec![1u64];
    for (p, e) in factorize(n) {
        let mut next = Vec::new();
        for d in &out {
            let mut pk = 1u64;
            for _ in 0..=e {
                next.push(d * pk);
                pk *= p;
            }
        }
        out = next;
    }
    out.sort_unstable();
    out
}

/// Dense integer-polynomial division, exact (monic divisor).
fn poly_div_exact(num: &[BigInt], den: &[BigInt]) -> Vec<BigInt> {
    let mut rem: Vec<BigInt> = num.to_vec();
    let dn = den.len() - 1;
    assert!(den[dn].is_one());
    let qn = rem.len() - 1 - dn;
    let mut quot = vec![BigInt::zero(); qn + 1];
    for i in (0..=qn).rev() {
        let c = rem[i + dn].clone();
        quot[i] = c.clone();
        if !c.is_zero() {
            for (j, dj) in den.iter().enumerate() {
                let t = dj * &c;
                rem[i + j] -= t;
            }
        }
    }
    assert!(rem.iter().all(|c| c.is_zero()), "inexact polynomial division");
    quot
}

/// Coefficients of the n-th cyclotomic polynomial (n squarefree and small).
fn cyclotomic_poly(n: u64) -> Vec<BigInt> {
    let mut phi_cache: BTreeMap<u64, Vec<BigInt>> = BTreeMap::new();
    for d in divisors(n) {
        // x^d - 1 divided by the product of Phi_e over proper divisors e of d
        let mut num = vec![BigInt::zero(); d as usize + 1];
        num[0] = -BigInt::one();
        num[d as usize] = BigInt::one();
        let mut quot = num;
        for e in divisors(d) {
            if e == d {
                continue;
            }
            quot = poly_div_exact(&quot, &phi_cache[&e]);
        }
        phi_cache.insert(d, quot);
    }
    phi_cache.remove(&n).unwrap()
}

/// Shared data for arithmetic in Q(zeta_N).
#[derive(Debug)]
pub struct CycloContext {
    pub n: u64,
    pub phi_n: u64,
    pub rad: u64,
    infl: u64,
    phi_rad: usize,
    /// reductions of Y^j mod Phi_rad(Y), for j in [phi_rad, rad); dense, length phi_rad
    y_table: Vec<Vec<BigRational>>,
}

impl CycloContext {
    pub fn new(n: u64) -> Self {
        assert!(n >= 1);
        let rad: u64 = factorize(n).iter().map(|(p, _)| p).product();
        let infl = n / rad;
        let phi_rad = euler_phi(rad) as usize;
        let g = cyclotomic_poly(rad);
        assert_eq!(g.len(), phi_rad + 1);
        // y_table[j - phi_rad] = Y^j mod g
        let mut y_table: Vec<Vec<BigRational>> = Vec::new();
        let mut cur: Vec<BigRational> = g[..phi_rad]
            .iter()
            .map(|c| -BigRational::from_integer(c.clone()))
            .collect(); // Y^{phi_rad} = -(g - Y^{phi_rad})
        y_table.push(cur.clone());
        for _ in (phi_rad + 1)..(rad as usize) {
            // multiply by Y
            let lead = cur[phi_rad - 1].clone();
            let mut next = vec![BigRational::zero(); phi_rad];
            for i in (1..phi_rad).rev() {
                next[i] = cur[i - 1].clone();
            }
            if !lead.is_zero() {
                for (i, c) in y_table[0].iter().enumerate() {
                    next[i] += &lead * c;
                }
            }
            cur = next;
            y_table.push(cur.clone());
        }
        CycloContext { n, phi_n: euler_phi(n), rad, infl, phi_rad, y_table }
    }

    /// Canonical form of the monomial X^k (any k), as (exponent, coeff) pairs.
    fn reduce_monomial(&self, k: u64) -> Vec<(u64, BigRational)> {
        let k = k % self.n;
        let i = k % self.infl;
        let j = k / self.infl;
        if (j as usize) < self.phi_rad {
            return vec![(k, BigRational::one())];
        }
        let row = &self.y_table[j as usize - self.phi_rad];
        row.iter()
            .enumerate()
            .filter(|(_, c)| !c.is_zero())
            .map(|(t, c)| (i + (t as u64) * self.infl, c.clone()))
            .collect()
    }
}

/// Element of Q(zeta_N) in canonical reduced form (sparse).
#[derive(Clone, PartialEq, Eq)]
pub struct CycloNumber {
    terms: BTreeMap<u64, BigRational>,
}

impl fmt::Debug for CycloNumber {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let parts: Vec<String> = self
            .terms
            .iter()
            .map(|(k, c)| if *k == 0 { format!("{}", c) } else { format!("{}*z^{}", c, k) })
            .collect();
        write!(f, "{}", parts.join(" + "))
    }
}

impl CycloNumber {
    pub fn zero() -> Self {
        CycloNumber { terms: BTreeMap::new() }
    }

    pub fn one() -> Self {
        Self::from_rational(BigRational::one())
    }

    pub fn from_rational(r: BigRational) -> Self {
        let mut terms = BTreeMap::new();
        if !r.is_zero() {
            terms.insert(0, r);
        }
        CycloNumber { terms }
    }

    pub fn monomial(ctx: &CycloContext, k: u64, coeff: BigRational) -> Self {
        let mut out = CycloNumber::zero();
        if coeff.is_zero() {
            return out;
        }
        for (e, c) in ctx.reduce_monomial(k) {
            out.accumulate(e, c * &coeff);
        }
        out
    }

    fn accumulate(&mut self, e: u64, c: BigRational) {
        if c.is_zero() {
            return;
        }
        use std::collections::btree_map::Entry;
        match self.terms.entry(e) {
            Entry::Vacant(v) => {
                v.insert(c);
            }
            Entry::Occupied(mut o) => {
                *o.get_mut() += c;
                if o.get().is_zero() {
                    o.remove();
                }
            }
        }
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn nnz(&self) -> usize {
        self.terms.len()
    }

    pub fn to_rational(&self) -> Option<BigRational> {
        if self.terms.is_empty() {
            return Some(BigRational::zero());
        }
        if self.terms.len() == 1 {
            if let Some(c) = self.terms.get(&0) {
                return Some(c.clone());
            }
        }
        None
    }

    /// Single term c * X^k, if the element is a monomial.
    pub fn to_monomial(&self) -> Option<(u64, BigRational)> {
        if self.terms.len() == 1 {
            let (k, c) = self.terms.iter().next().unwrap();
            Some((*k, c.clone()))
        } else {
            None
        }
    }

    pub fn add(&self, other: &Self) -> Self {
        let mut out = self.clone();
        for (e, c) in &other.terms {
            out.accumulate(*e, c.clone());
        }
        out
    }

    pub fn neg(&self) -> Self {
        CycloNumber { terms: self.terms.iter().map(|(e, c)| (*e, -c)).collect() }
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.neg())
    }

    pub fn scale(&self, r: &BigRational) -> Self {
        if r.is_zero() {
            return Self::zero();
        }
        CycloNumber { terms: self.terms.iter().map(|(e, c)| (*e, c * r)).collect() }
    }

    pub fn mul(&self, other: &Self, ctx: &CycloContext) -> Self {
        let mut out = CycloNumber::zero();
        for (e1, c1) in &self.terms {
            for (e2, c2) in &other.terms {
                let mut k = e1 + e2;
                if k >= ctx.n {
                    k -= ctx.n;
                }
                let c = c1 * c2;
                for (e, r) in ctx.reduce_monomial(k) {
                    out.accumulate(e, r * &c);
                }
            }
        }
        out
    }

    /// Multiply by the monomial X^k in place of a full product.
    pub fn mul_monomial(&self, ctx: &CycloContext, k: u64, coeff: &BigRational) -> Self {
        let mut out = CycloNumber::zero();
        if coeff.is_zero() {
            return out;
        }
        for (e1, c1) in &self.terms {
            let kk = (e1 + k) % ctx.n;
            let c = c1 * coeff;
            for (e, r) in ctx.reduce_monomial(kk) {
                out.accumulate(e, r * &c);
            }
        }
        out
    }

    /// Galois twist zeta -> zeta^m (m coprime to N); m = N-1 is conjugation.
    pub fn galois(&self, ctx: &CycloContext, m: u64) -> Self {
        let mut out = CycloNumber::zero();
        for (e1, c1) in &self.terms {
            let k = (e1 % ctx.n) * (m % ctx.n) % ctx.n;
            for (e, r) in ctx.reduce_monomial(k) {
                out.accumulate(e, r * c1);
            }
        }
        out
    }

    pub fn conj(&self, ctx: &CycloContext) -> Self {
        self.galois(ctx, ctx.n - 1)
    }

    /// Inverse when the element is a monomial c*X^k.
    pub fn invert_monomial(&self, ctx: &CycloContext) -> Option<Self> {
        let (k, c) = self.to_monomial()?;
        if c.is_zero() {
            return None;
        }
        Some(Self::monomial(ctx, (ctx.n - k % ctx.n) % ctx.n, c.recip()))
    }

    pub fn embed(&self, ctx: &CycloContext) -> Complex64 {
        let mut acc = Complex64::new(0.0, 0.0);
        for (e, c) in &self.terms {
            let theta = 2.0 * std::f64::consts::PI * (*e as f64) / (ctx.n as f64);
            let cf = rational_to_f64(c);
            acc += Complex64::new(theta.cos(), theta.sin()) * cf;
        }
        acc
    }

    pub fn iter_terms(&self) -> impl Iterator<Item = (&u64, &BigRational)> {
        self.terms.iter()
    }

    pub fn from_terms(terms: impl IntoIterator<Item = (u64, BigRational)>, ctx: &CycloContext) -> Self {
        let mut out = CycloNumber::zero();
        for (k, c) in terms {
            for (e, r) in ctx.reduce_monomial(k % ctx.n) {
                out.accumulate(e, r * &c);
            }
        }
        out
    }
}

pub fn rational_to_f64(r: &BigRational) -> f64 {
    use num::ToPrimitive;
    r.to_f64().unwrap_or(f64::NAN)
}

/// Rational p^k for k of either sign.
pub fn p_pow_rational(p: u32, k: i32) -> BigRational {
    if k >= 0 {
        BigRational::from_integer(p_pow(p, k as u32))
    } else {
        BigRational::new(BigInt::one(), p_pow(p, (-k) as u32))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cyclotomic_polys() {
        let p12: Vec<i64> = cyclotomic_poly(12).iter().map(|c| c.try_into().unwrap()).collect();
        assert_eq!(p12, vec![1, 0, -1, 0, 1]);
        let p6: Vec<i64> = cyclotomic_poly(6).iter().map(|c| c.try_into().unwrap()).collect();
        assert_eq!(p6, vec![1, -1, 1]);
        assert_eq!(cyclotomic_poly(2), vec![BigInt::one(), BigInt::one()]);
    }

    #[test]
    fn zeta3_sum_is_minus_one() {
        let ctx = CycloContext::new(12);
        // zeta_3 = X^4, zeta_3^2 = X^8 over N = 12
        let z = CycloNumber::monomial(&ctx, 4, BigRational::one());
        let z2 = CycloNumber::monomial(&ctx, 8, BigRational::one());
        let sum = z.add(&z2);
        assert_eq!(sum.to_rational(), Some(-BigRational::one()));
    }

    #[test]
    fn mul_matches_embedding() {
        let ctx = CycloContext::new(36);
        let a = CycloNumber::from_terms(
            [(1u64, BigRational::from_integer(2.into())), (7, BigRational::new(1.into(), 3.into()))],
            &ctx,
        );
        let b = CycloNumber::from_terms(
            [(5u64, BigRational::one()), (0, BigRational::from_integer((-1).into()))],
            &ctx,
        );
        let prod = a.mul(&b, &ctx);
        let lhs = prod.embed(&ctx);
        let rhs = a.embed(&ctx) * b.embed(&ctx);
        assert!((lhs - rhs).norm() < 1e-10);
    }

    #[test]
    fn conjugation_is_involutive_hom() {
        let ctx = CycloContext::new(20);
        let a = CycloNumber::from_terms([(3u64, BigRational::one()), (9, BigRational::new(2.into(), 5.into()))], &ctx);
        let b = CycloNumber::monomial(&ctx, 7, BigRational::from_integer(3.into()));
        assert_eq!(a.conj(&ctx).conj(&ctx), a);
        assert_eq!(a.mul(&b, &ctx).conj(&ctx), a.conj(&ctx).mul(&b.conj(&ctx), &ctx));
    }

    #[test]
    fn power_of_root_cycles() {
        let ctx = CycloContext::new(2048);
        let z = CycloNumber::monomial(&ctx, 1, BigRational::one());
        let mut acc = CycloNumber::one();
        for _ in 0..2048 {
            acc = acc.mul_monomial(&ctx, 1, &BigRational::one());
        }
        assert_eq!(acc, CycloNumber::one());
        assert!(!z.is_zero());
    }

    #[test]
    fn monomial_inverse() {
        let ctx = CycloContext::new(15);
        let m = CycloNumber::monomial(&ctx, 4, BigRational::new(3.into(), 7.into()));
        let inv = m.invert_monomial(&ctx).unwrap();
        assert_eq!(m.mul(&inv, &ctx), CycloNumber::one());
    }
}
