//! Field parameters, the additive character, and the characters of the
//! unit group with their conductor exponents.
//!
//! Characters of (Z/p^e)^x are stored by exponents on fixed generators:
//! one primitive root for odd p, the pair {-1, 5} for p = 2. Each
//! character is kept at its exact conductor, so equal characters compare
//! equal and enumeration never repeats.

use crate::error::{Error, Result};
use crate::padic::PRat;
use crate::scalar::{Scalar, ScalarContext};
use num::bigint::BigInt;
use num::rational::BigRational;
use num::{Integer, One, Signed, Zero};
use std::sync::Arc;

/// phi(p^e) for e >= 0 (phi(p^0) := 1).
pub fn phi_p_pow(p: u32, e: u32) -> u64 {
    if e == 0 {
        1
    } else {
        (p as u64).pow(e - 1) * (p as u64 - 1)
    }
}

/// Smallest primitive root modulo p that stays primitive modulo p^2
/// (hence modulo every p^e), for odd p.
fn primitive_root(p: u32) -> u64 {
    let p64 = p as u64;
    let order = p64 - 1;
    let mut g = 2u64;
    loop {
        if is_primitive_mod(g, p64, order) {
            let p2 = p64 * p64;
            let ord2 = p64 * (p64 - 1);
            if is_primitive_mod(g, p2, ord2) {
                return g;
            }
            // g primitive mod p but not mod p^2: g + p works
            return g + p64;
        }
        g += 1;
    }
}

fn is_primitive_mod(g: u64, m: u64, order: u64) -> bool {
    if g % m == 0 {
        return false;
    }
    let mut d = 2u64;
    let mut n = order;
    let mut prime_factors = Vec::new();
    while d * d <= n {
        if n % d == 0 {
            prime_factors.push(d);
            while n % d == 0 {
                n /= d;
            }
        }
        d += 1;
    }
    if n > 1 {
        prime_factors.push(n);
    }
    prime_factors.iter().all(|&q| pow_mod(g, order / q, m) != 1)
}

fn pow_mod(mut b: u64, mut e: u64, m: u64) -> u64 {
    let mut acc = 1u64;
    b %= m;
    while e > 0 {
        if e & 1 == 1 {
            acc = acc * b % m;
        }
        b = b * b % m;
        e >>= 1;
    }
    acc
}

/// A character of the unit group, extended to K^x by chi(pi) = 1.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct UnitCharacter {
    pub p: u32,
    /// exact conductor exponent; 0 iff trivial
    pub e: u32,
    /// exponents on the generators of (Z/p^e)^x at level e
    pub exps: Vec<u64>,
    /// abstract characters carry only a conductor (residue degree f > 1)
    pub abstract_only: bool,
}

impl UnitCharacter {
    pub fn trivial(p: u32) -> Self {
        UnitCharacter { p, e: 0, exps: Vec::new(), abstract_only: false }
    }

    /// Placeholder character with a given conductor, usable wherever only
    /// (q, delta, e) matter (multipliers, blocks, kernels).
    pub fn abstract_with_conductor(p: u32, e: u32) -> Self {
        if e == 0 {
            return Self::trivial(p);
        }
        UnitCharacter { p, e, exps: vec![u64::MAX], abstract_only: true }
    }

    pub fn is_trivial(&self) -> bool {
        self.e == 0
    }

    /// Orders of the fixed generators of (Z/p^e)^x.
    pub fn generator_orders(p: u32, e: u32) -> Vec<u64> {
        if e == 0 {
            return Vec::new();
        }
        if p == 2 {
            if e == 1 {
                Vec::new()
            } else {
                vec![2, 1u64 << (e - 2)]
            }
        } else {
            vec![phi_p_pow(p, e)]
        }
    }

    /// The canonical character from generator exponents at level `e_level`.
    pub fn from_exponents(p: u32, e_level: u32, exps: &[u64]) -> Self {
        let orders = Self::generator_orders(p, e_level);
        assert_eq!(orders.len(), exps.len());
        let exps: Vec<u64> = exps.iter().zip(&orders).map(|(k, o)| k % o).collect();
        let mut chi = UnitCharacter { p, e: e_level, exps, abstract_only: false };
        chi.reduce_to_conductor(e_level);
        chi
    }

    /// Compute the exact conductor and re-express the data at that level.
    fn reduce_to_conductor(&mut self, e_level: u32) {
        if e_level == 0 || self.exps.iter().all(|k| *k == 0) {
            *self = Self::trivial(self.p);
            return;
        }
        // smallest e with chi trivial on 1 + p^e Z
        let mut e = e_level;
        'outer: while e > 0 {
            let cand = e - 1;
            // test on all units congruent to 1 mod p^cand (at level e_level)
            let m = (self.p as u64).pow(e_level);
            let step = (self.p as u64).pow(cand);
            let mut u = 1 + step;
            while u < m {
                if u % self.p as u64 != 0 && self.eval_exponent_at_level(u, e_level) != 0 {
                    break 'outer;
                }
                u += step;
            }
            e = cand;
        }
        if e == 0 {
            *self = Self::trivial(self.p);
            return;
        }
        if self.p == 2 && e == 1 {
            // (Z/2)^x is trivial; a character nontrivial mod 4 has conductor 2
            *self = Self::trivial(self.p);
            return;
        }
        // re-express exponents at level e
        let orders_high = Self::generator_orders(self.p, e_level);
        let orders_low = Self::generator_orders(self.p, e);
        let exps: Vec<u64> = self
            .exps
            .iter()
            .zip(orders_high.iter().zip(&orders_low))
            .map(|(k, (oh, ol))| {
                let ratio = oh / ol;
                debug_assert_eq!(k % ratio, 0, "conductor reduction must divide exponents");
                (k / ratio) % ol.max(&1)
            })
            .collect();
        self.e = e;
        self.exps = exps;
    }

    /// Value exponent: chi(u) = zeta_{value_order}^t; u is a residue at `level >= e`.
    fn eval_exponent_at_level(&self, u: u64, level: u32) -> u64 {
        let e = level;
        let m = (self.p as u64).pow(e);
        let u = u % m;
        assert!(u % self.p as u64 != 0, "not a unit");
        if self.exps.is_empty() {
            return 0;
        }
        let vo = self.value_order_at(e);
        if self.p == 2 {
            // u = (-1)^j 5^t mod 2^e
            let (j, t) = two_adic_dlog(u, e);
            let orders = Self::generator_orders(2, e);
            let mut acc = 0u64;
            acc = (acc + self.exps[0] * j % 2 * (vo / orders[0])) % vo;
            if orders[1] > 1 {
                acc = (acc + self.exps[1] % orders[1] * t % orders[1] * (vo / orders[1])) % vo;
            }
            acc
        } else {
            let g = primitive_root(self.p);
            let ord = phi_p_pow(self.p, e);
            let t = dlog(g, u, m, ord);
            self.exps[0] * t % ord * (vo / ord) % vo
        }
    }

    /// Smallest order containing all values at evaluation level e.
    fn value_order_at(&self, e: u32) -> u64 {
        if e == 0 {
            return 1;
        }
        if self.p == 2 {
            let orders = Self::generator_orders(2, e);
            num::integer::lcm(orders[0], orders[1].max(1))
        } else {
            phi_p_pow(self.p, e)
        }
    }

    /// chi(u) as an exact root of unity; u is any integer coprime to p.
    pub fn eval(&self, ctx: &Arc<ScalarContext>, u: i64) -> Result<Scalar> {
        assert!(!self.abstract_only, "abstract character has no values");
        if self.e == 0 {
            return Ok(Scalar::one(ctx));
        }
        let m = (self.p as u64).pow(self.e);
        let ur = BigInt::from(u).mod_floor(&BigInt::from(m));
        let ur: u64 = (&ur).try_into().unwrap();
        if ur % self.p as u64 == 0 {
            return Err(Error::NotUnit(u, self.e));
        }
        let vo = self.value_order_at(self.e);
        let t = self.eval_exponent_at_level(ur, self.e);
        Scalar::root_of_unity(ctx, vo, t as i64)
    }

    /// chi evaluated at a nonzero point of Q_p (chi(pi) = 1: only the unit
    /// part matters).
    pub fn eval_at(&self, ctx: &Arc<ScalarContext>, t: &PRat) -> Result<Scalar> {
        if self.e == 0 {
            return Ok(Scalar::one(ctx));
        }
        let u = t.unit_residue(self.e);
        let u64v: i64 = (&u).try_into().map_err(|_| Error::Infeasible("residue too large".into()))?;
        self.eval(ctx, u64v)
    }

    pub fn conj(&self) -> Self {
        if self.abstract_only || self.e == 0 {
            return self.clone();
        }
        let orders = Self::generator_orders(self.p, self.e);
        let exps = self.exps.iter().zip(&orders).map(|(k, o)| (o - k % o) % o).collect();
        UnitCharacter { p: self.p, e: self.e, exps, abstract_only: false }
    }

    /// Stable identifier used in CSV output and reports.
    pub fn id(&self) -> String {
        if self.e == 0 {
            return "triv".to_string();
        }
        if self.abstract_only {
            return format!("e{}*", self.e);
        }
        let exps: Vec<String> = self.exps.iter().map(|k| k.to_string()).collect();
        format!("e{}g{}", self.e, exps.join("_"))
    }
}

/// Discrete log base g modulo m (order known, brute force over tiny groups).
fn dlog(g: u64, u: u64, m: u64, order: u64) -> u64 {
    let mut acc = 1u64;
    for t in 0..order {
        if acc == u {
            return t;
        }
        acc = acc * g % m;
    }
    panic!("dlog: {} not in <{}> mod {}", u, g, m);
}

/// Write u = (-1)^j 5^t mod 2^e (e >= 2); returns (j, t).
fn two_adic_dlog(u: u64, e: u32) -> (u64, u64) {
    let m = 1u64 << e;
    let u = u % m;
    let half_order = 1u64.max(1 << (e.saturating_sub(2)));
    let mut acc = 1u64;
    for t in 0..half_order {
        if acc == u {
            return (0, t);
        }
        if (m - acc) % m == u {
            return (1, t);
        }
        acc = acc * 5 % m;
    }
    panic!("two_adic_dlog: {} mod 2^{}", u, e);
}

/// Exactly one representative per character of (Z/p^max_e)^x, each at its
/// exact conductor, sorted.
pub fn enumerate_characters(p: u32, max_e: u32) -> Vec<UnitCharacter> {
    let mut out = Vec::new();
    let orders = UnitCharacter::generator_orders(p, max_e);
    if orders.is_empty() {
        return vec![UnitCharacter::trivial(p)];
    }
    let mut idx = vec![0u64; orders.len()];
    loop {
        out.push(UnitCharacter::from_exponents(p, max_e, &idx));
        // odometer
        let mut i = 0;
        loop {
            if i == orders.len() {
                out.sort();
                out.dedup();
                debug_assert_eq!(out.len() as u64, orders.iter().product::<u64>());
                return out;
            }
            idx[i] += 1;
            if idx[i] < orders[i].max(1) {
                break;
            }
            idx[i] = 0;
            i += 1;
        }
    }
}

/// lambda(x) = exp(2 pi i x) on Q_p; requires concrete mode and a p-power
/// denominator.
pub fn additive_character(ctx: &Arc<ScalarContext>, x: &BigRational) -> Result<Scalar> {
    if !ctx.params.concrete() {
        return Err(Error::NotConcrete);
    }
    let pr = prat_from_rational(ctx.params.p, x)?;
    Scalar::lambda(ctx, &pr)
}

/// Convert a rational with p-power denominator into a PRat.
pub fn prat_from_rational(p: u32, x: &BigRational) -> Result<PRat> {
    if x.is_zero() {
        return Ok(PRat::zero(p));
    }
    let mut den = x.denom().abs();
    let mut k = 0i32;
    let pb = BigInt::from(p);
    while den > BigInt::one() {
        let (q, r) = den.div_rem(&pb);
        if !r.is_zero() {
            return Err(Error::BadDenominator);
        }
        den = q;
        k += 1;
    }
    let num = if x.denom().is_negative() { -x.numer() } else { x.numer().clone() };
    Ok(PRat::new(p, num, k))
}
