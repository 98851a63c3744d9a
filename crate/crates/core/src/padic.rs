//! p-adic rationals (elements of Z[1/p]) and balls of Q_p.
//!
//! A `PRat` is a rational whose denominator is a power of p; these are
//! exactly the numbers that occur as ball centers, dilation factors and
//! additive-character arguments. A `Ball` is a coset `c + p^r Z_p`,
//! canonicalized so that equal cosets compare equal.

use num::bigint::BigInt;
use num::integer::Integer;
use num::{One, Zero};
use std::cmp::Ordering;
use std::fmt;

pub fn p_pow(p: u32, k: u32) -> BigInt {
    BigInt::from(p).pow(k)
}

/// Inverse of `a` modulo `m` (m > 1, gcd(a, m) = 1).
pub fn mod_inverse(a: &BigInt, m: &BigInt) -> BigInt {
    let ext = a.extended_gcd(m);
    debug_assert!(ext.gcd.is_one());
    ext.x.mod_floor(m)
}

/// Element of Z[1/p]: `num / p^den_exp`, normalized so p does not divide
/// `num` (and `den_exp = 0` when `num = 0`). `den_exp` may be negative,
/// in which case the value is `num * p^{-den_exp}` with p | num absorbed.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct PRat {
    pub p: u32,
    num: BigInt,
    den_exp: i32,
}

impl fmt::Debug for PRat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self)
    }
}

impl fmt::Display for PRat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.den_exp <= 0 {
            write!(f, "{}", &self.num * p_pow(self.p, (-self.den_exp) as u32))
        } else {
            write!(f, "{}/{}", self.num, p_pow(self.p, self.den_exp as u32))
        }
    }
}

impl PRat {
    pub fn new(p: u32, num: BigInt, den_exp: i32) -> Self {
        let mut r = PRat { p, num, den_exp };
        r.normalize();
        r
    }

    pub fn zero(p: u32) -> Self {
        PRat { p, num: BigInt::zero(), den_exp: 0 }
    }

    pub fn one(p: u32) -> Self {
        PRat { p, num: BigInt::one(), den_exp: 0 }
    }

    pub fn from_integer(p: u32, n: i64) -> Self {
        Self::new(p, BigInt::from(n), 0)
    }

    /// `u * p^{-m}`, i.e. the point with valuation `-m` and unit part `u`.
    pub fn unit_times_p_pow(p: u32, u: i64, minus_val: i32) -> Self {
        Self::new(p, BigInt::from(u), minus_val)
    }

    fn normalize(&mut self) {
        if self.num.is_zero() {
            self.den_exp = 0;
            return;
        }
        let p = BigInt::from(self.p);
        loop {
            let (q, r) = self.num.div_rem(&p);
            if r.is_zero() {
                self.num = q;
                self.den_exp -= 1;
            } else {
                break;
            }
        }
    }

    pub fn is_zero(&self) -> bool {
        self.num.is_zero()
    }

    /// p-adic valuation; `None` for zero.
    pub fn val(&self) -> Option<i32> {
        if self.is_zero() { None } else { Some(-self.den_exp) }
    }

    /// Exponent of the norm: |x| = p^{norm_exp}; `None` (−∞) for zero.
    pub fn norm_exp(&self) -> Option<i32> {
        self.val().map(|v| -v)
    }

    pub fn numerator(&self) -> &BigInt {
        &self.num
    }

    pub fn den_exp(&self) -> i32 {
        self.den_exp
    }

    pub fn neg(&self) -> Self {
        PRat { p: self.p, num: -&self.num, den_exp: self.den_exp }
    }

    pub fn add(&self, other: &Self) -> Self {
        assert_eq!(self.p, other.p);
        let k = self.den_exp.max(other.den_exp);
        let a = &self.num * p_pow(self.p, (k - self.den_exp) as u32);
        let b = &other.num * p_pow(self.p, (k - other.den_exp) as u32);
        Self::new(self.p, a + b, k)
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.neg())
    }

    pub fn mul(&self, other: &Self) -> Self {
        assert_eq!(self.p, other.p);
        Self::new(self.p, &self.num * &other.num, self.den_exp + other.den_exp)
    }

    pub fn mul_p_pow(&self, k: i32) -> Self {
        if self.is_zero() {
            return self.clone();
        }
        PRat { p: self.p, num: self.num.clone(), den_exp: self.den_exp - k }
    }

    /// A point `y` with |y - 1/self| <= p^{-prec} (self nonzero).
    pub fn inverse_approx(&self, prec: i32) -> Self {
        assert!(!self.is_zero());
        let k = self.den_exp; // 1/x = p^k / num
        let j = (prec + k).max(1) as u32;
        let m = p_pow(self.p, j);
        let inv = mod_inverse(&self.num.mod_floor(&m), &m);
        Self::new(self.p, inv, -k)
    }

    /// Canonical representative of `self + p^rexp Z_p` (numerator reduced).
    pub fn reduce_mod(&self, rexp: i32) -> Self {
        match self.val() {
            None => PRat::zero(self.p),
            Some(v) if v >= rexp => PRat::zero(self.p),
            _ => {
                let modulus = p_pow(self.p, (rexp + self.den_exp) as u32);
                Self::new(self.p, self.num.mod_floor(&modulus), self.den_exp)
            }
        }
    }

    /// Unit part as a residue modulo p^e (self nonzero): self = p^v * u.
    pub fn unit_residue(&self, e: u32) -> BigInt {
        assert!(!self.is_zero());
        self.num.mod_floor(&p_pow(self.p, e))
    }

    /// Additive-character data: value is `zeta_{p^k}^m` with k = den_exp.
    /// Returns (k, m mod p^k) with k = 0 meaning the value 1.
    pub fn lambda_exponent(&self) -> (u32, BigInt) {
        if self.den_exp <= 0 {
            return (0, BigInt::zero());
        }
        let k = self.den_exp as u32;
        (k, self.num.mod_floor(&p_pow(self.p, k)))
    }

    /// Total order (by value) used only for canonical sorting of terms.
    pub fn sort_key(&self) -> (i32, BigInt) {
        (self.den_exp, self.num.clone())
    }
}

/// How two ultrametric balls relate.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BallRelation {
    Disjoint,
    Equal,
    /// The first strictly contains the second.
    Contains,
    /// The first is strictly inside the second.
    Inside,
}

/// The coset `center + p^rexp Z_p`; radius is `p^{-rexp}`.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Ball {
    pub center: PRat,
    pub rexp: i32,
}

impl fmt::Debug for Ball {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "B({} + p^{})", self.center, self.rexp)
    }
}

impl Ball {
    pub fn new(center: PRat, rexp: i32) -> Self {
        Ball { center: center.reduce_mod(rexp), rexp }
    }

    pub fn p(&self) -> u32 {
        self.center.p
    }

    pub fn contains_point(&self, x: &PRat) -> bool {
        match x.sub(&self.center).val() {
            None => true,
            Some(v) => v >= self.rexp,
        }
    }

    pub fn contains_zero(&self) -> bool {
        self.center.is_zero()
    }

    /// Largest norm exponent over the ball: sup |x| = p^{this}.
    pub fn sup_norm_exp(&self) -> i32 {
        match self.center.norm_exp() {
            None => -self.rexp,
            Some(n) => n.max(-self.rexp),
        }
    }

    /// Constant norm exponent when the ball misses zero.
    pub fn norm_exp(&self) -> Option<i32> {
        let n = self.center.norm_exp()?;
        if n > -self.rexp { Some(n) } else { None }
    }

    pub fn relation(&self, other: &Ball) -> BallRelation {
        match self.rexp.cmp(&other.rexp) {
            Ordering::Equal => {
                if self.center == other.center {
                    BallRelation::Equal
                } else {
                    BallRelation::Disjoint
                }
            }
            Ordering::Less => {
                // self is the larger ball
                if self.contains_point(&other.center) {
                    BallRelation::Contains
                } else {
                    BallRelation::Disjoint
                }
            }
            Ordering::Greater => {
                if other.contains_point(&self.center) {
                    BallRelation::Inside
                } else {
                    BallRelation::Disjoint
                }
            }
        }
    }

    /// Intersection of two balls (the smaller one, or None).
    pub fn intersect(&self, other: &Ball) -> Option<Ball> {
        match self.relation(other) {
            BallRelation::Disjoint => None,
            BallRelation::Equal | BallRelation::Inside => Some(self.clone()),
            BallRelation::Contains => Some(other.clone()),
        }
    }

    /// The p immediate sub-cosets at level rexp + 1.
    pub fn children(&self) -> Vec<Ball> {
        let p = self.p();
        (0..p)
            .map(|t| {
                let shift = PRat::from_integer(p, t as i64).mul_p_pow(self.rexp);
                Ball::new(self.center.add(&shift), self.rexp + 1)
            })
            .collect()
    }

    /// All sub-cosets at level `level >= rexp`.
    pub fn cells_at_level(&self, level: i32) -> Vec<Ball> {
        assert!(level >= self.rexp);
        let p = self.p();
        let count = (p as u64).pow((level - self.rexp) as u32);
        (0..count)
            .map(|t| {
                let shift = PRat::new(p, BigInt::from(t), 0).mul_p_pow(self.rexp);
                Ball::new(self.center.add(&shift), level)
            })
            .collect()
    }

    /// Image under x -> t*x.
    pub fn dilate(&self, t: &PRat) -> Ball {
        let v = t.val().expect("dilation by zero");
        Ball::new(self.center.mul(t), self.rexp + v)
    }

    /// Image under x -> 1/x, defined when the ball misses zero.
    /// A ball of constant norm p^m maps to a ball of radius p^{-(rexp+2m)}.
    pub fn invert(&self) -> Option<Ball> {
        let m = self.norm_exp()?;
        let new_rexp = self.rexp + 2 * m;
        Some(Ball::new(self.center.inverse_approx(new_rexp), new_rexp))
    }

    pub fn sort_key(&self) -> (i32, (i32, BigInt)) {
        (self.rexp, self.center.sort_key())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn pr(p: u32, num: i64, den_exp: i32) -> PRat {
        PRat::new(p, BigInt::from(num), den_exp)
    }

    #[test]
    fn normalization_and_valuation() {
        let x = pr(3, 18, 1); // 18/3 = 6 = 2*3
        assert_eq!(x.val(), Some(1));
        assert_eq!(x.norm_exp(), Some(-1));
        assert_eq!(pr(2, 3, 2).val(), Some(-2));
        assert!(pr(5, 0, 0).is_zero());
    }

    #[test]
    fn arithmetic() {
        let a = pr(2, 3, 2); // 3/4
        let b = pr(2, 1, 2); // 1/4
        assert_eq!(a.add(&b), pr(2, 1, 0));
        assert_eq!(a.sub(&a), PRat::zero(2));
        assert_eq!(a.mul(&b), pr(2, 3, 4));
    }

    #[test]
    fn inverse_approx_accuracy() {
        let c = pr(3, 5, 1); // 5/3, |c| = 3
        let approx = c.inverse_approx(4);
        // |approx - 3/5| <= 3^{-4}: check 5*approx ≡ 3 mod 3^4 scaled
        let diff = approx.mul(&c).sub(&PRat::one(3));
        assert!(diff.val().map_or(true, |v| v >= 4 - 1)); // |c| adjusts one level
    }

    #[test]
    fn ball_relations() {
        let b1 = Ball::new(pr(2, 0, 0), 0); // Z_2
        let b2 = Ball::new(pr(2, 1, 0), 1); // 1 + 2Z_2
        let b3 = Ball::new(pr(2, 1, 1), 0); // 1/2 + Z_2
        assert_eq!(b1.relation(&b2), BallRelation::Contains);
        assert_eq!(b2.relation(&b1), BallRelation::Inside);
        assert_eq!(b1.relation(&b3), BallRelation::Disjoint);
        assert_eq!(b1.relation(&Ball::new(pr(2, 4, 0), 0)), BallRelation::Equal);
    }

    #[test]
    fn ball_inversion_is_involutive() {
        let b = Ball::new(pr(3, 2, 1), 1); // 2/3 + 3Z_3, norm 3
        let inv = b.invert().unwrap();
        assert_eq!(inv.rexp, 1 + 2 * 1);
        let back = inv.invert().unwrap();
        assert_eq!(back, b);
    }

    #[test]
    fn cells_partition() {
        let b = Ball::new(PRat::zero(3), 0);
        let cells = b.cells_at_level(2);
        assert_eq!(cells.len(), 9);
        for c in &cells {
            assert_eq!(b.relation(c), BallRelation::Contains);
        }
    }
}
