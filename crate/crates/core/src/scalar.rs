//! The coefficient tower for all exact computations: Q(zeta_N) extended by
//! the formal square roots s (s^2 = p) and a (a^2 = q^{-delta/2}(1 - 1/q)).
//!
//! Elements are four cyclotomic coordinates on the basis {1, s, a, s*a}.
//! The representation is canonical, so equality-to-zero is decidable even
//! though the tower may contain zero divisors; division is only performed
//! through `try_invert`, which succeeds for monomial-like elements and for
//! elements whose tower norm is an invertible cyclotomic monomial.

use crate::cyclo::{p_pow_rational, rational_to_f64, CycloContext, CycloNumber, Complex64};
use crate::error::{Error, Result};
use crate::padic::PRat;
use num::rational::BigRational;
use num::{One, Zero};
use std::fmt;
use std::sync::Arc;

/// Field data fixed for a whole session.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct FieldParams {
    pub p: u32,
    pub f: u32,
    pub delta: u32,
}

impl FieldParams {
    pub fn q(&self) -> u64 {
        (self.p as u64).pow(self.f)
    }

    /// Concrete mode: the additive picture on Q_p is available.
    pub fn concrete(&self) -> bool {
        self.f == 1 && self.delta == 0
    }

    pub fn ln_q(&self) -> f64 {
        (self.q() as f64).ln()
    }
}

#[derive(Debug)]
pub struct ScalarContext {
    pub params: FieldParams,
    pub cyclo: CycloContext,
    /// a^2 = rho0 + rho1 * s, both rational.
    rho0: BigRational,
    rho1: BigRational,
}

impl ScalarContext {
    pub fn new(params: FieldParams, n: u64) -> Arc<Self> {
        let p = params.p;
        let fd = (params.f * params.delta) as i32;
        let one_minus_inv_q =
            BigRational::one() - BigRational::new(1.into(), num::BigInt::from(params.q()));
        let (rho0, rho1) = if fd % 2 == 0 {
            (&one_minus_inv_q * p_pow_rational(p, -fd / 2), BigRational::zero())
        } else {
            (BigRational::zero(), &one_minus_inv_q * p_pow_rational(p, -(fd + 1) / 2))
        };
        Arc::new(ScalarContext { params, cyclo: CycloContext::new(n), rho0, rho1 })
    }

    pub fn n(&self) -> u64 {
        self.cyclo.n
    }

    fn same(&self, other: &Self) -> bool {
        std::ptr::eq(self, other)
            || (self.params == other.params && self.cyclo.n == other.cyclo.n)
    }
}

/// Exact coefficient: c0 + c1*s + c2*a + c3*s*a with ci in Q(zeta_N).
#[derive(Clone)]
pub struct Scalar {
    ctx: Arc<ScalarContext>,
    c: [CycloNumber; 4],
}

impl PartialEq for Scalar {
    fn eq(&self, other: &Self) -> bool {
        self.ctx.same(&other.ctx) && self.c == other.c
    }
}

impl Eq for Scalar {}

impl fmt::Debug for Scalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let names = ["", "*s", "*a", "*s*a"];
        let mut parts = Vec::new();
        for (i, ci) in self.c.iter().enumerate() {
            if !ci.is_zero() {
                parts.push(format!("({:?}){}", ci, names[i]));
            }
        }
        if parts.is_empty() {
            write!(f, "0")
        } else {
            write!(f, "{}", parts.join(" + "))
        }
    }
}

impl Scalar {
    pub fn ctx(&self) -> &Arc<ScalarContext> {
        &self.ctx
    }

    pub fn params(&self) -> FieldParams {
        self.ctx.params
    }

    fn from_coords(ctx: &Arc<ScalarContext>, c: [CycloNumber; 4]) -> Self {
        Scalar { ctx: Arc::clone(ctx), c }
    }

    pub fn zero(ctx: &Arc<ScalarContext>) -> Self {
        Self::from_coords(ctx, [CycloNumber::zero(), CycloNumber::zero(), CycloNumber::zero(), CycloNumber::zero()])
    }

    pub fn one(ctx: &Arc<ScalarContext>) -> Self {
        Self::from_rational(ctx, BigRational::one())
    }

    pub fn from_rational(ctx: &Arc<ScalarContext>, r: BigRational) -> Self {
        let mut s = Self::zero(ctx);
        s.c[0] = CycloNumber::from_rational(r);
        s
    }

    pub fn from_integer(ctx: &Arc<ScalarContext>, n: i64) -> Self {
        Self::from_rational(ctx, BigRational::from_integer(n.into()))
    }

    /// p^k as a rational scalar.
    pub fn p_pow(ctx: &Arc<ScalarContext>, k: i32) -> Self {
        Self::from_rational(ctx, p_pow_rational(ctx.params.p, k))
    }

    /// The formal square root of p.
    pub fn sqrt_p(ctx: &Arc<ScalarContext>) -> Self {
        let mut s = Self::zero(ctx);
        s.c[1] = CycloNumber::one();
        s
    }

    /// The constant a with a^2 = q^{-delta/2}(1 - 1/q).
    pub fn a(ctx: &Arc<ScalarContext>) -> Self {
        let mut s = Self::zero(ctx);
        s.c[2] = CycloNumber::one();
        s
    }

    /// q^{k/2} for integer k of either sign (q = p^f).
    pub fn sqrt_q_pow(ctx: &Arc<ScalarContext>, k: i32) -> Self {
        let m = ctx.params.f as i32 * k; // p^{m/2}
        if m % 2 == 0 {
            Self::p_pow(ctx, m / 2)
        } else {
            let mut s = Self::zero(ctx);
            // p^{(m-1)/2} * s   (for negative odd m this is still exact: s^{-1} = s/p)
            s.c[1] = CycloNumber::from_rational(p_pow_rational(ctx.params.p, (m - 1) / 2));
            s
        }
    }

    /// zeta_order^exponent; the order must divide the ambient conductor N.
    pub fn root_of_unity(ctx: &Arc<ScalarContext>, order: u64, exponent: i64) -> Result<Self> {
        let n = ctx.n();
        if order == 0 || n % order != 0 {
            return Err(Error::OrderOutsideField(order, n));
        }
        let step = n / order;
        let e = exponent.rem_euclid(order as i64) as u64;
        let mut s = Self::zero(ctx);
        s.c[0] = CycloNumber::monomial(&ctx.cyclo, e * step, BigRational::one());
        Ok(s)
    }

    /// The additive-character value lambda(x) = zeta_{p^k}^m for x = m / p^k.
    pub fn lambda(ctx: &Arc<ScalarContext>, x: &PRat) -> Result<Self> {
        let (k, m) = x.lambda_exponent();
        if k == 0 {
            return Ok(Self::one(ctx));
        }
        let order = (ctx.params.p as u64).pow(k);
        let m64: i64 = m.try_into().map_err(|_| Error::Infeasible("lambda exponent too large".into()))?;
        Self::root_of_unity(ctx, order, m64)
    }

    pub fn is_zero(&self) -> bool {
        self.c.iter().all(|ci| ci.is_zero())
    }

    pub fn is_one(&self) -> bool {
        self.c[0].to_rational().map_or(false, |r| r.is_one())
            && self.c[1].is_zero()
            && self.c[2].is_zero()
            && self.c[3].is_zero()
    }

    pub fn to_rational(&self) -> Option<BigRational> {
        if self.c[1].is_zero() && self.c[2].is_zero() && self.c[3].is_zero() {
            self.c[0].to_rational()
        } else {
            None
        }
    }

    fn check(&self, other: &Self) -> Result<()> {
        if self.ctx.same(&other.ctx) {
            Ok(())
        } else {
            Err(Error::ContextMismatch)
        }
    }

    pub fn add(&self, other: &Self) -> Self {
        self.check(other).expect("scalar context mismatch");
        let c = [
            self.c[0].add(&other.c[0]),
            self.c[1].add(&other.c[1]),
            self.c[2].add(&other.c[2]),
            self.c[3].add(&other.c[3]),
        ];
        Self::from_coords(&self.ctx, c)
    }

    pub fn neg(&self) -> Self {
        let c = [self.c[0].neg(), self.c[1].neg(), self.c[2].neg(), self.c[3].neg()];
        Self::from_coords(&self.ctx, c)
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.neg())
    }

    pub fn scale(&self, r: &BigRational) -> Self {
        let c = [self.c[0].scale(r), self.c[1].scale(r), self.c[2].scale(r), self.c[3].scale(r)];
        Self::from_coords(&self.ctx, c)
    }

    pub fn mul(&self, other: &Self) -> Self {
        self.check(other).expect("scalar context mismatch");
        let cy = &self.ctx.cyclo;
        let p_rat = BigRational::from_integer(self.ctx.params.p.into());
        let rho0 = &self.ctx.rho0;
        let rho1 = &self.ctx.rho1;
        let x = &self.c;
        let y = &other.c;
        let m = |i: usize, j: usize| -> CycloNumber {
            if x[i].is_zero() || y[j].is_zero() {
                CycloNumber::zero()
            } else {
                x[i].mul(&y[j], cy)
            }
        };
        // basis products: s^2 = p; a^2 = rho0 + rho1 s; (sa)^2 = p rho0 + p rho1 s;
        // s*(sa) = p a; a*(sa) = p rho1 + rho0 s
        let z0 = m(0, 0)
            .add(&m(1, 1).scale(&p_rat))
            .add(&m(2, 2).scale(rho0))
            .add(&m(3, 3).scale(&(&p_rat * rho0)))
            .add(&m(2, 3).add(&m(3, 2)).scale(&(&p_rat * rho1)));
        let z1 = m(0, 1)
            .add(&m(1, 0))
            .add(&m(2, 2).scale(rho1))
            .add(&m(3, 3).scale(&(&p_rat * rho1)))
            .add(&m(2, 3).add(&m(3, 2)).scale(rho0));
        let z2 = m(0, 2).add(&m(2, 0)).add(&m(1, 3).add(&m(3, 1)).scale(&p_rat));
        let z3 = m(0, 3).add(&m(3, 0)).add(&m(1, 2)).add(&m(2, 1));
        Self::from_coords(&self.ctx, [z0, z1, z2, z3])
    }

    /// Multiply by zeta_order^exponent (fast path: monomial product).
    pub fn mul_root(&self, order: u64, exponent: i64) -> Result<Self> {
        let n = self.ctx.n();
        if order == 0 || n % order != 0 {
            return Err(Error::OrderOutsideField(order, n));
        }
        let step = n / order;
        let e = exponent.rem_euclid(order as i64) as u64 * step % n;
        let one = BigRational::one();
        let cy = &self.ctx.cyclo;
        let c = [
            self.c[0].mul_monomial(cy, e, &one),
            self.c[1].mul_monomial(cy, e, &one),
            self.c[2].mul_monomial(cy, e, &one),
            self.c[3].mul_monomial(cy, e, &one),
        ];
        Ok(Self::from_coords(&self.ctx, c))
    }

    /// Multiply by lambda(x) for x = m / p^k.
    pub fn mul_lambda(&self, x: &PRat) -> Result<Self> {
        let (k, m) = x.lambda_exponent();
        if k == 0 {
            return Ok(self.clone());
        }
        let order = (self.ctx.params.p as u64).pow(k);
        let m64: i64 =
            m.try_into().map_err(|_| Error::Infeasible("lambda exponent too large".into()))?;
        self.mul_root(order, m64)
    }

    /// Complex conjugation: fixes rationals, s and a, inverts roots of unity.
    pub fn conj(&self) -> Self {
        let cy = &self.ctx.cyclo;
        let c = [self.c[0].conj(cy), self.c[1].conj(cy), self.c[2].conj(cy), self.c[3].conj(cy)];
        Self::from_coords(&self.ctx, c)
    }

    pub fn pow(&self, e: u32) -> Self {
        let mut acc = Self::one(&self.ctx);
        for _ in 0..e {
            acc = acc.mul(self);
        }
        acc
    }

    /// Exact inverse where the representation permits one.
    pub fn try_invert(&self) -> Result<Self> {
        if self.is_zero() {
            return Err(Error::NotInvertible);
        }
        let cy = &self.ctx.cyclo;
        // Step 1: clear a: x * (u - v a) = u^2 - v^2 rho =: w0 + w1 s
        let mut flip_a = self.clone();
        flip_a.c[2] = flip_a.c[2].neg();
        flip_a.c[3] = flip_a.c[3].neg();
        let w = self.mul(&flip_a);
        debug_assert!(w.c[2].is_zero() && w.c[3].is_zero());
        // Step 2: clear s: w * (w0 - w1 s) = w0^2 - p w1^2 =: d (cyclotomic)
        let mut flip_s = w.clone();
        flip_s.c[1] = flip_s.c[1].neg();
        flip_s.c[3] = flip_s.c[3].neg();
        let d_scalar = w.mul(&flip_s);
        debug_assert!(d_scalar.c[1].is_zero() && d_scalar.c[2].is_zero() && d_scalar.c[3].is_zero());
        let d = &d_scalar.c[0];
        let d_inv = d.invert_monomial(cy).ok_or(Error::NotInvertible)?;
        // x^{-1} = (u - v a)(w0 - w1 s) / d
        let num = flip_a.mul(&flip_s);
        let inv = Self::from_coords(
            &self.ctx,
            [
                num.c[0].mul(&d_inv, cy),
                num.c[1].mul(&d_inv, cy),
                num.c[2].mul(&d_inv, cy),
                num.c[3].mul(&d_inv, cy),
            ],
        );
        // the tower may have zero divisors; confirm we found a genuine inverse
        if self.mul(&inv).is_one() {
            Ok(inv)
        } else {
            Err(Error::NotInvertible)
        }
    }

    pub fn embed(&self) -> Complex64 {
        let p = self.ctx.params.p as f64;
        let sqrt_p = p.sqrt();
        let a_val = (rational_to_f64(&self.ctx.rho0) + rational_to_f64(&self.ctx.rho1) * sqrt_p).sqrt();
        let cy = &self.ctx.cyclo;
        self.c[0].embed(cy)
            + self.c[1].embed(cy) * sqrt_p
            + self.c[2].embed(cy) * a_val
            + self.c[3].embed(cy) * (sqrt_p * a_val)
    }

    pub fn coords(&self) -> &[CycloNumber; 4] {
        &self.c
    }

    pub fn from_raw_coords(ctx: &Arc<ScalarContext>, c: [CycloNumber; 4]) -> Self {
        Self::from_coords(ctx, c)
    }
}

/// A quantity carrying an implicit factor of log q.
#[derive(Clone, PartialEq, Eq)]
pub struct LogQ(pub Scalar);

impl fmt::Debug for LogQ {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({:?}) * log q", self.0)
    }
}

impl LogQ {
    pub fn zero(ctx: &Arc<ScalarContext>) -> Self {
        LogQ(Scalar::zero(ctx))
    }

    pub fn add(&self, other: &Self) -> Self {
        LogQ(self.0.add(&other.0))
    }

    pub fn sub(&self, other: &Self) -> Self {
        LogQ(self.0.sub(&other.0))
    }

    pub fn neg(&self) -> Self {
        LogQ(self.0.neg())
    }

    pub fn scale(&self, s: &Scalar) -> Self {
        LogQ(self.0.mul(s))
    }

    /// Numerical value including the log q factor.
    pub fn embed(&self) -> Complex64 {
        self.0.embed() * self.0.params().ln_q()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ctx(p: u32, f: u32, delta: u32, n: u64) -> Arc<ScalarContext> {
        ScalarContext::new(FieldParams { p, f, delta }, n)
    }

    #[test]
    fn defining_relations() {
        let c = ctx(2, 1, 0, 8);
        let s = Scalar::sqrt_p(&c);
        assert_eq!(s.mul(&s), Scalar::from_integer(&c, 2));
        // a^2 = 1 - 1/2 = 1/2 at p=2, f=1, delta=0
        let a = Scalar::a(&c);
        assert_eq!(a.mul(&a), Scalar::from_rational(&c, BigRational::new(1.into(), 2.into())));
    }

    #[test]
    fn rho_with_odd_f_delta() {
        // p=3, f=1, delta=1: a^2 = 3^{-1/2} (1 - 1/3) = (2/3) * s/3 = 2s/9
        let c = ctx(3, 1, 1, 12);
        let a = Scalar::a(&c);
        let expected = Scalar::sqrt_p(&c).scale(&BigRational::new(2.into(), 9.into()));
        assert_eq!(a.mul(&a), expected);
        let e = a.embed() * a.embed();
        assert!((e.re - 2.0 * 3f64.sqrt() / 9.0).abs() < 1e-12);
    }

    #[test]
    fn sqrt_q_powers() {
        let c = ctx(3, 1, 0, 12);
        let r = Scalar::sqrt_q_pow(&c, -3); // 3^{-3/2} = 3^{-2} * s
        assert_eq!(r.mul(&r), Scalar::from_rational(&c, BigRational::new(1.into(), 27.into())));
        let c2 = ctx(2, 2, 0, 8); // q = 4
        assert_eq!(Scalar::sqrt_q_pow(&c2, 3), Scalar::from_integer(&c2, 8));
    }

    #[test]
    fn invert_cases() {
        let c = ctx(2, 1, 0, 8);
        assert_eq!(
            Scalar::from_integer(&c, 2).try_invert().unwrap(),
            Scalar::from_rational(&c, BigRational::new(1.into(), 2.into()))
        );
        assert!(Scalar::zero(&c).try_invert().is_err());
        let s = Scalar::sqrt_p(&c);
        let inv = s.try_invert().unwrap();
        assert_eq!(s.mul(&inv), Scalar::one(&c));
        // rational-coordinate element: 3/2 + s has rational norm
        let x = Scalar::from_rational(&c, BigRational::new(3.into(), 2.into())).add(&s);
        let xi = x.try_invert().unwrap();
        assert_eq!(x.mul(&xi), Scalar::one(&c));
    }

    #[test]
    fn conj_fixes_radicals_inverts_roots() {
        let c = ctx(5, 1, 0, 20);
        let z5 = Scalar::root_of_unity(&c, 5, 1).unwrap();
        assert_eq!(z5.conj(), Scalar::root_of_unity(&c, 5, 4).unwrap());
        assert_eq!(Scalar::sqrt_p(&c).conj(), Scalar::sqrt_p(&c));
        let x = z5.add(&Scalar::a(&c)).mul(&Scalar::sqrt_p(&c));
        let y = Scalar::root_of_unity(&c, 20, 3).unwrap().add(&Scalar::one(&c));
        assert_eq!(x.mul(&y).conj(), x.conj().mul(&y.conj()));
    }

    #[test]
    fn embedding_is_multiplicative() {
        let c = ctx(3, 1, 2, 36);
        let x = Scalar::root_of_unity(&c, 9, 2)
            .unwrap()
            .add(&Scalar::a(&c).scale(&BigRational::new(1.into(), 2.into())));
        let y = Scalar::sqrt_p(&c).sub(&Scalar::from_integer(&c, 1));
        let lhs = x.mul(&y).embed();
        let rhs = x.embed() * y.embed();
        assert!((lhs - rhs).norm() <= 1e-12 * (1.0 + rhs.norm()));
    }

    #[test]
    fn lambda_values() {
        let c = ctx(2, 1, 0, 8);
        let x = PRat::new(2, 1.into(), 1); // 1/2
        assert_eq!(Scalar::lambda(&c, &x).unwrap(), Scalar::from_integer(&c, -1));
        let y = PRat::new(2, 3.into(), 0); // integer
        assert_eq!(Scalar::lambda(&c, &y).unwrap(), Scalar::one(&c));
    }
}
