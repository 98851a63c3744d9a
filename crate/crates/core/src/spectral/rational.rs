//! Rational functions on the unit circle of one spectral component:
//! Laurent numerator over (1 - z/sqrt(q))^j (1 - 1/(z sqrt(q)))^k.
//!
//! These two factors are the only pole locations any multiplier or kernel
//! needs; keeping them explicit makes circle integration an exact
//! partial-fraction computation and keeps conjugation (z -> 1/z with
//! coefficient conjugation) a closed operation.

use crate::error::{Error, Result};
use crate::scalar::{Scalar, ScalarContext};
use num::bigint::BigInt;
use num::rational::BigRational;
use num::{Complex, One};
use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

type Complex64 = Complex<f64>;

/// Laurent numerator over P^jp * M^km with P = 1 - z/sqrt(q) and
/// M = 1 - 1/(z sqrt(q)). Canonical: numerator divisible by neither factor.
#[derive(Clone)]
pub struct RationalSpectral {
    ctx: Arc<ScalarContext>,
    num: BTreeMap<i32, Scalar>,
    jp: u32,
    km: u32,
}

impl fmt::Debug for RationalSpectral {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self)
    }
}

impl fmt::Display for RationalSpectral {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.num.is_empty() {
            return write!(f, "0");
        }
        let terms: Vec<String> = self
            .num
            .iter()
            .map(|(m, c)| {
                if *m == 0 {
                    format!("({:?})", c)
                } else {
                    format!("({:?})*z^{}", c, m)
                }
            })
            .collect();
        write!(f, "{}", terms.join(" + "))?;
        if self.jp > 0 {
            write!(f, " / (1 - z/sqrt(q))^{}", self.jp)?;
        }
        if self.km > 0 {
            write!(f, " / (1 - 1/(z sqrt(q)))^{}", self.km)?;
        }
        Ok(())
    }
}

impl RationalSpectral {
    pub fn zero(ctx: &Arc<ScalarContext>) -> Self {
        RationalSpectral { ctx: Arc::clone(ctx), num: BTreeMap::new(), jp: 0, km: 0 }
    }

    pub fn constant(c: Scalar) -> Self {
        let ctx = Arc::clone(c.ctx());
        Self::from_laurent(&ctx, [(0, c)])
    }

    pub fn one(ctx: &Arc<ScalarContext>) -> Self {
        Self::constant(Scalar::one(ctx))
    }

    pub fn monomial(ctx: &Arc<ScalarContext>, m: i32, c: Scalar) -> Self {
        Self::from_laurent(ctx, [(m, c)])
    }

    pub fn from_laurent(
        ctx: &Arc<ScalarContext>,
        terms: impl IntoIterator<Item = (i32, Scalar)>,
    ) -> Self {
        let mut num = BTreeMap::new();
        for (m, c) in terms {
            if c.is_zero() {
                continue;
            }
            insert_c(&mut num, m, c);
        }
        RationalSpectral { ctx: Arc::clone(ctx), num, jp: 0, km: 0 }
    }

    pub fn from_parts(
        ctx: &Arc<ScalarContext>,
        terms: impl IntoIterator<Item = (i32, Scalar)>,
        jp: u32,
        km: u32,
    ) -> Self {
        let mut r = Self::from_laurent(ctx, terms);
        r.jp = jp;
        r.km = km;
        r.canonicalize();
        r
    }

    pub fn ctx(&self) -> &Arc<ScalarContext> {
        &self.ctx
    }

    pub fn den_exponents(&self) -> (u32, u32) {
        (self.jp, self.km)
    }

    pub fn laurent_terms(&self) -> impl Iterator<Item = (&i32, &Scalar)> {
        self.num.iter()
    }

    pub fn is_zero(&self) -> bool {
        self.num.is_empty()
    }

    /// Pure Laurent polynomial (no denominator)?
    pub fn is_laurent(&self) -> bool {
        self.jp == 0 && self.km == 0
    }

    pub fn coefficient_raw(&self, m: i32) -> Scalar {
        self.num.get(&m).cloned().unwrap_or_else(|| Scalar::zero(&self.ctx))
    }

    pub fn degree_range(&self) -> Option<(i32, i32)> {
        let lo = self.num.keys().next()?;
        let hi = self.num.keys().last()?;
        Some((*lo, *hi))
    }

    fn sqrt_q(&self, k: i32) -> Scalar {
        Scalar::sqrt_q_pow(&self.ctx, k)
    }

    /// Numerator evaluated at z = sqrt(q)^sign (sign = 1 or -1).
    fn num_at_sqrt_q(&self, sign: i32) -> Scalar {
        let mut acc = Scalar::zero(&self.ctx);
        for (m, c) in &self.num {
            acc = acc.add(&c.mul(&self.sqrt_q(sign * m)));
        }
        acc
    }

    /// Synthetic division of the numerator (as z^{m0} * poly) by (z - root);
    /// the remainder must vanish. Returns quotient coefficients with the
    /// degree offset m0.
    fn num_div_linear(&self, root: &Scalar) -> (i32, Vec<Scalar>) {
        let (m0, m1) = self.degree_range().expect("nonzero numerator");
        let d = (m1 - m0) as usize;
        assert!(d >= 1, "single monomials have no root at sqrt(q)^{{+-1}}");
        let mut a: Vec<Scalar> = vec![Scalar::zero(&self.ctx); d + 1];
        for (m, c) in &self.num {
            a[(m - m0) as usize] = c.clone();
        }
        let mut b: Vec<Scalar> = vec![Scalar::zero(&self.ctx); d];
        b[d - 1] = a[d].clone();
        for k in (1..d).rev() {
            b[k - 1] = a[k].add(&b[k].mul(root));
        }
        debug_assert!(a[0].add(&b[0].mul(root)).is_zero(), "inexact division");
        (m0, b)
    }

    /// Divide the numerator exactly by P = 1 - z/sqrt(q) (requires the
    /// numerator to vanish at sqrt(q)): N/P = -sqrt(q) N/(z - sqrt(q)).
    fn num_div_p(&self) -> BTreeMap<i32, Scalar> {
        let (m0, b) = self.num_div_linear(&self.sqrt_q(1));
        let scale = self.sqrt_q(1).neg();
        let mut out = BTreeMap::new();
        for (k, c) in b.into_iter().enumerate() {
            insert_c(&mut out, m0 + k as i32, c.mul(&scale));
        }
        out
    }

    /// Divide the numerator exactly by M = 1 - 1/(z sqrt(q)) (requires the
    /// numerator to vanish at 1/sqrt(q)): N/M = z N/(z - 1/sqrt(q)).
    fn num_div_m(&self) -> BTreeMap<i32, Scalar> {
        let (m0, b) = self.num_div_linear(&self.sqrt_q(-1));
        let mut out = BTreeMap::new();
        for (k, c) in b.into_iter().enumerate() {
            insert_c(&mut out, m0 + k as i32 + 1, c);
        }
        out
    }

    fn canonicalize(&mut self) {
        if self.num.is_empty() {
            self.jp = 0;
            self.km = 0;
            return;
        }
        while self.jp > 0 && self.num_at_sqrt_q(1).is_zero() {
            self.num = self.num_div_p();
            self.jp -= 1;
            if self.num.is_empty() {
                self.jp = 0;
                self.km = 0;
                return;
            }
        }
        while self.km > 0 && self.num_at_sqrt_q(-1).is_zero() {
            self.num = self.num_div_m();
            self.km -= 1;
            if self.num.is_empty() {
                self.jp = 0;
                self.km = 0;
                return;
            }
        }
    }

    /// Multiply numerator by P = 1 - z/sqrt(q).
    fn num_mul_p(num: &BTreeMap<i32, Scalar>, inv_sqrt_q: &Scalar) -> BTreeMap<i32, Scalar> {
        let mut out = BTreeMap::new();
        for (m, c) in num {
            insert_c(&mut out, *m, c.clone());
            insert_c(&mut out, m + 1, c.mul(inv_sqrt_q).neg());
        }
        out
    }

    /// Multiply numerator by M = 1 - 1/(z sqrt(q)).
    fn num_mul_m(num: &BTreeMap<i32, Scalar>, inv_sqrt_q: &Scalar) -> BTreeMap<i32, Scalar> {
        let mut out = BTreeMap::new();
        for (m, c) in num {
            insert_c(&mut out, *m, c.clone());
            insert_c(&mut out, m - 1, c.mul(inv_sqrt_q).neg());
        }
        out
    }

    /// Numerator over the common denominator P^jp M^km (no cancellation).
    pub(crate) fn raised_numerator(&self, jp: u32, km: u32) -> BTreeMap<i32, Scalar> {
        self.raised_num(jp, km)
    }

    fn raised_num(&self, jp: u32, km: u32) -> BTreeMap<i32, Scalar> {
        let isq = self.sqrt_q(-1);
        let mut num = self.num.clone();
        for _ in self.jp..jp {
            num = Self::num_mul_p(&num, &isq);
        }
        for _ in self.km..km {
            num = Self::num_mul_m(&num, &isq);
        }
        num
    }

    pub fn add(&self, other: &Self) -> Self {
        let jp = self.jp.max(other.jp);
        let km = self.km.max(other.km);
        let mut num = self.raised_num(jp, km);
        for (m, c) in other.raised_num(jp, km) {
            insert_c(&mut num, m, c);
        }
        let mut r = RationalSpectral { ctx: Arc::clone(&self.ctx), num, jp, km };
        r.canonicalize();
        r
    }

    pub fn neg(&self) -> Self {
        RationalSpectral {
            ctx: Arc::clone(&self.ctx),
            num: self.num.iter().map(|(m, c)| (*m, c.neg())).collect(),
            jp: self.jp,
            km: self.km,
        }
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.neg())
    }

    pub fn scale(&self, s: &Scalar) -> Self {
        if s.is_zero() {
            return Self::zero(&self.ctx);
        }
        let mut r = RationalSpectral {
            ctx: Arc::clone(&self.ctx),
            num: self.num.iter().map(|(m, c)| (*m, c.mul(s))).collect(),
            jp: self.jp,
            km: self.km,
        };
        r.canonicalize();
        r
    }

    pub fn scale_rat(&self, r: &BigRational) -> Self {
        self.scale(&Scalar::from_rational(&self.ctx, r.clone()))
    }

    pub fn mul(&self, other: &Self) -> Self {
        let mut num: BTreeMap<i32, Scalar> = BTreeMap::new();
        for (m1, c1) in &self.num {
            for (m2, c2) in &other.num {
                insert_c(&mut num, m1 + m2, c1.mul(c2));
            }
        }
        let mut r = RationalSpectral {
            ctx: Arc::clone(&self.ctx),
            num,
            jp: self.jp + other.jp,
            km: self.km + other.km,
        };
        r.canonicalize();
        r
    }

    /// Multiply by the monomial c z^m.
    pub fn mul_monomial(&self, m: i32, c: &Scalar) -> Self {
        let mut r = RationalSpectral {
            ctx: Arc::clone(&self.ctx),
            num: self.num.iter().map(|(m0, c0)| (*m0 + m, c0.mul(c))).collect(),
            jp: self.jp,
            km: self.km,
        };
        r.canonicalize();
        r
    }

    pub fn equals(&self, other: &Self) -> bool {
        self.sub(other).is_zero()
    }

    /// The function z -> conj(r(z)) on |z| = 1: conjugate coefficients,
    /// reverse Laurent degrees, swap the two denominator factors.
    pub fn conj_fn(&self) -> Self {
        RationalSpectral {
            ctx: Arc::clone(&self.ctx),
            num: self.num.iter().map(|(m, c)| (-*m, c.conj())).collect(),
            jp: self.km,
            km: self.jp,
        }
    }

    /// Substitution z -> 1/z (no coefficient conjugation).
    pub fn subst_z_inv(&self) -> Self {
        RationalSpectral {
            ctx: Arc::clone(&self.ctx),
            num: self.num.iter().map(|(m, c)| (-*m, c.clone())).collect(),
            jp: self.km,
            km: self.jp,
        }
    }

    /// Analytic continuation value at z = sqrt(q) (finite iff canonical
    /// jp = 0).
    pub fn eval_at_sqrt_q(&self) -> Result<Scalar> {
        if self.jp > 0 {
            return Err(Error::NotInvertible);
        }
        // M(sqrt q) = 1 - 1/q, rational and invertible
        let m_val = Scalar::one(&self.ctx).sub(&q_inv(&self.ctx));
        let den = m_val.pow(self.km).try_invert()?;
        Ok(self.num_at_sqrt_q(1).mul(&den))
    }

    /// Exact evaluation at a circle point given as a scalar root of unity;
    /// succeeds when the denominator value is invertible in the tower.
    pub fn eval_exact(&self, z: &Scalar) -> Result<Scalar> {
        let z_inv = z.try_invert()?;
        let mut acc = Scalar::zero(&self.ctx);
        for (m, c) in &self.num {
            let zp = if *m >= 0 { z.pow(*m as u32) } else { z_inv.pow((-m) as u32) };
            acc = acc.add(&c.mul(&zp));
        }
        let isq = self.sqrt_q(-1);
        let p_val = Scalar::one(&self.ctx).sub(&z.mul(&isq));
        let m_val = Scalar::one(&self.ctx).sub(&z_inv.mul(&isq));
        let den = p_val.pow(self.jp).mul(&m_val.pow(self.km)).try_invert()?;
        Ok(acc.mul(&den))
    }

    /// Numerical value at z = e^{i theta}.
    pub fn embed_at(&self, theta: f64) -> Complex64 {
        let z = Complex64::new(theta.cos(), theta.sin());
        let mut acc = Complex64::new(0.0, 0.0);
        for (m, c) in &self.num {
            acc += c.embed() * z.powi(*m);
        }
        let q = self.ctx.params.q() as f64;
        let pv = Complex64::new(1.0, 0.0) - z / q.sqrt();
        let mv = Complex64::new(1.0, 0.0) - (z * q.sqrt()).inv();
        acc / pv.powi(self.jp as i32) / mv.powi(self.km as i32)
    }

    /// Exact integral over the circle against d theta / 2 pi.
    pub fn circle_integral(&self) -> Scalar {
        let ctx = &self.ctx;
        let pf = partial_fractions(ctx, self.jp, self.km);
        let mut acc = Scalar::zero(ctx);
        for (m, c) in &self.num {
            // constant part: picks out m = 0
            if *m == 0 {
                acc = acc.add(&c.mul(&pf.constant));
            }
            // 1/P^i parts: contribute for m <= 0
            if *m <= 0 {
                for (i, coeff) in &pf.p_parts {
                    let bin = binomial((-m) as u64 + *i as u64 - 1, *i as u64 - 1);
                    let v = c.mul(coeff).scale(&bin).mul(&self.sqrt_q(*m));
                    acc = acc.add(&v);
                }
            }
            // 1/M^i parts: contribute for m >= 0
            if *m >= 0 {
                for (i, coeff) in &pf.m_parts {
                    let bin = binomial(*m as u64 + *i as u64 - 1, *i as u64 - 1);
                    let v = c.mul(coeff).scale(&bin).mul(&self.sqrt_q(-*m));
                    acc = acc.add(&v);
                }
            }
        }
        acc
    }

    /// Fourier coefficient: integral of z^{-m} r(z).
    pub fn fourier_coefficient(&self, m: i32) -> Scalar {
        self.mul_monomial(-m, &Scalar::one(&self.ctx)).circle_integral()
    }

    /// log(q) z d/dz, in units of log q.
    pub fn derivation(&self) -> Self {
        let ctx = &self.ctx;
        let isq = self.sqrt_q(-1);
        // D(N) P M + jp N (z/sqrt q) M - km N (z^{-1}/sqrt q) P, over P^{jp+1} M^{km+1}
        let dn: BTreeMap<i32, Scalar> = self
            .num
            .iter()
            .map(|(m, c)| (*m, c.scale(&BigRational::from_integer(BigInt::from(*m)))))
            .collect();
        let mut total = Self::num_mul_m(&Self::num_mul_p(&dn, &isq), &isq);
        if self.jp > 0 {
            let shifted: BTreeMap<i32, Scalar> = self
                .num
                .iter()
                .map(|(m, c)| (*m + 1, c.mul(&isq).scale(&BigRational::from_integer(BigInt::from(self.jp)))))
                .collect();
            for (m, c) in Self::num_mul_m(&shifted, &isq) {
                insert_c(&mut total, m, c);
            }
        }
        if self.km > 0 {
            let shifted: BTreeMap<i32, Scalar> = self
                .num
                .iter()
                .map(|(m, c)| {
                    (*m - 1, c.mul(&isq).neg().scale(&BigRational::from_integer(BigInt::from(self.km))))
                })
                .collect();
            for (m, c) in Self::num_mul_p(&shifted, &isq) {
                insert_c(&mut total, m, c);
            }
        }
        let mut r = RationalSpectral {
            ctx: Arc::clone(ctx),
            num: total,
            jp: self.jp + 1,
            km: self.km + 1,
        };
        r.canonicalize();
        r
    }

    /// Holomorphic in the exterior disk (including infinity): canonical
    /// form has no (1 - z/sqrt q) pole and no positive Laurent degrees.
    pub fn is_exterior_hardy(&self) -> bool {
        if self.jp > 0 {
            return false;
        }
        self.degree_range().map_or(true, |(_, hi)| hi <= 0)
    }
}

fn insert_c(map: &mut BTreeMap<i32, Scalar>, m: i32, c: Scalar) {
    use std::collections::btree_map::Entry;
    if c.is_zero() {
        return;
    }
    match map.entry(m) {
        Entry::Vacant(v) => {
            v.insert(c);
        }
        Entry::Occupied(mut o) => {
            let next = o.get().add(&c);
            if next.is_zero() {
                o.remove();
            } else {
                *o.get_mut() = next;
            }
        }
    }
}

fn q_inv(ctx: &Arc<ScalarContext>) -> Scalar {
    Scalar::from_rational(
        ctx,
        BigRational::new(BigInt::one(), BigInt::from(ctx.params.q())),
    )
}

fn binomial(n: u64, k: u64) -> BigRational {
    let mut acc = BigInt::one();
    for i in 0..k {
        acc = acc * BigInt::from(n - i);
    }
    let mut den = BigInt::one();
    for i in 1..=k {
        den = den * BigInt::from(i);
    }
    BigRational::new(acc, den)
}

struct PartialFractions {
    constant: Scalar,
    /// (i, A_i) with term A_i / P^i
    p_parts: Vec<(u32, Scalar)>,
    /// (i, B_i) with term B_i / M^i
    m_parts: Vec<(u32, Scalar)>,
}

/// 1/(P^j M^k) as constant + sum A_i/P^i + sum B_i/M^i, using
/// 1/(P M) = (1 - 1/q)^{-1} (1/P + 1/M - 1).
fn partial_fractions(ctx: &Arc<ScalarContext>, j: u32, k: u32) -> PartialFractions {
    use std::collections::HashMap;
    // accumulate coefficients for symbolic terms indexed by (jp, km)
    let mut queue: HashMap<(u32, u32), Scalar> = HashMap::new();
    queue.insert((j, k), Scalar::one(ctx));
    let c = Scalar::one(ctx)
        .sub(&q_inv(ctx))
        .try_invert()
        .expect("1 - 1/q is invertible");
    let mut constant = Scalar::zero(ctx);
    let mut p_parts: HashMap<u32, Scalar> = HashMap::new();
    let mut m_parts: HashMap<u32, Scalar> = HashMap::new();
    while let Some((&(jj, kk), _)) = queue.iter().find(|((jj, kk), _)| *jj > 0 && *kk > 0) {
        let coeff = queue.remove(&(jj, kk)).unwrap();
        let scaled = coeff.mul(&c);
        for (key, sign) in
            [((jj, kk - 1), 1i32), ((jj - 1, kk), 1), ((jj - 1, kk - 1), -1)]
        {
            let add = if sign > 0 { scaled.clone() } else { scaled.neg() };
            queue
                .entry(key)
                .and_modify(|v| *v = v.add(&add))
                .or_insert(add);
        }
    }
    for ((jj, kk), coeff) in queue {
        if coeff.is_zero() {
            continue;
        }
        if jj == 0 && kk == 0 {
            constant = constant.add(&coeff);
        } else if kk == 0 {
            p_parts.entry(jj).and_modify(|v| *v = v.add(&coeff)).or_insert(coeff);
        } else {
            m_parts.entry(kk).and_modify(|v| *v = v.add(&coeff)).or_insert(coeff);
        }
    }
    PartialFractions {
        constant,
        p_parts: p_parts.into_iter().collect(),
        m_parts: m_parts.into_iter().collect(),
    }
}

/// The Poisson factor (1 - 1/q) / (P M), whose Fourier coefficients are
/// q^{-|k|/2}.
pub fn poisson_kernel(ctx: &Arc<ScalarContext>) -> RationalSpectral {
    let one_minus = Scalar::one(ctx).sub(&q_inv(ctx));
    RationalSpectral::from_parts(ctx, [(0, one_minus)], 1, 1)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::FieldParams;

    fn ctx(p: u32, f: u32, delta: u32, n: u64) -> Arc<ScalarContext> {
        ScalarContext::new(FieldParams { p, f, delta }, n)
    }

    #[test]
    fn monomial_integrals() {
        let c = ctx(2, 1, 0, 8);
        for m in -3..=3 {
            let r = RationalSpectral::monomial(&c, m, Scalar::one(&c));
            let expected =
                if m == 0 { Scalar::one(&c) } else { Scalar::zero(&c) };
            assert_eq!(r.circle_integral(), expected, "m = {}", m);
        }
    }

    #[test]
    fn poisson_kernel_mass_and_coefficients() {
        for (p, f) in [(2u32, 1u32), (3, 1), (2, 2)] {
            let c = ctx(p, f, 0, 8 * p as u64);
            let pk = poisson_kernel(&c);
            assert_eq!(pk.circle_integral(), Scalar::one(&c), "total mass");
            for k in -3i32..=3 {
                assert_eq!(
                    pk.fourier_coefficient(k),
                    Scalar::sqrt_q_pow(&c, -k.abs()),
                    "coefficient q^(-|{}|/2)",
                    k
                );
            }
        }
    }

    #[test]
    fn canonical_cancellation() {
        let c = ctx(3, 1, 0, 12);
        // (1 - z/sqrt q) * X / P = X
        let x = RationalSpectral::from_laurent(
            &c,
            [(0, Scalar::one(&c)), (2, Scalar::sqrt_p(&c))],
        );
        let p_factor = RationalSpectral::from_laurent(
            &c,
            [(0, Scalar::one(&c)), (1, Scalar::sqrt_q_pow(&c, -1).neg())],
        );
        let quotient = RationalSpectral::from_parts(
            &c,
            p_factor.mul(&x).laurent_terms().map(|(m, s)| (*m, s.clone())),
            1,
            0,
        );
        assert!(quotient.equals(&x));
        assert!(quotient.is_laurent());
    }

    #[test]
    fn division_by_m_factor() {
        let c = ctx(3, 1, 0, 12);
        let x = RationalSpectral::from_laurent(
            &c,
            [(-1, Scalar::from_integer(&c, 2)), (1, Scalar::one(&c))],
        );
        let m_factor = RationalSpectral::from_laurent(
            &c,
            [(0, Scalar::one(&c)), (-1, Scalar::sqrt_q_pow(&c, -1).neg())],
        );
        let prod = m_factor.mul(&x);
        let quotient = RationalSpectral::from_parts(
            &c,
            prod.laurent_terms().map(|(m, s)| (*m, s.clone())),
            0,
            1,
        );
        assert!(quotient.equals(&x));
    }

    #[test]
    fn addition_with_mixed_denominators() {
        let c = ctx(2, 1, 0, 8);
        let pk = poisson_kernel(&c);
        let lhs = pk.add(&RationalSpectral::one(&c)).sub(&pk);
        assert!(lhs.equals(&RationalSpectral::one(&c)));
        // numeric agreement at a sample angle
        let r = pk.add(&RationalSpectral::monomial(&c, 2, Scalar::sqrt_p(&c)));
        let th = 0.7;
        let direct = pk.embed_at(th) + Complex64::new(th.cos(), th.sin()).powi(2) * 2f64.sqrt();
        assert!((r.embed_at(th) - direct).norm() < 1e-12);
    }

    #[test]
    fn derivation_basics_and_product_rule() {
        let c = ctx(3, 1, 0, 12);
        let z3 = RationalSpectral::monomial(&c, 3, Scalar::one(&c));
        assert!(z3.derivation().equals(&RationalSpectral::monomial(&c, 3, Scalar::from_integer(&c, 3))));
        assert!(RationalSpectral::one(&c).derivation().is_zero());
        let a = poisson_kernel(&c).add(&RationalSpectral::monomial(&c, 1, Scalar::sqrt_p(&c)));
        let b = RationalSpectral::from_parts(&c, [(0, Scalar::one(&c)), (-2, Scalar::a(&c))], 0, 1);
        let lhs = a.mul(&b).derivation();
        let rhs = a.derivation().mul(&b).add(&a.mul(&b.derivation()));
        assert!(lhs.equals(&rhs));
    }

    #[test]
    fn conjugation_and_inversion_structure() {
        let c = ctx(2, 1, 0, 16);
        let r = RationalSpectral::from_parts(
            &c,
            [(-1, Scalar::root_of_unity(&c, 8, 1).unwrap()), (2, Scalar::a(&c))],
            1,
            0,
        );
        // conj is an involution, subst_z_inv squares to identity
        assert!(r.conj_fn().conj_fn().equals(&r));
        assert!(r.subst_z_inv().subst_z_inv().equals(&r));
        // numeric check: conj_fn(theta) = conj(r(theta))
        let th = 1.1;
        let lhs = r.conj_fn().embed_at(th);
        let rhs = r.embed_at(th).conj();
        assert!((lhs - rhs).norm() < 1e-12);
        // integral of r * conj(r) is a nonnegative real (norm^2)
        let n2 = r.mul(&r.conj_fn()).circle_integral();
        assert!(n2.embed().im.abs() < 1e-12 && n2.embed().re > 0.0);
    }

    #[test]
    fn integral_matches_quadrature() {
        let c = ctx(3, 1, 1, 12);
        let r = poisson_kernel(&c)
            .mul(&RationalSpectral::from_laurent(
                &c,
                [(-2, Scalar::one(&c)), (1, Scalar::sqrt_p(&c))],
            ))
            .add(&RationalSpectral::from_parts(&c, [(1, Scalar::a(&c))], 0, 1));
        let exact = r.circle_integral().embed();
        let n = 40_000usize;
        let mut acc = Complex64::new(0.0, 0.0);
        for i in 0..n {
            let th = 2.0 * std::f64::consts::PI * (i as f64 + 0.5) / n as f64;
            acc += r.embed_at(th);
        }
        acc /= n as f64;
        assert!((exact - acc).norm() < 1e-6, "exact {} vs quad {}", exact, acc);
    }

    #[test]
    fn exterior_hardy_detection() {
        let c = ctx(2, 1, 0, 8);
        let good = RationalSpectral::from_parts(&c, [(0, Scalar::one(&c)), (-2, Scalar::sqrt_p(&c))], 0, 1);
        assert!(good.is_exterior_hardy());
        let bad_deg = RationalSpectral::monomial(&c, 1, Scalar::one(&c));
        assert!(!bad_deg.is_exterior_hardy());
        let bad_pole = poisson_kernel(&c);
        assert!(!bad_pole.is_exterior_hardy());
    }

    #[test]
    fn eval_at_sqrt_q_continuation() {
        let c = ctx(2, 1, 0, 8);
        // 1/M at sqrt q: 1/(1 - 1/q) = 2
        let r = RationalSpectral::from_parts(&c, [(0, Scalar::one(&c))], 0, 1);
        assert_eq!(r.eval_at_sqrt_q().unwrap(), Scalar::from_integer(&c, 2));
        assert!(poisson_kernel(&c).eval_at_sqrt_q().is_err());
    }
}
