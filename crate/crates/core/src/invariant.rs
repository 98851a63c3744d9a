//! The unit-invariant sector for arbitrary (q, delta): finite combinations
//! of the normalized ball indicators omega_j (norm one, constant on the
//! ball of radius q^j), with the exact Gram matrix <omega_j | omega_k> =
//! q^{-|j-k|/2}.
//!
//! Everything here is parametrized by (q, delta) only, so it serves as the
//! abstract model wherever the concrete additive picture is unavailable.

use crate::scalar::{Scalar, ScalarContext};
use std::sync::Arc;

/// Vector in the span of {omega_j : j0 <= j <= j0 + len - 1}.
#[derive(Clone, Debug)]
pub struct InvariantVector {
    ctx: Arc<ScalarContext>,
    pub j0: i32,
    coeffs: Vec<Scalar>,
}

impl InvariantVector {
    pub fn new(ctx: &Arc<ScalarContext>, j0: i32, coeffs: Vec<Scalar>) -> Self {
        InvariantVector { ctx: Arc::clone(ctx), j0, coeffs }
    }

    pub fn basis(ctx: &Arc<ScalarContext>, j: i32) -> Self {
        Self::new(ctx, j, vec![Scalar::one(ctx)])
    }

    pub fn ctx(&self) -> &Arc<ScalarContext> {
        &self.ctx
    }

    pub fn coeff(&self, j: i32) -> Scalar {
        let idx = j - self.j0;
        if idx < 0 || idx as usize >= self.coeffs.len() {
            Scalar::zero(&self.ctx)
        } else {
            self.coeffs[idx as usize].clone()
        }
    }

    pub fn support(&self) -> Vec<i32> {
        (0..self.coeffs.len() as i32)
            .filter(|i| !self.coeffs[*i as usize].is_zero())
            .map(|i| self.j0 + i)
            .collect()
    }

    fn trimmed(mut self) -> Self {
        while let Some(last) = self.coeffs.last() {
            if last.is_zero() {
                self.coeffs.pop();
            } else {
                break;
            }
        }
        let lead = self.coeffs.iter().take_while(|c| c.is_zero()).count();
        if lead > 0 {
            self.coeffs.drain(..lead);
            self.j0 += lead as i32;
        }
        self
    }

    pub fn add(&self, other: &Self) -> Self {
        if self.coeffs.is_empty() {
            return other.clone();
        }
        if other.coeffs.is_empty() {
            return self.clone();
        }
        let j0 = self.j0.min(other.j0);
        let j1 = (self.j0 + self.coeffs.len() as i32).max(other.j0 + other.coeffs.len() as i32);
        let mut coeffs = Vec::with_capacity((j1 - j0) as usize);
        for j in j0..j1 {
            coeffs.push(self.coeff(j).add(&other.coeff(j)));
        }
        Self::new(&self.ctx, j0, coeffs).trimmed()
    }

    pub fn scale(&self, s: &Scalar) -> Self {
        Self::new(&self.ctx, self.j0, self.coeffs.iter().map(|c| c.mul(s)).collect()).trimmed()
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.scale(&Scalar::from_integer(&self.ctx, -1)))
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|c| c.is_zero())
    }

    pub fn equals(&self, other: &Self) -> bool {
        self.sub(other).is_zero()
    }

    /// Fourier transform: omega_j -> omega_{delta - j}.
    pub fn fourier(&self) -> Self {
        let delta = self.ctx.params.delta as i32;
        if self.coeffs.is_empty() {
            return self.clone();
        }
        let j_hi = self.j0 + self.coeffs.len() as i32 - 1;
        let mut coeffs = self.coeffs.clone();
        coeffs.reverse();
        Self::new(&self.ctx, delta - j_hi, coeffs)
    }

    /// U(1/pi)^m: omega_j -> omega_{j+m} (unitary dilation, any sign).
    pub fn dilate_shift(&self, m: i32) -> Self {
        Self::new(&self.ctx, self.j0 + m, self.coeffs.clone())
    }

    /// Support cutoff to |x| <= q^n: omega_j fixed for j <= n, and
    /// omega_j -> q^{(n-j)/2} omega_n for j > n.
    pub fn cutoff(&self, n: i32) -> Self {
        let mut acc = Self::new(&self.ctx, self.j0.min(n), Vec::new());
        for j in self.j0..self.j0 + self.coeffs.len() as i32 {
            let c = self.coeff(j);
            if c.is_zero() {
                continue;
            }
            let piece = if j <= n {
                Self::new(&self.ctx, j, vec![c])
            } else {
                Self::new(&self.ctx, n, vec![c.mul(&Scalar::sqrt_q_pow(&self.ctx, n - j))])
            };
            acc = acc.add(&piece);
        }
        acc
    }

    /// Exact inner product via the Gram matrix q^{-|j-k|/2}.
    pub fn inner_product(&self, other: &Self) -> Scalar {
        let mut acc = Scalar::zero(&self.ctx);
        for j in self.j0..self.j0 + self.coeffs.len() as i32 {
            let cj = self.coeff(j);
            if cj.is_zero() {
                continue;
            }
            for k in other.j0..other.j0 + other.coeffs.len() as i32 {
                let ck = other.coeff(k);
                if ck.is_zero() {
                    continue;
                }
                let gram = Scalar::sqrt_q_pow(&self.ctx, -(j - k).abs());
                acc = acc.add(&cj.conj().mul(&ck).mul(&gram));
            }
        }
        acc
    }

    pub fn norm_sq(&self) -> Scalar {
        self.inner_product(self)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::FieldParams;
    use num::rational::BigRational;

    fn ctx(p: u32, f: u32, delta: u32, n: u64) -> Arc<ScalarContext> {
        ScalarContext::new(FieldParams { p, f, delta }, n)
    }

    #[test]
    fn gram_matrix() {
        let c = ctx(3, 1, 0, 12);
        let w0 = InvariantVector::basis(&c, 0);
        let w2 = InvariantVector::basis(&c, 2);
        assert_eq!(w0.inner_product(&w0), Scalar::one(&c));
        assert_eq!(w0.inner_product(&w2), Scalar::sqrt_q_pow(&c, -2)); // 1/3
        let w1 = InvariantVector::basis(&c, -1);
        assert_eq!(w1.inner_product(&w2), Scalar::sqrt_q_pow(&c, -3));
    }

    #[test]
    fn fourier_rules() {
        // delta = 2: F omega_0 = omega_2; F is an involution
        let c = ctx(3, 1, 2, 12);
        let w0 = InvariantVector::basis(&c, 0);
        assert!(w0.fourier().equals(&InvariantVector::basis(&c, 2)));
        let v = InvariantVector::new(
            &c,
            -1,
            vec![Scalar::one(&c), Scalar::sqrt_p(&c), Scalar::from_integer(&c, 3)],
        );
        assert!(v.fourier().fourier().equals(&v));
        // Plancherel through the Gram matrix
        let w = InvariantVector::new(&c, 0, vec![Scalar::a(&c), Scalar::from_integer(&c, -1)]);
        assert_eq!(v.fourier().inner_product(&w.fourier()), v.inner_product(&w));
    }

    #[test]
    fn cutoff_rules() {
        // P_1(omega_3) at q = 3 is (1/3) omega_1
        let c = ctx(3, 1, 0, 12);
        let w3 = InvariantVector::basis(&c, 3);
        let cut = w3.cutoff(1);
        let expected = InvariantVector::basis(&c, 1)
            .scale(&Scalar::from_rational(&c, BigRational::new(1.into(), 3.into())));
        assert!(cut.equals(&expected));
        // idempotent
        assert!(cut.cutoff(1).equals(&cut));
        // omega_0 is untouched by P_1
        let w0 = InvariantVector::basis(&c, 0);
        assert!(w0.cutoff(1).equals(&w0));
    }

    #[test]
    fn dilation_shift() {
        let c = ctx(2, 1, 1, 8);
        let w0 = InvariantVector::basis(&c, 0);
        assert!(w0.dilate_shift(1).equals(&InvariantVector::basis(&c, 1)));
        // unitary: norms preserved
        let v = InvariantVector::new(&c, 0, vec![Scalar::one(&c), Scalar::a(&c)]);
        assert_eq!(v.dilate_shift(5).norm_sq(), v.norm_sq());
    }
}
