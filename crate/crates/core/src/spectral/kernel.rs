//! Two-variable kernels on a product of circles.
//!
//! `FiniteKernel` is a finite double Laurent series, the setting of the
//! diagonal-summation lemma. `KernelSum` is a finite sum of separable
//! terms u_i(z) * v_i(w) with rational-spectral factors, which covers the
//! interacting-space projector and the cutoff kernels; equality is decided
//! exactly by expanding the z-side over a common denominator and testing
//! the monomial-indexed w-side combinations.

use crate::scalar::{Scalar, ScalarContext};
use crate::spectral::rational::RationalSpectral;
use std::collections::{BTreeMap, BTreeSet};
use std::sync::Arc;

/// Finite double Laurent series sum c_{ab} z^a w^b.
#[derive(Clone, Debug)]
pub struct FiniteKernel {
    ctx: Arc<ScalarContext>,
    pub coeffs: BTreeMap<(i32, i32), Scalar>,
}

impl FiniteKernel {
    pub fn new(ctx: &Arc<ScalarContext>) -> Self {
        FiniteKernel { ctx: Arc::clone(ctx), coeffs: BTreeMap::new() }
    }

    pub fn set(&mut self, a: i32, b: i32, c: Scalar) {
        if c.is_zero() {
            self.coeffs.remove(&(a, b));
        } else {
            self.coeffs.insert((a, b), c);
        }
    }
}

/// sum over j of the double integrals of z^{-j} A(z, w) w^j, evaluated by
/// exact coefficient extraction term by term.
pub fn kernel_diagonal_sum_series(a: &FiniteKernel) -> Scalar {
    let mut acc = Scalar::zero(&a.ctx);
    let js: BTreeSet<i32> = a.coeffs.keys().map(|(i, _)| *i).collect();
    for j in js {
        // double integral of z^{-j} A w^j picks the coefficient at (j, -j)
        if let Some(c) = a.coeffs.get(&(j, -j)) {
            acc = acc.add(c);
        }
    }
    acc
}

/// The diagonal integral of A(z, z) over the circle.
pub fn kernel_diagonal_sum_direct(a: &FiniteKernel) -> Scalar {
    let mut acc = Scalar::zero(&a.ctx);
    for ((i, j), c) in &a.coeffs {
        if i + j == 0 {
            acc = acc.add(c);
        }
    }
    acc
}

/// Finite sum of separable terms u_i(z) * v_i(w). The w-side factor is
/// stored as a function of w (for a projector kernel it is the pointwise
/// conjugate of a basis vector, which `RationalSpectral::conj_fn` yields).
#[derive(Clone, Debug)]
pub struct KernelSum {
    ctx: Arc<ScalarContext>,
    terms: Vec<(RationalSpectral, RationalSpectral)>,
}

impl KernelSum {
    pub fn new(ctx: &Arc<ScalarContext>) -> Self {
        KernelSum { ctx: Arc::clone(ctx), terms: Vec::new() }
    }

    pub fn ctx(&self) -> &Arc<ScalarContext> {
        &self.ctx
    }

    pub fn push(&mut self, u: RationalSpectral, v: RationalSpectral) {
        if !u.is_zero() && !v.is_zero() {
            self.terms.push((u, v));
        }
    }

    pub fn terms(&self) -> &[(RationalSpectral, RationalSpectral)] {
        &self.terms
    }

    pub fn add(&self, other: &Self) -> Self {
        let mut out = self.clone();
        out.terms.extend(other.terms.iter().cloned());
        out
    }

    pub fn neg(&self) -> Self {
        let mut out = Self::new(&self.ctx);
        for (u, v) in &self.terms {
            out.push(u.neg(), v.clone());
        }
        out
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.neg())
    }

    pub fn scale(&self, s: &Scalar) -> Self {
        let mut out = Self::new(&self.ctx);
        for (u, v) in &self.terms {
            out.push(u.scale(s), v.clone());
        }
        out
    }

    /// K(z, z): substitute w = z and sum.
    pub fn diagonal(&self) -> RationalSpectral {
        let mut acc = RationalSpectral::zero(&self.ctx);
        for (u, v) in &self.terms {
            acc = acc.add(&u.mul(v));
        }
        acc
    }

    /// Exact zero test: raise every z-side numerator to the common
    /// denominator, then for each z-monomial the scalar-weighted sum of
    /// w-side factors must vanish.
    pub fn is_zero(&self) -> bool {
        if self.terms.is_empty() {
            return true;
        }
        let jp = self.terms.iter().map(|(u, _)| u.den_exponents().0).max().unwrap();
        let km = self.terms.iter().map(|(u, _)| u.den_exponents().1).max().unwrap();
        // z-side numerators over the common denominator (no cancellation)
        let raised: Vec<BTreeMap<i32, Scalar>> =
            self.terms.iter().map(|(u, _)| u.raised_numerator(jp, km)).collect();
        let mut monomials: BTreeSet<i32> = BTreeSet::new();
        for r in &raised {
            monomials.extend(r.keys());
        }
        for m in monomials {
            let mut acc = RationalSpectral::zero(&self.ctx);
            for (i, r) in raised.iter().enumerate() {
                if let Some(c) = r.get(&m) {
                    acc = acc.add(&self.terms[i].1.scale(c));
                }
            }
            if !acc.is_zero() {
                return false;
            }
        }
        true
    }

    pub fn equals(&self, other: &Self) -> bool {
        self.sub(other).is_zero()
    }

    /// conj(K(w, z)) as a kernel in (z, w).
    pub fn swap_conj(&self) -> Self {
        let mut out = Self::new(&self.ctx);
        for (u, v) in &self.terms {
            out.push(v.conj_fn(), u.conj_fn());
        }
        out
    }

    pub fn is_hermitian(&self) -> bool {
        self.equals(&self.swap_conj())
    }

    /// Apply as an integral operator: g -> integral of K(z, w) g(w) dtheta(w)/2pi.
    pub fn apply(&self, g: &RationalSpectral) -> RationalSpectral {
        let mut acc = RationalSpectral::zero(&self.ctx);
        for (u, v) in &self.terms {
            let weight = v.mul(g).circle_integral();
            acc = acc.add(&u.scale(&weight));
        }
        acc
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::FieldParams;
    use crate::spectral::rational::poisson_kernel;

    fn ctx(p: u32) -> Arc<ScalarContext> {
        ScalarContext::new(FieldParams { p, f: 1, delta: 0 }, 8 * p as u64)
    }

    #[test]
    fn lemma_on_simple_kernels() {
        let c = ctx(2);
        // A(z, w) = z conj(w) = z w^{-1}
        let mut a = FiniteKernel::new(&c);
        a.set(1, -1, Scalar::one(&c));
        assert_eq!(kernel_diagonal_sum_series(&a), Scalar::one(&c));
        assert_eq!(kernel_diagonal_sum_direct(&a), Scalar::one(&c));
        // A = 1
        let mut b = FiniteKernel::new(&c);
        b.set(0, 0, Scalar::one(&c));
        assert_eq!(kernel_diagonal_sum_series(&b), Scalar::one(&c));
        assert_eq!(kernel_diagonal_sum_direct(&b), Scalar::one(&c));
        // off-diagonal monomial contributes nothing
        let mut d = FiniteKernel::new(&c);
        d.set(2, 1, Scalar::sqrt_p(&c));
        assert!(kernel_diagonal_sum_series(&d).is_zero());
        assert!(kernel_diagonal_sum_direct(&d).is_zero());
    }

    #[test]
    fn kernel_sum_zero_test() {
        let c = ctx(3);
        let pk_z = RationalSpectral::from_parts(&c, [(0, Scalar::one(&c))], 0, 1);
        let pk_w = RationalSpectral::from_parts(&c, [(0, Scalar::one(&c))], 1, 0);
        let mut k1 = KernelSum::new(&c);
        k1.push(pk_z.clone(), pk_w.clone());
        k1.push(RationalSpectral::monomial(&c, 1, Scalar::one(&c)), RationalSpectral::monomial(&c, -1, Scalar::one(&c)));
        // same kernel assembled differently: split the first term in two halves
        let half = Scalar::from_rational(&c, num::BigRational::new(1.into(), 2.into()));
        let mut k2 = KernelSum::new(&c);
        k2.push(pk_z.scale(&half), pk_w.clone());
        k2.push(pk_z.scale(&half), pk_w.clone());
        k2.push(RationalSpectral::monomial(&c, 1, Scalar::one(&c)), RationalSpectral::monomial(&c, -1, Scalar::one(&c)));
        assert!(k1.equals(&k2));
        assert!(!k1.equals(&KernelSum::new(&c)));
    }

    #[test]
    fn hermitian_projector_kernel() {
        let c = ctx(2);
        // omega-hat projector: a m(z) * a conj-factor(w), normalized by 1/(1-1/q)...
        // here just check hermiticity of u(z) conj(u)(w) shapes
        let u = RationalSpectral::from_parts(&c, [(0, Scalar::a(&c))], 0, 1);
        let mut k = KernelSum::new(&c);
        k.push(u.clone(), u.conj_fn());
        assert!(k.is_hermitian());
        // diagonal of a * conj(a) / |1 - z/sqrt q|^2 is the Poisson kernel shape
        let diag = k.diagonal();
        let expected = poisson_kernel(&c).scale(
            &Scalar::a(&c)
                .mul(&Scalar::a(&c))
                .mul(&Scalar::one(&c).sub(&Scalar::from_rational(&c, num::BigRational::new(1.into(), 2.into()))).try_invert().unwrap()),
        );
        assert!(diag.equals(&expected));
    }

    #[test]
    fn apply_is_projection_for_orthonormal_vector() {
        let c = ctx(2);
        // normalized omega-hat at delta = 0: a / (1 - 1/(z sqrt q)), norm 1
        let u = RationalSpectral::from_parts(&c, [(0, Scalar::a(&c))], 0, 1);
        assert!(u.mul(&u.conj_fn()).circle_integral().is_one());
        let mut k = KernelSum::new(&c);
        k.push(u.clone(), u.conj_fn());
        // applying twice equals applying once
        let g = RationalSpectral::from_laurent(
            &c,
            [(0, Scalar::one(&c)), (2, Scalar::sqrt_p(&c)), (-1, Scalar::from_integer(&c, 3))],
        );
        let once = k.apply(&g);
        let twice = k.apply(&once);
        assert!(once.equals(&twice));
        // and the image is a multiple of u
        assert!(once.equals(&u.scale(&u.conj_fn().mul(&g).circle_integral())));
    }

    #[test]
    fn random_finite_kernels_two_summation_orders() {
        use rand::{Rng, SeedableRng};
        let c = ctx(3);
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(11);
        for _ in 0..20 {
            let mut a = FiniteKernel::new(&c);
            for _ in 0..rng.gen_range(1..8) {
                let i = rng.gen_range(-4..5);
                let j = rng.gen_range(-4..5);
                let num = rng.gen_range(-5i64..6);
                a.set(i, j, Scalar::from_integer(&c, num));
            }
            assert_eq!(kernel_diagonal_sum_series(&a), kernel_diagonal_sum_direct(&a));
        }
    }
}
