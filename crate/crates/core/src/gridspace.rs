//! The finite Fourier-stable grid space V_{M,M}: functions supported in
//! p^{-M} Z_p and constant on cosets of p^M Z_p (concrete mode, delta = 0).
//!
//! Vectors are coefficient lists over the orthonormal cell basis
//! e_j = p^{M/2} 1_{j p^{-M} + p^M Z_p}. The Fourier transform is the
//! exact size-p^{2M} character sum, evaluated by a radix-p decimation so
//! large grids stay cheap; operators are composed column by column to
//! produce honest matrices whose traces feed the cutoff-trace checks.

use crate::bruhat::{smear_terms, BruhatFunction, Term};
use crate::error::{Error, Result};
use crate::mult::MultFunction;
use crate::padic::{Ball, PRat};
use crate::scalar::{Scalar, ScalarContext};
use num::bigint::BigInt;
use std::sync::Arc;

#[derive(Clone, Debug)]
pub struct GridSpace {
    ctx: Arc<ScalarContext>,
    pub level: u32,
}

/// One step of an operator chain on the grid space; a chain is applied
/// left to right.
#[derive(Clone, Debug)]
pub enum GridOp {
    Fourier,
    FourierInv,
    /// support cutoff to |x| <= p^n
    Cutoff(i32),
    /// smeared dilation U(f), in units of log q
    Smear(MultFunction),
    /// multiplication by log|x| in units of log q
    LogNorm,
}

impl GridSpace {
    pub fn new(ctx: &Arc<ScalarContext>, level: u32) -> Self {
        assert!(ctx.params.concrete(), "grid space requires f = 1, delta = 0");
        GridSpace { ctx: Arc::clone(ctx), level }
    }

    pub fn ctx(&self) -> &Arc<ScalarContext> {
        &self.ctx
    }

    pub fn dim(&self) -> u64 {
        (self.ctx.params.p as u64).pow(2 * self.level)
    }

    pub fn cell(&self, j: u64) -> Ball {
        let p = self.ctx.params.p;
        Ball::new(PRat::new(p, BigInt::from(j), self.level as i32), self.level as i32)
    }

    fn cell_norm_exp(&self, j: u64) -> Option<i32> {
        // |p^{-M} j| = p^{M - v_p(j)}; None marks the cell containing 0
        if j == 0 {
            return None;
        }
        let p = self.ctx.params.p as u64;
        let mut v = 0i32;
        let mut jj = j;
        while jj % p == 0 {
            jj /= p;
            v += 1;
        }
        Some(self.level as i32 - v)
    }

    pub fn zero_vector(&self) -> Vec<Scalar> {
        vec![Scalar::zero(&self.ctx); self.dim() as usize]
    }

    pub fn basis_vector(&self, j: u64) -> Vec<Scalar> {
        let mut v = self.zero_vector();
        v[j as usize] = Scalar::one(&self.ctx);
        v
    }

    /// Interpret a coefficient vector as a function (values on cells).
    pub fn to_function(&self, v: &[Scalar]) -> BruhatFunction {
        let scale = Scalar::sqrt_q_pow(&self.ctx, self.level as i32);
        let terms = v
            .iter()
            .enumerate()
            .filter(|(_, c)| !c.is_zero())
            .map(|(j, c)| Term { ball: self.cell(j as u64), coeff: c.mul(&scale) })
            .collect();
        BruhatFunction::new(&self.ctx, terms)
    }

    /// Expand a function on the grid; errors with GridLeak if it does not
    /// lie in V_{M,M}.
    pub fn from_function(&self, f: &BruhatFunction) -> Result<Vec<Scalar>> {
        let m = self.level as i32;
        let mut v = self.zero_vector();
        let scale = Scalar::sqrt_q_pow(&self.ctx, -m);
        let p = self.ctx.params.p;
        let size = BigInt::from(self.dim());
        for t in f.terms() {
            if t.coeff.is_zero() {
                continue;
            }
            if t.ball.sup_norm_exp() > m || t.ball.rexp > m {
                return Err(Error::GridLeak);
            }
            for cell in t.ball.cells_at_level(m) {
                let scaled = cell.center.mul_p_pow(m);
                let j_big = (scaled.numerator() * crate::padic::p_pow(p, (-scaled.den_exp()) as u32))
                    .modpow(&BigInt::from(1), &size);
                let j: u64 = (&j_big).try_into().unwrap();
                v[j as usize] = v[j as usize].add(&t.coeff.mul(&scale));
            }
        }
        Ok(v)
    }

    /// Exact DFT: out_i = scale * sum_j v_j zeta_P^{sign * i * j}, by
    /// radix-p decimation in time.
    fn dft(&self, v: &[Scalar], sign: i64) -> Vec<Scalar> {
        let p = self.ctx.params.p as usize;
        let size = v.len();
        if size == 1 {
            return v.to_vec();
        }
        let q = size / p;
        // sub-DFTs of the residue-class subsequences
        let subs: Vec<Vec<Scalar>> = (0..p)
            .map(|r| {
                let sub: Vec<Scalar> = (0..q).map(|j| v[p * j + r].clone()).collect();
                self.dft(&sub, sign)
            })
            .collect();
        let mut out = vec![Scalar::zero(&self.ctx); size];
        for (k, slot) in out.iter_mut().enumerate() {
            let mut acc = Scalar::zero(&self.ctx);
            for (r, sub) in subs.iter().enumerate() {
                let term = sub[k % q]
                    .mul_root(size as u64, sign * (r as i64) * (k as i64))
                    .expect("grid root inside ambient field");
                acc = acc.add(&term);
            }
            *slot = acc;
        }
        out
    }

    /// Apply one operator to a coefficient vector.
    pub fn apply(&self, op: &GridOp, v: &[Scalar]) -> Result<Vec<Scalar>> {
        let m = self.level as i32;
        match op {
            GridOp::Fourier | GridOp::FourierInv => {
                let sign = if matches!(op, GridOp::Fourier) { -1 } else { 1 };
                let scale = crate::cyclo::p_pow_rational(self.ctx.params.p, -(self.level as i32));
                Ok(self.dft(v, sign).into_iter().map(|c| c.scale(&scale)).collect())
            }
            GridOp::Cutoff(n) => {
                let mut out = v.to_vec();
                for (j, c) in out.iter_mut().enumerate() {
                    let keep = match self.cell_norm_exp(j as u64) {
                        None => true,
                        Some(ne) => ne <= *n,
                    };
                    if !keep {
                        *c = Scalar::zero(&self.ctx);
                    }
                }
                Ok(out)
            }
            GridOp::LogNorm => {
                let mut out = v.to_vec();
                for (j, c) in out.iter_mut().enumerate() {
                    if c.is_zero() {
                        continue;
                    }
                    match self.cell_norm_exp(j as u64) {
                        None => return Err(Error::NotSchwartzZero),
                        Some(ne) => {
                            *c = c.scale(&num::BigRational::from_integer(BigInt::from(ne)));
                        }
                    }
                }
                Ok(out)
            }
            GridOp::Smear(f) => {
                let func = self.to_function(v);
                let plain: Vec<(Ball, Scalar)> =
                    func.terms().iter().map(|t| (t.ball.clone(), t.coeff.clone())).collect();
                let smeared = smear_terms(&self.ctx, &plain, f);
                let result = BruhatFunction::new(
                    &self.ctx,
                    smeared.into_iter().map(|(ball, coeff)| Term { ball, coeff }).collect(),
                );
                self.from_function(&result)
            }
        }
        .map(|out| {
            debug_assert_eq!(out.len(), v.len());
            let _ = m;
            out
        })
    }

    pub fn apply_chain(&self, ops: &[GridOp], v: &[Scalar]) -> Result<Vec<Scalar>> {
        let mut cur = v.to_vec();
        for op in ops {
            cur = self.apply(op, &cur)?;
        }
        Ok(cur)
    }

    /// Matrix of the composed chain on the orthonormal cell basis
    /// (column j = image of e_j); `cap` bounds the dimension.
    pub fn brute_matrix(&self, ops: &[GridOp], cap: u64) -> Result<Vec<Vec<Scalar>>> {
        let dim = self.dim();
        if dim > cap {
            return Err(Error::GridTooLarge(dim, cap));
        }
        (0..dim).map(|j| self.apply_chain(ops, &self.basis_vector(j))).collect()
    }

    pub fn matrix_trace(&self, mat: &[Vec<Scalar>]) -> Scalar {
        let mut acc = Scalar::zero(&self.ctx);
        for (j, col) in mat.iter().enumerate() {
            acc = acc.add(&col[j]);
        }
        acc
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::FieldParams;

    fn ctx(p: u32, n: u64) -> Arc<ScalarContext> {
        ScalarContext::new(FieldParams { p, f: 1, delta: 0 }, n)
    }

    #[test]
    fn double_fourier_is_parity_permutation() {
        for p in [2u32, 3] {
            let c = ctx(p, 4 * (p as u64).pow(5));
            let space = GridSpace::new(&c, 1);
            let mat = space.brute_matrix(&[GridOp::Fourier, GridOp::Fourier], 1 << 10).unwrap();
            let dim = space.dim() as usize;
            for j in 0..dim {
                for i in 0..dim {
                    // parity: cell j maps to cell of -center = (P - j) mod P
                    let target = (dim - j) % dim;
                    let expected = if i == target { Scalar::one(&c) } else { Scalar::zero(&c) };
                    assert_eq!(mat[j][i], expected, "p={} i={} j={}", p, i, j);
                }
            }
        }
    }

    #[test]
    fn fourier_matches_bruhat_grid_transform() {
        let c = ctx(3, 4 * 3u64.pow(5));
        let space = GridSpace::new(&c, 2);
        let f = BruhatFunction::indicator(
            &c,
            Ball::new(PRat::new(3, 2.into(), 1), 1),
            Scalar::root_of_unity(&c, 9, 2).unwrap(),
        );
        let v = space.from_function(&f).unwrap();
        let w = space.apply(&GridOp::Fourier, &v).unwrap();
        let via_grid = f.fourier().unwrap();
        assert!(space.to_function(&w).equals(&via_grid));
        // and the inverse undoes it
        let back = space.apply(&GridOp::FourierInv, &w).unwrap();
        assert!(space.to_function(&back).equals(&f));
    }

    #[test]
    fn cutoff_matrix_is_diagonal_with_expected_rank() {
        let c = ctx(2, 4 * 2u64.pow(4));
        let space = GridSpace::new(&c, 2);
        let mat = space.brute_matrix(&[GridOp::Cutoff(0)], 1 << 10).unwrap();
        let dim = space.dim() as usize;
        let mut rank = 0;
        for j in 0..dim {
            for i in 0..dim {
                if i == j {
                    if mat[j][i].is_one() {
                        rank += 1;
                    } else {
                        assert!(mat[j][i].is_zero());
                    }
                } else {
                    assert!(mat[j][i].is_zero());
                }
            }
        }
        // cells inside Z_p: p^M of them
        assert_eq!(rank, 2u32.pow(2));
    }

    #[test]
    fn smear_leak_detection() {
        let c = ctx(2, 4 * 2u64.pow(6));
        let space = GridSpace::new(&c, 1);
        let f = MultFunction::indicator_sphere(&c, 3); // pushes support out by 2^3
        let v = space.basis_vector(3);
        assert!(matches!(space.apply(&GridOp::Smear(f), &v), Err(Error::GridLeak)));
        // |t| = 1 smear stays inside
        let g = MultFunction::indicator_units(&c);
        assert!(space.apply(&GridOp::Smear(g), &v).is_ok());
    }

    #[test]
    fn log_norm_rejects_zero_cell() {
        let c = ctx(2, 4 * 2u64.pow(4));
        let space = GridSpace::new(&c, 1);
        assert!(space.apply(&GridOp::LogNorm, &space.basis_vector(0)).is_err());
        let v = space.apply(&GridOp::LogNorm, &space.basis_vector(2)).unwrap();
        // cell 2 = 2/p^1 = 1: |1| = 1: log|x| = 0
        assert!(v[2].is_zero());
        let w = space.apply(&GridOp::LogNorm, &space.basis_vector(1)).unwrap();
        // cell 1 = 1/2: norm exponent 1... |1/2|_2 = 2: log = 1 * log q
        assert_eq!(w[1], Scalar::one(&c));
    }
}
