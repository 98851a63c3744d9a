//! Schwartz-Bruhat functions on Q_p: finite combinations of ball
//! indicators, with exact integration, Fourier transform (finite character
//! sum on a canonical grid), inversion, dilation and multiplication by
//! log|x|.
//!
//! The additive picture is concrete: it requires f = 1 and delta = 0, so
//! the self-dual measure gives every ball `c + p^r Z_p` volume `p^{-r}`.

use crate::error::{Error, Result};
use crate::localfield::phi_p_pow;
use crate::mult::MultFunction;
use crate::padic::{p_pow, Ball, BallRelation, PRat};
use crate::scalar::{Scalar, ScalarContext};
use num::bigint::BigInt;
use num::rational::BigRational;
use num::One;
use std::fmt;
use std::sync::Arc;

/// Cap on the number of grid cells a single function may be expanded into.
pub const GRID_CELL_CAP: u64 = 1 << 14;

#[derive(Clone)]
pub struct Term {
    pub ball: Ball,
    pub coeff: Scalar,
}

impl fmt::Debug for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?} on {:?}", self.coeff, self.ball)
    }
}

/// Locally constant, compactly supported function on Q_p.
#[derive(Clone, Debug)]
pub struct BruhatFunction {
    ctx: Arc<ScalarContext>,
    terms: Vec<Term>,
}

impl BruhatFunction {
    pub fn new(ctx: &Arc<ScalarContext>, terms: Vec<Term>) -> Self {
        assert!(ctx.params.concrete(), "additive picture requires f = 1, delta = 0");
        BruhatFunction { ctx: Arc::clone(ctx), terms }
    }

    pub fn zero(ctx: &Arc<ScalarContext>) -> Self {
        Self::new(ctx, Vec::new())
    }

    pub fn indicator(ctx: &Arc<ScalarContext>, ball: Ball, coeff: Scalar) -> Self {
        Self::new(ctx, vec![Term { ball, coeff }])
    }

    /// Indicator of Z_p (Tate's function omega).
    pub fn omega(ctx: &Arc<ScalarContext>) -> Self {
        Self::indicator(ctx, Ball::new(PRat::zero(ctx.params.p), 0), Scalar::one(ctx))
    }

    /// Indicator of the unit sphere |x| = 1.
    pub fn unit_sphere(ctx: &Arc<ScalarContext>) -> Self {
        let p = ctx.params.p;
        let one = Scalar::one(ctx);
        Self::new(
            ctx,
            vec![
                Term { ball: Ball::new(PRat::zero(p), 0), coeff: one.clone() },
                Term { ball: Ball::new(PRat::zero(p), 1), coeff: one.neg() },
            ],
        )
    }

    pub fn ctx(&self) -> &Arc<ScalarContext> {
        &self.ctx
    }

    pub fn terms(&self) -> &[Term] {
        &self.terms
    }

    pub fn p(&self) -> u32 {
        self.ctx.params.p
    }

    pub fn add(&self, other: &Self) -> Self {
        let mut terms = self.terms.clone();
        terms.extend(other.terms.iter().cloned());
        Self::new(&self.ctx, terms)
    }

    pub fn neg(&self) -> Self {
        let terms =
            self.terms.iter().map(|t| Term { ball: t.ball.clone(), coeff: t.coeff.neg() }).collect();
        Self::new(&self.ctx, terms)
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.neg())
    }

    pub fn scale(&self, s: &Scalar) -> Self {
        let terms = self
            .terms
            .iter()
            .map(|t| Term { ball: t.ball.clone(), coeff: t.coeff.mul(s) })
            .collect();
        Self::new(&self.ctx, terms)
    }

    pub fn eval(&self, x: &PRat) -> Scalar {
        let mut acc = Scalar::zero(&self.ctx);
        for t in &self.terms {
            if t.ball.contains_point(x) {
                acc = acc.add(&t.coeff);
            }
        }
        acc
    }

    /// Canonical disjoint form: pairwise disjoint balls, no zero
    /// coefficients, maximal merging of complete sibling sets.
    pub fn normalize(&self) -> Self {
        let mut disjoint: Vec<Term> = Vec::new();
        for t in &self.terms {
            if t.coeff.is_zero() {
                continue;
            }
            insert_disjoint(&mut disjoint, t.ball.clone(), t.coeff.clone());
        }
        disjoint.retain(|t| !t.coeff.is_zero());
        merge_siblings(&mut disjoint, self.p());
        disjoint.sort_by(|a, b| a.ball.sort_key().cmp(&b.ball.sort_key()));
        Self::new(&self.ctx, disjoint)
    }

    pub fn is_zero(&self) -> bool {
        self.normalize().terms.is_empty()
    }

    pub fn equals(&self, other: &Self) -> bool {
        self.sub(other).is_zero()
    }

    /// Member of S_0: vanishes in a neighborhood of the origin.
    pub fn is_schwartz_zero(&self) -> bool {
        self.normalize().terms.iter().all(|t| !t.ball.contains_zero())
    }

    /// Support contained in |x| <= p^k.
    pub fn supported_in(&self, k: i32) -> bool {
        self.normalize().terms.iter().all(|t| t.ball.sup_norm_exp() <= k)
    }

    /// Exact integral with respect to the self-dual measure.
    pub fn integral(&self) -> Scalar {
        let mut acc = Scalar::zero(&self.ctx);
        for t in &self.terms {
            acc = acc.add(&t.coeff.scale(&p_pow_rat(self.p(), -t.ball.rexp)));
        }
        acc
    }

    /// <self | other> = integral of conj(self) * other.
    pub fn inner_product(&self, other: &Self) -> Scalar {
        let mut acc = Scalar::zero(&self.ctx);
        for t1 in &self.terms {
            for t2 in &other.terms {
                if let Some(cap) = t1.ball.intersect(&t2.ball) {
                    let v = t1.coeff.conj().mul(&t2.coeff).scale(&p_pow_rat(self.p(), -cap.rexp));
                    acc = acc.add(&v);
                }
            }
        }
        acc
    }

    pub fn norm_sq(&self) -> Scalar {
        self.inner_product(self)
    }

    /// phi(x) -> phi(-x).
    pub fn parity(&self) -> Self {
        let terms = self
            .terms
            .iter()
            .map(|t| Term {
                ball: Ball::new(t.ball.center.neg(), t.ball.rexp),
                coeff: t.coeff.clone(),
            })
            .collect();
        Self::new(&self.ctx, terms)
    }

    /// U(t): phi(x) -> |t|^{-1/2} phi(x/t).
    pub fn dilate(&self, t: &PRat) -> Self {
        let m = t.norm_exp().expect("dilation by zero");
        let factor = Scalar::sqrt_q_pow(&self.ctx, -m);
        let terms = self
            .terms
            .iter()
            .map(|t0| Term { ball: t0.ball.dilate(t), coeff: t0.coeff.mul(&factor) })
            .collect();
        Self::new(&self.ctx, terms)
    }

    /// Dilation by the grid point t = u * p^{-m} (|t| = p^m).
    pub fn dilate_by(&self, m: i32, u: i64) -> Self {
        self.dilate(&PRat::unit_times_p_pow(self.p(), u, m))
    }

    /// The inversion I: phi(x) -> (1/|x|) phi(1/x); needs phi in S_0.
    pub fn invert_variable(&self) -> Result<Self> {
        let norm = self.normalize();
        let mut terms = Vec::with_capacity(norm.terms.len());
        for t in &norm.terms {
            let m = t.ball.norm_exp().ok_or(Error::NotSchwartzZero)?;
            let ball = t.ball.invert().unwrap();
            terms.push(Term { ball, coeff: t.coeff.scale(&p_pow_rat(self.p(), m)) });
        }
        Ok(Self::new(&self.ctx, terms))
    }

    /// Multiplication by log|x| in units of log q; needs phi in S_0.
    pub fn apply_log_norm(&self) -> Result<Self> {
        let norm = self.normalize();
        let mut terms = Vec::with_capacity(norm.terms.len());
        for t in &norm.terms {
            let m = t.ball.norm_exp().ok_or(Error::NotSchwartzZero)?;
            if m == 0 {
                continue;
            }
            terms.push(Term {
                ball: t.ball.clone(),
                coeff: t.coeff.scale(&BigRational::from_integer(BigInt::from(m))),
            });
        }
        Ok(Self::new(&self.ctx, terms))
    }

    /// Smallest grid (a, b): support in p^{-a} Z_p, constant on p^b cosets.
    pub fn grid_bounds(&self) -> (i32, i32) {
        let mut a = 0i32;
        let mut b = 0i32;
        for t in &self.terms {
            a = a.max(t.ball.sup_norm_exp());
            b = b.max(t.ball.rexp);
        }
        (a, b)
    }

    /// Expand onto the canonical grid; index j holds the cell j*p^{-a} + p^b Z_p.
    pub fn to_grid(&self, min_a: i32, min_b: i32) -> Result<GridForm> {
        let (a0, b0) = self.grid_bounds();
        let a = a0.max(min_a);
        let mut b = b0.max(min_b);
        if a + b < 0 {
            b = -a;
        }
        let p = self.p();
        let size = (p as u64).checked_pow((a + b) as u32).ok_or(Error::GridTooLarge(u64::MAX, GRID_CELL_CAP))?;
        if size > GRID_CELL_CAP {
            return Err(Error::GridTooLarge(size, GRID_CELL_CAP));
        }
        let mut coeffs = vec![Scalar::zero(&self.ctx); size as usize];
        let modulus = BigInt::from(size);
        for t in &self.terms {
            for cell in t.ball.cells_at_level(b) {
                // index: center / p^{-a} mod p^{a+b}
                let scaled = cell.center.mul_p_pow(a);
                debug_assert!(scaled.den_exp() <= 0);
                let j_big = (scaled.numerator() * p_pow(p, (-scaled.den_exp()) as u32))
                    .modpow(&BigInt::one(), &modulus);
                let j: u64 = (&j_big).try_into().unwrap();
                coeffs[j as usize] = coeffs[j as usize].add(&t.coeff);
            }
        }
        Ok(GridForm { ctx: Arc::clone(&self.ctx), a, b, coeffs })
    }

    /// Exact Fourier transform F(phi)(x) = integral of phi(y) lambda(-xy) dy,
    /// computed as the finite character sum on the canonical grid.
    pub fn fourier(&self) -> Result<Self> {
        Ok(self.fourier_grid(0, 0)?.to_function())
    }

    pub fn fourier_grid(&self, min_a: i32, min_b: i32) -> Result<GridForm> {
        let g = self.to_grid(min_a, min_b)?;
        g.fourier()
    }

    pub fn fourier_inv(&self) -> Result<Self> {
        Ok(self.parity().fourier()?)
    }

    /// Smeared dilation U(f) = integral of f(t) U(t) d^x t, in units of
    /// log q. Exact: each coset of the multiplicative grid is refined until
    /// the dilated image of every ball is a single ball.
    pub fn smear_dilate(&self, f: &MultFunction) -> Self {
        let plain: Vec<(Ball, Scalar)> =
            self.terms.iter().map(|t| (t.ball.clone(), t.coeff.clone())).collect();
        let out = smear_terms(&self.ctx, &plain, f);
        Self::new(&self.ctx, out.into_iter().map(|(ball, coeff)| Term { ball, coeff }).collect())
    }

    /// f(t) = a |t|^{1/2} phi(t) on the multiplicative grid; needs phi in S_0.
    pub fn to_mult(&self) -> Result<MultFunction> {
        let norm = self.normalize();
        let mut cells = Vec::new();
        let mut level = 0u32;
        for t in &norm.terms {
            let m = t.ball.norm_exp().ok_or(Error::NotSchwartzZero)?;
            let e_cell = (t.ball.rexp + m) as u32; // == r - v(c) >= 1
            level = level.max(e_cell);
            let u = t.ball.center.unit_residue(e_cell);
            let u: u64 = (&u).try_into().unwrap();
            let value = Scalar::a(&self.ctx)
                .mul(&Scalar::sqrt_q_pow(&self.ctx, m))
                .mul(&t.coeff);
            cells.push((m, u, e_cell, value));
        }
        let mut f = MultFunction::new(&self.ctx, level);
        for (m, u, e_cell, value) in cells {
            for u_ref in crate::mult::refine_residue(self.p(), u, e_cell, level) {
                f.set(m, u_ref as i64, value.clone())?;
            }
        }
        Ok(f)
    }

    /// Inverse of `to_mult`: phi(x) = f(x) / (a |x|^{1/2}).
    pub fn from_mult(f: &MultFunction) -> Result<Self> {
        let ctx = Arc::clone(f.ctx());
        let f = f.refine(f.level().max(1));
        let a_inv = Scalar::a(&ctx).try_invert()?;
        let p = ctx.params.p;
        let mut terms = Vec::new();
        for ((m, u), value) in f.entries() {
            let ball = Ball::new(
                PRat::unit_times_p_pow(p, *u as i64, *m),
                f.level() as i32 - m,
            );
            let coeff = value.mul(&a_inv).mul(&Scalar::sqrt_q_pow(&ctx, -m));
            terms.push(Term { ball, coeff });
        }
        Ok(Self::new(&ctx, terms))
    }

    /// Support cutoff to |x| <= p^n.
    pub fn cutoff(&self, n: i32) -> Self {
        let big = Ball::new(PRat::zero(self.p()), -n);
        let terms = self
            .terms
            .iter()
            .filter_map(|t| {
                t.ball.intersect(&big).map(|ball| Term { ball, coeff: t.coeff.clone() })
            })
            .collect();
        Self::new(&self.ctx, terms)
    }
}

fn p_pow_rat(p: u32, k: i32) -> BigRational {
    crate::cyclo::p_pow_rational(p, k)
}

fn insert_disjoint(list: &mut Vec<Term>, ball: Ball, coeff: Scalar) {
    let mut i = 0;
    while i < list.len() {
        match list[i].ball.relation(&ball) {
            BallRelation::Disjoint => {
                i += 1;
            }
            BallRelation::Equal => {
                list[i].coeff = list[i].coeff.add(&coeff);
                return;
            }
            BallRelation::Contains => {
                // split the stored ball one level and retry
                let old = list.swap_remove(i);
                for child in old.ball.children() {
                    list.push(Term { ball: child, coeff: old.coeff.clone() });
                }
                // restart scan: new entries are disjoint from each other
                i = 0;
            }
            BallRelation::Inside => {
                // split the incoming ball one level and insert the pieces
                for child in ball.children() {
                    insert_disjoint(list, child, coeff.clone());
                }
                return;
            }
        }
    }
    list.push(Term { ball, coeff });
}

fn merge_siblings(list: &mut Vec<Term>, p: u32) {
    loop {
        use std::collections::BTreeMap;
        let mut by_parent: BTreeMap<_, Vec<usize>> = BTreeMap::new();
        for (i, t) in list.iter().enumerate() {
            let parent = Ball::new(t.ball.center.clone(), t.ball.rexp - 1);
            by_parent.entry(parent.sort_key()).or_default().push(i);
        }
        let mut to_merge: Option<(Ball, Vec<usize>)> = None;
        for (_, idxs) in &by_parent {
            if idxs.len() == p as usize {
                let c0 = &list[idxs[0]].coeff;
                if idxs.iter().all(|&i| &list[i].coeff == c0) {
                    let parent = Ball::new(list[idxs[0]].ball.center.clone(), list[idxs[0]].ball.rexp - 1);
                    to_merge = Some((parent, idxs.clone()));
                    break;
                }
            }
        }
        match to_merge {
            None => return,
            Some((parent, idxs)) => {
                let coeff = list[idxs[0]].coeff.clone();
                let mut keep: Vec<Term> = Vec::with_capacity(list.len() + 1 - idxs.len());
                for (i, t) in list.drain(..).enumerate() {
                    if !idxs.contains(&i) {
                        keep.push(t);
                    }
                }
                keep.push(Term { ball: parent, coeff });
                *list = keep;
            }
        }
    }
}

/// U(f) applied to a list of plain ball terms; returns plain ball terms.
/// Carries the log q unit of the d^x measure.
pub(crate) fn smear_terms(
    ctx: &Arc<ScalarContext>,
    terms: &[(Ball, Scalar)],
    f: &MultFunction,
) -> Vec<(Ball, Scalar)> {
    let p = ctx.params.p;
    let mut out = Vec::new();
    for (ball, coeff) in terms {
        for ((m, u), value) in f.entries() {
            // refine the coset until the dilated ball is a single coset
            let needed = match ball.center.val() {
                None => 0,
                Some(v) => (ball.rexp - v).max(0),
            } as u32;
            let e_ref = needed.max(f.level());
            let weight = BigRational::new(BigInt::one(), BigInt::from(phi_p_pow(p, e_ref)));
            let scale = Scalar::sqrt_q_pow(ctx, -m).scale(&weight).mul(value);
            if scale.is_zero() {
                continue;
            }
            for u_ref in f.refine_residue(*u, e_ref) {
                let t = PRat::unit_times_p_pow(p, u_ref as i64, *m);
                out.push((ball.dilate(&t), coeff.mul(&scale)));
            }
        }
    }
    out
}

/// Canonical grid form: support in p^{-a} Z_p, constant on cosets of
/// p^b Z_p; `coeffs[j]` is the value on `j p^{-a} + p^b Z_p`.
#[derive(Clone, Debug)]
pub struct GridForm {
    ctx: Arc<ScalarContext>,
    pub a: i32,
    pub b: i32,
    pub coeffs: Vec<Scalar>,
}

impl GridForm {
    pub fn size(&self) -> usize {
        self.coeffs.len()
    }

    pub fn cell(&self, j: usize) -> Ball {
        let p = self.ctx.params.p;
        Ball::new(PRat::new(p, BigInt::from(j as u64), self.a), self.b)
    }

    pub fn to_function(&self) -> BruhatFunction {
        let terms = self
            .coeffs
            .iter()
            .enumerate()
            .filter(|(_, c)| !c.is_zero())
            .map(|(j, c)| Term { ball: self.cell(j), coeff: c.clone() })
            .collect();
        BruhatFunction::new(&self.ctx, terms)
    }

    /// The finite character sum of size p^{a+b}: output grid is (b, a).
    pub fn fourier(&self) -> Result<GridForm> {
        let p = self.ctx.params.p;
        let size = self.coeffs.len() as u64;
        let vol = p_pow_rat(p, -self.b);
        let mut out = vec![Scalar::zero(&self.ctx); self.coeffs.len()];
        for (i, slot) in out.iter_mut().enumerate() {
            // F(phi)(x_i) with x_i = i p^{-b}: sum over cells j of
            // coeff_j vol lambda(-x_i c_j), lambda exponent -ij/p^{a+b}
            let mut acc = Scalar::zero(&self.ctx);
            for (j, c) in self.coeffs.iter().enumerate() {
                if c.is_zero() {
                    continue;
                }
                let e = ((i as u64 % size) * (j as u64 % size)) % size;
                acc = acc.add(&c.mul_root(size, -(e as i64)).expect("grid root inside field"));
            }
            *slot = acc.scale(&vol);
        }
        Ok(GridForm { ctx: Arc::clone(&self.ctx), a: self.b, b: self.a, coeffs: out })
    }
}
