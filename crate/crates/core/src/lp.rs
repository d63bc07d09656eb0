//! Dense two-phase simplex with Bland's rule, generic over the number type.
//!
//! `f64` gives a fast approximate solver; [`BigRational`] gives exact answers.

use std::fmt::Debug;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

/// Arithmetic needed by the simplex method.
pub trait Field: Clone + Debug + PartialOrd {
    fn zero() -> Self;
    fn one() -> Self;
    fn is_zero(&self) -> bool;
    fn is_pos(&self) -> bool;
    fn is_neg(&self) -> bool;
    fn add(&self, other: &Self) -> Self;
    fn sub(&self, other: &Self) -> Self;
    fn mul(&self, other: &Self) -> Self;
    fn div(&self, other: &Self) -> Self;
    fn neg(&self) -> Self;
    /// `self -= a * b`
    fn sub_mul(&mut self, a: &Self, b: &Self);
    fn to_f64(&self) -> f64;
}

/// Pivot tolerance for the floating-point solver.
pub const F64_EPS: f64 = 1e-11;

impl Field for f64 {
    fn zero() -> Self {
        0.0
    }
    fn one() -> Self {
        1.0
    }
    fn is_zero(&self) -> bool {
        self.abs() <= F64_EPS
    }
    fn is_pos(&self) -> bool {
        *self > F64_EPS
    }
    fn is_neg(&self) -> bool {
        *self < -F64_EPS
    }
    fn add(&self, o: &Self) -> Self {
        self + o
    }
    fn sub(&self, o: &Self) -> Self {
        self - o
    }
    fn mul(&self, o: &Self) -> Self {
        self * o
    }
    fn div(&self, o: &Self) -> Self {
        self / o
    }
    fn neg(&self) -> Self {
        -self
    }
    fn sub_mul(&mut self, a: &Self, b: &Self) {
        *self -= a * b;
    }
    fn to_f64(&self) -> f64 {
        *self
    }
}

impl Field for BigRational {
    fn zero() -> Self {
        Zero::zero()
    }
    fn one() -> Self {
        One::one()
    }
    fn is_zero(&self) -> bool {
        Zero::is_zero(self)
    }
    fn is_pos(&self) -> bool {
        self.is_positive()
    }
    fn is_neg(&self) -> bool {
        self.is_negative()
    }
    fn add(&self, o: &Self) -> Self {
        self + o
    }
    fn sub(&self, o: &Self) -> Self {
        self - o
    }
    fn mul(&self, o: &Self) -> Self {
        self * o
    }
    fn div(&self, o: &Self) -> Self {
        self / o
    }
    fn neg(&self) -> Self {
        -self
    }
    fn sub_mul(&mut self, a: &Self, b: &Self) {
        *self -= a * b;
    }
    fn to_f64(&self) -> f64 {
        ToPrimitive::to_f64(self).unwrap_or(f64::NAN)
    }
}

/// Exact rational from an integer.
pub fn int(n: i64) -> BigRational {
    BigRational::from_integer(BigInt::from(n))
}

/// Exact rational `n / d`.
pub fn ratio(n: i64, d: i64) -> BigRational {
    BigRational::new(BigInt::from(n), BigInt::from(d))
}

/// Exact rational equal to the binary value of `x`.
pub fn exact_from_f64(x: f64) -> BigRational {
    BigRational::from_float(x).expect("finite value")
}

#[derive(Debug, Clone, PartialEq)]
pub enum LpOutcome<T> {
    Optimal { x: Vec<T>, value: T },
    Infeasible,
    Unbounded,
}

impl<T> LpOutcome<T> {
    pub fn is_feasible(&self) -> bool {
        !matches!(self, LpOutcome::Infeasible)
    }
}

/// `maximize c·x subject to A x <= b`, with `free[j]` marking unrestricted
/// variables (the rest are constrained to be nonnegative).
#[derive(Debug, Clone)]
pub struct Lp<T> {
    pub objective: Vec<T>,
    pub rows: Vec<Vec<T>>,
    pub rhs: Vec<T>,
    pub free: Vec<bool>,
}

impl<T: Field> Lp<T> {
    pub fn new(n: usize, all_free: bool) -> Self {
        Self {
            objective: vec![T::zero(); n],
            rows: Vec::new(),
            rhs: Vec::new(),
            free: vec![all_free; n],
        }
    }

    pub fn push(&mut self, coeffs: Vec<T>, rhs: T) {
        assert_eq!(coeffs.len(), self.objective.len());
        self.rows.push(coeffs);
        self.rhs.push(rhs);
    }

    /// Adds `coeffs · x = rhs` as two inequalities.
    pub fn push_eq(&mut self, coeffs: Vec<T>, rhs: T) {
        let neg = coeffs.iter().map(|c| c.neg()).collect();
        self.push(coeffs, rhs.clone());
        self.push(neg, rhs.neg());
    }

    pub fn solve(&self) -> LpOutcome<T> {
        solve(self)
    }
}

struct Tableau<T> {
    /// Constraint rows; the last entry of each is the right-hand side.
    rows: Vec<Vec<T>>,
    /// Reduced costs `z_j - c_j`; last entry is the objective value.
    obj: Vec<T>,
    basis: Vec<usize>,
    ncols: usize,
}

impl<T: Field> Tableau<T> {
    fn pivot(&mut self, r: usize, e: usize) {
        let piv = self.rows[r][e].clone();
        for v in self.rows[r].iter_mut() {
            if !v.is_zero() {
                *v = v.div(&piv);
            }
        }
        self.rows[r][e] = T::one();
        let prow = std::mem::take(&mut self.rows[r]);
        let nz: Vec<usize> = (0..prow.len()).filter(|&j| !prow[j].is_zero()).collect();
        for (i, row) in self.rows.iter_mut().enumerate() {
            if i == r || row[e].is_zero() {
                continue;
            }
            let f = row[e].clone();
            for &j in &nz {
                row[j].sub_mul(&f, &prow[j]);
            }
            row[e] = T::zero();
        }
        if !self.obj[e].is_zero() {
            let f = self.obj[e].clone();
            for &j in &nz {
                self.obj[j].sub_mul(&f, &prow[j]);
            }
            self.obj[e] = T::zero();
        }
        self.rows[r] = prow;
        self.basis[r] = e;
    }

    /// Runs primal simplex over columns `< allowed`. Returns false if unbounded.
    fn run(&mut self, allowed: usize) -> bool {
        let rhs = self.ncols;
        loop {
            let Some(e) = (0..allowed).find(|&j| self.obj[j].is_neg()) else {
                return true;
            };
            let mut best: Option<(usize, T)> = None;
            for (i, row) in self.rows.iter().enumerate() {
                if !row[e].is_pos() {
                    continue;
                }
                let ratio = row[rhs].div(&row[e]);
                let better = match &best {
                    None => true,
                    Some((bi, br)) => {
                        ratio < *br || (!(*br < ratio) && self.basis[i] < self.basis[*bi])
                    }
                };
                if better {
                    best = Some((i, ratio));
                }
            }
            match best {
                Some((r, _)) => self.pivot(r, e),
                None => return false,
            }
        }
    }

    fn set_objective(&mut self, cost: &[T]) {
        let mut obj: Vec<T> = (0..=self.ncols)
            .map(|j| if j < cost.len() { cost[j].neg() } else { T::zero() })
            .collect();
        for (row, &b) in self.rows.iter().zip(&self.basis) {
            let cb = if b < cost.len() { &cost[b] } else { continue };
            if cb.is_zero() {
                continue;
            }
            for (o, v) in obj.iter_mut().zip(row) {
                if !v.is_zero() {
                    *o = o.add(&cb.mul(v));
                }
            }
        }
        self.obj = obj;
    }
}

fn solve<T: Field>(lp: &Lp<T>) -> LpOutcome<T> {
    let n = lp.objective.len();
    let m = lp.rows.len();
    // structural column layout: x_j^+ then x_j^- for free variables
    let mut col_of = Vec::with_capacity(n);
    let mut ns = 0;
    for &f in &lp.free {
        col_of.push(ns);
        ns += if f { 2 } else { 1 };
    }
    let n_art = lp.rhs.iter().filter(|b| b.is_neg()).count();
    let ncols = ns + m + n_art;
    let mut rows = Vec::with_capacity(m);
    let mut basis = Vec::with_capacity(m);
    let mut art = ns + m;
    for (i, (a, b)) in lp.rows.iter().zip(&lp.rhs).enumerate() {
        let mut row = vec![T::zero(); ncols + 1];
        let flip = b.is_neg();
        for (j, v) in a.iter().enumerate() {
            if v.is_zero() {
                continue;
            }
            let v = if flip { v.neg() } else { v.clone() };
            if lp.free[j] {
                row[col_of[j] + 1] = v.neg();
            }
            row[col_of[j]] = v;
        }
        if flip {
            row[ns + i] = T::one().neg();
            row[art] = T::one();
            row[ncols] = b.neg();
            basis.push(art);
            art += 1;
        } else {
            row[ns + i] = T::one();
            row[ncols] = b.clone();
            basis.push(ns + i);
        }
        rows.push(row);
    }
    let mut t = Tableau {
        rows,
        obj: Vec::new(),
        basis,
        ncols,
    };

    let real = ns + m;
    if n_art > 0 {
        let mut cost = vec![T::zero(); ncols];
        for c in cost.iter_mut().skip(real) {
            *c = T::one().neg();
        }
        t.set_objective(&cost);
        t.run(ncols);
        if t.obj[ncols].is_neg() {
            return LpOutcome::Infeasible;
        }
        // drive remaining artificials out of the basis
        let mut i = 0;
        while i < t.rows.len() {
            if t.basis[i] >= real {
                match (0..real).find(|&j| !t.rows[i][j].is_zero()) {
                    Some(j) => {
                        t.pivot(i, j);
                        i += 1;
                    }
                    None => {
                        t.rows.remove(i);
                        t.basis.remove(i);
                    }
                }
            } else {
                i += 1;
            }
        }
    }

    let mut cost = vec![T::zero(); ncols];
    for (j, c) in lp.objective.iter().enumerate() {
        cost[col_of[j]] = c.clone();
        if lp.free[j] {
            cost[col_of[j] + 1] = c.neg();
        }
    }
    t.set_objective(&cost);
    if !t.run(real) {
        return LpOutcome::Unbounded;
    }

    let mut vals = vec![T::zero(); ncols];
    for (row, &b) in t.rows.iter().zip(&t.basis) {
        vals[b] = row[ncols].clone();
    }
    let x = (0..n)
        .map(|j| {
            if lp.free[j] {
                vals[col_of[j]].sub(&vals[col_of[j] + 1])
            } else {
                vals[col_of[j]].clone()
            }
        })
        .collect();
    LpOutcome::Optimal {
        x,
        value: t.obj[ncols].clone(),
    }
}
