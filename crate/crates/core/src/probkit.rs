//! Probability vectors, channel matrices and the mutual-information atoms
//! that every rate-region formula is assembled from.
//!
//! All information quantities are in bits. `0 log 0` is taken as `0`.

use std::fmt;

use rand::Rng;
use rand_distr::{Distribution, Exp1};
use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Tolerance used when validating that entries sum to one.
pub const PROB_TOL: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ProbError {
    #[error("probability vector is empty")]
    Empty,
    #[error("entry {index} is {value}, expected a finite nonnegative number")]
    InvalidEntry { index: usize, value: f64 },
    #[error("entries sum to {sum}, expected 1 within {PROB_TOL:e}")]
    BadSum { sum: f64 },
    #[error("row {row}: {source}")]
    BadRow {
        row: usize,
        #[source]
        source: Box<ProbError>,
    },
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("support mismatch at index {index}: p > 0 where q = 0")]
    SupportMismatch { index: usize },
    #[error("private set must contain between 1 and K-1 receivers (K = {receivers}, |S| = {private})")]
    PrivateSetSize { receivers: usize, private: usize },
    #[error("receiver index {0} out of range")]
    ReceiverIndex(usize),
}

fn validate_entries(entries: &[f64]) -> Result<f64, ProbError> {
    if entries.is_empty() {
        return Err(ProbError::Empty);
    }
    let mut sum = 0.0;
    for (index, &value) in entries.iter().enumerate() {
        if !value.is_finite() || value < 0.0 {
            return Err(ProbError::InvalidEntry { index, value });
        }
        sum += value;
    }
    Ok(sum)
}

/// A probability mass function over a finite alphabet.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<f64>", into = "Vec<f64>")]
pub struct ProbVector(Vec<f64>);

impl ProbVector {
    pub fn new(entries: Vec<f64>) -> Result<Self, ProbError> {
        let sum = validate_entries(&entries)?;
        if (sum - 1.0).abs() > PROB_TOL {
            return Err(ProbError::BadSum { sum });
        }
        Ok(Self(entries))
    }

    /// Like [`ProbVector::new`] but rescales any positive total mass to one.
    pub fn normalized(mut entries: Vec<f64>) -> Result<Self, ProbError> {
        let sum = validate_entries(&entries)?;
        if sum <= 0.0 {
            return Err(ProbError::BadSum { sum });
        }
        entries.iter_mut().for_each(|p| *p /= sum);
        Ok(Self(entries))
    }

    pub fn uniform(n: usize) -> Self {
        assert!(n > 0, "uniform distribution over an empty alphabet");
        Self(vec![1.0 / n as f64; n])
    }

    /// Point mass on `index`.
    pub fn point(n: usize, index: usize) -> Self {
        assert!(index < n);
        let mut v = vec![0.0; n];
        v[index] = 1.0;
        Self(v)
    }

    /// Sample from the flat Dirichlet distribution on the simplex.
    pub fn random<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Self {
        let mut v: Vec<f64> = (0..n).map(|_| Exp1.sample(rng)).collect();
        let sum: f64 = v.iter().sum();
        v.iter_mut().for_each(|p| *p /= sum);
        Self(v)
    }

    /// Builds from entries already known to lie on the simplex (up to rounding).
    pub(crate) fn from_simplex(mut entries: Vec<f64>) -> Self {
        let sum: f64 = entries.iter().map(|p| p.max(0.0)).sum();
        entries.iter_mut().for_each(|p| *p = p.max(0.0) / sum);
        Self(entries)
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }

    /// Convex combination `w * self + (1 - w) * other`.
    pub fn mix(&self, other: &ProbVector, w: f64) -> ProbVector {
        assert_eq!(self.len(), other.len());
        let v = self
            .0
            .iter()
            .zip(&other.0)
            .map(|(a, b)| w * a + (1.0 - w) * b)
            .collect();
        Self::from_simplex(v)
    }
}

impl TryFrom<Vec<f64>> for ProbVector {
    type Error = ProbError;

    fn try_from(v: Vec<f64>) -> Result<Self, Self::Error> {
        Self::new(v)
    }
}

impl From<ProbVector> for Vec<f64> {
    fn from(p: ProbVector) -> Self {
        p.0
    }
}

impl std::ops::Index<usize> for ProbVector {
    type Output = f64;

    fn index(&self, i: usize) -> &f64 {
        &self.0[i]
    }
}

/// Shannon entropy in bits of a validated distribution.
pub fn entropy(p: &ProbVector) -> f64 {
    entropy_raw(p.as_slice())
}

pub(crate) fn entropy_raw(p: &[f64]) -> f64 {
    p.iter()
        .filter(|&&x| x > 0.0)
        .map(|&x| -x * x.log2())
        .sum()
}

/// Binary entropy function.
pub fn binary_entropy(x: f64) -> f64 {
    entropy_raw(&[x, 1.0 - x])
}

/// `D(p || q)` in bits. A positive `p` against a zero `q` is a support error.
pub fn relative_entropy(p: &ProbVector, q: &ProbVector) -> Result<f64, ProbError> {
    if p.len() != q.len() {
        return Err(ProbError::DimensionMismatch {
            expected: p.len(),
            found: q.len(),
        });
    }
    let mut d = 0.0;
    for (index, (&a, &b)) in p.0.iter().zip(&q.0).enumerate() {
        if a > 0.0 {
            if b <= 0.0 {
                return Err(ProbError::SupportMismatch { index });
            }
            d += a * (a / b).log2();
        }
    }
    Ok(d.max(0.0))
}

/// Row-stochastic matrix: entry `[x][y]` is `W(y|x)`.
#[derive(Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<Vec<f64>>", into = "Vec<Vec<f64>>")]
pub struct ChannelMatrix {
    rows: Vec<Vec<f64>>,
    row_entropy: Vec<f64>,
}

impl fmt::Debug for ChannelMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_list().entries(&self.rows).finish()
    }
}

impl ChannelMatrix {
    pub fn new(rows: Vec<Vec<f64>>) -> Result<Self, ProbError> {
        if rows.is_empty() {
            return Err(ProbError::Empty);
        }
        let width = rows[0].len();
        for (row, r) in rows.iter().enumerate() {
            if r.len() != width {
                return Err(ProbError::BadRow {
                    row,
                    source: Box::new(ProbError::DimensionMismatch {
                        expected: width,
                        found: r.len(),
                    }),
                });
            }
            let sum = validate_entries(r).map_err(|e| ProbError::BadRow {
                row,
                source: Box::new(e),
            })?;
            if (sum - 1.0).abs() > PROB_TOL {
                return Err(ProbError::BadRow {
                    row,
                    source: Box::new(ProbError::BadSum { sum }),
                });
            }
        }
        Ok(Self::from_rows_unchecked(rows))
    }

    /// Rescales every row to unit mass before validating.
    pub fn normalized(rows: Vec<Vec<f64>>) -> Result<Self, ProbError> {
        let rows = rows
            .into_iter()
            .enumerate()
            .map(|(row, r)| {
                ProbVector::normalized(r)
                    .map(Vec::from)
                    .map_err(|e| ProbError::BadRow {
                        row,
                        source: Box::new(e),
                    })
            })
            .collect::<Result<Vec<_>, _>>()?;
        Self::new(rows)
    }

    fn from_rows_unchecked(rows: Vec<Vec<f64>>) -> Self {
        let row_entropy = rows.iter().map(|r| entropy_raw(r)).collect();
        Self { rows, row_entropy }
    }

    pub fn from_prob_rows(rows: Vec<ProbVector>) -> Result<Self, ProbError> {
        Self::new(rows.into_iter().map(Vec::from).collect())
    }

    /// Binary symmetric channel with crossover `eps`.
    pub fn bsc(eps: f64) -> Self {
        Self::from_rows_unchecked(vec![vec![1.0 - eps, eps], vec![eps, 1.0 - eps]])
    }

    /// Binary erasure channel; output 2 is the erasure symbol.
    pub fn bec(e: f64) -> Self {
        Self::from_rows_unchecked(vec![vec![1.0 - e, 0.0, e], vec![0.0, 1.0 - e, e]])
    }

    pub fn identity(n: usize) -> Self {
        Self::from_rows_unchecked(
            (0..n)
                .map(|i| {
                    let mut r = vec![0.0; n];
                    r[i] = 1.0;
                    r
                })
                .collect(),
        )
    }

    /// Every input maps to the same output law.
    pub fn constant(inputs: usize, output: &ProbVector) -> Self {
        Self::from_rows_unchecked(vec![output.as_slice().to_vec(); inputs])
    }

    pub fn random<R: Rng + ?Sized>(inputs: usize, outputs: usize, rng: &mut R) -> Self {
        Self::from_rows_unchecked(
            (0..inputs)
                .map(|_| ProbVector::random(outputs, rng).into())
                .collect(),
        )
    }

    pub fn input_size(&self) -> usize {
        self.rows.len()
    }

    pub fn output_size(&self) -> usize {
        self.rows[0].len()
    }

    pub fn row(&self, x: usize) -> &[f64] {
        &self.rows[x]
    }

    pub fn rows(&self) -> &[Vec<f64>] {
        &self.rows
    }

    pub fn row_entropy(&self, x: usize) -> f64 {
        self.row_entropy[x]
    }

    /// Matrix product `self * other`: the cascade of the two channels.
    pub fn compose(&self, other: &ChannelMatrix) -> Result<ChannelMatrix, ProbError> {
        if self.output_size() != other.input_size() {
            return Err(ProbError::DimensionMismatch {
                expected: self.output_size(),
                found: other.input_size(),
            });
        }
        let m = other.output_size();
        let rows = self
            .rows
            .iter()
            .map(|r| {
                let mut out = vec![0.0; m];
                for (&a, o) in r.iter().zip(&other.rows) {
                    if a != 0.0 {
                        out.iter_mut().zip(o).for_each(|(t, &b)| *t += a * b);
                    }
                }
                normalize_row(out)
            })
            .collect();
        Ok(Self::from_rows_unchecked(rows))
    }

    /// Output distribution `p W`.
    pub fn output_dist(&self, p: &[f64]) -> Vec<f64> {
        let mut q = vec![0.0; self.output_size()];
        for (&px, r) in p.iter().zip(&self.rows) {
            if px != 0.0 {
                q.iter_mut().zip(r).for_each(|(t, &w)| *t += px * w);
            }
        }
        q
    }

    /// Relabels inputs: row `i` of the result is row `perm[i]` of `self`.
    pub fn permute_inputs(&self, perm: &[usize]) -> ChannelMatrix {
        Self::from_rows_unchecked(perm.iter().map(|&i| self.rows[i].clone()).collect())
    }

    /// Relabels outputs: column `j` of the result is column `perm[j]` of `self`.
    pub fn permute_outputs(&self, perm: &[usize]) -> ChannelMatrix {
        Self::from_rows_unchecked(
            self.rows
                .iter()
                .map(|r| perm.iter().map(|&j| r[j]).collect())
                .collect(),
        )
    }

    pub fn max_abs_diff(&self, other: &ChannelMatrix) -> f64 {
        self.rows
            .iter()
            .zip(&other.rows)
            .flat_map(|(a, b)| a.iter().zip(b).map(|(x, y)| (x - y).abs()))
            .fold(0.0, f64::max)
    }
}

fn normalize_row(mut r: Vec<f64>) -> Vec<f64> {
    let s: f64 = r.iter().sum();
    if s > 0.0 && (s - 1.0).abs() > 0.0 {
        r.iter_mut().for_each(|x| *x /= s);
    }
    r
}

impl TryFrom<Vec<Vec<f64>>> for ChannelMatrix {
    type Error = ProbError;

    fn try_from(rows: Vec<Vec<f64>>) -> Result<Self, Self::Error> {
        Self::new(rows)
    }
}

impl From<ChannelMatrix> for Vec<Vec<f64>> {
    fn from(w: ChannelMatrix) -> Self {
        w.rows
    }
}

fn check_input(p: &[f64], w: &ChannelMatrix) -> Result<(), ProbError> {
    if p.len() != w.input_size() {
        return Err(ProbError::DimensionMismatch {
            expected: w.input_size(),
            found: p.len(),
        });
    }
    Ok(())
}

/// `I(X;Y)` for input law `p` through channel `w`.
pub fn mutual_info(p: &ProbVector, w: &ChannelMatrix) -> Result<f64, ProbError> {
    check_input(p.as_slice(), w)?;
    Ok(mutual_info_raw(p.as_slice(), w))
}

pub(crate) fn mutual_info_raw(p: &[f64], w: &ChannelMatrix) -> f64 {
    let q = w.output_dist(p);
    let cond: f64 = p
        .iter()
        .enumerate()
        .filter(|(_, &px)| px > 0.0)
        .map(|(x, &px)| px * w.row_entropy(x))
        .sum();
    (entropy_raw(&q) - cond).max(0.0)
}

/// Gradient of `p -> I(p; w)` in bits: `D(w_x || pw) - log2 e` per input `x`.
pub fn mutual_info_gradient(p: &[f64], w: &ChannelMatrix) -> Vec<f64> {
    let q = w.output_dist(p);
    (0..w.input_size())
        .map(|x| {
            let d: f64 = w
                .row(x)
                .iter()
                .zip(&q)
                .filter(|(&a, _)| a > 0.0)
                .map(|(&a, &b)| a * (a / b.max(1e-300)).log2())
                .sum();
            d - std::f64::consts::LOG2_E
        })
        .collect()
}

/// Euclidean projection onto the probability simplex, in place.
pub fn project_simplex(v: &mut [f64]) {
    let mut sorted = v.to_vec();
    sorted.sort_by(|a, b| b.partial_cmp(a).unwrap());
    let mut cum = 0.0;
    let mut theta = 0.0;
    for (i, &u) in sorted.iter().enumerate() {
        cum += u;
        let t = (cum - 1.0) / (i + 1) as f64;
        if u - t > 0.0 {
            theta = t;
        }
    }
    v.iter_mut().for_each(|x| *x = (*x - theta).max(0.0));
}

/// Binary crossover convolution `a * (1 - b) + (1 - a) * b`.
pub fn binary_convolution(a: f64, b: f64) -> f64 {
    a * (1.0 - b) + (1.0 - a) * b
}

/// Coding distribution `p(u_K) p(u_{K-1}|u_K) ... p(x|u_{L+1})`.
///
/// Level 0 is the topmost auxiliary (the cloud center). With no kernels the
/// top vector is the input law itself and there are no auxiliaries.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MarkovChain {
    pub top: ProbVector,
    pub kernels: Vec<ChannelMatrix>,
}

impl MarkovChain {
    pub fn new(top: ProbVector, kernels: Vec<ChannelMatrix>) -> Result<Self, ProbError> {
        let mut width = top.len();
        for k in &kernels {
            if k.input_size() != width {
                return Err(ProbError::DimensionMismatch {
                    expected: width,
                    found: k.input_size(),
                });
            }
            width = k.output_size();
        }
        Ok(Self { top, kernels })
    }

    /// Chain with one auxiliary `U` and `p(x|u)`.
    pub fn superposition(pu: ProbVector, px_given_u: ChannelMatrix) -> Result<Self, ProbError> {
        Self::new(pu, vec![px_given_u])
    }

    /// Random chain with flat-Dirichlet top law and kernel rows.
    pub fn random<R: Rng + ?Sized>(cards: &[usize], input_size: usize, rng: &mut R) -> Self {
        assert!(!cards.is_empty());
        let top = ProbVector::random(cards[0], rng);
        let mut kernels = Vec::with_capacity(cards.len());
        for (i, &c) in cards.iter().enumerate() {
            let next = cards.get(i + 1).copied().unwrap_or(input_size);
            kernels.push(ChannelMatrix::random(c, next, rng));
        }
        Self { top, kernels }
    }

    /// Number of auxiliary levels.
    pub fn levels(&self) -> usize {
        self.kernels.len()
    }

    pub fn level_card(&self, level: usize) -> usize {
        if level == 0 {
            self.top.len()
        } else {
            self.kernels[level - 1].output_size()
        }
    }

    pub fn input_size(&self) -> usize {
        self.kernels
            .last()
            .map(|k| k.output_size())
            .unwrap_or(self.top.len())
    }

    /// Marginal law of auxiliary `level` (or of X when `level == levels()`).
    pub fn marginal(&self, level: usize) -> Vec<f64> {
        let mut p = self.top.as_slice().to_vec();
        for k in &self.kernels[..level] {
            p = k.output_dist(&p);
        }
        p
    }

    /// Conditional law `p(u_to | u_from)` for `from <= to`, where `to == levels()` is X.
    pub fn transition(&self, from: usize, to: usize) -> ChannelMatrix {
        assert!(from <= to && to <= self.levels());
        let mut m = ChannelMatrix::identity(self.level_card_or_x(from));
        for k in &self.kernels[from..to] {
            m = m.compose(k).expect("chain kernels are dimension-checked");
        }
        m
    }

    fn level_card_or_x(&self, level: usize) -> usize {
        if level == self.levels() {
            self.input_size()
        } else {
            self.level_card(level)
        }
    }

    /// Replaces every auxiliary by a copy of the one above it, so that
    /// `U_K = U_{K-1} = ... = U`. Used to embed a one-level code into deeper schemes.
    pub fn embed_constant(pu: ProbVector, px_given_u: ChannelMatrix, levels: usize) -> Self {
        assert!(levels >= 1);
        let card = pu.len();
        let mut kernels = vec![ChannelMatrix::identity(card); levels - 1];
        kernels.push(px_given_u);
        Self { top: pu, kernels }
    }
}

/// Joint law over `(U_0, ..., U_{n-1}, X)` in row-major order.
#[derive(Debug, Clone, PartialEq)]
pub struct JointDist {
    pub dims: Vec<usize>,
    pub probs: Vec<f64>,
}

impl JointDist {
    pub fn get(&self, index: &[usize]) -> f64 {
        assert_eq!(index.len(), self.dims.len());
        let flat = index
            .iter()
            .zip(&self.dims)
            .fold(0, |acc, (&i, &d)| acc * d + i);
        self.probs[flat]
    }

    pub fn marginal(&self, axis: usize) -> Vec<f64> {
        let mut out = vec![0.0; self.dims[axis]];
        let inner: usize = self.dims[axis + 1..].iter().product();
        for (flat, &p) in self.probs.iter().enumerate() {
            out[(flat / inner) % self.dims[axis]] += p;
        }
        out
    }
}

/// Product of the chain's kernels as an explicit joint table.
pub fn chain_joint(chain: &MarkovChain) -> Result<JointDist, ProbError> {
    let chain = MarkovChain::new(chain.top.clone(), chain.kernels.clone())?;
    let mut dims = vec![chain.top.len()];
    let mut probs = chain.top.as_slice().to_vec();
    for k in &chain.kernels {
        let m = k.output_size();
        let card = *dims.last().unwrap();
        let mut next = Vec::with_capacity(probs.len() * m);
        for (flat, &p) in probs.iter().enumerate() {
            let u = flat % card;
            next.extend(k.row(u).iter().map(|&w| p * w));
        }
        dims.push(m);
        probs = next;
    }
    Ok(JointDist { dims, probs })
}

/// Every mutual-information atom a rate-region formula can reference, for one
/// coding chain and one broadcast channel.
#[derive(Debug, Clone, PartialEq)]
pub struct MiTable {
    levels: usize,
    receivers: usize,
    /// `[a][i]`: I(U_a; Y_i)
    aux: Vec<Vec<f64>>,
    /// `[a][i]`: I(X; Y_i | U_a)
    x_given_aux: Vec<Vec<f64>>,
    /// `[i]`: I(X; Y_i)
    x: Vec<f64>,
    /// `[a][b][i]` for `b < a`: I(U_a; Y_i | U_b)
    aux_given_aux: Vec<Vec<Vec<f64>>>,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("mutual-information table has no atom {0}")]
pub struct MissingAtom(pub String);

impl MiTable {
    pub fn levels(&self) -> usize {
        self.levels
    }

    pub fn receivers(&self) -> usize {
        self.receivers
    }

    fn check(&self, what: &str, level: Option<usize>, rx: usize) -> Result<(), MissingAtom> {
        if rx >= self.receivers || level.is_some_and(|a| a >= self.levels) {
            return Err(MissingAtom(format!(
                "{what}(level {:?}, receiver {})",
                level,
                rx + 1
            )));
        }
        Ok(())
    }

    /// I(U_level; Y_rx)
    pub fn aux(&self, level: usize, rx: usize) -> Result<f64, MissingAtom> {
        self.check("I(U;Y)", Some(level), rx)?;
        Ok(self.aux[level][rx])
    }

    /// I(X; Y_rx | U_level)
    pub fn x_given(&self, level: usize, rx: usize) -> Result<f64, MissingAtom> {
        self.check("I(X;Y|U)", Some(level), rx)?;
        Ok(self.x_given_aux[level][rx])
    }

    /// I(X; Y_rx)
    pub fn x(&self, rx: usize) -> Result<f64, MissingAtom> {
        self.check("I(X;Y)", None, rx)?;
        Ok(self.x[rx])
    }

    /// I(U_level; Y_rx | U_above), `above < level`.
    pub fn aux_given(&self, level: usize, above: usize, rx: usize) -> Result<f64, MissingAtom> {
        self.check("I(U;Y|U)", Some(level), rx)?;
        if above >= level {
            return Err(MissingAtom(format!(
                "I(U;Y|U)(level {level} given {above})"
            )));
        }
        Ok(self.aux_given_aux[level][above][rx])
    }

    /// Checks nonnegativity, data processing and monotonicity of the conditional terms.
    pub fn check_invariants(&self, tol: f64) -> Result<(), String> {
        for i in 0..self.receivers {
            if self.x[i] < -tol {
                return Err(format!("I(X;Y{}) negative", i + 1));
            }
            for a in 0..self.levels {
                if self.aux[a][i] < -tol || self.x_given_aux[a][i] < -tol {
                    return Err(format!("negative atom at level {a}, receiver {}", i + 1));
                }
                if self.aux[a][i] > self.x[i] + tol {
                    return Err(format!("data processing fails at level {a}, receiver {}", i + 1));
                }
                if a > 0 && self.x_given_aux[a][i] > self.x_given_aux[a - 1][i] + tol {
                    return Err(format!(
                        "I(X;Y{}|U) not monotone between levels {} and {a}",
                        i + 1,
                        a - 1
                    ));
                }
            }
        }
        Ok(())
    }
}

/// Evaluates every atom of [`MiTable`] for `chain` against the receivers of `bc`.
pub fn eval_mi_table(
    chain: &MarkovChain,
    bc: &crate::BroadcastSpec,
) -> Result<MiTable, ProbError> {
    eval_mi_table_for(chain, bc.receivers())
}

pub(crate) fn eval_mi_table_for(
    chain: &MarkovChain,
    receivers: &[ChannelMatrix],
) -> Result<MiTable, ProbError> {
    let n = chain.input_size();
    if let Some(w) = receivers.iter().find(|w| w.input_size() != n) {
        return Err(ProbError::DimensionMismatch {
            expected: w.input_size(),
            found: n,
        });
    }
    let levels = chain.levels();
    let px = chain.marginal(levels);
    let x: Vec<f64> = receivers.iter().map(|w| mutual_info_raw(&px, w)).collect();

    let mut aux = Vec::with_capacity(levels);
    let mut x_given_aux = Vec::with_capacity(levels);
    let mut aux_given_aux = Vec::with_capacity(levels);
    // Composite channels U_a -> Y_i, kept for the conditional atoms of lower levels.
    let mut composites: Vec<Vec<ChannelMatrix>> = Vec::with_capacity(levels);
    let mut marginals: Vec<Vec<f64>> = Vec::with_capacity(levels);

    for a in 0..levels {
        let pa = chain.marginal(a);
        let to_x = chain.transition(a, levels);
        let comp: Vec<ChannelMatrix> = receivers
            .iter()
            .map(|w| to_x.compose(w).expect("dimensions checked"))
            .collect();
        aux.push(comp.iter().map(|c| mutual_info_raw(&pa, c)).collect());
        x_given_aux.push(
            receivers
                .iter()
                .map(|w| {
                    pa.iter()
                        .enumerate()
                        .filter(|(_, &p)| p > 0.0)
                        .map(|(u, &p)| p * mutual_info_raw(to_x.row(u), w))
                        .sum::<f64>()
                })
                .collect(),
        );
        let mut given = Vec::with_capacity(a);
        for (b, pb) in marginals.iter().enumerate() {
            let step = chain.transition(b, a);
            given.push(
                comp.iter()
                    .map(|c| {
                        pb.iter()
                            .enumerate()
                            .filter(|(_, &p)| p > 0.0)
                            .map(|(u, &p)| p * mutual_info_raw(step.row(u), c))
                            .sum::<f64>()
                    })
                    .collect(),
            );
        }
        aux_given_aux.push(given);
        composites.push(comp);
        marginals.push(pa);
    }

    Ok(MiTable {
        levels,
        receivers: receivers.len(),
        aux,
        x_given_aux,
        x,
        aux_given_aux,
    })
}
