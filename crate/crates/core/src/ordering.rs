//! Pairwise channel orderings between two receivers that share an input:
//! stochastic degradedness, less noisy, and more capable.
//!
//! Every test is phrased as "is `Y_s` at least as strong as `Y_c`".
//! Degradedness is an LP and exact up to [`DEGRADED_TOL`]. The other two are
//! universally quantified, so a positive answer is a search that found no
//! violation ("yes (sampled)"), while a negative answer carries a certificate
//! that is re-evaluated from the definition before it is reported.

use std::fmt;

use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::config::SearchConfig;
use crate::lp::{Lp, LpOutcome};
use crate::probkit::{
    mutual_info_gradient, mutual_info_raw, project_simplex, ChannelMatrix, ProbVector,
};
use crate::rng::stream2;
use crate::BroadcastSpec;

/// Residual allowed in `W_c = W_s Q`.
pub const DEGRADED_TOL: f64 = 1e-8;
/// Largest violation still read as floating-point noise.
pub const NOISE_TOL: f64 = 1e-12;
/// A "no" certificate must violate the definition by more than this.
pub const CERT_MARGIN: f64 = 1e-9;

const CHUNK: usize = 512;
const TAG_PAIRS: u64 = 0x4c4e_5041;
const TAG_LINES: u64 = 0x4c4e_4c49;
const TAG_REFINE: u64 = 0x4c4e_5245;
const TAG_GRID: u64 = 0x4d43_4752;
const MAX_GRID_POINTS: usize = 200_000;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum OrderingError {
    #[error("receivers have {0} and {1} inputs")]
    DimensionMismatch(usize, usize),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Relation {
    Degraded,
    LessNoisy,
    MoreCapable,
}

impl fmt::Display for Relation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Relation::Degraded => "degraded",
            Relation::LessNoisy => "less_noisy",
            Relation::MoreCapable => "more_capable",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Holds {
    /// Decided by an exact feasibility problem.
    Yes,
    /// No violation found within the sampling budget.
    YesSampled,
    No,
    /// Largest violation lies in the tie band.
    Undecided,
}

impl Holds {
    pub fn is_yes(self) -> bool {
        matches!(self, Holds::Yes | Holds::YesSampled)
    }
}

impl fmt::Display for Holds {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Holds::Yes => "yes",
            Holds::YesSampled => "yes (sampled)",
            Holds::No => "no",
            Holds::Undecided => "undecided",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum Certificate {
    /// Degrading kernel `Q` with `W_c ≈ W_s Q`.
    Kernel(ChannelMatrix),
    /// Binary `U` with `P(U=1) = weight`, `p(x|U=1) = p1`, `p(x|U=2) = p2`.
    BinaryAux {
        weight: f64,
        p1: ProbVector,
        p2: ProbVector,
    },
    /// Input law with `I(X;Y_c) > I(X;Y_s)`.
    Input(ProbVector),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Diagnostics {
    /// LP residual for degradedness, largest violation found otherwise.
    pub max_violation: f64,
    pub samples: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OrderVerdict {
    pub relation: Relation,
    pub holds: Holds,
    pub certificate: Option<Certificate>,
    pub diagnostics: Diagnostics,
}

impl OrderVerdict {
    /// Re-evaluates the certificate against the definition. Returns the
    /// violation for "no" certificates, or the residual for a kernel.
    pub fn certificate_value(&self, ws: &ChannelMatrix, wc: &ChannelMatrix) -> Option<f64> {
        match self.certificate.as_ref()? {
            Certificate::Kernel(q) => Some(ws.compose(q).ok()?.max_abs_diff(wc)),
            Certificate::BinaryAux { weight, p1, p2 } => Some(binary_aux_gap(*weight, p1, p2, ws, wc)),
            Certificate::Input(p) => {
                Some(mutual_info_raw(p.as_slice(), wc) - mutual_info_raw(p.as_slice(), ws))
            }
        }
    }
}

impl fmt::Display for OrderVerdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{}: {} (max violation {:.3e}, {} samples)",
            self.relation, self.holds, self.diagnostics.max_violation, self.diagnostics.samples
        )
    }
}

fn check_inputs(ws: &ChannelMatrix, wc: &ChannelMatrix) -> Result<(), OrderingError> {
    if ws.input_size() != wc.input_size() {
        return Err(OrderingError::DimensionMismatch(ws.input_size(), wc.input_size()));
    }
    Ok(())
}

/// `I(U;Y_c) - I(U;Y_s)` for the binary auxiliary described by the arguments.
fn binary_aux_gap(weight: f64, p1: &ProbVector, p2: &ProbVector, ws: &ChannelMatrix, wc: &ChannelMatrix) -> f64 {
    let pu = [weight, 1.0 - weight];
    let through = |w: &ChannelMatrix| {
        let rows = vec![w.output_dist(p1.as_slice()), w.output_dist(p2.as_slice())];
        ChannelMatrix::normalized(rows).expect("outputs of a channel are distributions")
    };
    mutual_info_raw(&pu, &through(wc)) - mutual_info_raw(&pu, &through(ws))
}

/// Whether `W_c = W_s Q` for some row-stochastic `Q`.
///
/// Minimizes the largest entrywise residual `t` over `Q`; holds iff `t <= 1e-8`.
pub fn is_degraded(ws: &ChannelMatrix, wc: &ChannelMatrix) -> Result<OrderVerdict, OrderingError> {
    check_inputs(ws, wc)?;
    let (nx, ns, nc) = (ws.input_size(), ws.output_size(), wc.output_size());
    let nq = ns * nc;
    let t = nq;
    let mut lp: Lp<f64> = Lp::new(nq + 1, false);
    lp.objective[t] = -1.0;
    for x in 0..nx {
        for y in 0..nc {
            let mut row = vec![0.0; nq + 1];
            for z in 0..ns {
                row[z * nc + y] = ws.row(x)[z];
            }
            let mut neg: Vec<f64> = row.iter().map(|v| -v).collect();
            row[t] = -1.0;
            neg[t] = -1.0;
            lp.push(row, wc.row(x)[y]);
            lp.push(neg, -wc.row(x)[y]);
        }
    }
    for z in 0..ns {
        let mut row = vec![0.0; nq + 1];
        row[z * nc..(z + 1) * nc].iter_mut().for_each(|v| *v = 1.0);
        lp.push_eq(row, 1.0);
    }
    let LpOutcome::Optimal { x, .. } = lp.solve() else {
        unreachable!("the degradedness LP is always feasible and bounded")
    };
    let q = ChannelMatrix::normalized(
        (0..ns)
            .map(|z| x[z * nc..(z + 1) * nc].iter().map(|v| v.max(0.0)).collect())
            .collect(),
    )
    .expect("LP rows sum to one");
    let residual = ws.compose(&q).expect("dimensions match").max_abs_diff(wc);
    let yes = residual <= DEGRADED_TOL;
    Ok(OrderVerdict {
        relation: Relation::Degraded,
        holds: if yes { Holds::Yes } else { Holds::No },
        certificate: yes.then_some(Certificate::Kernel(q)),
        diagnostics: Diagnostics {
            max_violation: residual,
            samples: 1,
        },
    })
}

/// A midpoint-concavity violation `λΔ(p1) + (1-λ)Δ(p2) - Δ(λp1 + (1-λ)p2)`.
#[derive(Debug, Clone)]
struct Candidate {
    value: f64,
    weight: f64,
    p1: Vec<f64>,
    p2: Vec<f64>,
}

impl Candidate {
    fn none() -> Self {
        Self {
            value: f64::NEG_INFINITY,
            weight: 0.5,
            p1: Vec::new(),
            p2: Vec::new(),
        }
    }

    fn better(self, other: Self) -> Self {
        if other.value > self.value {
            other
        } else {
            self
        }
    }
}

struct Gap<'a> {
    ws: &'a ChannelMatrix,
    wc: &'a ChannelMatrix,
}

impl Gap<'_> {
    /// `Δ(p) = I(p;W_s) - I(p;W_c)`
    fn delta(&self, p: &[f64]) -> f64 {
        mutual_info_raw(p, self.ws) - mutual_info_raw(p, self.wc)
    }

    fn candidate(&self, weight: f64, p1: Vec<f64>, p2: Vec<f64>) -> Candidate {
        let mid: Vec<f64> = p1
            .iter()
            .zip(&p2)
            .map(|(a, b)| weight * a + (1.0 - weight) * b)
            .collect();
        let value = weight * self.delta(&p1) + (1.0 - weight) * self.delta(&p2) - self.delta(&mid);
        Candidate {
            value,
            weight,
            p1,
            p2,
        }
    }
}

fn random_point<R: Rng>(n: usize, rng: &mut R) -> Vec<f64> {
    ProbVector::random(n, rng).as_slice().to_vec()
}

/// Random point on a random edge of the simplex.
fn edge_point<R: Rng>(n: usize, rng: &mut R) -> Vec<f64> {
    let a = rng.random_range(0..n);
    let b = (a + rng.random_range(1..n.max(2))) % n;
    let t: f64 = rng.random();
    let mut p = vec![0.0; n];
    p[a] += t;
    p[b] += 1.0 - t;
    p
}

fn sample_pair<R: Rng>(gap: &Gap<'_>, n: usize, rng: &mut R) -> Candidate {
    let kind: f64 = rng.random();
    let (p1, p2) = if kind < 0.6 || n < 2 {
        (random_point(n, rng), random_point(n, rng))
    } else if kind < 0.8 {
        let mut v = vec![0.0; n];
        v[rng.random_range(0..n)] = 1.0;
        (v, random_point(n, rng))
    } else {
        (edge_point(n, rng), edge_point(n, rng))
    };
    let weight = rng.random_range(0.02..0.98);
    gap.candidate(weight, p1, p2)
}

/// Scans second differences of Δ along a random chord of the simplex.
fn scan_line<R: Rng>(gap: &Gap<'_>, n: usize, rng: &mut R) -> Candidate {
    const STEPS: usize = 48;
    let p0 = random_point(n, rng);
    let a = random_point(n, rng);
    let b = random_point(n, rng);
    let d: Vec<f64> = a.iter().zip(&b).map(|(x, y)| x - y).collect();
    // chord p0 + t d within the simplex
    let (mut lo, mut hi) = (f64::NEG_INFINITY, f64::INFINITY);
    for (p, dv) in p0.iter().zip(&d) {
        if *dv > 0.0 {
            lo = lo.max(-p / dv);
        } else if *dv < 0.0 {
            hi = hi.min(-p / dv);
        }
    }
    if !(lo.is_finite() && hi.is_finite() && hi > lo) {
        return Candidate::none();
    }
    let at = |t: f64| -> Vec<f64> {
        let mut v: Vec<f64> = p0.iter().zip(&d).map(|(p, dv)| (p + t * dv).max(0.0)).collect();
        let s: f64 = v.iter().sum();
        v.iter_mut().for_each(|x| *x /= s);
        v
    };
    let ts: Vec<f64> = (0..=STEPS).map(|i| lo + (hi - lo) * i as f64 / STEPS as f64).collect();
    let vals: Vec<f64> = ts.iter().map(|&t| gap.delta(&at(t))).collect();
    let mut best = Candidate::none();
    for span in [1, 4, 12] {
        for i in span..=STEPS - span {
            let v = 0.5 * (vals[i - span] + vals[i + span]) - vals[i];
            if v > best.value {
                best = Candidate {
                    value: v,
                    weight: 0.5,
                    p1: at(ts[i - span]),
                    p2: at(ts[i + span]),
                };
            }
        }
    }
    best
}

/// Local random search that enlarges a positive violation.
fn refine<R: Rng>(gap: &Gap<'_>, mut best: Candidate, rng: &mut R) -> Candidate {
    let mut sigma = 0.05;
    for _ in 0..400 {
        let jitter = |p: &[f64], rng: &mut R| {
            let mut v: Vec<f64> = p.iter().map(|x| x + sigma * (rng.random::<f64>() - 0.5)).collect();
            project_simplex(&mut v);
            v
        };
        let p1 = jitter(&best.p1, rng);
        let p2 = jitter(&best.p2, rng);
        let w = (best.weight + sigma * (rng.random::<f64>() - 0.5)).clamp(0.01, 0.99);
        let c = gap.candidate(w, p1, p2);
        if c.value > best.value {
            best = c;
        } else {
            sigma = (sigma * 0.97).max(1e-4);
        }
    }
    best
}

/// Turns an input law with `Δ(p) < 0` into a binary-`U` violation.
///
/// Writes `p = p_x e_x + (1-p_x) p'`. Since `Δ(e_x) = 0`, the split violates
/// concavity by `(1-p_x)Δ(p') - Δ(p)`, which is positive unless
/// `Δ(p') < Δ(p)`; in that case the search continues on `p'`, whose
/// support is smaller.
fn split_certificate(gap: &Gap<'_>, p: &[f64]) -> Candidate {
    let mut p = p.to_vec();
    let mut best = Candidate::none();
    loop {
        let support: Vec<usize> = (0..p.len()).filter(|&x| p[x] > 1e-15).collect();
        if support.len() < 2 {
            return best;
        }
        let mut next = None;
        for &x in &support {
            let w = p[x];
            let mut rest = p.clone();
            rest[x] = 0.0;
            rest.iter_mut().for_each(|v| *v /= 1.0 - w);
            let mut vertex = vec![0.0; p.len()];
            vertex[x] = 1.0;
            let c = gap.candidate(w, vertex, rest.clone());
            if c.value <= 0.0 && next.is_none() {
                next = Some(rest);
            }
            best = best.better(c);
        }
        if best.value > 0.0 {
            return best;
        }
        match next {
            Some(rest) => p = rest,
            None => return best,
        }
    }
}

fn band(value: f64, tol: f64) -> Holds {
    if value <= NOISE_TOL {
        Holds::YesSampled
    } else if value <= tol {
        Holds::Undecided
    } else {
        Holds::No
    }
}

/// Whether `Y_s` is less noisy than `Y_c`: `I(U;Y_s) >= I(U;Y_c)` for all `p(u,x)`.
///
/// Equivalent to concavity of `Δ(p) = I(p;W_s) - I(p;W_c)`. The search mixes
/// random midpoint triples, second differences along random chords, and the
/// more-capable maximizer (a point with `Δ < 0` yields a violation directly).
pub fn is_less_noisy(
    ws: &ChannelMatrix,
    wc: &ChannelMatrix,
    cfg: &SearchConfig,
) -> Result<OrderVerdict, OrderingError> {
    check_inputs(ws, wc)?;
    let gap = Gap { ws, wc };
    let n = ws.input_size();
    let chunks = |total: usize| (total + CHUNK - 1) / CHUNK;
    let run = |total: usize, tag: u64, f: &(dyn Fn(&mut rand_chacha::ChaCha8Rng) -> Candidate + Sync)| {
        (0..chunks(total))
            .into_par_iter()
            .map(|c| {
                let mut rng = stream2(cfg.seed, c as u64, tag);
                let count = CHUNK.min(total - c * CHUNK);
                (0..count).fold(Candidate::none(), |b, _| b.better(f(&mut rng)))
            })
            .collect::<Vec<_>>()
            .into_iter()
            .fold(Candidate::none(), Candidate::better)
    };
    let mut best = run(cfg.pairs, TAG_PAIRS, &|rng| sample_pair(&gap, n, rng));
    best = best.better(run(cfg.lines, TAG_LINES, &|rng| scan_line(&gap, n, rng)));
    let (g, p, mc_samples) = maximize_gap(ws, wc, cfg);
    if g > 0.0 {
        best = best.better(split_certificate(&gap, &p));
    }
    if best.value > NOISE_TOL {
        best = refine(&gap, best, &mut stream2(cfg.seed, 0, TAG_REFINE));
    }
    let mut holds = band(best.value, cfg.tolerance);
    let certificate = if holds == Holds::No {
        let p1 = ProbVector::normalized(best.p1.clone()).expect("simplex point");
        let p2 = ProbVector::normalized(best.p2.clone()).expect("simplex point");
        if binary_aux_gap(best.weight, &p1, &p2, ws, wc) > CERT_MARGIN {
            Some(Certificate::BinaryAux {
                weight: best.weight,
                p1,
                p2,
            })
        } else {
            holds = Holds::Undecided;
            None
        }
    } else {
        None
    };
    Ok(OrderVerdict {
        relation: Relation::LessNoisy,
        holds,
        certificate,
        diagnostics: Diagnostics {
            max_violation: best.value,
            samples: cfg.pairs + cfg.lines + mc_samples,
        },
    })
}

/// Lattice points of the simplex with spacing `1/m`.
fn simplex_grid(n: usize, m: usize) -> Vec<Vec<f64>> {
    fn rec(n: usize, left: usize, m: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<f64>>) {
        if cur.len() == n - 1 {
            cur.push(left);
            out.push(cur.iter().map(|&c| c as f64 / m as f64).collect());
            cur.pop();
            return;
        }
        for c in 0..=left {
            cur.push(c);
            rec(n, left - c, m, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    rec(n, m, m, &mut Vec::with_capacity(n), &mut out);
    out
}

fn grid_size(n: usize, m: usize) -> f64 {
    // C(m + n - 1, n - 1)
    (1..n).fold(1.0, |acc, i| acc * (m + i) as f64 / i as f64)
}

/// Maximizes `g(p) = I(p;W_c) - I(p;W_s)` over the simplex. Returns the best
/// value, its maximizer, and the number of evaluations.
fn maximize_gap(ws: &ChannelMatrix, wc: &ChannelMatrix, cfg: &SearchConfig) -> (f64, Vec<f64>, usize) {
    let n = ws.input_size();
    let g = |p: &[f64]| mutual_info_raw(p, wc) - mutual_info_raw(p, ws);
    let m = (1.0 / cfg.grid).round().max(1.0) as usize;
    let mut seeds = if grid_size(n, m) <= MAX_GRID_POINTS as f64 {
        simplex_grid(n, m)
    } else {
        let mut rng = stream2(cfg.seed, 0, TAG_GRID);
        (0..MAX_GRID_POINTS / 10)
            .map(|_| random_point(n, &mut rng))
            .chain((0..n).map(|x| {
                let mut v = vec![0.0; n];
                v[x] = 1.0;
                v
            }))
            .collect()
    };
    seeds.push(vec![1.0 / n as f64; n]);
    let evals = seeds.len();
    let mut scored: Vec<(f64, Vec<f64>)> = seeds.into_par_iter().map(|p| (g(&p), p)).collect();
    scored.sort_by(|a, b| b.0.partial_cmp(&a.0).unwrap());
    scored.truncate(8);
    let refined: Vec<(f64, Vec<f64>, usize)> = scored
        .into_par_iter()
        .map(|(v, p)| ascend(&g, wc, ws, v, p, cfg))
        .collect();
    let extra: usize = refined.iter().map(|r| r.2).sum();
    let (v, p, _) = refined
        .into_iter()
        .fold((f64::NEG_INFINITY, Vec::new(), 0), |a, b| if b.0 > a.0 { b } else { a });
    (v, p, evals + extra)
}

/// Projected-gradient ascent with step adaptation.
fn ascend(
    g: &(dyn Fn(&[f64]) -> f64 + Sync),
    wc: &ChannelMatrix,
    ws: &ChannelMatrix,
    mut v: f64,
    mut p: Vec<f64>,
    cfg: &SearchConfig,
) -> (f64, Vec<f64>, usize) {
    let mut step = cfg.step;
    let mut evals = 0;
    for _ in 0..cfg.iterations.max(1) * 4 {
        let gc = mutual_info_gradient(&p, wc);
        let gs = mutual_info_gradient(&p, ws);
        let mut q: Vec<f64> = p
            .iter()
            .zip(gc.iter().zip(&gs))
            .map(|(x, (a, b))| x + step * (a - b))
            .collect();
        project_simplex(&mut q);
        let vq = g(&q);
        evals += 1;
        if vq > v {
            v = vq;
            p = q;
            step *= 1.5;
        } else {
            step *= 0.5;
            if step < 1e-12 {
                break;
            }
        }
    }
    (v, p, evals)
}

/// Whether `Y_s` is more capable than `Y_c`: `I(X;Y_s) >= I(X;Y_c)` for all `p(x)`.
pub fn is_more_capable(
    ws: &ChannelMatrix,
    wc: &ChannelMatrix,
    cfg: &SearchConfig,
) -> Result<OrderVerdict, OrderingError> {
    check_inputs(ws, wc)?;
    let (v, p, samples) = maximize_gap(ws, wc, cfg);
    let mut holds = band(v, cfg.tolerance);
    let certificate = if holds == Holds::No {
        let p = ProbVector::normalized(p).expect("simplex point");
        if mutual_info_raw(p.as_slice(), wc) - mutual_info_raw(p.as_slice(), ws) > CERT_MARGIN {
            Some(Certificate::Input(p))
        } else {
            holds = Holds::Undecided;
            None
        }
    } else {
        None
    };
    Ok(OrderVerdict {
        relation: Relation::MoreCapable,
        holds,
        certificate,
        diagnostics: Diagnostics {
            max_violation: v,
            samples,
        },
    })
}

/// All three verdicts for "`Y_s` dominates `Y_c`".
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PairVerdicts {
    pub s: usize,
    pub c: usize,
    pub degraded: OrderVerdict,
    pub less_noisy: OrderVerdict,
    pub more_capable: OrderVerdict,
}

impl PairVerdicts {
    /// Less noisy, either sampled or implied by degradedness.
    pub fn less_noisy_holds(&self) -> bool {
        self.degraded.holds.is_yes() || self.less_noisy.holds.is_yes()
    }

    pub fn more_capable_holds(&self) -> bool {
        self.less_noisy_holds() || self.more_capable.holds.is_yes()
    }
}

pub fn compare_pair(
    ws: &ChannelMatrix,
    wc: &ChannelMatrix,
    cfg: &SearchConfig,
) -> Result<(OrderVerdict, OrderVerdict, OrderVerdict), OrderingError> {
    Ok((
        is_degraded(ws, wc)?,
        is_less_noisy(ws, wc, cfg)?,
        is_more_capable(ws, wc, cfg)?,
    ))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum EdgeStyle {
    /// Less noisy.
    Solid,
    /// More capable but not less noisy.
    Dashed,
}

impl fmt::Display for EdgeStyle {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            EdgeStyle::Solid => "solid",
            EdgeStyle::Dashed => "dashed",
        })
    }
}

/// `from` dominates `to` (0-based canonical receiver indices).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct HasseEdge {
    pub from: usize,
    pub to: usize,
    pub style: EdgeStyle,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OrderingGraph {
    pub names: Vec<String>,
    /// Every ordered pair `(s, c)` with `s != c`, row-major.
    pub pairs: Vec<PairVerdicts>,
    pub edges: Vec<HasseEdge>,
}

impl OrderingGraph {
    pub fn pair(&self, s: usize, c: usize) -> Option<&PairVerdicts> {
        self.pairs.iter().find(|p| p.s == s && p.c == c)
    }

    /// Whether any positive verdict that the graph relies on came from sampling.
    pub fn has_sampled(&self) -> bool {
        self.pairs.iter().any(|p| {
            !p.degraded.holds.is_yes()
                && (p.less_noisy.holds == Holds::YesSampled || p.more_capable.holds == Holds::YesSampled)
        })
    }

    /// One line per edge: `from <solid|dashed> to`.
    pub fn edge_lines(&self) -> String {
        self.edges
            .iter()
            .map(|e| format!("{} {} {}\n", self.names[e.from], e.style, self.names[e.to]))
            .collect()
    }

    pub fn to_dot(&self) -> String {
        let mut out = String::from("digraph orderings {\n  rankdir=TB;\n");
        for name in &self.names {
            out.push_str(&format!("  \"{name}\";\n"));
        }
        for e in &self.edges {
            out.push_str(&format!(
                "  \"{}\" -> \"{}\" [style={}];\n",
                self.names[e.from], self.names[e.to], e.style
            ));
        }
        out.push_str("}\n");
        out
    }

    /// Pairwise table, one line per ordered pair.
    pub fn table(&self) -> String {
        let mut out = String::new();
        for p in &self.pairs {
            out.push_str(&format!(
                "{} vs {}: degraded={} less_noisy={} more_capable={}\n",
                self.names[p.s], self.names[p.c], p.degraded.holds, p.less_noisy.holds, p.more_capable.holds
            ));
        }
        out
    }
}

/// Transitive reduction of `rel` that keeps edges inside equivalence classes.
fn reduce(rel: &[Vec<bool>]) -> Vec<(usize, usize)> {
    let k = rel.len();
    let strict = |a: usize, b: usize| rel[a][b] && !rel[b][a];
    let mut out = Vec::new();
    for s in 0..k {
        for c in 0..k {
            if s == c || !rel[s][c] {
                continue;
            }
            let implied = (0..k).any(|m| m != s && m != c && rel[s][m] && rel[m][c] && (strict(s, m) || strict(m, c)));
            if !implied {
                out.push((s, c));
            }
        }
    }
    out
}

/// Evaluates every ordered receiver pair and derives the Hasse diagram.
pub fn ordering_graph(bc: &BroadcastSpec, cfg: &SearchConfig) -> Result<OrderingGraph, OrderingError> {
    let k = bc.k();
    let jobs: Vec<(usize, usize)> = (0..k)
        .flat_map(|s| (0..k).filter(move |&c| c != s).map(move |c| (s, c)))
        .collect();
    let pairs = jobs
        .into_par_iter()
        .map(|(s, c)| {
            let (d, ln, mc) = compare_pair(bc.receiver(s), bc.receiver(c), cfg)?;
            Ok(PairVerdicts {
                s,
                c,
                degraded: d,
                less_noisy: ln,
                more_capable: mc,
            })
        })
        .collect::<Result<Vec<_>, OrderingError>>()?;
    let mut ln = vec![vec![false; k]; k];
    let mut mc = vec![vec![false; k]; k];
    for p in &pairs {
        ln[p.s][p.c] = p.less_noisy_holds();
        mc[p.s][p.c] = p.more_capable_holds();
    }
    let mut edges: Vec<HasseEdge> = reduce(&ln)
        .into_iter()
        .map(|(from, to)| HasseEdge {
            from,
            to,
            style: EdgeStyle::Solid,
        })
        .collect();
    for (from, to) in reduce(&mc) {
        if !ln[from][to] {
            edges.push(HasseEdge {
                from,
                to,
                style: EdgeStyle::Dashed,
            });
        }
    }
    edges.sort_by_key(|e| (e.from, e.to));
    Ok(OrderingGraph {
        names: bc.names().to_vec(),
        pairs,
        edges,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::probkit::{binary_entropy, binary_convolution};
    use crate::rng::stream;

    fn cfg() -> SearchConfig {
        SearchConfig::fast(7)
    }

    #[test]
    fn degraded_examples() {
        let w = ChannelMatrix::bsc(0.1);
        let v = is_degraded(&w, &w).unwrap();
        assert_eq!(v.holds, Holds::Yes);
        assert!(v.certificate_value(&w, &w).unwrap() <= DEGRADED_TOL);

        let v = is_degraded(&ChannelMatrix::bsc(0.1), &ChannelMatrix::bsc(0.2)).unwrap();
        assert_eq!(v.holds, Holds::Yes);
        let Some(Certificate::Kernel(q)) = &v.certificate else {
            panic!("kernel expected")
        };
        // 0.1 * e' = 0.2
        let e = (0.2 - 0.1) / (1.0 - 0.2);
        assert!((binary_convolution(0.1, e) - 0.2).abs() < 1e-12);
        assert!((q.row(0)[1] - e).abs() < 1e-8);

        let v = is_degraded(&ChannelMatrix::bsc(0.1), &ChannelMatrix::bec(0.3)).unwrap();
        assert_eq!(v.holds, Holds::No);
        assert!(v.diagnostics.max_violation > 1e-3);
    }

    #[test]
    fn degraded_dimension_mismatch() {
        let a = ChannelMatrix::bsc(0.1);
        let b = ChannelMatrix::identity(3);
        assert_eq!(is_degraded(&a, &b).unwrap_err(), OrderingError::DimensionMismatch(2, 3));
    }

    #[test]
    fn less_noisy_examples() {
        let w = ChannelMatrix::bsc(0.1);
        assert_eq!(is_less_noisy(&w, &w, &cfg()).unwrap().holds, Holds::YesSampled);

        let bsc = ChannelMatrix::bsc(0.1);
        let bec = ChannelMatrix::bec(0.3);
        let v = is_less_noisy(&bsc, &bec, &cfg()).unwrap();
        assert_eq!(v.holds, Holds::No);
        assert!(matches!(v.certificate, Some(Certificate::BinaryAux { .. })));
        assert!(v.certificate_value(&bsc, &bec).unwrap() > CERT_MARGIN);

        assert_eq!(is_less_noisy(&bec, &bsc, &cfg()).unwrap().holds, Holds::YesSampled);
    }

    /// Dense check of the binary-input threshold: concavity of
    /// `(1-e) h(q) - h(q*ε) + h(ε)` fails iff `e > 4ε(1-ε)`.
    #[test]
    fn less_noisy_threshold_by_grid() {
        let eps = 0.1;
        let delta = |e: f64, q: f64| {
            (1.0 - e) * binary_entropy(q) - binary_entropy(binary_convolution(q, eps)) + binary_entropy(eps)
        };
        let concave = |e: f64| {
            (1..10_000).all(|i| {
                let q = i as f64 / 10_000.0;
                let h = 1e-4;
                delta(e, q - h) + delta(e, q + h) - 2.0 * delta(e, q) <= 1e-14
            })
        };
        assert!(concave(0.35));
        assert!(!concave(0.37));
        let bsc = ChannelMatrix::bsc(eps);
        assert!(is_less_noisy(&ChannelMatrix::bec(0.35), &bsc, &cfg()).unwrap().holds.is_yes());
        assert_eq!(is_less_noisy(&ChannelMatrix::bec(0.37), &bsc, &cfg()).unwrap().holds, Holds::No);
    }

    #[test]
    fn more_capable_examples() {
        let w = ChannelMatrix::bsc(0.1);
        let v = is_more_capable(&w, &w, &cfg()).unwrap();
        assert_eq!(v.holds, Holds::YesSampled);
        assert!(v.diagnostics.max_violation.abs() <= NOISE_TOL);

        let v = is_more_capable(&ChannelMatrix::bsc(0.1), &ChannelMatrix::bsc(0.2), &cfg()).unwrap();
        assert_eq!(v.holds, Holds::YesSampled);

        let bec = ChannelMatrix::bec(0.5);
        let bsc = ChannelMatrix::bsc(0.1);
        let v = is_more_capable(&bec, &bsc, &cfg()).unwrap();
        assert_eq!(v.holds, Holds::No);
        let Some(Certificate::Input(p)) = &v.certificate else {
            panic!("input certificate expected")
        };
        assert!((p[0] - 0.5).abs() < 0.01);
        // 1 - h(0.1) - 0.5
        let expect = 1.0 - binary_entropy(0.1) - 0.5;
        assert!((v.diagnostics.max_violation - expect).abs() < 1e-6);
    }

    #[test]
    fn binary_aux_identity() {
        // I(U;Y_s) - I(U;Y_c) = Δ(p̄) - Σ_u p(u) Δ(p_u)
        let mut rng = stream(11, 0);
        for _ in 0..50 {
            let ws = ChannelMatrix::random(3, 3, &mut rng);
            let wc = ChannelMatrix::random(3, 2, &mut rng);
            let p1 = ProbVector::random(3, &mut rng);
            let p2 = ProbVector::random(3, &mut rng);
            let w: f64 = rng.random();
            let gap = Gap { ws: &ws, wc: &wc };
            let c = gap.candidate(w, p1.as_slice().to_vec(), p2.as_slice().to_vec());
            let direct = binary_aux_gap(w, &p1, &p2, &ws, &wc);
            assert!((c.value - direct).abs() < 1e-9);
        }
    }

    #[test]
    fn split_certificate_from_negative_gap() {
        let ws = ChannelMatrix::bec(0.5);
        let wc = ChannelMatrix::bsc(0.1);
        let gap = Gap { ws: &ws, wc: &wc };
        let c = split_certificate(&gap, &[0.5, 0.5]);
        assert!(c.value > 0.0);
    }

    #[test]
    fn grid_enumeration() {
        assert_eq!(simplex_grid(2, 10).len(), 11);
        assert_eq!(simplex_grid(3, 10).len(), 66);
        assert_eq!(grid_size(3, 10), 66.0);
        assert!(simplex_grid(3, 4).iter().all(|p| (p.iter().sum::<f64>() - 1.0).abs() < 1e-12));
    }

    #[test]
    fn graph_of_identical_receivers_is_complete() {
        let w = ChannelMatrix::bsc(0.2);
        let bc = BroadcastSpec::canonical(vec![w.clone(), w.clone(), w], 1).unwrap();
        let g = ordering_graph(&bc, &cfg()).unwrap();
        assert_eq!(g.pairs.len(), 6);
        assert_eq!(g.edges.len(), 6);
        assert!(g.edges.iter().all(|e| e.style == EdgeStyle::Solid));
    }

    #[test]
    fn graph_of_bsc_cascade_is_a_chain() {
        let rx = [0.05, 0.1, 0.2].map(ChannelMatrix::bsc).to_vec();
        let bc = BroadcastSpec::canonical(rx, 1).unwrap();
        let g = ordering_graph(&bc, &cfg()).unwrap();
        let solid: Vec<(usize, usize)> = g.edges.iter().map(|e| (e.from, e.to)).collect();
        assert_eq!(solid, vec![(0, 1), (1, 2)]);
        assert!(g.pair(0, 2).unwrap().degraded.holds.is_yes());
        assert_eq!(g.edge_lines(), "Y1 solid Y2\nY2 solid Y3\n");
        assert!(g.to_dot().contains("\"Y1\" -> \"Y2\" [style=solid];"));
    }

    #[test]
    fn graph_bsc_bec() {
        let bc = BroadcastSpec::canonical(vec![ChannelMatrix::bsc(0.1), ChannelMatrix::bec(0.3)], 1).unwrap();
        let g = ordering_graph(&bc, &cfg()).unwrap();
        assert_eq!(
            g.edges,
            vec![HasseEdge {
                from: 1,
                to: 0,
                style: EdgeStyle::Solid
            }]
        );
        assert!(!g.pair(1, 0).unwrap().degraded.holds.is_yes());
        assert!(!g.pair(0, 1).unwrap().degraded.holds.is_yes());
    }
}
