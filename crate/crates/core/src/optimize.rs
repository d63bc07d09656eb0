//! Unions of per-distribution regions over coding chains, approximated by
//! sweeping supporting lines `λ R0 + R1` with multistart local ascent.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::config::{ConfigError, SearchConfig};
use crate::probkit::{eval_mi_table, project_simplex, ChannelMatrix, MarkovChain, ProbVector};
use crate::regions::{
    downward_hull, halfspaces_to_polygon, region, Halfspace2D, RegionError, RegionPolygon, SchemeId,
};
use crate::rng::stream2;
use crate::BroadcastSpec;

const FD_STEP: f64 = 1e-5;
const TAG_START: u64 = 0x4f50_5354;
/// Directions always swept so that the outer description is bounded.
const AXIS_LAMBDAS: [f64; 2] = [0.0, 1000.0];
/// Inner/outer gap below which no refinement directions are added.
const REFINE_GAP: f64 = 1e-4;
const STRUCTURED_STARTS: usize = 4;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum OptimizeError {
    #[error(transparent)]
    Region(#[from] RegionError),
    #[error(transparent)]
    Config(#[from] ConfigError),
}

/// Best corner found in direction `(λ, 1)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SupportPoint {
    pub lambda: f64,
    pub value: f64,
    pub corner: [f64; 2],
    pub chain: MarkovChain,
    pub scheme: SchemeId,
    pub seed: u64,
}

impl SupportPoint {
    pub const CSV_HEADER: &'static str = "lambda,value,R0,R1,scheme,seed";

    pub fn csv_row(&self) -> String {
        format!(
            "{},{:.9},{:.9},{:.9},{},{}",
            self.lambda, self.value, self.corner[0], self.corner[1], self.scheme, self.seed
        )
    }
}

pub fn to_csv(points: &[SupportPoint]) -> String {
    let mut out = format!("{}\n", SupportPoint::CSV_HEADER);
    for p in points {
        out.push_str(&p.csv_row());
        out.push('\n');
    }
    out
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct UnionRegion {
    pub scheme: SchemeId,
    /// One per swept direction, in sweep order.
    pub points: Vec<SupportPoint>,
    /// Downward-closed hull of achieved corners: a true inner bound.
    pub inner: RegionPolygon,
    /// Intersection of the supporting halfplanes found.
    pub outer: RegionPolygon,
    /// Largest distance from an outer vertex to the inner hull.
    pub gap: f64,
    /// Auxiliary cardinalities used, top level first.
    pub cardinalities: Vec<usize>,
}

/// Support value of one chain in direction `(λ, 1)`, with its corner.
pub fn chain_support(
    bc: &BroadcastSpec,
    scheme: SchemeId,
    chain: &MarkovChain,
    lambda: f64,
) -> Result<Option<(f64, [f64; 2])>, RegionError> {
    Ok(chain_region(bc, scheme, chain)?.support(lambda))
}

pub fn chain_region(bc: &BroadcastSpec, scheme: SchemeId, chain: &MarkovChain) -> Result<RegionPolygon, RegionError> {
    let mi = eval_mi_table(chain, bc)?;
    region(bc, &mi, scheme)
}

/// Chain parameters as plain rows: the top law, then every kernel row.
#[derive(Debug, Clone)]
struct Params {
    top: Vec<f64>,
    kernels: Vec<Vec<Vec<f64>>>,
}

impl Params {
    fn from_chain(c: &MarkovChain) -> Self {
        Self {
            top: c.top.as_slice().to_vec(),
            kernels: c.kernels.iter().map(|k| k.rows().to_vec()).collect(),
        }
    }

    fn chain(&self) -> MarkovChain {
        let top = ProbVector::normalized(self.top.clone()).expect("top law on the simplex");
        let kernels = self
            .kernels
            .iter()
            .map(|k| ChannelMatrix::normalized(k.clone()).expect("kernel rows on the simplex"))
            .collect();
        MarkovChain::new(top, kernels).expect("shapes preserved")
    }

    fn row_count(&self) -> usize {
        1 + self.kernels.iter().map(Vec::len).sum::<usize>()
    }

    fn row_mut(&mut self, mut i: usize) -> &mut Vec<f64> {
        if i == 0 {
            return &mut self.top;
        }
        i -= 1;
        for k in &mut self.kernels {
            if i < k.len() {
                return &mut k[i];
            }
            i -= k.len();
        }
        unreachable!("row index in range")
    }
}

fn point(n: usize, i: usize) -> Vec<f64> {
    let mut v = vec![0.0; n];
    v[i.min(n - 1)] = 1.0;
    v
}

/// Deterministic starting chains: constant auxiliaries with uniform input,
/// auxiliaries that copy the input, a single noisy auxiliary copied down the
/// chain, and a constant top with the lower levels copying the input.
fn structured_start(kind: usize, cards: &[usize], x: usize) -> MarkovChain {
    let n = cards.len();
    let width = |lvl: usize| cards.get(lvl + 1).copied().unwrap_or(x);
    let uniform = |m: usize| vec![1.0 / m as f64; m];
    let copy_rows = |from: usize, to: usize| (0..from).map(|u| point(to, u % to)).collect::<Vec<_>>();
    let (top, kernels): (Vec<f64>, Vec<Vec<Vec<f64>>>) = match kind {
        0 => (
            point(cards[0], 0),
            (0..n)
                .map(|l| {
                    let w = width(l);
                    let row = if l + 1 == n { uniform(w) } else { point(w, 0) };
                    vec![row; cards[l]]
                })
                .collect(),
        ),
        1 => (uniform(cards[0]), (0..n).map(|l| copy_rows(cards[l], width(l))).collect()),
        2 => {
            let m = cards[0].min(x).max(1);
            let mut top = vec![0.0; cards[0]];
            top[..m].iter_mut().for_each(|v| *v = 1.0 / m as f64);
            let kernels = (0..n)
                .map(|l| {
                    let w = width(l);
                    if l + 1 == n {
                        (0..cards[l])
                            .map(|u| {
                                let mut r = uniform(w);
                                r.iter_mut().for_each(|v| *v *= 0.25);
                                r[u % w] += 0.75;
                                r
                            })
                            .collect()
                    } else {
                        copy_rows(cards[l], w)
                    }
                })
                .collect();
            (top, kernels)
        }
        _ => {
            let kernels = (0..n)
                .map(|l| {
                    let w = width(l);
                    if l == 0 {
                        vec![uniform(w); cards[l]]
                    } else {
                        copy_rows(cards[l], w)
                    }
                })
                .collect();
            (point(cards[0], 0), kernels)
        }
    };
    Params { top, kernels }.chain()
}

fn cardinalities(bc: &BroadcastSpec, scheme: SchemeId, cfg: &SearchConfig) -> Vec<usize> {
    (0..scheme.aux_levels(bc))
        .map(|l| cfg.cardinality(l, bc.input_size()))
        .collect()
}

fn start_chain(start: usize, cards: &[usize], x: usize, seed: u64) -> MarkovChain {
    if start < STRUCTURED_STARTS {
        structured_start(start, cards, x)
    } else {
        MarkovChain::random(cards, x, &mut stream2(seed, start as u64, TAG_START))
    }
}

struct Objective<'a> {
    bc: &'a BroadcastSpec,
    scheme: SchemeId,
    lambda: f64,
}

impl Objective<'_> {
    /// Scaled support value; the scaling keeps step sizes comparable across λ.
    fn eval(&self, p: &Params) -> f64 {
        match chain_support(self.bc, self.scheme, &p.chain(), self.lambda) {
            Ok(Some((v, _))) => v / (1.0 + self.lambda),
            _ => f64::NEG_INFINITY,
        }
    }
}

/// Cyclic row-wise projected-gradient ascent with central differences.
fn ascend(obj: &Objective<'_>, chain: MarkovChain, cfg: &SearchConfig) -> MarkovChain {
    let mut p = Params::from_chain(&chain);
    let mut best = obj.eval(&p);
    for _ in 0..cfg.iterations {
        let before = best;
        for r in 0..p.row_count() {
            let row = p.row_mut(r).clone();
            if row.len() < 2 {
                continue;
            }
            let mut grad = vec![0.0; row.len()];
            for (i, g) in grad.iter_mut().enumerate() {
                let mut probe = p.clone();
                probe.row_mut(r)[i] = row[i] + FD_STEP;
                let up = obj.eval(&probe);
                if row[i] >= FD_STEP {
                    probe.row_mut(r)[i] = row[i] - FD_STEP;
                    *g = (up - obj.eval(&probe)) / (2.0 * FD_STEP);
                } else {
                    *g = (up - best) / FD_STEP;
                }
            }
            let mut step = cfg.step;
            for _ in 0..6 {
                let mut cand = row.iter().zip(&grad).map(|(a, g)| a + step * g).collect::<Vec<_>>();
                project_simplex(&mut cand);
                let mut trial = p.clone();
                *trial.row_mut(r) = cand;
                let v = obj.eval(&trial);
                if v > best {
                    best = v;
                    p = trial;
                    break;
                }
                step *= 0.25;
            }
        }
        if best - before < 1e-10 {
            break;
        }
    }
    p.chain()
}

fn point_for(
    bc: &BroadcastSpec,
    scheme: SchemeId,
    chain: MarkovChain,
    lambda: f64,
    seed: u64,
) -> Result<Option<SupportPoint>, RegionError> {
    Ok(chain_support(bc, scheme, &chain, lambda)?.map(|(value, corner)| SupportPoint {
        lambda,
        value,
        corner,
        chain,
        scheme,
        seed,
    }))
}

fn pick(best: Option<SupportPoint>, cand: Option<SupportPoint>) -> Option<SupportPoint> {
    match (best, cand) {
        (None, c) => c,
        (b, None) => b,
        (Some(b), Some(c)) => Some(if c.value > b.value { c } else { b }),
    }
}

/// Ascended chains for every `(λ, start)` job, grouped by λ.
fn sweep(
    bc: &BroadcastSpec,
    scheme: SchemeId,
    lambdas: &[f64],
    cfg: &SearchConfig,
) -> Result<Vec<Vec<MarkovChain>>, OptimizeError> {
    cfg.validate()?;
    scheme.validate(bc)?;
    let cards = cardinalities(bc, scheme, cfg);
    let starts = STRUCTURED_STARTS + cfg.multistarts;
    let jobs: Vec<(usize, usize)> = (0..lambdas.len())
        .flat_map(|l| (0..starts).map(move |s| (l, s)))
        .collect();
    let chains: Vec<MarkovChain> = jobs
        .par_iter()
        .map(|&(l, s)| {
            let obj = Objective {
                bc,
                scheme,
                lambda: lambdas[l],
            };
            ascend(&obj, start_chain(s, &cards, bc.input_size(), cfg.seed), cfg)
        })
        .collect();
    Ok(chains.chunks(starts).map(<[MarkovChain]>::to_vec).collect())
}

/// Best corner in direction `(λ, 1)` over multistart ascents.
pub fn support_value(
    bc: &BroadcastSpec,
    scheme: SchemeId,
    lambda: f64,
    cfg: &SearchConfig,
) -> Result<SupportPoint, OptimizeError> {
    let chains = sweep(bc, scheme, &[lambda], cfg)?.remove(0);
    let mut best = None;
    for c in chains {
        best = pick(best, point_for(bc, scheme, c, lambda, cfg.seed)?);
    }
    Ok(best.expect("per-chain regions are never empty"))
}

/// Best support point per direction over a pool of scored chains, plus the
/// vertices of every winning chain's region.
fn score(
    lambdas: &[f64],
    chains: &[MarkovChain],
    regions: &[RegionPolygon],
    scheme: SchemeId,
    seed: u64,
) -> (Vec<SupportPoint>, Vec<[f64; 2]>) {
    let mut points = Vec::with_capacity(lambdas.len());
    let mut corners = Vec::new();
    for &lambda in lambdas {
        let mut best: Option<(f64, [f64; 2], usize)> = None;
        for (i, r) in regions.iter().enumerate() {
            if let Some((v, corner)) = r.support(lambda) {
                if best.is_none_or(|b| v > b.0) {
                    best = Some((v, corner, i));
                }
            }
        }
        let (value, corner, i) = best.expect("per-chain regions are never empty");
        corners.extend_from_slice(&regions[i].vertices);
        points.push(SupportPoint {
            lambda,
            value,
            corner,
            chain: chains[i].clone(),
            scheme,
            seed,
        });
    }
    (points, corners)
}

fn excess(h: &Halfspace2D, p: [f64; 2]) -> f64 {
    (h.lhs(p) - h.rhs) / h.a0.hypot(h.a1)
}

/// Normal direction `λ` of the inner hull edge most violated by
/// the outer vertex farthest from the hull, if that direction is new.
fn refinement_direction(inner: &RegionPolygon, outer: &RegionPolygon, lambdas: &[f64]) -> Option<f64> {
    let far = outer
        .vertices
        .iter()
        .copied()
        .max_by(|a, b| inner.distance_to(*a).total_cmp(&inner.distance_to(*b)))?;
    let slant = inner
        .halfspaces
        .iter()
        .filter(|h| h.a0 > 0.0 && h.a1 > 0.0)
        .max_by(|a, b| excess(a, far).total_cmp(&excess(b, far)))?;
    let lambda = slant.a0 / slant.a1;
    let fresh = lambda.is_finite() && lambdas.iter().all(|l| (l - lambda).abs() > 1e-6 * lambda.max(1.0));
    fresh.then_some(lambda)
}

/// Sweeps `cfg.lambdas` (plus the two axis directions), then adds up to
/// `cfg.refine` directions normal to the hull edges with the widest gap, and
/// builds inner and outer descriptions of the union.
pub fn union_region(bc: &BroadcastSpec, scheme: SchemeId, cfg: &SearchConfig) -> Result<UnionRegion, OptimizeError> {
    let mut lambdas = cfg.lambdas.clone();
    for l in AXIS_LAMBDAS {
        if !lambdas.contains(&l) {
            lambdas.push(l);
        }
    }
    let mut chains: Vec<MarkovChain> = sweep(bc, scheme, &lambdas, cfg)?.into_iter().flatten().collect();
    // every ascended chain is scored in every direction
    let mut regions: Vec<RegionPolygon> = chains
        .par_iter()
        .map(|c| chain_region(bc, scheme, c))
        .collect::<Result<_, _>>()?;
    let mut round = 0;
    loop {
        let (points, corners) = score(&lambdas, &chains, &regions, scheme, cfg.seed);
        let (inner, outer, gap) = describe_union(&points, &corners, scheme)?;
        let next = (round < cfg.refine && gap > REFINE_GAP)
            .then(|| refinement_direction(&inner, &outer, &lambdas))
            .flatten();
        let Some(lambda) = next else {
            return Ok(UnionRegion {
                scheme,
                points,
                inner,
                outer,
                gap,
                cardinalities: cardinalities(bc, scheme, cfg),
            });
        };
        round += 1;
        lambdas.push(lambda);
        let fresh: Vec<MarkovChain> = sweep(bc, scheme, &[lambda], cfg)?.remove(0);
        for c in fresh {
            regions.push(chain_region(bc, scheme, &c)?);
            chains.push(c);
        }
    }
}

/// Inner hull of `corners`, outer intersection of the support lines, and the gap.
fn describe_union(
    points: &[SupportPoint],
    corners: &[[f64; 2]],
    scheme: SchemeId,
) -> Result<(RegionPolygon, RegionPolygon, f64), RegionError> {
    let inner = downward_hull(corners, &format!("union:{scheme}"));
    let lines = points
        .iter()
        .map(|p| Halfspace2D::general(p.lambda, 1.0, p.value, format!("{}R0+R1<={:.6}", p.lambda, p.value)))
        .collect::<Result<Vec<_>, _>>()?;
    let outer = halfspaces_to_polygon(lines)?;
    let gap = outer
        .vertices
        .iter()
        .map(|&v| inner.distance_to(v))
        .fold(0.0, f64::max);
    Ok((inner, outer, gap))
}

/// Per-direction comparison of two schemes.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GapRow {
    pub lambda: f64,
    pub a: SupportPoint,
    pub b: SupportPoint,
    /// `a.value - b.value`
    pub gap: f64,
}

pub fn compare_schemes(
    bc: &BroadcastSpec,
    a: SchemeId,
    b: SchemeId,
    cfg: &SearchConfig,
) -> Result<Vec<GapRow>, OptimizeError> {
    cfg.lambdas
        .iter()
        .map(|&lambda| {
            let pa = support_value(bc, a, lambda, cfg)?;
            let pb = support_value(bc, b, lambda, cfg)?;
            Ok(GapRow {
                lambda,
                gap: pa.value - pb.value,
                a: pa,
                b: pb,
            })
        })
        .collect()
}

pub fn gap_table_csv(rows: &[GapRow]) -> String {
    let points: Vec<SupportPoint> = rows.iter().flat_map(|r| [r.a.clone(), r.b.clone()]).collect();
    to_csv(&points)
}
