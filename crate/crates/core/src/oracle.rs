//! Grid comparison between the closed-form layered region and LP-lift
//! feasibility of the split-rate system.

use serde::Serialize;
use thiserror::Error;

use crate::broadcast::BroadcastSpec;
use crate::lp::{Field, Lp};
use crate::probkit::{eval_mi_table, MarkovChain};
use crate::regions::{region_thm2, splitrate_system, RegionError, RegionPolygon};

/// Slack allowed when checking a numeric row or polygon membership.
pub const MEMBER_TOL: f64 = 1e-12;

#[derive(Debug, Error)]
pub enum OracleError {
    #[error("grid step must lie in (0, 0.1], got {0}")]
    Step(f64),
    #[error(transparent)]
    Region(#[from] RegionError),
    #[error("split-rate system: {0}")]
    System(String),
}

#[derive(Debug, Clone, Serialize)]
pub struct Disagreement {
    pub point: [f64; 2],
    pub closed_form: bool,
    pub lifted: bool,
    /// Distance from the point to the closed-form polygon's boundary.
    pub boundary_distance: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct OracleReport {
    pub step: f64,
    pub points: usize,
    pub inside: usize,
    pub disagreements: Vec<Disagreement>,
    pub interior_disagreements: usize,
}

impl OracleReport {
    pub fn passed(&self) -> bool {
        self.interior_disagreements == 0
    }

    pub fn to_text(&self) -> String {
        let mut out = format!(
            "grid step {}: {} points, {} inside\ndisagreements: {}\ninterior disagreements: {}\n",
            self.step,
            self.points,
            self.inside,
            self.disagreements.len(),
            self.interior_disagreements
        );
        for d in self.disagreements.iter().filter(|d| d.boundary_distance > self.step) {
            out.push_str(&format!(
                "  ({:.6}, {:.6}) closed-form={} lifted={} distance={:.3e}\n",
                d.point[0], d.point[1], d.closed_form, d.lifted, d.boundary_distance
            ));
        }
        out.push_str(if self.passed() { "result: agree\n" } else { "result: DISAGREE\n" });
        out
    }
}

/// Split-rate system with the atoms substituted, as `f64` rows over
/// `(R0, R1, splits...)`.
pub struct NumericSplitSystem {
    pub rows: Vec<Vec<f64>>,
    pub rhs: Vec<f64>,
}

impl NumericSplitSystem {
    pub fn new(bc: &BroadcastSpec, chain: &MarkovChain) -> Result<Self, OracleError> {
        let mi = eval_mi_table(chain, bc).map_err(RegionError::from)?;
        let (sys, inst) = splitrate_system(bc, &mi)?;
        let num = sys
            .instantiate(&inst)
            .map_err(|e| OracleError::System(e.to_string()))?;
        let mut rows = Vec::new();
        let mut rhs = Vec::new();
        for r in &num.rows {
            rows.push(r.coeffs.iter().map(Field::to_f64).collect());
            rhs.push(
                r.numeric_rhs()
                    .map_err(|e| OracleError::System(e.to_string()))?
                    .to_f64(),
            );
        }
        Ok(Self { rows, rhs })
    }

    fn splits(&self) -> usize {
        self.rows.first().map_or(0, |r| r.len() - 2)
    }

    /// Whether split rates exist that complete `(r0, r1)` to a feasible point.
    pub fn lift_feasible(&self, r0: f64, r1: f64) -> bool {
        if r0 < -MEMBER_TOL || r1 < -MEMBER_TOL {
            return false;
        }
        let n = self.splits();
        let reduced = self.rows.iter().zip(&self.rhs).map(|(row, b)| {
            (row[2..].to_vec(), b - row[0] * r0 - row[1] * r1)
        });
        if n == 0 {
            return reduced.into_iter().all(|(_, b)| b >= -MEMBER_TOL);
        }
        let mut lp = Lp::<f64>::new(n, true);
        for (coeffs, b) in reduced {
            if coeffs.iter().all(|c| *c == 0.0) {
                if b < -MEMBER_TOL {
                    return false;
                }
                continue;
            }
            lp.push(coeffs, b + MEMBER_TOL);
        }
        lp.solve().is_feasible()
    }
}

/// Distance from `p` to the boundary of `poly`, counting the axes as part of it.
pub fn boundary_distance(poly: &RegionPolygon, p: [f64; 2]) -> f64 {
    if !poly.contains(p, MEMBER_TOL) {
        return poly.distance_to(p);
    }
    poly.halfspaces
        .iter()
        .map(|h| (h.rhs - h.lhs(p)) / h.a0.hypot(h.a1))
        .fold(p[0].min(p[1]), f64::min)
        .max(0.0)
}

/// Sweeps a grid over `(R0, R1)` covering the closed-form region with a
/// margin and compares both membership tests at every point.
pub fn split_rate_oracle(
    bc: &BroadcastSpec,
    chain: &MarkovChain,
    step: f64,
) -> Result<OracleReport, OracleError> {
    if !(step > 0.0 && step <= 0.1) {
        return Err(OracleError::Step(step));
    }
    let mi = eval_mi_table(chain, bc).map_err(RegionError::from)?;
    let poly = region_thm2(bc, &mi)?;
    let system = NumericSplitSystem::new(bc, chain)?;
    let extent = |axis: usize| {
        let top = poly.vertices.iter().map(|v| v[axis]).fold(0.0, f64::max);
        top * 1.1 + 3.0 * step
    };
    let (n0, n1) = (
        (extent(0) / step).ceil() as usize,
        (extent(1) / step).ceil() as usize,
    );
    let mut report = OracleReport {
        step,
        points: 0,
        inside: 0,
        disagreements: Vec::new(),
        interior_disagreements: 0,
    };
    for i in 0..=n0 {
        for j in 0..=n1 {
            let p = [i as f64 * step, j as f64 * step];
            let closed_form = poly.contains(p, MEMBER_TOL);
            let lifted = system.lift_feasible(p[0], p[1]);
            report.points += 1;
            report.inside += closed_form as usize;
            if closed_form != lifted {
                let d = boundary_distance(&poly, p);
                if d > step {
                    report.interior_disagreements += 1;
                }
                report.disagreements.push(Disagreement {
                    point: p,
                    closed_form,
                    lifted,
                    boundary_distance: d,
                });
            }
        }
    }
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::probkit::{ChannelMatrix, ProbVector};
    use crate::rng::stream;

    fn bsc_spec(eps: &[f64], l: usize) -> BroadcastSpec {
        BroadcastSpec::canonical(eps.iter().map(|&e| ChannelMatrix::bsc(e)).collect(), l).unwrap()
    }

    #[test]
    fn rejects_bad_step() {
        let bc = bsc_spec(&[0.1, 0.2, 0.3], 1);
        let chain = MarkovChain::random(&[2, 2], 2, &mut stream(1, 0));
        assert!(matches!(split_rate_oracle(&bc, &chain, 0.0), Err(OracleError::Step(_))));
        assert!(matches!(split_rate_oracle(&bc, &chain, 0.2), Err(OracleError::Step(_))));
    }

    #[test]
    fn degenerate_chain_agrees() {
        let bc = bsc_spec(&[0.1, 0.2, 0.3], 1);
        let chain = MarkovChain::embed_constant(
            ProbVector::point(2, 0),
            ChannelMatrix::new(vec![vec![1.0, 0.0], vec![1.0, 0.0]]).unwrap(),
            2,
        );
        let r = split_rate_oracle(&bc, &chain, 0.02).unwrap();
        assert_eq!(r.disagreements.len(), 0);
        // a deterministic input carries nothing, so only the origin remains
        assert_eq!(r.inside, 1, "{}", r.to_text());
    }

    #[test]
    fn random_k3_chain_agrees() {
        let bc = bsc_spec(&[0.05, 0.15, 0.3], 1);
        let chain = MarkovChain::random(&[3, 3], 2, &mut stream(3, 0));
        let r = split_rate_oracle(&bc, &chain, 0.005).unwrap();
        assert!(r.passed(), "{}", r.to_text());
        assert!(r.inside > 0);
    }

    #[test]
    fn random_k5_chain_agrees() {
        let bc = bsc_spec(&[0.02, 0.08, 0.12, 0.2, 0.3], 2);
        let chain = MarkovChain::random(&[2, 3, 3], 2, &mut stream(5, 0));
        let r = split_rate_oracle(&bc, &chain, 0.01).unwrap();
        assert!(r.passed(), "{}", r.to_text());
    }

    #[test]
    fn lift_outside_fails() {
        let bc = bsc_spec(&[0.1, 0.2, 0.3], 1);
        let chain = MarkovChain::random(&[2, 2], 2, &mut stream(9, 0));
        let sys = NumericSplitSystem::new(&bc, &chain).unwrap();
        assert!(sys.lift_feasible(0.0, 0.0));
        assert!(!sys.lift_feasible(2.0, 0.0));
        assert!(!sys.lift_feasible(-0.1, 0.0));
    }
}
