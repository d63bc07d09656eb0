//! Capacity-class membership from pairwise orderings, and the capacity
//! region of the matched class.
//!
//! `a ≺ b` ("`Y_a` is more noisy than `Y_b`") is read from a less-noisy or
//! degradedness verdict with `b` as the stronger receiver; `a ⪯ b` also
//! accepts a more-capable verdict. In strict mode only the exact
//! degradedness LP counts as evidence.

use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::config::SearchConfig;
use crate::optimize::{union_region, OptimizeError, UnionRegion};
use crate::ordering::{ordering_graph, Holds, OrderingError, OrderingGraph, PairVerdicts};
use crate::regions::SchemeId;
use crate::BroadcastSpec;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ClassifyError {
    #[error(transparent)]
    Ordering(#[from] OrderingError),
    #[error(transparent)]
    Optimize(#[from] OptimizeError),
    #[error("l = {l} outside [{lo}, {hi}]")]
    Partition { l: usize, lo: usize, hi: usize },
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct ClassifyOptions {
    /// Accept only degradedness as ordering evidence.
    pub strict: bool,
    /// Skip the union search for the capacity region.
    pub skip_region: bool,
}

/// How well an ordering condition is supported.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Support {
    Exact,
    Sampled,
    Undecided,
    Fails,
}

impl Support {
    fn and(self, other: Support) -> Support {
        self.max(other)
    }

    pub fn holds(self) -> bool {
        matches!(self, Support::Exact | Support::Sampled)
    }

    fn from_holds(h: Holds) -> Support {
        match h {
            Holds::Yes => Support::Exact,
            Holds::YesSampled => Support::Sampled,
            Holds::Undecided => Support::Undecided,
            Holds::No => Support::Fails,
        }
    }
}

/// An ordering requirement between canonical receivers (0-based).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Condition {
    /// `weaker ≺ stronger`
    MoreNoisy { weaker: usize, stronger: usize },
    /// `weaker ⪯ stronger`
    LessCapable { weaker: usize, stronger: usize },
}

impl Condition {
    pub fn evaluate(&self, graph: &OrderingGraph, strict: bool) -> Support {
        let pair = |w: usize, s: usize| -> &PairVerdicts {
            graph.pair(s, w).expect("graph covers every ordered pair")
        };
        let noisy = |p: &PairVerdicts| {
            let d = Support::from_holds(p.degraded.holds);
            if strict || d.holds() {
                d
            } else {
                Support::from_holds(p.less_noisy.holds)
            }
        };
        match *self {
            Condition::MoreNoisy { weaker, stronger } => noisy(pair(weaker, stronger)),
            Condition::LessCapable { weaker, stronger } => {
                let p = pair(weaker, stronger);
                let n = noisy(p);
                if strict || n.holds() {
                    n
                } else {
                    n.min(Support::from_holds(p.more_capable.holds))
                }
            }
        }
    }

    fn describe(&self, names: &[String]) -> String {
        match *self {
            Condition::MoreNoisy { weaker, stronger } => format!("{} ≺ {}", names[weaker], names[stronger]),
            Condition::LessCapable { weaker, stronger } => format!("{} ⪯ {}", names[weaker], names[stronger]),
        }
    }
}

/// A capacity class with its witnesses (0-based canonical receivers).
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum CapacityClass {
    /// A private receiver `r` less capable than the other private
    /// receivers and less noisy than every common receiver.
    Thm1i { r: usize },
    /// A common receiver `j` more noisy than every other receiver.
    Thm1ii { j: usize },
    /// A most-noisy common receiver `j` and a least-capable private receiver `r`.
    Thm1iii { j: usize, r: usize },
    /// Common receivers split into `c1` (containing the most-noisy `j`) and
    /// `c2` (each more noisy than `r`), with `|c1| = l - L`.
    Thm3 { l: usize, j: usize, r: usize, c1: Vec<usize>, c2: Vec<usize> },
    /// The `l = L+1` case: `c1 = {j}` is unconstrained.
    Cor2 { j: usize, r: usize, c2: Vec<usize> },
    /// The `l = K-1` case: `c2` is a single receiver.
    Cor3 { l: usize, j: usize, r: usize, c1: Vec<usize>, c2: Vec<usize> },
}

impl CapacityClass {
    pub fn name(&self) -> &'static str {
        match self {
            CapacityClass::Thm1i { .. } => "thm1-i",
            CapacityClass::Thm1ii { .. } => "thm1-ii",
            CapacityClass::Thm1iii { .. } => "thm1-iii",
            CapacityClass::Thm3 { .. } => "thm3",
            CapacityClass::Cor2 { .. } => "cor2",
            CapacityClass::Cor3 { .. } => "cor3",
        }
    }

    /// Common-receiver order `c1 ++ c2` for two-group classes.
    fn common_order(&self) -> Option<Vec<usize>> {
        match self {
            CapacityClass::Thm3 { c1, c2, .. } | CapacityClass::Cor3 { c1, c2, .. } => {
                Some(c1.iter().chain(c2).copied().collect())
            }
            CapacityClass::Cor2 { j, c2, .. } => Some(std::iter::once(*j).chain(c2.iter().copied()).collect()),
            _ => None,
        }
    }

    /// The channel relabeled for this class and the scheme giving its capacity region.
    pub fn scheme(&self, bc: &BroadcastSpec) -> (BroadcastSpec, SchemeId) {
        let k = bc.k();
        match self {
            CapacityClass::Thm1i { r } => (bc.clone(), SchemeId::Thm1i(r + 1)),
            CapacityClass::Thm1ii { j } => (bc.clone(), SchemeId::Thm1ii(j + 1)),
            CapacityClass::Thm1iii { j, r } => {
                let s = if k == 2 { SchemeId::Km2 } else { SchemeId::Thm3(k, j + 1, r + 1) };
                (bc.clone(), s)
            }
            _ => {
                let order = self.common_order().expect("two-group class");
                let arranged = bc.permute_common(&order);
                let pos = |x: usize| bc.l() + order.iter().position(|&c| c == x).expect("j in C1") + 1;
                let s = match *self {
                    CapacityClass::Thm3 { l, j, r, .. } => SchemeId::Thm3(l, pos(j), r + 1),
                    CapacityClass::Cor2 { r, .. } => SchemeId::Cor2(r + 1),
                    CapacityClass::Cor3 { j, r, .. } => SchemeId::Cor3(pos(j), r + 1),
                    _ => unreachable!(),
                };
                (arranged, s)
            }
        }
    }

    fn describe(&self, names: &[String]) -> String {
        let n = |i: &usize| names[*i].clone();
        let set = |v: &[usize]| format!("{{{}}}", v.iter().map(n).collect::<Vec<_>>().join(","));
        match self {
            CapacityClass::Thm1i { r } => format!("thm1-i r={}", n(r)),
            CapacityClass::Thm1ii { j } => format!("thm1-ii j={}", n(j)),
            CapacityClass::Thm1iii { j, r } => format!("thm1-iii j={} r={}", n(j), n(r)),
            CapacityClass::Thm3 { l, j, r, c1, c2 } => {
                format!("thm3 l={l} j={} r={} C1={} C2={}", n(j), n(r), set(c1), set(c2))
            }
            CapacityClass::Cor2 { j, r, c2 } => format!("cor2 r={} C1={} C2={}", n(r), set(&[*j]), set(c2)),
            CapacityClass::Cor3 { l, j, r, c1, c2 } => {
                format!("cor3 l={l} j={} r={} C1={} C2={}", n(j), n(r), set(c1), set(c2))
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClassMatch {
    pub class: CapacityClass,
    pub conditions: Vec<Condition>,
    pub support: Support,
    /// Scheme evaluated on the channel relabeled per [`CapacityClass::scheme`].
    pub scheme: SchemeId,
    pub aux_levels: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClassReport {
    pub names: Vec<String>,
    pub private: usize,
    pub strict: bool,
    pub matches: Vec<ClassMatch>,
    /// Index into `matches` of the class whose formula is emitted.
    pub selected: Option<usize>,
    pub graph: OrderingGraph,
    /// Capacity region when a class matched, otherwise the rate-splitting inner bound.
    pub region: Option<UnionRegion>,
    pub capacity_claim: bool,
    pub caveats: Vec<String>,
}

pub const NO_CLAIM: &str = "no capacity claim";
pub const SAMPLED_CAVEAT: &str = "capacity claim conditional on sampled orderings";

impl ClassReport {
    /// Re-evaluates every matched class against the attached verdicts.
    pub fn reverify(&self) -> bool {
        self.matches
            .iter()
            .all(|m| m.conditions.iter().all(|c| c.evaluate(&self.graph, self.strict).holds()))
    }

    pub fn selected_match(&self) -> Option<&ClassMatch> {
        self.selected.map(|i| &self.matches[i])
    }

    pub fn has(&self, name: &str) -> bool {
        self.matches.iter().any(|m| m.class.name() == name)
    }

    pub fn to_text(&self) -> String {
        self.to_string()
    }
}

impl fmt::Display for ClassReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "claim: {}", if self.capacity_claim { "capacity" } else { NO_CLAIM })?;
        writeln!(f, "evidence mode: {}", if self.strict { "strict" } else { "sampled" })?;
        writeln!(f, "matched classes:")?;
        for (i, m) in self.matches.iter().enumerate() {
            let mark = if Some(i) == self.selected { " (selected)" } else { "" };
            let conds: Vec<String> = m.conditions.iter().map(|c| c.describe(&self.names)).collect();
            writeln!(
                f,
                "  {} scheme={} support={:?}{mark}\n    conditions: {}",
                m.class.describe(&self.names),
                m.scheme,
                m.support,
                if conds.is_empty() { "none".to_string() } else { conds.join(", ") }
            )?;
        }
        writeln!(f, "ordering evidence:")?;
        for line in self.graph.table().lines() {
            writeln!(f, "  {line}")?;
        }
        match &self.region {
            Some(u) => {
                let kind = if self.capacity_claim { "capacity region" } else { "inner bound" };
                writeln!(f, "region ({kind}, scheme {}, gap {:.6}):", u.scheme, u.gap)?;
                for line in u.inner.to_record().lines() {
                    writeln!(f, "  {line}")?;
                }
            }
            None => writeln!(f, "region: not computed")?,
        }
        writeln!(f, "caveats:")?;
        for c in &self.caveats {
            writeln!(f, "  - {c}")?;
        }
        Ok(())
    }
}

/// All `k`-subsets of `items` in lexicographic order.
fn subsets(items: &[usize], k: usize) -> Vec<Vec<usize>> {
    if k == 0 {
        return vec![Vec::new()];
    }
    if items.len() < k {
        return Vec::new();
    }
    let mut out = Vec::new();
    for (i, &first) in items.iter().enumerate() {
        for mut rest in subsets(&items[i + 1..], k - 1) {
            rest.insert(0, first);
            out.push(rest);
        }
    }
    out
}

fn minimal_noisy(j: usize, group: &[usize]) -> impl Iterator<Item = Condition> + '_ {
    group
        .iter()
        .filter(move |&&c| c != j)
        .map(move |&c| Condition::MoreNoisy { weaker: j, stronger: c })
}

fn least_capable(r: usize, group: &[usize]) -> impl Iterator<Item = Condition> + '_ {
    group
        .iter()
        .filter(move |&&s| s != r)
        .map(move |&s| Condition::LessCapable { weaker: r, stronger: s })
}

type Candidate = (CapacityClass, Vec<Condition>);

fn theorem1_candidates(bc: &BroadcastSpec) -> Vec<Vec<Candidate>> {
    let s: Vec<usize> = bc.private_range().collect();
    let c: Vec<usize> = bc.common_range().collect();
    let case_i = s
        .iter()
        .map(|&r| {
            let conds = least_capable(r, &s)
                .chain(c.iter().map(|&cc| Condition::MoreNoisy { weaker: cc, stronger: r }))
                .collect();
            (CapacityClass::Thm1i { r }, conds)
        })
        .collect();
    let case_ii = c
        .iter()
        .map(|&j| {
            let conds = minimal_noisy(j, &c)
                .chain(s.iter().map(|&ss| Condition::MoreNoisy { weaker: j, stronger: ss }))
                .collect();
            (CapacityClass::Thm1ii { j }, conds)
        })
        .collect();
    let case_iii = c
        .iter()
        .flat_map(|&j| s.iter().map(move |&r| (j, r)))
        .map(|(j, r)| {
            let conds = minimal_noisy(j, &c).chain(least_capable(r, &s)).collect();
            (CapacityClass::Thm1iii { j, r }, conds)
        })
        .collect();
    vec![case_i, case_ii, case_iii]
}

fn theorem3_candidates(bc: &BroadcastSpec, l: usize) -> Vec<Candidate> {
    let (k, big_l) = (bc.k(), bc.l());
    let s: Vec<usize> = bc.private_range().collect();
    let c: Vec<usize> = bc.common_range().collect();
    let mut out = Vec::new();
    for c2 in subsets(&c, k - l) {
        let c1: Vec<usize> = c.iter().copied().filter(|x| !c2.contains(x)).collect();
        for &j in &c1 {
            for &r in &s {
                let conds = minimal_noisy(j, &c1)
                    .chain(least_capable(r, &s))
                    .chain(c2.iter().map(|&x| Condition::MoreNoisy { weaker: x, stronger: r }))
                    .collect();
                let class = if l == k {
                    CapacityClass::Thm1iii { j, r }
                } else if l == big_l + 1 {
                    CapacityClass::Cor2 { j, r, c2: c2.clone() }
                } else if l == k - 1 {
                    CapacityClass::Cor3 {
                        l,
                        j,
                        r,
                        c1: c1.clone(),
                        c2: c2.clone(),
                    }
                } else {
                    CapacityClass::Thm3 {
                        l,
                        j,
                        r,
                        c1: c1.clone(),
                        c2: c2.clone(),
                    }
                };
                out.push((class, conds));
            }
        }
    }
    out
}

struct Search<'a> {
    bc: &'a BroadcastSpec,
    graph: &'a OrderingGraph,
    strict: bool,
    matches: Vec<ClassMatch>,
    caveats: Vec<String>,
}

impl Search<'_> {
    /// Records the first candidate of a family that holds, or a caveat when
    /// the best a family reaches is undecided.
    fn family(&mut self, label: &str, cands: Vec<Candidate>) {
        let mut undecided = false;
        for (class, conditions) in cands {
            let support = conditions
                .iter()
                .fold(Support::Exact, |acc, c| acc.and(c.evaluate(self.graph, self.strict)));
            if support.holds() {
                let (_, scheme) = class.scheme(self.bc);
                self.matches.push(ClassMatch {
                    aux_levels: scheme.aux_levels(self.bc),
                    class,
                    conditions,
                    support,
                    scheme,
                });
                return;
            }
            undecided |= support == Support::Undecided;
        }
        if undecided {
            self.caveats
                .push(format!("{label}: membership undecided (ordering verdicts in the tie band)"));
        }
    }
}

fn run(
    bc: &BroadcastSpec,
    cfg: &SearchConfig,
    opts: &ClassifyOptions,
    families: impl FnOnce(&mut Search<'_>),
) -> Result<ClassReport, ClassifyError> {
    let graph = ordering_graph(bc, cfg)?;
    let mut search = Search {
        bc,
        graph: &graph,
        strict: opts.strict,
        matches: Vec::new(),
        caveats: Vec::new(),
    };
    families(&mut search);
    let Search { matches, mut caveats, .. } = search;
    // fewest auxiliary levels first; among single-level formulas the
    // unspecialized one, then enumeration order
    let selected = (0..matches.len()).min_by_key(|&i| {
        let generic = !matches!(matches[i].class, CapacityClass::Thm1iii { .. });
        (matches[i].aux_levels, generic, i)
    });
    let capacity_claim = selected.is_some();
    if let Some(i) = selected {
        if matches[i].support == Support::Sampled {
            caveats.push(SAMPLED_CAVEAT.to_string());
        }
    } else {
        caveats.push(format!("{NO_CLAIM}: no class matched; region is the rate-splitting inner bound"));
    }
    let region = if opts.skip_region {
        None
    } else {
        let (arranged, scheme) = match selected {
            Some(i) => matches[i].class.scheme(bc),
            None => (bc.clone(), SchemeId::Thm2),
        };
        let u = union_region(&arranged, scheme, cfg)?;
        caveats.push(format!(
            "union searched with auxiliary cardinalities {:?} (heuristic bound)",
            u.cardinalities
        ));
        Some(u)
    };
    Ok(ClassReport {
        names: bc.names().to_vec(),
        private: bc.l(),
        strict: opts.strict,
        matches,
        selected,
        graph,
        region,
        capacity_claim,
        caveats,
    })
}

fn theorem1_families(s: &mut Search<'_>) {
    let [i, ii, iii]: [Vec<Candidate>; 3] = theorem1_candidates(s.bc).try_into().expect("three cases");
    s.family("thm1-i", i);
    s.family("thm1-ii", ii);
    s.family("thm1-iii", iii);
}

/// Checks the three single-auxiliary classes.
pub fn classify_theorem1(
    bc: &BroadcastSpec,
    cfg: &SearchConfig,
    opts: &ClassifyOptions,
) -> Result<ClassReport, ClassifyError> {
    run(bc, cfg, opts, theorem1_families)
}

/// Checks the two-group class for a fixed `l`, over all splits of the common receivers.
pub fn classify_theorem3(
    bc: &BroadcastSpec,
    l: usize,
    cfg: &SearchConfig,
    opts: &ClassifyOptions,
) -> Result<ClassReport, ClassifyError> {
    let (lo, hi) = (bc.l() + 1, bc.k());
    if !(lo..=hi).contains(&l) {
        return Err(ClassifyError::Partition { l, lo, hi });
    }
    run(bc, cfg, opts, |s| s.family(&format!("thm3 l={l}"), theorem3_candidates(bc, l)))
}

/// Runs every class check and emits the capacity region of the cheapest
/// matched formula, or the rate-splitting inner bound with no claim.
pub fn capacity_report(
    bc: &BroadcastSpec,
    cfg: &SearchConfig,
    opts: &ClassifyOptions,
) -> Result<ClassReport, ClassifyError> {
    run(bc, cfg, opts, |s| {
        theorem1_families(s);
        for l in s.bc.l() + 1..s.bc.k() {
            s.family(&format!("thm3 l={l}"), theorem3_candidates(s.bc, l));
        }
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::probkit::ChannelMatrix;

    fn cfg() -> SearchConfig {
        SearchConfig::fast(3)
    }

    fn only_classes() -> ClassifyOptions {
        ClassifyOptions {
            skip_region: true,
            ..Default::default()
        }
    }

    fn bscs(eps: &[f64], l: usize) -> BroadcastSpec {
        BroadcastSpec::canonical(eps.iter().map(|&e| ChannelMatrix::bsc(e)).collect(), l).unwrap()
    }

    #[test]
    fn subsets_in_order() {
        assert_eq!(subsets(&[1, 2, 3], 2), vec![vec![1, 2], vec![1, 3], vec![2, 3]]);
        assert_eq!(subsets(&[1, 2], 0), vec![Vec::<usize>::new()]);
        assert!(subsets(&[1], 2).is_empty());
    }

    #[test]
    fn two_receivers_are_always_case_iii() {
        let bc = BroadcastSpec::canonical(vec![ChannelMatrix::bsc(0.3), ChannelMatrix::bec(0.2)], 1).unwrap();
        let rep = classify_theorem1(&bc, &cfg(), &only_classes()).unwrap();
        assert!(rep.has("thm1-iii"));
        assert!(rep.capacity_claim);
        assert_eq!(rep.selected_match().unwrap().scheme, SchemeId::Km2);
    }

    #[test]
    fn bsc_cascade_is_case_i() {
        let rep = classify_theorem1(&bscs(&[0.05, 0.1, 0.2], 1), &cfg(), &only_classes()).unwrap();
        let m = rep.matches.iter().find(|m| m.class.name() == "thm1-i").unwrap();
        assert_eq!(m.class, CapacityClass::Thm1i { r: 0 });
        assert_eq!(m.support, Support::Exact);
        assert!(rep.reverify());
    }

    #[test]
    fn two_private_receivers_case_ii_and_iii() {
        let rep = classify_theorem1(&bscs(&[0.05, 0.1, 0.3], 2), &cfg(), &only_classes()).unwrap();
        assert!(rep.matches.iter().any(|m| m.class == CapacityClass::Thm1ii { j: 2 }));
        assert!(rep.has("thm1-iii"));
    }

    #[test]
    fn strict_mode_rejects_sampled_evidence() {
        // BEC(0.3) is less noisy than BSC(0.1) but not a degraded version of it
        let bc = BroadcastSpec::canonical(
            vec![ChannelMatrix::bec(0.3), ChannelMatrix::bsc(0.1), ChannelMatrix::bsc(0.1)],
            1,
        )
        .unwrap();
        let loose = classify_theorem1(&bc, &cfg(), &only_classes()).unwrap();
        let m = loose.matches.iter().find(|m| m.class.name() == "thm1-i").unwrap();
        assert_eq!(m.support, Support::Sampled);
        let cor2 = classify_theorem3(&bc, 2, &cfg(), &only_classes()).unwrap();
        assert_eq!(cor2.selected_match().unwrap().support, Support::Sampled);
        assert!(cor2.caveats.iter().any(|c| c == SAMPLED_CAVEAT));
        let strict = classify_theorem1(
            &bc,
            &cfg(),
            &ClassifyOptions {
                strict: true,
                skip_region: true,
            },
        )
        .unwrap();
        assert!(!strict.has("thm1-i"));
    }

    #[test]
    fn two_receiver_report_carries_the_km_union() {
        let bc = bscs(&[0.1, 0.2], 1);
        let cfg = SearchConfig {
            lambdas: vec![0.0, 1.0],
            multistarts: 1,
            iterations: 10,
            cardinalities: Some(vec![3]),
            ..cfg()
        };
        let rep = capacity_report(&bc, &cfg, &ClassifyOptions::default()).unwrap();
        let u = rep.region.as_ref().unwrap();
        assert_eq!(u.scheme, SchemeId::Km2);
        assert!(rep.to_text().contains("region (capacity region, scheme km2"));
        assert!(rep.caveats.iter().any(|c| c.contains("cardinalities [3]")));
    }

    #[test]
    fn top_group_split_is_case_iii() {
        let bc = bscs(&[0.2, 0.1, 0.3, 0.05], 1);
        let rep = classify_theorem3(&bc, 4, &cfg(), &only_classes()).unwrap();
        assert_eq!(rep.matches[0].class, CapacityClass::Thm1iii { j: 2, r: 0 });
        assert!(classify_theorem3(&bc, 1, &cfg(), &only_classes()).is_err());
    }

    #[test]
    fn cor2_relabels_common_receivers() {
        // Y1 dominates Y3, Y4 but not Y2
        let bc = bscs(&[0.2, 0.1, 0.3, 0.25], 1);
        let rep = classify_theorem3(&bc, 2, &cfg(), &only_classes()).unwrap();
        let m = &rep.matches[0];
        assert_eq!(
            m.class,
            CapacityClass::Cor2 {
                j: 1,
                r: 0,
                c2: vec![2, 3]
            }
        );
        let (arranged, scheme) = m.class.scheme(&bc);
        assert_eq!(scheme, SchemeId::Cor2(1));
        assert_eq!(arranged.names(), bc.names());
        assert!(!rep.has("thm1-i"));
    }

    #[test]
    fn case_i_implies_cor2() {
        let bc = bscs(&[0.05, 0.1, 0.2, 0.3], 1);
        let rep = capacity_report(&bc, &cfg(), &only_classes()).unwrap();
        assert!(rep.has("thm1-i"));
        assert!(rep.has("cor2"));
        assert!(rep.reverify());
        assert_eq!(rep.selected_match().unwrap().aux_levels, 1);
    }

    #[test]
    fn incomparable_receivers_give_no_claim() {
        // BEC(0.6) and BSC(0.11) are incomparable (0.6 > 4·0.11·0.89), and
        // neither is more noisy than the private BSC(0.2)
        let bc = BroadcastSpec::canonical(
            vec![ChannelMatrix::bsc(0.2), ChannelMatrix::bsc(0.11), ChannelMatrix::bec(0.6)],
            1,
        )
        .unwrap();
        let rep = capacity_report(&bc, &cfg(), &only_classes()).unwrap();
        assert!(rep.matches.is_empty(), "{rep}");
        assert!(!rep.capacity_claim);
        assert!(rep.caveats.iter().any(|c| c.starts_with(NO_CLAIM)));
        assert!(rep.to_text().contains("claim: no capacity claim"));
    }
}
