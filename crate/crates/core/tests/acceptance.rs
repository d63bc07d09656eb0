//! Acceptance checks. Each criterion prints one PASS/FAIL line; the process
//! exits nonzero if any criterion fails.

use std::time::Instant;

use nestedcast::classify::{capacity_report, classify_theorem1, ClassifyOptions};
use nestedcast::fme::verify_split_elimination;
use nestedcast::optimize::{compare_schemes, union_region};
use nestedcast::oracle::split_rate_oracle;
use nestedcast::ordering::{is_degraded, is_less_noisy, is_more_capable, Holds};
use nestedcast::probkit::{binary_entropy, eval_mi_table, ChannelMatrix, MarkovChain, ProbVector};
use nestedcast::regions::{
    region, region_jointdec, region_superposition, region_thm2, scheme_halfspaces, SchemeId,
};
use nestedcast::rng::stream;
use nestedcast::{BroadcastSpec, SearchConfig};
use rand::Rng;

const SEED: u64 = 2024;

type Verdict = Result<String, String>;

fn check(ok: bool, detail: String) -> Verdict {
    if ok {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn budget(seed: u64) -> SearchConfig {
    SearchConfig::fast(seed)
}

/// Moderate optimizer budget for the union comparisons.
fn union_budget(seed: u64) -> SearchConfig {
    SearchConfig {
        multistarts: 3,
        iterations: 30,
        lambdas: vec![0.0, 0.5, 1.0, 2.0, 5.0, 10.0],
        refine: 0,
        ..SearchConfig::fast(seed)
    }
}

fn fme_lemmas() -> Verdict {
    let mut runs = 0;
    let mut failed = Vec::new();
    for k in 2..=6 {
        for l in 1..k {
            let reports = verify_split_elimination(k, l, None, 100, SEED).map_err(|e| e.to_string())?;
            for r in reports {
                runs += 1;
                if !r.all_passed() {
                    failed.push(format!("K={k} L={l}: {r}"));
                }
            }
        }
    }
    check(
        failed.is_empty(),
        format!("{runs} eliminations x 100 exact trials, {} failing {failed:?}", failed.len()),
    )
}

fn random_bc(rng: &mut impl Rng, k: usize, l: usize, x: usize) -> BroadcastSpec {
    let rx = (0..k)
        .map(|_| {
            let out = rng.random_range(2..=3);
            ChannelMatrix::random(x, out, rng)
        })
        .collect();
    BroadcastSpec::canonical(rx, l).unwrap()
}

fn split_rate_oracle_grid() -> Verdict {
    let mut rng = stream(SEED, 2);
    let mut interior = 0;
    let mut boundary = 0;
    let mut points = 0;
    for i in 0..20 {
        let k = 3 + i % 3;
        let l = rng.random_range(1..k);
        let bc = random_bc(&mut rng, k, l, 2);
        let chain = MarkovChain::random(&vec![3; k - l], 2, &mut rng);
        let r = split_rate_oracle(&bc, &chain, 0.005).map_err(|e| e.to_string())?;
        interior += r.interior_disagreements;
        boundary += r.disagreements.len() - r.interior_disagreements;
        points += r.points;
    }
    check(
        interior == 0,
        format!("20 instances, {points} grid points, {interior} interior / {boundary} boundary disagreements"),
    )
}

/// `I(X;Y)` gap `BEC(e) - BSC(eps)` at `P(X=1) = p`.
fn bec_bsc_gap(e: f64, eps: f64, p: f64) -> f64 {
    let q = p * (1.0 - eps) + (1.0 - p) * eps;
    (1.0 - e) * binary_entropy(p) - (binary_entropy(q) - binary_entropy(eps))
}

/// Dense-grid more-capable check: the gap is nonnegative at every grid input.
fn grid_more_capable(e: f64, eps: f64) -> bool {
    (0..=10_000).all(|i| bec_bsc_gap(e, eps, i as f64 / 10_000.0) >= -1e-12)
}

/// Dense-grid less-noisy check: the gap is concave in the input law.
fn grid_less_noisy(e: f64, eps: f64) -> bool {
    let h = 1e-3;
    (1..1000).all(|i| {
        let p = i as f64 * h;
        bec_bsc_gap(e, eps, p - h) + bec_bsc_gap(e, eps, p + h) - 2.0 * bec_bsc_gap(e, eps, p) <= 1e-12
    })
}

/// Smallest `e` in `[lo, hi]` where `holds` turns false, assuming it holds at `lo`.
fn bisect(mut lo: f64, mut hi: f64, holds: impl Fn(f64) -> bool) -> Option<f64> {
    if !holds(lo) || holds(hi) {
        return None;
    }
    for _ in 0..14 {
        let mid = 0.5 * (lo + hi);
        if holds(mid) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Some(0.5 * (lo + hi))
}

fn ordering_ground_truth() -> Verdict {
    let cfg = budget(SEED);
    let eps = [0.01, 0.05, 0.1, 0.2, 0.3, 0.4, 0.49];
    let mut wrong = Vec::new();
    for &a in &eps {
        for &b in &eps {
            if a == b {
                continue;
            }
            let (ws, wc) = (ChannelMatrix::bsc(a), ChannelMatrix::bsc(b));
            let expect = a < b;
            let d = is_degraded(&ws, &wc).unwrap().holds.is_yes();
            let ln = is_less_noisy(&ws, &wc, &cfg).unwrap().holds.is_yes();
            let mc = is_more_capable(&ws, &wc, &cfg).unwrap().holds.is_yes();
            if [d, ln, mc] != [expect; 3] {
                wrong.push(format!("BSC({a}) vs BSC({b}): {d}/{ln}/{mc}"));
            }
        }
    }
    let eps = 0.1;
    let bsc = ChannelMatrix::bsc(eps);
    let ln = bisect(0.2, 0.6, |e| {
        is_less_noisy(&ChannelMatrix::bec(e), &bsc, &cfg).unwrap().holds.is_yes()
    });
    let mc = bisect(0.3, 0.7, |e| {
        is_more_capable(&ChannelMatrix::bec(e), &bsc, &cfg).unwrap().holds.is_yes()
    });
    let ln_grid = bisect(0.2, 0.6, |e| grid_less_noisy(e, eps));
    let mc_grid = bisect(0.3, 0.7, |e| grid_more_capable(e, eps));
    let (ln_true, mc_true) = (4.0 * eps * (1.0 - eps), binary_entropy(eps));
    let near = |x: Option<f64>, t: f64| x.is_some_and(|x| (x - t).abs() <= 0.01);
    let ok = wrong.is_empty()
        && near(ln, ln_true)
        && near(mc, mc_true)
        && near(ln_grid, ln_true)
        && near(mc_grid, mc_true)
        && near(ln, ln_grid.unwrap_or(f64::NAN))
        && near(mc, mc_grid.unwrap_or(f64::NAN));
    check(
        ok,
        format!(
            "BSC crossover mismatches {wrong:?}; less-noisy threshold {ln:?} (grid {ln_grid:?}, analytic {ln_true:.4}); \
             more-capable threshold {mc:?} (grid {mc_grid:?}, analytic {mc_true:.4})"
        ),
    )
}

fn implication_chain() -> Verdict {
    let cfg = budget(SEED);
    let mut rng = stream(SEED, 4);
    let (mut violations, mut undecided, mut constructed_found) = (Vec::new(), 0, 0);
    for i in 0..200 {
        let x = rng.random_range(2..=3);
        let ws = ChannelMatrix::random(x, rng.random_range(2..=4), &mut rng);
        let wc = if i % 2 == 0 {
            let q = ChannelMatrix::random(ws.output_size(), rng.random_range(2..=3), &mut rng);
            ws.compose(&q).unwrap()
        } else {
            ChannelMatrix::random(x, rng.random_range(2..=4), &mut rng)
        };
        let d = is_degraded(&ws, &wc).unwrap().holds;
        let ln = is_less_noisy(&ws, &wc, &cfg).unwrap().holds;
        let mc = is_more_capable(&ws, &wc, &cfg).unwrap().holds;
        if i % 2 == 0 && d.is_yes() {
            constructed_found += 1;
        }
        undecided += [ln, mc].iter().filter(|h| **h == Holds::Undecided).count();
        if (d.is_yes() && ln == Holds::No) || (ln.is_yes() && mc == Holds::No) || (d.is_yes() && mc == Holds::No) {
            violations.push(format!("pair {i}: {d:?} {ln:?} {mc:?}"));
        }
    }
    check(
        violations.is_empty() && constructed_found == 100,
        format!(
            "200 pairs, {} violations {violations:?}, {constructed_found}/100 constructed pairs recognised as degraded, {undecided} undecided verdicts",
            violations.len()
        ),
    )
}

fn scheme_containment() -> Verdict {
    let mut rng = stream(SEED, 5);
    let mut escapes = 0;
    for _ in 0..100 {
        let k = rng.random_range(3..=5);
        let l = rng.random_range(1..k);
        let x = rng.random_range(2..=3);
        let bc = random_bc(&mut rng, k, l, x);
        let pu = ProbVector::random(3, &mut rng);
        let px = ChannelMatrix::random(3, x, &mut rng);
        let sup = region_superposition(&bc, &eval_mi_table(&MarkovChain::superposition(pu.clone(), px.clone()).unwrap(), &bc).unwrap()).unwrap();
        let chain = MarkovChain::embed_constant(pu, px, k - l);
        let thm2 = region_thm2(&bc, &eval_mi_table(&chain, &bc).unwrap()).unwrap();
        if !thm2.contains_polygon(&sup, 1e-9) {
            escapes += 1;
        }
    }
    let mut unequal = 0;
    for _ in 0..50 {
        let k = rng.random_range(2..=6);
        let l = rng.random_range(1..k);
        let bc = random_bc(&mut rng, k, l, 2);
        let chain = MarkovChain::random(&[3], 2, &mut rng);
        let mi = eval_mi_table(&chain, &bc).unwrap();
        let mut a = scheme_halfspaces(&bc, &mi, SchemeId::Cor1(k)).unwrap();
        let mut b = scheme_halfspaces(&bc, &mi, SchemeId::SupK).unwrap();
        let key = |h: &nestedcast::regions::Halfspace2D| h.label.clone();
        a.sort_by_key(key);
        b.sort_by_key(key);
        if a != b {
            unequal += 1;
        }
    }
    check(
        escapes == 0 && unequal == 0,
        format!("superposition outside layered region of its constant embedding: {escapes}/100; top-level split differs from superposition: {unequal}/50"),
    )
}

/// Receivers in a two-group class with `l = L+1`: private receiver `L` is
/// degraded from the other private ones, every receiver after `L+1` is
/// degraded from it, and receiver `L+1` is arbitrary.
fn cascade_class(rng: &mut impl Rng, k: usize, l: usize) -> BroadcastSpec {
    let top = ChannelMatrix::random(2, 3, rng);
    let weakest = top.compose(&ChannelMatrix::random(3, 3, rng)).unwrap();
    let mut rx = Vec::new();
    for s in 0..l - 1 {
        let perm: Vec<usize> = (0..3).map(|i| (i + s) % 3).collect();
        rx.push(top.permute_outputs(&perm));
    }
    rx.push(weakest.clone());
    rx.push(ChannelMatrix::random(2, rng.random_range(2..=4), rng));
    for _ in l + 1..k {
        let out = rng.random_range(2..=3);
        rx.push(weakest.compose(&ChannelMatrix::random(3, out, rng)).unwrap());
    }
    BroadcastSpec::canonical(rx, l).unwrap()
}

fn joint_decoding_suffices() -> Verdict {
    let mut rng = stream(SEED, 6);
    let (mut cases, mut outside) = ([0usize; 2], Vec::new());
    for i in 0..25 {
        let k = rng.random_range(3..=5);
        let l = rng.random_range(1..=k - 2);
        let bc = cascade_class(&mut rng, k, l);
        let chain = MarkovChain::random(&[3, 3], 2, &mut rng);
        let mi = eval_mi_table(&chain, &bc).unwrap();
        let indirect = region(&bc, &mi, SchemeId::Cor2(l)).unwrap();
        let corner = indirect
            .vertices
            .iter()
            .copied()
            .max_by(|a, b| a[0].total_cmp(&b[0]).then(a[1].total_cmp(&b[1])))
            .unwrap();
        let top = |rx: usize| mi.aux(0, rx).unwrap();
        let first_case = (l + 1..k).all(|c| top(c) >= top(l));
        let joint = if first_case {
            cases[0] += 1;
            region_jointdec(&bc, &mi).unwrap()
        } else {
            cases[1] += 1;
            let card = chain.level_card(0);
            let merged = MarkovChain::new(
                chain.top.clone(),
                vec![ChannelMatrix::identity(card), chain.transition(0, 2)],
            )
            .unwrap();
            region_jointdec(&bc, &eval_mi_table(&merged, &bc).unwrap()).unwrap()
        };
        if !joint.contains(corner, 1e-9) {
            outside.push(format!("instance {i} (case {})", if first_case { 1 } else { 2 }));
        }
    }
    let mut worst: f64 = 0.0;
    for i in 0..2 {
        let bc = cascade_class(&mut rng, 3 + i, 1);
        let rows = compare_schemes(&bc, SchemeId::JointDec, SchemeId::Cor1(2), &union_budget(SEED + i as u64))
            .map_err(|e| e.to_string())?;
        worst = rows.iter().map(|r| r.gap.abs()).fold(worst, f64::max);
    }
    check(
        outside.is_empty() && worst <= 0.01,
        format!(
            "corner outside joint-decoding region: {outside:?} (cases {}/{}); worst union support gap {worst:.5} bits",
            cases[0], cases[1]
        ),
    )
}

fn extra_receiver_invariance() -> Verdict {
    let mut rng = stream(SEED, 7);
    let mut worst: f64 = 0.0;
    let mut unmatched = 0;
    for i in 0..3 {
        let private = ChannelMatrix::random(2, 3, &mut rng);
        let extra = ChannelMatrix::random(2, 3, &mut rng);
        let weaker = extra.compose(&ChannelMatrix::random(3, 2, &mut rng)).unwrap();
        let base = BroadcastSpec::canonical(vec![private.clone(), weaker.clone()], 1).unwrap();
        let grown = BroadcastSpec::canonical(vec![private, weaker, extra], 1).unwrap();
        let opts = ClassifyOptions { strict: false, skip_region: true };
        if !classify_theorem1(&base, &budget(SEED), &opts).map_err(|e| e.to_string())?.capacity_claim {
            unmatched += 1;
        }
        let cfg = union_budget(SEED + 10 + i);
        let a = union_region(&base, SchemeId::SupK, &cfg).map_err(|e| e.to_string())?;
        let b = union_region(&grown, SchemeId::SupK, &cfg).map_err(|e| e.to_string())?;
        for (p, q) in a.points.iter().zip(&b.points) {
            assert_eq!(p.lambda, q.lambda);
            worst = worst.max((p.value - q.value).abs());
        }
    }
    check(
        worst <= 0.01 && unmatched == 0,
        format!("3 instances, worst support change {worst:.2e} bits, {unmatched} base instances without a claim"),
    )
}

fn two_receiver_sanity() -> Verdict {
    let mut rng = stream(SEED, 8);
    let opts = ClassifyOptions { strict: false, skip_region: true };
    let mut other = Vec::new();
    for i in 0..20 {
        let x = rng.random_range(2..=3);
        let bc = random_bc(&mut rng, 2, 1, x);
        let report = capacity_report(&bc, &budget(SEED + i), &opts).map_err(|e| e.to_string())?;
        let name = report.selected_match().map(|m| m.class.name());
        if !report.capacity_claim || name != Some("thm1-iii") {
            other.push(format!("instance {i}: {name:?}"));
        }
    }
    let bc = BroadcastSpec::canonical(vec![ChannelMatrix::bsc(0.1), ChannelMatrix::bsc(0.2)], 1).unwrap();
    let u = union_region(&bc, SchemeId::Km2, &budget(SEED)).map_err(|e| e.to_string())?;
    let axis = u.points.iter().find(|p| p.lambda == 0.0).unwrap();
    let ok_corner = (axis.corner[1] - 0.531).abs() <= 0.01 && axis.corner[0].abs() <= 1e-6;
    check(
        other.is_empty() && ok_corner,
        format!(
            "20/20 two-receiver reports expected in case iii, exceptions {other:?}; lambda=0 corner ({:.6}, {:.6})",
            axis.corner[0], axis.corner[1]
        ),
    )
}

fn main() {
    let criteria: [(&str, fn() -> Verdict); 8] = [
        ("split-rate elimination identities", fme_lemmas),
        ("closed form vs split-rate oracle", split_rate_oracle_grid),
        ("ordering ground truth", ordering_ground_truth),
        ("degraded => less noisy => more capable", implication_chain),
        ("scheme containment", scheme_containment),
        ("joint decoding suffices for one indirect group", joint_decoding_suffices),
        ("stronger extra common receiver leaves region unchanged", extra_receiver_invariance),
        ("two-receiver sanity", two_receiver_sanity),
    ];
    let mut failures = 0;
    for (i, (name, run)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let verdict = run();
        let secs = start.elapsed().as_secs_f64();
        match verdict {
            Ok(detail) => println!("[PASS] {}. {name} ({secs:.1} s): {detail}", i + 1),
            Err(detail) => {
                failures += 1;
                println!("[FAIL] {}. {name} ({secs:.1} s): {detail}", i + 1);
            }
        }
    }
    println!("acceptance: {}/8 criteria passed", 8 - failures);
    if failures > 0 {
        std::process::exit(1);
    }
}
