//! Halfspace descriptions of the achievable-rate regions for a fixed coding
//! chain, and the split-rate reliability polytope they are projected from.
//!
//! Receiver and level indices in [`SchemeId`] and in labels are 1-based:
//! receiver `Y{i}` is canonical position `i - 1` of the [`BroadcastSpec`],
//! and the auxiliary `U{c}` is the one decoded (directly or indirectly) by
//! common receiver `c`. The topmost auxiliary is always `U{K}`.

mod polygon;

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use polygon::{downward_hull, halfspaces_to_polygon, Halfspace2D, RegionPolygon, VERTEX_TOL};

use crate::fme::{Affine, Instantiation, LinearSystem, Row};
use crate::lp::{exact_from_f64, int};
use crate::probkit::{MiTable, MissingAtom, ProbError};
use crate::BroadcastSpec;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum RegionError {
    #[error(transparent)]
    MissingAtom(#[from] MissingAtom),
    #[error("coding chain does not match the channel: {0}")]
    Chain(#[from] ProbError),
    #[error("scheme {scheme} needs a chain with {expected} auxiliary level(s), the table has {found}")]
    LevelMismatch {
        scheme: String,
        expected: usize,
        found: usize,
    },
    #[error("invalid scheme: {0}")]
    InvalidScheme(String),
    #[error("halfspace list does not bound the region")]
    Unbounded,
    #[error("halfspace {0} has invalid coefficients")]
    InvalidHalfspace(String),
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
}

/// Which achievable-region formula to evaluate.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum SchemeId {
    /// Two-receiver superposition region; requires `K = 2`.
    Km2,
    /// K-receiver superposition coding with joint decoding at the private receivers.
    SupK,
    /// Rate splitting over the full chain `U_K -> ... -> U_{L+1} -> X`.
    Thm2,
    /// Two-level split: `C1 = {L+1..l}` decode `U_l`, `C2 = {l+1..K}` decode `U_K`.
    Cor1(usize),
    /// The two-level split specialized to one critical common receiver `j`
    /// in `C1` and one critical private receiver `r`: `(l, j, r)`.
    Thm3(usize, usize, usize),
    /// `l = L+1` specialization with private receiver `r`; no sum-rate line.
    Cor2(usize),
    /// `l = K-1` specialization `(j, r)`; no sum-rate line.
    Cor3(usize, usize),
    /// Two-level split with `l = L+1` where receiver `L+1` decodes uniquely.
    JointDec,
    /// Superposition with a single critical private receiver `r`.
    Thm1i(usize),
    /// Superposition with a single critical common receiver `j`.
    Thm1ii(usize),
}

impl SchemeId {
    /// Number of auxiliary levels the coding chain must have.
    pub fn aux_levels(&self, bc: &BroadcastSpec) -> usize {
        let (k, l) = (bc.k(), bc.l());
        match *self {
            SchemeId::Km2 | SchemeId::SupK | SchemeId::Thm1i(_) | SchemeId::Thm1ii(_) => 1,
            SchemeId::Thm2 => k - l,
            SchemeId::Cor1(lv) | SchemeId::Thm3(lv, _, _) => {
                if lv == k {
                    1
                } else {
                    2
                }
            }
            SchemeId::Cor2(_) | SchemeId::Cor3(_, _) | SchemeId::JointDec => 2,
        }
    }

    /// Receiver index `c` (1-based) attached to each chain level, top first.
    pub fn level_indices(&self, bc: &BroadcastSpec) -> Vec<usize> {
        let (k, l) = (bc.k(), bc.l());
        match *self {
            SchemeId::Thm2 => (l + 1..=k).rev().collect(),
            SchemeId::Cor1(lv) | SchemeId::Thm3(lv, _, _) if lv < k => vec![k, lv],
            SchemeId::Cor2(_) | SchemeId::JointDec => vec![k, l + 1],
            SchemeId::Cor3(_, _) => vec![k, k - 1],
            _ => vec![k],
        }
    }

    /// Checks parameter ranges against the channel.
    pub fn validate(&self, bc: &BroadcastSpec) -> Result<(), RegionError> {
        let (k, l) = (bc.k(), bc.l());
        let private = |r: usize| (1..=l).contains(&r);
        let common = |c: usize| (l + 1..=k).contains(&c);
        let bad = |why: String| Err(RegionError::InvalidScheme(format!("{self}: {why}")));
        match *self {
            SchemeId::Km2 if k != 2 => bad(format!("needs K = 2, channel has K = {k}")),
            SchemeId::Cor1(lv) if !common(lv) => bad(format!("l must lie in [{}, {k}]", l + 1)),
            SchemeId::Thm3(lv, j, r) => {
                if !common(lv) {
                    bad(format!("l must lie in [{}, {k}]", l + 1))
                } else if !(l + 1..=lv).contains(&j) {
                    bad(format!("j must lie in C1 = [{}, {lv}]", l + 1))
                } else if !private(r) {
                    bad(format!("r must lie in S = [1, {l}]"))
                } else {
                    Ok(())
                }
            }
            SchemeId::Cor2(r) => {
                if k < l + 2 {
                    bad("needs at least two common receivers".into())
                } else if !private(r) {
                    bad(format!("r must lie in S = [1, {l}]"))
                } else {
                    Ok(())
                }
            }
            SchemeId::Cor3(j, r) => {
                if k < l + 2 {
                    bad("needs at least two common receivers".into())
                } else if !(l + 1..k).contains(&j) {
                    bad(format!("j must lie in [{}, {}]", l + 1, k - 1))
                } else if !private(r) {
                    bad(format!("r must lie in S = [1, {l}]"))
                } else {
                    Ok(())
                }
            }
            SchemeId::JointDec if k < l + 2 => bad("needs at least two common receivers".into()),
            SchemeId::Thm1i(r) if !private(r) => bad(format!("r must lie in S = [1, {l}]")),
            SchemeId::Thm1ii(j) if !common(j) => bad(format!("j must lie in C = [{}, {k}]", l + 1)),
            _ => Ok(()),
        }
    }
}

impl fmt::Display for SchemeId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SchemeId::Km2 => write!(f, "km2"),
            SchemeId::SupK => write!(f, "sup"),
            SchemeId::Thm2 => write!(f, "thm2"),
            SchemeId::Cor1(l) => write!(f, "cor1:{l}"),
            SchemeId::Thm3(l, j, r) => write!(f, "thm3:{l}:{j}:{r}"),
            SchemeId::Cor2(r) => write!(f, "cor2:{r}"),
            SchemeId::Cor3(j, r) => write!(f, "cor3:{j}:{r}"),
            SchemeId::JointDec => write!(f, "jointdec"),
            SchemeId::Thm1i(r) => write!(f, "thm1i:{r}"),
            SchemeId::Thm1ii(j) => write!(f, "thm1ii:{j}"),
        }
    }
}

impl FromStr for SchemeId {
    type Err = RegionError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let mut parts = s.trim().split(':');
        let name = parts.next().unwrap_or("").to_ascii_lowercase();
        let args: Vec<usize> = parts
            .map(|p| p.parse::<usize>())
            .collect::<Result<_, _>>()
            .map_err(|_| RegionError::InvalidScheme(format!("bad parameters in `{s}`")))?;
        let want = |n: usize| {
            if args.len() == n {
                Ok(())
            } else {
                Err(RegionError::InvalidScheme(format!(
                    "`{name}` takes {n} parameter(s), got {}",
                    args.len()
                )))
            }
        };
        Ok(match name.as_str() {
            "km2" => want(0).map(|_| SchemeId::Km2)?,
            "sup" | "supk" => want(0).map(|_| SchemeId::SupK)?,
            "thm2" => want(0).map(|_| SchemeId::Thm2)?,
            "cor1" => want(1).map(|_| SchemeId::Cor1(args[0]))?,
            "thm3" => want(3).map(|_| SchemeId::Thm3(args[0], args[1], args[2]))?,
            "cor2" => want(1).map(|_| SchemeId::Cor2(args[0]))?,
            "cor3" => want(2).map(|_| SchemeId::Cor3(args[0], args[1]))?,
            "jointdec" => want(0).map(|_| SchemeId::JointDec)?,
            "thm1i" => want(1).map(|_| SchemeId::Thm1i(args[0]))?,
            "thm1ii" => want(1).map(|_| SchemeId::Thm1ii(args[0]))?,
            _ => return Err(RegionError::InvalidScheme(format!("unknown scheme `{s}`"))),
        })
    }
}

/// Reads atoms from an [`MiTable`] by 1-based receiver and level indices.
struct Atoms<'a> {
    mi: &'a MiTable,
    levels: Vec<usize>,
}

impl Atoms<'_> {
    fn level(&self, c: usize) -> usize {
        self.levels
            .iter()
            .position(|&x| x == c)
            .unwrap_or_else(|| panic!("level U{c} not in chain {:?}", self.levels))
    }

    /// I(U_c; Y_i)
    fn aux(&self, c: usize, i: usize) -> Result<f64, MissingAtom> {
        self.mi.aux(self.level(c), i - 1)
    }

    /// I(X; Y_i | U_c)
    fn x_given(&self, c: usize, i: usize) -> Result<f64, MissingAtom> {
        self.mi.x_given(self.level(c), i - 1)
    }

    /// I(X; Y_i)
    fn x(&self, i: usize) -> Result<f64, MissingAtom> {
        self.mi.x(i - 1)
    }

    /// I(U_c; Y_i | U_b), `b` above `c`
    fn aux_given(&self, c: usize, b: usize, i: usize) -> Result<f64, MissingAtom> {
        self.mi.aux_given(self.level(c), self.level(b), i - 1)
    }
}

fn lbl_r0(c: usize, i: usize) -> String {
    format!("R0<=I(U{c};Y{i})")
}

fn lbl_r1(s: usize, c: usize) -> String {
    format!("R1<=I(X;Y{s}|U{c})")
}

fn lbl_sum(s: usize) -> String {
    format!("R0+R1<=I(X;Y{s})")
}

fn lbl_split(s: usize, c: usize, i: usize) -> String {
    format!("R0+R1<=I(X;Y{s}|U{c})+I(U{c};Y{i})")
}

fn lbl_joint(s: usize, c: usize, i: usize, b: usize) -> String {
    format!("R1<=I(X;Y{s}|U{c})+I(U{c};Y{i}|U{b})")
}

/// Emits the halfspace list of `scheme` for one coding chain.
pub fn scheme_halfspaces(
    bc: &BroadcastSpec,
    mi: &MiTable,
    scheme: SchemeId,
) -> Result<Vec<Halfspace2D>, RegionError> {
    scheme.validate(bc)?;
    let expected = scheme.aux_levels(bc);
    if mi.levels() != expected || mi.receivers() != bc.k() {
        return Err(RegionError::LevelMismatch {
            scheme: scheme.to_string(),
            expected,
            found: mi.levels(),
        });
    }
    let a = Atoms {
        mi,
        levels: scheme.level_indices(bc),
    };
    let (k, l) = (bc.k(), bc.l());
    let s_set: Vec<usize> = (1..=l).collect();
    let c_set: Vec<usize> = (l + 1..=k).collect();
    let mut hs = Vec::new();

    // superposition lines with the single auxiliary U_K
    let superposition = |hs: &mut Vec<Halfspace2D>, commons: &[usize], privates: &[usize], sum: &[usize]| -> Result<(), RegionError> {
        for &c in commons {
            hs.push(Halfspace2D::r0(a.aux(k, c)?, lbl_r0(k, c)));
        }
        for &s in privates {
            hs.push(Halfspace2D::r1(a.x_given(k, s)?, lbl_r1(s, k)));
        }
        for &s in sum {
            hs.push(Halfspace2D::sum(a.x(s)?, lbl_sum(s)));
        }
        Ok(())
    };

    match scheme {
        SchemeId::Km2 | SchemeId::SupK => superposition(&mut hs, &c_set, &s_set, &s_set)?,
        SchemeId::Cor1(lv) if lv == k => superposition(&mut hs, &c_set, &s_set, &s_set)?,
        SchemeId::Thm3(lv, j, r) if lv == k => superposition(&mut hs, &[j], &[r], &[r])?,
        SchemeId::Thm1i(r) => superposition(&mut hs, &c_set, &[r], &[])?,
        SchemeId::Thm1ii(j) => superposition(&mut hs, &[j], &s_set, &[])?,
        SchemeId::Thm2 => {
            for &c in &c_set {
                hs.push(Halfspace2D::r0(a.aux(c, c)?, lbl_r0(c, c)));
            }
            for &s in &s_set {
                hs.push(Halfspace2D::r1(a.x_given(k, s)?, lbl_r1(s, k)));
            }
            for &s in &s_set {
                for &c in &c_set[..c_set.len() - 1] {
                    hs.push(Halfspace2D::sum(
                        a.x_given(c, s)? + a.aux(c, c)?,
                        lbl_split(s, c, c),
                    ));
                }
            }
            for &s in &s_set {
                hs.push(Halfspace2D::sum(a.x(s)?, lbl_sum(s)));
            }
        }
        SchemeId::Cor1(lv) => {
            let c1: Vec<usize> = (l + 1..=lv).collect();
            split_family(&a, &mut hs, lv, &c1, &s_set, (lv + 1..=k).collect(), true)?;
        }
        SchemeId::Thm3(lv, j, r) => {
            split_family(&a, &mut hs, lv, &[j], &[r], (lv + 1..=k).collect(), true)?;
        }
        SchemeId::Cor2(r) => {
            split_family(&a, &mut hs, l + 1, &[l + 1], &[r], (l + 2..=k).collect(), false)?;
        }
        SchemeId::Cor3(j, r) => {
            split_family(&a, &mut hs, k - 1, &[j], &[r], vec![k], false)?;
        }
        SchemeId::JointDec => {
            let lv = l + 1;
            split_family(&a, &mut hs, lv, &[lv], &s_set, (lv + 1..=k).collect(), true)?;
            for &s in &s_set {
                hs.push(Halfspace2D::r1(
                    a.x_given(lv, s)? + a.aux_given(lv, k, lv)?,
                    lbl_joint(s, lv, lv, k),
                ));
            }
        }
    }
    Ok(hs)
}

/// The two-level split family: `R0 <= I(U_l;Y_c1)`, `R0 <= I(U_K;Y_c2)`,
/// `R1 <= I(X;Y_s|U_K)`, `R0+R1 <= I(X;Y_s|U_l) + I(U_l;Y_c1)` and, when
/// `with_sum`, `R0+R1 <= I(X;Y_s)`.
fn split_family(
    a: &Atoms<'_>,
    hs: &mut Vec<Halfspace2D>,
    lv: usize,
    c1: &[usize],
    privates: &[usize],
    c2: Vec<usize>,
    with_sum: bool,
) -> Result<(), RegionError> {
    let k = *a.levels.first().expect("chain has a top level");
    for &c in c1 {
        hs.push(Halfspace2D::r0(a.aux(lv, c)?, lbl_r0(lv, c)));
    }
    for &c in &c2 {
        hs.push(Halfspace2D::r0(a.aux(k, c)?, lbl_r0(k, c)));
    }
    for &s in privates {
        hs.push(Halfspace2D::r1(a.x_given(k, s)?, lbl_r1(s, k)));
    }
    for &s in privates {
        for &c in c1 {
            hs.push(Halfspace2D::sum(
                a.x_given(lv, s)? + a.aux(lv, c)?,
                lbl_split(s, lv, c),
            ));
        }
    }
    if with_sum {
        for &s in privates {
            hs.push(Halfspace2D::sum(a.x(s)?, lbl_sum(s)));
        }
    }
    Ok(())
}

/// Polygon of `scheme` for one coding chain.
pub fn region(bc: &BroadcastSpec, mi: &MiTable, scheme: SchemeId) -> Result<RegionPolygon, RegionError> {
    halfspaces_to_polygon(scheme_halfspaces(bc, mi, scheme)?)
}

/// Superposition region from a one-level chain.
pub fn region_superposition(bc: &BroadcastSpec, mi: &MiTable) -> Result<RegionPolygon, RegionError> {
    region(bc, mi, SchemeId::SupK)
}

/// Full rate-splitting region from a `(K-L)`-level chain.
pub fn region_thm2(bc: &BroadcastSpec, mi: &MiTable) -> Result<RegionPolygon, RegionError> {
    region(bc, mi, SchemeId::Thm2)
}

/// Two-group split region with parameter `l`.
pub fn region_cor1(bc: &BroadcastSpec, mi: &MiTable, l: usize) -> Result<RegionPolygon, RegionError> {
    region(bc, mi, SchemeId::Cor1(l))
}

/// Region of the specialized schemes (`Thm3`, `Cor2`, `Cor3`, `Thm1i`, `Thm1ii`, `Km2`).
pub fn region_special(bc: &BroadcastSpec, mi: &MiTable, scheme: SchemeId) -> Result<RegionPolygon, RegionError> {
    region(bc, mi, scheme)
}

/// Two-level split with unique decoding at receiver `L+1`.
pub fn region_jointdec(bc: &BroadcastSpec, mi: &MiTable) -> Result<RegionPolygon, RegionError> {
    region(bc, mi, SchemeId::JointDec)
}

/// Name of the split-rate variable carried by level `U_c`.
pub fn split_var(c: usize) -> String {
    format!("R1_{c}")
}

fn atom_aux(c: usize, i: usize) -> String {
    format!("I(U{c};Y{i})")
}

fn atom_x_given(s: usize, c: usize) -> String {
    format!("I(X;Y{s}|U{c})")
}

fn atom_x(s: usize) -> String {
    format!("I(X;Y{s})")
}

/// The split-rate reliability system over `R0, R1, R1_{L+1}, ..., R1_{K-1}`,
/// with symbolic right-hand sides, together with the atom values of `mi`
/// (converted exactly from their binary floating-point values).
pub fn splitrate_system(
    bc: &BroadcastSpec,
    mi: &MiTable,
) -> Result<(LinearSystem, Instantiation), RegionError> {
    let (k, l) = (bc.k(), bc.l());
    let a = Atoms {
        mi,
        levels: SchemeId::Thm2.level_indices(bc),
    };
    if mi.levels() != k - l {
        return Err(RegionError::LevelMismatch {
            scheme: "split-rate system".into(),
            expected: k - l,
            found: mi.levels(),
        });
    }
    let splits: Vec<usize> = (l + 1..k).collect();
    let vars: Vec<String> = ["R0".to_string(), "R1".to_string()]
        .into_iter()
        .chain(splits.iter().map(|&c| split_var(c)))
        .collect();
    let n = vars.len();
    let col = |c: usize| 2 + c - (l + 1);
    let mut sys = LinearSystem::new(vars);
    let mut inst = Instantiation::default();
    let row = |sys: &mut LinearSystem, f: &dyn Fn(&mut Vec<num_rational::BigRational>), rhs: Affine| {
        let mut coeffs = vec![int(0); n];
        f(&mut coeffs);
        sys.rows.push(Row::new(coeffs, rhs));
    };

    // common receiver K decodes U_K directly
    row(&mut sys, &|v| v[0] = int(1), Affine::atom(atom_aux(k, k)));
    inst.set(atom_aux(k, k), exact_from_f64(a.aux(k, k)?));
    // common receiver c decodes U_c indirectly
    for &c in &splits {
        row(
            &mut sys,
            &|v| {
                v[0] = int(1);
                (c..k).for_each(|j| v[col(j)] = int(1));
            },
            Affine::atom(atom_aux(c, c)),
        );
        inst.set(atom_aux(c, c), exact_from_f64(a.aux(c, c)?));
    }
    for s in 1..=l {
        row(&mut sys, &|v| v[1] = int(1), Affine::atom(atom_x_given(s, k)));
        inst.set(atom_x_given(s, k), exact_from_f64(a.x_given(k, s)?));
        for &c in &splits {
            row(
                &mut sys,
                &|v| {
                    v[1] = int(1);
                    (c..k).for_each(|j| v[col(j)] = int(-1));
                },
                Affine::atom(atom_x_given(s, c)),
            );
            inst.set(atom_x_given(s, c), exact_from_f64(a.x_given(c, s)?));
        }
        row(
            &mut sys,
            &|v| {
                v[0] = int(1);
                v[1] = int(1);
            },
            Affine::atom(atom_x(s)),
        );
        inst.set(atom_x(s), exact_from_f64(a.x(s)?));
    }
    row(
        &mut sys,
        &|v| {
            v[1] = int(-1);
            splits.iter().for_each(|&j| v[col(j)] = int(1));
        },
        Affine::zero(),
    );
    for &c in &splits {
        row(&mut sys, &|v| v[col(c)] = int(-1), Affine::zero());
    }
    Ok((sys, inst))
}
