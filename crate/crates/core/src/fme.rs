//! Exact Fourier–Motzkin elimination over named-variable linear systems.
//!
//! Coefficients are exact rationals. A right-hand side is an affine
//! combination of named atoms (such as `I(U2;Y2)`) so that eliminations can be
//! carried out symbolically and instantiated later.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use rand::Rng;
use rayon::prelude::*;
use thiserror::Error;

use crate::lp::{int, Lp, LpOutcome};

pub type Q = BigRational;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum FmeError {
    #[error("unknown variable {0}")]
    UnknownVariable(String),
    #[error("system has symbolic right-hand sides; instantiate it first")]
    Symbolic,
    #[error("no value for atom {0}")]
    MissingAtom(String),
    #[error("declared order {0} <= {1} violated by the instantiation")]
    OrderViolated(String, String),
    #[error("variable lists differ")]
    VariableMismatch,
    #[error("row has {found} coefficients, expected {expected}")]
    RowLength { expected: usize, found: usize },
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error("parameters out of range: {0}")]
    ParameterRange(String),
}

/// `constant + Σ coeff · atom`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Affine {
    pub constant: Q,
    pub atoms: BTreeMap<String, Q>,
}

impl Affine {
    pub fn constant(c: Q) -> Self {
        Self {
            constant: c,
            atoms: BTreeMap::new(),
        }
    }

    pub fn zero() -> Self {
        Self::constant(Q::zero())
    }

    pub fn atom(name: impl Into<String>) -> Self {
        let mut atoms = BTreeMap::new();
        atoms.insert(name.into(), Q::one());
        Self {
            constant: Q::zero(),
            atoms,
        }
    }

    pub fn is_numeric(&self) -> bool {
        self.atoms.is_empty()
    }

    pub fn plus(mut self, other: &Affine) -> Self {
        self.add_scaled(other, &Q::one());
        self
    }

    fn add_scaled(&mut self, other: &Affine, f: &Q) {
        self.constant += &other.constant * f;
        for (name, c) in &other.atoms {
            let e = self.atoms.entry(name.clone()).or_insert_with(Q::zero);
            *e += c * f;
            if e.is_zero() {
                self.atoms.remove(name);
            }
        }
    }

    fn scaled(&self, f: &Q) -> Self {
        Self {
            constant: &self.constant * f,
            atoms: self
                .atoms
                .iter()
                .map(|(n, c)| (n.clone(), c * f))
                .collect(),
        }
    }

    pub fn eval(&self, inst: &Instantiation) -> Result<Q, FmeError> {
        let mut v = self.constant.clone();
        for (name, c) in &self.atoms {
            let a = inst
                .values
                .get(name)
                .ok_or_else(|| FmeError::MissingAtom(name.clone()))?;
            v += c * a;
        }
        Ok(v)
    }
}

impl fmt::Display for Affine {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for (name, c) in &self.atoms {
            write_term(f, c, name, first)?;
            first = false;
        }
        if first {
            write!(f, "{}", self.constant)
        } else if !self.constant.is_zero() {
            let sign = if self.constant.is_negative() { '-' } else { '+' };
            write!(f, " {sign} {}", self.constant.abs())
        } else {
            Ok(())
        }
    }
}

fn write_term(f: &mut fmt::Formatter<'_>, c: &Q, name: &str, first: bool) -> fmt::Result {
    let neg = c.is_negative();
    match (first, neg) {
        (true, true) => write!(f, "-")?,
        (true, false) => {}
        (false, true) => write!(f, " - ")?,
        (false, false) => write!(f, " + ")?,
    }
    let a = c.abs();
    if a.is_one() {
        write!(f, "{name}")
    } else {
        write!(f, "{a} {name}")
    }
}

/// `coeffs · vars <= rhs`
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Row {
    pub coeffs: Vec<Q>,
    pub rhs: Affine,
}

impl Row {
    pub fn new(coeffs: Vec<Q>, rhs: Affine) -> Self {
        Self { coeffs, rhs }
    }

    pub fn numeric(coeffs: Vec<Q>, rhs: Q) -> Self {
        Self::new(coeffs, Affine::constant(rhs))
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(Zero::is_zero)
    }

    pub fn numeric_rhs(&self) -> Result<&Q, FmeError> {
        if self.rhs.is_numeric() {
            Ok(&self.rhs.constant)
        } else {
            Err(FmeError::Symbolic)
        }
    }

    /// Scales to a primitive integer coefficient vector (positive factor only).
    fn canonical(self) -> Self {
        if self.is_zero() {
            return self;
        }
        let lcm = self
            .coeffs
            .iter()
            .fold(BigInt::one(), |acc, c| acc.lcm(c.denom()));
        let gcd = self
            .coeffs
            .iter()
            .filter(|c| !c.is_zero())
            .fold(BigInt::zero(), |acc, c| {
                acc.gcd(&(c.numer() * (&lcm / c.denom())))
            });
        let f = Q::new(lcm, gcd);
        if f.is_one() {
            return self;
        }
        Self {
            coeffs: self.coeffs.iter().map(|c| c * &f).collect(),
            rhs: self.rhs.scaled(&f),
        }
    }

    pub fn eval_lhs(&self, x: &[Q]) -> Q {
        self.coeffs
            .iter()
            .zip(x)
            .fold(Q::zero(), |acc, (c, v)| acc + c * v)
    }
}

/// Maps atom names to exact values, with declared `lower <= upper` pairs.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Instantiation {
    pub values: BTreeMap<String, Q>,
    pub order: Vec<(String, String)>,
}

impl Instantiation {
    pub fn set(&mut self, name: impl Into<String>, v: Q) {
        self.values.insert(name.into(), v);
    }

    pub fn require_le(&mut self, lower: impl Into<String>, upper: impl Into<String>) {
        self.order.push((lower.into(), upper.into()));
    }

    pub fn validate(&self) -> Result<(), FmeError> {
        for (lo, hi) in &self.order {
            let a = self
                .values
                .get(lo)
                .ok_or_else(|| FmeError::MissingAtom(lo.clone()))?;
            let b = self
                .values
                .get(hi)
                .ok_or_else(|| FmeError::MissingAtom(hi.clone()))?;
            if a > b {
                return Err(FmeError::OrderViolated(lo.clone(), hi.clone()));
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct LinearSystem {
    pub variables: Vec<String>,
    pub rows: Vec<Row>,
}

impl LinearSystem {
    pub fn new<S: Into<String>>(variables: impl IntoIterator<Item = S>) -> Self {
        Self {
            variables: variables.into_iter().map(Into::into).collect(),
            rows: Vec::new(),
        }
    }

    pub fn dim(&self) -> usize {
        self.variables.len()
    }

    pub fn var_index(&self, name: &str) -> Result<usize, FmeError> {
        self.variables
            .iter()
            .position(|v| v == name)
            .ok_or_else(|| FmeError::UnknownVariable(name.to_string()))
    }

    /// Adds a row given as `(variable, coefficient)` pairs.
    pub fn add(&mut self, terms: &[(&str, i64)], rhs: Affine) -> Result<(), FmeError> {
        let mut coeffs = vec![Q::zero(); self.dim()];
        for (name, c) in terms {
            coeffs[self.var_index(name)?] += int(*c);
        }
        self.rows.push(Row::new(coeffs, rhs));
        Ok(())
    }

    pub fn push(&mut self, row: Row) -> Result<(), FmeError> {
        if row.coeffs.len() != self.dim() {
            return Err(FmeError::RowLength {
                expected: self.dim(),
                found: row.coeffs.len(),
            });
        }
        self.rows.push(row);
        Ok(())
    }

    pub fn is_numeric(&self) -> bool {
        self.rows.iter().all(|r| r.rhs.is_numeric())
    }

    /// Substitutes atom values; checks the declared order first.
    pub fn instantiate(&self, inst: &Instantiation) -> Result<LinearSystem, FmeError> {
        inst.validate()?;
        let rows = self
            .rows
            .iter()
            .map(|r| Ok(Row::numeric(r.coeffs.clone(), r.rhs.eval(inst)?)))
            .collect::<Result<_, FmeError>>()?;
        Ok(LinearSystem {
            variables: self.variables.clone(),
            rows,
        })
    }

    /// Canonical scaling, then removal of identical rows (first occurrence kept).
    pub fn canonicalize(&self) -> LinearSystem {
        let mut seen = BTreeSet::new();
        let mut rows = Vec::with_capacity(self.rows.len());
        for r in &self.rows {
            let c = r.clone().canonical();
            let key = (c.coeffs.clone(), c.rhs.clone());
            if seen.insert(key) {
                rows.push(c);
            }
        }
        LinearSystem {
            variables: self.variables.clone(),
            rows,
        }
    }

    /// Among numeric rows with equal canonical coefficients keeps only the
    /// tightest; drops `0 <= b` rows with `b >= 0`.
    fn prune_parallel(&self) -> LinearSystem {
        let mut best: HashMap<Vec<Q>, usize> = HashMap::new();
        let mut rows: Vec<Row> = Vec::with_capacity(self.rows.len());
        for r in &self.rows {
            let c = r.clone().canonical();
            if !c.rhs.is_numeric() {
                rows.push(c);
                continue;
            }
            if c.is_zero() && !c.rhs.constant.is_negative() {
                continue;
            }
            match best.get(&c.coeffs) {
                Some(&i) => {
                    if c.rhs.constant < rows[i].rhs.constant {
                        rows[i] = c;
                    }
                }
                None => {
                    best.insert(c.coeffs.clone(), rows.len());
                    rows.push(c);
                }
            }
        }
        LinearSystem {
            variables: self.variables.clone(),
            rows,
        }
    }

    /// Projects out one variable exactly.
    pub fn eliminate(&self, var: &str) -> Result<LinearSystem, FmeError> {
        let v = self.var_index(var)?;
        let (mut pos, mut neg, mut zero) = (Vec::new(), Vec::new(), Vec::new());
        for r in &self.rows {
            let c = &r.coeffs[v];
            if c.is_positive() {
                pos.push(r);
            } else if c.is_negative() {
                neg.push(r);
            } else {
                zero.push(r);
            }
        }
        let drop_var = |coeffs: &[Q]| -> Vec<Q> {
            coeffs
                .iter()
                .enumerate()
                .filter(|(j, _)| *j != v)
                .map(|(_, c)| c.clone())
                .collect()
        };
        let mut rows: Vec<Row> = zero
            .iter()
            .map(|r| Row::new(drop_var(&r.coeffs), r.rhs.clone()))
            .collect();
        for p in &pos {
            for n in &neg {
                let fp = -&n.coeffs[v];
                let fn_ = p.coeffs[v].clone();
                let coeffs: Vec<Q> = p
                    .coeffs
                    .iter()
                    .zip(&n.coeffs)
                    .enumerate()
                    .filter(|(j, _)| *j != v)
                    .map(|(_, (a, b))| a * &fp + b * &fn_)
                    .collect();
                let mut rhs = p.rhs.scaled(&fp);
                rhs.add_scaled(&n.rhs, &fn_);
                rows.push(Row::new(coeffs, rhs));
            }
        }
        let mut variables = self.variables.clone();
        variables.remove(v);
        Ok(LinearSystem { variables, rows }.canonicalize())
    }

    /// Drops every row whose removal leaves the feasible set unchanged,
    /// deciding each by an exact LP against the rows still kept.
    pub fn remove_redundant(&self) -> Result<LinearSystem, FmeError> {
        if !self.is_numeric() {
            return Err(FmeError::Symbolic);
        }
        let pruned = self.prune_parallel();
        let mut keep = vec![true; pruned.rows.len()];
        for i in (0..pruned.rows.len()).rev() {
            let row = &pruned.rows[i];
            if row.is_zero() {
                continue;
            }
            let mut lp = Lp::new(pruned.dim(), true);
            lp.objective = row.coeffs.clone();
            for (j, r) in pruned.rows.iter().enumerate() {
                if j != i && keep[j] {
                    lp.push(r.coeffs.clone(), r.rhs.constant.clone());
                }
            }
            keep[i] = match lp.solve() {
                LpOutcome::Infeasible => false,
                LpOutcome::Unbounded => true,
                LpOutcome::Optimal { value, .. } => value > row.rhs.constant,
            };
        }
        let rows = pruned
            .rows
            .into_iter()
            .zip(keep)
            .filter_map(|(r, k)| k.then_some(r))
            .collect();
        Ok(LinearSystem {
            variables: pruned.variables,
            rows,
        })
    }

    /// Eliminates every variable outside `keep`, highest position first,
    /// removing redundant rows after each step.
    pub fn project(&self, keep: &[&str]) -> Result<LinearSystem, FmeError> {
        for k in keep {
            self.var_index(k)?;
        }
        let order: Vec<String> = self
            .variables
            .iter()
            .rev()
            .filter(|v| !keep.contains(&v.as_str()))
            .cloned()
            .collect();
        self.project_in_order(&order)
    }

    /// Eliminates `order` one variable at a time in the given order.
    pub fn project_in_order<S: AsRef<str>>(&self, order: &[S]) -> Result<LinearSystem, FmeError> {
        let mut sys = self.canonicalize();
        if sys.is_numeric() {
            sys = sys.remove_redundant()?;
        }
        for v in order {
            sys = sys.eliminate(v.as_ref())?;
            if sys.is_numeric() {
                sys = sys.remove_redundant()?;
            }
        }
        Ok(sys)
    }

    /// Whether `x` satisfies every row.
    pub fn contains(&self, x: &[Q]) -> Result<bool, FmeError> {
        for r in &self.rows {
            if r.eval_lhs(x) > *r.numeric_rhs()? {
                return Ok(false);
            }
        }
        Ok(true)
    }

    /// Whether some point of the system agrees with `fixed` on the named variables.
    pub fn lift_feasible(&self, fixed: &[(&str, Q)]) -> Result<bool, FmeError> {
        let mut lp = Lp::new(self.dim(), true);
        for r in &self.rows {
            lp.push(r.coeffs.clone(), r.numeric_rhs()?.clone());
        }
        for (name, v) in fixed {
            let mut e = vec![Q::zero(); self.dim()];
            e[self.var_index(name)?] = Q::one();
            lp.push_eq(e, v.clone());
        }
        Ok(lp.solve().is_feasible())
    }

    /// Reads the plain-text format: a header of variable names, then one
    /// `c_1 ... c_n <= rhs` row per line. Blank lines and `#` comments are skipped.
    pub fn parse(text: &str) -> Result<LinearSystem, FmeError> {
        let mut lines = text
            .lines()
            .enumerate()
            .map(|(i, l)| (i + 1, l.split('#').next().unwrap_or("").trim()))
            .filter(|(_, l)| !l.is_empty());
        let (_, header) = lines.next().ok_or(FmeError::Parse {
            line: 1,
            message: "missing variable header".into(),
        })?;
        let mut sys = LinearSystem::new(header.split_whitespace());
        for (line, l) in lines {
            let err = |message: String| FmeError::Parse { line, message };
            let (lhs, rhs) = l
                .split_once("<=")
                .ok_or_else(|| err("expected `<=`".into()))?;
            let coeffs = lhs
                .split_whitespace()
                .map(|t| parse_rational(t).ok_or_else(|| err(format!("bad number `{t}`"))))
                .collect::<Result<Vec<_>, _>>()?;
            if coeffs.len() != sys.dim() {
                return Err(err(format!(
                    "expected {} coefficients, found {}",
                    sys.dim(),
                    coeffs.len()
                )));
            }
            let rhs = rhs.trim();
            let rhs = parse_rational(rhs).ok_or_else(|| err(format!("bad number `{rhs}`")))?;
            sys.rows.push(Row::numeric(coeffs, rhs));
        }
        Ok(sys)
    }

    /// Writes the format read by [`LinearSystem::parse`].
    pub fn to_text(&self) -> Result<String, FmeError> {
        let mut out = self.variables.join(" ");
        out.push('\n');
        for r in &self.rows {
            let rhs = r.numeric_rhs()?;
            let lhs: Vec<String> = r.coeffs.iter().map(|c| c.to_string()).collect();
            out.push_str(&format!(
                "{} <= {}/{}\n",
                lhs.join(" "),
                rhs.numer(),
                rhs.denom()
            ));
        }
        Ok(out)
    }

    /// Human-readable form of row `i`, e.g. `R0 + R1 <= I(U;Y|U2) + I(U2;Y2)`.
    pub fn describe_row(&self, i: usize) -> String {
        let r = &self.rows[i];
        struct Lhs<'a>(&'a LinearSystem, &'a Row);
        impl fmt::Display for Lhs<'_> {
            fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                let mut first = true;
                for (c, name) in self.1.coeffs.iter().zip(&self.0.variables) {
                    if !c.is_zero() {
                        write_term(f, c, name, first)?;
                        first = false;
                    }
                }
                if first {
                    write!(f, "0")?;
                }
                Ok(())
            }
        }
        format!("{} <= {}", Lhs(self, r), r.rhs)
    }
}

impl fmt::Display for LinearSystem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for i in 0..self.rows.len() {
            writeln!(f, "{}", self.describe_row(i))?;
        }
        Ok(())
    }
}

/// Parses `n`, `n/d` or a finite decimal such as `-0.125` exactly.
pub fn parse_rational(s: &str) -> Option<Q> {
    if let Some((n, d)) = s.split_once('/') {
        let n: BigInt = n.trim().parse().ok()?;
        let d: BigInt = d.trim().parse().ok()?;
        if d.is_zero() {
            return None;
        }
        return Some(Q::new(n, d));
    }
    if let Some((i, frac)) = s.split_once('.') {
        if !frac.chars().all(|c| c.is_ascii_digit()) {
            return None;
        }
        let neg = i.starts_with('-');
        let digits = format!("{}{}", i.trim_start_matches(['-', '+']), frac);
        let n: BigInt = if digits.is_empty() {
            return None;
        } else {
            digits.parse().ok()?
        };
        let d = num_traits::pow(BigInt::from(10), frac.len());
        let v = Q::new(n, d);
        return Some(if neg { -v } else { v });
    }
    s.parse::<BigInt>().ok().map(Q::from_integer)
}

/// Outcome of comparing two polyhedra.
#[derive(Debug, Clone, PartialEq)]
pub enum Comparison {
    Equal,
    /// `point` satisfies one system (`first` says which) but violates row
    /// `violated` of the other.
    Differ {
        point: Vec<Q>,
        in_first: bool,
        violated: usize,
    },
}

impl Comparison {
    pub fn is_equal(&self) -> bool {
        matches!(self, Comparison::Equal)
    }
}

/// Decides equality of two numeric polyhedra by mutual containment.
pub fn poly_equal(a: &LinearSystem, b: &LinearSystem) -> Result<Comparison, FmeError> {
    if a.variables != b.variables {
        return Err(FmeError::VariableMismatch);
    }
    if let Some((point, violated)) = escape_point(a, b)? {
        return Ok(Comparison::Differ {
            point,
            in_first: true,
            violated,
        });
    }
    if let Some((point, violated)) = escape_point(b, a)? {
        return Ok(Comparison::Differ {
            point,
            in_first: false,
            violated,
        });
    }
    Ok(Comparison::Equal)
}

/// A point of `inner` outside some row of `outer`, if any.
fn escape_point(
    inner: &LinearSystem,
    outer: &LinearSystem,
) -> Result<Option<(Vec<Q>, usize)>, FmeError> {
    let mut base = Lp::new(inner.dim(), true);
    for r in &inner.rows {
        base.push(r.coeffs.clone(), r.numeric_rhs()?.clone());
    }
    for (i, r) in outer.rows.iter().enumerate() {
        let rhs = r.numeric_rhs()?;
        let mut lp = base.clone();
        lp.objective = r.coeffs.clone();
        match lp.solve() {
            LpOutcome::Infeasible => return Ok(None),
            LpOutcome::Optimal { x, value } => {
                if value > *rhs {
                    return Ok(Some((x, i)));
                }
            }
            LpOutcome::Unbounded => {
                lp.push(r.coeffs.clone(), rhs + Q::one());
                if let LpOutcome::Optimal { x, .. } = lp.solve() {
                    return Ok(Some((x, i)));
                }
                unreachable!("bounded restriction of a nonempty unbounded LP");
            }
        }
    }
    Ok(None)
}

/// Name of the atom `I(U_c;Y_c)` in the elimination lemmas.
pub fn atom_a(c: usize) -> String {
    format!("I(U{c};Y{c})")
}

/// Name of the atom `I(U;Y|U_c)` in the elimination lemmas.
pub fn atom_b(c: usize) -> String {
    format!("I(U;Y|U{c})")
}

fn split_var(c: usize) -> String {
    format!("R1_{c}")
}

fn lemma_variables(k: usize, big_k: usize) -> Vec<String> {
    ["R0".to_string(), "R1".to_string()]
        .into_iter()
        .chain((k..=big_k).map(split_var))
        .collect()
}

/// The split-rate polytope with variables `R0, R1, R1_k, ..., R1_K`:
///
/// * `R0 + Σ_{j=c}^{K} R1_j <= I(U_c;Y_c)` for `c` in `k..=K`
/// * `R1 - Σ_{j=c}^{K} R1_j <= I(U;Y|U_c)` for `c` in `k..=K`
/// * `-R1 + Σ_{j=k}^{K} R1_j <= 0`
/// * `-R1_c <= 0`
pub fn lemma_input(k: usize, big_k: usize) -> LinearSystem {
    let vars = lemma_variables(k, big_k);
    let n = vars.len();
    let col = |c: usize| 2 + c - k;
    let mut sys = LinearSystem::new(vars);
    for c in k..=big_k {
        let mut row = vec![Q::zero(); n];
        row[0] = Q::one();
        (c..=big_k).for_each(|j| row[col(j)] = Q::one());
        sys.rows.push(Row::new(row, Affine::atom(atom_a(c))));
    }
    for c in k..=big_k {
        let mut row = vec![Q::zero(); n];
        row[1] = Q::one();
        (c..=big_k).for_each(|j| row[col(j)] = -Q::one());
        sys.rows.push(Row::new(row, Affine::atom(atom_b(c))));
    }
    let mut row = vec![Q::zero(); n];
    row[1] = -Q::one();
    (k..=big_k).for_each(|j| row[col(j)] = Q::one());
    sys.rows.push(Row::new(row, Affine::zero()));
    for c in k..=big_k {
        let mut row = vec![Q::zero(); n];
        row[col(c)] = -Q::one();
        sys.rows.push(Row::new(row, Affine::zero()));
    }
    sys
}

/// The claimed projection of [`lemma_input`] after removing `R1_k..R1_l`.
pub fn lemma2_expected(k: usize, l: usize, big_k: usize) -> LinearSystem {
    let vars: Vec<String> = ["R0".to_string(), "R1".to_string()]
        .into_iter()
        .chain((l + 1..=big_k).map(split_var))
        .collect();
    let n = vars.len();
    let col = |c: usize| 2 + c - (l + 1);
    let mut sys = LinearSystem::new(vars);
    for c in k..=l {
        let mut row = vec![Q::zero(); n];
        row[0] = Q::one();
        row[1] = Q::one();
        sys.rows
            .push(Row::new(row, Affine::atom(atom_b(c)).plus(&Affine::atom(atom_a(c)))));
    }
    for c in k..=l {
        let mut row = vec![Q::zero(); n];
        row[0] = Q::one();
        (l + 1..=big_k).for_each(|j| row[col(j)] = Q::one());
        sys.rows.push(Row::new(row, Affine::atom(atom_a(c))));
    }
    for c in l + 1..=big_k {
        let mut row = vec![Q::zero(); n];
        row[0] = Q::one();
        (c..=big_k).for_each(|j| row[col(j)] = Q::one());
        sys.rows.push(Row::new(row, Affine::atom(atom_a(c))));
    }
    for c in l + 1..=big_k {
        let mut row = vec![Q::zero(); n];
        row[1] = Q::one();
        (c..=big_k).for_each(|j| row[col(j)] = -Q::one());
        sys.rows.push(Row::new(row, Affine::atom(atom_b(c))));
    }
    let mut row = vec![Q::zero(); n];
    row[1] = -Q::one();
    (l + 1..=big_k).for_each(|j| row[col(j)] = Q::one());
    sys.rows.push(Row::new(row, Affine::zero()));
    for c in l + 1..=big_k {
        let mut row = vec![Q::zero(); n];
        row[col(c)] = -Q::one();
        sys.rows.push(Row::new(row, Affine::zero()));
    }
    sys
}

/// The claimed projection of [`lemma_input`] onto `(R0, R1)`.
///
/// Besides the two families `R0 + R1 <= I(U;Y|U_c) + I(U_c;Y_c)` and
/// `R0 <= I(U_c;Y_c)`, the list contains `-R1 <= 0`: the input rows force
/// `R1 >= Σ R1_j >= 0`, so without it the two polygons differ.
pub fn lemma3_expected(k: usize, big_k: usize) -> LinearSystem {
    let mut sys = LinearSystem::new(["R0", "R1"]);
    for c in k..=big_k {
        sys.rows.push(Row::new(
            vec![Q::one(), Q::one()],
            Affine::atom(atom_b(c)).plus(&Affine::atom(atom_a(c))),
        ));
        sys.rows
            .push(Row::new(vec![Q::one(), Q::zero()], Affine::atom(atom_a(c))));
    }
    sys.rows
        .push(Row::new(vec![Q::zero(), -Q::one()], Affine::zero()));
    sys
}

/// Draws `4 n / d` with `1 <= d <= 1000` and `0 <= n <= d`.
fn draw_atom<R: Rng>(rng: &mut R) -> Q {
    let d: i64 = rng.random_range(1..=1000);
    let n: i64 = rng.random_range(0..=d);
    Q::new(BigInt::from(4 * n), BigInt::from(d))
}

/// Random atom values for the lemma systems: `I(U_c;Y_c)` arbitrary and
/// `I(U;Y|U_c)` nondecreasing in `c`.
pub fn random_lemma_instantiation(k: usize, big_k: usize, seed: u64, trial: u64) -> Instantiation {
    let mut rng = crate::rng::stream(seed, trial);
    let mut inst = Instantiation::default();
    for c in k..=big_k {
        inst.set(atom_a(c), draw_atom(&mut rng));
    }
    let mut b: Vec<Q> = (k..=big_k).map(|_| draw_atom(&mut rng)).collect();
    b.sort();
    for (c, v) in (k..=big_k).zip(b) {
        inst.set(atom_b(c), v);
    }
    for c in k..big_k {
        inst.require_le(atom_b(c), atom_b(c + 1));
    }
    inst
}

#[derive(Debug, Clone, PartialEq)]
pub struct LemmaFailure {
    pub trial: u64,
    pub atoms: Instantiation,
    pub variables: Vec<String>,
    pub comparison: Comparison,
    pub projected: LinearSystem,
    pub expected: LinearSystem,
}

impl fmt::Display for LemmaFailure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "trial {} failed", self.trial)?;
        for (name, v) in &self.atoms.values {
            writeln!(f, "  {name} = {v}")?;
        }
        if let Comparison::Differ {
            point,
            in_first,
            violated,
        } = &self.comparison
        {
            let pt: Vec<String> = self
                .variables
                .iter()
                .zip(point)
                .map(|(n, v)| format!("{n}={v}"))
                .collect();
            let (holder, other) = if *in_first {
                ("projection", &self.expected)
            } else {
                ("claimed list", &self.projected)
            };
            writeln!(f, "  witness in {holder}: {}", pt.join(", "))?;
            writeln!(f, "  violates: {}", other.describe_row(*violated))?;
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct LemmaReport {
    pub name: String,
    pub trials: u64,
    pub passed: u64,
    pub failures: Vec<LemmaFailure>,
}

impl LemmaReport {
    pub fn all_passed(&self) -> bool {
        self.passed == self.trials
    }
}

impl fmt::Display for LemmaReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "{}: {}/{} trials equal", self.name, self.passed, self.trials)?;
        for fail in &self.failures {
            write!(f, "{fail}")?;
        }
        Ok(())
    }
}

fn run_trials(
    name: String,
    k: usize,
    big_k: usize,
    trials: u64,
    seed: u64,
    input: &LinearSystem,
    eliminate: &[String],
    expected: &LinearSystem,
) -> Result<LemmaReport, FmeError> {
    let results: Vec<Result<Option<LemmaFailure>, FmeError>> = (0..trials)
        .into_par_iter()
        .map(|trial| {
            let atoms = random_lemma_instantiation(k, big_k, seed, trial);
            let projected = input.instantiate(&atoms)?.project_in_order(eliminate)?;
            let claimed = expected.instantiate(&atoms)?;
            let comparison = poly_equal(&projected, &claimed)?;
            Ok((!comparison.is_equal()).then(|| LemmaFailure {
                trial,
                atoms,
                variables: projected.variables.clone(),
                comparison,
                projected,
                expected: claimed,
            }))
        })
        .collect();
    let mut failures = Vec::new();
    for r in results {
        if let Some(f) = r? {
            failures.push(f);
        }
    }
    Ok(LemmaReport {
        name,
        trials,
        passed: trials - failures.len() as u64,
        failures,
    })
}

/// Projects `R1_k..R1_l` out of random instantiations of [`lemma_input`] and
/// compares with [`lemma2_expected`]. Requires `1 <= k <= l <= K-1`.
pub fn verify_lemma2(
    k: usize,
    l: usize,
    big_k: usize,
    trials: u64,
    seed: u64,
) -> Result<LemmaReport, FmeError> {
    if !(1 <= k && k <= l && l < big_k) {
        return Err(FmeError::ParameterRange(format!(
            "need 1 <= k <= l <= K-1, got k={k}, l={l}, K={big_k}"
        )));
    }
    let eliminate: Vec<String> = (k..=l).rev().map(split_var).collect();
    run_trials(
        format!("split elimination k={k} l={l} K={big_k}"),
        k,
        big_k,
        trials,
        seed,
        &lemma_input(k, big_k),
        &eliminate,
        &lemma2_expected(k, l, big_k),
    )
}

/// Projects every split rate out of random instantiations of
/// [`lemma_input`] and compares with [`lemma3_expected`]. Requires `1 <= k <= K`.
pub fn verify_lemma3(k: usize, big_k: usize, trials: u64, seed: u64) -> Result<LemmaReport, FmeError> {
    if !(1 <= k && k <= big_k) {
        return Err(FmeError::ParameterRange(format!(
            "need 1 <= k <= K, got k={k}, K={big_k}"
        )));
    }
    let eliminate: Vec<String> = (k..=big_k).rev().map(split_var).collect();
    run_trials(
        format!("full projection k={k} K={big_k}"),
        k,
        big_k,
        trials,
        seed,
        &lemma_input(k, big_k),
        &eliminate,
        &lemma3_expected(k, big_k),
    )
}

/// Elimination checks for a channel with `big_k` receivers of which `l` are
/// private.
///
/// The split rates are indexed `l+1..=K`. Eliminating those up to `split`
/// runs [`verify_lemma2`]; eliminating all of them runs [`verify_lemma3`],
/// which is always included. With `split = None` every `split` in
/// `l+1..K` is checked.
pub fn verify_split_elimination(
    big_k: usize,
    l: usize,
    split: Option<usize>,
    trials: u64,
    seed: u64,
) -> Result<Vec<LemmaReport>, FmeError> {
    if !(1 <= l && l < big_k) {
        return Err(FmeError::ParameterRange(format!(
            "need 1 <= L < K, got K={big_k}, L={l}"
        )));
    }
    let splits: Vec<usize> = match split {
        Some(s) if (l + 1..big_k).contains(&s) => vec![s],
        Some(s) => {
            return Err(FmeError::ParameterRange(format!(
                "l = {s} outside [{}, {}]",
                l + 1,
                big_k - 1
            )))
        }
        None => (l + 1..big_k).collect(),
    };
    let mut reports = Vec::with_capacity(splits.len() + 1);
    for s in splits {
        reports.push(verify_lemma2(l + 1, s, big_k, trials, seed)?);
    }
    reports.push(verify_lemma3(l + 1, big_k, trials, seed)?);
    Ok(reports)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lp::ratio;

    fn numeric(vars: &[&str], rows: &[(&[i64], Q)]) -> LinearSystem {
        let mut s = LinearSystem::new(vars.iter().copied());
        for (c, b) in rows {
            s.rows
                .push(Row::numeric(c.iter().map(|&x| int(x)).collect(), b.clone()));
        }
        s
    }

    #[test]
    fn eliminate_one_pair() {
        // y <= 2 - x, -y <= 0  =>  x <= 2
        let s = numeric(&["x", "y"], &[(&[1, 1], int(2)), (&[0, -1], int(0))]);
        let e = s.eliminate("y").unwrap();
        assert_eq!(e.variables, vec!["x"]);
        assert_eq!(e.rows, vec![Row::numeric(vec![int(1)], int(2))]);
    }

    #[test]
    fn eliminate_keeps_tautology_until_redundancy_pass() {
        let s = numeric(&["y"], &[(&[1], int(1)), (&[-1], int(0))]);
        let e = s.eliminate("y").unwrap();
        assert_eq!(e.rows, vec![Row::numeric(vec![], int(1))]);
        assert!(e.remove_redundant().unwrap().rows.is_empty());
    }

    #[test]
    fn eliminate_unknown_variable() {
        let s = numeric(&["x"], &[]);
        assert_eq!(
            s.eliminate("z"),
            Err(FmeError::UnknownVariable("z".into()))
        );
    }

    #[test]
    fn symbolic_elimination_step() {
        // Pairing the common-receiver bound for c = 1 with the private bound
        // for the same level removes R1_1 and yields a sum-rate line.
        let sys = lemma_input(1, 2);
        let e = sys.eliminate("R1_1").unwrap();
        let want = Affine::atom(atom_b(1)).plus(&Affine::atom(atom_a(1)));
        let found = e.rows.iter().any(|r| {
            r.coeffs == vec![int(1), int(1), int(0)] && r.rhs == want
        });
        assert!(found, "{e}");
        // and the trivial pair (-R1_1 <= 0 with the c=1 bound) leaves R0 + R1_2 <= I(U1;Y1)
        assert!(e.rows.iter().any(|r| {
            r.coeffs == vec![int(1), int(0), int(1)] && r.rhs == Affine::atom(atom_a(1))
        }));
    }

    #[test]
    fn redundancy_examples() {
        let s = numeric(&["R0"], &[(&[1], int(1)), (&[1], int(2))]);
        assert_eq!(s.remove_redundant().unwrap().rows.len(), 1);
        assert_eq!(s.remove_redundant().unwrap().rows[0].rhs.constant, int(1));

        let s = numeric(
            &["R0", "R1"],
            &[(&[1, 1], ratio(3, 2)), (&[1, 1], ratio(27, 10))],
        );
        let r = s.remove_redundant().unwrap();
        assert_eq!(r.rows, vec![Row::numeric(vec![int(1), int(1)], ratio(3, 2))]);

        // non-parallel redundancy through the LP
        let s = numeric(
            &["a", "b"],
            &[
                (&[1, 0], int(1)),
                (&[0, 1], int(1)),
                (&[-1, 0], int(0)),
                (&[0, -1], int(0)),
                (&[1, 1], int(5)),
            ],
        );
        assert_eq!(s.remove_redundant().unwrap().rows.len(), 4);

        let mut sym = LinearSystem::new(["a"]);
        sym.add(&[("a", 1)], Affine::atom("x")).unwrap();
        assert_eq!(sym.remove_redundant(), Err(FmeError::Symbolic));
    }

    #[test]
    fn unbounded_rows_are_kept() {
        let s = numeric(&["a", "b"], &[(&[1, 0], int(1)), (&[0, 1], int(1))]);
        assert_eq!(s.remove_redundant().unwrap().rows.len(), 2);
    }

    #[test]
    fn project_single_split_by_hand() {
        // Variables R0, R1, R1_1, R1_2 with k = 1, K = 2.
        let sys = lemma_input(1, 2);
        let mut inst = Instantiation::default();
        inst.set(atom_a(1), int(1));
        inst.set(atom_a(2), int(2));
        inst.set(atom_b(1), ratio(1, 2));
        inst.set(atom_b(2), ratio(7, 10));
        inst.require_le(atom_b(1), atom_b(2));
        let p = sys.instantiate(&inst).unwrap().project(&["R0", "R1"]).unwrap();
        let want = numeric(
            &["R0", "R1"],
            &[(&[1, 0], int(1)), (&[1, 1], ratio(3, 2)), (&[0, -1], int(0))],
        );
        assert!(poly_equal(&p, &want).unwrap().is_equal(), "{p}");
        assert_eq!(p.rows.len(), 3, "{p}");
    }

    #[test]
    fn project_keep_all_is_identity() {
        let inst = random_lemma_instantiation(1, 3, 5, 0);
        let sys = lemma_input(1, 3).instantiate(&inst).unwrap();
        let vars: Vec<&str> = sys.variables.iter().map(String::as_str).collect();
        let p = sys.project(&vars).unwrap();
        assert_eq!(p.variables, sys.variables);
        assert!(poly_equal(&p, &sys).unwrap().is_equal());
    }

    #[test]
    fn poly_equal_examples() {
        let square = numeric(
            &["R0", "R1"],
            &[
                (&[1, 0], int(1)),
                (&[0, 1], int(1)),
                (&[-1, 0], int(0)),
                (&[0, -1], int(0)),
            ],
        );
        assert!(poly_equal(&square, &square).unwrap().is_equal());
        let mut padded = square.clone();
        padded.rows.push(Row::numeric(vec![int(1), int(1)], int(2)));
        assert!(poly_equal(&square, &padded).unwrap().is_equal());
        let mut triangle = square.clone();
        triangle.rows.push(Row::numeric(vec![int(1), int(1)], int(1)));
        match poly_equal(&square, &triangle).unwrap() {
            Comparison::Differ {
                point, in_first, ..
            } => {
                assert!(in_first);
                assert_eq!(point, vec![int(1), int(1)]);
            }
            Comparison::Equal => panic!("square and triangle differ"),
        }
    }

    #[test]
    fn order_violation_is_reported() {
        let mut inst = random_lemma_instantiation(1, 2, 1, 0);
        inst.set(atom_b(1), int(5));
        inst.set(atom_b(2), int(1));
        assert!(matches!(
            lemma_input(1, 2).instantiate(&inst),
            Err(FmeError::OrderViolated(..))
        ));
    }

    #[test]
    fn lemma2_base_case_and_small_cases() {
        for (k, l, big_k) in [(1, 1, 2), (2, 2, 3), (1, 1, 3), (1, 2, 3)] {
            let r = verify_lemma2(k, l, big_k, 20, 11).unwrap();
            assert!(r.all_passed(), "{r}");
        }
        assert!(verify_lemma2(2, 1, 3, 1, 0).is_err());
        assert!(verify_lemma2(1, 3, 3, 1, 0).is_err());
    }

    #[test]
    fn split_elimination_ranges() {
        assert_eq!(verify_split_elimination(4, 1, None, 3, 0).unwrap().len(), 3);
        assert_eq!(verify_split_elimination(4, 1, Some(2), 3, 0).unwrap().len(), 2);
        assert_eq!(verify_split_elimination(2, 1, None, 3, 0).unwrap().len(), 1);
        assert!(verify_split_elimination(3, 3, None, 1, 0).is_err());
        assert!(verify_split_elimination(4, 1, Some(4), 1, 0).is_err());
    }

    #[test]
    fn lemma3_small_cases() {
        for (k, big_k) in [(1, 1), (1, 2), (2, 3), (1, 3)] {
            let r = verify_lemma3(k, big_k, 20, 3).unwrap();
            assert!(r.all_passed(), "{r}");
        }
    }

    #[test]
    fn lemma2_k1_equals_lemma3_for_two_levels() {
        let inst = random_lemma_instantiation(1, 2, 9, 4);
        let sys = lemma_input(1, 2).instantiate(&inst).unwrap();
        let after2 = sys.project_in_order(&["R1_1"]).unwrap();
        let full = after2.project_in_order(&["R1_2"]).unwrap();
        let claimed = lemma3_expected(1, 2).instantiate(&inst).unwrap();
        assert!(poly_equal(&full, &claimed).unwrap().is_equal());
    }

    #[test]
    fn text_round_trip() {
        let inst = random_lemma_instantiation(1, 2, 2, 2);
        let sys = lemma_input(1, 2).instantiate(&inst).unwrap();
        let text = sys.to_text().unwrap();
        let back = LinearSystem::parse(&text).unwrap();
        assert_eq!(back, sys);
        assert!(matches!(
            LinearSystem::parse("x y\n1 2 3 <= 1"),
            Err(FmeError::Parse { line: 2, .. })
        ));
        assert_eq!(parse_rational("-0.125"), Some(ratio(-1, 8)));
        assert_eq!(parse_rational("3/6"), Some(ratio(1, 2)));
        assert_eq!(parse_rational("1/0"), None);
    }
}
