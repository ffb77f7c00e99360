//! Iterated Laurent-polynomial towers `K_d = F_{p^r}((t_1))..((t_d))`,
//! modelled exactly by Laurent polynomials with finite support.
//!
//! Level 0 is the coefficient field.  An element of level `l >= 1` is a
//! finite map from exponents of `t_l` to nonzero elements of level `l-1`.
//! Exact mode (no precision bound) is the default; a precision bound on the
//! outermost variable exists only to support `dlog` of non-monomial units.

use crate::error::{Error, Result};
use crate::field::{FieldElem, FqCtx, GaloisRing, GrElem};
use std::collections::BTreeMap;

/// Description of a tower `F_{p^r}((t_1))..((t_d))`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TowerSpec {
    pub p: u8,
    pub r: u8,
    pub depth: u8,
    /// `var_names[l-1]` is the variable adjoined at level `l`; the last
    /// entry is the outermost variable.
    pub var_names: Vec<String>,
}

impl TowerSpec {
    pub fn new(p: u8, r: u8, depth: u8) -> Result<Self> {
        let names = match depth {
            0 => vec![],
            1 => vec!["t".to_string()],
            2 => vec!["u".to_string(), "t".to_string()],
            _ => {
                return Err(Error::BadTowerSpec(format!(
                    "depth {depth} outside supported range 0..=2"
                )))
            }
        };
        Self::with_names(p, r, depth, names)
    }

    pub fn with_names(p: u8, r: u8, depth: u8, var_names: Vec<String>) -> Result<Self> {
        if depth > 2 {
            return Err(Error::BadTowerSpec(format!(
                "depth {depth} outside supported range 0..=2"
            )));
        }
        if var_names.len() != depth as usize {
            return Err(Error::BadTowerSpec(format!(
                "{} variable names for depth {depth}",
                var_names.len()
            )));
        }
        let mut uniq = var_names.clone();
        uniq.sort();
        uniq.dedup();
        if uniq.len() != var_names.len() {
            return Err(Error::BadTowerSpec("variable names must be distinct".into()));
        }
        Ok(TowerSpec { p, r, depth, var_names })
    }
}

/// A tower together with its coefficient-field context.  All ring, Witt and
/// form operations borrow one of these.
#[derive(Debug, Clone)]
pub struct Tower {
    pub spec: TowerSpec,
    pub fq: FqCtx,
}

impl Tower {
    pub fn new(spec: TowerSpec) -> Result<Self> {
        let fq = FqCtx::new(spec.p, spec.r)?;
        Ok(Tower { spec, fq })
    }

    pub fn p(&self) -> u8 {
        self.spec.p
    }

    pub fn depth(&self) -> u8 {
        self.spec.depth
    }

    pub fn var_name(&self, level: u8) -> &str {
        &self.spec.var_names[level as usize - 1]
    }
}

/// An element of some level of the tower.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum TowerElem {
    Scalar(FieldElem),
    Poly(PolyNode),
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct PolyNode {
    pub level: u8,
    /// exponent -> nonzero coefficient at level-1; ascending iteration order
    pub terms: BTreeMap<i64, TowerElem>,
    /// terms of exponent >= prec are unknown (precision mode)
    pub prec: Option<i64>,
}

impl TowerElem {
    pub fn level(&self) -> u8 {
        match self {
            TowerElem::Scalar(_) => 0,
            TowerElem::Poly(n) => n.level,
        }
    }

    pub fn is_zero(&self) -> bool {
        match self {
            TowerElem::Scalar(c) => c.is_zero(),
            TowerElem::Poly(n) => n.terms.is_empty(),
        }
    }

    pub fn prec(&self) -> Option<i64> {
        match self {
            TowerElem::Scalar(_) => None,
            TowerElem::Poly(n) => n.prec,
        }
    }

    pub fn is_exact(&self) -> bool {
        match self {
            TowerElem::Scalar(_) => true,
            TowerElem::Poly(n) => n.prec.is_none() && n.terms.values().all(|t| t.is_exact()),
        }
    }
}

impl Tower {
    pub fn zero(&self, level: u8) -> TowerElem {
        if level == 0 {
            TowerElem::Scalar(self.fq.zero())
        } else {
            TowerElem::Poly(PolyNode { level, terms: BTreeMap::new(), prec: None })
        }
    }

    pub fn one(&self, level: u8) -> TowerElem {
        self.embed(TowerElem::Scalar(self.fq.one()), level)
    }

    /// Embed an element of a lower level as a constant at `level`.
    pub fn embed(&self, x: TowerElem, level: u8) -> TowerElem {
        let mut cur = x;
        while cur.level() < level {
            let next = cur.level() + 1;
            let mut terms = BTreeMap::new();
            if !cur.is_zero() {
                terms.insert(0, cur);
            }
            cur = TowerElem::Poly(PolyNode { level: next, terms, prec: None });
        }
        cur
    }

    pub fn scalar(&self, c: FieldElem, level: u8) -> TowerElem {
        self.embed(TowerElem::Scalar(c), level)
    }

    pub fn int(&self, n: i64, level: u8) -> TowerElem {
        let p = self.p() as i64;
        let v = ((n % p) + p) % p;
        self.scalar(self.fq.from_u64(v as u64), level)
    }

    /// `c * t_v^e` viewed at `level >= v`.
    pub fn monomial(&self, coeff: TowerElem, var_level: u8, e: i64, level: u8) -> TowerElem {
        debug_assert!(var_level >= 1 && var_level <= level);
        let base = if coeff.is_zero() {
            self.zero(var_level)
        } else {
            let mut terms = BTreeMap::new();
            terms.insert(e, self.embed(coeff, var_level - 1));
            TowerElem::Poly(PolyNode { level: var_level, terms, prec: None })
        };
        self.embed(base, level)
    }

    /// `t_level^e` as an element of its own level.
    pub fn var(&self, level: u8, e: i64) -> TowerElem {
        self.monomial(TowerElem::Scalar(self.fq.one()), level, e, level)
    }

    fn check_levels(&self, x: &TowerElem, y: &TowerElem) -> Result<()> {
        if x.level() != y.level() {
            Err(Error::LevelMismatch(x.level(), y.level()))
        } else {
            Ok(())
        }
    }

    pub fn add(&self, x: &TowerElem, y: &TowerElem) -> Result<TowerElem> {
        self.check_levels(x, y)?;
        Ok(match (x, y) {
            (TowerElem::Scalar(a), TowerElem::Scalar(b)) => TowerElem::Scalar(self.fq.add(a, b)),
            (TowerElem::Poly(a), TowerElem::Poly(b)) => {
                let prec = min_prec(a.prec, b.prec);
                let mut terms = a.terms.clone();
                for (e, c) in &b.terms {
                    match terms.remove(e) {
                        None => {
                            terms.insert(*e, c.clone());
                        }
                        Some(old) => {
                            let s = self.add(&old, c)?;
                            if !s.is_zero() {
                                terms.insert(*e, s);
                            }
                        }
                    }
                }
                if let Some(n) = prec {
                    terms.retain(|e, _| *e < n);
                }
                TowerElem::Poly(PolyNode { level: a.level, terms, prec })
            }
            _ => unreachable!(),
        })
    }

    pub fn neg(&self, x: &TowerElem) -> TowerElem {
        match x {
            TowerElem::Scalar(a) => TowerElem::Scalar(self.fq.neg(a)),
            TowerElem::Poly(a) => TowerElem::Poly(PolyNode {
                level: a.level,
                terms: a.terms.iter().map(|(e, c)| (*e, self.neg(c))).collect(),
                prec: a.prec,
            }),
        }
    }

    pub fn sub(&self, x: &TowerElem, y: &TowerElem) -> Result<TowerElem> {
        self.add(x, &self.neg(y))
    }

    pub fn mul(&self, x: &TowerElem, y: &TowerElem) -> Result<TowerElem> {
        self.check_levels(x, y)?;
        Ok(match (x, y) {
            (TowerElem::Scalar(a), TowerElem::Scalar(b)) => TowerElem::Scalar(self.fq.mul(a, b)),
            (TowerElem::Poly(a), TowerElem::Poly(b)) => {
                let prec = mul_prec(a, b);
                let mut terms: BTreeMap<i64, TowerElem> = BTreeMap::new();
                for (e1, c1) in &a.terms {
                    for (e2, c2) in &b.terms {
                        let e = e1 + e2;
                        if let Some(n) = prec {
                            if e >= n {
                                continue;
                            }
                        }
                        let prod = self.mul(c1, c2)?;
                        if prod.is_zero() {
                            continue;
                        }
                        match terms.remove(&e) {
                            None => {
                                terms.insert(e, prod);
                            }
                            Some(old) => {
                                let s = self.add(&old, &prod)?;
                                if !s.is_zero() {
                                    terms.insert(e, s);
                                }
                            }
                        }
                    }
                }
                TowerElem::Poly(PolyNode { level: a.level, terms, prec })
            }
            _ => unreachable!(),
        })
    }

    pub fn scalar_int(&self, n: i64, x: &TowerElem) -> TowerElem {
        let c = {
            let p = self.p() as i64;
            let v = ((n % p) + p) % p;
            self.fq.from_u64(v as u64)
        };
        self.scalar_mul(&c, x)
    }

    pub fn scalar_mul(&self, c: &FieldElem, x: &TowerElem) -> TowerElem {
        if c.is_zero() {
            let mut z = self.zero(x.level());
            if let (TowerElem::Poly(zn), TowerElem::Poly(xn)) = (&mut z, x) {
                zn.prec = xn.prec;
            }
            return z;
        }
        match x {
            TowerElem::Scalar(a) => TowerElem::Scalar(self.fq.mul(c, a)),
            TowerElem::Poly(a) => TowerElem::Poly(PolyNode {
                level: a.level,
                terms: a.terms.iter().map(|(e, v)| (*e, self.scalar_mul(c, v))).collect(),
                prec: a.prec,
            }),
        }
    }

    /// Valuation in the outermost variable; `None` encodes +infinity.
    pub fn valuation(&self, x: &TowerElem) -> Option<i64> {
        match x {
            TowerElem::Scalar(c) => {
                if c.is_zero() {
                    None
                } else {
                    Some(0)
                }
            }
            TowerElem::Poly(n) => n.terms.keys().next().copied(),
        }
    }

    /// Valuation in the variable of level `var_level` (inner variables scan
    /// the whole support).
    pub fn valuation_in(&self, x: &TowerElem, var_level: u8) -> Option<i64> {
        if x.is_zero() {
            return None;
        }
        match x {
            TowerElem::Scalar(_) => Some(0),
            TowerElem::Poly(n) => {
                if n.level == var_level {
                    n.terms.keys().next().copied()
                } else {
                    n.terms
                        .values()
                        .filter_map(|c| self.valuation_in(c, var_level))
                        .min()
                }
            }
        }
    }

    /// p-th power (Frobenius of the tower ring).
    pub fn frobenius(&self, x: &TowerElem) -> TowerElem {
        match x {
            TowerElem::Scalar(c) => TowerElem::Scalar(self.fq.frobenius(c)),
            TowerElem::Poly(n) => TowerElem::Poly(PolyNode {
                level: n.level,
                terms: n
                    .terms
                    .iter()
                    .map(|(e, c)| (e * self.p() as i64, self.frobenius(c)))
                    .collect(),
                prec: n.prec.map(|b| b * self.p() as i64),
            }),
        }
    }

    /// The unique p-th root when it exists: all exponents divisible by p and
    /// all coefficients p-th powers recursively.
    pub fn frobenius_root(&self, x: &TowerElem) -> Option<TowerElem> {
        match x {
            TowerElem::Scalar(c) => Some(TowerElem::Scalar(self.fq.pth_root(c))),
            TowerElem::Poly(n) => {
                let p = self.p() as i64;
                let mut terms = BTreeMap::new();
                for (e, c) in &n.terms {
                    if e % p != 0 {
                        return None;
                    }
                    terms.insert(e / p, self.frobenius_root(c)?);
                }
                Some(TowerElem::Poly(PolyNode { level: n.level, terms, prec: n.prec.map(|b| b.div_euclid(p)) }))
            }
        }
    }

    pub fn pow(&self, x: &TowerElem, e: u32) -> Result<TowerElem> {
        let mut acc = self.one(x.level());
        let mut base = x.clone();
        let mut e = e;
        while e > 0 {
            if e & 1 == 1 {
                acc = self.mul(&acc, &base)?;
            }
            e >>= 1;
            if e > 0 {
                base = self.mul(&base, &base)?;
            }
        }
        Ok(acc)
    }

    /// Whether `x` is a monomial unit: a single term at every level.
    pub fn is_monomial_unit(&self, x: &TowerElem) -> bool {
        match x {
            TowerElem::Scalar(c) => !c.is_zero(),
            TowerElem::Poly(n) => n.terms.len() == 1 && self.is_monomial_unit(n.terms.values().next().unwrap()),
        }
    }

    /// Inverse of a unit.  Monomial units invert exactly; a general unit
    /// `c t^v (1 + h)` inverts by a finite geometric series and therefore
    /// requires a precision bound on the outermost variable.
    pub fn inv_unit(&self, x: &TowerElem) -> Result<TowerElem> {
        match x {
            TowerElem::Scalar(c) => Ok(TowerElem::Scalar(self.fq.inv(c)?)),
            TowerElem::Poly(n) => {
                if n.terms.is_empty() {
                    // O(t^N) with no known terms cannot expose a lead
                    return Err(if n.prec.is_some() {
                        Error::PrecisionUnderflow
                    } else {
                        Error::NotAUnit
                    });
                }
                if n.terms.len() == 1 {
                    let (e, c) = n.terms.iter().next().unwrap();
                    let ci = self.inv_unit(c)?;
                    let mut terms = BTreeMap::new();
                    terms.insert(-e, ci);
                    return Ok(TowerElem::Poly(PolyNode { level: n.level, terms, prec: n.prec }));
                }
                let bound = n.prec.ok_or(Error::PrecisionRequired)?;
                let v = *n.terms.keys().next().unwrap();
                if v >= bound {
                    return Err(Error::PrecisionUnderflow);
                }
                // x = lead * (1 + h), val(h) >= 1 after normalization
                let lead_coeff = n.terms.values().next().unwrap().clone();
                let lead = self.monomial(lead_coeff, n.level, v, n.level);
                let lead_inv = self.inv_unit(&self.exactify(&lead))?;
                let mut rest = self.mul(&self.exactify(x), &lead_inv)?; // 1 + h
                let one = self.one(x.level());
                rest = self.sub(&rest, &one)?; // h, val >= 1
                // geometric series up to the precision window
                let steps = (bound - v).max(0) as u32;
                let mut acc = one.clone();
                let mut pow = one;
                for _ in 0..steps {
                    pow = self.mul(&pow, &rest)?;
                    pow = self.truncate(&pow, bound - v);
                    if pow.is_zero() {
                        break;
                    }
                    let signed = self.neg(&pow);
                    acc = self.add(&acc, &signed)?;
                    pow = signed;
                    // pow now holds (-h)^k
                }
                let res = self.mul(&acc, &lead_inv)?;
                Ok(self.with_prec(&res, Some(bound - 2 * v)))
            }
        }
    }

    /// Drop terms with exponent >= bound (outermost variable).
    pub fn truncate(&self, x: &TowerElem, bound: i64) -> TowerElem {
        match x {
            TowerElem::Scalar(_) => x.clone(),
            TowerElem::Poly(n) => TowerElem::Poly(PolyNode {
                level: n.level,
                terms: n.terms.iter().filter(|(e, _)| **e < bound).map(|(e, c)| (*e, c.clone())).collect(),
                prec: n.prec,
            }),
        }
    }

    pub fn with_prec(&self, x: &TowerElem, prec: Option<i64>) -> TowerElem {
        match x {
            TowerElem::Scalar(_) => x.clone(),
            TowerElem::Poly(n) => {
                let mut terms = n.terms.clone();
                if let Some(b) = prec {
                    terms.retain(|e, _| *e < b);
                }
                TowerElem::Poly(PolyNode { level: n.level, terms, prec })
            }
        }
    }

    fn exactify(&self, x: &TowerElem) -> TowerElem {
        self.with_prec(x, None)
    }

    /// Decompose into monomials `(coeff in F_q, exponent vector by level)`;
    /// exponent vector is indexed by level 1..=level(x).
    pub fn monomials(&self, x: &TowerElem) -> Vec<(FieldElem, Vec<i64>)> {
        match x {
            TowerElem::Scalar(c) => {
                if c.is_zero() {
                    vec![]
                } else {
                    vec![(c.clone(), vec![])]
                }
            }
            TowerElem::Poly(n) => {
                let mut out = vec![];
                for (e, c) in &n.terms {
                    for (coeff, mut exps) in self.monomials(c) {
                        exps.push(*e);
                        out.push((coeff, exps));
                    }
                }
                out
            }
        }
    }

    pub fn pretty(&self, x: &TowerElem) -> String {
        match x {
            TowerElem::Scalar(c) => self.pretty_scalar(c),
            TowerElem::Poly(n) => {
                if n.terms.is_empty() {
                    return match n.prec {
                        Some(b) => format!("O({}^{})", self.var_name(n.level), b),
                        None => "0".into(),
                    };
                }
                let var = self.var_name(n.level);
                let mut parts = vec![];
                for (e, c) in &n.terms {
                    let cs = self.pretty(c);
                    let vs = match *e {
                        0 => String::new(),
                        1 => var.to_string(),
                        e => format!("{var}^{e}"),
                    };
                    let needs_parens = match c {
                        TowerElem::Scalar(f) => f.0.iter().filter(|&&x| x != 0).count() > 1,
                        TowerElem::Poly(nn) => nn.terms.len() > 1,
                    };
                    let part = match (cs.as_str(), vs.as_str()) {
                        (c, "") => c.to_string(),
                        ("1", v) => v.to_string(),
                        (c, v) if needs_parens => format!("({c})*{v}"),
                        (c, v) => format!("{c}*{v}"),
                    };
                    parts.push(part);
                }
                let mut s = parts.join(" + ");
                if let Some(b) = n.prec {
                    s.push_str(&format!(" + O({}^{})", self.var_name(n.level), b));
                }
                s
            }
        }
    }

    fn pretty_scalar(&self, c: &FieldElem) -> String {
        if c.is_zero() {
            return "0".into();
        }
        let mut parts = vec![];
        for (i, &x) in c.0.iter().enumerate() {
            if x == 0 {
                continue;
            }
            let term = match (i, x) {
                (0, x) => format!("{x}"),
                (1, 1) => "g".into(),
                (1, x) => format!("{x}*g"),
                (i, 1) => format!("g^{i}"),
                (i, x) => format!("{x}*g^{i}"),
            };
            parts.push(term);
        }
        parts.join("+")
    }
}

fn min_prec(a: Option<i64>, b: Option<i64>) -> Option<i64> {
    match (a, b) {
        (None, x) => x,
        (x, None) => x,
        (Some(x), Some(y)) => Some(x.min(y)),
    }
}

fn mul_prec(a: &PolyNode, b: &PolyNode) -> Option<i64> {
    let val = |n: &PolyNode| n.terms.keys().next().copied().or(n.prec);
    let pa = a.prec.and_then(|pa| val(b).map(|v| pa + v));
    let pb = b.prec.and_then(|pb| val(a).map(|v| pb + v));
    min_prec(pa, pb)
}

/// Integral lift of a tower element: same Laurent structure with Galois-ring
/// coefficients.  Only what the ghost-coordinate algorithms need.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum LiftElem {
    Scalar(GrElem),
    Poly { level: u8, terms: BTreeMap<i64, LiftElem> },
}

impl LiftElem {
    pub fn is_zero(&self) -> bool {
        match self {
            LiftElem::Scalar(c) => c.is_zero(),
            LiftElem::Poly { terms, .. } => terms.is_empty(),
        }
    }
}

/// Lift-ring operations at precision `p^K`.
pub struct LiftRing<'a> {
    pub tower: &'a Tower,
    pub gr: GaloisRing,
}

impl<'a> LiftRing<'a> {
    pub fn new(tower: &'a Tower, k: u32) -> Self {
        LiftRing { tower, gr: GaloisRing::new(&tower.fq, k) }
    }

    pub fn zero(&self, level: u8) -> LiftElem {
        if level == 0 {
            LiftElem::Scalar(self.gr.zero())
        } else {
            LiftElem::Poly { level, terms: BTreeMap::new() }
        }
    }

    pub fn lift(&self, x: &TowerElem) -> LiftElem {
        match x {
            TowerElem::Scalar(c) => LiftElem::Scalar(self.gr.lift(c)),
            TowerElem::Poly(n) => LiftElem::Poly {
                level: n.level,
                terms: n
                    .terms
                    .iter()
                    .map(|(e, c)| (*e, self.lift(c)))
                    .collect(),
            },
        }
    }

    pub fn reduce(&self, x: &LiftElem) -> TowerElem {
        match x {
            LiftElem::Scalar(c) => TowerElem::Scalar(self.gr.reduce(c)),
            LiftElem::Poly { level, terms } => {
                let mut out = BTreeMap::new();
                for (e, c) in terms {
                    let r = self.reduce(c);
                    if !r.is_zero() {
                        out.insert(*e, r);
                    }
                }
                TowerElem::Poly(PolyNode { level: *level, terms: out, prec: None })
            }
        }
    }

    pub fn add(&self, x: &LiftElem, y: &LiftElem) -> LiftElem {
        match (x, y) {
            (LiftElem::Scalar(a), LiftElem::Scalar(b)) => LiftElem::Scalar(self.gr.add(a, b)),
            (LiftElem::Poly { level, terms: ta }, LiftElem::Poly { terms: tb, .. }) => {
                let mut terms = ta.clone();
                for (e, c) in tb {
                    match terms.remove(e) {
                        None => {
                            terms.insert(*e, c.clone());
                        }
                        Some(old) => {
                            let s = self.add(&old, c);
                            if !s.is_zero() {
                                terms.insert(*e, s);
                            }
                        }
                    }
                }
                LiftElem::Poly { level: *level, terms }
            }
            _ => panic!("lift level mismatch"),
        }
    }

    pub fn neg(&self, x: &LiftElem) -> LiftElem {
        match x {
            LiftElem::Scalar(a) => LiftElem::Scalar(self.gr.neg(a)),
            LiftElem::Poly { level, terms } => LiftElem::Poly {
                level: *level,
                terms: terms.iter().map(|(e, c)| (*e, self.neg(c))).collect(),
            },
        }
    }

    pub fn mul(&self, x: &LiftElem, y: &LiftElem) -> LiftElem {
        match (x, y) {
            (LiftElem::Scalar(a), LiftElem::Scalar(b)) => LiftElem::Scalar(self.gr.mul(a, b)),
            (LiftElem::Poly { level, terms: ta }, LiftElem::Poly { terms: tb, .. }) => {
                let mut terms: BTreeMap<i64, LiftElem> = BTreeMap::new();
                for (e1, c1) in ta {
                    for (e2, c2) in tb {
                        let prod = self.mul(c1, c2);
                        if prod.is_zero() {
                            continue;
                        }
                        let e = e1 + e2;
                        match terms.remove(&e) {
                            None => {
                                terms.insert(e, prod);
                            }
                            Some(old) => {
                                let s = self.add(&old, &prod);
                                if !s.is_zero() {
                                    terms.insert(e, s);
                                }
                            }
                        }
                    }
                }
                LiftElem::Poly { level: *level, terms }
            }
            _ => panic!("lift level mismatch"),
        }
    }

    pub fn pow(&self, x: &LiftElem, e: u64) -> LiftElem {
        let mut acc = match x {
            LiftElem::Scalar(_) => LiftElem::Scalar(self.gr.scalar(1)),
            LiftElem::Poly { level, .. } => {
                let mut terms = BTreeMap::new();
                terms.insert(0, self.pow_one_level(*level - 1));
                LiftElem::Poly { level: *level, terms }
            }
        };
        let mut base = x.clone();
        let mut e = e;
        while e > 0 {
            if e & 1 == 1 {
                acc = self.mul(&acc, &base);
            }
            e >>= 1;
            if e > 0 {
                base = self.mul(&base, &base);
            }
        }
        acc
    }

    fn pow_one_level(&self, level: u8) -> LiftElem {
        if level == 0 {
            LiftElem::Scalar(self.gr.scalar(1))
        } else {
            let mut terms = BTreeMap::new();
            terms.insert(0, self.pow_one_level(level - 1));
            LiftElem::Poly { level, terms }
        }
    }

    pub fn scalar_mul(&self, n: i64, x: &LiftElem) -> LiftElem {
        let s = self.gr.scalar(n);
        self.scalar_mul_gr(&s, x)
    }

    fn scalar_mul_gr(&self, s: &GrElem, x: &LiftElem) -> LiftElem {
        match x {
            LiftElem::Scalar(a) => LiftElem::Scalar(self.gr.mul(s, a)),
            LiftElem::Poly { level, terms } => {
                let mut out = BTreeMap::new();
                for (e, c) in terms {
                    let v = self.scalar_mul_gr(s, c);
                    if !v.is_zero() {
                        out.insert(*e, v);
                    }
                }
                LiftElem::Poly { level: *level, terms: out }
            }
        }
    }

    /// Exact division by p^e, coefficientwise.
    pub fn div_pow_p(&self, x: &LiftElem, e: u32) -> LiftElem {
        match x {
            LiftElem::Scalar(a) => LiftElem::Scalar(self.gr.div_pow_p(a, e)),
            LiftElem::Poly { level, terms } => LiftElem::Poly {
                level: *level,
                terms: terms.iter().map(|(k, c)| (*k, self.div_pow_p(c, e))).collect(),
            },
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn tower(p: u8, r: u8, depth: u8) -> Tower {
        Tower::new(TowerSpec::new(p, r, depth).unwrap()).unwrap()
    }

    #[test]
    fn char_2_cancellation() {
        // add(t + 1, t) over F_2 -> 1
        let tw = tower(2, 1, 1);
        let t = tw.var(1, 1);
        let one = tw.one(1);
        let tp1 = tw.add(&t, &one).unwrap();
        assert_eq!(tw.add(&tp1, &t).unwrap(), one);
    }

    #[test]
    fn inverse_monomials() {
        let tw = tower(3, 1, 1);
        let tinv = tw.var(1, -1);
        let t = tw.var(1, 1);
        assert_eq!(tw.mul(&tinv, &t).unwrap(), tw.one(1));
    }

    #[test]
    fn monomial_product_depth2() {
        // mul(u t^-1, u t^-1) over F_3((u))((t)) -> u^2 t^-2
        let tw = tower(3, 1, 2);
        let u = tw.var(1, 1);
        let x = tw.monomial(u.clone(), 2, -1, 2);
        let sq = tw.mul(&x, &x).unwrap();
        let u2 = tw.pow(&u, 2).unwrap();
        let expect = tw.monomial(u2, 2, -2, 2);
        assert_eq!(sq, expect);
    }

    #[test]
    fn valuation_examples() {
        let tw = tower(5, 1, 2);
        // t^-3 + t -> -3
        let x = tw.add(&tw.var(2, -3), &tw.var(2, 1)).unwrap();
        assert_eq!(tw.valuation(&x), Some(-3));
        // 0 -> +inf
        assert_eq!(tw.valuation(&tw.zero(2)), None);
        // u t^0 + t^2 -> 0
        let u = tw.monomial(tw.var(1, 1), 2, 0, 2);
        let y = tw.add(&u, &tw.var(2, 2)).unwrap();
        assert_eq!(tw.valuation(&y), Some(0));
    }

    #[test]
    fn frobenius_root_examples() {
        // x = t^2, p = 2 -> t
        let tw = tower(2, 1, 1);
        let t2 = tw.var(1, 2);
        assert_eq!(tw.frobenius_root(&t2), Some(tw.var(1, 1)));
        // x = u t^2 over F_2((u))((t)) -> Absent
        let tw2 = tower(2, 1, 2);
        let x = tw2.monomial(tw2.var(1, 1), 2, 2, 2);
        assert_eq!(tw2.frobenius_root(&x), None);
        // x = g^3 t^3 over F_9((t)), p = 3 -> g t
        let tw9 = tower(3, 2, 1);
        let g = tw9.fq.gen();
        let g3 = tw9.fq.pow(&g, 3);
        let x = tw9.monomial(TowerElem::Scalar(g3), 1, 3, 1);
        let expect = tw9.monomial(TowerElem::Scalar(g), 1, 1, 1);
        assert_eq!(tw9.frobenius_root(&x), Some(expect));
    }

    #[test]
    fn frobenius_root_of_pth_power_roundtrip() {
        let tw = tower(3, 2, 2);
        let g = TowerElem::Scalar(tw.fq.gen());
        let x = tw
            .add(
                &tw.monomial(g, 2, -2, 2),
                &tw.monomial(tw.var(1, 3), 2, 1, 2),
            )
            .unwrap();
        let xp = tw.pow(&x, 3).unwrap();
        assert_eq!(tw.frobenius_root(&xp), Some(x));
    }

    #[test]
    fn unit_inverse_with_precision() {
        let tw = tower(3, 1, 1);
        // x = t^-1 + 1 with precision 6
        let x = tw.with_prec(&tw.add(&tw.var(1, -1), &tw.one(1)).unwrap(), Some(6));
        let inv = tw.inv_unit(&x).unwrap();
        let prod = tw.mul(&x, &inv).unwrap();
        // product should be 1 modulo the precision window
        let one = tw.one(1);
        let diff = tw.sub(&prod, &one).unwrap();
        match &diff {
            TowerElem::Poly(n) => {
                assert!(n.terms.keys().all(|e| *e >= n.prec.unwrap_or(i64::MAX) || *e >= 6),
                    "inverse failed below precision: {}", tw.pretty(&diff));
            }
            _ => panic!(),
        }
    }

    #[test]
    fn precision_underflow_on_unknown_lead() {
        let tw = tower(3, 1, 1);
        // every known term is at or above the bound: the unit has no
        // determined leading term
        let x = tw.with_prec(&tw.add(&tw.var(1, 2), &tw.var(1, 3)).unwrap(), Some(2));
        assert_eq!(tw.inv_unit(&x), Err(Error::PrecisionUnderflow));
    }

    #[test]
    fn general_unit_inverse_requires_precision() {
        let tw = tower(3, 1, 1);
        let x = tw.add(&tw.one(1), &tw.var(1, 1)).unwrap();
        assert_eq!(tw.inv_unit(&x), Err(Error::PrecisionRequired));
    }

    #[test]
    fn lift_roundtrip_mod_p() {
        let tw = tower(5, 2, 2);
        let lr = LiftRing::new(&tw, 3);
        let g = TowerElem::Scalar(tw.fq.gen());
        let x = tw
            .add(&tw.monomial(g, 2, -1, 2), &tw.var(2, 2))
            .unwrap();
        let y = tw.add(&tw.var(2, 1), &tw.one(2)).unwrap();
        let lx = lr.lift(&x);
        let ly = lr.lift(&y);
        assert_eq!(lr.reduce(&lr.mul(&lx, &ly)), tw.mul(&x, &y).unwrap());
    }
}
