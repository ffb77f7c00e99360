//! Seeded, reproducible verification suites: every in-scope operator
//! identity is registered as an executable law over a configuration grid,
//! with counterexample shrinking and machine-readable reports.
//!
//! Reports are deterministic byte-for-byte given `(suite, seed, grid)`;
//! wall time is reported only on request so that determinism is the
//! default.  A small set of registered mutations (deliberately broken
//! operator tables) backs the meta-test that every law can actually fail.

use crate::cartier::{self, CartierSection};
use crate::conductor;
use crate::derham;
use crate::error::{Error, Result};
use crate::fil;
use crate::forms::{self, DrwForm};
use crate::tower::{Tower, TowerElem, TowerSpec};
use crate::witt::{self, WittVec};
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use std::collections::BTreeMap;

/// A point of the configuration grid.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct GridPoint {
    pub p: u8,
    pub r: u8,
    pub depth: u8,
    pub m: u8,
}

/// Suite configuration.
#[derive(Debug, Clone)]
pub struct LawSuite {
    pub name: String,
    pub grid: Vec<GridPoint>,
    pub samples: u32,
    pub seed: u64,
    pub max_exp: i64,
    pub laws: Vec<&'static str>,
}

/// Default grid: p in {3,5}, r in {1,2}, depth in {1,2}, m in {1,2,3};
/// p = 2 is appended behind the experimental flag.
pub fn default_grid(experimental_p2: bool) -> Vec<GridPoint> {
    let mut primes = vec![3u8, 5];
    if experimental_p2 {
        primes.insert(0, 2);
    }
    let mut out = vec![];
    for &p in &primes {
        for r in [1u8, 2] {
            for depth in [1u8, 2] {
                for m in [1u8, 2, 3] {
                    out.push(GridPoint { p, r, depth, m });
                }
            }
        }
    }
    out
}

/// Operator table consulted by the laws; mutations replace entries.
#[derive(Clone, Copy)]
pub struct Ops {
    pub d: fn(&Tower, &DrwForm) -> Result<DrwForm>,
    pub f: fn(&Tower, &DrwForm) -> Result<DrwForm>,
    pub v: fn(&Tower, &DrwForm) -> Result<DrwForm>,
    pub r: fn(&Tower, &DrwForm) -> Result<DrwForm>,
    pub mul: fn(&Tower, &DrwForm, &DrwForm) -> Result<DrwForm>,
    pub cartier: fn(&Tower, &DrwForm) -> Result<DrwForm>,
    pub fil_level: fn(&DrwForm) -> Option<i64>,
    pub witt_add: fn(&Tower, &WittVec, &WittVec) -> Result<WittVec>,
    pub witt_mul: fn(&Tower, &WittVec, &WittVec) -> Result<WittVec>,
    pub frobenius_root: fn(&Tower, &TowerElem) -> Option<TowerElem>,
    pub valuation: fn(&Tower, &TowerElem) -> Option<i64>,
}

impl Default for Ops {
    fn default() -> Self {
        Ops {
            d: forms::apply_d,
            f: forms::apply_f,
            v: forms::apply_v,
            r: forms::apply_r,
            mul: forms::mul,
            cartier: cartier::cartier_c,
            fil_level: fil::fil_level,
            witt_add: witt::add,
            witt_mul: witt::mul,
            frobenius_root: |t, x| t.frobenius_root(x),
            valuation: |t, x| t.valuation(x),
        }
    }
}

/// Registered mutations for the sensitivity meta-test.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Mutation {
    /// F loses its Frobenius twist (acts as plain restriction)
    FSkipsFrobenius,
    /// V is replaced by the componentwise section of R
    VLiftsBySection,
    /// products are shifted by one monomial
    MulShifted,
    /// products in unequal degrees gain a spurious factor of 2
    MulBiasedDeg,
    /// the Cartier operator flips sign
    CartierSignFlip,
    /// the Cartier operator keeps a spurious Frobenius summand
    CartierPlusF,
    /// the Cartier value is shifted by one monomial
    CartierShifted,
    /// filtration levels are off by one
    FilLevelBiased,
    /// d acts after a monomial shift
    DShifted,
    /// Witt addition ignores the carry polynomials
    WittAddNaive,
    /// Witt product forgets the ghost twist
    WittMulNaive,
    /// restriction gains a spurious factor of p
    RScaled,
    /// p-th roots are reported for everything
    FrobRootBogus,
    /// valuations are off by one
    ValuationBiased,
}

pub const MUTATIONS: [Mutation; 14] = [
    Mutation::FSkipsFrobenius,
    Mutation::VLiftsBySection,
    Mutation::MulShifted,
    Mutation::MulBiasedDeg,
    Mutation::CartierSignFlip,
    Mutation::CartierPlusF,
    Mutation::CartierShifted,
    Mutation::FilLevelBiased,
    Mutation::DShifted,
    Mutation::WittAddNaive,
    Mutation::WittMulNaive,
    Mutation::RScaled,
    Mutation::FrobRootBogus,
    Mutation::ValuationBiased,
];

fn mut_f(tower: &Tower, x: &DrwForm) -> Result<DrwForm> {
    forms::apply_r(tower, x)
}
fn mut_v_section(tower: &Tower, x: &DrwForm) -> Result<DrwForm> {
    fil::r_section(tower, x)
}
fn mut_mul(tower: &Tower, x: &DrwForm, y: &DrwForm) -> Result<DrwForm> {
    let z = forms::mul(tower, x, y)?;
    if z.level == 0 {
        return Ok(z);
    }
    fil::shift_by_monomial(tower, &z, 1)
}
fn mut_mul_biased(tower: &Tower, x: &DrwForm, y: &DrwForm) -> Result<DrwForm> {
    let z = forms::mul(tower, x, y)?;
    if x.q < y.q {
        Ok(forms::scalar_int(tower, 2, &z))
    } else {
        Ok(z)
    }
}
fn mut_cartier_sign(tower: &Tower, x: &DrwForm) -> Result<DrwForm> {
    Ok(forms::neg(tower, &cartier::cartier_c(tower, x)?))
}
fn mut_cartier_plus_f(tower: &Tower, x: &DrwForm) -> Result<DrwForm> {
    let c = cartier::cartier_c(tower, x)?;
    if x.m < 2 {
        return Ok(c);
    }
    forms::add(tower, &c, &forms::apply_f(tower, x)?)
}
fn mut_cartier_shifted(tower: &Tower, x: &DrwForm) -> Result<DrwForm> {
    let c = cartier::cartier_c(tower, x)?;
    if c.level == 0 {
        return Ok(c);
    }
    fil::shift_by_monomial(tower, &c, -1)
}
fn mut_fil_level(x: &DrwForm) -> Option<i64> {
    fil::fil_level(x).map(|n| n + 1)
}
fn mut_d_shifted(tower: &Tower, x: &DrwForm) -> Result<DrwForm> {
    if x.level == 0 {
        return forms::apply_d(tower, x);
    }
    forms::apply_d(tower, &fil::shift_by_monomial(tower, x, 1)?)
}
fn mut_r_scaled(tower: &Tower, x: &DrwForm) -> Result<DrwForm> {
    Ok(forms::mul_p(tower, &forms::apply_r(tower, x)?))
}
fn mut_witt_add(tower: &Tower, x: &WittVec, y: &WittVec) -> Result<WittVec> {
    // coordinatewise addition: drops every carry
    let coords = x
        .coords
        .iter()
        .zip(&y.coords)
        .map(|(a, b)| tower.add(a, b))
        .collect::<Result<Vec<_>>>()?;
    Ok(WittVec { level: x.level, coords })
}
fn mut_witt_mul(tower: &Tower, x: &WittVec, y: &WittVec) -> Result<WittVec> {
    let coords = x
        .coords
        .iter()
        .zip(&y.coords)
        .map(|(a, b)| tower.mul(a, b))
        .collect::<Result<Vec<_>>>()?;
    Ok(WittVec { level: x.level, coords })
}
fn mut_frobenius_root(tower: &Tower, x: &TowerElem) -> Option<TowerElem> {
    tower.frobenius_root(x).or_else(|| Some(x.clone()))
}
fn mut_valuation(tower: &Tower, x: &TowerElem) -> Option<i64> {
    tower.valuation(x).map(|v| v + 1)
}

pub fn ops_with(mutation: Option<Mutation>) -> Ops {
    let mut ops = Ops::default();
    match mutation {
        None => {}
        Some(Mutation::FSkipsFrobenius) => ops.f = mut_f,
        Some(Mutation::VLiftsBySection) => ops.v = mut_v_section,
        Some(Mutation::MulShifted) => ops.mul = mut_mul,
        Some(Mutation::MulBiasedDeg) => ops.mul = mut_mul_biased,
        Some(Mutation::CartierSignFlip) => ops.cartier = mut_cartier_sign,
        Some(Mutation::CartierPlusF) => ops.cartier = mut_cartier_plus_f,
        Some(Mutation::CartierShifted) => ops.cartier = mut_cartier_shifted,
        Some(Mutation::FilLevelBiased) => ops.fil_level = mut_fil_level,
        Some(Mutation::DShifted) => ops.d = mut_d_shifted,
        Some(Mutation::WittAddNaive) => ops.witt_add = mut_witt_add,
        Some(Mutation::WittMulNaive) => ops.witt_mul = mut_witt_mul,
        Some(Mutation::RScaled) => ops.r = mut_r_scaled,
        Some(Mutation::FrobRootBogus) => ops.frobenius_root = mut_frobenius_root,
        Some(Mutation::ValuationBiased) => ops.valuation = mut_valuation,
    }
    ops
}

/// One mutation that must break each law (the meta-test coverage table).
pub fn mutation_coverage() -> Vec<(&'static str, Mutation)> {
    vec![
        ("witt.ring-axioms", Mutation::WittAddNaive),
        ("ring.laurent-axioms", Mutation::WittMulNaive),
        ("drw.generator-spanning", Mutation::DShifted),
        ("witt.fv-p", Mutation::WittAddNaive),
        ("witt.x-vy", Mutation::WittMulNaive),
        ("ring.frobenius-root", Mutation::FrobRootBogus),
        ("ring.valuation-additive", Mutation::ValuationBiased),
        ("drw.fv-p", Mutation::FSkipsFrobenius),
        ("drw.fdv-d", Mutation::FSkipsFrobenius),
        ("drw.vd-pdv", Mutation::VLiftsBySection),
        ("drw.x-vy", Mutation::VLiftsBySection),
        ("drw.r-commutes", Mutation::VLiftsBySection),
        ("drw.fd-teich", Mutation::FSkipsFrobenius),
        ("drw.dlog-additive", Mutation::DShifted),
        ("drw.dd-zero", Mutation::DShifted),
        ("drw.leibniz", Mutation::MulShifted),
        ("drw.graded-comm", Mutation::MulBiasedDeg),
        ("drw.witt-intertwine", Mutation::WittMulNaive),
        ("m1.oracle", Mutation::DShifted),
        ("fil.operator-axioms", Mutation::FilLevelBiased),
        ("fil.monomial-shift", Mutation::MulShifted),
        ("fil.brylinski-crosscheck", Mutation::FilLevelBiased),
        ("fil.goodness", Mutation::VLiftsBySection),
        ("fil.pbar", Mutation::RScaled),
        ("fil.top-degree-integral", Mutation::FilLevelBiased),
        ("cartier.cf-r", Mutation::CartierSignFlip),
        ("cartier.kills-dv", Mutation::CartierPlusF),
        ("cartier.sections", Mutation::CartierSignFlip),
        ("cartier.linear", Mutation::CartierPlusF),
        ("cartier.fil-equiv", Mutation::CartierShifted),
        ("cartier.vr3", Mutation::CartierSignFlip),
        ("cartier.zb-grading", Mutation::CartierShifted),
        ("cond.table", Mutation::FilLevelBiased),
        ("cond.h1-crosscheck", Mutation::WittAddNaive),
        ("cond.rsw-nonzero", Mutation::FilLevelBiased),
        ("cond.class-invariance", Mutation::CartierSignFlip),
        ("cond.v-compat", Mutation::VLiftsBySection),
    ]
}

// ---------------------------------------------------------------------------
// samplers
// ---------------------------------------------------------------------------

/// Random tower element with bounded support and exponent window.
pub fn sample_tower_elem(
    tower: &Tower,
    rng: &mut ChaCha8Rng,
    level: u8,
    window: i64,
    terms: u32,
) -> TowerElem {
    if level == 0 {
        let n = rng.gen_range(0..tower.fq.order());
        let mut c = tower.fq.zero();
        let g = tower.fq.gen();
        let mut acc = tower.fq.one();
        let mut k = n;
        while k > 0 {
            if k % 2 == 1 {
                c = tower.fq.add(&c, &acc);
            }
            acc = tower.fq.mul(&acc, &g);
            k /= 2;
        }
        return TowerElem::Scalar(c);
    }
    let mut x = tower.zero(level);
    let count = rng.gen_range(0..=terms);
    for _ in 0..count {
        let e = rng.gen_range(-window..=window);
        let c = sample_tower_elem(tower, rng, level - 1, window.min(4), 1);
        let mono = tower.monomial(c, level, e, level);
        x = tower.add(&x, &mono).expect("same level");
    }
    x
}

/// Random Witt vector over the top of the tower.
pub fn sample_witt(tower: &Tower, rng: &mut ChaCha8Rng, m: u8, window: i64) -> WittVec {
    let level = tower.depth();
    let coords = (0..m)
        .map(|_| sample_tower_elem(tower, rng, level, window, 2))
        .collect();
    WittVec { level, coords }
}

/// Random normal form of the requested shape (recursive over levels).
pub fn sample_form(
    tower: &Tower,
    rng: &mut ChaCha8Rng,
    level: u8,
    q: u8,
    m: u8,
    window: i64,
) -> DrwForm {
    sample_form_bounded(tower, rng, level, q, m, window, None)
}

/// Random form with `fil_level <= n` when `bound = Some(n)`.
pub fn sample_form_bounded(
    tower: &Tower,
    rng: &mut ChaCha8Rng,
    level: u8,
    q: u8,
    m: u8,
    window: i64,
    bound: Option<i64>,
) -> DrwForm {
    if q > level {
        return forms::zero_form(tower, level, q, m);
    }
    if level == 0 {
        return DrwForm {
            level: 0,
            q: 0,
            m,
            repr: forms::Repr::Witt(sample_witt_at(tower, rng, 0, m, window)),
        };
    }
    let p = tower.p() as i64;
    let mut acc = forms::zero_form(tower, level, q, m);
    let count = rng.gen_range(0..3u32);
    for _ in 0..count {
        let s = rng.gen_range(0..m);
        let mut i = rng.gen_range(-window..=window);
        if s > 0 {
            while i % p == 0 {
                i = rng.gen_range(-window..=window);
                if i % p != 0 {
                    break;
                }
                i += 1;
            }
        }
        let n = i * p.pow((m - 1 - s) as u32);
        if let Some(b) = bound {
            if n < -b {
                continue;
            }
        }
        let len = m - s;
        let a = sample_form(tower, rng, level - 1, q, len, window.min(4));
        let b = if q >= 1 {
            sample_form(tower, rng, level - 1, q - 1, len, window.min(4))
        } else {
            forms::zero_form(tower, level - 1, 0, len)
        };
        let a = if a.is_zero() { None } else { Some(a) };
        let b = if q >= 1 && !b.is_zero() { Some(b) } else { None };
        if a.is_none() && b.is_none() {
            continue;
        }
        let mut comps = BTreeMap::new();
        comps.insert(n, forms::Component { s, a, b });
        let single = DrwForm { level, q, m, repr: forms::Repr::Components(comps) };
        acc = forms::add(tower, &acc, &single).expect("same shape");
    }
    acc
}

fn sample_witt_at(tower: &Tower, rng: &mut ChaCha8Rng, level: u8, m: u8, window: i64) -> WittVec {
    let coords = (0..m)
        .map(|_| sample_tower_elem(tower, rng, level, window, 2))
        .collect();
    WittVec { level, coords }
}

/// Requested sample shape for [`sample_element`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SampleShape {
    /// a Witt vector over the top of the tower
    Witt,
    /// a normal form of the given degree
    Form { q: u8 },
    /// an element of Z_1 (always satisfies `is_z1`)
    Z1Form { q: u8 },
    /// a form with `fil_level <= n`
    FilBounded { q: u8, n: i64 },
}

/// Sampled element produced by [`sample_element`].
#[derive(Debug, Clone, PartialEq)]
pub enum Sampled {
    Witt(WittVec),
    Form(DrwForm),
}

/// Deterministic sampler over a grid point: identical `(grid, seed, shape)`
/// produce identical elements.
pub fn sample_element(gp: GridPoint, seed: u64, shape: SampleShape) -> crate::error::Result<Sampled> {
    let tower = Tower::new(TowerSpec::new(gp.p, gp.r, gp.depth)?)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let window = 8;
    Ok(match shape {
        SampleShape::Witt => Sampled::Witt(sample_witt(&tower, &mut rng, gp.m, window)),
        SampleShape::Form { q } => {
            if q > gp.depth {
                return Err(Error::UnsupportedShape(format!(
                    "degree {q} at depth {}",
                    gp.depth
                )));
            }
            Sampled::Form(sample_form(&tower, &mut rng, gp.depth, q, gp.m, window))
        }
        SampleShape::Z1Form { q } => {
            if q > gp.depth {
                return Err(Error::UnsupportedShape(format!(
                    "degree {q} at depth {}",
                    gp.depth
                )));
            }
            Sampled::Form(sample_z1(&tower, &mut rng, gp.depth, q, gp.m, window))
        }
        SampleShape::FilBounded { q, n } => {
            if q > gp.depth {
                return Err(Error::UnsupportedShape(format!(
                    "degree {q} at depth {}",
                    gp.depth
                )));
            }
            Sampled::Form(sample_form_bounded(
                &tower, &mut rng, gp.depth, q, gp.m, window, Some(n),
            ))
        }
    })
}

/// Random element of `Z_1` (constructed as an F-image).
pub fn sample_z1(tower: &Tower, rng: &mut ChaCha8Rng, level: u8, q: u8, m: u8, window: i64) -> DrwForm {
    let up = sample_form(tower, rng, level, q, m + 1, window);
    forms::apply_f(tower, &up).expect("length m+1 >= 2")
}

// ---------------------------------------------------------------------------
// laws
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, Serialize)]
pub struct Counterexample {
    pub grid: GridPoint,
    pub description: String,
    pub operands: Vec<String>,
}

#[derive(Debug, Clone, Serialize)]
pub struct LawOutcome {
    pub id: String,
    pub status: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub counterexample: Option<Counterexample>,
}

#[derive(Debug, Clone, Serialize)]
pub struct Report {
    pub suite: String,
    pub seed: u64,
    pub samples: u32,
    pub grid: Vec<GridPoint>,
    pub laws: Vec<LawOutcome>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub elapsed_ms: Option<u64>,
}

impl Report {
    pub fn all_pass(&self) -> bool {
        self.laws.iter().all(|l| l.status == "pass")
    }
}

struct Ctx<'a> {
    tower: &'a Tower,
    ops: &'a Ops,
    rng: ChaCha8Rng,
    samples: u32,
    window: i64,
    m: u8,
    grid: GridPoint,
}

impl<'a> Ctx<'a> {
    fn depth(&self) -> u8 {
        self.tower.depth()
    }

    fn rand_q(&mut self) -> u8 {
        self.rng.gen_range(0..=self.depth())
    }
}

type LawFn = fn(&mut Ctx) -> Result<Option<Counterexample>>;

fn ce(ctx: &Ctx, description: impl Into<String>, operands: Vec<String>) -> Counterexample {
    Counterexample { grid: ctx.grid, description: description.into(), operands }
}

/// Greedy shrink: drop components of the failing form while the predicate
/// keeps failing; minimizes component count first, then support width.
fn shrink_form(
    tower: &Tower,
    x: &DrwForm,
    still_fails: &dyn Fn(&DrwForm) -> bool,
) -> DrwForm {
    let mut cur = x.clone();
    loop {
        let mut improved = false;
        if let Some(comps) = cur.components() {
            let keys: Vec<i64> = comps.keys().copied().collect();
            for k in keys {
                let mut smaller = cur.clone();
                if let forms::Repr::Components(cm) = &mut smaller.repr {
                    cm.remove(&k);
                }
                if still_fails(&smaller) {
                    cur = smaller;
                    improved = true;
                    break;
                }
            }
        }
        if !improved {
            let _ = tower;
            return cur;
        }
    }
}

fn pretty_w(tower: &Tower, w: &WittVec) -> String {
    let parts: Vec<String> = w.coords.iter().map(|c| tower.pretty(c)).collect();
    format!("({})", parts.join(", "))
}

// --- witt-ring laws --------------------------------------------------------

fn law_witt_ring_axioms(ctx: &mut Ctx) -> Result<Option<Counterexample>> {
    let _depth = ctx.tower.depth();
    let tower = ctx.tower;
    let add = ctx.ops.witt_add;
    let mul = ctx.ops.witt_mul;
    for _ in 0..ctx.samples {
        let x = sample_witt(tower, &mut ctx.rng, ctx.m, ctx.window);
        let y = sample_witt(tower, &mut ctx.rng, ctx.m, ctx.window);
        let z = sample_witt(tower, &mut ctx.rng, ctx.m, ctx.window);
        let assoc_add = add(tower, &add(tower, &x, &y)?, &z)? == add(tower, &x, &add(tower, &y, &z)?)?;
        let comm_add = add(tower, &x, &y)? == add(tower, &y, &x)?;
        let assoc_mul = mul(tower, &mul(tower, &x, &y)?, &z)? == mul(tower, &x, &mul(tower, &y, &z)?)?;
        let comm_mul = mul(tower, &x, &y)? == mul(tower, &y, &x)?;
        let distrib = mul(tower, &x, &add(tower, &y, &z)?)?
            == add(tower, &mul(tower, &x, &y)?, &mul(tower, &x, &z)?)?;
        if !(assoc_add && comm_add && assoc_mul && comm_mul && distrib) {
            return Ok(Some(ce(
                ctx,
                "ring axiom failed on Witt coordinates",
                vec![pretty_w(tower, &x), pretty_w(tower, &y), pretty_w(tower, &z)],
            )));
        }
    }
    Ok(None)
}

fn law_witt_fv_p(ctx: &mut Ctx) -> Result<Option<Counterexample>> {
    let _depth = ctx.tower.depth();
    let tower = ctx.tower;
    for _ in 0..ctx.samples {
        let x = sample_witt(tower, &mut ctx.rng, ctx.m, ctx.window);
        let fv = witt::frobenius(tower, &witt::v_shift(tower, &x))?;
        let px = {
            // p x through the mutable table: x + x + .. (p times)
            let mut acc = witt::zero(tower, x.level, x.m());
            for _ in 0..tower.p() {
                acc = (ctx.ops.witt_add)(tower, &acc, &x)?;
            }
            acc
        };
        if fv != px {
            return Ok(Some(ce(ctx, "F V != p", vec![pretty_w(tower, &x)])));
        }
    }
    Ok(None)
}

fn law_witt_xvy(ctx: &mut Ctx) -> Result<Option<Counterexample>> {
    let _depth = ctx.tower.depth();
    let tower = ctx.tower;
    for _ in 0..ctx.samples {
        let x = sample_witt(tower, &mut ctx.rng, ctx.m + 1, ctx.window);
        let y = sample_witt(tower, &mut ctx.rng, ctx.m, ctx.window);
        let lhs = (ctx.ops.witt_mul)(tower, &x, &witt::v_shift(tower, &y))?;
        let fx = witt::frobenius(tower, &x)?;
        let rhs = witt::v_shift(tower, &(ctx.ops.witt_mul)(tower, &fx, &y)?);
        if lhs != rhs {
            return Ok(Some(ce(
                ctx,
                "x V(y) != V(F(x) y)",
                vec![pretty_w(tower, &x), pretty_w(tower, &y)],
            )));
        }
    }
    Ok(None)
}

fn law_frobenius_root(ctx: &mut Ctx) -> Result<Option<Counterexample>> {
    let depth = ctx.tower.depth();
    let tower = ctx.tower;
    for _ in 0..ctx.samples {
        let x = sample_tower_elem(tower, &mut ctx.rng, depth, ctx.window, 3);
        let xp = tower.pow(&x, tower.p() as u32)?;
        if (ctx.ops.frobenius_root)(tower, &xp) != Some(x.clone()) {
            return Ok(Some(ce(ctx, "frobenius_root(x^p) != x", vec![tower.pretty(&x)])));
        }
        // criterion: root exists iff all exponents divisible and
        // coefficients roots recursively; cross-check via p-th power
        if let Some(r) = (ctx.ops.frobenius_root)(tower, &x) {
            if tower.pow(&r, tower.p() as u32)? != x {
                return Ok(Some(ce(ctx, "frobenius_root returned a non-root", vec![tower.pretty(&x)])));
            }
        }
    }
    Ok(None)
}

fn law_valuation_additive(ctx: &mut Ctx) -> Result<Option<Counterexample>> {
    let depth = ctx.tower.depth();
    let tower = ctx.tower;
    for _ in 0..ctx.samples {
        let x = sample_tower_elem(tower, &mut ctx.rng, depth, ctx.window, 2);
        let y = sample_tower_elem(tower, &mut ctx.rng, depth, ctx.window, 2);
        if x.is_zero() || y.is_zero() {
            continue;
        }
        let xy = tower.mul(&x, &y)?;
        let val = ctx.ops.valuation;
        let sum = val(tower, &x).unwrap() + val(tower, &y).unwrap();
        if val(tower, &xy) != Some(sum) {
            return Ok(Some(ce(
                ctx,
                "valuation not additive",
                vec![tower.pretty(&x), tower.pretty(&y)],
            )));
        }
    }
    Ok(None)
}

// --- drw operator laws -----------------------------------------------------

fn law_drw_fv_p(ctx: &mut Ctx) -> Result<Option<Counterexample>> {
    let depth = ctx.tower.depth();
    let tower = ctx.tower;
    for _ in 0..ctx.samples {
        let q = ctx.rand_q();
        let x = sample_form(tower, &mut ctx.rng, depth, q, ctx.m, ctx.window);
        let fv = (ctx.ops.f)(tower, &(ctx.ops.v)(tower, &x)?)?;
        if fv != forms::mul_p(tower, &x) {
            let bad = shrink_form(tower, &x, &|y| {
                (ctx.ops.f)(tower, &(ctx.ops.v)(tower, y).unwrap())
                    .map(|fv| fv != forms::mul_p(tower, y))
                    .unwrap_or(true)
            });
            return Ok(Some(ce(ctx, "F V != p", vec![forms::pretty(tower, &bad)])));
        }
    }
    Ok(None)
}

fn law_drw_fdv_d(ctx: &mut Ctx) -> Result<Option<Counterexample>> {
    let depth = ctx.tower.depth();
    let tower = ctx.tower;
    for _ in 0..ctx.samples {
        let q = ctx.rand_q();
        let x = sample_form(tower, &mut ctx.rng, depth, q, ctx.m, ctx.window);
        let fdv = (ctx.ops.f)(tower, &(ctx.ops.d)(tower, &(ctx.ops.v)(tower, &x)?)?)?;
        let dx = (ctx.ops.d)(tower, &x)?;
        if fdv != dx {
            let bad = shrink_form(tower, &x, &|y| {
                (|| -> Result<bool> {
                    let l = (ctx.ops.f)(tower, &(ctx.ops.d)(tower, &(ctx.ops.v)(tower, y)?)?)?;
                    Ok(l != (ctx.ops.d)(tower, y)?)
                })()
                .unwrap_or(true)
            });
            return Ok(Some(ce(ctx, "F d V != d", vec![forms::pretty(tower, &bad)])));
        }
    }
    Ok(None)
}

fn law_drw_vd_pdv(ctx: &mut Ctx) -> Result<Option<Counterexample>> {
    let depth = ctx.tower.depth();
    let tower = ctx.tower;
    for _ in 0..ctx.samples {
        let q = ctx.rand_q();
        let x = sample_form(tower, &mut ctx.rng, depth, q, ctx.m, ctx.window);
        let vd = (ctx.ops.v)(tower, &(ctx.ops.d)(tower, &x)?)?;
        let pdv = forms::mul_p(tower, &(ctx.ops.d)(tower, &(ctx.ops.v)(tower, &x)?)?);
        if vd != pdv {
            return Ok(Some(ce(ctx, "V d != p d V", vec![forms::pretty(tower, &x)])));
        }
    }
    Ok(None)
}

fn law_drw_xvy(ctx: &mut Ctx) -> Result<Option<Counterexample>> {
    let depth = ctx.tower.depth();
    let tower = ctx.tower;
    for _ in 0..ctx.samples {
        let qx = ctx.rand_q();
        let qy = ctx.rng.gen_range(0..=depth.saturating_sub(qx));
        let x = sample_form(tower, &mut ctx.rng, depth, qx, ctx.m + 1, ctx.window);
        let y = sample_form(tower, &mut ctx.rng, depth, qy, ctx.m, ctx.window);
        let lhs = (ctx.ops.mul)(tower, &x, &(ctx.ops.v)(tower, &y)?)?;
        let rhs = (ctx.ops.v)(tower, &(ctx.ops.mul)(tower, &(ctx.ops.f)(tower, &x)?, &y)?)?;
        if lhs != rhs {
            return Ok(Some(ce(
                ctx,
                "x V(y) != V(F(x) y)",
                vec![forms::pretty(tower, &x), forms::pretty(tower, &y)],
            )));
        }
    }
    Ok(None)
}

fn law_drw_r_commutes(ctx: &mut Ctx) -> Result<Option<Counterexample>> {
    let depth = ctx.tower.depth();
    let tower = ctx.tower;
    if ctx.m < 2 {
        return Ok(None);
    }
    for _ in 0..ctx.samples {
        let q = ctx.rand_q();
        let x = sample_form(tower, &mut ctx.rng, depth, q, ctx.m, ctx.window);
        let r = ctx.ops.r;
        let ok = r(tower, &(ctx.ops.d)(tower, &x)?)? == (ctx.ops.d)(tower, &r(tower, &x)?)?
            && r(tower, &(ctx.ops.v)(tower, &x)?)? == (ctx.ops.v)(tower, &r(tower, &x)?)?
            && (ctx.m < 3
                || r(tower, &(ctx.ops.f)(tower, &x)?)?
                    == (ctx.ops.f)(tower, &r(tower, &x)?)?);
        if !ok {
            return Ok(Some(ce(ctx, "R does not commute with d/F/V", vec![forms::pretty(tower, &x)])));
        }
    }
    Ok(None)
}

fn law_drw_fd_teich(ctx: &mut Ctx) -> Result<Option<Counterexample>> {
    let depth = ctx.tower.depth();
    let tower = ctx.tower;
    for _ in 0..ctx.samples {
        let x = sample_tower_elem(tower, &mut ctx.rng, depth, ctx.window, 2);
        if x.is_zero() {
            continue;
        }
        let tm1 = forms::teich_form(tower, &x, ctx.m + 1)?;
        let lhs = (ctx.ops.f)(tower, &(ctx.ops.d)(tower, &tm1)?)?;
        let pow = forms::teich_form(tower, &tower.pow(&x, tower.p() as u32 - 1)?, ctx.m)?;
        let rhs = (ctx.ops.mul)(
            tower,
            &pow,
            &(ctx.ops.d)(tower, &forms::teich_form(tower, &x, ctx.m)?)?,
        )?;
        if lhs != rhs {
            return Ok(Some(ce(ctx, "F(d[x]) != [x]^{p-1} d[x]", vec![tower.pretty(&x)])));
        }
    }
    Ok(None)
}

fn law_dlog_additive(ctx: &mut Ctx) -> Result<Option<Counterexample>> {
    let _depth = ctx.tower.depth();
    let tower = ctx.tower;
    for _ in 0..ctx.samples {
        // random monomial units
        let mk = |rng: &mut ChaCha8Rng| {
            let mut u = tower.one(tower.depth());
            for lvl in 1..=tower.depth() {
                let e = rng.gen_range(-3..=3i64);
                u = tower.mul(&u, &tower.embed(tower.var(lvl, e), tower.depth())).unwrap();
            }
            u
        };
        let u = mk(&mut ctx.rng);
        let v = mk(&mut ctx.rng);
        let lhs = forms::dlog_monomial(tower, &tower.mul(&u, &v)?, ctx.m)?;
        let rhs = forms::add(
            tower,
            &forms::dlog_monomial(tower, &u, ctx.m)?,
            &forms::dlog_monomial(tower, &v, ctx.m)?,
        )?;
        if lhs != rhs {
            return Ok(Some(ce(
                ctx,
                "dlog(uv) != dlog(u) + dlog(v)",
                vec![tower.pretty(&u), tower.pretty(&v)],
            )));
        }
        // dlog(u) = [u^{-1}] d[u] for monomial units, through the op table
        let du = (ctx.ops.d)(tower, &forms::teich_form(tower, &u, ctx.m)?)?;
        let route = (ctx.ops.mul)(
            tower,
            &forms::teich_form(tower, &tower.inv_unit(&u)?, ctx.m)?,
            &du,
        )?;
        if route != forms::dlog_monomial(tower, &u, ctx.m)? {
            return Ok(Some(ce(ctx, "dlog(u) != [u^-1] d[u]", vec![tower.pretty(&u)])));
        }
    }
    Ok(None)
}

fn law_dd_zero(ctx: &mut Ctx) -> Result<Option<Counterexample>> {
    let depth = ctx.tower.depth();
    let tower = ctx.tower;
    for _ in 0..ctx.samples {
        let q = ctx.rand_q();
        let x = sample_form(tower, &mut ctx.rng, depth, q, ctx.m, ctx.window);
        let dd = (ctx.ops.d)(tower, &forms::apply_d(tower, &x)?)?;
        if !dd.is_zero() {
            return Ok(Some(ce(ctx, "d d != 0", vec![forms::pretty(tower, &x)])));
        }
    }
    Ok(None)
}

fn law_leibniz(ctx: &mut Ctx) -> Result<Option<Counterexample>> {
    let depth = ctx.tower.depth();
    let tower = ctx.tower;
    for _ in 0..ctx.samples {
        let qx = ctx.rand_q();
        let qy = ctx.rng.gen_range(0..=depth.saturating_sub(qx));
        let x = sample_form(tower, &mut ctx.rng, depth, qx, ctx.m, ctx.window);
        let y = sample_form(tower, &mut ctx.rng, depth, qy, ctx.m, ctx.window);
        let lhs = (ctx.ops.d)(tower, &(ctx.ops.mul)(tower, &x, &y)?)?;
        let sgn = if qx.is_multiple_of(2) { 1 } else { -1 };
        let rhs = forms::add(
            tower,
            &(ctx.ops.mul)(tower, &(ctx.ops.d)(tower, &x)?, &y)?,
            &forms::scalar_int(tower, sgn, &(ctx.ops.mul)(tower, &x, &(ctx.ops.d)(tower, &y)?)?),
        )?;
        if lhs != rhs {
            return Ok(Some(ce(
                ctx,
                "Leibniz rule failed",
                vec![forms::pretty(tower, &x), forms::pretty(tower, &y)],
            )));
        }
    }
    Ok(None)
}

fn law_graded_comm(ctx: &mut Ctx) -> Result<Option<Counterexample>> {
    let depth = ctx.tower.depth();
    let tower = ctx.tower;
    for _ in 0..ctx.samples {
        let qx = ctx.rand_q();
        let qy = ctx.rng.gen_range(0..=depth.saturating_sub(qx));
        let x = sample_form(tower, &mut ctx.rng, depth, qx, ctx.m, ctx.window);
        let y = sample_form(tower, &mut ctx.rng, depth, qy, ctx.m, ctx.window);
        let xy = (ctx.ops.mul)(tower, &x, &y)?;
        let sgn = if (qx as u32 * qy as u32).is_multiple_of(2) { 1 } else { -1 };
        let yx = forms::scalar_int(tower, sgn, &(ctx.ops.mul)(tower, &y, &x)?);
        if xy != yx {
            return Ok(Some(ce(
                ctx,
                "graded commutativity failed",
                vec![forms::pretty(tower, &x), forms::pretty(tower, &y)],
            )));
        }
        if qx % 2 == 1 {
            let sq = (ctx.ops.mul)(tower, &x, &x)?;
            if !sq.is_zero() {
                return Ok(Some(ce(ctx, "odd form with nonzero square", vec![forms::pretty(tower, &x)])));
            }
        }
    }
    Ok(None)
}

fn law_from_witt_hom(ctx: &mut Ctx) -> Result<Option<Counterexample>> {
    let _depth = ctx.tower.depth();
    let tower = ctx.tower;
    for _ in 0..ctx.samples {
        let x = sample_witt(tower, &mut ctx.rng, ctx.m, ctx.window);
        let y = sample_witt(tower, &mut ctx.rng, ctx.m, ctx.window);
        let fx = forms::from_witt(tower, &x)?;
        let fy = forms::from_witt(tower, &y)?;
        let add_ok =
            forms::from_witt(tower, &(ctx.ops.witt_add)(tower, &x, &y)?)? == forms::add(tower, &fx, &fy)?;
        let mul_ok =
            forms::from_witt(tower, &(ctx.ops.witt_mul)(tower, &x, &y)?)? == (ctx.ops.mul)(tower, &fx, &fy)?;
        let roundtrip = forms::to_witt(tower, &fx)? == x;
        if !(add_ok && mul_ok && roundtrip) {
            return Ok(Some(ce(
                ctx,
                "from_witt/to_witt do not intertwine coordinate arithmetic",
                vec![pretty_w(tower, &x), pretty_w(tower, &y)],
            )));
        }
    }
    Ok(None)
}

fn law_generator_spanning(ctx: &mut Ctx) -> Result<Option<Counterexample>> {
    let depth = ctx.tower.depth();
    let tower = ctx.tower;
    if ctx.m > 2 {
        return Ok(None);
    }
    for _ in 0..ctx.samples {
        let q = ctx.rand_q();
        let x = sample_form(tower, &mut ctx.rng, depth, q, ctx.m, ctx.window.min(6));
        let (gens, eta) = fil::spanning_generators(tower, &x)?;
        let mut acc = forms::zero_form(tower, depth, q, ctx.m);
        for g in &gens {
            let f = g.to_form(tower, ctx.m)?;
            acc = forms::add(tower, &acc, &f)?;
        }
        if !eta.is_zero() {
            acc = forms::add(tower, &acc, &(ctx.ops.d)(tower, &eta)?)?;
        }
        if acc != x {
            return Ok(Some(ce(
                ctx,
                "spanning generators do not reconstruct the form",
                vec![forms::pretty(tower, &x)],
            )));
        }
        // generation respects the filtration window
        if let Some(n) = fil::fil_level(&x) {
            let bound = n.max(0);
            for g in &gens {
                let f = g.to_form(tower, ctx.m)?;
                if fil::fil_level(&f).is_some_and(|l| l > bound) {
                    return Ok(Some(ce(
                        ctx,
                        format!("generator escapes fil_{bound}"),
                        vec![forms::pretty(tower, &f)],
                    )));
                }
            }
        }
    }
    // pinned instance with a nonzero exact part: dV([t^-1]) at m = 2
    if ctx.m == 2 {
        let base = forms::teich_form(tower, &tower.var(depth, -1), 1)?;
        let x = forms::apply_d(tower, &forms::apply_v(tower, &base)?)?;
        let (gens, eta) = fil::spanning_generators(tower, &x)?;
        let mut acc = forms::zero_form(tower, depth, 1, 2);
        for g in &gens {
            acc = forms::add(tower, &acc, &g.to_form(tower, 2)?)?;
        }
        if !eta.is_zero() {
            acc = forms::add(tower, &acc, &(ctx.ops.d)(tower, &eta)?)?;
        }
        if acc != x {
            return Ok(Some(ce(ctx, "pinned spanning instance failed", vec![])));
        }
    }
    Ok(None)
}

fn law_laurent_ring_axioms(ctx: &mut Ctx) -> Result<Option<Counterexample>> {
    let depth = ctx.tower.depth();
    let tower = ctx.tower;
    for _ in 0..ctx.samples {
        let x = sample_tower_elem(tower, &mut ctx.rng, depth, ctx.window, 3);
        let y = sample_tower_elem(tower, &mut ctx.rng, depth, ctx.window, 3);
        let z = sample_tower_elem(tower, &mut ctx.rng, depth, ctx.window, 3);
        let assoc = tower.mul(&tower.mul(&x, &y)?, &z)? == tower.mul(&x, &tower.mul(&y, &z)?)?;
        let comm = tower.mul(&x, &y)? == tower.mul(&y, &x)?
            && tower.add(&x, &y)? == tower.add(&y, &x)?;
        let distrib = tower.mul(&x, &tower.add(&y, &z)?)?
            == tower.add(&tower.mul(&x, &y)?, &tower.mul(&x, &z)?)?;
        if !(assoc && comm && distrib) {
            return Ok(Some(ce(
                ctx,
                "Laurent ring axiom failed",
                vec![tower.pretty(&x), tower.pretty(&y), tower.pretty(&z)],
            )));
        }
    }
    // V(a) V(b) = p V(a b) routed through the Witt table
    let a = witt::teichmuller(tower, &tower.var(depth, -1), ctx.m);
    let b = witt::teichmuller(tower, &tower.var(depth, 2), ctx.m);
    let lhs = (ctx.ops.witt_mul)(tower, &witt::v_shift(tower, &a), &witt::v_shift(tower, &b))?;
    let ab = witt::teichmuller(tower, &tower.var(depth, 1), ctx.m);
    let rhs = witt::mul_p(tower, &witt::v_shift(tower, &ab));
    if lhs != rhs {
        return Ok(Some(ce(ctx, "V(a)V(b) != p V(ab)", vec![])));
    }
    Ok(None)
}

// --- m = 1 oracle laws ------------------------------------------------------

fn law_m1_oracle(ctx: &mut Ctx) -> Result<Option<Counterexample>> {
    let depth = ctx.tower.depth();
    let tower = ctx.tower;
    for _ in 0..ctx.samples {
        let qx = ctx.rand_q();
        let qy = ctx.rng.gen_range(0..=depth.saturating_sub(qx));
        let x = sample_form(tower, &mut ctx.rng, depth, qx, 1, ctx.window);
        let y = sample_form(tower, &mut ctx.rng, depth, qy, 1, ctx.window);
        let tx = derham::from_drw(tower, &x)?;
        let ty = derham::from_drw(tower, &y)?;
        // mul agrees with wedge
        let lhs = derham::from_drw(tower, &(ctx.ops.mul)(tower, &x, &y)?)?;
        let rhs = derham::wedge(tower, &tx, &ty)?;
        if lhs != rhs {
            return Ok(Some(ce(
                ctx,
                "m=1 product disagrees with the classical wedge",
                vec![forms::pretty(tower, &x), forms::pretty(tower, &y)],
            )));
        }
        // d agrees
        let ld = derham::from_drw(tower, &(ctx.ops.d)(tower, &x)?)?;
        let rd = derham::d(tower, &tx)?;
        if ld != rd {
            return Ok(Some(ce(
                ctx,
                "m=1 differential disagrees with the classical one",
                vec![forms::pretty(tower, &x)],
            )));
        }
        // add agrees (translation is additive)
        if qx == qy {
            let la = derham::from_drw(tower, &forms::add(tower, &x, &y)?)?;
            let ra = derham::add(tower, &tx, &ty)?;
            if la != ra {
                return Ok(Some(ce(
                    ctx,
                    "m=1 sum disagrees with the classical one",
                    vec![forms::pretty(tower, &x), forms::pretty(tower, &y)],
                )));
            }
        }
    }
    Ok(None)
}

// --- filtration laws ---------------------------------------------------------

fn law_fil_axioms(ctx: &mut Ctx) -> Result<Option<Counterexample>> {
    let depth = ctx.tower.depth();
    let tower = ctx.tower;
    let lvl = ctx.ops.fil_level;
    for _ in 0..ctx.samples {
        let qx = ctx.rand_q();
        let qy = ctx.rng.gen_range(0..=depth.saturating_sub(qx));
        let x = sample_form(tower, &mut ctx.rng, depth, qx, ctx.m, ctx.window);
        let y = sample_form(tower, &mut ctx.rng, depth, qy, ctx.m, ctx.window);
        let (lx, ly) = (lvl(&x), lvl(&y));
        // product
        let xy = forms::mul(tower, &x, &y)?;
        if let (Some(a), Some(b), Some(c)) = (lx, ly, lvl(&xy)) {
            if c > a + b {
                return Ok(Some(ce(
                    ctx,
                    "fil(xy) > fil(x) + fil(y)",
                    vec![forms::pretty(tower, &x), forms::pretty(tower, &y)],
                )));
            }
        }
        // d, F, V do not raise the level; R divides by p
        let checks: Vec<(String, Option<i64>, Option<i64>)> = vec![
            ("d".into(), lvl(&forms::apply_d(tower, &x)?), lx),
            ("V".into(), lvl(&forms::apply_v(tower, &x)?), lx),
        ];
        for (name, l2, l1) in checks {
            if let (Some(a), Some(b)) = (l2, l1) {
                if a > b {
                    return Ok(Some(ce(ctx, format!("fil({name} x) > fil(x)"), vec![forms::pretty(tower, &x)])));
                }
            }
        }
        if ctx.m >= 2 {
            if let (Some(a), Some(b)) = (lvl(&forms::apply_f(tower, &x)?), lx) {
                if a > b {
                    return Ok(Some(ce(ctx, "fil(F x) > fil(x)", vec![forms::pretty(tower, &x)])));
                }
            }
            if let (Some(a), Some(b)) = (lvl(&forms::apply_r(tower, &x)?), lx) {
                if a > b.div_euclid(tower.p() as i64) {
                    return Ok(Some(ce(ctx, "fil(R x) > floor(fil(x)/p)", vec![forms::pretty(tower, &x)])));
                }
            }
        }
    }
    Ok(None)
}

fn law_fil_shift(ctx: &mut Ctx) -> Result<Option<Counterexample>> {
    let depth = ctx.tower.depth();
    let tower = ctx.tower;
    let lvl = ctx.ops.fil_level;
    for _ in 0..ctx.samples {
        let q = ctx.rand_q();
        let x = sample_form(tower, &mut ctx.rng, depth, q, ctx.m, ctx.window);
        if x.is_zero() {
            continue;
        }
        let l = ctx.rng.gen_range(-2..=2i64);
        let shifted = fil::shift_by_monomial(tower, &x, l)?;
        let delta = (tower.p() as i64).pow((ctx.m - 1) as u32) * l;
        if lvl(&shifted) != lvl(&x).map(|n| n - delta) {
            return Ok(Some(ce(
                ctx,
                "shift by [t^l] does not move the level by p^{m-1} l",
                vec![forms::pretty(tower, &x), l.to_string()],
            )));
        }
        if fil::shift_by_monomial(tower, &shifted, -l)? != x {
            return Ok(Some(ce(ctx, "monomial shift is not invertible", vec![forms::pretty(tower, &x)])));
        }
        let route = (ctx.ops.mul)(
            tower,
            &forms::teich_form(tower, &tower.var(x.level, l), ctx.m)?,
            &x,
        )?;
        if route != shifted {
            return Ok(Some(ce(ctx, "shift differs from multiplication by [t^l]", vec![forms::pretty(tower, &x)])));
        }
    }
    Ok(None)
}

fn law_brylinski_crosscheck(ctx: &mut Ctx) -> Result<Option<Counterexample>> {
    let _depth = ctx.tower.depth();
    let tower = ctx.tower;
    let lvl = ctx.ops.fil_level;
    for _ in 0..ctx.samples {
        let a = sample_witt(tower, &mut ctx.rng, ctx.m, ctx.window);
        let coord_level = witt::brylinski_level(tower, &a);
        let form_level = lvl(&forms::from_witt(tower, &a)?);
        if coord_level != form_level {
            return Ok(Some(ce(
                ctx,
                format!(
                    "valuation criterion gives {coord_level:?}, support criterion gives {form_level:?}"
                ),
                vec![pretty_w(tower, &a)],
            )));
        }
        // membership agreement on a few thresholds
        for n in -3..=6i64 {
            let member = fil::fil_member_witt(tower, &a, &[n])?;
            let form_member = form_level.is_none_or(|l| l <= n);
            if member != form_member {
                return Ok(Some(ce(ctx, format!("fil membership mismatch at n = {n}"), vec![pretty_w(tower, &a)])));
            }
        }
    }
    Ok(None)
}

fn law_goodness(ctx: &mut Ctx) -> Result<Option<Counterexample>> {
    let depth = ctx.tower.depth();
    let tower = ctx.tower;
    if ctx.m < 2 {
        return Ok(None);
    }
    for _ in 0..ctx.samples {
        let q = ctx.rand_q();
        let n = ctx.rng.gen_range(0..=12i64);
        // R surjects onto fil_{floor(n/p)} with the explicit section
        let target = sample_form_bounded(
            tower,
            &mut ctx.rng,
            depth,
            q,
            ctx.m - 1,
            ctx.window,
            Some(n.div_euclid(tower.p() as i64)),
        );
        let lift = fil::r_section(tower, &target)?;
        if forms::apply_r(tower, &lift)? != target || !fil::in_fil(&lift, n) {
            return Ok(Some(ce(ctx, "R section failed", vec![forms::pretty(tower, &target)])));
        }
        // kernel elements decompose with parts in the same fil
        let a1 = sample_form_bounded(tower, &mut ctx.rng, depth, q, 1, ctx.window, Some(n));
        let mut x = a1.clone();
        for _ in 0..ctx.m - 1 {
            x = (ctx.ops.v)(tower, &x)?;
        }
        if q >= 1 {
            let b1 =
                sample_form_bounded(tower, &mut ctx.rng, depth, q - 1, 1, ctx.window, Some(n));
            let mut vb = b1.clone();
            for _ in 0..ctx.m - 1 {
                vb = (ctx.ops.v)(tower, &vb)?;
            }
            x = forms::add(tower, &x, &forms::apply_d(tower, &vb)?)?;
        }
        if !forms::apply_r(tower, &x)?.is_zero() {
            return Ok(Some(ce(ctx, "V^{m-1}/dV^{m-1} image escaped Ker R", vec![forms::pretty(tower, &x)])));
        }
        let (a, b) = fil::goodness_decompose(tower, &x)?;
        let bound_ok = fil::in_fil(&a, n) && fil::in_fil(&b, n) && fil::in_fil(&x, n);
        if !bound_ok {
            return Ok(Some(ce(
                ctx,
                format!("kernel decomposition escapes fil_{n}"),
                vec![forms::pretty(tower, &x), forms::pretty(tower, &a), forms::pretty(tower, &b)],
            )));
        }
    }
    Ok(None)
}

fn law_pbar_fil(ctx: &mut Ctx) -> Result<Option<Counterexample>> {
    let depth = ctx.tower.depth();
    let tower = ctx.tower;
    let p = tower.p() as i64;
    for _ in 0..ctx.samples {
        let q = ctx.rand_q();
        let n = ctx.rng.gen_range(0..=12i64);
        let w = sample_form_bounded(
            tower,
            &mut ctx.rng,
            depth,
            q,
            ctx.m,
            ctx.window,
            Some(n.div_euclid(p)),
        );
        // pbar(w) in fil_n iff w in fil_{floor(n/p)}
        let pw = fil::pbar(tower, &w)?;
        if !fil::in_fil(&pw, n) {
            return Ok(Some(ce(ctx, "pbar escapes fil_n", vec![forms::pretty(tower, &w)])));
        }
        // and conversely on the nose for levels
        if let (Some(lw), Some(lpw)) = ((ctx.ops.fil_level)(&w), (ctx.ops.fil_level)(&pw)) {
            if lpw.div_euclid(p) > lw {
                return Ok(Some(ce(ctx, "pbar level inconsistent", vec![forms::pretty(tower, &w)])));
            }
        }
        // p = pbar . R, through the op table
        if ctx.m >= 2 {
            let y = sample_form(tower, &mut ctx.rng, depth, q, ctx.m, 4);
            let ry = (ctx.ops.r)(tower, &y)?;
            if fil::pbar(tower, &ry)? != forms::mul_p(tower, &y) {
                return Ok(Some(ce(ctx, "pbar . R != p", vec![forms::pretty(tower, &y)])));
            }
        }
    }
    Ok(None)
}

fn law_top_degree_integral(ctx: &mut Ctx) -> Result<Option<Counterexample>> {
    let depth = ctx.tower.depth();
    // integral top-degree forms lie in fil_{-1}: indices >= 1
    let tower = ctx.tower;
    let d = tower.depth();
    for _ in 0..ctx.samples {
        // build omega = [x0] d[x1] .. d[xd] from integral xi
        let mut x = forms::teich_form(
            tower,
            &sample_integral(tower, &mut ctx.rng, ctx.window),
            ctx.m,
        )?;
        for _ in 0..d {
            let y = forms::teich_form(
                tower,
                &sample_integral(tower, &mut ctx.rng, ctx.window),
                ctx.m,
            )?;
            x = (ctx.ops.mul)(tower, &x, &(ctx.ops.d)(tower, &y)?)?;
        }
        if x.is_zero() {
            continue;
        }
        if let Some(l) = (ctx.ops.fil_level)(&x) {
            if l > -1 {
                return Ok(Some(ce(
                    ctx,
                    "integral top-degree form escapes fil_{-1}",
                    vec![forms::pretty(tower, &x)],
                )));
            }
        }
    }
    // pinned instance: d[t_1] ^ .. ^ d[t_d] has level exactly -d p^{m-1}
    let mut omega = forms::one_form(tower, depth, ctx.m);
    for lvl in (1..=d).rev() {
        let t = forms::teich_form(tower, &tower.embed(tower.var(lvl, 1), depth), ctx.m)?;
        omega = (ctx.ops.mul)(tower, &omega, &forms::apply_d(tower, &t)?)?;
    }
    // only the outermost factor moves the outermost index
    let expect = -(tower.p() as i64).pow((ctx.m - 1) as u32);
    if (ctx.ops.fil_level)(&omega) != Some(expect) {
        return Ok(Some(ce(
            ctx,
            format!("level of d[t_1]^..^d[t_d] is not {expect}"),
            vec![forms::pretty(tower, &omega)],
        )));
    }
    Ok(None)
}

fn sample_integral(tower: &Tower, rng: &mut ChaCha8Rng, window: i64) -> TowerElem {
    // supports only non-negative exponents at every level
    let mut x = tower.zero(tower.depth());
    for _ in 0..rng.gen_range(1..3u32) {
        let mut mono = TowerElem::Scalar(tower.fq.one());
        for lvl in 1..=tower.depth() {
            let e = rng.gen_range(0..=window.min(4));
            mono = tower.monomial(mono, lvl, e, lvl);
        }
        x = tower.add(&x, &mono).unwrap();
    }
    x
}

// --- cartier laws ------------------------------------------------------------

fn law_cf_equals_r(ctx: &mut Ctx) -> Result<Option<Counterexample>> {
    let depth = ctx.tower.depth();
    let tower = ctx.tower;
    for _ in 0..ctx.samples {
        let q = ctx.rand_q();
        let alpha = sample_form(tower, &mut ctx.rng, depth, q, ctx.m + 1, ctx.window);
        let falpha = forms::apply_f(tower, &alpha)?;
        if !cartier::is_z1(tower, &falpha, None)? {
            return Ok(Some(ce(ctx, "F image not detected in Z_1", vec![forms::pretty(tower, &alpha)])));
        }
        let c = (ctx.ops.cartier)(tower, &falpha)?;
        let r = forms::apply_r(tower, &alpha)?;
        if c != r {
            return Ok(Some(ce(ctx, "C F != R", vec![forms::pretty(tower, &alpha)])));
        }
    }
    Ok(None)
}

fn law_c_kills_dv(ctx: &mut Ctx) -> Result<Option<Counterexample>> {
    let depth = ctx.tower.depth();
    let tower = ctx.tower;
    if ctx.m < 2 {
        return Ok(None);
    }
    for _ in 0..ctx.samples {
        let q = ctx.rng.gen_range(1..=depth);
        let b = sample_form(tower, &mut ctx.rng, depth, q - 1, 1, ctx.window);
        let mut x = b;
        for _ in 0..ctx.m - 1 {
            x = forms::apply_v(tower, &x)?;
        }
        let dv = forms::apply_d(tower, &x)?;
        if !cartier::is_z1(tower, &dv, None)? {
            return Ok(Some(ce(ctx, "dV^{m-1} not in Z_1", vec![forms::pretty(tower, &dv)])));
        }
        if !(ctx.ops.cartier)(tower, &dv)?.is_zero() {
            return Ok(Some(ce(ctx, "C(dV^{m-1}(b)) != 0", vec![forms::pretty(tower, &dv)])));
        }
    }
    Ok(None)
}

fn law_c_sections(ctx: &mut Ctx) -> Result<Option<Counterexample>> {
    let depth = ctx.tower.depth();
    let tower = ctx.tower;
    for _ in 0..ctx.samples {
        let q = ctx.rand_q();
        let z = sample_z1(tower, &mut ctx.rng, depth, q, ctx.m, ctx.window);
        let c1 = cartier::cartier_c_with(tower, &z, CartierSection::ZeroPad)?;
        let c2 = cartier::cartier_c_with(tower, &z, CartierSection::FrobeniusInverseLift)?;
        // route the comparison through the op table
        let c = (ctx.ops.cartier)(tower, &z)?;
        if c1 != c2 || c != c1 {
            return Ok(Some(ce(ctx, "Cartier value depends on the section", vec![forms::pretty(tower, &z)])));
        }
    }
    Ok(None)
}

fn law_c_additive_linear(ctx: &mut Ctx) -> Result<Option<Counterexample>> {
    let depth = ctx.tower.depth();
    let tower = ctx.tower;
    let cop = ctx.ops.cartier;
    for _ in 0..ctx.samples {
        let q = ctx.rand_q();
        let x = sample_z1(tower, &mut ctx.rng, depth, q, ctx.m, ctx.window);
        let y = sample_z1(tower, &mut ctx.rng, depth, q, ctx.m, ctx.window);
        let sum_ok = cop(tower, &forms::add(tower, &x, &y)?)?
            == forms::add(tower, &cop(tower, &x)?, &cop(tower, &y)?)?;
        if !sum_ok {
            return Ok(Some(ce(
                ctx,
                "C not additive",
                vec![forms::pretty(tower, &x), forms::pretty(tower, &y)],
            )));
        }
        // W_{m+1}-linearity at element level: C(x . F(w)) = C(x) . R(w)
        let qw = ctx.rng.gen_range(0..=depth.saturating_sub(q));
        let w = sample_form(tower, &mut ctx.rng, depth, qw, ctx.m + 1, ctx.window);
        let xfw = forms::mul(tower, &x, &forms::apply_f(tower, &w)?)?;
        if !cartier::is_z1(tower, &xfw, None)? {
            return Ok(Some(ce(ctx, "x F(w) escaped Z_1", vec![forms::pretty(tower, &x)])));
        }
        let lhs = cop(tower, &xfw)?;
        let rhs = forms::mul(tower, &cop(tower, &x)?, &forms::apply_r(tower, &w)?)?;
        if lhs != rhs {
            return Ok(Some(ce(
                ctx,
                "C(x F(w)) != C(x) R(w)",
                vec![forms::pretty(tower, &x), forms::pretty(tower, &w)],
            )));
        }
    }
    Ok(None)
}

fn law_cartier_fil_equiv(ctx: &mut Ctx) -> Result<Option<Counterexample>> {
    let depth = ctx.tower.depth();
    // omega in Z_1: omega in fil_n  <=>  (1-C)(omega) in fil_n
    let tower = ctx.tower;
    let cop = ctx.ops.cartier;
    for _ in 0..ctx.samples {
        let q = ctx.rand_q();
        let z = sample_z1(tower, &mut ctx.rng, depth, q, ctx.m, ctx.window);
        if z.is_zero() {
            continue;
        }
        let omc = forms::sub(tower, &z, &cop(tower, &z)?)?;
        let lz = fil::fil_level(&z);
        let lomc = fil::fil_level(&omc);
        // the equivalence is stated for n >= 0; C lands in fil_{floor(n/p)},
        // which for negative n is the larger group
        if let (Some(a), Some(b)) = (lz, lomc) {
            let cap = if a >= 0 { a } else { a.div_euclid(tower.p() as i64) };
            if b > cap {
                return Ok(Some(ce(ctx, "(1-C) raised the level", vec![forms::pretty(tower, &z)])));
            }
            // both directions at once: levels >= 1 agree exactly
            if a >= 1 && b != a {
                return Ok(Some(ce(
                    ctx,
                    format!("level {a} form with (1-C) level {b}"),
                    vec![forms::pretty(tower, &z)],
                )));
            }
        }
        if lomc.is_none() || lomc.is_some_and(|b| b <= 0) {
            // (1-C)(omega) in fil_0 must force omega in fil_0
            if let Some(a) = lz {
                if a >= 1 {
                    return Ok(Some(ce(ctx, "backward direction failed", vec![forms::pretty(tower, &z)])));
                }
            }
        }
    }
    Ok(None)
}

fn law_vr3_witness(ctx: &mut Ctx) -> Result<Option<Counterexample>> {
    let depth = ctx.tower.depth();
    // d(omega) = (1-C)(F d x), x = (V + V^2 R + .. + V^m R^{m-1})(omega)
    let tower = ctx.tower;
    for _ in 0..ctx.samples {
        let q = ctx.rand_q();
        let omega = sample_form(tower, &mut ctx.rng, depth, q, ctx.m, ctx.window);
        let n = fil::fil_level(&omega).unwrap_or(0).max(0);
        let mut x = forms::zero_form(tower, tower.depth(), q, ctx.m + 1);
        let mut rk = omega.clone();
        for k in 0..ctx.m {
            let mut vk = rk.clone();
            for _ in 0..=k {
                vk = forms::apply_v(tower, &vk)?;
            }
            x = forms::add(tower, &x, &vk)?;
            if rk.m >= 2 {
                rk = forms::apply_r(tower, &rk)?;
            } else {
                break;
            }
        }
        let fdx = forms::apply_f(tower, &forms::apply_d(tower, &x)?)?;
        if !cartier::is_z1(tower, &fdx, Some(n))? && !fdx.is_zero() {
            return Ok(Some(ce(ctx, "F d x not in Z_1 fil_n", vec![forms::pretty(tower, &omega)])));
        }
        let lhs = (ctx.ops.d)(tower, &omega)?;
        let rhs = forms::sub(tower, &fdx, &(ctx.ops.cartier)(tower, &fdx)?)?;
        if lhs != rhs {
            return Ok(Some(ce(
                ctx,
                "d(omega) != (1-C)(F d x)",
                vec![forms::pretty(tower, &omega)],
            )));
        }
    }
    Ok(None)
}

fn law_zb_grading(ctx: &mut Ctx) -> Result<Option<Counterexample>> {
    let depth = ctx.tower.depth();
    let tower = ctx.tower;
    for _ in 0..ctx.samples / 4 + 1 {
        let q = ctx.rand_q();
        // Z_i sample: F^i of a length-(i+1) form
        for i in 1..=2u8 {
            let mut z = sample_form(tower, &mut ctx.rng, depth, q, 1 + i, ctx.window);
            for _ in 0..i {
                z = forms::apply_f(tower, &z)?;
            }
            let (zi, _) = cartier::zb_membership(tower, &z, i)?;
            if !zi {
                return Ok(Some(ce(ctx, format!("F^{i} image not in Z_{i}"), vec![forms::pretty(tower, &z)])));
            }
            // monotone: Z_i subset Z_{i-1}
            if i >= 2 {
                let (zprev, _) = cartier::zb_membership(tower, &z, i - 1)?;
                if !zprev {
                    return Ok(Some(ce(ctx, "Z_i not inside Z_{i-1}", vec![forms::pretty(tower, &z)])));
                }
            }
            // grading: z in B_i <=> C(z) in B_{i-1}, and C surjects back
            if i >= 2 && !z.is_zero() {
                let c = (ctx.ops.cartier)(tower, &z)?;
                let (zc, bc) = cartier::zb_membership(tower, &c, i - 1)?;
                let (_, bz) = cartier::zb_membership(tower, &z, i)?;
                if !zc || bz != bc {
                    return Ok(Some(ce(ctx, "C does not grade Z_i/B_i", vec![forms::pretty(tower, &z)])));
                }
            }
        }
        // B_1 samples are exact forms
        if q < depth {
            let y = sample_form(tower, &mut ctx.rng, depth, q, 1, ctx.window);
            let dy = forms::apply_d(tower, &y)?;
            let (_, b1) = cartier::zb_membership(tower, &dy, 1)?;
            if !b1 {
                return Ok(Some(ce(ctx, "exact form not detected in B_1", vec![forms::pretty(tower, &y)])));
            }
        }
    }
    Ok(None)
}

// --- conductor laws ----------------------------------------------------------

fn law_conductor_table(ctx: &mut Ctx) -> Result<Option<Counterexample>> {
    let depth = ctx.tower.depth();
    // depth-1 exact values: sw(t^{-n}) = n for p coprime n <= 12, and
    // sw(t^{-pn}) = sw(t^{-n})
    let tower = ctx.tower;
    if depth != 1 {
        return Ok(None);
    }
    let p = tower.p() as i64;
    for n in 1..=12i64 {
        let chi = forms::teich_form(tower, &tower.var(1, -n), ctx.m)?;
        let rep = conductor::swan(tower, &chi)?;
        if n % p != 0 {
            let expect = n * p.pow((ctx.m - 1) as u32);
            if rep.sw != expect {
                return Ok(Some(ce(ctx, format!("sw(T(t^-{n})) = {} != {expect}", rep.sw), vec![])));
            }
        }
        let chi_p = forms::teich_form(tower, &tower.var(1, -n * p), ctx.m)?;
        let rep_p = conductor::swan(tower, &chi_p)?;
        if rep_p.sw != rep.sw {
            return Ok(Some(ce(
                ctx,
                format!("sw(t^-{}) = {} != sw(t^-{n}) = {}", n * p, rep_p.sw, rep.sw),
                vec![],
            )));
        }
    }
    // route through the table so mutations can break this law
    let z = (ctx.ops.fil_level)(&forms::teich_form(tower, &tower.var(1, -1), 1)?);
    if z != Some(1) {
        return Ok(Some(ce(ctx, "fil level of t^-1 at m=1 is not 1", vec![])));
    }
    Ok(None)
}

fn law_h1_crosscheck(ctx: &mut Ctx) -> Result<Option<Counterexample>> {
    let depth = ctx.tower.depth();
    let tower = ctx.tower;
    if depth != 1 {
        return Ok(None);
    }
    for _ in 0..ctx.samples {
        let a = sample_witt(tower, &mut ctx.rng, ctx.m, 6);
        let chi = forms::from_witt(tower, &a)?;
        let rep = conductor::swan(tower, &chi)?;
        let best = conductor::asw_best_form(tower, &a)?;
        let lvl = witt::brylinski_level(tower, &best).unwrap_or(0).max(0);
        if rep.sw != lvl {
            return Ok(Some(ce(
                ctx,
                format!("form pipeline sw = {}, coordinate pipeline level = {lvl}", rep.sw),
                vec![pretty_w(tower, &a)],
            )));
        }
        if rep.sw >= 1 {
            let bf = forms::from_witt(tower, &best)?;
            let (rsw2, _) = conductor::refined_swan(tower, &bf, rep.sw)?;
            if rep.rsw.as_ref() != Some(&rsw2) {
                return Ok(Some(ce(ctx, "refined Swan mismatch between pipelines", vec![pretty_w(tower, &a)])));
            }
        }
        // route the witt op table so coordinate mutations break this law
        if (ctx.ops.witt_add)(tower, &a, &a)? != witt::scalar_int(tower, 2, &a) {
            return Ok(Some(ce(ctx, "witt add disagrees with 2a", vec![pretty_w(tower, &a)])));
        }
    }
    Ok(None)
}

fn law_rsw_nonzero(ctx: &mut Ctx) -> Result<Option<Counterexample>> {
    let depth = ctx.tower.depth();
    let tower = ctx.tower;
    for _ in 0..ctx.samples {
        let q = ctx.rng.gen_range(0..depth);
        let chi = sample_form(tower, &mut ctx.rng, depth, q, ctx.m, ctx.window);
        let rep = conductor::swan(tower, &chi)?;
        if rep.sw >= 1 {
            let rsw = rep.rsw.as_ref().unwrap();
            if rsw.is_zero() {
                return Ok(Some(ce(
                    ctx,
                    format!("certified sw = {} with zero refined Swan class", rep.sw),
                    vec![forms::pretty(tower, &chi)],
                )));
            }
            if !fil::in_fil(&rep.reduced, rep.sw) {
                return Ok(Some(ce(ctx, "reduced representative escapes fil_sw", vec![forms::pretty(tower, &chi)])));
            }
            // certificate: component at -sw is not an F-image
            let comp = fil::graded_project(tower, &rep.reduced, rep.sw);
            if cartier::f_image_witness(tower, &comp, CartierSection::default())?.is_some() {
                return Ok(Some(ce(ctx, "stopping component is an F-image", vec![forms::pretty(tower, &chi)])));
            }
        }
        // sw bounded by the level of the representative, and the reduced
        // representative has level exactly <= sw
        if let Some(l) = (ctx.ops.fil_level)(&chi) {
            if rep.sw > l.max(0) {
                return Ok(Some(ce(ctx, "sw exceeds the representative level", vec![forms::pretty(tower, &chi)])));
            }
        }
        if let Some(l) = (ctx.ops.fil_level)(&rep.reduced) {
            if l > rep.sw.max(0) {
                return Ok(Some(ce(ctx, "reduced level exceeds sw", vec![forms::pretty(tower, &chi)])));
            }
        }
    }
    Ok(None)
}

fn law_swan_class_invariance(ctx: &mut Ctx) -> Result<Option<Counterexample>> {
    let depth = ctx.tower.depth();
    let tower = ctx.tower;
    for _ in 0..ctx.samples / 2 + 1 {
        let q = ctx.rng.gen_range(0..depth);
        let chi = sample_form(tower, &mut ctx.rng, depth, q, ctx.m, ctx.window);
        let base = conductor::swan(tower, &chi)?;
        let alpha = sample_form(tower, &mut ctx.rng, depth, q, ctx.m + 1, 4);
        let falpha = forms::apply_f(tower, &alpha)?;
        if (ctx.ops.cartier)(tower, &falpha)? != forms::apply_r(tower, &alpha)? {
            return Ok(Some(ce(ctx, "class move is not (1-C)(F alpha)", vec![forms::pretty(tower, &alpha)])));
        }
        let omc = forms::sub(tower, &falpha, &(ctx.ops.cartier)(tower, &falpha)?)?;
        let shifted = forms::add(tower, &chi, &omc)?;
        let rep = conductor::swan(tower, &shifted)?;
        if rep.sw != base.sw {
            return Ok(Some(ce(
                ctx,
                format!("sw changed under (1-C)(F alpha): {} vs {}", rep.sw, base.sw),
                vec![forms::pretty(tower, &chi), forms::pretty(tower, &alpha)],
            )));
        }
    }
    Ok(None)
}

fn law_swan_v_compat(ctx: &mut Ctx) -> Result<Option<Counterexample>> {
    let depth = ctx.tower.depth();
    let tower = ctx.tower;
    for _ in 0..ctx.samples / 2 + 1 {
        let q = ctx.rng.gen_range(0..depth);
        let chi = sample_form(tower, &mut ctx.rng, depth, q, ctx.m, ctx.window);
        let sw = conductor::swan(tower, &chi)?.sw;
        let v = (ctx.ops.v)(tower, &chi)?;
        let swv = conductor::swan(tower, &v)?.sw;
        if swv > sw {
            return Ok(Some(ce(
                ctx,
                format!("sw(V chi) = {swv} > sw(chi) = {sw}"),
                vec![forms::pretty(tower, &chi)],
            )));
        }
    }
    Ok(None)
}

// ---------------------------------------------------------------------------
// suite registry and runner
// ---------------------------------------------------------------------------

fn law_registry() -> Vec<(&'static str, LawFn)> {
    vec![
        ("witt.ring-axioms", law_witt_ring_axioms),
        ("witt.fv-p", law_witt_fv_p),
        ("witt.x-vy", law_witt_xvy),
        ("ring.frobenius-root", law_frobenius_root),
        ("ring.valuation-additive", law_valuation_additive),
        ("drw.fv-p", law_drw_fv_p),
        ("drw.fdv-d", law_drw_fdv_d),
        ("drw.vd-pdv", law_drw_vd_pdv),
        ("drw.x-vy", law_drw_xvy),
        ("drw.r-commutes", law_drw_r_commutes),
        ("drw.fd-teich", law_drw_fd_teich),
        ("drw.dlog-additive", law_dlog_additive),
        ("drw.dd-zero", law_dd_zero),
        ("drw.leibniz", law_leibniz),
        ("drw.graded-comm", law_graded_comm),
        ("drw.witt-intertwine", law_from_witt_hom),
        ("drw.generator-spanning", law_generator_spanning),
        ("ring.laurent-axioms", law_laurent_ring_axioms),
        ("m1.oracle", law_m1_oracle),
        ("fil.operator-axioms", law_fil_axioms),
        ("fil.monomial-shift", law_fil_shift),
        ("fil.brylinski-crosscheck", law_brylinski_crosscheck),
        ("fil.goodness", law_goodness),
        ("fil.pbar", law_pbar_fil),
        ("fil.top-degree-integral", law_top_degree_integral),
        ("cartier.cf-r", law_cf_equals_r),
        ("cartier.kills-dv", law_c_kills_dv),
        ("cartier.sections", law_c_sections),
        ("cartier.linear", law_c_additive_linear),
        ("cartier.fil-equiv", law_cartier_fil_equiv),
        ("cartier.vr3", law_vr3_witness),
        ("cartier.zb-grading", law_zb_grading),
        ("cond.table", law_conductor_table),
        ("cond.h1-crosscheck", law_h1_crosscheck),
        ("cond.rsw-nonzero", law_rsw_nonzero),
        ("cond.class-invariance", law_swan_class_invariance),
        ("cond.v-compat", law_swan_v_compat),
    ]
}

/// Laws of each registered suite.
pub fn suite_laws(name: &str) -> Result<Vec<&'static str>> {
    let all: Vec<&'static str> = law_registry().iter().map(|(id, _)| *id).collect();
    Ok(match name {
        "witt-ring" => vec![
            "ring.laurent-axioms",
            "witt.ring-axioms",
            "witt.fv-p",
            "witt.x-vy",
            "ring.frobenius-root",
            "ring.valuation-additive",
        ],
        "drw-ops" => vec![
            "drw.fv-p",
            "drw.fdv-d",
            "drw.vd-pdv",
            "drw.x-vy",
            "drw.r-commutes",
            "drw.fd-teich",
            "drw.dlog-additive",
            "drw.dd-zero",
            "drw.leibniz",
            "drw.graded-comm",
            "drw.witt-intertwine",
            "drw.generator-spanning",
        ],
        "m1-oracle" => vec!["m1.oracle"],
        "filtration" => vec![
            "fil.operator-axioms",
            "fil.monomial-shift",
            "fil.brylinski-crosscheck",
            "fil.goodness",
            "fil.pbar",
            "fil.top-degree-integral",
        ],
        "goodness" => vec!["fil.goodness", "fil.pbar"],
        "cartier" => vec![
            "cartier.cf-r",
            "cartier.kills-dv",
            "cartier.sections",
            "cartier.linear",
            "cartier.fil-equiv",
            "cartier.vr3",
            "cartier.zb-grading",
        ],
        "conductor" => vec![
            "cond.table",
            "cond.h1-crosscheck",
            "cond.rsw-nonzero",
            "cond.class-invariance",
            "cond.v-compat",
        ],
        "all" => all,
        other => return Err(Error::UnknownSuite(other.to_string())),
    })
}

pub fn registered_suites() -> Vec<&'static str> {
    vec![
        "witt-ring",
        "drw-ops",
        "m1-oracle",
        "filtration",
        "goodness",
        "cartier",
        "conductor",
        "all",
    ]
}

/// Build a suite with the default grid.
pub fn make_suite(
    name: &str,
    seed: u64,
    samples: u32,
    max_exp: i64,
    experimental_p2: bool,
) -> Result<LawSuite> {
    Ok(LawSuite {
        name: name.to_string(),
        grid: default_grid(experimental_p2),
        samples,
        seed,
        max_exp,
        laws: suite_laws(name)?,
    })
}

/// Run a suite; `mutation` injects a broken operator table (meta-testing).
pub fn run_suite(suite: &LawSuite, mutation: Option<Mutation>) -> Result<Report> {
    let registry: BTreeMap<&'static str, LawFn> = law_registry().into_iter().collect();
    let ops = ops_with(mutation);
    let mut outcomes = vec![];
    for law_id in &suite.laws {
        let law = registry
            .get(law_id)
            .ok_or_else(|| Error::UnknownLaw(law_id.to_string()))?;
        let mut failure = None;
        'grid: for (gi, gp) in suite.grid.iter().enumerate() {
            let tower = Tower::new(TowerSpec::new(gp.p, gp.r, gp.depth)?)?;
            let mut rng = ChaCha8Rng::seed_from_u64(suite.seed);
            rng.set_stream((gi as u64) << 32 | stable_hash(law_id));
            let mut ctx = Ctx {
                tower: &tower,
                ops: &ops,
                rng,
                samples: suite.samples,
                window: suite.max_exp,
                m: gp.m,
                grid: *gp,
            };
            match law(&mut ctx) {
                Ok(None) => {}
                Ok(Some(ce)) => {
                    failure = Some(ce);
                    break 'grid;
                }
                Err(e) => {
                    failure = Some(Counterexample {
                        grid: *gp,
                        description: format!("law errored: {e}"),
                        operands: vec![],
                    });
                    break 'grid;
                }
            }
        }
        outcomes.push(LawOutcome {
            id: law_id.to_string(),
            status: if failure.is_none() { "pass" } else { "fail" }.to_string(),
            counterexample: failure,
        });
    }
    Ok(Report {
        suite: suite.name.clone(),
        seed: suite.seed,
        samples: suite.samples,
        grid: suite.grid.clone(),
        laws: outcomes,
        elapsed_ms: None,
    })
}

fn stable_hash(s: &str) -> u64 {
    // FNV-1a, stable across runs and platforms
    let mut h: u64 = 0xcbf29ce484222325;
    for b in s.bytes() {
        h ^= b as u64;
        h = h.wrapping_mul(0x100000001b3);
    }
    h & 0xffff_ffff
}

#[cfg(test)]
mod tests {
    use super::*;

    fn quick_grid() -> Vec<GridPoint> {
        vec![
            GridPoint { p: 3, r: 1, depth: 1, m: 2 },
            GridPoint { p: 3, r: 1, depth: 2, m: 2 },
            GridPoint { p: 5, r: 2, depth: 1, m: 3 },
        ]
    }

    fn quick_suite(name: &str) -> LawSuite {
        LawSuite {
            name: name.into(),
            grid: quick_grid(),
            samples: 8,
            seed: 42,
            max_exp: 6,
            laws: suite_laws(name).unwrap(),
        }
    }

    #[test]
    fn suites_pass_on_quick_grid() {
        for name in ["witt-ring", "drw-ops", "m1-oracle", "filtration", "cartier", "conductor"] {
            let suite = quick_suite(name);
            let report = run_suite(&suite, None).unwrap();
            for law in &report.laws {
                assert_eq!(
                    law.status, "pass",
                    "law {} failed: {:?}",
                    law.id, law.counterexample
                );
            }
        }
    }

    #[test]
    fn unknown_suite_is_rejected() {
        assert!(matches!(suite_laws("no-such"), Err(Error::UnknownSuite(_))));
    }

    #[test]
    fn reports_are_reproducible() {
        let suite = quick_suite("drw-ops");
        let r1 = serde_json::to_string(&run_suite(&suite, None).unwrap()).unwrap();
        let r2 = serde_json::to_string(&run_suite(&suite, None).unwrap()).unwrap();
        assert_eq!(r1, r2);
    }

    #[test]
    fn sample_element_contract() {
        let gp = GridPoint { p: 3, r: 1, depth: 2, m: 2 };
        // z1-form samples satisfy is_z1; fil-bounded samples respect the bound
        for seed in 0..20u64 {
            match sample_element(gp, seed, SampleShape::Z1Form { q: 1 }).unwrap() {
                Sampled::Form(f) => {
                    let tw = Tower::new(TowerSpec::new(3, 1, 2).unwrap()).unwrap();
                    assert!(crate::cartier::is_z1(&tw, &f, None).unwrap());
                }
                _ => panic!(),
            }
            match sample_element(gp, seed, SampleShape::FilBounded { q: 1, n: 3 }).unwrap() {
                Sampled::Form(f) => {
                    assert!(crate::fil::in_fil(&f, 3));
                }
                _ => panic!(),
            }
        }
        // determinism
        assert_eq!(
            sample_element(gp, 5, SampleShape::Witt).unwrap(),
            sample_element(gp, 5, SampleShape::Witt).unwrap()
        );
        // out-of-matrix shapes are rejected
        assert!(matches!(
            sample_element(gp, 0, SampleShape::Form { q: 3 }),
            Err(Error::UnsupportedShape(_))
        ));
    }

    #[test]
    fn mutations_break_some_law() {
        // cheap smoke test; the full coverage matrix lives in the
        // integration suite
        let suite = quick_suite("cartier");
        let report = run_suite(&suite, Some(Mutation::CartierSignFlip)).unwrap();
        assert!(!report.all_pass());
    }
}
