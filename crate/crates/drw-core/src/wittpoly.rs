//! Universal Witt sum/product/negation polynomials, generated over the exact
//! integers by solving the ghost equations
//! `w_i(x) = sum_{j<=i} p^j x_j^{p^{i-j}}`, then reduced mod p for
//! evaluation in characteristic p.
//!
//! Tables are memoized write-once per `(p, m)`.  Generation cost grows
//! quickly with `p^m`; the default cap keeps it at desk scale.

use crate::error::{Error, Result};
use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};
use std::collections::{BTreeMap, HashMap};
use std::sync::{Arc, Mutex, OnceLock};

/// Sparse polynomial over Z in `nvars` variables.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IntPoly {
    pub nvars: usize,
    /// exponent vector -> nonzero coefficient
    pub terms: BTreeMap<Vec<u16>, BigInt>,
}

impl IntPoly {
    pub fn zero(nvars: usize) -> Self {
        IntPoly { nvars, terms: BTreeMap::new() }
    }

    pub fn var(nvars: usize, idx: usize) -> Self {
        let mut e = vec![0u16; nvars];
        e[idx] = 1;
        let mut terms = BTreeMap::new();
        terms.insert(e, BigInt::one());
        IntPoly { nvars, terms }
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    fn insert(&mut self, e: Vec<u16>, c: BigInt) {
        if c.is_zero() {
            return;
        }
        match self.terms.remove(&e) {
            None => {
                self.terms.insert(e, c);
            }
            Some(old) => {
                let s = old + c;
                if !s.is_zero() {
                    self.terms.insert(e, s);
                }
            }
        }
    }

    pub fn add(&self, other: &IntPoly) -> IntPoly {
        let mut out = self.clone();
        for (e, c) in &other.terms {
            out.insert(e.clone(), c.clone());
        }
        out
    }

    pub fn neg(&self) -> IntPoly {
        IntPoly {
            nvars: self.nvars,
            terms: self.terms.iter().map(|(e, c)| (e.clone(), -c)).collect(),
        }
    }

    pub fn sub(&self, other: &IntPoly) -> IntPoly {
        self.add(&other.neg())
    }

    pub fn mul(&self, other: &IntPoly) -> IntPoly {
        let mut out = IntPoly::zero(self.nvars);
        for (e1, c1) in &self.terms {
            for (e2, c2) in &other.terms {
                let e: Vec<u16> = e1.iter().zip(e2).map(|(a, b)| a + b).collect();
                out.insert(e, c1 * c2);
            }
        }
        out
    }

    pub fn scale(&self, k: &BigInt) -> IntPoly {
        if k.is_zero() {
            return IntPoly::zero(self.nvars);
        }
        IntPoly {
            nvars: self.nvars,
            terms: self.terms.iter().map(|(e, c)| (e.clone(), c * k)).collect(),
        }
    }

    pub fn pow(&self, e: u32) -> IntPoly {
        let mut acc = {
            let mut t = BTreeMap::new();
            t.insert(vec![0u16; self.nvars], BigInt::one());
            IntPoly { nvars: self.nvars, terms: t }
        };
        for _ in 0..e {
            acc = acc.mul(self);
        }
        acc
    }

    /// Exact division by `k`; panics if any coefficient is not divisible
    /// (the ghost equations guarantee divisibility).
    fn div_exact(&self, k: &BigInt) -> IntPoly {
        IntPoly {
            nvars: self.nvars,
            terms: self
                .terms
                .iter()
                .map(|(e, c)| {
                    let (q, r) = (c / k, c % k);
                    assert!(r.is_zero(), "ghost inversion: inexact division");
                    (e.clone(), q)
                })
                .collect(),
        }
    }

    /// Evaluate at big-integer arguments.
    pub fn eval_big(&self, args: &[BigInt]) -> BigInt {
        let mut acc = BigInt::zero();
        for (e, c) in &self.terms {
            let mut term = c.clone();
            for (i, &exp) in e.iter().enumerate() {
                for _ in 0..exp {
                    term *= &args[i];
                }
            }
            acc += term;
        }
        acc
    }
}

/// The table of universal polynomials for `W_m` arithmetic at the prime `p`.
///
/// Variables are ordered `x_0..x_{m-1}, y_0..y_{m-1}` with `x_0` the
/// Teichmuller-level (standard-order) coordinate.
#[derive(Debug, Clone)]
pub struct WittPolyTable {
    pub p: u8,
    pub m: u8,
    pub sum: Vec<IntPoly>,
    pub prod: Vec<IntPoly>,
    pub neg: Vec<IntPoly>,
}

/// Default cap: generation is refused when `p^m` exceeds this.
pub const TABLE_CAP: u64 = 625;

fn ghost(vars: &[IntPoly], p: u8, i: usize) -> IntPoly {
    // w_i = sum_{j<=i} p^j vars[j]^{p^{i-j}}
    let mut acc = IntPoly::zero(vars[0].nvars);
    for (j, v) in vars.iter().enumerate().take(i + 1) {
        let pw = v.pow((p as u32).pow((i - j) as u32));
        let factor = BigInt::from(p).pow(j as u32);
        acc = acc.add(&pw.scale(&factor));
    }
    acc
}

/// Solve for coordinates with the given ghost vector.
#[allow(clippy::needless_range_loop)]
fn ghost_invert(p: u8, targets: &[IntPoly]) -> Vec<IntPoly> {
    let m = targets.len();
    let mut coords: Vec<IntPoly> = Vec::with_capacity(m);
    for i in 0..m {
        // p^i c_i = g_i - sum_{j<i} p^j c_j^{p^{i-j}}
        let mut rhs = targets[i].clone();
        for (j, c) in coords.iter().enumerate() {
            let pw = c.pow((p as u32).pow((i - j) as u32));
            rhs = rhs.sub(&pw.scale(&BigInt::from(p).pow(j as u32)));
        }
        coords.push(rhs.div_exact(&BigInt::from(p).pow(i as u32)));
    }
    coords
}

fn generate(p: u8, m: u8) -> WittPolyTable {
    let n = m as usize;
    let xs: Vec<IntPoly> = (0..n).map(|i| IntPoly::var(2 * n, i)).collect();
    let ys: Vec<IntPoly> = (0..n).map(|i| IntPoly::var(2 * n, n + i)).collect();
    let gx: Vec<IntPoly> = (0..n).map(|i| ghost(&xs, p, i)).collect();
    let gy: Vec<IntPoly> = (0..n).map(|i| ghost(&ys, p, i)).collect();

    let sum_targets: Vec<IntPoly> = gx.iter().zip(&gy).map(|(a, b)| a.add(b)).collect();
    let prod_targets: Vec<IntPoly> = gx.iter().zip(&gy).map(|(a, b)| a.mul(b)).collect();
    let neg_targets: Vec<IntPoly> = gx.iter().map(|a| a.neg()).collect();

    WittPolyTable {
        p,
        m,
        sum: ghost_invert(p, &sum_targets),
        prod: ghost_invert(p, &prod_targets),
        neg: ghost_invert(p, &neg_targets),
    }
}

/// Generate (or fetch from the write-once cache) the universal polynomial
/// table for `(p, m)`.
pub fn gen_witt_polys(p: u8, m: u8) -> Result<Arc<WittPolyTable>> {
    if m == 0 || m > crate::field::MAX_M {
        return Err(Error::CapExceeded(format!("Witt length {m} outside 1..={}", crate::field::MAX_M)));
    }
    let size = (p as u64).checked_pow(m as u32).unwrap_or(u64::MAX);
    if size > TABLE_CAP {
        return Err(Error::CapExceeded(format!(
            "p^m = {size} exceeds table cap {TABLE_CAP}"
        )));
    }
    #[allow(clippy::type_complexity)]
    static CACHE: OnceLock<Mutex<HashMap<(u8, u8), Arc<WittPolyTable>>>> = OnceLock::new();
    let cache = CACHE.get_or_init(|| Mutex::new(HashMap::new()));
    if let Some(t) = cache.lock().unwrap().get(&(p, m)) {
        return Ok(t.clone());
    }
    let table = Arc::new(generate(p, m));
    let mut guard = cache.lock().unwrap();
    Ok(guard.entry((p, m)).or_insert(table).clone())
}

impl WittPolyTable {
    /// Verify ghost compatibility symbolically: for every i,
    /// `w_i(S) = w_i(x) op w_i(y)` as integer polynomials.
    pub fn check_ghost_symbolic(&self) -> bool {
        let n = self.m as usize;
        let xs: Vec<IntPoly> = (0..n).map(|i| IntPoly::var(2 * n, i)).collect();
        let ys: Vec<IntPoly> = (0..n).map(|i| IntPoly::var(2 * n, n + i)).collect();
        for i in 0..n {
            let gx = ghost(&xs, self.p, i);
            let gy = ghost(&ys, self.p, i);
            let ws = ghost(&self.sum, self.p, i);
            if ws != gx.add(&gy) {
                return false;
            }
            let wp = ghost(&self.prod, self.p, i);
            if wp != gx.mul(&gy) {
                return false;
            }
            let wn = ghost(&self.neg, self.p, i);
            if wn != gx.neg() {
                return false;
            }
        }
        true
    }

    /// Verify ghost compatibility on integer samples (for lengths where the
    /// symbolic check is too large).
    pub fn check_ghost_samples(&self, samples: &[(Vec<i64>, Vec<i64>)]) -> bool {
        let n = self.m as usize;
        for (xv, yv) in samples {
            let args: Vec<BigInt> = xv.iter().chain(yv.iter()).map(|&v| BigInt::from(v)).collect();
            let xa: Vec<BigInt> = xv.iter().map(|&v| BigInt::from(v)).collect();
            let ya: Vec<BigInt> = yv.iter().map(|&v| BigInt::from(v)).collect();
            for i in 0..n {
                let gx = ghost_num(self.p, &xa, i);
                let gy = ghost_num(self.p, &ya, i);
                let s: Vec<BigInt> = self.sum.iter().map(|f| f.eval_big(&args)).collect();
                let pr: Vec<BigInt> = self.prod.iter().map(|f| f.eval_big(&args)).collect();
                if ghost_num(self.p, &s, i) != &gx + &gy {
                    return false;
                }
                if ghost_num(self.p, &pr, i) != &gx * &gy {
                    return false;
                }
            }
        }
        true
    }
}

fn ghost_num(p: u8, coords: &[BigInt], i: usize) -> BigInt {
    let mut acc = BigInt::zero();
    for (j, c) in coords.iter().enumerate().take(i + 1) {
        let mut term = c.clone();
        let e = (p as u32).pow((i - j) as u32);
        term = term.pow(e);
        acc += term * BigInt::from(p).pow(j as u32);
    }
    acc
}

/// Mod-p image of an integer coefficient (into 0..p).
pub fn coeff_mod_p(c: &BigInt, p: u8) -> u8 {
    let m = BigInt::from(p);
    let mut r = c % &m;
    if r.is_negative() {
        r += &m;
    }
    let digits = r.to_u32_digits();
    if digits.1.is_empty() {
        0
    } else {
        digits.1[0] as u8
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn poly_from(nvars: usize, terms: &[(&[u16], i64)]) -> IntPoly {
        let mut t = BTreeMap::new();
        for (e, c) in terms {
            t.insert(e.to_vec(), BigInt::from(*c));
        }
        IntPoly { nvars, terms: t }
    }

    #[test]
    fn sum_poly_p2_m2() {
        // S_1 = x_1 + y_1 - x_0 y_0 over Z
        let t = gen_witt_polys(2, 2).unwrap();
        let expect = poly_from(
            4,
            &[(&[0, 1, 0, 0], 1), (&[0, 0, 0, 1], 1), (&[1, 0, 1, 0], -1)],
        );
        assert_eq!(t.sum[1], expect);
    }

    #[test]
    fn sum_poly_length_one() {
        for &p in &crate::field::PRIMES {
            let t = gen_witt_polys(p, 1).unwrap();
            let expect = poly_from(2, &[(&[1, 0], 1), (&[0, 1], 1)]);
            assert_eq!(t.sum[0], expect);
        }
    }

    #[test]
    fn prod_poly_p3_m2() {
        // P_1 = x_0^3 y_1 + x_1 y_0^3 + 3 x_1 y_1
        let t = gen_witt_polys(3, 2).unwrap();
        let expect = poly_from(
            4,
            &[(&[3, 0, 0, 1], 1), (&[0, 1, 3, 0], 1), (&[0, 1, 0, 1], 3)],
        );
        assert_eq!(t.prod[1], expect);
    }

    #[test]
    fn ghost_compatibility_symbolic_small() {
        for &(p, m) in &[(2u8, 3u8), (3, 3), (5, 3), (7, 2)] {
            let t = gen_witt_polys(p, m).unwrap();
            assert!(t.check_ghost_symbolic(), "ghost check failed for ({p},{m})");
        }
    }

    #[test]
    fn ghost_compatibility_samples_m4() {
        for &p in &[2u8, 3] {
            let t = gen_witt_polys(p, 4).unwrap();
            let samples: Vec<(Vec<i64>, Vec<i64>)> = (0..4)
                .map(|k| {
                    (
                        vec![k + 1, 2 * k - 3, k * k, 5 - k],
                        vec![-k, k + 2, 3 * k + 1, k - 7],
                    )
                })
                .collect();
            assert!(t.check_ghost_samples(&samples));
        }
    }

    #[test]
    fn cap_is_enforced() {
        assert!(matches!(gen_witt_polys(7, 4), Err(Error::CapExceeded(_))));
        assert!(matches!(gen_witt_polys(3, 5), Err(Error::CapExceeded(_))));
    }
}
