//! Coordinate-level arithmetic in `W_m(R)` for tower rings `R`, with the
//! operators `V`, `F`, `R`, the coordinatewise Frobenius and the
//! Teichmuller lift.
//!
//! Ring operations are evaluated through the ghost map over an integral
//! lift of the tower (Laurent polynomials with Galois-ring coefficients at
//! precision `p^m`): compute ghost components, combine, and invert by exact
//! division.  The result agrees with evaluating the universal polynomials
//! of [`crate::wittpoly`] reduced mod p; the test suite cross-checks the
//! two routes.
//!
//! Coordinates are stored with the Teichmuller-level coordinate first:
//! in the labelling `(a_{m-1}, .., a_0)` with `a_0` the deepest
//! V-coordinate, `coords[k] = a_{m-1-k}`.

use crate::error::{Error, Result};
use crate::tower::{LiftElem, LiftRing, Tower, TowerElem};

/// A truncated Witt vector over some level of the tower.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct WittVec {
    pub level: u8,
    pub coords: Vec<TowerElem>,
}

impl WittVec {
    pub fn m(&self) -> u8 {
        self.coords.len() as u8
    }

    pub fn is_zero(&self) -> bool {
        self.coords.iter().all(|c| c.is_zero())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum WittOp {
    Add,
    Mul,
    Neg,
}

pub fn zero(tower: &Tower, level: u8, m: u8) -> WittVec {
    WittVec { level, coords: vec![tower.zero(level); m as usize] }
}

pub fn one(tower: &Tower, level: u8, m: u8) -> WittVec {
    teichmuller(tower, &tower.one(level), m)
}

/// `[x]_m = (x, 0, .., 0)`.
pub fn teichmuller(tower: &Tower, x: &TowerElem, m: u8) -> WittVec {
    let mut coords = vec![tower.zero(x.level()); m as usize];
    coords[0] = x.clone();
    WittVec { level: x.level(), coords }
}

fn check_shapes(x: &WittVec, y: &WittVec) -> Result<()> {
    if x.level != y.level {
        return Err(Error::TowerMismatch);
    }
    if x.coords.len() != y.coords.len() {
        return Err(Error::LengthMismatch(x.m(), y.m()));
    }
    Ok(())
}

/// Ghost components `w_0..w_{m-1}` of the coordinatewise lift.  Successive
/// p-th powers are cached: `w_i` reuses the powers computed for `w_{i-1}`.
fn ghosts(lr: &LiftRing, coords: &[TowerElem]) -> Vec<LiftElem> {
    let p = lr.tower.p() as u64;
    let m = coords.len();
    // powers[j] holds lifts[j]^{p^k}, raised in place as i grows
    let mut powers: Vec<LiftElem> = coords.iter().map(|c| lr.lift(c)).collect();
    let mut out = Vec::with_capacity(m);
    for i in 0..m {
        if i > 0 {
            for pw in powers.iter_mut().take(i) {
                *pw = lr.pow(pw, p);
            }
        }
        let mut acc = lr.zero(coords[0].level());
        for (j, pw) in powers.iter().enumerate().take(i + 1) {
            let scaled = lr.scalar_mul((p as i64).pow(j as u32), pw);
            acc = lr.add(&acc, &scaled);
        }
        out.push(acc);
    }
    out
}

/// Invert the ghost map: recover coordinates mod p from ghost components
/// known mod `p^m`.
#[allow(clippy::needless_range_loop)]
fn ghost_invert(lr: &LiftRing, level: u8, targets: &[LiftElem]) -> Vec<TowerElem> {
    let p = lr.tower.p() as u64;
    let m = targets.len();
    let mut lifted: Vec<LiftElem> = Vec::with_capacity(m);
    // powers[j] holds lifted[j]^{p^{i-j}} at the start of step i
    let mut powers: Vec<LiftElem> = Vec::with_capacity(m);
    for i in 0..m {
        for pw in powers.iter_mut() {
            *pw = lr.pow(pw, p);
        }
        let mut rhs = targets[i].clone();
        for (j, pw) in powers.iter().enumerate() {
            let scaled = lr.scalar_mul((p as i64).pow(j as u32), pw);
            rhs = lr.add(&rhs, &lr.neg(&scaled));
        }
        let c = lr.div_pow_p(&rhs, i as u32);
        powers.push(c.clone());
        lifted.push(c);
    }
    let _ = level;
    lifted.iter().map(|c| lr.reduce(c)).collect()
}

/// Ring operations via ghost components.
pub fn arith(tower: &Tower, op: WittOp, x: &WittVec, y: &WittVec) -> Result<WittVec> {
    check_shapes(x, y)?;
    let m = x.coords.len();
    let lr = LiftRing::new(tower, m as u32);
    let gx = ghosts(&lr, &x.coords);
    let targets: Vec<LiftElem> = match op {
        WittOp::Neg => gx.iter().map(|g| lr.neg(g)).collect(),
        WittOp::Add => {
            let gy = ghosts(&lr, &y.coords);
            gx.iter().zip(&gy).map(|(a, b)| lr.add(a, b)).collect()
        }
        WittOp::Mul => {
            let gy = ghosts(&lr, &y.coords);
            gx.iter().zip(&gy).map(|(a, b)| lr.mul(a, b)).collect()
        }
    };
    Ok(WittVec { level: x.level, coords: ghost_invert(&lr, x.level, &targets) })
}

pub fn add(tower: &Tower, x: &WittVec, y: &WittVec) -> Result<WittVec> {
    arith(tower, WittOp::Add, x, y)
}

pub fn mul(tower: &Tower, x: &WittVec, y: &WittVec) -> Result<WittVec> {
    arith(tower, WittOp::Mul, x, y)
}

pub fn neg(tower: &Tower, x: &WittVec) -> Result<WittVec> {
    arith(tower, WittOp::Neg, x, x)
}

pub fn sub(tower: &Tower, x: &WittVec, y: &WittVec) -> Result<WittVec> {
    add(tower, x, &neg(tower, y)?)
}

/// Multiplication by an integer scalar (through `n . w_i` on ghosts).
pub fn scalar_int(tower: &Tower, n: i64, x: &WittVec) -> WittVec {
    let m = x.coords.len();
    let lr = LiftRing::new(tower, m as u32);
    let gx = ghosts(&lr, &x.coords);
    let targets: Vec<LiftElem> = gx.iter().map(|g| lr.scalar_mul(n, g)).collect();
    WittVec { level: x.level, coords: ghost_invert(&lr, x.level, &targets) }
}

/// `V(a_{m-1},..,a_0) = (0, a_{m-1},..,a_0)`: prepend a zero at the
/// Teichmuller slot.
pub fn v_shift(tower: &Tower, x: &WittVec) -> WittVec {
    let mut coords = Vec::with_capacity(x.coords.len() + 1);
    coords.push(tower.zero(x.level));
    coords.extend(x.coords.iter().cloned());
    WittVec { level: x.level, coords }
}

/// `R` drops the deepest V-coordinate `a_0`.
pub fn restrict(x: &WittVec) -> Result<WittVec> {
    if x.coords.len() <= 1 {
        return Err(Error::LengthUnderflow);
    }
    Ok(WittVec { level: x.level, coords: x.coords[..x.coords.len() - 1].to_vec() })
}

/// Coordinatewise p-th power at fixed length.
pub fn frobenius_coords(tower: &Tower, x: &WittVec) -> WittVec {
    WittVec {
        level: x.level,
        coords: x.coords.iter().map(|c| tower.frobenius(c)).collect(),
    }
}

/// Witt Frobenius `F : W_{m+1} -> W_m`; in characteristic p this is the
/// coordinatewise Frobenius composed with restriction.
pub fn frobenius(tower: &Tower, x: &WittVec) -> Result<WittVec> {
    Ok(frobenius_coords(tower, &restrict(x)?))
}

/// `p . x = (0, x_0^p, .., x_{m-2}^p)` in characteristic p.
pub fn mul_p(tower: &Tower, x: &WittVec) -> WittVec {
    let m = x.coords.len();
    let mut coords = Vec::with_capacity(m);
    coords.push(tower.zero(x.level));
    for c in &x.coords[..m - 1] {
        coords.push(tower.frobenius(c));
    }
    WittVec { level: x.level, coords }
}

/// Multiplication by a Teichmuller representative:
/// `[t] . x = (t x_0, t^p x_1, .., t^{p^{m-1}} x_{m-1})`.
pub fn mul_teich(tower: &Tower, t: &TowerElem, x: &WittVec) -> Result<WittVec> {
    let mut coords = Vec::with_capacity(x.coords.len());
    let mut tp = t.clone();
    for (k, c) in x.coords.iter().enumerate() {
        if k > 0 {
            tp = tower.frobenius(&tp);
        }
        coords.push(tower.mul(&tp, c)?);
    }
    Ok(WittVec { level: x.level, coords })
}

/// Pole order of `x` in the variable of `var_level`: `-valuation`, or
/// `None` for the zero element.
fn pole_in(tower: &Tower, x: &TowerElem, var_level: u8) -> Option<i64> {
    tower.valuation_in(x, var_level).map(|v| -v)
}

/// Brylinski membership in the outermost variable:
/// `a in fil_n W_m(K)` iff `p^i . pole(a_i) <= n` for all i, where
/// `a_i = coords[m-1-i]`.
pub fn fil_member(tower: &Tower, x: &WittVec, n: i64) -> bool {
    fil_member_in(tower, x, x.level, n)
}

/// Same criterion measured in the variable of `var_level`.
pub fn fil_member_in(tower: &Tower, x: &WittVec, var_level: u8, n: i64) -> bool {
    let m = x.coords.len();
    let p = tower.p() as i64;
    for (k, c) in x.coords.iter().enumerate() {
        if let Some(pole) = pole_in(tower, c, var_level) {
            let i = (m - 1 - k) as u32;
            if p.pow(i) * pole > n {
                return false;
            }
        }
    }
    true
}

/// Minimal `n` with `x in fil_n` (Brylinski level) in the outermost
/// variable; `None` for the zero vector (level -infinity).
pub fn brylinski_level(tower: &Tower, x: &WittVec) -> Option<i64> {
    let m = x.coords.len();
    let p = tower.p() as i64;
    x.coords
        .iter()
        .enumerate()
        .filter_map(|(k, c)| {
            pole_in(tower, c, x.level).map(|pole| p.pow((m - 1 - k) as u32) * pole)
        })
        .max()
}

/// Correction term of a Teichmuller split: for `x = t + y` in the tower,
/// the Witt vector `[x]_m - [t]_m - [y]_m`, computed with a single ghost
/// inversion (the ghosts of Teichmuller lifts are plain p-power sequences).
pub fn teich_split_correction(
    tower: &Tower,
    x: &TowerElem,
    t: &TowerElem,
    y: &TowerElem,
    m: u8,
) -> WittVec {
    let p = tower.p() as u64;
    let lr = LiftRing::new(tower, m as u32);
    let mut px = lr.lift(x);
    let mut pt = lr.lift(t);
    let mut py = lr.lift(y);
    let mut targets = Vec::with_capacity(m as usize);
    for i in 0..m {
        if i > 0 {
            px = lr.pow(&px, p);
            pt = lr.pow(&pt, p);
            py = lr.pow(&py, p);
        }
        targets.push(lr.add(&px, &lr.neg(&lr.add(&pt, &py))));
    }
    WittVec { level: x.level(), coords: ghost_invert(&lr, x.level(), &targets) }
}

/// Evaluate a mod-p reduced universal polynomial on tower elements
/// (variable order `x_0..x_{m-1}, y_0..y_{m-1}`).  Test oracle for the
/// ghost-route arithmetic.
pub fn eval_table_poly(
    tower: &Tower,
    poly: &crate::wittpoly::IntPoly,
    args: &[TowerElem],
) -> Result<TowerElem> {
    let level = args[0].level();
    let mut acc = tower.zero(level);
    for (exps, coeff) in &poly.terms {
        let c = crate::wittpoly::coeff_mod_p(coeff, tower.p());
        if c == 0 {
            continue;
        }
        let mut term = tower.int(c as i64, level);
        for (i, &e) in exps.iter().enumerate() {
            if e == 0 {
                continue;
            }
            term = tower.mul(&term, &tower.pow(&args[i], e as u32)?)?;
        }
        acc = tower.add(&acc, &term)?;
    }
    Ok(acc)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::tower::TowerSpec;
    use crate::wittpoly::gen_witt_polys;

    fn tower(p: u8, r: u8, depth: u8) -> Tower {
        Tower::new(TowerSpec::new(p, r, depth).unwrap()).unwrap()
    }

    fn wv(tower: &Tower, level: u8, coords: Vec<TowerElem>) -> WittVec {
        let _ = tower;
        WittVec { level, coords }
    }

    #[test]
    fn one_plus_one_in_w2_f3() {
        // in (a_1, a_0) labels: (1,0) + (1,0) = (2,1)
        let tw = tower(3, 1, 0);
        let x = wv(&tw, 0, vec![tw.one(0), tw.zero(0)]);
        let s = add(&tw, &x, &x).unwrap();
        assert_eq!(s.coords, vec![tw.int(2, 0), tw.one(0)]);
    }

    #[test]
    fn add_zero_is_identity() {
        let tw = tower(5, 2, 1);
        let x = wv(
            &tw,
            1,
            vec![tw.var(1, -2), tw.add(&tw.var(1, 1), &tw.one(1)).unwrap(), tw.var(1, 3)],
        );
        let z = zero(&tw, 1, 3);
        assert_eq!(add(&tw, &x, &z).unwrap(), x);
    }

    #[test]
    fn two_times_teichmuller_char2() {
        // (t^-1, 0) + (t^-1, 0) = (0, t^-2) over F_2[t^+-]
        let tw = tower(2, 1, 1);
        let x = wv(&tw, 1, vec![tw.var(1, -1), tw.zero(1)]);
        let s = add(&tw, &x, &x).unwrap();
        assert_eq!(s.coords, vec![tw.zero(1), tw.var(1, -2)]);
    }

    #[test]
    fn frobenius_on_teichmuller() {
        let tw = tower(2, 1, 1);
        let x = teichmuller(&tw, &tw.var(1, 1), 2);
        let f = frobenius(&tw, &x).unwrap();
        assert_eq!(f, teichmuller(&tw, &tw.var(1, 2), 1));
    }

    #[test]
    fn fv_equals_p() {
        // F(V([1]_1)) = 0 in W_1(F_3)
        let tw = tower(3, 1, 0);
        let x = teichmuller(&tw, &tw.one(0), 1);
        let fv = frobenius(&tw, &v_shift(&tw, &x)).unwrap();
        assert!(fv.is_zero());
    }

    #[test]
    fn restriction_drops_deepest() {
        let tw = tower(3, 1, 1);
        let x = wv(&tw, 1, vec![tw.var(1, 1), tw.var(1, 2)]);
        let r = restrict(&x).unwrap();
        assert_eq!(r.coords, vec![tw.var(1, 1)]);
        assert!(restrict(&r).is_err());
    }

    #[test]
    fn teichmuller_multiplicative() {
        let tw = tower(3, 1, 1);
        let a = teichmuller(&tw, &tw.var(1, 1), 3);
        let b = teichmuller(&tw, &tw.var(1, 2), 3);
        let ab = mul(&tw, &a, &b).unwrap();
        assert_eq!(ab, teichmuller(&tw, &tw.var(1, 3), 3));
    }

    #[test]
    fn mul_p_is_repeated_addition() {
        let tw = tower(3, 1, 1);
        let x = wv(
            &tw,
            1,
            vec![tw.var(1, -1), tw.add(&tw.one(1), &tw.var(1, 2)).unwrap(), tw.var(1, 1)],
        );
        let mut s = zero(&tw, 1, 3);
        for _ in 0..3 {
            s = add(&tw, &s, &x).unwrap();
        }
        assert_eq!(mul_p(&tw, &x), s);
        assert_eq!(scalar_int(&tw, 3, &x), s);
    }

    #[test]
    fn brylinski_membership_examples() {
        // a = (t^-1, 0) at p=2: member of fil_2, not fil_1
        let tw = tower(2, 1, 1);
        let a = wv(&tw, 1, vec![tw.var(1, -1), tw.zero(1)]);
        assert!(fil_member(&tw, &a, 2));
        assert!(!fil_member(&tw, &a, 1));
        assert!(fil_member(&tw, &zero(&tw, 1, 2), -5));
        assert_eq!(brylinski_level(&tw, &a), Some(2));
    }

    #[test]
    fn ghost_route_matches_universal_polynomials() {
        // dual-route check: ghost-lift arithmetic vs mod-p reduced tables
        for &(p, r) in &[(2u8, 1u8), (3, 2), (5, 1)] {
            let tw = tower(p, r, 1);
            for m in 1..=3u8 {
                let table = gen_witt_polys(p, m).unwrap();
                let g = TowerElem::Scalar(tw.fq.gen());
                let mk = |es: &[i64]| -> WittVec {
                    let coords = es
                        .iter()
                        .map(|&e| {
                            tw.add(&tw.monomial(g.clone(), 1, e, 1), &tw.one(1)).unwrap()
                        })
                        .collect();
                    WittVec { level: 1, coords }
                };
                let x = mk(&(0..m as i64).map(|i| -i - 1).collect::<Vec<_>>());
                let y = mk(&(0..m as i64).map(|i| 2 * i - 1).collect::<Vec<_>>());
                let args: Vec<TowerElem> =
                    x.coords.iter().chain(y.coords.iter()).cloned().collect();
                let s = add(&tw, &x, &y).unwrap();
                let pr = mul(&tw, &x, &y).unwrap();
                for i in 0..m as usize {
                    assert_eq!(
                        s.coords[i],
                        eval_table_poly(&tw, &table.sum[i], &args).unwrap(),
                        "sum coordinate {i} mismatch at p={p} m={m}"
                    );
                    assert_eq!(
                        pr.coords[i],
                        eval_table_poly(&tw, &table.prod[i], &args).unwrap(),
                        "prod coordinate {i} mismatch at p={p} m={m}"
                    );
                }
            }
        }
    }

    #[test]
    fn verschiebung_product_rule() {
        // V^i([a]) V^j([b]) = 0 if i+j >= m, else V^{i+j}([a^{p^j} b^{p^i}])
        let tw = tower(3, 1, 1);
        let m = 3u8;
        let a = tw.var(1, -1);
        let b = tw.add(&tw.var(1, 2), &tw.one(1)).unwrap();
        for i in 0..m {
            for j in 0..m {
                let mut x = teichmuller(&tw, &a, m - i);
                for _ in 0..i {
                    x = v_shift(&tw, &x);
                }
                let mut y = teichmuller(&tw, &b, m - j);
                for _ in 0..j {
                    y = v_shift(&tw, &y);
                }
                let prod = mul(&tw, &x, &y).unwrap();
                if i + j >= m {
                    assert!(prod.is_zero(), "V^{i} V^{j} product should vanish");
                } else {
                    let p = tw.p() as u32;
                    let content = tw
                        .mul(
                            &tw.pow(&a, p.pow(j as u32)).unwrap(),
                            &tw.pow(&b, p.pow(i as u32)).unwrap(),
                        )
                        .unwrap();
                    let mut expect = teichmuller(&tw, &content, m - i - j);
                    for _ in 0..i + j {
                        expect = v_shift(&tw, &expect);
                    }
                    assert_eq!(prod, expect, "V^{i}([a]) V^{j}([b]) mismatch");
                }
            }
        }
    }

    #[test]
    fn v_twist_identity() {
        // x V(y) = V(F(x) y)
        let tw = tower(3, 1, 1);
        let x = wv(&tw, 1, vec![tw.var(1, 1), tw.one(1), tw.var(1, -1)]);
        let y = wv(&tw, 1, vec![tw.var(1, -2), tw.var(1, 1)]);
        let lhs = mul(&tw, &x, &v_shift(&tw, &y)).unwrap();
        let fx = frobenius(&tw, &x).unwrap();
        let rhs = v_shift(&tw, &mul(&tw, &fx, &y).unwrap());
        assert_eq!(lhs, rhs);
    }
}
