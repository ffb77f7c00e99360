//! The Cartier operator `C` on 1-closed normal forms, characterized by
//! `C . F = R`, together with `Z_1` membership, componentwise F-image
//! certificates, the map `1 - C`, and the higher `Z_i`/`B_i` groups of the
//! classical (m = 1) complex.
//!
//! `C` is computed by componentwise F-preimage followed by restriction,
//! never by search.  Since `p = pbar . R` with `pbar` injective, the value
//! `R(F-preimage)` is unique; the two registered witness sections exist to
//! exercise that independence.

use crate::error::{Error, Result};
use crate::fil;
use crate::forms::{self, Component, DrwForm, Repr};
use crate::tower::Tower;
use crate::witt::WittVec;
use std::collections::BTreeMap;

/// Witness-construction rule for F-preimages.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum CartierSection {
    /// lift level-0 vectors by appending a zero deepest coordinate
    #[default]
    FrobeniusInverseLift,
    /// lift by duplicating the Frobenius of the previous deepest coordinate
    ZeroPad,
}

/// `x in Z_1`, i.e. `F^{m-1} d x = 0`; with `fil_bound` also requires
/// membership in `fil_n`.
pub fn is_z1(tower: &Tower, x: &DrwForm, fil_bound: Option<i64>) -> Result<bool> {
    if let Some(n) = fil_bound {
        if !fil::in_fil(x, n) {
            return Ok(false);
        }
    }
    let dx = forms::apply_d(tower, x)?;
    let top = forms::apply_f_pow(tower, x.m - 1, &dx)?;
    Ok(top.is_zero())
}

/// Divide by p at fixed length: find `A` with `p . A = c`, if possible.
fn div_p(tower: &Tower, c: &DrwForm, section: CartierSection) -> Option<DrwForm> {
    if c.m == 1 {
        return if c.is_zero() {
            Some(c.clone())
        } else {
            None
        };
    }
    let down = pbar_inv(tower, c)?;
    Some(lift_with_section(tower, &down, section))
}

fn lift_with_section(tower: &Tower, x: &DrwForm, section: CartierSection) -> DrwForm {
    match section {
        CartierSection::ZeroPad => fil::r_section(tower, x).expect("componentwise section"),
        CartierSection::FrobeniusInverseLift => {
            let lifted = match &x.repr {
                Repr::Zero => DrwForm { m: x.m + 1, ..x.clone() },
                Repr::Witt(w) => {
                    let mut coords = w.coords.clone();
                    let pad = tower.frobenius(&coords[coords.len() - 1]);
                    coords.push(pad);
                    DrwForm {
                        m: x.m + 1,
                        repr: Repr::Witt(WittVec { level: w.level, coords }),
                        ..x.clone()
                    }
                }
                Repr::Components(comps) => {
                    let p = tower.p() as i64;
                    let mut out = BTreeMap::new();
                    for (n, comp) in comps {
                        let a = comp.a.as_ref().map(|f| lift_with_section(tower, f, section));
                        let b = comp.b.as_ref().map(|f| lift_with_section(tower, f, section));
                        out.insert(p * n, Component { s: comp.s, a, b });
                    }
                    DrwForm { m: x.m + 1, repr: Repr::Components(out), ..x.clone() }
                }
            };
            debug_assert_eq!(
                forms::apply_r(tower, &lifted).as_ref(),
                Ok(x),
                "section must split R"
            );
            lifted
        }
    }
}

/// `pbar^{-1}` where defined: the unique `w` at length m-1 with
/// `p . (any R-lift of w) = c`.  `None` when `c` is not divisible by p.
pub fn pbar_inv(tower: &Tower, c: &DrwForm) -> Option<DrwForm> {
    if c.m < 2 {
        return None;
    }
    match &c.repr {
        Repr::Zero => Some(DrwForm { m: c.m - 1, ..c.clone() }),
        Repr::Witt(w) => {
            // p . A = (0, A_0^p, .., A_{m-2}^p); divisible iff the leading
            // coordinate vanishes and the rest are p-th powers
            if !w.coords[0].is_zero() {
                return None;
            }
            let mut coords = Vec::with_capacity(w.coords.len() - 1);
            for x in &w.coords[1..] {
                coords.push(tower.frobenius_root(x)?);
            }
            Some(DrwForm {
                m: c.m - 1,
                repr: Repr::Witt(WittVec { level: w.level, coords }),
                ..c.clone()
            })
        }
        Repr::Components(comps) => {
            let p = tower.p() as i64;
            let mut out = BTreeMap::new();
            for (n, comp) in comps {
                if comp.s == c.m - 1 {
                    // s = m-1 components are killed by p
                    return None;
                }
                let a = match &comp.a {
                    None => None,
                    Some(f) => Some(pbar_inv(tower, f)?),
                };
                let b = match &comp.b {
                    None => None,
                    Some(f) => Some(pbar_inv(tower, f)?),
                };
                // pbar preserves the Teichmuller exponent, so the index
                // rescales: n = i p^{m-1-s} at length m comes from n/p
                debug_assert_eq!(n % p, 0);
                out.insert(n / p, Component { s: comp.s, a, b });
            }
            Some(DrwForm { m: c.m - 1, repr: Repr::Components(out), ..c.clone() })
        }
    }
}

fn sign_pow(k: u8) -> i64 {
    if k.is_multiple_of(2) {
        1
    } else {
        -1
    }
}

fn inv_mod(tower: &Tower, i: i64) -> i64 {
    let p = tower.p() as i64;
    let pk = p.pow(crate::field::MAX_M as u32 + 2);
    let a = ((i % pk) + pk) % pk;
    let (mut r0, mut r1, mut t0, mut t1) = (pk, a, 0i64, 1i64);
    while r1 != 0 {
        let qt = r0 / r1;
        (r0, r1) = (r1, r0 - qt * r1);
        (t0, t1) = (t1, t0 - qt * t1);
    }
    ((t0 % pk) + pk) % pk
}

/// Decide whether a whole form is in the image of `F` and return a witness
/// one length up (`F(witness) = x`).  The decision is componentwise.
pub fn f_image_witness(
    tower: &Tower,
    x: &DrwForm,
    section: CartierSection,
) -> Result<Option<DrwForm>> {
    let m = x.m;
    let q = x.q;
    match &x.repr {
        Repr::Zero => Ok(Some(DrwForm { m: m + 1, ..x.clone() })),
        Repr::Witt(w) => {
            // F is surjective over the perfect coefficient field
            let mut coords: Vec<_> =
                w.coords.iter().map(|c| tower.frobenius_root(c).expect("perfect field")).collect();
            coords.push(tower.zero(w.level));
            Ok(Some(DrwForm {
                m: m + 1,
                repr: Repr::Witt(WittVec { level: w.level, coords }),
                ..x.clone()
            }))
        }
        Repr::Components(comps) => {
            let p = tower.p() as i64;
            let mut out = BTreeMap::new();
            for (n, comp) in comps {
                let i = n / p.pow((m - 1 - comp.s) as u32);
                let witness = if comp.s == 0 {
                    if i % p == 0 {
                        let a = match &comp.a {
                            None => None,
                            Some(f) => match f_image_witness(tower, f, section)? {
                                None => return Ok(None),
                                Some(w) => Some(w),
                            },
                        };
                        let b = match &comp.b {
                            None => None,
                            Some(f) => match f_image_witness(tower, f, section)? {
                                None => return Ok(None),
                                Some(w) => Some(w),
                            },
                        };
                        (i / p, Component { s: 0, a, b })
                    } else {
                        // need Cs(1, i; A, B) one length up with
                        // p A + dB = a, (-1)^{q-1} i B = b
                        let bb = comp.b.as_ref().map(|b| {
                            forms::scalar_int(tower, sign_pow(q + 1) * inv_mod(tower, i), b)
                        });
                        let mut c = comp
                            .a
                            .clone()
                            .unwrap_or_else(|| forms::zero_form(tower, x.level - 1, q, m));
                        if let Some(bb) = &bb {
                            let db = forms::apply_d(tower, bb)?;
                            c = forms::sub(tower, &c, &db)?;
                        }
                        let a = match div_p(tower, &c, section) {
                            None => return Ok(None),
                            Some(a) => {
                                if a.is_zero() {
                                    None
                                } else {
                                    Some(a)
                                }
                            }
                        };
                        (i, Component { s: 1, a, b: bb.filter(|f| !f.is_zero()) })
                    }
                } else if comp.s <= m - 2 || comp.a.is_none() {
                    // Cs(s+1, i; A, b) with p A = a
                    let a = match &comp.a {
                        None => None,
                        Some(f) => match div_p(tower, f, section) {
                            None => return Ok(None),
                            Some(a) => {
                                if a.is_zero() {
                                    None
                                } else {
                                    Some(a)
                                }
                            }
                        },
                    };
                    (i, Component { s: comp.s + 1, a, b: comp.b.clone() })
                } else {
                    // s = m-1 with a nonzero a-part: p kills length-1 parts
                    return Ok(None);
                };
                if witness.1.a.is_some() || witness.1.b.is_some() {
                    let nn = witness.0 * p.pow((m - witness.1.s) as u32);
                    out.insert(nn, witness.1);
                }
            }
            let w = DrwForm { level: x.level, q, m: m + 1, repr: Repr::Components(out) };
            debug_assert_eq!(&forms::apply_f(tower, &w)?, x, "F(witness) must equal x");
            Ok(Some(w))
        }
    }
}

/// The Cartier operator on `Z_1`: `C(x) = R(y)` for any `y` with `F(y) = x`.
pub fn cartier_c(tower: &Tower, x: &DrwForm) -> Result<DrwForm> {
    cartier_c_with(tower, x, CartierSection::default())
}

pub fn cartier_c_with(
    tower: &Tower,
    x: &DrwForm,
    section: CartierSection,
) -> Result<DrwForm> {
    if !is_z1(tower, x, None)? {
        return Err(Error::NotInZ1);
    }
    let w = f_image_witness(tower, x, section)?.ok_or(Error::NotInZ1)?;
    forms::apply_r(tower, &w)
}

/// `1 - C` on `Z_1`.
pub fn one_minus_c(tower: &Tower, x: &DrwForm) -> Result<DrwForm> {
    let c = cartier_c(tower, x)?;
    forms::sub(tower, x, &c)
}

/// Exactness test for m = 1 forms, with a `d`-preimage witness.
pub fn exact_witness(tower: &Tower, x: &DrwForm) -> Result<Option<DrwForm>> {
    if x.m != 1 {
        return Err(Error::ShapeMismatch("exactness test needs m = 1".into()));
    }
    if x.q == 0 {
        // B_1 in degree 0 is the zero group; there is no degree -1 witness
        return Ok(None);
    }
    match &x.repr {
        Repr::Zero => Ok(Some(forms::zero_form(tower, x.level, x.q - 1, 1))),
        Repr::Witt(_) => unreachable!("q >= 1"),
        Repr::Components(comps) => {
            let p = tower.p() as i64;
            let mut out = BTreeMap::new();
            for (i, comp) in comps {
                // d(C0(i; alpha, beta)) = C0(i; d alpha, (-1)^{q-1} i alpha + d beta)
                if i % p != 0 {
                    // forced alpha = (-1)^{q-1} i^{-1} b; exact iff a = d(alpha)
                    let b = match &comp.b {
                        None => {
                            // need alpha with i alpha = 0 => alpha = 0; then a = 0
                            if comp.a.is_some() {
                                return Ok(None);
                            }
                            continue;
                        }
                        Some(b) => b,
                    };
                    let alpha = forms::scalar_int(tower, sign_pow(x.q + 1) * inv_mod(tower, *i), b);
                    let da = forms::apply_d(tower, &alpha)?;
                    let a = comp.a.clone().unwrap_or_else(|| {
                        forms::zero_form(tower, x.level - 1, x.q, 1)
                    });
                    if da != a {
                        return Ok(None);
                    }
                    out.insert(*i, Component { s: 0, a: Some(alpha), b: None });
                } else {
                    // p | i: need a = d alpha, b = d beta at the lower level
                    let alpha = match &comp.a {
                        None => None,
                        Some(a) => match exact_witness(tower, a)? {
                            None => return Ok(None),
                            Some(w) => Some(w),
                        },
                    };
                    let beta = match &comp.b {
                        None => None,
                        Some(b) => match exact_witness(tower, b)? {
                            None => return Ok(None),
                            Some(w) => Some(w),
                        },
                    };
                    let alpha = alpha.filter(|f| !f.is_zero());
                    let beta = beta.filter(|f| !f.is_zero());
                    if alpha.is_some() || beta.is_some() {
                        out.insert(*i, Component { s: 0, a: alpha, b: beta });
                    }
                }
            }
            let y = DrwForm { level: x.level, q: x.q - 1, m: 1, repr: Repr::Components(out) };
            debug_assert_eq!(&forms::apply_d(tower, &y)?, x, "d(witness) must equal x");
            Ok(Some(y))
        }
    }
}

/// Default bound on the higher Cartier grading.
pub const ZB_CAP: u8 = 3;

/// Membership flags for the groups `Z_i` and `B_i` of the classical
/// complex (`m = 1`), computed by the Cartier recursion
/// `Z_i = Z_1 and C(.) in Z_{i-1}`, `B_i = Z_{i-1} and C(.) in B_{i-1}`,
/// with `B_1` the componentwise exactness test.
pub fn zb_membership(tower: &Tower, x: &DrwForm, i: u8) -> Result<(bool, bool)> {
    if i > ZB_CAP {
        return Err(Error::CapExceeded(format!("Z/B grading index {i} > {ZB_CAP}")));
    }
    if x.m != 1 {
        return Err(Error::ShapeMismatch("Z/B grading needs m = 1".into()));
    }
    Ok((in_z(tower, x, i)?, in_b(tower, x, i)?))
}

fn in_z(tower: &Tower, x: &DrwForm, i: u8) -> Result<bool> {
    if i == 0 {
        return Ok(true);
    }
    if !forms::apply_d(tower, x)?.is_zero() {
        return Ok(false);
    }
    if i == 1 {
        return Ok(true);
    }
    let c = cartier_c(tower, x)?;
    in_z(tower, &c, i - 1)
}

fn in_b(tower: &Tower, x: &DrwForm, i: u8) -> Result<bool> {
    if i == 0 {
        return Ok(x.is_zero());
    }
    if i == 1 {
        return Ok(x.is_zero() || exact_witness(tower, x)?.is_some());
    }
    if !in_z(tower, x, i - 1)? {
        return Ok(false);
    }
    let c = cartier_c(tower, x)?;
    in_b(tower, &c, i - 1)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::forms::{
        apply_d, apply_f, apply_r, apply_v, dlog_monomial, mul, teich_form,
    };
    use crate::tower::TowerSpec;

    fn tower(p: u8, r: u8, depth: u8) -> Tower {
        Tower::new(TowerSpec::new(p, r, depth).unwrap()).unwrap()
    }

    #[test]
    fn z1_examples() {
        let tw = tower(2, 1, 1);
        // dlog(t) is in Z_1
        let d = dlog_monomial(&tw, &tw.var(1, 1), 2).unwrap();
        assert!(is_z1(&tw, &d, None).unwrap());
        // T(t) at q = 0 is not (t is not a p-th power)
        let t = teich_form(&tw, &tw.var(1, 1), 2).unwrap();
        assert!(!is_z1(&tw, &t, None).unwrap());
        // T(t^p) is
        let tp = teich_form(&tw, &tw.var(1, 2), 2).unwrap();
        assert!(is_z1(&tw, &tp, None).unwrap());
    }

    #[test]
    fn cf_equals_r_on_samples() {
        use rand::Rng;
        use rand::SeedableRng;
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(31);
        for &(p, depth) in &[(2u8, 1u8), (3, 1), (3, 2), (5, 1)] {
            let tw = tower(p, 1, depth);
            for m in 1..=3u8 {
                for _ in 0..10 {
                    let mut x = tw.zero(depth);
                    for _ in 0..rng.gen_range(1..3) {
                        let e = rng.gen_range(-3..4);
                        let inner = if depth == 2 {
                            tw.monomial(tw.var(1, rng.gen_range(-2..3)), 2, e, 2)
                        } else {
                            tw.var(1, e)
                        };
                        x = tw.add(&x, &inner).unwrap();
                    }
                    // alpha: random form at length m+1
                    let alpha = {
                        let base = teich_form(&tw, &x, m + 1).unwrap();
                        if depth >= 1 && m % 2 == 0 {
                            apply_d(&tw, &base).unwrap()
                        } else {
                            let dl = dlog_monomial(&tw, &tw.var(depth, 1), m + 1).unwrap();
                            mul(&tw, &base, &dl).unwrap()
                        }
                    };
                    let falpha = apply_f(&tw, &alpha).unwrap();
                    assert!(is_z1(&tw, &falpha, None).unwrap());
                    let c = cartier_c(&tw, &falpha).unwrap();
                    let r = apply_r(&tw, &alpha).unwrap();
                    assert_eq!(c, r, "C(F(alpha)) != R(alpha), p={p} depth={depth} m={m}");
                }
            }
        }
    }

    #[test]
    fn m1_inverse_power_rule() {
        // C(x^p dlog t) = x dlog t at m = 1
        let tw = tower(3, 1, 1);
        let x = tw.add(&tw.var(1, 2), &tw.one(1)).unwrap();
        let xp = tw.pow(&x, 3).unwrap();
        let form = mul(
            &tw,
            &teich_form(&tw, &xp, 1).unwrap(),
            &dlog_monomial(&tw, &tw.var(1, 1), 1).unwrap(),
        )
        .unwrap();
        let c = cartier_c(&tw, &form).unwrap();
        let expect = mul(
            &tw,
            &teich_form(&tw, &x, 1).unwrap(),
            &dlog_monomial(&tw, &tw.var(1, 1), 1).unwrap(),
        )
        .unwrap();
        assert_eq!(c, expect);
    }

    #[test]
    fn c_kills_deep_dv() {
        // C(dV^{m-1}(b)) = 0
        let tw = tower(3, 1, 1);
        for m in 2..=3u8 {
            let mut b = teich_form(&tw, &tw.var(1, -2), 1).unwrap();
            for _ in 0..m - 1 {
                b = apply_v(&tw, &b).unwrap();
            }
            let dvb = apply_d(&tw, &b).unwrap();
            assert!(is_z1(&tw, &dvb, None).unwrap());
            assert!(cartier_c(&tw, &dvb).unwrap().is_zero());
        }
    }

    #[test]
    fn one_minus_c_fixes_dlog() {
        let tw = tower(3, 1, 1);
        let d = dlog_monomial(&tw, &tw.var(1, 1), 2).unwrap();
        assert!(one_minus_c(&tw, &d).unwrap().is_zero());
    }

    #[test]
    fn section_independence() {
        use rand::Rng;
        use rand::SeedableRng;
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(41);
        let tw = tower(3, 1, 1);
        for m in 1..=3u8 {
            for _ in 0..10 {
                let x = tw
                    .add(&tw.var(1, rng.gen_range(-3..0)), &tw.var(1, rng.gen_range(0..4)))
                    .unwrap();
                let alpha = teich_form(&tw, &x, m + 1).unwrap();
                let falpha = apply_f(&tw, &alpha).unwrap();
                let c1 = cartier_c_with(&tw, &falpha, CartierSection::ZeroPad).unwrap();
                let c2 =
                    cartier_c_with(&tw, &falpha, CartierSection::FrobeniusInverseLift).unwrap();
                assert_eq!(c1, c2);
            }
        }
    }

    #[test]
    fn f_image_examples() {
        let tw = tower(2, 1, 1);
        // m = 1, q = 0: t^2 is an F-image with witness T(t)
        let t2 = teich_form(&tw, &tw.var(1, 2), 1).unwrap();
        let w = f_image_witness(&tw, &t2, CartierSection::default()).unwrap().unwrap();
        assert_eq!(w, teich_form(&tw, &tw.var(1, 1), 2).unwrap());
        // t is not
        let t = teich_form(&tw, &tw.var(1, 1), 1).unwrap();
        assert!(f_image_witness(&tw, &t, CartierSection::default()).unwrap().is_none());
        // depth 2: u t^-3 dlog u is not an F-image (d != 0)
        let tw2 = tower(2, 1, 2);
        let c = tw2.monomial(tw2.var(1, 1), 2, -3, 2);
        let x = mul(
            &tw2,
            &teich_form(&tw2, &c, 1).unwrap(),
            &dlog_monomial(&tw2, &tw2.embed(tw2.var(1, 1), 2), 1).unwrap(),
        )
        .unwrap();
        assert!(!apply_d(&tw2, &x).unwrap().is_zero());
        assert!(f_image_witness(&tw2, &x, CartierSection::default()).unwrap().is_none());
    }

    #[test]
    fn zb_flags() {
        let tw = tower(3, 1, 1);
        // dlog t in Z_i for all i <= cap
        let d = dlog_monomial(&tw, &tw.var(1, 1), 1).unwrap();
        for i in 1..=ZB_CAP {
            let (z, _) = zb_membership(&tw, &d, i).unwrap();
            assert!(z, "dlog t not in Z_{i}");
        }
        // d(t^-1) in B_1
        let dt = apply_d(&tw, &teich_form(&tw, &tw.var(1, -1), 1).unwrap()).unwrap();
        let (_, b) = zb_membership(&tw, &dt, 1).unwrap();
        assert!(b);
        // monotonicity: B_1 subset B_2, Z_2 subset Z_1
        let (_, b2) = zb_membership(&tw, &dt, 2).unwrap();
        assert!(b2);
        // q = 0: Z_i are the p^i-th powers; t^9 is in Z_2 but not Z_3 at p = 3
        let f = teich_form(&tw, &tw.var(1, 9), 1).unwrap();
        let (z2, _) = zb_membership(&tw, &f, 2).unwrap();
        assert!(z2);
        let (z3, _) = zb_membership(&tw, &f, 3).unwrap();
        assert!(!z3);
        // t^3 dlog t = F^3(dV^2([t])) lies in every Z_i at top degree
        let g = mul(
            &tw,
            &teich_form(&tw, &tw.var(1, 3), 1).unwrap(),
            &dlog_monomial(&tw, &tw.var(1, 1), 1).unwrap(),
        )
        .unwrap();
        assert!(in_z(&tw, &g, 3).unwrap());
    }

    #[test]
    fn cap_enforced() {
        let tw = tower(3, 1, 1);
        let d = dlog_monomial(&tw, &tw.var(1, 1), 1).unwrap();
        assert!(matches!(zb_membership(&tw, &d, 4), Err(Error::CapExceeded(_))));
    }
}
