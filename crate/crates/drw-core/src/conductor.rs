//! Swan and refined Swan conductors of Artin-Schreier-Witt characters.
//!
//! A character is presented by a normal form `omega` of degree q and
//! length m over a tower of depth 1 or 2; its class lives modulo
//! `(1-C)(Z_1 W_m Omega^q_K)`.  The Swan conductor is computed by a
//! reduction loop: as long as the component at the minimal index is an
//! F-image with witness `alpha`, replace `omega` by
//! `omega - (F(alpha) - R(alpha))` (the class is unchanged since
//! `F(alpha) - R(alpha) = (1-C)(F(alpha))`, and the minimal index strictly
//! rises); the loop stops at a certified non-F-image component, whose
//! level is the conductor.  The coordinate-side best-form reduction over
//! `W_m(K)` provides the independent cross-check for q = 0.

use crate::cartier::{self, CartierSection};
use crate::error::{Error, Result};
use crate::fil;
use crate::forms::{self, DrwForm, Repr};
use crate::tower::{Tower, TowerElem};
use crate::witt::{self, WittVec};
use std::collections::BTreeMap;

/// Result of a conductor computation.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SwanReport {
    /// Swan conductor (0 = tame marker)
    pub sw: i64,
    /// fully reduced representative, an element of `fil_sw`
    pub reduced: DrwForm,
    /// refined Swan conductor class (None for tame characters)
    pub rsw: Option<DrwForm>,
    /// the class is taken modulo `fil_{rsw_modulus}`
    pub rsw_modulus: Option<i64>,
}

/// Kato-Matsuda best form of a Witt vector: repeatedly removes reducible
/// leading slices `c t^{-p j}` (slice a p-th power in the residue ring)
/// through `(Fbar - 1)` moves, producing a representative of minimal
/// Brylinski level in its coset `a + (Fbar - 1) W_m(K)`.
pub fn asw_best_form(tower: &Tower, a: &WittVec) -> Result<WittVec> {
    if a.level == 0 {
        return Err(Error::UnsupportedShape("best form needs a Laurent tower".into()));
    }
    let p = tower.p() as i64;
    let mut a = a.clone();
    loop {
        let n = match witt::brylinski_level(tower, &a) {
            None => return Ok(a),
            Some(n) => n,
        };
        if n <= 0 {
            return Ok(a);
        }
        let m = a.coords.len();
        // find the shallowest slot achieving the level
        let mut slot = None;
        for (k, c) in a.coords.iter().enumerate() {
            if let Some(v) = tower.valuation(c) {
                if p.pow((m - 1 - k) as u32) * (-v) == n {
                    slot = Some((k, -v));
                    break;
                }
            }
        }
        let (k, pole) = slot.expect("a positive level is achieved by some slot");
        if pole % p != 0 {
            return Ok(a);
        }
        // leading slice c t^{-pole} must be a p-th power
        let lead = match &a.coords[k] {
            TowerElem::Poly(node) => {
                let (e, c) = node.terms.iter().next().unwrap();
                debug_assert_eq!(*e, -pole);
                tower.monomial(c.clone(), a.level, *e, a.level)
            }
            TowerElem::Scalar(_) => unreachable!("level >= 1"),
        };
        let y = match tower.frobenius_root(&lead) {
            None => return Ok(a),
            Some(y) => y,
        };
        // subtract (Fbar - 1)(V^k([y]))
        let mut x = witt::teichmuller(tower, &y, (m - k) as u8);
        for _ in 0..k {
            x = witt::v_shift(tower, &x);
        }
        let fx = witt::frobenius_coords(tower, &x);
        a = witt::add(tower, &witt::sub(tower, &a, &fx)?, &x)?;
    }
}

/// Single-component form at the given index.
fn component_form(x: &DrwForm, n: i64) -> DrwForm {
    let mut comps = BTreeMap::new();
    if let Some(c) = x.components().and_then(|m| m.get(&n)) {
        comps.insert(n, c.clone());
    }
    DrwForm { repr: Repr::Components(comps), ..x.clone() }
}

/// Swan conductor by normal-form reduction.
pub fn swan(tower: &Tower, chi: &DrwForm) -> Result<SwanReport> {
    if chi.level == 0 {
        return Err(Error::UnsupportedShape(
            "characters live over a tower of depth >= 1".into(),
        ));
    }
    let mut omega = chi.clone();
    let sw = loop {
        let l = match omega.min_index() {
            None => break 0,
            Some(n) => -n,
        };
        if l <= 0 {
            break 0;
        }
        let single = component_form(&omega, -l);
        match cartier::f_image_witness(tower, &single, CartierSection::default())? {
            Some(alpha) => {
                // omega - (F(alpha) - R(alpha)); F(alpha) = the component
                let fa = forms::apply_f(tower, &alpha)?;
                let ra = forms::apply_r(tower, &alpha)?;
                let next = forms::add(tower, &forms::sub(tower, &omega, &fa)?, &ra)?;
                debug_assert!(
                    next.min_index().is_none_or(|n2| n2 > -l),
                    "reduction must strictly raise the minimal index"
                );
                omega = next;
            }
            None => break l,
        }
    };
    debug_assert!(fil::in_fil(&omega, sw.max(0)));
    let (rsw, rsw_modulus) = if sw >= 1 {
        let (r, n1) = refined_swan(tower, &omega, sw)?;
        (Some(r), Some(n1))
    } else {
        (None, None)
    };
    Ok(SwanReport { sw, reduced: omega, rsw, rsw_modulus })
}

/// Refined Swan conductor of a reduced representative with `sw = n >= 1`:
/// the class of `(-1)^{q+1} F^{m-1} d(omega)` in
/// `fil_n Omega^{q+1} / fil_{n'} Omega^{q+1}`, `n' = max(n-1, floor(n/p))`.
pub fn refined_swan(tower: &Tower, reduced: &DrwForm, sw: i64) -> Result<(DrwForm, i64)> {
    if sw < 1 {
        return Err(Error::TameInput);
    }
    let n1 = (sw - 1).max(sw.div_euclid(tower.p() as i64));
    let d = forms::apply_d(tower, reduced)?;
    let top = forms::apply_f_pow(tower, reduced.m - 1, &d)?;
    let signed = forms::scalar_int(tower, sign_pow(reduced.q + 1), &top);
    Ok((truncate_class(&signed, n1), n1))
}

fn sign_pow(k: u8) -> i64 {
    if k.is_multiple_of(2) {
        1
    } else {
        -1
    }
}

/// Representative of the class modulo `fil_{n'}`: drop components with
/// index `>= -n'`.
pub fn truncate_class(x: &DrwForm, n1: i64) -> DrwForm {
    match &x.repr {
        Repr::Components(comps) => DrwForm {
            repr: Repr::Components(
                comps.iter().filter(|(n, _)| **n < -n1).map(|(n, c)| (*n, c.clone())).collect(),
            ),
            ..x.clone()
        },
        _ => x.clone(),
    }
}

/// Dual-pipeline consistency for depth-1 Witt characters: the form-side
/// Swan conductor must equal the Brylinski level of the coordinate best
/// form, and the refined Swan conductor must match
/// `-F^{m-1} d` of the best form, as classes.
pub fn h1_crosscheck(tower: &Tower, a: &WittVec) -> Result<bool> {
    let chi = forms::from_witt(tower, a)?;
    let report = swan(tower, &chi)?;
    let best = asw_best_form(tower, a)?;
    let level = witt::brylinski_level(tower, &best).unwrap_or(0).max(0);
    if report.sw != level {
        return Ok(false);
    }
    if report.sw >= 1 {
        let best_form = forms::from_witt(tower, &best)?;
        let (rsw2, n1) = refined_swan(tower, &best_form, report.sw)?;
        if Some(n1) != report.rsw_modulus || Some(rsw2) != report.rsw {
            return Ok(false);
        }
    }
    Ok(true)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::forms::{dlog_monomial, mul, teich_form};
    use crate::tower::TowerSpec;

    fn tower(p: u8, r: u8, depth: u8) -> Tower {
        Tower::new(TowerSpec::new(p, r, depth).unwrap()).unwrap()
    }

    #[test]
    fn best_form_examples() {
        let tw = tower(2, 1, 1);
        // (t^-2) -> (t^-1) at m = 1
        let a = WittVec { level: 1, coords: vec![tw.var(1, -2)] };
        let b = asw_best_form(&tw, &a).unwrap();
        assert_eq!(b.coords, vec![tw.var(1, -1)]);
        // (t^-1) unchanged
        let c = WittVec { level: 1, coords: vec![tw.var(1, -1)] };
        assert_eq!(asw_best_form(&tw, &c).unwrap(), c);
        // [t^-2]_2 -> [t^-1]_2 (level p^{m-1} = 2)
        let d = witt::teichmuller(&tw, &tw.var(1, -2), 2);
        let bd = asw_best_form(&tw, &d).unwrap();
        assert_eq!(bd, witt::teichmuller(&tw, &tw.var(1, -1), 2));
        assert_eq!(witt::brylinski_level(&tw, &bd), Some(2));
    }

    #[test]
    fn swan_depth1_m1() {
        let tw = tower(2, 1, 1);
        // t^-3: 3 coprime to 2, not a square -> sw = 3
        let chi = teich_form(&tw, &tw.var(1, -3), 1).unwrap();
        let rep = swan(&tw, &chi).unwrap();
        assert_eq!(rep.sw, 3);
        // t^-4 -> t^-2 -> t^-1 -> sw = 1
        let chi4 = teich_form(&tw, &tw.var(1, -4), 1).unwrap();
        let rep4 = swan(&tw, &chi4).unwrap();
        assert_eq!(rep4.sw, 1);
        assert_eq!(rep4.reduced, teich_form(&tw, &tw.var(1, -1), 1).unwrap());
        // integral characters are tame
        let tame = swan(&tw, &teich_form(&tw, &tw.var(1, 2), 1).unwrap()).unwrap();
        assert_eq!(tame.sw, 0);
        assert!(tame.rsw.is_none());
    }

    #[test]
    fn swan_depth2_imperfect_residue() {
        // u t^-2 at p = 2: u is not a square in F_2((u)) -> sw = 2
        let tw = tower(2, 1, 2);
        let c = tw.monomial(tw.var(1, 1), 2, -2, 2);
        let chi = teich_form(&tw, &c, 1).unwrap();
        let rep = swan(&tw, &chi).unwrap();
        assert_eq!(rep.sw, 2);
        // rsw = t^-2 du class at level 2: d(u t^-2) = t^-2 du in char 2,
        // i.e. u t^-2 dlog u
        let rsw = rep.rsw.unwrap();
        let expect = {
            let f = teich_form(&tw, &c, 1).unwrap();
            let dl = dlog_monomial(&tw, &tw.embed(tw.var(1, 1), 2), 1).unwrap();
            mul(&tw, &f, &dl).unwrap()
        };
        assert_eq!(rsw, truncate_class(&expect, 1));
        assert_eq!(rep.rsw_modulus, Some(1));
    }

    #[test]
    fn swan_depth2_degree1() {
        // u t^-3 dlog u at p = 2, q = 1: sw = 3, rsw = u t^-3 dlog t ^ dlog u
        let tw = tower(2, 1, 2);
        let c = tw.monomial(tw.var(1, 1), 2, -3, 2);
        let chi = mul(
            &tw,
            &teich_form(&tw, &c, 1).unwrap(),
            &dlog_monomial(&tw, &tw.embed(tw.var(1, 1), 2), 1).unwrap(),
        )
        .unwrap();
        let rep = swan(&tw, &chi).unwrap();
        assert_eq!(rep.sw, 3);
        let expect = {
            let f = teich_form(&tw, &c, 1).unwrap();
            let dlu = dlog_monomial(&tw, &tw.embed(tw.var(1, 1), 2), 1).unwrap();
            let dlt = dlog_monomial(&tw, &tw.var(2, 1), 1).unwrap();
            mul(&tw, &f, &mul(&tw, &dlt, &dlu).unwrap()).unwrap()
        };
        let rsw = rep.rsw.unwrap();
        assert!(!rsw.is_zero());
        // compare up to sign (the class is reported with the (-1)^{q+1} sign)
        let e1 = truncate_class(&expect, 2);
        let e2 = truncate_class(&forms::neg(&tw, &expect), 2);
        assert!(rsw == e1 || rsw == e2, "{}", forms::pretty(&tw, &rsw));
    }

    #[test]
    fn rsw_depth1_example() {
        // p=2, m=1, omega = t^-3: rsw = t^-3 dlog t class at level 3
        let tw = tower(2, 1, 1);
        let chi = teich_form(&tw, &tw.var(1, -3), 1).unwrap();
        let rep = swan(&tw, &chi).unwrap();
        let rsw = rep.rsw.unwrap();
        let expect = mul(
            &tw,
            &teich_form(&tw, &tw.var(1, -3), 1).unwrap(),
            &dlog_monomial(&tw, &tw.var(1, 1), 1).unwrap(),
        )
        .unwrap();
        assert_eq!(rsw, truncate_class(&expect, 2));
        assert_eq!(rep.rsw_modulus, Some(2));
    }

    #[test]
    fn crosscheck_examples() {
        let tw = tower(2, 1, 1);
        for e in [-3i64, -4, -1, 2] {
            let a = WittVec { level: 1, coords: vec![tw.var(1, e)] };
            assert!(h1_crosscheck(&tw, &a).unwrap(), "crosscheck failed at t^{e}");
        }
    }

    #[test]
    fn crosscheck_random_vectors() {
        use rand::Rng;
        use rand::SeedableRng;
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(97);
        for &p in &[3u8, 5] {
            let tw = tower(p, 1, 1);
            for m in 1..=3u8 {
                for _ in 0..20 {
                    let coords: Vec<TowerElem> = (0..m)
                        .map(|_| {
                            let mut x = tw.zero(1);
                            for _ in 0..rng.gen_range(0..3) {
                                let c = tw.int(rng.gen_range(1..p as i64), 1);
                                let mono = tw.mul(&tw.var(1, rng.gen_range(-6..3)), &c).unwrap();
                                x = tw.add(&x, &mono).unwrap();
                            }
                            x
                        })
                        .collect();
                    let a = WittVec { level: 1, coords };
                    assert!(h1_crosscheck(&tw, &a).unwrap());
                }
            }
        }
    }

    #[test]
    fn swan_class_invariance() {
        // sw is unchanged when adding (1-C)(F(alpha))
        let tw = tower(3, 1, 1);
        let chi = teich_form(&tw, &tw.var(1, -4), 2).unwrap();
        let base = swan(&tw, &chi).unwrap();
        for e in [-2i64, -1, 1] {
            let alpha = teich_form(&tw, &tw.var(1, e), 3).unwrap();
            let fa = forms::apply_f(&tw, &alpha).unwrap();
            let move_ = forms::sub(&tw, &fa, &forms::apply_r(&tw, &alpha).unwrap()).unwrap();
            let shifted = forms::add(&tw, &chi, &move_).unwrap();
            let rep = swan(&tw, &shifted).unwrap();
            assert_eq!(rep.sw, base.sw, "class invariance failed at e = {e}");
            assert_eq!(rep.rsw, base.rsw);
        }
    }
}
