//! Independent classical de Rham complex of a Laurent tower, used as the
//! m = 1 oracle.
//!
//! `Omega^q` of `K_d` is the free `K_d`-module on wedge products
//! `dlog t_{i_1} ^ .. ^ dlog t_{i_q}` with `i_1 < .. < i_q` (the log basis;
//! `dt_i = t_i dlog t_i` makes it a basis).  The implementation is a plain
//! free-module one: coefficients keyed by sorted variable subsets, wedge by
//! shuffle signs, `d` by logarithmic partial derivatives.  It shares no code
//! with the normal-form machinery beyond the scalar tower arithmetic.

use crate::error::{Error, Result};
use crate::forms::DrwForm;
use crate::tower::{Tower, TowerElem};
use std::collections::BTreeMap;

/// A classical differential form: sorted variable subsets (levels, 1-based)
/// mapped to coefficients in the tower.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DeRhamForm {
    pub q: u8,
    pub terms: BTreeMap<Vec<u8>, TowerElem>,
}

impl DeRhamForm {
    pub fn zero(q: u8) -> Self {
        DeRhamForm { q, terms: BTreeMap::new() }
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn scalar(x: TowerElem) -> Self {
        let mut terms = BTreeMap::new();
        if !x.is_zero() {
            terms.insert(vec![], x);
        }
        DeRhamForm { q: 0, terms }
    }
}

pub fn add(tower: &Tower, x: &DeRhamForm, y: &DeRhamForm) -> Result<DeRhamForm> {
    if x.q != y.q {
        return Err(Error::ShapeMismatch(format!("degrees {} vs {}", x.q, y.q)));
    }
    let mut terms = x.terms.clone();
    for (k, v) in &y.terms {
        match terms.remove(k) {
            None => {
                terms.insert(k.clone(), v.clone());
            }
            Some(old) => {
                let s = tower.add(&old, v)?;
                if !s.is_zero() {
                    terms.insert(k.clone(), s);
                }
            }
        }
    }
    Ok(DeRhamForm { q: x.q, terms })
}

pub fn neg(tower: &Tower, x: &DeRhamForm) -> DeRhamForm {
    DeRhamForm {
        q: x.q,
        terms: x.terms.iter().map(|(k, v)| (k.clone(), tower.neg(v))).collect(),
    }
}

/// Merge sorted subsets, counting inversions; `None` on a repeated variable.
fn wedge_basis(a: &[u8], b: &[u8]) -> Option<(Vec<u8>, i64)> {
    let mut out = Vec::with_capacity(a.len() + b.len());
    let mut sign = 1i64;
    let (mut i, mut j) = (0, 0);
    while i < a.len() && j < b.len() {
        if a[i] == b[j] {
            return None;
        }
        if a[i] < b[j] {
            out.push(a[i]);
            i += 1;
        } else {
            // b[j] moves past the remaining a[i..]
            if (a.len() - i) % 2 == 1 {
                sign = -sign;
            }
            out.push(b[j]);
            j += 1;
        }
    }
    out.extend_from_slice(&a[i..]);
    out.extend_from_slice(&b[j..]);
    Some((out, sign))
}

pub fn wedge(tower: &Tower, x: &DeRhamForm, y: &DeRhamForm) -> Result<DeRhamForm> {
    let q = x.q + y.q;
    let mut out = DeRhamForm::zero(q);
    if q > tower.depth() {
        return Ok(out);
    }
    for (ka, va) in &x.terms {
        for (kb, vb) in &y.terms {
            if let Some((k, sg)) = wedge_basis(ka, kb) {
                let mut c = tower.mul(va, vb)?;
                if sg < 0 {
                    c = tower.neg(&c);
                }
                if c.is_zero() {
                    continue;
                }
                let mut single = DeRhamForm::zero(q);
                single.terms.insert(k, c);
                out = add(tower, &out, &single)?;
            }
        }
    }
    Ok(out)
}

/// Logarithmic partial derivative `t_v . d/dt_v` of a coefficient.
fn log_partial(tower: &Tower, x: &TowerElem, var_level: u8) -> Result<TowerElem> {
    match x {
        TowerElem::Scalar(_) => Ok(tower.zero(0)),
        TowerElem::Poly(n) => {
            if n.level == var_level {
                let mut out = tower.zero(n.level);
                for (e, c) in &n.terms {
                    let scaled = tower.scalar_int(*e, &tower.monomial(c.clone(), n.level, *e, n.level));
                    out = tower.add(&out, &scaled)?;
                }
                Ok(out)
            } else {
                let mut out = tower.zero(n.level);
                for (e, c) in &n.terms {
                    let inner = log_partial(tower, c, var_level)?;
                    out = tower.add(&out, &tower.monomial(inner, n.level, *e, n.level))?;
                }
                Ok(out)
            }
        }
    }
}

/// Exterior differential: `d(f w) = sum_v (t_v df/dt_v) dlog t_v ^ w`.
pub fn d(tower: &Tower, x: &DeRhamForm) -> Result<DeRhamForm> {
    let q = x.q + 1;
    let mut out = DeRhamForm::zero(q);
    if q > tower.depth() {
        return Ok(out);
    }
    for (k, c) in &x.terms {
        for v in 1..=tower.depth() {
            let coeff = log_partial(tower, c, v)?;
            if coeff.is_zero() {
                continue;
            }
            let mut single = DeRhamForm::zero(1);
            single.terms.insert(vec![v], coeff);
            let mut rest = DeRhamForm::zero(x.q);
            rest.terms.insert(k.clone(), tower.one(tower.depth()));
            let piece = wedge(tower, &single, &rest)?;
            out = add(tower, &out, &piece)?;
        }
    }
    Ok(out)
}

/// Translate an m = 1 normal form into the free-module representation.
pub fn from_drw(tower: &Tower, x: &DrwForm) -> Result<DeRhamForm> {
    if x.m != 1 {
        return Err(Error::ShapeMismatch(format!("oracle needs m = 1, got m = {}", x.m)));
    }
    translate(tower, x)
}

fn translate(tower: &Tower, x: &DrwForm) -> Result<DeRhamForm> {
    match &x.repr {
        crate::forms::Repr::Zero => Ok(DeRhamForm::zero(x.q)),
        crate::forms::Repr::Witt(w) => {
            debug_assert_eq!(w.m(), 1);
            Ok(DeRhamForm::scalar(tower.embed(w.coords[0].clone(), tower.depth())))
        }
        crate::forms::Repr::Components(comps) => {
            let var = x.level;
            let mut out = DeRhamForm::zero(x.q);
            for (n, comp) in comps {
                debug_assert_eq!(comp.s, 0, "m = 1 forms have only s = 0 components");
                let pi_n = {
                    let mono = tower.var(var, *n);
                    DeRhamForm::scalar(tower.embed(mono, tower.depth()))
                };
                if let Some(a) = &comp.a {
                    let ta = translate(tower, a)?;
                    out = add(tower, &out, &wedge(tower, &ta, &pi_n)?)?;
                }
                if let Some(b) = &comp.b {
                    let tb = translate(tower, b)?;
                    let mut dlog = DeRhamForm::zero(1);
                    dlog.terms.insert(vec![var], tower.one(tower.depth()));
                    let piece = wedge(tower, &wedge(tower, &tb, &pi_n)?, &dlog)?;
                    out = add(tower, &out, &piece)?;
                }
            }
            Ok(out)
        }
    }
}

/// Classical Cartier operator on the oracle side: defined on 1-closed forms,
/// `C(f^p w) = f w` on log-basis terms with p-th power coefficients; used to
/// cross-check the normal-form Cartier at m = 1.
pub fn cartier(tower: &Tower, x: &DeRhamForm) -> Result<DeRhamForm> {
    let mut out = DeRhamForm::zero(x.q);
    for (k, c) in &x.terms {
        // decompose c = c_p + c_rest with c_p the p-th-power monomial part
        let root = match tower.frobenius_root(c) {
            Some(r) => r,
            None => {
                // not componentwise a p-th power: split monomials
                let mut r = tower.zero(c.level());
                for (coeff, exps) in tower.monomials(c) {
                    let mut mono = tower.scalar(coeff.clone(), 0);
                    let mut ok = true;
                    for (lvl0, e) in exps.iter().enumerate() {
                        if e % tower.p() as i64 != 0 {
                            ok = false;
                            break;
                        }
                        mono = tower.monomial(mono, lvl0 as u8 + 1, e / tower.p() as i64, lvl0 as u8 + 1);
                    }
                    if ok {
                        let mono = tower.embed(mono, c.level());
                        let rooted = tower
                            .frobenius_root(&mono)
                            .expect("monomial with divisible exponents");
                        r = tower.add(&r, &rooted)?;
                    }
                }
                r
            }
        };
        if root.is_zero() {
            continue;
        }
        let mut single = DeRhamForm::zero(x.q);
        single.terms.insert(k.clone(), root);
        out = add(tower, &out, &single)?;
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::forms::{apply_d, dlog_monomial, teich_form};
    use crate::tower::TowerSpec;

    fn tower(p: u8, depth: u8) -> Tower {
        Tower::new(TowerSpec::new(p, 1, depth).unwrap()).unwrap()
    }

    #[test]
    fn d_of_inverse_monomial() {
        // d(t^-1) = -t^-1 dlog t
        let tw = tower(3, 1);
        let f = DeRhamForm::scalar(tw.var(1, -1));
        let df = d(&tw, &f).unwrap();
        let mut expect = DeRhamForm::zero(1);
        expect.terms.insert(vec![1], tw.neg(&tw.var(1, -1)));
        assert_eq!(df, expect);
    }

    #[test]
    fn dd_zero_and_leibniz() {
        let tw = tower(3, 2);
        let x = DeRhamForm::scalar(
            tw.add(&tw.monomial(tw.var(1, 2), 2, -1, 2), &tw.var(2, 3)).unwrap(),
        );
        let y = DeRhamForm::scalar(
            tw.add(&tw.monomial(tw.var(1, -1), 2, 2, 2), &tw.one(2)).unwrap(),
        );
        assert!(d(&tw, &d(&tw, &x).unwrap()).unwrap().is_zero());
        let lhs = d(&tw, &wedge(&tw, &x, &y).unwrap()).unwrap();
        let rhs = add(
            &tw,
            &wedge(&tw, &d(&tw, &x).unwrap(), &y).unwrap(),
            &wedge(&tw, &x, &d(&tw, &y).unwrap()).unwrap(),
        )
        .unwrap();
        assert_eq!(lhs, rhs);
    }

    #[test]
    fn translation_commutes_with_d() {
        let tw = tower(3, 2);
        let x = tw
            .add(&tw.monomial(tw.var(1, 1), 2, -2, 2), &tw.var(2, 1))
            .unwrap();
        let f = teich_form(&tw, &x, 1).unwrap();
        let lhs = from_drw(&tw, &apply_d(&tw, &f).unwrap()).unwrap();
        let rhs = d(&tw, &from_drw(&tw, &f).unwrap()).unwrap();
        assert_eq!(lhs, rhs);
    }

    #[test]
    fn translation_commutes_with_mul() {
        let tw = tower(5, 2);
        let a = teich_form(&tw, &tw.monomial(tw.var(1, -1), 2, 1, 2), 1).unwrap();
        let da = apply_d(&tw, &a).unwrap();
        let b = dlog_monomial(&tw, &tw.embed(tw.var(1, 1), 2), 1).unwrap();
        let prod = crate::forms::mul(&tw, &da, &b).unwrap();
        let lhs = from_drw(&tw, &prod).unwrap();
        let rhs = wedge(
            &tw,
            &from_drw(&tw, &da).unwrap(),
            &from_drw(&tw, &b).unwrap(),
        )
        .unwrap();
        assert_eq!(lhs, rhs);
    }

    #[test]
    fn wedge_is_alternating() {
        let tw = tower(3, 2);
        let mut x = DeRhamForm::zero(1);
        x.terms.insert(vec![1], tw.var(2, -1));
        x.terms.insert(vec![2], tw.monomial(tw.var(1, 2), 2, 1, 2));
        let sq = wedge(&tw, &x, &x).unwrap();
        assert!(sq.is_zero());
    }
}
