//! Canonical JSON encodings of the domain values.
//!
//! Field elements are little-endian coefficient arrays in the generator g;
//! Laurent elements are `{"level": l, "terms": [[j, coeff], ..]}` with terms
//! ascending in j; Witt vectors list their coordinates with the
//! Teichmuller-level coordinate first; forms are
//! `{"level", "q", "m", "components": [{"n", "s", "a", "b"}, ..]}`.
//! Emission order is canonical, so serialized bytes are reproducible.

use crate::error::{Error, Result};
use crate::field::FieldElem;
use crate::forms::{Component, DrwForm, Repr};
use crate::tower::{PolyNode, Tower, TowerElem};
use crate::witt::WittVec;
use crate::wittpoly::WittPolyTable;
use serde_json::{json, Map, Value};
use std::collections::BTreeMap;

pub fn field_to_value(c: &FieldElem) -> Value {
    Value::Array(c.0.iter().map(|&x| json!(x)).collect())
}

pub fn elem_to_value(x: &TowerElem) -> Value {
    match x {
        TowerElem::Scalar(c) => field_to_value(c),
        TowerElem::Poly(n) => {
            let mut obj = Map::new();
            obj.insert("level".into(), json!(n.level));
            obj.insert(
                "terms".into(),
                Value::Array(
                    n.terms
                        .iter()
                        .map(|(e, c)| Value::Array(vec![json!(e), elem_to_value(c)]))
                        .collect(),
                ),
            );
            if let Some(prec) = n.prec {
                obj.insert("prec".into(), json!(prec));
            }
            Value::Object(obj)
        }
    }
}

pub fn elem_from_value(tower: &Tower, v: &Value, level: u8) -> Result<TowerElem> {
    if level == 0 {
        let arr = v
            .as_array()
            .ok_or_else(|| Error::ShapeMismatch("field element must be an array".into()))?;
        let coeffs: Vec<u8> = arr
            .iter()
            .map(|x| x.as_u64().map(|n| n as u8))
            .collect::<Option<Vec<_>>>()
            .ok_or_else(|| Error::ShapeMismatch("field coefficients must be integers".into()))?;
        return Ok(TowerElem::Scalar(tower.fq.from_coeffs(&coeffs)?));
    }
    let obj = v
        .as_object()
        .ok_or_else(|| Error::ShapeMismatch("laurent element must be an object".into()))?;
    let lvl = obj.get("level").and_then(Value::as_u64).unwrap_or(level as u64) as u8;
    if lvl != level {
        return Err(Error::LevelMismatch(lvl, level));
    }
    let mut terms = BTreeMap::new();
    for pair in obj
        .get("terms")
        .and_then(Value::as_array)
        .ok_or_else(|| Error::ShapeMismatch("missing terms".into()))?
    {
        let pair = pair
            .as_array()
            .filter(|p| p.len() == 2)
            .ok_or_else(|| Error::ShapeMismatch("term must be [exp, coeff]".into()))?;
        let e = pair[0]
            .as_i64()
            .ok_or_else(|| Error::ShapeMismatch("exponent must be an integer".into()))?;
        let c = elem_from_value(tower, &pair[1], level - 1)?;
        if !c.is_zero() {
            terms.insert(e, c);
        }
    }
    let prec = obj.get("prec").and_then(Value::as_i64);
    Ok(TowerElem::Poly(PolyNode { level, terms, prec }))
}

pub fn witt_to_value(w: &WittVec) -> Value {
    json!({
        "level": w.level,
        "coords": w.coords.iter().map(elem_to_value).collect::<Vec<_>>(),
    })
}

pub fn witt_from_value(tower: &Tower, v: &Value) -> Result<WittVec> {
    let obj = v
        .as_object()
        .ok_or_else(|| Error::ShapeMismatch("witt vector must be an object".into()))?;
    let level = obj
        .get("level")
        .and_then(Value::as_u64)
        .ok_or_else(|| Error::ShapeMismatch("missing level".into()))? as u8;
    let coords = obj
        .get("coords")
        .and_then(Value::as_array)
        .ok_or_else(|| Error::ShapeMismatch("missing coords".into()))?
        .iter()
        .map(|c| elem_from_value(tower, c, level))
        .collect::<Result<Vec<_>>>()?;
    if coords.is_empty() {
        return Err(Error::ShapeMismatch("empty Witt vector".into()));
    }
    Ok(WittVec { level, coords })
}

pub fn form_to_value(x: &DrwForm) -> Value {
    match &x.repr {
        Repr::Witt(w) => witt_to_value(w),
        Repr::Zero => json!({
            "level": x.level, "q": x.q, "m": x.m, "components": [],
        }),
        Repr::Components(comps) => {
            let list: Vec<Value> = comps
                .iter()
                .map(|(n, c)| {
                    json!({
                        "n": n,
                        "s": c.s,
                        "a": c.a.as_ref().map(form_to_value).unwrap_or(Value::Null),
                        "b": c.b.as_ref().map(form_to_value).unwrap_or(Value::Null),
                    })
                })
                .collect();
            json!({ "level": x.level, "q": x.q, "m": x.m, "components": list })
        }
    }
}

pub fn form_from_value(tower: &Tower, v: &Value, level: u8, q: u8, m: u8) -> Result<DrwForm> {
    if q > level {
        return Ok(crate::forms::zero_form(tower, level, q, m));
    }
    if level == 0 {
        let w = witt_from_value(tower, v)?;
        if w.m() != m || w.level != 0 {
            return Err(Error::ShapeMismatch("level-0 form shape".into()));
        }
        return Ok(DrwForm { level: 0, q: 0, m, repr: Repr::Witt(w) });
    }
    let obj = v
        .as_object()
        .ok_or_else(|| Error::ShapeMismatch("form must be an object".into()))?;
    for (key, expect) in [("level", level as i64), ("q", q as i64), ("m", m as i64)] {
        if let Some(got) = obj.get(key).and_then(Value::as_i64) {
            if got != expect {
                return Err(Error::ShapeMismatch(format!("{key} = {got}, expected {expect}")));
            }
        }
    }
    let mut comps = BTreeMap::new();
    for cv in obj
        .get("components")
        .and_then(Value::as_array)
        .ok_or_else(|| Error::ShapeMismatch("missing components".into()))?
    {
        let c = cv
            .as_object()
            .ok_or_else(|| Error::ShapeMismatch("component must be an object".into()))?;
        let n = c
            .get("n")
            .and_then(Value::as_i64)
            .ok_or_else(|| Error::ShapeMismatch("component missing n".into()))?;
        let s = crate::forms::s_of(tower.p(), m, n);
        if let Some(claimed) = c.get("s").and_then(Value::as_u64) {
            if claimed as u8 != s {
                return Err(Error::ShapeMismatch(format!(
                    "component at n = {n} claims s = {claimed}, shape forces s = {s}"
                )));
            }
        }
        let len = m - s;
        let a = match c.get("a") {
            None | Some(Value::Null) => None,
            Some(av) => {
                let f = form_from_value(tower, av, level - 1, q, len)?;
                if f.is_zero() {
                    None
                } else {
                    Some(f)
                }
            }
        };
        let b = match (q, c.get("b")) {
            (0, _) | (_, None) | (_, Some(Value::Null)) => None,
            (_, Some(bv)) => {
                let f = form_from_value(tower, bv, level - 1, q - 1, len)?;
                if f.is_zero() {
                    None
                } else {
                    Some(f)
                }
            }
        };
        if a.is_some() || b.is_some() {
            comps.insert(n, Component { s, a, b });
        }
    }
    Ok(DrwForm { level, q, m, repr: Repr::Components(comps) })
}

pub fn table_to_value(t: &WittPolyTable) -> Value {
    let poly = |polys: &[crate::wittpoly::IntPoly]| -> Value {
        Value::Array(
            polys
                .iter()
                .map(|f| {
                    Value::Array(
                        f.terms
                            .iter()
                            .map(|(e, c)| {
                                json!([
                                    e.iter().map(|&x| x as u64).collect::<Vec<_>>(),
                                    c.to_string()
                                ])
                            })
                            .collect(),
                    )
                })
                .collect(),
        )
    };
    json!({
        "p": t.p,
        "m": t.m,
        "vars": "x_0..x_{m-1}, y_0..y_{m-1}; x_0 is the Teichmuller-level coordinate",
        "sum": poly(&t.sum),
        "prod": poly(&t.prod),
        "neg": poly(&t.neg),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::tower::TowerSpec;

    fn tower(p: u8, r: u8, depth: u8) -> Tower {
        Tower::new(TowerSpec::new(p, r, depth).unwrap()).unwrap()
    }

    #[test]
    fn element_roundtrip() {
        let tw = tower(3, 2, 2);
        let g = TowerElem::Scalar(tw.fq.gen());
        let x = tw
            .add(&tw.monomial(g, 2, -2, 2), &tw.var(2, 1))
            .unwrap();
        let v = elem_to_value(&x);
        assert_eq!(elem_from_value(&tw, &v, 2).unwrap(), x);
    }

    #[test]
    fn form_roundtrip() {
        let tw = tower(3, 1, 2);
        let x = crate::forms::teich_form(
            &tw,
            &tw.add(&tw.monomial(tw.var(1, 1), 2, -1, 2), &tw.var(2, 2)).unwrap(),
            2,
        )
        .unwrap();
        let dx = crate::forms::apply_d(&tw, &x).unwrap();
        let v = form_to_value(&dx);
        let back = form_from_value(&tw, &v, dx.level, dx.q, dx.m).unwrap();
        assert_eq!(back, dx);
    }

    #[test]
    fn bad_component_tag_rejected() {
        let tw = tower(3, 1, 1);
        let v = serde_json::json!({
            "level": 1, "q": 0, "m": 2,
            "components": [{"n": 1, "s": 0, "a": {"level": 1, "coords": []}, "b": null}],
        });
        assert!(form_from_value(&tw, &v, 1, 0, 2).is_err());
    }
}
