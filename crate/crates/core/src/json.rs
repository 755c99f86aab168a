//! JSON wire formats.
//!
//! Field elements are arrays of base-p digits, little-endian; shorter arrays
//! are padded with zeros on input. Every `*Json` struct mirrors one format and
//! converts to and from the library type.

use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::biext::BiextModel;
use crate::error::{Error, Result};
use crate::gf::{make_field, Field, FieldElem};
use crate::mgrp::{CycInt, MetricGroup, QpZp, WittClass, WittLabel};
use crate::ore::{OreMatrix, OrePoly};
use crate::ppoly::{PExp, PerfectPoly};

pub fn elem_to_json(x: &FieldElem) -> Vec<u32> {
    x.coeffs().to_vec()
}

pub fn elem_from_json(ctx: &Field, digits: &[u32]) -> Result<FieldElem> {
    FieldElem::from_coeffs(ctx, digits)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FieldJson {
    pub p: u32,
    #[serde(rename = "N")]
    pub n: usize,
    pub modulus: Vec<u32>,
}

impl FieldJson {
    pub fn from_field(f: &Field) -> Self {
        FieldJson {
            p: f.p(),
            n: f.degree(),
            modulus: f.modulus().to_vec(),
        }
    }

    /// The context for `(p, N)`; a modulus other than the canonical one is
    /// rejected.
    pub fn to_field(&self) -> Result<Field> {
        let f = make_field(self.p, self.n)?;
        if f.modulus() != self.modulus.as_slice() {
            return Err(Error::Invalid(format!(
                "modulus {:?} is not the canonical {:?}",
                self.modulus,
                f.modulus()
            )));
        }
        Ok(f)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TermJson {
    pub e: i64,
    pub c: Vec<u32>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct OrePolyJson {
    pub p: u32,
    pub m: usize,
    pub terms: Vec<TermJson>,
}

impl OrePolyJson {
    pub fn from_poly(f: &OrePoly) -> Self {
        OrePolyJson {
            p: f.p(),
            m: f.ctx().degree(),
            terms: f
                .terms()
                .map(|(e, c)| TermJson {
                    e,
                    c: elem_to_json(c),
                })
                .collect(),
        }
    }

    pub fn to_poly(&self) -> Result<OrePoly> {
        let ctx = make_field(self.p, self.m)?;
        let terms = self
            .terms
            .iter()
            .map(|t| Ok((t.e, elem_from_json(&ctx, &t.c)?)))
            .collect::<Result<Vec<_>>>()?;
        OrePoly::from_terms(&ctx, terms)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct OreMatrixJson {
    pub d: usize,
    pub rows: Vec<Vec<OrePolyJson>>,
}

impl OreMatrixJson {
    pub fn from_matrix(m: &OreMatrix) -> Self {
        let d = m.dim();
        OreMatrixJson {
            d,
            rows: (0..d)
                .map(|i| (0..d).map(|j| OrePolyJson::from_poly(m.get(i, j))).collect())
                .collect(),
        }
    }

    pub fn to_matrix(&self) -> Result<OreMatrix> {
        if self.rows.len() != self.d {
            return Err(Error::Invalid(format!(
                "{} rows for d = {}",
                self.rows.len(),
                self.d
            )));
        }
        let rows = self
            .rows
            .iter()
            .map(|r| r.iter().map(OrePolyJson::to_poly).collect::<Result<Vec<_>>>())
            .collect::<Result<Vec<_>>>()?;
        OreMatrix::from_rows(rows)
    }
}

/// Either format: a bare polynomial is a `1x1` matrix.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(untagged)]
pub enum HomJson {
    Matrix(OreMatrixJson),
    Poly(OrePolyJson),
}

impl HomJson {
    pub fn to_matrix(&self) -> Result<OreMatrix> {
        match self {
            HomJson::Matrix(m) => m.to_matrix(),
            HomJson::Poly(f) => Ok(OreMatrix::from_poly(&f.to_poly()?)),
        }
    }

    /// Polynomial form for `1x1` matrices, matrix form otherwise.
    pub fn from_matrix(m: &OreMatrix) -> Self {
        if m.dim() == 1 {
            HomJson::Poly(OrePolyJson::from_poly(m.get(0, 0)))
        } else {
            HomJson::Matrix(OreMatrixJson::from_matrix(m))
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PTermJson {
    pub exps: Vec<(u128, u32)>,
    pub c: Vec<u32>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PerfectPolyJson {
    pub p: u32,
    pub m: usize,
    pub vars: usize,
    pub terms: Vec<PTermJson>,
}

impl PerfectPolyJson {
    pub fn from_poly(h: &PerfectPoly) -> Self {
        PerfectPolyJson {
            p: h.ctx().p(),
            m: h.ctx().degree(),
            vars: h.nvars(),
            terms: h
                .terms()
                .map(|(exps, c)| PTermJson {
                    exps: exps.iter().map(|x| (x.num, x.e)).collect(),
                    c: elem_to_json(c),
                })
                .collect(),
        }
    }

    pub fn to_poly(&self) -> Result<PerfectPoly> {
        let ctx = make_field(self.p, self.m)?;
        let terms = self
            .terms
            .iter()
            .map(|t| {
                let exps = t.exps.iter().map(|&(num, e)| PExp { num, e }).collect();
                Ok((exps, elem_from_json(&ctx, &t.c)?))
            })
            .collect::<Result<Vec<_>>>()?;
        PerfectPoly::from_terms(&ctx, self.vars, terms)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct MetricGroupJson {
    pub p: u32,
    pub shape: Vec<u64>,
    /// `[element coordinates, numerator, k]` for the value `num / p^k`.
    pub q: Vec<(Vec<u64>, u64, u32)>,
}

impl MetricGroupJson {
    pub fn from_group(g: &MetricGroup) -> Self {
        MetricGroupJson {
            p: g.p(),
            shape: g.orders().to_vec(),
            q: (0..g.size())
                .map(|a| {
                    let v = g.q_value(a);
                    (g.coords(a), v.num, v.k)
                })
                .collect(),
        }
    }

    /// Every element must be listed exactly once.
    pub fn to_group(&self) -> Result<MetricGroup> {
        if !crate::fp::is_prime(self.p as u64) {
            return Err(Error::NotPrime(self.p as u64));
        }
        let size = self
            .shape
            .iter()
            .try_fold(1u64, |acc, &o| acc.checked_mul(o))
            .ok_or_else(|| Error::Invalid("group order overflows".into()))?;
        if self.q.len() as u64 != size {
            return Err(Error::Invalid(format!(
                "{} values listed for a group of order {size}",
                self.q.len()
            )));
        }
        let mut values: Vec<Option<QpZp>> = vec![None; size as usize];
        for (coords, num, k) in &self.q {
            if coords.len() != self.shape.len()
                || coords.iter().zip(&self.shape).any(|(c, o)| c >= o)
            {
                return Err(Error::Invalid(format!("bad element {coords:?}")));
            }
            let mut idx = 0u64;
            let mut stride = 1u64;
            for (c, o) in coords.iter().zip(&self.shape) {
                idx += c * stride;
                stride *= o;
            }
            let slot = &mut values[idx as usize];
            if slot.is_some() {
                return Err(Error::Invalid(format!("element {coords:?} listed twice")));
            }
            let num = i64::try_from(*num).map_err(|_| Error::Invalid("numerator too large".into()))?;
            *slot = Some(QpZp::new(self.p, num, *k));
        }
        let values = values.into_iter().map(|v| v.expect("all listed")).collect();
        MetricGroup::new(self.p, self.shape.clone(), values)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CycIntJson {
    pub conductor: u64,
    pub coeffs: Vec<i64>,
}

impl CycIntJson {
    pub fn from_cyc(c: &CycInt) -> Self {
        CycIntJson {
            conductor: c.conductor(),
            coeffs: c.coeffs().to_vec(),
        }
    }

    pub fn to_cyc(&self) -> Result<CycInt> {
        let (p, k) = prime_power(self.conductor)
            .ok_or_else(|| Error::Invalid(format!("conductor {} is not a prime power", self.conductor)))?;
        CycInt::from_coeffs(p, k, self.coeffs.clone())
    }
}

fn prime_power(n: u64) -> Option<(u32, u32)> {
    if n < 2 {
        return None;
    }
    let p = (2..=n).find(|d| n % d == 0)?;
    let mut k = 0;
    let mut m = n;
    while m % p == 0 {
        m /= p;
        k += 1;
    }
    (m == 1).then_some((p as u32, k))
}

/// An `F_p`-independent list of elements of `F_{p^N}`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SubspaceJson {
    pub p: u32,
    #[serde(rename = "N")]
    pub n: usize,
    pub basis: Vec<Vec<u32>>,
}

impl SubspaceJson {
    pub fn from_elems(field: &Field, basis: &[FieldElem]) -> Self {
        SubspaceJson {
            p: field.p(),
            n: field.degree(),
            basis: basis.iter().map(elem_to_json).collect(),
        }
    }

    pub fn to_elems(&self) -> Result<(Field, Vec<FieldElem>)> {
        let field = make_field(self.p, self.n)?;
        let elems = self
            .basis
            .iter()
            .map(|d| elem_from_json(&field, d))
            .collect::<Result<Vec<_>>>()?;
        Ok((field, elems))
    }
}

pub fn witt_to_json(c: &WittClass) -> Value {
    match &c.label {
        WittLabel::Other(g) => json!({
            "label": "Other",
            "anisotropic": MetricGroupJson::from_group(g),
        }),
        _ => Value::String(c.name()),
    }
}

/// The model report: points sorted by their digits, each with its value
/// `[point, numerator, denominator]`.
pub fn model_report(model: &BiextModel, witt: &WittClass, gauss: &CycInt) -> Value {
    let q: Vec<Value> = model
        .sorted_indices()
        .into_iter()
        .map(|a| {
            let pt = &model.points()[a];
            let elem = if pt.len() == 1 {
                json!(elem_to_json(&pt[0]))
            } else {
                json!(pt.iter().map(elem_to_json).collect::<Vec<_>>())
            };
            let (num, den) = model.q_value(a).fraction();
            json!([elem, num, den])
        })
        .collect();
    json!({
        "p": model.p(),
        "f": HomJson::from_matrix(model.f()),
        "field": FieldJson::from_field(model.field()),
        "kernel_size": model.size(),
        "q": q,
        "witt_class": witt_to_json(witt),
        "gauss_sum": CycIntJson::from_cyc(gauss),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ppoly::solve_g;

    #[test]
    fn ore_round_trip() {
        let f = make_field(3, 2).unwrap();
        let s = OrePoly::random_skew(&f, 2, 5);
        let j = OrePolyJson::from_poly(&s);
        let text = serde_json::to_string(&j).unwrap();
        let back: OrePolyJson = serde_json::from_str(&text).unwrap();
        assert_eq!(back.to_poly().unwrap(), s);
        let m = OreMatrix::hyperbolic_block(&s);
        let mj = serde_json::to_value(HomJson::from_matrix(&m)).unwrap();
        let back: HomJson = serde_json::from_value(mj).unwrap();
        assert_eq!(back.to_matrix().unwrap(), m);
    }

    #[test]
    fn worked_example_literal() {
        let text = r#"{"p":3,"m":1,"terms":[{"e":-1,"c":[2]},{"e":1,"c":[1]}]}"#;
        let f: OrePolyJson = serde_json::from_str(text).unwrap();
        let f = f.to_poly().unwrap();
        assert_eq!(f, OrePoly::from_prime_terms(f.ctx(), &[(1, 1), (-1, -1)]));
        assert_eq!(serde_json::to_string(&OrePolyJson::from_poly(&f)).unwrap(), text);
    }

    #[test]
    fn other_round_trips() {
        let f = make_field(5, 2).unwrap();
        let g = solve_g(&OrePoly::random_skew(&f, 2, 1));
        let back = PerfectPolyJson::from_poly(&g).to_poly().unwrap();
        assert_eq!(back, g);

        let n = MetricGroup::norm_form_group(3).unwrap();
        assert_eq!(MetricGroupJson::from_group(&n).to_group().unwrap(), n);

        let c = n.gauss_sum(100).unwrap();
        assert_eq!(CycIntJson::from_cyc(&c).to_cyc().unwrap(), c);

        let fj = FieldJson::from_field(&f);
        assert_eq!(fj.to_field().unwrap(), f);
        let bad = FieldJson {
            modulus: vec![2, 0, 1],
            ..fj
        };
        assert!(bad.to_field().is_err());
    }

    #[test]
    fn malformed_inputs_are_rejected() {
        let bad_digit = r#"{"p":3,"m":1,"terms":[{"e":1,"c":[3]}]}"#;
        let f: OrePolyJson = serde_json::from_str(bad_digit).unwrap();
        assert!(f.to_poly().is_err());
        let not_prime = r#"{"p":4,"m":1,"terms":[]}"#;
        let f: OrePolyJson = serde_json::from_str(not_prime).unwrap();
        assert!(f.to_poly().is_err());
        let g = MetricGroupJson {
            p: 3,
            shape: vec![3],
            q: vec![(vec![0], 0, 0), (vec![0], 1, 1), (vec![2], 1, 1)],
        };
        assert!(g.to_group().is_err());
    }
}
