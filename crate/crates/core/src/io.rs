//! JSON formats for specs, certificates, subgroups and matrices.

use std::path::Path;

use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::abelian::{FiniteAbelianGroup, GroupHom, Subgroup};
use crate::bicharacter::Bicharacter;
use crate::darboux::{replay_ops, standard_form, verify_classification, HeisenbergType, LoggedOp};
use crate::error::{Error, Result};
use crate::intertwiner::DenseMatrix;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct StandardOn {
    #[serde(rename = "A")]
    pub a: Vec<i64>,
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GroupSpec {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub factors: Option<Vec<i64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub root_order: Option<i64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub q: Option<Vec<Vec<i64>>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub standard_on: Option<StandardOn>,
}

impl GroupSpec {
    /// The reduced form of `e`: factors, `N` = exponent, exponents mod `N`.
    pub fn canonical(e: &Bicharacter) -> Self {
        GroupSpec {
            factors: Some(e.group().factors().to_vec()),
            root_order: Some(e.root_order()),
            q: Some(e.q().to_vec()),
            standard_on: None,
        }
    }

    pub fn resolve(&self) -> Result<Bicharacter> {
        if let Some(std) = &self.standard_on {
            if self.factors.is_some() || self.q.is_some() || self.root_order.is_some() {
                return Err(Error::Parse("standard_on excludes factors, root_order and q".into()));
            }
            return Ok(standard_form(&FiniteAbelianGroup::new(std.a.clone())?));
        }
        let factors = self.factors.clone().ok_or_else(|| Error::Parse("missing field `factors`".into()))?;
        let group = FiniteAbelianGroup::new(factors)?;
        let q = self.q.clone().ok_or_else(|| Error::Parse("missing field `q` (or use standard_on)".into()))?;
        let n = self.root_order.unwrap_or_else(|| group.exponent());
        Bicharacter::with_root_order(group, n, q)
    }
}

fn parse<T: for<'de> Deserialize<'de>>(text: &str) -> Result<T> {
    serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))
}

fn read(path: &Path) -> Result<String> {
    std::fs::read_to_string(path).map_err(|e| Error::Parse(format!("{}: {e}", path.display())))
}

pub fn load_spec_str(text: &str) -> Result<(FiniteAbelianGroup, Bicharacter)> {
    let e = parse::<GroupSpec>(text)?.resolve()?;
    Ok((e.group().clone(), e))
}

pub fn load_spec(path: &Path) -> Result<(FiniteAbelianGroup, Bicharacter)> {
    load_spec_str(&read(path)?)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FactorsJson {
    pub factors: Vec<i64>,
}

/// A replayable classification: `φ` as a matrix with one row per factor of
/// `K` and one column per generator of `A × Â`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Certificate {
    #[serde(rename = "A")]
    pub a: FactorsJson,
    pub phi: Vec<Vec<i64>>,
    pub ops: Vec<LoggedOp>,
    pub spec: GroupSpec,
}

impl Certificate {
    pub fn new(e: &Bicharacter, t: &HeisenbergType) -> Self {
        Certificate {
            a: FactorsJson { factors: t.a.factors().to_vec() },
            phi: t.phi.matrix().to_vec(),
            ops: t.op_log.clone(),
            spec: GroupSpec::canonical(e),
        }
    }

    pub fn load(path: &Path) -> Result<Self> {
        parse(&read(path)?)
    }

    pub fn to_type(&self) -> Result<(Bicharacter, HeisenbergType)> {
        let e = self.spec.resolve()?;
        let a = FiniteAbelianGroup::new(self.a.factors.clone())?;
        let phi = GroupHom::new(a.with_dual(), e.group().clone(), self.phi.clone())?;
        Ok((e, HeisenbergType { a, phi, op_log: self.ops.clone() }))
    }

    /// Re-checks `φ` on all generator pairs and replays the op log.
    pub fn replay(&self) -> Result<std::result::Result<(), String>> {
        let (e, t) = self.to_type()?;
        if let Err(c) = verify_classification(&e, &t) {
            return Ok(Err(c.to_string()));
        }
        Ok(replay_ops(&e, &t.op_log).map_err(|err| err.to_string()))
    }
}

pub fn subgroup_json(m: &Subgroup) -> Value {
    json!({ "basis": m.basis() })
}

/// `{"basis": [...]}` or a bare list of generators.
pub fn parse_subgroup(parent: &FiniteAbelianGroup, text: &str) -> Result<Subgroup> {
    let v: Value = parse(text)?;
    let rows = match &v {
        Value::Object(map) => map.get("basis").cloned().ok_or_else(|| Error::Parse("expected `basis`".into()))?,
        _ => v.clone(),
    };
    let gens: Vec<Vec<i64>> = serde_json::from_value(rows).map_err(|e| Error::Parse(e.to_string()))?;
    if let Some(bad) = gens.iter().find(|g| g.len() != parent.rank()) {
        return Err(Error::InvalidElement(format!("{bad:?} does not have {} coordinates", parent.rank())));
    }
    Ok(Subgroup::from_generators(parent, &gens))
}

pub fn dense_json(m: &DenseMatrix<f64>) -> Value {
    Value::Array(m.iter().map(|row| Value::Array(row.iter().map(|z| json!([z.re, z.im])).collect())).collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::darboux::{classify, random_nondegenerate};

    #[test]
    fn standard_shorthand() {
        let (g, e) = load_spec_str(r#"{"standard_on":{"A":[2]}}"#).unwrap();
        assert_eq!(g.factors(), &[2, 2]);
        assert_eq!(e.q(), &[vec![0, 1], vec![1, 0]]);
    }

    #[test]
    fn degenerate_loads() {
        let (_, e) = load_spec_str(r#"{"factors":[2,2],"q":[[0,0],[0,0]]}"#).unwrap();
        assert!(matches!(classify(&e), Err(Error::Degenerate { radical_order: 4 })));
    }

    #[test]
    fn rejections() {
        let diag = load_spec_str(r#"{"factors":[2],"q":[[1]]}"#).unwrap_err();
        assert!(diag.to_string().contains("diagonal"), "{diag}");
        let syntax = load_spec_str("{\"factors\":[2],\n \"q\":[[0]").unwrap_err();
        assert!(syntax.to_string().contains("line 2"), "{syntax}");
        assert!(matches!(load_spec_str(r#"{"factors":[2,4],"q":[[0,0],[0,0]]}"#), Err(Error::InvalidGroup(_))));
        assert!(matches!(load_spec_str(r#"{"factors":[2]}"#), Err(Error::Parse(_))));
        assert!(matches!(load_spec_str(r#"{"factors":[2],"q":[[0]],"extra":1}"#), Err(Error::Parse(_))));
    }

    #[test]
    fn root_order_rescaling() {
        let (_, e) = load_spec_str(r#"{"factors":[2,2],"root_order":6,"q":[[0,3],[3,0]]}"#).unwrap();
        assert_eq!(e.q(), &[vec![0, 1], vec![1, 0]]);
        assert_eq!(GroupSpec::canonical(&e).root_order, Some(2));
    }

    #[test]
    fn certificate_round_trip() {
        for seed in 0..10 {
            let a = FiniteAbelianGroup::new(vec![12, 2]).unwrap();
            let e = random_nondegenerate(&a, seed);
            let cert = Certificate::new(&e, &classify(&e).unwrap());
            let text = serde_json::to_string(&cert).unwrap();
            let back: Certificate = serde_json::from_str(&text).unwrap();
            assert_eq!(back, cert);
            assert_eq!(back.replay().unwrap(), Ok(()));
        }
    }

    #[test]
    fn tampered_certificate_fails() {
        let e = random_nondegenerate(&FiniteAbelianGroup::new(vec![4]).unwrap(), 3);
        let mut cert = Certificate::new(&e, &classify(&e).unwrap());
        cert.phi[0][0] = (cert.phi[0][0] + 2) % 4;
        assert!(!matches!(cert.replay(), Ok(Ok(()))));
    }

    #[test]
    fn op_json_shape() {
        let e = random_nondegenerate(&FiniteAbelianGroup::new(vec![6]).unwrap(), 1);
        let cert = Certificate::new(&e, &classify(&e).unwrap());
        let v = serde_json::to_value(&cert).unwrap();
        assert!(v["A"]["factors"].is_array());
        for op in v["ops"].as_array().unwrap() {
            assert!(["beta", "pi", "alpha"].contains(&op["kind"].as_str().unwrap()));
            assert!(op["prime"].is_i64());
        }
    }

    #[test]
    fn subgroup_inputs() {
        let k = FiniteAbelianGroup::new(vec![4, 4]).unwrap();
        let m = parse_subgroup(&k, "[[2,0],[0,2]]").unwrap();
        assert_eq!(m.order(), 4);
        let again = parse_subgroup(&k, &subgroup_json(&m).to_string()).unwrap();
        assert_eq!(again, m);
        assert!(parse_subgroup(&k, "[[1]]").is_err());
    }
}
