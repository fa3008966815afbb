//! JSON formats.
//!
//! Matrices are `{"rows": r, "cols": c, "data": [[re, im], ...]}` in row-major
//! order. Channels, ensembles and code specs nest that format. Non-finite
//! numbers in reports are written as the strings `"inf"`, `"-inf"` and `"nan"`.

use std::collections::BTreeMap;
use std::path::Path;

use serde::{Deserialize, Serialize};
use serde_json::{json, Map, Value};

use crate::channels::{DensityMatrix, Ensemble, KrausChannel};
use crate::converse::{BoundReport, ChainStep, CodeSpec};
use crate::linalg::{ComplexMatrix, Mat};
use crate::{Complex64, Error, Result};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MatrixJson {
    pub rows: usize,
    pub cols: usize,
    pub data: Vec<[f64; 2]>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ChannelJson {
    pub dim_in: usize,
    pub dim_out: usize,
    pub kraus: Vec<MatrixJson>,
    pub trace_preserving: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EnsembleJson {
    pub probs: Vec<f64>,
    pub states: Vec<MatrixJson>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CodeSpecJson {
    pub n: usize,
    #[serde(rename = "R")]
    pub rate: f64,
    pub ensemble: EnsembleJson,
    pub seed: u64,
}

fn parse_err(e: serde_json::Error) -> Error {
    Error::Parse(e.to_string())
}

pub fn matrix_to_json(m: &Mat) -> MatrixJson {
    let data = ComplexMatrix::new(m.clone())
        .map(|cm| cm.row_major())
        .unwrap_or_default()
        .iter()
        .map(|z| [z.re, z.im])
        .collect();
    MatrixJson {
        rows: m.nrows(),
        cols: m.ncols(),
        data,
    }
}

pub fn matrix_from_json(j: &MatrixJson) -> Result<Mat> {
    let data: Vec<Complex64> = j.data.iter().map(|[re, im]| Complex64::new(*re, *im)).collect();
    Ok(ComplexMatrix::from_row_major(j.rows, j.cols, &data)?.into_mat())
}

pub fn density_to_json(rho: &DensityMatrix) -> MatrixJson {
    matrix_to_json(rho.as_mat())
}

pub fn density_from_json(j: &MatrixJson) -> Result<DensityMatrix> {
    DensityMatrix::from_mat(matrix_from_json(j)?)
}

pub fn channel_to_json(ch: &KrausChannel) -> ChannelJson {
    ChannelJson {
        dim_in: ch.dim_in(),
        dim_out: ch.dim_out(),
        kraus: ch.kraus().iter().map(matrix_to_json).collect(),
        trace_preserving: ch.is_trace_preserving(),
    }
}

/// Builds the map and checks the declared `trace_preserving` flag against it.
pub fn channel_from_json(j: &ChannelJson) -> Result<KrausChannel> {
    let kraus = j.kraus.iter().map(matrix_from_json).collect::<Result<Vec<_>>>()?;
    let ch = KrausChannel::new(j.dim_in, j.dim_out, kraus)?;
    if j.trace_preserving && !ch.is_trace_preserving() {
        return Err(Error::NotTracePreserving(ch.tp_defect()));
    }
    Ok(ch)
}

pub fn ensemble_to_json(e: &Ensemble) -> EnsembleJson {
    EnsembleJson {
        probs: e.probs().to_vec(),
        states: e.states().iter().map(density_to_json).collect(),
    }
}

pub fn ensemble_from_json(j: &EnsembleJson) -> Result<Ensemble> {
    let states = j.states.iter().map(density_from_json).collect::<Result<Vec<_>>>()?;
    Ensemble::new(j.probs.clone(), states)
}

pub fn code_spec_to_json(s: &CodeSpec) -> CodeSpecJson {
    CodeSpecJson {
        n: s.n,
        rate: s.rate,
        ensemble: ensemble_to_json(&s.ensemble),
        seed: s.seed,
    }
}

pub fn code_spec_from_json(j: &CodeSpecJson) -> Result<CodeSpec> {
    CodeSpec::new(j.n, j.rate, ensemble_from_json(&j.ensemble)?, j.seed)
}

pub fn parse_matrix(s: &str) -> Result<Mat> {
    matrix_from_json(&serde_json::from_str(s).map_err(parse_err)?)
}

pub fn parse_density(s: &str) -> Result<DensityMatrix> {
    density_from_json(&serde_json::from_str(s).map_err(parse_err)?)
}

pub fn parse_channel(s: &str) -> Result<KrausChannel> {
    channel_from_json(&serde_json::from_str(s).map_err(parse_err)?)
}

pub fn parse_ensemble(s: &str) -> Result<Ensemble> {
    ensemble_from_json(&serde_json::from_str(s).map_err(parse_err)?)
}

pub fn parse_code_spec(s: &str) -> Result<CodeSpec> {
    code_spec_from_json(&serde_json::from_str(s).map_err(parse_err)?)
}

/// Reads a file to a string, reporting failures as parse errors.
pub fn read_text(path: &Path) -> Result<String> {
    std::fs::read_to_string(path).map_err(|e| Error::Parse(format!("{}: {e}", path.display())))
}

pub fn to_pretty<T: Serialize>(value: &T) -> String {
    serde_json::to_string_pretty(value).expect("JSON values always serialize")
}

/// A number as JSON, with non-finite values as strings.
pub fn num(x: f64) -> Value {
    if x.is_nan() {
        json!("nan")
    } else if x == f64::INFINITY {
        json!("inf")
    } else if x == f64::NEG_INFINITY {
        json!("-inf")
    } else {
        json!(x)
    }
}

/// Inverse of [`num`].
pub fn parse_num(v: &Value) -> Result<f64> {
    match v {
        Value::Number(n) => n.as_f64().ok_or_else(|| Error::Parse(format!("{n} is not a float"))),
        Value::String(s) => match s.as_str() {
            "inf" => Ok(f64::INFINITY),
            "-inf" => Ok(f64::NEG_INFINITY),
            "nan" => Ok(f64::NAN),
            other => Err(Error::Parse(format!("expected a number, found \"{other}\""))),
        },
        other => Err(Error::Parse(format!("expected a number, found {other}"))),
    }
}

fn field<'a>(obj: &'a Map<String, Value>, key: &str) -> Result<&'a Value> {
    obj.get(key).ok_or_else(|| Error::Parse(format!("missing field \"{key}\"")))
}

fn as_object(v: &Value) -> Result<&Map<String, Value>> {
    v.as_object().ok_or_else(|| Error::Parse("expected an object".into()))
}

fn as_array(v: &Value) -> Result<&Vec<Value>> {
    v.as_array().ok_or_else(|| Error::Parse("expected an array".into()))
}

fn as_str(v: &Value) -> Result<&str> {
    v.as_str().ok_or_else(|| Error::Parse("expected a string".into()))
}

pub fn bound_report_to_json(r: &BoundReport) -> Value {
    let components: Map<String, Value> = r.components.iter().map(|(k, v)| (k.clone(), num(*v))).collect();
    let chain: Vec<Value> = r
        .chain
        .iter()
        .map(|s| json!({"name": s.name, "lhs": num(s.lhs), "rhs": num(s.rhs), "holds": s.holds}))
        .collect();
    json!({
        "variant": r.variant,
        "n": r.n,
        "rate": num(r.rate),
        "p_succ_bound": num(r.p_succ_bound),
        "alpha_used": num(r.alpha_used),
        "exponent": num(r.exponent),
        "components": components,
        "flags": r.flags,
        "chain": chain,
    })
}

pub fn bound_report_from_json(v: &Value) -> Result<BoundReport> {
    let o = as_object(v)?;
    let components = as_object(field(o, "components")?)?
        .iter()
        .map(|(k, v)| Ok((k.clone(), parse_num(v)?)))
        .collect::<Result<BTreeMap<_, _>>>()?;
    let flags = as_array(field(o, "flags")?)?
        .iter()
        .map(|f| as_str(f).map(str::to_string))
        .collect::<Result<Vec<_>>>()?;
    let chain = as_array(field(o, "chain")?)?
        .iter()
        .map(|s| {
            let s = as_object(s)?;
            Ok(ChainStep {
                name: as_str(field(s, "name")?)?.to_string(),
                lhs: parse_num(field(s, "lhs")?)?,
                rhs: parse_num(field(s, "rhs")?)?,
                holds: field(s, "holds")?
                    .as_bool()
                    .ok_or_else(|| Error::Parse("\"holds\" must be a boolean".into()))?,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(BoundReport {
        variant: as_str(field(o, "variant")?)?.to_string(),
        n: field(o, "n")?
            .as_u64()
            .ok_or_else(|| Error::Parse("\"n\" must be a non-negative integer".into()))? as usize,
        rate: parse_num(field(o, "rate")?)?,
        p_succ_bound: parse_num(field(o, "p_succ_bound")?)?,
        alpha_used: parse_num(field(o, "alpha_used")?)?,
        exponent: parse_num(field(o, "exponent")?)?,
        components,
        flags,
        chain,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::channels::{depolarizing, random_channel, random_density, rng_from_seed};
    use crate::converse::generic_bound;

    #[test]
    fn matrix_round_trip_is_exact() {
        let mut rng = rng_from_seed(1);
        let rho = random_density(3, 3, &mut rng);
        let text = to_pretty(&density_to_json(&rho));
        let back = parse_density(&text).unwrap();
        assert_eq!(back.as_mat(), rho.as_mat());
        assert_eq!(to_pretty(&density_to_json(&back)), text);
    }

    #[test]
    fn matrix_format_is_row_major() {
        let m = parse_matrix(r#"{"rows": 2, "cols": 2, "data": [[1,0],[0,2],[3,0],[4,-1]]}"#).unwrap();
        assert_eq!(m[(0, 1)], Complex64::new(0.0, 2.0));
        assert_eq!(m[(1, 0)], Complex64::new(3.0, 0.0));
        assert!(parse_matrix(r#"{"rows": 2, "cols": 2, "data": [[1,0]]}"#).is_err());
        assert!(matches!(parse_matrix("{"), Err(Error::Parse(_))));
    }

    #[test]
    fn channel_round_trip() {
        let ch = random_channel(2, 3, 2, &mut rng_from_seed(2)).unwrap();
        let text = to_pretty(&channel_to_json(&ch));
        let back = parse_channel(&text).unwrap();
        assert_eq!(back.kraus(), ch.kraus());
        assert_eq!(to_pretty(&channel_to_json(&back)), text);
    }

    #[test]
    fn declared_trace_preservation_is_checked() {
        let mut j = channel_to_json(&depolarizing(2, 0.3).unwrap());
        j.kraus[0].data[0][0] *= 1.5;
        assert!(matches!(channel_from_json(&j), Err(Error::NotTracePreserving(_))));
        j.trace_preserving = false;
        assert!(!channel_from_json(&j).unwrap().is_trace_preserving());
    }

    #[test]
    fn code_spec_uses_capital_r() {
        let text = r#"{"n": 2, "R": 1.0, "seed": 5,
            "ensemble": {"probs": [0.5, 0.5], "states": [
                {"rows": 2, "cols": 2, "data": [[1,0],[0,0],[0,0],[0,0]]},
                {"rows": 2, "cols": 2, "data": [[0,0],[0,0],[0,0],[1,0]]}]}}"#;
        let spec = parse_code_spec(text).unwrap();
        assert_eq!((spec.n, spec.rate, spec.seed), (2, 1.0, 5));
        assert_eq!(spec.message_count(), 4);
        let again = parse_code_spec(&to_pretty(&code_spec_to_json(&spec))).unwrap();
        assert_eq!(again, spec);
    }

    #[test]
    fn infinity_is_a_string() {
        assert_eq!(num(f64::INFINITY), json!("inf"));
        assert_eq!(parse_num(&json!("inf")).unwrap(), f64::INFINITY);
        assert_eq!(parse_num(&json!(0.25)).unwrap(), 0.25);
        assert!(parse_num(&json!("big")).is_err());
    }

    #[test]
    fn bound_report_round_trip() {
        let mut r = generic_bound(7, 1.3, 6.1, 1.7).unwrap();
        r.components.insert("weird".into(), f64::INFINITY);
        let text = serde_json::to_string(&bound_report_to_json(&r)).unwrap();
        let back = bound_report_from_json(&serde_json::from_str(&text).unwrap()).unwrap();
        assert_eq!(back, r);
        assert_eq!(serde_json::to_string(&bound_report_to_json(&back)).unwrap(), text);
    }
}
