//! JSON documents read and written by the command-line tool.

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::bounds::BoundCertificate;
use crate::codebook::{BuildParams, Codebook, CodebookEntry, ReproReport};
use crate::error::{Error, Result};
use crate::exact::{snap, Rational};
use crate::lattice::{min_distance, packed_len, QuadraticForm, UnimodularMatrix};
use crate::perfect::PerfectFormRecord;
use crate::precoder::{realify_matrix, spectrum_of, ChannelSpectrum, PrecoderResult};

/// Format version stamped into every document.
pub const SPEC_VERSION: &str = "1.0";

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct CodebookDoc {
    spec_version: String,
    dim: usize,
    entries: Vec<EntryDoc>,
    build_params: ParamsDoc,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct EntryDoc {
    gram_num: Vec<i64>,
    gram_den: Vec<i64>,
    gen: Vec<f64>,
    source: String,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct ParamsDoc {
    trace_bound: f64,
    s1_over_detroot_max: f64,
}

fn input<E: std::fmt::Display>(e: E) -> Error {
    Error::Input(e.to_string())
}

fn narrow(x: i128) -> Result<i64> {
    i64::try_from(x).map_err(|_| Error::Overflow)
}

/// Canonical text of a codebook. Rationals are stored as numerator/denominator arrays in packed
/// upper-triangle order and generators row-major.
pub fn codebook_to_json(cb: &Codebook) -> Result<String> {
    let entries = cb
        .entries
        .iter()
        .map(|e| {
            let num = e.form.packed().iter().map(|r| narrow(*r.numer())).collect::<Result<_>>()?;
            let den = e.form.packed().iter().map(|r| narrow(*r.denom())).collect::<Result<_>>()?;
            let gen = (0..cb.dim).flat_map(|i| (0..cb.dim).map(move |j| (i, j))).map(|(i, j)| e.gen[(i, j)]).collect();
            Ok(EntryDoc { gram_num: num, gram_den: den, gen, source: e.source.clone() })
        })
        .collect::<Result<_>>()?;
    let doc = CodebookDoc {
        spec_version: SPEC_VERSION.into(),
        dim: cb.dim,
        entries,
        build_params: ParamsDoc {
            trace_bound: cb.build_params.trace_bound,
            s1_over_detroot_max: cb.build_params.s1_over_detroot_max,
        },
    };
    let mut text = serde_json::to_string_pretty(&doc).map_err(input)?;
    text.push('\n');
    Ok(text)
}

/// Parses a codebook and checks that every entry has minimum exactly 1.
pub fn codebook_from_json(text: &str) -> Result<Codebook> {
    let doc: CodebookDoc = serde_json::from_str(text).map_err(input)?;
    let n = doc.dim;
    if n == 0 {
        return Err(Error::InvalidDimension(0));
    }
    let mut entries = Vec::with_capacity(doc.entries.len());
    for (k, e) in doc.entries.into_iter().enumerate() {
        let len = packed_len(n);
        if e.gram_num.len() != len || e.gram_den.len() != len {
            return Err(Error::DimError { expected: len, got: e.gram_num.len().max(e.gram_den.len()) });
        }
        if e.gen.len() != n * n {
            return Err(Error::DimError { expected: n * n, got: e.gen.len() });
        }
        if e.gram_den.contains(&0) {
            return Err(Error::Input(format!("entry {k}: zero denominator")));
        }
        let packed = e.gram_num.iter().zip(&e.gram_den).map(|(&p, &q)| Rational::new(p.into(), q.into())).collect();
        let form = QuadraticForm::from_packed(n, packed)?;
        let lambda = min_distance(&form)?.form_min;
        if lambda != Rational::from_integer(1) {
            return Err(Error::Input(format!("entry {k}: minimum is {lambda}, expected 1")));
        }
        let gen = DMatrix::from_row_slice(n, n, &e.gen);
        entries.push(CodebookEntry { form, gen, source: e.source });
    }
    Ok(Codebook {
        dim: n,
        entries,
        build_params: BuildParams {
            trace_bound: doc.build_params.trace_bound,
            s1_over_detroot_max: doc.build_params.s1_over_detroot_max,
        },
    })
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct ComplexDoc {
    re: Vec<Vec<f64>>,
    im: Vec<Vec<f64>>,
}

#[derive(Debug, Deserialize)]
#[serde(untagged)]
enum ChannelDoc {
    Spectrum { spectrum: Vec<f64> },
    Complex { complex: ComplexDoc },
    Real { real: Vec<Vec<f64>> },
}

fn square(rows: &[Vec<f64>]) -> Result<DMatrix<f64>> {
    let n = rows.len();
    if n == 0 {
        return Err(Error::InvalidDimension(0));
    }
    if let Some(r) = rows.iter().find(|r| r.len() != n) {
        return Err(Error::DimError { expected: n, got: r.len() });
    }
    Ok(DMatrix::from_fn(n, n, |i, j| rows[i][j]))
}

/// Reads a channel given as `{"spectrum": [...]}`, `{"real": [[...]]}` or
/// `{"complex": {"re": [[...]], "im": [[...]]}}`. A complex channel is realified first, so its
/// spectrum has every singular value twice.
pub fn channel_from_json(text: &str) -> Result<ChannelSpectrum> {
    let doc: ChannelDoc = serde_json::from_str(text).map_err(input)?;
    match doc {
        ChannelDoc::Spectrum { spectrum } => ChannelSpectrum::new(spectrum),
        ChannelDoc::Real { real } => Ok(spectrum_of(&square(&real)?)?.0),
        ChannelDoc::Complex { complex } => {
            let re = square(&complex.re)?;
            let im = square(&complex.im)?;
            if re.shape() != im.shape() {
                return Err(Error::DimError { expected: re.nrows(), got: im.nrows() });
            }
            let h = DMatrix::from_fn(re.nrows(), re.ncols(), |i, j| Complex64::new(re[(i, j)], im[(i, j)]));
            Ok(spectrum_of(&realify_matrix(&h))?.0)
        }
    }
}

fn parse_entry(v: &Value) -> Result<Rational> {
    match v {
        Value::Number(x) => {
            if let Some(i) = x.as_i64() {
                Ok(Rational::from_integer(i.into()))
            } else {
                snap(x.as_f64().ok_or_else(|| Error::Input(format!("bad number {x}")))?)
            }
        }
        Value::String(s) => {
            let r: Rational = s.trim().parse().map_err(|_| Error::Input(format!("bad rational {s:?}")))?;
            Ok(r)
        }
        other => Err(Error::Input(format!("expected a number or \"p/q\" string, got {other}"))),
    }
}

/// Reads `{"gram": [[...]]}` with entries given as numbers or `"p/q"` strings.
pub fn gram_from_json(text: &str) -> Result<QuadraticForm> {
    let doc: Value = serde_json::from_str(text).map_err(input)?;
    let rows = doc
        .get("gram")
        .and_then(Value::as_array)
        .ok_or_else(|| Error::Input("expected an object with a \"gram\" array".into()))?;
    let rows: Vec<Vec<Rational>> = rows
        .iter()
        .map(|r| {
            r.as_array()
                .ok_or_else(|| Error::Input("gram rows must be arrays".into()))?
                .iter()
                .map(parse_entry)
                .collect()
        })
        .collect::<Result<_>>()?;
    QuadraticForm::from_rows(&rows)
}

fn rational_text(r: &Rational) -> String {
    r.to_string()
}

fn form_rows(g: &QuadraticForm) -> Value {
    json!(g.to_rows().iter().map(|r| r.iter().map(rational_text).collect::<Vec<_>>()).collect::<Vec<_>>())
}

fn matrix_rows(m: &DMatrix<f64>) -> Value {
    json!((0..m.nrows()).map(|i| m.row(i).iter().copied().collect::<Vec<_>>()).collect::<Vec<_>>())
}

fn int_rows(z: &UnimodularMatrix) -> Value {
    json!(z.rows())
}

fn render(v: Value) -> Result<String> {
    let mut text = serde_json::to_string_pretty(&v).map_err(input)?;
    text.push('\n');
    Ok(text)
}

/// Perfect forms with their minimal vectors and isometry class labels.
pub fn forms_to_json(
    dim: usize,
    trace_bound: &Rational,
    records: &[PerfectFormRecord],
    classes: &[Vec<usize>],
) -> Result<String> {
    let mut label = vec![0; records.len()];
    for (c, members) in classes.iter().enumerate() {
        for &m in members {
            label[m] = c;
        }
    }
    let forms: Vec<Value> = records
        .iter()
        .zip(&label)
        .map(|(r, c)| {
            json!({
                "gram": form_rows(&r.form),
                "trace": rational_text(&r.trace),
                "det": rational_text(&r.form.det()),
                "min_vectors": r.min_vectors.vectors,
                "class": c,
            })
        })
        .collect();
    render(json!({
        "spec_version": SPEC_VERSION,
        "dim": dim,
        "trace_bound": rational_text(trace_bound),
        "class_count": classes.len(),
        "forms": forms,
    }))
}

pub fn precoder_to_json(kind: &str, s: &ChannelSpectrum, res: &PrecoderResult) -> Result<String> {
    render(json!({
        "spec_version": SPEC_VERSION,
        "method": kind,
        "spectrum": s.values(),
        "precoder": matrix_rows(&res.f),
        "power": res.power,
        "dmin2": res.dmin2,
        "normalized_dmin2": res.normalized_dmin2,
        "received_gram": res.source_form.as_ref().map(form_rows),
        "lower_bound": res.bounds.0,
        "upper_bound": res.bounds.1,
    }))
}

pub fn reduced_to_json(
    input: &QuadraticForm,
    reduced: &QuadraticForm,
    z: &UnimodularMatrix,
    lambda: &Rational,
) -> Result<String> {
    render(json!({
        "spec_version": SPEC_VERSION,
        "input": form_rows(input),
        "reduced": form_rows(reduced),
        "basis_change": int_rows(z),
        "minimum": rational_text(lambda),
    }))
}

pub fn certificate_to_json(
    s: &ChannelSpectrum,
    winner: &QuadraticForm,
    power: f64,
    c: &BoundCertificate,
) -> Result<String> {
    render(json!({
        "spec_version": SPEC_VERSION,
        "spectrum": s.values(),
        "optimal_gram": form_rows(winner),
        "optimal_power": power,
        "lower_energy": c.lower_energy,
        "upper_energy": c.upper_energy,
        "gram_trace_ub": c.gram_trace_ub,
        "z_trace_ub": c.z_trace_ub,
        "ratio": c.ratio,
    }))
}

pub fn repro_to_json(r: &ReproReport) -> Result<String> {
    let channels: Vec<Value> = r
        .channels
        .iter()
        .map(|c| {
            json!({
                "spectrum": c.spectrum,
                "winner": c.winner,
                "objective_a4": c.objective_a4,
                "objective_d4": c.objective_d4,
                "relative_margin": c.relative_margin,
                "gram_trace_ub": c.gram_trace_ub,
                "upper_energy": c.upper_energy,
            })
        })
        .collect();
    render(json!({
        "spec_version": SPEC_VERSION,
        "lattices": ["A4", "D4"],
        "lambda1": r.lambda1.iter().map(rational_text).collect::<Vec<_>>(),
        "lambda2": r.lambda2.iter().map(rational_text).collect::<Vec<_>>(),
        "min_vector_pairs": r.min_vector_pairs,
        "basis_changes": r.basis_changes,
        "channels": channels,
    }))
}
