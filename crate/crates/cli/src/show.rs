//! Single-point JSON report.

use std::io::{self, Write};

use hpqfim::hybrid::evaluate;
use hpqfim::matlib::{schur_complement, PSD_TOL};
use hpqfim::measure::{
    classical_fim, classical_hybrid_chain, data_processing_check, empirical_hybrid_risk,
    outcome_dist,
};
use hpqfim::states::von_neumann_entropy;
use hpqfim::{BlockSym, EvalPoint, InverseForm, Povm, RectMat, SymMat};
use serde::Serialize;
use serde_json::ser::{Formatter, PrettyFormatter};
use serde_json::{json, Value};

use crate::config::{parse_number, SweepConfig};
use crate::error::{CliError, CliResult};

/// Pretty JSON with every float written with 17 significant digits.
struct SignificantDigits<'a>(PrettyFormatter<'a>);

impl Formatter for SignificantDigits<'_> {
    fn write_f64<W: ?Sized + Write>(&mut self, writer: &mut W, value: f64) -> io::Result<()> {
        write!(writer, "{value:.16e}")
    }

    fn begin_array<W: ?Sized + Write>(&mut self, writer: &mut W) -> io::Result<()> {
        self.0.begin_array(writer)
    }

    fn end_array<W: ?Sized + Write>(&mut self, writer: &mut W) -> io::Result<()> {
        self.0.end_array(writer)
    }

    fn begin_array_value<W: ?Sized + Write>(&mut self, writer: &mut W, first: bool) -> io::Result<()> {
        self.0.begin_array_value(writer, first)
    }

    fn end_array_value<W: ?Sized + Write>(&mut self, writer: &mut W) -> io::Result<()> {
        self.0.end_array_value(writer)
    }

    fn begin_object<W: ?Sized + Write>(&mut self, writer: &mut W) -> io::Result<()> {
        self.0.begin_object(writer)
    }

    fn end_object<W: ?Sized + Write>(&mut self, writer: &mut W) -> io::Result<()> {
        self.0.end_object(writer)
    }

    fn begin_object_key<W: ?Sized + Write>(&mut self, writer: &mut W, first: bool) -> io::Result<()> {
        self.0.begin_object_key(writer, first)
    }

    fn begin_object_value<W: ?Sized + Write>(&mut self, writer: &mut W) -> io::Result<()> {
        self.0.begin_object_value(writer)
    }

    fn end_object_value<W: ?Sized + Write>(&mut self, writer: &mut W) -> io::Result<()> {
        self.0.end_object_value(writer)
    }
}

pub fn to_json_string(value: &Value) -> CliResult<String> {
    let mut buf = Vec::new();
    let mut ser = serde_json::Serializer::with_formatter(&mut buf, SignificantDigits(PrettyFormatter::new()));
    value
        .serialize(&mut ser)
        .map_err(|e| CliError::Config(format!("JSON encoding failed: {e}")))?;
    buf.push(b'\n');
    String::from_utf8(buf).map_err(|e| CliError::Config(e.to_string()))
}

/// Finite floats as numbers, infinities as the string `"inf"`.
fn num(v: f64) -> Value {
    if v.is_finite() {
        json!(v)
    } else if v > 0.0 {
        json!("inf")
    } else {
        json!("-inf")
    }
}

fn sym(m: &SymMat) -> Value {
    Value::Array(
        m.rows()
            .into_iter()
            .map(|row| Value::Array(row.into_iter().map(num).collect()))
            .collect(),
    )
}

fn rect(m: &RectMat) -> Value {
    Value::Array(
        (0..m.rows())
            .map(|i| Value::Array((0..m.cols()).map(|j| num(m.get(i, j))).collect()))
            .collect(),
    )
}

fn blocks(b: &BlockSym) -> Value {
    json!({ "J_II": sym(&b.ii), "J_IN": rect(&b.in_), "J_NN": sym(&b.nn) })
}

fn inverse(f: &InverseForm) -> Value {
    match f {
        InverseForm::Finite(m) => sym(m),
        InverseForm::Infinite => json!("inf"),
    }
}

pub fn parse_values(text: &str, what: &str) -> CliResult<Vec<f64>> {
    text.split(',')
        .map(|s| {
            parse_number(s).ok_or_else(|| CliError::Config(format!("{what}: `{}` is not a number", s.trim())))
        })
        .collect()
}

/// Builds the report for `theta_i` (and the pointwise QFIM when `theta_n` is
/// given). Out-of-domain points are [`CliError::Domain`].
pub fn show_point(cfg: &SweepConfig, theta_i: &[f64], theta_n: Option<&[f64]>) -> CliResult<Value> {
    let model = &cfg.model;
    if theta_i.len() != model.d_i() {
        return Err(CliError::Config(format!(
            "--theta-i needs {} value(s) for {}",
            model.d_i(),
            model.kind()
        )));
    }
    let names = model.param_names();
    let theta_i = theta_i
        .iter()
        .zip(model.domain_i())
        .enumerate()
        .map(|(k, (x, d))| d.admit(names[k], *x).map_err(CliError::Domain))
        .collect::<CliResult<Vec<f64>>>()?;

    let pointwise = match theta_n {
        Some(tn) => {
            if tn.len() != model.d_n() {
                return Err(CliError::Config(format!(
                    "--theta-n needs {} value(s) for {}",
                    model.d_n(),
                    model.kind()
                )));
            }
            let p = model
                .admit(&EvalPoint::new(theta_i.clone(), tn.to_vec()))
                .map_err(CliError::Domain)?;
            let j = model.qfim(&p)?;
            let mut doc = blocks(&j);
            doc["theta_N"] = Value::Array(p.theta_n.iter().copied().map(num).collect());
            doc["J"] = sym(&j.assemble());
            doc["J_I_given_N"] = sym(&schur_complement(&j)?);
            doc["entropy_nats"] = num(von_neumann_entropy(&model.bloch(&p)?)?);
            doc
        }
        None => Value::Null,
    };

    let averaged = match (&cfg.prior, &cfg.rule) {
        (Some(prior), Some(rule)) => {
            let rep = evaluate(model, prior, rule, &theta_i, &cfg.weight).map_err(|source| {
                CliError::Numerical {
                    theta: theta_i.clone(),
                    source,
                }
            })?;
            json!({
                "prior": prior.kind().name(),
                "J_pi": sym(&rep.j_pi),
                "averaged": blocks(&rep.avg_blocks),
                "hpqfim": sym(&rep.hpqfim),
                "surrogate_low": sym(&rep.surrogate_low),
                "surrogate_high": sym(&rep.surrogate_high),
                "inv_L": inverse(&rep.inv_l),
                "inv_M": inverse(&rep.inv_m),
                "inv_U": inverse(&rep.inv_u),
                "risk_bound": num(rep.risk_bound),
                "pinv_nodes": rep.pinv_nodes,
                "hpqfim_pinv": rep.hpqfim_pinv,
            })
        }
        _ => Value::Null,
    };

    let measurement = match &cfg.povm {
        Some(povm) => measurement_doc(cfg, povm, &theta_i, theta_n)?,
        None => Value::Null,
    };

    if pointwise.is_null() && averaged.is_null() {
        return Err(CliError::Config(
            "show needs --theta-n or a prior in the config".into(),
        ));
    }
    Ok(json!({
        "model": model.kind().name(),
        "parameters": model.param_names(),
        "r": if model.kind() == hpqfim::ModelKind::Direction { Value::Null } else { num(model.r()) },
        "phi": if model.kind() == hpqfim::ModelKind::Direction { Value::Null } else { num(model.phi()) },
        "nuisance_domain": model.domain_n()[0].to_string(),
        "theta_I": Value::Array(theta_i.iter().copied().map(num).collect()),
        "pointwise": pointwise,
        "hybrid": averaged,
        "measurement": measurement,
    }))
}

fn measurement_doc(
    cfg: &SweepConfig,
    povm: &Povm,
    theta_i: &[f64],
    theta_n: Option<&[f64]>,
) -> CliResult<Value> {
    let model = &cfg.model;
    let mut doc = json!({ "outcomes": povm.len() });
    if let Some(tn) = theta_n {
        let p = EvalPoint::new(theta_i.to_vec(), tn.to_vec());
        doc["probabilities"] = json!(outcome_dist(povm, &model.bloch(&p)?)?.probs);
        doc["classical_fim"] = sym(&classical_fim(povm, model, &p)?.assemble());
        let dp = data_processing_check(povm, model, &p, PSD_TOL)?;
        doc["data_processing"] = json!({ "holds": dp.holds, "min_eigenvalue": num(dp.min_eig) });
    }
    if let (Some(prior), Some(rule)) = (&cfg.prior, &cfg.rule) {
        let numerical = |source| CliError::Numerical {
            theta: theta_i.to_vec(),
            source,
        };
        let chain = classical_hybrid_chain(povm, model, prior, rule, theta_i, PSD_TOL)
            .map_err(numerical)?;
        doc["chain"] = json!({
            "verdict": format!("{:?}", chain.verdict).to_lowercase(),
            "classical": inverse(&chain.classical),
            "quantum": inverse(&chain.quantum),
            "min_eigenvalue": chain.min_eig.map_or(Value::Null, num),
        });
        doc["empirical_risk"] =
            match empirical_hybrid_risk(povm, model, prior, theta_i, cfg.samples, cfg.seed) {
                Ok(r) => json!({
                    "estimate": num(r.estimate),
                    "std_error": num(r.std_error),
                    "n_samples": r.n_samples,
                    "seed": cfg.seed,
                }),
                Err(e) => json!({ "error": e.to_string() }),
            };
    }
    Ok(doc)
}
