//! Flat `key = value` run configuration.
//!
//! Lines are `dotted.key = value`; `#` starts a comment. Numbers accept
//! decimal literals and products/quotients involving `pi`, e.g. `pi/2`,
//! `3*pi/4`, `-0.25`.

use std::collections::BTreeMap;
use std::f64::consts::{FRAC_PI_4, PI};
use std::path::{Path, PathBuf};

use hpqfim::measure::MIN_SAMPLES;
use hpqfim::{
    Interval, ModelKind, ModelSpec, NuisancePrior, Povm, PovmElement, PriorKind, QuadratureRule,
    Scheme, SymMat, WeightMatrix,
};

use crate::error::{CliError, CliResult};

pub const KNOWN_KEYS: &[&str] = &[
    "model.name",
    "model.r",
    "model.phi",
    "model.nuisance.lo",
    "model.nuisance.hi",
    "model.nuisance.kind",
    "prior.kind",
    "prior.mu",
    "prior.sigma",
    "prior.kappa",
    "prior.center",
    "prior.width",
    "sweep.grid_points",
    "sweep.theta_min",
    "sweep.theta_max",
    "sweep.fixed_interest",
    "weight.diag",
    "quadrature.scheme",
    "quadrature.nodes",
    "output.path",
    "povm.elements",
    "measure.samples",
    "seed",
];

pub const DEFAULT_GRID_POINTS: usize = 50;
pub const DEFAULT_SAMPLES: usize = 100_000;

/// Parses `2`, `-1.5e-3`, `pi`, `pi/2`, `3*pi/4`, `2 * pi`.
pub fn parse_number(text: &str) -> Option<f64> {
    let s = text.trim();
    let (sign, body) = match s.strip_prefix('-') {
        Some(rest) => (-1.0, rest),
        None => (1.0, s),
    };
    let mut value = 1.0;
    let mut rest = body;
    let mut op = '*';
    loop {
        let end = rest.find(['*', '/']).unwrap_or(rest.len());
        let token = rest[..end].trim();
        let factor = match token {
            "pi" => PI,
            t if t.starts_with(|c: char| c.is_ascii_digit() || c == '.') => t.parse::<f64>().ok()?,
            _ => return None,
        };
        if op == '*' {
            value *= factor;
        } else {
            value /= factor;
        }
        if end == rest.len() {
            break;
        }
        op = rest[end..].chars().next()?;
        rest = &rest[end + 1..];
    }
    let v = sign * value;
    v.is_finite().then_some(v)
}

/// Key-value pairs with the line each came from.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct RawConfig {
    entries: BTreeMap<String, (String, usize)>,
}

impl RawConfig {
    pub fn parse(text: &str) -> CliResult<Self> {
        let mut entries = BTreeMap::new();
        for (idx, raw) in text.lines().enumerate() {
            let line = idx + 1;
            let content = raw.split('#').next().unwrap_or("").trim();
            if content.is_empty() {
                continue;
            }
            let (key, value) = content.split_once('=').ok_or_else(|| CliError::ConfigLine {
                line,
                msg: format!("expected `key = value`, got `{content}`"),
            })?;
            let key = key.trim();
            let value = value.trim();
            if !KNOWN_KEYS.contains(&key) {
                return Err(CliError::ConfigLine {
                    line,
                    msg: format!("unknown key `{key}`"),
                });
            }
            if value.is_empty() {
                return Err(CliError::ConfigLine {
                    line,
                    msg: format!("empty value for `{key}`"),
                });
            }
            if entries
                .insert(key.to_string(), (value.to_string(), line))
                .is_some()
            {
                return Err(CliError::ConfigLine {
                    line,
                    msg: format!("duplicate key `{key}`"),
                });
            }
        }
        Ok(Self { entries })
    }

    pub fn get(&self, key: &str) -> Option<&str> {
        self.entries.get(key).map(|(v, _)| v.as_str())
    }

    pub fn has(&self, key: &str) -> bool {
        self.entries.contains_key(key)
    }

    fn bad(&self, key: &str, msg: impl Into<String>) -> CliError {
        match self.entries.get(key) {
            Some((_, line)) => CliError::ConfigLine {
                line: *line,
                msg: format!("{key}: {}", msg.into()),
            },
            None => CliError::Config(format!("{key}: {}", msg.into())),
        }
    }

    pub fn number(&self, key: &str) -> CliResult<Option<f64>> {
        self.get(key)
            .map(|v| parse_number(v).ok_or_else(|| self.bad(key, format!("`{v}` is not a number"))))
            .transpose()
    }

    pub fn required_number(&self, key: &str) -> CliResult<f64> {
        self.number(key)?
            .ok_or_else(|| CliError::Config(format!("missing required key `{key}`")))
    }

    fn integer<T: std::str::FromStr>(&self, key: &str) -> CliResult<Option<T>> {
        self.get(key)
            .map(|v| {
                v.parse::<T>()
                    .map_err(|_| self.bad(key, format!("`{v}` is not a non-negative integer")))
            })
            .transpose()
    }

    fn number_list(&self, key: &str) -> CliResult<Option<Vec<f64>>> {
        self.get(key)
            .map(|v| {
                v.split(',')
                    .map(|item| {
                        parse_number(item)
                            .ok_or_else(|| self.bad(key, format!("`{}` is not a number", item.trim())))
                    })
                    .collect()
            })
            .transpose()
    }

    fn reject(&self, keys: &[&str], reason: &str) -> CliResult<()> {
        match keys.iter().find(|k| self.has(k)) {
            Some(k) => Err(self.bad(k, reason.to_string())),
            None => Ok(()),
        }
    }
}

/// A fully validated run description.
#[derive(Debug, Clone)]
pub struct SweepConfig {
    pub model: ModelSpec,
    pub prior: Option<NuisancePrior>,
    pub rule: Option<QuadratureRule>,
    pub grid_points: usize,
    pub theta_min: f64,
    pub theta_max: f64,
    /// Value held fixed for the second interest coordinate (direction model).
    pub fixed_interest: Option<f64>,
    pub weight: WeightMatrix,
    pub output_path: PathBuf,
    /// Measurement for the `show` report, as `a, mx, my, mz` groups.
    pub povm: Option<Povm>,
    /// Monte Carlo sample count for the empirical risk.
    pub samples: usize,
    pub seed: u64,
}

fn config_err(e: hpqfim::Error) -> CliError {
    CliError::Config(e.to_string())
}

fn build_model(raw: &RawConfig) -> CliResult<ModelSpec> {
    let name = raw
        .get("model.name")
        .ok_or_else(|| CliError::Config("missing required key `model.name`".into()))?;
    let kind: ModelKind = name.parse().map_err(config_err)?;
    let model = if kind == ModelKind::Direction {
        raw.reject(&["model.r", "model.phi"], "the direction model has no fixed r or phi")?;
        ModelSpec::direction()
    } else {
        let r = raw.required_number("model.r")?;
        let phi = raw.required_number("model.phi")?;
        ModelSpec::from_kind(kind, r, phi).map_err(config_err)?
    };
    let overrides = ["model.nuisance.lo", "model.nuisance.hi", "model.nuisance.kind"];
    if !overrides.iter().any(|k| raw.has(k)) {
        return Ok(model);
    }
    let current = model.domain_n()[0];
    let lo = raw.number("model.nuisance.lo")?.unwrap_or(current.lo);
    let hi = raw.number("model.nuisance.hi")?.unwrap_or(current.hi);
    let domain = match raw.get("model.nuisance.kind") {
        None => Interval { lo, hi, ..current },
        Some("open") => Interval::open(lo, hi),
        Some("closed") => Interval::closed(lo, hi),
        Some("open_closed") => Interval::open_closed(lo, hi),
        Some("periodic") => Interval::periodic(lo, hi),
        Some(other) => {
            return Err(raw.bad(
                "model.nuisance.kind",
                format!("`{other}` is not one of open, closed, open_closed, periodic"),
            ))
        }
    };
    model.with_nuisance_domain(domain).map_err(config_err)
}

fn build_prior(raw: &RawConfig, domain: Interval) -> CliResult<Option<NuisancePrior>> {
    let params = ["prior.mu", "prior.sigma", "prior.kappa", "prior.center", "prior.width"];
    let Some(kind_name) = raw.get("prior.kind") else {
        raw.reject(&params, "set prior.kind first")?;
        return Ok(None);
    };
    let allowed: &[&str] = match kind_name {
        "uniform" => &[],
        "truncated_gaussian" => &["prior.mu", "prior.sigma"],
        "von_mises" => &["prior.mu", "prior.kappa"],
        "raised_cosine" => &["prior.center", "prior.width"],
        other => {
            return Err(raw.bad(
                "prior.kind",
                format!("`{other}` is not one of uniform, truncated_gaussian, von_mises, raised_cosine"),
            ))
        }
    };
    let stray: Vec<&str> = params.iter().copied().filter(|k| !allowed.contains(k)).collect();
    raw.reject(&stray, &format!("not a parameter of {kind_name}"))?;
    let mid = domain.midpoint();
    let kind = match kind_name {
        "uniform" => PriorKind::Uniform,
        "truncated_gaussian" => PriorKind::TruncatedGaussian {
            mu: raw.number("prior.mu")?.unwrap_or(mid),
            sigma: raw.required_number("prior.sigma")?,
        },
        "von_mises" => PriorKind::VonMises {
            mu: raw.number("prior.mu")?.unwrap_or(mid),
            kappa: raw.required_number("prior.kappa")?,
        },
        _ => PriorKind::RaisedCosine {
            center: raw.number("prior.center")?.unwrap_or(mid),
            width: raw.number("prior.width")?.unwrap_or(0.5 * domain.length()),
        },
    };
    NuisancePrior::new(kind, domain).map(Some).map_err(config_err)
}

fn build_povm(raw: &RawConfig) -> CliResult<Option<Povm>> {
    let Some(text) = raw.get("povm.elements") else {
        return Ok(None);
    };
    let elements = text
        .split(';')
        .map(|group| {
            let v = group
                .split(',')
                .map(|x| {
                    parse_number(x).ok_or_else(|| {
                        raw.bad("povm.elements", format!("`{}` is not a number", x.trim()))
                    })
                })
                .collect::<CliResult<Vec<f64>>>()?;
            match v[..] {
                [a, x, y, z] => Ok(PovmElement::new(a, [x, y, z])),
                _ => Err(raw.bad(
                    "povm.elements",
                    format!("element `{}` needs 4 values a, mx, my, mz", group.trim()),
                )),
            }
        })
        .collect::<CliResult<Vec<_>>>()?;
    Povm::new(elements)
        .map(Some)
        .map_err(|e| raw.bad("povm.elements", e.to_string()))
}

fn build_rule(raw: &RawConfig, prior: &NuisancePrior) -> CliResult<QuadratureRule> {
    let default = prior.default_rule().map_err(config_err)?;
    let scheme = match raw.get("quadrature.scheme") {
        Some(s) => s.parse::<Scheme>().map_err(|e| raw.bad("quadrature.scheme", e.to_string()))?,
        None => default.scheme(),
    };
    let nodes = raw.integer::<usize>("quadrature.nodes")?.unwrap_or(default.len());
    let (a, b) = default.interval();
    QuadratureRule::new(scheme, a, b, nodes).map_err(|e| raw.bad("quadrature.nodes", e.to_string()))
}

impl SweepConfig {
    /// Reads and validates a config file; a relative `output.path` is
    /// resolved against the file's directory.
    pub fn load(path: &Path) -> CliResult<Self> {
        let text = std::fs::read_to_string(path).map_err(|source| CliError::Io {
            path: path.to_path_buf(),
            source,
        })?;
        let base = path.parent().unwrap_or_else(|| Path::new("."));
        Self::from_text(&text, base)
    }

    pub fn from_text(text: &str, base_dir: &Path) -> CliResult<Self> {
        let raw = RawConfig::parse(text)?;
        Self::from_raw(&raw, base_dir)
    }

    pub fn from_raw(raw: &RawConfig, base_dir: &Path) -> CliResult<Self> {
        let model = build_model(raw)?;
        let prior = build_prior(raw, model.domain_n()[0])?;
        let rule = match &prior {
            Some(p) => Some(build_rule(raw, p)?),
            None => {
                raw.reject(&["quadrature.scheme", "quadrature.nodes"], "requires a prior")?;
                None
            }
        };

        let grid_points = raw
            .integer::<usize>("sweep.grid_points")?
            .unwrap_or(DEFAULT_GRID_POINTS);
        if grid_points < 2 {
            return Err(raw.bad("sweep.grid_points", "must be at least 2"));
        }
        let interest = model.domain_i()[0];
        let (dlo, dhi) = if model.kind() == ModelKind::Direction {
            (0.0, PI)
        } else {
            (interest.lo, interest.hi)
        };
        let theta_min = raw.number("sweep.theta_min")?.unwrap_or(dlo);
        let theta_max = raw.number("sweep.theta_max")?.unwrap_or(dhi);
        if theta_min.is_nan() || theta_max.is_nan() || theta_min >= theta_max {
            return Err(raw.bad("sweep.theta_max", "must exceed sweep.theta_min"));
        }
        if !interest.periodic && (theta_min < dlo || theta_max > dhi) {
            return Err(raw.bad("sweep.theta_min", format!("range must lie in {interest}")));
        }
        let fixed_interest = if model.d_i() > 1 {
            Some(raw.number("sweep.fixed_interest")?.unwrap_or(FRAC_PI_4))
        } else {
            raw.reject(&["sweep.fixed_interest"], "model has a single interest parameter")?;
            None
        };

        let weight = match raw.number_list("weight.diag")? {
            Some(d) => {
                if d.len() != model.d_i() {
                    return Err(raw.bad(
                        "weight.diag",
                        format!("expected {} entries, got {}", model.d_i(), d.len()),
                    ));
                }
                let m = SymMat::diag(&d).map_err(config_err)?;
                WeightMatrix::new(m).map_err(|e| raw.bad("weight.diag", e.to_string()))?
            }
            None => WeightMatrix::identity(model.d_i()).map_err(config_err)?,
        };

        let output_path = base_dir.join(raw.get("output.path").unwrap_or("sweep.csv"));
        let povm = build_povm(raw)?;
        let samples = raw.integer::<usize>("measure.samples")?.unwrap_or(DEFAULT_SAMPLES);
        if samples < MIN_SAMPLES {
            return Err(raw.bad("measure.samples", format!("must be at least {MIN_SAMPLES}")));
        }
        let seed = raw.integer::<u64>("seed")?.unwrap_or(0);
        Ok(Self {
            model,
            prior,
            rule,
            grid_points,
            theta_min,
            theta_max,
            fixed_interest,
            weight,
            output_path,
            povm,
            samples,
            seed,
        })
    }

    /// Interest points `lo + (k + ½)(hi − lo)/n`, endpoints excluded.
    pub fn grid(&self) -> Vec<Vec<f64>> {
        let n = self.grid_points as f64;
        let step = (self.theta_max - self.theta_min) / n;
        (0..self.grid_points)
            .map(|k| {
                let t = self.theta_min + (k as f64 + 0.5) * step;
                match self.fixed_interest {
                    Some(f) => vec![t, f],
                    None => vec![t],
                }
            })
            .collect()
    }
}
