//! Self-verification suites run by `hpqfim verify`.

use std::f64::consts::{FRAC_PI_2, FRAC_PI_4, PI};
use std::fmt;
use std::io::Write;
use std::str::FromStr;

use hpqfim::hybrid::{self, averaged_blocks, evaluate, g_matrix, surrogates};
use hpqfim::matlib::{block_inverse_identity_check, jensen_schur_check, psd_gap, schur_complement};
use hpqfim::measure::{
    classical_hybrid_chain, data_processing_check, empirical_hybrid_risk, outcome_dist,
    ChainVerdict,
};
use hpqfim::priors::prior_fisher;
use hpqfim::{
    BlochVec, BlockSym, EvalPoint, Interval, ModelKind, ModelSpec, NuisancePrior, Povm,
    PovmElement, PriorKind, RectMat, SymMat, WeightMatrix,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{CliError, CliResult};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Suite {
    Matrix,
    Models,
    Bounds,
    Measurement,
    All,
}

impl Suite {
    pub const NAMES: [&'static str; 5] = ["matrix", "models", "bounds", "measurement", "all"];

    fn parts(self) -> Vec<Suite> {
        match self {
            Suite::All => vec![Suite::Matrix, Suite::Models, Suite::Bounds, Suite::Measurement],
            s => vec![s],
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Suite::Matrix => "matrix",
            Suite::Models => "models",
            Suite::Bounds => "bounds",
            Suite::Measurement => "measurement",
            Suite::All => "all",
        }
    }
}

impl fmt::Display for Suite {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Suite {
    type Err = CliError;

    fn from_str(s: &str) -> CliResult<Self> {
        [Suite::Matrix, Suite::Models, Suite::Bounds, Suite::Measurement, Suite::All]
            .into_iter()
            .find(|x| x.name() == s)
            .ok_or_else(|| CliError::Config(format!("unknown suite `{s}`")))
    }
}

/// Signature of the hybrid partial QFIM routine under test.
pub type HpqfimFn = fn(&BlockSym, &SymMat) -> hpqfim::Result<SymMat>;

/// Replaceable pieces of the library, for checking that the suites catch
/// faults.
#[derive(Clone, Copy)]
pub struct Hooks {
    pub hpqfim: HpqfimFn,
}

impl Default for Hooks {
    fn default() -> Self {
        Self {
            hpqfim: hybrid::hpqfim,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CheckResult {
    pub name: String,
    pub passed: bool,
    pub cases: usize,
    pub detail: String,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct Report {
    pub checks: Vec<CheckResult>,
}

impl Report {
    pub fn failed(&self) -> usize {
        self.checks.iter().filter(|c| !c.passed).count()
    }

    pub fn passed(&self) -> bool {
        self.failed() == 0
    }
}

#[derive(Clone, Copy)]
enum Witness {
    /// Smallest eigenvalue seen; negative values witness a PSD failure.
    MinEig,
    /// Largest deviation seen.
    MaxDev,
    None,
}

struct Check {
    name: String,
    witness: Witness,
    cases: usize,
    worst: f64,
    failure: Option<String>,
    error: Option<String>,
}

impl Check {
    fn new(suite: Suite, name: &str, witness: Witness) -> Self {
        let worst = match witness {
            Witness::MinEig => f64::INFINITY,
            _ => 0.0,
        };
        Self {
            name: format!("{suite}/{name}"),
            witness,
            cases: 0,
            worst,
            failure: None,
            error: None,
        }
    }

    fn record(&mut self, ok: bool, value: f64, context: impl FnOnce() -> String) {
        self.cases += 1;
        match self.witness {
            Witness::MinEig => self.worst = self.worst.min(value),
            Witness::MaxDev => self.worst = self.worst.max(value),
            Witness::None => {}
        }
        if !ok && self.failure.is_none() {
            self.failure = Some(context());
        }
    }

    /// Runs `body`; a library error fails the check with its message.
    fn run(mut self, body: impl FnOnce(&mut Check) -> hpqfim::Result<()>) -> CheckResult {
        if let Err(e) = body(&mut self) {
            self.error = Some(e.to_string());
        }
        let measure = match self.witness {
            Witness::MinEig => format!("min eigenvalue {:e}", self.worst),
            Witness::MaxDev => format!("max deviation {:e}", self.worst),
            Witness::None => String::new(),
        };
        let passed = self.failure.is_none() && self.error.is_none();
        let mut detail = measure;
        if let Some(e) = self.error {
            detail = format!("error: {e}");
        } else if let Some(f) = self.failure {
            detail = if detail.is_empty() { f } else { format!("{detail}; first failure {f}") };
        }
        CheckResult {
            name: self.name,
            passed,
            cases: self.cases,
            detail,
        }
    }
}

pub fn random_spd(rng: &mut ChaCha8Rng, d: usize, delta: f64) -> SymMat {
    let a: Vec<f64> = (0..d * d).map(|_| rng.random_range(-1.0..1.0)).collect();
    let entries = (0..d * d)
        .map(|k| {
            let (i, j) = (k / d, k % d);
            let v: f64 = (0..d).map(|m| a[i * d + m] * a[j * d + m]).sum();
            if i == j {
                v + delta
            } else {
                v
            }
        })
        .collect();
    SymMat::new(d, entries).expect("Gram matrix is symmetric")
}

pub fn random_povm(rng: &mut ChaCha8Rng) -> hpqfim::Result<Povm> {
    let k = rng.random_range(2..7);
    let mut ms: Vec<[f64; 3]> = (0..k - 1)
        .map(|_| std::array::from_fn(|_| rng.random_range(-1.0..1.0)))
        .collect();
    let last = ms.iter().fold([0.0; 3], |acc, m| [acc[0] - m[0], acc[1] - m[1], acc[2] - m[2]]);
    ms.push(last);
    let a: Vec<f64> = ms
        .iter()
        .map(|m| (m[0] * m[0] + m[1] * m[1] + m[2] * m[2]).sqrt() + rng.random_range(0.01..0.5))
        .collect();
    let total: f64 = a.iter().sum();
    Povm::new(
        ms.iter()
            .zip(&a)
            .map(|(m, a)| PovmElement::new(a / total, m.map(|v| v / total)))
            .collect(),
    )
}

pub fn random_point(rng: &mut ChaCha8Rng) -> hpqfim::Result<(ModelSpec, EvalPoint)> {
    let kind = ModelKind::ALL[rng.random_range(0..4)];
    let model = ModelSpec::from_kind(kind, rng.random_range(0.1..0.65), rng.random_range(0.2..2.9))?;
    let p = match kind {
        ModelKind::Direction => EvalPoint::new(
            vec![rng.random_range(0.1..3.0), rng.random_range(0.0..2.0 * PI)],
            vec![rng.random_range(0.05..0.9)],
        ),
        ModelKind::AnisotropicShrink => {
            EvalPoint::scalar(rng.random_range(0.0..2.0 * PI), rng.random_range(0.05..1.0))
        }
        _ => EvalPoint::scalar(rng.random_range(0.0..2.0 * PI), rng.random_range(0.0..2.0 * PI)),
    };
    Ok((model, p))
}

/// Uniform, von Mises (`κ = 1`) and raised-cosine priors on the model's
/// nuisance domain.
pub fn standard_priors(model: &ModelSpec) -> hpqfim::Result<Vec<NuisancePrior>> {
    let d = model.domain_n()[0];
    Ok(vec![
        NuisancePrior::uniform(d)?,
        NuisancePrior::new(PriorKind::VonMises { mu: d.midpoint(), kappa: 1.0 }, d)?,
        NuisancePrior::new(
            PriorKind::RaisedCosine {
                center: d.midpoint(),
                width: 0.5 * d.length(),
            },
            d,
        )?,
    ])
}

/// `n` interior interest points; the direction model sweeps `θ ∈ (0, π)` at
/// `φ = π/4`.
pub fn interest_grid(model: &ModelSpec, n: usize) -> Vec<Vec<f64>> {
    let d = model.domain_i()[0];
    let hi = if model.kind() == ModelKind::Direction { PI } else { d.hi };
    (0..n)
        .map(|k| {
            let t = d.lo + (k as f64 + 0.5) * (hi - d.lo) / n as f64;
            if model.d_i() == 2 {
                vec![t, FRAC_PI_4]
            } else {
                vec![t]
            }
        })
        .collect()
}

fn matrix_suite() -> Vec<CheckResult> {
    let s = Suite::Matrix;
    let mut out = Vec::new();
    out.push(Check::new(s, "schur_complement_spd", Witness::MinEig).run(|c| {
        let mut rng = ChaCha8Rng::seed_from_u64(101);
        for _ in 0..1000 {
            let (di, dn) = (rng.random_range(1..=3), rng.random_range(1..=3));
            let g = random_spd(&mut rng, di + dn, 0.05);
            let m = schur_complement(&BlockSym::extract(&g, di)?)?.min_eigenvalue();
            c.record(m > -1e-10, m, || format!("dims ({di}, {dn})"));
        }
        Ok(())
    }));
    out.push(Check::new(s, "block_inverse_identity", Witness::None).run(|c| {
        let mut rng = ChaCha8Rng::seed_from_u64(102);
        for _ in 0..1000 {
            let (di, dn) = (rng.random_range(1..=2), rng.random_range(1..=2));
            let g = random_spd(&mut rng, di + dn, 0.1);
            let ok = block_inverse_identity_check(&BlockSym::extract(&g, di)?, 1e-9)?;
            c.record(ok, 0.0, || format!("{g:?}"));
        }
        Ok(())
    }));
    out.push(Check::new(s, "jensen_schur", Witness::MinEig).run(|c| {
        let mut rng = ChaCha8Rng::seed_from_u64(103);
        for _ in 0..1000 {
            let k = rng.random_range(1..6);
            let (da, db) = (rng.random_range(1..=2), rng.random_range(1..=2));
            let mut samples = Vec::with_capacity(k);
            for _ in 0..k {
                let a = random_spd(&mut rng, da, 0.1);
                let b = RectMat::new(da, db, (0..da * db).map(|_| rng.random_range(-1.0..1.0)).collect())?;
                samples.push((a, b));
            }
            let raw: Vec<f64> = (0..k).map(|_| rng.random_range(0.01..1.0)).collect();
            let total: f64 = raw.iter().sum();
            let mut w: Vec<f64> = raw.iter().map(|x| x / total).collect();
            w[k - 1] = 1.0 - w[..k - 1].iter().sum::<f64>();
            let v = jensen_schur_check(&samples, &w, 1e-9)?;
            c.record(v.holds, v.min_eig, || format!("{k} samples"));
        }
        Ok(())
    }));
    out.push(Check::new(s, "psd_gap_examples", Witness::None).run(|c| {
        let a = SymMat::diag(&[2.0, 2.0])?;
        let v = psd_gap(&a, &SymMat::diag(&[1.0, 3.0])?, 1e-12)?;
        c.record(!v.holds && (v.min_eig + 1.0).abs() < 1e-14, 0.0, || format!("{v:?}"));
        let v = psd_gap(&a, &a, 1e-12)?;
        c.record(v.holds && v.min_eig == 0.0, 0.0, || format!("{v:?}"));
        Ok(())
    }));
    out
}

fn models_suite() -> Vec<CheckResult> {
    let s = Suite::Models;
    let mut out = Vec::new();
    out.push(Check::new(s, "direction_closed_form", Witness::MaxDev).run(|c| {
        let model = ModelSpec::direction();
        let n = 20;
        for a in 0..n {
            for b in 0..n {
                for k in 0..n {
                    let theta = PI * (a as f64 + 0.5) / n as f64;
                    let phi = 2.0 * PI * (b as f64 + 0.5) / n as f64;
                    let r = (k as f64 + 0.5) / n as f64;
                    let j = model.qfim(&EvalPoint::new(vec![theta, phi], vec![r]))?.assemble();
                    let expected = SymMat::diag(&[r * r, (r * theta.sin()).powi(2), 1.0 / (1.0 - r * r)])?;
                    let dev = j.max_abs_diff(&expected)?;
                    c.record(dev < 1e-10, dev, || format!("at ({theta}, {phi}, {r})"));
                }
            }
        }
        Ok(())
    }));
    out.push(Check::new(s, "extra_rotation_constant_blocks", Witness::MaxDev).run(|c| {
        let model = ModelSpec::extra_rotation(0.5, FRAC_PI_2)?;
        let reference = BlockSym::scalars(0.25, 0.25, 0.25);
        for a in 0..30 {
            for b in 0..30 {
                let p = EvalPoint::scalar(2.0 * PI * a as f64 / 30.0, 2.0 * PI * b as f64 / 30.0);
                let j = model.qfim(&p)?;
                let dev = j.max_abs_diff(&reference)?.max(schur_complement(&j)?.max_abs());
                c.record(dev < 1e-12, dev, || format!("at {p:?}"));
            }
        }
        Ok(())
    }));
    out.push(Check::new(s, "qfim_psd", Witness::MinEig).run(|c| {
        let mut rng = ChaCha8Rng::seed_from_u64(201);
        for _ in 0..1000 {
            let (model, p) = random_point(&mut rng)?;
            let m = model.qfim(&p)?.assemble().min_eigenvalue();
            c.record(m > -1e-12, m, || format!("{} at {p:?}", model.kind()));
        }
        Ok(())
    }));
    out.push(Check::new(s, "jacobian_finite_differences", Witness::MaxDev).run(|c| {
        let mut rng = ChaCha8Rng::seed_from_u64(202);
        let h = 1e-6;
        for _ in 0..200 {
            let (model, p) = random_point(&mut rng)?;
            let frame = model.jacobian(&p)?;
            let flat: Vec<f64> = p.theta_i.iter().chain(&p.theta_n).copied().collect();
            let at = |t: &[f64]| model.bloch(&EvalPoint::new(t[..model.d_i()].to_vec(), t[model.d_i()..].to_vec()));
            for k in 0..flat.len() {
                let (mut tp, mut tm) = (flat.clone(), flat.clone());
                tp[k] += h;
                tm[k] -= h;
                let (sp, sm) = (at(&tp)?.as_array(), at(&tm)?.as_array());
                for i in 0..3 {
                    let dev = ((sp[i] - sm[i]) / (2.0 * h) - frame.column(k)[i]).abs();
                    c.record(dev < 1e-8, dev, || format!("{} at {p:?}", model.kind()));
                }
            }
        }
        Ok(())
    }));
    out.push(Check::new(s, "sweep_symmetry", Witness::MaxDev).run(|c| {
        for kind in [ModelKind::AdditionalSine, ModelKind::AnisotropicShrink] {
            let model = ModelSpec::from_kind(kind, 0.5, FRAC_PI_2)?;
            let prior = NuisancePrior::uniform(model.domain_n()[0])?;
            let rule = prior.default_rule()?;
            let w = WeightMatrix::identity(1)?;
            for t in interest_grid(&model, 24) {
                let a = evaluate(&model, &prior, &rule, &t, &w)?;
                let b = evaluate(&model, &prior, &rule, &[PI - t[0]], &w)?;
                for (x, y) in [(&a.inv_l, &b.inv_l), (&a.inv_m, &b.inv_m), (&a.inv_u, &b.inv_u)] {
                    let (x, y) = (x.weighted_trace(&w)?, y.weighted_trace(&w)?);
                    let dev = if x == y { 0.0 } else { (x - y).abs() / x.abs().max(1.0) };
                    c.record(dev <= 1e-9, dev, || format!("{kind} at {}", t[0]));
                }
            }
        }
        Ok(())
    }));
    out
}

fn bounds_suite(hooks: &Hooks) -> Vec<CheckResult> {
    let s = Suite::Bounds;
    let h_of = hooks.hpqfim;
    let mut out = Vec::new();
    out.push(Check::new(s, "bracketing", Witness::MinEig).run(|c| {
        for kind in ModelKind::ALL {
            let model = ModelSpec::from_kind(kind, 0.5, FRAC_PI_2)?;
            for prior in standard_priors(&model)? {
                let rule = prior.default_rule()?;
                let j_pi = prior_fisher(&prior, &rule)?;
                for t in interest_grid(&model, 50) {
                    let avg = averaged_blocks(&model, &prior, &rule, &t)?;
                    let sur = surrogates(&model, &prior, &rule, &t)?;
                    let h = h_of(&avg, &j_pi)?;
                    let upper = psd_gap(&sur.high, &h, 1e-9)?;
                    let lower = psd_gap(&h, &sur.low, 1e-9)?;
                    let m = upper.min_eig.min(lower.min_eig);
                    c.record(upper.holds && lower.holds, m, || {
                        format!("{kind} / {} at theta_I = {:?}", prior.kind().name(), t)
                    });
                }
            }
        }
        Ok(())
    }));
    out.push(Check::new(s, "extra_rotation_closed_form", Witness::MaxDev).run(|c| {
        let model = ModelSpec::extra_rotation(0.5, FRAC_PI_2)?;
        for kappa in [0.5, 1.0, 5.0] {
            let prior = NuisancePrior::new(PriorKind::VonMises { mu: 0.0, kappa }, Interval::periodic(0.0, 2.0 * PI))?;
            let rule = prior.default_rule()?;
            let j_pi = prior_fisher(&prior, &rule)?;
            let h = h_of(&averaged_blocks(&model, &prior, &rule, &[1.0])?, &j_pi)?;
            let jp = j_pi.get(0, 0);
            let expected = 0.25 * jp / (0.25 + jp);
            let dev = (h.get(0, 0) - expected).abs() / expected;
            c.record(dev < 1e-10, dev, || format!("kappa = {kappa}"));
        }
        Ok(())
    }));
    out.push(Check::new(s, "direction_coincidence", Witness::MaxDev).run(|c| {
        let model = ModelSpec::direction();
        let prior = NuisancePrior::uniform(Interval::open(0.01, 0.99))?;
        let rule = prior.default_rule()?;
        let j_pi = prior_fisher(&prior, &rule)?;
        for t in interest_grid(&model, 50) {
            let avg = averaged_blocks(&model, &prior, &rule, &t)?;
            let sur = surrogates(&model, &prior, &rule, &t)?;
            let h = h_of(&avg, &j_pi)?;
            let dev = h.max_abs_diff(&sur.high)?.max(h.max_abs_diff(&sur.low)?);
            c.record(dev < 1e-10, dev, || format!("theta = {}", t[0]));
        }
        Ok(())
    }));
    out.push(Check::new(s, "monotone_in_prior_information", Witness::MinEig).run(|c| {
        let mut rng = ChaCha8Rng::seed_from_u64(301);
        for _ in 0..500 {
            let (di, dn) = (rng.random_range(1..=2), rng.random_range(1..=2));
            let avg = BlockSym::extract(&random_spd(&mut rng, di + dn, 0.05), di)?;
            let j1 = random_spd(&mut rng, dn, 0.0);
            let j2 = j1.add(&random_spd(&mut rng, dn, 0.0))?;
            let v = psd_gap(&h_of(&avg, &j2)?, &h_of(&avg, &j1)?, 1e-9)?;
            c.record(v.holds, v.min_eig, || format!("dims ({di}, {dn})"));
        }
        Ok(())
    }));
    out.push(Check::new(s, "nuisance_rescaling", Witness::MaxDev).run(|c| {
        let mut rng = ChaCha8Rng::seed_from_u64(302);
        for _ in 0..500 {
            let avg = BlockSym::extract(&random_spd(&mut rng, 3, 0.05), 2)?;
            let jp = rng.random_range(0.0..2.0);
            let k: f64 = rng.random_range(0.1..10.0);
            let scaled = BlockSym::new(avg.ii.clone(), avg.in_.scale(1.0 / k), avg.nn.scale(1.0 / (k * k)))?;
            let a = h_of(&avg, &SymMat::scalar(jp))?;
            let b = h_of(&scaled, &SymMat::scalar(jp / (k * k)))?;
            let dev = a.max_abs_diff(&b)? / a.max_abs().max(1.0);
            c.record(dev < 1e-10, dev, || format!("scale {k}"));
        }
        Ok(())
    }));
    out.push(Check::new(s, "g_matrix_block_inverse", Witness::MaxDev).run(|c| {
        for kind in ModelKind::ALL {
            let model = ModelSpec::from_kind(kind, 0.5, 1.2)?;
            let d = model.domain_n()[0];
            let prior = NuisancePrior::new(PriorKind::VonMises { mu: d.midpoint(), kappa: 2.0 }, d)?;
            let rule = prior.default_rule()?;
            let j_pi = prior_fisher(&prior, &rule)?;
            for t in interest_grid(&model, 10) {
                let avg = averaged_blocks(&model, &prior, &rule, &t)?;
                let g = g_matrix(&avg, &j_pi)?;
                let top = BlockSym::extract(&g.inverse()?, model.d_i())?.ii;
                let h_inv = h_of(&avg, &j_pi)?.inverse()?;
                let dev = top.max_abs_diff(&h_inv)? / top.max_abs().max(1.0);
                c.record(dev < 1e-8, dev, || format!("{kind} at {t:?}"));
            }
        }
        Ok(())
    }));
    out
}

fn zx_povm() -> hpqfim::Result<Povm> {
    Povm::mixture(
        &[0.5, 0.5],
        &[Povm::projective([0.0, 0.0, 1.0])?, Povm::projective([1.0, 0.0, 0.0])?],
    )
}

fn measurement_suite() -> Vec<CheckResult> {
    let s = Suite::Measurement;
    let mut out = Vec::new();
    out.push(Check::new(s, "outcome_distribution", Witness::MaxDev).run(|c| {
        let mut rng = ChaCha8Rng::seed_from_u64(401);
        for _ in 0..500 {
            let povm = random_povm(&mut rng)?;
            let (model, p) = random_point(&mut rng)?;
            let dist = outcome_dist(&povm, &model.bloch(&p)?)?;
            let dev = (dist.probs.iter().sum::<f64>() - 1.0).abs();
            let in_range = dist.probs.iter().all(|q| (0.0..=1.0).contains(q));
            c.record(in_range && dev <= 1e-12, dev, || format!("{povm:?}"));
        }
        Ok(())
    }));
    out.push(Check::new(s, "data_processing", Witness::MinEig).run(|c| {
        let mut rng = ChaCha8Rng::seed_from_u64(402);
        for _ in 0..500 {
            let povm = random_povm(&mut rng)?;
            let (model, p) = random_point(&mut rng)?;
            let v = data_processing_check(&povm, &model, &p, 1e-8)?;
            c.record(v.holds, v.min_eig, || format!("{} at {p:?}", model.kind()));
        }
        Ok(())
    }));
    out.push(Check::new(s, "classical_hybrid_chain", Witness::None).run(|c| {
        let third = 1.0 / 3.0;
        let povm = Povm::mixture(
            &[third, third, third],
            &[
                Povm::projective([1.0, 0.0, 0.0])?,
                Povm::projective([0.0, 1.0, 0.0])?,
                Povm::projective([0.0, 0.0, 1.0])?,
            ],
        )?;
        for kind in ModelKind::ALL {
            let model = ModelSpec::from_kind(kind, 0.5, 1.2)?;
            for prior in standard_priors(&model)?.into_iter().skip(1) {
                let rule = prior.default_rule()?;
                for t in interest_grid(&model, 20) {
                    let rep = classical_hybrid_chain(&povm, &model, &prior, &rule, &t, 1e-8)?;
                    c.record(rep.verdict != ChainVerdict::Fails, 0.0, || {
                        format!("{kind} / {} at {t:?}: {:?}", prior.kind().name(), rep.min_eig)
                    });
                }
            }
        }
        Ok(())
    }));
    out.push(Check::new(s, "empirical_risk_direction", Witness::None).run(|c| {
        let model = ModelSpec::direction();
        let prior = NuisancePrior::uniform(Interval::open(0.0, 1.0))?;
        let t = [FRAC_PI_2, FRAC_PI_4];
        let est = empirical_hybrid_risk(&zx_povm()?, &model, &prior, &t, 100_000, 42)?;
        let w = WeightMatrix::identity(2)?;
        let bound = evaluate(&model, &prior, &prior.default_rule()?, &t, &w)?.risk_bound;
        c.record(est.estimate >= bound - 3.0 * est.std_error, 0.0, || {
            format!("estimate {} ± {} below bound {bound}", est.estimate, est.std_error)
        });
        Ok(())
    }));
    out.push(Check::new(s, "pure_state_rejected", Witness::None).run(|c| {
        c.record(BlochVec::new(0.8, 0.8, 0.0).is_err(), 0.0, || "accepted |s| > 1".into());
        Ok(())
    }));
    out
}

/// Runs `suite`, printing one line per check to `out`.
pub fn run_verify(suite: Suite, hooks: &Hooks, out: &mut impl Write) -> CliResult<Report> {
    let mut report = Report::default();
    let io = |source| CliError::Io {
        path: "<stdout>".into(),
        source,
    };
    for part in suite.parts() {
        let checks = match part {
            Suite::Matrix => matrix_suite(),
            Suite::Models => models_suite(),
            Suite::Bounds => bounds_suite(hooks),
            Suite::Measurement => measurement_suite(),
            Suite::All => unreachable!("expanded by parts()"),
        };
        for c in checks {
            let status = if c.passed { "PASS" } else { "FAIL" };
            writeln!(out, "{status} {} ({} cases) {}", c.name, c.cases, c.detail).map_err(io)?;
            report.checks.push(c);
        }
    }
    writeln!(
        out,
        "{}: {} passed, {} failed",
        suite,
        report.checks.len() - report.failed(),
        report.failed()
    )
    .map_err(io)?;
    Ok(report)
}
