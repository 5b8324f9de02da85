//! Executes a validated job.

use std::fs::File;
use std::io::{self, BufWriter, Write};

use mixagg::asymptotics::{tail_pdf_gamma, tail_pdf_generic, tail_pdf_ig};
use mixagg::mc_oracle::{mean_and_se, sample_vector, write_samples_binary, write_samples_csv};
use mixagg::ruin_collective::{ruin_limit, ruin_probability, CompoundDensity};
use mixagg::verify::CheckStatus;
use mixagg::{
    tail_moment, value_at_risk, AggregateModel, CompoundModel, DependentVector, Error, MixingKind, ParetoTailSpec,
    PrimaryLaw, RuinInput, SimulationPlan, VerifyConfig,
};
use serde_json::{json, Map, Value};

use crate::config::{Command, Format, Job, JobConfig, ModelSpec, Primary};
use crate::output::{Cell, Table};

#[derive(Debug)]
pub enum RunError {
    /// Bad input discovered by the engine; exit 2.
    Validation(String),
    /// Nonexistent moment, underflow, divergence; exit 3.
    Numerical(String),
    Io(String),
}

impl RunError {
    pub fn exit_code(&self) -> i32 {
        match self {
            RunError::Validation(_) => 2,
            RunError::Numerical(_) => 3,
            RunError::Io(_) => 1,
        }
    }

    pub fn message(&self) -> &str {
        match self {
            RunError::Validation(m) | RunError::Numerical(m) | RunError::Io(m) => m,
        }
    }
}

impl From<Error> for RunError {
    fn from(e: Error) -> Self {
        if e.is_validation() {
            RunError::Validation(e.to_string())
        } else {
            RunError::Numerical(e.to_string())
        }
    }
}

impl From<io::Error> for RunError {
    fn from(e: io::Error) -> Self {
        RunError::Io(e.to_string())
    }
}

fn at(what: &str, x: f64) -> impl Fn(Error) -> RunError {
    context(format!("{what} at {x:?}"))
}

fn context(label: String) -> impl Fn(Error) -> RunError {
    move |e| {
        let base = RunError::from(e);
        let msg = format!("{label}: {}", base.message());
        match base {
            RunError::Validation(_) => RunError::Validation(msg),
            _ => RunError::Numerical(msg),
        }
    }
}

/// Outcome of a successful run.
pub struct Report {
    /// False when `verify` found a failing check.
    pub passed: bool,
}

const ENGINE_TOLERANCES: [(&str, f64); 2] = [("quadrature_rel", 1e-12), ("root_rel", 1e-13)];

fn model_json(m: &ModelSpec, n: Option<usize>) -> Value {
    let params: Map<String, Value> = m.params.iter().map(|(k, v)| (k.to_string(), json!(v))).collect();
    let mut obj = json!({
        "name": m.name.name(),
        "params": params,
        "mixing": m.mixing.to_string(),
    });
    if let Some(n) = n {
        obj["n"] = json!(n);
    }
    obj
}

fn primary_law(p: Primary) -> (PrimaryLaw, Value) {
    match p {
        Primary::Poisson { phi } => (PrimaryLaw::Poisson { phi }, json!({"law": "poisson", "phi": phi})),
        Primary::NegativeBinomial { r, p } => (
            PrimaryLaw::NegativeBinomial { r, p },
            json!({"law": "negative-binomial", "r": r, "p": p}),
        ),
        Primary::Geometric { p } => (PrimaryLaw::Geometric { p }, json!({"law": "geometric", "p": p})),
        Primary::Logarithmic { phi } => (
            PrimaryLaw::Logarithmic { phi },
            json!({"law": "logarithmic", "phi": phi}),
        ),
    }
}

fn sink(cfg: &JobConfig) -> io::Result<Box<dyn Write>> {
    Ok(match &cfg.output {
        Some(path) => Box::new(BufWriter::new(File::create(path)?)),
        None => Box::new(BufWriter::new(io::stdout().lock())),
    })
}

fn emit(cfg: &JobConfig, table: &Table, model: Value, tolerances: Value) -> Result<(), RunError> {
    let text = match cfg.format {
        Format::Json => table.to_json(
            model,
            cfg.command.name(),
            json!({"seed": cfg.seed, "tolerances": tolerances}),
        ),
        _ => table.to_csv(),
    };
    let mut w = sink(cfg)?;
    w.write_all(text.as_bytes())?;
    w.flush()?;
    Ok(())
}

fn engine_tolerances() -> Value {
    Value::Object(
        ENGINE_TOLERANCES
            .iter()
            .map(|(k, v)| (k.to_string(), json!(v)))
            .collect(),
    )
}

pub fn run(cfg: &JobConfig) -> Result<Report, RunError> {
    let mut passed = true;
    let (table, model, tolerances) = match &cfg.job {
        Job::Grid { model, n, grid } => {
            let agg = AggregateModel::new(model.mixing, *n)?;
            let col = cfg.command.name();
            let mut t = Table::new(&["x", col]);
            for x in grid.values() {
                let v = match cfg.command {
                    Command::Pdf => agg.pdf(x),
                    Command::Cdf => agg.cdf(x),
                    _ => agg.survival(x),
                }
                .map_err(at(col, x))?;
                t.push(vec![Cell::Num(x), Cell::Num(v)]);
            }
            (t, model_json(model, Some(*n)), engine_tolerances())
        }
        Job::Risk { model, n, levels } => {
            let agg = AggregateModel::new(model.mixing, *n)?;
            let mut t = Table::new(&["level", "var", "tvar"]);
            for &level in levels {
                let var = value_at_risk(&agg, level).map_err(at("var", level))?;
                let tvar = match tail_moment(&agg, 1, var) {
                    Ok(v) => v,
                    // an infinite mean makes TVaR infinite; only `tvar` treats that as failure
                    Err(Error::NonexistentMoment { .. }) if cfg.command == Command::Var => f64::INFINITY,
                    Err(e) => return Err(at("tvar", level)(e)),
                };
                t.push(vec![Cell::Num(level), Cell::Num(var), Cell::Num(tvar)]);
            }
            (t, model_json(model, Some(*n)), engine_tolerances())
        }
        Job::Moments { model, n, orders } => {
            let agg = AggregateModel::new(model.mixing, *n)?;
            let mut t = Table::new(&["order", "moment"]);
            for &r in orders {
                let m = agg.moment(r).map_err(context(format!("E S^{r}")))?;
                t.push(vec![Cell::Int(u64::from(r)), Cell::Num(m)]);
            }
            (t, model_json(model, Some(*n)), json!({}))
        }
        Job::Pair { model } => {
            let v = DependentVector::new(model.mixing, 2)?;
            let mut t = Table::new(&["measure", "value"]);
            let (name, numeric, closed) = if cfg.command == Command::Tau {
                ("kendall_tau", v.kendall_tau()?, v.kendall_tau_closed())
            } else {
                ("pearson_rho", v.pearson_rho()?, v.pearson_rho_closed())
            };
            t.push(vec![Cell::Text(name.into()), Cell::Num(numeric)]);
            if let Ok(c) = closed {
                t.push(vec![Cell::Text(format!("{name}_closed")), Cell::Num(c)]);
            }
            (t, model_json(model, Some(2)), engine_tolerances())
        }
        Job::Simulate { model, n, samples } => {
            let plan = SimulationPlan::frailty(model.mixing, *n, *samples, cfg.seed);
            let m = sample_vector(&plan)?;
            match cfg.format {
                Format::Csv => {
                    let mut w = sink(cfg)?;
                    write_samples_csv(&mut w, &m)?;
                    w.flush()?;
                    return Ok(Report { passed });
                }
                Format::Bin => {
                    let mut w = sink(cfg)?;
                    write_samples_binary(&mut w, &m)?;
                    w.flush()?;
                    return Ok(Report { passed });
                }
                Format::Json => {}
            }
            let mut t = Table::new(&["column", "mean", "std_error"]);
            for i in 0..*n {
                let (mean, se) = mean_and_se(m.column(i));
                t.push(vec![Cell::Text(format!("x{}", i + 1)), Cell::Num(mean), Cell::Num(se)]);
            }
            let (mean, se) = mean_and_se(&m.row_sums());
            t.push(vec![Cell::Text("sum".into()), Cell::Num(mean), Cell::Num(se)]);
            let mut mj = model_json(model, Some(*n));
            mj["samples"] = json!(samples);
            (t, mj, json!({}))
        }
        Job::Ruin { lambda, phi, c, grid } => {
            let base = RuinInput {
                lambda: *lambda,
                phi: *phi,
                c: *c,
                u: 0.0,
            };
            let limit = ruin_limit(&base)?;
            let mut t = Table::new(&["u", "psi", "limit"]);
            for u in grid.values() {
                let psi = ruin_probability(&RuinInput { u, ..base }).map_err(at("psi", u))?;
                t.push(vec![Cell::Num(u), Cell::Num(psi), Cell::Num(limit)]);
            }
            let model = json!({"name": "lindley-ruin", "params": {"lambda": lambda, "phi": phi, "c": c}});
            (t, model, json!({}))
        }
        Job::Compound {
            primary,
            lambda,
            points,
        } => {
            let (law, law_json) = primary_law(*primary);
            let cm = CompoundModel::new(law, *lambda)?;
            let mut t = Table::new(&["x", "value", "kind"]);
            for x in points.values() {
                let (v, kind) = match cm.compound_pdf(x).map_err(at("compound density", x))? {
                    CompoundDensity::Atom(v) => (v, "atom"),
                    CompoundDensity::Density(v) => (v, "density"),
                };
                t.push(vec![Cell::Num(x), Cell::Num(v), Cell::Text(kind.into())]);
            }
            let model = json!({"name": "compound", "primary": law_json, "params": {"lambda": lambda}});
            (t, model, json!({}))
        }
        Job::Asymptotic { model, beta, m, grid } => {
            let spec = ParetoTailSpec::new(*beta, *m, model.mixing)?;
            let mut t = Table::new(&["x", "tail_pdf", "tail_pdf_closed"]);
            for x in grid.values() {
                let generic = tail_pdf_generic(&spec, x).map_err(at("tail pdf", x))?;
                let closed = match model.mixing.kind() {
                    MixingKind::Gamma { shape, rate } => tail_pdf_gamma(shape, rate, *beta, *m, x),
                    MixingKind::InverseGaussian { lambda, mu } => tail_pdf_ig(lambda, mu, *beta, *m, x),
                    _ => unreachable!("validated frailty"),
                }
                .map_err(at("tail pdf", x))?;
                t.push(vec![Cell::Num(x), Cell::Num(generic), Cell::Num(closed)]);
            }
            let mut mj = model_json(model, None);
            mj["params"]["beta"] = json!(beta);
            mj["params"]["m"] = json!(m);
            (t, mj, json!({}))
        }
        Job::Verify { model, n, samples } => {
            let agg = AggregateModel::new(model.mixing, *n)?;
            let vc = VerifyConfig {
                samples: *samples,
                seed: cfg.seed,
                ..VerifyConfig::default()
            };
            let rep = mixagg::verify_model(&agg, &vc)?;
            passed = rep.passed();
            let mut t = Table::new(&["check", "max_error", "tolerance", "status"]);
            let mut tol = Map::new();
            for c in &rep.checks {
                let status = match &c.status {
                    CheckStatus::Pass => "pass".to_string(),
                    CheckStatus::Fail => "FAIL".to_string(),
                    CheckStatus::Skipped(why) => format!("skipped: {why}"),
                };
                tol.insert(c.name.clone(), json!(c.tolerance));
                t.push(vec![
                    Cell::Text(c.name.clone()),
                    Cell::Num(c.max_error),
                    Cell::Num(c.tolerance),
                    Cell::Text(status),
                ]);
            }
            let mut mj = model_json(model, Some(*n));
            mj["samples"] = json!(samples);
            (t, mj, Value::Object(tol))
        }
    };
    emit(cfg, &table, model, tolerances)?;
    Ok(Report { passed })
}
