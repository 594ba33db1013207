//! One runner per command. Each returns a table, a JSON summary for the
//! manifest, and a witness when an audit fails.

use gradnorm::asymptotics::{equivalence_test, spectral_sequence, theorem_c_experiment};
use gradnorm::norms::{d1, dinf, relative_spectrum, vol, vol_by_determinant};
use gradnorm::okounkov::{
    chebyshev_transform, equidistribution_check, fujita_check, phi_table, simplex_grid, theta,
    MonomialOrder, OrderKind,
};
use gradnorm::potential_p1::theorem_b_experiment;
use gradnorm::section_ring::{submultiplicativity_check, GradedNorm};
use gradnorm::Error;
use serde_json::{json, Map, Value};

use crate::config::{Command, ConfigError, LoadedConfig};
use crate::table::Table;

pub enum RunError {
    Config(String),
    Internal(String),
}

impl From<ConfigError> for RunError {
    fn from(e: ConfigError) -> Self {
        RunError::Config(e.0)
    }
}

impl From<Error> for RunError {
    fn from(e: Error) -> Self {
        match e {
            Error::Invalid(_)
            | Error::Parse(_)
            | Error::NotDivisible { .. }
            | Error::DimensionMismatch { .. }
            | Error::NotMonomialDiagonal
            | Error::MassMismatch(..) => RunError::Config(e.to_string()),
            other => RunError::Internal(other.to_string()),
        }
    }
}

pub struct Outcome {
    pub table: Table,
    pub summary: Map<String, Value>,
    pub violation: Option<String>,
}

impl Outcome {
    fn new(table: Table) -> Self {
        Outcome {
            table,
            summary: Map::new(),
            violation: None,
        }
    }
}

type Run = Result<Outcome, RunError>;

pub fn run(cmd: Command, cfg: &LoadedConfig) -> Run {
    match cmd {
        Command::Spectrum => spectrum(cfg),
        Command::Vol => volumes(cfg),
        Command::Asymptotics => asymptotics(cfg),
        Command::TheoremB => theorem_b(cfg),
        Command::TheoremC => theorem_c(cfg),
        Command::Okounkov => okounkov(cfg),
        Command::Chebyshev => chebyshev(cfg),
        Command::Equidistribution => equidistribution(cfg),
        Command::Fujita => fujita(cfg),
    }
}

fn spectrum(cfg: &LoadedConfig) -> Run {
    let pairs = cfg.pairs()?;
    let constructed = pairs.iter().all(|p| p.2.is_some());
    let mut t = Table::new(if constructed {
        &["pair", "i", "lambda", "constructed"]
    } else {
        &["pair", "i", "lambda"]
    });
    let mut violation = None;
    for (p, (a, b, expected)) in pairs.iter().enumerate() {
        let s = relative_spectrum(a, b)?;
        for (i, l) in s.lambdas().iter().enumerate() {
            let mut row = vec![p.to_string(), i.to_string(), l.to_string()];
            if let Some(e) = expected {
                row.push(e[i].to_string());
            }
            t.push(row);
        }
        if let Some(e) = expected {
            if s.lambdas() != e.as_slice() && violation.is_none() {
                violation = Some(format!(
                    "pair {p}: constructed spectrum {e:?}, recovered {:?}",
                    s.lambdas()
                ));
            }
        }
    }
    let mut out = Outcome::new(t);
    out.summary.insert("pairs".into(), json!(pairs.len()));
    out.violation = violation.map(|w| format!("spectrum recovery failed: {w}"));
    Ok(out)
}

fn volumes(cfg: &LoadedConfig) -> Run {
    let pairs = cfg.pairs()?;
    let mut t = Table::new(&["pair", "vol", "d1", "dinf"]);
    let mut violation = None;
    for (p, (a, b, _)) in pairs.iter().enumerate() {
        let v = vol(a, b)?;
        let det = vol_by_determinant(a, b)?;
        if v != det && violation.is_none() {
            violation = Some(format!(
                "pair {p}: spectral vol {v} but determinant vol {det}"
            ));
        }
        t.push(vec![
            p.to_string(),
            v.to_string(),
            d1(a, b)?.to_string(),
            dinf(a, b)?.to_string(),
        ]);
    }
    let mut out = Outcome::new(t);
    out.violation = violation;
    Ok(out)
}

fn graded(cfg: &LoadedConfig, field: &str) -> Result<GradedNorm, RunError> {
    Ok(GradedNorm::new(cfg.spec(field)?)?)
}

fn asymptotics(cfg: &LoadedConfig) -> Run {
    let (a, b) = (graded(cfg, "a")?, graded(cfg, "b")?);
    let degrees = cfg.required("degrees", &cfg.config.degrees)?;
    let mut summary = Map::new();
    let report = match &cfg.config.tol {
        Some(tol) => {
            let (equivalent, report) = equivalence_test(&a, &b, degrees, tol)?;
            summary.insert("equivalent".into(), json!(equivalent));
            report
        }
        None => spectral_sequence(&a, &b, degrees)?,
    };
    if let Some(x) = report.extrapolated_vol() {
        summary.insert("extrapolated_vol".into(), json!(x.to_string()));
    }
    let mut out = Outcome::new(Table::from_csv(&report.to_csv()));
    out.summary = summary;
    Ok(out)
}

fn theorem_b(cfg: &LoadedConfig) -> Run {
    let degrees = cfg.required("degrees", &cfg.config.degrees)?;
    let table = theorem_b_experiment(&cfg.spec("a")?, &cfg.spec("b")?, degrees)?;
    Ok(Outcome::new(Table::from_csv(&table.to_csv())))
}

fn theorem_c(cfg: &LoadedConfig) -> Run {
    let degrees = cfg.required("degrees", &cfg.config.degrees)?;
    let ks = cfg.required("ks", &cfg.config.ks)?;
    let table = theorem_c_experiment(&cfg.spec("a")?, &cfg.spec("b")?, ks, degrees)?;
    let mut out = Outcome::new(Table::from_csv(&table.to_csv()));
    out.summary
        .insert("vol".into(), json!(table.vol.to_string()));
    Ok(out)
}

fn order(cfg: &LoadedConfig, d: usize) -> MonomialOrder {
    MonomialOrder {
        kind: cfg.config.order.unwrap_or(OrderKind::Lex),
        d,
    }
}

/// Largest degree covered by the submultiplicativity audit of `okounkov`.
const SUBMULT_MAX_DEGREE: u32 = 8;

fn okounkov(cfg: &LoadedConfig) -> Run {
    let g = graded(cfg, "a")?;
    let level = *cfg.required("level", &cfg.config.level)?;
    let phi = phi_table(&g, level, &order(cfg, g.n()))?;
    let mut out = Outcome::new(Table::from_csv(&phi.to_csv()));
    out.summary.insert(
        "theta".into(),
        json!(theta(&phi, level)?.estimate.to_string()),
    );
    if let Some(v) = phi.superadditivity_violation(level) {
        out.violation = Some(format!(
            "Φ is not superadditive: Φ({}, {:?}) + Φ({}, {:?}) = {} > {}",
            v.m, v.alpha, v.n, v.beta, v.bound, v.value
        ));
        return Ok(out);
    }
    let top = level.min(SUBMULT_MAX_DEGREE);
    if top >= 2 {
        let mut rng = crate::audit_rng(cfg.config.seed, 1);
        let report = submultiplicativity_check(&g, top, cfg.config.samples.unwrap_or(4), &mut rng)?;
        out.summary
            .insert("products_checked".into(), json!(report.products_checked));
        if let Some(v) = report.violation {
            out.violation = Some(format!(
                "submultiplicativity fails in degrees ({}, {}): ν(s·s') = {} < {}",
                v.m, v.n, v.product, v.bound
            ));
        }
    }
    Ok(out)
}

fn chebyshev(cfg: &LoadedConfig) -> Run {
    let g = graded(cfg, "a")?;
    let level = *cfg.required("level", &cfg.config.level)?;
    let q = *cfg.required("grid", &cfg.config.grid)?;
    if q == 0 {
        return Err(RunError::Config(
            "config: field `grid` must be positive".into(),
        ));
    }
    let phi = phi_table(&g, level, &order(cfg, g.n()))?;
    let grid = simplex_grid(g.n(), q);
    let values = chebyshev_transform(&phi, level, &grid)?;
    let mut header: Vec<String> = (1..=g.n()).map(|i| format!("x{i}")).collect();
    header.push("value".into());
    let mut t = Table {
        header,
        rows: Vec::new(),
    };
    for (x, v) in grid.iter().zip(values) {
        let mut row: Vec<String> = x.iter().map(ToString::to_string).collect();
        row.push(v.map_or_else(|| "-inf".into(), |v| v.to_string()));
        t.push(row);
    }
    Ok(Outcome::new(t))
}

fn equidistribution(cfg: &LoadedConfig) -> Run {
    let g = graded(cfg, "a")?;
    let ks = cfg.required("ks", &cfg.config.ks)?;
    let top = *ks
        .last()
        .ok_or_else(|| RunError::Config("config: field `ks` is empty".into()))?;
    let level = cfg.config.level.unwrap_or(top).max(top);
    let phi = phi_table(&g, level, &order(cfg, g.n()))?;
    let report = equidistribution_check(&phi, ks, level, cfg.config.grid.unwrap_or(16))?;
    let mut out = Outcome::new(Table::from_csv(&report.to_csv()));
    out.summary.insert("exact".into(), json!(report.exact));
    if let Some(r) = report.rows.iter().find(|r| r.tail_mismatches > 0) {
        out.violation = Some(format!(
            "k = {}: {} superlevel masses differ from the lattice-count ratios",
            r.k, r.tail_mismatches
        ));
    }
    Ok(out)
}

fn fujita(cfg: &LoadedConfig) -> Run {
    let level = *cfg.required("level", &cfg.config.level)?;
    let ks = cfg.required("ks", &cfg.config.ks)?;
    let gamma = cfg
        .required("semigroup", &cfg.config.semigroup)?
        .build(level);
    let report = fujita_check(&gamma, ks, level)?;
    let mut out = Outcome::new(Table::from_csv(&report.to_csv()));
    out.summary.insert(
        "compact_slice".into(),
        serde_json::to_value(&report.compact_slice).expect("audit serializes"),
    );
    if let Some(r) = report.rows.iter().find(|r| !r.inclusion_holds) {
        out.violation = Some(format!(
            "k = {}: Γ^k is not contained in the rescaled Γ",
            r.k
        ));
    }
    Ok(out)
}
