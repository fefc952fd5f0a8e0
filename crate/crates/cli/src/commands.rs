//! Subcommand bodies. Each returns the text to print and an exit status.

use std::fmt::Write as _;
use std::str::FromStr;

use clap::ValueEnum;
use cluster_core::acceptance;
use cluster_core::cartan::{denominator_bijection_check, CartanMatrix};
use cluster_core::classify::classify;
use cluster_core::double_bruhat::{
    parse_double_word, parse_word_entries, verify_adjacent_exchange, ExchangeOutcome, ExchangeReport,
    SymbolicMatrix,
};
use cluster_core::explorer::{enumerate, EnumLimits, ExchangeGraph, GraphFormat, Verdict};
use cluster_core::seed::{Seed, SeedJson};
use serde::Serialize;
use serde_json::json;

use crate::error::CliError;
use crate::state::{self, VariableJson};

pub const EXIT_OK: u8 = 0;
pub const EXIT_FAILED: u8 = 1;
pub const EXIT_CAP: u8 = 3;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, ValueEnum)]
pub enum Format {
    #[default]
    Text,
    Json,
    Dot,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Output {
    pub body: String,
    pub code: u8,
}

impl Output {
    fn ok(body: String) -> Output {
        Output { body, code: EXIT_OK }
    }
}

fn to_json<T: Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string(value).expect("serializable");
    s.push('\n');
    s
}

fn no_dot(command: &str) -> CliError {
    CliError::Input(format!("`{command}` has no dot output; use text or json"))
}

fn matrix_rows(b: &[Vec<i64>]) -> String {
    let width = b.iter().flatten().map(|x| x.to_string().len()).max().unwrap_or(1);
    b.iter()
        .map(|row| {
            let cells: Vec<String> = row.iter().map(|x| format!("{x:>width$}")).collect();
            format!("  [{}]\n", cells.join(" "))
        })
        .collect()
}

#[derive(Serialize)]
struct MutateJson {
    v: u32,
    directions: Vec<usize>,
    steps: Vec<VariableJson>,
    seed: SeedJson,
}

/// Applies `ks` (0-based) in order, reporting each new cluster variable.
pub fn mutate(seed: &Seed, ks: &[usize], format: Format) -> Result<Output, CliError> {
    let mut cur = seed.clone();
    let mut steps = Vec::new();
    for &k in ks {
        cur = cur.mutate(k)?;
        steps.push(state::variable(&cur, k)?);
    }
    let body = match format {
        Format::Dot => return Err(no_dot("mutate")),
        Format::Json => to_json(&MutateJson {
            v: 1,
            directions: ks.iter().map(|k| k + 1).collect(),
            steps,
            seed: cur.to_json(),
        }),
        Format::Text => {
            let mut out = String::new();
            for step in &steps {
                let delta = step.delta.as_ref().expect("mutated entries are exchangeable");
                let name = cur.vars().name(step.index - 1);
                writeln!(out, "mu_{}: {name}' = {}    delta = {:?}", step.index, step.fraction, delta).unwrap();
            }
            writeln!(out, "cluster:").unwrap();
            for i in 0..cur.m() {
                let tag = if cur.matrix().is_exchangeable(i) { "" } else { " (frozen)" };
                writeln!(out, "  {}: {}{tag}", i + 1, cur.cluster()[i].to_fraction_string()).unwrap();
            }
            writeln!(out, "B:").unwrap();
            out.push_str(&matrix_rows(cur.matrix().entries()));
            out
        }
    };
    Ok(Output::ok(body))
}

fn cap_code(g: &ExchangeGraph) -> u8 {
    match g.verdict() {
        Verdict::Finite => EXIT_OK,
        Verdict::ExceededCap { .. } => EXIT_CAP,
    }
}

pub fn verdict_line(g: &ExchangeGraph) -> String {
    match g.verdict() {
        Verdict::Finite => format!(
            "Finite: {} seeds, {} cluster variables",
            g.len(),
            g.cluster_variables().len()
        ),
        Verdict::ExceededCap { cap, limit, growth } => format!(
            "ExceededCap: {cap:?} cap {limit} reached after {} seeds, depth {}; growth {growth:?}",
            g.len(),
            g.depth_reached()
        ),
    }
}

pub fn graph(seed: &Seed, limits: EnumLimits, format: Format) -> Result<Output, CliError> {
    let g = enumerate(seed, limits)?;
    let body = match format {
        Format::Text => format!("{}\n", verdict_line(&g)),
        Format::Json => format!("{}\n", g.export(GraphFormat::Json)),
        Format::Dot => g.export(GraphFormat::Dot),
    };
    Ok(Output {
        body,
        code: cap_code(&g),
    })
}

/// Finite-type test on the principal part; `max_class` bounds the mutation
/// class explored per component.
pub fn classify_seed(seed: &Seed, max_class: usize, format: Format) -> Result<Output, CliError> {
    let c = classify(&seed.principal_part(), max_class)?;
    let code = if c.is_undetermined() { EXIT_CAP } else { EXIT_OK };
    let body = match format {
        Format::Dot => return Err(no_dot("classify")),
        Format::Text => format!("{c}\n"),
        Format::Json => to_json(&json!({
            "v": 1,
            "verdict": c.to_string(),
            "finite": c.is_finite(),
            "undetermined": c.is_undetermined(),
            "components": c.components,
        })),
    };
    Ok(Output { body, code })
}

#[derive(Serialize)]
struct DbcJson {
    v: u32,
    r: usize,
    word: Vec<i64>,
    cartan: Vec<Vec<i64>>,
    btilde: Vec<Vec<i64>>,
    /// 1-based exchangeable positions.
    ex: Vec<usize>,
    minors: Option<Vec<String>>,
    exchanges: Vec<ExchangeReport>,
}

/// `r` is the rank, `family` a Cartan-Killing letter; minors and exchange
/// verification need type A.
pub fn dbc(r: usize, word: &str, family: &str, points: usize, seed: u64, format: Format) -> Result<Output, CliError> {
    let a = CartanMatrix::from_str(&format!("{family}{r}"))?;
    let entries = parse_word_entries(word)?;
    let w = parse_double_word(r, &entries, &a)?;
    let b = w.btilde()?;
    let (minors, exchanges) = if w.is_type_a() {
        let m = SymbolicMatrix::new(r + 1);
        let reports = w
            .ex()
            .iter()
            .map(|&k| verify_adjacent_exchange(&w, k, &m, points, seed))
            .collect::<Result<Vec<_>, _>>()?;
        let minors = w.family()?.iter().map(ToString::to_string).collect();
        (Some(minors), reports)
    } else {
        (None, Vec::new())
    };
    let failed = exchanges.iter().any(|e| !e.outcome.is_verified());
    let body = match format {
        Format::Dot => return Err(no_dot("dbc")),
        Format::Json => to_json(&DbcJson {
            v: 1,
            r,
            word: entries,
            cartan: a.entries().to_vec(),
            btilde: b.entries().to_vec(),
            ex: w.ex().to_vec(),
            minors,
            exchanges,
        }),
        Format::Text => {
            let mut out = String::new();
            writeln!(out, "B~ ({} x {}), exchangeable rows {:?}:", b.m(), b.n(), w.ex()).unwrap();
            out.push_str(&matrix_rows(b.entries()));
            match &minors {
                Some(minors) => {
                    writeln!(out, "minors:").unwrap();
                    for (k, f) in minors.iter().enumerate() {
                        writeln!(out, "  f_{} = {f}", k + 1).unwrap();
                    }
                }
                None => writeln!(out, "minors: type A only; none computed for {family}{r}").unwrap(),
            }
            for e in &exchanges {
                let line = match &e.outcome {
                    ExchangeOutcome::VerifiedExact { quotient } => format!("VerifiedExact: f'_{} = {quotient}", e.k),
                    ExchangeOutcome::VerifiedModDet { quotient, power } => {
                        format!("VerifiedModDet (det^{power}): f'_{} = {quotient}", e.k)
                    }
                    ExchangeOutcome::Failed { witness } => format!("Failed: {witness}"),
                };
                writeln!(out, "k={} {line} ({} random points)", e.k, e.points_checked).unwrap();
            }
            out
        }
    };
    Ok(Output {
        body,
        code: if failed { EXIT_FAILED } else { EXIT_OK },
    })
}

/// δ-vector table of all cluster variables reachable from `seed`.
pub fn denoms_of_seed(seed: &Seed, limits: EnumLimits, format: Format) -> Result<Output, CliError> {
    let g = enumerate(seed, limits)?;
    let table = g.denominator_table()?;
    let body = match format {
        Format::Dot => return Err(no_dot("denoms")),
        Format::Json => to_json(&json!({
            "v": 1,
            "verdict": verdict_line(&g),
            "table": table
                .iter()
                .map(|(x, d)| json!({ "variable": x.to_fraction_string(), "delta": d.as_slice() }))
                .collect::<Vec<_>>(),
        })),
        Format::Text => {
            let mut out = format!("{}\n", verdict_line(&g));
            for (x, d) in &table {
                writeln!(out, "{:?}\t{}", d.as_slice(), x.to_fraction_string()).unwrap();
            }
            out
        }
    };
    Ok(Output {
        body,
        code: cap_code(&g),
    })
}

/// δ-vectors relative to the distinguished seed of `a`, checked against the
/// almost positive roots.
pub fn denoms_of_type(a: &CartanMatrix, limits: EnumLimits, degree: usize, format: Format) -> Result<Output, CliError> {
    let seed = a.distinguished_seed()?;
    let g = enumerate(&seed, limits)?;
    if cap_code(&g) == EXIT_CAP {
        return Ok(Output {
            body: format!("{}\n", verdict_line(&g)),
            code: EXIT_CAP,
        });
    }
    let report = denominator_bijection_check(&g, &seed, a, degree)?;
    let body = match format {
        Format::Dot => return Err(no_dot("denoms")),
        Format::Json => to_json(&json!({
            "v": 1,
            "cartan": a.entries(),
            "table": report
                .table
                .iter()
                .map(|(x, d)| json!({ "variable": x, "delta": d }))
                .collect::<Vec<_>>(),
            "checks": report.checks,
        })),
        Format::Text => format!("{}\n{report}", verdict_line(&g)),
    };
    Ok(Output {
        body,
        code: if report.all_passed() { EXIT_OK } else { EXIT_FAILED },
    })
}

pub fn verify(format: Format) -> Result<Output, CliError> {
    let outcomes = acceptance::all();
    let failed = outcomes.iter().filter(|o| !o.passed).count();
    let body = match format {
        Format::Dot => return Err(no_dot("verify")),
        Format::Json => to_json(&json!({ "v": 1, "outcomes": outcomes })),
        Format::Text => {
            let mut out: String = outcomes.iter().map(|o| format!("{o}\n")).collect();
            writeln!(out, "acceptance: {} passed, {failed} failed", outcomes.len() - failed).unwrap();
            out
        }
    };
    Ok(Output {
        body,
        code: if failed == 0 { EXIT_OK } else { EXIT_FAILED },
    })
}
