//! JSON views of a seed as served to clients.

use cluster_core::laurent::LaurentPoly;
use cluster_core::seed::{Seed, SeedError, SeedJson};
use serde::{Deserialize, Serialize};

/// Exchange previews whose monomials could exceed this many terms are skipped.
pub const PREVIEW_TERM_BUDGET: u64 = 200_000;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct VariableJson {
    /// 1-based position in the extended cluster.
    pub index: usize,
    pub exchangeable: bool,
    /// Sum-of-terms form, e.g. `x1^-1*x2 + x1^-1`.
    pub text: String,
    /// Normal form over a monomial, e.g. `(x2 + 1)/x1`.
    pub fraction: String,
    /// Denominator vector w.r.t. the exchangeable initial variables; absent for frozen entries.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub delta: Option<Vec<i64>>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PreviewJson {
    /// 1-based direction.
    pub k: usize,
    /// Right-hand side of the exchange relation `x_k x'_k = P`.
    pub exchange: Option<String>,
    pub variable: Option<String>,
    pub delta: Option<Vec<i64>>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct StateJson {
    pub v: u32,
    pub id: String,
    /// Mutations applied to the initial seed, 1-based.
    pub history: Vec<usize>,
    pub seed: SeedJson,
    pub variables: Vec<VariableJson>,
    pub acyclic: bool,
    /// 1-based exchangeable indices in an order witnessing acyclicity.
    pub acyclic_order: Option<Vec<usize>>,
    pub previews: Vec<PreviewJson>,
}

pub fn delta(x: &LaurentPoly, seed: &Seed) -> Result<Vec<i64>, SeedError> {
    Ok(x.denominator_vector(seed.ex())?.0)
}

pub fn variable(seed: &Seed, i: usize) -> Result<VariableJson, SeedError> {
    let x = &seed.cluster()[i];
    let exchangeable = seed.matrix().is_exchangeable(i);
    Ok(VariableJson {
        index: i + 1,
        exchangeable,
        text: x.to_string(),
        fraction: x.to_fraction_string(),
        delta: exchangeable.then(|| delta(x, seed)).transpose()?,
    })
}

pub fn preview(seed: &Seed, k: usize) -> Result<PreviewJson, SeedError> {
    if seed.exchange_term_bound(k) > PREVIEW_TERM_BUDGET {
        return Ok(PreviewJson {
            k: k + 1,
            exchange: None,
            variable: None,
            delta: None,
        });
    }
    let exchange = seed.exchange_polynomial(k)?;
    let x = seed.exchanged_variable(k)?;
    Ok(PreviewJson {
        k: k + 1,
        exchange: Some(exchange.to_fraction_string()),
        variable: Some(x.to_fraction_string()),
        delta: Some(delta(&x, seed)?),
    })
}

pub fn describe(seed: &Seed, id: &str, history: &[usize]) -> Result<StateJson, SeedError> {
    let order = seed.acyclic_order();
    Ok(StateJson {
        v: 1,
        id: id.to_string(),
        history: history.iter().map(|k| k + 1).collect(),
        seed: seed.to_json(),
        variables: (0..seed.m()).map(|i| variable(seed, i)).collect::<Result<_, _>>()?,
        acyclic: order.is_some(),
        acyclic_order: order.map(|o| o.iter().map(|r| r + 1).collect()),
        previews: seed.ex().iter().map(|&k| preview(seed, k)).collect::<Result<_, _>>()?,
    })
}
