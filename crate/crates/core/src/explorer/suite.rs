//! Structural checks over an enumerated exchange graph.

use std::collections::{BTreeMap, BTreeSet, HashMap, VecDeque};
use std::fmt;

use itertools::Itertools;
use petgraph::graph::UnGraph;
use serde::Serialize;

use super::{enumerate, EnumLimits, ExchangeGraph};
use crate::laurent::{DenominatorVector, LaurentPoly};
use crate::seed::{ExtendedExchangeMatrix, Seed, SeedError};

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Check {
    pub name: String,
    pub passed: bool,
    /// Counterexample or a short summary.
    pub detail: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ConjectureReport {
    pub checks: Vec<Check>,
}

impl ConjectureReport {
    pub fn all_passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn get(&self, name: &str) -> Option<&Check> {
        self.checks.iter().find(|c| c.name == name)
    }
}

impl fmt::Display for ConjectureReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for c in &self.checks {
            let mark = if c.passed { "pass" } else { "FAIL" };
            writeln!(f, "{mark:4} {}: {}", c.name, c.detail)?;
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SuiteOptions {
    /// Cluster monomials up to this total degree are compared by δ.
    pub monomial_degree: usize,
    /// Re-expand with respect to every vertex, not just the root.
    pub positivity_all_bases: bool,
    /// Also compare with the graph of the principal part alone.
    pub principal_part_comparison: bool,
}

impl Default for SuiteOptions {
    fn default() -> Self {
        SuiteOptions {
            monomial_degree: 3,
            positivity_all_bases: true,
            principal_part_comparison: false,
        }
    }
}

/// Multiplies out every cluster monomial of degree 1..=`degree` and compares
/// the δ-vectors of distinct products.
pub fn distinct_monomial_denominators(
    clusters: &[Vec<&LaurentPoly>],
    ex: &[usize],
    degree: usize,
) -> Result<Check, SeedError> {
    let name = "distinct cluster monomials have distinct denominators";
    let mut by_delta: HashMap<DenominatorVector, LaurentPoly> = HashMap::new();
    let mut monomials = BTreeSet::new();
    for cluster in clusters {
        for d in 1..=degree {
            for combo in (0..cluster.len()).combinations_with_replacement(d) {
                let product = combo
                    .iter()
                    .map(|&i| cluster[i].clone())
                    .reduce(|a, b| &a * &b)
                    .expect("degree is positive");
                if !monomials.insert(product.clone()) {
                    continue;
                }
                let delta = product.denominator_vector(ex)?;
                if let Some(other) = by_delta.insert(delta.clone(), product.clone()) {
                    return Ok(check(
                        name,
                        false,
                        format!("{other} and {product} share δ = {:?}", delta.as_slice()),
                    ));
                }
            }
        }
    }
    Ok(check(name, true, format!("{} monomials up to degree {degree}", monomials.len())))
}

pub(crate) fn check(name: &str, passed: bool, detail: impl Into<String>) -> Check {
    Check {
        name: name.to_string(),
        passed,
        detail: detail.into(),
    }
}

impl ExchangeGraph {
    pub fn check_conjecture_suite(&self, opts: SuiteOptions) -> Result<ConjectureReport, SeedError> {
        let mut checks = vec![
            self.check_cluster_determines_seed(),
            self.check_variable_subgraphs_connected(),
            self.check_acyclic_subgraph_connected(),
            self.check_distinct_denominators(opts.monomial_degree)?,
            self.check_positivity(opts.positivity_all_bases)?,
        ];
        if opts.principal_part_comparison {
            checks.push(self.check_principal_part_graph()?);
        }
        Ok(ConjectureReport { checks })
    }

    fn cluster_set(&self, v: usize) -> BTreeSet<&LaurentPoly> {
        self.vertices[v].seed.cluster().iter().collect()
    }

    pub fn check_cluster_determines_seed(&self) -> Check {
        let mut seen: HashMap<BTreeSet<&LaurentPoly>, usize> = HashMap::new();
        for v in 0..self.len() {
            if let Some(&w) = seen.get(&self.cluster_set(v)) {
                return check(
                    "cluster determines seed",
                    false,
                    format!("vertices {w} and {v} share a cluster"),
                );
            }
            seen.insert(self.cluster_set(v), v);
        }
        check("cluster determines seed", true, format!("{} distinct clusters", seen.len()))
    }

    /// Connected components of the subgraph induced on `keep`.
    fn induced_components(&self, keep: &[bool]) -> usize {
        let mut seen = vec![false; self.len()];
        let mut components = 0;
        for start in 0..self.len() {
            if !keep[start] || seen[start] {
                continue;
            }
            components += 1;
            seen[start] = true;
            let mut queue = VecDeque::from([start]);
            while let Some(a) = queue.pop_front() {
                for &(_, b) in self.neighbors(a) {
                    if keep[b] && !seen[b] {
                        seen[b] = true;
                        queue.push_back(b);
                    }
                }
            }
        }
        components
    }

    pub fn check_variable_subgraphs_connected(&self) -> Check {
        let name = "seeds containing a variable are connected";
        let vars = self.cluster_variables();
        for x in &vars {
            let keep: Vec<bool> = self
                .vertices
                .iter()
                .map(|v| v.seed.exchangeable().contains(&x))
                .collect();
            if self.induced_components(&keep) != 1 {
                return check(name, false, format!("{x}"));
            }
        }
        check(name, true, format!("{} variables", vars.len()))
    }

    pub fn check_acyclic_subgraph_connected(&self) -> Check {
        let name = "acyclic seeds are connected";
        let keep: Vec<bool> = self.vertices.iter().map(|v| v.seed.is_acyclic()).collect();
        let count = keep.iter().filter(|&&b| b).count();
        let components = self.induced_components(&keep);
        check(
            name,
            components <= 1,
            format!("{count} acyclic seeds in {components} component(s)"),
        )
    }

    /// Cluster monomials of degree 1..=`degree` have pairwise distinct
    /// δ-vectors with respect to the root's exchangeable variables.
    pub fn check_distinct_denominators(&self, degree: usize) -> Result<Check, SeedError> {
        let clusters: Vec<Vec<&LaurentPoly>> =
            self.vertices.iter().map(|v| v.seed.exchangeable()).collect();
        distinct_monomial_denominators(&clusters, self.root().ex(), degree)
    }

    /// Nonnegative coefficients of every cluster variable in the cluster of
    /// each base vertex (or only the root).
    pub fn check_positivity(&self, all_bases: bool) -> Result<Check, SeedError> {
        let name = "positivity";
        let bases = if all_bases { self.len() } else { 1 };
        for base in 0..bases {
            let seeds = self.reexpanded(base)?;
            for s in &seeds {
                if let Some(x) = s.exchangeable().into_iter().find(|x| !x.has_nonnegative_coeffs()) {
                    return Ok(check(name, false, format!("base vertex {base}: {x}")));
                }
            }
        }
        Ok(check(name, true, format!("{bases} base cluster(s)")))
    }

    fn unlabeled(&self) -> UnGraph<(), ()> {
        let mut g = UnGraph::new_undirected();
        let nodes: Vec<_> = (0..self.len()).map(|_| g.add_node(())).collect();
        for e in self.edges() {
            g.add_edge(nodes[e.a], nodes[e.b], ());
        }
        g
    }

    /// Re-enumerates from the principal part with no frozen rows and compares
    /// unlabeled graphs. Only finite, small graphs are compared.
    pub fn check_principal_part_graph(&self) -> Result<Check, SeedError> {
        let name = "graph depends only on the principal part";
        let principal = Seed::initial(
            crate::laurent::VarSet::numbered("x", self.rank()),
            ExtendedExchangeMatrix::from_parts(self.root().principal_part(), (0..self.rank()).collect())?,
        )?;
        let limits = EnumLimits::new(self.len().max(1) * 2, 64)?;
        let other = enumerate(&principal, limits)?;
        if !self.verdict().is_finite() || !other.verdict().is_finite() {
            return Ok(check(name, true, "skipped: graph not finite"));
        }
        let same = self.len() == other.len()
            && self.edges().len() == other.edges().len()
            && petgraph::algo::is_isomorphic(&self.unlabeled(), &other.unlabeled());
        Ok(check(
            name,
            same,
            format!("{} vs {} vertices", self.len(), other.len()),
        ))
    }

    /// δ-vectors of all cluster variables, w.r.t. the root's exchangeable variables.
    pub fn denominator_table(&self) -> Result<BTreeMap<LaurentPoly, DenominatorVector>, SeedError> {
        let ex = self.root().ex().to_vec();
        self.cluster_variables()
            .into_iter()
            .map(|x| {
                let d = x.denominator_vector(&ex)?;
                Ok((x, d))
            })
            .collect()
    }
}
