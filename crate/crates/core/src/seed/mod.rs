//! Seeds of geometric type and their mutations.
//!
//! A [`Seed`] pairs an extended cluster (one [`LaurentPoly`] per row of the
//! exchange matrix, always expressed in the variables of the initial seed)
//! with an [`ExtendedExchangeMatrix`]. Row labels are 0-based in the API;
//! error messages and the JSON format use 1-based labels.

mod matrix;

use std::sync::Arc;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::laurent::{LaurentError, LaurentPoly, ParseError, VarSet};

pub use matrix::{find_skew_symmetrizer, integer_rank, is_acyclic, ExtendedExchangeMatrix};

fn labels(ks: &[usize]) -> String {
    ks.iter().map(|k| (k + 1).to_string()).collect::<Vec<_>>().join(", ")
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SeedError {
    #[error("index {} is not exchangeable; valid indices: {}", .k + 1, labels(.valid))]
    NotExchangeable { k: usize, valid: Vec<usize> },
    #[error("exchange matrix is not skew-symmetrizable (witness pair {}, {})", .i + 1, .k + 1)]
    NotSkewSymmetrizable { i: usize, k: usize },
    #[error("extended exchange matrix has rank {rank}, expected full rank {n}")]
    RankDeficient { rank: usize, n: usize },
    #[error("malformed seed: {0}")]
    Shape(String),
    #[error("exchange in direction {} is not a Laurent polynomial", .k + 1)]
    LaurentViolation { k: usize },
    #[error("integer overflow in matrix mutation")]
    Overflow,
    #[error("seed is not acyclic")]
    NotAcyclic,
    #[error("operation requires an initial seed (cluster entries equal to the variables)")]
    NotInitial,
    #[error(transparent)]
    Laurent(#[from] LaurentError),
    #[error("cluster entry {index}: {source}")]
    Parse { index: usize, source: ParseError },
    #[error("seed JSON {line}:{column}: {message}")]
    Json {
        line: usize,
        column: usize,
        message: String,
    },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Seed {
    vars: Arc<VarSet>,
    cluster: Vec<LaurentPoly>,
    matrix: ExtendedExchangeMatrix,
}

/// Relabeling-invariant fingerprint of a seed.
///
/// Exchangeable entries are sorted by the term order (ties broken by their
/// matrix columns), the matrix rows and columns are permuted to match, and
/// frozen rows stay in their original order.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct CanonicalSeed {
    pub exchangeable: Vec<LaurentPoly>,
    pub frozen: Vec<LaurentPoly>,
    pub matrix: Vec<Vec<i64>>,
}

/// Generators `c^{±1}, x_k, x'_k` of the cluster algebra of an acyclic seed.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AcyclicPresentation {
    /// `(c, c^{-1})` for every frozen position.
    pub frozen_units: Vec<(LaurentPoly, LaurentPoly)>,
    /// `(k, x_k, x'_k)` for every exchangeable position, in column order.
    pub exchange_pairs: Vec<(usize, LaurentPoly, LaurentPoly)>,
    /// Witness linear order of the exchangeable rows.
    pub order: Vec<usize>,
}

impl AcyclicPresentation {
    pub fn generators(&self) -> Vec<LaurentPoly> {
        let mut out = Vec::new();
        for (c, inv) in &self.frozen_units {
            out.push(c.clone());
            out.push(inv.clone());
        }
        for (_, x, x_new) in &self.exchange_pairs {
            out.push(x.clone());
            out.push(x_new.clone());
        }
        out
    }
}

impl Seed {
    /// The seed whose extended cluster is the variables themselves.
    pub fn initial(vars: Arc<VarSet>, matrix: ExtendedExchangeMatrix) -> Result<Seed, SeedError> {
        let cluster = (0..vars.len()).map(|i| LaurentPoly::var(&vars, i)).collect();
        Seed::with_cluster(vars, cluster, matrix)
    }

    pub fn with_cluster(
        vars: Arc<VarSet>,
        cluster: Vec<LaurentPoly>,
        matrix: ExtendedExchangeMatrix,
    ) -> Result<Seed, SeedError> {
        if vars.len() != matrix.m() || cluster.len() != matrix.m() {
            return Err(SeedError::Shape(format!(
                "{} variables and {} cluster entries for a matrix with {} rows",
                vars.len(),
                cluster.len(),
                matrix.m()
            )));
        }
        if let Some(i) = cluster.iter().position(|p| p.vars() != &vars) {
            return Err(SeedError::Shape(format!("cluster entry {} uses other variables", i + 1)));
        }
        if let Some(i) = cluster.iter().position(LaurentPoly::is_zero) {
            return Err(SeedError::Shape(format!("cluster entry {} is zero", i + 1)));
        }
        Ok(Seed {
            vars,
            cluster,
            matrix,
        })
    }

    /// Square exchange matrix, no frozen rows, variables `x1..xn`.
    pub fn from_exchange_matrix(b: Vec<Vec<i64>>) -> Result<Seed, SeedError> {
        let matrix = ExtendedExchangeMatrix::square(b)?;
        Seed::initial(VarSet::numbered("x", matrix.m()), matrix)
    }

    pub fn vars(&self) -> &Arc<VarSet> {
        &self.vars
    }

    pub fn cluster(&self) -> &[LaurentPoly] {
        &self.cluster
    }

    pub fn matrix(&self) -> &ExtendedExchangeMatrix {
        &self.matrix
    }

    pub fn ex(&self) -> &[usize] {
        self.matrix.ex()
    }

    pub fn n(&self) -> usize {
        self.matrix.n()
    }

    pub fn m(&self) -> usize {
        self.matrix.m()
    }

    /// Cluster entries at the exchangeable positions, in column order.
    pub fn exchangeable(&self) -> Vec<&LaurentPoly> {
        self.ex().iter().map(|&k| &self.cluster[k]).collect()
    }

    pub fn frozen(&self) -> Vec<&LaurentPoly> {
        self.matrix.frozen().into_iter().map(|k| &self.cluster[k]).collect()
    }

    pub fn principal_part(&self) -> Vec<Vec<i64>> {
        self.matrix.principal_part()
    }

    pub fn is_initial(&self) -> bool {
        self.cluster
            .iter()
            .enumerate()
            .all(|(i, p)| *p == LaurentPoly::var(&self.vars, i))
    }

    /// Same matrix, cluster replaced by the variables: the seed viewed as the
    /// initial seed of its own mutation class.
    pub fn rebased(&self) -> Seed {
        Seed::initial(self.vars.clone(), self.matrix.clone()).expect("shape already checked")
    }

    /// The two monomials `(∏_{b_ik>0} x_i^{b_ik}, ∏_{b_ik<0} x_i^{-b_ik})`
    /// built from the current extended cluster. Empty products are 1.
    pub fn exchange_monomials(&self, k: usize) -> Result<(LaurentPoly, LaurentPoly), SeedError> {
        let col = self.matrix.column_of(k).ok_or_else(|| SeedError::NotExchangeable {
            k,
            valid: self.ex().to_vec(),
        })?;
        let mut plus = LaurentPoly::one(&self.vars);
        let mut minus = LaurentPoly::one(&self.vars);
        for (i, x) in self.cluster.iter().enumerate() {
            let b = self.matrix.get(i, col);
            let e = u32::try_from(b.unsigned_abs()).map_err(|_| SeedError::Overflow)?;
            if b > 0 {
                plus = &plus * &x.pow(e);
            } else if b < 0 {
                minus = &minus * &x.pow(e);
            }
        }
        Ok((plus, minus))
    }

    pub fn exchange_polynomial(&self, k: usize) -> Result<LaurentPoly, SeedError> {
        let (plus, minus) = self.exchange_monomials(k)?;
        Ok(&plus + &minus)
    }

    /// The new cluster variable `x'_k` without building the mutated seed.
    pub fn exchanged_variable(&self, k: usize) -> Result<LaurentPoly, SeedError> {
        let numerator = self.exchange_polynomial(k)?;
        numerator
            .try_exact_div(&self.cluster[k])
            .map_err(|e| match e {
                LaurentError::NotDivisible => SeedError::LaurentViolation { k },
                other => other.into(),
            })
    }

    /// Seed mutation in direction `k`.
    pub fn mutate(&self, k: usize) -> Result<Seed, SeedError> {
        let matrix = self.matrix.mutate(k)?;
        let x_new = self.exchanged_variable(k)?;
        let mut cluster = self.cluster.clone();
        cluster[k] = x_new;
        Ok(Seed {
            vars: self.vars.clone(),
            cluster,
            matrix,
        })
    }

    pub fn mutate_sequence(&self, ks: &[usize]) -> Result<Seed, SeedError> {
        ks.iter().try_fold(self.clone(), |s, &k| s.mutate(k))
    }

    /// Upper bound on the number of terms in the two exchange monomials of
    /// direction `k`, saturating. Cheap; used to keep randomized mutation
    /// walks within a size budget.
    pub fn exchange_term_bound(&self, k: usize) -> u64 {
        let Some(col) = self.matrix.column_of(k) else {
            return 0;
        };
        let mut plus = 1u64;
        let mut minus = 1u64;
        for (i, x) in self.cluster.iter().enumerate() {
            let b = self.matrix.get(i, col);
            let bound = (x.len() as u64).saturating_pow(b.unsigned_abs().min(64) as u32);
            if b > 0 {
                plus = plus.saturating_mul(bound);
            } else if b < 0 {
                minus = minus.saturating_mul(bound);
            }
        }
        plus.saturating_add(minus)
    }

    pub fn canonical(&self) -> CanonicalSeed {
        let ex = self.ex();
        let mut order: Vec<usize> = (0..ex.len()).collect();
        let columns: Vec<Vec<i64>> = (0..ex.len()).map(|c| self.matrix.column(c)).collect();
        order.sort_by(|&a, &b| {
            self.cluster[ex[a]]
                .cmp(&self.cluster[ex[b]])
                .then_with(|| columns[a].cmp(&columns[b]))
        });
        let frozen_rows = self.matrix.frozen();
        let rows: Vec<usize> = order
            .iter()
            .map(|&c| ex[c])
            .chain(frozen_rows.iter().copied())
            .collect();
        let matrix = rows
            .iter()
            .map(|&r| order.iter().map(|&c| self.matrix.get(r, c)).collect())
            .collect();
        CanonicalSeed {
            exchangeable: order.iter().map(|&c| self.cluster[ex[c]].clone()).collect(),
            frozen: frozen_rows.iter().map(|&r| self.cluster[r].clone()).collect(),
            matrix,
        }
    }

    /// Topological witness order (as row labels) when the principal part is acyclic.
    pub fn acyclic_order(&self) -> Option<Vec<usize>> {
        is_acyclic(&self.principal_part()).map(|o| o.into_iter().map(|c| self.ex()[c]).collect())
    }

    pub fn is_acyclic(&self) -> bool {
        self.acyclic_order().is_some()
    }

    pub fn acyclic_presentation(&self) -> Result<AcyclicPresentation, SeedError> {
        let order = self.acyclic_order().ok_or(SeedError::NotAcyclic)?;
        let one = LaurentPoly::one(&self.vars);
        let frozen_units = self
            .frozen()
            .into_iter()
            .map(|c| Ok((c.clone(), one.try_exact_div(c)?)))
            .collect::<Result<Vec<_>, LaurentError>>()?;
        let exchange_pairs = self
            .ex()
            .iter()
            .map(|&k| Ok((k, self.cluster[k].clone(), self.exchanged_variable(k)?)))
            .collect::<Result<Vec<_>, SeedError>>()?;
        Ok(AcyclicPresentation {
            frozen_units,
            exchange_pairs,
            order,
        })
    }

    /// Decides whether `y` (in the variables of this initial seed) is a
    /// Laurent polynomial in the extended cluster adjacent in direction `k`.
    ///
    /// `x_k` is replaced by `P_k / x'_k`, where `P_k` is the exchange
    /// polynomial and the variable slot `k` is reinterpreted as `x'_k`; the
    /// resulting numerator must be divisible by the denominator in the
    /// Laurent ring of the adjacent cluster.
    pub fn upper_membership(&self, y: &LaurentPoly, k: usize) -> Result<bool, SeedError> {
        if !self.is_initial() {
            return Err(SeedError::NotInitial);
        }
        let exchange = self.exchange_polynomial(k)?;
        let x_new = LaurentPoly::var(&self.vars, k);
        let (num, den) = y.substitute_fraction(k, &exchange, &x_new)?;
        match num.try_exact_div(&den) {
            Ok(_) => Ok(true),
            Err(LaurentError::NotDivisible) => Ok(false),
            Err(e) => Err(e.into()),
        }
    }

    /// Membership in the intersection of the Laurent ring of this seed and of
    /// all adjacent clusters. `y` is a Laurent polynomial here by type.
    pub fn upper_membership_all(&self, y: &LaurentPoly) -> Result<bool, SeedError> {
        for &k in self.ex() {
            if !self.upper_membership(y, k)? {
                return Ok(false);
            }
        }
        Ok(true)
    }

    pub fn to_json(&self) -> SeedJson {
        SeedJson {
            v: Some(1),
            vars: self.vars.names().to_vec(),
            ex: self.ex().iter().map(|k| k + 1).collect(),
            b: self.matrix.entries().to_vec(),
            cluster: Some(self.cluster.iter().map(ToString::to_string).collect()),
        }
    }

    pub fn from_json(doc: &SeedJson) -> Result<Seed, SeedError> {
        if let Some(v) = doc.v {
            if v != 1 {
                return Err(SeedError::Shape(format!("unsupported schema version {v}")));
            }
        }
        let vars = VarSet::new(doc.vars.iter().cloned())?;
        let ex = doc
            .ex
            .iter()
            .map(|&k| {
                k.checked_sub(1)
                    .ok_or_else(|| SeedError::Shape("exchangeable indices are 1-based".into()))
            })
            .collect::<Result<Vec<_>, _>>()?;
        let matrix = ExtendedExchangeMatrix::new(doc.b.clone(), ex)?;
        match &doc.cluster {
            None => Seed::initial(vars, matrix),
            Some(entries) => {
                let cluster = entries
                    .iter()
                    .enumerate()
                    .map(|(index, s)| {
                        LaurentPoly::parse(s, &vars).map_err(|source| SeedError::Parse { index: index + 1, source })
                    })
                    .collect::<Result<Vec<_>, _>>()?;
                Seed::with_cluster(vars, cluster, matrix)
            }
        }
    }

    pub fn from_json_str(text: &str) -> Result<Seed, SeedError> {
        let doc: SeedJson = serde_json::from_str(text).map_err(|e| SeedError::Json {
            line: e.line(),
            column: e.column(),
            message: e.to_string(),
        })?;
        Seed::from_json(&doc)
    }
}

/// `{"v":1,"vars":[..],"ex":[1-based],"B":[[..]],"cluster":[..]}`
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SeedJson {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub v: Option<u32>,
    pub vars: Vec<String>,
    pub ex: Vec<usize>,
    #[serde(rename = "B")]
    pub b: Vec<Vec<i64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub cluster: Option<Vec<String>>,
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_rational::BigRational;

    fn rank2(b: i64, c: i64) -> Seed {
        Seed::from_exchange_matrix(vec![vec![0, b], vec![-c, 0]]).unwrap()
    }

    fn p(s: &str, seed: &Seed) -> LaurentPoly {
        LaurentPoly::parse(s, seed.vars()).unwrap()
    }

    #[test]
    fn rank_two_first_exchange() {
        let s = rank2(1, 1);
        let t = s.mutate(0).unwrap();
        assert_eq!(t.cluster()[0], p("x2*x1^-1 + x1^-1", &s));
        assert_eq!(t.cluster()[1], p("x2", &s));
        assert_eq!(t.matrix().entries(), &[vec![0, -1], vec![1, 0]]);
    }

    #[test]
    fn mutation_is_involutive() {
        let s = rank2(2, 1);
        for k in 0..2 {
            let back = s.mutate(k).unwrap().mutate(k).unwrap();
            assert_eq!(back, s);
            assert_eq!(back.canonical(), s.canonical());
        }
    }

    #[test]
    fn pentagon_returns_to_initial_cluster() {
        // oracle: iterate y_{m+1} = (y_m + 1) / y_{m-1} at a rational point
        let (a, b) = (BigRational::from_integer(2.into()), BigRational::from_integer(5.into()));
        let mut ys = vec![a.clone(), b.clone()];
        for i in 2..7 {
            let next = (&ys[i - 1] + BigRational::from_integer(1.into())) / &ys[i - 2];
            ys.push(next);
        }
        assert_eq!((&ys[5], &ys[6]), (&a, &b));

        let s = rank2(1, 1);
        let t = s.mutate_sequence(&[0, 1, 0, 1, 0]).unwrap();
        let mut got: Vec<_> = t.exchangeable().into_iter().cloned().collect();
        got.sort();
        let mut want: Vec<_> = s.exchangeable().into_iter().cloned().collect();
        want.sort();
        assert_eq!(got, want);
        // the pentagon closes with the two positions swapped
        assert_eq!(t.cluster()[0], p("x2", &s));
        assert_eq!(t.canonical(), s.canonical());
    }

    #[test]
    fn exchange_consistency_with_frozen_row() {
        let m = ExtendedExchangeMatrix::new(vec![vec![0, 1], vec![-1, 0], vec![2, -1]], vec![0, 1])
            .unwrap();
        let s = Seed::initial(VarSet::numbered("x", 3), m).unwrap();
        let t = s.mutate_sequence(&[0, 1, 0]).unwrap();
        for &k in t.ex() {
            let u = t.mutate(k).unwrap();
            let lhs = &t.cluster()[k] * &u.cluster()[k];
            assert_eq!(lhs, t.exchange_polynomial(k).unwrap());
            assert_eq!(u.cluster()[2], s.cluster()[2]);
        }
    }

    #[test]
    fn mutation_rejects_frozen_direction() {
        let m = ExtendedExchangeMatrix::new(vec![vec![0, 1], vec![-1, 0], vec![1, 0]], vec![0, 1])
            .unwrap();
        let s = Seed::initial(VarSet::numbered("x", 3), m).unwrap();
        let err = s.mutate(2).unwrap_err();
        assert_eq!(err.to_string(), "index 3 is not exchangeable; valid indices: 1, 2");
    }

    #[test]
    fn acyclic_presentations() {
        let s = rank2(1, 1);
        let pres = s.acyclic_presentation().unwrap();
        let gens = pres.generators();
        let want = [
            p("x1", &s),
            p("x2*x1^-1 + x1^-1", &s),
            p("x2", &s),
            p("x1*x2^-1 + x2^-1", &s),
        ];
        assert_eq!(gens, want);

        let m = ExtendedExchangeMatrix::new(vec![vec![0, 1], vec![-1, 0], vec![1, 0]], vec![0, 1])
            .unwrap();
        let s = Seed::initial(VarSet::numbered("x", 3), m).unwrap();
        let pres = s.acyclic_presentation().unwrap();
        assert_eq!(pres.frozen_units, vec![(p("x3", &s), p("x3^-1", &s))]);
        assert_eq!(pres.exchange_pairs[0].2, p("x2*x1^-1 + x3*x1^-1", &s));

        let cyc = Seed::from_exchange_matrix(vec![vec![0, 1, -1], vec![-1, 0, 1], vec![1, -1, 0]]);
        assert_eq!(cyc.unwrap().acyclic_presentation(), Err(SeedError::NotAcyclic));
        let m = ExtendedExchangeMatrix::new(
            vec![vec![0, 1, -1], vec![-1, 0, 1], vec![1, -1, 0], vec![1, 0, 0]],
            vec![0, 1, 2],
        )
        .unwrap();
        let s = Seed::initial(VarSet::numbered("x", 4), m).unwrap();
        assert_eq!(s.acyclic_presentation(), Err(SeedError::NotAcyclic));
    }

    #[test]
    fn upper_membership_examples() {
        let s = rank2(1, 1);
        for k in 0..2 {
            for y in s.exchangeable() {
                assert!(s.upper_membership(y, k).unwrap());
            }
        }
        assert!(s.upper_membership(&p("x1", &s), 0).unwrap());
        let x1_new = s.exchanged_variable(0).unwrap();
        assert!(s.upper_membership(&x1_new, 0).unwrap());
        assert!(s.upper_membership(&x1_new, 1).unwrap());
        // 1/x1 is not Laurent in {x1', x2} since x1^-1 = x1' / (x2 + 1)
        assert!(!s.upper_membership(&p("x1^-1", &s), 0).unwrap());
        assert!(s.upper_membership(&p("x1^-1", &s), 1).unwrap());
        let moved = s.mutate(0).unwrap();
        assert_eq!(moved.upper_membership(&p("x1", &s), 0), Err(SeedError::NotInitial));
    }

    #[test]
    fn json_round_trip_and_errors() {
        let text = r#"{"vars":["a","b","c"],"ex":[1,2],"B":[[0,1],[-1,0],[1,1]]}"#;
        let s = Seed::from_json_str(text).unwrap();
        assert!(s.is_initial());
        let t = s.mutate(1).unwrap();
        let again = Seed::from_json(&t.to_json()).unwrap();
        assert_eq!(again, t);
        let err = Seed::from_json_str("{\"vars\": [\"a\"],\n \"ex\": [1,}").unwrap_err();
        assert!(matches!(err, SeedError::Json { line: 2, .. }));
        let err = Seed::from_json_str(r#"{"vars":["a","b"],"ex":[1,2],"B":[[0,1],[1,0]]}"#)
            .unwrap_err();
        assert!(matches!(err, SeedError::NotSkewSymmetrizable { .. }));
        let err = Seed::from_json_str(r#"{"vars":["a","b"],"ex":[1,2],"B":[[0,1],[-1,0]],"cluster":["a","q"]}"#)
            .unwrap_err();
        assert!(matches!(err, SeedError::Parse { index: 2, .. }));
    }
}
