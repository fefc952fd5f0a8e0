//! Finite-type Cartan matrices, root systems, Weyl group elements and the
//! bipartite exchange matrix `B(A)`.
//!
//! Convention: `a_ij = <α_j, α_i^∨>` and `s_i(α_j) = α_j - a_ij α_i`, with
//! Bourbaki numbering except that the double bond of `B_n` has
//! `a_{n,n-1} = -2`, `C_n` has `a_{n-1,n} = -2`, `F_4` has `a_{32} = -2`, and
//! `G_2 = [[2,-1],[-3,2]]`.

use std::collections::{BTreeSet, HashMap, HashSet, VecDeque};
use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};
use serde::Serialize;
use thiserror::Error;

use crate::explorer::{distinct_monomial_denominators, Check, ExchangeGraph};
use crate::laurent::LaurentPoly;
use crate::seed::{find_skew_symmetrizer, Seed, SeedError};

/// Closure size beyond which an input is treated as not of finite type.
pub const ROOT_CLOSURE_CAP: usize = 10_000;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CartanError {
    #[error("no finite-type Cartan matrix of type {0}")]
    InvalidType(String),
    #[error("not a Cartan matrix: {0}")]
    NotCartan(String),
    #[error("Dynkin graph is not bipartite")]
    NotBipartite,
    #[error("root closure exceeded {0} vectors; input is not of finite type")]
    NotFiniteType(usize),
    #[error("simple reflection index {0} out of range")]
    BadIndex(usize),
    #[error(transparent)]
    Seed(#[from] SeedError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub enum Family {
    A,
    B,
    C,
    D,
    E,
    F,
    G,
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self:?}")
    }
}

impl Family {
    pub const ALL: [Family; 7] = [
        Family::A,
        Family::B,
        Family::C,
        Family::D,
        Family::E,
        Family::F,
        Family::G,
    ];

    pub fn admits(self, n: usize) -> bool {
        match self {
            Family::A => n >= 1,
            Family::B | Family::C => n >= 2,
            Family::D => n >= 4,
            Family::E => (6..=8).contains(&n),
            Family::F => n == 4,
            Family::G => n == 2,
        }
    }

    /// Number of positive roots of the type `(self, n)`.
    pub fn positive_root_count(self, n: usize) -> usize {
        match self {
            Family::A => n * (n + 1) / 2,
            Family::B | Family::C => n * n,
            Family::D => n * (n - 1),
            Family::E => match n {
                6 => 36,
                7 => 63,
                _ => 120,
            },
            Family::F => 24,
            Family::G => 6,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize)]
pub struct CartanMatrix {
    a: Vec<Vec<i64>>,
    tag: Option<(Family, usize)>,
}

impl CartanMatrix {
    /// Checks `a_ii = 2`, `a_ij <= 0`, matching zero patterns and
    /// symmetrizability.
    pub fn new(a: Vec<Vec<i64>>) -> Result<CartanMatrix, CartanError> {
        let n = a.len();
        if n == 0 || a.iter().any(|r| r.len() != n) {
            return Err(CartanError::NotCartan("matrix must be square and nonempty".into()));
        }
        for i in 0..n {
            if a[i][i] != 2 {
                return Err(CartanError::NotCartan(format!("diagonal entry {} is not 2", i + 1)));
            }
            for j in 0..n {
                if i != j && (a[i][j] > 0 || (a[i][j] == 0) != (a[j][i] == 0)) {
                    return Err(CartanError::NotCartan(format!(
                        "bad off-diagonal pair at ({}, {})",
                        i + 1,
                        j + 1
                    )));
                }
            }
        }
        let m = CartanMatrix { a, tag: None };
        m.symmetrizer()?;
        Ok(m)
    }

    pub fn of_type(family: Family, n: usize) -> Result<CartanMatrix, CartanError> {
        if !family.admits(n) {
            return Err(CartanError::InvalidType(format!("{family}{n}")));
        }
        let mut a = vec![vec![0i64; n]; n];
        for (i, row) in a.iter_mut().enumerate() {
            row[i] = 2;
        }
        let mut bond = |i: usize, j: usize, aij: i64, aji: i64| {
            a[i - 1][j - 1] = aij;
            a[j - 1][i - 1] = aji;
        };
        match family {
            Family::A | Family::B | Family::C => {
                for i in 1..n {
                    bond(i, i + 1, -1, -1);
                }
                if family == Family::B {
                    bond(n - 1, n, -1, -2);
                }
                if family == Family::C {
                    bond(n - 1, n, -2, -1);
                }
            }
            Family::D => {
                for i in 1..n - 1 {
                    bond(i, i + 1, -1, -1);
                }
                bond(n - 2, n, -1, -1);
            }
            Family::E => {
                bond(1, 3, -1, -1);
                bond(2, 4, -1, -1);
                for i in 3..n {
                    bond(i, i + 1, -1, -1);
                }
            }
            Family::F => {
                bond(1, 2, -1, -1);
                bond(2, 3, -1, -2);
                bond(3, 4, -1, -1);
            }
            Family::G => bond(1, 2, -1, -3),
        }
        Ok(CartanMatrix {
            a,
            tag: Some((family, n)),
        })
    }

    pub fn n(&self) -> usize {
        self.a.len()
    }

    pub fn entries(&self) -> &[Vec<i64>] {
        &self.a
    }

    pub fn get(&self, i: usize, j: usize) -> i64 {
        self.a[i][j]
    }

    pub fn tag(&self) -> Option<(Family, usize)> {
        self.tag
    }

    /// Positive `d` with `d_i a_ij = d_j a_ji`.
    pub fn symmetrizer(&self) -> Result<Vec<u64>, CartanError> {
        let n = self.n();
        let skew: Vec<Vec<i64>> = (0..n)
            .map(|i| {
                (0..n)
                    .map(|j| match i.cmp(&j) {
                        std::cmp::Ordering::Less => self.a[i][j],
                        std::cmp::Ordering::Equal => 0,
                        std::cmp::Ordering::Greater => -self.a[i][j],
                    })
                    .collect()
            })
            .collect();
        find_skew_symmetrizer(&skew)
            .map_err(|_| CartanError::NotCartan("not symmetrizable".into()))
    }

    /// The bipartite exchange matrix `b_ij = ε(i) a_ij` (`i != j`), where `ε`
    /// 2-colors the Dynkin graph with `ε = +1` on the first vertex of each
    /// connected component.
    pub fn b_of_a(&self) -> Result<Vec<Vec<i64>>, CartanError> {
        let n = self.n();
        let mut eps = vec![0i64; n];
        for start in 0..n {
            if eps[start] != 0 {
                continue;
            }
            eps[start] = 1;
            let mut queue = VecDeque::from([start]);
            while let Some(i) = queue.pop_front() {
                for j in 0..n {
                    if i == j || self.a[i][j] == 0 {
                        continue;
                    }
                    if eps[j] == 0 {
                        eps[j] = -eps[i];
                        queue.push_back(j);
                    } else if eps[j] == eps[i] {
                        return Err(CartanError::NotBipartite);
                    }
                }
            }
        }
        Ok((0..n)
            .map(|i| {
                (0..n)
                    .map(|j| if i == j { 0 } else { eps[i] * self.a[i][j] })
                    .collect()
            })
            .collect())
    }

    /// Coefficient-free seed with exchange matrix `B(A)`.
    pub fn distinguished_seed(&self) -> Result<Seed, CartanError> {
        Ok(Seed::from_exchange_matrix(self.b_of_a()?)?)
    }

    /// `s_i(v)` on simple-root coordinates (0-based `i`).
    pub fn reflect(&self, i: usize, v: &[i64]) -> Vec<i64> {
        let pairing: i64 = (0..self.n()).map(|j| self.a[i][j] * v[j]).sum();
        let mut out = v.to_vec();
        out[i] -= pairing;
        out
    }

    /// Matrix of `s_i` acting on column vectors of simple-root coordinates.
    pub fn reflection_matrix(&self, i: usize) -> Vec<Vec<i64>> {
        let n = self.n();
        (0..n)
            .map(|r| {
                (0..n)
                    .map(|c| {
                        let id = i64::from(r == c);
                        if r == i {
                            id - self.a[i][c]
                        } else {
                            id
                        }
                    })
                    .collect()
            })
            .collect()
    }

    /// Positive roots by reflection closure of the simple roots, sorted by
    /// height then coordinates.
    pub fn positive_roots(&self) -> Result<Vec<Vec<i64>>, CartanError> {
        let n = self.n();
        let simple: Vec<Vec<i64>> = (0..n)
            .map(|i| (0..n).map(|j| i64::from(i == j)).collect())
            .collect();
        let mut seen: HashSet<Vec<i64>> = simple.iter().cloned().collect();
        let mut queue: VecDeque<Vec<i64>> = simple.into();
        while let Some(root) = queue.pop_front() {
            for i in 0..n {
                let image = self.reflect(i, &root);
                if image.iter().all(|&c| c >= 0) && seen.insert(image.clone()) {
                    if seen.len() > ROOT_CLOSURE_CAP {
                        return Err(CartanError::NotFiniteType(ROOT_CLOSURE_CAP));
                    }
                    queue.push_back(image);
                }
            }
        }
        let mut roots: Vec<Vec<i64>> = seen.into_iter().collect();
        roots.sort_by_key(|r| (r.iter().sum::<i64>(), r.clone()));
        Ok(roots)
    }

    /// `Φ_{>0} ∪ (-Π)`: negative simple roots first, then positive roots.
    pub fn almost_positive(&self) -> Result<Vec<Vec<i64>>, CartanError> {
        let n = self.n();
        let mut out: Vec<Vec<i64>> = (0..n)
            .map(|i| (0..n).map(|j| -i64::from(i == j)).collect())
            .collect();
        out.extend(self.positive_roots()?);
        Ok(out)
    }

    /// `s_{i_1} ⋯ s_{i_l}` for 1-based indices.
    pub fn weyl_element(&self, word: &[usize]) -> Result<WeylElement, CartanError> {
        let n = self.n();
        let mut action: Vec<Vec<i64>> = (0..n)
            .map(|i| (0..n).map(|j| i64::from(i == j)).collect())
            .collect();
        for &i in word {
            if i == 0 || i > n {
                return Err(CartanError::BadIndex(i));
            }
            action = mat_mul(&action, &self.reflection_matrix(i - 1));
        }
        let length = self
            .positive_roots()?
            .iter()
            .filter(|root| mat_vec(&action, root).iter().all(|&c| c <= 0))
            .count();
        Ok(WeylElement {
            action,
            length,
            word_length: word.len(),
        })
    }
}

/// Names a connected finite-type Cartan matrix, following the orientation
/// conventions of [`CartanMatrix::of_type`]. `None` for other matrices.
pub fn identify_type(a: &CartanMatrix) -> Option<(Family, usize)> {
    let n = a.n();
    let count = a.positive_roots().ok()?.len();
    let bonds: Vec<(usize, usize)> = (0..n)
        .flat_map(|i| (i + 1..n).map(move |j| (i, j)))
        .filter(|&(i, j)| a.get(i, j) != 0)
        .collect();
    if bonds.len() + 1 != n {
        return None;
    }
    let lacing = bonds.iter().map(|&(i, j)| a.get(i, j) * a.get(j, i)).max().unwrap_or(0);
    let degree = |v: usize| bonds.iter().filter(|&&(i, j)| i == v || j == v).count();
    let candidate = match lacing {
        0 => (Family::A, 1),
        1 => {
            let family = if count == n * (n + 1) / 2 {
                Family::A
            } else if n >= 4 && count == n * (n - 1) {
                Family::D
            } else {
                Family::E
            };
            (family, n)
        }
        2 if n == 4 && count == 24 => (Family::F, 4),
        2 if n == 2 => (Family::B, 2),
        2 => {
            let &(i, j) = bonds.iter().find(|&&(i, j)| a.get(i, j) * a.get(j, i) == 2)?;
            let (leaf, inner) = if degree(i) == 1 { (i, j) } else { (j, i) };
            if a.get(leaf, inner) == -2 {
                (Family::B, n)
            } else {
                (Family::C, n)
            }
        }
        3 => (Family::G, 2),
        _ => return None,
    };
    let (family, rank) = candidate;
    (family.admits(rank) && family.positive_root_count(rank) == count).then_some(candidate)
}

impl FromStr for CartanMatrix {
    type Err = CartanError;

    /// Parses names such as `A3`, `B2`, `E8`, `G2`.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let bad = || CartanError::InvalidType(s.to_string());
        let mut chars = s.chars();
        let family = match chars.next().map(|c| c.to_ascii_uppercase()) {
            Some('A') => Family::A,
            Some('B') => Family::B,
            Some('C') => Family::C,
            Some('D') => Family::D,
            Some('E') => Family::E,
            Some('F') => Family::F,
            Some('G') => Family::G,
            _ => return Err(bad()),
        };
        let n: usize = chars.as_str().parse().map_err(|_| bad())?;
        CartanMatrix::of_type(family, n)
    }
}

fn mat_mul(a: &[Vec<i64>], b: &[Vec<i64>]) -> Vec<Vec<i64>> {
    let n = b.len();
    a.iter()
        .map(|row| (0..b[0].len()).map(|c| (0..n).map(|k| row[k] * b[k][c]).sum()).collect())
        .collect()
}

fn mat_vec(a: &[Vec<i64>], v: &[i64]) -> Vec<i64> {
    a.iter().map(|row| row.iter().zip(v).map(|(x, y)| x * y).sum()).collect()
}

/// Integer determinant by fraction-free elimination.
pub fn determinant(m: &[Vec<i64>]) -> BigInt {
    let n = m.len();
    let mut a: Vec<Vec<BigInt>> = m
        .iter()
        .map(|r| r.iter().map(|&x| BigInt::from(x)).collect())
        .collect();
    let mut sign = BigInt::one();
    let mut prev = BigInt::one();
    for k in 0..n {
        let Some(p) = (k..n).find(|&r| !a[r][k].is_zero()) else {
            return BigInt::zero();
        };
        if p != k {
            a.swap(p, k);
            sign = -sign;
        }
        for i in k + 1..n {
            for j in k + 1..n {
                a[i][j] = (&a[i][j] * &a[k][k] - &a[i][k] * &a[k][j]) / &prev;
            }
        }
        prev = a[k][k].clone();
    }
    if n == 0 {
        return BigInt::one();
    }
    sign * &a[n - 1][n - 1]
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct WeylElement {
    pub action: Vec<Vec<i64>>,
    /// Number of positive roots sent to negative roots.
    pub length: usize,
    pub word_length: usize,
}

impl WeylElement {
    pub fn is_reduced(&self) -> bool {
        self.length == self.word_length
    }

    pub fn apply(&self, v: &[i64]) -> Vec<i64> {
        mat_vec(&self.action, v)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct BijectionReport {
    pub checks: Vec<Check>,
    /// Every cluster variable with its δ-vector, in term order.
    pub table: Vec<(String, Vec<i64>)>,
}

impl BijectionReport {
    pub fn all_passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }
}

impl fmt::Display for BijectionReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (x, d) in &self.table {
            writeln!(f, "{d:?}\t{x}")?;
        }
        for c in &self.checks {
            let mark = if c.passed { "pass" } else { "FAIL" };
            writeln!(f, "{mark:4} {}: {}", c.name, c.detail)?;
        }
        Ok(())
    }
}

fn check(name: &str, passed: bool, detail: impl Into<String>) -> Check {
    Check {
        name: name.to_string(),
        passed,
        detail: detail.into(),
    }
}

/// Locates `distinguished` in `g`, first by fingerprint and otherwise by a
/// vertex with the same matrix.
fn locate(g: &ExchangeGraph, distinguished: &Seed) -> Option<usize> {
    g.find(&distinguished.canonical()).or_else(|| {
        g.vertices()
            .iter()
            .position(|v| v.seed.matrix() == distinguished.matrix())
    })
}

/// δ-vectors relative to the distinguished cluster against `Φ_{≥-1}(A)`.
pub fn denominator_bijection_check(
    g: &ExchangeGraph,
    distinguished: &Seed,
    a: &CartanMatrix,
    monomial_degree: usize,
) -> Result<BijectionReport, CartanError> {
    let n = a.n();
    let mut checks = Vec::new();
    let Some(base) = locate(g, distinguished) else {
        checks.push(check("distinguished seed found", false, "not a vertex of the graph"));
        return Ok(BijectionReport {
            checks,
            table: Vec::new(),
        });
    };
    let seeds = g.reexpanded(base)?;
    let ex = seeds[base].ex().to_vec();
    let mut table: HashMap<LaurentPoly, Vec<i64>> = HashMap::new();
    for s in &seeds {
        for x in s.exchangeable() {
            if !table.contains_key(x) {
                table.insert(x.clone(), x.denominator_vector(&ex).map_err(SeedError::from)?.0);
            }
        }
    }
    let deltas: BTreeSet<&Vec<i64>> = table.values().collect();
    let roots: BTreeSet<Vec<i64>> = a.almost_positive()?.into_iter().collect();
    let roots_ref: BTreeSet<&Vec<i64>> = roots.iter().collect();
    checks.push(check(
        "δ is a bijection onto the almost positive roots",
        deltas.len() == table.len() && deltas == roots_ref,
        format!("{} cluster variables, {} distinct δ, {} almost positive roots", table.len(), deltas.len(), roots.len()),
    ));

    let initial_ok = seeds[base].exchangeable().iter().enumerate().all(|(j, x)| {
        table[*x]
            .iter()
            .enumerate()
            .all(|(i, &d)| d == if i == j { -1 } else { 0 })
    });
    checks.push(check("initial variables map to -e_j", initial_ok, format!("n = {n}")));

    let clusters: Vec<Vec<&LaurentPoly>> = seeds.iter().map(Seed::exchangeable).collect();
    checks.push(distinct_monomial_denominators(&clusters, &ex, monomial_degree)?);

    let bad = clusters.iter().position(|c| {
        let m: Vec<Vec<i64>> = c.iter().map(|x| table[*x].clone()).collect();
        determinant(&m).abs() != BigInt::one()
    });
    checks.push(check(
        "each cluster's δ-vectors form a basis",
        bad.is_none(),
        match bad {
            None => format!("{} clusters", clusters.len()),
            Some(v) => format!("vertex {v}"),
        },
    ));

    let mut rows: Vec<(String, Vec<i64>)> = table
        .into_iter()
        .map(|(x, d)| (x.to_string(), d))
        .collect();
    rows.sort_by(|x, y| (x.1.iter().sum::<i64>(), &x.1).cmp(&(y.1.iter().sum::<i64>(), &y.1)));
    Ok(BijectionReport {
        checks,
        table: rows,
    })
}
