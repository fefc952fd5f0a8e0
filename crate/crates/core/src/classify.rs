//! Finite-type recognition by walking the matrix mutation class.
//!
//! Each connected component of the principal part is mutated breadth-first,
//! deduplicating up to simultaneous permutation, global sign and transpose.
//! A component is of finite type exactly when its class contains some `B(A)`
//! for a finite-type Cartan matrix `A`.

use std::collections::{HashSet, VecDeque};
use std::fmt;

use serde::Serialize;

use crate::cartan::{identify_type, CartanMatrix, Family};
use crate::seed::{ExtendedExchangeMatrix, SeedError};

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ComponentVerdict {
    Finite { family: Family, rank: usize },
    /// Some class member has `|b_ij b_ji| >= 4`, or the class was exhausted
    /// without meeting a finite-type `B(A)`.
    Infinite { reason: String },
    Undetermined { class_size: usize },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Classification {
    /// Row labels (0-based) of each component, with its verdict.
    pub components: Vec<(Vec<usize>, ComponentVerdict)>,
}

impl Classification {
    pub fn is_finite(&self) -> bool {
        self.components
            .iter()
            .all(|(_, v)| matches!(v, ComponentVerdict::Finite { .. }))
    }

    pub fn is_undetermined(&self) -> bool {
        !self.is_infinite()
            && self
                .components
                .iter()
                .any(|(_, v)| matches!(v, ComponentVerdict::Undetermined { .. }))
    }

    pub fn is_infinite(&self) -> bool {
        self.components
            .iter()
            .any(|(_, v)| matches!(v, ComponentVerdict::Infinite { .. }))
    }

    pub fn types(&self) -> Vec<(Family, usize)> {
        let mut out: Vec<_> = self
            .components
            .iter()
            .filter_map(|(_, v)| match v {
                ComponentVerdict::Finite { family, rank } => Some((*family, *rank)),
                _ => None,
            })
            .collect();
        out.sort();
        out
    }
}

impl fmt::Display for Classification {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_finite() {
            let names: Vec<String> = self.types().iter().map(|(t, n)| format!("{t}{n}")).collect();
            return write!(f, "finite type {}", names.join(" x "));
        }
        if self.is_infinite() {
            let reason = self
                .components
                .iter()
                .find_map(|(_, v)| match v {
                    ComponentVerdict::Infinite { reason } => Some(reason.as_str()),
                    _ => None,
                })
                .unwrap_or_default();
            return write!(f, "infinite type ({reason})");
        }
        write!(f, "undetermined (cap)")
    }
}

/// Canonical form under simultaneous permutation, global sign and transpose.
///
/// Vertices are first split by colour refinement; only permutations within
/// the final colour classes are tried.
pub fn canonical_form(b: &[Vec<i64>]) -> Vec<i64> {
    let n = b.len();
    let transpose: Vec<Vec<i64>> = (0..n).map(|i| (0..n).map(|j| b[j][i]).collect()).collect();
    let variants = [
        b.to_vec(),
        b.iter().map(|r| r.iter().map(|x| -x).collect()).collect(),
        transpose.clone(),
        transpose.iter().map(|r| r.iter().map(|x| -x).collect()).collect(),
    ];
    variants
        .iter()
        .map(|v| canonical_under_permutation(v))
        .min()
        .expect("four variants")
}

fn refine(b: &[Vec<i64>]) -> Vec<usize> {
    let n = b.len();
    let mut colour = vec![0usize; n];
    loop {
        let mut sigs: Vec<(usize, Vec<(usize, i64, i64)>)> = (0..n)
            .map(|i| {
                let mut s: Vec<(usize, i64, i64)> = (0..n)
                    .filter(|&j| j != i && b[i][j] != 0)
                    .map(|j| (colour[j], b[i][j], b[j][i]))
                    .collect();
                s.sort_unstable();
                (colour[i], s)
            })
            .collect();
        let mut distinct = sigs.clone();
        distinct.sort();
        distinct.dedup();
        let next: Vec<usize> = sigs
            .iter_mut()
            .map(|s| distinct.binary_search(s).expect("present"))
            .collect();
        let before = colour.iter().collect::<HashSet<_>>().len();
        let after = next.iter().collect::<HashSet<_>>().len();
        colour = next;
        if after == before {
            return colour;
        }
    }
}

fn canonical_under_permutation(b: &[Vec<i64>]) -> Vec<i64> {
    let n = b.len();
    let colour = refine(b);
    let mut classes: Vec<Vec<usize>> = Vec::new();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by_key(|&i| colour[i]);
    for i in order {
        match classes.last_mut() {
            Some(c) if colour[c[0]] == colour[i] => c.push(i),
            _ => classes.push(vec![i]),
        }
    }
    let mut best: Option<Vec<i64>> = None;
    let mut perm = Vec::with_capacity(n);
    search(b, &classes, 0, &mut perm, &mut best);
    best.expect("at least one ordering")
}

fn search(b: &[Vec<i64>], classes: &[Vec<usize>], c: usize, perm: &mut Vec<usize>, best: &mut Option<Vec<i64>>) {
    if c == classes.len() {
        let flat: Vec<i64> = perm.iter().flat_map(|&i| perm.iter().map(move |&j| b[i][j])).collect();
        if best.as_ref().is_none_or(|x| flat < *x) {
            *best = Some(flat);
        }
        return;
    }
    permute_class(b, classes, c, &classes[c].clone(), perm, best);
}

fn permute_class(
    b: &[Vec<i64>],
    classes: &[Vec<usize>],
    c: usize,
    remaining: &[usize],
    perm: &mut Vec<usize>,
    best: &mut Option<Vec<i64>>,
) {
    if remaining.is_empty() {
        search(b, classes, c + 1, perm, best);
        return;
    }
    for (idx, &v) in remaining.iter().enumerate() {
        let mut rest = remaining.to_vec();
        rest.remove(idx);
        perm.push(v);
        permute_class(b, classes, c, &rest, perm, best);
        perm.pop();
    }
}

/// Row sets of the connected components of the underlying graph.
pub fn components(b: &[Vec<i64>]) -> Vec<Vec<usize>> {
    let n = b.len();
    let mut seen = vec![false; n];
    let mut out = Vec::new();
    for start in 0..n {
        if seen[start] {
            continue;
        }
        seen[start] = true;
        let mut comp = vec![start];
        let mut queue = VecDeque::from([start]);
        while let Some(i) = queue.pop_front() {
            for j in 0..n {
                if !seen[j] && (b[i][j] != 0 || b[j][i] != 0) {
                    seen[j] = true;
                    comp.push(j);
                    queue.push_back(j);
                }
            }
        }
        comp.sort_unstable();
        out.push(comp);
    }
    out
}

/// Type of `b` when it is bipartite (every row single-signed) and its
/// Cartan counterpart `a_ij = -|b_ij|` is of finite type.
pub fn bipartite_type(b: &[Vec<i64>]) -> Option<(Family, usize)> {
    let n = b.len();
    let single_signed = b.iter().all(|row| {
        let pos = row.iter().any(|&x| x > 0);
        let neg = row.iter().any(|&x| x < 0);
        !(pos && neg)
    });
    if !single_signed {
        return None;
    }
    let a: Vec<Vec<i64>> = (0..n)
        .map(|i| (0..n).map(|j| if i == j { 2 } else { -b[i][j].abs() }).collect())
        .collect();
    identify_type(&CartanMatrix::new(a).ok()?)
}

fn classify_component(b: Vec<Vec<i64>>, max_class: usize) -> Result<ComponentVerdict, SeedError> {
    let n = b.len();
    let mut seen = HashSet::from([canonical_form(&b)]);
    let mut queue = VecDeque::from([b]);
    while let Some(m) = queue.pop_front() {
        for i in 0..n {
            for j in i + 1..n {
                if (m[i][j] * m[j][i]).abs() >= 4 {
                    return Ok(ComponentVerdict::Infinite {
                        reason: format!("class member has |b_ij b_ji| = {}", (m[i][j] * m[j][i]).abs()),
                    });
                }
            }
        }
        if let Some((family, rank)) = bipartite_type(&m) {
            return Ok(ComponentVerdict::Finite { family, rank });
        }
        let matrix = ExtendedExchangeMatrix::from_parts(m, (0..n).collect())?;
        for k in 0..n {
            let next = matrix.mutate(k)?.entries().to_vec();
            if seen.insert(canonical_form(&next)) {
                if seen.len() > max_class {
                    return Ok(ComponentVerdict::Undetermined { class_size: seen.len() - 1 });
                }
                queue.push_back(next);
            }
        }
    }
    Ok(ComponentVerdict::Infinite {
        reason: format!("mutation class of {} matrices contains no finite-type B(A)", seen.len()),
    })
}

/// Classifies the principal part of an exchange matrix.
pub fn classify(b: &[Vec<i64>], max_class: usize) -> Result<Classification, SeedError> {
    let comps = components(b);
    let mut out = Vec::with_capacity(comps.len());
    for rows in comps {
        let sub: Vec<Vec<i64>> = rows.iter().map(|&i| rows.iter().map(|&j| b[i][j]).collect()).collect();
        out.push((rows, classify_component(sub, max_class)?));
    }
    Ok(Classification { components: out })
}
