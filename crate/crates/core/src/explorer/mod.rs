//! Exchange-graph enumeration and the checks that run over it.

mod export;
mod suite;

use std::collections::{BTreeSet, HashMap};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::laurent::LaurentPoly;
use crate::seed::{CanonicalSeed, Seed, SeedError};

pub use export::{EdgeJson, GraphFormat, GraphJson, VerdictJson, VertexJson};
pub use suite::{distinct_monomial_denominators, Check, ConjectureReport, SuiteOptions};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct EnumLimits {
    pub max_vertices: usize,
    pub max_depth: usize,
}

impl Default for EnumLimits {
    fn default() -> Self {
        EnumLimits {
            max_vertices: 100_000,
            max_depth: 64,
        }
    }
}

impl EnumLimits {
    pub fn new(max_vertices: usize, max_depth: usize) -> Result<EnumLimits, SeedError> {
        if max_vertices == 0 || max_depth == 0 {
            return Err(SeedError::Shape("enumeration caps must be positive".into()));
        }
        Ok(EnumLimits {
            max_vertices,
            max_depth,
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CapKind {
    Vertices,
    Depth,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Verdict {
    Finite,
    ExceededCap {
        cap: CapKind,
        limit: usize,
        /// Number of vertices found at each depth.
        growth: Vec<usize>,
    },
}

impl Verdict {
    pub fn is_finite(&self) -> bool {
        matches!(self, Verdict::Finite)
    }
}

#[derive(Debug, Clone)]
pub struct Vertex {
    pub seed: Seed,
    pub canonical: CanonicalSeed,
    pub depth: usize,
    /// Mutation labels leading from the root seed to `seed`, exactly.
    pub path: Vec<usize>,
    /// `(parent, k)` with `parent.seed.mutate(k) == seed`.
    pub parent: Option<(usize, usize)>,
}

/// Edge found from vertex `a` in direction `k` (a row label of `a`'s seed).
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Edge {
    pub a: usize,
    pub k: usize,
    pub b: usize,
}

#[derive(Debug, Clone)]
pub struct ExchangeGraph {
    vertices: Vec<Vertex>,
    index: HashMap<CanonicalSeed, usize>,
    /// `adjacency[a]` lists `(k, b)` for every direction explored from `a`.
    adjacency: Vec<Vec<(usize, usize)>>,
    verdict: Verdict,
    depth_reached: usize,
}

struct Expansion {
    from: usize,
    k: usize,
    // the new seed, or the parent index when stepping back
    next: Result<(CanonicalSeed, Seed), usize>,
}

/// Breadth-first enumeration of the mutation class of `s0`.
///
/// Each level is expanded in parallel; insertion into the vertex set happens
/// in a fixed order so the result does not depend on scheduling.
pub fn enumerate(s0: &Seed, lim: EnumLimits) -> Result<ExchangeGraph, SeedError> {
    let root = Vertex {
        seed: s0.clone(),
        canonical: s0.canonical(),
        depth: 0,
        path: Vec::new(),
        parent: None,
    };
    let mut g = ExchangeGraph {
        index: HashMap::from([(root.canonical.clone(), 0)]),
        vertices: vec![root],
        adjacency: vec![Vec::new()],
        verdict: Verdict::Finite,
        depth_reached: 0,
    };
    let mut frontier = vec![0usize];
    let mut cap = None;
    let mut depth = 0;
    while !frontier.is_empty() && cap.is_none() {
        let expansions: Vec<Expansion> = frontier
            .par_iter()
            .flat_map_iter(|&v| {
                let vertex = &g.vertices[v];
                vertex.seed.ex().iter().map(move |&k| (v, k, vertex)).collect::<Vec<_>>()
            })
            .map(|(from, k, vertex)| {
                // mutation is an involution, so the step back needs no arithmetic
                if let Some((p, pk)) = vertex.parent.filter(|&(_, pk)| pk == k) {
                    return Ok(Expansion { from, k: pk, next: Err(p) });
                }
                let next = vertex.seed.mutate(k)?;
                Ok(Expansion {
                    from,
                    k,
                    next: Ok((next.canonical(), next)),
                })
            })
            .collect::<Result<_, SeedError>>()?;

        let mut next_frontier = Vec::new();
        for e in expansions {
            let (canonical, seed) = match e.next {
                Err(p) => {
                    g.adjacency[e.from].push((e.k, p));
                    continue;
                }
                Ok(next) => next,
            };
            let b = match g.index.get(&canonical) {
                Some(&b) => b,
                None if depth >= lim.max_depth => {
                    cap.get_or_insert((CapKind::Depth, lim.max_depth));
                    continue;
                }
                None if g.vertices.len() >= lim.max_vertices => {
                    cap.get_or_insert((CapKind::Vertices, lim.max_vertices));
                    continue;
                }
                None => {
                    let id = g.vertices.len();
                    let mut path = g.vertices[e.from].path.clone();
                    path.push(e.k);
                    g.index.insert(canonical.clone(), id);
                    g.vertices.push(Vertex {
                        seed,
                        canonical,
                        depth: depth + 1,
                        path,
                        parent: Some((e.from, e.k)),
                    });
                    g.adjacency.push(Vec::new());
                    next_frontier.push(id);
                    id
                }
            };
            g.adjacency[e.from].push((e.k, b));
        }
        if !next_frontier.is_empty() {
            depth += 1;
        }
        frontier = next_frontier;
    }
    g.depth_reached = depth;
    if let Some((cap, limit)) = cap {
        g.verdict = Verdict::ExceededCap {
            cap,
            limit,
            growth: g.growth_profile(),
        };
    }
    Ok(g)
}

impl ExchangeGraph {
    pub fn vertices(&self) -> &[Vertex] {
        &self.vertices
    }

    pub fn len(&self) -> usize {
        self.vertices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vertices.is_empty()
    }

    pub fn verdict(&self) -> &Verdict {
        &self.verdict
    }

    pub fn depth_reached(&self) -> usize {
        self.depth_reached
    }

    pub fn root(&self) -> &Seed {
        &self.vertices[0].seed
    }

    pub fn rank(&self) -> usize {
        self.root().n()
    }

    pub fn find(&self, canonical: &CanonicalSeed) -> Option<usize> {
        self.index.get(canonical).copied()
    }

    pub fn neighbors(&self, a: usize) -> &[(usize, usize)] {
        &self.adjacency[a]
    }

    /// Every edge once, as seen from its lower-numbered endpoint.
    pub fn edges(&self) -> Vec<Edge> {
        let mut out = Vec::new();
        for (a, adj) in self.adjacency.iter().enumerate() {
            for &(k, b) in adj {
                if a <= b {
                    out.push(Edge { a, k, b });
                }
            }
        }
        out
    }

    pub fn growth_profile(&self) -> Vec<usize> {
        let mut growth = Vec::new();
        for v in &self.vertices {
            if growth.len() <= v.depth {
                growth.resize(v.depth + 1, 0);
            }
            growth[v.depth] += 1;
        }
        growth
    }

    /// Deduplicated exchangeable entries over all vertices, in term order.
    pub fn cluster_variables(&self) -> Vec<LaurentPoly> {
        let set: BTreeSet<&LaurentPoly> = self
            .vertices
            .iter()
            .flat_map(|v| v.seed.exchangeable())
            .collect();
        set.into_iter().cloned().collect()
    }

    pub fn is_regular(&self) -> bool {
        let n = self.rank();
        self.adjacency.iter().all(|adj| adj.len() == n)
    }

    /// Each explored edge is also found from its other endpoint.
    pub fn is_symmetric(&self) -> bool {
        self.adjacency.iter().enumerate().all(|(a, adj)| {
            adj.iter()
                .all(|&(_, b)| self.adjacency[b].iter().any(|&(_, back)| back == a))
        })
    }

    pub fn fingerprints(&self) -> BTreeSet<&CanonicalSeed> {
        self.vertices.iter().map(|v| &v.canonical).collect()
    }

    /// Seeds of all vertices expressed in the variables of vertex `base`.
    ///
    /// The rebased seed of `base` is walked back to the root along its path,
    /// then forward along the parent tree, so every returned seed carries the
    /// same labels as the stored one.
    pub fn reexpanded(&self, base: usize) -> Result<Vec<Seed>, SeedError> {
        let b = &self.vertices[base];
        let mut root = b.seed.rebased();
        for &k in b.path.iter().rev() {
            root = root.mutate(k)?;
        }
        let mut order: Vec<usize> = (0..self.vertices.len()).collect();
        order.sort_by_key(|&v| self.vertices[v].depth);
        let mut out: Vec<Option<Seed>> = vec![None; self.vertices.len()];
        for v in order {
            let seed = match self.vertices[v].parent {
                None => root.clone(),
                Some((p, k)) => out[p].as_ref().expect("parents come first").mutate(k)?,
            };
            out[v] = Some(seed);
        }
        Ok(out.into_iter().map(|s| s.expect("all vertices visited")).collect())
    }

    /// Graph reconstructed from its parts; used when parsing exports.
    fn from_parts(
        vertices: Vec<Vertex>,
        adjacency: Vec<Vec<(usize, usize)>>,
        verdict: Verdict,
        depth_reached: usize,
    ) -> ExchangeGraph {
        let index = vertices
            .iter()
            .enumerate()
            .map(|(i, v)| (v.canonical.clone(), i))
            .collect();
        ExchangeGraph {
            vertices,
            index,
            adjacency,
            verdict,
            depth_reached,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rank2(b: i64, c: i64) -> Seed {
        Seed::from_exchange_matrix(vec![vec![0, b], vec![-c, 0]]).unwrap()
    }

    #[test]
    fn pentagon() {
        let g = enumerate(&rank2(1, 1), EnumLimits::default()).unwrap();
        assert_eq!(g.verdict(), &Verdict::Finite);
        assert_eq!(g.len(), 5);
        assert_eq!(g.cluster_variables().len(), 5);
        assert_eq!(g.edges().len(), 5);
        assert!(g.is_regular() && g.is_symmetric());
        assert_eq!(g.growth_profile(), vec![1, 2, 2]);
    }

    #[test]
    fn rank_one() {
        let s = Seed::from_exchange_matrix(vec![vec![0]]).unwrap();
        let g = enumerate(&s, EnumLimits::default()).unwrap();
        assert_eq!(g.len(), 2);
        assert_eq!(g.cluster_variables().len(), 2);
        assert!(g.verdict().is_finite());
    }

    #[test]
    fn rank_two_counts() {
        // (b, c) with bc = 2 and 3 give types B2 and G2
        for (b, c, seeds) in [(1, 2, 6), (2, 1, 6), (1, 3, 8), (3, 1, 8)] {
            let g = enumerate(&rank2(b, c), EnumLimits::default()).unwrap();
            assert_eq!((g.len(), g.cluster_variables().len()), (seeds, seeds));
        }
    }

    #[test]
    fn affine_rank_two_exceeds_caps() {
        let g = enumerate(&rank2(2, 2), EnumLimits::new(10_000, 12).unwrap()).unwrap();
        match g.verdict() {
            Verdict::ExceededCap { cap, growth, .. } => {
                assert_eq!(*cap, CapKind::Depth);
                assert_eq!(growth, &[vec![1], vec![2; 12]].concat());
            }
            other => panic!("{other:?}"),
        }
        let g = enumerate(&rank2(2, 2), EnumLimits::new(7, 64).unwrap()).unwrap();
        assert_eq!(g.len(), 7);
        assert!(matches!(g.verdict(), Verdict::ExceededCap { cap: CapKind::Vertices, limit: 7, .. }));
    }

    #[test]
    fn depth_cap_monotone() {
        let s = Seed::from_exchange_matrix(vec![vec![0, 1, 0], vec![-1, 0, 1], vec![0, -1, 0]])
            .unwrap();
        let counts: Vec<usize> = (1..=6)
            .map(|d| enumerate(&s, EnumLimits::new(1000, d).unwrap()).unwrap().len())
            .collect();
        assert!(counts.windows(2).all(|w| w[0] <= w[1]));
        assert_eq!(*counts.last().unwrap(), 14);
    }

    #[test]
    fn reexpansion_from_other_vertex() {
        let g = enumerate(&rank2(1, 2), EnumLimits::default()).unwrap();
        for base in 0..g.len() {
            let seeds = g.reexpanded(base).unwrap();
            assert!(seeds[base].is_initial());
            for (v, s) in seeds.iter().enumerate() {
                assert_eq!(s.matrix(), g.vertices()[v].seed.matrix());
            }
        }
    }
}
