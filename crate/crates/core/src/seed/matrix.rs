use std::collections::VecDeque;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::Ratio;
use num_traits::Zero;

use super::SeedError;

/// An `m × n` integer matrix whose columns are labeled by the exchangeable
/// rows `ex` (0-based row indices, in column order).
///
/// Construction through [`ExtendedExchangeMatrix::new`] checks that the
/// principal part is skew-symmetrizable and, when there are frozen rows, that
/// the matrix has rank `n`. Square matrices of odd size are never of full rank,
/// so coefficient-free seeds are exempt.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct ExtendedExchangeMatrix {
    entries: Vec<Vec<i64>>,
    ex: Vec<usize>,
}

impl ExtendedExchangeMatrix {
    pub fn new(entries: Vec<Vec<i64>>, ex: Vec<usize>) -> Result<Self, SeedError> {
        let matrix = Self::from_parts(entries, ex)?;
        matrix.validate()?;
        Ok(matrix)
    }

    /// Shape checks only.
    pub fn from_parts(entries: Vec<Vec<i64>>, ex: Vec<usize>) -> Result<Self, SeedError> {
        let m = entries.len();
        let n = ex.len();
        if n == 0 {
            return Err(SeedError::Shape("no exchangeable indices".into()));
        }
        if let Some(row) = entries.iter().position(|r| r.len() != n) {
            return Err(SeedError::Shape(format!(
                "row {} has {} entries, expected {n}",
                row + 1,
                entries[row].len()
            )));
        }
        let mut seen = vec![false; m];
        for &k in &ex {
            if k >= m {
                return Err(SeedError::Shape(format!(
                    "exchangeable index {} exceeds the {m} rows",
                    k + 1
                )));
            }
            if std::mem::replace(&mut seen[k], true) {
                return Err(SeedError::Shape(format!("exchangeable index {} repeated", k + 1)));
            }
        }
        Ok(ExtendedExchangeMatrix { entries, ex })
    }

    /// A square exchange matrix with every row exchangeable.
    pub fn square(b: Vec<Vec<i64>>) -> Result<Self, SeedError> {
        let n = b.len();
        Self::new(b, (0..n).collect())
    }

    /// Skew-symmetrizable principal part, and full rank if anything is frozen.
    pub fn validate(&self) -> Result<(), SeedError> {
        find_skew_symmetrizer(&self.principal_part())?;
        if self.m() == self.n() {
            return Ok(());
        }
        let rank = integer_rank(&self.entries);
        if rank != self.n() {
            return Err(SeedError::RankDeficient { rank, n: self.n() });
        }
        Ok(())
    }

    pub fn m(&self) -> usize {
        self.entries.len()
    }

    pub fn n(&self) -> usize {
        self.ex.len()
    }

    pub fn ex(&self) -> &[usize] {
        &self.ex
    }

    pub fn entries(&self) -> &[Vec<i64>] {
        &self.entries
    }

    /// `b_{row, ex[col]}`.
    pub fn get(&self, row: usize, col: usize) -> i64 {
        self.entries[row][col]
    }

    /// Entry addressed by two row labels, the second of which must be exchangeable.
    pub fn b(&self, i: usize, k: usize) -> i64 {
        let col = self.column_of(k).expect("exchangeable label");
        self.entries[i][col]
    }

    pub fn column_of(&self, k: usize) -> Option<usize> {
        self.ex.iter().position(|&e| e == k)
    }

    pub fn is_exchangeable(&self, row: usize) -> bool {
        self.ex.contains(&row)
    }

    pub fn frozen(&self) -> Vec<usize> {
        (0..self.m()).filter(|r| !self.is_exchangeable(*r)).collect()
    }

    /// The `n × n` submatrix on rows and columns `ex`, in column order.
    pub fn principal_part(&self) -> Vec<Vec<i64>> {
        self.ex.iter().map(|&r| self.entries[r].clone()).collect()
    }

    pub fn column(&self, col: usize) -> Vec<i64> {
        self.entries.iter().map(|r| r[col]).collect()
    }

    fn not_exchangeable(&self, k: usize) -> SeedError {
        SeedError::NotExchangeable {
            k,
            valid: self.ex.clone(),
        }
    }

    /// Matrix mutation in direction `k` (a row label in `ex`).
    pub fn mutate(&self, k: usize) -> Result<Self, SeedError> {
        let ck = self.column_of(k).ok_or_else(|| self.not_exchangeable(k))?;
        let mut out = self.entries.clone();
        for (i, row) in out.iter_mut().enumerate() {
            for (j, entry) in row.iter_mut().enumerate() {
                let b = self.entries[i][j];
                *entry = if i == k || j == ck {
                    -b
                } else {
                    let bik = self.entries[i][ck];
                    let bkj = self.entries[k][j];
                    let twice = bik
                        .abs()
                        .checked_mul(bkj)
                        .zip(bik.checked_mul(bkj.abs()))
                        .and_then(|(a, c)| a.checked_add(c))
                        .ok_or(SeedError::Overflow)?;
                    b.checked_add(twice / 2).ok_or(SeedError::Overflow)?
                };
            }
        }
        Ok(ExtendedExchangeMatrix {
            entries: out,
            ex: self.ex.clone(),
        })
    }

    pub fn max_abs_entry(&self) -> i64 {
        self.entries.iter().flatten().map(|e| e.abs()).max().unwrap_or(0)
    }
}

/// Positive integers `d` with `d_i b_ik = -d_k b_ki`, normalized to be coprime
/// on each connected component of the nonzero pattern.
pub fn find_skew_symmetrizer(b: &[Vec<i64>]) -> Result<Vec<u64>, SeedError> {
    let n = b.len();
    if b.iter().any(|r| r.len() != n) {
        return Err(SeedError::Shape("exchange matrix is not square".into()));
    }
    for i in 0..n {
        if b[i][i] != 0 {
            return Err(SeedError::NotSkewSymmetrizable { i, k: i });
        }
        for k in i + 1..n {
            let (x, y) = (b[i][k], b[k][i]);
            if (x == 0) != (y == 0) || x.signum() == y.signum() && x != 0 {
                return Err(SeedError::NotSkewSymmetrizable { i, k });
            }
        }
    }
    let mut d: Vec<Option<Ratio<i128>>> = vec![None; n];
    let mut component = vec![usize::MAX; n];
    let mut components = 0;
    for root in 0..n {
        if d[root].is_some() {
            continue;
        }
        d[root] = Some(Ratio::from_integer(1));
        component[root] = components;
        let mut queue = VecDeque::from([root]);
        while let Some(i) = queue.pop_front() {
            let di = d[i].expect("assigned");
            for k in 0..n {
                if b[i][k] == 0 || d[k].is_some() {
                    continue;
                }
                // d_k = d_i b_ik / (-b_ki)
                d[k] = Some(di * Ratio::new(b[i][k] as i128, -(b[k][i] as i128)));
                component[k] = components;
                queue.push_back(k);
            }
        }
        components += 1;
    }
    let d: Vec<Ratio<i128>> = d.into_iter().map(|x| x.expect("assigned")).collect();
    for i in 0..n {
        for k in 0..n {
            if d[i] * b[i][k] as i128 != -(d[k] * b[k][i] as i128) {
                return Err(SeedError::NotSkewSymmetrizable { i, k });
            }
        }
    }
    let mut out = vec![0u64; n];
    for c in 0..components {
        let members: Vec<usize> = (0..n).filter(|&i| component[i] == c).collect();
        let lcm = members.iter().fold(1i128, |acc, &i| acc.lcm(d[i].denom()));
        let scaled: Vec<i128> = members.iter().map(|&i| (d[i] * lcm).to_integer()).collect();
        let g = scaled.iter().fold(0i128, |acc, x| acc.gcd(x));
        for (&i, v) in members.iter().zip(scaled) {
            out[i] = u64::try_from(v / g).map_err(|_| SeedError::Overflow)?;
        }
    }
    Ok(out)
}

/// Rank over the rationals by fraction-free (Bareiss) elimination.
pub fn integer_rank(rows: &[Vec<i64>]) -> usize {
    let mut a: Vec<Vec<BigInt>> = rows
        .iter()
        .map(|r| r.iter().map(|&x| BigInt::from(x)).collect())
        .collect();
    let m = a.len();
    let n = a.first().map_or(0, Vec::len);
    let mut rank = 0;
    let mut prev = BigInt::from(1);
    for col in 0..n {
        let Some(p) = (rank..m).find(|&r| !a[r][col].is_zero()) else {
            continue;
        };
        a.swap(rank, p);
        for r in rank + 1..m {
            for c in col + 1..n {
                let v = (&a[rank][col] * &a[r][c] - &a[r][col] * &a[rank][c]) / &prev;
                a[r][c] = v;
            }
            a[r][col] = BigInt::zero();
        }
        prev = a[rank][col].clone();
        rank += 1;
        if rank == m {
            break;
        }
    }
    rank
}

/// A linear order of `0..n` with `b_ij >= 0` whenever `i` precedes `j`, if
/// one exists: a topological order of the digraph with an edge `i -> j` for
/// each `b_ij > 0`.
pub fn is_acyclic(b: &[Vec<i64>]) -> Option<Vec<usize>> {
    let n = b.len();
    let mut indegree = vec![0usize; n];
    for row in b {
        for (j, &x) in row.iter().enumerate() {
            if x > 0 {
                indegree[j] += 1;
            }
        }
    }
    let mut order = Vec::with_capacity(n);
    let mut ready: std::collections::BTreeSet<usize> =
        (0..n).filter(|&i| indegree[i] == 0).collect();
    while let Some(i) = ready.pop_first() {
        order.push(i);
        for j in 0..n {
            if b[i][j] > 0 {
                indegree[j] -= 1;
                if indegree[j] == 0 {
                    ready.insert(j);
                }
            }
        }
    }
    (order.len() == n).then_some(order)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn example_btilde() -> ExtendedExchangeMatrix {
        ExtendedExchangeMatrix::new(
            vec![
                vec![-1, 0, 0, 0],
                vec![1, -1, 0, 0],
                vec![0, 1, -1, 0],
                vec![-1, 0, 1, -1],
                vec![1, -1, 0, 1],
                vec![0, 1, -1, 0],
                vec![0, -1, 0, 1],
                vec![0, 0, 0, -1],
            ],
            vec![2, 3, 4, 5],
        )
        .unwrap()
    }

    #[test]
    fn mutation_is_involutive_on_example() {
        let b = example_btilde();
        assert_eq!(b.mutate(2).unwrap().mutate(2).unwrap(), b);
    }

    #[test]
    fn rank_two_mutation_only_flips_signs() {
        let b = ExtendedExchangeMatrix::square(vec![vec![0, 2], vec![-3, 0]]).unwrap();
        assert_eq!(b.mutate(0).unwrap().entries(), &[vec![0, -2], vec![3, 0]]);
    }

    #[test]
    fn mutation_at_fourth_row_matches_hand_computation() {
        // b'_ij = b_ij + (|b_ik| b_kj + b_ik |b_kj|) / 2 applied by hand, k = 4
        let expected = vec![
            vec![-1, 0, 0, 0],
            vec![0, 1, 0, -1],
            vec![0, -1, 0, 0],
            vec![1, 0, -1, 1],
            vec![0, 1, 0, 0],
            vec![0, -1, 0, 0],
            vec![-1, 1, 0, 0],
            vec![0, 0, 0, -1],
        ];
        assert_eq!(example_btilde().mutate(3).unwrap().entries(), &expected[..]);
    }

    #[test]
    fn mutation_outside_ex_is_rejected() {
        let err = example_btilde().mutate(0).unwrap_err();
        assert!(matches!(err, SeedError::NotExchangeable { k: 0, .. }));
    }

    #[test]
    fn skew_symmetrizers() {
        assert_eq!(find_skew_symmetrizer(&[vec![0, -1], vec![1, 0]]).unwrap(), vec![1, 1]);
        assert_eq!(find_skew_symmetrizer(&[vec![0, 1], vec![-2, 0]]).unwrap(), vec![2, 1]);
        assert_eq!(find_skew_symmetrizer(&[vec![0, 1], vec![-3, 0]]).unwrap(), vec![3, 1]);
        assert!(matches!(
            find_skew_symmetrizer(&[vec![0, 1], vec![1, 0]]),
            Err(SeedError::NotSkewSymmetrizable { i: 0, k: 1 })
        ));
        // sign pattern fine, ratios inconsistent around the triangle
        let bad = vec![vec![0, 1, -1], vec![-1, 0, 1], vec![2, -1, 0]];
        assert!(find_skew_symmetrizer(&bad).is_err());
        // two components normalized separately
        let split = vec![vec![0, 2, 0], vec![-1, 0, 0], vec![0, 0, 0]];
        assert_eq!(find_skew_symmetrizer(&split).unwrap(), vec![1, 2, 1]);
    }

    #[test]
    fn ranks() {
        assert_eq!(integer_rank(&[vec![0, 1], vec![-1, 0]]), 2);
        assert_eq!(integer_rank(&[vec![0, 1, -1], vec![-1, 0, 1], vec![1, -1, 0]]), 2);
        assert_eq!(integer_rank(&[vec![2, 4], vec![1, 2], vec![3, 7]]), 2);
        assert_eq!(integer_rank(&example_btilde().entries()), 4);
        let three = vec![vec![0, 1, -1], vec![-1, 0, 1], vec![1, -1, 0]];
        assert!(ExtendedExchangeMatrix::square(three.clone()).is_ok());
        let mut extended = three;
        extended.push(vec![1, -1, 0]);
        assert!(matches!(
            ExtendedExchangeMatrix::new(extended, vec![0, 1, 2]),
            Err(SeedError::RankDeficient { rank: 2, n: 3 })
        ));
    }

    #[test]
    fn acyclicity() {
        assert!(is_acyclic(&[vec![0, 3], vec![-1, 0]]).is_some());
        let cycle = vec![vec![0, 1, -1], vec![-1, 0, 1], vec![1, -1, 0]];
        assert_eq!(is_acyclic(&cycle), None);
        let order = is_acyclic(&[vec![0, -1, 0], vec![1, 0, 1], vec![0, -1, 0]]).unwrap();
        assert_eq!(order, vec![1, 0, 2]);
        // principal part of the 8x4 example on rows/columns {3,4,5,6}:
        // edges 3->4, 4->5, 5->3 form a directed cycle
        let principal = example_btilde().principal_part();
        assert_eq!(
            principal,
            vec![vec![0, 1, -1, 0], vec![-1, 0, 1, -1], vec![1, -1, 0, 1], vec![0, 1, -1, 0]]
        );
        assert_eq!(is_acyclic(&principal), None);
    }
}
