//! Double reduced words, the matrix `B̃(i)`, generalized minors of
//! `SL_{r+1}` and verification of the adjacent exchange relations.
//!
//! Word positions and exchangeable indices are 1-based throughout this
//! module, as they appear in the word syntax `1,2,1,-1`.

mod minors;

use std::fmt;

use thiserror::Error;

use crate::cartan::{CartanError, CartanMatrix, Family};
use crate::seed::{ExtendedExchangeMatrix, SeedError};

pub use minors::{
    exhaustive_family_search, minor_poly, random_sl_point, verify_adjacent_exchange, ExchangeOutcome,
    ExchangeReport, GenMinorA, SymbolicMatrix,
};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum DbcError {
    #[error("cannot parse word entry {0:?}")]
    Syntax(String),
    #[error("entry {value} at position {pos} is not in -[1,{r}] ∪ [1,{r}]")]
    BadEntry { pos: usize, value: i64, r: usize },
    #[error("word must start with 1..{r}; position {pos} holds {found}")]
    BadPrefix { pos: usize, found: i64, r: usize },
    #[error("the {which} part is not reduced; failing prefix {}", fmt_word(.prefix))]
    NotReduced { which: char, prefix: Vec<i64> },
    #[error("Cartan matrix has rank {got}, word has rank {expected}")]
    RankMismatch { expected: usize, got: usize },
    #[error("generalized minors are realized for type A only")]
    NotTypeA,
    #[error("position {k} is not exchangeable; exchangeable positions: {}", fmt_positions(.ex))]
    NotExchangeable { k: usize, ex: Vec<usize> },
    #[error("cases of the B̃ formula overlap at ({p}, {k})")]
    CaseOverlap { p: usize, k: usize },
    #[error(transparent)]
    Cartan(#[from] CartanError),
    #[error(transparent)]
    Seed(#[from] SeedError),
}

fn fmt_word(w: &[i64]) -> String {
    w.iter().map(ToString::to_string).collect::<Vec<_>>().join(",")
}

fn fmt_positions(w: &[usize]) -> String {
    w.iter().map(ToString::to_string).collect::<Vec<_>>().join(", ")
}

/// `"1,2,-1"` → `[1, 2, -1]`. Whitespace is ignored; blank text is the empty word.
pub fn parse_word_entries(text: &str) -> Result<Vec<i64>, DbcError> {
    if text.trim().is_empty() {
        return Ok(Vec::new());
    }
    text.split(',')
        .map(str::trim)
        .map(|s| s.parse::<i64>().map_err(|_| DbcError::Syntax(s.to_string())))
        .collect()
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct WordStructure {
    /// `kplus[k-1] = k⁺`, with `m + 1` when there is no later occurrence.
    pub kplus: Vec<usize>,
    /// `kminus[k-1] = k⁻`, with `0` when there is no earlier occurrence.
    pub kminus: Vec<usize>,
    /// Exchangeable positions, increasing.
    pub ex: Vec<usize>,
}

impl WordStructure {
    fn of(entries: &[i64], r: usize) -> WordStructure {
        let m = entries.len();
        let kplus: Vec<usize> = (1..=m)
            .map(|k| {
                (k + 1..=m)
                    .find(|&l| entries[l - 1].abs() == entries[k - 1].abs())
                    .unwrap_or(m + 1)
            })
            .collect();
        let mut kminus = vec![0; m];
        for (k, &p) in kplus.iter().enumerate() {
            if p <= m {
                kminus[p - 1] = k + 1;
            }
        }
        let ex = (r + 1..=m).filter(|&k| kplus[k - 1] <= m).collect();
        WordStructure { kplus, kminus, ex }
    }

    pub fn kplus(&self, k: usize) -> usize {
        self.kplus[k - 1]
    }

    pub fn kminus(&self, k: usize) -> usize {
        self.kminus[k - 1]
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DoubleWord {
    r: usize,
    entries: Vec<i64>,
    cartan: CartanMatrix,
    structure: WordStructure,
}

impl fmt::Display for DoubleWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&fmt_word(&self.entries))
    }
}

/// Validates the prefix, the entry range, and reducedness of both halves.
pub fn parse_double_word(r: usize, entries: &[i64], a: &CartanMatrix) -> Result<DoubleWord, DbcError> {
    if a.n() != r {
        return Err(DbcError::RankMismatch {
            expected: r,
            got: a.n(),
        });
    }
    for (pos, &value) in entries.iter().enumerate() {
        if value == 0 || value.unsigned_abs() as usize > r {
            return Err(DbcError::BadEntry { pos: pos + 1, value, r });
        }
    }
    for j in 1..=r {
        let found = entries.get(j - 1).copied().unwrap_or(0);
        if found != j as i64 {
            return Err(DbcError::BadPrefix { pos: j, found, r });
        }
    }
    for (which, negative) in [('u', true), ('v', false)] {
        let mut sub = Vec::new();
        for (pos, &value) in entries.iter().enumerate().skip(r) {
            if (value < 0) != negative {
                continue;
            }
            sub.push(value.unsigned_abs() as usize);
            if !a.weyl_element(&sub)?.is_reduced() {
                return Err(DbcError::NotReduced {
                    which,
                    prefix: entries[..=pos].to_vec(),
                });
            }
        }
    }
    Ok(DoubleWord {
        r,
        entries: entries.to_vec(),
        cartan: a.clone(),
        structure: WordStructure::of(entries, r),
    })
}

fn eps(i: i64) -> i64 {
    i.signum()
}

impl DoubleWord {
    pub fn r(&self) -> usize {
        self.r
    }

    pub fn m(&self) -> usize {
        self.entries.len()
    }

    pub fn entries(&self) -> &[i64] {
        &self.entries
    }

    pub fn entry(&self, k: usize) -> i64 {
        self.entries[k - 1]
    }

    pub fn cartan(&self) -> &CartanMatrix {
        &self.cartan
    }

    pub fn structure(&self) -> &WordStructure {
        &self.structure
    }

    pub fn ex(&self) -> &[usize] {
        &self.structure.ex
    }

    /// Simple reflection indices of `u` (negative entries) and `v`
    /// (positive entries past position `r`).
    pub fn u_word(&self) -> Vec<usize> {
        self.entries[self.r..]
            .iter()
            .filter(|&&i| i < 0)
            .map(|i| i.unsigned_abs() as usize)
            .collect()
    }

    pub fn v_word(&self) -> Vec<usize> {
        self.entries[self.r..]
            .iter()
            .filter(|&&i| i > 0)
            .map(|&i| i as usize)
            .collect()
    }

    fn a(&self, p: usize, k: usize) -> i64 {
        let i = self.entry(p).unsigned_abs() as usize;
        let j = self.entry(k).unsigned_abs() as usize;
        self.cartan.get(i - 1, j - 1)
    }

    /// Entry `b_pk` of `B̃(i)` for `p ∈ [1,m]`, `k ∈ ex`.
    pub fn btilde_entry(&self, p: usize, k: usize) -> Result<i64, DbcError> {
        let m = self.m();
        let s = &self.structure;
        let (kp, km, pp) = (s.kplus(k), s.kminus(k), s.kplus(p));
        let e = |q: usize| if q <= m { eps(self.entry(q)) } else { 0 };
        let ek = e(k);
        let ep = e(p);
        let mut values = Vec::new();
        if p == km {
            values.push(-ek);
        }
        if (p < k && k < pp && pp < kp && ek == e(pp)) || (p < k && k < kp && kp < pp && ek == -e(kp)) {
            values.push(-ek * self.a(p, k));
        }
        if (k < p && p < kp && kp < pp && ep == e(kp)) || (k < p && p < pp && pp < kp && ep == -e(pp)) {
            values.push(ep * self.a(p, k));
        }
        if p == kp {
            values.push(ep);
        }
        match values.as_slice() {
            [] => Ok(0),
            [v] => Ok(*v),
            _ => Err(DbcError::CaseOverlap { p, k }),
        }
    }

    /// `B̃(i)` with row `p-1` for position `p` and columns in `ex` order.
    pub fn btilde(&self) -> Result<ExtendedExchangeMatrix, DbcError> {
        let ex = self.ex();
        let entries = (1..=self.m())
            .map(|p| ex.iter().map(|&k| self.btilde_entry(p, k)).collect())
            .collect::<Result<Vec<Vec<i64>>, _>>()?;
        Ok(ExtendedExchangeMatrix::new(entries, ex.iter().map(|k| k - 1).collect())?)
    }

    /// `s_i` on fundamental-weight coordinates (1-based `i`).
    fn reflect_weight(&self, i: usize, w: &mut [i64]) {
        let c = w[i - 1];
        for (l, x) in w.iter_mut().enumerate() {
            *x -= c * self.cartan.get(l, i - 1);
        }
    }

    /// `(γ_k, δ_k)` in fundamental-weight coordinates.
    pub fn gamma_delta(&self, k: usize) -> (Vec<i64>, Vec<i64>) {
        let i = self.entry(k).unsigned_abs() as usize;
        let mut omega = vec![0; self.r];
        omega[i - 1] = 1;
        let mut gamma = omega.clone();
        for j in (1..=k).rev() {
            if self.entry(j) < 0 {
                self.reflect_weight(self.entry(j).unsigned_abs() as usize, &mut gamma);
            }
        }
        let mut delta = omega;
        for j in k + 1..=self.m() {
            if self.entry(j) > 0 {
                self.reflect_weight(self.entry(j) as usize, &mut delta);
            }
        }
        (gamma, delta)
    }

    pub fn is_type_a(&self) -> bool {
        CartanMatrix::of_type(Family::A, self.r).is_ok_and(|a| a.entries() == self.cartan.entries())
    }

    /// `f_k` as a minor of `SL_{r+1}`: `ω_i ↔ {1..i}` and `s_j` swaps `j, j+1`.
    pub fn minor(&self, k: usize) -> Result<GenMinorA, DbcError> {
        if !self.is_type_a() {
            return Err(DbcError::NotTypeA);
        }
        let i = self.entry(k).unsigned_abs() as usize;
        let swap = |set: &mut Vec<usize>, j: usize| {
            for x in set.iter_mut() {
                if *x == j {
                    *x = j + 1;
                } else if *x == j + 1 {
                    *x = j;
                }
            }
        };
        let mut rows: Vec<usize> = (1..=i).collect();
        for j in (1..=k).rev() {
            if self.entry(j) < 0 {
                swap(&mut rows, self.entry(j).unsigned_abs() as usize);
            }
        }
        let mut cols: Vec<usize> = (1..=i).collect();
        for j in k + 1..=self.m() {
            if self.entry(j) > 0 {
                swap(&mut cols, self.entry(j) as usize);
            }
        }
        rows.sort_unstable();
        cols.sort_unstable();
        Ok(GenMinorA { rows, cols })
    }

    /// `F_i = {f_1, …, f_m}` as minors.
    pub fn family(&self) -> Result<Vec<GenMinorA>, DbcError> {
        (1..=self.m()).map(|k| self.minor(k)).collect()
    }

    pub fn check_exchangeable(&self, k: usize) -> Result<(), DbcError> {
        if self.ex().contains(&k) {
            Ok(())
        } else {
            Err(DbcError::NotExchangeable {
                k,
                ex: self.ex().to_vec(),
            })
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sl3_word() -> DoubleWord {
        let a: CartanMatrix = "A2".parse().unwrap();
        parse_double_word(2, &[1, 2, 1, 2, 1, -1, -2, -1], &a).unwrap()
    }

    #[test]
    fn structure_of_sl3_word() {
        let w = sl3_word();
        assert_eq!(w.ex(), &[3, 4, 5, 6]);
        assert_eq!(w.structure().kplus, vec![3, 4, 5, 7, 6, 8, 9, 9]);
        assert_eq!(w.structure().kminus, vec![0, 0, 1, 2, 3, 5, 4, 6]);
        for k in 1..=w.m() {
            let p = w.structure().kplus(k);
            if p <= w.m() {
                assert_eq!(w.structure().kminus(p), k);
            }
        }
        assert_eq!(w.u_word(), vec![1, 2, 1]);
        assert_eq!(w.v_word(), vec![1, 2, 1]);
    }

    #[test]
    fn sl3_btilde_golden() {
        let b = sl3_word().btilde().unwrap();
        let want = vec![
            vec![-1, 0, 0, 0],
            vec![1, -1, 0, 0],
            vec![0, 1, -1, 0],
            vec![-1, 0, 1, -1],
            vec![1, -1, 0, 1],
            vec![0, 1, -1, 0],
            vec![0, -1, 0, 1],
            vec![0, 0, 0, -1],
        ];
        assert_eq!(b.entries(), want.as_slice());
        assert_eq!(b.ex(), &[2, 3, 4, 5]);
    }

    #[test]
    fn kminus_entries_are_minus_epsilon() {
        let w = sl3_word();
        for &k in w.ex() {
            let p = w.structure().kminus(k);
            if p > 0 {
                assert_eq!(w.btilde_entry(p, k).unwrap(), -w.entry(k).signum());
            }
        }
    }

    #[test]
    fn sl2_word() {
        let a: CartanMatrix = "A1".parse().unwrap();
        let w = parse_double_word(1, &[1, -1, 1], &a).unwrap();
        assert_eq!(w.ex(), &[2]);
        assert_eq!(w.structure().kplus, vec![2, 3, 4]);
        assert_eq!(w.btilde().unwrap().entries(), &[vec![1], vec![0], vec![1]]);
    }

    #[test]
    fn word_errors() {
        let a: CartanMatrix = "A2".parse().unwrap();
        let err = parse_double_word(2, &[1, 2, 1, 1], &a).unwrap_err();
        assert_eq!(err, DbcError::NotReduced { which: 'v', prefix: vec![1, 2, 1, 1] });
        assert_eq!(err.to_string(), "the v part is not reduced; failing prefix 1,2,1,1");
        let err = parse_double_word(2, &[1, 2, -2, 1, -2], &a).unwrap_err();
        assert!(matches!(err, DbcError::NotReduced { which: 'u', .. }));
        assert!(matches!(
            parse_double_word(2, &[2, 1], &a),
            Err(DbcError::BadPrefix { pos: 1, found: 2, .. })
        ));
        assert!(matches!(
            parse_double_word(2, &[1, 2, 3], &a),
            Err(DbcError::BadEntry { pos: 3, .. })
        ));
        assert!(matches!(parse_word_entries("1,x"), Err(DbcError::Syntax(_))));
        assert_eq!(parse_word_entries(" 1, 2,-1 ").unwrap(), vec![1, 2, -1]);
    }

    #[test]
    fn sl3_family() {
        let names: Vec<String> = sl3_word().family().unwrap().iter().map(ToString::to_string).collect();
        assert_eq!(
            names,
            ["D{1|3}", "D{12|23}", "D{1|2}", "D{12|12}", "D{1|1}", "D{2|1}", "D{23|12}", "D{3|1}"]
        );
    }

    #[test]
    fn weights_stay_in_orbit() {
        let w = sl3_word();
        for k in 1..=w.m() {
            let (g, d) = w.gamma_delta(k);
            let minor = w.minor(k).unwrap();
            assert_eq!(minor.rows.len(), minor.cols.len());
            // ω-coordinates of the subset weight e_I: c_j = [j ∈ I] - [j+1 ∈ I]
            let weight = |set: &[usize]| -> Vec<i64> {
                (1..=2)
                    .map(|j| i64::from(set.contains(&j)) - i64::from(set.contains(&(j + 1))))
                    .collect()
            };
            assert_eq!(g, weight(&minor.rows), "k = {k}");
            assert_eq!(d, weight(&minor.cols), "k = {k}");
        }
        let (g, _) = w.gamma_delta(1);
        assert_eq!(g, vec![1, 0]);
    }

    #[test]
    fn frozen_minors_depend_only_on_the_pair() {
        let a: CartanMatrix = "A2".parse().unwrap();
        let words = [
            vec![1, 2, 1, 2, 1, -1, -2, -1],
            vec![1, 2, 2, 1, 2, -2, -1, -2],
            vec![1, 2, -1, 1, -2, 2, -1, 1],
        ];
        let frozen: Vec<Vec<GenMinorA>> = words
            .iter()
            .map(|e| {
                let w = parse_double_word(2, e, &a).unwrap();
                let mut f: Vec<GenMinorA> = (1..=w.m())
                    .filter(|k| !w.ex().contains(k))
                    .map(|k| w.minor(k).unwrap())
                    .collect();
                f.sort();
                f
            })
            .collect();
        assert_eq!(frozen[0], frozen[1]);
        assert_eq!(frozen[0], frozen[2]);
    }

    #[test]
    fn btilde_is_a_valid_seed_matrix_for_other_types() {
        for (name, word) in [
            ("B2", vec![1, 2, 1, 2, 1, 2, -1, -2, -1, -2]),
            ("G2", vec![1, 2, -1, 1, -2, 2]),
            ("A3", vec![1, 2, 3, 1, 2, 1, -3, -2, -1]),
        ] {
            let a: CartanMatrix = name.parse().unwrap();
            let w = parse_double_word(a.n(), &word, &a).unwrap();
            assert!(w.btilde().is_ok(), "{name}");
        }
    }
}
