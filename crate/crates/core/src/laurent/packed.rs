//! Word-sized fast paths for multiplication and division.
//!
//! Nonnegative exponent vectors with at most [`MAX_VARS`] entries are packed
//! into a `u128` as `degree | e0 | e1 | ...` in 16-bit fields, so integer order
//! on keys is graded lex order and key addition is monomial multiplication.
//! Coefficients live in a 256-bit integer. Arithmetic wraps, so overflow is
//! excluded up front by bit-size bounds; when a bound fails the caller falls
//! back to `BigInt` arithmetic.

use std::collections::{BTreeMap, HashMap};

use num_bigint::BigInt;
use ethnum::I256;

use super::Monomial;

pub(super) const MAX_VARS: usize = 7;
const BITS: u32 = 16;
const LIMIT: i64 = 1 << BITS;
const MASK: u128 = (1 << BITS) - 1;
// magnitudes below 2^WORD_BITS cannot overflow an I256
const WORD_BITS: u32 = 254;

pub(super) type Terms = Vec<(Monomial, BigInt)>;

fn field_shift(n: usize, i: usize) -> u32 {
    BITS * (n - 1 - i) as u32
}

fn degree_shift(n: usize) -> u32 {
    BITS * n as u32
}

/// Packs `m / shift`; `None` if an exponent is negative or any field is too wide.
fn pack(m: &Monomial, shift: &[i32]) -> Option<u128> {
    let n = shift.len();
    let mut key = 0u128;
    let mut deg = 0i64;
    for (i, (&e, &s)) in m.exponents().iter().zip(shift).enumerate() {
        let e = e as i64 - s as i64;
        if !(0..LIMIT).contains(&e) {
            return None;
        }
        deg += e;
        key |= (e as u128) << field_shift(n, i);
    }
    if deg >= LIMIT {
        return None;
    }
    Some(key | (deg as u128) << degree_shift(n))
}

fn unpack(key: u128, shift: &[i32]) -> Monomial {
    let n = shift.len();
    let e: Vec<i32> = (0..n)
        .map(|i| ((key >> field_shift(n, i)) & MASK) as i32 + shift[i])
        .collect();
    Monomial::new(e)
}

fn divides(d: u128, m: u128, n: usize) -> bool {
    (0..n).all(|i| field(d, n, i) <= field(m, n, i))
}

fn to_word(c: &BigInt) -> Option<I256> {
    let bytes = c.to_signed_bytes_le();
    if bytes.len() > 32 {
        return None;
    }
    let fill = if c.sign() == num_bigint::Sign::Minus { 0xff } else { 0 };
    let mut word = [fill; 32];
    word[..bytes.len()].copy_from_slice(&bytes);
    Some(I256::from_le_bytes(word))
}

fn from_word(c: I256) -> BigInt {
    BigInt::from_signed_bytes_le(&c.to_le_bytes())
}

fn pack_terms(terms: &Terms, shift: &[i32]) -> Option<Vec<(u128, I256)>> {
    terms
        .iter()
        .map(|(m, c)| Some((pack(m, shift)?, to_word(c)?)))
        .collect()
}

fn bits(x: u128) -> u32 {
    128 - x.leading_zeros()
}

fn max_bits(terms: &[(u128, I256)]) -> u32 {
    terms
        .iter()
        .map(|(_, c)| 256 - c.unsigned_abs().leading_zeros())
        .max()
        .unwrap_or(0)
}

fn max_degree(terms: &[(u128, I256)], n: usize) -> i64 {
    terms.iter().map(|(k, _)| (k >> degree_shift(n)) as i64).max().unwrap_or(0)
}

fn unpack_terms(mut terms: Vec<(u128, I256)>, shift: &[i32]) -> Terms {
    terms.sort_unstable_by(|a, b| b.0.cmp(&a.0));
    terms
        .into_iter()
        .map(|(k, c)| (unpack(k, shift), from_word(c)))
        .collect()
}

fn min_exponents(terms: &Terms) -> Vec<i32> {
    let mut it = terms.iter();
    let mut acc = it.next().expect("nonempty").0.exponents().to_vec();
    for (m, _) in it {
        for (a, &e) in acc.iter_mut().zip(m.exponents()) {
            *a = (*a).min(e);
        }
    }
    acc
}

/// Dense mixed-radix layout of a box `[0, max_0] x ... x [0, max_{n-1}]`.
/// Index arithmetic is monomial arithmetic as long as no digit leaves its box.
struct Grid {
    maxes: Vec<u128>,
    strides: Vec<usize>,
    cells: usize,
}

const DENSE_CELLS: usize = 1 << 20;

impl Grid {
    /// `None` if the box has more than `budget` cells.
    fn new(maxes: Vec<u128>, budget: usize) -> Option<Grid> {
        let mut strides = vec![0; maxes.len()];
        let mut cells = 1usize;
        for i in (0..maxes.len()).rev() {
            strides[i] = cells;
            cells = cells.checked_mul(maxes[i] as usize + 1)?;
        }
        (cells <= budget.min(DENSE_CELLS)).then_some(Grid { maxes, strides, cells })
    }

    fn index(&self, key: u128) -> usize {
        let n = self.maxes.len();
        (0..n).map(|i| field(key, n, i) as usize * self.strides[i]).sum()
    }

    fn digits(&self, mut idx: usize) -> impl Iterator<Item = u128> + '_ {
        self.strides.iter().map(move |&s| {
            let d = idx / s;
            idx %= s;
            d as u128
        })
    }

    fn key(&self, idx: usize) -> u128 {
        let n = self.maxes.len();
        let (key, deg) = self
            .digits(idx)
            .enumerate()
            .fold((0u128, 0u128), |(k, g), (i, d)| (k | d << field_shift(n, i), g + d));
        key | deg << degree_shift(n)
    }
}

fn field(key: u128, n: usize, i: usize) -> u128 {
    (key >> field_shift(n, i)) & MASK
}

fn field_maxes(terms: &[(u128, I256)], n: usize) -> Vec<u128> {
    (0..n)
        .map(|i| terms.iter().map(|&(k, _)| field(k, n, i)).max().unwrap_or(0))
        .collect()
}

/// Product of two nonempty term lists, or `None` when the fast path does not apply.
pub(super) fn mul(a: &Terms, b: &Terms) -> Option<Terms> {
    let n = a[0].0.len();
    if n == 0 || n > MAX_VARS {
        return None;
    }
    let (sa, sb) = (min_exponents(a), min_exponents(b));

    let pa = pack_terms(a, &sa)?;
    let pb = pack_terms(b, &sb)?;
    if max_degree(&pa, n) + max_degree(&pb, n) >= LIMIT {
        return None;
    }
    // each output coefficient sums at most min(|a|, |b|) products
    let fanin = bits(pa.len().min(pb.len()) as u128);
    if max_bits(&pa) + max_bits(&pb) + fanin >= WORD_BITS {
        return None;
    }
    let shift: Vec<i32> = sa.iter().zip(&sb).map(|(x, y)| x + y).collect();
    let maxes: Vec<u128> = field_maxes(&pa, n)
        .iter()
        .zip(field_maxes(&pb, n))
        .map(|(x, y)| x + y)
        .collect();
    if let Some(grid) = Grid::new(maxes, 16 * pa.len() * pb.len() + 4096) {
        let mut acc = vec![I256::ZERO; grid.cells];
        let ib: Vec<(usize, I256)> = pb.iter().map(|&(k, c)| (grid.index(k), c)).collect();
        for &(ka, ca) in &pa {
            let ia = grid.index(ka);
            for &(jb, cb) in &ib {
                let e = &mut acc[ia + jb];
                *e = e.wrapping_add(ca.wrapping_mul(cb));
            }
        }
        let terms = acc
            .into_iter()
            .enumerate()
            .filter(|&(_, c)| c != I256::ZERO)
            .map(|(i, c)| (grid.key(i), c))
            .collect();
        return Some(unpack_terms(terms, &shift));
    }
    let mut acc: HashMap<u128, I256> = HashMap::with_capacity((pa.len() + pb.len()) * 4);
    for &(ka, ca) in &pa {
        for &(kb, cb) in &pb {
            let e = acc.entry(ka + kb).or_insert(I256::ZERO);
            *e = e.wrapping_add(ca.wrapping_mul(cb));
        }
    }
    Some(unpack_terms(
        acc.into_iter().filter(|&(_, c)| c != I256::ZERO).collect(),
        &shift,
    ))
}

pub(super) enum Reduced {
    Done(Terms, Terms),
    NotExact,
}

/// Leading-term reduction of `p` by `d`, both with nonnegative exponents.
/// With `exact`, stops at the first term that does not reduce.
pub(super) fn reduce(p: &Terms, d: &Terms, exact: bool) -> Option<Reduced> {
    let n = p[0].0.len();
    if n == 0 || n > MAX_VARS {
        return None;
    }
    let zero = vec![0; n];
    let pp = pack_terms(p, &zero)?;
    let pd = pack_terms(d, &zero)?;
    if max_degree(&pp, n) + max_degree(&pd, n) >= LIMIT {
        return None;
    }
    // A work entry starts as a coefficient of p and receives at most |d|
    // updates dc * t, so it stays below max|p| + |d| max|dc| max|t|.
    let (p_bits, d_bits) = (max_bits(&pp), max_bits(&pd) + bits(pd.len() as u128));
    if p_bits >= WORD_BITS - 1 {
        return None;
    }
    if exact {
        let (pmax, dmax) = (field_maxes(&pp, n), field_maxes(&pd, n));
        if pmax.iter().zip(&dmax).any(|(p, d)| d > p) {
            return Some(Reduced::NotExact);
        }
        if let Some(grid) = Grid::new(pmax, 16 * pp.len() * pd.len() + 4096) {
            return dense_exact(&grid, &pp, &pd, &dmax, d_bits).map(|q| match q {
                Some(q) => Reduced::Done(unpack_terms(q, &zero), Vec::new()),
                None => Reduced::NotExact,
            });
        }
    }
    let (lead_k, lead_c) = pd[0];
    let mut work: BTreeMap<u128, I256> = pp.into_iter().collect();
    let mut quotient = Vec::new();
    let mut remainder = Vec::new();
    while let Some((k, c)) = work.pop_last() {
        let divisible = divides(lead_k, k, n) && c % lead_c == I256::ZERO;
        if !divisible {
            if exact {
                return Some(Reduced::NotExact);
            }
            remainder.push((k, c));
            continue;
        }
        let t = c / lead_c;
        if d_bits + 256 - t.unsigned_abs().leading_zeros() >= WORD_BITS - 1 {
            return None;
        }
        let tk = k - lead_k;
        for &(dk, dc) in &pd[1..] {
            let e = work.entry(dk + tk).or_insert(I256::ZERO);
            *e = e.wrapping_sub(dc.wrapping_mul(t));
            if *e == I256::ZERO {
                work.remove(&(dk + tk));
            }
        }
        quotient.push((tk, t));
    }
    Some(Reduced::Done(
        unpack_terms(quotient, &zero),
        unpack_terms(remainder, &zero),
    ))
}

/// Exact division after Kronecker substitution into the grid of `p`. The
/// univariate quotient is the multivariate one exactly when every quotient
/// monomial fits in the box of `p` shrunk by the box of `d`.
fn dense_exact(
    grid: &Grid,
    pp: &[(u128, I256)],
    pd: &[(u128, I256)],
    dmax: &[u128],
    d_bits: u32,
) -> Option<Option<Vec<(u128, I256)>>> {
    let mut work = vec![I256::ZERO; grid.cells];
    for &(k, c) in pp {
        work[grid.index(k)] = c;
    }
    let mut d: Vec<(usize, I256)> = pd.iter().map(|&(k, c)| (grid.index(k), c)).collect();
    d.sort_unstable_by(|a, b| b.0.cmp(&a.0));
    let (lead_i, lead_c) = d[0];
    let mut quotient = Vec::new();
    for idx in (lead_i..grid.cells).rev() {
        let c = work[idx];
        if c == I256::ZERO {
            continue;
        }
        if c % lead_c != I256::ZERO {
            return Some(None);
        }
        let t = c / lead_c;
        if d_bits + 256 - t.unsigned_abs().leading_zeros() >= WORD_BITS - 1 {
            return None;
        }
        let base = idx - lead_i;
        work[idx] = I256::ZERO;
        for &(j, dc) in &d[1..] {
            let e = &mut work[base + j];
            *e = e.wrapping_sub(dc.wrapping_mul(t));
        }
        quotient.push((base, t));
    }
    if work[..lead_i].iter().any(|&c| c != I256::ZERO) {
        return Some(None);
    }
    let fits = |idx: usize| {
        grid.digits(idx)
            .zip(grid.maxes.iter().zip(dmax))
            .all(|(q, (p, d))| q <= p - d)
    };
    if !quotient.iter().all(|&(i, _)| fits(i)) {
        return Some(None);
    }
    Some(Some(quotient.into_iter().map(|(i, t)| (grid.key(i), t)).collect()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn packing_preserves_grlex() {
        let shift = [0, 0];
        let k = |e: [i32; 2]| pack(&Monomial::new(e.to_vec()), &shift).unwrap();
        assert!(k([0, 3]) > k([2, 0]));
        assert!(k([2, 0]) > k([1, 1]));
        assert_eq!(k([1, 2]), k([1, 0]) + k([0, 2]));
        assert_eq!(unpack(k([4, 5]), &shift).exponents(), &[4, 5]);
        assert!(pack(&Monomial::new(vec![-1, 0]), &shift).is_none());
    }

    fn random_terms(rng: &mut impl Rng, n: usize, len: usize, bits: u32) -> Terms {
        let mut map = std::collections::BTreeMap::new();
        for _ in 0..len {
            let e: Vec<i32> = (0..n).map(|_| rng.random_range(-3..4)).collect();
            let c = BigInt::from(rng.random_range(-9i64..10)) << rng.random_range(0..bits);
            map.insert(Monomial::new(e), c);
        }
        map.into_iter().rev().filter(|(_, c)| *c != BigInt::from(0)).collect()
    }

    fn naive_mul(a: &Terms, b: &Terms) -> Terms {
        let mut acc = std::collections::BTreeMap::new();
        for (ma, ca) in a {
            for (mb, cb) in b {
                *acc.entry(ma.mul(mb)).or_insert_with(|| BigInt::from(0)) += ca * cb;
            }
        }
        acc.into_iter().rev().filter(|(_, c)| *c != BigInt::from(0)).collect()
    }

    fn shifted(t: &Terms) -> Terms {
        let s = Monomial::new(min_exponents(t));
        t.iter().map(|(m, c)| (m.div(&s), c.clone())).collect()
    }

    #[test]
    fn dense_and_sparse_paths_agree_with_naive_product() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for round in 0..200 {
            let n = 1 + round % 4;
            let bits = if round % 3 == 0 { 120 } else { 8 };
            let a = random_terms(&mut rng, n, 1 + round % 9, bits);
            let b = random_terms(&mut rng, n, 2 + round % 7, bits);
            if a.is_empty() || b.len() < 2 {
                continue;
            }
            let prod = naive_mul(&a, &b);
            assert_eq!(mul(&a, &b).unwrap(), prod);
            let (p, d) = (shifted(&prod), shifted(&b));
            match reduce(&p, &d, true).unwrap() {
                Reduced::Done(q, r) => {
                    assert!(r.is_empty());
                    assert_eq!(naive_mul(&q, &d), p);
                }
                Reduced::NotExact => panic!("product must divide"),
            }
            let mut bumped = p.clone();
            bumped.push((Monomial::one(n), BigInt::from(1)));
            let bumped: Terms = naive_mul(&bumped, &[(Monomial::one(n), BigInt::from(1))].to_vec());
            if let Some(Reduced::Done(q, _)) = reduce(&bumped, &d, true) {
                assert_ne!(naive_mul(&q, &d), bumped);
            }
        }
    }

    #[test]
    fn word_round_trip() {
        for c in ["0", "-1", "255", "-256", "340282366920938463463374607431768211457"] {
            let c: BigInt = c.parse().unwrap();
            assert_eq!(from_word(to_word(&c).unwrap()), c);
        }
        let big = BigInt::from(1) << 255u32;
        assert!(to_word(&big).is_none());
        assert_eq!(from_word(to_word(&-big.clone()).unwrap()), -big);
    }
}
