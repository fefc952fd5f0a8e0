use std::cmp::Ordering;
use std::fmt;

/// Dense exponent vector of a Laurent monomial; entries may be negative.
///
/// Ordered by graded lexicographic order over the variable order of the
/// owning [`VarSet`](super::VarSet): total degree first, then the exponent of
/// the first variable, then the second, and so on.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Monomial(Box<[i32]>);

impl Monomial {
    pub fn new(exponents: impl Into<Box<[i32]>>) -> Self {
        Monomial(exponents.into())
    }

    pub fn one(len: usize) -> Self {
        Monomial(vec![0; len].into_boxed_slice())
    }

    pub fn unit(len: usize, var: usize, exponent: i32) -> Self {
        let mut e = vec![0; len];
        e[var] = exponent;
        Monomial(e.into_boxed_slice())
    }

    pub fn exponents(&self) -> &[i32] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn degree(&self) -> i64 {
        self.0.iter().map(|&e| e as i64).sum()
    }

    pub fn is_one(&self) -> bool {
        self.0.iter().all(|&e| e == 0)
    }

    pub fn mul(&self, other: &Monomial) -> Monomial {
        debug_assert_eq!(self.len(), other.len());
        Monomial(self.0.iter().zip(other.0.iter()).map(|(a, b)| a + b).collect())
    }

    /// `self / other`; always defined for Laurent monomials.
    pub fn div(&self, other: &Monomial) -> Monomial {
        debug_assert_eq!(self.len(), other.len());
        Monomial(self.0.iter().zip(other.0.iter()).map(|(a, b)| a - b).collect())
    }

    /// True when `other` divides `self` in the ordinary polynomial sense.
    pub fn is_divisible_by(&self, other: &Monomial) -> bool {
        self.0.iter().zip(other.0.iter()).all(|(a, b)| a >= b)
    }

    /// Componentwise minimum.
    pub fn gcd(&self, other: &Monomial) -> Monomial {
        Monomial(self.0.iter().zip(other.0.iter()).map(|(a, b)| *a.min(b)).collect())
    }

    pub fn pow(&self, n: i32) -> Monomial {
        Monomial(self.0.iter().map(|e| e * n).collect())
    }
}

impl Ord for Monomial {
    fn cmp(&self, other: &Self) -> Ordering {
        self.degree()
            .cmp(&other.degree())
            .then_with(|| self.0.cmp(&other.0))
    }
}

impl PartialOrd for Monomial {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Debug for Monomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?}", &self.0)
    }
}
