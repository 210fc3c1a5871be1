use std::cmp::Ordering;

/// Exponent vector over base variables followed by radical symbols.
///
/// Ordered graded-lexicographically: total degree first, then the first
/// differing exponent decides, larger exponent of an earlier variable wins.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Monomial(Vec<u32>);

impl Monomial {
    pub fn new(exps: Vec<u32>) -> Monomial {
        Monomial(exps)
    }

    pub fn one(width: usize) -> Monomial {
        Monomial(vec![0; width])
    }

    pub fn var(width: usize, slot: usize) -> Monomial {
        let mut e = vec![0; width];
        e[slot] = 1;
        Monomial(e)
    }

    pub fn exps(&self) -> &[u32] {
        &self.0
    }

    pub fn degree(&self) -> u32 {
        self.0.iter().sum()
    }

    pub fn is_one(&self) -> bool {
        self.0.iter().all(|&e| e == 0)
    }

    pub fn mul(&self, other: &Monomial) -> Monomial {
        Monomial(self.0.iter().zip(&other.0).map(|(a, b)| a + b).collect())
    }

    pub fn divides(&self, other: &Monomial) -> bool {
        self.0.iter().zip(&other.0).all(|(a, b)| a <= b)
    }

    /// `self / other`, assuming `other` divides `self`.
    pub fn div(&self, other: &Monomial) -> Monomial {
        Monomial(self.0.iter().zip(&other.0).map(|(a, b)| a - b).collect())
    }

    pub fn gcd(&self, other: &Monomial) -> Monomial {
        Monomial(
            self.0
                .iter()
                .zip(&other.0)
                .map(|(a, b)| *a.min(b))
                .collect(),
        )
    }

    pub fn exp(&self, slot: usize) -> u32 {
        self.0[slot]
    }

    pub(crate) fn with_exp(&self, slot: usize, e: u32) -> Monomial {
        let mut v = self.0.clone();
        v[slot] = e;
        Monomial(v)
    }

    /// True when every base exponent is even and no radical appears.
    pub fn is_even(&self, nbase: usize) -> bool {
        self.0[..nbase].iter().all(|e| e % 2 == 0) && self.0[nbase..].iter().all(|&e| e == 0)
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

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grlex_order() {
        let x2 = Monomial::new(vec![2, 0]);
        let xy = Monomial::new(vec![1, 1]);
        let y2 = Monomial::new(vec![0, 2]);
        let x = Monomial::new(vec![1, 0]);
        assert!(x2 > xy && xy > y2 && y2 > x);
    }

    #[test]
    fn divide_and_gcd() {
        let a = Monomial::new(vec![3, 1]);
        let b = Monomial::new(vec![1, 1]);
        assert!(b.divides(&a));
        assert!(!a.divides(&b));
        assert_eq!(a.div(&b), Monomial::new(vec![2, 0]));
        assert_eq!(a.gcd(&Monomial::new(vec![0, 4])), Monomial::new(vec![0, 1]));
    }
}
