//! Integer factorization used to put radicands in squarefree form.

use std::collections::BTreeMap;

use num_bigint::{BigInt, BigUint};
use num_traits::{One, Signed, Zero};

pub fn is_probable_prime(n: &BigInt) -> bool {
    n.to_biguint().is_some_and(|n| num_prime::nt_funcs::is_prime(&n, None).probably())
}

/// Prime factorization of `|n|`, `n ≠ 0`.
pub fn factorize(n: &BigInt) -> BTreeMap<BigInt, u32> {
    assert!(!n.is_zero());
    let n: BigUint = n.magnitude().clone();
    num_prime::nt_funcs::factorize(n).into_iter().map(|(p, e)| (BigInt::from(p), e as u32)).collect()
}

/// `n = f²·m` with `m` squarefree (carrying the sign of `n`) and `f > 0`.
pub fn squarefree_decompose(n: &BigInt) -> (BigInt, BigInt) {
    if n.is_zero() {
        return (BigInt::one(), BigInt::zero());
    }
    let mut f = BigInt::one();
    let mut m = if n.is_negative() { -BigInt::one() } else { BigInt::one() };
    for (p, e) in factorize(n) {
        f *= num_traits::pow(p.clone(), (e / 2) as usize);
        if e % 2 == 1 {
            m *= p;
        }
    }
    (f, m)
}

pub fn is_squarefree(n: i64) -> bool {
    n != 0 && squarefree_decompose(&BigInt::from(n)).0.is_one()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn decompose_small() {
        assert_eq!(squarefree_decompose(&BigInt::from(8)), (2.into(), 2.into()));
        assert_eq!(squarefree_decompose(&BigInt::from(-28)), (2.into(), (-7).into()));
        assert_eq!(squarefree_decompose(&BigInt::from(1)), (1.into(), 1.into()));
    }

    #[test]
    fn decompose_large_square_factor() {
        // (10007 · 100003)² · 6
        let p = BigInt::from(10007u64) * BigInt::from(100003u64);
        let n = &p * &p * 6;
        assert_eq!(squarefree_decompose(&n), (p, 6.into()));
    }

    #[test]
    fn primality() {
        assert!(is_probable_prime(&BigInt::from(1_000_000_007u64)));
        assert!(!is_probable_prime(&BigInt::from(561)));
        assert!(is_squarefree(-7));
        assert!(!is_squarefree(12));
    }
}
