//! Closed-form counts: Stirling numbers of the second kind, the total number
//! of diagrams in three independent forms, per-rank counts and the size of
//! the row-extension boxes.

use num_bigint::{BigInt, BigUint};
use num_traits::{One, Signed, Zero};

use crate::diagrams::RVector;
use crate::error::{Error, Result};

fn pow(base: usize, exp: usize) -> BigUint {
    num_traits::pow(BigUint::from(base), exp)
}

pub fn factorial(n: usize) -> BigUint {
    (1..=n).fold(BigUint::one(), |acc, k| acc * k)
}

pub fn binomial(n: usize, k: usize) -> BigUint {
    if k > n {
        return BigUint::zero();
    }
    let k = k.min(n - k);
    (0..k).fold(BigUint::one(), |acc, i| acc * (n - i) / (i + 1))
}

/// The triangle `S(i, j)` for `i ≤ n`, `j ≤ i`, via `S(i,j) = j·S(i−1,j) + S(i−1,j−1)`.
pub fn stirling2_table(n: usize) -> Vec<Vec<BigUint>> {
    let mut rows: Vec<Vec<BigUint>> = vec![vec![BigUint::one()]];
    for i in 1..=n {
        let prev = &rows[i - 1];
        let row = (0..=i)
            .map(|j| {
                let keep = if j < i { &prev[j] * j } else { BigUint::zero() };
                let grow = if j > 0 { prev[j - 1].clone() } else { BigUint::zero() };
                keep + grow
            })
            .collect();
        rows.push(row);
    }
    rows
}

/// Stirling number of the second kind.
pub fn stirling2(n: usize, k: usize) -> BigUint {
    if k > n {
        return BigUint::zero();
    }
    stirling2_table(n).swap_remove(n).swap_remove(k)
}

/// `S(n,k) = (−1)^k/k! · Σ_{j=0}^{k} (−1)^j C(k,j) j^n`.
pub fn stirling2_inclusion_exclusion(n: usize, k: usize) -> BigUint {
    let mut sum = BigInt::zero();
    for j in 0..=k {
        let term = BigInt::from(binomial(k, j) * pow(j, n));
        if (j + k).is_multiple_of(2) {
            sum += term;
        } else {
            sum -= term;
        }
    }
    let fact = BigInt::from(factorial(k));
    debug_assert!((&sum % &fact).is_zero());
    (sum / fact).to_biguint().expect("partition counts are non-negative")
}

/// `(−1)^{n−1} Σ_{k=1}^{n} (k+1)^n Σ_{j=1}^{k} (−1)^{j−1} C(k,j) j^n`.
pub fn cauchon_s(n: usize) -> BigUint {
    let mut total = BigInt::zero();
    for k in 1..=n {
        let mut inner = BigInt::zero();
        for j in 1..=k {
            let term = BigInt::from(binomial(k, j) * pow(j, n));
            if j % 2 == 1 {
                inner += term;
            } else {
                inner -= term;
            }
        }
        total += BigInt::from(pow(k + 1, n)) * inner;
    }
    if n.is_multiple_of(2) {
        total = -total;
    }
    non_negative(total)
}

/// `B_n^{(−n)} = (−1)^n Σ_{k=1}^{n} (−1)^k k! (k+1)^n S(n,k)`.
pub fn poly_bernoulli_nn(n: usize) -> BigUint {
    let row = stirling2_table(n).swap_remove(n);
    let mut total = BigInt::zero();
    for (k, s) in row.iter().enumerate().skip(1) {
        let term = BigInt::from(factorial(k) * pow(k + 1, n) * s);
        if (n + k).is_multiple_of(2) {
            total += term;
        } else {
            total -= term;
        }
    }
    non_negative(total)
}

fn non_negative(x: BigInt) -> BigUint {
    assert!(!x.is_negative(), "count evaluated to a negative number: {x}");
    x.to_biguint().expect("checked non-negative")
}

/// `t!·S(n+1, t+1)`: the number of diagrams whose rank is `t` in one direction.
pub fn rank_root(n: usize, t: usize) -> BigUint {
    factorial(t) * stirling2(n + 1, t + 1)
}

/// `(t!·S(n+1, t+1))²`.
pub fn rank_count(n: usize, t: usize) -> BigUint {
    let root = rank_root(n, t);
    &root * &root
}

/// `Σ_{t=0}^{n} (t!·S(n+1,t+1))²`.
pub fn kaneko_sum_squares(n: usize) -> BigUint {
    let row = stirling2_table(n + 1).swap_remove(n + 1);
    (0..=n)
        .map(|t| {
            let root = factorial(t) * &row[t + 1];
            &root * &root
        })
        .sum()
}

/// `|Γ_r| = Π_{l=0}^{t} (l+1)^{r_{l+1} − r_l}` with `r_0 = 0`, `r_{t+1} = n`.
pub fn gamma_size(r: &RVector) -> BigUint {
    let mut bounds = vec![0];
    bounds.extend_from_slice(r.entries());
    bounds.push(r.n());
    bounds.windows(2).enumerate().fold(BigUint::one(), |acc, (l, w)| acc * pow(l + 1, w[1] - w[0]))
}

/// Partial sums `(a_1, a_1+a_2, …, a_1+⋯+a_t)` of a composition of `n+1`
/// into `t+1` positive parts.
pub fn composition_to_r(parts: &[usize]) -> Result<RVector> {
    let bad = |reason: &str| Error::BadComposition { parts: parts.to_vec(), reason: reason.to_string() };
    if parts.is_empty() {
        return Err(bad("no parts"));
    }
    if parts.contains(&0) {
        return Err(bad("parts must be positive"));
    }
    let total: usize = parts.iter().sum();
    let n = total - 1;
    if n == 0 {
        return Err(bad("parts must sum to at least 2"));
    }
    let r: Vec<usize> = parts[..parts.len() - 1]
        .iter()
        .scan(0, |acc, &a| {
            *acc += a;
            Some(*acc)
        })
        .collect();
    RVector::new(n, r)
}

/// `(r_1, r_2 − r_1, …, r_t − r_{t−1}, n+1 − r_t)`.
pub fn r_to_composition(r: &RVector) -> Vec<usize> {
    let mut prev = 0;
    let mut parts: Vec<usize> = r
        .entries()
        .iter()
        .map(|&x| {
            let d = x - prev;
            prev = x;
            d
        })
        .collect();
    parts.push(r.n() + 1 - prev);
    parts
}

/// All compositions of `total` into `k` positive parts, lexicographically.
pub fn compositions(total: usize, k: usize) -> Vec<Vec<usize>> {
    fn go(rest: usize, k: usize, prefix: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if k == 1 {
            if rest >= 1 {
                prefix.push(rest);
                out.push(prefix.clone());
                prefix.pop();
            }
            return;
        }
        for a in 1..rest.saturating_sub(k - 2) {
            prefix.push(a);
            go(rest - a, k - 1, prefix, out);
            prefix.pop();
        }
    }
    let mut out = Vec::new();
    if k >= 1 && total >= k {
        go(total, k, &mut Vec::new(), &mut out);
    }
    out
}

/// `Σ_{a_1+⋯+a_{t+1} = n+1} Π_k k^{a_k − 1}`, which equals `S(n+1, t+1)`.
pub fn composition_weight_sum(n: usize, t: usize) -> BigUint {
    compositions(n + 1, t + 1)
        .iter()
        .map(|a| a.iter().enumerate().fold(BigUint::one(), |acc, (k, &ak)| acc * pow(k + 1, ak - 1)))
        .sum()
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn big(x: u64) -> BigUint {
        BigUint::from(x)
    }

    /// Number of set partitions of `{0..n}` into exactly `k` blocks, by
    /// assigning each element a block label in restricted-growth form.
    fn brute_partitions(n: usize, k: usize) -> u64 {
        fn go(i: usize, n: usize, used: usize, k: usize) -> u64 {
            if i == n {
                return u64::from(used == k);
            }
            let mut c = 0;
            for b in 0..=used.min(k.saturating_sub(1)) {
                c += go(i + 1, n, used.max(b + 1), k);
            }
            c
        }
        go(0, n, 0, k)
    }

    #[test]
    fn stirling_examples() {
        assert_eq!(stirling2(0, 0), big(1));
        for n in 1..10 {
            assert_eq!(stirling2(n, 0), big(0));
            assert_eq!(stirling2(n, n), big(1));
        }
        assert_eq!(stirling2(4, 2), big(7));
        assert_eq!(stirling2(3, 5), big(0));
        for n in 0..=8 {
            for k in 0..=n {
                assert_eq!(stirling2(n, k), big(brute_partitions(n, k)), "S({n},{k})");
            }
        }
    }

    #[test]
    fn stirling_forms_agree() {
        let table = stirling2_table(12);
        for (n, row) in table.iter().enumerate() {
            for k in 0..=12 {
                let rec = row.get(k).cloned().unwrap_or_default();
                assert_eq!(rec, stirling2_inclusion_exclusion(n, k), "S({n},{k})");
            }
        }
    }

    #[test]
    fn totals() {
        let expected = [2u64, 14, 230, 6902, 329462, 22934774];
        for (i, &e) in expected.iter().enumerate() {
            let n = i + 1;
            assert_eq!(cauchon_s(n), big(e));
            assert_eq!(poly_bernoulli_nn(n), big(e));
            assert_eq!(kaneko_sum_squares(n), big(e));
        }
        for n in 1..=10 {
            assert_eq!(cauchon_s(n), poly_bernoulli_nn(n));
            assert_eq!(cauchon_s(n), kaneko_sum_squares(n));
        }
    }

    #[test]
    fn rank_counts() {
        for n in 1..=10 {
            assert_eq!(rank_count(n, 0), big(1));
            let two = num_traits::pow(big(2), n) - 1u32;
            assert_eq!(rank_count(n, 1), &two * &two);
            let f = factorial(n);
            assert_eq!(rank_count(n, n), &f * &f);
        }
        let n4: Vec<BigUint> = (0..=4).map(|t| rank_count(4, t)).collect();
        assert_eq!(n4, [1u64, 225, 2500, 3600, 576].map(big));
    }

    #[test]
    fn gamma_sizes() {
        assert_eq!(gamma_size(&RVector::new(3, vec![1, 3]).unwrap()), big(4));
        assert_eq!(gamma_size(&RVector::new(3, vec![1, 2]).unwrap()), big(6));
        assert_eq!(gamma_size(&RVector::new(3, vec![]).unwrap()), big(1));
        assert_eq!(gamma_size(&RVector::new(2, vec![1, 2]).unwrap()), big(2));
    }

    #[test]
    fn gamma_sums() {
        for n in 1..=8 {
            for t in 0..=n {
                let sum: BigUint = RVector::all(n, t).iter().map(gamma_size).sum();
                assert_eq!(sum, rank_root(n, t), "n={n} t={t}");
            }
        }
    }

    #[test]
    fn compositions_and_transport() {
        assert_eq!(composition_to_r(&[1, 2, 1]).unwrap(), RVector::new(3, vec![1, 3]).unwrap());
        assert_eq!(composition_to_r(&[4]).unwrap(), RVector::new(3, vec![]).unwrap());
        assert!(matches!(composition_to_r(&[1, 0, 3]), Err(Error::BadComposition { .. })));
        assert!(matches!(composition_to_r(&[]), Err(Error::BadComposition { .. })));
        assert!(matches!(composition_to_r(&[1]), Err(Error::BadComposition { .. })));
        assert_eq!(compositions(4, 3), vec![vec![1, 1, 2], vec![1, 2, 1], vec![2, 1, 1]]);
        assert_eq!(composition_weight_sum(3, 2), big(6));
        for total in 2..=8 {
            let n = total - 1;
            for k in 1..=total {
                let comps = compositions(total, k);
                assert_eq!(
                    comps.len() as u64,
                    binomial(total - 1, k - 1).to_u64_digits().first().copied().unwrap_or(0)
                );
                let rs: Vec<RVector> = comps.iter().map(|a| composition_to_r(a).unwrap()).collect();
                assert_eq!(rs, RVector::all(n, k - 1));
                for (a, r) in comps.iter().zip(&rs) {
                    assert_eq!(&r_to_composition(r), a);
                }
                assert_eq!(composition_weight_sum(n, k - 1), stirling2(total, k));
            }
        }
    }

    proptest! {
        #[test]
        fn binomial_pascal(n in 1usize..60, k in 1usize..60) {
            prop_assert_eq!(binomial(n, k), binomial(n - 1, k - 1) + binomial(n - 1, k));
        }

        #[test]
        fn transport_round_trip(parts in prop::collection::vec(1usize..5, 1..7)) {
            prop_assume!(parts.iter().sum::<usize>() >= 2);
            let r = composition_to_r(&parts).unwrap();
            prop_assert_eq!(r_to_composition(&r), parts);
        }
    }
}
