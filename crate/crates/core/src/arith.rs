//! Exact integer helpers shared by the coefficient formulas.

use num_bigint::BigUint;
use num_traits::One;

/// `binom(m, n)` extended by zero: returns 0 whenever `n` is outside `0..=m`
/// (including negative `n` and negative `m`).
pub fn binomial(m: i64, n: i64) -> BigUint {
    if m < 0 || n < 0 || n > m {
        return BigUint::default();
    }
    let n = n.min(m - n) as u64;
    let m = m as u64;
    let mut acc = BigUint::one();
    for i in 0..n {
        acc *= m - i;
        acc /= i + 1;
    }
    acc
}

pub fn factorial(n: u64) -> BigUint {
    (1..=n).fold(BigUint::one(), |acc, i| acc * i)
}

/// `Catalan(n) = binom(2n, n) / (n + 1)`.
pub fn catalan(n: u64) -> BigUint {
    binomial(2 * n as i64, n as i64) / (n + 1)
}

/// `h! / prod(parts_j!)`.
pub fn multinomial(parts: &[u32]) -> BigUint {
    let total: u64 = parts.iter().map(|&p| p as u64).sum();
    let denom = parts
        .iter()
        .fold(BigUint::one(), |acc, &p| acc * factorial(p as u64));
    factorial(total) / denom
}

/// Compact rendering of a small integer sequence: digits run together when
/// every entry is a single digit, otherwise comma separated.
pub(crate) fn compact_digits(xs: &[u32]) -> String {
    if xs.iter().all(|&x| x < 10) {
        xs.iter().map(|x| x.to_string()).collect()
    } else {
        xs.iter()
            .map(|x| x.to_string())
            .collect::<Vec<_>>()
            .join(",")
    }
}

/// An exact JSON integer literal for an arbitrary-precision value.
pub fn json_integer(n: &impl std::fmt::Display) -> serde_json::Number {
    n.to_string().parse().expect("integer literal")
}

/// Serializes an arbitrary-precision integer as a bare JSON number.
pub fn serialize_integer<T: std::fmt::Display, S: serde::Serializer>(
    n: &T,
    s: S,
) -> Result<S::Ok, S::Error> {
    serde::Serialize::serialize(&json_integer(n), s)
}
