//! Values computed independently of the library: by recurrences written out
//! here, or by an external brute-force enumeration.

use forestlie_core::dyck::{coeff_cp, count_dyck, enumerate_dyck};
use forestlie_core::forests::{cprime, fiber};
use forestlie_core::partitions::{bell, enumerate_partitions};
use forestlie_core::polynomial::{sigma_bruteforce, sigma_formula, weighted_forest_count};
use forestlie_core::DyckVector;
use num_bigint::{BigInt, BigUint};

/// Ballot-table count of sequences with prefix sums bounded by the index.
fn ballot_count(k: usize) -> u64 {
    // ways[s] = number of prefixes with sum s
    let mut ways = vec![0u64; k + 1];
    ways[0] = 1;
    for i in 1..=k {
        let mut next = vec![0u64; k + 1];
        // sums above i - 1 are unreachable after i - 1 steps
        for (s, &w) in ways.iter().enumerate().take(i) {
            for slot in &mut next[s..=i] {
                *slot += w;
            }
        }
        ways = next;
    }
    ways.iter().sum()
}

/// Stirling numbers of the second kind, summed by row.
fn bell_by_stirling(n: usize) -> u64 {
    let mut row = vec![1u64];
    for i in 1..=n {
        let mut next = vec![0u64; i + 1];
        for (j, &s) in row.iter().enumerate() {
            next[j] += s * j as u64;
            next[j + 1] += s;
        }
        row = next;
    }
    row.iter().sum()
}

#[test]
fn dyck_counts_match_ballot_table() {
    for k in 0..=12 {
        assert_eq!(count_dyck(k), ballot_count(k), "k = {k}");
    }
}

#[test]
fn bell_numbers_match_stirling_rows() {
    for n in 0..=12 {
        assert_eq!(bell(n), BigUint::from(bell_by_stirling(n)), "n = {n}");
    }
    for n in 0..=7 {
        assert_eq!(enumerate_partitions(n).len() as u64, bell_by_stirling(n));
    }
}

#[test]
fn sigma_three_term_table() {
    // (bdeg, exponents, coefficient) from exhaustive enumeration of the
    // 24 forests on {1, 2, 3, ∘}
    let table: [(u32, [u32; 3], i64); 14] = [
        (0, [0, 0, 3], 2),
        (0, [0, 1, 2], 6),
        (0, [0, 2, 1], 4),
        (0, [1, 0, 2], 4),
        (0, [1, 1, 1], 8),
        (1, [0, 0, 2], 5),
        (1, [0, 1, 1], 9),
        (1, [0, 2, 0], 2),
        (1, [1, 0, 1], 6),
        (1, [1, 1, 0], 4),
        (2, [0, 0, 1], 4),
        (2, [0, 1, 0], 3),
        (2, [1, 0, 0], 2),
        (3, [0, 0, 0], 1),
    ];
    for s in [sigma_formula(3), sigma_bruteforce(3)] {
        assert_eq!(s.len(), table.len());
        for (b, e, c) in table {
            assert_eq!(s.coeff(b, &e), BigInt::from(c), "B^{b} X^{e:?}");
        }
    }
}

#[test]
fn weighted_forest_totals() {
    // sum_F 2^(l_F - 1) over forests on [k] ∪ {∘} is (k+2)!/2
    let want = [1u64, 3, 12, 60, 360, 2520, 20160];
    for (k, &w) in want.iter().enumerate() {
        assert_eq!(weighted_forest_count(k), BigUint::from(w));
        assert_eq!(sigma_formula(k).specialize_all_ones(), BigInt::from(w));
    }
}

#[test]
fn worked_example_by_brute_force() {
    let p = DyckVector::new(vec![0, 1, 0, 1, 3, 0, 1]).unwrap();
    assert_eq!(cprime(&p), BigUint::from(72u32));
    assert_eq!(coeff_cp(&p), BigUint::from(72u32));
}

#[test]
fn fibers_partition_all_forests() {
    for k in 0..=5usize {
        let total: usize = enumerate_dyck(k).iter().map(|p| fiber(p).len()).sum();
        assert_eq!(total as u64, (1..=k as u64 + 1).product::<u64>());
    }
}
