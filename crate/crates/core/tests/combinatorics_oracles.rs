//! Counting cross-checks for the shape and tableau enumerations, against
//! closed product formulas and an independent removable-box recursion.

use hecke_clifford::combinatorics::{
    diag_sets, enumerate_multipartitions, enumerate_std_tableaux, enumerate_tri, tableau_word,
    tri_even_count, Bullet, MultiPartition, ParitySelect, StandardTableau,
};
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive};

fn factorial(n: usize) -> BigRational {
    let mut acc = BigInt::from(1);
    for k in 2..=n {
        acc *= BigInt::from(k);
    }
    BigRational::from_integer(acc)
}

/// Hook length count of standard fillings of one ordinary partition.
fn count_ordinary(parts: &[usize]) -> BigRational {
    let n: usize = parts.iter().sum();
    let conj = |j: usize| parts.iter().filter(|&&p| p >= j).count();
    let mut denom = BigRational::one();
    for (i, &len) in parts.iter().enumerate() {
        for j in 1..=len {
            let hook = len - j + conj(j) - (i + 1) + 1;
            denom *= BigRational::from_integer(BigInt::from(hook));
        }
    }
    factorial(n) / denom
}

/// Product formula for standard fillings of one shifted diagram.
fn count_strict(parts: &[usize]) -> BigRational {
    let n: usize = parts.iter().sum();
    let mut acc = factorial(n);
    for &p in parts {
        acc /= factorial(p);
    }
    for i in 0..parts.len() {
        for j in i + 1..parts.len() {
            acc *= BigRational::from_integer(BigInt::from(parts[i] - parts[j]));
            acc /= BigRational::from_integer(BigInt::from(parts[i] + parts[j]));
        }
    }
    acc
}

/// Shuffle the components together, then count each independently.
fn count_std_oracle(shape: &MultiPartition) -> u64 {
    let n = shape.size();
    let mut acc = factorial(n);
    for c in 0..shape.num_components() {
        let parts = shape.component(c).to_vec();
        let size: usize = parts.iter().sum();
        acc /= factorial(size);
        acc *= if shape.is_strict_component(c) {
            count_strict(&parts)
        } else {
            count_ordinary(&parts)
        };
    }
    assert!(acc.is_integer(), "oracle count must be integral");
    acc.to_integer().to_u64().expect("desk scale")
}

/// Independent recursion: a standard filling is a chain of shapes, so the
/// count is the sum over shapes with one box removed.
fn count_std_recursive(shape: &MultiPartition) -> u64 {
    if shape.size() == 0 {
        return 1;
    }
    shape
        .removable_boxes()
        .into_iter()
        .map(|b| count_std_recursive(&shape.without_box(b)))
        .sum()
}

fn all_shapes(n_max: usize, m_max: usize) -> Vec<MultiPartition> {
    let mut out = Vec::new();
    for bullet in [Bullet::Zero, Bullet::S, Bullet::Ss] {
        for n in 0..=n_max {
            for m in 0..=m_max {
                out.extend(enumerate_multipartitions(n, m, bullet));
            }
        }
    }
    out
}

#[test]
fn enumeration_matches_product_formula_oracle() {
    for shape in all_shapes(5, 2) {
        let listed = enumerate_std_tableaux(&shape).len() as u64;
        assert_eq!(
            listed,
            count_std_oracle(&shape),
            "shape {}",
            shape.encode()
        );
    }
}

#[test]
fn enumeration_matches_removable_box_recursion() {
    for shape in all_shapes(5, 2) {
        let listed = enumerate_std_tableaux(&shape).len() as u64;
        assert_eq!(
            listed,
            count_std_recursive(&shape),
            "shape {}",
            shape.encode()
        );
    }
}

#[test]
fn distinguished_fillings_bound_the_order() {
    for shape in all_shapes(4, 2) {
        let all = enumerate_std_tableaux(&shape);
        if all.is_empty() {
            continue;
        }
        let trow = StandardTableau::row_reading(&shape);
        let tcol = StandardTableau::column_reading(&shape);
        assert_eq!(all.first().unwrap(), &trow, "shape {}", shape.encode());
        assert_eq!(all.last().unwrap(), &tcol, "shape {}", shape.encode());
        for t in &all {
            assert!(trow.dominates(t));
            assert!(t.dominates(&tcol));
        }
    }
}

#[test]
fn tri_sizes_match_closed_formula() {
    for shape in all_shapes(4, 2) {
        let even = enumerate_tri(&shape, ParitySelect::Even).len() as u64;
        assert_eq!(even, tri_even_count(&shape), "shape {}", shape.encode());
        // support constraints hold for every triple
        for tri in enumerate_tri(&shape, ParitySelect::Both) {
            let ds = diag_sets(&tri.tableau);
            for v in tri.alpha_support() {
                assert!(ds.od_t.contains(&v));
            }
            for v in tri.beta_support() {
                assert!(!ds.d_t.contains(&v));
            }
            let marked_in = ds
                .marked
                .map(|mv| tri.alpha_support().contains(&mv))
                .unwrap_or(false);
            assert_eq!(tri.parity_class == 1, marked_in);
        }
    }
}

#[test]
fn words_are_admissible_and_reduced_across_shapes() {
    for shape in all_shapes(4, 1) {
        let all = enumerate_std_tableaux(&shape);
        for s in &all {
            for t in &all {
                let word = tableau_word(s, t).unwrap();
                let mut cur = t.clone();
                for &k in &word {
                    cur = cur
                        .apply_adjacent(k)
                        .expect("every prefix of the word yields a standard filling");
                }
                assert_eq!(&cur, s);
            }
        }
    }
}
