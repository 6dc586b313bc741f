//! Brute-force oracles over every element of small algebras.

use std::collections::BTreeSet;
use std::sync::Arc;

use constalg::algebra::{AlgebraPresentation, Side};
use constalg::config::SearchConfig;
use constalg::derivation::derivation_space;
use constalg::frobenius::{frobenius_check, qf_check};
use constalg::gpi::{permutations, standard_identity_check};
use constalg::linalg::{FpMatrix, Subspace};
use constalg::models::{cyclic_group_algebra, matrix_algebra, truncated_poly, upper_triangular};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

type ElementSet = BTreeSet<Vec<u64>>;

fn all_vectors(p: u64, n: usize) -> Vec<Vec<u64>> {
    let mut out = vec![vec![]];
    for _ in 0..n {
        out = out
            .into_iter()
            .flat_map(|v| {
                (0..p).map(move |c| {
                    let mut w = v.clone();
                    w.push(c);
                    w
                })
            })
            .collect();
    }
    out
}

fn add(x: &[u64], y: &[u64], p: u64) -> Vec<u64> {
    x.iter().zip(y).map(|(a, b)| (a + b) % p).collect()
}

fn scale(x: &[u64], c: u64, p: u64) -> Vec<u64> {
    x.iter().map(|a| a * c % p).collect()
}

fn is_zero(x: &[u64]) -> bool {
    x.iter().all(|&c| c == 0)
}

fn span_elements(p: u64, n: usize, gens: &[Vec<u64>]) -> ElementSet {
    let mut set: ElementSet = [vec![0; n]].into_iter().collect();
    for g in gens {
        let old: Vec<_> = set.iter().cloned().collect();
        for v in old {
            for c in 1..p {
                set.insert(add(&v, &scale(g, c, p), p));
            }
        }
    }
    set
}

fn subspace_elements(s: &Subspace) -> ElementSet {
    span_elements(s.modulus(), s.ambient_dim(), &s.basis_vectors())
}

/// Every subspace, each as the set of its elements.
fn all_subspaces(p: u64, n: usize) -> Vec<ElementSet> {
    let vectors = all_vectors(p, n);
    let mut seen: BTreeSet<ElementSet> = BTreeSet::new();
    let mut frontier = vec![span_elements(p, n, &[])];
    while let Some(s) = frontier.pop() {
        if !seen.insert(s.clone()) {
            continue;
        }
        for v in &vectors {
            if !s.contains(v) {
                let gens: Vec<Vec<u64>> = s.iter().cloned().chain([v.clone()]).collect();
                frontier.push(span_elements(p, n, &gens));
            }
        }
    }
    seen.into_iter().collect()
}

fn is_one_sided_ideal(a: &AlgebraPresentation, s: &ElementSet, side: Side) -> bool {
    let all = all_vectors(a.p(), a.dim());
    s.iter().all(|x| {
        all.iter().all(|y| {
            let z = match side {
                Side::Right => a.mul_coords(x, y),
                Side::Left => a.mul_coords(y, x),
            };
            s.contains(&z)
        })
    })
}

fn left_ann(a: &AlgebraPresentation, s: &ElementSet) -> ElementSet {
    all_vectors(a.p(), a.dim())
        .into_iter()
        .filter(|x| s.iter().all(|y| is_zero(&a.mul_coords(x, y))))
        .collect()
}

fn right_ann(a: &AlgebraPresentation, s: &ElementSet) -> ElementSet {
    all_vectors(a.p(), a.dim())
        .into_iter()
        .filter(|x| s.iter().all(|y| is_zero(&a.mul_coords(y, x))))
        .collect()
}

fn small_algebras() -> Vec<(&'static str, AlgebraPresentation)> {
    vec![
        ("M_2(GF(2))", matrix_algebra(2, 2).unwrap()),
        ("T_2(GF(2))", upper_triangular(2, 2).unwrap()),
        ("GF(2)[C_2]", cyclic_group_algebra(2, 2).unwrap()),
        ("GF(2)[C_4]", cyclic_group_algebra(2, 4).unwrap()),
        ("GF(3)[t]/t^3", truncated_poly(3).unwrap()),
        ("GF(3)[C_3]", cyclic_group_algebra(3, 3).unwrap()),
        ("T_2(GF(3))", upper_triangular(2, 3).unwrap()),
    ]
}

#[test]
fn ideal_lattices_match_exhaustive_subspace_enumeration() {
    let cfg = SearchConfig::default();
    for (name, a) in small_algebras() {
        let subspaces = all_subspaces(a.p(), a.dim());
        for side in [Side::Right, Side::Left] {
            let want: BTreeSet<ElementSet> = subspaces
                .iter()
                .filter(|s| is_one_sided_ideal(&a, s, side))
                .cloned()
                .collect();
            let lattice = a.one_sided_ideals(side, &cfg);
            assert!(lattice.exhaustive, "{}", name);
            let got: BTreeSet<ElementSet> = lattice.ideals.iter().map(subspace_elements).collect();
            assert_eq!(got, want, "{} {:?}", name, side);
        }
    }
}

#[test]
fn double_annihilator_law_matches_brute_force() {
    let cfg = SearchConfig::default();
    for (name, a) in small_algebras() {
        let mut q1 = true;
        for s in all_subspaces(a.p(), a.dim()) {
            if is_one_sided_ideal(&a, &s, Side::Right) && right_ann(&a, &left_ann(&a, &s)) != s {
                q1 = false;
            }
            if is_one_sided_ideal(&a, &s, Side::Left) && left_ann(&a, &right_ann(&a, &s)) != s {
                q1 = false;
            }
        }
        assert_eq!(qf_check(&a, &cfg).unwrap().q1, q1, "{}", name);
    }
}

#[test]
fn center_matches_brute_force() {
    for (name, a) in small_algebras() {
        let all = all_vectors(a.p(), a.dim());
        let want: ElementSet = all
            .iter()
            .filter(|x| all.iter().all(|y| a.mul_coords(x, y) == a.mul_coords(y, x)))
            .cloned()
            .collect();
        assert_eq!(subspace_elements(&a.center()), want, "{}", name);
    }
}

#[test]
fn semiprime_matches_sandwich_search() {
    let cfg = SearchConfig::default();
    for (name, a) in small_algebras() {
        let all = all_vectors(a.p(), a.dim());
        let nilpotent_sandwich = all
            .iter()
            .filter(|x| !is_zero(x))
            .any(|x| all.iter().all(|y| is_zero(&a.mul_coords(&a.mul_coords(x, y), x))));
        assert_eq!(a.is_semiprime(&cfg).unwrap().semiprime, !nilpotent_sandwich, "{}", name);
    }
}

#[test]
fn frobenius_matches_functional_search() {
    let cfg = SearchConfig::default();
    for (name, a) in small_algebras() {
        let all = all_vectors(a.p(), a.dim());
        let p = a.p();
        let eval = |eps: &[u64], x: &[u64]| eps.iter().zip(x).map(|(e, c)| e * c).sum::<u64>() % p;
        let exists = all.iter().any(|eps| {
            all.iter()
                .filter(|x| !is_zero(x))
                .all(|x| all.iter().any(|y| eval(eps, &a.mul_coords(x, y)) != 0))
        });
        assert_eq!(frobenius_check(&a, &cfg).unwrap().f3, exists, "{}", name);
    }
}

#[test]
fn derivation_count_matches_matrix_enumeration() {
    for (name, a) in small_algebras().into_iter().filter(|(_, a)| a.dim() <= 3) {
        let n = a.dim();
        let p = a.p();
        let mut count = 0u64;
        for flat in all_vectors(p, n * n) {
            let d = |x: &[u64]| {
                let mut out = vec![0u64; n];
                for (r, &c) in x.iter().enumerate() {
                    for k in 0..n {
                        out[k] = (out[k] + c * flat[r * n + k]) % p;
                    }
                }
                out
            };
            let basis = all_vectors(p, n);
            let leibniz = basis.iter().filter(|x| x.iter().sum::<u64>() == 1).all(|x| {
                basis.iter().filter(|y| y.iter().sum::<u64>() == 1).all(|y| {
                    d(&a.mul_coords(x, y)) == add(&a.mul_coords(&d(x), y), &a.mul_coords(x, &d(y)), p)
                })
            });
            if leibniz {
                count += 1;
            }
        }
        let dim = derivation_space(&Arc::new(a.clone())).len() as u32;
        assert_eq!(p.pow(dim), count, "{}", name);
    }
}

fn mat_mul(x: &[u64], y: &[u64], k: usize, p: u64) -> Vec<u64> {
    let mut out = vec![0u64; k * k];
    for i in 0..k {
        for j in 0..k {
            out[i * k + j] = (0..k).map(|l| x[i * k + l] * y[l * k + j]).sum::<u64>() % p;
        }
    }
    out
}

fn standard_value(args: &[Vec<u64>], k: usize, p: u64) -> Vec<u64> {
    let mut total = vec![0u64; k * k];
    for (perm, odd) in permutations(args.len()) {
        let mut acc = args[perm[0]].clone();
        for &j in &perm[1..] {
            acc = mat_mul(&acc, &args[j], k, p);
        }
        let c = if odd { p - 1 } else { 1 };
        total = add(&total, &scale(&acc, c, p), p);
    }
    total
}

#[test]
fn amitsur_levitzki_on_random_matrices() {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    for p in [2, 3, 5] {
        let mut s3_nonzero = false;
        for _ in 0..200 {
            let args: Vec<Vec<u64>> = (0..4).map(|_| (0..4).map(|_| rng.gen_range(0..p)).collect()).collect();
            assert!(is_zero(&standard_value(&args, 2, p)));
            s3_nonzero |= !is_zero(&standard_value(&args[..3], 2, p));
        }
        assert!(s3_nonzero);
        let m2 = matrix_algebra(2, p).unwrap();
        assert!(!standard_identity_check(&m2, 3).unwrap().holds);
        assert!(standard_identity_check(&m2, 4).unwrap().holds);
    }
}

fn leibniz_det(m: &[Vec<u64>], p: u64) -> u64 {
    let n = m.len();
    let mut det = 0;
    for (perm, odd) in permutations(n) {
        let term = (0..n).fold(1, |acc, i| acc * m[i][perm[i]] % p);
        det = (det + if odd { (p - term) % p } else { term }) % p;
    }
    det
}

#[test]
fn determinant_and_rank_match_enumeration() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for p in [2u64, 3, 5] {
        for _ in 0..50 {
            let rows: Vec<Vec<u64>> = (0..4).map(|_| (0..4).map(|_| rng.gen_range(0..p)).collect()).collect();
            let m = FpMatrix::from_row_vectors(p, 4, &rows);
            assert_eq!(m.determinant().unwrap(), leibniz_det(&rows, p));
            let row_space = span_elements(p, 4, &rows);
            assert_eq!(row_space.len() as u64, p.pow(m.rank() as u32));
        }
    }
}
