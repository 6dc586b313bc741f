//! Associative bilinear forms, conjugate ideal pairs and the quasi-Frobenius
//! and Frobenius predicates, together with the ideals `B_r` and `B_l`.

use rand::Rng;
use serde::Serialize;

use crate::algebra::{unit_vector, AlgebraPresentation, IdealLattice, Side};
use crate::config::SearchConfig;
use crate::error::{Error, Result};
use crate::linalg::{for_each_projective_point, FpMatrix, Subspace};

/// A bilinear form `rho x lambda -> GF(p)` on the canonical bases of a right
/// space `rho` and a left space `lambda`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BilinearForm {
    pub gram: FpMatrix,
    pub associative: bool,
}

impl BilinearForm {
    pub fn is_nondegenerate(&self) -> bool {
        self.gram.rows() > 0 && self.gram.is_invertible()
    }

    /// `(n, m)` for coordinates of `n` in the rho basis and `m` in the lambda basis.
    pub fn eval(&self, n: &[u64], m: &[u64]) -> u64 {
        let p = self.gram.modulus();
        let gm = self.gram.apply_row(n);
        gm.iter().zip(m).fold(0, |acc, (&a, &b)| (acc + a * b) % p)
    }
}

/// Right ideal `rho` and left ideal `lambda` paired by a nondegenerate
/// associative form, with dual bases `(rho_basis[i], lambda_basis[j]) = delta_ij`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ConjugatePair {
    pub rho: Subspace,
    pub lambda: Subspace,
    pub form: BilinearForm,
    /// `a*_1 .. a*_n` in algebra coordinates.
    pub rho_basis: Vec<Vec<u64>>,
    /// `a_1 .. a_n` in algebra coordinates.
    pub lambda_basis: Vec<Vec<u64>>,
}

impl ConjugatePair {
    fn new(rho: Subspace, lambda: Subspace, gram: FpMatrix) -> Self {
        let inv = gram.inverse().expect("nondegenerate gram");
        let lambda_basis = lambda.basis_vectors();
        let rho_basis = (0..inv.rows())
            .map(|i| rho.combine(inv.row(i)))
            .collect();
        ConjugatePair {
            rho,
            lambda,
            form: BilinearForm {
                gram,
                associative: true,
            },
            rho_basis,
            lambda_basis,
        }
    }

    /// Value of the form on algebra elements of `rho` and `lambda`.
    pub fn pairing(&self, n: &[u64], m: &[u64]) -> Result<u64> {
        let nc = self
            .rho
            .coordinates(n)?
            .ok_or_else(|| Error::invalid("first argument not in rho"))?;
        let mc = self
            .lambda
            .coordinates(m)?
            .ok_or_else(|| Error::invalid("second argument not in lambda"))?;
        Ok(self.form.eval(&nc, &mc))
    }

    /// Checks `(a*_i, a_j) = delta_ij` exactly.
    pub fn duality_holds(&self) -> bool {
        let d = self.lambda_basis.len();
        (0..d).all(|i| {
            (0..d).all(|j| {
                self.pairing(&self.rho_basis[i], &self.lambda_basis[j])
                    .map_or(false, |v| v == u64::from(i == j))
            })
        })
    }

    pub fn dim(&self) -> usize {
        self.lambda_basis.len()
    }
}

/// Basis (as Gram matrices on the canonical bases) of all associative forms
/// `rho x lambda -> GF(p)`.
pub fn conjugacy_form_space(
    a: &AlgebraPresentation,
    rho: &Subspace,
    lambda: &Subspace,
) -> Result<Vec<FpMatrix>> {
    if !a.is_right_ideal(rho)? {
        return Err(Error::NotIdeal("rho is not a right ideal".into()));
    }
    if !a.is_left_ideal(lambda)? {
        return Err(Error::NotIdeal("lambda is not a left ideal".into()));
    }
    let n = a.dim();
    let p = a.p();
    let (dr, dl) = (rho.dim(), lambda.dim());
    if dr == 0 || dl == 0 {
        return Ok(Vec::new());
    }
    if rho.is_full() && lambda.is_full() {
        // every associative form on B x B is (x, y) -> eps(xy)
        return Ok((0..n)
            .map(|k| {
                let mut g = FpMatrix::zeros(p, n, n);
                for i in 0..n {
                    for j in 0..n {
                        a.for_each_term(i, j, |kk, c| {
                            if kk == k {
                                g.set(i, j, c);
                            }
                        });
                    }
                }
                g
            })
            .collect());
    }
    Ok(general_form_space(a, rho, lambda))
}

fn general_form_space(a: &AlgebraPresentation, rho: &Subspace, lambda: &Subspace) -> Vec<FpMatrix> {
    let n = a.dim();
    let p = a.p();
    let (dr, dl) = (rho.dim(), lambda.dim());
    // unknown G[s][t] at column s * dl + t; one row per (i, j, b)
    let rb = rho.basis_vectors();
    let lb = lambda.basis_vectors();
    let mut rows: Vec<Vec<u64>> = Vec::new();
    for b in 0..n {
        let e = unit_vector(n, b);
        let right: Vec<Vec<u64>> = rb
            .iter()
            .map(|x| rho.coordinates(&a.mul_coords(x, &e)).unwrap().expect("right ideal"))
            .collect();
        let left: Vec<Vec<u64>> = lb
            .iter()
            .map(|y| lambda.coordinates(&a.mul_coords(&e, y)).unwrap().expect("left ideal"))
            .collect();
        for i in 0..dr {
            for j in 0..dl {
                let mut row = vec![0u64; dr * dl];
                for (s, &c) in right[i].iter().enumerate() {
                    row[s * dl + j] = (row[s * dl + j] + c) % p;
                }
                for (t, &c) in left[j].iter().enumerate() {
                    row[i * dl + t] = (row[i * dl + t] + p - c) % p;
                }
                if row.iter().any(|&v| v != 0) {
                    rows.push(row);
                }
            }
        }
    }
    let sol = if rows.is_empty() {
        FpMatrix::identity(p, dr * dl)
    } else {
        FpMatrix::from_row_vectors(p, dr * dl, &rows).kernel()
    };
    (0..sol.rows())
        .map(|r| FpMatrix::from_raw(p, dr, dl, sol.row(r).to_vec()))
        .collect()
}

fn combine_forms(basis: &[FpMatrix], coeffs: &[u64]) -> FpMatrix {
    let mut g = FpMatrix::zeros(basis[0].modulus(), basis[0].rows(), basis[0].cols());
    for (m, &c) in basis.iter().zip(coeffs) {
        if c != 0 {
            g = g.add(&m.scale(c)).expect("same shape");
        }
    }
    g
}

/// A nondegenerate member of the span of `basis`, if any.
///
/// Tries the basis, then seeded random combinations, then every projective
/// point of the coefficient space when within budget.
pub fn find_nondegenerate(
    basis: &[FpMatrix],
    config: &SearchConfig,
    salt: u64,
) -> Result<Option<FpMatrix>> {
    if basis.is_empty() || basis[0].rows() != basis[0].cols() || basis[0].rows() == 0 {
        return Ok(None);
    }
    if let Some(g) = basis.iter().find(|g| g.is_invertible()) {
        return Ok(Some(g.clone()));
    }
    let p = basis[0].modulus();
    let r = basis.len();
    let mut rng = config.rng(salt);
    for _ in 0..config.samples {
        let c: Vec<u64> = (0..r).map(|_| rng.gen_range(0..p)).collect();
        let g = combine_forms(basis, &c);
        if g.is_invertible() {
            return Ok(Some(g));
        }
    }
    if !config.fits(p, r) {
        return Err(Error::Undecided(format!(
            "no nondegenerate form among samples of a {}-dimensional form space",
            r
        )));
    }
    let mut found = None;
    for_each_projective_point(p, r, |c| {
        let g = combine_forms(basis, c);
        if g.is_invertible() {
            found = Some(g);
            false
        } else {
            true
        }
    });
    Ok(found)
}

fn pair_search(
    a: &AlgebraPresentation,
    ideal: &Subspace,
    side: Side,
    partners: &IdealLattice,
    config: &SearchConfig,
) -> Result<Option<ConjugatePair>> {
    if ideal.is_zero() {
        return Ok(None);
    }
    let mut undecided = None;
    for other in partners.ideals.iter().filter(|o| o.dim() == ideal.dim()) {
        let (rho, lambda) = match side {
            Side::Right => (ideal, other),
            Side::Left => (other, ideal),
        };
        let space = conjugacy_form_space(a, rho, lambda)?;
        match find_nondegenerate(&space, config, 0xf0 + ideal.dim() as u64) {
            Ok(Some(g)) => return Ok(Some(ConjugatePair::new(rho.clone(), lambda.clone(), g))),
            Ok(None) => {}
            Err(e) if e.is_undecided() => undecided = Some(e),
            Err(e) => return Err(e),
        }
    }
    match undecided {
        Some(e) => Err(e),
        None => Ok(None),
    }
}

/// A left ideal conjugate to the right ideal `rho`, searched among the left
/// ideals of the same dimension.
pub fn find_conjugate_pair(
    a: &AlgebraPresentation,
    rho: &Subspace,
    config: &SearchConfig,
) -> Result<Option<ConjugatePair>> {
    if !a.is_right_ideal(rho)? {
        return Err(Error::NotIdeal("rho is not a right ideal".into()));
    }
    if rho.is_zero() {
        return Ok(None);
    }
    if rho.is_full() {
        let space = conjugacy_form_space(a, rho, rho)?;
        if let Some(g) = find_nondegenerate(&space, config, 0xf0)? {
            return Ok(Some(ConjugatePair::new(rho.clone(), rho.clone(), g)));
        }
    }
    let lefts = a.one_sided_ideals(Side::Left, config);
    let found = pair_search(a, rho, Side::Right, &lefts, config)?;
    if found.is_none() && !lefts.exhaustive {
        return Err(Error::Undecided(
            "left ideal lattice was sampled; absence of a conjugate is not certified".into(),
        ));
    }
    Ok(found)
}

/// Both ideal lattices and every conjugacy found between them.
#[derive(Clone, Debug)]
pub struct QfAnalysis {
    pub rights: IdealLattice,
    pub lefts: IdealLattice,
    /// One conjugate pair for each nonzero right ideal that has one.
    pub right_pairs: Vec<ConjugatePair>,
    /// One conjugate pair for each nonzero left ideal that has one.
    pub left_pairs: Vec<ConjugatePair>,
    pub br: Subspace,
    pub bl: Subspace,
    /// False when a lattice was sampled or a form search was undecided.
    pub exact: bool,
}

impl QfAnalysis {
    pub fn compute(a: &AlgebraPresentation, config: &SearchConfig) -> Result<Self> {
        let rights = a.one_sided_ideals(Side::Right, config);
        let lefts = a.one_sided_ideals(Side::Left, config);
        let mut exact = rights.exhaustive && lefts.exhaustive;
        let mut collect = |ideals: &IdealLattice, partners: &IdealLattice, side: Side| -> Result<Vec<ConjugatePair>> {
            let mut pairs = Vec::new();
            for ideal in &ideals.ideals {
                match pair_search(a, ideal, side, partners, config) {
                    Ok(Some(pair)) => {
                        if !pair.duality_holds() {
                            return Err(Error::violation("dual bases fail the duality equations"));
                        }
                        pairs.push(pair);
                    }
                    Ok(None) => {}
                    Err(e) if e.is_undecided() => exact = false,
                    Err(e) => return Err(e),
                }
            }
            Ok(pairs)
        };
        let right_pairs = collect(&rights, &lefts, Side::Right)?;
        let left_pairs = collect(&lefts, &rights, Side::Left)?;
        let sum = |spaces: Vec<&Subspace>| {
            spaces
                .into_iter()
                .fold(a.zero_space(), |acc, s| acc.sum(s).expect("ambient"))
        };
        let br = sum(right_pairs.iter().map(|q| &q.rho).collect());
        let bl = sum(left_pairs.iter().map(|q| &q.lambda).collect());
        for (name, ideal) in [("B_r", &br), ("B_l", &bl)] {
            if !a.is_two_sided_ideal(ideal)? {
                return Err(Error::violation(format!("{} is not a two-sided ideal", name)));
            }
        }
        Ok(QfAnalysis {
            rights,
            lefts,
            right_pairs,
            left_pairs,
            br,
            bl,
            exact,
        })
    }
}

pub fn compute_br(a: &AlgebraPresentation, config: &SearchConfig) -> Result<(Subspace, bool)> {
    let q = QfAnalysis::compute(a, config)?;
    Ok((q.br, q.exact))
}

pub fn compute_bl(a: &AlgebraPresentation, config: &SearchConfig) -> Result<(Subspace, bool)> {
    let q = QfAnalysis::compute(a, config)?;
    Ok((q.bl, q.exact))
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Q1Witness {
    pub side: Side,
    pub ideal: Vec<Vec<u64>>,
    pub double_annihilator: Vec<Vec<u64>>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct QfReport {
    pub q1: bool,
    pub q1_witness: Option<Q1Witness>,
    pub q4: bool,
    pub q5: bool,
    pub br_dim: usize,
    pub bl_dim: usize,
    pub right_ideals: usize,
    pub left_ideals: usize,
    pub conjugate_pairs: usize,
    /// "exact" or "sampled".
    pub verdict: &'static str,
}

/// First one-sided ideal failing the double-annihilator law; right ideals first.
pub fn q1_witness(a: &AlgebraPresentation, q: &QfAnalysis) -> Result<Option<Q1Witness>> {
    for (lattice, side) in [(&q.rights, Side::Right), (&q.lefts, Side::Left)] {
        for ideal in &lattice.ideals {
            let double = match side {
                Side::Right => a.right_annihilator(&a.left_annihilator(ideal)?)?,
                Side::Left => a.left_annihilator(&a.right_annihilator(ideal)?)?,
            };
            if &double != ideal {
                return Ok(Some(Q1Witness {
                    side,
                    ideal: ideal.basis_vectors(),
                    double_annihilator: double.basis_vectors(),
                }));
            }
        }
    }
    Ok(None)
}

pub fn qf_report(a: &AlgebraPresentation, q: &QfAnalysis) -> Result<QfReport> {
    let witness = q1_witness(a, q)?;
    Ok(QfReport {
        q1: witness.is_none(),
        q1_witness: witness,
        q4: q.br.is_full(),
        q5: q.bl.is_full(),
        br_dim: q.br.dim(),
        bl_dim: q.bl.dim(),
        right_ideals: q.rights.ideals.len(),
        left_ideals: q.lefts.ideals.len(),
        conjugate_pairs: q.right_pairs.len(),
        verdict: if q.exact { "exact" } else { "sampled" },
    })
}

pub fn qf_check(a: &AlgebraPresentation, config: &SearchConfig) -> Result<QfReport> {
    qf_report(a, &QfAnalysis::compute(a, config)?)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct FrobeniusReport {
    pub f2: bool,
    pub f3: bool,
    /// `eps(e_i)` for the witness functional `eps(x) = (x, 1)`.
    pub functional: Option<Vec<u64>>,
    /// Gram matrix of the witness form on the basis.
    pub gram: Option<Vec<Vec<u64>>>,
    /// Whether the enumerated one-sided ideals were cross-checked against `ker eps`.
    pub ideal_cross_check: bool,
}

/// `ker eps` contains a nonzero right ideal `xB` exactly when `x` lies in the
/// left kernel of the Gram matrix `eps(e_i e_j)`, so (F2) for `eps` is the
/// nondegeneracy of that matrix; enumerated ideals are checked as well when
/// the lattice is within budget.
pub fn frobenius_check(a: &AlgebraPresentation, config: &SearchConfig) -> Result<FrobeniusReport> {
    let full = a.full_space();
    let space = conjugacy_form_space(a, &full, &full)?;
    let gram = find_nondegenerate(&space, config, 0xf3)?;
    let Some(gram) = gram else {
        return Ok(FrobeniusReport {
            f2: false,
            f3: false,
            functional: None,
            gram: None,
            ideal_cross_check: false,
        });
    };
    let n = a.dim();
    let unit = a.unit();
    let eps: Vec<u64> = (0..n)
        .map(|i| {
            let e = unit_vector(n, i);
            BilinearForm {
                gram: gram.clone(),
                associative: true,
            }
            .eval(&e, unit)
        })
        .collect();
    let eps_gram = functional_gram(a, &eps);
    let mut f2 = eps_gram.is_invertible();
    let mut cross = false;
    if config.fits(a.p(), n) {
        cross = true;
        for side in [Side::Right, Side::Left] {
            let lattice = a.one_sided_ideals(side, config);
            cross &= lattice.exhaustive;
            for ideal in lattice.ideals.iter().filter(|i| !i.is_zero()) {
                let inside = ideal
                    .basis_vectors()
                    .iter()
                    .all(|v| v.iter().zip(&eps).fold(0, |s, (&x, &y)| (s + x * y) % a.p()) == 0);
                if inside {
                    f2 = false;
                }
            }
        }
    }
    if !f2 {
        return Err(Error::violation(
            "a nondegenerate associative form gave a functional whose kernel contains an ideal",
        ));
    }
    Ok(FrobeniusReport {
        f2,
        f3: true,
        functional: Some(eps),
        gram: Some(gram.row_vectors()),
        ideal_cross_check: cross,
    })
}

/// Gram matrix `eps(e_i e_j)` of a functional.
pub fn functional_gram(a: &AlgebraPresentation, eps: &[u64]) -> FpMatrix {
    let n = a.dim();
    let p = a.p();
    let mut g = FpMatrix::zeros(p, n, n);
    for i in 0..n {
        for j in 0..n {
            let mut v = 0;
            a.for_each_term(i, j, |k, c| v = (v + c * eps[k]) % p);
            g.set(i, j, v);
        }
    }
    g
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct PowerTable {
    /// Entry `k` is whether `B_r^k B_l^(n-k) = 0`.
    pub entries: Vec<bool>,
    pub all_equal: bool,
}

fn power(a: &AlgebraPresentation, s: &Subspace, k: usize) -> Subspace {
    let mut acc = a.span(&[a.unit().to_vec()]);
    for _ in 0..k {
        acc = a.product_space(&acc, s).expect("ambient");
    }
    acc
}

/// The `n + 1` conditions `B_r^k B_l^(n-k) = 0`, `k = 0..n`; an empty product
/// is the unit ideal, so `n = 0` gives the single entry `false`.
pub fn power_vanishing_table(
    a: &AlgebraPresentation,
    br: &Subspace,
    bl: &Subspace,
    n: usize,
) -> Result<PowerTable> {
    let mut entries = Vec::with_capacity(n + 1);
    for k in 0..=n {
        let left = power(a, br, k);
        let prod = a.product_space(&left, &power(a, bl, n - k))?;
        entries.push(prod.is_zero());
    }
    let all_equal = entries.windows(2).all(|w| w[0] == w[1]);
    Ok(PowerTable { entries, all_equal })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::models::{cyclic_group_algebra, matrix_algebra, truncated_poly_deg, upper_triangular};

    fn cfg() -> SearchConfig {
        SearchConfig::default()
    }

    #[test]
    fn trace_form_lies_in_form_space_of_m2() {
        let m = matrix_algebra(2, 2).unwrap();
        let full = m.full_space();
        let space = conjugacy_form_space(&m, &full, &full).unwrap();
        assert_eq!(space.len(), 4);
        // trace form (e_ij, e_kl) = delta_jk delta_il
        let mut trace = FpMatrix::zeros(2, 4, 4);
        for a in 0..4 {
            for b in 0..4 {
                let (i, j, k, l) = (a / 2, a % 2, b / 2, b % 2);
                if j == k && i == l {
                    trace.set(a, b, 1);
                }
            }
        }
        let span = Subspace::span(2, 16, &space.iter().map(|g| g.data().to_vec()).collect::<Vec<_>>());
        assert!(span.contains(trace.data()).unwrap());
    }

    #[test]
    fn general_form_space_matches_full_shortcut() {
        for a in [matrix_algebra(2, 2).unwrap(), upper_triangular(2, 3).unwrap()] {
            let full = a.full_space();
            let fast = conjugacy_form_space(&a, &full, &full).unwrap();
            let slow = general_form_space(&a, &full, &full);
            let span = |v: &[FpMatrix]| {
                Subspace::span(a.p(), a.dim() * a.dim(), &v.iter().map(|g| g.data().to_vec()).collect::<Vec<_>>())
            };
            assert_eq!(span(&fast), span(&slow));
        }
    }

    #[test]
    fn triangular_corner_pair_has_no_forms() {
        let t = upper_triangular(2, 2).unwrap();
        let s = t.span(&[vec![0, 1, 0]]);
        assert!(conjugacy_form_space(&t, &s, &s).unwrap().is_empty());
    }

    #[test]
    fn m2_dual_basis_is_transpose() {
        let m = matrix_algebra(2, 2).unwrap();
        let pair = find_conjugate_pair(&m, &m.full_space(), &cfg()).unwrap().unwrap();
        assert!(pair.duality_holds());
        assert!(find_conjugate_pair(&m, &m.zero_space(), &cfg()).unwrap().is_none());
    }

    #[test]
    fn truncated_frobenius_form() {
        let a = truncated_poly_deg(2, 2).unwrap();
        let pair = find_conjugate_pair(&a, &a.full_space(), &cfg()).unwrap().unwrap();
        // the only nondegenerate form over GF(2) reads the coefficient of t (plus possibly 1)
        assert_eq!(pair.pairing(&[0, 1], &[1, 0]).unwrap(), 1);
        assert_eq!(pair.pairing(&[0, 1], &[0, 1]).unwrap(), 0);
    }

    #[test]
    fn qf_verdicts() {
        let m = matrix_algebra(2, 2).unwrap();
        let r = qf_check(&m, &cfg()).unwrap();
        assert!(r.q1 && r.q4 && r.q5);
        let t = upper_triangular(2, 2).unwrap();
        let r = qf_check(&t, &cfg()).unwrap();
        assert!(!r.q1);
        let w = r.q1_witness.unwrap();
        assert_eq!(w.side, Side::Right);
        assert_eq!(w.ideal, vec![vec![0, 1, 0]]);
        assert_eq!(w.double_annihilator, vec![vec![1, 0, 0], vec![0, 1, 0]]);
        let c = truncated_poly_deg(3, 3).unwrap();
        let r = qf_check(&c, &cfg()).unwrap();
        assert!(r.q1 && r.q4 && r.q5);
    }

    #[test]
    fn frobenius_verdicts() {
        assert!(frobenius_check(&cyclic_group_algebra(2, 2).unwrap(), &cfg()).unwrap().f3);
        assert!(frobenius_check(&matrix_algebra(2, 3).unwrap(), &cfg()).unwrap().f3);
        let r = frobenius_check(&upper_triangular(2, 2).unwrap(), &cfg()).unwrap();
        assert!(!r.f3 && !r.f2);
    }

    #[test]
    fn power_tables() {
        let m = matrix_algebra(2, 2).unwrap();
        let full = m.full_space();
        for n in 0..4 {
            let t = power_vanishing_table(&m, &full, &full, n).unwrap();
            assert!(t.all_equal && t.entries.iter().all(|&e| !e));
        }
        let t = upper_triangular(2, 2).unwrap();
        let q = QfAnalysis::compute(&t, &cfg()).unwrap();
        let tab = power_vanishing_table(&t, &q.br, &q.bl, 3).unwrap();
        assert!(tab.all_equal);
    }
}
