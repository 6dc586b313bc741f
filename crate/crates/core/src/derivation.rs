//! Derivations, restricted differential Lie algebras, inner parts and constants.

use std::collections::HashSet;
use std::sync::Arc;

use rand::Rng;
use serde::Serialize;

use crate::algebra::{unit_vector, AlgebraElement, AlgebraPresentation};
use crate::config::SearchConfig;
use crate::error::{Error, Result};
use crate::linalg::{for_each_projective_point, scalar, FpMatrix, Subspace};

/// A derivation given by its row-acting matrix: row `i` holds `e_i^d`.
///
/// Composition is left to right, `x^(d1 d2) = (x^d1)^d2`, which is the matrix
/// product `D1 D2`.
#[derive(Clone)]
pub struct Derivation {
    alg: Arc<AlgebraPresentation>,
    matrix: FpMatrix,
}

impl Derivation {
    pub fn new(alg: Arc<AlgebraPresentation>, matrix: FpMatrix) -> Result<Self> {
        let n = alg.dim();
        if matrix.rows() != n || matrix.cols() != n {
            return Err(Error::ShapeMismatch(format!(
                "derivation matrix is {}x{}, algebra has dimension {}",
                matrix.rows(),
                matrix.cols(),
                n
            )));
        }
        if matrix.modulus() != alg.p() {
            return Err(Error::ModulusMismatch(alg.p(), matrix.modulus()));
        }
        let d = Derivation { alg, matrix };
        d.check_leibniz()?;
        Ok(d)
    }

    fn check_leibniz(&self) -> Result<()> {
        let a = &self.alg;
        let n = a.dim();
        let p = a.p();
        for i in 0..n {
            let ei = unit_vector(n, i);
            let di = self.matrix.row(i);
            for j in 0..n {
                let ej = unit_vector(n, j);
                let lhs = self.apply(&a.basis_product(i, j));
                let r1 = a.mul_coords(di, &ej);
                let r2 = a.mul_coords(&ei, self.matrix.row(j));
                let rhs: Vec<u64> = r1.iter().zip(&r2).map(|(&x, &y)| scalar::add(x, y, p)).collect();
                if lhs != rhs {
                    return Err(Error::NotDerivation(i, j));
                }
            }
        }
        Ok(())
    }

    pub fn zero(alg: Arc<AlgebraPresentation>) -> Self {
        let n = alg.dim();
        let p = alg.p();
        Derivation {
            alg,
            matrix: FpMatrix::zeros(p, n, n),
        }
    }

    pub fn algebra(&self) -> &Arc<AlgebraPresentation> {
        &self.alg
    }

    pub fn matrix(&self) -> &FpMatrix {
        &self.matrix
    }

    pub fn is_zero(&self) -> bool {
        self.matrix.is_zero()
    }

    /// `x^d`.
    pub fn apply(&self, x: &[u64]) -> Vec<u64> {
        self.matrix.apply_row(x)
    }

    fn check_parent(&self, other: &Self) -> Result<()> {
        if Arc::ptr_eq(&self.alg, &other.alg) || self.alg == other.alg {
            Ok(())
        } else {
            Err(Error::ParentMismatch)
        }
    }

    fn same_parent(&self, matrix: FpMatrix) -> Self {
        Derivation {
            alg: self.alg.clone(),
            matrix,
        }
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.check_parent(other)?;
        Ok(self.same_parent(self.matrix.add(&other.matrix)?))
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.check_parent(other)?;
        Ok(self.same_parent(self.matrix.sub(&other.matrix)?))
    }

    pub fn scale(&self, c: u64) -> Self {
        self.same_parent(self.matrix.scale(c))
    }

    /// `[d1, d2] = d1 d2 - d2 d1`, re-checked for the Leibniz rule.
    pub fn bracket(&self, other: &Self) -> Result<Self> {
        self.check_parent(other)?;
        let m = self
            .matrix
            .mul(&other.matrix)?
            .sub(&other.matrix.mul(&self.matrix)?)?;
        Derivation::new(self.alg.clone(), m)
    }

    /// `d^p`, re-checked for the Leibniz rule.
    pub fn p_power(&self) -> Result<Self> {
        Derivation::new(self.alg.clone(), self.matrix.pow(self.alg.p())?)
    }
}

impl PartialEq for Derivation {
    fn eq(&self, other: &Self) -> bool {
        self.check_parent(other).is_ok() && self.matrix == other.matrix
    }
}

impl Eq for Derivation {}

impl std::fmt::Debug for Derivation {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("Derivation")
            .field("rows", &self.matrix.row_vectors())
            .finish()
    }
}

/// Row-acting matrix of `x -> x a - a x`.
pub fn inner_matrix(alg: &AlgebraPresentation, a: &[u64]) -> FpMatrix {
    alg.right_mult_matrix(a)
        .sub(&alg.left_mult_matrix(a))
        .expect("same shape")
}

/// `a^- : x -> x a - a x`.
pub fn inner_derivation(a: &AlgebraElement) -> Derivation {
    let alg = a.algebra().clone();
    let matrix = inner_matrix(&alg, a.coords());
    Derivation { alg, matrix }
}

/// Basis of the full derivation algebra, as the solution space of the
/// linear Leibniz constraints.
pub fn derivation_space(alg: &Arc<AlgebraPresentation>) -> Vec<Derivation> {
    let n = alg.dim();
    let p = alg.p();
    // unknown D[r][k] at column r * n + k
    let mut rows = Vec::new();
    for i in 0..n {
        for j in 0..n {
            let prod = alg.basis_product(i, j);
            for k in 0..n {
                let mut row = vec![0u64; n * n];
                for (r, &c) in prod.iter().enumerate() {
                    if c != 0 {
                        row[r * n + k] = scalar::add(row[r * n + k], c, p);
                    }
                }
                // e_i^D e_j: sum_r D[i][r] (e_r e_j)_k
                for r in 0..n {
                    alg.for_each_term(r, j, |kk, c| {
                        if kk == k {
                            row[i * n + r] = scalar::sub(row[i * n + r], c, p);
                        }
                    });
                    alg.for_each_term(i, r, |kk, c| {
                        if kk == k {
                            row[j * n + r] = scalar::sub(row[j * n + r], c, p);
                        }
                    });
                }
                if row.iter().any(|&v| v != 0) {
                    rows.push(row);
                }
            }
        }
    }
    let sol = if rows.is_empty() {
        FpMatrix::identity(p, n * n)
    } else {
        FpMatrix::from_row_vectors(p, n * n, &rows).kernel()
    };
    (0..sol.rows())
        .map(|r| Derivation {
            alg: alg.clone(),
            matrix: FpMatrix::from_raw(p, n, n, sol.row(r).to_vec()),
        })
        .collect()
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum ClosureOp {
    Bracket(usize, usize),
    PPower(usize),
}

/// Coordinates of a bracket or p-th power in the basis of `L`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ClosureCertificate {
    pub op: ClosureOp,
    pub coords: Vec<u64>,
}

/// A restricted differential Lie algebra `L` of derivations, with a basis
/// and certificates of its closure under brackets and p-th powers.
#[derive(Clone, Debug)]
pub struct DeltaLieAlgebra {
    alg: Arc<AlgebraPresentation>,
    basis: Vec<Derivation>,
    certificates: Vec<ClosureCertificate>,
}

fn flat(d: &Derivation) -> Vec<u64> {
    d.matrix.data().to_vec()
}

impl DeltaLieAlgebra {
    pub fn algebra(&self) -> &Arc<AlgebraPresentation> {
        &self.alg
    }

    pub fn basis(&self) -> &[Derivation] {
        &self.basis
    }

    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    pub fn certificates(&self) -> &[ClosureCertificate] {
        &self.certificates
    }

    fn basis_rows(&self) -> FpMatrix {
        let n = self.alg.dim();
        let rows: Vec<Vec<u64>> = self.basis.iter().map(flat).collect();
        FpMatrix::from_row_vectors(self.alg.p(), n * n, &rows)
    }

    /// Coordinates of `d` in the basis, or `None` when `d` is not in `L`.
    pub fn coordinates(&self, d: &Derivation) -> Option<Vec<u64>> {
        if self.basis.is_empty() {
            return d.is_zero().then(Vec::new);
        }
        self.basis_rows().express_row(&flat(d))
    }

    pub fn contains(&self, d: &Derivation) -> bool {
        self.coordinates(d).is_some()
    }

    pub fn combine(&self, coords: &[u64]) -> Derivation {
        let mut acc = Derivation::zero(self.alg.clone());
        for (d, &c) in self.basis.iter().zip(coords) {
            if c != 0 {
                acc = acc.add(&d.scale(c)).expect("same parent");
            }
        }
        acc
    }

    /// Re-verify every certificate.
    pub fn verify(&self) -> Result<()> {
        for cert in &self.certificates {
            let value = match cert.op {
                ClosureOp::Bracket(i, j) => self.basis[i].bracket(&self.basis[j])?,
                ClosureOp::PPower(i) => self.basis[i].p_power()?,
            };
            if self.combine(&cert.coords) != value {
                return Err(Error::violation(format!("closure certificate {:?} is wrong", cert.op)));
            }
        }
        Ok(())
    }

    /// In this setting the centroid is `GF(p)`, which every derivation kills;
    /// the module laws `z d = d z`, `[d z, d1] = [d, d1] z` and
    /// `(d z)^[p] = d^[p] z^p` are checked for every scalar and basis pair.
    pub fn check_scalar_laws(&self) -> Result<()> {
        let p = self.alg.p();
        for d in &self.basis {
            for z in 0..p {
                let dz = d.scale(z);
                let zd = Derivation {
                    alg: self.alg.clone(),
                    matrix: FpMatrix::identity(p, self.alg.dim()).scale(z).mul(&d.matrix)?,
                };
                if dz != zd {
                    return Err(Error::violation("central scalar does not commute with a derivation"));
                }
                for d1 in &self.basis {
                    if dz.bracket(d1)? != d.bracket(d1)?.scale(z) {
                        return Err(Error::violation("[dz, d1] != [d, d1] z"));
                    }
                }
                if dz.p_power()? != d.p_power()?.scale(scalar::pow(z, p, p)) {
                    return Err(Error::violation("(dz)^[p] != d^[p] z^p"));
                }
            }
        }
        Ok(())
    }
}

/// Smallest subspace of derivations containing `gens` and closed under
/// brackets and p-th powers of basis elements, which by Jacobson's formula
/// makes it closed under p-th powers of all members.
pub fn restricted_closure(
    alg: &Arc<AlgebraPresentation>,
    gens: &[Derivation],
) -> Result<DeltaLieAlgebra> {
    let n = alg.dim();
    let p = alg.p();
    for g in gens {
        g.check_parent(&Derivation::zero(alg.clone()))?;
    }
    let mut basis: Vec<Derivation> = Vec::new();
    let mut span = Subspace::zero(p, n * n);
    let push = |d: Derivation, basis: &mut Vec<Derivation>, span: &mut Subspace| -> bool {
        let v = flat(&d);
        if span.contains(&v).expect("ambient") {
            return false;
        }
        *span = span.sum(&Subspace::span(p, n * n, &[v])).expect("ambient");
        basis.push(d);
        true
    };
    for g in gens {
        push(g.clone(), &mut basis, &mut span);
    }
    let mut done_pairs: HashSet<(usize, usize)> = HashSet::new();
    let mut done_powers: HashSet<usize> = HashSet::new();
    loop {
        let mut grew = false;
        let k = basis.len();
        for i in 0..k {
            if done_powers.insert(i) {
                let d = basis[i].p_power()?;
                grew |= push(d, &mut basis, &mut span);
            }
            for j in i + 1..k {
                if done_pairs.insert((i, j)) {
                    let d = basis[i].bracket(&basis[j])?;
                    grew |= push(d, &mut basis, &mut span);
                }
            }
        }
        if !grew && basis.len() == k {
            break;
        }
    }
    let mut l = DeltaLieAlgebra {
        alg: alg.clone(),
        basis,
        certificates: Vec::new(),
    };
    let mut certs = Vec::new();
    for i in 0..l.dim() {
        for j in i + 1..l.dim() {
            let d = l.basis[i].bracket(&l.basis[j])?;
            let coords = l.coordinates(&d).ok_or_else(|| Error::violation("closure missed a bracket"))?;
            certs.push(ClosureCertificate {
                op: ClosureOp::Bracket(i, j),
                coords,
            });
        }
        let d = l.basis[i].p_power()?;
        let coords = l.coordinates(&d).ok_or_else(|| Error::violation("closure missed a p-th power"))?;
        certs.push(ClosureCertificate {
            op: ClosureOp::PPower(i),
            coords,
        });
    }
    l.certificates = certs;
    Ok(l)
}

/// `K(L) = {q : q^- in L}` and the subalgebra `B(L)` it generates.
#[derive(Clone, Debug)]
pub struct InnerPart {
    pub k: Subspace,
    pub b: Subspace,
    /// `B(L)` on its own basis `b1..bk`.
    pub b_alg: Arc<AlgebraPresentation>,
    /// Rows are the basis of `B(L)` in parent coordinates.
    pub embedding: FpMatrix,
    /// Each basis derivation of `L` restricted to `B(L)`, in `B` coordinates.
    pub l_on_b: Vec<FpMatrix>,
}

impl InnerPart {
    /// Parent coordinates of a `B` coordinate vector.
    pub fn embed(&self, coords: &[u64]) -> Vec<u64> {
        self.embedding.apply_row(coords)
    }

    /// `B` coordinates of a parent vector lying in `B`.
    pub fn restrict(&self, v: &[u64]) -> Option<Vec<u64>> {
        self.b.coordinates(v).expect("ambient")
    }

    pub fn dim(&self) -> usize {
        self.b.dim()
    }
}

/// Compute `K(L)` and `B(L)` and verify the structural facts about them:
/// `1 in K`, `K` closed under commutators and p-th powers, `(q^mu)^- = [q^-, mu]`,
/// stability of `B` under `L`, and `dim B <= p^(dim K)`.
pub fn inner_part(l: &DeltaLieAlgebra) -> Result<InnerPart> {
    let alg = l.algebra();
    let n = alg.dim();
    let p = alg.p();
    // (q, c) with q^- - sum c_k mu_k = 0
    let ad_rows: Vec<Vec<u64>> = (0..n)
        .map(|i| inner_matrix(alg, &unit_vector(n, i)).data().to_vec())
        .collect();
    let mut stacked = FpMatrix::from_row_vectors(p, n * n, &ad_rows);
    if l.dim() > 0 {
        stacked = stacked.vstack(&l.basis_rows().scale(p - 1))?;
    }
    let kern = stacked.left_kernel();
    let qs: Vec<Vec<u64>> = (0..kern.rows()).map(|r| kern.row(r)[..n].to_vec()).collect();
    let k = alg.span(&qs);

    if !k.contains(alg.unit())? {
        return Err(Error::violation("K(L) does not contain the unit"));
    }
    let kb = k.basis_vectors();
    for x in &kb {
        let mut pw = alg.unit().to_vec();
        for _ in 0..p {
            pw = alg.mul_coords(&pw, x);
        }
        if !k.contains(&pw)? {
            return Err(Error::violation("K(L) is not closed under p-th powers"));
        }
        for y in &kb {
            let xy = alg.mul_coords(x, y);
            let yx = alg.mul_coords(y, x);
            let c: Vec<u64> = xy.iter().zip(&yx).map(|(&a, &b)| scalar::sub(a, b, p)).collect();
            if !k.contains(&c)? {
                return Err(Error::violation("K(L) is not closed under commutators"));
            }
        }
    }

    let b = alg.subalgebra_generated(&k)?;
    let dk = k.dim() as u32;
    if (p as u128).checked_pow(dk).map_or(false, |bound| (b.dim() as u128) > bound) {
        return Err(Error::violation("dim B(L) exceeds p^(dim K(L))"));
    }
    let b_alg = Arc::new(alg.subalgebra_presentation(&b)?);
    let embedding = b.basis().clone();

    let mut l_on_b = Vec::with_capacity(l.dim());
    for mu in l.basis() {
        let mut rows = Vec::with_capacity(b.dim());
        for q in b.basis_vectors() {
            let qmu = mu.apply(&q);
            let coords = b
                .coordinates(&qmu)?
                .ok_or_else(|| Error::violation("B(L) is not stable under L"))?;
            // (q^mu)^- = [q^-, mu]
            let lhs = inner_matrix(alg, &qmu);
            let qm = inner_matrix(alg, &q);
            let rhs = qm.mul(mu.matrix())?.sub(&mu.matrix().mul(&qm)?)?;
            if lhs != rhs {
                return Err(Error::violation("(q^mu)^- differs from [q^-, mu]"));
            }
            rows.push(coords);
        }
        l_on_b.push(FpMatrix::from_row_vectors(p, b.dim(), &rows));
    }
    Ok(InnerPart {
        k,
        b,
        b_alg,
        embedding,
        l_on_b,
    })
}

/// `{x in ambient : x^mu = 0 for all mu in L}`.
pub fn constants(l: &DeltaLieAlgebra, ambient: &Subspace) -> Result<Subspace> {
    let alg = l.algebra();
    let n = alg.dim();
    if ambient.ambient_dim() != n {
        return Err(Error::AmbientMismatch(n, ambient.ambient_dim()));
    }
    for mu in l.basis() {
        if !ambient.image(mu.matrix())?.is_subspace_of(ambient)? {
            return Err(Error::invalid("ambient subspace is not stable under L"));
        }
    }
    if l.dim() == 0 || ambient.is_zero() {
        return Ok(ambient.clone());
    }
    let a = ambient.basis();
    let mut stacked: Option<FpMatrix> = None;
    for mu in l.basis() {
        let m = a.mul(mu.matrix())?;
        stacked = Some(match stacked {
            None => m,
            Some(s) => s.hstack(&m)?,
        });
    }
    let kern = stacked.expect("nonempty").left_kernel();
    let vectors: Vec<Vec<u64>> = (0..kern.rows()).map(|r| ambient.combine(kern.row(r))).collect();
    let c = alg.span(&vectors);
    if ambient.contains(alg.unit())? && !alg.is_subalgebra(&c)? {
        return Err(Error::violation("constants are not a unital subalgebra"));
    }
    Ok(c)
}

/// Smallest two-sided ideal of `B` containing `start` and stable under `L`.
pub fn generated_differential_ideal(inner: &InnerPart, start: &Subspace) -> Subspace {
    let b = &inner.b_alg;
    let mut cur = start.clone();
    loop {
        let mut next = b.ideal_of_space(None, &cur).expect("ambient");
        for m in &inner.l_on_b {
            next = next.sum(&next.image(m).expect("shape")).expect("ambient");
        }
        if next == cur {
            return cur;
        }
        cur = next;
    }
}

/// Whether `s` (in `B` coordinates) is a two-sided ideal of `B` stable under `L`.
pub fn is_differential_ideal(inner: &InnerPart, s: &Subspace) -> Result<bool> {
    if !inner.b_alg.is_two_sided_ideal(s)? {
        return Ok(false);
    }
    for m in &inner.l_on_b {
        if !s.image(m)?.is_subspace_of(s)? {
            return Ok(false);
        }
    }
    Ok(true)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct DiffSemisimpleVerdict {
    pub semisimple: bool,
    /// Basis (in `B` coordinates) of a nonzero differential ideal of square zero.
    pub witness: Option<Vec<Vec<u64>>>,
    /// Differentially simple summands, in `B` coordinates.
    pub summands: Vec<Vec<Vec<u64>>>,
    /// Central idempotents of the summands, in `B` coordinates.
    pub idempotents: Vec<Vec<u64>>,
    pub exhaustive: bool,
}

/// Largest `L`-stable subspace of `s`. When `s` is an ideal of `B` this is
/// again an ideal.
pub fn stable_core(inner: &InnerPart, s: &Subspace) -> Result<Subspace> {
    let mut cur = s.clone();
    loop {
        let perp = cur.orthogonal();
        let mut acc = perp.clone();
        for m in &inner.l_on_b {
            acc = acc.sum(&perp.image(&m.transpose())?)?;
        }
        let next = acc.orthogonal();
        if next == cur {
            return Ok(cur);
        }
        cur = next;
    }
}

/// The associative algebra of maps on `B` generated by left and right
/// multiplications and `L`; the differential ideal generated by `x` is
/// the orbit `x W`.
struct IdealOrbit {
    n: usize,
    /// The basis of `W` side by side, one `n x n` block per element.
    stacked: FpMatrix,
    k: usize,
    gens: Vec<FpMatrix>,
}

impl IdealOrbit {
    fn new(inner: &InnerPart) -> Result<Self> {
        let b = &inner.b_alg;
        let n = b.dim();
        let p = b.p();
        let mut gens: Vec<FpMatrix> = Vec::new();
        for i in 0..n {
            let e = unit_vector(n, i);
            gens.push(b.left_mult_matrix(&e));
            gens.push(b.right_mult_matrix(&e));
        }
        gens.extend(inner.l_on_b.iter().cloned());
        let flat = |m: &FpMatrix| m.data().to_vec();
        let mut span = Subspace::span(p, n * n, &[flat(&FpMatrix::identity(p, n))]);
        let mut frontier = vec![FpMatrix::identity(p, n)];
        while !frontier.is_empty() {
            let mut next = Vec::new();
            for w in &frontier {
                for g in &gens {
                    let prod = w.mul(g)?;
                    let v = flat(&prod);
                    if !span.contains(&v)? {
                        span = span.sum(&Subspace::span(p, n * n, &[v]))?;
                        next.push(prod);
                    }
                }
            }
            frontier = next;
        }
        let k = span.dim();
        let mut stacked = FpMatrix::zeros(p, n, n * k);
        for (t, v) in span.basis_vectors().iter().enumerate() {
            for r in 0..n {
                for c in 0..n {
                    stacked.set(r, t * n + c, v[r * n + c]);
                }
            }
        }
        Ok(IdealOrbit { n, stacked, k, gens })
    }

    /// Whether `B` is a simple `W`-module, by the density theorem: the
    /// commutant `C` of `W` is a field and `dim W = n^2 / dim C`. `None` when
    /// `C` is too large to check for zero divisors.
    fn is_simple(&self, config: &SearchConfig) -> Result<Option<bool>> {
        let n = self.n;
        let p = self.stacked.modulus();
        // X g = g X for every generator, unknown X[r][c] at r * n + c
        let mut rows = Vec::new();
        for g in &self.gens {
            for r in 0..n {
                for c in 0..n {
                    let mut row = vec![0u64; n * n];
                    for t in 0..n {
                        row[r * n + t] = (row[r * n + t] + g.get(t, c)) % p;
                        row[t * n + c] = (row[t * n + c] + p - g.get(r, t)) % p;
                    }
                    if row.iter().any(|&v| v != 0) {
                        rows.push(row);
                    }
                }
            }
        }
        let comm = if rows.is_empty() {
            FpMatrix::identity(p, n * n)
        } else {
            FpMatrix::from_row_vectors(p, n * n, &rows).kernel()
        };
        let c = comm.rows();
        if (n * n) % c != 0 || self.k != n * n / c {
            return Ok(Some(false));
        }
        if !config.fits(p, c) {
            return Ok(None);
        }
        let mut field = true;
        crate::linalg::for_each_projective_point(p, c, |coef| {
            let mut x = vec![0u64; n * n];
            for (i, &a) in coef.iter().enumerate() {
                for (o, &v) in x.iter_mut().zip(comm.row(i)) {
                    *o = (*o + a * v) % p;
                }
            }
            field = FpMatrix::from_raw(p, n, n, x).is_invertible();
            field
        });
        Ok(Some(field))
    }

    fn ideal(&self, x: &[u64]) -> Subspace {
        let flat = self.stacked.apply_row(x);
        let rows: Vec<Vec<u64>> = flat.chunks(self.n).map(|c| c.to_vec()).collect();
        debug_assert_eq!(rows.len(), self.k);
        Subspace::span(self.stacked.modulus(), self.n, &rows)
    }
}

/// Searches for a nonzero differential ideal with zero multiplication.
///
/// Every such ideal is nilpotent, so it lies in the trace-form kernel of `B`
/// and hence in the largest differential ideal `S` inside that kernel. If `S`
/// is nilpotent its last nonzero power is a witness. Otherwise every
/// differential ideal `D(x)` generated by a single element is computed, which
/// decides the question and yields the minimal differential ideals.
pub fn diff_semisimple(inner: &InnerPart, config: &SearchConfig) -> Result<DiffSemisimpleVerdict> {
    let b = &inner.b_alg;
    let p = b.p();
    let n = b.dim();
    let t = stable_core(inner, &b.trace_kernel())?;
    let mut power = t.clone();
    while !power.is_zero() {
        let next = b.product_space(&power, &t)?;
        if next.is_zero() {
            return Ok(DiffSemisimpleVerdict {
                semisimple: false,
                witness: Some(power.basis_vectors()),
                summands: Vec::new(),
                idempotents: Vec::new(),
                exhaustive: true,
            });
        }
        if next == power {
            break;
        }
        power = next;
    }
    let orbit = IdealOrbit::new(inner)?;
    if orbit.is_simple(config)? == Some(true) {
        return Ok(DiffSemisimpleVerdict {
            semisimple: true,
            witness: None,
            summands: vec![b.full_space().basis_vectors()],
            idempotents: vec![b.unit().to_vec()],
            exhaustive: true,
        });
    }
    let mut ideals: HashSet<Subspace> = HashSet::new();
    let exhaustive = config.fits(p, n);
    let exhaustive_t = exhaustive || config.fits(p, t.dim());
    if exhaustive {
        for_each_projective_point(p, n, |x| {
            ideals.insert(orbit.ideal(x));
            true
        });
    } else {
        if exhaustive_t && t.dim() > 0 {
            for_each_projective_point(p, t.dim(), |c| {
                ideals.insert(orbit.ideal(&t.combine(c)));
                true
            });
        }
        let mut rng = config.rng(0xd156);
        let mut cands: Vec<Vec<u64>> = (0..n).map(|i| unit_vector(n, i)).collect();
        cands.extend(t.basis_vectors());
        for _ in 0..config.samples {
            cands.push((0..n).map(|_| rng.gen_range(0..p)).collect());
            cands.push(t.combine(&(0..t.dim()).map(|_| rng.gen_range(0..p)).collect::<Vec<_>>()));
        }
        for x in cands.iter().filter(|x| x.iter().any(|&v| v != 0)) {
            ideals.insert(orbit.ideal(x));
        }
    }
    let mut sorted: Vec<Subspace> = ideals.iter().cloned().collect();
    crate::algebra::sort_subspaces(&mut sorted);
    let witness = sorted
        .iter()
        .find(|d| b.product_space(d, d).expect("ambient").is_zero());
    if let Some(w) = witness {
        return Ok(DiffSemisimpleVerdict {
            semisimple: false,
            witness: Some(w.basis_vectors()),
            summands: Vec::new(),
            idempotents: Vec::new(),
            exhaustive: exhaustive_t,
        });
    }
    if !exhaustive_t {
        return Err(Error::Undecided(format!(
            "differential semisimplicity: trace kernel of dimension {} exceeds the budget",
            t.dim()
        )));
    }

    let all: Vec<&Subspace> = ideals.iter().collect();
    let mut minimal: Vec<Subspace> = all
        .iter()
        .filter(|i| {
            !all.iter()
                .any(|j| j.dim() < i.dim() && j.is_subspace_of(i).expect("ambient"))
        })
        .map(|i| (*i).clone())
        .collect();
    crate::algebra::sort_subspaces(&mut minimal);
    let total = minimal
        .iter()
        .fold(b.zero_space(), |acc, s| acc.sum(s).expect("ambient"));
    let dims: usize = minimal.iter().map(|s| s.dim()).sum();
    if !(total.is_full() && dims == n) {
        if exhaustive {
            return Err(Error::violation(
                "no square-zero differential ideal, yet minimal differential ideals do not split B",
            ));
        }
        return Err(Error::Undecided("decomposition search was sampled".into()));
    }
    let mut stacked = minimal[0].basis().clone();
    for s in &minimal[1..] {
        stacked = stacked.vstack(s.basis())?;
    }
    let coords = stacked
        .express_row(b.unit())
        .ok_or_else(|| Error::violation("unit not in the sum of summands"))?;
    let mut idempotents = Vec::new();
    let mut off = 0;
    for s in &minimal {
        idempotents.push(s.combine(&coords[off..off + s.dim()]));
        off += s.dim();
    }
    for e in &idempotents {
        if b.mul_coords(e, e) != *e || !b.center().contains(e)? {
            return Err(Error::violation("summand idempotent is not a central idempotent"));
        }
    }
    Ok(DiffSemisimpleVerdict {
        semisimple: true,
        witness: None,
        summands: minimal.iter().map(|s| s.basis_vectors()).collect(),
        idempotents,
        exhaustive,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::direct_sum;
    use crate::models::{matrix_algebra, truncated_poly_deg};

    fn m2(p: u64) -> Arc<AlgebraPresentation> {
        Arc::new(matrix_algebra(2, p).unwrap())
    }

    fn named(a: &Arc<AlgebraPresentation>, name: &str) -> AlgebraElement {
        a.basis_element(a.index_of(name).unwrap())
    }

    #[test]
    fn inner_derivations() {
        let a = m2(2);
        assert!(inner_derivation(&a.one()).is_zero());
        let d = inner_derivation(&named(&a, "e12"));
        assert_eq!(d.apply(&[1, 0, 0, 0]), vec![0, 1, 0, 0]);
        let x = named(&a, "e11").add(&named(&a, "e21")).unwrap();
        let sum = inner_derivation(&named(&a, "e11")).add(&inner_derivation(&named(&a, "e21"))).unwrap();
        assert_eq!(inner_derivation(&x), sum);
    }

    #[test]
    fn bracket_and_power_of_inner_derivations() {
        let a = m2(3);
        let x = a.element(vec![1, 2, 0, 1]).unwrap();
        let y = a.element(vec![0, 1, 1, 2]).unwrap();
        let dx = inner_derivation(&x);
        let dy = inner_derivation(&y);
        assert!(dx.bracket(&dx).unwrap().is_zero());
        assert_eq!(dx.bracket(&dy).unwrap(), inner_derivation(&x.commutator(&y).unwrap()));
        assert_eq!(dx.p_power().unwrap(), inner_derivation(&x.pow(3)));
    }

    #[test]
    fn non_derivations_rejected() {
        let a = m2(2);
        let err = Derivation::new(a.clone(), FpMatrix::identity(2, 4)).unwrap_err();
        assert!(matches!(err, Error::NotDerivation(_, _)));
        let other = m2(2);
        let d = inner_derivation(&named(&a, "e12"));
        let e = inner_derivation(&named(&Arc::new(truncated_poly_deg(2, 4).unwrap()), "t"));
        assert_eq!(d.bracket(&e).unwrap_err(), Error::ParentMismatch);
        assert!(d.bracket(&inner_derivation(&other.basis_element(0))).is_ok());
    }

    #[test]
    fn closures() {
        let a = m2(2);
        assert_eq!(restricted_closure(&a, &[Derivation::zero(a.clone())]).unwrap().dim(), 0);
        let l = restricted_closure(&a, &[inner_derivation(&named(&a, "e12"))]).unwrap();
        assert_eq!(l.dim(), 1);
        let gens: Vec<Derivation> = (0..4).map(|i| inner_derivation(&a.basis_element(i))).collect();
        let l = restricted_closure(&a, &gens).unwrap();
        assert_eq!(l.dim(), 3);
        l.verify().unwrap();
        l.check_scalar_laws().unwrap();
    }

    #[test]
    fn derivations_of_matrix_algebra_are_inner() {
        let a = m2(3);
        assert_eq!(derivation_space(&a).len(), 3);
        let t = Arc::new(truncated_poly_deg(3, 3).unwrap());
        // t -> f(t) with f(t) arbitrary in the span of 1, t, t^2 subject to 3 t^2 f = 0
        assert_eq!(derivation_space(&t).len(), 3);
    }

    #[test]
    fn inner_parts_and_constants() {
        let a = m2(2);
        let zero = restricted_closure(&a, &[]).unwrap();
        let ip = inner_part(&zero).unwrap();
        assert_eq!(ip.k, a.center());
        assert_eq!(ip.b, a.center());
        assert_eq!(constants(&zero, &a.full_space()).unwrap(), a.full_space());

        let gens: Vec<Derivation> = (0..4).map(|i| inner_derivation(&a.basis_element(i))).collect();
        let all = restricted_closure(&a, &gens).unwrap();
        let ip = inner_part(&all).unwrap();
        assert!(ip.k.is_full() && ip.b.is_full());
        assert_eq!(constants(&all, &a.full_space()).unwrap(), a.center());

        let one = restricted_closure(&a, &[inner_derivation(&named(&a, "e12"))]).unwrap();
        let ip = inner_part(&one).unwrap();
        let expect = a.span(&[a.unit().to_vec(), named(&a, "e12").into_coords()]);
        assert_eq!(ip.k, expect);
        assert_eq!(ip.b, expect);
        assert_eq!(constants(&one, &a.full_space()).unwrap(), expect);
    }

    #[test]
    fn differential_semisimplicity() {
        let cfg = SearchConfig::default();
        let a = m2(2);
        let gens: Vec<Derivation> = (0..4).map(|i| inner_derivation(&a.basis_element(i))).collect();
        let ip = inner_part(&restricted_closure(&a, &gens).unwrap()).unwrap();
        let v = diff_semisimple(&ip, &cfg).unwrap();
        assert!(v.semisimple);
        assert_eq!(v.summands.len(), 1);

        let one = restricted_closure(&a, &[inner_derivation(&named(&a, "e12"))]).unwrap();
        let ip = inner_part(&one).unwrap();
        let v = diff_semisimple(&ip, &cfg).unwrap();
        assert!(!v.semisimple);

        let s = Arc::new(
            direct_sum(&matrix_algebra(2, 2).unwrap(), &matrix_algebra(1, 2).unwrap())
                .unwrap()
                .algebra,
        );
        let gens: Vec<Derivation> = (0..5).map(|i| inner_derivation(&s.basis_element(i))).collect();
        let l = restricted_closure(&s, &gens).unwrap();
        let ip = inner_part(&l).unwrap();
        assert!(ip.b.is_full());
        let v = diff_semisimple(&ip, &cfg).unwrap();
        assert!(v.semisimple);
        assert_eq!(v.summands.len(), 2);
        let mut idem = v.idempotents.clone();
        idem.sort();
        assert_eq!(idem, vec![vec![0, 0, 0, 0, 1], vec![1, 0, 0, 1, 0]]);
    }

    #[test]
    fn density_shortcut_matches_orbit_sweep() {
        let cfg = SearchConfig::default();
        let scenarios = [
            crate::corpus::m2_inner().unwrap(),
            crate::corpus::unipotent_in_m2().unwrap(),
            crate::corpus::m2_plus_gf2_in_m3().unwrap(),
            crate::corpus::truncated(1, 3).unwrap(),
            crate::corpus::truncated(2, 2).unwrap(),
            crate::corpus::twisted_truncated().unwrap(),
        ];
        for s in scenarios {
            let ctx = s.context().unwrap();
            let inner = ctx.inner();
            let b = &inner.b_alg;
            let orbit = IdealOrbit::new(inner).unwrap();
            let mut ideals = HashSet::new();
            for_each_projective_point(b.p(), b.dim(), |x| {
                let d = orbit.ideal(x);
                assert_eq!(d, generated_differential_ideal(inner, &b.span(&[x.to_vec()])));
                ideals.insert(d);
                true
            });
            let simple = ideals.len() == 1;
            assert_eq!(orbit.is_simple(&cfg).unwrap(), Some(simple), "{}", s.name);
        }
    }
}
