//! Ideals, annihilators, centralizers and ideal lattices of a presented algebra.

use std::collections::HashSet;
use std::sync::Arc;

use rand::Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::config::SearchConfig;
use crate::error::{Error, Result};
use crate::linalg::{for_each_projective_point, FpMatrix, Subspace};

use super::element::AlgebraElement;
use super::presentation::{unit_vector, AlgebraPresentation};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Side {
    Left,
    Right,
}

impl Side {
    pub fn opposite(self) -> Side {
        match self {
            Side::Left => Side::Right,
            Side::Right => Side::Left,
        }
    }
}

/// All (or, when over budget, a sample of) one-sided ideals of one side.
#[derive(Clone, Debug)]
pub struct IdealLattice {
    pub side: Side,
    /// Sorted by dimension then basis; always contains 0 and the whole algebra.
    pub ideals: Vec<Subspace>,
    pub exhaustive: bool,
}

pub(crate) fn sort_subspaces(v: &mut [Subspace]) {
    v.sort_by(|a, b| {
        a.dim()
            .cmp(&b.dim())
            .then_with(|| a.basis().data().cmp(b.basis().data()))
    });
}

impl AlgebraPresentation {
    fn check_space(&self, s: &Subspace) -> Result<()> {
        if s.ambient_dim() != self.dim() {
            return Err(Error::AmbientMismatch(self.dim(), s.ambient_dim()));
        }
        if s.modulus() != self.p() {
            return Err(Error::ModulusMismatch(self.p(), s.modulus()));
        }
        Ok(())
    }

    fn check_element(&self, x: &AlgebraElement) -> Result<()> {
        if x.algebra().as_ref() != self {
            return Err(Error::ParentMismatch);
        }
        Ok(())
    }

    pub fn full_space(&self) -> Subspace {
        Subspace::full(self.p(), self.dim())
    }

    pub fn zero_space(&self) -> Subspace {
        Subspace::zero(self.p(), self.dim())
    }

    pub fn span(&self, vectors: &[Vec<u64>]) -> Subspace {
        Subspace::span(self.p(), self.dim(), vectors)
    }

    /// Kernel of the row-acting maps `x -> x M_t`, all at once.
    fn joint_left_kernel(&self, maps: &[FpMatrix]) -> Subspace {
        if maps.is_empty() {
            return self.full_space();
        }
        let mut stacked = maps[0].clone();
        for m in &maps[1..] {
            stacked = stacked.hstack(m).expect("same height");
        }
        let k = stacked.left_kernel();
        if k.rows() == 0 {
            return self.zero_space();
        }
        Subspace::row_space(&k)
    }

    /// `l(S) = {b : b S = 0}`.
    pub fn left_annihilator(&self, s: &Subspace) -> Result<Subspace> {
        self.check_space(s)?;
        let maps: Vec<FpMatrix> = s
            .basis_vectors()
            .iter()
            .map(|v| self.right_mult_matrix(v))
            .collect();
        Ok(self.joint_left_kernel(&maps))
    }

    /// `r(S) = {b : S b = 0}`.
    pub fn right_annihilator(&self, s: &Subspace) -> Result<Subspace> {
        self.check_space(s)?;
        let maps: Vec<FpMatrix> = s
            .basis_vectors()
            .iter()
            .map(|v| self.left_mult_matrix(v))
            .collect();
        Ok(self.joint_left_kernel(&maps))
    }

    pub fn annihilator(&self, side: Side, s: &Subspace) -> Result<Subspace> {
        match side {
            Side::Left => self.left_annihilator(s),
            Side::Right => self.right_annihilator(s),
        }
    }

    /// `{x : x s = s x for every s in S}`.
    pub fn centralizer(&self, s: &Subspace) -> Result<Subspace> {
        self.check_space(s)?;
        let maps: Vec<FpMatrix> = s
            .basis_vectors()
            .iter()
            .map(|v| {
                self.right_mult_matrix(v)
                    .sub(&self.left_mult_matrix(v))
                    .expect("same shape")
            })
            .collect();
        Ok(self.joint_left_kernel(&maps))
    }

    pub fn center(&self) -> Subspace {
        self.centralizer(&self.full_space()).expect("own space")
    }

    fn closed_under(&self, s: &Subspace, side: Side) -> bool {
        let n = self.dim();
        s.basis_vectors().iter().all(|v| {
            (0..n).all(|i| {
                let e = unit_vector(n, i);
                let prod = match side {
                    Side::Left => self.mul_coords(&e, v),
                    Side::Right => self.mul_coords(v, &e),
                };
                s.contains(&prod).expect("ambient")
            })
        })
    }

    pub fn is_left_ideal(&self, s: &Subspace) -> Result<bool> {
        self.check_space(s)?;
        Ok(self.closed_under(s, Side::Left))
    }

    pub fn is_right_ideal(&self, s: &Subspace) -> Result<bool> {
        self.check_space(s)?;
        Ok(self.closed_under(s, Side::Right))
    }

    pub fn is_ideal(&self, side: Side, s: &Subspace) -> Result<bool> {
        match side {
            Side::Left => self.is_left_ideal(s),
            Side::Right => self.is_right_ideal(s),
        }
    }

    pub fn is_two_sided_ideal(&self, s: &Subspace) -> Result<bool> {
        Ok(self.is_left_ideal(s)? && self.is_right_ideal(s)?)
    }

    pub fn is_subalgebra(&self, s: &Subspace) -> Result<bool> {
        self.check_space(s)?;
        if !s.contains(self.unit())? {
            return Ok(false);
        }
        let basis = s.basis_vectors();
        for x in &basis {
            for y in &basis {
                if !s.contains(&self.mul_coords(x, y))? {
                    return Ok(false);
                }
            }
        }
        Ok(true)
    }

    /// Smallest subspace containing `start` and closed under multiplication by
    /// basis elements on the requested sides.
    fn ideal_closure(&self, start: Subspace, left: bool, right: bool) -> Subspace {
        let n = self.dim();
        let mut cur = start;
        loop {
            let mut vectors = cur.basis_vectors();
            for v in cur.basis_vectors() {
                for i in 0..n {
                    let e = unit_vector(n, i);
                    if left {
                        vectors.push(self.mul_coords(&e, &v));
                    }
                    if right {
                        vectors.push(self.mul_coords(&v, &e));
                    }
                }
            }
            let next = self.span(&vectors);
            if next == cur {
                return cur;
            }
            cur = next;
        }
    }

    fn gens_space(&self, gens: &[AlgebraElement]) -> Result<Subspace> {
        for g in gens {
            self.check_element(g)?;
        }
        let vectors: Vec<Vec<u64>> = gens.iter().map(|g| g.coords().to_vec()).collect();
        Ok(self.span(&vectors))
    }

    pub fn generated_left_ideal(&self, gens: &[AlgebraElement]) -> Result<Subspace> {
        Ok(self.ideal_closure(self.gens_space(gens)?, true, false))
    }

    pub fn generated_right_ideal(&self, gens: &[AlgebraElement]) -> Result<Subspace> {
        Ok(self.ideal_closure(self.gens_space(gens)?, false, true))
    }

    pub fn generated_ideal(&self, gens: &[AlgebraElement]) -> Result<Subspace> {
        Ok(self.ideal_closure(self.gens_space(gens)?, true, true))
    }

    pub fn ideal_of_space(&self, side: Option<Side>, s: &Subspace) -> Result<Subspace> {
        self.check_space(s)?;
        let (l, r) = match side {
            Some(Side::Left) => (true, false),
            Some(Side::Right) => (false, true),
            None => (true, true),
        };
        Ok(self.ideal_closure(s.clone(), l, r))
    }

    /// `x B` for the right side, `B x` for the left side.
    pub fn cyclic_ideal(&self, side: Side, x: &[u64]) -> Subspace {
        let m = match side {
            Side::Right => self.left_mult_matrix(x),
            Side::Left => self.right_mult_matrix(x),
        };
        Subspace::row_space(&m)
    }

    /// `span{u v : u in U, v in V}`.
    pub fn product_space(&self, u: &Subspace, v: &Subspace) -> Result<Subspace> {
        self.check_space(u)?;
        self.check_space(v)?;
        let mut vectors = Vec::with_capacity(u.dim() * v.dim());
        for x in u.basis_vectors() {
            for y in v.basis_vectors() {
                vectors.push(self.mul_coords(&x, &y));
            }
        }
        Ok(self.span(&vectors))
    }

    /// Associative unital subalgebra generated by `s`.
    pub fn subalgebra_generated(&self, s: &Subspace) -> Result<Subspace> {
        self.check_space(s)?;
        let mut cur = s.sum(&self.span(&[self.unit().to_vec()]))?;
        loop {
            let next = cur.sum(&self.product_space(&cur, &cur)?)?;
            if next == cur {
                return Ok(cur);
            }
            cur = next;
        }
    }

    /// Presentation of a unital subalgebra on its echelon basis, named `b1..bk`.
    pub fn subalgebra_presentation(&self, s: &Subspace) -> Result<AlgebraPresentation> {
        if !self.is_subalgebra(s)? {
            return Err(Error::invalid("subspace is not a unital subalgebra"));
        }
        let basis = s.basis_vectors();
        let names = (1..=basis.len()).map(|i| format!("b{}", i)).collect();
        let unit = s.coordinates(self.unit())?.expect("unit in subalgebra");
        AlgebraPresentation::from_products(self.p(), names, unit, |i, j| {
            s.coordinates(&self.mul_coords(&basis[i], &basis[j]))
                .expect("ambient")
                .expect("closed under products")
        })
    }

    /// Every one-sided ideal of the given side.
    ///
    /// Every right ideal is a sum of cyclic ideals `xB`, so the lattice is the
    /// closure of the cyclic ideals under sums. When the projective point
    /// count exceeds the budget, cyclic ideals of basis elements and seeded
    /// random elements are used instead and the result is marked non-exhaustive.
    pub fn one_sided_ideals(&self, side: Side, config: &SearchConfig) -> IdealLattice {
        let p = self.p();
        let n = self.dim();
        let mut exhaustive = config.fits(p, n);
        let cyclic: Vec<Subspace> = if exhaustive {
            let mut set: HashSet<Subspace> = HashSet::new();
            let mut chunk: Vec<Vec<u64>> = Vec::with_capacity(4096);
            let flush = |chunk: &mut Vec<Vec<u64>>, set: &mut HashSet<Subspace>| {
                let found: Vec<Subspace> = chunk
                    .par_iter()
                    .map(|x| self.cyclic_ideal(side, x))
                    .collect();
                set.extend(found);
                chunk.clear();
            };
            for_each_projective_point(p, n, |v| {
                chunk.push(v.to_vec());
                if chunk.len() == 4096 {
                    flush(&mut chunk, &mut set);
                }
                true
            });
            flush(&mut chunk, &mut set);
            set.into_iter().collect()
        } else {
            let mut rng = config.rng(0x1dea1 + side as u64);
            let mut gens: Vec<Vec<u64>> = (0..n).map(|i| unit_vector(n, i)).collect();
            for _ in 0..config.samples {
                gens.push((0..n).map(|_| rng.gen_range(0..p)).collect());
            }
            let set: HashSet<Subspace> = gens.iter().map(|x| self.cyclic_ideal(side, x)).collect();
            set.into_iter().collect()
        };
        let mut cyclic = cyclic;
        sort_subspaces(&mut cyclic);

        let mut all: HashSet<Subspace> = cyclic.iter().cloned().collect();
        all.insert(self.zero_space());
        all.insert(self.full_space());
        let mut frontier: Vec<Subspace> = cyclic.clone();
        'grow: while let Some(ideal) = frontier.pop() {
            for c in &cyclic {
                if c.is_subspace_of(&ideal).expect("ambient") {
                    continue;
                }
                let sum = ideal.sum(c).expect("ambient");
                if all.insert(sum.clone()) {
                    frontier.push(sum);
                    if all.len() > config.max_ideals {
                        exhaustive = false;
                        break 'grow;
                    }
                }
            }
        }
        let mut ideals: Vec<Subspace> = all.into_iter().collect();
        sort_subspaces(&mut ideals);
        IdealLattice {
            side,
            ideals,
            exhaustive,
        }
    }
}

/// `a1 ⊕ a2` with block-diagonal structure constants; the first summand
/// occupies coordinates `0..dim(a1)`.
#[derive(Clone, Debug)]
pub struct DirectSum {
    pub algebra: AlgebraPresentation,
    pub first_dim: usize,
    pub second_dim: usize,
}

impl DirectSum {
    pub fn inject_first(&self, coords: &[u64]) -> Vec<u64> {
        let mut v = coords.to_vec();
        v.resize(self.first_dim + self.second_dim, 0);
        v
    }

    pub fn inject_second(&self, coords: &[u64]) -> Vec<u64> {
        let mut v = vec![0; self.first_dim];
        v.extend_from_slice(coords);
        v
    }

    /// Central idempotents `(1, 0)` and `(0, 1)`.
    pub fn idempotents(&self, a1: &AlgebraPresentation, a2: &AlgebraPresentation) -> [Vec<u64>; 2] {
        [self.inject_first(a1.unit()), self.inject_second(a2.unit())]
    }
}

pub fn direct_sum(a1: &AlgebraPresentation, a2: &AlgebraPresentation) -> Result<DirectSum> {
    if a1.p() != a2.p() {
        return Err(Error::ModulusMismatch(a1.p(), a2.p()));
    }
    let n1 = a1.dim();
    let n2 = a2.dim();
    let clash = a1.names().iter().any(|x| a2.names().contains(x));
    let names: Vec<String> = if clash {
        a1.names()
            .iter()
            .map(|s| format!("{}_1", s))
            .chain(a2.names().iter().map(|s| format!("{}_2", s)))
            .collect()
    } else {
        a1.names().iter().chain(a2.names()).cloned().collect()
    };
    let mut unit = a1.unit().to_vec();
    unit.extend_from_slice(a2.unit());
    let algebra = AlgebraPresentation::from_products(a1.p(), names, unit, |i, j| {
        let mut v = vec![0u64; n1 + n2];
        if i < n1 && j < n1 {
            v[..n1].copy_from_slice(&a1.basis_product(i, j));
        } else if i >= n1 && j >= n1 {
            v[n1..].copy_from_slice(&a2.basis_product(i - n1, j - n1));
        }
        v
    })?;
    Ok(DirectSum {
        algebra,
        first_dim: n1,
        second_dim: n2,
    })
}

/// Convenience: elements from coordinate rows of an algebra handle.
pub fn elements(alg: &Arc<AlgebraPresentation>, rows: &[Vec<u64>]) -> Result<Vec<AlgebraElement>> {
    rows.iter().map(|r| alg.element(r.clone())).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::models::{matrix_algebra, truncated_poly_deg, upper_triangular};

    fn idx(a: &AlgebraPresentation, name: &str) -> Vec<u64> {
        unit_vector(a.dim(), a.index_of(name).unwrap())
    }

    #[test]
    fn annihilators_in_triangular() {
        let t = upper_triangular(2, 2).unwrap();
        let s = t.span(&[idx(&t, "e12")]);
        let l = t.left_annihilator(&s).unwrap();
        assert_eq!(l, t.span(&[idx(&t, "e12"), idx(&t, "e22")]));
        let r = t.right_annihilator(&s).unwrap();
        assert_eq!(r, t.span(&[idx(&t, "e11"), idx(&t, "e12")]));
    }

    #[test]
    fn annihilator_of_whole_simple_algebra_is_zero() {
        let m = matrix_algebra(2, 2).unwrap();
        assert!(m.left_annihilator(&m.full_space()).unwrap().is_zero());
        assert!(m.right_annihilator(&m.full_space()).unwrap().is_zero());
    }

    #[test]
    fn truncated_annihilator_of_t() {
        let a = truncated_poly_deg(2, 2).unwrap();
        let s = a.span(&[vec![0, 1]]);
        assert_eq!(a.left_annihilator(&s).unwrap(), s);
    }

    #[test]
    fn generated_ideals() {
        let t = Arc::new(upper_triangular(2, 2).unwrap());
        let e12 = t.element(idx(&t, "e12")).unwrap();
        assert_eq!(
            t.generated_right_ideal(&[e12]).unwrap(),
            t.span(&[idx(&t, "e12")])
        );
        assert!(t.generated_left_ideal(&[t.one()]).unwrap().is_full());
        let m = Arc::new(matrix_algebra(2, 3).unwrap());
        for i in 0..4 {
            assert!(m.generated_ideal(&[m.basis_element(i)]).unwrap().is_full());
        }
        let other = Arc::new(matrix_algebra(2, 2).unwrap());
        assert_eq!(
            m.generated_ideal(&[other.one()]),
            Err(Error::ParentMismatch)
        );
    }

    #[test]
    fn centralizers_and_centers() {
        let m3 = matrix_algebra(2, 3).unwrap();
        assert_eq!(m3.center(), m3.span(&[m3.unit().to_vec()]));
        let m = matrix_algebra(2, 2).unwrap();
        let one = m.span(&[m.unit().to_vec()]);
        assert!(m.centralizer(&one).unwrap().is_full());
        let c = m.centralizer(&m.span(&[idx(&m, "e12")])).unwrap();
        assert_eq!(c, m.span(&[m.unit().to_vec(), idx(&m, "e12")]));
    }

    #[test]
    fn direct_sum_blocks() {
        let m = matrix_algebra(2, 2).unwrap();
        let f = truncated_poly_deg(2, 1).unwrap();
        let s = direct_sum(&m, &f).unwrap();
        assert_eq!(s.algebra.dim(), 5);
        assert_eq!(s.algebra.center().dim(), 2);
        let x = s.inject_first(&idx(&m, "e11"));
        let y = s.inject_second(&[1]);
        assert_eq!(s.algebra.mul_coords(&x, &y), vec![0; 5]);
        assert_eq!(
            direct_sum(&m, &matrix_algebra(1, 3).unwrap()).unwrap_err(),
            Error::ModulusMismatch(2, 3)
        );
    }

    #[test]
    fn ideal_lattices_of_small_algebras() {
        let cfg = SearchConfig::default();
        let m = matrix_algebra(2, 2).unwrap();
        let lat = m.one_sided_ideals(Side::Right, &cfg);
        assert!(lat.exhaustive);
        // 0, whole, and one row space per point of the projective line
        assert_eq!(lat.ideals.len(), 5);
        for i in &lat.ideals {
            assert!(m.is_right_ideal(i).unwrap());
        }
        let t = upper_triangular(2, 2).unwrap();
        let lat = t.one_sided_ideals(Side::Right, &cfg);
        assert!(lat.ideals.contains(&t.span(&[idx(&t, "e12")])));
    }

    #[test]
    fn subalgebra_presentation_of_diagonal() {
        let m = matrix_algebra(2, 3).unwrap();
        let diag = m.subalgebra_generated(&m.span(&[idx(&m, "e11")])).unwrap();
        assert_eq!(diag.dim(), 2);
        let sub = m.subalgebra_presentation(&diag).unwrap();
        assert!(sub.is_commutative());
        assert!(m
            .subalgebra_presentation(&m.span(&[idx(&m, "e12")]))
            .is_err());
    }
}
