//! Restricted enveloping algebras on correct-word bases, Berkson's functional
//! and the top annihilator element.

use std::collections::HashMap;
use std::sync::Mutex;

use rand::seq::SliceRandom;
use rand::Rng;
use serde::Serialize;

use crate::algebra::{AlgebraPresentation, Side};
use crate::config::SearchConfig;
use crate::error::{Error, Result};
use crate::format::LieSpec;
use crate::frobenius::functional_gram;
use crate::linalg::scalar;

/// A restricted Lie algebra on generators `m_1..m_m` given by structure
/// constants of the bracket and the p-map on the basis.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RestrictedLiePresentation {
    p: u64,
    m: usize,
    /// `brackets[i][j]` = coordinates of `[m_i, m_j]`.
    brackets: Vec<Vec<Vec<u64>>>,
    /// `pmap[i]` = coordinates of `m_i^[p]`.
    pmap: Vec<Vec<u64>>,
}

impl RestrictedLiePresentation {
    pub fn new(p: u64, brackets: Vec<Vec<Vec<u64>>>, pmap: Vec<Vec<u64>>) -> Result<Self> {
        scalar::check_modulus(p)?;
        let m = pmap.len();
        if brackets.len() != m
            || brackets.iter().any(|r| r.len() != m || r.iter().any(|c| c.len() != m))
            || pmap.iter().any(|c| c.len() != m)
        {
            return Err(Error::ShapeMismatch(format!(
                "bracket and p-map tables must be sized for {} generators",
                m
            )));
        }
        let reduce = |v: &Vec<u64>| v.iter().map(|&x| x % p).collect::<Vec<u64>>();
        let lp = RestrictedLiePresentation {
            p,
            m,
            brackets: brackets.iter().map(|r| r.iter().map(reduce).collect()).collect(),
            pmap: pmap.iter().map(reduce).collect(),
        };
        lp.validate()?;
        Ok(lp)
    }

    /// Abelian algebra with the given p-map (zero when `None`).
    pub fn abelian(p: u64, m: usize, pmap: Option<Vec<Vec<u64>>>) -> Result<Self> {
        Self::new(
            p,
            vec![vec![vec![0; m]; m]; m],
            pmap.unwrap_or_else(|| vec![vec![0; m]; m]),
        )
    }

    /// Build from file entries; a bracket given only for `(i, j)` is extended
    /// to `(j, i)` by antisymmetry.
    pub fn from_spec(p: u64, spec: &LieSpec) -> Result<Self> {
        let m = spec.m;
        let mut given = vec![vec![false; m]; m];
        let mut br = vec![vec![vec![0u64; m]; m]; m];
        for &(i, j, k, c) in &spec.brackets {
            br[i][j][k] = scalar::add(br[i][j][k], c % p, p);
            given[i][j] = true;
        }
        for i in 0..m {
            for j in 0..m {
                if given[i][j] && !given[j][i] {
                    br[j][i] = br[i][j].iter().map(|&c| scalar::neg(c, p)).collect();
                }
            }
        }
        let mut pm = vec![vec![0u64; m]; m];
        for &(i, k, c) in &spec.pmap {
            pm[i][k] = scalar::add(pm[i][k], c % p, p);
        }
        Self::new(p, br, pm)
    }

    pub fn to_spec(&self) -> LieSpec {
        let mut brackets = Vec::new();
        for i in 0..self.m {
            for j in i + 1..self.m {
                for (k, &c) in self.brackets[i][j].iter().enumerate() {
                    if c != 0 {
                        brackets.push((i, j, k, c));
                    }
                }
            }
        }
        let mut pmap = Vec::new();
        for i in 0..self.m {
            for (k, &c) in self.pmap[i].iter().enumerate() {
                if c != 0 {
                    pmap.push((i, k, c));
                }
            }
        }
        LieSpec {
            m: self.m,
            brackets,
            pmap,
        }
    }

    pub fn p(&self) -> u64 {
        self.p
    }

    pub fn dim(&self) -> usize {
        self.m
    }

    pub fn bracket_of(&self, i: usize, j: usize) -> &[u64] {
        &self.brackets[i][j]
    }

    pub fn pmap_of(&self, i: usize) -> &[u64] {
        &self.pmap[i]
    }

    pub fn is_abelian(&self) -> bool {
        self.brackets.iter().flatten().flatten().all(|&c| c == 0)
    }

    /// `[x, y]` on coordinate vectors.
    pub fn bracket(&self, x: &[u64], y: &[u64]) -> Vec<u64> {
        let p = self.p;
        let mut out = vec![0u64; self.m];
        for (i, &a) in x.iter().enumerate() {
            for (j, &b) in y.iter().enumerate() {
                if a == 0 || b == 0 {
                    continue;
                }
                let c0 = a * b % p;
                for (o, &c) in out.iter_mut().zip(&self.brackets[i][j]) {
                    *o = (*o + c0 * c) % p;
                }
            }
        }
        out
    }

    fn validate(&self) -> Result<()> {
        let m = self.m;
        let p = self.p;
        let unit = |i: usize| {
            let mut v = vec![0u64; m];
            v[i] = 1;
            v
        };
        for i in 0..m {
            if self.brackets[i][i].iter().any(|&c| c != 0) {
                return Err(Error::invalid(format!("[m{0}, m{0}] must vanish", i + 1)));
            }
            for j in 0..m {
                let neg: Vec<u64> = self.brackets[j][i].iter().map(|&c| scalar::neg(c, p)).collect();
                if self.brackets[i][j] != neg {
                    return Err(Error::invalid(format!(
                        "bracket is not antisymmetric at (m{}, m{})",
                        i + 1,
                        j + 1
                    )));
                }
            }
        }
        for i in 0..m {
            for j in 0..m {
                for k in 0..m {
                    let a = self.bracket(&self.brackets[i][j], &unit(k));
                    let b = self.bracket(&self.brackets[j][k], &unit(i));
                    let c = self.bracket(&self.brackets[k][i], &unit(j));
                    if (0..m).any(|t| (a[t] + b[t] + c[t]) % p != 0) {
                        return Err(Error::invalid(format!(
                            "Jacobi identity fails at (m{}, m{}, m{})",
                            i + 1,
                            j + 1,
                            k + 1
                        )));
                    }
                }
            }
        }
        // ad(x^[p]) = ad(x)^p on basis elements
        for i in 0..m {
            for j in 0..m {
                let mut y = unit(j);
                for _ in 0..p {
                    y = self.bracket(&unit(i), &y);
                }
                if self.bracket(&self.pmap[i], &unit(j)) != y {
                    return Err(Error::invalid(format!(
                        "p-map of m{} is incompatible with the bracket (acting on m{})",
                        i + 1,
                        j + 1
                    )));
                }
            }
        }
        Ok(())
    }
}

/// `m_1^s_1 ... m_m^s_m` with every `s_i < p`; the derived order is the
/// lexicographic order on exponent vectors.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub struct CorrectWord {
    pub exponents: Vec<u8>,
}

impl CorrectWord {
    /// Mixed-radix index `sum s_i p^(m-i)`; the empty word is 0 and the top word is last.
    pub fn index(&self, p: u64) -> usize {
        self.exponents
            .iter()
            .fold(0usize, |acc, &s| acc * p as usize + s as usize)
    }

    pub fn from_index(p: u64, m: usize, mut idx: usize) -> Self {
        let mut exponents = vec![0u8; m];
        for slot in exponents.iter_mut().rev() {
            *slot = (idx % p as usize) as u8;
            idx /= p as usize;
        }
        CorrectWord { exponents }
    }

    pub fn all(p: u64, m: usize) -> Vec<CorrectWord> {
        (0..word_count(p, m)).map(|i| Self::from_index(p, m, i)).collect()
    }

    pub fn degree(&self) -> usize {
        self.exponents.iter().map(|&s| s as usize).sum()
    }

    pub fn is_empty_word(&self) -> bool {
        self.exponents.iter().all(|&s| s == 0)
    }

    /// Generator sequence, e.g. `m1^2 m2` is `[0, 0, 1]`.
    pub fn letters(&self) -> Vec<u8> {
        let mut out = Vec::new();
        for (i, &s) in self.exponents.iter().enumerate() {
            out.extend(std::iter::repeat(i as u8).take(s as usize));
        }
        out
    }

    pub fn name(&self) -> String {
        if self.is_empty_word() {
            return "1".to_string();
        }
        let parts: Vec<String> = self
            .exponents
            .iter()
            .enumerate()
            .filter(|(_, &s)| s > 0)
            .map(|(i, &s)| {
                if s == 1 {
                    format!("m{}", i + 1)
                } else {
                    format!("m{}^{}", i + 1, s)
                }
            })
            .collect();
        parts.join("*")
    }
}

pub fn word_count(p: u64, m: usize) -> usize {
    (p as usize).pow(m as u32)
}

/// Rewrites arbitrary generator sequences into combinations of correct words.
pub struct Straightener<'a> {
    lie: &'a RestrictedLiePresentation,
    memo: Mutex<HashMap<Vec<u8>, Vec<u64>>>,
}

enum Violation {
    /// `m_i m_j` with `i > j` at this position.
    Swap(usize),
    /// `p` equal letters starting here.
    Power(usize),
}

impl<'a> Straightener<'a> {
    pub fn new(lie: &'a RestrictedLiePresentation) -> Self {
        Straightener {
            lie,
            memo: Mutex::new(HashMap::new()),
        }
    }

    fn violations(&self, w: &[u8]) -> Vec<Violation> {
        let p = self.lie.p as usize;
        let mut out = Vec::new();
        for t in 0..w.len().saturating_sub(1) {
            if w[t] > w[t + 1] {
                out.push(Violation::Swap(t));
            }
        }
        for t in 0..w.len() {
            if t + p <= w.len() && w[t..t + p].iter().all(|&c| c == w[t]) {
                out.push(Violation::Power(t));
            }
        }
        out
    }

    fn correct_index(&self, w: &[u8]) -> usize {
        let mut exps = vec![0u8; self.lie.m];
        for &c in w {
            exps[c as usize] += 1;
        }
        CorrectWord { exponents: exps }.index(self.lie.p)
    }

    /// Apply one rewrite and return the resulting `(coefficient, word)` terms.
    fn rewrite(&self, w: &[u8], v: &Violation) -> Vec<(u64, Vec<u8>)> {
        let p = self.lie.p;
        let mut out = Vec::new();
        match *v {
            Violation::Swap(t) => {
                let (i, j) = (w[t] as usize, w[t + 1] as usize);
                let mut swapped = w.to_vec();
                swapped.swap(t, t + 1);
                out.push((1, swapped));
                // m_i m_j = m_j m_i + [m_i, m_j]
                for (k, &c) in self.lie.brackets[i][j].iter().enumerate() {
                    if c != 0 {
                        let mut nw = w[..t].to_vec();
                        nw.push(k as u8);
                        nw.extend_from_slice(&w[t + 2..]);
                        out.push((c, nw));
                    }
                }
            }
            Violation::Power(t) => {
                let i = w[t] as usize;
                for (k, &c) in self.lie.pmap[i].iter().enumerate() {
                    if c != 0 {
                        let mut nw = w[..t].to_vec();
                        nw.push(k as u8);
                        nw.extend_from_slice(&w[t + p as usize..]);
                        out.push((c, nw));
                    }
                }
            }
        }
        out
    }

    /// Coefficients over the correct-word basis, always rewriting the leftmost violation.
    pub fn straighten(&self, w: &[u8]) -> Vec<u64> {
        if let Some(v) = self.memo.lock().expect("memo").get(w) {
            return v.clone();
        }
        let p = self.lie.p;
        let mut out = vec![0u64; word_count(p, self.lie.m)];
        let vs = self.violations(w);
        let first = vs.into_iter().min_by_key(|v| match *v {
            Violation::Swap(t) | Violation::Power(t) => t,
        });
        match first {
            None => out[self.correct_index(w)] = 1,
            Some(v) => {
                for (c, nw) in self.rewrite(w, &v) {
                    let sub = self.straighten(&nw);
                    for (o, s) in out.iter_mut().zip(sub) {
                        *o = (*o + c * s) % p;
                    }
                }
            }
        }
        self.memo.lock().expect("memo").insert(w.to_vec(), out.clone());
        out
    }

    /// Same normal form, rewriting a randomly chosen violation at every step.
    pub fn straighten_random(&self, w: &[u8], rng: &mut impl Rng) -> Vec<u64> {
        let p = self.lie.p;
        let mut out = vec![0u64; word_count(p, self.lie.m)];
        let vs = self.violations(w);
        match vs.choose(rng) {
            None => out[self.correct_index(w)] = 1,
            Some(v) => {
                for (c, nw) in self.rewrite(w, v) {
                    let sub = self.straighten_random(&nw, rng);
                    for (o, s) in out.iter_mut().zip(sub) {
                        *o = (*o + c * s) % p;
                    }
                }
            }
        }
        out
    }
}

/// `u_p` of a restricted Lie algebra on the correct-word basis.
#[derive(Clone, Debug)]
pub struct EnvelopeAlgebra {
    pub lie: RestrictedLiePresentation,
    pub words: Vec<CorrectWord>,
    pub algebra: AlgebraPresentation,
}

impl EnvelopeAlgebra {
    pub fn dim(&self) -> usize {
        self.words.len()
    }

    pub fn top_index(&self) -> usize {
        self.words.len() - 1
    }

    /// Coordinates of the generator `m_i`.
    pub fn generator(&self, i: usize) -> Vec<u64> {
        let mut e = vec![0u8; self.lie.m];
        e[i] = 1;
        let mut v = vec![0u64; self.dim()];
        v[CorrectWord { exponents: e }.index(self.lie.p)] = 1;
        v
    }
}

/// Structure constants of `u_p` by straightening products of correct words;
/// the result passes the associativity audit or the presentation is rejected.
pub fn build_envelope(lie: &RestrictedLiePresentation) -> Result<EnvelopeAlgebra> {
    let p = lie.p;
    let m = lie.m;
    if word_count(p, m) > 4096 {
        return Err(Error::invalid("envelope dimension exceeds 4096"));
    }
    let words = CorrectWord::all(p, m);
    let st = Straightener::new(lie);
    let letters: Vec<Vec<u8>> = words.iter().map(|w| w.letters()).collect();
    let names = words.iter().map(|w| w.name()).collect();
    let mut unit = vec![0u64; words.len()];
    unit[0] = 1;
    let algebra = AlgebraPresentation::from_products(p, names, unit, |i, j| {
        let mut w = letters[i].clone();
        w.extend_from_slice(&letters[j]);
        st.straighten(&w)
    })
    .map_err(|e| Error::invalid(format!("inconsistent restricted Lie presentation: {}", e)))?;
    Ok(EnvelopeAlgebra {
        lie: lie.clone(),
        words,
        algebra,
    })
}

/// Berkson's functional: the coefficient of the top word `m_1^(p-1) ... m_m^(p-1)`.
pub fn berkson_functional(e: &EnvelopeAlgebra) -> Vec<u64> {
    let mut phi = vec![0u64; e.dim()];
    phi[e.top_index()] = 1;
    phi
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct FrobeniusKernelVerdict {
    pub holds: bool,
    /// Every complementary product `D D'` has top coefficient 1.
    pub complementary_products: bool,
    /// The Gram matrix `phi(xy)` is invertible.
    pub gram_nondegenerate: bool,
    /// "exhaustive" when every one-sided ideal was checked, else "witnessed".
    pub verdict: &'static str,
}

/// No nonzero one-sided ideal lies in the kernel of Berkson's functional.
pub fn verify_frobenius_kernel(e: &EnvelopeAlgebra, config: &SearchConfig) -> Result<FrobeniusKernelVerdict> {
    let p = e.lie.p;
    let a = &e.algebra;
    let top = e.top_index();
    let mut complementary = true;
    for (idx, w) in e.words.iter().enumerate() {
        let comp = CorrectWord {
            exponents: w.exponents.iter().map(|&s| (p - 1) as u8 - s).collect(),
        };
        let prod = a.basis_product(idx, comp.index(p));
        complementary &= prod[top] == 1;
    }
    let phi = berkson_functional(e);
    let gram_ok = functional_gram(a, &phi).is_invertible();
    let mut holds = complementary && gram_ok;
    let mut verdict = "witnessed";
    if config.fits(p, a.dim()) {
        let mut exhaustive = true;
        for side in [Side::Right, Side::Left] {
            let lattice = a.one_sided_ideals(side, config);
            exhaustive &= lattice.exhaustive;
            for ideal in lattice.ideals.iter().filter(|i| !i.is_zero()) {
                if ideal.basis_vectors().iter().all(|v| v[top] == 0) {
                    holds = false;
                }
            }
        }
        if exhaustive {
            verdict = "exhaustive";
        }
    }
    Ok(FrobeniusKernelVerdict {
        holds,
        complementary_products: complementary,
        gram_nondegenerate: gram_ok,
        verdict,
    })
}

/// The element spanning the left annihilator of the span of nonempty words.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct TopElement {
    /// Coordinates of `f` over correct words, leading coefficient 1.
    pub f: Vec<u64>,
    /// Coefficients `c_k` of `f = sum D_k c_k`.
    pub right_coeffs: Vec<u64>,
    /// Coefficients `c'_k` of `f = sum c'_k D_k`; scalars are central here.
    pub left_coeffs: Vec<u64>,
    pub annihilator_dim: usize,
}

pub fn top_annihilator_element(e: &EnvelopeAlgebra) -> Result<TopElement> {
    let a = &e.algebra;
    let n = e.dim();
    let p = e.lie.p;
    let nonempty: Vec<Vec<u64>> = (1..n).map(|i| crate::algebra::unit_vector(n, i)).collect();
    let u_hat = a.span(&nonempty);
    if !a.is_right_ideal(&u_hat)? {
        return Err(Error::violation("span of nonempty words is not a right ideal"));
    }
    let ann = a.left_annihilator(&u_hat)?;
    if ann.dim() != 1 {
        return Err(Error::violation(format!(
            "left annihilator of the nonempty words has dimension {}",
            ann.dim()
        )));
    }
    let mut f = ann.basis_vector(0).to_vec();
    crate::linalg::normalize_leading(&mut f, p);
    for i in 0..e.lie.m {
        if a.mul_coords(&f, &e.generator(i)).iter().any(|&c| c != 0) {
            return Err(Error::violation(format!("f m{} is not zero", i + 1)));
        }
    }
    Ok(TopElement {
        right_coeffs: f.clone(),
        left_coeffs: f.clone(),
        f,
        annihilator_dim: 1,
    })
}
