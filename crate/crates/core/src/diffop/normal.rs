use std::sync::Arc;

use serde::Serialize;

use crate::envelope::CorrectWord;
use crate::error::{Error, Result};

use super::context::DiffContext;
use super::expr::{DiffOpExpr, Factor, OpTerm};

/// `Right` is `sum M_w w` (multiplications first, then the word);
/// `Left` is `sum w M_w`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Orientation {
    Right,
    Left,
}

/// Per correct word, a tensor in `B (x) B`; `l (x) r` acts as `x -> l x r`.
pub(crate) type Op = Vec<Vec<u64>>;

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct NormalForm {
    pub orientation: Orientation,
    pub b_dim: usize,
    /// `terms[word index][a * b_dim + b]` is the coefficient of `b_a (x) b_b`.
    pub terms: Vec<Vec<u64>>,
}

impl NormalForm {
    pub fn is_zero(&self) -> bool {
        self.terms.iter().all(|t| t.iter().all(|&c| c == 0))
    }

    /// Number of nonzero `(word, a, b)` coefficients.
    pub fn support(&self) -> usize {
        self.terms.iter().map(|t| t.iter().filter(|&&c| c != 0).count()).sum()
    }
}

fn zero_op(ctx: &DiffContext) -> Op {
    vec![vec![0u64; ctx.tensor_len()]; ctx.words.len()]
}

fn add_scaled(acc: &mut Op, other: &Op, c: u64, p: u64) {
    if c == 0 {
        return;
    }
    for (a, o) in acc.iter_mut().zip(other) {
        for (x, &y) in a.iter_mut().zip(o) {
            if y != 0 {
                *x = (*x + c * y) % p;
            }
        }
    }
}

fn add_tensor(acc: &mut [u64], t: &[u64], c: u64, p: u64) {
    for (x, &y) in acc.iter_mut().zip(t) {
        if y != 0 {
            *x = (*x + c * y) % p;
        }
    }
}

fn single(ctx: &DiffContext, word: usize, t: Vec<u64>) -> Op {
    let mut op = zero_op(ctx);
    op[word] = t;
    op
}

fn word_with(w: &CorrectWord, i: usize, delta: i32) -> CorrectWord {
    let mut e = w.exponents.clone();
    e[i] = (e[i] as i32 + delta) as u8;
    CorrectWord { exponents: e }
}

fn word_without(w: &CorrectWord, i: usize) -> CorrectWord {
    let mut e = w.exponents.clone();
    e[i] = 0;
    CorrectWord { exponents: e }
}

impl DiffContext {
    fn word_index(&self, w: &CorrectWord) -> usize {
        w.index(self.p())
    }

    /// Right: `w mu_i`. Left: `mu_i w`.
    fn word_mu(&self, o: Orientation, w: usize, i: usize) -> Arc<Op> {
        let slot = DiffContext::memo_index(o);
        if let Some(hit) = self.memo_mu[slot].lock().expect("memo").get(&(w, i)) {
            return hit.clone();
        }
        let op = Arc::new(self.word_mu_uncached(o, w, i));
        self.memo_mu[slot].lock().expect("memo").insert((w, i), op.clone());
        op
    }

    fn word_mu_uncached(&self, o: Orientation, w: usize, i: usize) -> Op {
        let p = self.p();
        let word = &self.words[w];
        let s = &word.exponents;
        let end = match o {
            Orientation::Right => s.iter().rposition(|&x| x > 0),
            Orientation::Left => s.iter().position(|&x| x > 0),
        };
        let outside = match (o, end) {
            (_, None) => true,
            (Orientation::Right, Some(j)) => i > j,
            (Orientation::Left, Some(j)) => i < j,
        };
        if outside || (end == Some(i) && (s[i] as u64) + 1 < p) {
            let next = word_with(word, i, 1);
            return single(self, self.word_index(&next), self.unit_tensor());
        }
        let j = end.expect("nonempty word");
        let (rest, cert) = if i == j {
            (word_without(word, i), &self.powers[i])
        } else {
            let cert = match o {
                // w'' mu_j mu_i = w'' mu_i mu_j + w'' [mu_j, mu_i]
                Orientation::Right => &self.brackets[j][i],
                // mu_i mu_j w'' = mu_j mu_i w'' + [mu_i, mu_j] w''
                Orientation::Left => &self.brackets[i][j],
            };
            (word_with(word, j, -1), cert)
        };
        let r = self.word_index(&rest);
        let mut out = if i == j {
            zero_op(self)
        } else {
            let swapped = self.word_mu(o, r, i);
            self.attach_mu(o, &swapped, j)
        };
        for (k, &c) in cert.c.iter().enumerate() {
            if c != 0 {
                add_scaled(&mut out, &self.word_mu(o, r, k), c, p);
            }
        }
        let bt = self.inner_tensor(&cert.b);
        add_scaled(&mut out, &self.word_mult(o, r, &bt), 1, p);
        out
    }

    /// Right: `w N`. Left: `N w`. Linear in `N`.
    fn word_mult(&self, o: Orientation, w: usize, n: &[u64]) -> Op {
        let p = self.p();
        let mut out = zero_op(self);
        for (t, &c) in n.iter().enumerate() {
            if c != 0 {
                add_scaled(&mut out, &self.word_mult_basis(o, w, t), c, p);
            }
        }
        out
    }

    fn word_mult_basis(&self, o: Orientation, w: usize, t: usize) -> Arc<Op> {
        let slot = DiffContext::memo_index(o);
        if let Some(hit) = self.memo_mult[slot].lock().expect("memo").get(&(w, t)) {
            return hit.clone();
        }
        let mut n = vec![0u64; self.tensor_len()];
        n[t] = 1;
        let op = Arc::new(self.word_mult_uncached(o, w, &n));
        self.memo_mult[slot].lock().expect("memo").insert((w, t), op.clone());
        op
    }

    fn word_mult_uncached(&self, o: Orientation, w: usize, n: &[u64]) -> Op {
        let p = self.p();
        let word = &self.words[w];
        let s = &word.exponents;
        let end = match o {
            Orientation::Right => s.iter().rposition(|&x| x > 0),
            Orientation::Left => s.iter().position(|&x| x > 0),
        };
        let Some(j) = end else {
            return single(self, w, n.to_vec());
        };
        let rest = self.word_index(&word_with(word, j, -1));
        let dn = self.derive_tensor(j, n);
        match o {
            // w'' mu_j N = (w'' N) mu_j - w'' D_j(N)
            Orientation::Right => {
                let mut out = self.attach_mu(o, &self.word_mult(o, rest, n), j);
                add_scaled(&mut out, &self.word_mult(o, rest, &dn), p - 1, p);
                out
            }
            // N mu_j w'' = mu_j (N w'') + D_j(N) w''
            Orientation::Left => {
                let mut out = self.attach_mu(o, &self.word_mult(o, rest, n), j);
                add_scaled(&mut out, &self.word_mult(o, rest, &dn), 1, p);
                out
            }
        }
    }

    /// Right: `op mu_i`. Left: `mu_i op`.
    fn attach_mu(&self, o: Orientation, op: &Op, i: usize) -> Op {
        let p = self.p();
        let mut out = zero_op(self);
        for (w, m) in op.iter().enumerate() {
            if m.iter().all(|&c| c == 0) {
                continue;
            }
            let moved = self.word_mu(o, w, i);
            self.absorb(o, &mut out, m, &moved, p);
        }
        out
    }

    /// Right: `op N`. Left: `N op`.
    fn attach_mult(&self, o: Orientation, op: &Op, n: &[u64]) -> Op {
        let p = self.p();
        let mut out = zero_op(self);
        for (w, m) in op.iter().enumerate() {
            if m.iter().all(|&c| c == 0) {
                continue;
            }
            let moved = self.word_mult(o, w, n);
            self.absorb(o, &mut out, m, &moved, p);
        }
        out
    }

    /// Adds `M (sum M'_g g)` (right) or `(sum g M'_g) M` (left) to `out`.
    fn absorb(&self, o: Orientation, out: &mut Op, m: &[u64], moved: &Op, p: u64) {
        for (g, mp) in moved.iter().enumerate() {
            if mp.iter().all(|&c| c == 0) {
                continue;
            }
            let t = match o {
                Orientation::Right => self.compose_tensors(m, mp),
                Orientation::Left => self.compose_tensors(mp, m),
            };
            add_tensor(&mut out[g], &t, 1, p);
        }
    }

    fn factor_tensor(&self, f: &Factor) -> Result<Vec<u64>> {
        let p = self.p();
        let u = self.inner.b_alg.unit().to_vec();
        let coords = |a: &[u64]| {
            self.inner
                .restrict(a)
                .ok_or_else(|| Error::invalid(format!("coefficient {} is not in B(L)", self.alg.format_coords(a))))
        };
        Ok(match f {
            Factor::Left(a) => super::context::outer_product(&coords(a)?, &u, p),
            Factor::Right(b) => super::context::outer_product(&u, &coords(b)?, p),
            Factor::Mu(..) => unreachable!(),
        })
    }

    fn check_expr(&self, e: &DiffOpExpr) -> Result<()> {
        let n = self.alg.dim();
        for t in &e.terms {
            for f in &t.factors {
                match f {
                    Factor::Left(a) | Factor::Right(a) if a.len() != n => {
                        return Err(Error::ShapeMismatch(format!("coefficient with {} coordinates, model has {}", a.len(), n)))
                    }
                    Factor::Mu(i, _) if *i >= self.m() => {
                        return Err(Error::invalid(format!("generator m{} outside 1..{}", i + 1, self.m())))
                    }
                    _ => {}
                }
            }
        }
        Ok(())
    }

    /// Normal form with respect to the correct words and the certificates.
    pub fn normalize(&self, e: &DiffOpExpr, o: Orientation) -> Result<NormalForm> {
        self.check_expr(e)?;
        let p = self.p();
        let mut total = zero_op(self);
        for term in &e.terms {
            if term.coeff % p == 0 {
                continue;
            }
            let mut op = single(self, 0, self.unit_tensor());
            let apply = |op: Op, f: &Factor| -> Result<Op> {
                Ok(match f {
                    Factor::Mu(i, k) => {
                        let mut cur = op;
                        for _ in 0..*k {
                            cur = self.attach_mu(o, &cur, *i);
                        }
                        cur
                    }
                    _ => self.attach_mult(o, &op, &self.factor_tensor(f)?),
                })
            };
            match o {
                Orientation::Right => {
                    for f in &term.factors {
                        op = apply(op, f)?;
                    }
                }
                Orientation::Left => {
                    for f in term.factors.iter().rev() {
                        op = apply(op, f)?;
                    }
                }
            }
            add_scaled(&mut total, &op, term.coeff % p, p);
        }
        Ok(NormalForm {
            orientation: o,
            b_dim: self.b_dim(),
            terms: total,
        })
    }

    /// The normal form written back as an expression; normalizing it in the
    /// same orientation returns the same normal form.
    pub fn to_expr(&self, nf: &NormalForm) -> DiffOpExpr {
        let d = nf.b_dim;
        let mut terms = Vec::new();
        for (w, t) in nf.terms.iter().enumerate() {
            let word: Vec<Factor> = self.words[w]
                .exponents
                .iter()
                .enumerate()
                .filter(|(_, &s)| s > 0)
                .map(|(i, &s)| Factor::Mu(i, s as u32))
                .collect();
            for (ab, &c) in t.iter().enumerate() {
                if c == 0 {
                    continue;
                }
                let l = self.inner.embed(&crate::algebra::unit_vector(d, ab / d));
                let r = self.inner.embed(&crate::algebra::unit_vector(d, ab % d));
                let mut factors = Vec::new();
                match nf.orientation {
                    Orientation::Right => {
                        factors.push(Factor::Right(r));
                        factors.push(Factor::Left(l));
                        factors.extend(word.iter().cloned());
                    }
                    Orientation::Left => {
                        factors.extend(word.iter().cloned());
                        factors.push(Factor::Left(l));
                        factors.push(Factor::Right(r));
                    }
                }
                terms.push(OpTerm { coeff: c, factors });
            }
        }
        DiffOpExpr { terms }
    }

    fn apply_word(&self, x: &[u64], w: &CorrectWord) -> Vec<u64> {
        let mut cur = x.to_vec();
        for l in w.letters() {
            cur = self.mus[l as usize].apply(&cur);
        }
        cur
    }

    /// Action of a normal form on a model element.
    pub fn evaluate(&self, nf: &NormalForm, x: &[u64]) -> Result<Vec<u64>> {
        let n = self.alg.dim();
        if x.len() != n {
            return Err(Error::ShapeMismatch(format!("element with {} coordinates, model has {}", x.len(), n)));
        }
        if nf.b_dim != self.b_dim() || nf.terms.len() != self.words.len() {
            return Err(Error::ShapeMismatch("normal form from another context".into()));
        }
        let p = self.p();
        let d = self.b_dim();
        let basis = self.inner.b.basis_vectors();
        let mut out = vec![0u64; n];
        for (w, t) in nf.terms.iter().enumerate() {
            if t.iter().all(|&c| c == 0) {
                continue;
            }
            let inner_x = match nf.orientation {
                Orientation::Right => x.to_vec(),
                Orientation::Left => self.apply_word(x, &self.words[w]),
            };
            let mut acc = vec![0u64; n];
            for (ab, &c) in t.iter().enumerate() {
                if c == 0 {
                    continue;
                }
                let v = self.alg.mul_coords(&self.alg.mul_coords(&basis[ab / d], &inner_x), &basis[ab % d]);
                add_tensor(&mut acc, &v, c, p);
            }
            let v = match nf.orientation {
                Orientation::Right => self.apply_word(&acc, &self.words[w]),
                Orientation::Left => acc,
            };
            add_tensor(&mut out, &v, 1, p);
        }
        Ok(out)
    }

    /// Direct action of an expression, factor by factor from left to right.
    pub fn evaluate_expr(&self, e: &DiffOpExpr, x: &[u64]) -> Result<Vec<u64>> {
        self.check_expr(e)?;
        let n = self.alg.dim();
        if x.len() != n {
            return Err(Error::ShapeMismatch(format!("element with {} coordinates, model has {}", x.len(), n)));
        }
        let p = self.p();
        let mut out = vec![0u64; n];
        for term in &e.terms {
            let mut cur = x.to_vec();
            for f in &term.factors {
                cur = match f {
                    Factor::Left(a) => self.alg.mul_coords(a, &cur),
                    Factor::Right(b) => self.alg.mul_coords(&cur, b),
                    Factor::Mu(i, k) => {
                        for _ in 0..*k {
                            cur = self.mus[*i].apply(&cur);
                        }
                        cur
                    }
                };
            }
            add_tensor(&mut out, &cur, term.coeff % p, p);
        }
        Ok(out)
    }

    /// Full action matrix of a normal form (row `i` is the image of `e_i`).
    pub fn action_matrix(&self, nf: &NormalForm) -> Result<crate::linalg::FpMatrix> {
        let n = self.alg.dim();
        let rows = (0..n)
            .map(|i| self.evaluate(nf, &crate::algebra::unit_vector(n, i)))
            .collect::<Result<Vec<_>>>()?;
        Ok(crate::linalg::FpMatrix::from_row_vectors(self.p(), n, &rows))
    }
}
