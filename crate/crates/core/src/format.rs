//! The algebra file format: a TOML document with the structure constants and
//! optional `derivations`, `lie` and `scenario` sections.
//!
//! ```text
//! p = 2
//! dim = 2
//! names = ["1", "t"]
//! unit = [1, 0]
//! sc = [
//!   [0, 0, 0, 1],
//!   [0, 1, 1, 1],
//!   [1, 0, 1, 1],
//! ]
//!
//! [[derivations]]
//! name = "d"
//! matrix = [
//!   [0, 0],
//!   [1, 0],
//! ]
//! ```
//!
//! `[i, j, k, c]` in `sc` means `e_i e_j` contains `c e_k`. A derivation is
//! given either by its row-acting `matrix` (row `i` holds the image of `e_i`)
//! or as `inner = [coords]`, the map `x -> x a - a x`. The `lie` section holds
//! an abstract restricted Lie algebra: `brackets` entries `[i, j, k, c]` mean
//! `[m_i, m_j]` contains `c m_k`, `pmap` entries `[i, k, c]` mean `m_i^[p]`
//! contains `c m_k`.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use serde::Deserialize;
use toml::Spanned;

use crate::algebra::AlgebraPresentation;
use crate::error::{Error, Result};
use crate::linalg::{scalar, FpMatrix};

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum DerivationAction {
    Matrix(FpMatrix),
    Inner(Vec<u64>),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DerivationSpec {
    pub name: String,
    pub action: DerivationAction,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LieSpec {
    pub m: usize,
    pub brackets: Vec<(usize, usize, usize, u64)>,
    pub pmap: Vec<(usize, usize, u64)>,
}

#[derive(Clone, Debug, PartialEq, Eq, Deserialize, serde::Serialize)]
#[serde(untagged)]
pub enum Expected {
    Bool(bool),
    Int(i64),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ScenarioSpec {
    pub name: String,
    /// Optional spanning vectors of the designated inner part.
    pub inner: Vec<Vec<u64>>,
    pub expected: BTreeMap<String, Expected>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AlgebraFile {
    pub p: u64,
    pub algebra: Option<AlgebraPresentation>,
    pub derivations: Vec<DerivationSpec>,
    pub lie: Option<LieSpec>,
    pub scenario: Option<ScenarioSpec>,
}

impl AlgebraFile {
    pub fn from_algebra(algebra: AlgebraPresentation) -> Self {
        AlgebraFile {
            p: algebra.p(),
            algebra: Some(algebra),
            derivations: Vec::new(),
            lie: None,
            scenario: None,
        }
    }

    pub fn require_algebra(&self) -> Result<&AlgebraPresentation> {
        self.algebra
            .as_ref()
            .ok_or_else(|| Error::invalid("file has no algebra section (names, unit, sc)"))
    }
}

type Ints = Spanned<Vec<Spanned<Vec<i64>>>>;

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawFile {
    p: Spanned<i64>,
    dim: Option<Spanned<i64>>,
    names: Option<Spanned<Vec<String>>>,
    unit: Option<Spanned<Vec<i64>>>,
    sc: Option<Ints>,
    #[serde(default)]
    derivations: Vec<Spanned<RawDerivation>>,
    lie: Option<Spanned<RawLie>>,
    scenario: Option<Spanned<RawScenario>>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawDerivation {
    name: String,
    matrix: Option<Ints>,
    inner: Option<Spanned<Vec<i64>>>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawLie {
    m: Spanned<i64>,
    #[serde(default)]
    brackets: Option<Ints>,
    #[serde(default)]
    pmap: Option<Ints>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawScenario {
    name: String,
    inner: Option<Ints>,
    #[serde(default)]
    expected: BTreeMap<String, Expected>,
}

pub(crate) struct Locator<'a> {
    pub(crate) text: &'a str,
}

impl Locator<'_> {
    pub(crate) fn at(&self, offset: usize, message: impl Into<String>) -> Error {
        let offset = offset.min(self.text.len());
        let before = &self.text.as_bytes()[..offset];
        let line = before.iter().filter(|&&b| b == b'\n').count() + 1;
        let line_start = before.iter().rposition(|&b| b == b'\n').map_or(0, |i| i + 1);
        let column = String::from_utf8_lossy(&before[line_start..]).chars().count() + 1;
        Error::Parse {
            line,
            column,
            message: message.into(),
        }
    }

    fn span<T>(&self, s: &Spanned<T>, message: impl Into<String>) -> Error {
        self.at(s.span().start, message)
    }
}

fn reduce_row(row: &[i64], p: u64) -> Vec<u64> {
    row.iter().map(|&v| scalar::reduce(v, p)).collect()
}

fn index(loc: &Locator, s: &Spanned<Vec<i64>>, v: i64, bound: usize, what: &str) -> Result<usize> {
    if v < 0 || v as u64 >= bound as u64 {
        return Err(loc.span(s, format!("{} index {} outside 0..{}", what, v, bound)));
    }
    Ok(v as usize)
}

fn rows_of_width(loc: &Locator, rows: &Ints, width: usize, what: &str) -> Result<()> {
    for r in rows.get_ref() {
        if r.get_ref().len() != width {
            return Err(loc.span(
                r,
                format!("{} entry has {} values, expected {}", what, r.get_ref().len(), width),
            ));
        }
    }
    Ok(())
}

fn is_bare_key(k: &str) -> bool {
    !k.is_empty()
        && k
            .chars()
            .all(|c| c.is_ascii_alphanumeric() || c == '_' || c == '-')
}

/// Parse an algebra file. Errors carry the line and column of the offending value.
pub fn parse(text: &str) -> Result<AlgebraFile> {
    let loc = Locator { text };
    let raw: RawFile = toml::from_str(text).map_err(|e| {
        let offset = e.span().map_or(0, |s| s.start);
        loc.at(offset, e.message().to_string())
    })?;

    let p_val = *raw.p.get_ref();
    if p_val < 2 || !scalar::is_prime(p_val as u64) || p_val as u64 > scalar::MAX_MODULUS {
        return Err(loc.span(&raw.p, format!("p = {} is not a supported prime", p_val)));
    }
    let p = p_val as u64;

    let algebra = match &raw.names {
        None => {
            for (present, key) in [
                (raw.dim.is_some(), "dim"),
                (raw.unit.is_some(), "unit"),
                (raw.sc.is_some(), "sc"),
            ] {
                if present {
                    return Err(loc.at(0, format!("`{}` given without `names`", key)));
                }
            }
            None
        }
        Some(names) => Some(parse_algebra(&loc, p, &raw, names)?),
    };
    let n = algebra.as_ref().map(|a| a.dim());

    let mut derivations = Vec::new();
    for d in &raw.derivations {
        let n = n.ok_or_else(|| loc.span(d, "derivations need an algebra"))?;
        let rd = d.get_ref();
        if rd.name.is_empty() || derivations.iter().any(|x: &DerivationSpec| x.name == rd.name) {
            return Err(loc.span(d, format!("derivation name `{}` is empty or repeated", rd.name)));
        }
        let action = match (&rd.matrix, &rd.inner) {
            (Some(m), None) => {
                if m.get_ref().len() != n {
                    return Err(loc.span(m, format!("matrix needs {} rows", n)));
                }
                rows_of_width(&loc, m, n, "matrix")?;
                let rows: Vec<Vec<u64>> =
                    m.get_ref().iter().map(|r| reduce_row(r.get_ref(), p)).collect();
                DerivationAction::Matrix(FpMatrix::from_row_vectors(p, n, &rows))
            }
            (None, Some(v)) => {
                if v.get_ref().len() != n {
                    return Err(loc.span(v, format!("inner element needs {} coordinates", n)));
                }
                DerivationAction::Inner(reduce_row(v.get_ref(), p))
            }
            _ => {
                return Err(loc.span(d, "a derivation needs exactly one of `matrix` or `inner`"));
            }
        };
        derivations.push(DerivationSpec {
            name: rd.name.clone(),
            action,
        });
    }

    let lie = match &raw.lie {
        None => None,
        Some(l) => {
            let rl = l.get_ref();
            let m_val = *rl.m.get_ref();
            if !(1..=64).contains(&m_val) {
                return Err(loc.span(&rl.m, "m must lie in 1..=64"));
            }
            let m = m_val as usize;
            let mut brackets = Vec::new();
            if let Some(b) = &rl.brackets {
                rows_of_width(&loc, b, 4, "bracket")?;
                for e in b.get_ref() {
                    let v = e.get_ref();
                    brackets.push((
                        index(&loc, e, v[0], m, "generator")?,
                        index(&loc, e, v[1], m, "generator")?,
                        index(&loc, e, v[2], m, "generator")?,
                        scalar::reduce(v[3], p),
                    ));
                }
            }
            let mut pmap = Vec::new();
            if let Some(b) = &rl.pmap {
                rows_of_width(&loc, b, 3, "pmap")?;
                for e in b.get_ref() {
                    let v = e.get_ref();
                    pmap.push((
                        index(&loc, e, v[0], m, "generator")?,
                        index(&loc, e, v[1], m, "generator")?,
                        scalar::reduce(v[2], p),
                    ));
                }
            }
            Some(LieSpec { m, brackets, pmap })
        }
    };

    let scenario = match &raw.scenario {
        None => None,
        Some(s) => {
            let rs = s.get_ref();
            let mut inner = Vec::new();
            if let Some(rows) = &rs.inner {
                let n = n.ok_or_else(|| loc.span(rows, "scenario inner part needs an algebra"))?;
                rows_of_width(&loc, rows, n, "inner")?;
                inner = rows.get_ref().iter().map(|r| reduce_row(r.get_ref(), p)).collect();
            }
            if let Some(k) = rs.expected.keys().find(|k| !is_bare_key(k)) {
                return Err(loc.span(s, format!("expected key `{}` must be a bare key", k)));
            }
            Some(ScenarioSpec {
                name: rs.name.clone(),
                inner,
                expected: rs.expected.clone(),
            })
        }
    };

    Ok(AlgebraFile {
        p,
        algebra,
        derivations,
        lie,
        scenario,
    })
}

fn parse_algebra(
    loc: &Locator,
    p: u64,
    raw: &RawFile,
    names: &Spanned<Vec<String>>,
) -> Result<AlgebraPresentation> {
    let n = names.get_ref().len();
    let dim = raw
        .dim
        .as_ref()
        .ok_or_else(|| loc.span(names, "`names` given without `dim`"))?;
    if *dim.get_ref() != n as i64 {
        return Err(loc.span(dim, format!("dim = {} but {} names given", dim.get_ref(), n)));
    }
    if n == 0 {
        return Err(loc.span(dim, "dim must be at least 1"));
    }
    for (i, name) in names.get_ref().iter().enumerate() {
        if name.is_empty() || names.get_ref()[..i].contains(name) {
            return Err(loc.span(names, format!("basis name `{}` is empty or repeated", name)));
        }
    }
    let unit = raw
        .unit
        .as_ref()
        .ok_or_else(|| loc.span(names, "missing `unit`"))?;
    if unit.get_ref().len() != n {
        return Err(loc.span(unit, format!("unit needs {} coordinates", n)));
    }
    let mut triples = Vec::new();
    if let Some(sc) = &raw.sc {
        rows_of_width(loc, sc, 4, "sc")?;
        for e in sc.get_ref() {
            let v = e.get_ref();
            triples.push((
                index(loc, e, v[0], n, "basis")?,
                index(loc, e, v[1], n, "basis")?,
                index(loc, e, v[2], n, "basis")?,
                v[3],
            ));
        }
    }
    AlgebraPresentation::from_triples(p, names.get_ref().clone(), unit.get_ref().clone(), &triples)
        .map_err(|e| {
            let anchor = raw.sc.as_ref().map_or(names.span().start, |s| s.span().start);
            loc.at(anchor, e.to_string())
        })
}

fn write_row<T: std::fmt::Display>(out: &mut String, row: &[T]) {
    out.push('[');
    for (i, v) in row.iter().enumerate() {
        if i > 0 {
            out.push_str(", ");
        }
        let _ = write!(out, "{}", v);
    }
    out.push(']');
}

fn write_rows<T: std::fmt::Display>(out: &mut String, key: &str, rows: &[Vec<T>]) {
    if rows.is_empty() {
        let _ = writeln!(out, "{} = []", key);
        return;
    }
    let _ = writeln!(out, "{} = [", key);
    for r in rows {
        out.push_str("  ");
        write_row(out, r);
        out.push_str(",\n");
    }
    out.push_str("]\n");
}

fn quote(s: &str) -> String {
    toml::Value::String(s.to_string()).to_string()
}

/// Canonical text of a file; `parse(&print(f)) == f` and printing is idempotent.
pub fn print(file: &AlgebraFile) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "p = {}", file.p);
    if let Some(a) = &file.algebra {
        let _ = writeln!(out, "dim = {}", a.dim());
        let names: Vec<String> = a.names().iter().map(|s| quote(s)).collect();
        out.push_str("names = ");
        write_row(&mut out, &names);
        out.push('\n');
        out.push_str("unit = ");
        write_row(&mut out, a.unit());
        out.push('\n');
        let sc: Vec<Vec<u64>> = a
            .triples()
            .into_iter()
            .map(|(i, j, k, c)| vec![i as u64, j as u64, k as u64, c])
            .collect();
        write_rows(&mut out, "sc", &sc);
    }
    for d in &file.derivations {
        out.push_str("\n[[derivations]]\n");
        let _ = writeln!(out, "name = {}", quote(&d.name));
        match &d.action {
            DerivationAction::Matrix(m) => write_rows(&mut out, "matrix", &m.row_vectors()),
            DerivationAction::Inner(v) => {
                out.push_str("inner = ");
                write_row(&mut out, v);
                out.push('\n');
            }
        }
    }
    if let Some(l) = &file.lie {
        out.push_str("\n[lie]\n");
        let _ = writeln!(out, "m = {}", l.m);
        let b: Vec<Vec<u64>> = l
            .brackets
            .iter()
            .map(|&(i, j, k, c)| vec![i as u64, j as u64, k as u64, c])
            .collect();
        write_rows(&mut out, "brackets", &b);
        let pm: Vec<Vec<u64>> = l
            .pmap
            .iter()
            .map(|&(i, k, c)| vec![i as u64, k as u64, c])
            .collect();
        write_rows(&mut out, "pmap", &pm);
    }
    if let Some(s) = &file.scenario {
        out.push_str("\n[scenario]\n");
        let _ = writeln!(out, "name = {}", quote(&s.name));
        if !s.inner.is_empty() {
            write_rows(&mut out, "inner", &s.inner);
        }
        if !s.expected.is_empty() {
            let parts: Vec<String> = s
                .expected
                .iter()
                .map(|(k, v)| match v {
                    Expected::Bool(b) => format!("{} = {}", k, b),
                    Expected::Int(i) => format!("{} = {}", k, i),
                })
                .collect();
            let _ = writeln!(out, "expected = {{ {} }}", parts.join(", "));
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::models::{matrix_algebra, upper_triangular};

    #[test]
    fn round_trip_is_bit_exact() {
        let mut f = AlgebraFile::from_algebra(upper_triangular(2, 2).unwrap());
        f.derivations.push(DerivationSpec {
            name: "inner e12".into(),
            action: DerivationAction::Inner(vec![0, 1, 0]),
        });
        f.lie = Some(LieSpec {
            m: 2,
            brackets: vec![(0, 1, 1, 1)],
            pmap: vec![(0, 0, 1)],
        });
        f.scenario = Some(ScenarioSpec {
            name: "t2".into(),
            inner: vec![vec![1, 0, 1]],
            expected: [("q1".to_string(), Expected::Bool(false))].into(),
        });
        let text = print(&f);
        let g = parse(&text).unwrap();
        assert_eq!(g, f);
        assert_eq!(print(&g), text);
    }

    #[test]
    fn duplicate_entries_are_summed() {
        let text = "p = 3\ndim = 1\nnames = [\"1\"]\nunit = [1]\nsc = [[0, 0, 0, 2], [0, 0, 0, 2]]\n";
        let f = parse(text).unwrap();
        assert_eq!(f.algebra.unwrap().basis_product(0, 0), vec![1]);
    }

    #[test]
    fn errors_carry_positions() {
        let err = parse("p = 2\ndim = 1\nnames = [\"1\"]\nunit = [1]\nsc = [[0, 0, 5, 1]]\n").unwrap_err();
        assert!(matches!(err, Error::Parse { line: 5, .. }), "{:?}", err);
        let err = parse("p = 4\n").unwrap_err();
        assert!(matches!(err, Error::Parse { line: 1, column: 5, .. }), "{:?}", err);
        let err = parse("p = 2\nsc = [[0,\n").unwrap_err();
        assert!(matches!(err, Error::Parse { .. }));
        let err = parse("p = 2\ndim = 2\nnames = [\"a\", \"b\"]\nunit = [1, 0]\nsc = [[0, 0, 0, 1]]\n")
            .unwrap_err();
        assert!(matches!(err, Error::Parse { .. }), "{:?}", err);
    }

    #[test]
    fn lie_only_file() {
        let f = parse("p = 3\n\n[lie]\nm = 1\nbrackets = []\npmap = [\n  [0, 0, 1],\n]\n").unwrap();
        assert!(f.algebra.is_none());
        assert_eq!(f.lie.as_ref().unwrap().pmap, vec![(0, 0, 1)]);
        assert_eq!(print(&f), "p = 3\n\n[lie]\nm = 1\nbrackets = []\npmap = [\n  [0, 0, 1],\n]\n");
    }

    #[test]
    fn matrix_algebra_round_trip() {
        let f = AlgebraFile::from_algebra(matrix_algebra(3, 3).unwrap());
        assert_eq!(parse(&print(&f)).unwrap(), f);
    }
}
