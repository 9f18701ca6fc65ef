//! Monomials in `x_0..x_n` and the generator sets of monomial syzygy bundles.
//!
//! A [`Monomial`] is an exponent vector of length `n + 1`. The gcd of two
//! monomials is the componentwise minimum, which makes the set of monomials a
//! lattice under divisibility. A [`MonomialSet`] is an ordered list of distinct
//! monomials in a fixed number of variables, optionally all of the same degree.

use std::collections::HashSet;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Largest ambient dimension accepted (so at most 17 variables).
pub const MAX_DIMENSION: usize = 16;

#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Debug)]
pub struct Monomial {
    exps: Vec<u32>,
}

impl Monomial {
    /// Builds a monomial from its exponents `[e_0, ..., e_n]`.
    pub fn new(exps: Vec<u32>) -> Result<Self> {
        let n = exps.len().saturating_sub(1);
        if !(1..=MAX_DIMENSION).contains(&n) {
            return Err(Error::InvalidDimension(n));
        }
        Ok(Monomial { exps })
    }

    /// The constant monomial `1` on `P^n`.
    pub fn one(n: usize) -> Result<Self> {
        Monomial::new(vec![0; n + 1])
    }

    /// `x_var^d` on `P^n`.
    pub fn pure_power(n: usize, var: usize, d: u32) -> Result<Self> {
        if var > n {
            return Err(Error::OutOfRange(format!("variable x{var} on P^{n}")));
        }
        let mut exps = vec![0; n + 1];
        exps[var] = d;
        Monomial::new(exps)
    }

    /// Ambient dimension `n` (the monomial has `n + 1` exponents).
    pub fn n(&self) -> usize {
        self.exps.len() - 1
    }

    pub fn num_vars(&self) -> usize {
        self.exps.len()
    }

    pub fn exponents(&self) -> &[u32] {
        &self.exps
    }

    pub fn degree(&self) -> u64 {
        self.exps.iter().map(|&e| u64::from(e)).sum()
    }

    fn check_dim(&self, other: &Monomial) -> Result<()> {
        if self.exps.len() != other.exps.len() {
            return Err(Error::DimensionMismatch {
                left: self.n(),
                right: other.n(),
            });
        }
        Ok(())
    }

    /// Greatest common monomial divisor (componentwise minimum).
    pub fn gcd(&self, other: &Monomial) -> Result<Monomial> {
        self.check_dim(other)?;
        Ok(self.meet(other))
    }

    /// Whether `self` divides `other`.
    pub fn divides(&self, other: &Monomial) -> Result<bool> {
        self.check_dim(other)?;
        Ok(self.divides_unchecked(other))
    }

    pub(crate) fn meet(&self, other: &Monomial) -> Monomial {
        debug_assert_eq!(self.exps.len(), other.exps.len());
        Monomial {
            exps: self
                .exps
                .iter()
                .zip(&other.exps)
                .map(|(&a, &b)| a.min(b))
                .collect(),
        }
    }

    pub(crate) fn divides_unchecked(&self, other: &Monomial) -> bool {
        self.exps.iter().zip(&other.exps).all(|(&a, &b)| a <= b)
    }

    /// Bitmask of the variables occurring with positive exponent.
    pub fn support(&self) -> u32 {
        self.exps
            .iter()
            .enumerate()
            .filter(|(_, &e)| e > 0)
            .fold(0, |acc, (i, _)| acc | (1 << i))
    }

    /// Applies a permutation of the variables: variable `i` becomes `perm[i]`.
    pub fn permuted(&self, perm: &[usize]) -> Monomial {
        let mut exps = vec![0; self.exps.len()];
        for (i, &e) in self.exps.iter().enumerate() {
            exps[perm[i]] = e;
        }
        Monomial { exps }
    }

    /// Parses the text form `x0^a*x1^b*...`, or `1` for the constant monomial.
    pub fn parse_text(s: &str, n: usize) -> Result<Monomial> {
        let mut exps = vec![0u32; n + 1];
        let s = s.trim();
        if s == "1" {
            return Monomial::new(exps);
        }
        if s.is_empty() {
            return Err(Error::Parse("empty monomial".into()));
        }
        for factor in s.split('*') {
            let factor = factor.trim();
            let rest = factor
                .strip_prefix('x')
                .ok_or_else(|| Error::Parse(format!("bad factor {factor:?}")))?;
            let (var, exp) = match rest.split_once('^') {
                Some((v, e)) => (v, e),
                None => (rest, "1"),
            };
            let var: usize = var
                .trim()
                .parse()
                .map_err(|_| Error::Parse(format!("bad variable in {factor:?}")))?;
            let exp: i64 = exp
                .trim()
                .parse()
                .map_err(|_| Error::Parse(format!("bad exponent in {factor:?}")))?;
            if var > n {
                return Err(Error::Parse(format!(
                    "variable x{var} out of range for n = {n}"
                )));
            }
            let exp = checked_exponent(exp)?;
            exps[var] = exps[var]
                .checked_add(exp)
                .ok_or_else(|| Error::Parse(format!("exponent overflow in {s:?}")))?;
        }
        Monomial::new(exps)
    }
}

fn checked_exponent(e: i64) -> Result<u32> {
    if e < 0 {
        return Err(Error::Parse(format!("negative exponent {e}")));
    }
    u32::try_from(e).map_err(|_| Error::Parse(format!("exponent {e} overflows")))
}

impl fmt::Display for Monomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for (i, &e) in self.exps.iter().enumerate() {
            if e == 0 {
                continue;
            }
            if !first {
                f.write_str("*")?;
            }
            first = false;
            if e == 1 {
                write!(f, "x{i}")?;
            } else {
                write!(f, "x{i}^{e}")?;
            }
        }
        if first {
            f.write_str("1")?;
        }
        Ok(())
    }
}

/// The generators `f_i, i ∈ I` of a syzygy bundle.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct MonomialSet {
    n: usize,
    monomials: Vec<Monomial>,
    uniform_degree: Option<u64>,
}

#[derive(Serialize, Deserialize)]
struct MonomialSetJson {
    n: usize,
    d: Option<u64>,
    monomials: Vec<Vec<i64>>,
}

impl MonomialSet {
    /// Builds a set, rejecting duplicates and dimension mismatches. The
    /// uniform degree is detected automatically.
    pub fn new(n: usize, monomials: Vec<Monomial>) -> Result<Self> {
        if !(1..=MAX_DIMENSION).contains(&n) {
            return Err(Error::InvalidDimension(n));
        }
        let mut seen = HashSet::with_capacity(monomials.len());
        for m in &monomials {
            if m.n() != n {
                return Err(Error::DimensionMismatch {
                    left: n,
                    right: m.n(),
                });
            }
            if !seen.insert(m) {
                return Err(Error::DuplicateMonomial(m.to_string()));
            }
        }
        let uniform_degree = match monomials.split_first() {
            Some((first, rest)) => {
                let d = first.degree();
                (d > 0 && rest.iter().all(|m| m.degree() == d)).then_some(d)
            }
            None => None,
        };
        Ok(MonomialSet {
            n,
            monomials,
            uniform_degree,
        })
    }

    /// Like [`MonomialSet::new`], but every monomial must have degree `d`.
    pub fn with_degree(n: usize, d: u64, monomials: Vec<Monomial>) -> Result<Self> {
        if d == 0 {
            return Err(Error::InvalidParams("degree must be positive".into()));
        }
        if let Some(m) = monomials.iter().find(|m| m.degree() != d) {
            return Err(Error::DegreeMismatch {
                monomial: m.to_string(),
                expected: d,
                found: m.degree(),
            });
        }
        let mut set = MonomialSet::new(n, monomials)?;
        set.uniform_degree = Some(d);
        Ok(set)
    }

    /// `x_0^d, ..., x_n^d`.
    pub fn pure_powers(n: usize, d: u32) -> Result<Self> {
        let monos = (0..=n)
            .map(|i| Monomial::pure_power(n, i, d))
            .collect::<Result<Vec<_>>>()?;
        MonomialSet::with_degree(n, u64::from(d), monos)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn len(&self) -> usize {
        self.monomials.len()
    }

    pub fn is_empty(&self) -> bool {
        self.monomials.is_empty()
    }

    pub fn monomials(&self) -> &[Monomial] {
        &self.monomials
    }

    pub fn uniform_degree(&self) -> Option<u64> {
        self.uniform_degree
    }

    /// The first `count` monomials, in stored order.
    pub fn truncated(&self, count: usize) -> Result<MonomialSet> {
        let monos = self.monomials.iter().take(count).cloned().collect();
        MonomialSet::new(self.n, monos)
    }

    /// Same set, sorted in the canonical (descending lexicographic) order.
    pub fn canonical(&self) -> MonomialSet {
        let mut monomials = self.monomials.clone();
        monomials.sort_by(|a, b| b.cmp(a));
        MonomialSet {
            n: self.n,
            monomials,
            uniform_degree: self.uniform_degree,
        }
    }

    /// Relabels the variables of every monomial.
    pub fn permuted(&self, perm: &[usize]) -> Result<MonomialSet> {
        let monos = self.monomials.iter().map(|m| m.permuted(perm)).collect();
        MonomialSet::new(self.n, monos)
    }

    /// True iff the monomials have no common zero on `P^n`: every nonempty
    /// set of variables `T` contains the support of some generator.
    pub fn is_basepoint_free(&self) -> Result<bool> {
        if self.monomials.is_empty() {
            return Err(Error::EmptySet);
        }
        let supports: Vec<u32> = self.monomials.iter().map(Monomial::support).collect();
        let vars = self.n + 1;
        Ok((1u32..(1u32 << vars)).all(|t| supports.iter().any(|&s| s & !t == 0)))
    }

    pub fn to_json(&self) -> String {
        let canon = self.canonical();
        let js = MonomialSetJson {
            n: self.n,
            d: self.uniform_degree,
            monomials: canon
                .monomials
                .iter()
                .map(|m| m.exps.iter().map(|&e| i64::from(e)).collect())
                .collect(),
        };
        serde_json::to_string(&js).expect("monomial set serializes")
    }

    pub fn from_json(s: &str) -> Result<MonomialSet> {
        let js: MonomialSetJson =
            serde_json::from_str(s).map_err(|e| Error::Parse(e.to_string()))?;
        let mut monos = Vec::with_capacity(js.monomials.len());
        for row in js.monomials {
            if row.len() != js.n + 1 {
                return Err(Error::Parse(format!(
                    "row has {} exponents, expected {}",
                    row.len(),
                    js.n + 1
                )));
            }
            let exps = row
                .into_iter()
                .map(checked_exponent)
                .collect::<Result<_>>()?;
            monos.push(Monomial::new(exps)?);
        }
        match js.d {
            Some(d) => MonomialSet::with_degree(js.n, d, monos),
            None => MonomialSet::new(js.n, monos),
        }
    }

    /// One monomial per line, canonical order.
    pub fn to_text(&self) -> String {
        self.canonical()
            .monomials
            .iter()
            .map(|m| format!("{m}\n"))
            .collect()
    }

    /// Parses the text form. Lines (or comma separated entries) are
    /// monomials; blank lines and `#` comments are skipped.
    pub fn from_text(s: &str, n: usize) -> Result<MonomialSet> {
        let monos = s
            .lines()
            .map(|l| l.split('#').next().unwrap_or(""))
            .flat_map(|l| l.split(','))
            .map(str::trim)
            .filter(|l| !l.is_empty())
            .map(|l| Monomial::parse_text(l, n))
            .collect::<Result<Vec<_>>>()?;
        MonomialSet::new(n, monos)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn m(e: &[u32]) -> Monomial {
        Monomial::new(e.to_vec()).unwrap()
    }

    #[test]
    fn gcd_examples() {
        assert_eq!(m(&[3, 1]).gcd(&m(&[1, 2])).unwrap(), m(&[1, 1]));
        assert_eq!(m(&[22, 0, 0]).gcd(&m(&[20, 2, 0])).unwrap(), m(&[20, 0, 0]));
        let x = m(&[2, 5, 1]);
        assert_eq!(x.gcd(&x).unwrap(), x);
        assert!(matches!(
            m(&[1, 1]).gcd(&m(&[1, 1, 1])),
            Err(Error::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn degree_examples() {
        assert_eq!(m(&[2, 2, 2]).degree(), 6);
        assert_eq!(m(&[0, 0, 0]).degree(), 0);
        assert_eq!(m(&[20, 2]).degree(), 22);
    }

    #[test]
    fn divides_examples() {
        assert!(m(&[1, 0]).divides(&m(&[2, 1])).unwrap());
        assert!(!m(&[0, 1]).divides(&m(&[2, 0])).unwrap());
        assert!(m(&[18, 0]).divides(&m(&[22, 0])).unwrap());
        assert!(m(&[1, 0]).divides(&m(&[1, 0, 0])).is_err());
    }

    #[test]
    fn basepoint_free_examples() {
        assert!(MonomialSet::pure_powers(2, 4)
            .unwrap()
            .is_basepoint_free()
            .unwrap());
        let cyc = MonomialSet::new(2, vec![m(&[1, 1, 0]), m(&[0, 1, 1]), m(&[1, 0, 1])]).unwrap();
        assert!(!cyc.is_basepoint_free().unwrap());
        let empty = MonomialSet::new(2, vec![]).unwrap();
        assert!(matches!(empty.is_basepoint_free(), Err(Error::EmptySet)));
    }

    #[test]
    fn rejects_duplicates_and_ragged() {
        assert!(matches!(
            MonomialSet::new(1, vec![m(&[1, 1]), m(&[1, 1])]),
            Err(Error::DuplicateMonomial(_))
        ));
        assert!(MonomialSet::from_json(r#"{"n":2,"d":null,"monomials":[[3,0,0],[0,3]]}"#).is_err());
        assert!(MonomialSet::from_json(r#"{"n":1,"d":null,"monomials":[[3,-1]]}"#).is_err());
        assert!(MonomialSet::from_json(r#"{"n":1,"d":4,"monomials":[[3,0]]}"#).is_err());
        assert!(MonomialSet::from_json(r#"{"n":1,"monomials":[[9999999999,0]]}"#).is_err());
        assert!(MonomialSet::from_json("[1,2]").is_err());
    }

    #[test]
    fn json_and_text_forms() {
        let s =
            MonomialSet::from_json(r#"{"n":2,"d":null,"monomials":[[3,0,0],[0,3,0]]}"#).unwrap();
        assert_eq!(s.monomials(), &[m(&[3, 0, 0]), m(&[0, 3, 0])]);
        assert_eq!(s.uniform_degree(), Some(3));
        assert_eq!(
            Monomial::parse_text("x0^20*x1^2", 2).unwrap(),
            m(&[20, 2, 0])
        );
        assert_eq!(Monomial::parse_text("1", 2).unwrap(), m(&[0, 0, 0]));
        assert_eq!(Monomial::parse_text("x2*x0^3", 2).unwrap(), m(&[3, 0, 1]));
        assert!(Monomial::parse_text("x3", 2).is_err());
        assert!(Monomial::parse_text("x0^-1", 2).is_err());
        assert!(Monomial::parse_text("y0", 2).is_err());
        assert_eq!(m(&[20, 2, 0]).to_string(), "x0^20*x1^2");
        assert_eq!(m(&[0, 0, 0]).to_string(), "1");
        let t = MonomialSet::from_text("x0^3\n# comment\nx1^3, x2^3\n", 2).unwrap();
        assert_eq!(t.to_text(), "x0^3\nx1^3\nx2^3\n");
    }

    #[test]
    fn canonical_order_is_descending_lex() {
        let s = MonomialSet::new(1, vec![m(&[0, 2]), m(&[2, 0]), m(&[1, 1])]).unwrap();
        assert_eq!(
            s.canonical().monomials(),
            &[m(&[2, 0]), m(&[1, 1]), m(&[0, 2])]
        );
    }
}
