//! Kernel bundles `E_{a,b}` as numerical classes, block-matrix extensions,
//! coverage decompositions `a = mb - j`, `b = sj + l`, and the exact
//! d-thresholds behind the semistability certificates.

use std::fmt;

use serde::Serialize;

use crate::constructions::{bound_b, bound_b_form, k_of};
use crate::error::{Error, Result};
use crate::monomial::{Monomial, MonomialSet};
use crate::rational::Rational;

/// Kernel of a surjection `O(-d)^a -> O^b` on `P^n`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct KernelBundleClass {
    pub n: usize,
    pub a: u64,
    pub b: u64,
    pub d: u64,
}

impl KernelBundleClass {
    pub fn new(n: usize, a: u64, b: u64, d: u64) -> Result<Self> {
        if b == 0 || a <= b {
            return Err(Error::InvalidParams(format!(
                "need a > b >= 1 for a kernel bundle, got a = {a}, b = {b}"
            )));
        }
        if d == 0 {
            return Err(Error::InvalidParams("degree must be positive".into()));
        }
        Ok(KernelBundleClass { n, a, b, d })
    }

    pub fn rank(&self) -> u64 {
        self.a - self.b
    }

    /// First Chern number against the hyperplane class, `-a d`.
    pub fn degree(&self) -> Rational {
        Rational::from_int(-(self.a as i64) * self.d as i64)
    }

    pub fn slope(&self) -> Rational {
        self.degree() / Rational::from_int(self.rank() as i64)
    }

    /// The slope divided by `d`, i.e. `-a / (a - b)`.
    pub fn slope_coefficient(&self) -> Rational {
        slope_coefficient(self.a, self.b)
    }
}

/// `μ(E_{a,b}) = -a d / (a - b)`.
pub fn slope(bundle: &KernelBundleClass) -> Rational {
    bundle.slope()
}

fn slope_coefficient(a: u64, b: u64) -> Rational {
    Rational::new(-(a as i64), (a - b) as i64)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum MatrixEntry {
    Zero,
    /// An unspecified general form of degree `d`.
    Generic,
    Mono(Monomial),
}

impl fmt::Display for MatrixEntry {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            MatrixEntry::Zero => f.write_str("0"),
            MatrixEntry::Generic => f.write_str("*"),
            MatrixEntry::Mono(m) => write!(f, "{m}"),
        }
    }
}

/// A `b × a` matrix of degree-`d` entries representing `φ`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MonomialMatrix {
    n: usize,
    d: u64,
    entries: Vec<Vec<MatrixEntry>>,
}

impl MonomialMatrix {
    pub fn new(n: usize, d: u64, entries: Vec<Vec<MatrixEntry>>) -> Result<Self> {
        let cols = entries.first().map_or(0, Vec::len);
        if entries.is_empty() || cols == 0 {
            return Err(Error::InvalidParams("empty matrix".into()));
        }
        for row in &entries {
            if row.len() != cols {
                return Err(Error::InvalidParams("ragged matrix".into()));
            }
            for e in row {
                if let MatrixEntry::Mono(m) = e {
                    if m.n() != n {
                        return Err(Error::DimensionMismatch {
                            left: n,
                            right: m.n(),
                        });
                    }
                    if m.degree() != d {
                        return Err(Error::DegreeMismatch {
                            monomial: m.to_string(),
                            expected: d,
                            found: m.degree(),
                        });
                    }
                }
            }
        }
        Ok(MonomialMatrix { n, d, entries })
    }

    /// The `1 × a` row of a syzygy bundle's generators.
    pub fn from_syzygy(set: &MonomialSet) -> Result<Self> {
        let d = set
            .uniform_degree()
            .ok_or_else(|| Error::InvalidParams("generators must share one degree".into()))?;
        let row = set
            .monomials()
            .iter()
            .cloned()
            .map(MatrixEntry::Mono)
            .collect();
        MonomialMatrix::new(set.n(), d, vec![row])
    }

    pub fn rows(&self) -> usize {
        self.entries.len()
    }

    pub fn cols(&self) -> usize {
        self.entries[0].len()
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn d(&self) -> u64 {
        self.d
    }

    pub fn entry(&self, row: usize, col: usize) -> &MatrixEntry {
        &self.entries[row][col]
    }

    /// The numerical class of the kernel, `E_{cols, rows}`.
    pub fn class(&self) -> Result<KernelBundleClass> {
        KernelBundleClass::new(self.n, self.cols() as u64, self.rows() as u64, self.d)
    }
}

impl fmt::Display for MonomialMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for row in &self.entries {
            let cells: Vec<String> = row.iter().map(ToString::to_string).collect();
            writeln!(f, "[ {} ]", cells.join(", "))?;
        }
        Ok(())
    }
}

/// Builds `M = [[M1, N], [0, M2]]` so that `E(M1)` is a subbundle of `E(M)`
/// with quotient `E(M2)`. `N` is `b1 × a2`; without a filler it is made of
/// generic degree-`d` placeholders.
pub fn extend(
    sub: &MonomialMatrix,
    quotient: &MonomialMatrix,
    filler: Option<MonomialMatrix>,
) -> Result<MonomialMatrix> {
    if sub.n != quotient.n {
        return Err(Error::DimensionMismatch {
            left: sub.n,
            right: quotient.n,
        });
    }
    if sub.d != quotient.d {
        return Err(Error::InvalidParams(format!(
            "mixed degrees {} and {}",
            sub.d, quotient.d
        )));
    }
    let (b1, a1) = (sub.rows(), sub.cols());
    let (b2, a2) = (quotient.rows(), quotient.cols());
    let filler = match filler {
        Some(f) => {
            if f.rows() != b1 || f.cols() != a2 {
                return Err(Error::InvalidParams(format!(
                    "filler must be {b1}×{a2}, got {}×{}",
                    f.rows(),
                    f.cols()
                )));
            }
            if f.d != sub.d || f.n != sub.n {
                return Err(Error::InvalidParams(
                    "filler degree or dimension mismatch".into(),
                ));
            }
            f.entries
        }
        None => vec![vec![MatrixEntry::Generic; a2]; b1],
    };
    let mut entries = Vec::with_capacity(b1 + b2);
    for (top, fill) in sub.entries.iter().zip(filler) {
        entries.push(top.iter().cloned().chain(fill).collect());
    }
    for bottom in &quotient.entries {
        entries.push(
            std::iter::repeat_n(MatrixEntry::Zero, a1)
                .chain(bottom.iter().cloned())
                .collect(),
        );
    }
    let m = MonomialMatrix::new(sub.n, sub.d, entries)?;
    let (c, c1, c2) = (m.class()?, sub.class()?, quotient.class()?);
    let total = extend_class(&c1, &c2)?;
    assert_eq!(c, total);
    Ok(m)
}

/// Numerical class of an extension of `quotient` by `sub`.
pub fn extend_class(
    sub: &KernelBundleClass,
    quotient: &KernelBundleClass,
) -> Result<KernelBundleClass> {
    if sub.n != quotient.n || sub.d != quotient.d {
        return Err(Error::InvalidParams(
            "extension pieces must share n and d".into(),
        ));
    }
    let c = KernelBundleClass::new(sub.n, sub.a + quotient.a, sub.b + quotient.b, sub.d)?;
    assert_eq!(c.rank(), sub.rank() + quotient.rank());
    assert_eq!(c.degree(), sub.degree() + quotient.degree());
    Ok(c)
}

/// `a = m b - j` with `0 <= j <= b - 1`, and `b = s j + l` with
/// `0 <= l <= j - 1` when `j >= 1`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct Decomposition {
    pub m: u64,
    pub j: u64,
    pub s: Option<u64>,
    pub l: Option<u64>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Coverage {
    Covered(Decomposition),
    NotCovered { m: u64, j: u64 },
}

/// Splits `a = m b - j`; covered iff `2 <= m <= k(n)`.
pub fn decompose(a: u64, b: u64, n: usize) -> Result<Coverage> {
    if b == 0 || a <= b {
        return Err(Error::InvalidParams(format!(
            "need a > b >= 1, got a = {a}, b = {b}"
        )));
    }
    let m = a.div_ceil(b);
    let j = m * b - a;
    debug_assert!(j < b);
    if !(2..=k_of(n)).contains(&m) {
        return Ok(Coverage::NotCovered { m, j });
    }
    let (s, l) = if j >= 1 {
        (Some(b / j), Some(b % j))
    } else {
        (None, None)
    };
    Ok(Coverage::Covered(Decomposition { m, j, s, l }))
}

/// Slope of `W` from `0 -> W2 -> W -> W1 -> 0`: the rank-weighted average.
pub fn slope_ledger(mu2: &Rational, r2: u64, mu1: &Rational, r1: u64) -> Result<Rational> {
    if r1 + r2 == 0 {
        return Err(Error::InvalidParams("both ranks are zero".into()));
    }
    let w2 = mu2 * &Rational::from_int(r2 as i64);
    let w1 = mu1 * &Rational::from_int(r1 as i64);
    Ok((w2 + w1) / Rational::from_int((r1 + r2) as i64))
}

/// `alpha · d + beta`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct LinearForm {
    pub alpha: Rational,
    pub beta: Rational,
}

impl LinearForm {
    pub fn eval(&self, d: i64) -> Rational {
        &self.alpha * &Rational::from_int(d) + self.beta.clone()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum DThreshold {
    /// Positive for every `d >= d0` (and `d0 >= 2`).
    From(u64),
    AllD,
    NoD,
}

impl DThreshold {
    /// The first certified degree, if any.
    pub fn d0(&self) -> Option<u64> {
        match self {
            DThreshold::From(d) => Some(*d),
            DThreshold::AllD => Some(1),
            DThreshold::NoD => None,
        }
    }
}

impl fmt::Display for DThreshold {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            DThreshold::From(d) => write!(f, "d >= {d}"),
            DThreshold::AllD => f.write_str("all d"),
            DThreshold::NoD => f.write_str("no d"),
        }
    }
}

/// Smallest `d0 >= 1` with `alpha·d + beta > 0` for every `d >= d0`.
pub fn min_d_linear(alpha: &Rational, beta: &Rational) -> DThreshold {
    if alpha.is_negative() || (alpha.is_zero() && !beta.is_positive()) {
        return DThreshold::NoD;
    }
    if alpha.is_zero() {
        return DThreshold::AllD;
    }
    // alpha > 0: need d > -beta / alpha
    let crossing = -(beta.clone()) / alpha.clone();
    let d0 = crossing.floor() + 1;
    if d0 <= 1.into() {
        DThreshold::AllD
    } else {
        DThreshold::From(u64::try_from(d0).expect("threshold fits in u64"))
    }
}

/// `j((m-1)s - 1) + l(m-1) - ms + s + 2`.
fn extension_denominator(m: i64, j: i64, s: i64, l: i64) -> i64 {
    j * ((m - 1) * s - 1) + l * (m - 1) - m * s + s + 2
}

/// The displayed margin `μ(E_{a,b}) - μ(W)` bound as a linear form in `d`.
pub fn extension_margin_form(n: usize, m: u64, j: u64, s: u64, l: u64) -> Result<LinearForm> {
    if j == 0 {
        return Err(Error::InvalidParams("margin needs j >= 1".into()));
    }
    let (ni, m, j, s, l) = (n as i64, m as i64, j as i64, s as i64, l as i64);
    let p = ni * ni + 5 * ni + 2;
    let den = extension_denominator(m, j, s, l);
    if den == 0 {
        return Err(Error::InvalidParams(format!(
            "zero denominator for m = {m}, j = {j}, s = {s}, l = {l}"
        )));
    }
    let quot_den = -j + m * (l + s * j) - l - s * j;
    if quot_den == 0 {
        return Err(Error::InvalidParams("bundle has rank zero".into()));
    }
    let first = (Rational::from_int(-m * ((j - 1) * s + l) + j - 1)
        - Rational::new((-ni - 1) * (ni + 4), p))
        / Rational::from_int(den);
    let second = Rational::new(j - m * (l + s * j), quot_den);
    Ok(LinearForm {
        alpha: first + second,
        beta: Rational::new(4 * (-ni - 1), p * den),
    })
}

/// The displayed margin evaluated at `d`.
pub fn extension_margin(n: usize, m: u64, j: u64, s: u64, l: u64, d: u64) -> Result<Rational> {
    Ok(extension_margin_form(n, m, j, s, l)?.eval(d as i64))
}

/// Quotient `E_{a',b'}` of the extension sequence, `a' = m(s(j-1)+l) - (j-1)`,
/// `b' = s(j-1) + l`.
fn extension_quotient(m: u64, j: u64, s: u64, l: u64) -> (u64, u64) {
    let b = s * (j - 1) + l;
    (m * b - (j - 1), b)
}

/// Same comparison re-derived from degree additivity: `μ(E) - μ(W)` where
/// `W` has `W2` of slope `B` and rank 1 and `W1` the whole quotient.
pub fn extension_margin_rederived(
    n: usize,
    a: u64,
    b: u64,
    dec: &Decomposition,
) -> Result<LinearForm> {
    let (s, l) = match (dec.s, dec.l) {
        (Some(s), Some(l)) => (s, l),
        _ => return Err(Error::InvalidParams("margin needs j >= 1".into())),
    };
    let (qa, qb) = extension_quotient(dec.m, dec.j, s, l);
    let q_rank = qa.saturating_sub(qb);
    let (b_alpha, b_beta) = bound_b_form(n);
    let mu_e = slope_coefficient(a, b);
    // μ(W) = (B + deg W1) / (r1 + 1) with deg W1 = -a' d
    let r = Rational::from_int(q_rank as i64 + 1);
    let w_alpha = (b_alpha - Rational::from_int(qa as i64)) / r.clone();
    let w_beta = b_beta / r;
    Ok(LinearForm {
        alpha: mu_e - w_alpha,
        beta: -w_beta,
    })
}

/// `μ(E_{m,1}) - B(n, d)` as a linear form, the comparison for the summands
/// of `E_{mb,b} = E_{m,1}^{⊕ b}`.
pub fn summand_margin_form(n: usize, m: u64) -> LinearForm {
    let (b_alpha, b_beta) = bound_b_form(n);
    LinearForm {
        alpha: slope_coefficient(m, 1) - b_alpha,
        beta: -b_beta,
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ClosedFormThreshold {
    pub value: Option<Rational>,
    pub numerator: Rational,
    pub denominator: Rational,
    pub denominator_positive: bool,
}

impl ClosedFormThreshold {
    fn new(numerator: i64, denominator: i64) -> Self {
        ClosedFormThreshold {
            value: (denominator != 0).then(|| Rational::new(numerator, denominator)),
            numerator: Rational::from_int(numerator),
            denominator: Rational::from_int(denominator),
            denominator_positive: denominator > 0,
        }
    }
}

/// Closed-form degree thresholds for the `E_{kb-1,b}` family.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct TopFamilyThresholds {
    /// `(6bn^3+10bn^2+10bn+6b-8n-8) / (bn^2-8bn-b-4)`.
    pub stated: ClosedFormThreshold,
    /// `-4(-1-b+bk)(1+n) / (-2bk+bn^2+5bn+4b+2)`.
    pub derived: ClosedFormThreshold,
    /// `-2 - 4b + 2bk - 5bn - bn^2`, which the argument needs positive.
    pub sign_term: i64,
}

pub fn top_family_thresholds(n: usize, b: u64) -> TopFamilyThresholds {
    let (n, b) = (n as i64, b as i64);
    let k = k_of(n as usize) as i64;
    TopFamilyThresholds {
        stated: ClosedFormThreshold::new(
            6 * b * n * n * n + 10 * b * n * n + 10 * b * n + 6 * b - 8 * n - 8,
            b * n * n - 8 * b * n - b - 4,
        ),
        derived: ClosedFormThreshold::new(
            -4 * (-1 - b + b * k) * (1 + n),
            -2 * b * k + b * n * n + 5 * b * n + 4 * b + 2,
        ),
        sign_term: -2 - 4 * b + 2 * b * k - 5 * b * n - b * n * n,
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Route {
    /// `j >= 1`: the extension margin.
    Extension,
    /// `j = 0`: `E_{mb,b}` is a direct sum of copies of `E_{m,1}`.
    DirectSum,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum CertVerdict {
    SemistableForDGeq { d0: u64 },
    Uncertified,
    NotCovered,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct StabilityCertificate {
    pub n: usize,
    pub a: u64,
    pub b: u64,
    pub d: Option<u64>,
    pub covered: bool,
    pub m: u64,
    pub j: u64,
    pub decomposition: Option<Decomposition>,
    pub route: Option<Route>,
    /// `μ / d = -a / (a - b)`.
    pub mu_coefficient: Rational,
    /// `B(n, d)` at the supplied degree.
    pub bound_b: Option<Rational>,
    pub bound_b_form: LinearForm,
    pub margin: Option<LinearForm>,
    pub margin_rederived: Option<LinearForm>,
    pub d_threshold_linear: Option<DThreshold>,
    pub top_family: Option<TopFamilyThresholds>,
    pub verdict: CertVerdict,
    /// Whether the certified margin is positive at the supplied degree.
    pub holds_at_d: Option<bool>,
    pub warnings: Vec<String>,
}

#[derive(Serialize)]
struct CertificateJson<'a> {
    n: usize,
    a: u64,
    b: u64,
    d: Option<u64>,
    covered: bool,
    m: u64,
    j: u64,
    s: Option<u64>,
    l: Option<u64>,
    route: Option<Route>,
    #[serde(rename = "B")]
    bound: Option<&'a Rational>,
    #[serde(rename = "B_form")]
    bound_form: &'a LinearForm,
    mu: &'a Rational,
    margin: Option<&'a LinearForm>,
    margin_rederived: Option<&'a LinearForm>,
    threshold: Option<DThreshold>,
    d0: Option<u64>,
    top_family: Option<&'a TopFamilyThresholds>,
    verdict: CertVerdict,
    holds_at_d: Option<bool>,
    warnings: &'a [String],
}

impl StabilityCertificate {
    pub fn d0(&self) -> Option<u64> {
        self.d_threshold_linear.and_then(|t| t.d0())
    }

    /// The margin used for the verdict.
    pub fn operative_margin(&self) -> Option<&LinearForm> {
        self.margin.as_ref()
    }

    pub fn to_json(&self) -> String {
        let js = CertificateJson {
            n: self.n,
            a: self.a,
            b: self.b,
            d: self.d,
            covered: self.covered,
            m: self.m,
            j: self.j,
            s: self.decomposition.and_then(|x| x.s),
            l: self.decomposition.and_then(|x| x.l),
            route: self.route,
            bound: self.bound_b.as_ref(),
            bound_form: &self.bound_b_form,
            mu: &self.mu_coefficient,
            margin: self.margin.as_ref(),
            margin_rederived: self.margin_rederived.as_ref(),
            threshold: self.d_threshold_linear,
            d0: self.d0(),
            top_family: self.top_family.as_ref(),
            verdict: self.verdict,
            holds_at_d: self.holds_at_d,
            warnings: &self.warnings,
        };
        serde_json::to_string(&js).expect("certificate serializes")
    }
}

/// Certificate for a general `E_{a,b}` on `P^n`, optionally evaluated at `d`.
pub fn certify(a: u64, b: u64, n: usize, d: Option<u64>) -> Result<StabilityCertificate> {
    if n < 2 {
        return Err(Error::InvalidParams(format!(
            "certificates need n >= 2, got {n}"
        )));
    }
    if d == Some(0) {
        return Err(Error::InvalidParams("degree must be positive".into()));
    }
    let coverage = decompose(a, b, n)?;
    let (alpha_b, beta_b) = bound_b_form(n);
    let mut cert = StabilityCertificate {
        n,
        a,
        b,
        d,
        covered: false,
        m: 0,
        j: 0,
        decomposition: None,
        route: None,
        mu_coefficient: slope_coefficient(a, b),
        bound_b: d.map(|d| bound_b(n, d)),
        bound_b_form: LinearForm {
            alpha: alpha_b,
            beta: beta_b,
        },
        margin: None,
        margin_rederived: None,
        d_threshold_linear: None,
        top_family: None,
        verdict: CertVerdict::NotCovered,
        holds_at_d: None,
        warnings: Vec::new(),
    };
    let dec = match coverage {
        Coverage::NotCovered { m, j } => {
            cert.m = m;
            cert.j = j;
            cert.warnings.push(format!(
                "a = {m}b - {j} needs 2 <= m <= k({n}) = {}; not covered",
                k_of(n)
            ));
            if (n, a, b) == (2, 17, 2) {
                cert.warnings
                    .push("try `verify prop6` for the E_{8,1}/E_{9,1} extension argument".into());
            }
            return Ok(cert);
        }
        Coverage::Covered(dec) => dec,
    };
    cert.covered = true;
    cert.m = dec.m;
    cert.j = dec.j;
    cert.decomposition = Some(dec);

    let margin = if dec.j == 0 {
        cert.route = Some(Route::DirectSum);
        summand_margin_form(n, dec.m)
    } else {
        cert.route = Some(Route::Extension);
        let (s, l) = (dec.s.expect("s"), dec.l.expect("l"));
        if dec.j == 1 {
            let diag = top_family_thresholds(n, b);
            if !diag.stated.denominator_positive {
                cert.warnings.push(format!(
                    "stated threshold has non-positive denominator {}",
                    diag.stated.denominator
                ));
            }
            if !diag.derived.denominator_positive {
                cert.warnings.push(format!(
                    "derived threshold has non-positive denominator {}",
                    diag.derived.denominator
                ));
            }
            if diag.sign_term <= 0 {
                cert.warnings.push(format!(
                    "-2-4b+2bk-5bn-bn^2 = {} is not positive",
                    diag.sign_term
                ));
            }
            cert.top_family = Some(diag);
        }
        let (qa, qb) = extension_quotient(dec.m, dec.j, s, l);
        let formula_rank =
            (dec.m * ((dec.j - 1) * s + l) + 1) as i64 - ((dec.j - 1) * s + dec.j + l) as i64;
        if formula_rank != qa as i64 - qb as i64 {
            cert.warnings.push(format!(
                "quotient rank {} differs from closed form {formula_rank}",
                qa as i64 - qb as i64
            ));
        }
        let shown = match extension_margin_form(n, dec.m, dec.j, s, l) {
            Ok(f) => f,
            Err(e) => {
                cert.warnings.push(e.to_string());
                cert.verdict = CertVerdict::Uncertified;
                return Ok(cert);
            }
        };
        let rederived = extension_margin_rederived(n, a, b, &dec)?;
        if rederived.alpha != shown.alpha {
            cert.warnings.push(format!(
                "re-derived margin slope {} differs from displayed {}",
                rederived.alpha, shown.alpha
            ));
        }
        cert.margin_rederived = Some(rederived);
        shown
    };
    let threshold = min_d_linear(&margin.alpha, &margin.beta);
    cert.verdict = match threshold.d0() {
        Some(d0) => CertVerdict::SemistableForDGeq { d0 },
        None => CertVerdict::Uncertified,
    };
    cert.holds_at_d =
        d.map(|d| margin.eval(d as i64).is_positive() && threshold.d0().is_some_and(|d0| d >= d0));
    cert.d_threshold_linear = Some(threshold);
    cert.margin = Some(margin);
    Ok(cert)
}
