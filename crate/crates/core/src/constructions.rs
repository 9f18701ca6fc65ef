//! Explicit monomial families and the closed-form quantities attached to them.
//!
//! The main family is the `k(n)`-generator syzygy bundle built row by row from
//! the degrees `d_i = (i + A(i-1)) d`: row 1 holds the pure powers, row `i`
//! splits the variables into `⌊(n+1)/i⌋` consecutive blocks of size `i` and,
//! inside each block, gives one variable the exponent `⌊d_i⌋` and spreads the
//! remaining `d - ⌊d_i⌋ = p_i (i-1) + q_i` over the other `i - 1` variables.

use num_bigint::{BigInt, BigUint};
use num_traits::ToPrimitive;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::monomial::{Monomial, MonomialSet};
use crate::rational::Rational;

/// `k(n) = (n+1)^2 - Σ_{i=2}^{n+1} ((n+1) mod i)`.
pub fn k_of(n: usize) -> u64 {
    let n1 = n as u64 + 1;
    n1 * n1 - (2..=n1).map(|i| n1 % i).sum::<u64>()
}

fn quad(n: usize) -> i64 {
    let n = n as i64;
    n * n + 5 * n + 2
}

/// Uniform slope bound `B(n, d) = (d(-n-1)(n+4) - 4(-n-1)) / (n^2 + 5n + 2)`.
pub fn bound_b(n: usize, d: u64) -> Rational {
    let (ni, di) = (n as i64, d as i64);
    let p = quad(n);
    let b = Rational::new(di * (-ni - 1) * (ni + 4) - 4 * (-ni - 1), p);
    let alt = Rational::new(4 * (ni + 1), p) - Rational::new((ni * ni + 5 * ni + 4) * di, p);
    assert_eq!(b, alt, "closed forms of B disagree");
    b
}

/// The `d`-coefficient and constant of `B(n, d)`.
pub fn bound_b_form(n: usize) -> (Rational, Rational) {
    let ni = n as i64;
    let p = quad(n);
    (
        Rational::new(-(ni + 1) * (ni + 4), p),
        Rational::new(4 * (ni + 1), p),
    )
}

/// Smallest degree for which the admissible `A`-interval is nonempty.
pub fn lemma1_min_degree(n: usize) -> u64 {
    let n = n as u64;
    n * n * n + 4 * n * n - n
}

/// Admissible interval `[A_low, A_high]` for the construction parameter, or
/// `None` when it is empty.
pub fn a_interval(n: usize, d: u64) -> Option<(Rational, Rational)> {
    let (ni, di) = (n as i64, d as i64);
    let p = quad(n);
    let low = Rational::new(4 * (ni + 1), p * di) - Rational::new(ni * ni + 5 * ni + 4, p);
    let high = Rational::new(-di - 2 * ni + 2, di);
    assert_eq!(&low * &Rational::from_int(di), bound_b(n, d));
    (low <= high).then_some((low, high))
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ConstructionParams {
    pub n: usize,
    pub d: u64,
    pub a: Rational,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct RowData {
    pub i: usize,
    /// `⌊d_i⌋`.
    pub d_i_floor: i64,
    pub p_i: i64,
    pub q_i: i64,
    /// `⌈(d - ⌊d_i⌋)/(i - 1)⌉`.
    pub delta_i: i64,
    pub blocks: usize,
}

impl ConstructionParams {
    /// Validates `n >= 2`, `d >= 1` and `A_low <= A <= A_high`.
    pub fn new(n: usize, d: u64, a: Rational) -> Result<Self> {
        if !(2..=crate::monomial::MAX_DIMENSION).contains(&n) {
            return Err(Error::InvalidParams(format!(
                "construction needs 2 <= n <= 16, got {n}"
            )));
        }
        if d == 0 || d > u64::from(u32::MAX) {
            return Err(Error::InvalidParams(format!("degree {d} out of range")));
        }
        let (low, high) = a_interval(n, d).ok_or_else(|| {
            Error::Hypothesis(format!(
                "A-interval is empty for n = {n}, d = {d}; need d >= {}",
                lemma1_min_degree(n)
            ))
        })?;
        if a < low || a > high {
            return Err(Error::InvalidParams(format!(
                "A = {a} outside [{low}, {high}]"
            )));
        }
        Ok(ConstructionParams { n, d, a })
    }

    /// Parameters with the default `A = A_low(n, d)`.
    pub fn with_default_a(n: usize, d: u64) -> Result<Self> {
        let low = a_interval(n, d).map(|(low, _)| low).ok_or_else(|| {
            Error::Hypothesis(format!(
                "A-interval is empty for n = {n}, d = {d}; need d >= {}",
                lemma1_min_degree(n)
            ))
        })?;
        ConstructionParams::new(n, d, low)
    }

    /// `d_r = (r + A(r-1)) d`.
    pub fn d_r(&self, r: usize) -> Rational {
        let r = r as i64;
        (Rational::from_int(r) + &self.a * &Rational::from_int(r - 1))
            * Rational::from_int(self.d as i64)
    }

    /// Row data for rows `2..=n+1`.
    pub fn rows(&self) -> Result<Vec<RowData>> {
        let d = self.d as i64;
        let bound = Rational::from_int(2) - (&self.a + &Rational::one()) * Rational::from_int(d);
        (2..=self.n + 1)
            .map(|i| {
                let floor = to_i64(self.d_r(i).floor())?;
                if floor <= 0 || floor > d {
                    return Err(Error::InvalidParams(format!(
                        "row {i}: ⌊d_{i}⌋ = {floor} not in (0, d]"
                    )));
                }
                let rem = d - floor;
                let w = i as i64 - 1;
                let (p_i, q_i) = (rem / w, rem % w);
                let delta_i = (rem + w - 1) / w;
                assert!(
                    Rational::from_int(delta_i) <= bound,
                    "Δ_{i} = {delta_i} exceeds 2 - (A+1)d = {bound}"
                );
                Ok(RowData {
                    i,
                    d_i_floor: floor,
                    p_i,
                    q_i,
                    delta_i,
                    blocks: (self.n + 1) / i,
                })
            })
            .collect()
    }

    /// Whether every row has `p_i >= 1`, which makes `x_0` divide all of the
    /// `(n+1)(n+2)/2` monomials of the first block of each row.
    pub fn all_rows_positive(&self) -> Result<bool> {
        Ok(self.rows()?.iter().all(|r| r.p_i >= 1))
    }
}

fn to_i64(v: BigInt) -> Result<i64> {
    v.to_i64()
        .ok_or_else(|| Error::InvalidParams("value overflows 64 bits".into()))
}

/// The `k(n)` monomials of degree `d`, in row order.
pub fn construction1(params: &ConstructionParams) -> Result<MonomialSet> {
    let n = params.n;
    let d = params.d as u32;
    let mut monos = Vec::with_capacity(k_of(n) as usize);
    for v in 0..=n {
        monos.push(Monomial::pure_power(n, v, d)?);
    }
    for row in params.rows()? {
        let size = row.i;
        for block in 0..row.blocks {
            let base = block * size;
            for pos in 0..size {
                let mut exps = vec![0u32; n + 1];
                exps[base + pos] = row.d_i_floor as u32;
                let others = (0..size).filter(|&j| j != pos);
                for (rank, j) in others.enumerate() {
                    let e = if (rank as i64) < row.q_i {
                        row.p_i + 1
                    } else {
                        row.p_i
                    };
                    exps[base + j] = e as u32;
                }
                monos.push(Monomial::new(exps)?);
            }
        }
        let exp_sum =
            row.d_i_floor + row.q_i * (row.p_i + 1) + (size as i64 - 1 - row.q_i) * row.p_i;
        assert_eq!(exp_sum, params.d as i64, "row {} degree identity", row.i);
    }
    let set = MonomialSet::with_degree(n, params.d, monos)?;
    assert_eq!(set.len() as u64, k_of(n));
    Ok(set)
}

/// Keeps the pure powers and then the first `m - (n+1)` later monomials in
/// construction order.
pub fn construction1_dropped(params: &ConstructionParams, m: usize) -> Result<MonomialSet> {
    let k = k_of(params.n) as usize;
    if m < params.n + 1 || m > k {
        return Err(Error::OutOfRange(format!(
            "target count {m} not in [{}, {k}]",
            params.n + 1
        )));
    }
    construction1(params)?.truncated(m)
}

/// Balanced split `e_0 >= e_1 >= e_2`, `e_0 - e_2 <= 1`, `e_0 = ⌈d/3⌉`.
fn balanced_triple(d: u32) -> [u32; 3] {
    let (q, t) = (d / 3, d % 3);
    [0, 1, 2].map(|i| if i < t { q + 1 } else { q })
}

fn check_small_degree(d: u32) -> Result<()> {
    if d < 3 {
        return Err(Error::InvalidParams(format!(
            "degree must be at least 3, got {d}"
        )));
    }
    Ok(())
}

fn plane_set(d: u32, rows: &[[u32; 3]]) -> Result<MonomialSet> {
    let monos = rows
        .iter()
        .map(|r| Monomial::new(r.to_vec()))
        .collect::<Result<Vec<_>>>()?;
    MonomialSet::with_degree(2, u64::from(d), monos)
}

/// The seven listed generators of the `E_{8,1}` family on `P^2`, verbatim.
pub fn e81_generators(d: u32) -> Result<MonomialSet> {
    check_small_degree(d)?;
    let [e0, e1, e2] = balanced_triple(d);
    plane_set(
        d,
        &[
            [d, 0, 0],
            [0, d, 0],
            [0, 0, d],
            [e0, e1, e2],
            [e2, 0, e0 + e1],
            [0, e0 + e1, e2],
            [0, e0, e1 + e2],
        ],
    )
}

/// The nine generators of the `E_{9,1}` family on `P^2`.
pub fn e91_generators(d: u32) -> Result<MonomialSet> {
    check_small_degree(d)?;
    let (m, t) = (d / 3, d % 3);
    let i1 = m + t.min(1);
    let i2 = 2 * m + t.min(2);
    plane_set(
        d,
        &[
            [d, 0, 0],
            [0, d, 0],
            [0, 0, d],
            [i1, d - i1, 0],
            [i2, d - i2, 0],
            [d - i1, 0, i1],
            [d - i2, 0, i2],
            [0, i1, d - i1],
            [0, i2, d - i2],
        ],
    )
}

/// `P_n(d) = dim H^0(P^n, O(d)) = binomial(n + d, n)`.
pub fn p_n_of_d(n: usize, d: u64) -> BigUint {
    (1..=n as u64).fold(BigUint::from(1u32), |acc, i| acc * (d + i) / i)
}
