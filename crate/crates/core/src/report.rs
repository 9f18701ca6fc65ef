//! End-to-end checks behind `verify`: the slope bound for the `k(n)`-generator
//! construction, and the extension argument for `E_{17,2}` on `P^2`.

use std::fmt::Write;

use serde::Serialize;

use crate::bundle::{decompose, slope_ledger, Coverage, KernelBundleClass};
use crate::constructions::{
    a_interval, bound_b, construction1, e81_generators, e91_generators, lemma1_min_degree,
    ConstructionParams,
};
use crate::error::{Error, Result};
use crate::rational::Rational;
use crate::slope::{mu_max_bruteforce, mu_max_closure, SlopeProfile};

#[derive(Clone, Debug, Serialize)]
pub struct Lemma1Report {
    pub n: usize,
    pub d: u64,
    pub a_low: Rational,
    pub bound: Rational,
    pub profile: SlopeProfile,
    pub oracle: bool,
    pub pass: bool,
}

/// Computes `μ_max` of the construction at `A = A_low` and compares it with
/// `B(n, d)` exactly.
pub fn verify_lemma1(n: usize, d: u64, oracle: bool) -> Result<Lemma1Report> {
    let min = lemma1_min_degree(n);
    if n < 2 || d < min {
        return Err(Error::Hypothesis(format!(
            "need n >= 2 and d >= n^3 + 4n^2 - n = {min}, got n = {n}, d = {d}"
        )));
    }
    let params = ConstructionParams::with_default_a(n, d)?;
    let set = construction1(&params)?;
    let profile = if oracle {
        mu_max_bruteforce(&set)?
    } else {
        mu_max_closure(&set)?
    };
    let bound = bound_b(n, d);
    let (a_low, _) = a_interval(n, d).expect("interval checked above");
    Ok(Lemma1Report {
        n,
        d,
        pass: profile.mu_max <= bound,
        a_low,
        bound,
        profile,
        oracle,
    })
}

/// Leading coefficients of the `E_{9,1}` per-rank table.
pub fn e91_reference_coefficient(rank: usize) -> Rational {
    match rank {
        1 => Rational::new(-4, 3),
        2 => Rational::new(-7, 6),
        3 => Rational::new(-11, 9),
        4 => Rational::new(-7, 6),
        r => Rational::new(-(r as i64 + 1), r as i64),
    }
}

/// Leading coefficients of the `E_{8,1}` per-rank table.
pub fn e81_reference_coefficient(rank: usize) -> Rational {
    match rank {
        1 | 2 => Rational::new(-4, 3),
        3 => Rational::new(-11, 9),
        r => Rational::new(-(r as i64 + 1), r as i64),
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct Comparison {
    pub label: String,
    pub lhs: Rational,
    pub rhs: Rational,
    /// `lhs <= rhs`.
    pub holds: bool,
    /// `lhs < rhs`.
    pub strict: bool,
    /// Part of the extension argument; informational otherwise.
    pub required: bool,
}

impl Comparison {
    fn new(label: String, lhs: Rational, rhs: Rational, required: bool) -> Self {
        Comparison {
            holds: lhs <= rhs,
            strict: lhs < rhs,
            label,
            lhs,
            rhs,
            required,
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct Prop6Report {
    pub d: u64,
    pub covered_by_decomposition: bool,
    pub mu_e17_2: Rational,
    pub e81: SlopeProfile,
    pub e91: SlopeProfile,
    pub comparisons: Vec<Comparison>,
    pub notes: Vec<String>,
}

impl Prop6Report {
    /// Every comparison of the argument holds (semistability of `E_{17,2}`).
    pub fn pass(&self) -> bool {
        self.comparisons
            .iter()
            .filter(|c| c.required)
            .all(|c| c.holds)
    }

    /// Every comparison of the argument holds strictly (stability).
    pub fn strict(&self) -> bool {
        self.comparisons
            .iter()
            .filter(|c| c.required)
            .all(|c| c.strict)
    }
}

/// Slope comparisons for `0 -> E_{8,1} -> E_{17,2} -> E_{9,1} -> 0` at degree `d`.
///
/// A proper `W ⊂ E_{17,2}` either maps onto a proper subsheaf of `E_{9,1}`,
/// bounded by the maximum over ranks `r' <= 7` of the `E_{9,1}` table, or onto
/// all of it, in which case `μ(W) = ((r'-8) μ(W2) - 9d) / r'` with `W2` a
/// subsheaf of `E_{8,1}` bounded row by row by the `E_{8,1}` table.
pub fn prop6_report(d: u32) -> Result<Prop6Report> {
    let e81 = mu_max_closure(&e81_generators(d)?)?;
    let e91 = mu_max_closure(&e91_generators(d)?)?;
    let d64 = u64::from(d);
    let target = KernelBundleClass::new(2, 17, 2, d64)?;
    let mu = target.slope();
    let quotient = KernelBundleClass::new(2, 9, 1, d64)?;
    let mut comparisons = Vec::new();

    let proper = e91.max_below_size(9).expect("e91 has proper ranks");
    comparisons.push(Comparison::new(
        "max slope of E_{9,1} over ranks r' <= 7 vs mu(E_{17,2})".into(),
        proper,
        mu.clone(),
        true,
    ));
    for (rank, value) in e81.per_rank_table() {
        let w = slope_ledger(&value, rank as u64, &quotient.slope(), quotient.rank())?;
        comparisons.push(Comparison::new(
            format!(
                "W2 of rank {rank} in E_{{8,1}}, W1 = E_{{9,1}}: mu(W) bound vs mu(E_{{17,2}})"
            ),
            w,
            mu.clone(),
            true,
        ));
    }
    comparisons.push(Comparison::new(
        "mu_max(E_{8,1}) (all subsets) vs mu(E_{17,2})".into(),
        e81.mu_max.clone(),
        mu.clone(),
        false,
    ));
    comparisons.push(Comparison::new(
        "mu_max(E_{9,1}) (all subsets) vs mu(E_{17,2})".into(),
        e91.mu_max.clone(),
        mu.clone(),
        false,
    ));

    let mut notes = vec![
        format!(
            "E_{{8,1}} list has {} generators (rank {}), not 8",
            e81.per_size.len() + 1,
            e81.per_size.len()
        ),
        format!(
            "mu_max(E_{{8,1}}) = {} at r' = {}",
            e81.mu_max,
            e81.mu_max_witness.r - 1
        ),
        format!(
            "mu_max(E_{{9,1}}) = {} at r' = {} (the full set, equal to mu(E_{{9,1}}))",
            e91.mu_max,
            e91.mu_max_witness.r - 1
        ),
    ];
    for (label, profile, reference) in [
        (
            "E_{8,1}",
            &e81,
            e81_reference_coefficient as fn(usize) -> Rational,
        ),
        ("E_{9,1}", &e91, e91_reference_coefficient),
    ] {
        for (rank, value) in profile.per_rank_table() {
            let dev = value - reference(rank) * Rational::from_int(i64::from(d));
            if dev.abs() > Rational::from_int(1) {
                notes.push(format!(
                    "{label} r' = {rank}: deviates from reference leading term {} d by {dev}",
                    reference(rank)
                ));
            }
        }
    }

    Ok(Prop6Report {
        d: d64,
        covered_by_decomposition: matches!(decompose(17, 2, 2)?, Coverage::Covered(_)),
        mu_e17_2: mu,
        e81,
        e91,
        comparisons,
        notes,
    })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Prop6Thresholds {
    pub searched_up_to: u32,
    /// First `d` from which `mu_max(e81(d)) < μ(E_{17,2})` on the whole range.
    pub e81_mu_max: Option<u32>,
    /// Same for `e91(d)`.
    pub e91_mu_max: Option<u32>,
    /// First `d` from which every comparison of the argument holds.
    pub argument: Option<u32>,
    /// Same, with every comparison strict.
    pub argument_strict: Option<u32>,
}

/// Smallest `d0 in [3, max_d]` such that each condition holds on all of
/// `[d0, max_d]`.
pub fn prop6_thresholds(max_d: u32) -> Result<Prop6Thresholds> {
    let mut out = Prop6Thresholds {
        searched_up_to: max_d,
        e81_mu_max: None,
        e91_mu_max: None,
        argument: None,
        argument_strict: None,
    };
    let mut alive = [true; 4];
    for d in (3..=max_d).rev() {
        let r = prop6_report(d)?;
        let checks = [
            r.e81.mu_max < r.mu_e17_2,
            r.e91.mu_max < r.mu_e17_2,
            r.pass(),
            r.strict(),
        ];
        let slots = [
            &mut out.e81_mu_max,
            &mut out.e91_mu_max,
            &mut out.argument,
            &mut out.argument_strict,
        ];
        for ((ok, live), slot) in checks.into_iter().zip(alive.iter_mut()).zip(slots) {
            *live &= ok;
            if *live {
                *slot = Some(d);
            }
        }
        if !alive.iter().any(|&a| a) {
            break;
        }
    }
    Ok(out)
}

/// Text table in the `r' | value` layout.
pub fn format_rank_table(profile: &SlopeProfile, approx: bool) -> String {
    let mut out = String::from("  r'  | max slope\n  ----+----------\n");
    for (rank, value) in profile.per_rank_table() {
        if approx {
            let _ = writeln!(out, "  {rank:>3} | {value}  (~{:.4})", value.to_f64());
        } else {
            let _ = writeln!(out, "  {rank:>3} | {value}");
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn lemma1_boundary_case() {
        let r = verify_lemma1(2, 22, true).unwrap();
        assert!(r.pass);
        assert_eq!(r.profile.mu_max, Rational::from_int(-24));
        assert_eq!(r.profile.mu_max_witness.r, 2);
        assert_eq!(r.profile.per_size[&3].value, Rational::from_int(-24));
        assert!(matches!(
            verify_lemma1(2, 21, false),
            Err(Error::Hypothesis(_))
        ));
    }

    #[test]
    fn prop6_at_30() {
        let r = prop6_report(30).unwrap();
        assert_eq!(r.mu_e17_2, Rational::from_int(-34));
        assert!(!r.covered_by_decomposition);
        assert!(r.pass());
        // with the E_{8,1} rank-2 row at -7/6 d the bound ties mu(E_{17,2}) when 3 | d
        assert!(!r.strict());
        assert_eq!(r.e91.mu_max, Rational::new(-135, 4));
        assert!(prop6_report(31).unwrap().strict());
    }
}
