//! Maximal slope of a monomial syzygy bundle.
//!
//! For generators `f_i` of degrees `d_i`,
//!
//! ```text
//! mu_max(Syz(f_i, i in I)) = max over J ⊂ I, |J| >= 2 of (d_J - sum_{i in J} d_i) / (|J| - 1)
//! ```
//!
//! where `d_J` is the degree of the gcd of the `f_i` with `i ∈ J`. Two routes
//! compute it: [`mu_max_bruteforce`] enumerates every subset and serves as the
//! oracle, [`mu_max_closure`] works over the gcd-closure of the generators. For
//! a uniform degree `d` the closure route uses the fact that a size-`r` optimum
//! can always be taken to be `r` multiples of some closure element `g`, so
//! `D(r) = max { deg g : g has at least r multiples }`.
//!
//! Both routes break ties identically: within one size `r` the larger gcd
//! degree wins, then the lexicographically larger gcd; across sizes the
//! smallest `r` attaining the maximum is reported.

use std::cmp::Ordering;
use std::collections::{BTreeMap, HashSet};

use rayon::prelude::*;
use serde::ser::SerializeSeq;
use serde::{Serialize, Serializer};

use crate::error::{Error, Result};
use crate::monomial::{Monomial, MonomialSet};
use crate::rational::Rational;

/// Largest generator set accepted by the brute-force oracle.
pub const BRUTE_FORCE_CAP: usize = 24;

/// Default limit on the number of gcd-closure elements.
pub const DEFAULT_CLOSURE_CAP: usize = 2_000_000;

impl Serialize for Monomial {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        let mut seq = serializer.serialize_seq(Some(self.num_vars()))?;
        for e in self.exponents() {
            seq.serialize_element(e)?;
        }
        seq.end()
    }
}

/// Best subset data for one subset size `r`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SizeEntry {
    #[serde(rename = "best_dJ")]
    pub best_dj: u64,
    pub value: Rational,
    pub witness_gcd: Monomial,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Witness {
    pub r: usize,
    pub gcd: Monomial,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SlopeProfile {
    pub n: usize,
    pub d: Option<u64>,
    /// Keyed by subset size `r`, `2 <= r <= |I|`.
    pub per_size: BTreeMap<usize, SizeEntry>,
    pub mu_max: Rational,
    pub mu_max_witness: Witness,
}

impl SlopeProfile {
    /// Rows `(r', value)` with subsheaf rank `r' = r - 1`.
    pub fn per_rank_table(&self) -> Vec<(usize, Rational)> {
        self.per_size
            .iter()
            .map(|(&r, e)| (r - 1, e.value.clone()))
            .collect()
    }

    /// Maximum over sizes `r < limit`, i.e. over subsheaf ranks `r' < limit - 1`.
    pub fn max_below_size(&self, limit: usize) -> Option<Rational> {
        self.per_size
            .range(..limit)
            .map(|(_, e)| e.value.clone())
            .max()
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("profile serializes")
    }
}

/// Candidate optimum for one subset size: value `num / den`, then tie-breaks.
#[derive(Clone, Debug)]
struct Candidate {
    num: i128,
    den: i128,
    dj: u64,
    gcd: Vec<u32>,
}

impl Candidate {
    fn cmp_key(&self, num: i128, den: i128, dj: u64, gcd: &[u32]) -> Ordering {
        (self.num * den)
            .cmp(&(num * self.den))
            .then(self.dj.cmp(&dj))
            .then_with(|| self.gcd.as_slice().cmp(gcd))
    }

    fn beats(&self, other: &Candidate) -> bool {
        self.cmp_key(other.num, other.den, other.dj, &other.gcd) == Ordering::Greater
    }
}

fn offer(slot: &mut Option<Candidate>, num: i128, den: i128, dj: u64, gcd: &[u32]) {
    let better = match slot {
        None => true,
        Some(cur) => cur.cmp_key(num, den, dj, gcd) == Ordering::Less,
    };
    if better {
        *slot = Some(Candidate {
            num,
            den,
            dj,
            gcd: gcd.to_vec(),
        });
    }
}

fn merge_slots(mut a: Vec<Option<Candidate>>, b: Vec<Option<Candidate>>) -> Vec<Option<Candidate>> {
    for (x, y) in a.iter_mut().zip(b) {
        if let Some(y) = y {
            match x {
                Some(cur) if !y.beats(cur) => {}
                _ => *x = Some(y),
            }
        }
    }
    a
}

fn build_profile(s: &MonomialSet, slots: Vec<Option<Candidate>>) -> SlopeProfile {
    let mut per_size = BTreeMap::new();
    for (r, slot) in slots.into_iter().enumerate() {
        if let Some(c) = slot {
            per_size.insert(
                r,
                SizeEntry {
                    best_dj: c.dj,
                    value: Rational::new(c.num, c.den),
                    witness_gcd: Monomial::new(c.gcd).expect("valid gcd"),
                },
            );
        }
    }
    let (r, best) = per_size
        .iter()
        .fold(None::<(usize, &SizeEntry)>, |acc, (&r, e)| match acc {
            Some((_, b)) if e.value <= b.value => acc,
            _ => Some((r, e)),
        })
        .expect("at least one subset size");
    SlopeProfile {
        n: s.n(),
        d: s.uniform_degree(),
        mu_max: best.value.clone(),
        mu_max_witness: Witness {
            r,
            gcd: best.witness_gcd.clone(),
        },
        per_size,
    }
}

fn check_size(s: &MonomialSet) -> Result<()> {
    if s.len() < 2 {
        return Err(Error::TooFewMonomials(s.len()));
    }
    Ok(())
}

/// Exhaustive evaluation of the maximal-slope formula over all subsets.
/// Works for arbitrary (non-uniform) degrees.
pub fn mu_max_bruteforce(s: &MonomialSet) -> Result<SlopeProfile> {
    check_size(s)?;
    if s.len() > BRUTE_FORCE_CAP {
        return Err(Error::TooLargeForBruteForce {
            size: s.len(),
            cap: BRUTE_FORCE_CAP,
        });
    }
    let elems: Vec<&[u32]> = s.monomials().iter().map(|m| m.exponents()).collect();
    let degs: Vec<u64> = s.monomials().iter().map(Monomial::degree).collect();
    let size = elems.len();
    let vars = s.n() + 1;

    let slots = (0..size)
        .into_par_iter()
        .map(|first| {
            let mut slots = vec![None; size + 1];
            // stack[k] holds the gcd of the chosen subset of size k + 1
            let mut stack = vec![0u32; vars * size];
            stack[..vars].copy_from_slice(elems[first]);
            descend(
                &elems,
                &degs,
                vars,
                first + 1,
                1,
                degs[first],
                &mut stack,
                &mut slots,
            );
            slots
        })
        .reduce(|| vec![None; size + 1], merge_slots);

    Ok(build_profile(s, slots))
}

#[allow(clippy::too_many_arguments)]
fn descend(
    elems: &[&[u32]],
    degs: &[u64],
    vars: usize,
    start: usize,
    chosen: usize,
    deg_sum: u64,
    stack: &mut [u32],
    slots: &mut [Option<Candidate>],
) {
    for next in start..elems.len() {
        let (done, rest) = stack.split_at_mut(chosen * vars);
        let prev = &done[(chosen - 1) * vars..];
        let cur = &mut rest[..vars];
        let mut dj = 0u64;
        for ((c, &p), &e) in cur.iter_mut().zip(prev).zip(elems[next]) {
            *c = p.min(e);
            dj += u64::from(*c);
        }
        let r = chosen + 1;
        let sum = deg_sum + degs[next];
        offer(
            &mut slots[r],
            i128::from(dj) - i128::from(sum),
            (r - 1) as i128,
            dj,
            cur,
        );
        descend(elems, degs, vars, next + 1, r, sum, stack, slots);
    }
}

/// Every gcd of a nonempty subset of the generators.
pub fn gcd_closure(s: &MonomialSet, cap: usize) -> Result<Vec<Monomial>> {
    let mut seen: HashSet<Monomial> = HashSet::new();
    let mut order = Vec::new();
    let mut work = Vec::new();
    for m in s.monomials() {
        if seen.insert(m.clone()) {
            order.push(m.clone());
            work.push(m.clone());
        }
    }
    while let Some(x) = work.pop() {
        for m in s.monomials() {
            let g = x.meet(m);
            if !seen.contains(&g) {
                if seen.len() >= cap {
                    return Err(Error::ClosureCap { cap });
                }
                seen.insert(g.clone());
                order.push(g.clone());
                work.push(g);
            }
        }
    }
    Ok(order)
}

/// Maximal slope via the gcd-closure of the generators, with the default cap.
pub fn mu_max_closure(s: &MonomialSet) -> Result<SlopeProfile> {
    mu_max_closure_with_cap(s, DEFAULT_CLOSURE_CAP)
}

pub fn mu_max_closure_with_cap(s: &MonomialSet, cap: usize) -> Result<SlopeProfile> {
    check_size(s)?;
    let closure = gcd_closure(s, cap)?;
    let size = s.len();
    let monos = s.monomials();

    let slots = match s.uniform_degree() {
        Some(d) => {
            // best[r_g] = best closure element with exactly r_g multiples
            let by_mult = closure
                .par_iter()
                .map(|g| {
                    let mult: Vec<&Monomial> =
                        monos.iter().filter(|m| g.divides_unchecked(m)).collect();
                    let refined = mult
                        .iter()
                        .skip(1)
                        .fold(mult[0].clone(), |acc, m| acc.meet(m));
                    debug_assert!(g.divides_unchecked(&refined));
                    (mult.len(), refined)
                })
                .fold(
                    || vec![None::<Monomial>; size + 1],
                    |mut acc, (r, g)| {
                        keep_larger(&mut acc[r], g);
                        acc
                    },
                )
                .reduce(
                    || vec![None; size + 1],
                    |mut a, b| {
                        for (x, y) in a.iter_mut().zip(b) {
                            if let Some(y) = y {
                                keep_larger(x, y);
                            }
                        }
                        a
                    },
                );
            let mut slots = vec![None; size + 1];
            let mut running: Option<Monomial> = None;
            for r in (2..=size).rev() {
                if let Some(g) = by_mult[r].clone() {
                    keep_larger(&mut running, g);
                }
                if let Some(g) = &running {
                    let dj = g.degree();
                    let num = i128::from(dj) - (r as i128) * i128::from(d);
                    offer(&mut slots[r], num, (r - 1) as i128, dj, g.exponents());
                }
            }
            slots
        }
        None => closure
            .par_iter()
            .map(|g| {
                let mut slots = vec![None; size + 1];
                let mut mult: Vec<(u64, usize)> = monos
                    .iter()
                    .enumerate()
                    .filter(|(_, m)| g.divides_unchecked(m))
                    .map(|(i, m)| (m.degree(), i))
                    .collect();
                mult.sort_unstable();
                let mut h = monos[mult[0].1].clone();
                let mut sum = mult[0].0;
                for (r, &(deg, i)) in mult.iter().enumerate().skip(1).map(|(k, x)| (k + 1, x)) {
                    h = h.meet(&monos[i]);
                    sum += deg;
                    let dj = h.degree();
                    let num = i128::from(dj) - i128::from(sum);
                    offer(&mut slots[r], num, (r - 1) as i128, dj, h.exponents());
                }
                slots
            })
            .reduce(|| vec![None; size + 1], merge_slots),
    };
    Ok(build_profile(s, slots))
}

fn keep_larger(slot: &mut Option<Monomial>, g: Monomial) {
    let better = match slot {
        None => true,
        Some(cur) => (g.degree(), g.exponents()) > (cur.degree(), cur.exponents()),
    };
    if better {
        *slot = Some(g);
    }
}

/// Per-rank table `(r', value)` computed by the closure route.
pub fn per_rank_table(s: &MonomialSet) -> Result<Vec<(usize, Rational)>> {
    Ok(mu_max_closure(s)?.per_rank_table())
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Verdict {
    pub mu: Rational,
    pub mu_max: Rational,
    pub semistable: bool,
    pub stable_strictly: bool,
}

/// Semistability of `Syz(f_i)` for a basepoint-free uniform-degree family:
/// semistable iff `mu_max` equals the bundle slope `-a d / (a - 1)`.
pub fn semistable_verdict(s: &MonomialSet) -> Result<Verdict> {
    let d = s
        .uniform_degree()
        .ok_or_else(|| Error::InvalidParams("verdict needs a uniform degree".into()))?;
    check_size(s)?;
    if !s.is_basepoint_free()? {
        return Err(Error::Hypothesis(
            "generators have a common zero; the slope formula does not apply".into(),
        ));
    }
    let profile = mu_max_closure(s)?;
    let a = s.len() as i64;
    let mu = Rational::new(-a * d as i64, a - 1);
    let stable_strictly = profile.per_size.range(..s.len()).all(|(_, e)| e.value < mu);
    Ok(Verdict {
        semistable: profile.mu_max == mu,
        stable_strictly,
        mu_max: profile.mu_max,
        mu,
    })
}

/// `r` generators realising the size-`r` optimum: the lowest-degree multiples
/// of the recorded witness gcd, in input order among equal degrees.
pub fn witness_subset(profile: &SlopeProfile, s: &MonomialSet, r: usize) -> Result<Vec<Monomial>> {
    let entry = profile
        .per_size
        .get(&r)
        .ok_or_else(|| Error::OutOfRange(format!("no subsets of size {r}")))?;
    let mut mult: Vec<(u64, usize)> = s
        .monomials()
        .iter()
        .enumerate()
        .filter(|(_, m)| entry.witness_gcd.divides_unchecked(m))
        .map(|(i, m)| (m.degree(), i))
        .collect();
    mult.sort_unstable();
    if mult.len() < r {
        return Err(Error::OutOfRange(format!(
            "witness gcd has only {} multiples, need {r}",
            mult.len()
        )));
    }
    let mut picked: Vec<usize> = mult.into_iter().take(r).map(|(_, i)| i).collect();
    picked.sort_unstable();
    Ok(picked
        .into_iter()
        .map(|i| s.monomials()[i].clone())
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn set(n: usize, rows: &[&[u32]]) -> MonomialSet {
        MonomialSet::new(
            n,
            rows.iter()
                .map(|r| Monomial::new(r.to_vec()).unwrap())
                .collect(),
        )
        .unwrap()
    }

    fn e91_d3() -> MonomialSet {
        set(
            2,
            &[
                &[3, 0, 0],
                &[0, 3, 0],
                &[0, 0, 3],
                &[1, 2, 0],
                &[2, 1, 0],
                &[2, 0, 1],
                &[1, 0, 2],
                &[0, 1, 2],
                &[0, 2, 1],
            ],
        )
    }

    #[test]
    fn pure_powers_attain_full_set() {
        for n in 1..=4 {
            let s = MonomialSet::pure_powers(n, 5).unwrap();
            for p in [mu_max_bruteforce(&s).unwrap(), mu_max_closure(&s).unwrap()] {
                assert_eq!(p.mu_max, Rational::new(-((n as i64) + 1) * 5, n as i64));
                assert_eq!(p.mu_max_witness.r, n + 1);
                assert_eq!(p.per_size[&(n + 1)].best_dj, 0);
            }
        }
    }

    #[test]
    fn e91_degree_three() {
        let s = e91_d3();
        let p = mu_max_bruteforce(&s).unwrap();
        assert_eq!(p.mu_max, Rational::new(-27, 8));
        assert_eq!(p.mu_max_witness.r, 9);
        assert_eq!(mu_max_closure(&s).unwrap(), p);
        let v = semistable_verdict(&s).unwrap();
        assert!(v.semistable);
    }

    #[test]
    fn single_pair() {
        let s = set(2, &[&[2, 1, 0], &[2, 0, 1]]);
        let p = mu_max_bruteforce(&s).unwrap();
        assert_eq!(p.mu_max, Rational::from_int(-4));
        assert_eq!(mu_max_closure(&s).unwrap(), p);
    }

    #[test]
    fn destabilising_pair() {
        let s = set(
            2,
            &[&[2, 1, 0], &[2, 0, 1], &[3, 0, 0], &[0, 3, 0], &[0, 0, 3]],
        );
        let v = semistable_verdict(&s).unwrap();
        assert_eq!(v.mu, Rational::new(-15, 4));
        // the pair {x0^2x1, x0^2x2} gives -4 < mu, but adding x0^3 gives gcd x0^2 and -7/2 > mu
        assert_eq!(v.mu_max, Rational::new(-7, 2));
        assert!(!v.semistable);
        assert!(!v.stable_strictly);
    }

    #[test]
    fn pure_power_rank_table() {
        let s = MonomialSet::pure_powers(2, 6).unwrap();
        let t = per_rank_table(&s).unwrap();
        assert_eq!(
            t,
            vec![(1, Rational::from_int(-12)), (2, Rational::from_int(-9))]
        );
    }

    #[test]
    fn errors() {
        let one = set(1, &[&[1, 1]]);
        assert!(matches!(
            mu_max_bruteforce(&one),
            Err(Error::TooFewMonomials(1))
        ));
        assert!(matches!(
            mu_max_closure(&one),
            Err(Error::TooFewMonomials(1))
        ));
        let big = MonomialSet::new(
            1,
            (0..25)
                .map(|i| Monomial::new(vec![i, 30 - i]).unwrap())
                .collect(),
        )
        .unwrap();
        assert!(matches!(
            mu_max_bruteforce(&big),
            Err(Error::TooLargeForBruteForce { size: 25, .. })
        ));
        assert!(matches!(
            mu_max_closure_with_cap(&e91_d3(), 5),
            Err(Error::ClosureCap { cap: 5 })
        ));
        let cyc = set(2, &[&[1, 1, 0], &[0, 1, 1], &[1, 0, 1]]);
        assert!(matches!(
            semistable_verdict(&cyc),
            Err(Error::Hypothesis(_))
        ));
        let p = mu_max_closure(&e91_d3()).unwrap();
        assert!(witness_subset(&p, &e91_d3(), 10).is_err());
        assert!(witness_subset(&p, &e91_d3(), 1).is_err());
    }

    #[test]
    fn witness_of_full_size_is_everything() {
        let s = MonomialSet::pure_powers(3, 2).unwrap();
        let p = mu_max_closure(&s).unwrap();
        assert_eq!(witness_subset(&p, &s, 4).unwrap(), s.monomials());
    }

    #[test]
    fn non_uniform_routes_agree() {
        let s = set(
            2,
            &[&[4, 0, 0], &[0, 2, 0], &[1, 1, 1], &[2, 1, 0], &[0, 0, 5]],
        );
        let a = mu_max_bruteforce(&s).unwrap();
        let b = mu_max_closure(&s).unwrap();
        assert_eq!(a.mu_max, b.mu_max);
        for (r, e) in &a.per_size {
            assert_eq!(e.value, b.per_size[r].value, "size {r}");
            let w = witness_subset(&b, &s, *r).unwrap();
            let g = w.iter().skip(1).fold(w[0].clone(), |acc, m| acc.meet(m));
            let sum: u64 = w.iter().map(Monomial::degree).sum();
            assert_eq!(
                Rational::new(g.degree() as i64 - sum as i64, (*r - 1) as i64),
                e.value
            );
        }
    }

    #[test]
    fn profile_json_uses_strings() {
        let p = mu_max_closure(&e91_d3()).unwrap();
        let js = p.to_json();
        assert!(js.contains(r#""mu_max":"-27/8""#), "{js}");
        assert!(js.contains(r#""best_dJ""#));
    }
}
