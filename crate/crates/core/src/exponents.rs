//! Exact-rational exponent calculus: admissibility of (q, r1, r2) triples,
//! the dyadic decay exponent beta, the dual-triple relations behind the
//! nonlinear solver, and the feasibility constraints on (q, r1, r2, alpha).
//!
//! Exponents are stored as reciprocals (0 encodes infinity) so that every
//! admissibility question is an equality or inequality between rationals and
//! never touches floating point.

use num_rational::Rational64;
use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::norms::Exponent;

pub type Rat = Rational64;

/// Shorthand for a reduced rational.
pub fn rat(num: i64, den: i64) -> Rat {
    Rat::new(num, den)
}

/// Parses "p/q" or "p" into a rational.
pub fn parse_rational(s: &str) -> Result<Rat> {
    let bad = || Error::BadInverseExponent(s.to_string());
    let mut parts = s.splitn(2, '/');
    let num: i64 = parts.next().ok_or_else(bad)?.trim().parse().map_err(|_| bad())?;
    match parts.next() {
        None => Ok(Rat::from_integer(num)),
        Some(den) => {
            let den: i64 = den.trim().parse().map_err(|_| bad())?;
            if den == 0 {
                return Err(bad());
            }
            Ok(Rat::new(num, den))
        }
    }
}

/// An exponent triple (q, r1, r2) held as exact reciprocals.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct ExponentTriple {
    inv_q: Rat,
    inv_r1: Rat,
    inv_r2: Rat,
}

impl ExponentTriple {
    /// Builds a triple from reciprocals; each must lie in [0, 1].
    pub fn from_inverses(inv_q: Rat, inv_r1: Rat, inv_r2: Rat) -> Result<Self> {
        for v in [inv_q, inv_r1, inv_r2] {
            if v < Rat::zero() || v > Rat::one() {
                return Err(Error::BadInverseExponent(v.to_string()));
            }
        }
        Ok(Self { inv_q, inv_r1, inv_r2 })
    }

    pub fn inv_q(&self) -> Rat {
        self.inv_q
    }

    pub fn inv_r1(&self) -> Rat {
        self.inv_r1
    }

    pub fn inv_r2(&self) -> Rat {
        self.inv_r2
    }

    pub fn q(&self) -> Exponent {
        inverse_to_exponent(self.inv_q)
    }

    pub fn r1(&self) -> Exponent {
        inverse_to_exponent(self.inv_r1)
    }

    pub fn r2(&self) -> Exponent {
        inverse_to_exponent(self.inv_r2)
    }
}

impl std::fmt::Display for ExponentTriple {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "(q, r1, r2) with reciprocals ({}, {}, {})", self.inv_q, self.inv_r1, self.inv_r2)
    }
}

fn inverse_to_exponent(inv: Rat) -> Exponent {
    if inv.is_zero() {
        Exponent::Infinity
    } else {
        Exponent::Finite(*inv.denom() as f64 / *inv.numer() as f64)
    }
}

/// Why a triple fails the admissibility test.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum InadmissibleReason {
    /// q < 2, i.e. 1/q > 1/2.
    QBelowTwo,
    /// r2 < 2, i.e. 1/r2 > 1/2.
    RBelowTwo,
    /// r1 < r2 violates the required ordering.
    ROutOfOrder,
    /// The scaling relation 2/q = n(1 - 1/r1 - 1/r2) fails.
    ScalingRelation,
    /// One of the two endpoint triples excluded by the estimate.
    ExcludedEndpoint,
}

impl std::fmt::Display for InadmissibleReason {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let s = match self {
            InadmissibleReason::QBelowTwo => "q < 2",
            InadmissibleReason::RBelowTwo => "r2 < 2",
            InadmissibleReason::ROutOfOrder => "r1 < r2",
            InadmissibleReason::ScalingRelation => {
                "scaling relation 2/q = n(1 - 1/r1 - 1/r2) fails"
            }
            InadmissibleReason::ExcludedEndpoint => "excluded endpoint",
        };
        write!(f, "{s}")
    }
}

/// Outcome of the admissibility test, carrying the failed clause if any.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Admissibility {
    Admissible,
    Inadmissible(InadmissibleReason),
}

impl Admissibility {
    pub fn is_admissible(&self) -> bool {
        matches!(self, Admissibility::Admissible)
    }

    pub fn reason(&self) -> Option<InadmissibleReason> {
        match self {
            Admissibility::Admissible => None,
            Admissibility::Inadmissible(r) => Some(*r),
        }
    }
}

/// Decides in exact arithmetic whether (q, r1, r2) is admissible for
/// dimension n: q >= 2, 2 <= r2 <= r1 <= infinity, the scaling relation
/// 2/q = n(1 - 1/r1 - 1/r2), and not one of the two excluded endpoints
/// (2, inf, inf) for n = 1 and (2, inf, 2) for n = 2.
pub fn is_admissible(n: u32, triple: &ExponentTriple) -> Admissibility {
    use Admissibility::Inadmissible;
    let half = rat(1, 2);
    if triple.inv_q > half {
        return Inadmissible(InadmissibleReason::QBelowTwo);
    }
    if triple.inv_r2 > half {
        return Inadmissible(InadmissibleReason::RBelowTwo);
    }
    if triple.inv_r1 > triple.inv_r2 {
        return Inadmissible(InadmissibleReason::ROutOfOrder);
    }
    let n_rat = Rat::from_integer(n as i64);
    if rat(2, 1) * triple.inv_q != n_rat * (Rat::one() - triple.inv_r1 - triple.inv_r2) {
        return Inadmissible(InadmissibleReason::ScalingRelation);
    }
    let excluded = (n == 1 && *triple == endpoint(half, Rat::zero(), Rat::zero()))
        || (n == 2 && *triple == endpoint(half, Rat::zero(), half));
    if excluded {
        return Inadmissible(InadmissibleReason::ExcludedEndpoint);
    }
    Admissibility::Admissible
}

fn endpoint(inv_q: Rat, inv_r1: Rat, inv_r2: Rat) -> ExponentTriple {
    ExponentTriple { inv_q, inv_r1, inv_r2 }
}

/// Requires admissibility, returning a typed error naming the failed clause.
pub fn require_admissible(n: u32, triple: &ExponentTriple) -> Result<()> {
    match is_admissible(n, triple) {
        Admissibility::Admissible => Ok(()),
        Admissibility::Inadmissible(reason) => Err(Error::InadmissibleTriple {
            n,
            triple: triple.to_string(),
            reason: reason.to_string(),
        }),
    }
}

/// The dyadic decay exponent
/// beta(a, a~) = -1 + (n/2) (2 - 1/a - 1/a~ - 2/r2),
/// taking all exponents as reciprocals.
pub fn beta(n: u32, inv_a: Rat, inv_a_tilde: Rat, inv_r2: Rat) -> Rat {
    let n_rat = Rat::from_integer(n as i64);
    -Rat::one() + n_rat / rat(2, 1) * (rat(2, 1) - inv_a - inv_a_tilde - rat(2, 1) * inv_r2)
}

/// The perturbed pair (1/a0, 1/a1) = (1/r1 - 2e, 1/r1 + 4e) used in the
/// dyadic-decay interpolation. With the hypothesis 1 = n(1 - 1/r1 - 1/r2)
/// these satisfy beta(a0, a0) = 2n*eps and beta(a0, a1) = -n*eps exactly.
pub fn whitney_perturbation(inv_r1: Rat, eps: Rat) -> (Rat, Rat) {
    (inv_r1 - rat(2, 1) * eps, inv_r1 + rat(4, 1) * eps)
}

/// The dual exponents produced by the Hoelder relations for a nonlinearity
/// of power alpha, together with the time-integrability gap.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct NonlinearExponents {
    pub n: u32,
    pub alpha: Rat,
    pub dual: ExponentTriple,
    /// 1/q~' - 1/q = (2 + alpha - n*alpha)/2, positive inside the regime.
    pub gap: Rat,
}

/// Derives the dual triple (q~, r~1, r~2) from
/// 1/r~1' = alpha/2 + 1/r1 and 1/r~2' = alpha(1/2 - 1/n) + 1/r2,
/// with q~ fixed by the scaling relation. Errors if the input is not
/// admissible or if any derived exponent leaves the admissible range.
pub fn dual_triple(n: u32, alpha: Rat, triple: &ExponentTriple) -> Result<NonlinearExponents> {
    if alpha < Rat::zero() {
        return Err(Error::BadInverseExponent(alpha.to_string()));
    }
    require_admissible(n, triple)?;
    let n_rat = Rat::from_integer(n as i64);
    let inv_dual_r1 = Rat::one() - alpha / rat(2, 1) - triple.inv_r1;
    let inv_dual_r2 =
        Rat::one() - alpha * (rat(1, 2) - Rat::one() / n_rat) - triple.inv_r2;
    let inv_dual_q = alpha * (n_rat - Rat::one()) / rat(2, 1) - triple.inv_q;
    for (name, v) in [
        ("1/q~", inv_dual_q),
        ("1/r~1", inv_dual_r1),
        ("1/r~2", inv_dual_r2),
    ] {
        if v < Rat::zero() || v > Rat::one() {
            return Err(Error::DualOutOfRange(format!("{name} = {v} outside [0, 1]")));
        }
    }
    let dual = ExponentTriple { inv_q: inv_dual_q, inv_r1: inv_dual_r1, inv_r2: inv_dual_r2 };
    if let Admissibility::Inadmissible(reason) = is_admissible(n, &dual) {
        return Err(Error::DualOutOfRange(format!("dual triple {dual}: {reason}")));
    }
    // 1/q~' - 1/q with 1/q~' = 1 - 1/q~
    let gap = Rat::one() - inv_dual_q - triple.inv_q;
    debug_assert_eq!(gap, (rat(2, 1) + alpha - n_rat * alpha) / rat(2, 1));
    Ok(NonlinearExponents { n, alpha, dual, gap })
}

/// One inequality of the feasibility chain with its exact verdict.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ResClause {
    pub name: &'static str,
    pub holds: bool,
}

/// Verdicts for the exponent-range constraints tied to the nonlinearity:
/// (alpha(n-1) - 1)/2 <= 1/q <= alpha(n-1)/2 and
/// 1/2 - alpha/2 <= 1/r2 - alpha/n <= 1/r1 <= 1 - alpha/2.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ResReport {
    pub clauses: [ResClause; 5],
}

impl ResReport {
    pub fn pass(&self) -> bool {
        self.clauses.iter().all(|c| c.holds)
    }

    pub fn failed(&self) -> Vec<&'static str> {
        self.clauses.iter().filter(|c| !c.holds).map(|c| c.name).collect()
    }
}

/// Evaluates both chains of the feasibility constraints exactly.
pub fn res_constraints(n: u32, alpha: Rat, triple: &ExponentTriple) -> ResReport {
    let n_rat = Rat::from_integer(n as i64);
    let q_lo = (alpha * (n_rat - Rat::one()) - Rat::one()) / rat(2, 1);
    let q_hi = alpha * (n_rat - Rat::one()) / rat(2, 1);
    let r2_shifted = triple.inv_r2 - alpha / n_rat;
    ResReport {
        clauses: [
            ResClause { name: "(alpha(n-1)-1)/2 <= 1/q", holds: q_lo <= triple.inv_q },
            ResClause { name: "1/q <= alpha(n-1)/2", holds: triple.inv_q <= q_hi },
            ResClause {
                name: "1/2 - alpha/2 <= 1/r2 - alpha/n",
                holds: rat(1, 2) - alpha / rat(2, 1) <= r2_shifted,
            },
            ResClause { name: "1/r2 - alpha/n <= 1/r1", holds: r2_shifted <= triple.inv_r1 },
            ResClause {
                name: "1/r1 <= 1 - alpha/2",
                holds: triple.inv_r1 <= Rat::one() - alpha / rat(2, 1),
            },
        ],
    }
}

/// Interval-emptiness check: some 1/q in [0, 1/2] can satisfy the first
/// chain iff (alpha(n-1) - 1)/2 <= 1/2.
pub fn res_q_interval_nonempty(n: u32, alpha: Rat) -> bool {
    let n_rat = Rat::from_integer(n as i64);
    (alpha * (n_rat - Rat::one()) - Rat::one()) / rat(2, 1) <= rat(1, 2)
}

/// A labeled point of the admissibility region scan.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct RegionPoint {
    pub triple: ExponentTriple,
    pub admissible: bool,
}

/// Visits every triple whose reciprocals 1/r1, 1/r2 are reduced fractions in
/// [0, 1/2] with denominator at most `denominator_bound` and whose 1/q is
/// fixed by the scaling relation (points with 1/q outside [0, 1] are
/// skipped as they encode no exponent).
pub fn region_scan_with(
    n: u32,
    denominator_bound: i64,
    mut visit: impl FnMut(&RegionPoint),
) {
    let fractions = half_unit_fractions(denominator_bound);
    let n_rat = Rat::from_integer(n as i64);
    for &inv_r1 in &fractions {
        for &inv_r2 in &fractions {
            let inv_q = n_rat * (Rat::one() - inv_r1 - inv_r2) / rat(2, 1);
            if inv_q < Rat::zero() || inv_q > Rat::one() {
                continue;
            }
            let triple = ExponentTriple { inv_q, inv_r1, inv_r2 };
            let admissible = is_admissible(n, &triple).is_admissible();
            visit(&RegionPoint { triple, admissible });
        }
    }
}

/// Collected form of [`region_scan_with`]; intended for modest denominator
/// bounds.
pub fn region_scan(n: u32, denominator_bound: i64) -> Vec<RegionPoint> {
    let mut out = Vec::new();
    region_scan_with(n, denominator_bound, |p| out.push(*p));
    out
}

/// All reduced fractions in [0, 1/2] with denominator <= bound, ascending.
pub fn half_unit_fractions(bound: i64) -> Vec<Rat> {
    let mut out = vec![Rat::zero()];
    for den in 1..=bound {
        for num in 1..=den / 2 {
            if gcd(num, den) == 1 {
                out.push(rat(num, den));
            }
        }
    }
    out.sort();
    out.dedup();
    out
}

fn gcd(a: i64, b: i64) -> i64 {
    if b == 0 { a } else { gcd(b, a % b) }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn triple(inv_q: Rat, inv_r1: Rat, inv_r2: Rat) -> ExponentTriple {
        ExponentTriple::from_inverses(inv_q, inv_r1, inv_r2).unwrap()
    }

    #[test]
    fn excluded_endpoints() {
        let e1 = triple(rat(1, 2), rat(0, 1), rat(0, 1));
        match is_admissible(1, &e1) {
            Admissibility::Inadmissible(r) => assert_eq!(r.to_string(), "excluded endpoint"),
            _ => panic!("(2, inf, inf) must be excluded for n = 1"),
        }
        let e2 = triple(rat(1, 2), rat(0, 1), rat(1, 2));
        match is_admissible(2, &e2) {
            Admissibility::Inadmissible(r) => assert_eq!(r.to_string(), "excluded endpoint"),
            _ => panic!("(2, inf, 2) must be excluded for n = 2"),
        }
        // the same triples are fine in other dimensions where the scaling
        // relation holds
        assert!(is_admissible(2, &triple(rat(1, 2), rat(0, 1), rat(1, 2))).reason().is_some());
    }

    #[test]
    fn point_b_admissible_for_all_n() {
        for n in 1..=6 {
            let b = triple(rat(0, 1), rat(1, 2), rat(1, 2));
            assert!(is_admissible(n, &b).is_admissible(), "n={n}");
        }
    }

    #[test]
    fn sample_admissible_triple_n1() {
        // (q, r1, r2) = (4, inf, 2): 2/4 = 1 * (1 - 0 - 1/2)
        let t = triple(rat(1, 4), rat(0, 1), rat(1, 2));
        assert!(is_admissible(1, &t).is_admissible());
    }

    #[test]
    fn failed_clauses_are_named() {
        let bad_order = triple(rat(0, 1), rat(1, 2), rat(1, 4));
        assert_eq!(
            is_admissible(1, &bad_order).reason(),
            Some(InadmissibleReason::ROutOfOrder)
        );
        let bad_scaling = triple(rat(1, 4), rat(1, 2), rat(1, 2));
        assert_eq!(
            is_admissible(1, &bad_scaling).reason(),
            Some(InadmissibleReason::ScalingRelation)
        );
        let bad_q = triple(rat(3, 4), rat(1, 4), rat(1, 4));
        assert_eq!(is_admissible(1, &bad_q).reason(), Some(InadmissibleReason::QBelowTwo));
    }

    #[test]
    fn beta_vanishes_on_the_hypothesis_diagonal() {
        // 1 = n(1 - 1/r1 - 1/r2) with a = a~ = r1
        for (n, inv_r1) in [(2u32, rat(1, 8)), (3, rat(1, 4)), (4, rat(3, 10))] {
            let inv_r2 = Rat::one() - Rat::one() / Rat::from_integer(n as i64) - inv_r1;
            assert!(beta(n, inv_r1, inv_r1, inv_r2).is_zero(), "n={n}");
        }
    }

    #[test]
    fn beta_perturbation_identities() {
        let n = 3u32;
        let inv_r1 = rat(1, 4);
        let inv_r2 = Rat::one() - rat(1, 3) - inv_r1; // hypothesis for n = 3
        let eps = rat(1, 30);
        let (inv_a0, inv_a1) = whitney_perturbation(inv_r1, eps);
        let n_rat = Rat::from_integer(n as i64);
        assert_eq!(beta(n, inv_a0, inv_a0, inv_r2), rat(2, 1) * n_rat * eps);
        assert_eq!(beta(n, inv_a0, inv_a1, inv_r2), -n_rat * eps);
        assert_eq!(beta(n, inv_a1, inv_a0, inv_r2), -n_rat * eps);
    }

    #[test]
    fn beta_is_symmetric() {
        let cases = [
            (1u32, rat(1, 3), rat(1, 5), rat(1, 2)),
            (3, rat(0, 1), rat(1, 4), rat(2, 5)),
        ];
        for (n, a, b, r2) in cases {
            assert_eq!(beta(n, a, b, r2), beta(n, b, a, r2));
        }
    }

    #[test]
    fn dual_triple_worked_example_n3() {
        // input (q, r1, r2) = (2, 4, 12/5), alpha = 1/2:
        // dual comes out to the point B, (inf, 2, 2), with gap 1/2
        let t = triple(rat(1, 2), rat(1, 4), rat(5, 12));
        let d = dual_triple(3, rat(1, 2), &t).unwrap();
        assert_eq!(d.dual.inv_q(), rat(0, 1));
        assert_eq!(d.dual.inv_r1(), rat(1, 2));
        assert_eq!(d.dual.inv_r2(), rat(1, 2));
        assert_eq!(d.gap, rat(1, 2));
    }

    #[test]
    fn dual_triple_rejects_out_of_range() {
        // r1 = r2 = 3 for n = 3 gives q = 2, admissible, but the dual r~2
        // falls below 2
        let t = triple(rat(1, 2), rat(1, 3), rat(1, 3));
        assert!(is_admissible(3, &t).is_admissible());
        assert!(matches!(dual_triple(3, rat(1, 2), &t), Err(Error::DualOutOfRange(_))));
    }

    #[test]
    fn dual_triple_alpha_zero_degenerates_to_the_dual() {
        // at alpha = 0 the relations give r~l' = rl, so the dual triple is
        // the conjugate of the input; q = infinity keeps 1/q~ in range
        let b = triple(rat(0, 1), rat(1, 2), rat(1, 2));
        let d = dual_triple(3, Rat::zero(), &b).unwrap();
        assert_eq!(d.dual.inv_r1(), Rat::one() - b.inv_r1());
        assert_eq!(d.dual.inv_r2(), Rat::one() - b.inv_r2());
        assert_eq!(d.gap, Rat::one());
    }

    #[test]
    fn res_constraint_clauses() {
        // violating 1/r1 <= 1 - alpha/2 is reported by name
        let t = triple(rat(1, 2), rat(1, 2), rat(1, 2));
        let report = res_constraints(3, rat(3, 2), &t);
        assert!(!report.pass());
        assert!(report.failed().contains(&"1/r1 <= 1 - alpha/2"));

        // the worked example passes every clause
        let ok = triple(rat(1, 2), rat(1, 4), rat(5, 12));
        assert!(res_constraints(3, rat(1, 2), &ok).pass());
    }

    #[test]
    fn res_interval_emptiness() {
        // alpha(n-1) > 2 empties the q-interval
        assert!(!res_q_interval_nonempty(3, rat(3, 2)));
        assert!(res_q_interval_nonempty(3, rat(1, 3)));
        assert!(res_q_interval_nonempty(1, rat(10, 1))); // n = 1 never restricts q from above
    }

    #[test]
    fn region_scan_self_consistent() {
        let points = region_scan(1, 8);
        assert!(!points.is_empty());
        for p in &points {
            assert_eq!(is_admissible(1, &p.triple).is_admissible(), p.admissible);
            if p.admissible {
                // the relation holds exactly
                let lhs = rat(2, 1) * p.triple.inv_q();
                let rhs = Rat::one() - p.triple.inv_r1() - p.triple.inv_r2();
                assert_eq!(lhs, rhs);
            }
        }
        // the excluded endpoint shows up labeled inadmissible
        assert!(points.iter().any(|p| p.triple.inv_q() == rat(1, 2)
            && p.triple.inv_r1().is_zero()
            && p.triple.inv_r2().is_zero()
            && !p.admissible));
    }

    #[test]
    fn diagonal_slice_satisfies_schroedinger_relation() {
        region_scan_with(2, 12, |p| {
            if p.admissible && p.triple.inv_r1() == p.triple.inv_r2() {
                // 2/q = n(1 - 2/r1)
                let lhs = rat(2, 1) * p.triple.inv_q();
                let rhs = rat(2, 1) * (Rat::one() - rat(2, 1) * p.triple.inv_r1());
                assert_eq!(lhs, rhs);
            }
        });
    }

    #[test]
    fn parse_rational_forms() {
        assert_eq!(parse_rational("1/4").unwrap(), rat(1, 4));
        assert_eq!(parse_rational("0").unwrap(), Rat::zero());
        assert_eq!(parse_rational(" 3 / 12 ").unwrap(), rat(1, 4));
        assert!(parse_rational("1/0").is_err());
        assert!(parse_rational("x").is_err());
    }
}
