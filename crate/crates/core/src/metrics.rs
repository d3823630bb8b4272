//! How much contextuality a target functional value requires.
//!
//! The central quantity is the smallest total weight that a probability
//! mixture of assignments must place on contextual assignments for its
//! expected functional value to equal a target `lambda`. For CHSH this is
//! `max(0, (|lambda| - 2) / 2)`, which at Tsirelson's `2 sqrt 2` gives
//! `sqrt 2 - 1` contextual against `2 - sqrt 2` noncontextual weight.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use num_traits::{One, Signed, Zero};

use crate::enumeration::{self, Assignment};
use crate::error::{Error, Result};
use crate::lp::{LinearProgram, LpOutcome, Relation};
use crate::polytope::functional_range;
use crate::rational::{fmt_both, fmt_fraction, int, ratio, Rational};
use crate::scenario::Scenario;

/// Rational stand-in for 2 sqrt 2 used when no other approximation is given.
pub fn tsirelson_default() -> Rational {
    ratio(707, 250)
}

/// sqrt 2 - 1 to 12 significant digits.
pub fn tsirelson_fraction_decimal() -> String {
    crate::rational::sqrt2_minus_one_decimal()
}

pub const TSIRELSON_RATIO_SYMBOLIC: &str = "(√2−1):(2−√2)";

/// Probability weights over assignments; zero weights are not stored.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Mixture {
    weights: BTreeMap<Assignment, Rational>,
}

impl Mixture {
    pub fn new(weights: impl IntoIterator<Item = (Assignment, Rational)>) -> Result<Self> {
        let mut map: BTreeMap<Assignment, Rational> = BTreeMap::new();
        for (a, w) in weights {
            if w.is_negative() {
                return Err(Error::InvalidMixture(format!("negative weight {}", fmt_fraction(&w))));
            }
            *map.entry(a).or_insert_with(Rational::zero) += w;
        }
        map.retain(|_, w| !w.is_zero());
        let total: Rational = map.values().sum();
        if !total.is_one() {
            return Err(Error::InvalidMixture(format!("weights sum to {}", fmt_fraction(&total))));
        }
        Ok(Mixture { weights: map })
    }

    pub fn point(a: Assignment) -> Self {
        Mixture { weights: BTreeMap::from([(a, Rational::one())]) }
    }

    pub fn uniform(assignments: impl IntoIterator<Item = Assignment>) -> Result<Self> {
        let list: Vec<Assignment> = assignments.into_iter().collect();
        if list.is_empty() {
            return Err(Error::InvalidMixture("no assignments".into()));
        }
        let w = ratio(1, list.len() as i64);
        Mixture::new(list.into_iter().map(|a| (a, w.clone())))
    }

    /// Support in enumeration order.
    pub fn support(&self) -> impl Iterator<Item = (&Assignment, &Rational)> {
        self.weights.iter()
    }

    pub fn weight(&self, a: &Assignment) -> Rational {
        self.weights.get(a).cloned().unwrap_or_else(Rational::zero)
    }

    pub fn expected_functional(&self, s: &Scenario) -> Result<Rational> {
        let mut total = Rational::zero();
        for (a, w) in &self.weights {
            total += w * int(enumeration::functional_value(s, a)?);
        }
        Ok(total)
    }

    /// Total weight on assignments that are not noncontextual.
    pub fn contextual_weight(&self, s: &Scenario) -> Rational {
        self.weights
            .iter()
            .filter(|(a, _)| !enumeration::is_noncontextual(s, a))
            .map(|(_, w)| w)
            .sum()
    }

    /// `index:weight` pairs joined by commas.
    pub fn support_string(&self) -> String {
        self.weights
            .iter()
            .map(|(a, w)| format!("{}:{}", a.index(), fmt_fraction(w)))
            .collect::<Vec<_>>()
            .join(",")
    }
}

/// Whether the expected value must equal the target or merely reach it.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum TargetMode {
    #[default]
    Exact,
    AtLeast,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ContextualityReport {
    pub lambda_target: Rational,
    pub mode: TargetMode,
    pub min_contextual_fraction: Rational,
    /// (contextual weight, noncontextual weight)
    pub ratio_contextual_to_noncontextual: (Rational, Rational),
    pub witness: Mixture,
    pub average_contextual_per_quantum: Rational,
}

impl ContextualityReport {
    /// `key=value` lines: lambda, fraction, ratio, witness support and the
    /// witness's average contextuality count.
    pub fn to_key_values(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "lambda={}", fmt_both(&self.lambda_target));
        if self.mode == TargetMode::AtLeast {
            let _ = writeln!(out, "mode=at-least");
        }
        let _ = writeln!(out, "fraction={}", fmt_both(&self.min_contextual_fraction));
        let (c, n) = &self.ratio_contextual_to_noncontextual;
        let _ = writeln!(out, "ratio={}:{}", fmt_fraction(c), fmt_fraction(n));
        let _ = writeln!(out, "witness_support={}", self.witness.support_string());
        let _ = writeln!(
            out,
            "average_contextual_per_quantum={}",
            fmt_both(&self.average_contextual_per_quantum)
        );
        out
    }
}

/// Minimum contextual weight over mixtures whose expected functional value is
/// `lambda_target`, solved exactly over every enumerated assignment.
pub fn min_contextual_fraction(s: &Scenario, lambda_target: &Rational) -> Result<ContextualityReport> {
    min_contextual_fraction_with(s, lambda_target, TargetMode::Exact)
}

pub fn min_contextual_fraction_with(
    s: &Scenario,
    lambda_target: &Rational,
    mode: TargetMode,
) -> Result<ContextualityReport> {
    let (lo, hi) = functional_range(s, false)?;
    let below = mode == TargetMode::Exact && *lambda_target < int(lo);
    if below || *lambda_target > int(hi) {
        return Err(Error::InfeasibleTarget {
            target: fmt_fraction(lambda_target),
            min: lo.to_string(),
            max: hi.to_string(),
        });
    }

    let assignments = enumeration::enumerate_assignments(s)?;
    let objective: Vec<Rational> = assignments
        .iter()
        .map(|a| if enumeration::is_noncontextual(s, a) { Rational::zero() } else { Rational::one() })
        .collect();
    let values: Vec<Rational> = assignments
        .iter()
        .map(|a| enumeration::functional_value(s, a).map(int))
        .collect::<Result<_>>()?;
    let relation = match mode {
        TargetMode::Exact => Relation::Eq,
        TargetMode::AtLeast => Relation::Ge,
    };
    let lp = LinearProgram::minimize(objective)
        .subject_to(vec![Rational::one(); assignments.len()], Relation::Eq, Rational::one())
        .subject_to(values, relation, lambda_target.clone());

    let (value, x) = match lp.solve() {
        LpOutcome::Optimal { value, x } => (value, x),
        LpOutcome::Infeasible | LpOutcome::Unbounded => {
            return Err(Error::InfeasibleTarget {
                target: fmt_fraction(lambda_target),
                min: lo.to_string(),
                max: hi.to_string(),
            })
        }
    };
    let witness = Mixture::new(assignments.into_iter().zip(x))?;
    let average = average_contextual_per_quantum(s, &witness);
    Ok(ContextualityReport {
        lambda_target: lambda_target.clone(),
        mode,
        ratio_contextual_to_noncontextual: (value.clone(), Rational::one() - &value),
        min_contextual_fraction: value,
        witness,
        average_contextual_per_quantum: average,
    })
}

/// CHSH closed form `max(0, (|lambda| - 2) / 2)`.
pub fn fraction_closed_form(lambda_target: &Rational) -> Rational {
    let excess = (lambda_target.abs() - int(2)) / int(2);
    if excess.is_negative() {
        Rational::zero()
    } else {
        excess
    }
}

/// Expected number of contextual observables per assignment drawn from `m`.
pub fn average_contextual_per_quantum(s: &Scenario, m: &Mixture) -> Rational {
    m.support()
        .map(|(a, w)| w * int(enumeration::contextuality_count(s, a) as i64))
        .sum()
}

/// Per-quantum contextuality implied by a two-valued-state count.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct KsStatement {
    pub fraction: Rational,
    /// Set when states exist; no conclusion is drawn then.
    pub undetermined: bool,
}

/// With no two-valued states every quantum needs a contextual assignment
/// (fraction 1); otherwise the answer is left open.
pub fn ks_fraction_statement(state_count: usize) -> KsStatement {
    if state_count == 0 {
        KsStatement { fraction: Rational::one(), undetermined: false }
    } else {
        KsStatement { fraction: Rational::zero(), undetermined: true }
    }
}
