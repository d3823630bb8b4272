//! Seeded streams of counterfactual assignments with a fixed number of
//! contextual entries.
//!
//! Entries come from four assignment families: the all-(+1) and all-(-1)
//! noncontextual assignments, and the two contextual assignments obtained
//! from them by flipping the right-hand variable of the negatively weighted
//! context. For CHSH the contextual pair scores 4 and the noncontextual pair
//! scores 2, so a stream of `n` entries with `k` contextual ones has
//! empirical value `2 + 2k/n` whatever the seed.
//!
//! # Generator
//!
//! Randomness comes from SplitMix64 (Steele, Lea and Flood; reference code
//! at <https://prng.di.unimi.it/splitmix64.c>) seeded directly with the
//! 64-bit seed. A draw below `b` takes outputs `x` until
//! `x < b * floor(2^64 / b)` and returns `x mod b`. A stream is built by
//!
//! 1. laying out `k` contextual flags followed by `n - k` noncontextual ones,
//! 2. a Fisher-Yates shuffle: for `i` from `n - 1` down to `1`, swap
//!    position `i` with a draw below `i + 1`,
//! 3. for each position in order, one raw output whose top bit selects the
//!    negated family member when set.

use std::fmt::Write as _;

use rand_core::{RngCore, SeedableRng};
use rand_xoshiro::SplitMix64;

use crate::enumeration::{self, Assignment};
use crate::error::{Error, Result};
use crate::rational::{fmt_fraction, int, round_half_away, Rational};
use crate::scenario::Scenario;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct StreamSpec {
    pub n_total: usize,
    pub n_contextual: usize,
    pub seed: u64,
}

impl StreamSpec {
    pub fn validate(&self) -> Result<()> {
        if self.n_total == 0 {
            return Err(Error::SpecInvalid("n_total must be positive".into()));
        }
        if self.n_contextual > self.n_total {
            return Err(Error::SpecInvalid(format!(
                "n_contextual {} exceeds n_total {}",
                self.n_contextual, self.n_total
            )));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Stream {
    pub entries: Vec<Assignment>,
    pub spec: StreamSpec,
}

/// The four assignment families a stream draws from.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Families {
    /// Contextual member and its negation.
    pub contextual: [Assignment; 2],
    /// All +1 and all -1.
    pub noncontextual: [Assignment; 2],
    pub contextual_value: i64,
    pub noncontextual_value: i64,
}

impl Families {
    /// Requires exactly one negatively weighted context and a contextual
    /// member that scores strictly above the noncontextual one.
    pub fn for_scenario(s: &Scenario) -> Result<Self> {
        let negative: Vec<usize> = s
            .functional()
            .iter()
            .filter(|(_, c)| *c < 0)
            .map(|(k, _)| *k)
            .collect();
        let [k] = negative[..] else {
            return Err(Error::SpecInvalid(
                "scenario functional needs exactly one negative term".into(),
            ));
        };
        let m = s.variable_count();
        let up = Assignment::constant(m, 1);
        let (_, right) = s.context_variables(k);
        let flipped = up.flipped(right);
        let contextual_value = enumeration::functional_value(s, &flipped)?;
        let noncontextual_value = enumeration::functional_value(s, &up)?;
        if contextual_value <= noncontextual_value || enumeration::contextuality_count(s, &flipped) != 1 {
            return Err(Error::SpecInvalid("scenario is not CHSH-shaped".into()));
        }
        Ok(Families {
            contextual: [flipped.clone(), flipped.negated()],
            noncontextual: [up.clone(), up.negated()],
            contextual_value,
            noncontextual_value,
        })
    }
}

/// Uniform draw below `bound` by rejection.
fn draw_below(rng: &mut SplitMix64, bound: u64) -> u64 {
    debug_assert!(bound > 0);
    let limit = (u64::MAX / bound) * bound;
    loop {
        let x = rng.next_u64();
        if x < limit {
            return x % bound;
        }
    }
}

pub fn generate_stream(s: &Scenario, spec: StreamSpec) -> Result<Stream> {
    spec.validate()?;
    let families = Families::for_scenario(s)?;
    let mut rng = SplitMix64::seed_from_u64(spec.seed);

    let mut flags = vec![false; spec.n_total];
    flags[..spec.n_contextual].fill(true);
    for i in (1..spec.n_total).rev() {
        let j = draw_below(&mut rng, i as u64 + 1) as usize;
        flags.swap(i, j);
    }
    let entries = flags
        .into_iter()
        .map(|contextual| {
            let negated = rng.next_u64() >> 63 == 1;
            let pair = if contextual { &families.contextual } else { &families.noncontextual };
            pair[usize::from(negated)].clone()
        })
        .collect();
    Ok(Stream { entries, spec })
}

pub fn empirical_functional(s: &Scenario, stream: &Stream) -> Result<Rational> {
    if stream.entries.is_empty() {
        return Err(Error::EmptyStream);
    }
    let mut total = 0i64;
    for a in &stream.entries {
        total += enumeration::functional_value(s, a)?;
    }
    Ok(Rational::new(total.into(), (stream.entries.len() as i64).into()))
}

/// Stream whose contextual count is `round(n (lambda - low) / (high - low))`,
/// ties away from zero, where `low`/`high` are the family values (2 and 4 for
/// CHSH).
pub fn stream_for_lambda(s: &Scenario, lambda_target: &Rational, n: usize, seed: u64) -> Result<Stream> {
    let families = Families::for_scenario(s)?;
    let low = int(families.noncontextual_value);
    let high = int(families.contextual_value);
    if *lambda_target < low || *lambda_target > high {
        return Err(Error::TargetOutOfRange {
            target: fmt_fraction(lambda_target),
            min: fmt_fraction(&low),
            max: fmt_fraction(&high),
        });
    }
    let k = contextual_count_for(lambda_target, n, &low, &high);
    generate_stream(s, StreamSpec { n_total: n, n_contextual: k, seed })
}

fn contextual_count_for(lambda: &Rational, n: usize, low: &Rational, high: &Rational) -> usize {
    let exact = int(n as i64) * (lambda - low) / (high - low);
    let k = round_half_away(&exact);
    k.try_into().expect("count within 0..=n")
}

impl Stream {
    pub fn contextual_count(&self, s: &Scenario) -> usize {
        self.entries
            .iter()
            .filter(|a| enumeration::contextuality_count(s, a) > 0)
            .count()
    }

    /// Variable columns plus a `contextual` flag, one row per entry.
    pub fn to_csv(&self, s: &Scenario) -> String {
        let mut out = s.variable_names().join(",");
        out.push_str(",contextual\n");
        for a in &self.entries {
            let cells: Vec<&str> = a.values().iter().map(|&v| if v > 0 { "+1" } else { "-1" }).collect();
            let _ = writeln!(
                out,
                "{},{}",
                cells.join(","),
                enumeration::contextuality_count(s, a) > 0
            );
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::ratio;

    fn spec(n: usize, k: usize, seed: u64) -> StreamSpec {
        StreamSpec { n_total: n, n_contextual: k, seed }
    }

    #[test]
    fn splitmix_reference_vector() {
        // first outputs of the reference implementation for this seed
        let mut rng = SplitMix64::seed_from_u64(1477776061723855037);
        assert_eq!(rng.next_u64(), 1985237415132408290);
        assert_eq!(rng.next_u64(), 2979275885539914483);
    }

    #[test]
    fn families_are_the_maximal_violation_rows() {
        let s = Scenario::builtin_chsh();
        let f = Families::for_scenario(&s).unwrap();
        assert_eq!(f.contextual[0].values(), &[1, 1, 1, 1, 1, 1, 1, -1]);
        assert_eq!(f.contextual[1].values(), &[-1, -1, -1, -1, -1, -1, -1, 1]);
        assert_eq!((f.contextual_value, f.noncontextual_value), (4, 2));
    }

    #[test]
    fn non_chsh_shapes_rejected() {
        let s = Scenario::parse("observable left a\nobservable right b\ncontext a b\nfunctional a b +1\n").unwrap();
        assert!(matches!(generate_stream(&s, spec(4, 1, 0)), Err(Error::SpecInvalid(_))));
    }

    #[test]
    fn forty_nineteen_value() {
        let s = Scenario::builtin_chsh();
        for seed in [0, 1, 7, 42, u64::MAX] {
            let st = generate_stream(&s, spec(40, 19, seed)).unwrap();
            assert_eq!(st.contextual_count(&s), 19);
            assert_eq!(empirical_functional(&s, &st).unwrap(), ratio(59, 20));
        }
    }

    #[test]
    fn extremes() {
        let s = Scenario::builtin_chsh();
        let st = generate_stream(&s, spec(10, 0, 3)).unwrap();
        assert_eq!(empirical_functional(&s, &st).unwrap(), int(2));
        let st = generate_stream(&s, spec(10, 10, 3)).unwrap();
        assert_eq!(empirical_functional(&s, &st).unwrap(), int(4));
    }

    #[test]
    fn invalid_specs() {
        let s = Scenario::builtin_chsh();
        assert!(matches!(generate_stream(&s, spec(0, 0, 0)), Err(Error::SpecInvalid(_))));
        assert!(matches!(generate_stream(&s, spec(3, 4, 0)), Err(Error::SpecInvalid(_))));
        let empty = Stream { entries: vec![], spec: spec(1, 0, 0) };
        assert_eq!(empirical_functional(&s, &empty), Err(Error::EmptyStream));
    }

    #[test]
    fn small_streams() {
        let s = Scenario::builtin_chsh();
        let one = Stream { entries: vec![Assignment::constant(8, 1)], spec: spec(1, 0, 0) };
        assert_eq!(empirical_functional(&s, &one).unwrap(), int(2));
        let f = Families::for_scenario(&s).unwrap();
        let all = Stream {
            entries: f.contextual.iter().chain(&f.noncontextual).cloned().collect(),
            spec: spec(4, 2, 0),
        };
        assert_eq!(empirical_functional(&s, &all).unwrap(), int(3));
    }

    #[test]
    fn lambda_streams() {
        let s = Scenario::builtin_chsh();
        let st = stream_for_lambda(&s, &ratio(707, 250), 40, 1).unwrap();
        assert_eq!(st.spec.n_contextual, 17);
        assert_eq!(empirical_functional(&s, &st).unwrap(), ratio(57, 20));
        assert_eq!(stream_for_lambda(&s, &int(2), 40, 1).unwrap().spec.n_contextual, 0);
        assert_eq!(stream_for_lambda(&s, &int(4), 40, 1).unwrap().spec.n_contextual, 40);
        // 4 * (5/2 - 2) / 2 = 1, 2 * (5/2 - 2)/2 = 1/2 rounds up
        assert_eq!(stream_for_lambda(&s, &ratio(5, 2), 2, 1).unwrap().spec.n_contextual, 1);
        assert!(matches!(
            stream_for_lambda(&s, &ratio(3, 2), 40, 1),
            Err(Error::TargetOutOfRange { .. })
        ));
    }

    #[test]
    fn regeneration_is_identical() {
        let s = Scenario::builtin_chsh();
        let a = generate_stream(&s, spec(40, 19, 7)).unwrap();
        let b = generate_stream(&s, spec(40, 19, 7)).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.to_csv(&s), b.to_csv(&s));
        let c = generate_stream(&s, spec(40, 19, 8)).unwrap();
        assert_ne!(a.entries, c.entries);
    }

    #[test]
    fn csv_shape() {
        let s = Scenario::builtin_chsh();
        let st = generate_stream(&s, spec(5, 2, 11)).unwrap();
        let csv = st.to_csv(&s);
        let lines: Vec<&str> = csv.lines().collect();
        assert_eq!(lines.len(), 6);
        assert_eq!(lines[0], "a_b,a_b',a'_b,a'_b',b_a,b_a',b'_a,b'_a',contextual");
        assert_eq!(lines.iter().filter(|l| l.ends_with(",true")).count(), 2);
    }
}
