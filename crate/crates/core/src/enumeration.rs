//! Contextual value assignments, their classification and evaluation.
//!
//! Assignments are enumerated lexicographically over the canonical variable
//! order with -1 before +1, so index `i` sets variable `j` to +1 exactly when
//! bit `m - 1 - j` of `i` is set.

use std::fmt::Write as _;

use crate::error::{Error, Result};
use crate::scenario::Scenario;

pub const MAX_ENUMERATED_VARIABLES: usize = 30;

/// One value in {-1, +1} per contextual variable, in canonical order.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Assignment {
    values: Vec<i8>,
}

impl Assignment {
    pub fn new(values: Vec<i8>) -> Result<Self> {
        if let Some(v) = values.iter().find(|v| **v != 1 && **v != -1) {
            return Err(Error::InvalidScenario(format!("assignment value {v} is not -1 or +1")));
        }
        Ok(Assignment { values })
    }

    /// Assignment number `index` in enumeration order over `m` variables.
    pub fn from_index(m: usize, index: u64) -> Self {
        let values = (0..m)
            .map(|j| if index >> (m - 1 - j) & 1 == 1 { 1 } else { -1 })
            .collect();
        Assignment { values }
    }

    /// Position in enumeration order.
    pub fn index(&self) -> u64 {
        self.values
            .iter()
            .fold(0u64, |acc, &v| (acc << 1) | u64::from(v == 1))
    }

    pub fn constant(m: usize, value: i8) -> Self {
        assert!(value == 1 || value == -1);
        Assignment { values: vec![value; m] }
    }

    pub fn values(&self) -> &[i8] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn negated(&self) -> Self {
        Assignment { values: self.values.iter().map(|v| -v).collect() }
    }

    /// Copy with variable `j` flipped.
    pub fn flipped(&self, j: usize) -> Self {
        let mut values = self.values.clone();
        values[j] = -values[j];
        Assignment { values }
    }

    fn check(&self, s: &Scenario) -> Result<()> {
        if self.values.len() != s.variable_count() {
            return Err(Error::AssignmentShape {
                expected: s.variable_count(),
                got: self.values.len(),
            });
        }
        Ok(())
    }
}

/// Single values followed by per-context products.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ExpectationRow {
    pub singles: Vec<i8>,
    pub joints: Vec<i8>,
}

impl ExpectationRow {
    /// Singles then joints, as one flat vector.
    pub fn flat(&self) -> Vec<i8> {
        self.singles.iter().chain(&self.joints).copied().collect()
    }
}

pub fn enumerate_assignments(s: &Scenario) -> Result<Vec<Assignment>> {
    let m = s.variable_count();
    if m > MAX_ENUMERATED_VARIABLES {
        return Err(Error::ScenarioTooLarge { variables: m, max: MAX_ENUMERATED_VARIABLES });
    }
    Ok((0..1u64 << m).map(|i| Assignment::from_index(m, i)).collect())
}

pub fn is_noncontextual(s: &Scenario, a: &Assignment) -> bool {
    contextuality_count(s, a) == 0
}

/// Number of observables whose value depends on the partner it is measured with.
pub fn contextuality_count(s: &Scenario, a: &Assignment) -> usize {
    s.variables_by_observable()
        .iter()
        .filter(|(_, idx)| idx.iter().any(|&j| a.values[j] != a.values[idx[0]]))
        .count()
}

pub fn functional_value(s: &Scenario, a: &Assignment) -> Result<i64> {
    a.check(s)?;
    Ok(s.functional()
        .iter()
        .map(|&(k, coeff)| {
            let (l, r) = s.context_variables(k);
            i64::from(coeff) * i64::from(a.values[l] * a.values[r])
        })
        .sum())
}

pub fn expectation_row(s: &Scenario, a: &Assignment) -> Result<ExpectationRow> {
    a.check(s)?;
    let joints = (0..s.contexts().len())
        .map(|k| {
            let (l, r) = s.context_variables(k);
            a.values[l] * a.values[r]
        })
        .collect();
    Ok(ExpectationRow { singles: a.values.clone(), joints })
}

fn pm(v: i8) -> &'static str {
    if v > 0 {
        "+1"
    } else {
        "-1"
    }
}

/// One CSV row per assignment: variable columns, joint columns, the
/// `noncontextual` flag and the functional value.
pub fn assignments_csv(s: &Scenario) -> Result<String> {
    let mut out = String::new();
    let mut header: Vec<String> = s.variable_names();
    header.extend((0..s.contexts().len()).map(|k| s.joint_name(k)));
    header.push("noncontextual".into());
    header.push("functional".into());
    out.push_str(&header.join(","));
    out.push('\n');
    for a in enumerate_assignments(s)? {
        let row = expectation_row(s, &a)?;
        let cells: Vec<&str> = row.singles.iter().chain(&row.joints).map(|&v| pm(v)).collect();
        let _ = writeln!(
            out,
            "{},{},{}",
            cells.join(","),
            is_noncontextual(s, &a),
            functional_value(s, &a)?
        );
    }
    Ok(out)
}

/// Values as a `+1 -1 ...` row for human-readable tables.
pub fn format_values(a: &Assignment) -> String {
    a.values.iter().map(|&v| pm(v)).collect::<Vec<_>>().join(" ")
}

#[cfg(test)]
mod tests {
    use super::*;

    fn maximal_violation_rows() -> [Assignment; 4] {
        let row1 = Assignment::new(vec![1, 1, 1, 1, 1, 1, 1, -1]).unwrap();
        [
            row1.clone(),
            row1.negated(),
            Assignment::constant(8, 1),
            Assignment::constant(8, -1),
        ]
    }

    #[test]
    fn chsh_has_256_assignments_first_all_minus() {
        let s = Scenario::builtin_chsh();
        let all = enumerate_assignments(&s).unwrap();
        assert_eq!(all.len(), 256);
        assert_eq!(all[0], Assignment::constant(8, -1));
        assert_eq!(all[255], Assignment::constant(8, 1));
        for (i, a) in all.iter().enumerate() {
            assert_eq!(a.index(), i as u64);
        }
    }

    #[test]
    fn leading_row_order() {
        // the rows after the first flip b'_a / b'_a'
        let s = Scenario::builtin_chsh();
        let all = enumerate_assignments(&s).unwrap();
        assert_eq!(all[1].values(), &[-1, -1, -1, -1, -1, -1, -1, 1]);
        assert_eq!(all[2].values(), &[-1, -1, -1, -1, -1, -1, 1, -1]);
        assert_eq!(all[4].values(), &[-1, -1, -1, -1, -1, 1, -1, -1]);
    }

    #[test]
    fn single_context_has_four() {
        let s = Scenario::parse("observable left a\nobservable right b\ncontext a b\n").unwrap();
        assert_eq!(enumerate_assignments(&s).unwrap().len(), 4);
    }

    #[test]
    fn too_large_is_rejected() {
        let mut text = String::new();
        for i in 0..4 {
            text.push_str(&format!("observable left a{i}\n"));
        }
        for j in 0..4 {
            text.push_str(&format!("observable right b{j}\n"));
        }
        for i in 0..4 {
            for j in 0..4 {
                text.push_str(&format!("context a{i} b{j}\n"));
            }
        }
        let s = Scenario::parse(&text).unwrap();
        assert_eq!(s.variable_count(), 32);
        assert_eq!(
            enumerate_assignments(&s),
            Err(Error::ScenarioTooLarge { variables: 32, max: 30 })
        );
    }

    #[test]
    fn maximal_violation_values_and_counts() {
        let s = Scenario::builtin_chsh();
        let rows = maximal_violation_rows();
        let values: Vec<i64> = rows.iter().map(|a| functional_value(&s, a).unwrap()).collect();
        let counts: Vec<usize> = rows.iter().map(|a| contextuality_count(&s, a)).collect();
        assert_eq!(values, [4, 4, 2, 2]);
        assert_eq!(counts, [1, 1, 0, 0]);
        assert!(!is_noncontextual(&s, &rows[0]));
        assert!(is_noncontextual(&s, &rows[2]));
    }

    #[test]
    fn every_observable_flipped() {
        let s = Scenario::builtin_chsh();
        let a = Assignment::new(vec![1, -1, 1, -1, 1, -1, 1, -1]).unwrap();
        assert_eq!(contextuality_count(&s, &a), 4);
    }

    #[test]
    fn exactly_sixteen_noncontextual() {
        let s = Scenario::builtin_chsh();
        let n = enumerate_assignments(&s)
            .unwrap()
            .iter()
            .filter(|a| is_noncontextual(&s, a))
            .count();
        assert_eq!(n, 16);
        assert_eq!(n, 1 << s.active_observable_count());
    }

    #[test]
    fn expectation_rows() {
        let s = Scenario::builtin_chsh();
        let row2 = Assignment::new(vec![-1, -1, -1, -1, -1, -1, -1, 1]).unwrap();
        assert_eq!(expectation_row(&s, &row2).unwrap().joints, [1, 1, 1, -1]);
        let top = Assignment::constant(8, 1);
        assert_eq!(expectation_row(&s, &top).unwrap().joints, [1, 1, 1, 1]);

        let single = Scenario::parse("observable left a\nobservable right b\ncontext a b\n").unwrap();
        let a = Assignment::new(vec![-1, 1]).unwrap();
        let row = expectation_row(&single, &a).unwrap();
        assert_eq!(row.joints, [-1]);
        assert_eq!(row.flat(), [-1, 1, -1]);
    }

    #[test]
    fn joints_are_products_everywhere() {
        let s = Scenario::builtin_chsh();
        for a in enumerate_assignments(&s).unwrap() {
            let row = expectation_row(&s, &a).unwrap();
            for k in 0..4 {
                let (l, r) = s.context_variables(k);
                assert_eq!(row.joints[k], row.singles[l] * row.singles[r]);
            }
        }
    }

    #[test]
    fn shape_mismatch_is_an_error() {
        let s = Scenario::builtin_chsh();
        let a = Assignment::constant(3, 1);
        assert!(matches!(functional_value(&s, &a), Err(Error::AssignmentShape { .. })));
        assert!(Assignment::new(vec![1, 0]).is_err());
    }

    #[test]
    fn csv_export_shape() {
        let s = Scenario::builtin_chsh();
        let csv = assignments_csv(&s).unwrap();
        let lines: Vec<&str> = csv.lines().collect();
        assert_eq!(lines.len(), 257);
        assert_eq!(
            lines[0],
            "a_b,a_b',a'_b,a'_b',b_a,b_a',b'_a,b'_a',a_b*b_a,a_b'*b'_a,a'_b*b_a',a'_b'*b'_a',noncontextual,functional"
        );
        assert_eq!(lines[1], "-1,-1,-1,-1,-1,-1,-1,-1,+1,+1,+1,+1,true,2");
        assert_eq!(lines[2], "-1,-1,-1,-1,-1,-1,-1,+1,+1,+1,+1,-1,false,4");
    }
}
