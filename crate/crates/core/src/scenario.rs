//! Two-party dichotomic measurement scenarios and their contextual variables.
//!
//! A contextual variable `x_y` is the value of observable `x` when it is
//! measured together with `y`. Every context `(x, y)` therefore carries two
//! variables, `x_y` and `y_x`, and a scenario with `c` contexts has `2c`
//! variables.

use std::collections::HashMap;
use std::fmt;

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Party {
    Left,
    Right,
}

impl Party {
    pub fn other(self) -> Party {
        match self {
            Party::Left => Party::Right,
            Party::Right => Party::Left,
        }
    }

    fn keyword(self) -> &'static str {
        match self {
            Party::Left => "left",
            Party::Right => "right",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Observable {
    pub party: Party,
    pub label: String,
}

/// Index of an observable in its scenario's declaration list.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ObservableId(pub usize);

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Context {
    pub left: ObservableId,
    pub right: ObservableId,
}

/// `base` measured alongside `partner`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct ContextualVariable {
    pub base: ObservableId,
    pub partner: ObservableId,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Scenario {
    observables: Vec<Observable>,
    contexts: Vec<Context>,
    /// (context index, coefficient in {-1, +1})
    functional: Vec<(usize, i32)>,
    variables: Vec<ContextualVariable>,
    /// per context: (index of left_right, index of right_left)
    context_vars: Vec<(usize, usize)>,
}

impl Scenario {
    pub fn new(
        observables: Vec<Observable>,
        contexts: Vec<Context>,
        functional: Vec<(Context, i32)>,
    ) -> Result<Self> {
        let invalid = |m: String| Err(Error::InvalidScenario(m));
        for (i, o) in observables.iter().enumerate() {
            if o.label.is_empty() || o.label.chars().any(char::is_whitespace) {
                return invalid(format!("observable label `{}` is empty or has whitespace", o.label));
            }
            if observables[..i]
                .iter()
                .any(|p| p.party == o.party && p.label == o.label)
            {
                return invalid(format!(
                    "label `{}` declared twice for the {} party",
                    o.label,
                    o.party.keyword()
                ));
            }
        }
        for (i, c) in contexts.iter().enumerate() {
            let (Some(l), Some(r)) = (observables.get(c.left.0), observables.get(c.right.0)) else {
                return invalid(format!("context {i} references an unknown observable"));
            };
            if l.party != Party::Left || r.party != Party::Right {
                return invalid(format!(
                    "context ({}, {}) must pair one left and one right observable",
                    l.label, r.label
                ));
            }
            if contexts[..i].contains(c) {
                return invalid(format!("context ({}, {}) declared twice", l.label, r.label));
            }
        }
        let mut terms = Vec::with_capacity(functional.len());
        for (c, coeff) in functional {
            if coeff != 1 && coeff != -1 {
                return invalid(format!("functional coefficient {coeff} is not +1 or -1"));
            }
            let Some(idx) = contexts.iter().position(|k| *k == c) else {
                return invalid("functional term refers to an undeclared context".into());
            };
            if terms.iter().any(|&(k, _)| k == idx) {
                return invalid("functional lists a context twice".into());
            }
            terms.push((idx, coeff));
        }

        let variables = canonical_variables(&observables, &contexts);
        let position: HashMap<ContextualVariable, usize> =
            variables.iter().enumerate().map(|(i, v)| (*v, i)).collect();
        let context_vars = contexts
            .iter()
            .map(|c| {
                let l = ContextualVariable { base: c.left, partner: c.right };
                let r = ContextualVariable { base: c.right, partner: c.left };
                (position[&l], position[&r])
            })
            .collect();

        Ok(Scenario {
            observables,
            contexts,
            functional: terms,
            variables,
            context_vars,
        })
    }

    /// The CHSH scenario: observables a, a' (left) and b, b' (right), all four
    /// contexts, functional E(a,b) + E(a,b') + E(a',b) - E(a',b').
    pub fn builtin_chsh() -> Self {
        let obs = |party, label: &str| Observable { party, label: label.to_string() };
        let observables = vec![
            obs(Party::Left, "a"),
            obs(Party::Left, "a'"),
            obs(Party::Right, "b"),
            obs(Party::Right, "b'"),
        ];
        let ctx = |l, r| Context { left: ObservableId(l), right: ObservableId(r) };
        let contexts = vec![ctx(0, 2), ctx(0, 3), ctx(1, 2), ctx(1, 3)];
        let functional = vec![
            (contexts[0], 1),
            (contexts[1], 1),
            (contexts[2], 1),
            (contexts[3], -1),
        ];
        Scenario::new(observables, contexts, functional).expect("builtin CHSH is well-formed")
    }

    /// Parses the line-oriented scenario format:
    ///
    /// ```text
    /// observable left a
    /// observable right b
    /// context a b
    /// functional a b +1
    /// ```
    ///
    /// `#` starts a comment. Declaration order fixes the canonical order.
    pub fn parse(text: &str) -> Result<Self> {
        let mut observables: Vec<Observable> = Vec::new();
        let mut contexts = Vec::new();
        let mut functional = Vec::new();

        let lookup = |observables: &[Observable], party: Party, label: &str, line: usize| {
            observables
                .iter()
                .position(|o| o.party == party && o.label == label)
                .map(ObservableId)
                .ok_or_else(|| Error::Parse {
                    line,
                    message: format!("unknown {} observable `{label}`", party.keyword()),
                })
        };

        for (i, raw) in text.lines().enumerate() {
            let line = i + 1;
            let content = raw.split('#').next().unwrap_or("");
            let words: Vec<&str> = content.split_whitespace().collect();
            let Some((&keyword, args)) = words.split_first() else {
                continue;
            };
            let err = |message: String| Error::Parse { line, message };
            match keyword {
                "observable" => {
                    let [party, label] = args else {
                        return Err(err("expected `observable <left|right> <label>`".into()));
                    };
                    let party = match party.to_ascii_lowercase().as_str() {
                        "left" | "l" => Party::Left,
                        "right" | "r" => Party::Right,
                        other => return Err(err(format!("unknown party `{other}`"))),
                    };
                    if observables.iter().any(|o| o.party == party && o.label == *label) {
                        return Err(err(format!("observable `{label}` declared twice")));
                    }
                    observables.push(Observable { party, label: label.to_string() });
                }
                "context" => {
                    if args.len() > 2 {
                        return Err(err(format!(
                            "context co-measures {} observables; only pairs are supported",
                            args.len()
                        )));
                    }
                    let [l, r] = args else {
                        return Err(err("expected `context <left> <right>`".into()));
                    };
                    let c = Context {
                        left: lookup(&observables, Party::Left, l, line)?,
                        right: lookup(&observables, Party::Right, r, line)?,
                    };
                    if contexts.contains(&c) {
                        return Err(err(format!("context ({l}, {r}) declared twice")));
                    }
                    contexts.push(c);
                }
                "functional" => {
                    let [l, r, coeff] = args else {
                        return Err(err("expected `functional <left> <right> <+1|-1>`".into()));
                    };
                    let c = Context {
                        left: lookup(&observables, Party::Left, l, line)?,
                        right: lookup(&observables, Party::Right, r, line)?,
                    };
                    if !contexts.contains(&c) {
                        return Err(err(format!("functional term ({l}, {r}) is not a declared context")));
                    }
                    let coeff = match *coeff {
                        "+1" | "1" => 1,
                        "-1" => -1,
                        other => return Err(err(format!("coefficient `{other}` is not +1 or -1"))),
                    };
                    functional.push((c, coeff));
                }
                other => return Err(err(format!("unknown directive `{other}`"))),
            }
        }
        Scenario::new(observables, contexts, functional).map_err(|e| match e {
            Error::InvalidScenario(m) => Error::Parse { line: 0, message: m },
            e => e,
        })
    }

    /// Serializes back into the text format accepted by [`Scenario::parse`].
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        for o in &self.observables {
            out.push_str(&format!("observable {} {}\n", o.party.keyword(), o.label));
        }
        for c in &self.contexts {
            out.push_str(&format!("context {} {}\n", self.label(c.left), self.label(c.right)));
        }
        for &(k, coeff) in &self.functional {
            let c = self.contexts[k];
            let sign = if coeff > 0 { "+1" } else { "-1" };
            out.push_str(&format!(
                "functional {} {} {sign}\n",
                self.label(c.left),
                self.label(c.right)
            ));
        }
        out
    }

    pub fn observables(&self) -> &[Observable] {
        &self.observables
    }

    pub fn observable(&self, id: ObservableId) -> &Observable {
        &self.observables[id.0]
    }

    pub fn label(&self, id: ObservableId) -> &str {
        &self.observables[id.0].label
    }

    pub fn contexts(&self) -> &[Context] {
        &self.contexts
    }

    /// Functional terms as (context index, coefficient).
    pub fn functional(&self) -> &[(usize, i32)] {
        &self.functional
    }

    /// Contextual variables in canonical order.
    pub fn contextual_variables(&self) -> &[ContextualVariable] {
        &self.variables
    }

    pub fn variable_count(&self) -> usize {
        self.variables.len()
    }

    pub fn variable_index(&self, base: ObservableId, partner: ObservableId) -> Option<usize> {
        self.variables
            .iter()
            .position(|v| v.base == base && v.partner == partner)
    }

    /// Indices of `left_right` and `right_left` for context `k`.
    pub fn context_variables(&self, k: usize) -> (usize, usize) {
        self.context_vars[k]
    }

    /// Variable indices grouped by base observable, in canonical order.
    /// Observables that appear in no context are omitted.
    pub fn variables_by_observable(&self) -> Vec<(ObservableId, Vec<usize>)> {
        let mut groups: Vec<(ObservableId, Vec<usize>)> = Vec::new();
        for (i, v) in self.variables.iter().enumerate() {
            match groups.last_mut() {
                Some((base, idx)) if *base == v.base => idx.push(i),
                _ => groups.push((v.base, vec![i])),
            }
        }
        groups
    }

    /// `a_b'` style name of a contextual variable.
    pub fn variable_name(&self, v: &ContextualVariable) -> String {
        format!("{}_{}", self.label(v.base), self.label(v.partner))
    }

    pub fn variable_names(&self) -> Vec<String> {
        self.variables.iter().map(|v| self.variable_name(v)).collect()
    }

    /// `a_b*b_a` style name of a context's joint value.
    pub fn joint_name(&self, k: usize) -> String {
        let (l, r) = self.context_vars[k];
        format!(
            "{}*{}",
            self.variable_name(&self.variables[l]),
            self.variable_name(&self.variables[r])
        )
    }

    /// Number of observables that take part in at least one context.
    pub fn active_observable_count(&self) -> usize {
        self.variables_by_observable().len()
    }
}

impl fmt::Display for Scenario {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_text())
    }
}

fn canonical_variables(observables: &[Observable], contexts: &[Context]) -> Vec<ContextualVariable> {
    let mut out = Vec::with_capacity(2 * contexts.len());
    for party in [Party::Left, Party::Right] {
        for (i, o) in observables.iter().enumerate() {
            if o.party != party {
                continue;
            }
            let base = ObservableId(i);
            // partners in their own declaration order
            for (j, _) in observables.iter().enumerate() {
                let partner = ObservableId(j);
                let paired = contexts.iter().any(|c| match party {
                    Party::Left => c.left == base && c.right == partner,
                    Party::Right => c.right == base && c.left == partner,
                });
                if paired {
                    out.push(ContextualVariable { base, partner });
                }
            }
        }
    }
    out
}
