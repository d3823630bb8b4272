//! Kochen-Specker hypergraphs and their two-valued states.
//!
//! A context is a complete set of mutually exclusive atoms, so a two-valued
//! state marks exactly one atom per context with 1. Configurations without
//! any such state force every quantum to carry a contextual assignment.

use std::collections::HashMap;
use std::fmt::Write as _;

use crate::error::{Error, Result};

pub const MAX_ATOMS: usize = 128;

/// Hypergraph data files shipped with the crate.
pub mod fixtures {
    /// 18 rays in four dimensions forming 9 bases; no two-valued state.
    pub const CABELLO18: &str = include_str!("../fixtures/cabello18.txt");
    /// Five triangles in a cycle; 11 two-valued states.
    pub const PENTAGON: &str = include_str!("../fixtures/pentagon.txt");
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Hypergraph {
    atoms: Vec<String>,
    contexts: Vec<Vec<usize>>,
}

impl Hypergraph {
    pub fn new(atoms: Vec<String>, contexts: Vec<Vec<usize>>) -> Result<Self> {
        for (i, c) in contexts.iter().enumerate() {
            if c.len() < 2 {
                return Err(Error::InvalidHypergraph(format!("context {i} has fewer than two atoms")));
            }
            for (j, &a) in c.iter().enumerate() {
                if a >= atoms.len() {
                    return Err(Error::InvalidHypergraph(format!("context {i} references atom {a}")));
                }
                if c[..j].contains(&a) {
                    return Err(Error::DuplicateAtomInContext { line: i + 1, atom: atoms[a].clone() });
                }
            }
        }
        Ok(Hypergraph { atoms, contexts })
    }

    /// One context per line, whitespace-separated atom labels; `#` comments
    /// and blank lines are skipped. Atoms are numbered by first appearance.
    pub fn parse(text: &str) -> Result<Self> {
        let mut atoms: Vec<String> = Vec::new();
        let mut index: HashMap<String, usize> = HashMap::new();
        let mut contexts = Vec::new();
        for (i, raw) in text.lines().enumerate() {
            let line = i + 1;
            let content = raw.split('#').next().unwrap_or("");
            let labels: Vec<&str> = content.split_whitespace().collect();
            if labels.is_empty() {
                continue;
            }
            if labels.len() < 2 {
                return Err(Error::Parse {
                    line,
                    message: "a context needs at least two atoms".into(),
                });
            }
            let mut ctx = Vec::with_capacity(labels.len());
            for label in labels {
                let id = *index.entry(label.to_string()).or_insert_with(|| {
                    atoms.push(label.to_string());
                    atoms.len() - 1
                });
                if ctx.contains(&id) {
                    return Err(Error::DuplicateAtomInContext { line, atom: label.to_string() });
                }
                ctx.push(id);
            }
            contexts.push(ctx);
        }
        Hypergraph::new(atoms, contexts)
    }

    pub fn to_text(&self) -> String {
        let mut out = String::new();
        for c in &self.contexts {
            let labels: Vec<&str> = c.iter().map(|&a| self.atoms[a].as_str()).collect();
            let _ = writeln!(out, "{}", labels.join(" "));
        }
        out
    }

    pub fn atoms(&self) -> &[String] {
        &self.atoms
    }

    pub fn contexts(&self) -> &[Vec<usize>] {
        &self.contexts
    }

    /// Number of contexts containing each atom.
    pub fn degrees(&self) -> Vec<usize> {
        let mut deg = vec![0; self.atoms.len()];
        for c in &self.contexts {
            for &a in c {
                deg[a] += 1;
            }
        }
        deg
    }
}

/// One bit per atom, in atom order.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct TwoValuedState {
    values: Vec<bool>,
}

impl TwoValuedState {
    pub fn new(values: Vec<bool>) -> Self {
        TwoValuedState { values }
    }

    pub fn values(&self) -> &[bool] {
        &self.values
    }

    pub fn value(&self, atom: usize) -> bool {
        self.values[atom]
    }

    /// Exactly one atom per context is true.
    pub fn is_valid_for(&self, hg: &Hypergraph) -> bool {
        self.values.len() == hg.atoms.len()
            && hg
                .contexts
                .iter()
                .all(|c| c.iter().filter(|&&a| self.values[a]).count() == 1)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StateEnumeration {
    /// States sorted by their value vectors.
    pub states: Vec<TwoValuedState>,
    /// False when the search stopped at the requested limit.
    pub exhaustive: bool,
}

struct Search<'a> {
    hg: &'a Hypergraph,
    member_of: Vec<Vec<usize>>,
    order: Vec<usize>,
    limit: Option<usize>,
    found: Vec<TwoValuedState>,
    truncated: bool,
}

impl Search<'_> {
    /// Sets `atom` and propagates; false on contradiction.
    fn assign(&self, values: &mut [Option<bool>], atom: usize, value: bool) -> bool {
        let mut queue = vec![(atom, value)];
        while let Some((a, v)) = queue.pop() {
            match values[a] {
                Some(old) if old == v => continue,
                Some(_) => return false,
                None => values[a] = Some(v),
            }
            for &c in &self.member_of[a] {
                let ctx = &self.hg.contexts[c];
                if v {
                    for &b in ctx {
                        if b != a {
                            queue.push((b, false));
                        }
                    }
                } else {
                    let mut open = None;
                    let mut open_count = 0;
                    let mut has_true = false;
                    for &b in ctx {
                        match values[b] {
                            Some(true) => has_true = true,
                            Some(false) => {}
                            None => {
                                open_count += 1;
                                open = Some(b);
                            }
                        }
                    }
                    if !has_true {
                        match open_count {
                            0 => return false,
                            1 => queue.push((open.expect("one open atom"), true)),
                            _ => {}
                        }
                    }
                }
            }
        }
        true
    }

    fn run(&mut self, values: Vec<Option<bool>>, depth: usize) {
        if self.truncated {
            return;
        }
        let Some(pos) = (depth..self.order.len()).find(|&p| values[self.order[p]].is_none()) else {
            let state = TwoValuedState::new(values.into_iter().map(|v| v.expect("complete")).collect());
            debug_assert!(state.is_valid_for(self.hg));
            self.found.push(state);
            if self.limit.is_some_and(|l| self.found.len() >= l) {
                self.truncated = true;
            }
            return;
        };
        let atom = self.order[pos];
        for choice in [true, false] {
            let mut next = values.clone();
            if self.assign(&mut next, atom, choice) {
                self.run(next, pos + 1);
            }
            if self.truncated {
                return;
            }
        }
    }
}

/// Backtracking with unit propagation, branching on atoms by descending
/// context degree (ties by first appearance). With `limit`, stops after that
/// many states and reports the result as non-exhaustive.
pub fn enumerate_two_valued_states(hg: &Hypergraph, limit: Option<usize>) -> Result<StateEnumeration> {
    let n = hg.atoms.len();
    if n > MAX_ATOMS {
        return Err(Error::TooManyAtoms { atoms: n, max: MAX_ATOMS });
    }
    if limit == Some(0) {
        return Ok(StateEnumeration { states: Vec::new(), exhaustive: false });
    }
    let mut member_of = vec![Vec::new(); n];
    for (c, ctx) in hg.contexts.iter().enumerate() {
        for &a in ctx {
            member_of[a].push(c);
        }
    }
    let degrees = hg.degrees();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| degrees[b].cmp(&degrees[a]).then(a.cmp(&b)));

    let mut search = Search { hg, member_of, order, limit, found: Vec::new(), truncated: false };
    search.run(vec![None; n], 0);
    let exhaustive = !search.truncated;
    let mut states = search.found;
    states.sort();
    Ok(StateEnumeration { states, exhaustive })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Embeddability {
    /// Every atom is true in some state.
    pub unital: bool,
    /// Every pair of distinct atoms is told apart by some state.
    pub separating: bool,
}

pub fn embeddability_checks(hg: &Hypergraph, states: &StateEnumeration) -> Result<Embeddability> {
    if !states.exhaustive {
        return Err(Error::NonExhaustiveStates);
    }
    let n = hg.atoms.len();
    let states = &states.states;
    let unital = !states.is_empty() && (0..n).all(|a| states.iter().any(|s| s.value(a)));
    let separating = !states.is_empty()
        && (0..n).all(|a| (a + 1..n).all(|b| states.iter().any(|s| s.value(a) != s.value(b))));
    Ok(Embeddability { unital, separating })
}

/// Human-readable summary used by the command line.
pub fn summary(hg: &Hypergraph, states: &StateEnumeration) -> Result<String> {
    let mut out = String::new();
    let _ = writeln!(out, "atoms={}", hg.atoms.len());
    let _ = writeln!(out, "contexts={}", hg.contexts.len());
    let _ = writeln!(out, "two_valued_states={}", states.states.len());
    let _ = writeln!(out, "exhaustive={}", states.exhaustive);
    if states.exhaustive {
        let e = embeddability_checks(hg, states)?;
        let _ = writeln!(out, "unital={}", e.unital);
        let _ = writeln!(out, "separating={}", e.separating);
    }
    Ok(out)
}
