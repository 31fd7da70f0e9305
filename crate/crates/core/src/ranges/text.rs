//! Character-class regexes for string values, and their generalization over
//! clusters of values with the same class sequence.

use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};

#[derive(Copy, Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum CharClass {
    Lower,
    Upper,
    Digit,
    /// Space, tab, carriage return, or line feed.
    Space,
    Literal(char),
}

impl CharClass {
    pub fn of(c: char) -> Self {
        match c {
            'a'..='z' => CharClass::Lower,
            'A'..='Z' => CharClass::Upper,
            '0'..='9' => CharClass::Digit,
            ' ' | '\t' | '\n' | '\r' => CharClass::Space,
            other => CharClass::Literal(other),
        }
    }

    fn write(self, out: &mut String) {
        match self {
            CharClass::Lower => out.push_str("[a-z]"),
            CharClass::Upper => out.push_str("[A-Z]"),
            CharClass::Digit => out.push_str("[0-9]"),
            CharClass::Space => out.push_str("\\s"),
            CharClass::Literal(c) => {
                // Metacharacters shared by XPath and Rust regex syntax.
                if "\\|.?*+(){}-[]^$".contains(c) {
                    out.push('\\');
                }
                out.push(c);
            }
        }
    }
}

/// A class repeated between `min` and `max` times.
#[derive(Copy, Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Run {
    pub class: CharClass,
    pub min: usize,
    pub max: usize,
}

/// A sequence of runs whose adjacent classes differ, matched against the
/// whole string.
#[derive(Clone, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct StructuredRegex {
    pub runs: Vec<Run>,
}

impl StructuredRegex {
    pub fn signature(&self) -> Vec<CharClass> {
        self.runs.iter().map(|r| r.class).collect()
    }

    /// Unanchored pattern text, e.g. `[a-z]{4}\s[a-z]{3}`.
    pub fn pattern(&self) -> String {
        let mut out = String::new();
        for r in &self.runs {
            r.class.write(&mut out);
            match (r.min, r.max) {
                (1, 1) => {}
                (a, b) if a == b => out.push_str(&format!("{{{a}}}")),
                (a, b) => out.push_str(&format!("{{{a},{b}}}")),
            }
        }
        out
    }

    /// Full-string match.
    pub fn is_match(&self, s: &str) -> bool {
        let runs = class_runs(s);
        runs.len() == self.runs.len()
            && runs
                .iter()
                .zip(&self.runs)
                .all(|(&(class, n), r)| class == r.class && r.min <= n && n <= r.max)
    }

    /// True if every string matched by `self` is matched by `other`.
    pub fn is_within(&self, other: &StructuredRegex) -> bool {
        self.runs.len() == other.runs.len()
            && self
                .runs
                .iter()
                .zip(&other.runs)
                .all(|(a, b)| a.class == b.class && b.min <= a.min && a.max <= b.max)
    }
}

impl fmt::Display for StructuredRegex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.pattern())
    }
}

fn class_runs(s: &str) -> Vec<(CharClass, usize)> {
    let mut runs: Vec<(CharClass, usize)> = Vec::new();
    for c in s.chars() {
        let class = CharClass::of(c);
        match runs.last_mut() {
            Some((last, n)) if *last == class => *n += 1,
            _ => runs.push((class, 1)),
        }
    }
    runs
}

/// Exact regex of one value.
pub fn value_regex(s: &str) -> StructuredRegex {
    StructuredRegex {
        runs: class_runs(s)
            .into_iter()
            .map(|(class, n)| Run { class, min: n, max: n })
            .collect(),
    }
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum ClusterLevel {
    /// All values sharing a class sequence, with merged quantifiers.
    Signature,
    /// Values with identical run lengths; a strict specialization of its
    /// signature cluster.
    Exact,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RegexCluster {
    pub members: Vec<String>,
    pub signature: Vec<CharClass>,
    pub generalized: StructuredRegex,
    pub level: ClusterLevel,
}

/// Groups `values` by class sequence and merges quantifiers within each group.
///
/// With `coverage` below 1, signature clusters drop outlying members, widest
/// runs first, while at least `coverage` of the members stay matched. Exact
/// clusters are added below each signature cluster they specialize. Output
/// is ordered by signature, then level, then pattern.
pub fn cluster_and_generalize(values: &[String], coverage: f64) -> Vec<RegexCluster> {
    let mut groups: BTreeMap<Vec<CharClass>, Vec<(&String, StructuredRegex)>> = BTreeMap::new();
    for v in values {
        let r = value_regex(v);
        groups.entry(r.signature()).or_default().push((v, r));
    }

    let mut out = Vec::new();
    for (signature, members) in groups {
        let regexes: Vec<&StructuredRegex> = members.iter().map(|(_, r)| r).collect();
        let kept = trim_to_coverage(&regexes, coverage);
        let generalized = merge(kept.iter().map(|&i| regexes[i]));
        let matched: Vec<String> = members
            .iter()
            .filter(|(_, r)| r.is_within(&generalized))
            .map(|(v, _)| (*v).clone())
            .collect();
        out.push(RegexCluster {
            members: matched,
            signature: signature.clone(),
            generalized: generalized.clone(),
            level: ClusterLevel::Signature,
        });

        let mut exact: BTreeMap<&StructuredRegex, Vec<String>> = BTreeMap::new();
        for (v, r) in &members {
            exact.entry(r).or_default().push((*v).clone());
        }
        for (r, vals) in exact {
            if r != &generalized && r.is_within(&generalized) {
                out.push(RegexCluster {
                    members: vals,
                    signature: signature.clone(),
                    generalized: r.clone(),
                    level: ClusterLevel::Exact,
                });
            }
        }
    }
    out
}

fn merge<'a>(regexes: impl Iterator<Item = &'a StructuredRegex>) -> StructuredRegex {
    let mut merged: Option<StructuredRegex> = None;
    for r in regexes {
        match merged.as_mut() {
            None => merged = Some(r.clone()),
            Some(m) => {
                for (a, b) in m.runs.iter_mut().zip(&r.runs) {
                    a.min = a.min.min(b.min);
                    a.max = a.max.max(b.max);
                }
            }
        }
    }
    merged.unwrap_or_default()
}

/// Indices of the members kept after greedy trimming.
fn trim_to_coverage(regexes: &[&StructuredRegex], coverage: f64) -> Vec<usize> {
    let mut kept: Vec<usize> = (0..regexes.len()).collect();
    if coverage >= 1.0 || regexes.is_empty() {
        return kept;
    }
    let need = (coverage * regexes.len() as f64).ceil() as usize;
    let runs = regexes[0].runs.len();
    loop {
        // Candidate removals: all members at the extreme of some run.
        let mut best: Option<Vec<usize>> = None;
        for pos in 0..runs {
            let counts = kept.iter().map(|&i| regexes[i].runs[pos].min);
            let (lo, hi) = counts.fold((usize::MAX, 0), |(lo, hi), n| (lo.min(n), hi.max(n)));
            if lo == hi {
                continue;
            }
            for extreme in [lo, hi] {
                let drop: Vec<usize> = kept
                    .iter()
                    .copied()
                    .filter(|&i| regexes[i].runs[pos].min == extreme)
                    .collect();
                if best.as_ref().map_or(true, |b| drop.len() < b.len()) {
                    best = Some(drop);
                }
            }
        }
        match best {
            Some(drop) if kept.len() - drop.len() >= need.max(1) => {
                kept.retain(|i| !drop.contains(i));
            }
            _ => return kept,
        }
    }
}
