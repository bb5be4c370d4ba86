//! Transition-system definitions: which reduction templates a parser may use.
//!
//! A system is a finite set of reduction templates `la(p,q)` / `ra(p,q)` with
//! `p > q >= 1`. `la(p,q)` removes the stack symbol at position `p` (counting
//! from the top, topmost = 1) and makes it a dependent of the symbol at
//! position `q`; `ra(p,q)` removes position `q` and makes it a dependent of
//! position `p`. Shift is always available and not part of the set.

use std::collections::BTreeSet;
use std::fmt;
use std::str::FromStr;

use thiserror::Error;

/// Which side the removed symbol's head lies on.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum ReductionKind {
    /// `la(p,q)`: position `p` becomes a left dependent of position `q`.
    Left,
    /// `ra(p,q)`: position `q` becomes a right dependent of position `p`.
    Right,
}

/// A reduction template over stack positions, with `p > q >= 1`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct ReductionTemplate {
    kind: ReductionKind,
    p: usize,
    q: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SystemError {
    #[error("reduction positions must satisfy p > q >= 1, got p={p}, q={q}")]
    BadPositions { p: usize, q: usize },
    #[error("a system needs at least one reduction template")]
    EmptySystem,
    #[error("unknown system `{0}`")]
    UnknownSystem(String),
    #[error("malformed template `{0}`, expected `la:p,q` or `ra:p,q`")]
    MalformedTemplate(String),
    #[error("attardi systems need a depth of at least 2, got {0}")]
    BadAttardiDepth(usize),
}

impl ReductionTemplate {
    pub fn new(kind: ReductionKind, p: usize, q: usize) -> Result<Self, SystemError> {
        if q < 1 || p <= q {
            return Err(SystemError::BadPositions { p, q });
        }
        Ok(ReductionTemplate { kind, p, q })
    }

    pub fn left(p: usize, q: usize) -> Result<Self, SystemError> {
        Self::new(ReductionKind::Left, p, q)
    }

    pub fn right(p: usize, q: usize) -> Result<Self, SystemError> {
        Self::new(ReductionKind::Right, p, q)
    }

    pub fn kind(&self) -> ReductionKind {
        self.kind
    }

    /// Deeper stack position (removed by `la`, head for `ra`).
    pub fn p(&self) -> usize {
        self.p
    }

    /// Shallower stack position (head for `la`, removed by `ra`).
    pub fn q(&self) -> usize {
        self.q
    }

    /// Stack position of the symbol the reduction removes.
    pub fn removed_position(&self) -> usize {
        match self.kind {
            ReductionKind::Left => self.p,
            ReductionKind::Right => self.q,
        }
    }

    /// Stack position of the symbol that becomes the head.
    pub fn head_position(&self) -> usize {
        match self.kind {
            ReductionKind::Left => self.q,
            ReductionKind::Right => self.p,
        }
    }

    /// Distance between the two positions involved; the system's degree is
    /// the maximum over its templates.
    pub fn degree(&self) -> usize {
        self.p - self.q
    }

    /// Templates that any system containing `self` must also contain for the
    /// canonical rewriting to stay inside the system: the same reduction shifted
    /// one step toward the stack top on either or both positions, where legal.
    pub fn mandatory_set(&self) -> BTreeSet<ReductionTemplate> {
        let mut out = BTreeSet::new();
        if self.p > self.q + 1 {
            out.insert(ReductionTemplate {
                kind: self.kind,
                p: self.p - 1,
                q: self.q,
            });
        }
        if self.q > 1 {
            out.insert(ReductionTemplate {
                kind: self.kind,
                p: self.p - 1,
                q: self.q - 1,
            });
        }
        out
    }
}

impl fmt::Display for ReductionTemplate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let name = match self.kind {
            ReductionKind::Left => "la",
            ReductionKind::Right => "ra",
        };
        write!(f, "{}:{},{}", name, self.p, self.q)
    }
}

/// A bottom-up shift-reduce transition system: a set of reduction templates.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SystemSpec {
    templates: BTreeSet<ReductionTemplate>,
}

impl SystemSpec {
    pub fn new(templates: impl IntoIterator<Item = ReductionTemplate>) -> Result<Self, SystemError> {
        let templates: BTreeSet<_> = templates.into_iter().collect();
        if templates.is_empty() {
            return Err(SystemError::EmptySystem);
        }
        Ok(SystemSpec { templates })
    }

    /// The classic projective system: `{la(2,1), ra(2,1)}`.
    pub fn arc_standard() -> Self {
        SystemSpec {
            templates: [
                ReductionTemplate::left(2, 1).unwrap(),
                ReductionTemplate::right(2, 1).unwrap(),
            ]
            .into_iter()
            .collect(),
        }
    }

    /// The non-projective family `{la(p,1), ra(p,1) : 2 <= p <= depth}`.
    /// Its degree is `depth - 1`.
    pub fn attardi(depth: usize) -> Result<Self, SystemError> {
        if depth < 2 {
            return Err(SystemError::BadAttardiDepth(depth));
        }
        let mut templates = BTreeSet::new();
        for p in 2..=depth {
            templates.insert(ReductionTemplate::left(p, 1).unwrap());
            templates.insert(ReductionTemplate::right(p, 1).unwrap());
        }
        Ok(SystemSpec { templates })
    }

    pub fn templates(&self) -> impl Iterator<Item = ReductionTemplate> + '_ {
        self.templates.iter().copied()
    }

    pub fn contains(&self, t: ReductionTemplate) -> bool {
        self.templates.contains(&t)
    }

    pub fn len(&self) -> usize {
        self.templates.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// Maximum distance `p - q` over the templates.
    pub fn degree(&self) -> usize {
        self.templates.iter().map(|t| t.degree()).max().unwrap()
    }

    /// Maximum position `p` over the templates: how deep into the stack any
    /// reduction reaches.
    pub fn depth(&self) -> usize {
        self.templates.iter().map(|t| t.p()).max().unwrap()
    }

    /// A system is monotonic when it contains the mandatory set of each of
    /// its templates. Only monotonic systems admit the canonical form.
    pub fn is_monotonic(&self) -> bool {
        self.missing_mandatory().is_empty()
    }

    /// For each template with unmet obligations, the templates it demands
    /// that the system lacks. Empty exactly when the system is monotonic.
    pub fn missing_mandatory(&self) -> Vec<(ReductionTemplate, Vec<ReductionTemplate>)> {
        let mut out = Vec::new();
        for &t in &self.templates {
            let missing: Vec<_> = t
                .mandatory_set()
                .into_iter()
                .filter(|m| !self.templates.contains(m))
                .collect();
            if !missing.is_empty() {
                out.push((t, missing));
            }
        }
        out
    }
}

impl fmt::Display for SystemSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for t in &self.templates {
            if !first {
                write!(f, ";")?;
            }
            write!(f, "{t}")?;
            first = false;
        }
        Ok(())
    }
}

impl FromStr for SystemSpec {
    type Err = SystemError;

    /// Parses either a builtin name (`arc-standard`, `attardi:<depth>`,
    /// `attardi-deg2`) or a semicolon-separated template list like
    /// `la:2,1;ra:2,1;la:3,1;ra:3,1`.
    fn from_str(s: &str) -> Result<Self, SystemError> {
        let s = s.trim();
        if s == "arc-standard" {
            return Ok(SystemSpec::arc_standard());
        }
        if s == "attardi-deg2" {
            return SystemSpec::attardi(3);
        }
        if let Some(num) = s.strip_prefix("attardi:") {
            let depth: usize = num
                .trim()
                .parse()
                .map_err(|_| SystemError::UnknownSystem(s.to_string()))?;
            return SystemSpec::attardi(depth);
        }
        if !s.contains(':') {
            return Err(SystemError::UnknownSystem(s.to_string()));
        }
        let mut templates = BTreeSet::new();
        for part in s.split(';') {
            let part = part.trim();
            let (name, positions) = part
                .split_once(':')
                .ok_or_else(|| SystemError::MalformedTemplate(part.to_string()))?;
            let kind = match name.trim() {
                "la" => ReductionKind::Left,
                "ra" => ReductionKind::Right,
                _ => return Err(SystemError::MalformedTemplate(part.to_string())),
            };
            let (p, q) = positions
                .split_once(',')
                .ok_or_else(|| SystemError::MalformedTemplate(part.to_string()))?;
            let p: usize = p
                .trim()
                .parse()
                .map_err(|_| SystemError::MalformedTemplate(part.to_string()))?;
            let q: usize = q
                .trim()
                .parse()
                .map_err(|_| SystemError::MalformedTemplate(part.to_string()))?;
            templates.insert(ReductionTemplate::new(kind, p, q)?);
        }
        SystemSpec::new(templates)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_bad_positions() {
        assert!(ReductionTemplate::left(1, 1).is_err());
        assert!(ReductionTemplate::right(2, 0).is_err());
        assert!(ReductionTemplate::left(2, 3).is_err());
        assert!(ReductionTemplate::left(3, 1).is_ok());
    }

    #[test]
    fn mandatory_set_examples() {
        // ra(3,2) demands ra(2,1): p > q+1 fails (3 = 2+1), q > 1 holds.
        let t = ReductionTemplate::right(3, 2).unwrap();
        let expected: BTreeSet<_> = [ReductionTemplate::right(2, 1).unwrap()].into_iter().collect();
        assert_eq!(t.mandatory_set(), expected);

        // la(3,1) demands la(2,1) only.
        let t = ReductionTemplate::left(3, 1).unwrap();
        let expected: BTreeSet<_> = [ReductionTemplate::left(2, 1).unwrap()].into_iter().collect();
        assert_eq!(t.mandatory_set(), expected);

        // la(4,2) demands both la(3,2) and la(3,1).
        let t = ReductionTemplate::left(4, 2).unwrap();
        let expected: BTreeSet<_> = [
            ReductionTemplate::left(3, 2).unwrap(),
            ReductionTemplate::left(3, 1).unwrap(),
        ]
        .into_iter()
        .collect();
        assert_eq!(t.mandatory_set(), expected);

        // la(2,1) demands nothing.
        let t = ReductionTemplate::left(2, 1).unwrap();
        assert!(t.mandatory_set().is_empty());
    }

    #[test]
    fn builtin_systems() {
        let std = SystemSpec::arc_standard();
        assert_eq!(std.len(), 2);
        assert_eq!(std.degree(), 1);
        assert_eq!(std.depth(), 2);
        assert!(std.is_monotonic());

        let att = SystemSpec::attardi(3).unwrap();
        assert_eq!(att.len(), 4);
        assert_eq!(att.degree(), 2);
        assert_eq!(att.depth(), 3);
        assert!(att.is_monotonic());
    }

    #[test]
    fn attardi_family_is_monotonic_for_all_depths() {
        for depth in 2..=6 {
            assert!(SystemSpec::attardi(depth).unwrap().is_monotonic());
        }
    }

    #[test]
    fn non_monotonic_example() {
        // la(3,1) without la(2,1).
        let sys = SystemSpec::new([ReductionTemplate::left(3, 1).unwrap()]).unwrap();
        assert!(!sys.is_monotonic());
        let missing = sys.missing_mandatory();
        assert_eq!(missing.len(), 1);
        assert_eq!(missing[0].1, vec![ReductionTemplate::left(2, 1).unwrap()]);
    }

    #[test]
    fn dsl_round_trip() {
        for input in ["arc-standard", "attardi:3", "la:2,1;ra:2,1;la:3,2"] {
            let sys: SystemSpec = input.parse().unwrap();
            let rendered = sys.to_string();
            let reparsed: SystemSpec = rendered.parse().unwrap();
            assert_eq!(sys, reparsed, "{input}");
        }
    }

    #[test]
    fn dsl_aliases() {
        let a: SystemSpec = "attardi-deg2".parse().unwrap();
        let b: SystemSpec = "attardi:3".parse().unwrap();
        assert_eq!(a, b);
        let c: SystemSpec = "attardi:2".parse().unwrap();
        assert_eq!(c, SystemSpec::arc_standard());
    }

    #[test]
    fn dsl_rejects_garbage() {
        assert!("".parse::<SystemSpec>().is_err());
        assert!("frobnicate".parse::<SystemSpec>().is_err());
        assert!("la:1,1".parse::<SystemSpec>().is_err());
        assert!("xx:2,1".parse::<SystemSpec>().is_err());
        assert!("la:2".parse::<SystemSpec>().is_err());
        assert!("attardi:1".parse::<SystemSpec>().is_err());
        assert!("attardi:x".parse::<SystemSpec>().is_err());
    }

    #[test]
    fn display_format() {
        let sys = SystemSpec::arc_standard();
        assert_eq!(sys.to_string(), "la:2,1;ra:2,1");
    }
}
