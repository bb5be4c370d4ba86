//! CoNLL-X treebank ingestion and oracle-coverage statistics.
//!
//! Input is the tab-separated CoNLL-X shape: one token per line with at
//! least 8 fields (ID, FORM, ..., HEAD at field 7), sentences separated by
//! blank lines. Only ID, FORM, and HEAD are consumed; labels and the rest
//! are ignored. Sentences that do not encode a single-rooted tree are kept
//! and flagged malformed rather than dropped.

use std::fmt::Write as _;

use thiserror::Error;

use crate::oracle::canonical_oracle;
use crate::system::SystemSpec;
use crate::tree::{DependencyTree, NodeId};

/// One token line: its 1-based position, surface form, and head index.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ConllToken {
    pub id: usize,
    pub form: String,
    pub head: NodeId,
}

/// Why a sentence does not encode a usable tree.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("{reason}")]
pub struct MalformedSentence {
    pub reason: String,
}

impl MalformedSentence {
    fn new(reason: impl Into<String>) -> Self {
        MalformedSentence {
            reason: reason.into(),
        }
    }
}

/// A sentence block: its tokens plus either the tree they encode or the
/// reason they do not.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ConllSentence {
    pub tokens: Vec<ConllToken>,
    pub tree: Result<DependencyTree, MalformedSentence>,
}

impl ConllSentence {
    /// Builds a well-formed sentence from a tree, with one form per word.
    pub fn from_tree(tree: DependencyTree, forms: Vec<String>) -> Self {
        assert_eq!(forms.len(), tree.len(), "one form per word");
        let tokens = forms
            .into_iter()
            .enumerate()
            .map(|(i, form)| ConllToken {
                id: i + 1,
                form,
                head: tree.head_of(i + 1),
            })
            .collect();
        ConllSentence {
            tokens,
            tree: Ok(tree),
        }
    }

    pub fn len(&self) -> usize {
        self.tokens.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tokens.is_empty()
    }

    pub fn is_malformed(&self) -> bool {
        self.tree.is_err()
    }
}

fn sentence_from_tokens(tokens: Vec<ConllToken>, flaw: Option<MalformedSentence>) -> ConllSentence {
    let tree = match flaw {
        Some(flaw) => Err(flaw),
        None => derive_tree(&tokens),
    };
    ConllSentence { tokens, tree }
}

fn derive_tree(tokens: &[ConllToken]) -> Result<DependencyTree, MalformedSentence> {
    let n = tokens.len();
    for (i, token) in tokens.iter().enumerate() {
        if token.id != i + 1 {
            return Err(MalformedSentence::new(format!(
                "token ids are not contiguous: expected {}, found {}",
                i + 1,
                token.id
            )));
        }
        if token.head > n {
            return Err(MalformedSentence::new(format!(
                "token {} names head {} beyond the sentence of {} words",
                token.id, token.head, n
            )));
        }
    }
    let roots = tokens.iter().filter(|t| t.head == 0).count();
    if roots > 1 {
        return Err(MalformedSentence::new(format!(
            "{roots} tokens attach to the root; expected exactly one"
        )));
    }
    let heads: Vec<NodeId> = tokens.iter().map(|t| t.head).collect();
    DependencyTree::from_heads(&heads)
        .map_err(|e| MalformedSentence::new(format!("head vector is not a tree: {e}")))
}

/// Parses CoNLL-X text into sentences. Lines whose first field is not a
/// plain integer (comments, multi-word ranges) are skipped; blocks that end
/// up empty are dropped; everything else is kept, flagged when broken.
pub fn parse_conllx(text: &str) -> Vec<ConllSentence> {
    let mut sentences = Vec::new();
    let mut tokens: Vec<ConllToken> = Vec::new();
    let mut flaw: Option<MalformedSentence> = None;

    let mut flush = |tokens: &mut Vec<ConllToken>, flaw: &mut Option<MalformedSentence>| {
        if !tokens.is_empty() {
            sentences.push(sentence_from_tokens(std::mem::take(tokens), flaw.take()));
        } else {
            *flaw = None;
        }
    };

    for line in text.lines() {
        if line.trim().is_empty() {
            flush(&mut tokens, &mut flaw);
            continue;
        }
        let fields: Vec<&str> = line.split('\t').collect();
        let Ok(id) = fields[0].trim().parse::<usize>() else {
            continue;
        };
        if fields.len() < 8 {
            flaw.get_or_insert_with(|| {
                MalformedSentence::new(format!(
                    "token line {} has {} fields, expected at least 8",
                    id,
                    fields.len()
                ))
            });
            tokens.push(ConllToken {
                id,
                form: fields.get(1).unwrap_or(&"").to_string(),
                head: 0,
            });
            continue;
        }
        match fields[6].trim().parse::<usize>() {
            Ok(head) => tokens.push(ConllToken {
                id,
                form: fields[1].to_string(),
                head,
            }),
            Err(_) => {
                flaw.get_or_insert_with(|| {
                    MalformedSentence::new(format!(
                        "token {} has a non-numeric head field `{}`",
                        id, fields[6]
                    ))
                });
                tokens.push(ConllToken {
                    id,
                    form: fields[1].to_string(),
                    head: 0,
                });
            }
        }
    }
    flush(&mut tokens, &mut flaw);
    sentences
}

/// Renders sentences back to CoNLL-X text (10 columns, unused ones `_`,
/// blank line after each sentence).
pub fn write_conllx(sentences: &[ConllSentence]) -> String {
    let mut out = String::new();
    for sentence in sentences {
        for token in &sentence.tokens {
            writeln!(
                out,
                "{}\t{}\t_\t_\t_\t_\t{}\t_\t_\t_",
                token.id, token.form, token.head
            )
            .expect("writing to a String cannot fail");
        }
        out.push('\n');
    }
    out
}

/// Per-source oracle-coverage statistics: how many well-formed sentences the
/// system's oracle cannot derive, alongside projectivity and flagging counts.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CoverageRow {
    pub source: String,
    /// Well-formed sentences (malformed ones are counted separately).
    pub size: usize,
    /// Well-formed sentences the oracle cannot derive.
    pub failures: usize,
    pub non_projective: usize,
    pub malformed: usize,
}

/// Runs the oracle over every well-formed sentence of one source.
pub fn coverage(source: &str, sentences: &[ConllSentence], system: &SystemSpec) -> CoverageRow {
    let mut row = CoverageRow {
        source: source.to_string(),
        size: 0,
        failures: 0,
        non_projective: 0,
        malformed: 0,
    };
    for sentence in sentences {
        match &sentence.tree {
            Err(_) => row.malformed += 1,
            Ok(tree) => {
                row.size += 1;
                if !tree.is_projective() {
                    row.non_projective += 1;
                }
                if !canonical_oracle(tree, system).is_success() {
                    row.failures += 1;
                }
            }
        }
    }
    row
}

/// Renders coverage rows as a TSV table with a fixed header.
pub fn coverage_tsv(rows: &[CoverageRow]) -> String {
    let mut out = String::from("source\tsize\tfailures\tnon_projective\tmalformed\n");
    for row in rows {
        writeln!(
            out,
            "{}\t{}\t{}\t{}\t{}",
            row.source, row.size, row.failures, row.non_projective, row.malformed
        )
        .expect("writing to a String cannot fail");
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::tree::Arc;

    #[test]
    fn reads_id_form_and_head() {
        let text = "1\tla\t_\t_\t_\t_\t2\t_\t_\t_\n2\tmaison\t_\t_\t_\t_\t0\t_\t_\t_\n";
        let sentences = parse_conllx(text);
        assert_eq!(sentences.len(), 1);
        let s = &sentences[0];
        assert_eq!(s.tokens[0].form, "la");
        assert_eq!(s.tokens[1].form, "maison");
        let tree = s.tree.as_ref().unwrap();
        assert_eq!(
            tree.arc_set(),
            [Arc::new(0, 2), Arc::new(2, 1)].into_iter().collect()
        );
    }

    #[test]
    fn empty_input_has_no_sentences() {
        assert!(parse_conllx("").is_empty());
        assert!(parse_conllx("\n\n\n").is_empty());
    }

    #[test]
    fn blank_lines_separate_sentences() {
        let text = "1\ta\t_\t_\t_\t_\t0\t_\t_\t_\n\n1\tb\t_\t_\t_\t_\t0\t_\t_\t_\n";
        assert_eq!(parse_conllx(text).len(), 2);
    }

    #[test]
    fn cyclic_heads_are_flagged() {
        let text = "1\ta\t_\t_\t_\t_\t2\t_\t_\t_\n2\tb\t_\t_\t_\t_\t1\t_\t_\t_\n";
        let sentences = parse_conllx(text);
        assert_eq!(sentences.len(), 1);
        assert!(sentences[0].is_malformed());
    }

    #[test]
    fn multiple_root_attachments_are_flagged() {
        let text = "1\ta\t_\t_\t_\t_\t0\t_\t_\t_\n2\tb\t_\t_\t_\t_\t0\t_\t_\t_\n";
        let sentences = parse_conllx(text);
        assert!(sentences[0].is_malformed());
        assert!(sentences[0]
            .tree
            .as_ref()
            .unwrap_err()
            .reason
            .contains("root"));
    }

    #[test]
    fn gaps_in_ids_and_wild_heads_are_flagged() {
        let gap = "1\ta\t_\t_\t_\t_\t0\t_\t_\t_\n3\tb\t_\t_\t_\t_\t1\t_\t_\t_\n";
        assert!(parse_conllx(gap)[0].is_malformed());
        let wild = "1\ta\t_\t_\t_\t_\t7\t_\t_\t_\n";
        assert!(parse_conllx(wild)[0].is_malformed());
    }

    #[test]
    fn non_integer_id_lines_are_skipped() {
        let text = "# a comment\n1-2\tfused\t_\t_\t_\t_\t_\t_\t_\t_\n1\ta\t_\t_\t_\t_\t0\t_\t_\t_\n";
        let sentences = parse_conllx(text);
        assert_eq!(sentences.len(), 1);
        assert_eq!(sentences[0].len(), 1);
        assert!(!sentences[0].is_malformed());
    }

    #[test]
    fn short_lines_flag_the_sentence() {
        let text = "1\ta\t0\n";
        let sentences = parse_conllx(text);
        assert_eq!(sentences.len(), 1);
        assert!(sentences[0].is_malformed());
    }

    #[test]
    fn round_trip_preserves_trees() {
        let tree = DependencyTree::from_heads(&[2, 0, 2]).unwrap();
        let original = ConllSentence::from_tree(
            tree.clone(),
            vec!["a".into(), "b".into(), "c".into()],
        );
        let reparsed = parse_conllx(&write_conllx(std::slice::from_ref(&original)));
        assert_eq!(reparsed.len(), 1);
        assert_eq!(reparsed[0], original);
        assert_eq!(reparsed[0].tree.as_ref().unwrap(), &tree);
    }

    #[test]
    fn coverage_counts_projectivity_and_failures() {
        let projective = ConllSentence::from_tree(
            DependencyTree::from_heads(&[2, 0, 2]).unwrap(),
            vec!["a".into(), "b".into(), "c".into()],
        );
        let crossing = ConllSentence::from_tree(
            DependencyTree::from_heads(&[2, 0, 1, 2]).unwrap(),
            vec!["a".into(), "b".into(), "c".into(), "d".into()],
        );
        let broken = parse_conllx("1\ta\t_\t_\t_\t_\t2\t_\t_\t_\n2\tb\t_\t_\t_\t_\t1\t_\t_\t_\n")
            .pop()
            .unwrap();
        let sentences = [projective, crossing, broken];

        let std_row = coverage("sample", &sentences, &SystemSpec::arc_standard());
        assert_eq!(
            std_row,
            CoverageRow {
                source: "sample".into(),
                size: 2,
                failures: 1,
                non_projective: 1,
                malformed: 1,
            }
        );

        let att_row = coverage("sample", &sentences, &"attardi:3".parse().unwrap());
        assert_eq!(att_row.failures, 0);
        assert_eq!(att_row.non_projective, 1);
    }

    #[test]
    fn tsv_has_the_fixed_schema() {
        let rows = [CoverageRow {
            source: "x.conll".into(),
            size: 3,
            failures: 1,
            non_projective: 2,
            malformed: 0,
        }];
        assert_eq!(
            coverage_tsv(&rows),
            "source\tsize\tfailures\tnon_projective\tmalformed\nx.conll\t3\t1\t2\t0\n"
        );
    }
}
