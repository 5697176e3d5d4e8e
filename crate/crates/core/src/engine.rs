//! Retrieval modes and the engine that routes queries to per-mode indexes.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::encoder::{encode_query, FieldedTerms};
use crate::enrich::{apply_rules, RuleSet};
use crate::error::{Error, Result};
use crate::eval::Retriever;
use crate::expr::{ExprTree, Markup};
use crate::index::{Index, SearchResult};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    /// Presentation markup as written.
    PMathML,
    /// Content markup produced by the learned rules.
    SE,
    /// Content markup as supplied with the data.
    CMathML,
}

impl Mode {
    pub const ALL: [Mode; 3] = [Mode::PMathML, Mode::SE, Mode::CMathML];

    pub fn label(self) -> &'static str {
        match self {
            Mode::PMathML => "PMathML",
            Mode::SE => "SE",
            Mode::CMathML => "CMathML",
        }
    }

    /// Lower-case name used on the command line and in file names.
    pub fn name(self) -> &'static str {
        match self {
            Mode::PMathML => "pmathml",
            Mode::SE => "se",
            Mode::CMathML => "cmathml",
        }
    }
}

impl fmt::Display for Mode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

impl FromStr for Mode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Mode> {
        Mode::ALL
            .into_iter()
            .find(|m| m.name().eq_ignore_ascii_case(s))
            .ok_or_else(|| Error::InvalidArgument(format!("unknown mode `{s}`")))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Query {
    pub id: String,
    pub pmathml: ExprTree,
    /// Hand-written content form, used by the CMathML mode when present.
    pub cmathml: Option<ExprTree>,
    pub note: Option<String>,
}

impl Query {
    pub fn new(id: impl Into<String>, pmathml: ExprTree) -> Query {
        Query {
            id: id.into(),
            pmathml,
            cmathml: None,
            note: None,
        }
    }
}

/// Per-mode indexes plus the rules that turn presentation queries into
/// content queries.
#[derive(Debug, Clone, Default)]
pub struct Engine {
    indexes: BTreeMap<Mode, Index>,
    rules: RuleSet,
}

impl Engine {
    pub fn new(rules: RuleSet) -> Engine {
        Engine {
            indexes: BTreeMap::new(),
            rules,
        }
    }

    pub fn insert_index(&mut self, mode: Mode, index: Index) {
        self.indexes.insert(mode, index);
    }

    pub fn index(&self, mode: Mode) -> Result<&Index> {
        self.indexes
            .get(&mode)
            .ok_or_else(|| Error::MissingMode(mode.name().to_string()))
    }

    pub fn modes(&self) -> impl Iterator<Item = Mode> + '_ {
        self.indexes.keys().copied()
    }

    pub fn rules(&self) -> &RuleSet {
        &self.rules
    }

    /// The tree a query is matched with in `mode`. Presentation input is
    /// converted by the rules for the content modes; content input is used
    /// as given.
    pub fn query_tree(&self, mode: Mode, query: &Query) -> ExprTree {
        match mode {
            Mode::PMathML => query.pmathml.clone(),
            Mode::CMathML if query.cmathml.is_some() => query.cmathml.clone().unwrap(),
            Mode::SE | Mode::CMathML => self.to_content(&query.pmathml),
        }
    }

    fn to_content(&self, tree: &ExprTree) -> ExprTree {
        if tree.markup == Markup::Content {
            tree.clone()
        } else {
            apply_rules(tree, &self.rules).ctree
        }
    }

    pub fn encode(&self, mode: Mode, query: &Query) -> FieldedTerms {
        encode_query(&self.query_tree(mode, query))
    }

    pub fn search(&self, mode: Mode, query: &Query, k: usize) -> Result<Vec<SearchResult>> {
        let index = self.index(mode)?;
        Ok(index.search(&self.encode(mode, query), k))
    }
}

impl Retriever for Engine {
    fn retrieve(&self, mode: Mode, query: &Query, k: usize) -> Result<Vec<String>> {
        Ok(self
            .search(mode, query, k)?
            .into_iter()
            .map(|r| r.doc_id)
            .collect())
    }
}
