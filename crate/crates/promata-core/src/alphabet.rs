//! Monoidal graphs and monoidal alphabets.
//!
//! A monoidal graph is a finite signature of edges whose domains and
//! codomains are words over a finite vertex set. A monoidal alphabet is the
//! one-vertex case: domain and codomain words collapse to lengths, so each
//! generator carries just an arity and a coarity.

use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use thiserror::Error;

/// Index of a generator within its [`Alphabet`]. Generators are stored in
/// lexicographic name order, so `GenId` order agrees with name order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct GenId(pub usize);

/// A single generator declaration.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub struct GenDecl {
    pub name: String,
    pub arity: usize,
    pub coarity: usize,
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum AlphabetError {
    #[error("duplicate generator name `{0}`")]
    DuplicateGenerator(String),
    #[error("unknown generator `{0}`")]
    UnknownGenerator(String),
    #[error("edge `{edge}` mentions unknown vertex `{vertex}`")]
    UnknownVertex { edge: String, vertex: String },
    #[error("duplicate edge name `{0}`")]
    DuplicateEdge(String),
}

/// A finite monoidal alphabet: generator names with arities and coarities.
#[derive(Clone, PartialEq, Eq)]
pub struct Alphabet {
    gens: Vec<GenDecl>,
    index: BTreeMap<String, GenId>,
}

impl PartialOrd for Alphabet {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Alphabet {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        self.gens.cmp(&other.gens)
    }
}

impl Alphabet {
    /// Builds an alphabet from `(name, arity, coarity)` triples. Order of
    /// the input is irrelevant; generators are sorted by name.
    pub fn new<I, S>(gens: I) -> Result<Arc<Alphabet>, AlphabetError>
    where
        I: IntoIterator<Item = (S, usize, usize)>,
        S: Into<String>,
    {
        let mut decls: Vec<GenDecl> = gens
            .into_iter()
            .map(|(name, arity, coarity)| GenDecl {
                name: name.into(),
                arity,
                coarity,
            })
            .collect();
        decls.sort_by(|a, b| a.name.cmp(&b.name));
        let mut index = BTreeMap::new();
        for (i, d) in decls.iter().enumerate() {
            if index.insert(d.name.clone(), GenId(i)).is_some() {
                return Err(AlphabetError::DuplicateGenerator(d.name.clone()));
            }
        }
        Ok(Arc::new(Alphabet { gens: decls, index }))
    }

    pub fn len(&self) -> usize {
        self.gens.len()
    }

    pub fn is_empty(&self) -> bool {
        self.gens.is_empty()
    }

    pub fn gens(&self) -> &[GenDecl] {
        &self.gens
    }

    pub fn get(&self, id: GenId) -> &GenDecl {
        &self.gens[id.0]
    }

    pub fn arity(&self, id: GenId) -> usize {
        self.gens[id.0].arity
    }

    pub fn coarity(&self, id: GenId) -> usize {
        self.gens[id.0].coarity
    }

    pub fn name(&self, id: GenId) -> &str {
        &self.gens[id.0].name
    }

    pub fn id(&self, name: &str) -> Result<GenId, AlphabetError> {
        self.index
            .get(name)
            .copied()
            .ok_or_else(|| AlphabetError::UnknownGenerator(name.to_string()))
    }

    pub fn contains(&self, name: &str) -> bool {
        self.index.contains_key(name)
    }

    /// Ids of all generators, in name order.
    pub fn ids(&self) -> impl Iterator<Item = GenId> {
        (0..self.gens.len()).map(GenId)
    }

    /// Largest width any single generator needs on either side.
    pub fn max_port_width(&self) -> usize {
        self.gens
            .iter()
            .map(|g| g.arity.max(g.coarity))
            .max()
            .unwrap_or(0)
    }
}

impl fmt::Debug for Alphabet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut m = f.debug_map();
        for g in &self.gens {
            m.entry(&g.name, &format_args!("{} -> {}", g.arity, g.coarity));
        }
        m.finish()
    }
}

/// An edge of a monoidal graph: a named generator typed by words over the
/// vertex set.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Edge {
    pub name: String,
    pub dom: Vec<String>,
    pub cod: Vec<String>,
}

/// A finite monoidal graph: vertices plus typed edges.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MonoidalGraph {
    pub vertices: Vec<String>,
    pub edges: Vec<Edge>,
}

impl MonoidalGraph {
    pub fn new(
        vertices: Vec<String>,
        edges: Vec<Edge>,
    ) -> Result<MonoidalGraph, AlphabetError> {
        let mut vs = vertices;
        vs.sort();
        vs.dedup();
        let vset: BTreeMap<&str, ()> = vs.iter().map(|v| (v.as_str(), ())).collect();
        let mut names = BTreeMap::new();
        for e in &edges {
            if names.insert(e.name.clone(), ()).is_some() {
                return Err(AlphabetError::DuplicateEdge(e.name.clone()));
            }
            for v in e.dom.iter().chain(e.cod.iter()) {
                if !vset.contains_key(v.as_str()) {
                    return Err(AlphabetError::UnknownVertex {
                        edge: e.name.clone(),
                        vertex: v.clone(),
                    });
                }
            }
        }
        Ok(MonoidalGraph {
            vertices: vs,
            edges,
        })
    }
}
