//! Classical automata as monoidal automata over shaped alphabets.
//!
//! Word alphabets have one start generator (0 to 1), one end generator
//! (1 to 0) and letter generators (1 to 1); connected scalars over them are
//! exactly encoded words. Bottom-up tree alphabets have coarity-1 symbol
//! generators plus a root generator (1 to 0); connected scalars are trees
//! with leaves on the left and the root on the right. Top-down alphabets
//! are the mirror image.

use std::collections::{BTreeMap, BTreeSet};
use std::sync::Arc;

use itertools::Itertools;
use thiserror::Error;

use crate::alphabet::{Alphabet, AlphabetError};
use crate::automaton::NondetAutomaton;
use crate::dag;
use crate::diagram::{Diagram, DiagramError, Item};

pub const START: &str = "^start";
pub const END: &str = "$end";

#[derive(Debug, Error, PartialEq, Eq)]
pub enum EncodingError {
    #[error("not a word-shaped alphabet: {0}")]
    NotWordShaped(String),
    #[error("diagram is not an encoded word: {0}")]
    NotWordDiagram(String),
    #[error("letter `{0}` collides with a reserved generator name")]
    ReservedLetter(String),
    #[error("tree node `{symbol}` has {found} children, rank is {rank}")]
    RankMismatch {
        symbol: String,
        rank: usize,
        found: usize,
    },
    #[error("unknown symbol `{0}`")]
    UnknownSymbol(String),
    #[error(transparent)]
    Alphabet(#[from] AlphabetError),
    #[error(transparent)]
    Diagram(#[from] DiagramError),
}

/// A classical NFA, with an initial set so that decoded monoidal automata
/// fit without normalization.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ClassicalNfa {
    pub states: Vec<String>,
    pub letters: Vec<String>,
    pub transitions: BTreeSet<(String, String, String)>,
    pub initials: BTreeSet<String>,
    pub finals: BTreeSet<String>,
}

impl ClassicalNfa {
    /// Direct subset simulation; the independent acceptance oracle.
    pub fn accepts_word(&self, word: &[&str]) -> bool {
        let mut current: BTreeSet<&str> = self.initials.iter().map(|s| s.as_str()).collect();
        for letter in word {
            let mut next = BTreeSet::new();
            for (q, a, q2) in &self.transitions {
                if a == letter && current.contains(q.as_str()) {
                    next.insert(q2.as_str());
                }
            }
            current = next;
        }
        current.iter().any(|q| self.finals.contains(*q))
    }

    /// Classical accessible subset construction: returns the reachable
    /// subset states (sorted state-name sets) and the deterministic
    /// transition table. The independent determinization oracle.
    pub fn subset_construction(
        &self,
    ) -> (
        Vec<BTreeSet<String>>,
        BTreeMap<(BTreeSet<String>, String), BTreeSet<String>>,
    ) {
        let start: BTreeSet<String> = self.initials.clone();
        let mut seen = BTreeSet::from([start.clone()]);
        let mut queue = vec![start];
        let mut table = BTreeMap::new();
        while let Some(s) = queue.pop() {
            for letter in &self.letters {
                let mut next = BTreeSet::new();
                for (q, a, q2) in &self.transitions {
                    if a == letter && s.contains(q) {
                        next.insert(q2.clone());
                    }
                }
                table.insert((s.clone(), letter.clone()), next.clone());
                if !next.is_empty() && seen.insert(next.clone()) {
                    queue.push(next);
                }
            }
        }
        (seen.into_iter().collect(), table)
    }
}

/// The word monoidal alphabet for a letter set: one generator per letter
/// (1 to 1), a start generator (0 to 1) and an end generator (1 to 0).
pub fn word_alphabet(letters: &[String]) -> Result<Arc<Alphabet>, EncodingError> {
    for l in letters {
        if l == START || l == END {
            return Err(EncodingError::ReservedLetter(l.clone()));
        }
    }
    let mut gens: Vec<(String, usize, usize)> = letters
        .iter()
        .map(|l| (l.clone(), 1usize, 1usize))
        .collect();
    gens.push((START.to_string(), 0, 1));
    gens.push((END.to_string(), 1, 0));
    Ok(Alphabet::new(gens)?)
}

/// Encodes an NFA as a monoidal automaton over the word alphabet: letters
/// keep their transition relations, the start generator picks out the
/// initial set, the end generator is the characteristic function of the
/// final set.
pub fn nfa_to_monoidal(
    nfa: &ClassicalNfa,
) -> Result<(Arc<Alphabet>, NondetAutomaton), EncodingError> {
    let alphabet = word_alphabet(&nfa.letters)?;
    let mut transitions: BTreeMap<String, Vec<(Vec<String>, Vec<String>)>> = BTreeMap::new();
    for (q, a, q2) in &nfa.transitions {
        transitions
            .entry(a.clone())
            .or_default()
            .push((vec![q.clone()], vec![q2.clone()]));
    }
    transitions.insert(
        START.into(),
        nfa.initials.iter().map(|q| (vec![], vec![q.clone()])).collect(),
    );
    transitions.insert(
        END.into(),
        nfa.finals.iter().map(|q| (vec![q.clone()], vec![])).collect(),
    );
    let automaton = NondetAutomaton::new(alphabet.clone(), nfa.states.clone(), transitions)
        .expect("word encoding is well-formed");
    Ok((alphabet, automaton))
}

/// Checks the word shape: exactly one 0-to-1 generator, exactly one
/// 1-to-0 generator, all others 1-to-1. Returns (start, end, letters).
pub fn word_shape(alphabet: &Alphabet) -> Result<(String, String, Vec<String>), EncodingError> {
    let mut start = None;
    let mut end = None;
    let mut letters = Vec::new();
    for g in alphabet.gens() {
        match (g.arity, g.coarity) {
            (0, 1) => {
                if start.replace(g.name.clone()).is_some() {
                    return Err(EncodingError::NotWordShaped("two start generators".into()));
                }
            }
            (1, 0) => {
                if end.replace(g.name.clone()).is_some() {
                    return Err(EncodingError::NotWordShaped("two end generators".into()));
                }
            }
            (1, 1) => letters.push(g.name.clone()),
            _ => {
                return Err(EncodingError::NotWordShaped(format!(
                    "generator `{}` has shape {} to {}",
                    g.name, g.arity, g.coarity
                )))
            }
        }
    }
    match (start, end) {
        (Some(s), Some(e)) => Ok((s, e, letters)),
        _ => Err(EncodingError::NotWordShaped(
            "missing start or end generator".into(),
        )),
    }
}

/// Reads a monoidal automaton over a word alphabet back as a classical
/// NFA, possibly with several initial states.
pub fn monoidal_to_nfa(a: &NondetAutomaton) -> Result<ClassicalNfa, EncodingError> {
    let alphabet = a.alphabet();
    let (start, end, letters) = word_shape(alphabet)?;
    let states = a.states().to_vec();
    let name = |q: usize| states[q].clone();
    let mut transitions = BTreeSet::new();
    for l in &letters {
        let rel = a.relation(alphabet.id(l).unwrap());
        for (i, o) in &rel.pairs {
            transitions.insert((name(i[0]), l.clone(), name(o[0])));
        }
    }
    let initials = a
        .relation(alphabet.id(&start).unwrap())
        .pairs
        .iter()
        .map(|(_, o)| name(o[0]))
        .collect();
    let finals = a
        .relation(alphabet.id(&end).unwrap())
        .pairs
        .iter()
        .map(|(i, _)| name(i[0]))
        .collect();
    Ok(ClassicalNfa {
        states,
        letters,
        transitions,
        initials,
        finals,
    })
}

/// Encodes a word as the connected scalar `start ; letters ; end`.
pub fn word_to_diagram(
    alphabet: &Arc<Alphabet>,
    word: &[&str],
) -> Result<Diagram, EncodingError> {
    let (start, end, _) = word_shape(alphabet)?;
    let mut d = Diagram::generator(alphabet, &start)?;
    for letter in word {
        d = d.compose(&Diagram::generator(alphabet, letter)?)?;
    }
    Ok(d.compose(&Diagram::generator(alphabet, &end)?)?)
}

/// Decodes a connected scalar over a word alphabet back to its word.
pub fn diagram_to_word(d: &Diagram) -> Result<Vec<String>, EncodingError> {
    let alphabet = d.alphabet();
    let (start, end, _) = word_shape(alphabet)?;
    if !d.is_scalar() {
        return Err(EncodingError::NotWordDiagram("not scalar".into()));
    }
    if !dag::is_connected(d) {
        return Err(EncodingError::NotWordDiagram("not connected".into()));
    }
    let nf = d.normalize();
    let mut word = Vec::new();
    let mut gens = nf
        .slices()
        .iter()
        .flat_map(|s| s.iter())
        .filter_map(|i| match i {
            Item::Gen(g) => Some(alphabet.name(*g).to_string()),
            Item::Wire => None,
        });
    if gens.next() != Some(start) {
        return Err(EncodingError::NotWordDiagram("does not begin with start".into()));
    }
    for g in gens {
        if g == end {
            return Ok(word);
        }
        word.push(g);
    }
    Err(EncodingError::NotWordDiagram("does not finish with end".into()))
}

/// A ranked alphabet: tree symbols with child counts.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RankedAlphabet {
    pub ranks: BTreeMap<String, usize>,
}

/// A well-ranked tree over a ranked alphabet.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub struct Tree {
    pub symbol: String,
    pub children: Vec<Tree>,
}

impl Tree {
    pub fn leaf(symbol: &str) -> Tree {
        Tree {
            symbol: symbol.into(),
            children: Vec::new(),
        }
    }

    pub fn node(symbol: &str, children: Vec<Tree>) -> Tree {
        Tree {
            symbol: symbol.into(),
            children,
        }
    }

    pub fn size(&self) -> usize {
        1 + self.children.iter().map(Tree::size).sum::<usize>()
    }

    pub fn check(&self, ranks: &RankedAlphabet) -> Result<(), EncodingError> {
        let rank = *ranks
            .ranks
            .get(&self.symbol)
            .ok_or_else(|| EncodingError::UnknownSymbol(self.symbol.clone()))?;
        if rank != self.children.len() {
            return Err(EncodingError::RankMismatch {
                symbol: self.symbol.clone(),
                rank,
                found: self.children.len(),
            });
        }
        for c in &self.children {
            c.check(ranks)?;
        }
        Ok(())
    }
}

/// All trees over the ranked alphabet with at most `max_nodes` nodes.
pub fn enumerate_trees(ranks: &RankedAlphabet, max_nodes: usize) -> Vec<Tree> {
    let mut by_size: Vec<Vec<Tree>> = vec![Vec::new(); max_nodes + 1];
    for size in 1..=max_nodes {
        let mut here = Vec::new();
        for (symbol, rank) in &ranks.ranks {
            if *rank == 0 {
                if size == 1 {
                    here.push(Tree::leaf(symbol));
                }
                continue;
            }
            // Children sizes summing to size - 1, each at least 1.
            for split in compositions(size - 1, *rank) {
                let choices: Vec<&Vec<Tree>> = split.iter().map(|s| &by_size[*s]).collect();
                for combo in choices.into_iter().multi_cartesian_product() {
                    here.push(Tree::node(symbol, combo.into_iter().cloned().collect()));
                }
            }
        }
        by_size[size] = here;
    }
    let mut out: Vec<Tree> = by_size.into_iter().flatten().collect();
    out.sort();
    out
}

fn compositions(total: usize, parts: usize) -> Vec<Vec<usize>> {
    if parts == 0 {
        return if total == 0 { vec![vec![]] } else { vec![] };
    }
    let mut out = Vec::new();
    for first in 1..=total.saturating_sub(parts - 1) {
        for mut rest in compositions(total - first, parts - 1) {
            rest.insert(0, first);
            out.push(rest);
        }
    }
    out
}

/// A non-deterministic finite tree automaton, bottom-up or top-down.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum TreeAutomaton {
    BottomUp {
        states: Vec<String>,
        ranks: RankedAlphabet,
        /// Per symbol: (child states, parent state).
        transitions: BTreeSet<(String, Vec<String>, String)>,
        finals: BTreeSet<String>,
    },
    TopDown {
        states: Vec<String>,
        ranks: RankedAlphabet,
        /// Per symbol: (parent state, child states).
        transitions: BTreeSet<(String, String, Vec<String>)>,
        initials: BTreeSet<String>,
    },
}

impl TreeAutomaton {
    /// Direct bottom-up run: the independent tree acceptance oracle.
    pub fn bu_accepts(&self, tree: &Tree) -> bool {
        match self {
            TreeAutomaton::BottomUp {
                transitions,
                finals,
                ..
            } => {
                fn states_of(
                    transitions: &BTreeSet<(String, Vec<String>, String)>,
                    tree: &Tree,
                ) -> BTreeSet<String> {
                    let child_sets: Vec<BTreeSet<String>> = tree
                        .children
                        .iter()
                        .map(|c| states_of(transitions, c))
                        .collect();
                    let mut out = BTreeSet::new();
                    for (sym, kids, parent) in transitions {
                        if sym == &tree.symbol
                            && kids.len() == child_sets.len()
                            && kids
                                .iter()
                                .zip(child_sets.iter())
                                .all(|(k, set)| set.contains(k))
                        {
                            out.insert(parent.clone());
                        }
                    }
                    out
                }
                states_of(transitions, tree)
                    .iter()
                    .any(|q| finals.contains(q))
            }
            TreeAutomaton::TopDown { .. } => {
                panic!("bu_accepts called on a top-down automaton")
            }
        }
    }

    /// Direct top-down run from the initial set.
    pub fn td_accepts(&self, tree: &Tree) -> bool {
        match self {
            TreeAutomaton::TopDown {
                transitions,
                initials,
                ..
            } => {
                fn accepted_from(
                    transitions: &BTreeSet<(String, String, Vec<String>)>,
                    tree: &Tree,
                    q: &str,
                ) -> bool {
                    transitions.iter().any(|(sym, parent, kids)| {
                        sym == &tree.symbol
                            && parent == q
                            && kids.len() == tree.children.len()
                            && tree
                                .children
                                .iter()
                                .zip(kids.iter())
                                .all(|(c, k)| accepted_from(transitions, c, k))
                    })
                }
                initials
                    .iter()
                    .any(|q| accepted_from(transitions, tree, q))
            }
            TreeAutomaton::BottomUp { .. } => {
                panic!("td_accepts called on a bottom-up automaton")
            }
        }
    }
}

/// The tree monoidal alphabet: bottom-up symbols get coarity 1 and arity
/// equal to their rank (mirrored for top-down), plus a root generator.
pub fn tree_alphabet(
    ranks: &RankedAlphabet,
    top_down: bool,
) -> Result<Arc<Alphabet>, EncodingError> {
    let root = if top_down { START } else { END };
    let mut gens: Vec<(String, usize, usize)> = Vec::new();
    for (sym, rank) in &ranks.ranks {
        if sym == START || sym == END {
            return Err(EncodingError::ReservedLetter(sym.clone()));
        }
        if top_down {
            gens.push((sym.clone(), 1, *rank));
        } else {
            gens.push((sym.clone(), *rank, 1));
        }
    }
    gens.push((
        root.to_string(),
        if top_down { 0 } else { 1 },
        if top_down { 1 } else { 0 },
    ));
    Ok(Alphabet::new(gens)?)
}

/// Encodes a tree automaton as a monoidal automaton over its tree
/// alphabet. The root generator carries the final (bottom-up) or initial
/// (top-down) set.
pub fn treeaut_to_monoidal(
    t: &TreeAutomaton,
) -> Result<(Arc<Alphabet>, NondetAutomaton), EncodingError> {
    match t {
        TreeAutomaton::BottomUp {
            states,
            ranks,
            transitions,
            finals,
        } => {
            let alphabet = tree_alphabet(ranks, false)?;
            let mut table: BTreeMap<String, Vec<(Vec<String>, Vec<String>)>> = BTreeMap::new();
            for (sym, kids, parent) in transitions {
                table
                    .entry(sym.clone())
                    .or_default()
                    .push((kids.clone(), vec![parent.clone()]));
            }
            table.insert(
                END.into(),
                finals.iter().map(|q| (vec![q.clone()], vec![])).collect(),
            );
            let aut = NondetAutomaton::new(alphabet.clone(), states.clone(), table)
                .expect("tree encoding is well-formed");
            Ok((alphabet, aut))
        }
        TreeAutomaton::TopDown {
            states,
            ranks,
            transitions,
            initials,
        } => {
            let alphabet = tree_alphabet(ranks, true)?;
            let mut table: BTreeMap<String, Vec<(Vec<String>, Vec<String>)>> = BTreeMap::new();
            for (sym, parent, kids) in transitions {
                table
                    .entry(sym.clone())
                    .or_default()
                    .push((vec![parent.clone()], kids.clone()));
            }
            table.insert(
                START.into(),
                initials.iter().map(|q| (vec![], vec![q.clone()])).collect(),
            );
            let aut = NondetAutomaton::new(alphabet.clone(), states.clone(), table)
                .expect("tree encoding is well-formed");
            Ok((alphabet, aut))
        }
    }
}

/// Encodes a tree as a connected scalar: leaves leftmost for bottom-up
/// alphabets, root leftmost for top-down ones.
pub fn tree_to_diagram(
    alphabet: &Arc<Alphabet>,
    tree: &Tree,
    top_down: bool,
) -> Result<Diagram, EncodingError> {
    fn bu(alphabet: &Arc<Alphabet>, tree: &Tree) -> Result<Diagram, EncodingError> {
        let mut kids = Diagram::empty(alphabet.clone());
        for c in &tree.children {
            kids = kids.tensor(&bu(alphabet, c)?)?;
        }
        Ok(kids.compose(&Diagram::generator(alphabet, &tree.symbol)?)?)
    }
    fn td(alphabet: &Arc<Alphabet>, tree: &Tree) -> Result<Diagram, EncodingError> {
        let mut kids = Diagram::empty(alphabet.clone());
        for c in &tree.children {
            kids = kids.tensor(&td(alphabet, c)?)?;
        }
        Ok(Diagram::generator(alphabet, &tree.symbol)?.compose(&kids)?)
    }
    if top_down {
        Ok(Diagram::generator(alphabet, START)?.compose(&td(alphabet, tree)?)?)
    } else {
        Ok(bu(alphabet, tree)?.compose(&Diagram::generator(alphabet, END)?)?)
    }
}

/// Keeps only the diagrams whose dataflow graph is connected (the empty
/// diagram is excluded).
pub fn connected_filter(stream: impl IntoIterator<Item = Diagram>) -> Vec<Diagram> {
    stream.into_iter().filter(dag::is_connected).collect()
}
