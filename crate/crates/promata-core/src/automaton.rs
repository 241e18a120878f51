//! Non-deterministic monoidal automata.
//!
//! An automaton assigns each generator a relation between input words and
//! output words over a finite state set. Running a scalar diagram carries a
//! frontier of state words across the slices; the diagram is accepted when
//! the frontier survives to the empty boundary. The same frontier run,
//! started from every input word, computes the relation a general diagram
//! denotes, which is functorial in the diagram.

use std::collections::{BTreeMap, BTreeSet};
use std::sync::Arc;

use itertools::Itertools;
use thiserror::Error;

use crate::alphabet::{Alphabet, GenId};
use crate::diagram::{Diagram, DiagramError, Item};
use crate::enumerate;

pub type StateId = usize;
pub type Word = Vec<StateId>;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum AutomatonError {
    #[error("unknown state `{0}`")]
    UnknownState(String),
    #[error("unknown generator `{0}`")]
    UnknownGenerator(String),
    #[error("transition for `{gen}` has a word of the wrong length")]
    WordLengthMismatch { gen: String },
    #[error("diagram and automaton are over different alphabets")]
    AlphabetMismatch,
    #[error("operation requires a scalar diagram")]
    NotScalar,
    #[error(transparent)]
    Diagram(#[from] DiagramError),
}

/// A relation between `Q^arity` and `Q^coarity`, as a set of word pairs.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub struct TransitionRelation {
    pub arity: usize,
    pub coarity: usize,
    pub pairs: BTreeSet<(Word, Word)>,
}

impl TransitionRelation {
    pub fn empty(arity: usize, coarity: usize) -> Self {
        TransitionRelation {
            arity,
            coarity,
            pairs: BTreeSet::new(),
        }
    }

    /// Identity relation on `Q^n`.
    pub fn identity(n_states: usize, n: usize) -> Self {
        let mut pairs = BTreeSet::new();
        for w in words(n_states, n) {
            pairs.insert((w.clone(), w));
        }
        TransitionRelation {
            arity: n,
            coarity: n,
            pairs,
        }
    }

    /// Relational composition `self ; other`.
    pub fn then(&self, other: &TransitionRelation) -> TransitionRelation {
        assert_eq!(self.coarity, other.arity);
        let mut by_in: BTreeMap<&Word, Vec<&Word>> = BTreeMap::new();
        for (i, o) in &other.pairs {
            by_in.entry(i).or_default().push(o);
        }
        let mut pairs = BTreeSet::new();
        for (i, mid) in &self.pairs {
            if let Some(outs) = by_in.get(mid) {
                for o in outs {
                    pairs.insert((i.clone(), (*o).clone()));
                }
            }
        }
        TransitionRelation {
            arity: self.arity,
            coarity: other.coarity,
            pairs,
        }
    }

    /// Monoidal product of relations: pairwise concatenation.
    pub fn par(&self, other: &TransitionRelation) -> TransitionRelation {
        let mut pairs = BTreeSet::new();
        for (i1, o1) in &self.pairs {
            for (i2, o2) in &other.pairs {
                let mut i = i1.clone();
                i.extend(i2.iter().copied());
                let mut o = o1.clone();
                o.extend(o2.iter().copied());
                pairs.insert((i, o));
            }
        }
        TransitionRelation {
            arity: self.arity + other.arity,
            coarity: self.coarity + other.coarity,
            pairs,
        }
    }
}

/// All words of the given length over `0..n_states`.
pub fn words(n_states: usize, len: usize) -> Vec<Word> {
    if len == 0 {
        return vec![Vec::new()];
    }
    (0..len)
        .map(|_| 0..n_states)
        .multi_cartesian_product()
        .collect()
}

/// A non-deterministic monoidal automaton: per-generator transition
/// relations over a finite state set. States are stored sorted by name.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NondetAutomaton {
    alphabet: Arc<Alphabet>,
    states: Vec<String>,
    transitions: BTreeMap<GenId, TransitionRelation>,
    by_input: BTreeMap<GenId, BTreeMap<Word, Vec<Word>>>,
}

impl NondetAutomaton {
    /// Builds an automaton from named transition pairs. Generators missing
    /// from `transitions` get the empty relation.
    pub fn new(
        alphabet: Arc<Alphabet>,
        states: Vec<String>,
        transitions: BTreeMap<String, Vec<(Vec<String>, Vec<String>)>>,
    ) -> Result<NondetAutomaton, AutomatonError> {
        let mut names = states;
        names.sort();
        names.dedup();
        let index: BTreeMap<&str, StateId> = names
            .iter()
            .enumerate()
            .map(|(i, s)| (s.as_str(), i))
            .collect();
        let mut rels: BTreeMap<GenId, TransitionRelation> = BTreeMap::new();
        for gen in alphabet.ids() {
            rels.insert(
                gen,
                TransitionRelation::empty(alphabet.arity(gen), alphabet.coarity(gen)),
            );
        }
        for (gname, pairs) in transitions {
            let gen = alphabet
                .id(&gname)
                .map_err(|_| AutomatonError::UnknownGenerator(gname.clone()))?;
            let rel = rels.get_mut(&gen).unwrap();
            for (i, o) in pairs {
                if i.len() != rel.arity || o.len() != rel.coarity {
                    return Err(AutomatonError::WordLengthMismatch { gen: gname.clone() });
                }
                let to_ids = |ws: Vec<String>| -> Result<Word, AutomatonError> {
                    ws.into_iter()
                        .map(|s| {
                            index
                                .get(s.as_str())
                                .copied()
                                .ok_or(AutomatonError::UnknownState(s))
                        })
                        .collect()
                };
                rel.pairs.insert((to_ids(i)?, to_ids(o)?));
            }
        }
        Ok(Self::from_relations(alphabet, names, rels))
    }

    /// Builds an automaton from id-level relations.
    pub fn from_relations(
        alphabet: Arc<Alphabet>,
        states: Vec<String>,
        transitions: BTreeMap<GenId, TransitionRelation>,
    ) -> NondetAutomaton {
        let mut by_input: BTreeMap<GenId, BTreeMap<Word, Vec<Word>>> = BTreeMap::new();
        for (gen, rel) in &transitions {
            let mut m: BTreeMap<Word, Vec<Word>> = BTreeMap::new();
            for (i, o) in &rel.pairs {
                m.entry(i.clone()).or_default().push(o.clone());
            }
            by_input.insert(*gen, m);
        }
        NondetAutomaton {
            alphabet,
            states,
            transitions,
            by_input,
        }
    }

    pub fn alphabet(&self) -> &Arc<Alphabet> {
        &self.alphabet
    }

    pub fn states(&self) -> &[String] {
        &self.states
    }

    pub fn state_id(&self, name: &str) -> Option<StateId> {
        self.states.binary_search_by(|s| s.as_str().cmp(name)).ok()
    }

    pub fn relation(&self, gen: GenId) -> &TransitionRelation {
        &self.transitions[&gen]
    }

    pub fn relations(&self) -> &BTreeMap<GenId, TransitionRelation> {
        &self.transitions
    }

    fn check_alphabet(&self, d: &Diagram) -> Result<(), AutomatonError> {
        if **d.alphabet() == *self.alphabet {
            Ok(())
        } else {
            Err(AutomatonError::AlphabetMismatch)
        }
    }

    /// Advances a frontier of state words across one slice.
    pub fn advance_frontier(&self, frontier: &BTreeSet<Word>, slice: &[Item]) -> BTreeSet<Word> {
        let mut next = BTreeSet::new();
        'words: for word in frontier {
            // Partial output words accumulated across the slice items.
            let mut partials: Vec<Word> = vec![Vec::new()];
            let mut pos = 0;
            for item in slice {
                match item {
                    Item::Wire => {
                        let q = word[pos];
                        pos += 1;
                        for p in &mut partials {
                            p.push(q);
                        }
                    }
                    Item::Gen(gen) => {
                        let ar = self.alphabet.arity(*gen);
                        let sub = &word[pos..pos + ar];
                        pos += ar;
                        let outs = match self.by_input[gen].get(sub) {
                            Some(outs) => outs,
                            None => continue 'words,
                        };
                        let mut grown =
                            Vec::with_capacity(partials.len() * outs.len());
                        for p in &partials {
                            for o in outs {
                                let mut q = p.clone();
                                q.extend(o.iter().copied());
                                grown.push(q);
                            }
                        }
                        partials = grown;
                    }
                }
            }
            next.extend(partials);
        }
        next
    }

    /// Frontier run over a whole diagram from a set of start words.
    fn run(&self, start: BTreeSet<Word>, d: &Diagram) -> BTreeSet<Word> {
        let mut frontier = start;
        for slice in d.slices() {
            if frontier.is_empty() {
                break;
            }
            frontier = self.advance_frontier(&frontier, slice);
        }
        frontier
    }

    /// Acceptance of a scalar diagram: the frontier starting from the empty
    /// word survives to the empty boundary. Independent of slicing.
    pub fn accepts(&self, d: &Diagram) -> Result<bool, AutomatonError> {
        self.check_alphabet(d)?;
        if !d.is_scalar() {
            return Err(AutomatonError::NotScalar);
        }
        let frontier = self.run(BTreeSet::from([Vec::new()]), d);
        // At width zero the only word is the empty one.
        debug_assert!(frontier.iter().all(|w| w.is_empty()));
        Ok(!frontier.is_empty())
    }

    /// The relation this automaton assigns to a general diagram: one
    /// frontier run per input word.
    pub fn relation_of(&self, d: &Diagram) -> Result<TransitionRelation, AutomatonError> {
        self.check_alphabet(d)?;
        let mut pairs = BTreeSet::new();
        for input in words(self.states.len(), d.arity()) {
            let finals = self.run(BTreeSet::from([input.clone()]), d);
            for out in finals {
                pairs.insert((input.clone(), out));
            }
        }
        Ok(TransitionRelation {
            arity: d.arity(),
            coarity: d.coarity(),
            pairs,
        })
    }

    /// Product automaton: states are pairs, transitions are pairwise.
    /// Accepts exactly the intersection of the two languages.
    pub fn intersect(&self, other: &NondetAutomaton) -> Result<NondetAutomaton, AutomatonError> {
        if *self.alphabet != *other.alphabet {
            return Err(AutomatonError::AlphabetMismatch);
        }
        let n2 = other.states.len();
        let pair_id = |a: StateId, b: StateId| a * n2 + b;
        let states: Vec<String> = self
            .states
            .iter()
            .cartesian_product(other.states.iter())
            .map(|(a, b)| format!("({a},{b})"))
            .collect();
        // Pair names sort like (a, b) pairs only if padded; rebuild sorted.
        let mut rels = BTreeMap::new();
        for gen in self.alphabet.ids() {
            let r1 = &self.transitions[&gen];
            let r2 = &other.transitions[&gen];
            let mut pairs = BTreeSet::new();
            for (i1, o1) in &r1.pairs {
                for (i2, o2) in &r2.pairs {
                    let i: Word = i1
                        .iter()
                        .zip(i2.iter())
                        .map(|(a, b)| pair_id(*a, *b))
                        .collect();
                    let o: Word = o1
                        .iter()
                        .zip(o2.iter())
                        .map(|(a, b)| pair_id(*a, *b))
                        .collect();
                    pairs.insert((i, o));
                }
            }
            rels.insert(
                gen,
                TransitionRelation {
                    arity: r1.arity,
                    coarity: r1.coarity,
                    pairs,
                },
            );
        }
        Ok(rename_states(
            NondetAutomaton::from_relations(self.alphabet.clone(), states, rels),
        ))
    }

    /// Disjoint union of state sets and relations: accepts the union of
    /// the two languages. States are tagged with a source index.
    pub fn union(&self, other: &NondetAutomaton) -> Result<NondetAutomaton, AutomatonError> {
        if *self.alphabet != *other.alphabet {
            return Err(AutomatonError::AlphabetMismatch);
        }
        let n1 = self.states.len();
        let states: Vec<String> = self
            .states
            .iter()
            .map(|s| format!("0:{s}"))
            .chain(other.states.iter().map(|s| format!("1:{s}")))
            .collect();
        let mut rels = BTreeMap::new();
        for gen in self.alphabet.ids() {
            let r1 = &self.transitions[&gen];
            let r2 = &other.transitions[&gen];
            let mut pairs: BTreeSet<(Word, Word)> = r1.pairs.clone();
            for (i, o) in &r2.pairs {
                pairs.insert((
                    i.iter().map(|q| q + n1).collect(),
                    o.iter().map(|q| q + n1).collect(),
                ));
            }
            rels.insert(
                gen,
                TransitionRelation {
                    arity: r1.arity,
                    coarity: r1.coarity,
                    pairs,
                },
            );
        }
        Ok(rename_states(NondetAutomaton::from_relations(
            self.alphabet.clone(),
            states,
            rels,
        )))
    }

    /// Pullback along an alphabet morphism into this automaton's alphabet:
    /// the new automaton accepts `d` iff this one accepts the relabelling
    /// of `d`.
    pub fn preimage(
        &self,
        h: &crate::grammar::AlphabetMorphism,
    ) -> Result<NondetAutomaton, AutomatonError> {
        if **h.target() != *self.alphabet {
            return Err(AutomatonError::AlphabetMismatch);
        }
        let source = h.source().clone();
        let mut rels = BTreeMap::new();
        for gen in source.ids() {
            let image = self.alphabet.id(h.image_name(source.name(gen))).unwrap();
            rels.insert(gen, self.transitions[&image].clone());
        }
        Ok(NondetAutomaton::from_relations(
            source,
            self.states.clone(),
            rels,
        ))
    }

    /// Members of the language within the enumeration bounds: the filter of
    /// [`enumerate::enumerate_scalars`] by acceptance, order inherited.
    pub fn enumerate_members(&self, max_gens: usize, max_width: usize) -> Vec<Diagram> {
        enumerate::enumerate_scalars(&self.alphabet, max_gens, max_width)
            .into_iter()
            .filter(|d| self.accepts(d).unwrap())
            .collect()
    }

    /// Same language slice as [`Self::enumerate_members`], computed with
    /// dead-frontier pruning instead of filtering the full scalar stream.
    pub fn enumerate_members_pruned(&self, max_gens: usize, max_width: usize) -> Vec<Diagram> {
        let mut out = Vec::new();
        let prune = |d: &Diagram| {
            let f = self.run(BTreeSet::from([Vec::new()]), d);
            !f.is_empty()
        };
        enumerate::enumerate_pruned(&self.alphabet, 0, 0, max_gens, max_width, &prune, &mut |d| {
            if self.accepts(&d).unwrap() {
                out.push(d);
            }
            true
        });
        out.sort_by(|a, b| (a.gen_count(), a.slices()).cmp(&(b.gen_count(), b.slices())));
        out
    }

    /// True when every generator's relation is a partial function.
    pub fn is_functional(&self) -> bool {
        self.transitions.values().all(|rel| {
            let mut seen: BTreeSet<&Word> = BTreeSet::new();
            rel.pairs.iter().all(|(i, _)| seen.insert(i))
        })
    }
}

/// Rebuilds the automaton with its states sorted by name (relabelling ids).
fn rename_states(a: NondetAutomaton) -> NondetAutomaton {
    let mut order: Vec<usize> = (0..a.states.len()).collect();
    order.sort_by(|x, y| a.states[*x].cmp(&a.states[*y]));
    let mut new_id = vec![0usize; a.states.len()];
    for (new, old) in order.iter().enumerate() {
        new_id[*old] = new;
    }
    let states: Vec<String> = {
        let mut s = a.states.clone();
        s.sort();
        s
    };
    let map_word = |w: &Word| -> Word { w.iter().map(|q| new_id[*q]).collect() };
    let rels = a
        .transitions
        .iter()
        .map(|(gen, rel)| {
            (
                *gen,
                TransitionRelation {
                    arity: rel.arity,
                    coarity: rel.coarity,
                    pairs: rel
                        .pairs
                        .iter()
                        .map(|(i, o)| (map_word(i), map_word(o)))
                        .collect(),
                },
            )
        })
        .collect();
    NondetAutomaton::from_relations(a.alphabet.clone(), states, rels)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus;
    use crate::corpus::alphabets;

    #[test]
    fn every_automaton_accepts_the_empty_diagram() {
        for name in corpus::names() {
            let e = corpus::build(name).unwrap();
            let d = Diagram::empty(e.alphabet.clone());
            assert!(e.automaton.accepts(&d).unwrap(), "{name}");
        }
    }

    // Hand frontier trace: after gamma, S = {ABBA, ACCA}; b then c kills
    // both words.
    #[test]
    fn example13_members_and_mixed() {
        let e = corpus::build("example13").unwrap();
        let a = &e.alphabet;
        let b_member =
            Diagram::build(a, 0, &[&["gamma"], &["-", "b", "b", "-"], &["delta"]]).unwrap();
        let c_member =
            Diagram::build(a, 0, &[&["gamma"], &["-", "c", "c", "-"], &["delta"]]).unwrap();
        let mixed =
            Diagram::build(a, 0, &[&["gamma"], &["-", "b", "c", "-"], &["delta"]]).unwrap();
        assert!(e.automaton.accepts(&b_member).unwrap());
        assert!(e.automaton.accepts(&c_member).unwrap());
        assert!(!e.automaton.accepts(&mixed).unwrap());
        assert!(!b_member.equivalent(&c_member).unwrap());
    }

    #[test]
    fn bones_accepts_tensor_powers() {
        let e = corpus::build("bones").unwrap();
        let bone = Diagram::build(&e.alphabet, 0, &[&["u"], &["v"]]).unwrap();
        let two = bone.tensor(&bone).unwrap();
        assert!(e.automaton.accepts(&two).unwrap());
    }

    #[test]
    fn relation_of_identity_is_identity() {
        let e = corpus::build("example13").unwrap();
        for n in 0..3 {
            let id = Diagram::identity(e.alphabet.clone(), n);
            let rel = e.automaton.relation_of(&id).unwrap();
            assert_eq!(rel, TransitionRelation::identity(e.automaton.states().len(), n));
        }
    }

    #[test]
    fn relation_of_composes_and_tensors() {
        let e = corpus::build("example13").unwrap();
        let a = &e.alphabet;
        let gamma = Diagram::generator(a, "gamma").unwrap();
        let middle = Diagram::build(a, 4, &[&["-", "b", "c", "-"]]).unwrap();
        let lhs = e
            .automaton
            .relation_of(&gamma.compose(&middle).unwrap())
            .unwrap();
        let rhs = e
            .automaton
            .relation_of(&gamma)
            .unwrap()
            .then(&e.automaton.relation_of(&middle).unwrap());
        assert_eq!(lhs, rhs);
        let b = Diagram::generator(a, "b").unwrap();
        let c = Diagram::generator(a, "c").unwrap();
        let lhs = e.automaton.relation_of(&b.tensor(&c).unwrap()).unwrap();
        let rhs = e
            .automaton
            .relation_of(&b)
            .unwrap()
            .par(&e.automaton.relation_of(&c).unwrap());
        assert_eq!(lhs, rhs);
    }

    #[test]
    fn enumerate_members_bones() {
        let e = corpus::build("bones").unwrap();
        let members = e.automaton.enumerate_members(4, 2);
        assert_eq!(members.len(), 3);
        let pruned = e.automaton.enumerate_members_pruned(4, 2);
        assert_eq!(members, pruned);
    }

    #[test]
    fn empty_relations_accept_only_empty() {
        let a = alphabets::bones();
        let aut = NondetAutomaton::new(a.clone(), vec!["s".into()], BTreeMap::new()).unwrap();
        let members = aut.enumerate_members(3, 3);
        assert_eq!(members.len(), 1);
        assert!(members[0].equivalent(&Diagram::empty(a)).unwrap());
        assert!(aut.is_functional());
    }

    #[test]
    fn functionality_of_corpus_entries() {
        assert!(corpus::build("dyck").unwrap().automaton.is_functional());
        assert!(!corpus::build("example13").unwrap().automaton.is_functional());
    }

    #[test]
    fn union_covers_both_sublanguages() {
        let b = corpus::build("example13_b").unwrap();
        let c = corpus::build("example13_c").unwrap();
        let full = corpus::build("example13").unwrap();
        let u = b.automaton.union(&c.automaton).unwrap();
        for d in enumerate::enumerate_scalars(&full.alphabet, 6, 4) {
            let want = b.automaton.accepts(&d).unwrap() || c.automaton.accepts(&d).unwrap();
            assert_eq!(u.accepts(&d).unwrap(), want);
            assert_eq!(full.automaton.accepts(&d).unwrap(), want);
        }
    }

    #[test]
    fn intersection_with_empty_is_empty() {
        let e = corpus::build("dyck").unwrap();
        let empty =
            NondetAutomaton::new(e.alphabet.clone(), vec!["s".into()], BTreeMap::new()).unwrap();
        let i = e.automaton.intersect(&empty).unwrap();
        for d in enumerate::enumerate_scalars(&e.alphabet, 4, 3) {
            assert_eq!(i.accepts(&d).unwrap(), d.gen_count() == 0);
        }
    }
}
