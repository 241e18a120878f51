//! Deterministic monoidal automata, convexity, and the powerset
//! construction for convex automata.
//!
//! A relation is convex when its image over any box of nonempty state
//! subsets is itself a box (the product of its coordinate projections).
//! Convex automata determinize by the subset construction over nonempty
//! subsets: an input tuple maps to the box components of the union image,
//! undefined when that union is empty. Determinization of a convex
//! automaton preserves the accepted language.

use std::collections::{BTreeMap, BTreeSet};
use std::sync::Arc;

use itertools::Itertools;
use thiserror::Error;

use crate::alphabet::{Alphabet, GenId};
use crate::automaton::{NondetAutomaton, StateId, TransitionRelation, Word};
use crate::diagram::{Diagram, DiagramError, Item};

#[derive(Debug, Error, PartialEq, Eq)]
pub enum DetError {
    #[error("automaton is not convex: {0:?}")]
    NotConvex(Box<ConvexityReport>),
    #[error("diagram and automaton are over different alphabets")]
    AlphabetMismatch,
    #[error("operation requires a scalar diagram")]
    NotScalar,
    #[error("transition for `{gen}` has a word of the wrong length")]
    WordLengthMismatch { gen: String },
    #[error("unknown state `{0}`")]
    UnknownState(String),
    #[error(transparent)]
    Diagram(#[from] DiagramError),
}

/// A deterministic monoidal automaton: per-generator partial functions
/// from input words to output words. Missing entries denote undefined.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DetAutomaton {
    alphabet: Arc<Alphabet>,
    states: Vec<String>,
    transitions: BTreeMap<GenId, BTreeMap<Word, Word>>,
}

impl DetAutomaton {
    pub fn new(
        alphabet: Arc<Alphabet>,
        states: Vec<String>,
        transitions: BTreeMap<String, Vec<(Vec<String>, Vec<String>)>>,
    ) -> Result<DetAutomaton, DetError> {
        let mut names = states;
        names.sort();
        names.dedup();
        let index: BTreeMap<&str, StateId> = names
            .iter()
            .enumerate()
            .map(|(i, s)| (s.as_str(), i))
            .collect();
        let mut table: BTreeMap<GenId, BTreeMap<Word, Word>> = BTreeMap::new();
        for gen in alphabet.ids() {
            table.insert(gen, BTreeMap::new());
        }
        for (gname, entries) in transitions {
            let gen = alphabet
                .id(&gname)
                .map_err(|_| DetError::WordLengthMismatch { gen: gname.clone() })?;
            for (i, o) in entries {
                if i.len() != alphabet.arity(gen) || o.len() != alphabet.coarity(gen) {
                    return Err(DetError::WordLengthMismatch { gen: gname.clone() });
                }
                let to_ids = |ws: Vec<String>| -> Result<Word, DetError> {
                    ws.into_iter()
                        .map(|s| {
                            index
                                .get(s.as_str())
                                .copied()
                                .ok_or(DetError::UnknownState(s))
                        })
                        .collect()
                };
                table.get_mut(&gen).unwrap().insert(to_ids(i)?, to_ids(o)?);
            }
        }
        Ok(DetAutomaton {
            alphabet,
            states: names,
            transitions: table,
        })
    }

    pub fn from_tables(
        alphabet: Arc<Alphabet>,
        states: Vec<String>,
        transitions: BTreeMap<GenId, BTreeMap<Word, Word>>,
    ) -> DetAutomaton {
        DetAutomaton {
            alphabet,
            states,
            transitions,
        }
    }

    /// Reads a functional non-deterministic automaton as a deterministic
    /// one; `None` when some relation is not a partial function.
    pub fn from_functional(a: &NondetAutomaton) -> Option<DetAutomaton> {
        if !a.is_functional() {
            return None;
        }
        let transitions = a
            .relations()
            .iter()
            .map(|(gen, rel)| {
                (
                    *gen,
                    rel.pairs
                        .iter()
                        .map(|(i, o)| (i.clone(), o.clone()))
                        .collect(),
                )
            })
            .collect();
        Some(DetAutomaton {
            alphabet: a.alphabet().clone(),
            states: a.states().to_vec(),
            transitions,
        })
    }

    pub fn alphabet(&self) -> &Arc<Alphabet> {
        &self.alphabet
    }

    pub fn states(&self) -> &[String] {
        &self.states
    }

    pub fn transitions(&self) -> &BTreeMap<GenId, BTreeMap<Word, Word>> {
        &self.transitions
    }

    /// Single-word run; any undefined entry rejects.
    pub fn accepts(&self, d: &Diagram) -> Result<bool, DetError> {
        if **d.alphabet() != *self.alphabet {
            return Err(DetError::AlphabetMismatch);
        }
        if !d.is_scalar() {
            return Err(DetError::NotScalar);
        }
        Ok(self.run_word(Vec::new(), d.slices()).is_some())
    }

    /// Runs the partial functions over slices starting from `word`.
    pub(crate) fn run_word(&self, word: Word, slices: &[Vec<Item>]) -> Option<Word> {
        let mut word = word;
        for slice in slices {
            let mut next = Vec::new();
            let mut pos = 0;
            for item in slice {
                match item {
                    Item::Wire => {
                        next.push(word[pos]);
                        pos += 1;
                    }
                    Item::Gen(gen) => {
                        let ar = self.alphabet.arity(*gen);
                        let sub = &word[pos..pos + ar];
                        pos += ar;
                        match self.transitions[gen].get(sub) {
                            Some(out) => next.extend(out.iter().copied()),
                            None => return None,
                        }
                    }
                }
            }
            word = next;
        }
        Some(word)
    }

    /// The inclusion of partial functions into relations: each defined
    /// entry becomes a singleton pair.
    pub fn to_nondet(&self) -> NondetAutomaton {
        let rels = self
            .transitions
            .iter()
            .map(|(gen, table)| {
                (
                    *gen,
                    TransitionRelation {
                        arity: self.alphabet.arity(*gen),
                        coarity: self.alphabet.coarity(*gen),
                        pairs: table.iter().map(|(i, o)| (i.clone(), o.clone())).collect(),
                    },
                )
            })
            .collect();
        NondetAutomaton::from_relations(self.alphabet.clone(), self.states.clone(), rels)
    }
}

/// A nonempty subset of states, as a sorted id set.
pub type StateSet = BTreeSet<StateId>;

/// Outcome of the convexity check.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ConvexityReport {
    /// Convex; box images are recomputed on demand via [`box_image`].
    Convex,
    /// First failure: the generator, the input subset tuple, and a word in
    /// the box that the union image misses (lexicographically first).
    NonConvex {
        gen: String,
        inputs: Vec<BTreeSet<String>>,
        missing: Vec<String>,
    },
}

impl ConvexityReport {
    pub fn is_convex(&self) -> bool {
        matches!(self, ConvexityReport::Convex)
    }
}

/// Union image of a generator's relation over a box of subsets, and the
/// box of its coordinate projections. The box of an empty union is empty.
pub fn union_image(
    a: &NondetAutomaton,
    gen: GenId,
    subsets: &[StateSet],
) -> (BTreeSet<Word>, Vec<StateSet>) {
    let rel = a.relation(gen);
    debug_assert_eq!(rel.arity, subsets.len());
    let mut union: BTreeSet<Word> = BTreeSet::new();
    for (i, o) in &rel.pairs {
        if i.iter().zip(subsets.iter()).all(|(q, s)| s.contains(q)) {
            union.insert(o.clone());
        }
    }
    let mut boxes: Vec<StateSet> = vec![BTreeSet::new(); rel.coarity];
    for o in &union {
        for (k, q) in o.iter().enumerate() {
            boxes[k].insert(*q);
        }
    }
    (union, boxes)
}

/// Box components of the union image: `None` when the union is empty
/// (the determinized entry is undefined there).
pub fn box_image(a: &NondetAutomaton, gen: GenId, subsets: &[StateSet]) -> Option<Vec<StateSet>> {
    let (union, boxes) = union_image(a, gen, subsets);
    if union.is_empty() {
        None
    } else {
        Some(boxes)
    }
}

/// Checks convexity of every generator over every tuple of nonempty state
/// subsets (the definitional quantifier). Tuples with an empty component
/// are vacuously convex and are not enumerated.
pub fn check_convex(a: &NondetAutomaton) -> ConvexityReport {
    check_convex_over(a, |arity, n_states| {
        let masks: Vec<u64> = (1..(1u64 << n_states)).collect();
        (0..arity)
            .map(|_| masks.clone())
            .multi_cartesian_product()
            .collect()
    })
}

/// Convexity check restricted to subset tuples reachable in determinized
/// runs. Faster, but weaker than the definitional check; never a
/// substitute for [`check_convex`] in tests.
pub fn check_convex_reachable(a: &NondetAutomaton) -> ConvexityReport {
    let reachable = reachable_subsets(a);
    let masks: Vec<u64> = reachable.iter().map(set_to_mask).collect();
    check_convex_over(a, move |arity, _| {
        (0..arity)
            .map(|_| masks.clone())
            .multi_cartesian_product()
            .collect()
    })
}

fn set_to_mask(s: &StateSet) -> u64 {
    s.iter().fold(0u64, |m, q| m | (1 << q))
}

fn mask_to_set(mut m: u64) -> StateSet {
    let mut s = BTreeSet::new();
    let mut q = 0;
    while m != 0 {
        if m & 1 != 0 {
            s.insert(q);
        }
        m >>= 1;
        q += 1;
    }
    s
}

fn check_convex_over(
    a: &NondetAutomaton,
    tuples: impl Fn(usize, usize) -> Vec<Vec<u64>>,
) -> ConvexityReport {
    let n_states = a.states().len();
    assert!(n_states <= 63, "convexity check limited to 63 states");
    for gen in a.alphabet().ids() {
        let rel = a.relation(gen);
        // Exact short-circuits of the definitional quantifier: with at
        // most one transition pair every union image is at most a
        // singleton, and with coarity at most one every subset of words
        // is a box. Either way U = B holds for every tuple.
        if rel.pairs.len() <= 1 || rel.coarity <= 1 {
            continue;
        }
        let pairs: Vec<(&Word, &Word)> = rel.pairs.iter().map(|(i, o)| (i, o)).collect();
        let mut union: Vec<&Word> = Vec::new();
        for tuple in tuples(rel.arity, n_states) {
            // Union image over the box, words filtered by mask tests.
            union.clear();
            for (i, o) in &pairs {
                if i.iter()
                    .zip(tuple.iter())
                    .all(|(q, mask)| mask & (1 << q) != 0)
                {
                    union.push(o);
                }
            }
            union.sort_unstable();
            union.dedup();
            if union.len() <= 1 {
                // A singleton or empty image is always a box.
                continue;
            }
            let mut boxes: Vec<StateSet> = vec![BTreeSet::new(); rel.coarity];
            for o in &union {
                for (k, q) in o.iter().enumerate() {
                    boxes[k].insert(*q);
                }
            }
            let box_size: usize = boxes.iter().map(|b| b.len()).product();
            if box_size != union.len() {
                // Find the lexicographically first missing word.
                let missing = boxes
                    .iter()
                    .map(|b| b.iter().copied().collect::<Vec<_>>())
                    .multi_cartesian_product()
                    .find(|w| !union.iter().any(|u| *u == w))
                    .expect("box strictly larger than union");
                return ConvexityReport::NonConvex {
                    gen: a.alphabet().name(gen).to_string(),
                    inputs: tuple
                        .iter()
                        .map(|m| {
                            mask_to_set(*m)
                                .iter()
                                .map(|q| a.states()[*q].clone())
                                .collect()
                        })
                        .collect(),
                    missing: missing.iter().map(|q| a.states()[*q].clone()).collect(),
                };
            }
        }
    }
    ConvexityReport::Convex
}

/// Subset states reachable in determinized runs: box components of
/// arity-0 images, closed under applying generators to reached tuples.
pub fn reachable_subsets(a: &NondetAutomaton) -> Vec<StateSet> {
    let mut reached: BTreeSet<StateSet> = BTreeSet::new();
    let mut frontier: Vec<StateSet> = Vec::new();
    let push = |s: Vec<StateSet>,
                reached: &mut BTreeSet<StateSet>,
                frontier: &mut Vec<StateSet>| {
        for set in s {
            if reached.insert(set.clone()) {
                frontier.push(set);
            }
        }
    };
    for gen in a.alphabet().ids() {
        if a.alphabet().arity(gen) == 0 {
            if let Some(boxes) = box_image(a, gen, &[]) {
                push(boxes, &mut reached, &mut frontier);
            }
        }
    }
    loop {
        let snapshot: Vec<StateSet> = reached.iter().cloned().collect();
        let mut grew = false;
        for gen in a.alphabet().ids() {
            let arity = a.alphabet().arity(gen);
            if arity == 0 {
                continue;
            }
            for tuple in (0..arity)
                .map(|_| snapshot.iter())
                .multi_cartesian_product()
            {
                let subsets: Vec<StateSet> = tuple.into_iter().cloned().collect();
                if let Some(boxes) = box_image(a, gen, &subsets) {
                    for b in boxes {
                        if reached.insert(b.clone()) {
                            grew = true;
                        }
                    }
                }
            }
        }
        if !grew {
            break;
        }
    }
    reached.into_iter().collect()
}

fn subset_name(states: &[String], s: &StateSet) -> String {
    let names: Vec<&str> = s.iter().map(|q| states[*q].as_str()).collect();
    format!("{{{}}}", names.join(","))
}

/// Powerset construction over all nonempty subsets. Requires convexity;
/// the error carries the convexity report.
pub fn determinize(a: &NondetAutomaton) -> Result<DetAutomaton, DetError> {
    let report = check_convex(a);
    if !report.is_convex() {
        return Err(DetError::NotConvex(Box::new(report)));
    }
    let n = a.states().len();
    let all: Vec<StateSet> = (1..(1u64 << n)).map(mask_to_set).collect();
    Ok(build_subset_automaton(a, &all))
}

/// Powerset construction restricted to reachable subset states. Accepts
/// the same language as the full construction: runs never leave the
/// reachable set.
pub fn determinize_reachable(a: &NondetAutomaton) -> Result<DetAutomaton, DetError> {
    let report = check_convex(a);
    if !report.is_convex() {
        return Err(DetError::NotConvex(Box::new(report)));
    }
    let reachable = reachable_subsets(a);
    Ok(build_subset_automaton(a, &reachable))
}

fn build_subset_automaton(a: &NondetAutomaton, subset_states: &[StateSet]) -> DetAutomaton {
    let names: Vec<String> = subset_states
        .iter()
        .map(|s| subset_name(a.states(), s))
        .collect();
    let mut sorted = names.clone();
    sorted.sort();
    let id_of: BTreeMap<&StateSet, StateId> = {
        let mut m = BTreeMap::new();
        for (set, name) in subset_states.iter().zip(names.iter()) {
            let id = sorted.binary_search(name).unwrap();
            m.insert(set, id);
        }
        m
    };
    let mut transitions: BTreeMap<GenId, BTreeMap<Word, Word>> = BTreeMap::new();
    for gen in a.alphabet().ids() {
        let arity = a.alphabet().arity(gen);
        let mut table = BTreeMap::new();
        for tuple in (0..arity)
            .map(|_| subset_states.iter())
            .multi_cartesian_product()
        {
            let subsets: Vec<StateSet> = tuple.iter().map(|s| (*s).clone()).collect();
            if let Some(boxes) = box_image(a, gen, &subsets) {
                if boxes.iter().all(|b| id_of.contains_key(b)) {
                    let input: Word = subsets.iter().map(|s| id_of[s]).collect();
                    let output: Word = boxes.iter().map(|b| id_of[&b]).collect();
                    table.insert(input, output);
                }
            }
        }
        transitions.insert(gen, table);
    }
    DetAutomaton {
        alphabet: a.alphabet().clone(),
        states: sorted,
        transitions,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus;
    use crate::encodings;
    use crate::enumerate::enumerate_scalars;

    #[test]
    fn example13_is_not_convex_with_exact_witness() {
        let e = corpus::build("example13").unwrap();
        let report = check_convex(&e.automaton);
        assert_eq!(
            report,
            ConvexityReport::NonConvex {
                gen: "gamma".into(),
                inputs: vec![],
                missing: vec!["A".into(), "B".into(), "C".into(), "A".into()],
            }
        );
        let err = determinize(&e.automaton).unwrap_err();
        assert!(matches!(err, DetError::NotConvex(_)));
    }

    #[test]
    fn word_alphabet_automata_are_convex() {
        for name in ["nfa0", "nfa1", "nfa2"] {
            let e = corpus::build(name).unwrap();
            assert!(check_convex(&e.automaton).is_convex(), "{name}");
        }
    }

    #[test]
    fn coarity_at_most_one_implies_convex() {
        for name in corpus::names() {
            let e = corpus::build(name).unwrap();
            if e.alphabet.gens().iter().all(|g| g.coarity <= 1) {
                assert!(check_convex(&e.automaton).is_convex(), "{name}");
            }
        }
    }

    #[test]
    fn empty_component_tuples_are_boxes() {
        // The lemma behind skipping tuples with an empty component: the
        // union over such a tuple is empty and the empty set is a box.
        let e = corpus::build("example13").unwrap();
        let gen = e.alphabet.id("delta").unwrap();
        let (union, boxes) = union_image(
            &e.automaton,
            gen,
            &[BTreeSet::new(), BTreeSet::from([0, 1, 2])],
        );
        assert!(union.is_empty());
        assert!(boxes.iter().all(|b| b.is_empty()));
    }

    #[test]
    fn dyck_determinizes_and_agrees() {
        let e = corpus::build("dyck").unwrap();
        let det = determinize(&e.automaton).unwrap();
        for d in enumerate_scalars(&e.alphabet, 5, 3) {
            assert_eq!(
                det.accepts(&d).unwrap(),
                e.automaton.accepts(&d).unwrap(),
                "{d:?}"
            );
        }
    }

    #[test]
    fn nfa_determinization_matches_classical_subset_construction() {
        for name in ["nfa0", "nfa1", "nfa2"] {
            let e = corpus::build(name).unwrap();
            let nfa = encodings::monoidal_to_nfa(&e.automaton).unwrap();
            let det = determinize_reachable(&e.automaton).unwrap();
            let (oracle_states, oracle_table) = nfa.subset_construction();
            // Letter transitions agree on every oracle-reachable subset.
            for s in &oracle_states {
                let s_name = format!(
                    "{{{}}}",
                    s.iter().map(|q| q.as_str()).collect::<Vec<_>>().join(",")
                );
                let Some(sid) = det.states().iter().position(|n| *n == s_name) else {
                    // Oracle explores subsets unreachable through boxes
                    // only when they are dead; acceptance tests cover it.
                    continue;
                };
                for letter in &nfa.letters {
                    let gen = e.alphabet.id(letter).unwrap();
                    let got = det.transitions()[&gen].get(&vec![sid]).map(|o| o[0]);
                    let want = &oracle_table[&(s.clone(), letter.clone())];
                    match got {
                        None => assert!(want.is_empty(), "{name}: {s_name} --{letter}->"),
                        Some(tid) => {
                            let want_name = format!(
                                "{{{}}}",
                                want.iter()
                                    .map(|q| q.as_str())
                                    .collect::<Vec<_>>()
                                    .join(",")
                            );
                            assert_eq!(det.states()[tid], want_name, "{name}");
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn det_to_nondet_round_trip_language() {
        let e = corpus::build("dyck").unwrap();
        let det = DetAutomaton::from_functional(&e.automaton).unwrap();
        let back = det.to_nondet();
        for d in enumerate_scalars(&e.alphabet, 6, 4) {
            let a = det.accepts(&d).unwrap();
            assert_eq!(back.accepts(&d).unwrap(), a);
            assert_eq!(e.automaton.accepts(&d).unwrap(), a);
        }
        let bones = corpus::build("bones").unwrap();
        let det = DetAutomaton::from_functional(&bones.automaton).unwrap();
        let back = det.to_nondet();
        for d in enumerate_scalars(&bones.alphabet, 6, 3) {
            assert_eq!(back.accepts(&d).unwrap(), det.accepts(&d).unwrap());
        }
    }

    #[test]
    fn det_accepts_fixtures() {
        let e = corpus::build("dyck").unwrap();
        let det = DetAutomaton::from_functional(&e.automaton).unwrap();
        let a = &e.alphabet;
        let empty = Diagram::empty(a.clone());
        assert!(det.accepts(&empty).unwrap());
        let paren = Diagram::build(a, 0, &[&["top"], &["open"], &["close"], &["bot"]]).unwrap();
        assert!(det.accepts(&paren).unwrap());
        let bones = corpus::build("bones").unwrap();
        let det = DetAutomaton::from_functional(&bones.automaton).unwrap();
        let bone = Diagram::build(&bones.alphabet, 0, &[&["u"], &["v"]]).unwrap();
        assert!(det.accepts(&bone).unwrap());
    }

    #[test]
    fn reachable_subsets_of_single_pair_automata_are_singletons() {
        let e = corpus::build("sierpinski").unwrap();
        let subsets = reachable_subsets(&e.automaton);
        assert!(subsets.iter().all(|s| s.len() == 1));
    }
}
