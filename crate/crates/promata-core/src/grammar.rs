//! Regular monoidal grammars and alphabet morphisms.
//!
//! A grammar is an arity-preserving labelling of a finite monoidal graph
//! into an alphabet: states are the graph's vertices and each edge is a
//! typed occurrence of its label. The grammar/automaton correspondence
//! reads the edges as transition pairs and back; it preserves the language,
//! which is how grammar semantics is computed here.

use std::collections::BTreeMap;
use std::sync::Arc;

use thiserror::Error;

use crate::alphabet::{Alphabet, Edge, MonoidalGraph};
use crate::automaton::NondetAutomaton;
use crate::diagram::{Diagram, Item};

#[derive(Debug, Error, PartialEq, Eq)]
pub enum GrammarError {
    #[error("edge `{edge}`: domain/codomain length does not match its label's arities")]
    ArityMismatch { edge: String },
    #[error("edge `{edge}` is labelled by unknown generator `{label}`")]
    UnknownLabel { edge: String, label: String },
    #[error("grammars are over different alphabets")]
    AlphabetMismatch,
    #[error("morphism does not preserve arities at `{0}`")]
    MorphismArityMismatch(String),
    #[error("morphism misses generator `{0}`")]
    MorphismMissing(String),
    #[error("morphism does not apply to this alphabet")]
    MorphismSourceMismatch,
}

/// A regular monoidal grammar: a machine graph plus a labelling into an
/// alphabet.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Grammar {
    pub machine: MonoidalGraph,
    pub alphabet: Arc<Alphabet>,
    /// Edge name to generator name.
    pub labelling: BTreeMap<String, String>,
}

impl Grammar {
    pub fn new(
        machine: MonoidalGraph,
        alphabet: Arc<Alphabet>,
        labelling: BTreeMap<String, String>,
    ) -> Result<Grammar, GrammarError> {
        let g = Grammar {
            machine,
            alphabet,
            labelling,
        };
        g.validate()?;
        Ok(g)
    }

    /// Checks the arity-preservation invariant for every edge.
    pub fn validate(&self) -> Result<(), GrammarError> {
        for e in &self.machine.edges {
            let label = self
                .labelling
                .get(&e.name)
                .ok_or_else(|| GrammarError::UnknownLabel {
                    edge: e.name.clone(),
                    label: "<unlabelled>".into(),
                })?;
            let gen = self
                .alphabet
                .id(label)
                .map_err(|_| GrammarError::UnknownLabel {
                    edge: e.name.clone(),
                    label: label.clone(),
                })?;
            if e.dom.len() != self.alphabet.arity(gen) || e.cod.len() != self.alphabet.coarity(gen)
            {
                return Err(GrammarError::ArityMismatch {
                    edge: e.name.clone(),
                });
            }
        }
        Ok(())
    }

    /// Disjoint union of two grammars over the same alphabet; the language
    /// of the result is the union of the languages. States and edges are
    /// tagged with a source index to keep the sum disjoint.
    pub fn union(&self, other: &Grammar) -> Result<Grammar, GrammarError> {
        if *self.alphabet != *other.alphabet {
            return Err(GrammarError::AlphabetMismatch);
        }
        let tag = |i: usize, s: &str| format!("{i}:{s}");
        let vertices: Vec<String> = self
            .machine
            .vertices
            .iter()
            .map(|v| tag(0, v))
            .chain(other.machine.vertices.iter().map(|v| tag(1, v)))
            .collect();
        let mut edges = Vec::new();
        let mut labelling = BTreeMap::new();
        for (i, g) in [(0usize, self), (1, other)] {
            for e in &g.machine.edges {
                let name = tag(i, &e.name);
                edges.push(Edge {
                    name: name.clone(),
                    dom: e.dom.iter().map(|v| tag(i, v)).collect(),
                    cod: e.cod.iter().map(|v| tag(i, v)).collect(),
                });
                labelling.insert(name, g.labelling[&e.name].clone());
            }
        }
        let machine = MonoidalGraph::new(vertices, edges).expect("tagged sum is well-formed");
        Grammar::new(machine, self.alphabet.clone(), labelling)
    }

    /// Reads the grammar as an automaton: states are machine vertices, and
    /// each edge labelled by a generator contributes a transition pair.
    /// Preserves the recognized language.
    pub fn to_automaton(&self) -> NondetAutomaton {
        let mut transitions: BTreeMap<String, Vec<(Vec<String>, Vec<String>)>> = BTreeMap::new();
        for e in &self.machine.edges {
            transitions
                .entry(self.labelling[&e.name].clone())
                .or_default()
                .push((e.dom.clone(), e.cod.clone()));
        }
        NondetAutomaton::new(
            self.alphabet.clone(),
            self.machine.vertices.clone(),
            transitions,
        )
        .expect("validated grammar reads as an automaton")
    }

    /// Relabels the grammar along an alphabet morphism: same machine,
    /// labelling postcomposed with the morphism.
    pub fn image(&self, h: &AlphabetMorphism) -> Result<Grammar, GrammarError> {
        if **h.source() != *self.alphabet {
            return Err(GrammarError::MorphismSourceMismatch);
        }
        let labelling = self
            .labelling
            .iter()
            .map(|(e, l)| (e.clone(), h.image_name(l).to_string()))
            .collect();
        Grammar::new(self.machine.clone(), h.target().clone(), labelling)
    }
}

/// Reads an automaton as a grammar: one edge per transition pair.
/// Round-tripping back to an automaton preserves the relations exactly.
pub fn automaton_to_grammar(a: &NondetAutomaton) -> Grammar {
    let alphabet = a.alphabet().clone();
    let states: Vec<String> = a.states().to_vec();
    let mut edges = Vec::new();
    let mut labelling = BTreeMap::new();
    for gen in alphabet.ids() {
        let rel = a.relation(gen);
        for (k, (i, o)) in rel.pairs.iter().enumerate() {
            let name = format!("{}#{}", alphabet.name(gen), k);
            edges.push(Edge {
                name: name.clone(),
                dom: i.iter().map(|q| states[*q].clone()).collect(),
                cod: o.iter().map(|q| states[*q].clone()).collect(),
            });
            labelling.insert(name, alphabet.name(gen).to_string());
        }
    }
    let machine = MonoidalGraph::new(states, edges).expect("automaton reads as a graph");
    Grammar::new(machine, alphabet, labelling).expect("arities match by construction")
}

/// An arity-preserving map of generators between two alphabets.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AlphabetMorphism {
    source: Arc<Alphabet>,
    target: Arc<Alphabet>,
    map: BTreeMap<String, String>,
}

impl AlphabetMorphism {
    pub fn new(
        source: Arc<Alphabet>,
        target: Arc<Alphabet>,
        map: BTreeMap<String, String>,
    ) -> Result<AlphabetMorphism, GrammarError> {
        for g in source.gens() {
            let image = map
                .get(&g.name)
                .ok_or_else(|| GrammarError::MorphismMissing(g.name.clone()))?;
            let t = target
                .id(image)
                .map_err(|_| GrammarError::MorphismMissing(image.clone()))?;
            if target.arity(t) != g.arity || target.coarity(t) != g.coarity {
                return Err(GrammarError::MorphismArityMismatch(g.name.clone()));
            }
        }
        Ok(AlphabetMorphism {
            source,
            target,
            map,
        })
    }

    pub fn identity(alphabet: &Arc<Alphabet>) -> AlphabetMorphism {
        let map = alphabet
            .gens()
            .iter()
            .map(|g| (g.name.clone(), g.name.clone()))
            .collect();
        AlphabetMorphism {
            source: alphabet.clone(),
            target: alphabet.clone(),
            map,
        }
    }

    pub fn source(&self) -> &Arc<Alphabet> {
        &self.source
    }

    pub fn target(&self) -> &Arc<Alphabet> {
        &self.target
    }

    pub fn image_name(&self, gen: &str) -> &str {
        &self.map[gen]
    }

    /// Applies the induced pro morphism to a diagram: same slices with
    /// generators renamed.
    pub fn apply(&self, d: &Diagram) -> Result<Diagram, GrammarError> {
        if **d.alphabet() != *self.source {
            return Err(GrammarError::MorphismSourceMismatch);
        }
        let slices = d
            .slices()
            .iter()
            .map(|slice| {
                slice
                    .iter()
                    .map(|item| match item {
                        Item::Wire => Item::Wire,
                        Item::Gen(id) => {
                            let name = self.source.name(*id);
                            Item::Gen(self.target.id(self.image_name(name)).unwrap())
                        }
                    })
                    .collect()
            })
            .collect();
        Ok(Diagram::new(self.target.clone(), d.arity(), slices)
            .expect("arity-preserving relabelling keeps boundaries"))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus;
    use crate::corpus::alphabets;
    use crate::enumerate::enumerate_scalars;

    fn bones_grammar() -> Grammar {
        corpus::build("bones").unwrap().grammar
    }

    #[test]
    fn bones_grammar_validates() {
        bones_grammar().validate().unwrap();
    }

    #[test]
    fn bad_word_length_is_arity_mismatch() {
        let a = alphabets::bones();
        let machine = MonoidalGraph::new(
            vec!["s".into()],
            vec![Edge {
                name: "e".into(),
                dom: vec![],
                cod: vec!["s".into(), "s".into()],
            }],
        )
        .unwrap();
        let err = Grammar::new(machine, a, BTreeMap::from([("e".into(), "u".into())]))
            .unwrap_err();
        assert_eq!(err, GrammarError::ArityMismatch { edge: "e".into() });
    }

    #[test]
    fn empty_grammar_defines_the_unit_language() {
        let a = alphabets::bones();
        let machine = MonoidalGraph::new(vec!["s".into()], vec![]).unwrap();
        let g = Grammar::new(machine, a.clone(), BTreeMap::new()).unwrap();
        let aut = g.to_automaton();
        let members = aut.enumerate_members(3, 2);
        assert_eq!(members.len(), 1);
        assert_eq!(members[0].gen_count(), 0);
    }

    #[test]
    fn bones_automaton_relations() {
        let e = corpus::build("bones").unwrap();
        let aut = e.grammar.to_automaton();
        assert_eq!(aut, e.automaton);
        let a = &e.alphabet;
        let u = aut.relation(a.id("u").unwrap());
        assert_eq!(u.pairs.len(), 1);
        assert!(u.pairs.contains(&(vec![], vec![0])));
    }

    #[test]
    fn example13_gamma_image() {
        let e = corpus::build("example13").unwrap();
        let aut = e.grammar.to_automaton();
        let rel = aut.relation(e.alphabet.id("gamma").unwrap());
        let outs: Vec<Vec<String>> = rel
            .pairs
            .iter()
            .map(|(_, o)| o.iter().map(|q| aut.states()[*q].clone()).collect())
            .collect();
        assert_eq!(
            outs,
            vec![
                vec!["A", "B", "B", "A"],
                vec!["A", "C", "C", "A"]
            ]
        );
    }

    #[test]
    fn automaton_grammar_round_trip() {
        for name in ["bones", "example13", "dyck"] {
            let e = corpus::build(name).unwrap();
            let g = automaton_to_grammar(&e.automaton);
            let back = g.to_automaton();
            assert_eq!(back.relations(), e.automaton.relations(), "{name}");
        }
    }

    #[test]
    fn empty_automaton_round_trips_to_edgeless_grammar() {
        let a = alphabets::bones();
        let aut = NondetAutomaton::new(a, vec!["s".into()], BTreeMap::new()).unwrap();
        let g = automaton_to_grammar(&aut);
        assert!(g.machine.edges.is_empty());
    }

    #[test]
    fn union_with_empty_keeps_language() {
        let e = corpus::build("bones").unwrap();
        let empty = {
            let machine = MonoidalGraph::new(vec!["z".into()], vec![]).unwrap();
            Grammar::new(machine, e.alphabet.clone(), BTreeMap::new()).unwrap()
        };
        let u = e.grammar.union(&empty).unwrap();
        let lhs = u.to_automaton();
        for d in enumerate_scalars(&e.alphabet, 4, 3) {
            assert_eq!(
                lhs.accepts(&d).unwrap(),
                e.automaton.accepts(&d).unwrap()
            );
        }
        let uu = e.grammar.union(&e.grammar).unwrap().to_automaton();
        for d in enumerate_scalars(&e.alphabet, 4, 3) {
            assert_eq!(uu.accepts(&d).unwrap(), e.automaton.accepts(&d).unwrap());
        }
    }

    #[test]
    fn identity_image_is_identity() {
        let e = corpus::build("example13").unwrap();
        let h = AlphabetMorphism::identity(&e.alphabet);
        let img = e.grammar.image(&h).unwrap();
        assert_eq!(img.to_automaton(), e.automaton);
    }

    #[test]
    fn collapse_image_merges_members() {
        let e = corpus::build("example13").unwrap();
        let h = corpus::example13_collapse();
        let img = e.grammar.image(&h).unwrap().to_automaton();
        let members = img.enumerate_members_pruned(8, 4);
        let connected: Vec<_> = members
            .into_iter()
            .filter(crate::dag::is_connected)
            .collect();
        assert_eq!(connected.len(), 1);
    }

    #[test]
    fn preimage_of_collapse_accepts_both_members() {
        let e = corpus::build("example13").unwrap();
        let h = corpus::example13_collapse();
        let img = e.grammar.image(&h).unwrap().to_automaton();
        let pulled = img.preimage(&h).unwrap();
        let a = &e.alphabet;
        let b_member =
            Diagram::build(a, 0, &[&["gamma"], &["-", "b", "b", "-"], &["delta"]]).unwrap();
        let c_member =
            Diagram::build(a, 0, &[&["gamma"], &["-", "c", "c", "-"], &["delta"]]).unwrap();
        assert!(pulled.accepts(&b_member).unwrap());
        assert!(pulled.accepts(&c_member).unwrap());
        // Pullback along the identity is the automaton itself.
        let id = AlphabetMorphism::identity(&e.alphabet);
        assert_eq!(e.automaton.preimage(&id).unwrap(), e.automaton);
    }

    #[test]
    fn renaming_image_is_bijective_relabelling() {
        let e = corpus::build("bones").unwrap();
        let renamed = Alphabet::new(vec![("u2", 0usize, 1usize), ("v2", 1, 0)]).unwrap();
        let h = AlphabetMorphism::new(
            e.alphabet.clone(),
            renamed.clone(),
            BTreeMap::from([("u".into(), "u2".into()), ("v".into(), "v2".into())]),
        )
        .unwrap();
        let img = e.grammar.image(&h).unwrap().to_automaton();
        let bone2 = Diagram::build(&renamed, 0, &[&["u2"], &["v2"]]).unwrap();
        assert!(img.accepts(&bone2).unwrap());
    }

    use crate::alphabet::Alphabet;
}
