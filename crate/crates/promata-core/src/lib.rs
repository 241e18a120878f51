//! String diagram languages over monoidal alphabets.
//!
//! This crate implements languages of scalar string diagrams (diagrams with
//! no dangling wires) over finite monoidal alphabets, together with the
//! machinery used to define and decide them at desk scale:
//!
//! * [`diagram`] — planar diagrams as boundary-consistent slice lists, with
//!   composition, tensor, and a canonical normal form deciding equality up
//!   to planar isotopy;
//! * [`grammar`] — regular monoidal grammars (labelled monoidal graphs) and
//!   the grammar/automaton correspondence;
//! * [`automaton`] — non-deterministic monoidal automata, frontier runs,
//!   closure operations (union, intersection, images, preimages) and
//!   bounded language enumeration;
//! * [`determinize`] — deterministic monoidal automata, the convexity test
//!   and the powerset construction for convex automata;
//! * [`restriction`] — diagrams extended with copy/discard/swap, partial
//!   evaluation, causal histories, and history merging by term-graph folds;
//! * [`syntactic`] — contexts, congruence approximations and
//!   distinguishing-context search;
//! * [`finite_pro`] — finite hom-class tables with composition/tensor and
//!   an optional restriction structure, and the deterministic automaton
//!   extracted from a verified restriction structure;
//! * [`encodings`] — classical NFAs and tree automata as monoidal automata
//!   over word- and tree-shaped alphabets;
//! * [`corpus`] — the example languages used as fixtures throughout the
//!   test suite, each pinned by an independent oracle.

pub mod alphabet;
pub mod automaton;
mod canonical;
pub mod corpus;
pub mod dag;
pub mod determinize;
pub mod diagram;
pub mod encodings;
pub mod enumerate;
pub mod finite_pro;
pub mod grammar;
pub mod restriction;
pub mod syntactic;
pub mod termgraph;

pub use alphabet::{Alphabet, AlphabetError, GenDecl, GenId, MonoidalGraph};
pub use automaton::{NondetAutomaton, TransitionRelation};
pub use determinize::{ConvexityReport, DetAutomaton};
pub use diagram::{Diagram, DiagramError, Item};
pub use grammar::{AlphabetMorphism, Grammar};
pub use restriction::{History, RestDiagram};
pub use termgraph::TermGraph;
