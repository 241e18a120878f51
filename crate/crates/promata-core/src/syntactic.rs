//! Contexts, context filling, and sound approximations of the syntactic
//! congruence.
//!
//! The exact syntactic congruence is not decided here. The module ships a
//! sound refinement (grouping diagrams by the relation an automaton
//! assigns them: equal relations imply congruent) and a bounded search for
//! distinguishing contexts (a found context proves inequivalence; an
//! exhausted search proves nothing).

use std::collections::BTreeMap;

use thiserror::Error;

use crate::automaton::{AutomatonError, NondetAutomaton, TransitionRelation};
use crate::diagram::{Diagram, DiagramError};
use crate::enumerate::enumerate_morphisms;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum SyntacticError {
    #[error("context capacity ({want_n}, {want_m}) does not fit diagram ({n}, {m})")]
    CapacityMismatch {
        want_n: usize,
        want_m: usize,
        n: usize,
        m: usize,
    },
    #[error("context boundaries do not chain")]
    MalformedContext,
    #[error(transparent)]
    Diagram(#[from] DiagramError),
    #[error(transparent)]
    Automaton(#[from] AutomatonError),
}

/// A scalar diagram with a typed hole: `left ; (id ⊗ hole ⊗ id) ; right`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Context {
    pub left: Diagram,
    pub right: Diagram,
    pub pad_left: usize,
    pub pad_right: usize,
    pub capacity: (usize, usize),
}

impl Context {
    pub fn new(
        left: Diagram,
        right: Diagram,
        pad_left: usize,
        pad_right: usize,
        capacity: (usize, usize),
    ) -> Result<Context, SyntacticError> {
        let (n, m) = capacity;
        if left.arity() != 0
            || left.coarity() != pad_left + n + pad_right
            || right.arity() != pad_left + m + pad_right
            || right.coarity() != 0
        {
            return Err(SyntacticError::MalformedContext);
        }
        Ok(Context {
            left,
            right,
            pad_left,
            pad_right,
            capacity,
        })
    }

    /// The empty context: filling it with a scalar returns the scalar.
    pub fn empty(alphabet: &std::sync::Arc<crate::alphabet::Alphabet>) -> Context {
        Context {
            left: Diagram::empty(alphabet.clone()),
            right: Diagram::empty(alphabet.clone()),
            pad_left: 0,
            pad_right: 0,
            capacity: (0, 0),
        }
    }

    /// Fills the hole: `left ; (id ⊗ d ⊗ id) ; right`, normalized.
    pub fn fill(&self, d: &Diagram) -> Result<Diagram, SyntacticError> {
        let (n, m) = self.capacity;
        if d.arity() != n || d.coarity() != m {
            return Err(SyntacticError::CapacityMismatch {
                want_n: n,
                want_m: m,
                n: d.arity(),
                m: d.coarity(),
            });
        }
        let alphabet = d.alphabet();
        let id_l = Diagram::identity(alphabet.clone(), self.pad_left);
        let id_r = Diagram::identity(alphabet.clone(), self.pad_right);
        let middle = id_l.tensor(d)?.tensor(&id_r)?;
        Ok(self.left.compose(&middle)?.compose(&self.right)?.normalize())
    }
}

/// Groups the `(n, m)` diagrams within bounds by the relation the
/// automaton assigns them. Equal relations imply syntactic congruence, so
/// the partition refines it; the class count is bounded by the number of
/// relations, witnessing local finiteness.
pub fn delta_partition(
    a: &NondetAutomaton,
    n: usize,
    m: usize,
    max_gens: usize,
    max_width: usize,
) -> Result<Vec<(TransitionRelation, Vec<Diagram>)>, SyntacticError> {
    let mut classes: BTreeMap<TransitionRelation, Vec<Diagram>> = BTreeMap::new();
    for d in enumerate_morphisms(a.alphabet(), n, m, max_gens, max_width) {
        let rel = a.relation_of(&d)?;
        classes.entry(rel).or_default().push(d);
    }
    Ok(classes.into_iter().collect())
}

/// Bounds for the distinguishing-context search.
#[derive(Debug, Clone, Copy)]
pub struct ContextBound {
    /// Total generator budget across the left and right parts.
    pub max_gens: usize,
    pub max_width: usize,
}

/// Searches for a context separating `d1` from `d2` with respect to the
/// automaton's language. `None` is not a proof of congruence: the search
/// is bounded.
pub fn distinguish(
    a: &NondetAutomaton,
    d1: &Diagram,
    d2: &Diagram,
    bound: ContextBound,
) -> Result<Option<Context>, SyntacticError> {
    let (n, m) = (d1.arity(), d1.coarity());
    if d2.arity() != n || d2.coarity() != m {
        return Err(SyntacticError::CapacityMismatch {
            want_n: n,
            want_m: m,
            n: d2.arity(),
            m: d2.coarity(),
        });
    }
    let alphabet = a.alphabet();
    let hole = n.max(m);
    let mut rights_cache: BTreeMap<(usize, usize), Vec<Diagram>> = BTreeMap::new();
    for pad in 0..=bound.max_width.saturating_sub(hole) {
        for pad_left in 0..=pad {
            let pad_right = pad - pad_left;
            let lefts = enumerate_morphisms(
                alphabet,
                0,
                pad_left + n + pad_right,
                bound.max_gens,
                bound.max_width,
            );
            for left in lefts {
                let right_budget = bound.max_gens - left.gen_count();
                let rights = rights_cache
                    .entry((pad_left + m + pad_right, right_budget))
                    .or_insert_with(|| {
                        enumerate_morphisms(
                            alphabet,
                            pad_left + m + pad_right,
                            0,
                            right_budget,
                            bound.max_width,
                        )
                    });
                for right in rights {
                    let c = Context::new(
                        left.clone(),
                        right.clone(),
                        pad_left,
                        pad_right,
                        (n, m),
                    )
                    .expect("enumerated boundaries chain");
                    let in1 = a.accepts(&c.fill(d1)?)?;
                    let in2 = a.accepts(&c.fill(d2)?)?;
                    if in1 != in2 {
                        return Ok(Some(c));
                    }
                }
            }
        }
    }
    Ok(None)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus::{self, alphabets};

    #[test]
    fn empty_context_returns_the_scalar() {
        let (b_member, _, _) = corpus::example13_members();
        let c = Context::empty(b_member.alphabet());
        assert!(c.fill(&b_member).unwrap().equivalent(&b_member).unwrap());
    }

    #[test]
    fn bones_context_completes_the_bone() {
        let a = alphabets::bones();
        let u = Diagram::generator(&a, "u").unwrap();
        let v = Diagram::generator(&a, "v").unwrap();
        let c = Context::new(u, Diagram::empty(a.clone()), 0, 0, (1, 0)).unwrap();
        let filled = c.fill(&v).unwrap();
        let bone = Diagram::build(&a, 0, &[&["u"], &["v"]]).unwrap();
        assert!(filled.equivalent(&bone).unwrap());
    }

    #[test]
    fn dyck_context_around_open_close() {
        let e = corpus::build("dyck").unwrap();
        let a = &e.alphabet;
        let top = Diagram::generator(a, "top").unwrap();
        let bot = Diagram::generator(a, "bot").unwrap();
        let c = Context::new(top, bot, 0, 0, (1, 1)).unwrap();
        let oc = Diagram::build(a, 1, &[&["open"], &["close"]]).unwrap();
        let filled = c.fill(&oc).unwrap();
        assert!(e.automaton.accepts(&filled).unwrap());
    }

    #[test]
    fn capacity_mismatch_is_reported() {
        let a = alphabets::bones();
        let c = Context::empty(&a);
        let u = Diagram::generator(&a, "u").unwrap();
        assert!(matches!(
            c.fill(&u),
            Err(SyntacticError::CapacityMismatch { .. })
        ));
    }

    #[test]
    fn scalar_classes_split_accepted_from_rejected() {
        // Rel over the three example13 states has two nullary relations,
        // so the (0,0) stream falls into exactly the two classes.
        let e = corpus::build("example13").unwrap();
        let classes = delta_partition(&e.automaton, 0, 0, 4, 4).unwrap();
        assert_eq!(classes.len(), 2);
        for (rel, members) in &classes {
            let accepted = !rel.pairs.is_empty();
            for d in members {
                assert_eq!(e.automaton.accepts(d).unwrap(), accepted);
            }
        }
    }

    #[test]
    fn bones_zero_one_diagrams_form_one_class() {
        let e = corpus::build("bones").unwrap();
        let classes = delta_partition(&e.automaton, 0, 1, 4, 3).unwrap();
        assert_eq!(classes.len(), 1);
    }

    #[test]
    fn example13_gamma_is_alone_in_its_class() {
        let e = corpus::build("example13").unwrap();
        let classes = delta_partition(&e.automaton, 0, 4, 2, 4).unwrap();
        let gamma = Diagram::generator(&e.alphabet, "gamma").unwrap();
        let cls = classes
            .iter()
            .find(|(_, ds)| ds.iter().any(|d| d.equivalent(&gamma).unwrap()))
            .unwrap();
        assert_eq!(cls.1.len(), 1);
    }

    #[test]
    fn identical_diagrams_are_never_distinguished() {
        let e = corpus::build("bones").unwrap();
        let u = Diagram::generator(&e.alphabet, "u").unwrap();
        let found = distinguish(
            &e.automaton,
            &u,
            &u,
            ContextBound {
                max_gens: 3,
                max_width: 3,
            },
        )
        .unwrap();
        assert!(found.is_none());
    }

    #[test]
    fn example13_b_and_c_are_distinguished() {
        let e = corpus::build("example13").unwrap();
        let b = Diagram::generator(&e.alphabet, "b").unwrap();
        let c = Diagram::generator(&e.alphabet, "c").unwrap();
        let found = distinguish(
            &e.automaton,
            &b,
            &c,
            ContextBound {
                max_gens: 3,
                max_width: 4,
            },
        )
        .unwrap()
        .expect("a separating context exists");
        let cb = found.fill(&b).unwrap();
        let cc = found.fill(&c).unwrap();
        assert_ne!(
            e.automaton.accepts(&cb).unwrap(),
            e.automaton.accepts(&cc).unwrap()
        );
    }
}
