//! Planar string diagrams as boundary-consistent slice lists.
//!
//! A diagram over an alphabet is a list of slices; each slice is a row of
//! items, either a wire passing through or a generator consuming a block of
//! adjacent wires. The widths of consecutive slices must chain, starting at
//! the diagram's arity and ending at its coarity. An empty slice list is an
//! identity; the scalar identity is the empty diagram.
//!
//! Equality of diagrams is planar isotopy. [`Diagram::normalize`] computes
//! the canonical representative of the isotopy class (one generator per
//! slice, each as early and as high as the exchange moves allow) and
//! [`Diagram::equivalent`] compares canonical forms structurally.

use std::fmt;
use std::sync::Arc;

use thiserror::Error;

use crate::alphabet::{Alphabet, GenId};
use crate::canonical::{self, Step};

/// One item of a slice: a wire passing through, or a generator occurrence.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Item {
    Wire,
    Gen(GenId),
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum DiagramError {
    #[error("unknown generator `{name}` in slice {slice}")]
    UnknownGenerator { slice: usize, name: String },
    #[error("boundary mismatch at slice {slice}: expected width {expected}, found {found}")]
    BoundaryMismatch {
        slice: usize,
        expected: usize,
        found: usize,
    },
    #[error("diagrams are over different alphabets")]
    AlphabetMismatch,
    #[error("operation requires a scalar diagram")]
    NotScalar,
}

/// A morphism of the free pro over an alphabet, stored as slices.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord)]
pub struct Diagram {
    alphabet: Arc<Alphabet>,
    arity: usize,
    coarity: usize,
    slices: Vec<Vec<Item>>,
}

impl Diagram {
    /// Validates the boundary chain and constructs the diagram. The error,
    /// if any, names the first offending slice.
    pub fn new(
        alphabet: Arc<Alphabet>,
        arity: usize,
        slices: Vec<Vec<Item>>,
    ) -> Result<Diagram, DiagramError> {
        let mut width = arity;
        for (i, slice) in slices.iter().enumerate() {
            let mut width_in = 0;
            let mut width_out = 0;
            for item in slice {
                match item {
                    Item::Wire => {
                        width_in += 1;
                        width_out += 1;
                    }
                    Item::Gen(id) => {
                        if id.0 >= alphabet.len() {
                            return Err(DiagramError::UnknownGenerator {
                                slice: i,
                                name: format!("#{}", id.0),
                            });
                        }
                        width_in += alphabet.arity(*id);
                        width_out += alphabet.coarity(*id);
                    }
                }
            }
            if width_in != width {
                return Err(DiagramError::BoundaryMismatch {
                    slice: i,
                    expected: width,
                    found: width_in,
                });
            }
            width = width_out;
        }
        Ok(Diagram {
            alphabet,
            arity,
            coarity: width,
            slices,
        })
    }

    /// Builds a diagram from slice rows of generator names, with `"-"`
    /// denoting a wire. Convenient for fixtures.
    pub fn build(
        alphabet: &Arc<Alphabet>,
        arity: usize,
        rows: &[&[&str]],
    ) -> Result<Diagram, DiagramError> {
        let mut slices = Vec::with_capacity(rows.len());
        for (i, row) in rows.iter().enumerate() {
            let mut slice = Vec::with_capacity(row.len());
            for cell in *row {
                if *cell == "-" {
                    slice.push(Item::Wire);
                } else {
                    let id = alphabet.id(cell).map_err(|_| DiagramError::UnknownGenerator {
                        slice: i,
                        name: cell.to_string(),
                    })?;
                    slice.push(Item::Gen(id));
                }
            }
            slices.push(slice);
        }
        Diagram::new(alphabet.clone(), arity, slices)
    }

    /// The identity on `n` wires: an empty slice list.
    pub fn identity(alphabet: Arc<Alphabet>, n: usize) -> Diagram {
        Diagram {
            alphabet,
            arity: n,
            coarity: n,
            slices: Vec::new(),
        }
    }

    /// The empty diagram: identity on the monoidal unit.
    pub fn empty(alphabet: Arc<Alphabet>) -> Diagram {
        Diagram::identity(alphabet, 0)
    }

    /// A single generator as a diagram.
    pub fn generator(alphabet: &Arc<Alphabet>, name: &str) -> Result<Diagram, DiagramError> {
        let id = alphabet.id(name).map_err(|_| DiagramError::UnknownGenerator {
            slice: 0,
            name: name.to_string(),
        })?;
        let arity = alphabet.arity(id);
        Ok(Diagram {
            alphabet: alphabet.clone(),
            arity,
            coarity: alphabet.coarity(id),
            slices: vec![vec![Item::Gen(id)]],
        })
    }

    pub fn alphabet(&self) -> &Arc<Alphabet> {
        &self.alphabet
    }

    pub fn arity(&self) -> usize {
        self.arity
    }

    pub fn coarity(&self) -> usize {
        self.coarity
    }

    pub fn slices(&self) -> &[Vec<Item>] {
        &self.slices
    }

    pub fn is_scalar(&self) -> bool {
        self.arity == 0 && self.coarity == 0
    }

    /// Number of generator occurrences.
    pub fn gen_count(&self) -> usize {
        self.slices
            .iter()
            .map(|s| s.iter().filter(|i| matches!(i, Item::Gen(_))).count())
            .sum()
    }

    pub fn same_alphabet(&self, other: &Diagram) -> bool {
        Arc::ptr_eq(&self.alphabet, &other.alphabet) || self.alphabet == other.alphabet
    }

    /// Sequential composition: `self` then `other`.
    pub fn compose(&self, other: &Diagram) -> Result<Diagram, DiagramError> {
        if !self.same_alphabet(other) {
            return Err(DiagramError::AlphabetMismatch);
        }
        if self.coarity != other.arity {
            return Err(DiagramError::BoundaryMismatch {
                slice: self.slices.len(),
                expected: self.coarity,
                found: other.arity,
            });
        }
        let mut slices = self.slices.clone();
        slices.extend(other.slices.iter().cloned());
        Ok(Diagram {
            alphabet: self.alphabet.clone(),
            arity: self.arity,
            coarity: other.coarity,
            slices,
        })
    }

    /// Monoidal product: `self` above `other`, padding the shorter diagram
    /// with identity slices.
    pub fn tensor(&self, other: &Diagram) -> Result<Diagram, DiagramError> {
        if !self.same_alphabet(other) {
            return Err(DiagramError::AlphabetMismatch);
        }
        let rows = self.slices.len().max(other.slices.len());
        let mut slices = Vec::with_capacity(rows);
        for i in 0..rows {
            let mut row: Vec<Item> = match self.slices.get(i) {
                Some(s) => s.clone(),
                None => vec![Item::Wire; self.coarity],
            };
            match other.slices.get(i) {
                Some(s) => row.extend(s.iter().copied()),
                None => row.extend(std::iter::repeat(Item::Wire).take(other.coarity)),
            }
            slices.push(row);
        }
        Ok(Diagram {
            alphabet: self.alphabet.clone(),
            arity: self.arity + other.arity,
            coarity: self.coarity + other.coarity,
            slices,
        })
    }

    /// Flattens the slices into one generator per step, left to right
    /// within each slice.
    pub(crate) fn steps(&self) -> Vec<Step> {
        let mut steps = Vec::new();
        for slice in &self.slices {
            // Firing the slice's generators left to right: everything to
            // the left of the cursor is already in post-slice form.
            let mut pos_out = 0;
            for item in slice {
                match item {
                    Item::Wire => pos_out += 1,
                    Item::Gen(id) => {
                        steps.push(Step {
                            offset: pos_out,
                            gen: *id,
                        });
                        pos_out += self.alphabet.coarity(*id);
                    }
                }
            }
        }
        steps
    }

    /// Rebuilds a diagram from a step sequence, one generator per slice.
    pub(crate) fn from_steps(
        alphabet: Arc<Alphabet>,
        arity: usize,
        steps: &[Step],
    ) -> Diagram {
        let mut slices = Vec::with_capacity(steps.len());
        let mut width = arity;
        for s in steps {
            let ar = alphabet.arity(s.gen);
            debug_assert!(s.offset + ar <= width);
            let mut slice = Vec::with_capacity(width - ar + 1);
            slice.extend(std::iter::repeat(Item::Wire).take(s.offset));
            slice.push(Item::Gen(s.gen));
            slice.extend(std::iter::repeat(Item::Wire).take(width - s.offset - ar));
            width = width - ar + alphabet.coarity(s.gen);
            slices.push(slice);
        }
        Diagram {
            alphabet,
            arity,
            coarity: width,
            slices,
        }
    }

    /// The canonical representative of this diagram's planar isotopy class.
    ///
    /// Normal forms have one generator per slice; normalization is
    /// idempotent, and diagrams related by interchange moves normalize to
    /// identical slice lists.
    pub fn normalize(&self) -> Diagram {
        let steps = self.steps();
        let canon = canonical::canonicalize(&self.alphabet, self.arity, self.coarity, &steps);
        Diagram::from_steps(self.alphabet.clone(), self.arity, &canon)
    }

    /// True when this diagram is already in canonical form.
    pub fn is_normal_form(&self) -> bool {
        *self == self.normalize()
    }

    /// Equality up to planar isotopy.
    pub fn equivalent(&self, other: &Diagram) -> Result<bool, DiagramError> {
        if !self.same_alphabet(other) {
            return Err(DiagramError::AlphabetMismatch);
        }
        if self.arity != other.arity || self.coarity != other.coarity {
            return Ok(false);
        }
        Ok(self.normalize().slices == other.normalize().slices)
    }

    /// Renders a compact one-line description, mostly for test output.
    pub fn describe(&self) -> String {
        let mut out = format!("{}→{}:", self.arity, self.coarity);
        for slice in &self.slices {
            out.push('[');
            for (i, item) in slice.iter().enumerate() {
                if i > 0 {
                    out.push(' ');
                }
                match item {
                    Item::Wire => out.push('-'),
                    Item::Gen(id) => out.push_str(self.alphabet.name(*id)),
                }
            }
            out.push(']');
        }
        out
    }
}

impl fmt::Debug for Diagram {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Diagram({})", self.describe())
    }
}

/// All diagrams obtained by one legal interchange move on consecutive
/// generators of the flattened form. Applying a variant's variant can
/// reach the original, so random walks over these explore the isotopy
/// class in both directions.
pub fn exchange_variants(d: &Diagram) -> Vec<Diagram> {
    let steps = d.steps();
    let mut out = Vec::new();
    for i in 1..steps.len() {
        if let Some((t1, t2)) = canonical::exchanged(d.alphabet(), steps[i - 1], steps[i]) {
            let mut next = steps.clone();
            next[i - 1] = t1;
            next[i] = t2;
            out.push(Diagram::from_steps(d.alphabet().clone(), d.arity(), &next));
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus::alphabets;

    #[test]
    fn empty_diagram_is_ok() {
        let a = alphabets::dyck();
        let d = Diagram::empty(a);
        assert!(d.is_scalar());
        assert_eq!(d.gen_count(), 0);
    }

    // Widths 0 -> 1 -> 2 -> 1 -> 0, each checked by summing item arities.
    #[test]
    fn dyck_chain_validates() {
        let a = alphabets::dyck();
        let d = Diagram::build(&a, 0, &[&["top"], &["open"], &["close"], &["bot"]]).unwrap();
        assert!(d.is_scalar());
        assert_eq!(d.gen_count(), 4);
    }

    #[test]
    fn arity_mismatch_is_boundary_error() {
        let a = alphabets::dyck();
        let err = Diagram::build(&a, 0, &[&["open"]]).unwrap_err();
        assert_eq!(
            err,
            DiagramError::BoundaryMismatch {
                slice: 0,
                expected: 0,
                found: 1
            }
        );
    }

    #[test]
    fn unknown_generator_reports_slice() {
        let a = alphabets::dyck();
        let err = Diagram::build(&a, 0, &[&["top"], &["zap"]]).unwrap_err();
        assert_eq!(
            err,
            DiagramError::UnknownGenerator {
                slice: 1,
                name: "zap".into()
            }
        );
    }

    #[test]
    fn compose_identity_is_neutral() {
        let a = alphabets::dyck();
        let d = Diagram::build(&a, 0, &[&["top"], &["open"]]).unwrap();
        let id = Diagram::identity(a.clone(), 2);
        let c = d.compose(&id).unwrap();
        assert!(c.equivalent(&d).unwrap());
        let id0 = Diagram::identity(a, 0);
        let c = id0.compose(&d).unwrap();
        assert!(c.equivalent(&d).unwrap());
    }

    #[test]
    fn compose_top_open() {
        let a = alphabets::dyck();
        let top = Diagram::generator(&a, "top").unwrap();
        let open = Diagram::generator(&a, "open").unwrap();
        let d = top.compose(&open).unwrap();
        assert_eq!((d.arity(), d.coarity()), (0, 2));
        assert_eq!(d.slices().len(), 2);
        let err = open.compose(&top).unwrap_err();
        assert!(matches!(err, DiagramError::BoundaryMismatch { .. }));
    }

    #[test]
    fn tensor_unit_law() {
        let a = alphabets::dyck();
        let d = Diagram::build(&a, 0, &[&["top"], &["open"], &["close"], &["bot"]]).unwrap();
        let unit = Diagram::empty(a);
        assert!(d.tensor(&unit).unwrap().equivalent(&d).unwrap());
        assert!(unit.tensor(&d).unwrap().equivalent(&d).unwrap());
    }

    #[test]
    fn tensor_open_close_widths() {
        let a = alphabets::dyck();
        let open = Diagram::generator(&a, "open").unwrap();
        let close = Diagram::generator(&a, "close").unwrap();
        let t = open.tensor(&close).unwrap();
        assert_eq!((t.arity(), t.coarity()), (3, 3));
    }

    #[test]
    fn interchange_normalizes_identically() {
        // (gamma ⊗ id);(id ⊗ delta) on disjoint wires, both slicings.
        let a = alphabets::example13();
        let first = Diagram::build(
            &a,
            0,
            &[&["gamma"], &["-", "b", "-", "-"], &["-", "b", "-"], &["delta"]],
        )
        .unwrap();
        let second = Diagram::build(
            &a,
            0,
            &[&["gamma"], &["-", "-", "b", "-"], &["-", "b", "-"], &["delta"]],
        )
        .unwrap();
        assert_eq!(first.normalize().slices, second.normalize().slices);
        assert!(first.equivalent(&second).unwrap());
    }

    #[test]
    fn normalize_is_idempotent_on_fixtures() {
        let a = alphabets::dyck();
        let d = Diagram::build(
            &a,
            0,
            &[&["top", "top"], &["open", "-"], &["-", "close"], &["bot", "bot"]],
        )
        .unwrap();
        let n = d.normalize();
        assert_eq!(n, n.normalize());
    }
}
