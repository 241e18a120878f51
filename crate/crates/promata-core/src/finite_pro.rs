//! Finite hom-class tables with composition and tensor, an optional
//! restriction structure, and the deterministic automaton extracted from a
//! verified structure.
//!
//! A `FinitePro` presents a pro by classes: hom-sets for objects up to a
//! bound, a composition table, a tensor table, designated identity classes
//! and the class of the empty diagram. Cells outside the bound are simply
//! absent and every lookup fails loudly. Presentations are derived from an
//! automaton by grouping enumerated diagrams by their relations and
//! composing representatives.

use std::collections::BTreeMap;
use std::sync::Arc;

use thiserror::Error;

use crate::alphabet::Alphabet;
use crate::automaton::{NondetAutomaton, Word};
use crate::determinize::DetAutomaton;
use crate::diagram::Diagram;
use crate::enumerate;

/// Index of a class in a [`FinitePro`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub struct ClassId(pub usize);

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ClassInfo {
    pub dom: usize,
    pub cod: usize,
    pub name: String,
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum FiniteProError {
    #[error("table lookup missing: {0}")]
    TableLookupMissing(String),
    #[error("incomplete tables: {0}")]
    IncompleteTables(String),
    #[error("equation `{equation}` fails: {detail}")]
    FailedEquation { equation: String, detail: String },
    #[error("no restriction structure designated")]
    NoRestrictionStructure,
    #[error("no class designated for generator `{0}`")]
    MissingGeneratorClass(String),
    #[error("hom-set ({0}, {1}) is outside the object bound")]
    OutsideBound(usize, usize),
}

/// Designated classes giving the pro a cartesian restriction structure.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RestrictionStructure {
    pub copy: ClassId,
    pub discard: ClassId,
    pub swap: ClassId,
}

/// A finitely presented pro with explicit tables.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FinitePro {
    pub alphabet: Arc<Alphabet>,
    /// Hom-sets are tracked for objects `0..=max_object`.
    pub max_object: usize,
    pub classes: Vec<ClassInfo>,
    pub homs: BTreeMap<(usize, usize), Vec<ClassId>>,
    pub identities: BTreeMap<usize, ClassId>,
    pub compose: BTreeMap<(ClassId, ClassId), ClassId>,
    pub tensor: BTreeMap<(ClassId, ClassId), ClassId>,
    /// The class of the empty diagram in hom (0, 0).
    pub unit_scalar: ClassId,
    /// One designated class per generator.
    pub generator_classes: BTreeMap<String, ClassId>,
    pub restriction: Option<RestrictionStructure>,
}

impl FinitePro {
    pub fn class(&self, id: ClassId) -> &ClassInfo {
        &self.classes[id.0]
    }

    pub fn lookup_compose(&self, f: ClassId, g: ClassId) -> Result<ClassId, FiniteProError> {
        self.compose.get(&(f, g)).copied().ok_or_else(|| {
            FiniteProError::TableLookupMissing(format!(
                "compose({}, {})",
                self.class(f).name,
                self.class(g).name
            ))
        })
    }

    pub fn lookup_tensor(&self, f: ClassId, g: ClassId) -> Result<ClassId, FiniteProError> {
        self.tensor.get(&(f, g)).copied().ok_or_else(|| {
            FiniteProError::TableLookupMissing(format!(
                "tensor({}, {})",
                self.class(f).name,
                self.class(g).name
            ))
        })
    }

    pub fn identity(&self, n: usize) -> Result<ClassId, FiniteProError> {
        self.identities
            .get(&n)
            .copied()
            .ok_or_else(|| FiniteProError::TableLookupMissing(format!("identity({n})")))
    }

    /// Tensor of a list of classes; the empty list is the unit scalar.
    pub fn tensor_all(&self, classes: &[ClassId]) -> Result<ClassId, FiniteProError> {
        match classes.split_first() {
            None => Ok(self.unit_scalar),
            Some((first, rest)) => {
                let mut acc = *first;
                for c in rest {
                    acc = self.lookup_tensor(acc, *c)?;
                }
                Ok(acc)
            }
        }
    }

    /// Derived copy on `n` wires, built coherently from the designated
    /// comultiplication: `copy_{x⊗y} = (copy_x ⊗ copy_y);(id ⊗ swap ⊗ id)`.
    pub fn copy_n(&self, n: usize) -> Result<ClassId, FiniteProError> {
        let r = self
            .restriction
            .as_ref()
            .ok_or(FiniteProError::NoRestrictionStructure)?;
        match n {
            0 => Ok(self.unit_scalar),
            1 => Ok(r.copy),
            _ => {
                let prev = self.copy_n(n - 1)?;
                // copy_{(n-1)+1} = (copy_{n-1} ⊗ copy_1); (id_{n-1} ⊗ swap_{n-1,1} ⊗ id_1)
                let both = self.lookup_tensor(prev, r.copy)?;
                let id_prev = self.identity(n - 1)?;
                let id_one = self.identity(1)?;
                let mid = self.swap_block(n - 1, 1)?;
                let shuffle = self.tensor_all(&[id_prev, mid, id_one])?;
                self.lookup_compose(both, shuffle)
            }
        }
    }

    /// Derived discard on `n` wires: a tensor power of the counit.
    pub fn discard_n(&self, n: usize) -> Result<ClassId, FiniteProError> {
        let r = self
            .restriction
            .as_ref()
            .ok_or(FiniteProError::NoRestrictionStructure)?;
        self.tensor_all(&vec![r.discard; n])
    }

    /// Derived block symmetry `swap_{k,l}` from the designated one-wire
    /// swap, moving a block of `k` wires past a block of `l`.
    pub fn swap_block(&self, k: usize, l: usize) -> Result<ClassId, FiniteProError> {
        let r = self
            .restriction
            .as_ref()
            .ok_or(FiniteProError::NoRestrictionStructure)?;
        if k == 0 {
            return self.identity(l);
        }
        if l == 0 {
            return self.identity(k);
        }
        if (k, l) == (1, 1) {
            return Ok(r.swap);
        }
        if l == 1 {
            // swap_{k,1} = (id_{k-1} ⊗ swap);(swap_{k-1,1} ⊗ id_1)
            let id_km1 = self.identity(k - 1)?;
            let first = self.lookup_tensor(id_km1, r.swap)?;
            let rest = self.lookup_tensor(self.swap_block(k - 1, 1)?, self.identity(1)?)?;
            return self.lookup_compose(first, rest);
        }
        // swap_{k,l} = (swap_{k,1} ⊗ id_{l-1});(id_1 ⊗ swap_{k,l-1})
        let first = self.lookup_tensor(self.swap_block(k, 1)?, self.identity(l - 1)?)?;
        let rest = self.lookup_tensor(self.identity(1)?, self.swap_block(k, l - 1)?)?;
        self.lookup_compose(first, rest)
    }
}

/// Derives a presentation from an automaton: enumerates the `(n, m)`
/// diagrams within bounds for all objects up to `max_object`, groups them
/// by their relations, and fills the tables by composing representatives.
/// Composite classes whose relation was never enumerated stay absent.
pub fn build_finite_pro(
    a: &NondetAutomaton,
    max_object: usize,
    max_gens: usize,
    max_width: usize,
) -> FinitePro {
    let alphabet = a.alphabet().clone();
    let mut classes: Vec<ClassInfo> = Vec::new();
    let mut reps: Vec<Diagram> = Vec::new();
    let mut homs: BTreeMap<(usize, usize), Vec<ClassId>> = BTreeMap::new();
    let mut by_relation: BTreeMap<(usize, usize, crate::automaton::TransitionRelation), ClassId> =
        BTreeMap::new();
    // One representative per realized relation; isotopic duplicates in the
    // raw stream land in an existing class and cost nothing. A hom-set
    // enumeration stops once every relation over Q is realized, or after a
    // long run of candidates yielding nothing new; a class that escapes
    // the cutoff surfaces later as a loud table-lookup failure, never as a
    // wrong entry.
    const SATURATION: usize = 5_000;
    for n in 0..=max_object {
        for m in 0..=max_object {
            let mut ids = Vec::new();
            let states = a.states().len();
            let cells = states.pow(n as u32).saturating_mul(states.pow(m as u32));
            let relation_cap: Option<usize> = if cells <= 20 {
                Some(1usize << cells)
            } else {
                None
            };
            let mut stale = 0usize;
            enumerate::enumerate_raw(
                &alphabet,
                n,
                m,
                max_gens,
                max_width.max(max_object),
                &mut |d| {
                    let rel = a.relation_of(&d).expect("same alphabet");
                    let key = (n, m, rel);
                    if !by_relation.contains_key(&key) {
                        let id = ClassId(classes.len());
                        classes.push(ClassInfo {
                            dom: n,
                            cod: m,
                            name: format!("c{}_{}_{}", n, m, ids.len()),
                        });
                        reps.push(d);
                        by_relation.insert(key, id);
                        ids.push(id);
                        stale = 0;
                    } else {
                        stale += 1;
                    }
                    stale < SATURATION
                        && relation_cap.map(|cap| ids.len() < cap).unwrap_or(true)
                },
            );
            homs.insert((n, m), ids);
        }
    }
    let class_of = |d: &Diagram| -> Option<ClassId> {
        let rel = a.relation_of(d).ok()?;
        by_relation.get(&(d.arity(), d.coarity(), rel)).copied()
    };
    let mut compose = BTreeMap::new();
    let mut tensor = BTreeMap::new();
    for (i, f) in reps.iter().enumerate() {
        for (j, g) in reps.iter().enumerate() {
            if f.coarity() == g.arity() {
                if let Some(h) = class_of(&f.compose(g).unwrap()) {
                    compose.insert((ClassId(i), ClassId(j)), h);
                }
            }
            if f.arity() + g.arity() <= max_object && f.coarity() + g.coarity() <= max_object {
                if let Some(h) = class_of(&f.tensor(g).unwrap()) {
                    tensor.insert((ClassId(i), ClassId(j)), h);
                }
            }
        }
    }
    let mut identities = BTreeMap::new();
    for n in 0..=max_object {
        if let Some(id) = class_of(&Diagram::identity(alphabet.clone(), n)) {
            identities.insert(n, id);
        }
    }
    let unit_scalar = class_of(&Diagram::empty(alphabet.clone())).expect("unit is enumerated");
    let mut generator_classes = BTreeMap::new();
    for g in alphabet.gens() {
        if let Some(id) = class_of(&Diagram::generator(&alphabet, &g.name).unwrap()) {
            generator_classes.insert(g.name.clone(), id);
        }
    }
    FinitePro {
        alphabet,
        max_object,
        classes,
        homs,
        identities,
        compose,
        tensor,
        unit_scalar,
        generator_classes,
        restriction: None,
    }
}

/// Designates the restriction structure when each required hom-set has
/// exactly one class (as in syntactic pros of languages that contain every
/// scalar): copy from hom (1, 2), discard from (1, 0), swap from (2, 2).
pub fn designate_unique_restriction(p: &mut FinitePro) -> Result<(), FiniteProError> {
    let pick = |p: &FinitePro, n: usize, m: usize| -> Result<ClassId, FiniteProError> {
        let hom = p
            .homs
            .get(&(n, m))
            .ok_or(FiniteProError::OutsideBound(n, m))?;
        match hom.as_slice() {
            [one] => Ok(*one),
            _ => Err(FiniteProError::IncompleteTables(format!(
                "hom ({n}, {m}) has {} classes, cannot designate uniquely",
                hom.len()
            ))),
        }
    };
    let structure = RestrictionStructure {
        copy: pick(p, 1, 2)?,
        discard: pick(p, 1, 0)?,
        swap: pick(p, 2, 2)?,
    };
    p.restriction = Some(structure);
    Ok(())
}

/// Checks the comonoid equations, coherence on tensor objects, and the
/// naturality of copy against every class within the object bound.
/// Reports the first failing equation.
pub fn verify_restriction_structure(p: &FinitePro) -> Result<(), FiniteProError> {
    let r = p
        .restriction
        .as_ref()
        .ok_or(FiniteProError::NoRestrictionStructure)?;
    let id1 = p.identity(1)?;
    let equation = |name: &str, lhs: ClassId, rhs: ClassId| -> Result<(), FiniteProError> {
        if lhs == rhs {
            Ok(())
        } else {
            Err(FiniteProError::FailedEquation {
                equation: name.to_string(),
                detail: format!("{} != {}", p.class(lhs).name, p.class(rhs).name),
            })
        }
    };

    // Commutativity: copy ; swap = copy.
    equation(
        "ccm-commutativity",
        p.lookup_compose(r.copy, r.swap)?,
        r.copy,
    )?;
    // Left unitality: copy ; (discard ⊗ id) = id.
    let unit_l = p.lookup_tensor(r.discard, id1)?;
    equation(
        "ccm-left-unitality",
        p.lookup_compose(r.copy, unit_l)?,
        id1,
    )?;
    // Coassociativity: copy ; (copy ⊗ id) = copy ; (id ⊗ copy).
    let lhs = p.lookup_compose(r.copy, p.lookup_tensor(r.copy, id1)?)?;
    let rhs = p.lookup_compose(r.copy, p.lookup_tensor(id1, r.copy)?)?;
    equation("ccm-coassociativity", lhs, rhs)?;
    // The designated symmetry is an involution.
    equation(
        "swap-involution",
        p.lookup_compose(r.swap, r.swap)?,
        p.identity(2)?,
    )?;
    // Coherence: the comonoid on object 2, built from the designated
    // structure, again satisfies the comonoid equations.
    if 2 * 2 <= p.max_object {
        let copy2 = p.copy_n(2)?;
        let id2 = p.identity(2)?;
        equation(
            "coherence-commutativity-2",
            p.lookup_compose(copy2, p.swap_block(2, 2)?)?,
            copy2,
        )?;
        let unit2 = p.lookup_tensor(p.discard_n(2)?, id2)?;
        equation(
            "coherence-left-unitality-2",
            p.lookup_compose(copy2, unit2)?,
            id2,
        )?;
        if 3 * 2 <= p.max_object {
            let lhs = p.lookup_compose(copy2, p.lookup_tensor(copy2, id2)?)?;
            let rhs = p.lookup_compose(copy2, p.lookup_tensor(id2, copy2)?)?;
            equation("coherence-coassociativity-2", lhs, rhs)?;
        }
    }
    // Naturality of copy against every class within bound:
    // f ; copy_m = copy_n ; (f ⊗ f).
    for (id, info) in p.classes.iter().enumerate() {
        let f = ClassId(id);
        let (n, m) = (info.dom, info.cod);
        if 2 * n > p.max_object || 2 * m > p.max_object {
            continue;
        }
        let lhs = p.lookup_compose(f, p.copy_n(m)?)?;
        let ff = p.lookup_tensor(f, f)?;
        let rhs = p.lookup_compose(p.copy_n(n)?, ff)?;
        equation(&format!("copy-naturality[{}]", info.name), lhs, rhs)?;
    }
    Ok(())
}

/// Builds the deterministic automaton whose states are the (0, 1) classes:
/// a generator class, applied to a tuple of states, outputs per coordinate
/// the class of the composite with every other output discarded; a
/// coarity-0 generator accepts exactly when the composite class is the
/// class of the empty diagram.
pub fn syntactic_automaton(p: &FinitePro) -> Result<DetAutomaton, FiniteProError> {
    verify_restriction_structure(p)?;
    let states: Vec<ClassId> = p
        .homs
        .get(&(0, 1))
        .cloned()
        .ok_or(FiniteProError::OutsideBound(0, 1))?;
    let state_names: Vec<String> = states.iter().map(|c| p.class(*c).name.clone()).collect();
    let index: BTreeMap<ClassId, usize> = {
        // DetAutomaton sorts state names; mirror that order.
        let mut names_sorted = state_names.clone();
        names_sorted.sort();
        states
            .iter()
            .map(|c| {
                (
                    *c,
                    names_sorted
                        .binary_search(&p.class(*c).name)
                        .expect("state name present"),
                )
            })
            .collect()
    };
    let mut transitions: BTreeMap<crate::alphabet::GenId, BTreeMap<Word, Word>> = BTreeMap::new();
    for g in p.alphabet.gens() {
        let gen_id = p.alphabet.id(&g.name).unwrap();
        let beta = *p
            .generator_classes
            .get(&g.name)
            .ok_or_else(|| FiniteProError::MissingGeneratorClass(g.name.clone()))?;
        let mut table: BTreeMap<Word, Word> = BTreeMap::new();
        for tuple in state_tuples(&states, g.arity) {
            let tens = p.tensor_all(&tuple)?;
            let composite = p.lookup_compose(tens, beta)?;
            if g.coarity == 0 {
                if composite == p.unit_scalar {
                    let input: Word = tuple.iter().map(|c| index[c]).collect();
                    table.insert(input, Vec::new());
                }
                continue;
            }
            // Project each output: discard every wire but the i-th.
            let mut output: Word = Vec::with_capacity(g.coarity);
            let mut ok = true;
            for i in 0..g.coarity {
                let before = p.discard_n(i)?;
                let after = p.discard_n(g.coarity - 1 - i)?;
                let keep_i = p.tensor_all(&[before, p.identity(1)?, after])?;
                let projected = p.lookup_compose(composite, keep_i)?;
                match index.get(&projected) {
                    Some(q) => output.push(*q),
                    None => {
                        ok = false;
                        break;
                    }
                }
            }
            if ok {
                let input: Word = tuple.iter().map(|c| index[c]).collect();
                table.insert(input, output);
            }
        }
        transitions.insert(gen_id, table);
    }
    let mut sorted_names = state_names;
    sorted_names.sort();
    Ok(DetAutomaton::from_tables(
        p.alphabet.clone(),
        sorted_names,
        transitions,
    ))
}

fn state_tuples(states: &[ClassId], arity: usize) -> Vec<Vec<ClassId>> {
    if arity == 0 {
        return vec![Vec::new()];
    }
    use itertools::Itertools;
    (0..arity)
        .map(|_| states.iter().copied())
        .multi_cartesian_product()
        .collect()
}
