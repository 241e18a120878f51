//! Diagrams over an alphabet extended with copy, discard and swap;
//! evaluation by deterministic automata; causal histories and their
//! merging.
//!
//! A causal history of a scalar diagram keeps a downward-closed set of its
//! occurrences and discards every wire leaving the kept region. Merging a
//! tensor of histories searches fold sequences on the term graph; when a
//! fold-reachable graph lays out as a plain diagram, the tensor equals the
//! embedding of that diagram, and the fold trace replays the equational
//! reasoning step by step.

use std::collections::BTreeSet;
use std::sync::Arc;

use thiserror::Error;

use crate::alphabet::Alphabet;
use crate::automaton::NondetAutomaton;
use crate::dag;
use crate::determinize::DetAutomaton;
use crate::diagram::{Diagram, DiagramError, Item};
use crate::termgraph::{
    fold_search, Budget, FoldStep, TermGraph, TermGraphError, TgOcc, DEFAULT_SEARCH_BUDGET,
};

pub const COPY: &str = "copy";
pub const DISCARD: &str = "discard";
pub const SWAP: &str = "swap";

#[derive(Debug, Error, PartialEq, Eq)]
pub enum RestrictionError {
    #[error("generator name `{0}` is reserved for the restriction structure")]
    ReservedName(String),
    #[error("operation requires a scalar diagram")]
    NotScalar,
    #[error("histories are over different alphabets")]
    AlphabetMismatch,
    #[error("no fold sequence merges the histories")]
    NotMergeable,
    #[error("search budget of {0} exhausted")]
    BudgetExceeded(usize),
    #[error(transparent)]
    Diagram(#[from] DiagramError),
}

impl From<TermGraphError> for RestrictionError {
    fn from(e: TermGraphError) -> Self {
        match e {
            TermGraphError::BudgetExceeded(n) => RestrictionError::BudgetExceeded(n),
            _ => RestrictionError::NotMergeable,
        }
    }
}

/// The alphabet extended with the three structural generators.
pub fn extended_alphabet(base: &Arc<Alphabet>) -> Result<Arc<Alphabet>, RestrictionError> {
    let mut gens: Vec<(String, usize, usize)> = base
        .gens()
        .iter()
        .map(|g| {
            if g.name == COPY || g.name == DISCARD || g.name == SWAP {
                Err(RestrictionError::ReservedName(g.name.clone()))
            } else {
                Ok((g.name.clone(), g.arity, g.coarity))
            }
        })
        .collect::<Result<_, _>>()?;
    gens.push((COPY.into(), 1, 2));
    gens.push((DISCARD.into(), 1, 0));
    gens.push((SWAP.into(), 2, 2));
    Ok(Alphabet::new(gens).expect("reserved names are fresh"))
}

/// A diagram over the extended alphabet, remembering its base alphabet.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub struct RestDiagram {
    base: Arc<Alphabet>,
    inner: Diagram,
}

impl RestDiagram {
    /// Reinterprets a plain diagram over the extended alphabet. Injective
    /// on normal forms; the image contains no copy, discard or swap.
    pub fn embed(d: &Diagram) -> Result<RestDiagram, RestrictionError> {
        let base = d.alphabet().clone();
        let ext = extended_alphabet(&base)?;
        let slices = d
            .slices()
            .iter()
            .map(|slice| {
                slice
                    .iter()
                    .map(|item| match item {
                        Item::Wire => Item::Wire,
                        Item::Gen(id) => Item::Gen(ext.id(base.name(*id)).unwrap()),
                    })
                    .collect()
            })
            .collect();
        Ok(RestDiagram {
            base,
            inner: Diagram::new(ext, d.arity(), slices).expect("same boundary arithmetic"),
        })
    }

    /// Wraps a diagram already over the extended alphabet.
    pub fn from_extended(
        base: Arc<Alphabet>,
        inner: Diagram,
    ) -> Result<RestDiagram, RestrictionError> {
        let ext = extended_alphabet(&base)?;
        if **inner.alphabet() != *ext {
            return Err(RestrictionError::AlphabetMismatch);
        }
        Ok(RestDiagram { base, inner })
    }

    pub fn base(&self) -> &Arc<Alphabet> {
        &self.base
    }

    pub fn inner(&self) -> &Diagram {
        &self.inner
    }

    pub fn is_scalar(&self) -> bool {
        self.inner.is_scalar()
    }

    pub fn normalize(&self) -> RestDiagram {
        RestDiagram {
            base: self.base.clone(),
            inner: self.inner.normalize(),
        }
    }

    pub fn tensor(&self, other: &RestDiagram) -> Result<RestDiagram, RestrictionError> {
        if self.base != other.base {
            return Err(RestrictionError::AlphabetMismatch);
        }
        Ok(RestDiagram {
            base: self.base.clone(),
            inner: self.inner.tensor(&other.inner)?,
        })
    }

    /// True when no copy, discard or swap occurs.
    pub fn is_plain(&self) -> bool {
        let ext = self.inner.alphabet();
        let special: BTreeSet<_> = [COPY, DISCARD, SWAP]
            .iter()
            .map(|n| ext.id(n).unwrap())
            .collect();
        self.inner.slices().iter().all(|slice| {
            slice.iter().all(|item| match item {
                Item::Wire => true,
                Item::Gen(g) => !special.contains(g),
            })
        })
    }

    /// Strips the extension from a copy/discard/swap-free diagram.
    pub fn to_plain(&self) -> Option<Diagram> {
        if !self.is_plain() {
            return None;
        }
        let ext = self.inner.alphabet();
        let slices = self
            .inner
            .slices()
            .iter()
            .map(|slice| {
                slice
                    .iter()
                    .map(|item| match item {
                        Item::Wire => Item::Wire,
                        Item::Gen(id) => Item::Gen(self.base.id(ext.name(*id)).unwrap()),
                    })
                    .collect()
            })
            .collect();
        Some(Diagram::new(self.base.clone(), self.inner.arity(), slices).unwrap())
    }

    /// Collapses copy trees to fan-out sets and discards to absent
    /// consumers; swaps disappear. Scalar only.
    pub fn to_termgraph(&self) -> Result<TermGraph, RestrictionError> {
        if !self.is_scalar() {
            return Err(RestrictionError::NotScalar);
        }
        let ext = self.inner.alphabet();
        let copy = ext.id(COPY).unwrap();
        let discard = ext.id(DISCARD).unwrap();
        let swap = ext.id(SWAP).unwrap();
        let mut occs = std::collections::BTreeMap::new();
        let mut next_id = 0usize;
        // Boundary wires carry their producer port in the term graph.
        let mut boundary: Vec<(usize, usize)> = Vec::new();
        for slice in self.inner.slices() {
            let mut pos = 0usize;
            let mut next_boundary: Vec<(usize, usize)> = Vec::new();
            for item in slice {
                match item {
                    Item::Wire => {
                        next_boundary.push(boundary[pos]);
                        pos += 1;
                    }
                    Item::Gen(g) if *g == copy => {
                        let w = boundary[pos];
                        pos += 1;
                        next_boundary.push(w);
                        next_boundary.push(w);
                    }
                    Item::Gen(g) if *g == discard => {
                        pos += 1;
                    }
                    Item::Gen(g) if *g == swap => {
                        next_boundary.push(boundary[pos + 1]);
                        next_boundary.push(boundary[pos]);
                        pos += 2;
                    }
                    Item::Gen(g) => {
                        let ar = ext.arity(*g);
                        let inputs: Vec<(usize, usize)> =
                            boundary[pos..pos + ar].to_vec();
                        pos += ar;
                        let id = next_id;
                        next_id += 1;
                        occs.insert(
                            id,
                            TgOcc {
                                gen: self.base.id(ext.name(*g)).unwrap(),
                                inputs,
                            },
                        );
                        for p in 0..ext.coarity(*g) {
                            next_boundary.push((id, p));
                        }
                    }
                }
            }
            boundary = next_boundary;
        }
        Ok(TermGraph {
            alphabet: self.base.clone(),
            occs,
        })
    }
}

/// Runs a deterministic automaton over a diagram with structure: copy
/// duplicates a state letter, discard deletes it, swap transposes.
pub fn det_run_rest(a: &DetAutomaton, r: &RestDiagram) -> Result<bool, RestrictionError> {
    if !r.is_scalar() {
        return Err(RestrictionError::NotScalar);
    }
    if **a.alphabet() != *r.base {
        return Err(RestrictionError::AlphabetMismatch);
    }
    let ext = r.inner.alphabet();
    let copy = ext.id(COPY).unwrap();
    let discard = ext.id(DISCARD).unwrap();
    let swap = ext.id(SWAP).unwrap();
    let mut word: Vec<usize> = Vec::new();
    for slice in r.inner.slices() {
        let mut next = Vec::new();
        let mut pos = 0usize;
        for item in slice {
            match item {
                Item::Wire => {
                    next.push(word[pos]);
                    pos += 1;
                }
                Item::Gen(g) if *g == copy => {
                    next.push(word[pos]);
                    next.push(word[pos]);
                    pos += 1;
                }
                Item::Gen(g) if *g == discard => {
                    pos += 1;
                }
                Item::Gen(g) if *g == swap => {
                    next.push(word[pos + 1]);
                    next.push(word[pos]);
                    pos += 2;
                }
                Item::Gen(g) => {
                    let base_gen = r.base.id(ext.name(*g)).unwrap();
                    let ar = r.base.arity(base_gen);
                    let sub = &word[pos..pos + ar];
                    pos += ar;
                    match a.transitions()[&base_gen].get(sub) {
                        Some(out) => next.extend(out.iter().copied()),
                        None => return Ok(false),
                    }
                }
            }
        }
        word = next;
    }
    Ok(true)
}

/// A causal history: a weakening of a source diagram, with provenance.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct History {
    pub rest: RestDiagram,
    pub source: Diagram,
    /// Indices of kept occurrences, in the source's canonical firing
    /// order; downward-closed in the dataflow DAG.
    pub kept: BTreeSet<usize>,
}

/// All prefix histories of a scalar diagram: one per downward-closed set
/// of occurrences, with a discard on every wire leaving the kept region.
/// Includes the empty cut and the full diagram.
pub fn prefix_histories(d: &Diagram) -> Result<Vec<History>, RestrictionError> {
    if !d.is_scalar() {
        return Err(RestrictionError::NotScalar);
    }
    let nf = d.normalize();
    let dag = dag::dataflow_dag(&nf);
    let n = dag.occurrences.len();
    assert!(n <= 20, "history enumeration limited to 20 occurrences");
    let preds: Vec<BTreeSet<usize>> = (0..n).map(|o| dag.predecessors(o)).collect();
    let ext = extended_alphabet(d.alphabet())?;
    let discard = ext.id(DISCARD).unwrap();
    let mut out = Vec::new();
    'subsets: for mask in 0u32..(1 << n) {
        let kept: BTreeSet<usize> = (0..n).filter(|o| mask & (1 << o) != 0).collect();
        for o in &kept {
            if !preds[*o].is_subset(&kept) {
                continue 'subsets;
            }
        }
        out.push(history_of_cut(&nf, &ext, discard, &kept));
    }
    Ok(out)
}

/// Builds the history for one downward-closed cut of a normalized scalar.
fn history_of_cut(
    nf: &Diagram,
    ext: &Arc<Alphabet>,
    discard: crate::alphabet::GenId,
    kept: &BTreeSet<usize>,
) -> History {
    let base = nf.alphabet();
    let mut slices: Vec<Vec<Item>> = Vec::new();
    // Aliveness of each wire in the current boundary.
    let mut alive: Vec<bool> = Vec::new();
    for (occ, slice) in nf.slices().iter().enumerate() {
        // Normal forms have one generator per slice.
        let mut row: Vec<Item> = Vec::new();
        let mut next_alive: Vec<bool> = Vec::new();
        let mut pos = 0usize;
        for item in slice {
            match item {
                Item::Wire => {
                    if alive[pos] {
                        row.push(Item::Wire);
                    }
                    next_alive.push(alive[pos]);
                    pos += 1;
                }
                Item::Gen(g) => {
                    let ar = base.arity(*g);
                    let co = base.coarity(*g);
                    let here = kept.contains(&occ);
                    if here {
                        debug_assert!(alive[pos..pos + ar].iter().all(|a| *a));
                        row.push(Item::Gen(ext.id(base.name(*g)).unwrap()));
                    } else {
                        for a in &alive[pos..pos + ar] {
                            if *a {
                                row.push(Item::Gen(discard));
                            }
                        }
                    }
                    next_alive.extend(std::iter::repeat(here).take(co));
                    pos += ar;
                }
            }
        }
        alive = next_alive;
        slices.push(row);
    }
    let inner = Diagram::new(ext.clone(), 0, slices)
        .expect("cut keeps boundaries consistent")
        .normalize();
    History {
        rest: RestDiagram {
            base: base.clone(),
            inner,
        },
        source: nf.clone(),
        kept: kept.clone(),
    }
}

/// A successful merge: the tensor of the inputs equals the embedding of
/// `merged`, witnessed by the fold trace.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Merge {
    pub merged: Diagram,
    pub folds: Vec<FoldStep>,
}

/// Merges histories by folding their tensor until some fold-reachable
/// graph lays out as a plain diagram.
pub fn merge_histories(
    histories: &[RestDiagram],
    budget_limit: usize,
) -> Result<Merge, RestrictionError> {
    let Some(first) = histories.first() else {
        return Err(RestrictionError::NotMergeable);
    };
    let mut tensor = first.clone();
    for h in &histories[1..] {
        tensor = tensor.tensor(h)?;
    }
    let graph = tensor.to_termgraph()?;
    let mut budget = Budget::new(budget_limit);
    let found = fold_search(&graph, &mut budget, |g, trace, budget| {
        if !g.is_fanout_one() {
            return Ok(None);
        }
        match g.to_diagram(budget) {
            Ok(d) => Ok(Some(Merge {
                merged: d.normalize(),
                folds: trace.to_vec(),
            })),
            Err(TermGraphError::NotPlanar) | Err(TermGraphError::FanOut { .. }) => Ok(None),
            Err(e) => Err(e),
        }
    })
    .map_err(RestrictionError::from)?;
    found.ok_or(RestrictionError::NotMergeable)
}

/// Replays a fold trace, checking each step's precondition, and confirms
/// the final graph is the term graph of `merged`'s embedding.
pub fn check_merge_trace(
    histories: &[RestDiagram],
    merge: &Merge,
) -> Result<(), RestrictionError> {
    let Some(first) = histories.first() else {
        return Err(RestrictionError::NotMergeable);
    };
    let mut tensor = first.clone();
    for h in &histories[1..] {
        tensor = tensor.tensor(h)?;
    }
    let mut graph = tensor.to_termgraph()?;
    for step in &merge.folds {
        graph = graph.fold(*step).ok_or(RestrictionError::NotMergeable)?;
    }
    let expect = RestDiagram::embed(&merge.merged)?.to_termgraph()?;
    if graph.canonical_key() == expect.canonical_key() {
        Ok(())
    } else {
        Err(RestrictionError::NotMergeable)
    }
}

/// The restriction order on scalars, decided by fold search: `d` absorbs
/// `h` when embedding `d` next to `h` folds back to `d` itself.
pub fn absorbs(d: &Diagram, h: &RestDiagram, budget_limit: usize) -> Result<bool, RestrictionError> {
    if !d.is_scalar() || !h.is_scalar() {
        return Err(RestrictionError::NotScalar);
    }
    let tensor = RestDiagram::embed(d)?.tensor(h)?;
    let graph = tensor.to_termgraph()?;
    let target = d.normalize();
    let mut budget = Budget::new(budget_limit);
    let found = fold_search(&graph, &mut budget, |g, _trace, budget| {
        if !g.is_fanout_one() {
            return Ok(None);
        }
        if g.represents(&target, budget)? {
            Ok(Some(()))
        } else {
            Ok(None)
        }
    });
    match found {
        Ok(Some(())) => Ok(true),
        Ok(None) => Ok(false),
        Err(TermGraphError::BudgetExceeded(n)) => Err(RestrictionError::BudgetExceeded(n)),
        Err(_) => Ok(false),
    }
}

/// A causal-closure witness: a tuple of histories of members whose merge
/// equals the candidate.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Witness {
    pub histories: Vec<RestDiagram>,
    pub folds: Vec<FoldStep>,
    pub merged: Diagram,
}

/// Searches tuples of prefix histories of enumerated members whose merge
/// equals `candidate`. A witness for a rejected candidate shows the
/// language is not causally closed.
pub fn causal_closure_witness(
    a: &NondetAutomaton,
    candidate: &Diagram,
    member_bound: usize,
    max_width: usize,
    tuple_size: usize,
    budget_limit: usize,
) -> Result<Option<Witness>, RestrictionError> {
    if !candidate.is_scalar() {
        return Err(RestrictionError::NotScalar);
    }
    let target = candidate.normalize();
    let histories = member_histories(a, member_bound, max_width)?;
    for tuple in tuples_up_to(histories.len(), tuple_size) {
        let hs: Vec<RestDiagram> = tuple.iter().map(|i| histories[*i].clone()).collect();
        if let Some(w) = try_merge_to(&hs, &target, budget_limit)? {
            return Ok(Some(w));
        }
    }
    Ok(None)
}

/// Every merge obtainable from tuples of member histories within the
/// bounds; the sweep behind the causal-closure harness. Members are
/// restricted to connected diagrams (tensor closure regenerates the
/// rest).
pub fn causal_closure_sweep(
    a: &NondetAutomaton,
    member_bound: usize,
    max_width: usize,
    tuple_size: usize,
    budget_limit: usize,
) -> Result<Vec<Witness>, RestrictionError> {
    let histories = member_histories(a, member_bound, max_width)?;
    let mut out = Vec::new();
    for tuple in tuples_up_to(histories.len(), tuple_size) {
        let hs: Vec<RestDiagram> = tuple.iter().map(|i| histories[*i].clone()).collect();
        match merge_histories(&hs, budget_limit) {
            Ok(m) => out.push(Witness {
                histories: hs,
                folds: m.folds,
                merged: m.merged,
            }),
            Err(RestrictionError::NotMergeable) => {}
            Err(e) => return Err(e),
        }
    }
    Ok(out)
}

/// Deduplicated prefix histories of the connected members within bounds.
fn member_histories(
    a: &NondetAutomaton,
    member_bound: usize,
    max_width: usize,
) -> Result<Vec<RestDiagram>, RestrictionError> {
    let members = a.enumerate_members_pruned(member_bound, max_width);
    let mut seen: BTreeSet<Vec<u64>> = BTreeSet::new();
    let mut out = Vec::new();
    for m in members.into_iter().filter(dag::is_connected) {
        for h in prefix_histories(&m)? {
            let key = h.rest.to_termgraph()?.canonical_key();
            if seen.insert(key) {
                out.push(h.rest);
            }
        }
    }
    Ok(out)
}

fn try_merge_to(
    hs: &[RestDiagram],
    target: &Diagram,
    budget_limit: usize,
) -> Result<Option<Witness>, RestrictionError> {
    let Some(first) = hs.first() else {
        return Ok(None);
    };
    let mut tensor = first.clone();
    for h in &hs[1..] {
        tensor = tensor.tensor(h)?;
    }
    let graph = tensor.to_termgraph()?;
    let mut budget = Budget::new(budget_limit);
    let found = fold_search(&graph, &mut budget, |g, trace, budget| {
        if !g.is_fanout_one() {
            return Ok(None);
        }
        if g.represents(target, budget)? {
            Ok(Some(trace.to_vec()))
        } else {
            Ok(None)
        }
    });
    match found {
        Ok(Some(folds)) => Ok(Some(Witness {
            histories: hs.to_vec(),
            folds,
            merged: target.clone(),
        })),
        Ok(None) => Ok(None),
        Err(TermGraphError::BudgetExceeded(n)) => Err(RestrictionError::BudgetExceeded(n)),
        Err(_) => Ok(None),
    }
}

/// Index tuples `(i_1 <= ... <= i_k)` for every `k` up to `size`.
fn tuples_up_to(n: usize, size: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut cur = Vec::new();
    fn rec(n: usize, size: usize, start: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if !cur.is_empty() {
            out.push(cur.clone());
        }
        if cur.len() == size {
            return;
        }
        for i in start..n {
            cur.push(i);
            rec(n, size, i, cur, out);
            cur.pop();
        }
    }
    rec(n, size, 0, &mut cur, &mut out);
    out
}

/// Convenience: merge with the default budget.
pub fn merge_histories_default(histories: &[RestDiagram]) -> Result<Merge, RestrictionError> {
    merge_histories(histories, DEFAULT_SEARCH_BUDGET)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus::{self, alphabets};
    use crate::determinize::DetAutomaton;

    fn bone() -> Diagram {
        let a = alphabets::bones();
        Diagram::build(&a, 0, &[&["u"], &["v"]]).unwrap()
    }

    #[test]
    fn embed_is_plain_and_round_trips() {
        let a = alphabets::bones();
        let e = RestDiagram::embed(&Diagram::empty(a)).unwrap();
        assert!(e.is_plain());
        assert_eq!(e.inner().gen_count(), 0);
        let b = RestDiagram::embed(&bone()).unwrap();
        assert!(b.is_plain());
        assert!(b.to_plain().unwrap().equivalent(&bone()).unwrap());
    }

    #[test]
    fn reserved_names_are_rejected() {
        let a = Alphabet::new(vec![("copy", 1usize, 2usize)]).unwrap();
        let d = Diagram::identity(a, 1);
        assert_eq!(
            RestDiagram::embed(&d).unwrap_err(),
            RestrictionError::ReservedName("copy".into())
        );
    }

    #[test]
    fn det_run_rest_agrees_with_det_accepts_on_embeddings() {
        let e = corpus::build("dyck").unwrap();
        let det = DetAutomaton::from_functional(&e.automaton).unwrap();
        for d in crate::enumerate::enumerate_scalars(&e.alphabet, 5, 3) {
            let r = RestDiagram::embed(&d).unwrap();
            assert_eq!(
                det_run_rest(&det, &r).unwrap(),
                det.accepts(&d).unwrap(),
                "{d:?}"
            );
        }
    }

    #[test]
    fn bones_accepts_discarded_half_bone() {
        let e = corpus::build("bones").unwrap();
        let det = DetAutomaton::from_functional(&e.automaton).unwrap();
        let ext = extended_alphabet(&e.alphabet).unwrap();
        let half = Diagram::build(&ext, 0, &[&["u"], &["discard"]]).unwrap();
        let half = RestDiagram::from_extended(e.alphabet.clone(), half).unwrap();
        assert!(det_run_rest(&det, &half).unwrap());
    }

    #[test]
    fn bone_has_three_histories() {
        let hs = prefix_histories(&bone()).unwrap();
        assert_eq!(hs.len(), 3);
        let sizes: BTreeSet<usize> = hs.iter().map(|h| h.kept.len()).collect();
        assert_eq!(sizes, BTreeSet::from([0, 1, 2]));
    }

    #[test]
    fn empty_diagram_has_one_history() {
        let a = alphabets::bones();
        let hs = prefix_histories(&Diagram::empty(a)).unwrap();
        assert_eq!(hs.len(), 1);
        assert!(hs[0].rest.inner().is_scalar());
        assert_eq!(hs[0].rest.inner().gen_count(), 0);
    }

    // The spec sheet miscounts this as 8: the downward-closed subsets of
    // one gamma below the antichain {b, b, delta} are the empty cut plus
    // the eight cuts containing gamma.
    #[test]
    fn example13_member_has_nine_histories() {
        let (b_member, _, _) = corpus::example13_members();
        let hs = prefix_histories(&b_member).unwrap();
        assert_eq!(hs.len(), 9);
    }

    #[test]
    fn histories_are_absorbed_by_their_source() {
        let (b_member, _, _) = corpus::example13_members();
        for h in prefix_histories(&b_member).unwrap() {
            assert!(absorbs(&b_member, &h.rest, DEFAULT_SEARCH_BUDGET).unwrap());
        }
        for h in prefix_histories(&bone()).unwrap() {
            assert!(absorbs(&bone(), &h.rest, DEFAULT_SEARCH_BUDGET).unwrap());
        }
    }

    #[test]
    fn absorbs_self_embedding() {
        let (b_member, _, _) = corpus::example13_members();
        let e = RestDiagram::embed(&b_member).unwrap();
        assert!(absorbs(&b_member, &e, DEFAULT_SEARCH_BUDGET).unwrap());
    }

    #[test]
    fn copy_then_discard_cancels_in_the_termgraph() {
        let a = alphabets::bones();
        let ext = extended_alphabet(&a).unwrap();
        let padded = Diagram::build(
            &ext,
            0,
            &[&["u"], &["copy"], &["discard", "-"], &["v"]],
        )
        .unwrap();
        let padded = RestDiagram::from_extended(a.clone(), padded).unwrap();
        let plain = RestDiagram::embed(&bone()).unwrap();
        assert_eq!(
            padded.to_termgraph().unwrap().canonical_key(),
            plain.to_termgraph().unwrap().canonical_key()
        );
    }

    #[test]
    fn merge_of_single_embedding_is_identity() {
        let (b_member, _, _) = corpus::example13_members();
        let e = RestDiagram::embed(&b_member).unwrap();
        let m = merge_histories_default(&[e.clone()]).unwrap();
        assert!(m.merged.equivalent(&b_member).unwrap());
        assert!(m.folds.is_empty());
        check_merge_trace(&[e], &m).unwrap();
    }

    // The two one-sided histories of example13 merge to the mixed diagram:
    // fold the gammas (copy naturality), the doubled discards vanish
    // against the kept branches (unitality), then fold the deltas.
    #[test]
    fn example13_histories_merge_to_the_mixed_diagram() {
        let a = alphabets::example13();
        let ext = extended_alphabet(&a).unwrap();
        let h1 = Diagram::build(
            &ext,
            0,
            &[&["gamma"], &["-", "b", "discard", "-"], &["delta"]],
        )
        .unwrap();
        let h2 = Diagram::build(
            &ext,
            0,
            &[&["gamma"], &["-", "discard", "c", "-"], &["delta"]],
        )
        .unwrap();
        let h1 = RestDiagram::from_extended(a.clone(), h1).unwrap();
        let h2 = RestDiagram::from_extended(a.clone(), h2).unwrap();
        let m = merge_histories_default(&[h1.clone(), h2.clone()]).unwrap();
        let (_, _, mixed) = corpus::example13_members();
        assert!(m.merged.equivalent(&mixed).unwrap());
        assert_eq!(m.folds.len(), 2);
        check_merge_trace(&[h1, h2], &m).unwrap();
    }

    #[test]
    fn double_half_bone_does_not_merge() {
        let a = alphabets::bones();
        let ext = extended_alphabet(&a).unwrap();
        let half = Diagram::build(&ext, 0, &[&["u"], &["discard"]]).unwrap();
        let half = RestDiagram::from_extended(a.clone(), half).unwrap();
        let err = merge_histories_default(&[half.clone(), half]).unwrap_err();
        assert_eq!(err, RestrictionError::NotMergeable);
    }

    #[test]
    fn mixed_member_is_not_absorbed_by_the_other_branch() {
        let a = alphabets::example13();
        let ext = extended_alphabet(&a).unwrap();
        let (b_member, _, _) = corpus::example13_members();
        let c_history = Diagram::build(
            &ext,
            0,
            &[&["gamma"], &["-", "discard", "c", "-"], &["delta"]],
        )
        .unwrap();
        let c_history = RestDiagram::from_extended(a, c_history).unwrap();
        assert!(!absorbs(&b_member, &c_history, DEFAULT_SEARCH_BUDGET).unwrap());
    }

    #[test]
    fn witnesses_for_members_and_products() {
        let e = corpus::build("bones").unwrap();
        let two = bone().tensor(&bone()).unwrap();
        let w = causal_closure_witness(&e.automaton, &two, 2, 2, 2, DEFAULT_SEARCH_BUDGET)
            .unwrap()
            .unwrap();
        assert!(w.merged.equivalent(&two).unwrap());
        assert_eq!(w.histories.len(), 2);
    }

    #[test]
    fn example13_witness_finds_the_mixed_diagram() {
        let e = corpus::build("example13").unwrap();
        let (_, _, mixed) = corpus::example13_members();
        let w = causal_closure_witness(&e.automaton, &mixed, 4, 4, 2, DEFAULT_SEARCH_BUDGET)
            .unwrap()
            .expect("mixed diagram is in the causal closure");
        assert!(!e.automaton.accepts(&mixed).unwrap());
        assert_eq!(w.histories.len(), 2);
        // The witness replays as a trace on the tensor.
        let m = Merge {
            merged: w.merged.clone().normalize(),
            folds: w.folds.clone(),
        };
        check_merge_trace(&w.histories, &m).unwrap();
    }

    use crate::alphabet::Alphabet;
}
