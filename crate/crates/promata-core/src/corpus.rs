//! The example languages used as fixtures across the test suite.
//!
//! Each entry bundles an alphabet, a grammar, and the matching automaton,
//! together with machine-checkable pinned properties backed by oracles that
//! do not go through the frontier-run machinery: a stack balance checker
//! for the parenthesis language, a grid assembly enumerator and a
//! rule-90-style simulation for the tiling languages, direct NFA and tree
//! automaton runs for the classical encodings.
//!
//! The tiling entries share one alphabet so that their intersection is
//! literal: a bordered diamond-lattice raster with a seed corner, edge and
//! corner generators, and four interior brick generators `cNW` declaring
//! the two values they consume. `brick_wall` constrains only the raster
//! shape; `xor_tiles` makes each brick compute the XOR of its inputs with
//! all-ones borders; their intersection draws Sierpinski triangles.

use std::collections::{BTreeMap, BTreeSet};
use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::alphabet::Alphabet;
use crate::automaton::{NondetAutomaton, Word};
use crate::diagram::{Diagram, Item};
use crate::encodings::{self, ClassicalNfa, RankedAlphabet, TreeAutomaton};
use crate::grammar::{automaton_to_grammar, AlphabetMorphism, Grammar};

#[derive(Debug, Error, PartialEq, Eq)]
pub enum CorpusError {
    #[error("unknown corpus entry `{0}`")]
    UnknownEntry(String),
}

/// A corpus language: alphabet, grammar, automaton and pinned checks.
#[derive(Debug, Clone)]
pub struct CorpusEntry {
    pub name: &'static str,
    pub alphabet: Arc<Alphabet>,
    pub grammar: Grammar,
    pub automaton: NondetAutomaton,
}

pub fn names() -> &'static [&'static str] {
    &[
        "dyck",
        "bones",
        "example13",
        "example13_b",
        "example13_c",
        "brick_wall",
        "xor_tiles",
        "sierpinski",
        "nfa0",
        "nfa1",
        "nfa2",
        "bool_list",
    ]
}

pub fn build(name: &str) -> Result<CorpusEntry, CorpusError> {
    let (alphabet, automaton) = match name {
        "dyck" => dyck_automaton(),
        "bones" => bones_automaton(),
        "example13" => example13_automaton(ExampleBranches::Both),
        "example13_b" => example13_automaton(ExampleBranches::OnlyB),
        "example13_c" => example13_automaton(ExampleBranches::OnlyC),
        "brick_wall" => brick_wall_automaton(),
        "xor_tiles" => xor_tiles_automaton(),
        "sierpinski" => {
            let (a, wall) = brick_wall_automaton();
            let (_, xor) = xor_tiles_automaton();
            (a, wall.intersect(&xor).expect("same alphabet"))
        }
        "nfa0" => nfa_sample_automaton(0),
        "nfa1" => nfa_sample_automaton(1),
        "nfa2" => nfa_sample_automaton(2),
        "bool_list" => {
            let (a, aut) =
                encodings::treeaut_to_monoidal(&bool_list_tree_automaton()).unwrap();
            (a, aut)
        }
        other => return Err(CorpusError::UnknownEntry(other.to_string())),
    };
    let grammar = automaton_to_grammar(&automaton);
    let name = names().iter().find(|n| **n == name).unwrap();
    Ok(CorpusEntry {
        name,
        alphabet,
        grammar,
        automaton,
    })
}

pub mod alphabets {
    use super::*;

    /// Balanced parentheses: widths track the number of open brackets.
    pub fn dyck() -> Arc<Alphabet> {
        Alphabet::new(vec![
            ("top", 0usize, 1usize),
            ("open", 1, 2),
            ("close", 2, 1),
            ("bot", 1, 0),
        ])
        .unwrap()
    }

    pub fn bones() -> Arc<Alphabet> {
        Alphabet::new(vec![("u", 0usize, 1usize), ("v", 1, 0)]).unwrap()
    }

    pub fn example13() -> Arc<Alphabet> {
        Alphabet::new(vec![
            ("gamma", 0usize, 4usize),
            ("b", 1, 0),
            ("c", 1, 0),
            ("delta", 2, 0),
        ])
        .unwrap()
    }

    /// Example13 with `b` and `c` collapsed to a single generator.
    pub fn example13_collapsed() -> Arc<Alphabet> {
        Alphabet::new(vec![
            ("gamma", 0usize, 4usize),
            ("e", 1, 0),
            ("delta", 2, 0),
        ])
        .unwrap()
    }

    /// Shared alphabet of the tiling languages. Frame generators trace the
    /// border of a raster; interior generators `cNW` declare the values
    /// they consume from the north and west.
    pub fn tiles() -> Arc<Alphabet> {
        Alphabet::new(vec![
            ("seed", 0usize, 2usize),
            ("t", 1, 2),
            ("l", 1, 2),
            ("rt", 1, 1),
            ("lb", 1, 1),
            ("r", 2, 1),
            ("b", 2, 1),
            ("rb", 2, 0),
            ("c00", 2, 2),
            ("c01", 2, 2),
            ("c10", 2, 2),
            ("c11", 2, 2),
        ])
        .unwrap()
    }
}

fn dyck_automaton() -> (Arc<Alphabet>, NondetAutomaton) {
    let a = alphabets::dyck();
    let s = || "s".to_string();
    let aut = NondetAutomaton::new(
        a.clone(),
        vec![s()],
        BTreeMap::from([
            ("top".into(), vec![(vec![], vec![s()])]),
            ("open".into(), vec![(vec![s()], vec![s(), s()])]),
            ("close".into(), vec![(vec![s(), s()], vec![s()])]),
            ("bot".into(), vec![(vec![s()], vec![])]),
        ]),
    )
    .unwrap();
    (a, aut)
}

fn bones_automaton() -> (Arc<Alphabet>, NondetAutomaton) {
    let a = alphabets::bones();
    let s = || "s".to_string();
    let aut = NondetAutomaton::new(
        a.clone(),
        vec![s()],
        BTreeMap::from([
            ("u".into(), vec![(vec![], vec![s()])]),
            ("v".into(), vec![(vec![s()], vec![])]),
        ]),
    )
    .unwrap();
    (a, aut)
}

enum ExampleBranches {
    Both,
    OnlyB,
    OnlyC,
}

fn example13_automaton(branches: ExampleBranches) -> (Arc<Alphabet>, NondetAutomaton) {
    let a = alphabets::example13();
    let w = |names: &[&str]| -> Vec<String> { names.iter().map(|s| s.to_string()).collect() };
    let mut gamma = Vec::new();
    if matches!(branches, ExampleBranches::Both | ExampleBranches::OnlyB) {
        gamma.push((vec![], w(&["A", "B", "B", "A"])));
    }
    if matches!(branches, ExampleBranches::Both | ExampleBranches::OnlyC) {
        gamma.push((vec![], w(&["A", "C", "C", "A"])));
    }
    let aut = NondetAutomaton::new(
        a.clone(),
        w(&["A", "B", "C"]),
        BTreeMap::from([
            ("gamma".into(), gamma),
            ("b".into(), vec![(w(&["B"]), vec![])]),
            ("c".into(), vec![(w(&["C"]), vec![])]),
            ("delta".into(), vec![(w(&["A", "A"]), vec![])]),
        ]),
    )
    .unwrap();
    (a, aut)
}

/// The relabelling that merges `b` and `c` of example13 into one `e`.
pub fn example13_collapse() -> AlphabetMorphism {
    AlphabetMorphism::new(
        alphabets::example13(),
        alphabets::example13_collapsed(),
        BTreeMap::from([
            ("gamma".into(), "gamma".into()),
            ("b".into(), "e".into()),
            ("c".into(), "e".into()),
            ("delta".into(), "delta".into()),
        ]),
    )
    .unwrap()
}

/// The two connected members of example13 and the rejected mixed diagram.
pub fn example13_members() -> (Diagram, Diagram, Diagram) {
    let a = alphabets::example13();
    let b_member = Diagram::build(&a, 0, &[&["gamma"], &["-", "b", "b", "-"], &["delta"]]).unwrap();
    let c_member = Diagram::build(&a, 0, &[&["gamma"], &["-", "c", "c", "-"], &["delta"]]).unwrap();
    let mixed = Diagram::build(&a, 0, &[&["gamma"], &["-", "b", "c", "-"], &["delta"]]).unwrap();
    (b_member, c_member, mixed)
}

fn brick_wall_automaton() -> (Arc<Alphabet>, NondetAutomaton) {
    let a = alphabets::tiles();
    let w = |names: &[&str]| -> Vec<String> { names.iter().map(|s| s.to_string()).collect() };
    let brick = vec![(w(&["v", "h"]), w(&["h", "v"]))];
    let aut = NondetAutomaton::new(
        a.clone(),
        w(&["T", "L", "R", "B", "h", "v"]),
        BTreeMap::from([
            ("seed".into(), vec![(vec![], w(&["T", "L"]))]),
            ("t".into(), vec![(w(&["T"]), w(&["T", "v"]))]),
            ("l".into(), vec![(w(&["L"]), w(&["h", "L"]))]),
            ("rt".into(), vec![(w(&["T"]), w(&["R"]))]),
            ("lb".into(), vec![(w(&["L"]), w(&["B"]))]),
            ("r".into(), vec![(w(&["R", "h"]), w(&["R"]))]),
            ("b".into(), vec![(w(&["v", "B"]), w(&["B"]))]),
            ("rb".into(), vec![(w(&["R", "B"]), vec![])]),
            ("c00".into(), brick.clone()),
            ("c01".into(), brick.clone()),
            ("c10".into(), brick.clone()),
            ("c11".into(), brick),
        ]),
    )
    .unwrap();
    (a, aut)
}

fn xor_tiles_automaton() -> (Arc<Alphabet>, NondetAutomaton) {
    let a = alphabets::tiles();
    let bit = |x: bool| if x { "1".to_string() } else { "0".to_string() };
    let mut table: BTreeMap<String, Vec<(Vec<String>, Vec<String>)>> = BTreeMap::new();
    table.insert("seed".into(), vec![(vec![], vec![bit(true), bit(true)])]);
    table.insert(
        "t".into(),
        vec![(vec![bit(true)], vec![bit(true), bit(true)])],
    );
    table.insert(
        "l".into(),
        vec![(vec![bit(true)], vec![bit(true), bit(true)])],
    );
    table.insert("rt".into(), vec![(vec![bit(true)], vec![bit(true)])]);
    let mut lb = Vec::new();
    let mut r = Vec::new();
    let mut b = Vec::new();
    let mut rb = Vec::new();
    for x in [false, true] {
        lb.push((vec![bit(x)], vec![bit(x)]));
        for y in [false, true] {
            r.push((vec![bit(x), bit(y)], vec![bit(x ^ y)]));
            b.push((vec![bit(x), bit(y)], vec![bit(x ^ y)]));
            rb.push((vec![bit(x), bit(y)], vec![]));
            let tile = format!("c{}{}", u8::from(x), u8::from(y));
            let v = bit(x ^ y);
            table.insert(tile, vec![(vec![bit(x), bit(y)], vec![v.clone(), v])]);
        }
    }
    table.insert("lb".into(), lb);
    table.insert("r".into(), r);
    table.insert("b".into(), b);
    table.insert("rb".into(), rb);
    let aut = NondetAutomaton::new(a.clone(), vec!["0".into(), "1".into()], table).unwrap();
    (a, aut)
}

/// Cells of an `m` by `n` raster in anti-diagonal order, rows ascending
/// within a diagonal. This is the unique order in which a raster diagram
/// slices: every wavefront wire is consumed by the next diagonal.
pub fn wall_cells(m: usize, n: usize) -> Vec<(usize, usize)> {
    let mut cells = Vec::with_capacity(m * n);
    for d in 0..(m + n - 1) {
        let lo = d.saturating_sub(n - 1);
        for r in lo..=d.min(m - 1) {
            cells.push((r, d - r));
        }
    }
    cells
}

/// Generator at a raster position; `None` means interior.
fn frame_gen(m: usize, n: usize, r: usize, c: usize) -> Option<&'static str> {
    let last_r = m - 1;
    let last_c = n - 1;
    match (r, c) {
        (0, 0) => Some("seed"),
        (0, c) if c == last_c => Some("rt"),
        (0, _) => Some("t"),
        (r, 0) if r == last_r => Some("lb"),
        (_, 0) => Some("l"),
        (r, c) if r == last_r && c == last_c => Some("rb"),
        (r, _) if r == last_r => Some("b"),
        (_, c) if c == last_c => Some("r"),
        _ => None,
    }
}

/// Builds the raster diagram for an `m` by `n` wall (`m, n >= 2`), with
/// interior tiles chosen by `tile(i, j)` over interior coordinates.
pub fn wall_diagram(
    alphabet: &Arc<Alphabet>,
    m: usize,
    n: usize,
    tile: &dyn Fn(usize, usize) -> String,
) -> Diagram {
    assert!(m >= 2 && n >= 2);
    let mut slices: Vec<Vec<Item>> = Vec::new();
    let mut current = 0usize;
    let mut slice: Vec<Item> = Vec::new();
    for (r, c) in wall_cells(m, n) {
        if r + c != current {
            slices.push(std::mem::take(&mut slice));
            current = r + c;
        }
        let name = match frame_gen(m, n, r, c) {
            Some(g) => g.to_string(),
            None => tile(r - 1, c - 1),
        };
        slice.push(Item::Gen(alphabet.id(&name).unwrap()));
    }
    slices.push(slice);
    Diagram::new(alphabet.clone(), 0, slices).expect("raster slices chain")
}

/// The `(north, west)` input values feeding each interior cell of the
/// unique valued raster with all-ones borders; rule-90-style simulation,
/// independent of any automaton run.
pub fn sierpinski_inputs(m: usize, n: usize) -> Vec<Vec<(bool, bool)>> {
    let rows = m - 2;
    let cols = n - 2;
    let mut value = vec![vec![false; cols]; rows];
    let mut inputs = vec![vec![(false, false); cols]; rows];
    for i in 0..rows {
        for j in 0..cols {
            let nv = if i == 0 { true } else { value[i - 1][j] };
            let wv = if j == 0 { true } else { value[i][j - 1] };
            inputs[i][j] = (nv, wv);
            value[i][j] = nv ^ wv;
        }
    }
    inputs
}

pub fn tile_name(north: bool, west: bool) -> String {
    format!("c{}{}", u8::from(north), u8::from(west))
}

/// All interior colorings of the `m` by `n` raster whose diagram the
/// automaton accepts, found by assembling cells in wavefront order and
/// pruning dead frontiers. Sound and complete: a prefix of an accepted
/// diagram always has a live frontier.
pub fn accepted_colorings(
    aut: &NondetAutomaton,
    m: usize,
    n: usize,
) -> Vec<Vec<Vec<(bool, bool)>>> {
    assert!(m >= 2 && n >= 2);
    let cells = wall_cells(m, n);
    // Boundary wires are tagged by producing cell; each cell's inputs are
    // located by tag, which also checks the wavefront adjacency.
    #[derive(Clone, PartialEq)]
    enum Tag {
        East(usize, usize),
        South(usize, usize),
    }
    struct Search<'a> {
        aut: &'a NondetAutomaton,
        m: usize,
        n: usize,
        cells: &'a [(usize, usize)],
        results: Vec<Vec<Vec<(bool, bool)>>>,
    }
    impl Search<'_> {
        fn go(
            &mut self,
            idx: usize,
            boundary: &[Tag],
            frontier: &BTreeSet<Word>,
            coloring: &mut Vec<Vec<(bool, bool)>>,
        ) {
            if frontier.is_empty() {
                return;
            }
            if idx == self.cells.len() {
                debug_assert!(boundary.is_empty());
                self.results.push(coloring.clone());
                return;
            }
            let (r, c) = self.cells[idx];
            let choices: Vec<String> = match frame_gen(self.m, self.n, r, c) {
                Some(g) => vec![g.to_string()],
                None => vec![
                    tile_name(false, false),
                    tile_name(false, true),
                    tile_name(true, false),
                    tile_name(true, true),
                ],
            };
            // Locate the cell's consumed block in the tagged boundary.
            let wants: Vec<Tag> = [
                (r > 0).then(|| Tag::South(r - 1, c)),
                (c > 0).then(|| Tag::East(r, c - 1)),
            ]
            .into_iter()
            .flatten()
            .collect();
            let offset = match wants.first() {
                None => 0,
                Some(first) => boundary.iter().position(|t| t == first).unwrap(),
            };
            for (k, want) in wants.iter().enumerate() {
                assert!(boundary[offset + k] == *want, "wavefront adjacency");
            }
            let produces: Vec<Tag> = [
                (c + 1 < self.n).then_some(Tag::East(r, c)),
                (r + 1 < self.m).then_some(Tag::South(r, c)),
            ]
            .into_iter()
            .flatten()
            .collect();
            let mut next_boundary = boundary.to_vec();
            next_boundary.splice(offset..offset + wants.len(), produces);
            for name in choices {
                let gen = self.aut.alphabet().id(&name).unwrap();
                let mut slice = vec![Item::Wire; offset];
                slice.push(Item::Gen(gen));
                slice.extend(vec![Item::Wire; boundary.len() - offset - wants.len()]);
                let next = self.aut.advance_frontier(frontier, &slice);
                let tile = name
                    .strip_prefix('c')
                    .filter(|s| s.len() == 2)
                    .map(|s| (s.as_bytes()[0] == b'1', s.as_bytes()[1] == b'1'));
                if let Some(t) = tile {
                    coloring[r - 1][c - 1] = t;
                }
                self.go(idx + 1, &next_boundary, &next, coloring);
            }
        }
    }
    let mut search = Search {
        aut,
        m,
        n,
        cells: &cells,
        results: Vec::new(),
    };
    let mut coloring = vec![vec![(false, false); n - 2]; m - 2];
    search.go(0, &[], &BTreeSet::from([Vec::new()]), &mut coloring);
    search.results
}

/// A parsed raster: dimensions plus interior tile declarations.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ParsedWall {
    pub m: usize,
    pub n: usize,
    pub tiles: Vec<Vec<(bool, bool)>>,
}

/// Reconstructs the grid structure of a connected raster diagram, or
/// `None` when the diagram is not a single well-formed raster. This walks
/// the dataflow graph directly and is the structural oracle for the wall
/// languages.
pub fn parse_wall(d: &Diagram) -> Option<ParsedWall> {
    let alphabet = d.alphabet().clone();
    let dag = crate::dag::dataflow_dag(d);
    let name = |occ: usize| alphabet.name(dag.occurrences[occ].gen).to_string();
    let consumer_of = |occ: usize, port: usize| -> Option<usize> {
        let wire = *dag.occurrences[occ].outputs.get(port)?;
        match dag.wires[wire].consumer {
            crate::dag::Port::Occ(o, _) => Some(o),
            _ => None,
        }
    };
    let seeds: Vec<usize> = (0..dag.occurrences.len())
        .filter(|o| name(*o) == "seed")
        .collect();
    let [seed] = seeds.as_slice() else {
        return None;
    };
    // East chains give the column count, south chains the row count.
    let mut n = 1;
    let mut cur = *seed;
    loop {
        let next = consumer_of(cur, 0)?;
        n += 1;
        match name(next).as_str() {
            "t" => cur = next,
            "rt" => break,
            _ => return None,
        }
    }
    let mut m = 1;
    let mut cur = *seed;
    loop {
        let port = if cur == *seed { 1 } else { usize::from(name(cur) == "l") };
        let next = consumer_of(cur, port)?;
        m += 1;
        match name(next).as_str() {
            "l" => cur = next,
            "lb" => break,
            _ => return None,
        }
    }
    if m * n != dag.occurrences.len() {
        return None;
    }
    // Fill the grid row by row from the south ports of the row above.
    let mut grid: Vec<Vec<usize>> = vec![vec![usize::MAX; n]; m];
    grid[0][0] = *seed;
    for c in 1..n {
        grid[0][c] = consumer_of(grid[0][c - 1], 0)?;
    }
    for r in 1..m {
        for c in 0..n {
            let above = grid[r - 1][c];
            // South port: 1 on two-output cells, 0 on S-only cells.
            let s_port = match name(above).as_str() {
                "seed" | "t" | "l" | "c00" | "c01" | "c10" | "c11" => 1,
                "rt" | "r" => 0,
                _ => return None,
            };
            grid[r][c] = consumer_of(above, s_port)?;
        }
    }
    // Verify shapes and west links, then read off the interior tiles.
    let mut tiles = vec![vec![(false, false); n.saturating_sub(2)]; m.saturating_sub(2)];
    for r in 0..m {
        for c in 0..n {
            let occ = grid[r][c];
            if occ == usize::MAX {
                return None;
            }
            let got = name(occ);
            match frame_gen(m, n, r, c) {
                Some(expect) => {
                    if got != expect {
                        return None;
                    }
                }
                None => {
                    let bits = got.strip_prefix('c')?;
                    if bits.len() != 2 {
                        return None;
                    }
                    tiles[r - 1][c - 1] =
                        (bits.as_bytes()[0] == b'1', bits.as_bytes()[1] == b'1');
                }
            }
            if c > 0 {
                // The west neighbour's east output must feed this cell.
                let west = grid[r][c - 1];
                let e_port = 0;
                if name(west) == "rt" || name(west) == "r" || name(west) == "rb" {
                    return None;
                }
                if consumer_of(west, e_port)? != occ {
                    return None;
                }
            }
        }
    }
    Some(ParsedWall { m, n, tiles })
}

/// Direct grid-tiling enumerator: every assignment of interior tiles that
/// satisfies the local attachment rule of the wall language (which admits
/// all four bricks everywhere). Independent of the automaton machinery.
pub fn wall_assemblies(m: usize, n: usize) -> Vec<Vec<Vec<(bool, bool)>>> {
    let cells = (m - 2) * (n - 2);
    let mut out = Vec::new();
    for mask in 0..(1u64 << (2 * cells)) {
        let mut grid = vec![vec![(false, false); n - 2]; m - 2];
        for k in 0..cells {
            let bits = (mask >> (2 * k)) & 3;
            grid[k / (n - 2)][k % (n - 2)] = (bits & 1 != 0, bits & 2 != 0);
        }
        out.push(grid);
    }
    out
}

fn nfa_sample(idx: usize) -> ClassicalNfa {
    let seeds = [101u64, 202, 303];
    let mut rng = ChaCha8Rng::seed_from_u64(seeds[idx]);
    let n_states = rng.gen_range(2..=4usize);
    let states: Vec<String> = (0..n_states).map(|i| format!("q{i}")).collect();
    let letters = vec!["x".to_string(), "y".to_string()];
    let mut transitions = BTreeSet::new();
    for q in &states {
        for a in &letters {
            for q2 in &states {
                if rng.gen_bool(0.4) {
                    transitions.insert((q.clone(), a.clone(), q2.clone()));
                }
            }
        }
    }
    let mut finals: BTreeSet<String> = states
        .iter()
        .filter(|_| rng.gen_bool(0.5))
        .cloned()
        .collect();
    if finals.is_empty() {
        finals.insert(states[n_states - 1].clone());
    }
    ClassicalNfa {
        states: states.clone(),
        letters,
        transitions,
        initials: BTreeSet::from([states[0].clone()]),
        finals,
    }
}

/// The three fixed seeded NFA samples behind the `nfa*` corpus entries.
pub fn nfa_samples() -> Vec<ClassicalNfa> {
    (0..3).map(nfa_sample).collect()
}

fn nfa_sample_automaton(idx: usize) -> (Arc<Alphabet>, NondetAutomaton) {
    encodings::nfa_to_monoidal(&nfa_sample(idx)).unwrap()
}

/// Bottom-up tree automaton for lists of booleans: `t`/`f` make a `Bool`,
/// `nil` an empty `List`, `cons` puts a `Bool` onto a `List`.
pub fn bool_list_tree_automaton() -> TreeAutomaton {
    TreeAutomaton::BottomUp {
        states: vec!["Bool".into(), "List".into()],
        ranks: RankedAlphabet {
            ranks: BTreeMap::from([
                ("t".into(), 0),
                ("f".into(), 0),
                ("nil".into(), 0),
                ("cons".into(), 2),
            ]),
        },
        transitions: BTreeSet::from([
            ("t".into(), vec![], "Bool".into()),
            ("f".into(), vec![], "Bool".into()),
            ("nil".into(), vec![], "List".into()),
            (
                "cons".into(),
                vec!["Bool".into(), "List".into()],
                "List".into(),
            ),
        ]),
        finals: BTreeSet::from(["List".into()]),
    }
}

impl CorpusEntry {
    /// Runs the entry's pinned assertions, each backed by an oracle that
    /// bypasses the frontier machinery. Returns `(name, passed)` pairs.
    /// Heavier variants of these pins run in the acceptance suite.
    pub fn check_properties(&self) -> Vec<(String, bool)> {
        let mut out: Vec<(String, bool)> = Vec::new();
        let mut check = |name: &str, pass: bool| out.push((name.to_string(), pass));
        match self.name {
            "dyck" => {
                check("functional", self.automaton.is_functional());
                let members = self.automaton.enumerate_members_pruned(5, 3);
                check(
                    "readouts-balanced",
                    members
                        .iter()
                        .all(|d| oracle::balanced(&oracle::dyck_readout(d))),
                );
                let realized = (0..=6usize).step_by(2).all(|len| {
                    oracle::balanced_words(len).into_iter().all(|w| {
                        let d = oracle::dyck_word_diagram(&self.alphabet, &w);
                        oracle::dyck_readout(&d) == w && self.automaton.accepts(&d).unwrap()
                    })
                });
                check("balanced-words-realized", realized);
            }
            "bones" => {
                let members = self.automaton.enumerate_members(6, 3);
                check("members-are-bone-powers", members.len() == 4);
                check(
                    "sizes",
                    members
                        .iter()
                        .enumerate()
                        .all(|(k, d)| d.gen_count() == 2 * k),
                );
            }
            "example13" => {
                let gamma = self.alphabet.id("gamma").unwrap();
                let rel = self.automaton.relation(gamma);
                let outs: Vec<Vec<&str>> = rel
                    .pairs
                    .iter()
                    .map(|(_, o)| {
                        o.iter()
                            .map(|q| self.automaton.states()[*q].as_str())
                            .collect()
                    })
                    .collect();
                check(
                    "gamma-image",
                    outs == vec![vec!["A", "B", "B", "A"], vec!["A", "C", "C", "A"]],
                );
                let members = self.automaton.enumerate_members_pruned(8, 4);
                let connected: Vec<_> =
                    members.into_iter().filter(crate::dag::is_connected).collect();
                check("two-connected-members", connected.len() == 2);
                let report = crate::determinize::check_convex(&self.automaton);
                check(
                    "non-convex-at-gamma",
                    matches!(
                        &report,
                        crate::determinize::ConvexityReport::NonConvex { gen, inputs, missing }
                            if gen == "gamma" && inputs.is_empty()
                                && *missing == vec!["A", "B", "C", "A"]
                    ),
                );
                let (_, _, mixed) = example13_members();
                let witness = crate::restriction::causal_closure_witness(
                    &self.automaton,
                    &mixed,
                    4,
                    4,
                    2,
                    crate::termgraph::DEFAULT_SEARCH_BUDGET,
                )
                .unwrap();
                check(
                    "not-causally-closed",
                    witness.is_some() && !self.automaton.accepts(&mixed).unwrap(),
                );
            }
            "example13_b" | "example13_c" => {
                let members = self.automaton.enumerate_members_pruned(8, 4);
                let connected: Vec<_> =
                    members.into_iter().filter(crate::dag::is_connected).collect();
                check("one-connected-member", connected.len() == 1);
            }
            "brick_wall" => {
                check("functional", self.automaton.is_functional());
                for (m, n) in [(2usize, 2usize), (2, 3), (3, 3), (3, 4)] {
                    let accepted: BTreeSet<_> =
                        accepted_colorings(&self.automaton, m, n).into_iter().collect();
                    let assemblies: BTreeSet<_> = wall_assemblies(m, n).into_iter().collect();
                    check(&format!("count-{m}x{n}"), accepted == assemblies);
                }
            }
            "xor_tiles" => {
                check("functional", self.automaton.is_functional());
                check(
                    "convex",
                    crate::determinize::check_convex(&self.automaton).is_convex(),
                );
            }
            "sierpinski" => {
                check("functional", self.automaton.is_functional());
                for m in 2..=4usize {
                    for n in 2..=4usize {
                        let accepted = accepted_colorings(&self.automaton, m, n);
                        check(
                            &format!("ca-{m}x{n}"),
                            accepted == vec![sierpinski_inputs(m, n)],
                        );
                    }
                }
            }
            "nfa0" | "nfa1" | "nfa2" => {
                let idx: usize = self.name[3..].parse().unwrap();
                let nfa = nfa_sample(idx);
                let ok = all_short_words(&nfa.letters, 5).into_iter().all(|w| {
                    let refs: Vec<&str> = w.iter().map(|s| s.as_str()).collect();
                    let d = encodings::word_to_diagram(&self.alphabet, &refs).unwrap();
                    self.automaton.accepts(&d).unwrap() == nfa.accepts_word(&refs)
                });
                check("agrees-with-simulation", ok);
            }
            "bool_list" => {
                let t = bool_list_tree_automaton();
                let TreeAutomaton::BottomUp { ref ranks, .. } = t else {
                    unreachable!()
                };
                let ok = encodings::enumerate_trees(ranks, 5).into_iter().all(|tree| {
                    let d = encodings::tree_to_diagram(&self.alphabet, &tree, false).unwrap();
                    self.automaton.accepts(&d).unwrap() == t.bu_accepts(&tree)
                });
                check("agrees-with-tree-runs", ok);
            }
            _ => {}
        }
        check(
            "accepts-empty-diagram",
            self.automaton
                .accepts(&Diagram::empty(self.alphabet.clone()))
                .unwrap(),
        );
        out
    }
}

/// All words over the letters up to the given length, shortest first.
pub fn all_short_words(letters: &[String], max_len: usize) -> Vec<Vec<String>> {
    let mut out = vec![vec![]];
    let mut layer: Vec<Vec<String>> = vec![vec![]];
    for _ in 0..max_len {
        let mut next = Vec::new();
        for w in &layer {
            for l in letters {
                let mut w2 = w.clone();
                w2.push(l.clone());
                next.push(w2);
            }
        }
        out.extend(next.iter().cloned());
        layer = next;
    }
    out
}

pub mod oracle {
    //! Oracles that avoid the frontier-run machinery.

    use super::*;

    /// Reads a Dyck-alphabet diagram as a bracket word, slice order:
    /// width-raising generators open, width-lowering ones close.
    pub fn dyck_readout(d: &Diagram) -> String {
        let alphabet = d.alphabet();
        let mut out = String::new();
        for slice in d.slices() {
            for item in slice {
                if let Item::Gen(g) = item {
                    match alphabet.name(*g) {
                        "top" | "open" => out.push('('),
                        "close" | "bot" => out.push(')'),
                        other => panic!("not a dyck generator: {other}"),
                    }
                }
            }
        }
        out
    }

    /// Stack-counter balance check.
    pub fn balanced(word: &str) -> bool {
        let mut depth = 0i64;
        for ch in word.chars() {
            match ch {
                '(' => depth += 1,
                ')' => depth -= 1,
                _ => return false,
            }
            if depth < 0 {
                return false;
            }
        }
        depth == 0
    }

    /// All balanced bracket words of the given length.
    pub fn balanced_words(len: usize) -> Vec<String> {
        fn rec(out: &mut Vec<String>, cur: &mut String, open: usize, depth: usize, len: usize) {
            if cur.len() == len {
                if depth == 0 {
                    out.push(cur.clone());
                }
                return;
            }
            if open < len / 2 {
                cur.push('(');
                rec(out, cur, open + 1, depth + 1, len);
                cur.pop();
            }
            if depth > 0 {
                cur.push(')');
                rec(out, cur, open, depth - 1, len);
                cur.pop();
            }
        }
        let mut out = Vec::new();
        if len % 2 == 0 {
            rec(&mut out, &mut String::new(), 0, 0, len);
        }
        out
    }

    /// Builds a member whose readout is exactly the given balanced word,
    /// bracketing always at the rightmost wires.
    pub fn dyck_word_diagram(alphabet: &Arc<Alphabet>, word: &str) -> Diagram {
        assert!(balanced(word));
        let mut slices: Vec<Vec<Item>> = Vec::new();
        let mut width = 0usize;
        for ch in word.chars() {
            let (name, offset) = match ch {
                '(' if width == 0 => ("top", 0),
                '(' => ("open", width - 1),
                ')' if width == 1 => ("bot", 0),
                ')' => ("close", width - 2),
                _ => unreachable!(),
            };
            let gen = alphabet.id(name).unwrap();
            let ar = alphabet.arity(gen);
            let mut slice = vec![Item::Wire; offset];
            slice.push(Item::Gen(gen));
            slice.extend(vec![Item::Wire; width - offset - ar]);
            width = width - ar + alphabet.coarity(gen);
            slices.push(slice);
        }
        Diagram::new(alphabet.clone(), 0, slices).expect("balanced construction chains")
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dag;
    use crate::determinize;

    #[test]
    fn unknown_entry_errors() {
        assert_eq!(
            build("nope").unwrap_err(),
            CorpusError::UnknownEntry("nope".into())
        );
    }

    #[test]
    fn all_entries_build_and_validate() {
        for name in names() {
            let e = build(name).unwrap();
            e.grammar.validate().unwrap();
            assert_eq!(e.grammar.to_automaton(), e.automaton, "{name}");
        }
    }

    #[test]
    fn dyck_members_have_balanced_readouts() {
        let e = build("dyck").unwrap();
        for d in e.automaton.enumerate_members_pruned(5, 3) {
            assert!(oracle::balanced(&oracle::dyck_readout(&d)), "{d:?}");
        }
    }

    #[test]
    fn balanced_words_are_realized() {
        let e = build("dyck").unwrap();
        for len in [0usize, 2, 4, 6] {
            for word in oracle::balanced_words(len) {
                let d = oracle::dyck_word_diagram(&e.alphabet, &word);
                assert_eq!(oracle::dyck_readout(&d), word);
                assert!(e.automaton.accepts(&d).unwrap());
            }
        }
    }

    #[test]
    fn example13_has_exactly_two_connected_members() {
        let e = build("example13").unwrap();
        let members = e.automaton.enumerate_members_pruned(8, 4);
        let connected: Vec<_> = members.into_iter().filter(dag::is_connected).collect();
        assert_eq!(connected.len(), 2);
        let (b_member, c_member, mixed) = example13_members();
        assert!(connected[0].equivalent(&b_member).unwrap());
        assert!(connected[1].equivalent(&c_member).unwrap());
        assert!(!e.automaton.accepts(&mixed).unwrap());
    }

    #[test]
    fn bones_members_are_tensor_powers() {
        let e = build("bones").unwrap();
        let members = e.automaton.enumerate_members(6, 3);
        assert_eq!(members.len(), 4);
        for (k, d) in members.iter().enumerate() {
            assert_eq!(d.gen_count(), 2 * k);
        }
    }

    #[test]
    fn smallest_wall_is_accepted() {
        let e = build("brick_wall").unwrap();
        let d = wall_diagram(&e.alphabet, 2, 2, &|_, _| unreachable!());
        assert!(e.automaton.accepts(&d).unwrap());
        assert!(dag::is_connected(&d));
        let parsed = parse_wall(&d).unwrap();
        assert_eq!((parsed.m, parsed.n), (2, 2));
    }

    #[test]
    fn walls_of_all_sizes_are_accepted_with_any_tiles() {
        let e = build("brick_wall").unwrap();
        for m in 2..=4 {
            for n in 2..=4 {
                let d = wall_diagram(&e.alphabet, m, n, &|i, j| {
                    tile_name((i + j) % 2 == 0, j % 2 == 0)
                });
                assert!(e.automaton.accepts(&d).unwrap(), "{m}x{n}");
                let parsed = parse_wall(&d).unwrap();
                assert_eq!((parsed.m, parsed.n), (m, n));
            }
        }
    }

    #[test]
    fn wall_counts_match_the_tiling_enumerator() {
        let e = build("brick_wall").unwrap();
        for (m, n) in [(2usize, 2usize), (2, 3), (3, 2), (3, 3), (3, 4)] {
            let accepted = accepted_colorings(&e.automaton, m, n);
            let assemblies = wall_assemblies(m, n);
            assert_eq!(accepted.len(), assemblies.len(), "{m}x{n}");
            let a: BTreeSet<_> = accepted.into_iter().collect();
            let b: BTreeSet<_> = assemblies.into_iter().collect();
            assert_eq!(a, b, "{m}x{n}");
        }
    }

    #[test]
    fn sierpinski_accepts_exactly_the_ca_coloring() {
        let e = build("sierpinski").unwrap();
        for m in 2..=5 {
            for n in 2..=5 {
                let accepted = accepted_colorings(&e.automaton, m, n);
                assert_eq!(accepted, vec![sierpinski_inputs(m, n)], "{m}x{n}");
            }
        }
    }

    #[test]
    fn sierpinski_rejects_any_flipped_tile() {
        let e = build("sierpinski").unwrap();
        let (m, n) = (5, 5);
        let good = sierpinski_inputs(m, n);
        let d = wall_diagram(&e.alphabet, m, n, &|i, j| {
            tile_name(good[i][j].0, good[i][j].1)
        });
        assert!(e.automaton.accepts(&d).unwrap());
        for fi in 0..(m - 2) {
            for fj in 0..(n - 2) {
                let flipped = wall_diagram(&e.alphabet, m, n, &|i, j| {
                    let (a, b) = good[i][j];
                    if (i, j) == (fi, fj) {
                        tile_name(!a, b)
                    } else {
                        tile_name(a, b)
                    }
                });
                assert!(!e.automaton.accepts(&flipped).unwrap(), "flip {fi},{fj}");
            }
        }
    }

    #[test]
    fn sierpinski_is_the_intersection() {
        let wall = build("brick_wall").unwrap();
        let xor = build("xor_tiles").unwrap();
        let both = build("sierpinski").unwrap();
        let d = wall_diagram(&wall.alphabet, 3, 3, &|_, _| tile_name(true, true));
        assert!(wall.automaton.accepts(&d).unwrap());
        assert!(xor.automaton.accepts(&d).unwrap());
        assert!(both.automaton.accepts(&d).unwrap());
        let bad = wall_diagram(&wall.alphabet, 3, 3, &|_, _| tile_name(false, true));
        assert!(wall.automaton.accepts(&bad).unwrap());
        assert!(!xor.automaton.accepts(&bad).unwrap());
        assert!(!both.automaton.accepts(&bad).unwrap());
    }

    #[test]
    fn tiling_automata_are_functional_and_convex() {
        for name in ["brick_wall", "xor_tiles", "sierpinski"] {
            let e = build(name).unwrap();
            assert!(e.automaton.is_functional(), "{name}");
            assert!(determinize::check_convex(&e.automaton).is_convex(), "{name}");
        }
    }

    #[test]
    fn every_entry_passes_its_pinned_properties() {
        for name in names() {
            let e = build(name).unwrap();
            for (prop, ok) in e.check_properties() {
                assert!(ok, "{name}: {prop}");
            }
        }
    }

    #[test]
    fn nfa_samples_are_fixed() {
        let samples = nfa_samples();
        assert_eq!(samples.len(), 3);
        // Seeded generation is stable; pin the shapes.
        let sizes: Vec<usize> = samples.iter().map(|n| n.states.len()).collect();
        assert!(sizes.iter().all(|s| (2..=4).contains(s)));
        for s in &samples {
            assert!(!s.finals.is_empty());
            assert_eq!(s.initials.len(), 1);
        }
    }
}
