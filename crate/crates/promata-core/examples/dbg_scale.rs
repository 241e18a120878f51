use promata_core::corpus::{self, alphabets};
use promata_core::determinize;
use promata_core::enumerate::enumerate_scalars;
use std::time::Instant;

fn main() {
    for (name, alpha, gens, width) in [
        ("dyck", alphabets::dyck(), 6usize, 6usize),
        ("bones", alphabets::bones(), 6, 6),
        ("example13", alphabets::example13(), 6, 6),
        ("example13(8,4)", alphabets::example13(), 8, 4),
        ("tiles", alphabets::tiles(), 6, 6),
    ] {
        let t = Instant::now();
        let out = enumerate_scalars(&alpha, gens, width);
        println!("{name}: {} scalars in {:?}", out.len(), t.elapsed());
    }
    for name in ["brick_wall", "xor_tiles", "sierpinski"] {
        let e = corpus::build(name).unwrap();
        let t = Instant::now();
        let r = determinize::check_convex(&e.automaton);
        println!("check_convex({name}) = {:?} in {:?}", r.is_convex(), t.elapsed());
        let t = Instant::now();
        let det = determinize::determinize_reachable(&e.automaton).unwrap();
        println!("determinize_reachable({name}): {} states in {:?}", det.states().len(), t.elapsed());
    }
    let e = corpus::build("sierpinski").unwrap();
    let t = Instant::now();
    let members = e.automaton.enumerate_members_pruned(16, 8);
    println!("sierpinski members (16,8): {} in {:?}", members.len(), t.elapsed());
    let e = corpus::build("brick_wall").unwrap();
    let t = Instant::now();
    let members = e.automaton.enumerate_members_pruned(16, 8);
    println!("brick_wall members (16,8): {} in {:?}", members.len(), t.elapsed());
}
