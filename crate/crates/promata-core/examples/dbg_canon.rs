use promata_core::corpus::alphabets;
use promata_core::diagram::Diagram;

fn main() {
    let a = alphabets::dyck();
    // Two tops into close;bot — second top above vs below the first wire.
    let above = Diagram::build(&a, 0, &[&["top"], &["top", "-"], &["close"], &["bot"]]).unwrap();
    let below = Diagram::build(&a, 0, &[&["top"], &["-", "top"], &["close"], &["bot"]]).unwrap();
    println!("above  nf: {}", above.normalize().describe());
    println!("below  nf: {}", below.normalize().describe());
    println!("eq: {:?}", above.equivalent(&below));
}
