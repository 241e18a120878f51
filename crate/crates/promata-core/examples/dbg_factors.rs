use promata_core::corpus::alphabets;
use promata_core::diagram::Diagram;
use promata_core::dag;

fn main() {
    let a = alphabets::dyck();
    let paren = Diagram::build(&a, 0, &[&["top"], &["open"], &["close"], &["bot"]]).unwrap();
    let bone = Diagram::build(&a, 0, &[&["top"], &["bot"]]).unwrap();
    let d = paren.tensor(&bone).unwrap().tensor(&paren).unwrap();
    println!("d  = {}", d.describe());
    println!("nf = {}", d.normalize().describe());
    let dag = dag::dataflow_dag(&d);
    println!("components: {:?}", dag.components());
    let comps = dag::connected_components(&d).unwrap();
    for c in &comps {
        println!("factor: {}", c.describe());
    }
}
