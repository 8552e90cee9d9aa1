//! Exact maximum-weight clique and the top of the clique ranking.
use qdock::ligraph::BindingInteractionGraph;
use qdock::oracle;

fn main() -> qdock::Result<()> {
    let path = concat!(env!("CARGO_MANIFEST_DIR"), "/examples/data/eight_vertex.json");
    let big = BindingInteractionGraph::from_json(&std::fs::read_to_string(path).unwrap())?;
    let sol = oracle::max_weight_clique(&big)?;
    println!("best {:?} weight {:.4} unique {}", sol.vertices, sol.total_weight, sol.is_unique_max);
    if let Some(r) = sol.runner_up_weight {
        println!("runner-up {r:.4}");
    }
    let bnb = oracle::max_weight_clique_bnb(&big)?;
    assert_eq!(bnb.vertices, sol.vertices);
    for c in oracle::enumerate_cliques(&big, 2, true)?.iter().take(5) {
        println!("  {:.4} {:?}", c.weight, c.vertices);
    }
    Ok(())
}
