//! Edge decomposition into matchings and an exact maximum-weight matching.
use netmix::graph::{generate_rgg, RggParams, WeightRule};
use netmix::matching::{decompose_into_matchings, max_weight_matching};

fn main() -> netmix::Result<()> {
    let mut params = RggParams::new(300, 5.0, 0);
    params.weights = WeightRule::Uniform { low: 0.0, high: 1.0 };
    let graph = generate_rgg(&params, 11)?;
    let layers = decompose_into_matchings(&graph);
    let best = max_weight_matching(&graph);
    println!(
        "max degree {}, {} matching layers, heaviest layer {:.3}",
        graph.max_degree(),
        layers.layers.len(),
        layers.max_layer_weight(&graph)
    );
    println!(
        "maximum-weight matching: {} pairs, weight {:.3} (exact: {}), floor {:.3}",
        best.pairs.len(),
        best.weight,
        best.exact,
        graph.total_weight() / (2 * graph.max_degree()) as f64
    );
    Ok(())
}
