//! A random clustering law whose estimator multiplier does not depend on the weights.
use netmix::clustering::{sample_clustering, weight_invariant_law_default};
use netmix::graph::{generate_rgg, RggParams};

fn main() -> netmix::Result<()> {
    let graph = generate_rgg(&RggParams::new(500, 4.0, 0), 3)?;
    let law = weight_invariant_law_default(&graph)?;
    println!(
        "lambda* = {:.4}, each edge joins a cluster with probability {:.4} ({} power iterations)",
        law.lambda_star(),
        law.coclustering_probability(),
        law.iterations()
    );
    for seed in 0..3 {
        let c = sample_clustering(&law, seed);
        println!("draw {seed}: {} clusters, largest {}", c.len(), c.max_cluster_size());
    }
    Ok(())
}
