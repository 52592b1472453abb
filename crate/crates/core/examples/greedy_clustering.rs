//! Greedy clustering of a geometric graph and the variance bounds it implies.
use netmix::bounds::bound_mixed;
use netmix::clustering::{greedy_clustering, Clustering, PartitionStats};
use netmix::graph::{generate_rgg, RggParams};
use netmix::outcome::{generate_outcome_model, outcome_bounds, GammaRule};

fn main() -> netmix::Result<()> {
    let graph = generate_rgg(&RggParams::new(1000, 4.0, 0), 1)?;
    let model = generate_outcome_model(&graph, 1, GammaRule::UnitAte)?;
    let (y_l, y_m) = outcome_bounds(&graph, &model)?;
    let p = 0.5;

    let greedy = greedy_clustering(&graph, p, y_l.max(0.0), y_m)?;
    let whole = Clustering::whole(graph.n());
    for (name, c) in [("greedy", &greedy), ("one cluster", &whole)] {
        let s = PartitionStats::compute(&graph, c)?;
        let b = bound_mixed(&s, p, y_l.max(0.0), y_m, model.gamma * model.gamma, 0.0, graph.n())?;
        println!(
            "{name:>12}: {} clusters, largest {}, eta = {:.4}, delta = {:+.2e}, rho = {:.3}, bound in [{:.3}, {:.3}]",
            c.len(),
            s.max_cluster_size,
            s.eta,
            s.delta,
            s.rho,
            b.lower,
            b.upper
        );
    }
    Ok(())
}
