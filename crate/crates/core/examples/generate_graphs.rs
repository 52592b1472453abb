//! Random geometric and cycle interference graphs with their summary statistics.
use netmix::graph::{generate_cycle, generate_rgg, GraphStats, RggParams, WeightRule};
use netmix::outcome::{generate_outcome_model, GammaRule};

fn main() -> netmix::Result<()> {
    let rgg = generate_rgg(&RggParams::new(2000, 4.0, 1), 7)?;
    let model = generate_outcome_model(&rgg, 7, GammaRule::UnitAte)?;
    let stats = GraphStats::compute(&rgg, Some(&model), Some(3))?;
    println!(
        "rgg: n = {}, directed edges = {}, total weight = {:.3}, true ATE = {:.3}",
        rgg.n(),
        rgg.edge_count(),
        rgg.total_weight(),
        model.true_ate(&rgg)
    );
    println!("     {}", serde_json::to_string(&stats).unwrap());

    let cycle = generate_cycle(1000, 3, 2, WeightRule::InverseDegree, 0)?;
    println!(
        "cycle: n = {}, max degree = {}, growth constant (r <= 4) = {:.2}",
        cycle.n(),
        cycle.max_degree(),
        cycle.growth_constant(Some(4))
    );
    Ok(())
}
