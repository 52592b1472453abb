//! Variance of the mixed estimator as the network grows.
use netmix::simulation::{scaling_study_seeds, DesignSpec, GraphSpec, SimulationConfig};

fn main() -> netmix::Result<()> {
    let mut cfg = SimulationConfig::new(GraphSpec::rgg(500, 4.0, 0, 0), DesignSpec::FixedGreedy, 1000, 5);
    cfg.bounds.y_m = Some(6.0);
    let table = scaling_study_seeds(&cfg, &[500, 1000, 2000, 4000], &[0, 1, 2])?;
    for row in &table.rows {
        println!("n = {:>5}: mean {:.3}, var {:.4}", row.n, row.mean, row.variance);
    }
    if let Some(slope) = table.slope {
        println!("log-log slope {slope:.3}");
    }
    println!("successive ratios {:.3?}", table.ratios());
    Ok(())
}
