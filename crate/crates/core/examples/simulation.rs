//! Monte Carlo study of several designs on one geometric graph.
use netmix::simulation::{run_simulation, DesignSpec, GraphSpec, SimulationConfig};

fn main() -> netmix::Result<()> {
    let designs = [
        DesignSpec::FixedGreedy,
        DesignSpec::WeightInvariant,
        DesignSpec::Bernoulli,
    ];
    for design in designs {
        let mut cfg = SimulationConfig::new(GraphSpec::rgg(1000, 4.0, 0, 0), design, 2000, 42);
        cfg.bounds.y_m = Some(6.0);
        let r = run_simulation(&cfg)?;
        println!(
            "{:>16}: mean {:+.3} (ATE {:.3}), var {:.3}, var-hat {}, {} clusters",
            r.design,
            r.mean,
            r.true_ate,
            r.variance,
            r.var_hat_upper().map_or("-".into(), |v| format!("{v:.3}")),
            r.clusters
        );
        if let Some(d) = r.normality {
            println!(
                "{:>16}  skew {:+.3}, excess kurtosis {:+.3}, KS {:.4}",
                "", d.skewness, d.excess_kurtosis, d.ks_distance
            );
        }
    }
    Ok(())
}
