//! One mixed experiment: assign, observe, estimate, and compare with exact moments.
use netmix::clustering::Clustering;
use netmix::design::assign_mixed;
use netmix::estimation::{exhaustive_moments_mixed, mixed_estimate, rho_fixed};
use netmix::graph::InterferenceGraph;
use netmix::outcome::{evaluate_outcomes, OutcomeModel};

fn main() -> netmix::Result<()> {
    let graph = InterferenceGraph::new(
        6,
        [
            (0, 1, 0.5),
            (1, 0, 0.4),
            (1, 2, 0.3),
            (2, 1, 0.6),
            (3, 4, 0.7),
            (4, 3, 0.2),
            (4, 5, 0.5),
            (5, 4, 0.4),
            (2, 3, 0.2),
        ],
    )?;
    let model = OutcomeModel::new(vec![5.0; 6], vec![0.2, 0.4, 0.6, 0.8, 1.0, 1.2], 0.9)?;
    let clustering = Clustering::new(6, vec![vec![0, 1, 2], vec![3, 4, 5]])?;
    let (p, rho) = (0.5, rho_fixed(&graph, &clustering)?);

    let a = assign_mixed(&clustering, p, 2024)?;
    let y = evaluate_outcomes(&graph, &model, &a.z)?;
    let est = mixed_estimate(&y, &a, rho)?;
    let exact = exhaustive_moments_mixed(&graph, &model, &clustering, rho, p)?;
    println!("cluster arm per unit: {:?}", a.w_tilde);
    println!("treatment:            {:?}", a.z);
    println!(
        "tau = {:.3} (tau_c {:.3}, tau_b {:.3}, rho {:.3}); exact mean {:.4} = ATE {:.4}, sd {:.3}",
        est.tau,
        est.tau_c,
        est.tau_b,
        est.rho,
        exact.mean,
        model.true_ate(&graph),
        exact.variance.sqrt()
    );
    Ok(())
}
