use cyclescope::bounds::verify_bounds;
use cyclescope::embed;
use cyclescope::report;
use cyclescope::sbm::GroundTruth;
use cyclescope::spectral::{self, Side, SolverConfig};
use cyclescope::TransitionMatrix;
use serde_json::json;

use crate::common::{
    classify_spectral, input, load_graph, parse_target, read_json, write_json, Failure,
};
use crate::BoundsArgs;

pub fn run(args: BoundsArgs) -> Result<(), Failure> {
    let target = parse_target(&args.target)?;
    let original = load_graph(&args.graph, args.drop_self_loops)?;
    let truth = report::truth_from_document(&read_json(&args.truth)?).map_err(input)?;
    if truth.membership.len() != original.n() {
        return Err(input(anyhow::anyhow!(
            "ground truth describes {} vertices but the graph has {}",
            truth.membership.len(),
            original.n()
        )));
    }

    // Bounds compare against the component the solver actually sees, so
    // the ground truth is restricted alongside the graph.
    let (g, component) = original.largest_scc();
    let scc_truth = GroundTruth {
        membership: component.iter().map(|&v| truth.membership[v]).collect(),
        cyclic_groups: truth.cyclic_groups.clone(),
    };

    let b = TransitionMatrix::from_graph(&g).map_err(input)?;
    let config = SolverConfig {
        dense_threshold: args.dense_threshold,
        tol: args.tol,
        seed: args.seed,
        ..SolverConfig::default()
    };
    // The overlap measurement needs both eigenvectors.
    let pair =
        spectral::nearest_eigenpair(&b, target, Side::Both, &config).map_err(classify_spectral)?;
    let e = embed::embed(&pair, Side::Right, target.q() as usize).map_err(input)?;
    let rep = verify_bounds(&g, &scc_truth, &pair, &e).map_err(input)?;

    let mut doc = report::tagged(report::BOUNDS_SCHEMA, &rep).map_err(input)?;
    doc["target"] = json!(target.to_string());
    doc["lambda"] = json!({ "re": pair.lambda.re, "im": pair.lambda.im });
    doc["component_vertices"] = json!(g.n());
    doc["original_vertices"] = json!(original.n());

    println!(
        "target {target}: epsilon = {:.6}, first-order bound = {:.6} ({}), overlap {} {:.6}",
        rep.epsilon,
        rep.perturbation.first_order,
        if rep.epsilon_within_first_order {
            "holds"
        } else {
            "exceeded"
        },
        match rep.overlap_ok {
            Some(true) => "ok, lower bound",
            Some(false) => "below lower bound",
            None => "not measured, lower bound",
        },
        rep.overlap_lower,
    );
    match &args.out {
        Some(path) => {
            write_json(path, &doc)?;
            println!("wrote {}", path.display());
        }
        None => println!("{}", serde_json::to_string_pretty(&doc).map_err(input)?),
    }
    Ok(())
}
