use cyclescope::embed;
use cyclescope::report;
use cyclescope::spectral::{Side, SolverConfig};
use cyclescope::svd::{scaled_adjacency, svd_planar_projection, truncated_svd, SvdError};
use serde_json::json;

use crate::common::{
    convergence, effective_prefix, file_stem, input, load_graph, parse_dims, with_suffix,
    write_json, write_text, Failure,
};
use crate::{HalfArg, SvdArgs};

pub fn run(args: SvdArgs) -> Result<(), Failure> {
    let g = load_graph(&args.graph, args.drop_self_loops)?;
    if args.rank < 1 || args.rank > g.n() {
        return Err(input(anyhow::anyhow!(
            "rank {} out of range for a {}-vertex graph",
            args.rank,
            g.n()
        )));
    }
    let dims = parse_dims(&args.dims)?;
    if dims.0 >= args.rank || dims.1 >= args.rank {
        return Err(input(anyhow::anyhow!(
            "dims {},{} need singular vectors beyond rank {}",
            dims.0,
            dims.1,
            args.rank
        )));
    }
    let side = match args.side {
        HalfArg::Left => Side::Left,
        HalfArg::Right => Side::Right,
    };

    let m = scaled_adjacency(&g);
    let config = SolverConfig {
        dense_threshold: args.dense_threshold,
        tol: args.tol,
        seed: args.seed,
        ..SolverConfig::default()
    };
    let e = truncated_svd(&m, args.rank, &config).map_err(|err| match err {
        SvdError::NoConvergence { .. } => convergence(err),
        other => input(other),
    })?;
    let points = svd_planar_projection(&e, dims, side).map_err(input)?;

    let labels = match args.eps {
        Some(eps) => embed::dbscan(&points, eps, args.min_pts),
        None => vec![None; points.len()],
    };

    let prefix = effective_prefix(&args.out, &file_stem(&args.graph));
    let coords_path = with_suffix(&prefix, "svd.csv");
    let sigma_path = with_suffix(&prefix, "singular_values.csv");
    write_text(&coords_path, &report::coordinates_csv(&points, &labels))?;
    write_text(&sigma_path, &report::singular_values_csv(&e.singular_values))?;

    let doc = json!({
        "schema": report::EMBEDDING_SCHEMA,
        "method": "svd",
        "n": g.n(),
        "rank": args.rank,
        "dims": [dims.0, dims.1],
        "side": match side { Side::Left => "left", _ => "right" },
        "scaling": e.scaling,
        "singular_values": e.singular_values,
        "files": {
            "coordinates_csv": coords_path.file_name().map(|s| s.to_string_lossy().into_owned()),
            "singular_values_csv": sigma_path.file_name().map(|s| s.to_string_lossy().into_owned()),
        },
    });
    let doc_path = with_suffix(&prefix, "svd.json");
    write_json(&doc_path, &doc)?;

    let shown = e.singular_values.len().min(10);
    println!(
        "leading singular values: {:?}",
        &e.singular_values[..shown]
            .iter()
            .map(|s| (s * 1e6).round() / 1e6)
            .collect::<Vec<_>>()
    );
    println!("wrote {}", coords_path.display());
    println!("wrote {}", sigma_path.display());
    println!("wrote {}", doc_path.display());
    Ok(())
}
