use std::time::Instant;

use cyclescope::embed::{self, ClusterMethod, ClusterResult, PlanarEmbedding};
use cyclescope::report;
use cyclescope::spectral::{self, Side, SolverConfig};
use cyclescope::{Digraph, TransitionMatrix};
use serde_json::{json, Value};

use crate::common::{
    classify_spectral, effective_prefix, file_stem, input, parse_target, with_suffix, write_json,
    write_text, Failure,
};
use crate::{AnalyzeArgs, SideArg};

fn side_of(arg: SideArg) -> Side {
    match arg {
        SideArg::Left => Side::Left,
        SideArg::Right => Side::Right,
        SideArg::Both => Side::Both,
    }
}

fn side_name(side: Side) -> &'static str {
    match side {
        Side::Left => "left",
        Side::Right => "right",
        Side::Both => "both",
    }
}

struct TargetOutput {
    doc: Value,
    summary: String,
}

pub fn run(args: AnalyzeArgs) -> Result<(), Failure> {
    let total = Instant::now();
    let targets = args
        .targets
        .iter()
        .map(|s| parse_target(s))
        .collect::<Result<Vec<_>, Failure>>()?;

    let original = load(&args)?;
    let (g, scc_map) = original.largest_scc();
    println!(
        "component: {} of {} vertices, {} edges",
        g.n(),
        original.n(),
        g.m()
    );
    let b = TransitionMatrix::from_graph(&g).map_err(input)?;
    let config = SolverConfig {
        dense_threshold: args.dense_threshold,
        tol: args.tol,
        seed: args.seed,
        ..SolverConfig::default()
    };
    let side = side_of(args.side);

    let prefix = effective_prefix(&args.out, &file_stem(&args.graph));
    let scc_path = with_suffix(&prefix, "sccmap.json");
    write_json(&scc_path, &report::scc_map_document(original.n(), &scc_map))?;

    let mut target_docs = Vec::new();
    let mut summaries = Vec::new();
    for target in &targets {
        let out = analyze_target(&g, &b, *target, side, &config, &args, &prefix)?;
        target_docs.push(out.doc);
        summaries.push(out.summary);
    }

    let run_doc = json!({
        "schema": report::RUN_SCHEMA,
        "input": {
            "path": args.graph.display().to_string(),
            "vertices": original.n(),
            "edges": original.m(),
        },
        "component": {
            "vertices": g.n(),
            "edges": g.m(),
            "map_file": file_name(&scc_path),
        },
        "parameters": {
            "side": side_name(side),
            "tol": args.tol,
            "dense_threshold": args.dense_threshold,
            "eps": args.eps,
            "min_pts": args.min_pts,
            "mag_threshold": args.mag_threshold,
            "seed": args.seed,
            "drop_self_loops": args.drop_self_loops,
        },
        "targets": target_docs,
        "elapsed_ms": total.elapsed().as_millis() as u64,
    });
    let run_path = with_suffix(&prefix, "run.json");
    write_json(&run_path, &run_doc)?;

    for line in &summaries {
        println!("{line}");
    }
    println!("wrote {}", run_path.display());
    Ok(())
}

fn load(args: &AnalyzeArgs) -> Result<Digraph, Failure> {
    crate::common::load_graph(&args.graph, args.drop_self_loops)
}

fn analyze_target(
    g: &Digraph,
    b: &TransitionMatrix,
    target: spectral::RootTarget,
    side: Side,
    config: &SolverConfig,
    args: &AnalyzeArgs,
    prefix: &str,
) -> Result<TargetOutput, Failure> {
    let t0 = Instant::now();
    let pair = spectral::nearest_eigenpair(b, target, side, config).map_err(classify_spectral)?;
    let k = target.q() as usize;
    let epsilon = (pair.lambda - target.value()).norm();

    let tname = format!("{}-{}", target.p(), target.q());
    let mut files = serde_json::Map::new();
    let mut embeddings: Vec<(Side, PlanarEmbedding)> = Vec::new();
    if k >= 2 {
        for s in [Side::Right, Side::Left] {
            let wanted = match s {
                Side::Right => side.wants_right(),
                _ => side.wants_left(),
            };
            if wanted {
                embeddings.push((s, embed::embed(&pair, s, k).map_err(input)?));
            }
        }
    }

    // Grouping runs on the right embedding when present; the labels are
    // per vertex and shared by every coordinate file of this target.
    let cluster: Option<ClusterResult> = match embeddings.first() {
        Some((_, e)) => Some(cluster_embedding(g, e, k, args)?),
        None => None,
    };
    let labels: Vec<Option<usize>> = match &cluster {
        Some(c) => c.labels.clone(),
        None => vec![None; g.n()],
    };

    for (s, e) in &embeddings {
        let csv = report::embedding_csv(e, &labels);
        let path = with_suffix(prefix, &format!("{tname}.{}.csv", side_name(*s)));
        write_text(&path, &csv)?;
        files.insert(
            format!("{}_csv", side_name(*s)),
            json!(file_name(&path)),
        );
    }

    let decay = embeddings
        .iter()
        .find(|(s, _)| *s == Side::Right)
        .and_then(|(_, e)| embed::decay_check(g, e, &labels));

    let (cluster_doc, summary_tail) = match &cluster {
        Some(c) => {
            let seeds = embeddings
                .first()
                .map(|(_, e)| embed::extract_seeds(c, e, args.seeds_per_group))
                .unwrap_or_default();
            let sizes: Vec<usize> = (0..c.group_count())
                .map(|gix| c.labels.iter().filter(|l| **l == Some(gix)).count())
                .collect();
            let noise = c.labels.iter().filter(|l| l.is_none()).count();
            let method = match c.method {
                ClusterMethod::Sector => "sector",
                ClusterMethod::Dbscan => "dbscan",
            };
            let doc = json!({
                "method": method,
                "group_count": c.group_count(),
                "group_sizes": sizes,
                "noise": noise,
                "seeds": seeds,
            });
            let tail = format!(
                "{} groups of sizes {:?}, {} noise",
                c.group_count(),
                sizes,
                noise
            );
            (doc, tail)
        }
        None => (Value::Null, "no embedding requested".to_string()),
    };

    let doc = json!({
        "target": target.to_string(),
        "k": k,
        "lambda": { "re": pair.lambda.re, "im": pair.lambda.im },
        "residual": { "right": pair.right_residual, "left": pair.left_residual },
        "epsilon": epsilon,
        "cluster": cluster_doc,
        "decay": decay,
        "files": files,
        "elapsed_ms": t0.elapsed().as_millis() as u64,
    });
    let summary = format!(
        "theta {}: lambda = {:.6} + {:.6}i, epsilon = {:.4e}, {}",
        target, pair.lambda.re, pair.lambda.im, epsilon, summary_tail
    );
    Ok(TargetOutput { doc, summary })
}

fn cluster_embedding(
    g: &Digraph,
    e: &PlanarEmbedding,
    k: usize,
    args: &AnalyzeArgs,
) -> Result<ClusterResult, Failure> {
    match args.eps {
        Some(eps) => Ok(embed::dbscan_cluster(e, eps, args.min_pts)),
        None => {
            let threshold = args.mag_threshold * e.max_magnitude();
            embed::sector_classify(g, e, k, threshold).map_err(input)
        }
    }
}

fn file_name(path: &std::path::Path) -> String {
    path.file_name()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_default()
}
