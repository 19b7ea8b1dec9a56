use std::fmt::Write as _;
use std::path::Path;

use cyclescope::report;
use cyclescope::sbm::{self, BlockModelSpec};

use crate::common::{effective_prefix, input, read_json, with_suffix, write_text, Failure};
use crate::GenerateArgs;

pub fn run(args: GenerateArgs) -> Result<(), Failure> {
    let (name, spec) = resolve_spec(&args.spec)?;
    spec.validate().map_err(input)?;
    let (graph, truth) = spec.sample(args.seed).map_err(input)?;

    let prefix = effective_prefix(&args.out, &name);
    let edges_path = with_suffix(&prefix, "edges.tsv");
    let truth_path = with_suffix(&prefix, "truth.json");

    let mut edges = String::new();
    for (u, v) in graph.edges() {
        let _ = writeln!(edges, "{u}\t{v}");
    }
    write_text(&edges_path, &edges)?;

    let doc = report::truth_document(&truth).map_err(input)?;
    crate::common::write_json(&truth_path, &doc)?;

    println!(
        "{name}: {} vertices, {} edges, {} blocks, {} cyclic group(s)",
        graph.n(),
        graph.m(),
        spec.block_sizes.len(),
        spec.cyclic_groups.len(),
    );
    println!("wrote {}", edges_path.display());
    println!("wrote {}", truth_path.display());
    Ok(())
}

fn resolve_spec(arg: &str) -> Result<(String, BlockModelSpec), Failure> {
    let path = Path::new(arg);
    if arg.ends_with(".json") || path.is_file() {
        let doc = read_json(path)?;
        let spec: BlockModelSpec = serde_json::from_value(doc)
            .map_err(|e| input(anyhow::anyhow!("invalid block model in {arg}: {e}")))?;
        let name = crate::common::file_stem(path);
        return Ok((name, spec));
    }

    let mut parts = arg.split(':');
    let head = parts.next().unwrap_or_default();
    let params: Vec<&str> = parts.collect();
    let bad_param = |what: &str, value: &str| {
        input(anyhow::anyhow!("invalid {what} {value:?} in spec {arg:?}"))
    };
    match head {
        "pure3cyclic" => {
            if params.len() > 2 {
                return Err(input(anyhow::anyhow!(
                    "pure3cyclic takes at most group_size and rho, got {arg:?}"
                )));
            }
            let group_size = match params.first() {
                Some(s) => s.parse().map_err(|_| bad_param("group size", s))?,
                None => 45,
            };
            let rho = match params.get(1) {
                Some(s) => s.parse().map_err(|_| bad_param("rho", s))?,
                None => 0.8,
            };
            Ok((head.to_string(), sbm::pure_3cyclic(group_size, rho)))
        }
        "hidden3cyclic" => {
            if params.len() > 1 {
                return Err(input(anyhow::anyhow!(
                    "hidden3cyclic takes at most q_ext, got {arg:?}"
                )));
            }
            let q_ext = match params.first() {
                Some(s) => s.parse().map_err(|_| bad_param("q_ext", s))?,
                None => 2,
            };
            Ok((head.to_string(), sbm::hidden_3cyclic(q_ext)))
        }
        "mixedcycles" => {
            if !params.is_empty() {
                return Err(input(anyhow::anyhow!("mixedcycles takes no parameters")));
            }
            Ok((head.to_string(), sbm::mixed_cycles()))
        }
        _ => Err(input(anyhow::anyhow!(
            "unknown spec {arg:?}: expected pure3cyclic[:group_size[:rho]], \
             hidden3cyclic[:q_ext], mixedcycles, or a JSON file"
        ))),
    }
}
