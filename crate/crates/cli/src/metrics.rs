use std::fs;
use std::path::Path;

use cyclescope::metrics::recovery_metrics;
use cyclescope::report;
use serde_json::json;

use crate::common::{input, read_json, write_json, Failure};
use crate::MetricsArgs;

pub fn run(args: MetricsArgs) -> Result<(), Failure> {
    let truth = report::truth_from_document(&read_json(&args.truth)?).map_err(input)?;
    let run_doc = read_json(&args.run)?;
    report::expect_schema(&run_doc, report::RUN_SCHEMA).map_err(input)?;
    let run_dir = args.run.parent().unwrap_or(Path::new(""));

    let map_file = run_doc["component"]["map_file"]
        .as_str()
        .ok_or_else(|| input(anyhow::anyhow!("run document lists no component map file")))?;
    let (original_n, component) =
        report::scc_map_from_document(&read_json(&run_dir.join(map_file))?).map_err(input)?;
    if original_n != truth.membership.len() {
        return Err(input(anyhow::anyhow!(
            "vertex map mismatch: the run analyzed a {original_n}-vertex graph but the \
             ground truth describes {} vertices",
            truth.membership.len()
        )));
    }

    let targets = run_doc["targets"]
        .as_array()
        .ok_or_else(|| input(anyhow::anyhow!("run document lists no targets")))?;
    let mut entries = Vec::new();
    let mut summaries = Vec::new();
    for entry in targets {
        let target = entry["target"].as_str().unwrap_or("?");
        let k = entry["k"].as_u64().unwrap_or(0) as usize;
        let Some(group) = truth.cyclic_groups.iter().position(|cg| cg.k == k) else {
            log::info!("target {target}: no ground-truth cyclic group of length {k}");
            continue;
        };
        let Some(csv_name) = entry["files"]["right_csv"]
            .as_str()
            .or_else(|| entry["files"]["left_csv"].as_str())
        else {
            log::info!("target {target}: no coordinate file in the run");
            continue;
        };
        let labels = component_labels(&run_dir.join(csv_name), &component, original_n)?;
        let classes = truth.cycle_classes(group);
        let m = recovery_metrics(&classes, &labels);
        summaries.push(format!(
            "target {target}: ARI {:.4}, coverage {:.4}, {} false positive(s), rotation {}",
            m.adjusted_rand_index, m.coverage, m.false_positives, m.rotation
        ));
        let mut doc = serde_json::to_value(&m).map_err(input)?;
        doc["target"] = json!(target);
        doc["k"] = json!(k);
        entries.push(doc);
    }
    if entries.is_empty() {
        return Err(input(anyhow::anyhow!(
            "no analyzed target matches a cyclic group in the ground truth"
        )));
    }

    let doc = json!({
        "schema": report::METRICS_SCHEMA,
        "truth": args.truth.display().to_string(),
        "run": args.run.display().to_string(),
        "entries": entries,
    });
    for line in &summaries {
        println!("{line}");
    }
    match &args.out {
        Some(path) => {
            write_json(path, &doc)?;
            println!("wrote {}", path.display());
        }
        None => println!("{}", serde_json::to_string_pretty(&doc).map_err(input)?),
    }
    Ok(())
}

/// Reads a coordinate CSV in component-local indices and spreads its
/// group column back onto the original vertex space.
fn component_labels(
    csv_path: &Path,
    component: &[usize],
    original_n: usize,
) -> Result<Vec<Option<usize>>, Failure> {
    let text = fs::read_to_string(csv_path)
        .map_err(|e| input(anyhow::anyhow!("cannot read {}: {e}", csv_path.display())))?;
    let rows = report::parse_embedding_csv(&text).map_err(input)?;
    let mut labels = vec![None; original_n];
    for row in rows {
        let original = *component.get(row.vertex).ok_or_else(|| {
            input(anyhow::anyhow!(
                "vertex {} in {} is outside the analyzed component",
                row.vertex,
                csv_path.display()
            ))
        })?;
        labels[original] = row.group;
    }
    Ok(labels)
}
