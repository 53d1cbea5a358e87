//! One module per subcommand, plus the shared report-writing path.

pub mod classical_break;
pub mod fca;
pub mod paper_example;
pub mod qdetect;
pub mod simulate;

use std::path::Path;

use crate::manifest::{atomic_write, write_json, RunManifest};

/// Stamp the manifest hash into the report, then write report, CSVs, and
/// manifest. The hash excludes the timestamp, so rerunning an identical
/// command leaves report and CSV bytes unchanged.
pub fn write_run(
    dir: &Path,
    command: &str,
    master_seed: u64,
    resolved_config: serde_json::Value,
    mut report: serde_json::Value,
    csv_files: &[(&str, String)],
) -> Result<(), String> {
    let mut outputs: Vec<String> = vec!["report.json".into()];
    outputs.extend(csv_files.iter().map(|(n, _)| n.to_string()));
    outputs.push("manifest.json".into());
    let manifest = RunManifest::new(command, master_seed, resolved_config, outputs);
    report
        .as_object_mut()
        .ok_or("report must be a JSON object")?
        .insert(
            "manifest_hash".into(),
            serde_json::Value::String(manifest.manifest_hash.clone()),
        );
    write_json(&dir.join("report.json"), &report)?;
    for (name, content) in csv_files {
        atomic_write(&dir.join(name), content.as_bytes())?;
    }
    write_json(&dir.join("manifest.json"), &manifest)?;
    Ok(())
}
