pub mod analyze;
pub mod audit;
pub mod bridge;
pub mod compare;
pub mod gates;
pub mod ir;
pub mod rtf;
pub mod synth;

use anyhow::{Context, Result};
use std::path::Path;
use tflparity_core::ir::CellGrid;

pub const EXIT_PASS: i32 = 0;
pub const EXIT_FAIL: i32 = 1;

pub fn read_grid(path: &Path) -> Result<CellGrid> {
    let doc =
        std::fs::read_to_string(path).with_context(|| format!("cannot read {}", path.display()))?;
    tflparity_core::render::from_json(&doc)
        .with_context(|| format!("{} is not a valid IR document", path.display()))
}

pub fn write_or_print(out: Option<&Path>, content: &[u8]) -> Result<()> {
    match out {
        Some(path) => {
            if let Some(parent) = path.parent() {
                if !parent.as_os_str().is_empty() {
                    std::fs::create_dir_all(parent)?;
                }
            }
            std::fs::write(path, content)
                .with_context(|| format!("cannot write {}", path.display()))?;
        }
        None => {
            use std::io::Write;
            std::io::stdout().write_all(content)?;
        }
    }
    Ok(())
}

/// Honor the output-directory override from the environment.
pub fn apply_output_override(config: &mut tflparity_core::gates::HarnessConfig) {
    if let Ok(dir) = std::env::var("TFLPARITY_OUT") {
        if !dir.is_empty() {
            config.output_dir = dir.into();
        }
    }
}
