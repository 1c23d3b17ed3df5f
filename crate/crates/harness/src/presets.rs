//! Bundled experiment grids, addressable by name from the command line.

use crate::config::ExperimentGrid;
use crate::error::{HarnessError, Result};

const PRESETS: [(&str, &str); 5] = [
    ("fig1_m", include_str!("../presets/fig1_m.json")),
    ("fig1_sigma", include_str!("../presets/fig1_sigma.json")),
    ("fig1_k", include_str!("../presets/fig1_k.json")),
    ("fig2_m", include_str!("../presets/fig2_m.json")),
    ("fig3_m", include_str!("../presets/fig3_m.json")),
];

pub fn names() -> impl Iterator<Item = &'static str> {
    PRESETS.iter().map(|(name, _)| *name)
}

/// Raw JSON of a preset; a trailing `.json` on `name` is ignored.
pub fn source(name: &str) -> Option<&'static str> {
    let name = name.strip_suffix(".json").unwrap_or(name);
    PRESETS
        .iter()
        .find(|(n, _)| *n == name)
        .map(|(_, text)| *text)
}

pub fn load(name: &str) -> Result<ExperimentGrid> {
    let text = source(name).ok_or_else(|| {
        HarnessError::Config(format!(
            "no preset named '{name}' (available: {})",
            names().collect::<Vec<_>>().join(", ")
        ))
    })?;
    ExperimentGrid::from_json(text)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn every_preset_validates() {
        for name in names() {
            let grid = load(name).unwrap();
            assert_eq!(grid.name, name);
            grid.validate().unwrap();
        }
    }

    #[test]
    fn lookup_accepts_file_names() {
        assert!(source("fig1_m.json").is_some());
        assert!(load("fig9").is_err());
    }
}
