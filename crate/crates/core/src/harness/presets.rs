//! Spec files for the figure experiments, shipped in `presets/`.

use super::spec::ExperimentSpec;
use crate::error::{Error, Result};

/// `(name, file contents)` for every bundled preset.
pub const PRESETS: &[(&str, &str)] = &[
    ("fig2_c12", include_str!("../../presets/fig2_c12.spec")),
    ("fig2_c16", include_str!("../../presets/fig2_c16.spec")),
    ("fig2_c20", include_str!("../../presets/fig2_c20.spec")),
    ("fig2_c8", include_str!("../../presets/fig2_c8.spec")),
    ("fig3_blind", include_str!("../../presets/fig3_blind.spec")),
    (
        "fig3_guided",
        include_str!("../../presets/fig3_guided.spec"),
    ),
    ("fig4_p1e-2", include_str!("../../presets/fig4_p1e-2.spec")),
    ("fig4_p1e-4", include_str!("../../presets/fig4_p1e-4.spec")),
    ("fig4_p1e-6", include_str!("../../presets/fig4_p1e-6.spec")),
    ("fig5_c6", include_str!("../../presets/fig5_c6.spec")),
    ("fig5_c9", include_str!("../../presets/fig5_c9.spec")),
    ("fig6", include_str!("../../presets/fig6.spec")),
    (
        "fig7_c12-24",
        include_str!("../../presets/fig7_c12-24.spec"),
    ),
    ("fig7_c6-18", include_str!("../../presets/fig7_c6-18.spec")),
];

/// Parses the presets of one figure (`"fig3"`) or one preset by full name
/// (`"fig3_blind"`).
pub fn preset_specs(name: &str) -> Result<Vec<ExperimentSpec>> {
    let name = name.to_ascii_lowercase();
    let picked: Vec<_> = PRESETS
        .iter()
        .filter(|(n, _)| {
            *n == name
                || n.strip_prefix(name.as_str())
                    .is_some_and(|r| r.starts_with('_'))
        })
        .collect();
    if picked.is_empty() {
        return Err(Error::Message(format!("no preset named {name:?}")));
    }
    picked
        .iter()
        .map(|(_, text)| ExperimentSpec::parse(text))
        .collect()
}
