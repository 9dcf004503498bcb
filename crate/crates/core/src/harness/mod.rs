//! Monte Carlo experiments: spec files, presets, the sweep runner and
//! CSV/SVG output.

pub mod output;
pub mod presets;
pub mod run;
pub mod spec;
pub mod stats;

pub use output::{emit_csv, emit_plot, write_outputs, PlotStyle};
pub use run::{run_experiment, CurvePoint, RunOptions};
pub use spec::{Erasure, ExperimentSpec, FigureId, RecoveryMode, Task};
