//! Pipeline, aggregation, and emission behind the `lnlife` command line.

pub mod emit;
pub mod pipeline;
pub mod report;
pub mod stats;

pub use emit::{emit, OutputFormat};
pub use pipeline::{
    analyze_channel, run_pipeline, AnalyzedChannel, PipelineConfig, PipelineError, PipelineOutput,
    SourceConfig,
};
pub use report::{build_report, ReportBundle};
pub use stats::{summary_stats, SummaryStats};
