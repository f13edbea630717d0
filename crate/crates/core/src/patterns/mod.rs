//! Lexico-syntactic pattern learning: template instantiation over chunked
//! sentences, per-class occurrence statistics, thresholding and reports.

mod stats;
mod template;

pub use stats::{
    count_patterns, emit_pattern_report, threshold_patterns, write_report_tsv, PatternCounts, PatternEntry,
    PatternExtractor, PatternSet, PatternStats, ReportRow, ReportSort, ThresholdConfig,
};
pub use template::{instantiate_templates, LexicoSyntacticPattern, TemplateConfig, TemplateId};
