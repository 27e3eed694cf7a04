//! Correlation against human judgments, the BLEU baseline, biased sets,
//! error-type subsets, AUC and the ablation runner.

mod ablation;
mod auc;
mod bleu;
mod correlation;
mod metric;
mod sets;

pub use ablation::{
    ablated_training_set, ablation_run, ablation_table, evaluation_sets, train_ablated, AblationResult, AblationSetup,
    AblationTable, SetCorrelation,
};
pub use auc::auc;
pub use bleu::{modified_precision, sentence_bleu, BLEU_SMOOTHING};
pub use correlation::{average_ranks, kendall, pearson, spearman, Correlation};
pub use metric::{evaluate_metric, load_scores, read_scores, score_map, write_scores, CorrelationReport, ScoreRecord};
pub use sets::{
    biased_set, biased_sets, error_subset, has_error_type, is_reasonable, BiasedSetSpec, BIASED_SETS,
    ERROR_FLAG_THRESHOLD,
};
