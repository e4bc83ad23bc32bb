//! Experiment harness: the field corpus, the empirical checks of the
//! maximal-operator and norm inequalities, CSV reports and the CLI.

pub mod cli;
mod corpus;
mod experiments;
mod report;
mod settings;

pub use corpus::{corpus_standard, Corpus, CorpusField};
pub use experiments::{
    equivalence_band, exp_bmo_blo, exp_elementary, exp_lemma_inequalities, exp_norm_equivalence, exp_prop_p_decay, exp_t2_ratio,
    exp_weak_l1, EXHAUSTIVE_PAIR_LIMIT,
};
pub use report::{write_summary, Check, ExperimentReport, ReportRow};
pub use settings::{BasisPreset, KernelSpec, Settings, EXPERIMENTS};
