//! Exact and Monte-Carlo measurements of the quantities the soundness
//! arguments reason about.

mod corrector;
mod exact;
mod fix;
mod flatness;
mod formulas;
mod manipulation;
mod stats;

pub use corrector::{
    corrector, corrector_lemmas_hold, is_listed_homomorphism, ratio_f64, CorrectorMode,
    CorrectorReport,
};
pub use exact::{
    exact_rejection_probability, signed_sum_histogram, sum_profile, SumProfile, PROFILE_WORK_CAP,
    TUPLE_ENUMERATION_CAP,
};
pub use fix::{
    complete_to, fix_a_from_choices, fix_a_split_from_choices, sample_fix_a, sample_fix_a_split,
    SplitChoices,
};
pub use flatness::{
    agreement_probabilities, binomial, flatness_probe, subsets, FlatnessConfig, FlatnessReport,
    ProbeVariant,
};
pub use formulas::{
    binomial_even_probability, linear_independence_bound, linear_independence_exact,
    linear_independence_probability, zeta_partial_sum, zeta_upper_bound,
};
pub use manipulation::{manipulation_check, ManipulationCheck};
pub use stats::{
    chi_square_contingency, chi_square_two_sample, chi_square_uniform, standard_error,
    wilson_interval, ChiSquare,
};
