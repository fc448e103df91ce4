//! Neurosymbolic FOL reasoning: parse model-written first-order logic, decide
//! entailment with a resolution prover, and majority-vote over sampled
//! translations.

pub mod datasets;
pub mod generation;
pub mod metrics;
pub mod normalize;
pub mod pipeline;
pub mod prover;
pub mod syntax;
pub mod voting;
