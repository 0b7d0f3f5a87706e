//! Quasi-periodic wave (NLW) and Schrödinger (NLS) symbols on `Z^n × Z^d`,
//! singular sites and their chains, the determinant identity behind the chain
//! bound, and the frequency sets excluded by small divisors.

mod chains;
mod cover;
mod det_identity;
mod diophantine;
mod measure;
mod params;
mod symbols;

pub use chains::{
    chain_bound_data, chains_from_sites, enumerate_singular_chains, enumerate_singular_sites, nls_chain_bound_data, nls_step_check,
    nlw_chain_bound_data, section_counts, singular_link_graph, ChainBoundData, ChainEnumeration, ChainRecord,
    PairBound, SingularChain, SiteBox, StepCheck,
};
pub use cover::{bar_lambda_membership, cover_count_bound, hypothesis2_cover, refine_cover, BarLambdaCheck};
pub use det_identity::{chain_bilinear_data, det_a_identity, independent_selection, ChainBilinearData, DetIdentity};
pub use diophantine::{
    continued_fraction, convergents, diophantine_check, from_partial_quotients, sqrt2_direction, DiophantineReport,
};
pub use measure::{measure_tilde_lambda, MeasureRanges, MeasureReport, OrderMeasure, LAMBDA_RANGE};
pub use params::{dist, FrequencyParams, SpaceTimeSite, SymbolKind};
pub use symbols::{is_singular, symbol, symbol_nls, symbol_nlw};
