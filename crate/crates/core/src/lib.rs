//! Pseudorandom-number toolkit built around chaotic iterations of Boolean
//! maps: xor-like and Blum Blum Shub sources, a post-treatment with provable
//! disorder properties, exhaustive small-size chaos verification, a
//! deterministic lockstep simulation of the GPU kernel schemes, and the
//! classic and cumulative-keystream Blum-Goldwasser cryptosystems.

pub mod battery;
pub mod bbs;
pub mod bg;
pub mod chaotic;
pub mod error;
pub mod graph;
pub mod metric;
pub mod parallel;
pub mod reduction;
pub mod seed;
pub mod stream;
pub mod xorlike;

pub use battery::{run_battery, BitBuffer, TestReport};
pub use bbs::{bbs_keygen, BbsGrid, BbsGridConfig, BbsState, BbsThreadState};
pub use bg::{bg_decrypt, bg_encrypt, cbg_decrypt, cbg_encrypt, modinv, modpow, BgCiphertext, BgKeyPair};
pub use chaotic::{
    algorithm1_next, apply_single, apply_subset, iterate, xor_ci_step, BooleanFunction,
    CiSequential, StateWord, SubsetStrategy,
};
pub use error::{Error, Result};
pub use graph::{
    analyze, build_iteration_graph, build_markov_matrix, is_devaney_chaotic, is_doubly_stochastic,
    stationary_uniformity_check, ChaosReport, IterationGraph, MarkovMatrix, SccCertificate,
};
pub use metric::{
    distance, metric_axiom_suite, periodic_point_witness, transitivity_witness, Distance,
    MetricReport, PeriodicWitness, PhasePoint, TransitivityWitness,
};
pub use parallel::{
    improved_kernel_run, memory_footprint, naive_kernel_run, GridConfig, HazardMode, ImprovedGrid,
    NaiveGrid,
};
pub use reduction::{construct_x, distinguisher_wrapper, phi_y, phi_y_inverse, BlockString};
pub use seed::SeedExpander;
pub use stream::{benchmark, emit, parse_words, EmitFormat, ThroughputReport, Word32Source};
pub use xorlike::{uniform_range, Xor128, Xor128x32, XorShift32, XorShift64, XorWow};
