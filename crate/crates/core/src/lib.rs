//! Security analysis of classical advantage distillation (CAD) for the
//! tomographic qunit key distribution protocol under a coherent block attack.
//!
//! * [`channel`]: the noisy channel and its derived scalars.
//! * [`distill`]: exact and asymptotic informations, security margins and the
//!   QED/CAD noise thresholds.
//! * [`srm`]: Gram-matrix oracle for Eve's square-root-measurement success
//!   probability.
//! * [`sim`]: seeded Monte Carlo simulation of sifting, CAD and the attack.
//! * [`cli`]: the `tomocad` command line.

pub mod channel;
pub mod cli;
pub mod distill;
pub mod error;
pub mod sim;
pub mod srm;

pub use channel::{ancilla_overlap, ChannelParams};
pub use distill::{
    asymptotic_deficits, asymptotic_infos, cad_threshold_closed, cad_threshold_numeric,
    distilled_betas, eve_guess_probs, info_alice_bob, info_alice_eve, is_secure,
    min_secure_block_length, qed_threshold, security_margin, srm_closed_form, threshold_table,
    BlockStats, EveStats, InfoReport, ThresholdRow,
};
pub use error::{Error, Result};
pub use sim::{run_cad_experiment, Nit, SimConfig, SimResult};
pub use srm::{matrix_sqrt_psd, srm_success_probability, verify_closed_form, GramMatrix, SrmVerification};
