//! The shadow and Bayes distinguishers, the collision-pair attack on
//! binary-phase families, and the PRU advantage game.

mod collision;
mod distinguish;
mod likelihood;
mod permanent;
mod pru;

pub use collision::{
    binary_phase_attack_experiment, collision_circuit_output, np_oracle_key_search, sample_collision_pair,
    AttackBranchStats, AttackReport, BackendAttackReport, CollisionPair, CollisionSample, CollisionSampler, KEY_SEARCH_CAP,
};
pub use distinguish::{
    bayes_decision, collect_records, distinguishing_experiment, shadow_decision, BayesOptions, BayesOutcome,
    DistinguishOptions, DistinguishReport, DistinguishTrial, HaarMethod,
};
pub use likelihood::{
    ensemble_likelihood, ensemble_log_likelihood, gram_matrix, haar_likelihood, haar_log_likelihood,
    mc_log_likelihood, PERMANENT_CAP,
};
pub use permanent::permanent;
pub use pru::{pru_advantage_experiment, swap_test_prediction, Adversary, AdvantageReport};
